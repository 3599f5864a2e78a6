use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::coalition::Coalition;
use crate::error::{config, Error, Result};

use super::exec::ExecOracle;
use super::synthetic::{Additive, Majority, Pattern, RandomGame};
use super::table_file::read_table;
use super::Game;

/// Textual game description, e.g. `majority:3,2` or `random:8,42`.
///
/// | kind       | syntax                          |
/// |------------|---------------------------------|
/// | additive   | `additive:w1,w2,…`              |
/// | majority   | `majority:n,threshold`          |
/// | pattern    | `pattern:n,maskstring,c`        |
/// | random     | `random:n,seed`                 |
/// | table      | `table:PATH`                    |
/// | exec       | `exec:n,COMMAND`                |
#[derive(Debug, Clone, PartialEq)]
pub enum GameSpec {
    Additive { weights: Vec<f64> },
    Majority { n: usize, threshold: usize },
    Pattern { pattern: Coalition, value: f64 },
    Random { n: usize, seed: u64 },
    Table { path: PathBuf },
    Exec { n: usize, command: String },
}

fn parse_num<T: FromStr>(what: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| config(format!("invalid {what} {:?}", text.trim())))
}

impl FromStr for GameSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| config(format!("game spec {s:?} lacks a `kind:` prefix")))?;
        let fields = |count: usize| -> Result<Vec<&str>> {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != count {
                return Err(config(format!(
                    "{kind} game expects {count} comma-separated fields, got {}",
                    parts.len()
                )));
            }
            Ok(parts)
        };
        match kind {
            "additive" => Ok(GameSpec::Additive {
                weights: rest
                    .split(',')
                    .map(|w| parse_num("weight", w))
                    .collect::<Result<_>>()?,
            }),
            "majority" => {
                let f = fields(2)?;
                Ok(GameSpec::Majority {
                    n: parse_num("player count", f[0])?,
                    threshold: parse_num("threshold", f[1])?,
                })
            }
            "pattern" => {
                let f = fields(3)?;
                let n: usize = parse_num("player count", f[0])?;
                let pattern = Coalition::from_mask_string(f[1].trim(), n)
                    .map_err(|e| config(format!("pattern mask: {e}")))?;
                Ok(GameSpec::Pattern {
                    pattern,
                    value: parse_num("pattern value", f[2])?,
                })
            }
            "random" => {
                let f = fields(2)?;
                Ok(GameSpec::Random {
                    n: parse_num("player count", f[0])?,
                    seed: parse_num("seed", f[1])?,
                })
            }
            "table" => {
                if rest.is_empty() {
                    return Err(config("table game needs a path"));
                }
                Ok(GameSpec::Table {
                    path: PathBuf::from(rest),
                })
            }
            "exec" => {
                let (n, command) = rest
                    .split_once(',')
                    .ok_or_else(|| config("exec game expects `exec:n,COMMAND`"))?;
                Ok(GameSpec::Exec {
                    n: parse_num("player count", n)?,
                    command: command.to_string(),
                })
            }
            other => Err(config(format!("unknown game kind {other:?}"))),
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameSpec::Additive { weights } => {
                let w: Vec<String> = weights.iter().map(|w| format!("{w}")).collect();
                write!(f, "additive:{}", w.join(","))
            }
            GameSpec::Majority { n, threshold } => write!(f, "majority:{n},{threshold}"),
            GameSpec::Pattern { pattern, value } => {
                write!(f, "pattern:{},{pattern},{value}", pattern.n())
            }
            GameSpec::Random { n, seed } => write!(f, "random:{n},{seed}"),
            GameSpec::Table { path } => write!(f, "table:{}", path.display()),
            GameSpec::Exec { n, command } => write!(f, "exec:{n},{command}"),
        }
    }
}

impl GameSpec {
    pub fn build(&self) -> Result<Game> {
        build_game(self)
    }
}

pub fn build_game(spec: &GameSpec) -> Result<Game> {
    let label = spec.to_string();
    match spec {
        GameSpec::Additive { weights } => Game::new(Additive::new(weights.clone())?, label),
        GameSpec::Majority { n, threshold } => Game::new(Majority::new(*n, *threshold)?, label),
        GameSpec::Pattern { pattern, value } => Game::new(Pattern::new(*pattern, *value)?, label),
        GameSpec::Random { n, seed } => Game::new(RandomGame::new(*n, *seed)?, label),
        GameSpec::Table { path } => Game::new(read_table(path)?, label),
        GameSpec::Exec { n, command } => Game::new(ExecOracle::spawn(*n, command)?, label),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for text in [
            "additive:2,3,5",
            "majority:3,2",
            "pattern:4,0110,-2",
            "random:5,7",
            "table:some/file.csv",
            "exec:3,python3 -c 'print(1)'",
        ] {
            let spec: GameSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            "additive",
            "additive:1,x",
            "majority:3",
            "pattern:3,11,1",
            "random:5",
            "table:",
            "exec:3",
            "blob:1",
        ] {
            assert!(text.parse::<GameSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn random_game_is_reproducible() {
        let spec: GameSpec = "random:5,7".parse().unwrap();
        let a = build_game(&spec).unwrap().exact_table().unwrap();
        let b = build_game(&spec).unwrap().exact_table().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn additive_two_players() {
        let g = build_game(&"additive:1,1".parse().unwrap()).unwrap();
        assert_eq!(g.evaluate(&g.full()).unwrap(), 2.0);
    }
}
