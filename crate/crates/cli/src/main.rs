//! `shapint`: command-line front end for exact and sampled attribution
//! indices over cooperative games.

mod emit;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shapint::pairwise::{self, upper_pairs, SpectrumKind};
use shapint::sampling;
use shapint::setwise;
use shapint::shapley;
use shapint::{build_game, run_axioms, AxiomConfig, Coalition, Error, Game, GameSpec};

use emit::{num, Format, Report};

const EXIT_CONFIG: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "shapint",
    version,
    about = "Shapley values and interaction indices for cooperative games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Game spec: table:PATH | additive:w1,w2,… | majority:n,t | pattern:n,mask,c | random:n,seed | exec:n,COMMAND
    #[arg(long)]
    game: String,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Draws per estimate in sampled mode.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stratify sampled Shapley values and interactions across orders.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    stratified: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Raise or lower the exact-enumeration player cap.
    #[arg(long)]
    exact_cap: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct PairSelect {
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    /// Every pair i < j.
    #[arg(long, conflicts_with_all = ["i", "j"])]
    all_pairs: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Shapley values of one or all players.
    Shapley {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: Option<usize>,
    },
    /// Multi-order Shapley values.
    ShapleyOrders {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Pairwise interaction I(i,j).
    Interaction {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairSelect,
    },
    /// Multi-order interaction spectrum I^(m)(i,j) over all orders.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairSelect,
    },
    /// Purified interaction components J^(m)(i,j).
    Purified {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pairs: PairSelect,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Grabisch interaction index of a coalition.
    Grabisch {
        #[command(flatten)]
        common: Common,
        /// Coalition as a mask string, player 0 leftmost.
        #[arg(long, required_unless_present = "all")]
        set: Option<String>,
        /// Every nonempty coalition.
        #[arg(long, conflicts_with = "set")]
        all: bool,
    },
    /// Coalition significance B and B'.
    Significance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: String,
    },
    /// Shapley-Taylor index of order k.
    Taylor {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        set: Option<String>,
    },
    /// Run the axiom suite; exits 4 when any property fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = shapint::axioms::DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Property-name prefixes to run, comma separated.
        #[arg(long, value_delimiter = ',')]
        scope: Vec<String>,
        /// Seed of the synthesized partner game.
        #[arg(long, default_value_t = 0)]
        partner_seed: u64,
    },
    /// Raw game values, written as a loadable table with --all.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "all")]
        set: Option<String>,
        #[arg(long, conflicts_with = "set")]
        all: bool,
    },
}

/// Failure of a command, carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Oracle(_) => EXIT_ORACLE,
            Error::FormMismatch { .. } => EXIT_VERIFY,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

type Outcome = Result<(Report, Format, bool), Failure>;

struct Session {
    game: Game,
    common: Common,
}

impl Session {
    fn open(common: Common) -> Result<Self, Failure> {
        let spec: GameSpec = common.game.parse()?;
        let mut game = build_game(&spec)?;
        if let Some(cap) = common.exact_cap {
            game = game.with_exact_cap(cap);
        }
        if common.mode == Mode::Sampled {
            match common.samples {
                None => return Err(config_failure("--mode sampled requires --samples K")),
                Some(k) if k < 2 => return Err(config_failure("--samples must be at least 2")),
                _ => {}
            }
        }
        Ok(Self { game, common })
    }

    fn sampled(&self) -> Option<usize> {
        match self.common.mode {
            Mode::Exact => None,
            Mode::Sampled => self.common.samples,
        }
    }

    fn seed(&self) -> u64 {
        self.common.seed
    }

    /// Value columns for the current mode.
    fn columns(&self, keys: &[&'static str]) -> Vec<&'static str> {
        let mut cols = keys.to_vec();
        cols.push("value");
        if self.sampled().is_some() {
            cols.extend(["stderr", "samples", "seed"]);
        }
        cols
    }

    fn report(&self, command: &str, item: &'static str, keys: &[&'static str]) -> Report {
        Report::new(command, item, self.columns(keys))
    }

    fn coalition(&self, mask: &str) -> Result<Coalition, Failure> {
        Ok(Coalition::from_mask_string(mask, self.game.n())?)
    }

    fn pairs(&self, sel: &PairSelect) -> Result<Vec<(usize, usize)>, Failure> {
        if sel.all_pairs {
            return Ok(upper_pairs(self.game.n()));
        }
        match (sel.i, sel.j) {
            (Some(i), Some(j)) => Ok(vec![(i, j)]),
            _ => Err(config_failure(
                "select a pair with --i and --j, or use --all-pairs",
            )),
        }
    }

    fn orders(&self, top: usize, order: Option<usize>) -> Result<Vec<usize>, Failure> {
        match order {
            Some(m) if m >= top => {
                Err(config_failure(format!("--order {m} out of range 0..{top}")))
            }
            Some(m) => Ok(vec![m]),
            None => Ok((0..top).collect()),
        }
    }

    fn players(&self, i: Option<usize>) -> Vec<usize> {
        match i {
            Some(i) => vec![i],
            None => (0..self.game.n()).collect(),
        }
    }

    fn finish(&self, mut report: Report) -> Outcome {
        report.provenance("game", self.game.label());
        report.provenance(
            "mode",
            match self.common.mode {
                Mode::Exact => "exact",
                Mode::Sampled => "sampled",
            },
        );
        report.provenance("seed", self.seed());
        if let Some(k) = self.sampled() {
            report.provenance("samples", k);
        }
        report.provenance("eval_count", self.game.eval_count());
        Ok((report, self.common.format, true))
    }
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{i}-{j}")
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Shapley { common, i } => {
            let s = Session::open(common)?;
            let mut r = s.report("shapley", "player", &["player"]);
            if let Some(k) = s.sampled() {
                for p in s.players(i) {
                    let e =
                        sampling::estimate_shapley(&s.game, p, k, s.seed(), s.common.stratified)?;
                    r.push_estimate(vec![p.to_string()], &e);
                }
            } else if let Some(p) = i {
                r.push(vec![
                    p.to_string(),
                    num(shapley::shapley_value(&s.game, p, None)?),
                ]);
            } else {
                let v = shapley::shapley_vector(&s.game)?;
                for (p, x) in v.values.iter().enumerate() {
                    r.push(vec![p.to_string(), num(*x)]);
                }
            }
            s.finish(r)
        }
        Command::ShapleyOrders { common, i, order } => {
            let s = Session::open(common)?;
            let mut r = s.report("shapley-orders", "order", &["player", "m"]);
            let orders = s.orders(s.game.n(), order)?;
            for p in s.players(i) {
                for &m in &orders {
                    let keys = vec![p.to_string(), m.to_string()];
                    if let Some(k) = s.sampled() {
                        r.push_estimate(
                            keys,
                            &sampling::estimate_shapley_order(&s.game, p, m, k, s.seed())?,
                        );
                    } else {
                        let mut keys = keys;
                        keys.push(num(shapley::shapley_order(&s.game, p, m, None)?));
                        r.push(keys);
                    }
                }
            }
            s.finish(r)
        }
        Command::Interaction { common, pairs } => {
            let s = Session::open(common)?;
            let mut r = s.report("interaction", "pair", &["pair"]);
            for (i, j) in s.pairs(&pairs)? {
                if let Some(k) = s.sampled() {
                    let e = sampling::estimate_interaction(
                        &s.game,
                        i,
                        j,
                        k,
                        s.seed(),
                        s.common.stratified,
                    )?;
                    r.push_estimate(vec![pair_key(i, j)], &e);
                } else {
                    r.push(vec![
                        pair_key(i, j),
                        num(pairwise::interaction(&s.game, i, j)?),
                    ]);
                }
            }
            s.finish(r)
        }
        Command::Spectrum { common, pairs } => {
            let s = Session::open(common)?;
            let mut r = s.report("spectrum", "order", &["pair", "m"]);
            for (i, j) in s.pairs(&pairs)? {
                if let Some(k) = s.sampled() {
                    for m in 0..s.game.n().saturating_sub(1) {
                        let e =
                            sampling::estimate_interaction_order(&s.game, i, j, m, k, s.seed())?;
                        r.push_estimate(vec![pair_key(i, j), m.to_string()], &e);
                    }
                } else {
                    let spec = pairwise::spectrum(&s.game, i, j, SpectrumKind::Raw)?;
                    for (m, x) in spec.values.iter().enumerate() {
                        r.push(vec![pair_key(i, j), m.to_string(), num(*x)]);
                    }
                }
            }
            s.finish(r)
        }
        Command::Purified {
            common,
            pairs,
            order,
        } => {
            let s = Session::open(common)?;
            let mut r = s.report("purified", "order", &["pair", "m"]);
            let orders = s.orders(s.game.n().saturating_sub(1), order)?;
            for (i, j) in s.pairs(&pairs)? {
                if let Some(k) = s.sampled() {
                    for &m in &orders {
                        let e = sampling::estimate_purified_order(&s.game, i, j, m, k, s.seed())?;
                        r.push_estimate(vec![pair_key(i, j), m.to_string()], &e);
                    }
                } else {
                    let spec = pairwise::spectrum(&s.game, i, j, SpectrumKind::Purified)?;
                    for &m in &orders {
                        r.push(vec![pair_key(i, j), m.to_string(), num(spec.values[m])]);
                    }
                }
            }
            s.finish(r)
        }
        Command::Grabisch { common, set, all } => {
            let s = Session::open(common)?;
            if s.sampled().is_some() {
                return Err(config_failure(
                    "grabisch has no sampled mode; use --mode exact",
                ));
            }
            let mut r = s.report("grabisch", "coalition", &["set"]);
            let sets: Vec<Coalition> = match (set, all) {
                (Some(mask), _) => vec![s.coalition(&mask)?],
                (None, _) => s.game.full().subsets().filter(|c| !c.is_empty()).collect(),
            };
            for c in sets {
                r.push(vec![
                    c.to_mask_string(),
                    num(setwise::grabisch_index(&s.game, &c)?),
                ]);
            }
            s.finish(r)
        }
        Command::Significance { common, set } => {
            let s = Session::open(common)?;
            let c = s.coalition(&set)?;
            let r = if let Some(k) = s.sampled() {
                let mut r = Report::new(
                    "significance",
                    "coalition",
                    vec!["set", "b_prime", "stderr", "samples", "seed"],
                );
                let e = sampling::estimate_significance(&s.game, &c, k, s.seed())?;
                r.push_estimate(vec![c.to_mask_string()], &e);
                r
            } else {
                let mut r = Report::new("significance", "coalition", vec!["set", "b", "b_prime"]);
                let rep = setwise::b_significance(&s.game, &c)?;
                r.push(vec![c.to_mask_string(), num(rep.b), num(rep.b_prime)]);
                r
            };
            s.finish(r)
        }
        Command::Taylor { common, k, set } => {
            let s = Session::open(common)?;
            let mut r = s.report("taylor", "coalition", &["set", "k"]);
            match (s.sampled(), set) {
                (Some(samples), Some(mask)) => {
                    let c = s.coalition(&mask)?;
                    let e = sampling::estimate_taylor(&s.game, &c, k, samples, s.seed())?;
                    r.push_estimate(vec![c.to_mask_string(), k.to_string()], &e);
                }
                (Some(_), None) => {
                    return Err(config_failure("sampled taylor needs --set"));
                }
                (None, Some(mask)) => {
                    let c = s.coalition(&mask)?;
                    let x = setwise::shapley_taylor(&s.game, &c, k)?;
                    r.push(vec![c.to_mask_string(), k.to_string(), num(x)]);
                }
                (None, None) => {
                    let index = setwise::taylor_index(&s.game, k)?;
                    for (c, x) in &index.values {
                        r.push(vec![c.to_mask_string(), k.to_string(), num(*x)]);
                    }
                    r.provenance("total", num(index.total()));
                }
            }
            s.finish(r)
        }
        Command::Verify {
            common,
            tolerance,
            scope,
            partner_seed,
        } => {
            let s = Session::open(common)?;
            if s.sampled().is_some() {
                return Err(config_failure("verify runs in exact mode only"));
            }
            let config = AxiomConfig {
                tolerance,
                partner_seed,
                scope,
            };
            let report = run_axioms(&s.game, &config)?;
            let passed = report.passed();
            let mut r = emit::axiom_report(&report);
            r.provenance("partner_seed", partner_seed);
            r.provenance("eval_count", s.game.eval_count());
            Ok((r, s.common.format, passed))
        }
        Command::Eval { common, set, all } => {
            let s = Session::open(common)?;
            let mut r = Report::new("eval", "coalition", vec!["mask", "value"]);
            match (set, all) {
                (Some(mask), _) => {
                    let c = s.coalition(&mask)?;
                    r.push(vec![c.to_mask_string(), num(s.game.evaluate(&c)?)]);
                }
                (None, _) => {
                    let table = s.game.exact_table()?;
                    let n = s.game.n();
                    for (mask, x) in table.values().iter().enumerate() {
                        let c = Coalition::new(n, mask as u64)?;
                        r.push(vec![c.to_mask_string(), num(*x)]);
                    }
                }
            }
            s.finish(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, format, passed)) => {
            if format == Format::Csv {
                eprint!("{}", report.provenance_lines());
            }
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(report.render(format).as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::FAILURE;
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verify: at least one property failed");
                ExitCode::from(EXIT_VERIFY)
            }
        }
        Err(f) => {
            eprintln!("shapint: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
