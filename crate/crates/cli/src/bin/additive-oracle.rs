//! Example exec oracle: the additive game `v(S) = Σ_{i∈S} w_i` served over
//! the line protocol. Weights come from the arguments, comma or space
//! separated.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut weights = Vec::new();
    for arg in std::env::args().skip(1) {
        for w in arg.split(',').filter(|w| !w.is_empty()) {
            match w.parse::<f64>() {
                Ok(x) => weights.push(x),
                Err(_) => {
                    eprintln!("additive-oracle: bad weight {w:?}");
                    return ExitCode::from(2);
                }
            }
        }
    }
    let stdin = io::stdin().lock();
    let mut stdout = io::stdout().lock();
    for line in stdin.lines() {
        let Ok(line) = line else {
            return ExitCode::FAILURE;
        };
        let mask = line.trim();
        if mask.len() != weights.len() {
            eprintln!(
                "additive-oracle: mask {mask:?} does not have {} players",
                weights.len()
            );
            return ExitCode::from(2);
        }
        let mut total = 0.0;
        for (c, w) in mask.chars().zip(&weights) {
            match c {
                '1' => total += w,
                '0' => {}
                _ => {
                    eprintln!("additive-oracle: bad mask character {c:?}");
                    return ExitCode::from(2);
                }
            }
        }
        if writeln!(stdout, "{total:?}")
            .and_then(|_| stdout.flush())
            .is_err()
        {
            return ExitCode::FAILURE;
        }
    }
    ExitCode::SUCCESS
}
