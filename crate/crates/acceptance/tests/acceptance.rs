//! Runs the shipped corpus and prints one line per acceptance criterion.

use std::path::PathBuf;
use std::process::ExitCode;

use mallgames::corpus::{load_corpus, run_corpus};

fn main() -> ExitCode {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/standard.json");
    let corpus = match load_corpus(&path) {
        Ok(c) => c,
        Err(e) => {
            println!("cannot load {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    };
    let report = match run_corpus(&corpus) {
        Ok(r) => r,
        Err(e) => {
            println!("corpus run failed: {e}");
            return ExitCode::FAILURE;
        }
    };

    let mut red = Vec::new();
    for n in 1..=11 {
        let Some(c) = report.check(n) else {
            println!("criterion {n}: FAIL (not checked)");
            red.push(n);
            continue;
        };
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n}: {verdict} [{}] cases={} failures={} {}ms",
            c.name, c.cases, c.failures, c.millis
        );
        if !c.pass {
            red.push(n);
            for w in &c.witnesses {
                println!("    witness: {w}");
            }
        }
        for note in &c.notes {
            println!("    note: {note}");
        }
    }
    for c in report.checks.iter().filter(|c| c.criterion.is_none()) {
        println!("{}: {}", c.name, if c.pass { "PASS" } else { "FAIL" });
        if !c.pass {
            red.push(0);
            for w in &c.witnesses {
                println!("    witness: {w}");
            }
        }
    }

    if red.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {red:?}");
        ExitCode::FAILURE
    }
}
