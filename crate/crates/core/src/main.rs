use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mallgames::compose::{check_functoriality, compose, search_functoriality_failure};
use mallgames::concurrent::{
    check_retraction, compose_closures, concurrent_of, halting_positions, to_async,
};
use mallgames::corpus::{load_corpus, run_corpus};
use mallgames::export::{
    closure_doc, env_from_json, game_doc, game_dot, strategy_doc, strategy_from_text,
};
use mallgames::focus::{check_focused, extract_focused, focused_proof_search, maximal_representatives, phase_decompose};
use mallgames::formula::{format_sequent, parse_sequent, Formula};
use mallgames::game::{game_of_formula, game_of_sequent, AsyncGame, VarEnv};
use mallgames::homotopy::{check_game_axioms, simple_connectivity_witness};
use mallgames::proof::{parse_proof, permutation_class, permutation_neighbours, permute_rules, precedes, Proof, ProofError};
use mallgames::strategy::{check_properties, deseq, interpret, plays_of, Strategy};

#[derive(Parser)]
#[command(name = "mallgames", version, about = "Asynchronous and concurrent games for MALL proofs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON file binding variables to games ("atomic", "atomic-opponent" or a game)
    #[arg(long, global = true, value_name = "FILE")]
    env: Option<PathBuf>,
    /// Write a JSON export of the result
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Write a DOT rendering of the game or strategy
    #[arg(long, global = true, value_name = "OUT")]
    dot: Option<PathBuf>,
    /// Reserved; every algorithm is deterministic
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the game of a formula or of a comma-separated sequent
    BuildGame { formula: String },
    /// Check a proof file
    CheckProof { file: PathBuf },
    /// List the rule permutations of a proof
    Permute {
        file: PathBuf,
        /// Node path such as 0.1 (premise indices from the root)
        #[arg(long)]
        at: Option<String>,
        /// Print the whole permutation class
        #[arg(long)]
        class: bool,
        /// Decide whether the proof precedes this one
        #[arg(long, value_name = "FILE")]
        precedes: Option<PathBuf>,
    },
    /// Interpret a proof as a strategy
    Interpret {
        file: PathBuf,
        /// Close the result under courtesy
        #[arg(long)]
        deseq: bool,
    },
    /// Check the strategy properties
    Check { strategy: PathBuf },
    /// Close a strategy under courtesy
    Deseq { strategy: PathBuf },
    /// Concurrent strategy of a strategy
    Concurrent { strategy: PathBuf },
    /// Round trip through the concurrent side
    Retraction { strategy: PathBuf },
    /// Compose strategies on |- A*, B and |- B*, C
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        check_functoriality: bool,
    },
    /// Compose the concurrent strategies of two strategies
    ComposeClosures { left: PathBuf, right: PathBuf },
    /// Search for strategies whose composition is not preserved
    SearchBlass {
        #[arg(long, default_value_t = 5)]
        bound: usize,
        #[arg(long, value_name = "OUT")]
        report: Option<PathBuf>,
    },
    /// Phase decomposition and focused sub-strategy
    Focus { strategy: PathBuf },
    /// Focused proofs of a sequent
    FocusedSearch {
        sequent: String,
        #[arg(long, value_name = "STRATEGY")]
        within: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
    /// Run every check over a corpus file
    RunCorpus { path: PathBuf },
}

enum Failure {
    /// Exit status 1: a check failed.
    Check(String),
    /// Exit status 2: bad input.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &FsPath) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &FsPath, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

struct Ctx {
    env: VarEnv,
    json: Option<PathBuf>,
    dot: Option<PathBuf>,
}

impl Ctx {
    fn export_json(&self, value: &impl serde::Serialize) -> Outcome {
        match &self.json {
            Some(p) => write(p, &serde_json::to_string_pretty(value).expect("serializable")),
            None => Ok(()),
        }
    }

    fn export_dot(&self, g: &AsyncGame, s: Option<&Strategy>) -> Outcome {
        match &self.dot {
            Some(p) => write(p, &game_dot(g, s)),
            None => Ok(()),
        }
    }

    fn strategy(&self, path: &FsPath) -> Result<Strategy, Failure> {
        strategy_from_text(&read(path)?, &self.env).map_err(usage)
    }

    fn proof(&self, path: &FsPath) -> Result<Proof, Failure> {
        parse_proof(&read(path)?).map_err(|e| match e {
            ProofError::Parse(_) | ProofError::MissingConclusion | ProofError::InvalidNodePath(_) => usage(e),
            other => Failure::Check(other.to_string()),
        })
    }
}

fn print_strategy(s: &Strategy) {
    let g = s.game();
    println!("{} positions, {} moves", s.vertices().len(), s.edges().len());
    for p in plays_of(s) {
        if !p.is_empty() {
            println!("  {}", p.display(g));
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let env = match &cli.global.env {
        Some(p) => env_from_json(&read(p)?).map_err(usage)?,
        None => VarEnv::new(),
    };
    let ctx = Ctx {
        env,
        json: cli.global.json.clone(),
        dot: cli.global.dot.clone(),
    };
    match cli.command {
        Command::BuildGame { formula } => {
            let fs: Vec<Formula> = parse_sequent(&formula).map_err(usage)?;
            let env = ctx.env.completed_for(&fs);
            let g = if fs.len() == 1 {
                game_of_formula(&fs[0], &env)
            } else {
                game_of_sequent(&fs, &env)
            }
            .map_err(usage)?;
            println!(
                "{} positions, {} transitions, {} tiles",
                g.vertex_count(),
                g.transition_count(),
                g.tiles().len()
            );
            ctx.export_dot(&g, None)?;
            ctx.export_json(&game_doc(&g))?;
            let violations = check_game_axioms(&g);
            if let Some(v) = violations.first() {
                return Err(Failure::Check(format!("{:?}: {}", v.kind, v.witness)));
            }
            if let Some((p, q)) = simple_connectivity_witness(&g) {
                return Err(Failure::Check(format!(
                    "not simply connected: {} and {}",
                    p.display(&g),
                    q.display(&g)
                )));
            }
            println!("game axioms hold");
        }
        Command::CheckProof { file } => {
            let p = ctx.proof(&file)?;
            println!("valid proof of |- {} with {} rules", format_sequent(&p.conclusion), p.rule_count());
        }
        Command::Permute { file, at, class, precedes: other } => {
            let p = ctx.proof(&file)?;
            let results = match &at {
                Some(path) => {
                    let node: Vec<usize> = if path.is_empty() {
                        vec![]
                    } else {
                        path.split('.').map(|x| x.parse().map_err(usage)).collect::<Result<_, _>>()?
                    };
                    permute_rules(&p, &node).map_err(|e| Failure::Check(e.to_string()))?
                }
                None if class => permutation_class(&p),
                None => permutation_neighbours(&p),
            };
            for q in &results {
                println!("{q}");
            }
            if let Some(o) = other {
                let q = ctx.proof(&o)?;
                let b = precedes(&p, &q).map_err(|e| Failure::Check(e.to_string()))?;
                println!("precedes: {}", if b { "yes" } else { "no" });
                if !b {
                    return Err(Failure::Check("the first proof does not precede the second".into()));
                }
            }
        }
        Command::Interpret { file, deseq: close } => {
            let p = ctx.proof(&file)?;
            let env = ctx.env.completed_for(&p.conclusion);
            let s = interpret(&p, &env).map_err(usage)?;
            let s = if close { deseq(&s) } else { s };
            print_strategy(&s);
            ctx.export_dot(s.game(), Some(&s))?;
            ctx.export_json(&strategy_doc(&s))?;
        }
        Command::Check { strategy } => {
            let s = ctx.strategy(&strategy)?;
            let r = check_properties(&s);
            print!("{r}");
            ctx.export_dot(s.game(), Some(&s))?;
            if !r.all_hold() {
                return Err(Failure::Check("some property fails".into()));
            }
        }
        Command::Deseq { strategy } => {
            let s = deseq(&ctx.strategy(&strategy)?);
            print_strategy(&s);
            ctx.export_dot(s.game(), Some(&s))?;
            ctx.export_json(&strategy_doc(&s))?;
        }
        Command::Concurrent { strategy } => {
            let s = ctx.strategy(&strategy)?;
            let report = check_properties(&s);
            let g = s.game();
            let hpos: Vec<String> = halting_positions(&s).iter().map(|&v| g.vertex(v).pretty()).collect();
            println!("halting positions: {{{}}}", hpos.join(", "));
            let c = concurrent_of(&s).map_err(|e| Failure::Check(e.to_string()))?;
            println!("fixpoints: {c}");
            ctx.export_json(&closure_doc(&c))?;
            if !report.ingenuous() {
                return Err(Failure::Check(format!("strategy is not ingenuous:\n{report}")));
            }
        }
        Command::Retraction { strategy } => {
            let s = ctx.strategy(&strategy)?;
            let c = concurrent_of(&s).map_err(|e| Failure::Check(e.to_string()))?;
            println!("fixpoints: {c}");
            let back = to_async(&c, s.game()).map_err(|e| Failure::Check(e.to_string()))?;
            println!("strategy of the fixpoints: {} positions, {} moves", back.vertices().len(), back.edges().len());
            ctx.export_json(&closure_doc(&c))?;
            ctx.export_dot(s.game(), Some(&back))?;
            let ok = check_retraction(&s).map_err(|e| Failure::Check(e.to_string()))?;
            println!("retraction: {}", if ok { "holds" } else { "fails" });
            if !ok {
                let again = concurrent_of(&back).map_err(|e| Failure::Check(e.to_string()))?;
                return Err(Failure::Check(format!("fixpoints after the round trip: {again}")));
            }
        }
        Command::Compose {
            left,
            right,
            check_functoriality: check,
        } => {
            let (s, t) = (ctx.strategy(&left)?, ctx.strategy(&right)?);
            let mut fs = s.game().formulas().unwrap_or_default();
            fs.extend(t.game().formulas().unwrap_or_default());
            let env = ctx.env.completed_for(&fs);
            let st = compose(&s, &t, &env).map_err(usage)?;
            print_strategy(&st);
            ctx.export_dot(st.game(), Some(&st))?;
            ctx.export_json(&strategy_doc(&st))?;
            if check {
                let f = check_functoriality(&s, &t, &env).map_err(|e| Failure::Check(e.to_string()))?;
                println!("{f}");
                if !f.holds {
                    return Err(Failure::Check("composition is not preserved".into()));
                }
            }
        }
        Command::ComposeClosures { left, right } => {
            let (s, t) = (ctx.strategy(&left)?, ctx.strategy(&right)?);
            let mut fs = s.game().formulas().unwrap_or_default();
            fs.extend(t.game().formulas().unwrap_or_default());
            let env = ctx.env.completed_for(&fs);
            let a = concurrent_of(&s).map_err(|e| Failure::Check(e.to_string()))?;
            let b = concurrent_of(&t).map_err(|e| Failure::Check(e.to_string()))?;
            let c = compose_closures(&a, &b, &env).map_err(|e| Failure::Check(e.to_string()))?;
            println!("fixpoints: {c}");
            ctx.export_json(&closure_doc(&c))?;
        }
        Command::SearchBlass { bound, report } => {
            let out = search_functoriality_failure(bound);
            println!(
                "searched {} formula triples and {} strategy pairs{}",
                out.triples,
                out.pairs,
                if out.truncated { " (truncated)" } else { "" }
            );
            let text = match &out.witness {
                Some(w) => format!("{w}"),
                None => format!("no witness up to size {bound}"),
            };
            println!("{text}");
            if let Some(path) = report {
                let doc = serde_json::json!({
                    "bound": bound,
                    "triples": out.triples,
                    "pairs": out.pairs,
                    "truncated": out.truncated,
                    "witness": out.witness.as_ref().map(|w| serde_json::json!({
                        "a": w.a.to_string(),
                        "b": w.b.to_string(),
                        "c": w.c.to_string(),
                        "left": strategy_doc(&w.left),
                        "right": strategy_doc(&w.right),
                        "left_scheduling": w.left_scheduling,
                        "right_scheduling": w.right_scheduling,
                        "direct": w.outcome.direct.fixpoint_names(),
                        "composed": w.outcome.composed.fixpoint_names(),
                    })),
                });
                write(&path, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
            }
            if out.witness.is_none() {
                return Err(Failure::Check("no witness found".into()));
            }
        }
        Command::Focus { strategy } => {
            let s = ctx.strategy(&strategy)?;
            let g = s.game().clone();
            for play in maximal_representatives(&s) {
                match phase_decompose(&s, &play) {
                    Ok(d) => println!("{}", d.display(&g)),
                    Err(e) => println!("{}: {e}", play.display(&g)),
                }
            }
            let focused = check_focused(&s);
            println!("focused: {}", if focused { "yes" } else { "no" });
            let fs = g.formulas().ok_or_else(|| usage("strategy is not on a sequent"))?;
            let env = ctx.env.completed_for(&fs);
            let (f, q) = extract_focused(&s, &env, 10_000).map_err(|e| Failure::Check(e.to_string()))?;
            println!("focused proof: {q}");
            println!("focused sub-strategy: {} positions, {} moves", f.vertices().len(), f.edges().len());
            ctx.export_dot(&g, Some(&f))?;
            ctx.export_json(&strategy_doc(&f))?;
            if !focused {
                return Err(Failure::Check("some maximal play has no phase decomposition".into()));
            }
        }
        Command::FocusedSearch { sequent, within, limit } => {
            let fs = parse_sequent(sequent.trim_start_matches("|-").trim()).map_err(usage)?;
            let env = ctx.env.completed_for(&fs);
            let inside = match &within {
                Some(p) => Some(ctx.strategy(p)?),
                None => None,
            };
            let proofs = focused_proof_search(&fs, &env, inside.as_ref(), limit).map_err(usage)?;
            for p in &proofs {
                println!("{p}");
            }
            println!("{} focused proofs", proofs.len());
            if proofs.is_empty() {
                return Err(Failure::Check("no focused proof".into()));
            }
        }
        Command::RunCorpus { path } => {
            let corpus = load_corpus(&path).map_err(usage)?;
            let report = run_corpus(&corpus).map_err(usage)?;
            for c in &report.checks {
                let tag = c.criterion.map(|n| format!("[{n:>2}] ")).unwrap_or_else(|| "     ".into());
                println!(
                    "{tag}{}: {} ({} cases, {} failures, {} ms)",
                    c.name,
                    if c.pass { "pass" } else { "FAIL" },
                    c.cases,
                    c.failures,
                    c.millis
                );
                for w in &c.witnesses {
                    println!("       witness: {}", w.replace('\n', "\n         "));
                }
            }
            if let Some(p) = &ctx.json {
                write(p, &report.to_json())?;
            }
            if !report.all_pass() {
                return Err(Failure::Check("some corpus checks fail".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
