//! Corpus files and the batch runner that checks every model property over
//! them and produces one structured report.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path as FsPath;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compose::{check_functoriality, compose, search_functoriality_failure};
use crate::concurrent::{
    check_closure_axioms, check_fixpoint_set, check_retraction, closure_of_fixpoints, concurrent_of, halting_positions,
    lattice_of_game, meet_closure,
};
use crate::export::{strategy_from_doc, EnvEntry, StrategyDoc};
use crate::focus::{extract_focused, focused_proof_search};
use crate::formula::{format_sequent, formulas_up_to, literals, parse_formula, Formula};
use crate::game::{game_of_formula, Shape, VarEnv};
use crate::homotopy::{check_game_axioms, is_simply_connected};
use crate::proof::{identity_proof, parse_proof, precedes, Proof, ProofSearch, Rule};
use crate::strategy::{check_properties, deseq, interpret, PropertyReport, Strategy};

/// Annotation keys accepted in `expect` maps.
pub const EXPECTATIONS: [&str; 5] = ["properties", "ingenuous", "scheduling", "retraction", "focus"];

const MAX_WITNESSES: usize = 5;
const FOCUS_LIMIT: usize = 10_000;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid corpus: {0}")]
    Json(#[from] serde_json::Error),
    #[error("corpus entry {name}: {message}")]
    Entry { name: String, message: String },
}

fn entry_error(name: &str, message: impl ToString) -> CorpusError {
    CorpusError::Entry {
        name: name.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default)]
    pub env: BTreeMap<String, EnvEntry>,
    #[serde(default)]
    pub games: Vec<GameEntry>,
    #[serde(default)]
    pub proofs: Vec<ProofEntry>,
    #[serde(default)]
    pub strategies: Vec<StrategyEntry>,
    #[serde(default)]
    pub permutations: Vec<PermutationEntry>,
    #[serde(default)]
    pub generate: Option<Generate>,
    #[serde(default)]
    pub axioms: Option<AxiomSweep>,
    #[serde(default)]
    pub search: Option<SearchEntry>,
}

/// A formula game with expected shape data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameEntry {
    pub name: String,
    pub formula: String,
    pub positions: Option<usize>,
    pub transitions: Option<usize>,
    pub tiles: Option<usize>,
    /// `"O"` or `"P"`: the polarity of every move from the initial position.
    pub root_polarity: Option<String>,
    /// A position into which exactly two transitions arrive, forming a tile.
    pub tiled_into: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofEntry {
    pub name: String,
    pub proof: String,
    #[serde(default)]
    pub expect: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub name: String,
    #[serde(flatten)]
    pub doc: StrategyDoc,
    /// Expected halting positions, as printed.
    #[serde(default)]
    pub hpos: Option<Vec<String>>,
    #[serde(default)]
    pub expect: BTreeMap<String, bool>,
}

/// Two named proofs whose courteous interpretations should coincide, the
/// first preceding the second.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationEntry {
    pub left: String,
    pub right: String,
}

/// Every proof of every provable one-formula sequent up to a depth, plus
/// the two-formula premises of their root par rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generate {
    pub atoms: Vec<String>,
    pub depth: usize,
    #[serde(default = "default_proofs_per_sequent")]
    pub proofs_per_sequent: usize,
    /// Besides the triples of strategies of total size at most 4, one
    /// triple in `triple_stride` is checked for associativity.
    #[serde(default = "default_stride")]
    pub triple_stride: usize,
}

fn default_proofs_per_sequent() -> usize {
    1000
}

fn default_stride() -> usize {
    1
}

/// Game axioms over all formulas up to `depth`, plus `sample` formulas one
/// level deeper.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomSweep {
    pub atoms: Vec<String>,
    pub depth: usize,
    #[serde(default)]
    pub sample: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchEntry {
    pub bound: usize,
}

pub fn load_corpus(path: &FsPath) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckResult {
    pub criterion: Option<u32>,
    pub name: String,
    pub pass: bool,
    pub cases: usize,
    pub failures: usize,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
    pub millis: u128,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, criterion: u32) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.criterion == Some(criterion))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Tally {
    criterion: Option<u32>,
    name: &'static str,
    start: Instant,
    cases: usize,
    failures: usize,
    witnesses: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new(criterion: Option<u32>, name: &'static str) -> Tally {
        Tally {
            criterion,
            name,
            start: Instant::now(),
            cases: 0,
            failures: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            criterion: self.criterion,
            name: self.name.to_string(),
            pass: self.failures == 0,
            cases: self.cases,
            failures: self.failures,
            witnesses: self.witnesses,
            notes: self.notes,
            millis: self.start.elapsed().as_millis(),
        }
    }
}

/// A strategy under test, with what it came from.
struct Case {
    name: String,
    proof: Option<Proof>,
    strategy: Strategy,
    report: PropertyReport,
    expect: BTreeMap<String, bool>,
}

impl Case {
    fn two_formulas(&self) -> Option<(Formula, Formula)> {
        match self.strategy.game().shape() {
            Shape::Sequent(fs) if fs.len() == 2 => Some((fs[0].clone(), fs[1].clone())),
            _ => None,
        }
    }

    fn size(&self) -> usize {
        match self.strategy.game().shape() {
            Shape::Sequent(fs) => fs.iter().map(Formula::size).sum(),
            _ => usize::MAX,
        }
    }
}

struct Prepared {
    env: VarEnv,
    cases: Vec<Case>,
    proofs: BTreeMap<String, Proof>,
    /// Time spent computing property reports while preparing.
    property_millis: u128,
}

fn generated_proofs(g: &Generate) -> Vec<Proof> {
    let names: Vec<&str> = g.atoms.iter().map(String::as_str).collect();
    let mut search = ProofSearch::new();
    let mut out = Vec::new();
    for f in formulas_up_to(g.depth, &literals(&names)) {
        out.extend(search.proofs(&[f], g.proofs_per_sequent));
    }
    out
}

/// Root par premises of one-formula proofs, without repetition.
fn derived_premises(ps: &[Proof]) -> Vec<Proof> {
    let mut seen = BTreeSet::new();
    ps.iter()
        .filter(|p| p.conclusion.len() == 1 && p.rule == Rule::Par(0))
        .map(|p| p.premises[0].clone())
        .filter(|q| seen.insert(q.clone()))
        .collect()
}

fn all_formulas(corpus: &Corpus, extra: &[Proof]) -> Result<Vec<Formula>, CorpusError> {
    let mut fs = Vec::new();
    for g in &corpus.games {
        fs.push(parse_formula(&g.formula).map_err(|e| entry_error(&g.name, e))?);
    }
    for p in &corpus.proofs {
        fs.extend(parse_proof(&p.proof).map_err(|e| entry_error(&p.name, e))?.conclusion);
    }
    for p in extra {
        fs.extend(p.conclusion.iter().cloned());
    }
    Ok(fs)
}

fn prepare(corpus: &Corpus) -> Result<Prepared, CorpusError> {
    let mut names = BTreeSet::new();
    for n in corpus
        .games
        .iter()
        .map(|g| &g.name)
        .chain(corpus.proofs.iter().map(|p| &p.name))
        .chain(corpus.strategies.iter().map(|s| &s.name))
    {
        if !names.insert(n.clone()) {
            return Err(entry_error(n, "duplicate name"));
        }
    }
    for (name, expect) in corpus
        .proofs
        .iter()
        .map(|p| (&p.name, &p.expect))
        .chain(corpus.strategies.iter().map(|s| (&s.name, &s.expect)))
    {
        if let Some(k) = expect.keys().find(|k| !EXPECTATIONS.contains(&k.as_str())) {
            return Err(entry_error(name, format!("unknown check {k:?} in expectations")));
        }
    }

    let env_text = serde_json::to_string(&corpus.env)?;
    let base_env = crate::export::env_from_json(&env_text).map_err(|e| entry_error("env", e))?;
    let generated = corpus.generate.as_ref().map(generated_proofs).unwrap_or_default();
    let derived = derived_premises(&generated);
    let mut extra = generated.clone();
    extra.extend(derived.iter().cloned());
    let env = base_env.completed_for(&all_formulas(corpus, &extra)?);

    let mut cases = Vec::new();
    let mut proofs = BTreeMap::new();
    let mut property_time = Duration::ZERO;
    let mut push = |name: String, proof: Option<Proof>, strategy: Strategy, expect: BTreeMap<String, bool>| {
        let start = Instant::now();
        let report = check_properties(&strategy);
        property_time += start.elapsed();
        cases.push(Case {
            name,
            proof,
            strategy,
            report,
            expect,
        });
    };
    for entry in &corpus.proofs {
        let p = parse_proof(&entry.proof).map_err(|e| entry_error(&entry.name, e))?;
        let s = interpret(&p, &env).map_err(|e| entry_error(&entry.name, e))?;
        proofs.insert(entry.name.clone(), p.clone());
        push(entry.name.clone(), Some(p), deseq(&s), entry.expect.clone());
    }
    for entry in &corpus.strategies {
        let s = strategy_from_doc(&entry.doc, &env).map_err(|e| entry_error(&entry.name, e))?;
        let p = match &entry.doc.proof {
            Some(text) => Some(parse_proof(text).map_err(|e| entry_error(&entry.name, e))?),
            None => None,
        };
        push(entry.name.clone(), p, s, entry.expect.clone());
    }
    for p in extra {
        let s = interpret(&p, &env).map_err(|e| entry_error(&p.to_string(), e))?;
        push(format!("generated {p}"), Some(p), deseq(&s), BTreeMap::new());
    }
    for perm in &corpus.permutations {
        for n in [&perm.left, &perm.right] {
            if !proofs.contains_key(n) {
                return Err(entry_error(n, "permutation refers to an unknown proof"));
            }
        }
    }
    Ok(Prepared {
        env,
        cases,
        proofs,
        property_millis: property_time.as_millis(),
    })
}

fn check_games(corpus: &Corpus, env: &VarEnv) -> Result<CheckResult, CorpusError> {
    let mut t = Tally::new(Some(1), "game shapes");
    for entry in &corpus.games {
        let f = parse_formula(&entry.formula).map_err(|e| entry_error(&entry.name, e))?;
        let g = game_of_formula(&f, env).map_err(|e| entry_error(&entry.name, e))?;
        let mut problems = Vec::new();
        let mut expect = |what: &str, want: Option<usize>, got: usize| {
            if let Some(w) = want {
                if w != got {
                    problems.push(format!("{what}: expected {w}, found {got}"));
                }
            }
        };
        expect("positions", entry.positions, g.vertex_count());
        expect("transitions", entry.transitions, g.transition_count());
        expect("tiles", entry.tiles, g.tiles().len());
        if let Some(pol) = &entry.root_polarity {
            let bad = g.outgoing(g.initial()).iter().any(|&e| g.polarity(e).letter() != pol);
            if bad {
                problems.push(format!("some initial move is not {pol}"));
            }
        }
        if let Some(target) = &entry.tiled_into {
            match g.vertex_id_by_name(target).or_else(|| (0..g.vertex_count()).find(|&v| g.vertex(v).pretty() == *target)) {
                None => problems.push(format!("no position {target}")),
                Some(v) => {
                    let inc = g.incoming(v);
                    let tiled = inc.len() == 2
                        && g.tiles().iter().any(|tile| {
                            let ends = [tile.first.1, tile.second.1];
                            ends.contains(&inc[0]) && ends.contains(&inc[1])
                        });
                    if !tiled {
                        problems.push(format!("the moves into {target} are not two tiled transitions"));
                    }
                }
            }
        }
        t.case(problems.is_empty(), || format!("{}: {}", entry.name, problems.join("; ")));
    }
    Ok(t.finish())
}

fn check_axiom_sweep(sweep: &AxiomSweep) -> CheckResult {
    let mut t = Tally::new(Some(2), "game axioms");
    let names: Vec<&str> = sweep.atoms.iter().map(String::as_str).collect();
    let mut fs = formulas_up_to(sweep.depth, &literals(&names));
    if sweep.sample > 0 && !fs.is_empty() {
        // deterministic pairs of full-depth formulas, one level deeper
        let deep: Vec<Formula> = fs.iter().filter(|f| f.depth() == sweep.depth).cloned().collect();
        let n = deep.len();
        let ctors = [Formula::par, Formula::tensor, Formula::with, Formula::plus];
        for k in 0..sweep.sample {
            let (a, b) = (&deep[(k * 7919) % n], &deep[(k * 104_729 + 13) % n]);
            fs.push(ctors[k % 4](a.clone(), b.clone()));
        }
        t.notes.push(format!("{} formulas one level deeper sampled", sweep.sample));
    }
    let env = VarEnv::atomic(names.iter().copied());
    for f in &fs {
        let g = game_of_formula(f, &env).expect("atomic environment binds every atom");
        let violations = check_game_axioms(&g);
        let ok = violations.is_empty() && is_simply_connected(&g);
        t.case(ok, || match violations.first() {
            Some(v) => format!("{f}: {:?} at {}", v.kind, v.witness),
            None => format!("{f}: not simply connected"),
        });
    }
    t.finish()
}

fn check_definability(prep: &Prepared) -> CheckResult {
    let mut t = Tally::new(Some(3), "definability properties");
    for c in prep.cases.iter().filter(|c| c.proof.is_some()) {
        t.case(c.report.all_hold(), || format!("{}:\n{}", c.name, c.report));
    }
    let mut r = t.finish();
    r.millis += prep.property_millis;
    r
}

fn check_permutations(corpus: &Corpus, prep: &Prepared) -> Result<CheckResult, CorpusError> {
    let mut t = Tally::new(Some(4), "permutation example");
    for perm in &corpus.permutations {
        let (p, q) = (&prep.proofs[&perm.left], &prep.proofs[&perm.right]);
        let sp = deseq(&interpret(p, &prep.env).map_err(|e| entry_error(&perm.left, e))?);
        let sq = deseq(&interpret(q, &prep.env).map_err(|e| entry_error(&perm.right, e))?);
        let before = precedes(p, q).map_err(|e| entry_error(&perm.left, e))?;
        let equal = sp == sq;
        t.case(equal && before, || {
            let relation = if equal {
                "equal"
            } else if sq.is_subset(&sp) {
                "right strictly inside left"
            } else if sp.is_subset(&sq) {
                "left strictly inside right"
            } else {
                "incomparable"
            };
            format!(
                "{} vs {}: courteous strategies {relation} ({} and {} moves); precedes = {before}",
                perm.left,
                perm.right,
                sp.edges().len(),
                sq.edges().len()
            )
        });
    }
    Ok(t.finish())
}

fn check_hpos(corpus: &Corpus, cases: &[Case]) -> CheckResult {
    let mut t = Tally::new(Some(5), "halting positions");
    for entry in &corpus.strategies {
        let Some(want) = &entry.hpos else { continue };
        let c = cases.iter().find(|c| c.name == entry.name).expect("prepared");
        let g = c.strategy.game();
        let got: BTreeSet<String> = halting_positions(&c.strategy).iter().map(|&v| g.vertex(v).pretty()).collect();
        let want: BTreeSet<String> = want.iter().cloned().collect();
        t.case(got == want, || format!("{}: expected {want:?}, found {got:?}", entry.name));
    }
    t.finish()
}

fn check_closures(cases: &[Case]) -> CheckResult {
    let mut t = Tally::new(Some(6), "closure algebra");
    let mut not_meet_closed = 0;
    for c in cases.iter().filter(|c| c.report.ingenuous()) {
        let outcome = (|| -> Result<Option<String>, String> {
            let l = Arc::new(lattice_of_game(c.strategy.game()).map_err(|e| e.to_string())?);
            let hpos = halting_positions(&c.strategy);
            let fix = meet_closure(&l, hpos.iter().copied());
            if fix.len() != hpos.len() + usize::from(!hpos.contains(&l.top())) {
                not_meet_closed += 1;
            }
            if let Err(e) = check_fixpoint_set(&l, &fix) {
                return Ok(Some(e.to_string()));
            }
            let op = closure_of_fixpoints(l.clone(), fix.iter().copied()).map_err(|e| e.to_string())?;
            let report = check_closure_axioms(&l, &op.table());
            if !report.holds() {
                return Ok(Some(report.to_string()));
            }
            let back: BTreeSet<usize> = (0..l.len()).filter(|&x| op.apply(x) == x).collect();
            if back != fix {
                return Ok(Some("fixpoints do not round-trip".into()));
            }
            Ok(None)
        })();
        match outcome {
            Ok(None) => t.case(true, String::new),
            Ok(Some(w)) | Err(w) => t.case(false, || format!("{}: {w}", c.name)),
        }
    }
    t.notes.push(format!(
        "{not_meet_closed} strategies have halting positions not closed under meets; their meet closure is used"
    ));
    t.finish()
}

fn check_retractions(cases: &[Case]) -> CheckResult {
    let mut t = Tally::new(Some(7), "retraction");
    for c in cases.iter().filter(|c| c.report.ingenuous()) {
        let outcome = check_retraction(&c.strategy);
        t.case(matches!(outcome, Ok(true)), || match outcome {
            Ok(_) => {
                let before = concurrent_of(&c.strategy).map(|x| x.to_string()).unwrap_or_default();
                format!("{}: fixpoints {before} change after the round trip", c.name)
            }
            Err(e) => format!("{}: {e}", c.name),
        });
    }
    t.finish()
}

/// Ordered pairs `(i, j)` of two-formula cases with `j` composable after `i`.
fn composable_pairs(cases: &[Case], only: impl Fn(&Case) -> bool) -> Vec<(usize, usize)> {
    let mut by_first: HashMap<Formula, Vec<usize>> = HashMap::new();
    for (k, c) in cases.iter().enumerate() {
        if let Some((a, _)) = c.two_formulas() {
            if only(c) {
                by_first.entry(a).or_default().push(k);
            }
        }
    }
    let mut out = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let Some((_, b)) = c.two_formulas() else { continue };
        if !only(c) {
            continue;
        }
        if let Some(js) = by_first.get(&b.dual()) {
            out.extend(js.iter().map(|&j| (i, j)));
        }
    }
    out
}

fn check_functoriality_pairs(prep: &Prepared) -> CheckResult {
    let mut t = Tally::new(Some(8), "functoriality");
    let cases = &prep.cases;
    let mut unscheduled = 0;
    for (i, j) in composable_pairs(cases, |c| c.report.ingenuous()) {
        let (s, u) = (&cases[i], &cases[j]);
        if s.report.scheduling.is_some() || u.report.scheduling.is_some() {
            unscheduled += 1;
        }
        let outcome = check_functoriality(&s.strategy, &u.strategy, &prep.env);
        t.case(matches!(&outcome, Ok(f) if f.holds), || {
            let sched = |c: &Case| match &c.report.scheduling {
                None => "scheduling holds".to_string(),
                Some(w) => format!("scheduling fails: {w}"),
            };
            let detail = match &outcome {
                Ok(f) => f.to_string(),
                Err(e) => e.to_string(),
            };
            format!("{} ({}) then {} ({}):\n{detail}", s.name, sched(s), u.name, sched(u))
        });
    }
    t.notes.push(format!("{unscheduled} pairs involve a strategy violating the scheduling criterion"));
    t.finish()
}

fn check_search(search: &SearchEntry) -> CheckResult {
    let mut t = Tally::new(Some(9), "functoriality failure search");
    let out = search_functoriality_failure(search.bound);
    t.notes.push(format!(
        "{} formula triples, {} strategy pairs{}",
        out.triples,
        out.pairs,
        if out.truncated { ", strategy enumeration truncated" } else { "" }
    ));
    match &out.witness {
        None => t.case(false, || format!("no witness up to size {}", search.bound)),
        Some(w) => {
            let scheduled = w.left_scheduling.is_some() || w.right_scheduling.is_some();
            t.case(scheduled, || format!("witness without a scheduling violation:\n{w}"));
            t.notes.push(format!("witness:\n{w}"));
        }
    }
    t.finish()
}

fn check_composition(prep: &Prepared, stride: usize) -> Result<CheckResult, CorpusError> {
    let mut t = Tally::new(Some(10), "composition laws");
    let cases = &prep.cases;
    let env = &prep.env;
    let mut identities: HashMap<Formula, Strategy> = HashMap::new();
    let mut identity = |a: &Formula| -> Result<Strategy, CorpusError> {
        if let Some(s) = identities.get(a) {
            return Ok(s.clone());
        }
        let s = deseq(&interpret(&identity_proof(a), env).map_err(|e| entry_error(&a.to_string(), e))?);
        identities.insert(a.clone(), s.clone());
        Ok(s)
    };
    for c in cases.iter().filter(|c| c.proof.is_some()) {
        let Some((a, b)) = c.two_formulas() else { continue };
        let left = compose(&identity(&a.dual())?, &c.strategy, env);
        let right = compose(&c.strategy, &identity(&b)?, env);
        let ok = matches!((&left, &right), (Ok(l), Ok(r)) if *l == c.strategy && *r == c.strategy);
        t.case(ok, || format!("{}: copy-cat is not an identity on it", c.name));
    }
    let pairs = composable_pairs(cases, |c| c.proof.is_some());
    let mut after: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(i, j) in &pairs {
        after.entry(i).or_default().push(j);
    }
    let mut memo: HashMap<(usize, usize), Strategy> = HashMap::new();
    let mut composite = |i: usize, j: usize| -> Strategy {
        memo.entry((i, j))
            .or_insert_with(|| compose(&cases[i].strategy, &cases[j].strategy, env).expect("composable"))
            .clone()
    };
    let mut index = 0usize;
    let mut triples = 0usize;
    for &(i, j) in &pairs {
        for &k in after.get(&j).map(Vec::as_slice).unwrap_or(&[]) {
            let small = [i, j, k].iter().all(|&x| cases[x].size() <= 4);
            index += 1;
            if !small && index % stride.max(1) != 0 {
                continue;
            }
            triples += 1;
            let lhs = compose(&composite(i, j), &cases[k].strategy, env);
            let rhs = compose(&cases[i].strategy, &composite(j, k), env);
            let ok = matches!((&lhs, &rhs), (Ok(l), Ok(r)) if l == r);
            t.case(ok, || format!("({} ; {}) ; {} differs from {} ; ({} ; {})", cases[i].name, cases[j].name, cases[k].name, cases[i].name, cases[j].name, cases[k].name));
        }
    }
    t.notes.push(format!("{triples} of {index} composable triples checked for associativity"));
    Ok(t.finish())
}

fn check_focusing(prep: &Prepared) -> Result<CheckResult, CorpusError> {
    let mut t = Tally::new(Some(11), "focusing");
    for c in prep.cases.iter().filter(|c| c.proof.is_some()) {
        let seq = &c.proof.as_ref().expect("filtered").conclusion;
        let found = focused_proof_search(seq, &prep.env, Some(&c.strategy), FOCUS_LIMIT)
            .map(|v| !v.is_empty())
            .unwrap_or(false);
        let extracted = extract_focused(&c.strategy, &prep.env, FOCUS_LIMIT);
        let ok = found && matches!(&extracted, Ok((f, _)) if f.is_subset(&c.strategy));
        t.case(ok, || match &extracted {
            Err(e) => format!("{}: {e}", c.name),
            Ok(_) => format!("{}: no focused proof of |- {} inside it", c.name, format_sequent(seq)),
        });
    }
    Ok(t.finish())
}

fn check_expectations(prep: &Prepared) -> CheckResult {
    let mut t = Tally::new(None, "annotations");
    for c in prep.cases.iter().filter(|c| !c.expect.is_empty()) {
        for (key, &want) in &c.expect {
            let got = match key.as_str() {
                "properties" => c.report.all_hold(),
                "ingenuous" => c.report.ingenuous(),
                "scheduling" => c.report.scheduling.is_none(),
                "retraction" => matches!(check_retraction(&c.strategy), Ok(true)),
                "focus" => extract_focused(&c.strategy, &prep.env, FOCUS_LIMIT).is_ok(),
                _ => unreachable!("validated"),
            };
            t.case(got == want, || format!("{}: {key} expected {want}, found {got}", c.name));
        }
    }
    t.finish()
}

/// Runs every check that has cases in the corpus, in a fixed order.
pub fn run_corpus(corpus: &Corpus) -> Result<Report, CorpusError> {
    let prep = prepare(corpus)?;
    let mut checks = Vec::new();
    let has_proofs = prep.cases.iter().any(|c| c.proof.is_some());
    if !corpus.games.is_empty() {
        checks.push(check_games(corpus, &prep.env)?);
    }
    if let Some(sweep) = &corpus.axioms {
        checks.push(check_axiom_sweep(sweep));
    }
    if has_proofs {
        checks.push(check_definability(&prep));
    }
    if !corpus.permutations.is_empty() {
        checks.push(check_permutations(corpus, &prep)?);
    }
    if corpus.strategies.iter().any(|s| s.hpos.is_some()) {
        checks.push(check_hpos(corpus, &prep.cases));
    }
    if !prep.cases.is_empty() {
        checks.push(check_closures(&prep.cases));
        checks.push(check_retractions(&prep.cases));
        checks.push(check_functoriality_pairs(&prep));
    }
    if let Some(search) = &corpus.search {
        checks.push(check_search(search));
    }
    if has_proofs {
        let stride = corpus.generate.as_ref().map(|g| g.triple_stride).unwrap_or(1);
        checks.push(check_composition(&prep, stride)?);
        checks.push(check_focusing(&prep)?);
    }
    if prep.cases.iter().any(|c| !c.expect.is_empty()) {
        checks.push(check_expectations(&prep));
    }
    Ok(Report { checks })
}
