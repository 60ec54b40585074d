//! Focusing: phase decomposition of plays, focused proof search, and the
//! extraction of a focused sub-strategy.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::game::{AsyncGame, Polarity, VarEnv};
use crate::homotopy::{HomotopyClasses, Path};
use crate::proof::{premise_sequents, tensor_sides, Proof, Rule};
use crate::strategy::{deseq, interpret, Strategy, StrategyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FocusError {
    #[error("play is not a play of the strategy")]
    NotInStrategy,
    #[error("play is not maximal in the strategy")]
    NotMaximal,
    #[error("game does not come from a sequent")]
    NoSequent,
    #[error("no phase-alternating play is homotopic to {0}")]
    NoDecomposition(String),
    #[error("no focused proof of |- {0} fits inside the strategy")]
    NotCertified(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Negative,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub moves: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseDecomposition {
    pub phases: Vec<Phase>,
}

impl PhaseDecomposition {
    /// The concatenated play.
    pub fn play(&self, g: &AsyncGame) -> Path {
        Path {
            source: g.initial(),
            edges: self.phases.iter().flat_map(|p| p.moves.iter().copied()).collect(),
        }
    }

    pub fn display<'a>(&'a self, g: &'a AsyncGame) -> DecompositionDisplay<'a> {
        DecompositionDisplay { d: self, g }
    }
}

pub struct DecompositionDisplay<'a> {
    d: &'a PhaseDecomposition,
    g: &'a AsyncGame,
}

impl fmt::Display for DecompositionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ph in &self.d.phases {
            let tag = match ph.kind {
                PhaseKind::Negative => "O",
                PhaseKind::Positive => "P",
            };
            let steps: Vec<String> = ph
                .moves
                .iter()
                .map(|&e| self.g.vertex(self.g.transition(e).dst).pretty())
                .collect();
            write!(f, "[{tag}: {}]", steps.join(" -> "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Mode {
    Negative,
    /// Inside a positive phase on the given root formula.
    Positive(usize),
}

struct Phases<'a> {
    s: &'a Strategy,
    g: &'a AsyncGame,
}

impl Phases<'_> {
    fn has_opponent(&self, v: usize) -> bool {
        self.g.outgoing(v).iter().any(|&e| self.g.polarity(e) == Polarity::Opponent)
    }

    fn root(&self, e: usize) -> usize {
        self.g.move_address(e).map(|a| a.root).unwrap_or(0)
    }

    fn moves(&self, v: usize, pol: Polarity) -> impl Iterator<Item = usize> + '_ {
        self.g
            .outgoing(v)
            .iter()
            .copied()
            .filter(move |&e| self.s.contains_edge(e) && self.g.polarity(e) == pol)
    }

    /// A positive phase on `r` stops at a position with an Opponent move,
    /// at a terminal position, or when the strategy has nothing more to
    /// play on `r`.
    fn positive_ends(&self, v: usize, r: usize) -> bool {
        self.has_opponent(v) || self.g.is_terminal(v) || !self.moves(v, Polarity::Proponent).any(|e| self.root(e) == r)
    }

    /// The moves allowed next, with the mode after them; a mode change
    /// without a move is handled by the caller.
    fn next(&self, v: usize, mode: Mode) -> Vec<(usize, Mode)> {
        match mode {
            Mode::Negative if self.has_opponent(v) => {
                self.moves(v, Polarity::Opponent).map(|e| (e, Mode::Negative)).collect()
            }
            Mode::Negative => self
                .moves(v, Polarity::Proponent)
                .map(|e| (e, Mode::Positive(self.root(e))))
                .collect(),
            Mode::Positive(r) => self
                .moves(v, Polarity::Proponent)
                .filter(|&e| self.root(e) == r)
                .map(|e| (e, Mode::Positive(r)))
                .collect(),
        }
    }

    /// Depth-first search for a phase-alternating play of the strategy in
    /// homotopy class `goal` at `target`.
    fn search(&self, classes: &HomotopyClasses, target: usize, goal: usize) -> Option<Vec<(usize, Mode)>> {
        let mut failed: HashSet<(usize, usize, Mode)> = HashSet::new();
        let mut trail = Vec::new();
        let start = self.g.initial();
        if self.dfs(classes, target, goal, start, 0, Mode::Negative, &mut failed, &mut trail) {
            Some(trail)
        } else {
            None
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        classes: &HomotopyClasses,
        target: usize,
        goal: usize,
        v: usize,
        c: usize,
        mode: Mode,
        failed: &mut HashSet<(usize, usize, Mode)>,
        trail: &mut Vec<(usize, Mode)>,
    ) -> bool {
        if v == target && c == goal {
            return true;
        }
        if failed.contains(&(v, c, mode)) {
            return false;
        }
        let mode = match mode {
            Mode::Positive(r) if self.positive_ends(v, r) => Mode::Negative,
            m => m,
        };
        for (e, m2) in self.next(v, mode) {
            let Some(c2) = classes.extend(self.g, c, e) else {
                continue;
            };
            trail.push((e, m2));
            if self.dfs(classes, target, goal, self.g.transition(e).dst, c2, m2, failed, trail) {
                return true;
            }
            trail.pop();
        }
        failed.insert((v, c, mode));
        false
    }
}

fn into_phases(trail: Vec<(usize, Mode)>) -> PhaseDecomposition {
    let mut phases: Vec<Phase> = Vec::new();
    let mut last: Option<Mode> = None;
    for (e, m) in trail {
        let kind = match m {
            Mode::Negative => PhaseKind::Negative,
            Mode::Positive(_) => PhaseKind::Positive,
        };
        if last == Some(m) {
            phases.last_mut().unwrap().moves.push(e);
        } else if last.is_some() && kind == PhaseKind::Negative && phases.last().unwrap().kind == kind {
            phases.last_mut().unwrap().moves.push(e);
        } else {
            phases.push(Phase { kind, moves: vec![e] });
        }
        last = Some(m);
    }
    PhaseDecomposition { phases }
}

fn strategy_classes(s: &Strategy) -> HomotopyClasses {
    HomotopyClasses::compute(s.game(), &|e| s.contains_edge(e))
}

/// A phase-alternating play homotopic to `play` inside the strategy.
pub fn phase_decompose(s: &Strategy, play: &Path) -> Result<PhaseDecomposition, FocusError> {
    let g = s.game();
    if !play.is_valid(g) || play.source != g.initial() || !play.edges.iter().all(|&e| s.contains_edge(e)) {
        return Err(FocusError::NotInStrategy);
    }
    let y = play.target(g);
    if g.outgoing(y).iter().any(|&e| s.contains_edge(e)) {
        return Err(FocusError::NotMaximal);
    }
    let classes = strategy_classes(s);
    let goal = classes.class_of(g, play).ok_or(FocusError::NotInStrategy)?;
    let ph = Phases { s, g };
    ph.search(&classes, y, goal)
        .map(into_phases)
        .ok_or_else(|| FocusError::NoDecomposition(play.display(g).to_string()))
}

/// One play per homotopy class (inside `s`) of maximal plays of `s`.
pub fn maximal_representatives(s: &Strategy) -> Vec<Path> {
    let g = s.game();
    let classes = strategy_classes(s);
    let mut out = Vec::new();
    for &y in s.vertices() {
        if !g.outgoing(y).iter().any(|&e| s.contains_edge(e)) {
            out.extend(classes.representatives(y).iter().cloned());
        }
    }
    out
}

/// Every maximal play of `s` is homotopic in `s` to a phase-alternating one.
/// On failure, returns a play without decomposition.
pub fn focused_witness(s: &Strategy) -> Option<Path> {
    let g = s.game();
    let classes = strategy_classes(s);
    let ph = Phases { s, g };
    for &y in s.vertices() {
        if g.outgoing(y).iter().any(|&e| s.contains_edge(e)) {
            continue;
        }
        for c in 0..classes.class_count(y) {
            if ph.search(&classes, y, c).is_none() {
                return Some(classes.representatives(y)[c].clone());
            }
        }
    }
    None
}

pub fn check_focused(s: &Strategy) -> bool {
    focused_witness(s).is_none()
}

fn is_negative(f: &Formula) -> bool {
    matches!(f, Formula::Par(..) | Formula::With(..))
}

fn is_positive(f: &Formula) -> bool {
    matches!(f, Formula::Tensor(..) | Formula::Plus(..))
}

/// Focused proof search: the leftmost negative formula is decomposed first;
/// with none left, one positive formula is chosen and decomposed until
/// atoms or negative subformulas appear.
pub struct FocusedSearch {
    provable: HashMap<(Vec<Formula>, Option<usize>), bool>,
    limit: usize,
}

impl FocusedSearch {
    pub fn new(limit: usize) -> Self {
        FocusedSearch {
            provable: HashMap::new(),
            limit,
        }
    }

    /// Rule instances allowed in a state, with premises and their foci.
    fn steps(seq: &[Formula], focus: Option<usize>) -> Vec<(Rule, Vec<(Vec<Formula>, Option<usize>)>)> {
        let n = seq.len();
        let mut out = Vec::new();
        match focus {
            Some(i) if is_positive(&seq[i]) => {
                let rules: Vec<Rule> = match &seq[i] {
                    Formula::Plus(..) => vec![Rule::PlusL(i), Rule::PlusR(i)],
                    _ => {
                        let ctx: Vec<usize> = (0..n).filter(|&k| k != i).collect();
                        (0..1u32 << ctx.len())
                            .map(|mask| {
                                Rule::Tensor(i, ctx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect())
                            })
                            .collect()
                    }
                };
                for r in rules {
                    let prem = premise_sequents(&r, seq, &[]).expect("positive rule applies");
                    let foci: Vec<Option<usize>> = match &r {
                        Rule::Tensor(_, left) => {
                            let (l, rr) = tensor_sides(n, i, left);
                            vec![l.iter().position(|&k| k == i), rr.iter().position(|&k| k == i)]
                        }
                        _ => vec![Some(i)],
                    };
                    out.push((r, prem.into_iter().zip(foci).collect()));
                }
            }
            Some(_) => return FocusedSearch::steps(seq, None),
            None => {
                if let Some(i) = seq.iter().position(is_negative) {
                    let r = if matches!(seq[i], Formula::Par(..)) { Rule::Par(i) } else { Rule::With(i) };
                    let prem = premise_sequents(&r, seq, &[]).expect("negative rule applies");
                    out.push((r, prem.into_iter().map(|p| (p, None)).collect()));
                    return out;
                }
                if n == 2 && seq[0].is_atom() && seq[1] == seq[0].dual() {
                    out.push((Rule::Ax(0, 1), vec![]));
                }
                for (i, f) in seq.iter().enumerate() {
                    if is_positive(f) {
                        out.extend(FocusedSearch::steps(seq, Some(i)));
                    }
                }
            }
        }
        out
    }

    pub fn is_provable(&mut self, seq: &[Formula], focus: Option<usize>) -> bool {
        let key = (seq.to_vec(), focus);
        if let Some(&b) = self.provable.get(&key) {
            return b;
        }
        let ok = FocusedSearch::steps(seq, focus)
            .into_iter()
            .any(|(_, prem)| prem.iter().all(|(s, f)| self.is_provable(s, *f)));
        self.provable.insert(key, ok);
        ok
    }

    pub fn proofs(&mut self, seq: &[Formula], focus: Option<usize>) -> Vec<Proof> {
        let mut out = Vec::new();
        if !self.is_provable(seq, focus) {
            return out;
        }
        for (rule, prem) in FocusedSearch::steps(seq, focus) {
            if !prem.iter().all(|(s, f)| self.is_provable(s, *f)) {
                continue;
            }
            let mut combos: Vec<Vec<Proof>> = vec![vec![]];
            for (s, f) in &prem {
                let subs = self.proofs(s, *f);
                let mut next = Vec::new();
                'outer: for c in &combos {
                    for q in &subs {
                        if next.len() >= self.limit {
                            break 'outer;
                        }
                        let mut c2 = c.clone();
                        c2.push(q.clone());
                        next.push(c2);
                    }
                }
                combos = next;
            }
            for premises in combos {
                out.push(Proof {
                    rule: rule.clone(),
                    premises,
                    conclusion: seq.to_vec(),
                });
                if out.len() >= self.limit {
                    return out;
                }
            }
        }
        out
    }
}

/// Focused proofs of `seq`, at most `limit`; with `within`, only those
/// whose courteous interpretation is included in it.
pub fn focused_proof_search(
    seq: &[Formula],
    env: &VarEnv,
    within: Option<&Strategy>,
    limit: usize,
) -> Result<Vec<Proof>, FocusError> {
    let mut search = FocusedSearch::new(limit);
    let all = search.proofs(seq, None);
    let Some(s) = within else {
        return Ok(all);
    };
    let mut out = Vec::new();
    for q in all {
        let d = deseq(&interpret(&q, env)?);
        if d.is_subset(s) {
            out.push(q);
        }
    }
    Ok(out)
}

/// A focused sub-strategy of `s`: the courteous interpretation of the first
/// focused proof that fits inside `s`, returned with that proof.
pub fn extract_focused(s: &Strategy, env: &VarEnv, limit: usize) -> Result<(Strategy, Proof), FocusError> {
    let seq = s.game().formulas().ok_or(FocusError::NoSequent)?;
    let mut search = FocusedSearch::new(limit);
    for q in search.proofs(&seq, None) {
        let d = deseq(&interpret(&q, env)?);
        if d.is_subset(s) && check_focused(&d) {
            return Ok((d, q));
        }
    }
    Err(FocusError::NotCertified(crate::formula::format_sequent(&seq)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sequent;
    use crate::proof::parse_proof;
    use crate::proof::tests::{LEFT, RIGHT};
    use crate::strategy::plays_of;

    fn interp(text: &str) -> (Strategy, VarEnv) {
        let p = parse_proof(text).unwrap();
        let env = VarEnv::atomic_for(&p.conclusion);
        (deseq(&interpret(&p, &env).unwrap()), env)
    }

    fn maximal(s: &Strategy) -> Vec<Path> {
        let g = s.game();
        plays_of(s)
            .into_iter()
            .filter(|p| !g.outgoing(p.target(g)).iter().any(|&e| s.contains_edge(e)))
            .collect()
    }

    #[test]
    fn copycat_has_an_opponent_then_a_proponent_phase() {
        let (s, _) = interp("ax(0,1) : |- ~X, X");
        let play = maximal(&s).pop().unwrap();
        let d = phase_decompose(&s, &play).unwrap();
        let kinds: Vec<PhaseKind> = d.phases.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, vec![PhaseKind::Negative, PhaseKind::Positive]);
        assert_eq!(d.play(s.game()), play);
    }

    #[test]
    fn tensor_first_plays_are_reorganized() {
        let (s, _) = interp(LEFT);
        let g = s.game().clone();
        for play in maximal(&s) {
            let d = phase_decompose(&s, &play).unwrap();
            assert_eq!(d.phases[0].kind, PhaseKind::Negative);
            // the first move is the par, an Opponent move
            assert_eq!(g.polarity(d.phases[0].moves[0]), Polarity::Opponent);
            let back = d.play(&g);
            assert_eq!(back.target(&g), play.target(&g));
            assert!(crate::homotopy::homotopic(&g, &back, &play).unwrap());
        }
        assert!(check_focused(&s));
    }

    #[test]
    fn one_representative_per_class() {
        let (s, _) = interp(LEFT);
        let reps = maximal_representatives(&s);
        assert_eq!(reps.len(), 1);
        let (c, _) = interp("ax(0,1) : |- ~X, X");
        assert_eq!(maximal_representatives(&c).len(), 1);
    }

    #[test]
    fn decomposition_errors() {
        let (s, _) = interp("ax(0,1) : |- ~X, X");
        let short = Path::empty(s.game().initial());
        assert_eq!(phase_decompose(&s, &short), Err(FocusError::NotMaximal));
        let (t, _) = interp(LEFT);
        let foreign = maximal(&t).pop().unwrap();
        assert!(phase_decompose(&s, &foreign).is_err());
    }

    #[test]
    fn par_then_axiom_is_the_only_focused_proof() {
        let seq = parse_sequent("(~X | X)").unwrap();
        let env = VarEnv::atomic_for(&seq);
        let ps = focused_proof_search(&seq, &env, None, 100).unwrap();
        assert_eq!(ps, vec![parse_proof("par(0, ax(0,1)) : |- (~X | X)").unwrap()]);
    }

    #[test]
    fn negative_rules_come_first() {
        let seq = parse_sequent("(~X | ~Y), ((X * Y) * (~Z | Z))").unwrap();
        let env = VarEnv::atomic_for(&seq);
        let ps = focused_proof_search(&seq, &env, None, 100).unwrap();
        assert!(!ps.is_empty());
        for p in &ps {
            assert_eq!(p.rule, Rule::Par(0));
        }
        assert!(ps.contains(&parse_proof(RIGHT).unwrap()));
        assert!(!ps.contains(&parse_proof(LEFT).unwrap()));
    }

    #[test]
    fn extraction_from_the_left_proof_gives_the_right_one() {
        let (s, env) = interp(LEFT);
        let (f, q) = extract_focused(&s, &env, 100).unwrap();
        assert_eq!(q, parse_proof(RIGHT).unwrap());
        assert!(f.is_subset(&s));
        let (r, _) = interp(RIGHT);
        assert_eq!(f, r);
        // already focused: unchanged
        let (f2, _) = extract_focused(&r, &env, 100).unwrap();
        assert_eq!(f2, r);
    }

    #[test]
    fn sigma_is_one_negative_phase() {
        let seq = parse_sequent("(~X | ~Y)").unwrap();
        let env = VarEnv::atomic_for(&seq);
        let g = std::sync::Arc::new(crate::game::game_of_sequent(&seq, &env).unwrap());
        let path = ["[dag]", "[(dag | dag)]", "[(atom(~X,x) | dag)]", "[(atom(~X,x) | atom(~Y,y))]"];
        let ids: Vec<usize> = path.iter().map(|l| g.vertex_id(&l.parse().unwrap()).unwrap()).collect();
        let s = Strategy::from_edges(g.clone(), ids.windows(2).map(|w| g.edge_id(w[0], w[1]).unwrap()));
        assert!(check_focused(&s));
        let d = phase_decompose(&s, &maximal(&s)[0]).unwrap();
        assert_eq!(d.phases.len(), 1);
    }
}
