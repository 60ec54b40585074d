//! Composition of strategies by parallel composition and hiding, and the
//! comparison with composition of closure operators.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::concurrent::{compose_closures, concurrent_of, to_concurrent, ClosureStrategy, ConcurrentError};
use crate::formula::{Formula, Position};
use crate::game::{game_of_sequent, AsyncGame, GameError, Polarity, Shape, VarEnv, Vertex};
use crate::strategy::{check_properties, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("middle games do not match: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Concurrent(#[from] ConcurrentError),
}

/// Which components an interaction step moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// A move of `A*`, a transition of the left strategy.
    Left(usize),
    /// A move of the shared `B`, one transition in each strategy.
    Middle(usize, usize),
    /// A move of `C`, a transition of the right strategy.
    Right(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionEdge {
    pub from: usize,
    pub to: usize,
    pub step: Step,
}

/// Joint positions of two strategies that agree on the middle game, and
/// the steps between them; interactions are the paths from state 0.
#[derive(Debug, Clone)]
pub struct InteractionGraph {
    pub states: Vec<(usize, usize)>,
    pub edges: Vec<InteractionEdge>,
    outgoing: Vec<Vec<usize>>,
}

impl InteractionGraph {
    pub fn outgoing(&self, state: usize) -> &[usize] {
        &self.outgoing[state]
    }

    /// Every interaction, as a list of edge indices.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((at, path)) = stack.pop() {
            for &e in self.outgoing[at].iter().rev() {
                let mut p = path.clone();
                p.push(e);
                stack.push((self.edges[e].to, p));
            }
            out.push(path);
        }
        out.sort();
        out
    }
}

fn pair(g: &AsyncGame, v: usize) -> (Position, Position) {
    let cs = g.vertex(v).components().expect("sequent vertex");
    (
        cs[0].as_position().expect("position").clone(),
        cs[1].as_position().expect("position").clone(),
    )
}

fn two(g: &AsyncGame) -> Result<(Formula, Formula), ComposeError> {
    match g.shape() {
        Shape::Sequent(fs) if fs.len() == 2 => Ok((fs[0].clone(), fs[1].clone())),
        _ => Err(ComposeError::Mismatch("strategies must live on two-formula sequents".into())),
    }
}

/// The formulas `A*`, `B`, `C` of composable strategies on `⊢ A*, B` and
/// `⊢ B*, C`.
pub fn composable(s: &Strategy, t: &Strategy) -> Result<(Formula, Formula, Formula), ComposeError> {
    let (a, b) = two(s.game())?;
    let (b2, c) = two(t.game())?;
    if b2 != b.dual() {
        return Err(ComposeError::Mismatch(format!("{b} against {b2}")));
    }
    Ok((a, b, c))
}

pub fn interactions(s: &Strategy, t: &Strategy) -> Result<InteractionGraph, ComposeError> {
    composable(s, t)?;
    let (gs, gt) = (s.game(), t.game());
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = vec![(gs.initial(), gt.initial())];
    index.insert(states[0], 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (vs, vt) = states[k];
        let (_, pb) = pair(gs, vs);
        let mut next: Vec<((usize, usize), Step)> = Vec::new();
        for &e in gs.outgoing(vs) {
            if !s.contains_edge(e) {
                continue;
            }
            let ws = gs.transition(e).dst;
            let (_, pb2) = pair(gs, ws);
            if pb2 == pb {
                next.push(((ws, vt), Step::Left(e)));
                continue;
            }
            let want = pb2.dual();
            for &f in gt.outgoing(vt) {
                if !t.contains_edge(f) {
                    continue;
                }
                let wt = gt.transition(f).dst;
                let (qb, qc) = pair(gt, wt);
                let (_, qc0) = pair(gt, vt);
                if qb == want && qc == qc0 {
                    next.push(((ws, wt), Step::Middle(e, f)));
                }
            }
        }
        for &f in gt.outgoing(vt) {
            if !t.contains_edge(f) {
                continue;
            }
            let wt = gt.transition(f).dst;
            if pair(gt, wt).0 == pair(gt, vt).0 {
                next.push(((vs, wt), Step::Right(f)));
            }
        }
        for (st, step) in next {
            let to = *index.entry(st).or_insert_with(|| {
                states.push(st);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            edges.push(InteractionEdge { from: k, to, step });
        }
    }
    let mut outgoing = vec![Vec::new(); states.len()];
    for (i, e) in edges.iter().enumerate() {
        outgoing[e.from].push(i);
    }
    Ok(InteractionGraph { states, edges, outgoing })
}

fn outer_vertex(gs: &AsyncGame, gt: &AsyncGame, gc: &AsyncGame, st: (usize, usize)) -> usize {
    let (pa, _) = pair(gs, st.0);
    let (_, pc) = pair(gt, st.1);
    gc.vertex_id(&Vertex::Tuple(vec![Vertex::Pos(pa), Vertex::Pos(pc)]))
        .expect("outer positions form a vertex")
}

/// `t ∘ s` on `⊢ A*, C`: interactions with their middle moves hidden.
pub fn compose(s: &Strategy, t: &Strategy, env: &VarEnv) -> Result<Strategy, ComposeError> {
    let (a, _, c) = composable(s, t)?;
    let graph = interactions(s, t)?;
    let gc = Arc::new(game_of_sequent(&[a, c], env)?);
    let (gs, gt) = (s.game(), t.game());
    let outer: Vec<usize> = graph.states.iter().map(|&st| outer_vertex(gs, gt, &gc, st)).collect();
    let mut edges = BTreeSet::new();
    for e in &graph.edges {
        if !matches!(e.step, Step::Middle(..)) {
            let id = gc.edge_id(outer[e.from], outer[e.to]).expect("outer step is a game transition");
            edges.insert(id);
        }
    }
    Ok(Strategy::from_edges(gc, edges))
}

/// Two interaction states with the same outer position must be joined by
/// hidden steps to a common later state. Returns a witness otherwise.
pub fn check_confluence(s: &Strategy, t: &Strategy) -> Result<Option<String>, ComposeError> {
    let graph = interactions(s, t)?;
    let n = graph.states.len();
    let hidden_reach: Vec<BTreeSet<usize>> = (0..n)
        .map(|k| {
            let mut seen = BTreeSet::from([k]);
            let mut stack = vec![k];
            while let Some(x) = stack.pop() {
                for &e in graph.outgoing(x) {
                    let ed = graph.edges[e];
                    if matches!(ed.step, Step::Middle(..)) && seen.insert(ed.to) {
                        stack.push(ed.to);
                    }
                }
            }
            seen
        })
        .collect();
    let outer = |st: (usize, usize)| (pair(s.game(), st.0).0, pair(t.game(), st.1).1);
    let mut by_outer: BTreeMap<(Position, Position), Vec<usize>> = BTreeMap::new();
    for (k, &st) in graph.states.iter().enumerate() {
        by_outer.entry(outer(st)).or_default().push(k);
    }
    for ks in by_outer.values() {
        for &u in ks {
            for &v in ks {
                if u < v && hidden_reach[u].is_disjoint(&hidden_reach[v]) {
                    return Ok(Some(format!(
                        "interaction states {} and {} share outer position but never meet",
                        show_state(s, t, graph.states[u]),
                        show_state(s, t, graph.states[v])
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn show_state(s: &Strategy, t: &Strategy, st: (usize, usize)) -> String {
    format!("[{} | {}]", s.game().vertex(st.0).pretty(), t.game().vertex(st.1).pretty())
}

/// Both sides of the functoriality square.
#[derive(Debug, Clone)]
pub struct Functoriality {
    pub holds: bool,
    /// Concurrent strategy of the composite.
    pub direct: ClosureStrategy,
    /// Composite of the concurrent strategies.
    pub composed: ClosureStrategy,
}

impl fmt::Display for Functoriality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "functorial: {}", if self.holds { "yes" } else { "no" })?;
        writeln!(f, "cl(hpos(t o s)) fixpoints: {}", self.direct)?;
        write!(f, "cl(hpos t) o cl(hpos s) fixpoints: {}", self.composed)
    }
}

pub fn check_functoriality(s: &Strategy, t: &Strategy, env: &VarEnv) -> Result<Functoriality, ComposeError> {
    let cs = to_concurrent(s)?;
    let ct = to_concurrent(t)?;
    let st = compose(s, t, env)?;
    let direct = concurrent_of(&st)?;
    let composed = compose_closures(&cs, &ct, env)?;
    Ok(Functoriality {
        holds: direct == composed,
        direct,
        composed,
    })
}

/// Every ingenuous strategy on `g`, smallest first. Gives up (returning
/// what it has) after `budget` candidate subgraphs.
pub fn ingenuous_strategies(g: &Arc<AsyncGame>, budget: usize) -> Vec<Strategy> {
    let order = g.topological_order();
    let mut rank = vec![0; g.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut found = Vec::new();
    let mut tried = 0usize;
    // pending vertices keyed by topological rank
    fn go(
        g: &Arc<AsyncGame>,
        rank: &[usize],
        pending: BTreeSet<(usize, usize)>,
        edges: BTreeSet<usize>,
        found: &mut Vec<Strategy>,
        tried: &mut usize,
        budget: usize,
    ) {
        if *tried >= budget {
            return;
        }
        let mut pending = pending;
        let Some((_, v)) = pending.pop_first() else {
            *tried += 1;
            let s = Strategy::from_edges(g.clone(), edges);
            if check_properties(&s).ingenuous() {
                found.push(s);
            }
            return;
        };
        let out = g.outgoing(v);
        let opp: Vec<usize> = out.iter().copied().filter(|&e| g.polarity(e) == Polarity::Opponent).collect();
        let prop: Vec<usize> = out.iter().copied().filter(|&e| g.polarity(e) == Polarity::Proponent).collect();
        for mask in 0u32..(1 << prop.len()) {
            let chosen: Vec<usize> = (0..prop.len()).filter(|b| mask >> b & 1 == 1).map(|b| prop[b]).collect();
            // totality
            if chosen.is_empty() && opp.is_empty() && !prop.is_empty() {
                continue;
            }
            // determinism between chosen Proponent moves
            if chosen
                .iter()
                .any(|&m| chosen.iter().any(|&n| m != n && g.residual(m, n).is_none()))
            {
                continue;
            }
            let mut e2 = edges.clone();
            let mut p2 = pending.clone();
            for &e in opp.iter().chain(&chosen) {
                e2.insert(e);
                let w = g.transition(e).dst;
                p2.insert((rank[w], w));
            }
            go(g, rank, p2, e2, found, tried, budget);
        }
    }
    go(
        g,
        &rank,
        BTreeSet::from([(rank[g.initial()], g.initial())]),
        BTreeSet::new(),
        &mut found,
        &mut tried,
        budget,
    );
    found.sort_by_key(|s| (s.edges().len(), s.edges().iter().copied().collect::<Vec<_>>()));
    found
}

/// A composable pair whose concurrent strategies do not compose.
#[derive(Debug, Clone)]
pub struct FunctorialityWitness {
    pub a: Formula,
    pub b: Formula,
    pub c: Formula,
    pub left: Strategy,
    pub right: Strategy,
    pub outcome: Functoriality,
    pub left_scheduling: Option<String>,
    pub right_scheduling: Option<String>,
}

impl fmt::Display for FunctorialityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "A = {}, B = {}, C = {}", self.a, self.b, self.c)?;
        for (name, s, w) in [
            ("s", &self.left, &self.left_scheduling),
            ("t", &self.right, &self.right_scheduling),
        ] {
            let g = s.game();
            let es: Vec<String> = s
                .edges()
                .iter()
                .map(|&e| {
                    let tr = g.transition(e);
                    format!("{} -> {}", g.vertex(tr.src).pretty(), g.vertex(tr.dst).pretty())
                })
                .collect();
            writeln!(f, "{name} on |- {}: {}", crate::formula::format_sequent(&two(g).map(|(x, y)| vec![x, y]).unwrap_or_default()), es.join("; "))?;
            match w {
                Some(w) => writeln!(f, "{name} scheduling: no ({w})")?,
                None => writeln!(f, "{name} scheduling: yes")?,
            }
        }
        write!(f, "{}", self.outcome)
    }
}

fn formulas_of_size(size: usize, atoms: &[Formula]) -> Vec<Formula> {
    if size == 0 {
        return vec![];
    }
    if size == 1 {
        return atoms.to_vec();
    }
    let mut out = Vec::new();
    for left in 1..size - 1 {
        let right = size - 1 - left;
        for l in formulas_of_size(left, atoms) {
            for r in formulas_of_size(right, atoms) {
                out.push(Formula::tensor(l.clone(), r.clone()));
                out.push(Formula::par(l.clone(), r.clone()));
            }
        }
    }
    out
}

/// Search statistics alongside the first witness.
#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub witness: Option<FunctorialityWitness>,
    pub triples: usize,
    pub pairs: usize,
    pub truncated: bool,
}

/// Looks for ingenuous `s: A → B`, `t: B → C` with `B` holding a tensor and
/// `size(A) + size(B) + size(C) ≤ bound`, such that the concurrent strategy
/// of `t ∘ s` differs from the composite of their concurrent strategies.
/// Multiplicative formulas over `X`, `Y` and their duals are tried by total
/// size, then by text.
pub fn search_functoriality_failure(bound: usize) -> SearchOutcome {
    const BUDGET: usize = 4096;
    let atoms: Vec<Formula> = ["X", "Y"]
        .iter()
        .flat_map(|x| [Formula::var(x), Formula::covar(x)])
        .collect();
    let mut triples: Vec<(usize, String, Formula, Formula, Formula)> = Vec::new();
    for total in 3..=bound {
        for sb in 3..total.saturating_sub(1) {
            for sa in 1..total - sb {
                let sc = total - sb - sa;
                for b in formulas_of_size(sb, &atoms).into_iter().filter(has_tensor) {
                    for a in formulas_of_size(sa, &atoms) {
                        for c in formulas_of_size(sc, &atoms) {
                            let key = format!("{a} ; {b} ; {c}");
                            triples.push((total, key, a.clone(), b.clone(), c));
                        }
                    }
                }
            }
        }
    }
    triples.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    let mut outcome = SearchOutcome::default();
    let mut cache: HashMap<Vec<Formula>, Vec<Strategy>> = HashMap::new();
    for (_, _, a, b, c) in triples {
        outcome.triples += 1;
        let env = VarEnv::atomic_for(&[a.clone(), b.clone(), c.clone()]);
        let mut strategies = |fs: Vec<Formula>, outcome: &mut SearchOutcome| {
            cache
                .entry(fs.clone())
                .or_insert_with(|| {
                    let g = Arc::new(game_of_sequent(&fs, &env).expect("bound variables"));
                    let found = ingenuous_strategies(&g, BUDGET);
                    if found.len() >= BUDGET {
                        outcome.truncated = true;
                    }
                    found
                })
                .clone()
        };
        let left = strategies(vec![a.dual(), b.clone()], &mut outcome);
        let right = strategies(vec![b.dual(), c.clone()], &mut outcome);
        for s in &left {
            for t in &right {
                outcome.pairs += 1;
                let Ok(f) = check_functoriality(s, t, &env) else {
                    continue;
                };
                if !f.holds {
                    outcome.witness = Some(FunctorialityWitness {
                        a: a.clone(),
                        b: b.clone(),
                        c: c.clone(),
                        left: s.clone(),
                        right: t.clone(),
                        outcome: f,
                        left_scheduling: check_properties(s).scheduling,
                        right_scheduling: check_properties(t).scheduling,
                    });
                    return outcome;
                }
            }
        }
    }
    outcome
}

fn has_tensor(f: &Formula) -> bool {
    match f {
        Formula::Tensor(..) => true,
        _ => f.children().is_some_and(|(l, r)| has_tensor(l) || has_tensor(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sequent;
    use crate::proof::parse_proof;
    use crate::strategy::{deseq, interpret, plays_of};

    fn env() -> VarEnv {
        VarEnv::atomic(["X", "Y", "Z"])
    }

    fn interp(text: &str) -> Strategy {
        deseq(&interpret(&parse_proof(text).unwrap(), &env()).unwrap())
    }

    fn copycat() -> Strategy {
        interp("ax(0,1) : |- ~X, X")
    }

    #[test]
    fn empty_strategies_interact_trivially() {
        let fs = parse_sequent("~X, X").unwrap();
        let g = Arc::new(game_of_sequent(&fs, &env()).unwrap());
        let e = Strategy::empty(g);
        let graph = interactions(&e, &e).unwrap();
        assert_eq!(graph.paths(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn copycat_relay() {
        let cc = copycat();
        let graph = interactions(&cc, &cc).unwrap();
        // oracle: filter sequences of joint positions by hand
        // x* in A, then the middle relay, then x in C
        let longest = graph.paths().into_iter().max_by_key(|p| p.len()).unwrap();
        let steps: Vec<Step> = longest.iter().map(|&e| graph.edges[e].step).collect();
        assert_eq!(steps.len(), 3);
        assert!(matches!(steps[0], Step::Left(_)));
        assert!(matches!(steps[1], Step::Middle(..)));
        assert!(matches!(steps[2], Step::Right(_)));
        assert_eq!(graph.paths().len(), 4);
        assert_eq!(compose(&cc, &cc, &env()).unwrap(), cc);
        assert!(check_confluence(&cc, &cc).unwrap().is_none());
    }

    #[test]
    fn composing_with_a_silent_strategy() {
        let fs = parse_sequent("~X, X").unwrap();
        let g = Arc::new(game_of_sequent(&fs, &env()).unwrap());
        let silent = Strategy::empty(g);
        let cc = copycat();
        let st = compose(&cc, &silent, &env()).unwrap();
        // only the Opponent move in A survives; nothing reaches B
        let plays = plays_of(&st);
        assert_eq!(plays.len(), 2);
        let g = st.game();
        assert!(plays.iter().all(|p| p.edges.iter().all(|&e| g.polarity(e) == Polarity::Opponent)));
    }

    #[test]
    fn mismatched_middles_are_rejected() {
        let a = copycat();
        let b = interp("ax(0,1) : |- ~Y, Y");
        assert!(matches!(compose(&a, &b, &env()), Err(ComposeError::Mismatch(_))));
    }

    #[test]
    fn composition_of_tensor_proofs_is_associative() {
        let s = interp("par(0, tensor(2,[0], ax(0,1), ax(0,1))) : |- (~X | ~Y), (X * Y)");
        let t = interp("par(0, tensor(2,[0], ax(0,1), ax(0,1))) : |- (~X | ~Y), (X * Y)");
        let cc = interp(
            "par(0, tensor(2,[0], ax(0,1), ax(0,1))) : |- (~X | ~Y), (X * Y)",
        );
        let left = compose(&compose(&s, &t, &env()).unwrap(), &cc, &env()).unwrap();
        let right = compose(&s, &compose(&t, &cc, &env()).unwrap(), &env()).unwrap();
        assert_eq!(plays_of(&left), plays_of(&right));
        assert_eq!(left, s);
        let r = check_properties(&left);
        assert!(r.all_hold(), "{r}");
        assert!(check_confluence(&s, &t).unwrap().is_none());
    }

    #[test]
    fn copycat_is_functorial() {
        let cc = copycat();
        assert!(check_functoriality(&cc, &cc, &env()).unwrap().holds);
        let s = interp("par(0, tensor(2,[0], ax(0,1), ax(0,1))) : |- (~X | ~Y), (X * Y)");
        assert!(check_functoriality(&s, &s, &env()).unwrap().holds);
    }

    #[test]
    fn ingenuous_enumeration_on_copycat_game() {
        let fs = parse_sequent("~X, X").unwrap();
        let g = Arc::new(game_of_sequent(&fs, &env()).unwrap());
        let all = ingenuous_strategies(&g, 1000);
        assert!(all.contains(&copycat()));
        for s in &all {
            assert!(check_properties(s).ingenuous());
        }
    }

    #[test]
    fn bound_zero_finds_nothing() {
        let out = search_functoriality_failure(0);
        assert!(out.witness.is_none());
        assert_eq!(out.triples, 0);
    }
}
