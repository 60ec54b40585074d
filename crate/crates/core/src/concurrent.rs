//! Concurrent strategies as closure operators on the lattice of positions,
//! and the conversions to and from positional strategies.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{format_sequent, Formula, Position};
use crate::game::{game_of_sequent, AsyncGame, GameError, Polarity, Shape, VarEnv, Vertex};
use crate::homotopy::simple_connectivity_witness;
use crate::strategy::{check_properties, PropertyReport, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcurrentError {
    #[error("game is not simply connected: {0} and {1} reach the same position but are not homotopic")]
    NotSimplyConnected(String, String),
    #[error("positions {0} and {1} have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("fixpoint set not closed under {0}: {1}")]
    NotClosed(&'static str, String),
    #[error("strategy is not ingenuous:\n{0}")]
    NotIngenuous(String),
    #[error("closure lives on a different game")]
    LatticeMismatch,
    #[error("composition needs strategies on two-formula sequents A*, B and B*, C: {0}")]
    Incompatible(String),
    #[error("composite is not a closure operator: {0}")]
    NotAClosure(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Positions of a simply connected game ordered by reachability, with a
/// top element adjoined. Element `len() - 1` is the top.
#[derive(Debug, Clone)]
pub struct PositionLattice {
    game: Arc<AsyncGame>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

impl PositionLattice {
    pub fn of_game(game: Arc<AsyncGame>) -> Result<PositionLattice, ConcurrentError> {
        if let Some((s, t)) = simple_connectivity_witness(&game) {
            return Err(ConcurrentError::NotSimplyConnected(
                s.display(&game).to_string(),
                t.display(&game).to_string(),
            ));
        }
        let n = game.vertex_count();
        let reach = game.reachability();
        let mut leq = vec![vec![false; n + 1]; n + 1];
        for x in 0..=n {
            for y in 0..=n {
                leq[x][y] = y == n || (x < n && reach[x][y]);
            }
        }
        let name = |x: usize| {
            if x == n {
                "⊤".to_string()
            } else {
                game.vertex(x).pretty()
            }
        };
        let mut meet = vec![vec![0; n + 1]; n + 1];
        let mut join = vec![vec![0; n + 1]; n + 1];
        for x in 0..=n {
            for y in x..=n {
                let lower: Vec<usize> = (0..=n).filter(|&z| leq[z][x] && leq[z][y]).collect();
                let m = lower
                    .iter()
                    .copied()
                    .find(|&z| lower.iter().all(|&w| leq[w][z]))
                    .ok_or_else(|| ConcurrentError::NotALattice(name(x), name(y), "meet"))?;
                let upper: Vec<usize> = (0..=n).filter(|&z| leq[x][z] && leq[y][z]).collect();
                let j = upper
                    .iter()
                    .copied()
                    .find(|&z| upper.iter().all(|&w| leq[z][w]))
                    .ok_or_else(|| ConcurrentError::NotALattice(name(x), name(y), "join"))?;
                meet[x][y] = m;
                meet[y][x] = m;
                join[x][y] = j;
                join[y][x] = j;
            }
        }
        Ok(PositionLattice { game, leq, meet, join })
    }

    pub fn game(&self) -> &Arc<AsyncGame> {
        &self.game
    }

    /// Number of elements, top included.
    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn top(&self) -> usize {
        self.leq.len() - 1
    }

    pub fn bottom(&self) -> usize {
        self.game.initial()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x][y]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x][y]
    }

    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top(), |a, b| self.meet(a, b))
    }

    pub fn name(&self, x: usize) -> String {
        if x == self.top() {
            "⊤".to_string()
        } else {
            self.game.vertex(x).pretty()
        }
    }

    /// Pairs `x < y` with nothing strictly in between.
    pub fn covering(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y
                    && self.leq(x, y)
                    && !(0..n).any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `x ≤_P y`: `y` is a position reachable from `x` by Proponent moves only.
    pub fn proponent_leq(&self) -> Vec<Vec<bool>> {
        let g = &self.game;
        let n = g.vertex_count();
        let mut out = vec![vec![false; n + 1]; n + 1];
        for (x, row) in out.iter_mut().enumerate().take(n) {
            let mut stack = vec![x];
            row[x] = true;
            while let Some(v) = stack.pop() {
                for &e in g.outgoing(v) {
                    let t = g.transition(e);
                    if t.polarity == Polarity::Proponent && !row[t.dst] {
                        row[t.dst] = true;
                        stack.push(t.dst);
                    }
                }
            }
        }
        out
    }
}

pub fn lattice_of_game(g: &AsyncGame) -> Result<PositionLattice, ConcurrentError> {
    PositionLattice::of_game(Arc::new(g.clone()))
}

fn show_set(l: &PositionLattice, xs: &BTreeSet<usize>) -> String {
    let names: Vec<String> = xs.iter().map(|&x| l.name(x)).collect();
    format!("{{{}}}", names.join(", "))
}

/// Checks (M) and (J) for `xs`, which must already contain the top.
pub fn check_fixpoint_set(l: &PositionLattice, xs: &BTreeSet<usize>) -> Result<(), ConcurrentError> {
    if !xs.contains(&l.top()) {
        return Err(ConcurrentError::NotClosed("meets", "the empty meet ⊤ is missing".into()));
    }
    for &x in xs {
        for &y in xs {
            let m = l.meet(x, y);
            if !xs.contains(&m) {
                return Err(ConcurrentError::NotClosed(
                    "meets",
                    format!("{} ∧ {} = {}", l.name(x), l.name(y), l.name(m)),
                ));
            }
        }
    }
    // a finite directed set has a greatest element, which is its join; the
    // enumeration below checks this literally on small sets
    let items: Vec<usize> = xs.iter().copied().collect();
    if items.len() <= 12 {
        for mask in 1u32..(1 << items.len()) {
            let sub: Vec<usize> = (0..items.len()).filter(|b| mask >> b & 1 == 1).map(|b| items[b]).collect();
            let directed = sub
                .iter()
                .all(|&a| sub.iter().all(|&b| sub.iter().any(|&c| l.leq(a, c) && l.leq(b, c))));
            if !directed {
                continue;
            }
            let j = sub.iter().fold(l.bottom(), |acc, &x| l.join(acc, x));
            if !xs.contains(&j) {
                let set: BTreeSet<usize> = sub.into_iter().collect();
                return Err(ConcurrentError::NotClosed("directed joins", show_set(l, &set)));
            }
        }
    }
    Ok(())
}

/// A concurrent strategy, given by its set of fixpoints (top included).
#[derive(Debug, Clone)]
pub struct ClosureStrategy {
    lattice: Arc<PositionLattice>,
    fixpoints: BTreeSet<usize>,
}

impl PartialEq for ClosureStrategy {
    fn eq(&self, other: &Self) -> bool {
        self.fixpoints == other.fixpoints && *self.lattice.game == *other.lattice.game
    }
}

impl Eq for ClosureStrategy {}

impl ClosureStrategy {
    pub fn lattice(&self) -> &Arc<PositionLattice> {
        &self.lattice
    }

    pub fn fixpoints(&self) -> &BTreeSet<usize> {
        &self.fixpoints
    }

    /// `cl(x)`: the least fixpoint above `x`.
    pub fn apply(&self, x: usize) -> usize {
        let l = &self.lattice;
        l.meet_all(self.fixpoints.iter().copied().filter(|&y| l.leq(x, y)))
    }

    /// The operator as a table indexed by lattice element.
    pub fn table(&self) -> Vec<usize> {
        (0..self.lattice.len()).map(|x| self.apply(x)).collect()
    }

    pub fn fixpoint_names(&self) -> Vec<String> {
        self.fixpoints.iter().map(|&x| self.lattice.name(x)).collect()
    }
}

impl fmt::Display for ClosureStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", show_set(&self.lattice, &self.fixpoints))
    }
}

/// The closure operator whose fixpoints are `xs` together with the top.
pub fn closure_of_fixpoints(
    l: Arc<PositionLattice>,
    xs: impl IntoIterator<Item = usize>,
) -> Result<ClosureStrategy, ConcurrentError> {
    let mut fixpoints: BTreeSet<usize> = xs.into_iter().collect();
    fixpoints.insert(l.top());
    check_fixpoint_set(&l, &fixpoints)?;
    Ok(ClosureStrategy { lattice: l, fixpoints })
}

/// Failures of the closure axioms on a map given as a table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosureReport {
    pub increasing: Option<String>,
    pub idempotent: Option<String>,
    pub monotone: Option<String>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.increasing.is_none() && self.idempotent.is_none() && self.monotone.is_none()
    }
}

impl fmt::Display for ClosureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, w) in [
            ("increasing", &self.increasing),
            ("idempotent", &self.idempotent),
            ("monotone", &self.monotone),
        ] {
            match w {
                None => writeln!(f, "{name}: yes")?,
                Some(w) => writeln!(f, "{name}: no ({w})")?,
            }
        }
        writeln!(f, "continuous: yes (finite lattice)")
    }
}

pub fn check_closure_axioms(l: &PositionLattice, op: &[usize]) -> ClosureReport {
    let n = l.len();
    let mut r = ClosureReport::default();
    for x in 0..n {
        if r.increasing.is_none() && !l.leq(x, op[x]) {
            r.increasing = Some(format!("{} is sent to {}", l.name(x), l.name(op[x])));
        }
        if r.idempotent.is_none() && op[op[x]] != op[x] {
            r.idempotent = Some(format!(
                "{} ↦ {} ↦ {}",
                l.name(x),
                l.name(op[x]),
                l.name(op[op[x]])
            ));
        }
        for y in 0..n {
            if r.monotone.is_none() && l.leq(x, y) && !l.leq(op[x], op[y]) {
                r.monotone = Some(format!("{} ≤ {} but not their images", l.name(x), l.name(y)));
            }
        }
    }
    r
}

/// Positions of the strategy from which it plays no Proponent move.
pub fn halting_positions(s: &Strategy) -> BTreeSet<usize> {
    let g = s.game();
    s.vertices()
        .iter()
        .copied()
        .filter(|&v| {
            !g.outgoing(v)
                .iter()
                .any(|&e| s.contains_edge(e) && g.polarity(e) == Polarity::Proponent)
        })
        .collect()
}

/// The least meet-closed set containing `xs` and the top: the fixpoints of
/// `cl_X(x) = ⋀{y ∈ X | x ≤ y}`.
pub fn meet_closure(l: &PositionLattice, xs: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = xs.into_iter().collect();
    out.insert(l.top());
    let mut frontier: Vec<usize> = out.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        let items: Vec<usize> = out.iter().copied().collect();
        for y in items {
            let m = l.meet(x, y);
            if out.insert(m) {
                frontier.push(m);
            }
        }
    }
    out
}

/// `cl(hpos s)` without checking that `s` is ingenuous. Halting positions
/// of additive strategies need not be closed under meets; the fixpoints are
/// then those of the closure generated by them.
pub fn concurrent_of(s: &Strategy) -> Result<ClosureStrategy, ConcurrentError> {
    let l = Arc::new(PositionLattice::of_game(s.game().clone())?);
    let xs = meet_closure(&l, halting_positions(s));
    closure_of_fixpoints(l, xs)
}

/// `cl(hpos s)` for an ingenuous strategy.
pub fn to_concurrent(s: &Strategy) -> Result<ClosureStrategy, ConcurrentError> {
    let report: PropertyReport = check_properties(s);
    if !report.ingenuous() {
        return Err(ConcurrentError::NotIngenuous(report.to_string()));
    }
    concurrent_of(s)
}

/// The strategy of all plays whose positions `x` satisfy `x ≤_P c(x)`.
/// When the initial position already fails, only the empty play is kept.
pub fn to_async(c: &ClosureStrategy, g: &Arc<AsyncGame>) -> Result<Strategy, ConcurrentError> {
    if *c.lattice.game != **g {
        return Err(ConcurrentError::LatticeMismatch);
    }
    let l = &c.lattice;
    let p_leq = l.proponent_leq();
    let table = c.table();
    let ok: Vec<bool> = (0..g.vertex_count())
        .map(|x| table[x] != l.top() && p_leq[x][table[x]])
        .collect();
    if !ok[g.initial()] {
        return Ok(Strategy::empty(g.clone()));
    }
    let edges = (0..g.transition_count()).filter(|&e| {
        let t = g.transition(e);
        ok[t.src] && ok[t.dst]
    });
    Ok(Strategy::from_edges(g.clone(), edges))
}

/// Whether the concurrent strategy of `s` survives the round trip through
/// the positional side unchanged.
pub fn check_retraction(s: &Strategy) -> Result<bool, ConcurrentError> {
    let c = concurrent_of(s)?;
    let back = to_async(&c, s.game())?;
    let c2 = concurrent_of(&back)?;
    Ok(c2.fixpoints == c.fixpoints)
}

fn two_formulas(g: &AsyncGame) -> Result<(Formula, Formula), ConcurrentError> {
    match g.shape() {
        Shape::Sequent(fs) if fs.len() == 2 => Ok((fs[0].clone(), fs[1].clone())),
        Shape::Sequent(fs) => Err(ConcurrentError::Incompatible(format_sequent(fs))),
        _ => Err(ConcurrentError::Incompatible("game is not a sequent game".into())),
    }
}

fn pair(g: &AsyncGame, v: usize) -> (Position, Position) {
    let cs = g.vertex(v).components().expect("sequent vertex");
    (
        cs[0].as_position().expect("position").clone(),
        cs[1].as_position().expect("position").clone(),
    )
}

fn vertex_pair(g: &AsyncGame, a: &Position, b: &Position) -> usize {
    g.vertex_id(&Vertex::Tuple(vec![Vertex::Pos(a.clone()), Vertex::Pos(b.clone())]))
        .expect("sequent games are full products")
}

/// Composition of `a` on `⊢ A*, B` with `b` on `⊢ B*, C`: from `(x_A, x_C)`
/// both operators are applied in turn to the joint position, starting from
/// the bottom of `B`, until nothing changes; reaching the top anywhere
/// gives the top.
pub fn compose_closures(
    a: &ClosureStrategy,
    b: &ClosureStrategy,
    env: &VarEnv,
) -> Result<ClosureStrategy, ConcurrentError> {
    let ga = a.lattice.game.clone();
    let gb = b.lattice.game.clone();
    let (fa, fb) = two_formulas(&ga)?;
    let (fb2, fc) = two_formulas(&gb)?;
    if fb2 != fb.dual() {
        return Err(ConcurrentError::Incompatible(format!("{fb} does not meet {fb2}")));
    }
    let gc = Arc::new(game_of_sequent(&[fa, fc], env)?);
    let lc = Arc::new(PositionLattice::of_game(gc.clone())?);
    let (ta, tb) = (a.table(), b.table());
    let mut table = vec![lc.top(); lc.len()];
    for (x, slot) in table.iter_mut().enumerate().take(gc.vertex_count()) {
        let (mut pa, mut pc) = pair(&gc, x);
        let mut pb = Position::Dagger;
        *slot = loop {
            let ya = ta[vertex_pair(&ga, &pa, &pb)];
            if ya == a.lattice.top() {
                break lc.top();
            }
            let (na, nb) = pair(&ga, ya);
            let yb = tb[vertex_pair(&gb, &nb.dual(), &pc)];
            if yb == b.lattice.top() {
                break lc.top();
            }
            let (nb2, nc) = pair(&gb, yb);
            let nb2 = nb2.dual();
            if na == pa && nb2 == pb && nc == pc {
                break vertex_pair(&gc, &pa, &pc);
            }
            (pa, pb, pc) = (na, nb2, nc);
        };
    }
    let report = check_closure_axioms(&lc, &table);
    if !report.holds() {
        return Err(ConcurrentError::NotAClosure(report.to_string()));
    }
    let fix = (0..lc.len()).filter(|&x| table[x] == x);
    closure_of_fixpoints(lc, fix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sequent;
    use crate::proof::parse_proof;
    use crate::proof::tests::{LEFT, RIGHT};
    use crate::strategy::{deseq, interpret};

    fn game(text: &str) -> Arc<AsyncGame> {
        let fs = parse_sequent(text).unwrap();
        Arc::new(game_of_sequent(&fs, &VarEnv::atomic_for(&fs)).unwrap())
    }

    fn vid(g: &AsyncGame, label: &str) -> usize {
        g.vertex_id(&label.parse().unwrap()).unwrap_or_else(|| panic!("{label}"))
    }

    fn through(g: &Arc<AsyncGame>, path: &[&str]) -> Strategy {
        let ids: Vec<usize> = path.iter().map(|l| vid(g, l)).collect();
        Strategy::from_edges(g.clone(), ids.windows(2).map(|w| g.edge_id(w[0], w[1]).unwrap()))
    }

    pub(crate) fn sigma() -> Strategy {
        let g = game("(~X | ~Y)");
        through(&g, &["[dag]", "[(dag | dag)]", "[(atom(~X,x) | dag)]", "[(atom(~X,x) | atom(~Y,y))]"])
    }

    pub(crate) fn tau() -> Strategy {
        let g = game("(X * Y)");
        through(&g, &["[dag]", "[(dag * dag)]", "[(dag * atom(Y,y))]", "[(atom(X,x) * atom(Y,y))]"])
    }

    fn names(l: &PositionLattice, xs: &BTreeSet<usize>) -> BTreeSet<String> {
        xs.iter().map(|&x| l.name(x)).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn atomic_lattice_is_a_chain() {
        let l = lattice_of_game(&game("X")).unwrap();
        assert_eq!(l.len(), 3);
        let (b, x, t) = (l.bottom(), 1 - l.bottom(), l.top());
        assert!(l.leq(b, x) && l.leq(x, t) && !l.leq(x, b));
        assert_eq!(l.covering().len(), 2);
    }

    #[test]
    fn tensor_lattice_meets_and_joins() {
        let g = game("(X * Y)");
        let l = lattice_of_game(&g).unwrap();
        let xd = vid(&g, "[(atom(X,x) * dag)]");
        let dy = vid(&g, "[(dag * atom(Y,y))]");
        assert_eq!(l.meet(xd, dy), vid(&g, "[(dag * dag)]"));
        assert_eq!(l.join(xd, dy), vid(&g, "[(atom(X,x) * atom(Y,y))]"));
        // brute-force order: reachability by explicit path search
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                let mut seen = vec![x];
                let mut i = 0;
                while i < seen.len() {
                    for &e in g.outgoing(seen[i]) {
                        let d = g.transition(e).dst;
                        if !seen.contains(&d) {
                            seen.push(d);
                        }
                    }
                    i += 1;
                }
                assert_eq!(l.leq(x, y), seen.contains(&y));
            }
        }
    }

    #[test]
    fn with_branches_meet_at_the_root() {
        let g = game("((X * ~X) & Y)");
        let l = lattice_of_game(&g).unwrap();
        let wl = vid(&g, "[&L (dag * dag)]");
        let wr = vid(&g, "[&R atom(Y,y)]");
        assert_eq!(l.meet(wl, wr), g.initial());
        assert_eq!(l.join(wl, wr), l.top());
    }

    #[test]
    fn closure_examples() {
        let g = game("(X * Y)");
        let l = Arc::new(lattice_of_game(&g).unwrap());
        let all = closure_of_fixpoints(l.clone(), 0..l.len()).unwrap();
        assert_eq!(all.table(), (0..l.len()).collect::<Vec<_>>());
        let xy = vid(&g, "[(atom(X,x) * atom(Y,y))]");
        let c = closure_of_fixpoints(l.clone(), [xy]).unwrap();
        assert_eq!(c.apply(g.initial()), xy);
        assert_eq!(c.fixpoints(), &BTreeSet::from([xy, l.top()]));
        assert!(check_closure_axioms(&l, &c.table()).holds());
        let top = vec![l.top(); l.len()];
        assert!(check_closure_axioms(&l, &top).holds());
        let mut bad: Vec<usize> = (0..l.len()).collect();
        bad[xy] = g.initial();
        assert!(check_closure_axioms(&l, &bad).increasing.is_some());
        let xd = vid(&g, "[(atom(X,x) * dag)]");
        let dy = vid(&g, "[(dag * atom(Y,y))]");
        assert!(matches!(
            closure_of_fixpoints(l, [xd, dy]),
            Err(ConcurrentError::NotClosed("meets", _))
        ));
    }

    #[test]
    fn halting_positions_of_sigma_and_tau() {
        let s = sigma();
        let l = lattice_of_game(s.game()).unwrap();
        assert_eq!(names(&l, &halting_positions(&s)), set(&["†", "†⅋†", "x*⅋†", "x*⅋y*"]));
        let t = tau();
        assert_eq!(names(&l, &halting_positions(&t)).len(), 1);
        let lt = lattice_of_game(t.game()).unwrap();
        assert_eq!(names(&lt, &halting_positions(&t)), set(&["x⊗y"]));
    }

    #[test]
    fn empty_strategy_halts_at_the_root() {
        let g = game("(X | Y)");
        let s = Strategy::empty(g.clone());
        assert_eq!(halting_positions(&s), BTreeSet::from([g.initial()]));
    }

    #[test]
    fn copycat_fixpoints() {
        let p = parse_proof("ax(0,1) : |- ~X, X").unwrap();
        let s = interpret(&p, &VarEnv::atomic_for(&p.conclusion)).unwrap();
        let c = to_concurrent(&s).unwrap();
        assert_eq!(c.fixpoint_names().into_iter().collect::<BTreeSet<_>>(), set(&["†, †", "x*, x", "⊤"]));
        assert!(check_retraction(&s).unwrap());
    }

    #[test]
    fn sigma_and_tau_survive_the_round_trip() {
        assert!(check_retraction(&sigma()).unwrap());
        assert!(check_retraction(&tau()).unwrap());
        assert!(matches!(to_concurrent(&tau()), Err(ConcurrentError::NotIngenuous(_))));
        let back = to_async(&concurrent_of(&sigma()).unwrap(), sigma().game()).unwrap();
        assert_eq!(back, sigma());
    }

    #[test]
    fn to_async_of_tau_plays_the_whole_tensor() {
        let t = tau();
        let g = t.game().clone();
        let back = to_async(&concurrent_of(&t).unwrap(), &g).unwrap();
        // oracle: filter all plays by the positional condition
        let l = lattice_of_game(&g).unwrap();
        let xy = vid(&g, "[(atom(X,x) * atom(Y,y))]");
        let pl = l.proponent_leq();
        let kept: BTreeSet<_> = crate::homotopy::enumerate_plays(&g)
            .into_iter()
            .filter(|p| p.vertices(&g).iter().all(|&v| pl[v][xy]))
            .collect();
        let got: BTreeSet<_> = crate::strategy::plays_of(&back).into_iter().collect();
        assert_eq!(got, kept);
        assert!(t.is_subset(&back));
    }

    #[test]
    fn degenerate_closures() {
        let g = game("(X * Y)");
        let l = Arc::new(lattice_of_game(&g).unwrap());
        let top_only = closure_of_fixpoints(l.clone(), []).unwrap();
        assert_eq!(to_async(&top_only, &g).unwrap(), Strategy::empty(g.clone()));
        let id = closure_of_fixpoints(l.clone(), 0..l.len()).unwrap();
        // every position is its own image, reached by the empty Proponent path
        let n = crate::homotopy::enumerate_plays(&g).len();
        assert_eq!(crate::strategy::plays_of(&to_async(&id, &g).unwrap()).len(), n);
        let g2 = game("(~X | ~Y)");
        let l2 = Arc::new(lattice_of_game(&g2).unwrap());
        let id2 = closure_of_fixpoints(l2, 0..g2.vertex_count() + 1).unwrap();
        let all = to_async(&id2, &g2).unwrap();
        assert_eq!(crate::strategy::plays_of(&all).len(), crate::homotopy::enumerate_plays(&g2).len());
    }

    #[test]
    fn interpreted_proofs_give_closures() {
        for text in [LEFT, RIGHT] {
            let p = parse_proof(text).unwrap();
            let s = deseq(&interpret(&p, &VarEnv::atomic_for(&p.conclusion)).unwrap());
            let c = to_concurrent(&s).unwrap();
            assert!(check_closure_axioms(c.lattice(), &c.table()).holds());
            assert!(check_retraction(&s).unwrap());
        }
    }

    #[test]
    fn composing_with_copycat_and_top() {
        let env = VarEnv::atomic(["X"]);
        let id = |text: &str| {
            let p = parse_proof(text).unwrap();
            to_concurrent(&interpret(&p, &env).unwrap()).unwrap()
        };
        let cc = id("ax(0,1) : |- ~X, X");
        let c = compose_closures(&cc, &cc, &env).unwrap();
        assert_eq!(c, cc);
        let top = |g: &ClosureStrategy| closure_of_fixpoints(g.lattice().clone(), []).unwrap();
        let t = compose_closures(&top(&cc), &top(&cc), &env).unwrap();
        assert_eq!(t.fixpoints().len(), 1);
        assert!(compose_closures(&cc, &concurrent_of(&sigma()).unwrap(), &env).is_err());
    }

    #[test]
    fn non_simply_connected_games_are_rejected() {
        let mut b = crate::game::GameBuilder::new();
        let r = b.vertex(Vertex::Name("r".into()));
        let u = b.vertex(Vertex::Name("u".into()));
        let v = b.vertex(Vertex::Name("v".into()));
        let t = b.vertex(Vertex::Name("t".into()));
        b.transition(r, u, Polarity::Proponent);
        b.transition(r, v, Polarity::Proponent);
        b.transition(u, t, Polarity::Proponent);
        b.transition(v, t, Polarity::Proponent);
        let g = b.build(r, Shape::Plain);
        assert!(matches!(lattice_of_game(&g), Err(ConcurrentError::NotSimplyConnected(..))));
    }
}
