//! Paths, plays, homotopy and the structural axioms of asynchronous games.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::game::{AsyncGame, GameError};

/// A source vertex and consecutive transitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn empty(source: usize) -> Path {
        Path { source, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn target(&self, g: &AsyncGame) -> usize {
        self.edges.last().map(|&e| g.transition(e).dst).unwrap_or(self.source)
    }

    /// Builds a path through the given vertices.
    pub fn through(g: &AsyncGame, vertices: &[usize]) -> Result<Path, GameError> {
        let mut edges = Vec::new();
        for w in vertices.windows(2) {
            let e = g.edge_id(w[0], w[1]).ok_or_else(|| {
                GameError::UnknownTransition(g.vertex(w[0]).to_string(), g.vertex(w[1]).to_string())
            })?;
            edges.push(e);
        }
        Ok(Path { source: vertices[0], edges })
    }

    pub fn is_valid(&self, g: &AsyncGame) -> bool {
        let mut at = self.source;
        for &e in &self.edges {
            if e >= g.transition_count() || g.transition(e).src != at {
                return false;
            }
            at = g.transition(e).dst;
        }
        self.source < g.vertex_count()
    }

    pub fn vertices(&self, g: &AsyncGame) -> Vec<usize> {
        let mut out = vec![self.source];
        out.extend(self.edges.iter().map(|&e| g.transition(e).dst));
        out
    }

    pub fn display<'a>(&'a self, g: &'a AsyncGame) -> PathDisplay<'a> {
        PathDisplay { path: self, game: g }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    game: &'a AsyncGame,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs = self.path.vertices(self.game);
        let parts: Vec<String> = vs.iter().map(|&v| self.game.vertex(v).pretty()).collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

/// Decides `s ∼ t` by breadth-first closure under single-tile rewrites.
pub fn homotopic(g: &AsyncGame, s: &Path, t: &Path) -> Result<bool, GameError> {
    for p in [s, t] {
        if !p.is_valid(g) {
            return Err(GameError::UnknownTransition(format!("{:?}", p.edges), "invalid path".into()));
        }
    }
    if s.source != t.source || s.target(g) != t.target(g) || s.len() != t.len() {
        return Ok(false);
    }
    if s == t {
        return Ok(true);
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(s.edges.clone());
    queue.push_back(s.edges.clone());
    while let Some(cur) = queue.pop_front() {
        for i in 0..cur.len().saturating_sub(1) {
            for &(n, q) in g.tile_partners(cur[i], cur[i + 1]) {
                let mut next = cur.clone();
                next[i] = n;
                next[i + 1] = q;
                if next == t.edges {
                    return Ok(true);
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(false)
}

/// All plays, including the empty one, in depth-first order.
pub fn enumerate_plays(g: &AsyncGame) -> Vec<Path> {
    plays_within(g, &|_| true)
}

/// All plays using only transitions accepted by `keep`.
pub fn plays_within(g: &AsyncGame, keep: &dyn Fn(usize) -> bool) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![Path::empty(g.initial())];
    while let Some(p) = stack.pop() {
        let at = p.target(g);
        for &e in g.outgoing(at).iter().rev() {
            if keep(e) {
                let mut q = p.clone();
                q.edges.push(e);
                stack.push(q);
            }
        }
        out.push(p);
    }
    out.sort();
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: Vec::new() }
    }

    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Homotopy classes of plays, computed vertex by vertex in topological
/// order. A class at `x` is a set of plays ending at `x`; extending
/// homotopic plays by the same transition keeps them homotopic, and each
/// tile merges the classes of its two sides.
pub struct HomotopyClasses {
    /// For each vertex: class index of (incoming edge, class at source).
    step: Vec<HashMap<(usize, usize), usize>>,
    /// For each vertex: a representative play per class.
    reps: Vec<Vec<Path>>,
}

impl HomotopyClasses {
    /// Classes of plays through the sub-graph of transitions accepted by `keep`;
    /// only tiles whose four transitions are kept are used.
    pub fn compute(g: &AsyncGame, keep: &dyn Fn(usize) -> bool) -> HomotopyClasses {
        let n = g.vertex_count();
        let mut step: Vec<HashMap<(usize, usize), usize>> = vec![HashMap::new(); n];
        let mut reps: Vec<Vec<Path>> = vec![Vec::new(); n];
        reps[g.initial()].push(Path::empty(g.initial()));
        for x in g.topological_order() {
            if x == g.initial() {
                continue;
            }
            let mut uf = UnionFind::new();
            let mut node: HashMap<(usize, usize), usize> = HashMap::new();
            let mut keys = Vec::new();
            for &e in g.incoming(x) {
                if !keep(e) {
                    continue;
                }
                let src = g.transition(e).src;
                for c in 0..reps[src].len() {
                    let id = uf.add();
                    node.insert((e, c), id);
                    keys.push((e, c));
                }
            }
            for &p in g.incoming(x) {
                if !keep(p) {
                    continue;
                }
                let y1 = g.transition(p).src;
                for &m in g.incoming(y1) {
                    if !keep(m) {
                        continue;
                    }
                    for &(n2, q) in g.tile_partners(m, p) {
                        if !keep(n2) || !keep(q) {
                            continue;
                        }
                        let w = g.transition(m).src;
                        let y2 = g.transition(n2).src;
                        debug_assert_eq!(w, y2);
                        for c in 0..reps[w].len() {
                            let cm = step[y1].get(&(m, c)).copied();
                            let cn = step[g.transition(n2).dst].get(&(n2, c)).copied();
                            if let (Some(cm), Some(cn)) = (cm, cn) {
                                if let (Some(&a), Some(&b)) = (node.get(&(p, cm)), node.get(&(q, cn))) {
                                    uf.union(a, b);
                                }
                            }
                        }
                    }
                }
            }
            let mut dense: HashMap<usize, usize> = HashMap::new();
            for (e, c) in keys {
                let root = uf.find(node[&(e, c)]);
                let next = dense.len();
                let idx = *dense.entry(root).or_insert_with(|| {
                    let src = g.transition(e).src;
                    let mut rep = reps[src][c].clone();
                    rep.edges.push(e);
                    reps[x].push(rep);
                    next
                });
                step[x].insert((e, c), idx);
            }
        }
        HomotopyClasses { step, reps }
    }

    pub fn class_count(&self, v: usize) -> usize {
        self.reps[v].len()
    }

    pub fn representatives(&self, v: usize) -> &[Path] {
        &self.reps[v]
    }

    /// Class index of a play (relative to its target), if it runs inside
    /// the sub-graph the classes were computed for.
    pub fn class_of(&self, g: &AsyncGame, play: &Path) -> Option<usize> {
        if play.source != g.initial() {
            return None;
        }
        let mut c = 0;
        for &e in &play.edges {
            c = *self.step[g.transition(e).dst].get(&(e, c))?;
        }
        Some(c)
    }

    /// Class reached by extending class `c` at `src(e)` with `e`.
    pub fn extend(&self, g: &AsyncGame, c: usize, e: usize) -> Option<usize> {
        self.step[g.transition(e).dst].get(&(e, c)).copied()
    }
}

/// `None` when any two plays with the same target are homotopic; otherwise
/// two non-homotopic plays.
pub fn simple_connectivity_witness(g: &AsyncGame) -> Option<(Path, Path)> {
    let classes = HomotopyClasses::compute(g, &|_| true);
    (0..g.vertex_count())
        .find(|&v| classes.class_count(v) > 1)
        .map(|v| {
            let r = classes.representatives(v);
            (r[0].clone(), r[1].clone())
        })
}

pub fn is_simply_connected(g: &AsyncGame) -> bool {
    simple_connectivity_witness(g).is_none()
}

/// Event (move) index of each transition: the classes of the relation
/// identifying a transition with its residuals.
pub fn events(g: &AsyncGame) -> Vec<usize> {
    let mut uf = UnionFind::new();
    for _ in 0..g.transition_count() {
        uf.add();
    }
    for tile in g.tiles() {
        let ((m, p), (n, q)) = (tile.first, tile.second);
        uf.union(m, q);
        uf.union(n, p);
    }
    let mut dense: HashMap<usize, usize> = HashMap::new();
    (0..g.transition_count())
        .map(|e| {
            let r = uf.find(e);
            let next = dense.len();
            *dense.entry(r).or_insert(next)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    DuplicateTransition,
    Unreachable,
    Cycle,
    TileShape,
    NonUniqueTile,
    NonUniqueResidual,
    PolarityNotResidual,
    PolarityNotConstantOnEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: String,
}

/// Lists every violated structural invariant with a witness.
pub fn check_game_axioms(g: &AsyncGame) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    let name = |v: usize| g.vertex(v).to_string();
    let edge = |e: usize| {
        let t = g.transition(e);
        format!("{} -> {}", name(t.src), name(t.dst))
    };

    let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
    for t in g.transitions() {
        *pairs.entry((t.src, t.dst)).or_default() += 1;
    }
    for ((s, d), k) in pairs {
        if k > 1 {
            out.insert(Violation {
                kind: ViolationKind::DuplicateTransition,
                witness: format!("{k} transitions {} -> {}", name(s), name(d)),
            });
        }
    }

    let order = g.topological_order();
    if order.len() < g.vertex_count() {
        let ordered: HashSet<usize> = order.iter().copied().collect();
        let v = (0..g.vertex_count()).find(|v| !ordered.contains(v)).unwrap();
        out.insert(Violation {
            kind: ViolationKind::Cycle,
            witness: format!("{} lies on or after a cycle", name(v)),
        });
    }

    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![g.initial()];
    seen[g.initial()] = true;
    while let Some(v) = stack.pop() {
        for &e in g.outgoing(v) {
            let w = g.transition(e).dst;
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    for (v, ok) in seen.iter().enumerate() {
        if !ok {
            out.insert(Violation {
                kind: ViolationKind::Unreachable,
                witness: name(v),
            });
        }
    }

    let mut per_path: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let mut per_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for tile in g.tiles() {
        let ((m, p), (n, q)) = (tile.first, tile.second);
        let tm = g.transition(m);
        let tp = g.transition(p);
        let tn = g.transition(n);
        let tq = g.transition(q);
        let shape_ok = tm.dst == tp.src
            && tn.dst == tq.src
            && tm.src == tn.src
            && tp.dst == tq.dst
            && m != n;
        if !shape_ok {
            out.insert(Violation {
                kind: ViolationKind::TileShape,
                witness: format!("[{} ; {}] ~ [{} ; {}]", edge(m), edge(p), edge(n), edge(q)),
            });
            continue;
        }
        if tm.polarity != tq.polarity || tn.polarity != tp.polarity {
            out.insert(Violation {
                kind: ViolationKind::PolarityNotResidual,
                witness: format!("[{} ; {}] ~ [{} ; {}]", edge(m), edge(p), edge(n), edge(q)),
            });
        }
        for (a, b) in tile.orientations() {
            per_path.entry(a).or_default().push(b);
            per_pair.entry((a.0, b.0)).or_default().push(b.1);
        }
    }
    for ((m, p), partners) in per_path {
        if partners.len() > 1 {
            let ws: Vec<String> = partners
                .iter()
                .map(|&(n, q)| format!("[{} ; {}]", edge(n), edge(q)))
                .collect();
            out.insert(Violation {
                kind: ViolationKind::NonUniqueTile,
                witness: format!("[{} ; {}] tiles with {}", edge(m), edge(p), ws.join(" and ")),
            });
        }
    }
    for ((m, n), residuals) in per_pair {
        let distinct: BTreeSet<usize> = residuals.into_iter().collect();
        if distinct.len() > 1 {
            let ws: Vec<String> = distinct.iter().map(|&q| edge(q)).collect();
            out.insert(Violation {
                kind: ViolationKind::NonUniqueResidual,
                witness: format!("{} after {} has residuals {}", edge(m), edge(n), ws.join(", ")),
            });
        }
    }

    let ev = events(g);
    let mut pol: HashMap<usize, (crate::game::Polarity, usize)> = HashMap::new();
    for (e, &class) in ev.iter().enumerate() {
        let p = g.polarity(e);
        match pol.get(&class) {
            Some(&(p0, e0)) if p0 != p => {
                out.insert(Violation {
                    kind: ViolationKind::PolarityNotConstantOnEvent,
                    witness: format!("{} and {}", edge(e0), edge(e)),
                });
            }
            None => {
                pol.insert(class, (p, e));
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::game::{game_of_formula, GameBuilder, Polarity, Shape, VarEnv, Vertex};

    fn v(s: &str) -> Vertex {
        Vertex::Name(s.to_string())
    }

    fn diagram_game() -> AsyncGame {
        let env = VarEnv::atomic(["X", "Y"]);
        game_of_formula(&parse_formula("((X * ~X) & Y)").unwrap(), &env).unwrap()
    }

    #[test]
    fn diagram_game_has_nine_plays() {
        // brute force: ε, &L†, &L(†⊗†), two one-sided moves, two full
        // interleavings, &R†, &R y
        assert_eq!(enumerate_plays(&diagram_game()).len(), 9);
        let env = VarEnv::atomic(["X", "Y"]);
        let xy = game_of_formula(&parse_formula("(X * Y)").unwrap(), &env).unwrap();
        assert_eq!(enumerate_plays(&xy).len(), 6);
    }

    #[test]
    fn homotopy_on_tensor_square() {
        let env = VarEnv::atomic(["X", "Y"]);
        let g = game_of_formula(&parse_formula("(X * Y)").unwrap(), &env).unwrap();
        let id = |s: &str| g.vertex_id(&Vertex::Pos(s.parse().unwrap())).unwrap();
        let dd = id("(dag * dag)");
        let xd = id("(atom(X,x) * dag)");
        let dy = id("(dag * atom(Y,y))");
        let xy = id("(atom(X,x) * atom(Y,y))");
        let s = Path::through(&g, &[dd, xd, xy]).unwrap();
        let t = Path::through(&g, &[dd, dy, xy]).unwrap();
        assert!(homotopic(&g, &s, &s).unwrap());
        assert!(homotopic(&g, &s, &t).unwrap());
        let u = Path::through(&g, &[dd, xd]).unwrap();
        assert!(!homotopic(&g, &s, &u).unwrap());
        assert!(is_simply_connected(&g));
    }

    #[test]
    fn two_tiles_on_one_path_are_reported() {
        let mut b = GameBuilder::new();
        let (a, b1, b2, b3, c) = (b.vertex(v("a")), b.vertex(v("b1")), b.vertex(v("b2")), b.vertex(v("b3")), b.vertex(v("c")));
        let m = b.transition(a, b1, Polarity::Opponent);
        let p = b.transition(b1, c, Polarity::Opponent);
        let n = b.transition(a, b2, Polarity::Opponent);
        let q = b.transition(b2, c, Polarity::Opponent);
        let n2 = b.transition(a, b3, Polarity::Opponent);
        let q2 = b.transition(b3, c, Polarity::Opponent);
        b.tile(m, p, n, q);
        b.tile(m, p, n2, q2);
        let g = b.build(a, Shape::Plain);
        let report = check_game_axioms(&g);
        let hit = report.iter().find(|r| r.kind == ViolationKind::NonUniqueTile).unwrap();
        assert!(hit.witness.contains("b2") && hit.witness.contains("b3"), "{}", hit.witness);
    }

    #[test]
    fn unreachable_vertex_is_reported() {
        let mut b = GameBuilder::new();
        let a = b.vertex(v("a"));
        let z = b.vertex(v("z"));
        let w = b.vertex(v("w"));
        b.transition(z, w, Polarity::Proponent);
        let g = b.build(a, Shape::Plain);
        let report = check_game_axioms(&g);
        assert!(report.iter().any(|r| r.kind == ViolationKind::Unreachable && r.witness == "z"));
    }

    #[test]
    fn cycles_and_duplicates_are_reported() {
        let mut b = GameBuilder::new();
        let a = b.vertex(v("a"));
        let c = b.vertex(v("c"));
        b.transition(a, c, Polarity::Proponent);
        b.transition(a, c, Polarity::Proponent);
        b.transition(c, a, Polarity::Proponent);
        let g = b.build(a, Shape::Plain);
        let kinds: Vec<ViolationKind> = check_game_axioms(&g).into_iter().map(|r| r.kind).collect();
        assert!(kinds.contains(&ViolationKind::Cycle));
        assert!(kinds.contains(&ViolationKind::DuplicateTransition));
    }

    #[test]
    fn non_simply_connected_square() {
        let mut b = GameBuilder::new();
        let (a, l, r, t) = (b.vertex(v("a")), b.vertex(v("l")), b.vertex(v("r")), b.vertex(v("t")));
        b.transition(a, l, Polarity::Opponent);
        b.transition(a, r, Polarity::Opponent);
        b.transition(l, t, Polarity::Opponent);
        b.transition(r, t, Polarity::Opponent);
        let g = b.build(a, Shape::Plain);
        let (s, u) = simple_connectivity_witness(&g).unwrap();
        assert!(!homotopic(&g, &s, &u).unwrap());
    }

    #[test]
    fn classes_agree_with_breadth_first_homotopy() {
        let env = VarEnv::atomic(["X", "Y"]);
        for text in ["((X | Y) * ~X)", "((X * ~X) & Y)", "((X | ~Y) | (Y + X))"] {
            let g = game_of_formula(&parse_formula(text).unwrap(), &env).unwrap();
            let classes = HomotopyClasses::compute(&g, &|_| true);
            let plays = enumerate_plays(&g);
            for s in &plays {
                for t in &plays {
                    if s.target(&g) != t.target(&g) {
                        continue;
                    }
                    let same = classes.class_of(&g, s) == classes.class_of(&g, t);
                    assert_eq!(same, homotopic(&g, s, t).unwrap(), "{text}");
                }
            }
        }
    }
}
