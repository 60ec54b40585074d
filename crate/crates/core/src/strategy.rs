//! Positional strategies as subgraphs of a game, the interpretation of
//! proofs, property checks and the courteous closure.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{Addr, Formula, Position};
use crate::game::{game_of_sequent, AsyncGame, GameError, Polarity, VarEnv, Vertex};
use crate::homotopy::{events, Path};
use crate::proof::{check_proof, tensor_sides, Proof, ProofError, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("not a strategy: {0}")]
    Invalid(String),
}

/// A set of positions and transitions of a game, closed enough to be the
/// graph of a positional strategy: it holds the initial position and every
/// position is reachable inside it.
#[derive(Debug, Clone)]
pub struct Strategy {
    game: Arc<AsyncGame>,
    vertices: BTreeSet<usize>,
    edges: BTreeSet<usize>,
}

impl PartialEq for Strategy {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges && *self.game == *other.game
    }
}

impl Eq for Strategy {}

impl Strategy {
    /// Validates and wraps a subgraph.
    pub fn new(
        game: Arc<AsyncGame>,
        vertices: BTreeSet<usize>,
        edges: BTreeSet<usize>,
    ) -> Result<Strategy, StrategyError> {
        if !vertices.contains(&game.initial()) {
            return Err(StrategyError::Invalid("initial position missing".into()));
        }
        for &e in &edges {
            if e >= game.transition_count() {
                return Err(StrategyError::Invalid(format!("no transition #{e}")));
            }
            let t = game.transition(e);
            if !vertices.contains(&t.src) || !vertices.contains(&t.dst) {
                return Err(StrategyError::Invalid(format!(
                    "transition {} -> {} leaves the vertex set",
                    game.vertex(t.src).pretty(),
                    game.vertex(t.dst).pretty()
                )));
            }
        }
        let s = Strategy::from_edges(game, edges.iter().copied());
        if s.vertices != vertices {
            let v = vertices.difference(&s.vertices).next().copied().unwrap_or_default();
            return Err(StrategyError::Invalid(format!(
                "position {} is unreachable inside the strategy",
                s.game.vertex(v).pretty()
            )));
        }
        Ok(s)
    }

    /// The part of the given transitions reachable from the initial position.
    pub fn from_edges(game: Arc<AsyncGame>, edges: impl IntoIterator<Item = usize>) -> Strategy {
        let allowed: BTreeSet<usize> = edges.into_iter().collect();
        let mut vertices = BTreeSet::new();
        let mut kept = BTreeSet::new();
        let mut queue = VecDeque::from([game.initial()]);
        vertices.insert(game.initial());
        while let Some(v) = queue.pop_front() {
            for &e in game.outgoing(v) {
                if allowed.contains(&e) {
                    kept.insert(e);
                    let w = game.transition(e).dst;
                    if vertices.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        Strategy {
            game,
            vertices,
            edges: kept,
        }
    }

    /// The strategy with only the empty play.
    pub fn empty(game: Arc<AsyncGame>) -> Strategy {
        Strategy::from_edges(game, [])
    }

    pub fn game(&self) -> &Arc<AsyncGame> {
        &self.game
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }

    /// Inclusion of subgraphs of the same game.
    pub fn is_subset(&self, other: &Strategy) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    pub fn union(&self, other: &Strategy) -> Strategy {
        Strategy::from_edges(self.game.clone(), self.edges.union(&other.edges).copied())
    }

    /// Positions of the strategy with no outgoing strategy transition.
    pub fn halting(&self) -> BTreeSet<usize> {
        self.vertices
            .iter()
            .copied()
            .filter(|&v| !self.game.outgoing(v).iter().any(|e| self.edges.contains(e)))
            .collect()
    }

    /// Reflexive-transitive reachability inside the strategy, from `v`.
    pub fn reachable_from(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &e in self.game.outgoing(x) {
                if self.edges.contains(&e) {
                    let y = self.game.transition(e).dst;
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        seen
    }
}

/// Every path of the subgraph from the initial position, sorted.
pub fn plays_of(s: &Strategy) -> Vec<Path> {
    crate::homotopy::plays_within(&s.game, &|e| s.edges.contains(&e))
}

// Interpretation works on position tuples so that premise strategies can be
// transported along the rule to the conclusion game.

type Label = Vec<Position>;

#[derive(Default)]
struct Labels {
    vertices: BTreeSet<Label>,
    edges: BTreeSet<(Label, Label)>,
}

fn tuple_of(v: &Vertex) -> Label {
    v.components()
        .expect("sequent vertices are tuples")
        .iter()
        .map(|c| c.as_position().expect("sequent components are positions").clone())
        .collect()
}

fn vertex_of(label: &Label) -> Vertex {
    Vertex::Tuple(label.iter().cloned().map(Vertex::Pos).collect())
}

impl Labels {
    fn map(&self, f: impl Fn(&Label) -> Label) -> Labels {
        Labels {
            vertices: self.vertices.iter().map(&f).collect(),
            edges: self.edges.iter().map(|(a, b)| (f(a), f(b))).collect(),
        }
    }

    fn extend(&mut self, other: Labels) {
        self.vertices.extend(other.vertices);
        self.edges.extend(other.edges);
    }

    /// Adds the root position and a move from it to `to`.
    fn rooted(mut self, n: usize, to: Label) -> Labels {
        let root = vec![Position::Dagger; n];
        self.vertices.insert(root.clone());
        self.edges.insert((root, to));
        self
    }
}

/// Positions of an environment game reached by a position of an atom.
fn env_vertex(env_game: &AsyncGame, p: &Position) -> usize {
    match p {
        Position::Atom { label, .. } => env_game.vertex_id_by_name(label).expect("atom label from the environment"),
        _ => env_game.initial(),
    }
}

/// Copy-cat on `⊢ A, B` with `A`, `B` dual atoms: Opponent moves are free;
/// a Proponent move may only reach what the other copy already reached.
fn copycat(conclusion: &[Formula], env: &VarEnv) -> Result<Labels, StrategyError> {
    let game = game_of_sequent(conclusion, env)?;
    let var = conclusion[0].atom_name().expect("atomic axiom").to_string();
    let base = env.get(&var).ok_or(GameError::UnboundVariable(var))?;
    let reach = base.reachability();
    let mut out = Labels::default();
    let mut seen = BTreeSet::from([game.initial()]);
    let mut queue = VecDeque::from([game.initial()]);
    while let Some(v) = queue.pop_front() {
        let here = tuple_of(game.vertex(v));
        out.vertices.insert(here.clone());
        for &e in game.outgoing(v) {
            let t = game.transition(e);
            let there = tuple_of(game.vertex(t.dst));
            let ok = match t.polarity {
                Polarity::Opponent => true,
                Polarity::Proponent => {
                    let k = if here[0] != there[0] { 0 } else { 1 };
                    let moved = env_vertex(base, &there[k]);
                    let other = env_vertex(base, &here[1 - k]);
                    reach[moved][other]
                }
            };
            if ok {
                out.edges.insert((here.clone(), there));
                if seen.insert(t.dst) {
                    queue.push_back(t.dst);
                }
            }
        }
    }
    Ok(out)
}

fn interpret_labels(p: &Proof, env: &VarEnv) -> Result<Labels, StrategyError> {
    let n = p.conclusion.len();
    let i = p.rule.principal();
    let splice = |sub: &Label, width: usize, f: &dyn Fn(&[Position]) -> Position| -> Label {
        let mut out = sub[..i].to_vec();
        out.push(f(&sub[i..i + width]));
        out.extend_from_slice(&sub[i + width..]);
        out
    };
    let mut root = vec![Position::Dagger; n];
    match &p.rule {
        Rule::Ax(..) => copycat(&p.conclusion, env),
        Rule::Par(_) => {
            let body = interpret_labels(&p.premises[0], env)?;
            let wrap = |l: &Label| splice(l, 2, &|xs| Position::par(xs[0].clone(), xs[1].clone()));
            root[i] = Position::par(Position::Dagger, Position::Dagger);
            Ok(body.map(wrap).rooted(n, root))
        }
        Rule::PlusL(_) | Rule::PlusR(_) => {
            let left = matches!(p.rule, Rule::PlusL(_));
            let body = interpret_labels(&p.premises[0], env)?;
            let inj = |x: Position| {
                if left {
                    Position::PlusL(Box::new(x))
                } else {
                    Position::PlusR(Box::new(x))
                }
            };
            root[i] = inj(Position::Dagger);
            Ok(body.map(|l| splice(l, 1, &|xs| inj(xs[0].clone()))).rooted(n, root))
        }
        Rule::With(_) => {
            let l = interpret_labels(&p.premises[0], env)?;
            let r = interpret_labels(&p.premises[1], env)?;
            let mut out = l.map(|x| splice(x, 1, &|xs| Position::WithL(Box::new(xs[0].clone()))));
            out.extend(r.map(|x| splice(x, 1, &|xs| Position::WithR(Box::new(xs[0].clone())))));
            let mut rl = root.clone();
            rl[i] = Position::WithL(Box::new(Position::Dagger));
            root[i] = Position::WithR(Box::new(Position::Dagger));
            Ok(out.rooted(n, rl).rooted(n, root))
        }
        Rule::Tensor(_, left) => {
            let l = interpret_labels(&p.premises[0], env)?;
            let r = interpret_labels(&p.premises[1], env)?;
            let (li, ri) = tensor_sides(n, i, left);
            let join = |a: &Label, b: &Label| -> Label {
                (0..n)
                    .map(|k| {
                        if k == i {
                            let pa = li.iter().position(|&x| x == i).unwrap();
                            let pb = ri.iter().position(|&x| x == i).unwrap();
                            Position::tensor(a[pa].clone(), b[pb].clone())
                        } else if let Some(pa) = li.iter().position(|&x| x == k) {
                            a[pa].clone()
                        } else {
                            b[ri.iter().position(|&x| x == k).unwrap()].clone()
                        }
                    })
                    .collect()
            };
            let mut out = Labels::default();
            for a in &l.vertices {
                for b in &r.vertices {
                    out.vertices.insert(join(a, b));
                }
            }
            for (a1, a2) in &l.edges {
                for b in &r.vertices {
                    out.edges.insert((join(a1, b), join(a2, b)));
                }
            }
            for (b1, b2) in &r.edges {
                for a in &l.vertices {
                    out.edges.insert((join(a, b1), join(a, b2)));
                }
            }
            root[i] = Position::tensor(Position::Dagger, Position::Dagger);
            Ok(out.rooted(n, root))
        }
    }
}

/// The strategy interpreting a proof, on the game of its conclusion.
pub fn interpret(p: &Proof, env: &VarEnv) -> Result<Strategy, StrategyError> {
    check_proof(p)?;
    let game = Arc::new(game_of_sequent(&p.conclusion, env)?);
    let labels = interpret_labels(p, env)?;
    let id = |l: &Label| {
        game.vertex_id(&vertex_of(l))
            .unwrap_or_else(|| panic!("interpretation left the game at {}", vertex_of(l)))
    };
    let edges: BTreeSet<usize> = labels
        .edges
        .iter()
        .map(|(a, b)| game.edge_id(id(a), id(b)).expect("interpretation uses game transitions"))
        .collect();
    let vertices: BTreeSet<usize> = labels.vertices.iter().map(id).collect();
    Strategy::new(game, vertices, edges)
}

/// The least courteous strategy containing `s`.
pub fn deseq(s: &Strategy) -> Strategy {
    let g = &s.game;
    let mut edges = s.edges.clone();
    loop {
        let mut added = false;
        for tile in g.tiles() {
            for ((m, p), (n, q)) in tile.orientations() {
                if edges.contains(&m)
                    && edges.contains(&p)
                    && (g.polarity(m) == Polarity::Proponent || g.polarity(p) == Polarity::Opponent)
                {
                    added |= edges.insert(n);
                    added |= edges.insert(q);
                }
            }
        }
        if !added {
            break;
        }
    }
    Strategy::from_edges(g.clone(), edges)
}

/// Outcome of each property check; `None` means the property holds, and
/// otherwise the string describes a witness.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropertyReport {
    pub positional: Option<String>,
    pub deterministic: Option<String>,
    pub receptive: Option<String>,
    pub total: Option<String>,
    pub courteous: Option<String>,
    pub cube: Option<String>,
    pub scheduling: Option<String>,
}

impl PropertyReport {
    pub fn entries(&self) -> [(&'static str, &Option<String>); 7] {
        [
            ("positional", &self.positional),
            ("deterministic", &self.deterministic),
            ("receptive", &self.receptive),
            ("total", &self.total),
            ("courteous", &self.courteous),
            ("cube", &self.cube),
            ("scheduling", &self.scheduling),
        ]
    }

    /// Positional, deterministic, receptive, total, courteous and cube.
    pub fn ingenuous(&self) -> bool {
        self.entries()[..6].iter().all(|(_, w)| w.is_none())
    }

    pub fn all_hold(&self) -> bool {
        self.entries().iter().all(|(_, w)| w.is_none())
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, w) in self.entries() {
            match w {
                None => writeln!(f, "{name}: yes")?,
                Some(w) => writeln!(f, "{name}: no ({w})")?,
            }
        }
        Ok(())
    }
}

fn show_edge(g: &AsyncGame, e: usize) -> String {
    let t = g.transition(e);
    format!(
        "{} -{}-> {}",
        g.vertex(t.src).pretty(),
        t.polarity.letter(),
        g.vertex(t.dst).pretty()
    )
}

fn check_positional(s: &Strategy) -> Option<String> {
    Strategy::new(s.game.clone(), s.vertices.clone(), s.edges.clone())
        .err()
        .map(|e| e.to_string())
}

fn check_deterministic(s: &Strategy) -> Option<String> {
    let g = &s.game;
    for &x in &s.vertices {
        let here: Vec<usize> = g.outgoing(x).iter().copied().filter(|e| s.edges.contains(e)).collect();
        for &m in &here {
            if g.polarity(m) != Polarity::Proponent {
                continue;
            }
            for &n in &here {
                if n == m {
                    continue;
                }
                match g.residual(m, n) {
                    Some(q) if s.edges.contains(&q) => {}
                    _ => {
                        return Some(format!(
                            "Proponent {} has no residual in the strategy after {}",
                            show_edge(g, m),
                            show_edge(g, n)
                        ))
                    }
                }
            }
        }
    }
    None
}

fn check_receptive(s: &Strategy) -> Option<String> {
    let g = &s.game;
    for &x in &s.vertices {
        for &e in g.outgoing(x) {
            if g.polarity(e) == Polarity::Opponent && !s.edges.contains(&e) {
                return Some(format!("Opponent move {} is refused", show_edge(g, e)));
            }
        }
    }
    None
}

fn check_total(s: &Strategy) -> Option<String> {
    let g = &s.game;
    for &x in &s.vertices {
        let out = g.outgoing(x);
        if out.is_empty() || out.iter().any(|&e| g.polarity(e) == Polarity::Opponent) {
            continue;
        }
        if !out.iter().any(|e| s.edges.contains(e)) {
            return Some(format!("no Proponent answer at {}", g.vertex(x).pretty()));
        }
    }
    None
}

fn check_courteous(s: &Strategy) -> Option<String> {
    let g = &s.game;
    for tile in g.tiles() {
        for ((m, p), (n, q)) in tile.orientations() {
            if s.edges.contains(&m)
                && s.edges.contains(&p)
                && (g.polarity(m) == Polarity::Proponent || g.polarity(p) == Polarity::Opponent)
                && !(s.edges.contains(&n) && s.edges.contains(&q))
            {
                return Some(format!(
                    "{} then {} is played but not {} then {}",
                    show_edge(g, m),
                    show_edge(g, p),
                    show_edge(g, n),
                    show_edge(g, q)
                ));
            }
        }
    }
    None
}

/// The four transitions of the square spanned by coinitial `a` and `b`.
fn square(g: &AsyncGame, a: usize, b: usize) -> Option<[usize; 4]> {
    Some([a, b, g.residual(a, b)?, g.residual(b, a)?])
}

fn check_cube(s: &Strategy) -> Option<String> {
    let g = &s.game;
    let has = |face: &[usize; 4]| face.iter().all(|e| s.edges.contains(e));
    for x in 0..g.vertex_count() {
        let out = g.outgoing(x);
        for (ia, &a) in out.iter().enumerate() {
            for (ib, &b) in out.iter().enumerate().skip(ia + 1) {
                for &c in out.iter().skip(ib + 1) {
                    let lower = [square(g, a, b), square(g, a, c), square(g, b, c)];
                    let upper = (|| {
                        let (ba, ca) = (g.residual(b, a)?, g.residual(c, a)?);
                        let (ab, cb) = (g.residual(a, b)?, g.residual(c, b)?);
                        let (ac, bc) = (g.residual(a, c)?, g.residual(b, c)?);
                        Some([square(g, ba, ca)?, square(g, ab, cb)?, square(g, ac, bc)?])
                    })();
                    let (Some(lo0), Some(lo1), Some(lo2), Some(up)) = (lower[0], lower[1], lower[2], upper) else {
                        continue;
                    };
                    let lo = [lo0, lo1, lo2];
                    let name = || {
                        format!(
                            "cube at {} on {}, {}, {}",
                            g.vertex(x).pretty(),
                            show_edge(g, a),
                            show_edge(g, b),
                            show_edge(g, c)
                        )
                    };
                    if lo.iter().all(has) && !up.iter().all(has) {
                        return Some(format!("{}: lower faces played, upper faces missing", name()));
                    }
                    if s.vertices.contains(&x) && up.iter().all(has) && !lo.iter().all(has) {
                        return Some(format!("{}: upper faces played, lower faces missing", name()));
                    }
                }
            }
        }
    }
    check_stable(s)
}

/// A move played after each of two independent moves that span a face of
/// the strategy is already played before them.
fn check_stable(s: &Strategy) -> Option<String> {
    let g = &s.game;
    for &x in &s.vertices {
        let out = g.outgoing(x);
        for (ia, &a) in out.iter().enumerate() {
            for &b in out.iter().skip(ia + 1) {
                let Some(face) = square(g, a, b) else { continue };
                if !face.iter().all(|e| s.edges.contains(e)) {
                    continue;
                }
                for &c in out {
                    if c == a || c == b || s.edges.contains(&c) {
                        continue;
                    }
                    let (Some(ca), Some(cb)) = (g.residual(c, a), g.residual(c, b)) else {
                        continue;
                    };
                    if s.edges.contains(&ca) && s.edges.contains(&cb) {
                        return Some(format!(
                            "{} is played after {} and after {} but not before them",
                            show_edge(g, c),
                            show_edge(g, a),
                            show_edge(g, b)
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Addresses of the tensor subformulas of a sequent.
fn tensor_addresses(fs: &[Formula]) -> Vec<Addr> {
    fn go(f: &Formula, a: Addr, out: &mut Vec<Addr>) {
        if let Formula::Tensor(..) = f {
            out.push(a.clone());
        }
        if let Some((l, r)) = f.children() {
            go(l, a.left(), out);
            go(r, a.right(), out);
        }
    }
    let mut out = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        go(f, Addr::root(i), &mut out);
    }
    out
}

fn check_scheduling(s: &Strategy) -> Option<String> {
    let g = &s.game;
    let fs = g.formulas()?;
    let ev = events(g);
    let played: Vec<usize> = s.edges.iter().copied().collect();
    let addr: Vec<Option<Addr>> = played.iter().map(|&e| g.move_address(e)).collect();
    let reach: std::collections::HashMap<usize, BTreeSet<usize>> =
        s.vertices.iter().map(|&v| (v, s.reachable_from(v))).collect();
    // `a` strictly before `b` in some play of the strategy
    let before = |a: usize, b: usize| reach[&g.transition(a).dst].contains(&g.transition(b).src);
    for t in tensor_addresses(&fs) {
        let (tl, tr) = (t.left(), t.right());
        let under = |k: usize, side: &Addr| addr[k].as_ref().is_some_and(|x| side.is_prefix_of(x));
        let lefts: Vec<usize> = (0..played.len()).filter(|&k| under(k, &tl)).collect();
        let rights: Vec<usize> = (0..played.len()).filter(|&k| under(k, &tr)).collect();
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &i in &lefts {
            for &j in &rights {
                pairs.insert((ev[played[i]], ev[played[j]]));
            }
        }
        for (ea, eb) in pairs {
            let xs: Vec<usize> = lefts.iter().map(|&k| played[k]).filter(|&e| ev[e] == ea).collect();
            let ys: Vec<usize> = rights.iter().map(|&k| played[k]).filter(|&e| ev[e] == eb).collect();
            let ab = xs.iter().find_map(|&x| ys.iter().find(|&&y| before(x, y)).map(|&y| (x, y)));
            let ba = ys.iter().find_map(|&y| xs.iter().find(|&&x| before(y, x)).map(|&x| (y, x)));
            let witness = match (ab, ba) {
                (Some((x, y)), None) | (None, Some((y, x))) if ab.is_some() => Some((x, y)),
                (None, Some((y, x))) => Some((y, x)),
                _ => None,
            };
            if let Some((first, then)) = witness {
                return Some(format!(
                    "under the tensor at {t}, {} always comes after {}",
                    show_edge(g, then),
                    show_edge(g, first)
                ));
            }
        }
    }
    None
}

pub fn check_properties(s: &Strategy) -> PropertyReport {
    PropertyReport {
        positional: check_positional(s),
        deterministic: check_deterministic(s),
        receptive: check_receptive(s),
        total: check_total(s),
        courteous: check_courteous(s),
        cube: check_cube(s),
        scheduling: check_scheduling(s),
    }
}
