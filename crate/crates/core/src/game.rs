//! Asynchronous games: graphs with tiles, polarities and an initial position.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{Addr, Formula, Lexer, ParseError, Position, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Opponent,
    Proponent,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Opponent => Polarity::Proponent,
            Polarity::Proponent => Polarity::Opponent,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Polarity::Opponent => "O",
            Polarity::Proponent => "P",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("empty sequent")]
    EmptySequent,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("no transition {0} -> {1}")]
    UnknownTransition(String, String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Vertex labels. Formula games use positions, products use tuples, and
/// hand-built or variable games may use plain names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Pos(Position),
    Tuple(Vec<Vertex>),
    Name(String),
}

impl Vertex {
    pub fn pretty(&self) -> String {
        match self {
            Vertex::Pos(p) => p.pretty(),
            Vertex::Tuple(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| v.pretty()).collect();
                parts.join(", ")
            }
            Vertex::Name(n) => n.clone(),
        }
    }

    pub fn as_position(&self) -> Option<&Position> {
        match self {
            Vertex::Pos(p) => Some(p),
            _ => None,
        }
    }

    pub fn components(&self) -> Option<&[Vertex]> {
        match self {
            Vertex::Tuple(vs) => Some(vs),
            _ => None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Pos(p) => write!(f, "{p}"),
            Vertex::Tuple(vs) => {
                write!(f, "[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Vertex::Name(n) => write!(f, "{n}"),
        }
    }
}

impl std::str::FromStr for Vertex {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lexer = Lexer::new(s);
        let v = lexer.vertex()?;
        lexer.expect_end()?;
        Ok(v)
    }
}

impl<'a> Lexer<'a> {
    fn vertex(&mut self) -> Result<Vertex, ParseError> {
        if self.eat("[") {
            let mut vs = Vec::new();
            if !self.eat("]") {
                vs.push(self.vertex()?);
                while self.eat(",") {
                    vs.push(self.vertex()?);
                }
                self.expect("]")?;
            }
            return Ok(Vertex::Tuple(vs));
        }
        let save = self.pos;
        match self.position() {
            Ok(p) => Ok(Vertex::Pos(p)),
            Err(_) => {
                self.pos = save;
                Ok(Vertex::Name(self.word()?.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: usize,
    pub dst: usize,
    pub polarity: Polarity,
}

/// A tile `m·p ∼ n·q`, stored with `(m, p) < (n, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

impl Tile {
    pub fn new(a: (usize, usize), b: (usize, usize)) -> Tile {
        if a <= b {
            Tile { first: a, second: b }
        } else {
            Tile { first: b, second: a }
        }
    }

    /// Both orientations `(m·p, n·q)` and `(n·q, m·p)`.
    pub fn orientations(&self) -> [((usize, usize), (usize, usize)); 2] {
        [(self.first, self.second), (self.second, self.first)]
    }
}

/// What a game was built from; used to attribute moves to subformulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Plain,
    Formula(Formula),
    Sequent(Vec<Formula>),
}

#[derive(Debug, Clone)]
pub struct AsyncGame {
    vertices: Vec<Vertex>,
    initial: usize,
    transitions: Vec<Transition>,
    tiles: Vec<Tile>,
    shape: Shape,
    vertex_index: HashMap<Vertex, usize>,
    edge_index: HashMap<(usize, usize), usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    partners: HashMap<(usize, usize), Vec<(usize, usize)>>,
}

impl PartialEq for AsyncGame {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.initial == other.initial
            && self.transitions == other.transitions
            && self.tiles == other.tiles
    }
}

impl Eq for AsyncGame {}

impl AsyncGame {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, e: usize) -> Transition {
        self.transitions[e]
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn polarity(&self, e: usize) -> Polarity {
        self.transitions[e].polarity
    }

    pub fn vertex_id(&self, v: &Vertex) -> Option<usize> {
        self.vertex_index.get(v).copied()
    }

    pub fn vertex_id_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.to_string() == name)
    }

    pub fn edge_id(&self, src: usize, dst: usize) -> Option<usize> {
        self.edge_index.get(&(src, dst)).copied()
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    /// Paths `n·q` tiled with `m·p`.
    pub fn tile_partners(&self, m: usize, p: usize) -> &[(usize, usize)] {
        self.partners.get(&(m, p)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The residual of `m` after `n` (coinitial), if some tile relates them.
    pub fn residual(&self, m: usize, n: usize) -> Option<usize> {
        let t = self.transitions[m];
        for &p in &self.outgoing[t.dst] {
            for &(n2, q) in self.tile_partners(m, p) {
                if n2 == n {
                    return Some(q);
                }
            }
        }
        None
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.outgoing[v].is_empty()
    }

    pub fn with_shape(mut self, shape: Shape) -> AsyncGame {
        self.shape = shape;
        self
    }

    /// Reflexive-transitive reachability as one boolean row per vertex.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut reach = vec![vec![false; n]; n];
        for v in self.topological_order().into_iter().rev() {
            reach[v][v] = true;
            for &e in &self.outgoing[v] {
                let w = self.transitions[e].dst;
                for u in 0..n {
                    if reach[w][u] {
                        reach[v][u] = true;
                    }
                }
            }
        }
        reach
    }

    /// Kahn order; vertices on cycles are omitted.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.incoming[v].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            order.push(v);
            for &e in &self.outgoing[v] {
                let w = self.transitions[e].dst;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        order
    }

    /// The address of the subformula occurrence explored by transition `e`.
    /// Only defined for formula and sequent games.
    pub fn move_address(&self, e: usize) -> Option<Addr> {
        let t = self.transitions[e];
        let (src, dst) = (&self.vertices[t.src], &self.vertices[t.dst]);
        match (&self.shape, src, dst) {
            (Shape::Formula(_), Vertex::Pos(p), Vertex::Pos(q)) => {
                let mut path = Vec::new();
                diff_position(p, q, &mut path).then_some(Addr { root: 0, path })
            }
            (Shape::Sequent(_), Vertex::Tuple(ps), Vertex::Tuple(qs)) => {
                let k = (0..ps.len()).find(|&k| ps[k] != qs[k])?;
                let (p, q) = (ps[k].as_position()?, qs[k].as_position()?);
                let mut path = Vec::new();
                diff_position(p, q, &mut path).then_some(Addr { root: k, path })
            }
            _ => None,
        }
    }

    pub fn formulas(&self) -> Option<Vec<Formula>> {
        match &self.shape {
            Shape::Plain => None,
            Shape::Formula(f) => Some(vec![f.clone()]),
            Shape::Sequent(fs) => Some(fs.clone()),
        }
    }
}

fn diff_position(p: &Position, q: &Position, path: &mut Vec<Side>) -> bool {
    use Position::*;
    match (p, q) {
        (Dagger, _) => true,
        (Par(a, b), Par(c, d)) | (Tensor(a, b), Tensor(c, d)) => {
            if a != c {
                path.push(Side::L);
                diff_position(a, c, path)
            } else {
                path.push(Side::R);
                diff_position(b, d, path)
            }
        }
        (WithL(a), WithL(c)) | (PlusL(a), PlusL(c)) => {
            path.push(Side::L);
            diff_position(a, c, path)
        }
        (WithR(a), WithR(c)) | (PlusR(a), PlusR(c)) => {
            path.push(Side::R);
            diff_position(a, c, path)
        }
        (Atom { .. }, Atom { .. }) => true,
        _ => false,
    }
}

/// Incremental construction by vertex label. `build` sorts vertices and
/// transitions so that structurally equal games compare equal.
#[derive(Debug, Default, Clone)]
pub struct GameBuilder {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    transitions: Vec<Transition>,
    edge_index: HashMap<(usize, usize), usize>,
    tiles: Vec<[usize; 4]>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, v: Vertex) -> usize {
        if let Some(&id) = self.index.get(&v) {
            return id;
        }
        let id = self.vertices.len();
        self.index.insert(v.clone(), id);
        self.vertices.push(v);
        id
    }

    /// Adds a transition. Repeated pairs are kept, so that malformed graphs
    /// can be built and then diagnosed.
    pub fn transition(&mut self, src: usize, dst: usize, polarity: Polarity) -> usize {
        let id = self.transitions.len();
        self.transitions.push(Transition { src, dst, polarity });
        self.edge_index.entry((src, dst)).or_insert(id);
        id
    }

    pub fn edge(&self, src: usize, dst: usize) -> Option<usize> {
        self.edge_index.get(&(src, dst)).copied()
    }

    pub fn tile(&mut self, m: usize, p: usize, n: usize, q: usize) {
        self.tiles.push([m, p, n, q]);
    }

    pub fn build(self, initial: usize, shape: Shape) -> AsyncGame {
        let mut vorder: Vec<usize> = (0..self.vertices.len()).collect();
        vorder.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        let mut vmap = vec![0; self.vertices.len()];
        for (new, &old) in vorder.iter().enumerate() {
            vmap[old] = new;
        }
        let vertices: Vec<Vertex> = vorder.iter().map(|&o| self.vertices[o].clone()).collect();

        let mut eorder: Vec<usize> = (0..self.transitions.len()).collect();
        let key = |e: usize| {
            let t = self.transitions[e];
            (vmap[t.src], vmap[t.dst], t.polarity, e)
        };
        eorder.sort_by_key(|&e| key(e));
        let mut emap = vec![0; self.transitions.len()];
        for (new, &old) in eorder.iter().enumerate() {
            emap[old] = new;
        }
        let transitions: Vec<Transition> = eorder
            .iter()
            .map(|&o| {
                let t = self.transitions[o];
                Transition {
                    src: vmap[t.src],
                    dst: vmap[t.dst],
                    polarity: t.polarity,
                }
            })
            .collect();

        let mut tiles: Vec<Tile> = self
            .tiles
            .iter()
            .map(|[m, p, n, q]| Tile::new((emap[*m], emap[*p]), (emap[*n], emap[*q])))
            .collect();
        tiles.sort();
        tiles.dedup();

        AsyncGame::assemble(vertices, vmap[initial], transitions, tiles, shape)
    }
}

impl AsyncGame {
    fn assemble(
        vertices: Vec<Vertex>,
        initial: usize,
        transitions: Vec<Transition>,
        tiles: Vec<Tile>,
        shape: Shape,
    ) -> AsyncGame {
        let n = vertices.len();
        let vertex_index = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edge_index = HashMap::new();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (e, t) in transitions.iter().enumerate() {
            edge_index.entry((t.src, t.dst)).or_insert(e);
            outgoing[t.src].push(e);
            incoming[t.dst].push(e);
        }
        let mut partners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for tile in &tiles {
            for (a, b) in tile.orientations() {
                partners.entry(a).or_default().push(b);
            }
        }
        AsyncGame {
            vertices,
            initial,
            transitions,
            tiles,
            shape,
            vertex_index,
            edge_index,
            outgoing,
            incoming,
            partners,
        }
    }

    /// Copies every vertex, transition and tile of `self` into `b`,
    /// relabelling vertices; returns the vertex and transition maps.
    fn copy_into(
        &self,
        b: &mut GameBuilder,
        relabel: impl Fn(&Vertex) -> Vertex,
        flip: bool,
    ) -> (Vec<usize>, Vec<usize>) {
        let vmap: Vec<usize> = self.vertices.iter().map(|v| b.vertex(relabel(v))).collect();
        let emap: Vec<usize> = self
            .transitions
            .iter()
            .map(|t| {
                let pol = if flip { t.polarity.flip() } else { t.polarity };
                b.transition(vmap[t.src], vmap[t.dst], pol)
            })
            .collect();
        for tile in &self.tiles {
            let ((m, p), (n, q)) = (tile.first, tile.second);
            b.tile(emap[m], emap[p], emap[n], emap[q]);
        }
        (vmap, emap)
    }

    pub fn relabel(&self, relabel: impl Fn(&Vertex) -> Vertex, shape: Shape) -> AsyncGame {
        let mut b = GameBuilder::new();
        let (vmap, _) = self.copy_into(&mut b, relabel, false);
        b.build(vmap[self.initial], shape)
    }
}

/// The game `† → label` with one transition of the given polarity.
pub fn atomic_game(label: &str, polarity: Polarity) -> AsyncGame {
    let mut b = GameBuilder::new();
    let root = b.vertex(Vertex::Pos(Position::Dagger));
    let top = b.vertex(Vertex::Name(label.to_string()));
    b.transition(root, top, polarity);
    b.build(root, Shape::Plain)
}

/// The one-vertex game, unit of the product.
pub fn unit_game() -> AsyncGame {
    let mut b = GameBuilder::new();
    let root = b.vertex(Vertex::Pos(Position::Dagger));
    b.build(root, Shape::Plain)
}

/// Same graph with every polarity swapped.
pub fn invert(g: &AsyncGame) -> AsyncGame {
    let mut b = GameBuilder::new();
    let (vmap, _) = g.copy_into(&mut b, |v| v.clone(), true);
    b.build(vmap[g.initial], Shape::Plain)
}

/// Binary asynchronous product; vertices are pairs.
pub fn product(g: &AsyncGame, h: &AsyncGame) -> AsyncGame {
    product_many(&[g, h], Shape::Plain)
}

/// N-ary asynchronous product with tuple vertices: every component keeps
/// its own tiles, and any two moves in distinct components tile.
pub fn product_many(games: &[&AsyncGame], shape: Shape) -> AsyncGame {
    let mut b = GameBuilder::new();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for g in games {
        let mut next = Vec::with_capacity(tuples.len() * g.vertex_count());
        for t in &tuples {
            for v in 0..g.vertex_count() {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let label = |t: &[usize]| Vertex::Tuple(t.iter().zip(games).map(|(&v, g)| g.vertex(v).clone()).collect());
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    for t in &tuples {
        ids.insert(t.clone(), b.vertex(label(t)));
    }
    // transitions, keyed by (component, component transition, tuple source)
    let mut edge_of: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    for t in &tuples {
        for (k, g) in games.iter().enumerate() {
            for &e in g.outgoing(t[k]) {
                let tr = g.transition(e);
                let mut dst = t.clone();
                dst[k] = tr.dst;
                let id = b.transition(ids[t], ids[&dst], tr.polarity);
                edge_of.insert((k, e, t.clone()), id);
            }
        }
    }
    for t in &tuples {
        for (k, g) in games.iter().enumerate() {
            // component tiles lifted at this context
            for tile in g.tiles() {
                let ((m, p), (n, q)) = (tile.first, tile.second);
                if g.transition(m).src != t[k] {
                    continue;
                }
                let lift = |e: usize, b: &HashMap<(usize, usize, Vec<usize>), usize>| {
                    let mut src = t.clone();
                    src[k] = g.transition(e).src;
                    b.get(&(k, e, src)).copied()
                };
                if let (Some(m2), Some(p2), Some(n2), Some(q2)) =
                    (lift(m, &edge_of), lift(p, &edge_of), lift(n, &edge_of), lift(q, &edge_of))
                {
                    b.tile(m2, p2, n2, q2);
                }
            }
            // mixed squares with a later component
            for (j, h) in games.iter().enumerate().skip(k + 1) {
                for &m in g.outgoing(t[k]) {
                    for &n in h.outgoing(t[j]) {
                        let mut after_m = t.clone();
                        after_m[k] = g.transition(m).dst;
                        let mut after_n = t.clone();
                        after_n[j] = h.transition(n).dst;
                        let m2 = edge_of[&(k, m, t.clone())];
                        let p2 = edge_of[&(j, n, after_m)];
                        let n2 = edge_of[&(j, n, t.clone())];
                        let q2 = edge_of[&(k, m, after_n)];
                        b.tile(m2, p2, n2, q2);
                    }
                }
            }
        }
    }
    let init: Vec<usize> = games.iter().map(|g| g.initial()).collect();
    b.build(ids[&init], shape)
}

/// Interpretation of free variables by games.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarEnv {
    games: BTreeMap<String, Arc<AsyncGame>>,
}

impl VarEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Each variable `X` interpreted by `† → x` with a Proponent move.
    pub fn atomic<'a>(names: impl IntoIterator<Item = &'a str>) -> VarEnv {
        let mut env = VarEnv::new();
        for n in names {
            env.insert(n, atomic_game(&n.to_lowercase(), Polarity::Proponent));
        }
        env
    }

    /// Atomic interpretation for every variable of the given formulas.
    pub fn atomic_for(fs: &[Formula]) -> VarEnv {
        let mut names = std::collections::BTreeSet::new();
        for f in fs {
            names.extend(f.variables());
        }
        VarEnv::atomic(names.iter().map(String::as_str))
    }

    pub fn insert(&mut self, name: &str, game: AsyncGame) {
        self.games.insert(name.to_string(), Arc::new(game));
    }

    pub fn get(&self, name: &str) -> Option<&AsyncGame> {
        self.games.get(name).map(|g| g.as_ref())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.games.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &AsyncGame)> {
        self.games.iter().map(|(k, v)| (k, v.as_ref()))
    }

    /// Extends with atomic Proponent games for any variable of `fs` not yet bound.
    pub fn completed_for(&self, fs: &[Formula]) -> VarEnv {
        let mut env = self.clone();
        for f in fs {
            for x in f.variables() {
                if !env.contains(&x) {
                    env.insert(&x, atomic_game(&x.to_lowercase(), Polarity::Proponent));
                }
            }
        }
        env
    }
}

fn unwrap_pos(v: &Vertex) -> Position {
    match v {
        Vertex::Pos(p) => p.clone(),
        Vertex::Tuple(vs) if vs.len() == 1 => unwrap_pos(&vs[0]),
        other => panic!("formula game vertex is not a position: {other}"),
    }
}

/// The game `G_A` whose vertices are the valid positions of `f`.
pub fn game_of_formula(f: &Formula, env: &VarEnv) -> Result<AsyncGame, GameError> {
    let g = formula_game(f, env)?;
    Ok(g.with_shape(Shape::Formula(f.clone())))
}

fn formula_game(f: &Formula, env: &VarEnv) -> Result<AsyncGame, GameError> {
    match f {
        Formula::Var(x) | Formula::CoVar(x) => {
            let base = env.get(x).ok_or_else(|| GameError::UnboundVariable(x.clone()))?;
            let negated = matches!(f, Formula::CoVar(_));
            let init = base.vertex(base.initial()).clone();
            let relabel = |v: &Vertex| {
                if *v == init {
                    Vertex::Pos(Position::Dagger)
                } else {
                    Vertex::Pos(Position::atom(x, &v.to_string(), negated))
                }
            };
            let mut b = GameBuilder::new();
            let (vmap, _) = base.copy_into(&mut b, relabel, negated);
            Ok(b.build(vmap[base.initial()], Shape::Plain))
        }
        Formula::Par(l, r) | Formula::Tensor(l, r) => {
            let par = matches!(f, Formula::Par(..));
            let gl = formula_game(l, env)?;
            let gr = formula_game(r, env)?;
            let prod = product_many(&[&gl, &gr], Shape::Plain);
            let mut b = GameBuilder::new();
            let (vmap, _) = prod.copy_into(
                &mut b,
                |v| {
                    let cs = v.components().unwrap();
                    let (p, q) = (unwrap_pos(&cs[0]), unwrap_pos(&cs[1]));
                    Vertex::Pos(if par { Position::par(p, q) } else { Position::tensor(p, q) })
                },
                false,
            );
            let root = b.vertex(Vertex::Pos(Position::Dagger));
            let pol = if par { Polarity::Opponent } else { Polarity::Proponent };
            b.transition(root, vmap[prod.initial()], pol);
            Ok(b.build(root, Shape::Plain))
        }
        Formula::With(l, r) | Formula::Plus(l, r) => {
            let with = matches!(f, Formula::With(..));
            let gl = formula_game(l, env)?;
            let gr = formula_game(r, env)?;
            let mut b = GameBuilder::new();
            let (lmap, _) = gl.copy_into(
                &mut b,
                |v| {
                    let p = Box::new(unwrap_pos(v));
                    Vertex::Pos(if with { Position::WithL(p) } else { Position::PlusL(p) })
                },
                false,
            );
            let (rmap, _) = gr.copy_into(
                &mut b,
                |v| {
                    let p = Box::new(unwrap_pos(v));
                    Vertex::Pos(if with { Position::WithR(p) } else { Position::PlusR(p) })
                },
                false,
            );
            let root = b.vertex(Vertex::Pos(Position::Dagger));
            let pol = if with { Polarity::Opponent } else { Polarity::Proponent };
            b.transition(root, lmap[gl.initial()], pol);
            b.transition(root, rmap[gr.initial()], pol);
            Ok(b.build(root, Shape::Plain))
        }
    }
}

/// Product of the formula games of a sequent, without a root move; vertices
/// are tuples of positions.
pub fn game_of_sequent(fs: &[Formula], env: &VarEnv) -> Result<AsyncGame, GameError> {
    if fs.is_empty() {
        return Err(GameError::EmptySequent);
    }
    let games = fs
        .iter()
        .map(|f| formula_game(f, env))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&AsyncGame> = games.iter().collect();
    Ok(product_many(&refs, Shape::Sequent(fs.to_vec())))
}
