//! JSON and DOT views of games, strategies, environments and closure
//! strategies, and the strategy file format read by the command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concurrent::{ClosureStrategy, PositionLattice};
use crate::formula::{format_sequent, parse_sequent, ParseError};
use crate::game::{atomic_game, game_of_sequent, AsyncGame, GameBuilder, GameError, Polarity, Shape, VarEnv, Vertex};
use crate::homotopy::Path;
use crate::proof::{parse_proof, ProofError};
use crate::strategy::{deseq, interpret, Strategy, StrategyError};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("no transition from {0} to {1}")]
    UnknownTransition(String, String),
    #[error("bad polarity {0:?}, expected \"O\" or \"P\"")]
    BadPolarity(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TransitionDoc {
    pub src: String,
    pub dst: String,
    pub polarity: String,
}

/// A game as lists of vertex labels; a tile is given by its two paths of
/// three vertices.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GameDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequent: Option<String>,
    pub initial: String,
    pub vertices: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub tiles: Vec<[[String; 3]; 2]>,
}

fn polarity_of(text: &str) -> Result<Polarity, ExportError> {
    match text {
        "O" => Ok(Polarity::Opponent),
        "P" => Ok(Polarity::Proponent),
        other => Err(ExportError::BadPolarity(other.to_string())),
    }
}

pub fn game_doc(g: &AsyncGame) -> GameDoc {
    let name = |v: usize| g.vertex(v).to_string();
    let path = |(m, p): (usize, usize)| {
        let (a, b) = (g.transition(m), g.transition(p));
        [name(a.src), name(a.dst), name(b.dst)]
    };
    GameDoc {
        sequent: match g.shape() {
            Shape::Plain => None,
            Shape::Formula(f) => Some(f.to_string()),
            Shape::Sequent(fs) => Some(format_sequent(fs)),
        },
        initial: name(g.initial()),
        vertices: (0..g.vertex_count()).map(name).collect(),
        transitions: g
            .transitions()
            .iter()
            .map(|t| TransitionDoc {
                src: name(t.src),
                dst: name(t.dst),
                polarity: t.polarity.letter().to_string(),
            })
            .collect(),
        tiles: g.tiles().iter().map(|t| [path(t.first), path(t.second)]).collect(),
    }
}

/// Rebuilds a plain game; the `sequent` field is ignored.
pub fn game_from_doc(doc: &GameDoc) -> Result<AsyncGame, ExportError> {
    let mut b = GameBuilder::new();
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for v in &doc.vertices {
        let vertex: Vertex = v.parse()?;
        ids.insert(v, b.vertex(vertex));
    }
    let id = |v: &str| ids.get(v).copied().ok_or_else(|| ExportError::UnknownVertex(v.to_string()));
    for t in &doc.transitions {
        b.transition(id(&t.src)?, id(&t.dst)?, polarity_of(&t.polarity)?);
    }
    for [p, q] in &doc.tiles {
        let edge = |x: &str, y: &str| -> Result<usize, ExportError> {
            b.edge(id(x)?, id(y)?)
                .ok_or_else(|| ExportError::UnknownTransition(x.to_string(), y.to_string()))
        };
        let (m, pp, n, qq) = (edge(&p[0], &p[1])?, edge(&p[1], &p[2])?, edge(&q[0], &q[1])?, edge(&q[1], &q[2])?);
        b.tile(m, pp, n, qq);
    }
    let init = id(&doc.initial)?;
    Ok(b.build(init, Shape::Plain))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering; with a strategy, its positions and moves are drawn bold
/// and the rest of the game greyed out. Tiles become dotted undirected
/// edges between the two intermediate positions.
pub fn game_dot(g: &AsyncGame, s: Option<&Strategy>) -> String {
    let mut out = String::from("digraph game {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n");
    for v in 0..g.vertex_count() {
        let mut attrs = format!("label=\"{}\"", dot_escape(&g.vertex(v).pretty()));
        if v == g.initial() {
            attrs.push_str(", peripheries=2");
        }
        if let Some(s) = s {
            attrs.push_str(if s.contains_vertex(v) { ", style=bold" } else { ", color=gray70, fontcolor=gray70" });
        }
        let _ = writeln!(out, "  v{v} [{attrs}];");
    }
    for (e, t) in g.transitions().iter().enumerate() {
        let color = match t.polarity {
            Polarity::Opponent => "firebrick",
            Polarity::Proponent => "navy",
        };
        let mut attrs = format!("label=\"{}\", color={color}", t.polarity.letter());
        if let Some(s) = s {
            attrs.push_str(if s.contains_edge(e) { ", style=bold, penwidth=2" } else { ", color=gray80, fontcolor=gray80" });
        }
        let _ = writeln!(out, "  v{} -> v{} [{attrs}];", t.src, t.dst);
    }
    for tile in g.tiles() {
        let a = g.transition(tile.first.0).dst;
        let b = g.transition(tile.second.0).dst;
        let _ = writeln!(out, "  v{a} -> v{b} [dir=none, style=dotted, constraint=false];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum EnvEntry {
    /// `"atomic"` (one Proponent move) or `"atomic-opponent"`.
    Named(String),
    Game(GameDoc),
}

pub fn env_from_json(text: &str) -> Result<VarEnv, ExportError> {
    let entries: BTreeMap<String, EnvEntry> = serde_json::from_str(text)?;
    let mut env = VarEnv::new();
    for (name, entry) in entries {
        let game = match entry {
            EnvEntry::Named(kind) if kind == "atomic" => atomic_game(&name.to_lowercase(), Polarity::Proponent),
            EnvEntry::Named(kind) if kind == "atomic-opponent" => atomic_game(&name.to_lowercase(), Polarity::Opponent),
            EnvEntry::Named(kind) => return Err(ExportError::Invalid(format!("unknown game kind {kind:?} for {name}"))),
            EnvEntry::Game(doc) => game_from_doc(&doc)?,
        };
        env.insert(&name, game);
    }
    Ok(env)
}

/// A strategy file: a proof (interpreted, then closed under courtesy unless
/// `deseq` is false), or a sequent with edges or plays given by vertex labels.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct StrategyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deseq: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plays: Vec<Vec<String>>,
}

pub fn strategy_doc(s: &Strategy) -> StrategyDoc {
    let g = s.game();
    let sequent = match g.shape() {
        Shape::Sequent(fs) => Some(format_sequent(fs)),
        Shape::Formula(f) => Some(f.to_string()),
        Shape::Plain => None,
    };
    StrategyDoc {
        sequent,
        edges: s
            .edges()
            .iter()
            .map(|&e| {
                let t = g.transition(e);
                [g.vertex(t.src).to_string(), g.vertex(t.dst).to_string()]
            })
            .collect(),
        ..StrategyDoc::default()
    }
}

pub fn strategy_from_doc(doc: &StrategyDoc, env: &VarEnv) -> Result<Strategy, ExportError> {
    if let Some(text) = &doc.proof {
        let p = parse_proof(text)?;
        let env = env.completed_for(&p.conclusion);
        let s = interpret(&p, &env)?;
        return Ok(if doc.deseq.unwrap_or(true) { deseq(&s) } else { s });
    }
    let text = doc
        .sequent
        .as_ref()
        .ok_or_else(|| ExportError::Invalid("strategy needs a proof or a sequent".into()))?;
    let seq = parse_sequent(text.trim_start_matches("|-").trim())?;
    let env = env.completed_for(&seq);
    let g = Arc::new(game_of_sequent(&seq, &env)?);
    let vid = |v: &str| -> Result<usize, ExportError> {
        let vertex: Vertex = v.parse()?;
        g.vertex_id(&vertex).ok_or_else(|| ExportError::UnknownVertex(v.to_string()))
    };
    let eid = |a: &str, b: &str| -> Result<usize, ExportError> {
        g.edge_id(vid(a)?, vid(b)?)
            .ok_or_else(|| ExportError::UnknownTransition(a.to_string(), b.to_string()))
    };
    let mut edges = Vec::new();
    for [a, b] in &doc.edges {
        edges.push(eid(a, b)?);
    }
    for play in &doc.plays {
        if let Some(first) = play.first() {
            if vid(first)? != g.initial() {
                return Err(ExportError::Invalid(format!("play starts at {first}, not at the initial position")));
            }
        }
        for w in play.windows(2) {
            edges.push(eid(&w[0], &w[1])?);
        }
    }
    let vertices = edges.iter().map(|&e| g.transition(e).dst).chain([g.initial()]).collect();
    Strategy::new(g.clone(), vertices, edges.into_iter().collect()).map_err(ExportError::Strategy)
}

/// Reads a strategy from JSON, or from a bare proof term.
pub fn strategy_from_text(text: &str, env: &VarEnv) -> Result<Strategy, ExportError> {
    if text.trim_start().starts_with('{') {
        let doc: StrategyDoc = serde_json::from_str(text)?;
        strategy_from_doc(&doc, env)
    } else {
        strategy_from_doc(
            &StrategyDoc {
                proof: Some(text.to_string()),
                ..StrategyDoc::default()
            },
            env,
        )
    }
}

pub fn play_labels(g: &AsyncGame, p: &Path) -> Vec<String> {
    p.vertices(g).into_iter().map(|v| g.vertex(v).pretty()).collect()
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LatticeDoc {
    pub elements: Vec<String>,
    pub covering: Vec<[String; 2]>,
}

pub fn lattice_doc(l: &PositionLattice) -> LatticeDoc {
    LatticeDoc {
        elements: (0..l.len()).map(|x| l.name(x)).collect(),
        covering: l.covering().into_iter().map(|(x, y)| [l.name(x), l.name(y)]).collect(),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClosureDoc {
    pub lattice: LatticeDoc,
    pub fixpoints: Vec<String>,
    /// Each element with its image.
    pub table: Vec<[String; 2]>,
}

pub fn closure_doc(c: &ClosureStrategy) -> ClosureDoc {
    let l = c.lattice();
    ClosureDoc {
        lattice: lattice_doc(l),
        fixpoints: c.fixpoint_names(),
        table: c.table().iter().enumerate().map(|(x, &y)| [l.name(x), l.name(y)]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::game::game_of_formula;

    #[test]
    fn game_json_round_trips() {
        let f = parse_formula("((X * ~X) & Y)").unwrap();
        let g = game_of_formula(&f, &VarEnv::atomic_for(&[f.clone()])).unwrap();
        let doc = game_doc(&g);
        assert_eq!(doc.vertices.len(), 8);
        assert_eq!(doc.tiles.len(), 1);
        let text = serde_json::to_string(&doc).unwrap();
        let back = game_from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.vertex_count(), g.vertex_count());
        assert_eq!(back.transition_count(), g.transition_count());
        assert_eq!(back.tiles().len(), 1);
        assert_eq!(game_doc(&back).transitions, doc.transitions);
    }

    #[test]
    fn dot_has_a_node_per_position() {
        let f = parse_formula("((X * ~X) & Y)").unwrap();
        let g = game_of_formula(&f, &VarEnv::atomic_for(&[f.clone()])).unwrap();
        let dot = game_dot(&g, None);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 8);
        assert_eq!(dot.lines().filter(|l| l.contains("->") && !l.contains("dotted")).count(), 8);
    }

    #[test]
    fn env_entries() {
        let env = env_from_json(r#"{"X": "atomic", "Y": "atomic-opponent"}"#).unwrap();
        assert_eq!(env.get("Y").unwrap().polarity(0), Polarity::Opponent);
        let doc = game_doc(env.get("X").unwrap());
        let text = format!(r#"{{"Z": {}}}"#, serde_json::to_string(&doc).unwrap());
        let env2 = env_from_json(&text).unwrap();
        assert_eq!(env2.get("Z").unwrap().vertex_count(), 2);
        assert!(env_from_json(r#"{"X": "big"}"#).is_err());
    }

    #[test]
    fn strategy_files_round_trip() {
        let env = VarEnv::new();
        let s = strategy_from_text("par(0, ax(0,1)) : |- (~X | X)", &env).unwrap();
        let doc = strategy_doc(&s);
        let back = strategy_from_doc(&doc, &env).unwrap();
        assert_eq!(back, s);
        let plays = r#"{"sequent": "(X * Y)", "plays": [["[dag]", "[(dag * dag)]", "[(dag * atom(Y,y))]"]]}"#;
        let t = strategy_from_text(plays, &env).unwrap();
        assert_eq!(t.edges().len(), 2);
        let bad = r#"{"sequent": "(X * Y)", "plays": [["[(dag * dag)]"]]}"#;
        assert!(strategy_from_text(bad, &env).is_err());
    }
}
