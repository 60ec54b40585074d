//! MALL formulas in de Morgan normal form and the positions exploring them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::game::VarEnv;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

/// A formula of multiplicative-additive linear logic without units.
///
/// Negation only occurs on atoms; `~` in the surface syntax is pushed to
/// the leaves while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    CoVar(String),
    Par(Box<Formula>, Box<Formula>),
    Tensor(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn covar(name: &str) -> Formula {
        Formula::CoVar(name.to_string())
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(Box::new(a), Box::new(b))
    }

    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(Box::new(a), Box::new(b))
    }

    pub fn dual(&self) -> Formula {
        match self {
            Formula::Var(x) => Formula::CoVar(x.clone()),
            Formula::CoVar(x) => Formula::Var(x.clone()),
            Formula::Par(a, b) => Formula::tensor(a.dual(), b.dual()),
            Formula::Tensor(a, b) => Formula::par(a.dual(), b.dual()),
            Formula::With(a, b) => Formula::plus(a.dual(), b.dual()),
            Formula::Plus(a, b) => Formula::with(a.dual(), b.dual()),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::CoVar(_))
    }

    /// `⅋` and `&`.
    pub fn is_negative(&self) -> bool {
        matches!(self, Formula::Par(..) | Formula::With(..))
    }

    /// `⊗` and `⊕`.
    pub fn is_positive(&self) -> bool {
        matches!(self, Formula::Tensor(..) | Formula::Plus(..))
    }

    pub fn atom_name(&self) -> Option<&str> {
        match self {
            Formula::Var(x) | Formula::CoVar(x) => Some(x),
            _ => None,
        }
    }

    pub fn children(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Par(a, b) | Formula::Tensor(a, b) | Formula::With(a, b) | Formula::Plus(a, b) => {
                Some((a, b))
            }
            _ => None,
        }
    }

    /// Atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self.children() {
            None => 1,
            Some((a, b)) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self.children() {
            None => 1,
            Some((a, b)) => 1 + a.size() + b.size(),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(x) | Formula::CoVar(x) => {
                out.insert(x.clone());
            }
            _ => {
                let (a, b) = self.children().unwrap();
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    pub fn subformula(&self, path: &[Side]) -> Option<&Formula> {
        let mut f = self;
        for side in path {
            let (a, b) = f.children()?;
            f = match side {
                Side::L => a,
                Side::R => b,
            };
        }
        Some(f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) => write!(f, "{x}"),
            Formula::CoVar(x) => write!(f, "~{x}"),
            Formula::Par(a, b) => write!(f, "({a} | {b})"),
            Formula::Tensor(a, b) => write!(f, "({a} * {b})"),
            Formula::With(a, b) => write!(f, "({a} & {b})"),
            Formula::Plus(a, b) => write!(f, "({a} + {b})"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// Parses a formula, accepting any variable name.
/// Every formula of depth at most `depth` over `literals`, grouped by depth
/// and ordered by connective, then left and right operand.
pub fn formulas_up_to(depth: usize, literals: &[Formula]) -> Vec<Formula> {
    if depth == 0 {
        return vec![];
    }
    let mut all: Vec<Formula> = literals.to_vec();
    let mut prev_start = 0;
    for _ in 1..depth {
        let prev_end = all.len();
        let mut next = Vec::new();
        for ctor in [Formula::par, Formula::tensor, Formula::with, Formula::plus] {
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    if i >= prev_start || j >= prev_start {
                        next.push(ctor(a.clone(), b.clone()));
                    }
                }
            }
        }
        prev_start = prev_end;
        all.extend(next);
    }
    all
}

/// `X`, `~X` for each name.
pub fn literals(names: &[&str]) -> Vec<Formula> {
    names.iter().flat_map(|x| [Formula::var(x), Formula::covar(x)]).collect()
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer::new(text);
    let f = lexer.formula()?;
    lexer.expect_end()?;
    Ok(f)
}

/// Parses a formula whose variables must all be declared in `env`.
pub fn parse_formula_in(text: &str, env: &VarEnv) -> Result<Formula, ParseError> {
    let f = parse_formula(text)?;
    for x in f.variables() {
        if !env.contains(&x) {
            return Err(ParseError::UnknownVariable(x));
        }
    }
    Ok(f)
}

/// Parses a comma-separated list of formulas (a sequent body).
pub fn parse_sequent(text: &str) -> Result<Vec<Formula>, ParseError> {
    let mut lexer = Lexer::new(text);
    let out = lexer.formula_list()?;
    lexer.expect_end()?;
    Ok(out)
}

pub fn format_sequent(fs: &[Formula]) -> String {
    let parts: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
    parts.join(", ")
}

/// Shared recursive-descent machinery for formulas, positions and proofs.
pub(crate) struct Lexer<'a> {
    pub(crate) src: &'a str,
    pub(crate) pos: usize,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::syntax(self.pos, message)
    }

    /// Identifier of letters, digits and underscores.
    pub(crate) fn word(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    pub(crate) fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected number"));
        }
        self.pos += len;
        rest[..len]
            .parse()
            .map_err(|_| ParseError::syntax(start, "number out of range"))
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        let w = self.word()?;
        if !w.starts_with(|c: char| c.is_ascii_uppercase()) || w.contains('_') {
            return Err(ParseError::syntax(
                start,
                format!("`{w}` is not a variable (expected [A-Z][A-Za-z0-9]*)"),
            ));
        }
        Ok(w.to_string())
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some('~') => {
                self.pos += 1;
                Ok(self.formula()?.dual())
            }
            Some('(') => {
                self.pos += 1;
                let a = self.formula()?;
                let op = self.peek();
                let b = match op {
                    Some('*' | '|' | '&' | '+') => {
                        self.pos += 1;
                        self.formula()?
                    }
                    _ => return Err(self.error("expected one of `*`, `|`, `&`, `+`")),
                };
                self.expect(")")?;
                Ok(match op.unwrap() {
                    '*' => Formula::tensor(a, b),
                    '|' => Formula::par(a, b),
                    '&' => Formula::with(a, b),
                    _ => Formula::plus(a, b),
                })
            }
            Some(_) => Ok(Formula::Var(self.variable()?)),
            None => Err(self.error("unexpected end of input")),
        }
    }

    pub(crate) fn formula_list(&mut self) -> Result<Vec<Formula>, ParseError> {
        let mut out = vec![self.formula()?];
        while self.eat(",") {
            out.push(self.formula()?);
        }
        Ok(out)
    }
}

/// Direction inside a binary connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

/// Address of a subformula occurrence inside a sequent: the index of the
/// root formula and the path down to the occurrence.
///
/// The lexicographic order on addresses is the left-to-right order of the
/// occurrences in the sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Addr {
    pub root: usize,
    pub path: Vec<Side>,
}

impl Addr {
    pub fn root(root: usize) -> Addr {
        Addr { root, path: Vec::new() }
    }

    pub fn child(&self, side: Side) -> Addr {
        let mut path = self.path.clone();
        path.push(side);
        Addr { root: self.root, path }
    }

    pub fn left(&self) -> Addr {
        self.child(Side::L)
    }

    pub fn right(&self) -> Addr {
        self.child(Side::R)
    }

    pub fn is_prefix_of(&self, other: &Addr) -> bool {
        self.root == other.root && other.path.starts_with(&self.path)
    }

    pub fn parent(&self) -> Option<Addr> {
        if self.path.is_empty() {
            None
        } else {
            Some(Addr {
                root: self.root,
                path: self.path[..self.path.len() - 1].to_vec(),
            })
        }
    }

    pub fn formula<'f>(&self, roots: &'f [Formula]) -> Option<&'f Formula> {
        roots.get(self.root)?.subformula(&self.path)
    }
}

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for s in &self.path {
            write!(f, "{}", if *s == Side::L { ".L" } else { ".R" })?;
        }
        Ok(())
    }
}

/// A partial exploration of a formula.
///
/// `Atom` stands for a non-initial position of the game interpreting a
/// variable; `negated` records that the leaf is a co-variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Dagger,
    Par(Box<Position>, Box<Position>),
    Tensor(Box<Position>, Box<Position>),
    WithL(Box<Position>),
    WithR(Box<Position>),
    PlusL(Box<Position>),
    PlusR(Box<Position>),
    Atom {
        var: String,
        label: String,
        negated: bool,
    },
}

impl Position {
    pub fn par(p: Position, q: Position) -> Position {
        Position::Par(Box::new(p), Box::new(q))
    }

    pub fn tensor(p: Position, q: Position) -> Position {
        Position::Tensor(Box::new(p), Box::new(q))
    }

    pub fn atom(var: &str, label: &str, negated: bool) -> Position {
        Position::Atom {
            var: var.to_string(),
            label: label.to_string(),
            negated,
        }
    }

    /// Swaps `⅋`/`⊗` and `&`/`⊕`, and flips atom negation.
    pub fn dual(&self) -> Position {
        match self {
            Position::Dagger => Position::Dagger,
            Position::Par(p, q) => Position::tensor(p.dual(), q.dual()),
            Position::Tensor(p, q) => Position::par(p.dual(), q.dual()),
            Position::WithL(p) => Position::PlusL(Box::new(p.dual())),
            Position::WithR(p) => Position::PlusR(Box::new(p.dual())),
            Position::PlusL(p) => Position::WithL(Box::new(p.dual())),
            Position::PlusR(p) => Position::WithR(Box::new(p.dual())),
            Position::Atom { var, label, negated } => Position::Atom {
                var: var.clone(),
                label: label.clone(),
                negated: !negated,
            },
        }
    }

    /// Notation with `†`, `⅋`, `⊗`, `&L`, `⊕L` and `x*` for negated atoms.
    pub fn pretty(&self) -> String {
        fn inner(p: &Position) -> String {
            match p {
                Position::Par(..) | Position::Tensor(..) => format!("({})", p.pretty()),
                _ => p.pretty(),
            }
        }
        match self {
            Position::Dagger => "†".to_string(),
            Position::Par(p, q) => format!("{}⅋{}", inner(p), inner(q)),
            Position::Tensor(p, q) => format!("{}⊗{}", inner(p), inner(q)),
            Position::WithL(p) => format!("&L{}", inner(p)),
            Position::WithR(p) => format!("&R{}", inner(p)),
            Position::PlusL(p) => format!("⊕L{}", inner(p)),
            Position::PlusR(p) => format!("⊕R{}", inner(p)),
            Position::Atom { label, negated, .. } => {
                if *negated {
                    format!("{label}*")
                } else {
                    label.clone()
                }
            }
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Dagger => write!(f, "dag"),
            Position::Par(p, q) => write!(f, "({p} | {q})"),
            Position::Tensor(p, q) => write!(f, "({p} * {q})"),
            Position::WithL(p) => write!(f, "&L {p}"),
            Position::WithR(p) => write!(f, "&R {p}"),
            Position::PlusL(p) => write!(f, "+L {p}"),
            Position::PlusR(p) => write!(f, "+R {p}"),
            Position::Atom { var, label, negated } => {
                write!(f, "atom({}{var},{label})", if *negated { "~" } else { "" })
            }
        }
    }
}

impl std::str::FromStr for Position {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lexer = Lexer::new(s);
        let p = lexer.position()?;
        lexer.expect_end()?;
        Ok(p)
    }
}

impl<'a> Lexer<'a> {
    pub(crate) fn position(&mut self) -> Result<Position, ParseError> {
        if self.eat("dag") {
            return Ok(Position::Dagger);
        }
        if self.eat("atom") {
            self.expect("(")?;
            let negated = self.eat("~");
            let var = self.word()?.to_string();
            self.expect(",")?;
            let start = self.pos;
            let rest = &self.src[start..];
            let len = rest.find(')').ok_or_else(|| self.error("expected `)`"))?;
            let label = rest[..len].trim().to_string();
            if label.is_empty() {
                return Err(self.error("empty atom label"));
            }
            self.pos += len + 1;
            return Ok(Position::Atom { var, label, negated });
        }
        for (tok, ctor) in [
            ("&L", Position::WithL as fn(Box<Position>) -> Position),
            ("&R", Position::WithR),
            ("+L", Position::PlusL),
            ("+R", Position::PlusR),
        ] {
            if self.eat(tok) {
                return Ok(ctor(Box::new(self.position()?)));
            }
        }
        if self.eat("(") {
            let p = self.position()?;
            let par = if self.eat("|") {
                true
            } else if self.eat("*") {
                false
            } else {
                return Err(self.error("expected `|` or `*`"));
            };
            let q = self.position()?;
            self.expect(")")?;
            return Ok(if par {
                Position::par(p, q)
            } else {
                Position::tensor(p, q)
            });
        }
        Err(self.error("expected a position"))
    }
}

/// Positions of the variable `var` as it appears at a leaf.
fn atom_positions(var: &str, negated: bool, env: &VarEnv) -> Result<Vec<Position>, ParseError> {
    let game = env
        .get(var)
        .ok_or_else(|| ParseError::UnknownVariable(var.to_string()))?;
    let mut out = vec![Position::Dagger];
    for v in 0..game.vertex_count() {
        if v != game.initial() {
            out.push(Position::atom(var, &game.vertex(v).to_string(), negated));
        }
    }
    Ok(out)
}

/// All valid positions of `f`, generated by the inductive clauses.
pub fn valid_positions(f: &Formula, env: &VarEnv) -> Result<BTreeSet<Position>, ParseError> {
    let list = positions_list(f, env)?;
    Ok(list.into_iter().collect())
}

fn positions_list(f: &Formula, env: &VarEnv) -> Result<Vec<Position>, ParseError> {
    match f {
        Formula::Var(x) => atom_positions(x, false, env),
        Formula::CoVar(x) => atom_positions(x, true, env),
        Formula::Par(a, b) | Formula::Tensor(a, b) => {
            let pa = positions_list(a, env)?;
            let pb = positions_list(b, env)?;
            let mut out = vec![Position::Dagger];
            for p in &pa {
                for q in &pb {
                    out.push(if matches!(f, Formula::Par(..)) {
                        Position::par(p.clone(), q.clone())
                    } else {
                        Position::tensor(p.clone(), q.clone())
                    });
                }
            }
            Ok(out)
        }
        Formula::With(a, b) | Formula::Plus(a, b) => {
            let with = matches!(f, Formula::With(..));
            let mut out = vec![Position::Dagger];
            for p in positions_list(a, env)? {
                out.push(if with {
                    Position::WithL(Box::new(p))
                } else {
                    Position::PlusL(Box::new(p))
                });
            }
            for q in positions_list(b, env)? {
                out.push(if with {
                    Position::WithR(Box::new(q))
                } else {
                    Position::PlusR(Box::new(q))
                });
            }
            Ok(out)
        }
    }
}

/// Structural membership test for `valid_positions`.
pub fn check_position(p: &Position, f: &Formula, env: &VarEnv) -> bool {
    match (p, f) {
        (Position::Dagger, _) => true,
        (Position::Par(x, y), Formula::Par(a, b)) | (Position::Tensor(x, y), Formula::Tensor(a, b)) => {
            check_position(x, a, env) && check_position(y, b, env)
        }
        (Position::WithL(x), Formula::With(a, _))
        | (Position::WithR(x), Formula::With(_, a))
        | (Position::PlusL(x), Formula::Plus(a, _))
        | (Position::PlusR(x), Formula::Plus(_, a)) => check_position(x, a, env),
        (Position::Atom { var, label, negated }, Formula::Var(v) | Formula::CoVar(v)) => {
            var == v
                && *negated == matches!(f, Formula::CoVar(_))
                && env.get(v).is_some_and(|g| {
                    g.vertex_id_by_name(label)
                        .is_some_and(|id| id != g.initial())
                })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Formula {
        Formula::var("X")
    }

    fn y() -> Formula {
        Formula::var("Y")
    }

    #[test]
    fn formula_counts_by_depth() {
        let lits = literals(&["X", "Y"]);
        assert_eq!(formulas_up_to(1, &lits).len(), 4);
        assert_eq!(formulas_up_to(2, &lits).len(), 4 + 4 * 16);
        let d3 = formulas_up_to(3, &lits);
        assert_eq!(d3.len(), 68 + 4 * (68 * 68 - 4 * 4));
        assert!(d3.iter().all(|f| f.depth() <= 3));
        let distinct: BTreeSet<&Formula> = d3.iter().collect();
        assert_eq!(distinct.len(), d3.len());
    }

    #[test]
    fn parse_pushes_negation_to_atoms() {
        assert_eq!(
            parse_formula("~(X * Y)").unwrap(),
            Formula::par(Formula::covar("X"), Formula::covar("Y"))
        );
        assert_eq!(parse_formula("X").unwrap(), x());
        assert_eq!(
            parse_formula("((X * ~X) & Y)").unwrap(),
            Formula::with(Formula::tensor(x(), Formula::covar("X")), y())
        );
        assert_eq!(parse_formula("~~X").unwrap(), x());
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse_formula("(X * Y") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        match parse_formula("(X ? Y)") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("x").is_err());
        assert!(parse_formula("X Y").is_err());
    }

    #[test]
    fn parse_in_rejects_unknown_variables() {
        let env = VarEnv::atomic(["X"]);
        assert!(parse_formula_in("(X | ~X)", &env).is_ok());
        assert_eq!(
            parse_formula_in("(X | Z)", &env),
            Err(ParseError::UnknownVariable("Z".into()))
        );
    }

    #[test]
    fn dual_examples() {
        assert_eq!(
            Formula::tensor(x(), y()).dual(),
            Formula::par(Formula::covar("X"), Formula::covar("Y"))
        );
        assert_eq!(
            Formula::with(x(), y()).dual(),
            Formula::plus(Formula::covar("X"), Formula::covar("Y"))
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["X", "~X", "((X * ~X) & Y)", "((X | Y) + (~Y & X))"] {
            let f = parse_formula(s).unwrap();
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn valid_positions_of_atom_and_par() {
        let env = VarEnv::atomic(["X", "Y"]);
        let ps = valid_positions(&x(), &env).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps.contains(&Position::Dagger));
        assert!(ps.contains(&Position::atom("X", "x", false)));

        let ps = valid_positions(&Formula::par(x(), y()), &env).unwrap();
        let xa = Position::atom("X", "x", false);
        let ya = Position::atom("Y", "y", false);
        let expected: BTreeSet<Position> = [
            Position::Dagger,
            Position::par(Position::Dagger, Position::Dagger),
            Position::par(xa.clone(), Position::Dagger),
            Position::par(Position::Dagger, ya.clone()),
            Position::par(xa, ya),
        ]
        .into_iter()
        .collect();
        assert_eq!(ps, expected);
    }

    #[test]
    fn valid_positions_of_diagram_formula() {
        let env = VarEnv::atomic(["X", "Y"]);
        let f = parse_formula("((X * ~X) & Y)").unwrap();
        let pretty: BTreeSet<String> = valid_positions(&f, &env)
            .unwrap()
            .iter()
            .map(|p| p.pretty())
            .collect();
        let expected: BTreeSet<String> = [
            "†", "&L†", "&R†", "&L(†⊗†)", "&L(x⊗†)", "&L(†⊗x*)", "&L(x⊗x*)", "&Ry",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(pretty, expected);
    }

    #[test]
    fn check_position_examples() {
        let env = VarEnv::atomic(["X", "Y"]);
        let pd = Position::par(Position::Dagger, Position::Dagger);
        assert!(check_position(&pd, &Formula::par(x(), y()), &env));
        assert!(!check_position(
            &Position::WithL(Box::new(Position::Dagger)),
            &Formula::plus(x(), y()),
            &env
        ));
        let xx = Position::tensor(Position::atom("X", "x", false), Position::atom("X", "x", true));
        assert!(check_position(&xx, &Formula::tensor(x(), Formula::covar("X")), &env));
        assert!(!check_position(&xx, &Formula::tensor(x(), x()), &env));
    }

    #[test]
    fn position_text_round_trips() {
        let env = VarEnv::atomic(["X", "Y"]);
        let f = parse_formula("((X * ~X) & (Y + ~Y))").unwrap();
        for p in valid_positions(&f, &env).unwrap() {
            let back: Position = p.to_string().parse().unwrap();
            assert_eq!(back, p);
        }
    }
}
