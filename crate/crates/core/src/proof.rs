//! One-sided MALL sequent proofs with explicit indices, rule permutations
//! and exhaustive proof search.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::formula::{format_sequent, Addr, Formula, Lexer, ParseError};

/// A path of premise indices from the root of a proof.
pub type NodePath = Vec<usize>;

fn show_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        let parts: Vec<String> = path.iter().map(|i| i.to_string()).collect();
        parts.join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("missing `: |- ...` conclusion on the root rule")]
    MissingConclusion,
    #[error("node {node}: {message}")]
    RuleMismatch { node: String, message: String },
    #[error("node {node}: split not a partition")]
    BadSplit { node: String },
    #[error("node {node}: axiom on non-atomic formula {formula}; expand it into atomic axioms")]
    NonAtomicAxiom { node: String, formula: String },
    #[error("invalid node path {0}")]
    InvalidNodePath(String),
    #[error("proofs have different conclusions")]
    DifferentConclusions,
}

/// Inference rules. Indices refer to the conclusion sequent of the node.
///
/// Premise sequents are the conclusion with the principal formula replaced
/// in place by its immediate subformulas. A tensor keeps the listed context
/// indices, plus the left subformula, in the left premise, and the rest in
/// the right premise; both in their original order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Ax(usize, usize),
    Par(usize),
    Tensor(usize, Vec<usize>),
    With(usize),
    PlusL(usize),
    PlusR(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RulePolarity {
    Negative,
    Positive,
}

impl Rule {
    pub fn principal(&self) -> usize {
        match self {
            Rule::Ax(i, _) | Rule::Par(i) | Rule::Tensor(i, _) | Rule::With(i) | Rule::PlusL(i) | Rule::PlusR(i) => *i,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Ax(..) => 0,
            Rule::Tensor(..) | Rule::With(_) => 2,
            _ => 1,
        }
    }

    pub fn polarity(&self) -> Option<RulePolarity> {
        match self {
            Rule::Ax(..) => None,
            Rule::Par(_) | Rule::With(_) => Some(RulePolarity::Negative),
            _ => Some(RulePolarity::Positive),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proof {
    pub rule: Rule,
    pub premises: Vec<Proof>,
    pub conclusion: Vec<Formula>,
}

fn replace_at(seq: &[Formula], i: usize, with: &[Formula]) -> Vec<Formula> {
    let mut out = seq[..i].to_vec();
    out.extend_from_slice(with);
    out.extend_from_slice(&seq[i + 1..]);
    out
}

/// Index lists of the two premises of `Tensor(i, left)` over `n` formulas.
pub(crate) fn tensor_sides(n: usize, i: usize, left: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let l: Vec<usize> = (0..n).filter(|k| *k == i || left.contains(k)).collect();
    let r: Vec<usize> = (0..n).filter(|k| *k == i || !left.contains(k)).collect();
    (l, r)
}

/// The premise sequents forced by `rule` on `conclusion`.
pub fn premise_sequents(
    rule: &Rule,
    conclusion: &[Formula],
    node: &[usize],
) -> Result<Vec<Vec<Formula>>, ProofError> {
    let mismatch = |message: String| ProofError::RuleMismatch {
        node: show_path(node),
        message,
    };
    let n = conclusion.len();
    let i = rule.principal();
    if i >= n {
        return Err(mismatch(format!("index {i} out of range for {n} formulas")));
    }
    let f = &conclusion[i];
    match (rule, f) {
        (Rule::Ax(i, j), _) => {
            if n != 2 || i == j || *j >= 2 {
                return Err(mismatch("axiom needs exactly two formulas".into()));
            }
            if !f.is_atom() {
                return Err(ProofError::NonAtomicAxiom {
                    node: show_path(node),
                    formula: f.to_string(),
                });
            }
            if conclusion[*j] != f.dual() {
                return Err(mismatch(format!("{} is not the dual of {}", conclusion[*j], f)));
            }
            Ok(vec![])
        }
        (Rule::Par(_), Formula::Par(a, b)) => Ok(vec![replace_at(conclusion, i, &[(**a).clone(), (**b).clone()])]),
        (Rule::With(_), Formula::With(a, b)) => Ok(vec![
            replace_at(conclusion, i, &[(**a).clone()]),
            replace_at(conclusion, i, &[(**b).clone()]),
        ]),
        (Rule::PlusL(_), Formula::Plus(a, _)) => Ok(vec![replace_at(conclusion, i, &[(**a).clone()])]),
        (Rule::PlusR(_), Formula::Plus(_, b)) => Ok(vec![replace_at(conclusion, i, &[(**b).clone()])]),
        (Rule::Tensor(_, left), Formula::Tensor(a, b)) => {
            let distinct: BTreeSet<usize> = left.iter().copied().collect();
            if distinct.len() != left.len() || left.iter().any(|&k| k == i || k >= n) {
                return Err(ProofError::BadSplit { node: show_path(node) });
            }
            let (l, r) = tensor_sides(n, i, left);
            let pick = |idx: &[usize], sub: &Formula| -> Vec<Formula> {
                idx.iter()
                    .map(|&k| if k == i { sub.clone() } else { conclusion[k].clone() })
                    .collect()
            };
            Ok(vec![pick(&l, a), pick(&r, b)])
        }
        _ => Err(mismatch(format!("rule {rule:?} does not apply to {f}"))),
    }
}

/// The η-expanded identity proof of `⊢ A*, A`.
pub fn identity_proof(a: &Formula) -> Proof {
    eta(vec![a.dual(), a.clone()])
}

fn eta(seq: Vec<Formula>) -> Proof {
    if seq[0].is_atom() {
        return Proof::build(Rule::Ax(0, 1), seq, vec![]);
    }
    let i = if matches!(seq[0], Formula::Par(..) | Formula::With(..)) { 0 } else { 1 };
    let j = 1 - i;
    match &seq[i] {
        Formula::Par(..) => {
            let prem = premise_sequents(&Rule::Par(i), &seq, &[]).expect("par");
            let (k, left) = if i == 0 { (2, vec![0]) } else { (0, vec![1]) };
            let rule = Rule::Tensor(k, left);
            let subs = premise_sequents(&rule, &prem[0], &[]).expect("tensor");
            let inner = Proof::build(rule, prem[0].clone(), subs.into_iter().map(eta).collect());
            Proof::build(Rule::Par(i), seq, vec![inner])
        }
        _ => {
            let prem = premise_sequents(&Rule::With(i), &seq, &[]).expect("with");
            let branches = prem
                .into_iter()
                .zip([Rule::PlusL(j), Rule::PlusR(j)])
                .map(|(p, r)| {
                    let sub = premise_sequents(&r, &p, &[]).expect("plus").remove(0);
                    Proof::build(r, p, vec![eta(sub)])
                })
                .collect();
            Proof::build(Rule::With(i), seq, branches)
        }
    }
}

/// Returns the conclusion if every node instantiates its rule.
pub fn check_proof(p: &Proof) -> Result<Vec<Formula>, ProofError> {
    fn go(p: &Proof, node: &mut Vec<usize>) -> Result<(), ProofError> {
        let premises = premise_sequents(&p.rule, &p.conclusion, node)?;
        if premises.len() != p.premises.len() {
            return Err(ProofError::RuleMismatch {
                node: show_path(node),
                message: format!("expected {} premises, found {}", premises.len(), p.premises.len()),
            });
        }
        for (k, (seq, sub)) in premises.iter().zip(&p.premises).enumerate() {
            node.push(k);
            if *seq != sub.conclusion {
                return Err(ProofError::RuleMismatch {
                    node: show_path(node),
                    message: format!(
                        "premise concludes |- {} but the rule needs |- {}",
                        format_sequent(&sub.conclusion),
                        format_sequent(seq)
                    ),
                });
            }
            go(sub, node)?;
            node.pop();
        }
        Ok(())
    }
    go(p, &mut Vec::new())?;
    Ok(p.conclusion.clone())
}

impl Proof {
    /// Builds a node, deriving premise conclusions top-down.
    pub fn build(rule: Rule, conclusion: Vec<Formula>, premises: Vec<Proof>) -> Proof {
        Proof { rule, premises, conclusion }
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&Proof> {
        let mut p = self;
        for &k in path {
            p = p.premises.get(k)?;
        }
        Some(p)
    }

    /// Paths of all non-axiom nodes, root first.
    pub fn internal_nodes(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        fn go(p: &Proof, path: &mut Vec<usize>, out: &mut Vec<NodePath>) {
            if p.premises.is_empty() {
                return;
            }
            out.push(path.clone());
            for (k, q) in p.premises.iter().enumerate() {
                path.push(k);
                go(q, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn rule_count(&self) -> usize {
        1 + self.premises.iter().map(Proof::rule_count).sum::<usize>()
    }

    fn fmt_term(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Ax(i, j) => write!(f, "ax({i},{j})"),
            Rule::Par(i) => {
                write!(f, "par({i}, ")?;
                self.premises[0].fmt_term(f)?;
                write!(f, ")")
            }
            Rule::PlusL(i) | Rule::PlusR(i) => {
                let name = if matches!(self.rule, Rule::PlusL(_)) { "plusL" } else { "plusR" };
                write!(f, "{name}({i}, ")?;
                self.premises[0].fmt_term(f)?;
                write!(f, ")")
            }
            Rule::With(i) => {
                write!(f, "with({i}, ")?;
                self.premises[0].fmt_term(f)?;
                write!(f, ", ")?;
                self.premises[1].fmt_term(f)?;
                write!(f, ")")
            }
            Rule::Tensor(i, left) => {
                let ks: Vec<String> = left.iter().map(|k| k.to_string()).collect();
                write!(f, "tensor({i},[{}], ", ks.join(","))?;
                self.premises[0].fmt_term(f)?;
                write!(f, ", ")?;
                self.premises[1].fmt_term(f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_term(f)?;
        write!(f, " : |- {}", format_sequent(&self.conclusion))
    }
}

struct RawProof {
    rule: Rule,
    kids: Vec<RawProof>,
    annotation: Option<Vec<Formula>>,
}

impl<'a> Lexer<'a> {
    fn starts_formula(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == '~' || c == '(' || c.is_ascii_uppercase())
    }

    fn annotated_list(&mut self) -> Result<Vec<Formula>, ParseError> {
        let mut out = vec![self.formula()?];
        loop {
            let save = self.pos;
            if self.eat(",") && self.starts_formula() {
                out.push(self.formula()?);
            } else {
                self.pos = save;
                return Ok(out);
            }
        }
    }

    fn raw_proof(&mut self) -> Result<RawProof, ParseError> {
        let start = self.pos;
        let head = self.word()?.to_string();
        self.expect("(")?;
        let (rule, kids) = match head.as_str() {
            "ax" => {
                let i = self.number()?;
                self.expect(",")?;
                let j = self.number()?;
                (Rule::Ax(i, j), vec![])
            }
            "par" | "plusL" | "plusR" => {
                let i = self.number()?;
                self.expect(",")?;
                let kid = self.raw_proof()?;
                let rule = match head.as_str() {
                    "par" => Rule::Par(i),
                    "plusL" => Rule::PlusL(i),
                    _ => Rule::PlusR(i),
                };
                (rule, vec![kid])
            }
            "with" => {
                let i = self.number()?;
                self.expect(",")?;
                let a = self.raw_proof()?;
                self.expect(",")?;
                let b = self.raw_proof()?;
                (Rule::With(i), vec![a, b])
            }
            "tensor" => {
                let i = self.number()?;
                self.expect(",")?;
                self.expect("[")?;
                let mut left = Vec::new();
                if !self.eat("]") {
                    left.push(self.number()?);
                    while self.eat(",") {
                        left.push(self.number()?);
                    }
                    self.expect("]")?;
                }
                self.expect(",")?;
                let a = self.raw_proof()?;
                self.expect(",")?;
                let b = self.raw_proof()?;
                (Rule::Tensor(i, left), vec![a, b])
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unknown rule `{other}`"),
                })
            }
        };
        self.expect(")")?;
        let annotation = if self.eat(":") {
            self.expect("|-")?;
            Some(self.annotated_list()?)
        } else {
            None
        };
        Ok(RawProof { rule, kids, annotation })
    }
}

fn from_raw(raw: RawProof, conclusion: Vec<Formula>, node: &mut Vec<usize>) -> Result<Proof, ProofError> {
    if let Some(stated) = &raw.annotation {
        if *stated != conclusion {
            return Err(ProofError::RuleMismatch {
                node: show_path(node),
                message: format!(
                    "stated |- {} but the rule below forces |- {}",
                    format_sequent(stated),
                    format_sequent(&conclusion)
                ),
            });
        }
    }
    let premises = premise_sequents(&raw.rule, &conclusion, node)?;
    if premises.len() != raw.kids.len() {
        return Err(ProofError::RuleMismatch {
            node: show_path(node),
            message: "wrong number of premises".into(),
        });
    }
    let mut kids = Vec::new();
    for (k, (kid, seq)) in raw.kids.into_iter().zip(premises).enumerate() {
        node.push(k);
        kids.push(from_raw(kid, seq, node)?);
        node.pop();
    }
    Ok(Proof {
        rule: raw.rule,
        premises: kids,
        conclusion,
    })
}

/// Parses a proof term. The root must carry its conclusion; inner
/// conclusions are derived and, when stated, compared.
pub fn parse_proof(text: &str) -> Result<Proof, ProofError> {
    let mut lexer = Lexer::new(text);
    let raw = lexer.raw_proof()?;
    lexer.expect_end()?;
    let conclusion = raw.annotation.clone().ok_or(ProofError::MissingConclusion)?;
    from_raw(raw, conclusion, &mut Vec::new())
}

impl std::str::FromStr for Proof {
    type Err = ProofError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_proof(s)
    }
}

// Address form: every formula of every sequent in a proof is a subformula
// occurrence of the root sequent, and each sequent lists its occurrences in
// address order. Rules are then named by the address they decompose, which
// makes permutations plain tree rewrites.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    Ax,
    Par,
    Tensor,
    With,
    PlusL,
    PlusR,
}

impl Kind {
    fn negative(self) -> bool {
        matches!(self, Kind::Par | Kind::With)
    }

    fn positive(self) -> bool {
        matches!(self, Kind::Tensor | Kind::PlusL | Kind::PlusR)
    }

    fn unary(self) -> bool {
        matches!(self, Kind::Par | Kind::PlusL | Kind::PlusR)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct AProof {
    kind: Kind,
    addr: Addr,
    other: Option<Addr>,
    kids: Vec<AProof>,
}

impl AProof {
    fn node(kind: Kind, addr: &Addr, kids: Vec<AProof>) -> AProof {
        AProof {
            kind,
            addr: addr.clone(),
            other: None,
            kids,
        }
    }

    fn from_proof(p: &Proof, addrs: &[Addr]) -> AProof {
        let i = p.rule.principal();
        let a = &addrs[i];
        let with_sub = |sub: Vec<Addr>| {
            let mut v = addrs[..i].to_vec();
            v.extend(sub);
            v.extend_from_slice(&addrs[i + 1..]);
            v
        };
        let (kind, kids) = match &p.rule {
            Rule::Ax(_, j) => {
                return AProof {
                    kind: Kind::Ax,
                    addr: a.clone(),
                    other: Some(addrs[*j].clone()),
                    kids: vec![],
                }
            }
            Rule::Par(_) => (Kind::Par, vec![AProof::from_proof(&p.premises[0], &with_sub(vec![a.left(), a.right()]))]),
            Rule::PlusL(_) => (Kind::PlusL, vec![AProof::from_proof(&p.premises[0], &with_sub(vec![a.left()]))]),
            Rule::PlusR(_) => (Kind::PlusR, vec![AProof::from_proof(&p.premises[0], &with_sub(vec![a.right()]))]),
            Rule::With(_) => (
                Kind::With,
                vec![
                    AProof::from_proof(&p.premises[0], &with_sub(vec![a.left()])),
                    AProof::from_proof(&p.premises[1], &with_sub(vec![a.right()])),
                ],
            ),
            Rule::Tensor(_, left) => {
                let (l, r) = tensor_sides(addrs.len(), i, left);
                let la: Vec<Addr> = l.iter().map(|&k| if k == i { a.left() } else { addrs[k].clone() }).collect();
                let ra: Vec<Addr> = r.iter().map(|&k| if k == i { a.right() } else { addrs[k].clone() }).collect();
                (
                    Kind::Tensor,
                    vec![AProof::from_proof(&p.premises[0], &la), AProof::from_proof(&p.premises[1], &ra)],
                )
            }
        };
        AProof::node(kind, a, kids)
    }

    /// Occurrences concluded by this subproof, or `None` if the rules do
    /// not fit together.
    fn conclusion(&self) -> Option<BTreeSet<Addr>> {
        let a = &self.addr;
        let strip = |mut set: BTreeSet<Addr>, subs: &[Addr]| -> Option<BTreeSet<Addr>> {
            for s in subs {
                if !set.remove(s) {
                    return None;
                }
            }
            if set.iter().any(|x| a.is_prefix_of(x)) {
                return None;
            }
            Some(set)
        };
        match self.kind {
            Kind::Ax => {
                let b = self.other.clone()?;
                (b != *a).then(|| [a.clone(), b].into_iter().collect())
            }
            Kind::Par => {
                let mut s = strip(self.kids[0].conclusion()?, &[a.left(), a.right()])?;
                s.insert(a.clone());
                Some(s)
            }
            Kind::PlusL | Kind::PlusR => {
                let sub = if self.kind == Kind::PlusL { a.left() } else { a.right() };
                let mut s = strip(self.kids[0].conclusion()?, &[sub])?;
                s.insert(a.clone());
                Some(s)
            }
            Kind::With => {
                let mut l = strip(self.kids[0].conclusion()?, &[a.left()])?;
                let r = strip(self.kids[1].conclusion()?, &[a.right()])?;
                if l != r {
                    return None;
                }
                l.insert(a.clone());
                Some(l)
            }
            Kind::Tensor => {
                let mut l = strip(self.kids[0].conclusion()?, &[a.left()])?;
                let r = strip(self.kids[1].conclusion()?, &[a.right()])?;
                if !l.is_disjoint(&r) {
                    return None;
                }
                l.extend(r);
                l.insert(a.clone());
                Some(l)
            }
        }
    }

    fn to_proof(&self, addrs: &[Addr], roots: &[Formula]) -> Option<Proof> {
        let conclusion: Vec<Formula> = addrs.iter().map(|x| x.formula(roots).cloned()).collect::<Option<_>>()?;
        let i = addrs.iter().position(|x| *x == self.addr)?;
        let a = &self.addr;
        let with_sub = |sub: Vec<Addr>| {
            let mut v = addrs[..i].to_vec();
            v.extend(sub);
            v.extend_from_slice(&addrs[i + 1..]);
            v
        };
        let (rule, premises) = match self.kind {
            Kind::Ax => {
                let j = addrs.iter().position(|x| Some(x) == self.other.as_ref())?;
                (Rule::Ax(i, j), vec![])
            }
            Kind::Par => (Rule::Par(i), vec![self.kids[0].to_proof(&with_sub(vec![a.left(), a.right()]), roots)?]),
            Kind::PlusL => (Rule::PlusL(i), vec![self.kids[0].to_proof(&with_sub(vec![a.left()]), roots)?]),
            Kind::PlusR => (Rule::PlusR(i), vec![self.kids[0].to_proof(&with_sub(vec![a.right()]), roots)?]),
            Kind::With => (
                Rule::With(i),
                vec![
                    self.kids[0].to_proof(&with_sub(vec![a.left()]), roots)?,
                    self.kids[1].to_proof(&with_sub(vec![a.right()]), roots)?,
                ],
            ),
            Kind::Tensor => {
                let left_set = self.kids[0].conclusion()?;
                let left: Vec<usize> = (0..addrs.len()).filter(|&k| k != i && left_set.contains(&addrs[k])).collect();
                let (l, r) = tensor_sides(addrs.len(), i, &left);
                let la: Vec<Addr> = l.iter().map(|&k| if k == i { a.left() } else { addrs[k].clone() }).collect();
                let ra: Vec<Addr> = r.iter().map(|&k| if k == i { a.right() } else { addrs[k].clone() }).collect();
                (
                    Rule::Tensor(i, left),
                    vec![self.kids[0].to_proof(&la, roots)?, self.kids[1].to_proof(&ra, roots)?],
                )
            }
        };
        Some(Proof {
            rule,
            premises,
            conclusion,
        })
    }

    fn at(&self, path: &[usize]) -> Option<&AProof> {
        let mut p = self;
        for &k in path {
            p = p.kids.get(k)?;
        }
        Some(p)
    }

    fn replaced(&self, path: &[usize], with: AProof) -> AProof {
        if path.is_empty() {
            return with;
        }
        let mut out = self.clone();
        out.kids[path[0]] = self.kids[path[0]].replaced(&path[1..], with);
        out
    }
}

fn allowed(lower: Kind, upper: Kind) -> bool {
    !(lower.negative() && upper.positive())
}

fn creates(lower: &AProof, upper: &AProof) -> bool {
    upper.addr.parent().as_ref() == Some(&lower.addr)
}

/// One-step exchanges of the rule at `n` with the rule(s) just above it.
fn exchanges(n: &AProof) -> Vec<AProof> {
    let mut out = Vec::new();
    let a = &n.addr;
    match n.kind {
        Kind::Ax => {}
        k if k.unary() => {
            let c = &n.kids[0];
            if c.kind == Kind::Ax || creates(n, c) || !allowed(k, c.kind) {
                return out;
            }
            let lift = |g: &AProof| AProof::node(k, a, vec![g.clone()]);
            let b = &c.addr;
            match c.kind {
                u if u.unary() => out.push(AProof::node(u, b, vec![lift(&c.kids[0])])),
                Kind::Tensor => {
                    out.push(AProof::node(Kind::Tensor, b, vec![lift(&c.kids[0]), c.kids[1].clone()]));
                    out.push(AProof::node(Kind::Tensor, b, vec![c.kids[0].clone(), lift(&c.kids[1])]));
                }
                Kind::With => out.push(AProof::node(Kind::With, b, vec![lift(&c.kids[0]), lift(&c.kids[1])])),
                _ => {}
            }
        }
        Kind::Tensor => {
            for side in 0..2 {
                let c = &n.kids[side];
                if c.kind == Kind::Ax || creates(n, c) {
                    continue;
                }
                let lift = |g: &AProof| {
                    let mut kids = n.kids.clone();
                    kids[side] = g.clone();
                    AProof::node(Kind::Tensor, a, kids)
                };
                let b = &c.addr;
                match c.kind {
                    u if u.unary() => out.push(AProof::node(u, b, vec![lift(&c.kids[0])])),
                    Kind::Tensor => {
                        out.push(AProof::node(Kind::Tensor, b, vec![lift(&c.kids[0]), c.kids[1].clone()]));
                        out.push(AProof::node(Kind::Tensor, b, vec![c.kids[0].clone(), lift(&c.kids[1])]));
                    }
                    Kind::With => out.push(AProof::node(Kind::With, b, vec![lift(&c.kids[0]), lift(&c.kids[1])])),
                    _ => {}
                }
            }
        }
        Kind::With => {
            let (l, r) = (&n.kids[0], &n.kids[1]);
            if l.kind != r.kind || l.addr != r.addr || l.kind == Kind::Ax || creates(n, l) || !allowed(Kind::With, l.kind) {
                return out;
            }
            let b = &l.addr;
            match l.kind {
                u if u.unary() => out.push(AProof::node(
                    u,
                    b,
                    vec![AProof::node(Kind::With, a, vec![l.kids[0].clone(), r.kids[0].clone()])],
                )),
                Kind::With => out.push(AProof::node(
                    Kind::With,
                    b,
                    vec![
                        AProof::node(Kind::With, a, vec![l.kids[0].clone(), r.kids[0].clone()]),
                        AProof::node(Kind::With, a, vec![l.kids[1].clone(), r.kids[1].clone()]),
                    ],
                )),
                Kind::Tensor => {
                    if l.kids[1] == r.kids[1] {
                        out.push(AProof::node(
                            Kind::Tensor,
                            b,
                            vec![AProof::node(Kind::With, a, vec![l.kids[0].clone(), r.kids[0].clone()]), l.kids[1].clone()],
                        ));
                    }
                    if l.kids[0] == r.kids[0] {
                        out.push(AProof::node(
                            Kind::Tensor,
                            b,
                            vec![l.kids[0].clone(), AProof::node(Kind::With, a, vec![l.kids[1].clone(), r.kids[1].clone()])],
                        ));
                    }
                }
                _ => {}
            }
        }
        _ => unreachable!(),
    }
    out
}

fn root_addrs(n: usize) -> Vec<Addr> {
    (0..n).map(Addr::root).collect()
}

/// All proofs obtained by one legal permutation of the rule at `at` with
/// the rule immediately above it.
pub fn permute_rules(p: &Proof, at: &[usize]) -> Result<BTreeSet<Proof>, ProofError> {
    let node = p.node_at(at).ok_or_else(|| ProofError::InvalidNodePath(show_path(at)))?;
    if node.premises.is_empty() {
        return Err(ProofError::InvalidNodePath(format!("{} (axiom leaf)", show_path(at))));
    }
    let roots = &p.conclusion;
    let addrs = root_addrs(roots.len());
    let ap = AProof::from_proof(p, &addrs);
    let target = ap.at(at).expect("paths agree");
    let mut out = BTreeSet::new();
    for candidate in exchanges(target) {
        let whole = ap.replaced(at, candidate);
        if whole.conclusion().as_ref() != Some(&addrs.iter().cloned().collect()) {
            continue;
        }
        if let Some(q) = whole.to_proof(&addrs, roots) {
            if check_proof(&q).is_ok() && q.conclusion == p.conclusion {
                out.insert(q);
            }
        }
    }
    Ok(out)
}

/// Every proof reachable from `p` by one permutation at any node.
pub fn permutation_neighbours(p: &Proof) -> BTreeSet<Proof> {
    let mut out = BTreeSet::new();
    for at in p.internal_nodes() {
        out.extend(permute_rules(p, &at).expect("internal node"));
    }
    out
}

/// The finite class of proofs reachable from `p` by permutations.
pub fn permutation_class(p: &Proof) -> BTreeSet<Proof> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(p.clone());
    queue.push_back(p.clone());
    while let Some(cur) = queue.pop_front() {
        for next in permutation_neighbours(&cur) {
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// `p ≺ q`: `q` is reachable from `p` by a series of permutations.
pub fn precedes(p: &Proof, q: &Proof) -> Result<bool, ProofError> {
    if p.conclusion != q.conclusion {
        return Err(ProofError::DifferentConclusions);
    }
    if p == q {
        return Ok(true);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(p.clone());
    queue.push_back(p.clone());
    while let Some(cur) = queue.pop_front() {
        for next in permutation_neighbours(&cur) {
            if next == *q {
                return Ok(true);
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Exhaustive cut-free proof search.
pub struct ProofSearch {
    provable: HashMap<Vec<Formula>, bool>,
}

impl Default for ProofSearch {
    fn default() -> Self {
        Self::new()
    }
}

impl ProofSearch {
    pub fn new() -> Self {
        ProofSearch { provable: HashMap::new() }
    }

    /// Every rule instance applicable at the root of `seq`, with its premises.
    pub fn rule_instances(seq: &[Formula]) -> Vec<(Rule, Vec<Vec<Formula>>)> {
        let n = seq.len();
        let mut out = Vec::new();
        if n == 2 && seq[0].is_atom() && seq[1] == seq[0].dual() {
            out.push((Rule::Ax(0, 1), vec![]));
        }
        for (i, f) in seq.iter().enumerate() {
            let rules: Vec<Rule> = match f {
                Formula::Par(..) => vec![Rule::Par(i)],
                Formula::With(..) => vec![Rule::With(i)],
                Formula::Plus(..) => vec![Rule::PlusL(i), Rule::PlusR(i)],
                Formula::Tensor(..) => {
                    let ctx: Vec<usize> = (0..n).filter(|&k| k != i).collect();
                    (0..1u32 << ctx.len())
                        .map(|mask| {
                            let left = ctx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
                            Rule::Tensor(i, left)
                        })
                        .collect()
                }
                _ => vec![],
            };
            for r in rules {
                let prem = premise_sequents(&r, seq, &[]).expect("applicable rule");
                out.push((r, prem));
            }
        }
        out
    }

    pub fn is_provable(&mut self, seq: &[Formula]) -> bool {
        if let Some(&b) = self.provable.get(seq) {
            return b;
        }
        let ok = ProofSearch::rule_instances(seq)
            .into_iter()
            .any(|(_, prem)| prem.iter().all(|s| self.is_provable(s)));
        self.provable.insert(seq.to_vec(), ok);
        ok
    }

    /// Up to `limit` proofs of `seq`, in a deterministic order.
    pub fn proofs(&mut self, seq: &[Formula], limit: usize) -> Vec<Proof> {
        let mut out = Vec::new();
        if limit == 0 || !self.is_provable(seq) {
            return out;
        }
        for (rule, prem) in ProofSearch::rule_instances(seq) {
            if !prem.iter().all(|s| self.is_provable(s)) {
                continue;
            }
            let mut combos: Vec<Vec<Proof>> = vec![vec![]];
            for s in &prem {
                let subs = self.proofs(s, limit);
                let mut next = Vec::new();
                for c in &combos {
                    for q in &subs {
                        if next.len() >= limit {
                            break;
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
                if out.len() >= limit {
                    return out;
                }
            }
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::parse_formula;

    /// Tensor first, then the par in its left premise.
    pub(crate) const LEFT: &str =
        "tensor(1,[0], par(0, tensor(2,[0], ax(0,1), ax(0,1))), par(0, ax(0,1))) : |- (~X | ~Y), ((X * Y) * (~Z | Z))";
    /// Par first.
    pub(crate) const RIGHT: &str =
        "par(0, tensor(2,[0,1], tensor(2,[0], ax(0,1), ax(0,1)), par(0, ax(0,1)))) : |- (~X | ~Y), ((X * Y) * (~Z | Z))";

    #[test]
    fn identity_proofs_check() {
        for text in ["X", "(X * ~Y)", "((X & Y) | (~Z + X))", "(~X + (Y * Z))"] {
            let a = crate::parse_formula(text).unwrap();
            let p = identity_proof(&a);
            assert_eq!(check_proof(&p).unwrap(), vec![a.dual(), a.clone()]);
        }
    }

    #[test]
    fn parse_axiom_and_par() {
        let p = parse_proof("ax(0,1) : |- ~X, X").unwrap();
        assert_eq!(p.rule, Rule::Ax(0, 1));
        let p = parse_proof("par(0, ax(0,1)) : |- (~X | X)").unwrap();
        assert_eq!(p.rule, Rule::Par(0));
        assert_eq!(p.premises[0].rule, Rule::Ax(0, 1));
        assert_eq!(check_proof(&p).unwrap(), vec![parse_formula("(~X | X)").unwrap()]);
        let back: Proof = p.to_string().parse().unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_requires_root_conclusion() {
        assert_eq!(parse_proof("ax(0,1)"), Err(ProofError::MissingConclusion));
        assert!(matches!(parse_proof("ax(0 : |- X"), Err(ProofError::Parse(_))));
    }

    #[test]
    fn overlapping_split_is_rejected() {
        let err = parse_proof("tensor(0,[0], ax(0,1), ax(0,1)) : |- (X * Y), ~X, ~Y").unwrap_err();
        assert!(matches!(err, ProofError::BadSplit { .. }));
        assert!(err.to_string().contains("split not a partition"));
        let seq = vec![parse_formula("(X * Y)").unwrap(), parse_formula("~X").unwrap(), parse_formula("~Y").unwrap()];
        let p = Proof {
            rule: Rule::Tensor(0, vec![1, 1]),
            premises: vec![],
            conclusion: seq,
        };
        assert!(matches!(check_proof(&p), Err(ProofError::BadSplit { .. })));
    }

    #[test]
    fn non_atomic_axiom_is_rejected() {
        let err = parse_proof("ax(0,1) : |- (X | Y), (~X * ~Y)").unwrap_err();
        assert!(matches!(err, ProofError::NonAtomicAxiom { .. }));
    }

    #[test]
    fn inner_annotations_are_checked() {
        assert!(parse_proof("par(0, ax(0,1) : |- ~X, X) : |- (~X | X)").is_ok());
        assert!(parse_proof("par(0, ax(0,1) : |- X, ~X) : |- (~X | X)").is_err());
        assert!(parse_proof("tensor(0,[1], ax(0,1) : |- X, ~X, ax(0,1)) : |- (X * Y), ~X, ~Y").is_ok());
    }

    #[test]
    fn left_proof_permutes_to_par_first() {
        let left = parse_proof(LEFT).unwrap();
        let results = permute_rules(&left, &[]).unwrap();
        let right = parse_proof(RIGHT).unwrap();
        assert!(results.contains(&right), "{results:?}");
        assert!(precedes(&left, &right).unwrap());
        assert!(precedes(&left, &left).unwrap());
        for q in &results {
            assert_eq!(check_proof(q).unwrap(), left.conclusion);
        }
    }

    #[test]
    fn created_formula_blocks_permutation() {
        let p = parse_proof("par(0, tensor(1,[0], ax(0,1), ax(0,1))) : |- (~X | (X * Y)), ~Y").unwrap();
        assert!(permute_rules(&p, &[]).unwrap().is_empty());
        assert!(matches!(permute_rules(&p, &[0, 0]), Err(ProofError::InvalidNodePath(_))));
        assert!(matches!(permute_rules(&p, &[3]), Err(ProofError::InvalidNodePath(_))));
    }

    #[test]
    fn negative_pairs_permute_back() {
        let p = parse_proof(
            "par(0, par(2, tensor(3,[0], ax(0,1), tensor(2,[0], ax(0,1), ax(0,1))))) : |- (~X | ~Y), (Z | (X * (Y * ~Z)))",
        )
        .unwrap();
        let once = permute_rules(&p, &[]).unwrap();
        assert_eq!(once.len(), 1);
        let q = once.iter().next().unwrap();
        assert_eq!(q.rule, Rule::Par(1));
        assert!(permute_rules(q, &[]).unwrap().contains(&p));
    }

    #[test]
    fn different_linkings_are_not_related() {
        let seq = vec![
            parse_formula("(~X | ~X)").unwrap(),
            parse_formula("(X * X)").unwrap(),
        ];
        let mut search = ProofSearch::new();
        let proofs = search.proofs(&seq, 200);
        let classes: Vec<BTreeSet<Proof>> = proofs.iter().map(permutation_class).collect();
        let distinct: BTreeSet<&BTreeSet<Proof>> = classes.iter().collect();
        // the two axiom linkings (straight and crossed) give two classes
        assert_eq!(distinct.len(), 2);
        let (a, b) = {
            let mut it = distinct.iter();
            (it.next().unwrap().iter().next().unwrap(), it.next().unwrap().iter().next().unwrap())
        };
        assert!(!precedes(a, b).unwrap());
        assert!(!precedes(b, a).unwrap());
    }

    #[test]
    fn with_duplicates_context_rules() {
        let p = parse_proof("plusL(0, with(1, ax(0,1), ax(0,1))) : |- (X + Y), (~X & ~X)").unwrap();
        let up = permute_rules(&p, &[]).unwrap();
        assert_eq!(up.len(), 1);
        let q = up.iter().next().unwrap();
        assert!(matches!(q.rule, Rule::With(1)));
        // with below plus does not move back: positive above negative
        assert!(permute_rules(q, &[]).unwrap().is_empty());
    }

    #[test]
    fn search_finds_proofs() {
        let mut s = ProofSearch::new();
        let seq = vec![parse_formula("(~X | X)").unwrap()];
        let ps = s.proofs(&seq, 10);
        assert_eq!(ps.len(), 1);
        assert!(!s.is_provable(&[parse_formula("(X * ~X)").unwrap()]));
        for p in s.proofs(&[parse_formula("((~X | ~Y) | (Y * X))").unwrap()], 10) {
            assert!(check_proof(&p).is_ok());
        }
    }
}
