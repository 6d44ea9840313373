//! Straight-line programs over the two generator symbols `G` and `H`.
//!
//! A program is a list of nodes where each node refers only to earlier ones;
//! the last node is the root. `Conj(x, y)` denotes `y x y^{-1}` and
//! `Comm(x, y)` denotes `x y x^{-1} y^{-1}`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    GenG,
    GenH,
    Mul(usize, usize),
    Inv(usize),
    Pow(usize, BigInt),
    Comm(usize, usize),
    Conj(usize, usize),
}

impl Node {
    fn children(&self) -> Vec<usize> {
        match self {
            Node::GenG | Node::GenH => vec![],
            Node::Inv(a) | Node::Pow(a, _) => vec![*a],
            Node::Mul(a, b) | Node::Comm(a, b) | Node::Conj(a, b) => vec![*a, *b],
        }
    }

    fn remap(&self, f: impl Fn(usize) -> usize) -> Node {
        match self {
            Node::GenG => Node::GenG,
            Node::GenH => Node::GenH,
            Node::Mul(a, b) => Node::Mul(f(*a), f(*b)),
            Node::Inv(a) => Node::Inv(f(*a)),
            Node::Pow(a, e) => Node::Pow(f(*a), e.clone()),
            Node::Comm(a, b) => Node::Comm(f(*a), f(*b)),
            Node::Conj(a, b) => Node::Conj(f(*a), f(*b)),
        }
    }
}

/// A canonical program: deduplicated, topologically ordered by post-order
/// traversal from the root, root last.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Slp {
    nodes: Vec<Node>,
}

impl Slp {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn gen_g() -> Slp {
        Slp {
            nodes: vec![Node::GenG],
        }
    }

    pub fn gen_h() -> Slp {
        Slp {
            nodes: vec![Node::GenH],
        }
    }

    /// Exact value with `G -> g`, `H -> h`. Fails only if a needed inverse
    /// is not integral.
    pub fn eval(&self, g: &IntMatrix, h: &IntMatrix) -> Result<IntMatrix> {
        Evaluator::new(&self.nodes, g, h).value(self.root())
    }

    /// Re-canonicalises a node list with an explicit root.
    fn canonical_from(nodes: &[Node], root: usize) -> Slp {
        let mut b = SlpBuilder::new();
        let id = b.import_nodes(nodes, root);
        b.extract(id)
    }
}

impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, node) in self.nodes.iter().enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            match node {
                Node::GenG => write!(f, "g")?,
                Node::GenH => write!(f, "h")?,
                Node::Mul(a, b) => write!(f, "mul {a} {b}")?,
                Node::Inv(a) => write!(f, "inv {a}")?,
                Node::Pow(a, e) => write!(f, "pow {a} {e}")?,
                Node::Comm(a, b) => write!(f, "comm {a} {b}")?,
                Node::Conj(a, b) => write!(f, "conj {a} {b}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Slp({self})")
    }
}

impl FromStr for Slp {
    type Err = Error;

    /// Parses the `;`-separated text form. Forward or self references,
    /// duplicate nodes and unknown operations are rejected.
    fn from_str(s: &str) -> Result<Slp> {
        let mut nodes = Vec::new();
        let mut seen = HashMap::new();
        for (k, item) in s.split(';').enumerate() {
            let toks: Vec<&str> = item.split_whitespace().collect();
            let idx = |t: Option<&&str>| -> Result<usize> {
                let t = t.ok_or_else(|| Error::Parse(format!("node {k}: missing operand")))?;
                let v: usize = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("node {k}: bad reference {t:?}")))?;
                if v >= k {
                    return Err(Error::Parse(format!("node {k}: forward reference to {v}")));
                }
                Ok(v)
            };
            let arity = match toks.first().copied() {
                Some("g") | Some("h") => 0,
                Some("inv") => 1,
                Some("mul") | Some("comm") | Some("conj") | Some("pow") => 2,
                other => {
                    return Err(Error::Parse(format!(
                        "node {k}: unknown operation {other:?}"
                    )))
                }
            };
            if toks.len() != arity + 1 {
                return Err(Error::Parse(format!("node {k}: wrong operand count")));
            }
            let node = match toks[0] {
                "g" => Node::GenG,
                "h" => Node::GenH,
                "inv" => Node::Inv(idx(toks.get(1))?),
                "mul" => Node::Mul(idx(toks.get(1))?, idx(toks.get(2))?),
                "comm" => Node::Comm(idx(toks.get(1))?, idx(toks.get(2))?),
                "conj" => Node::Conj(idx(toks.get(1))?, idx(toks.get(2))?),
                "pow" => {
                    let e: BigInt = toks[2].parse().map_err(|_| {
                        Error::Parse(format!("node {k}: bad exponent {:?}", toks[2]))
                    })?;
                    Node::Pow(idx(toks.get(1))?, e)
                }
                _ => unreachable!(),
            };
            if seen.insert(node.clone(), k).is_some() {
                return Err(Error::Parse(format!("node {k}: duplicate node")));
            }
            nodes.push(node);
        }
        let root = nodes.len() - 1;
        Ok(Slp::canonical_from(&nodes, root))
    }
}

impl serde::Serialize for Slp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Slp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Slp, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Handle into an [`SlpBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

/// Append-only arena that deduplicates structurally identical nodes, so
/// shared subwords are stored once.
#[derive(Clone, Debug, Default)]
pub struct SlpBuilder {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl SlpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn gen_g(&mut self) -> NodeId {
        self.push(Node::GenG)
    }

    pub fn gen_h(&mut self) -> NodeId {
        self.push(Node::GenH)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Mul(a.0, b.0))
    }

    pub fn inv(&mut self, a: NodeId) -> NodeId {
        self.push(Node::Inv(a.0))
    }

    /// `a^e`; `e = 1` returns `a` itself.
    pub fn pow(&mut self, a: NodeId, e: impl Into<BigInt>) -> NodeId {
        let e = e.into();
        if e.is_one() {
            return a;
        }
        self.push(Node::Pow(a.0, e))
    }

    pub fn comm(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Node::Comm(a.0, b.0))
    }

    /// `y x y^{-1}`.
    pub fn conj(&mut self, x: NodeId, y: NodeId) -> NodeId {
        self.push(Node::Conj(x.0, y.0))
    }

    fn import_nodes(&mut self, nodes: &[Node], root: usize) -> NodeId {
        let mut map: Vec<Option<NodeId>> = vec![None; nodes.len()];
        for k in reachable_postorder(nodes, root) {
            let node = nodes[k].remap(|c| map[c].expect("children imported first").0);
            map[k] = Some(self.push(node));
        }
        map[root].expect("root imported")
    }

    pub fn import(&mut self, slp: &Slp) -> NodeId {
        self.import_nodes(&slp.nodes, slp.root())
    }

    /// Canonical standalone program for the subword rooted at `id`.
    pub fn extract(&self, id: NodeId) -> Slp {
        let order = reachable_postorder(&self.nodes, id.0);
        let mut map = HashMap::with_capacity(order.len());
        let mut nodes = Vec::with_capacity(order.len());
        for k in order {
            map.insert(k, nodes.len());
            nodes.push(self.nodes[k].remap(|c| map[&c]));
        }
        Slp { nodes }
    }

    pub fn eval(&self, id: NodeId, g: &IntMatrix, h: &IntMatrix) -> Result<IntMatrix> {
        Evaluator::new(&self.nodes, g, h).value(id.0)
    }
}

/// Post-order from `root`, children left to right, each node once.
fn reachable_postorder(nodes: &[Node], root: usize) -> Vec<usize> {
    let mut visited = vec![false; nodes.len()];
    let mut order = Vec::new();
    let mut stack: Vec<(usize, bool)> = vec![(root, false)];
    while let Some((k, expanded)) = stack.pop() {
        if expanded {
            order.push(k);
            continue;
        }
        if visited[k] {
            continue;
        }
        visited[k] = true;
        stack.push((k, true));
        for c in nodes[k].children().into_iter().rev() {
            if !visited[c] {
                stack.push((c, false));
            }
        }
    }
    order
}

/// Per-call memo of node values and their inverses.
struct Evaluator<'a> {
    nodes: &'a [Node],
    g: &'a IntMatrix,
    h: &'a IntMatrix,
    vals: HashMap<usize, IntMatrix>,
    invs: HashMap<usize, IntMatrix>,
}

impl<'a> Evaluator<'a> {
    fn new(nodes: &'a [Node], g: &'a IntMatrix, h: &'a IntMatrix) -> Self {
        Evaluator {
            nodes,
            g,
            h,
            vals: HashMap::new(),
            invs: HashMap::new(),
        }
    }

    fn value(&mut self, root: usize) -> Result<IntMatrix> {
        for k in reachable_postorder(self.nodes, root) {
            let v = match &self.nodes[k] {
                Node::GenG => self.g.clone(),
                Node::GenH => self.h.clone(),
                Node::Mul(a, b) => &self.vals[a] * &self.vals[b],
                Node::Inv(a) => self.inverse(*a)?,
                Node::Pow(a, e) => {
                    let base = if e.is_negative() {
                        self.inverse(*a)?
                    } else {
                        self.vals[a].clone()
                    };
                    pow_big(&base, &e.abs())
                }
                Node::Comm(a, b) => {
                    let (ia, ib) = (self.inverse(*a)?, self.inverse(*b)?);
                    &(&(&self.vals[a] * &self.vals[b]) * &ia) * &ib
                }
                Node::Conj(x, y) => {
                    let iy = self.inverse(*y)?;
                    &(&self.vals[y] * &self.vals[x]) * &iy
                }
            };
            self.vals.insert(k, v);
        }
        Ok(self.vals[&root].clone())
    }

    fn inverse(&mut self, k: usize) -> Result<IntMatrix> {
        if let Some(v) = self.invs.get(&k) {
            return Ok(v.clone());
        }
        let v = self.vals[&k].inverse()?;
        self.invs.insert(k, v.clone());
        Ok(v)
    }
}

/// Binary powering with a non-negative big exponent.
pub fn pow_big(base: &IntMatrix, e: &BigInt) -> IntMatrix {
    let n = base.dim();
    let mut acc = IntMatrix::identity(n);
    if e.is_zero() {
        return acc;
    }
    let bits = e.bits();
    for k in (0..bits).rev() {
        acc = &acc * &acc;
        if e.bit(k) {
            acc = &acc * base;
        }
    }
    acc
}
