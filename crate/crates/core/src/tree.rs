//! Kurepa's tree at finite scale.
//!
//! A [`Node`] is a finite injective sequence of naturals, ordered by
//! extension. The empty sequence is the least node; [`NodeOrRoot::Root`]
//! is an extra sentinel strictly below it. A [`Fragment`] is a finite,
//! prefix-closed set of nodes used as a stand-in for the whole tree.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An injective finite sequence of naturals; position `k` holds `t(k)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Node(Vec<u32>);

impl Node {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &v in &values {
            if !seen.insert(v) {
                return Err(Error::DuplicateValue { value: v });
            }
        }
        Ok(Node(values))
    }

    /// Builds a node without the injectivity check.
    ///
    /// Only meant for negative controls: the result may not belong to the tree.
    pub fn from_values_unchecked(values: Vec<u32>) -> Self {
        Node(values)
    }

    pub fn empty() -> Self {
        Node(Vec::new())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// The domain of the node, i.e. its length.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value_at(&self, position: usize) -> u32 {
        self.0[position]
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn contains_value(&self, value: u32) -> bool {
        self.0.contains(&value)
    }

    /// Initial segment of the given length.
    pub fn prefix(&self, len: usize) -> Node {
        Node(self.0[..len].to_vec())
    }

    /// All initial segments with length in `from..=self.len()`, shortest first.
    pub fn prefixes_from(&self, from: usize) -> impl DoubleEndedIterator<Item = Node> + '_ {
        (from..=self.len()).map(move |k| self.prefix(k))
    }

    /// The immediate predecessor: the parent node, or `Root` for the empty node.
    pub fn predecessor(&self) -> NodeOrRoot {
        if self.is_empty() {
            NodeOrRoot::Root
        } else {
            NodeOrRoot::Node(self.prefix(self.len() - 1))
        }
    }

    /// `self ⌢ (value)`.
    pub fn extend(&self, value: u32) -> Result<Node> {
        if self.contains_value(value) {
            return Err(Error::DuplicateValue { value });
        }
        let mut values = self.0.clone();
        values.push(value);
        Ok(Node(values))
    }

    pub fn precedes(&self, other: &Node) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn strictly_precedes(&self, other: &Node) -> bool {
        self.len() < other.len() && self.precedes(other)
    }

    pub fn comparable(&self, other: &Node) -> bool {
        self.precedes(other) || other.precedes(self)
    }
}

impl Ord for Node {
    /// Length first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Node{self}")
    }
}

impl TryFrom<Vec<u32>> for Node {
    type Error = Error;

    fn try_from(values: Vec<u32>) -> Result<Self> {
        Node::new(values)
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<u32>::deserialize(deserializer)?;
        Node::new(values).map_err(serde::de::Error::custom)
    }
}

/// Either the bottom sentinel or a node of the tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum NodeOrRoot {
    Root,
    Node(Node),
}

impl NodeOrRoot {
    pub fn as_node(&self) -> Option<&Node> {
        match self {
            NodeOrRoot::Root => None,
            NodeOrRoot::Node(n) => Some(n),
        }
    }

    /// Shortest length of a node lying strictly above `self`.
    pub fn floor(&self) -> usize {
        match self {
            NodeOrRoot::Root => 0,
            NodeOrRoot::Node(n) => n.len() + 1,
        }
    }

    pub fn strictly_precedes(&self, t: &Node) -> bool {
        match self {
            NodeOrRoot::Root => true,
            NodeOrRoot::Node(r) => r.strictly_precedes(t),
        }
    }
}

impl From<Node> for NodeOrRoot {
    fn from(n: Node) -> Self {
        NodeOrRoot::Node(n)
    }
}

impl fmt::Display for NodeOrRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeOrRoot::Root => write!(f, "0"),
            NodeOrRoot::Node(n) => n.fmt(f),
        }
    }
}

impl Serialize for NodeOrRoot {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NodeOrRoot::Root => serializer.serialize_str("root"),
            NodeOrRoot::Node(n) => n.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for NodeOrRoot {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Values(Vec<u32>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Tag(s) if s == "root" => Ok(NodeOrRoot::Root),
            Raw::Tag(s) => Err(serde::de::Error::custom(format!(
                "expected \"root\" or an array, got {s:?}"
            ))),
            Raw::Values(v) => Node::new(v)
                .map(NodeOrRoot::Node)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// `s ≼ t`: equal, `s` is `Root`, or `s` is an initial segment of `t`.
pub fn precedes(s: &NodeOrRoot, t: &NodeOrRoot) -> bool {
    match (s, t) {
        (NodeOrRoot::Root, _) => true,
        (NodeOrRoot::Node(_), NodeOrRoot::Root) => false,
        (NodeOrRoot::Node(s), NodeOrRoot::Node(t)) => s.precedes(t),
    }
}

/// Largest common predecessor. Never `Root`: the empty node lies below both.
pub fn meet(s: &Node, t: &Node) -> Node {
    let common = s
        .values()
        .iter()
        .zip(t.values())
        .take_while(|(a, b)| a == b)
        .count();
    s.prefix(common)
}

/// Index `n` of the antichain `A_n` containing `x`.
///
/// `A_0 = {Root}`, `A_1 = {∅}`, and a nonempty node with last value `v`
/// lies in `A_{v+2}`.
pub fn antichain_index(x: &NodeOrRoot) -> usize {
    match x {
        NodeOrRoot::Root => 0,
        NodeOrRoot::Node(n) => match n.last() {
            None => 1,
            Some(v) => v as usize + 2,
        },
    }
}

/// Children `s ⌢ (v)` for `v < cap`, `v ∉ ran s`, in increasing `v`.
pub fn immediate_successors(s: &Node, cap: u32) -> Vec<Node> {
    (0..cap)
        .filter(|v| !s.contains_value(*v))
        .map(|v| {
            let mut values = s.values().to_vec();
            values.push(v);
            Node(values)
        })
        .collect()
}

/// Least natural outside `ran s ∪ forbidden`.
pub fn min_excluded(s: &Node, forbidden: &BTreeSet<u32>) -> u32 {
    (0..)
        .find(|v| !s.contains_value(*v) && !forbidden.contains(v))
        .expect("finitely many values are excluded")
}

/// A finite prefix-closed set of nodes with values below `alphabet` and
/// lengths at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    alphabet: u32,
    depth: usize,
    nodes: BTreeSet<Node>,
}

impl Fragment {
    /// Validates the fragment invariants.
    pub fn new(alphabet: u32, depth: usize, nodes: BTreeSet<Node>) -> Result<Self> {
        if !nodes.contains(&Node::empty()) {
            return Err(Error::InvalidFragment("missing the empty node".into()));
        }
        for n in &nodes {
            if n.len() > depth {
                return Err(Error::InvalidFragment(format!(
                    "{n} is longer than depth {depth}"
                )));
            }
            if let Some(v) = n.values().iter().find(|v| **v >= alphabet) {
                return Err(Error::InvalidFragment(format!(
                    "{n} uses value {v} outside alphabet {alphabet}"
                )));
            }
            if !n.is_empty() && !nodes.contains(&n.prefix(n.len() - 1)) {
                return Err(Error::InvalidFragment(format!("{n} has no parent")));
            }
        }
        Ok(Fragment {
            alphabet,
            depth,
            nodes,
        })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &Node) -> bool {
        self.nodes.contains(node)
    }

    /// Nodes in canonical (length-then-lexicographic) order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter()
    }

    pub fn node_set(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn max_value(&self) -> Option<u32> {
        self.nodes.iter().flat_map(|n| n.values()).copied().max()
    }

    /// Members `v` with `t ≼ v`.
    pub fn extensions_of<'a>(&'a self, t: &'a Node) -> impl Iterator<Item = &'a Node> + 'a {
        self.nodes.iter().filter(move |v| t.precedes(v))
    }

    /// Number of comparable ordered pairs `s ≼ t`.
    pub fn comparable_pairs(&self) -> usize {
        self.nodes.iter().map(|t| t.len() + 1).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct FragmentJson {
    alphabet: u32,
    depth: usize,
    nodes: Vec<Node>,
}

impl Serialize for Fragment {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FragmentJson {
            alphabet: self.alphabet,
            depth: self.depth,
            nodes: self.nodes.iter().cloned().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fragment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FragmentJson::deserialize(deserializer)?;
        Fragment::new(raw.alphabet, raw.depth, raw.nodes.into_iter().collect())
            .map_err(serde::de::Error::custom)
    }
}

/// All injective sequences of length at most `depth` over `0..alphabet`.
pub fn generate_fragment(depth: usize, alphabet: u32) -> Fragment {
    let mut nodes = BTreeSet::new();
    let mut layer = vec![Node::empty()];
    for _ in 0..depth {
        let next: Vec<Node> = layer
            .iter()
            .flat_map(|n| immediate_successors(n, alphabet))
            .collect();
        nodes.extend(layer);
        layer = next;
    }
    nodes.extend(layer);
    Fragment {
        alphabet,
        depth,
        nodes,
    }
}

/// Like [`generate_fragment`] but admits repeated values.
///
/// Negative control for the injectivity requirement; the result is not a
/// subset of the tree.
pub fn generate_fragment_unchecked(depth: usize, alphabet: u32) -> Fragment {
    let mut nodes = BTreeSet::new();
    let mut layer = vec![Node::empty()];
    for _ in 0..depth {
        let next: Vec<Node> = layer
            .iter()
            .flat_map(|n| {
                (0..alphabet).map(move |v| {
                    let mut values = n.values().to_vec();
                    values.push(v);
                    Node(values)
                })
            })
            .collect();
        nodes.extend(layer);
        layer = next;
    }
    nodes.extend(layer);
    Fragment {
        alphabet,
        depth,
        nodes,
    }
}
