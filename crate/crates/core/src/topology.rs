//! The duplicate space `D = Λ × {+1,−1}` and its oscillating basis.
//!
//! A basic open set `W(r,t,i)` holds one point over each node `s ∈ (r,t]`,
//! with sign `(−1)^{ℓ(s,t)}·i`. Over a finite node `t` the interval `(r,t]`
//! is a finite chain of prefixes, so every basic open set is finite and all
//! membership questions below are decided exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tau::ell;
use crate::tree::{meet, Node, NodeOrRoot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(−1)^k · self`.
    pub fn alternate(self, k: usize) -> Sign {
        if k.is_multiple_of(2) {
            self
        } else {
            -self
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = Error;

    fn try_from(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::ConfigInvalid(format!("sign must be 1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::try_from(v).map_err(serde::de::Error::custom)
    }
}

/// A point `(node, sign)` of the duplicate space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub node: Node,
    pub sign: Sign,
}

impl Point {
    pub fn new(node: Node, sign: Sign) -> Self {
        Point { node, sign }
    }

    pub fn flipped(&self) -> Point {
        Point::new(self.node.clone(), -self.sign)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.node, self.sign)
    }
}

/// `W(r,t,i)` with `r ≺ t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawBasicOpen")]
pub struct BasicOpen {
    pub r: NodeOrRoot,
    pub t: Node,
    pub i: Sign,
}

#[derive(Deserialize)]
struct RawBasicOpen {
    r: NodeOrRoot,
    t: Node,
    i: Sign,
}

impl TryFrom<RawBasicOpen> for BasicOpen {
    type Error = Error;

    fn try_from(raw: RawBasicOpen) -> Result<Self> {
        BasicOpen::new(raw.r, raw.t, raw.i)
    }
}

impl BasicOpen {
    pub fn new(r: NodeOrRoot, t: Node, i: Sign) -> Result<Self> {
        if !r.strictly_precedes(&t) {
            return Err(Error::NotStrictlyBelow { r, t });
        }
        Ok(BasicOpen { r, t, i })
    }

    /// `W(Root, t, i)`, the largest basic set with top `t`.
    pub fn from_root(t: Node, i: Sign) -> Self {
        BasicOpen {
            r: NodeOrRoot::Root,
            t,
            i,
        }
    }

    /// The nodes of `(r,t]`, shortest first.
    pub fn interval(&self) -> impl DoubleEndedIterator<Item = Node> + '_ {
        self.t.prefixes_from(self.r.floor())
    }

    pub fn in_interval(&self, s: &Node) -> bool {
        s.len() >= self.r.floor() && s.precedes(&self.t)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.in_interval(&p.node) && (sign_at(self, &p.node) == Ok(p.sign))
    }

    /// Points of the set, shortest node first.
    pub fn members(&self) -> Vec<Point> {
        self.interval()
            .map(|s| {
                let j = self.i.alternate(ell(&s, &self.t).expect("s lies below t"));
                Point::new(s, j)
            })
            .collect()
    }

    pub fn is_disjoint(&self, other: &BasicOpen) -> bool {
        self.members().iter().all(|p| !other.contains(p))
    }
}

impl fmt::Display for BasicOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({}, {}, {})", self.r, self.t, self.i)
    }
}

/// Sign carried by `W` over the node `s ∈ (r,t]`.
pub fn sign_at(w: &BasicOpen, s: &Node) -> Result<Sign> {
    if !w.in_interval(s) {
        return Err(Error::OutOfInterval {
            node: s.clone(),
            open: Box::new(w.clone()),
        });
    }
    Ok(w.i.alternate(ell(s, &w.t)?))
}

pub fn contains(w: &BasicOpen, p: &Point) -> bool {
    w.contains(p)
}

pub fn members(w: &BasicOpen) -> BTreeSet<Point> {
    w.members().into_iter().collect()
}

/// A finite union of basic open sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSet {
    pub pieces: Vec<BasicOpen>,
}

impl OpenSet {
    pub fn new(pieces: Vec<BasicOpen>) -> Self {
        OpenSet { pieces }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.pieces.iter().any(|w| w.contains(p))
    }

    pub fn points(&self) -> BTreeSet<Point> {
        self.pieces.iter().flat_map(|w| w.members()).collect()
    }
}

/// A basic set around `p` inside `W1 ∩ W2`.
///
/// The base is the longest of `r₁`, `r₂` and the local-extension bases of
/// `p.node` against both tops.
pub fn refine_intersection(p: &Point, w1: &BasicOpen, w2: &BasicOpen) -> Result<BasicOpen> {
    if !w1.contains(p) || !w2.contains(p) {
        return Err(Error::NotInBoth {
            point: p.clone(),
            first: Box::new(w1.clone()),
            second: Box::new(w2.clone()),
        });
    }
    let t = &p.node;
    let mut base = std::cmp::max_by_key(w1.r.clone(), w2.r.clone(), NodeOrRoot::floor);
    for u in [&w1.t, &w2.t] {
        if t.strictly_precedes(u) {
            let r = crate::tau::local_extension_base(t, u)?;
            if r.floor() > base.floor() {
                base = r;
            }
        }
    }
    BasicOpen::new(base, t.clone(), p.sign)
}

/// Two disjoint basic sets around distinct points.
pub fn hausdorff_witness(p1: &Point, p2: &Point) -> Result<(BasicOpen, BasicOpen)> {
    if p1 == p2 {
        return Err(Error::EqualPoints(p1.clone()));
    }
    let (t1, t2) = (&p1.node, &p2.node);
    let pair = if t1 == t2 {
        (
            BasicOpen::from_root(t1.clone(), p1.sign),
            BasicOpen::from_root(t2.clone(), p2.sign),
        )
    } else if t1.strictly_precedes(t2) {
        (
            BasicOpen::new(t1.predecessor(), t1.clone(), p1.sign)?,
            BasicOpen::new(t1.clone().into(), t2.clone(), p2.sign)?,
        )
    } else if t2.strictly_precedes(t1) {
        (
            BasicOpen::new(t2.clone().into(), t1.clone(), p1.sign)?,
            BasicOpen::new(t2.predecessor(), t2.clone(), p2.sign)?,
        )
    } else {
        let r: NodeOrRoot = meet(t1, t2).into();
        (
            BasicOpen::new(r.clone(), t1.clone(), p1.sign)?,
            BasicOpen::new(r, t2.clone(), p2.sign)?,
        )
    };
    Ok(pair)
}

/// A point of `E` over a tree-minimal node, with a basic set isolating it.
pub fn isolated_point(e: &BTreeSet<Point>) -> Result<(Point, BasicOpen)> {
    let nodes: BTreeSet<&Node> = e.iter().map(|p| &p.node).collect();
    let point = e
        .iter()
        .find(|p| !nodes.iter().any(|n| n.strictly_precedes(&p.node)))
        .ok_or(Error::EmptySet)?;
    let w = BasicOpen::from_root(point.node.clone(), point.sign);
    Ok((point.clone(), w))
}

/// Finite subcover of `W(r,v,i)` found by walking down its chain.
///
/// Starting at the top point, take the first cover element containing the
/// current point, then jump to the longest point below it that this element
/// misses. Stops once the element reaches down to `r`.
pub fn chain_subcover(w: &BasicOpen, cover: &[BasicOpen]) -> Result<Vec<BasicOpen>> {
    let floor = w.r.floor();
    let point_at = |len: usize| {
        let s = w.t.prefix(len);
        let j = w.i.alternate(ell(&s, &w.t).expect("prefix"));
        Point::new(s, j)
    };
    let mut chosen: Vec<usize> = Vec::new();
    let mut current = w.t.len();
    loop {
        let p = point_at(current);
        let idx = cover
            .iter()
            .position(|c| c.contains(&p))
            .ok_or(Error::NotACover(p))?;
        if !chosen.contains(&idx) {
            chosen.push(idx);
        }
        match (floor..current)
            .rev()
            .find(|&k| !cover[idx].contains(&point_at(k)))
        {
            Some(k) => current = k,
            None => break,
        }
    }
    Ok(chosen.into_iter().map(|k| cover[k].clone()).collect())
}

/// Projection data of an open set whose points sit injectively over a chain.
struct ChainProjection {
    top: Node,
    floor: usize,
    signs: BTreeMap<Node, Sign>,
}

fn project(u: &OpenSet, name: &str) -> Result<ChainProjection> {
    let mut signs = BTreeMap::new();
    for p in u.points() {
        if let Some(prev) = signs.insert(p.node.clone(), p.sign) {
            if prev != p.sign {
                return Err(Error::ProjectionMismatch(format!(
                    "{name} holds both signs over {}",
                    p.node
                )));
            }
        }
    }
    // canonical order is length-first, so the last key is a longest node
    let top = signs
        .keys()
        .next_back()
        .cloned()
        .ok_or_else(|| Error::ProjectionMismatch(format!("{name} is empty")))?;
    let floor = signs.keys().map(Node::len).min().unwrap_or(0);
    let is_chain = signs.keys().all(|n| n.precedes(&top));
    if !is_chain || signs.len() != top.len() + 1 - floor {
        return Err(Error::ProjectionMismatch(format!(
            "{name} does not project onto an interval"
        )));
    }
    Ok(ChainProjection { top, floor, signs })
}

/// Aligned decompositions of two open sets over a common interval `(r,t]`.
///
/// Returns `(W₁..W_k)` and `(W′₁..W′_k)` with `U = ⋃Wᵢ`, `V = ⋃W′ᵢ`, each list
/// pairwise disjoint, and each `Wᵢ` either equal to or disjoint from `W′ᵢ`.
/// Each step takes the longest segment that fits inside both sets.
pub fn refine_pair(u: &OpenSet, v: &OpenSet) -> Result<(Vec<BasicOpen>, Vec<BasicOpen>)> {
    let pu = project(u, "U")?;
    let pv = project(v, "V")?;
    if pu.top != pv.top || pu.floor != pv.floor {
        return Err(Error::ProjectionMismatch(format!(
            "U projects onto lengths {}..={} below {}, V onto {}..={} below {}",
            pu.floor,
            pu.top.len(),
            pu.top,
            pv.floor,
            pv.top.len(),
            pv.top
        )));
    }
    let top = pu.top;
    let base_for = |floor: usize| -> NodeOrRoot {
        if floor == 0 {
            NodeOrRoot::Root
        } else {
            top.prefix(floor - 1).into()
        }
    };
    let fits = |w: &BasicOpen, signs: &BTreeMap<Node, Sign>| {
        w.members().iter().all(|p| signs.get(&p.node) == Some(&p.sign))
    };
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let mut current = top.len() as isize;
    while current >= pu.floor as isize {
        let cur = top.prefix(current as usize);
        let (p, q) = (pu.signs[&cur], pv.signs[&cur]);
        let (wl, wr) = (pu.floor..=current as usize)
            .find_map(|f| {
                let wl = BasicOpen::new(base_for(f), cur.clone(), p).ok()?;
                let wr = BasicOpen::new(base_for(f), cur.clone(), q).ok()?;
                (fits(&wl, &pu.signs) && fits(&wr, &pv.signs)).then_some((wl, wr))
            })
            .expect("the singleton segment always fits");
        current = wl.r.floor() as isize - 1;
        left.push(wl);
        right.push(wr);
    }
    Ok((left, right))
}

/// Splits each basic set so that any two resulting pieces are equal or disjoint.
///
/// First cuts every chain at the bases, the tops and the pairwise meets of
/// the tops; two cut segments that share a node then share the whole
/// segment. Each segment is split again, jointly for all sets running
/// through it, into the longest pieces on which every one of those sets is
/// itself a basic set. Returns, for each input set, its pieces ordered from
/// the top down.
pub fn refine_family(family: &[BasicOpen]) -> Vec<Vec<BasicOpen>> {
    let mut cuts: BTreeSet<Node> = BTreeSet::new();
    for w in family {
        cuts.insert(w.t.clone());
        if let NodeOrRoot::Node(r) = &w.r {
            cuts.insert(r.clone());
        }
    }
    for (a, wa) in family.iter().enumerate() {
        for wb in &family[a + 1..] {
            cuts.insert(meet(&wa.t, &wb.t));
        }
    }
    // (base, top) segments of each set, top down
    let segments: Vec<Vec<(NodeOrRoot, Node)>> = family
        .iter()
        .map(|w| {
            let tops: Vec<Node> = w.interval().filter(|s| cuts.contains(s)).collect();
            let mut base = w.r.clone();
            let mut out: Vec<(NodeOrRoot, Node)> = tops
                .into_iter()
                .map(|top| {
                    let seg = (base.clone(), top.clone());
                    base = top.into();
                    seg
                })
                .collect();
            out.reverse();
            out
        })
        .collect();
    let mut users: BTreeMap<(NodeOrRoot, Node), Vec<usize>> = BTreeMap::new();
    for (k, segs) in segments.iter().enumerate() {
        for seg in segs {
            users.entry(seg.clone()).or_default().push(k);
        }
    }
    // sub-segment tops and bases of each shared segment
    let mut splits: BTreeMap<(NodeOrRoot, Node), Vec<(NodeOrRoot, Node)>> = BTreeMap::new();
    for ((base, top), ks) in &users {
        let mut parts = Vec::new();
        let mut current = top.len() as isize;
        while current >= base.floor() as isize {
            let cur = top.prefix(current as usize);
            let lowest = (base.floor()..=current as usize)
                .find(|&f| {
                    let r = if f == base.floor() {
                        base.clone()
                    } else {
                        top.prefix(f - 1).into()
                    };
                    ks.iter().all(|&k| {
                        let w = &family[k];
                        let sign = sign_at(w, &cur).expect("segment lies in the interval");
                        BasicOpen::new(r.clone(), cur.clone(), sign)
                            .map(|piece| piece.members().iter().all(|p| w.contains(p)))
                            .unwrap_or(false)
                    })
                })
                .expect("the singleton segment always fits");
            let r = if lowest == base.floor() {
                base.clone()
            } else {
                top.prefix(lowest - 1).into()
            };
            parts.push((r, cur));
            current = lowest as isize - 1;
        }
        splits.insert((base.clone(), top.clone()), parts);
    }
    family
        .iter()
        .zip(&segments)
        .map(|(w, segs)| {
            segs.iter()
                .flat_map(|seg| &splits[seg])
                .map(|(r, top)| {
                    let sign = sign_at(w, top).expect("segment lies in the interval");
                    BasicOpen::new(r.clone(), top.clone(), sign).expect("base below top")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: &[u32]) -> Node {
        Node::new(v.to_vec()).unwrap()
    }

    fn pt(v: &[u32], s: Sign) -> Point {
        Point::new(n(v), s)
    }

    fn w(r: Option<&[u32]>, t: &[u32], i: Sign) -> BasicOpen {
        let r = r.map_or(NodeOrRoot::Root, |r| n(r).into());
        BasicOpen::new(r, n(t), i).unwrap()
    }

    use Sign::{Minus, Plus};

    #[test]
    fn sign_at_examples() {
        let big = w(None, &[0, 1], Plus);
        assert_eq!(sign_at(&big, &n(&[0, 1])).unwrap(), Plus);
        assert_eq!(sign_at(&big, &n(&[0])).unwrap(), Minus);
        assert_eq!(sign_at(&big, &Node::empty()).unwrap(), Minus);
        assert!(matches!(
            sign_at(&big, &n(&[1])),
            Err(Error::OutOfInterval { .. })
        ));
    }

    #[test]
    fn contains_examples() {
        let big = w(None, &[0, 1], Plus);
        assert!(big.contains(&pt(&[0], Minus)));
        assert!(!big.contains(&pt(&[0], Plus)));
        assert!(!big.contains(&pt(&[1], Minus)));
    }

    #[test]
    fn members_examples() {
        assert_eq!(
            w(None, &[0, 1], Plus).members(),
            vec![pt(&[], Minus), pt(&[0], Minus), pt(&[0, 1], Plus)]
        );
        assert_eq!(w(Some(&[0]), &[0, 1], Plus).members(), vec![pt(&[0, 1], Plus)]);
        assert_eq!(w(None, &[], Plus).members(), vec![pt(&[], Plus)]);
    }

    #[test]
    fn basic_open_requires_strict_base() {
        assert!(BasicOpen::new(n(&[0]).into(), n(&[0]), Plus).is_err());
        assert!(BasicOpen::new(n(&[1]).into(), n(&[0, 2]), Plus).is_err());
        let json = r#"{"r":[0],"t":[0],"i":1}"#;
        assert!(serde_json::from_str::<BasicOpen>(json).is_err());
    }

    #[test]
    fn refine_intersection_examples() {
        let p = pt(&[0], Minus);
        let w1 = w(None, &[0, 1], Plus);
        let w2 = w(None, &[0], Minus);
        let r = refine_intersection(&p, &w1, &w2).unwrap();
        assert_eq!(r, w(Some(&[]), &[0], Minus));
        for q in r.members() {
            assert!(w1.contains(&q) && w2.contains(&q));
        }
        let same = w(Some(&[3]), &[3, 1, 2], Plus);
        let p = pt(&[3, 1, 2], Plus);
        let r = refine_intersection(&p, &same, &same).unwrap();
        assert!(r.contains(&p) && r.members().iter().all(|q| same.contains(q)));
        assert!(matches!(
            refine_intersection(&pt(&[0], Plus), &w1, &w2),
            Err(Error::NotInBoth { .. })
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let (a, b) = hausdorff_witness(&pt(&[0], Plus), &pt(&[0], Minus)).unwrap();
        assert_eq!(a, w(None, &[0], Plus));
        assert_eq!(b, w(None, &[0], Minus));
        assert!(a.is_disjoint(&b));

        let (a, b) = hausdorff_witness(&pt(&[0, 1], Plus), &pt(&[0, 2], Plus)).unwrap();
        assert_eq!(a.r, n(&[0]).into());
        assert_eq!(b.r, n(&[0]).into());
        assert!(a.is_disjoint(&b));

        let (a, b) = hausdorff_witness(&pt(&[0], Plus), &pt(&[0, 2], Minus)).unwrap();
        assert!(a.contains(&pt(&[0], Plus)) && b.contains(&pt(&[0, 2], Minus)));
        assert!(a.is_disjoint(&b));

        let p = pt(&[1], Plus);
        assert_eq!(hausdorff_witness(&p, &p), Err(Error::EqualPoints(p)));
    }

    #[test]
    fn isolated_point_examples() {
        let e: BTreeSet<_> = [pt(&[0], Plus)].into();
        assert_eq!(isolated_point(&e).unwrap(), (pt(&[0], Plus), w(None, &[0], Plus)));
        let e: BTreeSet<_> = [pt(&[], Minus), pt(&[0], Plus)].into();
        let (p, iso) = isolated_point(&e).unwrap();
        assert_eq!(p, pt(&[], Minus));
        assert_eq!(iso.members(), vec![pt(&[], Minus)]);
        let e: BTreeSet<_> = [pt(&[0], Plus), pt(&[1], Plus)].into();
        assert_eq!(isolated_point(&e).unwrap().0, pt(&[0], Plus));
        assert_eq!(isolated_point(&BTreeSet::new()), Err(Error::EmptySet));
    }

    #[test]
    fn chain_subcover_examples() {
        let big = w(None, &[0, 1], Plus);
        assert_eq!(chain_subcover(&big, std::slice::from_ref(&big)).unwrap(), vec![big.clone()]);

        let cover = vec![
            w(Some(&[0]), &[0, 1], Plus),
            w(None, &[], Minus),
            w(Some(&[]), &[0], Minus),
        ];
        assert_eq!(
            chain_subcover(&big, &cover).unwrap(),
            vec![cover[0].clone(), cover[2].clone(), cover[1].clone()]
        );

        // W(0,(0),-1) sits over ∅ with sign +1, so (∅,-1) stays uncovered.
        let short = vec![w(Some(&[0]), &[0, 1], Plus), w(None, &[0], Minus)];
        assert_eq!(
            chain_subcover(&big, &short),
            Err(Error::NotACover(pt(&[], Minus)))
        );
    }

    #[test]
    fn refine_pair_examples() {
        let u = OpenSet::new(vec![w(None, &[0, 1], Plus)]);
        let (a, b) = refine_pair(&u, &u).unwrap();
        assert_eq!(a, u.pieces);
        assert_eq!(b, u.pieces);

        let v = OpenSet::new(vec![w(None, &[0, 1], Minus)]);
        let (a, b) = refine_pair(&u, &v).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        assert!(a[0].is_disjoint(&b[0]));

        let v = OpenSet::new(vec![w(Some(&[0]), &[0, 1], Plus), w(None, &[0], Plus)]);
        let (a, b) = refine_pair(&u, &v).unwrap();
        assert_eq!(
            a,
            vec![
                w(Some(&[0]), &[0, 1], Plus),
                w(Some(&[]), &[0], Minus),
                w(None, &[], Minus)
            ]
        );
        assert_eq!(
            b,
            vec![
                w(Some(&[0]), &[0, 1], Plus),
                w(Some(&[]), &[0], Plus),
                w(None, &[], Minus)
            ]
        );
    }

    #[test]
    fn refine_pair_rejects_mismatch() {
        let u = OpenSet::new(vec![w(None, &[0, 1], Plus)]);
        let v = OpenSet::new(vec![w(None, &[0], Plus)]);
        assert!(matches!(refine_pair(&u, &v), Err(Error::ProjectionMismatch(_))));
        let both = OpenSet::new(vec![w(None, &[0], Plus), w(None, &[0], Minus)]);
        assert!(matches!(refine_pair(&both, &both), Err(Error::ProjectionMismatch(_))));
    }

    #[test]
    fn refine_family_splits_overlaps() {
        let family = vec![w(None, &[0, 1, 2], Plus), w(None, &[0, 3], Minus)];
        let split = refine_family(&family);
        for (w, parts) in family.iter().zip(&split) {
            let union: BTreeSet<Point> = parts.iter().flat_map(|p| p.members()).collect();
            assert_eq!(union, members(w));
        }
        let pieces: Vec<BasicOpen> = split.into_iter().flatten().collect();
        for (a, pa) in pieces.iter().enumerate() {
            for pb in &pieces[a + 1..] {
                assert!(pa == pb || pa.is_disjoint(pb), "{pa} vs {pb}");
            }
        }
    }
}
