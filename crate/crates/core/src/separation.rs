//! `G_δ`-diagonal families `𝒢_p` and ☆-sequences.
//!
//! `V(u,i,p)` collects the points `(t, (−1)^{ℓ(t,u)}·i)` with `t ≼ u` and
//! `p(t,u) ≥ p`. Two distinct points share a member of `𝒢_p` only while `p`
//! stays below a threshold fixed by the pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::mutation::Mutation;
use crate::tau::{ell, local_extension_base, p_value};
use crate::topology::{BasicOpen, Point, Sign};
use crate::tree::{Fragment, Node};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VSet {
    pub u: Node,
    pub i: Sign,
    pub p: u32,
}

impl VSet {
    pub fn new(u: Node, i: Sign, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::ConfigInvalid("V-set threshold must be at least 1".into()));
        }
        Ok(VSet { u, i, p })
    }
}

impl fmt::Display for VSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({}, {}, {})", self.u, self.i, self.p)
    }
}

pub fn v_members(v: &VSet) -> BTreeSet<Point> {
    v_members_with(v, Mutation::None)
}

pub fn v_members_with(v: &VSet, mutation: Mutation) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    for t in v.u.prefixes_from(0) {
        if !p_value(&t, &v.u).expect("prefix").at_least(v.p) {
            continue;
        }
        let j = v.i.alternate(ell(&t, &v.u).expect("prefix"));
        if mutation == Mutation::VIgnoresSign {
            out.insert(Point::new(t.clone(), -j));
        }
        out.insert(Point::new(t, j));
    }
    out
}

/// Bound `u₂(dom u₁) + 1` on the separating threshold of a comparable pair
/// `u₁ ≺ u₂`; `None` when the nodes are equal or incomparable.
pub fn threshold_bound(p1: &Point, p2: &Point) -> Option<u32> {
    let (a, b) = if p1.node.len() <= p2.node.len() {
        (&p1.node, &p2.node)
    } else {
        (&p2.node, &p1.node)
    };
    a.strictly_precedes(b).then(|| b.value_at(a.len()) + 1)
}

/// Least `p*` such that no `V(u,i,p)` with `p ≥ p*` and `u` in the fragment
/// contains both points.
///
/// Co-membership forces both nodes below `u`, and for fixed `u` the sign `i`
/// is pinned by the longer point, so the enumeration runs over extensions of
/// the longer node only.
pub fn separating_threshold(p1: &Point, p2: &Point, frag: &Fragment) -> Result<u32> {
    if p1 == p2 {
        return Err(Error::EqualPoints(p1.clone()));
    }
    let (a, b) = if p1.node.len() <= p2.node.len() {
        (p1, p2)
    } else {
        (p2, p1)
    };
    if !a.node.strictly_precedes(&b.node) {
        return Ok(1);
    }
    let mut best: Option<u32> = None;
    for u in frag.extensions_of(&b.node) {
        let i = b.sign.alternate(ell(&b.node, u)?);
        if a.sign != i.alternate(ell(&a.node, u)?) {
            continue;
        }
        let reach = std::cmp::min(p_value(&a.node, u)?, p_value(&b.node, u)?);
        if let crate::tau::PValue::Finite(v) = reach {
            best = Some(best.map_or(v, |x| x.max(v)));
        }
    }
    Ok(best.map_or(1, |v| v + 1).max(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GdeltaSummary {
    pub pairs_checked: usize,
    pub vsets_checked: usize,
    pub max_threshold: u32,
}

fn all_points(frag: &Fragment) -> Vec<Point> {
    frag.nodes()
        .flat_map(|n| Sign::BOTH.map(|s| Point::new(n.clone(), s)))
        .collect()
}

/// Checks that each `V(u,i,p)` with `u` in the fragment and `p ≤ p_max` is
/// open around each of its points and that `𝒢_p` covers the fragment.
fn check_vsets(frag: &Fragment, p_max: u32, mutation: Mutation) -> Result<usize> {
    let mut checked = 0;
    for p in 1..=p_max {
        for u in frag.nodes() {
            for i in Sign::BOTH {
                let v = VSet::new(u.clone(), i, p)?;
                let members = v_members_with(&v, mutation);
                checked += 1;
                if !members.contains(&Point::new(u.clone(), i)) {
                    return Err(Error::Counterexample(json!({
                        "kind": "cover", "v": v, "missing": Point::new(u.clone(), i),
                    })));
                }
                for q in &members {
                    let r = if q.node == *u {
                        q.node.predecessor()
                    } else {
                        local_extension_base(&q.node, u)?
                    };
                    let w = BasicOpen::new(r, q.node.clone(), q.sign)?;
                    let p_here = p_value(&q.node, u)?;
                    for s in w.members() {
                        let same_p = q.node == *u || p_value(&s.node, u)? == p_here;
                        if !members.contains(&s) || !same_p {
                            return Err(Error::Counterexample(json!({
                                "kind": "openness", "v": v, "point": q, "neighbourhood": w,
                            })));
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

pub fn verify_gdelta(frag: &Fragment, p_max: u32) -> Result<GdeltaSummary> {
    verify_gdelta_with(frag, p_max, Mutation::None)
}

/// Exhaustive `G_δ`-diagonal check over the fragment.
pub fn verify_gdelta_with(frag: &Fragment, p_max: u32, mutation: Mutation) -> Result<GdeltaSummary> {
    let points = all_points(frag);
    let pairs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|a| (a + 1..points.len()).map(move |b| (a, b)))
        .collect();
    verify_gdelta_pairs(frag, p_max, mutation, &points, &pairs)
}

/// `G_δ` check restricted to the given index pairs into `points`.
pub fn verify_gdelta_pairs(
    frag: &Fragment,
    p_max: u32,
    mutation: Mutation,
    points: &[Point],
    pairs: &[(usize, usize)],
) -> Result<GdeltaSummary> {
    let vsets_checked = check_vsets(frag, p_max, mutation)?;
    let max_threshold = pairs
        .par_iter()
        .map(|&(a, b)| check_pair(&points[a], &points[b], frag, p_max, mutation))
        .try_reduce(|| 1, |x, y| Ok(x.max(y)))?;
    Ok(GdeltaSummary {
        pairs_checked: pairs.len(),
        vsets_checked,
        max_threshold,
    })
}

fn check_pair(x: &Point, y: &Point, frag: &Fragment, p_max: u32, mutation: Mutation) -> Result<u32> {
    let threshold = separating_threshold(x, y, frag)?;
    if threshold > p_max {
        return Err(Error::Counterexample(json!({
            "kind": "threshold", "pair": [x, y], "threshold": threshold, "p_max": p_max,
        })));
    }
    let top = if x.node.len() >= y.node.len() { &x.node } else { &y.node };
    for u in frag.extensions_of(top) {
        for i in Sign::BOTH {
            let v = VSet::new(u.clone(), i, threshold)?;
            let members = v_members_with(&v, mutation);
            if members.contains(x) && members.contains(y) {
                return Err(Error::Counterexample(json!({
                    "kind": "separation", "pair": [x, y], "v": v,
                })));
            }
        }
    }
    Ok(threshold)
}

/// A point of the one-point compactification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarPoint {
    Finite(Point),
    Infinity,
}

impl fmt::Display for StarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarPoint::Finite(p) => p.fmt(f),
            StarPoint::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for StarPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StarPoint::Finite(p) => p.serialize(serializer),
            StarPoint::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for StarPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Finite(Point),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Tag(s) if s == "inf" => Ok(StarPoint::Infinity),
            Raw::Tag(s) => Err(serde::de::Error::custom(format!("unknown point tag {s:?}"))),
            Raw::Finite(p) => Ok(StarPoint::Finite(p)),
        }
    }
}

/// A sequence of families of subsets of `points`, stored as point ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSequence {
    pub points: Vec<StarPoint>,
    pub families: Vec<Vec<BTreeSet<usize>>>,
}

impl StarSequence {
    pub fn from_sets(points: Vec<StarPoint>, families: Vec<Vec<BTreeSet<StarPoint>>>) -> Self {
        let ids: BTreeMap<&StarPoint, usize> =
            points.iter().enumerate().map(|(k, p)| (p, k)).collect();
        let families = families
            .iter()
            .map(|fam| {
                fam.iter()
                    .map(|set| set.iter().map(|p| ids[p]).collect())
                    .collect()
            })
            .collect();
        StarSequence { points, families }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarSummary {
    pub pairs_checked: usize,
    pub families: usize,
}

/// The families `𝒢_1, …, 𝒢_{p_max}` over the fragment.
pub fn star_from_gdelta(frag: &Fragment, p_max: u32) -> Result<StarSequence> {
    if p_max == 0 {
        return Err(Error::ConfigInvalid("p_max must be at least 1".into()));
    }
    let points: Vec<StarPoint> = all_points(frag).into_iter().map(StarPoint::Finite).collect();
    let mut families = Vec::new();
    for p in 1..=p_max {
        let mut family = Vec::new();
        for u in frag.nodes() {
            for i in Sign::BOTH {
                let v = VSet::new(u.clone(), i, p)?;
                family.push(v_members(&v).into_iter().map(StarPoint::Finite).collect());
            }
        }
        families.push(family);
    }
    Ok(StarSequence::from_sets(points, families))
}

/// Adds the point at infinity and the single family `{L}`.
pub fn extend_to_compactification(seq: &StarSequence, frag: &Fragment) -> StarSequence {
    let mut points = seq.points.clone();
    let finite: Vec<StarPoint> = all_points(frag).into_iter().map(StarPoint::Finite).collect();
    for p in &finite {
        if !points.contains(p) {
            points.push(p.clone());
        }
    }
    points.push(StarPoint::Infinity);
    let ids: BTreeMap<&StarPoint, usize> = points.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let whole: BTreeSet<usize> = finite.iter().map(|p| ids[p]).collect();
    let mut families = seq.families.clone();
    families.push(vec![whole]);
    StarSequence { points, families }
}

/// Checks both ☆ conditions for every unordered pair of `universe`.
pub fn verify_star(seq: &StarSequence, universe: &[StarPoint]) -> Result<StarSummary> {
    let ids: BTreeMap<&StarPoint, usize> =
        seq.points.iter().enumerate().map(|(k, p)| (p, k)).collect();
    // For each family and point of `universe`, the indices of the sets containing it.
    let memberships: Vec<Vec<Vec<usize>>> = seq
        .families
        .iter()
        .map(|fam| {
            universe
                .iter()
                .map(|x| match ids.get(x) {
                    Some(id) => (0..fam.len()).filter(|k| fam[*k].contains(id)).collect(),
                    None => Vec::new(),
                })
                .collect()
        })
        .collect();
    let disjoint = |a: &[usize], b: &[usize]| a.iter().all(|k| b.binary_search(k).is_err());
    let mut pairs = 0;
    for x in 0..universe.len() {
        for y in x + 1..universe.len() {
            pairs += 1;
            let separated = memberships.iter().any(|m| {
                let (mx, my) = (&m[x], &m[y]);
                (!mx.is_empty() || !my.is_empty()) && disjoint(mx, my)
            });
            if !separated {
                return Err(Error::NotStar {
                    x: universe[x].to_string(),
                    y: universe[y].to_string(),
                });
            }
        }
    }
    Ok(StarSummary {
        pairs_checked: pairs,
        families: seq.families.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::generate_fragment;
    use Sign::{Minus, Plus};

    fn n(v: &[u32]) -> Node {
        Node::new(v.to_vec()).unwrap()
    }

    fn pt(v: &[u32], s: Sign) -> Point {
        Point::new(n(v), s)
    }

    #[test]
    fn v_members_examples() {
        let v = VSet::new(n(&[0, 1]), Plus, 1).unwrap();
        assert_eq!(v_members(&v), [pt(&[0], Minus), pt(&[0, 1], Plus)].into());
        let v = VSet::new(n(&[0, 1]), Plus, 2).unwrap();
        assert_eq!(v_members(&v), [pt(&[0, 1], Plus)].into());
        let v = VSet::new(n(&[2, 0, 1]), Minus, 40).unwrap();
        assert!(v_members(&v).contains(&pt(&[2, 0, 1], Minus)));
        assert!(VSet::new(Node::empty(), Plus, 0).is_err());
    }

    #[test]
    fn threshold_examples() {
        let frag = generate_fragment(2, 3);
        assert_eq!(separating_threshold(&pt(&[0], Minus), &pt(&[0, 1], Plus), &frag).unwrap(), 2);
        assert_eq!(separating_threshold(&pt(&[0], Plus), &pt(&[0], Minus), &frag).unwrap(), 1);
        assert_eq!(separating_threshold(&pt(&[0], Plus), &pt(&[1], Plus), &frag).unwrap(), 1);
        let p = pt(&[0], Plus);
        assert!(separating_threshold(&p, &p, &frag).is_err());
        assert_eq!(threshold_bound(&pt(&[0], Minus), &pt(&[0, 1], Plus)), Some(2));
    }

    #[test]
    fn gdelta_small_fragments() {
        let frag = generate_fragment(2, 3);
        let summary = verify_gdelta(&frag, frag.max_value().unwrap() + 2).unwrap();
        assert_eq!(summary.pairs_checked, 20 * 19 / 2);

        let single = generate_fragment(0, 3);
        let summary = verify_gdelta(&single, 1).unwrap();
        assert_eq!(summary.pairs_checked, 1);
        assert_eq!(summary.max_threshold, 1);
    }

    #[test]
    fn gdelta_detects_signless_membership() {
        let frag = generate_fragment(2, 3);
        let err = verify_gdelta_with(&frag, 4, Mutation::VIgnoresSign).unwrap_err();
        assert!(matches!(err, Error::Counterexample(_)));
    }

    #[test]
    fn star_examples() {
        let x = StarPoint::Finite(pt(&[0], Plus));
        let y = StarPoint::Finite(pt(&[1], Plus));
        let universe = vec![x.clone(), y.clone()];
        let good = StarSequence::from_sets(
            universe.clone(),
            vec![vec![[x.clone()].into()], vec![[y.clone()].into()]],
        );
        assert!(verify_star(&good, &universe).is_ok());
        let bad = StarSequence::from_sets(universe.clone(), vec![vec![[x, y].into()]]);
        assert!(matches!(verify_star(&bad, &universe), Err(Error::NotStar { .. })));
    }

    #[test]
    fn singleton_fragment_star() {
        let frag = generate_fragment(0, 2);
        let seq = star_from_gdelta(&frag, 1).unwrap();
        assert_eq!(seq.families.len(), 1);
        assert_eq!(seq.families[0].len(), 2);
        let ext = extend_to_compactification(&seq, &frag);
        assert_eq!(ext.families.len(), 2);
        assert_eq!(ext.families[1].len(), 1);
        assert!(verify_star(&ext, &ext.points).is_ok());
    }

    #[test]
    fn high_threshold_families_are_singletons() {
        let frag = generate_fragment(2, 3);
        let seq = star_from_gdelta(&frag, frag.max_value().unwrap() + 2).unwrap();
        assert!(seq.families.last().unwrap().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn star_json_uses_point_ids() {
        let frag = generate_fragment(0, 1);
        let seq = extend_to_compactification(&star_from_gdelta(&frag, 1).unwrap(), &frag);
        let json = serde_json::to_value(&seq).unwrap();
        assert_eq!(json["points"][2], "inf");
        assert_eq!(json["families"][1][0], serde_json::json!([0, 1]));
        let back: StarSequence = serde_json::from_value(json).unwrap();
        assert_eq!(back, seq);
    }
}
