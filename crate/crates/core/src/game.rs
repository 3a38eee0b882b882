//! The diagonalization game against candidate separating sequences.
//!
//! A candidate is a finite list of open sets `U_1..U_N` that is supposed to
//! split every problem pair `(t,+1), (t,−1)`. The nodes it does split are
//! bucketed into sets `E_{n,m,i}` along which `ℓ` is even, and the game then
//! builds a branch `u_1 ≺ u_2 ≺ …` whose extensions leave every bucket used
//! so far.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::Mutation;
use crate::tau::{ell, tau};
use crate::topology::{BasicOpen, OpenSet, Point, Sign};
use crate::tree::{antichain_index, min_excluded, Fragment, Node, NodeOrRoot};

/// Open sets `U_1, …, U_N` proposed to separate every problem pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub opens: Vec<OpenSet>,
}

/// `E_{n,m,i}`: nodes split by `U_n` in favour of sign `i`, whose chosen
/// base `θ(t)` lies in the antichain `A_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ESet {
    /// 1-based index of the open set.
    pub n: usize,
    pub m: usize,
    pub i: Sign,
    pub nodes: BTreeSet<Node>,
    pub theta: BTreeMap<Node, NodeOrRoot>,
}

/// Membership test for one `E`-set.
pub trait EOracle: Sync {
    fn contains(&self, t: &Node) -> bool;
}

impl EOracle for BTreeSet<Node> {
    fn contains(&self, t: &Node) -> bool {
        BTreeSet::contains(self, t)
    }
}

impl EOracle for ESet {
    fn contains(&self, t: &Node) -> bool {
        self.nodes.contains(t)
    }
}

/// Wraps a predicate as an oracle.
pub struct Predicate<F>(pub F);

impl<F: Fn(&Node) -> bool + Sync> EOracle for Predicate<F> {
    fn contains(&self, t: &Node) -> bool {
        (self.0)(t)
    }
}

fn splits(u: &OpenSet, t: &Node) -> Option<Sign> {
    let plus = u.contains(&Point::new(t.clone(), Sign::Plus));
    let minus = u.contains(&Point::new(t.clone(), Sign::Minus));
    match (plus, minus) {
        (true, false) => Some(Sign::Plus),
        (false, true) => Some(Sign::Minus),
        _ => None,
    }
}

/// Fragment nodes whose problem pair no `U_n` meets in exactly one point.
pub fn uncovered_nodes(c: &Candidate, frag: &Fragment) -> BTreeSet<Node> {
    frag.nodes()
        .filter(|t| c.opens.iter().all(|u| splits(u, t).is_none()))
        .cloned()
        .collect()
}

/// Shortest base `r ≺ t` with `W(r,t,i) ⊆ U`.
fn theta(u: &OpenSet, t: &Node, i: Sign) -> Option<NodeOrRoot> {
    std::iter::once(NodeOrRoot::Root)
        .chain(t.prefixes_from(0).take(t.len()).map(NodeOrRoot::Node))
        .find(|r| {
            BasicOpen::new(r.clone(), t.clone(), i)
                .map(|w| w.members().iter().all(|p| u.contains(p)))
                .unwrap_or(false)
        })
}

/// Buckets the split nodes into the sets `E_{n,m,i}`, ordered by `(n, i, m)`.
pub fn decompose(c: &Candidate, frag: &Fragment) -> Result<Vec<ESet>> {
    let mut buckets: BTreeMap<(usize, Sign, usize), ESet> = BTreeMap::new();
    for (idx, u) in c.opens.iter().enumerate() {
        let n = idx + 1;
        for t in frag.nodes() {
            let Some(i) = splits(u, t) else { continue };
            let r = theta(u, t, i).ok_or_else(|| Error::NoValidTheta {
                n,
                t: t.clone(),
                i: i.value(),
            })?;
            let m = antichain_index(&r);
            let e = buckets.entry((n, i, m)).or_insert_with(|| ESet {
                n,
                m,
                i,
                nodes: BTreeSet::new(),
                theta: BTreeMap::new(),
            });
            e.nodes.insert(t.clone());
            e.theta.insert(t.clone(), r);
        }
    }
    Ok(buckets.into_values().collect())
}

/// Comparable pairs `t ≺ u` of the set with odd `ℓ(t,u)`.
pub fn check_even_ell(e: &ESet) -> Vec<(Node, Node)> {
    let mut out = Vec::new();
    for t in &e.nodes {
        for u in &e.nodes {
            if t.strictly_precedes(u) && ell(t, u).expect("comparable") % 2 == 1 {
                out.push((t.clone(), u.clone()));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub m: usize,
    pub t: Node,
    pub k: u32,
    pub l: u32,
    pub u: Node,
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} t={} k={} l={} u={}",
            self.m, self.t, self.k, self.l, self.u
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// The last branch survives in the fragment and meets no `E`-set.
    Escaped,
    /// No fragment node extends the last branch.
    FragmentExhausted,
    /// A set already used meets the surviving nodes again.
    ObstructionViolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagTrace {
    pub rounds: Vec<Round>,
    pub status: Status,
    pub forbidden: Vec<u32>,
    /// `Λ_{j+1}` restricted to the fragment, one entry per round.
    #[serde(skip)]
    pub survivors: Vec<Vec<Node>>,
}

pub fn diagonalize(esets: &[&dyn EOracle], frag: &Fragment, max_rounds: usize) -> Result<DiagTrace> {
    diagonalize_with(esets, frag, max_rounds, Mutation::None)
}

/// Runs the rounds `Λ_j → (m_j, t_j, k_j, l_j, u_j) → Λ_{j+1}` over the fragment.
///
/// Each round takes the least `m` with `Λ_j ∩ E_m` nonempty and its canonical
/// least member `t`, excludes a fresh `k`, extends `t` by the next fresh
/// value `l`, and keeps the extensions of `u = t ⌢ l` avoiding every `k`.
pub fn diagonalize_with(
    esets: &[&dyn EOracle],
    frag: &Fragment,
    max_rounds: usize,
    mutation: Mutation,
) -> Result<DiagTrace> {
    let mut lambda: Vec<Node> = frag.nodes().cloned().collect();
    let mut forbidden = BTreeSet::new();
    let mut trace = DiagTrace {
        rounds: Vec::new(),
        status: Status::Escaped,
        forbidden: Vec::new(),
        survivors: Vec::new(),
    };
    loop {
        let hit = esets.iter().enumerate().find_map(|(idx, e)| {
            lambda.iter().find(|v| e.contains(v)).map(|t| (idx + 1, t.clone()))
        });
        let Some((m, t)) = hit else {
            trace.status = if lambda.is_empty() {
                Status::FragmentExhausted
            } else {
                Status::Escaped
            };
            return Ok(trace);
        };
        if trace.rounds.last().is_some_and(|prev| m <= prev.m) {
            trace.status = Status::ObstructionViolated;
            return Ok(trace);
        }
        if trace.rounds.len() == max_rounds {
            return Err(Error::RoundBudgetExceeded {
                rounds: max_rounds,
                trace: Box::new(trace),
            });
        }
        let k = min_excluded(&t, &forbidden);
        forbidden.insert(k);
        trace.forbidden.push(k);
        let l = min_excluded(&t, &forbidden);
        let u = t.extend(l)?;
        lambda.retain(|v| {
            u.precedes(v)
                && (mutation == Mutation::LambdaKeepsForbidden
                    || !forbidden.iter().any(|k| v.contains_value(*k)))
        });
        trace.survivors.push(lambda.clone());
        trace.rounds.push(Round { m, t, k, l, u });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub rounds: usize,
    pub survivors_checked: usize,
}

fn invalid(round: usize, reason: impl Into<String>) -> Error {
    Error::TraceInvalid {
        round,
        reason: reason.into(),
    }
}

/// Re-derives every round of the trace and checks the escape certificates.
///
/// For each surviving `v ∈ Λ_{j+1}`: `τ(t_j, v) = (dom t_j)`, so `ℓ(t_j, v) = 1`,
/// `v(dom t_j) = l_j` is the least value of `v` from `dom t_j` on, no excluded
/// `k` lies in the range of `v`, and `v ∉ E_{m_j}`. Recorded survivors are
/// checked as given, then compared against the recomputed ones.
pub fn verify_trace(trace: &DiagTrace, esets: &[&dyn EOracle], frag: &Fragment) -> Result<TraceSummary> {
    let mut lambda: Vec<Node> = frag.nodes().cloned().collect();
    let mut forbidden = BTreeSet::new();
    let mut checked = 0;
    let recorded = trace.survivors.len() == trace.rounds.len();
    for (idx, r) in trace.rounds.iter().enumerate() {
        let j = idx + 1;
        if r.m == 0 || r.m > esets.len() {
            return Err(invalid(j, format!("m = {} is out of range", r.m)));
        }
        let e = esets[r.m - 1];
        if !e.contains(&r.t) {
            return Err(invalid(j, format!("t = {} is not in E_{}", r.t, r.m)));
        }
        if !lambda.contains(&r.t) {
            return Err(invalid(j, format!("t = {} is not in Λ_{j}", r.t)));
        }
        if idx > 0 {
            let prev = &trace.rounds[idx - 1];
            if r.m <= prev.m {
                return Err(invalid(j, format!("m = {} does not exceed {}", r.m, prev.m)));
            }
            if r.k <= prev.l {
                return Err(invalid(j, format!("k = {} does not exceed l = {}", r.k, prev.l)));
            }
            if !prev.u.strictly_precedes(&r.u) {
                return Err(invalid(j, "u does not extend the previous branch"));
            }
        }
        let k = min_excluded(&r.t, &forbidden);
        if r.k != k {
            return Err(invalid(j, format!("k = {} but the least fresh value is {k}", r.k)));
        }
        forbidden.insert(k);
        let l = min_excluded(&r.t, &forbidden);
        if r.l != l || r.l == r.k {
            return Err(invalid(j, format!("l = {} but the least fresh value is {l}", r.l)));
        }
        if r.u.len() != r.t.len() + 1 || !r.t.precedes(&r.u) || r.u.last() != Some(r.l) {
            return Err(invalid(j, format!("u = {} is not t ⌢ l", r.u)));
        }
        if let Some(k) = forbidden.iter().find(|k| r.u.contains_value(**k)) {
            return Err(invalid(j, format!("u = {} contains excluded {k}", r.u)));
        }
        lambda.retain(|v| r.u.precedes(v) && !forbidden.iter().any(|k| v.contains_value(*k)));
        let survivors = if recorded { &trace.survivors[idx] } else { &lambda };
        let dom = r.t.len();
        for v in survivors {
            checked += 1;
            if !r.u.precedes(v) {
                return Err(invalid(j, format!("{v} does not extend u = {}", r.u)));
            }
            if let Some(k) = forbidden.iter().find(|k| v.contains_value(**k)) {
                return Err(invalid(j, format!("{v} survives with excluded value {k}")));
            }
            if v.value_at(dom) != r.l || v.values()[dom..].iter().any(|x| *x < r.l) {
                return Err(invalid(j, format!("l = {} is not the least value of {v} from {dom}", r.l)));
            }
            let seq = tau(&r.t, v)?;
            if seq.positions() != [dom] {
                return Err(invalid(j, format!("τ({}, {v}) = {seq}, expected ({dom})", r.t)));
            }
            if e.contains(v) {
                return Err(invalid(j, format!("{v} survives inside E_{}", r.m)));
            }
        }
        if recorded && *survivors != lambda {
            return Err(invalid(j, "recorded survivors differ from the recomputed set"));
        }
    }
    if trace.forbidden != forbidden.iter().copied().collect::<Vec<_>>() {
        return Err(invalid(trace.rounds.len(), "forbidden list does not match the rounds"));
    }
    let meets_e = lambda.iter().any(|v| esets.iter().any(|e| e.contains(v)));
    let consistent = match trace.status {
        Status::Escaped => !lambda.is_empty() && !meets_e,
        Status::FragmentExhausted => lambda.is_empty(),
        Status::ObstructionViolated => meets_e,
    };
    if !consistent {
        return Err(invalid(trace.rounds.len(), format!("status {:?} does not match", trace.status)));
    }
    Ok(TraceSummary {
        rounds: trace.rounds.len(),
        survivors_checked: checked,
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

    fn w(r: Option<&[u32]>, t: &[u32], i: Sign) -> BasicOpen {
        let r = r.map_or(NodeOrRoot::Root, |r| n(r).into());
        BasicOpen::new(r, n(t), i).unwrap()
    }

    fn two_oracles() -> (BTreeSet<Node>, Predicate<impl Fn(&Node) -> bool + Sync>) {
        ([Node::empty()].into(), Predicate(|t: &Node| t.contains_value(2)))
    }

    #[test]
    fn uncovered_examples() {
        let frag = generate_fragment(1, 2);
        let empty = Candidate::default();
        assert_eq!(uncovered_nodes(&empty, &frag), frag.node_set().clone());

        let root_only = generate_fragment(0, 2);
        let c = Candidate { opens: vec![OpenSet::new(vec![w(None, &[], Plus)])] };
        assert!(uncovered_nodes(&c, &root_only).is_empty());

        let both = Candidate {
            opens: vec![OpenSet::new(vec![w(None, &[0], Plus), w(None, &[0], Minus)])],
        };
        let out = uncovered_nodes(&both, &frag);
        assert!(out.contains(&n(&[0])) && out.contains(&Node::empty()));
        assert!(out.contains(&n(&[1])));
    }

    #[test]
    fn decompose_examples() {
        let frag = generate_fragment(2, 3);
        let c = Candidate { opens: vec![OpenSet::new(vec![w(None, &[0], Plus)])] };
        let es = decompose(&c, &frag).unwrap();
        let plus: Vec<_> = es.iter().filter(|e| e.i == Plus).collect();
        assert!(plus.iter().any(|e| e.nodes.contains(&n(&[0]))));
        let holder = plus.iter().find(|e| e.nodes.contains(&n(&[0]))).unwrap();
        assert_eq!(holder.theta[&n(&[0])], NodeOrRoot::Root);
        assert_eq!(holder.m, 0);
        assert!(es.iter().any(|e| e.i == Minus && e.nodes.contains(&Node::empty())));

        let all: Vec<BasicOpen> = frag
            .nodes()
            .flat_map(|t| [w(None, t.values(), Plus), w(None, t.values(), Minus)])
            .collect();
        let c = Candidate { opens: vec![OpenSet::new(all)] };
        assert!(decompose(&c, &frag).unwrap().is_empty());
        assert!(decompose(&Candidate::default(), &frag).unwrap().is_empty());
    }

    #[test]
    fn even_ell_examples() {
        let mk = |nodes: &[Node]| ESet {
            n: 1,
            m: 0,
            i: Plus,
            nodes: nodes.iter().cloned().collect(),
            theta: BTreeMap::new(),
        };
        assert!(check_even_ell(&mk(&[Node::empty(), n(&[3, 1, 2])])).is_empty());
        assert_eq!(
            check_even_ell(&mk(&[Node::empty(), n(&[0])])),
            vec![(Node::empty(), n(&[0]))]
        );
        assert!(check_even_ell(&mk(&[n(&[4])])).is_empty());
    }

    #[test]
    fn two_round_trace() {
        let frag = generate_fragment(2, 5);
        let (e1, e2) = two_oracles();
        let esets: Vec<&dyn EOracle> = vec![&e1, &e2];
        let trace = diagonalize(&esets, &frag, 10).unwrap();
        assert_eq!(
            trace.rounds,
            vec![
                Round { m: 1, t: Node::empty(), k: 0, l: 1, u: n(&[1]) },
                Round { m: 2, t: n(&[1, 2]), k: 3, l: 4, u: n(&[1, 2, 4]) },
            ]
        );
        assert_eq!(trace.status, Status::FragmentExhausted);
        assert_eq!(trace.forbidden, vec![0, 3]);
        verify_trace(&trace, &esets, &frag).unwrap();
    }

    #[test]
    fn deeper_fragment_exposes_odd_family() {
        // {t : 2 ∈ ran t} is not an even-ℓ family: (1,2) ≺ (1,2,4) with ℓ = 1.
        let frag = generate_fragment(3, 5);
        let (e1, e2) = two_oracles();
        let esets: Vec<&dyn EOracle> = vec![&e1, &e2];
        let trace = diagonalize(&esets, &frag, 10).unwrap();
        assert_eq!(trace.rounds.len(), 2);
        assert_eq!(trace.status, Status::ObstructionViolated);
        assert!(verify_trace(&trace, &esets, &frag).is_err());
    }

    #[test]
    fn empty_and_single_families() {
        let frag = generate_fragment(2, 5);
        let trace = diagonalize(&[], &frag, 3).unwrap();
        assert!(trace.rounds.is_empty());
        assert_eq!(trace.status, Status::Escaped);

        let e1: BTreeSet<Node> = [Node::empty()].into();
        let esets: Vec<&dyn EOracle> = vec![&e1];
        let trace = diagonalize(&esets, &frag, 3).unwrap();
        assert_eq!(trace.rounds.len(), 1);
        assert_eq!(trace.status, Status::Escaped);
        verify_trace(&trace, &esets, &frag).unwrap();
    }

    #[test]
    fn round_budget() {
        let frag = generate_fragment(2, 5);
        let (e1, e2) = two_oracles();
        let esets: Vec<&dyn EOracle> = vec![&e1, &e2];
        match diagonalize(&esets, &frag, 1) {
            Err(Error::RoundBudgetExceeded { rounds, trace }) => {
                assert_eq!(rounds, 1);
                assert_eq!(trace.rounds.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mutated_traces_are_rejected() {
        let frag = generate_fragment(2, 5);
        let (e1, e2) = two_oracles();
        let esets: Vec<&dyn EOracle> = vec![&e1, &e2];
        let good = diagonalize(&esets, &frag, 10).unwrap();

        let mut bad = good.clone();
        bad.rounds[0].l = 0;
        bad.rounds[0].u = n(&[0]);
        assert!(matches!(verify_trace(&bad, &esets, &frag), Err(Error::TraceInvalid { round: 1, .. })));

        let loose = diagonalize_with(&esets, &frag, 10, Mutation::LambdaKeepsForbidden).unwrap();
        assert!(loose.survivors[0].contains(&n(&[1, 0])));
        assert!(matches!(verify_trace(&loose, &esets, &frag), Err(Error::TraceInvalid { .. })));
    }

    #[test]
    fn trace_json_shape() {
        let frag = generate_fragment(2, 5);
        let (e1, e2) = two_oracles();
        let esets: Vec<&dyn EOracle> = vec![&e1, &e2];
        let trace = diagonalize(&esets, &frag, 10).unwrap();
        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "rounds": [
                    {"m": 1, "t": [], "k": 0, "l": 1, "u": [1]},
                    {"m": 2, "t": [1, 2], "k": 3, "l": 4, "u": [1, 2, 4]}
                ],
                "status": "fragment-exhausted",
                "forbidden": [0, 3]
            })
        );
        let back: DiagTrace = serde_json::from_value(json).unwrap();
        verify_trace(&back, &esets, &frag).unwrap();
    }
}
