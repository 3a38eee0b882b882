//! Library results against brute-force recomputation from the definitions.

use std::collections::BTreeSet;

use kurepa_core::separation::{separating_threshold, v_members, VSet};
use kurepa_core::talagrand::{t_op, FinSuppFn};
use kurepa_core::tau::{ell, p_value, tau};
use kurepa_core::topology::{hausdorff_witness, members};
use kurepa_core::tree::generate_fragment;
use kurepa_core::{BasicOpen, Fragment, Node, NodeOrRoot, PValue, Point, Sign};

/// Every sequence over `0..alphabet` of length at most `depth`, injective ones only.
fn brute_nodes(depth: usize, alphabet: u32) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..=depth {
        out.extend(layer.iter().cloned());
        layer = layer
            .iter()
            .flat_map(|s| {
                (0..alphabet).map(move |v| {
                    let mut t = s.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out.into_iter()
        .filter(|s| s.iter().collect::<BTreeSet<_>>().len() == s.len())
        .collect()
}

/// Positions on `[from, len)` whose value is below every earlier value on that range.
fn records(t: &[u32], from: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut least = u32::MAX;
    for (j, &v) in t.iter().enumerate().skip(from) {
        if v < least {
            out.push(j);
            least = v;
        }
    }
    out
}

fn brute_ell(s: &Node, t: &Node) -> usize {
    records(t.values(), s.len()).len()
}

fn brute_p(s: &Node, t: &Node) -> PValue {
    t.values()[s.len()..]
        .iter()
        .min()
        .map_or(PValue::Infinity, |v| PValue::Finite(*v))
}

fn flip(i: Sign, k: usize) -> Sign {
    if k.is_multiple_of(2) {
        i
    } else {
        -i
    }
}

fn points(frag: &Fragment) -> Vec<Point> {
    frag.nodes()
        .flat_map(|n| [Point::new(n.clone(), Sign::Plus), Point::new(n.clone(), Sign::Minus)])
        .collect()
}

fn brute_w(w: &BasicOpen, frag: &Fragment) -> BTreeSet<Point> {
    points(frag)
        .into_iter()
        .filter(|p| {
            let above_r = match &w.r {
                NodeOrRoot::Root => true,
                NodeOrRoot::Node(r) => r.strictly_precedes(&p.node),
            };
            above_r && p.node.precedes(&w.t) && p.sign == flip(w.i, brute_ell(&p.node, &w.t))
        })
        .collect()
}

fn brute_v(u: &Node, i: Sign, p: u32, frag: &Fragment) -> BTreeSet<Point> {
    points(frag)
        .into_iter()
        .filter(|q| {
            q.node.precedes(u)
                && brute_p(&q.node, u) >= PValue::Finite(p)
                && q.sign == flip(i, brute_ell(&q.node, u))
        })
        .collect()
}

fn factorial_ratio(a: u64, k: u64) -> u64 {
    (0..k).map(|j| a - j).product()
}

#[test]
fn fragment_sizes_match_enumeration() {
    for (depth, alphabet) in [(0, 0), (1, 1), (2, 3), (3, 4), (3, 5), (4, 5), (4, 6)] {
        let frag = generate_fragment(depth, alphabet);
        let brute = brute_nodes(depth, alphabet);
        let formula: u64 = (0..=depth as u64).map(|k| factorial_ratio(alphabet as u64, k)).sum();
        assert_eq!(frag.len() as u64, formula, "depth {depth} alphabet {alphabet}");
        let got: BTreeSet<Vec<u32>> = frag.nodes().map(|n| n.values().to_vec()).collect();
        assert_eq!(got, brute);
    }
    assert_eq!(generate_fragment(4, 5).len(), 206);
    assert_eq!(generate_fragment(3, 5).len(), 86);
}

#[test]
fn tau_is_the_record_set() {
    let frag = generate_fragment(4, 5);
    for u in frag.nodes() {
        for k in 0..=u.len() {
            let s = u.prefix(k);
            let seq = tau(&s, u).unwrap();
            assert_eq!(seq.positions(), records(u.values(), k), "s={s} u={u}");
            assert_eq!(ell(&s, u).unwrap(), brute_ell(&s, u));
            assert_eq!(p_value(&s, u).unwrap(), brute_p(&s, u));
        }
    }
}

#[test]
fn basic_open_members_match_definition() {
    let frag = generate_fragment(3, 4);
    for t in frag.nodes() {
        let mut bases = vec![NodeOrRoot::Root];
        bases.extend((0..t.len()).map(|k| NodeOrRoot::Node(t.prefix(k))));
        for r in bases {
            for i in Sign::BOTH {
                let w = BasicOpen::new(r.clone(), t.clone(), i).unwrap();
                assert_eq!(members(&w), brute_w(&w, &frag), "{w}");
            }
        }
    }
}

#[test]
fn v_members_match_definition() {
    let frag = generate_fragment(3, 4);
    for u in frag.nodes() {
        for i in Sign::BOTH {
            for p in 1..=6 {
                let v = VSet::new(u.clone(), i, p).unwrap();
                assert_eq!(v_members(&v), brute_v(u, i, p, &frag), "{v}");
            }
        }
    }
}

#[test]
fn separating_threshold_is_least_separating_level() {
    let frag = generate_fragment(3, 4);
    let pts = points(&frag);
    for (a, x) in pts.iter().enumerate() {
        for y in &pts[a + 1..] {
            let together = |p: u32| {
                frag.nodes().any(|u| {
                    Sign::BOTH.iter().any(|&i| {
                        let v = brute_v(u, i, p, &frag);
                        v.contains(x) && v.contains(y)
                    })
                })
            };
            let brute = (1..).find(|&p| !together(p)).unwrap();
            assert_eq!(separating_threshold(x, y, &frag).unwrap(), brute, "{x} {y}");
        }
    }
}

#[test]
fn hausdorff_witnesses_are_disjoint_by_enumeration() {
    let frag = generate_fragment(3, 4);
    let pts = points(&frag);
    for (a, x) in pts.iter().enumerate() {
        for y in &pts[a + 1..] {
            let (w1, w2) = hausdorff_witness(x, y).unwrap();
            let (m1, m2) = (brute_w(&w1, &frag), brute_w(&w2, &frag));
            assert!(m1.contains(x) && m2.contains(y));
            assert!(m1.is_disjoint(&m2), "{x} {y}: {w1} {w2}");
        }
    }
}

fn oracle_phi(x: f64) -> f64 {
    let g = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = x.abs();
    if a <= 0.5 {
        0.0
    } else if a >= 1.0 {
        1.0
    } else {
        let y = 2.0 * a - 1.0;
        g(y) / (g(y) + g(1.0 - y))
    }
}

/// Product over every immediate successor node with a value below `cap`,
/// both signs, supported or not.
fn oracle_t_op(f: &FinSuppFn, p: &Point, n: u32, cap: u32) -> f64 {
    let v = f.get(p);
    if v == 0.0 {
        return 0.0;
    }
    let scale = 0.5f64.powi(n as i32);
    let mut product = 1.0;
    for c in (0..cap).filter(|c| !p.node.contains_value(*c)) {
        let child = p.node.extend(c).unwrap();
        for j in Sign::BOTH {
            let w = f.get(&Point::new(child.clone(), j));
            if w == v {
                return 0.0;
            }
            product *= 1.0 - oracle_phi(scale * w / (w - v));
        }
    }
    scale * oracle_phi(v / scale) * product
}

#[test]
fn t_op_matches_full_successor_product() {
    let frag = generate_fragment(3, 4);
    let pts = points(&frag);
    let values = [0.3, -0.45, 0.75, 1.0, -1.0, 0.125, 0.6, -0.8, 2.0];
    // deterministic spread of small functions over the fragment
    for seed in 0..400usize {
        let support: Vec<(Point, f64)> = (0..4)
            .map(|k| {
                let idx = (seed * 7 + k * 13 + seed / 5) % pts.len();
                (pts[idx].clone(), values[(seed + 3 * k) % values.len()])
            })
            .collect::<std::collections::BTreeMap<_, _>>()
            .into_iter()
            .collect();
        let f = FinSuppFn::new(support.clone());
        for (p, _) in &support {
            for n in [1, 2, 3] {
                let want = oracle_t_op(&f, p, n, 8);
                let got = t_op(&f, p, n);
                assert!((want - got).abs() <= 1e-15, "{p} n={n}: {got} vs {want}");
            }
        }
    }
}
