//! Finitely supported functions on the duplicate space and the smooth
//! Talagrand operator
//!
//! ```text
//! (Tf)(s,i,n) = 2^{-n} φ(2^n f(s,i)) ∏_{(t,j) ∈ (s,i)^+} ψ(2^{-n} f(t,j) / (f(t,j) − f(s,i)))
//! ```
//!
//! which vanishes when `f(s,i) = 0` or some immediate successor takes the
//! same value. Successors outside the support contribute `ψ(0) = 1`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::topology::{refine_family, BasicOpen, Point, Sign};
use crate::tree::{min_excluded, Fragment, Node, NodeOrRoot};

fn g(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn g_deriv(x: f64) -> f64 {
    if x > 0.0 {
        g(x) / (x * x)
    } else {
        0.0
    }
}

/// Smooth step from 0 on `(-∞,0]` to 1 on `[1,∞)`.
fn smooth_step(y: f64) -> f64 {
    let (a, b) = (g(y), g(1.0 - y));
    a / (a + b)
}

fn smooth_step_deriv(y: f64) -> f64 {
    let (a, b) = (g(y), g(1.0 - y));
    (g_deriv(y) * b + a * g_deriv(1.0 - y)) / ((a + b) * (a + b))
}

/// Even smooth bump: 0 for `|x| ≤ 1/2`, 1 for `|x| ≥ 1`.
pub fn phi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 {
        0.0
    } else if a >= 1.0 {
        1.0
    } else {
        smooth_step(2.0 * a - 1.0)
    }
}

pub fn psi(x: f64) -> f64 {
    1.0 - phi(x)
}

pub fn phi_deriv(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 || a >= 1.0 {
        0.0
    } else {
        2.0 * x.signum() * smooth_step_deriv(2.0 * a - 1.0)
    }
}

/// A real function on the duplicate space with finite support.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FinSuppFn {
    support: BTreeMap<Point, f64>,
}

impl FinSuppFn {
    /// Builds the function, dropping zero values; repeated points are summed.
    pub fn new(values: impl IntoIterator<Item = (Point, f64)>) -> Self {
        let mut support = BTreeMap::new();
        for (p, v) in values {
            *support.entry(p).or_insert(0.0) += v;
        }
        support.retain(|_, v| *v != 0.0);
        FinSuppFn { support }
    }

    pub fn get(&self, p: &Point) -> f64 {
        self.support.get(p).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Point, f64)> + '_ {
        self.support.iter().map(|(p, v)| (p, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.support.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + scale · other`.
    pub fn add_scaled(&self, other: &FinSuppFn, scale: f64) -> FinSuppFn {
        FinSuppFn::new(
            self.support()
                .map(|(p, v)| (p.clone(), v))
                .chain(other.support().map(|(p, v)| (p.clone(), scale * v))),
        )
    }

    /// Supported immediate successors of `p`, i.e. points of `(s,i)^+`.
    pub fn supported_successors<'a>(&'a self, p: &'a Point) -> impl Iterator<Item = (&'a Point, f64)> + 'a {
        self.support().filter(move |(q, _)| {
            q.node.len() == p.node.len() + 1 && p.node.precedes(&q.node)
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SupportEntry {
    node: Node,
    sign: Sign,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct FinSuppJson {
    support: Vec<SupportEntry>,
}

impl Serialize for FinSuppFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FinSuppJson {
            support: self
                .support()
                .map(|(p, value)| SupportEntry {
                    node: p.node.clone(),
                    sign: p.sign,
                    value,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinSuppFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FinSuppJson::deserialize(deserializer)?;
        Ok(FinSuppFn::new(
            raw.support
                .into_iter()
                .map(|e| (Point::new(e.node, e.sign), e.value)),
        ))
    }
}

fn pow2(n: i32) -> f64 {
    2f64.powi(n)
}

/// The operator with an optional tolerance for the equal-successor test.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TalagrandOperator {
    /// Successor values within this distance of `f(s,i)` count as equal.
    pub tolerance: f64,
}

impl TalagrandOperator {
    pub fn eval(&self, f: &FinSuppFn, p: &Point, n: u32) -> f64 {
        let v = f.get(p);
        if v == 0.0 {
            return 0.0;
        }
        let mut product = 1.0;
        for (_, w) in f.supported_successors(p) {
            if (w - v).abs() <= self.tolerance {
                return 0.0;
            }
            product *= psi(pow2(-(n as i32)) * w / (w - v));
        }
        pow2(-(n as i32)) * phi(pow2(n as i32) * v) * product
    }
}

/// `(Tf)(p, n)` with exact equality in the vanishing test.
pub fn t_op(f: &FinSuppFn, p: &Point, n: u32) -> f64 {
    TalagrandOperator::default().eval(f, p, n)
}

/// Immediate successors of `p` with `|f| ≥ delta`.
pub fn finitely_many_large_successors(f: &FinSuppFn, p: &Point, delta: f64) -> BTreeSet<Point> {
    f.supported_successors(p)
        .filter(|(_, w)| w.abs() >= delta)
        .map(|(q, _)| q.clone())
        .collect()
}

/// A norm-attaining point over a node maximal among norm-attaining nodes.
pub fn maximal_norm_attainer(f: &FinSuppFn) -> Result<Point> {
    let norm = f.sup_norm();
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let attainers: Vec<&Point> = f
        .support()
        .filter(|(_, v)| v.abs() == norm)
        .map(|(p, _)| p)
        .collect();
    attainers
        .iter()
        .find(|p| !attainers.iter().any(|q| p.node.strictly_precedes(&q.node)))
        .map(|p| (*p).clone())
        .ok_or(Error::ZeroFunction)
}

/// A norm-attaining point and a level `n` at which the operator is nonzero.
///
/// Takes the least `n ≥ 1` with `2^n |f(s,i)| ≥ 1` and every successor
/// argument of `ψ` inside `[-1/2, 1/2]`, so that all factors equal 1.
pub fn talagrand_witness(f: &FinSuppFn) -> Result<(Point, u32)> {
    let p = maximal_norm_attainer(f)?;
    let v = f.get(&p);
    for n in 1..=1074u32 {
        let scale = pow2(-(n as i32));
        let flat = pow2(n as i32) * v.abs() >= 1.0
            && f
                .supported_successors(&p)
                .all(|(_, w)| (scale * w / (w - v)).abs() <= 0.5);
        if flat && t_op(f, &p, n) != 0.0 {
            return Ok((p, n));
        }
    }
    Err(Error::ZeroAtPoint(p))
}

/// A finite linear combination of indicators of basic open sets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub terms: Vec<(f64, BasicOpen)>,
}

impl StepFunction {
    pub fn eval(&self, p: &Point) -> f64 {
        self.terms
            .iter()
            .filter(|(_, w)| w.contains(p))
            .map(|(a, _)| a)
            .sum()
    }

    /// Same function, with pieces pairwise equal or disjoint.
    pub fn refined(&self) -> StepFunction {
        let sets: Vec<BasicOpen> = self.terms.iter().map(|(_, w)| w.clone()).collect();
        let terms = refine_family(&sets)
            .into_iter()
            .zip(&self.terms)
            .flat_map(|(pieces, (a, _))| pieces.into_iter().map(move |w| (*a, w)))
            .collect();
        StepFunction { terms }
    }

    pub fn to_fin_supp(&self) -> FinSuppFn {
        FinSuppFn::new(
            self.terms
                .iter()
                .flat_map(|(a, w)| w.members().into_iter().map(move |p| (p, *a))),
        )
    }

    /// The nodes `r_k` and `t_k` of all pieces.
    pub fn endpoints(&self) -> BTreeSet<Node> {
        let mut out = BTreeSet::new();
        for (_, w) in &self.terms {
            out.insert(w.t.clone());
            if let NodeOrRoot::Node(r) = &w.r {
                out.insert(r.clone());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborReport {
    /// Fragment points with no successor value within `delta`.
    pub exceptional: BTreeSet<Point>,
    /// Endpoints of the refined pieces.
    pub endpoints: BTreeSet<Node>,
    /// Whether every exceptional point lies over an endpoint.
    pub contained: bool,
}

/// For each fragment point `(s,i)`, looks for `(t,j) ∈ (s,i)^+` with
/// `|f(s,i) − f(t,j)| < delta`.
///
/// Successors off every piece chain all take the value 0 on both signs,
/// so one fresh successor stands in for them and the search is exact.
pub fn step_function_neighbor_check(sf: &StepFunction, frag: &Fragment, delta: f64) -> NeighborReport {
    let refined = sf.refined();
    let endpoints = refined.endpoints();
    let f = refined.to_fin_supp();
    let used: BTreeSet<u32> = refined
        .terms
        .iter()
        .flat_map(|(_, w)| w.t.values().iter().copied())
        .collect();
    let mut exceptional = BTreeSet::new();
    for s in frag.nodes() {
        let mut children: BTreeSet<Node> = refined
            .terms
            .iter()
            .filter(|(_, w)| s.strictly_precedes(&w.t))
            .map(|(_, w)| w.t.prefix(s.len() + 1))
            .collect();
        children.insert(
            s.extend(min_excluded(s, &used))
                .expect("fresh value is outside the range"),
        );
        for i in Sign::BOTH {
            let p = Point::new(s.clone(), i);
            let v = f.get(&p);
            let matched = children.iter().any(|c| {
                Sign::BOTH
                    .iter()
                    .any(|j| (v - f.get(&Point::new(c.clone(), *j))).abs() < delta)
            });
            if !matched {
                exceptional.insert(p);
            }
        }
    }
    let contained = exceptional.iter().all(|p| endpoints.contains(&p.node));
    NeighborReport {
        exceptional,
        endpoints,
        contained,
    }
}

/// Directional derivative of `g ↦ (Tg)(p, n)` at `f` along `d`, by the
/// product rule over the `φ` and `ψ` factors.
pub fn directional_derivative(f: &FinSuppFn, p: &Point, n: u32, d: &FinSuppFn) -> f64 {
    let v = f.get(p);
    let dv = d.get(p);
    let scale = pow2(-(n as i32));
    let succ: BTreeSet<Point> = f
        .supported_successors(p)
        .chain(d.supported_successors(p))
        .map(|(q, _)| q.clone())
        .collect();
    let head = scale * phi(v / scale);
    let head_deriv = phi_deriv(v / scale) * dv;
    let args: Vec<(f64, f64)> = succ
        .iter()
        .map(|q| {
            let (w, dw) = (f.get(q), d.get(q));
            let x = scale * w / (w - v);
            let dx = scale * (w * dv - v * dw) / ((w - v) * (w - v));
            (x, dx)
        })
        .collect();
    let product: f64 = args.iter().map(|(x, _)| psi(*x)).product();
    let mut total = head_deriv * product;
    for (k, (xk, dxk)) in args.iter().enumerate() {
        let others: f64 = args
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, (x, _))| psi(*x))
            .product();
        total += head * (-phi_deriv(*xk)) * dxk * others;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub value: f64,
    pub analytic: f64,
    pub central_h: f64,
    pub central_half: f64,
    pub err_h: f64,
    pub err_half: f64,
    /// `err_h / err_half`; about 4 for a second-order scheme.
    pub ratio: f64,
}

/// Central differences at `h` and `h/2` against the analytic derivative.
pub fn smoothness_probe(f: &FinSuppFn, p: &Point, n: u32, d: &FinSuppFn, h: f64) -> Result<ProbeReport> {
    let value = t_op(f, p, n);
    if value == 0.0 {
        return Err(Error::ZeroAtPoint(p.clone()));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::ConfigInvalid(format!("step must be positive, got {h}")));
    }
    let central = |h: f64| {
        let up = t_op(&f.add_scaled(d, h), p, n);
        let down = t_op(&f.add_scaled(d, -h), p, n);
        (up - down) / (2.0 * h)
    };
    let analytic = directional_derivative(f, p, n, d);
    let (central_h, central_half) = (central(h), central(h / 2.0));
    let err_h = (central_h - analytic).abs();
    let err_half = (central_half - analytic).abs();
    Ok(ProbeReport {
        value,
        analytic,
        central_h,
        central_half,
        err_h,
        err_half,
        ratio: err_h / err_half,
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

    fn indicator() -> FinSuppFn {
        let w = BasicOpen::from_root(n(&[0, 1]), Plus);
        FinSuppFn::new(w.members().into_iter().map(|p| (p, 1.0)))
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.25), 0.0);
        assert_eq!(phi(-3.0), 1.0);
        assert_eq!(phi(0.75), 0.5);
        assert_eq!(phi(-0.75), 0.5);
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(psi(0.0), 1.0);
    }

    #[test]
    fn phi_is_monotone_on_the_ramp() {
        let xs: Vec<f64> = (0..=200).map(|k| 0.5 + k as f64 / 400.0).collect();
        assert!(xs.windows(2).all(|w| phi(w[0]) <= phi(w[1])));
    }

    #[test]
    fn phi_deriv_matches_central_difference() {
        for &x in &[0.55, 0.6, 0.75, 0.9, -0.7] {
            let h = 1e-6;
            let fd = (phi(x + h) - phi(x - h)) / (2.0 * h);
            assert!((fd - phi_deriv(x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn t_op_examples() {
        let f = indicator();
        assert_eq!(t_op(&f, &pt(&[0, 1], Plus), 1), 0.5);
        for k in 1..=5 {
            assert_eq!(t_op(&f, &pt(&[], Minus), k), 0.0);
        }
        assert_eq!(t_op(&f, &pt(&[2], Plus), 3), 0.0);
    }

    #[test]
    fn tolerance_widens_the_vanishing_test() {
        let f = FinSuppFn::new([(pt(&[], Plus), 1.0), (pt(&[0], Minus), 1.0 + 1e-12)]);
        let p = pt(&[], Plus);
        assert_eq!(t_op(&f, &p, 50), 2f64.powi(-50));
        let loose = TalagrandOperator { tolerance: 1e-9 };
        assert_eq!(loose.eval(&f, &p, 50), 0.0);
    }

    #[test]
    fn large_successor_examples() {
        let zero = FinSuppFn::default();
        assert!(finitely_many_large_successors(&zero, &pt(&[], Plus), 0.1).is_empty());
        let f = indicator();
        assert_eq!(
            finitely_many_large_successors(&f, &pt(&[], Minus), 0.5),
            [pt(&[0], Minus)].into()
        );
        assert!(finitely_many_large_successors(&f, &pt(&[], Minus), 2.0).is_empty());
    }

    #[test]
    fn attainer_examples() {
        assert_eq!(maximal_norm_attainer(&indicator()).unwrap(), pt(&[0, 1], Plus));
        let single = FinSuppFn::new([(pt(&[3], Minus), -2.0)]);
        assert_eq!(maximal_norm_attainer(&single).unwrap(), pt(&[3], Minus));
        assert_eq!(maximal_norm_attainer(&FinSuppFn::default()), Err(Error::ZeroFunction));
    }

    #[test]
    fn witness_examples() {
        assert_eq!(talagrand_witness(&indicator()).unwrap(), (pt(&[0, 1], Plus), 1));

        let f = FinSuppFn::new([(pt(&[], Minus), 1.0), (pt(&[0], Minus), 0.5)]);
        let (p, k) = talagrand_witness(&f).unwrap();
        assert_eq!((p.clone(), k), (pt(&[], Minus), 1));
        assert_eq!(t_op(&f, &p, k), 0.5);

        let tiny = FinSuppFn::new([(pt(&[1], Plus), 1e-6)]);
        assert_eq!(talagrand_witness(&tiny).unwrap().1, 20);
        assert_eq!(talagrand_witness(&FinSuppFn::default()), Err(Error::ZeroFunction));
    }

    #[test]
    fn neighbor_check_examples() {
        let frag = generate_fragment(2, 3);
        let sf = StepFunction {
            terms: vec![(1.0, BasicOpen::from_root(n(&[0, 1]), Plus))],
        };
        let report = step_function_neighbor_check(&sf, &frag, 0.5);
        assert!(report.contained);
        assert!(report.exceptional.iter().all(|p| p.node == n(&[0, 1])));
        assert!(!report.exceptional.is_empty());

        let empty = step_function_neighbor_check(&StepFunction::default(), &frag, 0.5);
        assert!(empty.exceptional.is_empty());
    }

    #[test]
    fn refinement_preserves_values() {
        let sf = StepFunction {
            terms: vec![
                (1.5, BasicOpen::from_root(n(&[0, 1, 2]), Plus)),
                (-0.5, BasicOpen::from_root(n(&[0, 2]), Minus)),
            ],
        };
        assert_eq!(sf.to_fin_supp(), sf.refined().to_fin_supp());
    }

    #[test]
    fn probe_in_flat_regions_is_exact() {
        let f = indicator();
        let p = pt(&[0, 1], Plus);
        let d = FinSuppFn::new([(pt(&[2], Plus), 1.0)]);
        let report = smoothness_probe(&f, &p, 1, &d, 1e-3).unwrap();
        assert_eq!(report.analytic, 0.0);
        assert_eq!(report.err_h, 0.0);

        let d = FinSuppFn::new([(p.clone(), 1.0)]);
        let report = smoothness_probe(&f, &p, 1, &d, 1e-3).unwrap();
        assert_eq!(report.analytic, 0.0);
        assert_eq!(report.central_h, 0.0);

        assert!(matches!(
            smoothness_probe(&f, &pt(&[], Minus), 1, &d, 1e-3),
            Err(Error::ZeroAtPoint(_))
        ));
    }

    #[test]
    fn probe_on_the_ramp_is_second_order() {
        // 2^1 · 0.375 = 0.75 puts φ at the middle of its ramp.
        let p = pt(&[], Plus);
        let f = FinSuppFn::new([(p.clone(), 0.375)]);
        let d = FinSuppFn::new([(p.clone(), 1.0)]);
        let report = smoothness_probe(&f, &p, 1, &d, 1e-3).unwrap();
        assert!((report.analytic - phi_deriv(0.75)).abs() < 1e-12);
        assert!((3.5..=4.5).contains(&report.ratio), "{report:?}");
    }

    #[test]
    fn json_shape() {
        let f = FinSuppFn::new([(pt(&[0], Minus), 0.5)]);
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"support": [{"node": [0], "sign": -1, "value": 0.5}]})
        );
        assert_eq!(serde_json::from_value::<FinSuppFn>(json).unwrap(), f);
    }
}
