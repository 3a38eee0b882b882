//! Seeded random instances for the suites and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::tau::ell;
use crate::talagrand::{t_op, FinSuppFn};
use crate::topology::{BasicOpen, OpenSet, Point, Sign};
use crate::tree::{immediate_successors, Fragment, Node, NodeOrRoot};
use crate::game::Candidate;

pub fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

pub fn random_node<'a, R: Rng>(rng: &mut R, frag: &'a Fragment) -> &'a Node {
    let k = rng.gen_range(0..frag.len());
    frag.nodes().nth(k).expect("index in range")
}

pub fn random_point<R: Rng>(rng: &mut R, frag: &Fragment) -> Point {
    Point::new(random_node(rng, frag).clone(), random_sign(rng))
}

/// Base below `t` whose interval starts at length `floor`.
pub fn base_at(t: &Node, floor: usize) -> NodeOrRoot {
    if floor == 0 {
        NodeOrRoot::Root
    } else {
        t.prefix(floor - 1).into()
    }
}

pub fn random_basic_open<R: Rng>(rng: &mut R, frag: &Fragment) -> BasicOpen {
    let t = random_node(rng, frag).clone();
    let floor = rng.gen_range(0..=t.len());
    BasicOpen::new(base_at(&t, floor), t, random_sign(rng)).expect("base below top")
}

/// A random basic set of the fragment containing `p`.
pub fn random_basic_open_around<R: Rng>(rng: &mut R, frag: &Fragment, p: &Point) -> BasicOpen {
    let tops: Vec<&Node> = frag.extensions_of(&p.node).collect();
    let t = if tops.is_empty() {
        p.node.clone()
    } else {
        (*tops.choose(rng).expect("nonempty")).clone()
    };
    let floor = rng.gen_range(0..=p.node.len());
    let i = p.sign.alternate(ell(&p.node, &t).expect("p lies below t"));
    BasicOpen::new(base_at(&t, floor), t, i).expect("base below top")
}

/// A random decomposition of `(base(floor), top]` into basic sets.
pub fn random_chain_cover<R: Rng>(rng: &mut R, top: &Node, floor: usize) -> OpenSet {
    let mut pieces = Vec::new();
    let mut current = top.len() as isize;
    while current >= floor as isize {
        let low = rng.gen_range(floor..=current as usize);
        let t = top.prefix(current as usize);
        pieces.push(BasicOpen::new(base_at(top, low), t, random_sign(rng)).expect("base below top"));
        current = low as isize - 1;
    }
    OpenSet::new(pieces)
}

/// A family of `count` node sets along which `ℓ` is even on comparable pairs.
pub fn random_even_family<R: Rng>(rng: &mut R, frag: &Fragment, count: usize) -> Vec<BTreeSet<Node>> {
    let nodes: Vec<&Node> = frag.nodes().collect();
    (0..count)
        .map(|_| {
            let density = rng.gen_range(0.02..0.3);
            let mut order = nodes.clone();
            order.shuffle(rng);
            let mut set: BTreeSet<Node> = BTreeSet::new();
            for t in order {
                if !rng.gen_bool(density) {
                    continue;
                }
                let fits = set.iter().all(|s| {
                    if s.strictly_precedes(t) {
                        ell(s, t).expect("comparable").is_multiple_of(2)
                    } else if t.strictly_precedes(s) {
                        ell(t, s).expect("comparable").is_multiple_of(2)
                    } else {
                        true
                    }
                });
                if fits {
                    set.insert(t.clone());
                }
            }
            set
        })
        .collect()
}

/// Up to `max_pieces` random basic sets spread over one to three open sets.
pub fn random_candidate<R: Rng>(rng: &mut R, frag: &Fragment, max_pieces: usize) -> Candidate {
    let total = rng.gen_range(1..=max_pieces.max(1));
    let opens = rng.gen_range(1..=total.min(3));
    let mut out = vec![OpenSet::default(); opens];
    for k in 0..total {
        let slot = if k < opens { k } else { rng.gen_range(0..opens) };
        out[slot].pieces.push(random_basic_open(rng, frag));
    }
    Candidate { opens: out }
}

const RATIONALS: [f64; 8] = [1.0, 0.5, 0.25, 0.75, 0.375, 2.0, 1.5, 0.125];

/// Random finitely supported function on fragment points, mixing a few
/// dyadic values (so that ties occur) with continuous ones.
pub fn random_fin_supp<R: Rng>(rng: &mut R, frag: &Fragment, max_support: usize) -> FinSuppFn {
    let size = rng.gen_range(1..=max_support.max(1));
    let mut values = Vec::new();
    for _ in 0..size {
        let p = if !values.is_empty() && rng.gen_bool(0.5) {
            // bias towards successors of points already chosen
            let (q, _): &(Point, f64) = values.choose(rng).expect("nonempty");
            let kids = immediate_successors(&q.node, frag.alphabet());
            match kids.choose(rng) {
                Some(c) if frag.contains(c) => Point::new(c.clone(), random_sign(rng)),
                _ => random_point(rng, frag),
            }
        } else {
            random_point(rng, frag)
        };
        let v = if rng.gen_bool(0.5) {
            let r = *RATIONALS.choose(rng).expect("nonempty");
            if rng.gen_bool(0.5) { r } else { -r }
        } else {
            rng.gen_range(-2.0..2.0)
        };
        values.push((p, v));
    }
    let mut seen = BTreeSet::new();
    values.retain(|(p, _)| seen.insert(p.clone()));
    FinSuppFn::new(values)
}

/// An instance for the smoothness probe: every `φ` and `ψ` argument sits on
/// the ramp, away from the flat regions.
///
/// Level `n = 1` keeps `|w − v|` comparable to `|v|`, so the `ψ` arguments move
/// at most a few times faster than `f` and a step of `10^{-3}` is already in
/// the second-order regime.
pub struct ProbeInstance {
    pub f: FinSuppFn,
    pub point: Point,
    pub n: u32,
    pub direction: FinSuppFn,
}

pub fn random_probe_instance<R: Rng>(rng: &mut R, frag: &Fragment) -> ProbeInstance {
    loop {
        let inst = probe_candidate(rng, frag);
        if stencil_well_inside_ramp(&inst) && leading_error_resolvable(&inst) {
            return inst;
        }
    }
}

/// Smooth-step coordinate `y = 2|x| − 1` of each `φ`/`ψ` argument and its
/// rate of change along the direction.
fn ramp_coordinates(inst: &ProbeInstance) -> Vec<(f64, f64)> {
    let scale = 2f64.powi(-(inst.n as i32));
    let v = inst.f.get(&inst.point);
    let dv = inst.direction.get(&inst.point);
    let mut out = vec![(2.0 * (v / scale).abs() - 1.0, 2.0 * (dv / scale).abs())];
    for (q, w) in inst.f.supported_successors(&inst.point) {
        let dw = inst.direction.get(q);
        let x = scale * w / (w - v);
        let dx = scale * (w * dv - v * dw) / ((w - v) * (w - v));
        out.push((2.0 * x.abs() - 1.0, 2.0 * dx.abs()));
    }
    out
}

/// Over the stencil `±10^{-3}` every argument drifts by at most a tenth of
/// `min(y, 1 − y)²`, the scale on which the smooth step's derivatives grow.
fn stencil_well_inside_ramp(inst: &ProbeInstance) -> bool {
    ramp_coordinates(inst).iter().all(|&(y, rate)| {
        let edge = y.min(1.0 - y);
        edge > 0.0 && rate * 1e-3 <= 0.1 * edge * edge
    })
}

/// Whether the `h²` term of the central-difference error at `h = 10^{-3}`
/// clears round-off and dominates the `h⁴` term, with `F'''` and `F⁽⁵⁾`
/// estimated from wider central differences of the operator alone.
fn leading_error_resolvable(inst: &ProbeInstance) -> bool {
    let g = |s: f64| t_op(&inst.f.add_scaled(&inst.direction, s), &inst.point, inst.n);
    let k = 1e-3;
    let (g1, g2, g3) = (g(k) - g(-k), g(2.0 * k) - g(-2.0 * k), g(3.0 * k) - g(-3.0 * k));
    let third = (g2 - 2.0 * g1) / (2.0 * k.powi(3));
    let fifth = (g3 - 4.0 * g2 + 5.0 * g1) / (2.0 * k.powi(5));
    let h2 = 1e-6;
    let c2 = third.abs() / 6.0 * h2;
    let c4 = fifth.abs() / 120.0 * h2 * h2;
    c2 > 1e-9 && c4 <= 0.02 * c2
}

fn probe_candidate<R: Rng>(rng: &mut R, frag: &Fragment) -> ProbeInstance {
    let n = 1;
    let scale = 0.5;
    let node = random_node(rng, frag).clone();
    let point = Point::new(node.clone(), random_sign(rng));
    let on_ramp = |rng: &mut R| {
        let a = rng.gen_range(0.6..0.9);
        if rng.gen_bool(0.5) { a } else { -a }
    };
    let v = on_ramp(rng) * scale;
    let mut values = vec![(point.clone(), v)];
    let mut direction = vec![(point.clone(), rng.gen_range(-1.0..1.0))];
    let kids = immediate_successors(&node, frag.alphabet() + 2);
    let count = rng.gen_range(0..=2);
    let picked: Vec<&Node> = kids.choose_multiple(rng, count).collect();
    for c in picked {
        // scale·w/(w − v) = x  ⇔  w = x·v/(x − scale)
        let x = on_ramp(rng);
        let w = x * v / (x - scale);
        let q = Point::new(c.clone(), random_sign(rng));
        values.push((q.clone(), w));
        direction.push((q, rng.gen_range(-1.0..1.0)));
    }
    // unrelated mass elsewhere
    let far = random_point(rng, frag);
    if far != point && !(far.node.len() == node.len() + 1 && node.precedes(&far.node)) {
        values.push((far.clone(), rng.gen_range(-1.0..1.0)));
        direction.push((far, rng.gen_range(-1.0..1.0)));
    }
    ProbeInstance {
        f: FinSuppFn::new(values),
        point,
        n,
        direction: FinSuppFn::new(direction),
    }
}
