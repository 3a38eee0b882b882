//! Named verification suites and their JSON reports.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game::{check_even_ell, decompose, diagonalize, diagonalize_with, verify_trace, EOracle, Predicate, Round, Status};
use crate::generate::*;
use crate::mutation::Mutation;
use crate::separation::{
    extend_to_compactification, separating_threshold, star_from_gdelta, threshold_bound, verify_gdelta_pairs,
    verify_star, StarPoint,
};
use crate::talagrand::{
    smoothness_probe, step_function_neighbor_check, t_op, talagrand_witness, FinSuppFn, StepFunction,
};
use crate::tau::{check_concatenation, ell, local_extension_base, p_value, tau, PValue};
use crate::topology::{chain_subcover, hausdorff_witness, isolated_point, refine_family, refine_intersection, refine_pair, BasicOpen, OpenSet, Point, Sign};
use crate::tree::{generate_fragment, generate_fragment_unchecked, Fragment, Node};

pub const SUITES: [&str; 11] = [
    "tau",
    "basis",
    "hausdorff",
    "scattered",
    "subcover",
    "refine",
    "gdelta",
    "star",
    "compactify",
    "gruenhage",
    "talagrand",
];

pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

/// Witnesses kept per report; the full count is in `failure_count`.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub depth: usize,
    pub alphabet: u32,
    /// Defaults to the largest fragment value plus 2.
    pub p_max: Option<u32>,
    pub rounds: usize,
    pub seed: u64,
    /// Overrides the number of random instances in seeded suites.
    pub samples: Option<usize>,
    pub pair_budget: usize,
    pub mutation: Mutation,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            depth: 3,
            alphabet: 4,
            p_max: None,
            rounds: 64,
            seed: 20_240_917,
            samples: None,
            pair_budget: DEFAULT_PAIR_BUDGET,
            mutation: Mutation::None,
        }
    }
}

impl SuiteConfig {
    pub fn with_fragment(depth: usize, alphabet: u32) -> Self {
        SuiteConfig {
            depth,
            alphabet,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth as u64 > self.alphabet as u64 {
            return Err(Error::ConfigInvalid(format!(
                "depth {} exceeds alphabet {}; nodes are injective",
                self.depth, self.alphabet
            )));
        }
        if self.p_max == Some(0) {
            return Err(Error::ConfigInvalid("p_max must be at least 1".into()));
        }
        if self.rounds == 0 {
            return Err(Error::ConfigInvalid("rounds must be at least 1".into()));
        }
        if self.pair_budget == 0 {
            return Err(Error::ConfigInvalid("pair budget must be at least 1".into()));
        }
        Ok(())
    }

    fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn p_max_for(&self, frag: &Fragment) -> u32 {
        self.p_max
            .unwrap_or_else(|| frag.max_value().map_or(2, |m| m + 2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every item of the suite's space was checked.
    Exhaustive,
    /// A uniform sample of the space, drawn from the recorded seed.
    Sampled,
    /// Random instances drawn from the recorded seed.
    Seeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentParams {
    pub depth: usize,
    pub alphabet: u32,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub fragment: FragmentParams,
    pub mode: Mode,
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Value>,
    pub elapsed_ms: u64,
    pub seed: u64,
    pub mutation: Mutation,
    pub status: Outcome,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == Outcome::Pass
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
        };
        write!(
            f,
            "{:<10} {status:<4} checked={} failures={} mode={:?} depth={} alphabet={} {}ms",
            self.suite,
            self.checked,
            self.failure_count,
            self.mode,
            self.fragment.depth,
            self.fragment.alphabet,
            self.elapsed_ms
        )
    }
}

#[derive(Default)]
struct Tally {
    checked: u64,
    failure_count: u64,
    failures: Vec<Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }

    fn fail(&mut self, witness: Value) {
        self.failure_count += 1;
        if self.failures.len() < MAX_WITNESSES {
            self.failures.push(witness);
        }
    }

    fn error(&mut self, e: Error) {
        self.checked += 1;
        self.fail(error_witness(e));
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        let room = MAX_WITNESSES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }
}

fn error_witness(e: Error) -> Value {
    match e {
        Error::Counterexample(v) => v,
        other => json!({ "kind": "error", "message": other.to_string() }),
    }
}

fn par_tally<T: Sync>(items: &[T], f: impl Fn(&T, &mut Tally) + Sync) -> Tally {
    items
        .par_iter()
        .map(|x| {
            let mut t = Tally::default();
            f(x, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge)
}

fn suite_seed(seed: u64, name: &str) -> u64 {
    let idx = SUITES.iter().position(|s| *s == name).unwrap_or(0) as u64;
    seed ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn all_points(frag: &Fragment) -> Vec<Point> {
    frag.nodes()
        .flat_map(|n| Sign::BOTH.map(|s| Point::new(n.clone(), s)))
        .collect()
}

/// Unordered index pairs of `0..n`, all of them or a uniform sample of `budget`.
fn pair_plan(n: usize, budget: usize, rng: &mut ChaCha8Rng) -> (Mode, Vec<(usize, usize)>) {
    let total = n * n.saturating_sub(1) / 2;
    if total <= budget {
        let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        return (Mode::Exhaustive, pairs);
    }
    let pairs = (0..budget)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a.min(b), a.max(b))
        })
        .collect();
    (Mode::Sampled, pairs)
}

/// Executes one named suite.
pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    config.validate()?;
    let start = Instant::now();
    let frag = if name == "tau" && config.mutation == Mutation::NodeSkipsInjectivity {
        generate_fragment_unchecked(config.depth, config.alphabet)
    } else {
        generate_fragment(config.depth, config.alphabet)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed(config.seed, name));
    let (mode, tally) = match name {
        "tau" => tau_suite(config, &frag, &mut rng),
        "basis" => basis_suite(config, &frag, &mut rng),
        "hausdorff" => hausdorff_suite(config, &frag, &mut rng),
        "scattered" => scattered_suite(config, &frag, &mut rng),
        "subcover" => subcover_suite(config, &frag, &mut rng),
        "refine" => refine_suite(config, &frag, &mut rng),
        "gdelta" => gdelta_suite(config, &frag, &mut rng),
        "star" => star_suite(config, &frag, &mut rng, false),
        "compactify" => star_suite(config, &frag, &mut rng, true),
        "gruenhage" => gruenhage_suite(config, &frag, &mut rng),
        "talagrand" => talagrand_suite(config, &frag, &mut rng),
        _ => unreachable!("name checked above"),
    };
    let status = if tally.failure_count == 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        fragment: FragmentParams {
            depth: config.depth,
            alphabet: config.alphabet,
            nodes: frag.len(),
        },
        mode,
        checked: tally.checked,
        failure_count: tally.failure_count,
        failures: tally.failures,
        elapsed_ms: start.elapsed().as_millis() as u64,
        seed: config.seed,
        mutation: config.mutation,
        status,
    })
}

/// Every suite, in parallel, in the order of [`SUITES`].
pub fn run_all(config: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    config.validate()?;
    SUITES.par_iter().map(|name| run_suite(name, config)).collect()
}

// ---------------------------------------------------------------- tau

fn tau_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let mut pairs: Vec<(Node, Node)> = frag
        .nodes()
        .flat_map(|u| (0..=u.len()).map(move |k| (u.prefix(k), u.clone())))
        .collect();
    let mode = if pairs.len() > config.pair_budget {
        pairs = pairs.choose_multiple(rng, config.pair_budget).cloned().collect();
        Mode::Sampled
    } else {
        Mode::Exhaustive
    };
    let tally = par_tally(&pairs, |(s, u), t| tau_pair(s, u, t));
    (mode, tally)
}

fn tau_pair(s: &Node, u: &Node, t: &mut Tally) {
    let seq = match tau(s, u) {
        Ok(seq) => seq,
        Err(e) => return t.error(e),
    };
    let pos = seq.positions();
    let witness = |what: &str| json!({ "kind": what, "s": s, "u": u, "tau": pos });
    t.check(pos.is_empty() == (s == u), || witness("empty-iff-equal"));
    t.check(pos.windows(2).all(|w| w[0] < w[1]), || witness("positions-monotone"));
    t.check(
        pos.windows(2).all(|w| u.value_at(w[0]) > u.value_at(w[1])),
        || witness("values-monotone"),
    );
    t.check(pos.first().is_none_or(|&b| b == s.len()), || witness("ends-at-dom"));
    // each step picks the unique least value below the previous one
    let unique = pos.iter().enumerate().all(|(k, &b)| {
        let hi = pos.get(k + 1).copied().unwrap_or(u.len());
        (s.len()..hi).all(|j| j == b || u.value_at(j) > u.value_at(b))
    });
    t.check(unique, || witness("unique-argmin"));
    let expected_p = (s.len()..u.len())
        .map(|j| u.value_at(j))
        .min()
        .map_or(PValue::Infinity, PValue::Finite);
    t.check(p_value(s, u).ok() == Some(expected_p), || witness("p-value"));
    for mid in u.prefixes_from(s.len()).take(u.len() - s.len()) {
        let base = match local_extension_base(&mid, u) {
            Ok(b) => b,
            Err(e) => return t.error(e),
        };
        let concat = check_concatenation(s, &mid, u).unwrap_or(false);
        // records of u on [dom s, dom u) split at dom t exactly when the
        // first value from dom t on undercuts everything before it
        let splits = (s.len()..mid.len()).all(|j| u.value_at(mid.len()) < u.value_at(j));
        t.check(concat == splits, || {
            json!({ "kind": "concatenation-criterion", "s": s, "t": mid, "u": u, "concatenates": concat })
        });
        if s.len() < base.floor() {
            continue;
        }
        t.check(concat, || json!({ "kind": "concatenation", "s": s, "t": mid, "u": u }));
        let additive = match (ell(s, u), ell(s, &mid), ell(&mid, u)) {
            (Ok(a), Ok(b), Ok(c)) => a == b + c,
            _ => false,
        };
        t.check(additive, || json!({ "kind": "ell-additivity", "s": s, "t": mid, "u": u }));
    }
}

// ---------------------------------------------------------------- topology

/// Every basic set of the fragment containing `p`.
fn opens_around(frag: &Fragment, p: &Point) -> Vec<BasicOpen> {
    let mut out = Vec::new();
    for top in frag.extensions_of(&p.node) {
        let i = p.sign.alternate(ell(&p.node, top).expect("p lies below top"));
        for floor in 0..=p.node.len() {
            out.push(BasicOpen::new(base_at(top, floor), top.clone(), i).expect("base below top"));
        }
    }
    out
}

fn basis_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let points = all_points(frag);
    let around: Vec<Vec<BasicOpen>> = points.par_iter().map(|p| opens_around(frag, p)).collect();
    let weights: Vec<usize> = around.iter().map(|ws| ws.len() * ws.len()).collect();
    let total: usize = weights.iter().sum();
    let check = |p: &Point, w1: &BasicOpen, w2: &BasicOpen, t: &mut Tally| match refine_intersection(p, w1, w2) {
        Ok(w) => {
            let inside = w.contains(p) && w.members().iter().all(|q| w1.contains(q) && w2.contains(q));
            t.check(inside, || json!({ "kind": "basis", "point": p, "w1": w1, "w2": w2, "refined": w }));
        }
        Err(e) => t.error(e),
    };
    if total <= config.pair_budget {
        let idx: Vec<usize> = (0..points.len()).collect();
        let tally = par_tally(&idx, |&k, t| {
            for w1 in &around[k] {
                for w2 in &around[k] {
                    check(&points[k], w1, w2, t);
                }
            }
        });
        return (Mode::Exhaustive, tally);
    }
    let dist = WeightedIndex::new(&weights).expect("some point has an open set");
    let draws: Vec<(usize, usize, usize)> = (0..config.pair_budget)
        .map(|_| {
            let k = dist.sample(rng);
            let n = around[k].len();
            (k, rng.gen_range(0..n), rng.gen_range(0..n))
        })
        .collect();
    let tally = par_tally(&draws, |&(k, a, b), t| check(&points[k], &around[k][a], &around[k][b], t));
    (Mode::Sampled, tally)
}

fn hausdorff_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let points = all_points(frag);
    let (mode, pairs) = pair_plan(points.len(), config.pair_budget, rng);
    let tally = par_tally(&pairs, |&(a, b), t| {
        let (p1, p2) = (&points[a], &points[b]);
        match hausdorff_witness(p1, p2) {
            Ok((w1, w2)) => {
                let m1: BTreeSet<Point> = w1.members().into_iter().collect();
                let ok = w1.contains(p1) && w2.contains(p2) && w2.members().iter().all(|q| !m1.contains(q));
                t.check(ok, || json!({ "kind": "hausdorff", "pair": [p1, p2], "w1": w1, "w2": w2 }));
            }
            Err(e) => t.error(e),
        }
    });
    (mode, tally)
}

fn scattered_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let points = all_points(frag);
    let samples = config.samples_or(10_000);
    let exhaustive = points.len() < 64 && (1u64 << points.len()) - 1 <= samples as u64;
    let subsets: Vec<BTreeSet<Point>> = if exhaustive {
        (1u64..1 << points.len())
            .map(|mask| {
                points
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect()
    } else {
        (0..samples)
            .map(|_| {
                let q: f64 = rng.gen_range(0.01..1.0);
                let mut e: BTreeSet<Point> = points.iter().filter(|_| rng.gen_bool(q)).cloned().collect();
                if e.is_empty() {
                    e.insert(points.choose(rng).expect("fragment has a point").clone());
                }
                e
            })
            .collect()
    };
    let tally = par_tally(&subsets, |e, t| match isolated_point(e) {
        Ok((p, w)) => {
            let ok = e.contains(&p) && w.contains(&p) && e.iter().all(|q| q == &p || !w.contains(q));
            t.check(ok, || json!({ "kind": "isolation", "set": e, "point": p, "open": w }));
        }
        Err(e) => t.error(e),
    });
    (if exhaustive { Mode::Exhaustive } else { Mode::Seeded }, tally)
}

fn subcover_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let samples = config.samples_or(1_000);
    let cases: Vec<(BasicOpen, Vec<BasicOpen>, Option<Point>)> = (0..samples)
        .map(|k| {
            let w = random_basic_open(rng, frag);
            let members = w.members();
            let mut cover: Vec<BasicOpen> = Vec::new();
            for m in &members {
                if !cover.iter().any(|c| c.contains(m)) || rng.gen_bool(0.2) {
                    cover.push(random_basic_open_around(rng, frag, m));
                }
            }
            for _ in 0..rng.gen_range(0..3) {
                cover.push(random_basic_open(rng, frag));
            }
            cover.shuffle(rng);
            let hole = (k % 5 == 4).then(|| members.choose(rng).expect("nonempty").clone());
            if let Some(x) = &hole {
                cover.retain(|c| !c.contains(x));
            }
            (w, cover, hole)
        })
        .collect();
    let tally = par_tally(&cases, |(w, cover, hole), t| {
        let result = chain_subcover(w, cover);
        match (hole, result) {
            (None, Ok(sub)) => {
                let ok = sub.iter().all(|s| cover.contains(s))
                    && w.members().iter().all(|m| sub.iter().any(|s| s.contains(m)))
                    && sub.len() <= w.members().len();
                t.check(ok, || json!({ "kind": "subcover", "open": w, "cover": cover, "subcover": sub }));
            }
            (Some(_), Err(Error::NotACover(x))) => {
                let ok = w.contains(&x) && !cover.iter().any(|c| c.contains(&x));
                t.check(ok, || json!({ "kind": "uncovered-witness", "open": w, "cover": cover, "reported": x }));
            }
            (Some(_), Ok(sub)) => t.error(Error::Counterexample(
                json!({ "kind": "accepted-non-cover", "open": w, "cover": cover, "subcover": sub }),
            )),
            (_, Err(e)) => t.error(e),
        }
    });
    (Mode::Seeded, tally)
}

fn union_points(pieces: &[BasicOpen]) -> BTreeSet<Point> {
    pieces.iter().flat_map(|w| w.members()).collect()
}

fn pairwise_disjoint(pieces: &[BasicOpen]) -> bool {
    pieces
        .iter()
        .enumerate()
        .all(|(a, x)| pieces[a + 1..].iter().all(|y| x.is_disjoint(y)))
}

fn refine_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let samples = config.samples_or(1_000);
    let pairs: Vec<(OpenSet, OpenSet, bool)> = (0..samples)
        .map(|k| {
            let top = random_node(rng, frag).clone();
            let floor = rng.gen_range(0..=top.len());
            let u = random_chain_cover(rng, &top, floor);
            let mismatch = k % 5 == 4 && !top.is_empty();
            let v = if mismatch {
                random_chain_cover(rng, &top, if floor == 0 { 1 } else { floor - 1 })
            } else {
                random_chain_cover(rng, &top, floor)
            };
            (u, v, mismatch)
        })
        .collect();
    let families: Vec<Vec<BasicOpen>> = (0..samples)
        .map(|_| (0..rng.gen_range(1..=4)).map(|_| random_basic_open(rng, frag)).collect())
        .collect();
    let pair_tally = par_tally(&pairs, |(u, v, mismatch), t| match (refine_pair(u, v), mismatch) {
        (Ok((a, b)), false) => {
            let ok = a.len() == b.len()
                && union_points(&a) == u.points()
                && union_points(&b) == v.points()
                && pairwise_disjoint(&a)
                && pairwise_disjoint(&b)
                && a.iter().zip(&b).all(|(x, y)| x.r == y.r && x.t == y.t);
            t.check(ok, || json!({ "kind": "refine-pair", "u": u, "v": v, "u_pieces": a, "v_pieces": b }));
        }
        (Err(Error::ProjectionMismatch(_)), true) => t.check(true, || Value::Null),
        (Ok(_), true) => t.error(Error::Counterexample(json!({ "kind": "accepted-mismatch", "u": u, "v": v }))),
        (Err(e), _) => t.error(e),
    });
    let family_tally = par_tally(&families, |family, t| {
        let pieces = refine_family(family);
        let unions = pieces.len() == family.len()
            && pieces
                .iter()
                .zip(family)
                .all(|(ps, w)| union_points(ps) == w.members().into_iter().collect());
        let flat: Vec<&BasicOpen> = pieces.iter().flatten().collect();
        let laminar = flat
            .iter()
            .enumerate()
            .all(|(a, x)| flat[a + 1..].iter().all(|y| x == y || x.is_disjoint(y)));
        t.check(unions && laminar, || json!({ "kind": "refine-family", "family": family, "pieces": pieces }));
    });
    (Mode::Seeded, pair_tally.merge(family_tally))
}

// ---------------------------------------------------------------- separation

fn gdelta_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let p_max = config.p_max_for(frag);
    let points = all_points(frag);
    let (mode, pairs) = pair_plan(points.len(), config.pair_budget, rng);
    let mut tally = Tally::default();
    match verify_gdelta_pairs(frag, p_max, config.mutation, &points, &pairs) {
        Ok(summary) => tally.checked += (summary.pairs_checked + summary.vsets_checked) as u64,
        Err(e) => tally.error(e),
    }
    let bounds = par_tally(&pairs, |&(a, b), t| {
        let (x, y) = (&points[a], &points[b]);
        let Some(bound) = threshold_bound(x, y) else { return };
        let (lo, hi) = if x.node.len() <= y.node.len() { (x, y) } else { (y, x) };
        let threshold = match separating_threshold(x, y, frag) {
            Ok(v) => v,
            Err(e) => return t.error(e),
        };
        t.check(threshold <= bound, || {
            json!({ "kind": "threshold-bound", "pair": [x, y], "threshold": threshold, "bound": bound })
        });
        // a coherent pair shares every V(hi, ·, p) with p ≤ p(lo, hi)
        let coherent = ell(&lo.node, &hi.node).is_ok_and(|k| lo.sign == hi.sign.alternate(k));
        if coherent {
            if let Ok(PValue::Finite(p)) = p_value(&lo.node, &hi.node) {
                t.check(threshold > p, || {
                    json!({ "kind": "threshold-lower", "pair": [x, y], "threshold": threshold, "p": p })
                });
            }
        }
    });
    (mode, tally.merge(bounds))
}

fn star_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng, compact: bool) -> (Mode, Tally) {
    let mut tally = Tally::default();
    let seq = match star_from_gdelta(frag, config.p_max_for(frag)) {
        Ok(seq) => seq,
        Err(e) => {
            tally.error(e);
            return (Mode::Exhaustive, tally);
        }
    };
    let seq = if compact {
        extend_to_compactification(&seq, frag)
    } else {
        seq
    };
    let mut universe = seq.points.clone();
    let mut mode = Mode::Exhaustive;
    let pairs = universe.len() * universe.len().saturating_sub(1) / 2;
    if pairs > config.pair_budget {
        // largest point subset whose pair count fits the budget
        let keep = ((1.0 + (1.0 + 8.0 * config.pair_budget as f64).sqrt()) / 2.0) as usize;
        let mut chosen: Vec<StarPoint> = universe.choose_multiple(rng, keep.max(2)).cloned().collect();
        if compact && !chosen.contains(&StarPoint::Infinity) {
            chosen.pop();
            chosen.push(StarPoint::Infinity);
        }
        universe = chosen;
        mode = Mode::Sampled;
    }
    if compact {
        tally.check(universe.contains(&StarPoint::Infinity), || json!({ "kind": "missing-infinity" }));
    }
    match verify_star(&seq, &universe) {
        Ok(summary) => tally.checked += summary.pairs_checked as u64,
        Err(e) => tally.error(e),
    }
    (mode, tally)
}

// ---------------------------------------------------------------- game

/// The two-oracle example on the depth-2, alphabet-5 fragment.
pub fn hand_traced_rounds() -> Vec<Round> {
    let node = |v: &[u32]| Node::new(v.to_vec()).expect("injective");
    vec![
        Round {
            m: 1,
            t: Node::empty(),
            k: 0,
            l: 1,
            u: node(&[1]),
        },
        Round {
            m: 2,
            t: node(&[1, 2]),
            k: 3,
            l: 4,
            u: node(&[1, 2, 4]),
        },
    ]
}

fn gruenhage_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let mut tally = Tally::default();

    let small = generate_fragment(2, 5);
    let e1: BTreeSet<Node> = [Node::empty()].into();
    let e2 = Predicate(|t: &Node| t.contains_value(2));
    let hand: [&dyn EOracle; 2] = [&e1, &e2];
    match diagonalize_with(&hand, &small, config.rounds, config.mutation) {
        Ok(trace) => {
            tally.check(trace.rounds == hand_traced_rounds(), || {
                json!({ "kind": "hand-trace", "rounds": trace.rounds })
            });
            if let Err(e) = verify_trace(&trace, &hand, &small) {
                tally.error(e);
            }
        }
        Err(e) => tally.error(e),
    }

    let count = config.samples_or(100);
    let families: Vec<Vec<BTreeSet<Node>>> = (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=6);
            random_even_family(rng, frag, m)
        })
        .collect();
    let fam_tally = par_tally(&families, |family, t| {
        let oracles: Vec<&dyn EOracle> = family.iter().map(|e| e as &dyn EOracle).collect();
        match diagonalize_with(&oracles, frag, config.rounds, config.mutation) {
            Ok(trace) => match verify_trace(&trace, &oracles, frag) {
                Ok(summary) => {
                    t.checked += 1 + summary.survivors_checked as u64;
                    t.check(trace.status != Status::ObstructionViolated, || {
                        json!({ "kind": "obstruction", "trace": trace })
                    });
                }
                Err(e) => t.error(e),
            },
            Err(e) => t.error(e),
        }
    });

    let candidates: Vec<_> = (0..config.samples_or(1_000))
        .map(|_| random_candidate(rng, frag, 8))
        .collect();
    let cand_tally = par_tally(&candidates, |c, t| {
        let esets = match decompose(c, frag) {
            Ok(e) => e,
            Err(e) => return t.error(e),
        };
        for e in &esets {
            let u = &c.opens[e.n - 1];
            for node in &e.nodes {
                let r = &e.theta[node];
                let ok = BasicOpen::new(r.clone(), node.clone(), e.i)
                    .is_ok_and(|w| w.members().iter().all(|q| u.contains(q)))
                    && crate::tree::antichain_index(r) == e.m
                    && u.contains(&Point::new(node.clone(), e.i))
                    && !u.contains(&Point::new(node.clone(), -e.i));
                t.check(ok, || json!({ "kind": "eset-member", "candidate": c, "n": e.n, "node": node }));
            }
            let same_theta: Vec<_> = check_even_ell(e)
                .into_iter()
                .filter(|(a, b)| e.theta[a] == e.theta[b])
                .collect();
            t.check(same_theta.is_empty(), || {
                json!({ "kind": "odd-ell", "candidate": c, "n": e.n, "m": e.m, "pairs": same_theta })
            });
        }
        let oracles: Vec<&dyn EOracle> = esets.iter().map(|e| e as &dyn EOracle).collect();
        if oracles.is_empty() {
            return;
        }
        match diagonalize(&oracles, frag, config.rounds) {
            Ok(trace) => match verify_trace(&trace, &oracles, frag) {
                Ok(_) => t.check(trace.status != Status::ObstructionViolated, || {
                    json!({ "kind": "obstruction", "candidate": c, "trace": trace })
                }),
                Err(e) => t.error(e),
            },
            Err(e) => t.error(e),
        }
    });
    (Mode::Seeded, tally.merge(fam_tally).merge(cand_tally))
}

// ---------------------------------------------------------------- talagrand

const LEVELS: [u32; 5] = [1, 2, 3, 5, 8];

fn talagrand_suite(config: &SuiteConfig, frag: &Fragment, rng: &mut ChaCha8Rng) -> (Mode, Tally) {
    let count = config.samples_or(10_000);
    let fns: Vec<(FinSuppFn, Vec<Point>, Point, f64)> = (0..count)
        .map(|_| {
            let f = random_fin_supp(rng, frag, 6);
            let mut probes: Vec<Point> = f.support().map(|(p, _)| p.clone()).collect();
            probes.push(random_point(rng, frag));
            probes.push(random_point(rng, frag));
            (f, probes, random_point(rng, frag), rng.gen_range(-1.0..1.0))
        })
        .collect();
    let mut tally = par_tally(&fns, |(f, probes, moved, delta), t| {
        for p in probes {
            let v = f.get(p);
            for n in LEVELS {
                let scale = 2f64.powi(-(n as i32));
                let x = t_op(f, p, n);
                let w = || json!({ "kind": "t-op", "f": f, "point": p, "n": n, "value": x });
                t.check((0.0..=scale).contains(&x), w);
                let vanishes = v == 0.0 || f.supported_successors(p).any(|(_, s)| s == v) || v.abs() <= scale / 2.0;
                if vanishes {
                    t.check(x == 0.0, w);
                }
                // values off p and its successors do not matter
                let off = moved != p && !(moved.node.len() == p.node.len() + 1 && p.node.precedes(&moved.node));
                if off {
                    let g = f.add_scaled(&FinSuppFn::new([(moved.clone(), 1.0)]), *delta);
                    t.check(t_op(&g, p, n) == x, w);
                }
            }
        }
        if !f.is_zero() {
            match talagrand_witness(f) {
                Ok((p, n)) => t.check(f.get(&p).abs() == f.sup_norm() && t_op(f, &p, n) != 0.0, || {
                    json!({ "kind": "witness", "f": f, "point": p, "n": n })
                }),
                Err(e) => t.error(e),
            }
        }
    });

    let root_plus = Point::new(Node::empty(), Sign::Plus);
    let indicator = FinSuppFn::new([(root_plus.clone(), 1.0)]);
    for n in 1..=10u32 {
        let x = t_op(&indicator, &root_plus, n);
        tally.check(x == 2f64.powi(-(n as i32)), || json!({ "kind": "indicator", "n": n, "value": x }));
    }

    let probes: Vec<_> = (0..100).map(|_| random_probe_instance(rng, frag)).collect();
    tally = tally.merge(par_tally(&probes, |inst, t| {
        match smoothness_probe(&inst.f, &inst.point, inst.n, &inst.direction, 1e-3) {
            Ok(r) => t.check(r.value != 0.0 && (3.5..=4.5).contains(&r.ratio), || {
                json!({ "kind": "probe", "f": inst.f, "point": inst.point, "n": inst.n, "direction": inst.direction, "report": r })
            }),
            Err(e) => t.error(e),
        }
    }));

    let steps: Vec<(StepFunction, f64)> = (0..count / 10)
        .map(|_| {
            let terms = (0..rng.gen_range(1..=4))
                .map(|_| (rng.gen_range(-2.0..2.0), random_basic_open(rng, frag)))
                .collect();
            (StepFunction { terms }, rng.gen_range(0.01..0.5))
        })
        .collect();
    tally = tally.merge(par_tally(&steps, |(sf, delta), t| {
        let report = step_function_neighbor_check(sf, frag, *delta);
        t.check(report.contained, || json!({ "kind": "neighbor", "step": sf, "delta": delta, "report": report }));
    }));
    (Mode::Seeded, tally)
}
