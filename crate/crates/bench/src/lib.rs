//! Shared inputs for the criterion benchmarks.

use kurepa_core::generate::{random_candidate, random_fin_supp, random_point};
use kurepa_core::game::Candidate;
use kurepa_core::talagrand::FinSuppFn;
use kurepa_core::tree::generate_fragment;
use kurepa_core::{Fragment, Node, Point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x6b75_7265_7061;

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

pub fn fragment(depth: usize, alphabet: u32) -> Fragment {
    generate_fragment(depth, alphabet)
}

/// Every comparable pair `(prefix, node)` of the fragment.
pub fn comparable_pairs(frag: &Fragment) -> Vec<(Node, Node)> {
    frag.nodes()
        .flat_map(|u| (0..=u.len()).map(move |k| (u.prefix(k), u.clone())))
        .collect()
}

/// Random functions with a point to evaluate each at.
pub fn functions(frag: &Fragment, count: usize) -> Vec<(FinSuppFn, Point)> {
    let mut rng = rng();
    (0..count)
        .map(|_| {
            let f = random_fin_supp(&mut rng, frag, 8);
            let p = f
                .support()
                .next()
                .map(|(p, _)| p.clone())
                .unwrap_or_else(|| random_point(&mut rng, frag));
            (f, p)
        })
        .collect()
}

pub fn candidates(frag: &Fragment, count: usize) -> Vec<Candidate> {
    let mut rng = rng();
    (0..count).map(|_| random_candidate(&mut rng, frag, 8)).collect()
}
