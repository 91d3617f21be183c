//! Random instances shared by the integration tests.
#![allow(dead_code)]

use kamrfp::scenario::binomial;
use kamrfp::{Network, Rational};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Network on `n` vertices with `m` arcs and integer capacities in `1..=max_cap`.
/// Source is vertex 1 and sink vertex `n`. The first arcs form a random
/// source-sink path so most instances carry flow; the rest are uniform.
pub fn random_network(rng: &mut StdRng, n: usize, m: usize, max_cap: i64) -> Network {
    assert!(n >= 2);
    let (s, t) = (0, n - 1);
    let mut inner: Vec<usize> = (1..n - 1).collect();
    inner.shuffle(rng);
    let hops = rng.random_range(0..=inner.len().min(m.saturating_sub(1)));
    let mut path = vec![s];
    path.extend_from_slice(&inner[..hops]);
    path.push(t);

    let mut arcs: Vec<(usize, usize, Rational)> = Vec::with_capacity(m);
    for w in path.windows(2) {
        if arcs.len() < m {
            arcs.push((w[0], w[1], rng.random_range(1..=max_cap).into()));
        }
    }
    while arcs.len() < m {
        let tail = rng.random_range(0..n);
        let head = rng.random_range(0..n);
        if tail != head {
            arcs.push((tail, head, rng.random_range(1..=max_cap).into()));
        }
    }
    arcs.shuffle(rng);
    Network::new(n, s, t, arcs).expect("generated network is valid")
}

/// The randomized suite: `count` instances with `n <= 8`, `m <= 14`,
/// capacities `<= 10` and `k` in `{1, 2, 3}` with `C(m, k) <= 400`.
pub fn random_suite(seed: u64, count: usize) -> Vec<(Network, usize)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(2..=8);
            let m = r.random_range(1..=14);
            let net = random_network(&mut r, n, m, 10);
            let ks: Vec<usize> = (1..=3).filter(|&k| k <= m && binomial(m, k).unwrap() <= 400).collect();
            let k = ks[r.random_range(0..ks.len())];
            (net, k)
        })
        .collect()
}

pub const SUITE_SEED: u64 = 0x5eed_2024;
