//! Bounded search for tuples `(A_1..A_n)` of subspaces of `Q^k` satisfying
//! (**) with large total dimension.
//!
//! Three phases share one evaluation budget:
//! structured seeds (the kernel of the sum map in one slot), sweeps over
//! small prime fields whose survivors are lifted symmetrically and re-checked
//! over `Q`, and randomized coordinate ascent where a slot is replaced by a
//! subspace of the largest space compatible with the other slots.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_condition_doublestar, choices, combinations, random_subspace_of, Subspace};
use crate::rational::Rational;

const PRIMES: [i64; 4] = [3, 5, 7, 11];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub k: usize,
    pub n: usize,
    pub best_config: Vec<Subspace>,
    pub best_sum: usize,
    pub evaluated: u64,
    /// A verified configuration with total dimension above `k - 1`.
    pub counterexample: Option<Vec<Subspace>>,
}

struct State {
    k: usize,
    budget: u64,
    evaluated: u64,
    best_config: Vec<Subspace>,
    best_sum: usize,
    counterexample: Option<Vec<Subspace>>,
}

impl State {
    fn new(k: usize, n: usize, budget: u64) -> Self {
        State {
            k,
            budget,
            evaluated: 0,
            best_config: vec![Subspace::zero(k); n],
            best_sum: 0,
            counterexample: None,
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluated >= self.budget
    }

    fn spend(&mut self) -> bool {
        if self.exhausted() {
            return false;
        }
        self.evaluated += 1;
        true
    }

    /// Verifies over `Q` and records the configuration if it improves.
    fn offer(&mut self, config: &[Subspace]) -> bool {
        if !self.spend() {
            return false;
        }
        let ok = check_condition_doublestar(config).map(|v| v.is_none()).unwrap_or(false);
        if !ok {
            return false;
        }
        let total: usize = config.iter().map(Subspace::dim).sum();
        if total > self.best_sum {
            self.best_sum = total;
            self.best_config = config.to_vec();
        }
        if total + 1 > self.k && self.counterexample.is_none() {
            self.counterexample = Some(config.to_vec());
        }
        true
    }

    fn outcome(self, n: usize) -> SearchOutcome {
        SearchOutcome {
            k: self.k,
            n,
            best_config: self.best_config,
            best_sum: self.best_sum,
            evaluated: self.evaluated,
            counterexample: self.counterexample,
        }
    }
}

fn hadamard_all(k: usize, vectors: &[&Vec<Rational>]) -> Vec<Rational> {
    let mut out = vec![Rational::one(); k];
    for v in vectors {
        for (x, y) in out.iter_mut().zip(v.iter()) {
            *x *= y;
        }
    }
    out
}

/// The largest subspace `L` such that replacing slot `i` by any subspace of
/// `L` keeps (**): the annihilator of `e` and of every product of basis
/// vectors drawn from distinct other slots.
pub fn allowed_space(config: &[Subspace], i: usize) -> Subspace {
    let k = config[i].ambient_dim();
    let others: Vec<usize> = (0..config.len()).filter(|&j| j != i && !config[j].is_zero()).collect();
    let mut constraints = vec![vec![Rational::one(); k]];
    for size in 1..=others.len() {
        for subset in combinations(others.len(), size) {
            let slots: Vec<usize> = subset.iter().map(|&s| others[s]).collect();
            let sizes: Vec<usize> = slots.iter().map(|&s| config[s].dim()).collect();
            for pick in choices(&sizes) {
                let vs: Vec<&Vec<Rational>> = slots.iter().zip(&pick).map(|(&s, &b)| &config[s].basis()[b]).collect();
                constraints.push(hadamard_all(k, &vs));
            }
        }
    }
    Subspace::span(k, &constraints).expect("constraint rows have length k").orthogonal_complement()
}

fn structured_phase(state: &mut State, n: usize) {
    let k = state.k;
    for slot in 0..n {
        let mut config = vec![Subspace::zero(k); n];
        config[slot] = Subspace::sum_kernel(k);
        if !state.offer(&config) {
            return;
        }
    }
    // greedy fill from the empty configuration
    let mut config = vec![Subspace::zero(k); n];
    for slot in 0..n {
        config[slot] = allowed_space(&config, slot);
        if !state.offer(&config) {
            return;
        }
    }
}

fn mod_p(x: i64, p: i64) -> i64 {
    x.rem_euclid(p)
}

/// Representative in `(-p/2, p/2]`.
fn symmetric_lift(x: i64, p: i64) -> i64 {
    let r = mod_p(x, p);
    if 2 * r > p {
        r - p
    } else {
        r
    }
}

/// Nonzero vectors of `F_p^k` with coordinate sum zero, first nonzero entry 1.
fn projective_kernel_vectors(k: usize, p: i64, limit: u64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = (p as u64).checked_pow(k as u32 - 1).unwrap_or(u64::MAX);
    for idx in 0..total.min(limit) {
        let mut v = Vec::with_capacity(k);
        let mut rest = idx;
        for _ in 0..k - 1 {
            v.push((rest % p as u64) as i64);
            rest /= p as u64;
        }
        let s: i64 = v.iter().sum();
        v.push(mod_p(-s, p));
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

fn product_sum_mod(vectors: &[&Vec<i64>], p: i64) -> i64 {
    let k = vectors[0].len();
    let mut acc = 0;
    for j in 0..k {
        let mut prod = 1;
        for v in vectors {
            prod = mod_p(prod * v[j], p);
        }
        acc = mod_p(acc + prod, p);
    }
    acc
}

fn lift(v: &[i64], p: i64) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(BigInt::from(symmetric_lift(x, p)))).collect()
}

/// For each small prime: every line through a sum-zero vector mod `p`, and
/// pairs of lines whose product sums vanish mod `p`, lifted and checked over
/// `Q`. Survivors seed a greedy fill of the remaining slots.
fn finite_field_phase(state: &mut State, n: usize, share: u64) {
    let stop = state.evaluated.saturating_add(share).min(state.budget);
    for &p in &PRIMES {
        let lines = projective_kernel_vectors(state.k, p, share);
        for v in &lines {
            if state.evaluated >= stop {
                return;
            }
            try_lifted(state, n, &[v], p);
        }
        if n < 2 {
            continue;
        }
        for (a, v) in lines.iter().enumerate() {
            for w in &lines[a + 1..] {
                if state.evaluated >= stop {
                    return;
                }
                state.evaluated += 1;
                if product_sum_mod(&[v, w], p) == 0 {
                    try_lifted(state, n, &[v, w], p);
                }
            }
        }
    }
}

fn try_lifted(state: &mut State, n: usize, vectors: &[&Vec<i64>], p: i64) {
    let k = state.k;
    let mut config = vec![Subspace::zero(k); n];
    for (slot, v) in vectors.iter().enumerate() {
        config[slot] = Subspace::span(k, &[lift(v, p)]).expect("length k");
    }
    if !state.offer(&config) {
        return;
    }
    for slot in vectors.len()..n {
        config[slot] = allowed_space(&config, slot);
    }
    state.offer(&config);
}

fn random_phase(state: &mut State, n: usize, rng: &mut ChaCha8Rng) {
    let k = state.k;
    while !state.exhausted() {
        let mut config = vec![Subspace::zero(k); n];
        let rounds = 2 * n + rng.gen_range(0..=n);
        for _ in 0..rounds {
            let slot = rng.gen_range(0..n);
            config[slot] = Subspace::zero(k);
            let room = allowed_space(&config, slot);
            let dim = if rng.gen_bool(0.5) { room.dim() } else { rng.gen_range(0..=room.dim()) };
            config[slot] = if dim == room.dim() { room } else { random_subspace_of(&room, dim, rng) };
            if !state.offer(&config) {
                return;
            }
        }
    }
}

fn run_worker(k: usize, n: usize, budget: u64, seed: u64) -> SearchOutcome {
    let mut state = State::new(k, n, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    structured_phase(&mut state, n);
    finite_field_phase(&mut state, n, budget / 2);
    random_phase(&mut state, n, &mut rng);
    state.outcome(n)
}

/// Single-worker search; deterministic in `(k, n, budget, seed)`.
pub fn search_max_total_dimension(k: usize, n: usize, budget: u64, seed: u64) -> SearchOutcome {
    search_with_workers(k, n, budget, seed, 1)
}

/// Splits the budget across `workers` threads with derived seeds and keeps
/// the best result (ties go to the lowest worker index).
pub fn search_with_workers(k: usize, n: usize, budget: u64, seed: u64, workers: usize) -> SearchOutcome {
    assert!(k >= 2 && n >= 1, "search needs k >= 2 and n >= 1");
    let workers = workers.max(1);
    if workers == 1 {
        return run_worker(k, n, budget, seed);
    }
    let shares: Vec<u64> = (0..workers as u64)
        .map(|w| budget / workers as u64 + u64::from(w < budget % workers as u64))
        .collect();
    let results: Vec<SearchOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = shares
            .iter()
            .enumerate()
            .map(|(w, &share)| {
                let worker_seed = seed.wrapping_add((w as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                scope.spawn(move || run_worker(k, n, share, worker_seed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    let evaluated = results.iter().map(|r| r.evaluated).sum();
    let counterexample = results.iter().find_map(|r| r.counterexample.clone());
    let best = results
        .into_iter()
        .reduce(|a, b| if b.best_sum > a.best_sum { b } else { a })
        .expect("at least one worker");
    SearchOutcome { evaluated, counterexample, ..best }
}

/// Total dimension of a configuration, if it satisfies (**).
pub fn verified_total(config: &[Subspace]) -> Option<usize> {
    match check_condition_doublestar(config) {
        Ok(None) => Some(config.iter().map(Subspace::dim).sum()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_are_symmetric() {
        assert_eq!(symmetric_lift(4, 7), -3);
        assert_eq!(symmetric_lift(3, 7), 3);
        assert_eq!(symmetric_lift(-1, 5), -1);
    }

    #[test]
    fn allowed_space_keeps_doublestar() {
        let k = 4;
        let mut config = vec![Subspace::zero(k); 3];
        config[0] = Subspace::from_integer_rows(k, &[&[1, -1, 0, 0]]).unwrap();
        for slot in 1..3 {
            config[slot] = allowed_space(&config, slot);
            assert!(verified_total(&config).is_some());
        }
        assert!(allowed_space(&config, 0).contains(config[0].basis()[0].as_slice()).unwrap());
    }

    #[test]
    fn small_examples() {
        let out = search_max_total_dimension(3, 1, 200, 0);
        assert_eq!(out.best_sum, 2);
        assert!(out.counterexample.is_none());
        for n in 1..4 {
            assert_eq!(search_max_total_dimension(2, n, 300, 1).best_sum, 1);
        }
        assert_eq!(verified_total(&out.best_config), Some(2));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = search_max_total_dimension(4, 2, 400, 9);
        let b = search_max_total_dimension(4, 2, 400, 9);
        assert_eq!(a, b);
        let c = search_with_workers(4, 2, 400, 9, 3);
        assert_eq!(c.best_sum, a.best_sum);
        assert_eq!(c.evaluated, 400);
    }

    #[test]
    fn field_sweep_vectors() {
        let v = projective_kernel_vectors(3, 3, u64::MAX);
        // lines in the plane x + y + z = 0 over F_3
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|x| x.iter().sum::<i64>() % 3 == 0));
    }
}
