//! Genus thresholds for gonality and orbit-dimension statements on very
//! general abelian varieties, and their inverse lookups.
//!
//! Everything is driven by the sequence `G_0 = 2k - 1`,
//! `G_{l+1} = 2 G_l + (k - 2)`, with closed form
//! `G_l = 2^l (2k - 1) + (2^l - 1)(k - 2)`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdTable {
    pub k: u64,
    /// No curve of gonality `<= k` once `g` reaches this value.
    #[serde(serialize_with = "ser_big")]
    pub g_gonality: BigInt,
    /// Orbits of all degree-`k` effective cycles are zero-dimensional.
    #[serde(serialize_with = "ser_big")]
    pub g_orbit_all: BigInt,
    /// Same, for cycles supported on Weierstrass-type points.
    #[serde(serialize_with = "ser_big")]
    pub g_orbit_weierstrass: BigInt,
    /// Countable orbit statement.
    #[serde(serialize_with = "ser_big")]
    pub g_orbit_countable: BigInt,
    #[serde(serialize_with = "ser_big_vec")]
    pub induction: Vec<BigInt>,
}

fn to_number(b: &BigInt) -> serde_json::Number {
    b.to_string().parse().expect("integers are valid JSON numbers")
}

fn ser_big<S: serde::Serializer>(b: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    to_number(b).serialize(s)
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(to_number).collect::<Vec<_>>().serialize(s)
}

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::Range(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `2^l (2k - 1) + (2^l - 1)(k - 2)`.
pub fn induction_closed_form(k: u64, l: u32) -> BigInt {
    let p = BigInt::one() << l;
    let k = BigInt::from(k);
    &p * (2 * &k - 1) + (&p - 1) * (k - 2)
}

/// `G_0..G_k` by the recurrence.
pub fn induction_sequence(k: u64) -> Result<Vec<BigInt>> {
    induction_prefix(k, k)
}

/// `G_0..G_len` by the recurrence.
pub fn induction_prefix(k: u64, len: u64) -> Result<Vec<BigInt>> {
    check_k(k)?;
    let step = BigInt::from(k) - 2;
    let mut seq = vec![BigInt::from(2 * k - 1)];
    for _ in 0..len {
        let next = 2 * seq.last().expect("nonempty") + &step;
        seq.push(next);
    }
    Ok(seq)
}

pub fn g_gonality(k: u64) -> Result<BigInt> {
    check_k(k)?;
    Ok(induction_closed_form(k, (k - 2) as u32))
}

pub fn g_orbit_all(k: u64) -> Result<BigInt> {
    check_k(k)?;
    Ok(induction_closed_form(k, k as u32))
}

pub fn g_orbit_countable(k: u64) -> Result<BigInt> {
    check_k(k)?;
    Ok(BigInt::from(2 * k - 1))
}

/// Conjectured gonality threshold `2k - 1`. Not a proven bound.
pub fn conjectured_g_gonality(k: u64) -> Result<BigInt> {
    g_orbit_countable(k)
}

pub fn thresholds(k: u64) -> Result<ThresholdTable> {
    check_k(k)?;
    let g_gonality = g_gonality(k)?;
    Ok(ThresholdTable {
        k,
        g_orbit_weierstrass: g_gonality.clone(),
        g_gonality,
        g_orbit_all: g_orbit_all(k)?,
        g_orbit_countable: g_orbit_countable(k)?,
        induction: induction_sequence(k)?,
    })
}

/// `(2 g0 - 1, g0 + k - 1)`: dimensions from which orbits are countable,
/// starting from a variety of dimension `g0` containing the cycle.
pub fn descent_thresholds(g0: u64, k: u64) -> Result<(u64, u64)> {
    if g0 == 0 || k == 0 {
        return Err(Error::Range("g0 and k must be positive".into()));
    }
    Ok((2 * g0 - 1, g0 + k - 1))
}

/// Worst-case dimension descent: `start_dim` at `g0`, dropping by one per
/// unit of `g` until it reaches zero. Returns `(g, dim)` pairs.
pub fn descent_simulation(g0: u64, start_dim: u64) -> Vec<(u64, u64)> {
    (0..=start_dim).map(|s| (g0 + s, start_dim - s)).collect()
}

/// Largest `k` with `g_gonality(k) <= g`, so curves in a very general
/// `g`-dimensional abelian variety have gonality at least `k + 1`.
/// Returns 1 when `g < 3`.
pub fn max_proven_gonality(g: &BigInt) -> u64 {
    largest_k_below(g, |k| g_gonality(k).expect("k >= 2"))
}

pub fn max_k_orbit_all(g: &BigInt) -> u64 {
    largest_k_below(g, |k| g_orbit_all(k).expect("k >= 2"))
}

pub fn max_k_countable(g: &BigInt) -> u64 {
    largest_k_below(g, |k| g_orbit_countable(k).expect("k >= 2"))
}

fn largest_k_below(g: &BigInt, threshold: impl Fn(u64) -> BigInt) -> u64 {
    let mut best = 1;
    let mut k = 2;
    while threshold(k) <= *g {
        best = k;
        k += 1;
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusSummary {
    #[serde(serialize_with = "ser_big")]
    pub g: BigInt,
    pub gonality_at_least: u64,
    pub orbit_all_max_k: u64,
    pub countable_max_k: u64,
    pub conjectured_gonality_at_least: u64,
}

pub fn genus_summary(g: &BigInt) -> GenusSummary {
    GenusSummary {
        g: g.clone(),
        gonality_at_least: max_proven_gonality(g) + 1,
        orbit_all_max_k: max_k_orbit_all(g),
        countable_max_k: max_k_countable(g),
        conjectured_gonality_at_least: max_k_countable(g) + 1,
    }
}
