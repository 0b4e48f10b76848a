//! Group-ring model of zero-cycles with rational coefficients.
//!
//! Points live in a free abelian group `Z^r`; a [`Cycle`] is a finitely
//! supported map from points to rationals and the Pontryagin product is
//! convolution. Nothing in this module quotients by the nilpotency of the
//! augmentation ideal: every identity computed here holds in the free group
//! ring. The one exception is [`Cycle::augmentation_jet`], which is the
//! explicit quotient map `Q[Z^r] -> Q[Z^r] / I^n` and is named as such.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{binomial_signed, common_denominator, factorial, fmt_rational, parse_rational, Rational};

/// Default bound on the height of any point produced by a product.
pub const DEFAULT_SUPPORT_CAP: u64 = 4096;

/// An element of the free abelian group `Z^r`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupPoint(Vec<BigInt>);

impl GroupPoint {
    pub fn new(coords: Vec<BigInt>) -> Self {
        GroupPoint(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        GroupPoint(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn origin(rank: usize) -> Self {
        GroupPoint(vec![BigInt::zero(); rank])
    }

    /// The `index`-th designated generator (0-based).
    pub fn generator(rank: usize, index: usize) -> Self {
        assert!(index < rank, "generator index {index} out of range for rank {rank}");
        let mut coords = vec![BigInt::zero(); rank];
        coords[index] = BigInt::one();
        GroupPoint(coords)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Multiplication by an integer `n` in the group.
    pub fn scale(&self, n: &BigInt) -> Self {
        GroupPoint(self.0.iter().map(|c| c * n).collect())
    }

    /// Total height: the sum of absolute coordinates.
    pub fn height(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

impl Add for &GroupPoint {
    type Output = GroupPoint;

    fn add(self, other: &GroupPoint) -> GroupPoint {
        assert_eq!(self.rank(), other.rank(), "adding points of different rank");
        GroupPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Rank, geometric dimension and support cap for truncated computations.
///
/// The augmentation ideal of an abelian variety of dimension `g` is
/// nilpotent of order `g + 1`; series in this module therefore stop at
/// order `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingContext {
    rank: usize,
    geom_dim: u32,
    support_cap: u64,
}

impl RingContext {
    pub fn new(rank: usize, geom_dim: u32) -> Result<Self> {
        Self::with_support_cap(rank, geom_dim, DEFAULT_SUPPORT_CAP)
    }

    pub fn with_support_cap(rank: usize, geom_dim: u32, support_cap: u64) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Range("rank must be positive".into()));
        }
        if geom_dim == 0 {
            return Err(Error::Range("geometric dimension must be positive".into()));
        }
        Ok(RingContext { rank, geom_dim, support_cap })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn geom_dim(&self) -> u32 {
        self.geom_dim
    }

    pub fn support_cap(&self) -> u64 {
        self.support_cap
    }

    pub fn nilpotency_order(&self) -> u32 {
        self.geom_dim + 1
    }

    fn check_rank(&self, c: &Cycle) -> Result<()> {
        if c.rank != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: c.rank });
        }
        Ok(())
    }
}

/// A zero-cycle with rational coefficients, kept in canonical form
/// (no zero coefficient is ever stored).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cycle {
    rank: usize,
    terms: BTreeMap<GroupPoint, Rational>,
}

impl Cycle {
    pub fn zero(rank: usize) -> Self {
        Cycle { rank, terms: BTreeMap::new() }
    }

    /// The cycle `{p}` of a single point.
    pub fn point(p: GroupPoint) -> Self {
        let rank = p.rank();
        let mut terms = BTreeMap::new();
        terms.insert(p, Rational::one());
        Cycle { rank, terms }
    }

    /// `{0_A}`, the unit for the Pontryagin product.
    pub fn unit(rank: usize) -> Self {
        Self::point(GroupPoint::origin(rank))
    }

    /// `{x} - {0}` for the point `x`.
    pub fn augmentation_generator(x: &GroupPoint) -> Self {
        &Self::point(x.clone()) - &Self::unit(x.rank())
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (GroupPoint, Rational)>) -> Result<Self> {
        let mut out = Cycle::zero(rank);
        for (p, q) in terms {
            if p.rank() != rank {
                return Err(Error::RankMismatch { expected: rank, found: p.rank() });
            }
            out.add_term(p, q);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupPoint, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &GroupPoint) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, p: GroupPoint, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += q;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Exact sum of the coefficients.
    pub fn degree(&self) -> Rational {
        self.terms.values().sum()
    }

    pub fn scale(&self, q: &Rational) -> Cycle {
        if q.is_zero() {
            return Cycle::zero(self.rank);
        }
        Cycle {
            rank: self.rank,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * q)).collect(),
        }
    }

    /// Pushforward along multiplication by `n`.
    pub fn pushforward(&self, n: &BigInt) -> Cycle {
        let mut out = Cycle::zero(self.rank);
        for (p, q) in &self.terms {
            out.add_term(p.scale(n), q.clone());
        }
        out
    }

    /// Largest point height in the support (0 for the empty cycle).
    pub fn max_height(&self) -> BigInt {
        self.terms.keys().map(GroupPoint::height).max().unwrap_or_else(BigInt::zero)
    }

    /// Image in `Q[Z^r] / I^order`, written in the variables `y_i = {e_i} - {0}`.
    ///
    /// A point `p` maps to `prod_i (1 + y_i)^{p_i}`, expanded with
    /// generalised binomials and truncated at total degree `order`. Two
    /// cycles agree modulo the `order`-th power of the augmentation ideal
    /// exactly when their jets agree.
    pub fn augmentation_jet(&self, order: u32) -> AugmentationJet {
        let exponents = exponents_below(self.rank, order);
        let mut coeffs: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (p, q) in &self.terms {
            let per_coord: Vec<Vec<BigInt>> = p
                .coords()
                .iter()
                .map(|c| (0..order).map(|t| binomial_signed(c, t)).collect())
                .collect();
            for alpha in &exponents {
                let mut prod = BigInt::one();
                for (i, &a) in alpha.iter().enumerate() {
                    prod *= &per_coord[i][a as usize];
                    if prod.is_zero() {
                        break;
                    }
                }
                if prod.is_zero() {
                    continue;
                }
                let entry = coeffs.entry(alpha.clone()).or_insert_with(Rational::zero);
                *entry += q * Rational::from_integer(prod);
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        AugmentationJet { rank: self.rank, order, coeffs }
    }
}

fn exponents_below(rank: usize, order: u32) -> Vec<Vec<u32>> {
    fn rec(rank: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == rank {
            out.push(prefix.clone());
            return;
        }
        for a in 0..=budget {
            prefix.push(a);
            rec(rank, budget - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if order > 0 {
        rec(rank, order - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// A truncated polynomial in `y_1..y_r`; see [`Cycle::augmentation_jet`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AugmentationJet {
    pub rank: usize,
    pub order: u32,
    pub coeffs: BTreeMap<Vec<u32>, Rational>,
}

impl AugmentationJet {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// True iff `a - b` lies in the `order`-th power of the augmentation ideal.
pub fn congruent_mod_augmentation_power(a: &Cycle, b: &Cycle, order: u32) -> bool {
    (a - b).augmentation_jet(order).is_zero()
}

impl Add for &Cycle {
    type Output = Cycle;

    fn add(self, other: &Cycle) -> Cycle {
        assert_eq!(self.rank, other.rank, "adding cycles of different rank");
        let mut out = self.clone();
        for (p, q) in &other.terms {
            out.add_term(p.clone(), q.clone());
        }
        out
    }
}

impl Sub for &Cycle {
    type Output = Cycle;

    fn sub(self, other: &Cycle) -> Cycle {
        self + &(-other)
    }
}

impl Neg for &Cycle {
    type Output = Cycle;

    fn neg(self) -> Cycle {
        Cycle {
            rank: self.rank,
            terms: self.terms.iter().map(|(p, q)| (p.clone(), -q)).collect(),
        }
    }
}

impl Mul<&Rational> for &Cycle {
    type Output = Cycle;

    fn mul(self, q: &Rational) -> Cycle {
        self.scale(q)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, q)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}{{{}}}", fmt_rational(q), p)?;
        }
        Ok(())
    }
}

/// Term-wise exact sum.
pub fn cycle_add(c1: &Cycle, c2: &Cycle) -> Cycle {
    c1 + c2
}

pub fn degree(c: &Cycle) -> Rational {
    c.degree()
}

pub fn pushforward(c: &Cycle, n: i64) -> Cycle {
    c.pushforward(&BigInt::from(n))
}

/// Integer numerators over a common denominator.
fn integer_form(c: &Cycle) -> (BigInt, Vec<(&GroupPoint, BigInt)>) {
    let den = common_denominator(c.terms.values());
    let terms = c
        .terms
        .iter()
        .map(|(p, q)| (p, q.numer() * (&den / q.denom())))
        .collect();
    (den, terms)
}

fn small_coords(p: &GroupPoint) -> Option<Vec<i64>> {
    const LIMIT: i64 = 1 << 60;
    p.coords()
        .iter()
        .map(|c| c.to_i64().filter(|v| v.abs() < LIMIT))
        .collect()
}

/// Pontryagin product: convolution of coefficients over the group law.
pub fn pontryagin(c1: &Cycle, c2: &Cycle, ctx: &RingContext) -> Result<Cycle> {
    ctx.check_rank(c1)?;
    ctx.check_rank(c2)?;
    if c1.is_zero() || c2.is_zero() {
        return Ok(Cycle::zero(ctx.rank));
    }
    let (d1, t1) = integer_form(c1);
    let (d2, t2) = integer_form(c2);
    let cap = BigInt::from(ctx.support_cap);

    let small1: Option<Vec<_>> = t1.iter().map(|(p, n)| small_coords(p).map(|s| (s, n))).collect();
    let small2: Option<Vec<_>> = t2.iter().map(|(p, n)| small_coords(p).map(|s| (s, n))).collect();

    let mut merged: Vec<(GroupPoint, BigInt)> = Vec::new();
    if let (Some(s1), Some(s2)) = (small1, small2) {
        let cap_small = ctx.support_cap.min(i64::MAX as u64) as i64;
        let mut acc: HashMap<Vec<i64>, BigInt> = HashMap::new();
        for (p1, n1) in &s1 {
            for (p2, n2) in &s2 {
                let sum: Vec<i64> = p1.iter().zip(p2).map(|(a, b)| a + b).collect();
                let height: i64 = sum.iter().map(|c| c.abs()).sum();
                if height > cap_small {
                    return Err(Error::SupportCapExceeded { height: BigInt::from(height), cap: ctx.support_cap });
                }
                *acc.entry(sum).or_insert_with(BigInt::zero) += *n1 * *n2;
            }
        }
        merged.extend(acc.into_iter().map(|(p, n)| (GroupPoint::from_i64s(&p), n)));
    } else {
        let mut acc: BTreeMap<GroupPoint, BigInt> = BTreeMap::new();
        for (p1, n1) in &t1 {
            for (p2, n2) in &t2 {
                let sum = *p1 + *p2;
                let height = sum.height();
                if height > cap {
                    return Err(Error::SupportCapExceeded { height, cap: ctx.support_cap });
                }
                *acc.entry(sum).or_insert_with(BigInt::zero) += n1 * n2;
            }
        }
        merged.extend(acc);
    }

    let den = Rational::from_integer(d1 * d2);
    let mut out = Cycle::zero(ctx.rank);
    for (p, n) in merged {
        if !n.is_zero() {
            out.terms.insert(p, Rational::from_integer(n) / &den);
        }
    }
    Ok(out)
}

/// `c^{*k}`; the empty product is `{0}`.
pub fn star_power(c: &Cycle, k: u32, ctx: &RingContext) -> Result<Cycle> {
    ctx.check_rank(c)?;
    let mut acc = Cycle::unit(ctx.rank);
    for _ in 0..k {
        acc = pontryagin(&acc, c, ctx)?;
    }
    Ok(acc)
}

fn require_degree(c: &Cycle, expected: i64) -> Result<()> {
    let found = c.degree();
    let expected = Rational::from_integer(BigInt::from(expected));
    if found != expected {
        return Err(Error::Degree { expected: Box::new(expected), found: Box::new(found) });
    }
    Ok(())
}

/// `sum_{n=1}^{terms} (-1)^{n+1} u^{*n} / n` with `u = c - {0}`.
///
/// No degree check; [`log_cycle`] is the checked entry point.
pub fn log_series(c: &Cycle, terms: u32, ctx: &RingContext) -> Result<Cycle> {
    ctx.check_rank(c)?;
    let u = c - &Cycle::unit(ctx.rank);
    let mut power = Cycle::unit(ctx.rank);
    let mut out = Cycle::zero(ctx.rank);
    for n in 1..=terms {
        power = pontryagin(&power, &u, ctx)?;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        out = &out + &power.scale(&Rational::new(BigInt::from(sign), BigInt::from(n)));
    }
    Ok(out)
}

/// `{0} + sum_{n=1}^{terms} d^{*n} / n!`.
pub fn exp_series(d: &Cycle, terms: u32, ctx: &RingContext) -> Result<Cycle> {
    ctx.check_rank(d)?;
    let mut power = Cycle::unit(ctx.rank);
    let mut out = Cycle::unit(ctx.rank);
    for n in 1..=terms {
        power = pontryagin(&power, d, ctx)?;
        let inv = Rational::new(BigInt::one(), factorial(n as u64));
        out = &out + &power.scale(&inv);
    }
    Ok(out)
}

/// Pontryagin logarithm of a degree-one cycle, truncated after order `g`
/// (terms of order `g + 1` and beyond lie in `I^{*(g+1)}`).
pub fn log_cycle(c: &Cycle, ctx: &RingContext) -> Result<Cycle> {
    require_degree(c, 1)?;
    log_series(c, ctx.geom_dim, ctx)
}

/// Pontryagin exponential of a degree-zero cycle, truncated after order `g`.
pub fn exp_cycle(d: &Cycle, ctx: &RingContext) -> Result<Cycle> {
    require_degree(d, 0)?;
    exp_series(d, ctx.geom_dim, ctx)
}

/// `gamma(x) = sum_{j=1}^{g} ({0} - {x})^{*j} / j`, which equals `-log {x}`.
pub fn gamma(x: &GroupPoint, ctx: &RingContext) -> Result<Cycle> {
    if x.rank() != ctx.rank {
        return Err(Error::RankMismatch { expected: ctx.rank, found: x.rank() });
    }
    let v = &Cycle::unit(ctx.rank) - &Cycle::point(x.clone());
    let mut power = Cycle::unit(ctx.rank);
    let mut out = Cycle::zero(ctx.rank);
    for j in 1..=ctx.geom_dim {
        power = pontryagin(&power, &v, ctx)?;
        out = &out + &power.scale(&Rational::new(BigInt::one(), BigInt::from(j)));
    }
    Ok(out)
}

/// `sum_{n=0}^{terms-1} (-1)^n u^{*n} / (n+1)`; multiplying by `-u` gives
/// the first `terms` orders of `-log(1 + u)`.
pub fn gamma_factor_series(x: &GroupPoint, terms: u32, ctx: &RingContext) -> Result<Cycle> {
    if x.rank() != ctx.rank {
        return Err(Error::RankMismatch { expected: ctx.rank, found: x.rank() });
    }
    let u = Cycle::augmentation_generator(x);
    let mut power = Cycle::unit(ctx.rank);
    let mut out = Cycle::zero(ctx.rank);
    for n in 0..terms {
        if n > 0 {
            power = pontryagin(&power, &u, ctx)?;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        out = &out + &power.scale(&Rational::new(BigInt::from(sign), BigInt::from(n + 1)));
    }
    Ok(out)
}

/// Degree-one `w` with `gamma(x) = -(({x} - {0}) * w)` exactly.
///
/// Since `w` is a unit modulo the augmentation ideal, `gamma(x)^{*k}` and
/// `({x} - {0})^{*k}` vanish together.
pub fn gamma_factorization(x: &GroupPoint, ctx: &RingContext) -> Result<Cycle> {
    if x.is_origin() {
        return Err(Error::PreconditionViolated("gamma_factorization needs x != 0".into()));
    }
    gamma_factor_series(x, ctx.geom_dim, ctx)
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    point: Vec<serde_json::Number>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct CycleRepr {
    rank: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Cycle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(p, q)| {
                let point = p
                    .coords()
                    .iter()
                    .map(|c| c.to_string().parse::<serde_json::Number>().map_err(serde::ser::Error::custom))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(TermRepr { point, coeff: fmt_rational(q) })
            })
            .collect::<std::result::Result<Vec<_>, S::Error>>()?;
        CycleRepr { rank: self.rank, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cycle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycleRepr::deserialize(d)?;
        let mut out = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let coords = t
                .point
                .iter()
                .map(|n| n.to_string().parse::<BigInt>().map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let q = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            out.push((GroupPoint::new(coords), q));
        }
        Cycle::from_terms(repr.rank, out).map_err(D::Error::custom)
    }
}
