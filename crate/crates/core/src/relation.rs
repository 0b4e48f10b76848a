//! Relation calculus for points `x_1..x_k` with `sum {x_i} = k{0}`.
//!
//! The model is the free group ring on generators `x_1..x_k`. The
//! hypothesis enters only as the cycle `h = sum_i {x_i} - k{0}` and its
//! pushforwards `(m_j)_* h`; nilpotency of the augmentation ideal enters
//! only as explicit products of `g + 1` generators `u_i = {x_i} - {0}`.
//! A [`MembershipCertificate`] writes `u_1^{*k}` as a combination of these
//! and is checked by re-expansion with the group-ring product.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cycle::{pontryagin, star_power, Cycle, GroupPoint, RingContext, DEFAULT_SUPPORT_CAP};
use crate::error::{Error, Result};
use crate::linalg::{SparseColumn, SpanSolver};
use crate::rational::{binomial, Rational};

/// Column-count guard for a single membership window.
pub const MAX_WINDOW_COLUMNS: usize = 400_000;

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::Range(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `gamma_l = sum_{|I| = l, I in {2..k}} {x_I}` in rank `k`; `gamma_0 = {0}`.
pub fn free_gamma(k: u32, l: u32) -> Cycle {
    let rank = k as usize;
    let others: Vec<usize> = (1..rank).collect();
    let mut out = Cycle::zero(rank);
    for subset in subsets(&others, l as usize) {
        let mut coords = vec![BigInt::zero(); rank];
        for i in subset {
            coords[i] += 1;
        }
        out = &out + &Cycle::point(GroupPoint::new(coords));
    }
    out
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Both sides of
/// `(sum_{i>=2} {x_i}) * gamma_l = (l+1) gamma_{l+1} + sum_{i=1}^{l} (-1)^{i+1} ((m_{i+1})_* gamma_1) * gamma_{l-i}`.
pub fn recursion_sides(k: u32, l: u32, ctx: &RingContext) -> Result<(Cycle, Cycle)> {
    check_k(k)?;
    if l == 0 || l > k - 1 {
        return Err(Error::Range(format!("l must satisfy 1 <= l <= k-1, got l = {l}, k = {k}")));
    }
    if ctx.rank() != k as usize {
        return Err(Error::RankMismatch { expected: k as usize, found: ctx.rank() });
    }
    let gamma: Vec<Cycle> = (0..=l + 1).map(|j| free_gamma(k, j)).collect();
    let lhs = pontryagin(&gamma[1], &gamma[l as usize], ctx)?;
    let mut rhs = gamma[l as usize + 1].scale(&Rational::from_integer(BigInt::from(l + 1)));
    for i in 1..=l {
        let pushed = gamma[1].pushforward(&BigInt::from(i + 1));
        let term = pontryagin(&pushed, &gamma[(l - i) as usize], ctx)?;
        rhs = if i % 2 == 1 { &rhs + &term } else { &rhs - &term };
    }
    Ok((lhs, rhs))
}

/// Whether the Newton-type recursion holds exactly in the free group ring.
pub fn check_recursion_identity(k: u32, l: u32, ctx: &RingContext) -> Result<bool> {
    let (lhs, rhs) = recursion_sides(k, l, ctx)?;
    Ok(lhs == rhs)
}

/// Coefficients `alpha_{l,i}` of `gamma_l = sum_i alpha_{l,i} {i x_1}` after
/// substituting the hypothesis, for `0 <= i <= l <= k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaMatrix {
    pub k: u32,
    #[serde(with = "rational_rows")]
    pub rows: Vec<Vec<Rational>>,
    /// `(l, i)` with `1 <= l <= k` and `alpha_{l,i} = 0`. Expected empty.
    pub zero_entries: Vec<(u32, u32)>,
}

impl AlphaMatrix {
    pub fn entry(&self, l: u32, i: u32) -> &Rational {
        &self.rows[l as usize][i as usize]
    }

    pub fn row(&self, l: u32) -> &[Rational] {
        &self.rows[l as usize]
    }

    pub fn row_sum(&self, l: u32) -> Rational {
        self.row(l).iter().sum()
    }

    /// `gamma_l` as a rank-one cycle in `x_1`.
    pub fn gamma(&self, l: u32) -> Cycle {
        let terms = self.row(l).iter().enumerate().map(|(i, q)| (GroupPoint::from_i64s(&[i as i64]), q.clone()));
        Cycle::from_terms(1, terms).expect("rank one")
    }
}

mod rational_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{fmt_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(fmt_rational).collect()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
        strs.iter()
            .map(|r| r.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

/// Runs `(l+1) gamma_{l+1} = sum_{i=0}^{l} (-1)^i ((m_{i+1})_* gamma_1) * gamma_{l-i}`
/// from `gamma_0 = {0}`, `gamma_1 = -{x_1} + k{0}`.
pub fn alpha_coefficients(k: u32) -> Result<AlphaMatrix> {
    check_k(k)?;
    let ctx = RingContext::with_support_cap(1, 1, (k as u64 + 1).max(DEFAULT_SUPPORT_CAP))?;
    let origin = GroupPoint::origin(1);
    let x1 = GroupPoint::from_i64s(&[1]);
    let k_unit = Cycle::unit(1).scale(&Rational::from_integer(BigInt::from(k)));
    let gamma1 = &k_unit - &Cycle::point(x1);
    let pushed: Vec<Cycle> = (0..=k).map(|n| gamma1.pushforward(&BigInt::from(n))).collect();

    let mut gammas = vec![Cycle::point(origin), gamma1.clone()];
    for l in 1..k {
        let mut acc = Cycle::zero(1);
        for i in 0..=l {
            let term = pontryagin(&pushed[(i + 1) as usize], &gammas[(l - i) as usize], &ctx)?;
            acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        gammas.push(acc.scale(&Rational::new(BigInt::one(), BigInt::from(l + 1))));
    }

    let mut rows = Vec::with_capacity(k as usize + 1);
    let mut zero_entries = Vec::new();
    for (l, g) in gammas.iter().enumerate() {
        let row: Vec<Rational> = (0..=l).map(|i| g.coeff(&GroupPoint::from_i64s(&[i as i64]))).collect();
        if l >= 1 {
            zero_entries.extend(row.iter().enumerate().filter(|(_, q)| q.is_zero()).map(|(i, _)| (l as u32, i as u32)));
        }
        rows.push(row);
    }
    Ok(AlphaMatrix { k, rows, zero_entries })
}

/// Coordinates over `{j x_1}` to coordinates over `u^{*i}` (`u = {x_1} - {0}`),
/// using `{j x_1} = sum_i C(j, i) u^{*i}`.
pub fn power_basis_change(coeffs: &[Rational]) -> Vec<Rational> {
    let n = coeffs.len();
    (0..n)
        .map(|i| {
            (i..n)
                .map(|j| &coeffs[j] * Rational::from_integer(binomial(j as u64, i as u64)))
                .sum()
        })
        .collect()
}

/// Inverse of [`power_basis_change`], from `u^{*i} = sum_j (-1)^{i-j} C(i, j) {j x_1}`.
pub fn inverse_power_basis_change(coeffs: &[Rational]) -> Vec<Rational> {
    let n = coeffs.len();
    (0..n)
        .map(|j| {
            (j..n)
                .map(|i| {
                    let c = Rational::from_integer(binomial(i as u64, j as u64));
                    if (i - j) % 2 == 0 {
                        &coeffs[i] * c
                    } else {
                        -(&coeffs[i] * c)
                    }
                })
                .sum()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTerm {
    pub label: String,
    /// The pushforward index `j` of `(m_j)_* h`.
    pub j: u32,
    pub generator: Cycle,
    pub multiplier: Cycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotentTerm {
    pub description: String,
    /// 1-based indices `i` of the factors `u_i = {x_i} - {0}`.
    pub factors: Vec<usize>,
    pub product: Cycle,
    pub multiplier: Cycle,
}

/// `target = sum multiplier * generator + sum multiplier * product`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub certificate_version: u32,
    pub k: u32,
    pub g: u32,
    pub j_max: u32,
    /// Monomial height of the window in which the certificate was found.
    pub window_height: u32,
    pub target: Cycle,
    pub generators: Vec<GeneratorTerm>,
    pub nilpotent_part: Vec<NilpotentTerm>,
}

/// `h = sum_i {x_i} - k{0}` in rank `k`.
pub fn hypothesis_cycle(k: u32) -> Cycle {
    let rank = k as usize;
    let mut h = Cycle::unit(rank).scale(&Rational::from_integer(-BigInt::from(k)));
    for i in 0..rank {
        h = &h + &Cycle::point(GroupPoint::generator(rank, i));
    }
    h
}

/// `u_1^{*k}` in rank `k`.
pub fn relation_target(k: u32, ctx: &RingContext) -> Result<Cycle> {
    let u = Cycle::augmentation_generator(&GroupPoint::generator(k as usize, 0));
    star_power(&u, k, ctx)
}

fn nilpotent_product(k: u32, factors: &[usize], ctx: &RingContext) -> Result<Cycle> {
    let rank = k as usize;
    let mut acc = Cycle::unit(rank);
    for &f in factors {
        if f == 0 || f > rank {
            return Err(Error::PreconditionViolated(format!("factor index {f} outside 1..={rank}")));
        }
        let u = Cycle::augmentation_generator(&GroupPoint::generator(rank, f - 1));
        acc = pontryagin(&acc, &u, ctx)?;
    }
    Ok(acc)
}

fn describe_factors(factors: &[usize]) -> String {
    factors.iter().map(|f| format!("u_{f}")).collect::<Vec<_>>().join("*")
}

fn verification_context(cert: &MembershipCertificate) -> Result<RingContext> {
    let cap = (4 * cert.window_height as u64 + 4 * cert.k as u64).max(DEFAULT_SUPPORT_CAP);
    RingContext::with_support_cap(cert.k as usize, cert.g.max(1), cap)
}

impl MembershipCertificate {
    /// Re-expands every term with the group-ring product and compares with
    /// the target. Generators and products are recomputed from their
    /// indices, so a tampered certificate is rejected.
    pub fn verify(&self) -> Result<()> {
        let reject = |msg: String| Err(Error::CertificateRejected(msg));
        let ctx = verification_context(self)?;
        let expected_target = relation_target(self.k, &ctx)?;
        if self.target != expected_target {
            return reject("target is not u_1^{*k}".into());
        }
        let h = hypothesis_cycle(self.k);
        let mut total = Cycle::zero(self.k as usize);
        for t in &self.generators {
            if t.j == 0 || t.j > self.j_max {
                return reject(format!("pushforward index {} outside 1..={}", t.j, self.j_max));
            }
            if t.generator != h.pushforward(&BigInt::from(t.j)) {
                return reject(format!("generator {} is not (m_{})_*h", t.label, t.j));
            }
            total = &total + &pontryagin(&t.multiplier, &t.generator, &ctx)?;
        }
        for t in &self.nilpotent_part {
            if t.factors.len() != self.g as usize + 1 {
                return reject(format!("{} has {} factors, need g+1 = {}", t.description, t.factors.len(), self.g + 1));
            }
            if t.product != nilpotent_product(self.k, &t.factors, &ctx)? {
                return reject(format!("product {} does not match its factors", t.description));
            }
            total = &total + &pontryagin(&t.multiplier, &t.product, &ctx)?;
        }
        if total != self.target {
            return reject("re-expanded combination differs from the target".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn default_j_max(k: u32, g: u32) -> u32 {
    k * (g + 1)
}

pub fn default_cap(k: u32, g: u32) -> u32 {
    k * (g + 1)
}

/// Certificate using only the nilpotency span, available when `k >= g + 1`:
/// `u_1^{*k} = u_1^{*(k-g-1)} * u_1^{*(g+1)}`.
pub fn nilpotent_certificate(k: u32, g: u32) -> Result<Option<MembershipCertificate>> {
    check_k(k)?;
    if g == 0 {
        return Err(Error::Range("g must be positive".into()));
    }
    if k < g + 1 {
        return Ok(None);
    }
    let ctx = RingContext::with_support_cap(k as usize, g, (4 * k as u64).max(DEFAULT_SUPPORT_CAP))?;
    let factors = vec![1; g as usize + 1];
    let product = nilpotent_product(k, &factors, &ctx)?;
    let u = Cycle::augmentation_generator(&GroupPoint::generator(k as usize, 0));
    let multiplier = star_power(&u, k - g - 1, &ctx)?;
    let cert = MembershipCertificate {
        certificate_version: 1,
        k,
        g,
        j_max: 0,
        window_height: k,
        target: relation_target(k, &ctx)?,
        generators: Vec::new(),
        nilpotent_part: vec![NilpotentTerm { description: describe_factors(&factors), factors, product, multiplier }],
    };
    cert.verify()?;
    Ok(Some(cert))
}

/// Exponent vectors in `N^rank` of total degree exactly `degree`.
fn exponents_of_degree(rank: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(rank: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == rank {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            rec(rank, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, degree, &mut Vec::new(), &mut out);
    out
}

fn multisets(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, size: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        for i in start..=k {
            prefix.push(i);
            rec(k, size, i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, size, 1, &mut Vec::new(), &mut out);
    out
}

/// Integer terms of a polynomial cycle: `(exponent vector, coefficient)`.
/// Integer polynomial as (exponent vector, coefficient) pairs.
type Poly = Vec<(Vec<u32>, BigInt)>;

fn polynomial_terms(c: &Cycle) -> Poly {
    c.terms()
        .map(|(p, q)| {
            assert!(q.is_integer(), "window generators have integer coefficients");
            let exps = p.coords().iter().map(|x| x.to_u32().expect("nonnegative exponent")).collect();
            (exps, q.to_integer())
        })
        .collect()
}

/// Which spanning family a column belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Family {
    Pushforward(u32),
    Nilpotent(usize),
}

struct Window {
    rows: HashMap<Vec<u32>, usize>,
    relation: SpanSolver,
    full: SpanSolver,
    relation_cols: Vec<(Family, Vec<u32>)>,
    full_cols: Vec<(Family, Vec<u32>)>,
}

impl Window {
    fn row_index(&mut self, e: Vec<u32>) -> usize {
        let next = self.rows.len();
        *self.rows.entry(e).or_insert(next)
    }

    fn column(&mut self, poly: &[(Vec<u32>, BigInt)], shift: &[u32]) -> SparseColumn {
        let mut col = SparseColumn::new();
        for (e, c) in poly {
            let moved: Vec<u32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            let idx = self.row_index(moved);
            *col.entry(idx).or_insert_with(BigInt::zero) += c;
        }
        col.retain(|_, v| !v.is_zero());
        col
    }
}

fn sort_by_support(batch: &mut [(Family, Vec<u32>, SparseColumn)]) {
    batch.sort_by_key(|(_, _, col)| col.len());
}

fn multiplier_cycle(rank: usize, terms: &[(Vec<u32>, Rational)]) -> Cycle {
    let terms = terms.iter().map(|(e, q)| {
        let coords = e.iter().map(|&a| BigInt::from(a)).collect();
        (GroupPoint::new(coords), q.clone())
    });
    Cycle::from_terms(rank, terms).expect("rank matches")
}

/// Searches for a certificate that `u_1^{*k}` lies in the span of
/// `m * (m_j)_* h` (`1 <= j <= j_max`) and `m * u_{i_1} * ... * u_{i_{g+1}}`
/// over monomials `m` in the window of height `<= cap`.
///
/// Heights are tried in increasing order; from height `k` on, the
/// relation ideal alone is tried before the nilpotency span is added. On
/// failure the search is repeated once up to `2 * cap`.
pub fn verify_relation(k: u32, g: u32, j_max: u32, cap: u32) -> Result<MembershipCertificate> {
    check_k(k)?;
    if g == 0 || j_max == 0 || cap == 0 {
        return Err(Error::Range("g, j_max and cap must be positive".into()));
    }
    let rank = k as usize;
    let ctx = RingContext::with_support_cap(rank, g, (4 * cap as u64 + 4 * k as u64).max(DEFAULT_SUPPORT_CAP))?;
    let target_cycle = relation_target(k, &ctx)?;
    let target_poly = polynomial_terms(&target_cycle);

    let h = hypothesis_cycle(k);
    let pushforwards: Vec<(u32, Poly)> =
        (1..=j_max).map(|j| (j, polynomial_terms(&h.pushforward(&BigInt::from(j))))).collect();
    let nil_factors = multisets(rank, g as usize + 1);
    let nil_polys: Vec<Poly> = nil_factors
        .iter()
        .map(|f| nilpotent_product(k, f, &ctx).map(|c| polynomial_terms(&c)))
        .collect::<Result<_>>()?;

    let mut window = Window {
        rows: HashMap::new(),
        relation: SpanSolver::new(),
        full: SpanSolver::new(),
        relation_cols: Vec::new(),
        full_cols: Vec::new(),
    };
    let target_col = window.column(&target_poly, &vec![0; rank]);
    let mut columns_total = 0usize;

    let limit = 2 * cap;
    for height in 1..=limit {
        // columns whose product has total degree exactly `height`
        let mut rel_batch = Vec::new();
        for (j, poly) in &pushforwards {
            if *j > height {
                continue;
            }
            for shift in exponents_of_degree(rank, height - j) {
                let col = window.column(poly, &shift);
                rel_batch.push((Family::Pushforward(*j), shift, col));
            }
        }
        let mut nil_batch = Vec::new();
        if g < height {
            for (idx, poly) in nil_polys.iter().enumerate() {
                for shift in exponents_of_degree(rank, height - g - 1) {
                    let col = window.column(poly, &shift);
                    nil_batch.push((Family::Nilpotent(idx), shift, col));
                }
            }
        }
        columns_total += 2 * rel_batch.len() + nil_batch.len();
        if columns_total > MAX_WINDOW_COLUMNS {
            return Err(Error::WindowTooLarge { monomials: window.rows.len(), columns: columns_total });
        }
        sort_by_support(&mut rel_batch);
        sort_by_support(&mut nil_batch);
        for (fam, shift, col) in rel_batch {
            window.relation.push_column(col.clone());
            window.relation_cols.push((fam, shift.clone()));
            window.full.push_column(col);
            window.full_cols.push((fam, shift));
        }
        if height < k {
            for (fam, shift, col) in nil_batch {
                window.full.push_column(col);
                window.full_cols.push((fam, shift));
            }
            continue;
        }
        if let Some(coeffs) = window.relation.express(&target_col) {
            return assemble(k, g, j_max, height, target_cycle, &window.relation_cols, &coeffs, &pushforwards, &nil_factors, &ctx, &h);
        }
        for (fam, shift, col) in nil_batch {
            window.full.push_column(col);
            window.full_cols.push((fam, shift));
        }
        if let Some(coeffs) = window.full.express(&target_col) {
            return assemble(k, g, j_max, height, target_cycle, &window.full_cols, &coeffs, &pushforwards, &nil_factors, &ctx, &h);
        }
    }
    let mut caps_tried = vec![cap as u64];
    if limit > cap {
        caps_tried.push(limit as u64);
    }
    Err(Error::NotFoundWithinCaps { caps_tried })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    k: u32,
    g: u32,
    j_max: u32,
    height: u32,
    target: Cycle,
    cols: &[(Family, Vec<u32>)],
    coeffs: &BTreeMap<usize, Rational>,
    pushforwards: &[(u32, Poly)],
    nil_factors: &[Vec<usize>],
    ctx: &RingContext,
    h: &Cycle,
) -> Result<MembershipCertificate> {
    let rank = k as usize;
    let mut grouped: BTreeMap<Family, Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
    for (&col, q) in coeffs {
        let (fam, shift) = &cols[col];
        grouped.entry(*fam).or_default().push((shift.clone(), q.clone()));
    }
    let mut generators = Vec::new();
    let mut nilpotent_part = Vec::new();
    for (fam, terms) in grouped {
        let multiplier = multiplier_cycle(rank, &terms);
        if multiplier.is_zero() {
            continue;
        }
        match fam {
            Family::Pushforward(j) => {
                debug_assert!(pushforwards.iter().any(|(jj, _)| *jj == j));
                generators.push(GeneratorTerm {
                    label: format!("(m_{j})_*h"),
                    j,
                    generator: h.pushforward(&BigInt::from(j)),
                    multiplier,
                });
            }
            Family::Nilpotent(idx) => {
                let factors = nil_factors[idx].clone();
                nilpotent_part.push(NilpotentTerm {
                    description: describe_factors(&factors),
                    product: nilpotent_product(k, &factors, ctx)?,
                    factors,
                    multiplier,
                });
            }
        }
    }
    let cert = MembershipCertificate {
        certificate_version: 1,
        k,
        g,
        j_max,
        window_height: height,
        target,
        generators,
        nilpotent_part,
    };
    cert.verify()?;
    Ok(cert)
}
