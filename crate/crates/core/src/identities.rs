//! Alternating binomial kernels `sum_i (-1)^{k-i} C(k,i) i^d` and the
//! scalars by which `(Gamma_k^Pont)^*` acts on forms of degree `d`.
//!
//! Two routes compute the kernel: the direct sum, and the derivatives of
//! `(X-1)^k` at `X = 1` converted back to the power basis with Stirling
//! numbers of the second kind.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::rational::{binomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelValue {
    pub k: u32,
    pub d: u32,
    pub value: Rational,
}

fn int_pow(i: u32, d: u32) -> BigInt {
    // 0^0 = 1
    BigInt::from(i).pow(d)
}

/// `sum_{i=0}^k (-1)^{k-i} C(k,i) i^d`. Zero for `0 < d < k` (and for
/// `d = 0`, `k >= 1`), `k!` for `d = k`. Values with `d > k` are exact but
/// carry no special meaning.
pub fn binomial_kernel(k: u32, d: u32) -> Rational {
    let mut acc = BigInt::zero();
    for i in 0..=k {
        let term = binomial(k as u64, i as u64) * int_pow(i, d);
        if (k - i) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Rational::from_integer(acc)
}

/// Coefficients of `(X - 1)^k`, lowest degree first.
fn shifted_power(k: u32) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for _ in 0..k {
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c;
        }
        poly = next;
    }
    poly
}

fn differentiate(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// The `d`-th derivative of `(X - 1)^k` at `X = 1`, i.e.
/// `sum_i (-1)^{k-i} C(k,i) i(i-1)...(i-d+1)`, by polynomial arithmetic.
pub fn derivative_oracle(k: u32, d: u32) -> Result<Rational> {
    if d > k {
        return Err(Error::Range(format!("derivative order {d} exceeds k = {k}")));
    }
    let mut poly = shifted_power(k);
    for _ in 0..d {
        poly = differentiate(&poly);
    }
    let at_one: BigInt = poly.iter().sum();
    Ok(Rational::from_integer(at_one))
}

/// Stirling numbers of the second kind `S(n, m)` for `0 <= m <= n`.
pub fn stirling_second_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 1..=n {
        let mut next = vec![BigInt::zero(); i as usize + 1];
        for m in 1..=i as usize {
            let carry = row.get(m).cloned().unwrap_or_default() * BigInt::from(m);
            next[m] = carry + &row[m - 1];
        }
        row = next;
    }
    row
}

/// Rebuilds the kernel from derivative values via
/// `i^d = sum_m S(d, m) i(i-1)...(i-m+1)`.
pub fn kernel_from_derivatives(k: u32, d: u32) -> Result<Rational> {
    let stirling = stirling_second_row(d);
    let mut acc = Rational::zero();
    for (m, s) in stirling.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        acc += Rational::from_integer(s.clone()) * derivative_oracle(k, m as u32)?;
    }
    Ok(acc)
}

/// The scalar `lambda` with `(Gamma_k^Pont)^* eta = lambda eta` for a
/// holomorphic form of degree `d`, using `m_i^* eta = i^d eta`.
pub fn pont_pullback_coefficient(k: u32, d: u32) -> Rational {
    binomial_kernel(k, d)
}

/// Evaluates the degree-`d` character `i -> i^d` on a rank-one cycle:
/// `sum_p coeff(p) * p^d`.
pub fn degree_character(c: &Cycle, d: u32) -> Result<Rational> {
    if c.rank() != 1 {
        return Err(Error::RankMismatch { expected: 1, found: c.rank() });
    }
    Ok(c.terms()
        .map(|(p, q)| q * Rational::from_integer(Pow::pow(&p.coords()[0], d)))
        .sum())
}

pub fn kernel_table(kmax: u32, dmax: u32) -> Vec<KernelValue> {
    let mut out = Vec::new();
    for k in 1..=kmax {
        for d in 0..=dmax {
            out.push(KernelValue { k, d, value: binomial_kernel(k, d) });
        }
    }
    out
}
