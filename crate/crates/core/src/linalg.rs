//! Exact linear algebra over `Q`.
//!
//! [`Matrix`] is a small dense matrix used by the tangent-space checkers.
//! [`SpanSolver`] decides membership in the span of many sparse integer
//! columns with fraction-free elimination and tracks the combination that
//! witnesses membership.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r.iter().cloned());
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = &m.data[idx] * &inv;
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let delta = &factor * m.get(r, j);
                    let idx = i * m.cols + j;
                    m.data[idx] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Nonzero rows of the reduced echelon form: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.rref();
        (0..pivots.len()).map(|r| m.row(r).to_vec()).collect()
    }

    /// Basis of `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, free).clone();
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `A x = b`, if any.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.data[r * (self.cols + 1) + c] = self.get(r, c).clone();
            }
            aug.data[r * (self.cols + 1) + self.cols] = b[r].clone();
        }
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = m.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }
}

/// Rank of a list of equal-length vectors.
pub fn rank_of(vectors: &[Vec<Rational>], dim: usize) -> Result<usize> {
    Ok(Matrix::from_rows(dim, vectors)?.rank())
}

/// Determinant of a square matrix given by rows.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for j in c..n {
                let delta = &f * &m[c][j];
                m[r][j] -= delta;
            }
        }
    }
    det
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub type SparseColumn = BTreeMap<usize, BigInt>;

struct Reduced {
    vec: SparseColumn,
    comb: BTreeMap<usize, Rational>,
}

/// Echelon basis of the span of integer columns, keyed by leading (largest) row index.
///
/// Each stored row carries `comb` with `vec = sum_j comb[j] * column_j`.
#[derive(Default)]
pub struct SpanSolver {
    basis: Vec<Reduced>,
    by_lead: HashMap<usize, usize>,
    columns_seen: usize,
}

fn content(v: &SparseColumn) -> BigInt {
    v.values().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// `beta * a - alpha * b` on sparse integer vectors.
fn combine(a: &SparseColumn, beta: &BigInt, b: &SparseColumn, alpha: &BigInt) -> SparseColumn {
    let mut out: SparseColumn = a.iter().map(|(&i, v)| (i, v * beta)).collect();
    for (&i, v) in b {
        let e = out.entry(i).or_insert_with(BigInt::zero);
        *e -= v * alpha;
        if e.is_zero() {
            out.remove(&i);
        }
    }
    out
}

fn combine_comb(
    a: &BTreeMap<usize, Rational>,
    beta: &BigInt,
    b: &BTreeMap<usize, Rational>,
    alpha: &Rational,
) -> BTreeMap<usize, Rational> {
    let beta = Rational::from_integer(beta.clone());
    let mut out: BTreeMap<usize, Rational> = a.iter().map(|(&i, v)| (i, v * &beta)).collect();
    for (&i, v) in b {
        let e = out.entry(i).or_insert_with(Rational::zero);
        *e += v * alpha;
        if e.is_zero() {
            out.remove(&i);
        }
    }
    out
}

impl SpanSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Eliminates leading terms against the basis until the leading index is
    /// not a pivot.
    ///
    /// With `scale = None` the invariant is `vec = comb . columns`; with
    /// `Some(lambda)` it is `vec = lambda * target - comb . columns`.
    fn reduce(&self, vec: &mut SparseColumn, comb: &mut BTreeMap<usize, Rational>, mut scale: Option<&mut BigInt>) {
        while let Some((&lead, val)) = vec.last_key_value() {
            let Some(&bi) = self.by_lead.get(&lead) else {
                break;
            };
            let b = &self.basis[bi];
            let b_lead = &b.vec[&lead];
            let g = val.gcd(b_lead);
            let beta = b_lead / &g;
            let alpha = val / &g;
            let mut new_vec = combine(vec, &beta, &b.vec, &alpha);
            let alpha_q = Rational::from_integer(if scale.is_some() { alpha } else { -alpha });
            let mut new_comb = combine_comb(comb, &beta, &b.comb, &alpha_q);
            let mut c = content(&new_vec);
            if let Some(lambda) = scale.as_deref_mut() {
                *lambda *= &beta;
                c = c.gcd(lambda);
            }
            if !c.is_zero() && !c.is_one() {
                let c = c.abs();
                for v in new_vec.values_mut() {
                    *v /= &c;
                }
                if let Some(lambda) = scale.as_deref_mut() {
                    *lambda /= &c;
                }
                let cq = Rational::from_integer(c);
                for v in new_comb.values_mut() {
                    *v /= &cq;
                }
            }
            *vec = new_vec;
            *comb = new_comb;
        }
    }

    /// Adds a column; returns its index. Dependent columns are recorded but
    /// do not enlarge the basis.
    pub fn push_column(&mut self, col: SparseColumn) -> usize {
        let idx = self.columns_seen;
        self.columns_seen += 1;
        let mut vec = col;
        vec.retain(|_, v| !v.is_zero());
        let mut comb = BTreeMap::new();
        comb.insert(idx, Rational::one());
        self.reduce(&mut vec, &mut comb, None);
        if let Some((&lead, _)) = vec.last_key_value() {
            self.by_lead.insert(lead, self.basis.len());
            self.basis.push(Reduced { vec, comb });
        }
        idx
    }

    /// Coefficients `c_j` (by column index) with `target = sum_j c_j column_j`,
    /// or `None` if the target is outside the span.
    pub fn express(&self, target: &SparseColumn) -> Option<BTreeMap<usize, Rational>> {
        let mut vec: SparseColumn = target.iter().filter(|(_, v)| !v.is_zero()).map(|(&i, v)| (i, v.clone())).collect();
        let mut comb = BTreeMap::new();
        let mut scale = BigInt::one();
        self.reduce(&mut vec, &mut comb, Some(&mut scale));
        if !vec.is_empty() {
            return None;
        }
        let inv = Rational::new(BigInt::one(), scale);
        Some(comb.into_iter().map(|(i, v)| (i, v * &inv)).filter(|(_, v)| !v.is_zero()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        let cols = rows[0].len();
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        Matrix::from_rows(cols, &rows).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        for r in a.rows() {
            assert!(dot(r, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[rat(3), rat(1)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(b.solve(&[rat(1), rat(3)]).unwrap(), None);
        assert!(b.solve(&[rat(1)]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[vec![rat(2), rat(1)], vec![rat(1), rat(3)]]), rat(5));
        assert_eq!(determinant(&[vec![rat(0), rat(1)], vec![rat(1), rat(0)]]), rat(-1));
        assert_eq!(determinant(&[vec![ratio(1, 2)]]), ratio(1, 2));
        assert_eq!(determinant(&[]), rat(1));
    }

    fn col(entries: &[(usize, i64)]) -> SparseColumn {
        entries.iter().map(|&(i, v)| (i, BigInt::from(v))).collect()
    }

    #[test]
    fn span_solver_expresses_targets() {
        let mut s = SpanSolver::new();
        let cols = [col(&[(0, 2), (1, 4)]), col(&[(1, 3), (2, 6)]), col(&[(0, 2), (1, 7), (2, 6)])];
        for c in &cols {
            s.push_column(c.clone());
        }
        assert_eq!(s.rank(), 2);
        let target = col(&[(0, 1), (1, 5), (2, 6)]);
        let coeffs = s.express(&target).unwrap();
        let mut recon: BTreeMap<usize, Rational> = BTreeMap::new();
        for (j, c) in &coeffs {
            for (i, v) in &cols[*j] {
                *recon.entry(*i).or_insert_with(Rational::zero) += c * Rational::from_integer(v.clone());
            }
        }
        recon.retain(|_, v| !v.is_zero());
        let want: BTreeMap<usize, Rational> = target.iter().map(|(&i, v)| (i, Rational::from_integer(v.clone()))).collect();
        assert_eq!(recon, want);
        assert!(s.express(&col(&[(0, 1)])).is_none());
        assert_eq!(s.express(&SparseColumn::new()), Some(BTreeMap::new()));
    }
}
