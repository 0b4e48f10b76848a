use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::rational::{fmt_rational, Rational};

/// A linear subspace of `Q^d` given by a basis (rows are independent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    /// Takes the rows as a basis; fails if they are dependent.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<Rational>>) -> Result<Self> {
        let rank = Matrix::from_rows(ambient_dim, &basis)?.rank();
        if rank != basis.len() {
            return Err(Error::PreconditionViolated(format!(
                "basis rows are dependent: rank {rank} < {} rows",
                basis.len()
            )));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    /// Span of arbitrary rows; the basis is the reduced echelon form.
    pub fn span(ambient_dim: usize, rows: &[Vec<Rational>]) -> Result<Self> {
        let basis = Matrix::from_rows(ambient_dim, rows)?.row_space_basis();
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn from_integer_rows(ambient_dim: usize, rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        Self::new(ambient_dim, rows)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| (0..ambient_dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Subspace { ambient_dim, basis }
    }

    /// `e^perp = {v : sum_j v_j = 0}`, the kernel of the sum map.
    pub fn sum_kernel(ambient_dim: usize) -> Self {
        Subspace::span(ambient_dim, &[vec![Rational::one(); ambient_dim]])
            .expect("dimensions agree")
            .orthogonal_complement()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: other.ambient_dim });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: v.len() });
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Ok(Matrix::from_rows(self.ambient_dim, &rows)?.rank() == self.dim())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        let rows: Vec<Vec<Rational>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.ambient_dim, &rows)
    }

    /// Complement for the standard pairing `<a, b> = sum_j a_j b_j`.
    pub fn orthogonal_complement(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(self.ambient_dim);
        }
        let m = Matrix::from_rows(self.ambient_dim, &self.basis).expect("basis rows have ambient length");
        Subspace::span(self.ambient_dim, &m.nullspace()).expect("nullspace vectors have ambient length")
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        Ok(self.orthogonal_complement().sum(&other.orthogonal_complement())?.orthogonal_complement())
    }

    /// Whether `<a, b> = 0` for all `a` here and `b` in `other`.
    pub fn is_orthogonal_to(&self, other: &Subspace) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.basis.iter().all(|a| other.basis.iter().all(|b| dot(a, b).is_zero())))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.dim())?;
        for row in &self.basis {
            let cells: Vec<String> = row.iter().map(fmt_rational).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}
