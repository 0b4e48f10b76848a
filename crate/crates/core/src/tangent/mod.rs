//! Exact checks of the tangent-space conditions on orbits of zero-cycles.
//!
//! Condition (*) is about a subspace `V` of `W^k` (`W = Q^n`, laid out as
//! `k` consecutive blocks of length `n`): every form
//! `sum_j pr_j^* alpha`, `alpha` in `Λ^i W^*`, vanishes on `V`.
//! Condition (**) is its form at torus-fixed points, a statement about
//! subspaces `A_1..A_n` of `Q^k`: for every nonempty set of components and
//! every choice of one vector from each, the coordinatewise product sums to
//! zero. Both are multilinear, so checking basis vectors suffices.

mod io;
mod search;
mod subspace;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{determinant, rank_of};
use crate::rational::Rational;

pub use io::{format_subspace_file, parse_subspace_file, Layout, SubspaceFile};
pub use search::{allowed_space, search_max_total_dimension, search_with_workers, verified_total, SearchOutcome};
pub use subspace::Subspace;

/// A nonzero value of `sum_j pr_j^* e_J^*` on basis vectors of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarViolation {
    pub degree: usize,
    /// Indices into the basis of `V`.
    pub basis_indices: Vec<usize>,
    /// The multi-index `J` (0-based coordinates of `W`).
    pub form_indices: Vec<usize>,
    pub value: Rational,
}

/// A nonzero coordinatewise-product sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleStarViolation {
    /// The set `I` of components (0-based).
    pub components: Vec<usize>,
    /// For each component in `I`, the index of the chosen basis vector.
    pub basis_indices: Vec<usize>,
    pub value: Rational,
}

pub(crate) fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == size {
            out.push(prefix.clone());
            return;
        }
        for i in start..n {
            prefix.push(i);
            rec(n, size, i + 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, size, 0, &mut Vec::new(), &mut out);
    out
}

/// All index tuples `(c_1..c_m)` with `c_i < sizes[i]`.
pub(crate) fn choices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for prefix in &out {
            for c in 0..s {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn check_star_shape(v: &Subspace, n: usize, k: usize) -> Result<()> {
    if v.ambient_dim() != n * k {
        return Err(Error::DimensionMismatch { expected: n * k, found: v.ambient_dim() });
    }
    Ok(())
}

/// `sum_{j=1}^k det[(pr_j v^a)_J]` for the chosen basis vectors `v^a` of `V`.
pub fn star_form_value(v: &Subspace, n: usize, k: usize, basis_indices: &[usize], form_indices: &[usize]) -> Result<Rational> {
    check_star_shape(v, n, k)?;
    if basis_indices.len() != form_indices.len() {
        return Err(Error::DimensionMismatch { expected: form_indices.len(), found: basis_indices.len() });
    }
    let mut total = Rational::zero();
    for j in 0..k {
        let rows: Vec<Vec<Rational>> = basis_indices
            .iter()
            .map(|&a| form_indices.iter().map(|&c| v.basis()[a][j * n + c].clone()).collect())
            .collect();
        total += determinant(&rows);
    }
    Ok(total)
}

/// Condition (*) for `V` in `(Q^n)^k`; `None` when it holds.
pub fn check_condition_star(v: &Subspace, n: usize, k: usize) -> Result<Option<StarViolation>> {
    check_star_shape(v, n, k)?;
    for degree in 1..=n.min(v.dim()) {
        for form_indices in combinations(n, degree) {
            for basis_indices in combinations(v.dim(), degree) {
                let value = star_form_value(v, n, k, &basis_indices, &form_indices)?;
                if !value.is_zero() {
                    return Ok(Some(StarViolation { degree, basis_indices, form_indices, value }));
                }
            }
        }
    }
    Ok(None)
}

fn common_ambient(spaces: &[Subspace]) -> Result<usize> {
    let Some(first) = spaces.first() else {
        return Ok(0);
    };
    let k = first.ambient_dim();
    for s in spaces {
        if s.ambient_dim() != k {
            return Err(Error::DimensionMismatch { expected: k, found: s.ambient_dim() });
        }
    }
    Ok(k)
}

/// `sum_j prod_l lambda_l(f_j)` for one basis vector from each listed component.
pub fn doublestar_value(spaces: &[Subspace], components: &[usize], basis_indices: &[usize]) -> Result<Rational> {
    let k = common_ambient(spaces)?;
    let mut total = Rational::zero();
    for j in 0..k {
        let mut prod = Rational::one();
        for (&c, &b) in components.iter().zip(basis_indices) {
            prod *= &spaces[c].basis()[b][j];
        }
        total += prod;
    }
    Ok(total)
}

/// Condition (**) for `A_1..A_n` in `Q^k`; `None` when it holds.
pub fn check_condition_doublestar(spaces: &[Subspace]) -> Result<Option<DoubleStarViolation>> {
    common_ambient(spaces)?;
    let n = spaces.len();
    for size in 1..=n {
        for components in combinations(n, size) {
            let sizes: Vec<usize> = components.iter().map(|&c| spaces[c].dim()).collect();
            if sizes.contains(&0) {
                continue;
            }
            for basis_indices in choices(&sizes) {
                let value = doublestar_value(spaces, &components, &basis_indices)?;
                if !value.is_zero() {
                    return Ok(Some(DoubleStarViolation { components, basis_indices, value }));
                }
            }
        }
    }
    Ok(None)
}

/// `V = <A_1 e_1, ..., A_n e_n>` in `(Q^n)^k`: `lambda` in `A_i` becomes the
/// vector whose `j`-th block is `lambda(f_j) e_i`.
pub fn split_subspace(spaces: &[Subspace]) -> Result<Subspace> {
    let k = common_ambient(spaces)?;
    let n = spaces.len();
    let mut rows = Vec::new();
    for (i, a) in spaces.iter().enumerate() {
        for lambda in a.basis() {
            let mut v = vec![Rational::zero(); n * k];
            for j in 0..k {
                v[j * n + i] = lambda[j].clone();
            }
            rows.push(v);
        }
    }
    Subspace::new(n * k, rows)
}

fn hadamard(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `A . B`, spanned by coordinatewise products of basis vectors.
pub fn product_span(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
    }
    let rows: Vec<Vec<Rational>> = a
        .basis()
        .iter()
        .flat_map(|x| b.basis().iter().map(move |y| hadamard(x, y)))
        .collect();
    Subspace::span(a.ambient_dim(), &rows)
}

/// Conditions (i) `sum a_i b_i = 0` and (ii) `sum a_i = sum b_i = 0`.
pub fn check_pair_preconditions(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
    }
    let e = Subspace::span(a.ambient_dim(), &[vec![Rational::one(); a.ambient_dim()]])?;
    if !a.is_orthogonal_to(b)? {
        return Err(Error::PreconditionViolated("A and B are not orthogonal".into()));
    }
    if !a.is_orthogonal_to(&e)? || !b.is_orthogonal_to(&e)? {
        return Err(Error::PreconditionViolated("A or B is not contained in e^perp".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairLemmaResult {
    pub lhs: usize,
    pub rhs: usize,
    pub ok: bool,
}

/// `dim(A.B + A + B)` against `dim A + dim B`.
pub fn pair_lemma_check(a: &Subspace, b: &Subspace) -> Result<PairLemmaResult> {
    check_pair_preconditions(a, b)?;
    let lhs = product_span(a, b)?.sum(a)?.sum(b)?.dim();
    let rhs = a.dim() + b.dim();
    Ok(PairLemmaResult { lhs, rhs, ok: lhs >= rhs })
}

/// Rank of `(alpha, beta) -> alpha . b + a . beta` on `A x B` at the point `(a, b)`.
pub fn mu_rank_at(a_space: &Subspace, b_space: &Subspace, a: &[Rational], b: &[Rational]) -> Result<usize> {
    let k = a_space.ambient_dim();
    let rows: Vec<Vec<Rational>> = a_space
        .basis()
        .iter()
        .map(|alpha| hadamard(alpha, b))
        .chain(b_space.basis().iter().map(|beta| hadamard(a, beta)))
        .collect();
    if rows.is_empty() {
        return Ok(0);
    }
    rank_of(&rows, k)
}

fn random_affine_point(space: &Subspace, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut p = vec![Rational::one(); space.ambient_dim()];
    for v in space.basis() {
        let r = Rational::from_integer(rng.gen_range(-5i64..=5).into());
        for (x, y) in p.iter_mut().zip(v) {
            *x += &r * y;
        }
    }
    p
}

/// Maximum rank of the differential of `mu` over random rational points
/// of `(e + A) x (e + B)`.
pub fn mu_generic_rank(a: &Subspace, b: &Subspace, seed: u64, samples: usize) -> Result<usize> {
    check_pair_preconditions(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..samples.max(1) {
        let pa = random_affine_point(a, &mut rng);
        let pb = random_affine_point(b, &mut rng);
        best = best.max(mu_rank_at(a, b, &pa, &pb)?);
    }
    Ok(best)
}

pub(crate) fn random_vector_in(space: &Subspace, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); space.ambient_dim()];
    for row in space.basis() {
        let r = Rational::from_integer(rng.gen_range(-3i64..=3).into());
        for (x, y) in v.iter_mut().zip(row) {
            *x += &r * y;
        }
    }
    v
}

/// A random subspace of `space` of dimension `dim`.
pub(crate) fn random_subspace_of(space: &Subspace, dim: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let dim = dim.min(space.dim());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut current = Subspace::zero(space.ambient_dim());
    while current.dim() < dim {
        let v = random_vector_in(space, rng);
        rows.push(v);
        current = Subspace::span(space.ambient_dim(), &rows).expect("same ambient");
        if current.dim() < rows.len() {
            rows.pop();
        }
    }
    current
}

/// A random pair satisfying (i) and (ii): `A` inside `e^perp` from small
/// integer vectors, then `B` inside `e^perp ∩ A^perp`.
pub fn random_admissible_pair(k: usize, rng: &mut ChaCha8Rng) -> (Subspace, Subspace) {
    let kernel = Subspace::sum_kernel(k);
    let dim_a = rng.gen_range(0..=kernel.dim());
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut a = Subspace::zero(k);
    while a.dim() < dim_a {
        let mut v: Vec<i64> = (0..k).map(|_| rng.gen_range(-3i64..=3)).collect();
        let s: i64 = v[..k - 1].iter().sum();
        v[k - 1] = -s;
        rows.push(v.iter().map(|&x| Rational::from_integer(x.into())).collect());
        a = Subspace::span(k, &rows).expect("same ambient");
        if a.dim() < rows.len() {
            rows.pop();
        }
    }
    let room = kernel.intersection(&a.orthogonal_complement()).expect("same ambient");
    let dim_b = rng.gen_range(0..=room.dim());
    let b = random_subspace_of(&room, dim_b, rng);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sp(k: usize, rows: &[&[i64]]) -> Subspace {
        Subspace::from_integer_rows(k, rows).unwrap()
    }

    #[test]
    fn star_on_sum_kernel_and_zero() {
        for k in 2..6 {
            assert_eq!(check_condition_star(&Subspace::sum_kernel(k), 1, k).unwrap(), None);
        }
        assert_eq!(check_condition_star(&Subspace::zero(6), 2, 3).unwrap(), None);
    }

    #[test]
    fn star_violation_at_degree_one() {
        // n = 2, k = 2: v = ((1,0),(0,0))
        let v = sp(4, &[&[1, 0, 0, 0]]);
        let viol = check_condition_star(&v, 2, 2).unwrap().unwrap();
        assert_eq!(viol.degree, 1);
        assert_eq!(viol.form_indices, vec![0]);
        assert_eq!(viol.value, rat(1));
        let again = star_form_value(&v, 2, 2, &viol.basis_indices, &viol.form_indices).unwrap();
        assert_eq!(again, viol.value);
    }

    #[test]
    fn star_dimension_mismatch() {
        assert!(matches!(
            check_condition_star(&Subspace::zero(5), 2, 3),
            Err(Error::DimensionMismatch { expected: 6, found: 5 })
        ));
    }

    #[test]
    fn doublestar_examples() {
        assert_eq!(check_condition_doublestar(&[sp(3, &[&[1, -1, 0]])]).unwrap(), None);
        let pair = [sp(3, &[&[1, -1, 0]]), sp(3, &[&[1, 1, -2]])];
        assert_eq!(check_condition_doublestar(&pair).unwrap(), None);
        let bad = check_condition_doublestar(&[sp(3, &[&[1, 0, 0]])]).unwrap().unwrap();
        assert_eq!(bad.components, vec![0]);
        assert_eq!(bad.value, rat(1));
        assert!(check_condition_doublestar(&[Subspace::zero(3), Subspace::zero(4)]).is_err());
    }

    #[test]
    fn split_examples() {
        let v = split_subspace(&[Subspace::sum_kernel(4)]).unwrap();
        assert_eq!(v, Subspace::sum_kernel(4));
        let a = sp(3, &[&[1, -1, 0], &[0, 1, -1]]);
        let b = sp(3, &[&[1, 1, 1]]);
        assert_eq!(split_subspace(&[a, b]).unwrap().dim(), 3);
    }

    #[test]
    fn product_span_examples() {
        let e = sp(3, &[&[1, 1, 1]]);
        assert_eq!(product_span(&e, &e).unwrap(), e);
        let a = sp(3, &[&[1, -1, 0]]);
        let b = sp(3, &[&[1, 1, -2]]);
        assert_eq!(product_span(&a, &b).unwrap(), Subspace::span(3, a.basis()).unwrap());
        assert!(product_span(&a, &Subspace::zero(3)).unwrap().is_zero());
    }

    #[test]
    fn pair_lemma_examples() {
        let z = Subspace::zero(3);
        assert_eq!(pair_lemma_check(&z, &z).unwrap(), PairLemmaResult { lhs: 0, rhs: 0, ok: true });
        let a = sp(3, &[&[1, -1, 0]]);
        let b = sp(3, &[&[1, 1, -2]]);
        // A.B = A, so A.B + A + B = A + B has dimension 2
        assert_eq!(pair_lemma_check(&a, &b).unwrap(), PairLemmaResult { lhs: 2, rhs: 2, ok: true });
        let not_perp = sp(3, &[&[1, 0, -1]]);
        assert!(matches!(pair_lemma_check(&a, &not_perp), Err(Error::PreconditionViolated(_))));
        let not_in_kernel = sp(3, &[&[1, 1, 0]]);
        assert!(matches!(pair_lemma_check(&z, &not_in_kernel), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn mu_rank_examples() {
        let a = sp(3, &[&[1, -1, 0]]);
        let b = sp(3, &[&[1, 1, -2]]);
        let e = vec![rat(1); 3];
        assert_eq!(mu_rank_at(&a, &b, &e, &e).unwrap(), a.sum(&b).unwrap().dim());
        assert_eq!(mu_generic_rank(&a, &b, 7, 4).unwrap(), 2);
        let z = Subspace::zero(3);
        assert_eq!(mu_generic_rank(&z, &z, 0, 1).unwrap(), 0);
    }

    #[test]
    fn random_pairs_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 2..7 {
            for _ in 0..20 {
                let (a, b) = random_admissible_pair(k, &mut rng);
                check_pair_preconditions(&a, &b).unwrap();
                assert!(a.dim() + b.dim() < k);
            }
        }
    }
}
