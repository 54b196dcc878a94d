use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{FieldMode, QMatrix};

use super::families::c_matrix;

/// `Adj(P) = det(P)·(P⁻¹)ᵗ`, the cofactor matrix (transpose of the classical adjugate).
pub fn cofactor(p: &QMatrix) -> Result<QMatrix> {
    Ok(p.adjugate()?.transpose())
}

fn check_inputs(a: &QMatrix, b: &QMatrix, p: &QMatrix, n: usize) -> Result<()> {
    for m in [a, b, p] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!("expected {n}x{n} matrices")));
        }
    }
    if !a.is_symmetric() || !b.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if p.determinant()?.is_zero() {
        return Err(Error::Singular);
    }
    Ok(())
}

/// `C·B·C = Adj(P)ᵗ·C·A·C·Adj(P)` for `3×3` symmetric `A`, `B`.
pub fn adjugate_congruence_check(a: &QMatrix, b: &QMatrix, p: &QMatrix) -> Result<bool> {
    check_inputs(a, b, p, 3)?;
    let c = c_matrix();
    let adj = cofactor(p)?;
    let lhs = &(&c * b) * &c;
    let rhs = (&(&c * a) * &c).congruent(&adj);
    Ok(lhs == rhs)
}

/// `B = (det P)²·Pᵗ·A·P` for `2×2` symmetric `A`, `B`.
pub fn det_twisted_congruence_check(a: &QMatrix, b: &QMatrix, p: &QMatrix) -> Result<bool> {
    check_inputs(a, b, p, 2)?;
    let det = p.determinant()?;
    Ok(*b == a.congruent(p).scale(&(&det * &det)))
}

/// Number of isomorphism classes of quotient algebras parameterized by `n×n` symmetric
/// matrices of rank at least `min_rank`, where classes are congruence classes. `None`
/// over the rationals, where no complete count is claimed.
pub fn congruence_class_count(n: usize, min_rank: usize, field: FieldMode) -> Option<usize> {
    match field {
        FieldMode::AlgClosedRank => Some((min_rank..=n).count()),
        FieldMode::RealSignature => Some((min_rank..=n).map(|r| r + 1).sum()),
        FieldMode::Rationals => None,
    }
}
