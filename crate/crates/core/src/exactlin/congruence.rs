use num_traits::{Signed, Zero};
use serde::Serialize;

use super::QMatrix;
use crate::error::{Error, Result};

/// Inertia counts of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

/// Returns `(P, D)` with `Pᵗ A P = D` diagonal and `P` invertible.
pub fn congruence_diagonalize(a: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = a.rows();
    let mut d = a.clone();
    let mut p = QMatrix::identity(n);
    for k in 0..n {
        if d[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !d[(j, j)].is_zero()) {
                d.swap_rows(k, j);
                d.swap_cols(k, j);
                p.swap_cols(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !d[(k, j)].is_zero()) {
                // Hyperbolic pair: replacing e_k by e_k + e_j gives diagonal 2·d_kj.
                add_col_and_row(&mut d, k, j);
                for i in 0..n {
                    let v = &p[(i, k)] + &p[(i, j)];
                    p[(i, k)] = v;
                }
            } else {
                continue;
            }
        }
        let pivot = d[(k, k)].clone();
        for j in k + 1..n {
            if d[(k, j)].is_zero() {
                continue;
            }
            let f = &d[(k, j)] / &pivot;
            // Column/row j -= f · column/row k.
            for i in 0..n {
                let v = &d[(i, j)] - &f * &d[(i, k)];
                d[(i, j)] = v;
            }
            for i in 0..n {
                let v = &d[(j, i)] - &f * &d[(k, i)];
                d[(j, i)] = v;
            }
            for i in 0..n {
                let v = &p[(i, j)] - &f * &p[(i, k)];
                p[(i, j)] = v;
            }
        }
    }
    debug_assert_eq!(a.congruent(&p), d);
    Ok((p, d))
}

fn add_col_and_row(d: &mut QMatrix, k: usize, j: usize) {
    let n = d.rows();
    for i in 0..n {
        let v = &d[(i, k)] + &d[(i, j)];
        d[(i, k)] = v;
    }
    for i in 0..n {
        let v = &d[(k, i)] + &d[(j, i)];
        d[(k, i)] = v;
    }
}

pub fn signature(a: &QMatrix) -> Result<Signature> {
    let (_, d) = congruence_diagonalize(a)?;
    let mut s = Signature {
        plus: 0,
        minus: 0,
        zero: 0,
    };
    for i in 0..d.rows() {
        let x = &d[(i, i)];
        if x.is_zero() {
            s.zero += 1;
        } else if x.is_positive() {
            s.plus += 1;
        } else {
            s.minus += 1;
        }
    }
    Ok(s)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    #[test]
    fn diagonal_input_untouched() {
        let a = QMatrix::from_ints(&[[1, 0], [0, 2]]);
        let (p, d) = congruence_diagonalize(&a).unwrap();
        assert_eq!(p, QMatrix::identity(2));
        assert_eq!(d, a);
    }

    #[test]
    fn hyperbolic_plane() {
        let a = QMatrix::from_ints(&[[0, 1], [1, 0]]);
        let (p, d) = congruence_diagonalize(&a).unwrap();
        assert_eq!(a.congruent(&p), d);
        assert!(p.determinant().unwrap() != rat(0));
        let s = signature(&a).unwrap();
        assert_eq!((s.plus, s.minus, s.zero), (1, 1, 0));
    }

    #[test]
    fn zero_and_diag_signatures() {
        let z = QMatrix::zeros(3, 3);
        let (p, d) = congruence_diagonalize(&z).unwrap();
        assert_eq!(p, QMatrix::identity(3));
        assert!(d.is_zero());
        assert_eq!(signature(&z).unwrap().zero, 3);
        let s = signature(&QMatrix::from_ints(&[[1, 0, 0], [0, 1, 0], [0, 0, -1]])).unwrap();
        assert_eq!((s.plus, s.minus, s.zero), (2, 1, 0));
    }

    #[test]
    fn rejects_non_symmetric() {
        let a = QMatrix::from_ints(&[[0, 1], [0, 0]]);
        assert!(matches!(congruence_diagonalize(&a), Err(Error::NotSymmetric)));
    }
}
