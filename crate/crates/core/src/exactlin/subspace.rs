use num_traits::{One, Zero};

use super::matrix::nullspace_from_rref;
use super::{QMatrix, Rational};

/// Incrementally maintained reduced row echelon basis.
///
/// Rows are kept fully reduced: each stored row has a leading 1 at its pivot and
/// zeros at every other stored pivot.
#[derive(Clone, Debug)]
pub struct RowReducer {
    dim: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(dim: usize) -> Self {
        RowReducer {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows in place.
    fn reduce(&self, v: &mut [Rational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
    }

    /// Residue of `v` after reduction; zero iff `v` lies in the span.
    pub fn residue(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.residue(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        true
    }

    /// Basis of `{x : r·x = 0 for every stored row r}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let m = if self.rows.is_empty() {
            QMatrix::zeros(0, self.dim)
        } else {
            QMatrix::from_rows(self.rows.clone()).expect("rows share a length")
        };
        nullspace_from_rref(&m, &self.pivots, self.dim)
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_subspace(self) -> Subspace {
        Subspace {
            dim: self.dim,
            basis: self.rows,
            pivots: self.pivots,
        }
    }
}

/// A subspace of `Q^n`, stored as its canonical reduced row echelon basis.
///
/// Two subspaces are equal exactly when their canonical bases coincide.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Self {
        RowReducer::new(dim).into_subspace()
    }

    pub fn full(dim: usize) -> Self {
        Self::span(dim, (0..dim).map(|i| super::unit_vec(dim, i)))
    }

    pub fn span<I, V>(dim: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: AsRef<[Rational]>,
    {
        let mut r = RowReducer::new(dim);
        for v in vectors {
            r.insert(v.as_ref());
        }
        r.into_subspace()
    }

    /// Span of the coordinate vectors with the given indices.
    pub fn coordinate(dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        Self::span(dim, indices.into_iter().map(|i| super::unit_vec(dim, i)))
    }

    /// The subspace `{x : Mx = 0}`.
    pub fn kernel_of(m: &QMatrix) -> Self {
        Self::span(m.cols(), m.nullspace())
    }

    /// Span of the columns of `m`.
    pub fn column_space(m: &QMatrix) -> Self {
        Self::span(m.rows(), (0..m.cols()).map(|j| m.column(j)))
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn reducer(&self) -> RowReducer {
        RowReducer {
            dim: self.dim,
            rows: self.basis.clone(),
            pivots: self.pivots.clone(),
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reducer().contains(v)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    /// First basis vector of `self` that is not in `other`.
    pub fn witness_outside(&self, other: &Subspace) -> Option<Vec<Rational>> {
        self.basis.iter().find(|v| !other.contains(v)).cloned()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut r = self.reducer();
        for v in &other.basis {
            r.insert(v);
        }
        r.into_subspace()
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // x = Σ a_i u_i = Σ b_j w_j; solve for (a, b) and map back.
        let k = self.dim();
        let m = other.dim();
        if k == 0 || m == 0 {
            return Subspace::zero(self.dim);
        }
        let mut sys = QMatrix::zeros(self.dim, k + m);
        for (c, u) in self.basis.iter().enumerate() {
            for (i, x) in u.iter().enumerate() {
                sys[(i, c)] = x.clone();
            }
        }
        for (c, w) in other.basis.iter().enumerate() {
            for (i, x) in w.iter().enumerate() {
                sys[(i, k + c)] = -x.clone();
            }
        }
        let vectors = sys.nullspace().into_iter().map(|sol| {
            let mut v = super::zero_vec(self.dim);
            for (a, u) in sol[..k].iter().zip(&self.basis) {
                if a.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(u) {
                    *x += a * y;
                }
            }
            v
        });
        Subspace::span(self.dim, vectors)
    }

    /// `{x : xᵗ B v = 0 for all v in self}`.
    pub fn orthogonal(&self, form: &QMatrix) -> Subspace {
        let rows: Vec<Vec<Rational>> = self.basis.iter().map(|v| form.mul_vec(v)).collect();
        let mut r = RowReducer::new(self.dim);
        for row in &rows {
            r.insert(row);
        }
        Subspace::span(self.dim, r.nullspace())
    }

    /// Image under the linear map whose matrix is `m` (acting on columns).
    pub fn image(&self, m: &QMatrix) -> Subspace {
        Subspace::span(m.rows(), self.basis.iter().map(|v| m.mul_vec(v)))
    }

    /// Indices `i` (ascending, earliest first) such that the coordinate vectors `e_i`
    /// complete `self` to the whole space.
    pub fn earliest_complement(&self) -> Vec<usize> {
        let mut r = self.reducer();
        let mut chosen = Vec::new();
        for i in 0..self.dim {
            if r.insert(&super::unit_vec(self.dim, i)) {
                chosen.push(i);
            }
        }
        chosen
    }

    /// Like [`Subspace::earliest_complement`] but preferring the latest indices.
    pub fn latest_complement(&self) -> Vec<usize> {
        let mut r = self.reducer();
        let mut chosen = Vec::new();
        for i in (0..self.dim).rev() {
            if r.insert(&super::unit_vec(self.dim, i)) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        chosen
    }

    /// Basis vectors as the columns of a matrix.
    pub fn to_matrix(&self) -> QMatrix {
        QMatrix::from_columns(self.dim, &self.basis)
    }

    /// Whether every basis vector has a leading one (always true; exposed for tests).
    pub fn is_canonical(&self) -> bool {
        self.basis
            .iter()
            .zip(&self.pivots)
            .all(|(v, &p)| v[p].is_one() && v[..p].iter().all(Zero::is_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn span_is_canonical() {
        let a = Subspace::span(3, [v(&[1, 1, 0]), v(&[0, 1, 1])]);
        let b = Subspace::span(3, [v(&[1, 2, 1]), v(&[1, 0, -1])]);
        assert_eq!(a, b);
        assert!(a.is_canonical());
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn intersection_and_sum() {
        let a = Subspace::coordinate(3, [0, 1]);
        let b = Subspace::coordinate(3, [1, 2]);
        assert_eq!(a.intersection(&b), Subspace::coordinate(3, [1]));
        assert_eq!(a.sum(&b), Subspace::full(3));
    }

    #[test]
    fn orthogonal_of_hyperbolic_line() {
        let h = QMatrix::from_ints(&[[0, 1], [1, 0]]);
        let l = Subspace::coordinate(2, [0]);
        assert_eq!(l.orthogonal(&h), l);
    }

    #[test]
    fn complements() {
        let k = Subspace::span(3, [v(&[1, 1, 0])]);
        assert_eq!(k.earliest_complement(), vec![0, 2]);
        assert_eq!(k.latest_complement(), vec![1, 2]);
    }

    #[test]
    fn reducer_detects_dependency() {
        let mut r = RowReducer::new(2);
        assert!(r.insert(&v(&[1, 2])));
        assert!(!r.insert(&v(&[2, 4])));
        assert_eq!(r.nullspace(), vec![v(&[-2, 1])]);
    }
}
