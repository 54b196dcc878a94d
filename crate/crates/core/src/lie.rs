//! Structure constants of a finite-dimensional Lie algebra over a fixed basis.

use num_traits::Zero;

use crate::exactlin::{is_zero_vec, unit_vec, zero_vec, QMatrix, Rational, RowReducer, Subspace};

/// Sparse linear combination of basis vectors, sorted by index, no zero coefficients.
pub type Sparse = Vec<(usize, Rational)>;

/// Antisymmetric bracket table `[e_i, e_j] = Σ c_k e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    dim: usize,
    table: Vec<Sparse>,
}

/// A triple of basis indices on which the Jacobi identity fails, with the nonzero sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiWitness {
    pub triple: (usize, usize, usize),
    pub value: Vec<Rational>,
}

impl StructureTable {
    pub fn abelian(dim: usize) -> Self {
        StructureTable {
            dim,
            table: vec![Vec::new(); dim * dim],
        }
    }

    /// Builds a table from `(i, j, k, c)` entries meaning `[e_i, e_j]` has `c` at `e_k`,
    /// 0-based with `i > j`. The `(j, i)` entries are filled by antisymmetry.
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, Rational)]) -> Self {
        let mut dense = vec![vec![Rational::zero(); dim]; dim * dim];
        for (i, j, k, c) in triples {
            dense[i * dim + j][*k] += c;
            dense[j * dim + i][*k] -= c;
        }
        StructureTable {
            dim,
            table: dense.iter().map(|v| to_sparse(v)).collect(),
        }
    }

    /// Raw constructor that does not enforce antisymmetry; used to build corrupted
    /// tables in tests and to load untrusted input before verification.
    pub fn from_dense_unchecked(dim: usize, brackets: Vec<Vec<Rational>>) -> Self {
        assert_eq!(brackets.len(), dim * dim);
        StructureTable {
            dim,
            table: brackets.iter().map(|v| to_sparse(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Sparse {
        &self.table[i * self.dim + j]
    }

    /// Overwrites one structure constant of `[e_i, e_j]` only (no antisymmetric partner).
    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, c: Rational) {
        let mut v = self.bracket_basis_dense(i, j);
        v[k] = c;
        self.table[i * self.dim + j] = to_sparse(&v);
    }

    pub fn bracket_basis_dense(&self, i: usize, j: usize) -> Vec<Rational> {
        to_dense(self.get(i, j), self.dim)
    }

    /// Nonzero entries `(i, j, k, c)` with `i > j`, in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..i {
                for (k, c) in self.get(i, j) {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in self.get(i, j) {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    /// Matrix of `ad(e_i)`: column `j` holds `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> QMatrix {
        let mut m = QMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for (k, c) in self.get(i, j) {
                m[(*k, j)] = c.clone();
            }
        }
        m
    }

    /// Matrix of `ad(x)` for an arbitrary vector.
    pub fn ad_vec(&self, x: &[Rational]) -> QMatrix {
        let cols: Vec<Vec<Rational>> = (0..self.dim)
            .map(|j| self.bracket(x, &unit_vec(self.dim, j)))
            .collect();
        QMatrix::from_columns(self.dim, &cols)
    }

    /// `[U, V]` for subspaces given by spanning vectors.
    pub fn bracket_spaces(&self, u: &Subspace, v: &Subspace) -> Subspace {
        let mut r = RowReducer::new(self.dim);
        for x in u.basis() {
            for y in v.basis() {
                r.insert(&self.bracket(x, y));
            }
        }
        r.into_subspace()
    }

    /// `g^1 = g, g^{k+1} = [g^k, g]`, listed until the first zero term (inclusive) or
    /// until the series stabilizes at a nonzero term.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.dim);
        let mut series = vec![full.clone()];
        loop {
            let last = series.last().expect("nonempty");
            if last.is_zero() {
                break;
            }
            let next = self.bracket_spaces(last, &full);
            if &next == last {
                break;
            }
            series.push(next);
        }
        series
    }

    /// `Z_1 = 0, Z_{i+1} = {x : [x, g] ⊆ Z_i}`, listed until it reaches the whole space
    /// (inclusive) or stabilizes.
    pub fn upper_central_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::zero(self.dim)];
        loop {
            let last = series.last().expect("nonempty");
            if last.dim() == self.dim {
                break;
            }
            let next = self.preimage_center(last);
            if &next == last {
                break;
            }
            series.push(next);
        }
        series
    }

    /// `{x : [x, e_j] ∈ z for every j}`.
    fn preimage_center(&self, z: &Subspace) -> Subspace {
        // Rows of `ann` are functionals vanishing on z.
        let zm = if z.is_zero() {
            QMatrix::zeros(0, self.dim)
        } else {
            QMatrix::from_rows(z.basis().to_vec()).expect("uniform rows")
        };
        let ann = zm.nullspace();
        let mut r = RowReducer::new(self.dim);
        for j in 0..self.dim {
            // [x, e_j] = -ad(e_j) x
            let adj = self.ad(j);
            for f in &ann {
                let mut row = zero_vec(self.dim);
                for (k, fk) in f.iter().enumerate() {
                    if fk.is_zero() {
                        continue;
                    }
                    for (c, x) in row.iter_mut().enumerate() {
                        let a = &adj[(k, c)];
                        if !a.is_zero() {
                            *x += fk * a;
                        }
                    }
                }
                r.insert(&row);
            }
        }
        Subspace::span(self.dim, r.nullspace())
    }

    pub fn center(&self) -> Subspace {
        self.preimage_center(&Subspace::zero(self.dim))
    }

    /// First pair `(i, j)` with `[e_i, e_j] ≠ -[e_j, e_i]`.
    pub fn antisymmetry_witness(&self) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in 0..=i {
                let a = self.bracket_basis_dense(i, j);
                let b = self.bracket_basis_dense(j, i);
                if a.iter().zip(&b).any(|(x, y)| !(x + y).is_zero()) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn jacobi_witness(&self) -> Option<JacobiWitness> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (unit_vec(n, i), unit_vec(n, j), unit_vec(n, k));
                    let mut s = self.bracket(&self.bracket(&a, &b), &c);
                    for (x, y) in s.iter_mut().zip(self.bracket(&self.bracket(&b, &c), &a)) {
                        *x += y;
                    }
                    for (x, y) in s.iter_mut().zip(self.bracket(&self.bracket(&c, &a), &b)) {
                        *x += y;
                    }
                    if !is_zero_vec(&s) {
                        return Some(JacobiWitness {
                            triple: (i, j, k),
                            value: s,
                        });
                    }
                }
            }
        }
        None
    }

    /// Structure constants in the basis given by the columns of `basis` (must be
    /// invertible): returns the table of `P⁻¹ [P e_i, P e_j]`.
    pub fn change_basis(&self, basis: &QMatrix) -> crate::Result<StructureTable> {
        let inv = basis.inverse()?;
        let cols: Vec<Vec<Rational>> = (0..self.dim).map(|j| basis.column(j)).collect();
        let mut dense = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                dense.push(inv.mul_vec(&self.bracket(&cols[i], &cols[j])));
            }
        }
        Ok(StructureTable::from_dense_unchecked(self.dim, dense))
    }
}

pub fn to_sparse(v: &[Rational]) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn to_dense(s: &Sparse, dim: usize) -> Vec<Rational> {
    let mut v = zero_vec(dim);
    for (i, c) in s {
        v[*i] = c.clone();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    fn heisenberg() -> StructureTable {
        // [e2, e1] = e3
        StructureTable::from_triples(3, &[(1, 0, 2, rat(1))])
    }

    #[test]
    fn heisenberg_series() {
        let h = heisenberg();
        let lower = h.lower_central_series();
        assert_eq!(lower.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![3, 1, 0]);
        let upper = h.upper_central_series();
        assert_eq!(upper.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(h.center(), Subspace::coordinate(3, [2]));
        assert!(h.jacobi_witness().is_none());
        assert!(h.antisymmetry_witness().is_none());
    }

    #[test]
    fn ad_columns_are_brackets() {
        let h = heisenberg();
        let ad = h.ad(1);
        assert_eq!(ad.column(0), vec![rat(0), rat(0), rat(1)]);
        assert_eq!(h.ad_vec(&unit_vec(3, 1)), ad);
    }

    #[test]
    fn corrupted_jacobi_detected() {
        // sl2-like relations with one constant flipped break Jacobi.
        let mut t = StructureTable::from_triples(
            3,
            &[(1, 0, 2, rat(1)), (2, 0, 0, rat(-2)), (2, 1, 1, rat(2))],
        );
        assert!(t.jacobi_witness().is_none());
        t.set_constant(2, 1, 1, rat(3));
        t.set_constant(1, 2, 1, rat(-3));
        assert!(t.jacobi_witness().is_some());
    }
}
