use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{parse_rational, rat, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer literals. Panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == ncols), "ragged rows");
        Self::from_fn(nrows, ncols, |i, j| rat(rows[i].as_ref()[j]))
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Evaluates the bilinear form `xᵗ M y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let my = self.mul_vec(y);
        dot(x, &my)
    }

    /// Congruence transform `Pᵗ self P`.
    pub fn congruent(&self, p: &QMatrix) -> QMatrix {
        &(&p.transpose() * self) * p
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QMatrix {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, src: &QMatrix) {
        for i in 0..src.rows {
            for j in 0..src.cols {
                self[(r0 + i, c0 + j)] = src[(i, j)].clone();
            }
        }
    }

    /// Reduced row echelon form together with its pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..a.cols {
            if prow == a.rows {
                break;
            }
            let Some(found) = (prow..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(found, prow);
            let inv = a[(prow, col)].recip();
            for j in col..a.cols {
                let v = &a[(prow, j)] * &inv;
                a[(prow, j)] = v;
            }
            for r in 0..a.rows {
                if r == prow || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in col..a.cols {
                    if a[(prow, j)].is_zero() {
                        continue;
                    }
                    let v = &a[(r, j)] - &factor * &a[(prow, j)];
                    a[(r, j)] = v;
                }
            }
            pivots.push(col);
            prow += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        nullspace_from_rref(&r, &pivots, self.cols)
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let mut a = self.clone();
        let n = a.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = &a[(r, col)] / &pivot;
                for j in col..n {
                    let v = &a[(r, j)] - &factor * &a[(col, j)];
                    a[(r, j)] = v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &QMatrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(r.block(0, n, n, 2 * n))
    }

    /// Classical adjugate, `adj(A)·A = det(A)·I`.
    pub fn adjugate(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("adjugate of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(QMatrix::identity(1));
        }
        let mut adj = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i).determinant()?;
                adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        Ok(adj)
    }

    /// The submatrix obtained by deleting row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> QMatrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != c).collect();
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        if json.entries.len() != json.rows || json.entries.iter().any(|r| r.len() != json.cols) {
            return Err(Error::Malformed(format!(
                "matrix entries do not match declared shape {}x{}",
                json.rows, json.cols
            )));
        }
        let rows = json
            .entries
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if json.rows == 0 {
            return Ok(QMatrix::zeros(0, json.cols));
        }
        Self::from_rows(rows)
    }
}

pub(crate) fn nullspace_from_rref(r: &QMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            v
        })
        .collect()
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;

    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;

    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;

    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join(" "))?;
        }
        Ok(())
    }
}

/// Wire format: `{"rows": n, "cols": m, "entries": [["p/q", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyMatrix {
    Full(MatrixJson),
    Rows(Vec<Vec<Entry>>),
}

/// Accepts Matrix JSON or a bare array of rows whose entries are integers or rational
/// strings.
impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match AnyMatrix::deserialize(d)? {
            AnyMatrix::Full(json) => QMatrix::from_json(&json),
            AnyMatrix::Rows(rows) => rows
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|e| match e {
                            Entry::Int(n) => Ok(rat(n)),
                            Entry::Text(s) => parse_rational(&s),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
                .and_then(QMatrix::from_rows),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Serializes a matrix as a bare array of rows of rational strings.
pub fn serialize_rows<S: serde::Serializer>(m: &QMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_json().entries.serialize(s)
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;

    #[test]
    fn identity_has_trivial_nullspace() {
        assert!(QMatrix::identity(2).nullspace().is_empty());
    }

    #[test]
    fn zero_matrix_nullspace_is_standard_basis() {
        let ns = QMatrix::zeros(3, 3).nullspace();
        assert_eq!(ns.len(), 3);
        for (i, v) in ns.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { rat(1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn rank_one_nullspace() {
        // Hand reduction: [[1,1],[2,2]] -> [[1,1],[0,0]], x1 = -x2.
        let m = QMatrix::from_ints(&[[1, 1], [2, 2]]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![rat(-1), rat(1)]]);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = QMatrix::from_ints(&[[2, 1], [7, 4]]);
        assert_eq!(m.determinant().unwrap(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(2));
        let sing = QMatrix::from_ints(&[[1, 2], [2, 4]]);
        assert!(matches!(sing.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn adjugate_identity() {
        let m = QMatrix::from_ints(&[[1, 2, 0], [3, -1, 4], [0, 5, 2]]);
        let adj = m.adjugate().unwrap();
        let det = m.determinant().unwrap();
        assert_eq!(&adj * &m, QMatrix::identity(3).scale(&det));
    }

    #[test]
    fn json_round_trip_uses_lowest_terms() {
        let m = QMatrix::from_rows(vec![vec![ratio(2, 4), rat(-3)], vec![rat(0), ratio(5, -10)]]).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"{"rows":2,"cols":2,"entries":[["1/2","-3"],["0","-1/2"]]}"#);
        let back: QMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_shape_mismatch_rejected() {
        let bad = r#"{"rows":2,"cols":2,"entries":[["1","0"]]}"#;
        assert!(serde_json::from_str::<QMatrix>(bad).is_err());
    }
}
