//! Invariant symmetric bilinear forms on free nilpotent Lie algebras.

use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{QMatrix, Rational, RowReducer, Subspace};
use crate::freenilp::FreeNilpotent;

/// A symmetric bilinear form on `n_{d,t}`, given by its Gram matrix in the Hall basis.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    alg: Arc<FreeNilpotent>,
    matrix: QMatrix,
}

impl PartialEq for BilinearForm {
    fn eq(&self, other: &Self) -> bool {
        *self.alg == *other.alg && self.matrix == other.matrix
    }
}

impl BilinearForm {
    pub fn new(alg: Arc<FreeNilpotent>, matrix: QMatrix) -> Result<Self> {
        let n = alg.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "form is {}x{} but n_{{{},{}}} has dimension {n}",
                matrix.rows(),
                matrix.cols(),
                alg.d(),
                alg.t()
            )));
        }
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(BilinearForm { alg, matrix })
    }

    pub fn algebra(&self) -> &Arc<FreeNilpotent> {
        &self.alg
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.matrix.bilinear(x, y)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            algebra: AlgebraRef {
                d: self.alg.d(),
                t: self.alg.t(),
            },
            matrix: self.matrix.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraRef {
    pub d: usize,
    pub t: usize,
}

/// Wire format: `{"algebra": {"d": .., "t": ..}, "matrix": <matrix>}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub algebra: AlgebraRef,
    #[serde(serialize_with = "crate::exactlin::serialize_rows")]
    pub matrix: QMatrix,
}

impl FormJson {
    pub fn load(&self) -> Result<BilinearForm> {
        let alg = Arc::new(FreeNilpotent::new(self.algebra.d, self.algebra.t)?);
        BilinearForm::new(alg, self.matrix.clone())
    }
}

/// A basis triple where `B([e_i,e_j],e_k) ≠ B(e_i,[e_j,e_k])`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceWitness {
    pub triple: (usize, usize, usize),
    pub lhs: String,
    pub rhs: String,
}

/// First basis triple violating invariance for an arbitrary structure table and form.
pub fn invariance_witness(table: &crate::lie::StructureTable, m: &QMatrix) -> Option<InvarianceWitness> {
    let n = table.dim();
    let zero = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = table
                    .get(i, j)
                    .iter()
                    .fold(zero.clone(), |acc, (p, c)| acc + c * &m[(*p, k)]);
                let rhs = table
                    .get(j, k)
                    .iter()
                    .fold(zero.clone(), |acc, (p, c)| acc + c * &m[(i, *p)]);
                if lhs != rhs {
                    return Some(InvarianceWitness {
                        triple: (i, j, k),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
        }
    }
    None
}

pub fn is_invariant(b: &BilinearForm) -> bool {
    invariance_witness(b.alg.table(), &b.matrix).is_none()
}

fn require_invariant(b: &BilinearForm) -> Result<()> {
    match invariance_witness(b.alg.table(), &b.matrix) {
        None => Ok(()),
        Some(w) => Err(Error::NotInvariant(format!(
            "B([h{},h{}],h{}) = {} but B(h{},[h{},h{}]) = {}",
            w.triple.0 + 1,
            w.triple.1 + 1,
            w.triple.2 + 1,
            w.lhs,
            w.triple.0 + 1,
            w.triple.1 + 1,
            w.triple.2 + 1,
            w.rhs
        ))),
    }
}

/// Index of the unknown `B(p,q)`, `p ≤ q`, among the `n(n+1)/2` symmetric coordinates.
pub fn sym_index(n: usize, p: usize, q: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    p * n - p * (p + 1) / 2 + q
}

/// Upper-triangular coordinates of a symmetric matrix, row-major.
pub fn sym_coords(m: &QMatrix) -> Vec<Rational> {
    let n = m.rows();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for p in 0..n {
        for q in p..n {
            v.push(m[(p, q)].clone());
        }
    }
    v
}

pub fn from_sym_coords(n: usize, v: &[Rational]) -> QMatrix {
    QMatrix::from_fn(n, n, |p, q| v[sym_index(n, p, q)].clone())
}

/// The linear constraints on symmetric coordinates imposed by invariance.
fn invariance_system(alg: &FreeNilpotent) -> RowReducer {
    let n = alg.dim();
    let table = alg.table();
    let mut r = RowReducer::new(n * (n + 1) / 2);
    let mut row = vec![Rational::zero(); n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let left = table.get(i, j);
                let right = table.get(j, k);
                if left.is_empty() && right.is_empty() {
                    continue;
                }
                for x in row.iter_mut() {
                    x.set_zero();
                }
                for (m, c) in left {
                    row[sym_index(n, *m, k)] += c;
                }
                for (m, c) in right {
                    row[sym_index(n, i, *m)] -= c;
                }
                if row.iter().any(|x| !x.is_zero()) {
                    r.insert(&row);
                }
            }
        }
    }
    r
}

/// `S²₀(d,t)` as a subspace of the symmetric coordinate space.
pub fn invariant_form_subspace(alg: &FreeNilpotent) -> Subspace {
    let sys = invariance_system(alg);
    Subspace::span(sys.ambient_dim(), sys.nullspace())
}

/// Rank of the invariance constraint system.
pub fn invariance_rank(alg: &FreeNilpotent) -> usize {
    invariance_system(alg).rank()
}

/// Basis of `S²₀(d,t)`, canonicalized to reduced row echelon form in symmetric coordinates.
pub fn invariant_form_space(alg: &Arc<FreeNilpotent>) -> Vec<BilinearForm> {
    let n = alg.dim();
    invariant_form_subspace(alg)
        .basis()
        .iter()
        .map(|v| BilinearForm {
            alg: alg.clone(),
            matrix: from_sym_coords(n, v),
        })
        .collect()
}

/// The part of `m` pairing grade `i` with grade `j` (the form `B(e_i ·, e_j ·)`), as a
/// full-size matrix.
pub fn grade_pair(alg: &FreeNilpotent, m: &QMatrix, i: usize, j: usize) -> QMatrix {
    let ri = alg.grade_range(i);
    let rj = alg.grade_range(j);
    let mut out = QMatrix::zeros(m.rows(), m.cols());
    for p in ri {
        for q in rj.clone() {
            out[(p, q)] = m[(p, q)].clone();
        }
    }
    out
}

/// The block of `m` with rows in grade `i` and columns in grade `j`.
pub fn grade_block(alg: &FreeNilpotent, m: &QMatrix, i: usize, j: usize) -> QMatrix {
    let ri = alg.grade_range(i);
    let rj = alg.grade_range(j);
    m.block(ri.start, ri.end, rj.start, rj.end)
}

/// `B_k = Σ_i B(e_i, e_{t-i-k+2})` for the matrix of an invariant form.
pub fn component_matrix(alg: &FreeNilpotent, m: &QMatrix, k: usize) -> QMatrix {
    let t = alg.t();
    let mut out = QMatrix::zeros(m.rows(), m.cols());
    for i in 1..=t + 1 - k {
        let j = t + 2 - k - i;
        out = &out + &grade_pair(alg, m, i, j);
    }
    out
}

/// `B_k` for `k = 1..=t`, each a form on the same algebra.
pub fn bk_components(b: &BilinearForm) -> Result<Vec<BilinearForm>> {
    require_invariant(b)?;
    (1..=b.alg.t())
        .map(|k| BilinearForm::new(b.alg.clone(), component_matrix(&b.alg, &b.matrix, k)))
        .collect()
}

/// First grade pair `(i, j)` with `i + j > t + 1` carrying a nonzero entry.
pub fn high_grade_violation(alg: &FreeNilpotent, m: &QMatrix) -> Option<(usize, usize)> {
    let t = alg.t();
    for i in 1..=t {
        for j in 1..=t {
            if i + j > t + 1 && !grade_block(alg, m, i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// The radical `{x : B(x, ·) = 0}`.
pub fn kernel(b: &BilinearForm) -> Subspace {
    Subspace::kernel_of(&b.matrix)
}

/// Why a form fails to be an object of `Sym₀(d,t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Sym0Violation {
    /// A kernel vector with a nonzero generator component.
    KernelNotInDerived { witness: Vec<String> },
    /// Every basis element of the top grade is in the kernel.
    TopGradeInKernel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sym0Report {
    pub member: bool,
    pub kernel_dim: usize,
    pub violations: Vec<Sym0Violation>,
}

pub fn sym0_membership(b: &BilinearForm) -> Result<Sym0Report> {
    require_invariant(b)?;
    let ker = kernel(b);
    let mut violations = Vec::new();
    if let Some(w) = ker.witness_outside(&b.alg.power(2)) {
        violations.push(Sym0Violation::KernelNotInDerived {
            witness: w.iter().map(ToString::to_string).collect(),
        });
    }
    if b.alg.power(b.alg.t()).is_subspace_of(&ker) {
        violations.push(Sym0Violation::TopGradeInKernel);
    }
    Ok(Sym0Report {
        member: violations.is_empty(),
        kernel_dim: ker.dim(),
        violations,
    })
}

/// Whether, across all of `S²₀(d,t)`, the addend `B(e_i, e_{t-i-k+2})` determines `B_k`.
///
/// Checked as containment of kernels of the two linear maps on the solved form space.
pub fn addend_determines_component(alg: &FreeNilpotent, k: usize, i: usize) -> bool {
    let t = alg.t();
    assert!((1..=t).contains(&k) && (1..=t + 1 - k).contains(&i), "addend out of range");
    let j = t + 2 - k - i;
    let space = invariant_form_subspace(alg);
    let n = alg.dim();
    let forms: Vec<QMatrix> = space.basis().iter().map(|v| from_sym_coords(n, v)).collect();
    let addend_rows: Vec<Vec<Rational>> = forms
        .iter()
        .map(|m| sym_like_coords(&grade_pair(alg, m, i, j)))
        .collect();
    let component_rows: Vec<Vec<Rational>> = forms
        .iter()
        .map(|m| sym_like_coords(&component_matrix(alg, m, k)))
        .collect();
    let addend_map = QMatrix::from_columns(n * n, &addend_rows);
    let component_map = QMatrix::from_columns(n * n, &component_rows);
    let ka = Subspace::kernel_of(&addend_map);
    let kc = Subspace::kernel_of(&component_map);
    ka.is_subspace_of(&kc)
}

fn sym_like_coords(m: &QMatrix) -> Vec<Rational> {
    m.entries().cloned().collect()
}
