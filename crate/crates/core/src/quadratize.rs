//! Quadratic Lie algebras obtained as quotients of `n_{d,t}` by form radicals.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{parse_rational, unit_vec, QMatrix, Rational, Subspace};
use crate::freenilp::format_combination;
use crate::invforms::{invariance_witness, kernel, sym0_membership, BilinearForm, Sym0Violation};
use crate::lie::StructureTable;

/// Where a quotient algebra came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub d: usize,
    pub t: usize,
    pub source: QMatrix,
    /// 1-based Hall indices spanning the chosen complement of the kernel.
    pub complement: Vec<usize>,
}

/// A Lie algebra with a symmetric bilinear form, not yet verified to be quadratic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticAlgebra {
    labels: Vec<String>,
    table: StructureTable,
    form: QMatrix,
    provenance: Option<Provenance>,
}

impl QuadraticAlgebra {
    pub fn new(labels: Vec<String>, table: StructureTable, form: QMatrix) -> Result<Self> {
        let n = table.dim();
        if labels.len() != n || form.rows() != n || form.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels, {}x{} form, {n}-dimensional table",
                labels.len(),
                form.rows(),
                form.cols()
            )));
        }
        Ok(QuadraticAlgebra {
            labels,
            table,
            form,
            provenance: None,
        })
    }

    /// Labels `a1, …, an`.
    pub fn with_default_labels(table: StructureTable, form: QMatrix) -> Result<Self> {
        let labels = (1..=table.dim()).map(|i| format!("a{i}")).collect();
        Self::new(labels, table, form)
    }

    pub fn abelian(form: QMatrix) -> Result<Self> {
        Self::with_default_labels(StructureTable::abelian(form.rows()), form)
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn form(&self) -> &QMatrix {
        &self.form
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Same algebra with the form multiplied by `s`.
    pub fn scaled(&self, s: &Rational) -> QuadraticAlgebra {
        QuadraticAlgebra {
            form: self.form.scale(s),
            ..self.clone()
        }
    }

    pub fn format_vec(&self, v: &[Rational]) -> String {
        format_combination(v, |i| self.labels[i].clone())
    }

    pub fn to_json(&self) -> QuadraticJson {
        QuadraticJson {
            dim: self.dim(),
            basis: self.labels.clone(),
            structure: self
                .table
                .triples()
                .into_iter()
                .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c.to_string()))
                .collect(),
            form: self.form.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Wire format for quadratic algebras; structure constants are 1-based with `i > j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticJson {
    pub dim: usize,
    pub basis: Vec<String>,
    pub structure: Vec<(usize, usize, usize, String)>,
    pub form: QMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl QuadraticJson {
    pub fn load(&self) -> Result<QuadraticAlgebra> {
        let mut triples = Vec::with_capacity(self.structure.len());
        for (i, j, k, c) in &self.structure {
            let ok = (1..=self.dim).contains(i) && (1..=self.dim).contains(j) && (1..=self.dim).contains(k);
            if !ok || i <= j {
                return Err(Error::Malformed(format!("bad structure entry ({i},{j},{k})")));
            }
            triples.push((i - 1, j - 1, k - 1, parse_rational(c)?));
        }
        let table = StructureTable::from_triples(self.dim, &triples);
        let mut q = QuadraticAlgebra::new(self.basis.clone(), table, self.form.clone())?;
        q.provenance = self.provenance.clone();
        Ok(q)
    }
}

/// `(n_{d,t}/Ker B, B̄)` together with the data relating it to `n_{d,t}`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub algebra: QuadraticAlgebra,
    /// 0-based Hall indices whose classes form the quotient basis.
    pub complement: Vec<usize>,
    pub kernel: Subspace,
    /// The canonical projection as a `dim Q × dim n` matrix.
    pub projection: QMatrix,
}

fn admissibility_error(v: &[Sym0Violation]) -> Error {
    let parts: Vec<String> = v
        .iter()
        .map(|x| match x {
            Sym0Violation::KernelNotInDerived { witness } => {
                format!("kernel not contained in n^2 (witness ({}))", witness.join(", "))
            }
            Sym0Violation::TopGradeInKernel => "n^t is contained in the kernel".to_string(),
        })
        .collect();
    Error::NotAdmissible(parts.join("; "))
}

/// The quotient by the radical over the earliest Hall-index complement.
pub fn quotient_quadratic(b: &BilinearForm) -> Result<Quotient> {
    let report = sym0_membership(b)?;
    if !report.member {
        return Err(admissibility_error(&report.violations));
    }
    let ker = kernel(b);
    let complement = ker.earliest_complement();
    quotient_with_complement(b, &ker, complement)
}

/// The quotient over an explicitly chosen complement of the kernel (0-based indices).
pub fn quotient_with_complement(b: &BilinearForm, ker: &Subspace, complement: Vec<usize>) -> Result<Quotient> {
    let alg = b.algebra();
    let n = alg.dim();
    let r = complement.len();
    if r + ker.dim() != n {
        return Err(Error::DimensionMismatch("complement size does not match kernel codimension".into()));
    }
    let mut cols: Vec<Vec<Rational>> = complement.iter().map(|&i| unit_vec(n, i)).collect();
    cols.extend(ker.basis().iter().cloned());
    let change = QMatrix::from_columns(n, &cols);
    let inv = change.inverse().map_err(|_| Error::NotAdmissible("indices do not complement the kernel".into()))?;
    let projection = inv.block(0, r, 0, n);
    let mut dense = Vec::with_capacity(r * r);
    for &i in &complement {
        for &j in &complement {
            dense.push(projection.mul_vec(&alg.table().bracket_basis_dense(i, j)));
        }
    }
    let table = StructureTable::from_dense_unchecked(r, dense);
    let form = QMatrix::from_fn(r, r, |a, c| b.matrix()[(complement[a], complement[c])].clone());
    let labels = complement.iter().map(|&i| alg.word(i).to_string()).collect();
    let mut algebra = QuadraticAlgebra::new(labels, table, form)?;
    algebra.provenance = Some(Provenance {
        d: alg.d(),
        t: alg.t(),
        source: b.matrix().clone(),
        complement: complement.iter().map(|i| i + 1).collect(),
    });
    Ok(Quotient {
        algebra,
        complement,
        kernel: ker.clone(),
        projection,
    })
}

/// Checks that the projection is a Lie homomorphism pulling `B̄` back to `B`.
pub fn projection_is_isometric_homomorphism(b: &BilinearForm, q: &Quotient) -> bool {
    let alg = b.algebra();
    let n = alg.dim();
    let p = &q.projection;
    let images: Vec<Vec<Rational>> = (0..n).map(|i| p.column(i)).collect();
    for i in 0..n {
        for j in 0..n {
            let lhs = p.mul_vec(&alg.table().bracket_basis_dense(i, j));
            let rhs = q.algebra.table.bracket(&images[i], &images[j]);
            if lhs != rhs {
                return false;
            }
            if b.matrix()[(i, j)] != q.algebra.form.bilinear(&images[i], &images[j]) {
                return false;
            }
        }
    }
    true
}

/// Matrix of the map between two quotients of the same form induced by the identity of
/// `n_{d,t}`: columns are the images of the first quotient's basis.
pub fn complement_change(q1: &Quotient, q2: &Quotient) -> QMatrix {
    let cols: Vec<Vec<Rational>> = q1.complement.iter().map(|&i| q2.projection.column(i)).collect();
    QMatrix::from_columns(q2.algebra.dim(), &cols)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub property: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn new(property: &'static str, witness: Option<String>) -> Self {
        Check {
            property,
            pass: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticReport {
    pub checks: Vec<Check>,
}

impl QuadraticReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, property: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.property == property)
    }
}

pub fn verify_quadratic(q: &QuadraticAlgebra) -> QuadraticReport {
    let l = &q.labels;
    let antisym = q
        .table
        .antisymmetry_witness()
        .map(|(i, j)| format!("[{},{}] + [{},{}] != 0", l[i], l[j], l[j], l[i]));
    let jacobi = q.table.jacobi_witness().map(|w| {
        let (i, j, k) = w.triple;
        format!("Jacobi sum on ({}, {}, {}) is {}", l[i], l[j], l[k], q.format_vec(&w.value))
    });
    let symmetric = (!q.form.is_symmetric()).then(|| {
        let n = q.dim();
        let (i, j) = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| q.form[(i, j)] != q.form[(j, i)])
            .expect("asymmetric entry");
        format!("B({},{}) != B({},{})", l[i], l[j], l[j], l[i])
    });
    let invariant = invariance_witness(&q.table, &q.form).map(|w| {
        let (i, j, k) = w.triple;
        format!(
            "B([{},{}],{}) = {} but B({},[{},{}]) = {}",
            l[i], l[j], l[k], w.lhs, l[i], l[j], l[k], w.rhs
        )
    });
    let nondegenerate = q
        .form
        .nullspace()
        .into_iter()
        .next()
        .map(|v| format!("radical contains {}", q.format_vec(&v)));
    QuadraticReport {
        checks: vec![
            Check::new("antisymmetry", antisym),
            Check::new("jacobi", jacobi),
            Check::new("form_symmetric", symmetric),
            Check::new("form_invariant", invariant),
            Check::new("nondegenerate", nondegenerate),
        ],
    }
}

fn require_quadratic(q: &QuadraticAlgebra) -> Result<()> {
    let report = verify_quadratic(q);
    match report.checks.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(c) => Err(Error::NotQuadratic(format!(
            "{}: {}",
            c.property,
            c.witness.clone().unwrap_or_default()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalityLevel {
    pub i: usize,
    pub dim_lower: usize,
    pub dim_upper: usize,
    pub perp_equals_upper: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub holds: bool,
    pub levels: Vec<OrthogonalityLevel>,
}

/// Checks `(g^i)^⊥ = Z_i(g)` and `dim g = dim g^i + dim Z_i(g)` along both series.
pub fn orthogonality_check(q: &QuadraticAlgebra) -> Result<OrthogonalityReport> {
    require_quadratic(q)?;
    let lower = q.table.lower_central_series();
    let upper = q.table.upper_central_series();
    let len = lower.len().max(upper.len());
    let at = |s: &[Subspace], i: usize| s.get(i).unwrap_or_else(|| s.last().expect("nonempty")).clone();
    let levels: Vec<OrthogonalityLevel> = (0..len)
        .map(|idx| {
            let gi = at(&lower, idx);
            let zi = at(&upper, idx);
            OrthogonalityLevel {
                i: idx + 1,
                dim_lower: gi.dim(),
                dim_upper: zi.dim(),
                perp_equals_upper: gi.orthogonal(&q.form) == zi,
            }
        })
        .collect();
    let n = q.dim();
    let holds = levels
        .iter()
        .all(|l| l.perp_equals_upper && l.dim_lower + l.dim_upper == n);
    Ok(OrthogonalityReport { holds, levels })
}

/// `(type, nilindex)`: codimension of `g²` and the least `t` with `g^{t+1} = 0`.
pub fn type_and_nilindex(q: &QuadraticAlgebra) -> Result<(usize, usize)> {
    let lower = q.table.lower_central_series();
    if !lower.last().expect("nonempty").is_zero() {
        return Err(Error::NotNilpotent);
    }
    let derived = lower.get(1).map_or(0, Subspace::dim);
    Ok((q.dim() - derived, lower.len() - 1))
}

/// A one-dimensional nondegenerate central ideal and its orthogonal complement.
#[derive(Clone, Debug)]
pub struct Split {
    pub ideal: Vec<Rational>,
    pub complement: QuadraticAlgebra,
    /// Columns: basis of the complement followed by the ideal generator.
    pub basis_change: QMatrix,
}

/// Splits off a one-dimensional central ideal on which the form is nonzero, if any.
pub fn split_1dim(q: &QuadraticAlgebra) -> Result<Option<Split>> {
    let n = q.dim();
    if n <= 1 {
        return Ok(None);
    }
    let center = q.table.center();
    let z = center.basis();
    let mut candidate = None;
    'search: for (a, u) in z.iter().enumerate() {
        if !q.form.bilinear(u, u).is_zero() {
            candidate = Some(u.clone());
            break;
        }
        for v in &z[a + 1..] {
            let w: Vec<Rational> = u.iter().zip(v).map(|(x, y)| x + y).collect();
            if !q.form.bilinear(&w, &w).is_zero() {
                candidate = Some(w);
                break 'search;
            }
        }
    }
    let Some(x) = candidate else {
        return Ok(None);
    };
    let perp = Subspace::span(n, [x.clone()]).orthogonal(&q.form);
    let mut cols: Vec<Vec<Rational>> = perp.basis().to_vec();
    cols.push(x.clone());
    let change = QMatrix::from_columns(n, &cols);
    let table = q.table.change_basis(&change)?;
    let form = q.form.congruent(&change);
    let m = n - 1;
    let mut dense = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let v = table.bracket_basis_dense(i, j);
            if !v[m].is_zero() {
                return Err(Error::NotQuadratic("orthogonal complement is not an ideal".into()));
            }
            dense.push(v[..m].to_vec());
        }
    }
    let labels = perp.basis().iter().map(|v| q.format_vec(v)).collect();
    let complement = QuadraticAlgebra::new(labels, StructureTable::from_dense_unchecked(m, dense), form.block(0, m, 0, m))?;
    Ok(Some(Split {
        ideal: x,
        complement,
        basis_change: change,
    }))
}

/// Orthogonal direct sum; the first summand's basis comes first.
pub fn orthogonal_sum(a: &QuadraticAlgebra, b: &QuadraticAlgebra) -> Result<QuadraticAlgebra> {
    let (n, m) = (a.dim(), b.dim());
    let mut triples = a.table.triples();
    triples.extend(b.table.triples().into_iter().map(|(i, j, k, c)| (i + n, j + n, k + n, c)));
    let table = StructureTable::from_triples(n + m, &triples);
    let mut form = QMatrix::zeros(n + m, n + m);
    form.set_block(0, 0, &a.form);
    form.set_block(n, n, &b.form);
    let labels = a
        .labels
        .iter()
        .map(|l| format!("{l}'"))
        .chain(b.labels.iter().map(|l| format!("{l}''")))
        .collect();
    QuadraticAlgebra::new(labels, table, form)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum MetricMapFailure {
    Singular,
    NotHomomorphism { pair: (String, String) },
    NotIsometry { pair: (String, String) },
}

/// Checks that `theta` (columns are images of the source basis) is a Lie isomorphism
/// with `B_source(x,y) = B_target(θx, θy)`.
pub fn verify_metric_map(
    theta: &QMatrix,
    source: &QuadraticAlgebra,
    target: &QuadraticAlgebra,
) -> Result<Option<MetricMapFailure>> {
    let n = source.dim();
    if target.dim() != n || theta.rows() != n || theta.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{} between algebras of dimension {n} and {}",
            theta.rows(),
            theta.cols(),
            target.dim()
        )));
    }
    if theta.determinant()?.is_zero() {
        return Ok(Some(MetricMapFailure::Singular));
    }
    let images: Vec<Vec<Rational>> = (0..n).map(|j| theta.column(j)).collect();
    let pair = |i: usize, j: usize| (source.labels[i].clone(), source.labels[j].clone());
    for i in 0..n {
        for j in 0..n {
            let lhs = theta.mul_vec(&source.table.bracket_basis_dense(i, j));
            let rhs = target.table.bracket(&images[i], &images[j]);
            if lhs != rhs {
                return Ok(Some(MetricMapFailure::NotHomomorphism { pair: pair(i, j) }));
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            if source.form[(i, j)] != target.form.bilinear(&images[i], &images[j]) {
                return Ok(Some(MetricMapFailure::NotIsometry { pair: pair(i, j) }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    #[test]
    fn abelian_identity_form() {
        let q = QuadraticAlgebra::abelian(QMatrix::identity(3)).unwrap();
        assert!(verify_quadratic(&q).all_pass());
        assert!(orthogonality_check(&q).unwrap().holds);
        assert_eq!(type_and_nilindex(&q).unwrap(), (3, 1));
        let split = split_1dim(&q).unwrap().expect("abelian splits");
        assert_eq!(split.complement.dim(), 2);
    }

    #[test]
    fn non_nilpotent_rejected() {
        // [e2, e1] = e1
        let t = StructureTable::from_triples(2, &[(1, 0, 0, rat(1))]);
        let q = QuadraticAlgebra::with_default_labels(t, QMatrix::identity(2)).unwrap();
        assert!(matches!(type_and_nilindex(&q), Err(Error::NotNilpotent)));
    }

    #[test]
    fn identity_map_is_metric() {
        let q = QuadraticAlgebra::abelian(QMatrix::from_ints(&[[0, 1], [1, 0]])).unwrap();
        assert_eq!(verify_metric_map(&QMatrix::identity(2), &q, &q).unwrap(), None);
        let bad = QMatrix::from_ints(&[[2, 0], [0, 1]]);
        assert!(matches!(
            verify_metric_map(&bad, &q, &q).unwrap(),
            Some(MetricMapFailure::NotIsometry { .. })
        ));
        assert!(verify_metric_map(&QMatrix::identity(3), &q, &q).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = StructureTable::from_triples(3, &[(1, 0, 2, rat(1))]);
        let q = QuadraticAlgebra::with_default_labels(t, QMatrix::identity(3)).unwrap();
        let js = serde_json::to_string(&q.to_json()).unwrap();
        let back: QuadraticJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.load().unwrap(), q);
    }
}
