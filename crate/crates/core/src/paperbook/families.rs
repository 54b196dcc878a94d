use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{parse_rational, rat, QMatrix, Rational};
use crate::freenilp::FreeNilpotent;
use crate::invforms::BilinearForm;

/// The parameterized form families on `n_{2,t}` (`t ≤ 5`) and `n_{3,t}` (`t ≤ 3`), plus
/// the two fixed forms on `n_{3,2}` and `n_{2,3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    B21,
    B22,
    B23,
    B24,
    B25,
    B31,
    B32,
    B33,
    PHI32,
    PHI23,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::B21,
        FamilyId::B22,
        FamilyId::B23,
        FamilyId::B24,
        FamilyId::B25,
        FamilyId::B31,
        FamilyId::B32,
        FamilyId::B33,
        FamilyId::PHI32,
        FamilyId::PHI23,
    ];

    /// `(d, t)` of the algebra the family lives on.
    pub fn algebra_params(self) -> (usize, usize) {
        match self {
            FamilyId::B21 => (2, 1),
            FamilyId::B22 => (2, 2),
            FamilyId::B23 | FamilyId::PHI23 => (2, 3),
            FamilyId::B24 => (2, 4),
            FamilyId::B25 => (2, 5),
            FamilyId::B31 => (3, 1),
            FamilyId::B32 | FamilyId::PHI32 => (3, 2),
            FamilyId::B33 => (3, 3),
        }
    }

    pub fn uses_scalar(self) -> bool {
        matches!(self, FamilyId::B23 | FamilyId::B24 | FamilyId::B25 | FamilyId::B32 | FamilyId::B33)
    }

    pub fn uses_a1(self) -> bool {
        !matches!(self, FamilyId::PHI32 | FamilyId::PHI23)
    }

    pub fn uses_a2(self) -> bool {
        matches!(self, FamilyId::B25 | FamilyId::B33)
    }

    /// Number of free scalar parameters (the dimension of the family as a vector space).
    pub fn parameter_count(self) -> usize {
        let (d, _) = self.algebra_params();
        let sym = d * (d + 1) / 2;
        usize::from(self.uses_a1()) * sym + usize::from(self.uses_scalar()) + usize::from(self.uses_a2()) * sym
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "family",
                name: s.to_string(),
            })
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A family together with its parameters. Missing parameters are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub a1: Option<QMatrix>,
    pub scalar: Option<Rational>,
    pub a2: Option<QMatrix>,
}

impl FamilySpec {
    pub fn new(family: FamilyId) -> Self {
        FamilySpec {
            family,
            a1: None,
            scalar: None,
            a2: None,
        }
    }

    pub fn a1(mut self, m: QMatrix) -> Self {
        self.a1 = Some(m);
        self
    }

    pub fn scalar(mut self, s: Rational) -> Self {
        self.scalar = Some(s);
        self
    }

    pub fn a2(mut self, m: QMatrix) -> Self {
        self.a2 = Some(m);
        self
    }

    /// Builds a spec from the parameter vector `[A1 upper triangle, scalar, A2 upper triangle]`
    /// (only the parts the family uses).
    pub fn from_parameters(family: FamilyId, params: &[Rational]) -> Result<Self> {
        if params.len() != family.parameter_count() {
            return Err(Error::DimensionMismatch(format!(
                "{family} takes {} parameters, got {}",
                family.parameter_count(),
                params.len()
            )));
        }
        let (d, _) = family.algebra_params();
        let sym = d * (d + 1) / 2;
        let mut it = params.iter().cloned();
        let mut spec = FamilySpec::new(family);
        let take_sym = |it: &mut dyn Iterator<Item = Rational>| {
            let v: Vec<Rational> = it.take(sym).collect();
            crate::invforms::from_sym_coords(d, &v)
        };
        if family.uses_a1() {
            spec.a1 = Some(take_sym(&mut it));
        }
        if family.uses_scalar() {
            spec.scalar = it.next();
        }
        if family.uses_a2() {
            spec.a2 = Some(take_sym(&mut it));
        }
        Ok(spec)
    }
}

/// `A₂′` for a symmetric `3×3` matrix `A₂`.
pub fn a2prime(a2: &QMatrix) -> Result<QMatrix> {
    if a2.rows() != 3 || a2.cols() != 3 {
        return Err(Error::DimensionMismatch("A2 must be 3x3".into()));
    }
    if !a2.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let (a, b, c) = (a2[(0, 0)].clone(), a2[(0, 1)].clone(), a2[(0, 2)].clone());
    let (d, e, f) = (a2[(1, 1)].clone(), a2[(1, 2)].clone(), a2[(2, 2)].clone());
    let z = Rational::zero();
    QMatrix::from_rows(vec![
        vec![z.clone(), a.clone(), b.clone(), z.clone(), b.clone(), d.clone(), c.clone(), e.clone()],
        vec![-a, z.clone(), c.clone(), -b.clone(), z.clone(), e.clone(), z.clone(), f.clone()],
        vec![-b, -c, z.clone(), -d, -e, z.clone(), -f, z],
    ])
}

/// The anti-diagonal matrix `C` with entries `1, -1, 1`.
pub fn c_matrix() -> QMatrix {
    QMatrix::from_ints(&[[0, 0, 1], [0, -1, 0], [1, 0, 0]])
}

/// `W_γ = γ·C`.
pub fn w_gamma(gamma: &Rational) -> QMatrix {
    c_matrix().scale(gamma)
}

fn check_shape(m: &QMatrix, n: usize, name: &str) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!("{name} must be {n}x{n}, got {}x{}", m.rows(), m.cols())));
    }
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// The printed Gram matrix of the family with parameters substituted.
pub fn family_matrix(spec: &FamilySpec) -> Result<QMatrix> {
    let fam = spec.family;
    let (d, t) = fam.algebra_params();
    let n = FreeNilpotent::new(d, t)?.dim();
    let a1 = spec.a1.clone().unwrap_or_else(|| QMatrix::zeros(d, d));
    let a2 = spec.a2.clone().unwrap_or_else(|| QMatrix::zeros(d, d));
    let g = spec.scalar.clone().unwrap_or_else(Rational::zero);
    if fam.uses_a1() {
        check_shape(&a1, d, "A1")?;
    }
    if fam.uses_a2() {
        check_shape(&a2, d, "A2")?;
    }
    if spec.a1.is_some() && !fam.uses_a1() || spec.a2.is_some() && !fam.uses_a2() || spec.scalar.is_some() && !fam.uses_scalar() {
        return Err(Error::Malformed(format!("{fam} received a parameter it does not take")));
    }
    let mut m = QMatrix::zeros(n, n);
    let mut set = |i: usize, j: usize, v: Rational| {
        m[(i, j)] = v.clone();
        m[(j, i)] = v;
    };
    match fam {
        FamilyId::PHI23 => return family_matrix(&FamilySpec::new(FamilyId::B23).scalar(rat(1))),
        FamilyId::PHI32 => return family_matrix(&FamilySpec::new(FamilyId::B32).scalar(rat(1))),
        FamilyId::B21 | FamilyId::B22 | FamilyId::B31 => {}
        FamilyId::B23 | FamilyId::B24 | FamilyId::B25 => {
            set(0, 4, g.clone());
            set(1, 3, -g.clone());
            set(2, 2, g);
            if fam == FamilyId::B25 {
                let (dd, e, f) = (a2[(0, 0)].clone(), a2[(0, 1)].clone(), a2[(1, 1)].clone());
                // x1 against grade 5
                set(0, 9, -dd.clone());
                set(0, 10, dd.clone());
                set(0, 11, -e.clone());
                set(0, 12, e.clone());
                set(0, 13, -f.clone());
                // x2 against grade 5
                set(1, 8, dd.clone());
                set(1, 10, e.clone());
                set(1, 12, f.clone());
                // grade 2 against grade 4
                set(2, 5, -dd.clone());
                set(2, 6, -e.clone());
                set(2, 7, -f.clone());
                // grade 3 block
                set(3, 3, dd);
                set(3, 4, e);
                set(4, 4, f);
            }
        }
        FamilyId::B32 | FamilyId::B33 => {
            let w = w_gamma(&g);
            for i in 0..3 {
                for j in 0..3 {
                    set(i, 3 + j, w[(i, j)].clone());
                }
            }
            if fam == FamilyId::B33 {
                let ap = a2prime(&a2)?;
                for i in 0..3 {
                    for j in 0..8 {
                        set(i, 6 + j, ap[(i, j)].clone());
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        set(3 + i, 3 + j, a2[(i, j)].clone());
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            set(i, j, a1[(i, j)].clone());
        }
    }
    Ok(m)
}

pub fn family_form(spec: &FamilySpec) -> Result<BilinearForm> {
    let (d, t) = spec.family.algebra_params();
    let alg = Arc::new(FreeNilpotent::new(d, t)?);
    BilinearForm::new(alg, family_matrix(spec)?)
}

/// Parameter file format: `{"A1": [[..]], "gamma": "p/q", "A2": [[..]]}`; `lambda` is
/// accepted as an alias of `gamma`. Entries may be JSON numbers or rational strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    #[serde(rename = "A1", default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default, alias = "lambda", skip_serializing_if = "Option::is_none")]
    pub gamma: Option<serde_json::Value>,
    #[serde(rename = "A2", default, skip_serializing_if = "Option::is_none")]
    pub a2: Option<Vec<Vec<serde_json::Value>>>,
}

fn scalar_value(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) if n.is_i64() => Ok(rat(n.as_i64().expect("i64"))),
        other => Err(Error::Malformed(format!("expected integer or rational string, got {other}"))),
    }
}

fn matrix_value(rows: &[Vec<serde_json::Value>]) -> Result<QMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(scalar_value).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(rows)
}

impl ParamsJson {
    pub fn into_spec(&self, family: FamilyId) -> Result<FamilySpec> {
        Ok(FamilySpec {
            family,
            a1: self.a1.as_deref().map(matrix_value).transpose()?,
            scalar: self.gamma.as_ref().map(scalar_value).transpose()?,
            a2: self.a2.as_deref().map(matrix_value).transpose()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi32_anti_diagonal() {
        let m = family_matrix(&FamilySpec::new(FamilyId::PHI32)).unwrap();
        let signs = [1, -1, 1, 1, -1, 1];
        for i in 0..6 {
            for j in 0..6 {
                let want = if i + j == 5 { rat(signs[i]) } else { rat(0) };
                assert_eq!(m[(i, j)], want);
            }
        }
    }

    #[test]
    fn b23_gamma_pattern() {
        let m = family_matrix(&FamilySpec::new(FamilyId::B23).scalar(rat(1))).unwrap();
        let want = QMatrix::from_ints(&[
            [0, 0, 0, 0, 1],
            [0, 0, 0, -1, 0],
            [0, 0, 1, 0, 0],
            [0, -1, 0, 0, 0],
            [1, 0, 0, 0, 0],
        ]);
        assert_eq!(m, want);
        assert_eq!(m, family_matrix(&FamilySpec::new(FamilyId::PHI23)).unwrap());
    }

    #[test]
    fn a2prime_identity() {
        assert!(a2prime(&QMatrix::zeros(3, 3)).unwrap().is_zero());
        let p = a2prime(&QMatrix::identity(3)).unwrap();
        let want = QMatrix::from_ints(&[
            [0, 1, 0, 0, 0, 1, 0, 0],
            [-1, 0, 0, 0, 0, 0, 0, 1],
            [0, 0, 0, -1, 0, 0, -1, 0],
        ]);
        assert_eq!(p, want);
        assert!(matches!(a2prime(&QMatrix::from_ints(&[[0, 1, 0], [0, 0, 0], [0, 0, 0]])), Err(Error::NotSymmetric)));
    }

    #[test]
    fn b33_blocks() {
        let m = family_matrix(&FamilySpec::new(FamilyId::B33).a2(QMatrix::identity(3))).unwrap();
        assert_eq!(m.block(0, 3, 6, 14), a2prime(&QMatrix::identity(3)).unwrap());
        assert_eq!(m.block(3, 6, 3, 6), QMatrix::identity(3));
        assert!(m.block(0, 3, 0, 6).is_zero());
    }

    #[test]
    fn shape_mismatch() {
        let spec = FamilySpec::new(FamilyId::B23).a1(QMatrix::identity(3));
        assert!(matches!(family_matrix(&spec), Err(Error::DimensionMismatch(_))));
        let spec = FamilySpec::new(FamilyId::B22).scalar(rat(1));
        assert!(family_matrix(&spec).is_err());
    }

    #[test]
    fn params_json() {
        let p: ParamsJson = serde_json::from_str(r#"{"A1": [[1, "1/2"], ["1/2", 0]], "lambda": "3"}"#).unwrap();
        let spec = p.into_spec(FamilyId::B23).unwrap();
        assert_eq!(spec.scalar, Some(rat(3)));
        assert_eq!(spec.a1.unwrap()[(0, 1)], crate::exactlin::ratio(1, 2));
    }
}
