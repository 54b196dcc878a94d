use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use num_traits::Zero;
use serde::Serialize;

use crate::exactlin::{is_zero_vec, rat, unit_vec, zero_vec, QMatrix, Rational};
use crate::freenilp::FreeNilpotent;
use crate::invforms::BilinearForm;
use crate::lie::StructureTable;
use crate::quadratize::{quotient_quadratic, verify_metric_map, MetricMapFailure, QuadraticAlgebra, Quotient};

use super::families::{family_form, FamilyId, FamilySpec};

/// Which classification list an entry comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatalogList {
    /// Algebraically closed fields.
    Closed,
    /// Additional real algebras.
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatalogLabel {
    pub list: CatalogList,
    /// 1-based item number.
    pub item: u8,
    /// The form is negated.
    pub negated: bool,
}

const ROMAN: [&str; 7] = ["i", "ii", "iii", "iv", "v", "vi", "vii"];

impl CatalogLabel {
    /// Every base label (without sign variants).
    pub fn all() -> Vec<CatalogLabel> {
        let mut out: Vec<CatalogLabel> = (1..=7)
            .map(|item| CatalogLabel {
                list: CatalogList::Closed,
                item,
                negated: false,
            })
            .collect();
        out.extend((2..=4).map(|item| CatalogLabel {
            list: CatalogList::Real,
            item,
            negated: false,
        }));
        out
    }

    pub fn negate(self) -> CatalogLabel {
        CatalogLabel {
            negated: !self.negated,
            ..self
        }
    }
}

impl fmt::Display for CatalogLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = match self.list {
            CatalogList::Closed => "6.1",
            CatalogList::Real => "6.2",
        };
        write!(f, "T{list}-{}", ROMAN[usize::from(self.item) - 1])?;
        if self.negated {
            write!(f, "-neg")?;
        }
        Ok(())
    }
}

/// Accepts `T6.1-iii`, `Thm6.1(iii)`, `6.2-iv-neg` and similar spellings.
impl FromStr for CatalogLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Unknown {
            kind: "catalog label",
            name: s.to_string(),
        };
        let lower = s.trim().to_ascii_lowercase();
        let rest = lower.trim_start_matches("thm").trim_start_matches('t');
        let (list, rest) = if let Some(r) = rest.strip_prefix("6.1") {
            (CatalogList::Closed, r)
        } else if let Some(r) = rest.strip_prefix("6.2") {
            (CatalogList::Real, r)
        } else {
            return Err(unknown());
        };
        let mut rest = rest.trim_start_matches(['-', '(', '.']).to_string();
        let mut negated = false;
        for suffix in ["-neg", "neg", "-"] {
            if let Some(r) = rest.strip_suffix(suffix) {
                negated = true;
                rest = r.to_string();
                break;
            }
        }
        let roman = rest.trim_end_matches(')');
        let item = ROMAN.iter().position(|r| *r == roman).ok_or_else(unknown)? + 1;
        let valid = match list {
            CatalogList::Closed => true,
            CatalogList::Real => (2..=4).contains(&item),
        };
        if !valid {
            return Err(unknown());
        }
        Ok(CatalogLabel {
            list,
            item: item as u8,
            negated,
        })
    }
}

/// A classified quadratic algebra with its printed basis, products and form, plus the
/// invariant form whose quotient produces it.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: CatalogLabel,
    pub algebra: QuadraticAlgebra,
    /// Expected `(type, nilindex)`.
    pub type_nilindex: (usize, usize),
    pub source: BilinearForm,
    pub indecomposable: bool,
}

struct Printed {
    dim: usize,
    /// `[a_i, a_j] = c·a_k`, 1-based, as printed (not necessarily `i > j`).
    products: &'static [(usize, usize, usize, i64)],
    /// `φ(a_i, a_j) = v`, 1-based.
    form: &'static [(usize, usize, i64)],
    type_nilindex: (usize, usize),
}

fn printed(label: CatalogLabel) -> Printed {
    use CatalogList::*;
    match (label.list, label.item) {
        (Closed, 1) => Printed {
            dim: 1,
            products: &[],
            form: &[(1, 1, 1)],
            type_nilindex: (1, 1),
        },
        (Closed, 2) => Printed {
            dim: 5,
            products: &[(2, 1, 3, 1), (3, 1, 4, 1), (3, 2, 5, 1)],
            form: &[(1, 5, 1), (2, 4, -1), (3, 3, 1)],
            type_nilindex: (2, 3),
        },
        (Closed, 3) => Printed {
            dim: 7,
            products: &[(2, 1, 3, 1), (3, 1, 4, 1), (4, 1, 5, 1), (5, 1, 6, 1), (5, 2, 7, 1), (3, 4, 7, 1)],
            form: &[(1, 7, -1), (2, 6, 1), (3, 5, -1), (4, 4, 1)],
            type_nilindex: (2, 5),
        },
        (Closed, 4) => Printed {
            dim: 8,
            products: &[
                (2, 1, 3, 1),
                (3, 1, 4, 1),
                (3, 2, 5, 1),
                (4, 1, 6, 1),
                (6, 1, 7, 1),
                (6, 2, 8, 1),
                (2, 5, 6, -1),
                (4, 3, 8, -1),
                (5, 3, 7, 1),
            ],
            form: &[(1, 8, -1), (2, 7, 1), (3, 6, -1), (4, 4, 1), (5, 5, 1)],
            type_nilindex: (2, 5),
        },
        (Closed, 5) => Printed {
            dim: 6,
            products: &[(2, 1, 4, 1), (3, 1, 5, 1), (3, 2, 6, 1)],
            form: &[(1, 6, 1), (2, 5, -1), (3, 4, 1)],
            type_nilindex: (3, 2),
        },
        (Closed, 6) => Printed {
            dim: 8,
            products: &[(2, 1, 4, 1), (3, 1, 5, 1), (4, 1, 6, 1), (4, 2, 7, 1), (5, 1, 8, 1), (5, 3, 7, 1)],
            form: &[(4, 4, 1), (5, 5, 1), (1, 7, 1), (2, 6, -1), (3, 8, -1)],
            type_nilindex: (3, 3),
        },
        (Closed, 7) => Printed {
            dim: 9,
            products: &[
                (2, 1, 4, 1),
                (3, 1, 5, 1),
                (3, 2, 6, 1),
                (4, 1, 7, 1),
                (4, 2, 8, 1),
                (5, 1, 9, 1),
                (5, 3, 8, 1),
                (6, 3, 7, -1),
                (6, 2, 9, 1),
            ],
            form: &[(4, 4, 1), (5, 5, 1), (6, 6, 1), (1, 8, 1), (2, 7, -1), (3, 9, -1)],
            type_nilindex: (3, 3),
        },
        (Real, 2) => Printed {
            dim: 8,
            products: &[
                (2, 1, 3, 1),
                (3, 1, 4, 1),
                (4, 1, 6, 1),
                (6, 1, 7, 1),
                (3, 2, 5, 1),
                (5, 2, 6, -1),
                (6, 2, 8, 1),
                (4, 3, 8, -1),
                (5, 3, 7, -1),
            ],
            form: &[(1, 8, -1), (2, 7, 1), (3, 6, -1), (4, 4, 1), (5, 5, -1)],
            type_nilindex: (2, 5),
        },
        (Real, 3) => Printed {
            dim: 8,
            products: &[(2, 1, 4, 1), (3, 1, 5, 1), (4, 1, 6, 1), (5, 1, 8, 1), (4, 2, 7, 1), (5, 3, 7, -1)],
            form: &[(4, 4, 1), (5, 5, -1), (1, 7, 1), (2, 6, -1), (3, 8, 1)],
            type_nilindex: (3, 3),
        },
        (Real, 4) => Printed {
            dim: 9,
            products: &[
                (2, 1, 4, 1),
                (3, 1, 5, 1),
                (4, 1, 7, 1),
                (5, 1, 9, 1),
                (3, 2, 6, 1),
                (4, 2, 8, 1),
                (6, 2, 9, -1),
                (5, 3, 8, 1),
                (6, 3, 7, 1),
            ],
            form: &[(4, 4, 1), (5, 5, 1), (6, 6, -1), (1, 8, 1), (2, 7, -1), (3, 9, -1)],
            type_nilindex: (3, 3),
        },
        _ => unreachable!("label validated on construction"),
    }
}

/// The invariant form whose quotient gives the (unnegated) entry.
fn source_form(label: CatalogLabel) -> Result<BilinearForm> {
    use CatalogList::*;
    let diag2 = |a: i64, b: i64| QMatrix::from_ints(&[[a, 0], [0, b]]);
    let diag3 = |a: i64, b: i64, c: i64| QMatrix::from_ints(&[[a, 0, 0], [0, b, 0], [0, 0, c]]);
    let spec = match (label.list, label.item) {
        (Closed, 1) => {
            let alg = Arc::new(FreeNilpotent::new(1, 1)?);
            return BilinearForm::new(alg, QMatrix::identity(1));
        }
        (Closed, 2) => FamilySpec::new(FamilyId::PHI23),
        (Closed, 3) => FamilySpec::new(FamilyId::B25).a2(diag2(1, 0)),
        (Closed, 4) => FamilySpec::new(FamilyId::B25).a2(diag2(1, 1)),
        (Closed, 5) => FamilySpec::new(FamilyId::PHI32),
        (Closed, 6) => FamilySpec::new(FamilyId::B33).a2(diag3(1, 1, 0)),
        (Closed, 7) => FamilySpec::new(FamilyId::B33).a2(diag3(1, 1, 1)),
        (Real, 2) => FamilySpec::new(FamilyId::B25).a2(diag2(1, -1)),
        (Real, 3) => FamilySpec::new(FamilyId::B33).a2(diag3(1, -1, 0)),
        (Real, 4) => FamilySpec::new(FamilyId::B33).a2(diag3(1, 1, -1)),
        _ => unreachable!("label validated on construction"),
    };
    family_form(&spec)
}

/// The classified algebra exactly as printed, with its form negated for sign variants.
pub fn classified_algebra(label: CatalogLabel) -> Result<CatalogEntry> {
    let p = printed(label);
    let triples: Vec<(usize, usize, usize, Rational)> = p
        .products
        .iter()
        .map(|&(i, j, k, c)| {
            if i > j {
                (i - 1, j - 1, k - 1, rat(c))
            } else {
                (j - 1, i - 1, k - 1, rat(-c))
            }
        })
        .collect();
    let table = StructureTable::from_triples(p.dim, &triples);
    let sign = if label.negated { -1 } else { 1 };
    let mut form = QMatrix::zeros(p.dim, p.dim);
    for &(i, j, v) in p.form {
        form[(i - 1, j - 1)] = rat(sign * v);
        form[(j - 1, i - 1)] = rat(sign * v);
    }
    let algebra = QuadraticAlgebra::with_default_labels(table, form)?;
    let source = source_form(label)?;
    let source = if label.negated {
        BilinearForm::new(source.algebra().clone(), source.matrix().scale(&rat(-1)))?
    } else {
        source
    };
    Ok(CatalogEntry {
        label,
        algebra,
        type_nilindex: p.type_nilindex,
        source,
        indecomposable: true,
    })
}

pub fn classified_algebra_by_name(name: &str) -> Result<CatalogEntry> {
    classified_algebra(name.parse()?)
}

/// Images of every Hall basis vector under the homomorphism `n_{d,t} → L` fixed by the
/// generator images.
pub fn hall_images(alg: &FreeNilpotent, target: &StructureTable, generators: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    if generators.len() != alg.d() {
        return Err(Error::ImageCount {
            expected: alg.d(),
            got: generators.len(),
        });
    }
    let mut img: Vec<Vec<Rational>> = Vec::with_capacity(alg.dim());
    let mut gens = generators.iter();
    for i in 0..alg.dim() {
        let v = match alg.factors(i) {
            None => gens.next().expect("one image per generator").clone(),
            Some((a, b)) => target.bracket(&img[a], &img[b]),
        };
        img.push(v);
    }
    Ok(img)
}

/// Outcome of connecting a quotient to a printed algebra.
#[derive(Clone, Debug, Serialize)]
pub struct IsomorphismReport {
    /// Images of the generators `x_i` in the printed basis.
    pub generator_images: Vec<String>,
    /// A kernel vector not sent to zero, if any.
    pub kernel_witness: Option<String>,
    pub failure: Option<MetricMapFailure>,
    /// Columns are the images of the quotient basis.
    #[serde(skip)]
    pub theta: Option<QMatrix>,
}

impl IsomorphismReport {
    pub fn pass(&self) -> bool {
        self.kernel_witness.is_none() && self.failure.is_none() && self.theta.is_some()
    }
}

/// Induces `θ: n_{d,t}/Ker B → L` from generator images and checks it is a metric
/// isomorphism.
pub fn induced_isomorphism(q: &Quotient, alg: &FreeNilpotent, target: &QuadraticAlgebra, generators: &[Vec<Rational>]) -> Result<IsomorphismReport> {
    let img = hall_images(alg, target.table(), generators)?;
    let generator_images = generators.iter().map(|g| target.format_vec(g)).collect();
    let apply = |v: &[Rational]| {
        let mut out = zero_vec(target.dim());
        for (c, im) in v.iter().zip(&img) {
            if !c.is_zero() {
                for (o, x) in out.iter_mut().zip(im) {
                    *o += c * x;
                }
            }
        }
        out
    };
    for v in q.kernel.basis() {
        if !is_zero_vec(&apply(v)) {
            return Ok(IsomorphismReport {
                generator_images,
                kernel_witness: Some(alg.format_vec(v)),
                failure: None,
                theta: None,
            });
        }
    }
    if q.algebra.dim() != target.dim() {
        return Err(Error::DimensionMismatch("quotient and target differ in dimension".into()));
    }
    let cols: Vec<Vec<Rational>> = q.complement.iter().map(|&c| img[c].clone()).collect();
    let theta = QMatrix::from_columns(target.dim(), &cols);
    let failure = verify_metric_map(&theta, &q.algebra, target)?;
    Ok(IsomorphismReport {
        generator_images,
        kernel_witness: None,
        failure,
        theta: Some(theta),
    })
}

/// Connects `entry.source`'s quotient to the printed algebra by sending `x_i` to `a_i`.
pub fn catalog_isomorphism(entry: &CatalogEntry) -> Result<IsomorphismReport> {
    let alg = entry.source.algebra();
    let q = quotient_quadratic(&entry.source)?;
    let n = entry.algebra.dim();
    let gens: Vec<Vec<Rational>> = (0..alg.d()).map(|i| unit_vec(n, i)).collect();
    induced_isomorphism(&q, alg, &entry.algebra, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_round_trip() {
        for l in CatalogLabel::all() {
            assert_eq!(l.to_string().parse::<CatalogLabel>().unwrap(), l);
            assert_eq!(l.negate().to_string().parse::<CatalogLabel>().unwrap(), l.negate());
        }
        assert_eq!(
            "Thm6.2(iii)".parse::<CatalogLabel>().unwrap(),
            CatalogLabel {
                list: CatalogList::Real,
                item: 3,
                negated: false
            }
        );
        assert!("T6.2-v".parse::<CatalogLabel>().is_err());
        assert!("T7.1-i".parse::<CatalogLabel>().is_err());
    }

    #[test]
    fn printed_form_values() {
        let e = classified_algebra_by_name("T6.1-ii").unwrap();
        assert_eq!(e.algebra.dim(), 5);
        let f = e.algebra.form();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i + j == 4 { rat(if i % 2 == 0 { 1 } else { -1 }) } else { rat(0) };
                assert_eq!(f[(i, j)], want);
            }
        }
        let e = classified_algebra_by_name("T6.1-vii").unwrap();
        for k in 3..6 {
            assert_eq!(e.algebra.form()[(k, k)], rat(1));
        }
        let e = classified_algebra_by_name("T6.2-iii").unwrap();
        assert_eq!(e.algebra.form()[(3, 3)], rat(1));
        assert_eq!(e.algebra.form()[(4, 4)], rat(-1));
    }
}
