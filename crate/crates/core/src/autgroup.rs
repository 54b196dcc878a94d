//! Endomorphisms and automorphisms of `n_{d,t}` determined by generator images.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{parse_rational, rat, QMatrix, Rational, Subspace};
use crate::freenilp::{FreeNilpotent, LieElement};
use crate::invforms::{grade_block, kernel, BilinearForm};

/// The algebra endomorphism extending a linear map on the generators.
#[derive(Clone, Debug)]
pub struct Endo {
    alg: Arc<FreeNilpotent>,
    matrix: QMatrix,
}

impl PartialEq for Endo {
    fn eq(&self, other: &Self) -> bool {
        *self.alg == *other.alg && self.matrix == other.matrix
    }
}

impl Endo {
    pub fn algebra(&self) -> &Arc<FreeNilpotent> {
        &self.alg
    }

    /// Matrix over the Hall basis; column `j` is the image of `h_j`.
    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn generator_images(&self) -> Vec<LieElement> {
        (0..self.alg.d()).map(|i| self.alg.element(&self.matrix.column(i))).collect()
    }

    pub fn identity(alg: &Arc<FreeNilpotent>) -> Self {
        Endo {
            alg: alg.clone(),
            matrix: QMatrix::identity(alg.dim()),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endo) -> Result<Endo> {
        if *self.alg != *other.alg {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Endo {
            alg: self.alg.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn inverse(&self) -> Result<Endo> {
        if !is_automorphism(self) {
            return Err(Error::NotAutomorphism);
        }
        Ok(Endo {
            alg: self.alg.clone(),
            matrix: self.matrix.inverse()?,
        })
    }

    /// Group commutator `a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Endo, b: &Endo) -> Result<Endo> {
        a.inverse()?.compose(&b.inverse()?)?.compose(a)?.compose(b)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == QMatrix::identity(self.alg.dim())
    }

    /// Rebuilds the endomorphism from a full matrix, checking that it is the extension
    /// of its own generator columns.
    pub fn from_matrix(alg: &Arc<FreeNilpotent>, m: &QMatrix) -> Result<Endo> {
        let images: Vec<Vec<Rational>> = (0..alg.d()).map(|i| m.column(i)).collect();
        let e = extend_dense(alg, &images)?;
        if &e.matrix != m {
            return Err(Error::Malformed("matrix is not the extension of its generator columns".into()));
        }
        Ok(e)
    }

    pub fn to_json(&self) -> AutomorphismJson {
        AutomorphismJson {
            d: self.alg.d(),
            t: self.alg.t(),
            generator_images: (0..self.alg.d())
                .map(|i| self.matrix.column(i).iter().map(ToString::to_string).collect())
                .collect(),
            matrix: Some(self.matrix.clone()),
        }
    }
}

/// Wire format: generator images as Hall-coefficient vectors. The full matrix is
/// recomputed on load; when present it must agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismJson {
    pub d: usize,
    pub t: usize,
    pub generator_images: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<QMatrix>,
}

impl AutomorphismJson {
    pub fn load(&self) -> Result<Endo> {
        let alg = Arc::new(FreeNilpotent::new(self.d, self.t)?);
        let images = self
            .generator_images
            .iter()
            .map(|v| {
                if v.len() != alg.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "image has {} coordinates, algebra has dimension {}",
                        v.len(),
                        alg.dim()
                    )));
                }
                v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let e = extend_dense(&alg, &images)?;
        if let Some(m) = &self.matrix {
            if m != &e.matrix {
                return Err(Error::Malformed("stored matrix disagrees with the extension".into()));
            }
        }
        Ok(e)
    }
}

/// The unique endomorphism with the given generator images.
pub fn extend(alg: &Arc<FreeNilpotent>, images: &[LieElement]) -> Result<Endo> {
    for x in images {
        alg.check_member(x)?;
    }
    let dense: Vec<Vec<Rational>> = images.iter().map(|x| x.to_dense(alg.dim())).collect();
    extend_dense(alg, &dense)
}

pub fn extend_dense(alg: &Arc<FreeNilpotent>, images: &[Vec<Rational>]) -> Result<Endo> {
    if images.len() != alg.d() {
        return Err(Error::ImageCount {
            expected: alg.d(),
            got: images.len(),
        });
    }
    let n = alg.dim();
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n);
    // Generators come first in the Hall order.
    let mut gens = images.iter();
    for k in 0..n {
        let col = match alg.factors(k) {
            None => {
                let image = gens.next().expect("one image per generator");
                if image.len() != n {
                    return Err(Error::DimensionMismatch("generator image has wrong length".into()));
                }
                image.clone()
            }
            Some((a, b)) => alg.bracket_vec(&cols[a], &cols[b]),
        };
        cols.push(col);
    }
    Ok(Endo {
        alg: alg.clone(),
        matrix: QMatrix::from_columns(n, &cols),
    })
}

/// Grade-1 block of the generator images.
pub fn linear_part(phi: &Endo) -> QMatrix {
    let d = phi.alg.d();
    phi.matrix.block(0, d, 0, d)
}

pub fn is_automorphism(phi: &Endo) -> bool {
    !linear_part(phi).determinant().expect("square").is_zero()
}

/// `φ[h_i,h_j] = [φh_i, φh_j]` on all basis pairs; returns the first failing pair.
pub fn homomorphism_witness(phi: &Endo) -> Option<(usize, usize)> {
    let n = phi.alg.dim();
    let cols: Vec<Vec<Rational>> = (0..n).map(|j| phi.matrix.column(j)).collect();
    for i in 0..n {
        for j in 0..n {
            let lhs = phi.matrix.mul_vec(&phi.alg.table().bracket_basis_dense(i, j));
            if lhs != phi.alg.bracket_vec(&cols[i], &cols[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Block-diagonal with respect to the grading (an element of `H(d,t)` when invertible).
pub fn is_graded(phi: &Endo) -> bool {
    let n = phi.alg.dim();
    (0..n).all(|p| (0..n).all(|q| phi.alg.grade(p) == phi.alg.grade(q) || phi.matrix[(p, q)].is_zero()))
}

/// Identity on each grade and only raising grades otherwise (an element of `N(d,t)`).
pub fn is_unitriangular(phi: &Endo) -> bool {
    let n = phi.alg.dim();
    (0..n).all(|p| {
        (0..n).all(|q| {
            let (gp, gq) = (phi.alg.grade(p), phi.alg.grade(q));
            let x = &phi.matrix[(p, q)];
            if gp < gq {
                x.is_zero()
            } else if gp == gq {
                if p == q {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            } else {
                true
            }
        })
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutFactorization {
    pub h: Endo,
    pub n: Endo,
}

/// `φ = h ∘ n` with `h ∈ H(d,t)` and `n ∈ N(d,t)`.
pub fn hn_factorize(phi: &Endo) -> Result<AutFactorization> {
    if !is_automorphism(phi) {
        return Err(Error::NotAutomorphism);
    }
    let lin = linear_part(phi);
    let d = phi.alg.d();
    let n = phi.alg.dim();
    let images: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            for (r, x) in v.iter_mut().enumerate().take(d) {
                *x = lin[(r, i)].clone();
            }
            v
        })
        .collect();
    let h = extend_dense(&phi.alg, &images)?;
    let nn = h.inverse()?.compose(phi)?;
    debug_assert!(is_graded(&h) && is_unitriangular(&nn));
    Ok(AutFactorization { h, n: nn })
}

/// `B_φ(x,y) = B(φx, φy)`, i.e. `Mᵗ B M`.
pub fn act_on_form(b: &BilinearForm, phi: &Endo) -> Result<BilinearForm> {
    if **b.algebra() != *phi.alg {
        return Err(Error::AlgebraMismatch);
    }
    if !is_automorphism(phi) {
        return Err(Error::NotAutomorphism);
    }
    BilinearForm::new(b.algebra().clone(), b.matrix().congruent(&phi.matrix))
}

/// Quantities constant along `Aut n_{d,t}`-orbits of invariant forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitInvariants {
    pub rank: usize,
    pub kernel_dim: usize,
    /// Ranks of the blocks `B(e_i, e_{t+1-i})`, `i = 1..t`.
    pub top_block_ranks: Vec<usize>,
    /// `dim(Ker B ∩ n^k)`, `k = 1..t`.
    pub kernel_profile: Vec<usize>,
}

pub fn orbit_invariants(b: &BilinearForm) -> OrbitInvariants {
    let alg = b.algebra();
    let t = alg.t();
    let ker = kernel(b);
    OrbitInvariants {
        rank: b.matrix().rank(),
        kernel_dim: ker.dim(),
        top_block_ranks: (1..=t).map(|i| grade_block(alg, b.matrix(), i, t + 1 - i).rank()).collect(),
        kernel_profile: (1..=t).map(|k| ker.intersection(&alg.power(k)).dim()).collect(),
    }
}

/// `Ker(B_φ) = φ⁻¹(Ker B)`, checked as subspaces.
pub fn kernel_transport_holds(b: &BilinearForm, phi: &Endo) -> Result<bool> {
    let acted = act_on_form(b, phi)?;
    let pulled: Subspace = kernel(b).image(phi.inverse()?.matrix());
    Ok(kernel(&acted) == pulled)
}

/// A random element of `H(d,t)`: integer linear part with `1 ≤ |det| ≤ 5`.
pub fn random_h<R: Rng>(alg: &Arc<FreeNilpotent>, rng: &mut R) -> Endo {
    let d = alg.d();
    loop {
        let a = QMatrix::from_fn(d, d, |_, _| rat(rng.gen_range(-3..=3)));
        let det = a.determinant().expect("square");
        if det.is_zero() || det.abs() > rat(5) {
            continue;
        }
        let images: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                let mut v = vec![Rational::zero(); alg.dim()];
                for r in 0..d {
                    v[r] = a[(r, i)].clone();
                }
                v
            })
            .collect();
        return extend_dense(alg, &images).expect("d images");
    }
}

/// A random element of `N(d,t)`: generators move by sparse integer combinations of
/// grade ≥ 2 basis elements with entries in `[-3, 3]`.
pub fn random_n<R: Rng>(alg: &Arc<FreeNilpotent>, rng: &mut R) -> Endo {
    let d = alg.d();
    let n = alg.dim();
    let images: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            for x in v.iter_mut().skip(d) {
                if rng.gen_bool(0.4) {
                    *x = rat(rng.gen_range(-3..=3));
                }
            }
            v
        })
        .collect();
    extend_dense(alg, &images).expect("d images")
}

pub fn random_automorphism<R: Rng>(alg: &Arc<FreeNilpotent>, rng: &mut R) -> Endo {
    random_h(alg, rng).compose(&random_n(alg, rng)).expect("same algebra")
}
