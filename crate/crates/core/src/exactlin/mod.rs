//! Exact rational scalars and linear algebra.

mod congruence;
mod matrix;
mod subspace;

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use congruence::{congruence_diagonalize, signature, Signature};
pub use matrix::{dot, serialize_rows, sign, MatrixJson, QMatrix};
pub use subspace::{RowReducer, Subspace};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` reduced to lowest terms. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` with optional surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
    }
}

pub fn zero_vec(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zero_vec(n);
    v[i] = rat(1);
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Whether `delta / gamma` is the square of a rational.
pub fn same_square_class(gamma: &Rational, delta: &Rational) -> Result<bool> {
    if gamma.is_zero() || delta.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let q = delta / gamma;
    Ok(is_perfect_square(&(q.numer() * q.denom())))
}

/// Squarefree integer representing the square class of a nonzero rational.
pub fn square_class_rep(x: &Rational) -> Result<BigInt> {
    if x.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let mut n = x.numer() * x.denom();
    let negative = n.is_negative();
    n = n.abs();
    let mut rep = BigInt::from(1);
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut count = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            count += 1;
        }
        if count % 2 == 1 {
            rep *= &p;
        }
        p += 1;
    }
    rep *= n;
    Ok(if negative { -rep } else { rep })
}

/// Which field the classification questions are answered over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldMode {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "R")]
    RealSignature,
    #[serde(rename = "C")]
    AlgClosedRank,
}

impl FromStr for FieldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(FieldMode::Rationals),
            "R" | "r" => Ok(FieldMode::RealSignature),
            "C" | "c" => Ok(FieldMode::AlgClosedRank),
            other => Err(Error::Unknown {
                kind: "field",
                name: other.to_string(),
            }),
        }
    }
}

impl FieldMode {
    pub fn letter(self) -> &'static str {
        match self {
            FieldMode::Rationals => "Q",
            FieldMode::RealSignature => "R",
            FieldMode::AlgClosedRank => "C",
        }
    }
}

/// Congruence data of a symmetric matrix as far as the field mode can decide it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceClass {
    pub field: FieldMode,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<(usize, usize, usize)>,
    /// Square classes of the nonzero diagonal entries after diagonalization (Q only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_classes: Option<Vec<String>>,
}

pub fn congruence_class(a: &QMatrix, field: FieldMode) -> Result<CongruenceClass> {
    let sig = signature(a)?;
    let rank = sig.plus + sig.minus;
    Ok(match field {
        FieldMode::AlgClosedRank => CongruenceClass {
            field,
            rank,
            signature: None,
            square_classes: None,
        },
        FieldMode::RealSignature => CongruenceClass {
            field,
            rank,
            signature: Some((sig.plus, sig.minus, sig.zero)),
            square_classes: None,
        },
        FieldMode::Rationals => {
            let (_, d) = congruence_diagonalize(a)?;
            let mut classes = (0..d.rows())
                .filter(|&i| !d[(i, i)].is_zero())
                .map(|i| square_class_rep(&d[(i, i)]).map(|r| r.to_string()))
                .collect::<Result<Vec<_>>>()?;
            classes.sort();
            CongruenceClass {
                field,
                rank,
                signature: Some((sig.plus, sig.minus, sig.zero)),
                square_classes: Some(classes),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(rat(7).to_string(), "7");
    }

    #[test]
    fn square_classes() {
        assert!(same_square_class(&rat(1), &rat(4)).unwrap());
        assert!(!same_square_class(&rat(1), &rat(2)).unwrap());
        assert!(same_square_class(&rat(3), &rat(27)).unwrap());
        assert!(same_square_class(&ratio(2, 3), &ratio(3, 2)).unwrap());
        assert!(!same_square_class(&rat(1), &rat(-1)).unwrap());
        assert!(matches!(same_square_class(&rat(0), &rat(1)), Err(Error::ZeroScalar)));
    }

    #[test]
    fn square_class_representatives() {
        assert_eq!(square_class_rep(&rat(12)).unwrap(), BigInt::from(3));
        assert_eq!(square_class_rep(&ratio(-8, 9)).unwrap(), BigInt::from(-2));
        assert_eq!(square_class_rep(&ratio(1, 5)).unwrap(), BigInt::from(5));
    }

    #[test]
    fn field_mode_letters() {
        for f in ["Q", "R", "C"] {
            assert_eq!(f.parse::<FieldMode>().unwrap().letter(), f);
        }
        assert!("Z".parse::<FieldMode>().is_err());
    }
}
