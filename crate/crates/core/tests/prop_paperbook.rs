use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::Zero;
use proptest::prelude::*;

use quadlie::exactlin::{ratio, QMatrix, Rational, Subspace};
use quadlie::freenilp::FreeNilpotent;
use quadlie::invforms::{from_sym_coords, invariant_form_subspace, is_invariant, sym_coords};
use quadlie::paperbook::{a2prime, adjugate_congruence_check, c_matrix, cofactor, family_form, FamilyId, FamilySpec};

fn solved_space(family: FamilyId) -> &'static Subspace {
    static SPACES: OnceLock<HashMap<(usize, usize), Subspace>> = OnceLock::new();
    let spaces = SPACES.get_or_init(|| {
        FamilyId::ALL
            .iter()
            .map(|f| f.algebra_params())
            .map(|(d, t)| ((d, t), invariant_form_subspace(&FreeNilpotent::new(d, t).unwrap())))
            .collect()
    });
    &spaces[&family.algebra_params()]
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| ratio(n, d))
}

fn family_with_params() -> impl Strategy<Value = (FamilyId, Vec<Rational>)> {
    prop::sample::select(FamilyId::ALL.to_vec())
        .prop_flat_map(|f| (Just(f), prop::collection::vec(small_rational(), f.parameter_count())))
}

fn matrix3() -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(small_rational(), 9).prop_map(|v| QMatrix::from_fn(3, 3, |i, j| v[3 * i + j].clone()))
}

fn symmetric3() -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(small_rational(), 6).prop_map(|v| from_sym_coords(3, &v))
}

/// Symmetric 3x3 matrices of a prescribed rank, as `Pᵗ D P`.
fn symmetric3_of_rank(rank: usize) -> impl Strategy<Value = QMatrix> {
    (prop::collection::vec(small_rational(), 9), prop::collection::vec((1i64..=4, any::<bool>()), 3)).prop_filter_map(
        "singular P",
        move |(p, diag)| {
            let p = QMatrix::from_fn(3, 3, |i, j| p[3 * i + j].clone());
            if p.determinant().unwrap().is_zero() {
                return None;
            }
            let d = QMatrix::from_fn(3, 3, |i, j| {
                if i == j && i < rank {
                    let (x, neg) = diag[i];
                    ratio(if neg { -x } else { x }, 1)
                } else {
                    Rational::zero()
                }
            });
            Some(d.congruent(&p))
        },
    )
}

proptest! {
    #[test]
    fn family_forms_are_invariant((family, params) in family_with_params()) {
        let spec = FamilySpec::from_parameters(family, &params).unwrap();
        let b = family_form(&spec).unwrap();
        prop_assert!(is_invariant(&b));
        prop_assert!(solved_space(family).contains(&sym_coords(b.matrix())));
    }

    #[test]
    fn a2prime_rank_equivalence(a2 in symmetric3()) {
        let r = a2.rank();
        let rp = a2prime(&a2).unwrap().rank();
        prop_assert_eq!(r >= 2, rp == 3);
        prop_assert_eq!(r == 1, rp == 2);
        prop_assert_eq!(r == 0, rp == 0);
    }

    #[test]
    fn a2prime_rank_by_construction((rank, a2) in (0usize..=3).prop_flat_map(|r| (Just(r), symmetric3_of_rank(r)))) {
        let expected = match rank { 0 => 0, 1 => 2, _ => 3 };
        prop_assert_eq!(a2.rank(), rank);
        prop_assert_eq!(a2prime(&a2).unwrap().rank(), expected);
    }

    #[test]
    fn cofactor_is_multiplicative(p in matrix3(), q in matrix3()) {
        prop_assume!(!p.determinant().unwrap().is_zero() && !q.determinant().unwrap().is_zero());
        let det = p.determinant().unwrap();
        prop_assert_eq!(cofactor(&p).unwrap(), p.inverse().unwrap().transpose().scale(&det));
        prop_assert_eq!(cofactor(&(&p * &q)).unwrap(), &cofactor(&p).unwrap() * &cofactor(&q).unwrap());
    }

    #[test]
    fn adjugate_congruence_detects_perturbation(a in symmetric3(), p in matrix3(), k in 0usize..6) {
        prop_assume!(!p.determinant().unwrap().is_zero());
        let c = c_matrix();
        let b = &(&c * &(&(&c * &a) * &c).congruent(&cofactor(&p).unwrap())) * &c;
        prop_assert!(adjugate_congruence_check(&a, &b, &p).unwrap());
        let mut bump = vec![Rational::zero(); 6];
        bump[k] = ratio(1, 1);
        let perturbed = &b + &from_sym_coords(3, &bump);
        prop_assert!(!adjugate_congruence_check(&a, &perturbed, &p).unwrap());
    }
}
