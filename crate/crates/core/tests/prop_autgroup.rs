use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadlie::autgroup::{
    act_on_form, hn_factorize, homomorphism_witness, is_graded, is_unitriangular, kernel_transport_holds, orbit_invariants,
    random_automorphism, random_h, random_n, Endo,
};
use quadlie::exactlin::{ratio, rat, QMatrix};
use quadlie::freenilp::FreeNilpotent;
use quadlie::invforms::{component_matrix, invariant_form_space, is_invariant, BilinearForm};

struct Fixture {
    alg: Arc<FreeNilpotent>,
    space: Vec<BilinearForm>,
}

fn fixtures() -> &'static Vec<Fixture> {
    static F: OnceLock<Vec<Fixture>> = OnceLock::new();
    F.get_or_init(|| {
        [(2, 3), (2, 5), (3, 3)]
            .into_iter()
            .map(|(d, t)| {
                let alg = Arc::new(FreeNilpotent::new(d, t).unwrap());
                let space = invariant_form_space(&alg);
                Fixture { alg, space }
            })
            .collect()
    })
}

fn random_form(f: &Fixture, rng: &mut ChaCha8Rng) -> BilinearForm {
    let n = f.alg.dim();
    let mut m = QMatrix::zeros(n, n);
    for b in &f.space {
        let c = ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        m = &m + &b.matrix().scale(&c);
    }
    BilinearForm::new(f.alg.clone(), m).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn group_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fixtures() {
            let a = random_automorphism(&f.alg, &mut rng);
            let b = random_automorphism(&f.alg, &mut rng);
            let c = random_automorphism(&f.alg, &mut rng);
            prop_assert!(homomorphism_witness(&a).is_none());
            prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
            prop_assert!(a.compose(&a.inverse().unwrap()).unwrap().is_identity());
            prop_assert_eq!(a.compose(&Endo::identity(&f.alg)).unwrap(), a.clone());
            // N is normal: h n h^-1 stays unitriangular.
            let h = random_h(&f.alg, &mut rng);
            let n = random_n(&f.alg, &mut rng);
            prop_assert!(is_graded(&h) && is_unitriangular(&n));
            let conj = h.compose(&n).unwrap().compose(&h.inverse().unwrap()).unwrap();
            prop_assert!(is_unitriangular(&conj));
            prop_assert!(is_unitriangular(&Endo::commutator(&a, &n).unwrap()));
        }
    }

    #[test]
    fn hn_recomposition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fixtures() {
            let phi = random_automorphism(&f.alg, &mut rng);
            let fac = hn_factorize(&phi).unwrap();
            prop_assert!(is_graded(&fac.h));
            prop_assert!(is_unitriangular(&fac.n));
            prop_assert_eq!(fac.h.compose(&fac.n).unwrap(), phi);
        }
    }

    #[test]
    fn orbit_invariants_are_constant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fixtures() {
            let b = random_form(f, &mut rng);
            let phi = random_automorphism(&f.alg, &mut rng);
            let image = act_on_form(&b, &phi).unwrap();
            prop_assert!(is_invariant(&image));
            prop_assert_eq!(orbit_invariants(&b), orbit_invariants(&image));
            prop_assert!(kernel_transport_holds(&b, &phi).unwrap());
        }
    }

    #[test]
    fn s200_stable_under_h(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fixtures() {
            let b = random_form(f, &mut rng);
            let b1 = BilinearForm::new(f.alg.clone(), component_matrix(&f.alg, b.matrix(), 1)).unwrap();
            let image = act_on_form(&b1, &random_h(&f.alg, &mut rng)).unwrap();
            prop_assert_eq!(&component_matrix(&f.alg, image.matrix(), 1), image.matrix());
        }
    }

    #[test]
    fn n_preserves_b1(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fixtures() {
            let b = random_form(f, &mut rng);
            let b1 = BilinearForm::new(f.alg.clone(), component_matrix(&f.alg, b.matrix(), 1)).unwrap();
            let image = act_on_form(&b1, &random_n(&f.alg, &mut rng)).unwrap();
            prop_assert_eq!(&component_matrix(&f.alg, image.matrix(), 1), b1.matrix());
        }
    }
}

#[test]
fn scalar_h_rescales_b1_by_grade() {
    // x_i -> 2 x_i scales grade k by 2^k, so B1 (grades summing to t+1) scales by 2^(t+1).
    let f = &fixtures()[1];
    let imgs: Vec<Vec<_>> = (0..2)
        .map(|i| {
            let mut v = quadlie::exactlin::zero_vec(f.alg.dim());
            v[i] = rat(2);
            v
        })
        .collect();
    let h = quadlie::autgroup::extend_dense(&f.alg, &imgs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = random_form(f, &mut rng);
    let b1 = component_matrix(&f.alg, b.matrix(), 1);
    let image = act_on_form(&BilinearForm::new(f.alg.clone(), b1.clone()).unwrap(), &h).unwrap();
    assert_eq!(image.matrix(), &b1.scale(&rat(64)));
}
