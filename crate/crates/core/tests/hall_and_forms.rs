use std::sync::Arc;

use quadlie::freenilp::{hall_basis, witt_dimension, FreeNilpotent};
use quadlie::invforms::{invariant_form_space, invariant_form_subspace, invariance_rank};

fn words(d: usize, t: usize) -> Vec<String> {
    hall_basis(d, t).unwrap().iter().map(ToString::to_string).collect()
}

fn new_words(d: usize, t: usize) -> Vec<String> {
    words(d, t)[words(d, t - 1).len()..].to_vec()
}

#[test]
fn printed_hall_lists() {
    assert_eq!(words(2, 2), ["x1", "x2", "[x2,x1]"]);
    assert_eq!(new_words(2, 3), ["[[x2,x1],x1]", "[[x2,x1],x2]"]);
    assert_eq!(
        new_words(2, 4),
        ["[[[x2,x1],x1],x1]", "[[[x2,x1],x1],x2]", "[[[x2,x1],x2],x2]"]
    );
    assert_eq!(
        new_words(2, 5),
        [
            "[[[[x2,x1],x1],x1],x1]",
            "[[[[x2,x1],x1],x1],x2]",
            "[[[x2,x1],x1],[x2,x1]]",
            "[[[[x2,x1],x1],x2],x2]",
            "[[[x2,x1],x2],[x2,x1]]",
            "[[[[x2,x1],x2],x2],x2]",
        ]
    );
    assert_eq!(words(3, 2), ["x1", "x2", "x3", "[x2,x1]", "[x3,x1]", "[x3,x2]"]);
    assert_eq!(
        new_words(3, 3),
        [
            "[[x2,x1],x1]",
            "[[x2,x1],x2]",
            "[[x2,x1],x3]",
            "[[x3,x1],x1]",
            "[[x3,x1],x2]",
            "[[x3,x1],x3]",
            "[[x3,x2],x2]",
            "[[x3,x2],x3]",
        ]
    );
}

#[test]
fn grade_counts_match_witt() {
    for d in 2..=4usize {
        let tmax = if d == 2 { 6 } else { 5 };
        let alg = FreeNilpotent::new(d, tmax).unwrap();
        for l in 1..=tmax {
            assert_eq!(
                alg.grade_range(l).len() as u64,
                witt_dimension(d as u64, l as u64),
                "d={d} l={l}"
            );
        }
    }
}

#[test]
fn quadratic_dimensions() {
    let dims = |d, ts: &[usize]| -> Vec<usize> {
        ts.iter()
            .map(|&t| invariant_form_space(&Arc::new(FreeNilpotent::new(d, t).unwrap())).len())
            .collect()
    };
    assert_eq!(dims(2, &[1, 2, 3, 4, 5]), vec![3, 3, 4, 4, 7]);
    assert_eq!(dims(3, &[1, 2, 3]), vec![6, 7, 13]);
}

#[test]
fn rank_nullity_of_constraint_system() {
    for (d, t) in [(2, 5), (3, 3)] {
        let alg = FreeNilpotent::new(d, t).unwrap();
        let n = alg.dim();
        assert_eq!(invariance_rank(&alg) + invariant_form_subspace(&alg).dim(), n * (n + 1) / 2);
    }
}
