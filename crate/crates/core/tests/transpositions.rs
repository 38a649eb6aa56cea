mod common;

use std::sync::Arc;

use rand::Rng;
use vineyard_lab::complex::{Filter, SimplicialComplex};
use vineyard_lab::persistence::{boundary_matrix, reduce};
use vineyard_lab::vineyard::{SwapKind, VineyardState};

use common::*;

fn triangle() -> Arc<SimplicialComplex> {
    // ids: v0=0 v1=1 v2=2, e01=3 e02=4 e12=5, t=6
    Arc::new(SimplicialComplex::from_maximal(3, &[vec![0, 1, 2]]).unwrap())
}

fn ordered(c: &Arc<SimplicialComplex>, order: Vec<usize>) -> VineyardState {
    let n = order.len();
    VineyardState::new(Filter::from_order(Arc::clone(c), order, vec![0.0; n]).unwrap())
}

#[test]
fn every_swap_in_the_suite_matches_fresh_reduction_and_nesting() {
    let mut seen = [0usize; 4];
    for filter in transposition_suite(11) {
        for i in valid_swaps(&filter) {
            let mut state = VineyardState::new(filter.clone());
            let e = check_transposition(&mut state, i).unwrap();
            seen[e.kind as usize] += 1;
        }
    }
    // the suite exercises every kind
    assert!(seen.iter().all(|&c| c > 0), "{seen:?}");
}

#[test]
fn long_swap_chains_keep_the_decomposition_valid() {
    let mut r = rng(5);
    for c in small_complexes() {
        let mut state = VineyardState::new(random_linear_extension(&c, &mut r));
        for _ in 0..300 {
            let swaps = valid_swaps(state.filter());
            let i = swaps[r.gen_range(0..swaps.len())];
            check_transposition(&mut state, i).unwrap();
        }
    }
}

#[test]
fn nested_deaths_swap_type2() {
    // v0 v1 v2 e12 e02: e12 kills v2, e02 kills v1; swapping the deaths
    // makes e02 kill v2 and e12 kill v1
    let c = Arc::new(SimplicialComplex::from_maximal(3, &[vec![0, 2], vec![1, 2]]).unwrap());
    // ids: v0=0 v1=1 v2=2 e02=3 e12=4
    let mut s = ordered(&c, vec![0, 1, 2, 4, 3]);
    assert_eq!(s.pairing().pairs, vec![(1, 4), (2, 3)]);
    let e = s.transpose_adjacent(3).unwrap();
    assert_eq!(e.kind, SwapKind::Type2);
    assert_eq!(s.pairing(), reduce(&boundary_matrix(s.filter())));
    // order v0 v1 v2 e02 e12: (v1, e12) and (v2, e02)
    assert_eq!(s.pairing().pairs, vec![(1, 4), (2, 3)]);
}

#[test]
fn death_then_birth_swaps_type3() {
    // v0 v1 v2 e01 e02 e12 t: e02 kills v2, e12 opens the cycle t fills
    let c = triangle();
    let mut s = ordered(&c, vec![0, 1, 2, 3, 4, 5, 6]);
    assert_eq!(s.pairing().pairs, vec![(1, 3), (2, 4), (5, 6)]);
    let e = s.transpose_adjacent(4).unwrap();
    assert_eq!(e.kind, SwapKind::Type3);
    // now e12 kills v2 and e02 opens the cycle
    assert_eq!(s.pairing().pairs, vec![(1, 3), (2, 4), (5, 6)]);
    assert_eq!(s.filter().at(4), 5);
    assert_eq!(s.pairing(), reduce(&boundary_matrix(s.filter())));
}

#[test]
fn swapping_back_restores_the_pairing() {
    let mut r = rng(9);
    for c in small_complexes() {
        let f = random_linear_extension(&c, &mut r);
        for i in valid_swaps(&f) {
            let mut s = VineyardState::new(f.clone());
            let before = s.pairing();
            s.transpose_adjacent(i).unwrap();
            s.transpose_adjacent(i).unwrap();
            assert_eq!(s.pairing(), before);
            assert_eq!(s.filter().order(), f.order());
        }
    }
}

#[test]
fn face_and_range_violations_are_errors() {
    let c = triangle();
    let mut s = ordered(&c, vec![0, 1, 2, 3, 4, 5, 6]);
    // e12 then t: e12 is a face of t
    assert!(s.transpose_adjacent(5).is_err());
    assert!(s.transpose_adjacent(6).is_err());
    assert_eq!(s.pairing(), reduce(&boundary_matrix(s.filter())));
}
