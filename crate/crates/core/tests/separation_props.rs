#[path = "support/oracles.rs"]
mod oracles;

use oracles::{exact, q, small_systems};
use selfsim::dimension::{reduced_similarity_dimension, similarity_dimension};
use selfsim::io::{example_document, ExampleParams};
use selfsim::separation::{exact_overlap_scan, multiplicity_scan, wsp_scan, WspStatus};
use selfsim::symbolic::default_prune_bound;
use selfsim::{Backend, IfsSystem, Scalar, Similarity, Word};

fn example(name: &str) -> IfsSystem {
    example_document(name, &ExampleParams::new())
        .unwrap()
        .build(None)
        .unwrap()
}

fn bound(ifs: &IfsSystem) -> Scalar {
    default_prune_bound(ifs.dim(), ifs.backend())
}

/// `x/3 + (2/3)z` over the four corners `z` of the unit square.
fn four_corners() -> IfsSystem {
    let maps = [(0, 0), (2, 0), (0, 2), (2, 2)]
        .iter()
        .map(|&(x, y)| {
            Similarity::plane(
                exact(1, 3),
                Scalar::zero(Backend::Exact),
                false,
                [exact(x, 3), exact(y, 3)],
            )
            .unwrap()
        })
        .collect();
    IfsSystem::new("four-corners", maps).unwrap()
}

#[test]
fn verdict_is_monotone_in_depth_and_epsilon() {
    let eps = [exact(1, 1000), exact(1, 20), exact(1, 3)];
    for ifs in small_systems().iter().step_by(3) {
        let b = bound(ifs);
        let mut prev_min: Option<Scalar> = None;
        let mut prev_violation = false;
        for depth in 1..=4 {
            let v = wsp_scan(ifs, depth, &eps[1], &b).unwrap();
            // deeper scans see every shallower record
            if let (Some(p), Some(m)) = (&prev_min, &v.min_nonzero_distance) {
                assert!(m <= p, "{}: min distance grew at depth {depth}", ifs.name());
            }
            assert!(prev_min.is_none() || v.min_nonzero_distance.is_some());
            let violation = v.status == WspStatus::ViolationWitnessed;
            assert!(violation || !prev_violation, "{}: violation lost at depth {depth}", ifs.name());
            prev_violation = violation;
            prev_min = v.min_nonzero_distance.clone();
        }
        let counts: Vec<usize> = eps
            .iter()
            .map(|e| wsp_scan(ifs, 4, e, &b).unwrap().witnesses.len())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{}: {counts:?}", ifs.name());
    }
}

#[test]
fn witnesses_recompose_from_their_words() {
    let ifs = example("bandt-graf-line");
    let v = wsp_scan(&ifs, 9, &exact(1, 100), &bound(&ifs)).unwrap();
    assert_eq!(v.status, WspStatus::ViolationWitnessed);
    assert!(!v.witnesses.is_empty());
    for w in &v.witnesses {
        let re = ifs
            .word_map(&w.alpha)
            .unwrap()
            .inverse()
            .compose(&ifs.word_map(&w.beta).unwrap())
            .unwrap();
        assert_eq!(re.key(), w.map.key());
        assert_eq!(re.identity_distance(), w.id_distance);
        assert!(w.id_distance.is_positive() && w.id_distance < v.epsilon);
    }
    assert!(v
        .witnesses
        .windows(2)
        .all(|p| p[0].id_distance <= p[1].id_distance));
    assert_eq!(v.min_nonzero_distance.as_ref(), Some(&v.witnesses[0].id_distance));
}

#[test]
fn open_set_examples_stabilize() {
    for ifs in [example("cantor-1d"), example("unit-square"), four_corners()] {
        let v = wsp_scan(&ifs, 6, &exact(1, 1_000_000), &bound(&ifs)).unwrap();
        assert_eq!(v.status, WspStatus::WspEvidence, "{}", ifs.name());
        assert!(v.stabilized_at.unwrap() <= 6);
        assert!(v.witnesses.is_empty() && v.exact_overlaps.is_empty());
    }
}

#[test]
fn exact_overlaps_are_found_and_reduce_dimension() {
    for name in ["exact-overlap-demo", "overlap-ninths"] {
        let ifs = example(name);
        let found = exact_overlap_scan(&ifs, 3).unwrap();
        assert!(found
            .iter()
            .any(|o| o.alpha == Word::new(vec![2]) && o.beta == Word::new(vec![0, 0])
                || o.alpha == Word::new(vec![0, 0]) && o.beta == Word::new(vec![2])));
        for o in &found {
            assert_eq!(
                ifs.word_map(&o.alpha).unwrap().key(),
                ifs.word_map(&o.beta).unwrap().key()
            );
        }
        let r = Scalar::from_rational(&q(1, 64), Backend::Exact);
        let red = reduced_similarity_dimension(&ifs, &r).unwrap();
        let sim = similarity_dimension(&ifs).unwrap();
        assert!(
            red.estimate.unclamped.unwrap() < sim.unclamped.unwrap(),
            "{name}: reduced {:?} vs similarity {:?}",
            red.estimate.unclamped,
            sim.unclamped
        );
        // the scan reports the collision as an overlap, never as a witness
        let v = wsp_scan(&ifs, 3, &exact(1, 1_000_000), &bound(&ifs)).unwrap();
        assert!(!v.exact_overlaps.is_empty());
        assert!(v.witnesses.iter().all(|w| w.id_distance.is_positive()));
    }
}

#[test]
fn cantor_multiplicity_stays_bounded() {
    let ifs = example("cantor-1d");
    let z = [Scalar::zero(Backend::Exact)];
    for n in 1..=8 {
        let r = Scalar::from_rational(&q(1, 3).pow(n), Backend::Exact);
        let m = multiplicity_scan(&ifs, &r, &z).unwrap();
        assert_eq!(m.words, 1 << n);
        assert_eq!(m.distinct_points, 1 << n);
        assert!(m.max_multiplicity <= 2, "n = {n}: {}", m.max_multiplicity);
    }
}

#[test]
fn bandt_graf_multiplicity_grows() {
    let ifs = example("bandt-graf-line");
    let z = [Scalar::zero(Backend::Exact)];
    let at = |j: i32| {
        let r = Scalar::from_rational(&q(1, 5).pow(j), Backend::Exact);
        multiplicity_scan(&ifs, &r, &z).unwrap()
    };
    let coarse = at(4);
    let fine = at(8);
    assert_eq!(fine.words, 3usize.pow(8));
    assert!(
        fine.max_multiplicity > coarse.max_multiplicity,
        "{} vs {}",
        fine.max_multiplicity,
        coarse.max_multiplicity
    );
}
