//! Property tests for the structural definitions and the range structure.

use evroute::classify::{
    alpha_path, classify_monotone, funnel_decomposition, funnel_zigzag, is_funnel, prefix_gains,
    simulate_alpha, Monotonicity,
};
use evroute::gain::Gain;
use evroute::graph::{ChargeDropSchedule, EnergyGraph, Path};
use evroute::range_tree::{linear, MaxRangeTree2D};
use proptest::prelude::*;

fn path_graph_strategy(
    max_len: usize,
    max_gain: i64,
) -> impl Strategy<Value = (Vec<i64>, i64)> {
    (1..=max_len, 1i64..=20).prop_flat_map(move |(len, b)| {
        (
            prop::collection::vec(-max_gain.min(b)..=max_gain.min(b), len),
            Just(b),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// The closed-form final charge matches arc-by-arc simulation for every
    /// path and start charge.
    #[test]
    fn alpha_formula_matches_simulation((gains, b) in path_graph_strategy(10, 20), frac in 0.0f64..=1.0) {
        let g = EnergyGraph::path_graph(&gains, b).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        let start = ((b as f64) * frac).round() as i64;
        prop_assert_eq!(alpha_path(&g, &p, start).unwrap(), simulate_alpha(&g, &p, start).unwrap());
    }

    /// Ascending with respect to any schedule implies ascending with respect
    /// to the zero schedule.
    #[test]
    fn ascending_survives_dropping_the_schedule(
        (gains, b) in path_graph_strategy(8, 10),
        raw_drops in prop::collection::vec(0i64..=6, 8),
    ) {
        let g = EnergyGraph::path_graph(&gains, b).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        let mut drops = vec![0i64];
        drops.extend(raw_drops.iter().take(gains.len()));
        let c = ChargeDropSchedule::new(drops).unwrap();
        let zero = ChargeDropSchedule::zero(&p);
        if classify_monotone(&g, &p, &c).unwrap() == Monotonicity::Ascending {
            prop_assert_eq!(classify_monotone(&g, &p, &zero).unwrap(), Monotonicity::Ascending);
        }
    }

    /// For ascending paths, the final charge is min(B, b + gain) for every
    /// start charge.
    #[test]
    fn ascending_alpha_closed_form((gains, b) in path_graph_strategy(8, 10), frac in 0.0f64..=1.0) {
        let g = EnergyGraph::path_graph(&gains, b).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        let zero = ChargeDropSchedule::zero(&p);
        if classify_monotone(&g, &p, &zero).unwrap() == Monotonicity::Ascending {
            let start = ((b as f64) * frac).round() as i64;
            let total = *prefix_gains(&g, &p, &zero).unwrap().last().unwrap();
            prop_assert_eq!(
                alpha_path(&g, &p, start).unwrap(),
                Gain::Finite(b.min(start + total))
            );
        }
    }

    /// Every contiguous subpath of a funnel is a funnel.
    #[test]
    fn funnel_subpaths_are_funnels((gains, b) in path_graph_strategy(8, 10)) {
        let g = EnergyGraph::path_graph(&gains, b).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        if is_funnel(&g, &p).unwrap() {
            let verts = p.vertices();
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    let sub = Path::new(verts[i..=j].to_vec()).unwrap();
                    prop_assert!(is_funnel(&g, &sub).unwrap());
                }
            }
        }
    }

    /// Adjacent decomposition pieces overlap by at most two arcs, and a
    /// two-arc overlap has exactly opposite gains on the shared arcs.
    #[test]
    fn decomposition_overlap_bounds((gains, b) in path_graph_strategy(10, 10)) {
        let g = EnergyGraph::path_graph(&gains, b).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        let pieces = funnel_decomposition(&g, &p).unwrap();
        // Pieces cover the path in order.
        prop_assert_eq!(pieces.first().unwrap().first(), 0);
        prop_assert_eq!(pieces.last().unwrap().last(), gains.len());
        for w in pieces.windows(2) {
            let (a, b_piece) = (&w[0], &w[1]);
            let a_end = a.last();
            let b_start = b_piece.first();
            prop_assert!(b_start + 2 >= a_end, "overlap more than two arcs");
            if b_start + 2 == a_end {
                // Two shared arcs: their gains must cancel.
                let g1 = g.gain(b_start, b_start + 1).expect_finite();
                let g2 = g.gain(b_start + 1, b_start + 2).expect_finite();
                prop_assert_eq!(g1, -g2);
            }
        }
    }
}

/// The zig-zag characterization agrees with the funnel definition on every
/// path of up to 8 arcs over nonzero gains in -4..=4 (exhaustive up to 4
/// arcs, densely sampled above).
#[test]
fn zigzag_equals_definition_exhaustively() {
    let vals: Vec<i64> = (-4..=4).filter(|&v| v != 0).collect();
    let check = |gains: &[i64]| {
        // Capacity comfortably above any magnitude so only structure matters.
        let g = EnergyGraph::path_graph(gains, 40).unwrap();
        let p = Path::new((0..=gains.len()).collect()).unwrap();
        assert_eq!(
            is_funnel(&g, &p).unwrap(),
            funnel_zigzag(gains),
            "gains {gains:?}"
        );
    };
    for len in 1..=4usize {
        let total = vals.len().pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let gains: Vec<i64> = (0..len)
                .map(|_| {
                    let v = vals[c % vals.len()];
                    c /= vals.len();
                    v
                })
                .collect();
            check(&gains);
        }
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4000 {
        let len = rng.gen_range(5..=8usize);
        let gains: Vec<i64> = (0..len)
            .map(|_| {
                let v = rng.gen_range(1..=4i64);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        check(&gains);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Every range-structure query matches a linear scan.
    #[test]
    fn range_tree_matches_linear_scan(
        pairs in prop::collection::vec((-50i64..=50, -50i64..=50), 0..200),
        queries in prop::collection::vec((-60i64..=60, -60i64..=60), 1..8),
    ) {
        let triples: Vec<(Gain, Gain, u32)> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (Gain::Finite(a), Gain::Finite(b), i as u32))
            .collect();
        let tree = MaxRangeTree2D::build(triples.clone());
        for &(x, y) in &queries {
            let (lo, hi) = (x.min(y), x.max(y));
            prop_assert_eq!(
                tree.max_k2_in_k1_range(lo, hi),
                linear::max_k2_in_k1_range(&triples, lo, hi)
            );
            prop_assert_eq!(
                tree.max_k2_in_box(x, y),
                linear::max_k2_in_box(&triples, x, y)
            );
            prop_assert_eq!(
                tree.exists_in_quadrant(x, y),
                linear::exists_in_quadrant(&triples, x, y)
            );
            prop_assert_eq!(
                tree.min_k2_in_quadrant(x, y),
                linear::min_k2_in_quadrant(&triples, x, y)
            );
        }
    }
}
