//! Seeded instance generators: random graphs, funnel path graphs, the
//! double-funnel adversary family, and the two-path demo instance.

use crate::classify::{classify_monotone, funnel_zigzag, Monotonicity};
use crate::gain::Gain;
use crate::graph::{ChargeDropSchedule, EnergyGraph, Path};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("capacity {capacity} too small, instance needs at least {needed}")]
    CapacityTooSmall { capacity: i64, needed: i64 },
    #[error("gain sequence is not a funnel")]
    NotAFunnel,
    #[error("generated instance failed its structural scan: {0}")]
    StructuralScan(String),
}

/// Parameters for [`gen_random`].
#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub n: usize,
    pub density: f64,
    pub gain_bound: i64,
    pub capacity: i64,
    pub seed: u64,
}

/// Each ordered pair of distinct vertices gets an arc with probability
/// `density`; gains are uniform over `[-gain_bound, gain_bound]`.
pub fn gen_random(spec: &RandomSpec) -> Result<EnergyGraph, GenError> {
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(GenError::InvalidSpec(format!(
            "density {} outside [0, 1]",
            spec.density
        )));
    }
    if spec.capacity <= 0 {
        return Err(GenError::InvalidSpec("capacity must be positive".into()));
    }
    if spec.gain_bound < 0 || spec.gain_bound > spec.capacity {
        return Err(GenError::InvalidSpec(format!(
            "gain bound {} outside [0, capacity={}]",
            spec.gain_bound, spec.capacity
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = EnergyGraph::new(spec.n, spec.capacity)
        .map_err(|e| GenError::InvalidSpec(e.to_string()))?;
    for u in 0..spec.n {
        for v in 0..spec.n {
            if u == v {
                continue;
            }
            if rng.gen_bool(spec.density) {
                let w = rng.gen_range(-spec.gain_bound..=spec.gain_bound);
                g.set_gain(u, v, Gain::Finite(w));
            }
        }
    }
    Ok(g)
}

/// Path graph with exactly the given arc gains, validated to be a funnel by
/// the zig-zag characterization.
pub fn gen_funnel_path(gains: &[i64], capacity: i64) -> Result<EnergyGraph, GenError> {
    if capacity <= 0 {
        return Err(GenError::InvalidSpec("capacity must be positive".into()));
    }
    if !funnel_zigzag(gains) {
        return Err(GenError::NotAFunnel);
    }
    if let Some(&worst) = gains.iter().max_by_key(|a| a.abs()) {
        if worst.abs() > capacity {
            return Err(GenError::CapacityTooSmall {
                capacity,
                needed: worst.abs(),
            });
        }
    }
    EnergyGraph::path_graph(gains, capacity).map_err(|e| GenError::InvalidSpec(e.to_string()))
}

/// Arc gains of the k-arc double-funnel adversary: a strictly falling
/// alternating-sign arithmetic ramp (magnitudes k-1, k-2, ..., 1) followed
/// by one alternating tail arc of magnitude ceil(k/2). The ramp prefix is a
/// funnel, so the only short monotone subpath of the whole path is the final
/// 3-arc window, and each short-shortcut round can contract only that
/// window. The heavy tail keeps the contracted arc large enough that the
/// next tail window stays monotone, so the contraction marches down the
/// whole ramp one window per round.
pub fn double_funnel_gains(k: usize) -> Vec<i64> {
    let mut gains = Vec::with_capacity(k);
    for i in 0..k - 1 {
        let mag = (k - 1 - i) as i64;
        gains.push(if i % 2 == 0 { mag } else { -mag });
    }
    let tail_sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
    gains.push(k.div_ceil(2) as i64 * tail_sign);
    gains
}

/// The Figure-2 style adversary as a path graph, structurally validated
/// before returning.
pub fn gen_double_funnel(k: usize, capacity: i64) -> Result<EnergyGraph, GenError> {
    if k < 5 {
        return Err(GenError::InvalidSpec(format!("k={k} too short, need k >= 5")));
    }
    // Contraction values reach about k in magnitude and must stay above -B.
    let needed = (k + 1) as i64;
    if capacity < needed {
        return Err(GenError::CapacityTooSmall { capacity, needed });
    }
    let gains = double_funnel_gains(k);
    let g = EnergyGraph::path_graph(&gains, capacity)
        .map_err(|e| GenError::InvalidSpec(e.to_string()))?;

    // Structural scan: the ramp prefix is a funnel, and the only short
    // monotone subpath sits on the last three arcs.
    if !funnel_zigzag(&gains[..k - 1]) {
        return Err(GenError::StructuralScan("ramp prefix is not a funnel".into()));
    }
    let verts: Vec<usize> = (0..=k).collect();
    for len in [2usize, 3] {
        for start in 0..=k - len {
            let sub = Path::new(verts[start..start + len + 1].to_vec()).unwrap();
            let zero = ChargeDropSchedule::zero(&sub);
            let mono = classify_monotone(&g, &sub, &zero)
                .map_err(|e| GenError::StructuralScan(e.to_string()))?;
            let expect_tail = len == 3 && start == k - 3;
            if (mono != Monotonicity::NotMonotone) != expect_tail {
                return Err(GenError::StructuralScan(format!(
                    "short monotone window at arcs {start}..{} (len {len})",
                    start + len
                )));
            }
        }
    }
    Ok(g)
}

/// The two disjoint three-vertex paths used throughout as the smallest
/// interesting instance: gains (-5, +5) on vertices 0-1-2 and (+5, -5) on
/// vertices 3-4-5, with capacity 10.
pub fn two_path_demo() -> EnergyGraph {
    let mut g = EnergyGraph::new(6, 10).unwrap();
    g.set_gain(0, 1, Gain::Finite(-5));
    g.set_gain(1, 2, Gain::Finite(5));
    g.set_gain(3, 4, Gain::Finite(5));
    g.set_gain(4, 5, Gain::Finite(-5));
    g
}
