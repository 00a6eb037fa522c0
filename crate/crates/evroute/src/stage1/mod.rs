//! Stage I: iterated synthesis of the monotone-path shortcut table.
//!
//! `compute_shortcuts` runs outer rounds of `update_shortcuts`; each round
//! interleaves a pass that captures every 2- and 3-arc monotone path
//! (`short_shortcuts`) with occasional, much heavier passes that capture long
//! monotone paths through funnel machinery (`long_shortcuts`). All tables
//! only ever grow, and with witnesses enabled every entry carries provenance
//! back to a concrete path in the input graph.

mod driver;
mod passes;
pub mod witness;

pub use driver::Stage1Engine;

use crate::gain::Gain;
use crate::table::{Cube, Matrix};
use witness::{NodeId, NO_NODE};

/// Tunable constants of the driver. The formulas they feed are fixed; only
/// the leading constants and the de-randomization switches live here.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub seed: u64,
    /// Replace every sampled vertex set with the full vertex set and fire
    /// every probabilistic gate. Deterministic; used for verification runs.
    pub exhaustive: bool,
    /// Record provenance for every table improvement.
    pub witnesses: bool,
    /// Witness expansion cap, in arcs of the input graph.
    pub witness_cap: usize,
    /// Inner iterations per update round: r = ceil(c_r * sqrt(n)).
    pub c_r: f64,
    /// Outer rounds: ceil(c_o * (log2 n + 1)^2).
    pub c_o: f64,
    /// Sampling multiplier for the long-shortcut vertex sets.
    pub c_t: f64,
    /// Above this vertex count the long-shortcut machinery runs under a work
    /// budget (call cap, concatenation slice budget, reduced funnel-pass
    /// sampling). Small instances always run the full formulas.
    pub budgeted_above_n: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            seed: 0,
            exhaustive: false,
            witnesses: false,
            witness_cap: 512,
            c_r: 2.0,
            c_o: 1.0,
            c_t: 4.0,
            budgeted_above_n: 16,
        }
    }
}

impl EngineConfig {
    pub fn with_seed(seed: u64) -> Self {
        EngineConfig {
            seed,
            ..Default::default()
        }
    }
}

/// The shortcut table M: an n x n gain matrix with optional witnesses and a
/// generation counter (bumped once per completed update round).
#[derive(Clone, Debug)]
pub struct ShortcutTable {
    pub vals: Matrix<Gain>,
    pub wit: Option<Matrix<NodeId>>,
    pub generation: u64,
}

impl ShortcutTable {
    pub fn n(&self) -> usize {
        self.vals.n()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Gain {
        self.vals.at(x, y)
    }

    pub fn wit_at(&self, x: usize, y: usize) -> NodeId {
        self.wit.as_ref().map_or(NO_NODE, |w| w.at(x, y))
    }

    /// Entrywise max merge, keeping the existing entry on ties.
    pub fn merge_max(&mut self, other: &ShortcutTable) {
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                if other.at(x, y) > self.at(x, y) {
                    self.vals.set(x, y, other.at(x, y));
                    if let (Some(w), Some(ow)) = (self.wit.as_mut(), other.wit.as_ref()) {
                        w.set(x, y, ow.at(x, y));
                    }
                }
            }
        }
    }
}

/// The bounded-path store D: best recorded monotone gains (`mono`),
/// first-arc-bounded gains keyed by (first arc, end vertex) (`first`), and
/// last-arc-bounded gains keyed by (start vertex, last arc) (`last`).
#[derive(Clone, Debug)]
pub struct BoundedPathStore {
    pub mono: Matrix<Gain>,
    pub first: Cube<Gain>,
    pub last: Cube<Gain>,
    pub mono_wit: Option<Matrix<NodeId>>,
    pub first_wit: Option<Cube<NodeId>>,
    pub last_wit: Option<Cube<NodeId>>,
}

impl BoundedPathStore {
    pub fn empty(n: usize, witnesses: bool) -> Self {
        BoundedPathStore {
            mono: Matrix::filled(n, Gain::NegInf),
            first: Cube::filled(n, Gain::NegInf),
            last: Cube::filled(n, Gain::NegInf),
            mono_wit: witnesses.then(|| Matrix::filled(n, NO_NODE)),
            first_wit: witnesses.then(|| Cube::filled(n, NO_NODE)),
            last_wit: witnesses.then(|| Cube::filled(n, NO_NODE)),
        }
    }

    pub fn n(&self) -> usize {
        self.mono.n()
    }
}

/// Tables a store entry can live in, for witness checking and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Mono,
    First,
    Last,
}
