//! Energy graphs, paths and charge-drop schedules.

use crate::gain::Gain;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("battery capacity must be positive, got {0}")]
    InvalidCapacity(i64),
    #[error("no arc {0} -> {1}")]
    NoSuchArc(usize, usize),
    #[error("schedule length {schedule} does not match path length {path}")]
    ScheduleShape { path: usize, schedule: usize },
    #[error("schedule must start with a zero drop and stay nonnegative")]
    InvalidSchedule,
    #[error("initial charge {0} outside [0, {1}]")]
    InvalidCharge(i64, i64),
    #[error("a path needs at least one vertex")]
    EmptyPath,
    #[error("vertex {0} out of range for n={1}")]
    VertexOutOfRange(usize, usize),
}

/// A directed graph with battery capacity `B` and a dense gain matrix;
/// `NegInf` entries mean "no arc".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyGraph {
    n: usize,
    capacity: i64,
    gains: Vec<Gain>,
}

impl EnergyGraph {
    pub fn new(n: usize, capacity: i64) -> Result<Self, GraphError> {
        if capacity <= 0 {
            return Err(GraphError::InvalidCapacity(capacity));
        }
        Ok(EnergyGraph {
            n,
            capacity,
            gains: vec![Gain::NegInf; n * n],
        })
    }

    /// Builds a path graph `v0 -> v1 -> ...` with the given arc gains.
    pub fn path_graph(arc_gains: &[i64], capacity: i64) -> Result<Self, GraphError> {
        let mut g = EnergyGraph::new(arc_gains.len() + 1, capacity)?;
        for (i, &w) in arc_gains.iter().enumerate() {
            g.set_gain(i, i + 1, Gain::Finite(w));
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    #[inline]
    pub fn gain(&self, u: usize, v: usize) -> Gain {
        self.gains[u * self.n + v]
    }

    #[inline]
    pub fn set_gain(&mut self, u: usize, v: usize, g: Gain) {
        self.gains[u * self.n + v] = g;
    }

    /// Keeps the larger gain when an arc is set twice.
    pub fn add_arc_max(&mut self, u: usize, v: usize, g: i64) {
        let cur = self.gain(u, v);
        self.set_gain(u, v, cur.max(Gain::Finite(g)));
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (0..self.n).flat_map(move |u| {
            (0..self.n).filter_map(move |v| self.gain(u, v).finite().map(|g| (u, v, g)))
        })
    }

    pub fn arc_count(&self) -> usize {
        self.gains.iter().filter(|g| g.is_finite()).count()
    }

    /// Normal form: arcs below `-B` are unusable and removed, arcs above `B`
    /// are equivalent to `B`. Self-loops are treated like any other arc.
    pub fn normalize(mut self) -> Result<Self, GraphError> {
        if self.capacity <= 0 {
            return Err(GraphError::InvalidCapacity(self.capacity));
        }
        let b = self.capacity;
        for g in &mut self.gains {
            if let Gain::Finite(v) = *g {
                if v < -b {
                    *g = Gain::NegInf;
                } else if v > b {
                    *g = Gain::Finite(b);
                }
            }
        }
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        let b = self.capacity;
        self.gains
            .iter()
            .all(|g| g.finite().map_or(true, |v| -b <= v && v <= b))
    }

    /// The reverse graph, used for minimum-initial-charge via the identity
    /// beta_0(s,t) = B - reverse_alpha_B(t,s).
    pub fn reversed(&self) -> EnergyGraph {
        let mut r = EnergyGraph {
            n: self.n,
            capacity: self.capacity,
            gains: vec![Gain::NegInf; self.n * self.n],
        };
        for u in 0..self.n {
            for v in 0..self.n {
                r.set_gain(v, u, self.gain(u, v));
            }
        }
        r
    }
}

/// A walk through the graph; vertices may repeat (optimal paths need not be
/// simple).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(vertices: Vec<usize>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        Ok(Path(vertices))
    }

    #[inline]
    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Number of arcs.
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// Checks that every consecutive pair is a real arc of `g`.
    pub fn validate(&self, g: &EnergyGraph) -> Result<(), GraphError> {
        for &v in &self.0 {
            if v >= g.n() {
                return Err(GraphError::VertexOutOfRange(v, g.n()));
            }
        }
        for w in self.0.windows(2) {
            if !g.gain(w[0], w[1]).is_finite() {
                return Err(GraphError::NoSuchArc(w[0], w[1]));
            }
        }
        Ok(())
    }

    pub fn arc_gains(&self, g: &EnergyGraph) -> Result<Vec<i64>, GraphError> {
        self.validate(g)?;
        Ok(self
            .0
            .windows(2)
            .map(|w| g.gain(w[0], w[1]).expect_finite())
            .collect())
    }
}

impl From<Vec<usize>> for Path {
    fn from(v: Vec<usize>) -> Self {
        Path::new(v).expect("nonempty vertex sequence")
    }
}

/// Nonnegative charge amounts voluntarily discarded at each path vertex.
/// The first entry is always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeDropSchedule(Vec<i64>);

impl ChargeDropSchedule {
    pub fn new(drops: Vec<i64>) -> Result<Self, GraphError> {
        if drops.is_empty() || drops[0] != 0 || drops.iter().any(|&d| d < 0) {
            return Err(GraphError::InvalidSchedule);
        }
        Ok(ChargeDropSchedule(drops))
    }

    pub fn zero(path: &Path) -> Self {
        ChargeDropSchedule(vec![0; path.vertices().len()])
    }

    #[inline]
    pub fn drops(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn matches(&self, path: &Path) -> Result<(), GraphError> {
        if self.0.len() != path.vertices().len() {
            return Err(GraphError::ScheduleShape {
                path: path.vertices().len(),
                schedule: self.0.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_clips_per_capacity() {
        // B=10: -12 is unusable, 15 caps at 10, -10 is kept.
        let mut g = EnergyGraph::new(3, 10).unwrap();
        g.set_gain(0, 1, Gain::Finite(-12));
        g.set_gain(1, 2, Gain::Finite(15));
        g.set_gain(2, 0, Gain::Finite(-10));
        let g = g.normalize().unwrap();
        assert_eq!(g.gain(0, 1), Gain::NegInf);
        assert_eq!(g.gain(1, 2), Gain::Finite(10));
        assert_eq!(g.gain(2, 0), Gain::Finite(-10));
        assert!(g.is_normalized());
    }

    #[test]
    fn normalize_rejects_nonpositive_capacity() {
        assert_eq!(
            EnergyGraph::new(2, 0).unwrap_err(),
            GraphError::InvalidCapacity(0)
        );
    }

    #[test]
    fn reversed_flips_arcs() {
        let g = EnergyGraph::path_graph(&[3, -4], 10).unwrap();
        let r = g.reversed();
        assert_eq!(r.gain(1, 0), Gain::Finite(3));
        assert_eq!(r.gain(2, 1), Gain::Finite(-4));
        assert_eq!(r.gain(0, 1), Gain::NegInf);
    }

    #[test]
    fn schedule_must_start_at_zero() {
        assert!(ChargeDropSchedule::new(vec![1, 0]).is_err());
        assert!(ChargeDropSchedule::new(vec![0, -1]).is_err());
        assert!(ChargeDropSchedule::new(vec![0, 3]).is_ok());
    }

    #[test]
    fn path_repeated_vertices_allowed() {
        let mut g = EnergyGraph::new(2, 5).unwrap();
        g.set_gain(0, 1, Gain::Finite(3));
        g.set_gain(1, 0, Gain::Finite(-1));
        let p = Path::new(vec![0, 1, 0, 1]).unwrap();
        assert!(p.validate(&g).is_ok());
        assert_eq!(p.len(), 3);
    }
}
