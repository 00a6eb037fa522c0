//! Executable versions of the structural path definitions: scheduled gains,
//! maximum final charge along a fixed path, monotone / arc-bounded
//! classification, funnels and the greedy funnel decomposition.

use crate::gain::{Charge, Gain};
use crate::graph::{ChargeDropSchedule, EnergyGraph, GraphError, Path};

/// Scheduled prefix gains: entry `i` is the gain at vertex `v_{i+1}` with
/// respect to the path and schedule (sum of arc gains so far minus drops so
/// far). The first entry is always 0.
pub fn prefix_gains(
    g: &EnergyGraph,
    path: &Path,
    schedule: &ChargeDropSchedule,
) -> Result<Vec<i64>, GraphError> {
    schedule.matches(path)?;
    let arcs = path.arc_gains(g)?;
    let drops = schedule.drops();
    let mut out = Vec::with_capacity(arcs.len() + 1);
    let mut acc = 0i64;
    out.push(0);
    for (i, &a) in arcs.iter().enumerate() {
        acc += a - drops[i + 1];
        out.push(acc);
    }
    Ok(out)
}

pub fn prefix_gains_zero(g: &EnergyGraph, path: &Path) -> Result<Vec<i64>, GraphError> {
    prefix_gains(g, path, &ChargeDropSchedule::zero(path))
}

/// Gain of the whole path with respect to the schedule.
pub fn scheduled_gain(
    g: &EnergyGraph,
    path: &Path,
    schedule: &ChargeDropSchedule,
) -> Result<i64, GraphError> {
    Ok(*prefix_gains(g, path, schedule)?.last().unwrap())
}

/// A path is traversable iff no subpath loses more than `B`, i.e. starting
/// with a full battery the charge never goes negative. Zero-schedule gains.
fn traversable(prefix_zero: &[i64], b: i64) -> bool {
    let mut running_max = 0i64;
    for &g in prefix_zero {
        if g - running_max < -b {
            return false;
        }
        running_max = running_max.max(g);
    }
    true
}

pub fn is_traversable(g: &EnergyGraph, path: &Path) -> Result<bool, GraphError> {
    Ok(traversable(&prefix_gains_zero(g, path)?, g.capacity()))
}

/// Maximum final charge when traversing exactly `path` starting with charge
/// `b`. Closed form: `-inf` iff some prefix gain is below `-b` or some
/// subpath gain is below `-B`; otherwise `min{B, b + g_max} + (g(P) - g_max)`
/// where `g_max` is the largest prefix gain.
pub fn alpha_path(g: &EnergyGraph, path: &Path, b: i64) -> Result<Charge, GraphError> {
    let cap = g.capacity();
    if b < 0 || b > cap {
        return Err(GraphError::InvalidCharge(b, cap));
    }
    let pg = prefix_gains_zero(g, path)?;
    if pg.iter().any(|&x| x < -b) || !traversable(&pg, cap) {
        return Ok(Gain::NegInf);
    }
    let g_max = *pg.iter().max().unwrap();
    let g_total = *pg.last().unwrap();
    Ok(Gain::Finite((cap.min(b + g_max)) + (g_total - g_max)))
}

/// Arc-by-arc simulation with clipping at `B` and failure below 0. Must
/// agree with [`alpha_path`]; kept as the independent cross-check.
pub fn simulate_alpha(g: &EnergyGraph, path: &Path, b: i64) -> Result<Charge, GraphError> {
    let cap = g.capacity();
    if b < 0 || b > cap {
        return Err(GraphError::InvalidCharge(b, cap));
    }
    let arcs = path.arc_gains(g)?;
    let mut c = b;
    for a in arcs {
        if c + a < 0 {
            return Ok(Gain::NegInf);
        }
        c = (c + a).min(cap);
    }
    Ok(Gain::Finite(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Ascending,
    Descending,
    NotMonotone,
}

/// Monotone classification with respect to a schedule. Ascending: the path
/// is traversable and every scheduled gain lies in `[0, g^C(P)]` with the
/// start at the minimum and the end at the maximum. Descending is the mirror
/// image. A single-vertex path counts as ascending.
pub fn classify_monotone(
    g: &EnergyGraph,
    path: &Path,
    schedule: &ChargeDropSchedule,
) -> Result<Monotonicity, GraphError> {
    let pg = prefix_gains(g, path, schedule)?;
    if !traversable(&prefix_gains_zero(g, path)?, g.capacity()) {
        return Ok(Monotonicity::NotMonotone);
    }
    let last = *pg.last().unwrap();
    if pg.iter().all(|&x| 0 <= x && x <= last) {
        return Ok(Monotonicity::Ascending);
    }
    if pg.iter().all(|&x| last <= x && x <= 0) {
        return Ok(Monotonicity::Descending);
    }
    Ok(Monotonicity::NotMonotone)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcBoundedKind {
    FirstArcBounded,
    LastArcBounded,
    BothArcBounded,
    NotArcBounded,
}

/// Arc-bounded classification with respect to a schedule.
///
/// First-arc-bounded requires no drop at the second vertex; every scheduled
/// gain must lie between 0 and the gain of the first arc (either order,
/// depending on the arc's sign). Last-arc-bounded requires no drop at the
/// last two vertices and bounds every gain between the gains of the last two
/// vertices. Single-vertex paths are not arc-bounded.
pub fn arc_bounded_kind(
    g: &EnergyGraph,
    path: &Path,
    schedule: &ChargeDropSchedule,
) -> Result<ArcBoundedKind, GraphError> {
    let pg = prefix_gains(g, path, schedule)?;
    let k = pg.len();
    if k < 2 {
        return Ok(ArcBoundedKind::NotArcBounded);
    }
    let drops = schedule.drops();
    let arcs = path.arc_gains(g)?;

    let first = if drops[1] != 0 {
        false
    } else {
        let a1 = arcs[0];
        if a1 >= 0 {
            pg.iter().all(|&x| 0 <= x && x <= a1)
        } else {
            pg.iter().all(|&x| a1 <= x && x <= 0)
        }
    };

    let last = if drops[k - 1] != 0 || drops[k - 2] != 0 {
        false
    } else {
        let (lo, hi) = (pg[k - 2].min(pg[k - 1]), pg[k - 2].max(pg[k - 1]));
        // With no drops on the last two vertices the scheduled gain of the
        // last arc equals its raw gain; the sign split of the definition is
        // exactly "which endpoint is the upper bound".
        pg.iter().all(|&x| lo <= x && x <= hi)
    };

    Ok(match (first, last) {
        (true, true) => ArcBoundedKind::BothArcBounded,
        (true, false) => ArcBoundedKind::FirstArcBounded,
        (false, true) => ArcBoundedKind::LastArcBounded,
        (false, false) => ArcBoundedKind::NotArcBounded,
    })
}

/// True iff the path is arc-bounded (zero schedule) and contains no monotone
/// subpath of 2 or 3 arcs. Single-vertex paths are not funnels.
pub fn is_funnel(g: &EnergyGraph, path: &Path) -> Result<bool, GraphError> {
    let zero = ChargeDropSchedule::zero(path);
    if arc_bounded_kind(g, path, &zero)? == ArcBoundedKind::NotArcBounded {
        return Ok(false);
    }
    Ok(!has_short_monotone_subpath(g, path)?)
}

/// Scans all 2- and 3-arc windows for a zero-schedule monotone subpath.
pub fn has_short_monotone_subpath(g: &EnergyGraph, path: &Path) -> Result<bool, GraphError> {
    let verts = path.vertices();
    for len in [2usize, 3] {
        if verts.len() < len + 1 {
            continue;
        }
        for start in 0..=verts.len() - len - 1 {
            let sub = Path::new(verts[start..start + len + 1].to_vec()).unwrap();
            let zero = ChargeDropSchedule::zero(&sub);
            if classify_monotone(g, &sub, &zero)? != Monotonicity::NotMonotone {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The zig-zag characterization of funnels on raw arc gains: alternating
/// signs, all nonzero, and magnitudes forming a chain that is weakly then
/// strictly monotone from one bounding end.
pub fn funnel_zigzag(arc_gains: &[i64]) -> bool {
    if arc_gains.is_empty() || arc_gains.iter().any(|&a| a == 0) {
        return false;
    }
    let alternating = arc_gains
        .windows(2)
        .all(|w| (w[0] > 0) != (w[1] > 0));
    if !alternating {
        return false;
    }
    let mags: Vec<i64> = arc_gains.iter().map(|a| a.abs()).collect();
    let k = mags.len();
    // First-arc-bounded direction: |g1| >= |g2| > |g3| > ... > |gk|.
    let first_dir = k == 1
        || (mags[0] >= mags[1] && mags[1..].windows(2).all(|w| w[0] > w[1]));
    // Last-arc-bounded direction, mirrored.
    let last_dir = k == 1
        || (mags[k - 1] >= mags[k - 2] && mags[..k - 1].windows(2).all(|w| w[0] < w[1]));
    first_dir || last_dir
}

/// Aggregated classification of one (path, schedule) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathClass {
    pub monotone: Monotonicity,
    pub arc_bounded: ArcBoundedKind,
    pub is_funnel: bool,
}

pub fn classify_path(
    g: &EnergyGraph,
    path: &Path,
    schedule: &ChargeDropSchedule,
) -> Result<PathClass, GraphError> {
    Ok(PathClass {
        monotone: classify_monotone(g, path, schedule)?,
        arc_bounded: arc_bounded_kind(g, path, schedule)?,
        is_funnel: is_funnel(g, path)?,
    })
}

/// Greedy decomposition into inclusion-maximal funnels: the first piece is
/// the longest funnel starting at the first arc; each next piece is the
/// maximal funnel with the largest right end that contains the first arc not
/// yet covered. Consecutive pieces overlap by at most two arcs.
pub fn funnel_decomposition(g: &EnergyGraph, path: &Path) -> Result<Vec<Path>, GraphError> {
    path.validate(g)?;
    let verts = path.vertices();
    let k = path.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let sub = |lo: usize, hi: usize| Path::new(verts[lo..=hi + 1].to_vec()).unwrap();
    let is_f = |lo: usize, hi: usize| -> Result<bool, GraphError> { is_funnel(g, &sub(lo, hi)) };

    let mut pieces = Vec::new();
    // Arc indices are 0-based; `covered` is the first uncovered arc.
    let mut covered = 0usize;
    while covered < k {
        // Largest right end r such that arcs covered..=r form a funnel
        // (every funnel containing the arc restricts to one starting there).
        let mut r = covered;
        while r + 1 < k && is_f(covered, r + 1)? {
            r += 1;
        }
        // Extend left as far as the funnel property allows.
        let mut l = covered;
        while l > 0 && is_f(l - 1, r)? {
            l -= 1;
        }
        pieces.push(sub(l, r));
        covered = r + 1;
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_of(len_arcs: usize) -> Path {
        Path::new((0..=len_arcs).collect()).unwrap()
    }

    fn on_path(gains: &[i64], b: i64) -> (EnergyGraph, Path) {
        let g = EnergyGraph::path_graph(gains, b).unwrap();
        let p = path_of(gains.len());
        (g, p)
    }

    #[test]
    fn prefix_gains_direct_sum() {
        let (g, p) = on_path(&[5, -5], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(prefix_gains(&g, &p, &zero).unwrap(), vec![0, 5, 0]);
    }

    #[test]
    fn prefix_gains_with_drops() {
        let (g, p) = on_path(&[-5, 2, -1], 10);
        let c = ChargeDropSchedule::new(vec![0, 0, 0, 1]).unwrap();
        assert_eq!(prefix_gains(&g, &p, &c).unwrap(), vec![0, -5, -3, -5]);
    }

    #[test]
    fn prefix_gains_single_vertex() {
        let g = EnergyGraph::new(1, 5).unwrap();
        let p = Path::new(vec![0]).unwrap();
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(prefix_gains(&g, &p, &zero).unwrap(), vec![0]);
    }

    #[test]
    fn prefix_gains_errors() {
        let (g, p) = on_path(&[1], 5);
        let bad = ChargeDropSchedule::new(vec![0]).unwrap();
        assert!(matches!(
            prefix_gains(&g, &p, &bad),
            Err(GraphError::ScheduleShape { .. })
        ));
        let q = Path::new(vec![1, 0]).unwrap();
        let zero = ChargeDropSchedule::zero(&q);
        assert_eq!(
            prefix_gains(&g, &q, &zero),
            Err(GraphError::NoSuchArc(1, 0))
        );
    }

    #[test]
    fn alpha_path_paper_two_path_example() {
        let (g, p) = on_path(&[5, -5], 10);
        assert_eq!(alpha_path(&g, &p, 10).unwrap(), Gain::Finite(5));
        let (g, p) = on_path(&[-5, 5], 10);
        assert_eq!(alpha_path(&g, &p, 0).unwrap(), Gain::NegInf);
    }

    #[test]
    fn alpha_path_single_vertex() {
        let g = EnergyGraph::new(1, 10).unwrap();
        let p = Path::new(vec![0]).unwrap();
        assert_eq!(alpha_path(&g, &p, 7).unwrap(), Gain::Finite(7));
    }

    #[test]
    fn alpha_path_rejects_bad_charge() {
        let (g, p) = on_path(&[1], 5);
        assert!(matches!(
            alpha_path(&g, &p, 6),
            Err(GraphError::InvalidCharge(6, 5))
        ));
    }

    #[test]
    fn classify_monotone_examples() {
        let (g, p) = on_path(&[2, -1, 3], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(
            classify_monotone(&g, &p, &zero).unwrap(),
            Monotonicity::Ascending
        );
        let (g, p) = on_path(&[-3, 1, -2], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(
            classify_monotone(&g, &p, &zero).unwrap(),
            Monotonicity::Descending
        );
        let (g, p) = on_path(&[-1, 1], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(
            classify_monotone(&g, &p, &zero).unwrap(),
            Monotonicity::NotMonotone
        );
    }

    #[test]
    fn arc_bounded_examples() {
        let (g, p) = on_path(&[-5, 4, -4], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(
            arc_bounded_kind(&g, &p, &zero).unwrap(),
            ArcBoundedKind::FirstArcBounded
        );
        let (g, p) = on_path(&[2, -3, 4, -5], 10);
        let zero = ChargeDropSchedule::zero(&p);
        assert_eq!(
            arc_bounded_kind(&g, &p, &zero).unwrap(),
            ArcBoundedKind::LastArcBounded
        );
    }

    #[test]
    fn arc_bounded_respects_drop_constraints() {
        // Dropping at the second vertex disqualifies the first-arc kind.
        let (g, p) = on_path(&[-5, 4, -4], 10);
        let c = ChargeDropSchedule::new(vec![0, 1, 0, 0]).unwrap();
        assert_eq!(
            arc_bounded_kind(&g, &p, &c).unwrap(),
            ArcBoundedKind::NotArcBounded
        );
    }

    #[test]
    fn funnel_examples() {
        let (g, p) = on_path(&[-5, 4, -3, 2], 10);
        assert!(is_funnel(&g, &p).unwrap());
        // Whole path descending: contains a 3-arc monotone subpath.
        let (g, p) = on_path(&[-5, 4, -4], 10);
        assert!(!is_funnel(&g, &p).unwrap());
        let (g, p) = on_path(&[-3], 10);
        assert!(is_funnel(&g, &p).unwrap());
    }

    #[test]
    fn zigzag_matches_examples() {
        assert!(funnel_zigzag(&[-5, 4, -3, 2]));
        assert!(!funnel_zigzag(&[-5, 4, -4]));
        assert!(funnel_zigzag(&[-1]));
        assert!(funnel_zigzag(&[3, -7]));
        assert!(!funnel_zigzag(&[2, 3]));
    }

    #[test]
    fn decomposition_examples() {
        let (g, p) = on_path(&[-5, 4, -3, 2], 10);
        let d = funnel_decomposition(&g, &p).unwrap();
        assert_eq!(d, vec![p]);

        let (g, p) = on_path(&[1, 1], 10);
        let d = funnel_decomposition(&g, &p).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].vertices(), &[0, 1]);
        assert_eq!(d[1].vertices(), &[1, 2]);

        let (g, p) = on_path(&[-5, 4, -3, 2, 3], 10);
        let d = funnel_decomposition(&g, &p).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].vertices(), &[0, 1, 2, 3, 4]);
        assert_eq!(d[1].vertices(), &[4, 5]);
    }
}
