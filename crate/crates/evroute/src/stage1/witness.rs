//! Witness provenance for shortcut and bounded-path table entries.
//!
//! Every table write records which pseudocode assignment produced it and
//! which operands it combined. A witness expands at two levels:
//!
//! * level 1: a path over the arcs of the pass's own shortcut graph, with a
//!   charge-drop schedule. Against the pass's input table the path must be of
//!   the exact class the table claims (monotone for the shortcut table,
//!   first/last-arc-bounded for the bounded-path tables) with matching gain.
//! * full: arcs of the shortcut graph recursively unwrap through earlier
//!   passes down to a concrete path and schedule in the input graph. The
//!   unwrapped path keeps the junction gains of every level, so it is
//!   traversable, has the recorded gain, and stays inside the envelope of its
//!   level-1 gains; full monotonicity in the input graph is not preserved in
//!   general and is not claimed.

use crate::gain::Gain;
use crate::graph::{ChargeDropSchedule, EnergyGraph, Path};
use crate::table::Matrix;
use thiserror::Error;

pub type NodeId = u32;
pub const NO_NODE: NodeId = u32::MAX;

/// Which pseudocode assignment produced an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    BaseArc,
    Diagonal,
    InitArc,
    TrivAsc2,
    TrivDesc2,
    TrivAsc3,
    TrivDesc3,
    ShortAsc,
    ShortDescDirect,
    ShortDescDropEnd,
    ShortDescDropMid,
    BreadthFirst,
    BreadthLast,
    ConcatFirst,
    ConcatLast,
    ConcatOppFirst,
    ConcatOppFirstZero,
    ConcatOppLast,
    ConcatOppLastZero,
    ExtDescFirst,
    ExtDescDropFirst,
    ExtAscFirst,
    ExtDescLast,
    ExtDescDropLast,
    ExtAscLast,
}

impl Rule {
    /// Which table this rule writes into.
    pub fn table_kind(self) -> crate::stage1::TableKind {
        use crate::stage1::TableKind::*;
        match self {
            Rule::BreadthFirst
            | Rule::ConcatFirst
            | Rule::ConcatOppFirst
            | Rule::ConcatOppFirstZero => First,
            Rule::BreadthLast
            | Rule::ConcatLast
            | Rule::ConcatOppLast
            | Rule::ConcatOppLastZero => Last,
            _ => Mono,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    /// The empty path at a vertex (diagonal entries).
    SingleVertex(u32),
    /// An arc of the input graph.
    BaseArc(u32, u32),
    /// Arc (x, y) of the current pass's shortcut graph; `inner` is the
    /// witness of that shortcut-table entry from an earlier pass.
    MArc { x: u32, y: u32, inner: NodeId },
    /// Left-to-right concatenation; `pieces[i].1` is an extra charge drop at
    /// the final vertex of piece i. The skip flags cut one bounding arc off
    /// the level-1 path (used when an ascending path starts or ends inside
    /// an arc-bounded one).
    Chain {
        pieces: Vec<(NodeId, i64)>,
        skip_first_arc: bool,
        skip_last_arc: bool,
    },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub rule: Rule,
    pub pass: u32,
    pub value: Gain,
    pub kind: Kind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness expansion exceeds cap of {0} arcs")]
    TooLong(usize),
    #[error("entry has no recorded witness")]
    Missing,
}

#[derive(Clone, Debug, Default)]
pub struct WitnessArena {
    nodes: Vec<Node>,
    /// Input shortcut matrix of each pass; index 0 holds the base graph
    /// gains. Level-1 witnesses of pass p are paths over `snapshots[p]`.
    pub snapshots: Vec<Matrix<Gain>>,
}

/// A path plus schedule produced by expansion, before being wrapped into the
/// public types.
type RawPath = (Vec<usize>, Vec<i64>);

impl WitnessArena {
    pub fn new(g: &EnergyGraph) -> Self {
        let n = g.n();
        let mut snap = Matrix::filled(n, Gain::NegInf);
        for u in 0..n {
            for v in 0..n {
                snap.set(u, v, g.gain(u, v));
            }
        }
        WitnessArena {
            nodes: Vec::new(),
            snapshots: vec![snap],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn alloc(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        id
    }

    /// Registers the input matrix of a new pass and returns the pass id.
    pub fn begin_pass(&mut self, m: &Matrix<Gain>) -> u32 {
        self.snapshots.push(m.clone());
        (self.snapshots.len() - 1) as u32
    }

    /// Level-1 path of a node: vertices and drops over the arcs of its
    /// pass's shortcut graph, plus the witness node backing each arc.
    pub fn level1(&self, id: NodeId) -> (Vec<usize>, Vec<i64>, Vec<NodeId>) {
        let node = self.node(id);
        match &node.kind {
            Kind::SingleVertex(v) => (vec![*v as usize], vec![0], vec![]),
            Kind::BaseArc(u, v) => (vec![*u as usize, *v as usize], vec![0, 0], vec![id]),
            Kind::MArc { x, y, .. } => (vec![*x as usize, *y as usize], vec![0, 0], vec![id]),
            Kind::Chain {
                pieces,
                skip_first_arc,
                skip_last_arc,
            } => {
                let mut verts: Vec<usize> = Vec::new();
                let mut drops: Vec<i64> = Vec::new();
                let mut wits: Vec<NodeId> = Vec::new();
                for (i, &(piece, extra)) in pieces.iter().enumerate() {
                    let (mut pv, mut pd, mut pw) = self.level1(piece);
                    if i == 0 && *skip_first_arc {
                        pv.remove(0);
                        pd.remove(0);
                        pw.remove(0);
                        debug_assert_eq!(pd.first().copied(), Some(0));
                        if let Some(d) = pd.first_mut() {
                            *d = 0;
                        }
                    }
                    if i == pieces.len() - 1 && *skip_last_arc {
                        pv.pop();
                        pd.pop();
                        pw.pop();
                    }
                    if verts.is_empty() {
                        verts = pv;
                        drops = pd;
                        wits = pw;
                    } else {
                        debug_assert_eq!(*verts.last().unwrap(), pv[0]);
                        verts.extend_from_slice(&pv[1..]);
                        *drops.last_mut().unwrap() += pd[0];
                        drops.extend_from_slice(&pd[1..]);
                        wits.extend_from_slice(&pw);
                    }
                    *drops.last_mut().unwrap() += extra;
                }
                (verts, drops, wits)
            }
        }
    }

    /// Fully unwraps a node to a path and schedule in the base graph;
    /// errors out (not a soundness failure) past `cap` arcs.
    pub fn expand_full(&self, id: NodeId, cap: usize) -> Result<RawPath, WitnessError> {
        let mut budget = cap;
        self.expand_full_inner(id, &mut budget)
    }

    fn expand_full_inner(&self, id: NodeId, budget: &mut usize) -> Result<RawPath, WitnessError> {
        let node = self.node(id);
        match &node.kind {
            Kind::SingleVertex(v) => Ok((vec![*v as usize], vec![0])),
            Kind::BaseArc(u, v) => {
                if *budget == 0 {
                    return Err(WitnessError::TooLong(0));
                }
                *budget -= 1;
                Ok((vec![*u as usize, *v as usize], vec![0, 0]))
            }
            Kind::MArc { inner, .. } => self.expand_full_inner(*inner, budget),
            Kind::Chain { .. } => {
                let (verts, drops, wits) = self.level1(id);
                let mut out_v: Vec<usize> = vec![verts[0]];
                let mut out_d: Vec<i64> = vec![drops[0]];
                for (i, &w) in wits.iter().enumerate() {
                    let (pv, pd) = self.expand_full_inner(w, budget)?;
                    debug_assert_eq!(*out_v.last().unwrap(), pv[0]);
                    out_v.extend_from_slice(&pv[1..]);
                    *out_d.last_mut().unwrap() += pd[0];
                    out_d.extend_from_slice(&pd[1..]);
                    *out_d.last_mut().unwrap() += drops[i + 1];
                }
                Ok((out_v, out_d))
            }
        }
    }

    /// Public unwrap: path and schedule in the base graph.
    pub fn unwrap_witness(
        &self,
        id: NodeId,
        cap: usize,
    ) -> Result<(Path, ChargeDropSchedule), WitnessError> {
        let (verts, drops) = self.expand_full(id, cap).map_err(|_| WitnessError::TooLong(cap))?;
        Ok((
            Path::new(verts).expect("witness paths are nonempty"),
            ChargeDropSchedule::new(drops).expect("witness schedules are valid"),
        ))
    }

    /// Level-1 path as public types, together with the pass's input matrix
    /// viewed as a graph (capacity `b`), for exact class checking.
    pub fn level1_witness(
        &self,
        id: NodeId,
        b: i64,
    ) -> (EnergyGraph, Path, ChargeDropSchedule) {
        let node = self.node(id);
        let snap = &self.snapshots[node.pass as usize];
        let n = snap.n();
        let mut g = EnergyGraph::new(n, b).expect("positive capacity");
        for u in 0..n {
            for v in 0..n {
                g.set_gain(u, v, snap.at(u, v));
            }
        }
        let (verts, drops, _) = self.level1(id);
        (
            g,
            Path::new(verts).expect("nonempty"),
            ChargeDropSchedule::new(drops).expect("valid schedule"),
        )
    }
}

/// Outcome of a witness check: verified, or legitimately skipped because the
/// expansion exceeds the cap (pumped cycle entries get astronomically long).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    Verified,
    TooLong,
}

/// Verifies one table entry's witness end to end.
///
/// Level 1: the path over the pass's own shortcut graph must be of the exact
/// table class (monotone / first-arc-bounded / last-arc-bounded) with gain
/// equal to the stored value (at least the stored value for the last table).
///
/// Full level: the unwrapped path in the input graph must be a real path,
/// keep the same scheduled gain, be traversable, stay inside the envelope of
/// its level-1 gains, satisfy the final-charge promise of its class, and be
/// strongly traversable for nonnegative monotone entries.
pub fn verify_entry(
    arena: &WitnessArena,
    id: NodeId,
    kind: crate::stage1::TableKind,
    stored: Gain,
    g: &EnergyGraph,
    cap: usize,
) -> Result<WitnessCheck, String> {
    use crate::classify::{
        alpha_path, arc_bounded_kind, classify_monotone, prefix_gains, ArcBoundedKind,
        Monotonicity,
    };
    use crate::stage1::TableKind;

    if id == NO_NODE {
        return Err("entry has no witness".into());
    }
    let stored_v = stored
        .finite()
        .ok_or_else(|| "stored value is -inf".to_string())?;
    let b = g.capacity();

    // Level 1.
    let (gm, path, sched) = arena.level1_witness(id, b);
    path.validate(&gm)
        .map_err(|e| format!("level-1 path invalid: {e}"))?;
    let l1_gains =
        prefix_gains(&gm, &path, &sched).map_err(|e| format!("level-1 gains: {e}"))?;
    let l1_gain = *l1_gains.last().unwrap();
    // Stored values saturate while level-1 sums are exact, so equality can
    // only be demanded safely below the saturation horizon; past it the
    // sound direction (witness gain at least the stored value) remains.
    let exactness = crate::gain::GAIN_SATURATION / 4;
    let gain_ok = |want_exact: bool| -> Result<(), String> {
        if want_exact && stored_v.abs() < exactness && l1_gain.abs() < exactness {
            if l1_gain != stored_v {
                return Err(format!("level-1 gain {l1_gain} != stored {stored_v}"));
            }
        } else if l1_gain < stored_v {
            return Err(format!("level-1 gain {l1_gain} < stored {stored_v}"));
        }
        Ok(())
    };
    match kind {
        TableKind::Mono => {
            gain_ok(true)?;
            let mono = classify_monotone(&gm, &path, &sched)
                .map_err(|e| format!("level-1 classify: {e}"))?;
            if mono == Monotonicity::NotMonotone {
                return Err("level-1 path not monotone".into());
            }
        }
        TableKind::First => {
            gain_ok(true)?;
            let kind1 = arc_bounded_kind(&gm, &path, &sched)
                .map_err(|e| format!("level-1 classify: {e}"))?;
            if !matches!(
                kind1,
                ArcBoundedKind::FirstArcBounded | ArcBoundedKind::BothArcBounded
            ) {
                return Err(format!("level-1 path not first-arc-bounded ({kind1:?})"));
            }
        }
        TableKind::Last => {
            gain_ok(false)?;
            let kind1 = arc_bounded_kind(&gm, &path, &sched)
                .map_err(|e| format!("level-1 classify: {e}"))?;
            if !matches!(
                kind1,
                ArcBoundedKind::LastArcBounded | ArcBoundedKind::BothArcBounded
            ) {
                return Err(format!("level-1 path not last-arc-bounded ({kind1:?})"));
            }
        }
    }

    // Full unwrap.
    let (fp, fs) = match arena.unwrap_witness(id, cap) {
        Ok(x) => x,
        Err(WitnessError::TooLong(_)) => return Ok(WitnessCheck::TooLong),
        Err(e) => return Err(e.to_string()),
    };
    fp.validate(g)
        .map_err(|e| format!("unwrapped path invalid in G: {e}"))?;
    let full_gains = prefix_gains(g, &fp, &fs).map_err(|e| format!("full gains: {e}"))?;
    let full_gain = *full_gains.last().unwrap();
    if full_gain != l1_gain {
        return Err(format!("full gain {full_gain} != level-1 gain {l1_gain}"));
    }
    let alpha_full = alpha_path(g, &fp, b).map_err(|e| e.to_string())?;
    if alpha_full == Gain::NegInf {
        return Err("unwrapped path not traversable".into());
    }
    // Final-charge promises: the facts Stage II consumes. Unwrapped paths
    // are generally not monotone in G (expanded pieces may peak above the
    // scheduled envelope before a drop), but clipping at B makes the real
    // charge dominate the scheduled bookkeeping.
    let arcs = path.arc_gains(&gm).map_err(|e| e.to_string())?;
    match kind {
        TableKind::Mono => {
            let promised = Gain::Finite(b + stored_v.min(0));
            if alpha_full < promised {
                return Err(format!("alpha_B promise broken: {alpha_full} < {promised}"));
            }
            if stored_v >= 0
                && alpha_path(g, &fp, 0).map_err(|e| e.to_string())? == Gain::NegInf
            {
                return Err("nonnegative monotone entry not strongly traversable".into());
            }
        }
        TableKind::First => {
            // Bounding arc of the level-1 path.
            if arcs[0] <= 0 {
                let promised = Gain::Finite(b + stored_v);
                if alpha_full < promised {
                    return Err(format!(
                        "alpha_B promise broken: {alpha_full} < {promised}"
                    ));
                }
            } else if alpha_path(g, &fp, 0).map_err(|e| e.to_string())? == Gain::NegInf {
                return Err("positive-bounded entry not strongly traversable".into());
            }
        }
        TableKind::Last => {
            let lam = *arcs.last().unwrap();
            if lam <= 0 {
                // alpha_b >= min(b + gain, B + last-arc gain) for negative
                // last-arc-bounded paths.
                let promised = Gain::Finite((b + stored_v).min(b + lam));
                if alpha_full < promised {
                    return Err(format!(
                        "alpha_B promise broken: {alpha_full} < {promised}"
                    ));
                }
            }
        }
    }
    Ok(WitnessCheck::Verified)
}
