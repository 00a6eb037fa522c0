//! The Stage I passes: trivial/short shortcuts, breadth search, the two
//! concatenation procedures, funnel computation and the arc-bounded to
//! monotone extraction.
//!
//! Each pass reads one frozen shortcut table M and improves the bounded-path
//! store D by entrywise max. Range structures snapshot their slice of D when
//! their key pair comes up; later updates within the same pass are visible to
//! direct table reads, which only adds sound updates on top of the frozen
//! semantics.

use super::witness::{Kind, NodeId, Rule, WitnessArena, NO_NODE};
use super::{BoundedPathStore, ShortcutTable};
use crate::gain::Gain;
use crate::range_tree::MaxRangeTree2D;
use crate::table::Matrix;

/// Witness bookkeeping for one pass.
pub(crate) struct PassCtx<'a> {
    pub arena: Option<&'a mut WitnessArena>,
    pub pass: u32,
    marc_cache: Matrix<NodeId>,
}

impl<'a> PassCtx<'a> {
    pub fn new(arena: Option<&'a mut WitnessArena>, m: &ShortcutTable) -> Self {
        let n = m.n();
        let mut ctx = PassCtx {
            arena,
            pass: 0,
            marc_cache: Matrix::filled(n, NO_NODE),
        };
        if let Some(a) = ctx.arena.as_mut() {
            ctx.pass = a.begin_pass(&m.vals);
        }
        ctx
    }

    /// Continues an existing pass (store already initialized against its
    /// snapshot).
    pub fn resume(arena: Option<&'a mut WitnessArena>, pass: u32, n: usize) -> Self {
        PassCtx {
            arena,
            pass,
            marc_cache: Matrix::filled(n, NO_NODE),
        }
    }

    #[inline]
    pub fn recording(&self) -> bool {
        self.arena.is_some()
    }

    /// Witness node for the arc (x, y) of this pass's shortcut graph.
    fn marc(&mut self, m: &ShortcutTable, x: usize, y: usize) -> NodeId {
        let Some(arena) = self.arena.as_mut() else {
            return NO_NODE;
        };
        let cached = self.marc_cache.at(x, y);
        if cached != NO_NODE {
            return cached;
        }
        let id = arena.alloc(super::witness::Node {
            rule: Rule::InitArc,
            pass: self.pass,
            value: m.at(x, y),
            kind: Kind::MArc {
                x: x as u32,
                y: y as u32,
                inner: m.wit_at(x, y),
            },
        });
        self.marc_cache.set(x, y, id);
        id
    }

    fn chain(
        &mut self,
        rule: Rule,
        value: Gain,
        pieces: Vec<(NodeId, i64)>,
        skip_first_arc: bool,
        skip_last_arc: bool,
    ) -> NodeId {
        let Some(arena) = self.arena.as_mut() else {
            return NO_NODE;
        };
        arena.alloc(super::witness::Node {
            rule,
            pass: self.pass,
            value,
            kind: Kind::Chain {
                pieces,
                skip_first_arc,
                skip_last_arc,
            },
        })
    }
}

/// Initializes D against M: each arc of the shortcut graph seeds the
/// monotone table and both one-arc bounded-path entries.
pub(crate) fn init_ds(m: &ShortcutTable, ctx: &mut PassCtx<'_>, witnesses: bool) -> BoundedPathStore {
    let n = m.n();
    let mut d = BoundedPathStore::empty(n, witnesses);
    for x in 0..n {
        for y in 0..n {
            let v = m.at(x, y);
            if !v.is_finite() {
                continue;
            }
            d.mono.set(x, y, v);
            d.first.set(x, y, y, v);
            d.last.set(x, x, y, v);
            if witnesses {
                let id = ctx.marc(m, x, y);
                d.mono_wit.as_mut().unwrap().set(x, y, id);
                d.first_wit.as_mut().unwrap().set(x, y, y, id);
                d.last_wit.as_mut().unwrap().set(x, x, y, id);
            }
        }
    }
    d
}

fn raise_mono(d: &mut BoundedPathStore, x: usize, y: usize, v: Gain, wit: NodeId) -> bool {
    if v > d.mono.at(x, y) {
        d.mono.set(x, y, v);
        if let Some(w) = d.mono_wit.as_mut() {
            w.set(x, y, wit);
        }
        true
    } else {
        false
    }
}

fn raise_first(
    d: &mut BoundedPathStore,
    x: usize,
    y: usize,
    z: usize,
    v: Gain,
    wit: NodeId,
) -> bool {
    if v > d.first.at(x, y, z) {
        d.first.set(x, y, z, v);
        if let Some(w) = d.first_wit.as_mut() {
            w.set(x, y, z, wit);
        }
        true
    } else {
        false
    }
}

fn raise_last(
    d: &mut BoundedPathStore,
    x: usize,
    y: usize,
    z: usize,
    v: Gain,
    wit: NodeId,
) -> bool {
    if v > d.last.at(x, y, z) {
        d.last.set(x, y, z, v);
        if let Some(w) = d.last_wit.as_mut() {
            w.set(x, y, z, wit);
        }
        true
    } else {
        false
    }
}

/// 2-shortcuts and the easy 3-shortcuts: ascending when all arc gains are
/// nonnegative, otherwise descending with the charge-drop schedule that
/// cancels every positive arc, guarded by -B.
pub(crate) fn trivial_shortcuts(m: &ShortcutTable, d: &mut BoundedPathStore, ctx: &mut PassCtx<'_>, b: i64) {
    let n = m.n();
    let rec = ctx.recording();
    let mut m2: Matrix<Gain> = Matrix::filled(n, Gain::NegInf);
    let mut m3: Matrix<Gain> = Matrix::filled(n, Gain::NegInf);
    let mut m2w: Matrix<NodeId> = Matrix::filled(if rec { n } else { 0 }, NO_NODE);
    let mut m3w: Matrix<NodeId> = Matrix::filled(if rec { n } else { 0 }, NO_NODE);

    for x in 0..n {
        for y in 0..n {
            let a1 = m.at(x, y);
            let Some(a1v) = a1.finite() else { continue };
            for z in 0..n {
                let a2 = m.at(y, z);
                let Some(a2v) = a2.finite() else { continue };
                if a1v >= 0 && a2v >= 0 {
                    let v = a1 + a2;
                    if v > m2.at(x, z) {
                        m2.set(x, z, v);
                        if rec {
                            let p1 = ctx.marc(m, x, y);
                            let p2 = ctx.marc(m, y, z);
                            let id = ctx.chain(Rule::TrivAsc2, v, vec![(p1, 0), (p2, 0)], false, false);
                            m2w.set(x, z, id);
                        }
                    }
                } else {
                    let v = a1v.min(0) + a2v.min(0);
                    if v >= -b && Gain::Finite(v) > m2.at(x, z) {
                        m2.set(x, z, Gain::Finite(v));
                        if rec {
                            let p1 = ctx.marc(m, x, y);
                            let p2 = ctx.marc(m, y, z);
                            let id = ctx.chain(
                                Rule::TrivDesc2,
                                Gain::Finite(v),
                                vec![(p1, a1v.max(0)), (p2, a2v.max(0))],
                                false,
                                false,
                            );
                            m2w.set(x, z, id);
                        }
                    }
                }
            }
        }
    }

    for x in 0..n {
        for y in 0..n {
            let a1 = m.at(x, y);
            let Some(a1v) = a1.finite() else { continue };
            for z in 0..n {
                let a2 = m2.at(y, z);
                let Some(a2v) = a2.finite() else { continue };
                if a1v >= 0 && a2v >= 0 {
                    let v = a1 + a2;
                    if v > m3.at(x, z) {
                        m3.set(x, z, v);
                        if rec {
                            let p1 = ctx.marc(m, x, y);
                            let id = ctx.chain(
                                Rule::TrivAsc3,
                                v,
                                vec![(p1, 0), (m2w.at(y, z), 0)],
                                false,
                                false,
                            );
                            m3w.set(x, z, id);
                        }
                    }
                } else {
                    // The figure accumulates this descending case back into
                    // the 2-shortcut matrix.
                    let v = a1v.min(0) + a2v.min(0);
                    if v >= -b && Gain::Finite(v) > m2.at(x, z) {
                        m2.set(x, z, Gain::Finite(v));
                        if rec {
                            let id = desc3_witness(m, ctx, &m2w, x, y, z, a1v, v);
                            m2w.set(x, z, id);
                        }
                    }
                }
            }
        }
    }

    for x in 0..n {
        for z in 0..n {
            if m2.at(x, z) > d.mono.at(x, z) {
                let w = if rec { m2w.at(x, z) } else { NO_NODE };
                raise_mono(d, x, z, m2.at(x, z), w);
            }
            if m3.at(x, z) > d.mono.at(x, z) {
                let w = if rec { m3w.at(x, z) } else { NO_NODE };
                raise_mono(d, x, z, m3.at(x, z), w);
            }
        }
    }
}

/// Witness for a descending 3-shortcut built on a 2-shortcut piece. An
/// ascending middle piece must be flattened so the cancel drops land on its
/// individual arcs; a descending piece nests as-is.
fn desc3_witness(
    m: &ShortcutTable,
    ctx: &mut PassCtx<'_>,
    m2w: &Matrix<NodeId>,
    x: usize,
    y: usize,
    z: usize,
    a1v: i64,
    v: i64,
) -> NodeId {
    let p1 = ctx.marc(m, x, y);
    let mid = m2w.at(y, z);
    let mid_info = {
        let arena = ctx.arena.as_ref().unwrap();
        let node = arena.node(mid);
        if node.value >= Gain::ZERO {
            // Ascending 2-shortcut: cancel each of its two arcs separately.
            let Kind::Chain { pieces: inner, .. } = &node.kind else {
                unreachable!("ascending 2-shortcut witnesses are chains");
            };
            let (ya, az) = (inner[0].0, inner[1].0);
            let gya = arena.node(ya).value.expect_finite();
            let gaz = arena.node(az).value.expect_finite();
            Some((ya, gya, az, gaz))
        } else {
            None
        }
    };
    let pieces = match mid_info {
        Some((ya, gya, az, gaz)) => {
            vec![(p1, a1v.max(0)), (ya, gya.max(0)), (az, gaz.max(0))]
        }
        None => vec![(p1, a1v.max(0)), (mid, 0)],
    };
    ctx.chain(Rule::TrivDesc3, Gain::Finite(v), pieces, false, false)
}

/// Sorted finite keys of one row or column, with the positions of the
/// zero boundary.
struct SortedKeys {
    keys: Vec<i64>,
    verts: Vec<u32>,
    /// First index with key >= 0.
    zero_start: usize,
    /// First index with key > 0.
    zero_end: usize,
}

impl SortedKeys {
    fn build(it: impl Iterator<Item = (usize, Gain)>) -> Self {
        let mut pairs: Vec<(i64, u32)> = it
            .filter_map(|(v, g)| g.finite().map(|k| (k, v as u32)))
            .collect();
        pairs.sort_unstable();
        let keys: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let verts: Vec<u32> = pairs.iter().map(|p| p.1).collect();
        let zero_start = keys.partition_point(|&k| k < 0);
        let zero_end = keys.partition_point(|&k| k <= 0);
        SortedKeys {
            keys,
            verts,
            zero_start,
            zero_end,
        }
    }

    fn lower_bound(&self, x: i64) -> usize {
        self.keys.partition_point(|&k| k < x)
    }

    fn upper_bound(&self, x: i64) -> usize {
        self.keys.partition_point(|&k| k <= x)
    }
}

#[derive(Clone, Copy)]
struct Best {
    val: Gain,
    vert: u32,
    /// Position in the sorted key array, for witness lookup.
    idx: u32,
}

const NO_BEST: Best = Best {
    val: Gain::NegInf,
    vert: u32::MAX,
    idx: u32::MAX,
};

#[inline]
fn combine(a: Best, b: Best) -> Best {
    if b.val > a.val || (b.val == a.val && b.vert < a.vert) {
        b
    } else {
        a
    }
}

/// Best over suffixes [i, stop) of `vals`, filled into `out`.
fn suffix_best_into(vals: &[Gain], verts: &[u32], stop: usize, out: &mut Vec<Best>) {
    out.clear();
    out.resize(stop + 1, NO_BEST);
    for i in (0..stop).rev() {
        out[i] = combine(
            out[i + 1],
            Best {
                val: vals[i],
                vert: verts[i],
                idx: i as u32,
            },
        );
    }
}

/// Best over prefixes [start, j) of `vals`; out[j] covers [start, j).
fn prefix_best_into(vals: &[Gain], verts: &[u32], start: usize, out: &mut Vec<Best>) {
    let n = vals.len();
    out.clear();
    out.resize(n + 1, NO_BEST);
    for j in start..n {
        out[j + 1] = combine(
            out[j],
            Best {
                val: vals[j],
                vert: verts[j],
                idx: j as u32,
            },
        );
    }
}

/// One full short-shortcuts pass: init, trivial shortcuts, then the three
/// alternating-sign 3-shortcut cases driven by per-(y,z) range structures
/// over (M[y][a], M[y][a] + M[a][z]) and (M[y][a], M[a][z]). Returns the new
/// shortcut matrix (the monotone table of D).
pub(crate) fn short_shortcuts(
    m: &ShortcutTable,
    ctx: &mut PassCtx<'_>,
    b: i64,
    witnesses: bool,
) -> BoundedPathStore {
    let n = m.n();
    let mut d = init_ds(m, ctx, witnesses);
    trivial_shortcuts(m, &mut d, ctx, b);

    // Column-major copy so the x loop and the per-z gather stay in cache.
    let mut cols = vec![Gain::NegInf; n * n];
    for u in 0..n {
        for v in 0..n {
            cols[v * n + u] = m.at(u, v);
        }
    }

    // Per-x query state within one y block: the finite gain M[x][y] and the
    // precomputed range boundaries.
    #[derive(Clone, Copy)]
    struct XQ {
        mxy: i64,
        pos_asc: u32,
        pos_desc: u32,
        pos_suf: u32,
        finite: bool,
    }
    let mut xq = vec![
        XQ {
            mxy: 0,
            pos_asc: 0,
            pos_desc: 0,
            pos_suf: 0,
            finite: false
        };
        n
    ];
    let mut sum_vals: Vec<Gain> = Vec::new();
    let mut last_vals: Vec<Gain> = Vec::new();
    let mut suf_neg: Vec<Best> = Vec::new();
    let mut pre_pos: Vec<Best> = Vec::new();
    let mut suf_all: Vec<Best> = Vec::new();

    for y in 0..n {
        let row = SortedKeys::build((0..n).map(|a| (a, m.at(y, a))));
        let len = row.keys.len();
        let col_y = &cols[y * n..(y + 1) * n];
        for x in 0..n {
            let q = &mut xq[x];
            match col_y[x] {
                Gain::Finite(mxy) => {
                    q.finite = true;
                    q.mxy = mxy;
                    if mxy >= 0 {
                        q.pos_asc = row.lower_bound(-mxy) as u32;
                    }
                    if mxy <= 0 {
                        q.pos_desc = row.upper_bound(-mxy) as u32;
                        q.pos_suf = row.lower_bound(-mxy) as u32;
                    }
                }
                Gain::NegInf => q.finite = false,
            }
        }

        sum_vals.clear();
        sum_vals.resize(len, Gain::NegInf);
        last_vals.clear();
        last_vals.resize(len, Gain::NegInf);
        for z in 0..n {
            let col_z = &cols[z * n..(z + 1) * n];
            for i in 0..len {
                let maz = col_z[row.verts[i] as usize];
                sum_vals[i] = Gain::Finite(row.keys[i]) + maz;
                last_vals[i] = maz;
            }
            // Suffix over keys <= 0 for the ascending case, prefix over
            // keys >= 0 for the descending cases, suffix over everything
            // for the drop-in-the-middle case.
            suffix_best_into(&sum_vals, &row.verts, row.zero_end, &mut suf_neg);
            prefix_best_into(&sum_vals, &row.verts, row.zero_start, &mut pre_pos);
            suffix_best_into(&last_vals, &row.verts, len, &mut suf_all);

            for (x, q) in xq.iter().enumerate() {
                if !q.finite {
                    continue;
                }
                let mxy = q.mxy;
                if mxy >= 0 {
                    let best = suf_neg[q.pos_asc as usize];
                    if let Some(k2) = best.val.finite() {
                        if k2 >= 0 {
                            let v = Gain::Finite(mxy) + best.val;
                            if v > d.mono.at(x, z) {
                                let a = best.vert as usize;
                                let w =
                                    short_witness(m, ctx, Rule::ShortAsc, x, y, a, z, v, [0, 0, 0]);
                                raise_mono(&mut d, x, z, v, w);
                            }
                        }
                    }
                }
                if mxy <= 0 {
                    let best = pre_pos[(q.pos_desc as usize).max(row.zero_start)];
                    if let Some(k2) = best.val.finite() {
                        let a = best.vert as usize;
                        if k2 <= 0 && mxy + k2 >= -b {
                            let v = Gain::Finite(mxy + k2);
                            if v > d.mono.at(x, z) {
                                let w = short_witness(
                                    m, ctx, Rule::ShortDescDirect, x, y, a, z, v, [0, 0, 0],
                                );
                                raise_mono(&mut d, x, z, v, w);
                            }
                        }
                        if k2 >= 0 {
                            let v = Gain::Finite(mxy);
                            if v > d.mono.at(x, z) {
                                let w = short_witness(
                                    m, ctx, Rule::ShortDescDropEnd, x, y, a, z, v, [0, 0, k2],
                                );
                                raise_mono(&mut d, x, z, v, w);
                            }
                        }
                    }
                    // Largest last-arc gain among a with M[y][a] >= |M[x][y]|,
                    // descending via drops at a and z.
                    let best3 = suf_all[q.pos_suf as usize];
                    if let Some(k2) = best3.val.finite() {
                        let v = Gain::Finite(mxy.min(k2));
                        if v > d.mono.at(x, z) {
                            let a = best3.vert as usize;
                            let mya = m.at(y, a).expect_finite();
                            let w = short_witness(
                                m,
                                ctx,
                                Rule::ShortDescDropMid,
                                x,
                                y,
                                a,
                                z,
                                v,
                                [0, mxy + mya, (k2 - mxy).max(0)],
                            );
                            raise_mono(&mut d, x, z, v, w);
                        }
                    }
                }
            }
        }
    }
    d
}

#[allow(clippy::too_many_arguments)]
fn short_witness(
    m: &ShortcutTable,
    ctx: &mut PassCtx<'_>,
    rule: Rule,
    x: usize,
    y: usize,
    a: usize,
    z: usize,
    value: Gain,
    drops: [i64; 3],
) -> NodeId {
    if !ctx.recording() {
        return NO_NODE;
    }
    let p1 = ctx.marc(m, x, y);
    let p2 = ctx.marc(m, y, a);
    let p3 = ctx.marc(m, a, z);
    ctx.chain(
        rule,
        value,
        vec![(p1, drops[0]), (p2, drops[1]), (p3, drops[2])],
        false,
        false,
    )
}

/// Extends first-arc-bounded paths backward and last-arc-bounded paths
/// forward by one arc of no smaller magnitude.
pub(crate) fn breadth_search(m: &ShortcutTable, d: &mut BoundedPathStore, ctx: &mut PassCtx<'_>) {
    let n = m.n();
    // First-arc side: extend y-starting bounded paths backward along (x, y).
    for y in 0..n {
        let row = SortedKeys::build((0..n).map(|a| (a, m.at(y, a))));
        let len = row.keys.len();
        let mut pos_asc = vec![0u32; n];
        let mut pos_desc = vec![0u32; n];
        for x in 0..n {
            if let Some(mxy) = m.at(x, y).finite() {
                if mxy >= 0 {
                    pos_asc[x] = row.lower_bound(-mxy) as u32;
                } else {
                    pos_desc[x] = row.upper_bound(-mxy) as u32;
                }
            }
        }
        let mut vals = vec![Gain::NegInf; len];
        let mut wits = vec![NO_NODE; len];
        let mut suf_neg: Vec<Best> = Vec::new();
        let mut pre_pos: Vec<Best> = Vec::new();
        for z in 0..n {
            for i in 0..len {
                let a = row.verts[i] as usize;
                vals[i] = d.first.at(y, a, z);
                if ctx.recording() {
                    wits[i] = d.first_wit.as_ref().unwrap().at(y, a, z);
                }
            }
            suffix_best_into(&vals, &row.verts, row.zero_end, &mut suf_neg);
            prefix_best_into(&vals, &row.verts, row.zero_start, &mut pre_pos);
            for x in 0..n {
                let Some(mxy) = m.at(x, y).finite() else { continue };
                let best = if mxy >= 0 {
                    let p = pos_asc[x] as usize;
                    if p > row.zero_end {
                        NO_BEST
                    } else {
                        suf_neg[p]
                    }
                } else {
                    pre_pos[(pos_desc[x] as usize).max(row.zero_start)]
                };
                if best.val.is_finite() {
                    let v = Gain::Finite(mxy) + best.val;
                    if v > d.first.at(x, y, z) {
                        let w = if ctx.recording() {
                            let p1 = ctx.marc(m, x, y);
                            let rest = wits[best.idx as usize];
                            ctx.chain(Rule::BreadthFirst, v, vec![(p1, 0), (rest, 0)], false, false)
                        } else {
                            NO_NODE
                        };
                        raise_first(d, x, y, z, v, w);
                    }
                }
            }
        }
    }

    // Last-arc side: extend y-ending bounded paths forward along (y, x).
    for y in 0..n {
        let col = SortedKeys::build((0..n).map(|w| (w, m.at(w, y))));
        let len = col.keys.len();
        let mut pos_asc = vec![0u32; n];
        let mut pos_desc = vec![0u32; n];
        for x in 0..n {
            if let Some(myx) = m.at(y, x).finite() {
                if myx >= 0 {
                    pos_asc[x] = col.lower_bound(-myx) as u32;
                } else {
                    pos_desc[x] = col.upper_bound(-myx) as u32;
                }
            }
        }
        let mut vals = vec![Gain::NegInf; len];
        let mut wits = vec![NO_NODE; len];
        let mut suf_neg: Vec<Best> = Vec::new();
        let mut pre_pos: Vec<Best> = Vec::new();
        for z in 0..n {
            for i in 0..len {
                let w = col.verts[i] as usize;
                vals[i] = d.last.at(z, w, y);
                if ctx.recording() {
                    wits[i] = d.last_wit.as_ref().unwrap().at(z, w, y);
                }
            }
            suffix_best_into(&vals, &col.verts, col.zero_end, &mut suf_neg);
            prefix_best_into(&vals, &col.verts, col.zero_start, &mut pre_pos);
            for x in 0..n {
                let Some(myx) = m.at(y, x).finite() else { continue };
                let best = if myx >= 0 {
                    let p = pos_asc[x] as usize;
                    if p > col.zero_end {
                        NO_BEST
                    } else {
                        suf_neg[p]
                    }
                } else {
                    pre_pos[(pos_desc[x] as usize).max(col.zero_start)]
                };
                if best.val.is_finite() {
                    let v = best.val + Gain::Finite(myx);
                    if v > d.last.at(z, y, x) {
                        let w = if ctx.recording() {
                            let rest = wits[best.idx as usize];
                            let p2 = ctx.marc(m, y, x);
                            ctx.chain(Rule::BreadthLast, v, vec![(rest, 0), (p2, 0)], false, false)
                        } else {
                            NO_NODE
                        };
                        raise_last(d, z, y, x, v, w);
                    }
                }
            }
        }
    }
}

/// Concatenates same-direction negative-bounded paths at shared endpoints:
/// first-with-first and last-with-last.
pub(crate) fn concatenate(
    m: &ShortcutTable,
    d: &mut BoundedPathStore,
    ctx: &mut PassCtx<'_>,
    us: &[usize],
    ws: &[usize],
    xs: &[usize],
) {
    let n = m.n();
    for &w in ws {
        for &x in xs {
            // Range tree of first-arc-bounded (w a .. x) paths keyed by the
            // bounding arc gain, and of last-arc-bounded (x .. a w) paths.
            let ft = MaxRangeTree2D::build(
                (0..n).map(|a| (m.at(w, a), d.first.at(w, a, x), a as u32)),
            );
            let lt = MaxRangeTree2D::build(
                (0..n).map(|a| (m.at(a, w), d.last.at(x, a, w), a as u32)),
            );
            for &u in us {
                for v in 0..n {
                    if m.at(u, v) < Gain::ZERO {
                        if let (Some(muv), Some(duvw)) =
                            (m.at(u, v).finite(), d.first.at(u, v, w).finite())
                        {
                            if let Some((_, k2, a)) = ft.max_k2_in_k1_range(-(duvw - muv), 0) {
                                let v2 = Gain::Finite(duvw) + k2;
                                if v2 > d.first.at(u, v, x) {
                                    let wit = if ctx.recording() {
                                        let left = d.first_wit.as_ref().unwrap().at(u, v, w);
                                        let right =
                                            d.first_wit.as_ref().unwrap().at(w, a as usize, x);
                                        ctx.chain(
                                            Rule::ConcatFirst,
                                            v2,
                                            vec![(left, 0), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_first(d, u, v, x, v2, wit);
                                }
                            }
                        }
                    }
                    if m.at(v, u) < Gain::ZERO {
                        if let (Some(mvu), Some(dwvu)) =
                            (m.at(v, u).finite(), d.last.at(w, v, u).finite())
                        {
                            if let Some((_, k2, a)) = lt.max_k2_in_k1_range(-(dwvu - mvu), 0) {
                                let v2 = k2 + Gain::Finite(dwvu);
                                if v2 > d.last.at(x, v, u) {
                                    let wit = if ctx.recording() {
                                        let left = d.last_wit.as_ref().unwrap().at(x, a as usize, w);
                                        let right = d.last_wit.as_ref().unwrap().at(w, v, u);
                                        ctx.chain(
                                            Rule::ConcatLast,
                                            v2,
                                            vec![(left, 0), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_last(d, x, v, u, v2, wit);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Concatenates a negative-bounded path with a positive-bounded path of the
/// opposite kind, possibly dropping charge at the junction to keep the
/// result bounded (in which case the result's gain is 0, the best any
/// negative-bounded path can have).
pub(crate) fn concatenate_opposite(
    m: &ShortcutTable,
    d: &mut BoundedPathStore,
    ctx: &mut PassCtx<'_>,
    us: &[usize],
    ws: &[usize],
    xs: &[usize],
) {
    let n = m.n();
    for &w in ws {
        for &x in xs {
            // Last-arc-bounded (w .. a x) paths with a nonnegative bounding
            // arc, keyed two ways for the two cases.
            let lrt = MaxRangeTree2D::build((0..n).filter_map(|a| {
                let max_ = m.at(a, x);
                let dv = d.last.at(w, a, x);
                if max_ >= Gain::ZERO && dv.is_finite() {
                    Some((
                        Gain::Finite(max_.expect_finite() - dv.expect_finite()),
                        dv,
                        a as u32,
                    ))
                } else {
                    None
                }
            }));
            let lrt2 = MaxRangeTree2D::build((0..n).filter_map(|a| {
                let max_ = m.at(a, x);
                let dv = d.last.at(w, a, x);
                if max_ >= Gain::ZERO && dv.is_finite() {
                    Some((dv, max_, a as u32))
                } else {
                    None
                }
            }));
            // First-arc-bounded (x a .. w) paths with a nonnegative bounding
            // arc.
            let frt = MaxRangeTree2D::build((0..n).filter_map(|a| {
                let mxa = m.at(x, a);
                let dv = d.first.at(x, a, w);
                if mxa >= Gain::ZERO && dv.is_finite() {
                    Some((
                        Gain::Finite(mxa.expect_finite() - dv.expect_finite()),
                        dv,
                        a as u32,
                    ))
                } else {
                    None
                }
            }));
            let frt2 = MaxRangeTree2D::build((0..n).filter_map(|a| {
                let mxa = m.at(x, a);
                let dv = d.first.at(x, a, w);
                if mxa >= Gain::ZERO && dv.is_finite() {
                    Some((dv, mxa, a as u32))
                } else {
                    None
                }
            }));

            for &u in us {
                for v in 0..n {
                    if m.at(u, v) < Gain::ZERO {
                        if let (Some(muv), Some(duvw)) =
                            (m.at(u, v).finite(), d.first.at(u, v, w).finite())
                        {
                            if let Some((_, k2, a)) = lrt.max_k2_in_box(duvw - muv, -duvw) {
                                let v2 = Gain::Finite(duvw) + k2;
                                if v2 > d.first.at(u, v, x) {
                                    let wit = if ctx.recording() {
                                        let left = d.first_wit.as_ref().unwrap().at(u, v, w);
                                        let right =
                                            d.last_wit.as_ref().unwrap().at(w, a as usize, x);
                                        ctx.chain(
                                            Rule::ConcatOppFirst,
                                            v2,
                                            vec![(left, 0), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_first(d, u, v, x, v2, wit);
                                }
                            }
                            if Gain::ZERO > d.first.at(u, v, x) {
                                if let Some((_, _, a)) = lrt2.min_k2_in_quadrant(-duvw, -muv) {
                                    let a = a as usize;
                                    let wit = if ctx.recording() {
                                        let left = d.first_wit.as_ref().unwrap().at(u, v, w);
                                        let right = d.last_wit.as_ref().unwrap().at(w, a, x);
                                        let gamma =
                                            duvw + d.last.at(w, a, x).expect_finite();
                                        ctx.chain(
                                            Rule::ConcatOppFirstZero,
                                            Gain::ZERO,
                                            vec![(left, gamma), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_first(d, u, v, x, Gain::ZERO, wit);
                                }
                            }
                        }
                    }
                    if m.at(v, u) < Gain::ZERO {
                        if let (Some(mvu), Some(dwvu)) =
                            (m.at(v, u).finite(), d.last.at(w, v, u).finite())
                        {
                            if let Some((_, k2, a)) = frt.max_k2_in_box(dwvu - mvu, -dwvu) {
                                let v2 = k2 + Gain::Finite(dwvu);
                                if v2 > d.last.at(x, v, u) {
                                    let wit = if ctx.recording() {
                                        let left =
                                            d.first_wit.as_ref().unwrap().at(x, a as usize, w);
                                        let right = d.last_wit.as_ref().unwrap().at(w, v, u);
                                        ctx.chain(
                                            Rule::ConcatOppLast,
                                            v2,
                                            vec![(left, 0), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_last(d, x, v, u, v2, wit);
                                }
                            }
                            if Gain::ZERO > d.last.at(x, v, u) {
                                if let Some((_, _, a)) = frt2.min_k2_in_quadrant(-dwvu, -mvu) {
                                    let a = a as usize;
                                    let wit = if ctx.recording() {
                                        let left = d.first_wit.as_ref().unwrap().at(x, a, w);
                                        let right = d.last_wit.as_ref().unwrap().at(w, v, u);
                                        let gamma =
                                            d.first.at(x, a, w).expect_finite() + dwvu;
                                        ctx.chain(
                                            Rule::ConcatOppLastZero,
                                            Gain::ZERO,
                                            vec![(left, gamma), (right, 0)],
                                            false,
                                            false,
                                        )
                                    } else {
                                        NO_NODE
                                    };
                                    raise_last(d, x, v, u, Gain::ZERO, wit);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Extends arc-bounded paths whose bounding arc touches `t_set` by one arc
/// into monotone paths: a descending extension, a descending extension with
/// a final drop, and an ascending path that sheds the bounding arc.
pub(crate) fn arc_bounded_to_monotone(
    m: &ShortcutTable,
    d: &mut BoundedPathStore,
    ctx: &mut PassCtx<'_>,
    t_set: &[usize],
    b: i64,
) {
    let n = m.n();
    for &u in t_set {
        for v in 0..n {
            // First-arc-bounded side: paths u v .. x extended by (x, y).
            if let Some(muv) = m.at(u, v).finite() {
                if muv <= 0 {
                    for x in 0..n {
                        let Some(duvx) = d.first.at(u, v, x).finite() else {
                            continue;
                        };
                        for y in 0..n {
                            let Some(mxy) = m.at(x, y).finite() else { continue };
                            let s = duvx + mxy;
                            if -b <= s && s <= muv {
                                let val = Gain::Finite(s);
                                if val > d.mono.at(u, y) {
                                    let wit = ext_witness(
                                        m, d, ctx, Rule::ExtDescFirst, u, v, x, y, val, 0, true,
                                        false,
                                    );
                                    raise_mono(d, u, y, val, wit);
                                }
                            }
                            if s >= muv {
                                let val = Gain::Finite(muv);
                                if val > d.mono.at(u, y) {
                                    let wit = ext_witness(
                                        m,
                                        d,
                                        ctx,
                                        Rule::ExtDescDropFirst,
                                        u,
                                        v,
                                        x,
                                        y,
                                        val,
                                        s - muv,
                                        true,
                                        false,
                                    );
                                    raise_mono(d, u, y, val, wit);
                                }
                            }
                            if s >= 0 {
                                let val = Gain::Finite(s - muv);
                                if val > d.mono.at(v, y) {
                                    let wit = ext_witness(
                                        m, d, ctx, Rule::ExtAscFirst, u, v, x, y, val, 0, true,
                                        true,
                                    );
                                    raise_mono(d, v, y, val, wit);
                                }
                            }
                        }
                    }
                }
            }
            // Last-arc-bounded side: paths x .. v u extended by (y, x).
            if let Some(mvu) = m.at(v, u).finite() {
                if mvu <= 0 {
                    for x in 0..n {
                        let Some(dxvu) = d.last.at(x, v, u).finite() else {
                            continue;
                        };
                        for y in 0..n {
                            let Some(myx) = m.at(y, x).finite() else { continue };
                            let s = myx + dxvu;
                            if -b <= s && s <= mvu {
                                let val = Gain::Finite(s);
                                if val > d.mono.at(y, u) {
                                    let wit = ext_witness(
                                        m, d, ctx, Rule::ExtDescLast, u, v, x, y, val, 0, false,
                                        false,
                                    );
                                    raise_mono(d, y, u, val, wit);
                                }
                            }
                            if s >= mvu {
                                let val = Gain::Finite(mvu);
                                if val > d.mono.at(y, u) {
                                    let wit = ext_witness(
                                        m,
                                        d,
                                        ctx,
                                        Rule::ExtDescDropLast,
                                        u,
                                        v,
                                        x,
                                        y,
                                        val,
                                        s - mvu,
                                        false,
                                        false,
                                    );
                                    raise_mono(d, y, u, val, wit);
                                }
                            }
                            if s >= 0 {
                                let val = Gain::Finite(s - mvu);
                                if val > d.mono.at(y, v) {
                                    let wit = ext_witness(
                                        m, d, ctx, Rule::ExtAscLast, u, v, x, y, val, 0, false,
                                        true,
                                    );
                                    raise_mono(d, y, v, val, wit);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Witness for the arc-bounded-to-monotone extensions. For the first-arc
/// side the chain is [bounded(u,v,x), arc(x,y)]; for the last-arc side it is
/// [arc(y,x), bounded(x,v,u)]. `drop_at_end` lands on the very last vertex
/// of the first-side chain, or on the junction x for the last-arc descending
/// drop; `shed` cuts the bounding arc for the ascending cases.
#[allow(clippy::too_many_arguments)]
fn ext_witness(
    m: &ShortcutTable,
    d: &BoundedPathStore,
    ctx: &mut PassCtx<'_>,
    rule: Rule,
    u: usize,
    v: usize,
    x: usize,
    y: usize,
    value: Gain,
    drop: i64,
    first_side: bool,
    shed: bool,
) -> NodeId {
    if !ctx.recording() {
        return NO_NODE;
    }
    if first_side {
        let bounded = d.first_wit.as_ref().unwrap().at(u, v, x);
        let arc = ctx.marc(m, x, y);
        ctx.chain(rule, value, vec![(bounded, 0), (arc, drop)], shed, false)
    } else {
        let bounded = d.last_wit.as_ref().unwrap().at(x, v, u);
        let arc = ctx.marc(m, y, x);
        ctx.chain(rule, value, vec![(arc, drop), (bounded, 0)], false, shed)
    }
}
