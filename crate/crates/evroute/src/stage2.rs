//! Stage II: from the shortcut table to the all-pairs answers.
//!
//! A 2n-node boolean graph H over charge states {v^0, v^B} encodes relations
//! "starting at u with charge b1, vertex v is reachable with at least b2".
//! Its transitive closure pins down every pair that can reach full charge;
//! the rest of the answer comes from funnel-dominated bounded paths glued
//! onto the last full-charge vertex.

use crate::gain::{Charge, Gain};
use crate::graph::EnergyGraph;
use crate::stage1::{BoundedPathStore, EngineConfig, ShortcutTable, Stage1Engine};
use crate::table::{BetaValue, Matrix};

/// Boolean adjacency over 2n charge-state nodes; node v is "v with charge 0",
/// node n+v is "v with full charge". Bit-parallel rows.
#[derive(Clone, Debug)]
pub struct ChargeStateGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    /// Which build rules justified each arc (debug builds only).
    rules: Option<Vec<u8>>,
}

pub const RULE_00: u8 = 1;
pub const RULE_0B: u8 = 2;
pub const RULE_B0: u8 = 4;
pub const RULE_BB: u8 = 8;

impl ChargeStateGraph {
    fn empty(n: usize, with_rules: bool) -> Self {
        let nodes = 2 * n;
        let words = nodes.div_ceil(64);
        ChargeStateGraph {
            n,
            words,
            rows: vec![0; nodes * words],
            rules: with_rules.then(|| vec![0; nodes * nodes]),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        2 * self.n
    }

    #[inline]
    fn add(&mut self, from: usize, to: usize, rule: u8) {
        self.rows[from * self.words + to / 64] |= 1u64 << (to % 64);
        if let Some(r) = self.rules.as_mut() {
            r[from * 2 * self.n + to] |= rule;
        }
    }

    #[inline]
    pub fn has(&self, from: usize, to: usize) -> bool {
        self.rows[from * self.words + to / 64] >> (to % 64) & 1 == 1
    }

    pub fn rule_bits(&self, from: usize, to: usize) -> Option<u8> {
        self.rules.as_ref().map(|r| r[from * 2 * self.n + to])
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nodes = self.nodes();
        (0..nodes)
            .flat_map(move |f| (0..nodes).map(move |t| (f, t)))
            .filter(|&(f, t)| self.has(f, t))
    }

    #[inline]
    pub fn zero_node(&self, v: usize) -> usize {
        v
    }

    #[inline]
    pub fn full_node(&self, v: usize) -> usize {
        self.n + v
    }
}

/// Builds H from the shortcut table: the four arc rules over all vertex
/// triples (the 0-0 and B-B rules) and pairs (the 0-B and B-0 rules).
pub fn build_h(m: &ShortcutTable, b: i64) -> ChargeStateGraph {
    let n = m.n();
    let mut h = ChargeStateGraph::empty(n, cfg_debug());
    let cap = Gain::Finite(b);
    for x in 0..n {
        for y in 0..n {
            let mxy = m.at(x, y);
            if !mxy.is_finite() {
                continue;
            }
            // Full charge survives any single usable shortcut.
            h.add(h.full_node(x), h.zero_node(y), RULE_B0);
            // Reaching full charge from empty: a big ascending shortcut, or
            // an ascending entry-exit pump around a positive cycle.
            if mxy >= cap || (mxy > Gain::ZERO && mxy + m.at(y, x) > Gain::ZERO) {
                h.add(h.zero_node(x), h.full_node(y), RULE_0B);
            }
            let mxy_nonneg = mxy >= Gain::ZERO;
            for z in 0..n {
                let myz = m.at(y, z);
                if !myz.is_finite() {
                    continue;
                }
                let sum = mxy + myz;
                if mxy_nonneg && sum >= Gain::ZERO {
                    h.add(h.zero_node(x), h.zero_node(z), RULE_00);
                }
                if myz >= Gain::ZERO && sum >= Gain::ZERO {
                    h.add(h.full_node(x), h.full_node(z), RULE_BB);
                }
            }
        }
    }
    h
}

fn cfg_debug() -> bool {
    cfg!(debug_assertions)
}

/// Positive-length reachability closure by BFS from every node over the
/// bit-parallel rows.
pub fn transitive_closure(h: &ChargeStateGraph) -> ChargeStateGraph {
    let nodes = h.nodes();
    let mut star = ChargeStateGraph::empty(h.n, false);
    let mut stack: Vec<usize> = Vec::with_capacity(nodes);
    let mut seen = vec![false; nodes];
    for s in 0..nodes {
        seen.iter_mut().for_each(|b| *b = false);
        stack.clear();
        for t in 0..nodes {
            if h.has(s, t) && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
        while let Some(u) = stack.pop() {
            star.add(s, u, 0);
            for t in 0..nodes {
                if h.has(u, t) && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    star
}

/// The maximum-final-charge assembly: full charge wherever H* proves it,
/// otherwise the best funnel-dominated simple descent from the last
/// full-charge vertex.
pub fn mfc(m: &ShortcutTable, b: i64, d: &BoundedPathStore, h_star: &ChargeStateGraph) -> Matrix<Charge> {
    let n = m.n();
    // A_B[y][t]: best final charge over simple bounded paths that start at y
    // with full charge and never climb back above it.
    let mut a_b: Matrix<Charge> = Matrix::filled(n, Gain::NegInf);
    for y in 0..n {
        for t in 0..n {
            let mut best = Gain::NegInf;
            for x in 0..n {
                if m.at(y, x) <= Gain::ZERO {
                    let cand = Gain::Finite(b) + d.first.at(y, x, t);
                    if cand > best {
                        best = cand;
                    }
                }
            }
            a_b.set(y, t, best);
        }
    }

    let mut alpha: Matrix<Charge> = Matrix::filled(n, Gain::NegInf);
    for s in 0..n {
        for t in 0..n {
            let mut best = if s == t || h_star.has(h_star.full_node(s), h_star.full_node(t)) {
                Gain::Finite(b)
            } else {
                Gain::NegInf
            };
            for y in 0..n {
                if y == s || h_star.has(h_star.full_node(s), h_star.full_node(y)) {
                    let cand = a_b.at(y, t);
                    if cand > best {
                        best = cand;
                    }
                }
            }
            alpha.set(s, t, best);
        }
    }
    alpha
}

/// Everything the pipeline produces for one graph.
pub struct SolveResult {
    pub shortcuts: ShortcutTable,
    pub funnels: BoundedPathStore,
    pub h: ChargeStateGraph,
    pub h_star: ChargeStateGraph,
    pub alpha: Matrix<Charge>,
}

/// Full pipeline on a normalized graph, with an externally constructed
/// engine (kept so callers can inspect witnesses afterwards).
pub fn solve_alpha_with_engine(g: &EnergyGraph, engine: &mut Stage1Engine) -> SolveResult {
    let m = engine.compute_shortcuts(g);
    let d = engine.compute_funnels(&m);
    let h = build_h(&m, g.capacity());
    let h_star = transitive_closure(&h);
    let alpha = mfc(&m, g.capacity(), &d, &h_star);
    SolveResult {
        shortcuts: m,
        funnels: d,
        h,
        h_star,
        alpha,
    }
}

pub fn solve_alpha(g: &EnergyGraph, cfg: EngineConfig) -> SolveResult {
    let mut engine = Stage1Engine::new(g, cfg);
    solve_alpha_with_engine(g, &mut engine)
}

/// Minimum initial charge via the reversal identity: run the full pipeline
/// on the reverse graph and flip.
pub fn min_initial_charge(g: &EnergyGraph, cfg: EngineConfig) -> Matrix<BetaValue> {
    let rev = g.reversed();
    let res = solve_alpha(&rev, cfg);
    let n = g.n();
    let b = g.capacity();
    let mut beta = Matrix::filled(n, BetaValue::PosInf);
    for s in 0..n {
        for t in 0..n {
            if let Some(a) = res.alpha.at(t, s).finite() {
                beta.set(s, t, BetaValue::Finite(b - a));
            }
        }
    }
    beta
}
