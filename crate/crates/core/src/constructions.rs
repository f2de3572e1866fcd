//! Compilation of a Turing machine into automata rules and starting
//! configurations.
//!
//! * [`construction1`]: radius 1, `C = {0,1,2}`. The head position is
//!   tracked by a single cell with `ξ = 1`; each machine step is a
//!   three-update handshake (fire, demote, promote).
//! * [`construction2`]: radius 1, `C = {1,2}`. No handshake; the written
//!   cell becomes the new marker and stale markers are demoted by the
//!   fallback clause.
//! * [`construction3`]: radius `p`, `C = {0,1,2,3}`. Construction 1 spread
//!   over a support `ψ(ℤ)`; cells with `ξ = 3` are inactive.
//!
//! Constructions 1 and 3 come in two clause tables. [`ClauseTable::Guarded`]
//! (the default) adds a "no marker on the far side" guard to the fire and
//! promote clauses. Without it a cell that has just been written can be
//! promoted by a stale settled neighbor on its far side before the old
//! marker is demoted, which leaves two markers and deadlocks the
//! simulation. [`ClauseTable::AsPublished`] keeps the unguarded table for
//! comparison.

use std::fmt;

use thiserror::Error;

use crate::aca::{Background, Configuration, LocalRule, ProductSymbol};
use crate::tm::{Move, State, Symbol, TuringMachine};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("symbol `{0}` is not in the input alphabet")]
    NotInput(String),
    #[error("gap must be at least 1, got {0}")]
    BadGap(i64),
    #[error("invalid scatter map: {0}")]
    BadScatter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClauseTable {
    AsPublished,
    Guarded,
}

impl fmt::Display for ClauseTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseTable::AsPublished => "published",
            ClauseTable::Guarded => "guarded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    Strict,
    Headless,
    Scattered { gap: usize },
}

/// A compiled rule together with its source machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledAca {
    tm: TuringMachine,
    kind: ConstructionKind,
    table: ClauseTable,
}

const CTL_STRICT: [u8; 3] = [0, 1, 2];
const CTL_HEADLESS: [u8; 2] = [1, 2];
const CTL_SCATTERED: [u8; 4] = [0, 1, 2, 3];

/// Marker value `ξ = 1`, settled `ξ = 2`, freshly written `ξ = 0`,
/// inactive `ξ = 3`.
pub mod ctl {
    pub const WRITTEN: u8 = 0;
    pub const MARKER: u8 = 1;
    pub const SETTLED: u8 = 2;
    pub const INACTIVE: u8 = 3;
}
use ctl::{INACTIVE, MARKER, SETTLED, WRITTEN};

impl CompiledAca {
    pub fn machine(&self) -> &TuringMachine {
        &self.tm
    }

    pub fn kind(&self) -> ConstructionKind {
        self.kind
    }

    pub fn table(&self) -> ClauseTable {
        self.table
    }

    pub fn construction_id(&self) -> u8 {
        match self.kind {
            ConstructionKind::Strict => 1,
            ConstructionKind::Headless => 2,
            ConstructionKind::Scattered { .. } => 3,
        }
    }

    pub fn gap(&self) -> Option<usize> {
        match self.kind {
            ConstructionKind::Scattered { gap } => Some(gap),
            _ => None,
        }
    }

    /// The control alphabet `C`.
    pub fn ctl_values(&self) -> &'static [u8] {
        match self.kind {
            ConstructionKind::Strict => &CTL_STRICT,
            ConstructionKind::Headless => &CTL_HEADLESS,
            ConstructionKind::Scattered { .. } => &CTL_SCATTERED,
        }
    }

    /// Every cell value of the product alphabet `Γ × Q × D × C`.
    pub fn alphabet(&self) -> Vec<ProductSymbol> {
        let mut out = Vec::new();
        for g in self.tm.symbols() {
            for q in self.tm.states() {
                for d in [Move::L, Move::R] {
                    for &c in self.ctl_values() {
                        out.push(ProductSymbol::new(g, q, d, c));
                    }
                }
            }
        }
        out
    }

    fn fire(&self, from: State, target: &ProductSymbol, ctl: u8) -> ProductSymbol {
        let tr = self.tm.delta(from, target.gamma);
        ProductSymbol::new(tr.write, tr.next, tr.mv, ctl)
    }

    /// Non-fallback clauses (numbered 1–6 in table order) whose premise
    /// holds on `n`. Empty for construction 2, whose clauses are exclusive
    /// by their guards.
    pub fn matching_clauses(&self, n: &[ProductSymbol]) -> Vec<u8> {
        match self.kind {
            ConstructionKind::Strict => {
                let (u, v, z) = (&n[0], &n[1], &n[2]);
                (1..=6).filter(|&k| self.strict_clause(k, u, v, z)).collect()
            }
            ConstructionKind::Scattered { gap } => {
                let view = Window { cells: n, r: gap };
                (1..=6).filter(|&k| self.scattered_clause(k, &view).is_some()).collect()
            }
            ConstructionKind::Headless => Vec::new(),
        }
    }

    fn guarded(&self) -> bool {
        self.table == ClauseTable::Guarded
    }

    fn strict_clause(&self, k: u8, u: &ProductSymbol, v: &ProductSymbol, z: &ProductSymbol) -> bool {
        let g = self.guarded();
        match k {
            1 => u.ctl == MARKER && u.dir == Move::R && v.ctl == SETTLED && !(g && z.ctl == MARKER),
            2 => v.ctl == MARKER && v.dir == Move::R && z.ctl == WRITTEN,
            3 => u.ctl == SETTLED && u.dir == Move::R && v.ctl == WRITTEN && !(g && z.ctl == MARKER),
            4 => z.ctl == MARKER && z.dir == Move::L && v.ctl == SETTLED && !(g && u.ctl == MARKER),
            5 => v.ctl == MARKER && v.dir == Move::L && u.ctl == WRITTEN,
            6 => z.ctl == SETTLED && z.dir == Move::L && v.ctl == WRITTEN && !(g && u.ctl == MARKER),
            _ => false,
        }
    }

    fn apply_strict(&self, u: &ProductSymbol, v: &ProductSymbol, z: &ProductSymbol) -> ProductSymbol {
        if self.strict_clause(1, u, v, z) {
            self.fire(u.state, v, WRITTEN)
        } else if self.strict_clause(2, u, v, z) {
            ProductSymbol::new(v.gamma, v.state, Move::R, SETTLED)
        } else if self.strict_clause(3, u, v, z) {
            v.with_ctl(MARKER)
        } else if self.strict_clause(4, u, v, z) {
            self.fire(z.state, v, WRITTEN)
        } else if self.strict_clause(5, u, v, z) {
            ProductSymbol::new(v.gamma, v.state, Move::L, SETTLED)
        } else if self.strict_clause(6, u, v, z) {
            v.with_ctl(MARKER)
        } else {
            *v
        }
    }

    fn apply_headless(&self, u: &ProductSymbol, v: &ProductSymbol, z: &ProductSymbol) -> ProductSymbol {
        if u.ctl == MARKER && u.dir == Move::R && z.ctl != MARKER {
            self.fire(u.state, v, MARKER)
        } else if z.ctl == MARKER && z.dir == Move::L && u.ctl != MARKER {
            self.fire(z.state, v, MARKER)
        } else {
            v.with_ctl(SETTLED)
        }
    }

    /// Output of clause `k` of the radius-`p` table, if its premise holds.
    fn scattered_clause(&self, k: u8, w: &Window<'_>) -> Option<ProductSymbol> {
        let v = w.center();
        let g = self.guarded();
        match k {
            1 => {
                let src = w.nearest_left(MARKER)?;
                (src.dir == Move::R && v.ctl == SETTLED && !(g && w.nearest_right(MARKER).is_some()))
                    .then(|| self.fire(src.state, v, WRITTEN))
            }
            2 => (v.ctl == MARKER && v.dir == Move::R && w.nearest_right(WRITTEN).is_some())
                .then(|| ProductSymbol::new(v.gamma, v.state, Move::R, SETTLED)),
            3 => {
                let src = w.nearest_left(SETTLED)?;
                (src.dir == Move::R && v.ctl == WRITTEN && !(g && w.nearest_right(MARKER).is_some()))
                    .then(|| v.with_ctl(MARKER))
            }
            4 => {
                let src = w.nearest_right(MARKER)?;
                (src.dir == Move::L && v.ctl == SETTLED && !(g && w.nearest_left(MARKER).is_some()))
                    .then(|| self.fire(src.state, v, WRITTEN))
            }
            5 => (v.ctl == MARKER && v.dir == Move::L && w.nearest_left(WRITTEN).is_some())
                .then(|| ProductSymbol::new(v.gamma, v.state, Move::L, SETTLED)),
            6 => {
                let src = w.nearest_right(SETTLED)?;
                (src.dir == Move::L && v.ctl == WRITTEN && !(g && w.nearest_left(MARKER).is_some()))
                    .then(|| v.with_ctl(MARKER))
            }
            _ => None,
        }
    }
}

/// A radius-`r` neighborhood `u^(-r) … u^(r)`.
struct Window<'a> {
    cells: &'a [ProductSymbol],
    r: usize,
}

impl Window<'_> {
    fn center(&self) -> &ProductSymbol {
        &self.cells[self.r]
    }

    /// `u^(j_L)` with `j_L = max E_L(k)`: the closest left cell with `ξ = k`.
    fn nearest_left(&self, k: u8) -> Option<&ProductSymbol> {
        (1..=self.r).map(|i| &self.cells[self.r - i]).find(|c| c.ctl == k)
    }

    /// `u^(j_R)` with `j_R = min E_R(k)`.
    fn nearest_right(&self, k: u8) -> Option<&ProductSymbol> {
        (1..=self.r).map(|i| &self.cells[self.r + i]).find(|c| c.ctl == k)
    }
}

impl LocalRule for CompiledAca {
    fn radius(&self) -> usize {
        match self.kind {
            ConstructionKind::Scattered { gap } => gap,
            _ => 1,
        }
    }

    fn apply(&self, n: &[ProductSymbol]) -> ProductSymbol {
        match self.kind {
            ConstructionKind::Strict => self.apply_strict(&n[0], &n[1], &n[2]),
            ConstructionKind::Headless => self.apply_headless(&n[0], &n[1], &n[2]),
            ConstructionKind::Scattered { gap } => {
                let w = Window { cells: n, r: gap };
                (1..=6).find_map(|k| self.scattered_clause(k, &w)).unwrap_or(*w.center())
            }
        }
    }
}

pub fn construction1(tm: &TuringMachine) -> CompiledAca {
    construction1_with(tm, ClauseTable::Guarded)
}

pub fn construction1_with(tm: &TuringMachine, table: ClauseTable) -> CompiledAca {
    CompiledAca { tm: tm.clone(), kind: ConstructionKind::Strict, table }
}

pub fn construction2(tm: &TuringMachine) -> CompiledAca {
    CompiledAca { tm: tm.clone(), kind: ConstructionKind::Headless, table: ClauseTable::AsPublished }
}

pub fn construction3(tm: &TuringMachine, gap: usize) -> Result<CompiledAca, CompileError> {
    construction3_with(tm, gap, ClauseTable::Guarded)
}

pub fn construction3_with(tm: &TuringMachine, gap: usize, table: ClauseTable) -> Result<CompiledAca, CompileError> {
    if gap == 0 {
        return Err(CompileError::BadGap(0));
    }
    Ok(CompiledAca { tm: tm.clone(), kind: ConstructionKind::Scattered { gap }, table })
}

/// Filler `(q, m)` for cells whose state and direction are never read:
/// the first declared state and `R`.
pub fn filler(tm: &TuringMachine, gamma: Symbol, ctl: u8) -> ProductSymbol {
    ProductSymbol::new(gamma, tm.states().next().unwrap_or(State(0)), Move::R, ctl)
}

pub fn head_marker(tm: &TuringMachine) -> ProductSymbol {
    ProductSymbol::new(tm.blank(), tm.initial(), Move::R, MARKER)
}

fn check_input(tm: &TuringMachine, input: &[Symbol]) -> Result<(), CompileError> {
    tm.check_input(input).map_err(|_| {
        let bad = input.iter().find(|s| !tm.is_input(**s)).unwrap();
        CompileError::NotInput(tm.symbol_name(*bad).to_owned())
    })
}

/// Marker `(𝔟, q₀, R, 1)` at cell −1, the input with `ξ = 2` on cells
/// `0..n`, settled blanks elsewhere.
pub fn construction1_initial(tm: &TuringMachine, input: &[Symbol]) -> Result<Configuration, CompileError> {
    check_input(tm, input)?;
    let mut cells = vec![head_marker(tm)];
    cells.extend(input.iter().map(|&x| filler(tm, x, SETTLED)));
    Ok(Configuration::new(-1, cells, Background::uniform(filler(tm, tm.blank(), SETTLED))))
}

/// Construction 2 starts from the same configuration as construction 1.
pub fn construction2_initial(tm: &TuringMachine, input: &[Symbol]) -> Result<Configuration, CompileError> {
    construction1_initial(tm, input)
}

/// Injective increasing map `ψ: ℤ → ℤ` selecting the active cells.
///
/// Values are given explicitly on `[lo, lo + values.len())` and continue
/// with step `gap` on both sides, so the support is periodic outside the
/// sampled range.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScatterMap {
    lo: i64,
    values: Vec<i64>,
    gap: i64,
}

impl ScatterMap {
    /// `ψ(i) = p·i`.
    pub fn arithmetic(gap: i64) -> Result<Self, CompileError> {
        if gap < 1 {
            return Err(CompileError::BadGap(gap));
        }
        Ok(ScatterMap { lo: 0, values: vec![0], gap })
    }

    pub fn identity() -> Self {
        ScatterMap { lo: 0, values: vec![0], gap: 1 }
    }

    /// `ψ(lo + k) = values[k]`, extended with step `tail_gap`. The two
    /// tails must have the same residue modulo `tail_gap`.
    pub fn sampled(lo: i64, values: Vec<i64>, tail_gap: i64) -> Result<Self, CompileError> {
        if tail_gap < 1 {
            return Err(CompileError::BadGap(tail_gap));
        }
        if values.is_empty() {
            return Err(CompileError::BadScatter("no sample values".into()));
        }
        if let Some(w) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(CompileError::BadScatter(format!("not increasing at index {}", lo + w as i64 + 1)));
        }
        if (values[values.len() - 1] - values[0]) % tail_gap != 0 {
            return Err(CompileError::BadScatter("tails are out of phase".into()));
        }
        Ok(ScatterMap { lo, values, gap: tail_gap })
    }

    fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// Sampled index range.
    pub fn sampled_range(&self) -> (i64, i64) {
        (self.lo, self.hi())
    }

    pub fn apply(&self, i: i64) -> i64 {
        if i < self.lo {
            self.values[0] - (self.lo - i) * self.gap
        } else if i > self.hi() {
            self.values[self.values.len() - 1] + (i - self.hi()) * self.gap
        } else {
            self.values[(i - self.lo) as usize]
        }
    }

    /// `ψ⁻¹(pos)` when `pos` is in the support.
    pub fn inverse(&self, pos: i64) -> Option<i64> {
        let first = self.values[0];
        let last = self.values[self.values.len() - 1];
        if pos < first {
            let d = first - pos;
            (d % self.gap == 0).then(|| self.lo - d / self.gap)
        } else if pos > last {
            let d = pos - last;
            (d % self.gap == 0).then(|| self.hi() + d / self.gap)
        } else {
            self.values.binary_search(&pos).ok().map(|k| self.lo + k as i64)
        }
    }

    pub fn is_support(&self, pos: i64) -> bool {
        self.inverse(pos).is_some()
    }

    /// Step of the periodic tails.
    pub fn tail_gap(&self) -> i64 {
        self.gap
    }

    /// Largest distance between consecutive support cells.
    pub fn max_gap(&self) -> i64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(self.gap, i64::max)
    }

    /// Smallest `ψ(i + 2) − ψ(i)`.
    pub fn min_span2(&self) -> i64 {
        let (lo, hi) = self.sampled_range();
        (lo - 2..=hi).map(|i| self.apply(i + 2) - self.apply(i)).min().expect("range is non-empty")
    }

    pub fn is_identity(&self) -> bool {
        self.gap == 1 && self.values.windows(2).all(|w| w[1] - w[0] == 1) && self.values[0] == self.lo
    }
}

/// Marker at `ψ(−1)`, input on `ψ(0..n)`, settled blanks on the rest of
/// the support, inactive blanks (`ξ = 3`) everywhere else.
pub fn construction3_initial(
    tm: &TuringMachine,
    input: &[Symbol],
    scatter: &ScatterMap,
) -> Result<Configuration, CompileError> {
    check_input(tm, input)?;
    let n = input.len() as i64;
    let period = scatter.tail_gap();
    let phase = scatter.apply(scatter.hi()).rem_euclid(period);
    let pattern = (0..period)
        .map(|r| filler(tm, tm.blank(), if r == phase { SETTLED } else { INACTIVE }))
        .collect();
    let background = Background::periodic(pattern).expect("period is at least 1");
    let (s_lo, s_hi) = scatter.sampled_range();
    let lo = scatter.apply(s_lo.min(-1));
    let hi = scatter.apply(s_hi.max(n));
    let marker = scatter.apply(-1);
    let cells = (lo..=hi)
        .map(|pos| {
            if pos == marker {
                return head_marker(tm);
            }
            match scatter.inverse(pos) {
                Some(i) if (0..n).contains(&i) => filler(tm, input[i as usize], SETTLED),
                Some(_) => filler(tm, tm.blank(), SETTLED),
                None => filler(tm, tm.blank(), INACTIVE),
            }
        })
        .collect();
    Ok(Configuration::new(lo, cells, background))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aca::{project, reindex, Component, ComponentValue};
    use crate::tm::{parse_tm, zigzag_machine};

    fn zz() -> TuringMachine {
        zigzag_machine()
    }

    fn cell(tm: &TuringMachine, g: &str, q: &str, d: Move, c: u8) -> ProductSymbol {
        ProductSymbol::new(tm.symbol(g).unwrap(), tm.state(q).unwrap(), d, c)
    }

    #[test]
    fn alphabet_sizes() {
        let tm = zz();
        assert_eq!(construction1(&tm).alphabet().len(), 36);
        assert_eq!(construction2(&tm).alphabet().len(), 24);
        assert_eq!(construction3(&tm, 2).unwrap().alphabet().len(), 48);
        assert_eq!(construction1(&tm).radius(), 1);
        assert_eq!(construction3(&tm, 4).unwrap().radius(), 4);
        assert_eq!(construction3(&tm, 0), Err(CompileError::BadGap(0)));
    }

    #[test]
    fn strict_fire_clause() {
        let tm = zz();
        let rule = construction1(&tm);
        for q in ["qR", "qL"] {
            for d in [Move::L, Move::R] {
                let out = rule.apply(&[cell(&tm, "_", "qR", Move::R, 1), cell(&tm, "_", q, d, 2), cell(&tm, "0", "qL", Move::R, 2)]);
                assert_eq!(out, cell(&tm, "1", "qL", Move::L, 0));
            }
        }
    }

    #[test]
    fn strict_promote_clause() {
        let tm = zz();
        let rule = construction1(&tm);
        let v = cell(&tm, "0", "qL", Move::L, 0);
        let out = rule.apply(&[cell(&tm, "1", "qR", Move::R, 2), v, cell(&tm, "_", "qR", Move::R, 2)]);
        assert_eq!(out, v.with_ctl(1));
    }

    #[test]
    fn strict_otherwise() {
        let tm = zz();
        let rule = construction1(&tm);
        let v = cell(&tm, "1", "qR", Move::L, 2);
        assert_eq!(rule.apply(&[v, v, v]), v);
    }

    #[test]
    fn guard_blocks_early_promotion() {
        let tm = zz();
        let marker = cell(&tm, "0", "qR", Move::R, 1);
        let written = cell(&tm, "1", "qR", Move::R, 0);
        let stale = cell(&tm, "1", "qL", Move::L, 2);
        let published = construction1_with(&tm, ClauseTable::AsPublished);
        assert_eq!(published.apply(&[marker, written, stale]).ctl, 1);
        assert_eq!(construction1(&tm).apply(&[marker, written, stale]), written);
    }

    #[test]
    fn initial_configuration_projections() {
        let tm = zz();
        let x = tm.parse_word("01").unwrap();
        let cfg = construction1_initial(&tm, &x).unwrap();
        let g = project(&cfg, Component::Gamma, -2, 2).unwrap();
        let names: Vec<&str> = g
            .iter()
            .map(|v| match v {
                ComponentValue::Gamma(s) => tm.symbol_name(*s),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(names, ["_", "_", "0", "1", "_"]);
        let c = project(&cfg, Component::Ctl, -2, 2).unwrap();
        assert_eq!(c, [2, 1, 2, 2, 2].map(ComponentValue::Ctl));
        let bparts: Vec<_> = (-5..=5).map(|i| cfg.get(i).control_part()).collect();
        let odd = bparts.iter().filter(|b| **b != bparts[0]).count();
        assert_eq!(odd, 1);
    }

    #[test]
    fn empty_input_has_single_marker() {
        let tm = zz();
        let cfg = construction1_initial(&tm, &[]).unwrap();
        assert_eq!(cfg.trimmed().window(), Some((-1, -1)));
    }

    #[test]
    fn bad_input_symbol() {
        let tm = zz();
        let blank = tm.blank();
        assert_eq!(construction1_initial(&tm, &[blank]), Err(CompileError::NotInput("_".into())));
    }

    #[test]
    fn headless_clauses() {
        let tm = zz();
        let rule = construction2(&tm);
        let cfg = construction2_initial(&tm, &[]).unwrap();
        let c1 = cfg.async_step(&rule, 0);
        assert_eq!(c1.get(0), cell(&tm, "1", "qL", Move::L, 1));
        // cell 0 now points left; the old marker is demoted by the fallback
        let c2 = c1.async_step(&rule, -1);
        let expected = ProductSymbol::new(tm.blank(), tm.initial(), Move::R, 2);
        assert_ne!(c2.get(-1), expected);
        assert_eq!(c2.get(-1).ctl, 1, "cell 0 points left at cell -1, so -1 fires");

        let c2 = cfg.async_step(&rule, -1);
        assert_eq!(c2.get(-1), expected);

        let v = cell(&tm, "1", "qR", Move::L, 2);
        assert_eq!(rule.apply(&[v, v, v]), v);
    }

    #[test]
    fn scattered_fire_through_inactive_cell() {
        let tm = zz();
        let rule = construction3(&tm, 2).unwrap();
        let marker = cell(&tm, "_", "qR", Move::R, 1);
        let off = cell(&tm, "_", "qR", Move::R, 3);
        let v = cell(&tm, "_", "qR", Move::R, 2);
        let out = rule.apply(&[marker, off, v, off, off]);
        assert_eq!(out, cell(&tm, "1", "qL", Move::L, 0));
        assert_eq!(rule.matching_clauses(&[marker, off, v, off, off]), vec![1]);
    }

    #[test]
    fn scattered_inactive_surroundings_leave_center() {
        let tm = zz();
        let rule = construction3(&tm, 3).unwrap();
        let off = cell(&tm, "1", "qL", Move::L, 3);
        for c in 0..=3 {
            let v = cell(&tm, "0", "qR", Move::R, c);
            let mut n = vec![off; 7];
            n[3] = v;
            assert_eq!(rule.apply(&n), v);
        }
    }

    #[test]
    fn scattered_gap_one_agrees_with_strict_exhaustively() {
        let src = "machine t\nblank _\ninput a b\nwork a b _\nstates s0 s1\ninitial s0\nfinal\n\
                   delta s0 a -> s1 b R\ndelta s0 b -> s0 _ L\ndelta s0 _ -> s1 a L\n\
                   delta s1 a -> s0 a R\ndelta s1 b -> s1 b L\ndelta s1 _ -> s0 b R\n";
        let tm = parse_tm(src).unwrap();
        for table in [ClauseTable::Guarded, ClauseTable::AsPublished] {
            let c1 = construction1_with(&tm, table);
            let c3 = construction3_with(&tm, 1, table).unwrap();
            let alpha = c1.alphabet();
            for &u in &alpha {
                for &v in &alpha {
                    for &z in &alpha {
                        let n = [u, v, z];
                        assert_eq!(c1.apply(&n), c3.apply(&n));
                        assert_eq!(c1.matching_clauses(&n), c3.matching_clauses(&n));
                    }
                }
            }
        }
    }

    #[test]
    fn scattered_initial_gap_two() {
        let tm = zz();
        let x = tm.parse_word("1").unwrap();
        let psi = ScatterMap::arithmetic(2).unwrap();
        let cfg = construction3_initial(&tm, &x, &psi).unwrap();
        assert_eq!(cfg.get(-2), head_marker(&tm));
        assert_eq!(cfg.get(0), filler(&tm, tm.symbol("1").unwrap(), 2));
        for odd in [-7, -3, -1, 1, 3, 99] {
            assert_eq!(cfg.get(odd).ctl, 3, "{odd}");
        }
        for even in [-8, 2, 4, 100] {
            assert_eq!(cfg.get(even), filler(&tm, tm.blank(), 2));
        }
    }

    #[test]
    fn scattered_initial_identity_matches_strict() {
        let tm = zz();
        let x = tm.parse_word("0110").unwrap();
        let a = construction3_initial(&tm, &x, &ScatterMap::identity()).unwrap();
        let b = construction1_initial(&tm, &x).unwrap();
        assert!(a.same_as(&b));
        assert!((-20..20).all(|i| a.get(i).ctl != 3));
    }

    #[test]
    fn scattered_initial_reindexes_to_strict() {
        let tm = zz();
        let x = tm.parse_word("101").unwrap();
        let strict = construction1_initial(&tm, &x).unwrap();
        for p in 1..=4 {
            let psi = ScatterMap::arithmetic(p).unwrap();
            let cfg = construction3_initial(&tm, &x, &psi).unwrap();
            let re = reindex(&cfg, |i| psi.apply(i), -6, 8).unwrap();
            let direct: Vec<_> = (-6..=8).map(|i| strict.get(i)).collect();
            assert_eq!(re, direct, "p = {p}");
        }
    }

    #[test]
    fn sampled_scatter() {
        let psi = ScatterMap::sampled(-1, vec![-3, 0, 1, 3], 3).unwrap();
        assert_eq!(psi.apply(-2), -6);
        assert_eq!(psi.apply(1), 1);
        assert_eq!(psi.apply(3), 6);
        assert_eq!(psi.inverse(6), Some(3));
        assert_eq!(psi.inverse(5), None);
        assert_eq!(psi.inverse(-9), Some(-3));
        assert_eq!(psi.max_gap(), 3);
        assert!(ScatterMap::sampled(0, vec![0, 0], 1).is_err());
        assert!(ScatterMap::sampled(0, vec![0, 1], 2).is_err());
        assert!(!psi.is_identity());
        assert!(ScatterMap::arithmetic(1).unwrap().is_identity());
    }
}
