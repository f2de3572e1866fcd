//! Co-runs a Turing machine and its compiled automaton and checks the
//! strict (and scattered strict) simulation conditions.
//!
//! Condition 1 is checked on the starting configuration. For every
//! machine time `t ≤ T` the verifier looks for the first automaton time
//! `t'_t` whose configuration encodes `T_t`, then requires the `t'_t` to
//! be strictly increasing.
//!
//! Two notions of "encodes" are available. [`MatchMode::TapeOnly`]
//! compares the Γ-projection with the tape alone. Tape contents do not
//! identify a machine time on their own (a step that rewrites the symbol
//! it reads leaves the tape unchanged, and the freshly written cell
//! already shows `T_{t+1}` before the marker has moved), so the default
//! [`MatchMode::Encoded`] additionally requires the marker that the
//! construction keeps next to the head: one cell with `ξ = 1` at the
//! previous head position `p_{t−1}` (with `p_{−1} = −1`), carrying `q_t`
//! and pointing at `p_t`, and no cell with `ξ = 0`.

use std::collections::{BTreeSet, HashSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::aca::{AcaTrace, Configuration, Simulator};
use crate::constructions::{
    construction1_initial, construction3_initial, ctl, CompileError, CompiledAca, ConstructionKind, ScatterMap,
};
use crate::sequences::{SeqKind, UpdateSequence};
use crate::tm::{tm_run, Move, RunTrace, Symbol, TuringMachine};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("construction {got} cannot be checked here (expected {expected})")]
    WrongConstruction { expected: &'static str, got: u8 },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("gap exceeds radius: scatter gap {gap} but rule radius {radius}")]
    GapExceedsRadius { gap: i64, radius: usize },
    #[error("support too dense: cells {span} apart two steps over, rule radius {radius}")]
    CrowdedSupport { span: i64, radius: usize },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("rule does not fix the background: {0}")]
    Background(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    BudgetExceeded { tm_time: usize },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        *self == Verdict::Pass
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail(_) => "FAIL",
            Verdict::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    #[default]
    Encoded,
    TapeOnly,
}

/// Closed-form update counts for the canonical construction/sequence pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFormula {
    /// Construction 1 with the quadratic sequence: `(3T+4)(T+1)/2`.
    Quadratic,
    /// Construction 2 with the sweep sequence: `(T+1)(T+2)/2`.
    Sweep,
    /// Construction 3 with the scattered sequence: `6pT² + 6pT + 3T`.
    Scattered { p: u64 },
}

impl BoundFormula {
    pub fn for_pair(construction: u8, seq: &UpdateSequence) -> Option<BoundFormula> {
        match (construction, seq.kind()) {
            (1, SeqKind::Quadratic) => Some(BoundFormula::Quadratic),
            (2, SeqKind::Sweep) => Some(BoundFormula::Sweep),
            (3, SeqKind::Scattered { p }) => Some(BoundFormula::Scattered { p: *p as u64 }),
            _ => None,
        }
    }

    pub fn value(self, t: u64) -> u64 {
        match self {
            BoundFormula::Quadratic => (3 * t + 4) * (t + 1) / 2,
            BoundFormula::Sweep => (t + 1) * (t + 2) / 2,
            BoundFormula::Scattered { p } => 6 * p * t * t + 6 * p * t + 3 * t,
        }
    }

    pub fn id(self) -> String {
        match self {
            BoundFormula::Quadratic => "(3T+4)(T+1)/2".into(),
            BoundFormula::Sweep => "(T+1)(T+2)/2".into(),
            BoundFormula::Scattered { p } => format!("6*{p}*T^2+6*{p}*T+3T"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub formula: String,
    pub value: u64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationReport {
    pub verdict: Verdict,
    /// `(t, t'_t)` for every matched machine time, in order of `t`.
    pub matches: Vec<(usize, u64)>,
    pub monotone_ok: bool,
    pub initial_ok: bool,
    pub budget_used: u64,
    /// Machine steps checked: the requested `T`, or the halting time if
    /// the machine halts first.
    pub tm_steps: usize,
    pub bound: Option<BoundCheck>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tm_time: Option<usize>,
    matches: &'a [(usize, u64)],
    budget_used: u64,
    bound: &'a Option<BoundCheck>,
    initial_ok: bool,
    monotone_ok: bool,
}

impl SimulationReport {
    pub fn to_json(&self) -> serde_json::Value {
        let (reason, tm_time) = match &self.verdict {
            Verdict::Pass => (None, None),
            Verdict::Fail(r) => (Some(r.as_str()), None),
            Verdict::BudgetExceeded { tm_time } => (None, Some(*tm_time)),
        };
        serde_json::to_value(ReportJson {
            verdict: self.verdict.label(),
            reason,
            tm_time,
            matches: &self.matches,
            budget_used: self.budget_used,
            bound: &self.bound,
            initial_ok: self.initial_ok,
            monotone_ok: self.monotone_ok,
        })
        .expect("report serializes")
    }

    pub fn tprime(&self, t: usize) -> Option<u64> {
        self.matches.iter().find(|m| m.0 == t).map(|m| m.1)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub mode: MatchMode,
    /// Overrides the formula picked by [`BoundFormula::for_pair`].
    pub bound: Option<BoundFormula>,
}

pub fn verify_strict(
    tm: &TuringMachine,
    input: &[Symbol],
    compiled: &CompiledAca,
    seq: &UpdateSequence,
    tm_steps: usize,
    budget: u64,
) -> Result<SimulationReport, VerifyError> {
    verify_strict_with(tm, input, compiled, seq, tm_steps, budget, &VerifyOptions::default())
}

pub fn verify_strict_with(
    tm: &TuringMachine,
    input: &[Symbol],
    compiled: &CompiledAca,
    seq: &UpdateSequence,
    tm_steps: usize,
    budget: u64,
    opts: &VerifyOptions,
) -> Result<SimulationReport, VerifyError> {
    if !matches!(compiled.kind(), ConstructionKind::Strict | ConstructionKind::Headless) {
        return Err(VerifyError::WrongConstruction { expected: "1 or 2", got: compiled.construction_id() });
    }
    let initial = construction1_initial(tm, input)?;
    run(tm, input, compiled, None, initial, seq, tm_steps, budget, opts)
}

pub fn verify_scattered(
    tm: &TuringMachine,
    input: &[Symbol],
    compiled: &CompiledAca,
    scatter: &ScatterMap,
    seq: &UpdateSequence,
    tm_steps: usize,
    budget: u64,
) -> Result<SimulationReport, VerifyError> {
    verify_scattered_with(tm, input, compiled, scatter, seq, tm_steps, budget, &VerifyOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn verify_scattered_with(
    tm: &TuringMachine,
    input: &[Symbol],
    compiled: &CompiledAca,
    scatter: &ScatterMap,
    seq: &UpdateSequence,
    tm_steps: usize,
    budget: u64,
    opts: &VerifyOptions,
) -> Result<SimulationReport, VerifyError> {
    let ConstructionKind::Scattered { gap } = compiled.kind() else {
        return Err(VerifyError::WrongConstruction { expected: "3", got: compiled.construction_id() });
    };
    if scatter.max_gap() > gap as i64 {
        return Err(VerifyError::GapExceedsRadius { gap: scatter.max_gap(), radius: gap });
    }
    // with two support cells on one side inside the window, the nearest-ctl
    // lookup can see past the true neighbor
    if scatter.min_span2() <= gap as i64 {
        return Err(VerifyError::CrowdedSupport { span: scatter.min_span2(), radius: gap });
    }
    let initial = construction3_initial(tm, input, scatter)?;
    run(tm, input, compiled, Some(scatter), initial, seq, tm_steps, budget, opts)
}

/// Maps machine cells to automaton cells.
struct Layout<'a> {
    psi: Option<&'a ScatterMap>,
    /// Machine cells compared explicitly.
    lo: i64,
    hi: i64,
}

impl Layout<'_> {
    fn pos(&self, i: i64) -> i64 {
        self.psi.map_or(i, |s| s.apply(i))
    }

    fn index(&self, pos: i64) -> Option<i64> {
        match self.psi {
            Some(s) => s.inverse(pos),
            None => Some(pos),
        }
    }

    fn compared(&self, pos: i64) -> bool {
        self.index(pos).is_some_and(|i| (self.lo..=self.hi).contains(&i))
    }
}

/// Counters kept in step with the evolving configuration.
struct Tally {
    written: usize,
    markers: usize,
    /// Support cells outside the compared range holding a non-blank symbol.
    stray: usize,
}

#[allow(clippy::too_many_arguments)]
fn run(
    tm: &TuringMachine,
    input: &[Symbol],
    compiled: &CompiledAca,
    psi: Option<&ScatterMap>,
    initial: Configuration,
    seq: &UpdateSequence,
    tm_steps: usize,
    budget: u64,
    opts: &VerifyOptions,
) -> Result<SimulationReport, VerifyError> {
    if budget == 0 {
        return Err(VerifyError::ZeroBudget);
    }
    let oracle = tm_run(tm, input, tm_steps);
    let t_max = oracle.configs.len() - 1;
    let reach = t_max as i64 + 1;
    let layout = Layout { psi, lo: -reach, hi: input.len() as i64 + reach };
    let initial_ok = condition_one(tm, input, &initial, &layout);
    let headless = compiled.kind() == ConstructionKind::Headless;

    let (wlo, whi) = initial.window().unwrap_or((0, 0));
    let mut tally = Tally { written: 0, markers: 0, stray: 0 };
    for pos in wlo.min(layout.pos(layout.lo))..=whi.max(layout.pos(layout.hi)) {
        let c = initial.get(pos);
        if layout.index(pos).is_none() {
            continue;
        }
        tally.written += (c.ctl == ctl::WRITTEN) as usize;
        tally.markers += (c.ctl == ctl::MARKER) as usize;
        tally.stray += (!layout.compared(pos) && c.gamma != tm.blank()) as usize;
    }

    let mut sim = Simulator::new(initial, compiled).map_err(|e| VerifyError::Background(e.to_string()))?;
    let mut found: Vec<Option<u64>> = vec![None; t_max + 1];
    let mut remaining = t_max + 1;
    let encodes = |cfg: &Configuration, tally: &Tally, t: usize| {
        encodes(tm, &oracle, &layout, cfg, tally, t, opts.mode, headless)
    };
    for (t, slot) in found.iter_mut().enumerate() {
        if encodes(sim.config(), &tally, t) {
            *slot = Some(0);
            remaining -= 1;
        }
    }
    let mut positions = seq.iter();
    while remaining > 0 && sim.time() < budget {
        let Some(pos) = positions.next() else { break };
        let u = sim.step(pos);
        if u.old == u.new {
            continue;
        }
        if layout.index(pos).is_some() {
            tally.written = tally.written + (u.new.ctl == ctl::WRITTEN) as usize - (u.old.ctl == ctl::WRITTEN) as usize;
            tally.markers = tally.markers + (u.new.ctl == ctl::MARKER) as usize - (u.old.ctl == ctl::MARKER) as usize;
            if !layout.compared(pos) {
                tally.stray = tally.stray + (u.new.gamma != tm.blank()) as usize - (u.old.gamma != tm.blank()) as usize;
            }
        }
        for (t, slot) in found.iter_mut().enumerate() {
            if slot.is_none() && encodes(sim.config(), &tally, t) {
                *slot = Some(sim.time());
                remaining -= 1;
            }
        }
    }

    let matches: Vec<(usize, u64)> =
        found.iter().enumerate().filter_map(|(t, k)| k.map(|k| (t, k))).collect();
    let monotone_ok = matches.windows(2).all(|w| w[0].1 < w[1].1);
    let verdict = if let Some(t) = found.iter().position(Option::is_none) {
        Verdict::BudgetExceeded { tm_time: t }
    } else if !initial_ok {
        Verdict::Fail("initial configuration does not encode the input".into())
    } else if !monotone_ok {
        let w = matches.windows(2).find(|w| w[0].1 >= w[1].1).unwrap();
        Verdict::Fail(format!("non-monotone: t'_{} = {} but t'_{} = {}", w[0].0, w[0].1, w[1].0, w[1].1))
    } else {
        Verdict::Pass
    };
    let budget_used = if verdict.is_pass() { matches.last().map_or(0, |m| m.1) } else { sim.time() };
    let formula = opts.bound.or_else(|| BoundFormula::for_pair(compiled.construction_id(), seq));
    let bound = formula.map(|f| {
        let value = f.value(t_max as u64);
        BoundCheck { formula: f.id(), value, ok: verdict.is_pass() && budget_used <= value }
    });
    Ok(SimulationReport { verdict, matches, monotone_ok, initial_ok, budget_used, tm_steps: t_max, bound })
}

#[allow(clippy::too_many_arguments)]
fn encodes(
    tm: &TuringMachine,
    oracle: &RunTrace,
    layout: &Layout<'_>,
    cfg: &Configuration,
    tally: &Tally,
    t: usize,
    mode: MatchMode,
    headless: bool,
) -> bool {
    if tally.stray != 0 {
        return false;
    }
    let tm_cfg = &oracle.configs[t];
    if mode == MatchMode::Encoded {
        if !headless && (tally.written != 0 || tally.markers != 1) {
            return false;
        }
        let prev = oracle.head_before(t);
        let m = cfg.get(layout.pos(prev));
        let dir = Move::from_offset(tm_cfg.head - prev);
        if m.ctl != ctl::MARKER || m.state != tm_cfg.state || Some(m.dir) != dir {
            return false;
        }
    }
    (layout.lo..=layout.hi).all(|i| cfg.get(layout.pos(i)).gamma == tm_cfg.read(tm.blank(), i))
}

/// Tape `𝔟 x 𝔟` through the layout, one cell whose `Q × D × C` part
/// differs from an otherwise constant value on the support, and a
/// constant value off the support.
fn condition_one(tm: &TuringMachine, input: &[Symbol], cfg: &Configuration, layout: &Layout<'_>) -> bool {
    let tape_ok = (layout.lo..=layout.hi).all(|i| {
        let want = usize::try_from(i).ok().and_then(|i| input.get(i)).copied().unwrap_or(tm.blank());
        cfg.get(layout.pos(i)).gamma == want
    });
    let bg = cfg.background();
    let (lo, hi) = cfg.window().unwrap_or((0, 0));
    let mut on_support = Vec::new();
    let mut off_support = HashSet::new();
    // classify residues on cells past both ends, where only the tails of ψ apply
    let period = bg.period() as i64;
    for pos in (lo - period..lo).chain(hi + 1..=hi + period) {
        match layout.index(pos) {
            Some(_) => on_support.push(bg.at(pos).control_part()),
            None => {
                off_support.insert(bg.at(pos));
            }
        }
    }
    if on_support.windows(2).any(|w| w[0] != w[1]) || on_support.is_empty() {
        return false;
    }
    let settled = on_support[0];
    let mut odd = 0;
    for pos in lo..=hi {
        let c = cfg.get(pos);
        match layout.index(pos) {
            Some(_) => odd += (c.control_part() != settled) as usize,
            None => {
                off_support.insert(c);
            }
        }
    }
    tape_ok && odd == 1 && off_support.len() <= 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlowdownProfile {
    /// `t'_{t+1} − t'_t` for each matched `t`.
    pub per_step_cost: Vec<u64>,
    /// Coefficients `(a, b, c)` of the least-squares fit `t' ≈ a t² + b t + c`.
    pub fit: Option<(f64, f64, f64)>,
    pub bound_formula_id: Option<String>,
}

impl SlowdownProfile {
    pub fn leading_coefficient(&self) -> Option<f64> {
        self.fit.map(|f| f.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("slowdown profile needs a passing report (verdict {0})")]
pub struct ProfileError(pub &'static str);

pub fn slowdown_profile(report: &SimulationReport) -> Result<SlowdownProfile, ProfileError> {
    if !report.verdict.is_pass() {
        return Err(ProfileError(report.verdict.label()));
    }
    let per_step_cost = report.matches.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let fit = (report.matches.len() >= 3).then(|| {
        let n = report.matches.len();
        let a = DMatrix::from_fn(n, 3, |r, c| (report.matches[r].0 as f64).powi(2 - c as i32));
        let y = DVector::from_iterator(n, report.matches.iter().map(|m| m.1 as f64));
        let sol = a.svd(true, true).solve(&y, 1e-12).expect("svd with both factors");
        (sol[0], sol[1], sol[2])
    });
    Ok(SlowdownProfile {
        per_step_cost,
        fit,
        bound_formula_id: report.bound.as_ref().map(|b| b.formula.clone()),
    })
}

/// Whether every configuration of the trace has `(#ξ=0, #ξ=1)` in
/// `{(0,1), (1,1), (1,0)}`, with the two cells adjacent when both exist.
pub fn check_construction1_control_invariant(trace: &AcaTrace) -> bool {
    first_control_violation(trace).is_none()
}

/// Number of updates after which the invariant first fails (0 for the
/// starting configuration).
pub fn first_control_violation(trace: &AcaTrace) -> Option<usize> {
    let bg = trace.initial.background();
    if (0..bg.period() as i64).any(|r| matches!(bg.at(r).ctl, ctl::WRITTEN | ctl::MARKER)) {
        return Some(0);
    }
    let mut zero = BTreeSet::new();
    let mut one = BTreeSet::new();
    if let Some((lo, hi)) = trace.initial.window() {
        for pos in lo..=hi {
            match trace.initial.get(pos).ctl {
                ctl::WRITTEN => zero.insert(pos),
                ctl::MARKER => one.insert(pos),
                _ => false,
            };
        }
    }
    let ok = |zero: &BTreeSet<i64>, one: &BTreeSet<i64>| match (zero.len(), one.len()) {
        (0, 1) | (1, 0) => true,
        (1, 1) => (zero.first().unwrap() - one.first().unwrap()).abs() == 1,
        _ => false,
    };
    if !ok(&zero, &one) {
        return Some(0);
    }
    for (k, u) in trace.updates.iter().enumerate() {
        if u.old.ctl == u.new.ctl {
            continue;
        }
        for (c, present) in [(u.old.ctl, false), (u.new.ctl, true)] {
            let set = match c {
                ctl::WRITTEN => &mut zero,
                ctl::MARKER => &mut one,
                _ => continue,
            };
            if present {
                set.insert(u.pos);
            } else {
                set.remove(&u.pos);
            }
        }
        if !ok(&zero, &one) {
            return Some(k + 1);
        }
    }
    None
}
