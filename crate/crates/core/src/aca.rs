//! Fully asynchronous cellular automata over the product alphabet
//! `Γ × Q × D × C`.
//!
//! A [`Configuration`] is a bi-infinite row of cells stored as a finite
//! window plus a periodic background. Every rule shipped by the crate maps
//! an all-background neighborhood to background, so the representation is
//! exact: cells outside the window never need to be materialized until
//! they change.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tm::{Move, State, Symbol};

/// One cell value `(γ, q, d, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductSymbol {
    pub gamma: Symbol,
    pub state: State,
    pub dir: Move,
    pub ctl: u8,
}

impl ProductSymbol {
    pub fn new(gamma: Symbol, state: State, dir: Move, ctl: u8) -> Self {
        ProductSymbol { gamma, state, dir, ctl }
    }

    pub fn with_ctl(self, ctl: u8) -> Self {
        ProductSymbol { ctl, ..self }
    }

    pub fn component(&self, c: Component) -> ComponentValue {
        match c {
            Component::Gamma => ComponentValue::Gamma(self.gamma),
            Component::State => ComponentValue::State(self.state),
            Component::Dir => ComponentValue::Dir(self.dir),
            Component::Ctl => ComponentValue::Ctl(self.ctl),
        }
    }

    /// Everything but the tape symbol: the `B` part of `A = Γ × B`.
    pub fn control_part(&self) -> (State, Move, u8) {
        (self.state, self.dir, self.ctl)
    }
}

/// Coordinates of the product alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Gamma,
    State,
    Dir,
    Ctl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentValue {
    Gamma(Symbol),
    State(State),
    Dir(Move),
    Ctl(u8),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcaError {
    #[error("update sequence exhausted after {0} updates")]
    SequenceExhausted(u64),
    #[error("rule does not fix the background at residue {residue}")]
    BackgroundNotQuiescent { residue: usize },
    #[error("reindexing map is not increasing at index {0}")]
    NonMonotone(i64),
    #[error("empty range [{0}, {1}]")]
    EmptyRange(i64, i64),
    #[error("background pattern must be non-empty")]
    EmptyBackground,
}

/// A local rule `λ: A^{2r+1} → A`, realized as a decision procedure.
pub trait LocalRule {
    fn radius(&self) -> usize;

    /// `neighborhood` has length `2r + 1`, with the center at index `r`.
    fn apply(&self, neighborhood: &[ProductSymbol]) -> ProductSymbol;
}

impl<R: LocalRule + ?Sized> LocalRule for &R {
    fn radius(&self) -> usize {
        (**self).radius()
    }

    fn apply(&self, neighborhood: &[ProductSymbol]) -> ProductSymbol {
        (**self).apply(neighborhood)
    }
}

/// Cell values outside the window, repeating with period `pattern.len()`:
/// position `i` reads `pattern[i mod period]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Background {
    pattern: Vec<ProductSymbol>,
}

impl Background {
    pub fn uniform(sym: ProductSymbol) -> Self {
        Background { pattern: vec![sym] }
    }

    pub fn periodic(pattern: Vec<ProductSymbol>) -> Result<Self, AcaError> {
        if pattern.is_empty() {
            return Err(AcaError::EmptyBackground);
        }
        Ok(Background { pattern })
    }

    pub fn period(&self) -> usize {
        self.pattern.len()
    }

    pub fn pattern(&self) -> &[ProductSymbol] {
        &self.pattern
    }

    pub fn at(&self, pos: i64) -> ProductSymbol {
        self.pattern[pos.rem_euclid(self.pattern.len() as i64) as usize]
    }
}

/// A configuration `c: ℤ → A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    lo: i64,
    cells: Vec<ProductSymbol>,
    background: Background,
}

impl Configuration {
    pub fn uniform(background: ProductSymbol) -> Self {
        Configuration { lo: 0, cells: Vec::new(), background: Background::uniform(background) }
    }

    pub fn new(lo: i64, cells: Vec<ProductSymbol>, background: Background) -> Self {
        Configuration { lo, cells, background }
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// Inclusive window `[lo, hi]`; `None` when nothing is stored.
    pub fn window(&self) -> Option<(i64, i64)> {
        if self.cells.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.cells.len() as i64 - 1))
        }
    }

    pub fn cells(&self) -> &[ProductSymbol] {
        &self.cells
    }

    pub fn get(&self, pos: i64) -> ProductSymbol {
        let off = pos - self.lo;
        if off >= 0 && (off as usize) < self.cells.len() {
            self.cells[off as usize]
        } else {
            self.background.at(pos)
        }
    }

    /// Writes `sym` at `pos`, growing the window only when the value
    /// differs from the background there.
    pub fn set(&mut self, pos: i64, sym: ProductSymbol) {
        if self.cells.is_empty() {
            if sym != self.background.at(pos) {
                self.lo = pos;
                self.cells.push(sym);
            }
            return;
        }
        let hi = self.lo + self.cells.len() as i64 - 1;
        if pos < self.lo {
            if sym == self.background.at(pos) {
                return;
            }
            let grow = (self.lo - pos) as usize;
            let mut cells: Vec<ProductSymbol> = (pos..self.lo).map(|i| self.background.at(i)).collect();
            debug_assert_eq!(cells.len(), grow);
            cells.append(&mut self.cells);
            self.cells = cells;
            self.lo = pos;
        } else if pos > hi {
            if sym == self.background.at(pos) {
                return;
            }
            self.cells.extend((hi + 1..=pos).map(|i| self.background.at(i)));
        }
        let off = (pos - self.lo) as usize;
        self.cells[off] = sym;
    }

    /// Ensures the window covers `[lo, hi]`.
    pub fn widen(&mut self, lo: i64, hi: i64) {
        if lo > hi {
            return;
        }
        let (cur_lo, cur_hi) = self.window().unwrap_or((lo, lo - 1));
        let new_lo = cur_lo.min(lo);
        let new_hi = cur_hi.max(hi);
        let cells = (new_lo..=new_hi).map(|i| self.get(i)).collect();
        self.lo = new_lo;
        self.cells = cells;
    }

    pub fn neighborhood_into(&self, pos: i64, radius: usize, buf: &mut Vec<ProductSymbol>) {
        buf.clear();
        let r = radius as i64;
        buf.extend((pos - r..=pos + r).map(|i| self.get(i)));
    }

    pub fn neighborhood(&self, pos: i64, radius: usize) -> Vec<ProductSymbol> {
        let mut buf = Vec::with_capacity(2 * radius + 1);
        self.neighborhood_into(pos, radius, &mut buf);
        buf
    }

    /// Same configuration with the rule applied at `pos` only.
    pub fn async_step<R: LocalRule + ?Sized>(&self, rule: &R, pos: i64) -> Configuration {
        let mut next = self.clone();
        let new = rule.apply(&self.neighborhood(pos, rule.radius()));
        next.set(pos, new);
        next
    }

    /// Rule applied at every position simultaneously.
    pub fn sync_step<R: LocalRule + ?Sized>(&self, rule: &R) -> Configuration {
        let Some((lo, hi)) = self.window() else {
            return self.clone();
        };
        let r = rule.radius() as i64;
        let mut next = Configuration::new(0, Vec::new(), self.background.clone());
        let mut buf = Vec::new();
        for pos in lo - r..=hi + r {
            self.neighborhood_into(pos, rule.radius(), &mut buf);
            next.set(pos, rule.apply(&buf));
        }
        next
    }

    /// Drops leading and trailing cells equal to the background.
    pub fn trimmed(&self) -> Configuration {
        let Some((lo, hi)) = self.window() else {
            return self.clone();
        };
        let first = (lo..=hi).find(|&i| self.get(i) != self.background.at(i));
        let Some(first) = first else {
            return Configuration::new(0, Vec::new(), self.background.clone());
        };
        let last = (lo..=hi).rev().find(|&i| self.get(i) != self.background.at(i)).unwrap();
        Configuration::new(first, (first..=last).map(|i| self.get(i)).collect(), self.background.clone())
    }

    /// Equality as functions `ℤ → A`, independent of window extent.
    pub fn same_as(&self, other: &Configuration) -> bool {
        self.trimmed() == other.trimmed()
    }
}

/// Checks that `rule` maps every all-background neighborhood to background.
pub fn check_background_closure<R: LocalRule + ?Sized>(
    rule: &R,
    background: &Background,
) -> Result<(), AcaError> {
    let empty = Configuration::new(0, Vec::new(), background.clone());
    for residue in 0..background.period() {
        let pos = residue as i64;
        if rule.apply(&empty.neighborhood(pos, rule.radius())) != background.at(pos) {
            return Err(AcaError::BackgroundNotQuiescent { residue });
        }
    }
    Ok(())
}

/// Componentwise projection `Π_X(c)` over `[a, b]`.
pub fn project(cfg: &Configuration, component: Component, a: i64, b: i64) -> Result<Vec<ComponentValue>, AcaError> {
    if a > b {
        return Err(AcaError::EmptyRange(a, b));
    }
    Ok((a..=b).map(|i| cfg.get(i).component(component)).collect())
}

/// `c^ψ` read over `[a, b]`: the sequence `c_{ψ(a)}, …, c_{ψ(b)}`.
pub fn reindex(
    cfg: &Configuration,
    psi: impl Fn(i64) -> i64,
    a: i64,
    b: i64,
) -> Result<Vec<ProductSymbol>, AcaError> {
    if a > b {
        return Err(AcaError::EmptyRange(a, b));
    }
    let mut out = Vec::with_capacity((b - a + 1) as usize);
    let mut prev = None;
    for i in a..=b {
        let p = psi(i);
        if prev.is_some_and(|q| p <= q) {
            return Err(AcaError::NonMonotone(i));
        }
        prev = Some(p);
        out.push(cfg.get(p));
    }
    Ok(out)
}

/// One applied update `f^{t-1}(c) → f^t(c)` at position `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Update {
    pub t: u64,
    pub pos: i64,
    pub old: ProductSymbol,
    pub new: ProductSymbol,
}

/// An asynchronous evolution stored as per-update deltas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcaTrace {
    pub initial: Configuration,
    pub updates: Vec<Update>,
    pub final_cfg: Configuration,
}

impl AcaTrace {
    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    /// Reconstructs `f^k(c)`.
    pub fn config_at(&self, k: usize) -> Configuration {
        let mut cfg = self.initial.clone();
        for u in &self.updates[..k] {
            cfg.set(u.pos, u.new);
        }
        cfg
    }

    pub fn replay(&self) -> Configuration {
        self.config_at(self.updates.len())
    }

    /// Every configuration `f^0(c), …, f^n(c)` in order.
    pub fn configs(&self) -> impl Iterator<Item = Configuration> + '_ {
        let mut cfg = self.initial.clone();
        std::iter::once(cfg.clone()).chain(self.updates.iter().map(move |u| {
            cfg.set(u.pos, u.new);
            cfg.clone()
        }))
    }
}

/// Incremental driver for one asynchronous evolution.
pub struct Simulator<R> {
    rule: R,
    cfg: Configuration,
    time: u64,
    buf: Vec<ProductSymbol>,
}

impl<R: LocalRule> Simulator<R> {
    /// Fails if the rule does not keep the background quiescent.
    pub fn new(cfg: Configuration, rule: R) -> Result<Self, AcaError> {
        check_background_closure(&rule, cfg.background())?;
        Ok(Simulator { rule, cfg, time: 0, buf: Vec::new() })
    }

    pub fn config(&self) -> &Configuration {
        &self.cfg
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }

    pub fn step(&mut self, pos: i64) -> Update {
        self.cfg.neighborhood_into(pos, self.rule.radius(), &mut self.buf);
        let old = self.buf[self.rule.radius()];
        let new = self.rule.apply(&self.buf);
        if new != old {
            self.cfg.set(pos, new);
        }
        self.time += 1;
        Update { t: self.time, pos, old, new }
    }

    pub fn into_config(self) -> Configuration {
        self.cfg
    }
}

/// Runs `n` asynchronous updates at the positions yielded by `positions`.
pub fn evolve<R: LocalRule>(
    cfg: &Configuration,
    rule: R,
    positions: impl IntoIterator<Item = i64>,
    n: u64,
) -> Result<AcaTrace, AcaError> {
    let mut sim = Simulator::new(cfg.clone(), rule)?;
    let mut updates = Vec::with_capacity(n.min(1 << 24) as usize);
    let mut it = positions.into_iter();
    for _ in 0..n {
        let pos = it.next().ok_or(AcaError::SequenceExhausted(sim.time()))?;
        updates.push(sim.step(pos));
    }
    Ok(AcaTrace { initial: cfg.clone(), updates, final_cfg: sim.into_config() })
}
