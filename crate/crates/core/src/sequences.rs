//! Updating sequences and finite-prefix diagnostics.
//!
//! Index 0 of every sequence is the first update applied. For random
//! walks the first update is the start cell `θ₀ = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error("invalid sequence spec `{spec}`: {message}")]
    Spec { spec: String, message: String },
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("empty sequence")]
    Empty,
    #[error("insertion indices must be non-decreasing (index {0} after {1})")]
    InsertionOrder(u64, u64),
    #[error("gap must be at least 1")]
    BadGap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqKind {
    Quadratic,
    Sweep,
    Scattered { p: i64 },
    RandomWalk { seed: u64 },
    Explicit(Arc<[i64]>),
    Cyclic(Arc<[i64]>),
    Inserted { base: Box<UpdateSequence>, insertions: Arc<[(u64, i64)]> },
}

/// A deterministic stream of cell positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateSequence {
    kind: SeqKind,
}

/// `s_i = (−i, −i+2, …, i)`.
pub fn block(i: u64) -> Vec<i64> {
    let i = i as i64;
    (0..=i).map(|k| -i + 2 * k).collect()
}

fn block_iter(i: i64) -> impl Iterator<Item = i64> {
    (0..=i).map(move |k| -i + 2 * k)
}

pub fn mix64(seed: u64, t: u64) -> u64 {
    let mut z = seed.wrapping_add(t.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `s_0 (−1) s_0`, then `s_i s_{i−1} s_i` for `i ≥ 1`.
pub fn quadratic_universal() -> UpdateSequence {
    UpdateSequence { kind: SeqKind::Quadratic }
}

/// `s_0 s_1 s_2 …`.
pub fn sweep_sequence() -> UpdateSequence {
    UpdateSequence { kind: SeqKind::Sweep }
}

/// Groups `i = 1, 2, …`, each made of three left-to-right scans of the
/// support `pℤ` over support indices `[−ip, ip]`, `[−2ip, 2ip]` and
/// `[−3ip, 3ip]`. These have the lengths of `s_{2ip}`, `s_{4ip}`,
/// `s_{6ip}`, so group `i` has `12ip + 3` updates.
pub fn scattered_sequence(p: i64) -> Result<UpdateSequence, SeqError> {
    if p < 1 {
        return Err(SeqError::BadGap);
    }
    Ok(UpdateSequence { kind: SeqKind::Scattered { p } })
}

pub fn random_walk_sequence(seed: u64) -> UpdateSequence {
    UpdateSequence { kind: SeqKind::RandomWalk { seed } }
}

pub fn explicit(positions: Vec<i64>) -> UpdateSequence {
    UpdateSequence { kind: SeqKind::Explicit(positions.into()) }
}

pub fn cyclic(positions: Vec<i64>) -> Result<UpdateSequence, SeqError> {
    if positions.is_empty() {
        return Err(SeqError::Empty);
    }
    Ok(UpdateSequence { kind: SeqKind::Cyclic(positions.into()) })
}

/// Splices `position` in front of base element `index` for every pair.
/// Pairs with equal index keep their order.
pub fn insert_noise(base: UpdateSequence, insertions: Vec<(u64, i64)>) -> Result<UpdateSequence, SeqError> {
    if let Some(w) = insertions.windows(2).find(|w| w[1].0 < w[0].0) {
        return Err(SeqError::InsertionOrder(w[1].0, w[0].0));
    }
    if insertions.is_empty() {
        return Ok(base);
    }
    Ok(UpdateSequence { kind: SeqKind::Inserted { base: Box::new(base), insertions: insertions.into() } })
}

/// Cumulative length of the sweep sequence through `s_T`.
pub fn sweep_length(t: u64) -> u64 {
    (t + 1) * (t + 2) / 2
}

/// Cumulative length of the quadratic sequence through group `g`.
pub fn quadratic_length(g: u64) -> u64 {
    3 + 3 * g * (g + 1) / 2 + 2 * g
}

/// Cumulative length of the scattered sequence through group `g`.
pub fn scattered_length(p: u64, g: u64) -> u64 {
    6 * p * g * g + 6 * p * g + 3 * g
}

fn quadratic_group(g: i64) -> Box<dyn Iterator<Item = i64>> {
    if g == 0 {
        Box::new([0, -1, 0].into_iter())
    } else {
        Box::new(block_iter(g).chain(block_iter(g - 1)).chain(block_iter(g)))
    }
}

fn scattered_group(p: i64, g: i64) -> impl Iterator<Item = i64> {
    (1..=3).flat_map(move |k| (-k * g * p..=k * g * p).map(move |j| j * p))
}

struct RandomWalk {
    seed: u64,
    t: u64,
    pos: i64,
}

impl Iterator for RandomWalk {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        if self.t > 0 {
            self.pos += if mix64(self.seed, self.t) & 1 == 1 { 1 } else { -1 };
        }
        self.t += 1;
        Some(self.pos)
    }
}

struct Spliced<'a> {
    base: Box<dyn Iterator<Item = i64> + 'a>,
    insertions: &'a [(u64, i64)],
    next_base: u64,
}

impl Iterator for Spliced<'_> {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        if let Some((&(idx, pos), rest)) = self.insertions.split_first() {
            if idx <= self.next_base {
                self.insertions = rest;
                return Some(pos);
            }
        }
        let v = self.base.next();
        if v.is_some() {
            self.next_base += 1;
            return v;
        }
        // insertions past the end of a finite base are appended
        let (&(_, pos), rest) = self.insertions.split_first()?;
        self.insertions = rest;
        Some(pos)
    }
}

impl UpdateSequence {
    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = i64> + '_> {
        match &self.kind {
            SeqKind::Quadratic => Box::new((0..).flat_map(quadratic_group)),
            SeqKind::Sweep => Box::new((0..).flat_map(block_iter)),
            SeqKind::Scattered { p } => {
                let p = *p;
                Box::new((1..).flat_map(move |g| scattered_group(p, g)))
            }
            SeqKind::RandomWalk { seed } => Box::new(RandomWalk { seed: *seed, t: 0, pos: 0 }),
            SeqKind::Explicit(v) => Box::new(v.iter().copied()),
            SeqKind::Cyclic(v) => Box::new(v.iter().copied().cycle()),
            SeqKind::Inserted { base, insertions } => {
                Box::new(Spliced { base: base.iter(), insertions, next_base: 0 })
            }
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<i64> {
        self.iter().take(n).collect()
    }

    pub fn get(&self, index: u64) -> Option<i64> {
        self.iter().nth(index as usize)
    }

    /// Number of elements of a finite sequence.
    pub fn len(&self) -> Option<u64> {
        match &self.kind {
            SeqKind::Explicit(v) => Some(v.len() as u64),
            SeqKind::Inserted { base, insertions } => base.len().map(|n| n + insertions.len() as u64),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Parses a spec string such as `quadratic`, `scattered:p=2`,
    /// `randomwalk:seed=42`, `cyclic:0,-1,0,1`, `explicit:@file` or
    /// `inserted:base=quadratic,@file`. Files hold integers separated by
    /// whitespace or commas; insertion files hold `index position` pairs.
    pub fn parse(spec: &str) -> Result<Self, SeqError> {
        let bad = |message: &str| SeqError::Spec { spec: spec.to_owned(), message: message.to_owned() };
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        match (name, arg) {
            ("quadratic", None) => Ok(quadratic_universal()),
            ("sweep", None) => Ok(sweep_sequence()),
            ("scattered", Some(a)) => {
                let p = key_value(a, "p").ok_or_else(|| bad("expected p=<gap>"))?;
                scattered_sequence(p.parse().map_err(|_| bad("gap is not an integer"))?)
            }
            ("randomwalk", Some(a)) => {
                let s = key_value(a, "seed").ok_or_else(|| bad("expected seed=<n>"))?;
                Ok(random_walk_sequence(s.parse().map_err(|_| bad("seed is not a 64-bit integer"))?))
            }
            ("explicit", Some(a)) => {
                let v = integers(a)?;
                if v.is_empty() {
                    return Err(SeqError::Empty);
                }
                Ok(explicit(v))
            }
            ("cyclic", Some(a)) => cyclic(integers(a)?),
            ("inserted", Some(a)) => {
                let rest = a.strip_prefix("base=").ok_or_else(|| bad("expected base=<spec>,…"))?;
                let parts: Vec<&str> = rest.split(',').collect();
                let mut split = parts.len();
                while split > 1 && is_insertion_item(parts[split - 1]) {
                    split -= 1;
                }
                let base = Self::parse(&parts[..split].join(","))?;
                let mut flat = Vec::new();
                for item in &parts[split..] {
                    match item.trim().strip_prefix('@') {
                        Some(path) => flat.extend(read_integers(Path::new(path))?),
                        None => {
                            let (i, p) = item.split_once(':').unwrap();
                            flat.push(i.trim().parse().map_err(|_| bad("bad insertion index"))?);
                            flat.push(p.trim().parse().map_err(|_| bad("bad insertion position"))?);
                        }
                    }
                }
                if flat.len() % 2 != 0 {
                    return Err(bad("insertions must come in index/position pairs"));
                }
                let pairs = flat
                    .chunks(2)
                    .map(|c| u64::try_from(c[0]).map(|i| (i, c[1])).map_err(|_| bad("negative insertion index")))
                    .collect::<Result<Vec<_>, _>>()?;
                insert_noise(base, pairs)
            }
            _ => Err(bad("unknown kind or missing argument")),
        }
    }
}

fn key_value<'a>(arg: &'a str, key: &str) -> Option<&'a str> {
    arg.split_once('=').filter(|(k, _)| k.trim() == key).map(|(_, v)| v.trim())
}

fn is_insertion_item(s: &str) -> bool {
    let s = s.trim();
    s.starts_with('@')
        || s.split_once(':').is_some_and(|(a, b)| a.trim().parse::<u64>().is_ok() && b.trim().parse::<i64>().is_ok())
}

fn integers(arg: &str) -> Result<Vec<i64>, SeqError> {
    match arg.strip_prefix('@') {
        Some(path) => read_integers(Path::new(path)),
        None => parse_integers(arg).map_err(|m| SeqError::Spec { spec: arg.to_owned(), message: m }),
    }
}

fn parse_integers(text: &str) -> Result<Vec<i64>, String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("`{s}` is not an integer")))
        .collect()
}

fn read_integers(path: &Path) -> Result<Vec<i64>, SeqError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SeqError::Io { path: path.display().to_string(), source })?;
    parse_integers(&text).map_err(|message| SeqError::Spec { spec: format!("@{}", path.display()), message })
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for UpdateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SeqKind::Quadratic => write!(f, "quadratic"),
            SeqKind::Sweep => write!(f, "sweep"),
            SeqKind::Scattered { p } => write!(f, "scattered:p={p}"),
            SeqKind::RandomWalk { seed } => write!(f, "randomwalk:seed={seed}"),
            SeqKind::Explicit(v) => write!(f, "explicit:{}", join(v)),
            SeqKind::Cyclic(v) => write!(f, "cyclic:{}", join(v)),
            SeqKind::Inserted { base, insertions } => {
                write!(f, "inserted:base={base}")?;
                insertions.iter().try_for_each(|(i, p)| write!(f, ",{i}:{p}"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeqAnalysis {
    pub window: (i64, i64),
    pub prefix_len: u64,
    pub per_cell_counts: BTreeMap<i64, u64>,
    pub min_count: u64,
    /// Largest distance between consecutive updated cells of the window.
    pub support_gap: Option<i64>,
    /// Largest `k` such that every window cell was updated at least `k` times.
    pub universality_witness_k: u64,
}

/// Tallies the first `n` updates over the window `[a, b]`. A finite
/// sequence shorter than `n` is analyzed in full.
pub fn analyze(seq: &UpdateSequence, n: u64, window: (i64, i64)) -> Result<SeqAnalysis, SeqError> {
    let (a, b) = window;
    if seq.is_empty() {
        return Err(SeqError::Empty);
    }
    let mut counts: BTreeMap<i64, u64> = (a..=b).map(|k| (k, 0)).collect();
    let mut seen = 0;
    for pos in seq.iter().take(n as usize) {
        seen += 1;
        if let Some(c) = counts.get_mut(&pos) {
            *c += 1;
        }
    }
    let min_count = counts.values().copied().min().unwrap_or(0);
    let support: Vec<i64> = counts.iter().filter(|(_, c)| **c > 0).map(|(k, _)| *k).collect();
    let support_gap = support.windows(2).map(|w| w[1] - w[0]).max();
    Ok(SeqAnalysis {
        window,
        prefix_len: seen,
        per_cell_counts: counts,
        min_count,
        support_gap,
        universality_witness_k: min_count,
    })
}
