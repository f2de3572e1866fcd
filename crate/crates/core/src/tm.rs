//! Deterministic single-tape Turing machines.
//!
//! A [`TuringMachine`] is the object compiled into automata by
//! [`crate::constructions`] and also the reference interpreter every
//! simulation is checked against. The head always moves; there is no
//! stay-move.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a work-alphabet symbol inside its machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u16);

/// Index of a state inside its machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State(pub u16);

/// Head movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
        }
    }

    pub fn from_offset(delta: i64) -> Option<Move> {
        match delta {
            -1 => Some(Move::L),
            1 => Some(Move::R),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

/// Right-hand side of a transition: `δ(q, γ) = (next, write, mv)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub next: State,
    pub write: Symbol,
    pub mv: Move,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown {kind} `{name}`")]
    Unknown {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: duplicate {what}")]
    Duplicate { line: usize, what: String },
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
    #[error("blank in input alphabet")]
    BlankInInput,
    #[error("work alphabet does not contain the blank `{0}`")]
    BlankNotInWork(String),
    #[error("partial transition function: no row for ({state}, {symbol})")]
    PartialDelta { state: String, symbol: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("symbol `{0}` is not in the input alphabet")]
    NotInput(String),
    #[error("cannot split `{0}` into input symbols")]
    BadWord(String),
    #[error("run has not halted")]
    NotHalted,
}

/// `(Q, Σ, Γ, 𝔟, δ, q₀, F)` with δ total over `Q × Γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    name: String,
    symbols: Vec<String>,
    input: Vec<Symbol>,
    blank: Symbol,
    states: Vec<String>,
    initial: State,
    finals: Vec<bool>,
    delta: Vec<Transition>,
}

impl TuringMachine {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn blank(&self) -> Symbol {
        self.blank
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    /// Work alphabet Γ in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.symbols.len() as u16).map(Symbol)
    }

    pub fn input_symbols(&self) -> &[Symbol] {
        &self.input
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.states.len() as u16).map(State)
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn symbol_name(&self, s: Symbol) -> &str {
        &self.symbols[s.0 as usize]
    }

    pub fn state_name(&self, q: State) -> &str {
        &self.states[q.0 as usize]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| Symbol(i as u16))
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| State(i as u16))
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals[q.0 as usize]
    }

    pub fn finals(&self) -> impl Iterator<Item = State> + '_ {
        self.states().filter(|&q| self.is_final(q))
    }

    pub fn is_input(&self, s: Symbol) -> bool {
        self.input.contains(&s)
    }

    pub fn delta(&self, q: State, s: Symbol) -> Transition {
        self.delta[q.0 as usize * self.symbols.len() + s.0 as usize]
    }

    /// Splits a word into input symbols. Whitespace-separated tokens are
    /// used when present; otherwise each character is one symbol.
    pub fn parse_word(&self, word: &str) -> Result<Vec<Symbol>, TmError> {
        let tokens: Vec<String> = if word.split_whitespace().count() > 1 {
            word.split_whitespace().map(str::to_owned).collect()
        } else {
            word.trim().chars().map(|c| c.to_string()).collect()
        };
        tokens
            .iter()
            .map(|t| match self.symbol(t) {
                Some(s) if self.is_input(s) => Ok(s),
                Some(_) => Err(TmError::NotInput(t.clone())),
                None => Err(TmError::BadWord(word.to_owned())),
            })
            .collect()
    }

    pub fn format_word(&self, word: &[Symbol]) -> String {
        let single = self.symbols.iter().all(|s| s.chars().count() == 1);
        let names = word.iter().map(|&s| self.symbol_name(s));
        if single {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }

    /// Checks that every symbol of `word` is in Σ.
    pub fn check_input(&self, word: &[Symbol]) -> Result<(), TmError> {
        match word.iter().find(|s| !self.is_input(**s)) {
            Some(&s) => Err(TmError::NotInput(self.symbol_name(s).to_owned())),
            None => Ok(()),
        }
    }

    /// Renders the machine back into the line-oriented text format.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("machine {}\n", self.name));
        out.push_str(&format!("blank {}\n", self.symbol_name(self.blank)));
        let input: Vec<&str> = self.input.iter().map(|&s| self.symbol_name(s)).collect();
        out.push_str(&format!("input {}\n", input.join(" ")));
        out.push_str(&format!("work {}\n", self.symbols.join(" ")));
        out.push_str(&format!("states {}\n", self.states.join(" ")));
        out.push_str(&format!("initial {}\n", self.state_name(self.initial)));
        let finals: Vec<&str> = self.finals().map(|q| self.state_name(q)).collect();
        if finals.is_empty() {
            out.push_str("final\n");
        } else {
            out.push_str(&format!("final {}\n", finals.join(" ")));
        }
        for q in self.states() {
            for s in self.symbols() {
                let tr = self.delta(q, s);
                out.push_str(&format!(
                    "delta {} {} -> {} {} {}\n",
                    self.state_name(q),
                    self.symbol_name(s),
                    self.state_name(tr.next),
                    self.symbol_name(tr.write),
                    tr.mv
                ));
            }
        }
        out
    }
}

/// Parses the line-oriented machine description.
///
/// ```text
/// machine <name>
/// blank <sym>
/// input <sym>...
/// work <sym>...
/// states <id>...
/// initial <id>
/// final [<id>...]
/// delta <q> <sym> -> <q'> <sym'> <L|R>
/// ```
pub fn parse_tm(text: &str) -> Result<TuringMachine, ParseError> {
    let mut name = None;
    let mut blank: Option<(usize, String)> = None;
    let mut input: Option<(usize, Vec<String>)> = None;
    let mut work: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut finals: Option<(usize, Vec<String>)> = None;
    let mut rows: Vec<(usize, [String; 5])> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<(usize, &str)> = tokenize(line);
        let Some(&(kw_col, keyword)) = tokens.first() else {
            continue;
        };
        let args: Vec<&str> = tokens[1..].iter().map(|&(_, t)| t).collect();
        let owned = || args.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let dup = |what: &str| ParseError::Duplicate {
            line: line_no,
            what: format!("`{what}` declaration"),
        };
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseError::Syntax {
                    line: line_no,
                    column: kw_col,
                    message: format!("`{keyword}` takes {n} argument(s), found {}", args.len()),
                })
            }
        };
        match keyword {
            "machine" => {
                arity(1)?;
                if name.replace(args[0].to_owned()).is_some() {
                    return Err(dup("machine"));
                }
            }
            "blank" => {
                arity(1)?;
                if blank.replace((line_no, args[0].to_owned())).is_some() {
                    return Err(dup("blank"));
                }
            }
            "input" => {
                if input.replace((line_no, owned())).is_some() {
                    return Err(dup("input"));
                }
            }
            "work" => {
                if work.replace(owned()).is_some() {
                    return Err(dup("work"));
                }
            }
            "states" => {
                if args.is_empty() {
                    arity(1)?;
                }
                if states.replace(owned()).is_some() {
                    return Err(dup("states"));
                }
            }
            "initial" => {
                arity(1)?;
                if initial.replace((line_no, args[0].to_owned())).is_some() {
                    return Err(dup("initial"));
                }
            }
            "final" => {
                if finals.replace((line_no, owned())).is_some() {
                    return Err(dup("final"));
                }
            }
            "delta" => {
                if args.len() != 6 || args[2] != "->" {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column: kw_col,
                        message: "expected `delta <q> <sym> -> <q'> <sym'> <L|R>`".into(),
                    });
                }
                if args[5] != "L" && args[5] != "R" {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column: tokens[6].0,
                        message: format!("movement must be L or R, found `{}`", args[5]),
                    });
                }
                rows.push((
                    line_no,
                    [
                        args[0].to_owned(),
                        args[1].to_owned(),
                        args[3].to_owned(),
                        args[4].to_owned(),
                        args[5].to_owned(),
                    ],
                ));
            }
            other => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    column: kw_col,
                    message: format!("unknown keyword `{other}`"),
                })
            }
        }
    }

    let name = name.ok_or(ParseError::Missing("machine"))?;
    let (blank_line, blank) = blank.ok_or(ParseError::Missing("blank"))?;
    let (input_line, input) = input.ok_or(ParseError::Missing("input"))?;
    let symbols = work.ok_or(ParseError::Missing("work"))?;
    let states = states.ok_or(ParseError::Missing("states"))?;
    let (initial_line, initial) = initial.ok_or(ParseError::Missing("initial"))?;
    let (final_line, final_names) = finals.ok_or(ParseError::Missing("final"))?;

    if let Some(d) = first_duplicate(&symbols) {
        return Err(ParseError::Duplicate { line: 0, what: format!("work symbol `{d}`") });
    }
    if let Some(d) = first_duplicate(&states) {
        return Err(ParseError::Duplicate { line: 0, what: format!("state `{d}`") });
    }
    if input.contains(&blank) {
        return Err(ParseError::BlankInInput);
    }
    let sym_idx = |line: usize, n: &str| -> Result<Symbol, ParseError> {
        symbols
            .iter()
            .position(|s| s == n)
            .map(|i| Symbol(i as u16))
            .ok_or(ParseError::Unknown { line, kind: "symbol", name: n.to_owned() })
    };
    let state_idx = |line: usize, n: &str| -> Result<State, ParseError> {
        states
            .iter()
            .position(|s| s == n)
            .map(|i| State(i as u16))
            .ok_or(ParseError::Unknown { line, kind: "state", name: n.to_owned() })
    };
    let blank_sym = sym_idx(blank_line, &blank).map_err(|_| ParseError::BlankNotInWork(blank.clone()))?;
    let input_syms = input
        .iter()
        .map(|s| sym_idx(input_line, s))
        .collect::<Result<Vec<_>, _>>()?;
    let initial_state = state_idx(initial_line, &initial)?;
    let mut final_flags = vec![false; states.len()];
    for f in &final_names {
        final_flags[state_idx(final_line, f)?.0 as usize] = true;
    }

    let mut delta: Vec<Option<Transition>> = vec![None; states.len() * symbols.len()];
    for (line, [q, s, q2, s2, mv]) in &rows {
        let from = state_idx(*line, q)?;
        let read = sym_idx(*line, s)?;
        let tr = Transition {
            next: state_idx(*line, q2)?,
            write: sym_idx(*line, s2)?,
            mv: if mv == "L" { Move::L } else { Move::R },
        };
        let slot = &mut delta[from.0 as usize * symbols.len() + read.0 as usize];
        if slot.replace(tr).is_some() {
            return Err(ParseError::Duplicate { line: *line, what: format!("delta row for ({q}, {s})") });
        }
    }
    let delta = delta
        .into_iter()
        .enumerate()
        .map(|(i, tr)| {
            tr.ok_or_else(|| ParseError::PartialDelta {
                state: states[i / symbols.len()].clone(),
                symbol: symbols[i % symbols.len()].clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(TuringMachine {
        name,
        symbols,
        input: input_syms,
        blank: blank_sym,
        states,
        initial: initial_state,
        finals: final_flags,
        delta,
    })
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn first_duplicate(items: &[String]) -> Option<&str> {
    items
        .iter()
        .enumerate()
        .find(|(i, s)| items[..*i].contains(s))
        .map(|(_, s)| s.as_str())
}

/// Instantaneous configuration `(T, q, p)`. The tape map stores non-blank
/// cells only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TmConfiguration {
    pub tape: BTreeMap<i64, Symbol>,
    pub state: State,
    pub head: i64,
}

impl TmConfiguration {
    pub fn initial(tm: &TuringMachine, input: &[Symbol]) -> Self {
        let tape = input
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != tm.blank())
            .map(|(i, &s)| (i as i64, s))
            .collect();
        TmConfiguration { tape, state: tm.initial(), head: 0 }
    }

    pub fn read(&self, blank: Symbol, pos: i64) -> Symbol {
        self.tape.get(&pos).copied().unwrap_or(blank)
    }

    /// Tape contents over `[lo, hi]`.
    pub fn window(&self, blank: Symbol, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..=hi).map(|i| self.read(blank, i)).collect()
    }
}

/// One machine step; final states are frozen.
pub fn tm_step(tm: &TuringMachine, cfg: &TmConfiguration) -> TmConfiguration {
    if tm.is_final(cfg.state) {
        return cfg.clone();
    }
    let read = cfg.read(tm.blank(), cfg.head);
    let tr = tm.delta(cfg.state, read);
    let mut tape = cfg.tape.clone();
    if tr.write == tm.blank() {
        tape.remove(&cfg.head);
    } else {
        tape.insert(cfg.head, tr.write);
    }
    TmConfiguration { tape, state: tr.next, head: cfg.head + tr.mv.offset() }
}

/// Configurations `R_0 .. R_N` of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub configs: Vec<TmConfiguration>,
    pub halted: bool,
    pub steps_to_halt: Option<usize>,
    pub input_len: usize,
}

impl RunTrace {
    /// Head position at time `t`, with `p_{-1} = -1`.
    pub fn head_before(&self, t: usize) -> i64 {
        if t == 0 {
            -1
        } else {
            self.configs[t - 1].head
        }
    }

    pub fn last(&self) -> &TmConfiguration {
        self.configs.last().expect("a run has at least one configuration")
    }
}

/// Runs `tm` for up to `max_steps` steps, stopping early at a final state.
pub fn tm_run(tm: &TuringMachine, input: &[Symbol], max_steps: usize) -> RunTrace {
    let mut configs = vec![TmConfiguration::initial(tm, input)];
    let mut steps_to_halt = None;
    for t in 0..=max_steps {
        let cur = &configs[t];
        if tm.is_final(cur.state) {
            steps_to_halt = Some(t);
            break;
        }
        if t == max_steps {
            break;
        }
        let next = tm_step(tm, cur);
        configs.push(next);
    }
    RunTrace { configs, halted: steps_to_halt.is_some(), steps_to_halt, input_len: input.len() }
}

/// Non-blank content of a halted run, left to right.
pub fn tm_output(tm: &TuringMachine, trace: &RunTrace) -> Result<Vec<Symbol>, TmError> {
    if !trace.halted {
        return Err(TmError::NotHalted);
    }
    Ok(trace.last().tape.values().copied().filter(|&s| s != tm.blank()).collect())
}

const ZIGZAG: &str = include_str!("../machines/zigzag.tm");
const UNARY_INC: &str = include_str!("../machines/unary-inc.tm");
const BIN_COUNTER: &str = include_str!("../machines/bin-counter.tm");
const PALINDROME: &str = include_str!("../machines/palindrome.tm");

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["zigzag", "unary-inc", "bin-counter", "palindrome"];

/// Looks up one of the machines shipped with the crate.
pub fn builtin(name: &str) -> Option<TuringMachine> {
    let src = match name {
        "zigzag" => ZIGZAG,
        "unary-inc" => UNARY_INC,
        "bin-counter" => BIN_COUNTER,
        "palindrome" => PALINDROME,
        _ => return None,
    };
    Some(parse_tm(src).expect("builtin machine sources are well formed"))
}

/// The two-state machine that sweeps back and forth forever, writing 1s
/// rightwards and 0s leftwards. It never halts, so its head visits every
/// cell infinitely often.
pub fn zigzag_machine() -> TuringMachine {
    builtin("zigzag").expect("zigzag is builtin")
}
