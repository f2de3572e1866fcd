//! JSON forms of traces and compiled rules.
//!
//! Cells are written as `[symbol, state, direction, ctl]` using the
//! machine's own names.

use serde::{Deserialize, Serialize};

use crate::aca::{evolve, AcaTrace, LocalRule, ProductSymbol};
use crate::constructions::{
    construction1_initial, construction3_initial, CompiledAca, ConstructionKind, ScatterMap,
};
use crate::sequences::{mix64, quadratic_universal, scattered_sequence, sweep_sequence, UpdateSequence};
use crate::tm::{Move, TuringMachine};

pub type CellJson = (String, String, String, u8);

pub fn cell_json(tm: &TuringMachine, c: &ProductSymbol) -> CellJson {
    (tm.symbol_name(c.gamma).to_owned(), tm.state_name(c.state).to_owned(), c.dir.to_string(), c.ctl)
}

/// Inverse of [`cell_json`].
pub fn cell_from_json(tm: &TuringMachine, c: &CellJson) -> Option<ProductSymbol> {
    let dir = match c.2.as_str() {
        "L" => Move::L,
        "R" => Move::R,
        _ => return None,
    };
    Some(ProductSymbol::new(tm.symbol(&c.0)?, tm.state(&c.1)?, dir, c.3))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    /// Cells `window.0 ..= window.1` of the starting configuration.
    pub window: (i64, i64),
    /// Background pattern, `background[i]` sits at cells `≡ i` modulo its length.
    pub background: Vec<CellJson>,
    pub background_period: usize,
    pub initial: Vec<CellJson>,
    /// `(t, pos, new cell)` per update.
    pub updates: Vec<(u64, i64, CellJson)>,
}

pub fn trace_json(tm: &TuringMachine, trace: &AcaTrace) -> TraceJson {
    let window = trace.initial.window().unwrap_or((0, -1));
    let bg = trace.initial.background();
    TraceJson {
        window,
        background: bg.pattern().iter().map(|c| cell_json(tm, c)).collect(),
        background_period: bg.period(),
        initial: (window.0..=window.1).map(|i| cell_json(tm, &trace.initial.get(i))).collect(),
        updates: trace.updates.iter().map(|u| (u.t, u.pos, cell_json(tm, &u.new))).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetJson {
    pub gamma: Vec<String>,
    pub states: Vec<String>,
    pub dirs: Vec<String>,
    pub ctl: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVector {
    pub neighborhood: Vec<CellJson>,
    pub output: CellJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleManifest {
    pub machine: String,
    pub construction: u8,
    pub radius: usize,
    pub clause_table: String,
    pub alphabet: AlphabetJson,
    pub test_vectors: Vec<TestVector>,
}

/// Describes `rule` and samples `(neighborhood, output)` pairs: every
/// neighborhood met during a short canonical run, followed by
/// `random_vectors` neighborhoods drawn from the full alphabet.
pub fn rule_manifest(rule: &CompiledAca, random_vectors: usize) -> RuleManifest {
    let tm = rule.machine();
    let r = rule.radius();
    let mut hoods: Vec<Vec<ProductSymbol>> = Vec::new();

    let (start, seq): (_, UpdateSequence) = match rule.kind() {
        ConstructionKind::Strict => (construction1_initial(tm, &[]).unwrap(), quadratic_universal()),
        ConstructionKind::Headless => (construction1_initial(tm, &[]).unwrap(), sweep_sequence()),
        ConstructionKind::Scattered { gap } => {
            let psi = ScatterMap::arithmetic(gap as i64).unwrap();
            (construction3_initial(tm, &[], &psi).unwrap(), scattered_sequence(gap as i64).unwrap())
        }
    };
    if let Ok(trace) = evolve(&start, rule, seq.iter(), 64) {
        let mut cfg = trace.initial.clone();
        for u in &trace.updates {
            let n = cfg.neighborhood(u.pos, r);
            if !hoods.contains(&n) {
                hoods.push(n);
            }
            cfg.set(u.pos, u.new);
        }
    }

    let alphabet = rule.alphabet();
    let mut t = 0;
    for _ in 0..random_vectors {
        let n: Vec<ProductSymbol> = (0..2 * r + 1)
            .map(|_| {
                t += 1;
                alphabet[(mix64(0x5EED, t) % alphabet.len() as u64) as usize]
            })
            .collect();
        hoods.push(n);
    }

    RuleManifest {
        machine: tm.name().to_owned(),
        construction: rule.construction_id(),
        radius: r,
        clause_table: rule.table().to_string(),
        alphabet: AlphabetJson {
            gamma: tm.symbols().map(|s| tm.symbol_name(s).to_owned()).collect(),
            states: tm.states().map(|q| tm.state_name(q).to_owned()).collect(),
            dirs: vec!["L".into(), "R".into()],
            ctl: rule.ctl_values().to_vec(),
        },
        test_vectors: hoods
            .iter()
            .map(|n| TestVector {
                neighborhood: n.iter().map(|c| cell_json(tm, c)).collect(),
                output: cell_json(tm, &rule.apply(n)),
            })
            .collect(),
    }
}
