//! ASCII space-time diagrams.
//!
//! One row per configuration. Cells show their tape symbol: `[x]` for
//! `ξ = 1`, `(x)` for `ξ = 0`, ` x ` for `ξ = 2` and ` . ` for inactive
//! cells.

use std::fmt::Write;

use crate::aca::{AcaTrace, ProductSymbol};
use crate::constructions::ctl;
use crate::tm::TuringMachine;

const BOLD: &str = "\x1b[1m";
const DIM: &str = "\x1b[2m";
const RESET: &str = "\x1b[0m";

pub struct RenderOptions {
    pub window: (i64, i64),
    pub color: bool,
}

fn cell_text(tm: &TuringMachine, c: &ProductSymbol, width: usize) -> String {
    let name = tm.symbol_name(c.gamma);
    match c.ctl {
        ctl::MARKER => format!("[{name:^width$}]"),
        ctl::WRITTEN => format!("({name:^width$})"),
        ctl::INACTIVE => format!(" {:^width$} ", "."),
        _ => format!(" {name:^width$} "),
    }
}

/// Renders every configuration of `trace` over `opts.window`. The cell
/// updated to reach a row is highlighted when color is on.
pub fn render_ascii(tm: &TuringMachine, trace: &AcaTrace, opts: &RenderOptions) -> String {
    let (a, b) = opts.window;
    let width = tm.symbols().map(|s| tm.symbol_name(s).chars().count()).max().unwrap_or(1);
    let tw = trace.len().to_string().len().max(1);
    let mut out = String::new();
    let _ = write!(out, "{:>tw$}       |", "t");
    for i in a..=b {
        let _ = write!(out, "{:^w$}", i, w = width + 2);
    }
    out.push('\n');
    let mut cfg = trace.initial.clone();
    for k in 0..=trace.len() {
        let at = if k == 0 {
            None
        } else {
            let u = &trace.updates[k - 1];
            cfg.set(u.pos, u.new);
            Some(u.pos)
        };
        match at {
            Some(p) => {
                let _ = write!(out, "{k:>tw$} @{p:>4} |");
            }
            None => {
                let _ = write!(out, "{k:>tw$}       |");
            }
        }
        for i in a..=b {
            let c = cfg.get(i);
            let text = cell_text(tm, &c, width);
            if opts.color && at == Some(i) {
                let _ = write!(out, "{BOLD}{text}{RESET}");
            } else if opts.color && c.ctl == ctl::INACTIVE {
                let _ = write!(out, "{DIM}{text}{RESET}");
            } else {
                out.push_str(&text);
            }
        }
        out.push('\n');
    }
    out
}
