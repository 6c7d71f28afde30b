//! The `dfa v1` text format.
//!
//! ```text
//! dfa v1 <n> <k>
//! <k targets of state 0>
//! ...
//! <k targets of state n-1>
//! ```
//!
//! Targets are 0-based and space separated. Blank lines and lines starting
//! with `#` are skipped when reading.

use std::fmt::Write as _;

use crate::automaton::Dfa;
use crate::error::{Error, Result};

pub const HEADER: &str = "dfa v1";

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

pub fn write_dfa(dfa: &Dfa) -> String {
    let k = dfa.k();
    let mut out = String::with_capacity(dfa.n() * k * 8 + 32);
    writeln!(out, "{HEADER} {} {k}", dfa.n()).unwrap();
    for row in dfa.table().chunks(k) {
        let mut first = true;
        for t in row {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{t}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_dfa(text: &str) -> Result<Dfa> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| format_error(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "dfa" || fields[1] != "v1" {
        return Err(format_error(hline, format!("expected `{HEADER} <n> <k>`")));
    }
    let parse_size = |s: &str, what: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| format_error(hline, format!("{what} must be a positive integer")))
    };
    let n = parse_size(fields[2], "n")?;
    let k = parse_size(fields[3], "k")?;

    let mut delta = Vec::with_capacity(n.saturating_mul(k));
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == n {
            return Err(format_error(lineno, format!("more than {n} state rows")));
        }
        let before = delta.len();
        for tok in line.split_whitespace() {
            let t: usize = tok
                .parse()
                .map_err(|_| format_error(lineno, format!("bad state index {tok:?}")))?;
            if t >= n {
                return Err(format_error(lineno, format!("target {t} outside 0..{n}")));
            }
            delta.push(t);
        }
        if delta.len() - before != k {
            return Err(format_error(
                lineno,
                format!("expected {k} targets, found {}", delta.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(format_error(
            text.lines().count(),
            format!("expected {n} state rows, found {rows}"),
        ));
    }
    Dfa::new(n, k, delta)
}
