//! Line-oriented text format for coefficient sets.
//!
//! ```text
//! # comment
//! name eSSP-EIS(2,3)_2
//! s 2
//! p 2
//! P 3
//! kind EIS
//! family ssp
//! ssp_coeff 1.5
//! D:
//! 0.4375 0.5625
//! 0.4375 0.5625
//! A:
//! ...
//! Ahat:
//! R:
//! Rhat:
//! tau:            (optional, one line)
//! ```
//!
//! Floats are written in shortest round-trip form so that loading a saved
//! tableau reproduces every coefficient bit for bit.

use super::{Family, Kind, MethodTableau, TableauError, TableauSpec};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;

const BLOCKS: [&str; 5] = ["D", "A", "Ahat", "R", "Rhat"];

fn parse_err(line: usize, message: impl Into<String>) -> TableauError {
    TableauError::ParseError { line, message: message.into() }
}

pub fn save_tableau(t: &MethodTableau) -> String {
    let spec = t.spec();
    let s = t.stages();
    let mut out = String::new();
    let _ = writeln!(out, "name {}", spec.name);
    let _ = writeln!(out, "s {s}");
    let _ = writeln!(out, "p {}", spec.p);
    let _ = writeln!(out, "P {}", spec.order);
    let _ = writeln!(out, "kind {}", spec.kind.label());
    let _ = writeln!(out, "family {}", spec.family.label());
    if let Some(ssp) = spec.ssp_coefficient {
        let _ = writeln!(out, "ssp_coeff {ssp:?}");
    }
    for (label, m) in BLOCKS.iter().zip([&spec.d, &spec.a, &spec.a_hat, &spec.r, &spec.r_hat]) {
        let _ = writeln!(out, "{label}:");
        for row in m.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    if let Some(tau) = &spec.stored_tau {
        let cells: Vec<String> = tau.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "tau:\n{}", cells.join(" "));
    }
    out
}

#[derive(Default)]
struct Partial {
    name: Option<String>,
    s: Option<usize>,
    p: Option<usize>,
    order: Option<usize>,
    kind: Option<Kind>,
    family: Option<Family>,
    ssp: Option<f64>,
    blocks: [Option<DMatrix<f64>>; 5],
    tau: Option<DVector<f64>>,
}

fn parse_row(text: &str, s: usize, line: usize) -> Result<Vec<f64>, TableauError> {
    let row = text
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(line, format!("bad number '{tok}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    if row.len() != s {
        return Err(parse_err(line, format!("expected {s} numbers, found {}", row.len())));
    }
    Ok(row)
}

fn parse_usize(value: &str, line: usize) -> Result<usize, TableauError> {
    value.parse().map_err(|_| parse_err(line, format!("bad integer '{value}'")))
}

pub fn load_tableau(text: &str) -> Result<MethodTableau, TableauError> {
    let mut doc = Partial::default();
    // Content lines with their 1-based line numbers.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;

    while let Some((ln, content)) = lines.next() {
        last_line = ln;
        if let Some(label) = content.strip_suffix(':') {
            let s = doc.s.ok_or_else(|| parse_err(ln, "block before 's'"))?;
            let rows = if label == "tau" { 1 } else { s };
            let mut data = Vec::with_capacity(rows * s);
            for _ in 0..rows {
                let (rl, row) = lines
                    .next()
                    .ok_or_else(|| parse_err(ln, format!("block {label}: ended early")))?;
                last_line = rl;
                data.extend(parse_row(row, s, rl)?);
            }
            if label == "tau" {
                doc.tau = Some(DVector::from_vec(data));
            } else {
                let idx = BLOCKS
                    .iter()
                    .position(|b| *b == label)
                    .ok_or_else(|| parse_err(ln, format!("unknown block '{label}'")))?;
                if doc.blocks[idx].is_some() {
                    return Err(parse_err(ln, format!("duplicate block '{label}'")));
                }
                doc.blocks[idx] = Some(DMatrix::from_row_slice(s, s, &data));
            }
            continue;
        }

        let (key, value) = content
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .ok_or_else(|| parse_err(ln, format!("expected 'key value', found '{content}'")))?;
        match key {
            "name" => doc.name = Some(value.to_string()),
            "s" => {
                let s = parse_usize(value, ln)?;
                if s == 0 {
                    return Err(parse_err(ln, "s must be positive"));
                }
                doc.s = Some(s);
            }
            "p" => doc.p = Some(parse_usize(value, ln)?),
            "P" => doc.order = Some(parse_usize(value, ln)?),
            "kind" => {
                doc.kind = Some(match value {
                    "EIS" => Kind::Eis,
                    "EIS+" => Kind::EisPlus,
                    _ => return Err(parse_err(ln, format!("unknown kind '{value}'"))),
                })
            }
            "family" => {
                doc.family = Some(match value {
                    "explicit" => Family::Explicit,
                    "ssp" => Family::ExplicitSsp,
                    "implicit" => Family::Implicit,
                    _ => return Err(parse_err(ln, format!("unknown family '{value}'"))),
                })
            }
            "ssp_coeff" => {
                doc.ssp = Some(value.parse().map_err(|_| parse_err(ln, format!("bad number '{value}'")))?)
            }
            _ => return Err(parse_err(ln, format!("unknown key '{key}'"))),
        }
    }

    let end = last_line + 1;
    let missing = |what: &str| parse_err(end, format!("missing '{what}'"));
    let [d, a, a_hat, r, r_hat] = doc.blocks;
    let spec = TableauSpec {
        name: doc.name.ok_or_else(|| missing("name"))?,
        d: d.ok_or_else(|| missing("D:"))?,
        a: a.ok_or_else(|| missing("A:"))?,
        a_hat: a_hat.ok_or_else(|| missing("Ahat:"))?,
        r: r.ok_or_else(|| missing("R:"))?,
        r_hat: r_hat.ok_or_else(|| missing("Rhat:"))?,
        p: doc.p.ok_or_else(|| missing("p"))?,
        order: doc.order.ok_or_else(|| missing("P"))?,
        kind: doc.kind.ok_or_else(|| missing("kind"))?,
        family: doc.family.ok_or_else(|| missing("family"))?,
        ssp_coefficient: doc.ssp,
        stored_tau: doc.tau,
    };
    MethodTableau::from_spec(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{lookup, registry};

    #[test]
    fn registry_round_trips_bitwise() {
        for t in registry() {
            let text = save_tableau(t);
            let back = load_tableau(&text).unwrap();
            assert_eq!(back.spec(), t.spec(), "{}", t.name());
            assert_eq!(save_tableau(&back), text);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = save_tableau(lookup("eSSP-EIS(2,3)").unwrap());
        let noisy = text.replace("D:\n", "# weights follow\n\nD:   # old values\n");
        assert_eq!(load_tableau(&noisy).unwrap().spec(), lookup("eSSP-EIS(2,3)").unwrap().spec());
    }

    #[test]
    fn short_row_reports_its_line() {
        let text = save_tableau(lookup("eSSP-EIS(2,3)").unwrap());
        let mut lines: Vec<&str> = text.lines().collect();
        let d_at = lines.iter().position(|l| *l == "A:").unwrap();
        lines[d_at + 1] = "0.25";
        let err = load_tableau(&lines.join("\n")).unwrap_err();
        assert!(matches!(err, TableauError::ParseError { line, .. } if line == d_at + 2), "{err:?}");
    }

    #[test]
    fn missing_block_is_a_parse_error() {
        let text = save_tableau(lookup("eSSP-EIS(2,3)").unwrap());
        let cut: String = text.split("Rhat:").next().unwrap().to_string();
        let err = load_tableau(&cut).unwrap_err();
        assert!(matches!(err, TableauError::ParseError { ref message, .. } if message.contains("Rhat")), "{err:?}");
    }

    #[test]
    fn bad_number_and_unknown_key() {
        let err = load_tableau("name x\ns two\n").unwrap_err();
        assert_eq!(err, TableauError::ParseError { line: 2, message: "bad integer 'two'".into() });
        let err = load_tableau("name x\nstages 2\n").unwrap_err();
        assert!(matches!(err, TableauError::ParseError { line: 2, .. }));
    }

    #[test]
    fn loading_revalidates() {
        let text = save_tableau(lookup("eSSP-EIS(2,3)").unwrap()).replace("P 3", "P 4");
        let err = load_tableau(&text).unwrap_err();
        assert!(matches!(err, TableauError::InvariantViolation { .. }), "{err:?}");
    }
}
