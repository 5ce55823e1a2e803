//! Deterministic table emission (CSV and markdown) and the CSV parser.

use crate::error::{Error, Result};
use crate::problem::ErrorNorms;

use super::runner::{ConvergenceRow, ConvergenceTable};

/// Scientific notation with 5 significant digits and a two-digit
/// exponent, e.g. `1.2787e-05`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4e}");
    // Pad the exponent to two digits: 1.2787e-5 -> 1.2787e-05.
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ("-", d),
                None => ("", exp.strip_prefix('+').unwrap_or(exp)),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn format_order(o: Option<f64>) -> String {
    match o {
        Some(v) => format!("{v:.2}"),
        None => "-".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Render a convergence table; byte-deterministic for a given table.
pub fn emit_table(t: &ConvergenceTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# case={} scheme={}\n", t.case, t.scheme));
            out.push_str("N,l2,order_l2,l1,order_l1,linf,order_linf\n");
            for r in &t.rows {
                match (&r.norms, &r.failure) {
                    (Some(n), _) => out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.n,
                        format_sci(n.l2),
                        format_order(r.orders[1]),
                        format_sci(n.l1),
                        format_order(r.orders[0]),
                        format_sci(n.linf),
                        format_order(r.orders[2]),
                    )),
                    (None, Some(msg)) => {
                        out.push_str(&format!("{},failed: {}\n", r.n, msg.replace(',', ";")))
                    }
                    (None, None) => out.push_str(&format!("{},failed\n", r.n)),
                }
            }
            out
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("**{}** — {}\n\n", t.case, t.scheme));
            out.push_str("| N | L2 error | order | L1 error | order | Linf error | order |\n");
            out.push_str("|---|----------|-------|----------|-------|------------|-------|\n");
            for r in &t.rows {
                match (&r.norms, &r.failure) {
                    (Some(n), _) => out.push_str(&format!(
                        "| {} | {} | {} | {} | {} | {} | {} |\n",
                        r.n,
                        format_sci(n.l2),
                        format_order(r.orders[1]),
                        format_sci(n.l1),
                        format_order(r.orders[0]),
                        format_sci(n.linf),
                        format_order(r.orders[2]),
                    )),
                    (None, msg) => out.push_str(&format!(
                        "| {} | failed: {} | | | | | |\n",
                        r.n,
                        msg.as_deref().unwrap_or("")
                    )),
                }
            }
            out
        }
    }
}

/// Parse a CSV produced by [`emit_table`].
pub fn parse_table(text: &str) -> Result<ConvergenceTable> {
    let mut case = String::new();
    let mut scheme = String::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            // scheme labels may contain spaces; take the rest of the line.
            if let Some((_, v)) = meta.split_once("scheme=") {
                scheme = v.trim().to_string();
            }
            for tok in meta.split_whitespace() {
                if let Some(v) = tok.strip_prefix("case=") {
                    case = v.to_string();
                }
            }
            continue;
        }
        if line.starts_with('N') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let n: usize = cols[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad N in '{line}'")))?;
        if cols.len() < 7 {
            rows.push(ConvergenceRow {
                n,
                norms: None,
                orders: [None, None, None],
                failure: Some(cols.get(1).unwrap_or(&"failed").to_string()),
                mass_drift: f64::NAN,
            });
            continue;
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number '{s}'")))
        };
        let ord = |s: &str| -> Option<f64> {
            if s == "-" {
                None
            } else {
                s.parse().ok()
            }
        };
        rows.push(ConvergenceRow {
            n,
            norms: Some(ErrorNorms {
                l2: num(cols[1])?,
                l1: num(cols[3])?,
                linf: num(cols[5])?,
            }),
            orders: [ord(cols[4]), ord(cols[2]), ord(cols[6])],
            failure: None,
            mass_drift: f64::NAN,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("no table rows found".into()));
    }
    Ok(ConvergenceTable { case, scheme, rows })
}
