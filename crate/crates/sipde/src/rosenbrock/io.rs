//! Plain-text tableau exchange format.
//!
//! One labeled coefficient block per line; exact tableaux print their
//! rationals verbatim, f64-only tableaux print shortest-round-trip
//! decimals. Example:
//!
//! ```text
//! scheme si-rosenbrock gamma=3/4
//! stages 4
//! gamma 3/4
//! b 2/5 0 -3/20 3/4
//! a_tilde[2] 3/13
//! alpha[2] 3/2
//! gamma_mat[2] -255/52
//! ...
//! ```

use num_rational::BigRational;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::tableau::{RosenbrockTableau, TableauData};

fn fmt_rat(v: &BigRational) -> String {
    v.to_string()
}

fn fmt_f64(v: &f64) -> String {
    format!("{v}")
}

fn write_data<T>(out: &mut String, data: &TableauData<T>, fmt: impl Fn(&T) -> String) {
    let s = data.b.len();
    out.push_str(&format!("stages {s}\n"));
    out.push_str(&format!("gamma {}\n", fmt(&data.gamma)));
    let row = |items: &[T]| {
        items
            .iter()
            .map(&fmt)
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("b {}\n", row(&data.b)));
    for (name, block) in [
        ("a_tilde", &data.a_tilde),
        ("alpha", &data.alpha),
        ("gamma_mat", &data.gamma_mat),
    ] {
        for (i, r) in block.iter().enumerate().skip(1) {
            out.push_str(&format!("{name}[{}] {}\n", i + 1, row(r)));
        }
    }
}

/// Serialize a tableau to the text format; exact coefficients when
/// available.
pub fn export_tableau(t: &RosenbrockTableau) -> String {
    let mut out = String::new();
    out.push_str(&format!("scheme {}\n", t.label()));
    match t.exact() {
        Some(exact) => write_data(&mut out, exact, fmt_rat),
        None => write_data(&mut out, t.data(), fmt_f64),
    }
    out
}

fn parse_scalar_rat(tok: &str) -> Option<BigRational> {
    if tok.contains('.') || tok.contains('e') || tok.contains('E') {
        return None;
    }
    BigRational::from_str(tok).ok()
}

fn parse_scalar_f64(tok: &str) -> Result<f64> {
    if let Some(r) = parse_scalar_rat(tok) {
        return Ok(super::field::CoefField::to_f64(&r));
    }
    tok.parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad coefficient '{tok}'")))
}

/// Parse the text format back into a tableau. If every coefficient is a
/// rational literal the exact form is reconstructed as well.
pub fn import_tableau(text: &str) -> Result<RosenbrockTableau> {
    let mut label = String::from("imported");
    let mut stages = 0usize;
    let mut gamma_tok = String::new();
    let mut b_toks: Vec<String> = Vec::new();
    let mut blocks: [Vec<(usize, Vec<String>)>; 3] = [Vec::new(), Vec::new(), Vec::new()];

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let rest: Vec<String> = parts.map(|s| s.to_string()).collect();
        match key {
            "scheme" => label = rest.join(" "),
            "stages" => {
                stages = rest
                    .first()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parse("bad 'stages' line".into()))?
            }
            "gamma" => {
                gamma_tok = rest
                    .first()
                    .cloned()
                    .ok_or_else(|| Error::Parse("bad 'gamma' line".into()))?
            }
            "b" => b_toks = rest,
            _ => {
                let (name, idx) = key
                    .split_once('[')
                    .and_then(|(n, i)| i.strip_suffix(']').map(|i| (n, i)))
                    .ok_or_else(|| Error::Parse(format!("unknown line '{key}'")))?;
                let stage: usize = idx
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad stage index '{idx}'")))?;
                let slot = match name {
                    "a_tilde" => 0,
                    "alpha" => 1,
                    "gamma_mat" => 2,
                    _ => return Err(Error::Parse(format!("unknown block '{name}'"))),
                };
                blocks[slot].push((stage, rest));
            }
        }
    }
    if stages == 0 || b_toks.len() != stages {
        return Err(Error::Parse(format!(
            "inconsistent tableau: stages = {stages}, |b| = {}",
            b_toks.len()
        )));
    }

    let assemble_block = |entries: &[(usize, Vec<String>)]| -> Result<Vec<Vec<String>>> {
        let mut rows: Vec<Vec<String>> = vec![Vec::new(); stages];
        for (stage, toks) in entries {
            if *stage < 2 || *stage > stages || toks.len() != stage - 1 {
                return Err(Error::Parse(format!(
                    "row for stage {stage} has {} entries",
                    toks.len()
                )));
            }
            rows[stage - 1] = toks.clone();
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != i {
                return Err(Error::Parse(format!("missing row for stage {}", i + 1)));
            }
        }
        Ok(rows)
    };
    let tok_blocks: Vec<Vec<Vec<String>>> = blocks
        .iter()
        .map(|b| assemble_block(b))
        .collect::<Result<_>>()?;

    // Exact reconstruction when everything parses as a rational.
    let all_rational = std::iter::once(&gamma_tok)
        .chain(b_toks.iter())
        .chain(tok_blocks.iter().flatten().flatten())
        .all(|t| parse_scalar_rat(t).is_some());

    if all_rational {
        let p = |t: &String| parse_scalar_rat(t).unwrap();
        let data = TableauData {
            gamma: p(&gamma_tok),
            a_tilde: tok_blocks[0].iter().map(|r| r.iter().map(p).collect()).collect(),
            alpha: tok_blocks[1].iter().map(|r| r.iter().map(p).collect()).collect(),
            gamma_mat: tok_blocks[2].iter().map(|r| r.iter().map(p).collect()).collect(),
            b: b_toks.iter().map(p).collect(),
        };
        Ok(RosenbrockTableau::from_exact(data, label))
    } else {
        let p = |t: &String| parse_scalar_f64(t);
        let parse_rows = |rows: &Vec<Vec<String>>| -> Result<Vec<Vec<f64>>> {
            rows.iter()
                .map(|r| r.iter().map(p).collect::<Result<Vec<_>>>())
                .collect()
        };
        let data = TableauData {
            gamma: parse_scalar_f64(&gamma_tok)?,
            a_tilde: parse_rows(&tok_blocks[0])?,
            alpha: parse_rows(&tok_blocks[1])?,
            gamma_mat: parse_rows(&tok_blocks[2])?,
            b: b_toks.iter().map(p).collect::<Result<Vec<_>>>()?,
        };
        Ok(RosenbrockTableau::from_f64(data, label))
    }
}
