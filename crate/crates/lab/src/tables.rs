//! The two summary tables: limiting `P(T* = t)` and `q(T; t)` for five
//! models and four small shapes, plus the `t_4c / t_4a` ratio.

use std::fmt::Write as _;

use fringe_core::{limit_fringe, limit_qsin, LimitParams, LimitValue, Model, TreeShape};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;

pub const SHAPES: [(&str, &str); 4] = [
    ("t_2", "(*,*)"),
    ("t_3", "(*,(*,*))"),
    ("t_4a", "(*,(*,(*,*)))"),
    ("t_4c", "((*,*),(*,*))"),
];

/// Row label, model, and `beta`; Patricia rows use `p = 1/2`.
pub const MODELS: [(&str, Model, f64); 5] = [
    ("patricia*", Model::Patricia, -1.0),
    ("ebst", Model::Ebst, -1.0),
    ("cbst", Model::Cbst, -1.0),
    ("cb", Model::BetaSplit, -1.0),
    ("uniform", Model::UniformFull, -1.0),
];

pub const PLACES: u32 = 4;

pub const FOOTNOTE: &str = "* p = 1/2; constant term only, the mean oscillates with log n";

#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub model: &'static str,
    pub shape: &'static str,
    pub fringe: LimitValue,
    pub qsin: LimitValue,
}

pub fn entries() -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for (label, model, beta) in MODELS {
        let params = LimitParams { beta, ..LimitParams::default() };
        for (name, text) in SHAPES {
            let t = TreeShape::parse(text)?;
            out.push(TableEntry {
                model: label,
                shape: name,
                fringe: limit_fringe(model, &t, &params)?,
                qsin: limit_qsin(model, &t, &params)?,
            });
        }
    }
    Ok(out)
}

/// `a / b` exactly when both share a transcendental factor, else `None`.
pub fn exact_ratio(a: &LimitValue, b: &LimitValue) -> Option<BigRational> {
    match (a, b) {
        (LimitValue::Rational(x), LimitValue::Rational(y)) => Some(x / y),
        (LimitValue::InvPiSquared(x), LimitValue::InvPiSquared(y)) => Some(x / y),
        (LimitValue::InvEntropy { coeff: x, entropy: h }, LimitValue::InvEntropy { coeff: y, entropy: g }) if h == g => {
            Some(x / y)
        }
        (LimitValue::Exp(x), LimitValue::Exp(y)) if x.is_rational() && y.is_rational() => {
            Some(x.coeff(0) / y.coeff(0))
        }
        _ => None,
    }
}

fn ratio_text(a: &LimitValue, b: &LimitValue) -> String {
    match exact_ratio(a, b) {
        Some(r) if r.is_integer() => r.to_integer().to_string(),
        Some(r) => r.to_string(),
        None => format!("{:.6}", a.to_f64() / b.to_f64()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRecord {
    pub table: &'static str,
    pub model: &'static str,
    pub shape: &'static str,
    pub exact: String,
    pub rounded: String,
}

pub fn records() -> Result<Vec<TableRecord>> {
    let all = entries()?;
    let mut out = Vec::new();
    for (table, pick) in [("fringe", 0), ("qsin", 1)] {
        for e in &all {
            let v = if pick == 0 { &e.fringe } else { &e.qsin };
            out.push(TableRecord {
                table,
                model: e.model,
                shape: e.shape,
                exact: v.to_string(),
                rounded: v.rounded(PLACES),
            });
        }
    }
    for (label, ..) in MODELS {
        let get = |s: &str| all.iter().find(|e| e.model == label && e.shape == s).expect("entry");
        let (c, a) = (get("t_4c"), get("t_4a"));
        out.push(TableRecord {
            table: "ratio_t4c_t4a",
            model: label,
            shape: "t_4c/t_4a",
            exact: ratio_text(&c.fringe, &a.fringe),
            rounded: format!("{:.4}", c.fringe.to_f64() / a.fringe.to_f64()),
        });
    }
    Ok(out)
}

pub fn render() -> Result<String> {
    let all = entries()?;
    let mut s = String::new();
    let header = |s: &mut String, title: &str| {
        let _ = writeln!(s, "{title}");
        let _ = write!(s, "{:<11}", "model");
        for (name, _) in SHAPES {
            let _ = write!(s, "{name:>8}");
        }
        let _ = writeln!(s);
    };
    for (title, qsin) in [("P(T* = t)", false), ("q(T; t)", true)] {
        header(&mut s, title);
        for (label, ..) in MODELS {
            let _ = write!(s, "{label:<11}");
            for e in all.iter().filter(|e| e.model == label) {
                let v = if qsin { &e.qsin } else { &e.fringe };
                let _ = write!(s, "{:>8}", v.rounded(PLACES));
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "t_4c / t_4a");
    for (label, ..) in MODELS {
        let get = |n: &str| all.iter().find(|e| e.model == label && e.shape == n).expect("entry");
        let _ = writeln!(s, "{label:<11}{:>10}", ratio_text(&get("t_4c").fringe, &get("t_4a").fringe));
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{FOOTNOTE}");
    Ok(s)
}

/// Every `q` entry equals `2 leafcount(t)` times the `P` entry, exactly.
pub fn qsin_identity_holds() -> Result<bool> {
    for e in entries()? {
        let m = TreeShape::parse(SHAPES.iter().find(|(n, _)| *n == e.shape).expect("shape").1)?.leafcount();
        let want = e.fringe.scale(&BigRational::from_integer((2 * m as i64).into()));
        if want != e.qsin {
            return Ok(false);
        }
    }
    Ok(true)
}
