//! Deterministic CSV/JSON emission with a shared float formatter, so the two
//! formats carry identical values field for field.

use josephson::census::ScanRecord;
use josephson::planar::{BifurcationCurve, CurveConstants};

/// Format with 12 significant digits, positional where compact (like %.12g).
pub fn fmt_g12(v: f64) -> String {
    const SIG: usize = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", SIG - 1, v);
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp >= -4 && exp < SIG as i32 {
        let decimals = (SIG as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        let (mant, _) = sci.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(mant), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn agreement_csv(a: Option<bool>) -> &'static str {
    match a {
        Some(true) => "true",
        Some(false) => "false",
        None => "na",
    }
}

fn agreement_json(a: Option<bool>) -> &'static str {
    match a {
        Some(true) => "true",
        Some(false) => "false",
        None => "null",
    }
}

pub const SCAN_HEADER: &str = "a,b,c,label,i,j,j_pos,j_neg,agreement,flags";

pub fn scan_csv(rows: &[ScanRecord]) -> String {
    let mut out = String::new();
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_g12(r.a),
            fmt_g12(r.b),
            fmt_g12(r.c),
            r.label,
            r.first,
            r.second,
            r.second_pos,
            r.second_neg,
            agreement_csv(r.agreement),
            r.flags,
        ));
    }
    out
}

pub fn scan_json(rows: &[ScanRecord]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!(
            "  {{\"a\": {}, \"b\": {}, \"c\": {}, \"label\": {}, \"i\": {}, \"j\": {}, \"j_pos\": {}, \"j_neg\": {}, \"agreement\": {}, \"flags\": {}}}",
            fmt_g12(r.a),
            fmt_g12(r.b),
            fmt_g12(r.c),
            json_str(&r.label),
            r.first,
            r.second,
            r.second_pos,
            r.second_neg,
            agreement_json(r.agreement),
            json_str(&r.flags),
        ));
        out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

pub const CURVE_HEADER: &str = "curve,a,c,b,gap_tol,found";

fn constant_lines(c: &CurveConstants) -> Vec<(&'static str, Option<f64>)> {
    vec![("a_star", c.a_star), ("a_hopf", c.a_hopf), ("a_tilde", c.a_tilde)]
}

pub fn curve_csv(curve: &BifurcationCurve) -> String {
    let mut out = String::new();
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for s in &curve.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.curve.name(),
            fmt_g12(s.a),
            fmt_g12(s.c),
            s.b.map(fmt_g12).unwrap_or_default(),
            fmt_g12(s.gap_tol),
            s.b.is_some(),
        ));
    }
    for (name, v) in constant_lines(&curve.constants) {
        out.push_str(&format!(
            "# {} = {}\n",
            name,
            v.map(fmt_g12).unwrap_or_else(|| "not-found".into())
        ));
    }
    out
}

pub fn curve_json(curve: &BifurcationCurve) -> String {
    let mut out = String::from("{\n  \"samples\": [\n");
    for (i, s) in curve.samples.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"curve\": {}, \"a\": {}, \"c\": {}, \"b\": {}, \"gap_tol\": {}, \"found\": {}}}",
            json_str(s.curve.name()),
            fmt_g12(s.a),
            fmt_g12(s.c),
            s.b.map(fmt_g12).unwrap_or_else(|| "null".into()),
            fmt_g12(s.gap_tol),
            s.b.is_some(),
        ));
        out.push_str(if i + 1 < curve.samples.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n  \"constants\": {");
    let consts = constant_lines(&curve.constants);
    for (i, (name, v)) in consts.iter().enumerate() {
        out.push_str(&format!(
            "\"{}\": {}",
            name,
            v.map(fmt_g12).unwrap_or_else(|| "null".into())
        ));
        if i + 1 < consts.len() {
            out.push_str(", ");
        }
    }
    out.push_str("}\n}\n");
    out
}
