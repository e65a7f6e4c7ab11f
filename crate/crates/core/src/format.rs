//! Text formats for distributions, Mahler tables and graded polynomials.
//!
//! Distribution files:
//!
//! ```text
//! group=heisenberg:5 p=5 N=12 T=6/1 tail=0 exact=1
//! 0,0,0 : 0:1:12
//! @ 1,1,0 : 0:1:12
//! ```
//!
//! Term lines are `α : v:m:k` (the scalar `p^v·m mod p^k`; `k:0:k` is the
//! certificate "≡ 0 mod p^k").  Lines starting with `@` list the Dirac
//! witness.  Rebased charts add `frame=<x;y;…>` with canonical coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dist::{DiracForm, Distribution, LogTail, Tail, TailTerm};
use crate::graded::{Ambient, GradedPoly};
use crate::group::GroupModel;
use crate::mahler::{Decay, MahlerTable};
use crate::padic::{PadicScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?);
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.parse::<i64>().ok().map(Rational::from),
    }
}

fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn format_scalar(c: &PadicScalar) -> String {
    c.to_string()
}

pub fn parse_scalar(p: u64, cap: u32, s: &str) -> Result<PadicScalar, String> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let [v, m, k] = parts.as_slice() else {
        return Err(format!("scalar `{}` is not of the form v:m:k", s.trim()));
    };
    let v: i32 = v.parse().map_err(|_| format!("bad valuation `{v}`"))?;
    let m: u64 = m.parse().map_err(|_| format!("bad unit `{m}`"))?;
    let k: i32 = k.parse().map_err(|_| format!("bad precision `{k}`"))?;
    if k > cap as i32 {
        return Err(format!("precision {k} exceeds N = {cap}"));
    }
    if m == 0 {
        if v != k {
            return Err("zero certificate must read k:0:k".into());
        }
        return Ok(PadicScalar::zero_cert(p, cap, k));
    }
    if m.is_multiple_of(p) {
        return Err(format!("unit part {m} is divisible by p"));
    }
    let c = PadicScalar::from_parts(p, cap, v, m, k);
    if c.to_string() != format!("{v}:{m}:{k}") {
        return Err(format!("scalar `{}` is not in normal form", s.trim()));
    }
    Ok(c)
}

fn fmt_index(a: &[impl ToString]) -> String {
    a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_u64_list(s: &str) -> Option<Vec<u64>> {
    s.split(',').map(|x| x.trim().parse::<u64>().ok()).collect()
}

fn parse_tail(s: &str) -> Option<Tail> {
    if s == "0" {
        return Some(Tail::zero());
    }
    let norm_exp = |t: &str| t.strip_prefix("p^").and_then(parse_rational).map(|e| -e);
    let mut tail = Tail::zero();
    for part in s.split(';') {
        if let Some(rest) = part.strip_prefix("log") {
            let (axis, scale) = rest.split_once('*')?;
            let axis = axis.parse::<usize>().ok()?.checked_sub(1)?;
            tail.log = Some(LogTail { axis, scale: norm_exp(scale)? });
        } else {
            let (scale, onset) = match part.split_once('@') {
                Some((a, b)) => (a, parse_rational(b)?),
                None => (part, Rational::from(0)),
            };
            tail.terms.push(TailTerm { scale: norm_exp(scale)?, onset });
        }
    }
    Some(tail)
}

pub fn write_distribution(d: &Distribution) -> String {
    let m = d.model();
    let mut out = format!(
        "group={} p={} N={} T={} tail={} exact={}",
        m.id(),
        m.prime(),
        m.cap(),
        fmt_rational(&d.trunc()),
        d.tail(),
        u8::from(d.is_exact())
    );
    if let Some(basis) = m.frame_basis() {
        let b: Vec<String> = basis.iter().map(|x| fmt_index(x)).collect();
        out.push_str(&format!(" frame={}", b.join(";")));
    }
    out.push('\n');
    for (alpha, c) in d.terms() {
        out.push_str(&format!("{} : {}\n", fmt_index(alpha), c));
    }
    if let Some(w) = d.witness() {
        for (x, a) in w {
            out.push_str(&format!("@ {} : {}\n", fmt_index(x), a));
        }
    }
    out
}

/// Splits a header line into `key=value` tokens with their columns.
fn header_fields(line: &str, lineno: usize) -> Result<BTreeMap<String, (usize, String)>, ParseError> {
    let mut out = BTreeMap::new();
    let mut col = 1;
    for tok in line.split(' ') {
        if !tok.is_empty() {
            let (k, v) = tok.split_once('=').ok_or_else(|| perr(lineno, col, format!("expected key=value, got `{tok}`")))?;
            if out.insert(k.to_string(), (col + k.len() + 1, v.to_string())).is_some() {
                return Err(perr(lineno, col, format!("duplicate key `{k}`")));
            }
        }
        col += tok.chars().count() + 1;
    }
    Ok(out)
}

fn take<'a>(
    fields: &'a BTreeMap<String, (usize, String)>,
    key: &str,
    lineno: usize,
) -> Result<(usize, &'a str), ParseError> {
    fields.get(key).map(|(c, v)| (*c, v.as_str())).ok_or_else(|| perr(lineno, 1, format!("missing `{key}=`")))
}

pub fn read_distribution(text: &str) -> Result<Distribution, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, 1, "empty distribution file"))?;
    let fields = header_fields(header, hl)?;
    let (gc, gid) = take(&fields, "group", hl)?;
    let (nc, nstr) = take(&fields, "N", hl)?;
    let cap: u32 = nstr.parse().map_err(|_| perr(hl, nc, format!("bad N `{nstr}`")))?;
    let canon = GroupModel::parse(gid, cap).map_err(|e| perr(hl, gc, e.to_string()))?;
    let (pc, pstr) = take(&fields, "p", hl)?;
    if pstr.parse::<u64>().ok() != Some(canon.prime()) {
        return Err(perr(hl, pc, format!("p={pstr} does not match group {gid}")));
    }
    let model = match fields.get("frame") {
        None => canon,
        Some((fc, f)) => {
            let basis: Option<Vec<Vec<u64>>> = f.split(';').map(parse_u64_list).collect();
            let basis = basis.ok_or_else(|| perr(hl, *fc, "bad frame"))?;
            canon.rebase_canonical(basis).map_err(|e| perr(hl, *fc, e.to_string()))?
        }
    };
    let model = Arc::new(model);
    let (tc, tstr) = take(&fields, "T", hl)?;
    let trunc = parse_rational(tstr).ok_or_else(|| perr(hl, tc, format!("bad T `{tstr}`")))?;
    let (lc, lstr) = take(&fields, "tail", hl)?;
    let tail = parse_tail(lstr).ok_or_else(|| perr(hl, lc, format!("bad tail `{lstr}`")))?;
    let (ec, estr) = take(&fields, "exact", hl)?;
    let exact = match estr {
        "0" => false,
        "1" => true,
        _ => return Err(perr(hl, ec, "exact must be 0 or 1")),
    };
    if exact != tail.is_zero() {
        return Err(perr(hl, ec, "exact flag contradicts the tail"));
    }
    for k in fields.keys() {
        if !["group", "p", "N", "T", "tail", "exact", "frame"].contains(&k.as_str()) {
            return Err(perr(hl, fields[k].0, format!("unknown key `{k}`")));
        }
    }

    let (p, d) = (model.prime(), model.dim());
    let mut terms = BTreeMap::new();
    let mut witness: Option<DiracForm> = None;
    for (ln, line) in lines {
        let (body, offset, is_witness) = match line.strip_prefix('@') {
            Some(rest) => (rest, 2, true),
            None => (line, 1, false),
        };
        let (lhs, rhs) = body.split_once(':').ok_or_else(|| perr(ln, offset, "expected `index : scalar`"))?;
        let rhs_col = offset + lhs.chars().count() + 1;
        let idx = parse_u64_list(lhs.trim()).ok_or_else(|| perr(ln, offset, format!("bad index `{}`", lhs.trim())))?;
        if idx.len() != d {
            return Err(perr(ln, offset, format!("expected {d} entries, got {}", idx.len())));
        }
        let c = parse_scalar(p, cap, rhs).map_err(|m| perr(ln, rhs_col + 1, m))?;
        if is_witness {
            if idx.iter().any(|x| *x >= model.modulus()) {
                return Err(perr(ln, offset, "witness coordinate not reduced mod p^N"));
            }
            witness.get_or_insert_with(Vec::new).push((idx, c));
        } else {
            let alpha: Vec<u32> = idx.iter().map(|x| *x as u32).collect();
            if terms.insert(alpha, c).is_some() {
                return Err(perr(ln, offset, "duplicate index"));
            }
        }
    }
    // an empty witness section is written for the zero distribution
    if witness.is_none() && exact && terms.is_empty() {
        witness = Some(Vec::new());
    }
    let dist = Distribution::from_parts(&model, terms, trunc, tail, witness).map_err(|e| perr(hl, 1, e.to_string()))?;
    Ok(dist)
}

fn fmt_decay(d: &Option<Decay>) -> String {
    match d {
        None => "none".into(),
        Some(Decay::FiniteSupport(k)) => format!("finite:{k}"),
        Some(Decay::Geometric(r)) => format!("geom:{}", fmt_rational(r)),
    }
}

pub fn write_mahler(t: &MahlerTable) -> String {
    let mut out = format!("mahler p={} N={} d={} A={} decay={}\n", t.p, t.cap, t.d, t.a_cap, fmt_decay(&t.decay));
    for (alpha, c) in &t.entries {
        out.push_str(&format!("{} : {}\n", fmt_index(alpha), c));
    }
    out
}

pub fn read_mahler(text: &str) -> Result<MahlerTable, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, 1, "empty table"))?;
    let rest = header.strip_prefix("mahler ").ok_or_else(|| perr(hl, 1, "expected `mahler` header"))?;
    let fields = header_fields(rest, hl)?;
    let num = |k: &str| -> Result<u64, ParseError> {
        let (c, v) = take(&fields, k, hl)?;
        v.parse().map_err(|_| perr(hl, c + 7, format!("bad {k} `{v}`")))
    };
    let (p, cap, d, a_cap) = (num("p")?, num("N")? as u32, num("d")? as usize, num("A")? as u32);
    crate::padic::check_context(p, cap).map_err(|e| perr(hl, 1, e.to_string()))?;
    let (dc, dv) = take(&fields, "decay", hl)?;
    let decay = match dv.split_once(':') {
        None if dv == "none" => None,
        Some(("finite", k)) => Some(Decay::FiniteSupport(k.parse().map_err(|_| perr(hl, dc + 7, "bad degree"))?)),
        Some(("geom", r)) => Some(Decay::Geometric(parse_rational(r).ok_or_else(|| perr(hl, dc + 7, "bad rate"))?)),
        _ => return Err(perr(hl, dc + 7, format!("bad decay `{dv}`"))),
    };
    let mut entries = BTreeMap::new();
    for (ln, line) in lines {
        let (lhs, rhs) = line.split_once(':').ok_or_else(|| perr(ln, 1, "expected `index : scalar`"))?;
        let alpha: Option<Vec<u32>> = lhs.trim().split(',').map(|x| x.trim().parse().ok()).collect();
        let alpha = alpha.ok_or_else(|| perr(ln, 1, "bad index"))?;
        if alpha.len() != d || alpha.iter().sum::<u32>() > a_cap {
            return Err(perr(ln, 1, "index outside the table"));
        }
        let c = parse_scalar(p, cap, rhs).map_err(|m| perr(ln, lhs.chars().count() + 2, m))?;
        entries.insert(alpha, c);
    }
    Ok(MahlerTable { p, cap, d, a_cap, entries, decay })
}

pub fn write_graded(g: &GradedPoly) -> String {
    let a = g.ambient();
    let om: Vec<String> = a.omega.iter().map(fmt_rational).collect();
    format!("graded p={} omega={} s={}\n{}\n", a.p, om.join(","), fmt_rational(&a.s), g)
}

/// Reads a graded polynomial; `ideal_input` rejects negative `e0` exponents.
pub fn read_graded(text: &str, ideal_input: bool) -> Result<GradedPoly, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| perr(1, 1, "empty input"))?;
    let rest = header.strip_prefix("graded ").ok_or_else(|| perr(hl, 1, "expected `graded` header"))?;
    let fields = header_fields(rest, hl)?;
    let (pc, pv) = take(&fields, "p", hl)?;
    let p: u64 = pv.parse().map_err(|_| perr(hl, pc + 7, "bad p"))?;
    let (oc, ov) = take(&fields, "omega", hl)?;
    let omega: Option<Vec<Rational>> = ov.split(',').map(parse_rational).collect();
    let omega = omega.ok_or_else(|| perr(hl, oc + 7, "bad omega"))?;
    let (sc, sv) = take(&fields, "s", hl)?;
    let s = parse_rational(sv).ok_or_else(|| perr(hl, sc + 7, "bad s"))?;
    let ambient = Ambient::new(p, omega, s);
    let (pl, body) = lines.next().ok_or_else(|| perr(hl + 1, 1, "missing polynomial line"))?;
    let parsed = if ideal_input { GradedPoly::parse_generator(&ambient, body) } else { GradedPoly::parse(&ambient, body) };
    let g = parsed.map_err(|e| match e {
        crate::graded::GradedError::Syntax { column, message } => perr(pl, column, message),
        other => perr(pl, 1, other.to_string()),
    })?;
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, 1, "trailing content"));
    }
    Ok(g)
}
