//! Sequence codecs for exact rationals.
//!
//! The natural representation `[s0; s1, ..., sk]` is a signed continued
//! fraction whose terms step through reciprocals of the form `1/(2+n)`.
//! Alongside it live the non-negative variant, the signed fractional
//! variant without integer part, and the standard continued fraction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Ratio = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unreachable comparison: {0}")]
    Unreachable(String),
}

/// Validated natural representation `[s0; s1, ..., sk]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NatRep(Vec<BigInt>);

/// Interior entries (strictly between the first and the last) must be nonzero.
pub fn is_valid(entries: &[BigInt]) -> bool {
    match entries.len() {
        0 => false,
        1 | 2 => true,
        n => entries[1..n - 1].iter().all(|e| !e.is_zero()),
    }
}

impl NatRep {
    pub fn new(entries: Vec<BigInt>) -> Result<NatRep, CodecError> {
        if entries.is_empty() {
            return Err(CodecError::InvalidSequence("empty sequence".into()));
        }
        if !is_valid(&entries) {
            return Err(CodecError::InvalidSequence(format!(
                "interior zero in {}",
                fmt_entries(&entries)
            )));
        }
        Ok(NatRep(entries))
    }

    pub fn from_i64s(entries: &[i64]) -> Result<NatRep, CodecError> {
        NatRep::new(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    /// Number of entries, `k + 1`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &BigInt {
        self.0.last().expect("nonempty")
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|e| e.to_i64()).collect()
    }

    /// Length plus the sum of absolute values: the level in the tree.
    pub fn height(&self) -> BigInt {
        self.0.iter().fold(BigInt::from(self.0.len()), |acc, e| acc + e.abs())
    }

    /// Every entry negated.
    pub fn negate(&self) -> NatRep {
        NatRep(self.0.iter().map(|e| -e).collect())
    }
}

fn fmt_entries(e: &[BigInt]) -> String {
    let mut s = format!("[{}", e[0]);
    for (i, x) in e[1..].iter().enumerate() {
        s.push_str(if i == 0 { "; " } else { ", " });
        s.push_str(&x.to_string());
    }
    s.push(']');
    s
}

impl fmt::Display for NatRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_entries(&self.0))
    }
}

fn parse_int(s: &str) -> Result<BigInt, CodecError> {
    let t = s.trim();
    BigInt::from_str(t).map_err(|_| CodecError::Parse(format!("not an integer: {t:?}")))
}

/// Parses `[s0]` or `[s0; s1, s2, ...]`; whitespace around tokens is ignored.
pub fn parse_entries(s: &str) -> Result<Vec<BigInt>, CodecError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| CodecError::Parse(format!("expected [..]: {t:?}")))?;
    let mut parts = inner.splitn(2, ';');
    let head = parts.next().unwrap_or("");
    if head.contains(',') {
        return Err(CodecError::Parse("first entry must be followed by ';'".into()));
    }
    let mut out = vec![parse_int(head)?];
    if let Some(rest) = parts.next() {
        for tok in rest.split(',') {
            out.push(parse_int(tok)?);
        }
    }
    Ok(out)
}

impl FromStr for NatRep {
    type Err = CodecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NatRep::new(parse_entries(s)?)
    }
}

/// Parses `n/d` or `n` into lowest terms.
pub fn parse_ratio(s: &str) -> Result<Ratio, CodecError> {
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(Ratio::from_integer(parse_int(t)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(CodecError::Domain("zero denominator".into()));
            }
            Ok(Ratio::new(n, d))
        }
    }
}

pub fn ratio(n: i64, d: i64) -> Ratio {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

fn check_proper(n: &BigInt, d: &BigInt) -> Result<(), CodecError> {
    if !(n.is_positive() && n < d) {
        return Err(CodecError::Domain(format!("need 0 < n < d, got {n}/{d}")));
    }
    if !n.gcd(d).is_one() {
        return Err(CodecError::Domain(format!("{n}/{d} is not in lowest terms")));
    }
    Ok(())
}

/// Repeatedly takes the smallest multiple of `n` exceeding `d` and keeps the overshoot.
pub fn encode_nonneg(n: &BigInt, d: &BigInt) -> Result<Vec<BigInt>, CodecError> {
    check_proper(n, d)?;
    let (mut n, mut d) = (n.clone(), d.clone());
    let two = BigInt::from(2);
    let mut out = Vec::new();
    loop {
        if n.is_one() {
            out.push(&d - &two);
            return Ok(out);
        }
        let m: BigInt = d.div_floor(&n) - 1;
        let next_n = (&two + &m) * &n - &d;
        out.push(m);
        d = n;
        n = next_n;
    }
}

/// `f(m1, ..) = 1/(2 + m1 - f(..))`, `f() = 0`.
pub fn eval_nonneg(ms: &[BigInt]) -> Ratio {
    let two = Ratio::from_integer(BigInt::from(2));
    ms.iter().rev().fold(Ratio::zero(), |acc, m| {
        (&two + Ratio::from_integer(m.clone()) - acc).recip()
    })
}

/// The signed variant: a zero step flips the sign and replaces `n` by `d - n`.
pub fn encode_signed(n: &BigInt, d: &BigInt) -> Result<Vec<BigInt>, CodecError> {
    check_proper(n, d)?;
    let (mut n, mut d) = (n.clone(), d.clone());
    let two = BigInt::from(2);
    let mut sign = BigInt::one();
    let mut out = Vec::new();
    loop {
        if n.is_one() {
            out.push(&sign * (&d - &two));
            return Ok(out);
        }
        let s: BigInt = d.div_floor(&n) - 1;
        if s.is_zero() {
            sign = -sign;
            n = &d - &n;
            continue;
        }
        let next_n = (&two + &s) * &n - &d;
        out.push(&sign * &s);
        d = n;
        n = next_n;
    }
}

fn recip_checked(x: Ratio, what: &[BigInt]) -> Result<Ratio, CodecError> {
    if x.is_zero() {
        return Err(CodecError::InvalidSequence(format!(
            "division by zero evaluating {what:?}"
        )));
    }
    Ok(x.recip())
}

/// Signed fractional value: a negative head gives `1 - f(-ss)`, otherwise `1/(2 + s1 - f(rest))`.
pub fn eval_signed(ss: &[BigInt]) -> Result<Ratio, CodecError> {
    if ss.len() > 2 && ss[1..ss.len() - 1].iter().any(|e| e.is_zero()) {
        return Err(CodecError::InvalidSequence(format!("interior zero in {ss:?}")));
    }
    let two = Ratio::from_integer(BigInt::from(2));
    let one = Ratio::one();
    // (f(u), f(-u)) for the current suffix u.
    let (mut pos, mut neg) = (Ratio::zero(), Ratio::zero());
    for h in ss.iter().rev() {
        let hr = Ratio::from_integer(h.clone());
        (pos, neg) = if h.is_positive() {
            let v = recip_checked(&two + &hr - &pos, ss)?;
            (v.clone(), &one - v)
        } else if h.is_negative() {
            let v = recip_checked(&two - &hr - &neg, ss)?;
            (&one - &v, v)
        } else {
            (recip_checked(&two - &pos, ss)?, recip_checked(&two - &neg, ss)?)
        };
    }
    Ok(pos)
}

/// The natural representation of any rational.
pub fn encode(q: &Ratio) -> NatRep {
    let half = Ratio::new(BigInt::one(), BigInt::from(2));
    let two = Ratio::from_integer(BigInt::from(2));
    let mut sign = BigInt::one();
    let mut f = q.clone();
    let mut out = Vec::new();
    loop {
        if f.is_integer() {
            out.push(&sign * f.to_integer());
            return NatRep(out);
        }
        let fl = f.floor();
        let frac = &f - &fl;
        out.push(&sign * (fl.to_integer() + 1));
        if frac < half {
            sign = -sign;
            f = frac.recip() - &two;
        } else {
            f = (Ratio::one() - frac).recip() - &two;
        }
    }
}

/// Inverse of [`encode`].
pub fn decode(s: &NatRep) -> Result<Ratio, CodecError> {
    decode_entries(s.entries())
}

pub fn decode_entries(e: &[BigInt]) -> Result<Ratio, CodecError> {
    if !is_valid(e) {
        return Err(CodecError::InvalidSequence(format!("{e:?}")));
    }
    let two = Ratio::from_integer(BigInt::from(2));
    let one = Ratio::one();
    let last = Ratio::from_integer(e[e.len() - 1].clone());
    // (decode(u), decode(-u)) for the current suffix u, together with u's head.
    let (mut pos, mut neg) = (last.clone(), -last);
    let mut head = &e[e.len() - 1];
    for s in e[..e.len() - 1].iter().rev() {
        let sr = Ratio::from_integer(s.clone());
        let p = if !head.is_negative() {
            &sr - recip_checked(&two + &pos, e)?
        } else {
            &sr - &one + recip_checked(&two + &neg, e)?
        };
        let m = if !head.is_positive() {
            -&sr - recip_checked(&two + &neg, e)?
        } else {
            -&sr - &one + recip_checked(&two + &pos, e)?
        };
        pos = p;
        neg = m;
        head = s;
    }
    Ok(pos)
}

/// Standard continued fraction; the last term is at least 2 unless there is only one term.
pub fn cf_encode(q: &Ratio) -> Vec<BigInt> {
    let mut num = q.numer().clone();
    let mut den = q.denom().clone();
    let mut out = Vec::new();
    loop {
        let (a, r) = num.div_mod_floor(&den);
        out.push(a);
        if r.is_zero() {
            break;
        }
        num = den;
        den = r;
    }
    if out.len() > 1 && out.last().is_some_and(|a| a.is_one()) {
        out.pop();
        *out.last_mut().expect("len > 1") += 1;
    }
    out
}

pub fn cf_eval(terms: &[BigInt]) -> Result<Ratio, CodecError> {
    let (last, init) = terms
        .split_last()
        .ok_or_else(|| CodecError::InvalidSequence("empty continued fraction".into()))?;
    if terms[1..].iter().any(|a| !a.is_positive()) {
        return Err(CodecError::InvalidSequence(format!(
            "partial quotients after the first must be positive: {terms:?}"
        )));
    }
    let mut x = Ratio::from_integer(last.clone());
    for a in init.iter().rev() {
        x = Ratio::from_integer(a.clone()) + x.recip();
    }
    Ok(x)
}

/// Order on sequences that mirrors the order of their values.
pub fn compare(a: &NatRep, b: &NatRep) -> Result<Ordering, CodecError> {
    compare_entries(a.entries(), b.entries())
}

pub fn compare_entries(a: &[BigInt], b: &[BigInt]) -> Result<Ordering, CodecError> {
    if !is_valid(a) || !is_valid(b) {
        return Err(CodecError::InvalidSequence("compare needs valid sequences".into()));
    }
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return Ok(o),
        }
    }
    if a.len() == b.len() {
        return Ok(Ordering::Equal);
    }
    let (short, flip) = if a.len() < b.len() { (a, false) } else { (b, true) };
    let n = short.len() - 1;
    let last = &short[n];
    let short_vs_long = if last.is_positive() || n == 0 {
        Ordering::Greater
    } else if last.is_negative() {
        Ordering::Less
    } else {
        return Err(CodecError::Unreachable(format!(
            "prefix {} ends in zero",
            fmt_entries(short)
        )));
    };
    Ok(if flip { short_vs_long.reverse() } else { short_vs_long })
}

pub fn format_seq(terms: &[BigInt]) -> String {
    if terms.is_empty() {
        return "[]".into();
    }
    fmt_entries(terms)
}
