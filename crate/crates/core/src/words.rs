//! Expression words and the rewrite engine.
//!
//! A word is a product of the generators `1`, `D` (the diamond), `V` (the
//! set {0,1}) and pairs `(l,r)`. Juxtaposition is substitution into the
//! empty set, so `lower(a ++ b) = lower(a)` with `{}` replaced by `lower(b)`.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One as _, Zero};
use thiserror::Error;

use crate::hfset::{HFSet, SetError};
use crate::ratcodec::{self, Ratio};
use crate::sbtree;

pub const DEFAULT_MAX_STEPS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    One,
    Diamond,
    TwoV,
    Pair(Word, Word),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Factor>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("no normal form within {budget} steps; last steps:\n{}", render_tail(.tail))]
    NonTerminating { budget: usize, tail: Vec<TraceStep> },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("word parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },
}

fn render_tail(tail: &[TraceStep]) -> String {
    tail.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n")
}

use Factor::{Diamond as D, One as I, TwoV as V};

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(n: usize) -> Word {
        Word(vec![I; n])
    }

    pub fn pair(l: Word, r: Word) -> Factor {
        Factor::Pair(l, r)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `[1 x n]`, or `None` if the word is anything else.
    pub fn as_natural(&self) -> Option<usize> {
        self.0.iter().all(|f| *f == I).then_some(self.0.len())
    }

    /// `D 1^n` is `+n`, `1^n D` is `-n`.
    pub fn as_integer(&self) -> Option<i64> {
        let f = &self.0;
        let (first, rest) = f.split_first()?;
        if *first == D && rest.iter().all(|x| *x == I) {
            return Some(rest.len() as i64);
        }
        let (last, init) = f.split_last()?;
        if *last == D && init.iter().all(|x| *x == I) {
            return Some(-(init.len() as i64));
        }
        None
    }

    pub fn has_pairs(&self) -> bool {
        self.0.iter().any(|f| matches!(f, Factor::Pair(..)))
    }

    /// Total number of factors, counting inside pairs.
    pub fn size(&self) -> usize {
        self.0
            .iter()
            .map(|f| match f {
                Factor::Pair(l, r) => 1 + l.size() + r.size(),
                _ => 1,
            })
            .sum()
    }
}

impl From<Vec<Factor>> for Word {
    fn from(v: Vec<Factor>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        write_factors(&self.0, f)
    }
}

fn write_factors(fs: &[Factor], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for x in fs {
        match x {
            I => f.write_str("1")?,
            D => f.write_str("D")?,
            V => f.write_str("V")?,
            Factor::Pair(l, r) => {
                f.write_str("(")?;
                write_factors(&l.0, f)?;
                f.write_str(",")?;
                write_factors(&r.0, f)?;
                f.write_str(")")?;
            }
        }
    }
    Ok(())
}

struct Parser<'a> {
    s: &'a str,
    at: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<char> {
        let rest = &self.s[self.at..];
        let trimmed = rest.trim_start();
        self.at += rest.len() - trimmed.len();
        trimmed.chars().next()
    }

    fn bump(&mut self, c: char) {
        self.at += c.len_utf8();
    }

    fn err(&self, msg: &str) -> WordError {
        WordError::Parse { at: self.at, msg: msg.into() }
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                '1' => out.push(I),
                'D' | '◇' => out.push(D),
                'V' => out.push(V),
                'ε' => {}
                '(' => {
                    self.bump(c);
                    let l = self.word()?;
                    if self.peek() != Some(',') {
                        return Err(self.err("expected ','"));
                    }
                    self.bump(',');
                    let r = self.word()?;
                    if self.peek() != Some(')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.bump(')');
                    out.push(Factor::Pair(l, r));
                    continue;
                }
                ',' | ')' => break,
                _ => return Err(self.err(&format!("unexpected {c:?}"))),
            }
            self.bump(c);
        }
        Ok(Word(out))
    }
}

impl FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s, at: 0 };
        let w = p.word()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(w)
    }
}

/// Set denoted by a word, folding from the rightmost factor.
pub fn lower(w: &Word) -> Result<HFSet, WordError> {
    let one = HFSet::zermelo(1)?;
    let diamond = HFSet::diamond()?;
    let two_v = HFSet::two_v()?;
    lower_with(w, one, diamond, two_v)
}

fn lower_with(w: &Word, one: HFSet, diamond: HFSet, two_v: HFSet) -> Result<HFSet, WordError> {
    let mut acc = HFSet::empty();
    for f in w.0.iter().rev() {
        let base = match f {
            I => one,
            D => diamond,
            V => two_v,
            Factor::Pair(l, r) => HFSet::kuratowski(
                lower_with(l, one, diamond, two_v)?,
                lower_with(r, one, diamond, two_v)?,
            )?,
        };
        acc = base.substitute(acc)?;
    }
    Ok(acc)
}

pub fn concat(a: &Word, b: &Word) -> Word {
    a.concat(b)
}

pub fn natural_word(n: usize) -> Word {
    Word::ones(n)
}

/// `+n` is `D 1^n`, `-n` is `1^n D`, zero is `D`.
pub fn int_word(z: i64) -> Word {
    let n = z.unsigned_abs() as usize;
    let mut v = Vec::with_capacity(n + 1);
    if z >= 0 {
        v.push(D);
        v.extend(std::iter::repeat_n(I, n));
    } else {
        v.extend(std::iter::repeat_n(I, n));
        v.push(D);
    }
    Word(v)
}

/// `x + y` is `y D x`.
pub fn expr_add_int(x: &Word, y: &Word) -> Word {
    let mut v = y.0.clone();
    v.push(D);
    v.extend_from_slice(&x.0);
    Word(v)
}

/// `x - y` is `D y x`.
pub fn expr_sub_int(x: &Word, y: &Word) -> Word {
    let mut v = vec![D];
    v.extend_from_slice(&y.0);
    v.extend_from_slice(&x.0);
    Word(v)
}

/// `(D, b)`: a sequence at `b` stepping by `b`.
pub fn mul_start(b: &Word) -> Word {
    Word(vec![Factor::Pair(Word(vec![D]), b.clone())])
}

/// `(e1, e)`: restarts a unit downward sequence at the value of `e`.
pub fn close(e: &Word) -> Word {
    Word(vec![Factor::Pair(e.concat(&Word(vec![I])), e.clone())])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

impl Rule {
    pub const ALL: [Rule; 9] = [
        Rule::R1,
        Rule::R2,
        Rule::R3,
        Rule::R4,
        Rule::R5,
        Rule::R6,
        Rule::R7,
        Rule::R8,
        Rule::R9,
    ];
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Location of a redex: top-level index, then `(entry, index)` hops into pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pos(pub Vec<usize>);

impl fmt::Display for Pos {
    // Top-level index first; each hop into a pair adds `.L<i>` or `.R<i>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0[0])?;
        for ch in self.0[1..].chunks(2) {
            let side = if ch[0] == 0 { 'L' } else { 'R' };
            write!(f, ".{side}{}", ch[1])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub rule: Rule,
    pub pos: Pos,
    pub word: Word,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: rule {} at pos {}: {}", self.step, self.rule, self.pos, self.word)
    }
}

fn ones_then(w: &[Factor], tail: &[Factor]) -> Option<usize> {
    // `w` must be `1^m ++ tail`; returns m.
    let m = w.len().checked_sub(tail.len())?;
    (w[..m].iter().all(|f| *f == I) && w[m..] == *tail).then_some(m)
}

fn is_int_word(w: &Word) -> bool {
    w.as_integer().is_some()
}

/// Tries `rule` with its match starting at index `i` of `w`; returns the rewritten factor list.
fn try_at(rule: Rule, w: &[Factor], i: usize) -> Option<Vec<Factor>> {
    let splice = |len: usize, rep: Vec<Factor>| {
        let mut out = w[..i].to_vec();
        out.extend(rep);
        out.extend_from_slice(&w[i + len..]);
        out
    };
    match rule {
        Rule::R1 => (w.get(i..i + 3)? == [I, D, I]).then(|| splice(3, vec![D])),
        Rule::R2 => (w.get(i..i + 2)? == [D, D]).then(|| splice(2, vec![])),
        Rule::R3 => (w.get(i..i + 2)? == [D, V]).then(|| splice(2, vec![V, D, I])),
        Rule::R4 => {
            let run = w[i..].iter().take_while(|f| **f == I).count();
            let Some(Factor::Pair(l, r)) = w.get(i + run) else { return None };
            if !l.is_empty() {
                return None;
            }
            let m = ones_then(&r.0, &[V])?;
            (run == m + 2).then(|| splice(m + 3, vec![Factor::Pair(Word::empty(), r.clone()), I]))
        }
        Rule::R5 => {
            let run = w[i..].iter().take_while(|f| **f == I).count();
            if run < 2 {
                return None;
            }
            let Some(Factor::Pair(l, r)) = w.get(i + run) else { return None };
            if !r.is_empty() {
                return None;
            }
            let m = ones_then(&l.0, &[V, D])?;
            let n = run - 2;
            let mut rep = vec![I; m];
            rep.push(D);
            rep.extend(std::iter::repeat_n(I, n));
            let mut inner = vec![I; n];
            inner.extend([V, D]);
            rep.push(Factor::Pair(Word(inner), Word::empty()));
            rep.extend([I, D, V]);
            Some(splice(run + 1, rep))
        }
        Rule::R6 => {
            let Factor::Pair(l, r) = w.get(i)? else { return None };
            if let Some(Factor::Pair(_, b)) = l.0.first() {
                let nl = b.concat(&Word(l.0[1..].to_vec()));
                return Some(splice(1, vec![Factor::Pair(nl, r.clone())]));
            }
            if let Some(Factor::Pair(_, d)) = r.0.first() {
                let nr = d.concat(&Word(r.0[1..].to_vec()));
                return Some(splice(1, vec![Factor::Pair(l.clone(), nr)]));
            }
            None
        }
        Rule::R7 => {
            if *w.get(i)? != I {
                return None;
            }
            let Factor::Pair(u, v) = w.get(i + 1)? else { return None };
            let mut rep = vec![w[i + 1].clone()];
            if is_int_word(u) && is_int_word(v) {
                rep.extend_from_slice(&u.0);
                rep.extend_from_slice(&v.0);
            } else if u.as_natural().is_some() && v.as_natural().is_some() {
                rep.push(D);
                rep.extend_from_slice(&u.0);
                rep.push(D);
                rep.extend_from_slice(&v.0);
            } else {
                rep.push(Factor::Pair(u.concat(&Word::ones(1)), u.clone()));
                rep.push(Factor::Pair(v.concat(&Word::ones(1)), v.clone()));
            }
            Some(splice(2, rep))
        }
        Rule::R8 => {
            // (1t, t) is the diamond followed by t.
            let Factor::Pair(l, r) = w.get(i)? else { return None };
            if l.0.first() == Some(&I) && l.0[1..] == r.0[..] {
                let mut rep = vec![D];
                rep.extend_from_slice(&r.0);
                return Some(splice(1, rep));
            }
            None
        }
        Rule::R9 => {
            let Factor::Pair(l, r) = w.get(i)? else { return None };
            if l.0.first() == Some(&D) && r.0.first() == Some(&D) {
                let nl = Word(l.0[1..].to_vec());
                let nr = Word(r.0[1..].to_vec());
                return Some(splice(1, vec![Factor::Pair(nl, nr)]));
            }
            None
        }
    }
}

/// Leftmost match of `rule`, pair interiors visited right after the pair itself.
fn find(rule: Rule, w: &[Factor], path: &mut Vec<usize>) -> Option<Vec<Factor>> {
    for i in 0..w.len() {
        path.push(i);
        if let Some(out) = try_at(rule, w, i) {
            return Some(out);
        }
        if let Factor::Pair(l, r) = &w[i] {
            for (side, entry) in [(0usize, l), (1, r)] {
                path.push(side);
                if let Some(inner) = find(rule, &entry.0, path) {
                    let mut out = w.to_vec();
                    let Factor::Pair(ol, or) = &mut out[i] else { unreachable!() };
                    *(if side == 0 { ol } else { or }) = Word(inner);
                    return Some(out);
                }
                path.pop();
            }
        }
        path.pop();
    }
    None
}

/// One rewrite: highest-priority rule at its leftmost match.
pub fn rewrite_step(w: &Word) -> Option<(Word, Rule, Pos)> {
    for rule in Rule::ALL {
        let mut path = Vec::new();
        if let Some(out) = find(rule, &w.0, &mut path) {
            return Some((Word(out), rule, Pos(path)));
        }
    }
    None
}

/// Rewrites only with `rule`, at its leftmost match.
pub fn rewrite_with(w: &Word, rule: Rule) -> Option<(Word, Pos)> {
    let mut path = Vec::new();
    find(rule, &w.0, &mut path).map(|out| (Word(out), Pos(path)))
}

pub fn evaluate(w: &Word) -> Result<Word, WordError> {
    evaluate_with(w, DEFAULT_MAX_STEPS)
}

pub fn evaluate_with(w: &Word, max_steps: usize) -> Result<Word, WordError> {
    run(w, max_steps, false).map(|(nf, _)| nf)
}

/// Normal form together with every step taken.
pub fn evaluate_traced(w: &Word, max_steps: usize) -> Result<(Word, Vec<TraceStep>), WordError> {
    run(w, max_steps, true)
}

fn run(w: &Word, max_steps: usize, keep: bool) -> Result<(Word, Vec<TraceStep>), WordError> {
    let mut cur = w.clone();
    let mut full = Vec::new();
    let mut recent: VecDeque<TraceStep> = VecDeque::with_capacity(10);
    for step in 1..=max_steps.max(1) + 1 {
        let Some((next, rule, pos)) = rewrite_step(&cur) else {
            return Ok((cur, full));
        };
        if step > max_steps.max(1) {
            break;
        }
        let t = TraceStep { step, rule, pos, word: next.clone() };
        if keep {
            full.push(t.clone());
        }
        if recent.len() == 10 {
            recent.pop_front();
        }
        recent.push_back(t);
        cur = next;
    }
    Err(WordError::NonTerminating { budget: max_steps, tail: recent.into() })
}

/// Value of a pair-free word of `1`, `D`, `V`, read from the left starting at 0:
/// `1` adds one, `D` negates, `V` maps x to 1/(2+x).
fn left_value(w: &Word) -> Option<Ratio> {
    let two = Ratio::from_integer(BigInt::from(2));
    let mut x = Ratio::zero();
    for f in &w.0 {
        match f {
            I => x += Ratio::one(),
            D => x = -x,
            V => {
                let d = &two + &x;
                if d.is_zero() {
                    return None;
                }
                x = d.recip();
            }
            Factor::Pair(..) => return None,
        }
    }
    Some(x)
}

/// Heights whose route-word normal forms are tabulated for parsing.
pub const ROUTE_TABLE_HEIGHT: u64 = 12;

fn route_table() -> &'static HashMap<Word, Vec<ratcodec::NatRep>> {
    static TABLE: OnceLock<HashMap<Word, Vec<ratcodec::NatRep>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t: HashMap<Word, Vec<ratcodec::NatRep>> = HashMap::new();
        for h in 1..=ROUTE_TABLE_HEIGHT {
            for s in sbtree::level(h).expect("height is positive") {
                let nf = evaluate(&sbtree::route_word(&s)).expect("route words terminate");
                t.entry(nf).or_default().push(s);
            }
        }
        t
    })
}

/// Tree sequences whose route words normalize to `nf`.
///
/// Exhaustive up to [`ROUTE_TABLE_HEIGHT`]; above it only the candidate given
/// by reading `nf` from the left is tried. More than one entry means `nf`
/// does not determine a rational.
pub fn route_preimages(nf: &Word) -> Vec<ratcodec::NatRep> {
    let mut out = route_table().get(nf).cloned().unwrap_or_default();
    if let Some(q) = left_value(nf) {
        let s = ratcodec::encode(&q);
        if sbtree::height_of(&s) > ROUTE_TABLE_HEIGHT
            && evaluate(&sbtree::route_word(&s)).is_ok_and(|w| w == *nf)
        {
            out.push(s);
        }
    }
    out
}

/// The unique tree sequence whose route word normalizes to `nf`, if there is one.
pub fn route_rational(nf: &Word) -> Option<ratcodec::NatRep> {
    let mut pre = route_preimages(nf);
    if pre.len() == 1 { pre.pop() } else { None }
}

/// Numeric reading of a normal form; `None` means undefined.
///
/// Natural and integer words read as themselves, route-word normal forms as
/// their tree sequence, and a word headed by a pair `(l,r)t` as the value
/// reached by the sequence, that of `r t`.
pub fn valuate_normal(nf: &Word) -> Result<Option<Ratio>, WordError> {
    valuate_depth(nf, 64)
}

fn valuate_depth(nf: &Word, depth: usize) -> Result<Option<Ratio>, WordError> {
    if let Some(n) = nf.as_natural() {
        return Ok(Some(Ratio::from_integer(BigInt::from(n))));
    }
    if let Some(z) = nf.as_integer() {
        return Ok(Some(Ratio::from_integer(BigInt::from(z))));
    }
    if let Some(Factor::Pair(_, r)) = nf.0.first() {
        if depth == 0 {
            return Ok(None);
        }
        let reached = evaluate(&r.concat(&Word(nf.0[1..].to_vec())))?;
        return valuate_depth(&reached, depth - 1);
    }
    Ok(route_rational(nf).map(|s| ratcodec::decode(&s).expect("tree sequences are valid")))
}

pub fn valuate(w: &Word) -> Result<Option<Ratio>, WordError> {
    valuate_normal(&evaluate(w)?)
}

/// Integer entry convention inside the open form `s_k V ... s_1 V s_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenConvention {
    /// Every entry as an integer word (`D 1^n`, `1^n D`, `D`).
    IntegerWords,
    /// Interior entries `1^n` / `1^n D` with zero as `D`; the integer part as an integer word.
    NaturalInterior,
    /// Interior entries `1^n` / `1^n D` with zero as the empty word.
    NaturalInteriorEmptyZero,
}

fn open_entry(z: &BigInt, conv: OpenConvention, integer_part: bool) -> Word {
    use num_traits::{Signed, ToPrimitive};
    let n = z.abs().to_usize().expect("entry fits in usize");
    if integer_part || conv == OpenConvention::IntegerWords {
        return int_word(z.to_i64().expect("entry fits in i64"));
    }
    if z.is_zero() {
        return match conv {
            OpenConvention::NaturalInteriorEmptyZero => Word::empty(),
            _ => Word(vec![D]),
        };
    }
    let mut w = Word::ones(n);
    if z.is_negative() {
        w.0.push(D);
    }
    w
}

/// `s_k V ... s_2 V s_1 V s_0` with integer entries spelled per `conv`.
pub fn rational_open_word(s: &ratcodec::NatRep, conv: OpenConvention) -> Word {
    let e = s.entries();
    let mut out = Vec::new();
    for z in e[1..].iter().rev() {
        out.extend(open_entry(z, conv, false).0);
        out.push(V);
    }
    out.extend(open_entry(&e[0], conv, true).0);
    Word(out)
}
