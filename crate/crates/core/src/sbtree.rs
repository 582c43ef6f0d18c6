//! The extended Stern-Brocot tree over natural representations.
//!
//! The root `[0]` has three children; every other node has two. Level `h`
//! holds exactly the sequences of height `h`, and within a level the order of
//! sequences matches the order of their values.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ratcodec::{self, CodecError, NatRep, Ratio};
use crate::words::{Factor, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("out of range: {0}")]
    Range(String),
    #[error("map undefined at its pole {0}")]
    Pole(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeLabel {
    Plain,
    DiamondMarked,
    Branch,
}

impl EdgeLabel {
    /// Factors this edge adds to the left of a route word.
    pub fn prefix(self) -> Vec<Factor> {
        match self {
            EdgeLabel::Plain => vec![Factor::One],
            EdgeLabel::DiamondMarked => vec![Factor::One, Factor::Diamond],
            EdgeLabel::Branch => vec![Factor::Diamond, Factor::TwoV, Factor::Diamond],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EdgeLabel::Plain => "1",
            EdgeLabel::DiamondMarked => "D",
            EdgeLabel::Branch => "DVD",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub seq: NatRep,
    pub height: u64,
    pub index: u64,
}

pub fn root() -> NatRep {
    NatRep::from_i64s(&[0]).expect("valid")
}

fn is_root(s: &NatRep) -> bool {
    s.len() == 1 && s.entries()[0].is_zero()
}

fn with_last(s: &NatRep, z: BigInt) -> NatRep {
    let mut e = s.entries().to_vec();
    *e.last_mut().expect("nonempty") = z;
    NatRep::new(e).expect("changing the last entry keeps validity")
}

/// Children in increasing order, each with the label of its edge.
pub fn children(s: &NatRep) -> Vec<(NatRep, EdgeLabel)> {
    let one = BigInt::one();
    if is_root(s) {
        return vec![
            (with_last(s, -&one), EdgeLabel::DiamondMarked),
            (NatRep::from_i64s(&[0, 0]).expect("valid"), EdgeLabel::Branch),
            (with_last(s, one), EdgeLabel::Plain),
        ];
    }
    let z = s.last().clone();
    let mut out = if z.is_zero() {
        vec![
            (with_last(s, one.clone()), EdgeLabel::DiamondMarked),
            (with_last(s, -one), EdgeLabel::Plain),
        ]
    } else {
        let grown = if z.is_negative() { &z - 1 } else { &z + 1 };
        let mut e = s.entries().to_vec();
        e.push(BigInt::zero());
        vec![
            (with_last(s, grown), EdgeLabel::Plain),
            (NatRep::new(e).expect("last entry was nonzero"), EdgeLabel::Branch),
        ]
    };
    out.sort_by(|a, b| ratcodec::compare(&a.0, &b.0).expect("valid"));
    out
}

pub fn parent(s: &NatRep) -> Option<NatRep> {
    if is_root(s) {
        return None;
    }
    let z = s.last();
    if z.is_zero() {
        let e = s.entries();
        return Some(NatRep::new(e[..e.len() - 1].to_vec()).expect("prefix of valid is valid"));
    }
    if z.abs().is_one() && s.len() > 1 {
        return Some(with_last(s, BigInt::zero()));
    }
    let shrunk = if z.is_negative() { z + 1 } else { z - 1 };
    Some(with_last(s, shrunk))
}

fn edge_into(s: &NatRep, p: &NatRep) -> EdgeLabel {
    children(p)
        .into_iter()
        .find(|(c, _)| c == s)
        .map(|(_, l)| l)
        .expect("parent lists the child")
}

/// Root-to-node path as `(node, label of the edge into it)`.
pub fn path(s: &NatRep) -> Vec<(NatRep, EdgeLabel)> {
    let mut out = Vec::new();
    let mut cur = s.clone();
    while let Some(p) = parent(&cur) {
        let l = edge_into(&cur, &p);
        out.push((cur, l));
        cur = p;
    }
    out.reverse();
    out
}

pub fn route(s: &NatRep) -> Vec<EdgeLabel> {
    path(s).into_iter().map(|(_, l)| l).collect()
}

/// Each edge of the route, taken from the root, adds its factors on the left.
pub fn route_word(s: &NatRep) -> Word {
    let mut w: Vec<Factor> = Vec::new();
    for l in route(s) {
        let mut next = l.prefix();
        next.extend(w);
        w = next;
    }
    Word(w)
}

pub fn height_of(s: &NatRep) -> u64 {
    s.height().to_u64().expect("height fits in u64")
}

pub fn level_size(h: u64) -> Result<u64, TreeError> {
    match h {
        0 => Err(TreeError::Range("heights start at 1".into())),
        1 => Ok(1),
        h if h - 2 < 62 => Ok(3u64 << (h - 2)),
        _ => Err(TreeError::Range(format!("level {h} is too wide to index"))),
    }
}

/// Every sequence of height `h`, in increasing order.
pub fn level(h: u64) -> Result<Vec<NatRep>, TreeError> {
    level_size(h)?;
    let mut cur = vec![root()];
    for _ in 1..h {
        cur = cur.iter().flat_map(|s| children(s).into_iter().map(|(c, _)| c)).collect();
    }
    cur.sort_by(|a, b| ratcodec::compare(a, b).expect("valid"));
    Ok(cur)
}

pub fn node_at(h: u64, i: u64) -> Result<NatRep, TreeError> {
    let size = level_size(h)?;
    if i >= size {
        return Err(TreeError::Range(format!("index {i} outside level {h} of width {size}")));
    }
    let mut s = root();
    if h == 1 {
        return Ok(s);
    }
    let top = (i >> (h - 2)) as usize;
    s = children(&s).swap_remove(top).0;
    for bit in (0..h - 2).rev() {
        let side = ((i >> bit) & 1) as usize;
        s = children(&s).swap_remove(side).0;
    }
    Ok(s)
}

pub fn index_of(s: &NatRep) -> (u64, u64) {
    let mut idx = 0u64;
    let mut prev = root();
    for (node, _) in path(s) {
        let pos = children(&prev).iter().position(|(c, _)| *c == node).expect("child") as u64;
        idx = if is_root(&prev) { pos } else { 2 * idx + pos };
        prev = node;
    }
    (height_of(s), idx)
}

pub fn negate(s: &NatRep) -> NatRep {
    s.negate()
}

pub fn node(s: &NatRep) -> TreeNode {
    let (height, index) = index_of(s);
    TreeNode { seq: s.clone(), height, index }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    MinusTwo,
    MinusOne,
    MinusHalf,
    Zero,
    One,
}

impl Anchor {
    pub const ALL: [Anchor; 5] =
        [Anchor::MinusTwo, Anchor::MinusOne, Anchor::MinusHalf, Anchor::Zero, Anchor::One];

    pub fn value(self) -> Ratio {
        match self {
            Anchor::MinusTwo => ratcodec::ratio(-2, 1),
            Anchor::MinusOne => ratcodec::ratio(-1, 1),
            Anchor::MinusHalf => ratcodec::ratio(-1, 2),
            Anchor::Zero => ratcodec::ratio(0, 1),
            Anchor::One => ratcodec::ratio(1, 1),
        }
    }

    pub fn parse(s: &str) -> Result<Anchor, TreeError> {
        let q = ratcodec::parse_ratio(s)?;
        Anchor::ALL
            .into_iter()
            .find(|a| a.value() == q)
            .ok_or_else(|| TreeError::Range(format!("no symmetry anchored at {q}")))
    }

    /// The involution this anchor centres.
    pub fn map(self, x: &Ratio) -> Result<Ratio, TreeError> {
        match self {
            Anchor::MinusHalf => Ok(-Ratio::one() - x),
            Anchor::MinusOne | Anchor::One => {
                if x.is_zero() {
                    return Err(TreeError::Pole("0".into()));
                }
                Ok(x.recip())
            }
            Anchor::Zero | Anchor::MinusTwo => {
                let d = Ratio::one() + x;
                if d.is_zero() {
                    return Err(TreeError::Pole("-1".into()));
                }
                Ok(-x / d)
            }
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

pub fn symmetry_map(anchor: Anchor, x: &Ratio) -> Result<Ratio, TreeError> {
    anchor.map(x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymPair {
    pub i: u64,
    pub j: u64,
    pub value_i: String,
    pub value_j: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub anchor: String,
    pub height: u64,
    pub center_times_2: i64,
    pub pairs: Vec<SymPair>,
    pub span: Option<[String; 2]>,
}

/// Pairs `(i, 2c - i)` around the anchor's insertion point `c` whose values
/// correspond under the anchor's map, plus the widest contiguous run of them.
pub fn check_symmetry(anchor: Anchor, h: u64) -> Result<SymmetryReport, TreeError> {
    if h < 2 {
        return Err(TreeError::Range("symmetry needs height at least 2".into()));
    }
    let values: Vec<Ratio> = level(h)?
        .iter()
        .map(|s| ratcodec::decode(s).expect("valid"))
        .collect();
    let a = anchor.value();
    let below = values.partition_point(|v| *v < a) as i64;
    let c2 = 2 * below - 1;
    let n = values.len() as i64;
    let mut pairs = Vec::new();
    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    let mut k = 0usize;
    // Walk outward from the centre: distance k pairs (below-1-k, below+k).
    loop {
        let i = below - 1 - k as i64;
        let j = c2 - i;
        if i < 0 || j >= n {
            break;
        }
        let (vi, vj) = (&values[i as usize], &values[j as usize]);
        let ok = matches!(anchor.map(vi), Ok(m) if m == *vj);
        if ok {
            pairs.push(SymPair {
                i: i as u64,
                j: j as u64,
                value_i: vi.to_string(),
                value_j: vj.to_string(),
            });
            let start = *run_start.get_or_insert(k);
            if best.is_none_or(|(s, e)| k - start > e - s) {
                best = Some((start, k));
            }
        } else {
            run_start = None;
        }
        k += 1;
    }
    pairs.reverse();
    let span = best.map(|(_, outer)| {
        let i = (below - 1 - outer as i64) as usize;
        let j = (c2 - i as i64) as usize;
        [values[i].to_string(), values[j].to_string()]
    });
    Ok(SymmetryReport { anchor: anchor.to_string(), height: h, center_times_2: c2, pairs, span })
}

/// Integer Mobius map `x -> (a x + b) / (c x + d)`, up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Mobius([i64; 4]);

impl Mobius {
    fn compose(self, o: Mobius) -> Mobius {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mobius([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h]).normal()
    }

    fn normal(self) -> Mobius {
        let first = self.0.iter().copied().find(|&x| x != 0).unwrap_or(1);
        if first < 0 {
            Mobius(self.0.map(|x| -x))
        } else {
            self
        }
    }
}

pub const D3_NAMES: [&str; 6] = ["id", "f", "g", "fg", "gf", "fgf"];

fn d3_elements() -> [Mobius; 6] {
    let id = Mobius([1, 0, 0, 1]);
    let f = Mobius([-1, -1, 0, 1]).normal();
    let g = Mobius([0, 1, 1, 0]);
    [id, f, g, f.compose(g), g.compose(f), f.compose(g).compose(f)]
}

/// `table[a][b]` names `a . b` (apply `b` first).
pub fn d3_table() -> [[&'static str; 6]; 6] {
    let els = d3_elements();
    let mut t = [[""; 6]; 6];
    for (i, x) in els.iter().enumerate() {
        for (j, y) in els.iter().enumerate() {
            let p = x.compose(*y);
            let k = els.iter().position(|e| *e == p).expect("group is closed");
            t[i][j] = D3_NAMES[k];
        }
    }
    t
}

pub fn d3_f(x: &Ratio) -> Ratio {
    -Ratio::one() - x
}

pub fn d3_g(x: &Ratio) -> Result<Ratio, TreeError> {
    if x.is_zero() {
        return Err(TreeError::Pole("0".into()));
    }
    Ok(x.recip())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct D3Report {
    pub samples: usize,
    pub failures: Vec<String>,
    pub table: Vec<Vec<String>>,
}

impl D3Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the group relations pointwise on each sample; 0 and -1 are poles.
pub fn d3_check(samples: &[Ratio]) -> Result<D3Report, TreeError> {
    let f = d3_f;
    let g = d3_g;
    let sigma0 = |x: &Ratio| Anchor::Zero.map(x);
    let mut failures = Vec::new();
    for x in samples {
        if x.is_zero() || *x == -Ratio::one() {
            return Err(TreeError::Pole(x.to_string()));
        }
        let fg = |y: &Ratio| g(y).map(|v| f(&v));
        let fg3 = fg(&fg(&fg(x)?)?)?;
        let fgf = f(&g(&f(x))?);
        let gfg = g(&f(&g(x)?))?;
        let s0 = sigma0(x)?;
        let checks = [
            ("ff", f(&f(x)) == *x),
            ("gg", g(&g(x)?)? == *x),
            ("(fg)^3", fg3 == *x),
            ("fgf", fgf == s0),
            ("gfg", gfg == s0),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("{name} at {x}"));
            }
        }
    }
    let table = d3_table().iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    Ok(D3Report { samples: samples.len(), failures, table })
}

/// Tree edges down to height `h` as Graphviz, labelled `1`, `D`, `DVD`.
pub fn level_dot(h: u64) -> Result<String, TreeError> {
    level_size(h)?;
    let mut out = String::from("digraph {\n");
    let mut cur = vec![root()];
    out.push_str(&format!("  \"{}\";\n", cur[0]));
    for _ in 1..h {
        let mut next = Vec::new();
        for p in &cur {
            for (c, l) in children(p) {
                out.push_str(&format!("  \"{p}\" -> \"{c}\" [label=\"{l}\"];\n"));
                next.push(c);
            }
        }
        cur = next;
    }
    out.push_str("}\n");
    Ok(out)
}

pub fn cmp_seq(a: &NatRep, b: &NatRep) -> Ordering {
    ratcodec::compare(a, b).expect("valid sequences compare")
}
