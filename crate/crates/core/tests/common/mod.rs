//! Reference implementations used as test oracles. They work on machine
//! integers and follow the textbook recursions directly, sharing no code with
//! the library.
#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac(pub i128, pub i128);

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        assert!(d != 0);
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Frac(s * n / g, s * d / g)
    }
    pub fn int(n: i128) -> Frac {
        Frac(n, 1)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    pub fn sub(self, o: Frac) -> Frac {
        self.add(Frac(-o.0, o.1))
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
    pub fn recip(self) -> Frac {
        Frac::new(self.1, self.0)
    }
    pub fn neg(self) -> Frac {
        Frac(-self.0, self.1)
    }
    pub fn floor(self) -> i128 {
        self.0.div_euclid(self.1)
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Frac) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Frac) -> Ordering {
        (self.0 * o.1).cmp(&(o.0 * self.1))
    }
}

/// Natural representation by the recursive definition (negate the tail when
/// the fractional part is below one half).
pub fn encode(q: Frac) -> Vec<i128> {
    let ip = q.floor();
    if q.1 == 1 {
        return vec![ip];
    }
    let frac = q.sub(Frac::int(ip));
    let mut out = vec![ip + 1];
    if frac >= Frac(1, 2) {
        out.extend(encode(Frac::int(1).sub(frac).recip().sub(Frac::int(2))));
    } else {
        out.extend(encode(frac.recip().sub(Frac::int(2))).into_iter().map(|x| -x));
    }
    out
}

/// Value of a natural representation by the recursive definition.
pub fn decode(s: &[i128]) -> Frac {
    let s0 = Frac::int(s[0]);
    let rest = &s[1..];
    if rest.is_empty() {
        return s0;
    }
    if rest[0] >= 0 {
        s0.sub(Frac::int(2).add(decode(rest)).recip())
    } else {
        let neg: Vec<i128> = rest.iter().map(|x| -x).collect();
        s0.sub(Frac::int(1)).add(Frac::int(2).add(decode(&neg)).recip())
    }
}

/// Standard continued fraction with a final term of at least 2.
pub fn cf(q: Frac) -> Vec<i128> {
    let (mut n, mut d) = (q.0, q.1);
    let mut out = Vec::new();
    loop {
        let a = n.div_euclid(d);
        out.push(a);
        let r = n - a * d;
        if r == 0 {
            break;
        }
        (n, d) = (d, r);
    }
    if out.len() > 1 && *out.last().unwrap() == 1 {
        out.pop();
        *out.last_mut().unwrap() += 1;
    }
    out
}

pub fn height(s: &[i128]) -> i128 {
    s.len() as i128 + s.iter().map(|x| x.abs()).sum::<i128>()
}

/// Every valid sequence (interior entries nonzero) of the given height.
pub fn sequences_of_height(h: i128) -> Vec<Vec<i128>> {
    fn grow(prefix: &mut Vec<i128>, left: i128, out: &mut Vec<Vec<i128>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        // append one more entry of magnitude m, costing m + 1
        for m in 0..left {
            for z in if m == 0 { vec![0] } else { vec![m, -m] } {
                if z == 0 && !prefix.is_empty() && left - 1 > 0 {
                    continue; // a zero here would be interior
                }
                prefix.push(z);
                grow(prefix, left - m - 1, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    for m in 0..h {
        for z in if m == 0 { vec![0] } else { vec![m, -m] } {
            let mut p = vec![z];
            grow(&mut p, h - m - 1, &mut out);
        }
    }
    out
}

/// Parent in the extended tree, read off the sequence itself.
pub fn parent(s: &[i128]) -> Option<Vec<i128>> {
    let mut p = s.to_vec();
    let last = *p.last().unwrap();
    if p.len() == 1 {
        return match last {
            0 => None,
            1 | -1 => Some(vec![0]),
            z => Some(vec![z - z.signum()]),
        };
    }
    match last {
        0 => {
            p.pop();
        }
        1 | -1 => *p.last_mut().unwrap() = 0,
        z => *p.last_mut().unwrap() = z - z.signum(),
    }
    Some(p)
}

pub fn is_ancestor_or_self(a: &[i128], b: &[i128]) -> bool {
    let mut cur = Some(b.to_vec());
    while let Some(c) = cur {
        if c == a {
            return true;
        }
        cur = parent(&c);
    }
    false
}

pub fn to_i128s(v: &[BigInt]) -> Vec<i128> {
    v.iter().map(|x| x.to_i128().expect("small entry")).collect()
}

pub fn to_bigs(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
