//! Exact digit streams for quadratic irrationals `(p + q√d)/r`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ratcodec::{self, NatRep, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
}

/// `(p + q·√d)/r`, kept with `gcd(p, q, r) = 1` and `r > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: BigInt,
}

fn is_square_free(d: &BigInt) -> bool {
    let mut k = BigInt::from(2);
    while &k * &k <= *d {
        if (d % (&k * &k)).is_zero() {
            return false;
        }
        k += 1;
    }
    true
}

/// Sign of `a + b√d` for `d ≥ 1`.
fn sign_of(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let z = BigInt::zero();
    match (a.cmp(&z), b.cmp(&z)) {
        (o, Ordering::Equal) => o,
        (Ordering::Equal, o) => o,
        (sa, sb) if sa == sb => sa,
        (sa, _) => {
            // opposite signs: the larger magnitude wins
            match (a * a).cmp(&(b * b * d)) {
                Ordering::Greater => sa,
                Ordering::Less => sa.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

impl Surd {
    pub fn new(p: BigInt, q: BigInt, r: BigInt, d: BigInt) -> Result<Surd, ApproxError> {
        if r.is_zero() {
            return Err(ApproxError::Domain("zero denominator".into()));
        }
        if !d.is_positive() || !is_square_free(&d) {
            return Err(ApproxError::Domain(format!("{d} is not a positive square-free integer")));
        }
        Ok(Surd::normalized(p, q, r, d))
    }

    fn normalized(mut p: BigInt, mut q: BigInt, mut r: BigInt, d: BigInt) -> Surd {
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Surd { p, q, r, d }
    }

    /// `√n`, with square factors pulled out of the radicand.
    pub fn sqrt(n: u64) -> Result<Surd, ApproxError> {
        if n == 0 {
            return Err(ApproxError::Domain("√0 is rational".into()));
        }
        let (mut outer, mut inner, mut k) = (1u64, n, 2u64);
        while k * k <= inner {
            while inner % (k * k) == 0 {
                inner /= k * k;
                outer *= k;
            }
            k += 1;
        }
        if inner == 1 {
            return Err(ApproxError::Domain(format!("√{n} = {outer} is rational")));
        }
        Ok(Surd::normalized(BigInt::zero(), outer.into(), BigInt::one(), inner.into()))
    }

    /// The golden ratio `(1 + √5)/2`.
    pub fn golden() -> Surd {
        Surd::normalized(BigInt::one(), BigInt::one(), BigInt::from(2), BigInt::from(5))
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.p, &self.q, &self.r, &self.d)
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero() || self.d.is_one()
    }

    pub fn floor(&self) -> BigInt {
        let t = &self.q * &self.q * &self.d;
        let mut f = t.sqrt();
        let exact = &f * &f == t;
        if self.q.is_negative() {
            f = if exact { -f } else { -f - 1 };
        }
        (&self.p + f).div_floor(&self.r)
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.p, &self.q, &self.d)
    }

    pub fn neg(&self) -> Surd {
        Surd { p: -&self.p, q: -&self.q, r: self.r.clone(), d: self.d.clone() }
    }

    pub fn abs(&self) -> Surd {
        if self.signum() == Ordering::Less { self.neg() } else { self.clone() }
    }

    pub fn sub_ratio(&self, x: &Ratio) -> Surd {
        let (n, m) = (x.numer(), x.denom());
        Surd::normalized(&self.p * m - n * &self.r, &self.q * m, &self.r * m, self.d.clone())
    }

    pub fn recip(&self) -> Result<Surd, ApproxError> {
        let norm = &self.p * &self.p - &self.q * &self.q * &self.d;
        if norm.is_zero() {
            return Err(ApproxError::Domain("reciprocal of zero".into()));
        }
        Ok(Surd::normalized(&self.r * &self.p, -(&self.r * &self.q), norm, self.d.clone()))
    }

    /// Order against a rational, by integer arithmetic only.
    pub fn cmp_ratio(&self, x: &Ratio) -> Ordering {
        self.sub_ratio(x).signum()
    }

    /// Order against another surd over the same radicand.
    pub fn cmp_surd(&self, other: &Surd) -> Option<Ordering> {
        if self.d != other.d {
            return None;
        }
        let a = &self.p * &other.r - &other.p * &self.r;
        let b = &self.q * &other.r - &other.q * &self.r;
        Some(sign_of(&a, &b, &self.d))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if self.q.is_one() {
            format!("√{}", self.d)
        } else if (-&self.q).is_one() {
            format!("-√{}", self.d)
        } else {
            format!("{}√{}", self.q, self.d)
        };
        let num = match (self.p.is_zero(), self.q.is_zero()) {
            (_, true) => self.p.to_string(),
            (true, false) => root,
            (false, false) if self.q.is_negative() => format!("{} - {}", self.p, root.trim_start_matches('-')),
            (false, false) => format!("{} + {}", self.p, root),
        };
        if self.r.is_one() {
            f.write_str(&num)
        } else if self.p.is_zero() || self.q.is_zero() {
            write!(f, "{num}/{}", self.r)
        } else {
            write!(f, "({num})/{}", self.r)
        }
    }
}

fn require_irrational(x: &Surd) -> Result<(), ApproxError> {
    if x.is_rational() {
        Err(ApproxError::Domain(format!("{x} is rational; use the rational codecs")))
    } else {
        Ok(())
    }
}

/// First `count` natural-representation entries of `x`.
pub fn nat_digits(x: &Surd, count: usize) -> Result<Vec<BigInt>, ApproxError> {
    require_irrational(x)?;
    let half = Ratio::new(BigInt::one(), BigInt::from(2));
    let two = Ratio::from_integer(BigInt::from(2));
    let mut sign = BigInt::one();
    let mut f = x.clone();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let fl = f.floor();
        let frac = f.sub_ratio(&Ratio::from_integer(fl.clone()));
        out.push(&sign * (fl + 1));
        // an irrational fractional part is never exactly 1/2
        f = if frac.cmp_ratio(&half) == Ordering::Less {
            sign = -sign;
            frac.recip()?.sub_ratio(&two)
        } else {
            frac.neg().sub_ratio(&-Ratio::one()).recip()?.sub_ratio(&two)
        };
    }
    Ok(out)
}

/// First `count` standard continued-fraction terms of `x`.
pub fn cf_digits(x: &Surd, count: usize) -> Result<Vec<BigInt>, ApproxError> {
    require_irrational(x)?;
    let mut f = x.clone();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = f.floor();
        f = f.sub_ratio(&Ratio::from_integer(a.clone())).recip()?;
        out.push(a);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codec {
    Natural,
    Standard,
}

/// Value of a digit prefix under `codec`.
pub fn convergent(digits: &[BigInt], codec: Codec) -> Result<Ratio, ApproxError> {
    let r = match codec {
        Codec::Natural => ratcodec::decode(
            &NatRep::new(digits.to_vec()).map_err(|e| ApproxError::InvalidSequence(e.to_string()))?,
        ),
        Codec::Standard => ratcodec::cf_eval(digits),
    };
    r.map_err(|e| ApproxError::InvalidSequence(e.to_string()))
}

/// `|x - convergent|` as an exact surd.
pub fn convergent_error(x: &Surd, digits: &[BigInt], codec: Codec) -> Result<Surd, ApproxError> {
    Ok(x.sub_ratio(&convergent(digits, codec)?).abs())
}
