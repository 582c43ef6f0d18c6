//! Fixed-width codec loops and the Fibonacci-ratio timing harness.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

/// Longest sequence either fast path can produce for 64-bit inputs.
pub const MAX_TERMS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("range error: {0}")]
    Range(String),
}

pub fn fib(n: u32) -> Result<u64, BenchError> {
    if n == 0 || n > 92 {
        return Err(BenchError::Range(format!("fib index {n} outside 1..=92")));
    }
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 2..n {
        (a, b) = (b, a + b);
    }
    Ok(b)
}

/// Euclid's standard continued fraction. Returns (length, loop iterations).
pub fn cf_encode_u64(mut num: u64, mut den: u64, seq: &mut [i64; MAX_TERMS]) -> (usize, u32) {
    let mut i = 0;
    while den > 1 {
        let a = num / den;
        seq[i] = a as i64;
        let r = num - a * den;
        num = den;
        den = r;
        i += 1;
    }
    seq[i] = num as i64;
    (i + den as usize, i as u32)
}

pub fn cf_decode_u64(seq: &[i64]) -> (u64, u64) {
    let mut i = seq.len() - 1;
    let (mut num, mut den) = (seq[i] as u64, 1u64);
    while i > 0 {
        i -= 1;
        let old = num;
        num = den + seq[i] as u64 * num;
        den = old;
    }
    (num, den)
}

/// Natural representation of `num/den`. Returns (length, loop iterations).
pub fn nat_encode_u64(mut num: u64, mut den: u64, seq: &mut [i64; MAX_TERMS]) -> (usize, u32) {
    let mut sign = 1i64;
    let mut i = 0;
    loop {
        let ip = num / den;
        let fp = num - ip * den;
        seq[i] = sign * (ip + u64::from(fp > 0)) as i64;
        i += 1;
        if 2 * fp >= den {
            den -= fp;
            num = fp - den;
        } else {
            if fp == 0 {
                return (i, i as u32);
            }
            let old = den;
            den = fp;
            num = old - 2 * fp;
            sign = -sign;
        }
    }
}

pub fn nat_decode_u64(seq: &[i64]) -> (u64, u64) {
    let mut i = seq.len() - 1;
    let mut prev_nonneg = seq[i] >= 0;
    let (mut num, mut den) = (seq[i].unsigned_abs(), 1u64);
    while i > 0 {
        i -= 1;
        let old = num;
        let new_den = old + 2 * den;
        num = seq[i].unsigned_abs() * new_den - den;
        if (seq[i] < 0) == prev_nonneg {
            num -= old;
            prev_nonneg = !prev_nonneg;
        }
        den = new_den;
    }
    (num, den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: u32,
    pub num: u64,
    pub den: u64,
    pub cf_enc_us: f64,
    pub cf_dec_us: f64,
    pub nat_enc_us: f64,
    pub nat_dec_us: f64,
    pub cf_len: usize,
    pub nat_len: usize,
    pub cf_iters: u32,
    pub nat_iters: u32,
}

pub const CSV_HEADER: &str =
    "n,num,den,cf_enc_us,cf_dec_us,nat_enc_us,nat_dec_us,cf_len,nat_len,cf_iters,nat_iters";

pub const DEFAULT_ITERATIONS: u64 = 10_000_000;
pub const DEFAULT_NS: [u32; 9] = [5, 10, 20, 30, 40, 50, 60, 70, 80];

const WARMUPS: usize = 3;
const REPEATS: usize = 3;

/// Minimum over repeats of the time for `iterations` calls, in microseconds.
fn time_us(iterations: u64, mut f: impl FnMut()) -> f64 {
    for _ in 0..WARMUPS {
        f();
    }
    (0..REPEATS)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..iterations {
                f();
            }
            t.elapsed().as_nanos() as f64 / 1000.0
        })
        .fold(f64::INFINITY, f64::min)
}

/// Times both codecs on `fib(n)/fib(n+1)` for each `n`, one after another.
pub fn run_suite(ns: &[u32], iterations: u64) -> Result<Vec<BenchRow>, BenchError> {
    if iterations == 0 {
        return Err(BenchError::Range("iterations must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n >= 92 {
            return Err(BenchError::Range(format!("fib({}) does not fit in 64 bits", n + 1)));
        }
        let (num, den) = (fib(n)?, fib(n + 1)?);
        let mut cf = [0i64; MAX_TERMS];
        let mut nat = [0i64; MAX_TERMS];
        let (cf_len, cf_iters) = cf_encode_u64(num, den, &mut cf);
        let (nat_len, nat_iters) = nat_encode_u64(num, den, &mut nat);

        let mut buf = [0i64; MAX_TERMS];
        let cf_enc_us = time_us(iterations, || {
            black_box(cf_encode_u64(black_box(num), black_box(den), &mut buf));
            black_box(&buf);
        });
        let nat_enc_us = time_us(iterations, || {
            black_box(nat_encode_u64(black_box(num), black_box(den), &mut buf));
            black_box(&buf);
        });
        let cf_dec_us = time_us(iterations, || {
            black_box(cf_decode_u64(black_box(&cf[..cf_len])));
        });
        let nat_dec_us = time_us(iterations, || {
            black_box(nat_decode_u64(black_box(&nat[..nat_len])));
        });
        rows.push(BenchRow {
            n,
            num,
            den,
            cf_enc_us,
            cf_dec_us,
            nat_enc_us,
            nat_dec_us,
            cf_len,
            nat_len,
            cf_iters,
            nat_iters,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildInfo {
    pub package: &'static str,
    pub version: &'static str,
    pub profile: &'static str,
    pub arch: &'static str,
    pub os: &'static str,
}

pub fn build_info() -> BuildInfo {
    BuildInfo {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        profile: if cfg!(debug_assertions) { "debug" } else { "release" },
        arch: std::env::consts::ARCH,
        os: std::env::consts::OS,
    }
}

impl std::fmt::Display for BuildInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} profile={} target={}-{}",
            self.package, self.version, self.profile, self.arch, self.os
        )
    }
}

/// CSV is the header plus one line per row; JSON wraps the rows with build info.
pub fn emit(rows: &[BenchRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{:.3},{:.3},{:.3},{:.3},{},{},{},{}\n",
                    r.n,
                    r.num,
                    r.den,
                    r.cf_enc_us,
                    r.cf_dec_us,
                    r.nat_enc_us,
                    r.nat_dec_us,
                    r.cf_len,
                    r.nat_len,
                    r.cf_iters,
                    r.nat_iters
                ));
            }
            out
        }
        Format::Json => {
            let doc = serde_json::json!({ "build": build_info(), "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}
