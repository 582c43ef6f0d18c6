//! Rationals built from hereditarily finite sets.
//!
//! * [`hfset`]: interned sets and the empty-set substitution monoid.
//! * [`words`]: expression words, lowering to sets, and the rewrite engine.
//! * [`ratcodec`]: the natural representation and the other sequence codecs.
//! * [`sbtree`]: the extended Stern-Brocot tree and its symmetries.
//! * [`approx`]: digit streams for quadratic irrationals.
//! * [`bench`]: 64-bit codec ports and the Fibonacci timing harness.

pub mod approx;
pub mod bench;
pub mod hfset;
pub mod ratcodec;
pub mod sbtree;
pub mod words;
