//! Exact scalars over a prime field `F_l` or over the rationals.
//!
//! A [`Field`] is a small copyable handle that performs arithmetic on
//! [`Scalar`] values. Scalars are always kept in canonical form: residues in
//! `0..l`, fractions in lowest terms with a positive denominator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic context: a prime field or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Prime(u64),
    Rational,
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Mod(u64),
    Rat(BigRational),
}

impl Field {
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Prime(_) => Scalar::Mod(0),
            Field::Rational => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Mod(v.rem_euclid(*p as i64) as u64),
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Mod(v % p),
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// Builds `num/den`; `den` must be invertible in the field.
    pub fn fraction(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        match self {
            Field::Prime(p) => {
                let pb = BigInt::from(*p);
                let n = reduce_bigint(num, &pb);
                let d = reduce_bigint(den, &pb);
                if d == 0 {
                    return Err(Error::Parse(format!(
                        "denominator {den} is not invertible mod {p}"
                    )));
                }
                Ok(self.mul(&Scalar::Mod(n), &self.inv(&Scalar::Mod(d)).expect("nonzero")))
            }
            Field::Rational => Ok(Scalar::Rat(BigRational::new(num.clone(), den.clone()))),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Mod(v) => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Mod(v) => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 + *y as u128) % *p as u128) as u64)
            }
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => mismatch(self, a, b),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 + *p as u128 - *y as u128) % *p as u128) as u64)
            }
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            _ => mismatch(self, a, b),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Prime(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            (Field::Rational, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => mismatch(self, a, a),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (Field::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => mismatch(self, a, b),
        }
    }

    /// `a + b*c`, the elimination workhorse.
    pub fn mul_add(&self, a: &Scalar, b: &Scalar, c: &Scalar) -> Scalar {
        match (self, a, b, c) {
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y), Scalar::Mod(z)) => {
                Scalar::Mod(((*x as u128 + *y as u128 * *z as u128) % *p as u128) as u64)
            }
            _ => self.add(a, &self.mul(b, c)),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (Field::Prime(p), Scalar::Mod(x)) => Some(Scalar::Mod(mod_pow(*x, p - 2, *p))),
            (Field::Rational, Scalar::Rat(x)) => Some(Scalar::Rat(x.recip())),
            _ => mismatch(self, a, a),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    /// `a^e` for a signed exponent; `None` when `a = 0` and `e < 0`.
    pub fn pow(&self, a: &Scalar, e: i64) -> Option<Scalar> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            exp >>= 1;
        }
        Some(acc)
    }

    /// `(-1)^e`.
    pub fn sign(&self, e: i64) -> Scalar {
        if e.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }

    /// Parses an integer literal or an `"a/b"` fraction.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad scalar {text:?}")))?;
        let den = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad scalar {text:?}")))?;
        self.fraction(&num, &den)
    }

    /// Canonical textual form: residue for `F_l`, `"a"` or `"a/b"` for `Q`.
    pub fn format(&self, a: &Scalar) -> String {
        a.to_string()
    }

    /// All elements of a prime field, in increasing residue order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Field::Prime(p) => Some((0..*p).map(Scalar::Mod).collect()),
            Field::Rational => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod(v) => write!(f, "{v}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Rational => write!(f, "Q"),
        }
    }
}

#[cold]
fn mismatch(field: &Field, a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar representation does not match {field}: {a:?}, {b:?}")
}

fn reduce_bigint(v: &BigInt, p: &BigInt) -> u64 {
    let mut r = v % p;
    if r.is_negative() {
        r += p;
    }
    r.try_into().expect("residue fits in u64")
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Least `h >= 1` with `q^h = 1 (mod l)`.
pub fn multiplicative_order(q: u64, l: u64) -> Option<u64> {
    if l < 2 || q.is_multiple_of(l) {
        return None;
    }
    let q = q % l;
    let mut acc = q;
    let mut h = 1;
    while acc != 1 {
        acc = ((acc as u128 * q as u128) % l as u128) as u64;
        h += 1;
        if h > l {
            return None;
        }
    }
    Some(h)
}

/// The coefficient field together with the Frobenius eigenbase `q` and the
/// derived order `h` of `q` in `F_l^x`.
///
/// `characteristic == 0` selects exact rationals; `h` is then fixed to 1 and
/// not used by any computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    pub characteristic: u64,
    pub q: u64,
    pub h: u64,
}

impl FieldConfig {
    pub fn new(characteristic: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidField("q must be positive".into()));
        }
        if characteristic == 0 {
            return Ok(Self { characteristic, q, h: 1 });
        }
        if !is_prime(characteristic) {
            return Err(Error::InvalidField(format!("{characteristic} is not prime")));
        }
        let h = multiplicative_order(q, characteristic).ok_or_else(|| {
            Error::InvalidField(format!("l = {characteristic} divides q = {q}"))
        })?;
        Ok(Self { characteristic, q, h })
    }

    pub fn rational(q: u64) -> Result<Self> {
        Self::new(0, q)
    }

    /// Re-derives `h` and rejects inconsistent stored values.
    pub fn validated(self) -> Result<Self> {
        let fresh = Self::new(self.characteristic, self.q)?;
        if fresh.h != self.h {
            return Err(Error::InvalidField(format!(
                "stored h = {} but the order of {} mod {} is {}",
                self.h, self.q, self.characteristic, fresh.h
            )));
        }
        Ok(fresh)
    }

    pub fn field(&self) -> Field {
        if self.characteristic == 0 {
            Field::Rational
        } else {
            Field::Prime(self.characteristic)
        }
    }

    /// `q^k` as a field element (negative `k` allowed).
    pub fn q_power(&self, k: i64) -> Scalar {
        let f = self.field();
        f.pow(&f.from_u64(self.q), k).expect("q is invertible")
    }
}
