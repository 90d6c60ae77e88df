//! Exact coefficients over Z, Z/p and Q.
//!
//! Scalars keep a machine-word fast path and promote to big integers only on
//! overflow, so mod-2 computations never allocate. Every value stored in a
//! matrix or linear combination is canonical for its ring: integers are
//! demoted to `Int` whenever they fit, field elements are reduced to
//! `0..p`, and rationals are in lowest terms with positive denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum RingKind {
    Integers,
    PrimeField(u64),
    Rationals,
}

/// Ring descriptor; all scalar arithmetic goes through its methods.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Ring {
    pub kind: RingKind,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Int(i64),
    Big(BigInt),
    Rat(BigRational),
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
    #[error("scalar {0} is not invertible in this ring")]
    NotInvertible(String),
    #[error("operation requires a field, ring is {0:?}")]
    NotAField(RingKind),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring {
    pub fn integers() -> Self {
        Ring { kind: RingKind::Integers }
    }

    pub fn rationals() -> Self {
        Ring { kind: RingKind::Rationals }
    }

    pub fn prime_field(p: u64) -> Result<Self, ScalarError> {
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Ring { kind: RingKind::PrimeField(p) })
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.kind, RingKind::Integers)
    }

    pub fn zero(&self) -> Scalar {
        match self.kind {
            RingKind::Rationals => Scalar::Rat(BigRational::zero()),
            _ => Scalar::Int(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.kind {
            RingKind::Rationals => Scalar::Rat(BigRational::one()),
            _ => Scalar::Int(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.canon(Scalar::Int(n))
    }

    /// Canonical form: demote `Big` to `Int` when it fits, reduce mod p,
    /// coerce to `Rat` over the rationals.
    pub fn canon(&self, s: Scalar) -> Scalar {
        match self.kind {
            RingKind::Integers => match s {
                Scalar::Int(n) => Scalar::Int(n),
                Scalar::Big(b) => demote(b),
                Scalar::Rat(r) => {
                    debug_assert!(r.is_integer());
                    demote(r.to_integer())
                }
            },
            RingKind::PrimeField(p) => {
                let n = match s {
                    Scalar::Int(n) => n.rem_euclid(p as i64),
                    Scalar::Big(b) => {
                        let m = b.mod_floor(&BigInt::from(p));
                        m.to_i64().expect("residue fits i64")
                    }
                    Scalar::Rat(_) => panic!("rational scalar in prime field"),
                };
                Scalar::Int(n)
            }
            RingKind::Rationals => match s {
                Scalar::Int(n) => Scalar::Rat(BigRational::from(BigInt::from(n))),
                Scalar::Big(b) => Scalar::Rat(BigRational::from(b)),
                Scalar::Rat(r) => Scalar::Rat(r),
            },
        }
    }

    pub fn is_zero(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Int(n) => *n == 0,
            Scalar::Big(b) => b.is_zero(),
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Int(n) => *n == 1,
            Scalar::Big(b) => b.is_one(),
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self.kind {
            RingKind::Rationals => Scalar::Rat(to_rat(a) + to_rat(b)),
            _ => self.canon(match (a, b) {
                (Scalar::Int(x), Scalar::Int(y)) => match x.checked_add(*y) {
                    Some(z) => Scalar::Int(z),
                    None => Scalar::Big(BigInt::from(*x) + BigInt::from(*y)),
                },
                _ => Scalar::Big(to_big(a) + to_big(b)),
            }),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self.kind {
            RingKind::Rationals => Scalar::Rat(-to_rat(a)),
            _ => match a {
                Scalar::Int(x) => self.canon(match x.checked_neg() {
                    Some(z) => Scalar::Int(z),
                    None => Scalar::Big(-BigInt::from(*x)),
                }),
                Scalar::Big(b) => self.canon(Scalar::Big(-b.clone())),
                Scalar::Rat(_) => panic!("rational scalar in integral ring"),
            },
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self.kind {
            RingKind::Rationals => Scalar::Rat(to_rat(a) * to_rat(b)),
            _ => self.canon(match (a, b) {
                (Scalar::Int(x), Scalar::Int(y)) => match x.checked_mul(*y) {
                    Some(z) => Scalar::Int(z),
                    None => Scalar::Big(BigInt::from(*x) * BigInt::from(*y)),
                },
                _ => Scalar::Big(to_big(a) * to_big(b)),
            }),
        }
    }

    /// Multiplicative inverse; only defined over fields.
    pub fn inv(&self, a: &Scalar) -> Result<Scalar, ScalarError> {
        match self.kind {
            RingKind::Integers => {
                if self.is_one(a) {
                    Ok(Scalar::Int(1))
                } else if matches!(a, Scalar::Int(-1)) {
                    Ok(Scalar::Int(-1))
                } else {
                    Err(ScalarError::NotInvertible(self.fmt_scalar(a)))
                }
            }
            RingKind::PrimeField(p) => {
                let n = match a {
                    Scalar::Int(n) => *n,
                    _ => unreachable!("non-canonical field scalar"),
                };
                if n == 0 {
                    return Err(ScalarError::NotInvertible("0".into()));
                }
                // extended Euclid on (n, p)
                let (mut r0, mut r1) = (n as i128, p as i128);
                let (mut s0, mut s1) = (1i128, 0i128);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (s0, s1) = (s1, s0 - q * s1);
                }
                debug_assert_eq!(r0, 1);
                Ok(self.canon(Scalar::Int(s0.rem_euclid(p as i128) as i64)))
            }
            RingKind::Rationals => {
                let r = to_rat(a);
                if r.is_zero() {
                    return Err(ScalarError::NotInvertible("0".into()));
                }
                Ok(Scalar::Rat(r.recip()))
            }
        }
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        self.inv(a).is_ok()
    }

    /// Exact division; `None` when `b` does not divide `a` in this ring.
    pub fn div_exact(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if self.is_zero(b) {
            return None;
        }
        match self.kind {
            RingKind::Integers => {
                let (x, y) = (to_big(a), to_big(b));
                let (q, r) = x.div_rem(&y);
                if r.is_zero() {
                    Some(self.canon(Scalar::Big(q)))
                } else {
                    None
                }
            }
            _ => Some(self.mul(a, &self.inv(b).ok()?)),
        }
    }

    /// Integer absolute-value comparison used by pivot selection over Z.
    pub fn abs_cmp(&self, a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
        to_big(a).abs().cmp(&to_big(b).abs())
    }

    pub fn fmt_scalar(&self, s: &Scalar) -> String {
        match s {
            Scalar::Int(n) => n.to_string(),
            Scalar::Big(b) => b.to_string(),
            Scalar::Rat(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
        }
    }

    pub fn parse_scalar(&self, text: &str) -> Result<Scalar, ScalarError> {
        let bad = || ScalarError::Parse(text.to_string());
        if let Some((n, d)) = text.split_once('/') {
            if !matches!(self.kind, RingKind::Rationals) {
                return Err(bad());
            }
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::Rat(BigRational::new(n, d)))
        } else {
            let n: BigInt = text.trim().parse().map_err(|_| bad())?;
            Ok(self.canon(Scalar::Big(n)))
        }
    }
}

fn demote(b: BigInt) -> Scalar {
    match b.to_i64() {
        Some(n) => Scalar::Int(n),
        None => Scalar::Big(b),
    }
}

pub(crate) fn to_big(s: &Scalar) -> BigInt {
    match s {
        Scalar::Int(n) => BigInt::from(*n),
        Scalar::Big(b) => b.clone(),
        Scalar::Rat(r) => {
            debug_assert!(r.is_integer());
            r.to_integer()
        }
    }
}

fn to_rat(s: &Scalar) -> BigRational {
    match s {
        Scalar::Int(n) => BigRational::from(BigInt::from(*n)),
        Scalar::Big(b) => BigRational::from(b.clone()),
        Scalar::Rat(r) => r.clone(),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(n) => write!(f, "{n}"),
            Scalar::Big(b) => write!(f, "{b}"),
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod_two_collapses_signs() {
        let r = Ring::prime_field(2).unwrap();
        let m1 = r.from_i64(-1);
        assert_eq!(m1, r.one());
        assert_eq!(r.add(&r.one(), &r.one()), r.zero());
    }

    #[test]
    fn prime_check() {
        assert!(Ring::prime_field(4).is_err());
        assert!(Ring::prime_field(1).is_err());
        assert!(Ring::prime_field(13).is_ok());
    }

    #[test]
    fn field_inverses() {
        let r = Ring::prime_field(7).unwrap();
        for n in 1..7 {
            let a = r.from_i64(n);
            let inv = r.inv(&a).unwrap();
            assert_eq!(r.mul(&a, &inv), r.one());
        }
    }

    #[test]
    fn overflow_promotes() {
        let r = Ring::integers();
        let big = r.mul(&Scalar::Int(i64::MAX), &Scalar::Int(3));
        assert!(matches!(big, Scalar::Big(_)));
        let back = r.div_exact(&big, &Scalar::Int(3)).unwrap();
        assert_eq!(back, Scalar::Int(i64::MAX));
    }

    proptest! {
        #[test]
        fn scalar_roundtrip_z(n in any::<i64>()) {
            let r = Ring::integers();
            let s = r.from_i64(n);
            prop_assert_eq!(r.parse_scalar(&r.fmt_scalar(&s)).unwrap(), s);
        }

        #[test]
        fn scalar_roundtrip_q(n in -1000i64..1000, d in 1i64..1000) {
            let r = Ring::rationals();
            let s = r.mul(&r.from_i64(n), &r.inv(&r.from_i64(d)).unwrap());
            prop_assert_eq!(r.parse_scalar(&r.fmt_scalar(&s)).unwrap(), s);
        }

        #[test]
        fn ring_axioms_mod_p(a in 0i64..97, b in 0i64..97, c in 0i64..97) {
            let r = Ring::prime_field(97).unwrap();
            let (a, b, c) = (r.from_i64(a), r.from_i64(b), r.from_i64(c));
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)),
                            r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        }
    }
}
