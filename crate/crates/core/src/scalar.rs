//! Exact scalars over odd prime fields `F_p` and the rationals.
//!
//! Every other module works with [`Scalar`] values tagged by a [`FieldSpec`].
//! Prime-field scalars are stored as canonical residues `0..p`; rational
//! scalars are reduced fractions over arbitrary-precision integers, so no
//! intermediate value can overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// The ground field. Characteristic 2 is never admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Prime(u32),
    Rational,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// The prime field `F_p`; `p` must be an odd prime below 2^31.
    pub fn prime(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::CharTwo);
        }
        if p >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p as u32))
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Prime(p) => *p,
            FieldSpec::Rational => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime(p) => Some(*p as u64),
            FieldSpec::Rational => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, value: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod {
                residue: value.rem_euclid(p as i64) as u32,
                modulus: p,
            },
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(value))),
        }
    }

    /// `num/den` interpreted in this field.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// The prime-field element with the given residue (reduced mod p).
    pub fn element(&self, residue: u32) -> Result<Scalar> {
        match *self {
            FieldSpec::Prime(p) => Ok(Scalar::Mod {
                residue: residue % p,
                modulus: p,
            }),
            FieldSpec::Rational => Err(Error::InfiniteField),
        }
    }

    /// All field elements in residue order `0..p`.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match *self {
            FieldSpec::Prime(p) => Ok((0..p)
                .map(|residue| Scalar::Mod {
                    residue,
                    modulus: p,
                })
                .collect()),
            FieldSpec::Rational => Err(Error::InfiniteField),
        }
    }

    /// Nonzero elements in residue order.
    pub fn units(&self) -> Result<Vec<Scalar>> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }

    /// Parses the scalar text syntax: optional sign, decimal integer, and an
    /// optional `/denominator` in rational mode. Errors report 1-based columns
    /// within `text` on line 1.
    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        parse_scalar_at(self, text, 1, 1)
    }
}

pub(crate) fn parse_scalar_at(
    field: &FieldSpec,
    text: &str,
    line: usize,
    column: usize,
) -> Result<Scalar> {
    let lead = text.len() - text.trim_start().len();
    let token = text.trim();
    let column = column + lead;
    if token.is_empty() {
        return Err(Error::parse(line, column, "expected a scalar"));
    }
    let (num_text, den_text) = match token.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (token, None),
    };
    let parse_int = |s: &str, col: usize| -> Result<BigInt> {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(line, col, format!("invalid integer `{s}`")));
        }
        s.trim_start_matches('+')
            .parse::<BigInt>()
            .map_err(|e| Error::parse(line, col, e.to_string()))
    };
    let num = parse_int(num_text, column)?;
    match field {
        FieldSpec::Prime(p) => {
            if den_text.is_some() {
                return Err(Error::parse(
                    line,
                    column,
                    "fractions are only accepted in rational mode",
                ));
            }
            let r = num.mod_floor(&BigInt::from(*p));
            Ok(Scalar::Mod {
                residue: r.to_u32().expect("residue below modulus"),
                modulus: *p,
            })
        }
        FieldSpec::Rational => {
            let den = match den_text {
                Some(d) => {
                    let col = column + num_text.len() + 1;
                    let den = parse_int(d, col)?;
                    if den.is_zero() {
                        return Err(Error::parse(line, col, "zero denominator"));
                    }
                    den
                }
                None => BigInt::one(),
            };
            Ok(Scalar::Rat(BigRational::new(num, den)))
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "q{p}"),
            FieldSpec::Rational => write!(f, "rational"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `q<p>` or `rational`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rational") || s == "Q" {
            return Ok(FieldSpec::Rational);
        }
        let digits = s
            .strip_prefix('q')
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::parse(1, 1, format!("unknown field `{s}`")))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::parse(1, 2, format!("invalid modulus `{digits}`")))?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An exact field element in canonical form, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { residue: u32, modulus: u32 },
    Rat(BigRational),
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn pow_mod(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1u32 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { modulus, .. } => FieldSpec::Prime(*modulus),
            Scalar::Rat(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { residue, .. } => *residue == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { residue, .. } => *residue == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    /// The canonical residue for prime-field scalars.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Mod { residue, .. } => Some(*residue),
            Scalar::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Mod { residue: a, modulus }, Scalar::Mod { residue: b, .. }) => Scalar::Mod {
                residue: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Mod { residue: a, modulus }, Scalar::Mod { residue: b, .. }) => Scalar::Mod {
                residue: mul_mod(*a, *b, *modulus),
                modulus: *modulus,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Mod { residue, modulus } => Scalar::Mod {
                residue: pow_mod(*residue, *modulus as u64 - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Mod { residue, modulus } => Scalar::Mod {
                residue: if *residue == 0 { 0 } else { modulus - residue },
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }

    pub fn pow(&self, exp: u64) -> Scalar {
        match self {
            Scalar::Mod { residue, modulus } => Scalar::Mod {
                residue: pow_mod(*residue, exp, *modulus),
                modulus: *modulus,
            },
            Scalar::Rat(r) => Scalar::Rat(num_traits::pow(r.clone(), exp as usize)),
        }
    }

    /// Halves the scalar; always defined because the characteristic is odd.
    pub fn half(&self) -> Scalar {
        let two = self.field().from_i64(2);
        self.checked_div(&two).expect("2 is invertible")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { residue, .. } => write!(f, "{residue}"),
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

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { modulus, .. } => write!(f, "{self}_q{modulus}"),
            Scalar::Rat(_) => write!(f, "{self}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Residue order within a prime field, numeric order for rationals; scalars
/// of different fields order by field first.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (
                Scalar::Mod {
                    residue: a,
                    modulus: p,
                },
                Scalar::Mod {
                    residue: b,
                    modulus: q,
                },
            ) => p.cmp(q).then(a.cmp(b)),
            (Scalar::Rat(a), Scalar::Rat(b)) => a.cmp(b),
            _ => self.field().cmp(&other.field()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

// Operators panic on field mismatch or division by zero; use the `checked_*`
// methods where those are recoverable conditions.
macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            #[inline]
            fn $method(self, rhs: &Scalar) -> Scalar {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("scalar {}: {e}", stringify!($method)),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            #[inline]
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            #[inline]
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            #[inline]
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);
scalar_binop!(Div, div, checked_div);

/// Exact rational value of a rational-mode scalar as `(numerator, denominator)`
/// when both fit in `i64`.
pub fn rational_parts(s: &Scalar) -> Option<(i64, i64)> {
    let r = s.as_rational()?;
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}
