//! Arithmetic in `A(T)`, the graded nil algebra with `X_i^2 = Σ_{j<i} t_ij X_j X_i`.
//!
//! Elements live on the square-free monomial basis. Products are computed by
//! folding generators into monomials one at a time and rewriting squares.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar_at, FieldSpec, Scalar};
use crate::sltm::Sltm;

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 32;

/// Square-free monomial as a bitset; bit `i-1` stands for `X_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_bits(bits: u32) -> Self {
        Monomial(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn generator(i: usize) -> Self {
        assert!((1..=MAX_GENERATORS).contains(&i));
        Monomial(1 << (i - 1))
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        indices
            .into_iter()
            .fold(Monomial::ONE, |m, i| m.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Monomial(self.0 | Monomial::generator(i).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// `deg X_i = 2`.
    pub fn degree(self) -> usize {
        2 * self.len()
    }

    /// Generator indices in ascending order.
    pub fn indices(self) -> impl DoubleEndedIterator<Item = usize> {
        (1..=MAX_GENERATORS).filter(move |&i| self.contains(i))
    }

    pub fn max_index(self) -> usize {
        MAX_GENERATORS - self.0.leading_zeros() as usize
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for i in self.indices() {
            write!(f, "X{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// How a product folds the generators of the right factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MulOptions {
    pub memoize: bool,
    pub descending: bool,
}

impl MulOptions {
    pub const DEFAULT: MulOptions = MulOptions {
        memoize: true,
        descending: false,
    };
}

#[derive(Debug, PartialEq, Eq)]
pub struct Algebra {
    t: Sltm,
}

type Terms = BTreeMap<Monomial, Scalar>;
type Memo = HashMap<(Monomial, usize), Terms>;

impl Algebra {
    pub fn new(t: Sltm) -> Result<Arc<Algebra>> {
        if t.n() > MAX_GENERATORS {
            return Err(Error::BadSize {
                expected: MAX_GENERATORS,
                got: t.n(),
            });
        }
        Ok(Arc::new(Algebra { t }))
    }

    pub fn matrix(&self) -> &Sltm {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn field(&self) -> FieldSpec {
        self.t.field()
    }

    /// `2^n`.
    pub fn dimension(&self) -> u64 {
        1u64 << self.n()
    }

    /// All `2^n` basis monomials in bitset order.
    pub fn basis(&self) -> impl Iterator<Item = Monomial> {
        (0..self.dimension()).map(|b| Monomial(b as u32))
    }

    /// Normal form of `X_i · M`.
    pub fn mul_monomial_generator(&self, m: Monomial, i: usize) -> Result<Terms> {
        self.check_index(i)?;
        Ok(self.rewrite(m, i, &mut None))
    }

    /// Same as [`Algebra::mul_monomial_generator`] but without a memo table.
    pub fn mul_monomial_generator_direct(&self, m: Monomial, i: usize) -> Result<Terms> {
        self.check_index(i)?;
        Ok(self.rewrite_direct(m, i))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < 1 || i > self.n() {
            return Err(Error::BadIndex(format!("generator {i} not in 1..={}", self.n())));
        }
        Ok(())
    }

    fn rewrite_direct(&self, m: Monomial, i: usize) -> Terms {
        if !m.contains(i) {
            return Terms::from([(m.with(i), self.field().one())]);
        }
        let mut out = Terms::new();
        for j in 1..i {
            let t = self.t.entry(i, j);
            if t.is_zero() {
                continue;
            }
            for (mono, c) in self.rewrite_direct(m, j) {
                accumulate(&mut out, mono, t * &c);
            }
        }
        out
    }

    fn rewrite(&self, m: Monomial, i: usize, memo: &mut Option<Memo>) -> Terms {
        if !m.contains(i) {
            return Terms::from([(m.with(i), self.field().one())]);
        }
        if let Some(hit) = memo.as_ref().and_then(|t| t.get(&(m, i))) {
            return hit.clone();
        }
        let mut out = Terms::new();
        for j in 1..i {
            let t = self.t.entry(i, j);
            if t.is_zero() {
                continue;
            }
            for (mono, c) in self.rewrite(m, j, memo) {
                accumulate(&mut out, mono, t * &c);
            }
        }
        if let Some(table) = memo.as_mut() {
            table.insert((m, i), out.clone());
        }
        out
    }

    /// Normal form of `M1 · M2`, folding the generators of `M2` into `M1`.
    fn mul_monomials(&self, a: Monomial, b: Monomial, opts: MulOptions, memo: &mut Option<Memo>) -> Terms {
        let mut acc = Terms::from([(a, self.field().one())]);
        let gens: Vec<usize> = if opts.descending {
            b.indices().rev().collect()
        } else {
            b.indices().collect()
        };
        for g in gens {
            let mut next = Terms::new();
            for (mono, c) in &acc {
                let part = if opts.memoize {
                    self.rewrite(*mono, g, memo)
                } else {
                    self.rewrite_direct(*mono, g)
                };
                for (m2, c2) in part {
                    accumulate(&mut next, m2, c * &c2);
                }
            }
            acc = next;
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

fn accumulate(terms: &mut Terms, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(v) => {
            *v = &*v + &c;
            if v.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

/// An element of `A(T)` in normal form: no zero coefficients are stored.
#[derive(Clone)]
pub struct Element {
    algebra: Arc<Algebra>,
    terms: Terms,
}

impl Element {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        Element {
            algebra: algebra.clone(),
            terms: Terms::new(),
        }
    }

    pub fn one(algebra: &Arc<Algebra>) -> Self {
        Element::monomial(algebra, Monomial::ONE, algebra.field().one())
    }

    pub fn monomial(algebra: &Arc<Algebra>, m: Monomial, c: Scalar) -> Self {
        let mut terms = Terms::new();
        assert!(m.max_index() <= algebra.n(), "monomial outside the algebra");
        accumulate(&mut terms, m, c);
        Element {
            algebra: algebra.clone(),
            terms,
        }
    }

    pub fn generator(algebra: &Arc<Algebra>, i: usize) -> Result<Self> {
        algebra.check_index(i)?;
        Ok(Element::monomial(algebra, Monomial::generator(i), algebra.field().one()))
    }

    /// `Σ_i coeffs[i-1] · X_i`.
    pub fn linear(algebra: &Arc<Algebra>, coeffs: &[Scalar]) -> Result<Self> {
        if coeffs.len() != algebra.n() {
            return Err(Error::BadSize {
                expected: algebra.n(),
                got: coeffs.len(),
            });
        }
        let mut terms = Terms::new();
        for (i, c) in coeffs.iter().enumerate() {
            if c.field() != algebra.field() {
                return Err(Error::FieldMismatch);
            }
            accumulate(&mut terms, Monomial::generator(i + 1), c.clone());
        }
        Ok(Element {
            algebra: algebra.clone(),
            terms,
        })
    }

    pub fn from_terms(
        algebra: &Arc<Algebra>,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self> {
        let mut out = Terms::new();
        for (m, c) in terms {
            if m.max_index() > algebra.n() {
                return Err(Error::BadIndex(format!("monomial {m} outside the algebra")));
            }
            if c.field() != algebra.field() {
                return Err(Error::FieldMismatch);
            }
            accumulate(&mut out, m, c);
        }
        Ok(Element {
            algebra: algebra.clone(),
            terms: out,
        })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, m: Monomial) -> Scalar {
        self.terms
            .get(&m)
            .cloned()
            .unwrap_or_else(|| self.algebra.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_algebra(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.same_algebra(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, *m, c.clone());
        }
        Ok(Element {
            algebra: self.algebra.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            accumulate(&mut terms, *m, v * c);
        }
        Element {
            algebra: self.algebra.clone(),
            terms,
        }
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.mul_with(other, MulOptions::DEFAULT)
    }

    /// Bilinear product; `opts` selects memoization and fold order.
    pub fn mul_with(&self, other: &Element, opts: MulOptions) -> Result<Element> {
        self.same_algebra(other)?;
        let alg = &self.algebra;
        let mut memo = opts.memoize.then(Memo::new);
        let mut terms = Terms::new();
        for (mb, cb) in &other.terms {
            for (ma, ca) in &self.terms {
                let coef = ca * cb;
                for (m, c) in alg.mul_monomials(*ma, *mb, opts, &mut memo) {
                    accumulate(&mut terms, m, &coef * &c);
                }
            }
        }
        Ok(Element {
            algebra: alg.clone(),
            terms,
        })
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut acc = Element::one(&self.algebra);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Sum of the terms of degree `d`.
    pub fn degree_component(&self, d: usize) -> Result<Element> {
        if !d.is_multiple_of(2) {
            return Err(Error::BadDegree(d));
        }
        Ok(Element {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        })
    }

    /// Parses `"1*X1X2 + 2/3*X3 - X2"`; a bare coefficient is a constant.
    pub fn parse(algebra: &Arc<Algebra>, text: &str) -> Result<Element> {
        let field = algebra.field();
        let mut terms = Vec::new();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::parse(1, 1, "expected an element"));
        }
        // Split at top-level signs, keeping each sign with its term.
        let mut pieces: Vec<(usize, bool, &str)> = Vec::new();
        let mut start = 0;
        let mut negative = false;
        let bytes = text.as_bytes();
        for (pos, &b) in bytes.iter().enumerate() {
            if b == b'+' || b == b'-' {
                let before = text[start..pos].trim();
                if before.is_empty() {
                    // leading sign (or repeated sign) of the next term
                    if b == b'-' {
                        negative = !negative;
                    }
                } else {
                    pieces.push((start, negative, &text[start..pos]));
                    negative = b == b'-';
                }
                start = pos + 1;
            }
        }
        pieces.push((start, negative, &text[start..]));
        for (offset, neg, raw) in pieces {
            let lead = raw.len() - raw.trim_start().len();
            let col = offset + lead + 1;
            let piece = raw.trim();
            if piece.is_empty() {
                return Err(Error::parse(1, col, "empty term"));
            }
            let (coef_text, mono_text, mono_col) = match piece.split_once('*') {
                Some((c, m)) => (Some(c.trim()), m.trim(), col + c.len() + 1),
                None if piece.starts_with(['X', 'x']) => (None, piece, col),
                None => (Some(piece), "1", col),
            };
            let mut coef = match coef_text {
                Some(c) => parse_scalar_at(&field, c, 1, col)?,
                None => field.one(),
            };
            if neg {
                coef = -coef;
            }
            let mono = parse_monomial(mono_text, mono_col)?;
            if mono.max_index() > algebra.n() {
                return Err(Error::parse(1, mono_col, format!("`{mono_text}` uses a generator beyond X{}", algebra.n())));
            }
            terms.push((mono, coef));
        }
        Element::from_terms(algebra, terms)
    }
}

fn parse_monomial(text: &str, col: usize) -> Result<Monomial> {
    if text == "1" {
        return Ok(Monomial::ONE);
    }
    let mut mono = Monomial::ONE;
    let mut rest = text;
    let mut c = col;
    while !rest.is_empty() {
        let Some(after) = rest.strip_prefix(['X', 'x']) else {
            return Err(Error::parse(1, c, format!("expected `X<i>` in `{text}`")));
        };
        let digits = after.bytes().take_while(u8::is_ascii_digit).count();
        let idx: usize = after[..digits]
            .parse()
            .map_err(|_| Error::parse(1, c, format!("missing generator index in `{text}`")))?;
        if idx == 0 || idx > MAX_GENERATORS {
            return Err(Error::parse(1, c, format!("generator index {idx} out of range")));
        }
        if mono.contains(idx) {
            // X_i X_i is not a basis monomial; callers should write the square as a product
            return Err(Error::parse(1, c, format!("repeated generator X{idx}")));
        }
        mono = mono.with(idx);
        c += 1 + digits;
        rest = &after[digits..];
    }
    Ok(mono)
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other).is_ok() && self.terms == other.terms
    }
}

impl Eq for Element {}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, text),
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_empty() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{body}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            algebra: self.algebra.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

macro_rules! element_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                self.$checked(rhs).expect("elements of different algebras")
            }
        }
        impl $trait<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
        impl $trait<Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                self.$method(&rhs)
            }
        }
    };
}

element_binop!(Add, add, checked_add);
element_binop!(Sub, sub, checked_sub);
element_binop!(Mul, mul, checked_mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(field: FieldSpec, rows: &[&[i64]]) -> Arc<Algebra> {
        Algebra::new(Sltm::from_int_rows(field, rows).unwrap()).unwrap()
    }

    #[test]
    fn generators_and_indices() {
        let a = alg(FieldSpec::Rational, &[&[1], &[2, 3]]);
        let x1 = Element::generator(&a, 1).unwrap();
        assert_eq!(x1.to_string(), "1*X1");
        assert_eq!(x1.terms().keys().next().unwrap().degree(), 2);
        assert!(matches!(Element::generator(&a, 4), Err(Error::BadIndex(_))));
        assert!(matches!(Element::generator(&a, 0), Err(Error::BadIndex(_))));
        assert!(a.mul_monomial_generator(Monomial::ONE, 4).is_err());
    }

    #[test]
    fn square_of_second_generator() {
        let q = FieldSpec::Rational;
        let a = alg(q, &[&[7]]);
        let m = a.mul_monomial_generator(Monomial::generator(2), 2).unwrap();
        assert_eq!(m, Terms::from([(Monomial::from_indices([1, 2]), q.from_i64(7))]));
        assert!(a.mul_monomial_generator(Monomial::generator(1), 1).unwrap().is_empty());
    }

    #[test]
    fn cubic_rewrite_n3() {
        let q = FieldSpec::Rational;
        let (t21, t31, t32) = (2, 3, 5);
        let a = alg(q, &[&[t21], &[t31, t32]]);
        let m = a
            .mul_monomial_generator(Monomial::from_indices([2, 3]), 3)
            .unwrap();
        assert_eq!(
            m,
            Terms::from([(Monomial::from_indices([1, 2, 3]), q.from_i64(t31 + t32 * t21))])
        );
        assert_eq!(m, a.mul_monomial_generator_direct(Monomial::from_indices([2, 3]), 3).unwrap());
    }

    #[test]
    fn unit_and_disjoint_products() {
        let f = FieldSpec::prime(5).unwrap();
        let a = alg(f, &[&[1], &[2, 3]]);
        let e = Element::parse(&a, "2*X1 + 3*X2X3 + 4").unwrap();
        assert_eq!(&e * &Element::one(&a), e);
        let x1 = Element::generator(&a, 1).unwrap();
        let x2 = Element::generator(&a, 2).unwrap();
        assert_eq!((&x1 * &x2).to_string(), "1*X1X2");
        let x3 = Element::generator(&a, 3).unwrap();
        for g in [&x1, &x2, &x3] {
            assert!((&x1 * &x2 * &x3 * g).is_zero());
        }
    }

    #[test]
    fn dimension_and_basis() {
        let q = FieldSpec::Rational;
        assert_eq!(Algebra::new(Sltm::zero(3, q)).unwrap().dimension(), 8);
        assert_eq!(Algebra::new(Sltm::zero(1, q)).unwrap().dimension(), 2);
        let a = Algebra::new(Sltm::zero(12, q)).unwrap();
        assert_eq!(a.dimension(), 4096);
        let basis: Vec<Monomial> = a.basis().collect();
        assert_eq!(basis.len(), 4096);
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degree_components() {
        let q = FieldSpec::Rational;
        let a = alg(q, &[&[1]]);
        let e = Element::parse(&a, "X1 + X1X2").unwrap();
        assert_eq!(e.degree_component(4).unwrap().to_string(), "1*X1X2");
        let c = Element::parse(&a, "5 + X2").unwrap();
        assert_eq!(c.degree_component(0).unwrap().to_string(), "5");
        assert!(matches!(e.degree_component(3), Err(Error::BadDegree(3))));
        let mut total = Element::zero(&a);
        for d in (0..=4).step_by(2) {
            total = total + c.degree_component(d).unwrap() + e.degree_component(d).unwrap();
        }
        assert_eq!(total, &c + &e);
    }

    #[test]
    fn element_text_round_trip() {
        let q = FieldSpec::Rational;
        let a = alg(q, &[&[1], &[0, 1]]);
        let e = Element::parse(&a, "1*X1X2 + 2/3*X3").unwrap();
        assert_eq!(e.to_string(), "1*X1X2 + 2/3*X3");
        let f = Element::parse(&a, "-X1 - 1/2*X2 + 3").unwrap();
        assert_eq!(Element::parse(&a, &f.to_string()).unwrap(), f);
        assert_eq!(Element::parse(&a, &e.to_string()).unwrap(), e);
        assert!(Element::parse(&a, "X4").is_err());
        assert!(Element::parse(&a, "X1X1").is_err());
        assert!(Element::parse(&a, "2*Y1").is_err());
        assert_eq!(Element::zero(&a).to_string(), "0");
    }

    #[test]
    fn mismatched_algebras() {
        let q = FieldSpec::Rational;
        let a = alg(q, &[&[1]]);
        let b = alg(q, &[&[2]]);
        let x = Element::generator(&a, 1).unwrap();
        let y = Element::generator(&b, 1).unwrap();
        assert_eq!(x.checked_mul(&y), Err(Error::AlgebraMismatch));
        assert_eq!(x.checked_add(&y), Err(Error::AlgebraMismatch));
        // equal matrices give interchangeable algebras
        let c = alg(q, &[&[1]]);
        assert!(x.checked_mul(&Element::generator(&c, 2).unwrap()).is_ok());
    }
}
