//! Degree-preserving homomorphisms `A(T) -> A(S)` given by a matrix `Γ`
//! with `γ(X_j) = Σ_i γ_ij Y_i`.
//!
//! Two independent checks are provided: the quadratic system on the entries
//! of `Γ` ([`key_eq_check`]) and literal evaluation of the defining relations
//! inside `A(S)` ([`direct_hom_check`]).

mod search;

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::sltm::Sltm;

pub use search::{
    iso_search, IsoOutcome, IsoSearchOptions, IsoSearchResult, SearchStats, DEFAULT_BUDGET,
};

/// First equation `(r, i, k)` of the quadratic system that fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KeyEqViolation {
    pub r: usize,
    pub i: usize,
    pub k: usize,
}

fn check_shapes(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<()> {
    if t.field() != s.field() || gamma.field() != t.field() {
        return Err(Error::FieldMismatch);
    }
    if gamma.rows() != s.n() || gamma.cols() != t.n() {
        return Err(Error::DimensionMismatch(format!(
            "Γ is {}x{}, expected {}x{} for target size {} and source size {}",
            gamma.rows(),
            gamma.cols(),
            s.n(),
            t.n(),
            s.n(),
            t.n()
        )));
    }
    Ok(())
}

/// `Σ_{j<r} t_rj γ_xj` for every row `x` of `Γ`.
fn column_weights(t: &Sltm, gamma: &Matrix, r: usize) -> Vec<Scalar> {
    let field = t.field();
    (1..=gamma.rows())
        .map(|x| {
            (1..r).fold(field.zero(), |acc, j| {
                let tr = t.entry(r, j);
                if tr.is_zero() {
                    acc
                } else {
                    acc + tr * gamma.get(x, j)
                }
            })
        })
        .collect()
}

/// Checks, for all `r` and `i < k`,
/// `2γ_ir γ_kr + γ_kr² s_ki = Σ_{j<r} t_rj (γ_kj γ_kr s_ki + γ_kj γ_ir + γ_ij γ_kr)`.
pub fn key_eq_violation(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<Option<KeyEqViolation>> {
    check_shapes(t, s, gamma)?;
    let two = t.field().from_i64(2);
    for r in 1..=t.n() {
        let w = column_weights(t, gamma, r);
        for k in 2..=s.n() {
            let gkr = gamma.get(k, r);
            let wk = &w[k - 1];
            for i in 1..k {
                let gir = gamma.get(i, r);
                let ski = s.entry(k, i);
                let lhs = &two * gir * gkr + gkr * gkr * ski;
                let rhs = wk * gkr * ski + wk * gir + &w[i - 1] * gkr;
                if lhs != rhs {
                    return Ok(Some(KeyEqViolation { r, i, k }));
                }
            }
        }
    }
    Ok(None)
}

pub fn key_eq_check(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<bool> {
    Ok(key_eq_violation(t, s, gamma)?.is_none())
}

/// Images `γ(X_1), …, γ(X_n)` as elements of `A(S)`.
pub fn generator_images(target: &Arc<Algebra>, gamma: &Matrix) -> Result<Vec<Element>> {
    (1..=gamma.cols())
        .map(|r| Element::linear(target, &gamma.column(r)))
        .collect()
}

/// Smallest `r` with `γ(X_r)² ≠ Σ_{j<r} t_rj γ(X_j) γ(X_r)` in `A(S)`.
pub fn direct_hom_violation(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<Option<usize>> {
    check_shapes(t, s, gamma)?;
    let target = Algebra::new(s.clone())?;
    let images = generator_images(&target, gamma)?;
    for r in 1..=t.n() {
        let img = &images[r - 1];
        let lhs = img * img;
        let mut rhs = Element::zero(&target);
        for j in 1..r {
            let tr = t.entry(r, j);
            if !tr.is_zero() {
                rhs = rhs + (&images[j - 1] * img).scale(tr);
            }
        }
        if lhs != rhs {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

pub fn direct_hom_check(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<bool> {
    Ok(direct_hom_violation(t, s, gamma)?.is_none())
}

/// Key-EQ plus invertibility of a square `Γ`.
pub fn is_isomorphism(t: &Sltm, s: &Sltm, gamma: &Matrix) -> Result<bool> {
    check_shapes(t, s, gamma)?;
    if t.n() != s.n() {
        return Err(Error::DimensionMismatch(format!(
            "isomorphism needs equal sizes, got {} and {}",
            t.n(),
            s.n()
        )));
    }
    Ok(gamma.is_invertible() && key_eq_check(t, s, gamma)?)
}

/// The unique `S` for which an invertible `Γ` is a homomorphism `A(T) -> A(S)`,
/// or `None` when no strictly lower `S` works.
///
/// Each `s_ki` enters every equation `(r, i, k)` linearly, so it is read off
/// from the first `r` with a nonzero coefficient and checked against the rest.
pub fn solve_target(t: &Sltm, gamma: &Matrix) -> Result<Option<Sltm>> {
    if !gamma.is_square() || gamma.rows() != t.n() {
        return Err(Error::DimensionMismatch("Γ must be n x n".into()));
    }
    if gamma.field() != t.field() {
        return Err(Error::FieldMismatch);
    }
    let n = t.n();
    let field = t.field();
    let two = field.from_i64(2);
    let weights: Vec<Vec<Scalar>> = (1..=n).map(|r| column_weights(t, gamma, r)).collect();
    let mut s = Sltm::zero(n, field);
    for k in 2..=n {
        for i in 1..k {
            // coefficient * s_ki = rhs, one equation per r
            let eqs: Vec<(Scalar, Scalar)> = (1..=n)
                .map(|r| {
                    let w = &weights[r - 1];
                    let gkr = gamma.get(k, r);
                    let gir = gamma.get(i, r);
                    let coef = gkr * gkr - &w[k - 1] * gkr;
                    let rhs = &w[k - 1] * gir + &w[i - 1] * gkr - &two * gir * gkr;
                    (coef, rhs)
                })
                .collect();
            let (coef, rhs) = eqs
                .iter()
                .find(|(c, _)| !c.is_zero())
                .ok_or(Error::Singular)?;
            let value = rhs / coef;
            if eqs.iter().any(|(c, r)| c * &value != *r) {
                return Ok(None);
            }
            s.set(k, i, value);
        }
    }
    Ok(Some(s))
}

/// Which checks a [`Morphism`] has passed. Always recomputed on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub hom: bool,
    pub iso: bool,
}

/// `Γ : A(source) -> A(target)`.
#[derive(Clone, Debug)]
pub struct Morphism {
    source: Sltm,
    target: Sltm,
    gamma: Matrix,
    verified: Verification,
}

impl Morphism {
    pub fn new(source: Sltm, target: Sltm, gamma: Matrix) -> Result<Self> {
        let hom = key_eq_check(&source, &target, &gamma)?;
        let iso = hom && source.n() == target.n() && gamma.is_invertible();
        Ok(Morphism {
            source,
            target,
            gamma,
            verified: Verification { hom, iso },
        })
    }

    pub fn identity(t: &Sltm) -> Self {
        Morphism::new(t.clone(), t.clone(), Matrix::identity(t.n(), t.field()))
            .expect("identity has matching shapes")
    }

    pub fn source(&self) -> &Sltm {
        &self.source
    }

    pub fn target(&self) -> &Sltm {
        &self.target
    }

    pub fn gamma(&self) -> &Matrix {
        &self.gamma
    }

    pub fn verification(&self) -> Verification {
        self.verified
    }

    pub fn is_hom(&self) -> bool {
        self.verified.hom
    }

    pub fn is_iso(&self) -> bool {
        self.verified.iso
    }

    /// Re-runs the evaluation oracle in `A(target)`.
    pub fn direct_check(&self) -> Result<bool> {
        direct_hom_check(&self.source, &self.target, &self.gamma)
    }

    /// Image of `a ∈ A(source)`: monomials go to products of generator images.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        if !self.verified.hom {
            return Err(Error::UnverifiedMorphism);
        }
        if *a.algebra().matrix() != self.source {
            return Err(Error::AlgebraMismatch);
        }
        let target = Algebra::new(self.target.clone())?;
        let images = generator_images(&target, &self.gamma)?;
        let mut out = Element::zero(&target);
        for (m, c) in a.terms() {
            let img = m
                .indices()
                .fold(Element::one(&target), |acc, i| acc * &images[i - 1]);
            out = out + img.scale(c);
        }
        Ok(out)
    }

    /// `Θ = Γ^{-1}`, as a morphism `A(target) -> A(source)`.
    pub fn invert(&self) -> Result<Morphism> {
        if !self.verified.hom {
            return Err(Error::UnverifiedMorphism);
        }
        if !self.verified.iso {
            return Err(Error::Singular);
        }
        let theta = self.gamma.inverse()?;
        Morphism::new(self.target.clone(), self.source.clone(), theta)
    }

    /// `self ∘ first`, with matrix `Γ_self · Γ_first`.
    pub fn compose(&self, first: &Morphism) -> Result<Morphism> {
        if first.target != self.source {
            return Err(Error::SourceTargetMismatch);
        }
        let gamma = self.gamma.mul(&first.gamma)?;
        Morphism::new(first.source.clone(), self.target.clone(), gamma)
    }
}

impl Serialize for Morphism {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Morphism", 4)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("gamma", &self.gamma)?;
        st.serialize_field("verified", &self.verified)?;
        st.end()
    }
}
