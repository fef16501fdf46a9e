//! Elementary triangular operations: `P` (reciprocal row/column scaling),
//! `F` (restricted index swap) and `Q` (restricted shear).
//!
//! Each admissible step comes with an elementary matrix `Γ` giving an
//! isomorphism `A(T) -> A(step(T))`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Restriction, Result};
use crate::matrix::Matrix;
use crate::scalar::{parse_scalar_at, FieldSpec, Scalar};
use crate::sltm::{scalar_from_json, Sltm};

/// Steps order as `P < F < Q`, then by indices, then by scalar; this is the
/// order used to pick among equally short search paths.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum EtoStep {
    P { r: usize, alpha: Scalar },
    F { r1: usize, r2: usize },
    Q { r0: usize, k0: usize, beta: Scalar },
}

impl EtoStep {
    pub fn p(r: usize, alpha: Scalar) -> Self {
        EtoStep::P { r, alpha }
    }

    pub fn f(r1: usize, r2: usize) -> Self {
        EtoStep::F { r1, r2 }
    }

    pub fn q(r0: usize, k0: usize, beta: Scalar) -> Self {
        EtoStep::Q { r0, k0, beta }
    }

    /// `P(r, α) -> P(r, 1/α)`, `F` is self-inverse, `Q(r0, k0, β) -> Q(r0, k0, -β)`.
    pub fn inverse(&self) -> Result<EtoStep> {
        Ok(match self {
            EtoStep::P { r, alpha } => EtoStep::P {
                r: *r,
                alpha: alpha.inv().map_err(|_| Error::ZeroScalar)?,
            },
            EtoStep::F { .. } => self.clone(),
            EtoStep::Q { r0, k0, beta } => EtoStep::Q {
                r0: *r0,
                k0: *k0,
                beta: -beta,
            },
        })
    }

    /// Parses `P r alpha`, `F r1 r2` or `Q r0 k0 beta`.
    pub fn parse(field: FieldSpec, text: &str) -> Result<EtoStep> {
        parse_step_at(field, text, 1, 1)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json_value(field: FieldSpec, v: &Value) -> Result<EtoStep> {
        let bad = |msg: &str| Error::parse(1, 1, format!("ETO step JSON: {msg}"));
        let idx = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(&format!("missing index `{key}`")))
        };
        let scalar = |key: &str| -> Result<Scalar> {
            scalar_from_json(&field, v.get(key).ok_or_else(|| bad(&format!("missing `{key}`")))?)
        };
        match v.get("op").and_then(Value::as_str) {
            Some("P") => Ok(EtoStep::p(idx("r")?, scalar("alpha")?)),
            Some("F") => Ok(EtoStep::f(idx("r1")?, idx("r2")?)),
            Some("Q") => Ok(EtoStep::q(idx("r0")?, idx("k0")?, scalar("beta")?)),
            _ => Err(bad("`op` must be P, F or Q")),
        }
    }
}

fn parse_step_at(field: FieldSpec, text: &str, line: usize, column: usize) -> Result<EtoStep> {
    let mut tokens = Vec::new();
    let mut c = column;
    for tok in text.split(|ch: char| ch.is_whitespace() || ch == ',') {
        if !tok.is_empty() {
            tokens.push((c, tok));
        }
        c += tok.len() + 1;
    }
    let Some(&(op_col, op)) = tokens.first() else {
        return Err(Error::parse(line, column, "empty ETO step"));
    };
    let index = |pos: usize| -> Result<usize> {
        let (col, tok) = tokens[pos];
        tok.parse()
            .map_err(|_| Error::parse(line, col, format!("invalid index `{tok}`")))
    };
    let arity = |want: usize| -> Result<()> {
        if tokens.len() != want + 1 {
            return Err(Error::parse(
                line,
                op_col,
                format!("`{op}` takes {want} arguments, got {}", tokens.len() - 1),
            ));
        }
        Ok(())
    };
    match op {
        "P" | "p" => {
            arity(2)?;
            let (col, tok) = tokens[2];
            Ok(EtoStep::p(index(1)?, parse_scalar_at(&field, tok, line, col)?))
        }
        "F" | "f" => {
            arity(2)?;
            Ok(EtoStep::f(index(1)?, index(2)?))
        }
        "Q" | "q" => {
            arity(3)?;
            let (col, tok) = tokens[3];
            Ok(EtoStep::q(index(1)?, index(2)?, parse_scalar_at(&field, tok, line, col)?))
        }
        other => Err(Error::parse(line, op_col, format!("unknown ETO `{other}`"))),
    }
}

/// Semicolon- or newline-separated steps; `#` starts a comment line.
pub fn parse_steps(field: FieldSpec, text: &str) -> Result<Vec<EtoStep>> {
    let mut steps = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut col = 1;
        for part in line.split(';') {
            if !part.trim().is_empty() {
                steps.push(parse_step_at(field, part, li + 1, col)?);
            }
            col += part.len() + 1;
        }
    }
    Ok(steps)
}

pub fn format_steps(steps: &[EtoStep]) -> String {
    steps
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl fmt::Display for EtoStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtoStep::P { r, alpha } => write!(f, "P {r} {alpha}"),
            EtoStep::F { r1, r2 } => write!(f, "F {r1} {r2}"),
            EtoStep::Q { r0, k0, beta } => write!(f, "Q {r0} {k0} {beta}"),
        }
    }
}

impl Serialize for EtoStep {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(Some(3))?;
        match self {
            EtoStep::P { r, alpha } => {
                m.serialize_entry("op", "P")?;
                m.serialize_entry("r", r)?;
                m.serialize_entry("alpha", alpha)?;
            }
            EtoStep::F { r1, r2 } => {
                m.serialize_entry("op", "F")?;
                m.serialize_entry("r1", r1)?;
                m.serialize_entry("r2", r2)?;
            }
            EtoStep::Q { r0, k0, beta } => {
                m.serialize_entry("op", "Q")?;
                m.serialize_entry("r0", r0)?;
                m.serialize_entry("k0", k0)?;
                m.serialize_entry("beta", beta)?;
            }
        }
        m.end()
    }
}

fn check_scalar(t: &Sltm, c: &Scalar) -> Result<()> {
    if c.field() != t.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Row `r` divided by `α`, column `r` multiplied by `α`.
pub fn apply_p(t: &Sltm, r: usize, alpha: &Scalar) -> Result<Sltm> {
    check_scalar(t, alpha)?;
    if alpha.is_zero() {
        return Err(Error::ZeroScalar);
    }
    if r < 1 || r > t.n() {
        return Err(Error::restriction(Restriction::BadIndices));
    }
    let inv = alpha.inv()?;
    Ok(Sltm::from_fn(t.n(), t.field(), |i, k| {
        if i == r {
            t.entry(i, k) * &inv
        } else if k == r {
            t.entry(i, k) * alpha
        } else {
            t.entry(i, k).clone()
        }
    }))
}

/// First failed condition of `F(r1, r2)` on `t`, if any.
pub fn f_restriction(t: &Sltm, r1: usize, r2: usize) -> Option<Restriction> {
    if !(1 <= r1 && r1 < r2 && r2 <= t.n()) {
        return Some(Restriction::BadIndices);
    }
    if let Some(j) = (r1..r2).find(|&j| !t.entry(r2, j).is_zero()) {
        return Some(Restriction::SwapRowNotZero { r2, j });
    }
    if let Some(r) = (r1 + 1..r2).find(|&r| !t.entry(r, r1).is_zero()) {
        return Some(Restriction::SwapColumnNotZero { r, r1 });
    }
    None
}

pub fn f_well_defined(t: &Sltm, r1: usize, r2: usize) -> bool {
    f_restriction(t, r1, r2).is_none()
}

pub fn apply_f(t: &Sltm, r1: usize, r2: usize) -> Result<Sltm> {
    if let Some(reason) = f_restriction(t, r1, r2) {
        return Err(Error::restriction(reason));
    }
    Ok(Sltm::from_fn(t.n(), t.field(), |r, k| {
        let rules = [
            (r == r1, (r2, k)),
            (r == r2, (r1, k)),
            (k == r1, (r, r2)),
            (k == r2, (r, r1)),
        ];
        let mut hits = rules.iter().filter(|(hit, _)| *hit).map(|(_, (a, b))| t.get(*a, *b));
        let value = hits.next().unwrap_or_else(|| t.get(r, k));
        // the restrictions force every overlap of rules to agree
        debug_assert!(hits.all(|other| other == value), "F table overlap disagrees at ({r},{k})");
        value
    }))
}

/// First failed condition of `Q(r0, k0, β)` on `t`, if any.
pub fn q_restriction(t: &Sltm, r0: usize, k0: usize, beta: &Scalar) -> Option<Restriction> {
    if !(1 <= k0 && k0 < r0 && r0 <= t.n()) {
        return Some(Restriction::BadIndices);
    }
    if let Some(j) = (k0 + 1..r0).find(|&j| !t.entry(r0, j).is_zero()) {
        return Some(Restriction::ShearRowNotZero { r0, j });
    }
    let one = t.field().one();
    (1..k0)
        .find(|&i| {
            t.delta(&one, i, k0, r0).expect("ordered indices") != beta * t.entry(k0, i)
        })
        .map(|i| Restriction::ShearDeltaMismatch { i })
}

pub fn q_well_defined(t: &Sltm, r0: usize, k0: usize, beta: &Scalar) -> bool {
    q_restriction(t, r0, k0, beta).is_none()
}

pub fn apply_q(t: &Sltm, r0: usize, k0: usize, beta: &Scalar) -> Result<Sltm> {
    check_scalar(t, beta)?;
    if let Some(reason) = q_restriction(t, r0, k0, beta) {
        return Err(Error::restriction(reason));
    }
    let two_beta = beta + beta;
    Ok(Sltm::from_fn(t.n(), t.field(), |r, k| {
        if (r, k) == (r0, k0) {
            t.entry(r, k) - &two_beta
        } else if r > r0 && k == k0 {
            t.entry(r, k) + beta * t.entry(r, r0)
        } else {
            t.entry(r, k).clone()
        }
    }))
}

pub fn apply_step(t: &Sltm, step: &EtoStep) -> Result<Sltm> {
    match step {
        EtoStep::P { r, alpha } => apply_p(t, *r, alpha),
        EtoStep::F { r1, r2 } => apply_f(t, *r1, *r2),
        EtoStep::Q { r0, k0, beta } => apply_q(t, *r0, *k0, beta),
    }
}

/// The elementary matrix of `step` on size `n`.
pub fn step_gamma(step: &EtoStep, n: usize, field: FieldSpec) -> Result<Matrix> {
    let mut g = Matrix::identity(n, field);
    let in_range = |i: usize| (1..=n).contains(&i);
    match step {
        EtoStep::P { r, alpha } => {
            if !in_range(*r) {
                return Err(Error::BadIndex(format!("P row {r} not in 1..={n}")));
            }
            g.set(*r, *r, alpha.clone());
        }
        EtoStep::F { r1, r2 } => {
            if !(in_range(*r1) && in_range(*r2) && r1 < r2) {
                return Err(Error::BadIndex(format!("F pair ({r1},{r2}) invalid for n={n}")));
            }
            g.set(*r1, *r1, field.zero());
            g.set(*r2, *r2, field.zero());
            g.set(*r1, *r2, field.one());
            g.set(*r2, *r1, field.one());
        }
        EtoStep::Q { r0, k0, beta } => {
            if !(in_range(*r0) && in_range(*k0) && k0 < r0) {
                return Err(Error::BadIndex(format!("Q pair ({r0},{k0}) invalid for n={n}")));
            }
            g.set(*k0, *r0, beta.clone());
        }
    }
    Ok(g)
}

/// Steps together with `Γ = E_m ⋯ E_1`, mapping `A(start) -> A(end)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtoSequence {
    pub steps: Vec<EtoStep>,
    pub gamma: Matrix,
}

/// Applies `steps` in order; errors carry the 1-based index of the failing step.
pub fn apply_sequence(t: &Sltm, steps: &[EtoStep]) -> Result<(Sltm, EtoSequence)> {
    let mut current = t.clone();
    let mut gamma = Matrix::identity(t.n(), t.field());
    for (idx, step) in steps.iter().enumerate() {
        current = apply_step(&current, step).map_err(|e| match e {
            Error::RestrictionViolated { reason, .. } => Error::RestrictionViolated {
                step: Some(idx + 1),
                reason,
            },
            other => other,
        })?;
        gamma = step_gamma(step, t.n(), t.field())?.mul(&gamma)?;
    }
    Ok((
        current,
        EtoSequence {
            steps: steps.to_vec(),
            gamma,
        },
    ))
}

/// Every admissible step on `t` (scalars over the whole field) that changes
/// it, with its image, sorted by step.
pub fn admissible_moves(t: &Sltm) -> Result<Vec<(EtoStep, Sltm)>> {
    let field = t.field();
    let elements = field.elements()?;
    let n = t.n();
    let mut moves = Vec::new();
    for r in 1..=n {
        for alpha in elements.iter().filter(|a| !a.is_zero() && !a.is_one()) {
            let s = apply_p(t, r, alpha)?;
            if s != *t {
                moves.push((EtoStep::p(r, alpha.clone()), s));
            }
        }
    }
    for r1 in 1..n {
        for r2 in r1 + 1..=n {
            if f_well_defined(t, r1, r2) {
                let s = apply_f(t, r1, r2)?;
                if s != *t {
                    moves.push((EtoStep::f(r1, r2), s));
                }
            }
        }
    }
    for r0 in 2..=n {
        for k0 in 1..r0 {
            if (k0 + 1..r0).any(|j| !t.entry(r0, j).is_zero()) {
                continue;
            }
            for beta in elements.iter().filter(|b| !b.is_zero()) {
                if q_well_defined(t, r0, k0, beta) {
                    moves.push((EtoStep::q(r0, k0, beta.clone()), apply_q(t, r0, k0, beta)?));
                }
            }
        }
    }
    moves.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(moves)
}

#[derive(Clone, Debug)]
pub struct EquivSearchResult {
    /// Lexicographically least among the shortest step paths, when one exists within the depth.
    pub path: Option<Vec<EtoStep>>,
    /// Matrices reached from either end.
    pub visited: usize,
}

type Levels = HashMap<Sltm, usize>;

/// Bidirectional breadth-first search over single admissible steps.
pub fn eto_equiv_search(t: &Sltm, s: &Sltm, depth: usize) -> Result<EquivSearchResult> {
    if !t.field().is_finite() {
        return Err(Error::InfiniteField);
    }
    if s.field() != t.field() {
        return Err(Error::FieldMismatch);
    }
    if s.n() != t.n() {
        return Err(Error::BadSize {
            expected: t.n(),
            got: s.n(),
        });
    }
    if t == s {
        return Ok(EquivSearchResult {
            path: Some(Vec::new()),
            visited: 1,
        });
    }
    let mut fwd: Levels = HashMap::from([(t.clone(), 0)]);
    let mut bwd: Levels = HashMap::from([(s.clone(), 0)]);
    let mut fwd_front = vec![t.clone()];
    let mut bwd_front = vec![s.clone()];
    let (mut a, mut b) = (0usize, 0usize);
    while a + b < depth {
        let forward = fwd_front.len() <= bwd_front.len();
        let (map, front, level, other) = if forward {
            (&mut fwd, &mut fwd_front, &mut a, &bwd)
        } else {
            (&mut bwd, &mut bwd_front, &mut b, &fwd)
        };
        let mut next = Vec::new();
        for x in front.iter() {
            for (_, y) in admissible_moves(x)? {
                if !map.contains_key(&y) {
                    map.insert(y.clone(), *level + 1);
                    next.push(y);
                }
            }
        }
        *level += 1;
        let met = next.iter().any(|y| other.contains_key(y));
        *front = next;
        if met {
            let path = reconstruct(t, s, &fwd, &bwd, a, b)?;
            return Ok(EquivSearchResult {
                path: Some(path),
                visited: fwd.len() + bwd.len(),
            });
        }
        if front.is_empty() {
            break;
        }
    }
    Ok(EquivSearchResult {
        path: None,
        visited: fwd.len() + bwd.len(),
    })
}

/// Walks from `t` choosing the least step that stays on some shortest path.
fn reconstruct(t: &Sltm, s: &Sltm, fwd: &Levels, bwd: &Levels, a: usize, b: usize) -> Result<Vec<EtoStep>> {
    let meet: HashSet<Sltm> = fwd
        .iter()
        .filter(|(x, &l)| l == a && bwd.get(*x) == Some(&b))
        .map(|(x, _)| x.clone())
        .collect();
    debug_assert!(!meet.is_empty());
    // on_path(levels, top)[p]: nodes at level p lying on a shortest path
    let on_path = |levels: &Levels, top: usize| -> Result<Vec<HashSet<Sltm>>> {
        let mut sets = vec![HashSet::new(); top + 1];
        sets[top] = meet.clone();
        for p in (0..top).rev() {
            let mut here = HashSet::new();
            for y in &sets[p + 1] {
                for (_, z) in admissible_moves(y)? {
                    if levels.get(&z) == Some(&p) {
                        here.insert(z);
                    }
                }
            }
            sets[p] = here;
        }
        Ok(sets)
    };
    let good_f = on_path(fwd, a)?;
    let good_b = on_path(bwd, b)?;
    let mut path = Vec::with_capacity(a + b);
    let mut x = t.clone();
    let targets = (1..=a).map(|p| &good_f[p]).chain((0..b).rev().map(|q| &good_b[q]));
    for want in targets {
        let (step, y) = admissible_moves(&x)?
            .into_iter()
            .find(|(_, y)| want.contains(y))
            .expect("shortest-path layers are connected");
        path.push(step);
        x = y;
    }
    debug_assert_eq!(&x, s);
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn six() -> Sltm {
        Sltm::from_int_rows(
            q(),
            &[&[1], &[2, 1], &[3, 3, 1], &[1, 3, 2, 3], &[2, 2, 3, 2, 1]],
        )
        .unwrap()
    }

    #[test]
    fn p_examples() {
        let t = six();
        let s = apply_p(&t, 3, &q().from_i64(2)).unwrap();
        assert_eq!(s.row(3), &[q().from_i64(1), q().ratio(1, 2).unwrap()]);
        let col3: Vec<Scalar> = (4..=6).map(|r| s.get(r, 3)).collect();
        assert_eq!(col3, vec![q().from_i64(2), q().from_i64(4), q().from_i64(6)]);
        let s = apply_p(&t, 1, &q().from_i64(3)).unwrap();
        let col1: Vec<i64> = (2..=6).map(|r| crate::scalar::rational_parts(&s.get(r, 1)).unwrap().0).collect();
        assert_eq!(col1, vec![3, 6, 9, 3, 6]);
        assert_eq!(apply_p(&t, 4, &q().one()).unwrap(), t);
        let z = Sltm::zero(4, q());
        assert_eq!(apply_p(&z, 2, &q().from_i64(5)).unwrap(), z);
        assert_eq!(apply_p(&t, 2, &q().zero()), Err(Error::ZeroScalar));
    }

    #[test]
    fn f_example_and_violation() {
        let t = Sltm::from_int_rows(
            q(),
            &[&[1], &[2, 1], &[3, 3, 0], &[1, 3, 0, 0], &[2, 2, 3, 2, 1]],
        )
        .unwrap();
        let expect = Sltm::from_int_rows(
            q(),
            &[&[1], &[1, 3], &[3, 3, 0], &[2, 1, 0, 0], &[2, 2, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(apply_f(&t, 3, 5).unwrap(), expect);
        assert_eq!(
            apply_f(&six(), 3, 5),
            Err(Error::restriction(Restriction::SwapRowNotZero { r2: 5, j: 3 }))
        );
        let z = Sltm::zero(5, q());
        assert_eq!(apply_f(&z, 2, 4).unwrap(), z);
        assert!(!f_well_defined(&z, 3, 3));
    }

    #[test]
    fn q_examples() {
        let t = Sltm::from_int_rows(q(), &[&[2], &[1, 0], &[3, 1, 2], &[1, 2, 3, 1]]).unwrap();
        let s = apply_q(&t, 3, 1, &q().from_i64(2)).unwrap();
        let col1: Vec<Scalar> = (2..=5).map(|r| s.get(r, 1)).collect();
        assert_eq!(col1, [2, -3, 7, 7].map(|v| q().from_i64(v)).to_vec());

        let t = Sltm::from_int_rows(q(), &[&[2], &[1, 2], &[3, 6, 2], &[1, 2, 3, 1]]).unwrap();
        let s = apply_q(&t, 4, 3, &q().from_i64(5)).unwrap();
        assert_eq!(s.get(4, 3), q().from_i64(-8));
        assert_eq!(s.get(5, 3), q().from_i64(8));
        assert_eq!(
            apply_q(&t, 4, 3, &q().from_i64(4)),
            Err(Error::restriction(Restriction::ShearDeltaMismatch { i: 1 }))
        );
        assert_eq!(
            apply_q(&t, 4, 2, &q().from_i64(5)),
            Err(Error::restriction(Restriction::ShearRowNotZero { r0: 4, j: 3 }))
        );

        let z = Sltm::zero(2, q());
        let beta = q().ratio(3, 7).unwrap();
        let s = apply_q(&z, 2, 1, &beta).unwrap();
        assert_eq!(s.get(2, 1), -(&beta + &beta));
    }

    #[test]
    fn worked_chain() {
        let t = Sltm::from_int_rows(q(), &[&[2], &[1, 0], &[3, 1, 2], &[1, 2, 3, 1]]).unwrap();
        let steps = parse_steps(q(), "Q 3 1 2; F 2 3; P 3 5").unwrap();
        let (s, seq) = apply_sequence(&t, &steps).unwrap();
        let expect = Sltm::from_rows(
            q(),
            vec![
                vec![q().from_i64(-3)],
                vec![q().ratio(2, 5).unwrap(), q().zero()],
                vec![q().from_i64(7), q().from_i64(2), q().from_i64(5)],
                [7, 3, 10, 1].map(|v| q().from_i64(v)).to_vec(),
            ],
        )
        .unwrap();
        assert_eq!(s, expect);
        assert!(crate::hom::is_isomorphism(&t, &s, &seq.gamma).unwrap());
        assert!(crate::hom::direct_hom_check(&t, &s, &seq.gamma).unwrap());
    }

    #[test]
    fn step_matrices() {
        let q6 = |step: EtoStep| step_gamma(&step, 6, q()).unwrap();
        let g = q6(EtoStep::q(4, 2, q().from_i64(5)));
        assert_eq!(g.get(2, 4), &q().from_i64(5));
        assert_eq!(g.det().unwrap(), q().one());
        let g = q6(EtoStep::f(2, 5));
        assert_eq!(g.get(2, 5), &q().one());
        assert_eq!(g.get(5, 2), &q().one());
        assert!(g.get(2, 2).is_zero());
        assert_eq!(g.det().unwrap(), q().from_i64(-1));
        let g = q6(EtoStep::p(3, q().from_i64(2)));
        assert_eq!(g.det().unwrap(), q().from_i64(2));
        assert!(step_gamma(&EtoStep::f(5, 2), 6, q()).is_err());
        assert!(step_gamma(&EtoStep::p(7, q().one()), 6, q()).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(
            EtoStep::p(3, q().from_i64(2)).inverse().unwrap(),
            EtoStep::p(3, q().ratio(1, 2).unwrap())
        );
        assert_eq!(EtoStep::f(2, 5).inverse().unwrap(), EtoStep::f(2, 5));
        assert_eq!(
            EtoStep::q(3, 1, q().from_i64(2)).inverse().unwrap(),
            EtoStep::q(3, 1, q().from_i64(-2))
        );
        let t = Sltm::from_int_rows(q(), &[&[2], &[1, 0], &[3, 1, 2]]).unwrap();
        let step = EtoStep::q(3, 1, q().from_i64(2));
        let (_, seq) = apply_sequence(&t, &[step.clone(), step.inverse().unwrap()]).unwrap();
        assert_eq!(seq.gamma, Matrix::identity(4, q()));
        let (back, _) = apply_sequence(&t, &[step.clone(), step.inverse().unwrap()]).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn sequence_error_names_step() {
        let t = six();
        let steps = vec![EtoStep::p(1, q().from_i64(2)), EtoStep::f(3, 5)];
        match apply_sequence(&t, &steps) {
            Err(Error::RestrictionViolated { step, .. }) => assert_eq!(step, Some(2)),
            other => panic!("unexpected {other:?}"),
        }
        let (same, seq) = apply_sequence(&t, &[]).unwrap();
        assert_eq!(same, t);
        assert_eq!(seq.gamma, Matrix::identity(6, q()));
    }

    #[test]
    fn step_text_and_json() {
        let steps = parse_steps(q(), "P 3 1/2; F 2 5\nQ 3 1 -2").unwrap();
        assert_eq!(format_steps(&steps), "P 3 1/2; F 2 5; Q 3 1 -2");
        for s in &steps {
            assert_eq!(&EtoStep::from_json_value(q(), &s.to_json_value()).unwrap(), s);
        }
        assert!(matches!(parse_steps(q(), "P 3"), Err(Error::Parse { .. })));
        assert!(matches!(parse_steps(q(), "F 1 2; R 1"), Err(Error::Parse { column: 8, .. })));
    }

    #[test]
    fn equiv_search_basics() {
        let f7 = FieldSpec::prime(7).unwrap();
        let t = Sltm::from_int_rows(f7, &[&[2], &[1, 0], &[3, 1, 2], &[1, 2, 3, 1]]).unwrap();
        let same = eto_equiv_search(&t, &t, 4).unwrap();
        assert_eq!(same.path, Some(vec![]));
        let steps = parse_steps(f7, "Q 3 1 2; F 2 3; P 3 5").unwrap();
        let (s, _) = apply_sequence(&t, &steps).unwrap();
        let found = eto_equiv_search(&t, &s, 3).unwrap();
        let path = found.path.expect("path within 3 steps");
        assert!(path.len() <= 3);
        assert_eq!(apply_sequence(&t, &path).unwrap().0, s);
        assert!(matches!(
            eto_equiv_search(&Sltm::zero(2, q()), &Sltm::zero(2, q()), 2),
            Err(Error::InfiniteField)
        ));
    }

    #[test]
    fn equiv_search_path_is_least() {
        let f3 = FieldSpec::prime(3).unwrap();
        let z = Sltm::zero(3, f3);
        for t in Sltm::enumerate(3, f3).unwrap() {
            let res = eto_equiv_search(&t, &z, 6).unwrap();
            let Some(path) = res.path else { continue };
            assert_eq!(apply_sequence(&t, &path).unwrap().0, z);
            // brute force over all admissible paths of the same length
            let mut best: Option<Vec<EtoStep>> = None;
            let mut stack = vec![(t.clone(), Vec::new())];
            while let Some((x, p)) = stack.pop() {
                if p.len() == path.len() {
                    if x == z && best.as_ref().is_none_or(|b| p < *b) {
                        best = Some(p);
                    }
                    continue;
                }
                for (step, y) in admissible_moves(&x).unwrap() {
                    let mut np = p.clone();
                    np.push(step);
                    stack.push((y, np));
                }
            }
            assert_eq!(best.as_ref(), Some(&path), "from {t:?}");
        }
    }
}
