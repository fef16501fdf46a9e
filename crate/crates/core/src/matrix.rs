//! Dense exact matrices, used for change-of-basis data `Γ`.
//!
//! Indices are 1-based like [`crate::Sltm`].

use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar_at, FieldSpec, Scalar};
use crate::sltm::scalar_from_json;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            field,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Matrix::zeros(n, n, field);
        for i in 1..=n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {c}",
                    i + 1,
                    row.len()
                )));
            }
            for v in row {
                if v.field() != field {
                    return Err(Error::FieldMismatch);
                }
                data.push(v);
            }
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            field,
            data,
        })
    }

    pub fn from_int_rows(field: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols, "index ({i},{j}) out of range");
        &self.data[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols, "index ({i},{j}) out of range");
        assert_eq!(value.field(), self.field);
        self.data[(i - 1) * self.cols + (j - 1)] = value;
    }

    /// Column `j` as a vector (1-based).
    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (1..=self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vec(&self, i: usize) -> &[Scalar] {
        &self.data[(i - 1) * self.cols..i * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.field);
        for i in 1..=self.rows {
            for j in 1..=self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols, self.field);
        for i in 1..=self.rows {
            for k in 1..=self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 1..=other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = (i - 1) * out.cols + (j - 1);
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row echelon form by Gaussian elimination; returns (echelon, rank, det sign/scale).
    fn eliminate(&self) -> (Matrix, usize, Scalar) {
        let mut m = self.clone();
        let mut rank = 0;
        let mut det = self.field.one();
        for col in 1..=m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank + 1..=m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                det = self.field.zero();
                continue;
            };
            if pivot != rank + 1 {
                m.swap_rows(pivot, rank + 1);
                det = -det;
            }
            let p = m.get(rank + 1, col).clone();
            det = det * &p;
            let pinv = p.inv().expect("nonzero pivot");
            for r in rank + 2..=m.rows {
                let f = m.get(r, col) * &pinv;
                if f.is_zero() {
                    continue;
                }
                for c in col..=m.cols {
                    let v = m.get(r, c) - &(&f * m.get(rank + 1, c));
                    m.set(r, c, v);
                }
            }
            rank += 1;
        }
        (m, rank, det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap((a - 1) * self.cols + c, (b - 1) * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1
    }

    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let (_, rank, det) = self.eliminate();
        Ok(if rank < self.rows { self.field.zero() } else { det })
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, self.field);
        for col in 1..=n {
            let pivot = (col..=n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let pinv = a.get(col, col).inv()?;
            for c in 1..=n {
                a.set(col, c, a.get(col, c) * &pinv);
                inv.set(col, c, inv.get(col, c) * &pinv);
            }
            for r in 1..=n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 1..=n {
                    a.set(r, c, a.get(r, c) - &(&f * a.get(col, c)));
                    inv.set(r, c, inv.get(r, c) - &(&f * inv.get(col, c)));
                }
            }
        }
        Ok(inv)
    }

    /// Rows separated by newlines or `;`, entries by whitespace or `,`.
    pub fn parse_text(field: FieldSpec, text: &str) -> Result<Matrix> {
        let mut rows = Vec::new();
        for (li, line) in text.lines().enumerate() {
            let mut col0 = 1;
            for part in line.split(';') {
                let start = col0;
                col0 += part.len() + 1;
                if part.trim().is_empty() || part.trim_start().starts_with('#') {
                    continue;
                }
                let mut row = Vec::new();
                let mut c = start;
                for tok in part.split(|ch: char| ch.is_whitespace() || ch == ',') {
                    if !tok.is_empty() {
                        row.push(parse_scalar_at(&field, tok, li + 1, c)?);
                    }
                    c += tok.len() + 1;
                }
                rows.push((li + 1, start, row));
            }
        }
        if let Some(width) = rows.first().map(|r| r.2.len()) {
            if let Some(bad) = rows.iter().find(|r| r.2.len() != width) {
                return Err(Error::parse(
                    bad.0,
                    bad.1,
                    format!("row has {} entries, expected {width}", bad.2.len()),
                ));
            }
        }
        Matrix::from_rows(field, rows.into_iter().map(|r| r.2).collect())
    }

    /// Accepts `{rows, cols, entries}` or a bare array of rows.
    pub fn from_json_value(field: FieldSpec, value: &Value) -> Result<Matrix> {
        let rows = value
            .as_array()
            .or_else(|| value.get("entries").and_then(Value::as_array))
            .ok_or_else(|| Error::parse(1, 1, "matrix JSON needs an `entries` array of rows"))?;
        let parsed = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::parse(1, 1, "matrix row must be an array"))?
                    .iter()
                    .map(|v| scalar_from_json(&field, v))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(field, parsed)?;
        for (key, expected) in [("rows", m.rows), ("cols", m.cols)] {
            if let Some(v) = value.get(key).and_then(Value::as_u64) {
                if v as usize != expected {
                    return Err(Error::DimensionMismatch(format!(
                        "`{key}` says {v} but entries give {expected}"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (1..=self.rows).map(|i| self.row_vec(i).to_vec()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.rows {
            let row: Vec<String> = self.row_vec(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Scalar>>,
}

/// `{rows, cols, entries}` with entries in scalar text syntax.
impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.to_rows())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            let row: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}
