//! Strictly lower triangular matrices: the objects that codify the algebras.
//!
//! Storage is the dense lower triangle in row-major order, so an `n`-matrix
//! holds exactly `n(n-1)/2` scalars. Indices in the public API are 1-based to
//! match the usual `t_{ij}` notation.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar_at, FieldSpec, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sltm {
    n: usize,
    field: FieldSpec,
    entries: Vec<Scalar>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    (i - 1) * (i - 2) / 2 + (j - 1)
}

/// Number of stored entries of an `n`-matrix.
pub fn triangle_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Sltm {
    pub fn zero(n: usize, field: FieldSpec) -> Self {
        assert!(n >= 1, "matrix size must be positive");
        Sltm {
            n,
            field,
            entries: vec![field.zero(); triangle_len(n)],
        }
    }

    /// Builds `T` from `t(i, j)` evaluated on every `1 <= j < i <= n`.
    pub fn from_fn(n: usize, field: FieldSpec, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut t = Sltm::zero(n, field);
        for i in 2..=n {
            for j in 1..i {
                let v = f(i, j);
                assert_eq!(v.field(), field, "entry in the wrong field");
                t.entries[tri_index(i, j)] = v;
            }
        }
        t
    }

    /// Builds a matrix from its lower rows `i = 2..=n`, row `i` holding `i-1` entries.
    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len() + 1;
        let mut entries = Vec::with_capacity(triangle_len(n));
        for (idx, row) in rows.into_iter().enumerate() {
            let i = idx + 2;
            if row.len() != i - 1 {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    i - 1
                )));
            }
            for v in row {
                if v.field() != field {
                    return Err(Error::FieldMismatch);
                }
                entries.push(v);
            }
        }
        Ok(Sltm { n, field, entries })
    }

    /// Convenience constructor from integer rows (rows `2..=n`).
    pub fn from_int_rows(field: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        Sltm::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// The stored triangle in row-major order.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// `t_{ij}`; zero on and above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n, "index ({i},{j}) out of range");
        if j < i {
            self.entries[tri_index(i, j)].clone()
        } else {
            self.field.zero()
        }
    }

    /// Reference to a strictly-lower entry.
    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        assert!(j < i && i <= self.n && j >= 1);
        &self.entries[tri_index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert!(j >= 1 && j < i && i <= self.n, "({i},{j}) is not strictly lower");
        assert_eq!(value.field(), self.field, "entry in the wrong field");
        self.entries[tri_index(i, j)] = value;
    }

    /// Entries `t_{i1} .. t_{i,i-1}`.
    pub fn row(&self, i: usize) -> &[Scalar] {
        assert!(i >= 1 && i <= self.n);
        let start = triangle_len(i - 1);
        &self.entries[start..start + i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Scalar::is_zero)
    }

    /// `Δ^(α)_{i,j,k}(U) = α·u_{ki} + u_{kj}·u_{ji}` for `1 <= i < j < k <= n`.
    pub fn delta(&self, alpha: &Scalar, i: usize, j: usize, k: usize) -> Result<Scalar> {
        if !(1 <= i && i < j && j < k && k <= self.n) {
            return Err(Error::IndexOrder { i, j, k });
        }
        if alpha.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(alpha * self.entry(k, i) + self.entry(k, j) * self.entry(j, i))
    }

    /// `B_{n,l}`: ones at `(n,1)..(n,l)`, zero elsewhere.
    pub fn b_matrix(n: usize, l: usize, field: FieldSpec) -> Result<Self> {
        if l < 1 || l >= n {
            return Err(Error::BadIndex(format!("B_(n,l) needs 1 <= l < n, got n={n}, l={l}")));
        }
        let mut t = Sltm::zero(n, field);
        for j in 1..=l {
            t.set(n, j, field.one());
        }
        Ok(t)
    }

    /// The leading `k x k` block `T|_k`.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        if k < 1 || k >= self.n {
            return Err(Error::BadIndex(format!(
                "restriction needs 1 <= k < {}, got {k}",
                self.n
            )));
        }
        Ok(Sltm {
            n: k,
            field: self.field,
            entries: self.entries[..triangle_len(k)].to_vec(),
        })
    }

    /// `q^{n(n-1)/2}`, the size of `TM_n(F_q)`.
    pub fn count(n: usize, field: FieldSpec) -> Result<u64> {
        let q = field.order().ok_or(Error::InfiniteField)?;
        q.checked_pow(triangle_len(n) as u32)
            .ok_or_else(|| Error::BadIndex(format!("TM_{n} over {field} is too large to index")))
    }

    /// Position in the canonical lexicographic order of `TM_n(F_q)`.
    pub fn serial_index(&self) -> Result<u64> {
        let q = self.field.order().ok_or(Error::InfiniteField)?;
        Sltm::count(self.n, self.field)?;
        Ok(self
            .entries
            .iter()
            .fold(0u64, |acc, v| acc * q + v.residue().expect("prime field") as u64))
    }

    /// Inverse of [`Sltm::serial_index`].
    pub fn from_serial_index(n: usize, field: FieldSpec, mut index: u64) -> Result<Self> {
        let total = Sltm::count(n, field)?;
        if index >= total {
            return Err(Error::BadIndex(format!("serial index {index} >= {total}")));
        }
        let q = field.order().expect("finite");
        let len = triangle_len(n);
        let mut entries = vec![field.zero(); len];
        for slot in entries.iter_mut().rev() {
            *slot = field.element((index % q) as u32)?;
            index /= q;
        }
        Ok(Sltm { n, field, entries })
    }

    /// Every matrix of `TM_n(F_q)` exactly once, in lexicographic order.
    pub fn enumerate(n: usize, field: FieldSpec) -> Result<impl Iterator<Item = Sltm>> {
        let total = Sltm::count(n, field)?;
        Ok((0..total).map(move |i| Sltm::from_serial_index(n, field, i).expect("in range")))
    }

    /// Text form: a header line then one line per row `i = 2..=n`.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}; field={}\n", self.n, self.field);
        for i in 2..=self.n {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Compact single-line form `n=3;q3;rows:1|2 0`.
    pub fn to_compact(&self) -> String {
        let rows: Vec<String> = (2..=self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("n={};{};rows:{}", self.n, self.field, rows.join("|"))
    }

    /// Parses the text form, the one-line `...; rows: a | b c` variant and
    /// the compact `--matrix` literal.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "empty matrix text"))?;
        let hline = hline + 1;
        let mut n: Option<usize> = None;
        let mut field: Option<FieldSpec> = None;
        let (head, inline_rows) = match header.find("rows:") {
            Some(pos) => (&header[..pos], Some((pos + 6, &header[pos + 5..]))),
            None => (header, None),
        };
        let mut offset = 0usize;
        for segment in head.split(';') {
            let col = offset + 1 + (segment.len() - segment.trim_start().len());
            offset += segment.len() + 1;
            let seg = segment.trim();
            if seg.is_empty() {
                continue;
            }
            if let Some(v) = seg.strip_prefix("n=") {
                n = Some(v.trim().parse().map_err(|_| {
                    Error::parse(hline, col, format!("invalid size `{}`", v.trim()))
                })?);
            } else if let Some(v) = seg.strip_prefix("field=") {
                field = Some(v.parse().map_err(|e| relocate(e, hline, col))?);
            } else {
                field = Some(seg.parse().map_err(|e| relocate(e, hline, col))?);
            }
        }
        let n = n.ok_or_else(|| Error::parse(hline, 1, "missing `n=<size>`"))?;
        let field = field.ok_or_else(|| Error::parse(hline, 1, "missing field"))?;
        if n == 0 {
            return Err(Error::parse(hline, 1, "size must be positive"));
        }
        let mut raw_rows: Vec<(usize, usize, &str)> = Vec::new();
        if let Some((col, rest)) = inline_rows {
            let mut c = col;
            for part in rest.split('|') {
                raw_rows.push((hline, c, part));
                c += part.len() + 1;
            }
            if n == 1 && raw_rows.len() == 1 && raw_rows[0].2.trim().is_empty() {
                raw_rows.clear();
            }
        } else {
            for (idx, l) in lines {
                raw_rows.push((idx + 1, 1, l));
            }
        }
        if raw_rows.len() != n - 1 {
            let (line, col) = raw_rows.last().map(|r| (r.0, r.1)).unwrap_or((hline, 1));
            return Err(Error::parse(
                line,
                col,
                format!("expected {} rows for n={n}, found {}", n - 1, raw_rows.len()),
            ));
        }
        let mut rows = Vec::with_capacity(n - 1);
        for (ri, (line, col, raw)) in raw_rows.into_iter().enumerate() {
            let i = ri + 2;
            let mut row = Vec::with_capacity(i - 1);
            let mut c = col;
            for tok in raw.split(|ch: char| ch.is_whitespace() || ch == ',') {
                if !tok.is_empty() {
                    row.push(parse_scalar_at(&field, tok, line, c)?);
                }
                c += tok.len() + 1;
            }
            if row.len() != i - 1 {
                return Err(Error::parse(
                    line,
                    col,
                    format!("row {i} needs {} entries, found {}", i - 1, row.len()),
                ));
            }
            rows.push(row);
        }
        Sltm::from_rows(field, rows)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(SltmJson::from(self)).expect("serializable")
    }

    /// Accepts `{n, field, rows}` with `n-1` lower rows (a leading empty row
    /// is tolerated). Scalars may be JSON strings or integers.
    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse(1, 1, "matrix JSON must be an object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse(1, 1, "missing integer `n`"))? as usize;
        let field: FieldSpec = obj
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse(1, 1, "missing string `field`"))?
            .parse()?;
        let rows = obj
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(1, 1, "missing array `rows`"))?;
        let mut rows: Vec<&Value> = rows.iter().collect();
        if n >= 1 && rows.len() == n && rows[0].as_array().is_some_and(|r| r.is_empty()) {
            rows.remove(0);
        }
        if n == 0 || rows.len() != n - 1 {
            return Err(Error::parse(
                1,
                1,
                format!("expected {} rows for n={n}, found {}", n.saturating_sub(1), rows.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(n - 1);
        for (ri, row) in rows.into_iter().enumerate() {
            let arr = row
                .as_array()
                .ok_or_else(|| Error::parse(1, 1, format!("row {} is not an array", ri + 2)))?;
            parsed.push(
                arr.iter()
                    .map(|v| scalar_from_json(&field, v))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Sltm::from_rows(field, parsed)
    }

    /// Parses either the JSON mirror or the text format.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(text)
                .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
            Sltm::from_json_value(&value)
        } else {
            Sltm::parse_text(text)
        }
    }
}

fn relocate(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::parse(line, col + column - 1, message),
        other => other,
    }
}

pub(crate) fn scalar_from_json(field: &FieldSpec, v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => field.parse_scalar(s),
        Value::Number(num) => field.parse_scalar(&num.to_string()),
        _ => Err(Error::parse(1, 1, format!("invalid scalar `{v}`"))),
    }
}

#[derive(Serialize)]
struct SltmJson {
    n: usize,
    field: FieldSpec,
    rows: Vec<Vec<Scalar>>,
}

impl From<&Sltm> for SltmJson {
    fn from(t: &Sltm) -> Self {
        SltmJson {
            n: t.n,
            field: t.field,
            rows: (2..=t.n).map(|i| t.row(i).to_vec()).collect(),
        }
    }
}

impl Serialize for Sltm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SltmJson::from(self).serialize(serializer)
    }
}

/// Lexicographic on the stored triangle; size and field break ties first.
impl Ord for Sltm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.field.cmp(&other.field))
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for Sltm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Sltm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sltm({})", self.to_compact())
    }
}

impl fmt::Display for Sltm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (1..=self.n)
            .map(|i| (1..=self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", padded.join(" "))?;
        }
        Ok(())
    }
}
