//! Exhaustive isomorphism search over a prime field.
//!
//! `Γ` is filled column by column, each column entry by entry in row order
//! with values `0..p`, so the first hit is the lexicographically least `Γ` in
//! column-major order. The equations indexed by `(r, i, k)` only involve
//! columns `<= r`, so each one is tested as soon as `γ_kr` is placed.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::Morphism;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::FieldSpec;
use crate::sltm::Sltm;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoSearchOptions {
    /// Maximum number of visited partial-column nodes.
    pub budget: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for IsoSearchOptions {
    fn default() -> Self {
        IsoSearchOptions {
            budget: DEFAULT_BUDGET,
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
}

#[derive(Clone, Debug)]
pub enum IsoOutcome {
    Found(Morphism),
    Exhausted,
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct IsoSearchResult {
    pub outcome: IsoOutcome,
    pub stats: SearchStats,
}

impl IsoSearchResult {
    pub fn found(&self) -> Option<&Morphism> {
        match &self.outcome {
            IsoOutcome::Found(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.outcome, IsoOutcome::Exhausted)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Found,
    Continue,
    Abort,
}

/// Problem data lifted to residues.
struct Problem {
    n: usize,
    p: u64,
    /// `t[r][j]`, 0-based, full square.
    t: Vec<Vec<u64>>,
    s: Vec<Vec<u64>>,
}

struct Shared<'a> {
    budget: u64,
    total: &'a AtomicU64,
    /// Index of the earliest subtree known to contain a solution.
    best: &'a AtomicUsize,
}

const FLUSH_EVERY: u64 = 1 << 12;

struct Searcher<'a> {
    pb: &'a Problem,
    /// `gamma[r][x]`: column-major, 0-based.
    gamma: Vec<Vec<u64>>,
    /// Row-reduced basis of the placed columns, as (pivot, vector) with `vector[pivot] = 1`.
    basis: Vec<(usize, Vec<u64>)>,
    /// `weights[x] = Σ_{j<r} t_rj γ_xj` for the column being filled.
    weights: Vec<u64>,
    stats: SearchStats,
    unflushed: u64,
    shared: Option<&'a Shared<'a>>,
    subtree: usize,
    budget: u64,
    /// Complete first columns, gathered instead of descending.
    collect: Option<Vec<Vec<u64>>>,
}

impl<'a> Searcher<'a> {
    fn new(pb: &'a Problem, budget: u64) -> Self {
        Searcher {
            pb,
            gamma: vec![vec![0; pb.n]; pb.n],
            basis: Vec::with_capacity(pb.n),
            weights: vec![0; pb.n],
            stats: SearchStats::default(),
            unflushed: 0,
            shared: None,
            subtree: 0,
            budget,
            collect: None,
        }
    }

    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        match self.shared {
            None => self.stats.nodes <= self.budget,
            Some(sh) => {
                self.unflushed += 1;
                if self.unflushed >= FLUSH_EVERY {
                    let total = sh.total.fetch_add(self.unflushed, Ordering::Relaxed) + self.unflushed;
                    self.unflushed = 0;
                    if total > sh.budget || sh.best.load(Ordering::Relaxed) < self.subtree {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn set_weights(&mut self, r: usize) {
        let p = self.pb.p;
        for x in 0..self.pb.n {
            let mut acc = 0u64;
            for j in 0..r {
                let t = self.pb.t[r][j];
                if t != 0 {
                    acc = (acc + t * self.gamma[j][x]) % p;
                }
            }
            self.weights[x] = acc;
        }
    }

    /// Equations `(r, i, k)` for all `i < k`, with `γ_kr = v` just placed.
    fn entry_ok(&self, r: usize, k: usize, v: u64) -> bool {
        let p = self.pb.p;
        let col = &self.gamma[r];
        let wk = self.weights[k];
        let srow = &self.pb.s[k];
        for i in 0..k {
            let gir = col[i];
            let ski = srow[i];
            // 2 γ_ir v + v² s_ki − w_k v s_ki − w_k γ_ir − w_i v
            let vs = v * ski % p;
            let lhs = (2 * gir % p * v + vs * v) % p;
            let rhs = (wk * vs + wk * gir + self.weights[i] * v) % p;
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// Reduces column `r` against the basis; pushes it if independent.
    fn push_independent(&mut self, r: usize) -> bool {
        let p = self.pb.p;
        let mut v = self.gamma[r].clone();
        for (piv, b) in &self.basis {
            let c = v[*piv];
            if c != 0 {
                for (x, bx) in v.iter_mut().zip(b) {
                    *x = (*x + (p - c) * bx) % p;
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(v[piv], p);
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        self.basis.push((piv, v));
        true
    }

    fn dfs(&mut self, r: usize, k: usize) -> Flow {
        let n = self.pb.n;
        for v in 0..self.pb.p {
            if !self.tick() {
                return Flow::Abort;
            }
            self.gamma[r][k] = v;
            if !self.entry_ok(r, k, v) {
                self.stats.prunes += 1;
                continue;
            }
            let flow = if k + 1 < n {
                self.dfs(r, k + 1)
            } else {
                self.finish_column(r)
            };
            if flow != Flow::Continue {
                return flow;
            }
        }
        self.gamma[r][k] = 0;
        Flow::Continue
    }

    fn finish_column(&mut self, r: usize) -> Flow {
        if !self.push_independent(r) {
            self.stats.prunes += 1;
            return Flow::Continue;
        }
        if let Some(found) = self.collect.as_mut() {
            found.push(self.gamma[r].clone());
            self.basis.pop();
            return Flow::Continue;
        }
        if r + 1 == self.pb.n {
            return Flow::Found;
        }
        let saved = std::mem::take(&mut self.weights);
        self.weights = vec![0; self.pb.n];
        self.set_weights(r + 1);
        let flow = self.dfs(r + 1, 0);
        self.weights = saved;
        if flow == Flow::Found {
            return flow;
        }
        self.basis.pop();
        flow
    }

    fn gamma_matrix(&self, field: FieldSpec) -> Matrix {
        let mut g = Matrix::zeros(self.pb.n, self.pb.n, field);
        for r in 0..self.pb.n {
            for x in 0..self.pb.n {
                g.set(x + 1, r + 1, field.element(self.gamma[r][x] as u32).expect("residue"));
            }
        }
        g
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn lift(m: &Sltm) -> Vec<Vec<u64>> {
    let n = m.n();
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| m.get(i, j).residue().expect("prime field") as u64)
                .collect()
        })
        .collect()
}

/// Searches every invertible `Γ` with `A(T) ≅ A(S)` under `Γ`, stopping at the
/// first. `Exhausted` is only reported after the whole tree was covered.
pub fn iso_search(t: &Sltm, s: &Sltm, opts: &IsoSearchOptions) -> Result<IsoSearchResult> {
    let field = t.field();
    let FieldSpec::Prime(p) = field else {
        return Err(Error::InfiniteField);
    };
    if s.field() != field {
        return Err(Error::FieldMismatch);
    }
    if s.n() != t.n() {
        return Err(Error::BadSize {
            expected: t.n(),
            got: s.n(),
        });
    }
    let pb = Problem {
        n: t.n(),
        p: p as u64,
        t: lift(t),
        s: lift(s),
    };
    let found = |gamma: Matrix| -> Result<IsoOutcome> {
        let m = Morphism::new(t.clone(), s.clone(), gamma)?;
        assert!(m.is_iso(), "search produced a non-isomorphism");
        Ok(IsoOutcome::Found(m))
    };

    if opts.jobs <= 1 || pb.n < 2 {
        let mut se = Searcher::new(&pb, opts.budget);
        let flow = se.dfs(0, 0);
        let outcome = match flow {
            Flow::Found => found(se.gamma_matrix(field))?,
            Flow::Continue => IsoOutcome::Exhausted,
            Flow::Abort => IsoOutcome::BudgetExceeded,
        };
        return Ok(IsoSearchResult {
            outcome,
            stats: se.stats,
        });
    }

    // Split over the admissible first columns.
    let mut head = Searcher::new(&pb, opts.budget);
    head.collect = Some(Vec::new());
    if head.dfs(0, 0) == Flow::Abort {
        return Ok(IsoSearchResult {
            outcome: IsoOutcome::BudgetExceeded,
            stats: head.stats,
        });
    }
    let firsts = head.collect.take().unwrap_or_default();
    let total = AtomicU64::new(head.stats.nodes);
    let best = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        budget: opts.budget,
        total: &total,
        best: &best,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::BadIndex(format!("thread pool: {e}")))?;
    let results: Vec<(Flow, SearchStats, Option<Matrix>)> = pool.install(|| {
        firsts
            .par_iter()
            .enumerate()
            .map(|(idx, col)| {
                if best.load(Ordering::Relaxed) < idx {
                    return (Flow::Abort, SearchStats::default(), None);
                }
                let mut se = Searcher::new(&pb, opts.budget);
                se.shared = Some(&shared);
                se.subtree = idx;
                se.gamma[0] = col.clone();
                assert!(se.push_independent(0));
                se.set_weights(1);
                let flow = se.dfs(1, 0);
                total.fetch_add(se.unflushed, Ordering::Relaxed);
                let gamma = (flow == Flow::Found).then(|| {
                    best.fetch_min(idx, Ordering::Relaxed);
                    se.gamma_matrix(field)
                });
                (flow, se.stats, gamma)
            })
            .collect()
    });
    let mut stats = head.stats;
    for (_, st, _) in &results {
        stats.nodes += st.nodes;
        stats.prunes += st.prunes;
    }
    if let Some((_, _, Some(g))) = results.iter().find(|r| r.0 == Flow::Found) {
        return Ok(IsoSearchResult {
            outcome: found(g.clone())?,
            stats,
        });
    }
    let outcome = if results.iter().any(|r| r.0 == Flow::Abort) {
        IsoOutcome::BudgetExceeded
    } else {
        IsoOutcome::Exhausted
    };
    Ok(IsoSearchResult { outcome, stats })
}
