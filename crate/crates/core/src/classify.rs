//! Leader graphs, the zero-class criterion with constructive certificates,
//! the closed forms for sizes 2 and 3, and finite-field censuses.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::eto::{admissible_moves, apply_q, apply_sequence, EtoSequence, EtoStep};
use crate::hom::{iso_search, IsoOutcome, IsoSearchOptions, Morphism, DEFAULT_BUDGET};
use crate::matrix::Matrix;
use crate::scalar::FieldSpec;
use crate::sltm::Sltm;

/// Rightmost nonzero column of row `k`, if any.
pub fn leader_of(u: &Sltm, k: usize) -> Option<usize> {
    (1..k).rev().find(|&j| !u.entry(k, j).is_zero())
}

/// All leaders `(k, j)`, sorted by `k`.
pub fn leaders(u: &Sltm) -> Vec<(usize, usize)> {
    (2..=u.n())
        .filter_map(|k| leader_of(u, k).map(|j| (k, j)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Simple,
    Ramified,
}

/// The arrows of one connected component of a leader graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub kind: ChainKind,
    /// Sorted by source vertex.
    pub pairs: Vec<(usize, usize)>,
}

impl Chain {
    /// Simple when, sorted by source, each source is the next pair's target.
    pub fn classify(pairs: &[(usize, usize)]) -> ChainKind {
        let mut sorted = pairs.to_vec();
        sorted.sort();
        if sorted.windows(2).all(|w| w[0].0 == w[1].1) {
            ChainKind::Simple
        } else {
            ChainKind::Ramified
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeaderGraph {
    pub n: usize,
    /// One `(k, j)` per leader, sorted by `k`.
    pub arrows: Vec<(usize, usize)>,
    /// Vertices whose row is zero.
    pub minimal_vertices: Vec<usize>,
    /// Connected components, each sorted, ordered by smallest vertex.
    pub components: Vec<Vec<usize>>,
    /// One chain per component that carries an arrow.
    pub chains: Vec<Chain>,
}

pub fn leader_graph(u: &Sltm) -> LeaderGraph {
    let n = u.n();
    let arrows = leaders(u);
    let mut dsu = Dsu::new(n + 1);
    for &(k, j) in &arrows {
        dsu.union(k, j);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 1..=n {
        groups.entry(dsu.find(v)).or_default().push(v);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    components.sort();
    let chains = components
        .iter()
        .filter_map(|comp| {
            let pairs: Vec<_> = arrows
                .iter()
                .copied()
                .filter(|(k, _)| comp.binary_search(k).is_ok())
                .collect();
            (!pairs.is_empty()).then(|| Chain {
                kind: Chain::classify(&pairs),
                pairs,
            })
        })
        .collect();
    LeaderGraph {
        n,
        minimal_vertices: (1..=n).filter(|&k| u.is_zero_row(k)).collect(),
        arrows,
        components,
        chains,
    }
}

impl LeaderGraph {
    /// The head of the arrow leaving `k`.
    pub fn target(&self, k: usize) -> Option<usize> {
        self.arrows
            .binary_search_by_key(&k, |a| a.0)
            .ok()
            .map(|i| self.arrows[i].1)
    }

    /// The arrows walked from `k` down to its minimal vertex (`C_k`),
    /// ordered by increasing source. Empty when `k` is minimal.
    pub fn chain_from(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut v = k;
        while let Some(j) = self.target(v) {
            out.push((v, j));
            v = j;
        }
        out.reverse();
        out
    }

    /// The unique minimal vertex below `k`.
    pub fn minimal_below(&self, k: usize) -> usize {
        let mut v = k;
        while let Some(j) = self.target(v) {
            v = j;
        }
        v
    }

    /// Vertices with an outgoing arrow but no incoming one.
    pub fn sources(&self) -> Vec<usize> {
        self.arrows
            .iter()
            .map(|a| a.0)
            .filter(|&k| !self.arrows.iter().any(|a| a.1 == k))
            .collect()
    }

    /// One `k -> j` line per arrow.
    pub fn to_edge_list(&self) -> String {
        self.arrows
            .iter()
            .map(|(k, j)| format!("{k} -> {j}\n"))
            .collect()
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links the larger root under the smaller; false when already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroCondition {
    /// `U` is the zero matrix.
    Zero,
    /// Only column 1 carries nonzero entries.
    ColumnOne,
    /// `Δ^(2)_{i,j,k}` vanishes below every leader `(k, j)` with `j > 1`.
    LeaderDeltas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroClassVerdict {
    Holds(ZeroCondition),
    /// First leader `(k, j)` and column `i` with `Δ^(2)_{i,j,k} != 0`.
    Fails { i: usize, j: usize, k: usize },
}

impl ZeroClassVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ZeroClassVerdict::Holds(_))
    }
}

/// Decides whether `A(U)` is isomorphic to the square-zero algebra `A(0_n)`.
pub fn zero_class_check(u: &Sltm) -> ZeroClassVerdict {
    if u.is_zero() {
        return ZeroClassVerdict::Holds(ZeroCondition::Zero);
    }
    let n = u.n();
    if (3..=n).all(|k| (2..k).all(|j| u.entry(k, j).is_zero())) {
        return ZeroClassVerdict::Holds(ZeroCondition::ColumnOne);
    }
    let two = u.field().from_i64(2);
    for (k, j) in leaders(u) {
        for i in 1..j {
            if !u.delta(&two, i, j, k).expect("ordered").is_zero() {
                return ZeroClassVerdict::Fails { i, j, k };
            }
        }
    }
    ZeroClassVerdict::Holds(ZeroCondition::LeaderDeltas)
}

/// The isomorphism `A(0_n) -> A(U)` obtained by sending each minimal vertex
/// to its own generator and walking the arrows upward.
pub fn zero_class_certificate(u: &Sltm) -> Result<Morphism> {
    if !zero_class_check(u).holds() {
        return Err(Error::NotInZeroClass);
    }
    let n = u.n();
    let field = u.field();
    let mut gamma = Matrix::identity(n, field);
    for k in 2..=n {
        if let Some(j) = leader_of(u, k) {
            let c = -u.entry(k, j).half();
            for i in 1..=j {
                let v = gamma.get(i, j) * &c;
                gamma.set(i, k, v);
            }
        }
    }
    Morphism::new(Sltm::zero(n, field), u.clone(), gamma)
}

/// Shears `U` down to `0_n`, clearing the smallest nonzero row at each step.
pub fn zero_eto_path(u: &Sltm) -> Result<EtoSequence> {
    if !zero_class_check(u).holds() {
        return Err(Error::NotInZeroClass);
    }
    let mut current = u.clone();
    let mut steps = Vec::new();
    while let Some(r0) = (2..=current.n()).find(|&r| !current.is_zero_row(r)) {
        let c0 = leader_of(&current, r0).expect("nonzero row");
        let beta = current.entry(r0, c0).half();
        current = apply_q(&current, r0, c0, &beta)?;
        steps.push(EtoStep::q(r0, c0, beta));
    }
    let (end, seq) = apply_sequence(u, &steps)?;
    debug_assert!(end.is_zero());
    Ok(seq)
}

fn require_size(t: &Sltm, n: usize) -> Result<()> {
    if t.n() != n {
        return Err(Error::BadSize {
            expected: n,
            got: t.n(),
        });
    }
    Ok(())
}

/// The isomorphism `A(T) -> A(S)` between any two size-2 matrices.
pub fn classify_n2(t: &Sltm, s: &Sltm) -> Result<Morphism> {
    require_size(t, 2)?;
    require_size(s, 2)?;
    if s.field() != t.field() {
        return Err(Error::FieldMismatch);
    }
    let field = t.field();
    let mut gamma = Matrix::identity(2, field);
    gamma.set(1, 2, (t.entry(2, 1) - s.entry(2, 1)).half());
    Morphism::new(t.clone(), s.clone(), gamma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum N3Class {
    ZeroClass,
    B32Class,
}

#[derive(Clone, Debug)]
pub struct N3Classification {
    pub class: N3Class,
    /// `A(U) -> A(representative)`.
    pub certificate: Morphism,
}

pub fn classify_n3(u: &Sltm) -> Result<N3Classification> {
    require_size(u, 3)?;
    let field = u.field();
    let (u21, u31, u32) = (u.get(2, 1), u.get(3, 1), u.get(3, 2));
    let two = field.from_i64(2);
    let delta = &two * &u31 + &u32 * &u21;
    if !u32.is_zero() && !delta.is_zero() {
        let gamma = Matrix::from_rows(
            field,
            vec![
                vec![&two / &delta, &u21 / &delta, field.zero()],
                vec![field.zero(), u32.inv()?, field.zero()],
                vec![field.zero(), field.zero(), field.one()],
            ],
        )?;
        let rep = Sltm::b_matrix(3, 2, field)?;
        return Ok(N3Classification {
            class: N3Class::B32Class,
            certificate: Morphism::new(u.clone(), rep, gamma)?,
        });
    }
    let mut gamma = Matrix::identity(3, field);
    gamma.set(1, 2, u21.half());
    if u32.is_zero() {
        gamma.set(1, 3, u31.half());
    } else {
        assert_eq!(u31, -(&u32 * &u21).half(), "Δ = 0 forces u31 = -u32·u21/2");
        gamma.set(2, 3, u32.half());
    }
    Ok(N3Classification {
        class: N3Class::ZeroClass,
        certificate: Morphism::new(u.clone(), Sltm::zero(3, field), gamma)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    /// Node budget for each pairwise search.
    pub budget: u64,
    /// Worker threads.
    pub jobs: usize,
    /// How many members to list per class.
    pub sample: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            budget: DEFAULT_BUDGET,
            jobs: 1,
            sample: 8,
        }
    }
}

/// Evidence that two matrices share a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A single admissible step taking `from` to `to`.
    Step { from: Sltm, to: Sltm, step: EtoStep },
    /// An isomorphism `A(from) -> A(to)` found by search.
    Search { from: Sltm, to: Sltm, gamma: Matrix },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub representative: Sltm,
    pub size: u64,
    pub members_sample: Vec<Sltm>,
    /// Serial indices of every member, ascending.
    pub members: Vec<u64>,
    pub certificates: Vec<Certificate>,
}

/// Two class representatives proven non-isomorphic by an exhausted search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Split {
    pub a: usize,
    pub b: usize,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusStats {
    pub matrices: u64,
    pub moves: u64,
    pub step_components: u64,
    pub searches: u64,
    pub search_merges: u64,
    pub search_nodes: u64,
    pub search_prunes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub n: usize,
    pub field: FieldSpec,
    pub class_count: usize,
    /// False when some pairwise search ran out of budget; the partition is
    /// then only an upper bound on the true class count.
    pub complete: bool,
    pub classes: Vec<ClassEntry>,
    pub splits: Vec<Split>,
    /// Class pairs whose search hit the budget.
    pub unresolved: Vec<(usize, usize)>,
    pub stats: CensusStats,
}

/// Partitions `TM_n(F_q)` into isomorphism classes.
///
/// Single admissible steps are unioned first; the surviving components are
/// then compared pairwise by exhaustive search against the classes found so
/// far, in canonical order.
pub fn census(n: usize, field: FieldSpec, opts: &CensusOptions) -> Result<ClassReport> {
    if !field.is_finite() {
        return Err(Error::InfiniteField);
    }
    let total = Sltm::count(n, field)?;
    let len = usize::try_from(total)
        .map_err(|_| Error::BadIndex(format!("TM_{n} over {field} is too large")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| Error::BadIndex(format!("thread pool: {e}")))?;
    let pair_opts = IsoSearchOptions {
        budget: opts.budget,
        jobs: 1,
    };

    let moves: Vec<Vec<(EtoStep, u64)>> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|idx| -> Result<Vec<(EtoStep, u64)>> {
                let t = Sltm::from_serial_index(n, field, idx)?;
                admissible_moves(&t)?
                    .into_iter()
                    .map(|(step, s)| Ok((step, s.serial_index()?)))
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut stats = CensusStats {
        matrices: total,
        ..CensusStats::default()
    };
    let mut dsu = Dsu::new(len);
    let mut forest: Vec<(u64, u64, EtoStep)> = Vec::new();
    for (a, list) in moves.iter().enumerate() {
        stats.moves += list.len() as u64;
        for (step, b) in list {
            if dsu.union(a, *b as usize) {
                forest.push((a as u64, *b, step.clone()));
            }
        }
    }
    // Roots are the smallest member, hence the lexicographic minimum.
    let roots: Vec<usize> = (0..len).filter(|&i| dsu.find(i) == i).collect();
    stats.step_components = roots.len() as u64;

    let mut class_roots: Vec<usize> = Vec::new();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut merges: Vec<(usize, usize, Matrix)> = Vec::new();
    let mut splits = Vec::new();
    let mut unresolved = Vec::new();
    for &root in &roots {
        let rep = Sltm::from_serial_index(n, field, root as u64)?;
        let reps: Vec<Sltm> = class_roots
            .iter()
            .map(|&c| Sltm::from_serial_index(n, field, c as u64))
            .collect::<Result<_>>()?;
        let results = pool.install(|| {
            reps.par_iter()
                .map(|c| iso_search(c, &rep, &pair_opts))
                .collect::<Result<Vec<_>>>()
        })?;
        stats.searches += results.len() as u64;
        for r in &results {
            stats.search_nodes += r.stats.nodes;
            stats.search_prunes += r.stats.prunes;
        }
        match results.iter().position(|r| r.found().is_some()) {
            Some(ci) => {
                let m = results[ci].found().expect("found");
                owner.insert(root, ci);
                merges.push((ci, root, m.gamma().clone()));
                stats.search_merges += 1;
            }
            None => {
                let idx = class_roots.len();
                for (ci, r) in results.iter().enumerate() {
                    match r.outcome {
                        IsoOutcome::Exhausted => splits.push(Split {
                            a: ci,
                            b: idx,
                            nodes: r.stats.nodes,
                        }),
                        _ => unresolved.push((ci, idx)),
                    }
                }
                owner.insert(root, idx);
                class_roots.push(root);
            }
        }
    }

    let mut classes: Vec<ClassEntry> = Vec::with_capacity(class_roots.len());
    for &c in &class_roots {
        classes.push(ClassEntry {
            representative: Sltm::from_serial_index(n, field, c as u64)?,
            size: 0,
            members_sample: Vec::new(),
            members: Vec::new(),
            certificates: Vec::new(),
        });
    }
    let class_of: Vec<usize> = (0..len).map(|i| owner[&dsu.find(i)]).collect();
    for (i, &ci) in class_of.iter().enumerate() {
        let entry = &mut classes[ci];
        entry.size += 1;
        entry.members.push(i as u64);
        if entry.members_sample.len() < opts.sample {
            entry.members_sample.push(Sltm::from_serial_index(n, field, i as u64)?);
        }
    }
    for (a, b, step) in forest {
        classes[class_of[a as usize]].certificates.push(Certificate::Step {
            from: Sltm::from_serial_index(n, field, a)?,
            to: Sltm::from_serial_index(n, field, b)?,
            step,
        });
    }
    for (ci, root, gamma) in merges {
        let from = classes[ci].representative.clone();
        classes[ci].certificates.push(Certificate::Search {
            from,
            to: Sltm::from_serial_index(n, field, root as u64)?,
            gamma,
        });
    }

    Ok(ClassReport {
        n,
        field,
        class_count: classes.len(),
        complete: unresolved.is_empty(),
        classes,
        splits,
        unresolved,
        stats,
    })
}

impl ClassReport {
    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn from_json_value(value: &Value) -> Result<ClassReport> {
        let bad = |what: &str| Error::parse(1, 1, format!("class report: bad or missing `{what}`"));
        let obj = value.as_object().ok_or_else(|| bad("object"))?;
        let get = |key: &str| obj.get(key).ok_or_else(|| bad(key));
        let usize_of = |v: &Value, what: &str| -> Result<usize> {
            v.as_u64().map(|x| x as usize).ok_or_else(|| bad(what))
        };
        let array_of = |v: &'_ Value, what: &str| -> Result<Vec<Value>> {
            v.as_array().cloned().ok_or_else(|| bad(what))
        };
        let n = usize_of(get("n")?, "n")?;
        let field: FieldSpec = get("field")?.as_str().ok_or_else(|| bad("field"))?.parse()?;
        let mut classes = Vec::new();
        for c in array_of(get("classes")?, "classes")? {
            let c = c.as_object().ok_or_else(|| bad("class"))?;
            let cget = |key: &str| c.get(key).ok_or_else(|| bad(key));
            let mut certificates = Vec::new();
            for cert in array_of(cget("certificates")?, "certificates")? {
                let from = Sltm::from_json_value(&cert["from"])?;
                let to = Sltm::from_json_value(&cert["to"])?;
                certificates.push(match cert["kind"].as_str() {
                    Some("step") => Certificate::Step {
                        from,
                        to,
                        step: EtoStep::from_json_value(field, &cert["step"])?,
                    },
                    Some("search") => Certificate::Search {
                        from,
                        to,
                        gamma: Matrix::from_json_value(field, &cert["gamma"])?,
                    },
                    _ => return Err(bad("kind")),
                });
            }
            classes.push(ClassEntry {
                representative: Sltm::from_json_value(cget("representative")?)?,
                size: cget("size")?.as_u64().ok_or_else(|| bad("size"))?,
                members_sample: array_of(cget("members_sample")?, "members_sample")?
                    .iter()
                    .map(Sltm::from_json_value)
                    .collect::<Result<_>>()?,
                members: array_of(cget("members")?, "members")?
                    .iter()
                    .map(|v| v.as_u64().ok_or_else(|| bad("members")))
                    .collect::<Result<_>>()?,
                certificates,
            });
        }
        let splits = array_of(get("splits")?, "splits")?
            .iter()
            .map(|s| {
                Ok(Split {
                    a: usize_of(&s["a"], "a")?,
                    b: usize_of(&s["b"], "b")?,
                    nodes: s["nodes"].as_u64().ok_or_else(|| bad("nodes"))?,
                })
            })
            .collect::<Result<_>>()?;
        let unresolved = array_of(get("unresolved")?, "unresolved")?
            .iter()
            .map(|p| Ok((usize_of(&p[0], "unresolved")?, usize_of(&p[1], "unresolved")?)))
            .collect::<Result<_>>()?;
        let s = get("stats")?;
        let num = |key: &str| s[key].as_u64().ok_or_else(|| bad(key));
        let stats = CensusStats {
            matrices: num("matrices")?,
            moves: num("moves")?,
            step_components: num("step_components")?,
            searches: num("searches")?,
            search_merges: num("search_merges")?,
            search_nodes: num("search_nodes")?,
            search_prunes: num("search_prunes")?,
        };
        Ok(ClassReport {
            n,
            field,
            class_count: usize_of(get("class_count")?, "class_count")?,
            complete: get("complete")?.as_bool().ok_or_else(|| bad("complete"))?,
            classes,
            splits,
            unresolved,
            stats,
        })
    }

    /// One line per class: index, size and compact representative.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "n={} field={} classes={}{}\n",
            self.n,
            self.field,
            self.class_count,
            if self.complete { "" } else { " (incomplete)" }
        );
        out.push_str("class  size  representative\n");
        for (i, c) in self.classes.iter().enumerate() {
            out.push_str(&format!("{:>5}  {:>4}  {}\n", i, c.size, c.representative.to_compact()));
        }
        out
    }
}

/// `B_{n,1}, ..., B_{n,n-1}` once each pair has been proven non-isomorphic
/// by exhaustion and `B_{n,1}` has been placed in the zero class.
#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundWitnesses {
    pub witnesses: Vec<Sltm>,
    /// `(l, m, nodes)` for each exhausted pair.
    pub exhausted: Vec<(usize, usize, u64)>,
}

pub fn lower_bound_witnesses(
    n: usize,
    field: FieldSpec,
    opts: &IsoSearchOptions,
) -> Result<LowerBoundWitnesses> {
    if !field.is_finite() {
        return Err(Error::InfiniteField);
    }
    if n < 2 {
        return Err(Error::BadIndex(format!("lower-bound witnesses need n >= 2, got {n}")));
    }
    let witnesses: Vec<Sltm> = (1..n)
        .map(|l| Sltm::b_matrix(n, l, field))
        .collect::<Result<_>>()?;
    if !zero_class_check(&witnesses[0]).holds() {
        return Err(Error::NotInZeroClass);
    }
    let mut exhausted = Vec::new();
    for l in 1..n {
        for m in l + 1..n {
            let r = iso_search(&witnesses[l - 1], &witnesses[m - 1], opts)?;
            match r.outcome {
                IsoOutcome::Exhausted => exhausted.push((l, m, r.stats.nodes)),
                IsoOutcome::BudgetExceeded => return Err(Error::BudgetExceeded(opts.budget)),
                IsoOutcome::Found(_) => {
                    return Err(Error::BadIndex(format!(
                        "B_({n},{l}) and B_({n},{m}) are isomorphic over {field}"
                    )))
                }
            }
        }
    }
    Ok(LowerBoundWitnesses {
        witnesses,
        exhausted,
    })
}
