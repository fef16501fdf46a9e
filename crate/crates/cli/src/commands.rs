use std::fmt::Write as _;
use std::fs;

use niltri_core::classify::{
    census, classify_n2, classify_n3, leader_graph, lower_bound_witnesses, zero_class_certificate,
    zero_class_check, zero_eto_path, CensusOptions, ZeroClassVerdict,
};
use niltri_core::eto::{admissible_moves, format_steps};
use niltri_core::hom::key_eq_violation;
use niltri_core::{
    apply_sequence, direct_hom_check, eto_equiv_search, iso_search, Algebra, Element, IsoOutcome,
    IsoSearchOptions, Morphism, Sltm,
};
use serde_json::json;

use crate::{input, CliError, Command, EtoAction, Format, One, Pair, Report, Search, Verdict};

type Run = Result<Report, CliError>;

pub fn run(cmd: Command) -> (Run, Format) {
    match cmd {
        Command::Mul { input, a, b, out } => (mul(&input, &a, &b), out.format),
        Command::CheckHom {
            pair,
            gamma,
            gamma_matrix,
            out,
        } => (
            check_hom(&pair, gamma.as_deref(), gamma_matrix.as_deref()),
            out.format,
        ),
        Command::IsoSearch { pair, search, out } => (iso(&pair, &search), out.format),
        Command::Eto { action } => match action {
            EtoAction::Apply {
                input,
                steps_file,
                steps,
                out,
            } => (
                eto_apply(&input, steps_file.as_deref(), steps.as_deref()),
                out.format,
            ),
            EtoAction::Search { pair, depth, out } => (eto_search(&pair, depth), out.format),
            EtoAction::Random {
                input,
                length,
                seed,
                out,
            } => (eto_random(&input, length, seed), out.format),
        },
        Command::ZeroClass { input, out } => (zero_class(&input), out.format),
        Command::Classify { input, out } => (classify(&input), out.format),
        Command::Census {
            n,
            field,
            search,
            sample,
            out_file,
            out,
        } => (
            run_census(n, field, &search, sample, out_file.as_deref()),
            out.format,
        ),
        Command::Leaders { input, edges, out } => (leaders(&input, edges), out.format),
        Command::LowerBound {
            n,
            field,
            search,
            out,
        } => (lower_bound(n, field, &search), out.format),
    }
}

fn one(input: &One) -> Result<Sltm, CliError> {
    input::sltm(input.path.as_deref(), input.matrix.as_deref(), "matrix", input.field)
}

fn pair(p: &Pair) -> Result<(Sltm, Sltm), CliError> {
    let t = input::sltm(p.t.as_deref(), p.t_matrix.as_deref(), "T", p.field)?;
    let s = input::sltm(p.s.as_deref(), p.s_matrix.as_deref(), "S", p.field)?;
    if s.field() != t.field() {
        return Err(CliError::Usage(format!(
            "T is over {} but S is over {}",
            t.field(),
            s.field()
        )));
    }
    Ok((t, s))
}

fn options(search: &Search) -> IsoSearchOptions {
    IsoSearchOptions {
        budget: search.budget,
        jobs: search.jobs.max(1),
    }
}

fn mul(input: &One, a: &str, b: &str) -> Run {
    let t = one(input)?;
    let alg = Algebra::new(t)?;
    let x = Element::parse(&alg, a)?;
    let y = Element::parse(&alg, b)?;
    let p = x.checked_mul(&y)?;
    Ok(Report {
        json: json!({ "a": x.to_string(), "b": y.to_string(), "product": p.to_string() }),
        text: format!("{p}\n"),
        verdict: Verdict::Positive,
    })
}

fn check_hom(p: &Pair, gamma: Option<&std::path::Path>, inline: Option<&str>) -> Run {
    let (t, s) = pair(p)?;
    let g = input::gamma(gamma, inline, t.field())?;
    let violation = key_eq_violation(&t, &s, &g)?;
    let direct = direct_hom_check(&t, &s, &g)?;
    let m = Morphism::new(t, s, g)?;
    let v = m.verification();
    debug_assert_eq!(v.hom, direct);
    let mut text = format!("hom: {}\niso: {}\n", v.hom, v.iso);
    if let Some(k) = &violation {
        let _ = writeln!(text, "key equation fails at (r,i,k) = ({},{},{})", k.r, k.i, k.k);
    }
    Ok(Report {
        json: json!({
            "hom": v.hom,
            "iso": v.iso,
            "direct": direct,
            "violation": violation.map(|k| json!({ "r": k.r, "i": k.i, "k": k.k })),
        }),
        text,
        verdict: Verdict::from_bool(v.hom),
    })
}

fn iso(p: &Pair, search: &Search) -> Run {
    let (t, s) = pair(p)?;
    let r = iso_search(&t, &s, &options(search))?;
    let stats = json!({ "nodes": r.stats.nodes, "prunes": r.stats.prunes });
    let (verdict, name, morphism) = match &r.outcome {
        IsoOutcome::Found(m) => (Verdict::Positive, "found", Some(m)),
        IsoOutcome::Exhausted => (Verdict::Negative, "exhausted", None),
        IsoOutcome::BudgetExceeded => (Verdict::Undecided, "budget_exceeded", None),
    };
    let mut text = format!("{name} (nodes {}, prunes {})\n", r.stats.nodes, r.stats.prunes);
    if let Some(m) = morphism {
        text.push_str(&m.gamma().to_text());
    }
    Ok(Report {
        json: json!({ "outcome": name, "morphism": morphism, "stats": stats }),
        text,
        verdict,
    })
}

fn eto_apply(input: &One, steps_file: Option<&std::path::Path>, steps: Option<&str>) -> Run {
    let t = one(input)?;
    let steps = input::steps(steps_file, steps, t.field())?;
    let (end, seq) = apply_sequence(&t, &steps)?;
    let m = Morphism::new(t, end.clone(), seq.gamma.clone())?;
    Ok(Report {
        json: json!({ "result": end, "sequence": seq, "verified": m.verification() }),
        text: format!(
            "{}gamma:\n{}iso: {}\n",
            end.to_text(),
            seq.gamma.to_text(),
            m.is_iso()
        ),
        verdict: Verdict::from_bool(m.is_iso()),
    })
}

fn eto_search(p: &Pair, depth: usize) -> Run {
    let (t, s) = pair(p)?;
    let r = eto_equiv_search(&t, &s, depth)?;
    let text = match &r.path {
        Some(path) if path.is_empty() => "equal\n".to_string(),
        Some(path) => format!("{}\n", format_steps(path)),
        None => format!("no path within {depth} steps ({} matrices visited)\n", r.visited),
    };
    Ok(Report {
        json: json!({ "steps": r.path, "visited": r.visited, "depth": depth }),
        text,
        verdict: Verdict::from_bool(r.path.is_some()),
    })
}

fn eto_random(input: &One, length: usize, seed: u64) -> Run {
    use rand::{Rng, SeedableRng};
    let t = one(input)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut cur = t.clone();
    let mut steps = Vec::with_capacity(length);
    for _ in 0..length {
        let moves = admissible_moves(&cur)?;
        if moves.is_empty() {
            break;
        }
        let (step, next) = moves[rng.gen_range(0..moves.len())].clone();
        steps.push(step);
        cur = next;
    }
    let (end, seq) = apply_sequence(&t, &steps)?;
    Ok(Report {
        json: json!({ "seed": seed, "steps": steps, "result": end, "gamma": seq.gamma }),
        text: format!("{}\n{}", format_steps(&steps), end.to_text()),
        verdict: Verdict::Positive,
    })
}

fn zero_class(input: &One) -> Run {
    let u = one(input)?;
    let verdict = zero_class_check(&u);
    match verdict {
        ZeroClassVerdict::Holds(cond) => {
            let cert = zero_class_certificate(&u)?;
            let path = zero_eto_path(&u)?;
            let mut text = format!("in zero class: true ({})\n", condition_name(cond));
            text.push_str("certificate A(0) -> A(U):\n");
            for k in 1..=u.n() {
                let _ = writeln!(text, "  X{k} -> {}", image(&cert, k));
            }
            let _ = writeln!(text, "path: {}", format_steps(&path.steps));
            Ok(Report {
                json: json!({
                    "zero_class": true,
                    "condition": cond,
                    "certificate": cert,
                    "path": path,
                }),
                text,
                verdict: Verdict::Positive,
            })
        }
        ZeroClassVerdict::Fails { i, j, k } => Ok(Report {
            json: json!({
                "zero_class": false,
                "witness": { "i": i, "j": j, "k": k },
            }),
            text: format!(
                "in zero class: false (Δ^(2) at (i,j,k) = ({i},{j},{k}) is nonzero)\n"
            ),
            verdict: Verdict::Negative,
        }),
    }
}

fn condition_name(c: niltri_core::classify::ZeroCondition) -> &'static str {
    use niltri_core::classify::ZeroCondition::*;
    match c {
        Zero => "zero matrix",
        ColumnOne => "support in column 1",
        LeaderDeltas => "Δ^(2) vanishes at every leader",
    }
}

/// `Σ γ_ik Y_i` for column `k` of the certificate.
fn image(m: &Morphism, k: usize) -> String {
    let g = m.gamma();
    let terms: Vec<String> = (1..=g.rows())
        .filter(|&i| !g.get(i, k).is_zero())
        .map(|i| format!("{}*Y{i}", g.get(i, k)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn classify(input: &One) -> Run {
    let u = one(input)?;
    let (class, m) = match u.n() {
        1 => ("zero", Morphism::identity(&u)),
        2 => ("zero", classify_n2(&u, &Sltm::zero(2, u.field()))?),
        3 => {
            let c = classify_n3(&u)?;
            let name = match c.class {
                niltri_core::classify::N3Class::ZeroClass => "zero",
                niltri_core::classify::N3Class::B32Class => "B_(3,2)",
            };
            (name, c.certificate)
        }
        _ => {
            if zero_class_check(&u).holds() {
                ("zero", zero_class_certificate(&u)?.invert()?)
            } else {
                return Ok(Report {
                    json: json!({ "class": null, "zero_class": false }),
                    text: "not in the zero class; no closed form for this size\n".into(),
                    verdict: Verdict::Negative,
                });
            }
        }
    };
    Ok(Report {
        text: format!(
            "class: {class}\nrepresentative:\n{}certificate A(U) -> A(rep):\n{}",
            m.target().to_text(),
            m.gamma().to_text()
        ),
        json: json!({ "class": class, "representative": m.target(), "certificate": m }),
        verdict: Verdict::Positive,
    })
}

fn run_census(
    n: usize,
    field: niltri_core::FieldSpec,
    search: &Search,
    sample: usize,
    out_file: Option<&std::path::Path>,
) -> Run {
    let report = census(
        n,
        field,
        &CensusOptions {
            budget: search.budget,
            jobs: search.jobs.max(1),
            sample,
        },
    )?;
    let json = report.to_json_value();
    if let Some(path) = out_file {
        fs::write(path, serde_json::to_string_pretty(&json).expect("serializable"))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    let verdict = if report.complete {
        Verdict::Positive
    } else {
        Verdict::Undecided
    };
    Ok(Report {
        text: report.summary_table(),
        json,
        verdict,
    })
}

fn leaders(input: &One, edges: bool) -> Run {
    let u = one(input)?;
    let g = leader_graph(&u);
    let text = if edges {
        g.to_edge_list()
    } else {
        let mut t = String::new();
        let arrows: Vec<String> = g.arrows.iter().map(|(k, j)| format!("({k},{j})")).collect();
        let _ = writeln!(t, "leaders: {}", arrows.join(" "));
        let _ = writeln!(t, "minimal vertices: {:?}", g.minimal_vertices);
        for c in &g.chains {
            let _ = writeln!(t, "chain ({:?}): {:?}", c.kind, c.pairs);
        }
        t
    };
    Ok(Report {
        json: serde_json::to_value(&g).expect("serializable"),
        text,
        verdict: Verdict::Positive,
    })
}

fn lower_bound(n: usize, field: niltri_core::FieldSpec, search: &Search) -> Run {
    let w = match lower_bound_witnesses(n, field, &options(search)) {
        Ok(w) => w,
        Err(niltri_core::Error::BudgetExceeded(b)) => {
            return Ok(Report {
                json: json!({ "complete": false, "budget": b }),
                text: format!("budget of {b} nodes exceeded\n"),
                verdict: Verdict::Undecided,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut text = format!("{} pairwise non-isomorphic witnesses over {field}\n", w.witnesses.len());
    for (l, m, nodes) in &w.exhausted {
        let _ = writeln!(text, "  B_({n},{l}) vs B_({n},{m}): exhausted after {nodes} nodes");
    }
    Ok(Report {
        json: json!({ "complete": true, "witnesses": w.witnesses, "exhausted": w.exhausted }),
        text,
        verdict: Verdict::Positive,
    })
}
