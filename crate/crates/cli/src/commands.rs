//! Single-instance subcommands.

use anyhow::{bail, Context, Result};
use kclab::bilinear::BilinearForm;
use kclab::boolfun::{
    approx_report, count_gap, format_assignment, trivial_weak_threshold, Distribution, TruthTable,
};
use kclab::codes::{disc_core_bound_check, iterative_extraction, DiscCoreStatus, LinearCode};
use kclab::gen::{random_code, trial_rng};
use kclab::gf2::{
    goodness_threshold, goodness_with, monte_carlo_goodness_with, Gf2Matrix, MonteCarloOptions,
};
use kclab::nnf::{self, DdnnfCircuit, NnfCircuit};
use kclab::rational::parse_rational;
use kclab::rect::{
    discrepancy, min_cover_size, strong_cover_bound, strong_pipeline_bound, tp_fp, verify_cover,
    weak_cover_bound, Cover, CoverRequirements, Rectangle,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::report::{big, rat, Report};
use crate::{
    read_file, ApproxArgs, ApproxMode, BoundArgs, BoundKind, CoreTraceArgs, CountArgs,
    CoverExtractArgs, CoverVerifyArgs, DiscArgs, GenBilinearArgs, GenCodeArgs, GenMatrixArgs,
    GoodnessArgs, Output, ValidateArgs,
};

fn config(args: &impl serde::Serialize) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn load_table(path: &std::path::Path) -> Result<TruthTable> {
    TruthTable::parse_text(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_matrix(path: &std::path::Path) -> Result<Gf2Matrix> {
    Gf2Matrix::parse_text(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_nnf(path: &std::path::Path) -> Result<NnfCircuit> {
    nnf::parse(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    serde_json::from_str(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn rational(s: &str, what: &str) -> Result<BigRational> {
    parse_rational(s).with_context(|| format!("--{what}"))
}

fn biguint(s: &str, what: &str) -> Result<BigUint> {
    s.trim()
        .parse()
        .with_context(|| format!("--{what} must be a nonnegative integer, got {s:?}"))
}

pub fn gen_matrix(a: &GenMatrixArgs) -> Result<Output> {
    Ok(Output::Text(
        Gf2Matrix::random(a.m, a.n, &mut trial_rng(a.seed, 0)).to_text(),
    ))
}

pub fn gen_code(a: &GenCodeArgs) -> Result<Output> {
    if a.m > 64 {
        bail!("--m must be at most 64");
    }
    let code = random_code(&mut trial_rng(a.seed, 0), a.m, a.n);
    Ok(Output::Text(if a.table {
        code.char_function()?.to_text()
    } else {
        code.parity_check().to_text()
    }))
}

pub fn gen_bilinear(a: &GenBilinearArgs) -> Result<Output> {
    let bf = BilinearForm::new(Gf2Matrix::random(a.n, a.n, &mut trial_rng(a.seed, 0)))?;
    Ok(Output::Text(if a.table {
        bf.function()?.to_text()
    } else {
        bf.matrix().to_text()
    }))
}

pub fn goodness(a: &GoodnessArgs) -> Result<Output> {
    let mut r = Report::new("goodness", config(a));
    match &a.matrix {
        Some(path) => {
            let h = load_matrix(path)?;
            let threshold = a.threshold.unwrap_or_else(|| goodness_threshold(h.cols()));
            let g = goodness_with(&h, threshold, a.cap)?;
            let witness_rank = h.select_columns(&g.witness_subset)?.rank();
            r.items.push(json!({
                "rows": h.rows(),
                "cols": h.cols(),
                "rank": h.rank(),
                "threshold": g.subset_threshold,
                "s_max": g.s_max,
                "witness_subset": g.witness_subset,
            }));
            r.aggregate("s_max", g.s_max);
            r.check(
                "witness subset attains the minimum rank",
                "goodness-witness",
                1,
                (witness_rank != g.s_max) as u64,
            );
        }
        None => {
            let opts = MonteCarloOptions {
                threshold: a.threshold,
                cap: a.cap,
                ..MonteCarloOptions::default()
            };
            let mc = monte_carlo_goodness_with(a.m, a.n, a.s, a.trials, a.seed, &opts)?;
            r.items.push(serde_json::to_value(mc.mode)?);
            r.aggregate("threshold", mc.threshold);
            r.aggregate("successes", mc.successes);
            r.aggregate("trials", mc.trials);
            r.aggregate("rate", rat(&mc.rate));
        }
    }
    Ok(Output::Report(r))
}

pub fn count(a: &CountArgs) -> Result<Output> {
    let mut r = Report::new("count", config(a));
    match (&a.f, &a.nnf) {
        (Some(path), _) => {
            let f = load_table(path)?;
            r.aggregate("n", f.n());
            r.aggregate("model_count", f.count_models());
        }
        (None, Some(path)) => {
            let c = load_nnf(path)?;
            let n = c.n();
            let d = if a.assume_valid {
                DdnnfCircuit::assume_valid(c)
            } else {
                DdnnfCircuit::certify(c)?
            };
            let mc = d.model_count();
            r.aggregate("n", n);
            r.aggregate("gates", d.circuit().size());
            r.aggregate("edges", d.circuit().edge_count());
            r.aggregate("model_count", big(&mc));
            // cross-check against the truth table when it fits
            if let Ok(f) = d.circuit().function() {
                let tt = BigUint::from(f.count_models());
                r.aggregate("truth_table_count", big(&tt));
                r.check(
                    "circuit count equals truth-table count",
                    "ddnnf-model-count",
                    1,
                    (tt != mc) as u64,
                );
            }
        }
        (None, None) => bail!("one of --f or --nnf is required"),
    }
    Ok(Output::Report(r))
}

pub fn validate(a: &ValidateArgs) -> Result<Output> {
    let c = load_nnf(&a.nnf)?;
    let v = nnf::validate(&c);
    let mut r = Report::new("validate", config(a));
    r.aggregate("n", c.n());
    r.aggregate("gates", c.size());
    r.aggregate("edges", c.edge_count());
    r.items.push(serde_json::to_value(&v)?);
    r.check(
        "AND children mention disjoint variables",
        "decomposability",
        1,
        !v.is_decomposable as u64,
    );
    if v.is_deterministic.is_none() {
        bail!(
            "determinism not decidable: {} variables exceed the truth-table cap",
            c.n()
        );
    }
    r.check(
        "OR children accept disjoint assignments",
        "determinism",
        1,
        (v.is_deterministic != Some(true)) as u64,
    );
    Ok(Output::Report(r))
}

pub fn approx(a: &ApproxArgs) -> Result<Output> {
    let f = load_table(&a.f)?;
    let g = load_table(&a.g)?;
    let dist = match &a.product {
        None => Distribution::Uniform,
        Some(ps) => Distribution::product(
            ps.iter()
                .map(|p| rational(p, "product"))
                .collect::<Result<_>>()?,
        )?,
    };
    let rep = approx_report(&f, &g, &dist)?;
    let mut r = Report::new("approx", config(a));
    r.aggregate("n", f.n());
    r.aggregate("count_f", f.count_models());
    r.aggregate("count_g", g.count_models());
    r.aggregate("count_gap", big(&count_gap(&f, &g)));
    r.aggregate("error_prob", rat(&rep.error_prob));
    r.aggregate("model_prob", rat(&rep.model_prob));
    if a.mode != ApproxMode::Strong {
        r.aggregate("weak_eps", rat(&rep.weak_eps));
    }
    if a.mode != ApproxMode::Weak {
        match &rep.strong_eps {
            Some(s) => r.aggregate("strong_eps", rat(s)),
            None if a.mode == ApproxMode::Strong => {
                bail!("strong approximation is undefined when f has no models")
            }
            None => r.aggregate("strong_eps", Value::Null),
        }
    }
    if let Some(e) = &a.eps {
        let eps = rational(e, "eps")?;
        if a.mode != ApproxMode::Strong {
            r.check(
                "weak error within eps",
                "weak-approximation",
                1,
                (rep.weak_eps > eps) as u64,
            );
        }
        if a.mode != ApproxMode::Weak {
            if let Some(s) = &rep.strong_eps {
                r.check(
                    "strong error within eps",
                    "strong-approximation",
                    1,
                    (*s > eps) as u64,
                );
            }
        }
    }
    Ok(Output::Report(r))
}

pub fn disc(a: &DiscArgs) -> Result<Output> {
    let f = load_table(&a.f)?;
    let rect: Rectangle = load_json(&a.rect)?;
    let (tp, fp) = tp_fp(&f, &rect)?;
    let d = discrepancy(&f, &rect)?;
    let mut r = Report::new("disc", config(a));
    r.aggregate("n", f.n());
    r.aggregate("rectangle_size", rect.size());
    r.aggregate("balanced", rect.is_balanced());
    r.aggregate("true_positives", tp);
    r.aggregate("false_positives", fp);
    r.aggregate("disc", rat(&d.value()));
    Ok(Output::Report(r))
}

pub fn core_trace(a: &CoreTraceArgs) -> Result<Output> {
    let code = LinearCode::new(load_matrix(&a.code)?)?;
    let rect: Rectangle = load_json(&a.rect)?;
    let f = code.char_function()?;
    let trace = iterative_extraction(&code, rect.partition(), &rect)?;
    let v = trace.verify(&f, &rect)?;
    let dc = disc_core_bound_check(&code, &rect)?;
    let mut r = Report::new("core-trace", config(a));
    for (i, s) in trace.steps.iter().enumerate() {
        r.items.push(json!({
            "step": i + 1,
            "a": s.a,
            "b": s.b,
            "core_size": s.a.len() * s.b.len(),
            "false_positives": s.f.iter().map(|&x| format_assignment(x, code.n())).collect::<Vec<_>>(),
        }));
    }
    r.aggregate("steps", trace.l);
    r.aggregate("true_positives", dc.tp);
    r.aggregate("false_positives", dc.fp);
    r.aggregate("disc", rat(&dc.disc.value()));
    r.aggregate("core_size", dc.core_size);
    r.aggregate("witness", v.witness.map(|x| format_assignment(x, code.n())));
    r.check(
        "each F_i consists of false positives",
        "core-false-positives",
        1,
        !v.f_false_positives as u64,
    );
    r.check(
        "the F_i are pairwise disjoint",
        "core-sets-disjoint",
        1,
        !v.f_pairwise_disjoint as u64,
    );
    r.check(
        "cores partition the models of r and f",
        "core-union-exact",
        1,
        !v.cores_cover_exactly as u64,
    );
    r.check(
        "core sizes are non-increasing",
        "core-sizes-monotone",
        1,
        !v.sizes_nonincreasing as u64,
    );
    match dc.status {
        DiscCoreStatus::PreconditionFailed => r.aggregate("disc_core_precondition", false),
        s => {
            r.aggregate("disc_core_precondition", true);
            r.check(
                "Disc(f, r) <= |core| / 2^n",
                "more true positives than false positives",
                1,
                (s == DiscCoreStatus::Violated) as u64,
            );
        }
    }
    Ok(Output::Report(r))
}

pub fn cover_extract(a: &CoverExtractArgs) -> Result<Output> {
    let c = load_nnf(&a.nnf)?;
    let d = if a.assume_valid {
        DdnnfCircuit::assume_valid(c)
    } else {
        DdnnfCircuit::certify(c)?
    };
    let ex = nnf::extract_cover(&d)?;
    let f = d.circuit().function()?;
    let rep = verify_cover(&f, &ex.cover, CoverRequirements::DISJOINT_BALANCED);
    if let Some(p) = &a.cover_out {
        let text = serde_json::to_string_pretty(&ex.cover)? + "\n";
        std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let mut r = Report::new("cover-extract", config(a));
    for (rect, g) in ex.cover.rectangles.iter().zip(&ex.stop_gates) {
        r.items.push(json!({
            "stop_gate": g,
            "left_vars": rect.partition().left(),
            "size": rect.size(),
        }));
    }
    r.aggregate("n", f.n());
    r.aggregate("model_count", f.count_models());
    r.aggregate("gate_count", ex.gate_count);
    r.aggregate("normalized_gate_count", ex.normalized_gate_count);
    r.aggregate("rectangles", ex.cover.size());
    r.check(
        "cover is equivalent to the circuit",
        "cover-equivalent",
        1,
        !rep.equivalent as u64,
    );
    r.check(
        "rectangles are pairwise disjoint",
        "cover-disjoint",
        1,
        !rep.disjoint as u64,
    );
    r.check(
        "rectangles are balanced",
        "cover-balanced",
        1,
        !rep.balanced as u64,
    );
    r.check(
        "rectangle count at most normalized gate count",
        "cover-size-vs-circuit-size",
        1,
        (ex.cover.size() > ex.normalized_gate_count) as u64,
    );
    Ok(Output::Report(r))
}

pub fn cover_verify(a: &CoverVerifyArgs) -> Result<Output> {
    let f = load_table(&a.f)?;
    let cover: Cover = load_json(&a.cover)?;
    let req = CoverRequirements {
        disjoint: !a.allow_overlap,
        balanced: !a.allow_unbalanced,
    };
    let rep = verify_cover(&f, &cover, req);
    let mut r = Report::new("cover-verify", config(a));
    r.aggregate("rectangles", rep.size);
    r.aggregate("equivalent", rep.equivalent);
    r.aggregate("disjoint", rep.disjoint);
    r.aggregate("balanced", rep.balanced);
    for fail in &rep.failures {
        r.items.push(serde_json::to_value(fail)?);
    }
    r.check(
        "cover is equivalent to f",
        "cover-equivalent",
        1,
        !rep.equivalent as u64,
    );
    if req.disjoint {
        r.check(
            "rectangles are pairwise disjoint",
            "cover-disjoint",
            1,
            !rep.disjoint as u64,
        );
    }
    if req.balanced {
        r.check(
            "rectangles are balanced",
            "cover-balanced",
            1,
            !rep.balanced as u64,
        );
    }
    Ok(Output::Report(r))
}

pub fn bound(a: &BoundArgs) -> Result<Output> {
    let eps = rational(&a.eps, "eps")?;
    let mut r = Report::new("bound", config(a));
    let need = |o: &Option<String>, what: &str| -> Result<String> {
        o.clone()
            .with_context(|| format!("--{what} is required for this kind"))
    };
    let value = match a.kind {
        BoundKind::Weak | BoundKind::Strong => {
            let mc = biguint(&need(&a.model_count, "model-count")?, "model-count")?;
            let delta = biguint(&need(&a.delta, "delta")?, "delta")?;
            if a.kind == BoundKind::Weak {
                let n = a.n.context("--n is required for this kind")?;
                weak_cover_bound(&mc, n, &eps, &delta)?
            } else {
                strong_cover_bound(&mc, &eps, &delta)?
            }
        }
        BoundKind::Pipeline => {
            let mc = biguint(&need(&a.model_count, "model-count")?, "model-count")?;
            let n = a.n.context("--n is required for this kind")?;
            let m = a.m.context("--m is required for this kind")?;
            strong_pipeline_bound(&mc, n, m, &eps)?
        }
        BoundKind::Trivial => {
            let alpha = rational(&need(&a.alpha, "alpha")?, "alpha")?;
            let n0 = trivial_weak_threshold(&alpha, &eps)?;
            r.aggregate("n0", n0);
            return Ok(Output::Report(r));
        }
    };
    r.aggregate("bound", rat(&value));
    r.aggregate("min_cover_size", big(&min_cover_size(&value)));
    r.aggregate("nonpositive", !(value > BigRational::zero()));
    Ok(Output::Report(r))
}
