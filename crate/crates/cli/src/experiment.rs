//! Seeded experiment suites.
//!
//! Trial `t` draws everything from `trial_rng(seed, t)`, and trials are
//! collected in index order, so a report does not depend on `--jobs`.

use anyhow::{bail, ensure, Context, Result};
use kclab::bilinear::{
    bilinear_model_count, discrepancy_bound_checks, random_block_rectangle, rank_disc_check,
    BilinearForm,
};
use kclab::codes::{disc_core_bound_check, iterative_extraction, DiscCoreStatus, LinearCode};
use kclab::gen::{
    random_balanced_partition, random_code, random_rectangle, random_truth_table, trial_rng,
};
use kclab::gf2::{goodness, monte_carlo_goodness, Gf2Matrix};
use kclab::nnf::{extract_cover, from_truth_table, random_ddnnf, DdnnfCircuit};
use kclab::rational::{parse_rational, ratio};
use kclab::rect::{strong_cover_bound, verify_cover, CoverRequirements, Rectangle};
use kclab::Error;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::report::{big, rat, Report};
use crate::{CircuitSource, ExperimentArgs, Suite};

/// Runs `f` for every trial index in parallel, keeping index order.
fn par_trials<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..trials).into_par_iter().map(f).collect()
}

fn failures<T>(xs: &[T], ok: impl Fn(&T) -> bool) -> u64 {
    xs.iter().filter(|x| !ok(x)).count() as u64
}

pub fn run(a: &ExperimentArgs) -> Result<Report> {
    ensure!(a.trials > 0, "--trials must be positive");
    let (n, m) = match a.suite {
        Suite::GoodMatrices => (a.n.unwrap_or(3), a.m.unwrap_or(2)),
        Suite::MaxRectangle => (a.n.unwrap_or(8), a.m.unwrap_or(3)),
        Suite::CoreClaims | Suite::DiscCore => (a.n.unwrap_or(8), a.m.unwrap_or(3)),
        Suite::BilinearCount | Suite::BilinearDisc => (a.n.unwrap_or(3), 0),
        Suite::CoverTheorem => (a.n.unwrap_or(7), 0),
    };
    let mut config = serde_json::to_value(a)?;
    config["n"] = json!(n);
    config["m"] = json!(m);
    let mut r = Report::new("experiment", config);
    match a.suite {
        Suite::GoodMatrices => good_matrices(&mut r, a, m, n)?,
        Suite::MaxRectangle => max_rectangle(&mut r, a, m, n)?,
        Suite::CoreClaims => core_claims(&mut r, a, m, n)?,
        Suite::DiscCore => disc_core(&mut r, a, m, n)?,
        Suite::BilinearCount => bilinear_count(&mut r, a, n)?,
        Suite::BilinearDisc => bilinear_disc(&mut r, a, n)?,
        Suite::CoverTheorem => cover_theorem(&mut r, a, n)?,
    }
    Ok(r)
}

/// Largest `m * n` enumerated exhaustively by `good-matrices`.
const EXHAUSTIVE_ENTRIES: usize = 20;

fn good_matrices(r: &mut Report, a: &ExperimentArgs, m: usize, n: usize) -> Result<()> {
    ensure!(m >= 1 && n >= 1, "good-matrices needs m, n >= 1");
    // histogram of exact goodness over all 2^(mn) matrices, when small enough
    let exact: Option<Vec<u64>> = if m * n <= EXHAUSTIVE_ENTRIES {
        let hist = (0..1u64 << (m * n))
            .into_par_iter()
            .map(|bits| {
                let mut h = Gf2Matrix::zeros(m, n);
                for k in 0..m * n {
                    h.set(k / n, k % n, bits >> k & 1 == 1);
                }
                goodness(&h).map(|g| g.s_max)
            })
            .try_fold(
                || vec![0u64; m + 1],
                |mut acc, s| {
                    acc[s?] += 1;
                    Ok::<_, Error>(acc)
                },
            )
            .try_reduce(
                || vec![0u64; m + 1],
                |mut x, y| {
                    x.iter_mut().zip(&y).for_each(|(a, b)| *a += b);
                    Ok(x)
                },
            )?;
        Some(hist)
    } else {
        None
    };
    let total = 1u64.checked_shl((m * n) as u32).unwrap_or(0);
    let mut successes = Vec::new();
    let mut off = 0u64;
    let mut cases = 0u64;
    for s in 0..=m {
        let mc = monte_carlo_goodness(m, n, s, a.trials, a.seed)?;
        let mut item = json!({
            "s": s,
            "successes": mc.successes,
            "rate": rat(&mc.rate),
        });
        if let Some(h) = &exact {
            let good: u64 = h[s..].iter().sum();
            let p = good as f64 / total as f64;
            // four standard deviations plus one trial of slack
            let tol = 4.0 * (p * (1.0 - p) / a.trials as f64).sqrt() + 1.0 / a.trials as f64;
            let dev = (mc.successes as f64 / a.trials as f64 - p).abs();
            item["exact_fraction"] = rat(&ratio(good, total));
            item["tolerance"] = json!(tol);
            cases += 1;
            off += (dev > tol) as u64;
        }
        successes.push(mc.successes);
        r.items.push(item);
    }
    r.aggregate("threshold", kclab::gf2::goodness_threshold(n));
    r.aggregate("exhaustive", exact.is_some());
    let increases = successes.windows(2).filter(|w| w[1] > w[0]).count() as u64;
    r.check(
        "s-good count is non-increasing in s",
        "s-good-monotone",
        successes.len().saturating_sub(1) as u64,
        increases,
    );
    if exact.is_some() {
        r.check(
            "Monte-Carlo rate within four standard deviations of the exact fraction",
            "s-good fraction",
            cases,
            off,
        );
    }
    Ok(())
}

fn max_rectangle(r: &mut Report, a: &ExperimentArgs, m: usize, n: usize) -> Result<()> {
    ensure!(
        (2..=kclab::rect::MAX_RECTANGLE_CAP).contains(&n),
        "max-rectangle needs 2 <= n <= {}",
        kclab::rect::MAX_RECTANGLE_CAP
    );
    let rows = par_trials(a.trials, |t| {
        let code = random_code(&mut trial_rng(a.seed, t), m, n);
        let s = goodness(code.parity_check())?.s_max;
        let rep = kclab::rect::max_code_rectangle_check(&code, s)?;
        Ok((code.rank(), rep))
    })?;
    for (t, (rank, rep)) in rows.iter().enumerate() {
        r.items.push(json!({
            "trial": t,
            "rank": rank,
            "s": rep.s,
            "max_log2": rep.max_log2,
            "bound_log2": rep.bound_log2,
            "worst_left": rep.worst_left,
            "holds": rep.holds,
        }));
    }
    let tight = rows
        .iter()
        .filter(|(_, x)| x.max_log2 as i64 == x.bound_log2)
        .count();
    r.aggregate("tight", tight);
    r.aggregate(
        "balanced_partitions",
        rows.first().map_or(0, |x| x.1.balanced_partitions),
    );
    r.check(
        "largest balanced rectangle inside the code is at most 2^(n-2s)",
        "|r^-1(1)| <= 2^(n-2s)",
        a.trials,
        failures(&rows, |x| x.1.holds),
    );
    Ok(())
}

fn code_instance(a: &ExperimentArgs, t: u64, m: usize, n: usize) -> (LinearCode, Rectangle) {
    let mut rng = trial_rng(a.seed, t);
    let code = random_code(&mut rng, m, n);
    let p = random_balanced_partition(&mut rng, n);
    let rect = random_rectangle(&mut rng, p);
    (code, rect)
}

fn core_claims(r: &mut Report, a: &ExperimentArgs, m: usize, n: usize) -> Result<()> {
    ensure!(n >= 2, "core-claims needs n >= 2");
    let rows = par_trials(a.trials, |t| {
        let (code, rect) = code_instance(a, t, m, n);
        let trace = iterative_extraction(&code, rect.partition(), &rect)?;
        let v = trace.verify(&code.char_function()?, &rect)?;
        let sizes: Vec<usize> = trace.steps.iter().map(|s| s.a.len() * s.b.len()).collect();
        Ok((sizes, v))
    })?;
    for (t, (sizes, v)) in rows.iter().enumerate() {
        r.items
            .push(json!({ "trial": t, "steps": sizes.len(), "core_sizes": sizes, "ok": v.ok }));
    }
    r.aggregate(
        "max_steps",
        rows.iter().map(|x| x.0.len()).max().unwrap_or(0),
    );
    r.check(
        "each F_i consists of false positives",
        "core-false-positives",
        a.trials,
        failures(&rows, |x| x.1.f_false_positives),
    );
    r.check(
        "the F_i are pairwise disjoint",
        "core-sets-disjoint",
        a.trials,
        failures(&rows, |x| x.1.f_pairwise_disjoint),
    );
    r.check(
        "cores partition the models of r and f",
        "core-union-exact",
        a.trials,
        failures(&rows, |x| x.1.cores_cover_exactly),
    );
    r.check(
        "core sizes are non-increasing",
        "core-sizes-monotone",
        a.trials,
        failures(&rows, |x| x.1.sizes_nonincreasing),
    );
    Ok(())
}

/// Rectangle whose sides are drawn mostly from one syndrome bucket, so that
/// true positives are common; each side also gets up to two random extras.
fn planted_instance(
    a: &ExperimentArgs,
    t: u64,
    m: usize,
    n: usize,
) -> Result<(LinearCode, Rectangle)> {
    let mut rng = trial_rng(a.seed, t);
    let code = random_code(&mut rng, m, n);
    let p = random_balanced_partition(&mut rng, n);
    let (kl, kr) = (p.left().len(), p.right().len());
    let w = code.syndrome(p.join(rng.random_range(0..1u64 << kl), 0));
    let pick = |rng: &mut rand_chacha::ChaCha8Rng, width: usize, side: &dyn Fn(u64) -> u64| {
        let mut set: Vec<u64> = (0..1u64 << width)
            .filter(|&v| side(v) == w && rng.random_bool(0.5))
            .collect();
        for _ in 0..rng.random_range(0..=2) {
            set.push(rng.random_range(0..1u64 << width));
        }
        set
    };
    let left = pick(&mut rng, kl, &|v| code.syndrome(p.join(v, 0)));
    let right = pick(&mut rng, kr, &|v| code.syndrome(p.join(0, v)));
    let rect = Rectangle::new(p, left, right)?;
    Ok((code, rect))
}

fn disc_core(r: &mut Report, a: &ExperimentArgs, m: usize, n: usize) -> Result<()> {
    ensure!((2..=20).contains(&n), "disc-core needs 2 <= n <= 20");
    let rows = par_trials(a.trials, |t| {
        let (code, rect) = planted_instance(a, t, m, n)?;
        Ok(disc_core_bound_check(&code, &rect)?)
    })?;
    for (t, d) in rows.iter().enumerate() {
        r.items.push(json!({
            "trial": t,
            "tp": d.tp,
            "fp": d.fp,
            "disc": rat(&d.disc.value()),
            "core_size": d.core_size,
            "status": serde_json::to_value(d.status)?,
        }));
    }
    let applicable: Vec<_> = rows
        .iter()
        .filter(|d| d.status != DiscCoreStatus::PreconditionFailed)
        .collect();
    r.aggregate("precondition_failed", rows.len() - applicable.len());
    r.check(
        "Disc(f, r) <= |core| / 2^n",
        "more true positives than false positives",
        applicable.len() as u64,
        failures(&applicable, |d| d.status == DiscCoreStatus::Holds),
    );
    Ok(())
}

fn bilinear_count(r: &mut Report, a: &ExperimentArgs, n: usize) -> Result<()> {
    ensure!(n >= 1, "bilinear-count needs n >= 1");
    let rows = par_trials(a.trials, |t| {
        let bf = BilinearForm::new(Gf2Matrix::random(n, n, &mut trial_rng(a.seed, t)))?;
        let count = BigUint::from(bf.function()?.count_models());
        Ok((bf.rank(), count, bilinear_model_count(n, n, bf.rank())))
    })?;
    let mut by_rank = vec![0u64; n + 1];
    for (t, (rank, count, expected)) in rows.iter().enumerate() {
        by_rank[*rank] += 1;
        r.items.push(json!({
            "trial": t,
            "rank": rank,
            "count": big(count),
            "expected": big(expected),
        }));
    }
    let bad = failures(&rows, |x| x.1 == x.2);
    r.aggregate("matches", a.trials - bad);
    r.aggregate("rank_histogram", by_rank);
    r.check(
        "model count equals 2^(2n-1)(1 - 2^-rk)",
        "2^{2n−1}(1 − 2^{−rk(M)}) models",
        a.trials,
        bad,
    );
    Ok(())
}

struct DiscRow {
    rank: usize,
    block_disc: BigRational,
    block_holds: bool,
    // None when no subrectangle of the requested size fits
    avg: Option<kclab::bilinear::AveragingReport>,
}

fn bilinear_disc(r: &mut Report, a: &ExperimentArgs, n: usize) -> Result<()> {
    ensure!((1..=5).contains(&n), "bilinear-disc needs 1 <= n <= 5");
    let delta = match &a.delta {
        Some(d) => parse_rational(d).context("--delta")?,
        None => ratio(1, 3),
    };
    let rows = par_trials(a.trials, |t| {
        let mut rng = trial_rng(a.seed, t);
        let bf = BilinearForm::new(Gf2Matrix::random(n, n, &mut rng))?;
        let block = random_block_rectangle(&mut rng, n);
        let chk = rank_disc_check(&bf, &block)?;
        let part = random_balanced_partition(&mut rng, 2 * n);
        let bal = random_rectangle(&mut rng, part);
        let avg = match discrepancy_bound_checks(&bf, &bal, Some(&delta)) {
            Ok(rep) => rep.averaging,
            Err(Error::Infeasible(_)) => None,
            Err(e) => bail!(e),
        };
        Ok(DiscRow {
            rank: bf.rank(),
            block_disc: chk.lhs,
            block_holds: chk.holds,
            avg,
        })
    })?;
    for (t, x) in rows.iter().enumerate() {
        let mut item = json!({
            "trial": t,
            "rank": x.rank,
            "block_disc": rat(&x.block_disc),
            "block_bound_holds": x.block_holds,
        });
        if let Some(v) = &x.avg {
            item["balanced"] = json!({
                "selected": v.selection.s_x.len(),
                "swapped": v.selection.swapped,
                "conditionings": v.conditionings,
                "disc": rat(&v.disc),
                "mean": rat(&v.mean),
                "max": rat(&v.max),
                "worst_rank": v.worst.rank_sub,
                "quarter_bound_literal": v.quarter_bound_literal,
            });
        }
        r.items.push(item);
    }
    let avg: Vec<_> = rows.iter().filter_map(|x| x.avg.as_ref()).collect();
    let cases = avg.len() as u64;
    r.aggregate("infeasible_selections", rows.len() - avg.len());
    // informational: the literal factor-4 form does not hold in general
    r.aggregate(
        "quarter_bound_literal_failures",
        avg.iter().filter(|v| !v.quarter_bound_literal).count(),
    );
    r.check(
        "block rectangle discrepancy at most 2^(-rk(A)/2)",
        "Disc(f, r) ≤ 2^{−rk(A)/2}",
        a.trials,
        failures(&rows, |x| x.block_holds),
    );
    r.check(
        "Disc <= mean over conditionings <= max",
        "averaging",
        cases,
        failures(&avg, |v| v.averaging_holds),
    );
    r.check(
        "extended disc is a quarter of the affine disc",
        "extension-bridge",
        cases,
        failures(&avg, |v| v.bridge_equality_holds),
    );
    r.check(
        "affine disc at most 2^(-rk/2)",
        "affine-rank-bound",
        cases,
        failures(&avg, |v| v.affine_bound_holds),
    );
    r.check(
        "extended disc at most 2^(-rk/2)",
        "extension-rank-bound",
        cases,
        failures(&avg, |v| v.extension_bound_holds),
    );
    r.check(
        "extension does not lower the rank",
        "extension-rank",
        cases,
        failures(&avg, |v| v.extension_rank_holds),
    );
    Ok(())
}

struct CoverRow {
    gates: usize,
    normalized: usize,
    k: usize,
    models: u64,
    largest: u64,
    bound: BigRational,
    equivalent: bool,
    disjoint: bool,
    balanced: bool,
}

fn cover_theorem(r: &mut Report, a: &ExperimentArgs, n: usize) -> Result<()> {
    ensure!(n >= 2, "cover-theorem needs n >= 2");
    let eps = match &a.eps {
        Some(e) => parse_rational(e).context("--eps")?,
        None => ratio(0, 1),
    };
    let rows = par_trials(a.trials, |t| {
        let mut rng = trial_rng(a.seed, t);
        let c = match a.circuits {
            CircuitSource::Tree => {
                let f = random_truth_table(&mut rng, n);
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                from_truth_table(&f, &order)?
            }
            CircuitSource::Random => random_ddnnf(&mut rng, n),
        };
        let d = DdnnfCircuit::certify(c)?;
        let f = d.circuit().function()?;
        let ex = extract_cover(&d)?;
        let rep = verify_cover(&f, &ex.cover, CoverRequirements::DISJOINT_BALANCED);
        let largest = ex
            .cover
            .rectangles
            .iter()
            .map(|x| x.size())
            .max()
            .unwrap_or(1);
        let models = f.count_models();
        let bound = strong_cover_bound(&BigUint::from(models), &eps, &BigUint::from(largest))?;
        Ok(CoverRow {
            gates: ex.gate_count,
            normalized: ex.normalized_gate_count,
            k: ex.cover.size(),
            models,
            largest,
            bound,
            equivalent: rep.equivalent,
            disjoint: rep.disjoint,
            balanced: rep.balanced,
        })
    })?;
    for (t, x) in rows.iter().enumerate() {
        r.items.push(json!({
            "trial": t,
            "gates": x.gates,
            "normalized_gates": x.normalized,
            "rectangles": x.k,
            "models": x.models,
            "largest_rectangle": x.largest,
            "counting_bound": rat(&x.bound),
        }));
    }
    let worst = rows
        .iter()
        .map(|x| ratio(x.k as i64, x.normalized as i64))
        .max()
        .unwrap_or_else(|| ratio(0, 1));
    r.aggregate("max_rectangles_per_gate", rat(&worst));
    r.check(
        "cover is equivalent to the circuit",
        "cover-equivalent",
        a.trials,
        failures(&rows, |x| x.equivalent),
    );
    r.check(
        "rectangles are pairwise disjoint",
        "cover-disjoint",
        a.trials,
        failures(&rows, |x| x.disjoint),
    );
    r.check(
        "rectangles are balanced",
        "cover-balanced",
        a.trials,
        failures(&rows, |x| x.balanced),
    );
    r.check(
        "rectangle count at most normalized gate count",
        "cover-size-vs-circuit-size",
        a.trials,
        failures(&rows, |x| x.k <= x.normalized),
    );
    if a.circuits == CircuitSource::Tree {
        r.check(
            "rectangle count at most input gate count",
            "cover-size-vs-input-size",
            a.trials,
            failures(&rows, |x| x.k <= x.gates),
        );
    }
    r.check(
        "rectangle count at least (1 - eps)|f^-1(1)| / largest rectangle",
        "cover-counting-bound",
        a.trials,
        failures(&rows, |x| {
            BigRational::from_integer((x.k as i64).into()) >= x.bound
        }),
    );
    Ok(())
}
