//! Bilinear forms `f(x, y) = x^T A y`, their conditioning to affine forms,
//! the bordered extension, subrectangle selection and the discrepancy checks.
//!
//! For a `p x q` matrix the variables are `x` at indices `0..p` followed by
//! `y` at `p..p+q`.

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfun::{check_var_cap, PartialAssignment, TruthTable};
use crate::error::{Error, Result};
use crate::gen::{random_subset, trial_rng};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::rational::{ceil_mul, dyadic, le_pow2_neg_half, pow2, ratio, to_f64};
use crate::rect::{is_balanced_sizes, Partition, Rectangle};

/// `x^T A y` for a matrix with at most 64 columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Gf2Matrix", into = "Gf2Matrix")]
pub struct BilinearForm {
    a: Gf2Matrix,
    rows: Vec<u64>,
}

impl TryFrom<Gf2Matrix> for BilinearForm {
    type Error = Error;

    fn try_from(a: Gf2Matrix) -> Result<Self> {
        Self::new(a)
    }
}

impl From<BilinearForm> for Gf2Matrix {
    fn from(b: BilinearForm) -> Self {
        b.a
    }
}

impl BilinearForm {
    pub fn new(a: Gf2Matrix) -> Result<Self> {
        if a.rows() + a.cols() > 64 {
            return Err(Error::CapExceeded {
                what: "bilinear form variables",
                value: a.rows() + a.cols(),
                cap: 64,
            });
        }
        let rows = (0..a.rows())
            .map(|i| a.row(i).to_word().expect("at most 64 columns"))
            .collect();
        Ok(Self { a, rows })
    }

    pub fn matrix(&self) -> &Gf2Matrix {
        &self.a
    }

    /// Size of the `x` block.
    pub fn p(&self) -> usize {
        self.a.rows()
    }

    /// Size of the `y` block.
    pub fn q(&self) -> usize {
        self.a.cols()
    }

    pub fn num_vars(&self) -> usize {
        self.p() + self.q()
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    /// `(X, Y)` as a partition of all variables.
    pub fn block_partition(&self) -> Partition {
        let p = self.p();
        Partition::new((0..p).collect(), (p..p + self.q()).collect())
            .expect("blocks partition the variables")
    }

    pub fn eval_xy(&self, x: u64, y: u64) -> bool {
        self.rows
            .iter()
            .enumerate()
            .filter(|(i, _)| x >> i & 1 == 1)
            .fold(0u32, |acc, (_, r)| acc ^ (r & y).count_ones())
            & 1
            == 1
    }

    /// Evaluates a full assignment over `x` then `y`.
    pub fn eval(&self, z: u64) -> bool {
        let p = self.p();
        let x = if p == 64 { z } else { z & ((1u64 << p) - 1) };
        let y = if p == 64 { 0 } else { z >> p };
        self.eval_xy(x, y)
    }

    pub fn function(&self) -> Result<TruthTable> {
        check_var_cap(self.num_vars())?;
        TruthTable::from_fn(self.num_vars(), |z| self.eval(z))
    }
}

pub fn bilinear_function(bf: &BilinearForm) -> Result<TruthTable> {
    bf.function()
}

/// `2^(p+q-1) (1 - 2^-rk)`: for each `x` outside the left kernel exactly half
/// of the `y` give 1.
pub fn bilinear_model_count(p: usize, q: usize, rank: usize) -> BigUint {
    if rank == 0 {
        return BigUint::zero();
    }
    pow2(p + q - 1) - pow2(p + q - 1 - rank)
}

/// How the submatrices were visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AjtaiMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AjtaiOptions {
    /// Largest `C(n, k)^2` enumerated exhaustively.
    pub budget: u64,
    /// Submatrices drawn when over budget.
    pub trials: u64,
    pub seed: u64,
}

impl Default for AjtaiOptions {
    fn default() -> Self {
        Self {
            budget: 1 << 20,
            trials: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AjtaiReport {
    pub n: usize,
    pub delta: BigRational,
    /// `delta / (256 log2(1/delta))^2`, capped at `delta`.
    pub delta_prime: f64,
    /// Submatrix side `ceil(delta n)`.
    pub k: usize,
    /// `ceil(delta' n)`.
    pub required_rank: usize,
    pub mode: AjtaiMode,
    pub submatrices_checked: u64,
    pub min_rank: usize,
    pub holds: bool,
    /// Rows and columns of a submatrix below the required rank.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// `delta / (256 log2(1/delta))^2`. At `delta = 1` the logarithm vanishes and
/// the value is capped at `delta`.
pub fn ajtai_delta_prime(delta: &BigRational) -> f64 {
    let d = to_f64(delta);
    let l = 256.0 * (1.0 / d).log2();
    (d / (l * l)).min(d)
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul((n - i) as u64) / (i as u64 + 1)
    })
}

/// Checks that every `ceil(delta n)`-square submatrix has rank at least
/// `ceil(delta' n)`, exhaustively within budget and by sampling otherwise.
pub fn ajtai_check(a: &Gf2Matrix, delta: &BigRational, opts: &AjtaiOptions) -> Result<AjtaiReport> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if *delta <= BigRational::zero() || *delta > BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    let delta_prime = ajtai_delta_prime(delta);
    let k = ceil_mul(delta, n);
    let required_rank = (delta_prime * n as f64).ceil() as usize;
    let per_side = binomial(n, k);
    let total = per_side.saturating_mul(per_side);

    let mut min_rank = usize::MAX;
    let mut witness = None;
    let mut checked = 0u64;
    let mut visit = |rows: Vec<usize>, cols: Vec<usize>| {
        let r = a.submatrix(&rows, &cols).expect("indices in range").rank();
        checked += 1;
        if r < min_rank {
            min_rank = r;
            if r < required_rank {
                witness = Some((rows, cols));
            }
        }
    };
    let mode = if total <= opts.budget {
        for rows in (0..n).combinations(k) {
            for cols in (0..n).combinations(k) {
                visit(rows.clone(), cols);
            }
        }
        AjtaiMode::Exhaustive
    } else {
        let mut rng = trial_rng(opts.seed, 0);
        for _ in 0..opts.trials {
            let rows = random_subset(&mut rng, n, k);
            let cols = random_subset(&mut rng, n, k);
            visit(rows, cols);
        }
        AjtaiMode::Sampled {
            trials: opts.trials,
            seed: opts.seed,
        }
    };
    let min_rank = if checked == 0 { 0 } else { min_rank };
    Ok(AjtaiReport {
        n,
        delta: delta.clone(),
        delta_prime,
        k,
        required_rank,
        mode,
        submatrices_checked: checked,
        min_rank,
        holds: witness.is_none(),
        witness,
    })
}

/// `f` restricted to `x_C, y_R` after fixing every other variable:
/// `x_C^T A_sub y_R + x_C^T v + u^T y_R + lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineConditioning {
    pub a_sub: Gf2Matrix,
    /// Indexed by `R`.
    pub u: Gf2Vector,
    /// Indexed by `C`.
    pub v: Gf2Vector,
    pub lambda: bool,
    /// Retained rows (positions in the `x` block), increasing.
    pub c: Vec<usize>,
    /// Retained columns (positions in the `y` block), increasing.
    pub r: Vec<usize>,
}

impl AffineConditioning {
    /// `x` holds the values of `x_C` and `y` those of `y_R`, bit `i` for the
    /// `i`-th retained index.
    pub fn eval_xy(&self, x: u64, y: u64) -> bool {
        let xv = Gf2Vector::from_word(self.c.len(), x);
        let yv = Gf2Vector::from_word(self.r.len(), y);
        let quad = xv.dot(&self.a_sub.mul_vec(&yv));
        quad ^ xv.dot(&self.v) ^ self.u.dot(&yv) ^ self.lambda
    }

    /// Truth table over `x_C` then `y_R`.
    pub fn function(&self) -> Result<TruthTable> {
        let k = self.c.len();
        let mask = (1u64 << k) - 1;
        TruthTable::from_fn(k + self.r.len(), |z| self.eval_xy(z & mask, z >> k))
    }
}

fn sorted_unique(idx: &[usize], bound: usize) -> Result<Vec<usize>> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateIndex(w[0]));
    }
    if let Some(&bad) = v.iter().find(|&&i| i >= bound) {
        return Err(Error::IndexOutOfBounds { index: bad, bound });
    }
    Ok(v)
}

/// Conditions `bf` on `a`, which must assign exactly the variables outside
/// `x_C` and `y_R`. `c` indexes the `x` block and `r` the `y` block.
pub fn condition_to_affine(
    bf: &BilinearForm,
    c: &[usize],
    r: &[usize],
    a: &PartialAssignment,
) -> Result<AffineConditioning> {
    let (p, q) = (bf.p(), bf.q());
    let c = sorted_unique(c, p)?;
    let r = sorted_unique(r, q)?;
    let fixed_x: Vec<usize> = (0..p).filter(|i| c.binary_search(i).is_err()).collect();
    let fixed_y: Vec<usize> = (0..q).filter(|j| r.binary_search(j).is_err()).collect();
    let expected: Vec<usize> = fixed_x
        .iter()
        .copied()
        .chain(fixed_y.iter().map(|j| p + j))
        .collect();
    if a.vars().collect::<Vec<_>>() != expected {
        return Err(Error::InvalidArgument(
            "assignment must fix exactly the variables outside C and R".into(),
        ));
    }
    let xval = |i: usize| a.value(i).unwrap_or(false);
    let yval = |j: usize| a.value(p + j).unwrap_or(false);
    let m = bf.matrix();

    let a_sub = m.submatrix(&c, &r)?;
    let v_bits: Vec<bool> = c
        .iter()
        .map(|&ci| {
            fixed_y
                .iter()
                .fold(false, |acc, &j| acc ^ (m.get(ci, j) & yval(j)))
        })
        .collect();
    let u_bits: Vec<bool> = r
        .iter()
        .map(|&rj| {
            fixed_x
                .iter()
                .fold(false, |acc, &i| acc ^ (xval(i) & m.get(i, rj)))
        })
        .collect();
    let lambda = fixed_x.iter().fold(false, |acc, &i| {
        acc ^ (xval(i)
            & fixed_y
                .iter()
                .fold(false, |s, &j| s ^ (m.get(i, j) & yval(j))))
    });
    Ok(AffineConditioning {
        a_sub,
        u: Gf2Vector::from_bits(&u_bits),
        v: Gf2Vector::from_bits(&v_bits),
        lambda,
        c,
        r,
    })
}

/// The bordered matrix `[[lambda, u^T], [v, A_sub]]`. Its `x` block is
/// `e1, x_C` and its `y` block `e2, y_R`; fixing `e1 = e2 = 1` gives back the
/// affine form.
pub fn bilinear_extension(ac: &AffineConditioning) -> Result<BilinearForm> {
    let (k, l) = (ac.c.len(), ac.r.len());
    let mut hat = Gf2Matrix::zeros(k + 1, l + 1);
    hat.set(0, 0, ac.lambda);
    for j in 0..l {
        hat.set(0, j + 1, ac.u.get(j));
    }
    for i in 0..k {
        hat.set(i + 1, 0, ac.v.get(i));
        for j in 0..l {
            hat.set(i + 1, j + 1, ac.a_sub.get(i, j));
        }
    }
    BilinearForm::new(hat)
}

/// Retained variable sets for the averaging step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubrectangleSelection {
    /// Positions in the `x` block.
    pub s_x: Vec<usize>,
    /// Positions in the `y` block.
    pub s_y: Vec<usize>,
    /// `true` when `S_X` sits on the rectangle's right side and `S_Y` on its
    /// left.
    pub swapped: bool,
}

impl SubrectangleSelection {
    /// Global indices of the conditioned-away variables for block size `n`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n)
            .filter(|i| !self.s_x.contains(i))
            .chain((0..n).filter(|j| !self.s_y.contains(j)).map(|j| n + j))
            .collect()
    }
}

/// Picks `S_X`, `S_Y` of size `ceil(delta n)` with `S_X` inside one side of
/// `r`'s partition and `S_Y` inside the other, so that every conditioning of
/// `r` outside `S` is a rectangle over `(S_X, S_Y)`.
///
/// The rectangle lives on `2n` variables, `x` at `0..n` and `y` at `n..2n`.
/// The orientation with `S_X` on the left is tried first.
pub fn subrectangle_select(r: &Rectangle, delta: &BigRational) -> Result<SubrectangleSelection> {
    let total = r.n();
    if !total.is_multiple_of(2) {
        return Err(Error::InvalidPartition(format!(
            "rectangle has {total} variables, expected an even count"
        )));
    }
    if !r.is_balanced() {
        return Err(Error::InvalidPartition("rectangle is not balanced".into()));
    }
    if *delta <= BigRational::zero() || *delta > ratio(2, 3) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 2/3], got {delta}"
        )));
    }
    let n = total / 2;
    let k = ceil_mul(delta, n);
    let part = r.partition();
    let x_in = |side: &[usize]| side.iter().copied().filter(|&v| v < n).collect::<Vec<_>>();
    let y_in = |side: &[usize]| {
        side.iter()
            .filter(|&&v| v >= n)
            .map(|&v| v - n)
            .collect::<Vec<_>>()
    };
    let (xl, yl) = (x_in(part.left()), y_in(part.left()));
    let (xr, yr) = (x_in(part.right()), y_in(part.right()));
    if xl.len() >= k && yr.len() >= k {
        return Ok(SubrectangleSelection {
            s_x: xl[..k].to_vec(),
            s_y: yr[..k].to_vec(),
            swapped: false,
        });
    }
    if xr.len() >= k && yl.len() >= k {
        return Ok(SubrectangleSelection {
            s_x: xr[..k].to_vec(),
            s_y: yl[..k].to_vec(),
            swapped: true,
        });
    }
    Err(Error::Infeasible(format!(
        "no {k}+{k} split of the x and y blocks fits on opposite sides of the partition"
    )))
}

/// Whether every conditioning of `r` outside `S` is a product set over
/// `(S_X, S_Y)`. Exhaustive over the `2^(2n - 2k)` conditionings.
pub fn check_subrectangle(r: &Rectangle, sel: &SubrectangleSelection) -> Result<bool> {
    let n = r.n() / 2;
    let f = r.function()?;
    let rest = sel.complement(n);
    let k = sel.s_x.len();
    let local = Partition::from_left(2 * k, &(0..k).collect::<Vec<_>>())?;
    for bits in 0..1u64 << rest.len() {
        let g = f.condition(&PartialAssignment::from_bits(&rest, bits)?)?;
        let models: Vec<u64> = g.models().collect();
        if crate::rect::rectangle_from_models(&local, &models)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One exact inequality `lhs <= bound`, where the bound may be irrational and
/// is then described by `bound_repr`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: BigRational,
    pub bound_repr: String,
    pub holds: bool,
}

/// `Disc(f, r) <= 2^(-rk A / 2)` for a rectangle over exactly `(X, Y)`.
pub fn rank_disc_check(bf: &BilinearForm, r: &Rectangle) -> Result<InequalityCheck> {
    let bp = bf.block_partition();
    if *r.partition() != bp && *r.partition() != bp.swapped() {
        return Err(Error::InvalidPartition(
            "rectangle partition must be the (x, y) block split".into(),
        ));
    }
    let f = bf.function()?;
    let disc = crate::rect::discrepancy(&f, r)?.value();
    let rk = bf.rank();
    Ok(InequalityCheck {
        holds: le_pow2_neg_half(&disc, rk),
        lhs: disc,
        bound_repr: format!("2^(-{rk}/2)"),
    })
}

fn disc_of_tables(f: &TruthTable, r: &TruthTable) -> Result<BigRational> {
    let tp = f.and(r)?.count_models();
    let fp = f.not().and(r)?.count_models();
    Ok(dyadic(tp.abs_diff(fp), f.n()))
}

/// Per-conditioning quantities of the averaging argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionedDisc {
    pub assignment: u64,
    pub rank_sub: usize,
    pub rank_ext: usize,
    /// `Disc(f_a, r_a)` over `2k` variables.
    pub disc: BigRational,
    /// `Disc` of the extension over `2k + 2` variables.
    pub disc_ext: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AveragingReport {
    pub selection: SubrectangleSelection,
    pub conditionings: u64,
    /// `Disc(f, r)`.
    pub disc: BigRational,
    /// Mean of `Disc(f_a, r_a)` over uniform `a`.
    pub mean: BigRational,
    pub max: BigRational,
    /// `Disc(f, r) <= mean <= max`.
    pub averaging_holds: bool,
    /// `Disc(f_hat, r_hat) = Disc(f_a, r_a) / 4` for every `a`.
    pub bridge_equality_holds: bool,
    /// `Disc(f_a, r_a) <= 2^(-rk A_sub / 2)` for every `a`.
    pub affine_bound_holds: bool,
    /// `Disc(f_hat, r_hat) <= 2^(-rk A_hat / 2)` for every `a`.
    pub extension_bound_holds: bool,
    /// `rk A_hat >= rk A_sub` for every `a`.
    pub extension_rank_holds: bool,
    /// Whether `Disc(f_a, r_a) <= 2^(-rk A_sub / 2) / 4` held everywhere.
    /// Informational: the quarter factor belongs to the extension's
    /// normalisation, so this is not expected to hold.
    pub quarter_bound_literal: bool,
    /// The conditioning attaining `max`.
    pub worst: ConditionedDisc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearDiscReport {
    pub n: usize,
    pub rank: usize,
    pub disc: BigRational,
    /// Present when `r` is over the `(X, Y)` split.
    pub rank_bound: Option<InequalityCheck>,
    /// Present when `delta` was given.
    pub averaging: Option<AveragingReport>,
}

impl BilinearDiscReport {
    pub fn all_hold(&self) -> bool {
        self.rank_bound.as_ref().is_none_or(|c| c.holds)
            && self.averaging.as_ref().is_none_or(|a| {
                a.averaging_holds
                    && a.bridge_equality_holds
                    && a.affine_bound_holds
                    && a.extension_bound_holds
                    && a.extension_rank_holds
            })
    }
}

/// Runs the rank bound (when applicable) and, given `delta`, the averaging
/// argument through [`subrectangle_select`], conditioning and extension.
pub fn discrepancy_bound_checks(
    bf: &BilinearForm,
    r: &Rectangle,
    delta: Option<&BigRational>,
) -> Result<BilinearDiscReport> {
    let n = bf.p();
    if bf.q() != n || r.n() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: r.n(),
        });
    }
    let f = bf.function()?;
    let disc = crate::rect::discrepancy(&f, r)?.value();
    let bp = bf.block_partition();
    let rank_bound = if *r.partition() == bp || *r.partition() == bp.swapped() {
        Some(rank_disc_check(bf, r)?)
    } else {
        None
    };
    let averaging = match delta {
        Some(d) => Some(averaging_check(bf, r, d, &f, &disc)?),
        None => None,
    };
    Ok(BilinearDiscReport {
        n,
        rank: bf.rank(),
        disc,
        rank_bound,
        averaging,
    })
}

fn averaging_check(
    bf: &BilinearForm,
    r: &Rectangle,
    delta: &BigRational,
    f: &TruthTable,
    disc: &BigRational,
) -> Result<AveragingReport> {
    let n = bf.p();
    let sel = subrectangle_select(r, delta)?;
    let k = sel.s_x.len();
    let rest = sel.complement(n);
    let rt = r.function()?;
    let mut sum = BigRational::zero();
    let mut worst: Option<ConditionedDisc> = None;
    let mut bridge = true;
    let mut affine = true;
    let mut extension = true;
    let mut ext_rank = true;
    let mut quarter = true;
    let quarter_factor = ratio(1, 4);
    for bits in 0..1u64 << rest.len() {
        let a = PartialAssignment::from_bits(&rest, bits)?;
        let fa = f.condition(&a)?;
        let ra = rt.condition(&a)?;
        let ac = condition_to_affine(bf, &sel.s_x, &sel.s_y, &a)?;
        debug_assert_eq!(ac.function()?, fa);
        let d = disc_of_tables(&fa, &ra)?;

        let ext = bilinear_extension(&ac)?;
        let ft = ext.function()?;
        // r_hat = r_a with e1 = 1 on the x side and e2 = 1 on the y side
        let rhat = TruthTable::from_fn(2 * k + 2, |z| {
            let e1 = z & 1;
            let xs = z >> 1 & ((1u64 << k) - 1);
            let e2 = z >> (k + 1) & 1;
            let ys = z >> (k + 2);
            e1 == 1 && e2 == 1 && ra.eval(xs | ys << k)
        })?;
        let dh = disc_of_tables(&ft, &rhat)?;

        let rank_sub = ac.a_sub.rank();
        let rank_ext = ext.rank();
        bridge &= dh == &d * &quarter_factor;
        affine &= le_pow2_neg_half(&d, rank_sub);
        extension &= le_pow2_neg_half(&dh, rank_ext);
        ext_rank &= rank_ext >= rank_sub;
        quarter &= le_pow2_neg_half(&(&d * BigRational::from_integer(4.into())), rank_sub);
        sum += &d;
        if worst.as_ref().is_none_or(|w| d > w.disc) {
            worst = Some(ConditionedDisc {
                assignment: bits,
                rank_sub,
                rank_ext,
                disc: d,
                disc_ext: dh,
            });
        }
    }
    let count = 1u64 << rest.len();
    let mean = sum / BigRational::from_integer(count.into());
    let worst = worst.expect("at least one conditioning");
    Ok(AveragingReport {
        averaging_holds: *disc <= mean && mean <= worst.disc,
        max: worst.disc.clone(),
        selection: sel,
        conditionings: count,
        disc: disc.clone(),
        mean,
        bridge_equality_holds: bridge,
        affine_bound_holds: affine,
        extension_bound_holds: extension,
        extension_rank_holds: ext_rank,
        quarter_bound_literal: quarter,
        worst,
    })
}

/// Random rectangle over the `(X, Y)` split of `2n` variables.
pub fn random_block_rectangle<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Rectangle {
    let p = Partition::new((0..n).collect(), (n..2 * n).collect()).expect("block split");
    crate::gen::random_rectangle(rng, p)
}

/// Whether `|S_X| = |S_Y| = ceil(delta n)` fits some orientation of every
/// balanced partition of `2n` variables; used to document feasibility.
pub fn selection_always_feasible(n: usize, delta: &BigRational) -> bool {
    let k = ceil_mul(delta, n);
    // a = |X ∩ X1|, b = |Y ∩ X1|
    (0..=n).all(|a| {
        (0..=n).all(|b| {
            !is_balanced_sizes(a + b, 2 * n) || (a >= k && n - b >= k) || (n - a >= k && b >= k)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_balanced_partition, random_rectangle};

    fn bf(rows: &[&str]) -> BilinearForm {
        BilinearForm::new(Gf2Matrix::from_strs(rows).unwrap()).unwrap()
    }

    #[test]
    fn count_examples() {
        let zero = BilinearForm::new(Gf2Matrix::zeros(2, 2)).unwrap();
        assert_eq!(zero.function().unwrap().count_models(), 0);
        assert_eq!(bf(&["1"]).function().unwrap().count_models(), 1);
        assert!(bf(&["1"]).eval(0b11));
        assert_eq!(bf(&["10", "01"]).function().unwrap().count_models(), 6);
        assert_eq!(bilinear_model_count(2, 2, 2), BigUint::from(6u32));
        assert_eq!(bilinear_model_count(1, 1, 1), BigUint::from(1u32));
    }

    #[test]
    fn count_formula_rectangular() {
        let mut rng = trial_rng(4, 0);
        for _ in 0..30 {
            let m = Gf2Matrix::random(3, 4, &mut rng);
            let b = BilinearForm::new(m).unwrap();
            assert_eq!(
                BigUint::from(b.function().unwrap().count_models()),
                bilinear_model_count(3, 4, b.rank())
            );
        }
    }

    #[test]
    fn ajtai_examples() {
        let one = ratio(1, 1);
        let id = ajtai_check(&Gf2Matrix::identity(5), &one, &AjtaiOptions::default()).unwrap();
        assert!(id.holds && id.k == 5 && id.required_rank == 5 && id.submatrices_checked == 1);

        let zero = ajtai_check(
            &Gf2Matrix::zeros(4, 4),
            &ratio(1, 2),
            &AjtaiOptions::default(),
        )
        .unwrap();
        assert!(!zero.holds);
        let (rows, cols) = zero.witness.unwrap();
        assert_eq!((rows.len(), cols.len()), (2, 2));

        assert!(ajtai_check(
            &Gf2Matrix::identity(3),
            &ratio(0, 1),
            &AjtaiOptions::default()
        )
        .is_err());
        assert!(ajtai_check(
            &Gf2Matrix::identity(3),
            &ratio(3, 2),
            &AjtaiOptions::default()
        )
        .is_err());
    }

    #[test]
    fn ajtai_agrees_with_enumeration() {
        let mut rng = trial_rng(6, 0);
        for _ in 0..5 {
            let m = Gf2Matrix::random(8, 8, &mut rng);
            let rep = ajtai_check(&m, &ratio(1, 2), &AjtaiOptions::default()).unwrap();
            assert_eq!(rep.mode, AjtaiMode::Exhaustive);
            assert_eq!(rep.submatrices_checked, 70 * 70);
            let mut min = usize::MAX;
            for mask_r in 0u32..256 {
                if mask_r.count_ones() != 4 {
                    continue;
                }
                for mask_c in 0u32..256 {
                    if mask_c.count_ones() != 4 {
                        continue;
                    }
                    let rows: Vec<usize> = (0..8).filter(|i| mask_r >> i & 1 == 1).collect();
                    let cols: Vec<usize> = (0..8).filter(|i| mask_c >> i & 1 == 1).collect();
                    min = min.min(m.submatrix(&rows, &cols).unwrap().rank());
                }
            }
            assert_eq!(rep.min_rank, min);
            assert_eq!(rep.holds, min >= rep.required_rank);
        }
    }

    #[test]
    fn conditioning_examples() {
        let id = bf(&["10", "01"]);
        let zero_a = PartialAssignment::from_bits(&[1, 3], 0).unwrap();
        let ac = condition_to_affine(&id, &[0], &[0], &zero_a).unwrap();
        assert!(ac.u.is_zero() && ac.v.is_zero() && !ac.lambda);
        assert_eq!(ac.a_sub, Gf2Matrix::from_strs(&["1"]).unwrap());

        let a = PartialAssignment::from_bits(&[1, 3], 0b11).unwrap();
        let ac = condition_to_affine(&id, &[0], &[0], &a).unwrap();
        assert!(ac.lambda && ac.u.is_zero() && ac.v.is_zero());
        assert_eq!(
            ac.function().unwrap(),
            id.function().unwrap().condition(&a).unwrap()
        );

        let wrong = PartialAssignment::from_bits(&[1], 0).unwrap();
        assert!(condition_to_affine(&id, &[0], &[0], &wrong).is_err());
        assert!(condition_to_affine(&id, &[0, 0], &[0], &a).is_err());
    }

    #[test]
    fn conditioning_round_trip() {
        let mut rng = trial_rng(9, 0);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let b = BilinearForm::new(Gf2Matrix::random(n, n, &mut rng)).unwrap();
            let kc = rng.random_range(0..=n);
            let c = random_subset(&mut rng, n, kc);
            let kr = rng.random_range(0..=n);
            let r = random_subset(&mut rng, n, kr);
            let fixed: Vec<usize> = (0..n)
                .filter(|i| !c.contains(i))
                .chain((0..n).filter(|j| !r.contains(j)).map(|j| n + j))
                .collect();
            let a = PartialAssignment::from_bits(&fixed, rng.random()).unwrap();
            let ac = condition_to_affine(&b, &c, &r, &a).unwrap();
            assert_eq!(
                ac.function().unwrap(),
                b.function().unwrap().condition(&a).unwrap()
            );

            let ext = bilinear_extension(&ac).unwrap();
            assert!(ext.rank() >= ac.a_sub.rank());
            let e = PartialAssignment::new(vec![(0, true), (c.len() + 1, true)]).unwrap();
            assert_eq!(
                ext.function().unwrap().condition(&e).unwrap(),
                ac.function().unwrap()
            );
        }
    }

    #[test]
    fn extension_rank_examples() {
        let sub = Gf2Matrix::from_strs(&["10", "00"]).unwrap();
        let mk = |lambda| AffineConditioning {
            a_sub: sub.clone(),
            u: Gf2Vector::zeros(2),
            v: Gf2Vector::zeros(2),
            lambda,
            c: vec![0, 1],
            r: vec![0, 1],
        };
        assert_eq!(bilinear_extension(&mk(false)).unwrap().rank(), 1);
        assert_eq!(bilinear_extension(&mk(true)).unwrap().rank(), 2);
    }

    #[test]
    fn selection_examples() {
        let blocks = Partition::new(vec![0, 1, 2], vec![3, 4, 5]).unwrap();
        let r = Rectangle::full(blocks).unwrap();
        let sel = subrectangle_select(&r, &ratio(2, 3)).unwrap();
        assert_eq!(
            (sel.s_x.clone(), sel.s_y.clone(), sel.swapped),
            (vec![0, 1], vec![0, 1], false)
        );
        assert!(check_subrectangle(&r, &sel).unwrap());
        assert!(subrectangle_select(&r, &ratio(7, 10)).is_err());

        // one x and one y variable on the left side
        let tight = Partition::new(vec![0, 3], vec![1, 2, 4, 5]).unwrap();
        let r = Rectangle::full(tight).unwrap();
        assert!(matches!(
            subrectangle_select(&r, &ratio(2, 3)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn selection_feasibility_regions() {
        for n in 1..=12 {
            assert!(selection_always_feasible(n, &ratio(1, 3)), "n = {n}");
        }
        assert!(selection_always_feasible(4, &ratio(1, 2)));
        assert!(!selection_always_feasible(3, &ratio(2, 3)));
    }

    #[test]
    fn random_selections_are_rectangles() {
        let mut rng = trial_rng(10, 0);
        for _ in 0..30 {
            let part = random_balanced_partition(&mut rng, 8);
            let r = random_rectangle(&mut rng, part);
            let sel = subrectangle_select(&r, &ratio(1, 2)).unwrap();
            assert_eq!(sel.complement(4).len(), 4);
            assert!(check_subrectangle(&r, &sel).unwrap());
        }
    }

    #[test]
    fn disc_examples() {
        let zero = BilinearForm::new(Gf2Matrix::zeros(2, 2)).unwrap();
        let r = Rectangle::full(zero.block_partition()).unwrap();
        let rep = rank_disc_check(&zero, &r).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.lhs, ratio(1, 1));

        let id = bf(&["10", "01"]);
        let rep = rank_disc_check(&id, &r).unwrap();
        assert_eq!(rep.lhs, ratio(1, 4));
        assert!(rep.holds);

        let other = Rectangle::full(Partition::from_left(4, &[0, 2]).unwrap()).unwrap();
        assert!(rank_disc_check(&id, &other).is_err());
    }

    #[test]
    fn averaging_and_bridge() {
        let mut rng = trial_rng(12, 0);
        let mut quarter_failed = false;
        for _ in 0..40 {
            let b = BilinearForm::new(Gf2Matrix::random(4, 4, &mut rng)).unwrap();
            let part = random_balanced_partition(&mut rng, 8);
            let r = random_rectangle(&mut rng, part);
            let rep = discrepancy_bound_checks(&b, &r, Some(&ratio(1, 2))).unwrap();
            assert!(rep.all_hold(), "{rep:?}");
            quarter_failed |= !rep.averaging.unwrap().quarter_bound_literal;
        }
        assert!(quarter_failed);
    }
}
