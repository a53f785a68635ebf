//! Combinatorial rectangles, rectangle covers and discrepancy, together with
//! the cover-size lower-bound calculators.
//!
//! A rectangle over the partition `(X1, X2)` is stored as two sets of side
//! assignments. A side assignment is an integer whose bit `i` is the value of
//! the `i`-th variable of that side (sides are kept in increasing variable
//! order).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boolfun::{check_var_cap, TruthTable};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::rational::{dyadic, pow2, pow2_signed};

/// A split of the variables `0..n` into two disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr")]
pub struct Partition {
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Deserialize)]
struct PartitionRepr {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::new(r.left, r.right)
    }
}

impl Partition {
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>) -> Result<Self> {
        left.sort_unstable();
        right.sort_unstable();
        let n = left.len() + right.len();
        if n > 64 {
            return Err(Error::InvalidPartition(format!(
                "{n} variables exceed the 64-variable limit"
            )));
        }
        let mut seen = vec![false; n];
        for &v in left.iter().chain(&right) {
            if v >= n {
                return Err(Error::InvalidPartition(format!(
                    "variable {v} outside 0..{n}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPartition(format!(
                    "variable {v} on both sides"
                )));
            }
        }
        Ok(Self { left, right })
    }

    /// `left` on one side, every other variable of `0..n` on the other.
    pub fn from_left(n: usize, left: &[usize]) -> Result<Self> {
        let right = (0..n).filter(|v| !left.contains(v)).collect();
        Self::new(left.to_vec(), right)
    }

    /// Left block given as a bit mask over `0..n`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        let left = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let right = (0..n).filter(|&v| mask >> v & 1 == 0).collect();
        Self::new(left, right)
    }

    pub fn n(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// `n/3 <= |X1| <= 2n/3`, compared exactly.
    pub fn is_balanced(&self) -> bool {
        is_balanced_sizes(self.left.len(), self.n())
    }

    /// Full assignment from one assignment per side.
    pub fn join(&self, a: u64, b: u64) -> u64 {
        scatter(a, &self.left) | scatter(b, &self.right)
    }

    /// Restrictions of a full assignment to the two sides.
    pub fn split(&self, x: u64) -> (u64, u64) {
        (gather(x, &self.left), gather(x, &self.right))
    }
}

/// `n/3 <= k <= 2n/3` without rounding.
pub fn is_balanced_sizes(k: usize, n: usize) -> bool {
    3 * k >= n && 3 * k <= 2 * n
}

/// Spreads bit `i` of `bits` to position `vars[i]`.
pub fn scatter(bits: u64, vars: &[usize]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (bits >> i & 1) << v)
}

/// Collects bit `vars[i]` of `x` into position `i`.
pub fn gather(x: u64, vars: &[usize]) -> u64 {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (x >> v & 1) << i)
}

/// A rectangle `rho1 /\ rho2`, stored by the model sets of its two factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RectangleRepr")]
pub struct Rectangle {
    partition: Partition,
    left_models: Vec<u64>,
    right_models: Vec<u64>,
}

#[derive(Deserialize)]
struct RectangleRepr {
    partition: Partition,
    left_models: Vec<u64>,
    right_models: Vec<u64>,
}

impl TryFrom<RectangleRepr> for Rectangle {
    type Error = Error;

    fn try_from(r: RectangleRepr) -> Result<Self> {
        Rectangle::new(r.partition, r.left_models, r.right_models)
    }
}

fn normalise_side(mut set: Vec<u64>, width: usize) -> Result<Vec<u64>> {
    set.sort_unstable();
    set.dedup();
    if let Some(&bad) = set.iter().find(|&&a| width < 64 && a >> width != 0) {
        return Err(Error::InvalidArgument(format!(
            "side assignment {bad} does not fit in {width} variables"
        )));
    }
    Ok(set)
}

impl Rectangle {
    pub fn new(
        partition: Partition,
        left_models: Vec<u64>,
        right_models: Vec<u64>,
    ) -> Result<Self> {
        let left_models = normalise_side(left_models, partition.left.len())?;
        let right_models = normalise_side(right_models, partition.right.len())?;
        Ok(Self {
            partition,
            left_models,
            right_models,
        })
    }

    /// The constant-true rectangle over `partition`.
    pub fn full(partition: Partition) -> Result<Self> {
        check_var_cap(partition.n())?;
        let l = (0..1u64 << partition.left.len()).collect();
        let r = (0..1u64 << partition.right.len()).collect();
        Self::new(partition, l, r)
    }

    pub fn empty(partition: Partition) -> Self {
        Self {
            partition,
            left_models: Vec::new(),
            right_models: Vec::new(),
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn left_models(&self) -> &[u64] {
        &self.left_models
    }

    pub fn right_models(&self) -> &[u64] {
        &self.right_models
    }

    /// `|r^-1(1)| = |rho1^-1(1)| * |rho2^-1(1)|`.
    pub fn size(&self) -> u64 {
        self.left_models.len() as u64 * self.right_models.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn is_balanced(&self) -> bool {
        self.partition.is_balanced()
    }

    pub fn contains(&self, x: u64) -> bool {
        let (a, b) = self.partition.split(x);
        self.left_models.binary_search(&a).is_ok() && self.right_models.binary_search(&b).is_ok()
    }

    /// Models as full assignments, grouped by left factor.
    pub fn models(&self) -> impl Iterator<Item = u64> + '_ {
        self.left_models.iter().flat_map(move |&a| {
            self.right_models
                .iter()
                .map(move |&b| self.partition.join(a, b))
        })
    }

    /// The rectangle as an explicit Boolean function.
    pub fn function(&self) -> Result<TruthTable> {
        TruthTable::from_models(self.n(), self.models())
    }
}

/// Alias matching the operation name used in reports.
pub fn rect_function(r: &Rectangle) -> Result<TruthTable> {
    r.function()
}

fn check_same_universe(f: &TruthTable, r: &Rectangle) -> Result<()> {
    if f.n() != r.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: r.n(),
        });
    }
    Ok(())
}

/// True and false positives of `r` on `f`.
pub fn tp_fp(f: &TruthTable, r: &Rectangle) -> Result<(u64, u64)> {
    check_same_universe(f, r)?;
    let tp = r.models().filter(|&x| f.eval(x)).count() as u64;
    Ok((tp, r.size() - tp))
}

/// `|tp - fp| / 2^n`, kept as an exact numerator over a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscValue {
    pub numerator: u64,
    /// Number of variables; the denominator is `2^n`.
    pub n: usize,
}

impl DiscValue {
    pub fn value(&self) -> BigRational {
        dyadic(self.numerator, self.n)
    }
}

pub fn discrepancy(f: &TruthTable, r: &Rectangle) -> Result<DiscValue> {
    let (tp, fp) = tp_fp(f, r)?;
    Ok(DiscValue {
        numerator: tp.abs_diff(fp),
        n: f.n(),
    })
}

/// Verification state attached to a cover.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFlags {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub balanced: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub disjoint: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equivalent: Option<bool>,
}

/// A list of rectangles whose disjunction is meant to equal some function.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Cover {
    pub rectangles: Vec<Rectangle>,
    #[serde(default)]
    pub flags: CoverFlags,
}

impl Cover {
    pub fn new(rectangles: Vec<Rectangle>) -> Self {
        Self {
            rectangles,
            flags: CoverFlags::default(),
        }
    }

    /// Number of rectangles `K`.
    pub fn size(&self) -> usize {
        self.rectangles.len()
    }

    /// Records the outcome of a verification run.
    pub fn mark(&mut self, report: &CoverReport) {
        self.flags = CoverFlags {
            balanced: Some(report.balanced),
            disjoint: Some(report.disjoint),
            equivalent: Some(report.equivalent),
        };
    }

    /// Disjunction of the rectangles on `n` variables.
    pub fn function(&self, n: usize) -> Result<TruthTable> {
        let mut t = TruthTable::zeros(n)?;
        for r in &self.rectangles {
            if r.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.n(),
                });
            }
            for x in r.models() {
                t.set(x, true);
            }
        }
        Ok(t)
    }
}

/// The cover with one full-term rectangle per model, split into the first
/// `ceil(n/2)` variables and the rest.
pub fn dnf_cover(f: &TruthTable) -> Result<Cover> {
    let n = f.n();
    let left: Vec<usize> = (0..n.div_ceil(2)).collect();
    let p = Partition::from_left(n, &left)?;
    let rects = f
        .models()
        .map(|x| {
            let (a, b) = p.split(x);
            Rectangle::new(p.clone(), vec![a], vec![b])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover::new(rects))
}

/// Which structural properties a cover must have to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoverRequirements {
    pub disjoint: bool,
    pub balanced: bool,
}

impl CoverRequirements {
    pub const DISJOINT_BALANCED: Self = Self {
        disjoint: true,
        balanced: true,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoverFailure {
    WrongVariableCount {
        rectangle: usize,
        found: usize,
    },
    NotEquivalent {
        assignment: u64,
        in_function: bool,
    },
    Overlap {
        assignment: u64,
        first: usize,
        second: usize,
    },
    Unbalanced {
        rectangle: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    pub size: usize,
    pub equivalent: bool,
    pub disjoint: bool,
    pub balanced: bool,
    /// Equivalence plus every required property.
    pub ok: bool,
    /// First counterexample of each failed property.
    pub failures: Vec<CoverFailure>,
}

/// Checks `\/ rectangles == f` exactly, plus pairwise model-disjointness and
/// balance. Rectangles over different partitions are compared through their
/// models on all `n` variables.
pub fn verify_cover(f: &TruthTable, cover: &Cover, require: CoverRequirements) -> CoverReport {
    let n = f.n();
    let mut failures = Vec::new();
    if let Some((i, r)) = cover
        .rectangles
        .iter()
        .enumerate()
        .find(|(_, r)| r.n() != n)
    {
        failures.push(CoverFailure::WrongVariableCount {
            rectangle: i,
            found: r.n(),
        });
        return CoverReport {
            size: cover.size(),
            equivalent: false,
            disjoint: false,
            balanced: false,
            ok: false,
            failures,
        };
    }

    // owner[x] = 1 + index of the first rectangle containing x
    let mut owner = vec![0u32; 1usize << n];
    let mut overlap = None;
    for (i, r) in cover.rectangles.iter().enumerate() {
        for x in r.models() {
            let slot = &mut owner[x as usize];
            if *slot == 0 {
                *slot = i as u32 + 1;
            } else if overlap.is_none() {
                overlap = Some(CoverFailure::Overlap {
                    assignment: x,
                    first: *slot as usize - 1,
                    second: i,
                });
            }
        }
    }
    let disjoint = overlap.is_none();
    failures.extend(overlap);

    let mismatch = (0..1u64 << n).find(|&x| f.eval(x) != (owner[x as usize] != 0));
    let equivalent = mismatch.is_none();
    if let Some(x) = mismatch {
        failures.push(CoverFailure::NotEquivalent {
            assignment: x,
            in_function: f.eval(x),
        });
    }

    let unbalanced = cover.rectangles.iter().position(|r| !r.is_balanced());
    let balanced = unbalanced.is_none();
    if let Some(i) = unbalanced {
        failures.push(CoverFailure::Unbalanced { rectangle: i });
    }

    let ok = equivalent && (!require.disjoint || disjoint) && (!require.balanced || balanced);
    CoverReport {
        size: cover.size(),
        equivalent,
        disjoint,
        balanced,
        ok,
        failures,
    }
}

fn check_eps_delta(eps: &BigRational, delta: &BigUint) -> Result<()> {
    if delta.is_zero() {
        return Err(Error::InvalidArgument("Delta must be at least 1".into()));
    }
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    Ok(())
}

/// Weak-approximation cover bound `(|f^-1(1)| - eps 2^n) / Delta`.
///
/// The value may be negative; an integer cover size is
/// [`min_cover_size`] of it.
pub fn weak_cover_bound(
    model_count: &BigUint,
    n: usize,
    eps: &BigRational,
    delta: &BigUint,
) -> Result<BigRational> {
    check_eps_delta(eps, delta)?;
    let mc = BigRational::from_integer(BigInt::from(model_count.clone()));
    let space = BigRational::from_integer(BigInt::from(pow2(n)));
    Ok((mc - eps * space) / BigRational::from_integer(BigInt::from(delta.clone())))
}

/// Strong-approximation cover bound `(1 - eps) |f^-1(1)| / Delta`.
pub fn strong_cover_bound(
    model_count: &BigUint,
    eps: &BigRational,
    delta: &BigUint,
) -> Result<BigRational> {
    check_eps_delta(eps, delta)?;
    let mc = BigRational::from_integer(BigInt::from(model_count.clone()));
    Ok((BigRational::one() - eps) * mc / BigRational::from_integer(BigInt::from(delta.clone())))
}

/// The linear-code pipeline value `(1 - eps) 2^(2m-n) |f^-1(1)| / 4`, i.e. the
/// strong bound with `Delta = 2^(n - 2(m-1))`.
pub fn strong_pipeline_bound(
    model_count: &BigUint,
    n: usize,
    m: usize,
    eps: &BigRational,
) -> Result<BigRational> {
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    let mc = BigRational::from_integer(BigInt::from(model_count.clone()));
    let scale = pow2_signed(2 * m as i64 - n as i64);
    Ok((BigRational::one() - eps) * scale * mc / BigRational::from_integer(4.into()))
}

/// `max(0, ceil(bound))`.
pub fn min_cover_size(bound: &BigRational) -> BigUint {
    let c = bound.ceil().to_integer();
    if c.is_negative() {
        BigUint::zero()
    } else {
        c.magnitude().clone()
    }
}

/// Removes every rectangle with more false than true positives on `f`.
///
/// For a disjoint cover each removal changes the disagreement with `f` by
/// `tp - fp < 0`, so the result approximates `f` at least as well.
pub fn prune_cover(f: &TruthTable, cover: &Cover) -> Result<Cover> {
    let mut kept = Vec::with_capacity(cover.size());
    for r in &cover.rectangles {
        let (tp, fp) = tp_fp(f, r)?;
        if fp <= tp {
            kept.push(r.clone());
        }
    }
    Ok(Cover::new(kept))
}

/// Cap on `n` for [`max_code_rectangle_check`], which visits all partitions.
pub const MAX_RECTANGLE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxRectangleReport {
    pub n: usize,
    pub s: usize,
    pub balanced_partitions: usize,
    /// Largest `log2 |r^-1(1)|` over balanced rectangles `r <= f`.
    pub max_log2: usize,
    /// Left block of a partition attaining the maximum.
    pub worst_left: Vec<usize>,
    /// `n - 2s`; the check asserts `max_log2 <= bound_log2`.
    pub bound_log2: i64,
    pub holds: bool,
}

/// Largest rectangle `r <= f` over `partition`, as `log2 |r^-1(1)|`.
///
/// Models of `rho1` all share the syndrome `H1 a = w`, so they lie in one
/// coset of `ker H1`; the same holds on the right. Taking `w = 0` attains
/// `2^(|X1| - rk H1) * 2^(|X2| - rk H2)`.
pub fn max_code_rectangle_log2(code: &LinearCode, partition: &Partition) -> Result<usize> {
    let h = code.parity_check();
    if partition.n() != h.cols() {
        return Err(Error::DimensionMismatch {
            expected: h.cols(),
            found: partition.n(),
        });
    }
    let r1 = h.select_columns(partition.left())?.rank();
    let r2 = h.select_columns(partition.right())?.rank();
    Ok(h.cols() - r1 - r2)
}

/// Over every balanced partition, checks that the largest rectangle inside
/// the code has at most `2^(n - 2s)` models.
pub fn max_code_rectangle_check(code: &LinearCode, s: usize) -> Result<MaxRectangleReport> {
    let n = code.n();
    if n > MAX_RECTANGLE_CAP {
        return Err(Error::CapExceeded {
            what: "code length for partition enumeration",
            value: n,
            cap: MAX_RECTANGLE_CAP,
        });
    }
    let mut balanced_partitions = 0;
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u64..1 << n {
        if !is_balanced_sizes(mask.count_ones() as usize, n) {
            continue;
        }
        balanced_partitions += 1;
        let p = Partition::from_mask(n, mask)?;
        let size = max_code_rectangle_log2(code, &p)?;
        if best.as_ref().is_none_or(|(b, _)| size > *b) {
            best = Some((size, p.left().to_vec()));
        }
    }
    let (max_log2, worst_left) = best.unwrap_or((0, Vec::new()));
    let bound_log2 = n as i64 - 2 * s as i64;
    Ok(MaxRectangleReport {
        n,
        s,
        balanced_partitions,
        max_log2,
        worst_left,
        bound_log2,
        holds: balanced_partitions == 0 || max_log2 as i64 <= bound_log2,
    })
}

/// Distinct side projections of a set of full assignments.
pub fn side_projections(p: &Partition, xs: impl IntoIterator<Item = u64>) -> (Vec<u64>, Vec<u64>) {
    let mut l = BTreeSet::new();
    let mut r = BTreeSet::new();
    for x in xs {
        let (a, b) = p.split(x);
        l.insert(a);
        r.insert(b);
    }
    (l.into_iter().collect(), r.into_iter().collect())
}

/// The rectangle over `p` whose model set is exactly `models`, if that set
/// is a product set.
pub fn rectangle_from_models(p: &Partition, models: &[u64]) -> Result<Option<Rectangle>> {
    let (l, r) = side_projections(p, models.iter().copied());
    let distinct: BTreeSet<u64> = models.iter().copied().collect();
    if (l.len() as u64) * (r.len() as u64) != distinct.len() as u64 {
        return Ok(None);
    }
    Rectangle::new(p.clone(), l, r).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{weak_eps, Distribution};
    use crate::gf2::Gf2Matrix;
    use crate::rational::ratio;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn balance_examples() {
        assert!(Partition::from_left(3, &[0]).unwrap().is_balanced());
        assert!(!Partition::from_left(3, &[]).unwrap().is_balanced());
        assert!(Partition::from_left(4, &[0, 1]).unwrap().is_balanced());
        assert!(!Partition::from_left(4, &[0]).unwrap().is_balanced());
        assert!(!Partition::from_left(4, &[0, 1, 2]).unwrap().is_balanced());
        assert!(Partition::from_left(6, &[0, 1, 2, 3])
            .unwrap()
            .is_balanced());
    }

    #[test]
    fn partition_errors() {
        assert!(Partition::new(vec![0, 1], vec![1]).is_err());
        assert!(Partition::new(vec![0, 3], vec![1]).is_err());
        let p = Partition::new(vec![2, 0], vec![1]).unwrap();
        assert_eq!(p.left(), &[0, 2]);
        let x = p.join(0b10, 0b1);
        assert_eq!(x, 0b110);
        assert_eq!(p.split(x), (0b10, 0b1));
    }

    #[test]
    fn tp_fp_examples() {
        let p = Partition::from_left(2, &[0]).unwrap();
        let f = TruthTable::from_model_strs(2, &["00", "11"]).unwrap();
        let empty = Rectangle::empty(p.clone());
        assert_eq!(tp_fp(&f, &empty).unwrap(), (0, 0));
        assert_eq!(discrepancy(&f, &empty).unwrap().value(), ratio(0, 1));

        let one = TruthTable::constant(2, true).unwrap();
        let full = Rectangle::full(p.clone()).unwrap();
        assert_eq!(tp_fp(&one, &full).unwrap(), (4, 0));
        assert_eq!(discrepancy(&one, &full).unwrap().value(), ratio(1, 1));

        assert_eq!(tp_fp(&f, &full).unwrap(), (2, 2));
        assert_eq!(discrepancy(&f, &full).unwrap().value(), ratio(0, 1));

        let g = TruthTable::zeros(3).unwrap();
        assert!(tp_fp(&g, &full).is_err());
    }

    #[test]
    fn rectangle_function_size() {
        let p = Partition::from_left(4, &[1, 3]).unwrap();
        let r = Rectangle::new(p, vec![0, 3, 2], vec![1]).unwrap();
        assert_eq!(r.size(), 3);
        let t = r.function().unwrap();
        assert_eq!(t.count_models(), 3);
        assert!(r.models().all(|x| r.contains(x)));
        assert!(Rectangle::new(Partition::from_left(2, &[0]).unwrap(), vec![2], vec![]).is_err());
    }

    #[test]
    fn dnf_cover_is_valid() {
        let f = TruthTable::from_fn(5, |x| x.count_ones() % 2 == 1 || x == 6).unwrap();
        let c = dnf_cover(&f).unwrap();
        let rep = verify_cover(&f, &c, CoverRequirements::DISJOINT_BALANCED);
        assert!(rep.ok, "{rep:?}");
        assert_eq!(c.size() as u64, f.count_models());
    }

    #[test]
    fn duplicate_rectangle_breaks_disjointness() {
        let f = TruthTable::from_fn(4, |x| x % 3 == 0).unwrap();
        let mut c = dnf_cover(&f).unwrap();
        c.rectangles.push(c.rectangles[1].clone());
        let rep = verify_cover(&f, &c, CoverRequirements::DISJOINT_BALANCED);
        assert!(rep.equivalent);
        assert!(!rep.disjoint && !rep.ok);
        let witness = rep
            .failures
            .iter()
            .find_map(|e| match e {
                CoverFailure::Overlap { assignment, .. } => Some(*assignment),
                _ => None,
            })
            .unwrap();
        assert!(c.rectangles[1].contains(witness));
        // disjointness not required: passes
        assert!(verify_cover(&f, &c, CoverRequirements::default()).ok);
    }

    #[test]
    fn missing_model_is_reported() {
        let f = TruthTable::from_fn(4, |x| x % 3 == 0).unwrap();
        let mut c = dnf_cover(&f).unwrap();
        let dropped = c.rectangles.remove(2);
        let rep = verify_cover(&f, &c, CoverRequirements::DISJOINT_BALANCED);
        assert!(!rep.equivalent);
        let x = dropped.models().next().unwrap();
        assert!(rep.failures.contains(&CoverFailure::NotEquivalent {
            assignment: x,
            in_function: true
        }));
    }

    #[test]
    fn unbalanced_cover_is_reported() {
        let f = TruthTable::constant(3, true).unwrap();
        let c = Cover::new(vec![
            Rectangle::full(Partition::from_left(3, &[]).unwrap()).unwrap()
        ]);
        let rep = verify_cover(&f, &c, CoverRequirements::DISJOINT_BALANCED);
        assert!(rep.equivalent && rep.disjoint && !rep.balanced && !rep.ok);
    }

    #[test]
    fn weak_bound_examples() {
        // model_count = 2^(n-1), eps = 1/2 -> 0
        assert_eq!(
            weak_cover_bound(&big(64), 7, &ratio(1, 2), &big(3)).unwrap(),
            ratio(0, 1)
        );
        assert_eq!(
            weak_cover_bound(&big(37), 7, &ratio(0, 1), &big(1)).unwrap(),
            ratio(37, 1)
        );
        assert_eq!(
            weak_cover_bound(&big(16), 8, &ratio(1, 32), &big(4)).unwrap(),
            ratio(2, 1)
        );
        assert!(weak_cover_bound(&big(16), 8, &ratio(1, 32), &big(0)).is_err());
    }

    #[test]
    fn strong_bound_examples() {
        assert_eq!(
            strong_cover_bound(&big(40), &ratio(1, 1), &big(3)).unwrap(),
            ratio(0, 1)
        );
        assert_eq!(
            strong_cover_bound(&big(40), &ratio(0, 1), &big(40)).unwrap(),
            ratio(1, 1)
        );
        assert_eq!(
            strong_pipeline_bound(&big(16), 8, 4, &ratio(1, 2)).unwrap(),
            ratio(2, 1)
        );
        // pipeline equals the strong bound with Delta = 2^(n - 2(m-1))
        let direct = strong_cover_bound(&big(16), &ratio(1, 2), &big(1 << (8 - 6))).unwrap();
        assert_eq!(direct, ratio(2, 1));
    }

    #[test]
    fn min_cover_size_rounding() {
        assert_eq!(min_cover_size(&ratio(-3, 2)), big(0));
        assert_eq!(min_cover_size(&ratio(3, 2)), big(2));
        assert_eq!(min_cover_size(&ratio(2, 1)), big(2));
    }

    #[test]
    fn max_rectangle_examples() {
        let zero = LinearCode::new(Gf2Matrix::zeros(2, 5)).unwrap();
        let r = max_code_rectangle_check(&zero, 0).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_log2, 5);

        let h = Gf2Matrix::from_strs(&["101", "011"]).unwrap();
        let code = LinearCode::new(h).unwrap();
        let s = crate::gf2::goodness(code.parity_check()).unwrap().s_max;
        assert_eq!(s, 1);
        let r = max_code_rectangle_check(&code, s).unwrap();
        assert_eq!(r.balanced_partitions, 6);
        assert!(r.holds);
        assert!(r.max_log2 <= 1);
    }

    #[test]
    fn max_rectangle_matches_exhaustive_biclique() {
        // n = 4: brute force over all product subsets of the full side sets
        let mut rng = crate::gen::trial_rng(21, 0);
        for _ in 0..20 {
            let code = LinearCode::new(Gf2Matrix::random(2, 4, &mut rng)).unwrap();
            let f = code.char_function().unwrap();
            for mask in 0u64..16 {
                if !is_balanced_sizes(mask.count_ones() as usize, 4) {
                    continue;
                }
                let p = Partition::from_mask(4, mask).unwrap();
                let s1: Vec<u64> = (0..1 << p.left().len()).collect();
                let s2: Vec<u64> = (0..1 << p.right().len()).collect();
                let brute = crate::codes::core_extract_bruteforce(&f, &p, &s1, &s2).unwrap();
                assert_eq!(
                    brute.size(),
                    1 << max_code_rectangle_log2(&code, &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn prune_examples() {
        let f = TruthTable::from_fn(4, |x| x % 5 == 0).unwrap();
        let c = dnf_cover(&f).unwrap();
        assert_eq!(prune_cover(&f, &c).unwrap(), c);

        // add a rectangle made only of false positives
        let p = Partition::from_left(4, &[0, 1]).unwrap();
        let bad = Rectangle::new(p, vec![1], vec![2]).unwrap();
        assert!(!f.eval(bad.models().next().unwrap()));
        let mut with_bad = c.clone();
        with_bad.rectangles.push(bad);
        let before = weak_eps(&f, &with_bad.function(4).unwrap(), &Distribution::Uniform).unwrap();
        let pruned = prune_cover(&f, &with_bad).unwrap();
        let after = weak_eps(&f, &pruned.function(4).unwrap(), &Distribution::Uniform).unwrap();
        assert!(after < before);
        assert_eq!(prune_cover(&f, &pruned).unwrap(), pruned);
    }

    #[test]
    fn rectangle_json_round_trip() {
        let p = Partition::from_left(3, &[1]).unwrap();
        let r = Rectangle::new(p, vec![1], vec![0, 3]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: Rectangle = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let bad = r#"{"partition":{"left":[0,0],"right":[1]},"left_models":[],"right_models":[]}"#;
        assert!(serde_json::from_str::<Rectangle>(bad).is_err());
    }
}
