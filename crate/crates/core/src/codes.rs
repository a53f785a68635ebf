//! Linear codes, the core extraction operator and iterative core extraction.
//!
//! For a code with parity-check matrix `H` and a partition `(X1, X2)`, write
//! `H = [H1 | H2]` by columns. A full assignment `(a, b)` is a code word iff
//! `H1 a = H2 b`, so a product set `A x B` lies inside the code iff all of
//! `A` and `B` share one syndrome `w`. The core of `S1 x S2` is therefore the
//! largest syndrome bucket product.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::boolfun::{check_var_cap, TruthTable};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::rational::pow2;
use crate::rect::{discrepancy, tp_fp, DiscValue, Partition, Rectangle};

/// A binary linear code `{x : Hx = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Gf2Matrix", into = "Gf2Matrix")]
pub struct LinearCode {
    h: Gf2Matrix,
    columns: Vec<u64>,
}

impl TryFrom<Gf2Matrix> for LinearCode {
    type Error = Error;

    fn try_from(h: Gf2Matrix) -> Result<Self> {
        Self::new(h)
    }
}

impl From<LinearCode> for Gf2Matrix {
    fn from(c: LinearCode) -> Self {
        c.h
    }
}

impl LinearCode {
    /// Syndromes are packed into one word, so at most 64 checks are allowed.
    pub fn new(h: Gf2Matrix) -> Result<Self> {
        if h.rows() > 64 {
            return Err(Error::CapExceeded {
                what: "parity checks",
                value: h.rows(),
                cap: 64,
            });
        }
        let columns = h.column_words();
        Ok(Self { h, columns })
    }

    pub fn parity_check(&self) -> &Gf2Matrix {
        &self.h
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Number of parity checks.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    pub fn rank(&self) -> usize {
        self.h.rank()
    }

    /// `Hx` packed with row `i` at bit `i`.
    pub fn syndrome(&self, x: u64) -> u64 {
        self.columns
            .iter()
            .enumerate()
            .filter(|(j, _)| x >> j & 1 == 1)
            .fold(0, |acc, (_, c)| acc ^ c)
    }

    pub fn is_codeword(&self, x: u64) -> bool {
        self.syndrome(x) == 0
    }

    /// `2^(n - rk H)`.
    pub fn model_count(&self) -> BigUint {
        pow2(self.n() - self.rank())
    }

    pub fn char_function(&self) -> Result<TruthTable> {
        check_var_cap(self.n())?;
        TruthTable::from_fn(self.n(), |x| self.is_codeword(x))
    }

    fn syndrome_vector(&self, word: u64) -> Gf2Vector {
        Gf2Vector::from_word(self.m(), word)
    }
}

pub fn char_function(code: &LinearCode) -> Result<TruthTable> {
    code.char_function()
}

/// Output of the core extraction operator. `A` is empty iff `B` is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorePair {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    /// Shared syndrome `H1 a = H2 b`; absent for the empty pair and for the
    /// brute-force oracle.
    pub w: Option<Gf2Vector>,
}

impl CorePair {
    pub fn empty() -> Self {
        Self {
            a: Vec::new(),
            b: Vec::new(),
            w: None,
        }
    }

    pub fn size(&self) -> u64 {
        self.a.len() as u64 * self.b.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn rectangle(&self, partition: &Partition) -> Result<Rectangle> {
        Rectangle::new(partition.clone(), self.a.clone(), self.b.clone())
    }
}

fn normalise(set: &[u64], width: usize) -> Result<Vec<u64>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&a| width < 64 && a >> width != 0) {
        return Err(Error::InvalidArgument(format!(
            "side assignment {bad} does not fit in {width} variables"
        )));
    }
    Ok(v)
}

fn check_partition(n: usize, p: &Partition) -> Result<()> {
    if p.n() != n {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} variables, expected {n}",
            p.n()
        )));
    }
    Ok(())
}

/// Exact core extraction for a code.
///
/// Buckets `S1` by `H1 a` and `S2` by `H2 b` and returns the bucket pair of
/// largest product; ties go to the lexicographically smallest `w`.
pub fn core_extract_code(
    code: &LinearCode,
    p: &Partition,
    s1: &[u64],
    s2: &[u64],
) -> Result<CorePair> {
    check_partition(code.n(), p)?;
    let s1 = normalise(s1, p.left().len())?;
    let s2 = normalise(s2, p.right().len())?;
    let mut left: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &a in &s1 {
        left.entry(code.syndrome(p.join(a, 0))).or_default().push(a);
    }
    let mut right: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &b in &s2 {
        right
            .entry(code.syndrome(p.join(0, b)))
            .or_default()
            .push(b);
    }
    let best = left
        .iter()
        .filter_map(|(w, a)| {
            right
                .get(w)
                .map(|b| (a.len() * b.len(), code.syndrome_vector(*w), w))
        })
        .max_by(|x, y| x.0.cmp(&y.0).then_with(|| y.1.cmp(&x.1)));
    Ok(match best {
        None => CorePair::empty(),
        Some((_, wv, w)) => CorePair {
            a: left[w].clone(),
            b: right[w].clone(),
            w: Some(wv),
        },
    })
}

/// Largest `|S1| + |S2|` accepted by [`core_extract_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 24;

/// Maximum-size product subset of `(S1 x S2) ∩ f^-1(1)` by exhaustive search
/// over subsets of the smaller side.
pub fn core_extract_bruteforce(
    f: &TruthTable,
    p: &Partition,
    s1: &[u64],
    s2: &[u64],
) -> Result<CorePair> {
    check_partition(f.n(), p)?;
    let s1 = normalise(s1, p.left().len())?;
    let s2 = normalise(s2, p.right().len())?;
    if s1.len() + s2.len() > BRUTEFORCE_CAP {
        return Err(Error::CapExceeded {
            what: "side-set size for brute-force core extraction",
            value: s1.len() + s2.len(),
            cap: BRUTEFORCE_CAP,
        });
    }
    let swap = s1.len() > s2.len();
    let (small, large) = if swap { (&s2, &s1) } else { (&s1, &s2) };
    let model = |s: u64, l: u64| {
        if swap {
            f.eval(p.join(l, s))
        } else {
            f.eval(p.join(s, l))
        }
    };
    // adjacency[i] has bit j set iff (small[i], large[j]) is a model
    let adjacency: Vec<u64> = small
        .iter()
        .map(|&s| {
            large
                .iter()
                .enumerate()
                .filter(|&(_, &l)| model(s, l))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let full = if large.len() == 64 {
        u64::MAX
    } else {
        (1u64 << large.len()) - 1
    };
    let mut best = (0u64, 0u64, 0u64);
    for sub in 1u64..1 << small.len() {
        let common = (0..small.len())
            .filter(|i| sub >> i & 1 == 1)
            .fold(full, |m, i| m & adjacency[i]);
        let size = sub.count_ones() as u64 * common.count_ones() as u64;
        if size > best.0 {
            best = (size, sub, common);
        }
    }
    if best.0 == 0 {
        return Ok(CorePair::empty());
    }
    let pick = |set: &Vec<u64>, mask: u64| -> Vec<u64> {
        set.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    };
    let (sa, la) = (pick(small, best.1), pick(large, best.2));
    let (a, b) = if swap { (la, sa) } else { (sa, la) };
    Ok(CorePair { a, b, w: None })
}

/// One round `(A_i, B_i, F_i)` of iterative core extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    /// `(A_i x B̄_i) ∪ (Ā_i x B_i)` as sorted full assignments, where the
    /// barred sets are what remains of the sides after round `i`.
    pub f: Vec<u64>,
}

/// The nonempty rounds of iterative core extraction; the next round would be
/// empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreTrace {
    pub steps: Vec<TraceStep>,
    pub l: usize,
}

/// Repeatedly extracts the core of what remains of `r`'s side sets until no
/// model of the code is left.
pub fn iterative_extraction(code: &LinearCode, p: &Partition, r: &Rectangle) -> Result<CoreTrace> {
    check_partition(code.n(), p)?;
    if r.partition() != p {
        return Err(Error::InvalidPartition(
            "rectangle partition differs from the extraction partition".into(),
        ));
    }
    let mut rem_a: BTreeSet<u64> = r.left_models().iter().copied().collect();
    let mut rem_b: BTreeSet<u64> = r.right_models().iter().copied().collect();
    let mut steps = Vec::new();
    loop {
        let sa: Vec<u64> = rem_a.iter().copied().collect();
        let sb: Vec<u64> = rem_b.iter().copied().collect();
        let core = core_extract_code(code, p, &sa, &sb)?;
        if core.is_empty() {
            break;
        }
        for x in &core.a {
            rem_a.remove(x);
        }
        for y in &core.b {
            rem_b.remove(y);
        }
        let mut f: Vec<u64> = core
            .a
            .iter()
            .flat_map(|&a| rem_b.iter().map(move |&b| p.join(a, b)))
            .chain(
                rem_a
                    .iter()
                    .flat_map(|&a| core.b.iter().map(move |&b| p.join(a, b))),
            )
            .collect();
        f.sort_unstable();
        steps.push(TraceStep {
            a: core.a,
            b: core.b,
            f,
        });
    }
    Ok(CoreTrace {
        l: steps.len(),
        steps,
    })
}

/// Outcome of checking a trace against `f` and `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceVerification {
    /// Every element of every `F_i` is a model of `r` and not of `f`.
    pub f_false_positives: bool,
    /// The `F_i` are pairwise disjoint.
    pub f_pairwise_disjoint: bool,
    /// The cores are pairwise disjoint and their union is `models(r ∧ f)`.
    pub cores_cover_exactly: bool,
    /// `|A_i||B_i|` is non-increasing.
    pub sizes_nonincreasing: bool,
    /// No round has an empty side.
    pub steps_nonempty: bool,
    pub ok: bool,
    /// First offending full assignment, if any.
    pub witness: Option<u64>,
}

impl CoreTrace {
    pub fn verify(&self, f: &TruthTable, r: &Rectangle) -> Result<TraceVerification> {
        if f.n() != r.n() {
            return Err(Error::DimensionMismatch {
                expected: f.n(),
                found: r.n(),
            });
        }
        let p = r.partition();
        let mut witness = None;

        let bad_fp = self
            .steps
            .iter()
            .flat_map(|s| &s.f)
            .find(|&&x| !r.contains(x) || f.eval(x))
            .copied();
        witness = witness.or(bad_fp);

        let mut seen = BTreeSet::new();
        let overlap = self
            .steps
            .iter()
            .flat_map(|s| &s.f)
            .find(|&&x| !seen.insert(x))
            .copied();
        witness = witness.or(overlap);

        let mut covered = BTreeSet::new();
        let mut cover_overlap = None;
        for s in &self.steps {
            for &a in &s.a {
                for &b in &s.b {
                    let x = p.join(a, b);
                    if !covered.insert(x) && cover_overlap.is_none() {
                        cover_overlap = Some(x);
                    }
                }
            }
        }
        let target: BTreeSet<u64> = r.models().filter(|&x| f.eval(x)).collect();
        let diff = target.symmetric_difference(&covered).next().copied();
        let cores_cover_exactly = cover_overlap.is_none() && diff.is_none();
        witness = witness.or(cover_overlap).or(diff);

        let sizes: Vec<u64> = self
            .steps
            .iter()
            .map(|s| s.a.len() as u64 * s.b.len() as u64)
            .collect();
        let sizes_nonincreasing = sizes.windows(2).all(|w| w[0] >= w[1]);
        let steps_nonempty = self.l == self.steps.len()
            && self
                .steps
                .iter()
                .all(|s| !s.a.is_empty() && !s.b.is_empty());

        let f_false_positives = bad_fp.is_none();
        let f_pairwise_disjoint = overlap.is_none();
        Ok(TraceVerification {
            f_false_positives,
            f_pairwise_disjoint,
            cores_cover_exactly,
            sizes_nonincreasing,
            steps_nonempty,
            ok: f_false_positives
                && f_pairwise_disjoint
                && cores_cover_exactly
                && sizes_nonincreasing
                && steps_nonempty,
            witness,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscCoreStatus {
    Holds,
    Violated,
    /// The rectangle has more false than true positives.
    PreconditionFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscCoreReport {
    pub tp: u64,
    pub fp: u64,
    pub disc: DiscValue,
    /// Size of the first extracted core of `r`.
    pub core_size: u64,
    pub status: DiscCoreStatus,
}

impl DiscCoreReport {
    /// `None` when the precondition failed.
    pub fn holds(&self) -> Option<bool> {
        match self.status {
            DiscCoreStatus::Holds => Some(true),
            DiscCoreStatus::Violated => Some(false),
            DiscCoreStatus::PreconditionFailed => None,
        }
    }
}

/// Checks `Disc(f, r) <= |core(r)| / 2^n` for the code's characteristic
/// function, comparing numerators over the shared denominator `2^n`.
pub fn disc_core_bound_check(code: &LinearCode, r: &Rectangle) -> Result<DiscCoreReport> {
    let f = code.char_function()?;
    let (tp, fp) = tp_fp(&f, r)?;
    let disc = discrepancy(&f, r)?;
    let core = core_extract_code(code, r.partition(), r.left_models(), r.right_models())?;
    let core_size = core.size();
    let status = if tp < fp {
        DiscCoreStatus::PreconditionFailed
    } else if disc.numerator <= core_size {
        DiscCoreStatus::Holds
    } else {
        DiscCoreStatus::Violated
    };
    Ok(DiscCoreReport {
        tp,
        fp,
        disc,
        core_size,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_balanced_partition, random_code, random_rectangle, trial_rng};

    fn code(rows: &[&str]) -> LinearCode {
        LinearCode::new(Gf2Matrix::from_strs(rows).unwrap()).unwrap()
    }

    fn p2() -> Partition {
        Partition::from_left(2, &[0]).unwrap()
    }

    #[test]
    fn char_function_examples() {
        let f = code(&["11"]).char_function().unwrap();
        assert_eq!(f, TruthTable::from_model_strs(2, &["00", "11"]).unwrap());

        let z = LinearCode::new(Gf2Matrix::zeros(2, 4)).unwrap();
        assert_eq!(z.char_function().unwrap().count_models(), 16);

        let c = code(&["101", "011"]);
        let f = c.char_function().unwrap();
        assert_eq!(f, TruthTable::from_model_strs(3, &["000", "111"]).unwrap());
        assert_eq!(c.model_count(), BigUint::from(2u32));
    }

    #[test]
    fn core_examples() {
        let c = code(&["11"]);
        let core = core_extract_code(&c, &p2(), &[0, 1], &[0, 1]).unwrap();
        assert_eq!((core.a.clone(), core.b.clone()), (vec![0], vec![0]));
        assert_eq!(core.w, Some(Gf2Vector::from_word(1, 0)));

        assert!(core_extract_code(&c, &p2(), &[], &[0, 1])
            .unwrap()
            .is_empty());
        let none = core_extract_code(&c, &p2(), &[0], &[1]).unwrap();
        assert!(none.is_empty() && none.b.is_empty() && none.w.is_none());

        let bad = Partition::from_left(3, &[0]).unwrap();
        assert!(core_extract_code(&c, &bad, &[0], &[0]).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        let p = Partition::from_left(4, &[0, 1]).unwrap();
        let zero = TruthTable::zeros(4).unwrap();
        assert!(core_extract_bruteforce(&zero, &p, &[0, 1], &[2])
            .unwrap()
            .is_empty());
        let one = TruthTable::constant(4, true).unwrap();
        let core = core_extract_bruteforce(&one, &p, &[0, 3], &[1, 2, 3]).unwrap();
        assert_eq!((core.a, core.b), (vec![0, 3], vec![1, 2, 3]));
    }

    #[test]
    fn code_core_matches_bruteforce() {
        let mut rng = trial_rng(8, 0);
        for _ in 0..100 {
            let c = random_code(&mut rng, 2, 6);
            let f = c.char_function().unwrap();
            let part = random_balanced_partition(&mut rng, 6);
            let r = random_rectangle(&mut rng, part);
            let fast =
                core_extract_code(&c, r.partition(), r.left_models(), r.right_models()).unwrap();
            let slow =
                core_extract_bruteforce(&f, r.partition(), r.left_models(), r.right_models())
                    .unwrap();
            assert_eq!(fast.size(), slow.size());
            assert!(fast
                .rectangle(r.partition())
                .unwrap()
                .models()
                .all(|x| f.eval(x)));
        }
    }

    #[test]
    fn trace_on_full_rectangle() {
        let c = code(&["11"]);
        let r = Rectangle::full(p2()).unwrap();
        let t = iterative_extraction(&c, &p2(), &r).unwrap();
        assert_eq!(t.l, 2);
        assert_eq!(
            (t.steps[0].a.clone(), t.steps[0].b.clone()),
            (vec![0], vec![0])
        );
        assert_eq!(
            (t.steps[1].a.clone(), t.steps[1].b.clone()),
            (vec![1], vec![1])
        );
        // F_1 = {x1=0,x2=1} ∪ {x1=1,x2=0}
        assert_eq!(t.steps[0].f, vec![1, 2]);
        assert!(t.steps[1].f.is_empty());
        assert!(t.verify(&c.char_function().unwrap(), &r).unwrap().ok);
    }

    #[test]
    fn trace_inside_code_is_single_step() {
        let c = code(&["11"]);
        let r = Rectangle::new(p2(), vec![1], vec![1]).unwrap();
        let t = iterative_extraction(&c, &p2(), &r).unwrap();
        assert_eq!(t.l, 1);
        assert_eq!(
            (t.steps[0].a.clone(), t.steps[0].b.clone()),
            (vec![1], vec![1])
        );
        assert!(t.steps[0].f.is_empty());

        let empty = Rectangle::empty(p2());
        assert_eq!(iterative_extraction(&c, &p2(), &empty).unwrap().l, 0);
        let other = Partition::from_left(2, &[1]).unwrap();
        assert!(iterative_extraction(&c, &other, &r).is_err());
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let c = code(&["11"]);
        let f = c.char_function().unwrap();
        let r = Rectangle::full(p2()).unwrap();
        let mut t = iterative_extraction(&c, &p2(), &r).unwrap();
        t.steps[1].f.push(3);
        let v = t.verify(&f, &r).unwrap();
        assert!(!v.f_false_positives && !v.ok);
        assert_eq!(v.witness, Some(3));
    }

    #[test]
    fn disc_core_examples() {
        let c = code(&["11"]);
        let full = Rectangle::full(p2()).unwrap();
        let rep = disc_core_bound_check(&c, &full).unwrap();
        assert_eq!(
            (rep.tp, rep.fp, rep.disc.numerator, rep.core_size),
            (2, 2, 0, 1)
        );
        assert_eq!(rep.holds(), Some(true));

        let inside = Rectangle::new(p2(), vec![0], vec![0]).unwrap();
        let rep = disc_core_bound_check(&c, &inside).unwrap();
        assert_eq!(rep.disc.numerator, rep.core_size);
        assert_eq!(rep.status, DiscCoreStatus::Holds);

        let outside = Rectangle::new(p2(), vec![0], vec![1]).unwrap();
        let rep = disc_core_bound_check(&c, &outside).unwrap();
        assert_eq!(rep.status, DiscCoreStatus::PreconditionFailed);
    }
}
