//! Explicit Boolean functions, distributions over assignments and the
//! weak/strong approximation metrics.
//!
//! A [`TruthTable`] on `n` variables stores one bit per assignment. The
//! assignment is read as an unsigned integer with `x1` at the least
//! significant bit, so the string `"011"` (x1 = 0, x2 = 1, x3 = 1) is index 6.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{dyadic, pow2_int};

/// Default variable cap for explicit truth tables (2^24 bits = 2 MiB).
pub const DEFAULT_VAR_CAP: usize = 24;

/// Absolute ceiling on the cap, whatever the override says.
const HARD_VAR_CAP: usize = 34;

/// Variable cap, overridable through the `KCLAB_CAP` environment variable.
pub fn var_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("KCLAB_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map_or(DEFAULT_VAR_CAP, |c| c.min(HARD_VAR_CAP))
    })
}

pub(crate) fn check_var_cap(n: usize) -> Result<()> {
    let cap = var_cap();
    if n > cap {
        Err(Error::CapExceeded {
            what: "variable count",
            value: n,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Parses an assignment written `x1 x2 ... xn` left to right, e.g. `"011"`.
pub fn parse_assignment(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::InvalidArgument(
            "assignment longer than 64 bits".into(),
        ));
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        b'0' => Ok(acc),
        b'1' => Ok(acc | 1 << i),
        _ => Err(Error::InvalidArgument(format!("bad assignment {s:?}"))),
    })
}

/// Inverse of [`parse_assignment`].
pub fn format_assignment(x: u64, n: usize) -> String {
    (0..n)
        .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Binary Boolean connectives, plus negation of the left operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Not,
}

/// Values for a subset of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartialAssignment {
    /// `(variable, value)` pairs sorted by variable, no duplicates.
    entries: Vec<(usize, bool)>,
}

impl PartialAssignment {
    pub fn new(mut entries: Vec<(usize, bool)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIndex(w[0].0));
        }
        Ok(Self { entries })
    }

    /// Assigns `vars[i]` the value of bit `i` of `values`.
    pub fn from_bits(vars: &[usize], values: u64) -> Result<Self> {
        Self::new(
            vars.iter()
                .enumerate()
                .map(|(i, &v)| (v, values >> i & 1 == 1))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(usize, bool)] {
        &self.entries
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        self.entries
            .binary_search_by_key(&var, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// `(mask, values)` words over `n <= 64` variables.
    pub fn masks(&self) -> (u64, u64) {
        self.entries.iter().fold((0, 0), |(m, v), &(var, b)| {
            (m | 1 << var, v | (b as u64) << var)
        })
    }
}

/// A Boolean function on `n` variables given by its full table of values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    fn raw_zeros(n: usize) -> Self {
        let bits = 1usize << n;
        Self {
            n,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn tail_mask(&self) -> u64 {
        let bits = 1usize << self.n;
        if bits >= 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_var_cap(n)?;
        Ok(Self::raw_zeros(n))
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        if value {
            t.words.iter_mut().for_each(|w| *w = u64::MAX);
            let last = t.words.len() - 1;
            t.words[last] &= t.tail_mask();
        }
        Ok(t)
    }

    pub fn from_models(n: usize, models: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for x in models {
            if x >> n != 0 {
                return Err(Error::IndexOutOfBounds {
                    index: x as usize,
                    bound: 1 << n,
                });
            }
            t.set(x, true);
        }
        Ok(t)
    }

    /// Models written as `x1 x2 ... xn` strings.
    pub fn from_model_strs(n: usize, models: &[&str]) -> Result<Self> {
        let xs = models
            .iter()
            .map(|s| {
                if s.len() != n {
                    Err(Error::DimensionMismatch {
                        expected: n,
                        found: s.len(),
                    })
                } else {
                    parse_assignment(s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_models(n, xs)
    }

    pub fn from_fn(n: usize, pred: impl Fn(u64) -> bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for x in 0..1u64 << n {
            if pred(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    /// The projection function `x_var` on `n` variables.
    pub fn var(n: usize, var: usize) -> Result<Self> {
        if var >= n {
            return Err(Error::IndexOutOfBounds {
                index: var,
                bound: n,
            });
        }
        Self::from_fn(n, |x| x >> var & 1 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: u64) -> bool {
        debug_assert!(x >> self.n == 0, "assignment out of range");
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u64, value: bool) {
        assert!(x >> self.n == 0, "assignment out of range");
        let w = &mut self.words[(x / 64) as usize];
        if value {
            *w |= 1 << (x % 64);
        } else {
            *w &= !(1 << (x % 64));
        }
    }

    pub fn count_models(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Models in increasing order.
    pub fn models(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }

    /// Whether every model of `self` is a model of `other`.
    pub fn entails(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn not(&self) -> Self {
        let mut t = self.clone();
        t.words.iter_mut().for_each(|w| *w = !*w);
        let last = t.words.len() - 1;
        t.words[last] &= t.tail_mask();
        t
    }

    /// Applies `op`; for [`BoolOp::Not`] the second operand only has to
    /// match in variable count and is otherwise ignored.
    pub fn combine(&self, other: &Self, op: BoolOp) -> Result<Self> {
        self.check_same_n(other)?;
        if op == BoolOp::Not {
            return Ok(self.not());
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| match op {
                BoolOp::And => a & b,
                BoolOp::Or => a | b,
                BoolOp::Xor => a ^ b,
                BoolOp::Not => unreachable!(),
            })
            .collect();
        Ok(Self { n: self.n, words })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::And)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::Or)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.combine(other, BoolOp::Xor)
    }

    /// Fixes the assigned variables and returns the function of the
    /// remaining ones, which keep their relative order.
    pub fn condition(&self, partial: &PartialAssignment) -> Result<Self> {
        if let Some(v) = partial.vars().find(|&v| v >= self.n) {
            return Err(Error::IndexOutOfBounds {
                index: v,
                bound: self.n,
            });
        }
        let (mask, values) = partial.masks();
        let free: Vec<usize> = (0..self.n).filter(|v| mask >> v & 1 == 0).collect();
        let mut out = Self::raw_zeros(free.len());
        for y in 0..1u64 << free.len() {
            let x = free
                .iter()
                .enumerate()
                .fold(values, |acc, (i, &v)| acc | (y >> i & 1) << v);
            if self.eval(x) {
                out.set(y, true);
            }
        }
        Ok(out)
    }

    /// Number of assignments on which the two functions differ.
    pub fn disagreement(&self, other: &Self) -> Result<u64> {
        Ok(self.xor(other)?.count_models())
    }

    /// Hex digits of the table read as the integer `sum f(x) 2^x`, most
    /// significant digit first; assignments 0..4 sit in the last digit.
    pub fn to_hex(&self) -> String {
        let digits = ((1usize << self.n) / 4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nibble = (self.words[d / 16] >> ((d % 16) * 4)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    /// Text format: `n` on line one, the hex string on line two.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.n, self.to_hex())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or("").trim();
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("expected variable count, found {first:?}"),
        })?;
        check_var_cap(n)?;
        let hex = lines.next().unwrap_or("").trim();
        let digits = ((1usize << n) / 4).max(1);
        if hex.len() != digits {
            return Err(Error::Parse {
                line: 2,
                message: format!("expected {digits} hex digits, found {}", hex.len()),
            });
        }
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: 3,
                message: format!("unexpected trailing content {extra:?}"),
            });
        }
        let mut t = Self::raw_zeros(n);
        for (k, c) in hex.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| Error::Parse {
                line: 2,
                message: format!("invalid hex digit {c:?}"),
            })? as u64;
            t.words[k / 16] |= nibble << ((k % 16) * 4);
        }
        if t.words[t.words.len() - 1] & !t.tail_mask() != 0 {
            return Err(Error::Parse {
                line: 2,
                message: format!("bits set beyond the 2^{n} assignments"),
            });
        }
        Ok(t)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
    }
}

/// A probability distribution over the assignments of `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "weights")]
pub enum Distribution {
    Uniform,
    /// Independent variables; entry `i` is the probability that `x_{i+1} = 1`.
    Product(Vec<BigRational>),
    /// One weight per assignment, indexed by the assignment integer.
    Explicit(Vec<BigRational>),
}

impl Distribution {
    pub fn product(p: Vec<BigRational>) -> Result<Self> {
        if let Some(bad) = p
            .iter()
            .find(|q| q.is_negative() || **q > BigRational::one())
        {
            return Err(Error::InvalidArgument(format!(
                "variable probability {bad} outside [0, 1]"
            )));
        }
        Ok(Self::Product(p))
    }

    pub fn explicit(w: Vec<BigRational>) -> Result<Self> {
        if !w.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "explicit distribution needs 2^n weights, found {}",
                w.len()
            )));
        }
        if w.iter().any(|q| q.is_negative()) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        let total: BigRational = w.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self::Explicit(w))
    }

    fn check_n(&self, n: usize) -> Result<()> {
        let found = match self {
            Distribution::Uniform => return Ok(()),
            Distribution::Product(p) => p.len(),
            Distribution::Explicit(w) => w.len().trailing_zeros() as usize,
        };
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
        Ok(())
    }
}

/// Exact probability that `f` is true under `dist`.
pub fn prob(f: &TruthTable, dist: &Distribution) -> Result<BigRational> {
    dist.check_n(f.n())?;
    Ok(match dist {
        Distribution::Uniform => dyadic(f.count_models(), f.n()),
        Distribution::Explicit(w) => f.models().map(|x| &w[x as usize]).sum(),
        Distribution::Product(p) => {
            // fold out the highest variable repeatedly
            let mut mass: Vec<BigRational> = (0..1u64 << f.n())
                .map(|x| {
                    if f.eval(x) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect();
            for var in (0..f.n()).rev() {
                let half = 1usize << var;
                let q = &p[var];
                let one_minus = BigRational::one() - q;
                mass = (0..half)
                    .map(|i| &one_minus * &mass[i] + q * &mass[i + half])
                    .collect();
            }
            mass.pop().unwrap_or_else(BigRational::zero)
        }
    })
}

/// `Pr_D[f != g]`.
pub fn weak_eps(f: &TruthTable, g: &TruthTable, dist: &Distribution) -> Result<BigRational> {
    prob(&f.xor(g)?, dist)
}

/// `Pr_D[f != g] / Pr_D[f = 1]`.
pub fn strong_eps(f: &TruthTable, g: &TruthTable, dist: &Distribution) -> Result<BigRational> {
    let err = weak_eps(f, g, dist)?;
    let mass = prob(f, dist)?;
    if mass.is_zero() {
        return Err(Error::StrongUndefined);
    }
    Ok(err / mass)
}

/// Both approximation metrics for a candidate approximation `g` of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub error_prob: BigRational,
    pub model_prob: BigRational,
    pub weak_eps: BigRational,
    /// `None` when `f` has probability zero.
    pub strong_eps: Option<BigRational>,
}

pub fn approx_report(f: &TruthTable, g: &TruthTable, dist: &Distribution) -> Result<ApproxReport> {
    let error_prob = weak_eps(f, g, dist)?;
    let model_prob = prob(f, dist)?;
    let strong = (!model_prob.is_zero()).then(|| &error_prob / &model_prob);
    Ok(ApproxReport {
        weak_eps: error_prob.clone(),
        error_prob,
        model_prob,
        strong_eps: strong,
    })
}

/// Logarithm base used by [`trivial_weak_threshold`].
pub const THRESHOLD_LOG_BASE: u32 = 2;

/// Smallest integer `n0 >= log2(1/eps) / (1 - alpha)`, clamped at zero.
///
/// Every function on more than `n0` variables with at most `2^(alpha n)`
/// models is then weakly `eps`-approximated by the constant 0 under the
/// uniform distribution. Computed exactly: with `1 - alpha = a/b` and
/// `1/eps = p/q`, `n0` is the least `k` with `2^(k a) q^b >= p^b`.
pub fn trivial_weak_threshold(alpha: &BigRational, eps: &BigRational) -> Result<u64> {
    if alpha.is_negative() || *alpha >= BigRational::one() {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let gap = BigRational::one() - alpha;
    let inv = eps.recip();
    let (a, b) = (gap.numer().clone(), gap.denom().clone());
    let b: u32 = u32::try_from(b)
        .map_err(|_| Error::InvalidArgument("alpha denominator too large".into()))?;
    let a: usize = usize::try_from(a)
        .map_err(|_| Error::InvalidArgument("alpha numerator too large".into()))?;
    let lhs_q = inv.denom().pow(b);
    let rhs = inv.numer().pow(b);
    let holds = |k: u64| -> bool { pow2_int(k as usize * a) * &lhs_q >= rhs };

    // start just below the floating-point estimate, then walk up exactly
    let estimate = crate::rational::to_f64(&inv).log2() / crate::rational::to_f64(&gap);
    let mut k = if estimate.is_finite() && estimate > 2.0 {
        estimate.floor() as u64 - 2
    } else {
        0
    };
    while k > 0 && holds(k - 1) {
        k -= 1;
    }
    while !holds(k) {
        k += 1;
    }
    Ok(k)
}

/// `|count(g) - count(f)|` as a big integer.
pub fn count_gap(f: &TruthTable, g: &TruthTable) -> BigUint {
    let d = BigInt::from(g.count_models()) - BigInt::from(f.count_models());
    d.magnitude().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn tt(n: usize, models: &[&str]) -> TruthTable {
        TruthTable::from_model_strs(n, models).unwrap()
    }

    #[test]
    fn assignment_encoding() {
        assert_eq!(parse_assignment("011").unwrap(), 6);
        assert_eq!(format_assignment(6, 3), "011");
        assert!(parse_assignment("0a1").is_err());
    }

    #[test]
    fn combine_examples() {
        let f = tt(3, &["000", "111", "101"]);
        assert!(f.xor(&f).unwrap().is_zero());
        let g = TruthTable::zeros(2).unwrap();
        assert!(matches!(f.and(&g), Err(Error::DimensionMismatch { .. })));
        assert_eq!(f.combine(&f, BoolOp::Not).unwrap().count_models(), 5);
        assert_eq!(f.not().not(), f);
    }

    #[test]
    fn condition_examples() {
        let x1 = TruthTable::var(2, 0).unwrap();
        let x2 = TruthTable::var(2, 1).unwrap();
        let f = x1.and(&x2).unwrap();
        let c = f
            .condition(&PartialAssignment::new(vec![(0, true)]).unwrap())
            .unwrap();
        assert_eq!(c, TruthTable::var(1, 0).unwrap());
        assert_eq!(c.count_models(), 1);
        let bad = PartialAssignment::new(vec![(5, true)]).unwrap();
        assert!(f.condition(&bad).is_err());
        assert!(PartialAssignment::new(vec![(1, true), (1, false)]).is_err());
    }

    #[test]
    fn code_function_count() {
        // parity checks 101 and 011: x1 + x3 = 0 and x2 + x3 = 0
        let f = TruthTable::from_fn(3, |x| {
            let b = |i: u64| x >> i & 1;
            b(0) ^ b(2) == 0 && b(1) ^ b(2) == 0
        })
        .unwrap();
        let brute = (0..8u64)
            .filter(|&x| {
                let s = format_assignment(x, 3);
                s == "000" || s == "111"
            })
            .count() as u64;
        assert_eq!(f.count_models(), brute);
        assert_eq!(f.count_models(), 2);
    }

    #[test]
    fn prob_examples() {
        let one = TruthTable::constant(3, true).unwrap();
        assert_eq!(prob(&one, &Distribution::Uniform).unwrap(), ratio(1, 1));
        let p = Distribution::product(vec![ratio(1, 3), ratio(1, 2), ratio(1, 5)]).unwrap();
        assert_eq!(prob(&one, &p).unwrap(), ratio(1, 1));

        let two = tt(3, &["000", "111"]);
        assert_eq!(prob(&two, &Distribution::Uniform).unwrap(), ratio(1, 4));

        // x1 under p1 = 1/3, p2 = 1/2: models 10 and 11 weigh 1/3*1/2 each
        let x1 = TruthTable::var(2, 0).unwrap();
        let d = Distribution::product(vec![ratio(1, 3), ratio(1, 2)]).unwrap();
        let manual = ratio(1, 3) * ratio(1, 2) + ratio(1, 3) * ratio(1, 2);
        assert_eq!(prob(&x1, &d).unwrap(), manual);
        assert_eq!(manual, ratio(1, 3));
    }

    #[test]
    fn explicit_distribution() {
        let w = vec![ratio(1, 2), ratio(1, 4), ratio(1, 8), ratio(1, 8)];
        let d = Distribution::explicit(w).unwrap();
        let f = tt(2, &["10", "11"]);
        assert_eq!(prob(&f, &d).unwrap(), ratio(3, 8));
        assert!(Distribution::explicit(vec![ratio(1, 2), ratio(1, 4)]).is_err());
        assert!(Distribution::explicit(vec![ratio(1, 1); 3]).is_err());
        assert!(prob(&tt(3, &[]), &d).is_err());
    }

    #[test]
    fn weak_eps_examples() {
        let f = tt(3, &["000", "111"]);
        assert!(weak_eps(&f, &f, &Distribution::Uniform).unwrap().is_zero());
        let g = tt(3, &["000", "111", "010"]);
        assert_eq!(
            weak_eps(&f, &g, &Distribution::Uniform).unwrap(),
            ratio(1, 8)
        );
        let zero = TruthTable::zeros(3).unwrap();
        assert_eq!(
            weak_eps(&f, &zero, &Distribution::Uniform).unwrap(),
            ratio(2, 8)
        );
    }

    #[test]
    fn strong_eps_examples() {
        let f = tt(3, &["000", "111"]);
        let u = Distribution::Uniform;
        assert!(strong_eps(&f, &f, &u).unwrap().is_zero());
        let zero = TruthTable::zeros(3).unwrap();
        assert_eq!(strong_eps(&f, &zero, &u).unwrap(), ratio(1, 1));
        let g = tt(3, &["000"]);
        assert_eq!(strong_eps(&f, &g, &u).unwrap(), ratio(1, 2));
        assert_eq!(
            strong_eps(&zero, &f, &u).unwrap_err(),
            Error::StrongUndefined
        );

        let r = approx_report(&zero, &f, &u).unwrap();
        assert!(r.strong_eps.is_none());
        assert_eq!(r.weak_eps, ratio(1, 4));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(
            trivial_weak_threshold(&ratio(1, 2), &ratio(1, 8)).unwrap(),
            6
        );
        assert_eq!(
            trivial_weak_threshold(&ratio(0, 1), &ratio(1, 2)).unwrap(),
            1
        );
        assert_eq!(
            trivial_weak_threshold(&ratio(0, 1), &ratio(1, 1)).unwrap(),
            0
        );
        assert_eq!(
            trivial_weak_threshold(&ratio(0, 1), &ratio(3, 1)).unwrap(),
            0
        );
        // log2(10) / (2/3) = 4.98...
        assert_eq!(
            trivial_weak_threshold(&ratio(1, 3), &ratio(1, 10)).unwrap(),
            5
        );
        assert!(trivial_weak_threshold(&ratio(1, 1), &ratio(1, 8)).is_err());
        assert!(trivial_weak_threshold(&ratio(1, 2), &ratio(0, 1)).is_err());
    }

    #[test]
    fn threshold_property_check() {
        let n0 = trivial_weak_threshold(&ratio(1, 2), &ratio(1, 8)).unwrap();
        assert!(n0 < 8);
        let mut rng = crate::gen::trial_rng(3, 0);
        for _ in 0..50 {
            let f = crate::gen::random_function_with_models(&mut rng, 8, 16);
            assert!(f.count_models() <= 16);
            let e = weak_eps(&f, &TruthTable::zeros(8).unwrap(), &Distribution::Uniform).unwrap();
            assert!(e <= ratio(16, 256));
            assert!(e < ratio(1, 8));
        }
    }

    #[test]
    fn hex_format() {
        let f = tt(3, &["000", "111"]);
        // bits 0 and 7 -> 0x81
        assert_eq!(f.to_hex(), "81");
        assert_eq!(f.to_text(), "3\n81\n");
        assert_eq!(TruthTable::parse_text("3\n81\n").unwrap(), f);
        let g = tt(1, &["1"]);
        assert_eq!(g.to_hex(), "2");
        assert!(TruthTable::parse_text("1\n4\n").is_err());
        assert!(TruthTable::parse_text("3\n8\n").is_err());
        assert!(TruthTable::parse_text("3\nzz\n").is_err());
        let big = TruthTable::from_fn(7, |x| x % 3 == 0).unwrap();
        assert_eq!(TruthTable::parse_text(&big.to_text()).unwrap(), big);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            TruthTable::zeros(var_cap() + 1),
            Err(Error::CapExceeded { .. })
        ));
    }
}
