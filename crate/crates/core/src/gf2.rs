//! Exact linear algebra over the two-element field.
//!
//! Matrices are stored row-major with each row packed into 64-bit words.
//! Rank is computed by in-place row elimination; nothing here touches
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::trial_rng;
use crate::rational::ratio;

/// Default cap on the column count for exhaustive goodness checks.
pub const DEFAULT_GOODNESS_CAP: usize = 18;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A vector over the two-element field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `word` (entry `i` is bit `i`).
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= 64, "from_word supports at most 64 entries");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            len,
            words: if len == 0 { vec![] } else { vec![word & mask] },
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product modulo 2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in addition");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// The packed value when the vector fits in one word.
    pub fn to_word(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Lexicographic order on the entries, entry 0 first.
impl Ord for Gf2Vector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter()).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for Gf2Vector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({self})")
    }
}

impl Serialize for Gf2Vector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gf2Vector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(serde::de::Error::custom("vector entries must be 0 or 1")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Gf2Vector::from_bits(&bits))
    }
}

/// A dense binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows written as `0`/`1` strings.
    ///
    /// An empty slice gives the `0 x 0` matrix; use [`Gf2Matrix::zeros`] for
    /// other empty shapes.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, c) in row.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => m.set(i, j, true),
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "matrix entries must be 0 or 1, found {c:?}"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Gf2Vector], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            m.row_words_mut(i).copy_from_slice(&r.words);
        }
        Ok(m)
    }

    /// Matrix with i.i.d. uniform entries drawn row-major from `rng`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.random::<bool>() {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) out of range"
        );
        self.data[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) out of range"
        );
        let w = &mut self.data[i * self.stride + j / 64];
        let mask = 1u64 << (j % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> Gf2Vector {
        Gf2Vector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for i in 0..self.rows {
            v.set(i, self.get(i, j));
        }
        v
    }

    /// Column `j` packed into a word, row `i` at bit `i`. Requires `rows <= 64`.
    pub fn column_word(&self, j: usize) -> u64 {
        assert!(self.rows <= 64, "column_word requires at most 64 rows");
        (0..self.rows).fold(0u64, |acc, i| acc | (self.get(i, j) as u64) << i)
    }

    /// All columns packed into words. Requires `rows <= 64`.
    pub fn column_words(&self) -> Vec<u64> {
        (0..self.cols).map(|j| self.column_word(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &Gf2Vector) -> Gf2Vector {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let mut out = Gf2Vector::zeros(self.rows);
        for i in 0..self.rows {
            let bit = self
                .row_words(i)
                .iter()
                .zip(&v.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            out.set(i, bit == 1);
        }
        out
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row_words(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Rows and columns selected in the given order.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<Self> {
        check_indices(row_idx, self.rows)?;
        check_indices(col_idx, self.cols)?;
        let mut m = Self::zeros(row_idx.len(), col_idx.len());
        for (i, &r) in row_idx.iter().enumerate() {
            for (j, &c) in col_idx.iter().enumerate() {
                if self.get(r, c) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// All rows, selected columns.
    pub fn select_columns(&self, col_idx: &[usize]) -> Result<Self> {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, col_idx)
    }

    /// Serialises to the text format: `"m n"` then one `0`/`1` line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.split('\n');
        let header = lines.next().unwrap_or("");
        let bad_header = || Error::Parse {
            line: 1,
            message: format!("expected header \"m n\", found {header:?}"),
        };
        let (m, n) = header.split_once(' ').ok_or_else(bad_header)?;
        let m: usize = parse_count(m).ok_or_else(bad_header)?;
        let n: usize = parse_count(n).ok_or_else(bad_header)?;
        let mut out = Self::zeros(m, n);
        for i in 0..m {
            let line_no = i + 2;
            let line = lines.next().ok_or(Error::Parse {
                line: line_no,
                message: format!("expected {m} rows, found {i}"),
            })?;
            if line.len() != n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {n} entries, found {}", line.len()),
                });
            }
            for (j, c) in line.bytes().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => out.set(i, j, true),
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("entry {} is not 0 or 1", j + 1),
                        })
                    }
                }
            }
        }
        // what follows the last row must be the terminating newline only
        match (lines.next(), lines.next()) {
            (Some(""), None) => Ok(out),
            _ => Err(Error::Parse {
                line: m + 2,
                message: "expected end of input after the last row (newline-terminated)".into(),
            }),
        }
    }
}

fn parse_count(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn check_indices(idx: &[usize], bound: usize) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in idx {
        if i >= bound {
            return Err(Error::IndexOutOfBounds { index: i, bound });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(())
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        f.write_str("]")
    }
}

impl FromStr for Gf2Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl Serialize for Gf2Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Gf2Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Gf2Matrix::parse_text(&s).map_err(serde::de::Error::custom)
    }
}

/// Rank of a set of vectors packed into words, via an xor basis.
pub fn rank_of_words(words: impl IntoIterator<Item = u64>) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut w in words {
        while w != 0 {
            let top = 63 - w.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = w;
                rank += 1;
                break;
            }
            w ^= basis[top];
        }
    }
    rank
}

/// Result of an exhaustive goodness computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    /// Largest `s` such that the matrix is `s`-good.
    pub s_max: usize,
    /// Lexicographically smallest column subset attaining the minimum rank.
    pub witness_subset: Vec<usize>,
    /// Number of columns per checked subset.
    pub subset_threshold: usize,
}

/// `ceil(n / 3)`, the default column threshold for goodness.
pub fn goodness_threshold(n: usize) -> usize {
    n.div_ceil(3)
}

/// Exhaustive goodness with the default threshold `ceil(n/3)` and cap.
pub fn goodness(m: &Gf2Matrix) -> Result<GoodnessReport> {
    goodness_with(m, goodness_threshold(m.cols()), DEFAULT_GOODNESS_CAP)
}

/// Minimum rank over all column subsets of size exactly `threshold`.
///
/// Adding columns never lowers the rank, so subsets of the minimal size
/// decide goodness for every larger subset as well.
pub fn goodness_with(m: &Gf2Matrix, threshold: usize, cap: usize) -> Result<GoodnessReport> {
    let n = m.cols();
    if n > cap {
        return Err(Error::GoodnessCapExceeded { n, cap });
    }
    if threshold > n {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} exceeds column count {n}"
        )));
    }
    type SubsetRank<'a> = Box<dyn Fn(&[usize]) -> usize + 'a>;
    let subset_rank: SubsetRank = if m.rows() <= 64 {
        let cols = m.column_words();
        Box::new(move |s: &[usize]| rank_of_words(s.iter().map(|&j| cols[j])))
    } else {
        Box::new(move |s: &[usize]| m.select_columns(s).map(|x| x.rank()).unwrap_or(0))
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for subset in (0..n).combinations(threshold) {
        let r = subset_rank(&subset);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            let stop = r == 0;
            best = Some((r, subset));
            if stop {
                break;
            }
        }
    }
    let (s_max, witness_subset) = best.unwrap_or((0, Vec::new()));
    Ok(GoodnessReport {
        s_max,
        witness_subset,
        subset_threshold: threshold,
    })
}

/// Direct check that every subset of exactly `threshold` columns has rank `>= s`.
pub fn is_s_good(m: &Gf2Matrix, s: usize, threshold: usize) -> bool {
    if s == 0 {
        return true;
    }
    (0..m.cols())
        .combinations(threshold)
        .all(|c| m.select_columns(&c).map(|x| x.rank() >= s).unwrap_or(false))
}

/// Seeded uniform sample from the space of `m x n` matrices.
pub fn sample_matrix(m: usize, n: usize, seed: u64) -> Gf2Matrix {
    Gf2Matrix::random(m, n, &mut trial_rng(seed, 0))
}

/// How each Monte-Carlo trial decided goodness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GoodnessMode {
    /// Every subset of the threshold size was checked.
    Exhaustive,
    /// Only `subsets_per_trial` random subsets were checked; the rate is an
    /// upper estimate.
    SampledSubsets { subsets_per_trial: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    /// Column threshold; `None` means `ceil(n/3)`.
    pub threshold: Option<usize>,
    /// Largest `n` checked exhaustively.
    pub cap: usize,
    /// Random subsets per trial once `n` exceeds the cap.
    pub subsets_per_trial: usize,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            cap: DEFAULT_GOODNESS_CAP,
            subsets_per_trial: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloGoodness {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub trials: u64,
    pub successes: u64,
    pub rate: BigRational,
    pub threshold: usize,
    pub mode: GoodnessMode,
}

/// Fraction of seeded random `m x n` matrices that are `s`-good.
pub fn monte_carlo_goodness(
    m: usize,
    n: usize,
    s: usize,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloGoodness> {
    monte_carlo_goodness_with(m, n, s, trials, seed, &MonteCarloOptions::default())
}

/// Trial `i` draws its matrix from the stream `(seed, i)`, so the result does
/// not depend on how trials are scheduled across threads.
pub fn monte_carlo_goodness_with(
    m: usize,
    n: usize,
    s: usize,
    trials: u64,
    seed: u64,
    opts: &MonteCarloOptions,
) -> Result<MonteCarloGoodness> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let threshold = opts.threshold.unwrap_or_else(|| goodness_threshold(n));
    if threshold > n {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} exceeds column count {n}"
        )));
    }
    let mode = if n <= opts.cap {
        GoodnessMode::Exhaustive
    } else {
        GoodnessMode::SampledSubsets {
            subsets_per_trial: opts.subsets_per_trial,
        }
    };
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let h = Gf2Matrix::random(m, n, &mut rng);
            let good = match mode {
                GoodnessMode::Exhaustive => {
                    s == 0 || goodness_with(&h, threshold, opts.cap).is_ok_and(|r| r.s_max >= s)
                }
                GoodnessMode::SampledSubsets { subsets_per_trial } => {
                    s == 0
                        || (0..subsets_per_trial).all(|_| {
                            let cols = rand::seq::index::sample(&mut rng, n, threshold).into_vec();
                            h.select_columns(&cols).is_ok_and(|x| x.rank() >= s)
                        })
                }
            };
            good as u64
        })
        .sum::<u64>();
    Ok(MonteCarloGoodness {
        m,
        n,
        s,
        trials,
        successes,
        rate: ratio(successes, trials),
        threshold,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Span size by enumerating all 2^m combinations of rows.
    fn span_rank_oracle(m: &Gf2Matrix) -> usize {
        let rows: Vec<Gf2Vector> = (0..m.rows()).map(|i| m.row(i)).collect();
        let mut span = std::collections::HashSet::new();
        for mask in 0u64..(1 << rows.len()) {
            let mut acc = Gf2Vector::zeros(m.cols());
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(r);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::identity(3).rank(), 3);
        assert_eq!(Gf2Matrix::zeros(2, 4).rank(), 0);
        let m = Gf2Matrix::from_strs(&["101", "011", "110"]).unwrap();
        assert_eq!(span_rank_oracle(&m), 2);
        assert_eq!(m.rank(), 2);
        assert_eq!(Gf2Matrix::zeros(0, 5).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(5, 0).rank(), 0);
    }

    #[test]
    fn wide_rank_matches_oracle() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..50 {
            let m = Gf2Matrix::random(6, 130, &mut rng);
            assert_eq!(m.rank(), span_rank_oracle(&m));
        }
    }

    #[test]
    fn submatrix_examples() {
        let id = Gf2Matrix::identity(3);
        let col = id.submatrix(&[0, 1, 2], &[0]).unwrap();
        assert_eq!(col, Gf2Matrix::from_strs(&["1", "0", "0"]).unwrap());
        let empty = id.submatrix(&[0, 1, 2], &[]).unwrap();
        assert_eq!((empty.rows(), empty.cols(), empty.rank()), (3, 0, 0));
        let m = Gf2Matrix::from_strs(&["101", "011"]).unwrap();
        let sub = m.submatrix(&[0, 1], &[0, 2]).unwrap();
        assert_eq!(sub, Gf2Matrix::from_strs(&["11", "01"]).unwrap());
        assert_eq!(sub.rank(), 2);
        assert_eq!(span_rank_oracle(&sub), 2);
    }

    #[test]
    fn submatrix_errors() {
        let id = Gf2Matrix::identity(3);
        let err = id.submatrix(&[0], &[3]).unwrap_err();
        assert_eq!(err, Error::IndexOutOfBounds { index: 3, bound: 3 });
        assert!(err.to_string().starts_with("index out of bounds"));
        assert_eq!(
            id.submatrix(&[1, 1], &[0]).unwrap_err(),
            Error::DuplicateIndex(1)
        );
    }

    #[test]
    fn goodness_examples() {
        let r = goodness(&Gf2Matrix::identity(3)).unwrap();
        assert_eq!(r.s_max, 1);
        assert_eq!(r.subset_threshold, 1);
        assert_eq!(r.witness_subset, vec![0]);

        assert_eq!(goodness(&Gf2Matrix::zeros(3, 7)).unwrap().s_max, 0);

        let m = Gf2Matrix::from_strs(&["100", "010"]).unwrap();
        let r = goodness(&m).unwrap();
        assert_eq!(r.s_max, 0);
        assert_eq!(r.witness_subset, vec![2]);
    }

    #[test]
    fn goodness_cap() {
        let m = Gf2Matrix::zeros(2, 19);
        let err = goodness(&m).unwrap_err();
        assert!(err.to_string().contains("use monte_carlo_goodness"));
        assert!(goodness_with(&m, 7, 19).is_ok());
    }

    #[test]
    fn goodness_is_tight() {
        let mut rng = trial_rng(5, 0);
        for _ in 0..40 {
            let m = Gf2Matrix::random(3, 7, &mut rng);
            let r = goodness(&m).unwrap();
            let t = r.subset_threshold;
            for s in 0..=r.s_max {
                assert!(is_s_good(&m, s, t));
            }
            assert!(!is_s_good(&m, r.s_max + 1, t));
            assert!(r.s_max <= m.rows());
            assert_eq!(r.witness_subset.len(), t);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_matrix(3, 7, 42), sample_matrix(3, 7, 42));
        assert_ne!(sample_matrix(3, 7, 42), sample_matrix(3, 7, 43));
        let e = sample_matrix(0, 5, 9);
        assert_eq!((e.rows(), e.cols()), (0, 5));
    }

    #[test]
    fn sampled_cell_frequency() {
        // 10^4 samples: a 99.9% binomial interval around 1/2 is about +-0.0165
        let ones = (0..10_000u64)
            .filter(|&s| sample_matrix(2, 3, s).get(1, 2))
            .count();
        let freq = ones as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn monte_carlo_edges() {
        let r = monte_carlo_goodness(3, 6, 0, 20, 1).unwrap();
        assert_eq!(r.rate, ratio(1, 1));
        assert!(monte_carlo_goodness(3, 6, 1, 0, 1).is_err());
        let a = monte_carlo_goodness(3, 9, 2, 300, 77).unwrap();
        let b = monte_carlo_goodness(3, 9, 2, 300, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_sampled_mode_is_declared() {
        let opts = MonteCarloOptions {
            cap: 4,
            subsets_per_trial: 50,
            ..Default::default()
        };
        let r = monte_carlo_goodness_with(2, 6, 1, 100, 3, &opts).unwrap();
        assert_eq!(
            r.mode,
            GoodnessMode::SampledSubsets {
                subsets_per_trial: 50
            }
        );
    }

    #[test]
    fn text_format() {
        let m = Gf2Matrix::from_strs(&["101", "011"]).unwrap();
        assert_eq!(m.to_text(), "2 3\n101\n011\n");
        assert_eq!(Gf2Matrix::parse_text("2 3\n101\n011\n").unwrap(), m);
        assert!(Gf2Matrix::parse_text("2 3\n101\n011").is_err());
        assert!(Gf2Matrix::parse_text("2 3\n101\n01\n").is_err());
        assert!(Gf2Matrix::parse_text("2  3\n101\n011\n").is_err());
        assert!(Gf2Matrix::parse_text("2 3\n101\n011\n\n").is_err());
        assert!(Gf2Matrix::parse_text("1 3\n1 1\n").is_err());
        assert_eq!(
            Gf2Matrix::parse_text("0 4\n").unwrap(),
            Gf2Matrix::zeros(0, 4)
        );
    }

    #[test]
    fn vector_order_is_lexicographic() {
        let a = Gf2Vector::from_bits(&[false, true]);
        let b = Gf2Vector::from_bits(&[true, false]);
        assert!(a < b);
        assert_eq!(Gf2Vector::from_word(2, 0b10), a);
    }

    #[test]
    fn mul_vec_matches_columns() {
        let m = Gf2Matrix::from_strs(&["101", "011"]).unwrap();
        let v = Gf2Vector::from_bits(&[true, true, true]);
        assert!(m.mul_vec(&v).is_zero());
        assert_eq!(m.column_word(2), 0b11);
    }
}
