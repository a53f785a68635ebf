//! Seeded instance generators.
//!
//! Every random object is drawn from a `ChaCha8` stream selected by a
//! `(seed, trial)` pair, so trials can run in any order or in parallel and
//! still reproduce the same instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfun::TruthTable;
use crate::codes::LinearCode;
use crate::gf2::Gf2Matrix;
use crate::rect::{is_balanced_sizes, Partition, Rectangle};

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniformly random function on `n` variables.
///
/// Panics if `n` is above the truth-table cap.
pub fn random_truth_table<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TruthTable {
    let mut t = TruthTable::zeros(n).expect("n within cap");
    for x in 0..1u64 << n {
        if rng.random::<bool>() {
            t.set(x, true);
        }
    }
    t
}

/// Function with a uniformly chosen number of models in `0..=max_models`,
/// placed uniformly at random.
pub fn random_function_with_models<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_models: u64,
) -> TruthTable {
    let space = 1usize << n;
    let k = rng.random_range(0..=max_models.min(space as u64)) as usize;
    let models = sample(rng, space, k).into_iter().map(|x| x as u64);
    TruthTable::from_models(n, models).expect("n within cap")
}

/// Sorted subset of `0..2^width` with each element kept with probability 1/2.
pub fn random_side_set<R: Rng + ?Sized>(rng: &mut R, width: usize) -> Vec<u64> {
    (0..1u64 << width)
        .filter(|_| rng.random::<bool>())
        .collect()
}

/// Sorted uniform `k`-subset of `0..universe`.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, universe: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, universe, k).into_vec();
    v.sort_unstable();
    v
}

/// Partition of `0..n` with each variable placed on a fair coin.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let mask = (0..n).fold(0u64, |m, v| m | (rng.random::<bool>() as u64) << v);
    Partition::from_mask(n, mask).expect("mask within 0..n")
}

/// Balanced partition of `0..n`: a uniform admissible left size, then a
/// uniform subset of that size.
pub fn random_balanced_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let sizes: Vec<usize> = (0..=n).filter(|&k| is_balanced_sizes(k, n)).collect();
    let k = sizes[rng.random_range(0..sizes.len())];
    Partition::from_left(n, &random_subset(rng, n, k)).expect("subset of 0..n")
}

/// Rectangle over `partition` with random side sets.
pub fn random_rectangle<R: Rng + ?Sized>(rng: &mut R, partition: Partition) -> Rectangle {
    let l = random_side_set(rng, partition.left().len());
    let r = random_side_set(rng, partition.right().len());
    Rectangle::new(partition, l, r).expect("side sets fit their widths")
}

/// Code with a uniformly random `m x n` parity-check matrix.
pub fn random_code<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> LinearCode {
    LinearCode::new(Gf2Matrix::random(m, n, rng)).expect("m within syndrome width")
}
