use kclab::bilinear::{bilinear_extension, condition_to_affine, BilinearForm};
use kclab::boolfun::{strong_eps, weak_eps, Distribution, PartialAssignment, TruthTable};
use kclab::codes::iterative_extraction;
use kclab::gen::{
    random_balanced_partition, random_code, random_rectangle, random_truth_table, trial_rng,
};
use kclab::gf2::{goodness, Gf2Matrix};
use kclab::nnf::{self, random_ddnnf, DdnnfCircuit};
use kclab::rational::ratio;
use kclab::rect::{
    discrepancy, dnf_cover, strong_cover_bound, tp_fp, weak_cover_bound, Cover, Partition,
    Rectangle,
};
use num_bigint::BigUint;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Gf2Matrix> {
    (1usize..8, 1usize..10, any::<u64>())
        .prop_map(|(r, c, seed)| Gf2Matrix::random(r, c, &mut trial_rng(seed, 0)))
}

fn table(max_n: usize) -> impl Strategy<Value = TruthTable> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| random_truth_table(&mut trial_rng(seed, 1), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.rows().min(m.cols()));
    }

    #[test]
    fn rank_is_monotone_under_column_selection(m in matrix(), mask in any::<u16>()) {
        let cols: Vec<usize> = (0..m.cols()).filter(|j| mask >> j & 1 == 1).collect();
        let sub = m.select_columns(&cols).unwrap();
        prop_assert!(sub.rank() <= m.rank());
        prop_assert!(sub.rank() <= cols.len());
    }

    #[test]
    fn matrix_text_round_trip(m in matrix()) {
        prop_assert_eq!(Gf2Matrix::parse_text(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn goodness_witness_attains_minimum(m in matrix()) {
        let rep = goodness(&m).unwrap();
        let w = m.select_columns(&rep.witness_subset).unwrap();
        prop_assert_eq!(w.rank(), rep.s_max);
        prop_assert_eq!(rep.witness_subset.len(), rep.subset_threshold);
    }

    #[test]
    fn truth_table_text_round_trip(f in table(10)) {
        prop_assert_eq!(TruthTable::parse_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn weak_eps_is_symmetric_and_strong_dominates(f in table(8), seed in any::<u64>()) {
        let g = random_truth_table(&mut trial_rng(seed, 2), f.n());
        let u = Distribution::Uniform;
        prop_assert_eq!(weak_eps(&f, &g, &u).unwrap(), weak_eps(&g, &f, &u).unwrap());
        if !f.is_zero() {
            prop_assert!(strong_eps(&f, &g, &u).unwrap() >= weak_eps(&f, &g, &u).unwrap());
        }
    }

    #[test]
    fn disc_matches_tp_fp(f in table(8), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 3);
        let part = random_balanced_partition(&mut rng, f.n().max(2));
        let r = random_rectangle(&mut rng, part);
        prop_assume!(r.n() == f.n());
        let (tp, fp) = tp_fp(&f, &r).unwrap();
        prop_assert_eq!(tp + fp, r.size());
        prop_assert_eq!(discrepancy(&f, &r).unwrap().numerator, tp.abs_diff(fp));
    }

    #[test]
    fn disjoint_cover_signed_identity(f in table(7), seed in any::<u64>()) {
        // g is an arbitrary disjoint cover; compare its function against f
        let g = random_truth_table(&mut trial_rng(seed, 4), f.n());
        let cover: Cover = dnf_cover(&g).unwrap();
        let signed: i64 = cover
            .rectangles
            .iter()
            .map(|r| {
                let (tp, fp) = tp_fp(&f, r).unwrap();
                tp as i64 - fp as i64
            })
            .sum();
        let missed = f.and(&g.not()).unwrap().count_models() as i64;
        let extra = f.not().and(&g).unwrap().count_models() as i64;
        prop_assert_eq!(f.count_models() as i64 - signed, missed + extra);
    }

    #[test]
    fn cover_bounds_are_monotone(
        mc in 0u64..1000, extra in 0u64..100,
        p in 0i64..=16, dp in 0i64..=16, delta in 1u64..50, dd in 0u64..50,
    ) {
        let n = 10;
        let (e1, e2) = (ratio(p, 16), ratio((p + dp).min(16), 16));
        let (m1, m2) = (BigUint::from(mc), BigUint::from(mc + extra));
        let (d1, d2) = (BigUint::from(delta), BigUint::from(delta + dd));
        let w = |m: &BigUint, e, d: &BigUint| weak_cover_bound(m, n, e, d).unwrap();
        let s = |m: &BigUint, e, d: &BigUint| strong_cover_bound(m, e, d).unwrap();
        prop_assert!(w(&m1, &e1, &d1) <= w(&m2, &e1, &d1));
        prop_assert!(w(&m1, &e1, &d1) >= w(&m1, &e2, &d1));
        prop_assert!(s(&m1, &e1, &d1) <= s(&m2, &e1, &d1));
        prop_assert!(s(&m1, &e1, &d1) >= s(&m1, &e2, &d1));
        // larger Delta shrinks a nonnegative bound
        let sv = s(&m1, &e1, &d1);
        prop_assert!(sv >= s(&m1, &e1, &d2));
        let wv = w(&m1, &e1, &d1);
        if wv >= ratio(0, 1) {
            prop_assert!(wv >= w(&m1, &e1, &d2));
        }
    }

    #[test]
    fn trace_invariants(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 5);
        let n = 3 + (seed % 6) as usize;
        let code = random_code(&mut rng, 1 + (seed % 3) as usize, n);
        let p = random_balanced_partition(&mut rng, n);
        let r = random_rectangle(&mut rng, p.clone());
        let t = iterative_extraction(&code, &p, &r).unwrap();
        prop_assert!(t.verify(&code.char_function().unwrap(), &r).unwrap().ok);
    }

    #[test]
    fn nnf_round_trip_and_count(seed in any::<u64>(), n in 1usize..9) {
        let c = random_ddnnf(&mut trial_rng(seed, 6), n);
        let text = nnf::emit(&c);
        let back = nnf::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(nnf::emit(&back), text);
        let f = c.function().unwrap();
        let d = DdnnfCircuit::certify(c).unwrap();
        prop_assert_eq!(d.model_count(), BigUint::from(f.count_models()));
    }

    #[test]
    fn builder_validates(f in table(8)) {
        let order: Vec<usize> = (0..f.n()).rev().collect();
        let c = nnf::from_truth_table(&f, &order).unwrap();
        prop_assert!(nnf::validate(&c).is_ddnnf());
        prop_assert_eq!(c.function().unwrap(), f);
    }

    #[test]
    fn affine_round_trip(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 7);
        let n = 1 + (seed % 4) as usize;
        let bf = BilinearForm::new(Gf2Matrix::random(n, n, &mut rng)).unwrap();
        let c: Vec<usize> = (0..n).filter(|i| seed >> i & 1 == 1).collect();
        let r: Vec<usize> = (0..n).filter(|j| seed >> (8 + j) & 1 == 1).collect();
        let fixed: Vec<usize> = (0..n)
            .filter(|i| !c.contains(i))
            .chain((0..n).filter(|j| !r.contains(j)).map(|j| n + j))
            .collect();
        let a = PartialAssignment::from_bits(&fixed, seed >> 16).unwrap();
        let ac = condition_to_affine(&bf, &c, &r, &a).unwrap();
        prop_assert_eq!(ac.function().unwrap(), bf.function().unwrap().condition(&a).unwrap());
        let ext = bilinear_extension(&ac).unwrap();
        prop_assert!(ext.rank() >= ac.a_sub.rank());
        let e = PartialAssignment::new(vec![(0, true), (c.len() + 1, true)]).unwrap();
        prop_assert_eq!(ext.function().unwrap().condition(&e).unwrap(), ac.function().unwrap());
    }

    #[test]
    fn rectangle_size_is_product(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = trial_rng(seed, 8);
        let r: Rectangle = random_rectangle(&mut rng, Partition::from_mask(n, seed % (1 << n)).unwrap());
        prop_assert_eq!(r.function().unwrap().count_models(), r.size());
        prop_assert_eq!(r.size(), r.left_models().len() as u64 * r.right_models().len() as u64);
    }
}
