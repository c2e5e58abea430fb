use hotplug_cache::bounds::{
    achievable_curve, memory_grid, nonprivate_converse, private_converse, yma_lb, yma_lb_grid, CURVE_NAMES,
};
use hotplug_cache::gf::{Field, FieldMatrix};
use hotplug_cache::model::{
    binom, eval_envelope, lower_convex_envelope, rat, subset_rank, subset_unrank, subsets, SystemParams, TradeoffPoint,
};
use proptest::prelude::*;

const PRIMES: &[u32] = &[2, 3, 5, 7, 11, 13, 31, 101];

fn matrix() -> impl Strategy<Value = FieldMatrix> {
    (prop::sample::select(PRIMES), 1usize..8, 1usize..8).prop_flat_map(|(q, r, c)| {
        prop::collection::vec(0..q, r * c).prop_map(move |data| {
            let f = Field::new(q).unwrap();
            // zero out a band so deficient ranks are common
            let data = data.into_iter().enumerate().map(|(i, x)| if i % 3 == 0 { 0 } else { x }).collect();
            FieldMatrix::from_flat(f, r, c, data).unwrap()
        })
    })
}

fn params() -> impl Strategy<Value = SystemParams> {
    (1usize..7, 0usize..4, 1usize..7).prop_map(|(kp, extra, n)| SystemParams::new(kp, kp + extra, n))
}

fn private_curve(name: &str) -> bool {
    name.contains("pk") || name.contains("vu")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rank_plus_nullity_is_width(m in matrix()) {
        let null = m.nullspace();
        prop_assert_eq!(m.rank() + null.len(), m.cols());
        let f = m.field();
        for v in &null {
            for r in 0..m.rows() {
                prop_assert_eq!(f.dot(m.row(r), v), 0);
            }
        }
    }

    #[test]
    fn rank_ignores_row_order_and_transpose(m in matrix(), seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..m.rows()).collect();
        let n = idx.len();
        for i in (1..n).rev() {
            idx.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        prop_assert_eq!(m.select_rows(&idx).rank(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }
}

proptest! {
    #[test]
    fn solve_recovers_a_consistent_rhs(m in matrix(), x in prop::collection::vec(0u32..1000, 8)) {
        let f = m.field();
        let x: Vec<u32> = x[..m.cols()].iter().map(|&v| v % f.modulus()).collect();
        let b: Vec<u32> = (0..m.rows()).map(|r| f.dot(m.row(r), &x)).collect();
        let y = m.solve_vec(&b).unwrap().expect("consistent system has a solution");
        for r in 0..m.rows() {
            prop_assert_eq!(f.dot(m.row(r), &y), b[r]);
        }
    }

    #[test]
    fn subset_ranking_round_trips(n in 1usize..12, k in 0usize..6) {
        let k = k.min(n);
        let all = subsets(&(0..n).collect::<Vec<_>>(), k);
        prop_assert_eq!(all.len() as u128, binom(n, k));
        for (i, s) in all.iter().enumerate() {
            prop_assert_eq!(subset_rank(s, n), i);
            prop_assert_eq!(&subset_unrank(i, n, k), s);
        }
    }

    #[test]
    fn envelope_is_idempotent_and_below_its_points(
        raw in prop::collection::vec((0i64..40, 0i64..40), 1..12)
    ) {
        let pts: Vec<TradeoffPoint> = raw.iter().map(|&(m, r)| TradeoffPoint::ints((m, 4), (r, 4))).collect();
        let env = lower_convex_envelope(&pts);
        prop_assert_eq!(lower_convex_envelope(&env), env.clone());
        for w in env.windows(2) {
            prop_assert!(w[0].m < w[1].m && w[0].r > w[1].r);
        }
        for p in &pts {
            if let Some(r) = eval_envelope(&env, &p.m) {
                prop_assert!(r <= p.r);
            }
        }
    }
}

// The exact converse is a few hundred rational evaluations per point.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn achievable_curves_sit_above_the_converse(p in params()) {
        let grid = memory_grid(&p, 24, &[]);
        for name in CURVE_NAMES {
            let Ok(curve) = achievable_curve(name, &p) else { continue };
            let env = curve.envelope();
            for m in &grid {
                let Some(r) = eval_envelope(&env, m) else { continue };
                let lb = if private_curve(name) { private_converse(&p, m) } else { nonprivate_converse(&p, m) };
                prop_assert!(r >= lb, "{} at M={}: {} < {}", name, m, r, lb);
            }
        }
    }

    #[test]
    fn converse_is_monotone_and_privacy_costs(p in params()) {
        let grid = memory_grid(&p, 16, &[]);
        for w in grid.windows(2) {
            prop_assert!(nonprivate_converse(&p, &w[0]) >= nonprivate_converse(&p, &w[1]));
            prop_assert!(private_converse(&p, &w[0]) >= private_converse(&p, &w[1]));
        }
        for m in &grid {
            prop_assert!(private_converse(&p, m) >= nonprivate_converse(&p, m));
            prop_assert!(yma_lb(&p, m) >= yma_lb_grid(&p, m));
        }
        prop_assert_eq!(nonprivate_converse(&p, &rat(0, 1)), rat(p.min_kn() as i64, 1));
    }
}
