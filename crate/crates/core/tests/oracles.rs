//! Library results checked against brute-force enumeration that does not
//! go through the code under test.

use hotplug_cache::gf::{Field, FieldMatrix};
use hotplug_cache::mds::{assert_mds, vandermonde, MdsCheck, MdsSpec};
use hotplug_cache::model::{all_words, subsets, DemandVector, FileLibrary, SystemParams, TradeoffPoint};
use hotplug_cache::schemes::{build_scheme, PkPlus, Scheme, SecretSpace};
use hotplug_cache::verify::{seeded_secrets, verify_correctness, verify_privacy, CorrectnessOptions};

fn det2(f: Field, a: &[u32], b: &[u32]) -> u32 {
    f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0]))
}

fn det3(f: Field, m: [&[u32]; 3]) -> u32 {
    let minor = |c0: usize, c1: usize| f.sub(f.mul(m[1][c0], m[2][c1]), f.mul(m[1][c1], m[2][c0]));
    let t0 = f.mul(m[0][0], minor(1, 2));
    let t1 = f.mul(m[0][1], minor(0, 2));
    let t2 = f.mul(m[0][2], minor(0, 1));
    f.add(f.sub(t0, t1), t2)
}

#[test]
fn rank_one_matrix_by_minors() {
    let f = Field::new(5).unwrap();
    let m = FieldMatrix::from_rows(f, &[vec![1, 1], vec![2, 2]]).unwrap();
    assert_eq!(det2(f, m.row(0), m.row(1)), 0);
    assert!(m.as_flat().iter().any(|&x| x != 0));
    assert_eq!(m.rank(), 1);
}

#[test]
fn solve_matches_exhaustive_search() {
    let f = Field::new(5).unwrap();
    let a = FieldMatrix::from_rows(f, &[vec![1, 1], vec![1, 2]]).unwrap();
    let b = [3, 4];
    let hits: Vec<Vec<u32>> = all_words(5, 2)
        .into_iter()
        .map(|w| w.into_iter().map(|x| x as u32).collect::<Vec<u32>>())
        .filter(|x| (0..2).all(|r| f.dot(a.row(r), x) == b[r]))
        .collect();
    assert_eq!(hits, vec![vec![2, 1]]);
    assert_eq!(a.solve_vec(&b).unwrap(), Some(vec![2, 1]));
}

#[test]
fn nullspace_of_one_equation() {
    let f = Field::new(7).unwrap();
    let m = FieldMatrix::from_rows(f, &[vec![1, 2, 3]]).unwrap();
    let basis = m.nullspace();
    assert_eq!(basis.len(), 2);
    for v in &basis {
        assert_eq!(f.add(f.add(v[0], f.mul(2, v[1])), f.mul(3, v[2])), 0);
    }
    // the basis spans all 49 solutions
    let solutions = all_words(7, 3)
        .into_iter()
        .filter(|w| (w[0] + 2 * w[1] + 3 * w[2]) % 7 == 0)
        .count();
    assert_eq!(solutions, 49);
    assert_eq!(FieldMatrix::from_rows(f, &basis).unwrap().rank(), 2);
}

#[test]
fn small_vandermonde_minors() {
    let f = Field::new(5).unwrap();
    let g = vandermonde(MdsSpec::new(2, 3, 5)).unwrap();
    assert_eq!(g.to_rows(), vec![vec![1, 1], vec![1, 2], vec![1, 3]]);
    for pair in subsets(&[0, 1, 2], 2) {
        assert_ne!(det2(f, g.row(pair[0]), g.row(pair[1])), 0, "{pair:?}");
    }
    assert_eq!(assert_mds(&g, 2).unwrap(), MdsCheck::Pass);
}

#[test]
fn rate_one_fifth_code_over_gf17() {
    let f = Field::new(17).unwrap();
    let g = vandermonde(MdsSpec::new(3, 15, 17)).unwrap();
    let triples = subsets(&(0..15).collect::<Vec<_>>(), 3);
    assert_eq!(triples.len(), 455);
    for t in &triples {
        assert_ne!(det3(f, [g.row(t[0]), g.row(t[1]), g.row(t[2])]), 0, "{t:?}");
    }
    assert!(assert_mds(&g, 3).unwrap().passed());
}

#[test]
fn yma_plus_memory_by_counting_cached_symbols() {
    let p = SystemParams::new(2, 4, 3).with_t(2);
    let s = build_scheme("yma_plus", &p).unwrap();
    let lib = FileLibrary::random(s.field(), 3, s.file_len(), 1);
    let secrets = vec![hotplug_cache::model::UserSecret::None; 4];
    let placement = s.place(&lib, &secrets).unwrap();
    for c in &placement.caches {
        // 3 files, C(3,1) of C(4,2) = 6 subfiles each
        assert_eq!(c.symbol_count() * 2, 3 * s.file_len());
    }
    assert_eq!(s.subpacketization(), 6);
}

#[test]
fn pk_plus_load_does_not_drop_for_equal_demands() {
    let p = SystemParams::new(3, 4, 3).with_t(1).with_q(2);
    let s = PkPlus::new(&p).unwrap();
    let lib = FileLibrary::random(s.field(), 3, s.file_len(), 2);
    let secrets = seeded_secrets(&s, 9);
    let worst = verify_correctness(&s, CorrectnessOptions::default()).unwrap();
    let worst_symbols = {
        let m = worst.measured.unwrap();
        m.r * hotplug_cache::model::rat(s.file_len() as i64, 1)
    };
    let mut full_rank = 0;
    for active in subsets(&[0, 1, 2, 3], 3) {
        let dv = DemandVector::new(active, vec![1, 1, 1], &p).unwrap();
        let tr = s.deliver(&secrets, &lib, &dv).unwrap();
        let rows = &tr.side_info.multicast.as_ref().unwrap().rows;
        let rank = FieldMatrix::from_rows(s.field(), rows).unwrap().rank();
        // worst case is reached whenever the query rows have full rank
        if rank == 2 {
            full_rank += 1;
            assert_eq!(hotplug_cache::model::rat(tr.payload_symbols() as i64, 1), worst_symbols);
        }
    }
    assert!(full_rank > 0);
}

#[test]
fn query_rank_tops_out_at_n_minus_one() {
    for (kp, n) in [(2usize, 2usize), (2, 3), (3, 3), (3, 4), (4, 3)] {
        let f = Field::new(2).unwrap();
        let keys = SecretSpace::Keys.enumerate(f, n);
        let mut max_rank = 0;
        for assignment in all_words(keys.len(), kp) {
            for demand in all_words(n, kp) {
                let rows: Vec<Vec<u32>> = assignment
                    .iter()
                    .zip(&demand)
                    .map(|(&k, &d)| {
                        let hotplug_cache::model::UserSecret::Key(mut q) = keys[k].clone() else { unreachable!() };
                        q[d] = f.add(q[d], 1);
                        q
                    })
                    .collect();
                max_rank = max_rank.max(FieldMatrix::from_rows(f, &rows).unwrap().rank());
            }
        }
        assert_eq!(max_rank, kp.min(n - 1), "K'={kp} N={n}");
    }
}

#[test]
fn query_rank_in_delivered_transcripts() {
    let p = SystemParams::new(3, 3, 3).with_t(1).with_q(2);
    let s = PkPlus::new(&p).unwrap();
    let lib = FileLibrary::random(s.field(), 3, s.file_len(), 3);
    let keys = SecretSpace::Keys.enumerate(s.field(), 3);
    let mut max_rank = 0;
    for assignment in all_words(keys.len(), 3) {
        let secrets: Vec<_> = assignment.iter().map(|&k| keys[k].clone()).collect();
        for dv in DemandVector::enumerate(&p) {
            let tr = s.deliver(&secrets, &lib, &dv).unwrap();
            let rows = &tr.side_info.multicast.as_ref().unwrap().rows;
            max_rank = max_rank.max(FieldMatrix::from_rows(s.field(), rows).unwrap().rank());
        }
    }
    assert_eq!(max_rank, 2);
}

#[test]
fn ht3_pk_condition_one_on_the_example() {
    let s = build_scheme("ht3_pk", &SystemParams::new(3, 6, 3)).unwrap();
    let req = &s.mds_requirements()[0];
    let g = &req.matrix;
    let xi = g.row(g.rows() - 1).to_vec();
    for user in 0..6 {
        let mut m = g.select_rows(&[2 * user, 2 * user + 1]);
        m.push_row(&xi).unwrap();
        let f = s.field();
        assert_ne!(det3(f, [m.row(0), m.row(1), m.row(2)]), 0, "user {user}");
    }
}

#[test]
fn ht_vu_two_files() {
    for k in [2, 3, 4] {
        let s = build_scheme("ht_vu", &SystemParams::new(2, k, 2)).unwrap();
        let r = verify_correctness(s.as_ref(), CorrectnessOptions::default()).unwrap();
        assert!(r.decode_ok);
        assert_eq!(r.measured, Some(TradeoffPoint::ints((1, 3), (4, 3))), "K={k}");
    }
}

#[test]
fn pk_plus_binary_keys_hide_everything() {
    let s = build_scheme("pk_plus", &SystemParams::new(2, 2, 2).with_t(0).with_q(2)).unwrap();
    assert_eq!(s.secret_space().size(s.field(), 2), 2);
    let r = verify_privacy(s.as_ref(), 0).unwrap();
    assert!(r.privacy_ok);
    assert_eq!(r.max_mutual_information_bits, 0.0);
    // 2^2 keys x 2^2 demands for the single active pair
    assert_eq!(r.cells, 16);
}
