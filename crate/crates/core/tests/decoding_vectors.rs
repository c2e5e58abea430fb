use hotplug_cache::gf::{Field, FieldMatrix};
use hotplug_cache::model::SystemParams;
use hotplug_cache::schemes::{Flex, Ht3Pk, Scheme};

/// `v` equals `c * want` (reduced mod q) for some nonzero `c`.
fn scalar_multiple(f: Field, v: &[u32], want: &[i64]) -> bool {
    let want: Vec<u32> = want.iter().map(|&x| f.reduce(x)).collect();
    (1..f.modulus()).any(|c| want.iter().zip(v).all(|(&w, &x)| f.mul(c, w) == x))
}

fn combo(f: Field, g: &FieldMatrix, rows: [usize; 2], coeffs: [i64; 2]) -> Vec<u32> {
    let mut acc = vec![0; g.cols()];
    for (r, c) in rows.iter().zip(coeffs) {
        f.axpy(&mut acc, f.reduce(c), g.row(*r));
    }
    acc
}

// The 8 x 3 generator at (3,4,3) has rows [1, x, x^2] at x = 1..8, so
// blocks are {1,2}, {3,4}, {5,6}, {7,8}.
#[test]
fn ht3_vector_for_first_user() {
    let s = Flex::ht3(&SystemParams::new(3, 4, 3)).unwrap();
    let f = s.field();
    let g = s.generator();
    assert_eq!(g.row(2), &[1, 3, 9]);
    let v = s.decoding_vector(&[1, 2]).unwrap();
    assert!(scalar_multiple(f, &v, &[2, 9, 39]), "got {v:?} over GF({})", f.modulus());
    let want: Vec<u32> = [2i64, 9, 39].iter().map(|&x| f.reduce(x)).collect();
    assert_eq!(combo(f, g, [2, 3], [-1, 3]), want);
    assert_eq!(combo(f, g, [4, 5], [3, -1]), want);
    let mut m = g.select_rows(&[0, 1]);
    m.push_row(&v).unwrap();
    assert_eq!(m.rank(), 3);
}

#[test]
fn ht3_vectors_complete_every_block() {
    let s = Flex::ht3(&SystemParams::new(3, 4, 3)).unwrap();
    for j in 0..4usize {
        let others: Vec<usize> = (0..4).filter(|&u| u != j).take(2).collect();
        let v = s.decoding_vector(&others).unwrap();
        for &u in &others {
            assert!(s.generator().select_rows(&s.block_rows(u).collect::<Vec<_>>()).row_space_contains(&v));
        }
        let mut m = s.generator().select_rows(&s.block_rows(j).collect::<Vec<_>>());
        m.push_row(&v).unwrap();
        assert_eq!(m.rank(), 3, "user {j}");
    }
}

#[test]
fn ht3_pk_phi_matches_the_nonprivate_vector() {
    let s = Ht3Pk::new(&SystemParams::new(3, 4, 3)).unwrap();
    let phi = s.phi(&[0, 1, 2], 0).unwrap();
    assert!(scalar_multiple(s.field(), &phi, &[2, 9, 39]), "got {phi:?}");
    // xi sits at the first node past the code
    let f = s.field();
    assert_eq!(s.xi(), &[1, 9, f.reduce(81)]);
}
