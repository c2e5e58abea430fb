//! Three of four users online, two coded pieces of each file per user.
//! For every active triple, each user gets one extra coded piece through a
//! vector that the other two can also produce from their own caches.

use hotplug_cache::model::{subsets, SystemParams};
use hotplug_cache::schemes::{Flex, Scheme};
use hotplug_cache::verify::{verify_correctness, CorrectnessOptions};

fn main() -> anyhow::Result<()> {
    let s = Flex::ht3(&SystemParams::new(3, 4, 3))?;
    let f = s.field();
    println!("GF({}), generator rows {:?}", f.modulus(), s.generator().to_rows());
    for active in subsets(&[0, 1, 2, 3], 3) {
        for &j in &active {
            let others: Vec<usize> = active.iter().copied().filter(|&u| u != j).collect();
            let v = s.decoding_vector(&others)?;
            let mut m = s.generator().select_rows(&s.block_rows(j).collect::<Vec<_>>());
            m.push_row(&v)?;
            println!("I = {active:?}, user {j}: v = {v:?}, [G_j; v] rank {}", m.rank());
        }
    }
    let r = verify_correctness(&s, CorrectnessOptions::default())?;
    let pt = r.measured.expect("at least one cell");
    println!("exhaustive check over {} cells: decode {}, (M, R) = ({}, {})", r.cells, r.decode_ok, pt.m, pt.r);
    Ok(())
}
