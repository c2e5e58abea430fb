//! Three users, two of whom show up. Each caches one coded half of every
//! file; whichever pair is online decodes from a single half-file message.

use hotplug_cache::model::{DemandVector, FileLibrary, SystemParams, UserSecret};
use hotplug_cache::schemes::build_scheme;

fn main() -> anyhow::Result<()> {
    let p = SystemParams::new(2, 3, 2).with_t(1).with_q(5);
    let scheme = build_scheme("ht1", &p)?;
    let library = FileLibrary::random(scheme.field(), 2, scheme.file_len(), 42);
    let secrets = vec![UserSecret::None; 3];
    let placement = scheme.place(&library, &secrets)?;
    for (u, c) in placement.caches.iter().enumerate() {
        let labels: Vec<_> = c.segments.iter().map(|(l, _)| l).collect();
        println!("user {u} caches {} symbols: {labels:?}", c.symbol_count());
    }

    for active in [vec![0, 1], vec![0, 2], vec![1, 2]] {
        let demand = DemandVector::new(active.clone(), vec![0, 1], scheme.params())?;
        let tr = scheme.deliver(&secrets, &library, &demand)?;
        print!("active {active:?}, demands [0, 1]: {} payload symbols", tr.payload_symbols());
        for (&u, &d) in active.iter().zip(&demand.demands) {
            let got = scheme.decode(u, &placement.caches[u], &tr, d)?;
            assert_eq!(got, library.files[d]);
        }
        println!(", both users decoded");
    }
    let pt = scheme.declared();
    println!("(M, R) = ({}, {})", pt.m, pt.r);
    Ok(())
}
