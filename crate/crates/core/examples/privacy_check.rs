//! Exact demand-privacy check: enumerate every key and demand, then test
//! whether any colluding subset learns anything about the others' demands.

use hotplug_cache::model::SystemParams;
use hotplug_cache::schemes::{build_scheme, Scheme, VuWrap};
use hotplug_cache::verify::{verify_privacy, PrivacyReport};

fn show(label: &str, r: &PrivacyReport) {
    print!("{label:<24} cells {:>6}, colluding sets {:>3}: ", r.cells, r.colluding_sets);
    match &r.violation {
        None => println!("private"),
        Some(v) => println!(
            "leaks {:.3} bits (active {:?}, colluders {:?}, {} library)",
            v.mutual_information_bits, v.active, v.colluders, v.library
        ),
    }
}

fn main() -> anyhow::Result<()> {
    let p = SystemParams::new(2, 3, 2);
    for (name, t, q) in [("pk_plus", 1, 2), ("ht1_pk", 1, 0), ("ht_vu", 0, 0), ("vu(ht2)", 0, 0), ("ht1", 1, 0)] {
        let s = build_scheme(name, &p.clone().with_t(t).with_q(q))?;
        show(&s.name(), &verify_privacy(s.as_ref(), 1)?);
    }
    // The same lift with every user pinned to slot zero gives demands away.
    let bare = VuWrap::new("ht2", &p, false)?;
    show(&bare.name(), &verify_privacy(&bare, 1)?);
    Ok(())
}
