//! Demand-private schemes at six users, three online, three files: the
//! measured worst-case pair of each, next to the converse at that memory.

use hotplug_cache::bounds::private_converse;
use hotplug_cache::model::SystemParams;
use hotplug_cache::schemes::build_scheme;
use hotplug_cache::verify::{verify_correctness, CorrectnessOptions};

fn main() -> anyhow::Result<()> {
    let base = SystemParams::new(3, 6, 3);
    let runs = [("ht_vu", 0), ("vu(ht1)", 1), ("ht1_pk", 1), ("ht3_pk", 0), ("vu(ht3)", 0), ("pk_plus", 2)];
    println!("{:<16} {:>6} {:>6} {:>10}", "scheme", "M", "R", "converse");
    for (name, t) in runs {
        let s = build_scheme(name, &base.clone().with_t(t))?;
        let r = verify_correctness(s.as_ref(), CorrectnessOptions::default())?;
        assert!(r.decode_ok && r.accounting_ok);
        let pt = r.measured.expect("nonempty sweep");
        let lb = private_converse(&base, &pt.m);
        let tag = if lb == pt.r { " optimal" } else { "" };
        println!("{:<16} {:>6} {:>6} {:>10}{tag}", s.name(), pt.m.to_string(), pt.r.to_string(), lb.to_string());
    }
    Ok(())
}
