//! The lifted schemes over every inner memory parameter. Several of these
//! run on hundreds of virtual users, so the sweep is opt-in:
//! `cargo test --release --test sweep -- --ignored`.
//!
//! Cost grows steeply with the inner `t`; a single run at K'=3, N=4 can
//! take minutes. `HOTPLUG_SWEEP_INNER=ht1,flex` and `HOTPLUG_SWEEP_MAX_KA=2`
//! narrow the sweep.

use hotplug_cache::model::SystemParams;
use hotplug_cache::schemes::{build_scheme, t_range, SchemeError};
use hotplug_cache::verify::{verify_correctness, CorrectnessOptions};

#[test]
#[ignore]
fn every_lift_at_every_inner_t() {
    let inners: Vec<String> = std::env::var("HOTPLUG_SWEEP_INNER")
        .map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
        .unwrap_or_else(|_| vec!["ht1".into(), "flex".into(), "yma_plus".into()]);
    let max_ka: usize = std::env::var("HOTPLUG_SWEEP_MAX_KA")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(4);
    let mut runs = 0;
    for inner in &inners {
        let name = format!("vu({inner})");
        for kp in 1..=max_ka {
            for k in kp..=6 {
                for n in 1..=4 {
                    let base = SystemParams::new(kp, k, n);
                    for t in t_range(&name, &base) {
                        let p = base.clone().with_t(t);
                        let s = match build_scheme(&name, &p) {
                            Ok(s) => s,
                            Err(SchemeError::Unsupported { .. } | SchemeError::SubpacketizationTooLarge(_)) => continue,
                            Err(e) => panic!("{name} {:?}: {e}", (kp, k, n, t)),
                        };
                        let t0 = std::time::Instant::now();
                        let r = verify_correctness(s.as_ref(), CorrectnessOptions::default()).unwrap();
                        println!("{} {:?}: {} cells, {:.1?}", s.name(), (kp, k, n), r.cells, t0.elapsed());
                        assert!(r.decode_ok, "{} {:?}: {:?}", s.name(), (kp, k, n), r.counterexample);
                        assert!(r.accounting_ok && r.omission_ok, "{} {:?}", s.name(), (kp, k, n));
                        runs += 1;
                    }
                }
            }
        }
    }
    println!("{runs} lifted runs");
}
