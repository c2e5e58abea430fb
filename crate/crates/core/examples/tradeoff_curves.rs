//! Achievable curves against the converse, and the worst-case gap between
//! them on a memory grid.

use hotplug_cache::bounds::{achievable_curve, nonprivate_converse, nonprivate_gap, private_gap};
use hotplug_cache::model::{to_f64, SystemParams};

fn main() -> anyhow::Result<()> {
    let p = SystemParams::new(3, 4, 3);
    for name in ["ht", "yma_plus"] {
        let env = achievable_curve(name, &p)?.envelope();
        let corners: Vec<String> = env.iter().map(|pt| format!("({}, {})", pt.m, pt.r)).collect();
        println!("{name}: {}", corners.join(" "));
    }
    print!("converse:");
    for i in 0..=6 {
        let m = hotplug_cache::model::rat(i, 2);
        print!(" {:.3}", to_f64(&nonprivate_converse(&p, &m)));
    }
    println!();

    for (kp, k, n) in [(5, 15, 20), (4, 6, 4)] {
        let p = SystemParams::new(kp, k, n);
        for r in [nonprivate_gap(&p, 128), private_gap(&p, 128)?] {
            println!(
                "({kp},{k},{n}) {}: max ratio {:.4} (claim {:.4}) {}",
                r.label,
                r.max_ratio_float,
                r.threshold_float,
                if r.ok { "holds" } else { "VIOLATED" }
            );
        }
    }
    Ok(())
}
