//! End-to-end acceptance run. Prints one line per criterion and fails if
//! any criterion fails or overruns its time budget.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hotplug_cache::bounds::{achievable_curve, exact_small_lb, private_converse};
use hotplug_cache::cli::gap_reports;
use hotplug_cache::gf::{fe_arith, Field, FieldElement, FieldMatrix, FieldOp};
use hotplug_cache::model::{eval_envelope, lower_convex_envelope, rat, Rational, SystemParams, TradeoffPoint};
use hotplug_cache::schemes::{build_scheme, t_range, Scheme, SchemeError, VuWrap, SCHEME_NAMES};
use hotplug_cache::verify::{
    verify_correctness, verify_mds, verify_privacy, verify_side_info_size, CorrectnessOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Everything criteria 1-5 ran, for the MDS sweep in criterion 7.
#[derive(Default)]
struct Runs {
    schemes: BTreeSet<(String, usize, usize, usize, usize, u32)>,
    omission_checked: usize,
    omission_failed: Vec<String>,
}

impl Runs {
    fn record(&mut self, name: &str, p: &SystemParams) {
        self.schemes
            .insert((name.to_string(), p.k_active, p.k_total, p.n_files, p.t, p.q));
    }
}

fn pt(m: (i64, i64), r: (i64, i64)) -> TradeoffPoint {
    TradeoffPoint::ints(m, r)
}

fn fmt_pt(p: &TradeoffPoint) -> String {
    format!("({}, {})", p.m, p.r)
}

/// Build, run the exhaustive correctness check, and return the measured pair.
fn measure(runs: &mut Runs, name: &str, p: &SystemParams) -> Result<TradeoffPoint, String> {
    let s = build_scheme(name, p).map_err(|e| format!("{name}: {e}"))?;
    runs.record(name, p);
    let r = verify_correctness(s.as_ref(), CorrectnessOptions::default()).map_err(|e| format!("{name}: {e}"))?;
    if !r.decode_ok {
        return Err(format!("{} decode failure: {:?}", s.name(), r.counterexample));
    }
    if !r.accounting_ok {
        return Err(format!("{} measured {:?} != declared {:?}", s.name(), r.measured, r.declared));
    }
    r.measured.ok_or_else(|| format!("{} measured nothing", s.name()))
}

fn expect_point(runs: &mut Runs, name: &str, p: &SystemParams, want: TradeoffPoint) -> Result<(), String> {
    let got = measure(runs, name, p)?;
    if got != want {
        return Err(format!("{name} at {:?}: measured {} want {}", p.t, fmt_pt(&got), fmt_pt(&want)));
    }
    Ok(())
}

fn grid(n_files: usize, steps: i64) -> Vec<Rational> {
    (0..=steps).map(|i| rat(i * n_files as i64, steps)).collect()
}

fn criterion_1(runs: &mut Runs) -> Outcome {
    let p = SystemParams::new(2, 3, 2);
    expect_point(runs, "ht1", &p.clone().with_t(1), pt((1, 1), (1, 2)))?;
    expect_point(runs, "ht2", &p, pt((1, 2), (1, 1)))?;
    let env = lower_convex_envelope(&[pt((0, 1), (2, 1)), pt((1, 2), (1, 1)), pt((1, 1), (1, 2)), pt((2, 1), (0, 1))]);
    let g = grid(2, 63);
    for m in &g {
        let a = eval_envelope(&env, m).ok_or("envelope undefined")?;
        let b = exact_small_lb(&p, m).ok_or("exact optimum unavailable")?;
        if a != b {
            return Err(format!("at M={m}: envelope {a} vs exact {b}"));
        }
    }
    Ok(format!("(1,1/2) and (1/2,1) measured; envelope = exact optimum on {} points", g.len()))
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let p = SystemParams::new(3, 4, 3);
    expect_point(runs, "ht2", &p, pt((1, 3), (2, 1)))?;
    expect_point(runs, "ht1", &p.clone().with_t(1), pt((1, 1), (1, 1)))?;
    expect_point(runs, "ht3", &p, pt((2, 1), (1, 3)))?;
    let converse = [
        pt((0, 1), (3, 1)),
        pt((1, 3), (2, 1)),
        pt((2, 3), (4, 3)),
        pt((1, 1), (1, 1)),
        pt((2, 1), (1, 3)),
        pt((3, 1), (0, 1)),
    ];
    let env = achievable_curve("ht", &p).map_err(|e| e.to_string())?.envelope();
    let (lo, hi) = (rat(1, 3), rat(1, 1));
    let mut open_points = 0;
    let g = grid(3, 120);
    for m in &g {
        let a = eval_envelope(&env, m).ok_or("envelope undefined")?;
        let c = eval_envelope(&converse, m).ok_or("converse undefined")?;
        if *m > lo && *m < hi {
            open_points += 1;
            if a < c {
                return Err(format!("at M={m}: achievable {a} below converse {c}"));
            }
        } else if a != c {
            return Err(format!("at M={m}: envelope {a} vs converse {c}"));
        }
    }
    Ok(format!(
        "(1/3,2), (1,1), (2,1/3) measured; envelope = converse on {} points, above it on {open_points} open points",
        g.len() - open_points
    ))
}

fn criterion_3(runs: &mut Runs) -> Outcome {
    let p = SystemParams::new(3, 6, 3);
    expect_point(runs, "ht1_pk", &p.clone().with_t(1), pt((5, 3), (1, 1)))?;
    expect_point(runs, "ht1_pk", &p.clone().with_t(2), pt((5, 1), (1, 3)))?;
    expect_point(runs, "ht3_pk", &p, pt((7, 3), (1, 3)))?;
    expect_point(runs, "vu(ht1)", &p.clone().with_t(1), pt((1, 3), (7, 3)))?;
    for (name, want) in [("ht_vu", pt((1, 7), (18, 7))), ("vu(ht3)", pt((8, 3), (1, 9)))] {
        expect_point(runs, name, &p, want.clone())?;
        let lb = private_converse(&p, &want.m);
        if lb != want.r {
            return Err(format!("{name}: converse at M={} is {lb}, not {}", want.m, want.r));
        }
    }
    Ok("six private points measured; ht_vu and vu(ht3) lie on the converse".into())
}

/// Schemes and `t` values in the exhaustive grid. Lifts run at the
/// smallest inner memory parameter; the full lift sweep is an ignored test
/// in `sweep.rs`.
fn sweep_targets(base: &SystemParams) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    for name in SCHEME_NAMES {
        for t in t_range(name, base) {
            out.push((name.to_string(), t));
        }
    }
    out.push(("vu(ht1)".into(), 1));
    for inner in ["vu(ht2)", "vu(ht3)"] {
        for t in t_range(inner, base) {
            out.push((inner.to_string(), t));
        }
    }
    out
}

fn criterion_4(runs: &mut Runs) -> Outcome {
    let (mut executed, mut cells, mut unsupported) = (0, 0, 0);
    for kp in 1..=4 {
        for k in kp..=6 {
            for n in 1..=4 {
                let base = SystemParams::new(kp, k, n);
                for (name, t) in sweep_targets(&base) {
                    let p = base.clone().with_t(t);
                    let s = match build_scheme(&name, &p) {
                        Ok(s) => s,
                        Err(SchemeError::Unsupported { .. }) => {
                            unsupported += 1;
                            continue;
                        }
                        Err(e) => return Err(format!("{name} {:?}: {e}", (kp, k, n, t))),
                    };
                    runs.record(&name, &p);
                    let r = verify_correctness(s.as_ref(), CorrectnessOptions::default())
                        .map_err(|e| format!("{} {:?}: {e}", s.name(), (kp, k, n)))?;
                    if !r.decode_ok {
                        return Err(format!("{} {:?}: {:?}", s.name(), (kp, k, n), r.counterexample));
                    }
                    if !r.accounting_ok {
                        return Err(format!("{} {:?}: measured {:?} declared {:?}", s.name(), (kp, k, n), r.measured, r.declared));
                    }
                    runs.omission_checked += 1;
                    if !r.omission_ok {
                        runs.omission_failed.push(format!("{} {:?}", s.name(), (kp, k, n)));
                    }
                    executed += 1;
                    cells += r.cells;
                }
            }
        }
    }
    Ok(format!(
        "{executed} scheme runs, {cells} (active set, demand) cells, zero failures ({unsupported} combinations unsupported)"
    ))
}

fn privacy_case(scheme: &dyn Scheme, label: &str, want_private: bool) -> Result<(), String> {
    let r = verify_privacy(scheme, 11).map_err(|e| format!("{label}: {e}"))?;
    if want_private && !r.privacy_ok {
        return Err(format!("{label} leaks: {:?}", r.violation));
    }
    if !want_private && (r.privacy_ok || r.max_mutual_information_bits <= 0.0) {
        return Err(format!("{label}: negative control shows no leak"));
    }
    Ok(())
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let private: &[(&str, (usize, usize, usize, usize, u32))] = &[
        ("pk_plus", (2, 3, 2, 1, 2)),
        ("pk_plus", (2, 3, 2, 2, 2)),
        ("pk_plus", (3, 3, 2, 1, 2)),
        ("pk_plus", (2, 3, 3, 1, 2)),
        ("pk_plus", (2, 3, 2, 1, 3)),
        ("ht1_pk", (2, 3, 2, 1, 0)),
        ("ht1_pk", (3, 3, 2, 1, 0)),
        ("ht1_pk", (2, 3, 3, 1, 0)),
        ("ht3_pk", (3, 3, 2, 0, 0)),
        ("ht3_pk", (3, 4, 2, 0, 0)),
        ("ht_vu", (2, 3, 2, 0, 0)),
        ("ht_vu", (2, 3, 3, 0, 0)),
        ("ht_vu", (3, 4, 3, 0, 0)),
        ("vu(ht1)", (2, 3, 2, 1, 0)),
        ("vu(ht1)", (2, 2, 3, 1, 0)),
        ("vu(ht2)", (2, 3, 2, 0, 0)),
        ("vu(ht2)", (2, 3, 3, 0, 0)),
        ("vu(ht3)", (3, 3, 2, 0, 0)),
    ];
    let leaky: &[(&str, (usize, usize, usize, usize, u32))] = &[
        ("yma_plus", (2, 3, 2, 1, 0)),
        ("ht1", (2, 3, 2, 1, 0)),
        ("ht2", (2, 3, 2, 0, 0)),
        ("ht3", (3, 4, 2, 0, 0)),
        ("flex", (3, 4, 2, 2, 0)),
    ];
    let params = |&(a, b, c, t, q): &(usize, usize, usize, usize, u32)| SystemParams::new(a, b, c).with_t(t).with_q(q);
    for (name, raw) in private {
        let p = params(raw);
        let s = build_scheme(name, &p).map_err(|e| format!("{name}: {e}"))?;
        runs.record(name, &p);
        privacy_case(s.as_ref(), &format!("{} {raw:?}", s.name()), true)?;
    }
    for (name, raw) in leaky {
        let p = params(raw);
        let s = build_scheme(name, &p).map_err(|e| format!("{name}: {e}"))?;
        runs.record(name, &p);
        privacy_case(s.as_ref(), &format!("{} {raw:?}", s.name()), false)?;
    }
    let mut unpadded = 0;
    for (inner, raw) in [("ht1", (2, 3, 2, 1, 0)), ("ht2", (2, 3, 2, 0, 0)), ("ht3", (3, 3, 2, 0, 0))] {
        let p = params(&raw);
        let s = VuWrap::new(inner, &p, false).map_err(|e| e.to_string())?;
        privacy_case(&s, &s.name(), false)?;
        unpadded += 1;
    }
    Ok(format!(
        "{} private runs with zero mutual information; {} negative controls leak",
        private.len(),
        leaky.len() + unpadded
    ))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for (kp, k, n) in [(5, 15, 20), (12, 30, 20), (4, 6, 4)] {
        let p = SystemParams::new(kp, k, n);
        let reports = gap_reports(&p, 128).map_err(|e| e.to_string())?;
        if reports.len() < 3 {
            return Err(format!("{:?}: missing private regime", (kp, n)));
        }
        for r in &reports {
            if !r.ok {
                return Err(format!("{:?} {}: ratio {:.5} over {}", (kp, n), r.label, r.max_ratio_float, r.threshold_float));
            }
        }
        lines.push(format!(
            "({kp},{n}) {:.4}/{:.4}",
            reports[0].max_ratio_float, reports[2].max_ratio_float
        ));
    }
    Ok(format!("non-private/private max ratios {}", lines.join(", ")))
}

fn rank_nullity(seed: u64, count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [2u32, 3, 5, 7, 11, 13, 31];
    for i in 0..count {
        let f = Field::new(primes[rng.gen_range(0..primes.len())]).unwrap();
        let (r, c) = (rng.gen_range(1..9), rng.gen_range(1..9));
        // sparse-ish entries so rank deficiency actually shows up
        let m = FieldMatrix::from_fn(f, r, c, |_, _| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..f.modulus()) });
        let null = m.nullspace();
        if m.rank() + null.len() != c {
            return Err(format!("matrix {i}: rank {} + nullity {} != {c}", m.rank(), null.len()));
        }
        for v in &null {
            if (0..r).any(|row| f.dot(m.row(row), v) != 0) {
                return Err(format!("matrix {i}: nullspace vector not in the kernel"));
            }
        }
    }
    Ok(())
}

fn criterion_7(runs: &Runs) -> Outcome {
    for q in [2u32, 3, 5, 7, 11, 13] {
        let fe = |v: u32| FieldElement::new(v as u64, q).unwrap();
        let op = |a, b, o| fe_arith(a, b, o).unwrap();
        for a in 0..q {
            let x = fe(a);
            if op(x, fe(0), FieldOp::Add) != x || op(x, fe(1), FieldOp::Mul) != x {
                return Err(format!("GF({q}): identity fails at {a}"));
            }
            if op(x, x.neg(), FieldOp::Add) != fe(0) {
                return Err(format!("GF({q}): additive inverse fails at {a}"));
            }
            if a != 0 && op(x, x.inv().unwrap(), FieldOp::Mul) != fe(1) {
                return Err(format!("GF({q}): multiplicative inverse fails at {a}"));
            }
            for b in 0..q {
                let y = fe(b);
                if op(x, y, FieldOp::Add) != op(y, x, FieldOp::Add) || op(x, y, FieldOp::Mul) != op(y, x, FieldOp::Mul) {
                    return Err(format!("GF({q}): commutativity fails at ({a},{b})"));
                }
                if op(op(x, y, FieldOp::Sub), y, FieldOp::Add) != x {
                    return Err(format!("GF({q}): subtraction fails at ({a},{b})"));
                }
                for c in 0..q {
                    let z = fe(c);
                    let assoc = op(op(x, y, FieldOp::Add), z, FieldOp::Add) == op(x, op(y, z, FieldOp::Add), FieldOp::Add)
                        && op(op(x, y, FieldOp::Mul), z, FieldOp::Mul) == op(x, op(y, z, FieldOp::Mul), FieldOp::Mul);
                    let dist = op(x, op(y, z, FieldOp::Add), FieldOp::Mul)
                        == op(op(x, y, FieldOp::Mul), op(x, z, FieldOp::Mul), FieldOp::Add);
                    if !assoc || !dist {
                        return Err(format!("GF({q}): ring axioms fail at ({a},{b},{c})"));
                    }
                }
            }
        }
    }
    let mut matrices = 0;
    for (name, kp, k, n, t, q) in &runs.schemes {
        let p = SystemParams::new(*kp, *k, *n).with_t(*t).with_q(*q);
        let s = build_scheme(name, &p).map_err(|e| format!("{name}: {e}"))?;
        for m in verify_mds(s.as_ref()) {
            matrices += 1;
            if !m.ok {
                return Err(format!("{} {:?}: {} not MDS ({})", s.name(), (kp, k, n), m.label, m.method));
            }
        }
    }
    rank_nullity(0x7a11, 500)?;
    if !runs.omission_failed.is_empty() {
        return Err(format!("omission unsound for {:?}", runs.omission_failed));
    }
    if runs.omission_checked == 0 {
        return Err("criterion 4 produced no transcripts".into());
    }
    Ok(format!(
        "field axioms for q <= 13; {matrices} generators MDS across {} runs; rank-nullity on 500 matrices; omission sound in {} sweeps",
        runs.schemes.len(),
        runs.omission_checked
    ))
}

fn criterion_8() -> Outcome {
    let cases: &[(&str, (usize, usize, usize, usize))] = &[
        ("yma_plus", (2, 3, 2, 1)),
        ("ht1", (3, 4, 3, 1)),
        ("ht2", (3, 4, 3, 0)),
        ("ht3", (3, 4, 3, 0)),
        ("flex", (4, 5, 3, 2)),
        ("pk_plus", (2, 3, 3, 1)),
        ("ht1_pk", (3, 4, 3, 1)),
        ("ht3_pk", (3, 4, 3, 0)),
        ("ht_vu", (3, 4, 3, 0)),
        ("vu(ht1)", (2, 3, 2, 1)),
        ("vu(ht3)", (3, 4, 2, 0)),
    ];
    for (name, (a, b, c, t)) in cases {
        let p = SystemParams::new(*a, *b, *c).with_t(*t);
        let r = verify_side_info_size(name, &p, 5).map_err(|e| format!("{name}: {e}"))?;
        if !r.ok {
            return Err(format!("{name}: mismatch at {:?}", r.mismatch));
        }
    }
    Ok(format!("payload doubles and side info is unchanged for {} schemes", cases.len()))
}

#[test]
fn acceptance() {
    let mut runs = Runs::default();
    let secs = |s: u64| Duration::from_secs(s);
    let mut results: Vec<(usize, Duration, Duration, Outcome)> = Vec::new();
    let mut timed = |id: usize, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        results.push((id, budget, t0.elapsed(), out));
    };
    timed(1, secs(1), &mut || criterion_1(&mut runs));
    timed(2, secs(5), &mut || criterion_2(&mut runs));
    timed(3, secs(30), &mut || criterion_3(&mut runs));
    timed(4, secs(300), &mut || criterion_4(&mut runs));
    timed(5, secs(600), &mut || criterion_5(&mut runs));
    timed(6, secs(60), &mut || criterion_6());
    timed(7, secs(600), &mut || criterion_7(&runs));
    timed(8, secs(600), &mut || criterion_8());

    let mut failed = Vec::new();
    for (id, budget, took, out) in &results {
        let over = took > budget;
        let (status, detail) = match out {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; took {took:.1?}, budget {budget:?}")),
            Err(e) => ("FAIL", e.clone()),
        };
        println!("criterion {id}: {status} [{:.2}s] {detail}", took.as_secs_f64());
        if status == "FAIL" {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
