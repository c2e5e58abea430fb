//! Achievable curves, converse bounds and multiplicative gaps.

pub mod converse;
pub mod formulas;

use num::{BigInt, Zero};
use serde::Serialize;

use crate::model::{fmt_rat, to_f64, Rational, SystemParams, TradeoffCurve, TradeoffPoint};
use crate::schemes::{flex_default_l, SchemeError};

pub use converse::{
    cutset_lb, exact_small_lb, nonprivate_converse, privacy_lb, private_converse, yma_lb, yma_lb_grid,
};

/// Curve names understood by [`achievable_curve`].
pub const CURVE_NAMES: &[&str] = &[
    "yma_plus", "ht1", "ht2", "ht3", "flex", "ht", "pk_plus", "ht1_pk", "ht3_pk", "ht_pk", "ht_vu", "ht1_vu",
    "ht3_vu", "yma_vu", "decen_plus", "decen_vu",
];

/// Bound names understood by [`bound_value`].
pub const BOUND_NAMES: &[&str] = &["cutset", "yma_lb", "exact_small", "privacy_lb", "converse", "private_converse"];

/// Default number of interior grid points.
pub const DEFAULT_GRID: usize = 128;

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn trivial_np(p: &SystemParams) -> Vec<TradeoffPoint> {
    vec![
        TradeoffPoint::new(int(0), int(p.min_kn())),
        TradeoffPoint::new(int(p.n_files), int(0)),
    ]
}

fn trivial_p(p: &SystemParams) -> Vec<TradeoffPoint> {
    vec![
        TradeoffPoint::new(int(0), int(p.n_files)),
        TradeoffPoint::new(int(p.n_files), int(0)),
    ]
}

fn unsupported(name: &str, reason: &str) -> SchemeError {
    SchemeError::Unsupported {
        scheme: name.into(),
        reason: reason.into(),
    }
}

/// Corner points of a named scheme family from its closed forms. Points
/// beyond `M = N` are dropped, since `(N, 0)` dominates them. Decentralized
/// curves are sampled on [`memory_grid`].
pub fn achievable_curve(name: &str, p: &SystemParams) -> Result<TradeoffCurve, SchemeError> {
    p.validate()?;
    let (kp, k) = (p.k_active, p.k_total);
    let mut pts: Vec<TradeoffPoint> = match name {
        "yma_plus" => (0..=k).map(|t| formulas::yma_plus_point(p, t)).collect(),
        "ht1" => (0..=kp).map(|t| formulas::ht1_point(p, t)).chain(trivial_np(p)).collect(),
        "ht2" => {
            let pt = formulas::ht2_point(p).ok_or_else(|| unsupported(name, "needs K' >= N"))?;
            trivial_np(p).into_iter().chain([pt]).collect()
        }
        "ht3" => {
            let pt = formulas::ht3_point(p).ok_or_else(|| unsupported(name, "needs K' >= 3"))?;
            trivial_np(p).into_iter().chain([pt]).collect()
        }
        "flex" => {
            if kp < 3 {
                return Err(unsupported(name, "needs K' >= 3"));
            }
            (2..kp)
                .map(|t| formulas::flex_point(p, t, flex_default_l(kp, t)))
                .chain(trivial_np(p))
                .collect()
        }
        "ht" => {
            let mut v: Vec<_> = (0..=kp).map(|t| formulas::ht1_point(p, t)).collect();
            v.extend(formulas::ht2_point(p));
            v.extend(formulas::ht3_point(p));
            v.extend(trivial_np(p));
            v
        }
        "pk_plus" => (0..=k).map(|t| formulas::pk_plus_point(p, t)).chain(trivial_p(p)).collect(),
        "ht1_pk" => (0..=kp).map(|t| formulas::ht1_pk_point(p, t)).chain(trivial_p(p)).collect(),
        "ht3_pk" => {
            let pt = formulas::ht3_pk_point(p).ok_or_else(|| unsupported(name, "needs K' >= 3"))?;
            trivial_p(p).into_iter().chain([pt]).collect()
        }
        "ht_pk" => {
            let mut v: Vec<_> = (0..=kp).map(|t| formulas::ht1_pk_point(p, t)).collect();
            v.extend(formulas::ht3_pk_point(p));
            v.extend(trivial_p(p));
            v
        }
        "ht_vu" => {
            let pt = formulas::ht_vu_point(p).ok_or_else(|| unsupported(name, "needs N >= 2"))?;
            trivial_p(p).into_iter().chain([pt]).collect()
        }
        "ht1_vu" => trivial_p(p).into_iter().chain([formulas::ht1_vu_point(p)]).collect(),
        "ht3_vu" => {
            let pt = formulas::ht3_vu_point(p).ok_or_else(|| unsupported(name, "needs K' N >= 3"))?;
            trivial_p(p).into_iter().chain([pt]).collect()
        }
        "yma_vu" => formulas::yma_vu_points(p).into_iter().chain(trivial_p(p)).collect(),
        "decen_plus" | "decen_vu" => {
            let f = if name == "decen_plus" { formulas::decen_plus } else { formulas::decen_vu };
            let mut grid = vec![int(0)];
            grid.extend(memory_grid(p, DEFAULT_GRID, &[]));
            grid.push(int(p.n_files));
            grid.into_iter()
                .map(|m| {
                    let r = f(p, &m);
                    TradeoffPoint::new(m, r)
                })
                .collect()
        }
        other => return Err(SchemeError::UnknownScheme(other.into())),
    };
    let n = int(p.n_files);
    pts.retain(|pt| pt.m <= n);
    Ok(TradeoffCurve::new(name, pts))
}

/// Whether a curve name is a sampled (smooth) curve rather than corners.
pub fn is_sampled(name: &str) -> bool {
    matches!(name, "decen_plus" | "decen_vu")
}

/// Evaluate a named converse at `m`.
pub fn bound_value(name: &str, p: &SystemParams, m: &Rational) -> Option<Rational> {
    Some(match name {
        "cutset" => cutset_lb(p, m),
        "yma_lb" => yma_lb(p, m),
        "exact_small" => exact_small_lb(p, m)?,
        "privacy_lb" => privacy_lb(p, m),
        "converse" => nonprivate_converse(p, m),
        "private_converse" => private_converse(p, m),
        _ => return None,
    })
}

/// `count` uniform interior points `N i / (count + 1)` merged with the
/// given extra abscissae inside `(0, N)`, sorted and deduplicated.
pub fn memory_grid(p: &SystemParams, count: usize, extra: &[Rational]) -> Vec<Rational> {
    let n = int(p.n_files);
    let mut g: Vec<Rational> = (1..=count).map(|i| &n * int(i) / int(count + 1)).collect();
    g.extend(extra.iter().filter(|m| **m > Rational::zero() && **m < n).cloned());
    g.sort();
    g.dedup();
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub label: String,
    pub max_ratio: String,
    pub max_ratio_float: f64,
    pub arg_max: Vec<String>,
    pub threshold: String,
    pub threshold_float: f64,
    pub ok: bool,
    pub points: usize,
    #[serde(skip)]
    pub ratio: Rational,
}

/// Max of `achievable / converse` over the grid points where the converse
/// is positive, with every grid point attaining it.
pub fn gap_report(
    label: &str,
    grid: &[Rational],
    achievable: impl Fn(&Rational) -> Rational,
    converse: impl Fn(&Rational) -> Rational,
    threshold: Rational,
) -> GapReport {
    let mut best = Rational::zero();
    let mut arg: Vec<Rational> = Vec::new();
    let mut points = 0;
    for m in grid {
        let lb = converse(m);
        if lb <= Rational::zero() {
            continue;
        }
        points += 1;
        let ratio = achievable(m) / lb;
        if ratio > best {
            best = ratio;
            arg = vec![m.clone()];
        } else if ratio == best {
            arg.push(m.clone());
        }
    }
    GapReport {
        label: label.into(),
        max_ratio: fmt_rat(&best),
        max_ratio_float: to_f64(&best),
        arg_max: arg.iter().map(fmt_rat).collect(),
        threshold: fmt_rat(&threshold),
        threshold_float: to_f64(&threshold),
        ok: best <= threshold,
        points,
        ratio: best,
    }
}

/// Gap of the decentralized scheme against the averaged-demand converse alone.
pub fn nonprivate_gap(p: &SystemParams, grid_points: usize) -> GapReport {
    let grid = memory_grid(p, grid_points, &[]);
    gap_report(
        "decen_plus / yma_lb",
        &grid,
        |m| formulas::decen_plus(p, m),
        |m| yma_lb(p, m),
        int(2),
    )
}

/// Gap in the private regime: YMA+ with virtual users when `K' >= N`,
/// PK+ otherwise, both against [`private_converse`].
pub fn private_gap(p: &SystemParams, grid_points: usize) -> Result<GapReport, SchemeError> {
    let (name, threshold) = if p.k_active >= p.n_files {
        ("yma_vu", Rational::new(200_884.into(), 100_000.into()))
    } else {
        ("pk_plus", Rational::new(54_606.into(), 10_000.into()))
    };
    let curve = achievable_curve(name, p)?;
    let env = curve.envelope();
    let corners: Vec<Rational> = env.iter().map(|pt| pt.m.clone()).collect();
    let grid = memory_grid(p, grid_points, &corners);
    Ok(gap_report(
        &format!("{name} / private_converse"),
        &grid,
        |m| crate::model::eval_envelope(&env, m).unwrap_or_else(|| int(p.n_files)),
        |m| private_converse(p, m),
        threshold,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    #[test]
    fn ht_curve_two_users() {
        let p = SystemParams::new(2, 3, 2);
        let env = achievable_curve("ht", &p).unwrap().envelope();
        assert_eq!(
            env,
            vec![
                TradeoffPoint::ints((0, 1), (2, 1)),
                TradeoffPoint::ints((1, 2), (1, 1)),
                TradeoffPoint::ints((1, 1), (1, 2)),
                TradeoffPoint::ints((2, 1), (0, 1)),
            ]
        );
    }

    #[test]
    fn identical_curves_have_unit_gap() {
        let p = SystemParams::new(3, 4, 3);
        let grid = memory_grid(&p, 32, &[]);
        let r = gap_report("id", &grid, |m| cutset_lb(&p, m), |m| cutset_lb(&p, m), int(1));
        assert_eq!(r.ratio, int(1));
        assert!(r.ok);
    }

    #[test]
    fn single_user_gap_is_one() {
        let p = SystemParams::new(1, 3, 4);
        let env = achievable_curve("yma_plus", &p).unwrap().envelope();
        let grid = memory_grid(&p, 64, &[]);
        let r = gap_report(
            "yma_plus",
            &grid,
            |m| crate::model::eval_envelope(&env, m).unwrap(),
            |m| nonprivate_converse(&p, m),
            int(1),
        );
        assert_eq!(r.ratio, int(1));
    }

    #[test]
    fn grid_shape() {
        let p = SystemParams::new(2, 2, 3);
        let g = memory_grid(&p, 128, &[rat(3, 2), rat(0, 1), rat(3, 1)]);
        // 3/2 is not of the form 3i/129; the endpoints are dropped
        assert_eq!(g.len(), 129);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
