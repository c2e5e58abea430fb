//! Closed-form memory-load points of every scheme family.

use num::BigInt;

use crate::model::{binom_big, Rational, SystemParams, TradeoffPoint};

fn c(n: usize, k: usize) -> BigInt {
    binom_big(n as i64, k as i64)
}

fn ci(n: i64, k: i64) -> BigInt {
    binom_big(n, k)
}

fn frac(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

fn int(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `[C(users, t+1) - C(users - r, t+1)] / C(users, t)`, the multicast load
/// with `r` leaders among `users` cached subsets.
fn leader_load(users: usize, r: usize, t: usize) -> Rational {
    let num = c(users, t + 1) - ci(users as i64 - r as i64, t as i64 + 1);
    frac(num, c(users, t))
}

pub fn yma_plus_point(p: &SystemParams, t: usize) -> TradeoffPoint {
    let (kp, k, n) = (p.k_active, p.k_total, p.n_files);
    let m = frac(BigInt::from(n * t), BigInt::from(k));
    let num = c(k, t + 1) - ci(k as i64 - kp.min(n) as i64, t as i64 + 1);
    TradeoffPoint::new(m, frac(num, c(k, t)))
}

pub fn ht1_point(p: &SystemParams, t: usize) -> TradeoffPoint {
    let (kp, k, n) = (p.k_active, p.k_total, p.n_files);
    let m = frac(BigInt::from(n) * ci(k as i64 - 1, t as i64 - 1), c(kp, t));
    TradeoffPoint::new(m, leader_load(kp, kp.min(n), t))
}

/// Needs `K' >= N`.
pub fn ht2_point(p: &SystemParams) -> Option<TradeoffPoint> {
    let (kp, n) = (p.k_active, p.n_files);
    if kp < n || kp == 0 {
        return None;
    }
    Some(TradeoffPoint::new(
        Rational::new(1.into(), BigInt::from(kp)),
        frac(BigInt::from(n * (kp - 1)), BigInt::from(kp)),
    ))
}

/// Flexible scheme with `L` subfiles at parameter `t`.
pub fn flex_point(p: &SystemParams, t: usize, l: usize) -> TradeoffPoint {
    let (kp, n) = (p.k_active, p.n_files);
    let m = frac(BigInt::from(n) * ci(kp as i64 - 1, t as i64 - 1), BigInt::from(l));
    let r = c(kp, t + 1) - ci(kp as i64 - kp.min(n) as i64, t as i64 + 1);
    TradeoffPoint::new(m, frac(r, BigInt::from(l)))
}

/// Needs `K' >= 3`.
pub fn ht3_point(p: &SystemParams) -> Option<TradeoffPoint> {
    let kp = p.k_active;
    (kp >= 3).then(|| flex_point(p, kp - 1, kp))
}

pub fn pk_plus_point(p: &SystemParams, t: usize) -> TradeoffPoint {
    let (kp, k, n) = (p.k_active, p.k_total, p.n_files);
    let m = int(1) + frac(BigInt::from(t * (n - 1)), BigInt::from(k));
    let r = kp.min(n - 1);
    let num = c(k, t + 1) - ci(k as i64 - r as i64, t as i64 + 1);
    TradeoffPoint::new(m, frac(num, c(k, t)))
}

pub fn ht1_pk_point(p: &SystemParams, t: usize) -> TradeoffPoint {
    let (kp, k, n) = (p.k_active, p.k_total, p.n_files);
    let own = ci(k as i64 - 1, t as i64 - 1);
    let eta = (c(kp, t) - &own).max(BigInt::from(0));
    let m = frac(BigInt::from(n) * own + eta, c(kp, t));
    TradeoffPoint::new(m, leader_load(kp, kp.min(n - 1), t))
}

/// Needs `K' >= 3`.
pub fn ht3_pk_point(p: &SystemParams) -> Option<TradeoffPoint> {
    let (kp, n) = (p.k_active, p.n_files);
    if kp < 3 {
        return None;
    }
    Some(TradeoffPoint::new(
        int(n) - frac(BigInt::from(n - 1), BigInt::from(kp)),
        frac(1.into(), BigInt::from(kp)),
    ))
}

/// Direct virtual-user point with `K'(N-1)+1` subfiles. Needs `N >= 2`.
pub fn ht_vu_point(p: &SystemParams) -> Option<TradeoffPoint> {
    let (kp, n) = (p.k_active, p.n_files);
    if n < 2 {
        return None;
    }
    let d = BigInt::from(kp * (n - 1) + 1);
    Some(TradeoffPoint::new(
        frac(1.into(), d.clone()),
        frac(BigInt::from(n) * (&d - 1), d),
    ))
}

/// Parameters of the virtual system behind the VU lift.
pub fn virtual_params(p: &SystemParams) -> SystemParams {
    SystemParams {
        k_active: p.k_active * p.n_files,
        k_total: p.k_total * p.n_files,
        ..p.clone()
    }
}

/// HT1 at `t = 1` lifted by virtual users.
pub fn ht1_vu_point(p: &SystemParams) -> TradeoffPoint {
    ht1_point(&virtual_params(p), 1)
}

/// HT3 lifted by virtual users. Needs `K' N >= 3`.
pub fn ht3_vu_point(p: &SystemParams) -> Option<TradeoffPoint> {
    ht3_point(&virtual_params(p))
}

/// YMA+ lifted by virtual users, for every `t` of the virtual system.
pub fn yma_vu_points(p: &SystemParams) -> Vec<TradeoffPoint> {
    let v = virtual_params(p);
    (0..=v.k_total).map(|t| yma_plus_point(&v, t)).collect()
}

/// Decentralized load at memory `m`: `(1-mu)/mu (1 - (1-mu)^r)` with
/// `mu = M/N` and `r = min(K', N)`, continued by `r` at `M = 0`.
pub fn decen_plus(p: &SystemParams, m: &Rational) -> Rational {
    let n = int(p.n_files);
    let r = p.k_active.min(p.n_files);
    if m <= &int(0) {
        return int(r);
    }
    if m >= &n {
        return int(0);
    }
    let mu = m / &n;
    let rest = int(1) - &mu;
    let pow = num::pow(rest.clone(), r);
    rest / mu * (int(1) - pow)
}

/// Decentralized load of the virtual system, i.e. `r = N` on `N K` users
/// with the same per-user memory.
pub fn decen_vu(p: &SystemParams, m: &Rational) -> Rational {
    decen_plus(&virtual_params(p), m)
}
