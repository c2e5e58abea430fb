//! Exact memory-load points and their lower convex envelope.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_big(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Renders `n/d`, or just `n` for integers.
pub fn fmt_rat(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `a`, `a/b` or a finite decimal such as `0.25`.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Rational::new(a, b));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip: BigInt = if ip.is_empty() || ip == "-" { BigInt::zero() } else { ip.parse().ok()? };
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let den = num::pow(BigInt::from(10), fp.len());
        let frac: BigInt = fp.parse().ok()?;
        let frac = Rational::new(frac, den);
        let ip = Rational::from_integer(ip.abs());
        let v = ip + frac;
        return Some(if neg { -v } else { v });
    }
    Some(Rational::from_integer(s.parse().ok()?))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TradeoffPoint {
    pub m: Rational,
    pub r: Rational,
}

impl TradeoffPoint {
    pub fn new(m: Rational, r: Rational) -> Self {
        TradeoffPoint { m, r }
    }
    pub fn ints(m: (i64, i64), r: (i64, i64)) -> Self {
        TradeoffPoint::new(rat(m.0, m.1), rat(r.0, r.1))
    }
}

impl fmt::Debug for TradeoffPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.m), fmt_rat(&self.r))
    }
}

impl Serialize for TradeoffPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TradeoffPoint", 4)?;
        st.serialize_field("M", &fmt_rat(&self.m))?;
        st.serialize_field("R", &fmt_rat(&self.r))?;
        st.serialize_field("M_float", &to_f64(&self.m))?;
        st.serialize_field("R_float", &to_f64(&self.r))?;
        st.end()
    }
}

/// Sign of the cross product (b - a) x (c - a).
fn cross(a: &TradeoffPoint, b: &TradeoffPoint, c: &TradeoffPoint) -> Ordering {
    let lhs = (&b.m - &a.m) * (&c.r - &a.r);
    let rhs = (&b.r - &a.r) * (&c.m - &a.m);
    lhs.cmp(&rhs)
}

/// Corner points of the lower convex envelope, sorted by memory. The result
/// is convex and non-increasing: anything to the right of the first
/// minimum-load point is dominated (extra memory can be left unused).
pub fn lower_convex_envelope(points: &[TradeoffPoint]) -> Vec<TradeoffPoint> {
    let mut pts: Vec<TradeoffPoint> = points.to_vec();
    pts.sort_by(|a, b| a.m.cmp(&b.m).then(a.r.cmp(&b.r)));
    pts.dedup_by(|b, a| a.m == b.m);
    let mut hull: Vec<TradeoffPoint> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) != Ordering::Greater {
            hull.pop();
        }
        hull.push(p);
    }
    if let Some(min_r) = hull.iter().map(|p| p.r.clone()).min() {
        let cut = hull.iter().position(|p| p.r == min_r).unwrap();
        hull.truncate(cut + 1);
    }
    hull
}

/// Evaluate a piecewise-linear envelope. `None` left of the first corner.
pub fn eval_envelope(env: &[TradeoffPoint], m: &Rational) -> Option<Rational> {
    let first = env.first()?;
    if m < &first.m {
        return None;
    }
    for w in env.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if m <= &b.m {
            let lambda = (m - &a.m) / (&b.m - &a.m);
            return Some(&a.r + lambda * (&b.r - &a.r));
        }
    }
    Some(env.last().unwrap().r.clone())
}

/// A labelled set of achievable points.
#[derive(Clone, Debug)]
pub struct TradeoffCurve {
    pub label: String,
    pub points: Vec<TradeoffPoint>,
}

impl TradeoffCurve {
    pub fn new(label: impl Into<String>, points: Vec<TradeoffPoint>) -> Self {
        TradeoffCurve {
            label: label.into(),
            points,
        }
    }

    pub fn envelope(&self) -> Vec<TradeoffPoint> {
        lower_convex_envelope(&self.points)
    }

    pub fn eval(&self, m: &Rational) -> Option<Rational> {
        eval_envelope(&self.envelope(), m)
    }
}
