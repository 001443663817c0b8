//! Brute-force reference implementations, straight from the definitions, and
//! a seeded random curve generator. Slow on purpose; only for testing.
//!
//! The scans walk every breakpoint of the periodic extension plus a regular
//! grid. Between two consecutive scan points a curve is affine, so answers come
//! from solving one affine equation and are exact.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::curve::{Curve, Element, Point, Segment, Sequence};
use crate::numeric::{ExtendedValue, Finite, PlusInfinity, Rational};

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleValue {
    Value(ExtendedValue),
    /// The threshold was not decided inside the scanned horizon.
    BeyondHorizon,
}

impl OracleValue {
    pub fn value(self) -> Option<ExtendedValue> {
        match self {
            OracleValue::Value(v) => Some(v),
            OracleValue::BeyondHorizon => None,
        }
    }
}

/// Sorted breakpoints of the periodic extension of `f` in `[0, horizon]`,
/// grid points `k * step`, and `horizon` itself.
pub fn scan_points(f: &Curve, horizon: &Rational, step: &Rational) -> Vec<Rational> {
    let (t, d) = (f.pseudo_period_start(), f.pseudo_period_length());
    let end = t + d;
    let base: Vec<Rational> = f.sequence().point_times().cloned().collect();
    let periodic: Vec<&Rational> = base.iter().filter(|p| *p >= t && *p < &end).collect();
    let mut out: Vec<Rational> = base.iter().filter(|p| *p <= horizon).cloned().collect();
    let mut shift = d.clone();
    while &(t + &shift) <= horizon {
        out.extend(periodic.iter().map(|p| *p + &shift).filter(|p| p <= horizon));
        shift += d;
    }
    if step.is_positive() {
        let mut x = Rational::zero();
        while &x <= horizon {
            out.push(x.clone());
            x += step;
        }
    }
    out.push(horizon.clone());
    out.sort();
    out.dedup();
    out
}

fn fin(v: &ExtendedValue) -> Option<&Rational> {
    v.finite()
}

/// `x` in `]a, b[` where the affine piece from `(a, ra)` to `(b, lb)` meets `y`.
fn solve(a: &Rational, b: &Rational, ra: &Rational, lb: &Rational, y: &Rational) -> Rational {
    a + (y - ra) / (lb - ra) * (b - a)
}

/// True when the search can stop: past `T + d` a curve with `c <= 0` never
/// exceeds what it already reached.
fn saturated(f: &Curve, horizon: &Rational) -> bool {
    !f.pseudo_period_height().is_positive() && horizon >= &(f.pseudo_period_start() + f.pseudo_period_length())
}

/// `inf{x >= 0 | f(x) >= y}` for a non-decreasing `f`.
pub fn oracle_lpi(f: &Curve, y: &Rational, horizon: &Rational, step: &Rational) -> OracleValue {
    let pts = scan_points(f, horizon, step);
    let target = Finite(y.clone());
    for (i, x) in pts.iter().enumerate() {
        if f.value_at(x).expect("in domain") >= target {
            return OracleValue::Value(Finite(x.clone()));
        }
        let Some(next) = pts.get(i + 1) else { break };
        let ra = f.right_limit_at(x).expect("in domain");
        if ra >= target {
            return OracleValue::Value(Finite(x.clone()));
        }
        let lb = f.left_limit_at(next).expect("in domain");
        if lb > target {
            let (ra, lb) = (fin(&ra).unwrap(), fin(&lb).unwrap());
            return OracleValue::Value(Finite(solve(x, next, ra, lb, y)));
        }
    }
    if saturated(f, horizon) {
        OracleValue::Value(PlusInfinity)
    } else {
        OracleValue::BeyondHorizon
    }
}

/// `sup{x >= 0 | f(x) <= y}` for a non-decreasing `f`; 0 when the set is empty.
pub fn oracle_upi(f: &Curve, y: &Rational, horizon: &Rational, step: &Rational) -> OracleValue {
    let pts = scan_points(f, horizon, step);
    let target = Finite(y.clone());
    for (i, x) in pts.iter().enumerate() {
        if f.value_at(x).expect("in domain") > target {
            return OracleValue::Value(Finite(x.clone()));
        }
        let Some(next) = pts.get(i + 1) else { break };
        let ra = f.right_limit_at(x).expect("in domain");
        if ra > target {
            return OracleValue::Value(Finite(x.clone()));
        }
        let lb = f.left_limit_at(next).expect("in domain");
        if lb > target {
            let (ra, lb) = (fin(&ra).unwrap(), fin(&lb).unwrap());
            return OracleValue::Value(Finite(solve(x, next, ra, lb, y)));
        }
    }
    if saturated(f, horizon) {
        OracleValue::Value(PlusInfinity)
    } else {
        OracleValue::BeyondHorizon
    }
}

/// Repeats a bounded search, doubling the horizon, until it is decided.
pub fn search_unbounded(f: &Curve, y: &Rational, oracle: fn(&Curve, &Rational, &Rational, &Rational) -> OracleValue) -> ExtendedValue {
    let d = f.pseudo_period_length().clone();
    let mut horizon = f.pseudo_period_start() + &d + &d;
    for _ in 0..64 {
        if let OracleValue::Value(v) = oracle(f, y, &horizon, &d) {
            return v;
        }
        horizon = &horizon + &horizon;
    }
    panic!("oracle search did not terminate for y = {y}");
}

pub fn oracle_lpi_unbounded(f: &Curve, y: &Rational) -> ExtendedValue {
    search_unbounded(f, y, oracle_lpi)
}

pub fn oracle_upi_unbounded(f: &Curve, y: &Rational) -> ExtendedValue {
    search_unbounded(f, y, oracle_upi)
}

/// `f(g(t))`.
pub fn oracle_compose(f: &Curve, g: &Curve, t: &Rational) -> ExtendedValue {
    match g.value_at(t).expect("in domain") {
        Finite(x) => f.value_at(&x).expect("in domain"),
        other => other,
    }
}

/// `inf_{0 <= s <= t} U(s) + R [t - s - θ]^+`.
///
/// The objective is affine in `s` between breakpoints of `U` and `t - θ`; its
/// infimum is one of the values or one-sided limits at those points.
pub fn oracle_conv_rl(u: &Curve, rate: &Rational, latency: &Rational, t: &Rational) -> ExtendedValue {
    let mut pts: Vec<Rational> = scan_points(u, t, &Rational::zero());
    let knee = t - latency;
    if knee.is_positive() {
        pts.push(knee);
    }
    pts.sort();
    pts.dedup();
    let service = |s: &Rational| -> Rational {
        let x = t - s - latency;
        if x.is_positive() {
            rate * x
        } else {
            Rational::zero()
        }
    };
    let mut best = PlusInfinity;
    let mut consider = |v: ExtendedValue, s: &Rational| {
        let v = v.add_rational(&service(s));
        if v < best {
            best = v;
        }
    };
    for (i, s) in pts.iter().enumerate() {
        consider(u.value_at(s).expect("in domain"), s);
        if let Some(next) = pts.get(i + 1) {
            consider(u.right_limit_at(s).expect("in domain"), s);
            consider(u.left_limit_at(next).expect("in domain"), next);
        }
    }
    best
}

/// Shape of a generated curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// Arbitrary pseudo-periodic tail.
    Upp,
    /// Affine tail with positive slope.
    UltimatelyAffine,
    /// Constant tail.
    UltimatelyConstant,
    /// `+inf` from some point on.
    WeaklyUltimatelyInfinite,
}

/// One-sided continuity imposed on generated curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Continuity {
    Any,
    Left,
    Right,
}

/// Knobs of the random generator.
#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub min_elements: usize,
    pub max_elements: usize,
    pub max_denominator: i64,
    pub plateau_probability: f64,
    pub jump_probability: f64,
    /// Forces `f(0) = 0`.
    pub start_at_zero: bool,
    pub continuity: Continuity,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            min_elements: 2,
            max_elements: 40,
            max_denominator: 12,
            plateau_probability: 0.3,
            jump_probability: 0.3,
            start_at_zero: false,
            continuity: Continuity::Any,
        }
    }
}

fn small(rng: &mut impl Rng, max: i64, q: i64) -> Rational {
    Rational::new(rng.gen_range(1..=max).into(), q.into())
}

/// Random non-decreasing, non-negative piecewise-affine run starting with a
/// point at 0. It has `pieces` point-segment pairs and ends open. Returns the
/// elements and the point times.
fn random_run(rng: &mut impl Rng, cfg: &GeneratorConfig, pieces: usize, tq: i64, vq: i64) -> (Vec<Element>, Vec<Rational>) {
    let mut els: Vec<Element> = Vec::with_capacity(2 * pieces);
    let mut times = Vec::with_capacity(pieces + 1);
    let mut t = Rational::zero();
    let mut v = if cfg.start_at_zero || rng.gen_bool(0.5) { Rational::zero() } else { small(rng, 4, vq) };
    let jump_after_point = cfg.continuity != Continuity::Right;
    let jump_at_point = cfg.continuity != Continuity::Left;
    for _ in 0..pieces {
        let next = &t + small(rng, 4, tq);
        let ra = if jump_after_point && rng.gen_bool(cfg.jump_probability) { &v + small(rng, 4, vq) } else { v.clone() };
        let lb = if rng.gen_bool(cfg.plateau_probability) { ra.clone() } else { &ra + small(rng, 6, vq) };
        els.push(Point::new(t.clone(), v.clone()).into());
        els.push(Segment::new(t.clone(), next.clone(), ra, lb.clone()).into());
        times.push(t);
        v = if jump_at_point && rng.gen_bool(cfg.jump_probability) { &lb + small(rng, 4, vq) } else { lb };
        t = next;
    }
    times.push(t);
    (els, times)
}

fn last_left_limit(els: &[Element]) -> Rational {
    match els.last() {
        Some(Element::Segment(s)) => s.left_limit_at_end.finite().unwrap().clone(),
        _ => unreachable!("runs end with a segment"),
    }
}

fn point_value(els: &[Element], time: &Rational) -> Rational {
    els.iter()
        .find_map(|e| match e {
            Element::Point(p) if &p.time == time => p.value.finite().cloned(),
            _ => None,
        })
        .expect("point exists")
}

/// Random non-decreasing, non-negative curve of the given kind.
pub fn random_curve(rng: &mut impl Rng, kind: CurveKind, cfg: &GeneratorConfig) -> Curve {
    let elements = rng.gen_range(cfg.min_elements.max(2)..=cfg.max_elements.max(2));
    let pieces = (elements / 2).max(1);
    let tq = rng.gen_range(1..=cfg.max_denominator);
    let vq = rng.gen_range(1..=cfg.max_denominator);
    match kind {
        CurveKind::Upp => {
            let (els, times) = random_run(rng, cfg, pieces, tq, vq);
            let m = rng.gen_range(0..pieces);
            let (t, end) = (times[m].clone(), times[pieces].clone());
            let base = point_value(&els, &t);
            let mut c = last_left_limit(&els) - &base;
            let may_jump = cfg.continuity != Continuity::Left;
            if may_jump && (rng.gen_bool(cfg.jump_probability) || c.is_zero()) {
                c += small(rng, 4, vq);
            }
            let d = &end - &t;
            Curve::new(Sequence::new(els).unwrap(), t, d, c).unwrap()
        }
        CurveKind::UltimatelyAffine => {
            let (mut els, times) = random_run(rng, cfg, pieces.saturating_sub(1).max(1), tq, vq);
            let t = times.last().unwrap().clone();
            let prev = last_left_limit(&els);
            let jump = cfg.continuity != Continuity::Left && rng.gen_bool(cfg.jump_probability);
            let v = if jump { &prev + small(rng, 4, vq) } else { prev };
            let d = small(rng, 4, tq);
            let c = small(rng, 6, vq);
            els.push(Point::new(t.clone(), v.clone()).into());
            els.push(Segment::new(t.clone(), &t + &d, v.clone(), &v + &c).into());
            Curve::new(Sequence::new(els).unwrap(), t, d, c).unwrap()
        }
        CurveKind::UltimatelyConstant => {
            let (mut els, _) = random_run(rng, cfg, pieces.saturating_sub(1).max(1), tq, vq);
            let prev = last_left_limit(&els);
            let level = if rng.gen_bool(cfg.jump_probability) { &prev + small(rng, 4, vq) } else { prev.clone() };
            let close = match cfg.continuity {
                Continuity::Left => true,
                Continuity::Right => false,
                Continuity::Any => rng.gen_bool(0.5),
            };
            if close {
                // A point between the last segment and the tail.
                let end = els.last().unwrap().end_time().clone();
                let mid = match cfg.continuity {
                    Continuity::Left => prev,
                    _ if level > prev && rng.gen_bool(0.5) => &prev + (&level - &prev) / Rational::from_integer(2.into()),
                    _ => prev,
                };
                els.push(Point::new(end, mid).into());
            }
            Curve::from_prefix_and_tail(els, Finite(level))
        }
        CurveKind::WeaklyUltimatelyInfinite => {
            let (mut els, _) = random_run(rng, cfg, pieces.saturating_sub(1).max(1), tq, vq);
            let close = match cfg.continuity {
                Continuity::Left => true,
                Continuity::Right => false,
                Continuity::Any => rng.gen_bool(0.5),
            };
            if close {
                let end = els.last().unwrap().end_time().clone();
                let lb = last_left_limit(&els);
                let v = if cfg.continuity == Continuity::Left { lb } else { lb + small(rng, 2, vq) };
                els.push(Point::new(end, v).into());
            }
            Curve::from_prefix_and_tail(els, PlusInfinity)
        }
    }
}

/// Kind drawn with weights 5:2:2:1 for UPP, UA, UC and wUI.
pub fn random_kind(rng: &mut impl Rng) -> CurveKind {
    match rng.gen_range(0..10) {
        0..=4 => CurveKind::Upp,
        5 | 6 => CurveKind::UltimatelyAffine,
        7 | 8 => CurveKind::UltimatelyConstant,
        _ => CurveKind::WeaklyUltimatelyInfinite,
    }
}

/// Finite non-decreasing sequence with exactly `2 * pieces` elements, for
/// scaling measurements.
pub fn random_sequence(rng: &mut impl Rng, pieces: usize) -> Sequence {
    let cfg = GeneratorConfig::default();
    let (els, _) = random_run(rng, &cfg, pieces, 4, 4);
    Sequence::new(els).unwrap()
}
