//! Ultimately pseudo-periodic piecewise-affine curves.
//!
//! A [`Curve`] is a [`Sequence`] on `[0, T+d[` plus the parameters
//! `(T, d, c)`: for `t >= T` the curve satisfies `f(t + k*d) = f(t) + k*c`.

mod json;
mod sequence;

pub use json::{CurveJson, ElementJson};
pub use sequence::{Element, Point, Segment, Sequence};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, lcm, ExtendedValue, Finite, PlusInfinity, Rational};

/// `(T_a, rho)`: the curve is affine with slope `rho` from `T_a` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UaInfo {
    pub affine_start: Rational,
    pub slope: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_non_decreasing: bool,
    pub is_non_negative: bool,
    pub is_left_continuous: bool,
    pub is_right_continuous: bool,
    pub is_uc: bool,
    pub is_wui: bool,
    /// Set for finite ultimately affine curves.
    pub ua: Option<UaInfo>,
    /// For wUI curves, the abscissa after which the curve is `+inf`.
    pub wui_start: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    sequence: Sequence,
    t: Rational,
    d: Rational,
    c: Rational,
}

impl Curve {
    pub fn new(sequence: Sequence, t: Rational, d: Rational, c: Rational) -> Result<Self> {
        if t.is_negative() {
            return Err(Error::Invariant(format!("pseudo-period start T = {} is negative", format_rational(&t))));
        }
        if !d.is_positive() {
            return Err(Error::Invariant(format!("pseudo-period length d = {} is not positive", format_rational(&d))));
        }
        if !sequence.start().is_zero() {
            return Err(Error::Invariant(format!(
                "sequence starts at {}, expected 0",
                format_rational(sequence.start())
            )));
        }
        let end = &t + &d;
        if sequence.end() != &end || sequence.end_included() {
            return Err(Error::Invariant(format!(
                "sequence must cover [0, {}[ (T + d), found last element {}",
                format_rational(&end),
                sequence.elements().last().expect("non-empty")
            )));
        }
        Ok(Curve { sequence, t, d, c })
    }

    pub(crate) fn from_trusted(sequence: Sequence, t: Rational, d: Rational, c: Rational) -> Self {
        debug_assert!(Curve::new(sequence.clone(), t.clone(), d.clone(), c.clone()).is_ok());
        Curve { sequence, t, d, c }
    }

    pub fn sequence(&self) -> &Sequence {
        &self.sequence
    }

    /// `T`.
    pub fn pseudo_period_start(&self) -> &Rational {
        &self.t
    }

    /// `d`.
    pub fn pseudo_period_length(&self) -> &Rational {
        &self.d
    }

    /// `c`.
    pub fn pseudo_period_height(&self) -> &Rational {
        &self.c
    }

    /// Long-run slope `c/d`, `+inf` for curves that end at `+inf`.
    pub fn growth_rate(&self) -> ExtendedValue {
        if self.period_is_infinite() {
            PlusInfinity
        } else {
            Finite(&self.c / &self.d)
        }
    }

    fn period_is_infinite(&self) -> bool {
        let end = &self.t + &self.d;
        self.sequence.value_at(&self.t).map(|v| v.is_infinite()).unwrap_or(false)
            && self.sequence.left_limit_at(&end).map(|v| v.is_infinite()).unwrap_or(false)
    }

    fn end(&self) -> Rational {
        &self.t + &self.d
    }

    /// Number of whole periods to subtract from `t >= T + d` so that it lands in `[T, T+d[`.
    fn periods_before(&self, t: &Rational) -> Rational {
        ((t - &self.t) / &self.d).floor()
    }

    fn check_time(t: &Rational) -> Result<()> {
        if t.is_negative() {
            Err(Error::Domain(format!("negative time {}", format_rational(t))))
        } else {
            Ok(())
        }
    }

    pub fn value_at(&self, t: &Rational) -> Result<ExtendedValue> {
        Self::check_time(t)?;
        if t < &self.end() {
            return self.sequence.value_at(t);
        }
        let k = self.periods_before(t);
        Ok(self.sequence.value_at(&(t - &k * &self.d))?.add_rational(&(&k * &self.c)))
    }

    pub fn right_limit_at(&self, t: &Rational) -> Result<ExtendedValue> {
        Self::check_time(t)?;
        if t < &self.end() {
            return self.sequence.right_limit_at(t);
        }
        let k = self.periods_before(t);
        Ok(self.sequence.right_limit_at(&(t - &k * &self.d))?.add_rational(&(&k * &self.c)))
    }

    pub fn left_limit_at(&self, t: &Rational) -> Result<ExtendedValue> {
        if !t.is_positive() {
            return Err(Error::Domain(format!("left limit at {} needs t > 0", format_rational(t))));
        }
        if t <= &self.end() {
            return self.sequence.left_limit_at(t);
        }
        // k such that t - k*d lies in ]T, T+d].
        let k = ((t - &self.t) / &self.d).ceil() - Rational::from_integer(1.into());
        Ok(self.sequence.left_limit_at(&(t - &k * &self.d))?.add_rational(&(&k * &self.c)))
    }

    /// The base sequence restricted to one pseudo-period, `[T, T+d[`.
    fn period_pattern(&self) -> Sequence {
        self.sequence.restrict(&self.t, &self.end(), false).expect("period inside base")
    }

    /// `S^D_f` for `D = [from, to[` or `[from, to]`.
    pub fn cut(&self, from: &Rational, to: &Rational, closed: bool) -> Result<Sequence> {
        Self::check_time(from)?;
        if from > to || (from == to && !closed) {
            return Err(Error::Domain(format!(
                "empty cut interval [{}, {}{}",
                format_rational(from),
                format_rational(to),
                if closed { "]" } else { "[" }
            )));
        }
        let end = self.end();
        if to < &end || (to == &end && !closed) {
            return self.sequence.restrict(from, to, closed);
        }
        let mut out = Vec::new();
        let zero = Rational::zero();
        if from < &end {
            let first = self.sequence.restrict(from, &end, false)?;
            sequence::push_window(&mut out, first.elements(), &zero, &zero, from, &end);
        }
        let pattern = self.period_pattern();
        let mut k = if from < &end { Rational::from_integer(1.into()) } else { self.periods_before(from) };
        loop {
            let dt = &k * &self.d;
            let lo = &self.t + &dt;
            if &lo >= to {
                break;
            }
            let dv = &k * &self.c;
            let hi = &lo + &self.d;
            let lo_clip = if from > &lo { from.clone() } else { lo.clone() };
            let hi_clip = if to < &hi { to.clone() } else { hi };
            let src = if lo_clip == lo {
                pattern.elements()
            } else {
                let i = pattern
                    .elements()
                    .partition_point(|e| e.end_time() + &dt <= lo_clip && !(e.is_point() && e.end_time() + &dt == lo_clip));
                &pattern.elements()[i..]
            };
            sequence::push_window(&mut out, src, &dt, &dv, &lo_clip, &hi_clip);
            k += Rational::from_integer(1.into());
        }
        if closed {
            out.push(Point::new(to.clone(), self.value_at(to)?).into());
        }
        Ok(Sequence::from_trusted(out))
    }

    /// Base sequence on `[0, T+d]` including the first point of the next period.
    fn closed_window(&self) -> Sequence {
        self.cut(&Rational::zero(), &self.end(), true).expect("window")
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.closed_window().check_non_decreasing().is_ok()
    }

    /// Like [`Curve::is_non_decreasing`], reporting the offending elements.
    pub fn check_non_decreasing(&self) -> Result<()> {
        self.closed_window().check_non_decreasing()
    }

    pub fn classify(&self) -> Classification {
        let window = self.closed_window();
        let els = window.elements();
        let is_non_decreasing = window.check_non_decreasing().is_ok();
        let mut non_negative = true;
        for e in els {
            let (a, b) = limits(e);
            if a < &ExtendedValue::zero() || b < &ExtendedValue::zero() {
                non_negative = false;
            }
        }
        let is_non_negative = non_negative && (!self.c.is_negative() || self.period_is_infinite());
        let mut left = true;
        let mut right = true;
        for (i, e) in els.iter().enumerate() {
            if let Element::Point(p) = e {
                if i > 0 && limits(&els[i - 1]).1 != &p.value {
                    left = false;
                }
                if i + 1 < els.len() && limits(&els[i + 1]).0 != &p.value {
                    right = false;
                }
            }
        }
        let wui_start = self.wui_start(els);
        let ua = if wui_start.is_some() { None } else { self.ua_info(els) };
        Classification {
            is_non_decreasing,
            is_non_negative,
            is_left_continuous: left,
            is_right_continuous: right,
            is_uc: ua.as_ref().is_some_and(|u| u.slope.is_zero()),
            is_wui: wui_start.is_some(),
            ua,
            wui_start,
        }
    }

    /// `T_f` for curves that are finite before it and `+inf` after it.
    fn wui_start(&self, els: &[Element]) -> Option<Rational> {
        let first_inf = els.iter().position(|e| {
            let (a, b) = limits(e);
            a.is_infinite() || b.is_infinite()
        })?;
        let tail_inf = els[first_inf..].iter().all(|e| {
            let (a, b) = limits(e);
            a == &PlusInfinity && b == &PlusInfinity
        });
        if !tail_inf || !self.period_is_infinite() {
            return None;
        }
        Some(els[first_inf].start_time().clone())
    }

    /// Ultimately-affine check: every element of `[T, T+d]` lies on one line.
    /// `T_a` is the earliest breakpoint from which that line describes the curve.
    fn ua_info(&self, els: &[Element]) -> Option<UaInfo> {
        let slope = &self.c / &self.d;
        let v_t = self.sequence.value_at(&self.t).ok()?;
        let base = v_t.finite()?.clone();
        let on_line = |t: &Rational, v: &ExtendedValue| v.finite() == Some(&(&base + &slope * (t - &self.t)));
        let element_on_line = |e: &Element| match e {
            Element::Point(p) => on_line(&p.time, &p.value),
            Element::Segment(s) => {
                on_line(&s.start, &s.right_limit_at_start) && on_line(&s.end, &s.left_limit_at_end)
            }
        };
        // The window holds the base sequence plus the closing point at T + d.
        let first_in_period = els
            .iter()
            .position(|e| e.end_time() > &self.t || (e.is_point() && e.start_time() == &self.t))
            .expect("T inside window");
        if !els[first_in_period..].iter().all(element_on_line) {
            return None;
        }
        // Walk back over collinear elements; the affine part starts at a point.
        let mut start = self.t.clone();
        for e in els[..=first_in_period].iter().rev() {
            if !element_on_line(e) {
                break;
            }
            if let Element::Point(p) = e {
                start = p.time.clone();
            }
        }
        Some(UaInfo { affine_start: start, slope })
    }

    /// Collinear merge of the base sequence followed by a search for an
    /// earlier pseudo-period start among the breakpoints in `[0, T]`.
    pub fn minimize(&self) -> Curve {
        let canon = self.sequence.canonical();
        let f = Curve { sequence: canon, t: self.t.clone(), d: self.d.clone(), c: self.c.clone() };
        let mut candidates: Vec<Rational> = f.sequence.point_times().filter(|t| *t < &f.t).cloned().collect();
        candidates.push(f.t.clone());
        // Validity is monotone in the start, so binary search the first valid candidate.
        let first_valid = candidates.partition_point(|t| !f.upp_holds_from(t));
        let new_t = candidates[first_valid].clone();
        if new_t == f.t {
            return f;
        }
        let seq = f.cut(&Rational::zero(), &(&new_t + &f.d), false).expect("cut").canonical();
        Curve { sequence: seq, t: new_t, d: f.d, c: f.c }
    }

    /// Whether `f(t + d) = f(t) + c` for all `t >= from` (given it holds from `T`).
    fn upp_holds_from(&self, from: &Rational) -> bool {
        if from >= &self.t {
            return true;
        }
        let lhs = self.sequence.restrict(from, &self.t, false).expect("inside base");
        let rhs = self
            .cut(&(from + &self.d), &self.end(), false)
            .expect("inside base");
        lhs.shifted(&self.d, &self.c).canonical() == rhs.canonical()
    }

    /// Pointwise equality, decided on `[0, max(T_f, T_g) + lcm(d_f, d_g)[`.
    ///
    /// Two UPP functions that agree on that window and share the same
    /// growth per unit time agree everywhere, since past `max(T)` both repeat
    /// with period `lcm(d_f, d_g)`.
    pub fn equivalent(&self, other: &Curve) -> bool {
        let start = if self.t > other.t { self.t.clone() } else { other.t.clone() };
        let horizon = &start + lcm(&self.d, &other.d);
        let a = self.cut(&Rational::zero(), &horizon, false).expect("cut");
        let b = other.cut(&Rational::zero(), &horizon, false).expect("cut");
        if a.canonical() != b.canonical() {
            return false;
        }
        match (self.period_is_infinite(), other.period_is_infinite()) {
            (true, true) => true,
            (false, false) => &self.c / &self.d == &other.c / &other.d,
            _ => false,
        }
    }

    /// Curve equal to `prefix` on its domain `[0, Y[` or `[0, Y]` and to the
    /// constant `tail` afterwards. An empty prefix yields the constant curve.
    pub fn from_prefix_and_tail(mut prefix: Vec<Element>, tail: ExtendedValue) -> Curve {
        let one = Rational::from_integer(1.into());
        let (t, elements) = match prefix.last() {
            None => (
                Rational::zero(),
                vec![Point::new(Rational::zero(), tail.clone()).into(), Segment::constant(Rational::zero(), one.clone(), tail).into()],
            ),
            Some(Element::Segment(s)) => {
                let y = s.end.clone();
                prefix.push(Point::new(y.clone(), tail.clone()).into());
                prefix.push(Segment::constant(y.clone(), &y + &one, tail).into());
                (y, prefix)
            }
            Some(Element::Point(p)) => {
                let y = p.time.clone();
                let y1 = &y + &one;
                prefix.push(Segment::constant(y.clone(), y1.clone(), tail.clone()).into());
                prefix.push(Point::new(y1.clone(), tail.clone()).into());
                prefix.push(Segment::constant(y1.clone(), &y1 + &one, tail).into());
                (y1, prefix)
            }
        };
        Curve::from_trusted(Sequence::from_trusted(elements), t, one, Rational::zero()).minimize()
    }

    /// Pointwise sum. Both curves must be finite.
    pub fn add(&self, other: &Curve) -> Result<Curve> {
        let t = if self.t > other.t { self.t.clone() } else { other.t.clone() };
        let d = lcm(&self.d, &other.d);
        let c = &self.c * (&d / &self.d) + &other.c * (&d / &other.d);
        let end = &t + &d;
        let zero = Rational::zero();
        let a = self.cut(&zero, &end, false)?;
        let b = other.cut(&zero, &end, false)?;
        let mut times: Vec<Rational> = a.point_times().chain(b.point_times()).cloned().collect();
        times.sort();
        times.dedup();
        times.push(end.clone());
        let mut out = Vec::with_capacity(2 * times.len());
        for w in times.windows(2) {
            out.push(Point::new(w[0].clone(), a.value_at(&w[0])?.add(&b.value_at(&w[0])?)?).into());
            out.push(
                Segment::new(
                    w[0].clone(),
                    w[1].clone(),
                    a.right_limit_at(&w[0])?.add(&b.right_limit_at(&w[0])?)?,
                    a.left_limit_at(&w[1])?.add(&b.left_limit_at(&w[1])?)?,
                )
                .into(),
            );
        }
        Ok(Curve::from_trusted(Sequence::new(out)?, t, d, c).minimize())
    }

    /// Parameters `(T, d, c)` rendered as text.
    pub fn parameters_text(&self) -> String {
        format!("T={} d={} c={}", format_rational(&self.t), format_rational(&self.d), format_rational(&self.c))
    }
}

fn limits(e: &Element) -> (&ExtendedValue, &ExtendedValue) {
    match e {
        Element::Point(p) => (&p.value, &p.value),
        Element::Segment(s) => (&s.right_limit_at_start, &s.left_limit_at_end),
    }
}
