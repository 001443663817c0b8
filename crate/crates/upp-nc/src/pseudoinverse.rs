//! Lower and upper pseudo-inverses of non-decreasing curves.
//!
//! `lpi(f)(y) = inf{x | f(x) >= y}` is left-continuous and
//! `upi(f)(y) = sup{x | f(x) <= y}` is right-continuous.
//!
//! For `y < f(0)` the set defining `upi` is empty; both inverses return 0 there,
//! the same value `lpi` takes for `y <= f(0)`.
//!
//! The by-sequence passes visit every input element once. Each step looks at
//! a pair of neighbouring elements and falls in one of eight cases, depending on
//! whether the pair is point-after-segment (c1-c4) or segment-after-point (c5-c8),
//! whether the segment is constant, and whether there is a jump between them.

use num_traits::{Signed, Zero};

use crate::curve::{Curve, Element, Point, Segment, Sequence};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, ExtendedValue, Finite, PlusInfinity, Rational};
use crate::visits;

fn finite_values(els: &[Element]) -> Result<()> {
    for e in els {
        let ok = match e {
            Element::Point(p) => p.value.is_finite(),
            Element::Segment(s) => s.right_limit_at_start.is_finite(),
        };
        if !ok {
            return Err(Error::Precondition(format!("{e} is not finite")));
        }
    }
    Ok(())
}

fn fin(v: &ExtendedValue) -> &Rational {
    v.finite().expect("finite checked")
}

fn check_input(s: &Sequence) -> Result<()> {
    s.check_non_decreasing()?;
    finite_values(s.elements())?;
    if let Element::Point(p) = &s.elements()[0] {
        if fin(&p.value).is_negative() {
            return Err(Error::Precondition(format!("{p} has a negative value")));
        }
    }
    Ok(())
}

/// Elements of the lower pseudo-inverse of a finite, non-negative,
/// non-decreasing run of elements. The result starts at `y = 0`.
pub(crate) fn lpi_elements(els: &[Element]) -> Vec<Element> {
    let mut out = Vec::with_capacity(els.len() + 4);
    let Element::Point(first) = &els[0] else { unreachable!("sequences start with a point") };
    visits::visit();
    let (a, v0) = (&first.time, fin(&first.value));
    if v0.is_positive() {
        out.push(Point::new(Rational::zero(), a.clone()).into());
        out.push(Segment::constant(Rational::zero(), v0.clone(), a.clone()).into());
    }
    out.push(Point::new(v0.clone(), a.clone()).into());
    for pair in els.windows(2) {
        visits::visit();
        match (&pair[0], &pair[1]) {
            (Element::Point(p), Element::Segment(s)) => {
                let (v, r, l) = (fin(&p.value), fin(&s.right_limit_at_start), fin(&s.left_limit_at_end));
                let jump = r > v;
                if jump {
                    // c5, c7
                    out.push(Segment::constant(v.clone(), r.clone(), s.start.clone()).into());
                    out.push(Point::new(r.clone(), s.start.clone()).into());
                }
                if !s.is_constant() {
                    // c7, c8
                    out.push(Segment::new(r.clone(), l.clone(), s.start.clone(), s.end.clone()).into());
                }
                // c6: nothing
            }
            (Element::Segment(s), Element::Point(p)) => {
                let (l, v, t) = (fin(&s.left_limit_at_end), fin(&p.value), &p.time);
                if !s.is_constant() {
                    // c3, c4
                    out.push(Point::new(l.clone(), t.clone()).into());
                }
                if v > l {
                    // c1, c3
                    out.push(Segment::constant(l.clone(), v.clone(), t.clone()).into());
                    out.push(Point::new(v.clone(), t.clone()).into());
                }
                // c2: nothing
            }
            _ => unreachable!("alternation"),
        }
    }
    out
}

/// Elements of the upper pseudo-inverse. The result always ends right-open:
/// the value at the last level depends on what follows the input.
pub(crate) fn upi_elements(els: &[Element]) -> Vec<Element> {
    let mut out = Vec::with_capacity(els.len() + 4);
    let Element::Point(first) = &els[0] else { unreachable!("sequences start with a point") };
    visits::visit();
    let (a, v0) = (&first.time, fin(&first.value));
    if v0.is_positive() {
        out.push(Point::new(Rational::zero(), a.clone()).into());
        out.push(Segment::constant(Rational::zero(), v0.clone(), a.clone()).into());
    }
    for pair in els.windows(2) {
        visits::visit();
        match (&pair[0], &pair[1]) {
            (Element::Point(p), Element::Segment(s)) => {
                let (v, r, l) = (fin(&p.value), fin(&s.right_limit_at_start), fin(&s.left_limit_at_end));
                let jump = r > v;
                if jump || !s.is_constant() {
                    // the plateau ending at this point closes here
                    out.push(Point::new(v.clone(), s.start.clone()).into());
                }
                if jump {
                    // c5, c7
                    out.push(Segment::constant(v.clone(), r.clone(), s.start.clone()).into());
                }
                if !s.is_constant() {
                    if jump {
                        // c7
                        out.push(Point::new(r.clone(), s.start.clone()).into());
                    }
                    // c7, c8
                    out.push(Segment::new(r.clone(), l.clone(), s.start.clone(), s.end.clone()).into());
                }
                // c6: the plateau continues
            }
            (Element::Segment(s), Element::Point(p)) => {
                let (l, v, t) = (fin(&s.left_limit_at_end), fin(&p.value), &p.time);
                if v > l {
                    // c1, c3
                    out.push(Point::new(l.clone(), t.clone()).into());
                    out.push(Segment::constant(l.clone(), v.clone(), t.clone()).into());
                }
                // c2, c4: the value at `l` is decided by the next segment
            }
            _ => unreachable!("alternation"),
        }
    }
    out
}

fn non_empty(out: Vec<Element>) -> Result<Sequence> {
    if out.is_empty() {
        return Err(Error::Precondition("pseudo-inverse has an empty domain".into()));
    }
    Ok(Sequence::from_trusted(out))
}

/// Lower pseudo-inverse of a finite sequence `S` on `[a, t[` or `[a, t]`.
///
/// The result is defined on `[0, f(t-)[` (or up to `f(t-)` included when `S`
/// ends on a plateau or a point).
pub fn lower_pseudo_inverse_sequence(s: &Sequence) -> Result<Sequence> {
    check_input(s)?;
    non_empty(lpi_elements(s.elements()))
}

/// Upper pseudo-inverse of a finite sequence; defined on `[0, f(t-)[`, or
/// `[0, f(t)[` for right-closed input.
pub fn upper_pseudo_inverse_sequence(s: &Sequence) -> Result<Sequence> {
    check_input(s)?;
    non_empty(upi_elements(s.elements()))
}

fn check_curve(f: &Curve) -> Result<crate::curve::Classification> {
    f.check_non_decreasing()?;
    let v0 = f.value_at(&Rational::zero())?;
    if v0 < ExtendedValue::zero() {
        return Err(Error::Precondition(format!("f(0) = {v0} is negative")));
    }
    Ok(f.classify())
}

fn constant_zero() -> Curve {
    Curve::from_prefix_and_tail(Vec::new(), ExtendedValue::zero())
}

/// Closes a by-sequence result computed on `[0, tau[` so that it covers
/// `[0, f(tau)[`. When `f` jumps at `tau` the inverse is `tau` across the jump.
fn close_window(f: &Curve, mut out: Vec<Element>, tau: &Rational) -> Result<Vec<Element>> {
    let x2 = f.value_at(tau)?;
    let x2 = x2.expect_finite("value at the window end")?.clone();
    let x1 = if tau.is_zero() { x2.clone() } else { fin(&f.left_limit_at(tau)?).clone() };
    let open = matches!(out.last(), Some(Element::Segment(_))) || out.is_empty();
    if x2 > x1 {
        if open {
            out.push(Point::new(x1.clone(), tau.clone()).into());
        }
        out.push(Segment::constant(x1, x2, tau.clone()).into());
    } else if !open {
        out.pop();
    }
    Ok(out)
}

fn zero_piece(f: &Curve) -> Result<Vec<Element>> {
    // Inverse on [0, f(0)[ before any element is seen.
    let v0 = fin(&f.value_at(&Rational::zero())?).clone();
    Ok(if v0.is_positive() {
        vec![
            Point::new(Rational::zero(), Rational::zero()).into(),
            Segment::constant(Rational::zero(), v0, Rational::zero()).into(),
        ]
    } else {
        Vec::new()
    })
}

fn lpi_window(f: &Curve, tau: &Rational) -> Result<Vec<Element>> {
    let out = if tau.is_zero() {
        let mut z = zero_piece(f)?;
        z.push(Point::new(fin(&f.value_at(tau)?).clone(), Rational::zero()).into());
        z
    } else {
        let s = f.cut(&Rational::zero(), tau, false)?;
        finite_values(s.elements())?;
        lpi_elements(s.elements())
    };
    close_window(f, out, tau)
}

fn upi_window(f: &Curve, tau: &Rational) -> Result<Vec<Element>> {
    let out = if tau.is_zero() {
        zero_piece(f)?
    } else {
        let s = f.cut(&Rational::zero(), tau, false)?;
        finite_values(s.elements())?;
        upi_elements(s.elements())
    };
    close_window(f, out, tau)
}

/// Lower pseudo-inverse of a non-decreasing, non-negative curve.
///
/// For curves that are neither ultimately constant nor wUI the result has
/// `T = f(T_f + d_f)`, `d = c_f`, `c = d_f` and is built from the cut on
/// `[0, T_f + 2 d_f[`.
pub fn lower_pseudo_inverse(f: &Curve) -> Result<Curve> {
    let cls = check_curve(f)?;
    if let Some(tf) = &cls.wui_start {
        // Both inverses equal T_f once y passes the finite part.
        if tf.is_zero() {
            return Ok(constant_zero());
        }
        let s = f.cut(&Rational::zero(), tf, false)?;
        finite_values(s.elements())?;
        return Ok(Curve::from_prefix_and_tail(lpi_elements(s.elements()), Finite(tf.clone())));
    }
    if let (true, Some(ua)) = (cls.is_uc, &cls.ua) {
        // Finite up to the final level, +inf above it.
        let s = f.cut(&Rational::zero(), &ua.affine_start, true)?;
        finite_values(s.elements())?;
        return Ok(Curve::from_prefix_and_tail(lpi_elements(s.elements()), PlusInfinity));
    }
    let (tf, df, cf) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    debug_assert!(cf.is_positive());
    let tau = tf + df + df;
    let out = lpi_window(f, &tau)?;
    let t = fin(&f.value_at(&(tf + df))?).clone();
    let seq = Sequence::from_trusted(out).canonical();
    Curve::new(seq, t, cf.clone(), df.clone())
}

/// Upper pseudo-inverse of a non-decreasing, non-negative curve.
///
/// Generic case: `T = f(T_f)`, `d = c_f`, `c = d_f`, built from the cut on
/// `[0, T_f + d_f[`.
pub fn upper_pseudo_inverse(f: &Curve) -> Result<Curve> {
    let cls = check_curve(f)?;
    if let Some(tf) = &cls.wui_start {
        if tf.is_zero() {
            return Ok(constant_zero());
        }
        let s = f.cut(&Rational::zero(), tf, false)?;
        finite_values(s.elements())?;
        return Ok(Curve::from_prefix_and_tail(upi_elements(s.elements()), Finite(tf.clone())));
    }
    if let (true, Some(ua)) = (cls.is_uc, &cls.ua) {
        let out = upi_window(f, &ua.affine_start)?;
        return Ok(Curve::from_prefix_and_tail(out, PlusInfinity));
    }
    let (tf, df, cf) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    debug_assert!(cf.is_positive());
    let out = upi_window(f, &(tf + df))?;
    let t = fin(&f.value_at(tf)?).clone();
    let seq = Sequence::from_trusted(out).canonical();
    Curve::new(seq, t, cf.clone(), df.clone())
}

/// First abscissa in `els` where the non-decreasing run reaches `y`.
fn first_reaching(els: &[Element], y: &Rational) -> Option<Rational> {
    let y = Finite(y.clone());
    for e in els {
        match e {
            Element::Point(p) if p.value >= y => return Some(p.time.clone()),
            Element::Segment(s) if s.right_limit_at_start >= y => return Some(s.start.clone()),
            Element::Segment(s) if s.left_limit_at_end >= y => {
                let (r, l) = (fin(&s.right_limit_at_start), fin(&s.left_limit_at_end));
                return Some(&s.start + (y.finite().unwrap() - r) * (&s.end - &s.start) / (l - r));
            }
            _ => {}
        }
    }
    None
}

/// `lpi(f)(y)` at a single ordinate, without building the whole inverse.
pub fn lower_pseudo_inverse_at(f: &Curve, y: &Rational) -> Result<ExtendedValue> {
    let (tf, df, cf) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    let end = tf + df;
    let window = f.cut(&Rational::zero(), &end, true)?;
    if let Some(x) = first_reaching(window.elements(), y) {
        return Ok(Finite(x));
    }
    let top = f.value_at(&end)?;
    let Finite(top) = top else { unreachable!("an infinite end value would have been reached") };
    if !cf.is_positive() {
        return Ok(PlusInfinity);
    }
    // f(T + d + k d) = top + k c; the first k that reaches y bounds the search.
    let k = ((y - &top) / cf).ceil();
    let pattern = f.cut(tf, &end, true)?;
    let shifted = y - &k * cf;
    let x = first_reaching(pattern.elements(), &shifted).ok_or_else(|| {
        Error::Invariant(format!("level {} not reached within one period", format_rational(&shifted)))
    })?;
    Ok(Finite(x + k * df))
}
