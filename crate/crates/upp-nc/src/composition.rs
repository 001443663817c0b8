//! Composition `h = f ∘ g` of UPP curves.
//!
//! `g` must be non-negative, non-decreasing and not wUI. The by-curve
//! algorithm picks the UPP parameters of `h`, cuts `g` on `D_g` and `f` on
//! `D_f`, composes the two finite sequences and reattaches the parameters.
//! When `f` or `g` is ultimately affine or ultimately constant, smaller
//! parameters and cut domains are available; those shortcuts are tried first,
//! in the order UC, UA-UA, g-UA, f-UA, general.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::curve::{Classification, Curve, Element, Point, Segment, Sequence};
use crate::error::{Error, Result};
use crate::numeric::{denominator, format_rational, numerator, ExtendedValue, Finite, Rational};
use crate::pseudoinverse::{lower_pseudo_inverse_at, lpi_elements, upper_pseudo_inverse};
use crate::visits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ComposeMode {
    /// Most specialized applicable path.
    #[default]
    Auto,
    ForceGeneral,
    /// Like `Auto`, but fails when only the general path applies.
    ForceSpecialized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComposePath {
    UltimatelyConstant,
    BothUltimatelyAffine,
    InnerUltimatelyAffine,
    OuterUltimatelyAffine,
    General,
}

impl fmt::Display for ComposePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComposePath::UltimatelyConstant => "ultimately-constant",
            ComposePath::BothUltimatelyAffine => "both-ultimately-affine",
            ComposePath::InnerUltimatelyAffine => "g-ultimately-affine",
            ComposePath::OuterUltimatelyAffine => "f-ultimately-affine",
            ComposePath::General => "general",
        })
    }
}

/// A bounded interval `[from, to[` or `[from, to]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub from: Rational,
    pub to: Rational,
    pub closed: bool,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}{}",
            format_rational(&self.from),
            format_rational(&self.to),
            if self.closed { "]" } else { "[" }
        )
    }
}

/// What the by-curve composition did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeReport {
    pub path: ComposePath,
    pub domain_f: Interval,
    pub domain_g: Interval,
    /// `|S^{D_f}_f|`
    pub cut_f_len: usize,
    /// `|S^{D_g}_g|`
    pub cut_g_len: usize,
}

impl fmt::Display for ComposeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "path: {}\nD_f: {} ({} elements)\nD_g: {} ({} elements)",
            self.path, self.domain_f, self.cut_f_len, self.domain_g, self.cut_g_len
        )
    }
}

/// Forward-only reader over a sequence for non-decreasing query abscissas.
struct Cursor<'a> {
    els: &'a [Element],
    i: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a Sequence) -> Self {
        Cursor { els: s.elements(), i: 0 }
    }

    /// Moves to the first element `e` with `accept(e)`, never backwards.
    fn seek(&mut self, accept: impl Fn(&Element) -> bool) -> &'a Element {
        while !accept(&self.els[self.i]) {
            self.i += 1;
            visits::visit();
        }
        &self.els[self.i]
    }

    fn value(&mut self, t: &Rational) -> ExtendedValue {
        match self.seek(|e| match e {
            Element::Point(p) => &p.time == t,
            Element::Segment(s) => &s.start < t && t < &s.end,
        }) {
            Element::Point(p) => p.value.clone(),
            Element::Segment(s) => s.value_at(t),
        }
    }

    fn right_limit(&mut self, t: &Rational) -> ExtendedValue {
        match self.seek(|e| matches!(e, Element::Segment(s) if &s.start <= t && t < &s.end)) {
            Element::Segment(s) => s.value_at(t),
            _ => unreachable!(),
        }
    }

    fn left_limit(&mut self, t: &Rational) -> ExtendedValue {
        match self.seek(|e| matches!(e, Element::Segment(s) if &s.start < t && t <= &s.end)) {
            Element::Segment(s) => s.value_at(t),
            _ => unreachable!(),
        }
    }
}

fn first_value(s: &Sequence) -> &ExtendedValue {
    match &s.elements()[0] {
        Element::Point(p) => &p.value,
        _ => unreachable!(),
    }
}

fn require_finite(s: &Sequence, name: &str) -> Result<()> {
    for e in s.elements() {
        let v = match e {
            Element::Point(p) => &p.value,
            Element::Segment(s) => &s.right_limit_at_start,
        };
        if v.is_infinite() {
            return Err(Error::Precondition(format!("{name} takes an infinite value at {e}")));
        }
    }
    Ok(())
}

/// Composition of finite sequences: `S_g` on `[0, a[` (or `[0, a]`) and `S_f`
/// covering the values `g` takes there. The result lives on the domain of `S_g`.
pub fn compose_sequences(sf: &Sequence, sg: &Sequence) -> Result<Sequence> {
    sg.check_non_decreasing()?;
    require_finite(sg, "g")?;
    let g0 = first_value(sg).clone();
    if g0 < ExtendedValue::zero() {
        return Err(Error::Precondition(format!("g(0) = {g0} is negative")));
    }
    let a = sg.end().clone();
    let g_closed = sg.end_included();
    let g_end_constant = matches!(sg.elements().last(), Some(Element::Segment(s)) if s.is_constant());
    let g_end = if g_closed { sg.value_at(&a)? } else { sg.left_limit_at(&a)? };
    let (g0, g_end) = (g0.finite().unwrap().clone(), g_end.finite().unwrap().clone());
    let need_closed = g_closed || g_end_constant;
    let covered = sf.start() <= &g0
        && (sf.end() > &g_end || (sf.end() == &g_end && (sf.end_included() || !need_closed)));
    if !covered {
        return Err(Error::Domain(format!(
            "S_f is defined on [{}, {}{} but g takes values in [{}, {}{}",
            format_rational(sf.start()),
            format_rational(sf.end()),
            if sf.end_included() { "]" } else { "[" },
            format_rational(&g0),
            format_rational(&g_end),
            if need_closed { "]" } else { "[" }
        )));
    }

    // Breakpoints of h: those of g, plus lpi(g)(y) for the interior breakpoints y of f.
    let tg: Vec<&Rational> = sg.point_times().filter(|t| *t < &a).collect();
    let ys: Vec<&Rational> = sf.point_times().filter(|y| *y > &g0 && *y < &g_end).collect();
    let inv = Sequence::from_trusted(lpi_elements(sg.elements()));
    let mut inv_cursor = Cursor::new(&inv);
    let tbar: Vec<Rational> = ys
        .iter()
        .map(|y| inv_cursor.value(y).finite().unwrap().clone())
        // Values g jumps over at the closed end map to `a` itself.
        .filter(|t| t < &a)
        .collect();
    let mut times: Vec<&Rational> = Vec::with_capacity(tg.len() + tbar.len());
    let (mut i, mut j) = (0, 0);
    while i < tg.len() || j < tbar.len() {
        visits::visit();
        let next = match (tg.get(i), tbar.get(j)) {
            (Some(x), Some(y)) if *x <= y => {
                i += 1;
                if *x == y {
                    j += 1;
                }
                *x
            }
            (Some(_), Some(y)) | (None, Some(y)) => {
                j += 1;
                y
            }
            (Some(x), None) => {
                i += 1;
                *x
            }
            (None, None) => unreachable!(),
        };
        if times.last() != Some(&next) {
            times.push(next);
        }
    }

    let mut gc = Cursor::new(sg);
    let mut fc = Cursor::new(sf);
    let mut out = Vec::with_capacity(2 * times.len() + 1);
    for (k, t) in times.iter().enumerate() {
        visits::visit();
        let next = times.get(k + 1).copied().unwrap_or(&a);
        let gt = gc.value(t);
        out.push(Point::new((*t).clone(), fc.value(gt.finite().unwrap())).into());
        let gr = gc.right_limit(t);
        let gl = gc.left_limit(next);
        let (gr, gl) = (gr.finite().unwrap(), gl.finite().unwrap());
        let (hr, hl) = if gr == gl {
            let v = fc.value(gr);
            (v.clone(), v)
        } else {
            (fc.right_limit(gr), fc.left_limit(gl))
        };
        out.push(Segment::new((*t).clone(), next.clone(), hr, hl).into());
    }
    if g_closed {
        let ga = gc.value(&a);
        out.push(Point::new(a.clone(), fc.value(ga.finite().unwrap())).into());
    }
    Ok(Sequence::from_trusted(out))
}

/// `(T_h, d_h, c_h)` from the general theorem:
/// `T_h = max(lpi(g)(T_f), T_g)`, `d_h = N(d_f) d_g D(c_g)`, `c_h = D(d_f) N(c_g) c_f`,
/// where `N` and `D` are numerator and denominator in lowest terms.
///
/// When f is weakly ultimately infinite, `T_h` is instead where h turns `+inf`
/// for good (see [`infinite_from`]).
pub fn general_parameters(f: &Curve, g: &Curve) -> Result<(Rational, Rational, Rational)> {
    let (tf, df, cf) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    let (tg, dg, cg) = (g.pseudo_period_start(), g.pseudo_period_length(), g.pseudo_period_height());
    let dh = BigRational::from_integer(numerator(df)) * dg * BigRational::from_integer(denominator(cg));
    let ch = BigRational::from_integer(denominator(df)) * BigRational::from_integer(numerator(cg)) * cf;
    let th = match f.classify().wui_start {
        Some(start) => match infinite_from(f, g, &start)? {
            Some(x) => max(x, tg),
            None => tg.clone(),
        },
        None => match periodic_from(g, tf)? {
            Some(x) => max(x, tg),
            // g never reaches T_f only when it is ultimately constant.
            None => tg.clone(),
        },
    };
    Ok((th, dh, ch))
}

/// First breakpoint of `g` strictly after `x`.
fn next_breakpoint(g: &Curve, x: &Rational) -> Rational {
    let (t, d) = (g.pseudo_period_start(), g.pseudo_period_length());
    let k = if x < t { Rational::zero() } else { ((x - t) / d).floor() };
    let local = x - &k * d;
    let next = g.sequence().point_times().find(|p| *p > &local).cloned().unwrap_or_else(|| t + d);
    next + k * d
}

/// Earliest `t` such that `g(s) >= y` for all `s >= t`, if `g` reaches `y`.
///
/// This is `lpi(g)(y)` unless `g` jumps over `y` right after it, in which case
/// the next breakpoint of `g` is used.
pub fn periodic_from(g: &Curve, y: &Rational) -> Result<Option<Rational>> {
    Ok(match lower_pseudo_inverse_at(g, y)? {
        Finite(x) => {
            if g.value_at(&x)? >= Finite(y.clone()) {
                Some(x)
            } else {
                Some(next_breakpoint(g, &x))
            }
        }
        _ => None,
    })
}

/// For f infinite past `T_f`: a time from which `f(g(t)) = +inf` for good.
pub fn infinite_from(f: &Curve, g: &Curve, tf: &Rational) -> Result<Option<Rational>> {
    if f.value_at(tf)?.is_infinite() {
        return periodic_from(g, tf);
    }
    // h is infinite exactly where g exceeds T_f.
    Ok(match upper_pseudo_inverse(g)?.value_at(tf)? {
        Finite(x) => {
            let at = g.value_at(&x)?.expect_finite("g")?.clone();
            if f.value_at(&at)?.is_infinite() {
                Some(x)
            } else {
                Some(next_breakpoint(g, &x))
            }
        }
        _ => None,
    })
}

struct Plan {
    path: ComposePath,
    t: Rational,
    d: Rational,
    c: Rational,
    domain_g: Interval,
    /// `D_f` right end, from the domain of g, or `g(T_h) + d_f` when g is UA.
    f_end: Option<Rational>,
}

fn max(a: Rational, b: &Rational) -> Rational {
    if &a >= b { a } else { b.clone() }
}

fn lpi_finite(g: &Curve, y: &Rational) -> Result<Rational> {
    match lower_pseudo_inverse_at(g, y)? {
        Finite(x) => Ok(x),
        v => Err(Error::Precondition(format!("lpi(g)({}) = {v}", format_rational(y)))),
    }
}

fn choose_path(cf: &Classification, cg: &Classification, mode: ComposeMode) -> Result<ComposePath> {
    let g_ua_rising = !cf.is_wui && cg.ua.as_ref().is_some_and(|u| u.slope.is_positive());
    let special = if cf.is_uc || cg.is_uc {
        Some(ComposePath::UltimatelyConstant)
    } else if cf.ua.is_some() && g_ua_rising {
        Some(ComposePath::BothUltimatelyAffine)
    } else if g_ua_rising {
        Some(ComposePath::InnerUltimatelyAffine)
    } else if cf.ua.is_some() {
        Some(ComposePath::OuterUltimatelyAffine)
    } else {
        None
    };
    match mode {
        ComposeMode::ForceGeneral => Ok(ComposePath::General),
        ComposeMode::Auto => Ok(special.unwrap_or(ComposePath::General)),
        ComposeMode::ForceSpecialized => special.ok_or_else(|| {
            Error::Precondition("no specialized composition applies: neither f nor g is UA or UC".into())
        }),
    }
}

/// `f ∘ g` using the most specialized applicable path.
pub fn compose(f: &Curve, g: &Curve) -> Result<Curve> {
    compose_with(f, g, ComposeMode::Auto).map(|(h, _)| h)
}

/// `f ∘ g` with an explicit path choice, reporting the cut domains used.
pub fn compose_with(f: &Curve, g: &Curve, mode: ComposeMode) -> Result<(Curve, ComposeReport)> {
    let cg = g.classify();
    if cg.is_wui {
        return Err(Error::Precondition("g is weakly ultimately infinite".into()));
    }
    g.check_non_decreasing()?;
    if !cg.is_non_negative {
        return Err(Error::Precondition("g takes negative values".into()));
    }
    let cf = f.classify();
    let path = choose_path(&cf, &cg, mode)?;
    if path == ComposePath::UltimatelyConstant {
        return compose_uc(f, g, &cf, &cg);
    }
    let (tf, df, cf_h) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    let (tg, dg, cg_h) = (g.pseudo_period_start(), g.pseudo_period_length(), g.pseudo_period_height());
    let zero = Rational::zero();
    let plan = match path {
        ComposePath::General => {
            let (t, d, c) = general_parameters(f, g)?;
            let domain_g = Interval { from: zero.clone(), to: &t + &d, closed: false };
            Plan { path, t, d, c, domain_g, f_end: None }
        }
        ComposePath::InnerUltimatelyAffine => {
            let rho = &cg.ua.as_ref().unwrap().slope;
            let t = max(lpi_finite(g, tf)?, tg);
            let d = df / rho;
            let domain_g = Interval { from: zero.clone(), to: &t + &d, closed: false };
            let f_end = g.value_at(&t)?.expect_finite("g(T_h)")? + df;
            Plan { path, t, d, c: cf_h.clone(), domain_g, f_end: Some(f_end) }
        }
        ComposePath::OuterUltimatelyAffine => {
            let ua = cf.ua.as_ref().unwrap();
            let start = periodic_from(g, &ua.affine_start)?;
            let t = max(start.ok_or_else(|| Error::Precondition("g never reaches the affine part of f".into()))?, tg);
            let domain_g = Interval { from: zero.clone(), to: &t + dg, closed: false };
            Plan { path, t, d: dg.clone(), c: cg_h * &ua.slope, domain_g, f_end: None }
        }
        ComposePath::BothUltimatelyAffine => {
            let (uf, ug) = (cf.ua.as_ref().unwrap(), cg.ua.as_ref().unwrap());
            let t = max(lpi_finite(g, &uf.affine_start)?, &ug.affine_start);
            let domain_g = Interval { from: zero.clone(), to: &t + dg, closed: false };
            Plan { path, t, d: dg.clone(), c: &ug.slope * &uf.slope * dg, domain_g, f_end: None }
        }
        ComposePath::UltimatelyConstant => unreachable!(),
    };
    let sg = g.cut(&plan.domain_g.from, &plan.domain_g.to, false)?;
    let g_end_constant = matches!(sg.elements().last(), Some(Element::Segment(s)) if s.is_constant());
    let g0 = first_value(&sg).expect_finite("g(0)")?.clone();
    let domain_f = match plan.f_end {
        Some(end) => Interval { from: g0, to: end, closed: false },
        None => {
            let end = sg.left_limit_at(&plan.domain_g.to)?.expect_finite("g at the end of D_g")?.clone();
            Interval { from: g0, to: end, closed: g_end_constant }
        }
    };
    let domain_f = if domain_f.from == domain_f.to { Interval { closed: true, ..domain_f } } else { domain_f };
    let sf = f.cut(&domain_f.from, &domain_f.to, domain_f.closed)?;
    let sh = compose_sequences(&sf, &sg)?;
    let h = Curve::new(sh.canonical(), plan.t, plan.d, plan.c)?;
    let report =
        ComposeReport { path: plan.path, cut_f_len: sf.len(), cut_g_len: sg.len(), domain_f, domain_g: plan.domain_g };
    Ok((h, report))
}

/// Ultimately constant operands: `h` is constant from the time g stays above
/// `T_f^a` (f UC), from `T_g^a` (g UC), or from the earlier of the two (both UC).
fn compose_uc(f: &Curve, g: &Curve, cf: &Classification, cg: &Classification) -> Result<(Curve, ComposeReport)> {
    let from_f = match (&cf.ua, cf.is_uc) {
        (Some(u), true) => periodic_from(g, &u.affine_start)?,
        _ => None,
    };
    let from_g = match (&cg.ua, cg.is_uc) {
        (Some(u), true) => Some(u.affine_start.clone()),
        _ => None,
    };
    let (t, tail) = match (from_f, from_g) {
        (Some(tf), Some(tg)) if tf < tg => (tf, ultimate_value(f)?),
        (Some(tf), None) => (tf, ultimate_value(f)?),
        (_, Some(tg)) => {
            let level = g.value_at(&tg)?.expect_finite("g level")?.clone();
            (tg, f.value_at(&level)?)
        }
        (None, None) => {
            return Err(Error::Precondition("f is UC but g never reaches its constant part".into()));
        }
    };
    let zero = Rational::zero();
    let g0 = g.value_at(&zero)?.expect_finite("g(0)")?.clone();
    if t.is_zero() {
        let h = Curve::from_prefix_and_tail(Vec::new(), tail);
        let domain_f = Interval { from: g0.clone(), to: g0, closed: true };
        let domain_g = Interval { from: zero.clone(), to: zero, closed: true };
        return Ok((h, ComposeReport { path: ComposePath::UltimatelyConstant, cut_f_len: 0, cut_g_len: 0, domain_f, domain_g }));
    }
    let sg = g.cut(&zero, &t, false)?;
    let g_end_constant = matches!(sg.elements().last(), Some(Element::Segment(s)) if s.is_constant());
    let g_end = sg.left_limit_at(&t)?.expect_finite("g(T_h-)")?.clone();
    let closed = g_end_constant || g0 == g_end;
    let sf = f.cut(&g0, &g_end, closed)?;
    let sh = compose_sequences(&sf, &sg)?;
    let h = Curve::from_prefix_and_tail(sh.into_elements(), tail);
    let report = ComposeReport {
        path: ComposePath::UltimatelyConstant,
        cut_f_len: sf.len(),
        cut_g_len: sg.len(),
        domain_f: Interval { from: g0, to: g_end, closed },
        domain_g: Interval { from: zero, to: t, closed: false },
    };
    Ok((h, report))
}

fn ultimate_value(f: &Curve) -> Result<ExtendedValue> {
    f.value_at(&(f.pseudo_period_start() + f.pseudo_period_length()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncops::{rate_latency, stair};
    use crate::numeric::{int, rat};

    #[test]
    fn doubling_after_staircase() {
        let f = rate_latency(int(2), int(0)).unwrap();
        let g = stair(int(1), int(1)).unwrap();
        let h = compose(&f, &g).unwrap();
        for k in 0..24 {
            let t = rat(k, 8);
            let want = g.value_at(&t).unwrap().mul_rational(&int(2));
            assert_eq!(h.value_at(&t).unwrap(), want);
        }
    }

    #[test]
    fn identity_is_neutral() {
        let id = rate_latency(int(1), int(0)).unwrap();
        let f = stair(rat(1, 2), rat(3, 4)).unwrap();
        let (h, report) = compose_with(&f, &id, ComposeMode::Auto).unwrap();
        assert_eq!(report.path, ComposePath::InnerUltimatelyAffine);
        assert!(h.equivalent(&f));
        assert_eq!(h.pseudo_period_length(), f.pseudo_period_length());
        assert_eq!(h.pseudo_period_height(), f.pseudo_period_height());
    }

    #[test]
    fn integer_parameter_rule() {
        let f = stair(int(1), int(2)).unwrap();
        let g = stair(int(3), int(5)).unwrap();
        let (_, dh, ch) = general_parameters(&f, &g).unwrap();
        assert_eq!(dh, int(2) * int(5));
        assert_eq!(ch, int(1) * int(3));
    }
}
