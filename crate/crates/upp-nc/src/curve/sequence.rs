use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{ExtendedValue, Finite, Rational};

/// `(t, f(t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub time: Rational,
    pub value: ExtendedValue,
}

/// Open segment on `]start, end[` described by its one-sided limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: Rational,
    pub end: Rational,
    pub right_limit_at_start: ExtendedValue,
    pub left_limit_at_end: ExtendedValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Point(Point),
    Segment(Segment),
}

impl Point {
    pub fn new(time: Rational, value: impl Into<ExtendedValue>) -> Self {
        Point { time, value: value.into() }
    }
}

impl Segment {
    pub fn new(
        start: Rational,
        end: Rational,
        right_limit_at_start: impl Into<ExtendedValue>,
        left_limit_at_end: impl Into<ExtendedValue>,
    ) -> Self {
        Segment {
            start,
            end,
            right_limit_at_start: right_limit_at_start.into(),
            left_limit_at_end: left_limit_at_end.into(),
        }
    }

    pub fn constant(start: Rational, end: Rational, value: impl Into<ExtendedValue>) -> Self {
        let v = value.into();
        Segment { start, end, right_limit_at_start: v.clone(), left_limit_at_end: v }
    }

    /// Slope, or `None` on an infinite plateau.
    pub fn slope(&self) -> Option<Rational> {
        match (&self.right_limit_at_start, &self.left_limit_at_end) {
            (Finite(a), Finite(b)) => Some((b - a) / (&self.end - &self.start)),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.right_limit_at_start == self.left_limit_at_end
    }

    /// Value at an interior abscissa.
    pub fn value_at(&self, t: &Rational) -> ExtendedValue {
        debug_assert!(&self.start <= t && t <= &self.end);
        match (&self.right_limit_at_start, &self.left_limit_at_end) {
            (Finite(a), Finite(b)) => Finite(a + (b - a) * (t - &self.start) / (&self.end - &self.start)),
            (v, _) => v.clone(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.start >= self.end {
            return Err(Error::Invariant(format!("segment {self} has start >= end")));
        }
        let ok = match (&self.right_limit_at_start, &self.left_limit_at_end) {
            (Finite(_), Finite(_)) => true,
            (a, b) => a == b,
        };
        if !ok {
            return Err(Error::Invariant(format!("segment {self} mixes finite and infinite values")));
        }
        Ok(())
    }
}

impl Element {
    /// Left end of the element's support.
    pub fn start_time(&self) -> &Rational {
        match self {
            Element::Point(p) => &p.time,
            Element::Segment(s) => &s.start,
        }
    }

    pub fn end_time(&self) -> &Rational {
        match self {
            Element::Point(p) => &p.time,
            Element::Segment(s) => &s.end,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Element::Point(_))
    }

    /// Same element moved right by `dt` and up by `dv`.
    pub fn shifted(&self, dt: &Rational, dv: &Rational) -> Element {
        match self {
            Element::Point(p) => Element::Point(Point { time: &p.time + dt, value: p.value.add_rational(dv) }),
            Element::Segment(s) => Element::Segment(Segment {
                start: &s.start + dt,
                end: &s.end + dt,
                right_limit_at_start: s.right_limit_at_start.add_rational(dv),
                left_limit_at_end: s.left_limit_at_end.add_rational(dv),
            }),
        }
    }
}

impl From<Point> for Element {
    fn from(p: Point) -> Self {
        Element::Point(p)
    }
}

impl From<Segment> for Element {
    fn from(s: Segment) -> Self {
        Element::Segment(s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "point({}, {})", crate::numeric::format_rational(&self.time), self.value)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "segment(]{}, {}[, {} -> {})",
            crate::numeric::format_rational(&self.start),
            crate::numeric::format_rational(&self.end),
            self.right_limit_at_start,
            self.left_limit_at_end
        )
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Point(p) => p.fmt(f),
            Element::Segment(s) => s.fmt(f),
        }
    }
}

/// Alternating points and segments describing a function on a bounded interval.
///
/// The first element is a point. The domain is right-closed when the last
/// element is a point and right-open when it is a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    elements: Vec<Element>,
}

impl Sequence {
    pub fn new(elements: Vec<Element>) -> Result<Self> {
        let s = Sequence { elements };
        s.validate()?;
        Ok(s)
    }

    /// Skips validation. For algorithm outputs that are checked in debug builds.
    pub(crate) fn from_trusted(elements: Vec<Element>) -> Self {
        let s = Sequence { elements };
        debug_assert!(s.validate().is_ok(), "{:?}", s.validate());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.elements.first().ok_or_else(|| Error::Invariant("empty sequence".into()))?;
        if !first.is_point() {
            return Err(Error::Invariant(format!("sequence starts with {first}, expected a point")));
        }
        for e in &self.elements {
            if let Element::Segment(s) = e {
                s.check()?;
            }
        }
        for w in self.elements.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            match (a, b) {
                (Element::Point(_), Element::Point(_)) | (Element::Segment(_), Element::Segment(_)) => {
                    return Err(Error::Invariant(format!("{a} and {b} do not alternate")));
                }
                _ => {}
            }
            if a.end_time() != b.start_time() {
                return Err(Error::Invariant(format!("gap between {a} and {b}")));
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn start(&self) -> &Rational {
        self.elements[0].start_time()
    }

    pub fn end(&self) -> &Rational {
        self.elements.last().expect("non-empty").end_time()
    }

    pub fn end_included(&self) -> bool {
        self.elements.last().expect("non-empty").is_point()
    }

    /// Breakpoint abscissas, in order.
    pub fn point_times(&self) -> impl Iterator<Item = &Rational> {
        self.elements.iter().filter_map(|e| match e {
            Element::Point(p) => Some(&p.time),
            _ => None,
        })
    }

    pub fn contains(&self, t: &Rational) -> bool {
        t >= self.start() && (t < self.end() || (t == self.end() && self.end_included()))
    }

    /// Index of the element whose support contains `t`.
    fn locate(&self, t: &Rational) -> Option<usize> {
        if !self.contains(t) {
            return None;
        }
        let idx = self
            .elements
            .partition_point(|e| e.start_time() < t || (e.start_time() == t && e.is_point()));
        Some(idx - 1)
    }

    fn domain_error(&self, what: &str, t: &Rational) -> Error {
        Error::Domain(format!(
            "{what} at {} outside the sequence domain [{}, {}{}",
            crate::numeric::format_rational(t),
            crate::numeric::format_rational(self.start()),
            crate::numeric::format_rational(self.end()),
            if self.end_included() { "]" } else { "[" }
        ))
    }

    pub fn value_at(&self, t: &Rational) -> Result<ExtendedValue> {
        match self.locate(t).map(|i| &self.elements[i]) {
            Some(Element::Point(p)) => Ok(p.value.clone()),
            Some(Element::Segment(s)) => Ok(s.value_at(t)),
            None => Err(self.domain_error("value", t)),
        }
    }

    /// `f(t+)`; requires `t` below the right end of the domain.
    pub fn right_limit_at(&self, t: &Rational) -> Result<ExtendedValue> {
        let i = self.locate(t).ok_or_else(|| self.domain_error("right limit", t))?;
        match &self.elements[i] {
            Element::Segment(s) => Ok(s.value_at(t)),
            Element::Point(_) => match self.elements.get(i + 1) {
                Some(Element::Segment(s)) => Ok(s.right_limit_at_start.clone()),
                _ => Err(self.domain_error("right limit", t)),
            },
        }
    }

    /// `f(t-)`; requires `t` above the left end of the domain.
    pub fn left_limit_at(&self, t: &Rational) -> Result<ExtendedValue> {
        if t == self.end() && !self.end_included() {
            if let Some(Element::Segment(s)) = self.elements.last() {
                return Ok(s.left_limit_at_end.clone());
            }
        }
        let i = self.locate(t).ok_or_else(|| self.domain_error("left limit", t))?;
        match &self.elements[i] {
            Element::Segment(s) => Ok(s.value_at(t)),
            Element::Point(_) if i > 0 => match &self.elements[i - 1] {
                Element::Segment(s) => Ok(s.left_limit_at_end.clone()),
                _ => unreachable!("alternation"),
            },
            Element::Point(_) => Err(self.domain_error("left limit", t)),
        }
    }

    /// Restriction to `[from, to[` or `[from, to]`.
    pub fn restrict(&self, from: &Rational, to: &Rational, closed: bool) -> Result<Sequence> {
        if from > to || (from == to && !closed) {
            return Err(Error::Domain("empty restriction interval".into()));
        }
        if !self.contains(from) || !(self.contains(to) || (!closed && to == self.end())) {
            return Err(Error::Domain(format!(
                "restriction [{}, {}{} not inside the sequence domain",
                crate::numeric::format_rational(from),
                crate::numeric::format_rational(to),
                if closed { "]" } else { "[" }
            )));
        }
        let mut out = Vec::new();
        let first = self.locate(from).expect("checked");
        push_window(&mut out, &self.elements[first..], &Rational::zero(), &Rational::zero(), from, to);
        if closed {
            out.push(Point::new(to.clone(), self.value_at(to)?).into());
        }
        Ok(Sequence::from_trusted(out))
    }

    /// Moves every element right by `dt` and up by `dv`.
    pub fn shifted(&self, dt: &Rational, dv: &Rational) -> Sequence {
        Sequence { elements: self.elements.iter().map(|e| e.shifted(dt, dv)).collect() }
    }

    /// Merges every `segment, point, segment` run that lies on one line,
    /// giving the unique minimal description of the same function.
    pub fn canonical(&self) -> Sequence {
        Sequence { elements: canonicalize(self.elements.clone()) }
    }

    /// Checks monotonicity, naming the first offending pair of elements.
    pub fn check_non_decreasing(&self) -> Result<()> {
        for e in &self.elements {
            if let Element::Segment(s) = e {
                if s.right_limit_at_start > s.left_limit_at_end {
                    return Err(Error::Precondition(format!("{s} is decreasing")));
                }
            }
        }
        for w in self.elements.windows(2) {
            let (a_end, b_start) = match (&w[0], &w[1]) {
                (Element::Point(p), Element::Segment(s)) => (&p.value, &s.right_limit_at_start),
                (Element::Segment(s), Element::Point(p)) => (&s.left_limit_at_end, &p.value),
                _ => continue,
            };
            if a_end > b_start {
                return Err(Error::Precondition(format!("decreasing step between {} and {}", w[0], w[1])));
            }
        }
        Ok(())
    }
}

/// Appends the part of `src` (shifted by `dt`, `dv`) that lies in `[lo, hi[`.
/// `src` must be a well-formed run of elements.
pub(crate) fn push_window(
    out: &mut Vec<Element>,
    src: &[Element],
    dt: &Rational,
    dv: &Rational,
    lo: &Rational,
    hi: &Rational,
) {
    if lo >= hi {
        return;
    }
    for e in src {
        match e {
            Element::Point(p) => {
                let t = &p.time + dt;
                if &t >= hi {
                    break;
                }
                if &t >= lo {
                    out.push(Element::Point(Point { time: t, value: p.value.add_rational(dv) }));
                }
            }
            Element::Segment(s) => {
                let (a, b) = (&s.start + dt, &s.end + dt);
                if &a >= hi {
                    break;
                }
                if &b <= lo {
                    continue;
                }
                let s = Segment {
                    start: a.clone(),
                    end: b.clone(),
                    right_limit_at_start: s.right_limit_at_start.add_rational(dv),
                    left_limit_at_end: s.left_limit_at_end.add_rational(dv),
                };
                let start = if &a < lo {
                    out.push(Element::Point(Point { time: lo.clone(), value: s.value_at(lo) }));
                    lo.clone()
                } else {
                    a
                };
                let end = if &b > hi { hi.clone() } else { b };
                out.push(Element::Segment(Segment {
                    right_limit_at_start: s.value_at(&start),
                    left_limit_at_end: s.value_at(&end),
                    start,
                    end,
                }));
            }
        }
    }
}

fn same_line(a: &Segment, p: &Point, b: &Segment) -> bool {
    if a.left_limit_at_end != p.value || b.right_limit_at_start != p.value {
        return false;
    }
    match (a.slope(), b.slope()) {
        (Some(x), Some(y)) => x == y,
        (None, None) => a.right_limit_at_start == b.left_limit_at_end,
        _ => false,
    }
}

pub(crate) fn canonicalize(elements: Vec<Element>) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::with_capacity(elements.len());
    for e in elements {
        if let Element::Segment(b) = &e {
            let n = out.len();
            if n >= 2 {
                if let (Element::Segment(a), Element::Point(p)) = (&out[n - 2], &out[n - 1]) {
                    if same_line(a, p, b) {
                        let merged = Segment {
                            start: a.start.clone(),
                            end: b.end.clone(),
                            right_limit_at_start: a.right_limit_at_start.clone(),
                            left_limit_at_end: b.left_limit_at_end.clone(),
                        };
                        out.truncate(n - 2);
                        out.push(Element::Segment(merged));
                        continue;
                    }
                }
            }
        }
        out.push(e);
    }
    out
}
