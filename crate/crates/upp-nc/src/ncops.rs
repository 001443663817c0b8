//! Network-calculus building blocks: standard curve shapes, the min-plus
//! convolution with a rate-latency curve, the horizontal deviation, and the
//! IWRR per-flow strict service curve.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::composition::{compose_with, ComposeMode, ComposeReport};
use crate::curve::{Curve, CurveJson, Element, Point, Segment, Sequence};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, ExtendedValue, Finite, PlusInfinity, Rational};
use crate::pseudoinverse::lower_pseudo_inverse;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

/// `β_{R,θ}(t) = R [t - θ]^+`, with `T = θ`, `d = 1`, `c = R`.
pub fn rate_latency(rate: Rational, latency: Rational) -> Result<Curve> {
    require(rate.is_positive(), || format!("rate {} must be positive", format_rational(&rate)))?;
    require(!latency.is_negative(), || format!("latency {} must be non-negative", format_rational(&latency)))?;
    let zero = Rational::zero();
    let mut els: Vec<Element> = vec![Point::new(zero.clone(), zero.clone()).into()];
    if latency.is_positive() {
        els.push(Segment::constant(zero.clone(), latency.clone(), zero.clone()).into());
        els.push(Point::new(latency.clone(), zero.clone()).into());
    }
    els.push(Segment::new(latency.clone(), &latency + one(), zero, rate.clone()).into());
    Ok(Curve::from_trusted(Sequence::from_trusted(els), latency, one(), rate))
}

/// `γ_{σ,ρ}(t) = σ + ρ t`, including `γ(0) = σ`.
pub fn leaky_bucket(burst: Rational, rate: Rational) -> Result<Curve> {
    require(!burst.is_negative(), || format!("burst {} must be non-negative", format_rational(&burst)))?;
    require(!rate.is_negative(), || format!("rate {} must be non-negative", format_rational(&rate)))?;
    let zero = Rational::zero();
    let els = vec![
        Point::new(zero.clone(), burst.clone()).into(),
        Segment::new(zero.clone(), one(), burst.clone(), &burst + &rate).into(),
    ];
    Ok(Curve::from_trusted(Sequence::from_trusted(els), zero, one(), rate))
}

pub fn constant(value: Rational) -> Curve {
    let zero = Rational::zero();
    let els = vec![Point::new(zero.clone(), value.clone()).into(), Segment::constant(zero.clone(), one(), value).into()];
    Curve::from_trusted(Sequence::from_trusted(els), zero.clone(), one(), zero)
}

/// Service curve of a pure delay: 0 on `[0, θ]`, `+inf` after.
pub fn delay_element(latency: Rational) -> Result<Curve> {
    require(!latency.is_negative(), || format!("latency {} must be non-negative", format_rational(&latency)))?;
    let zero = Rational::zero();
    let mut prefix: Vec<Element> = vec![Point::new(zero.clone(), zero.clone()).into()];
    if latency.is_positive() {
        prefix.push(Segment::constant(zero.clone(), latency.clone(), zero.clone()).into());
        prefix.push(Point::new(latency, zero).into());
    }
    Ok(Curve::from_prefix_and_tail(prefix, PlusInfinity))
}

/// `ν_{h,P}(t) = h ⌈t / P⌉`, with `T = 0`, `d = P`, `c = h`.
pub fn stair(height: Rational, period: Rational) -> Result<Curve> {
    shifted_stair(height, period, Rational::zero())
}

/// `ν_{h,P}([t - s]^+)`.
pub fn shifted_stair(height: Rational, period: Rational, shift: Rational) -> Result<Curve> {
    require(height.is_positive(), || format!("step height {} must be positive", format_rational(&height)))?;
    require(period.is_positive(), || format!("step period {} must be positive", format_rational(&period)))?;
    require(!shift.is_negative(), || format!("shift {} must be non-negative", format_rational(&shift)))?;
    let zero = Rational::zero();
    let mut els: Vec<Element> = vec![Point::new(zero.clone(), zero.clone()).into()];
    if shift.is_positive() {
        els.push(Segment::constant(zero.clone(), shift.clone(), zero.clone()).into());
        els.push(Point::new(shift.clone(), zero).into());
    }
    els.push(Segment::constant(shift.clone(), &shift + &period, height.clone()).into());
    Ok(Curve::from_trusted(Sequence::from_trusted(els), shift, period, height))
}

fn finite_window(u: &Curve) -> Result<Vec<Element>> {
    let end = u.pseudo_period_start() + u.pseudo_period_length();
    let s = u.cut(&Rational::zero(), &end, true)?;
    Ok(s.into_elements())
}

fn element_values(e: &Element) -> (&ExtendedValue, &ExtendedValue) {
    match e {
        Element::Point(p) => (&p.value, &p.value),
        Element::Segment(s) => (&s.right_limit_at_start, &s.left_limit_at_end),
    }
}

/// Infimum of `U(s) - R s` over a run of finite elements, limits included.
fn min_w(els: &[Element], rate: &Rational) -> Option<Rational> {
    let mut m: Option<Rational> = None;
    for e in els {
        let cands: Vec<Rational> = match e {
            Element::Point(p) => vec![p.value.finite()? - rate * &p.time],
            Element::Segment(s) => vec![
                s.right_limit_at_start.finite()? - rate * &s.start,
                s.left_limit_at_end.finite()? - rate * &s.end,
            ],
        };
        for c in cands {
            if m.as_ref().is_none_or(|x| &c < x) {
                m = Some(c);
            }
        }
    }
    m
}

/// `(U ⊗ β_{R,θ})(t) = inf_{0 <= s <= t} U(s) + R [t - s - θ]^+` for a finite,
/// non-decreasing UPP `U`.
///
/// One forward scan keeps the running infimum `M` of `U(s) - R s`; the result
/// is `R t + M(t)` shifted right by `θ`, and `U(0)` on `[0, θ]`.
pub fn convolve_with_rate_latency(u: &Curve, rate: &Rational, latency: &Rational) -> Result<Curve> {
    require(rate.is_positive(), || format!("rate {} must be positive", format_rational(rate)))?;
    require(!latency.is_negative(), || format!("latency {} must be non-negative", format_rational(latency)))?;
    let cls = u.classify();
    require(!cls.is_wui, || "U is weakly ultimately infinite".into())?;
    u.check_non_decreasing()?;
    let window = finite_window(u)?;
    for e in &window {
        let (a, b) = element_values(e);
        require(a.is_finite() && b.is_finite(), || format!("U takes an infinite value at {e}"))?;
    }
    let (tu, du, cu) = (u.pseudo_period_start(), u.pseudo_period_length(), u.pseudo_period_height());
    let slack = rate * du - cu;
    // Start of the pseudo-periodic regime of the result.
    let (tv, cv) = if !slack.is_positive() {
        (tu + du, rate * du)
    } else {
        let zero = Rational::zero();
        let period = u.cut(tu, &(tu + du), false)?;
        let m1 = min_w(period.elements(), rate).expect("period non-empty");
        let a = if tu.is_positive() { min_w(u.cut(&zero, tu, false)?.elements(), rate) } else { None };
        let b = match &a {
            Some(a) if a < &m1 => a.clone(),
            _ => m1.clone(),
        };
        let mut k = ((&m1 - &b) / &slack).ceil().max(one());
        if let Some(a) = a {
            k = k.max(((&m1 - &a) / &slack).ceil() + one());
        }
        (tu + k * du, cu.clone())
    };
    let end = &tv + du;
    let src = u.cut(&Rational::zero(), &end, false)?;
    let mut out: Vec<Element> = Vec::with_capacity(src.len() + 8);
    let mut m: Option<Rational> = None;
    for e in src.elements() {
        match e {
            Element::Point(p) => {
                let w = p.value.finite().unwrap() - rate * &p.time;
                let mm = match m.take() {
                    Some(x) if x < w => x,
                    _ => w,
                };
                out.push(Point::new(p.time.clone(), rate * &p.time + &mm).into());
                m = Some(mm);
            }
            Element::Segment(s) => {
                let (ua, ub) = (s.right_limit_at_start.finite().unwrap(), s.left_limit_at_end.finite().unwrap());
                let wa = ua - rate * &s.start;
                let wb = ub - rate * &s.end;
                let mm = m.clone().expect("segment after a point");
                let line = |a: &Rational, b: &Rational, m: &Rational| -> Element {
                    Segment::new(a.clone(), b.clone(), rate * a + m, rate * b + m).into()
                };
                if wb >= wa {
                    let m2 = if wa < mm { wa } else { mm };
                    out.push(line(&s.start, &s.end, &m2));
                    m = Some(m2);
                } else if wa <= mm {
                    out.push(e.clone());
                    m = Some(wb);
                } else if wb >= mm {
                    out.push(line(&s.start, &s.end, &mm));
                } else {
                    let cross = &s.start + (&mm - &wa) / (&wb - &wa) * (&s.end - &s.start);
                    let uc = s.value_at(&cross);
                    out.push(line(&s.start, &cross, &mm));
                    out.push(Point::new(cross.clone(), uc.clone()).into());
                    out.push(Segment::new(cross, s.end.clone(), uc, ub.clone()).into());
                    m = Some(wb);
                }
            }
        }
    }
    let v = Sequence::from_trusted(out);
    let seq = if latency.is_positive() {
        let u0 = u.value_at(&Rational::zero())?;
        let mut els: Vec<Element> = vec![
            Point::new(Rational::zero(), u0.clone()).into(),
            Segment::constant(Rational::zero(), latency.clone(), u0).into(),
        ];
        els.extend(v.shifted(latency, &Rational::zero()).into_elements());
        Sequence::from_trusted(els)
    } else {
        v
    };
    Ok(Curve::new(seq.canonical(), tv + latency, du.clone(), cv)?.minimize())
}

/// Largest horizontal distance between `α` and `β`:
/// `sup_t inf{δ >= 0 | α(t) <= β(t + δ)}`, which is `sup_t [lpi(β)(α(t)) - t]^+`.
///
/// `+inf` when `α` grows faster than `β` in the long run.
pub fn horizontal_deviation(alpha: &Curve, beta: &Curve) -> Result<ExtendedValue> {
    alpha.check_non_decreasing()?;
    beta.check_non_decreasing()?;
    let ca = alpha.classify();
    let cb = beta.classify();
    if ca.is_wui || alpha.growth_rate() > beta.growth_rate() {
        return Ok(PlusInfinity);
    }
    require(ca.is_non_negative, || "α takes negative values".into())?;
    if cb.is_uc {
        // β stops at a finite level; α must stay below it.
        let top = |c: &Curve| c.value_at(&(c.pseudo_period_start() + c.pseudo_period_length()));
        if top(alpha)? > top(beta)? {
            return Ok(PlusInfinity);
        }
    }
    let inv = lower_pseudo_inverse(beta)?;
    let (h, _) = compose_with(&inv, alpha, ComposeMode::Auto)?;
    // h(t) - t grows by c_h - d_h <= 0 per period, so one period past T_h suffices.
    let end = h.pseudo_period_start() + h.pseudo_period_length();
    let window = h.cut(&Rational::zero(), &end, true)?;
    let mut best = Rational::zero();
    for e in window.elements() {
        let pairs: Vec<(&Rational, &ExtendedValue)> = match e {
            Element::Point(p) => vec![(&p.time, &p.value)],
            Element::Segment(s) => vec![(&s.start, &s.right_limit_at_start), (&s.end, &s.left_limit_at_end)],
        };
        for (t, v) in pairs {
            match v {
                Finite(x) => {
                    let gap = x - t;
                    if gap > best {
                        best = gap;
                    }
                }
                PlusInfinity => return Ok(PlusInfinity),
                _ => {}
            }
        }
    }
    Ok(Finite(best))
}

/// Parameters of an IWRR server as seen by one flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwrrConfig {
    pub weights: Vec<u64>,
    pub min_packet: Vec<Rational>,
    pub max_packet: Vec<Rational>,
    /// 1-based index of the flow of interest.
    pub flow_index: usize,
    /// Aggregate strict service curve; assumed super-additive.
    pub aggregate: Curve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IwrrConfigJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub weights: Vec<u64>,
    pub min_packet: Vec<String>,
    pub max_packet: Vec<String>,
    pub flow_index: usize,
    pub aggregate: CurveJson,
}

impl IwrrConfig {
    pub fn new(
        weights: Vec<u64>,
        min_packet: Vec<Rational>,
        max_packet: Vec<Rational>,
        flow_index: usize,
        aggregate: Curve,
    ) -> Result<Self> {
        let n = weights.len();
        require(n >= 1, || "at least one flow is needed".into())?;
        require(min_packet.len() == n && max_packet.len() == n, || {
            format!("{n} weights but {} min and {} max packet sizes", min_packet.len(), max_packet.len())
        })?;
        require((1..=n).contains(&flow_index), || format!("flow index {flow_index} not in 1..={n}"))?;
        for j in 0..n {
            require(weights[j] > 0, || format!("weight of flow {} must be positive", j + 1))?;
            require(min_packet[j].is_positive() && min_packet[j] <= max_packet[j], || {
                format!("flow {} needs 0 < l_min <= l_max", j + 1)
            })?;
        }
        aggregate.check_non_decreasing()?;
        require(aggregate.value_at(&Rational::zero())? == ExtendedValue::zero(), || "β(0) must be 0".into())?;
        Ok(IwrrConfig { weights, min_packet, max_packet, flow_index, aggregate })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: IwrrConfigJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>();
        IwrrConfig::new(
            raw.weights,
            parse(&raw.min_packet)?,
            parse(&raw.max_packet)?,
            raw.flow_index,
            raw.aggregate.to_curve()?,
        )
    }

    pub fn to_json(&self, description: Option<String>) -> String {
        let fmt = |v: &[Rational]| v.iter().map(format_rational).collect();
        let raw = IwrrConfigJson {
            description,
            weights: self.weights.clone(),
            min_packet: fmt(&self.min_packet),
            max_packet: fmt(&self.max_packet),
            flow_index: self.flow_index,
            aggregate: CurveJson::from_curve(&self.aggregate),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    fn i(&self) -> usize {
        self.flow_index - 1
    }

    /// `L_tot = w_i l_i^min + Σ_{j≠i} w_j l_j^max`.
    pub fn l_tot(&self) -> Rational {
        let i = self.i();
        let mut total = Rational::from_integer(self.weights[i].into()) * &self.min_packet[i];
        for j in (0..self.weights.len()).filter(|&j| j != i) {
            total += Rational::from_integer(self.weights[j].into()) * &self.max_packet[j];
        }
        total
    }
}

/// `φ_ij(p) = ⌊p / w_i⌋ w_j + [w_j - w_i]^+ + min{(p mod w_i) + 1, w_j}`.
pub fn iwrr_phi(p: u64, w_i: u64, w_j: u64) -> u64 {
    (p / w_i) * w_j + w_j.saturating_sub(w_i) + ((p % w_i) + 1).min(w_j)
}

/// `ψ_i(x) = x + Σ_{j≠i} φ_ij(⌊x / l_i^min⌋) l_j^max`.
pub fn iwrr_psi(x: &Rational, cfg: &IwrrConfig) -> Rational {
    let i = cfg.i();
    let p: BigInt = (x / &cfg.min_packet[i]).floor().to_integer();
    let p = p.to_u64().expect("packet count fits in u64");
    let mut out = x.clone();
    for j in (0..cfg.weights.len()).filter(|&j| j != i) {
        out += Rational::from_integer(iwrr_phi(p, cfg.weights[i], cfg.weights[j]).into()) * &cfg.max_packet[j];
    }
    out
}

/// `U_i(t) = Σ_{k=0}^{w_i-1} ν_{l_i^min, L_tot}([t - ψ_i(k l_i^min)]^+)`.
pub fn iwrr_u(cfg: &IwrrConfig) -> Result<Curve> {
    let i = cfg.i();
    let (l, lt) = (&cfg.min_packet[i], cfg.l_tot());
    let mut sum: Option<Curve> = None;
    for k in 0..cfg.weights[i] {
        let shift = iwrr_psi(&(Rational::from_integer(k.into()) * l), cfg);
        let term = shifted_stair(l.clone(), lt.clone(), shift)?;
        sum = Some(match sum {
            None => term,
            Some(s) => s.add(&term)?,
        });
    }
    Ok(sum.expect("w_i >= 1"))
}

/// `γ_i = β_{1,0} ⊗ U_i`.
pub fn iwrr_gamma(cfg: &IwrrConfig) -> Result<Curve> {
    convolve_with_rate_latency(&iwrr_u(cfg)?, &one(), &Rational::zero())
}

/// `β^i = γ_i ∘ β`, a strict service curve for flow `i`.
pub fn iwrr_service_curve(cfg: &IwrrConfig) -> Result<Curve> {
    iwrr_service_curve_with(cfg, ComposeMode::Auto).map(|(c, _)| c)
}

pub fn iwrr_service_curve_with(cfg: &IwrrConfig, mode: ComposeMode) -> Result<(Curve, ComposeReport)> {
    compose_with(&iwrr_gamma(cfg)?, &cfg.aggregate, mode)
}
