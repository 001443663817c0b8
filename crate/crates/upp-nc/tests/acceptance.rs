//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Built without the libtest harness so the lines are always printed; the
//! process exits non-zero when any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{probe_points, rng, two_periods};
use num_traits::{Signed, Zero};
use upp_nc::cli::run_bench;
use upp_nc::composition::{compose_sequences, compose_with, general_parameters, ComposeMode, ComposePath};
use upp_nc::curve::{Element, Point, Segment, Sequence};
use upp_nc::ncops::{constant, convolve_with_rate_latency, delay_element, leaky_bucket, rate_latency, stair, IwrrConfig};
use upp_nc::numeric::{int, rat, ExtendedValue, Finite, PlusInfinity, Rational};
use upp_nc::oracle::{
    oracle_compose, oracle_conv_rl, oracle_lpi_unbounded, oracle_upi_unbounded, random_curve, random_kind, random_sequence, Continuity,
    CurveKind, GeneratorConfig,
};
use upp_nc::pseudoinverse::{lower_pseudo_inverse, lower_pseudo_inverse_sequence, upper_pseudo_inverse, upper_pseudo_inverse_sequence};
use upp_nc::{visits, Curve};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_inner(r: &mut impl rand::Rng, cfg: &GeneratorConfig) -> Curve {
    loop {
        let kind = random_kind(r);
        if kind != CurveKind::WeaklyUltimatelyInfinite {
            return random_curve(r, kind, cfg);
        }
    }
}

/// `[T, T + k d]` sampled with 16 points per period, plus every breakpoint and midpoint.
fn dense_points(h: &Curve, periods: i64) -> Vec<Rational> {
    let (t, d) = (h.pseudo_period_start(), h.pseudo_period_length());
    let end = t + d * int(periods);
    let mut pts = probe_points(h, &end);
    let step = d / int(16);
    let mut x = Rational::zero();
    while x <= end {
        pts.push(x.clone());
        x += &step;
    }
    pts.sort();
    pts.dedup();
    pts
}

fn upp_property(f: &Curve) -> Result<(), String> {
    let (t, d, c) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
    for j in 0..16 {
        let y = t + d * rat(j, 16);
        let base = f.value_at(&y).unwrap();
        for k in 1..=5 {
            let k = int(k);
            let lhs = f.value_at(&(&y + d * &k)).unwrap();
            ensure(lhs == base.add_rational(&(c * &k)), || format!("UPP property fails at y = {y}, k = {k}"))?;
        }
    }
    Ok(())
}

fn c1_pseudo_inverse_oracle() -> Outcome {
    let mut r = rng(101);
    let cfg = GeneratorConfig::default();
    let mut probes = 0usize;
    for n in 0..200 {
        let kind = random_kind(&mut r);
        let f = random_curve(&mut r, kind, &cfg);
        let lo = lower_pseudo_inverse(&f).map_err(|e| format!("#{n} lpi: {e}"))?;
        let up = upper_pseudo_inverse(&f).map_err(|e| format!("#{n} upi: {e}"))?;
        for y in probe_points(&lo, &two_periods(&lo)) {
            ensure(lo.value_at(&y).unwrap() == oracle_lpi_unbounded(&f, &y), || format!("#{n} lpi differs at y = {y}"))?;
            probes += 1;
        }
        for y in probe_points(&up, &two_periods(&up)) {
            ensure(up.value_at(&y).unwrap() == oracle_upi_unbounded(&f, &y), || format!("#{n} upi differs at y = {y}"))?;
            probes += 1;
        }
    }
    Ok(format!("200 curves, {probes} exact probes"))
}

fn c2_parameter_theorems() -> Outcome {
    let mut r = rng(102);
    let cfg = GeneratorConfig::default();
    let mut generic = 0;
    for n in 0..200 {
        let kind = random_kind(&mut r);
        let f = random_curve(&mut r, kind, &cfg);
        let lo = lower_pseudo_inverse(&f).unwrap();
        let up = upper_pseudo_inverse(&f).unwrap();
        upp_property(&lo).map_err(|e| format!("#{n} lpi: {e}"))?;
        upp_property(&up).map_err(|e| format!("#{n} upi: {e}"))?;
        let cls = f.classify();
        if cls.is_uc || cls.is_wui {
            continue;
        }
        generic += 1;
        let (tf, df, cf) = (f.pseudo_period_start(), f.pseudo_period_length(), f.pseudo_period_height());
        let expect_lo = (f.value_at(&(tf + df)).unwrap(), cf.clone(), df.clone());
        let expect_up = (f.value_at(tf).unwrap(), cf.clone(), df.clone());
        let params = |g: &Curve| (Finite(g.pseudo_period_start().clone()), g.pseudo_period_length().clone(), g.pseudo_period_height().clone());
        ensure(params(&lo) == expect_lo, || format!("#{n} lpi parameters {:?}", params(&lo)))?;
        ensure(params(&up) == expect_up, || format!("#{n} upi parameters {:?}", params(&up)))?;
    }
    Ok(format!("400 results pseudo-periodic, {generic} curves with (T, d, c) as predicted"))
}

fn c3_continuity_and_order() -> Outcome {
    let mut r = rng(103);
    let any = GeneratorConfig::default();
    for n in 0..200 {
        let kind = random_kind(&mut r);
        let f = random_curve(&mut r, kind, &any);
        let lo = lower_pseudo_inverse(&f).unwrap();
        let up = upper_pseudo_inverse(&f).unwrap();
        ensure(lo.classify().is_left_continuous, || format!("#{n} lpi not left-continuous"))?;
        ensure(up.classify().is_right_continuous, || format!("#{n} upi not right-continuous"))?;
        let horizon = two_periods(&lo) + two_periods(&up);
        for y in dense_points(&lo, 2).into_iter().chain(probe_points(&up, &horizon)) {
            ensure(lo.value_at(&y).unwrap() <= up.value_at(&y).unwrap(), || format!("#{n} lpi > upi at y = {y}"))?;
        }
    }
    let left = GeneratorConfig { continuity: Continuity::Left, start_at_zero: true, ..GeneratorConfig::default() };
    let mut inflated = 0;
    for n in 0..100 {
        let kind = random_kind(&mut r);
        let f = random_curve(&mut r, kind, &left);
        let back = lower_pseudo_inverse(&lower_pseudo_inverse(&f).unwrap()).unwrap();
        ensure(back.equivalent(&f), || format!("#{n} lpi(lpi(f)) differs from f\nf = {}", f.to_json()))?;
        if back.pseudo_period_start() > f.pseudo_period_start() {
            inflated += 1;
        }
    }
    ensure(inflated > 0, || "no case with an inflated period start".into())?;
    Ok(format!("200 curves ordered and one-sided; 100 round trips, {inflated} with inflated T"))
}

/// Ten ultimately constant and ten wUI curves, half built by hand.
fn corner_fixtures() -> Vec<Curve> {
    let mut out = vec![
        constant(int(0)),
        constant(int(2)),
        stair(int(1), int(1)).unwrap().cut(&int(0), &int(3), true).map(|s| Curve::from_prefix_and_tail(s.into_elements(), Finite(int(5)))).unwrap(),
        Curve::from_prefix_and_tail(rate_latency(int(2), int(1)).unwrap().cut(&int(0), &int(3), false).unwrap().into_elements(), Finite(int(4))),
        Curve::from_prefix_and_tail(leaky_bucket(int(1), int(1)).unwrap().cut(&int(0), &rat(5, 2), true).unwrap().into_elements(), Finite(int(4))),
        delay_element(int(3)).unwrap(),
        delay_element(rat(1, 2)).unwrap(),
        Curve::from_prefix_and_tail(rate_latency(int(1), int(0)).unwrap().cut(&int(0), &int(2), true).unwrap().into_elements(), PlusInfinity),
        Curve::from_prefix_and_tail(stair(int(2), int(1)).unwrap().cut(&int(0), &int(4), false).unwrap().into_elements(), PlusInfinity),
        Curve::from_prefix_and_tail(leaky_bucket(int(3), rat(1, 2)).unwrap().cut(&int(0), &int(6), true).unwrap().into_elements(), PlusInfinity),
    ];
    let mut r = rng(104);
    let cfg = GeneratorConfig::default();
    for k in 0..10 {
        let kind = if k % 2 == 0 { CurveKind::UltimatelyConstant } else { CurveKind::WeaklyUltimatelyInfinite };
        out.push(random_curve(&mut r, kind, &cfg));
    }
    out
}

fn c4_corner_cases() -> Outcome {
    let fixtures = corner_fixtures();
    let (mut uc, mut wui) = (0, 0);
    for (n, f) in fixtures.iter().enumerate() {
        let cls = f.classify();
        let lo = lower_pseudo_inverse(f).unwrap();
        let up = upper_pseudo_inverse(f).unwrap();
        if let Some(tf) = &cls.wui_start {
            wui += 1;
            for inv in [&lo, &up] {
                ensure(inv.classify().is_uc, || format!("#{n} inverse of a wUI curve is not UC"))?;
                let far = inv.pseudo_period_start() + int(1000);
                ensure(inv.value_at(&far).unwrap() == Finite(tf.clone()), || format!("#{n} final level is not T_f = {tf}"))?;
            }
        } else {
            ensure(cls.is_uc, || format!("#{n} fixture is neither UC nor wUI"))?;
            uc += 1;
            let ua = cls.ua.clone().unwrap();
            let level = f.value_at(&(&ua.affine_start + int(1))).unwrap();
            let level = level.finite().unwrap();
            ensure(lo.value_at(level).unwrap().is_finite(), || format!("#{n} lpi infinite at the final level"))?;
            for eps in [rat(1, 1000), int(1), int(1000)] {
                ensure(lo.value_at(&(level + &eps)).unwrap() == PlusInfinity, || format!("#{n} lpi finite above the final level"))?;
            }
        }
        for (inv, oracle) in [(&lo, oracle_lpi_unbounded as fn(&Curve, &Rational) -> ExtendedValue), (&up, oracle_upi_unbounded)] {
            for y in probe_points(inv, &two_periods(inv)) {
                ensure(inv.value_at(&y).unwrap() == oracle(f, &y), || format!("#{n} differs from the oracle at y = {y}"))?;
            }
        }
    }
    ensure(uc == 10 && wui == 10, || format!("{uc} UC and {wui} wUI fixtures"))?;
    Ok("10 UC and 10 wUI fixtures exact".into())
}

fn worked_example() -> Result<(), String> {
    let p = |t: Rational, v: Rational| -> Element { Point::new(t, v).into() };
    let s = |a: Rational, b: Rational, ra: Rational, lb: Rational| -> Element { Segment::new(a, b, ra, lb).into() };
    let g = Sequence::new(vec![
        p(int(0), int(0)),
        s(int(0), int(1), int(0), int(2)),
        p(int(1), int(2)),
        s(int(1), int(4), int(2), int(3)),
        p(int(4), int(3)),
        s(int(4), int(6), int(3), int(4)),
    ])
    .unwrap();
    let f = Sequence::new(vec![p(int(0), int(0)), s(int(0), int(1), int(0), int(1)), p(int(1), int(1)), s(int(1), int(4), int(1), int(7)), p(int(4), int(7))])
        .unwrap();
    let h = compose_sequences(&f, &g).map_err(|e| format!("worked example: {e}"))?;
    let times: Vec<Rational> = h.canonical().point_times().filter(|t| t.is_positive() && *t < &int(4)).cloned().collect();
    ensure(times == vec![rat(1, 2), int(1)], || format!("worked example breakpoints {times:?}"))?;
    for k in 0..48 {
        let t = rat(k, 8);
        let want = f.value_at(g.value_at(&t).unwrap().finite().unwrap()).unwrap();
        ensure(h.value_at(&t).unwrap() == want, || format!("worked example differs at t = {t}"))?;
    }
    Ok(())
}

fn c5_composition_oracle() -> Outcome {
    let mut r = rng(105);
    let cfg = GeneratorConfig { max_elements: 16, ..GeneratorConfig::default() };
    let mut probes = 0usize;
    for n in 0..200 {
        let kind = random_kind(&mut r);
        let f = random_curve(&mut r, kind, &cfg);
        let g = random_inner(&mut r, &cfg);
        let (h, report) = compose_with(&f, &g, ComposeMode::Auto).map_err(|e| format!("#{n}: {e}"))?;
        let end = h.pseudo_period_start() + h.pseudo_period_length() * int(3);
        let mut pts = dense_points(&h, 3);
        pts.extend(probe_points(&g, &end));
        for t in pts.iter().filter(|t| *t <= &end) {
            ensure(h.value_at(t).unwrap() == oracle_compose(&f, &g, t), || format!("#{n} ({}) differs at t = {t}", report.path))?;
            probes += 1;
        }
    }
    worked_example()?;
    Ok(format!("200 pairs, {probes} exact probes; worked example breakpoints {{1/2, 1}}"))
}

fn c6_specialization() -> Outcome {
    let mut r = rng(106);
    let cfg = GeneratorConfig { max_elements: 16, ..GeneratorConfig::default() };
    let special = [CurveKind::UltimatelyAffine, CurveKind::UltimatelyConstant];
    let mut checked = 0;
    let mut paths = std::collections::BTreeSet::new();
    for n in 0..300 {
        let (fk, gk) = match n % 3 {
            0 => (random_kind(&mut r), special[n % 2]),
            1 => (special[(n / 3) % 2], CurveKind::Upp),
            _ => (special[n % 2], special[(n / 3) % 2]),
        };
        let f = random_curve(&mut r, fk, &cfg);
        let g = random_curve(&mut r, gk, &cfg);
        let (hs, rs) = compose_with(&f, &g, ComposeMode::Auto).map_err(|e| format!("#{n}: {e}"))?;
        if rs.path == ComposePath::General {
            continue;
        }
        let (hg, rg) = compose_with(&f, &g, ComposeMode::ForceGeneral).map_err(|e| format!("#{n} general: {e}"))?;
        ensure(hs.equivalent(&hg), || format!("#{n} {} and general paths differ", rs.path))?;
        ensure(rs.cut_f_len <= rg.cut_f_len && rs.cut_g_len <= rg.cut_g_len, || {
            format!("#{n} {} cuts ({}, {}) exceed general ({}, {})", rs.path, rs.cut_f_len, rs.cut_g_len, rg.cut_f_len, rg.cut_g_len)
        })?;
        paths.insert(rs.path.to_string());
        checked += 1;
    }
    let integers = GeneratorConfig { max_denominator: 1, max_elements: 12, ..GeneratorConfig::default() };
    for n in 0..100 {
        let f = random_curve(&mut r, CurveKind::Upp, &integers);
        let g = random_curve(&mut r, CurveKind::Upp, &integers);
        let (df, dg, cf, cg) = (f.pseudo_period_length(), g.pseudo_period_length(), f.pseudo_period_height(), g.pseudo_period_height());
        ensure(df.is_integer() && cg.is_integer(), || format!("#{n} generator produced fractional parameters"))?;
        let (_, dh, ch) = general_parameters(&f, &g).map_err(|e| format!("#{n}: {e}"))?;
        ensure(dh == df * dg && ch == cf * cg, || format!("#{n} d_h = {dh}, c_h = {ch}"))?;
    }
    ensure(paths.len() >= 4, || format!("only paths {paths:?} exercised"))?;
    Ok(format!("{checked} pairs over {} paths agree with the general path; integer rule on 100 pairs", paths.len()))
}

fn c7_iwrr_bench() -> Outcome {
    let cfg = IwrrConfig::from_json(include_str!("../fixtures/iwrr-default.json")).map_err(|e| e.to_string())?;
    let r = run_bench(&cfg, 9).map_err(|e| e.to_string())?;
    let ratio = r.median_ratio();
    ensure(r.equivalent, || "specialized and general results differ".into())?;
    ensure(ratio >= 10.0, || format!("median ratio {ratio:.1} below 10"))?;
    Ok(format!(
        "medians {:.3} ms general vs {:.3} ms specialized, ratio {ratio:.1}",
        r.general.p50.as_secs_f64() * 1e3,
        r.specialized.p50.as_secs_f64() * 1e3
    ))
}

fn c8_convolution() -> Outcome {
    let mut r = rng(108);
    let cfg = GeneratorConfig { max_elements: 16, start_at_zero: true, ..GeneratorConfig::default() };
    for n in 0..100i64 {
        let u = if n % 4 == 0 {
            stair(rat(1 + n % 3, 1 + n % 2), rat(1 + n % 5, 2)).unwrap()
        } else {
            let kind = if n % 4 == 1 { CurveKind::UltimatelyConstant } else { CurveKind::Upp };
            random_curve(&mut r, kind, &cfg)
        };
        let (rate, theta) = (rat(1 + n % 7, 1 + n % 4), rat(n % 5, 3));
        let h = convolve_with_rate_latency(&u, &rate, &theta).map_err(|e| format!("#{n}: {e}"))?;
        let end = two_periods(&h) + two_periods(&u);
        let mut pts = probe_points(&h, &end);
        pts.extend(probe_points(&u, &end));
        for t in pts {
            ensure(h.value_at(&t).unwrap() == oracle_conv_rl(&u, &rate, &theta, &t), || format!("#{n} differs at t = {t}"))?;
        }
    }
    let h = convolve_with_rate_latency(&stair(int(1), int(1)).unwrap(), &int(1), &int(0)).unwrap();
    for k in 0..=160 {
        let t = rat(k, 16);
        ensure(h.value_at(&t).unwrap() == Finite(t.clone()), || format!("identity fails at t = {t}"))?;
    }
    Ok("100 inputs exact; staircase smoothed to the identity on [0, 10]".into())
}

/// Least-squares fit `y = a + b x`; returns `(b, R²)`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = sxy / sxx;
    (b, sxy * sxy / (sxx * syy))
}

/// `s` stretched affinely in time onto `[from, to]`, closed by a point at `to`.
fn stretch_onto(s: &Sequence, from: &Rational, to: &Rational) -> Sequence {
    let scale = (to - from) / s.end();
    let map = |t: &Rational| from + t * &scale;
    let mut els: Vec<Element> = s
        .elements()
        .iter()
        .map(|e| match e {
            Element::Point(p) => Point::new(map(&p.time), p.value.clone()).into(),
            Element::Segment(g) => Segment::new(map(&g.start), map(&g.end), g.right_limit_at_start.clone(), g.left_limit_at_end.clone()).into(),
        })
        .collect();
    let last = s.left_limit_at(s.end()).unwrap();
    els.push(Point::new(to.clone(), last).into());
    Sequence::new(els).unwrap()
}

fn c9_linear_visits() -> Outcome {
    let sizes = [100usize, 200, 500, 1000, 2000, 5000, 10000];
    let mut r = rng(109);
    let mut rows: Vec<(&str, Vec<f64>, Vec<f64>)> = vec![("lpi", vec![], vec![]), ("upi", vec![], vec![]), ("compose", vec![], vec![])];
    for &size in &sizes {
        let s = random_sequence(&mut r, size / 2);
        visits::reset();
        lower_pseudo_inverse_sequence(&s).map_err(|e| e.to_string())?;
        rows[0].1.push(s.len() as f64);
        rows[0].2.push(visits::count() as f64);
        visits::reset();
        upper_pseudo_inverse_sequence(&s).map_err(|e| e.to_string())?;
        rows[1].1.push(s.len() as f64);
        rows[1].2.push(visits::count() as f64);

        let g = random_sequence(&mut r, size / 4);
        let (g0, g_end) = (g.value_at(g.start()).unwrap(), g.left_limit_at(g.end()).unwrap());
        let f = stretch_onto(&random_sequence(&mut r, size / 4), g0.finite().unwrap(), g_end.finite().unwrap());
        visits::reset();
        compose_sequences(&f, &g).map_err(|e| e.to_string())?;
        rows[2].1.push((f.len() + g.len()) as f64);
        rows[2].2.push(visits::count() as f64);
    }
    let mut summary = vec![];
    for (name, xs, ys) in &rows {
        let (_, r2) = fit(xs, ys);
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let (slope, _) = fit(&lx, &ly);
        ensure(r2 > 0.99 && (0.9..=1.1).contains(&slope), || format!("{name}: R² = {r2:.4}, log-log slope = {slope:.3}"))?;
        summary.push(format!("{name} R² {r2:.4} slope {slope:.3}"));
    }
    Ok(format!("sizes 10²..10⁴: {}", summary.join(", ")))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn c10_cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_upp");
    let mut fixtures = 0;
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let again = if path.ends_with("iwrr-default.json") {
            let raw: upp_nc::ncops::IwrrConfigJson = serde_json::from_str(&text).unwrap();
            let cfg = IwrrConfig::from_json(&text).map_err(|e| e.to_string())?;
            format!("{}\n", cfg.to_json(raw.description))
        } else {
            let curve = Curve::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let out = Command::new(bin).arg("minimize").arg(&path).output().unwrap();
            ensure(out.stdout == text.as_bytes(), || format!("{} changes through the CLI", path.display()))?;
            format!("{}\n", curve.to_json())
        };
        ensure(again == text, || format!("{} is not byte-stable", path.display()))?;
        fixtures += 1;
    }
    let mut rejected = 0;
    for entry in std::fs::read_dir(fixture_dir().join("corrupted")).unwrap() {
        let path = entry.unwrap().path();
        let code = Command::new(bin).arg("check").arg(&path).output().unwrap().status.code();
        ensure(code == Some(4), || format!("{} exits with {code:?}", path.display()))?;
        rejected += 1;
    }
    ensure(rejected == 10, || format!("{rejected} corrupted fixtures"))?;
    Ok(format!("{fixtures} fixtures byte-stable; 10 corrupted fixtures exit 4"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("pseudo-inverse oracle", c1_pseudo_inverse_oracle),
        ("pseudo-inverse parameters", c2_parameter_theorems),
        ("continuity and ordering", c3_continuity_and_order),
        ("UC and wUI corner cases", c4_corner_cases),
        ("composition oracle", c5_composition_oracle),
        ("specialization agreement", c6_specialization),
        ("IWRR bench", c7_iwrr_bench),
        ("rate-latency convolution", c8_convolution),
        ("linear visit counts", c9_linear_visits),
        ("CLI contract", c10_cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
