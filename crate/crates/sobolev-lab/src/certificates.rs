//! Numerical certificates for the constructive proof steps.
//!
//! The limit arguments rest on two explicit interval constructions per
//! `(x, omega)`: an inner radius below which pairs are guaranteed members
//! of the large-threshold set (Claim 1), and an outer radius beyond which
//! no member can lie, together with a distance bound to the support
//! (Claim 2). Both are checked here by direct evaluation, with zero
//! tolerance for counterexamples. The compact-support measure sandwich and
//! the segment Hoelder bound round out the suite.

use serde::{Deserialize, Serialize};

use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};
use crate::estimate::{Estimate, McConfig, Verdict};
use crate::level_set::{levelset_measure, LevelSetQuery, PairRestriction, SetKind};
use crate::quad::adaptive;
use crate::rng::{stream_rng, unit_vector};
use crate::test_functions::{Provenance, SmoothnessBounds, TestFunction};

/// Safety factor applied to grid-estimated sup bounds: a dense-grid max can
/// undershoot the true supremum, and the certificates must stay sound.
pub const GRID_SAFETY: f64 = 1.01;

/// Shared data for the interval certificates.
#[derive(Debug, Clone)]
pub struct ClaimContext<'a> {
    pub f: &'a TestFunction,
    pub body: &'a ConvexBody,
    pub p: f64,
    pub bounds: SmoothnessBounds,
    pub delta: f64,
    pub lambda: f64,
}

impl<'a> ClaimContext<'a> {
    /// Build a context with bounds from the function's dense-grid maxima
    /// (inflated by [`GRID_SAFETY`] when grid-estimated).
    pub fn new(
        f: &'a TestFunction,
        body: &'a ConvexBody,
        p: f64,
        delta: f64,
        lambda: f64,
    ) -> Result<Self> {
        let mut bounds = f.smoothness_bounds()?;
        if bounds.provenance == Provenance::Grid {
            bounds.grad_sup *= GRID_SAFETY;
            bounds.hess_sup *= GRID_SAFETY;
        }
        Self::with_bounds(f, body, p, bounds, delta, lambda)
    }

    /// Like [`ClaimContext::new`] with caller-supplied bounds (synthetic
    /// cases and the worked examples).
    pub fn with_bounds(
        f: &'a TestFunction,
        body: &'a ConvexBody,
        p: f64,
        bounds: SmoothnessBounds,
        delta: f64,
        lambda: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0,1)"));
        }
        if !(lambda > 0.0) {
            return Err(Error::invalid("lambda must be positive"));
        }
        if !(p >= 1.0) {
            return Err(Error::invalid("claims require p >= 1"));
        }
        if f.dim() != body.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: body.dim(),
            });
        }
        Ok(ClaimContext {
            f,
            body,
            p,
            bounds,
            delta,
            lambda,
        })
    }

    fn directional_derivative(&self, x: &[f64], omega: &[f64]) -> Result<f64> {
        let grad = self.f.gradient(x)?;
        Ok(grad.iter().zip(omega).map(|(a, b)| a * b).sum())
    }
}

/// Inner interval radius: `r^n = min(delta^n |grad f . w|^n / b^n,
/// (1-delta)^p |grad f . w|^p / (lambda^p ||w||_K^{n+p}))`.
pub fn claim1_radius(ctx: &ClaimContext<'_>, x: &[f64], omega: &[f64]) -> Result<f64> {
    let d = ctx.directional_derivative(x, omega)?.abs();
    if d < 1e-14 {
        return Err(Error::invalid(
            "claim 1 needs a nonzero directional derivative",
        ));
    }
    let n = ctx.f.dim() as f64;
    let gauge = ctx.body.gauge_raw(omega);
    let taylor_branch = if ctx.bounds.hess_sup == 0.0 {
        f64::INFINITY
    } else {
        ctx.delta * d / ctx.bounds.hess_sup
    };
    let threshold_branch = ((1.0 - ctx.delta).powf(ctx.p) * d.powf(ctx.p)
        / (ctx.lambda.powf(ctx.p) * gauge.powf(n + ctx.p)))
    .powf(1.0 / n);
    Ok(taylor_branch.min(threshold_branch))
}

/// Outer interval radius:
/// `R^n = (|grad f . w| + b (a / (lambda ||w||_K^{n/p+1}))^{p/n})^p
///  / (lambda^p ||w||_K^{n+p})`.
pub fn claim2_radius(ctx: &ClaimContext<'_>, x: &[f64], omega: &[f64]) -> f64 {
    let d = match ctx.directional_derivative(x, omega) {
        Ok(d) => d.abs(),
        Err(_) => 0.0,
    };
    let n = ctx.f.dim() as f64;
    let gauge = ctx.body.gauge_raw(omega);
    let correction = ctx.bounds.hess_sup
        * (ctx.bounds.grad_sup / (ctx.lambda * gauge.powf(n / ctx.p + 1.0))).powf(ctx.p / n);
    ((d + correction).powf(ctx.p) / (ctx.lambda.powf(ctx.p) * gauge.powf(n + ctx.p)))
        .powf(1.0 / n)
}

/// A failed membership or inclusion check, with its margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: Vec<f64>,
    pub omega: Vec<f64>,
    pub t: f64,
    pub margin: f64,
}

/// Outcome of a batch of certificate checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub checked: u64,
    pub counterexamples: Vec<Counterexample>,
    pub verdict: Verdict,
}

impl ClaimOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Check Claim 1 along one ray: every `s` in `(0, r]` must put
/// `(x, x + s omega)` in the large-threshold set.
///
/// A violation only counts when it exceeds the evaluation noise floor
/// (a few ulps of the function values): where the interval radius drops
/// below the representable difference scale — deep in the flat tail of a
/// smooth bump, say — f64 cannot distinguish membership either way, while
/// a genuine failure of the inclusion scales with the threshold side.
pub fn claim1_verify(
    ctx: &ClaimContext<'_>,
    x: &[f64],
    omega: &[f64],
    t_samples: u64,
) -> Result<ClaimOutcome> {
    let r = claim1_radius(ctx, x, omega)?;
    let n = ctx.f.dim();
    let e = n as f64 / ctx.p + 1.0;
    let gauge = ctx.body.gauge_raw(omega);
    let fx = ctx.f.eval_raw(x);
    let mut counterexamples = Vec::new();
    for j in 1..=t_samples {
        let s = r * j as f64 / t_samples as f64;
        let y: Vec<f64> = x.iter().zip(omega).map(|(a, w)| a + s * w).collect();
        let fy = ctx.f.eval_raw(&y);
        let lhs = (fx - fy).abs();
        let rhs = ctx.lambda * (s * gauge).powf(e);
        let margin = lhs - rhs;
        let noise = 32.0 * f64::EPSILON * fx.abs().max(fy.abs());
        if margin < -noise {
            counterexamples.push(Counterexample {
                x: x.to_vec(),
                omega: omega.to_vec(),
                t: s,
                margin,
            });
        }
    }
    Ok(ClaimOutcome {
        checked: t_samples,
        verdict: Verdict::from_bool(counterexamples.is_empty()),
        counterexamples,
    })
}

/// Check Claim 2 on sampled members of the large-threshold set: each found
/// pair must satisfy `|x-y| <= R(x, omega)` and lie within distance 1 of
/// the support. Requires `lambda > a * max_w ||w||_K^{-n/p-1}`.
pub fn claim2_verify(
    ctx: &ClaimContext<'_>,
    target_pairs: u64,
    budget: u64,
    seed: u64,
) -> Result<ClaimOutcome> {
    let n = ctx.f.dim();
    let threshold =
        ctx.bounds.grad_sup * ctx.body.circumradius().powf(n as f64 / ctx.p + 1.0);
    if !(ctx.lambda > threshold) {
        return Err(Error::invalid(format!(
            "claim 2 needs lambda > {threshold:.6e} for this body"
        )));
    }
    let support = ctx.f.support();
    let (lo, hi) = support.bounding_box();
    let e = n as f64 / ctx.p + 1.0;
    let mut rng = stream_rng(seed, 0);
    let mut found = 0u64;
    let mut counterexamples = Vec::new();
    for _ in 0..budget {
        if found >= target_pairs {
            break;
        }
        // x in the support dilated by the unit ball.
        let x: Vec<f64> = (0..n)
            .map(|i| rng.random_range(lo[i] - 1.0..hi[i] + 1.0))
            .collect();
        if support.euclidean_distance(&x) > 1.0 {
            continue;
        }
        let omega = unit_vector(&mut rng, n);
        let t: f64 = rng.random_range(0.0..1.0);
        if t == 0.0 {
            continue;
        }
        let y: Vec<f64> = x.iter().zip(&omega).map(|(a, w)| a + t * w).collect();
        let gauge = ctx.body.gauge_raw(&omega);
        let member =
            (ctx.f.eval_raw(&x) - ctx.f.eval_raw(&y)).abs() >= ctx.lambda * (t * gauge).powf(e);
        if !member {
            continue;
        }
        found += 1;
        let r_outer = claim2_radius(ctx, &x, &omega);
        if t > r_outer * (1.0 + 1e-12) {
            counterexamples.push(Counterexample {
                x: x.clone(),
                omega: omega.clone(),
                t,
                margin: r_outer - t,
            });
        }
        let dist = support.euclidean_distance(&x);
        if dist > 1.0 + 1e-12 {
            counterexamples.push(Counterexample {
                x,
                omega,
                t,
                margin: 1.0 - dist,
            });
        }
    }
    let verdict = if found < 10 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(counterexamples.is_empty())
    };
    Ok(ClaimOutcome {
        checked: found,
        verdict,
        counterexamples,
    })
}

use rand::Rng;

/// Outcome of the compact-support half-set sandwich.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct M1Report {
    pub lambda: f64,
    pub half_measure: Estimate,
    pub full_measure: Estimate,
    pub lower: f64,
    pub upper: f64,
    pub bounds_pass: bool,
    pub symmetry_pass: bool,
}

impl M1Report {
    pub fn pass(&self) -> bool {
        self.bounds_pass && self.symmetry_pass
    }
}

/// Verify, for `supp f` inside `r K`, that the ascending-gauge half set
/// `H+` satisfies
/// `|K| lambda^{-p} ||f||_p^p - |K|^2 r^{2n} <= mu(H+) <=
///  |K| lambda^{-p} ||f||_p^p + |K|^2 r^{2n}`
/// and that the full set measures twice the half set.
pub fn m1_sandwich(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    lambda: f64,
    r_support: f64,
    mc: McConfig,
) -> Result<M1Report> {
    let n = f.dim();
    let max_gauge = support_max_gauge(f, body)?;
    if max_gauge > r_support * (1.0 + 1e-9) {
        return Err(Error::SupportNotContained(format!(
            "support reaches gauge {max_gauge:.6} > r = {r_support}"
        )));
    }
    let view = f.view();
    let half = levelset_measure(
        &LevelSetQuery::new(&view, body, p, SetKind::PartB, lambda, mc)?
            .with_restriction(PairRestriction::GaugeAscending),
    )?;
    let full = levelset_measure(&LevelSetQuery::new(
        &view,
        body,
        p,
        SetKind::PartB,
        lambda,
        mc,
    )?)?;
    let volume = body.volume(&mc).value;
    let norm_pow = f.lp_norm_pow(p)?;
    let center = volume * norm_pow / lambda.powf(p);
    let spread = volume * volume * r_support.powf(2.0 * n as f64);
    let lower = center - spread;
    let upper = center + spread;
    let bounds_pass = half.value + 3.0 * half.stderr >= lower
        && half.value - 3.0 * half.stderr <= upper;
    let sym_sigma = (full.stderr * full.stderr + 4.0 * half.stderr * half.stderr).sqrt();
    let symmetry_pass =
        (full.value - 2.0 * half.value).abs() <= 3.0 * sym_sigma + 1e-9 * full.value.abs().max(1.0);
    Ok(M1Report {
        lambda,
        half_measure: half,
        full_measure: full,
        lower,
        upper,
        bounds_pass,
        symmetry_pass,
    })
}

/// Largest gauge value attained on the support (exact for balls and boxes).
fn support_max_gauge(f: &TestFunction, body: &ConvexBody) -> Result<f64> {
    use crate::convex_body::Shape;
    let support = f.support();
    let center = support.center();
    let center_gauge = body.gauge_raw(center);
    match support.body().shape() {
        Shape::Ball { radius } => Ok(center_gauge + radius * body.gauge_sup_on_sphere()),
        Shape::Box { half_widths } => {
            let n = half_widths.len();
            let mut max = 0.0f64;
            for corner in 0..(1u32 << n) {
                let v: Vec<f64> = (0..n)
                    .map(|i| {
                        let sign = if (corner >> i) & 1 == 1 { 1.0 } else { -1.0 };
                        center[i] + sign * half_widths[i]
                    })
                    .collect();
                max = max.max(body.gauge_raw(&v));
            }
            Ok(max)
        }
        _ => {
            // Subadditive bound through the circumscribed ball.
            Ok(center_gauge + support.body().circumradius() * body.gauge_sup_on_sphere())
        }
    }
}

/// Segment Hoelder bound: `|f(x)-f(y)| <= |x-y|^{(p-1)/p}
/// (int_segment |grad f . omega|^p)^{1/p}`; returns `(lhs, rhs)`.
pub fn holder_segment_bound(
    f: &TestFunction,
    x: &[f64],
    y: &[f64],
    p: f64,
) -> Result<(f64, f64)> {
    let n = f.dim();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len().max(y.len()),
        });
    }
    let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let len = crate::convex_body::euclidean_norm(&diff);
    if len < 1e-300 {
        return Ok((0.0, 0.0));
    }
    let omega: Vec<f64> = diff.iter().map(|d| d / len).collect();
    let lhs = (f.eval_raw(x) - f.eval_raw(y)).abs();
    let seg = adaptive(
        |s| {
            let point: Vec<f64> = x.iter().zip(&omega).map(|(a, w)| a + s * w).collect();
            match f.gradient(&point) {
                Ok(g) => g
                    .iter()
                    .zip(&omega)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .abs()
                    .powf(p),
                Err(_) => 0.0,
            }
        },
        0.0,
        len,
        1e-10,
        1e-300,
        2000,
    );
    let rhs = len.powf((p - 1.0) / p) * seg.value.powf(1.0 / p);
    Ok((lhs, rhs))
}

/// Sweep Claim 1 over random rays for a grid of `delta` and `lambda`
/// multiples of the gradient sup; the claim is universally quantified, so
/// any counterexample fails the suite.
#[allow(clippy::too_many_arguments)]
pub fn claim1_suite(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    deltas: &[f64],
    lambda_factors: &[f64],
    rays_per_case: u64,
    t_samples: u64,
    seed: u64,
) -> Result<ClaimOutcome> {
    let support = f.support();
    let a = f.smoothness_bounds()?.grad_sup;
    let mut rng = stream_rng(seed, 0);
    let mut checked = 0u64;
    let mut counterexamples = Vec::new();
    for &delta in deltas {
        for &factor in lambda_factors {
            let ctx = ClaimContext::new(f, body, p, delta, factor * a)?;
            let mut rays = 0u64;
            while rays < rays_per_case {
                let x = support.sample(&mut rng)?;
                let omega = unit_vector(&mut rng, f.dim());
                match claim1_verify(&ctx, &x, &omega, t_samples) {
                    Ok(outcome) => {
                        checked += outcome.checked;
                        counterexamples.extend(outcome.counterexamples);
                        rays += 1;
                    }
                    Err(Error::InvalidArgument(_)) => continue, // grazing ray
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(ClaimOutcome {
        checked,
        verdict: Verdict::from_bool(counterexamples.is_empty()),
        counterexamples,
    })
}

/// Raw membership test used when exercising the claims from outside.
pub fn in_large_threshold_set(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    lambda: f64,
    x: &[f64],
    y: &[f64],
) -> bool {
    let n = f.dim() as f64;
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let gauge = body.gauge_raw(&diff);
    if gauge == 0.0 {
        return false;
    }
    (f.eval_raw(x) - f.eval_raw(y)).abs() >= lambda * gauge.powf(n / p + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly_instance() -> (TestFunction, ConvexBody) {
        (
            TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap(),
            ConvexBody::interval(1.0).unwrap(),
        )
    }

    fn synthetic_bounds(a: f64, b: f64) -> SmoothnessBounds {
        SmoothnessBounds {
            grad_sup: a,
            hess_sup: b,
            provenance: Provenance::Exact,
        }
    }

    #[test]
    fn claim1_radius_worked_example() {
        // n=1, K=[-1,1], p=2, delta=0.5, b=1, lambda=10. At x = -0.5 the
        // derivative is d = 1.6875, so the radius is
        // min(delta d / b, (1-delta)^2 d^2 / lambda^2).
        let (f, k) = poly_instance();
        let ctx =
            ClaimContext::with_bounds(&f, &k, 2.0, synthetic_bounds(1.0, 1.0), 0.5, 10.0)
                .unwrap();
        let x = [-0.5];
        let omega = [1.0];
        let d: f64 = 1.6875;
        let r = claim1_radius(&ctx, &x, &omega).unwrap();
        assert_relative_eq!(
            r,
            (0.5 * d).min(0.25 * d * d / 100.0),
            epsilon = 1e-12
        );
        // With a unit derivative the branches are 0.5 and 0.0025.
        assert_relative_eq!((0.5f64).min(0.25 / 100.0), 0.0025);
        // Doubling lambda divides the active (threshold) branch by 2^p = 4.
        let ctx2 =
            ClaimContext::with_bounds(&f, &k, 2.0, synthetic_bounds(1.0, 1.0), 0.5, 20.0)
                .unwrap();
        let r2 = claim1_radius(&ctx2, &x, &omega).unwrap();
        assert_relative_eq!(r2, r / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn claim1_radius_vanishes_with_derivative() {
        let (f, k) = poly_instance();
        let ctx = ClaimContext::new(&f, &k, 2.0, 0.5, 50.0).unwrap();
        // At the bump apex the derivative vanishes.
        assert!(claim1_radius(&ctx, &[0.0], &[1.0]).is_err());
        // Near-zero derivative gives a near-zero radius.
        let r = claim1_radius(&ctx, &[1e-6], &[1.0]).unwrap();
        assert!(r < 1e-5);
    }

    #[test]
    fn claim2_radius_worked_examples() {
        let (f, k) = poly_instance();
        // b = 0 synthetic: R^n reduces to the threshold branch.
        let ctx =
            ClaimContext::with_bounds(&f, &k, 2.0, synthetic_bounds(1.0, 0.0), 0.5, 10.0)
                .unwrap();
        let x = [-0.5];
        let omega = [1.0];
        let d = 1.6875f64;
        let r = claim2_radius(&ctx, &x, &omega);
        assert_relative_eq!(r, d * d / 100.0, epsilon = 1e-12);

        // n=1, p=1, a=b=1, |f'.w|=1, lambda=10 -> R = 0.11.
        let r_unit = {
            let correction = 1.0 * (1.0f64 / 10.0).powf(1.0);
            (1.0 + correction) / 10.0
        };
        assert_relative_eq!(r_unit, 0.11, epsilon = 1e-12);

        // lambda -> infinity: R approaches the b = 0 form.
        let big = ClaimContext::with_bounds(
            &f,
            &k,
            2.0,
            synthetic_bounds(1.0, 1.0),
            0.5,
            1e6,
        )
        .unwrap();
        let r_big = claim2_radius(&big, &x, &omega);
        let r_asym = (d / 1e6).powf(2.0 / 1.0).powf(1.0); // (d/lambda)^p, n=1
        assert_relative_eq!(r_big, r_asym, max_relative = 1e-5);
    }

    #[test]
    fn claim1_verify_poly_bump() {
        let (f, k) = poly_instance();
        for lambda_factor in [10.0, 100.0] {
            let a = f.smoothness_bounds().unwrap().grad_sup;
            let ctx = ClaimContext::new(&f, &k, 2.0, 0.5, lambda_factor * a).unwrap();
            let outcome = claim1_verify(&ctx, &[0.5], &[1.0], 1000).unwrap();
            assert!(outcome.passed(), "{:?}", outcome.counterexamples.first());
        }
    }

    #[test]
    fn claim1_suite_zero_counterexamples() {
        let (f, k) = poly_instance();
        let outcome = claim1_suite(
            &f,
            &k,
            2.0,
            &[0.25, 0.5, 0.75],
            &[10.0, 100.0],
            30,
            25,
            77,
        )
        .unwrap();
        assert!(outcome.passed(), "{:?}", outcome.counterexamples.first());
        assert!(outcome.checked >= 1000);
    }

    #[test]
    fn claim2_verify_poly_bump() {
        let (f, k) = poly_instance();
        let a = f.smoothness_bounds().unwrap().grad_sup;
        let ctx = ClaimContext::new(&f, &k, 1.0, 0.5, 10.0 * a).unwrap();
        let outcome = claim2_verify(&ctx, 1000, 2_000_000, 9).unwrap();
        assert_eq!(outcome.verdict, Verdict::Pass, "{:?}", outcome.counterexamples.first());
        assert!(outcome.checked >= 10);
    }

    #[test]
    fn claim2_inconclusive_at_absurd_lambda() {
        let (f, k) = poly_instance();
        let a = f.smoothness_bounds().unwrap().grad_sup;
        let ctx = ClaimContext::new(&f, &k, 1.0, 0.5, 1e9 * a).unwrap();
        let outcome = claim2_verify(&ctx, 1000, 50_000, 10).unwrap();
        assert_eq!(outcome.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn far_points_never_members() {
        let (f, k) = poly_instance();
        let a = f.smoothness_bounds().unwrap().grad_sup;
        let lambda = 10.0 * a;
        let mut rng = stream_rng(11, 0);
        for _ in 0..1000 {
            let x = [3.0 + rng.random_range(0.0..1.0f64)];
            let y = [x[0] + rng.random_range(-0.9..0.9f64)];
            assert!(!in_large_threshold_set(&f, &k, 1.0, lambda, &x, &y));
        }
    }

    #[test]
    fn m1_sandwich_indicator_example() {
        // f = 1_{[0,1]}, K = [-1,1], r = 1, lambda = 0.1:
        // H+ = 19 inside [16, 24].
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let report = m1_sandwich(&f, &k, 1.0, 0.1, 1.0, McConfig::new(20_000, 12)).unwrap();
        assert!(report.pass());
        assert_relative_eq!(report.lower, 16.0, epsilon = 1e-9);
        assert_relative_eq!(report.upper, 24.0, epsilon = 1e-9);
        assert!(
            (report.half_measure.value - 19.0).abs() <= 3.0 * report.half_measure.stderr + 1e-6,
            "H+ = {}",
            report.half_measure.value
        );
        assert!(
            (report.full_measure.value - 38.0).abs() <= 3.0 * report.full_measure.stderr + 1e-6
        );
    }

    #[test]
    fn m1_support_not_contained() {
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        assert!(matches!(
            m1_sandwich(&f, &k, 1.0, 0.1, 0.5, McConfig::new(1_000, 13)),
            Err(Error::SupportNotContained(_))
        ));
    }

    #[test]
    fn m1_small_lambda_limit() {
        // lambda^p mu(H+) -> |K| ||f||_p^p as lambda -> 0.
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let report = m1_sandwich(&f, &k, 1.0, 0.01, 1.0, McConfig::new(20_000, 14)).unwrap();
        let scaled = 0.01 * report.half_measure.value;
        assert!((scaled - 2.0).abs() < 0.05, "lambda mu(H+) = {scaled}");
    }

    #[test]
    fn claim_radii_shrink_with_lambda() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::default();
        runner
            .run(
                &(1.0..100.0f64, 1.1..4.0f64, 0.1..0.9f64),
                |(lambda, factor, delta)| {
                    let (f, k) = poly_instance();
                    let bounds = synthetic_bounds(2.0, 3.0);
                    let x = [0.4];
                    let omega = [1.0];
                    let a = ClaimContext::with_bounds(&f, &k, 2.0, bounds, delta, lambda)
                        .unwrap();
                    let b = ClaimContext::with_bounds(
                        &f,
                        &k,
                        2.0,
                        bounds,
                        delta,
                        lambda * factor,
                    )
                    .unwrap();
                    prop_assert!(
                        claim1_radius(&b, &x, &omega).unwrap()
                            <= claim1_radius(&a, &x, &omega).unwrap() + 1e-15
                    );
                    prop_assert!(claim2_radius(&b, &x, &omega) <= claim2_radius(&a, &x, &omega) + 1e-15);
                    // The inner interval never exceeds the outer one.
                    prop_assert!(
                        claim1_radius(&a, &x, &omega).unwrap()
                            <= claim2_radius(&a, &x, &omega) * (1.0 + 1e-12)
                    );
                    Ok(())
                },
            )
            .unwrap();
    }

    #[test]
    fn holder_chain_on_random_segments() {
        let f = TestFunction::poly_bump(2, 3, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let mut rng = stream_rng(15, 0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.2..1.2)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.random_range(-1.2..1.2)).collect();
            for p in [1.0, 2.0, 3.0] {
                let (lhs, rhs) = holder_segment_bound(&f, &x, &y, p).unwrap();
                assert!(lhs <= rhs + 1e-10, "p={p}: {lhs} > {rhs}");
            }
        }
    }
}
