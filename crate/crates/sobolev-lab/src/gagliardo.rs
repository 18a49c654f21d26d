//! Anisotropic Gagliardo seminorm estimation and its endpoint sweeps.
//!
//! The seminorm `int int |f(x)-f(y)|^p / ||x-y||_K^{n+sp} dx dy` is computed
//! in polar coordinates around `x`: the radial integrand carries the factor
//! `t^{p-sp-1}`, integrable up to the diagonal for Lipschitz `f`. Two
//! devices keep the radial integral accurate over the whole `s` range:
//!
//! * substitution `u = t^alpha` with `alpha = p(1-s)`, which flattens the
//!   `t -> 0` singularity exactly (the integrand becomes the bounded
//!   quotient `(|f(x)-f(x+t theta)| / t)^p / alpha`), and
//! * below the float cancellation scale the quotient is replaced by the
//!   exact directional derivative `|grad f(x) . theta|`.
//!
//! Past the support exit the partner value vanishes and the remaining tail
//! `|f(x)|^p t^{-1-sp}` integrates in closed form, so no truncation radius
//! appears anywhere.

use crate::convex_body::{sphere_surface_area, ConvexBody};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, McConfig, SweepRow, SweepTable, Verdict};
use crate::quad::adaptive;
use crate::rng::unit_vector;
use crate::test_functions::{grad_moment_energy, sphere_quadrature, TestFunction};

/// Values above this are reported as divergence rather than returned.
pub const DIVERGENCE_SENTINEL: f64 = 1e12;

/// How the outer `(x, theta)` integral is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum SeminormMethod {
    /// Monte Carlo nodes over `x` (uniform in the support) and directions.
    MonteCarlo(McConfig),
    /// Deterministic grids: adaptive in `x` for `n = 1`, midpoint tensor
    /// cells (`x_resolution` per axis) and a sphere rule otherwise.
    RadialTensor {
        x_resolution: usize,
        theta_resolution: usize,
    },
}

impl SeminormMethod {
    fn reference_mc(&self) -> McConfig {
        match self {
            SeminormMethod::MonteCarlo(mc) => *mc,
            SeminormMethod::RadialTensor { .. } => McConfig::new(200_000, 0x5eed),
        }
    }
}

/// A seminorm evaluation request.
#[derive(Debug, Clone)]
pub struct SeminormQuery<'a> {
    pub f: &'a TestFunction,
    pub body: &'a ConvexBody,
    pub p: f64,
    pub s: f64,
    pub method: SeminormMethod,
}

impl<'a> SeminormQuery<'a> {
    pub fn new(
        f: &'a TestFunction,
        body: &'a ConvexBody,
        p: f64,
        s: f64,
        method: SeminormMethod,
    ) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::invalid("seminorm requires p >= 1"));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid("seminorm requires s in (0,1)"));
        }
        if f.dim() != body.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: body.dim(),
            });
        }
        Ok(SeminormQuery { f, body, p, s, method })
    }
}

/// Contribution of the ray `x + t theta`, including the closed-form
/// exterior tail with its symmetric-pair factor 2 and the gauge weight.
fn ray_value(
    f: &TestFunction,
    body: &ConvexBody,
    x: &[f64],
    theta: &[f64],
    p: f64,
    s: f64,
) -> f64 {
    let n = f.dim();
    let sp = s * p;
    let alpha = p - sp; // p(1-s) > 0
    let fx = f.eval_raw(x);
    let g_theta = body.gauge_raw(theta);
    let t_exit = f.support().ray_exit(x, theta);

    // Directional derivative for the sub-cancellation regime; zero for the
    // kinds without one (their difference quotient vanishes near 0 a.s.).
    let ddir: f64 = match f.gradient(x) {
        Ok(g) => g.iter().zip(theta).map(|(a, b)| a * b).sum(),
        Err(_) => 0.0,
    };
    let t_safe = 1.5e-8 * f.support_radius();

    let ybuf = std::cell::RefCell::new(vec![0.0; n]);
    let quotient = |t: f64| -> f64 {
        if t < t_safe {
            return ddir.abs();
        }
        let mut y = ybuf.borrow_mut();
        for i in 0..n {
            y[i] = x[i] + t * theta[i];
        }
        (fx - f.eval_raw(&y)).abs() / t
    };

    let interior = if t_exit > 0.0 {
        adaptive(
            |u| {
                let t = u.powf(1.0 / alpha);
                quotient(t).powf(p) / alpha
            },
            0.0,
            t_exit.powf(alpha),
            1e-7,
            1e-300,
            600,
        )
        .value
    } else {
        0.0
    };

    let tail = if fx == 0.0 || t_exit <= 0.0 {
        0.0
    } else {
        2.0 * fx.abs().powf(p) * t_exit.powf(-sp) / sp
    };

    (interior + tail) * g_theta.powf(-(n as f64 + sp))
}

/// Estimate of the anisotropic Gagliardo seminorm (to the power `p`).
pub fn seminorm(q: &SeminormQuery<'_>) -> Result<Estimate> {
    let f = q.f;
    // Indicators lie in the fractional class exactly when s p < 1; past
    // that the integral is infinite, and float absorption near the jump
    // would otherwise truncate the divergence into a large finite number.
    if matches!(f.kind(), crate::test_functions::Kind::Indicator { .. }) && q.s * q.p >= 1.0 {
        return Err(Error::Divergence(format!(
            "indicator seminorm diverges for s*p = {} >= 1",
            q.s * q.p
        )));
    }
    let n = f.dim();
    let support = f.support();
    let est = match q.method {
        SeminormMethod::MonteCarlo(mc) => {
            let surf = sphere_surface_area(n);
            let vol = support.volume(&McConfig {
                seed: mc.seed.wrapping_add(0x5eed),
                ..mc
            });
            let mean = crate::estimate::try_monte_carlo(mc.samples, mc.seed, |rng| {
                let x = support.sample(rng)?;
                let theta = unit_vector(rng, n);
                Ok(ray_value(f, q.body, &x, &theta, q.p, q.s))
            })?;
            mean.product(&vol).scaled(surf)
        }
        SeminormMethod::RadialTensor {
            x_resolution,
            theta_resolution,
        } => {
            let value = match n {
                1 => {
                    let (lo, hi) = support.bounding_box();
                    let r = adaptive(
                        |x| {
                            ray_value(f, q.body, &[x], &[1.0], q.p, q.s)
                                + ray_value(f, q.body, &[x], &[-1.0], q.p, q.s)
                        },
                        lo[0],
                        hi[0],
                        1e-7,
                        1e-300,
                        x_resolution.max(512),
                    );
                    if !r.converged && r.abs_error > 0.05 * r.value.abs() {
                        return Err(Error::Divergence(
                            "radial quadrature failed to converge; the seminorm may be infinite"
                                .into(),
                        ));
                    }
                    r.value
                }
                2 | 3 => {
                    let (lo, hi) = support.bounding_box();
                    let m = x_resolution.max(8);
                    let mut cell = 1.0;
                    for d in 0..n {
                        cell *= (hi[d] - lo[d]) / m as f64;
                    }
                    let mut acc = 0.0;
                    let mut idx = vec![0usize; n];
                    loop {
                        let x: Vec<f64> = (0..n)
                            .map(|d| lo[d] + (idx[d] as f64 + 0.5) * (hi[d] - lo[d]) / m as f64)
                            .collect();
                        if support.contains(&x) {
                            acc += sphere_quadrature(n, theta_resolution.max(64), |theta| {
                                ray_value(f, q.body, &x, theta, q.p, q.s)
                            });
                        }
                        // advance the lattice index
                        let mut d = 0;
                        loop {
                            idx[d] += 1;
                            if idx[d] < m {
                                break;
                            }
                            idx[d] = 0;
                            d += 1;
                            if d == n {
                                break;
                            }
                        }
                        if d == n {
                            break;
                        }
                    }
                    acc * cell
                }
                _ => {
                    return Err(Error::invalid(
                        "deterministic seminorm grids are implemented for n <= 3",
                    ))
                }
            };
            Estimate::exact(value)
        }
    };
    if !est.value.is_finite() || est.value > DIVERGENCE_SENTINEL {
        return Err(Error::Divergence(format!(
            "seminorm estimate {:.3e} exceeded the sentinel",
            est.value
        )));
    }
    Ok(est)
}

fn validate_s_list(s_list: &[f64], increasing: bool) -> Result<()> {
    if s_list.is_empty() {
        return Err(Error::invalid("empty s list"));
    }
    if s_list.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::invalid("s values must lie in (0,1)"));
    }
    let ordered = if increasing {
        s_list.windows(2).all(|w| w[0] < w[1])
    } else {
        s_list.windows(2).all(|w| w[0] > w[1])
    };
    if !ordered {
        return Err(Error::invalid(if increasing {
            "s list must increase toward 1"
        } else {
            "s list must decrease toward 0"
        }));
    }
    Ok(())
}

/// `s -> 1` sweep: rows of `(1-s) * seminorm` against the gradient moment
/// energy reference `(2/p) int ||grad f||^p_{Z_p^* K}`, with a linear
/// extrapolation in `(1-s)` as the headline number.
pub fn bbm_sweep(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    s_list: &[f64],
    method: SeminormMethod,
) -> Result<SweepTable> {
    validate_s_list(s_list, true)?;
    let mc = method.reference_mc();
    let reference = grad_moment_energy(f, body, p, &mc)?.value * 2.0 / p;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let q = SeminormQuery::new(f, body, p, s, method)?;
        let est = seminorm(&q)?.scaled(1.0 - s);
        rows.push(SweepRow::new(s, &est, reference));
    }
    let verdict = Verdict::from_bool(rows.last().is_some_and(|r| r.rel_error < 0.1));
    let mut table = SweepTable {
        rows,
        verdict,
        extrapolated: None,
    };
    table.extrapolate(|s| 1.0 - s);
    Ok(table)
}

/// `s -> 0` sweep: rows of `s * seminorm` against `(2n/p) |K| ||f||_p^p`,
/// with a linear extrapolation in `s`.
pub fn ms_sweep(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    s_list: &[f64],
    method: SeminormMethod,
) -> Result<SweepTable> {
    validate_s_list(s_list, false)?;
    let mc = method.reference_mc();
    let volume = body.volume(&mc).value;
    let reference = 2.0 * f.dim() as f64 / p * volume * f.lp_norm_pow(p)?;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let q = SeminormQuery::new(f, body, p, s, method)?;
        let est = seminorm(&q)?.scaled(s);
        rows.push(SweepRow::new(s, &est, reference));
    }
    let verdict = Verdict::from_bool(rows.last().is_some_and(|r| r.rel_error < 0.1));
    let mut table = SweepTable {
        rows,
        verdict,
        extrapolated: None,
    };
    table.extrapolate(|s| s);
    Ok(table)
}

/// Default `s` grid approaching 1.
pub const DEFAULT_BBM_GRID: [f64; 4] = [0.5, 0.9, 0.95, 0.99];
/// Default `s` grid approaching 0.
pub const DEFAULT_MS_GRID: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_body::k_constant;
    use approx::assert_relative_eq;

    fn quad_method() -> SeminormMethod {
        SeminormMethod::RadialTensor {
            x_resolution: 2000,
            theta_resolution: 128,
        }
    }

    #[test]
    fn indicator_seminorm_closed_form() {
        // n=1, p=1, K=[-1,1], f = 1_{[0,1]}: seminorm = 4/(s(1-s)).
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        for s in [0.25, 0.5, 0.75] {
            let q = SeminormQuery::new(&f, &k, 1.0, s, quad_method()).unwrap();
            let est = seminorm(&q).unwrap();
            let exact = 4.0 / (s * (1.0 - s));
            assert!(
                (est.value - exact).abs() / exact < 1e-3,
                "s={s}: {} vs {exact}",
                est.value
            );
        }
    }

    #[test]
    fn divergent_seminorm_reports_sentinel() {
        // sp >= 1 for an indicator: the double integral is infinite and
        // the deterministic path must say so rather than return a number.
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let q = SeminormQuery::new(&f, &k, 2.0, 0.75, quad_method()).unwrap();
        assert!(matches!(seminorm(&q), Err(Error::Divergence(_))));
    }

    #[test]
    fn monte_carlo_agrees_with_quadrature() {
        let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let s = 0.7;
        let p = 2.0;
        let quad = seminorm(&SeminormQuery::new(&f, &k, p, s, quad_method()).unwrap()).unwrap();
        let mc = seminorm(
            &SeminormQuery::new(
                &f,
                &k,
                p,
                s,
                SeminormMethod::MonteCarlo(McConfig::new(40_000, 23)),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(
            (mc.value - quad.value).abs() <= 3.0 * mc.stderr + 1e-4 * quad.value,
            "mc {} +- {} vs quadrature {}",
            mc.value,
            mc.stderr,
            quad.value
        );
    }

    #[test]
    fn zero_function_seminorm() {
        let f = TestFunction::indicator_interval(0.0, 1.0, 0.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let q = SeminormQuery::new(&f, &k, 1.0, 0.5, quad_method()).unwrap();
        assert_eq!(seminorm(&q).unwrap().value, 0.0);
    }

    #[test]
    fn seminorm_scaling_in_the_body() {
        // gauge_{2K} = gauge_K / 2, so the seminorm scales by 2^{n+sp}.
        let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let k1 = ConvexBody::interval(1.0).unwrap();
        let k2 = ConvexBody::interval(2.0).unwrap();
        let s = 0.5;
        let p = 2.0;
        let a = seminorm(&SeminormQuery::new(&f, &k1, p, s, quad_method()).unwrap()).unwrap();
        let b = seminorm(&SeminormQuery::new(&f, &k2, p, s, quad_method()).unwrap()).unwrap();
        let factor = 2f64.powf(1.0 + s * p);
        assert_relative_eq!(b.value, factor * a.value, max_relative = 1e-5);
    }

    #[test]
    fn seminorm_seed_invariance() {
        let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let est = |seed: u64| {
            seminorm(
                &SeminormQuery::new(
                    &f,
                    &k,
                    2.0,
                    0.7,
                    SeminormMethod::MonteCarlo(McConfig::new(20_000, seed)),
                )
                .unwrap(),
            )
            .unwrap()
        };
        let a = est(1);
        let b = est(2);
        assert!(
            (a.value - b.value).abs() <= 3.0 * (a.stderr + b.stderr),
            "{} +- {} vs {} +- {}",
            a.value,
            a.stderr,
            b.value,
            b.stderr
        );
    }

    #[test]
    fn monotone_divergence_for_indicator() {
        // s * seminorm = 4/(1-s) is increasing in s.
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let mut prev = 0.0;
        for s in [0.1, 0.3, 0.5, 0.7, 0.85] {
            let q = SeminormQuery::new(&f, &k, 1.0, s, quad_method()).unwrap();
            let v = s * seminorm(&q).unwrap().value;
            assert!(v > prev, "s*seminorm not increasing at s={s}");
            prev = v;
        }
    }

    #[test]
    fn bbm_sweep_poly_bump() {
        let f = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let table = bbm_sweep(&f, &k, 2.0, &DEFAULT_BBM_GRID, quad_method()).unwrap();
        let reference = 9216.0 / 3465.0;
        assert_relative_eq!(table.rows[0].reference, reference, epsilon = 1e-8);
        assert_eq!(table.verdict, Verdict::Pass);
        let last = table.rows.last().unwrap();
        assert!(
            last.rel_error < 0.1,
            "extreme row error {} at s={}",
            last.rel_error,
            last.param
        );
        // Extrapolation tightens the estimate.
        let ex = table.extrapolated.unwrap();
        assert!((ex.value - reference).abs() / reference < 0.02, "extrapolated {}", ex.value);
    }

    #[test]
    fn bbm_ball_matches_isotropic_constant() {
        // K = B^n: reference equals (1/p) k(p,n) ||grad f||_p^p.
        let f = TestFunction::poly_bump(2, 3, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let p = 2.0;
        let mc = McConfig::new(10_000, 3);
        let energy = grad_moment_energy(&f, &ball, p, &mc).unwrap().value * 2.0 / p;
        let iso = k_constant(p, 2) / p * f.gradient_lp_norm_pow(p).unwrap();
        assert_relative_eq!(energy, iso, max_relative = 1e-8);
    }

    #[test]
    fn ms_sweep_indicator() {
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let table = ms_sweep(&f, &k, 1.0, &DEFAULT_MS_GRID, quad_method()).unwrap();
        // Reference (2n/p)|K| ||f||_1 = 2*2*1 = 4; rows are 4/(1-s).
        assert_relative_eq!(table.rows[0].reference, 4.0, epsilon = 1e-12);
        for row in &table.rows {
            assert_relative_eq!(row.value, 4.0 / (1.0 - row.param), max_relative = 1e-3);
        }
        let ex = table.extrapolated.unwrap();
        assert!((ex.value - 4.0).abs() / 4.0 < 0.02);
        assert_eq!(table.verdict, Verdict::Pass);
    }

    #[test]
    fn invalid_queries_rejected() {
        let f = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        assert!(SeminormQuery::new(&f, &k, 0.5, 0.5, quad_method()).is_err());
        assert!(SeminormQuery::new(&f, &k, 1.0, 1.0, quad_method()).is_err());
        assert!(ms_sweep(&f, &k, 1.0, &[0.01, 0.1], quad_method()).is_err());
        assert!(bbm_sweep(&f, &k, 1.0, &[0.9, 0.5], quad_method()).is_err());
    }
}
