//! Catalog of test functions with exact derivatives and analytic norms.
//!
//! Two regimes are covered: kinds with continuous second derivatives
//! (smooth bump, polynomial bump with `m >= 3`, truncated gaussian) for the
//! large-threshold experiments, and general `L^p` members (indicator,
//! triangle) for the small-threshold ones. Every function knows a convex
//! set containing its support; the estimators lean on that to split rays
//! into an interior part and an exactly-integrable exterior tail.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convex_body::{sphere_surface_area, ConvexBody};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, McConfig};
use crate::quad::{adaptive, adaptive_with_breakpoints};
use crate::rng::StreamRng;

/// Gaussian evaluations are clamped to zero where `f < 1e-12 * max`, i.e.
/// beyond `TRUNCATION_U` scale lengths, so the declared support is exact.
pub const TRUNCATION_U: f64 = 7.434257466603097; // sqrt(24 ln 10)

/// Function families.
#[derive(Debug, Clone)]
pub enum Kind {
    /// `amp * exp(-1/(1 - u^2))` for `u = |x-c|/r < 1`, else 0.
    SmoothBump,
    /// `amp * (1 - u^2)^m` for `u <= 1`, else 0; `m >= 3` keeps `C^2`.
    PolyBump { m: u32 },
    /// `amp` on `center + region`, else 0.
    Indicator { region: ConvexBody },
    /// One-dimensional hat `amp * max(0, 1 - |x-c|/r)`.
    Triangle,
    /// `amp * exp(-u^2/2)`, truncated at `u = TRUNCATION_U`.
    Gaussian,
}

/// A catalog member: kind plus amplitude/center/scale parameters.
#[derive(Debug, Clone)]
pub struct TestFunction {
    dim: usize,
    kind: Kind,
    amplitude: f64,
    center: Vec<f64>,
    radius: f64,
}

/// Sup-norm bounds `a = ||grad f||_inf` and `b = ||hess f||_inf`
/// (operator norm), with their provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessBounds {
    pub grad_sup: f64,
    pub hess_sup: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Exact,
    Grid,
}

impl TestFunction {
    pub fn smooth_bump(dim: usize, amplitude: f64, center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::radial(dim, Kind::SmoothBump, amplitude, center, radius)
    }

    pub fn poly_bump(
        dim: usize,
        m: u32,
        amplitude: f64,
        center: Vec<f64>,
        radius: f64,
    ) -> Result<Self> {
        if m < 3 {
            return Err(Error::invalid("poly-bump needs m >= 3 for C^2 regularity"));
        }
        Self::radial(dim, Kind::PolyBump { m }, amplitude, center, radius)
    }

    pub fn gaussian(dim: usize, amplitude: f64, center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::radial(dim, Kind::Gaussian, amplitude, center, radius)
    }

    pub fn triangle(amplitude: f64, center: f64, radius: f64) -> Result<Self> {
        Self::radial(1, Kind::Triangle, amplitude, vec![center], radius)
    }

    pub fn indicator(region: ConvexBody, center: Vec<f64>, amplitude: f64) -> Result<Self> {
        let dim = region.dim();
        if center.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: center.len(),
            });
        }
        Ok(TestFunction {
            dim,
            kind: Kind::Indicator { region },
            amplitude,
            center,
            radius: 1.0,
        })
    }

    /// Indicator of `[lo, hi]` in one dimension.
    pub fn indicator_interval(lo: f64, hi: f64, amplitude: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::invalid("indicator interval needs hi > lo"));
        }
        let half = 0.5 * (hi - lo);
        Self::indicator(
            ConvexBody::interval(half)?,
            vec![0.5 * (lo + hi)],
            amplitude,
        )
    }

    fn radial(dim: usize, kind: Kind, amplitude: f64, center: Vec<f64>, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if center.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: center.len(),
            });
        }
        if !(radius > 0.0) {
            return Err(Error::invalid("radius must be positive"));
        }
        Ok(TestFunction {
            dim,
            kind,
            amplitude,
            center,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Euclidean radius of the support about the center.
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            Kind::SmoothBump | Kind::PolyBump { .. } | Kind::Triangle => self.radius,
            Kind::Gaussian => TRUNCATION_U * self.radius,
            Kind::Indicator { region } => region.circumradius(),
        }
    }

    /// Whether evaluations are truncated relative to the ideal profile.
    pub fn truncated(&self) -> bool {
        matches!(self.kind, Kind::Gaussian)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.eval_raw(x))
    }

    #[inline]
    pub fn eval_raw(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Indicator { region } => {
                // Stack buffer: this sits in estimator inner loops.
                if x.len() <= 8 {
                    let mut buf = [0.0f64; 8];
                    for i in 0..x.len() {
                        buf[i] = x[i] - self.center[i];
                    }
                    if region.contains(&buf[..x.len()]) {
                        self.amplitude
                    } else {
                        0.0
                    }
                } else {
                    let shifted: Vec<f64> =
                        x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
                    if region.contains(&shifted) {
                        self.amplitude
                    } else {
                        0.0
                    }
                }
            }
            _ => self.profile(self.rho(x)),
        }
    }

    #[inline]
    fn rho(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            .sqrt()
    }

    /// Radial profile `phi(rho)` for the non-indicator kinds.
    fn profile(&self, rho: f64) -> f64 {
        let u = rho / self.radius;
        match &self.kind {
            Kind::SmoothBump => {
                if u >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (-1.0 / (1.0 - u * u)).exp()
                }
            }
            Kind::PolyBump { m } => {
                if u >= 1.0 {
                    0.0
                } else {
                    self.amplitude * (1.0 - u * u).powi(*m as i32)
                }
            }
            Kind::Triangle => self.amplitude * (1.0 - u.abs()).max(0.0),
            Kind::Gaussian => {
                if u > TRUNCATION_U {
                    0.0
                } else {
                    self.amplitude * (-0.5 * u * u).exp()
                }
            }
            Kind::Indicator { .. } => unreachable!("indicator is not radial"),
        }
    }

    /// `phi'(rho)`; only for differentiable kinds (plus the triangle away
    /// from its kinks).
    fn profile_d1(&self, rho: f64) -> f64 {
        let r = self.radius;
        let u = rho / r;
        match &self.kind {
            Kind::SmoothBump => {
                if u >= 1.0 {
                    0.0
                } else {
                    let w = 1.0 - u * u;
                    -2.0 * self.amplitude * rho * (-1.0 / w).exp() / (w * w * r * r)
                }
            }
            Kind::PolyBump { m } => {
                if u >= 1.0 {
                    0.0
                } else {
                    -2.0 * (*m as f64) * self.amplitude * rho * (1.0 - u * u).powi(*m as i32 - 1)
                        / (r * r)
                }
            }
            Kind::Triangle => {
                if u >= 1.0 {
                    0.0
                } else {
                    -self.amplitude / r
                }
            }
            Kind::Gaussian => {
                if u > TRUNCATION_U {
                    0.0
                } else {
                    -self.amplitude * rho * (-0.5 * u * u).exp() / (r * r)
                }
            }
            Kind::Indicator { .. } => unreachable!(),
        }
    }

    /// `phi''(rho)` for the `C^2` kinds.
    fn profile_d2(&self, rho: f64) -> f64 {
        let r = self.radius;
        let u = rho / r;
        let u2 = u * u;
        match &self.kind {
            Kind::SmoothBump => {
                if u >= 1.0 {
                    0.0
                } else {
                    let w = 1.0 - u2;
                    let e = (-1.0 / w).exp();
                    -2.0 * self.amplitude / (r * r) * e
                        * (1.0 / (w * w) - 2.0 * u2 / (w * w * w * w) + 4.0 * u2 / (w * w * w))
                }
            }
            Kind::PolyBump { m } => {
                if u >= 1.0 {
                    0.0
                } else {
                    let mf = *m as f64;
                    -2.0 * mf * self.amplitude / (r * r)
                        * (1.0 - u2).powi(*m as i32 - 2)
                        * ((1.0 - u2) - 2.0 * (mf - 1.0) * u2)
                }
            }
            Kind::Gaussian => {
                if u > TRUNCATION_U {
                    0.0
                } else {
                    -self.amplitude / (r * r) * (-0.5 * u2).exp() * (1.0 - u2)
                }
            }
            Kind::Triangle | Kind::Indicator { .. } => unreachable!(),
        }
    }

    /// Exact gradient. Errors for the indicator and at triangle kinks;
    /// outside the support the gradient is the zero vector.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        match &self.kind {
            Kind::Indicator { .. } => Err(Error::GradientUnavailable(
                "indicator kind has no pointwise gradient".into(),
            )),
            Kind::Triangle => {
                let d = x[0] - self.center[0];
                if d == 0.0 || d.abs() == self.radius {
                    return Err(Error::GradientUnavailable("triangle kink".into()));
                }
                if d.abs() > self.radius {
                    return Ok(vec![0.0]);
                }
                Ok(vec![-self.amplitude * d.signum() / self.radius])
            }
            _ => {
                let rho = self.rho(x);
                if rho == 0.0 {
                    return Ok(vec![0.0; self.dim]);
                }
                let d1 = self.profile_d1(rho);
                Ok(x.iter()
                    .zip(&self.center)
                    .map(|(a, c)| d1 * (a - c) / rho)
                    .collect())
            }
        }
    }

    /// Sup-norm bounds from a dense radial grid of the exact derivatives
    /// (grid spacing `1e-3` of the support radius).
    pub fn smoothness_bounds(&self) -> Result<SmoothnessBounds> {
        match &self.kind {
            Kind::Indicator { .. } | Kind::Triangle => Err(Error::GradientUnavailable(
                "smoothness bounds need a C^2 kind".into(),
            )),
            _ => {
                let r_max = self.support_radius();
                let steps = 1000usize;
                let mut grad_sup: f64 = 0.0;
                let mut hess_sup: f64 = 0.0;
                for i in 0..=steps {
                    let rho = r_max * i as f64 / steps as f64;
                    let d1 = self.profile_d1(rho).abs();
                    let d2 = self.profile_d2(rho).abs();
                    grad_sup = grad_sup.max(d1);
                    hess_sup = hess_sup.max(d2);
                    if self.dim > 1 {
                        // Tangential Hessian eigenvalue phi'(rho)/rho.
                        let tangential = if rho == 0.0 {
                            self.profile_d2(0.0).abs()
                        } else {
                            d1 / rho
                        };
                        hess_sup = hess_sup.max(tangential);
                    }
                }
                Ok(SmoothnessBounds {
                    grad_sup,
                    hess_sup,
                    provenance: Provenance::Grid,
                })
            }
        }
    }

    /// `||f||_{L^p}^p`: closed-form for indicator, triangle, and gaussian;
    /// adaptive radial quadrature (relative tolerance 1e-8) for the bumps.
    pub fn lp_norm_pow(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::invalid("lp norm requires p >= 1"));
        }
        let a = self.amplitude.abs();
        match &self.kind {
            Kind::Indicator { region } => {
                let measure = region.volume_exact().ok_or_else(|| {
                    Error::invalid("indicator region volume has no closed form; use Monte Carlo")
                })?;
                Ok(a.powf(p) * measure)
            }
            Kind::Triangle => Ok(a.powf(p) * 2.0 * self.radius / (p + 1.0)),
            Kind::Gaussian => {
                let n = self.dim as f64;
                Ok(a.powf(p)
                    * (2.0 * std::f64::consts::PI * self.radius * self.radius / p).powf(0.5 * n))
            }
            _ => {
                let n = self.dim;
                let r = adaptive(
                    |rho| self.profile(rho).abs().powf(p) * rho.powi(n as i32 - 1),
                    0.0,
                    self.support_radius(),
                    1e-8,
                    1e-300,
                    2000,
                );
                Ok(sphere_surface_area(n) * r.value)
            }
        }
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        Ok(self.lp_norm_pow(p)?.powf(1.0 / p))
    }

    /// `||grad f||_{L^p}^p = int |grad f|^p dx` by radial quadrature.
    pub fn gradient_lp_norm_pow(&self, p: f64) -> Result<f64> {
        match &self.kind {
            Kind::Indicator { .. } => Err(Error::GradientUnavailable(
                "indicator kind has no gradient".into(),
            )),
            _ => {
                let n = self.dim;
                let r = adaptive(
                    |rho| self.profile_d1(rho).abs().powf(p) * rho.powi(n as i32 - 1),
                    0.0,
                    self.support_radius(),
                    1e-10,
                    1e-300,
                    2000,
                );
                Ok(sphere_surface_area(n) * r.value)
            }
        }
    }

    /// Convex superset of the support, with its center.
    pub fn support(&self) -> Support {
        match &self.kind {
            Kind::Indicator { region } => Support::new(region.clone(), self.center.clone()),
            _ => Support::new(
                ConvexBody::ball(self.dim, self.support_radius()).expect("valid ball"),
                self.center.clone(),
            ),
        }
    }

    /// Borrow this function as a bare evaluation + support pair.
    pub fn view(&self) -> FunctionView<'_> {
        FunctionView::new(self.support(), move |x: &[f64]| self.eval_raw(x))
    }

    /// Truncation `f_r = f . 1{gauge_K <= r}` (gauge about the origin) and
    /// remainder `g_r = f - f_r`. Both views keep the support superset of
    /// `f`, which stays valid for the estimators.
    pub fn truncate<'a>(
        &'a self,
        r: f64,
        body: &'a ConvexBody,
    ) -> Result<(FunctionView<'a>, FunctionView<'a>)> {
        if !(r > 0.0) {
            return Err(Error::invalid("truncation radius must be positive"));
        }
        if body.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: body.dim(),
            });
        }
        let inner = FunctionView::new(self.support(), move |x: &[f64]| {
            if body.gauge_raw(x) <= r {
                self.eval_raw(x)
            } else {
                0.0
            }
        });
        let outer = FunctionView::new(self.support(), move |x: &[f64]| {
            if body.gauge_raw(x) <= r {
                0.0
            } else {
                self.eval_raw(x)
            }
        });
        Ok((inner, outer))
    }
}

/// Gradient moment energy `int_{R^n} ||grad f(x)||^p_{Z_p^* K} dx`.
///
/// Radial factorization: for a radial `f`, the integral splits into a 1D
/// radial quadrature of `|phi'|^p rho^{n-1}` times the sphere integral of
/// the moment norm of directions. The sphere factor is closed-form when the
/// body admits one, a deterministic sphere quadrature when the moment norm
/// is closed-form but direction-dependent, and Monte Carlo otherwise (the
/// standard error is propagated).
pub fn grad_moment_energy(
    f: &TestFunction,
    body: &ConvexBody,
    p: f64,
    mc: &McConfig,
) -> Result<Estimate> {
    if body.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: body.dim(),
        });
    }
    if !(p >= 1.0) {
        return Err(Error::invalid("gradient energy requires p >= 1"));
    }
    if matches!(f.kind(), Kind::Indicator { .. }) {
        return Err(Error::GradientUnavailable(
            "indicator kind has no gradient".into(),
        ));
    }
    let n = f.dim();
    let radial = adaptive(
        |rho| f.profile_d1(rho).abs().powf(p) * rho.powi(n as i32 - 1),
        0.0,
        f.support_radius(),
        1e-10,
        1e-300,
        2000,
    )
    .value;
    let angular = sphere_moment_integral(body, p, mc)?;
    Ok(angular.scaled(radial))
}

/// `int_{S^{n-1}} ||w||^p_{Z_p^* K} dw`.
pub fn sphere_moment_integral(body: &ConvexBody, p: f64, mc: &McConfig) -> Result<Estimate> {
    let n = body.dim();
    let surf = sphere_surface_area(n);
    if let Some(value) = sphere_moment_closed(body, p) {
        return Ok(Estimate::exact(value));
    }
    // Full Monte Carlo over (direction, body point).
    let vol = body.volume(mc);
    let mean = crate::estimate::try_monte_carlo(mc.samples, mc.seed, |rng| {
        let w = crate::rng::unit_vector(rng, n);
        let y = body.sample_uniform(rng)?;
        Ok(w.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>().abs().powf(p))
    })?;
    Ok(mean
        .product(&vol)
        .scaled(surf * (n as f64 + p) / 2.0))
}

fn sphere_moment_closed(body: &ConvexBody, p: f64) -> Option<f64> {
    use crate::convex_body::Shape;
    let n = body.dim();
    let surf = sphere_surface_area(n);
    match body.shape() {
        Shape::Ball { radius } => Some(
            surf * radius.powf(n as f64 + p) * crate::convex_body::k_constant(p, n) / 2.0,
        ),
        Shape::Box { half_widths } => {
            if n == 1 {
                let c = half_widths[0];
                Some(2.0 * c.powf(p + 1.0))
            } else if (p - 2.0).abs() < 1e-12 {
                // int_S w_i^2 dw = surf / n.
                let vol: f64 = half_widths.iter().map(|h| 2.0 * h).product();
                let sum: f64 = half_widths.iter().map(|h| h * h / 3.0).sum();
                Some((n as f64 + 2.0) / 2.0 * vol * sum * surf / n as f64)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Deterministic quadrature over the unit sphere (midpoint in angle for
/// `n = 2`, Gauss-Legendre x azimuth midpoint for `n = 3`).
pub fn sphere_quadrature(n: usize, resolution: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    match n {
        1 => f(&[1.0]) + f(&[-1.0]),
        2 => {
            let m = resolution.max(8);
            let h = 2.0 * std::f64::consts::PI / m as f64;
            (0..m)
                .map(|i| {
                    let th = (i as f64 + 0.5) * h;
                    f(&[th.cos(), th.sin()])
                })
                .sum::<f64>()
                * h
        }
        3 => {
            // Midpoint in cos(polar) and azimuth; surface measure
            // factorizes as du d(azimuth) for u = cos(polar).
            let m_u = resolution.max(16) / 2;
            let m_a = resolution.max(16);
            let hu = 2.0 / m_u as f64;
            let ha = 2.0 * std::f64::consts::PI / m_a as f64;
            let mut acc = 0.0;
            for i in 0..m_u {
                let u = -1.0 + (i as f64 + 0.5) * hu;
                let s = (1.0 - u * u).sqrt();
                for j in 0..m_a {
                    let az = (j as f64 + 0.5) * ha;
                    acc += f(&[s * az.cos(), s * az.sin(), u]);
                }
            }
            acc * hu * ha
        }
        _ => panic!("sphere quadrature implemented for n <= 3"),
    }
}

/// A convex region containing a function's support, with translation.
#[derive(Debug, Clone)]
pub struct Support {
    body: ConvexBody,
    center: Vec<f64>,
}

impl Support {
    pub fn new(body: ConvexBody, center: Vec<f64>) -> Self {
        assert_eq!(body.dim(), center.len());
        Support { body, center }
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.body.contains(&shifted)
    }

    pub fn volume_exact(&self) -> Option<f64> {
        self.body.volume_exact()
    }

    pub fn volume(&self, mc: &McConfig) -> Estimate {
        self.body.volume(mc)
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Result<Vec<f64>> {
        let y = self.body.sample_uniform(rng)?;
        Ok(y.iter().zip(&self.center).map(|(a, c)| a + c).collect())
    }

    /// Exit parameter of the ray `x + t dir` from the region (`x` inside).
    pub fn ray_exit(&self, x: &[f64], dir: &[f64]) -> f64 {
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        self.body.ray_exit(&shifted, dir, 1.0)
    }

    /// Euclidean distance to the region (exact for balls and boxes, a ray
    /// upper bound otherwise).
    pub fn euclidean_distance(&self, x: &[f64]) -> f64 {
        use crate::convex_body::Shape;
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        match self.body.shape() {
            Shape::Ball { radius } => {
                (crate::convex_body::euclidean_norm(&shifted) - radius).max(0.0)
            }
            Shape::Box { half_widths } => shifted
                .iter()
                .zip(half_widths)
                .map(|(d, h)| (d.abs() - h).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt(),
            _ => {
                let g = self.body.gauge_raw(&shifted);
                if g <= 1.0 {
                    return 0.0;
                }
                // Boundary point along the segment to the center.
                let norm = crate::convex_body::euclidean_norm(&shifted);
                norm * (1.0 - 1.0 / g)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)` of the region.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.body.bounding_half_widths();
        let lo = self.center.iter().zip(&h).map(|(c, w)| c - w).collect();
        let hi = self.center.iter().zip(&h).map(|(c, w)| c + w).collect();
        (lo, hi)
    }
}

/// A bare evaluation with a known convex support superset. The level-set
/// and seminorm estimators work on views, so truncations and differences
/// plug into the same machinery as catalog members.
type EvalFn<'a> = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

#[derive(Clone)]
pub struct FunctionView<'a> {
    eval: EvalFn<'a>,
    support: Support,
}

impl<'a> FunctionView<'a> {
    pub fn new(support: Support, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'a) -> Self {
        FunctionView {
            eval: Arc::new(eval),
            support,
        }
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }
}

/// `||v||_{L^p}^p` of a view by nested adaptive quadrature over the support
/// bounding box (`n <= 3`).
pub fn view_lp_norm_pow(view: &FunctionView<'_>, p: f64, rel_tol: f64) -> Result<f64> {
    let n = view.dim();
    let (lo, hi) = view.support().bounding_box();
    let integrand = |x: &[f64]| view.value(x).abs().powf(p);
    match n {
        1 => Ok(adaptive_with_breakpoints(
            |x| integrand(&[x]),
            lo[0],
            hi[0],
            &[],
            rel_tol,
            1e-300,
            4000,
        )
        .value),
        2 => Ok(adaptive(
            |x0| {
                adaptive(
                    |x1| integrand(&[x0, x1]),
                    lo[1],
                    hi[1],
                    rel_tol * 0.3,
                    1e-300,
                    600,
                )
                .value
            },
            lo[0],
            hi[0],
            rel_tol,
            1e-300,
            600,
        )
        .value),
        3 => Ok(adaptive(
            |x0| {
                adaptive(
                    |x1| {
                        adaptive(
                            |x2| integrand(&[x0, x1, x2]),
                            lo[2],
                            hi[2],
                            rel_tol * 0.1,
                            1e-300,
                            200,
                        )
                        .value
                    },
                    lo[1],
                    hi[1],
                    rel_tol * 0.3,
                    1e-300,
                    200,
                )
                .value
            },
            lo[0],
            hi[0],
            rel_tol,
            1e-300,
            200,
        )
        .value),
        _ => Err(Error::invalid("view quadrature implemented for n <= 3")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn evaluate_examples() {
        let tri = TestFunction::triangle(1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(tri.evaluate(&[0.0]).unwrap(), 1.0);

        let pb = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        assert_relative_eq!(pb.evaluate(&[0.5]).unwrap(), 0.421875);

        let ind = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(ind.evaluate(&[2.0]).unwrap(), 0.0);
        assert_relative_eq!(ind.evaluate(&[0.5]).unwrap(), 1.0);
    }

    #[test]
    fn gradient_examples() {
        let pb = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        assert_relative_eq!(pb.gradient(&[0.5]).unwrap()[0], -1.6875, epsilon = 1e-12);
        // Outside the support the gradient vanishes.
        assert_eq!(pb.gradient(&[2.0]).unwrap(), vec![0.0]);

        let g = TestFunction::gaussian(2, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let grad = g.gradient(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(grad[0], -(-0.5_f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(grad[1], 0.0);

        let ind = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            ind.gradient(&[0.5]),
            Err(Error::GradientUnavailable(_))
        ));
        let tri = TestFunction::triangle(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            tri.gradient(&[0.0]),
            Err(Error::GradientUnavailable(_))
        ));
        assert_relative_eq!(tri.gradient(&[0.5]).unwrap()[0], -1.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let fs = [
            TestFunction::smooth_bump(2, 1.3, vec![0.2, -0.1], 1.5).unwrap(),
            TestFunction::poly_bump(2, 4, 0.7, vec![0.0, 0.0], 1.0).unwrap(),
            TestFunction::gaussian(2, 1.0, vec![0.1, 0.0], 0.8).unwrap(),
        ];
        let mut rng = stream_rng(42, 0);
        for f in &fs {
            let mut checked = 0;
            while checked < 1000 {
                let x: Vec<f64> = (0..2).map(|_| rng.random_range(-0.95..0.95)).collect();
                let rho = f.rho(&x);
                if rho < 1e-3 || rho > 0.95 * f.support_radius() {
                    continue;
                }
                let grad = f.gradient(&x).unwrap();
                let h = 1e-5;
                for i in 0..2 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (f.eval_raw(&xp) - f.eval_raw(&xm)) / (2.0 * h);
                    let scale = grad[i].abs().max(1e-4);
                    assert!(
                        (grad[i] - fd).abs() / scale < 1e-6 || (grad[i] - fd).abs() < 1e-9,
                        "grad {} vs fd {} at {:?}",
                        grad[i],
                        fd,
                        x
                    );
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let fs = [
            TestFunction::smooth_bump(1, 1.0, vec![0.0], 1.0).unwrap(),
            TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap(),
            TestFunction::gaussian(1, 2.0, vec![0.0], 1.3).unwrap(),
        ];
        for f in &fs {
            for i in 1..40 {
                let rho = 0.9 * f.support_radius().min(3.0) * i as f64 / 40.0;
                let h = 1e-4;
                let fd = (f.profile(rho + h) - 2.0 * f.profile(rho) + f.profile(rho - h)) / (h * h);
                let d2 = f.profile_d2(rho);
                assert!(
                    (d2 - fd).abs() < 1e-4 * d2.abs().max(1.0),
                    "{} vs {} at rho {}",
                    d2,
                    fd,
                    rho
                );
            }
        }
    }

    #[test]
    fn smoothness_bounds_values() {
        let tri = TestFunction::triangle(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            tri.smoothness_bounds(),
            Err(Error::GradientUnavailable(_))
        ));

        // max |6x(1-x^2)^2| on [0,1] = 96/(25 sqrt 5).
        let pb = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let b = pb.smoothness_bounds().unwrap();
        assert_relative_eq!(b.grad_sup, 96.0 / (25.0 * 5.0_f64.sqrt()), epsilon = 1e-5);

        let g = TestFunction::gaussian(1, 1.0, vec![0.0], 1.0).unwrap();
        let b = g.smoothness_bounds().unwrap();
        assert_relative_eq!(b.grad_sup, (-0.5_f64).exp(), epsilon = 1e-5);
        assert_relative_eq!(b.hess_sup, 1.0, epsilon = 1e-5);
        assert_eq!(b.provenance, Provenance::Grid);
    }

    #[test]
    fn taylor_bounds_hold_on_random_pairs() {
        // |f(x)-f(y)| <= a|x-y| and |f(y)-f(x)-grad f(x).(y-x)| <= b|x-y|^2.
        let fs = [
            TestFunction::smooth_bump(2, 1.0, vec![0.0, 0.0], 1.0).unwrap(),
            TestFunction::poly_bump(2, 3, 1.0, vec![0.0, 0.0], 1.0).unwrap(),
        ];
        let mut rng = stream_rng(7, 0);
        for f in &fs {
            let b = f.smoothness_bounds().unwrap();
            for _ in 0..10_000 {
                let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let y: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let dist = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                let df = (f.eval_raw(&x) - f.eval_raw(&y)).abs();
                assert!(df <= b.grad_sup * dist * 1.0001 + 1e-12);
                if f.rho(&x) > 1e-9 {
                    let grad = f.gradient(&x).unwrap();
                    let lin: f64 = grad
                        .iter()
                        .zip(x.iter().zip(&y))
                        .map(|(g, (xi, yi))| g * (xi - yi))
                        .sum();
                    let rem = (f.eval_raw(&x) - f.eval_raw(&y) - lin).abs();
                    assert!(
                        rem <= b.hess_sup * dist * dist * 1.0001 + 1e-12,
                        "rem {rem} vs b d^2 {}",
                        b.hess_sup * dist * dist
                    );
                }
            }
        }
    }

    #[test]
    fn lp_norms() {
        let ind = TestFunction::indicator_interval(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(ind.lp_norm(1.0).unwrap(), 1.0);

        // Triangle: int (1-|x|)^2 = 2/3, both closed form and quadrature.
        let tri = TestFunction::triangle(1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(tri.lp_norm_pow(2.0).unwrap(), 2.0 / 3.0, epsilon = 1e-12);

        // Gaussian closed form vs radial quadrature.
        let g = TestFunction::gaussian(2, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let closed = g.lp_norm_pow(2.0).unwrap();
        let quad = sphere_surface_area(2)
            * adaptive(
                |rho| g.profile(rho).powi(2) * rho,
                0.0,
                g.support_radius(),
                1e-10,
                1e-300,
                2000,
            )
            .value;
        assert_relative_eq!(closed, quad, epsilon = 1e-6);
        assert_relative_eq!(closed, std::f64::consts::PI, epsilon = 1e-9);
    }

    #[test]
    fn grad_moment_energy_examples() {
        let mc = McConfig::new(50_000, 3);
        // n=1, K=[-1,1], p=2, poly-bump m=3: exact 9216/3465.
        let pb = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let e = grad_moment_energy(&pb, &k, 2.0, &mc).unwrap();
        assert_relative_eq!(e.value, 9216.0 / 3465.0, epsilon = 1e-8);

        // n=2, K=B^2, p=2, radial bump: equals (pi/2) int |grad f|^2.
        let g = TestFunction::gaussian(2, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let e = grad_moment_energy(&g, &ball, 2.0, &mc).unwrap();
        let reference = 0.5 * std::f64::consts::PI * g.gradient_lp_norm_pow(2.0).unwrap();
        assert_relative_eq!(e.value, reference, epsilon = 1e-8);
    }

    #[test]
    fn grad_moment_energy_monte_carlo_fallback() {
        // lq ball with q = 2 is the Euclidean ball, but takes the Monte
        // Carlo sphere-moment path; it must agree with the closed form.
        let f = TestFunction::gaussian(2, 1.0, vec![0.0, 0.0], 1.0).unwrap();
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let lq = ConvexBody::lq_ball(2, 2.0, 1.0).unwrap();
        let mc = McConfig::new(200_000, 17);
        let exact = grad_moment_energy(&f, &ball, 1.5, &mc).unwrap();
        let sampled = grad_moment_energy(&f, &lq, 1.5, &mc).unwrap();
        assert_eq!(exact.stderr, 0.0);
        assert!(sampled.stderr > 0.0);
        assert!(
            (sampled.value - exact.value).abs() <= 3.0 * sampled.stderr,
            "{} +- {} vs exact {}",
            sampled.value,
            sampled.stderr,
            exact.value
        );
    }

    #[test]
    fn truncation_views() {
        let g = TestFunction::gaussian(1, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let (f_r, g_r) = g.truncate(10.0, &k).unwrap();
        // Support is truncated inside |x| <= 10, so the remainder vanishes.
        let gr_norm = view_lp_norm_pow(&g_r, 2.0, 1e-8).unwrap();
        assert!(gr_norm.sqrt() < 1e-10);

        // f_r + g_r = f pointwise.
        let mut rng = stream_rng(5, 0);
        for _ in 0..1000 {
            let x = [rng.random_range(-9.0..9.0)];
            let sum = f_r.value(&x) + g_r.value(&x);
            assert_relative_eq!(sum, g.eval_raw(&x), epsilon = 1e-15);
        }

        // Compactly supported f with r beyond the support: g_r = 0.
        let pb = TestFunction::poly_bump(1, 3, 1.0, vec![0.0], 1.0).unwrap();
        let (_, g_r) = pb.truncate(2.0, &k).unwrap();
        for i in 0..100 {
            let x = [-3.0 + 0.06 * i as f64];
            assert_eq!(g_r.value(&x), 0.0);
        }
    }

    #[test]
    fn truncation_norm_additivity() {
        // ||f_r||_p^p + ||g_r||_p^p = ||f||_p^p (disjoint supports).
        let g = TestFunction::gaussian(1, 1.0, vec![0.0], 1.0).unwrap();
        let k = ConvexBody::interval(1.0).unwrap();
        let (f_r, g_r) = g.truncate(1.5, &k).unwrap();
        let p = 2.0;
        let a = view_lp_norm_pow(&f_r, p, 1e-9).unwrap();
        let b = view_lp_norm_pow(&g_r, p, 1e-9).unwrap();
        let total = g.lp_norm_pow(p).unwrap();
        assert_relative_eq!(a + b, total, epsilon = 1e-6);
    }

    #[test]
    fn support_reports_truncation() {
        let g = TestFunction::gaussian(1, 1.0, vec![0.0], 1.0).unwrap();
        assert!(g.truncated());
        assert_relative_eq!(g.support_radius(), TRUNCATION_U);
        assert_eq!(g.eval_raw(&[TRUNCATION_U + 0.1]), 0.0);
        let s = g.support();
        assert!(s.contains(&[7.0]));
        assert!(!s.contains(&[7.6]));
    }
}
