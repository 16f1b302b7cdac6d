//! Numerical heat-kernel checks for the flat model C^n: Gaussian kernels,
//! twisted supertraces against a smooth cutoff, and small-time limits
//! compared to the exact det factor from the gamma-trace.

use crate::CoreError;
use num_complex::Complex64;

/// Quadrature and schedule configuration for the flat-model checks.
#[derive(Clone, Debug)]
pub struct HeatConfig {
    /// Complex dimension (1 or 2).
    pub n: usize,
    /// Decreasing positive times.
    pub t_schedule: Vec<f64>,
    /// Half-width of the integration box [-radius, radius]^{2n}.
    pub radius: f64,
    pub points_per_axis: usize,
    /// The radial cutoff is 1 inside cutoff_inner and 0 outside cutoff_outer.
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
}

impl HeatConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.n == 1 || self.n == 2) {
            return Err(CoreError::GridResolution("n must be 1 or 2".into()));
        }
        if self.t_schedule.is_empty() || self.t_schedule.iter().any(|&t| t <= 0.0) {
            return Err(CoreError::GridResolution("need positive times".into()));
        }
        if self.t_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CoreError::GridResolution("t schedule must decrease".into()));
        }
        let tmax = self.t_schedule[0];
        let tmin = *self.t_schedule.last().unwrap();
        if self.radius < 8.0 * tmax.sqrt() {
            return Err(CoreError::GridResolution(format!(
                "radius {} under 8 sqrt(max t) = {}",
                self.radius,
                8.0 * tmax.sqrt()
            )));
        }
        let spacing = self.spacing();
        if spacing > tmin.sqrt() / 4.0 {
            return Err(CoreError::GridResolution(format!(
                "spacing {} over sqrt(min t)/4 = {}",
                spacing,
                tmin.sqrt() / 4.0
            )));
        }
        if !(0.0 < self.cutoff_inner
            && self.cutoff_inner < self.cutoff_outer
            && self.cutoff_outer <= self.radius)
        {
            return Err(CoreError::GridResolution("cutoff radii out of order".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.points_per_axis as f64 - 1.0)
    }

    /// A sensible default for one complex dimension.
    pub fn default_1d() -> Self {
        HeatConfig {
            n: 1,
            t_schedule: vec![4e-3, 2e-3, 1e-3, 5e-4],
            radius: 0.52,
            points_per_axis: 209,
            cutoff_inner: 0.3,
            cutoff_outer: 0.5,
        }
    }

    /// The smooth radial bump of the configuration.
    pub fn ball_cutoff(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        let inner = self.cutoff_inner;
        let outer = self.cutoff_outer;
        move |x: &[f64]| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            bump(r, inner, outer)
        }
    }
}

fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth transition: 1 for r <= inner, 0 for r >= outer.
pub fn bump(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        return 1.0;
    }
    if r >= outer {
        return 0.0;
    }
    let s = (r - inner) / (outer - inner);
    let a = smooth_step(1.0 - s);
    let b = smooth_step(s);
    a / (a + b)
}

/// Flat heat kernel (pi t)^{-n} exp(-|x - y|^2 / t) on R^{2n}.
pub fn heat_kernel(t: f64, x: &[f64], y: &[f64], n: usize) -> f64 {
    assert_eq!(x.len(), 2 * n);
    assert_eq!(y.len(), 2 * n);
    let d2: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    (std::f64::consts::PI * t).powi(-(n as i32)) * (-d2 / t).exp()
}

fn apply_inverse_rotation(lambdas: &[Complex64], x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for (i, l) in lambdas.iter().enumerate() {
        let z = Complex64::new(x[2 * i], x[2 * i + 1]) / l;
        out.push(z.re);
        out.push(z.im);
    }
    out
}

/// Supertrace factor over the antiholomorphic exterior algebra:
/// prod_i (1 - conj(lambda_i)^{-1}).
pub fn str_factor(lambdas: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for l in lambdas {
        acc *= Complex64::new(1.0, 0.0) - 1.0 / l.conj();
    }
    acc
}

/// Quadrature of str(gamma) * int phi(x) k_t(gamma^{-1} x, x) dx over the box.
pub fn twisted_supertrace(
    lambdas: &[Complex64],
    phi: &dyn Fn(&[f64]) -> f64,
    t: f64,
    cfg: &HeatConfig,
) -> Result<Complex64, CoreError> {
    cfg.validate()?;
    if lambdas.len() != cfg.n {
        return Err(CoreError::DimensionMismatch);
    }
    if lambdas
        .iter()
        .any(|l| (l - Complex64::new(1.0, 0.0)).norm() < 1e-12)
    {
        return Err(CoreError::UntwistedDirection);
    }
    let dims = 2 * cfg.n;
    let np = cfg.points_per_axis;
    let h = cfg.spacing();
    let coord = |i: usize| -cfg.radius + h * i as f64;
    let mut sum = 0.0f64;
    let mut idx = vec![0usize; dims];
    let mut x = vec![0.0f64; dims];
    loop {
        for d in 0..dims {
            x[d] = coord(idx[d]);
        }
        let w = phi(&x);
        if w != 0.0 {
            let gx = apply_inverse_rotation(lambdas, &x);
            sum += w * heat_kernel(t, &gx, &x, cfg.n);
        }
        // odometer over the grid
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < np {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                return Ok(str_factor(lambdas) * sum * h.powi(dims as i32));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// (t, quadrature value) along the schedule.
    pub values: Vec<(f64, Complex64)>,
    pub extrapolated: Complex64,
    /// Fitted order in t, when the errors sit above the 1e-9 floor.
    pub observed_order: Option<f64>,
    pub target: Complex64,
    pub monotone: bool,
    pub pass: bool,
}

/// Runs the t-schedule and compares against the exact limit (the det factor
/// embedded into C). Errors below 1e-9 are treated as converged; the
/// quadrature saturates there and no order is observable.
pub fn smalltime_limit(
    lambdas: &[Complex64],
    phi: &dyn Fn(&[f64]) -> f64,
    cfg: &HeatConfig,
    target: Complex64,
    tol: f64,
) -> Result<ConvergenceReport, CoreError> {
    cfg.validate()?;
    if cfg.t_schedule.len() < 4 {
        return Err(CoreError::GridResolution("need at least 4 times".into()));
    }
    let mut values = Vec::new();
    for &t in &cfg.t_schedule {
        values.push((t, twisted_supertrace(lambdas, phi, t, cfg)?));
    }
    let errs: Vec<f64> = values.iter().map(|(_, v)| (v - target).norm()).collect();
    let floor = 1e-9;
    let monotone = errs
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] < floor);
    // linear-in-t extrapolation from the two smallest times
    let m = values.len();
    let (t0, v0) = values[m - 2];
    let (t1, v1) = values[m - 1];
    let extrapolated = v1 + (v1 - v0) * (t1 / (t0 - t1));
    let observed_order = if errs.iter().all(|&e| e < floor) {
        None
    } else {
        let pts: Vec<(f64, f64)> = values
            .iter()
            .zip(errs.iter())
            .filter(|(_, &e)| e > floor)
            .map(|((t, _), &e)| (t.ln(), e.ln()))
            .collect();
        if pts.len() < 2 {
            None
        } else {
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
        }
    };
    let final_err = *errs.last().unwrap();
    let order_ok = match observed_order {
        None => true,
        Some(p) => p >= 1.0,
    };
    let pass = monotone && final_err < tol && order_ok;
    Ok(ConvergenceReport {
        values,
        extrapolated,
        observed_order,
        target,
        monotone,
        pass,
    })
}
