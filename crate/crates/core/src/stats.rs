//! Goodness-of-fit tools for comparing sampled batches with analytic laws.

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of a one-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub alpha: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Asymptotic Kolmogorov coefficient `c(α)` with `D < c(α)/√N`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    if alpha == 0.01 {
        1.63
    } else if alpha == 0.05 {
        1.36
    } else {
        (-(0.5 * alpha).ln() / 2.0).sqrt()
    }
}

/// `D = sup |F_N − F|` for ascending samples, tested at significance `alpha`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted_samples: &[f64], cdf: F, alpha: f64) -> Result<KsReport> {
    let n = sorted_samples.len();
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let threshold = ks_coefficient(alpha) / (n as f64).sqrt();
    ks_statistic_with_threshold(sorted_samples, cdf, alpha, threshold)
}

/// As [`ks_statistic`] but with an explicit pass threshold on `D`.
pub fn ks_statistic_with_threshold<F: Fn(f64) -> f64>(
    sorted_samples: &[f64],
    cdf: F,
    alpha: f64,
    threshold: f64,
) -> Result<KsReport> {
    let n = sorted_samples.len();
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    if sorted_samples.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("samples must be sorted ascending".into()));
    }
    let nf = n as f64;
    let statistic = sorted_samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max);
    Ok(KsReport {
        statistic,
        n,
        alpha,
        threshold,
        pass: statistic < threshold,
    })
}

/// Equal-width, density-normalized histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub count: usize,
}

impl Histogram {
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| w[1] - w[0])
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// `Σ density · width`.
    pub fn mass(&self) -> f64 {
        self.densities.iter().zip(self.widths()).map(|(d, w)| d * w).sum()
    }
}

/// Histogram over `[min, max]` of the samples with `bin_count` bins.
pub fn build_histogram(samples: &[f64], bin_count: usize) -> Result<Histogram> {
    if samples.len() < 2 {
        return Err(Error::Domain("a histogram needs at least two samples".into()));
    }
    if bin_count == 0 {
        return Err(Error::Domain("bin count must be at least 1".into()));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::DegenerateSamples);
    }
    let width = (hi - lo) / bin_count as f64;
    let mut edges: Vec<f64> = (0..=bin_count).map(|k| lo + k as f64 * width).collect();
    edges[bin_count] = hi;
    let mut counts = vec![0usize; bin_count];
    for &x in samples {
        let k = (((x - lo) / width) as usize).min(bin_count - 1);
        counts[k] += 1;
    }
    let total = samples.len() as f64;
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (total * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        edges,
        densities,
        count: samples.len(),
    })
}

/// Difference formula used by [`DerivativeCheck`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// `(f(t+h) − f(t−h)) / 2h`, error `O(h²)`.
    #[default]
    ThreePoint,
    /// `(f(t−2h) − 8f(t−h) + 8f(t+h) − f(t+2h)) / 12h`, error `O(h⁴)`.
    FivePoint,
}

/// Checks `g ≈ −f'` by central differences on a grid inside `[0, ∞)`.
///
/// Points too close to zero for the central stencil fall back to a one-sided
/// stencil of the same order.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeCheck {
    /// Step relative to `max(|t|, t_scale)`.
    pub rel_step: f64,
    /// Lower bound of the step scale, defaulting to the largest grid point.
    pub t_scale: Option<f64>,
    /// Relative errors are measured against `max(|g|, floor · max_grid |g|)`.
    pub relative_floor: f64,
    pub stencil: Stencil,
}

impl DerivativeCheck {
    pub fn new(rel_step: f64) -> Self {
        Self {
            rel_step,
            t_scale: None,
            relative_floor: 1e-3,
            stencil: Stencil::ThreePoint,
        }
    }

    pub fn with_t_scale(mut self, t_scale: f64) -> Self {
        self.t_scale = Some(t_scale);
        self
    }

    pub fn with_relative_floor(mut self, floor: f64) -> Self {
        self.relative_floor = floor;
        self
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    /// Maximum relative discrepancy between `g(t)` and `−f'(t)` on `grid`.
    pub fn max_error<F, G>(&self, f: F, g: G, grid: &[f64]) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
        G: Fn(f64) -> Result<f64>,
    {
        if grid.is_empty() {
            return Err(Error::EmptySamples);
        }
        if !(self.rel_step > 0.0) {
            return Err(Error::Domain("rel_step must be > 0".into()));
        }
        let t_scale = self
            .t_scale
            .unwrap_or_else(|| grid.iter().map(|t| t.abs()).fold(0.0, f64::max));
        let gs = grid.iter().map(|&t| g(t)).collect::<Result<Vec<f64>>>()?;
        let peak = gs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let floor = (self.relative_floor * peak).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for (&t, &gt) in grid.iter().zip(&gs) {
            let h = self.rel_step * t.abs().max(t_scale);
            let derivative = match self.stencil {
                Stencil::ThreePoint if t - h >= 0.0 => (f(t + h)? - f(t - h)?) / (2.0 * h),
                Stencil::ThreePoint => (-3.0 * f(t)? + 4.0 * f(t + h)? - f(t + 2.0 * h)?) / (2.0 * h),
                Stencil::FivePoint if t - 2.0 * h >= 0.0 => {
                    (f(t - 2.0 * h)? - 8.0 * f(t - h)? + 8.0 * f(t + h)? - f(t + 2.0 * h)?) / (12.0 * h)
                }
                Stencil::FivePoint => {
                    (-25.0 * f(t)? + 48.0 * f(t + h)? - 36.0 * f(t + 2.0 * h)? + 16.0 * f(t + 3.0 * h)?
                        - 3.0 * f(t + 4.0 * h)?)
                        / (12.0 * h)
                }
            };
            let err = (gt + derivative).abs() / gt.abs().max(floor);
            worst = worst.max(err);
        }
        Ok(worst)
    }
}

/// [`DerivativeCheck`] with default floor and step scale.
pub fn derivative_check<F, G>(f: F, g: G, grid: &[f64], rel_step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> Result<f64>,
{
    DerivativeCheck::new(rel_step).max_error(f, g, grid)
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (steps - 1) as f64;
            let mut v: Vec<f64> = (0..steps).map(|k| lo + k as f64 * step).collect();
            v[steps - 1] = hi;
            v
        }
    }
}
