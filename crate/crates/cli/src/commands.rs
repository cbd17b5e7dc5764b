use anyhow::{bail, ensure, Context, Result};
use hardedge::microlaw::micro_scale;
use hardedge::sampler::sample_batch_with;
use hardedge::stats::{build_histogram, ks_statistic, ks_statistic_with_threshold, linspace};
use hardedge::{EmpiricalSpectrum, EnsembleConfig, ExactLaw, KsReport, MicroConfig, MicroLaw, SampleBatch};
use serde::Serialize;
use std::cell::RefCell;

use crate::args::{BatchArgs, EnsembleArgs, ExactArgs, MicroArgs, Mode, SampleArgs, VerifyArgs};
use crate::output::{comment_block, emit, invocation, sibling, write_atomic, Csv};

pub const DEFAULT_U_MIN: f64 = 1e-3;

/// Whether a run succeeded or a verification came back negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Success,
    Rejected,
}

fn load_ensemble(args: &EnsembleArgs, n: usize) -> Result<(EmpiricalSpectrum, EnsembleConfig)> {
    let spectrum = EmpiricalSpectrum::from_path(&args.spectrum)
        .with_context(|| format!("cannot read spectrum file {}", args.spectrum.display()))?
        .with_context(|| format!("invalid spectrum file {}", args.spectrum.display()))?;
    if let Some(p) = args.p {
        ensure!(
            p == spectrum.len(),
            "--p {p} does not match the {} eigenvalues in {}",
            spectrum.len(),
            args.spectrum.display()
        );
    }
    let config = EnsembleConfig::new(args.beta, spectrum.len(), n)?;
    Ok((spectrum, config))
}

fn check_grid(name: &str, lo: f64, hi: f64, steps: usize) -> Result<()> {
    ensure!(
        lo.is_finite() && hi.is_finite(),
        "--{name}-min and --{name}-max must be finite"
    );
    ensure!(lo < hi, "--{name}-min ({lo}) must be below --{name}-max ({hi})");
    ensure!(steps >= 2, "--{name}-steps must be at least 2, got {steps}");
    Ok(())
}

fn ensemble_comment(spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> String {
    format!(
        "beta={} p={} n={} gamma={} spectrum_sha256={}",
        config.beta(),
        config.p(),
        config.n(),
        config.gamma(),
        spectrum.hash_hex()
    )
}

/// Where the gap probability first drops to 1e-4.
fn default_t_max(law: &ExactLaw) -> Result<f64> {
    let mut hi = 1.0 / law.decay();
    while law.gap_probability(hi)? > 1e-4 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if law.gap_probability(mid)? > 1e-4 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

pub fn exact(args: &ExactArgs) -> Result<Verdict> {
    let (spectrum, config) = load_ensemble(&args.ensemble, args.ensemble.n)?;
    let law = ExactLaw::new(&spectrum, &config)?;
    let t_max = match args.t_max {
        Some(t) => t,
        None => default_t_max(&law)?,
    };
    check_grid("t", args.t_min, t_max, args.t_steps)?;
    ensure!(args.t_min >= 0.0, "--t-min must be non-negative, got {}", args.t_min);

    let header = if args.c_normalization {
        "t,gap,pmin,t_over_n"
    } else {
        "t,gap,pmin"
    };
    let mut csv = Csv::new(&[invocation(), ensemble_comment(&spectrum, &config)], header);
    let mut fallbacks = 0;
    for t in linspace(args.t_min, t_max, args.t_steps) {
        let density = law.pmin_density(t)?;
        fallbacks += usize::from(density.finite_difference);
        let mut row = vec![t, law.gap_probability(t)?, density.value];
        if args.c_normalization {
            row.push(t / config.n() as f64);
        }
        csv.row(&row);
    }
    if fallbacks > 0 {
        eprintln!("warning: {fallbacks} density values came from a finite difference of the gap probability");
    }
    emit(args.out.as_deref(), &csv.into_string())?;
    Ok(Verdict::Success)
}

pub fn micro(args: &MicroArgs) -> Result<Verdict> {
    let micro = MicroConfig::new(args.beta, args.gamma)?;
    ensure!(args.u_min >= 0.0, "--u-min must be non-negative, got {}", args.u_min);
    let u_min = if args.u_min == 0.0 {
        eprintln!("warning: --u-min 0 is outside the domain, using {DEFAULT_U_MIN}");
        DEFAULT_U_MIN
    } else {
        args.u_min
    };
    check_grid("u", u_min, args.u_max, args.u_steps)?;
    let law = MicroLaw::new(micro);
    let comment = format!(
        "beta={} gamma={} kernel_dim={}",
        micro.beta(),
        micro.gamma(),
        micro.kernel_dim()
    );
    let mut csv = Csv::new(&[invocation(), comment], "u,gap,pmin");
    for u in linspace(u_min, args.u_max, args.u_steps) {
        csv.row(&[u, law.gap(u)?, law.pmin(u)?.value]);
    }
    emit(args.out.as_deref(), &csv.into_string())?;
    Ok(Verdict::Success)
}

fn draw(args: &BatchArgs) -> Result<(EmpiricalSpectrum, EnsembleConfig, SampleBatch)> {
    ensure!(args.count > 0, "--count must be at least 1");
    let (spectrum, config) = load_ensemble(&args.ensemble, args.ensemble.n)?;
    let batch = sample_batch_with(&spectrum, &config, args.count, args.seed, args.rotate)?;
    if batch.zero_count() > 0 {
        eprintln!("warning: {} samples underflowed to zero", batch.zero_count());
    }
    Ok((spectrum, config, batch))
}

#[derive(Serialize)]
struct SampleRecord {
    invocation: String,
    #[serde(flatten)]
    metadata: hardedge::sampler::BatchMetadata,
}

pub fn sample(args: &SampleArgs) -> Result<Verdict> {
    let (spectrum, config, batch) = draw(&args.batch)?;
    let mut text = comment_block(&[
        invocation(),
        format!(
            "{} seed={} count={}",
            ensemble_comment(&spectrum, &config),
            batch.seed(),
            batch.count()
        ),
    ]);
    text.push_str(&batch.to_csv());
    let record = SampleRecord {
        invocation: invocation(),
        metadata: batch.metadata(),
    };
    write_atomic(&args.out, &text)?;
    write_atomic(&sibling(&args.out, "json"), &serde_json::to_string_pretty(&record)?)?;
    Ok(Verdict::Success)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    invocation: String,
    mode: &'a str,
    beta: u32,
    p: usize,
    n: usize,
    law_n: usize,
    count: usize,
    seed: u64,
    rotated: bool,
    spectrum_sha256: String,
    /// Set when `--ks-threshold` replaced the asymptotic Kolmogorov value.
    threshold_override: Option<f64>,
    ks: KsReport,
    histogram: String,
}

/// A cumulative law and its survival function in the sampled variable.
enum Reference {
    Exact(ExactLaw),
    Micro(MicroLaw),
}

impl Reference {
    fn survival(&self, x: f64) -> hardedge::Result<f64> {
        match self {
            Self::Exact(law) => law.gap_probability(x),
            Self::Micro(_) if x <= 0.0 => Ok(1.0),
            Self::Micro(law) => law.gap(x),
        }
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Verdict> {
    let (spectrum, config, batch) = draw(&args.batch)?;
    ensure!(
        args.alpha > 0.0 && args.alpha < 1.0,
        "--alpha must lie in (0, 1), got {}",
        args.alpha
    );
    ensure!(args.bins > 0, "--bins must be at least 1");
    let law_n = args.law_n.unwrap_or(config.n());
    let law_config = EnsembleConfig::new(config.beta(), config.p(), law_n)
        .with_context(|| format!("--law-n {law_n} is not a valid column count"))?;
    let (reference, values) = match args.mode {
        Mode::Exact => (
            Reference::Exact(ExactLaw::new(&spectrum, &law_config)?),
            batch.values().to_vec(),
        ),
        Mode::Micro => {
            let scale = micro_scale(&spectrum);
            (
                Reference::Micro(MicroLaw::new(MicroConfig::from_ensemble(&law_config))),
                batch.values().iter().map(|t| t * scale).collect(),
            )
        }
    };

    let failure = RefCell::new(None);
    let cdf = |x: f64| match reference.survival(x) {
        Ok(e) => 1.0 - e,
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            f64::NAN
        }
    };
    let ks = match args.ks_threshold {
        Some(threshold) => ks_statistic_with_threshold(&values, cdf, args.alpha, threshold)?,
        None => ks_statistic(&values, cdf, args.alpha)?,
    };
    if let Some(err) = failure.into_inner() {
        bail!(err);
    }

    let histogram_path = sibling(&args.out, "hist.csv");
    write_atomic(&histogram_path, &histogram_csv(&values, args.bins, &reference)?)?;
    let report = VerifyReport {
        invocation: invocation(),
        mode: match args.mode {
            Mode::Exact => "exact",
            Mode::Micro => "micro",
        },
        beta: config.beta(),
        p: config.p(),
        n: config.n(),
        law_n,
        count: batch.count(),
        seed: batch.seed(),
        rotated: args.batch.rotate,
        spectrum_sha256: spectrum.hash_hex(),
        threshold_override: args.ks_threshold,
        ks,
        histogram: histogram_path.display().to_string(),
    };
    write_atomic(&args.out, &serde_json::to_string_pretty(&report)?)?;
    eprintln!(
        "KS statistic {:.6} against threshold {:.6}: {}",
        report.ks.statistic,
        report.ks.threshold,
        if report.ks.pass { "pass" } else { "fail" }
    );
    Ok(if report.ks.pass {
        Verdict::Success
    } else {
        Verdict::Rejected
    })
}

/// Empirical densities next to the bin averages of the analytic density.
fn histogram_csv(values: &[f64], bins: usize, reference: &Reference) -> Result<String> {
    let h = build_histogram(values, bins)?;
    let mut csv = Csv::new(&[invocation()], "left,right,center,density,analytic");
    for (w, &density) in h.edges.windows(2).zip(&h.densities) {
        let analytic = (reference.survival(w[0])? - reference.survival(w[1])?) / (w[1] - w[0]);
        csv.row(&[w[0], w[1], 0.5 * (w[0] + w[1]), density, analytic]);
    }
    Ok(csv.into_string())
}
