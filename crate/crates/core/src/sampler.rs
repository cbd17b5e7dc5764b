//! Seeded Monte Carlo sampling of the correlated Wishart ensemble.
//!
//! Every sample owns a ChaCha stream selected by `(seed, sample index)`, so a
//! batch is bit-reproducible no matter how the work is scheduled.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, ComplexMatrix, Matrix, RealMatrix, Scalar};
use crate::spectra::{EmpiricalSpectrum, EnsembleConfig};

/// Counter-based random stream identified by `(seed, stream_index)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Position in the key stream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals by Box–Muller.
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        // 1 - u1 lies in (0, 1], so the log is finite.
        let r = (-2.0 * libm::log(1.0 - u1)).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * libm::cos(theta), r * libm::sin(theta))
    }
}

/// A sampled `p × n` data matrix, real for `β = 1` and complex for `β = 2`.
#[derive(Debug, Clone, PartialEq)]
pub enum DataMatrix {
    Real(RealMatrix),
    Complex(ComplexMatrix),
}

impl DataMatrix {
    pub fn rows(&self) -> usize {
        match self {
            Self::Real(m) => m.rows(),
            Self::Complex(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Real(m) => m.cols(),
            Self::Complex(m) => m.cols(),
        }
    }

    /// `λ_min(WW†) = σ_min(W)²`.
    pub fn smallest_gram_eigenvalue(&self) -> f64 {
        let s = match self {
            Self::Real(m) => singular_values(m),
            Self::Complex(m) => singular_values(m),
        }
        .expect("sampled matrices have p <= n");
        s[0] * s[0]
    }
}

/// Draws `W` with independent rows, row `j` having entry variance `Λ_j`
/// (split evenly between real and imaginary parts for `β = 2`). This is the
/// Gaussian ensemble written in the eigenbasis of the population matrix.
pub fn sample_wishart(
    spectrum: &EmpiricalSpectrum,
    config: &EnsembleConfig,
    stream: &mut RngStream,
) -> Result<DataMatrix> {
    check_spectrum(spectrum, config)?;
    let (p, n) = (config.p(), config.n());
    Ok(match config.beta() {
        1 => {
            let mut data = Vec::with_capacity(p * n);
            for &lambda in spectrum.lambdas() {
                let sd = lambda.sqrt();
                let mut j = 0;
                while j < n {
                    let (a, b) = stream.gaussian_pair();
                    data.push(sd * a);
                    if j + 1 < n {
                        data.push(sd * b);
                    }
                    j += 2;
                }
            }
            DataMatrix::Real(Matrix::from_row_major(p, n, data)?)
        }
        _ => {
            let mut data = Vec::with_capacity(p * n);
            for &lambda in spectrum.lambdas() {
                let sd = (0.5 * lambda).sqrt();
                for _ in 0..n {
                    let (a, b) = stream.gaussian_pair();
                    data.push(Complex64::new(sd * a, sd * b));
                }
            }
            DataMatrix::Complex(Matrix::from_row_major(p, n, data)?)
        }
    })
}

/// Haar-distributed orthogonal (`f64`) or unitary (`Complex64`) matrix, by
/// Gram–Schmidt on a Gaussian matrix.
pub fn haar_matrix<T: Scalar + GaussianEntry>(n: usize, stream: &mut RngStream) -> Matrix<T> {
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<T> = (0..n).map(|_| T::gaussian(stream)).collect();
        for _ in 0..2 {
            for q in &cols {
                let mut dot = T::ZERO;
                for (&qi, &vi) in q.iter().zip(&v) {
                    dot += qi.conj() * vi;
                }
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x.abs2()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x = x.scale(1.0 / norm));
        cols.push(v);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Entry type that can be drawn from a standard (complex) normal.
pub trait GaussianEntry {
    fn gaussian(stream: &mut RngStream) -> Self;
}

impl GaussianEntry for f64 {
    fn gaussian(stream: &mut RngStream) -> Self {
        stream.gaussian_pair().0
    }
}

impl GaussianEntry for Complex64 {
    fn gaussian(stream: &mut RngStream) -> Self {
        let (a, b) = stream.gaussian_pair();
        Complex64::new(a, b)
    }
}

/// Right-multiplies `W` by a Haar matrix drawn from `stream`. The spectrum of
/// `WW†` is unchanged; this only exercises that invariance.
pub fn rotate_right(w: &DataMatrix, stream: &mut RngStream) -> DataMatrix {
    match w {
        DataMatrix::Real(m) => {
            let u: RealMatrix = haar_matrix(m.cols(), stream);
            DataMatrix::Real(m.matmul(&u).expect("square rotation"))
        }
        DataMatrix::Complex(m) => {
            let u: ComplexMatrix = haar_matrix(m.cols(), stream);
            DataMatrix::Complex(m.matmul(&u).expect("square rotation"))
        }
    }
}

fn check_spectrum(spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> Result<()> {
    if spectrum.len() != config.p() {
        return Err(Error::SpectrumMismatch {
            spectrum: spectrum.len(),
            p: config.p(),
        });
    }
    Ok(())
}

/// Sorted smallest eigenvalues of `WW†` from independent samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    config: EnsembleConfig,
    spectrum_hash: String,
    seed: u64,
    rotated: bool,
}

/// Side record written next to an exported batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchMetadata {
    pub seed: u64,
    pub beta: u32,
    pub p: usize,
    pub n: usize,
    pub spectrum_hash: String,
    pub count: usize,
    pub rotated: bool,
    pub zero_values: usize,
}

impl SampleBatch {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spectrum_hash(&self) -> &str {
        &self.spectrum_hash
    }

    /// Samples whose `σ_min²` underflowed to zero. Nonzero only in
    /// pathological cases when `p < n`.
    pub fn zero_count(&self) -> usize {
        self.values.iter().take_while(|&&x| x == 0.0).count()
    }

    pub fn metadata(&self) -> BatchMetadata {
        BatchMetadata {
            seed: self.seed,
            beta: self.config.beta(),
            p: self.config.p(),
            n: self.config.n(),
            spectrum_hash: self.spectrum_hash.clone(),
            count: self.count(),
            rotated: self.rotated,
            zero_values: self.zero_count(),
        }
    }

    /// CSV with header `index,lambda_min`, values in ascending order.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.values.len() + 1));
        out.push_str("index,lambda_min\n");
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{i},{v:e}").expect("write to string");
        }
        out
    }
}

/// `count` smallest eigenvalues, sample `k` drawn from stream `(seed, k)`.
pub fn sample_batch(
    spectrum: &EmpiricalSpectrum,
    config: &EnsembleConfig,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_batch_with(spectrum, config, count, seed, false)
}

/// As [`sample_batch`], optionally rotating each `W` by a Haar matrix first.
pub fn sample_batch_with(
    spectrum: &EmpiricalSpectrum,
    config: &EnsembleConfig,
    count: usize,
    seed: u64,
    rotate: bool,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    check_spectrum(spectrum, config)?;
    let mut values = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = RngStream::new(seed, k);
            let w = sample_wishart(spectrum, config, &mut stream)?;
            let w = if rotate { rotate_right(&w, &mut stream) } else { w };
            Ok(w.smallest_gram_eigenvalue())
        })
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    Ok(SampleBatch {
        values,
        config: *config,
        spectrum_hash: spectrum.hash_hex(),
        seed,
        rotated: rotate,
    })
}
