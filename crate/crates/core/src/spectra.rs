//! Population spectra, ensemble parameters and the symmetric functions of `Λ`
//! used by the analytic laws.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::SignedLog;

/// Population eigenvalues `Λ₁ … Λ_p`, kept in the order given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EmpiricalSpectrum {
    lambdas: Vec<f64>,
}

impl EmpiricalSpectrum {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidSpectrum("at least one eigenvalue is required".into()));
        }
        if let Some((i, &x)) = lambdas.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalue #{} = {x} is not strictly positive and finite",
                i + 1
            )));
        }
        Ok(Self { lambdas })
    }

    /// `p` copies of the same eigenvalue.
    pub fn constant(p: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; p])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every eigenvalue multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.lambdas.iter().map(|x| x * c).collect())
    }

    pub fn log_det(&self) -> f64 {
        self.sorted().iter().map(|x| x.ln()).sum()
    }

    /// Ascending copy. Symmetric functions are accumulated in this order so
    /// that they are bit-identical for every permutation of the input.
    pub(crate) fn sorted(&self) -> Vec<f64> {
        let mut v = self.lambdas.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Hex SHA-256 of the little-endian bit patterns, used to tag sample batches.
    pub fn hash_hex(&self) -> String {
        let mut hasher = Sha256::new();
        for x in &self.lambdas {
            hasher.update(x.to_bits().to_le_bytes());
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Reads the plain-text spectrum format: one positive decimal per line,
    /// blank lines and `#` comments ignored.
    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(text.parse())
    }
}

impl FromStr for EmpiricalSpectrum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lambdas = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line
                .parse()
                .map_err(|_| Error::InvalidSpectrum(format!("line {}: cannot parse {line:?}", lineno + 1)))?;
            lambdas.push(value);
        }
        Self::new(lambdas)
    }
}

impl fmt::Display for EmpiricalSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.lambdas {
            writeln!(f, "{x}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for EmpiricalSpectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EmpiricalSpectrum> for Vec<f64> {
    fn from(s: EmpiricalSpectrum) -> Self {
        s.lambdas
    }
}

/// Dyson index, matrix shape and the derived rectangularity parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    beta: u32,
    p: usize,
    n: usize,
    gamma: usize,
    kernel_dim: usize,
}

impl EnsembleConfig {
    /// Validates `(β, p, n)` and derives `γ = β(n−p+1)/2 − 1` and the kernel
    /// dimension `2γ/β`.
    pub fn new(beta: u32, p: usize, n: usize) -> Result<Self> {
        if beta != 1 && beta != 2 {
            return Err(Error::InvalidBeta(beta));
        }
        if p == 0 || p > n {
            return Err(Error::InvalidDimensions { p, n });
        }
        let gamma = if beta == 1 {
            let excess = n - p;
            if excess == 0 || (excess - 1) % 2 != 0 {
                return Err(Error::HalfIntegerGamma { p, n });
            }
            (excess - 1) / 2
        } else {
            n - p
        };
        Ok(Self {
            beta,
            p,
            n,
            gamma,
            kernel_dim: 2 * gamma / beta as usize,
        })
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub(crate) fn half_beta(&self) -> f64 {
        self.beta as f64 / 2.0
    }
}

/// `e_0 … e_p` of the spectrum, by multiplying out `∏ (1 + Λ_i x)`.
pub fn elementary_symmetric(spectrum: &EmpiricalSpectrum) -> Vec<f64> {
    let lambdas = spectrum.sorted();
    let mut e = vec![0.0; lambdas.len() + 1];
    e[0] = 1.0;
    for (m, &x) in lambdas.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// [`elementary_symmetric`] in overflow-safe arithmetic, for large `p`.
pub fn elementary_symmetric_log(spectrum: &EmpiricalSpectrum) -> Vec<SignedLog> {
    let lambdas = spectrum.sorted();
    let mut e = vec![SignedLog::ZERO; lambdas.len() + 1];
    e[0] = SignedLog::ONE;
    for (m, &x) in lambdas.iter().enumerate() {
        let x = SignedLog::from_f64(x);
        for k in (1..=m + 1).rev() {
            e[k] = e[k] + x * e[k - 1];
        }
    }
    e
}

/// Microscopic scale `η = (1/p) Σ 1/Λ_k`.
pub fn eta_scale(spectrum: &EmpiricalSpectrum) -> f64 {
    inverse_trace(spectrum) / spectrum.len() as f64
}

/// `(β/2) Σ 1/Λ_k`, the decay rate of the exponential prefactor.
pub fn inverse_trace_half_beta(spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> f64 {
    config.half_beta() * inverse_trace(spectrum)
}

fn inverse_trace(spectrum: &EmpiricalSpectrum) -> f64 {
    spectrum.sorted().iter().map(|x| 1.0 / x).sum()
}
