//! Universal hard-edge laws on the microscopic scale `u = 4pη·t`.
//!
//! In the limit `p, n → ∞` with `n − p` fixed, the gap probability and the
//! smallest-eigenvalue density no longer depend on `Λ` once `t` is measured
//! in units of `1/(4pη)`, `η = tr Λ⁻¹ / p`. Both are small determinants of
//! Bessel kernels
//!
//! ```text
//! L^(l)_ij(u) = (u/4)^{(i+j−κ')/2} · I_{κ'+δ_{il}−i−j}(√u),   κ' = 2(γ+1)/β.
//! ```

use crate::error::{Error, Result};
use crate::exactlaw::{five_point_derivative, sum_row_replaced_dets, ExactLaw};
use crate::linalg::{logdet_lu, logdet_lu_with_error, sqrt_det_antisymmetric, SignedLogMatrix, UNRELIABLE_DET_ERROR};
use crate::numerics::{bessel_i_scaled, SignedLog};
use crate::spectra::{eta_scale, EmpiricalSpectrum, EnsembleConfig};
use crate::Density;

const FALLBACK_REL_STEP: f64 = 1e-3;

/// Parameters of the microscopic limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MicroConfig {
    beta: u32,
    gamma: usize,
    kappa_prime: usize,
    kernel_dim: usize,
}

impl MicroConfig {
    pub fn new(beta: u32, gamma: usize) -> Result<Self> {
        if beta != 1 && beta != 2 {
            return Err(Error::InvalidBeta(beta));
        }
        let b = beta as usize;
        Ok(Self {
            beta,
            gamma,
            kappa_prime: 2 * (gamma + 1) / b,
            kernel_dim: 2 * gamma / b,
        })
    }

    /// The limit reached by a finite ensemble with the same `β` and `n − p`.
    pub fn from_ensemble(config: &EnsembleConfig) -> Self {
        Self::new(config.beta(), config.gamma()).expect("ensemble beta is valid")
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa_prime(&self) -> usize {
        self.kappa_prime
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    fn q_tilde(&self, i: usize, j: usize) -> i64 {
        if self.beta == 1 {
            j as i64 - i as i64
        } else if i % 2 == 1 {
            1
        } else {
            -1
        }
    }
}

fn check_u(u: f64) -> Result<()> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("u must be finite and > 0, got {u}")));
    }
    Ok(())
}

/// `L^(l)_ij(u)` in log form; `l = 0` is the undifferentiated kernel. Indices
/// are 1-based.
fn l_kernel_log(l: usize, i: usize, j: usize, u: f64, micro: &MicroConfig) -> Result<SignedLog> {
    let power = i as i64 + j as i64 - micro.kappa_prime as i64;
    let order = -power + i64::from(i == l);
    let abs_order = order.unsigned_abs() as u32;
    let z = u.sqrt();
    // (z/2)^power · I_|ν|(z) = (z/2)^{power + |ν|} · Σ_k (z²/4)^k / (k!(k+|ν|)!)
    let series = bessel_i_scaled(abs_order, z)?;
    let exponent = (power + i64::from(abs_order)) as f64;
    Ok(SignedLog::from_parts(1, exponent * (0.5 * z).ln() + series.ln()))
}

/// Bessel kernel `L^(l)_ij(u)`; `l = 0` selects the undifferentiated kernel.
pub fn l_kernel(l: usize, i: usize, j: usize, u: f64, micro: &MicroConfig) -> Result<f64> {
    check_u(u)?;
    let d = micro.kernel_dim;
    for index in [i, j] {
        if index == 0 || index > d {
            return Err(Error::IndexOutOfRange { index, max: d });
        }
    }
    if l > d {
        return Err(Error::IndexOutOfRange { index: l, max: d });
    }
    Ok(l_kernel_log(l, i, j, u, micro)?.to_f64())
}

/// Microscopic laws for one `(β, γ)`.
#[derive(Debug, Clone, Copy)]
pub struct MicroLaw {
    micro: MicroConfig,
}

impl MicroLaw {
    pub fn new(micro: MicroConfig) -> Self {
        Self { micro }
    }

    pub fn config(&self) -> &MicroConfig {
        &self.micro
    }

    fn kernel_matrix(&self, l: usize, u: f64) -> Result<SignedLogMatrix> {
        let d = self.micro.kernel_dim;
        let mut m = SignedLogMatrix::zeros(d);
        for i in 1..=d {
            for j in 1..=d {
                let q = self.micro.q_tilde(i, j);
                if q == 0 {
                    continue;
                }
                let entry = l_kernel_log(l, i, j, u, &self.micro)?;
                m[(i - 1, j - 1)] = entry * SignedLog::from_int(q);
            }
        }
        Ok(m)
    }

    /// `ℰ(u)` as a [`SignedLog`].
    pub fn gap_log(&self, u: f64) -> Result<SignedLog> {
        check_u(u)?;
        let decay = SignedLog::from_parts(1, -f64::from(self.micro.beta) * u / 8.0);
        if self.micro.kernel_dim == 0 {
            return Ok(decay);
        }
        let m = self.kernel_matrix(0, u)?;
        let root = if self.micro.beta == 1 {
            sqrt_det_antisymmetric(&m)?
        } else {
            logdet_lu(&m)
        };
        let e = decay * root;
        Ok(if e.sign() < 0 { SignedLog::ZERO } else { e })
    }

    /// Microscopic gap probability `ℰ(u)`.
    pub fn gap(&self, u: f64) -> Result<f64> {
        Ok(self.gap_log(u)?.to_f64().min(1.0))
    }

    /// Microscopic smallest-eigenvalue density `℘(u) = −ℰ'(u)`.
    pub fn pmin(&self, u: f64) -> Result<Density> {
        check_u(u)?;
        let beta = f64::from(self.micro.beta);
        let d = self.micro.kernel_dim;
        let gap_coeff = SignedLog::from_f64(beta / 8.0);
        if d == 0 {
            return Ok(Density {
                value: (beta / 8.0) * (-beta * u / 8.0).exp(),
                finite_difference: false,
            });
        }
        let m0 = self.kernel_matrix(0, u)?;
        // Row l of L^(l) differs from L^(0) only in its Bessel order.
        let mut rows = SignedLogMatrix::zeros(d);
        for l in 1..=d {
            let ml = self.kernel_matrix(l, u)?;
            for j in 0..d {
                rows[(l - 1, j)] = ml[(l - 1, j)];
            }
        }
        let derivative_sum = sum_row_replaced_dets(&m0, &rows);
        let (det0, det_error) = logdet_lu_with_error(&m0);
        let decay = SignedLog::from_parts(1, -beta * u / 8.0);
        // dL^(0)/du = L^(l)/(2√u) row-wise, so the correction carries β/(4√u).
        let coeff = SignedLog::from_f64(beta / (4.0 * u.sqrt()));
        let (gap, ratio) = if self.micro.beta == 2 {
            (decay * det0, derivative_sum)
        } else {
            if det0.sign() <= 0 || det_error > UNRELIABLE_DET_ERROR {
                return self.pmin_finite_difference(u);
            }
            let root = det0.sqrt();
            (decay * root, derivative_sum / root)
        };
        let value = (gap_coeff * gap - coeff * decay * ratio).to_f64();
        Ok(Density {
            value: value.max(0.0),
            finite_difference: false,
        })
    }

    /// Five-point central difference of `−ℰ`, relative step 1e-3.
    pub fn pmin_finite_difference(&self, u: f64) -> Result<Density> {
        check_u(u)?;
        let h = FALLBACK_REL_STEP * u;
        let derivative = five_point_derivative(|x| self.gap_log(x).map(SignedLog::to_f64), u, h)?;
        Ok(Density {
            value: (-derivative).max(0.0),
            finite_difference: true,
        })
    }
}

/// `u = 4pη·t` for each `t`.
pub fn micro_rescale(t_values: &[f64], spectrum: &EmpiricalSpectrum) -> Vec<f64> {
    let scale = micro_scale(spectrum);
    t_values.iter().map(|t| t * scale).collect()
}

/// `t = u / (4pη)` for each `u`.
pub fn micro_unscale(u_values: &[f64], spectrum: &EmpiricalSpectrum) -> Vec<f64> {
    let scale = micro_scale(spectrum);
    u_values.iter().map(|u| u / scale).collect()
}

/// The factor `4pη = 4 tr Λ⁻¹`.
pub fn micro_scale(spectrum: &EmpiricalSpectrum) -> f64 {
    4.0 * spectrum.len() as f64 * eta_scale(spectrum)
}

/// `sup_u |E_p(u/(4pη)) − ℰ(u)|` over the given `u` values.
pub fn sup_distance_to_micro(
    exact: &ExactLaw,
    spectrum: &EmpiricalSpectrum,
    micro: &MicroLaw,
    u_values: &[f64],
) -> Result<f64> {
    let scale = micro_scale(spectrum);
    u_values.iter().try_fold(0.0f64, |acc, &u| {
        let diff = (exact.gap_probability(u / scale)? - micro.gap(u)?).abs();
        Ok(acc.max(diff))
    })
}
