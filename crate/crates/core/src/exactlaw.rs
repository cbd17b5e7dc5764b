//! Exact finite-`(p, n)` gap probability and smallest-eigenvalue density.
//!
//! For integer `γ` the gap probability is
//!
//! ```text
//! E(t) = exp(−(β/2) t tr Λ⁻¹) / det^γ Λ · det^{β/2}[Q_ij(t)],   i, j = 1 … 2γ/β
//! ```
//!
//! where every `Q_ij` is a polynomial of degree `p` in `t` whose coefficients
//! are elementary symmetric polynomials of `Λ` over factorials. Everything is
//! carried in [`SignedLog`] and exponentiated once at the end, so `p` in the
//! hundreds does not overflow.

use crate::error::{Error, Result};
use crate::linalg::{logdet_lu, logdet_lu_with_error, sqrt_det_antisymmetric, SignedLogMatrix, UNRELIABLE_DET_ERROR};
use crate::numerics::{log_factorial, SignedLog};
use crate::spectra::{elementary_symmetric_log, inverse_trace_half_beta, EmpiricalSpectrum, EnsembleConfig};
use crate::Density;

/// Relative step of the finite-difference fallback for the density.
const FALLBACK_REL_STEP: f64 = 1e-3;

/// Sign factor `q_ij` of the kernel, with 1-based indices.
pub fn q_prefactor(i: usize, j: usize, beta: u32, kernel_dim: usize) -> Result<i64> {
    for index in [i, j] {
        if index == 0 || index > kernel_dim {
            return Err(Error::IndexOutOfRange { index, max: kernel_dim });
        }
    }
    let parity = if (i + j) % 2 == 0 { 1 } else { -1 };
    Ok(match beta {
        1 => (j as i64 - i as i64) * parity,
        2 => {
            if i % 2 == 1 {
                1
            } else {
                -1
            }
        }
        other => return Err(Error::InvalidBeta(other)),
    })
}

/// One kernel entry as a polynomial in `t`, stored by ascending power.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPolynomial {
    i: usize,
    j: usize,
    alpha: i64,
    /// `coeffs[m]` multiplies `t^m`; empty means the zero polynomial.
    coeffs: Vec<SignedLog>,
}

impl KernelPolynomial {
    fn build(i: usize, j: usize, q: i64, alpha: i64, e: &[SignedLog]) -> Self {
        let p = e.len() - 1;
        // Θ(α) with Θ(0) = 1.
        if alpha < 0 || q == 0 {
            return Self {
                i,
                j,
                alpha,
                coeffs: Vec::new(),
            };
        }
        let k_max = p.min(alpha as usize);
        let q = SignedLog::from_int(q);
        let mut coeffs = vec![SignedLog::ZERO; p + 1];
        for k in 0..=k_max {
            let inv_factorial = SignedLog::from_parts(1, -log_factorial(alpha as usize - k));
            coeffs[p - k] = q * e[k] * inv_factorial;
        }
        Self { i, j, alpha, coeffs }
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn alpha(&self) -> i64 {
        self.alpha
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Coefficient of `t^power`.
    pub fn coefficient(&self, power: usize) -> SignedLog {
        self.coeffs.get(power).copied().unwrap_or(SignedLog::ZERO)
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Term-by-term derivative in `t`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &c)| c * SignedLog::from_int(m as i64))
            .collect();
        Self { coeffs, ..self.clone() }
    }

    fn negated(&self, i: usize, j: usize) -> Self {
        Self {
            i,
            j,
            alpha: self.alpha,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    /// Value at `t ≥ 0` by Horner's rule.
    pub fn eval(&self, t: f64) -> SignedLog {
        debug_assert!(t >= 0.0);
        let t = SignedLog::from_f64(t);
        self.coeffs.iter().rev().fold(SignedLog::ZERO, |acc, &c| acc * t + c)
    }
}

/// Square table of kernel polynomials indexed by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    dim: usize,
    entries: Vec<KernelPolynomial>,
}

impl KernelTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> Result<&KernelPolynomial> {
        for index in [i, j] {
            if index == 0 || index > self.dim {
                return Err(Error::IndexOutOfRange { index, max: self.dim });
            }
        }
        Ok(&self.entries[(i - 1) * self.dim + (j - 1)])
    }

    pub fn eval(&self, t: f64) -> SignedLogMatrix {
        let d = self.dim;
        SignedLogMatrix::from_fn(d, |i, j| self.entries[i * d + j].eval(t))
    }

    fn row_derivatives(&self) -> KernelTable {
        KernelTable {
            dim: self.dim,
            entries: self.entries.iter().map(KernelPolynomial::derivative).collect(),
        }
    }
}

/// The `Q_ij(t)` table for a spectrum and ensemble.
pub fn build_q_polynomials(spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> Result<KernelTable> {
    check_spectrum(spectrum, config)?;
    let p = config.p();
    let dim = config.kernel_dim();
    let beta = config.beta();
    let e = elementary_symmetric_log(spectrum);
    // 2(γ+1)/β is an integer for every admissible configuration.
    let kappa = (2 * (config.gamma() + 1) / beta as usize) as i64;
    let alpha = |i: usize, j: usize| p as i64 + kappa - i as i64 - j as i64;

    let mut entries: Vec<Option<KernelPolynomial>> = vec![None; dim * dim];
    for i in 1..=dim {
        for j in 1..=dim {
            if entries[(i - 1) * dim + (j - 1)].is_some() {
                continue;
            }
            let q = q_prefactor(i, j, beta, dim)?;
            let poly = KernelPolynomial::build(i, j, q, alpha(i, j), &e);
            if beta == 1 && i != j {
                // Antisymmetric: share the coefficients, negated.
                entries[(j - 1) * dim + (i - 1)] = Some(poly.negated(j, i));
            }
            entries[(i - 1) * dim + (j - 1)] = Some(poly);
        }
    }
    Ok(KernelTable {
        dim,
        entries: entries.into_iter().map(|e| e.expect("filled")).collect(),
    })
}

/// `G^(l)`: the `Q` table with row `l` (1-based) differentiated in `t`.
pub fn build_g_polynomials(l: usize, q_table: &KernelTable) -> Result<KernelTable> {
    let d = q_table.dim;
    if l == 0 || l > d {
        return Err(Error::IndexOutOfRange { index: l, max: d });
    }
    let mut entries = q_table.entries.clone();
    for j in 0..d {
        entries[(l - 1) * d + j] = q_table.entries[(l - 1) * d + j].derivative();
    }
    Ok(KernelTable { dim: d, entries })
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

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Exact laws for one `(Λ, β, p, n)` with the kernel polynomials prebuilt.
#[derive(Debug, Clone)]
pub struct ExactLaw {
    config: EnsembleConfig,
    q: KernelTable,
    dq: KernelTable,
    decay: f64,
    /// `det Λ^(−γ)`.
    inv_det_power: SignedLog,
}

impl ExactLaw {
    pub fn new(spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> Result<Self> {
        let q = build_q_polynomials(spectrum, config)?;
        let dq = q.row_derivatives();
        Ok(Self {
            config: *config,
            q,
            dq,
            decay: inverse_trace_half_beta(spectrum, config),
            inv_det_power: spectrum
                .sorted()
                .iter()
                .map(|&x| SignedLog::from_f64(x))
                .fold(SignedLog::ONE, |acc, x| acc * x)
                .recip()
                .powi(config.gamma() as u32),
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn q_table(&self) -> &KernelTable {
        &self.q
    }

    /// `(β/2) tr Λ⁻¹`.
    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// `exp(−(β/2) t tr Λ⁻¹) / det^γ Λ`.
    fn prefactor(&self, t: f64) -> SignedLog {
        SignedLog::from_parts(1, -self.decay * t) * self.inv_det_power
    }

    /// `E(t)` as a [`SignedLog`], never rounded to a double.
    pub fn gap_probability_log(&self, t: f64) -> Result<SignedLog> {
        check_t(t)?;
        let pref = self.prefactor(t);
        if self.q.dim == 0 {
            return Ok(pref);
        }
        let m = self.q.eval(t);
        let root = if self.config.beta() == 1 {
            sqrt_det_antisymmetric(&m)?
        } else {
            logdet_lu(&m)
        };
        let e = pref * root;
        Ok(if e.sign() < 0 { SignedLog::ZERO } else { e })
    }

    /// Probability that every eigenvalue of `WW†` is at least `t`.
    pub fn gap_probability(&self, t: f64) -> Result<f64> {
        Ok(self.gap_probability_log(t)?.to_f64().min(1.0))
    }

    /// Density of the smallest eigenvalue, `−E'(t)`, from the derivative
    /// kernels. Falls back to a finite difference of `E` (and says so) when
    /// the `β = 1` denominator is numerically singular.
    pub fn pmin_density(&self, t: f64) -> Result<Density> {
        check_t(t)?;
        let pref = self.prefactor(t);
        let decay = SignedLog::from_f64(self.decay);
        if self.q.dim == 0 {
            return Ok(Density {
                value: (decay * pref).to_f64(),
                finite_difference: false,
            });
        }
        let m = self.q.eval(t);
        let dm = self.dq.eval(t);
        let derivative_sum = sum_row_replaced_dets(&m, &dm);
        let (det_q, det_error) = logdet_lu_with_error(&m);
        let (gap, correction) = if self.config.beta() == 2 {
            (pref * det_q, pref * derivative_sum)
        } else {
            if det_q.sign() <= 0 || det_error > UNRELIABLE_DET_ERROR {
                return self.pmin_finite_difference(t);
            }
            let root = det_q.sqrt();
            (pref * root, pref * derivative_sum / root * SignedLog::from_f64(0.5))
        };
        let value = (decay * gap - correction).to_f64();
        Ok(Density {
            value: value.max(0.0),
            finite_difference: false,
        })
    }

    /// Five-point central difference of `−E`, relative step 1e-3.
    pub fn pmin_finite_difference(&self, t: f64) -> Result<Density> {
        check_t(t)?;
        let scale = if self.decay > 0.0 { 1.0 / self.decay } else { 1.0 };
        let h = FALLBACK_REL_STEP * t.max(scale);
        let e = |x: f64| self.gap_probability_log(x).map(SignedLog::to_f64);
        let derivative = five_point_derivative(e, t, h)?;
        Ok(Density {
            value: (-derivative).max(0.0),
            finite_difference: true,
        })
    }
}

/// `Σ_l det(M with row l replaced by the same row of D)`.
pub(crate) fn sum_row_replaced_dets(m: &SignedLogMatrix, d: &SignedLogMatrix) -> SignedLog {
    let dim = m.dim();
    let mut total = SignedLog::ZERO;
    let mut g = m.clone();
    for l in 0..dim {
        for j in 0..dim {
            g[(l, j)] = d[(l, j)];
        }
        total = total + logdet_lu(&g);
        for j in 0..dim {
            g[(l, j)] = m[(l, j)];
        }
    }
    total
}

/// Derivative of `f` at `x ≥ 0` on `[0, ∞)`: five-point central stencil when
/// it fits, otherwise the five-point forward stencil.
pub(crate) fn five_point_derivative<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if x - 2.0 * h >= 0.0 {
        Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
    } else {
        Ok(
            (-25.0 * f(x)? + 48.0 * f(x + h)? - 36.0 * f(x + 2.0 * h)? + 16.0 * f(x + 3.0 * h)?
                - 3.0 * f(x + 4.0 * h)?)
                / (12.0 * h),
        )
    }
}

/// `E(t)` for a one-off evaluation; prefer [`ExactLaw`] on grids.
pub fn gap_probability(t: f64, spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> Result<f64> {
    ExactLaw::new(spectrum, config)?.gap_probability(t)
}

/// `P_min(t)` for a one-off evaluation; prefer [`ExactLaw`] on grids.
pub fn pmin_density(t: f64, spectrum: &EmpiricalSpectrum, config: &EnsembleConfig) -> Result<Density> {
    ExactLaw::new(spectrum, config)?.pmin_density(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> EmpiricalSpectrum {
        EmpiricalSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn q_prefactor_examples() {
        assert_eq!(q_prefactor(1, 1, 1, 2).unwrap(), 0);
        assert_eq!(q_prefactor(1, 2, 1, 2).unwrap(), -1);
        assert_eq!(q_prefactor(2, 1, 1, 2).unwrap(), 1);
        assert_eq!(q_prefactor(1, 4, 1, 4).unwrap(), -3);
        for j in 1..=3 {
            assert_eq!(q_prefactor(2, j, 2, 3).unwrap(), -1);
            assert_eq!(q_prefactor(3, j, 2, 3).unwrap(), 1);
        }
        assert!(matches!(q_prefactor(0, 1, 2, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(q_prefactor(1, 3, 2, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn single_entry_kernel() {
        // β=2, p=1, n=2: Q₁₁(t) = t + 1 for Λ = (1).
        let c = EnsembleConfig::new(2, 1, 2).unwrap();
        let q = build_q_polynomials(&spec(&[1.0]), &c).unwrap();
        assert_eq!(q.dim(), 1);
        let poly = q.get(1, 1).unwrap();
        assert_eq!(poly.alpha(), 1);
        assert_eq!(poly.degree(), Some(1));
        assert!((poly.coefficient(0).to_f64() - 1.0).abs() < 1e-15);
        assert!((poly.coefficient(1).to_f64() - 1.0).abs() < 1e-15);
        assert!((poly.eval(2.5).to_f64() - 3.5).abs() < 1e-14);

        let g = build_g_polynomials(1, &q).unwrap();
        let dpoly = g.get(1, 1).unwrap();
        assert_eq!(dpoly.degree(), Some(0));
        assert!((dpoly.eval(7.0).to_f64() - 1.0).abs() < 1e-15);
        assert!(build_g_polynomials(2, &q).is_err());
        assert!(build_g_polynomials(0, &q).is_err());
    }

    #[test]
    fn real_table_is_antisymmetric() {
        let c = EnsembleConfig::new(1, 4, 9).unwrap();
        let q = build_q_polynomials(&spec(&[0.5, 1.0, 2.0, 3.0]), &c).unwrap();
        assert_eq!(q.dim(), 4);
        for i in 1..=4 {
            assert!(q.get(i, i).unwrap().is_zero());
            for j in 1..=4 {
                let (a, b) = (q.get(i, j).unwrap(), q.get(j, i).unwrap());
                for m in 0..=4 {
                    assert_eq!(a.coefficient(m), -b.coefficient(m));
                }
            }
        }
        let m = q.eval(0.3);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], -m[(j, i)]);
            }
        }
    }

    #[test]
    fn heaviside_cutoff() {
        // β=2, γ=3, p=2: α = 2 + 4 − i − j, negative once i + j > 6.
        let c = EnsembleConfig::new(2, 2, 5).unwrap();
        let q = build_q_polynomials(&spec(&[1.0, 2.0]), &c).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let poly = q.get(i, j).unwrap();
                assert_eq!(poly.is_zero(), i + j > 6);
                // α = 0 keeps its k = 0 term.
                if poly.alpha() == 0 {
                    assert_eq!(poly.degree(), Some(2));
                }
            }
        }
        // Larger γ so that some entries vanish: β=2, p=1, γ=4, α = 1 + 5 − i − j.
        let c = EnsembleConfig::new(2, 1, 5).unwrap();
        let q = build_q_polynomials(&spec(&[1.5]), &c).unwrap();
        assert!(q.get(4, 4).unwrap().is_zero());
        assert!(q.get(3, 4).unwrap().is_zero());
        assert!(!q.get(2, 4).unwrap().is_zero());
    }

    #[test]
    fn square_complex_closed_form() {
        let c = EnsembleConfig::new(2, 3, 3).unwrap();
        let law = ExactLaw::new(&spec(&[1.0, 2.0, 4.0]), &c).unwrap();
        let e = law.gap_probability(0.5).unwrap();
        assert!((e - (-0.875f64).exp()).abs() < 1e-15);
        let d = law.pmin_density(0.0).unwrap();
        assert!((d.value - 1.75).abs() < 1e-14);
        assert!(!d.finite_difference);
    }

    #[test]
    fn gamma_two_one_oracle() {
        // λ_min = |w₁|² + |w₂|² ~ Gamma(2, 1): tail (1+t)e^{−t}, density t e^{−t}.
        let c = EnsembleConfig::new(2, 1, 2).unwrap();
        let law = ExactLaw::new(&spec(&[1.0]), &c).unwrap();
        for &t in &[0.0f64, 0.1, 1.0, 3.7, 20.0] {
            let tail = (1.0 + t) * (-t).exp();
            assert!((law.gap_probability(t).unwrap() - tail).abs() < 1e-14);
            let dens = t * (-t).exp();
            assert!((law.pmin_density(t).unwrap().value - dens).abs() < 1e-14);
        }
        assert!((law.gap_probability(1.0).unwrap() - 2.0 * (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn chi_square_four_oracle() {
        // β=1, p=1, n=4: λ = Λ χ²₄, tail (1 + t/2Λ) e^{−t/2Λ}.
        let c = EnsembleConfig::new(1, 1, 4).unwrap();
        let lambda = 1.7;
        let law = ExactLaw::new(&spec(&[lambda]), &c).unwrap();
        for &t in &[0.0f64, 0.4, 2.0, 9.0] {
            let x = t / (2.0 * lambda);
            let tail = (1.0 + x) * (-x).exp();
            assert!((law.gap_probability(t).unwrap() - tail).abs() < 1e-14);
            let dens = x / (2.0 * lambda) * (-x).exp();
            assert!((law.pmin_density(t).unwrap().value - dens).abs() < 1e-14);
        }
    }

    #[test]
    fn fallback_agrees_with_closed_form() {
        let c = EnsembleConfig::new(1, 3, 8).unwrap();
        let law = ExactLaw::new(&spec(&[0.7, 1.9, 4.2]), &c).unwrap();
        for &t in &[1e-9, 0.05, 0.8, 3.0] {
            let closed = law.pmin_density(t).unwrap();
            let fd = law.pmin_finite_difference(t).unwrap();
            assert!(fd.finite_difference);
            assert!(
                (closed.value - fd.value).abs() <= 1e-6 * closed.value.max(1e-3),
                "t={t} closed={} fd={}",
                closed.value,
                fd.value
            );
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let c = EnsembleConfig::new(2, 2, 3).unwrap();
        let law = ExactLaw::new(&spec(&[1.0, 2.0]), &c).unwrap();
        assert!(law.gap_probability(-0.1).is_err());
        assert!(law.gap_probability(f64::NAN).is_err());
        assert!(law.pmin_density(f64::INFINITY).is_err());
        assert!(matches!(
            ExactLaw::new(&spec(&[1.0]), &c),
            Err(Error::SpectrumMismatch { .. })
        ));
    }
}
