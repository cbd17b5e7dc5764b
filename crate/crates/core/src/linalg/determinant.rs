use crate::error::{Error, Result};
use crate::linalg::SignedLogMatrix;
use crate::numerics::SignedLog;

/// Relative level below which a determinant is treated as roundoff, measured
/// against the Hadamard bound of the equilibrated matrix.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Estimated relative error of a determinant beyond which a closed-form ratio
/// using it is less accurate than a finite difference of the same law.
pub const UNRELIABLE_DET_ERROR: f64 = 1e-8;

const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Determinant by LU with partial pivoting on the log-magnitude.
///
/// Each pivot row is divided by its pivot before elimination, so every
/// multiplier stays at unit scale however large the entries are. An exactly
/// singular matrix gives zero; the empty matrix gives one.
pub fn logdet_lu(m: &SignedLogMatrix) -> SignedLog {
    lu_determinant(m, false).0
}

/// [`logdet_lu`] together with a first-order estimate of its relative
/// rounding error, `ε Σ_k (|L||U|)_kk / |U_kk|`. The estimate is infinite when
/// the matrix is exactly singular.
pub fn logdet_lu_with_error(m: &SignedLogMatrix) -> (SignedLog, f64) {
    lu_determinant(m, true)
}

fn lu_determinant(m: &SignedLogMatrix, track_error: bool) -> (SignedLog, f64) {
    let d = m.dim();
    let mut a = m.data().to_vec();
    // Magnitude envelope of every contribution folded into each entry.
    let mut env: Vec<SignedLog> = if track_error {
        a.iter().map(|x| x.abs()).collect()
    } else {
        Vec::new()
    };
    let mut det = SignedLog::ONE;
    let mut rel_err = 0.0;
    for k in 0..d {
        let pivot_row = (k..d)
            .max_by(|&x, &y| a[x * d + k].cmp_magnitude(&a[y * d + k]))
            .expect("non-empty range");
        let pivot = a[pivot_row * d + k];
        if pivot.is_zero() {
            return (SignedLog::ZERO, f64::INFINITY);
        }
        if pivot_row != k {
            for j in 0..d {
                a.swap(k * d + j, pivot_row * d + j);
                if track_error {
                    env.swap(k * d + j, pivot_row * d + j);
                }
            }
            det = -det;
        }
        det = det * pivot;
        let inv = pivot.recip();
        if track_error {
            rel_err += f64::EPSILON * (env[k * d + k] / pivot.abs()).to_f64();
            for j in k + 1..d {
                env[k * d + j] = env[k * d + j] * inv.abs();
            }
        }
        for j in k + 1..d {
            a[k * d + j] = a[k * d + j] * inv;
        }
        for i in k + 1..d {
            let factor = a[i * d + k];
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..d {
                let update = factor * a[k * d + j];
                a[i * d + j] = a[i * d + j] - update;
                if track_error {
                    env[i * d + j] = env[i * d + j] + factor.abs() * env[k * d + j];
                }
            }
        }
    }
    (det, rel_err)
}

/// Log of the Hadamard bound `∏ ‖row_i‖₂` after row then column
/// equilibration, plus the log of the scales divided out. Kernel matrices are
/// strongly graded, and without equilibration a perfectly well-conditioned
/// determinant can sit far below the raw bound.
fn log_equilibrated_bound(m: &SignedLogMatrix) -> f64 {
    let d = m.dim();
    let max_abs = |it: &mut dyn Iterator<Item = SignedLog>| {
        it.max_by(SignedLog::cmp_magnitude)
            .filter(|x| !x.is_zero())
            .map(|x| x.logmag())
    };
    let rows: Vec<f64> = (0..d)
        .map(|i| max_abs(&mut (0..d).map(|j| m[(i, j)])).unwrap_or(0.0))
        .collect();
    let cols: Vec<f64> = (0..d)
        .map(|j| max_abs(&mut (0..d).map(|i| m[(i, j)].scale_exp(-rows[i]))).unwrap_or(0.0))
        .collect();
    let scaled: f64 = (0..d)
        .map(|i| {
            let row_sq = SignedLog::sum((0..d).map(|j| {
                let x = m[(i, j)].abs().scale_exp(-rows[i] - cols[j]);
                x * x
            }));
            0.5 * row_sq.logmag()
        })
        .sum();
    scaled + rows.iter().sum::<f64>() + cols.iter().sum::<f64>()
}

/// True when `|det|` sits below [`NOISE_FLOOR`] relative to the Hadamard bound
/// of the equilibrated matrix.
pub fn is_below_noise_floor(det: SignedLog, m: &SignedLogMatrix) -> bool {
    det.is_zero() || det.logmag() < log_equilibrated_bound(m) + NOISE_FLOOR.ln()
}

/// `+√det m` for an even-dimensional antisymmetric matrix.
///
/// The determinant of a real antisymmetric matrix is a square and hence
/// non-negative; a negative value at roundoff level is clamped to zero.
pub fn sqrt_det_antisymmetric(m: &SignedLogMatrix) -> Result<SignedLog> {
    let d = m.dim();
    if d % 2 != 0 {
        return Err(Error::Shape(format!(
            "antisymmetric square-root determinant needs even dimension, got {d}"
        )));
    }
    check_antisymmetric(m)?;
    let det = logdet_lu(m);
    match det.sign() {
        1 => Ok(det.sqrt()),
        0 => Ok(SignedLog::ZERO),
        _ if is_below_noise_floor(det, m) => Ok(SignedLog::ZERO),
        _ => Err(Error::Domain(format!(
            "antisymmetric matrix produced a significantly negative determinant ({det:?})"
        ))),
    }
}

fn check_antisymmetric(m: &SignedLogMatrix) -> Result<()> {
    let d = m.dim();
    for i in 0..d {
        let row_scale = (0..d)
            .map(|j| m[(i, j)])
            .max_by(SignedLog::cmp_magnitude)
            .unwrap_or(SignedLog::ZERO);
        let diag = m[(i, i)];
        if !diag.is_zero() && (row_scale.is_zero() || diag.logmag() > row_scale.logmag() + ANTISYMMETRY_TOL.ln()) {
            return Err(Error::NotAntisymmetric { row: i, col: i });
        }
        for j in i + 1..d {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            let residual = a + b;
            if residual.is_zero() {
                continue;
            }
            let scale = a.abs().logmag().max(b.abs().logmag());
            if residual.logmag() > scale + ANTISYMMETRY_TOL.ln() {
                return Err(Error::NotAntisymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}
