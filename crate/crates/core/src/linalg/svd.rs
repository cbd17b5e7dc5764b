//! Singular values via Golub–Kahan bidiagonalization and implicit-shift QR.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

/// Householder vector `v` (with `v[0] = 1`), factor `tau` and real `beta`
/// such that `(I − τ v vᴴ)ᴴ x = β e₁`. Overwrites `x` with `v`.
fn householder<T: Scalar>(x: &mut [T]) -> (T, f64) {
    let alpha = x[0];
    let tail_sq: f64 = x[1..].iter().map(|v| v.abs2()).sum();
    if tail_sq == 0.0 && alpha.im() == 0.0 {
        x[0] = T::ONE;
        return (T::ZERO, alpha.re());
    }
    let norm = (alpha.abs2() + tail_sq).sqrt();
    let beta = if alpha.re() >= 0.0 { -norm } else { norm };
    let tau = (T::from_re(beta) - alpha) / T::from_re(beta);
    let inv = T::ONE / (alpha - T::from_re(beta));
    x[0] = T::ONE;
    for v in &mut x[1..] {
        *v = *v * inv;
    }
    (tau, beta)
}

/// `Σ a_i b_i` with four interleaved accumulators so the loop vectorizes.
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::ZERO; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (rem_a, rem_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..4 {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (&x, &y) in rem_a.iter().zip(rem_b) {
        s += x * y;
    }
    s
}

/// Reduces the `p × n` row-major matrix `a` (`p ≤ n`) to lower bidiagonal form,
/// returning the diagonal and sub-diagonal. `a` is destroyed.
pub(crate) fn bidiagonalize_generic<T: Scalar>(a: &mut [T], p: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; p];
    let mut sub = vec![0.0; p.saturating_sub(1)];
    let mut v = vec![T::ZERO; n];
    let mut w = vec![T::ZERO; n];
    for k in 0..p {
        // Right reflector annihilating a[k, k+1..n].
        let len = n - k;
        let vr = &mut v[..len];
        for (dst, src) in vr.iter_mut().zip(&a[k * n + k..(k + 1) * n]) {
            *dst = src.conj();
        }
        let (tau, beta) = householder(vr);
        diag[k] = beta;
        if tau != T::ZERO {
            for i in k + 1..p {
                let row = &mut a[i * n + k..(i + 1) * n];
                let f = tau * dot(row, vr);
                for (r, &vj) in row.iter_mut().zip(vr.iter()) {
                    *r -= f * vj.conj();
                }
            }
        }
        if k + 1 == p {
            break;
        }
        // Left reflector annihilating a[k+2..p, k].
        let len = p - k - 1;
        let vl = &mut v[..len];
        for (idx, dst) in vl.iter_mut().enumerate() {
            *dst = a[(k + 1 + idx) * n + k];
        }
        let (tau, beta) = householder(vl);
        sub[k] = beta;
        if tau != T::ZERO {
            let width = n - k - 1;
            let acc = &mut w[..width];
            acc.iter_mut().for_each(|x| *x = T::ZERO);
            for (idx, &vi) in vl.iter().enumerate() {
                let row = &a[(k + 1 + idx) * n + k + 1..(k + 2 + idx) * n];
                let c = vi.conj();
                for (x, &r) in acc.iter_mut().zip(row) {
                    *x += c * r;
                }
            }
            let tau_c = tau.conj();
            for (idx, &vi) in vl.iter().enumerate() {
                let row = &mut a[(k + 1 + idx) * n + k + 1..(k + 2 + idx) * n];
                let f = tau_c * vi;
                for (r, &x) in row.iter_mut().zip(acc.iter()) {
                    *r -= f * x;
                }
            }
        }
    }
    (diag, sub)
}

/// Complex bidiagonalization on split real/imaginary storage; same reflectors
/// as [`bidiagonalize_generic`], arranged so every inner loop is plain `f64`.
pub(crate) fn bidiagonalize_split(re: &mut [f64], im: &mut [f64], p: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; p];
    let mut sub = vec![0.0; p.saturating_sub(1)];
    let mut v_re = vec![0.0; n];
    let mut v_im = vec![0.0; n];
    let mut w_re = vec![0.0; n];
    let mut w_im = vec![0.0; n];
    for k in 0..p {
        let len = n - k;
        let base = k * n + k;
        v_re[..len].copy_from_slice(&re[base..base + len]);
        for (dst, &src) in v_im[..len].iter_mut().zip(&im[base..base + len]) {
            *dst = -src;
        }
        let (tau, beta) = householder_split(&mut v_re[..len], &mut v_im[..len]);
        diag[k] = beta;
        if tau != (0.0, 0.0) {
            let (vr, vi) = (&v_re[..len], &v_im[..len]);
            for i in k + 1..p {
                let start = i * n + k;
                let (rr, ri) = (&mut re[start..start + len], &mut im[start..start + len]);
                let (s_re, s_im) = complex_dot(rr, ri, vr, vi);
                let f_re = tau.0 * s_re - tau.1 * s_im;
                let f_im = tau.0 * s_im + tau.1 * s_re;
                // row -= f * conj(v)
                for j in 0..len {
                    rr[j] -= f_re * vr[j] + f_im * vi[j];
                    ri[j] -= f_im * vr[j] - f_re * vi[j];
                }
            }
        }
        if k + 1 == p {
            break;
        }
        let len = p - k - 1;
        for idx in 0..len {
            v_re[idx] = re[(k + 1 + idx) * n + k];
            v_im[idx] = im[(k + 1 + idx) * n + k];
        }
        let (tau, beta) = householder_split(&mut v_re[..len], &mut v_im[..len]);
        sub[k] = beta;
        if tau != (0.0, 0.0) {
            let width = n - k - 1;
            let (acc_re, acc_im) = (&mut w_re[..width], &mut w_im[..width]);
            acc_re.fill(0.0);
            acc_im.fill(0.0);
            for idx in 0..len {
                let (a, b) = (v_re[idx], -v_im[idx]);
                let start = (k + 1 + idx) * n + k + 1;
                let (rr, ri) = (&re[start..start + width], &im[start..start + width]);
                for j in 0..width {
                    acc_re[j] += a * rr[j] - b * ri[j];
                    acc_im[j] += a * ri[j] + b * rr[j];
                }
            }
            let (tc_re, tc_im) = (tau.0, -tau.1);
            for idx in 0..len {
                let f_re = tc_re * v_re[idx] - tc_im * v_im[idx];
                let f_im = tc_re * v_im[idx] + tc_im * v_re[idx];
                let start = (k + 1 + idx) * n + k + 1;
                let (rr, ri) = (&mut re[start..start + width], &mut im[start..start + width]);
                for j in 0..width {
                    rr[j] -= f_re * acc_re[j] - f_im * acc_im[j];
                    ri[j] -= f_re * acc_im[j] + f_im * acc_re[j];
                }
            }
        }
    }
    (diag, sub)
}

#[inline]
fn complex_dot(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> (f64, f64) {
    let mut sr = [0.0f64; 4];
    let mut si = [0.0f64; 4];
    let n4 = ar.len() / 4 * 4;
    for c in (0..n4).step_by(4) {
        for l in 0..4 {
            let j = c + l;
            sr[l] += ar[j] * br[j] - ai[j] * bi[j];
            si[l] += ar[j] * bi[j] + ai[j] * br[j];
        }
    }
    let mut s_re = (sr[0] + sr[1]) + (sr[2] + sr[3]);
    let mut s_im = (si[0] + si[1]) + (si[2] + si[3]);
    for j in n4..ar.len() {
        s_re += ar[j] * br[j] - ai[j] * bi[j];
        s_im += ar[j] * bi[j] + ai[j] * br[j];
    }
    (s_re, s_im)
}

/// Split-storage counterpart of [`householder`]; returns `(τ_re, τ_im)` and `β`.
fn householder_split(xr: &mut [f64], xi: &mut [f64]) -> ((f64, f64), f64) {
    let (a_re, a_im) = (xr[0], xi[0]);
    let tail_sq: f64 = xr[1..].iter().zip(&xi[1..]).map(|(a, b)| a * a + b * b).sum();
    if tail_sq == 0.0 && a_im == 0.0 {
        xr[0] = 1.0;
        return ((0.0, 0.0), a_re);
    }
    let norm = (a_re * a_re + a_im * a_im + tail_sq).sqrt();
    let beta = if a_re >= 0.0 { -norm } else { norm };
    let tau = ((beta - a_re) / beta, -a_im / beta);
    // 1 / (alpha - beta)
    let (d_re, d_im) = (a_re - beta, a_im);
    let den = d_re * d_re + d_im * d_im;
    let (inv_re, inv_im) = (d_re / den, -d_im / den);
    xr[0] = 1.0;
    xi[0] = 0.0;
    for (r, i) in xr[1..].iter_mut().zip(&mut xi[1..]) {
        let (x, y) = (*r, *i);
        *r = x * inv_re - y * inv_im;
        *i = x * inv_im + y * inv_re;
    }
    (tau, beta)
}

/// `(c, s, r)` with `c·f + s·g = r`, `−s·f + c·g = 0`.
#[inline]
fn givens(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = f.hypot(g);
        (f / r, g / r, r)
    }
}

/// Singular values (ascending) of the upper bidiagonal matrix with diagonal
/// `d` and super-diagonal `e`, by implicit Wilkinson-shift QR sweeps.
pub fn bidiagonal_singular_values(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    assert_eq!(e.len(), n.saturating_sub(1), "super-diagonal length mismatch");
    let eps = f64::EPSILON;
    let max_sweeps = 30 * n.max(1) * n.max(1);
    let mut sweeps = 0;
    loop {
        for i in 0..n.saturating_sub(1) {
            if e[i].abs() <= eps * (d[i].abs() + d[i + 1].abs()) {
                e[i] = 0.0;
            }
        }
        let Some(hi) = (1..n).rev().find(|&i| e[i - 1] != 0.0) else {
            break;
        };
        let mut lo = hi - 1;
        while lo > 0 && e[lo - 1] != 0.0 {
            lo -= 1;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            break;
        }

        if d[hi] == 0.0 {
            // Chase e[hi-1] upward with column rotations.
            let mut f = e[hi - 1];
            e[hi - 1] = 0.0;
            for j in (lo..hi).rev() {
                let (c, s, r) = givens(d[j], f);
                d[j] = r;
                if j > lo {
                    f = -s * e[j - 1];
                    e[j - 1] *= c;
                }
            }
            continue;
        }
        if let Some(k) = (lo..hi).find(|&k| d[k] == 0.0) {
            // Chase e[k] to the right with row rotations.
            let mut f = e[k];
            e[k] = 0.0;
            for j in k + 1..=hi {
                let (c, s, r) = givens(d[j], f);
                d[j] = r;
                if j < hi {
                    f = -s * e[j];
                    e[j] *= c;
                }
            }
            continue;
        }

        // Wilkinson shift from the trailing 2x2 block of BᵀB.
        let m = hi;
        let t11 = d[m - 1] * d[m - 1] + if m - 1 > lo { e[m - 2] * e[m - 2] } else { 0.0 };
        let t12 = d[m - 1] * e[m - 1];
        let t22 = d[m] * d[m] + e[m - 1] * e[m - 1];
        let delta = 0.5 * (t11 - t22);
        let denom = delta + delta.signum() * delta.hypot(t12);
        let mu = if denom == 0.0 { t22 } else { t22 - t12 * t12 / denom };

        let mut y = d[lo] * d[lo] - mu;
        let mut z = d[lo] * e[lo];
        for k in lo..hi {
            let (c, s, r) = givens(y, z);
            if k > lo {
                e[k - 1] = r;
            }
            y = c * d[k] + s * e[k];
            e[k] = -s * d[k] + c * e[k];
            z = s * d[k + 1];
            d[k + 1] *= c;

            let (c, s, r) = givens(y, z);
            d[k] = r;
            y = c * e[k] + s * d[k + 1];
            d[k + 1] = -s * e[k] + c * d[k + 1];
            if k + 1 < hi {
                z = s * e[k + 1];
                e[k + 1] *= c;
            }
        }
        e[hi - 1] = y;
    }
    let mut out: Vec<f64> = d.into_iter().map(f64::abs).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn check_shape<T: Scalar>(w: &Matrix<T>) -> Result<()> {
    if w.rows() > w.cols() {
        return Err(Error::Shape(format!(
            "expected rows <= cols, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    Ok(())
}

/// All singular values of a `p × n` matrix with `p ≤ n`, ascending.
pub fn singular_values<T: Scalar>(w: &Matrix<T>) -> Result<Vec<f64>> {
    check_shape(w)?;
    let (p, n) = (w.rows(), w.cols());
    Ok(singular_values_owned(w.clone().into_data(), p, n))
}

pub(crate) fn singular_values_owned<T: Scalar>(data: Vec<T>, p: usize, n: usize) -> Vec<f64> {
    let (diag, sub) = T::bidiagonalize(data, p, n);
    // Lower bidiagonal with (diag, sub) has the singular values of its
    // transpose, which is upper bidiagonal.
    bidiagonal_singular_values(diag, sub)
}

/// Smallest singular value of a `p × n` matrix with `p ≤ n`.
pub fn smallest_singular_value<T: Scalar>(w: &Matrix<T>) -> Result<f64> {
    Ok(singular_values(w)?[0])
}
