//! Independent reference computations used only by the tests.
#![allow(dead_code)]

use hardedge::{EmpiricalSpectrum, RngStream};

/// The population spectrum of the real-ensemble reference configuration.
pub const REFERENCE_SPECTRUM: [f64; 10] = [0.6, 1.2, 6.7, 9.3, 10.5, 15.5, 17.2, 20.25, 30.1, 35.4];

pub fn reference_spectrum() -> EmpiricalSpectrum {
    EmpiricalSpectrum::new(REFERENCE_SPECTRUM.to_vec()).unwrap()
}

/// Half the eigenvalues at 1, half at 4.
pub fn two_point_spectrum(p: usize) -> EmpiricalSpectrum {
    let lambdas = (0..p).map(|k| if k < p / 2 { 1.0 } else { 4.0 }).collect();
    EmpiricalSpectrum::new(lambdas).unwrap()
}

pub fn uniform_in(stream: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * stream.uniform()
}

pub fn random_spectrum(stream: &mut RngStream, p: usize) -> EmpiricalSpectrum {
    EmpiricalSpectrum::new((0..p).map(|_| uniform_in(stream, 0.2, 5.0)).collect()).unwrap()
}

/// `e_k` by summing the product over every `k`-subset.
pub fn elementary_by_subsets(lambdas: &[f64]) -> Vec<f64> {
    let p = lambdas.len();
    let mut e = vec![0.0; p + 1];
    for mask in 0u32..(1 << p) {
        let prod: f64 = (0..p).filter(|b| mask >> b & 1 == 1).map(|b| lambdas[b]).product();
        e[mask.count_ones() as usize] += prod;
    }
    e
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    if d == 0 {
        return 1.0;
    }
    if d == 1 {
        return m[0][0];
    }
    (0..d)
        .map(|c| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    if d == 0 {
        return 1.0;
    }
    assert!(d % 2 == 0);
    let rest = |skip: usize| -> Vec<Vec<f64>> {
        let keep: Vec<usize> = (1..d).filter(|&k| k != skip).collect();
        keep.iter().map(|&i| keep.iter().map(|&j| m[i][j]).collect()).collect()
    };
    (1..d)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * m[0][j] * pfaffian(&rest(j))
        })
        .sum()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix `re + i·im` through its real
/// `2n × 2n` embedding, where every eigenvalue appears twice.
pub fn hermitian_eigenvalues(re: &[Vec<f64>], im: &[Vec<f64>]) -> Vec<f64> {
    let n = re.len();
    let big: Vec<Vec<f64>> = (0..2 * n)
        .map(|i| {
            (0..2 * n)
                .map(|j| match (i < n, j < n) {
                    (true, true) => re[i][j],
                    (true, false) => -im[i][j - n],
                    (false, true) => im[i - n][j],
                    (false, false) => re[i - n][j - n],
                })
                .collect()
        })
        .collect();
    jacobi_eigenvalues(big).into_iter().step_by(2).collect()
}

/// Unevaluated sum `hi + lo` carrying about 106 bits.
#[derive(Clone, Copy, Debug)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = Self::two_sum(s, e);
        Self { hi, lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::two_sum(p, e);
        Self { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q = self.hi / d;
        let r = self.add(DoubleDouble::new(q).mul(DoubleDouble::new(-d)));
        let (hi, lo) = Self::two_sum(q, r.hi / d);
        Self { hi, lo }
    }
}

/// `I_ν(x)` from the first `terms` series terms in double-double.
pub fn bessel_series_dd(nu: u32, x: f64, terms: usize) -> f64 {
    let half = DoubleDouble::new(0.5 * x);
    let mut lead = DoubleDouble::new(1.0);
    for k in 1..=nu {
        lead = lead.mul(half).div_f64(f64::from(k));
    }
    let quarter = half.mul(half);
    let mut term = lead;
    let mut sum = term;
    for k in 1..terms {
        term = term.mul(quarter).div_f64((k * (k + nu as usize)) as f64);
        sum = sum.add(term);
    }
    sum.hi + sum.lo
}

/// `Σ_{k ≤ m} ln k` accumulated in double-double.
pub fn log_factorial_dd(m: usize) -> f64 {
    let s = (2..=m).fold(DoubleDouble::new(0.0), |acc, k| {
        acc.add(DoubleDouble::new((k as f64).ln()))
    });
    s.hi + s.lo
}

/// Survival function of Gamma(2, 1), i.e. `(1 + t) e^{−t}`.
pub fn gamma2_tail(t: f64) -> f64 {
    (1.0 + t) * (-t).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Smallest `t` on a doubling-then-bisection search with `f(t) ≤ level`.
pub fn quantile_of_decreasing(f: impl Fn(f64) -> f64, level: f64) -> f64 {
    let mut hi = 1.0;
    while f(hi) > level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
