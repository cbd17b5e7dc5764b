use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest `|ν|` accepted by [`bessel_i`].
pub const MAX_BESSEL_ORDER: u32 = 64;

const LOG_FACTORIAL_TABLE: usize = 4096;
const EXACT_FACTORIAL_MAX: usize = 18;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE);
        // Up to 18! the product is exact in f64, so take one logarithm of it.
        let mut fact = 1.0f64;
        table.push(0.0);
        for k in 1..=EXACT_FACTORIAL_MAX {
            fact *= k as f64;
            table.push(fact.ln());
        }
        let mut acc = fact.ln();
        for k in (EXACT_FACTORIAL_MAX + 1)..LOG_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln(m!)`, from the exact product up to `18!` and a cumulative sum of `ln k` beyond.
pub fn log_factorial(m: usize) -> f64 {
    let table = log_factorial_table();
    match table.get(m) {
        Some(&v) => v,
        None => {
            let last = table.len() - 1;
            table[last] + ((last + 1)..=m).map(|k| (k as f64).ln()).sum::<f64>()
        }
    }
}

/// `I_ν(x) / (x/2)^ν = Σ_k (x²/4)^k / (k! (k+ν)!)` for `ν ≥ 0`.
///
/// Unlike `I_ν` itself this never underflows for small `x`, which the Bessel
/// kernels rely on near the hard edge.
pub fn bessel_i_scaled(nu: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be >= 0, got {x}")));
    }
    if nu > MAX_BESSEL_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {nu} exceeds the supported maximum {MAX_BESSEL_ORDER}"
        )));
    }
    let q = 0.25 * x * x;
    let nu_f = f64::from(nu);
    let mut term = (-log_factorial(nu as usize)).exp();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu_f));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Modified Bessel function of the first kind for integer order, by power
/// series. Negative orders use `I_{−m} = I_m`.
pub fn bessel_i(nu: i32, x: f64) -> Result<f64> {
    let m = nu.unsigned_abs();
    let scaled = bessel_i_scaled(m, x)?;
    Ok((0.5 * x).powi(m as i32) * scaled)
}
