//! Shared fixtures for the benchmarks.

use hardedge::EmpiricalSpectrum;

/// The ten-eigenvalue real-ensemble reference spectrum.
pub fn reference_spectrum() -> EmpiricalSpectrum {
    EmpiricalSpectrum::new(vec![0.6, 1.2, 6.7, 9.3, 10.5, 15.5, 17.2, 20.25, 30.1, 35.4]).expect("valid spectrum")
}

/// Half the eigenvalues at 1, half at 4.
pub fn two_point_spectrum(p: usize) -> EmpiricalSpectrum {
    EmpiricalSpectrum::new((0..p).map(|k| if k < p / 2 { 1.0 } else { 4.0 }).collect()).expect("valid spectrum")
}
