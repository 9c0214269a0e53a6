//! Frequency-guided memory preservation.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::numcore::{MlpArch, ParamVector};
use crate::{Error, Result, Scalar};

/// Real-input DFT: bins `0..=n/2` of `X[k] = sum_j x[j] e^{-2 pi i jk/n}`.
pub fn rfft<S: Scalar>(signal: &[S]) -> Vec<Complex<S>> {
    rfft_with(&mut FftPlanner::new(), signal)
}

/// Inverse of [`rfft`] for a length-`n` real signal. The Hermitian mirror
/// is rebuilt from the half spectrum and the imaginary residue dropped.
pub fn irfft<S: Scalar>(bins: &[Complex<S>], n: usize) -> Result<Vec<S>> {
    irfft_with(&mut FftPlanner::new(), bins, n)
}

fn rfft_with<S: Scalar>(planner: &mut FftPlanner<S>, signal: &[S]) -> Vec<Complex<S>> {
    let n = signal.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<S>> = signal.iter().map(|&x| Complex::new(x, S::zero())).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

fn irfft_with<S: Scalar>(
    planner: &mut FftPlanner<S>,
    bins: &[Complex<S>],
    n: usize,
) -> Result<Vec<S>> {
    if bins.len() != n / 2 + 1 && n > 0 {
        return Err(Error::dim("irfft bins", n / 2 + 1, bins.len()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut buf = Vec::with_capacity(n);
    buf.extend_from_slice(bins);
    for k in bins.len()..n {
        buf.push(bins[n - k].conj());
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = S::one() / S::from_usize_lossy(n);
    Ok(buf.into_iter().map(|c| c.re * scale).collect())
}

/// Bins restored from the trained model for a signal with `bins` spectral
/// bins: `ceil(rho * bins)`.
pub fn low_bin_count(rho: f64, bins: usize) -> usize {
    ((rho * bins as f64).ceil() as usize).min(bins)
}

/// Per parameter tensor (each weight matrix and each bias vector, flattened
/// in canonical order): the lowest `ceil(rho * B)` real-DFT bins come from
/// `theta_tr`, the remaining high-frequency bins from `theta_un`.
pub fn fgmp_blend<S: Scalar>(
    theta_un: &ParamVector<S>,
    theta_tr: &ParamVector<S>,
    arch: &MlpArch,
    rho: f64,
) -> Result<ParamVector<S>> {
    if theta_un.len() != arch.param_count() || theta_tr.len() != arch.param_count() {
        return Err(Error::dim(
            "fgmp_blend",
            arch.param_count(),
            format!("unlearned {} / trained {}", theta_un.len(), theta_tr.len()),
        ));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Input(format!(
            "fgmp low fraction must lie in [0, 1], got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(theta_un.clone());
    }
    let mut planner = FftPlanner::new();
    let mut out = theta_un.clone();
    for seg in arch.segments() {
        let un = &theta_un.as_slice()[seg.clone()];
        let tr = &theta_tr.as_slice()[seg.clone()];
        let mut spec = rfft_with(&mut planner, un);
        let spec_tr = rfft_with(&mut planner, tr);
        let cut = low_bin_count(rho, spec.len());
        spec[..cut].copy_from_slice(&spec_tr[..cut]);
        let blended = irfft_with(&mut planner, &spec, seg.len())?;
        out.as_mut_slice()[seg].copy_from_slice(&blended);
    }
    Ok(out)
}
