use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::{Error, Result};

/// `ln X` for `X ~ Gamma(shape, 1)`.
///
/// Shapes below one use `X = Y * U^(1/shape)` with `Y ~ Gamma(shape + 1)`,
/// evaluated in log space so tiny shapes cannot underflow to `ln 0`.
pub fn sample_ln_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Input(format!(
            "gamma shape must be > 0, got {shape}"
        )));
    }
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).map_err(|e| Error::Input(e.to_string()))?;
        return Ok(g.sample(rng).max(f64::MIN_POSITIVE).ln());
    }
    let g = Gamma::new(shape + 1.0, 1.0).map_err(|e| Error::Input(e.to_string()))?;
    let y: f64 = g.sample(rng);
    // 1 - [0, 1) keeps the uniform strictly positive
    let u = 1.0 - rng.random::<f64>();
    Ok(y.max(f64::MIN_POSITIVE).ln() + u.ln() / shape)
}

/// One draw of `Beta(alpha, alpha)` as `X / (X + Y)` with independent
/// `X, Y ~ Gamma(alpha, 1)`.
pub fn sample_beta<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Input(format!("beta shape must be > 0, got {alpha}")));
    }
    let lx = sample_ln_gamma(alpha, rng)?;
    let ly = sample_ln_gamma(alpha, rng)?;
    // X / (X + Y) = 1 / (1 + exp(ln Y - ln X))
    Ok(1.0 / (1.0 + (ly - lx).exp()))
}
