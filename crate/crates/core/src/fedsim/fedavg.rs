use crate::numcore::ParamVector;
use crate::{Error, Result, Scalar};

/// Weighted coordinate-wise mean `sum w_i theta_i / sum w_i`, accumulated in
/// the order given as a running mean, so a single contribution (or several
/// identical ones) comes back bit-exactly.
pub fn fedavg<S: Scalar>(contributions: &[(&ParamVector<S>, f64)]) -> Result<ParamVector<S>> {
    let (first, w0) = contributions
        .first()
        .ok_or_else(|| Error::Input("fedavg needs at least one contribution".into()))?;
    let len = first.len();
    for (i, (p, w)) in contributions.iter().enumerate() {
        if p.len() != len {
            return Err(Error::dim(
                "fedavg contribution",
                len,
                format!("{} (contribution {i})", p.len()),
            ));
        }
        if !(*w > 0.0) || !w.is_finite() {
            return Err(Error::Input(format!(
                "fedavg weight must be > 0, got {w} (contribution {i})"
            )));
        }
    }
    let mut acc = (*first).clone();
    let mut total = *w0;
    for (p, w) in &contributions[1..] {
        total += w;
        let frac = S::lit(w / total);
        for (a, &x) in acc.as_mut_slice().iter_mut().zip(p.as_slice()) {
            *a = *a + (x - *a) * frac;
        }
    }
    Ok(acc)
}
