use crate::{Error, Result, Scalar};

/// Norm below which a feature vector counts as collapsed.
pub const DEGENERATE_NORM: f64 = 1e-12;

fn norm<S: Scalar>(a: &[S]) -> S {
    a.iter().map(|&x| x * x).sum::<S>().sqrt()
}

fn check<S: Scalar>(a: &[S], b: &[S]) -> Result<(S, S)> {
    if a.len() != b.len() {
        return Err(Error::dim("cosine_sim", a.len(), b.len()));
    }
    let (na, nb) = (norm(a), norm(b));
    for n in [na, nb] {
        if n.as_f64() < DEGENERATE_NORM {
            return Err(Error::DegenerateFeature {
                norm: n.as_f64(),
                threshold: DEGENERATE_NORM,
            });
        }
    }
    Ok((na, nb))
}

/// Cosine similarity `a.b / (|a| |b|)`, clamped to `[-1, 1]`.
pub fn cosine_sim<S: Scalar>(a: &[S], b: &[S]) -> Result<S> {
    let (na, nb) = check(a, b)?;
    let dot: S = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    Ok((dot / (na * nb)).max(-S::one()).min(S::one()))
}

/// Cosine similarity and its gradient with respect to `a`:
/// `b / (|a||b|) - cos * a / |a|^2`.
pub fn cosine_sim_grad<S: Scalar>(a: &[S], b: &[S]) -> Result<(S, Vec<S>)> {
    let (na, nb) = check(a, b)?;
    let dot: S = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let cos = dot / (na * nb);
    let inv = S::one() / (na * nb);
    let na2 = na * na;
    let grad = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| y * inv - cos * x / na2)
        .collect();
    Ok((cos.max(-S::one()).min(S::one()), grad))
}
