use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

use super::ParamVector;

/// Adam hyperparameters. Defaults: `beta1 = 0.9`, `beta2 = 0.99`, `eps = 1e-8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.99,
            eps: 1e-8,
        }
    }
}

/// Moment estimates and step counter for one optimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<S> {
    m: Vec<S>,
    v: Vec<S>,
    t: u64,
    config: AdamConfig,
}

impl<S: Scalar> AdamState<S> {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        Self {
            m: vec![S::zero(); len],
            v: vec![S::zero(); len],
            t: 0,
            config,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(
        &mut self,
        params: &mut ParamVector<S>,
        grad: &ParamVector<S>,
        lr: f64,
    ) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::dim(
                "adam_step",
                self.m.len(),
                format!("params {} / grad {}", params.len(), grad.len()),
            ));
        }
        if !(lr > 0.0) {
            return Err(Error::Input(format!("learning rate must be > 0, got {lr}")));
        }
        self.t += 1;
        let b1 = S::lit(self.config.beta1);
        let b2 = S::lit(self.config.beta2);
        let eps = S::lit(self.config.eps);
        let t = self.t as i32;
        let c1 = S::one() - b1.powi(t);
        let c2 = S::one() - b2.powi(t);
        let lr = S::lit(lr);
        for (((p, &g), m), v) in params
            .as_mut_slice()
            .iter_mut()
            .zip(grad.as_slice())
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = b1 * *m + (S::one() - b1) * g;
            *v = b2 * *v + (S::one() - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = AdamConfig::default();
        assert_eq!((c.beta1, c.beta2), (0.9, 0.99));
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut s = AdamState::<f64>::new(3, AdamConfig::default());
        let mut p = ParamVector::new(vec![1.0, -2.0, 0.5]);
        s.step(&mut p, &ParamVector::zeros(3), 1e-3).unwrap();
        assert_eq!(p.as_slice(), &[1.0, -2.0, 0.5]);
        assert_eq!(s.steps(), 1);
    }

    #[test]
    fn first_step_moves_by_lr_against_sign() {
        let mut s = AdamState::<f64>::new(4, AdamConfig::default());
        let mut p = ParamVector::zeros(4);
        let g = ParamVector::new(vec![3.0, -0.01, 250.0, -7.0]);
        s.step(&mut p, &g, 0.01).unwrap();
        for (&q, &gi) in p.as_slice().iter().zip(g.as_slice()) {
            // lr * |g| / (|g| + eps)
            let expect = -0.01 * gi.signum() * gi.abs() / (gi.abs() + 1e-8);
            assert!((q - expect).abs() < 1e-15, "{q} vs {expect}");
            assert!((q.abs() - 0.01).abs() < 1e-7);
        }
    }

    #[test]
    fn counter_increments_and_lengths_checked() {
        let mut s = AdamState::<f64>::new(2, AdamConfig::default());
        let mut p = ParamVector::zeros(2);
        for k in 1..=5 {
            s.step(&mut p, &ParamVector::new(vec![1.0, 1.0]), 1e-3)
                .unwrap();
            assert_eq!(s.steps(), k);
        }
        assert!(s.step(&mut p, &ParamVector::zeros(3), 1e-3).is_err());
        assert!(s.step(&mut p, &ParamVector::zeros(2), 0.0).is_err());
        assert_eq!(s.steps(), 5);
    }

    #[test]
    fn minimises_a_quadratic() {
        let mut s = AdamState::<f64>::new(2, AdamConfig::default());
        let mut p = ParamVector::new(vec![3.0, -4.0]);
        for _ in 0..3000 {
            let g = ParamVector::new(p.as_slice().iter().map(|&x| 2.0 * x).collect());
            s.step(&mut p, &g, 0.01).unwrap();
        }
        assert!(p.as_slice().iter().all(|x| x.abs() < 1e-2), "{:?}", p);
    }
}
