use crate::error::{Error, Result};
use crate::objectives::{Objective, SyntheticDataset};

/// One-hidden-layer network: tanh hidden activation, sigmoid output, mean
/// cross-entropy loss, flattened to a single parameter vector
/// `[W1 row-major (h x d), b1 (h), w2 (h), b2]` with a hand-derived
/// backpropagated gradient.
pub struct TinyMlp {
    data: SyntheticDataset,
    hidden_units: usize,
}

impl TinyMlp {
    pub fn new(data: SyntheticDataset, hidden_units: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidConfig("dataset is empty".into()));
        }
        if hidden_units == 0 {
            return Err(Error::InvalidConfig("hidden_units must be >= 1".into()));
        }
        Ok(Self { data, hidden_units })
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    pub fn data(&self) -> &SyntheticDataset {
        &self.data
    }

    fn split<'a>(&self, params: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64], f64) {
        let d = self.data.dimension();
        let h = self.hidden_units;
        let (w1, rest) = params.split_at(h * d);
        let (b1, rest) = rest.split_at(h);
        let (w2, rest) = rest.split_at(h);
        (w1, b1, w2, rest[0])
    }

    /// Output logit for one sample; the hidden activations are written into
    /// `a1` (length `hidden_units`).
    fn forward(&self, params: &[f64], i: usize, a1: &mut [f64]) -> f64 {
        let d = self.data.dimension();
        let (w1, b1, w2, b2) = self.split(params);
        let x = self.data.sample(i);
        let mut z2 = b2;
        for j in 0..self.hidden_units {
            let mut z1 = b1[j];
            for k in 0..d {
                z1 += w1[j * d + k] * x[k];
            }
            a1[j] = z1.tanh();
            z2 += w2[j] * a1[j];
        }
        z2
    }

    /// Fraction of samples whose thresholded output matches the label.
    pub fn accuracy(&self, params: &[f64]) -> f64 {
        let mut a1 = vec![0.0; self.hidden_units];
        let hits = (0..self.data.len())
            .filter(|&i| u8::from(self.forward(params, i, &mut a1) > 0.0) == self.data.label(i))
            .count();
        hits as f64 / self.data.len() as f64
    }
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Objective for TinyMlp {
    fn name(&self) -> &str {
        "mlp"
    }

    fn dimension(&self) -> usize {
        self.hidden_units * (self.data.dimension() + 2) + 1
    }

    fn eval(&self, params: &[f64]) -> f64 {
        let all: Vec<usize> = (0..self.data.len()).collect();
        self.eval_batch(params, &all)
    }

    fn grad(&self, params: &[f64]) -> Vec<f64> {
        let all: Vec<usize> = (0..self.data.len()).collect();
        self.grad_batch(params, &all)
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.data.len())
    }

    fn eval_batch(&self, params: &[f64], batch: &[usize]) -> f64 {
        let mut a1 = vec![0.0; self.hidden_units];
        let mut loss = 0.0;
        for &i in batch {
            let z2 = self.forward(params, i, &mut a1);
            let y = f64::from(self.data.label(i));
            loss += log1p_exp(z2) - y * z2;
        }
        loss / batch.len() as f64
    }

    fn grad_batch(&self, params: &[f64], batch: &[usize]) -> Vec<f64> {
        let d = self.data.dimension();
        let h = self.hidden_units;
        let (_, _, w2, _) = self.split(params);
        let w2 = w2.to_vec(); // detach from the params borrow

        let mut g = vec![0.0; self.dimension()];
        let (gw1, rest) = g.split_at_mut(h * d);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(h);

        let mut a1 = vec![0.0; h];
        for &i in batch {
            let z2 = self.forward(params, i, &mut a1);
            let dz2 = sigmoid(z2) - f64::from(self.data.label(i));
            let x = self.data.sample(i);
            gb2[0] += dz2;
            for j in 0..h {
                gw2[j] += dz2 * a1[j];
                // tanh'(z1) = 1 - a1^2
                let dz1 = dz2 * w2[j] * (1.0 - a1[j] * a1[j]);
                gb1[j] += dz1;
                for k in 0..d {
                    gw1[j * d + k] += dz1 * x[k];
                }
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for v in &mut g {
            *v *= inv;
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::gradient_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mlp() -> TinyMlp {
        let data = SyntheticDataset::blobs(24, 2, 8, 1.0).unwrap();
        TinyMlp::new(data, 4).unwrap()
    }

    #[test]
    fn zero_parameters_give_ln2_on_balanced_data() {
        let f = mlp();
        let loss = f.eval(&vec![0.0; f.dimension()]);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences_at_50_points() {
        let f = mlp();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let p: Vec<f64> = (0..f.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let err = gradient_check(&f, &p, 1e-5).unwrap();
            assert!(err <= 1e-5, "err = {err}");
        }
    }

    #[test]
    fn hidden_unit_permutation_leaves_eval_unchanged() {
        let f = mlp();
        let d = f.data().dimension();
        let h = f.hidden_units();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p: Vec<f64> = (0..f.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        // swap hidden units 0 and 2 in W1 rows, b1 and w2
        let mut q = p.clone();
        for k in 0..d {
            q.swap(k, 2 * d + k);
        }
        q.swap(h * d, h * d + 2);
        q.swap(h * d + h, h * d + h + 2);

        let a = f.eval(&p);
        let b = f.eval(&q);
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn rejects_zero_hidden_units() {
        let data = SyntheticDataset::blobs(4, 2, 0, 1.0).unwrap();
        assert!(TinyMlp::new(data, 0).is_err());
    }
}
