use crate::error::{Error, Result};
use crate::objectives::{Objective, SyntheticDataset};

/// Numerically stable `log(1 + exp(z))`.
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

/// Mean cross-entropy of a linear classifier over a dataset. Parameters are
/// `[w_0, ..., w_{d-1}, b]`, so the dimension is the feature count plus one.
pub struct LogisticRegression {
    data: SyntheticDataset,
}

impl LogisticRegression {
    pub fn new(data: SyntheticDataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidConfig("dataset is empty".into()));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &SyntheticDataset {
        &self.data
    }

    fn logit(&self, params: &[f64], i: usize) -> f64 {
        let d = self.data.dimension();
        let x = self.data.sample(i);
        let mut z = params[d]; // bias
        for k in 0..d {
            z += params[k] * x[k];
        }
        z
    }

    /// Fraction of samples whose thresholded prediction matches the label.
    pub fn accuracy(&self, params: &[f64]) -> f64 {
        let hits = (0..self.data.len())
            .filter(|&i| u8::from(self.logit(params, i) > 0.0) == self.data.label(i))
            .count();
        hits as f64 / self.data.len() as f64
    }
}

impl Objective for LogisticRegression {
    fn name(&self) -> &str {
        "logistic"
    }

    fn dimension(&self) -> usize {
        self.data.dimension() + 1
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
        let mut loss = 0.0;
        for &i in batch {
            let z = self.logit(params, i);
            let y = f64::from(self.data.label(i));
            // cross-entropy: log(1 + e^z) - y z
            loss += log1p_exp(z) - y * z;
        }
        loss / batch.len() as f64
    }

    fn grad_batch(&self, params: &[f64], batch: &[usize]) -> Vec<f64> {
        let d = self.data.dimension();
        let mut g = vec![0.0; d + 1];
        for &i in batch {
            let z = self.logit(params, i);
            let residual = sigmoid(z) - f64::from(self.data.label(i));
            let x = self.data.sample(i);
            for k in 0..d {
                g[k] += residual * x[k];
            }
            g[d] += residual;
        }
        let inv = 1.0 / batch.len() as f64;
        for v in &mut g {
            *v *= inv;
        }
        g
    }
}

/// Mean squared error of a linear predictor against the binary labels,
/// `f = mean 0.5 (w.x + b - y)^2`. Convex; included in the harness sweep set
/// alongside the classification objectives.
pub struct LinearRegression {
    data: SyntheticDataset,
}

impl LinearRegression {
    pub fn new(data: SyntheticDataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidConfig("dataset is empty".into()));
        }
        Ok(Self { data })
    }

    fn prediction(&self, params: &[f64], i: usize) -> f64 {
        let d = self.data.dimension();
        let x = self.data.sample(i);
        let mut z = params[d];
        for k in 0..d {
            z += params[k] * x[k];
        }
        z
    }
}

impl Objective for LinearRegression {
    fn name(&self) -> &str {
        "linreg"
    }

    fn dimension(&self) -> usize {
        self.data.dimension() + 1
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
        let mut loss = 0.0;
        for &i in batch {
            let r = self.prediction(params, i) - f64::from(self.data.label(i));
            loss += 0.5 * r * r;
        }
        loss / batch.len() as f64
    }

    fn grad_batch(&self, params: &[f64], batch: &[usize]) -> Vec<f64> {
        let d = self.data.dimension();
        let mut g = vec![0.0; d + 1];
        for &i in batch {
            let r = self.prediction(params, i) - f64::from(self.data.label(i));
            let x = self.data.sample(i);
            for k in 0..d {
                g[k] += r * x[k];
            }
            g[d] += r;
        }
        let inv = 1.0 / batch.len() as f64;
        for v in &mut g {
            *v *= inv;
        }
        g
    }
}
