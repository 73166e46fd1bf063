use crate::objectives::Objective;

/// Two-dimensional Rosenbrock valley `f(x, y) = (1-x)^2 + 100(y - x^2)^2`
/// with its global minimum at `(1, 1)`.
pub struct Rosenbrock {
    minimizer: [f64; 2],
}

impl Rosenbrock {
    pub fn new() -> Self {
        Self {
            minimizer: [1.0, 1.0],
        }
    }

    /// Classical benchmark start `(-1.2, 1.0)`.
    pub fn default_start() -> [f64; 2] {
        [-1.2, 1.0]
    }
}

impl Default for Rosenbrock {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn eval(&self, params: &[f64]) -> f64 {
        let (x, y) = (params[0], params[1]);
        (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
    }

    fn grad(&self, params: &[f64]) -> Vec<f64> {
        let (x, y) = (params[0], params[1]);
        vec![
            -2.0 * (1.0 - x) - 400.0 * x * (y - x * x),
            200.0 * (y - x * x),
        ]
    }

    fn minimizer(&self) -> Option<&[f64]> {
        Some(&self.minimizer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_minimum_is_zero() {
        assert_eq!(Rosenbrock::new().eval(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn value_at_origin_is_one() {
        assert_eq!(Rosenbrock::new().eval(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn gradient_vanishes_at_minimum() {
        let g = Rosenbrock::new().grad(&[1.0, 1.0]);
        assert_eq!(g, vec![0.0, 0.0]);
    }
}
