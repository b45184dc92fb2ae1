use super::smooth::{binomial, SmoothFn};
use crate::error::Result;

/// `β(y) = exp(1 - 1/(1 - y²))` on `(-1, 1)`, zero elsewhere; `β(0) = 1`.
///
/// Unlike [`super::Mollifier`] it has no plateau, so `β''(0) < 0`: falsifying
/// test functions built from it see curvature at their centre.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassicBump;

impl ClassicBump {
    /// `[β(y), …, β^(n)(y)]` via `β' = g'β`, `g(y) = 1 - 1/(1 - y²)`.
    pub fn jets(&self, y: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        let q = 1.0 - y * y;
        if q <= 0.0 || 1.0 / q > 700.0 {
            return out;
        }
        // g^(j) for j >= 1 from the partial fractions 1/(1-y²) = ½(1/(1-y) + 1/(1+y)).
        let mut g = vec![0.0; n + 1];
        let mut fact = 1.0;
        for (j, gj) in g.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            let a = fact / (1.0 - y).powi(j as i32 + 1);
            let b = fact / (1.0 + y).powi(j as i32 + 1);
            let b = if j % 2 == 0 { b } else { -b };
            *gj = -0.5 * (a + b);
        }
        out[0] = (1.0 - 1.0 / q).exp();
        for m in 0..n {
            let mut acc = 0.0;
            for j in 0..=m {
                acc += binomial(m, j) * g[j + 1] * out[m - j];
            }
            out[m + 1] = acc;
        }
        out
    }
}

impl SmoothFn for ClassicBump {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        Ok(self.jets(x, order)[order])
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((-1.0, 1.0))
    }
    fn value(&self, x: f64) -> f64 {
        let q = 1.0 - x * x;
        if q <= 0.0 || 1.0 / q > 700.0 {
            0.0
        } else {
            (1.0 - 1.0 / q).exp()
        }
    }
}
