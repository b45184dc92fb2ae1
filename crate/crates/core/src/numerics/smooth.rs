use std::sync::Arc;

use crate::error::{Error, Result};

/// A real function of one variable with derivatives available on demand.
///
/// `max_order` is `None` when every derivative can be evaluated.
/// `support`, when known, is a closed interval outside of which the function
/// and all of its derivatives vanish.
pub trait SmoothFn: Send + Sync {
    fn derivative(&self, x: f64, order: usize) -> Result<f64>;

    fn max_order(&self) -> Option<usize> {
        None
    }

    fn support(&self) -> Option<(f64, f64)> {
        None
    }

    fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0).unwrap_or(f64::NAN)
    }
}

pub type SharedFn = Arc<dyn SmoothFn>;

impl<T: SmoothFn + ?Sized> SmoothFn for Arc<T> {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        (**self).derivative(x, order)
    }
    fn max_order(&self) -> Option<usize> {
        (**self).max_order()
    }
    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
}

impl<T: SmoothFn + ?Sized> SmoothFn for &T {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        (**self).derivative(x, order)
    }
    fn max_order(&self) -> Option<usize> {
        (**self).max_order()
    }
    fn support(&self) -> Option<(f64, f64)> {
        (**self).support()
    }
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
}

pub(crate) fn check_order(requested: usize, max: Option<usize>) -> Result<()> {
    match max {
        Some(available) if requested > available => {
            Err(Error::UnsupportedOrder { requested, available })
        }
        _ => Ok(()),
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// `Σ coeffs[j] x^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `(x - p)^m`.
    pub fn centered_power(p: f64, m: usize) -> Self {
        let coeffs = (0..=m)
            .map(|j| binomial(m, j) * (-p).powi((m - j) as i32))
            .collect();
        Self { coeffs }
    }
}

impl SmoothFn for Polynomial {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if order >= self.coeffs.len() {
            return Ok(0.0);
        }
        // Horner on the differentiated coefficients.
        let mut acc = 0.0;
        for j in (order..self.coeffs.len()).rev() {
            let falling: f64 = ((j - order + 1)..=j).map(|v| v as f64).product();
            acc = acc * x + self.coeffs[j] * falling;
        }
        Ok(acc)
    }
}

/// `amplitude * sin(frequency * x + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trig {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl SmoothFn for Trig {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let shift = order as f64 * std::f64::consts::FRAC_PI_2;
        Ok(self.amplitude
            * self.frequency.powi(order as i32)
            * (self.frequency * x + self.phase + shift).sin())
    }
}

/// `inner((x - center) / width)`.
#[derive(Clone)]
pub struct Dilated<F> {
    pub inner: F,
    pub center: f64,
    pub width: f64,
}

impl<F: SmoothFn> Dilated<F> {
    pub fn new(inner: F, center: f64, width: f64) -> Self {
        Self { inner, center, width }
    }
}

impl<F: SmoothFn> SmoothFn for Dilated<F> {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let y = (x - self.center) / self.width;
        Ok(self.inner.derivative(y, order)? / self.width.powi(order as i32))
    }
    fn max_order(&self) -> Option<usize> {
        self.inner.max_order()
    }
    fn support(&self) -> Option<(f64, f64)> {
        self.inner.support().map(|(lo, hi)| {
            let (a, b) = (self.center + self.width * lo, self.center + self.width * hi);
            (a.min(b), a.max(b))
        })
    }
}

/// Pointwise product, differentiated by the Leibniz rule.
#[derive(Clone)]
pub struct Product<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: SmoothFn, B: SmoothFn> Product<A, B> {
    pub fn new(left: A, right: B) -> Self {
        Self { left, right }
    }
}

impl<A: SmoothFn, B: SmoothFn> SmoothFn for Product<A, B> {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        check_order(order, self.max_order())?;
        if let Some((lo, hi)) = self.support() {
            if x < lo || x > hi {
                return Ok(0.0);
            }
        }
        let mut acc = 0.0;
        for j in 0..=order {
            let r = self.right.derivative(x, order - j)?;
            if r == 0.0 {
                continue;
            }
            acc += binomial(order, j) * self.left.derivative(x, j)? * r;
        }
        Ok(acc)
    }
    fn max_order(&self) -> Option<usize> {
        match (self.left.max_order(), self.right.max_order()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
    fn support(&self) -> Option<(f64, f64)> {
        match (self.left.support(), self.right.support()) {
            (Some((a, b)), Some((c, d))) => Some((a.max(c), b.min(d).max(a.max(c)))),
            (a, b) => a.or(b),
        }
    }
}

/// Linear combination `Σ w_i f_i`.
#[derive(Clone, Default)]
pub struct Sum {
    pub terms: Vec<(f64, SharedFn)>,
}

impl Sum {
    pub fn new(terms: Vec<(f64, SharedFn)>) -> Self {
        Self { terms }
    }
}

impl SmoothFn for Sum {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (w, f) in &self.terms {
            acc += w * f.derivative(x, order)?;
        }
        Ok(acc)
    }
    fn max_order(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(_, f)| f.max_order()).min()
    }
    fn support(&self) -> Option<(f64, f64)> {
        let mut hull: Option<(f64, f64)> = None;
        for (_, f) in &self.terms {
            let (a, b) = f.support()?;
            hull = Some(match hull {
                None => (a, b),
                Some((lo, hi)) => (lo.min(a), hi.max(b)),
            });
        }
        hull
    }
}
