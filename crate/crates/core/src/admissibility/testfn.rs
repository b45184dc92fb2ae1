use std::fmt;

use crate::error::Result;
use crate::numerics::{binomial, ClassicBump, SmoothFn};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunctionKind {
    /// `β((x - q)/w)`.
    FreeBump,
    /// `(x - q)^{2m} (1 + c (x - q)) β((x - q)/w)`, with `|c| w <= 0.9`.
    PinnedBump { order: u32, tilt: f64 },
}

/// Nonnegative smooth test function built on the classic bump `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionSpec {
    pub kind: TestFunctionKind,
    pub center: f64,
    pub width: f64,
}

impl TestFunctionSpec {
    pub fn free(center: f64, width: f64) -> Self {
        Self { kind: TestFunctionKind::FreeBump, center, width }
    }

    /// Pinned bump; the tilt is clamped to `|c| w <= 0.9` so the factor
    /// `1 + c (x - q)` stays positive on the support.
    pub fn pinned(center: f64, width: f64, order: u32, tilt: f64) -> Self {
        let bound = 0.9 / width;
        Self { kind: TestFunctionKind::PinnedBump { order: order.max(1), tilt: tilt.clamp(-bound, bound) }, center, width }
    }

    /// Closed interval outside of which the function vanishes.
    pub fn footprint(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// `[P(z), P'(z), …]` for the polynomial prefactor at `z = x - q`.
    fn prefactor_jets(&self, z: f64, n: usize) -> Vec<f64> {
        match self.kind {
            TestFunctionKind::FreeBump => {
                let mut v = vec![0.0; n + 1];
                v[0] = 1.0;
                v
            }
            TestFunctionKind::PinnedBump { order, tilt } => {
                let p = 2 * order as usize;
                // z^p + c z^{p+1}
                let falling = |deg: usize, j: usize| -> f64 {
                    if j > deg {
                        0.0
                    } else {
                        (deg - j + 1..=deg).map(|i| i as f64).product::<f64>() * z.powi((deg - j) as i32)
                    }
                };
                (0..=n).map(|j| falling(p, j) + tilt * falling(p + 1, j)).collect()
            }
        }
    }
}

impl SmoothFn for TestFunctionSpec {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let z = x - self.center;
        if z.abs() >= self.width {
            return Ok(0.0);
        }
        let b = ClassicBump.jets(z / self.width, order);
        let p = self.prefactor_jets(z, order);
        let mut acc = 0.0;
        let mut scale = 1.0;
        for i in 0..=order {
            acc += binomial(order, i) * b[i] * scale * p[order - i];
            scale /= self.width;
        }
        Ok(acc)
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some(self.footprint())
    }

    fn value(&self, x: f64) -> f64 {
        let z = x - self.center;
        if z.abs() >= self.width {
            return 0.0;
        }
        let b = ClassicBump.value(z / self.width);
        match self.kind {
            TestFunctionKind::FreeBump => b,
            TestFunctionKind::PinnedBump { order, tilt } => z.powi(2 * order as i32) * (1.0 + tilt * z) * b,
        }
    }
}

impl fmt::Display for TestFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TestFunctionKind::FreeBump => write!(f, "free_bump q={} w={}", self.center, self.width),
            TestFunctionKind::PinnedBump { order, tilt } => {
                write!(f, "pinned_bump q={} w={} m={} c={}", self.center, self.width, order, tilt)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_and_compact() {
        for spec in [
            TestFunctionSpec::free(0.3, 0.2),
            TestFunctionSpec::pinned(0.0, 0.1, 1, 9.0),
            TestFunctionSpec::pinned(0.0, 0.1, 3, -9.0),
        ] {
            let (a, b) = spec.footprint();
            for i in 0..=1000 {
                let x = a - 0.1 + (b - a + 0.2) * i as f64 / 1000.0;
                assert!(spec.value(x) >= 0.0);
                if x <= a || x >= b {
                    assert_eq!(spec.value(x), 0.0);
                }
            }
        }
    }

    #[test]
    fn pinned_jets_at_centre() {
        // x²(1 + c x)β(x/w): f''(0) = 2, f'''(0) = 6c
        let (w, c) = (0.2, 3.0);
        let f = TestFunctionSpec::pinned(0.0, w, 1, c);
        assert_eq!(f.derivative(0.0, 0).unwrap(), 0.0);
        assert_eq!(f.derivative(0.0, 1).unwrap(), 0.0);
        assert!((f.derivative(0.0, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!((f.derivative(0.0, 3).unwrap() - 6.0 * c).abs() < 1e-12);
        // fourth derivative picks up β''(0) = -2: 24 · (-1/w²)
        assert!((f.derivative(0.0, 4).unwrap() + 24.0 / (w * w)).abs() < 1e-9);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = TestFunctionSpec::pinned(0.4, 0.3, 2, -1.5);
        let h = 1e-5;
        for &x in &[0.2, 0.35, 0.5, 0.62] {
            for k in 0..4 {
                let fd = (f.derivative(x + h, k).unwrap() - f.derivative(x - h, k).unwrap()) / (2.0 * h);
                let d = f.derivative(x, k + 1).unwrap();
                assert!((fd - d).abs() < 1e-5 * d.abs().max(1.0), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn tilt_clamped() {
        let f = TestFunctionSpec::pinned(0.0, 0.5, 1, 10.0);
        assert_eq!(f.kind, TestFunctionKind::PinnedBump { order: 1, tilt: 1.8 });
    }
}
