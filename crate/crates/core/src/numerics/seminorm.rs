use super::smooth::{check_order, SmoothFn};
use crate::error::Result;

/// Grid points used to approximate sups.
pub const SEMINORM_POINTS: usize = 10_001;

/// `Σ_{j ≤ k} sup_K |f^(j)|` on `K = [lo, hi]`, sups taken over a uniform
/// grid of [`SEMINORM_POINTS`] points.
pub fn seminorm<F: SmoothFn + ?Sized>(f: &F, interval: (f64, f64), k: usize) -> Result<f64> {
    check_order(k, f.max_order())?;
    let (lo, hi) = interval;
    let n = SEMINORM_POINTS;
    let mut sups = vec![0.0f64; k + 1];
    for i in 0..n {
        let x = if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        for (j, sup) in sups.iter_mut().enumerate() {
            *sup = sup.max(f.derivative(x, j)?.abs());
        }
    }
    Ok(sups.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::numerics::{Mollifier, Polynomial};

    #[test]
    fn constant_one() {
        let f = Polynomial::constant(1.0);
        assert_eq!(seminorm(&f, (0.0, 1.0), 0).unwrap(), 1.0);
    }

    #[test]
    fn identity_order_one() {
        let f = Polynomial::new(vec![0.0, 1.0]);
        assert!((seminorm(&f, (0.0, 1.0), 1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mollifier_plateau_maximum() {
        let m = Mollifier::new(0.5).unwrap();
        let s = m.support_half_width();
        assert_eq!(seminorm(&m, (-s, s), 0).unwrap(), 1.0);
    }

    #[test]
    fn order_beyond_available_is_rejected() {
        let m = Mollifier::new(0.5).unwrap();
        assert!(matches!(seminorm(&m, (-1.0, 1.0), 9), Err(Error::UnsupportedOrder { .. })));
    }
}
