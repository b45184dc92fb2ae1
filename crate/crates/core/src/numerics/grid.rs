use crate::error::{Error, Result};

pub const MIN_GRID_POINTS: usize = 9;

/// Uniform grid layout `x_i = x_lo + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::Domain(format!("grid needs at least {MIN_GRID_POINTS} points, got {n}")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::Domain(format!("invalid grid interval [{x_lo}, {x_hi}]")));
        }
        Ok(Self { x_lo, x_hi, n })
    }

    /// Smallest grid over `[x_lo, x_hi]` with spacing at most `max_spacing`.
    pub fn with_spacing(x_lo: f64, x_hi: f64, max_spacing: f64) -> Result<Self> {
        let n = ((x_hi - x_lo) / max_spacing).ceil() as usize + 1;
        Self::new(x_lo, x_hi, n.max(MIN_GRID_POINTS))
    }

    pub fn spacing(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn sample<F: FnMut(f64) -> f64>(&self, mut f: F) -> GridFunction {
        GridFunction {
            x_lo: self.x_lo,
            x_hi: self.x_hi,
            values: self.points().map(&mut f).collect(),
        }
    }
}

/// Real function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x_lo: f64,
    x_hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(x_lo: f64, x_hi: f64, values: Vec<f64>) -> Result<Self> {
        GridSpec::new(x_lo, x_hi, values.len())?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let h = (x_hi - x_lo) / (values.len() - 1) as f64;
            return Err(Error::NonFinite { at: x_lo + i as f64 * h });
        }
        Ok(Self { x_lo, x_hi, values })
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(x_lo: f64, x_hi: f64, n: usize, f: F) -> Result<Self> {
        let g = GridSpec::new(x_lo, x_hi, n)?.sample(f);
        Self::new(g.x_lo, g.x_hi, g.values)
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        Self { x_lo: spec.x_lo, x_hi: spec.x_hi, values: vec![0.0; spec.n] }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { x_lo: self.x_lo, x_hi: self.x_hi, n: self.values.len() }
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.values.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.spec().x(i)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: F) -> GridFunction {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.x(i), v)).collect();
        GridFunction { x_lo: self.x_lo, x_hi: self.x_hi, values }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, f: F) -> Result<GridFunction> {
        if self.spec() != other.spec() {
            return Err(Error::Domain("grid functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { x_lo: self.x_lo, x_hi: self.x_hi, values })
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sup of |values| over grid nodes lying in `[lo, hi]`.
    pub fn sup_abs_on(&self, lo: f64, hi: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let x = self.x(*i);
                x >= lo && x <= hi
            })
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    /// Composite Simpson over the whole grid; an odd panel count closes with
    /// the 3/8 rule on the last three panels. Exact on cubics.
    pub fn integral(&self) -> f64 {
        let v = &self.values;
        let h = self.spacing();
        let panels = v.len() - 1;
        let simpson_end = if panels % 2 == 0 { panels } else { panels - 3 };
        let mut acc = 0.0;
        if simpson_end > 0 {
            let mut odd = 0.0;
            let mut even = 0.0;
            for i in 1..simpson_end {
                if i % 2 == 1 {
                    odd += v[i];
                } else {
                    even += v[i];
                }
            }
            acc += h / 3.0 * (v[0] + v[simpson_end] + 4.0 * odd + 2.0 * even);
        }
        if simpson_end < panels {
            let j = simpson_end;
            acc += 3.0 * h / 8.0 * (v[j] + 3.0 * v[j + 1] + 3.0 * v[j + 2] + v[j + 3]);
        }
        acc
    }

    /// Cubic Lagrange interpolation; zero outside `[x_lo, x_hi]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x < self.x_lo || x > self.x_hi {
            return 0.0;
        }
        let h = self.spacing();
        let n = self.values.len();
        let pos = (x - self.x_lo) / h;
        let base = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let s = pos - base as f64;
        let mut acc = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != j {
                    w *= (s - m as f64) / (j as f64 - m as f64);
                }
            }
            acc += w * self.values[base + j];
        }
        acc
    }

    /// Integral over a sub-interval using the cubic interpolant.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        if b < a {
            return -self.integral_over(b, a);
        }
        let lo = a.max(self.x_lo);
        let hi = b.min(self.x_hi);
        if hi <= lo {
            return 0.0;
        }
        super::simpson(|x| self.interpolate(x), lo, hi, super::DEFAULT_PANELS)
    }

    /// First derivative: sixth-order central differences in the interior,
    /// fourth-order stencils at the three outermost nodes on each side.
    pub fn derivative(&self) -> GridFunction {
        let v = &self.values;
        let n = v.len();
        let h = self.spacing();
        let mut d = vec![0.0; n];
        for i in 3..n - 3 {
            d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] - 9.0 * v[i + 2]
                + v[i + 3])
                / (60.0 * h);
        }
        let fwd0 = |w: &[f64]| (-25.0 * w[0] + 48.0 * w[1] - 36.0 * w[2] + 16.0 * w[3] - 3.0 * w[4]) / (12.0 * h);
        let fwd1 = |w: &[f64]| (-3.0 * w[0] - 10.0 * w[1] + 18.0 * w[2] - 6.0 * w[3] + w[4]) / (12.0 * h);
        let cen2 = |w: &[f64]| (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) / (12.0 * h);
        d[0] = fwd0(&v[0..5]);
        d[1] = fwd1(&v[0..5]);
        d[2] = cen2(&v[0..5]);
        let rev: Vec<f64> = v[n - 5..].iter().rev().copied().collect();
        d[n - 1] = -fwd0(&rev);
        d[n - 2] = -fwd1(&rev);
        d[n - 3] = cen2(&v[n - 5..]);
        GridFunction { x_lo: self.x_lo, x_hi: self.x_hi, values: d }
    }

    /// Running integral `G(x_i) = ∫_{x_lo}^{x_i} f`, each step integrating
    /// the quintic interpolant through six neighbouring nodes.
    pub fn cumulative_integral(&self) -> GridFunction {
        let v = &self.values;
        let n = v.len();
        let h = self.spacing();
        let weights = step_weights();
        let mut out = vec![0.0; n];
        for i in 0..n - 1 {
            // stencil nodes base..base+5 containing [i, i+1]
            let base = (i as isize - 2).clamp(0, n as isize - 6) as usize;
            let w = &weights[i - base];
            let step: f64 = (0..6).map(|j| w[j] * v[base + j]).sum();
            out[i + 1] = out[i] + h * step;
        }
        GridFunction { x_lo: self.x_lo, x_hi: self.x_hi, values: out }
    }
}

/// Weights integrating the degree-5 interpolant through nodes 0..=5 (unit
/// spacing) over `[offset, offset + 1]`, for `offset = 0..5`.
fn step_weights() -> [[f64; 6]; 5] {
    let mut out = [[0.0; 6]; 5];
    for (j, row_slot) in (0..6).enumerate() {
        // Lagrange basis polynomial coefficients for node j.
        let mut coeffs = vec![1.0];
        let mut denom = 1.0;
        for m in 0..6 {
            if m == j {
                continue;
            }
            denom *= j as f64 - m as f64;
            let mut next = vec![0.0; coeffs.len() + 1];
            for (p, c) in coeffs.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * m as f64;
            }
            coeffs = next;
        }
        let antideriv = |x: f64| -> f64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| c * x.powi(p as i32 + 1) / (p as f64 + 1.0))
                .sum::<f64>()
                / denom
        };
        for offset in 0..5 {
            out[offset][row_slot] = antideriv(offset as f64 + 1.0) - antideriv(offset as f64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_grids() {
        assert!(GridFunction::new(0.0, 1.0, vec![0.0; 8]).is_err());
        assert!(GridFunction::new(1.0, 1.0, vec![0.0; 9]).is_err());
    }

    #[test]
    fn constant_integrates_to_length() {
        for n in [9, 10, 11, 12, 1001] {
            let g = GridFunction::from_fn(-0.3, 1.7, n, |_| 1.0).unwrap();
            assert!(((g.integral() - 2.0) / 2.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn integral_exact_on_cubics() {
        for n in [9, 10, 33, 34] {
            let g = GridFunction::from_fn(0.0, 1.0, n, |x| 4.0 * x * x * x - x + 0.5).unwrap();
            let exact = 1.0 - 0.5 + 0.5;
            assert!(((g.integral() - exact) / exact).abs() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn central_step_weights_are_the_classical_ones() {
        let w = step_weights()[2];
        let expect = [11.0, -93.0, 802.0, 802.0, -93.0, 11.0].map(|c| c / 1440.0);
        for j in 0..6 {
            assert!((w[j] - expect[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_and_cumulative_on_smooth_function() {
        let g = GridFunction::from_fn(0.0, 2.0, 401, |x| (3.0 * x).sin()).unwrap();
        let d = g.derivative();
        let c = g.cumulative_integral();
        for i in 0..g.len() {
            let x = g.x(i);
            assert!((d.values()[i] - 3.0 * (3.0 * x).cos()).abs() < 1e-6, "d at {x}");
            let exact = (1.0 - (3.0 * x).cos()) / 3.0;
            assert!((c.values()[i] - exact).abs() < 1e-10, "G at {x}");
        }
    }

    #[test]
    fn interpolation_and_partial_integral() {
        let g = GridFunction::from_fn(0.0, 1.0, 101, |x| x * x * x).unwrap();
        assert!((g.interpolate(0.123) - 0.123f64.powi(3)).abs() < 1e-14);
        assert!((g.integral_over(0.25, 0.75) - (0.75f64.powi(4) - 0.25f64.powi(4)) / 4.0).abs() < 1e-12);
        assert!((g.integral_over(0.75, 0.25) + (0.75f64.powi(4) - 0.25f64.powi(4)) / 4.0).abs() < 1e-12);
    }
}
