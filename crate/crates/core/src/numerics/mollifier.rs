//! Even plateau mollifier with closed-form derivatives.
//!
//! With `T(u) = exp(-1/u)` for `u > 0` (and 0 otherwise) the smooth step
//! `S(u) = T(u) / (T(u) + T(1 - u))` rises from 0 at `u = 0` to 1 at `u = 1`.
//! The mollifier is
//!
//! ```text
//! ψ(x) = 1                       |x| <= a
//!        S((s - |x|) / (s - a))  a < |x| < s
//!        0                       |x| >= s
//! ```
//!
//! with `a = r s`. Since `S(u) + S(1 - u) = 1`, `∫ψ = a + s`, so unit mass
//! fixes `s = 1 / (1 + r)`.
//!
//! Derivatives of `T` are `P_j(1/u) exp(-1/u)` with `P_0 = 1` and
//! `P_{j+1}(w) = w² (P_j(w) - P_j'(w))`; derivatives of `S` follow from the
//! Leibniz rule applied to `T = S · (T(u) + T(1 - u))`.

use super::quadrature::{gauss_legendre, gauss_legendre_composite, simpson};
use super::smooth::{binomial, check_order, SmoothFn};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 8;
const HARD_MAX_ORDER: usize = 16;
/// Beyond this `exp(-w)` is below every representable derivative scale.
const EXP_CUTOFF: f64 = 708.0;

#[derive(Debug, Clone)]
pub struct Mollifier {
    ratio: f64,
    plateau: f64,
    support: f64,
    max_order: usize,
    /// Coefficients of `P_j` in ascending powers of `w`.
    polys: Vec<Vec<f64>>,
    /// `sup |ψ^(k)|` for `k = 0..=max_order`.
    sups: Vec<f64>,
    gl: (Vec<f64>, Vec<f64>),
    /// `∫_{-s}^{-a} y ψ(y) dy`.
    moment_tail: f64,
}

impl Mollifier {
    /// Mollifier with plateau half-width `r·s` and derivatives up to
    /// [`DEFAULT_MAX_ORDER`].
    pub fn new(shape_ratio: f64) -> Result<Self> {
        Self::with_max_order(shape_ratio, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(shape_ratio: f64, max_order: usize) -> Result<Self> {
        if !(shape_ratio > 0.0 && shape_ratio < 1.0) {
            return Err(Error::Construction(format!("shape ratio {shape_ratio} not in (0, 1)")));
        }
        if max_order > HARD_MAX_ORDER {
            return Err(Error::Construction(format!(
                "derivative order {max_order} above supported maximum {HARD_MAX_ORDER}"
            )));
        }
        let support = 1.0 / (1.0 + shape_ratio);
        let plateau = shape_ratio * support;

        let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
        for j in 0..max_order {
            let p = &polys[j];
            let mut next = vec![0.0; p.len() + 2];
            for (i, c) in p.iter().enumerate() {
                next[i + 2] += c;
                if i > 0 {
                    next[i + 1] -= i as f64 * c;
                }
            }
            polys.push(next);
        }

        let mut moll = Self {
            ratio: shape_ratio,
            plateau,
            support,
            max_order,
            polys,
            sups: Vec::new(),
            gl: gauss_legendre(16),
            moment_tail: 0.0,
        };
        moll.moment_tail = moll.transition_moment(-plateau);

        let mass = simpson(|x| moll.eval(x), -support, support, 1 << 14);
        if !((mass - 1.0).abs() <= 1e-12) {
            return Err(Error::Construction(format!("mollifier mass {mass} differs from 1")));
        }
        moll.sups = (0..=max_order).map(|k| moll.compute_sup(k)).collect();
        Ok(moll)
    }

    pub fn shape_ratio(&self) -> f64 {
        self.ratio
    }

    /// Half-width `a` of the region where `ψ ≡ 1`.
    pub fn plateau_half_width(&self) -> f64 {
        self.plateau
    }

    /// Half-width `s` of the support.
    pub fn support_half_width(&self) -> f64 {
        self.support
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn transition_width(&self) -> f64 {
        self.support - self.plateau
    }

    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.plateau {
            1.0
        } else if ax >= self.support {
            0.0
        } else {
            step_value((self.support - ax) / self.transition_width())
        }
    }

    /// `ψ^(k)(x)`.
    pub fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        check_order(k, Some(self.max_order))?;
        if k == 0 {
            return Ok(self.eval(x));
        }
        let ax = x.abs();
        if ax <= self.plateau || ax >= self.support {
            return Ok(0.0);
        }
        let u = (self.support - ax) / self.transition_width();
        let jets = self.step_jets(u, k);
        let sign = if x > 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        Ok(sign * jets[k] / self.transition_width().powi(k as i32))
    }

    /// `[ψ(x), ψ'(x), …, ψ^(k)(x)]`.
    pub fn jets(&self, x: f64, k: usize) -> Result<Vec<f64>> {
        check_order(k, Some(self.max_order))?;
        let ax = x.abs();
        let mut out = vec![0.0; k + 1];
        if ax <= self.plateau {
            out[0] = 1.0;
            return Ok(out);
        }
        if ax >= self.support {
            return Ok(out);
        }
        let w = self.transition_width();
        let u = (self.support - ax) / w;
        let jets = self.step_jets(u, k);
        let dir = if x > 0.0 { -1.0 / w } else { 1.0 / w };
        let mut scale = 1.0;
        for j in 0..=k {
            out[j] = jets[j] * scale;
            scale *= dir;
        }
        Ok(out)
    }

    /// `sup_x |ψ^(k)(x)|`, computed once at construction.
    pub fn sup_derivative(&self, k: usize) -> Result<f64> {
        check_order(k, Some(self.max_order))?;
        Ok(self.sups[k])
    }

    /// Cumulative mass `∫_{-∞}^x ψ`.
    pub fn primitive(&self, x: f64) -> f64 {
        let w = self.transition_width();
        if x <= -self.support {
            0.0
        } else if x <= -self.plateau {
            w * self.step_integral((self.support + x) / w)
        } else if x <= self.plateau {
            0.5 * w + (x + self.plateau)
        } else if x < self.support {
            1.0 - self.primitive(-x)
        } else {
            1.0
        }
    }

    /// `∫_{-∞}^x Ψ`, the second primitive. Equals `x` for `x >= s`.
    pub fn second_primitive(&self, x: f64) -> f64 {
        if x <= -self.support {
            0.0
        } else if x > 0.0 {
            // Ψ(y) + Ψ(-y) = 1
            x + self.second_primitive(-x)
        } else {
            // integration by parts: ∫_{-s}^x Ψ = x Ψ(x) - ∫_{-s}^x y ψ(y) dy
            let moment = if x <= -self.plateau {
                self.transition_moment(x)
            } else {
                self.moment_tail + 0.5 * (x * x - self.plateau * self.plateau)
            };
            x * self.primitive(x) - moment
        }
    }

    /// `∫_{-s}^x y ψ(y) dy` for `x` in the left transition.
    fn transition_moment(&self, x: f64) -> f64 {
        let w = self.transition_width();
        let s = self.support;
        gauss_legendre_composite(|y| y * step_value((s + y) / w), -s, x, 8, &self.gl)
    }

    /// `∫_0^u S`, using `∫_0^u S = u - 1/2 + ∫_0^{1-u} S` above one half.
    fn step_integral(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u > 0.5 {
            u - 0.5 + self.step_integral(1.0 - u)
        } else {
            gauss_legendre_composite(step_value, 0.0, u, 8, &self.gl)
        }
    }

    pub fn scaled(&self, eps: f64) -> Result<ScaledMollifier> {
        ScaledMollifier::new(self.clone(), eps)
    }

    /// `[S(u), S'(u), …, S^(n)(u)]`.
    fn step_jets(&self, u: f64, n: usize) -> Vec<f64> {
        if u > 0.5 {
            // S(u) = 1 - S(1 - u) keeps the tiny values near u = 1 exact
            let mut s = self.step_jets_near_zero(1.0 - u, n);
            s[0] = 1.0 - s[0];
            for (j, v) in s.iter_mut().enumerate().skip(1) {
                if j % 2 == 0 {
                    *v = -*v;
                }
            }
            return s;
        }
        self.step_jets_near_zero(u, n)
    }

    fn step_jets_near_zero(&self, u: f64, n: usize) -> Vec<f64> {
        let t = self.exp_jets(u, n);
        let tb = self.exp_jets(1.0 - u, n);
        let d: Vec<f64> = (0..=n)
            .map(|j| if j % 2 == 0 { t[j] + tb[j] } else { t[j] - tb[j] })
            .collect();
        let mut s = vec![0.0; n + 1];
        for m in 0..=n {
            let mut acc = t[m];
            for j in 0..m {
                acc -= binomial(m, j) * s[j] * d[m - j];
            }
            s[m] = acc / d[0];
        }
        s
    }

    /// `[T(u), T'(u), …, T^(n)(u)]`.
    fn exp_jets(&self, u: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        if u <= 0.0 {
            return out;
        }
        let w = 1.0 / u;
        if w > EXP_CUTOFF {
            return out;
        }
        let e = (-w).exp();
        for (j, slot) in out.iter_mut().enumerate() {
            let p = &self.polys[j];
            let mut acc = 0.0;
            for c in p.iter().rev() {
                acc = acc * w + c;
            }
            *slot = acc * e;
        }
        out
    }

    fn compute_sup(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let f = |u: f64| self.step_jets(u, k)[k].abs();
        let n = 4000;
        let mut best = (0.0, 0.5);
        for i in 1..n {
            let u = i as f64 / n as f64;
            let v = f(u);
            if v > best.0 {
                best = (v, u);
            }
        }
        // golden-section refinement around the best sample
        let (mut lo, mut hi) = ((best.1 - 1.0 / n as f64).max(0.0), (best.1 + 1.0 / n as f64).min(1.0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        for _ in 0..80 {
            if f(c) > f(d) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - g * (hi - lo);
            d = lo + g * (hi - lo);
        }
        let refined = f(0.5 * (lo + hi)).max(best.0);
        refined / self.transition_width().powi(k as i32)
    }
}

fn step_value(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let t = |v: f64| if 1.0 / v > EXP_CUTOFF { 0.0 } else { (-1.0 / v).exp() };
    let a = t(u);
    a / (a + t(1.0 - u))
}

impl SmoothFn for Mollifier {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        Mollifier::derivative(self, x, order)
    }
    fn max_order(&self) -> Option<usize> {
        Some(self.max_order)
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((-self.support, self.support))
    }
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// `ψ_ε(x) = ψ(x/ε)/ε`.
#[derive(Debug, Clone)]
pub struct ScaledMollifier {
    base: Mollifier,
    eps: f64,
}

impl ScaledMollifier {
    pub fn new(base: Mollifier, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("mollification scale {eps} not in (0, 1)")));
        }
        Ok(Self { base, eps })
    }

    pub fn base(&self) -> &Mollifier {
        &self.base
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Half-width `ε s` of the support.
    pub fn support_half_width(&self) -> f64 {
        self.eps * self.base.support
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base.eval(x / self.eps) / self.eps
    }

    /// `ψ_ε^(k)(x) = ε^{-(k+1)} ψ^(k)(x/ε)`.
    pub fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        Ok(self.base.derivative(x / self.eps, k)? / self.eps.powi(k as i32 + 1))
    }

    /// `∫_{-∞}^x ψ_ε`.
    pub fn primitive(&self, x: f64) -> f64 {
        self.base.primitive(x / self.eps)
    }

    /// `∫_{-∞}^x ∫_{-∞}^y ψ_ε`.
    pub fn second_primitive(&self, x: f64) -> f64 {
        self.eps * self.base.second_primitive(x / self.eps)
    }

    pub fn sup_derivative(&self, k: usize) -> Result<f64> {
        Ok(self.base.sup_derivative(k)? / self.eps.powi(k as i32 + 1))
    }
}

impl SmoothFn for ScaledMollifier {
    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        ScaledMollifier::derivative(self, x, order)
    }
    fn max_order(&self) -> Option<usize> {
        Some(self.base.max_order)
    }
    fn support(&self) -> Option<(f64, f64)> {
        let s = self.support_half_width();
        Some((-s, s))
    }
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
}
