//! Explicit weakly differentiable families `t ↦ μ_t` and a numerical check of
//! `d/dt ∫φ dμ_t` at `t = 0` against a target distribution.

use std::sync::Arc;

use rayon::prelude::*;

use crate::distributions::{Atom, DensityPiece, RadonMeasure, StructuredDistribution};
use crate::error::{Error, Result};
use crate::numerics::{
    richardson_one_sided, simpson, Dilated, ErrorPowers, GridFunction, Mollifier, Polynomial, Product,
    RichardsonOptions, SharedFn, Side, SmoothFn, Trig, DEFAULT_PANELS,
};

/// Half-width of `U = (-L, L)` in the explicit family.
pub const HALF_WIDTH: f64 = 0.5;
/// Samples used when a family member is materialized as a grid density.
pub const SAMPLE_POINTS: usize = (1 << 14) + 1;

/// `(-t_max, t_max)` when two-sided, `[0, t_max)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub t_max: f64,
    pub two_sided: bool,
}

impl Validity {
    pub fn contains(&self, t: f64) -> bool {
        if self.two_sided {
            t.abs() < self.t_max
        } else {
            t >= 0.0 && t < self.t_max
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            let range = if self.two_sided { format!("(-{0}, {0})", self.t_max) } else { format!("[0, {})", self.t_max) };
            Err(Error::Domain(format!("t = {t} outside the validity interval {range}")))
        }
    }
}

/// `ρ(x, t) = χ_U(x) + (-1)^k sgn(t) |t|^q ψ^(k)(|t|^{(q-1)/(k+1)} x)` on
/// `U = (-½, ½)`.
///
/// The perturbation has support `|x| <= s |t|^{(1-q)/(k+1)}` and integrates
/// to zero, so every member is a probability density; its pairing with `φ`
/// is `t ∫ φ^(k)(y/λ) ψ(y) dy` with `λ = |t|^{(q-1)/(k+1)}`, whence the
/// derivative `φ^(k)(0)` and an error expansion in powers of
/// `|t|^{2(1-q)/(k+1)}`.
#[derive(Debug, Clone)]
pub struct ExplicitFamily {
    k: usize,
    q: f64,
    psi: Mollifier,
    t_max: f64,
}

impl ExplicitFamily {
    pub fn new(k: usize, q: f64, psi: Mollifier) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("derivative order k must be at least 1".into()));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("exponent q = {q} not in (0, 1)")));
        }
        let t_max = max_valid_t(k, q, &psi, 2.0 * HALF_WIDTH)?;
        Ok(Self { k, q, psi, t_max })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn exponent(&self) -> f64 {
        self.q
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.psi
    }

    /// Exponent `α` of the error expansion `F(t)/t = φ^(k)(0) + c₁|t|^α + …`.
    pub fn error_exponent(&self) -> f64 {
        2.0 * (1.0 - self.q) / (self.k as f64 + 1.0)
    }

    /// `|t|^{(1-q)/(k+1)} s`, the half-width of the perturbation.
    pub fn perturbation_half_width(&self, t: f64) -> f64 {
        t.abs().powf((1.0 - self.q) / (self.k as f64 + 1.0)) * self.psi.support_half_width()
    }

    fn perturbation(&self, x: f64, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let lambda = t.abs().powf((self.q - 1.0) / (self.k as f64 + 1.0));
        let sign = if self.k % 2 == 0 { 1.0 } else { -1.0 } * t.signum();
        sign * t.abs().powf(self.q) * self.psi.derivative(lambda * x, self.k).expect("order within mollifier range")
    }

    /// `ρ(x, t)`.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Validity { t_max: self.t_max, two_sided: true }.check(t)?;
        let base = if x.abs() < HALF_WIDTH { 1.0 } else { 0.0 };
        Ok(base + self.perturbation(x, t))
    }

    /// `ρ(·, t)` on `n` points over `[-½, ½]`.
    pub fn sample_density(&self, t: f64, n: usize) -> Result<GridFunction> {
        Validity { t_max: self.t_max, two_sided: true }.check(t)?;
        GridFunction::from_fn(-HALF_WIDTH, HALF_WIDTH, n, |x| 1.0 + self.perturbation(x, t))
    }

    /// `∫ φ dμ_t - ∫ φ dμ_0`, integrated over the perturbation support only.
    pub fn increment(&self, phi: &dyn SmoothFn, t: f64) -> Result<f64> {
        Validity { t_max: self.t_max, two_sided: true }.check(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let r = self.perturbation_half_width(t);
        Ok(simpson(|x| phi.value(x) * self.perturbation(x, t), -r, r, DEFAULT_PANELS))
    }
}

/// Largest `t_max` keeping `ρ(·, t) >= 0` and the perturbation inside `U`
/// for `|t| < t_max`:
/// `min((sup|ψ^(k)|)^{-1/q}, (|U| / 2s)^{(k+1)/(1-q)})`.
pub fn max_valid_t(k: usize, q: f64, psi: &Mollifier, u_length: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) || !(u_length > 0.0) {
        return Err(Error::Domain(format!("invalid parameters q = {q}, |U| = {u_length}")));
    }
    let amplitude = psi.sup_derivative(k)?.powf(-1.0 / q);
    let containment = (0.5 * u_length / psi.support_half_width()).powf((k as f64 + 1.0) / (1.0 - q));
    Ok(amplitude.min(containment))
}

#[derive(Debug, Clone)]
pub enum MeasureFamily {
    /// `μ_t = δ_t`.
    Delta,
    Explicit(ExplicitFamily),
    /// `μ_t = μ + t ν` for `t >= 0`.
    Affine { base: RadonMeasure, direction: RadonMeasure },
    /// `μ_t = (1 + c t) μ` for `|t| < 1/|c|`.
    Scaling { base: RadonMeasure, rate: f64 },
    /// `μ_t / μ_t(ℝ)`.
    Normalized(Box<MeasureFamily>),
}

pub fn delta_family() -> MeasureFamily {
    MeasureFamily::Delta
}

pub fn explicit_family(k: usize, q: f64, psi: Mollifier) -> Result<MeasureFamily> {
    Ok(MeasureFamily::Explicit(ExplicitFamily::new(k, q, psi)?))
}

pub fn affine_family(base: RadonMeasure, direction: RadonMeasure) -> MeasureFamily {
    MeasureFamily::Affine { base, direction }
}

pub fn scaling_family(base: RadonMeasure, rate: f64) -> Result<MeasureFamily> {
    if !rate.is_finite() {
        return Err(Error::Domain(format!("scaling rate {rate} is not finite")));
    }
    Ok(MeasureFamily::Scaling { base, rate })
}

/// Divide each member by its mass; the initial mass must be positive.
pub fn normalize_to_probability(family: MeasureFamily) -> Result<MeasureFamily> {
    let m0 = family.mass(0.0)?;
    if !(m0 > 0.0) {
        return Err(Error::Domain(format!("initial mass {m0} cannot be normalized")));
    }
    Ok(match family {
        MeasureFamily::Normalized(_) => family,
        other => MeasureFamily::Normalized(Box::new(other)),
    })
}

fn one() -> Polynomial {
    Polynomial::constant(1.0)
}

impl MeasureFamily {
    pub fn name(&self) -> String {
        match self {
            MeasureFamily::Delta => "delta".into(),
            MeasureFamily::Explicit(e) => format!("explicit(k={}, q={})", e.k, e.q),
            MeasureFamily::Affine { .. } => "affine".into(),
            MeasureFamily::Scaling { rate, .. } => format!("scaling(c={rate})"),
            MeasureFamily::Normalized(inner) => format!("normalized({})", inner.name()),
        }
    }

    pub fn validity(&self) -> Validity {
        match self {
            MeasureFamily::Delta => Validity { t_max: f64::INFINITY, two_sided: true },
            MeasureFamily::Explicit(e) => Validity { t_max: e.t_max, two_sided: true },
            MeasureFamily::Affine { .. } => Validity { t_max: f64::INFINITY, two_sided: false },
            MeasureFamily::Scaling { rate, .. } => {
                Validity { t_max: if *rate == 0.0 { f64::INFINITY } else { 1.0 / rate.abs() }, two_sided: true }
            }
            MeasureFamily::Normalized(inner) => inner.validity(),
        }
    }

    pub fn initial(&self) -> Result<RadonMeasure> {
        match self {
            MeasureFamily::Delta => Ok(RadonMeasure::dirac(0.0)),
            MeasureFamily::Explicit(_) => RadonMeasure::uniform(-HALF_WIDTH, HALF_WIDTH),
            MeasureFamily::Affine { base, .. } | MeasureFamily::Scaling { base, .. } => Ok(base.clone()),
            MeasureFamily::Normalized(inner) => {
                let mu = inner.initial()?;
                let m = mu.mass();
                mu.scaled(1.0 / m)
            }
        }
    }

    /// The declared derivative `η` at `t = 0`.
    pub fn target(&self) -> Result<StructuredDistribution> {
        match self {
            MeasureFamily::Delta => Ok(StructuredDistribution::atom(0.0, 1, -1.0)),
            MeasureFamily::Explicit(e) => {
                let sign = if e.k % 2 == 0 { 1.0 } else { -1.0 };
                Ok(StructuredDistribution::atom(0.0, e.k, sign))
            }
            MeasureFamily::Affine { direction, .. } => direction.as_distribution(),
            MeasureFamily::Scaling { base, rate } => Ok(base.as_distribution()?.scaled(*rate)),
            MeasureFamily::Normalized(inner) => {
                // (η m₀ - ⟨η,1⟩ μ₀) / m₀²
                let eta = inner.target()?;
                let mu0 = inner.initial()?;
                let m0 = mu0.mass();
                let w = eta.total_action_on_one();
                Ok(eta.scaled(1.0 / m0).plus(&mu0.as_distribution()?.scaled(-w / (m0 * m0))))
            }
        }
    }

    /// `∫ φ dμ_t`.
    pub fn integral(&self, phi: &dyn SmoothFn, t: f64) -> Result<f64> {
        self.validity().check(t)?;
        match self {
            MeasureFamily::Delta => Ok(phi.value(t)),
            MeasureFamily::Explicit(e) => {
                let base = simpson(|x| phi.value(x), -HALF_WIDTH, HALF_WIDTH, DEFAULT_PANELS);
                Ok(base + e.increment(phi, t)?)
            }
            MeasureFamily::Affine { base, direction } => Ok(base.integrate(phi)? + t * direction.integrate(phi)?),
            MeasureFamily::Scaling { base, rate } => Ok((1.0 + rate * t) * base.integrate(phi)?),
            MeasureFamily::Normalized(inner) => {
                let m = inner.mass(t)?;
                if !(m > 0.0) {
                    return Err(Error::Domain(format!("mass {m} at t = {t} cannot be normalized")));
                }
                Ok(inner.integral(phi, t)? / m)
            }
        }
    }

    /// `∫ φ dμ_t - ∫ φ dμ_0`, computed without forming the difference where
    /// the family allows it.
    pub fn increment(&self, phi: &dyn SmoothFn, t: f64) -> Result<f64> {
        self.validity().check(t)?;
        match self {
            MeasureFamily::Delta => Ok(phi.value(t) - phi.value(0.0)),
            MeasureFamily::Explicit(e) => e.increment(phi, t),
            MeasureFamily::Affine { direction, .. } => Ok(t * direction.integrate(phi)?),
            MeasureFamily::Scaling { base, rate } => Ok(rate * t * base.integrate(phi)?),
            MeasureFamily::Normalized(inner) => {
                let i0 = inner.integral(phi, 0.0)?;
                let m0 = inner.mass(0.0)?;
                let di = inner.increment(phi, t)?;
                let dm = inner.increment(&one(), t)?;
                let m = m0 + dm;
                if !(m > 0.0) {
                    return Err(Error::Domain(format!("mass {m} at t = {t} cannot be normalized")));
                }
                Ok((di * m0 - i0 * dm) / (m0 * m))
            }
        }
    }

    pub fn mass(&self, t: f64) -> Result<f64> {
        match self {
            MeasureFamily::Normalized(_) => {
                self.validity().check(t)?;
                Ok(1.0)
            }
            MeasureFamily::Explicit(_) => {
                // the perturbation integrates to zero
                self.validity().check(t)?;
                Ok(2.0 * HALF_WIDTH)
            }
            _ => self.integral(&one(), t),
        }
    }

    /// `μ_t` as a measure; the explicit family is sampled on
    /// [`SAMPLE_POINTS`] nodes.
    pub fn sample(&self, t: f64) -> Result<RadonMeasure> {
        self.validity().check(t)?;
        match self {
            MeasureFamily::Delta => Ok(RadonMeasure::dirac(t)),
            MeasureFamily::Explicit(e) => {
                RadonMeasure::new(vec![], vec![DensityPiece::Grid(e.sample_density(t, SAMPLE_POINTS)?)])
            }
            MeasureFamily::Affine { base, direction } => {
                let b = base.as_distribution()?;
                let d = direction.as_distribution()?.scaled(t);
                let sum = b.plus(&d);
                RadonMeasure::new(
                    sum.atoms().iter().map(|a: &Atom| (a.location, a.coeff)).collect(),
                    sum.density().to_vec(),
                )
            }
            MeasureFamily::Scaling { base, rate } => base.scaled(1.0 + rate * t),
            MeasureFamily::Normalized(inner) => {
                let mu = inner.sample(t)?;
                let m = mu.mass();
                if !(m > 0.0) {
                    return Err(Error::Domain(format!("mass {m} at t = {t} cannot be normalized")));
                }
                mu.scaled(1.0 / m)
            }
        }
    }

    /// Error expansion assumed by the derivative extrapolation.
    pub fn error_powers(&self) -> ErrorPowers {
        match self {
            MeasureFamily::Explicit(e) => ErrorPowers::Multiples(e.error_exponent()),
            MeasureFamily::Normalized(inner) => inner.error_powers(),
            _ => ErrorPowers::Integer,
        }
    }

    /// Ladder start `min(t_max / 4, 0.1)`.
    pub fn default_t_start(&self) -> f64 {
        (self.validity().t_max / 4.0).min(0.1)
    }
}

/// One row of [`verify_weak_derivative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub estimate: f64,
    pub error_bound: f64,
    pub target: f64,
    pub abs_err: f64,
}

impl DerivativeCheck {
    /// `abs_err / |target|`, or `abs_err` when the target vanishes.
    pub fn rel_err(&self) -> f64 {
        if self.target == 0.0 {
            self.abs_err
        } else {
            self.abs_err / self.target.abs()
        }
    }
}

/// Richardson estimate of `d/dt ∫φ dμ_t` at `0±` for each battery function,
/// against `⟨η, φ⟩` with `η = family.target()`.
pub fn verify_weak_derivative(family: &MeasureFamily, battery: &[SharedFn], side: Side) -> Result<Vec<DerivativeCheck>> {
    if battery.is_empty() {
        return Err(Error::Precondition("empty test-function battery".into()));
    }
    let validity = family.validity();
    if side == Side::Left && !validity.two_sided {
        return Err(Error::Domain(format!("{} is one-sided; no derivative from the left", family.name())));
    }
    let eta = family.target()?;
    let opts = RichardsonOptions::new(family.default_t_start()).with_powers(family.error_powers());
    battery
        .par_iter()
        .map(|phi| {
            let phi: &dyn SmoothFn = phi.as_ref();
            let mut failure = None;
            let ex = richardson_one_sided(
                |t| match family.increment(phi, t) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                },
                0.0,
                side,
                &opts,
            )
            .map_err(|e| failure.take().unwrap_or(e))?;
            let target = eta.pair(phi)?;
            Ok(DerivativeCheck { estimate: ex.estimate, error_bound: ex.error_bound, target, abs_err: (ex.estimate - target).abs() })
        })
        .collect()
}

/// A named battery entry.
#[derive(Clone)]
pub struct BatteryFn {
    pub id: String,
    pub f: SharedFn,
}

/// Ten smooth test functions `P(x) ψ(x/2)` and `sin(ωx + θ) ψ(x/2)`.
///
/// The cutoff equals 1 on `|x| <= 2/3`, so derivatives at 0 are those of the
/// polynomial or sine factor, and all of orders 0 to 3 are nonzero.
pub fn standard_battery() -> Vec<BatteryFn> {
    let cutoff = Dilated::new(Mollifier::new(0.5).expect("valid ratio"), 0.0, 2.0);
    let poly = |c: &[f64]| -> SharedFn { Arc::new(Product::new(Polynomial::new(c.to_vec()), cutoff.clone())) };
    let trig = |w: f64, th: f64| -> SharedFn {
        Arc::new(Product::new(Trig { amplitude: 1.0, frequency: w, phase: th }, cutoff.clone()))
    };
    let entries: Vec<(&str, SharedFn)> = vec![
        ("exp_taylor3", poly(&[1.0, 1.0, 0.5, 1.0 / 6.0])),
        ("cubic_a", poly(&[0.3, 1.0, -2.0, 0.5])),
        ("sin_1", trig(1.0, 0.3)),
        ("sin_2", trig(2.0, 1.0)),
        ("sin_3", trig(3.0, -0.7)),
        ("quartic_shift", poly(&[0.0016, -0.032, 0.24, -0.8, 1.0])),
        ("sin_5", trig(5.0, 0.4)),
        ("quintic", poly(&[2.0, -1.0, 3.0, -1.0, 0.0, 1.0])),
        ("sin_half", trig(0.5, 2.0)),
        ("cubic_b", poly(&[0.5, -1.0, 1.0, 1.0])),
    ];
    entries.into_iter().map(|(id, f)| BatteryFn { id: id.to_string(), f }).collect()
}
