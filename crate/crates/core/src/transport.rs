//! Mollified representatives `f_ε = ψ_ε * μ`, `g_ε = ψ_ε * η` and the 1D
//! velocity solving `g_ε + (f_ε v^ε)' = 0`.
//!
//! In one dimension the equation integrates to `f_ε v^ε = -G` with
//! `G(x) = ∫_{-∞}^x g_ε`. A compactly supported solution exists iff
//! `G` vanishes at the right end (`⟨η, 1⟩ = 0`) and wherever `f_ε` does.
//! [`VelocityRepresentative`] takes `G` from the closed-form primitive of
//! the mollified distribution; [`solve_velocity`] integrates sampled data.
//!
//! Only one representative per `(μ, η, ψ, ε)` is built: the convolution.

use rayon::prelude::*;

use crate::distributions::{Mollified, RadonMeasure, StructuredDistribution, SupportSet};
use crate::error::{Error, Result};
use crate::families::BatteryFn;
use crate::numerics::{GridFunction, GridSpec, Mollifier, ScaledMollifier, MIN_GRID_POINTS};

/// Mask threshold relative to `max f_ε`.
pub const MASK_TOL: f64 = 1e-8;
/// Tolerance on `G` at the right end and over masked gaps, relative to `sup |g_ε|`.
pub const ACTION_TOL: f64 = 1e-8;
/// Continuity-equation residual bound, relative to `sup |g_ε|`.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Mass tolerance on `∫ f_ε`.
pub const MASS_TOL: f64 = 1e-8;
pub const DEFAULT_LADDER: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];
/// Grid nodes per support half-width of the narrowest mollifier.
pub const NODES_PER_HALF_WIDTH: f64 = 600.0;

/// Ladder must be strictly decreasing inside `(0, 1)`.
pub fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::Precondition("empty ε ladder".into()));
    }
    if ladder.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::Precondition(format!("ε ladder {ladder:?} leaves (0, 1)")));
    }
    if ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Precondition(format!("ε ladder {ladder:?} is not strictly decreasing")));
    }
    Ok(())
}

/// Grid covering `supp μ ∪ supp η` plus two support half-widths of the
/// widest mollifier, spacing `ε_min s / 600`. The sixth-order residual
/// stencil needs that many nodes to resolve `η` of order 3 to 1e-6.
pub fn ladder_grid(support: &SupportSet, psi: &Mollifier, ladder: &[f64]) -> Result<GridSpec> {
    validate_ladder(ladder)?;
    let s = psi.support_half_width();
    let (lo, hi) = support
        .hull()
        .ok_or_else(|| Error::Precondition("measure has empty support".into()))?;
    let margin = 2.0 * ladder[0] * s;
    let eps_min = ladder[ladder.len() - 1];
    GridSpec::with_spacing(lo - margin, hi + margin, eps_min * s / NODES_PER_HALF_WIDTH)
}

/// `ψ_ε * μ` on `spec`.
pub fn smooth_measure(mu: &RadonMeasure, psi: &ScaledMollifier, spec: &GridSpec) -> Result<GridFunction> {
    let as_dist = mu.as_distribution()?;
    let mut f = Mollified::new(psi, &as_dist)?.sample(spec)?;
    // exact zeros instead of rounding noise from box differences
    f.values_mut().iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(f)
}

fn check_containment(support: &SupportSet, eta: &StructuredDistribution) -> Result<()> {
    for a in eta.atoms() {
        if !support.contains(a.location) {
            return Err(Error::SupportViolation(format!(
                "atom {} ∂^{} δ at {} lies outside the support of μ",
                a.coeff, a.order, a.location
            )));
        }
    }
    for d in eta.density() {
        let (lo, hi) = d.interval();
        if !d.support().is_subset_of(support) {
            return Err(Error::SupportViolation(format!(
                "density on [{lo}, {hi}] is not contained in the support of μ"
            )));
        }
    }
    Ok(())
}

/// `ψ_ε * η` on `spec`, after checking `supp η ⊆ supp μ` (which gives
/// `supp g_ε ⊆ supp f_ε`).
pub fn smooth_distribution(
    eta: &StructuredDistribution,
    psi: &ScaledMollifier,
    mu_support: &SupportSet,
    spec: &GridSpec,
) -> Result<GridFunction> {
    check_containment(mu_support, eta)?;
    Mollified::new(psi, eta)?.sample(spec)
}

/// `f > MASK_TOL · max f`.
pub fn support_mask(f: &GridFunction) -> Vec<bool> {
    let cut = MASK_TOL * f.max();
    f.values().iter().map(|v| *v > cut).collect()
}

/// `v = -G / f` on the mask, zero elsewhere, after checking that `G`
/// vanishes at the right end and off the mask.
fn velocity_from_primitive(f: &GridFunction, big_g: &GridFunction, sup_g: f64) -> Result<(GridFunction, Vec<bool>)> {
    let tol = ACTION_TOL * sup_g;
    let last = big_g.values()[big_g.len() - 1];
    if last.abs() > tol {
        return Err(Error::NoCompactSolution { residual: last });
    }
    let mask = support_mask(f);
    if let Some(i) = (0..f.len()).find(|&i| !mask[i] && big_g.values()[i].abs() > tol) {
        return Err(Error::SupportViolation(format!(
            "flux {:e} at x = {} where the smoothed density vanishes",
            big_g.values()[i],
            f.x(i)
        )));
    }
    let values = (0..f.len())
        .map(|i| if mask[i] { -big_g.values()[i] / f.values()[i] } else { 0.0 })
        .collect();
    Ok((GridFunction::new(f.x_lo(), f.x_hi(), values)?, mask))
}

/// Velocity from sampled `f_ε, g_ε` via the running integral of `g_ε`.
pub fn solve_velocity(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.spec() != g.spec() {
        return Err(Error::Domain("f and g live on different grids".into()));
    }
    Ok(velocity_from_primitive(f, &g.cumulative_integral(), g.sup_abs())?.0)
}

/// `sup_mask |g + (f v)'|`. The product is differentiated separately on
/// each maximal run of masked nodes, so the cut-off at the mask edge never
/// enters a stencil; runs too short for a stencil are skipped.
pub fn continuity_residual(f: &GridFunction, g: &GridFunction, v: &GridFunction, mask: &[bool]) -> Result<f64> {
    let h = f.spacing();
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < mask.len() {
        if !mask[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < mask.len() && mask[i] {
            i += 1;
        }
        if i - start < MIN_GRID_POINTS {
            continue;
        }
        let flux: Vec<f64> = (start..i).map(|j| f.values()[j] * v.values()[j]).collect();
        let run = GridFunction::new(f.x(start), f.x(start) + (i - 1 - start) as f64 * h, flux)?;
        let d = run.derivative();
        for (j, dj) in d.values().iter().enumerate() {
            worst = worst.max((g.values()[start + j] + dj).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityLevel {
    pub eps: f64,
    pub f: GridFunction,
    pub g: GridFunction,
    /// `G = ∫_{-∞}^x g_ε`.
    pub flux_primitive: GridFunction,
    pub v: GridFunction,
    pub mask: Vec<bool>,
    pub mass: f64,
    /// `sup_mask |g_ε + (f_ε v^ε)'|`.
    pub residual: f64,
    pub sup_g: f64,
}

impl VelocityLevel {
    pub fn sup_v(&self) -> f64 {
        self.v.sup_abs()
    }

    pub fn mass_ok(&self) -> bool {
        (self.mass - 1.0).abs() <= MASS_TOL && self.f.min() >= 0.0
    }

    pub fn residual_ok(&self) -> bool {
        self.residual <= RESIDUAL_TOL * self.sup_g
    }
}

/// Per-ε mollified data and velocity for a probability measure `μ` and a
/// distribution `η` with `supp η ⊆ supp μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityRepresentative {
    pub levels: Vec<VelocityLevel>,
    pub grid: GridSpec,
}

impl VelocityRepresentative {
    pub fn build(mu: &RadonMeasure, eta: &StructuredDistribution, psi: &Mollifier, ladder: &[f64]) -> Result<Self> {
        let support = mu.support().union(&eta.support());
        let grid = ladder_grid(&support, psi, ladder)?;
        Self::build_on(mu, eta, psi, ladder, grid)
    }

    pub fn build_on(
        mu: &RadonMeasure,
        eta: &StructuredDistribution,
        psi: &Mollifier,
        ladder: &[f64],
        grid: GridSpec,
    ) -> Result<Self> {
        validate_ladder(ladder)?;
        if (mu.mass() - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("μ has mass {} instead of 1", mu.mass())));
        }
        check_containment(mu.support(), eta)?;
        let levels = ladder
            .par_iter()
            .map(|&eps| Self::level(mu, eta, psi, eps, &grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { levels, grid })
    }

    fn level(mu: &RadonMeasure, eta: &StructuredDistribution, psi: &Mollifier, eps: f64, grid: &GridSpec) -> Result<VelocityLevel> {
        let psi_eps = psi.scaled(eps)?;
        let f = smooth_measure(mu, &psi_eps, grid)?;
        let m = Mollified::new(&psi_eps, eta)?;
        let g = m.sample(grid)?;
        let big_g = m.sample_primitive(grid)?;
        let sup_g = g.sup_abs();
        let (v, mask) = velocity_from_primitive(&f, &big_g, sup_g)?;
        let residual = continuity_residual(&f, &g, &v, &mask)?;
        Ok(VelocityLevel { eps, mass: f.integral(), f, g, flux_primitive: big_g, v, mask, residual, sup_g })
    }

    pub fn ladder(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.eps).collect()
    }

    pub fn velocities(&self) -> Vec<GridFunction> {
        self.levels.iter().map(|l| l.v.clone()).collect()
    }

    pub fn densities(&self) -> Vec<GridFunction> {
        self.levels.iter().map(|l| l.f.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeratenessFit {
    pub c: f64,
    pub exponent: f64,
    pub r_squared: f64,
}

fn sup_derivative_on(f: &GridFunction, k: (f64, f64), order: usize) -> f64 {
    let mut d = f.clone();
    for _ in 0..order {
        d = d.derivative();
    }
    d.sup_abs_on(k.0, k.1)
}

fn require_family(ladder: &[f64], family: &[GridFunction]) -> Result<()> {
    validate_ladder(ladder)?;
    if ladder.len() != family.len() {
        return Err(Error::Precondition("one grid function per ε required".into()));
    }
    if ladder.len() < 5 || (ladder[0] / ladder[ladder.len() - 1]).log10() < 1.5 {
        return Err(Error::Precondition(format!(
            "ladder {ladder:?} needs at least 5 values spanning 1.5 decades"
        )));
    }
    Ok(())
}

/// Least-squares fit `log sup_K |∂^I f_ε| = log c + N (-log ε)`.
pub fn moderateness_estimate(
    ladder: &[f64],
    family: &[GridFunction],
    k: (f64, f64),
    order: usize,
) -> Result<ModeratenessFit> {
    require_family(ladder, family)?;
    let sups: Vec<f64> = family.iter().map(|f| sup_derivative_on(f, k, order)).collect();
    if let Some(bad) = sups.iter().find(|s| !s.is_finite() || **s <= 0.0) {
        return Err(Error::NonFinite { at: *bad });
    }
    let xs: Vec<f64> = ladder.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // a constant family fits exactly
    let r_squared = if syy <= 1e-24 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ModeratenessFit { c: intercept.exp(), exponent: slope, r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegligibilityVerdict {
    pub q: usize,
    pub bounded: bool,
    /// `sup_K |∂^I f_ε| ε^{-q}` at the smallest ε.
    pub last_ratio: f64,
}

/// For each `q <= q_max`, whether `sup_K |∂^I f_ε| ε^{-q}` stops growing
/// over the second half of the ladder.
pub fn negligibility_test(
    ladder: &[f64],
    family: &[GridFunction],
    k: (f64, f64),
    order: usize,
    q_max: usize,
) -> Result<Vec<NegligibilityVerdict>> {
    require_family(ladder, family)?;
    let sups: Vec<f64> = family.iter().map(|f| sup_derivative_on(f, k, order)).collect();
    let tail_start = ladder.len() / 2;
    Ok((0..=q_max)
        .map(|q| {
            let ratios: Vec<f64> = sups.iter().zip(ladder).map(|(s, e)| s * e.powi(-(q as i32))).collect();
            let bounded = ratios[tail_start..]
                .windows(2)
                .all(|w| w[1] <= w[0] * (1.0 + 1e-6) || w[1] <= f64::MIN_POSITIVE);
            NegligibilityVerdict { q, bounded, last_ratio: ratios[ratios.len() - 1] }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRow {
    pub id: String,
    pub target: f64,
    /// `|∫ φ f_ε - ⟨η, φ⟩|` per ε.
    pub residuals: Vec<f64>,
    pub decreasing: bool,
}

impl AssociationRow {
    pub fn last(&self) -> f64 {
        self.residuals[self.residuals.len() - 1]
    }
}

/// Residual table of `∫ φ f_ε` against `⟨η, φ⟩` over the battery.
pub fn verify_association(
    ladder: &[f64],
    family: &[GridFunction],
    eta: &StructuredDistribution,
    battery: &[BatteryFn],
) -> Result<Vec<AssociationRow>> {
    validate_ladder(ladder)?;
    if ladder.len() != family.len() {
        return Err(Error::Precondition("one grid function per ε required".into()));
    }
    battery
        .par_iter()
        .map(|b| {
            let target = eta.pair(&b.f)?;
            let residuals: Vec<f64> = family
                .iter()
                .map(|f| {
                    let prod = f.spec().sample(|x| b.f.value(x)).zip_with(f, |p, q| p * q)?;
                    Ok((prod.integral() - target).abs())
                })
                .collect::<Result<_>>()?;
            let floor = 1e-13 * target.abs().max(1.0);
            let decreasing = residuals.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
            Ok(AssociationRow { id: b.id.clone(), target, residuals, decreasing })
        })
        .collect()
}

/// `ψ_ε * η` sampled on `spec` for each ε of the ladder.
pub fn mollified_family(
    eta: &StructuredDistribution,
    psi: &Mollifier,
    ladder: &[f64],
    spec: &GridSpec,
) -> Result<Vec<GridFunction>> {
    validate_ladder(ladder)?;
    ladder
        .par_iter()
        .map(|&eps| {
            let p = psi.scaled(eps)?;
            Mollified::new(&p, eta)?.sample(spec)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::standard_battery;

    fn psi() -> Mollifier {
        Mollifier::new(0.5).unwrap()
    }

    const EXTENDED: [f64; 6] = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625];

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&DEFAULT_LADDER).is_ok());
        assert!(validate_ladder(&[0.1, 0.2]).is_err());
        assert!(validate_ladder(&[1.0, 0.5]).is_err());
        assert!(validate_ladder(&[]).is_err());
    }

    #[test]
    fn dirac_smooths_to_mollifier_with_unit_mass() {
        let p = psi().scaled(0.1).unwrap();
        let spec = GridSpec::with_spacing(-0.2, 0.2, 1e-4).unwrap();
        let f = smooth_measure(&RadonMeasure::dirac(0.0), &p, &spec).unwrap();
        assert!((f.integral() - 1.0).abs() <= MASS_TOL);
        for i in (0..f.len()).step_by(97) {
            assert_eq!(f.values()[i], p.eval(f.x(i)));
        }
    }

    #[test]
    fn uniform_smooths_to_one_near_zero() {
        let p = psi().scaled(0.05).unwrap();
        let spec = GridSpec::with_spacing(-0.8, 0.8, 1e-4).unwrap();
        let f = smooth_measure(&RadonMeasure::uniform(-0.5, 0.5).unwrap(), &p, &spec).unwrap();
        assert!((f.integral() - 1.0).abs() <= MASS_TOL);
        for i in 0..f.len() {
            if f.x(i).abs() < 0.4 {
                assert!((f.values()[i] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn distribution_outside_support_is_rejected() {
        let p = psi().scaled(0.1).unwrap();
        let spec = GridSpec::with_spacing(-1.0, 1.0, 1e-3).unwrap();
        let err = smooth_distribution(&StructuredDistribution::atom(0.5, 1, 1.0), &p, &SupportSet::point(0.0), &spec)
            .unwrap_err();
        assert!(matches!(err, Error::SupportViolation(m) if m.contains("0.5")));
        let zero = smooth_distribution(&StructuredDistribution::zero(), &p, &SupportSet::point(0.0), &spec).unwrap();
        assert_eq!(zero.sup_abs(), 0.0);
    }

    #[test]
    fn dipole_over_dirac_gives_unit_velocity() {
        let rep = VelocityRepresentative::build(
            &RadonMeasure::dirac(0.0),
            &StructuredDistribution::atom(0.0, 1, -1.0),
            &psi(),
            &DEFAULT_LADDER,
        )
        .unwrap();
        for l in &rep.levels {
            let dev = (0..l.v.len()).filter(|&i| l.mask[i]).map(|i| (l.v.values()[i] - 1.0).abs()).fold(0.0, f64::max);
            assert!(dev <= 1e-12, "ε = {}: {dev:e}", l.eps);
            assert!(l.mass_ok(), "mass {}", l.mass);
            assert!(l.residual_ok(), "ε = {}: residual {:e} vs {:e}", l.eps, l.residual, l.sup_g);
        }
    }

    #[test]
    fn uniform_background_velocity_is_signed_mollifier_derivative() {
        for k in 1..=3usize {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let eta = StructuredDistribution::atom(0.0, k, sign);
            let rep =
                VelocityRepresentative::build(&RadonMeasure::uniform(-0.5, 0.5).unwrap(), &eta, &psi(), &DEFAULT_LADDER)
                    .unwrap();
            for l in &rep.levels {
                let p = psi().scaled(l.eps).unwrap();
                let scale = p.sup_derivative(k - 1).unwrap();
                for i in 0..l.v.len() {
                    if l.f.values()[i] >= 0.99 {
                        let expected = -sign * p.derivative(l.v.x(i), k - 1).unwrap();
                        assert!((l.v.values()[i] - expected).abs() <= 1e-12 * scale);
                    }
                }
                assert!(l.residual_ok(), "k = {k}, ε = {}: {:e}", l.eps, l.residual / l.sup_g);
            }
        }
    }

    #[test]
    fn flux_reconstruction() {
        let eta = StructuredDistribution::atom(0.1, 2, 1.0);
        let rep = VelocityRepresentative::build(&RadonMeasure::uniform(-0.5, 0.5).unwrap(), &eta, &psi(), &[0.1, 0.05])
            .unwrap();
        for l in &rep.levels {
            for i in 0..l.v.len() {
                if l.mask[i] {
                    let g = l.flux_primitive.values()[i];
                    assert!((l.f.values()[i] * l.v.values()[i] + g).abs() <= 1e-10 * l.sup_g);
                }
            }
        }
    }

    #[test]
    fn nonzero_total_action_has_no_compact_solution() {
        let err = VelocityRepresentative::build(&RadonMeasure::dirac(0.0), &StructuredDistribution::dirac(0.0), &psi(), &[0.1])
            .unwrap_err();
        assert!(matches!(err, Error::NoCompactSolution { .. }));
    }

    #[test]
    fn flux_across_a_gap_is_a_support_violation() {
        let mu = RadonMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)], vec![]).unwrap();
        let eta = StructuredDistribution::new(
            [crate::Atom::new(0.0, 0, -1.0), crate::Atom::new(1.0, 0, 1.0)],
            [],
        )
        .unwrap();
        let err = VelocityRepresentative::build(&mu, &eta, &psi(), &[0.1]).unwrap_err();
        assert!(matches!(err, Error::SupportViolation(_)));
    }

    #[test]
    fn sampled_solver_matches_exact_pipeline() {
        let eta = StructuredDistribution::atom(0.0, 1, -1.0);
        let rep = VelocityRepresentative::build(&RadonMeasure::uniform(-0.5, 0.5).unwrap(), &eta, &psi(), &[0.1]).unwrap();
        let l = &rep.levels[0];
        let v = solve_velocity(&l.f, &l.g).unwrap();
        for i in 0..v.len() {
            if l.f.values()[i] > 0.5 {
                assert!((v.values()[i] - l.v.values()[i]).abs() <= 1e-8 * l.sup_v().max(1.0));
            }
        }
        let zero = solve_velocity(&l.f, &GridFunction::zeros(&l.f.spec())).unwrap();
        assert_eq!(zero.sup_abs(), 0.0);
    }

    #[test]
    fn moderateness_of_scaled_mollifier() {
        let spec = GridSpec::new(-0.5, 0.5, 20_001).unwrap();
        let fam = mollified_family(&StructuredDistribution::dirac(0.0), &psi(), &EXTENDED, &spec).unwrap();
        let fit = moderateness_estimate(&EXTENDED, &fam, (-0.25, 0.25), 0).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-9, "{fit:?}");
        assert!(fit.r_squared > 0.999999);
        assert!((fit.c - psi().eval(0.0)).abs() < 1e-9);
        let constant: Vec<GridFunction> = EXTENDED.iter().map(|_| spec.sample(|_| 3.0)).collect();
        let fit = moderateness_estimate(&EXTENDED, &constant, (-0.25, 0.25), 0).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!(moderateness_estimate(&DEFAULT_LADDER, &fam[..5], (-0.25, 0.25), 0).is_err());
    }

    #[test]
    fn negligibility_verdicts() {
        let spec = GridSpec::new(-1.0, 1.0, 2001).unwrap();
        let zero: Vec<GridFunction> = EXTENDED.iter().map(|_| GridFunction::zeros(&spec)).collect();
        assert!(negligibility_test(&EXTENDED, &zero, (-0.5, 0.5), 0, 4).unwrap().iter().all(|v| v.bounded));
        let fam = mollified_family(&StructuredDistribution::dirac(0.0), &psi(), &EXTENDED, &spec).unwrap();
        assert!(negligibility_test(&EXTENDED, &fam, (-0.5, 0.5), 0, 3).unwrap().iter().all(|v| !v.bounded));
        let base = psi();
        let quad: Vec<GridFunction> = EXTENDED.iter().map(|e| spec.sample(|x| e * e * base.eval(x))).collect();
        let verdicts = negligibility_test(&EXTENDED, &quad, (-0.5, 0.5), 0, 3).unwrap();
        assert_eq!(verdicts.iter().map(|v| v.bounded).collect::<Vec<_>>(), vec![true, true, true, false]);
    }

    #[test]
    fn association_table() {
        let spec = GridSpec::new(-1.5, 1.5, 200_001).unwrap();
        let battery = standard_battery();
        let ladder = [0.02, 0.01, 0.005];
        let delta = StructuredDistribution::dirac(0.0);
        let fam = mollified_family(&delta, &psi(), &ladder, &spec).unwrap();
        for row in verify_association(&ladder, &fam, &delta, &battery).unwrap() {
            assert!(row.decreasing, "{row:?}");
            assert!(row.last() <= 1e-3 * row.target.abs().max(1.0), "{row:?}");
            // second order: halving ε quarters the residual
            if row.residuals[1] > 1e-10 {
                let ratio = row.residuals[1] / row.residuals[2];
                assert!((ratio - 4.0).abs() < 0.3, "{}: {ratio}", row.id);
            }
        }
        let dipole = StructuredDistribution::atom(0.0, 1, -1.0);
        let fam = mollified_family(&dipole, &psi(), &ladder, &spec).unwrap();
        for row in verify_association(&ladder, &fam, &dipole, &battery).unwrap() {
            assert!(row.decreasing && row.last() <= 1e-3 * row.target.abs().max(1.0), "{row:?}");
        }
        let fam = mollified_family(&delta, &psi(), &ladder, &spec).unwrap();
        for (row, b) in verify_association(&ladder, &fam, &StructuredDistribution::zero(), &battery)
            .unwrap()
            .iter()
            .zip(&battery)
        {
            assert!((row.last() - b.f.value(0.0).abs()).abs() <= 1e-3 * b.f.value(0.0).abs().max(1.0));
        }
    }
}
