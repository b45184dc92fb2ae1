use super::distribution::{Atom, DensityPiece, StructuredDistribution};
use super::support::SupportSet;
use crate::error::{Error, Result};
use crate::numerics::SmoothFn;

/// Positive compactly supported measure: point masses plus a nonnegative
/// density, optionally with a singular-continuous part known only through
/// its declared support and mass.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonMeasure {
    point_masses: Vec<(f64, f64)>,
    density: Vec<DensityPiece>,
    singular_mass: f64,
    support: SupportSet,
}

impl RadonMeasure {
    /// Support is the closure of `{density > 0}` together with the mass points.
    pub fn new(point_masses: Vec<(f64, f64)>, density: Vec<DensityPiece>) -> Result<Self> {
        for &(p, m) in &point_masses {
            if !p.is_finite() || !(m >= 0.0) || !m.is_finite() {
                return Err(Error::Domain(format!("point mass {m} at {p} is not a finite nonnegative mass")));
            }
        }
        for d in &density {
            let negative = match d {
                DensityPiece::Box { height, .. } => *height < 0.0,
                DensityPiece::Grid(g) => g.min() < 0.0,
            };
            if negative {
                return Err(Error::Domain("measure density takes negative values".into()));
            }
        }
        let point_masses: Vec<(f64, f64)> = point_masses.into_iter().filter(|&(_, m)| m > 0.0).collect();
        let as_dist = StructuredDistribution::new(
            point_masses.iter().map(|&(p, m)| Atom::new(p, 0, m)),
            density.iter().cloned(),
        )?;
        let support = as_dist.support();
        let density = as_dist.density().to_vec();
        let point_masses = as_dist.atoms().iter().map(|a| (a.location, a.coeff)).collect();
        Ok(Self { point_masses, density, singular_mass: 0.0, support })
    }

    pub fn dirac(location: f64) -> Self {
        Self::new(vec![(location, 1.0)], vec![]).expect("unit mass")
    }

    /// Uniform probability on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![], vec![DensityPiece::uniform(lo, hi, 1.0)?])
    }

    /// Singular-continuous measure (a Cantor-type measure, say) described
    /// only by its closed support and total mass.
    pub fn singular_continuous(support: SupportSet, mass: f64) -> Result<Self> {
        if support.is_empty() || !(mass > 0.0) {
            return Err(Error::Domain("singular part needs nonempty support and positive mass".into()));
        }
        Ok(Self { point_masses: vec![], density: vec![], singular_mass: mass, support })
    }

    /// Replace the support by a larger closed set.
    pub fn with_declared_support(mut self, support: SupportSet) -> Result<Self> {
        if !self.support.is_subset_of(&support) {
            return Err(Error::Domain(format!(
                "declared support {support} does not contain the natural support {}",
                self.support
            )));
        }
        self.support = support;
        Ok(self)
    }

    pub fn point_masses(&self) -> &[(f64, f64)] {
        &self.point_masses
    }

    pub fn density(&self) -> &[DensityPiece] {
        &self.density
    }

    pub fn singular_mass(&self) -> f64 {
        self.singular_mass
    }

    pub fn has_singular_part(&self) -> bool {
        self.singular_mass > 0.0
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn mass(&self) -> f64 {
        let pts: f64 = self.point_masses.iter().map(|&(_, m)| m).sum();
        let dens: f64 = self.density.iter().map(DensityPiece::mass).sum();
        pts + dens + self.singular_mass
    }

    /// `∫ φ dμ`. Fails on a singular part, which carries no pointwise data.
    pub fn integrate<F: SmoothFn + ?Sized>(&self, phi: &F) -> Result<f64> {
        self.require_regular()?;
        self.as_distribution()?.pair(phi)
    }

    /// The measure as an order-0 distribution.
    pub fn as_distribution(&self) -> Result<StructuredDistribution> {
        self.require_regular()?;
        StructuredDistribution::new(
            self.point_masses.iter().map(|&(p, m)| Atom::new(p, 0, m)),
            self.density.iter().cloned(),
        )
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("negative scaling {lambda} of a positive measure")));
        }
        Ok(Self {
            point_masses: self.point_masses.iter().map(|&(p, m)| (p, lambda * m)).collect(),
            density: self.density.iter().map(|d| d.scaled(lambda)).collect(),
            singular_mass: lambda * self.singular_mass,
            support: self.support.clone(),
        })
    }

    fn require_regular(&self) -> Result<()> {
        if self.has_singular_part() {
            Err(Error::Precondition("singular-continuous part has no pointwise representation".into()))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{GridFunction, Polynomial};

    #[test]
    fn uniform_support_and_mass() {
        let mu = RadonMeasure::uniform(-0.5, 0.5).unwrap();
        assert_eq!(mu.support().intervals(), &[(-0.5, 0.5)]);
        assert!((mu.mass() - 1.0).abs() < 1e-15);
        let x2 = Polynomial::new(vec![0.0, 0.0, 1.0]);
        assert!((mu.integrate(&x2).unwrap() - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_parts() {
        assert!(RadonMeasure::new(vec![(0.0, -1.0)], vec![]).is_err());
        let g = GridFunction::from_fn(0.0, 1.0, 11, |x| x - 0.5).unwrap();
        assert!(RadonMeasure::new(vec![], vec![DensityPiece::Grid(g)]).is_err());
    }

    #[test]
    fn singular_measure_keeps_declared_support() {
        let mu = RadonMeasure::singular_continuous(SupportSet::interval(0.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(mu.support().intervals(), &[(0.0, 1.0)]);
        assert!(mu.integrate(&Polynomial::constant(1.0)).is_err());
    }

    #[test]
    fn declared_support_must_cover_natural_support() {
        let mu = RadonMeasure::dirac(0.0);
        assert!(mu.clone().with_declared_support(SupportSet::interval(1.0, 2.0).unwrap()).is_err());
        let wide = mu.with_declared_support(SupportSet::interval(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(wide.support().intervals(), &[(-1.0, 1.0)]);
    }
}
