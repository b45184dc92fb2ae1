use std::ops::Neg;

use super::support::SupportSet;
use crate::error::{Error, Result};
use crate::numerics::{simpson, GridFunction, SmoothFn, DEFAULT_PANELS};

/// `coeff · ∂^order δ_location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub order: usize,
    pub coeff: f64,
}

impl Atom {
    pub fn new(location: f64, order: usize, coeff: f64) -> Self {
        Self { location, order, coeff }
    }
}

/// Compactly supported density term.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityPiece {
    /// `height` on `[lo, hi]`.
    Box { lo: f64, hi: f64, height: f64 },
    /// Samples on a uniform grid, zero outside it.
    Grid(GridFunction),
}

impl DensityPiece {
    /// Constant density on `[lo, hi]` carrying total mass `mass`.
    pub fn uniform(lo: f64, hi: f64, mass: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain(format!("empty density interval [{lo}, {hi}]")));
        }
        Ok(DensityPiece::Box { lo, hi, height: mass / (hi - lo) })
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            DensityPiece::Box { lo, hi, .. } => (*lo, *hi),
            DensityPiece::Grid(g) => (g.x_lo(), g.x_hi()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            DensityPiece::Box { lo, hi, height } => {
                if x >= *lo && x <= *hi {
                    *height
                } else {
                    0.0
                }
            }
            DensityPiece::Grid(g) => g.interpolate(x),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            DensityPiece::Box { lo, hi, height } => height * (hi - lo),
            DensityPiece::Grid(g) => g.integral(),
        }
    }

    pub fn abs_mass(&self) -> f64 {
        match self {
            DensityPiece::Box { lo, hi, height } => height.abs() * (hi - lo),
            DensityPiece::Grid(g) => g.map(|_, v| v.abs()).integral(),
        }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            DensityPiece::Box { lo, hi, height } => DensityPiece::Box { lo: *lo, hi: *hi, height: lambda * height },
            DensityPiece::Grid(g) => DensityPiece::Grid(g.map(|_, v| lambda * v)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            DensityPiece::Box { height, .. } => *height == 0.0,
            DensityPiece::Grid(g) => g.values().iter().all(|v| *v == 0.0),
        }
    }

    /// Closure of `{density ≠ 0}`.
    pub fn support(&self) -> SupportSet {
        match self {
            DensityPiece::Box { lo, hi, height } => {
                if *height == 0.0 {
                    SupportSet::empty()
                } else {
                    SupportSet::interval(*lo, *hi).expect("ordered box")
                }
            }
            DensityPiece::Grid(g) => {
                let v = g.values();
                let n = v.len();
                let mut runs = Vec::new();
                let mut i = 0;
                while i < n {
                    if v[i] == 0.0 {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i < n && v[i] != 0.0 {
                        i += 1;
                    }
                    let a = g.x(start.saturating_sub(1));
                    let b = g.x(i.min(n - 1));
                    runs.push((a, b));
                }
                SupportSet::new(runs).expect("grid runs are ordered")
            }
        }
    }

    /// `∫ density · φ`, restricted to the overlap with `φ`'s support.
    pub fn integrate_against<F: SmoothFn + ?Sized>(&self, phi: &F) -> f64 {
        let (mut lo, mut hi) = self.interval();
        if let Some((a, b)) = phi.support() {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        if hi <= lo {
            return 0.0;
        }
        match self {
            DensityPiece::Box { height, .. } => height * simpson(|x| phi.value(x), lo, hi, DEFAULT_PANELS),
            DensityPiece::Grid(g) => simpson(|x| g.interpolate(x) * phi.value(x), lo, hi, DEFAULT_PANELS),
        }
    }
}

/// Finite-order distribution on the line: `Σ c_j ∂^{k_j} δ_{p_j}` plus a
/// compactly supported density.
///
/// Atoms sharing `(location, order)` are merged and zero coefficients
/// dropped, so the representation is canonical up to density pieces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StructuredDistribution {
    atoms: Vec<Atom>,
    density: Vec<DensityPiece>,
}

impl StructuredDistribution {
    pub fn new(atoms: impl IntoIterator<Item = Atom>, density: impl IntoIterator<Item = DensityPiece>) -> Result<Self> {
        let mut list: Vec<Atom> = Vec::new();
        for a in atoms {
            if !a.location.is_finite() || !a.coeff.is_finite() {
                return Err(Error::Domain(format!("non-finite atom {a:?}")));
            }
            list.push(a);
        }
        list.sort_by(|x, y| x.location.total_cmp(&y.location).then(x.order.cmp(&y.order)));
        let mut merged: Vec<Atom> = Vec::with_capacity(list.len());
        for a in list {
            match merged.last_mut() {
                Some(last) if last.location == a.location && last.order == a.order => last.coeff += a.coeff,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| a.coeff != 0.0);
        let density: Vec<DensityPiece> = density.into_iter().filter(|d| !d.is_zero()).collect();
        Ok(Self { atoms: merged, density })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · ∂^order δ_location`.
    pub fn atom(location: f64, order: usize, coeff: f64) -> Self {
        Self::new([Atom::new(location, order, coeff)], []).expect("finite atom")
    }

    pub fn dirac(location: f64) -> Self {
        Self::atom(location, 0, 1.0)
    }

    pub fn from_density(piece: DensityPiece) -> Self {
        Self::new([], [piece]).expect("no atoms")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensityPiece] {
        &self.density
    }

    /// Highest derivative order among the atoms (0 when atom-free).
    pub fn order(&self) -> usize {
        self.atoms.iter().map(|a| a.order).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.is_empty()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { coeff: lambda * a.coeff, ..*a });
        let density = self.density.iter().map(|d| d.scaled(lambda));
        Self::new(atoms, density).expect("scaling keeps finiteness")
    }

    pub fn plus(&self, other: &StructuredDistribution) -> Self {
        Self::new(
            self.atoms.iter().chain(&other.atoms).copied(),
            self.density.iter().chain(&other.density).cloned(),
        )
        .expect("finite summands")
    }

    /// `⟨η, φ⟩ = Σ c_j (-1)^{k_j} φ^{(k_j)}(p_j) + ∫ density · φ`.
    pub fn pair<F: SmoothFn + ?Sized>(&self, phi: &F) -> Result<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            let d = phi.derivative(a.location, a.order)?;
            let sign = if a.order % 2 == 0 { 1.0 } else { -1.0 };
            acc += a.coeff * sign * d;
        }
        for piece in &self.density {
            acc += piece.integrate_against(phi);
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite { at: f64::NAN });
        }
        Ok(acc)
    }

    /// `⟨η, 1⟩`: derivative atoms contribute nothing.
    pub fn total_action_on_one(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.order == 0).map(|a| a.coeff).sum();
        let dens: f64 = self.density.iter().map(DensityPiece::mass).sum();
        atoms + dens
    }

    /// `Σ |c_j| + ∫ |density|`, the reference magnitude for tolerances.
    pub fn scale(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.coeff.abs()).sum();
        let dens: f64 = self.density.iter().map(DensityPiece::abs_mass).sum();
        atoms + dens
    }

    pub fn support(&self) -> SupportSet {
        let points = SupportSet::new(self.atoms.iter().map(|a| (a.location, a.location))).expect("finite atoms");
        self.density.iter().fold(points, |acc, d| acc.union(&d.support()))
    }
}

impl Neg for StructuredDistribution {
    type Output = StructuredDistribution;
    fn neg(self) -> Self::Output {
        self.scaled(-1.0)
    }
}

impl Neg for &StructuredDistribution {
    type Output = StructuredDistribution;
    fn neg(self) -> Self::Output {
        self.scaled(-1.0)
    }
}
