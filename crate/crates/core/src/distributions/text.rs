//! Line-oriented spec files.
//!
//! ```text
//! # comment
//! name = dipole_at_origin
//! kind = distribution          # or measure
//! domain = line                # or circle
//! atom = 0, 1, 2.5             # 2.5 ∂δ_0
//! density = uniform, -0.5, 0.5 # optional fourth field: total mass (default 1)
//! density = grid, rho.csv      # rows "x, value" on a uniform grid
//! support = [0,1];[2,2]        # measures only: declared closed support
//! singular_mass = 1            # measures only: singular part, needs `support`
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::distribution::{Atom, DensityPiece, StructuredDistribution};
use super::measure::RadonMeasure;
use super::support::SupportSet;
use crate::error::{Error, Result};
use crate::numerics::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    Measure,
    Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Domain {
    #[default]
    Line,
    Circle,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecDocument {
    pub name: Option<String>,
    pub kind: Option<SpecKind>,
    pub domain: Domain,
    pub atoms: Vec<Atom>,
    pub density: Vec<DensityPiece>,
    pub support: Option<SupportSet>,
    pub singular_mass: Option<f64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| parse_err(line, format!("`{}` is not a number", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{}` is not finite", field.trim())));
    }
    Ok(v)
}

impl SpecDocument {
    /// Parse spec text; relative grid paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut doc = SpecDocument::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => doc.name = Some(value.to_string()),
                "kind" => {
                    doc.kind = Some(match value {
                        "measure" => SpecKind::Measure,
                        "distribution" => SpecKind::Distribution,
                        other => return Err(parse_err(line, format!("unknown kind `{other}`"))),
                    })
                }
                "domain" => {
                    doc.domain = match value {
                        "line" => Domain::Line,
                        "circle" => Domain::Circle,
                        other => return Err(parse_err(line, format!("unknown domain `{other}`"))),
                    }
                }
                "atom" => {
                    let fields: Vec<&str> = value.split(',').collect();
                    if fields.len() != 3 {
                        return Err(parse_err(line, "atom needs `location, order, coefficient`"));
                    }
                    let order: usize = fields[1]
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(line, format!("`{}` is not a derivative order", fields[1].trim())))?;
                    doc.atoms.push(Atom::new(number(line, fields[0])?, order, number(line, fields[2])?));
                }
                "density" => {
                    let fields: Vec<&str> = value.split(',').map(str::trim).collect();
                    match fields.first().copied() {
                        Some("uniform") => {
                            if !(fields.len() == 3 || fields.len() == 4) {
                                return Err(parse_err(line, "uniform density needs `uniform, a, b[, mass]`"));
                            }
                            let a = number(line, fields[1])?;
                            let b = number(line, fields[2])?;
                            let mass = if fields.len() == 4 { number(line, fields[3])? } else { 1.0 };
                            let piece = DensityPiece::uniform(a, b, mass).map_err(|e| parse_err(line, e.to_string()))?;
                            doc.density.push(piece);
                        }
                        Some("grid") => {
                            if fields.len() != 2 {
                                return Err(parse_err(line, "grid density needs `grid, path`"));
                            }
                            let mut path = PathBuf::from(fields[1]);
                            if path.is_relative() {
                                if let Some(dir) = base_dir {
                                    path = dir.join(path);
                                }
                            }
                            let g = read_grid_csv(&path).map_err(|e| parse_err(line, format!("{}: {e}", path.display())))?;
                            doc.density.push(DensityPiece::Grid(g));
                        }
                        _ => return Err(parse_err(line, "density kind must be `uniform` or `grid`")),
                    }
                }
                "support" => {
                    let s = SupportSet::from_str(value).map_err(|e| parse_err(line, e.to_string()))?;
                    doc.support = Some(s);
                }
                "singular_mass" => doc.singular_mass = Some(number(line, value)?),
                other => return Err(parse_err(line, format!("unknown key `{other}`"))),
            }
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    pub fn to_distribution(&self) -> Result<StructuredDistribution> {
        if self.kind == Some(SpecKind::Measure) {
            return Err(Error::Domain("spec declares a measure, not a distribution".into()));
        }
        if self.support.is_some() || self.singular_mass.is_some() {
            return Err(Error::Domain("`support` and `singular_mass` apply to measures only".into()));
        }
        StructuredDistribution::new(self.atoms.iter().copied(), self.density.iter().cloned())
    }

    pub fn to_measure(&self) -> Result<RadonMeasure> {
        if self.kind == Some(SpecKind::Distribution) {
            return Err(Error::Domain("spec declares a distribution, not a measure".into()));
        }
        if let Some(a) = self.atoms.iter().find(|a| a.order != 0) {
            return Err(Error::Domain(format!("measure atom at {} has derivative order {}", a.location, a.order)));
        }
        if let Some(mass) = self.singular_mass {
            if !self.atoms.is_empty() || !self.density.is_empty() {
                return Err(Error::Domain("a singular measure is described by `support` and `singular_mass` alone".into()));
            }
            let support = self
                .support
                .clone()
                .ok_or_else(|| Error::Domain("`singular_mass` requires a declared `support`".into()))?;
            return RadonMeasure::singular_continuous(support, mass);
        }
        let mu = RadonMeasure::new(
            self.atoms.iter().map(|a| (a.location, a.coeff)).collect(),
            self.density.clone(),
        )?;
        match &self.support {
            Some(s) => mu.with_declared_support(s.clone()),
            None => Ok(mu),
        }
    }
}

/// Rows `x, value` with uniformly spaced `x`; `#` lines are comments.
pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_grid_csv(&text)
}

pub fn parse_grid_csv(text: &str) -> Result<GridFunction> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 2 {
            return Err(parse_err(idx + 1, "expected `x, value`"));
        }
        xs.push(number(idx + 1, fields[0])?);
        vs.push(number(idx + 1, fields[1])?);
    }
    if xs.len() < 2 {
        return Err(Error::Domain("grid file has fewer than two rows".into()));
    }
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    for (i, x) in xs.iter().enumerate() {
        if (x - (xs[0] + i as f64 * h)).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Domain(format!("grid abscissa {x} breaks uniform spacing")));
        }
    }
    GridFunction::new(xs[0], xs[n - 1], vs)
}
