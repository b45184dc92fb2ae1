use std::fmt;

use crate::distributions::{DensityPiece, PointClass, StructuredDistribution, SupportSet};

/// Relative threshold applied to `scale(η)`.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Measure part of `η` off `supp μ` is nonnegative.
    MeasureOffSupport,
    /// No derivative atoms off `supp μ`.
    DerivativeOffSupport,
    /// Atoms where every test function is flat: unconstrained.
    FlatPoint,
    /// Isolated support point: order at most 2, order-2 coefficient `b >= 0`.
    IsolatedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Point(f64),
    Region(f64, f64),
}

/// One rule application in a verdict trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleFiring {
    pub rule: Rule,
    pub site: Site,
    pub satisfied: bool,
    pub note: String,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::MeasureOffSupport => "R1 measure-off-support",
            Rule::DerivativeOffSupport => "R2 derivative-off-support",
            Rule::FlatPoint => "R3 flat-point",
            Rule::IsolatedPoint => "R4 isolated-point",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Point(p) => write!(f, "x={p}"),
            Site::Region(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl fmt::Display for RuleFiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.satisfied { "ok" } else { "VIOLATED" };
        write!(f, "{} at {}: {status}", self.rule, self.site)?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

/// Net density of `η` (all pieces summed) at `x`.
fn net_density(eta: &StructuredDistribution, x: f64) -> f64 {
    eta.density().iter().map(|d| d.value(x)).sum()
}

/// Sample abscissae resolving every density piece inside `(lo, hi)`.
fn density_probes(eta: &StructuredDistribution, lo: f64, hi: f64) -> Vec<f64> {
    let mut breaks = vec![lo, hi];
    let mut probes = Vec::new();
    for d in eta.density() {
        match d {
            DensityPiece::Box { lo: a, hi: b, .. } => breaks.extend([*a, *b]),
            DensityPiece::Grid(g) => {
                breaks.extend([g.x_lo(), g.x_hi()]);
                for i in 0..g.len() {
                    probes.push(g.x(i));
                    if i + 1 < g.len() {
                        probes.push(0.5 * (g.x(i) + g.x(i + 1)));
                    }
                }
            }
        }
    }
    breaks.retain(|x| *x >= lo && *x <= hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            probes.push(0.5 * (w[0] + w[1]));
        }
    }
    probes.retain(|x| *x > lo && *x < hi);
    probes
}

/// Rule trace for the one-sided condition `⟨η, f⟩ >= 0` for all `f >= 0`
/// vanishing on `support`.
pub fn one_sided_trace(support: &SupportSet, eta: &StructuredDistribution) -> Vec<RuleFiring> {
    let tol = TOLERANCE * eta.scale();
    let mut trace = Vec::new();

    // R1 on the density, component by component of the complement
    if !eta.density().is_empty() {
        let (elo, ehi) = eta.support().hull().unwrap_or((0.0, 0.0));
        let (slo, shi) = support.hull().unwrap_or((elo, ehi));
        let lo = elo.min(slo) - 1.0;
        let hi = ehi.max(shi) + 1.0;
        for (a, b) in support.complement_within(lo, hi) {
            let probes = density_probes(eta, a, b);
            let worst = probes.iter().map(|&x| (x, net_density(eta, x))).min_by(|p, q| p.1.total_cmp(&q.1));
            if let Some((x, v)) = worst {
                let touches = eta.density().iter().any(|d| {
                    let (da, db) = d.interval();
                    da < b && db > a
                });
                if touches {
                    let satisfied = v >= -tol;
                    let note = if satisfied { String::new() } else { format!("density {v:e} at x={x}") };
                    trace.push(RuleFiring { rule: Rule::MeasureOffSupport, site: Site::Region(a, b), satisfied, note });
                }
            }
        }
    }

    // atoms, grouped by location (atoms are sorted by location then order)
    let atoms = eta.atoms();
    let mut i = 0;
    while i < atoms.len() {
        let p = atoms[i].location;
        let mut j = i;
        while j < atoms.len() && atoms[j].location == p {
            j += 1;
        }
        let group = &atoms[i..j];
        i = j;
        let coeff = |k: usize| group.iter().find(|a| a.order == k).map_or(0.0, |a| a.coeff);
        let max_order = group.iter().map(|a| a.order).max().unwrap_or(0);
        match support.classify(p) {
            PointClass::Outside => {
                let c0 = coeff(0);
                if c0 != 0.0 {
                    let satisfied = c0 >= -tol;
                    let note = if satisfied { String::new() } else { format!("point mass {c0}") };
                    trace.push(RuleFiring { rule: Rule::MeasureOffSupport, site: Site::Point(p), satisfied, note });
                }
                if max_order >= 1 {
                    trace.push(RuleFiring {
                        rule: Rule::DerivativeOffSupport,
                        site: Site::Point(p),
                        satisfied: false,
                        note: format!("order-{max_order} atom"),
                    });
                }
            }
            class @ (PointClass::Interior | PointClass::Boundary) => {
                let where_ = if class == PointClass::Interior { "interior point" } else { "boundary point" };
                trace.push(RuleFiring {
                    rule: Rule::FlatPoint,
                    site: Site::Point(p),
                    satisfied: true,
                    note: format!("{where_}, orders up to {max_order}"),
                });
            }
            PointClass::Isolated => {
                let b = coeff(2);
                let (satisfied, note) = if max_order > 2 {
                    (false, format!("order-{max_order} atom at an isolated point"))
                } else if b < -tol {
                    (false, format!("order-2 coefficient b = {b} < 0"))
                } else if b.abs() <= tol {
                    (true, "order-2 coefficient b = 0: boundary of b >= 0".to_string())
                } else {
                    (true, format!("order-2 coefficient b = {b}"))
                };
                trace.push(RuleFiring { rule: Rule::IsolatedPoint, site: Site::Point(p), satisfied, note });
            }
        }
    }
    trace
}
