use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rules::TOLERANCE;
use super::testfn::TestFunctionSpec;
use super::Mode;
use crate::distributions::{DensityPiece, StructuredDistribution, SupportSet};

pub const DEFAULT_BUDGET: usize = 10_000;
pub const MIN_WIDTH: f64 = 1e-4;
const MAX_WIDTH: f64 = 1.0;
const TILTS: [f64; 7] = [0.0, 0.1, -0.1, 0.5, -0.5, 0.9, -0.9];
const OFFSETS: [f64; 4] = [0.5, -0.5, 0.8, -0.8];
const COARSE_CENTRES: usize = 32;
const CHUNK: usize = 256;
/// Keeps free bumps strictly away from the support.
const MARGIN: f64 = 1e-6;

/// A test function with a pairing that breaks the admissibility condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub spec: TestFunctionSpec,
    pub value: f64,
}

fn width_ladder(w_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut w = w_max.min(MAX_WIDTH);
    while w >= MIN_WIDTH {
        out.push(w);
        w *= 0.5;
    }
    if w_max >= MIN_WIDTH && out.last().is_some_and(|&l| l > MIN_WIDTH) {
        out.push(MIN_WIDTH);
    }
    out
}

/// Search geometry: isolated support points with their free radius, and the
/// open complement components that matter for `η`.
struct Layout {
    isolated: Vec<(f64, f64)>,
    components: Vec<(f64, f64)>,
}

impl Layout {
    fn new(support: &SupportSet, eta: &StructuredDistribution) -> Self {
        let isolated = support
            .isolated_points()
            .map(|p| (p, (0.99 * support.gap_around(p)).min(MAX_WIDTH)))
            .collect();
        let (elo, ehi) = eta.support().hull().unwrap_or((0.0, 0.0));
        let (slo, shi) = support.hull().unwrap_or((elo, ehi));
        let components = support.complement_within(elo.min(slo) - 1.0, ehi.max(shi) + 1.0);
        Self { isolated, components }
    }

    /// Largest free-bump width centred at `q` inside `(a, b)`.
    fn free_width(q: f64, (a, b): (f64, f64)) -> f64 {
        ((q - a).min(b - q) / (1.0 + MARGIN)).min(MAX_WIDTH)
    }

    fn free_fits(spec: &TestFunctionSpec, (a, b): (f64, f64)) -> bool {
        let (lo, hi) = spec.footprint();
        lo > a + MARGIN * spec.width && hi < b - MARGIN * spec.width && spec.width >= MIN_WIDTH
    }
}

/// Deterministic candidates: pinned bumps at isolated points, then free bumps
/// at atoms, density breakpoints and a coarse grid in each component.
fn structured_candidates(layout: &Layout, eta: &StructuredDistribution) -> Vec<TestFunctionSpec> {
    let mut out = Vec::new();
    for &(p, w_max) in &layout.isolated {
        for w in width_ladder(w_max) {
            for m in 1..=3 {
                for c in TILTS {
                    out.push(TestFunctionSpec::pinned(p, w, m, c / w));
                }
            }
        }
    }
    for &comp in &layout.components {
        let (a, b) = comp;
        let mut anchors: Vec<f64> = eta.atoms().iter().map(|at| at.location).filter(|&x| x > a && x < b).collect();
        anchors.dedup();
        for &q in &anchors {
            for w in width_ladder(Layout::free_width(q, comp)) {
                out.push(TestFunctionSpec::free(q, w));
            }
        }
        for &q in &anchors {
            for w in width_ladder(Layout::free_width(q, comp) * 1.25) {
                for off in OFFSETS {
                    let spec = TestFunctionSpec::free(q + off * w, w);
                    if Layout::free_fits(&spec, comp) {
                        out.push(spec);
                    }
                }
            }
        }
        let mut centres = Vec::new();
        for d in eta.density() {
            let (da, db) = d.interval();
            centres.extend([da, db, 0.5 * (da + db)]);
            if let DensityPiece::Grid(g) = d {
                let stride = (g.len() / COARSE_CENTRES).max(1);
                centres.extend((0..g.len()).step_by(stride).map(|i| g.x(i)));
            }
        }
        let (ga, gb) = (a.max(-1e6), b.min(1e6));
        centres.extend((1..COARSE_CENTRES).map(|i| ga + (gb - ga) * i as f64 / COARSE_CENTRES as f64));
        centres.retain(|&x| x > a && x < b);
        for q in centres {
            for w in width_ladder(Layout::free_width(q, comp)) {
                let spec = TestFunctionSpec::free(q, w);
                if Layout::free_fits(&spec, comp) {
                    out.push(spec);
                }
            }
        }
    }
    out
}

fn random_candidate(layout: &Layout, rng: &mut ChaCha8Rng) -> Option<TestFunctionSpec> {
    let log_uniform = |rng: &mut ChaCha8Rng, hi: f64| -> f64 {
        let (l0, l1) = (MIN_WIDTH.ln(), hi.max(MIN_WIDTH).ln());
        (l0 + (l1 - l0) * rng.gen::<f64>()).exp()
    };
    let use_pinned = !layout.isolated.is_empty() && (layout.components.is_empty() || rng.gen_bool(0.5));
    if use_pinned {
        let (p, w_max) = layout.isolated[rng.gen_range(0..layout.isolated.len())];
        if w_max < MIN_WIDTH {
            return None;
        }
        let w = log_uniform(rng, w_max);
        let m = rng.gen_range(1..=3);
        let c = rng.gen_range(-0.9..=0.9) / w;
        return Some(TestFunctionSpec::pinned(p, w, m, c));
    }
    if layout.components.is_empty() {
        return None;
    }
    let comp = layout.components[rng.gen_range(0..layout.components.len())];
    let (a, b) = (comp.0.max(-1e6), comp.1.min(1e6));
    let q = a + (b - a) * rng.gen::<f64>();
    let w_max = Layout::free_width(q, comp);
    if w_max < MIN_WIDTH {
        return None;
    }
    let spec = TestFunctionSpec::free(q, log_uniform(rng, w_max));
    Layout::free_fits(&spec, comp).then_some(spec)
}

fn violates(value: f64, tol: f64, mode: Mode) -> bool {
    match mode {
        Mode::OneSided => value < -tol,
        Mode::TwoSided => value.abs() > tol,
    }
}

/// Search for a nonnegative test function `f` vanishing on `support` with
/// `⟨η, f⟩ < -tol` (one-sided) or `|⟨η, f⟩| > tol` (two-sided), where
/// `tol = 1e-9 · scale(η)`.
///
/// At most `budget` pairings are evaluated. Finding nothing is not a proof
/// of admissibility.
pub fn falsify(
    support: &SupportSet,
    eta: &StructuredDistribution,
    mode: Mode,
    budget: usize,
    seed: u64,
) -> Option<Counterexample> {
    let tol = TOLERANCE * eta.scale();
    if eta.is_zero() || budget == 0 {
        return None;
    }
    let layout = Layout::new(support, eta);
    let mut structured = structured_candidates(&layout, eta).into_iter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0;
    let mut misses = 0;
    while spent < budget {
        let take = CHUNK.min(budget - spent);
        let mut chunk: Vec<TestFunctionSpec> = structured.by_ref().take(take).collect();
        while chunk.len() < take && misses < 100 * budget {
            match random_candidate(&layout, &mut rng) {
                Some(s) => chunk.push(s),
                None => misses += 1,
            }
        }
        if chunk.is_empty() {
            return None;
        }
        spent += chunk.len();
        let hit = chunk
            .par_iter()
            .map(|spec| eta.pair(spec).ok().filter(|v| violates(*v, tol, mode)).map(|v| (*spec, v)))
            .find_first(|r| r.is_some())
            .flatten();
        if let Some((spec, value)) = hit {
            return Some(Counterexample { spec, value });
        }
    }
    None
}
