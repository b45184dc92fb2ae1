use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use weakderiv::admissibility::{self, falsify, CheckOptions, TestFunctionKind};
use weakderiv::caratheodory::{fourier_coefficients, measure_fourier_coefficients, tangent_condition_scan, toeplitz_psd};
use weakderiv::cone::{dyadic_grid, verify_curve_derivative, Ball, ConvexBody, DirectionClass, HPolytope};
use weakderiv::distributions::SpecDocument;
use weakderiv::families::{
    affine_family, delta_family, explicit_family, normalize_to_probability, scaling_family, standard_battery,
    verify_weak_derivative, MeasureFamily,
};
use weakderiv::numerics::{SharedFn, Side};
use weakderiv::transport::{moderateness_estimate, VelocityRepresentative};
use weakderiv::{Mollifier, RadonMeasure, StructuredDistribution};

use crate::args::{CheckArgs, ConeArgs, DeformArgs, FalsifyArgs, FamilyArg, FourierArgs, PairArgs, SideArg, VelocityArgs};
use crate::output::{num, say, text, Header, Table};

/// Anything that ends a run with exit code 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(weakderiv::Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<weakderiv::Error> for CliError {
    fn from(e: weakderiv::Error) -> Self {
        CliError::Library(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `true` for success or an admissible/satisfied verdict.
pub type Passed = bool;

fn read_doc(path: &Path) -> CliResult<SpecDocument> {
    if !path.exists() {
        return Err(CliError::Usage(format!("no such file: {}", path.display())));
    }
    Ok(SpecDocument::read(path)?)
}

fn read_measure(path: &Path) -> CliResult<RadonMeasure> {
    read_doc(path)?.to_measure().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_distribution(path: &Path) -> CliResult<StructuredDistribution> {
    read_doc(path)?.to_distribution().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(table: &Table, header: &Header, out: Option<&Path>) -> CliResult<()> {
    table
        .emit(header, out)
        .map_err(|e| CliError::Io(out.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into()), e))
}

fn pair_header(name: &str, p: &PairArgs) -> Header {
    let mut h = Header::new(name);
    h.push("mu", p.mu.display());
    h.push("eta", p.eta.display());
    h.push("mode", p.mode.mode());
    h.push("budget", p.budget);
    h.push("seed", p.seed);
    h
}

fn counterexample_fields(c: &admissibility::Counterexample) -> Vec<String> {
    let (kind, order, tilt) = match c.spec.kind {
        TestFunctionKind::FreeBump => ("free_bump", 0, 0.0),
        TestFunctionKind::PinnedBump { order, tilt } => ("pinned_bump", order, tilt),
    };
    vec![kind.into(), num(c.spec.center), num(c.spec.width), order.to_string(), num(tilt), num(c.value)]
}

const COUNTEREXAMPLE_COLUMNS: [&str; 6] = ["kind", "center", "width", "order", "tilt", "value"];

pub fn check(a: &CheckArgs, out: Option<&Path>) -> CliResult<Passed> {
    let mu = read_measure(&a.pair.mu)?;
    let eta = read_distribution(&a.pair.eta)?;
    let opts = CheckOptions { probability: a.probability, budget: a.pair.budget, seed: a.pair.seed };
    let verdict = admissibility::check(&mu, &eta, a.pair.mode.mode(), &opts);
    let mut header = pair_header("check", &a.pair);
    header.push("probability", a.probability);

    say!("verdict: {} ({})", if verdict.admissible { "admissible" } else { "inadmissible" }, verdict.mode);
    if let Some(ok) = verdict.probability_constraint_ok {
        say!("probability_constraint: {ok}");
    }
    for firing in &verdict.trace {
        say!("rule: {firing}");
    }
    let rules_ok = verdict.trace.iter().all(|f| f.satisfied);
    if !rules_ok {
        match &verdict.counterexample {
            Some(c) => say!("counterexample: {} pairing={:e}", c.spec, c.value),
            None => say!("counterexample: none found within budget"),
        }
    }
    if out.is_some() {
        let mut t = Table::new(&["rule", "site", "satisfied", "note"]);
        for f in &verdict.trace {
            t.row(&[text(&f.rule.to_string()), text(&f.site.to_string()), f.satisfied.to_string(), text(&f.note)]);
        }
        emit(&t, &header, out)?;
    }
    Ok(verdict.admissible)
}

pub fn falsify_cmd(a: &FalsifyArgs, out: Option<&Path>) -> CliResult<Passed> {
    let mu = read_measure(&a.pair.mu)?;
    let eta = read_distribution(&a.pair.eta)?;
    let found = falsify(mu.support(), &eta, a.pair.mode.mode(), a.pair.budget, a.pair.seed);
    let header = pair_header("falsify", &a.pair);
    let mut t = Table::new(&COUNTEREXAMPLE_COLUMNS);
    match &found {
        Some(c) => {
            say!("counterexample: {} pairing={:e}", c.spec, c.value);
            t.row(&counterexample_fields(c));
        }
        None => say!("counterexample: none found within budget"),
    }
    emit(&t, &header, out)?;
    Ok(found.is_none())
}

fn build_family(a: &DeformArgs) -> CliResult<MeasureFamily> {
    let need = |p: &Option<PathBuf>, flag: &str| -> CliResult<RadonMeasure> {
        let path = p.as_ref().ok_or_else(|| CliError::Usage(format!("family {:?} needs --{flag}", a.family)))?;
        read_measure(path)
    };
    let fam = match a.family {
        FamilyArg::Delta => delta_family(),
        FamilyArg::Explicit => explicit_family(a.k, a.q, Mollifier::new(0.5)?)?,
        FamilyArg::Affine => affine_family(need(&a.mu, "mu")?, need(&a.direction, "direction")?),
        FamilyArg::Scaling => scaling_family(need(&a.mu, "mu")?, a.rate)?,
    };
    Ok(if a.normalize { normalize_to_probability(fam)? } else { fam })
}

pub fn deform(a: &DeformArgs, out: Option<&Path>) -> CliResult<Passed> {
    let family = build_family(a)?;
    let side = match a.side {
        SideArg::Right => Side::Right,
        SideArg::Left => Side::Left,
    };
    let battery = standard_battery();
    let fns: Vec<SharedFn> = battery.iter().map(|b| b.f.clone()).collect();
    let checks = verify_weak_derivative(&family, &fns, side)?;

    let mut header = Header::new("deform");
    header.push("family", family.name());
    header.push("k", a.k);
    header.push("q", a.q);
    header.push("mu", a.mu.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    header.push("direction", a.direction.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    header.push("rate", a.rate);
    header.push("normalize", a.normalize);
    header.push("side", format!("{:?}", a.side).to_lowercase());
    header.push("tol", a.tol);
    header.push("samples", a.samples);

    let sign = if side == Side::Left { -1.0 } else { 1.0 };
    let t0 = family.default_t_start();
    let mut t = Table::new(&["t", "phi_id", "integral"]);
    for j in 0..a.samples {
        let tj = sign * t0 * 0.5f64.powi(j as i32);
        for b in &battery {
            t.row(&[num(tj), b.id.clone(), num(family.integral(b.f.as_ref(), tj)?)]);
        }
    }
    let mut summary = Table::new(&["phi_id", "estimate", "target", "abs_err"]);
    let mut passed = true;
    for (b, c) in battery.iter().zip(&checks) {
        let ok = c.rel_err() <= a.tol;
        passed &= ok;
        say!(
            "{}: estimate={:e} target={:e} rel_err={:e} {}",
            b.id,
            c.estimate,
            c.target,
            c.rel_err(),
            if ok { "ok" } else { "FAIL" }
        );
        summary.row(&[b.id.clone(), num(c.estimate), num(c.target), num(c.abs_err)]);
    }
    // summary first: a closed stdout must not lose it
    if let Some(p) = &a.summary {
        emit(&summary, &header, Some(p))?;
    }
    emit(&t, &header, out)?;
    Ok(passed)
}

pub fn velocity(a: &VelocityArgs, out: Option<&Path>) -> CliResult<Passed> {
    if a.stride == 0 {
        return Err(CliError::Usage("--stride must be positive".into()));
    }
    let mu = read_measure(&a.mu)?;
    let eta = read_distribution(&a.eta)?;
    let psi = Mollifier::new(a.shape)?;
    let rep = VelocityRepresentative::build(&mu, &eta, &psi, &a.eps.0)?;

    let mut header = Header::new("velocity");
    header.push("mu", a.mu.display());
    header.push("eta", a.eta.display());
    header.push("eps", &a.eps);
    header.push("shape", a.shape);
    header.push("stride", a.stride);
    header.push("moderate", a.moderate);
    header.push("region", format!("{},{}", a.region.0, a.region.1));
    header.push("grid", format!("[{}, {}] n={}", rep.grid.x_lo, rep.grid.x_hi, rep.grid.n));

    let mut t = Table::new(&["epsilon", "x", "f_eps", "g_eps", "v_eps"]);
    let mut summary = Table::new(&["epsilon", "residual", "sup_v"]);
    let mut passed = true;
    for l in &rep.levels {
        for i in (0..l.f.len()).step_by(a.stride) {
            t.row(&[num(l.eps), num(l.f.x(i)), num(l.f.values()[i]), num(l.g.values()[i]), num(l.v.values()[i])]);
        }
        summary.row(&[num(l.eps), num(l.residual), num(l.sup_v())]);
        let ok = l.mass_ok() && l.residual_ok();
        passed &= ok;
        say!(
            "epsilon={}: mass={:e} residual={:e} (bound {:e}) sup_v={:e} {}",
            l.eps,
            l.mass,
            l.residual,
            weakderiv::transport::RESIDUAL_TOL * l.sup_g,
            l.sup_v(),
            if ok { "ok" } else { "FAIL" }
        );
    }
    if a.moderate {
        for (label, fam) in [("f_eps", rep.densities()), ("v_eps", rep.velocities())] {
            match moderateness_estimate(&a.eps.0, &fam, a.region, 0) {
                Ok(fit) => say!("moderateness {label}: N={:.6} c={:e} r2={:.6}", fit.exponent, fit.c, fit.r_squared),
                Err(e) => say!("moderateness {label}: skipped ({e})"),
            }
        }
    }
    // summary first: a closed stdout must not lose it
    if let Some(p) = &a.summary {
        emit(&summary, &header, Some(p))?;
    }
    emit(&t, &header, out)?;
    Ok(passed)
}

pub fn fourier(a: &FourierArgs, out: Option<&Path>) -> CliResult<Passed> {
    let mu = read_measure(&a.mu)?;
    let a0 = measure_fourier_coefficients(&mu, a.n)?;
    let mut header = Header::new("fourier");
    header.push("mu", a.mu.display());
    header.push("eta", a.eta.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    header.push("n", a.n);

    let mut t = Table::new(&["object", "n", "re", "im"]);
    let max = a.n as i64;
    for n in -max..=max {
        let c = a0.get(n);
        t.row(&["mu".into(), n.to_string(), num(c.re), num(c.im)]);
    }
    let psd = toeplitz_psd(&a0)?;
    say!("toeplitz_psd: {} min_eigenvalue={:e} norm={:e}", psd.is_psd, psd.min_eigenvalue, psd.norm);
    let mut passed = psd.is_psd;
    if let Some(path) = &a.eta {
        let eta = read_distribution(path)?;
        let a1 = fourier_coefficients(&eta, a.n);
        for n in -max..=max {
            let c = a1.get(n);
            t.row(&["eta".into(), n.to_string(), num(c.re), num(c.im)]);
        }
        for r in tangent_condition_scan(&a0, &a1, a.n)? {
            say!(
                "tangent N={}: {} kernel_dim={} min_projected_eigenvalue={:e} projected_norm={:e}",
                r.max_frequency,
                if r.satisfied { "satisfied" } else { "violated" },
                r.kernel_dim,
                r.min_projected_eigenvalue,
                r.projected_norm
            );
            passed &= r.satisfied;
        }
    }
    emit(&t, &header, out)?;
    Ok(passed)
}

fn read_polytope(path: &Path) -> CliResult<HPolytope> {
    let body = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, raw) in body.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = crate::args::parse_list(line)
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok(HPolytope::from_rows(&rows)?)
}

/// `-0.0` prints as `0.0`.
fn tidy(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| x + 0.0).collect()
}

pub fn cone(a: &ConeArgs, out: Option<&Path>) -> CliResult<Passed> {
    let body = match (&a.polytope, &a.ball) {
        (Some(p), None) => ConvexBody::Polytope(read_polytope(p)?),
        (None, Some(crate::args::Coords(b))) if b.len() >= 2 => {
            let d = b.len() - 1;
            ConvexBody::Ball(Ball::new(DVector::from_column_slice(&b[..d]), b[d])?)
        }
        _ => return Err(CliError::Usage("give exactly one of --polytope FILE or --ball c_1,…,c_d,r".into())),
    };
    let p = DVector::from_vec(a.point.0.clone());
    let v = DVector::from_vec(a.direction.0.clone());
    let mut header = Header::new("cone");
    header.push("polytope", a.polytope.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    header.push("ball", a.ball.as_ref().map(|b| format!("{:?}", b.0)).unwrap_or_default());
    header.push("point", format!("{:?}", a.point.0));
    header.push("direction", format!("{:?}", a.direction.0));
    header.push("levels", a.levels);

    for theta in body.normal_functionals(&p)? {
        say!("normal_functional: {:?}", tidy(theta.as_slice()));
    }
    let (class, cert) = body.classify_with_certificate(&p, &v)?;
    say!("class: {class:?}");
    if let Some(c) = cert {
        say!("certificate: {:?} value={:e}", tidy(c.as_slice()), c.dot(&v));
        return Ok(false);
    }
    let curve = body.construct_curve(&p, &v, a.levels)?;
    let grid = dyadic_grid(3, 13.min(a.levels));
    let check = verify_curve_derivative(&curve, &p, &v, &grid);
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=body.dim()).map(|i| format!("c_{i}")));
    cols.push("quotient_error".into());
    let mut t = Table::new(&cols);
    for (tj, err) in &check.errors {
        let c = curve.eval(*tj);
        let mut row = vec![num(*tj)];
        row.extend(c.iter().map(|x| num(*x)));
        row.push(num(*err));
        t.row(&row);
    }
    say!(
        "curve: max_error={:e} monotone={} rate={}",
        check.max_error,
        check.monotone_decreasing(),
        check.observed_rate.map(|r| format!("{r:.4}")).unwrap_or_else(|| "n/a".into())
    );
    emit(&t, &header, out)?;
    Ok(class != DirectionClass::Outside)
}
