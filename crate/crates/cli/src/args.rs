use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Admissible derivatives of measure families, mollified transport
/// velocities and tangent cones.
#[derive(Debug, Parser)]
#[command(name = "weakderiv", version, args_override_self = true)]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for the numerical kernels.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// CSV destination; standard output when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether η is an admissible derivative at μ.
    Check(CheckArgs),
    /// Search for a test function refuting admissibility.
    Falsify(FalsifyArgs),
    /// Verify the weak derivative of an explicit family numerically.
    Deform(DeformArgs),
    /// Mollified velocity solving the smoothed continuity equation.
    Velocity(VelocityArgs),
    /// Fourier coefficients, Toeplitz positivity and the tangent condition on the circle.
    Fourier(FourierArgs),
    /// Tangent-cone classification and curve construction in ℝ^d.
    Cone(ConeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModeArg {
    OneSided,
    TwoSided,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Spec file of the base measure μ.
    #[arg(long)]
    pub mu: PathBuf,
    /// Spec file of the candidate derivative η.
    #[arg(long)]
    pub eta: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::OneSided)]
    pub mode: ModeArg,
    /// Oracle evaluation budget.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Also require ⟨η, 1⟩ = 0 (probability families).
    #[arg(long)]
    pub probability: bool,
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// μ_t = δ_t
    Delta,
    /// Uniform density plus a shrinking k-th derivative bump.
    Explicit,
    /// μ + t ν
    Affine,
    /// (1 + r t) μ
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Derivative order of the explicit family.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Hölder exponent of the explicit family, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Base measure for affine and scaling families.
    #[arg(long)]
    pub mu: Option<PathBuf>,
    /// Direction measure ν of the affine family.
    #[arg(long)]
    pub direction: Option<PathBuf>,
    /// Rate r of the scaling family.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Divide each member by its mass.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Pass threshold on the relative error of every battery entry.
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
    /// Summary CSV (phi_id, estimate, target, abs_err).
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    /// Number of t samples in the main CSV.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct VelocityArgs {
    #[arg(long)]
    pub mu: PathBuf,
    #[arg(long)]
    pub eta: PathBuf,
    /// Comma-separated ε ladder; sorted descending.
    #[arg(long, value_parser = parse_ladder, default_value = "0.2,0.1,0.05,0.025,0.0125")]
    pub eps: Ladder,
    /// Plateau ratio of the mollifier.
    #[arg(long, default_value_t = 0.5)]
    pub shape: f64,
    /// Emit every n-th grid node.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Summary CSV (epsilon, residual, sup_v).
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    /// Print moderateness fits of f_ε and v^ε over `--region`.
    #[arg(long)]
    pub moderate: bool,
    /// Compact set K for the moderateness fit, `lo,hi`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-0.25,0.25")]
    pub region: (f64, f64),
}

#[derive(Debug, Args)]
pub struct FourierArgs {
    /// Spec of the positive measure on the circle.
    #[arg(long)]
    pub mu: PathBuf,
    /// Optional candidate derivative; enables the tangent condition.
    #[arg(long)]
    pub eta: Option<PathBuf>,
    /// Largest frequency N.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct ConeArgs {
    /// CSV of rows `a_1, …, a_d, b` describing `A x <= b`.
    #[arg(long, conflicts_with = "ball")]
    pub polytope: Option<PathBuf>,
    /// Ball as `c_1,…,c_d,r`.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub ball: Option<Coords>,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub point: Coords,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    pub direction: Coords,
    /// Halvings in the curve ladder.
    #[arg(long, default_value_t = 40)]
    pub levels: usize,
}

/// Comma-separated coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

pub fn parse_coords(s: &str) -> Result<Coords, String> {
    parse_list(s).map(Coords)
}

/// Strictly decreasing ε values in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(pub Vec<f64>);

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{f}` is not a finite number"))
        })
        .collect()
}

pub fn parse_ladder(s: &str) -> Result<Ladder, String> {
    let mut v = parse_list(s)?;
    if let Some(bad) = v.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(format!("ε = {bad} is not in (0, 1)"));
    }
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    Ok(Ladder(v))
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        _ => Err(format!("`{s}` is not `lo,hi` with lo < hi")),
    }
}

impl ModeArg {
    pub fn mode(self) -> weakderiv::Mode {
        match self {
            ModeArg::OneSided => weakderiv::Mode::OneSided,
            ModeArg::TwoSided => weakderiv::Mode::TwoSided,
        }
    }
}

impl std::fmt::Display for Ladder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Keys whose values are file paths; relative ones resolve against the
/// config file's directory.
const PATH_KEYS: [&str; 5] = ["mu", "eta", "direction", "polytope", "summary"];

/// Flags from a `key = value` file, placed after the subcommand so that
/// later command-line flags override them. Unknown keys surface as clap
/// usage errors.
pub fn splice_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut extra = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected `key = value`", n + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if matches!(k, "config" | "jobs" | "out") {
            return Err(format!("{path}:{}: `{k}` must be given on the command line", n + 1));
        }
        let base = std::path::Path::new(&path).parent().unwrap_or(std::path::Path::new(""));
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ if PATH_KEYS.contains(&k) && std::path::Path::new(v).is_relative() => {
                extra.push(format!("--{k}={}", base.join(v).display()))
            }
            _ => extra.push(format!("--{k}={v}")),
        }
    }
    // insert right after the subcommand name
    let sub = argv
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| ["check", "falsify", "deform", "velocity", "fourier", "cone"].contains(&a.as_str()))
        .map(|(i, _)| i);
    let Some(sub) = sub else { return Ok(argv) };
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_sorted_descending() {
        assert_eq!(parse_ladder("0.05,0.2,0.1").unwrap(), Ladder(vec![0.2, 0.1, 0.05]));
        assert!(parse_ladder("0.2,1.5").is_err());
        assert!(parse_ladder("0.2,x").is_err());
    }

    #[test]
    fn check_mode_parsed() {
        let cli = Cli::try_parse_from(["weakderiv", "check", "--mu", "mu.spec", "--eta", "eta.spec", "--mode", "two_sided"]).unwrap();
        match cli.command {
            Command::Check(c) => assert_eq!(c.pair.mode, ModeArg::TwoSided),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let err = Cli::try_parse_from(["weakderiv", "check", "--mu", "a", "--eta", "b", "--bogus", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
