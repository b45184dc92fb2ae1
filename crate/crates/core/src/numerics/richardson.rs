use crate::error::{Error, Result};

/// Which side the one-sided derivative is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `t → 0+`
    Right,
    /// `t → 0-`
    Left,
}

/// Assumed error expansion of the difference quotient `D(h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorPowers {
    /// `D(h) = F' + c₁h + c₂h² + …`
    Integer,
    /// `D(h) = F' + c₁h^α + c₂h^{2α} + …`, for Hölder-type families.
    Multiples(f64),
}

impl ErrorPowers {
    fn power(&self, level: usize) -> f64 {
        match self {
            ErrorPowers::Integer => level as f64,
            ErrorPowers::Multiples(alpha) => alpha * level as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonOptions {
    pub t_start: f64,
    /// Number of halvings `J`; the ladder is `t_start · 2^{-j}`, `j = 0..=J`.
    pub levels: usize,
    pub powers: ErrorPowers,
}

impl RichardsonOptions {
    pub fn new(t_start: f64) -> Self {
        Self { t_start, levels: 12, powers: ErrorPowers::Integer }
    }

    pub fn with_powers(mut self, powers: ErrorPowers) -> Self {
        self.powers = powers;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub estimate: f64,
    /// Size of the last extrapolation increment behind `estimate`.
    pub error_bound: f64,
    /// Rows of the tableau evaluated before stopping.
    pub rows: usize,
}

/// Error bounds below this multiple of `ε_mach · max|f| / h` count as being
/// at the rounding floor.
const NOISE_FACTOR: f64 = 1e4;

/// One-sided derivative of `f` at `t0` by Richardson extrapolation of
/// difference quotients over a halving ladder.
///
/// The tableau stops early once the diagonal increments start to grow while
/// the error bound is within reach of the rounding noise of the difference
/// quotients. Growth above that level is pre-asymptotic (for instance when
/// leading error terms vanish) and the ladder continues.
pub fn richardson_one_sided<F: FnMut(f64) -> f64>(
    mut f: F,
    t0: f64,
    side: Side,
    opts: &RichardsonOptions,
) -> Result<Extrapolation> {
    if !(opts.t_start > 0.0) {
        return Err(Error::Domain(format!("ladder start {} must be positive", opts.t_start)));
    }
    let sign = match side {
        Side::Right => 1.0,
        Side::Left => -1.0,
    };
    let f0 = f(t0);
    if !f0.is_finite() {
        return Err(Error::NonFinite { at: t0 });
    }

    let mut prev: Vec<f64> = Vec::new();
    let mut f_max = f0.abs();
    let mut best = Extrapolation { estimate: f64::NAN, error_bound: f64::INFINITY, rows: 0 };
    for i in 0..=opts.levels {
        let h = opts.t_start * 0.5f64.powi(i as i32);
        let t = t0 + sign * h;
        let ft = f(t);
        if !ft.is_finite() {
            return Err(Error::NonFinite { at: t });
        }
        f_max = f_max.max(ft.abs());
        let mut row = Vec::with_capacity(i + 1);
        row.push(sign * (ft - f0) / h);
        if i == 0 {
            best.estimate = row[0];
        }
        for m in 1..=i {
            let factor = 2f64.powf(opts.powers.power(m));
            let v = (factor * row[m - 1] - prev[m - 1]) / (factor - 1.0);
            let err = (v - row[m - 1]).abs().max((v - prev[m - 1]).abs());
            row.push(v);
            if err <= best.error_bound {
                best.estimate = v;
                best.error_bound = err;
            }
        }
        best.rows = i + 1;
        let noise = NOISE_FACTOR * f64::EPSILON * f_max.max(f64::MIN_POSITIVE) / h;
        if i > 0 && (row[i] - prev[i - 1]).abs() >= 2.0 * best.error_bound && best.error_bound <= noise {
            break;
        }
        prev = row;
    }
    Ok(best)
}
