//! Tangent cones of polytopes and balls in `ℝ^d`, normal functionals, and
//! the polygonal curve leaving a point in a prescribed direction.
//!
//! For a polytope the tangent cone at `p` is closed: `v` is tangent iff
//! `a_i · v <= 0` on every active row. For a ball, directions tangent to the
//! sphere at a boundary point are limits of tangent directions but never
//! tangent themselves; the curve through them follows chords `v - δ n` with
//! `δ → 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Active-set tolerance on `a_i · p - b_i` and on ball membership.
pub const ACTIVE_TOL: f64 = 1e-9;
/// Sign tolerance on `θ(v)`, relative to `|θ| |v|`.
pub const DIRECTION_TOL: f64 = 1e-12;
/// Default number of halvings in a curve ladder.
pub const DEFAULT_CURVE_LEVELS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
    vertices: Vec<DVector<f64>>,
}

impl HPolytope {
    /// `{x : A x <= b}`; must be nonempty and bounded.
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let (m, d) = a.shape();
        if d == 0 || m != b.len() {
            return Err(Error::Construction(format!("constraint shapes {m}×{d} and {} disagree", b.len())));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Construction("non-finite constraint data".into()));
        }
        if a.rank(1e-12) < d {
            return Err(Error::Construction("constraint normals do not span the space: set is unbounded".into()));
        }
        let vertices = enumerate_vertices(&a, &b);
        if vertices.is_empty() {
            return Err(Error::Construction("polytope is empty".into()));
        }
        if let Some(ray) = recession_ray(&a) {
            return Err(Error::Construction(format!("polytope is unbounded along {:?}", ray.as_slice())));
        }
        Ok(Self { a, b, vertices })
    }

    /// `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        let a = DMatrix::from_fn(2 * d, d, |r, c| {
            if r / 2 != c {
                0.0
            } else if r % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let b = DVector::from_fn(2 * d, |r, _| if r % 2 == 0 { hi } else { -lo });
        Self::new(a, b)
    }

    /// From rows `(a_1, …, a_d, b)`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len().saturating_sub(1));
        if d == 0 || rows.iter().any(|r| r.len() != d + 1) {
            return Err(Error::Construction("rows must all have the form a_1, …, a_d, b".into()));
        }
        let a = DMatrix::from_fn(rows.len(), d, |r, c| rows[r][c]);
        let b = DVector::from_fn(rows.len(), |r, _| rows[r][d]);
        Self::new(a, b)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    /// `a_i · x - b_i` for each row.
    pub fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - &self.b
    }

    fn active_rows(&self, p: &DVector<f64>) -> Vec<usize> {
        let s = self.slacks(p);
        (0..s.len()).filter(|&i| s[i].abs() <= ACTIVE_TOL).collect()
    }
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

fn rows_of(a: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), a.ncols(), |r, c| a[(idx[r], c)])
}

fn enumerate_vertices(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = a.ncols();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for idx in subsets(a.nrows(), d) {
        let sub = rows_of(a, &idx);
        let rhs = DVector::from_fn(d, |r, _| b[idx[r]]);
        let Some(x) = sub.clone().lu().solve(&rhs) else { continue };
        if sub.rank(1e-12) < d {
            continue;
        }
        let feasible = (a * &x - b).iter().all(|s| *s <= ACTIVE_TOL);
        if feasible && !out.iter().any(|v| (v - &x).norm() <= 1e-10) {
            out.push(x);
        }
    }
    out
}

/// A nonzero `y` with `A y <= 0`, if one exists (`A` of full column rank).
fn recession_ray(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    let d = a.ncols();
    let candidates: Vec<DVector<f64>> = if d == 1 {
        vec![DVector::from_element(1, 1.0)]
    } else {
        subsets(a.nrows(), d - 1)
            .into_iter()
            .filter_map(|idx| {
                let sub = rows_of(a, &idx);
                if sub.rank(1e-12) < d - 1 {
                    return None;
                }
                // null vector of the (d-1)×d block: last right singular vector
                let padded = sub.clone().insert_row(d - 1, 0.0);
                let svd = padded.svd(false, true);
                let vt = svd.v_t?;
                let (i_min, _) = svd
                    .singular_values
                    .iter()
                    .enumerate()
                    .min_by(|x, y| x.1.total_cmp(y.1))?;
                Some(vt.row(i_min).transpose())
            })
            .collect()
    };
    for y in candidates {
        for dir in [y.clone(), -y] {
            let scale = dir.norm() * a.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
            if (a * &dir).iter().all(|v| *v <= 1e-12 * scale) {
                return Some(dir);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: DVector<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: DVector<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Construction(format!("invalid ball radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(d: usize) -> Self {
        Self { center: DVector::zeros(d), radius: 1.0 }
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn on_boundary(&self, p: &DVector<f64>) -> bool {
        ((p - &self.center).norm() - self.radius).abs() <= ACTIVE_TOL
    }

    fn outward_normal(&self, p: &DVector<f64>) -> DVector<f64> {
        (p - &self.center) / self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    Polytope(HPolytope),
    Ball(Ball),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionClass {
    /// `p + t v ∈ C` for some `t > 0`.
    InTangentCone,
    /// Every normal functional is `>= 0` on `v`, yet `p + t v ∉ C` for `t > 0`.
    InClosureOnly,
    Outside,
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(h) => h.a.ncols(),
            ConvexBody::Ball(b) => b.center.len(),
        }
    }

    /// Largest constraint violation at `x` (negative inside).
    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        match self {
            ConvexBody::Polytope(h) => h.slacks(x).max(),
            ConvexBody::Ball(b) => (x - &b.center).norm() - b.radius,
        }
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.residual(x) <= ACTIVE_TOL
    }

    fn require_member(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Domain(format!("point of dimension {} in a body of dimension {}", p.len(), self.dim())));
        }
        if !self.contains(p) {
            return Err(Error::Domain(format!("point {:?} lies outside the set (residual {:e})", p.as_slice(), self.residual(p))));
        }
        Ok(())
    }

    /// Generators of `{θ : θ(p) = min_C θ}`: negated active rows of a
    /// polytope, or the inward normal at a boundary point of a ball.
    pub fn normal_functionals(&self, p: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        self.require_member(p)?;
        Ok(match self {
            ConvexBody::Polytope(h) => h.active_rows(p).into_iter().map(|i| -h.a.row(i).transpose()).collect(),
            ConvexBody::Ball(b) => {
                if b.on_boundary(p) {
                    vec![-b.outward_normal(p)]
                } else {
                    vec![]
                }
            }
        })
    }

    pub fn classify_direction(&self, p: &DVector<f64>, v: &DVector<f64>) -> Result<DirectionClass> {
        Ok(self.classify_with_certificate(p, v)?.0)
    }

    /// Classification plus the most negative normal functional when outside.
    pub fn classify_with_certificate(
        &self,
        p: &DVector<f64>,
        v: &DVector<f64>,
    ) -> Result<(DirectionClass, Option<DVector<f64>>)> {
        self.require_member(p)?;
        if v.len() != self.dim() {
            return Err(Error::Domain("direction has the wrong dimension".into()));
        }
        let thetas = self.normal_functionals(p)?;
        let worst = thetas
            .iter()
            .map(|th| (th.dot(v) / (th.norm() * v.norm()).max(f64::MIN_POSITIVE), th))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((value, theta)) = worst {
            if value < -DIRECTION_TOL {
                return Ok((DirectionClass::Outside, Some(theta.clone())));
            }
        }
        let class = match self {
            // polyhedral tangent cones are closed
            ConvexBody::Polytope(_) => DirectionClass::InTangentCone,
            ConvexBody::Ball(_) => match worst {
                Some((value, _)) if value <= DIRECTION_TOL && v.norm() > 0.0 => DirectionClass::InClosureOnly,
                _ => DirectionClass::InTangentCone,
            },
        };
        Ok((class, None))
    }

    /// Polygonal curve `c` with `c(0) = p`, `c(t) ∈ C`, `c'(0+) = v`, through
    /// the nodes `p + t_j v_j`, `t_j = t_1 2^{-j}`.
    pub fn construct_curve(&self, p: &DVector<f64>, v: &DVector<f64>, levels: usize) -> Result<CurveSample> {
        let (class, cert) = self.classify_with_certificate(p, v)?;
        if class == DirectionClass::Outside {
            let certificate = cert.map(|c| c.as_slice().to_vec()).unwrap_or_default();
            return Err(Error::OutsideDirection { certificate });
        }
        let vn2 = v.norm_squared();
        let (t1, tilt): (f64, Option<(DVector<f64>, f64)>) = match (self, class) {
            (ConvexBody::Ball(b), DirectionClass::InClosureOnly) => (0.5_f64.min(b.radius / v.norm()), Some((b.outward_normal(p), b.radius))),
            (ConvexBody::Ball(b), _) if vn2 > 0.0 => {
                let t = if b.on_boundary(p) {
                    -b.radius * b.outward_normal(p).dot(v) / vn2
                } else {
                    0.5 * (b.radius - (p - &b.center).norm()) / v.norm()
                };
                (0.5_f64.min(t), None)
            }
            (ConvexBody::Polytope(h), _) if vn2 > 0.0 => {
                let s = h.slacks(p);
                let av = &h.a * v;
                let limit = (0..s.len())
                    .filter(|&i| av[i] > 0.0 && s[i] < -ACTIVE_TOL)
                    .map(|i| -s[i] / av[i])
                    .fold(f64::INFINITY, f64::min);
                (0.5_f64.min(0.5 * limit), None)
            }
            _ => (0.5, None),
        };
        let mut times = Vec::with_capacity(levels + 1);
        let mut points = Vec::with_capacity(levels + 1);
        for j in 0..=levels {
            let t = t1 * 0.5f64.powi(j as i32);
            let vj = match &tilt {
                // δ_j = t_j |v|² / r keeps the chord inside the ball
                Some((n, r)) => v - n * (t * vn2 / r),
                None => v.clone(),
            };
            let x = p + &vj * t;
            if !self.contains(&x) {
                return Err(Error::Construction(format!("curve node at t = {t} left the set")));
            }
            times.push(t);
            points.push(x);
        }
        CurveSample::new(p.clone(), times, points)
    }
}

/// Nodes `(t_j, p_j)` with `t_1 > t_2 > … > 0`; linear in between and on
/// `[0, t_last]`, constant beyond `t_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    origin: DVector<f64>,
    times: Vec<f64>,
    points: Vec<DVector<f64>>,
}

impl CurveSample {
    pub fn new(origin: DVector<f64>, times: Vec<f64>, points: Vec<DVector<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::Construction("curve needs matching nonempty times and points".into()));
        }
        if times.windows(2).any(|w| !(w[1] < w[0])) || !(times[times.len() - 1] > 0.0) {
            return Err(Error::Construction("curve times must be positive and strictly decreasing".into()));
        }
        Ok(Self { origin, times, points })
    }

    /// Nodes `p + t_i v_i` from an arbitrary decreasing time sequence and
    /// approximating directions.
    pub fn from_sequence(origin: DVector<f64>, times: Vec<f64>, directions: &[DVector<f64>]) -> Result<Self> {
        if times.len() != directions.len() {
            return Err(Error::Construction("one direction per time required".into()));
        }
        let points = times.iter().zip(directions).map(|(t, v)| &origin + v * *t).collect();
        Self::new(origin, times, points)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        if t <= 0.0 {
            return self.origin.clone();
        }
        if t >= self.times[0] {
            return self.points[0].clone();
        }
        let last = self.times.len() - 1;
        if t <= self.times[last] {
            let w = t / self.times[last];
            return &self.origin + (&self.points[last] - &self.origin) * w;
        }
        // times are decreasing: find j with t_{j+1} <= t < t_j
        let j = self.times.partition_point(|&tj| tj > t) - 1;
        let (ta, tb) = (self.times[j], self.times[j + 1]);
        let w = (t - tb) / (ta - tb);
        &self.points[j + 1] + (&self.points[j] - &self.points[j + 1]) * w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveCheck {
    pub errors: Vec<(f64, f64)>,
    pub max_error: f64,
    /// Least-squares slope of `log error` against `log t`; `None` when fewer
    /// than two errors are positive.
    pub observed_rate: Option<f64>,
}

impl CurveCheck {
    pub fn monotone_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// `‖(c(t) - p)/t - v‖` over `t_grid`, with a fitted convergence order.
pub fn verify_curve_derivative(curve: &CurveSample, p: &DVector<f64>, v: &DVector<f64>, t_grid: &[f64]) -> CurveCheck {
    let errors: Vec<(f64, f64)> = t_grid.iter().map(|&t| (t, ((curve.eval(t) - p) / t - v).norm())).collect();
    let max_error = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let logs: Vec<(f64, f64)> = errors.iter().filter(|e| e.1 > 0.0).map(|e| (e.0.ln(), e.1.ln())).collect();
    let observed_rate = (logs.len() >= 2).then(|| {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|l| l.0).sum::<f64>() / n;
        let my = logs.iter().map(|l| l.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|l| (l.0 - mx) * (l.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|l| (l.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    CurveCheck { errors, max_error, observed_rate }
}

/// `{2^{-j}}` for `j` in `lo..=hi`.
pub fn dyadic_grid(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Brute-force tangency probe: some `t = 2^{-j}`, `j <= 20`, has
/// `p + t v ∈ C` with residual at most `tol`. Smaller `t` would hide
/// second-order violations below rounding.
pub fn probe_membership(body: &ConvexBody, p: &DVector<f64>, v: &DVector<f64>, tol: f64) -> bool {
    (0..=20).any(|j| body.residual(&(p + v * 0.5f64.powi(j))) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y])
    }

    fn square() -> ConvexBody {
        ConvexBody::Polytope(HPolytope::cube(2, 0.0, 1.0).unwrap())
    }

    #[test]
    fn polytope_validation() {
        assert_eq!(HPolytope::cube(2, 0.0, 1.0).unwrap().vertices().len(), 4);
        // half-plane: unbounded
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0, 1.0]]).is_err());
        // strip: rank deficient
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0]]).is_err());
        // triangle x <= 0, y <= 0, x + y >= -1
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![-1.0, -1.0, 1.0]]).is_ok());
        // cone x <= 0, y <= 0, full rank yet unbounded
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).is_err());
        // empty
        assert!(HPolytope::from_rows(&[vec![1.0, 0.0, -1.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], vec![0.0, -1.0, 1.0]]).is_err());
    }

    #[test]
    fn square_corner_functionals() {
        let th = square().normal_functionals(&vec2(0.0, 0.0)).unwrap();
        assert_eq!(th.len(), 2);
        assert!(th.contains(&vec2(1.0, 0.0)) && th.contains(&vec2(0.0, 1.0)));
        assert!(square().normal_functionals(&vec2(2.0, 0.0)).is_err());
    }

    #[test]
    fn ball_functionals() {
        let ball = ConvexBody::Ball(Ball::unit(2));
        assert!(ball.normal_functionals(&vec2(0.3, 0.1)).unwrap().is_empty());
        assert_eq!(ball.normal_functionals(&vec2(1.0, 0.0)).unwrap(), vec![vec2(-1.0, 0.0)]);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(square().classify_direction(&vec2(0.0, 0.0), &vec2(1.0, 0.0)).unwrap(), DirectionClass::InTangentCone);
        assert_eq!(square().classify_direction(&vec2(0.0, 0.0), &vec2(-1.0, 0.5)).unwrap(), DirectionClass::Outside);
        let ball = ConvexBody::Ball(Ball::unit(2));
        let p = vec2(1.0, 0.0);
        assert_eq!(ball.classify_direction(&p, &vec2(0.0, 1.0)).unwrap(), DirectionClass::InClosureOnly);
        assert_eq!(ball.classify_direction(&p, &vec2(1.0, 0.0)).unwrap(), DirectionClass::Outside);
        assert_eq!(ball.classify_direction(&p, &vec2(-1.0, 3.0)).unwrap(), DirectionClass::InTangentCone);
        assert_eq!(ball.classify_direction(&p, &vec2(0.0, 0.0)).unwrap(), DirectionClass::InTangentCone);
        assert!(!probe_membership(&ball, &p, &vec2(0.0, 1.0), 1e-15));
    }

    #[test]
    fn linear_curve_in_square() {
        let p = vec2(0.0, 0.0);
        let v = vec2(1.0, 1.0);
        let c = square().construct_curve(&p, &v, 30).unwrap();
        let check = verify_curve_derivative(&c, &p, &v, &dyadic_grid(3, 13));
        assert!(check.max_error <= 1e-12);
    }

    #[test]
    fn ball_boundary_curve_first_order() {
        let ball = ConvexBody::Ball(Ball::unit(2));
        let p = vec2(1.0, 0.0);
        let v = vec2(0.0, 1.0);
        let c = ball.construct_curve(&p, &v, DEFAULT_CURVE_LEVELS).unwrap();
        for i in 0..=1000 {
            assert!(ball.contains(&c.eval(i as f64 / 1000.0)));
        }
        let check = verify_curve_derivative(&c, &p, &v, &dyadic_grid(3, 13));
        assert!(check.monotone_decreasing(), "{:?}", check.errors);
        assert!((check.observed_rate.unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn outside_direction_refused_with_certificate() {
        let ball = ConvexBody::Ball(Ball::unit(2));
        let err = ball.construct_curve(&vec2(1.0, 0.0), &vec2(1.0, 0.0), 10).unwrap_err();
        assert_eq!(err, Error::OutsideDirection { certificate: vec![-1.0, 0.0] });
    }

    #[test]
    fn perturbed_sequence_has_first_order_quotient() {
        let p = vec2(0.0, 0.0);
        let v = vec2(1.0, 0.0);
        let u = vec2(0.0, 1.0);
        let times: Vec<f64> = (1..=4096).map(|i| 1.0 / i as f64).collect();
        let dirs: Vec<DVector<f64>> = times.iter().map(|t| &v + &u * *t).collect();
        let c = CurveSample::from_sequence(p.clone(), times.clone(), &dirs).unwrap();
        let body = ConvexBody::Polytope(HPolytope::cube(2, -1.0, 1.0).unwrap());
        assert!(c.points().iter().all(|x| body.contains(x)));
        let grid: Vec<f64> = [2usize, 8, 32, 128, 512, 2048].iter().map(|i| 1.0 / *i as f64).collect();
        let check = verify_curve_derivative(&c, &p, &v, &grid);
        assert!((check.observed_rate.unwrap() - 1.0).abs() < 0.05, "{check:?}");
    }
}
