use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How a point sits relative to a [`SupportSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Outside,
    /// Interior of a positive-length component.
    Interior,
    /// Endpoint of a positive-length component.
    Boundary,
    /// A degenerate component `[p, p]`.
    Isolated,
}

/// Finite union of closed intervals, kept sorted with strictly positive gaps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportSet {
    intervals: Vec<(f64, f64)>,
}

fn tol(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

impl SupportSet {
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut iv: Vec<(f64, f64)> = Vec::new();
        for (a, b) in intervals {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::Domain(format!("invalid support interval [{a}, {b}]")));
            }
            iv.push((a, b));
        }
        iv.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(p: f64) -> Self {
        Self { intervals: vec![(p, p)] }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new([(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        Self::new(self.intervals.iter().chain(&other.intervals).copied())
            .expect("canonical inputs stay valid")
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// Minkowski sum with `[-r, r]`.
    pub fn dilate(&self, r: f64) -> SupportSet {
        Self::new(self.intervals.iter().map(|&(a, b)| (a - r, b + r))).expect("dilation keeps order")
    }

    pub fn contains(&self, x: f64) -> bool {
        self.classify(x) != PointClass::Outside
    }

    pub fn classify(&self, x: f64) -> PointClass {
        for &(a, b) in &self.intervals {
            let t = tol(x);
            if x < a - t || x > b + t {
                continue;
            }
            if b - a <= tol(a) {
                return PointClass::Isolated;
            }
            if (x - a).abs() <= t || (x - b).abs() <= t {
                return PointClass::Boundary;
            }
            return PointClass::Interior;
        }
        PointClass::Outside
    }

    /// Whether `[a, b]` lies inside one component.
    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| a >= lo - tol(lo) && b <= hi + tol(hi))
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.intervals.iter().all(|&(a, b)| other.contains_interval(a, b))
    }

    pub fn isolated_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().filter(|(a, b)| b - a <= tol(*a)).map(|(a, _)| *a)
    }

    /// Open components of `(lo, hi) \ self`.
    pub fn complement_within(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for &(a, b) in &self.intervals {
            if a > cursor && a > lo {
                out.push((cursor, a.min(hi)));
            }
            cursor = cursor.max(b);
            if cursor >= hi {
                break;
            }
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        out.retain(|(a, b)| b > a);
        out
    }

    /// Distance from `x` to the nearest point of the set other than `x`'s
    /// own component.
    pub fn gap_around(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .filter(|&&(a, b)| !(x >= a - tol(a) && x <= b + tol(b)))
            .map(|&(a, b)| if b < x { x - b } else { a - x })
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{}", parts.join(";"))
        }
    }
}

impl FromStr for SupportSet {
    type Err = Error;

    /// Parses `[a1,b1];[a2,b2]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse { line: 0, message: format!("{m} in support `{s}`") };
        let mut out = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let inner = part
                .strip_prefix('[')
                .and_then(|p| p.strip_suffix(']'))
                .ok_or_else(|| bad("expected [a,b]"))?;
            let mut nums = inner.split(',').map(|v| v.trim().parse::<f64>());
            let a = nums.next().ok_or_else(|| bad("missing endpoint"))?.map_err(|_| bad("bad number"))?;
            let b = nums.next().ok_or_else(|| bad("missing endpoint"))?.map_err(|_| bad("bad number"))?;
            if nums.next().is_some() {
                return Err(bad("too many endpoints"));
            }
            out.push((a, b));
        }
        SupportSet::new(out)
    }
}
