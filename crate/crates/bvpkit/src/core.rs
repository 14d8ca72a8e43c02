//! Shared domain types: problem definitions, uniform meshes, solution
//! profiles and solver reports.

use crate::error::{Error, Result};

/// Right-hand side of `v'' = f(r, v, v')` or one of its partial derivatives.
pub type RhsFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// A second-order two-point boundary value problem
/// `v'' = f(r, v, v')` on `[a, b]` with `v'(a) = alpha` and `v(b) = beta`.
pub struct ProblemDefinition {
    /// Left endpoint `a`.
    pub domain_start: f64,
    /// Right endpoint `b` (truncation of an unbounded domain where applicable).
    pub domain_end: f64,
    /// Offset added to `a` when integrating initial value problems, so that
    /// right-hand sides singular at `a` are never evaluated there.
    pub singular_offset: f64,
    /// `f(r, v, v')`.
    pub rhs: Box<RhsFn>,
    /// `∂f/∂v`.
    pub rhs_dv: Box<RhsFn>,
    /// `∂f/∂v'`.
    pub rhs_dvp: Box<RhsFn>,
    /// Neumann value `alpha = v'(a)`.
    pub left_neumann: f64,
    /// Dirichlet value `beta = v(b)`.
    pub right_dirichlet: f64,
}

impl ProblemDefinition {
    /// Validates the geometric invariants; the closures are taken on trust.
    pub fn new(
        domain_start: f64,
        domain_end: f64,
        singular_offset: f64,
        rhs: Box<RhsFn>,
        rhs_dv: Box<RhsFn>,
        rhs_dvp: Box<RhsFn>,
        left_neumann: f64,
        right_dirichlet: f64,
    ) -> Result<Self> {
        if !(domain_start < domain_end) {
            return Err(Error::InvalidDomain(format!(
                "domain_start {domain_start} must be below domain_end {domain_end}"
            )));
        }
        if !(singular_offset >= 0.0 && singular_offset < domain_end - domain_start) {
            return Err(Error::InvalidDomain(format!(
                "singular_offset {singular_offset} must lie in [0, {})",
                domain_end - domain_start
            )));
        }
        Ok(Self {
            domain_start,
            domain_end,
            singular_offset,
            rhs,
            rhs_dv,
            rhs_dvp,
            left_neumann,
            right_dirichlet,
        })
    }
}

/// Uniform grid over `[a, b]` with `n` subintervals and `n + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    n_subintervals: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Mesh {
    pub fn n_subintervals(&self) -> usize {
        self.n_subintervals
    }

    /// Spacing `h = (b - a) / n`, computed in a single division.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Builds a uniform mesh. Nodes are `a + i*h` rather than a running sum, so
/// each node carries one rounding of its own instead of accumulated drift.
pub fn build_mesh(a: f64, b: f64, n: usize) -> Result<Mesh> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "mesh endpoints must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidDomain(format!(
            "mesh needs at least 2 subintervals, got {n}"
        )));
    }
    let h = (b - a) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidDomain(format!(
            "mesh over [{a}, {b}] with n = {n} is too fine to resolve in f64"
        )));
    }
    Ok(Mesh {
        n_subintervals: n,
        spacing: h,
        nodes,
    })
}

/// A sampled curve: paired abscissae and values, abscissae strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionProfile {
    abscissae: Vec<f64>,
    values: Vec<f64>,
}

impl SolutionProfile {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidDomain(format!(
                "profile length mismatch: {} abscissae vs {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.len() < 2 {
            return Err(Error::InvalidDomain(
                "profile needs at least 2 samples".into(),
            ));
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidDomain(
                "profile abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { abscissae, values })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 2 by construction
    }

    /// Piecewise-linear evaluation at `r`; `None` outside the sampled range.
    pub fn interpolate(&self, r: f64) -> Option<f64> {
        let first = *self.abscissae.first().unwrap();
        let last = *self.abscissae.last().unwrap();
        if r < first || r > last {
            return None;
        }
        // index of the first abscissa >= r
        let idx = self.abscissae.partition_point(|&x| x < r);
        if idx == 0 {
            return Some(self.values[0]);
        }
        if self.abscissae[idx] == r {
            return Some(self.values[idx]);
        }
        let (x0, x1) = (self.abscissae[idx - 1], self.abscissae[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        let t = (r - x0) / (x1 - x0);
        Some(y0 + t * (y1 - y0))
    }
}

/// Which engine produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Shooting,
    FiniteDifference,
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverMethod::Shooting => write!(f, "shooting"),
            SolverMethod::FiniteDifference => write!(f, "finite_difference"),
        }
    }
}

/// Outcome of a solve: iteration count, convergence flag, the final
/// per-iteration metric and the full metric history.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub method: SolverMethod,
    pub iterations: usize,
    pub converged: bool,
    /// `|v(b) - beta|` for shooting, Euclidean norm of the Newton update for
    /// finite differences.
    pub final_metric: f64,
    pub tolerance: f64,
    /// One metric per iteration; `history.len() == iterations`.
    pub history: Vec<f64>,
}

/// Counts sign changes between consecutive values of magnitude above
/// `dead_band`; values inside the band are skipped when pairing.
pub fn count_sign_changes(profile: &SolutionProfile, dead_band: f64) -> usize {
    assert!(dead_band >= 0.0, "dead_band must be non-negative");
    let mut changes = 0;
    let mut last_sign = 0i8;
    for &v in profile.values() {
        if v.abs() <= dead_band {
            continue;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    changes
}

/// Maximum of `|p1 - p2|` over p1's abscissae inside the common domain,
/// with p2 evaluated by piecewise-linear interpolation.
pub fn profile_max_abs_difference(p1: &SolutionProfile, p2: &SolutionProfile) -> Result<f64> {
    let lo = p1.abscissae()[0].max(p2.abscissae()[0]);
    let hi = p1.abscissae()[p1.len() - 1].min(p2.abscissae()[p2.len() - 1]);
    if lo > hi {
        return Err(Error::EmptyOverlap);
    }
    let mut max = 0.0f64;
    for (i, &r) in p1.abscissae().iter().enumerate() {
        if r < lo || r > hi {
            continue;
        }
        if let Some(other) = p2.interpolate(r) {
            max = max.max((p1.values()[i] - other).abs());
        }
    }
    Ok(max)
}
