//! Nonlinear shooting: the boundary value problem becomes a family of
//! initial value problems parameterised by `p = v(a)`, and bisection drives
//! the terminal value `v(b)` onto the right boundary condition.

use crate::core::{ProblemDefinition, SolutionProfile, SolverMethod, SolverReport};
use crate::error::{Error, Result};
use crate::ivp::{integrate, IntegratorConfig, IvpState};

/// Which way the bisection bracket shrinks when the terminal value lands
/// above the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `v(b) - beta > 0` replaces the lower endpoint by the midpoint.
    OvershootRaisesLower,
    /// `v(b) - beta > 0` replaces the upper endpoint by the midpoint.
    OvershootRaisesUpper,
}

/// Search interval for the shooting parameter together with its update rule.
#[derive(Debug, Clone, Copy)]
pub struct BracketSpec {
    pub lower: f64,
    pub upper: f64,
    pub orientation: Orientation,
}

impl BracketSpec {
    pub fn new(lower: f64, upper: f64, orientation: Orientation) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "bracket must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self {
            lower,
            upper,
            orientation,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub integrator: IntegratorConfig,
}

impl ShootingConfig {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            max_iterations: 100,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self::new(1e-6)
    }
}

/// A converged (or best-effort) shooting result.
#[derive(Debug, Clone)]
pub struct ShootingSolution {
    pub profile: SolutionProfile,
    /// The shooting parameter of the returned profile.
    pub p_star: f64,
    pub report: SolverReport,
}

/// Integrates one trial: start at `a + singular_offset` with `v = p`,
/// `v' = alpha`, and return the trajectory plus the terminal value `v(b)`.
pub fn shoot_once(
    problem: &ProblemDefinition,
    p: f64,
    config: &ShootingConfig,
) -> Result<(SolutionProfile, f64)> {
    if !p.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "shooting parameter must be finite, got {p}"
        )));
    }
    let system = |r: f64, v: f64, vp: f64| (vp, (problem.rhs)(r, v, vp));
    let start = IvpState::new(
        problem.domain_start + problem.singular_offset,
        p,
        problem.left_neumann,
    );
    let (trajectory, end) = integrate(&system, start, problem.domain_end, &config.integrator)
        .map_err(|e| Error::ShotFailed {
            p,
            source: Box::new(e),
        })?;
    Ok((trajectory, end.value))
}

fn adjusted(terminal: f64, beta: f64, orientation: Orientation) -> f64 {
    match orientation {
        Orientation::OvershootRaisesUpper => terminal - beta,
        Orientation::OvershootRaisesLower => beta - terminal,
    }
}

/// Bisection on the shooting parameter. Each iteration integrates the
/// current bracket midpoint, tests `|v(b) - beta|` against the tolerance and
/// otherwise shrinks the bracket per the orientation. Both bracket faces are
/// validated up front so a misconfigured orientation fails fast instead of
/// sliding to an endpoint.
pub fn solve_shooting(
    problem: &ProblemDefinition,
    bracket: &BracketSpec,
    config: &ShootingConfig,
) -> Result<ShootingSolution> {
    if !(bracket.lower < bracket.upper) {
        return Err(Error::InvalidDomain(format!(
            "bracket must satisfy lower < upper, got [{}, {}]",
            bracket.lower, bracket.upper
        )));
    }
    if !(config.tolerance > 0.0) || config.max_iterations == 0 {
        return Err(Error::InvalidDomain(
            "shooting needs a positive tolerance and at least one iteration".into(),
        ));
    }

    let beta = problem.right_dirichlet;
    let (_, terminal_lower) = shoot_once(problem, bracket.lower, config)?;
    let (_, terminal_upper) = shoot_once(problem, bracket.upper, config)?;
    let adj_lower = adjusted(terminal_lower, beta, bracket.orientation);
    let adj_upper = adjusted(terminal_upper, beta, bracket.orientation);
    if !(adj_lower < 0.0 && adj_upper > 0.0) {
        return Err(Error::InvalidBracket {
            lower: bracket.lower,
            upper: bracket.upper,
            lower_terminal: terminal_lower - beta,
            upper_terminal: terminal_upper - beta,
        });
    }

    let mut lo = bracket.lower;
    let mut hi = bracket.upper;
    let mut history = Vec::new();
    let mut best: Option<(f64, f64, SolutionProfile)> = None;

    for iteration in 1..=config.max_iterations {
        let p = 0.5 * (lo + hi);
        let (profile, terminal) = shoot_once(problem, p, config)?;
        let metric = (terminal - beta).abs();
        history.push(metric);

        if best.as_ref().is_none_or(|(m, _, _)| metric < *m) {
            best = Some((metric, p, profile.clone()));
        }
        if metric < config.tolerance {
            return Ok(ShootingSolution {
                profile,
                p_star: p,
                report: SolverReport {
                    method: SolverMethod::Shooting,
                    iterations: iteration,
                    converged: true,
                    final_metric: metric,
                    tolerance: config.tolerance,
                    history,
                },
            });
        }
        if adjusted(terminal, beta, bracket.orientation) > 0.0 {
            hi = p;
        } else {
            lo = p;
        }
    }

    // Out of iterations: hand back the best trial seen, flagged unconverged.
    let (metric, p_star, profile) = best.expect("max_iterations >= 1");
    Ok(ShootingSolution {
        profile,
        p_star,
        report: SolverReport {
            method: SolverMethod::Shooting,
            iterations: config.max_iterations,
            converged: false,
            final_metric: metric,
            tolerance: config.tolerance,
            history,
        },
    })
}
