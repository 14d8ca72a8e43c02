//! Nonlinear finite differences: the boundary value problem becomes a system
//! of N nonlinear equations in the nodal values, solved by Newton iteration
//! with an analytic banded Jacobian and a direct banded solve.
//!
//! Unknowns live at nodes `x_1 .. x_N`; the right boundary node is pinned to
//! the Dirichlet value and never enters the Newton system. Row one is the
//! one-sided three-point approximation of the Neumann condition; the rows
//! below it are the centred second-order stencil with `f` evaluated at the
//! row's centre node, so a right-hand side singular at `x_1 = a` is never
//! touched.

use crate::core::{Mesh, ProblemDefinition, SolutionProfile, SolverMethod, SolverReport};
use crate::error::{Error, Result};

/// Nodal approximation: interior unknowns plus the pinned boundary value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    interior: Vec<f64>,
    boundary_value: f64,
}

impl GridFunction {
    pub fn new(interior: Vec<f64>, boundary_value: f64) -> Self {
        Self {
            interior,
            boundary_value,
        }
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn boundary_value(&self) -> f64 {
        self.boundary_value
    }

    /// Value at 0-based node `i`, the pinned boundary included.
    fn node(&self, i: usize) -> f64 {
        if i < self.interior.len() {
            self.interior[i]
        } else {
            self.boundary_value
        }
    }

    fn is_finite(&self) -> bool {
        self.interior.iter().all(|v| v.is_finite())
    }
}

/// Newton matrix with lower bandwidth 1 and upper bandwidth 2: row `i` may
/// hold columns `i-1 ..= i+2`. Only row 0 uses its third superdiagonal slot
/// structurally; the extra width absorbs pivoting fill during elimination.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    dimension: usize,
    rows: Vec<[f64; BAND_WIDTH]>,
}

const LOWER_BANDWIDTH: usize = 1;
const UPPER_BANDWIDTH: usize = 2;
const BAND_WIDTH: usize = LOWER_BANDWIDTH + UPPER_BANDWIDTH + 1;

impl BandedSystem {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "banded system needs a positive dimension");
        Self {
            dimension,
            rows: vec![[0.0; BAND_WIDTH]; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower_bandwidth(&self) -> usize {
        LOWER_BANDWIDTH
    }

    pub fn upper_bandwidth(&self) -> usize {
        UPPER_BANDWIDTH
    }

    fn slot(&self, row: usize, col: usize) -> Option<usize> {
        if row >= self.dimension || col >= self.dimension {
            return None;
        }
        let offset = col as isize - row as isize + LOWER_BANDWIDTH as isize;
        if (0..BAND_WIDTH as isize).contains(&offset) {
            Some(offset as usize)
        } else {
            None
        }
    }

    /// Entry `(row, col)`; zero outside the band by construction.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(
            row < self.dimension && col < self.dimension,
            "index ({row}, {col}) outside a {n}x{n} system",
            n = self.dimension
        );
        match self.slot(row, col) {
            Some(s) => self.rows[row][s],
            None => 0.0,
        }
    }

    /// Writes an in-band entry; writing outside the band is a bug.
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let slot = self.slot(row, col).unwrap_or_else(|| {
            panic!(
                "entry ({row}, {col}) outside the (1, 2) band of a {n}x{n} system",
                n = self.dimension
            )
        });
        self.rows[row][slot] = value;
    }

    /// Dense matrix-vector product restricted to the band.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dimension);
        let mut out = vec![0.0; self.dimension];
        for row in 0..self.dimension {
            let lo = row.saturating_sub(LOWER_BANDWIDTH);
            let hi = (row + UPPER_BANDWIDTH).min(self.dimension - 1);
            let mut sum = 0.0;
            for col in lo..=hi {
                sum += self.get(row, col) * x[col];
            }
            out[row] = sum;
        }
        out
    }
}

/// Newton stopping parameters: threshold on the Euclidean norm of the update
/// vector, and the iteration cap.
#[derive(Debug, Clone, Copy)]
pub struct FdmConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl FdmConfig {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            max_iterations: 100,
        }
    }
}

impl Default for FdmConfig {
    fn default() -> Self {
        Self::new(1e-6)
    }
}

/// Finite-difference result.
#[derive(Debug, Clone)]
pub struct FdmSolution {
    pub profile: SolutionProfile,
    pub report: SolverReport,
}

/// Residual of the N nonlinear equations at `w`.
///
/// Row 0 is `(1/h)(-3/2 w_1 + 2 w_2 - 1/2 w_3) - alpha`; row `i` for
/// `i = 1..N-1` is the centred stencil
/// `-w_i + 2 w_{i+1} - w_{i+2} + h^2 f(x_{i+1}, w_{i+1}, (w_{i+2} - w_i)/(2h))`
/// in 1-based node labels, with `w_{N+1}` the pinned boundary value.
pub fn assemble_residual(problem: &ProblemDefinition, mesh: &Mesh, w: &GridFunction) -> Vec<f64> {
    let n = mesh.n_subintervals();
    assert!(n >= 3, "finite differences need at least 3 subintervals");
    assert_eq!(w.interior().len(), n, "grid function does not match mesh");

    let h = mesh.spacing();
    let x = mesh.nodes();
    let mut residual = vec![0.0; n];
    residual[0] =
        (1.0 / h) * (-1.5 * w.node(0) + 2.0 * w.node(1) - 0.5 * w.node(2)) - problem.left_neumann;
    for i in 1..n {
        let slope = (w.node(i + 1) - w.node(i - 1)) / (2.0 * h);
        residual[i] = -w.node(i - 1) + 2.0 * w.node(i) - w.node(i + 1)
            + h * h * (problem.rhs)(x[i], w.node(i), slope);
    }
    residual
}

/// Analytic Jacobian of [`assemble_residual`], with every partial evaluated
/// at the row's centre node and the discrete slope there.
pub fn assemble_jacobian(
    problem: &ProblemDefinition,
    mesh: &Mesh,
    w: &GridFunction,
) -> BandedSystem {
    let n = mesh.n_subintervals();
    assert!(n >= 3, "finite differences need at least 3 subintervals");
    assert_eq!(w.interior().len(), n, "grid function does not match mesh");

    let h = mesh.spacing();
    let x = mesh.nodes();
    let mut jac = BandedSystem::new(n);
    jac.set(0, 0, -1.5 / h);
    jac.set(0, 1, 2.0 / h);
    jac.set(0, 2, -0.5 / h);
    for i in 1..n {
        let centre = w.node(i);
        let slope = (w.node(i + 1) - w.node(i - 1)) / (2.0 * h);
        let df_dv = (problem.rhs_dv)(x[i], centre, slope);
        let df_dvp = (problem.rhs_dvp)(x[i], centre, slope);
        jac.set(i, i - 1, -1.0 - 0.5 * h * df_dvp);
        jac.set(i, i, 2.0 + h * h * df_dv);
        if i + 1 < n {
            jac.set(i, i + 1, -1.0 + 0.5 * h * df_dvp);
        }
    }
    jac
}

/// Direct banded LU solve with partial pivoting. Pivoting fill stays within
/// upper bandwidth `lower + upper = 3`, which the working storage absorbs.
pub fn solve_banded(system: &BandedSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = system.dimension();
    assert_eq!(rhs.len(), n, "right-hand side does not match the system");

    // Working rows left-justified on each row's leading structural entry:
    // after factorisation row k holds U[k][k..k+3].
    let mut work = system.rows.clone();
    work[0].rotate_left(LOWER_BANDWIDTH);
    for slot in work[0].iter_mut().skip(BAND_WIDTH - LOWER_BANDWIDTH) {
        *slot = 0.0;
    }
    let mut multipliers = vec![0.0; n];
    let mut pivots = vec![0usize; n];

    for k in 0..n {
        let last = (k + LOWER_BANDWIDTH).min(n - 1);
        let mut pivot_row = k;
        for r in k + 1..=last {
            if work[r][0].abs() > work[pivot_row][0].abs() {
                pivot_row = r;
            }
        }
        pivots[k] = pivot_row;
        if pivot_row != k {
            work.swap(k, pivot_row);
        }
        if work[k][0] == 0.0 {
            return Err(Error::SingularMatrix { pivot_index: k });
        }
        for r in k + 1..=last {
            let mult = work[r][0] / work[k][0];
            multipliers[k] = mult;
            for j in 1..BAND_WIDTH {
                work[r][j - 1] = work[r][j] - mult * work[k][j];
            }
            work[r][BAND_WIDTH - 1] = 0.0;
        }
    }

    let mut x = rhs.to_vec();
    for k in 0..n {
        if pivots[k] != k {
            x.swap(k, pivots[k]);
        }
        let last = (k + LOWER_BANDWIDTH).min(n - 1);
        for r in k + 1..=last {
            x[r] -= multipliers[k] * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut sum = x[i];
        for j in 1..BAND_WIDTH.min(n - i) {
            sum -= work[i][j] * x[i + j];
        }
        x[i] = sum / work[i][0];
    }

    let residual_finite = system
        .matvec(&x)
        .iter()
        .zip(rhs)
        .all(|(ax, b)| (ax - b).is_finite());
    if !residual_finite {
        return Err(Error::NonFinite {
            context: "banded solve",
        });
    }
    Ok(x)
}

/// Newton iteration `J delta = -F`, stopping when the update norm drops
/// below the tolerance. The stopping check runs before the update is
/// applied, so the reported grid function is the one the final update was
/// computed at; `iterations` counts Jacobian solves.
pub fn newton_solve(
    problem: &ProblemDefinition,
    mesh: &Mesh,
    w0: GridFunction,
    config: &FdmConfig,
) -> Result<FdmSolution> {
    let n = mesh.n_subintervals();
    if w0.interior().len() != n {
        return Err(Error::InvalidDomain(format!(
            "initial guess has {} interior values but the mesh has {n} subintervals",
            w0.interior().len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidDomain(format!(
            "finite differences need at least 3 subintervals, got {n}"
        )));
    }
    if !(config.tolerance > 0.0) || config.max_iterations == 0 {
        return Err(Error::InvalidDomain(
            "newton needs a positive tolerance and at least one iteration".into(),
        ));
    }

    let mut w = w0;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for iteration in 1..=config.max_iterations {
        let residual = assemble_residual(problem, mesh, &w);
        if residual.iter().any(|f| !f.is_finite()) {
            return Err(Error::Diverged { iteration });
        }
        let jacobian = assemble_jacobian(problem, mesh, &w);
        let negated: Vec<f64> = residual.iter().map(|f| -f).collect();
        let delta = solve_banded(&jacobian, &negated)?;
        let norm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        history.push(norm);
        iterations = iteration;
        if norm < config.tolerance {
            converged = true;
            break;
        }
        for (wi, di) in w.interior.iter_mut().zip(&delta) {
            *wi += di;
        }
        if !w.is_finite() {
            return Err(Error::Diverged { iteration });
        }
    }

    let final_metric = *history.last().expect("at least one iteration");
    let mut values = w.interior.clone();
    values.push(w.boundary_value);
    let profile = SolutionProfile::new(mesh.nodes().to_vec(), values)?;
    Ok(FdmSolution {
        profile,
        report: SolverReport {
            method: SolverMethod::FiniteDifference,
            iterations,
            converged,
            final_metric,
            tolerance: config.tolerance,
            history,
        },
    })
}
