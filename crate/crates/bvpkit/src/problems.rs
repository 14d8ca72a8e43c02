//! Concrete problems: the Kerr-medium beam-profile equation with its two
//! initial-guess generators and bisection brackets, plus a manufactured
//! problem with a closed-form solution for discretisation-error studies.

use crate::core::{Mesh, ProblemDefinition};
use crate::fdm::GridFunction;
use crate::shooting::{BracketSpec, Orientation};

/// Offset used when integrating the Kerr problem as an initial value
/// problem, keeping the 1/r coefficient off the axis.
pub const KERR_SINGULAR_OFFSET: f64 = 1e-6;

/// `f(r, v, v') = -(1/r) v' + v - 2 v^3` for the Kerr beam profile.
pub fn kerr_rhs(r: f64, v: f64, vp: f64) -> f64 {
    assert!(r > 0.0, "kerr_rhs needs r > 0, got {r}");
    -(1.0 / r) * vp + v - 2.0 * v * v * v
}

/// `∂f/∂v = 1 - 6 v^2`.
pub fn kerr_dv(v: f64) -> f64 {
    1.0 - 6.0 * v * v
}

/// `∂f/∂v' = -1/r`.
pub fn kerr_dvp(r: f64) -> f64 {
    assert!(r > 0.0, "kerr_dvp needs r > 0, got {r}");
    -1.0 / r
}

/// The Kerr beam-profile problem on `[0, domain_end]` with `v'(0) = 0` and
/// the far-field condition truncated to `v(domain_end) = 0`.
pub fn kerr_problem(domain_end: f64) -> ProblemDefinition {
    ProblemDefinition::new(
        0.0,
        domain_end,
        KERR_SINGULAR_OFFSET,
        Box::new(|r, v, vp| kerr_rhs(r, v, vp)),
        Box::new(|_, v, _| kerr_dv(v)),
        Box::new(|r, _, _| kerr_dvp(r)),
        0.0,
        0.0,
    )
    .expect("kerr problem geometry is valid for positive domain_end")
}

/// Bisection bracket for the monotone decaying solution. Shots below the
/// decaying amplitude settle into the positive potential valley (terminal
/// above target), so an overshoot raises the lower endpoint.
pub fn decaying_bracket() -> BracketSpec {
    BracketSpec::new(1.5, 2.0, Orientation::OvershootRaisesLower)
        .expect("static bracket is valid")
}

/// Bisection bracket for the one-node solution; the update rule is the
/// reverse of the decaying one.
pub fn one_node_bracket() -> BracketSpec {
    BracketSpec::new(2.0, 2.5, Orientation::OvershootRaisesUpper)
        .expect("static bracket is valid")
}

/// Initial guess for the decaying solution: `w_i = 2 exp(-0.1 (i + 1))` as a
/// function of the 1-based node index, independent of the mesh geometry.
pub fn guess_decaying(mesh: &Mesh) -> GridFunction {
    let n = mesh.n_subintervals();
    let interior = (1..=n)
        .map(|i| 2.0 * (-0.1 * (i as f64 + 1.0)).exp())
        .collect();
    GridFunction::new(interior, 0.0)
}

/// Piecewise initial guess for the one-node solution: an exponential shifted
/// below zero while `x_i < 3`, then a logistic tail approaching zero from
/// below. Both branches are functions of the 1-based node index.
pub fn guess_one_node(mesh: &Mesh) -> GridFunction {
    let n = mesh.n_subintervals();
    let a = mesh.nodes()[0];
    let h = mesh.spacing();
    let third_of_n = n as f64 / 3.0;
    let interior = (1..=n)
        .map(|i| {
            if a + (i as f64 - 1.0) * h < 3.0 {
                6.0 * (-0.2 * (i as f64 + 1.0)).exp() - 1.0
            } else {
                (1.0 + (-(i as f64) + third_of_n).exp()).recip() - 1.0
            }
        })
        .collect();
    GridFunction::new(interior, 0.0)
}

/// Exact solution of the manufactured verification problem.
pub fn manufactured_exact(r: f64) -> f64 {
    (-r * r / 4.0).exp()
}

/// Forcing term of the manufactured problem, with the `(1/r) v*'` part
/// cancelled analytically so the closed form is regular on the whole axis:
/// `g(r) = (r^2/4 - 2) e^(-r^2/4) - 2 e^(-3 r^2/4)`.
pub fn manufactured_forcing(r: f64) -> f64 {
    (r * r / 4.0 - 2.0) * (-r * r / 4.0).exp() - 2.0 * (-3.0 * r * r / 4.0).exp()
}

/// Verification problem `v'' = -(1/r) v' + v + 2 v^3 + g(r)` on `[0, 10]`
/// whose exact solution is `v*(r) = e^(-r^2/4)`. The defocusing cubic keeps
/// the linearised rows diagonally dominant, so Newton converges from mildly
/// perturbed starts on every mesh used in the order-of-accuracy studies.
pub fn manufactured_problem() -> ProblemDefinition {
    ProblemDefinition::new(
        0.0,
        10.0,
        0.0,
        Box::new(|r, v, vp| -(1.0 / r) * vp + v + 2.0 * v * v * v + manufactured_forcing(r)),
        Box::new(|_, v, _| 1.0 + 6.0 * v * v),
        Box::new(|r, _, _| -1.0 / r),
        0.0,
        manufactured_exact(10.0),
    )
    .expect("manufactured problem geometry is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{build_mesh, count_sign_changes, SolutionProfile};
    use crate::fdm::{assemble_residual, newton_solve, FdmConfig};
    use proptest::prelude::*;

    #[test]
    fn kerr_rhs_hand_values() {
        assert_eq!(kerr_rhs(1.0, 1.0, 0.0), -1.0);
        assert!((kerr_rhs(2.0, 0.5, -0.1) - 0.3).abs() < 1e-15);
        for r in [0.1, 1.0, 7.3] {
            assert_eq!(kerr_rhs(r, 0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn kerr_partial_hand_values() {
        assert_eq!(kerr_dv(0.0), 1.0);
        assert_eq!(kerr_dv(1.0), -5.0);
        assert_eq!(kerr_dvp(2.0), -0.5);
    }

    #[test]
    #[should_panic(expected = "needs r > 0")]
    fn kerr_rhs_rejects_the_axis() {
        kerr_rhs(0.0, 1.0, 1.0);
    }

    #[test]
    #[should_panic(expected = "needs r > 0")]
    fn kerr_dvp_rejects_negative_radius() {
        kerr_dvp(-1.0);
    }

    #[test]
    fn decaying_guess_values_and_shape() {
        let mesh = build_mesh(0.0, 10.0, 100).unwrap();
        let w = guess_decaying(&mesh);
        assert!((w.interior()[0] - 1.6374615061559636).abs() < 1e-15);
        assert!((w.interior()[98] - 9.079985952496971e-5).abs() < 1e-19);
        assert!(w
            .interior()
            .windows(2)
            .all(|pair| pair[1] < pair[0] && pair[1] > 0.0));
    }

    #[test]
    fn one_node_guess_values_and_shape() {
        let mesh = build_mesh(0.0, 10.0, 100).unwrap();
        let w = guess_one_node(&mesh);
        assert!((w.interior()[0] - 3.0219202762138355).abs() < 1e-15);
        // the logistic tail underflows to zero at the far end
        assert!(w.interior()[99].abs() <= 1e-16);
        let profile = SolutionProfile::new(
            mesh.nodes()[..100].to_vec(),
            w.interior().to_vec(),
        )
        .unwrap();
        assert_eq!(count_sign_changes(&profile, 0.0), 1);
    }

    #[test]
    fn decaying_guess_has_no_sign_change() {
        let mesh = build_mesh(0.0, 10.0, 100).unwrap();
        let w = guess_decaying(&mesh);
        let profile = SolutionProfile::new(
            mesh.nodes()[..100].to_vec(),
            w.interior().to_vec(),
        )
        .unwrap();
        assert_eq!(count_sign_changes(&profile, 0.0), 0);
    }

    #[test]
    fn manufactured_forcing_is_regular_on_the_axis() {
        assert_eq!(manufactured_forcing(0.0), -4.0);
        assert!(manufactured_forcing(10.0).is_finite());
    }

    #[test]
    fn manufactured_exact_has_small_residual() {
        let problem = manufactured_problem();
        for n in [400usize, 800] {
            let mesh = build_mesh(0.0, 10.0, n).unwrap();
            let h = mesh.spacing();
            let exact = GridFunction::new(
                mesh.nodes()[..n].iter().map(|&r| manufactured_exact(r)).collect(),
                problem.right_dirichlet,
            );
            let residual = assemble_residual(&problem, &mesh, &exact);
            let max = residual.iter().fold(0.0f64, |m, f| m.max(f.abs()));
            assert!(max < h * h, "residual {max:e} should sit below h^2 = {:e}", h * h);
        }
    }

    #[test]
    fn newton_recovers_the_manufactured_solution() {
        let problem = manufactured_problem();
        let mesh = build_mesh(0.0, 10.0, 100).unwrap();
        let w0 = GridFunction::new(
            mesh.nodes()[..100]
                .iter()
                .map(|&r| 0.9 * manufactured_exact(r))
                .collect(),
            problem.right_dirichlet,
        );
        let sol = newton_solve(&problem, &mesh, w0, &FdmConfig::new(1e-10)).unwrap();
        assert!(sol.report.converged);
        assert!(sol.report.iterations <= 10);
        let err = sol
            .profile
            .abscissae()
            .iter()
            .zip(sol.profile.values())
            .map(|(&r, &v)| (v - manufactured_exact(r)).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-3, "max error {err:e} too large for N = 100");
    }

    proptest! {
        #[test]
        fn kerr_rhs_is_odd_in_the_state(
            r in 0.01f64..100.0,
            v in -3.0f64..3.0,
            vp in -3.0f64..3.0,
        ) {
            prop_assert_eq!(kerr_rhs(r, -v, -vp), -kerr_rhs(r, v, vp));
        }

        #[test]
        fn kerr_dv_matches_central_differences(
            r in 0.1f64..50.0,
            v in -2.0f64..2.0,
            vp in -2.0f64..2.0,
        ) {
            let step = 1e-6 * v.abs().max(1.0);
            let numerical =
                (kerr_rhs(r, v + step, vp) - kerr_rhs(r, v - step, vp)) / (2.0 * step);
            let analytic = kerr_dv(v);
            prop_assert!((numerical - analytic).abs() <= 1e-8 * analytic.abs().max(1.0));
        }
    }
}
