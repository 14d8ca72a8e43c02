//! Adaptive Dormand–Prince 5(4) integration for the first-order systems
//! `(v, v')' = (v', f(r, v, v'))` that the shooting engine solves.

use crate::core::SolutionProfile;
use crate::error::{Error, Result};

/// State of the reduced first-order system at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpState {
    pub position: f64,
    pub value: f64,
    pub derivative: f64,
}

impl IvpState {
    pub fn new(position: f64, value: f64, derivative: f64) -> Self {
        Self {
            position,
            value,
            derivative,
        }
    }

    fn is_finite(&self) -> bool {
        self.position.is_finite() && self.value.is_finite() && self.derivative.is_finite()
    }
}

/// Step-size control parameters for the embedded pair.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tolerance: f64,
    pub abs_tolerance: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-8,
            abs_tolerance: 1e-10,
            initial_step: 1e-3,
            min_step: 1e-13,
            max_step: 0.5,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.rel_tolerance > 0.0
            && self.abs_tolerance > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!(
                "integrator config must satisfy 0 < min_step <= initial_step <= max_step \
                 and positive tolerances, got {self:?}"
            )))
        }
    }
}

// Dormand-Prince 5(4) tableau. Stage 7 is evaluated at the 5th-order result
// (first-same-as-last); E holds the 5th-minus-4th order weight differences.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One trial step of length `h` from `state`.
///
/// Returns the fifth-order candidate and the scaled error estimate
/// `max_i |high_i - low_i| / (abs_tol + rel_tol * |high_i|)`; estimates above 1
/// mean the step should be rejected. Non-finite stage evaluations surface as
/// an infinite estimate so the caller shrinks the step.
pub fn rk_attempt_step<F>(
    system: &F,
    state: &IvpState,
    h: f64,
    config: &IntegratorConfig,
) -> (IvpState, f64)
where
    F: Fn(f64, f64, f64) -> (f64, f64),
{
    debug_assert!(h > 0.0);
    let r = state.position;
    let y = [state.value, state.derivative];

    let eval = |t: f64, y: [f64; 2]| -> [f64; 2] {
        let (dv, dvp) = system(t, y[0], y[1]);
        [dv, dvp]
    };
    let stage_y = |y: [f64; 2], coeffs: &[f64], k: &[[f64; 2]]| -> [f64; 2] {
        let mut out = y;
        for (c, ki) in coeffs.iter().zip(k) {
            out[0] += h * c * ki[0];
            out[1] += h * c * ki[1];
        }
        out
    };

    let mut k = [[0.0f64; 2]; 7];
    k[0] = eval(r, y);
    k[1] = eval(r + C[1] * h, stage_y(y, &A2, &k[..1]));
    k[2] = eval(r + C[2] * h, stage_y(y, &A3, &k[..2]));
    k[3] = eval(r + C[3] * h, stage_y(y, &A4, &k[..3]));
    k[4] = eval(r + C[4] * h, stage_y(y, &A5, &k[..4]));
    k[5] = eval(r + C[5] * h, stage_y(y, &A6, &k[..5]));
    // B doubles as the stage-7 row of A.
    let high = stage_y(y, &B[..6], &k[..6]);
    k[6] = eval(r + C[6] * h, high);

    let mut estimate = 0.0f64;
    for i in 0..2 {
        let mut err = 0.0;
        for (e, ki) in E.iter().zip(&k) {
            err += e * ki[i];
        }
        err *= h;
        let scale = config.abs_tolerance + config.rel_tolerance * high[i].abs();
        estimate = estimate.max((err / scale).abs());
    }
    let candidate = IvpState::new(r + h, high[0], high[1]);
    if !candidate.is_finite() || !estimate.is_finite() {
        estimate = f64::INFINITY;
    }
    (candidate, estimate)
}

fn step_factor(estimate: f64) -> f64 {
    // 0.9 * est^(-1/5), clamped to [0.2, 5]; a zero estimate maxes out growth.
    if estimate == 0.0 {
        5.0
    } else {
        (0.9 * estimate.powf(-0.2)).clamp(0.2, 5.0)
    }
}

/// Integrates from `start` to `r_end` with the standard accept/reject loop,
/// recording every accepted state. The final step is truncated so the
/// returned state sits at `r_end` exactly.
pub fn integrate<F>(
    system: &F,
    start: IvpState,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<(SolutionProfile, IvpState)>
where
    F: Fn(f64, f64, f64) -> (f64, f64),
{
    config.validate()?;
    if !start.is_finite() || !r_end.is_finite() || !(start.position < r_end) {
        return Err(Error::InvalidDomain(format!(
            "integration range [{}, {r_end}] is empty or non-finite",
            start.position
        )));
    }

    let mut state = start;
    let mut abscissae = vec![state.position];
    let mut values = vec![state.value];
    let mut h = config.initial_step;
    let mut steps = 0usize;

    while state.position < r_end {
        steps += 1;
        if steps > config.max_steps {
            return Err(Error::StepBudgetExhausted {
                position: state.position,
            });
        }
        let remaining = r_end - state.position;
        let truncated = h >= remaining;
        let h_try = if truncated { remaining } else { h };

        let (mut candidate, estimate) = rk_attempt_step(system, &state, h_try, config);
        if estimate <= 1.0 {
            if truncated {
                candidate.position = r_end;
            }
            state = candidate;
            abscissae.push(state.position);
            values.push(state.value);
            h = (h_try * step_factor(estimate)).clamp(config.min_step, config.max_step);
        } else {
            if h_try <= config.min_step {
                return Err(Error::StepUnderflow {
                    position: state.position,
                });
            }
            h = (h_try * step_factor(estimate)).clamp(config.min_step, config.max_step);
        }
    }

    let trajectory = SolutionProfile::new(abscissae, values)?;
    Ok((trajectory, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_fall(_r: f64, _v: f64, vp: f64) -> (f64, f64) {
        (vp, 0.0)
    }

    fn cosine(_r: f64, v: f64, vp: f64) -> (f64, f64) {
        (vp, -v)
    }

    fn exponential(_r: f64, v: f64, vp: f64) -> (f64, f64) {
        (vp, v)
    }

    fn fixed_step(h: f64) -> IntegratorConfig {
        // Loose tolerances so every step is accepted at exactly h.
        IntegratorConfig {
            rel_tolerance: 1e-2,
            abs_tolerance: 1e-2,
            initial_step: h,
            min_step: h,
            max_step: h,
            max_steps: 1_000_000,
        }
    }

    fn cosine_error_at_pi(h: f64) -> f64 {
        let (_, end) = integrate(
            &cosine,
            IvpState::new(0.0, 1.0, 0.0),
            std::f64::consts::PI,
            &fixed_step(h),
        )
        .unwrap();
        (end.value + 1.0).abs().max(end.derivative.abs())
    }

    #[test]
    fn constant_solution_is_exact() {
        let cfg = IntegratorConfig::default();
        for h in [0.1, 0.37, 1.0] {
            let (cand, est) = rk_attempt_step(&free_fall, &IvpState::new(0.0, 1.0, 0.0), h, &cfg);
            assert_eq!(cand.value, 1.0);
            assert_eq!(cand.derivative, 0.0);
            assert_eq!(cand.position, h);
            assert_eq!(est, 0.0);
        }
    }

    #[test]
    fn linear_solution_is_exact() {
        let cfg = IntegratorConfig::default();
        let (cand, _) = rk_attempt_step(&free_fall, &IvpState::new(0.0, 0.0, 1.0), 0.5, &cfg);
        assert_eq!(cand.value, 0.5);
        assert_eq!(cand.derivative, 1.0);
    }

    #[test]
    fn single_step_matches_cosine() {
        let cfg = IntegratorConfig::default();
        let (cand, _) = rk_attempt_step(&cosine, &IvpState::new(0.0, 1.0, 0.0), 0.1, &cfg);
        assert!((cand.value - 0.1f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn exponential_to_1e7_at_rel_1e8() {
        let cfg = IntegratorConfig {
            rel_tolerance: 1e-8,
            ..Default::default()
        };
        let (_, end) = integrate(&exponential, IvpState::new(0.0, 1.0, 1.0), 1.0, &cfg).unwrap();
        assert!((end.value - std::f64::consts::E).abs() < 1e-7);
    }

    #[test]
    fn free_fall_constant_over_long_range() {
        let cfg = IntegratorConfig::default();
        let (traj, end) = integrate(&free_fall, IvpState::new(0.0, 3.0, 0.0), 10.0, &cfg).unwrap();
        assert_eq!(end.position, 10.0);
        assert_eq!(end.value, 3.0);
        assert_eq!(end.derivative, 0.0);
        assert!(traj.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn trajectory_is_increasing_and_bounded() {
        let cfg = IntegratorConfig::default();
        let (traj, _) = integrate(&cosine, IvpState::new(0.0, 1.0, 0.0), 7.0, &cfg).unwrap();
        assert!(traj.abscissae().windows(2).all(|w| w[0] < w[1]));
        assert!(traj.abscissae().iter().all(|&r| r <= 7.0));
        assert_eq!(*traj.abscissae().last().unwrap(), 7.0);
    }

    #[test]
    fn fixed_step_error_scales_at_fourth_order_within_factor_two() {
        let errs: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|n| cosine_error_at_pi(std::f64::consts::PI / n))
            .collect();
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (8.0..=32.0).contains(&ratio),
                "halving h changed the error by {ratio}, outside [8, 32]"
            );
        }
    }

    #[test]
    fn tightening_tolerance_never_hurts_cosine_accuracy() {
        let mut previous = f64::INFINITY;
        for k in 0..5 {
            let rel = 10f64.powi(-2 - 2 * k);
            let cfg = IntegratorConfig {
                rel_tolerance: rel,
                abs_tolerance: rel * 1e-2,
                ..Default::default()
            };
            let (_, end) =
                integrate(&cosine, IvpState::new(0.0, 1.0, 0.0), std::f64::consts::PI, &cfg)
                    .unwrap();
            let err = (end.value + 1.0).abs();
            assert!(
                err <= previous,
                "rel {rel:e} raised the error to {err:e} from {previous:e}"
            );
            previous = err;
        }
    }

    #[test]
    fn step_budget_error_carries_position() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..Default::default()
        };
        match integrate(&cosine, IvpState::new(0.0, 1.0, 0.0), 10.0, &cfg) {
            Err(Error::StepBudgetExhausted { position }) => {
                assert!((0.0..10.0).contains(&position))
            }
            other => panic!("expected step budget error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_rhs_underflows_the_step() {
        let blows_up = |r: f64, _v: f64, _vp: f64| -> (f64, f64) {
            if r > 0.5 {
                (f64::NAN, f64::NAN)
            } else {
                (0.0, 0.0)
            }
        };
        match integrate(&blows_up, IvpState::new(0.0, 1.0, 0.0), 2.0, &IntegratorConfig::default())
        {
            Err(Error::StepUnderflow { position }) => assert!(position <= 0.5 + 1e-6),
            other => panic!("expected step underflow, got {other:?}"),
        }
    }
}
