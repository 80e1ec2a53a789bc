//! Adaptive Dormand-Prince 5(4) integration with dense output.
//!
//! Explicit embedded Runge-Kutta pair with first-same-as-last stage reuse,
//! PI (Lund-stabilized) step control, and a fifth-order interpolant built on
//! every accepted step so trajectories can be sampled on arbitrary grids
//! without constraining step selection. The driver is generic over the state
//! dimension and knows nothing about the model; event logic such as
//! divergence guards and steady-state windows lives in the caller's step
//! callback, which sees every accepted step together with the fresh
//! right-hand-side evaluation at its endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

/// Tolerances and guards for adaptive integration. The last three fields are
/// event thresholds consumed by the protocol drivers in [`crate::dynamics`],
/// kept here so one knob struct travels through configs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOpts {
    pub rtol: f64,
    pub atol: f64,
    /// Cap on the step size.
    pub h_max: f64,
    /// Floor under the step size; needing less reports integrator failure.
    pub h_min: f64,
    /// Fixed initial step; picked automatically when None.
    pub h_init: Option<f64>,
    /// Hard cap on attempted steps per call.
    pub max_steps: usize,
    /// Photon amplitude beyond which protocol drivers declare divergence.
    pub gamma_max: f64,
    /// Right-hand-side norm below which a state counts as quiet.
    pub steady_tol: f64,
    /// Time the norm must stay quiet before a steady state is declared.
    pub steady_window: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-14,
            h_max: 10.0,
            h_min: 1e-8,
            h_init: None,
            max_steps: 100_000_000,
            gamma_max: 1e3,
            steady_tol: 1e-8,
            steady_window: 50.0,
        }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    /// Reached the end of the requested time span.
    Completed,
    /// A quiet right-hand side persisted over the detection window.
    SteadyReached { t: f64 },
    /// A photon amplitude crossed the divergence guard.
    Diverged { t: f64, amplitude: f64 },
}

/// Final state and bookkeeping of one driver call.
#[derive(Debug, Clone)]
pub struct DriveOutcome<const N: usize> {
    pub reason: StopReason,
    pub t: f64,
    pub y: [f64; N],
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

/// Interpolant over one accepted step, exact at both endpoints and fifth
/// order accurate inside.
#[derive(Debug, Clone)]
pub struct DenseSegment<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    /// Evaluates the interpolant; `t` should lie inside the segment.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            out[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }
}

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_SHRINK_MAX: f64 = 5.0;
const FAC_GROW_MAX: f64 = 0.1;

fn rms_scaled<const N: usize>(v: &[f64; N], y: &[f64; N], atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y[i].abs();
        let q = v[i] / sc;
        acc += q * q;
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    opts: &SolverOpts,
) -> (f64, usize)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let (atol, rtol) = (opts.atol, opts.rtol);
    let d0 = rms_scaled(y0, y0, atol, rtol);
    let d1 = rms_scaled(f0, y0, atol, rtol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * (d0 / d1)
    }
    .min(opts.h_max);
    let mut y1 = [0.0; N];
    for i in 0..N {
        y1[i] = y0[i] + h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms_scaled(&diff, y0, atol, rtol) / h0;
    let der12 = d1.max(d2);
    let h1 = if der12 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    ((100.0 * h0).min(h1).min(opts.h_max), 1)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, invoking `callback` after
/// every accepted step with the dense segment, the new state, and the fresh
/// right-hand side at the segment end. The callback may end the run early by
/// returning a stop reason.
pub fn drive<const N: usize, F, CB>(
    f: F,
    y0: [f64; N],
    t0: f64,
    t_end: f64,
    opts: &SolverOpts,
    mut callback: CB,
) -> Result<DriveOutcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    CB: FnMut(&DenseSegment<N>, &[f64; N], &[f64; N]) -> Option<StopReason>,
{
    if !(t_end >= t0) {
        return Err(DickeError::InvalidParams(format!(
            "integration span must run forward: t0 = {t0}, t_end = {t_end}"
        )));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut n_rhs = 1;
    let (mut n_accepted, mut n_rejected) = (0, 0);
    if t_end == t0 {
        return Ok(DriveOutcome {
            reason: StopReason::Completed,
            t,
            y,
            n_accepted,
            n_rejected,
            n_rhs,
        });
    }

    let mut h = match opts.h_init {
        Some(h) => h.min(opts.h_max),
        None => {
            let (h, extra) = initial_step(&f, t0, &y, &k1, opts);
            n_rhs += extra;
            h
        }
    }
    .min(t_end - t0);
    let mut facold: f64 = 1e-4;

    for _ in 0..opts.max_steps {
        if h < opts.h_min {
            return Err(DickeError::IntegratorFailure {
                t,
                reason: format!("step size {h:.3e} fell under the floor {:.3e}", opts.h_min),
            });
        }
        let mut last = false;
        if t + 1.0001 * h >= t_end {
            h = t_end - t;
            last = true;
        }

        let stage = |coeffs: &[(f64, &[f64; N])], c: f64| {
            let mut ys = y;
            for &(a, k) in coeffs {
                for i in 0..N {
                    ys[i] += h * a * k[i];
                }
            }
            f(t + c * h, &ys)
        };
        let k2 = stage(&[(A21, &k1)], C2);
        let k3 = stage(&[(A31, &k1), (A32, &k2)], C3);
        let k4 = stage(&[(A41, &k1), (A42, &k2), (A43, &k3)], C4);
        let k5 = stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], C5);
        let k6 = stage(
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            1.0,
        );
        let mut y_new = [0.0; N];
        for i in 0..N {
            y_new[i] =
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let k7 = f(t + h, &y_new);
        n_rhs += 6;

        let mut err_vec = [0.0; N];
        for i in 0..N {
            err_vec[i] = h
                * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
        }
        let mut err = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let q = err_vec[i] / sc;
            err += q * q;
        }
        err = (err / N as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            let mut rcont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h
                    * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let segment = DenseSegment { t0: t, h, rcont };
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            n_accepted += 1;

            if let Some(reason) = callback(&segment, &y, &k1) {
                return Ok(DriveOutcome {
                    reason,
                    t,
                    y,
                    n_accepted,
                    n_rejected,
                    n_rhs,
                });
            }
            if last {
                return Ok(DriveOutcome {
                    reason: StopReason::Completed,
                    t,
                    y,
                    n_accepted,
                    n_rejected,
                    n_rhs,
                });
            }
            let fac11 = err.powf(EXPO1);
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FAC_GROW_MAX, FAC_SHRINK_MAX);
            h = (h / fac).min(opts.h_max);
            facold = err.max(1e-4);
        } else {
            n_rejected += 1;
            if err.is_finite() {
                let fac11 = err.powf(EXPO1);
                h /= (fac11 / SAFE).min(FAC_SHRINK_MAX);
            } else {
                h *= 0.1;
            }
        }
    }
    Err(DickeError::IntegratorFailure {
        t,
        reason: format!("step budget of {} exhausted", opts.max_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_opts() -> SolverOpts {
        SolverOpts::default()
    }

    #[test]
    fn harmonic_oscillator_long_run_accuracy() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let out = drive(f, [1.0, 0.0], 0.0, 100.0, &quiet_opts(), |_, _, _| None).unwrap();
        assert_eq!(out.reason, StopReason::Completed);
        assert_eq!(out.t, 100.0);
        assert!((out.y[0] - 100.0f64.cos()).abs() < 1e-6);
        assert!((out.y[1] + 100.0f64.sin()).abs() < 1e-6);
        assert!(out.n_accepted > 100);
    }

    #[test]
    fn dense_output_is_fifth_order_accurate() {
        // Loose tolerance forces large steps, so a wrong interpolant
        // coefficient would show up orders of magnitude above this bound.
        let mut opts = quiet_opts();
        opts.rtol = 1e-6;
        opts.atol = 1e-9;
        let f = |t: f64, _y: &[f64; 1]| [t.cos()];
        let mut worst = 0.0f64;
        let out = drive(f, [0.0], 0.0, 30.0, &opts, |seg, _, _| {
            for frac in [0.137, 0.5, 0.833] {
                let t = seg.t_start() + frac * (seg.t_end() - seg.t_start());
                let v = seg.eval(t)[0];
                worst = worst.max((v - t.sin()).abs());
            }
            None
        })
        .unwrap();
        assert_eq!(out.reason, StopReason::Completed);
        assert!(out.n_accepted < 200, "steps should be large at loose tol");
        assert!(worst < 1e-5, "dense-output error {worst}");
    }

    #[test]
    fn dense_output_matches_step_endpoints() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -1.3 * y[0]];
        let mut prev_end: Option<(f64, [f64; 2])> = None;
        drive(f, [0.3, -0.2], 0.0, 10.0, &quiet_opts(), |seg, y_new, _| {
            if let Some((t_prev, y_prev)) = prev_end {
                assert_eq!(seg.t_start(), t_prev);
                let at_start = seg.eval(seg.t_start());
                for i in 0..2 {
                    assert_eq!(at_start[i], y_prev[i]);
                }
            }
            let at_end = seg.eval(seg.t_end());
            for i in 0..2 {
                assert!((at_end[i] - y_new[i]).abs() < 1e-14);
            }
            prev_end = Some((seg.t_end(), *y_new));
            None
        })
        .unwrap();
    }

    #[test]
    fn tighter_tolerance_takes_more_steps_and_is_closer() {
        let f = |t: f64, y: &[f64; 1]| [y[0] * t.sin()];
        // Solution exp(1 - cos t).
        let run = |rtol: f64| {
            let mut opts = quiet_opts();
            opts.rtol = rtol;
            opts.atol = rtol * 1e-3;
            drive(f, [1.0], 0.0, 20.0, &opts, |_, _, _| None).unwrap()
        };
        let loose = run(1e-5);
        let tight = run(1e-10);
        let exact = (1.0 - 20.0f64.cos()).exp();
        assert!(tight.n_accepted > loose.n_accepted);
        assert!((tight.y[0] - exact).abs() < (loose.y[0] - exact).abs());
    }

    #[test]
    fn callback_can_stop_early() {
        let f = |_t: f64, y: &[f64; 1]| [y[0] * y[0]];
        let out = drive(f, [1.0], 0.0, 2.0, &quiet_opts(), |_, y, _| {
            (y[0].abs() > 1e3).then_some(StopReason::Diverged {
                t: 0.0,
                amplitude: y[0].abs(),
            })
        })
        .unwrap();
        match out.reason {
            StopReason::Diverged { amplitude, .. } => assert!(amplitude > 1e3),
            other => panic!("expected divergence stop, got {other:?}"),
        }
        // Blow-up of y' = y^2 from 1 sits at t = 1.
        assert!(out.t < 1.0);
        assert!(out.t > 0.9);
    }

    #[test]
    fn finite_time_blowup_reports_integrator_failure() {
        let f = |_t: f64, y: &[f64; 1]| [y[0] * y[0]];
        match drive(f, [1.0], 0.0, 2.0, &quiet_opts(), |_, _, _| None) {
            Err(DickeError::IntegratorFailure { t, .. }) => {
                assert!((t - 1.0).abs() < 1e-2, "failure time {t}");
            }
            other => panic!("expected integrator failure, got {other:?}"),
        }
    }

    #[test]
    fn zero_span_returns_initial_state() {
        let f = |_t: f64, y: &[f64; 3]| [y[1], y[2], -y[0]];
        let y0 = [0.1, 0.2, 0.3];
        let out = drive(f, y0, 5.0, 5.0, &quiet_opts(), |_, _, _| None).unwrap();
        assert_eq!(out.reason, StopReason::Completed);
        assert_eq!(out.y, y0);
        assert_eq!(out.n_accepted, 0);
    }

    #[test]
    fn backward_span_is_rejected() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        assert!(matches!(
            drive(f, [1.0], 1.0, 0.0, &quiet_opts(), |_, _, _| None),
            Err(DickeError::InvalidParams(_))
        ));
    }

    #[test]
    fn fixed_initial_step_is_honored_then_adapted() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut opts = quiet_opts();
        opts.h_init = Some(1e-3);
        let mut first_h = None;
        drive(f, [1.0, 0.0], 0.0, 1.0, &opts, |seg, _, _| {
            first_h.get_or_insert(seg.t_end() - seg.t_start());
            None
        })
        .unwrap();
        assert!((first_h.unwrap() - 1e-3).abs() < 1e-12);
    }
}
