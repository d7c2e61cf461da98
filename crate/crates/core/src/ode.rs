//! Dormand–Prince 5(4) for scalar ODEs, with step control and the
//! fourth-order continuous extension.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A2: [f64; 1] = [0.2];
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
// fifth-order weights; also the last stage row (FSAL)
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
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
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Step-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

/// An accepted step with its dense-output coefficients.
#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep {
    pub t0: f64,
    pub t1: f64,
    pub y0: f64,
    pub y1: f64,
    /// `f(t0, y0)`.
    pub f0: f64,
    /// `f(t1, y1)`.
    pub f1: f64,
    cont: [f64; 5],
}

impl AcceptedStep {
    /// Continuous extension at `t ∈ [t0, t1]`.
    pub fn dense(&self, t: f64) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])))
    }

    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` to `t_end`, handing every
/// accepted step to `observer`.
pub fn dopri5<F, O>(
    f: F,
    t0: f64,
    y0: f64,
    t_end: f64,
    control: StepControl,
    mut observer: O,
) -> Result<Stats>
where
    F: Fn(f64, f64) -> Result<f64>,
    O: FnMut(&AcceptedStep) -> Result<()>,
{
    if !(control.rtol > 0.0 && control.atol > 0.0 && control.max_step > 0.0) {
        return Err(Error::InvalidIntegrator(format!("{control:?}")));
    }
    let span = t_end - t0;
    if !(span > 0.0) {
        return Err(Error::InvalidIntegrator(format!(
            "empty interval [{t0}, {t_end}]"
        )));
    }
    let h_min = 1e-14 * span;
    let mut stats = Stats::default();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y)?;
    stats.evaluations += 1;

    // initial guess from the scale of y and y'
    let sc = control.atol + control.rtol * y.abs();
    let (d0, d1) = (y.abs() / sc, k1.abs() / sc);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    h = h.min(control.max_step).min(span).max(h_min);
    let mut rejected_last = false;

    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C[1] * h, y + h * A2[0] * k1)?;
        let k3 = f(t + C[2] * h, y + h * (A3[0] * k1 + A3[1] * k2))?;
        let k4 = f(t + C[3] * h, y + h * (A4[0] * k1 + A4[1] * k2 + A4[2] * k3))?;
        let k5 = f(
            t + C[4] * h,
            y + h * (A5[0] * k1 + A5[1] * k2 + A5[2] * k3 + A5[3] * k4),
        )?;
        let k6 = f(
            t + h,
            y + h * (A6[0] * k1 + A6[1] * k2 + A6[2] * k3 + A6[3] * k4 + A6[4] * k5),
        )?;
        let y_new = y + h * (B[0] * k1 + B[2] * k3 + B[3] * k4 + B[4] * k5 + B[5] * k6);
        let t_new = if last { t_end } else { t + h };
        let k7 = f(t_new, y_new)?;
        stats.evaluations += 6;

        let err_abs = h * (E[0] * k1 + E[2] * k3 + E[3] * k4 + E[4] * k5 + E[5] * k6 + E[6] * k7);
        let scale = control.atol + control.rtol * y.abs().max(y_new.abs());
        let err = (err_abs / scale).abs();

        if err <= 1.0 {
            let dy = y_new - y;
            let bspl = h * k1 - dy;
            let cont = [
                y,
                dy,
                bspl,
                dy - h * k7 - bspl,
                h * (D[0] * k1 + D[2] * k3 + D[3] * k4 + D[4] * k5 + D[5] * k6 + D[6] * k7),
            ];
            let step = AcceptedStep {
                t0: t,
                t1: t_new,
                y0: y,
                y1: y_new,
                f0: k1,
                f1: k7,
                cont,
            };
            observer(&step)?;
            stats.accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            let mut factor = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
            h = (h * factor).min(control.max_step);
        } else {
            stats.rejected += 1;
            rejected_last = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
        if !y.is_finite() {
            return Err(Error::StiffnessFailure { t, z: y, h });
        }
        if t < t_end && h < h_min {
            return Err(Error::StiffnessFailure { t, z: y, h });
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn control(tol: f64) -> StepControl {
        StepControl {
            rtol: tol,
            atol: tol,
            max_step: 1.0,
        }
    }

    #[test]
    fn exponential_decay() {
        let mut last = 0.0;
        let stats = dopri5(
            |_, y| Ok(-2.0 * y),
            0.0,
            1.0,
            3.0,
            control(1e-10),
            |s| {
                last = s.y1;
                Ok(())
            },
        )
        .unwrap();
        assert!((last - (-6.0f64).exp()).abs() < 1e-9);
        assert!(stats.accepted > 10);
    }

    #[test]
    fn dense_output_accuracy() {
        let mut worst: f64 = 0.0;
        dopri5(
            |t, _| Ok(t.cos()),
            0.0,
            0.0,
            10.0,
            control(1e-9),
            |s| {
                for i in 1..10 {
                    let t = s.t0 + s.h() * i as f64 / 10.0;
                    worst = worst.max((s.dense(t) - t.sin()).abs());
                }
                Ok(())
            },
        )
        .unwrap();
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn convergence_order() {
        // fixed steps via max_step with loose tolerances: error ~ h^5
        let run = |h: f64| {
            let mut last = 0.0;
            dopri5(
                |t, y| Ok(y * t.cos()),
                0.0,
                1.0,
                2.0,
                StepControl {
                    rtol: 1.0,
                    atol: 1.0,
                    max_step: h,
                },
                |s| {
                    last = s.y1;
                    Ok(())
                },
            )
            .unwrap();
            (last - 2f64.sin().exp()).abs()
        };
        let ratio = run(0.1) / run(0.05);
        assert!(ratio > 20.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(dopri5(|_, y| Ok(y), 1.0, 1.0, 1.0, control(1e-6), |_| Ok(())).is_err());
        let bad = StepControl {
            rtol: 0.0,
            atol: 1.0,
            max_step: 1.0,
        };
        assert!(dopri5(|_, y| Ok(y), 0.0, 1.0, 2.0, bad, |_| Ok(())).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let r = dopri5(|_, y| Ok(y * y), 0.0, 1.0, 2.0, control(1e-8), |_| Ok(()));
        assert!(matches!(r, Err(Error::StiffnessFailure { .. })));
    }
}
