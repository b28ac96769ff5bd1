//! Fixed-step classical Runge–Kutta integration with chart-exit detection.

use crate::error::{GeometryError, Result};

/// Parameter tolerance used when bisecting the chart-exit parameter.
pub const EXIT_TOLERANCE: f64 = 1e-10;

/// Samples of an integrated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub params: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Parameter at which the solution left the chart, if it did.
    pub exit: Option<f64>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        let i = self.params.len() - 1;
        (self.params[i], self.states[i])
    }

    pub fn end(&self) -> f64 {
        self.params[self.params.len() - 1]
    }
}

/// One classical RK4 step of size `h` (which may be negative).
pub fn rk4_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let axpy = |a: &[f64; N], s: f64, b: &[f64; N]| {
        let mut out = *a;
        for (o, bi) in out.iter_mut().zip(b) {
            *o += s * bi;
        }
        out
    };
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(t + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn is_exit(e: &GeometryError) -> bool {
    matches!(
        e,
        GeometryError::PointOutsideDomain(_) | GeometryError::SingularMetric(_)
    )
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end` with steps of magnitude
/// `step`, sampling at `t0 + i·step` and at `t_end`.
///
/// A step that leaves the chart (the right-hand side reports a point outside
/// the domain, or `admissible` rejects the new state) ends the integration:
/// the exit parameter is bisected to [`EXIT_TOLERANCE`] and the last admissible
/// state is appended. Any other error is returned.
pub fn integrate<const N: usize, F, D>(
    rhs: F,
    admissible: D,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    step: f64,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    D: Fn(&[f64; N]) -> bool,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(GeometryError::InvalidInput(format!("step must be positive, got {step}")));
    }
    let span = t_end - t0;
    let dir = if span < 0.0 { -1.0 } else { 1.0 };
    let n = if span == 0.0 {
        0
    } else {
        ((span.abs() / step) - 1e-9).ceil().max(1.0) as usize
    };
    let mut traj = Trajectory {
        params: Vec::with_capacity(n + 1),
        states: Vec::with_capacity(n + 1),
        exit: None,
    };
    traj.params.push(t0);
    traj.states.push(y0);
    let mut t = t0;
    let mut y = y0;
    for i in 1..=n {
        let t_next = if i == n { t_end } else { t0 + dir * step * i as f64 };
        let h = t_next - t;
        let attempt = |h: f64| -> Result<Option<[f64; N]>> {
            match rk4_step(&rhs, t, &y, h) {
                Ok(next) if admissible(&next) && next.iter().all(|c| c.is_finite()) => Ok(Some(next)),
                Ok(_) => Ok(None),
                Err(e) if is_exit(&e) => Ok(None),
                Err(e) => Err(e),
            }
        };
        match attempt(h)? {
            Some(next) => {
                t = t_next;
                y = next;
                traj.params.push(t);
                traj.states.push(y);
            }
            None => {
                let (mut lo, mut hi) = (0.0, h.abs());
                let mut best = None;
                while hi - lo > EXIT_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    match attempt(dir * mid)? {
                        Some(state) => {
                            lo = mid;
                            best = Some(state);
                        }
                        None => hi = mid,
                    }
                }
                if let Some(state) = best {
                    traj.params.push(t + dir * lo);
                    traj.states.push(state);
                }
                traj.exit = Some(t + dir * lo);
                return Ok(traj);
            }
        }
    }
    Ok(traj)
}
