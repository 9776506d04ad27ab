//! Reference solutions used to validate the series-form integrator:
//! a plain first-order finite-difference loop, exact per-step closed forms
//! for the two-equation demonstration system, and trajectory comparison.

use alloc::vec;
use alloc::vec::Vec;

use crate::integrator::Trajectory;
use crate::systems::PolySystem;
use crate::Error;

/// Plain explicit first-order integration: `y += τ·f(y)` for `n_steps`.
pub fn euler(sys: &PolySystem, y0: &[f64], tau: f64, n_steps: usize) -> Result<Trajectory, Error> {
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    let mut y = y0.to_vec();
    let mut g = vec![0.0; y.len()];
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(y.clone());
    for n in 1..=n_steps {
        sys.eval_rhs_into(&y, &mut g)?;
        for (yi, &gi) in y.iter_mut().zip(&g) {
            *yi += tau * gi;
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step: n });
        }
        times.push(n as f64 * tau);
        states.push(y.clone());
    }
    Ok(Trajectory {
        tau,
        times,
        states,
        series_states: None,
    })
}

/// Exact value of the demonstration-system iterate after `a` steps, as
/// `(u, v, t)`, from the closed per-step recurrences: `u` falls by exactly τ
/// per step once reparameterized by its own level, which makes the remaining
/// sums finite and explicit.
///
/// Valid while `a·τ < 1` (the reparameterization runs out at u = 0).
pub fn example1_closed_forms(a: u64, tau: f64) -> Result<(f64, f64, f64), Error> {
    if a as f64 * tau >= 1.0 {
        return Err(Error::DomainExceeded { a, tau });
    }
    let u = 1.0 - a as f64 * tau;
    let mut t = 0.0;
    for m in 0..a {
        let d = 1.0 - m as f64 * tau;
        t += tau / (d * d);
    }
    let mut v = 0.0;
    for m in 1..a {
        let mut prod = 1.0;
        for k in (m + 1)..a {
            let d = 1.0 - k as f64 * tau;
            prod *= 1.0 - 2.0 * tau / (d * d);
        }
        v += prod;
    }
    v *= tau;
    Ok((u, v, t))
}

/// Small-time simplification of [`example1_closed_forms`], accurate while
/// the trajectory stays near the start (t ≲ 0.2). Valid while `2·a·τ < 1`.
pub fn example1_small_t(a: u64, tau: f64) -> Result<(f64, f64, f64), Error> {
    if 2.0 * a as f64 * tau >= 1.0 {
        return Err(Error::DomainExceeded { a, tau });
    }
    let u = 1.0 - a as f64 * tau;
    let mut v = 0.0;
    for m in 2..=a {
        v += tau / (1.0 - 2.0 * m as f64 * tau);
    }
    v *= 1.0 - 2.0 * a as f64 * tau;
    let mut t = 0.0;
    for m in 0..a {
        t += tau / (1.0 - 2.0 * m as f64 * tau);
    }
    Ok((u, v, t))
}

/// Elementwise trajectory discrepancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub max_abs: f64,
    pub l2: f64,
    pub argmax_step: usize,
}

/// Compare two trajectories over the same grid. The l2 figure is the root of
/// the sum of squared per-component differences over all recorded steps.
pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<ErrorReport, Error> {
    if a.tau != b.tau
        || a.states.len() != b.states.len()
        || a.states.first().map(Vec::len) != b.states.first().map(Vec::len)
    {
        return Err(Error::ShapeMismatch);
    }
    let mut max_abs = 0.0f64;
    let mut argmax_step = 0;
    let mut sq = 0.0;
    for (n, (sa, sb)) in a.states.iter().zip(&b.states).enumerate() {
        for (x, y) in sa.iter().zip(sb) {
            let d = (x - y).abs();
            sq += d * d;
            if d > max_abs {
                max_abs = d;
                argmax_step = n;
            }
        }
    }
    Ok(ErrorReport {
        max_abs,
        l2: libm::sqrt(sq),
        argmax_step,
    })
}
