//! Piecewise-linear analytic approximation.
//!
//! When the state is held as integer part `a` plus a scaled remainder `b·τ`,
//! the right-hand side evaluated at the integer lattice point `a` is constant
//! until some component's remainder crosses the ±τ⁻¹ threshold and shifts a
//! unit into `a`. Between those events the trajectory is exactly linear in
//! time, so the whole solution can be emitted as closed-form segments: the
//! segment is predicted (no stepping), the earliest threshold crossing is
//! computed in whole steps, and the state advances to that event in one jump.

use alloc::vec::Vec;

use crate::systems::PolySystem;
use crate::tau_series::ShiftFunction;
use crate::Error;

/// Number of whole steps until a remainder crosses the shift threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftHorizon {
    Finite(u64),
    Infinite,
}

/// Steps until `b0 + m·g` leaves (−τ⁻¹, τ⁻¹), or [`ShiftHorizon::Infinite`]
/// when the slope is zero. A slope at or beyond τ⁻¹ in magnitude would shift
/// on every step, which the linear layer treats as out of scope.
pub fn shift_horizon(g: f64, b0: f64, tau: f64) -> Result<ShiftHorizon, Error> {
    let limit = 1.0 / tau;
    if g == 0.0 {
        return Ok(ShiftHorizon::Infinite);
    }
    if g.abs() >= limit {
        return Err(Error::SlopeTooLarge {
            component: 0,
            slope: g,
            limit,
            t: 0.0,
        });
    }
    let m = if g > 0.0 {
        libm::ceil((1.0 - b0 * tau) / (g * tau))
    } else {
        libm::ceil(-(1.0 + b0 * tau) / (g * tau))
    };
    debug_assert!(m >= 1.0, "remainders inside the band need at least one step");
    Ok(ShiftHorizon::Finite(m as u64))
}

/// Integer-plus-remainder state of the linear layer at time `t`:
/// component i holds the value `a[i] + b[i]·τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinState {
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub tau: f64,
}

impl LinState {
    /// Split a start vector into integer parts and scaled remainders.
    pub fn from_y0(y0: &[f64], tau: f64) -> Self {
        let a: Vec<f64> = y0.iter().map(|&y| libm::trunc(y)).collect();
        let b = y0.iter().zip(&a).map(|(&y, &ai)| (y - ai) / tau).collect();
        LinState {
            t: 0.0,
            a,
            b,
            tau,
        }
    }

    /// The value vector a + b·τ.
    pub fn values(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(&a, &b)| a + b * self.tau)
            .collect()
    }
}

/// One closed-form segment: component i equals `intercept[i] + slope[i]·t`
/// for t in [t_start, t_end].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub intercept: Vec<f64>,
    pub slope: Vec<f64>,
}

impl LinearSegment {
    pub fn eval(&self, i: usize, t: f64) -> f64 {
        self.intercept[i] + self.slope[i] * t
    }

    pub fn eval_all(&self, t: f64) -> Vec<f64> {
        (0..self.intercept.len()).map(|i| self.eval(i, t)).collect()
    }
}

/// A full piecewise-linear solution over [0, t_max].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearSolution {
    pub segments: Vec<LinearSegment>,
    pub system_id: alloc::string::String,
    pub tau: f64,
}

impl PiecewiseLinearSolution {
    /// Evaluate at time t (the segment owning t; junctions resolve to the
    /// earlier segment). None outside the covered range.
    pub fn eval_at(&self, t: f64) -> Option<Vec<f64>> {
        self.segments
            .iter()
            .find(|s| t >= s.t_start && t <= s.t_end)
            .map(|s| s.eval_all(t))
    }
}

/// Emit the linear segment starting at `state` and jump to its end.
///
/// The slopes are the right-hand side at the integer lattice point `a`
/// (exact integer arithmetic for integer coefficients). The segment runs to
/// the earliest shift event across components, clamped at `t_max`. At an
/// event every minimizing component trades a unit of remainder for ±1 on its
/// integer part; the other components carry their remainders forward.
pub fn layer_advance(
    state: &LinState,
    sys: &PolySystem,
    t_max: f64,
) -> Result<(LinearSegment, LinState), Error> {
    let tau = state.tau;
    let g = sys.eval_rhs(&state.a)?;
    let limit = 1.0 / tau;
    for (i, &gi) in g.iter().enumerate() {
        if gi.abs() >= limit {
            return Err(Error::SlopeTooLarge {
                component: i,
                slope: gi,
                limit,
                t: state.t,
            });
        }
    }
    let horizons: Vec<ShiftHorizon> = g
        .iter()
        .zip(&state.b)
        .map(|(&gi, &bi)| shift_horizon(gi, bi, tau))
        .collect::<Result<_, _>>()?;
    let nearest = horizons
        .iter()
        .filter_map(|h| match h {
            ShiftHorizon::Finite(m) => Some(*m),
            ShiftHorizon::Infinite => None,
        })
        .min();

    let y_start = state.values();
    let segment_to = |t_end: f64| LinearSegment {
        t_start: state.t,
        t_end,
        intercept: y_start
            .iter()
            .zip(&g)
            .map(|(&y, &gi)| y - gi * state.t)
            .collect(),
        slope: g.clone(),
    };

    let event_t = nearest.map(|m| state.t + m as f64 * tau);
    match (nearest, event_t) {
        // Lattice root: every slope is zero, the state never moves again.
        (None, _) => {
            let segment = segment_to(t_max);
            let mut end = state.clone();
            end.t = t_max;
            Ok((segment, end))
        }
        // The horizon lies past t_max: emit the clamped tail segment and
        // advance the remainders fractionally so the end state stays
        // value-consistent (no shift occurs in range).
        (Some(_), Some(te)) if te >= t_max => {
            let segment = segment_to(t_max);
            let steps = (t_max - state.t) / tau;
            let b = state.b.iter().zip(&g).map(|(&bi, &gi)| bi + steps * gi).collect();
            Ok((
                segment,
                LinState {
                    t: t_max,
                    a: state.a.clone(),
                    b,
                    tau,
                },
            ))
        }
        (Some(m), Some(te)) => {
            let segment = segment_to(te);
            let shift = ShiftFunction::mod_carry(tau);
            let mut a = state.a.clone();
            let mut b: Vec<f64> = state
                .b
                .iter()
                .zip(&g)
                .map(|(&bi, &gi)| bi + m as f64 * gi)
                .collect();
            for i in 0..a.len() {
                if horizons[i] == ShiftHorizon::Finite(m) {
                    let (bounded, carry) = shift.apply(b[i]);
                    debug_assert_eq!(
                        carry.abs(),
                        1.0,
                        "a shift event moves exactly one unit"
                    );
                    a[i] += carry;
                    b[i] = bounded;
                }
            }
            Ok((segment, LinState { t: te, a, b, tau }))
        }
        (Some(_), None) => unreachable!(),
    }
}

/// Build the complete piecewise-linear solution over [0, t_max].
pub fn build(
    sys: &PolySystem,
    y0: &[f64],
    tau: f64,
    t_max: f64,
) -> Result<PiecewiseLinearSolution, Error> {
    assert!(t_max > 0.0, "the linear layer needs a positive horizon");
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    let mut state = LinState::from_y0(y0, tau);
    let mut segments = Vec::new();
    while state.t < t_max {
        let (segment, next) = layer_advance(&state, sys, t_max)?;
        segments.push(segment);
        state = next;
    }
    Ok(PiecewiseLinearSolution {
        segments,
        system_id: alloc::string::String::from(sys.id()),
        tau,
    })
}
