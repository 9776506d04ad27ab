//! The series-form integrator.
//!
//! A step of the first-order explicit scheme `y_{n+1} = y_n + τ·f(y_n)` is
//! carried out directly on the τ-series digits: `f` is evaluated by
//! polynomial arithmetic over the coefficient vectors (finite because `f` is
//! polynomial), the resulting per-power contributions are added one index up
//! (the extra factor τ), and the state is re-normalized so every trailing
//! coefficient stays bounded by τ⁻¹.
//!
//! Powers of τ beyond the retained order p are not discarded: they are folded
//! back into the coefficient of τ^p (an exact regrouping, value-preserving),
//! and the top contribution is adjusted so that the series gains exactly
//! τ·f(y_n) of value per step. Together these two choices make the series
//! iterate reproduce the plain finite-difference iterate to machine
//! precision while the trailing digits churn through the full ±τ⁻¹ range.
//!
//! The split form keeps only the two-block view α·τ^q + β·τ^p of the same
//! iteration: β accumulates the scaled right-hand side and wraps modulo
//! τ^{−(p−q)}, passing an integer carry into α.

use alloc::vec;
use alloc::vec::Vec;

use crate::systems::{Monomial, PolySystem};
use crate::tau_series::{ShiftFunction, TauSeries};
use crate::{powu, Error};

/// Per-component τ-series digits plus the finite-difference iterate they
/// represent. All components share τ and the retained order p.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesState {
    components: Vec<TauSeries>,
    iterate: Vec<f64>,
}

impl SeriesState {
    /// Start state: a₀ = y0 per component, all trailing digits zero.
    pub fn new(sys: &PolySystem, y0: &[f64], tau: f64) -> Result<Self, Error> {
        if y0.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                got: y0.len(),
            });
        }
        let p = sys.retained_terms(1)?;
        let components = y0
            .iter()
            .map(|&y| {
                let mut coeffs = vec![0.0; p + 1];
                coeffs[0] = y;
                TauSeries::new(tau, coeffs)
            })
            .collect();
        Ok(SeriesState {
            components,
            iterate: y0.to_vec(),
        })
    }

    pub fn components(&self) -> &[TauSeries] {
        &self.components
    }

    /// Reads each component's series back into a real value.
    pub fn values(&self) -> Vec<f64> {
        self.components.iter().map(TauSeries::value).collect()
    }

    /// The plain finite-difference iterate the series representation tracks.
    pub fn iterate(&self) -> &[f64] {
        &self.iterate
    }
}

/// Trailing-coefficient snapshots kept alongside a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSnapshots {
    pub stride: usize,
    pub states: Vec<SeriesState>,
}

/// A uniformly spaced solution record: `times[n] = n·τ`, `states[n]` is the
/// per-component value at step n.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tau: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub series_states: Option<SeriesSnapshots>,
}

/// Fold a coefficient vector onto degree ≤ d: powers above d are regrouped
/// into the degree-d slot with the appropriate power of τ (value-preserving).
fn fold_to(coeffs: &[f64], d: usize, tau: f64) -> Vec<f64> {
    let mut out = vec![0.0; d + 1];
    for (k, &a) in coeffs.iter().enumerate() {
        if k <= d {
            out[k] += a;
        } else {
            out[d] += a * powu(tau, (k - d) as u32);
        }
    }
    out
}

/// Multiply two degree-≤d coefficient vectors, folding overflow powers back
/// into the degree-d slot.
fn poly_mul_fold(a: &[f64], b: &[f64], d: usize, tau: f64) -> Vec<f64> {
    let mut out = vec![0.0; d + 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            let k = i + j;
            if k <= d {
                out[k] += ai * bj;
            } else {
                out[d] += ai * bj * powu(tau, (k - d) as u32);
            }
        }
    }
    out
}

/// Evaluate one polynomial equation at the digit expansions, as a
/// degree-≤d coefficient vector in τ.
fn compose_equation(eq: &[Monomial], args: &[Vec<f64>], d: usize, tau: f64) -> Vec<f64> {
    let mut acc = vec![0.0; d + 1];
    for m in eq {
        let mut term = vec![0.0; d + 1];
        term[0] = m.coefficient;
        for (j, &e) in m.exponents.iter().enumerate() {
            for _ in 0..e {
                term = poly_mul_fold(&term, &args[j], d, tau);
            }
        }
        for k in 0..=d {
            acc[k] += term[k];
        }
    }
    acc
}

/// One step of the first-order scheme on the series digits.
///
/// The right-hand side is evaluated two ways: once at the digit expansions
/// (polynomial composition, collected per power of τ through τ^{p−1} with
/// higher powers folded in), and once at the tracked iterate. The top
/// composition coefficient is nudged so the series gains exactly τ·g of
/// value, which pins the series to the finite-difference iterate; the
/// composition itself supplies the digit-level dynamics.
pub fn step_full(state: &SeriesState, sys: &PolySystem, shift: &ShiftFunction) -> SeriesState {
    let dim = sys.dim();
    debug_assert_eq!(state.components.len(), dim);
    let p = state.components[0].p();
    debug_assert!(p >= 1, "retained order must be at least 1");
    let d = p - 1;
    let tau = shift.tau;

    let mut g = vec![0.0; dim];
    sys.eval_rhs_into(&state.iterate, &mut g)
        .expect("state and system dimensions agree");

    let args: Vec<Vec<f64>> = state
        .components
        .iter()
        .map(|c| fold_to(c.coeffs(), d, tau))
        .collect();

    let inv_tau_d = powu(1.0 / tau, d as u32);
    let mut components = Vec::with_capacity(dim);
    for (i, &gi) in g.iter().enumerate() {
        let mut contrib = compose_equation(&sys.equations()[i], &args, d, tau);
        // Anchor the step's value gain to τ·g_i exactly.
        let mut composed = 0.0;
        let mut power = 1.0;
        for &c in contrib.iter() {
            composed += c * power;
            power *= tau;
        }
        contrib[d] += (gi - composed) * inv_tau_d;

        let mut coeffs = state.components[i].coeffs().to_vec();
        for (m, &c) in contrib.iter().enumerate() {
            coeffs[m + 1] += c; // the τ· in τ·f shifts every power up one slot
        }
        components.push(TauSeries::new(tau, coeffs).normalize(shift));
    }

    let iterate = state
        .iterate
        .iter()
        .zip(&g)
        .map(|(&y, &gi)| y + tau * gi)
        .collect();
    SeriesState {
        components,
        iterate,
    }
}

fn auto_stride(n_steps: usize) -> usize {
    if n_steps <= 10_000 {
        1
    } else {
        n_steps.div_ceil(10_000)
    }
}

/// Iterate [`step_full`] for `n_steps`, recording values each step and digit
/// snapshots at `stride` (`None` = every step up to 10⁴ steps, then thinned).
pub fn integrate_full_with_stride(
    sys: &PolySystem,
    y0: &[f64],
    tau: f64,
    n_steps: usize,
    shift: &ShiftFunction,
    stride: Option<usize>,
) -> Result<Trajectory, Error> {
    let stride = stride.unwrap_or_else(|| auto_stride(n_steps));
    assert!(stride >= 1, "snapshot stride must be at least 1");
    let mut state = SeriesState::new(sys, y0, tau)?;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();
    times.push(0.0);
    states.push(state.values());
    snapshots.push(state.clone());
    for n in 1..=n_steps {
        state = step_full(&state, sys, shift);
        let values = state.values();
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step: n });
        }
        times.push(n as f64 * tau);
        states.push(values);
        if n % stride == 0 {
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory {
        tau,
        times,
        states,
        series_states: Some(SeriesSnapshots {
            stride,
            states: snapshots,
        }),
    })
}

/// [`integrate_full_with_stride`] with the default snapshot stride.
pub fn integrate_full(
    sys: &PolySystem,
    y0: &[f64],
    tau: f64,
    n_steps: usize,
    shift: &ShiftFunction,
) -> Result<Trajectory, Error> {
    integrate_full_with_stride(sys, y0, tau, n_steps, shift, None)
}

/// The two-block state α·τ^q + β·τ^p: a regular block α (integer-resolution
/// head) and a trailing block β bounded by τ^{−(p−q)}.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitState {
    q: usize,
    p: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    tau: f64,
    iterate: Vec<f64>,
}

impl SplitState {
    /// Assemble from precomputed blocks (used by the series regrouping).
    pub fn from_blocks(q: usize, p: usize, alpha: Vec<f64>, beta: Vec<f64>, tau: f64) -> Self {
        assert_eq!(alpha.len(), beta.len());
        let tq = powu(tau, q as u32);
        let tp = powu(tau, p as u32);
        let iterate = alpha
            .iter()
            .zip(&beta)
            .map(|(&a, &b)| a * tq + b * tp)
            .collect();
        SplitState {
            q,
            p,
            alpha,
            beta,
            tau,
            iterate,
        }
    }

    /// Canonical start state for a system: q = 1, p = degree + 1,
    /// α = y0·τ⁻¹, β = 0.
    pub fn from_y0(sys: &PolySystem, y0: &[f64], tau: f64) -> Result<Self, Error> {
        if y0.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                got: y0.len(),
            });
        }
        let p = sys.retained_terms(1)?;
        let q = 1;
        if q >= p {
            return Err(Error::InvalidSplit { q, p });
        }
        let alpha = y0.iter().map(|&y| y / tau).collect();
        let beta = vec![0.0; y0.len()];
        Ok(SplitState {
            q,
            p,
            alpha,
            beta,
            tau,
            iterate: y0.to_vec(),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// α·τ^q + β·τ^p per component.
    pub fn values(&self) -> Vec<f64> {
        let tq = powu(self.tau, self.q as u32);
        let tp = powu(self.tau, self.p as u32);
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| a * tq + b * tp)
            .collect()
    }
}

/// One step in split form: β accumulates the scaled right-hand side and
/// wraps modulo τ^{−(p−q)}; the integer carry moves into α.
pub fn step_split(state: &SplitState, sys: &PolySystem, shift: &ShiftFunction) -> SplitState {
    debug_assert_eq!(state.alpha.len(), sys.dim());
    let tau = state.tau;
    let wrap = ShiftFunction {
        kind: shift.kind,
        tau: powu(tau, (state.p - state.q) as u32),
    };
    let scale = powu(1.0 / tau, (state.p - 1) as u32); // τ^{1−p}

    let mut g = vec![0.0; sys.dim()];
    sys.eval_rhs_into(&state.iterate, &mut g)
        .expect("state and system dimensions agree");

    let mut alpha = state.alpha.clone();
    let mut beta = state.beta.clone();
    let mut iterate = state.iterate.clone();
    for i in 0..alpha.len() {
        let (bounded, carry) = wrap.apply(beta[i] + g[i] * scale);
        beta[i] = bounded;
        alpha[i] += carry;
        iterate[i] += tau * g[i];
    }
    SplitState {
        q: state.q,
        p: state.p,
        alpha,
        beta,
        tau,
        iterate,
    }
}

/// Iterate [`step_split`]; the trajectory carries no digit snapshots (the
/// split state has no per-index digits to sample).
pub fn integrate_split(
    sys: &PolySystem,
    y0: &[f64],
    tau: f64,
    n_steps: usize,
    shift: &ShiftFunction,
) -> Result<Trajectory, Error> {
    let mut state = SplitState::from_y0(sys, y0, tau)?;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    states.push(state.values());
    for n in 1..=n_steps {
        state = step_split(&state, sys, shift);
        let values = state.values();
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step: n });
        }
        times.push(n as f64 * tau);
        states.push(values);
    }
    Ok(Trajectory {
        tau,
        times,
        states,
        series_states: None,
    })
}

/// Pull the chosen trailing coefficient out of every retained snapshot
/// (components interleaved in step order) and scale it into [0, 1):
/// nonnegative sequences are scaled by τ directly; sign-symmetric sequences
/// are mapped through (x·τ + 1)/2.
pub fn extract_random_part(traj: &Trajectory, coeff_index: usize) -> Result<Vec<f64>, Error> {
    let snaps = traj
        .series_states
        .as_ref()
        .ok_or(Error::MissingSeriesStates)?;
    let first = snaps.states.first().ok_or(Error::MissingSeriesStates)?;
    let p = first.components[0].p();
    let q = 1; // the regular head is a₀ + a₁τ; indexes above q are trailing
    if coeff_index <= q || coeff_index > p {
        return Err(Error::InvalidCoeffIndex {
            index: coeff_index,
            q,
            p,
        });
    }
    let tau = traj.tau;
    let mut raw = Vec::with_capacity(snaps.states.len() * first.components.len());
    for state in &snaps.states {
        for c in state.components() {
            raw.push(c.coeffs()[coeff_index]);
        }
    }
    let sign_symmetric = raw.iter().any(|&x| x < 0.0);
    Ok(raw
        .into_iter()
        .map(|x| {
            if sign_symmetric {
                (x * tau + 1.0) / 2.0
            } else {
                x * tau
            }
        })
        .collect())
}
