//! The number representation: a value stored as a segment of a series in
//! powers of τ, plus the digit-shifting (carry) procedure that bounds every
//! coefficient by τ⁻¹ while preserving the represented value.
//!
//! `value = Σ_{m=0..p} a_m·τ^m` behaves like a positional numeral with base
//! τ⁻¹: when a coefficient overflows the base, the overflow is carried into
//! the next-lower index (whose place value is τ⁻¹ times larger). Coefficients
//! are reals, not integers — integer-valued behavior emerges in the
//! piecewise-linear module where the head moves by ±1.

use alloc::vec::Vec;

use crate::integrator::SplitState;
use crate::{powu, Error};

/// Which wrapping rule bounds a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// Symmetric (truncation-toward-zero) remainder mod τ⁻¹: the bounded part
    /// keeps the sign of the input and the carry is the integer quotient.
    ModCarry,
    /// Sawtooth wrapping into [−τ⁻¹, τ⁻¹): ψ(x) = τ⁻¹·φ(τx) with
    /// φ(x) = ((x+1) mod 2) − 1. Same contract, different bounded range;
    /// exists to demonstrate that the wrapping rule is pluggable.
    SymmetricSawtooth,
}

/// A wrapping rule together with the τ it is scaled by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftFunction {
    pub kind: ShiftKind,
    pub tau: f64,
}

impl ShiftFunction {
    pub fn mod_carry(tau: f64) -> Self {
        assert!(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
        ShiftFunction {
            kind: ShiftKind::ModCarry,
            tau,
        }
    }

    pub fn sawtooth(tau: f64) -> Self {
        assert!(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
        ShiftFunction {
            kind: ShiftKind::SymmetricSawtooth,
            tau,
        }
    }

    /// Split `x` into a bounded part (|bounded| ≤ 1/τ) and the carry that
    /// belongs one index lower: `x = bounded + carry/τ` exactly (to within
    /// one rounding of x).
    ///
    /// Under `ModCarry` an input already below the threshold is returned
    /// unchanged with zero carry.
    pub fn apply(&self, x: f64) -> (f64, f64) {
        let threshold = 1.0 / self.tau;
        match self.kind {
            ShiftKind::ModCarry => {
                let k = libm::trunc(x / threshold);
                // For |x| < 1/τ this is exactly (x, 0); otherwise the
                // subtraction is exact for binary τ (x and k·τ⁻¹ share scale).
                (x - k * threshold, k)
            }
            ShiftKind::SymmetricSawtooth => {
                let scaled = self.tau * x;
                let wrapped = (scaled + 1.0) - 2.0 * libm::floor((scaled + 1.0) / 2.0);
                let bounded = threshold * (wrapped - 1.0);
                (bounded, self.tau * (x - bounded))
            }
        }
    }
}

/// One carry event during normalization: `delta` was shifted out of
/// coefficient `index` into coefficient `index − 1` (in units of the lower
/// coefficient).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarryRecord {
    pub index: usize,
    pub delta: f64,
}

/// A value stored as coefficients of powers of τ: `Σ_{m=0..p} a_m·τ^m`.
///
/// After [`TauSeries::normalize`] every coefficient with index ≥ 1 satisfies
/// |a_m| ≤ 1/τ; the head coefficient a₀ absorbs residual carry unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSeries {
    tau: f64,
    coeffs: Vec<f64>,
}

impl TauSeries {
    /// `coeffs[m]` is the coefficient of τ^m; the retained order p is
    /// `coeffs.len() - 1`.
    pub fn new(tau: f64, coeffs: Vec<f64>) -> Self {
        assert!(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
        assert!(!coeffs.is_empty(), "a series needs at least the a0 term");
        TauSeries { tau, coeffs }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Retained order p (highest stored power of τ).
    pub fn p(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Σ a_m·τ^m, evaluated in order of increasing m.
    pub fn value(&self) -> f64 {
        let mut acc = 0.0;
        let mut power = 1.0;
        for &a in &self.coeffs {
            acc += a * power;
            power *= self.tau;
        }
        acc
    }

    /// Propagate carries from the highest index down to index 0, bounding
    /// every coefficient of index ≥ 1 by τ⁻¹. Value-preserving up to
    /// floating-point rounding; a single pass suffices because each carry
    /// adds at most |input|·τ to the next coefficient.
    pub fn normalize(&self, shift: &ShiftFunction) -> TauSeries {
        self.normalize_trace(shift).0
    }

    /// Like [`TauSeries::normalize`], also reporting every nonzero carry.
    pub fn normalize_trace(&self, shift: &ShiftFunction) -> (TauSeries, Vec<CarryRecord>) {
        let mut out = self.coeffs.clone();
        let mut carries = Vec::new();
        let mut carry = 0.0;
        for m in (1..out.len()).rev() {
            let (bounded, c) = shift.apply(out[m] + carry);
            out[m] = bounded;
            if c != 0.0 {
                carries.push(CarryRecord { index: m, delta: c });
            }
            carry = c;
        }
        out[0] += carry;
        (
            TauSeries {
                tau: self.tau,
                coeffs: out,
            },
            carries,
        )
    }
}

/// Regroup a series into the two-block form α·τ^q + β·τ^p:
/// α collects coefficients 0..=q (scaled to the τ^q place), β collects
/// coefficients q+1..=p (scaled to the τ^p place).
pub fn split(s: &TauSeries, q: usize, p: usize) -> Result<SplitState, Error> {
    if q >= p || p > s.p() {
        return Err(Error::InvalidSplit { q, p });
    }
    let mut alpha = 0.0;
    for i in 0..=q {
        // τ^{i−q} = (1/τ)^{q−i}
        alpha += s.coeffs[i] * powu(1.0 / s.tau, (q - i) as u32);
    }
    let mut beta = 0.0;
    for i in (q + 1)..=p {
        beta += s.coeffs[i] * powu(1.0 / s.tau, (p - i) as u32);
    }
    Ok(SplitState::from_blocks(
        q,
        p,
        alloc::vec![alpha],
        alloc::vec![beta],
        s.tau,
    ))
}
