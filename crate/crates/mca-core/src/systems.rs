//! ODE systems with multivariate-polynomial right-hand sides.
//!
//! Restricting the right-hand side to polynomials keeps the series
//! integrator's truncation rule exact (all derivatives beyond the polynomial
//! degree vanish) and makes slope evaluation in the piecewise-linear module
//! exact integer arithmetic. Non-polynomial systems are rejected at
//! construction, not approximated.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::vec;

use crate::{powu, Error};

/// One term `coefficient · Π x_j^exponents[j]` of a polynomial right-hand
/// side. `exponents` has one entry per state dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// An autonomous ODE system `dy/dt = f(y)` whose components are monomial
/// sums. The zero polynomial is an empty monomial list. Parameters are baked
/// into monomial coefficients at construction, so evaluation is pure
/// arithmetic with no lookups.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    id: String,
    dim: usize,
    equations: Vec<Vec<Monomial>>,
    names: Vec<String>,
}

impl PolySystem {
    /// `equations[i]` is the monomial list for dy_i/dt; every monomial's
    /// exponent vector must have length `names.len()`.
    pub fn new(
        id: impl Into<String>,
        equations: Vec<Vec<Monomial>>,
        names: Vec<String>,
    ) -> Result<Self, Error> {
        let dim = names.len();
        if equations.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: equations.len(),
            });
        }
        for eq in &equations {
            for m in eq {
                if m.exponents.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.exponents.len(),
                    });
                }
            }
        }
        Ok(PolySystem {
            id: id.into(),
            dim,
            equations,
            names,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equations(&self) -> &[Vec<Monomial>] {
        &self.equations
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Maximum total degree over all monomials (0 for a constant or zero
    /// right-hand side).
    pub fn degree(&self) -> u32 {
        self.equations
            .iter()
            .flat_map(|eq| eq.iter())
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Number of series terms to retain: degree + scheme order. Only the
    /// first-order explicit scheme is implemented.
    pub fn retained_terms(&self, scheme_order: usize) -> Result<usize, Error> {
        if scheme_order != 1 {
            return Err(Error::UnsupportedSchemeOrder {
                order: scheme_order,
            });
        }
        Ok(self.degree() as usize + scheme_order)
    }

    /// Evaluate the right-hand side at `point`. Exact (no rounding) for
    /// integer points and integer coefficients within 2^53.
    pub fn eval_rhs(&self, point: &[f64]) -> Result<Vec<f64>, Error> {
        let mut out = vec![0.0; self.dim];
        self.eval_rhs_into(point, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`PolySystem::eval_rhs`].
    pub fn eval_rhs_into(&self, point: &[f64], out: &mut [f64]) -> Result<(), Error> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        if out.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: out.len(),
            });
        }
        for (slot, eq) in out.iter_mut().zip(&self.equations) {
            let mut acc = 0.0;
            for m in eq {
                let mut term = m.coefficient;
                for (&x, &e) in point.iter().zip(&m.exponents) {
                    term *= powu(x, e);
                }
                acc += term;
            }
            *slot = acc;
        }
        Ok(())
    }
}

fn mono(coefficient: f64, exponents: &[u32]) -> Monomial {
    Monomial {
        coefficient,
        exponents: exponents.to_vec(),
    }
}

/// Quadratic 2-D example system: u' = v² − u², v' = u² − 2v.
pub fn example1() -> PolySystem {
    PolySystem::new(
        "example1",
        vec![
            vec![mono(1.0, &[0, 2]), mono(-1.0, &[2, 0])],
            vec![mono(1.0, &[2, 0]), mono(-2.0, &[0, 1])],
        ],
        vec!["u".to_string(), "v".to_string()],
    )
    .expect("example1 monomials are well-formed")
}

/// Van der Pol oscillator: u' = v, v' = λ(1 − u²)v − u.
pub fn van_der_pol(lambda: f64) -> PolySystem {
    PolySystem::new(
        "vanderpol",
        vec![
            vec![mono(1.0, &[0, 1])],
            vec![
                mono(lambda, &[0, 1]),
                mono(-lambda, &[2, 1]),
                mono(-1.0, &[1, 0]),
            ],
        ],
        vec!["u".to_string(), "v".to_string()],
    )
    .expect("van der Pol monomials are well-formed")
}

/// Lorenz system: x' = σ(y − x), y' = rx − xz − y, z' = xy − vz.
pub fn lorenz(sigma: f64, r: f64, v: f64) -> PolySystem {
    PolySystem::new(
        "lorenz",
        vec![
            vec![mono(sigma, &[0, 1, 0]), mono(-sigma, &[1, 0, 0])],
            vec![
                mono(r, &[1, 0, 0]),
                mono(-1.0, &[1, 0, 1]),
                mono(-1.0, &[0, 1, 0]),
            ],
            vec![mono(1.0, &[1, 1, 0]), mono(-v, &[0, 0, 1])],
        ],
        vec!["x".to_string(), "y".to_string(), "z".to_string()],
    )
    .expect("lorenz monomials are well-formed")
}

/// Construct a builtin by id with its parameter map. Recognized parameters:
/// `sigma`, `r`, `v` (lorenz), `lambda` (vanderpol); missing entries default
/// to the canonical values (σ=3, r=15, v=1, λ=1).
pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<PolySystem, Error> {
    let get = |key: &str, default: f64| {
        params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    match name {
        "example1" => Ok(example1()),
        "vanderpol" => Ok(van_der_pol(get("lambda", 1.0))),
        "lorenz" => Ok(lorenz(get("sigma", 3.0), get("r", 15.0), get("v", 1.0))),
        other => Err(Error::UnknownSystem(other.to_string())),
    }
}
