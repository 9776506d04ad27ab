//! Run configuration: flag validation and system construction.
//!
//! Validation failures are reported with the offending field named, so the
//! shell caller can tell a bad invocation (exit 2) from a run that failed
//! mathematically (exit 3).

use std::collections::BTreeMap;

use mca_core::systems::{builtin, Monomial, PolySystem};
use serde::{Deserialize, Serialize};

/// Everything that determines a run. Serialized into JSON output so results
/// carry their own provenance.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub mode: String,
    pub system: String,
    pub params: BTreeMap<String, f64>,
    pub y0: Vec<f64>,
    pub tau: f64,
    pub t_max: f64,
    pub output: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeff_index: Option<usize>,
}

/// A config error names the field it rejects.
#[derive(Debug)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

fn bad(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field,
        message: message.into(),
    }
}

/// Inline JSON system description accepted by `--system`:
/// `{"dim":2,"equations":[[{"c":1.0,"e":[0,1]}],...],"names":["u","v"]}`.
#[derive(Deserialize)]
struct InlineSystem {
    dim: usize,
    equations: Vec<Vec<InlineMonomial>>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct InlineMonomial {
    c: f64,
    e: Vec<u32>,
}

fn default_y0(id: &str) -> Option<Vec<f64>> {
    match id {
        "example1" => Some(vec![1.0, 0.0]),
        "vanderpol" => Some(vec![0.0, 1.0]),
        "lorenz" => Some(vec![3.0, 2.0, 15.0]),
        _ => None,
    }
}

/// Build the system named (or inlined) by `--system`, collecting the
/// parameters that apply to it.
pub fn resolve_system(
    spec: &str,
    sigma: Option<f64>,
    r: Option<f64>,
    v: Option<f64>,
    lambda: Option<f64>,
) -> Result<(PolySystem, BTreeMap<String, f64>), ConfigError> {
    if spec.trim_start().starts_with('{') {
        let inline: InlineSystem = serde_json::from_str(spec)
            .map_err(|e| bad("system", format!("inline JSON rejected: {e}")))?;
        if inline.equations.len() != inline.dim {
            return Err(bad(
                "system",
                format!(
                    "inline dim is {} but {} equations were given",
                    inline.dim,
                    inline.equations.len()
                ),
            ));
        }
        let names = inline
            .names
            .unwrap_or_else(|| (1..=inline.dim).map(|i| format!("y{i}")).collect());
        let equations = inline
            .equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|m| Monomial {
                        coefficient: m.c,
                        exponents: m.e.clone(),
                    })
                    .collect()
            })
            .collect();
        let sys = PolySystem::new("custom", equations, names)
            .map_err(|e| bad("system", format!("inline system rejected: {e}")))?;
        return Ok((sys, BTreeMap::new()));
    }

    let mut params = Vec::new();
    let mut echo = BTreeMap::new();
    match spec {
        "lorenz" => {
            for (name, value) in [("sigma", sigma), ("r", r), ("v", v)] {
                let value = value.unwrap_or(match name {
                    "sigma" => 3.0,
                    "r" => 15.0,
                    _ => 1.0,
                });
                params.push((name, value));
                echo.insert(name.to_string(), value);
            }
        }
        "vanderpol" => {
            let value = lambda.unwrap_or(1.0);
            params.push(("lambda", value));
            echo.insert("lambda".to_string(), value);
        }
        _ => {}
    }
    let sys = builtin(spec, &params).map_err(|_| {
        bad(
            "system",
            format!("unknown system {spec:?} (expected example1, vanderpol, lorenz, or inline JSON)"),
        )
    })?;
    Ok((sys, echo))
}

/// Fill in the start vector (per-system default when omitted) and check the
/// numeric ranges every mode shares. `needs_positive_horizon` is set for the
/// linear mode, whose closed-form build has no zero-horizon analogue.
pub fn validate(
    sys: &PolySystem,
    y0: Option<Vec<f64>>,
    tau: f64,
    t_max: f64,
    needs_positive_horizon: bool,
) -> Result<Vec<f64>, ConfigError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(bad("tau", format!("{tau} is outside (0, 1)")));
    }
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(bad("t-max", format!("{t_max} is not a finite nonnegative time")));
    }
    if needs_positive_horizon && t_max == 0.0 {
        return Err(bad("t-max", "the linear mode needs a horizon greater than zero"));
    }
    let y0 = match y0 {
        Some(y0) => y0,
        None => default_y0(sys.id()).ok_or_else(|| {
            bad("y0", "a custom system has no default start vector; pass --y0")
        })?,
    };
    if y0.len() != sys.dim() {
        return Err(bad(
            "y0",
            format!("expected {} components for {}, got {}", sys.dim(), sys.id(), y0.len()),
        ));
    }
    if !y0.iter().all(|x| x.is_finite()) {
        return Err(bad("y0", "components must be finite"));
    }
    Ok(y0)
}

/// Grid-aligned step count: the final partial step is not taken.
pub fn steps_for_horizon(t_max: f64, tau: f64) -> usize {
    (t_max / tau).floor() as usize
}
