//! Sweep configuration files and bound-provider strings.
//!
//! ```json
//! {
//!   "state": {"kind": "w", "n": 3},
//!   "noise": [0.0, 1.0],
//!   "observables": {"builtin": "pauli", "signs": [[1,1,1],[1,1,1],[-1,-1,1]]},
//!   "criterion": "gme",
//!   "bounds": "family-min",
//!   "grid": 101,
//!   "bracket": [0.0, 1.0]
//! }
//! ```
//!
//! `state.kind` is `w` (with `n`), `qutrit`, or `pure` (with `dims` and
//! `amplitudes`). `criterion` is `gme` (default) or `spin`, the latter taking
//! `{"builtin": "spin", ...}` observables and ignoring `bounds`.

use std::path::{Path, PathBuf};

use gme_core::bounds::DEFAULT_GRID;
use gme_core::io::{
    constant_bounds_from_value, observables_from_value, parse_constant_bounds,
    pure_state_from_value, spin_spec_from_value,
};
use gme_core::states::{qutrit_phi, w_state};
use gme_core::{BoundProvider, BoundStrategy, NoiseFamily, PureState};
use serde_json::Value;

use crate::analysis::{Observables, Setup};
use crate::error::{CliError, Result};

pub const DEFAULT_SWEEP_GRID: usize = 101;

#[derive(Debug, Clone)]
pub struct Config {
    pub setup: Setup,
    pub grid: usize,
    pub bracket: (f64, f64),
}

fn malformed(path: &str, message: impl Into<String>) -> CliError {
    gme_core::Error::Malformed {
        path: path.to_string(),
        message: message.into(),
    }
    .into()
}

fn pair(v: &Value, path: &str) -> Result<(f64, f64)> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => match (a.as_f64(), b.as_f64()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(malformed(path, "expected two numbers")),
        },
        _ => Err(malformed(path, "expected [lo, hi]")),
    }
}

fn target_from_value(v: &Value) -> Result<PureState> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("state.kind", "expected \"w\", \"qutrit\" or \"pure\""))?;
    match kind {
        "w" => {
            let n = v
                .get("n")
                .and_then(Value::as_u64)
                .ok_or_else(|| malformed("state.n", "expected a site count"))?;
            w_state(n as usize).map_err(|e| malformed("state.n", e.to_string()))
        }
        "qutrit" => Ok(qutrit_phi()),
        "pure" => Ok(pure_state_from_value(v, "state")?),
        _ => Err(malformed("state.kind", "expected \"w\", \"qutrit\" or \"pure\"")),
    }
}

/// Parses `zero | constant:<file> | commutator | family-min | reference`.
/// Relative constant files resolve against `base_dir`.
pub fn parse_bounds(
    choice: &str,
    base_dir: &Path,
    family: Option<&NoiseFamily>,
    grid: usize,
) -> Result<BoundProvider> {
    let needs_family = |what: &str| {
        family.ok_or_else(|| CliError::Usage(format!("`{what}` bounds need a target state")))
    };
    match choice {
        "zero" => Ok(BoundProvider::zero()),
        "commutator" => Ok(BoundProvider::commutator()),
        "family-min" => Ok(BoundProvider::new(BoundStrategy::FamilyMinimum {
            family: needs_family("family-min")?.clone(),
            grid,
        })?),
        "reference" => Ok(BoundProvider::reference(needs_family("reference")?.target().clone())),
        _ => match choice.strip_prefix("constant:") {
            Some(file) if !file.is_empty() => {
                let path = resolve(base_dir, file);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                let bounds = parse_constant_bounds(&text).map_err(|e| match e {
                    gme_core::Error::Malformed { path: field, message } => CliError::Io {
                        path: path.display().to_string(),
                        message: format!("malformed input at `{field}`: {message}"),
                    },
                    other => other.into(),
                })?;
                Ok(BoundProvider::constant(bounds))
            }
            _ => Err(CliError::Usage(format!(
                "unknown bounds `{choice}`; expected zero, constant:<file>, commutator, family-min or reference"
            ))),
        },
    }
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Builds a [`Config`] from a parsed document. `base_dir` anchors relative
/// paths inside it.
pub fn config_from_value(doc: &Value, base_dir: &Path) -> Result<Config> {
    if !doc.is_object() {
        return Err(malformed("$", "expected an object"));
    }
    let target = target_from_value(doc.get("state").ok_or_else(|| malformed("state", "missing field"))?)?;
    let family = match doc.get("noise") {
        Some(v) => {
            let (lo, hi) = pair(v, "noise")?;
            NoiseFamily::new(target, lo, hi).map_err(|e| malformed("noise", e.to_string()))?
        }
        None => NoiseFamily::full(target),
    };
    let obs_value = doc
        .get("observables")
        .ok_or_else(|| malformed("observables", "missing field"))?;
    let criterion = match doc.get("criterion") {
        None => "gme",
        Some(v) => v
            .as_str()
            .ok_or_else(|| malformed("criterion", "expected \"gme\" or \"spin\""))?,
    };
    let observables = match criterion {
        "gme" => Observables::Family(observables_from_value(obs_value, "observables")?),
        "spin" => {
            if obs_value.get("builtin").and_then(Value::as_str) != Some("spin") {
                return Err(malformed("observables.builtin", "the spin criterion needs \"spin\" observables"));
            }
            let (two_j, config) = spin_spec_from_value(obs_value, "observables")?;
            Observables::Spin { two_j, config }
        }
        _ => return Err(malformed("criterion", "expected \"gme\" or \"spin\"")),
    };
    let grid = match doc.get("grid") {
        None => DEFAULT_SWEEP_GRID,
        Some(v) => v
            .as_u64()
            .filter(|&g| g >= 2)
            .ok_or_else(|| malformed("grid", "expected an integer >= 2"))? as usize,
    };
    let provider = match doc.get("bounds") {
        None => parse_bounds("family-min", base_dir, Some(&family), DEFAULT_GRID)?,
        Some(Value::String(s)) => parse_bounds(s, base_dir, Some(&family), DEFAULT_GRID)?,
        Some(v @ Value::Object(_)) => match v.get("constant") {
            Some(c) => BoundProvider::constant(constant_bounds_from_value(c, "bounds.constant")?),
            None => return Err(malformed("bounds", "expected a provider string or {\"constant\": {...}}")),
        },
        Some(_) => return Err(malformed("bounds", "expected a provider string or {\"constant\": {...}}")),
    };
    let bracket = match doc.get("bracket") {
        Some(v) => pair(v, "bracket")?,
        None => family.range(),
    };
    let name = match &observables {
        Observables::Family(_) => "config",
        Observables::Spin { .. } => "config-spin",
    };
    Ok(Config {
        setup: Setup {
            name: name.into(),
            family,
            observables,
            provider,
        },
        grid,
        bracket,
    })
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| malformed("$", e.to_string()))?;
    config_from_value(&doc, path.parent().unwrap_or(Path::new(".")))
}
