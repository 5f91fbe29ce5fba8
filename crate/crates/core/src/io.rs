//! JSON readers for states, observable families and constant bounds.
//!
//! Complex numbers are `[re, im]` pairs and matrices are flat row-major lists.
//! Every rejection names the offending field, e.g. `sites[1][0].matrix[3]`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::Value;

use crate::bounds::ConstantBounds;
use crate::error::{Error, Result};
use crate::observables::{pauli_family, spin_family, ObservableFamily, SpinConfig};
use crate::states::PureState;
use crate::tensor::{c, validate_density, ComplexMatrix, DensityMatrix};

fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::malformed("$", e.to_string()))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    let map = obj
        .as_object()
        .ok_or_else(|| Error::malformed(path, "expected an object"))?;
    map.get(key)
        .ok_or_else(|| Error::malformed(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::malformed(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::malformed(path, "expected a finite number"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::malformed(path, "expected a non-negative integer"))
}

fn complex(v: &Value, path: &str) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(c(number(re, &format!("{path}[0]"))?, number(im, &format!("{path}[1]"))?)),
        _ => Err(Error::malformed(path, "expected a [re, im] pair")),
    }
}

fn complex_list(v: &Value, path: &str) -> Result<Vec<Complex64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{path}[{i}]")))
        .collect()
}

fn real_list(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn index_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| count(x, &format!("{path}[{i}]")))
        .collect()
}

fn dims_at(obj: &Value, path: &str) -> Result<Vec<usize>> {
    let p = join(path, "dims");
    let dims = index_list(field(obj, "dims", path)?, &p)?;
    if dims.is_empty() {
        return Err(Error::malformed(p, "at least one subsystem required"));
    }
    if let Some(i) = dims.iter().position(|&d| d < 2) {
        return Err(Error::malformed(format!("{p}[{i}]"), "local dimension must be at least 2"));
    }
    if dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).is_none() {
        return Err(Error::malformed(p, "total dimension overflows"));
    }
    Ok(dims)
}

fn square_matrix(v: &Value, dim: usize, path: &str) -> Result<ComplexMatrix> {
    let entries = complex_list(v, path)?;
    if entries.len() != dim * dim {
        return Err(Error::malformed(
            path,
            format!("expected {} entries for a {dim}x{dim} matrix, found {}", dim * dim, entries.len()),
        ));
    }
    Ok(ComplexMatrix::from_row_slice(dim, dim, &entries))
}

fn with_path(err: Error, path: &str) -> Error {
    match err {
        Error::Malformed { .. } => err,
        other => Error::malformed(path, other.to_string()),
    }
}

/// A density matrix from `{"dims", "matrix"}` or a pure state from
/// `{"dims", "amplitudes"}`.
pub fn state_from_value(v: &Value, path: &str) -> Result<DensityMatrix> {
    let dims = dims_at(v, path)?;
    let dim: usize = dims.iter().product();
    let obj = v.as_object().ok_or_else(|| Error::malformed(path, "expected an object"))?;
    match (obj.get("matrix"), obj.get("amplitudes")) {
        (Some(m), None) => {
            let p = join(path, "matrix");
            validate_density(square_matrix(m, dim, &p)?, &dims).map_err(|e| with_path(e, &p))
        }
        (None, Some(a)) => Ok(pure_from_parts(dims, a, &join(path, "amplitudes"))?.density()),
        (Some(_), Some(_)) => Err(Error::malformed(path, "give either `matrix` or `amplitudes`, not both")),
        (None, None) => Err(Error::malformed(path, "missing `matrix` or `amplitudes`")),
    }
}

fn pure_from_parts(dims: Vec<usize>, amplitudes: &Value, path: &str) -> Result<PureState> {
    let dim: usize = dims.iter().product();
    let amps = complex_list(amplitudes, path)?;
    if amps.len() != dim {
        return Err(Error::malformed(path, format!("expected {dim} amplitudes, found {}", amps.len())));
    }
    PureState::new(dims, DVector::from_vec(amps)).map_err(|e| with_path(e, path))
}

/// A pure state from `{"dims", "amplitudes"}`.
pub fn pure_state_from_value(v: &Value, path: &str) -> Result<PureState> {
    let dims = dims_at(v, path)?;
    pure_from_parts(dims, field(v, "amplitudes", path)?, &join(path, "amplitudes"))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    state_from_value(&parse_document(text)?, "")
}

/// An observable family. Accepted shapes:
///
/// - `{"dims": [...], "sites": [[{"matrix": [...]}, ...], ...]}`
/// - `{"builtin": "pauli", "signs": [[sx, sy, sz], ...]}`
/// - `{"builtin": "spin", "two_j": [...], "h": [...], "g": [...]}`
pub fn observables_from_value(v: &Value, path: &str) -> Result<ObservableFamily> {
    let obj = v.as_object().ok_or_else(|| Error::malformed(path, "expected an object"))?;
    match obj.get("builtin") {
        None => inline_family(v, path),
        Some(name) => match name.as_str() {
            Some("pauli") => {
                let p = join(path, "signs");
                let rows = array(field(v, "signs", path)?, &p)?;
                let signs = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let rp = format!("{p}[{i}]");
                        let vals = real_list(row, &rp)?;
                        <[f64; 3]>::try_from(vals.as_slice())
                            .map_err(|_| Error::malformed(rp, "expected three signs"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                pauli_family(&signs).map_err(|e| with_path(e, &p))
            }
            Some("spin") => {
                let (two_j, config) = spin_spec_from_value(v, path)?;
                spin_family(&two_j, &config).map_err(|e| with_path(e, path))
            }
            _ => Err(Error::malformed(join(path, "builtin"), "expected \"pauli\" or \"spin\"")),
        },
    }
}

/// The `two_j`, `h`, `g` fields of a spin specification.
pub fn spin_spec_from_value(v: &Value, path: &str) -> Result<(Vec<u32>, SpinConfig)> {
    let p = join(path, "two_j");
    let two_j = index_list(field(v, "two_j", path)?, &p)?
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            u32::try_from(x)
                .ok()
                .filter(|&x| x >= 1)
                .ok_or_else(|| Error::malformed(format!("{p}[{i}]"), "expected 2j >= 1"))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = real_list(field(v, "h", path)?, &join(path, "h"))?;
    let g = real_list(field(v, "g", path)?, &join(path, "g"))?;
    let config = SpinConfig::new(h, g).map_err(|e| with_path(e, path))?;
    if config.n_sites() != two_j.len() {
        return Err(Error::malformed(
            path,
            format!("{} spins but {} weights", two_j.len(), config.n_sites()),
        ));
    }
    Ok((two_j, config))
}

fn inline_family(v: &Value, path: &str) -> Result<ObservableFamily> {
    let dims = dims_at(v, path)?;
    let sp = join(path, "sites");
    let sites = array(field(v, "sites", path)?, &sp)?;
    if sites.len() != dims.len() {
        return Err(Error::malformed(
            sp,
            format!("expected {} sites, found {}", dims.len(), sites.len()),
        ));
    }
    let per_site = sites
        .iter()
        .zip(&dims)
        .enumerate()
        .map(|(i, (site, &d))| {
            let p = format!("{sp}[{i}]");
            array(site, &p)?
                .iter()
                .enumerate()
                .map(|(k, op)| {
                    let op_path = format!("{p}[{k}]");
                    square_matrix(field(op, "matrix", &op_path)?, d, &join(&op_path, "matrix"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ObservableFamily::new(dims, per_site).map_err(|e| with_path(e, &sp))
}

pub fn parse_observables(text: &str) -> Result<ObservableFamily> {
    observables_from_value(&parse_document(text)?, "")
}

/// `{"default": u, "subsets": [{"sites": [0], "value": 2.0}, ...]}` with
/// zero-based site indices; `default` may be omitted (0).
pub fn constant_bounds_from_value(v: &Value, path: &str) -> Result<ConstantBounds> {
    let obj = v.as_object().ok_or_else(|| Error::malformed(path, "expected an object"))?;
    let default = match obj.get("default") {
        Some(d) => number(d, &join(path, "default"))?,
        None => 0.0,
    };
    let mut values = BTreeMap::new();
    if let Some(list) = obj.get("subsets") {
        let lp = join(path, "subsets");
        for (i, entry) in array(list, &lp)?.iter().enumerate() {
            let ep = format!("{lp}[{i}]");
            let mut sites = index_list(field(entry, "sites", &ep)?, &join(&ep, "sites"))?;
            if sites.is_empty() {
                return Err(Error::malformed(join(&ep, "sites"), "subset is empty"));
            }
            sites.sort_unstable();
            let value = number(field(entry, "value", &ep)?, &join(&ep, "value"))?;
            if value < 0.0 {
                return Err(Error::malformed(join(&ep, "value"), "bound must be >= 0"));
            }
            if values.insert(sites, value).is_some() {
                return Err(Error::malformed(join(&ep, "sites"), "subset listed twice"));
            }
        }
    }
    ConstantBounds::new(default, values).map_err(|e| with_path(e, path))
}

pub fn parse_constant_bounds(text: &str) -> Result<ConstantBounds> {
    constant_bounds_from_value(&parse_document(text)?, "")
}
