//! Sweeps and threshold searches over white-noise families.

use std::fmt::Write as _;

use gme_core::criteria::{gme_criterion, spin_gme_criterion};
use gme_core::observables::pauli_family;
use gme_core::states::{fully_separable_threshold, qutrit_phi, w_state};
use gme_core::{BoundProvider, CriterionReport, NoiseFamily, ObservableFamily, SpinConfig};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::g12;

/// Bisection stops once the bracket is narrower than this.
pub const THRESHOLD_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum Observables {
    /// Evaluated with [`gme_criterion`] and the setup's bound provider.
    Family(ObservableFamily),
    /// Evaluated with [`spin_gme_criterion`]; the provider is not consulted.
    Spin { two_j: Vec<u32>, config: SpinConfig },
}

/// A noise family together with the observables and bounds used to test it.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub family: NoiseFamily,
    pub observables: Observables,
    pub provider: BoundProvider,
}

impl Setup {
    pub fn evaluate(&self, q: f64) -> Result<CriterionReport> {
        let at = |source| CliError::AtParameter { q, source };
        let rho = self.family.member(q).map_err(at)?;
        match &self.observables {
            Observables::Family(fam) => gme_criterion(&rho, fam, &self.provider),
            Observables::Spin { two_j, config } => spin_gme_criterion(&rho, two_j, config),
        }
        .map_err(at)
    }
}

/// Sign pattern of the W demos: the first `min(3, n - 1)` sites use
/// (σx, σy, σz), the rest (-σx, -σy, σz).
pub fn w_signs(n: usize) -> Vec<[f64; 3]> {
    let plus = 3.min(n.saturating_sub(1));
    (0..n)
        .map(|i| if i < plus { [1.0, 1.0, 1.0] } else { [-1.0, -1.0, 1.0] })
        .collect()
}

pub fn w_demo(n: usize) -> Result<Setup> {
    if n < 3 {
        return Err(CliError::Usage(format!("W demos need n >= 3, got {n}")));
    }
    let target = w_state(n)?;
    let family = NoiseFamily::full(target);
    Ok(Setup {
        name: format!("w{n}"),
        provider: BoundProvider::family_minimum(family.clone()),
        family,
        observables: Observables::Family(pauli_family(&w_signs(n))?),
    })
}

/// Noisy |φ⟩ on three qutrits with spin-1 observables and h = g = (1, -1, -1).
pub fn qutrit_demo() -> Result<Setup> {
    let weights = vec![1.0, -1.0, -1.0];
    Ok(Setup {
        name: "qutrit3".into(),
        family: NoiseFamily::full(qutrit_phi()),
        observables: Observables::Spin {
            two_j: vec![2, 2, 2],
            config: SpinConfig::new(weights.clone(), weights)?,
        },
        provider: BoundProvider::commutator(),
    })
}

/// `w3`, `w4`, ... or `qutrit3`.
pub fn demo(name: &str) -> Result<Setup> {
    if name == "qutrit3" {
        return qutrit_demo();
    }
    match name.strip_prefix('w').and_then(|n| n.parse::<usize>().ok()) {
        Some(n) => w_demo(n),
        None => Err(CliError::Usage(format!(
            "unknown demo `{name}`; expected w3, w4, w5, w6 (or any wN, N >= 3) or qutrit3"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: f64,
    pub f: f64,
    pub f_total: f64,
    pub min_bound: f64,
    pub argmin_partition: String,
}

impl SweepRow {
    fn from_report(q: f64, r: &CriterionReport) -> Self {
        SweepRow {
            q,
            f: r.f,
            f_total: r.f_total,
            min_bound: r.min_bound,
            argmin_partition: r.argmin_partition().partition.to_string(),
        }
    }
}

/// `grid` evenly spaced points across the family's range, ascending.
pub fn sweep(setup: &Setup, grid: usize) -> Result<Vec<SweepRow>> {
    if grid < 2 {
        return Err(CliError::Usage(format!("grid needs at least 2 points, got {grid}")));
    }
    let (lo, hi) = setup.family.range();
    (0..grid)
        .map(|i| {
            // Pin the last point to `hi` exactly.
            let q = if i + 1 == grid {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (grid - 1) as f64
            };
            setup.evaluate(q).map(|r| SweepRow::from_report(q, &r))
        })
        .collect()
}

pub const CSV_HEADER: &str = "q,f,f_total,min_bound,argmin_partition";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            g12(r.q),
            g12(r.f),
            g12(r.f_total),
            g12(r.min_bound),
            r.argmin_partition
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub q_star: f64,
    /// Final bracket, narrower than [`THRESHOLD_TOL`].
    pub bracket: [f64; 2],
    pub iterations: usize,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Bisection for the sign change of f on `[lo, hi]`.
pub fn find_threshold(setup: &Setup, lo: f64, hi: f64) -> Result<ThresholdResult> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Usage(format!("empty bracket [{lo}, {hi}]")));
    }
    let f = |q: f64| setup.evaluate(q).map(|r| r.f);
    let (mut lo, mut hi) = (lo, hi);
    let (mut f_lo, mut f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        return Err(gme_core::Error::NoSignChange { lo, hi, f_lo, f_hi }.into());
    }
    let mut iterations = 0;
    while hi - lo >= THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            f_lo = 0.0;
            f_hi = 0.0;
            iterations += 1;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        q_star: 0.5 * (lo + hi),
        bracket: [lo, hi],
        iterations,
        f_lo,
        f_hi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullsepRow {
    pub n: usize,
    /// `None` when f does not change sign on [0, 1].
    pub q_gme: Option<f64>,
    pub q_fullsep: f64,
}

/// GME detection threshold of each W demo next to the noise level below which
/// the noisy W state is fully separable.
pub fn compare_fullsep(ns: impl IntoIterator<Item = usize>) -> Result<Vec<FullsepRow>> {
    ns.into_iter()
        .map(|n| {
            let setup = w_demo(n)?;
            let q_gme = match find_threshold(&setup, 0.0, 1.0) {
                Ok(t) => Some(t.q_star),
                Err(CliError::Core(gme_core::Error::NoSignChange { .. })) => None,
                Err(e) => return Err(e),
            };
            Ok(FullsepRow {
                n,
                q_gme,
                q_fullsep: fully_separable_threshold(n)?,
            })
        })
        .collect()
}

pub fn fullsep_csv(rows: &[FullsepRow]) -> String {
    let mut out = String::from("n,q_gme,q_fullsep\n");
    for r in rows {
        let q = r.q_gme.map_or_else(|| "none".to_string(), g12);
        writeln!(out, "{},{},{}", r.n, q, g12(r.q_fullsep)).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_patterns() {
        assert_eq!(w_signs(3), vec![[1.0; 3], [1.0; 3], [-1.0, -1.0, 1.0]]);
        let six = w_signs(6);
        assert_eq!(&six[..3], &[[1.0; 3]; 3]);
        assert_eq!(&six[3..], &[[-1.0, -1.0, 1.0]; 3]);
    }

    #[test]
    fn demo_names() {
        assert_eq!(demo("w5").unwrap().name, "w5");
        assert_eq!(demo("qutrit3").unwrap().name, "qutrit3");
        for bad in ["w2", "x3", "w", "qutrit"] {
            assert!(demo(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_grid_endpoints() {
        let rows = sweep(&demo("w3").unwrap(), 3).unwrap();
        let qs: Vec<f64> = rows.iter().map(|r| r.q).collect();
        assert_eq!(qs, [0.0, 0.5, 1.0]);
        for r in &rows {
            assert_eq!(r.f, r.f_total - r.min_bound);
        }
        assert!(sweep(&demo("w3").unwrap(), 1).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(&demo("w3").unwrap(), 3).unwrap();
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("1,-1.77777777"));
        assert!(lines[3].ends_with(",1|23"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn threshold_w3() {
        let t = find_threshold(&demo("w3").unwrap(), 0.0, 1.0).unwrap();
        assert!((t.q_star - 0.51246).abs() < 1e-4);
        assert!(t.bracket[0] < t.q_star && t.q_star < t.bracket[1]);
        assert!(t.bracket[1] - t.bracket[0] < THRESHOLD_TOL);
        assert!(t.f_lo > 0.0 && t.f_hi < 0.0);
    }

    #[test]
    fn threshold_without_sign_change() {
        let err = find_threshold(&demo("w3").unwrap(), 0.0, 0.3).unwrap_err();
        assert!(matches!(err, CliError::Core(gme_core::Error::NoSignChange { .. })));
        assert!(find_threshold(&demo("w3").unwrap(), 0.5, 0.5).is_err());
    }
}
