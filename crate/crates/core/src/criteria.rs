//! Entanglement criteria built on local sum uncertainty relations.
//!
//! For a bipartition `S_r | S_s` the collective observables split as
//! `X_k = X_k^r + X_k^s`. With `V` the subset variance sums on the reductions
//! and `U` their lower bounds, a state separable across the cut obeys
//!
//! ```text
//! Σ_k Δ²X_k ≥ U_r + U_s + (√(V_r − U_r) − √(V_s − U_s))²
//! ```
//!
//! and a biseparable state obeys the minimum of these right-hand sides over
//! all cuts. A violation of the minimum certifies genuine multipartite
//! entanglement; the test is sufficient only.

use serde::Serialize;

use crate::bounds::{bound_for, BoundProvider, Provenance};
use crate::error::{Error, Result};
use crate::observables::{
    check_family_matches, local_weighted_jz, spin_family, subset_variance_sum, ObservableFamily,
    SpinConfig,
};
pub use crate::partition::{enumerate_bipartitions, Bipartition};
use crate::tensor::{expectation, variance, DensityMatrix};

/// A violation must exceed this margin before it counts.
pub const VERDICT_TOL: f64 = 1e-9;
/// Negative radicands down to this value are treated as rounding noise.
pub const RADICAND_TOL: f64 = 1e-9;

type SubsetBoundFn<'a> = dyn FnMut(&[usize]) -> Result<(f64, Provenance)> + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Detected,
    Inconclusive,
}

impl Verdict {
    fn from_margin(f: f64) -> Self {
        if f < -VERDICT_TOL {
            Verdict::Detected
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionBound {
    pub partition: Bipartition,
    pub u_left: f64,
    pub u_right: f64,
    pub v_left: f64,
    pub v_right: f64,
    pub w: f64,
    pub total: f64,
    pub provenance_left: Provenance,
    pub provenance_right: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub criterion: &'static str,
    pub f_total: f64,
    pub partition_bounds: Vec<PartitionBound>,
    pub min_bound: f64,
    /// Index into `partition_bounds` of the minimizing cut (first on ties).
    pub argmin: usize,
    pub f: f64,
    pub verdict: Verdict,
}

impl CriterionReport {
    pub fn argmin_partition(&self) -> &PartitionBound {
        &self.partition_bounds[self.argmin]
    }

    fn assemble(criterion: &'static str, f_total: f64, partition_bounds: Vec<PartitionBound>) -> Self {
        let (argmin, min_bound) = partition_bounds
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, pb)| {
                if pb.total < best.1 {
                    (i, pb.total)
                } else {
                    best
                }
            });
        let f = f_total - min_bound;
        CriterionReport {
            criterion,
            f_total,
            partition_bounds,
            min_bound,
            argmin,
            f,
            verdict: Verdict::from_margin(f),
        }
    }
}

/// `√max(v - u, 0)`, erroring when the bound overshoots by more than noise.
fn checked_root(v: f64, u: f64, subset: &[usize]) -> Result<f64> {
    let radicand = v - u;
    if radicand < -RADICAND_TOL {
        return Err(Error::UnsoundBound {
            subset: subset.to_vec(),
            radicand,
        });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Σ_k Δ²(Σ_i O_{i,k}) over all sites of the full state.
pub fn f_total(rho: &DensityMatrix, family: &ObservableFamily) -> Result<f64> {
    check_family_matches(family, rho)?;
    let all: Vec<usize> = (0..family.n_sites()).collect();
    (0..family.count())
        .map(|k| variance(&family.collective_operator(k, &all)?, rho))
        .sum()
}

fn build_partition_bound(
    rho: &DensityMatrix,
    family: &ObservableFamily,
    partition: &Bipartition,
    bound: &mut SubsetBoundFn<'_>,
) -> Result<PartitionBound> {
    if partition.n_sites() != family.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} sites for a {}-site family",
            partition.n_sites(),
            family.n_sites()
        )));
    }
    let (u_left, provenance_left) = bound(partition.left())?;
    let (u_right, provenance_right) = bound(partition.right())?;
    let v_left = subset_variance_sum(family, partition.left(), rho)?;
    let v_right = subset_variance_sum(family, partition.right(), rho)?;
    let w = checked_root(v_left, u_left, partition.left())?
        - checked_root(v_right, u_right, partition.right())?;
    Ok(PartitionBound {
        partition: partition.clone(),
        u_left,
        u_right,
        v_left,
        v_right,
        w,
        total: u_left + u_right + w * w,
        provenance_left,
        provenance_right,
    })
}

/// `U_r + U_s + W²` for one cut.
pub fn partition_bound(
    rho: &DensityMatrix,
    family: &ObservableFamily,
    partition: &Bipartition,
    provider: &BoundProvider,
) -> Result<PartitionBound> {
    check_family_matches(family, rho)?;
    build_partition_bound(rho, family, partition, &mut |subset| {
        let b = bound_for(provider, family, subset, rho)?;
        Ok((b.value, b.provenance))
    })
}

/// Genuine multipartite entanglement test: `F` against the minimum bound over
/// every bipartition. The three-party case is the `n = 3` instance.
pub fn gme_criterion(
    rho: &DensityMatrix,
    family: &ObservableFamily,
    provider: &BoundProvider,
) -> Result<CriterionReport> {
    check_family_matches(family, rho)?;
    let f = f_total(rho, family)?;
    let bounds = enumerate_bipartitions(family.n_sites())?
        .iter()
        .map(|p| partition_bound(rho, family, p, provider))
        .collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport::assemble("gme", f, bounds))
}

/// The spin-observable form: `u = Σ h_i Jx_i`, `v = Σ g_i Jy_i`, with each
/// block bounded by `|Σ_{i∈S} h_i g_i ⟨Jz_i⟩|` on the reduction of `rho`.
pub fn spin_gme_criterion(
    rho: &DensityMatrix,
    two_j: &[u32],
    config: &SpinConfig,
) -> Result<CriterionReport> {
    if two_j.len() < 2 {
        return Err(Error::InvalidParameter("spin criterion needs at least 2 sites".into()));
    }
    let family = spin_family(two_j, config)?;
    check_family_matches(&family, rho)?;
    let f = f_total(rho, &family)?;
    let mut spin_bound = |subset: &[usize]| -> Result<(f64, Provenance)> {
        let jz = local_weighted_jz(two_j, config, subset)?;
        let reduced = rho.partial_trace(subset)?;
        Ok((
            expectation(&jz, &reduced)?.abs(),
            Provenance {
                strategy: "spin-jz",
                argmin_q: None,
            },
        ))
    };
    let bounds = enumerate_bipartitions(two_j.len())?
        .iter()
        .map(|p| build_partition_bound(rho, &family, p, &mut spin_bound))
        .collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport::assemble("spin-gme", f, bounds))
}

/// Two-party criterion: `Σ_k Δ²(A_k + B_k) − (U_A + U_B + M²)`; negative values
/// certify entanglement.
pub fn lur_bipartite(
    rho_ab: &DensityMatrix,
    family: &ObservableFamily,
    u_a: f64,
    u_b: f64,
) -> Result<f64> {
    if rho_ab.n_sites() != 2 {
        return Err(Error::InvalidParameter(format!(
            "bipartite criterion needs 2 subsystems, got {}",
            rho_ab.n_sites()
        )));
    }
    check_family_matches(family, rho_ab)?;
    let total = f_total(rho_ab, family)?;
    let v_a = subset_variance_sum(family, &[0], rho_ab)?;
    let v_b = subset_variance_sum(family, &[1], rho_ab)?;
    let m = checked_root(v_a, u_a, &[0])? - checked_root(v_b, u_b, &[1])?;
    Ok(total - (u_a + u_b + m * m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeparabilityVerdict {
    NotFullySeparable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityValue {
    pub label: String,
    pub value: f64,
    /// The √F^{XY} term was dropped because F^{XY} < 0.
    pub m_term_skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullSeparabilityReport {
    /// `F^{AB}`, `F^{AC}`, `F^{BC}`, then `F^{AB|C}`, `F^{AC|B}`, `F^{BC|A}`.
    pub values: Vec<InequalityValue>,
    pub verdict: SeparabilityVerdict,
}

/// The six three-party full-separability inequalities. Single-site bounds come
/// from `provider`.
pub fn full_separability_tripartite(
    rho: &DensityMatrix,
    family: &ObservableFamily,
    provider: &BoundProvider,
) -> Result<FullSeparabilityReport> {
    if rho.n_sites() != 3 {
        return Err(Error::InvalidParameter(format!(
            "tripartite criterion needs 3 subsystems, got {}",
            rho.n_sites()
        )));
    }
    check_family_matches(family, rho)?;
    const NAMES: [char; 3] = ['A', 'B', 'C'];
    let u: Vec<f64> = (0..3)
        .map(|s| bound_for(provider, family, &[s], rho).map(|b| b.value))
        .collect::<Result<_>>()?;
    let roots: Vec<f64> = (0..3)
        .map(|s| checked_root(subset_variance_sum(family, &[s], rho)?, u[s], &[s]))
        .collect::<Result<_>>()?;
    let total = f_total(rho, family)?;
    let u_sum: f64 = u.iter().sum();

    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let mut pairwise = Vec::with_capacity(3);
    let mut values = Vec::with_capacity(6);
    for &(x, y, _) in &pairs {
        let reduced = rho.partial_trace(&[x, y])?;
        let f_xy = lur_bipartite(&reduced, &family.restrict(&[x, y])?, u[x], u[y])?;
        pairwise.push(f_xy);
        values.push(InequalityValue {
            label: format!("{}{}", NAMES[x], NAMES[y]),
            value: f_xy,
            m_term_skipped: false,
        });
    }
    for (&(x, y, z), &f_xy) in pairs.iter().zip(&pairwise) {
        let m_xy = roots[x] - roots[y];
        let skipped = f_xy < -VERDICT_TOL;
        let m_xyz = if skipped { 0.0 } else { f_xy.max(0.0).sqrt() - roots[z] };
        values.push(InequalityValue {
            label: format!("{}{}|{}", NAMES[x], NAMES[y], NAMES[z]),
            value: total - (u_sum + m_xy * m_xy + m_xyz * m_xyz),
            m_term_skipped: skipped,
        });
    }
    let verdict = if values.iter().any(|v| v.value < -VERDICT_TOL) {
        SeparabilityVerdict::NotFullySeparable
    } else {
        SeparabilityVerdict::Inconclusive
    };
    Ok(FullSeparabilityReport { values, verdict })
}
