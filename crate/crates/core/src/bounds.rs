//! Lower bounds `U` on subset variance sums.
//!
//! Every criterion compares a measured variance sum against these bounds, and
//! none of the strategies below is universally sound: `Zero` and
//! `CommutatorAtState` are guaranteed lower bounds at the evaluated state,
//! `Constant` is only as good as the numbers supplied, and the family/reference
//! strategies are calibrations against a chosen state family.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::observables::{check_family_matches, ObservableFamily};
use crate::states::{NoiseFamily, PureState};
use crate::tensor::{
    c, commutator, ensure_hermitian, expectation, trace_of_product, variance, ComplexMatrix,
    DensityMatrix,
};

/// Default number of grid points for [`BoundStrategy::FamilyMinimum`].
pub const DEFAULT_GRID: usize = 1001;

/// Per-subset constants with a fallback for unlisted subsets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantBounds {
    pub default: f64,
    pub values: BTreeMap<Vec<usize>, f64>,
}

impl ConstantBounds {
    pub fn new(default: f64, values: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        if default < 0.0 || !default.is_finite() || values.values().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("constant bounds must be finite and >= 0".into()));
        }
        let values = values
            .into_iter()
            .map(|(mut k, v)| {
                k.sort_unstable();
                (k, v)
            })
            .collect();
        Ok(ConstantBounds { default, values })
    }

    /// `single` for one-site subsets, `default` elsewhere.
    pub fn per_site(single: f64, default: f64, n_sites: usize) -> Result<Self> {
        Self::new(default, (0..n_sites).map(|s| (vec![s], single)).collect())
    }

    fn lookup(&self, subset: &[usize]) -> f64 {
        self.values.get(subset).copied().unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundStrategy {
    Zero,
    Constant(ConstantBounds),
    /// `|tr(ρ_S · (-i)[X₁, X₂])|` on the context reduction; k = 2 families only.
    CommutatorAtState,
    /// Minimum of the subset variance sum over the noise family.
    FamilyMinimum { family: NoiseFamily, grid: usize },
    /// Subset variance sum on the reference state's reduction.
    ReferenceState(PureState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundProvider {
    strategy: BoundStrategy,
    overrides: BTreeMap<Vec<usize>, f64>,
}

impl BoundProvider {
    pub fn new(strategy: BoundStrategy) -> Result<Self> {
        if let BoundStrategy::FamilyMinimum { grid, .. } = &strategy {
            if *grid < 2 {
                return Err(Error::InvalidParameter(format!(
                    "family grid needs at least 2 points, got {grid}"
                )));
            }
        }
        Ok(BoundProvider {
            strategy,
            overrides: BTreeMap::new(),
        })
    }

    pub fn zero() -> Self {
        BoundProvider {
            strategy: BoundStrategy::Zero,
            overrides: BTreeMap::new(),
        }
    }

    pub fn commutator() -> Self {
        BoundProvider {
            strategy: BoundStrategy::CommutatorAtState,
            overrides: BTreeMap::new(),
        }
    }

    pub fn constant(bounds: ConstantBounds) -> Self {
        BoundProvider {
            strategy: BoundStrategy::Constant(bounds),
            overrides: BTreeMap::new(),
        }
    }

    pub fn family_minimum(family: NoiseFamily) -> Self {
        BoundProvider {
            strategy: BoundStrategy::FamilyMinimum {
                family,
                grid: DEFAULT_GRID,
            },
            overrides: BTreeMap::new(),
        }
    }

    pub fn reference(target: PureState) -> Self {
        BoundProvider {
            strategy: BoundStrategy::ReferenceState(target),
            overrides: BTreeMap::new(),
        }
    }

    /// Pins the bound for one subset regardless of strategy.
    pub fn with_override(mut self, subset: &[usize], value: f64) -> Result<Self> {
        if value < 0.0 || !value.is_finite() {
            return Err(Error::InvalidParameter(format!("override {value} must be >= 0")));
        }
        let mut key = subset.to_vec();
        key.sort_unstable();
        self.overrides.insert(key, value);
        Ok(self)
    }

    pub fn strategy(&self) -> &BoundStrategy {
        &self.strategy
    }

    /// True when the bound cannot exceed the subset variance sum at the
    /// evaluated state.
    pub fn is_state_sound(&self) -> bool {
        self.overrides.is_empty()
            && matches!(self.strategy, BoundStrategy::Zero | BoundStrategy::CommutatorAtState)
    }

    pub fn tag(&self) -> &'static str {
        match self.strategy {
            BoundStrategy::Zero => "zero",
            BoundStrategy::Constant(_) => "constant",
            BoundStrategy::CommutatorAtState => "commutator",
            BoundStrategy::FamilyMinimum { .. } => "family-min",
            BoundStrategy::ReferenceState(_) => "reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub strategy: &'static str,
    /// Family parameter where the minimum was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin_q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetBound {
    pub subset: Vec<usize>,
    pub value: f64,
    pub provenance: Provenance,
}

fn check_subset(family: &ObservableFamily, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&site) = sorted.iter().find(|&&s| s >= family.n_sites()) {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: family.n_sites(),
        });
    }
    Ok(sorted)
}

fn local_ops(family: &ObservableFamily, subset: &[usize]) -> Result<Vec<ComplexMatrix>> {
    (0..family.count())
        .map(|k| family.local_collective(k, subset))
        .collect()
}

/// The lower bound `U` on Σ_k Δ²(X_k) for the collective observables of `subset`.
pub fn bound_for(
    provider: &BoundProvider,
    family: &ObservableFamily,
    subset: &[usize],
    context: &DensityMatrix,
) -> Result<SubsetBound> {
    let subset = check_subset(family, subset)?;
    check_family_matches(family, context)?;
    let done = |value: f64, strategy, argmin_q| {
        Ok(SubsetBound {
            subset: subset.clone(),
            value: value.max(0.0),
            provenance: Provenance { strategy, argmin_q },
        })
    };
    if let Some(&v) = provider.overrides.get(&subset) {
        return done(v, "override", None);
    }
    match &provider.strategy {
        BoundStrategy::Zero => done(0.0, "zero", None),
        BoundStrategy::Constant(values) => done(values.lookup(&subset), "constant", None),
        BoundStrategy::CommutatorAtState => {
            if family.count() != 2 {
                return Err(Error::CommutatorNeedsPair(family.count()));
            }
            let ops = local_ops(family, &subset)?;
            let reduced = context.partial_trace(&subset)?;
            done(commutator_bound(&ops[0], &ops[1], &reduced)?, "commutator", None)
        }
        BoundStrategy::ReferenceState(target) => {
            if target.dims() != family.dims() {
                return Err(Error::DimensionMismatch(format!(
                    "reference dims {:?} vs family dims {:?}",
                    target.dims(),
                    family.dims()
                )));
            }
            let ops = local_ops(family, &subset)?;
            let reduced = target.density().partial_trace(&subset)?;
            let v = ops.iter().map(|x| variance(x, &reduced)).sum::<Result<f64>>()?;
            done(v, "reference", None)
        }
        BoundStrategy::FamilyMinimum { family: noise, grid } => {
            let curve = FamilyCurve::new(family, &subset, noise)?;
            let (q, v) = curve.minimize(*grid);
            done(v, "family-min", Some(q))
        }
    }
}

/// The subset variance sum along a white-noise family. Every moment is affine
/// in q, so the curve is captured by the two endpoint reductions.
struct FamilyCurve {
    /// Per observable: (⟨X⟩, ⟨X²⟩) at q = 0 and q = 1.
    moments: Vec<[(f64, f64); 2]>,
    lo: f64,
    hi: f64,
}

impl FamilyCurve {
    fn new(family: &ObservableFamily, subset: &[usize], noise: &NoiseFamily) -> Result<Self> {
        if noise.target().dims() != family.dims() {
            return Err(Error::DimensionMismatch(format!(
                "noise family dims {:?} vs observable dims {:?}",
                noise.target().dims(),
                family.dims()
            )));
        }
        let pure = noise.target().density().partial_trace(subset)?;
        let mixed = DensityMatrix::maximally_mixed(pure.dims())?;
        let moments = local_ops(family, subset)?
            .iter()
            .map(|x| {
                let sq = x * x;
                let at = |rho: &DensityMatrix| -> Result<(f64, f64)> {
                    Ok((expectation(x, rho)?, trace_of_product(&sq, rho.matrix()).re))
                };
                Ok([at(&mixed)?, at(&pure)?])
            })
            .collect::<Result<Vec<_>>>()?;
        let (lo, hi) = noise.range();
        Ok(FamilyCurve { moments, lo, hi })
    }

    fn eval(&self, q: f64) -> f64 {
        self.moments
            .iter()
            .map(|[(m0, s0), (m1, s1)]| {
                let mean = (1.0 - q) * m0 + q * m1;
                let second = (1.0 - q) * s0 + q * s1;
                second - mean * mean
            })
            .sum()
    }

    /// Uniform grid, then one golden-section pass on the bracketing cells.
    fn minimize(&self, grid: usize) -> (f64, f64) {
        let step = (self.hi - self.lo) / (grid - 1) as f64;
        let at = |i: usize| self.lo + step * i as f64;
        let (mut best_i, mut best_v) = (0, f64::INFINITY);
        for i in 0..grid {
            let v = self.eval(at(i));
            if v < best_v {
                best_i = i;
                best_v = v;
            }
        }
        let mut a = at(best_i.saturating_sub(1));
        let mut b = at((best_i + 1).min(grid - 1));
        let mut best = (at(best_i), best_v);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (self.eval(x1), self.eval(x2));
        for _ in 0..80 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = self.eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = self.eval(x2);
            }
        }
        for (q, v) in [(x1, f1), (x2, f2)] {
            if v < best.1 {
                best = (q, v);
            }
        }
        best
    }
}

/// `|tr(ρ · (-i)[x, y])|`, the state-dependent part of Δ²x + Δ²y ≥ |⟨[x, y]⟩|.
pub fn commutator_bound(x: &ComplexMatrix, y: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    ensure_hermitian(x)?;
    ensure_hermitian(y)?;
    let generator = commutator(x, y) * c(0.0, -1.0);
    Ok(expectation(&generator, rho)?.abs())
}

/// Result of a heuristic minimization: the true minimum is at most `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperEstimate {
    pub value: f64,
    pub restarts: usize,
}

/// Estimates min over states of Σ_k Δ²(ops[k]) by projected gradient descent
/// on the unit sphere from `restarts` random starts.
///
/// The variance sum is concave in ρ, so its minimum is attained on pure
/// states. Descent can stall in local minima, so the returned value is an
/// upper estimate of the minimum, not a certified lower bound.
pub fn min_variance_sum(
    ops: &[ComplexMatrix],
    dim: usize,
    restarts: usize,
    seed: u64,
) -> Result<UpperEstimate> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    for op in ops {
        if op.nrows() != dim || !op.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {dim}x{dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        ensure_hermitian(op)?;
    }
    let squares: Vec<ComplexMatrix> = ops.iter().map(|x| x * x).collect();
    let objective = |psi: &DVector<Complex64>| -> f64 {
        ops.iter()
            .zip(&squares)
            .map(|(x, x2)| {
                let mean = psi.dotc(&(x * psi)).re;
                psi.dotc(&(x2 * psi)).re - mean * mean
            })
            .sum()
    };
    // d f / d ψ* for f = Σ ⟨X²⟩ - ⟨X⟩².
    let gradient = |psi: &DVector<Complex64>| -> DVector<Complex64> {
        let mut g = DVector::zeros(dim);
        for (x, x2) in ops.iter().zip(&squares) {
            let xpsi = x * psi;
            let mean = psi.dotc(&xpsi).re;
            g += x2 * psi - xpsi.scale(2.0 * mean);
        }
        g
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let start = DVector::from_fn(dim, |_, _| {
            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let mut psi = start.unscale(start.norm());
        let mut value = objective(&psi);
        let mut step = 0.5;
        for _ in 0..5000 {
            let g = gradient(&psi);
            let tangent = &g - &psi * psi.dotc(&g);
            let slope = tangent.norm_squared();
            if slope < 1e-24 {
                break;
            }
            let mut accepted = false;
            while step > 1e-12 {
                let trial = &psi - tangent.scale(step);
                let trial = trial.unscale(trial.norm());
                let tv = objective(&trial);
                if tv <= value - 1e-4 * step * slope {
                    psi = trial;
                    value = tv;
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        best = best.min(value);
    }
    Ok(UpperEstimate {
        value: best.max(0.0),
        restarts,
    })
}
