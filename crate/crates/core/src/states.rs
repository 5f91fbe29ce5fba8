//! State constructors: W states, white-noise mixtures, the three-qutrit
//! example state, and seeded random states.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::partition::Bipartition;
use crate::tensor::{
    c, check_dims, identity, split_index_table, ComplexMatrix, DensityMatrix, TRACE_TOL,
};

const NORM_TOL: f64 = 1e-10;

/// A normalized state vector over subsystems of dimensions `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {:?} (need {total})",
                amplitudes.len(),
                dims
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(dims: Vec<usize>, amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(dims, amplitudes.unscale(norm))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.projector(), self.dims.clone())
    }
}

/// Basis index of the computational product state `digits`.
pub fn basis_index(dims: &[usize], digits: &[usize]) -> usize {
    dims.iter().zip(digits).fold(0, |acc, (&d, &x)| acc * d + x)
}

/// `(|10…0⟩ + |01…0⟩ + … + |0…01⟩) / √n`.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("W state needs n >= 2, got {n}")));
    }
    if n > 24 {
        return Err(Error::InvalidParameter(format!("W state on {n} qubits is too large")));
    }
    let mut amps = DVector::zeros(1 << n);
    let a = 1.0 / (n as f64).sqrt();
    for site in 0..n {
        amps[1 << (n - 1 - site)] = c(a, 0.0);
    }
    PureState::new(vec![2; n], amps)
}

/// `(|012⟩ + |021⟩ + |111⟩) / √3` on three qutrits.
pub fn qutrit_phi() -> PureState {
    let dims = vec![3, 3, 3];
    let mut amps = DVector::zeros(27);
    let a = 1.0 / 3f64.sqrt();
    for digits in [[0, 1, 2], [0, 2, 1], [1, 1, 1]] {
        amps[basis_index(&dims, &digits)] = c(a, 0.0);
    }
    PureState::new(dims, amps).expect("qutrit state is normalized")
}

/// `(1 - q)/D · I + q |ψ⟩⟨ψ|`.
pub fn noisy_mixture(psi: &PureState, q: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("noise parameter {q} outside [0, 1]")));
    }
    let d = psi.amplitudes.len();
    let m = identity(d).scale((1.0 - q) / d as f64) + psi.projector().scale(q);
    Ok(DensityMatrix::from_parts_unchecked(m, psi.dims.clone()))
}

/// A pure target mixed with white noise, parametrized over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFamily {
    target: PureState,
    lo: f64,
    hi: f64,
}

impl NoiseFamily {
    pub fn new(target: PureState, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "noise range [{lo}, {hi}] is not a nonempty subrange of [0, 1]"
            )));
        }
        Ok(NoiseFamily { target, lo, hi })
    }

    pub fn full(target: PureState) -> Self {
        NoiseFamily {
            target,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn member(&self, q: f64) -> Result<DensityMatrix> {
        if q < self.lo || q > self.hi {
            return Err(Error::InvalidParameter(format!(
                "q = {q} outside family range [{}, {}]",
                self.lo, self.hi
            )));
        }
        noisy_mixture(&self.target, q)
    }
}

/// Full-separability bound on q for the noisy n-qubit W state.
pub fn fully_separable_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("threshold needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let pow = 2f64.powi(n as i32);
    Ok(if n <= 5 {
        1.0 / (1.0 + pow * ((nf - 1.0) / (2.0 * nf)).sqrt())
    } else {
        nf / (nf + (nf - 2.0) * pow)
    })
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre_density(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale(tr)
}

fn haar_projector(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    let v = v.unscale(v.norm());
    &v * v.adjoint()
}

/// Full-rank Ginibre state `G G† / tr(G G†)`, deterministic per seed.
pub fn random_density(dims: &[usize], seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dims.iter().product();
    DensityMatrix::from_parts_unchecked(ginibre_density(d, &mut rng), dims.to_vec())
}

/// Haar-random pure state, deterministic per seed.
pub fn random_pure(dims: &[usize], seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = dims.iter().product();
    let v = DVector::from_fn(d, |_, _| gaussian(&mut rng));
    PureState::normalized(dims.to_vec(), v).expect("gaussian vector is nonzero")
}

/// `left ⊗ right` laid out on the sites of `partition`.
pub fn product_across(
    partition: &Bipartition,
    dims: &[usize],
    left: &ComplexMatrix,
    right: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if partition.n_sites() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} sites vs dims {:?}",
            partition.n_sites(),
            dims
        )));
    }
    let (ld, rd, table) = split_index_table(dims, partition.left());
    if left.nrows() != ld || right.nrows() != rd {
        return Err(Error::DimensionMismatch(format!(
            "factor sizes {}/{} do not match blocks {ld}/{rd}",
            left.nrows(),
            right.nrows()
        )));
    }
    let d = ld * rd;
    let mut out = ComplexMatrix::zeros(d, d);
    for a in 0..ld {
        for b in 0..ld {
            let lab = left[(a, b)];
            for t in 0..rd {
                let i = table[a * rd + t];
                for u in 0..rd {
                    out[(i, table[b * rd + u])] = lab * right[(t, u)];
                }
            }
        }
    }
    Ok(out)
}

/// Convex mixture of `terms` random products across `partition`.
///
/// Each factor is a Haar-random pure state of its block, so every term is a
/// pure product state; weights are uniform draws normalized to one.
pub fn random_biseparable(
    dims: &[usize],
    partition: &Bipartition,
    terms: usize,
    seed: u64,
) -> Result<DensityMatrix> {
    check_dims(dims)?;
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ld: usize = partition.left().iter().map(|&s| dims[s]).product();
    let rd: usize = partition.right().iter().map(|&s| dims[s]).product();
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let d = ld * rd;
    let mut out = ComplexMatrix::zeros(d, d);
    for w in weights {
        let left = haar_projector(ld, &mut rng);
        let right = haar_projector(rd, &mut rng);
        out += product_across(partition, dims, &left, &right)?.scale(w / total);
    }
    debug_assert!((out.trace().re - 1.0).abs() < TRACE_TOL);
    Ok(DensityMatrix::from_parts_unchecked(out, dims.to_vec()))
}
