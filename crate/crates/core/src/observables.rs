//! Per-site observable families and the collective operators built from them.

use crate::error::{Error, Result};
use crate::tensor::{
    c, check_dims, embed, ensure_hermitian, variance, ComplexMatrix, DensityMatrix,
};

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Spin-j angular momentum matrices `(Jx, Jy, Jz)` for `j = two_j / 2`.
///
/// Basis index `a` carries magnetic number `m = j - a`, so `Jz = diag(j, ..., -j)`,
/// and the commutators follow `[Jx, Jy] = i Jz`.
pub fn spin_matrices(two_j: u32) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    if two_j == 0 {
        return Err(Error::InvalidParameter("spin j must be positive".into()));
    }
    let dim = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut raise = ComplexMatrix::zeros(dim, dim);
    let mut jz = ComplexMatrix::zeros(dim, dim);
    for a in 0..dim {
        let m = j - a as f64;
        jz[(a, a)] = c(m, 0.0);
        if a > 0 {
            raise[(a - 1, a)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let lower = raise.adjoint();
    let jx = (&raise + &lower).scale(0.5);
    let jy = (&raise - &lower) * c(0.0, -0.5);
    Ok((jx, jy, jz))
}

/// Ordered per-site observable lists; the k-th entries across sites are summed
/// into the k-th collective observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFamily {
    dims: Vec<usize>,
    per_site: Vec<Vec<ComplexMatrix>>,
}

impl ObservableFamily {
    pub fn new(dims: Vec<usize>, per_site: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        check_dims(&dims)?;
        if per_site.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} observable lists for {} sites",
                per_site.len(),
                dims.len()
            )));
        }
        let count = per_site[0].len();
        if count == 0 {
            return Err(Error::InvalidParameter("family has no observables".into()));
        }
        for (site, ops) in per_site.iter().enumerate() {
            if ops.len() != count {
                return Err(Error::RaggedFamily {
                    site,
                    expected: count,
                    found: ops.len(),
                });
            }
            for op in ops {
                if !op.is_square() || op.nrows() != dims[site] {
                    return Err(Error::DimensionMismatch(format!(
                        "observable on site {site} is {}x{}, site dimension is {}",
                        op.nrows(),
                        op.ncols(),
                        dims[site]
                    )));
                }
                ensure_hermitian(op)?;
            }
        }
        Ok(ObservableFamily { dims, per_site })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    /// Number of observables per site.
    pub fn count(&self) -> usize {
        self.per_site[0].len()
    }

    pub fn site(&self, site: usize) -> &[ComplexMatrix] {
        &self.per_site[site]
    }

    fn check_subset(&self, k: usize, subset: &[usize]) -> Result<()> {
        if k >= self.count() {
            return Err(Error::InvalidParameter(format!(
                "observable index {k} >= family size {}",
                self.count()
            )));
        }
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&site) = subset.iter().find(|&&s| s >= self.n_sites()) {
            return Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            });
        }
        Ok(())
    }

    /// Sum of the k-th observables of `subset`, embedded in the full space.
    pub fn collective_operator(&self, k: usize, subset: &[usize]) -> Result<ComplexMatrix> {
        self.check_subset(k, subset)?;
        let d: usize = self.dims.iter().product();
        let mut total = ComplexMatrix::zeros(d, d);
        for &site in subset {
            total += embed(&self.per_site[site][k], site, &self.dims)?;
        }
        Ok(total)
    }

    /// Sum of the k-th observables of `subset`, acting on the subset's own
    /// space (sites in ascending order), i.e. the operator that pairs with
    /// `rho.partial_trace(subset)`.
    pub fn local_collective(&self, k: usize, subset: &[usize]) -> Result<ComplexMatrix> {
        let sites = sorted_subset(subset);
        self.restrict(&sites)?.collective_operator(k, &(0..sites.len()).collect::<Vec<_>>())
    }

    /// The family seen by the given sites only, in ascending site order.
    pub fn restrict(&self, subset: &[usize]) -> Result<ObservableFamily> {
        self.check_subset(0, subset)?;
        let sites = sorted_subset(subset);
        Ok(ObservableFamily {
            dims: sites.iter().map(|&s| self.dims[s]).collect(),
            per_site: sites.iter().map(|&s| self.per_site[s].clone()).collect(),
        })
    }
}

fn sorted_subset(subset: &[usize]) -> Vec<usize> {
    let mut sites = subset.to_vec();
    sites.sort_unstable();
    sites.dedup();
    sites
}

/// Σ_k Δ²(X_k) for the subset's collective observables, evaluated on the
/// reduction of `rho` to that subset.
pub fn subset_variance_sum(
    family: &ObservableFamily,
    subset: &[usize],
    rho: &DensityMatrix,
) -> Result<f64> {
    check_family_matches(family, rho)?;
    let reduced = rho.partial_trace(subset)?;
    let local = family.restrict(subset)?;
    let all: Vec<usize> = (0..local.n_sites()).collect();
    (0..local.count())
        .map(|k| variance(&local.collective_operator(k, &all)?, &reduced))
        .sum()
}

pub(crate) fn check_family_matches(family: &ObservableFamily, rho: &DensityMatrix) -> Result<()> {
    if family.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(format!(
            "family dims {:?} vs state dims {:?}",
            family.dims(),
            rho.dims()
        )));
    }
    Ok(())
}

/// Per-site `(s1 σx, s2 σy, s3 σz)` triples.
pub fn pauli_family(signs: &[[f64; 3]]) -> Result<ObservableFamily> {
    if signs.is_empty() {
        return Err(Error::InvalidParameter("no sites".into()));
    }
    let paulis = [sigma_x(), sigma_y(), sigma_z()];
    let mut per_site = Vec::with_capacity(signs.len());
    for (site, triple) in signs.iter().enumerate() {
        if triple.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidParameter(format!(
                "site {site}: Pauli signs must be +1 or -1, got {triple:?}"
            )));
        }
        per_site.push(
            paulis
                .iter()
                .zip(triple)
                .map(|(p, &s)| p.scale(s))
                .collect(),
        );
    }
    ObservableFamily::new(vec![2; signs.len()], per_site)
}

/// Weights for the spin observables `u = Σ h_i Jx_i`, `v = Σ g_i Jy_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfig {
    pub h: Vec<f64>,
    pub g: Vec<f64>,
}

impl SpinConfig {
    pub fn new(h: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if h.len() != g.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} h weights vs {} g weights",
                h.len(),
                g.len()
            )));
        }
        if h.iter().chain(&g).any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spin weight".into()));
        }
        Ok(SpinConfig { h, g })
    }

    pub fn n_sites(&self) -> usize {
        self.h.len()
    }
}

/// The k = 2 family with `(h_i Jx, g_i Jy)` on site i.
pub fn spin_family(two_j: &[u32], config: &SpinConfig) -> Result<ObservableFamily> {
    if two_j.len() != config.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} spins vs {} weights",
            two_j.len(),
            config.n_sites()
        )));
    }
    let mut dims = Vec::with_capacity(two_j.len());
    let mut per_site = Vec::with_capacity(two_j.len());
    for (i, &tj) in two_j.iter().enumerate() {
        let (jx, jy, _) = spin_matrices(tj)?;
        dims.push(tj as usize + 1);
        per_site.push(vec![jx.scale(config.h[i]), jy.scale(config.g[i])]);
    }
    ObservableFamily::new(dims, per_site)
}

/// Σ_{i ∈ subset} h_i g_i Jz_i on the subset's own space (ascending sites).
pub(crate) fn local_weighted_jz(
    two_j: &[u32],
    config: &SpinConfig,
    subset: &[usize],
) -> Result<ComplexMatrix> {
    let sites = sorted_subset(subset);
    let dims: Vec<usize> = sites.iter().map(|&s| two_j[s] as usize + 1).collect();
    let d: usize = dims.iter().product();
    let mut total = ComplexMatrix::zeros(d, d);
    for (pos, &site) in sites.iter().enumerate() {
        let (_, _, jz) = spin_matrices(two_j[site])?;
        total += embed(&jz.scale(config.h[site] * config.g[site]), pos, &dims)?;
    }
    Ok(total)
}
