//! Detection of genuine multipartite entanglement with local sum uncertainty
//! relations.
//!
//! Subsystems are ordered with site 0 as the most significant tensor factor.
//! Dense matrices throughout; the intended sizes are a few qubits or qutrits.

pub mod bounds;
pub mod criteria;
pub mod error;
pub mod io;
pub mod observables;
pub mod partition;
pub mod states;
pub mod tensor;

pub use bounds::{bound_for, BoundProvider, BoundStrategy, ConstantBounds, SubsetBound};
pub use criteria::{
    full_separability_tripartite, gme_criterion, lur_bipartite, spin_gme_criterion, CriterionReport,
    PartitionBound, Verdict,
};
pub use error::{Error, Result};
pub use observables::{ObservableFamily, SpinConfig};
pub use partition::{enumerate_bipartitions, Bipartition};
pub use states::{NoiseFamily, PureState};
pub use tensor::{ComplexMatrix, DensityMatrix};
