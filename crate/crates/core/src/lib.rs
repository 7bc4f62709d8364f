//! Information lattices of free-fermion quenches.

pub mod covariance;
pub mod entropy;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod hamiltonian;
pub mod io;
pub mod lattice;
pub mod majorana;
pub mod oracle;
pub mod partition;
pub mod protocols;
pub mod skew;
pub mod validation;

pub use covariance::{ground_state, CovarianceMatrix, DegeneracyPolicy, GroundStateOptions};
pub use error::{Error, Result};
pub use evolution::{evolve, Evolver};
pub use hamiltonian::{CouplingMatrix, HamiltonianTerm};
pub use majorana::{SiteIndexing, Species};
pub use lattice::{local_information, InformationLattice, IntervalProbe, LatticeCoord};
pub use partition::{classify, PartitionLabel, RegionSpec};
pub use fit::{fit_gaussian_decay, fit_power_law, FitModel, FitResult};
pub use protocols::{run, Protocol, QuenchConfig, RunResult};
