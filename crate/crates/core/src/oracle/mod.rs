//! Exact dense-matrix reference for small baths.
//!
//! The oracle builds the Hamiltonians, propagators and the full joint
//! density matrix explicitly and evaluates every correlation measure from
//! von Neumann entropies. It shares no code path with the closed-form
//! expressions in [`crate::correlations`], which it exists to check.

mod dynamics;
mod entropy;
mod measurement;
mod operator;
mod spectrum;

pub use dynamics::{expm_hermitian, ElectronBranch, Oracle};
pub use entropy::{
    mutual_information_exact, reduce_to_first, reduce_to_second, von_neumann_entropy, Bipartition,
    NEGATIVE_EIGENVALUE_TOL,
};
pub use measurement::{
    discord_of_state, golden_section_max, maximize_in_plane, maximize_on_sphere, projected_state,
    DiscordOptions, DiscordResult, MeasurementAxis, ProjectedInformation, SphereGrid,
};
pub use operator::{
    lowering, raising, spin_half, spin_operator, Axis, CMatrix, DenseOperator, Role, OPERATOR_TOL,
};
pub use spectrum::{eigenphase_spectrum, wrap_phase, PhaseSpectrum};
