//! Protected quantum state transfer through an XX spin chain.
//!
//! Two `n`-qubit registers `L` and `R` are weakly coupled (`g_I`) to the ends
//! of an odd-length XX channel (`g_C`). In the weak-coupling regime only the
//! zero-energy channel mode participates and the register couplings are tuned
//! so that the effective single-particle matrix is `g0 * J_x`; after
//! `tau = pi / g0` the two registers are mirror-swapped.
//!
//! The crate is organised as:
//!
//! - [`model`]: chain geometry, derived couplings, full and effective
//!   single-particle coupling matrices.
//! - [`propagator`]: symmetric tridiagonal eigensolver, `Delta(t) = exp(-i Omega t)`,
//!   closed-form register elements and the mirror-inversion check.
//! - [`fidelity`]: average transfer fidelity of the two-qubit encodings from
//!   propagator elements, and parameter sweeps over `g_I / g_C`.
//! - [`oracle`]: exact many-body state-vector simulator used to validate the
//!   free-fermion formulas, the swap phases and dephasing protection.
//! - [`verify`]: the aggregated verification checks used by the CLI and the
//!   acceptance suite.
//!
//! Site ordering is fixed crate-wide as `[L1..Ln, c1..cN, Rn..R1]` (full model)
//! or `[L1..Ln, kappa, Rn..R1]` (effective model).

pub mod error;
pub mod fidelity;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod propagator;
pub mod verify;

pub use error::{QstError, Result};
pub use fidelity::{
    f_dfs, f_ndfs, pauli_transfer_terms, sweep_fidelity, Disorder, FormulaEncoding,
    RegisterElements, SweepRequest, SweepResult, SweepRow, TimeChoice,
};
pub use model::{ChainSpec, CouplingMatrix, MatrixKind, SiteLabel};
pub use propagator::{
    closed_form_effective_elements, eigendecompose, mirror_inversion_report, propagator_at,
    MirrorReport, Propagator, SpectralDecomposition,
};
pub use verify::{run_verification, CheckResult, VerifyOptions, VerifyReport};
