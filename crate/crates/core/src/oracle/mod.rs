//! Exact many-body reference simulator.
//!
//! Works directly on the `2^S` spin Hilbert space of an `S`-site XX chain,
//! without any free-fermion reduction, so its results can be compared
//! against the single-particle formulas in [`crate::fidelity`].

mod gates;
mod hamiltonian;
mod phases;
mod state;
mod transfer;

pub use gates::{apply_collective_dephasing, encode_cnot, total_sz};
pub use hamiltonian::{build_spin_hamiltonian, evolve_state, Evolver, SpinHamiltonian};
pub use phases::{
    effective_swap_check, jw_phase_prediction, PhaseRow, SwapReport, MAX_SWAP_REGISTER,
};
pub use state::{ManyBodyState, OccupationPattern, QubitDensity, Spin, MAX_SITES};
pub use transfer::{
    average_fidelity_bruteforce, channel_fidelity, dephasing_protection_report, pauli_axis_states,
    remaining_subspaces, ChannelInit, DephasingModel, DephasingReport, Encoding, LogicalBasis,
    PairState, Pauli, TargetFrame, TransferExperiment, TransferOutcome,
};
