//! Fermionic sign bookkeeping of the mirror swap at `tau`.

use serde::Serialize;

use crate::error::{QstError, Result};
use crate::model::{ChainSpec, MatrixKind};

use super::hamiltonian::build_spin_hamiltonian;
use super::state::{ManyBodyState, OccupationPattern};

fn parity(exponent: usize) -> i32 {
    if exponent.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign `Gamma0 * Gamma1 * Gamma2` picked up by an effective-chain basis state
/// under the swap at `tau`.
///
/// `Gamma0` collects `(-1)^n` per particle. `Gamma1` and `Gamma2` count the
/// anticommutation exchanges of each occupied left (right) register mode with
/// the modes that follow it.
pub fn jw_phase_prediction(p: &OccupationPattern, n: usize) -> Result<i32> {
    if p.left.len() != n || p.right.len() != n {
        return Err(QstError::InvalidArgument(format!(
            "pattern has registers of size {}/{}, expected {n}",
            p.left.len(),
            p.right.len()
        )));
    }
    let occ = |b: bool| usize::from(b);
    let (nl, nr, nk) = (&p.left, &p.right, occ(p.zero_mode));

    let mut gamma0 = parity(n * nk);
    for v in 0..n {
        gamma0 *= parity(n * (occ(nl[v]) + occ(nr[v])));
    }

    let mut gamma1 = 1;
    let mut gamma2 = 1;
    for x in 2..=n + 1 {
        let l = occ(nl[x - 2]);
        let r = occ(nr[x - 2]);
        for v in x..=n {
            gamma1 *= parity(l * occ(nl[v - 1]));
            gamma2 *= parity(r * occ(nr[v - 1]));
        }
        for v in 1..=n {
            gamma1 *= parity(l * occ(nr[v - 1]));
        }
        gamma1 *= parity(l * nk);
        gamma2 *= parity(r * nk);
    }
    Ok(gamma0 * gamma1 * gamma2)
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseRow {
    pub pattern: OccupationPattern,
    pub predicted: i32,
    pub measured: i32,
    pub amplitude_error: f64,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapReport {
    pub register_size: usize,
    pub rows: Vec<PhaseRow>,
    pub max_amplitude_error: f64,
    pub tolerance: f64,
}

impl SwapReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

/// Largest register size the swap check enumerates.
pub const MAX_SWAP_REGISTER: usize = 3;

/// Evolves every basis state of the effective chain for `tau` and compares
/// with the predicted signed swap `L_u <-> R_u`.
///
/// The effective chain only depends on `g0`; it is taken from the spec
/// `(n, N = 1, g_C = 1, g_I = 1)`.
pub fn effective_swap_check(n: usize, tolerance: f64) -> Result<SwapReport> {
    if n == 0 || n > MAX_SWAP_REGISTER {
        return Err(QstError::InvalidArgument(format!(
            "swap check supports 1..={MAX_SWAP_REGISTER} register qubits, got {n}"
        )));
    }
    let spec = ChainSpec::new(n, 1, 1.0, 1.0)?;
    let evolver = build_spin_hamiltonian(&spec, MatrixKind::Effective)?.diagonalize()?;
    let sites = spec.effective_sites();
    let tau = spec.transfer_time();

    let mut rows = Vec::with_capacity(1 << sites);
    let mut max_amplitude_error = 0.0f64;
    for config in 0..1usize << sites {
        let pattern = OccupationPattern::from_config(n, config);
        let predicted = jw_phase_prediction(&pattern, n)?;
        let target = pattern.swapped().to_config();
        let out = evolver.evolve(&ManyBodyState::basis(sites, config)?, tau)?;
        let error = out
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let expected = if k == target { predicted as f64 } else { 0.0 };
                (a - expected).norm()
            })
            .fold(0.0, f64::max);
        let measured = if out.amplitude(target).re >= 0.0 {
            1
        } else {
            -1
        };
        max_amplitude_error = max_amplitude_error.max(error);
        rows.push(PhaseRow {
            pattern,
            predicted,
            measured,
            amplitude_error: error,
            matches: measured == predicted && error <= tolerance,
        });
    }
    Ok(SwapReport {
        register_size: n,
        rows,
        max_amplitude_error,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reversing a product of `m` fermion operators costs `(-1)^(m(m-1)/2)`,
    /// and each operator carries `(-1)^n` from the mirror map.
    fn reversal_sign(n: usize, m: usize) -> i32 {
        parity(n * m + m * (m.saturating_sub(1)) / 2)
    }

    #[test]
    fn vacuum_and_even_register() {
        let vac = OccupationPattern::from_config(2, 0);
        assert_eq!(jw_phase_prediction(&vac, 2).unwrap(), 1);
        let single = OccupationPattern {
            left: vec![true, false],
            zero_mode: false,
            right: vec![false, false],
        };
        assert_eq!(jw_phase_prediction(&single, 2).unwrap(), 1);
        assert!(jw_phase_prediction(&single, 3).is_err());
    }

    #[test]
    fn gamma0_trivial_for_even_n() {
        // with even n only Gamma1 Gamma2 remain, which equal the reversal sign
        for config in 0..32 {
            let p = OccupationPattern::from_config(2, config);
            let m = p.total();
            assert_eq!(
                jw_phase_prediction(&p, 2).unwrap(),
                parity(m * (m.saturating_sub(1)) / 2)
            );
        }
    }

    #[test]
    fn prediction_matches_reversal_sign() {
        for n in 1..=4 {
            for config in 0..1usize << (2 * n + 1) {
                let p = OccupationPattern::from_config(n, config);
                assert_eq!(
                    jw_phase_prediction(&p, n).unwrap(),
                    reversal_sign(n, p.total()),
                    "{p}"
                );
            }
        }
    }

    #[test]
    fn single_excitation_n1_lands_with_minus_sign() {
        let report = effective_swap_check(1, 1e-8).unwrap();
        let row = report
            .rows
            .iter()
            .find(|r| r.pattern.to_config() == 0b001)
            .unwrap();
        assert_eq!(row.predicted, -1);
        assert_eq!(row.measured, -1);
        assert!(row.matches);
        let vac = &report.rows[0];
        assert_eq!((vac.predicted, vac.measured), (1, 1));
        assert!(report.all_match());
    }

    #[test]
    fn swap_check_n2_all_rows() {
        let report = effective_swap_check(2, 1e-8).unwrap();
        assert_eq!(report.rows.len(), 32);
        assert!(report.all_match(), "max err {}", report.max_amplitude_error);
        assert!(effective_swap_check(4, 1e-8).is_err());
        assert!(effective_swap_check(0, 1e-8).is_err());
    }
}
