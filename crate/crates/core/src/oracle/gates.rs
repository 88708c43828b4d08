use num_complex::Complex64;

use crate::error::{QstError, Result};

use super::state::ManyBodyState;

/// Total `sum_i sigma^z_i` of a basis configuration.
pub fn total_sz(config: usize, sites: usize) -> i32 {
    2 * config.count_ones() as i32 - sites as i32
}

/// CNOT as a basis permutation: flips `target` wherever `control` is up.
pub fn encode_cnot(psi: &ManyBodyState, control: usize, target: usize) -> Result<ManyBodyState> {
    let sites = psi.sites();
    if control == target || control >= sites || target >= sites {
        return Err(QstError::InvalidArgument(format!(
            "CNOT needs distinct sites below {sites}, got control {control}, target {target}"
        )));
    }
    let (c, t) = (1usize << control, 1usize << target);
    let mut out = psi.amplitudes().to_vec();
    for config in 0..out.len() {
        if config & c != 0 && config & t == 0 {
            out.swap(config, config | t);
        }
    }
    Ok(ManyBodyState::from_raw(sites, out))
}

/// Multiplies each basis amplitude by `exp(-i lambda s_z t)`, with `s_z` the
/// total spin projection over all sites.
pub fn apply_collective_dephasing(psi: &ManyBodyState, lambda: f64, t: f64) -> ManyBodyState {
    let sites = psi.sites();
    if lambda == 0.0 || t == 0.0 {
        return psi.clone();
    }
    // one phase per excitation number
    let phases: Vec<Complex64> = (0..=sites)
        .map(|k| Complex64::from_polar(1.0, -lambda * t * (2 * k as i32 - sites as i32) as f64))
        .collect();
    let out = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(config, &a)| a * phases[config.count_ones() as usize])
        .collect();
    ManyBodyState::from_raw(sites, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cnot_truth_table() {
        // site 0 control, site 1 target
        for (input, output) in [(0b00, 0b00), (0b01, 0b11), (0b10, 0b10), (0b11, 0b01)] {
            let psi = ManyBodyState::basis(2, input).unwrap();
            let out = encode_cnot(&psi, 0, 1).unwrap();
            assert_eq!(out.amplitude(output), c(1.0, 0.0), "{input:#b}");
        }
    }

    #[test]
    fn cnot_copies_control_superposition() {
        let (b0, b1) = (c(0.6, 0.0), c(0.0, 0.8));
        let psi = ManyBodyState::from_terms(2, &[(0b00, b0), (0b01, b1)]).unwrap();
        let out = encode_cnot(&psi, 0, 1).unwrap();
        assert!((out.amplitude(0b00) - b0).norm() < 1e-15);
        assert!((out.amplitude(0b11) - b1).norm() < 1e-15);

        // target prepared up: lands in {down up, up down}
        let psi = ManyBodyState::from_terms(2, &[(0b10, b0), (0b11, b1)]).unwrap();
        let out = encode_cnot(&psi, 0, 1).unwrap();
        assert!((out.amplitude(0b10) - b0).norm() < 1e-15);
        assert!((out.amplitude(0b01) - b1).norm() < 1e-15);
    }

    #[test]
    fn cnot_is_involution_and_validates() {
        let psi =
            ManyBodyState::from_amplitudes(3, (0..8).map(|k| c(k as f64, 1.0)).collect()).unwrap();
        let twice = encode_cnot(&encode_cnot(&psi, 2, 0).unwrap(), 2, 0).unwrap();
        assert_eq!(twice, psi);
        assert!(encode_cnot(&psi, 1, 1).is_err());
        assert!(encode_cnot(&psi, 0, 3).is_err());
    }

    /// `C sigma+_c C = sigma+_c sigma^x_t` and `C sigma^z_t C = -sigma^z_c sigma^z_t`
    /// (up is `+1`), checked as 4x4 matrices built from basis-state images.
    #[test]
    fn cnot_operator_identities() {
        let cnot = |config: usize| -> usize {
            let psi = ManyBodyState::basis(2, config).unwrap();
            let out = encode_cnot(&psi, 0, 1).unwrap();
            (0..4).find(|&k| out.amplitude(k).norm() > 0.5).unwrap()
        };
        // matrix element <a|op|b> helpers on two sites (control 0, target 1)
        let sigma_plus_c = |a: usize, b: usize| (b & 1 == 0 && a == b | 1) as i32;
        let sigma_x_t = |a: usize, b: usize| (a == b ^ 2) as i32;
        let sz = |site: usize, a: usize, b: usize| {
            if a != b {
                0
            } else if a >> site & 1 == 1 {
                1
            } else {
                -1
            }
        };
        for a in 0..4 {
            for b in 0..4 {
                // (C X C)_{ab} = X_{C(a), C(b)} since C is a self-inverse permutation
                let lhs = sigma_plus_c(cnot(a), cnot(b));
                let rhs: i32 = (0..4).map(|k| sigma_plus_c(a, k) * sigma_x_t(k, b)).sum();
                assert_eq!(lhs, rhs, "sigma+ identity at ({a},{b})");
                let lhs_z = sz(1, cnot(a), cnot(b));
                let rhs_z: i32 = -(0..4).map(|k| sz(0, a, k) * sz(1, k, b)).sum::<i32>();
                assert_eq!(lhs_z, rhs_z, "sigma^z identity at ({a},{b})");
            }
        }
    }

    #[test]
    fn dephasing_phases() {
        let psi =
            ManyBodyState::from_amplitudes(2, (0..4).map(|k| c(1.0, k as f64)).collect()).unwrap();
        assert_eq!(apply_collective_dephasing(&psi, 0.0, 5.0), psi);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = ManyBodyState::from_terms(2, &[(0b00, c(h, 0.0)), (0b11, c(h, 0.0))]).unwrap();
        let (lambda, t) = (0.3, 1.7);
        let out = apply_collective_dephasing(&pair, lambda, t);
        let rel = out.amplitude(0b11) / out.amplitude(0b00);
        assert!((rel - Complex64::from_polar(1.0, -4.0 * lambda * t)).norm() < 1e-14);

        // single sector: global phase only
        let sector =
            ManyBodyState::from_terms(3, &[(0b001, c(0.6, 0.0)), (0b100, c(0.0, 0.8))]).unwrap();
        let out = apply_collective_dephasing(&sector, 0.9, 2.0);
        assert!((out.inner(&sector).norm() - 1.0).abs() < 1e-14);
        assert_eq!(total_sz(0b011, 3), 1);
    }
}
