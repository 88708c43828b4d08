use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{QstError, Result};
use crate::model::{build_coupling_matrix, ChainSpec, CouplingMatrix, MatrixKind};

use super::state::{check_sites, ManyBodyState};

/// Nearest-neighbour XX Hamiltonian `sum_i g_i (s+_i s-_{i+1} + s-_i s+_{i+1})`
/// on the spin configuration space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinHamiltonian {
    sites: usize,
    bonds: Vec<f64>,
}

/// Many-body Hamiltonian of the full or effective chain (at most
/// [`MAX_SITES`](super::MAX_SITES) sites).
pub fn build_spin_hamiltonian(spec: &ChainSpec, kind: MatrixKind) -> Result<SpinHamiltonian> {
    SpinHamiltonian::from_coupling_matrix(&build_coupling_matrix(spec, kind))
}

impl SpinHamiltonian {
    /// Spin Hamiltonian whose single-excitation block is `omega`.
    pub fn from_coupling_matrix(omega: &CouplingMatrix) -> Result<Self> {
        check_sites(omega.order())?;
        Ok(Self {
            sites: omega.order(),
            bonds: omega.off_diagonal().to_vec(),
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Nonzero off-diagonal elements reachable from `config` by one hop.
    fn hops(&self, config: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.bonds.iter().enumerate().filter_map(move |(i, &g)| {
            let pair = 0b11 << i;
            let bits = config & pair;
            (g != 0.0 && bits != 0 && bits != pair).then_some((config ^ pair, g))
        })
    }

    /// `H psi` on a raw amplitude vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (config, &a) in psi.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (target, g) in self.hops(config) {
                out[target] += a * g;
            }
        }
        out
    }

    /// Dense `2^sites` matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for config in 0..self.dim() {
            for (target, g) in self.hops(config) {
                h[(target, config)] += g;
            }
        }
        h
    }

    /// Basis configurations with `excitations` up spins (ascending) and the
    /// Hamiltonian block on them.
    pub fn sector(&self, excitations: usize) -> (Vec<usize>, DMatrix<f64>) {
        let configs: Vec<usize> = (0..self.dim())
            .filter(|c| c.count_ones() as usize == excitations)
            .collect();
        let mut position = vec![usize::MAX; self.dim()];
        for (k, &c) in configs.iter().enumerate() {
            position[c] = k;
        }
        let mut block = DMatrix::zeros(configs.len(), configs.len());
        for (k, &c) in configs.iter().enumerate() {
            for (target, g) in self.hops(c) {
                block[(position[target], k)] += g;
            }
        }
        (configs, block)
    }

    /// Diagonalises every excitation sector once for repeated evolution.
    pub fn diagonalize(&self) -> Result<Evolver> {
        let sectors = (0..=self.sites)
            .map(|k| {
                let (configs, block) = self.sector(k);
                let dim = block.nrows();
                let eig = SymmetricEigen::try_new(block, f64::EPSILON, 1000 * dim.max(1))
                    .ok_or(QstError::NoConvergence(1000 * dim.max(1)))?;
                Ok(Sector {
                    configs,
                    energies: eig.eigenvalues,
                    vectors: eig.eigenvectors,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Evolver {
            sites: self.sites,
            sectors,
        })
    }
}

#[derive(Debug, Clone)]
struct Sector {
    configs: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Sector-wise eigendecomposition of a [`SpinHamiltonian`].
#[derive(Debug, Clone)]
pub struct Evolver {
    sites: usize,
    sectors: Vec<Sector>,
}

impl Evolver {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// All many-body energies, sector by sector.
    pub fn energies(&self) -> Vec<f64> {
        self.sectors
            .iter()
            .flat_map(|s| s.energies.iter().copied())
            .collect()
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &ManyBodyState, t: f64) -> Result<ManyBodyState> {
        if psi.sites() != self.sites {
            return Err(QstError::InvalidArgument(format!(
                "state has {} sites, Hamiltonian {}",
                psi.sites(),
                self.sites
            )));
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let amps = psi.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for sector in &self.sectors {
            let dim = sector.configs.len();
            let re = DVector::from_iterator(dim, sector.configs.iter().map(|&c| amps[c].re));
            let im = DVector::from_iterator(dim, sector.configs.iter().map(|&c| amps[c].im));
            if re.iter().chain(im.iter()).all(|&x| x == 0.0) {
                continue;
            }
            let proj_re = sector.vectors.tr_mul(&re);
            let proj_im = sector.vectors.tr_mul(&im);
            let mut rot_re = DVector::zeros(dim);
            let mut rot_im = DVector::zeros(dim);
            for k in 0..dim {
                let phase = Complex64::from_polar(1.0, -sector.energies[k] * t);
                let c = Complex64::new(proj_re[k], proj_im[k]) * phase;
                rot_re[k] = c.re;
                rot_im[k] = c.im;
            }
            let back_re = &sector.vectors * rot_re;
            let back_im = &sector.vectors * rot_im;
            for (k, &c) in sector.configs.iter().enumerate() {
                out[c] = Complex64::new(back_re[k], back_im[k]);
            }
        }
        Ok(ManyBodyState::from_raw(self.sites, out))
    }
}

/// One-shot `exp(-i H t) psi`; diagonalises `h` on every call.
pub fn evolve_state(h: &SpinHamiltonian, psi: &ManyBodyState, t: f64) -> Result<ManyBodyState> {
    h.diagonalize()?.evolve(psi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MatrixKind, SiteLabel};
    use crate::propagator::{eigendecompose, propagator_at};
    use proptest::prelude::*;

    fn two_site(g: f64) -> SpinHamiltonian {
        let m = CouplingMatrix::from_off_diagonal(
            MatrixKind::Full,
            vec![g],
            vec![SiteLabel::Left(1), SiteLabel::Right(1)],
        )
        .unwrap();
        SpinHamiltonian::from_coupling_matrix(&m).unwrap()
    }

    #[test]
    fn single_bond_spectrum() {
        let mut e = two_site(0.8).diagonalize().unwrap().energies();
        e.sort_by(f64::total_cmp);
        let expected = [-0.8, 0.0, 0.0, 0.8];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rabi_half_period_transfers() {
        let g = 0.25;
        let h = two_site(g);
        let psi = ManyBodyState::basis(2, 0b01).unwrap();
        let out = evolve_state(&h, &psi, std::f64::consts::PI / (2.0 * g)).unwrap();
        assert!((out.amplitude(0b10).norm() - 1.0).abs() < 1e-12);
        assert!(out.amplitude(0b01).norm() < 1e-12);
    }

    #[test]
    fn trivial_evolutions() {
        let spec = ChainSpec::new(2, 3, 1.0, 0.3).unwrap();
        let h = build_spin_hamiltonian(&spec, MatrixKind::Full).unwrap();
        let psi = ManyBodyState::basis(7, 0b1010011).unwrap();
        assert_eq!(evolve_state(&h, &psi, 0.0).unwrap(), psi);
        let zero = two_site(0.0);
        let p2 = ManyBodyState::from_terms(
            2,
            &[(1, Complex64::new(0.6, 0.0)), (2, Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        let out = evolve_state(&zero, &p2, 3.3).unwrap();
        assert!(out
            .amplitudes()
            .iter()
            .zip(p2.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn size_cap() {
        let spec = ChainSpec::new(2, 9, 1.0, 0.1).unwrap();
        assert_eq!(
            build_spin_hamiltonian(&spec, MatrixKind::Full),
            Err(QstError::TooManySites { sites: 13, cap: 12 })
        );
        let spec = ChainSpec::new(2, 7, 1.0, 0.1).unwrap();
        assert!(build_spin_hamiltonian(&spec, MatrixKind::Full).is_ok());
    }

    #[test]
    fn wrong_state_size_rejected() {
        let ev = two_site(1.0).diagonalize().unwrap();
        let psi = ManyBodyState::basis(3, 0).unwrap();
        assert!(ev.evolve(&psi, 1.0).is_err());
    }

    fn arb_small() -> impl Strategy<Value = (ChainSpec, MatrixKind)> {
        (
            1usize..=3,
            0usize..3,
            0.3f64..2.0,
            0.01f64..1.0,
            any::<bool>(),
        )
            .prop_filter_map("fits the oracle", |(n, half, gc, gi, eff)| {
                let spec = ChainSpec::new(n, 2 * half + 1, gc, gi).ok()?;
                let kind = if eff {
                    MatrixKind::Effective
                } else {
                    MatrixKind::Full
                };
                let sites = if eff {
                    spec.effective_sites()
                } else {
                    spec.full_sites()
                };
                (sites <= 9).then_some((spec, kind))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn commutes_with_total_sz((spec, kind) in arb_small()) {
            let h = build_spin_hamiltonian(&spec, kind).unwrap();
            let dense = h.to_dense();
            let sz = DMatrix::from_diagonal(&DVector::from_iterator(
                h.dim(),
                (0..h.dim()).map(|c| 2.0 * c.count_ones() as f64 - h.sites() as f64),
            ));
            let comm = &dense * &sz - &sz * &dense;
            prop_assert!(comm.abs().max() <= 1e-12);
            let apply = h.apply(&(0..h.dim()).map(|c| Complex64::new(c as f64, 1.0)).collect::<Vec<_>>());
            for (c, v) in apply.iter().enumerate() {
                let row: f64 = (0..h.dim()).map(|k| dense[(c, k)] * k as f64).sum();
                prop_assert!((v.re - row).abs() < 1e-9);
            }
        }

        #[test]
        fn single_excitation_block_is_omega((spec, kind) in arb_small()) {
            let omega = build_coupling_matrix(&spec, kind);
            let h = SpinHamiltonian::from_coupling_matrix(&omega).unwrap();
            let (configs, block) = h.sector(1);
            prop_assert_eq!(configs.clone(), (0..omega.order()).map(|i| 1usize << i).collect::<Vec<_>>());
            prop_assert!((block - omega.to_dense()).abs().max() <= 1e-12);
        }

        #[test]
        fn single_excitation_follows_delta((spec, kind) in arb_small(), t in 0.0f64..200.0, site in 0usize..9) {
            let omega = build_coupling_matrix(&spec, kind);
            let site = site % omega.order();
            let delta = propagator_at(&eigendecompose(&omega).unwrap(), t);
            let ev = SpinHamiltonian::from_coupling_matrix(&omega).unwrap().diagonalize().unwrap();
            let out = ev.evolve(&ManyBodyState::basis(omega.order(), 1 << site).unwrap(), t).unwrap();
            for i in 0..omega.order() {
                prop_assert!((out.amplitude(1 << i) - delta.entry(i, site)).norm() <= 1e-9);
            }
        }

        #[test]
        fn evolution_conserves_sectors_and_norm((spec, kind) in arb_small(), t in 0.0f64..100.0, seed in any::<u64>()) {
            let h = build_spin_hamiltonian(&spec, kind).unwrap();
            let mut x = seed;
            let amps: Vec<Complex64> = (0..h.dim()).map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                Complex64::new(((x >> 33) as f64 / 2f64.powi(31)) - 0.5, ((x >> 11 & 0xffff) as f64 / 65536.0) - 0.5)
            }).collect();
            let psi = ManyBodyState::from_amplitudes(h.sites(), amps).unwrap();
            let out = h.diagonalize().unwrap().evolve(&psi, t).unwrap();
            prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
            for (a, b) in psi.sector_weights().iter().zip(out.sector_weights()) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
