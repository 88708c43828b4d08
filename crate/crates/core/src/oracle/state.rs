use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{QstError, Result};

/// Largest number of sites the dense oracle accepts (`2^12` amplitudes).
pub const MAX_SITES: usize = 12;

/// Single-site spin. `Up` is bit value 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Down => 0,
            Spin::Up => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Down => 'd',
            Spin::Up => 'u',
        }
    }
}

pub(crate) fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(QstError::InvalidArgument(
            "a state needs at least one site".into(),
        ));
    }
    if sites > MAX_SITES {
        return Err(QstError::TooManySites {
            sites,
            cap: MAX_SITES,
        });
    }
    Ok(())
}

/// Reduced density matrix of one qubit, rows/columns ordered `(down, up)`.
pub type QubitDensity = [[Complex64; 2]; 2];

/// Pure state over `sites` spins.
///
/// Basis index bit `i` is the spin of site `i` in the crate-wide ordering
/// (`1` = up), so site 0 (`L1`) is the least significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    sites: usize,
    amplitudes: Vec<Complex64>,
}

impl ManyBodyState {
    /// Computational basis state `|config>`.
    pub fn basis(sites: usize, config: usize) -> Result<Self> {
        check_sites(sites)?;
        if config >> sites != 0 {
            return Err(QstError::InvalidArgument(format!(
                "configuration {config:#b} does not fit {sites} sites"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << sites];
        amplitudes[config] = Complex64::new(1.0, 0.0);
        Ok(Self { sites, amplitudes })
    }

    /// Normalised superposition of `(config, amplitude)` terms.
    pub fn from_terms(sites: usize, terms: &[(usize, Complex64)]) -> Result<Self> {
        check_sites(sites)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << sites];
        for &(config, amp) in terms {
            let slot = amplitudes.get_mut(config).ok_or_else(|| {
                QstError::InvalidArgument(format!("configuration {config:#b} out of range"))
            })?;
            *slot += amp;
        }
        Self::from_amplitudes(sites, amplitudes)
    }

    /// Wraps and normalises an amplitude vector of length `2^sites`.
    pub fn from_amplitudes(sites: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_sites(sites)?;
        if amplitudes.len() != 1 << sites {
            return Err(QstError::InvalidArgument(format!(
                "{} amplitudes for {sites} sites",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(QstError::InvalidArgument(
                "state has zero or non-finite norm".into(),
            ));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { sites, amplitudes })
    }

    /// Trusted constructor for operations that preserve the norm.
    pub(crate) fn from_raw(sites: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << sites);
        Self { sites, amplitudes }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, config: usize) -> Complex64 {
        self.amplitudes[config]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ManyBodyState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability weight in each excitation-number sector `0..=sites`.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.sites + 1];
        for (config, a) in self.amplitudes.iter().enumerate() {
            w[config.count_ones() as usize] += a.norm_sqr();
        }
        w
    }

    /// Reduced density matrix of `site`.
    pub fn reduced_qubit(&self, site: usize) -> QubitDensity {
        let bit = 1usize << site;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (config, &a) in self.amplitudes.iter().enumerate() {
            if config & bit != 0 {
                continue;
            }
            let b = self.amplitudes[config | bit];
            rho[0][0] += a * a.conj();
            rho[0][1] += a * b.conj();
            rho[1][0] += b * a.conj();
            rho[1][1] += b * b.conj();
        }
        rho
    }
}

/// Occupations of the effective chain `[L1..Ln, kappa, Rn..R1]`.
///
/// `left[u - 1]` is `n_{L_u}` and `right[u - 1]` is `n_{R_u}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationPattern {
    pub left: Vec<bool>,
    pub zero_mode: bool,
    pub right: Vec<bool>,
}

impl OccupationPattern {
    pub fn register_size(&self) -> usize {
        self.left.len()
    }

    /// Decodes an effective-chain basis index for registers of size `n`.
    pub fn from_config(n: usize, config: usize) -> Self {
        let bit = |site: usize| config >> site & 1 == 1;
        Self {
            left: (0..n).map(bit).collect(),
            zero_mode: bit(n),
            right: (1..=n).map(|u| bit(2 * n + 1 - u)).collect(),
        }
    }

    pub fn to_config(&self) -> usize {
        let n = self.register_size();
        let mut config = 0;
        for (u, &occ) in self.left.iter().enumerate() {
            config |= usize::from(occ) << u;
        }
        config |= usize::from(self.zero_mode) << n;
        for (u, &occ) in self.right.iter().enumerate() {
            config |= usize::from(occ) << (2 * n - u);
        }
        config
    }

    /// `L_u <-> R_u`, zero mode unchanged.
    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            zero_mode: self.zero_mode,
            right: self.left.clone(),
        }
    }

    pub fn total(&self) -> usize {
        self.left.iter().chain(&self.right).filter(|&&b| b).count() + usize::from(self.zero_mode)
    }
}

/// Site-ordered bits, e.g. `10|1|01` for `L1 L2 | kappa | R2 R1`.
impl fmt::Display for OccupationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &mut dyn Iterator<Item = &bool>| -> String {
            v.map(|&b| if b { '1' } else { '0' }).collect()
        };
        write!(
            f,
            "{}|{}|{}",
            bits(&mut self.left.iter()),
            u8::from(self.zero_mode),
            bits(&mut self.right.iter().rev())
        )
    }
}

impl Serialize for OccupationPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
