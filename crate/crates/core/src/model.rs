//! Chain geometry, derived couplings and single-particle coupling matrices.
//!
//! The free inputs are `(n, N, g_C, g_I)`. The zero-mode coupling `t_kappa`
//! follows from them, the register profile is then tuned so that its last
//! coupling equals `t_kappa`:
//!
//! ```text
//! g_u = (g0 / 2) * sqrt(u (2n - u + 1)),   u = 1..n,   g_n = t_kappa
//! ```
//!
//! which fixes `g0 = 2 t_kappa / sqrt(n (n + 1))` and `tau = pi / g0`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};

/// Geometry and couplings of a register-channel-register chain.
///
/// Constructed only through [`ChainSpec::new`], so every instance satisfies
/// the tuning condition `g_n = t_kappa` and `g0 * tau = pi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    register_size: usize,
    channel_length: usize,
    channel_coupling: f64,
    interface_coupling: f64,
    zero_mode: usize,
    zero_mode_coupling: f64,
    base_coupling: f64,
    register_couplings: Vec<f64>,
    transfer_time: f64,
}

impl ChainSpec {
    /// Derives every coupling parameter from `(n, N, g_C, g_I)`.
    pub fn new(
        register_size: usize,
        channel_length: usize,
        channel_coupling: f64,
        interface_coupling: f64,
    ) -> Result<Self> {
        if register_size == 0 {
            return Err(QstError::EmptyRegister);
        }
        if channel_length.is_multiple_of(2) {
            return Err(QstError::EvenChannelLength(channel_length));
        }
        check_coupling("g_C", channel_coupling)?;
        check_coupling("g_I", interface_coupling)?;

        let zero_mode = channel_length.div_ceil(2);
        // sin(kappa pi / (N + 1)) = sin(pi / 2) = 1 for odd N.
        let zero_mode_coupling = interface_coupling * (2.0 / (channel_length as f64 + 1.0)).sqrt();
        let n = register_size as f64;
        let base_coupling = 2.0 * zero_mode_coupling / (n * (n + 1.0)).sqrt();
        let register_couplings = (1..=register_size)
            .map(|u| register_profile(base_coupling, register_size, u))
            .collect();

        Ok(Self {
            register_size,
            channel_length,
            channel_coupling,
            interface_coupling,
            zero_mode,
            zero_mode_coupling,
            base_coupling,
            register_couplings,
            transfer_time: PI / base_coupling,
        })
    }

    /// Register qubit count `n`.
    pub fn register_size(&self) -> usize {
        self.register_size
    }

    /// Channel length `N` (odd).
    pub fn channel_length(&self) -> usize {
        self.channel_length
    }

    /// Intrachannel coupling `g_C`.
    pub fn channel_coupling(&self) -> f64 {
        self.channel_coupling
    }

    /// Register-channel coupling `g_I`.
    pub fn interface_coupling(&self) -> f64 {
        self.interface_coupling
    }

    /// `g_I / g_C`.
    pub fn coupling_ratio(&self) -> f64 {
        self.interface_coupling / self.channel_coupling
    }

    /// One-based index `kappa = (N + 1) / 2` of the zero-energy channel mode.
    pub fn zero_mode(&self) -> usize {
        self.zero_mode
    }

    /// Coupling `t_kappa` between a register end and the zero mode.
    pub fn zero_mode_coupling(&self) -> f64 {
        self.zero_mode_coupling
    }

    /// `g0`.
    pub fn base_coupling(&self) -> f64 {
        self.base_coupling
    }

    /// `[g_1, ..., g_n]`; the last entry equals `t_kappa`.
    pub fn register_couplings(&self) -> &[f64] {
        &self.register_couplings
    }

    /// `tau = pi / g0`.
    pub fn transfer_time(&self) -> f64 {
        self.transfer_time
    }

    /// `(-1)^(kappa - 1)`: the sign by which the right register's amplitudes in
    /// the full model differ from the effective model.
    pub fn zero_mode_parity(&self) -> f64 {
        if (self.zero_mode - 1).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Number of sites of the full chain, `N + 2n`.
    pub fn full_sites(&self) -> usize {
        self.channel_length + 2 * self.register_size
    }

    /// Number of sites of the effective chain, `2n + 1`.
    pub fn effective_sites(&self) -> usize {
        2 * self.register_size + 1
    }

    /// Channel eigenenergies `eps_k = 2 g_C cos(k pi / (N + 1))`, `k = 1..N`.
    pub fn channel_spectrum(&self) -> Vec<f64> {
        channel_spectrum(self)
    }

    /// Register-to-mode couplings `t_k`, `k = 1..N`.
    pub fn mode_couplings(&self) -> Vec<f64> {
        mode_couplings(self)
    }
}

fn check_coupling(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(QstError::InvalidCoupling { name, value })
    }
}

fn register_profile(base: f64, n: usize, u: usize) -> f64 {
    0.5 * base * ((u * (2 * n - u + 1)) as f64).sqrt()
}

/// Free-function form of [`ChainSpec::new`].
pub fn derive_parameters(
    register_size: usize,
    channel_length: usize,
    channel_coupling: f64,
    interface_coupling: f64,
) -> Result<ChainSpec> {
    ChainSpec::new(
        register_size,
        channel_length,
        channel_coupling,
        interface_coupling,
    )
}

/// `eps_k = 2 g_C cos(k pi / (N + 1))` for `k = 1..N`. The zero mode is set to
/// exactly `0.0` and the two halves are mirrored so antisymmetry is exact.
pub fn channel_spectrum(spec: &ChainSpec) -> Vec<f64> {
    let len = spec.channel_length;
    let denom = len as f64 + 1.0;
    let mut eps = vec![0.0; len];
    for k in 1..spec.zero_mode {
        let e = 2.0 * spec.channel_coupling * (k as f64 * PI / denom).cos();
        eps[k - 1] = e;
        eps[len - k] = -e;
    }
    eps
}

/// `t_k = g_I sqrt(2 / (N + 1)) sin(k pi / (N + 1))` for `k = 1..N`, mirrored
/// so that `t_k = t_{N+1-k}` exactly.
pub fn mode_couplings(spec: &ChainSpec) -> Vec<f64> {
    let len = spec.channel_length;
    let denom = len as f64 + 1.0;
    let mut t = vec![0.0; len];
    for k in 1..spec.zero_mode {
        let v = spec.interface_coupling * (2.0 / denom).sqrt() * (k as f64 * PI / denom).sin();
        t[k - 1] = v;
        t[len - k] = v;
    }
    t[spec.zero_mode - 1] = spec.zero_mode_coupling;
    t
}

/// Which single-particle matrix a [`CouplingMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    /// Registers plus the whole channel, order `N + 2n`.
    Full,
    /// Registers plus the zero mode only, order `2n + 1`.
    Effective,
}

/// Tag of a single site (or mode) in the fixed ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteLabel {
    Left(usize),
    Channel(usize),
    ZeroMode,
    Right(usize),
}

impl fmt::Display for SiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteLabel::Left(u) => write!(f, "L{u}"),
            SiteLabel::Channel(i) => write!(f, "c{i}"),
            SiteLabel::ZeroMode => f.write_str("κ"),
            SiteLabel::Right(u) => write!(f, "R{u}"),
        }
    }
}

/// Real symmetric tridiagonal single-particle matrix with zero diagonal.
///
/// Only the superdiagonal is stored; entry `(i, i + 1)` is the hopping
/// between sites `i` and `i + 1` of [`CouplingMatrix::site_labels`].
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    kind: MatrixKind,
    off_diagonal: Vec<f64>,
    site_labels: Vec<SiteLabel>,
}

impl CouplingMatrix {
    /// Builds a matrix from its superdiagonal. `site_labels` must have one
    /// more entry than `off_diagonal`.
    pub fn from_off_diagonal(
        kind: MatrixKind,
        off_diagonal: Vec<f64>,
        site_labels: Vec<SiteLabel>,
    ) -> Result<Self> {
        if site_labels.len() != off_diagonal.len() + 1 {
            return Err(QstError::InvalidArgument(format!(
                "{} site labels for a superdiagonal of length {}",
                site_labels.len(),
                off_diagonal.len()
            )));
        }
        if let Some(bad) = off_diagonal.iter().find(|g| !g.is_finite()) {
            return Err(QstError::InvalidArgument(format!(
                "non-finite coupling {bad}"
            )));
        }
        Ok(Self {
            kind,
            off_diagonal,
            site_labels,
        })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.site_labels.len()
    }

    /// Superdiagonal `[Omega_{0,1}, Omega_{1,2}, ...]`.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn site_labels(&self) -> &[SiteLabel] {
        &self.site_labels
    }

    /// Index of a labelled site, if present.
    pub fn index_of(&self, label: SiteLabel) -> Option<usize> {
        self.site_labels.iter().position(|&l| l == label)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            1 => self.off_diagonal[i.min(j)],
            _ => 0.0,
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.off_diagonal.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.order();
        DMatrix::from_fn(m, m, |i, j| self.entry(i, j))
    }

    /// Multiplies the hopping on bond `(bond, bond + 1)` by `factor`.
    pub fn scale_bond(&mut self, bond: usize, factor: f64) {
        self.off_diagonal[bond] *= factor;
    }
}

fn register_labels(n: usize, middle: impl IntoIterator<Item = SiteLabel>) -> Vec<SiteLabel> {
    (1..=n)
        .map(SiteLabel::Left)
        .chain(middle)
        .chain((1..=n).rev().map(SiteLabel::Right))
        .collect()
}

/// Full `(N + 2n)`-site matrix ordered `[L1..Ln, c1..cN, Rn..R1]`; superdiagonal
/// `[g_1..g_{n-1}, g_I, g_C x (N-1), g_I, g_{n-1}..g_1]`.
pub fn build_full_coupling_matrix(spec: &ChainSpec) -> CouplingMatrix {
    let inner = &spec.register_couplings[..spec.register_size - 1];
    let off: Vec<f64> = inner
        .iter()
        .copied()
        .chain(std::iter::once(spec.interface_coupling))
        .chain(std::iter::repeat_n(
            spec.channel_coupling,
            spec.channel_length - 1,
        ))
        .chain(std::iter::once(spec.interface_coupling))
        .chain(inner.iter().rev().copied())
        .collect();
    let labels = register_labels(
        spec.register_size,
        (1..=spec.channel_length).map(SiteLabel::Channel),
    );
    CouplingMatrix {
        kind: MatrixKind::Full,
        off_diagonal: off,
        site_labels: labels,
    }
}

/// Effective `(2n + 1)`-site matrix ordered `[L1..Ln, kappa, Rn..R1]`; equals
/// `g0 * J_x` for pseudo-spin `J = n`.
pub fn build_effective_coupling_matrix(spec: &ChainSpec) -> CouplingMatrix {
    let inner = &spec.register_couplings[..spec.register_size - 1];
    let off: Vec<f64> = inner
        .iter()
        .copied()
        .chain([spec.zero_mode_coupling, spec.zero_mode_coupling])
        .chain(inner.iter().rev().copied())
        .collect();
    let labels = register_labels(spec.register_size, [SiteLabel::ZeroMode]);
    CouplingMatrix {
        kind: MatrixKind::Effective,
        off_diagonal: off,
        site_labels: labels,
    }
}

/// Dispatches on [`MatrixKind`].
pub fn build_coupling_matrix(spec: &ChainSpec, kind: MatrixKind) -> CouplingMatrix {
    match kind {
        MatrixKind::Full => build_full_coupling_matrix(spec),
        MatrixKind::Effective => build_effective_coupling_matrix(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Angular-momentum `J_x` for spin `j`, built from the ladder elements
    /// `<m+1|J_+|m> = sqrt(j(j+1) - m(m+1))`, rows ordered `m = j, ..., -j`.
    fn angular_momentum_x(j: usize) -> DMatrix<f64> {
        let dim = 2 * j + 1;
        let jf = j as f64;
        DMatrix::from_fn(dim, dim, |r, c| {
            if r.abs_diff(c) != 1 {
                return 0.0;
            }
            // lower m of the two states
            let m = jf - r.max(c) as f64;
            0.5 * (jf * (jf + 1.0) - m * (m + 1.0)).sqrt()
        })
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn derives_reference_parameters() {
        let spec = ChainSpec::new(2, 3, 1.0, 0.1).unwrap();
        assert_eq!(spec.zero_mode(), 2);
        assert!(close(
            spec.zero_mode_coupling(),
            0.070_710_678_118_654_75,
            1e-15
        ));
        assert!(close(spec.base_coupling(), 0.057_735_026_918_962_58, 1e-15));
        assert!(close(spec.transfer_time(), 54.413_980_927_026_535, 1e-10));
        let g = spec.register_couplings();
        assert!(close(g[0], spec.base_coupling(), 1e-15));
        assert!(close(g[1], spec.base_coupling() * 6f64.sqrt() / 2.0, 1e-15));
        assert!(close(g[1], spec.zero_mode_coupling(), 1e-15));

        let spec = ChainSpec::new(1, 5, 1.0, 0.05).unwrap();
        assert_eq!(spec.zero_mode(), 3);
        assert!(close(
            spec.zero_mode_coupling(),
            0.028_867_513_459_481_29,
            1e-15
        ));
        assert!(close(spec.base_coupling(), 0.040_824_829_046_386_3, 1e-15));
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert_eq!(
            ChainSpec::new(2, 4, 1.0, 0.1),
            Err(QstError::EvenChannelLength(4))
        );
        assert_eq!(
            ChainSpec::new(2, 0, 1.0, 0.1),
            Err(QstError::EvenChannelLength(0))
        );
        assert_eq!(ChainSpec::new(0, 3, 1.0, 0.1), Err(QstError::EmptyRegister));
        assert!(matches!(
            ChainSpec::new(2, 3, 0.0, 0.1),
            Err(QstError::InvalidCoupling { name: "g_C", .. })
        ));
        assert!(matches!(
            ChainSpec::new(2, 3, 1.0, -0.1),
            Err(QstError::InvalidCoupling { name: "g_I", .. })
        ));
        assert!(ChainSpec::new(2, 3, 1.0, f64::NAN).is_err());
        assert!(ChainSpec::new(2, 3, f64::INFINITY, 0.1).is_err());
    }

    #[test]
    fn zero_mode_parity_follows_kappa() {
        // kappa = 1, 2, 3, 4
        let signs: Vec<f64> = [1, 3, 5, 7]
            .iter()
            .map(|&len| ChainSpec::new(1, len, 1.0, 0.1).unwrap().zero_mode_parity())
            .collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn smallest_full_matrix() {
        let spec = ChainSpec::new(1, 1, 1.0, 0.3).unwrap();
        let m = build_full_coupling_matrix(&spec);
        assert_eq!(m.order(), 3);
        assert_eq!(m.off_diagonal(), &[0.3, 0.3]);
        let labels: Vec<String> = m.site_labels().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["L1", "c1", "R1"]);
    }

    #[test]
    fn full_matrix_layout_n2() {
        let spec = ChainSpec::new(2, 3, 1.0, 0.1).unwrap();
        let m = build_full_coupling_matrix(&spec);
        let g1 = spec.register_couplings()[0];
        assert_eq!(m.order(), 7);
        assert_eq!(m.off_diagonal(), &[g1, 0.1, 1.0, 1.0, 0.1, g1]);
        let labels: Vec<String> = m.site_labels().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["L1", "L2", "c1", "c2", "c3", "R2", "R1"]);
        assert_eq!(m.index_of(SiteLabel::Right(1)), Some(6));
    }

    #[test]
    fn effective_matrix_n2_is_spin2_jx() {
        let spec = ChainSpec::new(2, 101, 1.0, 0.01).unwrap();
        let m = build_effective_coupling_matrix(&spec);
        let g0 = spec.base_coupling();
        let half = 6f64.sqrt() / 2.0;
        let expected = [g0, g0 * half, g0 * half, g0];
        for (a, b) in m.off_diagonal().iter().zip(expected) {
            assert!(close(*a, b, 1e-15));
        }
        let jx = angular_momentum_x(2);
        assert!(close(jx[(0, 1)], 1.0, 1e-15));
        assert!(close(jx[(1, 2)], half, 1e-15));
        let labels: Vec<String> = m.site_labels().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["L1", "L2", "κ", "R2", "R1"]);
    }

    #[test]
    fn effective_matrix_n1() {
        let spec = ChainSpec::new(1, 7, 1.0, 0.2).unwrap();
        let m = build_effective_coupling_matrix(&spec);
        let t = spec.zero_mode_coupling();
        assert_eq!(m.off_diagonal(), &[t, t]);
    }

    #[test]
    fn channel_spectrum_n3() {
        let spec = ChainSpec::new(2, 3, 1.0, 0.1).unwrap();
        let eps = spec.channel_spectrum();
        assert!(close(eps[0], 2f64.sqrt(), 1e-15));
        assert_eq!(eps[1], 0.0);
        assert!(close(eps[2], -(2f64.sqrt()), 1e-15));
    }

    #[test]
    fn mode_couplings_n3() {
        let spec = ChainSpec::new(2, 3, 1.0, 1.0).unwrap();
        let t = spec.mode_couplings();
        assert!(close(t[0], 0.5, 1e-15));
        assert!(close(t[1], 1.0 / 2f64.sqrt(), 1e-15));
        assert!(close(t[2], 0.5, 1e-15));
    }

    #[test]
    fn deterministic_derivation() {
        let a = ChainSpec::new(3, 151, 1.0, 0.0123).unwrap();
        let b = ChainSpec::new(3, 151, 1.0, 0.0123).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.transfer_time().to_bits(), b.transfer_time().to_bits());
    }

    fn arb_spec() -> impl Strategy<Value = ChainSpec> {
        (1usize..=6, 0usize..60, 0.1f64..3.0, 1e-4f64..2.0)
            .prop_map(|(n, half, gc, gi)| ChainSpec::new(n, 2 * half + 1, gc, gi).unwrap())
    }

    proptest! {
        #[test]
        fn effective_matrix_is_scaled_jx(spec in arb_spec()) {
            let m = build_effective_coupling_matrix(&spec).to_dense();
            let jx = angular_momentum_x(spec.register_size()) * spec.base_coupling();
            prop_assert!((m - jx).abs().max() <= 1e-12);
        }

        #[test]
        fn tuning_invariants(spec in arb_spec()) {
            let g = spec.register_couplings();
            prop_assert!(close(g[spec.register_size() - 1], spec.zero_mode_coupling(), 1e-14 * spec.zero_mode_coupling().max(1.0)));
            prop_assert!(close(spec.base_coupling() * spec.transfer_time(), PI, 1e-13));
        }

        #[test]
        fn spectrum_and_couplings_symmetric(spec in arb_spec()) {
            let eps = spec.channel_spectrum();
            let t = spec.mode_couplings();
            let len = spec.channel_length();
            prop_assert_eq!(eps[spec.zero_mode() - 1], 0.0);
            for k in 0..len {
                prop_assert!(close(eps[k], -eps[len - 1 - k], 1e-14));
                prop_assert!(close(t[k], t[len - 1 - k], 1e-14));
                prop_assert!(t[k] <= spec.zero_mode_coupling() * (1.0 + 1e-15));
                // direct formula
                let kk = (k + 1) as f64;
                let denom = len as f64 + 1.0;
                prop_assert!(close(eps[k], 2.0 * spec.channel_coupling() * (kk * PI / denom).cos(), 1e-13));
            }
        }

        #[test]
        fn full_matrix_tridiagonal_symmetric(spec in arb_spec()) {
            let m = build_full_coupling_matrix(&spec);
            prop_assert_eq!(m.order(), spec.full_sites());
            let d = m.to_dense();
            for i in 0..m.order() {
                prop_assert_eq!(d[(i, i)], 0.0);
                for j in 0..m.order() {
                    prop_assert_eq!(d[(i, j)], d[(j, i)]);
                    if i.abs_diff(j) > 1 {
                        prop_assert_eq!(d[(i, j)], 0.0);
                    }
                }
            }
        }
    }
}
