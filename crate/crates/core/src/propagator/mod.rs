//! Single-particle evolution `Delta(t) = exp(-i Omega t)`.
//!
//! Fermionic modes evolve as `a_i(t) = sum_j Delta_ij a_j`, so every
//! transfer amplitude needed downstream is an element of `Delta`.

mod tridiagonal;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::model::{build_effective_coupling_matrix, ChainSpec, CouplingMatrix};

pub use tridiagonal::{symmetric_tridiagonal_eigen, ITERATIONS_PER_ORDER};

/// `Omega = V diag(lambda) V^T` with orthonormal columns in `V`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    source: CouplingMatrix,
}

impl SpectralDecomposition {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal matrix whose columns are eigenvectors.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn source(&self) -> &CouplingMatrix {
        &self.source
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |V diag(lambda) V^T - Omega|`.
    pub fn reconstruction_error(&self) -> f64 {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        let recon = &self.eigenvectors * lambda * self.eigenvectors.transpose();
        (recon - self.source.to_dense()).abs().max()
    }

    /// `max |V^T V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let m = self.order();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::identity(m, m))
            .abs()
            .max()
    }

    /// Single element `Delta_ij(t)` in `O(order)`.
    pub fn element(&self, i: usize, j: usize, t: f64) -> Complex64 {
        if t == 0.0 {
            return if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let v = &self.eigenvectors;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            acc += Complex64::from_polar(v[(i, k)] * v[(j, k)], -lambda * t);
        }
        acc
    }
}

/// Evaluated `Delta(t)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    time: f64,
    entries: DMatrix<Complex64>,
    source: CouplingMatrix,
}

impl Propagator {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn source(&self) -> &CouplingMatrix {
        &self.source
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |Delta^dagger Delta - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let m = self.order();
        let prod = self.entries.adjoint() * &self.entries;
        max_abs_diff(&prod, &DMatrix::identity(m, m))
    }

    /// `max |Delta_ij - Delta_ji|`.
    pub fn symmetry_error(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.transpose())
    }

    /// Matrix product `self * other` as a raw matrix.
    pub fn compose(&self, other: &Propagator) -> DMatrix<Complex64> {
        &self.entries * &other.entries
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Eigen-decomposes a coupling matrix with the implicit-shift QL solver.
///
/// Fails only if the iteration cap (`30 * order` sweeps) is exceeded.
pub fn eigendecompose(omega: &CouplingMatrix) -> Result<SpectralDecomposition> {
    let diag = vec![0.0; omega.order()];
    let (eigenvalues, eigenvectors) = symmetric_tridiagonal_eigen(&diag, omega.off_diagonal())?;
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        source: omega.clone(),
    })
}

/// `Delta(t) = V exp(-i lambda t) V^T`.
pub fn propagator_at(decomp: &SpectralDecomposition, t: f64) -> Propagator {
    let m = decomp.order();
    let entries = if t == 0.0 {
        DMatrix::identity(m, m)
    } else {
        let v = decomp.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DVector::from_iterator(
            m,
            decomp
                .eigenvalues
                .iter()
                .map(|&l| Complex64::from_polar(1.0, -l * t)),
        );
        let mut weighted = v.clone();
        for (k, mut col) in weighted.column_iter_mut().enumerate() {
            col *= phases[k];
        }
        weighted * v.transpose()
    };
    Propagator {
        time: t,
        entries,
        source: decomp.source.clone(),
    }
}

/// Closed-form `(Delta_R1L1, Delta_R2L2, Delta_R1L2)` of the `n = 2` effective
/// model (`Omega = g0 J_x` with `J = 2`).
pub fn closed_form_effective_elements(
    base_coupling: f64,
    t: f64,
) -> (Complex64, Complex64, Complex64) {
    let x = base_coupling * t;
    let (c1, c2) = (x.cos(), (2.0 * x).cos());
    let (s1, s2) = (x.sin(), (2.0 * x).sin());
    (
        Complex64::new((3.0 - 4.0 * c1 + c2) / 8.0, 0.0),
        Complex64::new((-c1 + c2) / 2.0, 0.0),
        Complex64::new(0.0, (2.0 * s1 - s2) / 4.0),
    )
}

/// Outcome of comparing `Delta_eff(tau)` with `(-1)^n E`.
#[derive(Debug, Clone, Serialize)]
pub struct MirrorReport {
    pub register_size: usize,
    pub max_error: f64,
    /// `Delta_eff(tau)` at the zero-mode slot.
    pub center: (f64, f64),
    pub expected_sign: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that the tuned effective chain maps every site to its mirror image
/// with a uniform sign `(-1)^n` at `tau`.
pub fn mirror_inversion_report(spec: &ChainSpec, tolerance: f64) -> Result<MirrorReport> {
    let omega = build_effective_coupling_matrix(spec);
    let delta = propagator_at(&eigendecompose(&omega)?, spec.transfer_time());
    let m = omega.order();
    let sign = if spec.register_size().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let mut max_error = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let expected = if i + j == m - 1 { sign } else { 0.0 };
            max_error = max_error.max((delta.entry(i, j) - expected).norm());
        }
    }
    let center = delta.entry(spec.register_size(), spec.register_size());
    Ok(MirrorReport {
        register_size: spec.register_size(),
        max_error,
        center: (center.re, center.im),
        expected_sign: sign,
        tolerance,
        pass: max_error <= tolerance,
    })
}
