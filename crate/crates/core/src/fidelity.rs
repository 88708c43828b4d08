//! Average transfer fidelity of the two-qubit register encodings.
//!
//! With `n = 2` a logical qubit is carried either by the collective-dephasing
//! free pair `{|down up>, |up down>}` (DFS) or by `{|down down>, |up up>}`
//! (NDFS). Both fidelities are closed forms in four propagator elements.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QstError, Result};
use crate::model::{build_full_coupling_matrix, ChainSpec, CouplingMatrix};
use crate::numeric::compensated_mean;
use crate::propagator::{eigendecompose, Propagator, SpectralDecomposition};

/// The four register-to-register propagator elements entering the fidelities.
///
/// Indices follow the crate-wide ordering: `L1 = 0`, `L2 = 1`,
/// `R2 = order - 2`, `R1 = order - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegisterElements {
    pub r1_l1: Complex64,
    pub r2_l2: Complex64,
    pub r1_l2: Complex64,
    pub r2_l1: Complex64,
}

impl RegisterElements {
    pub fn new(r1_l1: Complex64, r2_l2: Complex64, r1_l2: Complex64, r2_l1: Complex64) -> Self {
        Self {
            r1_l1,
            r2_l2,
            r1_l2,
            r2_l1,
        }
    }

    pub fn from_propagator(p: &Propagator) -> Self {
        let m = p.order();
        Self::new(
            p.entry(m - 1, 0),
            p.entry(m - 2, 1),
            p.entry(m - 1, 1),
            p.entry(m - 2, 0),
        )
    }

    /// Reads the four elements directly from a decomposition at time `t`.
    pub fn from_decomposition(d: &SpectralDecomposition, t: f64) -> Self {
        let m = d.order();
        Self::new(
            d.element(m - 1, 0, t),
            d.element(m - 2, 1, t),
            d.element(m - 1, 1, t),
            d.element(m - 2, 0, t),
        )
    }

    /// Elements with both right-register rows multiplied by `sign`.
    pub fn with_right_sign(self, sign: f64) -> Self {
        Self::new(
            self.r1_l1 * sign,
            self.r2_l2 * sign,
            self.r1_l2 * sign,
            self.r2_l1 * sign,
        )
    }
}

/// `(T_x, T_y, T_z)`: the three Pauli-axis trace terms of the DFS channel.
pub fn pauli_transfer_terms(e: &RegisterElements) -> (f64, f64, f64) {
    let direct = e.r1_l1 * e.r2_l2.conj();
    let crossed = e.r1_l2 * e.r2_l1.conj();
    (
        2.0 * (direct + crossed).re,
        2.0 * (direct - crossed).re,
        2.0 * (e.r1_l1.norm_sqr() - e.r1_l2.norm_sqr()),
    )
}

/// Average fidelity of the DFS encoding.
pub fn f_dfs(e: &RegisterElements) -> f64 {
    0.5 + (2.0 * (e.r1_l1.conj() * e.r2_l2).re + e.r1_l1.norm_sqr() - e.r1_l2.norm_sqr()) / 6.0
}

/// Average fidelity of the NDFS encoding (target: logical `Z`, which the
/// fermionic reordering of the doubly occupied pair imprints).
pub fn f_ndfs(e: &RegisterElements) -> f64 {
    let det = e.r1_l1 * e.r2_l2 - e.r1_l2 * e.r2_l1;
    0.5 + (2.0 * det.re + e.r1_l1.norm_sqr() + e.r1_l2.norm_sqr()) / 6.0
}

/// Encodings with a closed-form fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaEncoding {
    Dfs,
    Ndfs,
}

impl FormulaEncoding {
    pub fn fidelity(self, e: &RegisterElements) -> f64 {
        match self {
            FormulaEncoding::Dfs => f_dfs(e),
            FormulaEncoding::Ndfs => f_ndfs(e),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            FormulaEncoding::Dfs => "dfs",
            FormulaEncoding::Ndfs => "ndfs",
        }
    }
}

/// Evolution time of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeChoice {
    /// `tau` of each point's own tuned spec.
    Tau,
    Explicit(f64),
}

impl TimeChoice {
    pub fn resolve(self, spec: &ChainSpec) -> f64 {
        match self {
            TimeChoice::Tau => spec.transfer_time(),
            TimeChoice::Explicit(t) => t,
        }
    }
}

/// Random relative errors on the intraregister couplings.
///
/// Each coupling `g_u` (`u < n`, both registers independently) is multiplied
/// by `1 + eps`, `eps ~ Normal(0, relative_sigma)`. Draw `s` uses the ChaCha
/// stream `s` of `seed`, so every grid point sees the same disorder
/// realisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disorder {
    pub relative_sigma: f64,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub register_size: usize,
    pub channel_lengths: Vec<usize>,
    pub ratios: Vec<f64>,
    pub time: TimeChoice,
    pub encodings: Vec<FormulaEncoding>,
    pub disorder: Option<Disorder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub channel_length: usize,
    #[serde(rename = "n")]
    pub register_size: usize,
    pub ratio: f64,
    pub time: f64,
    pub encoding: FormulaEncoding,
    pub fidelity: f64,
}

/// Rows ordered by channel length, then ascending ratio, then encoding in
/// request order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Full-model fidelity over a `(N, g_I / g_C)` grid with `g_C = 1`.
///
/// Grid points are evaluated in parallel; output order is fixed by grid index.
pub fn sweep_fidelity(req: &SweepRequest) -> Result<SweepResult> {
    if req.register_size != 2 {
        return Err(QstError::InvalidArgument(format!(
            "fidelity formulas need two-qubit registers, got n = {}",
            req.register_size
        )));
    }
    if req.channel_lengths.is_empty() || req.ratios.is_empty() || req.encodings.is_empty() {
        return Err(QstError::InvalidArgument("empty sweep grid".into()));
    }
    if let Some(&len) = req.channel_lengths.iter().find(|&&len| len % 2 == 0) {
        return Err(QstError::EvenChannelLength(len));
    }
    if let Some(&r) = req.ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(QstError::InvalidArgument(format!(
            "ratio must be positive, got {r}"
        )));
    }
    if let Some(d) = &req.disorder {
        if d.samples == 0 || !(d.relative_sigma >= 0.0 && d.relative_sigma.is_finite()) {
            return Err(QstError::InvalidArgument(format!("invalid disorder {d:?}")));
        }
    }

    let points: Vec<(usize, f64)> = req
        .channel_lengths
        .iter()
        .flat_map(|&len| req.ratios.iter().map(move |&r| (len, r)))
        .collect();

    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(len, ratio)| sweep_point(req, len, ratio))
        .collect::<Result<_>>()?;

    Ok(SweepResult {
        rows: per_point.into_iter().flatten().collect(),
    })
}

fn sweep_point(req: &SweepRequest, len: usize, ratio: f64) -> Result<Vec<SweepRow>> {
    let spec = ChainSpec::new(req.register_size, len, 1.0, ratio)?;
    let t = req.time.resolve(&spec);
    let omega = build_full_coupling_matrix(&spec);

    let fidelities: Vec<f64> = match req.disorder {
        Some(d) if d.relative_sigma > 0.0 => {
            let mut per_sample = vec![Vec::with_capacity(d.samples); req.encodings.len()];
            for s in 0..d.samples {
                let disordered = with_register_disorder(&omega, &spec, d, s as u64);
                let e = RegisterElements::from_decomposition(&eigendecompose(&disordered)?, t);
                for (acc, enc) in per_sample.iter_mut().zip(&req.encodings) {
                    acc.push(enc.fidelity(&e));
                }
            }
            per_sample.iter().map(|v| compensated_mean(v)).collect()
        }
        _ => {
            let e = RegisterElements::from_decomposition(&eigendecompose(&omega)?, t);
            req.encodings.iter().map(|enc| enc.fidelity(&e)).collect()
        }
    };

    Ok(req
        .encodings
        .iter()
        .zip(fidelities)
        .map(|(&encoding, fidelity)| SweepRow {
            channel_length: len,
            register_size: req.register_size,
            ratio,
            time: t,
            encoding,
            fidelity,
        })
        .collect())
}

fn with_register_disorder(
    omega: &CouplingMatrix,
    spec: &ChainSpec,
    d: Disorder,
    stream: u64,
) -> CouplingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
    rng.set_stream(stream);
    let normal = Normal::new(0.0, d.relative_sigma).expect("finite non-negative sigma");
    let n = spec.register_size();
    let last = omega.order() - 2;
    let mut out = omega.clone();
    // left bonds 0..n-1, right bonds mirror them from the far end
    for u in 0..n - 1 {
        out.scale_bond(u, 1.0 + normal.sample(&mut rng));
        out.scale_bond(last - u, 1.0 + normal.sample(&mut rng));
    }
    out
}
