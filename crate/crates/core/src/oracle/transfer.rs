//! End-to-end brute-force transfer of one logical qubit with `n = 2`.
//!
//! Pipeline per logical input state and per environment configuration:
//! encode on `(L1, L2)`, evolve with the many-body Hamiltonian, imprint a
//! collective dephasing phase, decode on `(R1, R2)` and reduce to `R1`.
//! The right register starts in `|down down>` and the channel in a
//! computational basis configuration; a maximally mixed channel is the
//! uniform average over all of them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QstError, Result};
use crate::model::{ChainSpec, MatrixKind};
use crate::numeric::compensated_mean;

use super::gates::{apply_collective_dephasing, encode_cnot};
use super::hamiltonian::{build_spin_hamiltonian, Evolver};
use super::state::{ManyBodyState, QubitDensity, Spin};

/// Two-qubit basis state of a register, `(qubit 1, qubit 2)`.
pub type PairState = [Spin; 2];

/// Logical basis `{|0>, |1>}` inside a two-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LogicalBasis {
    pub zero: PairState,
    pub one: PairState,
}

impl LogicalBasis {
    pub fn new(zero: PairState, one: PairState) -> Result<Self> {
        if zero == one {
            return Err(QstError::InvalidArgument(
                "logical basis states must differ".into(),
            ));
        }
        Ok(Self { zero, one })
    }

    /// e.g. `du-ud` for `{|down up>, |up down>}`.
    pub fn tag(&self) -> String {
        let s = |p: PairState| format!("{}{}", p[0].symbol(), p[1].symbol());
        format!("{}-{}", s(self.zero), s(self.one))
    }
}

/// How the logical qubit is written into and read out of the registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// `L1` holds the input, `L2` starts in `l2_preparation`, then
    /// `CNOT(L1 -> L2)`; decoding is `CNOT(R1 -> R2)`. Preparing `L2` up
    /// yields the dephasing-free pair `{|du>, |ud>}`; preparing it down
    /// yields `{|dd>, |uu>}`.
    Cnot { l2_preparation: Spin },
    /// Ideal encoder into an arbitrary basis pair. The decoder is the basis
    /// permutation of `(R1, R2)` sending `zero -> |dd>`, `one -> |ud>` and the
    /// two leftover states, in ascending order, to `|du>` and `|uu>`.
    Subspace(LogicalBasis),
}

impl Encoding {
    pub const DFS: Encoding = Encoding::Cnot {
        l2_preparation: Spin::Up,
    };
    pub const NDFS: Encoding = Encoding::Cnot {
        l2_preparation: Spin::Down,
    };

    /// Basis pair written into `(L1, L2)`.
    pub fn logical_basis(&self) -> LogicalBasis {
        match *self {
            Encoding::Cnot { l2_preparation: p } => {
                let flip = |s: Spin| if s == Spin::Up { Spin::Down } else { Spin::Up };
                LogicalBasis {
                    zero: [Spin::Down, p],
                    one: [Spin::Up, flip(p)],
                }
            }
            Encoding::Subspace(basis) => basis,
        }
    }

    /// Reference operation the transfer is scored against.
    ///
    /// The doubly occupied `|uu>` arrives with a fermionic reordering sign,
    /// so the `{|dd>, |uu>}` pair is ideally a logical `Z`.
    pub fn ideal_frame(&self) -> TargetFrame {
        let basis = self.logical_basis();
        let dfs = Encoding::DFS.logical_basis();
        let ndfs = Encoding::NDFS.logical_basis();
        if basis == dfs {
            TargetFrame::Identity
        } else if basis == ndfs {
            TargetFrame::LogicalZ
        } else {
            TargetFrame::BestPauli
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            e if e == Encoding::DFS => "dfs".into(),
            e if e == Encoding::NDFS => "ndfs".into(),
            e => e.logical_basis().tag(),
        }
    }
}

/// The four two-dimensional basis pairs other than the DFS and NDFS pairs.
pub fn remaining_subspaces() -> [Encoding; 4] {
    use Spin::{Down as D, Up as U};
    [
        Encoding::Subspace(LogicalBasis {
            zero: [D, D],
            one: [D, U],
        }),
        Encoding::Subspace(LogicalBasis {
            zero: [D, D],
            one: [U, D],
        }),
        Encoding::Subspace(LogicalBasis {
            zero: [U, U],
            one: [D, U],
        }),
        Encoding::Subspace(LogicalBasis {
            zero: [U, U],
            one: [U, D],
        }),
    ]
}

/// Unitary the output is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFrame {
    Identity,
    LogicalZ,
    /// Best of `{I, X, Y, Z}` on the averaged channel.
    BestPauli,
}

/// Initial state of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelInit {
    /// Uniform mixture of every configuration (infinite temperature).
    MaximallyMixed,
    /// One configuration; bit `j` is channel site `j` (chain site `2 + j`).
    BasisState(usize),
}

/// Classical collective dephasing field `lambda ~ Normal(0, sigma)`, one draw
/// per shot. Shot `s` draws from ChaCha stream `s` of `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingModel {
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
}

impl DephasingModel {
    pub fn none() -> Self {
        Self {
            sigma: 0.0,
            samples: 1,
            seed: 0,
        }
    }

    pub fn gaussian(sigma: f64, samples: usize, seed: u64) -> Result<Self> {
        let model = Self {
            sigma,
            samples,
            seed,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(QstError::InvalidArgument(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.samples == 0 {
            return Err(QstError::InvalidArgument(
                "dephasing needs at least one sample".into(),
            ));
        }
        Ok(())
    }

    /// Field value of every shot (a single `0.0` when `sigma == 0`).
    pub fn draws(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.sigma == 0.0 {
            return Ok(vec![0.0]);
        }
        let normal =
            Normal::new(0.0, self.sigma).map_err(|e| QstError::InvalidArgument(e.to_string()))?;
        Ok((0..self.samples as u64)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(s);
                normal.sample(&mut rng)
            })
            .collect())
    }
}

/// The six Pauli-axis input states `(beta0, beta1)` over `(down, up)`:
/// `+x, -x, +y, -y, +z (down), -z (up)`. Averaging over them is exact for
/// qubit channels.
pub fn pauli_axis_states() -> [[Complex64; 2]; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    [
        [c(h, 0.0), c(h, 0.0)],
        [c(h, 0.0), c(-h, 0.0)],
        [c(h, 0.0), c(0.0, h)],
        [c(h, 0.0), c(0.0, -h)],
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
    ]
}

const ENV_CHUNK: usize = 16;

/// Parameters of one brute-force transfer run.
#[derive(Debug, Clone)]
pub struct TransferExperiment {
    pub spec: ChainSpec,
    pub kind: MatrixKind,
    pub encoding: Encoding,
    pub channel: ChannelInit,
    pub dephasing: DephasingModel,
    pub time: f64,
}

/// Decoded `R1` states of every shot and input.
#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub draws: Vec<f64>,
    /// `outputs[shot][input]`, inputs in [`pauli_axis_states`] order,
    /// averaged over environment configurations.
    pub outputs: Vec<[QubitDensity; 6]>,
    pub frame: TargetFrame,
}

impl TransferExperiment {
    pub fn new(spec: &ChainSpec, kind: MatrixKind, encoding: Encoding, time: f64) -> Self {
        Self {
            spec: spec.clone(),
            kind,
            encoding,
            channel: ChannelInit::MaximallyMixed,
            dephasing: DephasingModel::none(),
            time,
        }
    }

    pub fn with_channel(mut self, channel: ChannelInit) -> Self {
        self.channel = channel;
        self
    }

    pub fn with_dephasing(mut self, dephasing: DephasingModel) -> Self {
        self.dephasing = dephasing;
        self
    }

    pub fn run(&self) -> Result<TransferOutcome> {
        if self.spec.register_size() != 2 {
            return Err(QstError::InvalidArgument(format!(
                "the encode/decode pipeline needs two-qubit registers, got n = {}",
                self.spec.register_size()
            )));
        }
        let evolver = build_spin_hamiltonian(&self.spec, self.kind)?.diagonalize()?;
        let sites = evolver.sites();
        let envs = environment_configs(self.channel, sites)?;
        let draws = self.dephasing.draws()?;
        let pipeline = Pipeline {
            evolver: &evolver,
            encoding: self.encoding,
            sites,
            time: self.time,
        };

        // Fixed chunking keeps the reduction order independent of threads.
        let partial: Vec<Vec<[QubitDensity; 6]>> = envs
            .par_chunks(ENV_CHUNK)
            .map(|chunk| pipeline.accumulate(chunk, &draws))
            .collect::<Result<_>>()?;

        let scale = 1.0 / envs.len() as f64;
        let mut outputs = vec![[zero_density(); 6]; draws.len()];
        for chunk in &partial {
            for (acc, shot) in outputs.iter_mut().zip(chunk) {
                for (a, s) in acc.iter_mut().zip(shot) {
                    add_scaled(a, s, 1.0);
                }
            }
        }
        for shot in &mut outputs {
            for rho in shot.iter_mut() {
                scale_density(rho, scale);
            }
        }
        Ok(TransferOutcome {
            draws,
            outputs,
            frame: self.encoding.ideal_frame(),
        })
    }
}

impl TransferOutcome {
    /// Channel averaged over shots.
    pub fn mean_outputs(&self) -> [QubitDensity; 6] {
        let mut mean = [zero_density(); 6];
        for shot in &self.outputs {
            for (m, s) in mean.iter_mut().zip(shot) {
                add_scaled(m, s, 1.0 / self.outputs.len() as f64);
            }
        }
        mean
    }

    /// Pauli frame used for scoring; resolves `BestPauli` on the mean channel.
    pub fn resolved_frame(&self) -> Pauli {
        match self.frame {
            TargetFrame::Identity => Pauli::I,
            TargetFrame::LogicalZ => Pauli::Z,
            TargetFrame::BestPauli => {
                let mean = self.mean_outputs();
                *Pauli::ALL
                    .iter()
                    .max_by(|a, b| {
                        channel_fidelity(&mean, **a).total_cmp(&channel_fidelity(&mean, **b))
                    })
                    .expect("four frames")
            }
        }
    }

    /// Average fidelity of the shot-averaged channel.
    pub fn average_fidelity(&self) -> f64 {
        channel_fidelity(&self.mean_outputs(), self.resolved_frame())
    }

    /// Average fidelity of each shot, scored in [`Self::resolved_frame`].
    pub fn shot_fidelities(&self) -> Vec<f64> {
        let frame = self.resolved_frame();
        self.outputs
            .iter()
            .map(|shot| channel_fidelity(shot, frame))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn apply(self, v: [Complex64; 2]) -> [Complex64; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => v,
            Pauli::X => [v[1], v[0]],
            Pauli::Y => [-i * v[1], i * v[0]],
            Pauli::Z => [v[0], -v[1]],
        }
    }
}

/// `mean_i <P psi_i| rho_i |P psi_i>` over the six axis states.
pub fn channel_fidelity(outputs: &[QubitDensity; 6], frame: Pauli) -> f64 {
    let overlaps: Vec<f64> = pauli_axis_states()
        .iter()
        .zip(outputs)
        .map(|(psi, rho)| {
            let v = frame.apply(*psi);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += v[a].conj() * rho[a][b] * v[b];
                }
            }
            acc.re
        })
        .collect();
    compensated_mean(&overlaps)
}

/// Average fidelity of the brute-force pipeline, scored against the
/// encoding's [`Encoding::ideal_frame`].
pub fn average_fidelity_bruteforce(
    spec: &ChainSpec,
    kind: MatrixKind,
    encoding: Encoding,
    channel: ChannelInit,
    dephasing: DephasingModel,
    time: f64,
) -> Result<f64> {
    let outcome = TransferExperiment::new(spec, kind, encoding, time)
        .with_channel(channel)
        .with_dephasing(dephasing)
        .run()?;
    Ok(outcome.average_fidelity())
}

fn environment_configs(channel: ChannelInit, sites: usize) -> Result<Vec<usize>> {
    let env_bits = sites - 4;
    match channel {
        ChannelInit::MaximallyMixed => Ok((0..1usize << env_bits).map(|c| c << 2).collect()),
        ChannelInit::BasisState(bits) if bits >> env_bits == 0 => Ok(vec![bits << 2]),
        ChannelInit::BasisState(bits) => Err(QstError::InvalidArgument(format!(
            "channel configuration {bits:#b} does not fit {env_bits} sites"
        ))),
    }
}

struct Pipeline<'a> {
    evolver: &'a Evolver,
    encoding: Encoding,
    sites: usize,
    time: f64,
}

const L1: usize = 0;
const L2: usize = 1;

impl Pipeline<'_> {
    fn r1(&self) -> usize {
        self.sites - 1
    }

    fn r2(&self) -> usize {
        self.sites - 2
    }

    fn encode(&self, input: [Complex64; 2], env: usize) -> Result<ManyBodyState> {
        match self.encoding {
            Encoding::Cnot { l2_preparation } => {
                let base = env | l2_preparation.bit() << L2;
                let psi = ManyBodyState::from_terms(
                    self.sites,
                    &[(base, input[0]), (base | 1 << L1, input[1])],
                )?;
                encode_cnot(&psi, L1, L2)
            }
            Encoding::Subspace(basis) => {
                let place = |p: PairState| env | p[0].bit() << L1 | p[1].bit() << L2;
                ManyBodyState::from_terms(
                    self.sites,
                    &[(place(basis.zero), input[0]), (place(basis.one), input[1])],
                )
            }
        }
    }

    fn decode(&self, psi: &ManyBodyState) -> Result<ManyBodyState> {
        match self.encoding {
            Encoding::Cnot { .. } => encode_cnot(psi, self.r1(), self.r2()),
            Encoding::Subspace(basis) => {
                let (r1, r2) = (self.r1(), self.r2());
                let table = subspace_decoder(basis);
                let mask = !(1usize << r1 | 1usize << r2);
                let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
                for (config, &a) in psi.amplitudes().iter().enumerate() {
                    let key = (config >> r1 & 1) << 1 | (config >> r2 & 1);
                    let (n1, n2) = table[key];
                    out[config & mask | n1 << r1 | n2 << r2] = a;
                }
                Ok(ManyBodyState::from_raw(self.sites, out))
            }
        }
    }

    /// Sum over `envs` of decoded `R1` states, per shot and input.
    fn accumulate(&self, envs: &[usize], draws: &[f64]) -> Result<Vec<[QubitDensity; 6]>> {
        let mut acc = vec![[zero_density(); 6]; draws.len()];
        for &env in envs {
            for (i, input) in pauli_axis_states().into_iter().enumerate() {
                let evolved = self.evolver.evolve(&self.encode(input, env)?, self.time)?;
                for (shot, &lambda) in draws.iter().enumerate() {
                    let dephased = apply_collective_dephasing(&evolved, lambda, self.time);
                    let rho = self.decode(&dephased)?.reduced_qubit(self.r1());
                    add_scaled(&mut acc[shot][i], &rho, 1.0);
                }
            }
        }
        Ok(acc)
    }
}

/// `table[(r1 << 1) | r2] = (r1', r2')` for a [`Encoding::Subspace`] decoder.
fn subspace_decoder(basis: LogicalBasis) -> [(usize, usize); 4] {
    let key = |p: PairState| p[0].bit() << 1 | p[1].bit();
    let (z, o) = (key(basis.zero), key(basis.one));
    let mut table = [(0, 0); 4];
    table[z] = (0, 0);
    table[o] = (1, 0);
    let mut spare = [(0, 1), (1, 1)].into_iter();
    for (k, slot) in table.iter_mut().enumerate() {
        if k != z && k != o {
            *slot = spare.next().expect("two leftover states");
        }
    }
    table
}

fn zero_density() -> QubitDensity {
    [[Complex64::new(0.0, 0.0); 2]; 2]
}

fn add_scaled(acc: &mut QubitDensity, rho: &QubitDensity, scale: f64) {
    for a in 0..2 {
        for b in 0..2 {
            acc[a][b] += rho[a][b] * scale;
        }
    }
}

fn scale_density(rho: &mut QubitDensity, scale: f64) {
    for row in rho.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
}

/// Outcome of [`dephasing_protection_report`].
#[derive(Debug, Clone, Serialize)]
pub struct DephasingReport {
    pub sigma: f64,
    pub time: f64,
    pub shots: usize,
    /// `max_s |F_dfs(lambda_s) - F_dfs(0)|`.
    pub dfs_max_deviation: f64,
    /// Mean over shots of `Re(rho01(lambda_s) / rho01(0))` for the decoded
    /// NDFS `|+>` input.
    pub ndfs_suppression: f64,
    pub ndfs_standard_error: f64,
    /// `exp(-8 sigma^2 t^2)`: Gaussian average of `exp(-4 i lambda t)`.
    pub ndfs_expected_suppression: f64,
}

impl DephasingReport {
    /// `|measured - expected|` in units of the Monte Carlo standard error.
    pub fn ndfs_deviation(&self) -> f64 {
        (self.ndfs_suppression - self.ndfs_expected_suppression).abs()
    }
}

/// Runs the DFS and NDFS pipelines under collective dephasing with a
/// maximally mixed channel.
pub fn dephasing_protection_report(
    spec: &ChainSpec,
    kind: MatrixKind,
    dephasing: DephasingModel,
    time: f64,
) -> Result<DephasingReport> {
    let run = |encoding: Encoding, model: DephasingModel| {
        TransferExperiment::new(spec, kind, encoding, time)
            .with_dephasing(model)
            .run()
    };

    let dfs_clean = run(Encoding::DFS, DephasingModel::none())?.average_fidelity();
    let dfs = run(Encoding::DFS, dephasing)?;
    let dfs_max_deviation = dfs
        .shot_fidelities()
        .iter()
        .map(|f| (f - dfs_clean).abs())
        .fold(0.0, f64::max);

    // input 0 is |+>
    let reference = run(Encoding::NDFS, DephasingModel::none())?.outputs[0][0][0][1];
    if reference.norm() < 1e-12 {
        return Err(QstError::InvalidArgument(
            "no decoded NDFS coherence at this time to compare against".into(),
        ));
    }
    let ndfs = run(Encoding::NDFS, dephasing)?;
    let ratios: Vec<f64> = ndfs
        .outputs
        .iter()
        .map(|shot| (shot[0][0][1] / reference).re)
        .collect();
    let mean = compensated_mean(&ratios);
    let shots = ratios.len();
    let standard_error = if shots > 1 {
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (shots - 1) as f64;
        (var / shots as f64).sqrt()
    } else {
        0.0
    };

    Ok(DephasingReport {
        sigma: dephasing.sigma,
        time,
        shots,
        dfs_max_deviation,
        ndfs_suppression: mean,
        ndfs_standard_error: standard_error,
        ndfs_expected_suppression: (-8.0 * dephasing.sigma.powi(2) * time.powi(2)).exp(),
    })
}
