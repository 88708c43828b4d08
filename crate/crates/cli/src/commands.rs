//! Subcommand implementations.

use qst_core::fidelity::{f_dfs, f_ndfs};
use qst_core::model::build_full_coupling_matrix;
use qst_core::numeric::{linear_spaced, log_spaced};
use qst_core::oracle::{
    average_fidelity_bruteforce, effective_swap_check, remaining_subspaces, ChannelInit,
    DephasingModel, Encoding, MAX_SITES,
};
use qst_core::{
    eigendecompose, run_verification, sweep_fidelity, ChainSpec, Disorder, FormulaEncoding,
    MatrixKind, RegisterElements, SweepRequest, SweepResult, TimeChoice, VerifyOptions,
    VerifyReport,
};

use crate::config::{CommandKind, EncodingChoice, RunConfig, Spacing, TimeSetting};
use crate::output::{self, OracleRow};
use crate::CliError;

/// Whether a command's own checks passed (sweeps and oracle runs always do).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ChecksFailed,
}

pub fn execute(cfg: &RunConfig) -> Result<Status, CliError> {
    match cfg.command {
        CommandKind::Sweep => {
            let result = run_sweep(cfg)?;
            let text = output::render(cfg.format, &result.rows, || output::sweep_csv(&result))?;
            output::emit(cfg.output_path.as_deref(), &text)?;
            Ok(Status::Success)
        }
        CommandKind::Oracle => {
            let rows = run_oracle(cfg)?;
            let text = output::render(cfg.format, &rows, || output::oracle_csv(&rows))?;
            output::emit(cfg.output_path.as_deref(), &text)?;
            Ok(Status::Success)
        }
        CommandKind::Phases => {
            let report = effective_swap_check(cfg.n, cfg.tolerance.unwrap_or(1e-8))?;
            let text = output::render(cfg.format, &report.rows, || {
                output::phases_csv(&report.rows)
            })?;
            output::emit(cfg.output_path.as_deref(), &text)?;
            Ok(if report.all_match() {
                Status::Success
            } else {
                Status::ChecksFailed
            })
        }
        CommandKind::Verify => {
            let report = run_verify(cfg)?;
            output::emit(cfg.output_path.as_deref(), &output::to_json(&report)?)?;
            Ok(if report.overall_pass {
                Status::Success
            } else {
                Status::ChecksFailed
            })
        }
    }
}

pub fn ratio_grid(cfg: &RunConfig) -> Vec<f64> {
    match cfg.spacing {
        Spacing::Log => log_spaced(cfg.ratio_min, cfg.ratio_max, cfg.ratio_steps),
        Spacing::Linear => linear_spaced(cfg.ratio_min, cfg.ratio_max, cfg.ratio_steps),
    }
}

fn time_choice(setting: TimeSetting) -> TimeChoice {
    match setting {
        TimeSetting::Tau => TimeChoice::Tau,
        TimeSetting::Explicit(t) => TimeChoice::Explicit(t),
    }
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let encodings = match cfg.encoding {
        EncodingChoice::Dfs => vec![FormulaEncoding::Dfs],
        EncodingChoice::Ndfs => vec![FormulaEncoding::Ndfs],
        EncodingChoice::Both | EncodingChoice::All => {
            vec![FormulaEncoding::Dfs, FormulaEncoding::Ndfs]
        }
    };
    let disorder = (cfg.disorder_sigma > 0.0).then_some(Disorder {
        relative_sigma: cfg.disorder_sigma,
        seed: cfg.seed,
        samples: cfg.shots,
    });
    Ok(sweep_fidelity(&SweepRequest {
        register_size: cfg.n,
        channel_lengths: cfg.channel_lengths.clone(),
        ratios: ratio_grid(cfg),
        time: time_choice(cfg.time),
        encodings,
        disorder,
    })?)
}

pub fn run_oracle(cfg: &RunConfig) -> Result<Vec<OracleRow>, CliError> {
    if let Some(&len) = cfg
        .channel_lengths
        .iter()
        .find(|&&len| len + 2 * cfg.n > MAX_SITES)
    {
        return Err(CliError::Usage(format!(
            "oracle is limited to {MAX_SITES} sites; N = {len} with n = {} needs {}",
            cfg.n,
            len + 2 * cfg.n
        )));
    }
    let encodings: Vec<Encoding> = match cfg.encoding {
        EncodingChoice::Dfs => vec![Encoding::DFS],
        EncodingChoice::Ndfs => vec![Encoding::NDFS],
        EncodingChoice::Both => vec![Encoding::DFS, Encoding::NDFS],
        EncodingChoice::All => [Encoding::DFS, Encoding::NDFS]
            .into_iter()
            .chain(remaining_subspaces())
            .collect(),
    };
    let dephasing = if cfg.sigma_lambda > 0.0 {
        DephasingModel::gaussian(cfg.sigma_lambda, cfg.shots, cfg.seed)?
    } else {
        DephasingModel::none()
    };

    let mut rows = Vec::new();
    for &len in &cfg.channel_lengths {
        for ratio in ratio_grid(cfg) {
            let spec = ChainSpec::new(cfg.n, len, 1.0, ratio)?;
            let t = time_choice(cfg.time).resolve(&spec);
            let elements = RegisterElements::from_decomposition(
                &eigendecompose(&build_full_coupling_matrix(&spec))?,
                t,
            );
            for &encoding in &encodings {
                let fidelity_oracle = average_fidelity_bruteforce(
                    &spec,
                    MatrixKind::Full,
                    encoding,
                    ChannelInit::MaximallyMixed,
                    dephasing,
                    t,
                )?;
                // the DFS closed form is exact under collective dephasing
                let fidelity_formula = match encoding {
                    e if e == Encoding::DFS => Some(f_dfs(&elements)),
                    e if e == Encoding::NDFS && cfg.sigma_lambda == 0.0 => Some(f_ndfs(&elements)),
                    _ => None,
                };
                rows.push(OracleRow {
                    channel_length: len,
                    register_size: cfg.n,
                    ratio,
                    time: t,
                    encoding: encoding.tag(),
                    sigma_lambda: cfg.sigma_lambda,
                    fidelity_oracle,
                    fidelity_formula,
                });
            }
        }
    }
    Ok(rows)
}

pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    Ok(run_verification(&VerifyOptions {
        tolerance_override: cfg.tolerance,
        shots: cfg.shots,
        seed: cfg.seed,
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::parse_from(std::iter::once("qst").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn sweep_grid_order() {
        let result = run_sweep(&cfg(&["--channel-lengths", "3,5", "--ratio-steps", "3"])).unwrap();
        assert_eq!(result.rows.len(), 12);
        assert_eq!(result.rows[0].channel_length, 3);
        assert_eq!(result.rows[0].encoding, FormulaEncoding::Dfs);
        assert_eq!(result.rows[1].encoding, FormulaEncoding::Ndfs);
        assert!(result.rows[0].ratio < result.rows[2].ratio);
        assert_eq!(result.rows[6].channel_length, 5);
    }

    #[test]
    fn linear_spacing() {
        let c = cfg(&[
            "--spacing",
            "linear",
            "--ratio-min",
            "0.1",
            "--ratio-max",
            "0.3",
            "--ratio-steps",
            "3",
        ]);
        assert_eq!(ratio_grid(&c), vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn oracle_rows_agree_with_formulas() {
        let rows = run_oracle(&cfg(&[
            "oracle",
            "--ratio-steps",
            "2",
            "--ratio-min",
            "0.05",
            "--ratio-max",
            "0.5",
        ]))
        .unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!((r.fidelity_oracle - r.fidelity_formula.unwrap()).abs() < 1e-8);
        }
        let all = run_oracle(&cfg(&[
            "oracle",
            "--ratio-steps",
            "1",
            "--ratio-min",
            "0.1",
            "--ratio-max",
            "0.1",
            "--encoding",
            "all",
        ]))
        .unwrap();
        assert_eq!(all.len(), 6);
        assert!(all[2..].iter().all(|r| r.fidelity_formula.is_none()));
    }

    #[test]
    fn oracle_size_cap_is_usage_error() {
        let err = run_oracle(&cfg(&["oracle", "--channel-lengths", "9"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
