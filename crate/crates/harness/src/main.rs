// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use quditfid_harness::critical::{critical_curve_experiment, default_n_list};
use quditfid_harness::gate_dependence::gate_dependence_experiment;
use quditfid_harness::platforms::{
    bundled_platforms, parse_platforms, platform_report, TauSource, DEFAULT_REFERENCE,
};
use quditfid_harness::spec::{ChannelSpec, GammaGrid, GateReference, GateSpec};
use quditfid_harness::{run_experiment, ExperimentSpec, Scale};

#[derive(Parser)]
#[command(name = "quditfid", version, about = "Average gate infidelity experiments for noisy qudits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every random draw of the run.
    #[arg(long, default_value_t = 20240101)]
    seed: u64,
    /// Output directory; created if missing.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    scale: Scale,
}

#[derive(Subcommand)]
enum Command {
    /// Dephasing slopes of single qudits against d(d-1)/12.
    SlopesQudit(Common),
    /// Dephasing slopes of qubit ensembles.
    SlopesQubits(Common),
    /// Relative deviation from linearity over a wide gamma*t range.
    DeviationSweep(Common),
    /// Slope spread over GRAPE-synthesised random gates.
    GateDependence {
        #[command(flatten)]
        common: Common,
        /// Override the number of random gates per dimension.
        #[arg(long)]
        n_gates: Option<usize>,
        /// GRAPE gate-infidelity goal.
        #[arg(long, default_value_t = 1e-6)]
        goal: f64,
        /// Gate the noisy channel is compared with.
        #[arg(long, value_enum, default_value_t = GateReference::Target)]
        reference: GateReference,
    },
    /// Slopes for Jx, J+ and Jx+Jy+Jz relative to Jz.
    ChannelsCompare(Common),
    /// Simulated c_d / c_{b,n} for d = 2^n.
    CriticalCurve(Common),
    /// Qudit-vs-qubit advantage report from platform data.
    Platforms {
        #[command(flatten)]
        common: Common,
        /// Platform CSV; defaults to the bundled table.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Label of the qubit reference platform.
        #[arg(long, default_value = DEFAULT_REFERENCE)]
        reference: String,
        #[arg(long, value_enum, default_value_t = TauSource::Tabulated)]
        tau: TauSource,
    },
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run_simple(spec: ExperimentSpec, out: &Path) -> anyhow::Result<()> {
    let output = run_experiment(&spec)?;
    for f in output.fits() {
        println!(
            "{} {:>3} {:<7} slope {:.9e} theory {:.9e} dev {:+.3e} 1-R2 {:.2e} [{}]",
            f.system, f.size, f.gate, f.slope_fit, f.slope_theory, f.relative_deviation,
            f.one_minus_r2, f.method
        );
    }
    let (csv, json) = output.write(out)?;
    report(&[csv, json]);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::SlopesQudit(c) => run_simple(ExperimentSpec::slopes_qudit(c.scale, c.seed), &c.out),
        Command::SlopesQubits(c) => run_simple(ExperimentSpec::slopes_qubits(c.scale, c.seed), &c.out),
        Command::DeviationSweep(c) => {
            run_simple(ExperimentSpec::deviation_sweep(c.scale, c.seed), &c.out)
        }
        Command::ChannelsCompare(c) => {
            for ch in [ChannelSpec::Jz, ChannelSpec::Jx, ChannelSpec::Jplus, ChannelSpec::JxJyJz] {
                run_simple(ExperimentSpec::channels_compare(c.scale, c.seed, ch), &c.out)?;
            }
            Ok(())
        }
        Command::GateDependence { common: c, n_gates, goal, reference } => {
            let mut spec = ExperimentSpec::gate_dependence(c.scale, c.seed);
            if let Some(n) = n_gates {
                spec.gates = GateSpec::Cue { n_gates: n, seed: c.seed };
            }
            spec.grape.goal_infidelity = goal;
            spec.grape.reference = reference;
            let out = gate_dependence_experiment(&spec)?;
            for s in &out.stats {
                println!(
                    "d={} gates={} failed={} mean {:+.3e} std {:.3e} range [{:+.3e}, {:+.3e}]",
                    s.d, s.n_converged, s.n_failed, s.mean, s.std, s.min, s.max
                );
            }
            report(&out.write(&c.out)?);
            Ok(())
        }
        Command::CriticalCurve(c) => {
            let grid = GammaGrid::new(0.0, 1e-4, 11)?;
            let out = critical_curve_experiment(&default_n_list(c.scale), grid, c.seed)?;
            for r in &out.rows {
                println!(
                    "n={} d={:>2} simulated {:.6} analytic {:.6} naive {:.4} [{} / {}]",
                    r.n, r.d, r.ratio_simulated, r.ratio_analytic, r.ratio_naive,
                    r.method_qudit, r.method_qubits
                );
            }
            let (csv, json) = out.write(&c.out)?;
            report(&[csv, json]);
            Ok(())
        }
        Command::Platforms { common: c, data, reference, tau } => {
            let records = match data {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    parse_platforms(&text)?
                }
                None => bundled_platforms()?,
            };
            let reference = records
                .iter()
                .find(|r| r.label == reference)
                .ok_or_else(|| anyhow!("reference platform `{reference}` not found"))?;
            let rep = platform_report(&records, reference, tau)?;
            for r in &rep.rows {
                let ratio = r.tau_ratio.map_or("-".to_string(), |x| format!("{x:.3}"));
                let max_d = r.max_advantageous_d.map_or("-".to_string(), |x| x.to_string());
                println!(
                    "{:<28} d={:<3} ratio {:<8} critical {:<8.3} max d {:<4} {}{}",
                    r.label, r.d, ratio, r.critical_ratio, max_d, r.verdict,
                    if r.note.is_empty() { String::new() } else { format!(" ({})", r.note) }
                );
            }
            let (csv, json) = rep.write(&c.out)?;
            report(&[csv, json]);
            Ok(())
        }
    }
}
