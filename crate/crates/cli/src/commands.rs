//! One function per subcommand.  Each resolves its flags, computes through
//! the library, and writes the output file(s), returning the paths written.

use std::path::PathBuf;

use serde::Serialize;

use crate::CliError;
use crate::args::{
    DiscordMaxArgs, DiscordSweepArgs, FringeArgs, HomSweepArgs, NoisyCurveArgs, OutputFormat,
    StateDumpArgs,
};
use crate::output::{
    RunMetadata, StateDump, SweepTable, linear_grid, phase_grid, resolve_out, write_json_value,
};

use twophoton::correlations::{
    BipartiteQubitState, StateParams, discord_branches, geometric_discord_closed,
    local_coherence, maximize_discord, postselect_bipartite, purity,
};
use twophoton::counts::{CountingRun, simulate_counts_with};
use twophoton::interference::{
    FringeOptions, dominant_frequency, harmonic_amplitudes, outcome_distribution,
    output_density_matrix, two_photon_fringe,
};
use twophoton::noise::{NoiseParams, discord_vs_coherence_curve};

const PAIR_COLUMNS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn table_file_name(stem: &str, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!("{stem}.csv"),
        OutputFormat::Json => format!("{stem}.json"),
    }
}

pub fn state_dump(cmd: &StateDumpArgs) -> Result<Vec<PathBuf>, CliError> {
    let pair = cmd.source.resolve()?;
    let gamma = pair.gamma();
    let output = output_density_matrix(gamma)?;
    let basis = output.basis();
    let dim = basis.dim();
    let (qubit, success) = postselect_bipartite(&output, (0, 1), (2, 3))?;
    let params = StateParams::from_gamma(gamma)?;

    let dump = StateDump {
        gamma,
        modes: basis.modes(),
        basis: basis.iter().map(|state| state.to_string()).collect(),
        output_re: (0..dim)
            .map(|r| (0..dim).map(|c| output.entry(r, c).re).collect())
            .collect(),
        output_im: (0..dim)
            .map(|r| (0..dim).map(|c| output.entry(r, c).im).collect())
            .collect(),
        qubit_re: (0..4)
            .map(|r| (0..4).map(|c| qubit.entry(r, c).re).collect())
            .collect(),
        qubit_im: (0..4)
            .map(|r| (0..4).map(|c| qubit.entry(r, c).im).collect())
            .collect(),
        t: params.t,
        u: params.u,
        v: params.v,
        w: params.w,
        success_probability: success,
    };
    let path = resolve_out(cmd.out.out.as_deref(), "state_dump.json")?;
    write_json_value(&path, &dump)?;
    Ok(vec![path])
}

pub fn hom_sweep(cmd: &HomSweepArgs) -> Result<Vec<PathBuf>, CliError> {
    let pair = cmd.source.resolve()?;
    let gamma = pair.gamma();
    let grid = linear_grid(cmd.f_min, cmd.f_max, cmd.steps)?;

    let mut columns: Vec<String> = vec!["f".into()];
    columns.extend(PAIR_COLUMNS.iter().map(|(j, k)| format!("p_{j}{k}")));
    columns.push("singles_per_event".into());
    if cmd.seed.is_some() {
        columns.push("mc_events".into());
        columns.extend(PAIR_COLUMNS.iter().map(|(j, k)| format!("mc_n_{j}{k}")));
        columns.extend((0..4).map(|d| format!("mc_singles_{d}")));
    }

    let mut metadata = RunMetadata::new("hom-sweep");
    metadata.gamma = Some(gamma);
    metadata.f_grid = Some(grid.clone());
    metadata.seed = cmd.seed;
    if cmd.seed.is_some() {
        metadata.pulses = Some(cmd.pulses);
        metadata.window_ns = Some(cmd.window_ns);
    }

    let mut table = SweepTable::new(metadata, columns);
    table.comment("coincidence probabilities over a source-overlap sweep");
    table.comment(format!("gamma = {gamma}"));
    table.comment("f: pairwise source overlap (dimensionless)");
    table.comment("p_jk: coincidence probability of output pair (j, k) per two-photon event");
    table.comment("singles_per_event: mean photons per detector per event, flat by symmetry");
    if let Some(seed) = cmd.seed {
        table.comment(format!(
            "mc_*: Monte Carlo counts, {} pulses, rate {}, seed {seed} + row index",
            cmd.pulses, cmd.rate
        ));
    }

    for (index, &f) in grid.iter().enumerate() {
        let distribution = outcome_distribution(gamma, f)?;
        let mut row = vec![f];
        for (j, k) in PAIR_COLUMNS {
            row.push(distribution.pairs[&(j, k)]);
        }
        row.push(0.5);
        if let Some(seed) = cmd.seed {
            let mut run = CountingRun::new(gamma, f, cmd.rate, cmd.pulses, seed + index as u64);
            run.window_ns = cmd.window_ns;
            run.dark_count_prob = cmd.dark_count_prob;
            let record = simulate_counts_with(&run)?;
            row.push(record.events as f64);
            for (j, k) in PAIR_COLUMNS {
                row.push(record.coincidences[&(j, k)] as f64);
            }
            for detector in 0..4 {
                row.push(record.singles[detector] as f64);
            }
        }
        table.push_row(row);
    }

    let path = resolve_out(
        cmd.out.out.as_deref(),
        &table_file_name("hom_sweep", cmd.out.format),
    )?;
    table.write(cmd.out.format, &path)
}

pub fn fringe(cmd: &FringeArgs) -> Result<Vec<PathBuf>, CliError> {
    let pair = cmd.source.resolve()?;
    let gamma = pair.gamma();
    let phases = phase_grid(cmd.points)?;
    let options = FringeOptions {
        single_photon_contrast: cmd.single_photon_contrast,
        zero_coherence: cmd.zero_coherence,
    };
    let scan = two_photon_fringe(gamma, (cmd.pair_j, cmd.pair_k), &phases, &options)?;

    let mut metadata = RunMetadata::new("fringe");
    metadata.gamma = Some(gamma);
    metadata.phase_grid = Some(phases.clone());
    if cmd.points >= 8 {
        let spread = |values: &[f64]| -> f64 {
            let max = values.iter().fold(f64::MIN, |a, &v| a.max(v));
            let min = values.iter().fold(f64::MAX, |a, &v| a.min(v));
            max - min
        };
        let two_photon_freq = if spread(&scan.two_photon.values) > 1e-12 {
            Some(dominant_frequency(&phases, &scan.two_photon.values)?)
        } else {
            None
        };
        let single_photon_freq = if spread(&scan.single_photon.values) > 1e-12 {
            Some(dominant_frequency(&phases, &scan.single_photon.values)?)
        } else {
            None
        };
        if let Some(f2) = two_photon_freq {
            metadata.derived.insert("two_photon_frequency".into(), f2);
        }
        if let Some(f1) = single_photon_freq {
            metadata.derived.insert("single_photon_frequency".into(), f1);
        }
        if let (Some(f2), Some(f1)) = (two_photon_freq, single_photon_freq) {
            // Period ratio T_single / T_two = f_two / f_single.
            metadata.derived.insert("period_ratio".into(), f2 / f1);
        }
        let amplitudes = harmonic_amplitudes(&scan.two_photon.values);
        if amplitudes.len() > 2 && amplitudes[0] > 0.0 {
            metadata
                .derived
                .insert("modulation_over_mean".into(), amplitudes[2] / amplitudes[0]);
        }
    }

    let mut table = SweepTable::new(
        metadata,
        vec!["phi".into(), "two_photon".into(), "single_photon".into()],
    );
    table.comment("interference fringes of the recombined output pair");
    table.comment(format!(
        "gamma = {gamma}, pair = ({}, {})",
        cmd.pair_j, cmd.pair_k
    ));
    table.comment("phi: phase on the second mode before the recombining splitter (radians)");
    table.comment("two_photon: coincidence probability conditioned on the pair subblock");
    table.comment("single_photon: one-photon detection probability at the first output");
    if cmd.zero_coherence {
        table.comment("diagnostic run: pair-block coherences zeroed before the sweep");
    }
    for (index, &phi) in phases.iter().enumerate() {
        table.push_row(vec![
            phi,
            scan.two_photon.values[index],
            scan.single_photon.values[index],
        ]);
    }

    let path = resolve_out(
        cmd.out.out.as_deref(),
        &table_file_name("fringe", cmd.out.format),
    )?;
    table.write(cmd.out.format, &path)
}

pub fn discord_sweep(cmd: &DiscordSweepArgs) -> Result<Vec<PathBuf>, CliError> {
    let grid = linear_grid(cmd.gamma_min, cmd.gamma_max, cmd.steps)?;
    let mut metadata = RunMetadata::new("discord-sweep");
    metadata.gamma_grid = Some(grid.clone());

    let mut table = SweepTable::new(
        metadata,
        vec![
            "gamma".into(),
            "purity".into(),
            "coherence".into(),
            "discord".into(),
            "active_branch".into(),
        ],
    );
    table.comment("post-selected pair state properties over the intensity ratio");
    table.comment("gamma: intensity ratio of the two sources (dimensionless)");
    table.comment("purity: tr(rho^2)");
    table.comment("coherence: 2 |<0| rho_A |1>| of either reduced qubit");
    table.comment("discord: geometric discord, Bell state = 1");
    table.comment("active_branch: 0 while the coherence branch is subtracted, 1 after the kink");

    for &gamma in &grid {
        let state = BipartiteQubitState::from_gamma(gamma)?;
        let branches = discord_branches(gamma)?;
        let active = if branches.coherence_branch >= branches.correlation_branch {
            0.0
        } else {
            1.0
        };
        table.push_row(vec![
            gamma,
            purity(&state),
            local_coherence(&state),
            geometric_discord_closed(gamma)?,
            active,
        ]);
    }

    let path = resolve_out(
        cmd.out.out.as_deref(),
        &table_file_name("discord_sweep", cmd.out.format),
    )?;
    table.write(cmd.out.format, &path)
}

#[derive(Serialize)]
struct DiscordMaxDump {
    gamma_star: f64,
    d_star: f64,
    kink_gamma: f64,
}

pub fn discord_max(cmd: &DiscordMaxArgs) -> Result<Vec<PathBuf>, CliError> {
    let maximum = maximize_discord(cmd.tol)?;
    let dump = DiscordMaxDump {
        gamma_star: maximum.gamma_star,
        d_star: maximum.d_star,
        kink_gamma: maximum.kink_gamma,
    };
    let path = resolve_out(cmd.out.out.as_deref(), "discord_max.json")?;
    write_json_value(&path, &dump)?;
    Ok(vec![path])
}

pub fn noisy_curve(cmd: &NoisyCurveArgs) -> Result<Vec<PathBuf>, CliError> {
    let params = NoiseParams::new(cmd.lambda, cmd.visibility)?;
    let grid = linear_grid(cmd.gamma_min, cmd.gamma_max, cmd.steps)?;
    let ideal = discord_vs_coherence_curve(&grid, &NoiseParams::ideal())?;
    let noisy = discord_vs_coherence_curve(&grid, &params)?;

    let mut metadata = RunMetadata::new("noisy-curve");
    metadata.gamma_grid = Some(grid.clone());
    metadata
        .derived
        .insert("dephasing_lambda".into(), cmd.lambda);
    metadata
        .derived
        .insert("overlap_visibility".into(), cmd.visibility);

    let mut table = SweepTable::new(
        metadata,
        vec![
            "gamma".into(),
            "coherence".into(),
            "discord_ideal".into(),
            "discord_noisy".into(),
        ],
    );
    table.comment("discord of the noisy post-selected state against the ideal curve");
    table.comment(format!(
        "dephasing_lambda = {}, overlap_visibility = {}",
        cmd.lambda, cmd.visibility
    ));
    table.comment("gamma: intensity ratio (dimensionless)");
    table.comment("coherence: local coherence of the noisy state");
    table.comment("discord_ideal / discord_noisy: geometric discord, Bell state = 1");

    for (clean, dirty) in ideal.iter().zip(&noisy) {
        table.push_row(vec![
            clean.gamma,
            dirty.coherence,
            clean.discord,
            dirty.discord,
        ]);
    }

    let path = resolve_out(
        cmd.out.out.as_deref(),
        &table_file_name("noisy_curve", cmd.out.format),
    )?;
    table.write(cmd.out.format, &path)
}
