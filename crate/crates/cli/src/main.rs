//! Scenario runner: quantum and classical alignment distributions,
//! strong-field deflection, and the kick asymptotics table, with CSV/JSON
//! outputs reproducible byte-for-byte from (config, seed).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use moldeflect::classical::{
    ensemble_alignment_distribution, parallel_kick_asymptotics, rainbow_reference_cdf,
    rainbow_reference_pdf, RainbowVariant,
};
use moldeflect::deflection::deflection_distribution;
use moldeflect::histogram::ks_distance;
use moldeflect::pulse::KickAxis;
use moldeflect::quantum::{coarse_grain, thermal_distribution};
use moldeflect::species::{builtin_species, parse_species_file};
use moldeflect::strongfield::peak_alignment_distribution;
use moldeflect::{KickPulse, RngSpec, ThermalSpec};

use config::{resolve, ConfigError, Scenario};
use output::{fmt, summary_json, write_histogram_csv, write_json, write_lines_csv, write_manifest};

#[derive(Parser)]
#[command(
    name = "moldeflect",
    version,
    about = "Optical deflection of laser-prealigned linear molecules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct CommonArgs {
    /// Scenario file ([section] key = value); flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble size
    #[arg(long)]
    samples: Option<usize>,
    /// Histogram bins
    #[arg(long)]
    bins: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Species name (resolved against the built-in table and --species-file)
    #[arg(long)]
    species: Option<String>,
    /// Extra species records (CSV)
    #[arg(long)]
    species_file: Option<PathBuf>,
    /// Kick strength P (dimensionless)
    #[arg(long)]
    kick: Option<f64>,
    /// Kick polarization: z | x
    #[arg(long)]
    kick_axis: Option<String>,
    /// Thermal J_T (alternative to --temp)
    #[arg(long)]
    jt: Option<f64>,
    /// Rotational temperature in K (alternative to --jt)
    #[arg(long)]
    temp: Option<f64>,
    /// Deflecting-beam peak intensity (W/cm²)
    #[arg(long)]
    intensity: Option<f64>,
    /// Beam waist (µm)
    #[arg(long)]
    waist: Option<f64>,
    /// Beam FWHM (ns)
    #[arg(long)]
    tau: Option<f64>,
    /// Projectile speed (m/s)
    #[arg(long)]
    vx: Option<f64>,
    /// Impact parameter z (µm)
    #[arg(long, allow_negative_numbers = true)]
    impact: Option<f64>,
    /// Deflection regime: weak | strong
    #[arg(long)]
    mode: Option<String>,
    /// Also write the first N raw samples to samples.csv
    #[arg(long)]
    dump_samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete quantum distribution of the alignment factor A_{J,m}
    QuantumDist(CommonArgs),
    /// Classical Monte Carlo distribution of the alignment factor
    ClassicalDist(CommonArgs),
    /// Deflection-velocity distributions through the Gaussian beam
    StrongDeflect(CommonArgs),
    /// Strong-kick asymptotics against Monte Carlo
    Asymptotics {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated kick strengths
        #[arg(long, value_delimiter = ',', required = true)]
        p_list: Vec<f64>,
        /// Comma-separated J_T values
        #[arg(long, value_delimiter = ',', required = true)]
        jt_list: Vec<f64>,
    },
    /// Species table utilities
    Species {
        #[command(subcommand)]
        action: SpeciesAction,
    },
}

#[derive(Subcommand)]
enum SpeciesAction {
    /// Print every known species
    List {
        #[arg(long)]
        species_file: Option<PathBuf>,
    },
    /// Validate a species file
    Validate { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::QuantumDist(args) => run_scenario(&args, cmd_quantum_dist),
        Command::ClassicalDist(args) => run_scenario(&args, cmd_classical_dist),
        Command::StrongDeflect(args) => run_scenario(&args, cmd_strong_deflect),
        Command::Asymptotics {
            common,
            p_list,
            jt_list,
        } => config::resolve_with(&common, false)
            .map_err(RunError::from)
            .and_then(|sc| cmd_asymptotics(&sc, common.dump_samples, &p_list, &jt_list)),
        Command::Species { action } => return run_species(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(RunError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
        Err(RunError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
    }
}

enum RunError {
    Config(ConfigError),
    Numerical(moldeflect::Error),
    Io(std::io::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<moldeflect::Error> for RunError {
    fn from(e: moldeflect::Error) -> Self {
        match e {
            moldeflect::Error::InvalidSpec(_) | moldeflect::Error::InvalidSpecies(_) => {
                RunError::Config(ConfigError(e.to_string()))
            }
            moldeflect::Error::Io(io) => RunError::Io(io),
            other => RunError::Numerical(other),
        }
    }
}

fn run_scenario(
    args: &CommonArgs,
    body: impl FnOnce(&Scenario, Option<usize>) -> Result<(), RunError>,
) -> Result<(), RunError> {
    let scenario = resolve(args)?;
    body(&scenario, args.dump_samples)
}

fn cmd_quantum_dist(sc: &Scenario, _dump: Option<usize>) -> Result<(), RunError> {
    let started = Instant::now();
    let dist = thermal_distribution(&sc.species, &sc.thermal, sc.pulse.as_ref())?;
    let hist = coarse_grain(&dist, sc.bins)?;

    std::fs::create_dir_all(&sc.out_dir)?;
    let discrete = sc.out_dir.join("quantum_discrete.csv");
    write_lines_csv(
        &discrete,
        "A_numerator,A_denominator,A,weight",
        dist.entries().iter().map(|(a, w)| {
            vec![
                a.num.to_string(),
                a.den.to_string(),
                fmt(a.value()),
                fmt(*w),
            ]
        }),
    )?;
    let hist_path = sc.out_dir.join("quantum_hist.csv");
    write_histogram_csv(&hist_path, "A", &hist, None)?;

    let summary = serde_json::json!({
        "lines": dist.entries().len(),
        "mean_A": dist.mean(),
        "std_A": dist.std(),
        "total_weight": dist.total_weight(),
    });
    write_json(&sc.out_dir.join("summary.json"), &summary)?;
    write_manifest(
        &sc.out_dir,
        "quantum-dist",
        &sc.echo,
        sc.seed,
        started,
        serde_json::json!({}),
        &["quantum_discrete.csv", "quantum_hist.csv", "summary.json"],
    )?;
    Ok(())
}

fn cmd_classical_dist(sc: &Scenario, dump: Option<usize>) -> Result<(), RunError> {
    let started = Instant::now();
    let spec = sc.ensemble()?;
    let dist = ensemble_alignment_distribution(&sc.species, &spec, sc.pulse.as_ref());
    let hist = dist.histogram(sc.bins)?;
    let summary_stats = dist.summary();

    // analytic overlay where one of the closed-form laws applies
    let variant = match sc.pulse.map(|p| p.polarization) {
        None => Some(RainbowVariant::Thermal),
        Some(KickAxis::XPerpendicular) => Some(RainbowVariant::Perpendicular),
        Some(KickAxis::ZParallel) => None,
    };

    std::fs::create_dir_all(&sc.out_dir)?;
    let hist_path = sc.out_dir.join("classical_hist.csv");
    match variant {
        Some(v) => {
            let pdf = move |a: f64| rainbow_reference_pdf(a, v);
            write_histogram_csv(&hist_path, "A", &hist, Some(("reference_pdf", &pdf)))?
        }
        None => write_histogram_csv(&hist_path, "A", &hist, None)?,
    }

    if let Some(n) = dump {
        write_lines_csv(
            &sc.out_dir.join("samples.csv"),
            "index,A",
            dist.samples
                .iter()
                .take(n)
                .enumerate()
                .map(|(i, a)| vec![i.to_string(), fmt(*a)]),
        )?;
    }

    let ks = variant.map(|v| ks_distance(&dist.samples, |a| rainbow_reference_cdf(a, v)));
    let summary = serde_json::json!({
        "alignment": summary_json(&summary_stats),
        "rejected_degenerate": dist.rejected,
        "ks_vs_reference": ks,
        "reference": variant.map(|v| match v {
            RainbowVariant::Thermal => "thermal",
            RainbowVariant::Perpendicular => "perpendicular",
        }),
    });
    write_json(&sc.out_dir.join("summary.json"), &summary)?;
    write_manifest(
        &sc.out_dir,
        "classical-dist",
        &sc.echo,
        sc.seed,
        started,
        serde_json::json!({"rejected_degenerate": dist.rejected}),
        &["classical_hist.csv", "summary.json"],
    )?;
    Ok(())
}

fn cmd_strong_deflect(sc: &Scenario, dump: Option<usize>) -> Result<(), RunError> {
    let started = Instant::now();
    let beam = sc.beam.ok_or_else(|| {
        ConfigError("strong-deflect needs a beam: --intensity, --waist, --tau".into())
    })?;
    let geom = sc
        .geometry
        .ok_or_else(|| ConfigError("strong-deflect needs a geometry: --vx, --impact".into()))?;
    let spec = sc.ensemble()?;

    let res = deflection_distribution(&sc.species, &spec, sc.pulse.as_ref(), &beam, &geom, sc.mode);
    if res.v_z.is_empty() {
        return Err(RunError::Numerical(moldeflect::Error::NumericalFailure(
            "every sample failed".into(),
        )));
    }

    // ⟨u⟩ at the peak of the deflecting field (capped ensemble: each sample
    // is one bracketed invariant solve)
    let u_peak_n = spec.n_samples.min(20_000);
    let u_spec =
        moldeflect::classical::EnsembleSpec::new(u_peak_n, sc.thermal, RngSpec::new(sc.seed))
            .map_err(RunError::from)?;
    let u_peak = peak_alignment_distribution(
        &sc.species,
        &u_spec,
        sc.pulse.as_ref(),
        beam.peak_intensity_w_cm2,
    );

    std::fs::create_dir_all(&sc.out_dir)?;
    write_histogram_csv(
        &sc.out_dir.join("vz_hist.csv"),
        "vz_m_s",
        &res.histogram_v_z(sc.bins)?,
        None,
    )?;
    write_histogram_csv(
        &sc.out_dir.join("gamma_hist.csv"),
        "gamma_rad",
        &res.histogram_gamma(sc.bins)?,
        None,
    )?;
    write_histogram_csv(
        &sc.out_dir.join("alignment_peak_hist.csv"),
        "u",
        &u_peak.histogram(sc.bins)?,
        None,
    )?;
    if let Some(n) = dump {
        write_lines_csv(
            &sc.out_dir.join("samples.csv"),
            "index,vz_m_s,gamma_rad,A,flagged",
            res.v_z
                .iter()
                .zip(&res.gamma)
                .zip(&res.alignment)
                .zip(&res.flagged)
                .take(n)
                .enumerate()
                .map(|(i, (((v, g), a), fl))| {
                    vec![
                        i.to_string(),
                        fmt(*v),
                        fmt(*g),
                        fmt(*a),
                        (*fl as u8).to_string(),
                    ]
                }),
        )?;
    }

    let failures = serde_json::json!({
        "rejected_degenerate": res.flags.rejected_degenerate,
        "separatrix_crossed": res.flags.separatrix_crossed,
        "non_adiabatic": res.flags.non_adiabatic,
        "pendular_at_peak": res.flags.pendular_at_peak,
        "failed": res.flags.failed,
        "nonperturbative": res.flags.nonperturbative,
        "u_peak_pendular": u_peak.flags.pendular,
        "u_peak_failed": u_peak.flags.failed,
    });
    let summary = serde_json::json!({
        "v_z": summary_json(&res.summary_v_z()),
        "gamma": summary_json(&res.summary_gamma()),
        "u_at_peak": summary_json(&u_peak.summary()),
        "u_peak_samples": u_peak_n,
        "correlation_vz_alignment_unflagged": res.correlation_v_z_alignment(),
        "flagged_fraction": res.flagged_fraction(),
        "flags": failures,
    });
    write_json(&sc.out_dir.join("summary.json"), &summary)?;
    write_manifest(
        &sc.out_dir,
        "strong-deflect",
        &sc.echo,
        sc.seed,
        started,
        failures,
        &[
            "vz_hist.csv",
            "gamma_hist.csv",
            "alignment_peak_hist.csv",
            "summary.json",
        ],
    )?;
    Ok(())
}

fn cmd_asymptotics(
    sc: &Scenario,
    _dump: Option<usize>,
    p_list: &[f64],
    jt_list: &[f64],
) -> Result<(), RunError> {
    let started = Instant::now();
    if p_list.iter().any(|&p| p <= 0.0) || jt_list.iter().any(|&j| j <= 0.0) {
        return Err(ConfigError("asymptotics lists must be positive".into()).into());
    }

    let mut rows = Vec::new();
    for &jt in jt_list {
        for &p in p_list {
            let thermal = ThermalSpec::from_j_thermal(jt).map_err(RunError::from)?;
            let spec = moldeflect::classical::EnsembleSpec::new(
                sc.samples,
                thermal,
                RngSpec::new(sc.seed),
            )
            .map_err(RunError::from)?;
            let pulse = KickPulse::from_strength(p, KickAxis::ZParallel).map_err(RunError::from)?;
            let d = ensemble_alignment_distribution(&sc.species, &spec, Some(&pulse));
            let stats = d.summary();
            let (mean_a, std_a) = parallel_kick_asymptotics(p, jt);
            rows.push(vec![
                fmt(p),
                fmt(jt),
                fmt(mean_a),
                fmt(std_a),
                fmt(stats.mean),
                fmt(stats.std),
                fmt(((stats.mean - mean_a) / mean_a).abs()),
                fmt(((stats.std - std_a) / std_a).abs()),
            ]);
        }
    }

    std::fs::create_dir_all(&sc.out_dir)?;
    write_lines_csv(
        &sc.out_dir.join("asymptotics.csv"),
        "P,J_T,mean_A_analytic,std_A_analytic,mean_A_mc,std_A_mc,rel_err_mean,rel_err_std",
        rows.into_iter(),
    )?;
    write_manifest(
        &sc.out_dir,
        "asymptotics",
        &sc.echo,
        sc.seed,
        started,
        serde_json::json!({}),
        &["asymptotics.csv"],
    )?;
    Ok(())
}

fn run_species(action: SpeciesAction) -> ExitCode {
    match action {
        SpeciesAction::List { species_file } => {
            let mut table = builtin_species();
            if let Some(path) = species_file {
                match std::fs::read_to_string(&path)
                    .map_err(|e| e.to_string())
                    .and_then(|t| parse_species_file(&t).map_err(|e| e.to_string()))
                {
                    Ok(extra) => table.extend(extra),
                    Err(e) => {
                        eprintln!("config error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            println!("name,alpha_par_A3,alpha_perp_A3,B_cm1,mass_amu,j_parity");
            for s in table {
                println!(
                    "{},{},{},{},{},{}",
                    s.name,
                    s.alpha_parallel_a3,
                    s.alpha_perp_a3,
                    s.b_cm1,
                    s.mass_amu,
                    s.j_parity.as_str()
                );
            }
            ExitCode::SUCCESS
        }
        SpeciesAction::Validate { file } => {
            match std::fs::read_to_string(&file)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_species_file(&t).map_err(|e| e.to_string()))
            {
                Ok(records) => {
                    println!("{}: {} valid records", file.display(), records.len());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("config error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
