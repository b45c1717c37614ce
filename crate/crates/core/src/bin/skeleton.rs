use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use skeleton_spectra::config::{OutputFormat, RunConfig};
use skeleton_spectra::eigensolve::eigvalsh;
use skeleton_spectra::kernels::{Angle, SectorLabel};
use skeleton_spectra::quadrature::QuadratureRule;
use skeleton_spectra::scissor::{
    critical_angle, default_critical_bracket, reconstruct_state, sweep,
};
use skeleton_spectra::skeleton::{
    bound_states, build_general, build_hamiltonian_sector, zero_crossings, ESSENTIAL_EDGE,
};
use skeleton_spectra::{verify, Error, Result};

/// Bound states of crossing leaky wires via the skeleton method.
#[derive(Parser)]
#[command(name = "skeleton", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the oracle suite; exit 1 if any check fails.
    Verify,
    /// Top eigenvalues of each sector operator at --theta.
    Spectrum,
    /// Bound states over a θ grid.
    Sweep,
    /// Angle where the second (+,-) state appears.
    CriticalAngle,
    /// Zero crossings of the three-wire skeleton over --k-range.
    General,
    /// Ground state of one sector on a planar grid.
    Reconstruct,
}

/// Flags override values read from --config.
#[derive(Args)]
struct Opts {
    /// Quadrature nodes per half-line.
    #[arg(long, global = true)]
    n_nodes: Option<String>,
    #[arg(long, global = true)]
    map_scale: Option<String>,
    /// Gap above 2^(-1/2) required of a bound state.
    #[arg(long, global = true)]
    margin: Option<String>,
    /// Radians or multiples of pi, e.g. 2pi/3.
    #[arg(long, global = true)]
    theta: Option<String>,
    /// a:b:steps
    #[arg(long, global = true)]
    theta_range: Option<String>,
    /// a,b with a, b in {+1,-1}; several separated by ';'.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sector: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// theta12,theta13,theta23 of the three-wire star.
    #[arg(long, global = true)]
    angles: Option<String>,
    /// a:b:steps in k.
    #[arg(long, global = true)]
    k_range: Option<String>,
    /// half_width:points of a square grid.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
                e => e,
            })?,
            None => RunConfig::default(),
        };
        let flags = [
            ("n_nodes", &self.n_nodes),
            ("map_scale", &self.map_scale),
            ("margin", &self.margin),
            ("theta", &self.theta),
            ("theta_range", &self.theta_range),
            ("sector", &self.sector),
            ("lambda", &self.lambda),
            ("angles", &self.angles),
            ("k_range", &self.k_range),
            ("grid", &self.grid),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(cfg: &RunConfig, value: &serde_json::Value) -> Result<()> {
    emit(cfg, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn half_rule(cfg: &RunConfig) -> Result<QuadratureRule> {
    QuadratureRule::half_line(cfg.n_nodes, cfg.map_scale)
}

fn required_theta(cfg: &RunConfig, cmd: &str) -> Result<f64> {
    cfg.theta
        .ok_or_else(|| Error::Config(format!("{cmd} needs --theta")))
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool> {
    let report = verify::run(cfg.n_nodes, cfg.map_scale)?;
    match cfg.format {
        OutputFormat::Csv => emit(cfg, &report.to_table())?,
        OutputFormat::Json => emit_json(cfg, &serde_json::to_value(&report)?)?,
    }
    for c in report.failures() {
        eprintln!(
            "FAIL {}: measured {} expected {} (tol {})",
            c.name, c.measured, c.expected, c.tol
        );
    }
    Ok(report.passed())
}

const SPECTRUM_TOP: usize = 8;

fn cmd_spectrum(cfg: &RunConfig) -> Result<()> {
    let theta = required_theta(cfg, "spectrum")?;
    let rule = half_rule(cfg)?;
    let angle = Angle::crossing(theta)?;
    let mut rows = Vec::new();
    for &sector in &cfg.sectors {
        let op = build_hamiltonian_sector(angle, sector, &rule)?;
        let values = eigvalsh(&op.op.matrix)?;
        for (index, &v) in values.iter().rev().take(SPECTRUM_TOP).enumerate() {
            rows.push((sector, index, v));
        }
    }
    match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("theta_rad,alpha,beta,index,eigenvalue,above_edge\n");
            for (sector, index, v) in &rows {
                s.push_str(&format!(
                    "{theta:.7},{},{},{index},{v:.10},{}\n",
                    sector.alpha,
                    sector.beta,
                    *v > ESSENTIAL_EDGE + cfg.margin
                ));
            }
            emit(cfg, &s)
        }
        OutputFormat::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(sector, index, v)| {
                    json!({
                        "theta_rad": theta,
                        "alpha": sector.alpha.value() as i32,
                        "beta": sector.beta.value() as i32,
                        "index": index,
                        "eigenvalue": v,
                        "above_edge": *v > ESSENTIAL_EDGE + cfg.margin,
                    })
                })
                .collect();
            emit_json(cfg, &json!(rows))
        }
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let table = sweep(&cfg.thetas()?, &cfg.sectors, &half_rule(cfg)?, cfg.margin)?;
    match cfg.format {
        OutputFormat::Csv => emit(cfg, &table.to_csv()),
        OutputFormat::Json => emit_json(cfg, &table.to_json()),
    }
}

fn cmd_critical_angle(cfg: &RunConfig) -> Result<()> {
    let bracket = cfg
        .theta_range
        .map_or_else(default_critical_bracket, |r| (r.start, r.end));
    let c = critical_angle(&half_rule(cfg)?, bracket)?;
    let deviation = (c.theta_c - 2.0 * std::f64::consts::PI / 3.0).abs();
    match cfg.format {
        OutputFormat::Csv => emit(
            cfg,
            &format!("theta_c,deviation\n{:.10},{:.3e}\n", c.theta_c, deviation),
        ),
        OutputFormat::Json => emit_json(
            cfg,
            &json!({ "theta_c": c.theta_c, "deviation": deviation }),
        ),
    }
}

fn cmd_general(cfg: &RunConfig) -> Result<()> {
    let angles = cfg.wire_angles()?;
    let rule = QuadratureRule::full_line((cfg.n_nodes / 2).max(8), cfg.map_scale)?;
    let r = cfg.k_range;
    let z = zero_crossings(angles, cfg.lambda, &rule, (r.start, r.end), r.steps.max(2))?;
    let probe = build_general(
        skeleton_spectra::kernels::EnergyParameter::new(r.start)?,
        angles,
        cfg.lambda,
        &rule,
    )?;
    if probe.outside_proof_range() {
        eprintln!(
            "note: lambda = {} < 0, where a zero crossing is not guaranteed to be a bound state",
            cfg.lambda
        );
    }
    for (a, b) in &z.unresolved {
        eprintln!("warning: branch tracking unresolved on k in [{a:.6}, {b:.6}]");
    }
    match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("k,energy,multiplicity,mu\n");
            for c in &z.crossings {
                s.push_str(&format!(
                    "{:.8},{:.6},{},{:.2e}\n",
                    c.k, c.energy, c.multiplicity, c.mu
                ));
            }
            emit(cfg, &s)
        }
        OutputFormat::Json => emit_json(cfg, &serde_json::to_value(&z)?),
    }
}

fn cmd_reconstruct(cfg: &RunConfig) -> Result<()> {
    let theta = cfg.theta.unwrap_or(FRAC_PI_2);
    let sector = match cfg.sectors[..] {
        [one] => one,
        _ if cfg.sectors == SectorLabel::ALL => SectorLabel::ALL[0],
        _ => return Err(Error::Config("reconstruct takes a single --sector".into())),
    };
    let rule = half_rule(cfg)?;
    let angle = Angle::crossing(theta)?;
    let op = build_hamiltonian_sector(angle, sector, &rule)?;
    let state = bound_states(&op, cfg.margin)?
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::Numerical(format!("no bound state in sector {sector} at θ = {theta}"))
        })?;
    let grid = reconstruct_state(angle, sector, &state, &rule, &cfg.grid)?;
    let fmt = |d: Option<f64>| d.map_or("n/a".to_string(), |v| format!("{v:.2e}"));
    eprintln!(
        "k = {:.8}, E = {:.8}; parity defects: x -> -x {}, y -> -y {}",
        state.level.k,
        state.level.energy(),
        fmt(grid.x_parity_defect()),
        fmt(grid.y_parity_defect())
    );
    match cfg.format {
        OutputFormat::Csv => emit(cfg, &grid.to_csv()),
        OutputFormat::Json => emit_json(cfg, &serde_json::to_value(&grid)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.opts.resolve().and_then(|cfg| match cli.cmd {
        Cmd::Verify => cmd_verify(&cfg),
        Cmd::Spectrum => cmd_spectrum(&cfg).map(|_| true),
        Cmd::Sweep => cmd_sweep(&cfg).map(|_| true),
        Cmd::CriticalAngle => cmd_critical_angle(&cfg).map(|_| true),
        Cmd::General => cmd_general(&cfg).map(|_| true),
        Cmd::Reconstruct => cmd_reconstruct(&cfg).map(|_| true),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
