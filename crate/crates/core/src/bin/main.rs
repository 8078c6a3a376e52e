//! Config-driven command line runner.
//!
//! Exit codes: 0 success, 1 internal/runtime failure, 2 config error.
//! Failures also emit a machine-readable JSON object on stderr.

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use pdae_fem::config::{load_config, preset_catalog, Geometry, MultiplierMesh, RunConfig};
use pdae_fem::error::Error;
use pdae_fem::mesh::{
    build_independent_boundary_mesh, build_interval_mesh, build_square_mesh,
    extract_boundary_mesh, BoundaryMesh, BulkMesh,
};
use pdae_fem::mms::make_manufactured_case;
use pdae_fem::report::{
    write_infsup_csv, write_json, write_spatial_eoc_csv, write_spatial_study_csv,
    write_trajectory_csv, write_trajectory_json, RunManifest,
};
use pdae_fem::system::{
    build_dirichlet_pdae, build_homogeneous_dirichlet, build_nonlocal_pdae, build_wentzell_pdae,
    consistent_init, zero_boundary_data, zero_bulk_data, Formulation, PdaeSystem,
};
use pdae_fem::timestep::{integrate, StepperConfig};
use pdae_fem::verify::{estimate_discrete_infsup, run_spatial_study};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pdae-fem",
    about = "Finite-element solver for parabolic problems with dynamic boundary conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configured problem and write the trajectory
    Solve { config: PathBuf },
    /// Mesh refinement study with EOC tables (requires a manufactured preset)
    Study { config: PathBuf },
    /// Discrete inf-sup estimate across refinement levels
    Infsup { config: PathBuf },
    /// Print the catalog of manufactured presets and geometries
    ListPresets,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Config { .. } => "config",
        Error::InvalidMesh(_) => "invalid_mesh",
        Error::InvalidCoefficient(_) => "invalid_coefficient",
        Error::Incompatible(_) => "incompatible",
        Error::RankDeficientConstraint(_) => "rank_deficient_constraint",
        Error::SingularVBlock(_) => "singular_v_block",
        Error::VBlockIndefinite(_) => "v_block_indefinite",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::NoConvergence(_) => "no_convergence",
        Error::UnknownPreset(_) => "unknown_preset",
        Error::StepFailed { .. } => "step_failed",
        Error::Io(_) => "io",
        Error::Serialize(_) => "serialize",
    }
}

fn report_error(e: &Error) -> ExitCode {
    let mut obj = serde_json::json!({
        "error": {
            "kind": error_kind(e),
            "message": e.to_string(),
        }
    });
    if let Error::Config { field, .. } = e {
        obj["error"]["field"] = serde_json::Value::String(field.clone());
    }
    eprintln!("{obj}");
    if matches!(e, Error::Config { .. }) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn build_bulk_mesh(geometry: &Geometry) -> Result<BulkMesh, Error> {
    match geometry {
        Geometry::Interval { n } => build_interval_mesh(*n, 0.0, 1.0),
        Geometry::Square { n } => build_square_mesh(*n),
    }
}

fn build_multiplier_mesh(
    cfg: &RunConfig,
    mesh: &BulkMesh,
    n_override: Option<usize>,
) -> Result<Option<BoundaryMesh>, Error> {
    match cfg.multiplier_mesh {
        MultiplierMesh::Matching => Ok(None),
        MultiplierMesh::Independent { m, offset } => {
            let bmesh = extract_boundary_mesh(mesh)?;
            // refinement studies scale the multiplier mesh with the bulk mesh
            let m_eff = match n_override {
                Some(n) => {
                    ((m as f64 / cfg.geometry.n() as f64) * n as f64).round().max(2.0) as usize
                }
                None => m,
            };
            Ok(Some(build_independent_boundary_mesh(
                &bmesh.curve,
                m_eff,
                offset,
            )?))
        }
    }
}

fn build_system(cfg: &RunConfig, mesh: &BulkMesh, mult: Option<&BoundaryMesh>) -> Result<PdaeSystem, Error> {
    let coeffs = cfg.coefficients.build()?;
    let (f, g) = if cfg.data == "zero" {
        (zero_bulk_data(), zero_boundary_data())
    } else {
        let case = make_manufactured_case(&cfg.data)?;
        (case.f.clone(), case.g.clone())
    };
    match cfg.formulation {
        Formulation::HomogeneousDirichlet => build_homogeneous_dirichlet(mesh, &coeffs, f),
        Formulation::DirichletPdae => build_dirichlet_pdae(mesh, &coeffs, f, g),
        Formulation::Wentzell => build_wentzell_pdae(mesh, mult, &coeffs, f, g),
        Formulation::Nonlocal => build_nonlocal_pdae(mesh, mult, &coeffs, f, g),
    }
}

fn manifest_for(cfg: &RunConfig, command: &str, config_text: &str) -> Result<RunManifest, Error> {
    Ok(RunManifest::new(
        command,
        config_text,
        serde_json::to_value(cfg)?,
    ))
}

fn run_solve(cfg: &RunConfig, config_text: &str) -> Result<(), Error> {
    let mesh = build_bulk_mesh(&cfg.geometry)?;
    let mult = build_multiplier_mesh(cfg, &mesh, None)?;
    let sys = build_system(cfg, &mesh, mult.as_ref())?;
    let u0 = if cfg.data == "zero" {
        DVector::zeros(sys.n_u)
    } else {
        let case = make_manufactured_case(&cfg.data)?;
        let u_exact = case.u_exact.clone();
        DVector::from_fn(sys.n_u, |i, _| u_exact(mesh.nodes[i], 0.0))
    };
    let init = consistent_init(&sys, &u0, None)?;
    let stepper = StepperConfig {
        scheme: cfg.scheme,
        tau: cfg.tau,
        t_start: 0.0,
        t_end: cfg.t_end,
    };
    let traj = integrate(&sys, &init.x0, &stepper)?;
    let dir = cfg.output_dir();
    let mut manifest = manifest_for(cfg, "solve", config_text)?;
    let mut written: Vec<PathBuf> = Vec::new();
    if cfg.wants_format("csv") {
        let p = dir.join("trajectory.csv");
        write_trajectory_csv(&p, &sys, &traj)?;
        written.push(p);
    }
    if cfg.wants_format("json") {
        let p = dir.join("trajectory.json");
        write_trajectory_json(&p, &traj)?;
        written.push(p);
        let p = dir.join("system.json");
        write_json(&p, &sys.summary(Some(init.consistency_residual)))?;
        written.push(p);
    }
    for p in &written {
        manifest.record(&dir, p)?;
    }
    manifest.write(&dir.join("manifest.json"))?;
    println!(
        "solve: {} steps, final energy {:.6e}, max constraint residual {:.3e}",
        traj.times.len() - 1,
        traj.diagnostics.last().map(|d| d.energy).unwrap_or(0.0),
        traj.max_constraint_residual()
    );
    Ok(())
}

fn study_levels(cfg: &RunConfig) -> Vec<usize> {
    if cfg.study_levels.is_empty() {
        vec![4, 8, 16, 32]
    } else {
        cfg.study_levels.clone()
    }
}

fn run_study(cfg: &RunConfig, config_text: &str) -> Result<(), Error> {
    if cfg.data == "zero" {
        return Err(Error::Config {
            field: "data".into(),
            message: "study mode needs a manufactured preset to measure errors against".into(),
        });
    }
    let levels = study_levels(cfg);
    let study = run_spatial_study(&cfg.data, &levels, cfg.scheme, cfg.t_end)?;
    if !study.monotone {
        eprintln!("warning: error sequence is not monotone across levels");
    }
    let dir = cfg.output_dir();
    let mut manifest = manifest_for(cfg, "study", config_text)?;
    let mut written: Vec<PathBuf> = Vec::new();
    if cfg.wants_format("csv") {
        let p = dir.join("study.csv");
        write_spatial_study_csv(&p, &study)?;
        written.push(p);
        let p = dir.join("eoc.csv");
        write_spatial_eoc_csv(&p, &study)?;
        written.push(p);
    }
    if cfg.wants_format("json") {
        let p = dir.join("study.json");
        write_json(&p, &study)?;
        written.push(p);
    }
    for p in &written {
        manifest.record(&dir, p)?;
    }
    manifest.write(&dir.join("manifest.json"))?;
    for (k, e) in study.eoc_u.iter().enumerate() {
        println!(
            "study: n {} -> {}: eoc_u = {e:.3}{}",
            study.levels[k].n,
            study.levels[k + 1].n,
            study
                .eoc_p
                .get(k)
                .map(|p| format!(", eoc_p = {p:.3}"))
                .unwrap_or_default()
        );
    }
    Ok(())
}

fn run_infsup(cfg: &RunConfig, config_text: &str) -> Result<(), Error> {
    if !matches!(
        cfg.formulation,
        Formulation::Wentzell | Formulation::Nonlocal
    ) {
        return Err(Error::Config {
            field: "formulation".into(),
            message: "inf-sup estimation applies to the coupled formulations".into(),
        });
    }
    let levels = if cfg.study_levels.is_empty() {
        vec![cfg.geometry.n()]
    } else {
        cfg.study_levels.clone()
    };
    let mut rows = Vec::new();
    for &n in &levels {
        let geometry = match cfg.geometry {
            Geometry::Interval { .. } => Geometry::Interval { n },
            Geometry::Square { .. } => Geometry::Square { n },
        };
        let mesh = build_bulk_mesh(&geometry)?;
        let mult = build_multiplier_mesh(cfg, &mesh, Some(n))?;
        let est = estimate_discrete_infsup(&mesh, mult.as_ref(), cfg.formulation)?;
        println!("infsup: n = {n}, beta = {:.6e}, clamped = {}", est.beta, est.clamped);
        rows.push((n, est));
    }
    let dir = cfg.output_dir();
    let mut manifest = manifest_for(cfg, "infsup", config_text)?;
    let mut written: Vec<PathBuf> = Vec::new();
    if cfg.wants_format("csv") {
        let p = dir.join("infsup.csv");
        write_infsup_csv(&p, &rows)?;
        written.push(p);
    }
    if cfg.wants_format("json") {
        let p = dir.join("infsup.json");
        let json_rows: Vec<_> = rows
            .iter()
            .map(|(n, est)| serde_json::json!({ "n": n, "estimate": est }))
            .collect();
        write_json(&p, &json_rows)?;
        written.push(p);
    }
    for p in &written {
        manifest.record(&dir, p)?;
    }
    manifest.write(&dir.join("manifest.json"))?;
    Ok(())
}

fn dispatch(path: &Path, run: impl Fn(&RunConfig, &str) -> Result<(), Error>) -> ExitCode {
    let (cfg, text) = match load_config(path) {
        Ok(v) => v,
        Err(e) => return report_error(&e),
    };
    match run(&cfg, &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { config } => dispatch(&config, run_solve),
        Command::Study { config } => dispatch(&config, run_study),
        Command::Infsup { config } => dispatch(&config, run_infsup),
        Command::ListPresets => {
            print!("{}", preset_catalog());
            ExitCode::SUCCESS
        }
    }
}
