//! Artifact writers: trajectory and study tables as CSV and JSON, plus the
//! run manifest. Floats are printed with 17 significant digits so repeated
//! runs can be compared byte for byte.

use crate::error::Result;
use crate::system::PdaeSystem;
use crate::timestep::Trajectory;
use crate::verify::{FluxComparison, InfSupEstimate, SpatialStudy, TemporalStudy};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest-but-exact decimal: 17 significant digits round-trip f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Trajectory CSV: time, energy, constraint residual, and probe values
/// (first and last bulk entries, first boundary and multiplier entries
/// when present).
pub fn write_trajectory_csv(path: &Path, sys: &PdaeSystem, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("time,energy,constraint_residual,u_first,u_last");
    if sys.n_p > 0 {
        out.push_str(",p_first");
    }
    if sys.n_lambda > 0 {
        out.push_str(",lambda_first");
    }
    out.push('\n');
    for (k, t) in traj.times.iter().enumerate() {
        let x = &traj.states[k];
        let d = &traj.diagnostics[k];
        out.push_str(&fmt_f64(*t));
        out.push(',');
        out.push_str(&fmt_f64(d.energy));
        out.push(',');
        out.push_str(&fmt_f64(d.constraint_residual));
        out.push(',');
        out.push_str(&fmt_f64(x[0]));
        out.push(',');
        out.push_str(&fmt_f64(x[sys.n_u - 1]));
        if sys.n_p > 0 {
            out.push(',');
            out.push_str(&fmt_f64(x[sys.n_u]));
        }
        if sys.n_lambda > 0 {
            out.push(',');
            let l = traj.multipliers[k]
                .as_ref()
                .map(|l| l[0])
                .unwrap_or(f64::NAN);
            out.push_str(&fmt_f64(l));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

#[derive(Serialize)]
struct TrajectoryDump<'a> {
    times: &'a [f64],
    states: Vec<&'a [f64]>,
    multipliers: Vec<Option<&'a [f64]>>,
    energy: Vec<f64>,
    constraint_residual: Vec<f64>,
}

/// Full-state JSON dump of the trajectory.
pub fn write_trajectory_json(path: &Path, traj: &Trajectory) -> Result<()> {
    let dump = TrajectoryDump {
        times: &traj.times,
        states: traj.states.iter().map(|s| s.as_slice()).collect(),
        multipliers: traj
            .multipliers
            .iter()
            .map(|m| m.as_ref().map(|v| v.as_slice()))
            .collect(),
        energy: traj.diagnostics.iter().map(|d| d.energy).collect(),
        constraint_residual: traj
            .diagnostics
            .iter()
            .map(|d| d.constraint_residual)
            .collect(),
    };
    write_file(path, &serde_json::to_string_pretty(&dump)?)
}

/// Level table of a mesh refinement study.
pub fn write_spatial_study_csv(path: &Path, study: &SpatialStudy) -> Result<()> {
    let with_p = study.levels.iter().all(|l| l.err_p.is_some());
    let mut out = String::from("n,h,tau,err_u");
    if with_p {
        out.push_str(",err_p");
    }
    out.push_str(",max_constraint_residual\n");
    for l in &study.levels {
        out.push_str(&format!("{},{},{}", l.n, fmt_f64(l.h), fmt_f64(l.tau)));
        out.push(',');
        out.push_str(&fmt_f64(l.err_u));
        if let Some(p) = l.err_p {
            out.push(',');
            out.push_str(&fmt_f64(p));
        }
        out.push(',');
        out.push_str(&fmt_f64(l.max_constraint_residual));
        out.push('\n');
    }
    write_file(path, &out)
}

/// One row per refinement step: the observed orders between two levels.
pub fn write_spatial_eoc_csv(path: &Path, study: &SpatialStudy) -> Result<()> {
    let with_p = !study.eoc_p.is_empty();
    let mut out = String::from("n_coarse,n_fine,eoc_u");
    if with_p {
        out.push_str(",eoc_p");
    }
    out.push('\n');
    for (k, e) in study.eoc_u.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}",
            study.levels[k].n,
            study.levels[k + 1].n,
            fmt_f64(*e)
        ));
        if with_p {
            out.push(',');
            out.push_str(&fmt_f64(study.eoc_p[k]));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_temporal_study_csv(path: &Path, study: &TemporalStudy) -> Result<()> {
    let mut out = String::from("tau,error\n");
    for (tau, err) in study.taus.iter().zip(&study.errors) {
        out.push_str(&fmt_f64(*tau));
        out.push(',');
        out.push_str(&fmt_f64(*err));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn write_infsup_csv(path: &Path, rows: &[(usize, InfSupEstimate)]) -> Result<()> {
    let mut out = String::from("n,beta,eig_min,eig_max,clamped\n");
    for (n, est) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            n,
            fmt_f64(est.beta),
            fmt_f64(est.eig_min),
            fmt_f64(est.eig_max),
            est.clamped
        ));
    }
    write_file(path, &out)
}

pub fn write_flux_comparison_csv(path: &Path, cmp: &FluxComparison) -> Result<()> {
    let mut out = String::from("n,error\n");
    for (n, err) in cmp.ns.iter().zip(&cmp.errors) {
        out.push_str(&format!("{},{}\n", n, fmt_f64(*err)));
    }
    write_file(path, &out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, &serde_json::to_string_pretty(value)?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

#[derive(Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Run manifest: what was run, with which configuration, and content hashes
/// of everything written.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub outputs: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(command: &str, config_text: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            config,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, dir: &Path, path: &PathBuf) -> Result<()> {
        let bytes = fs::read(path)?;
        let rel = path
            .strip_prefix(dir)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        self.outputs.push(ManifestEntry {
            file: rel,
            sha256: sha256_hex(&bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::CoefficientSet;
    use crate::mesh::build_interval_mesh;
    use crate::system::{build_wentzell_pdae, consistent_init, zero_boundary_data, zero_bulk_data};
    use crate::timestep::{integrate, Scheme, StepperConfig};
    use nalgebra::DVector;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn trajectory_csv_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = build_interval_mesh(4, 0.0, 1.0).unwrap();
        let coeffs = CoefficientSet::constant(1.0, 1.0, 0.0).unwrap();
        let sys =
            build_wentzell_pdae(&mesh, None, &coeffs, zero_bulk_data(), zero_boundary_data())
                .unwrap();
        let u0 = DVector::from_fn(sys.n_u, |i, _| (i as f64).sin());
        let init = consistent_init(&sys, &u0, None).unwrap();
        let cfg = StepperConfig {
            scheme: Scheme::ImplicitEuler,
            tau: 0.1,
            t_start: 0.0,
            t_end: 0.5,
        };
        let run = || {
            let traj = integrate(&sys, &init.x0, &cfg).unwrap();
            let p = dir.path().join("traj.csv");
            write_trajectory_csv(&p, &sys, &traj).unwrap();
            fs::read(&p).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("time,energy,constraint_residual,"));
        assert_eq!(text.lines().count(), 7); // header + 6 grid points
    }

    #[test]
    fn manifest_hashes_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "a,b\n1,2\n").unwrap();
        let mut m = RunManifest::new("solve", "tau = 0.1", serde_json::json!({"tau": 0.1}));
        m.record(dir.path(), &p).unwrap();
        assert_eq!(m.outputs.len(), 1);
        assert_eq!(m.outputs[0].file, "x.csv");
        assert_eq!(m.outputs[0].bytes, 8);
        assert_eq!(m.outputs[0].sha256.len(), 64);
        let mp = dir.path().join("manifest.json");
        m.write(&mp).unwrap();
        let text = fs::read_to_string(&mp).unwrap();
        assert!(text.contains("config_sha256"));
    }
}
