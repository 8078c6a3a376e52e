//! Time integration of the block DAE systems
//!
//! Both schemes treat the constraint implicitly at the end of each step, so
//! the discrete solution satisfies `B x_n = constraint_data(t_n)` to solver
//! accuracy at every accepted step. Step matrices are factored once and
//! reused; the grid is uniform.

use crate::error::{Error, Result};
use crate::saddle::{DenseLu, SaddleOperator};
use crate::system::PdaeSystem;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ImplicitEuler,
    RadauIia2,
}

/// Radau IIA, two stages: c = (1/3, 1).
pub const RADAU_C: [f64; 2] = [1.0 / 3.0, 1.0];
pub const RADAU_A: [[f64; 2]; 2] = [[5.0 / 12.0, -1.0 / 12.0], [3.0 / 4.0, 1.0 / 4.0]];
pub const RADAU_B: [f64; 2] = [3.0 / 4.0, 1.0 / 4.0];

/// Value of the linear stability function R(z) on the real axis.
pub fn stability_function(scheme: Scheme, z: f64) -> f64 {
    match scheme {
        Scheme::ImplicitEuler => 1.0 / (1.0 - z),
        Scheme::RadauIia2 => (1.0 + z / 3.0) / (1.0 - 2.0 * z / 3.0 + z * z / 6.0),
    }
}

/// Tableau invariants: quadrature order 3, stage order 2, stiff accuracy,
/// algebraic stability. Cheap 2x2 arithmetic, run once per integration.
fn radau_self_check() -> Result<()> {
    let (a, b, c) = (RADAU_A, RADAU_B, RADAU_C);
    let mut defect: f64 = (b[0] + b[1] - 1.0).abs();
    defect = defect.max((b[0] * c[0] + b[1] * c[1] - 0.5).abs());
    defect = defect.max((b[0] * c[0] * c[0] + b[1] * c[1] * c[1] - 1.0 / 3.0).abs());
    for i in 0..2 {
        defect = defect.max((a[i][0] + a[i][1] - c[i]).abs());
        defect = defect.max((a[i][0] * c[0] + a[i][1] * c[1] - 0.5 * c[i] * c[i]).abs());
    }
    defect = defect.max((a[1][0] - b[0]).abs() + (a[1][1] - b[1]).abs());
    // M = diag(b) A + A^T diag(b) - b b^T must be positive semidefinite
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = b[i] * a[i][j] + b[j] * a[j][i] - b[i] * b[j];
        }
    }
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if defect > 1e-14 || trace < -1e-14 || det < -1e-14 {
        return Err(Error::Incompatible(format!(
            "Radau tableau self-check failed (defect {defect:.3e}, trace {trace:.3e}, det {det:.3e})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub tau: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl StepperConfig {
    fn n_steps(&self) -> Result<usize> {
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::Config {
                field: "tau".into(),
                message: format!("step size must be positive and finite, got {}", self.tau),
            });
        }
        let span = self.t_end - self.t_start;
        if !span.is_finite() || span <= 0.0 {
            return Err(Error::Config {
                field: "t_end".into(),
                message: format!("t_end must exceed t_start, got span {span}"),
            });
        }
        let n = (span / self.tau).round();
        if n < 1.0 || (n * self.tau - span).abs() > 1e-8 * span {
            return Err(Error::Config {
                field: "tau".into(),
                message: format!(
                    "step size {} does not divide the interval length {span}",
                    self.tau
                ),
            });
        }
        Ok(n as usize)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepDiagnostics {
    pub constraint_residual: f64,
    pub energy: f64,
}

/// Discrete trajectory on the uniform grid, including the initial point.
/// `multipliers[0]` is `None`: the multiplier is only defined by the stepper.
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub multipliers: Vec<Option<DVector<f64>>>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub initial_constraint_residual: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_multiplier(&self) -> Option<&DVector<f64>> {
        self.multipliers.last().and_then(|m| m.as_ref())
    }

    /// Largest constraint residual over all stepped points (t > t_start).
    pub fn max_constraint_residual(&self) -> f64 {
        self.diagnostics
            .iter()
            .skip(1)
            .map(|d| d.constraint_residual)
            .fold(0.0, f64::max)
    }
}

/// Integrate the system from `x0`. The initial state is recorded as given;
/// its constraint defect is reported in `initial_constraint_residual` (use
/// [`crate::system::consistent_init`] to remove it beforehand).
pub fn integrate(sys: &PdaeSystem, x0: &DVector<f64>, cfg: &StepperConfig) -> Result<Trajectory> {
    if x0.len() != sys.n_x() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            sys.n_x()
        )));
    }
    let n_steps = cfg.n_steps()?;
    match cfg.scheme {
        Scheme::ImplicitEuler => integrate_euler(sys, x0, cfg, n_steps),
        Scheme::RadauIia2 => {
            radau_self_check()?;
            integrate_radau(sys, x0, cfg, n_steps)
        }
    }
}

fn new_trajectory(sys: &PdaeSystem, x0: &DVector<f64>, cfg: &StepperConfig, n_steps: usize) -> Trajectory {
    let r0 = sys.constraint_residual(x0, cfg.t_start);
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        states: Vec::with_capacity(n_steps + 1),
        multipliers: Vec::with_capacity(n_steps + 1),
        diagnostics: Vec::with_capacity(n_steps + 1),
        initial_constraint_residual: r0,
    };
    traj.times.push(cfg.t_start);
    traj.states.push(x0.clone());
    traj.multipliers.push(None);
    traj.diagnostics.push(StepDiagnostics {
        constraint_residual: r0,
        energy: sys.energy(x0),
    });
    traj
}

fn step_error(step: usize, time: f64) -> impl FnOnce(Error) -> Error {
    move |source| Error::StepFailed {
        step,
        time,
        source: Box::new(source),
    }
}

fn integrate_euler(
    sys: &PdaeSystem,
    x0: &DVector<f64>,
    cfg: &StepperConfig,
    n_steps: usize,
) -> Result<Trajectory> {
    let tau = cfg.tau;
    let v = sys.e.scale(1.0 / tau).add_scaled(&sys.a, 1.0)?;
    let op = SaddleOperator::new(v, sys.b.clone())?;
    let fact = op.factorize()?;
    let n_x = sys.n_x();
    let m = sys.n_lambda;
    let mut traj = new_trajectory(sys, x0, cfg, n_steps);
    let mut x = x0.clone();
    for step in 1..=n_steps {
        let t_next = cfg.t_start + step as f64 * tau;
        let mut rhs = DVector::zeros(n_x + m);
        rhs.rows_mut(0, n_x)
            .copy_from(&(sys.e.matvec(&x) / tau + sys.load(t_next)));
        if m > 0 {
            rhs.rows_mut(n_x, m).copy_from(&sys.constraint_data(t_next));
        }
        let sol = fact.solve(&rhs).map_err(step_error(step, t_next))?;
        x = sol.rows(0, n_x).into_owned();
        let lambda = (m > 0).then(|| sol.rows(n_x, m).into_owned());
        traj.times.push(t_next);
        traj.diagnostics.push(StepDiagnostics {
            constraint_residual: sys.constraint_residual(&x, t_next),
            energy: sys.energy(&x),
        });
        traj.states.push(x.clone());
        traj.multipliers.push(lambda);
    }
    Ok(traj)
}

fn integrate_radau(
    sys: &PdaeSystem,
    x0: &DVector<f64>,
    cfg: &StepperConfig,
    n_steps: usize,
) -> Result<Trajectory> {
    let tau = cfg.tau;
    let n_x = sys.n_x();
    let m = sys.n_lambda;
    let blk = n_x + m;
    let ed = sys.e.to_dense();
    let ad = sys.a.to_dense();
    let bd = sys.b.to_dense();
    // Coupled two-stage system in unknowns [X1; L1; X2; L2]:
    //   E X_i + tau sum_j a_ij (A X_j + B^T L_j) = E x_n + tau sum_j a_ij l_j
    //   B X_i = c(t_n + c_i tau)
    let mut s = DMatrix::zeros(2 * blk, 2 * blk);
    for i in 0..2 {
        let r = i * blk;
        for j in 0..2 {
            let col = j * blk;
            let mut block = &ad * (tau * RADAU_A[i][j]);
            if i == j {
                block += &ed;
            }
            s.view_mut((r, col), (n_x, n_x)).copy_from(&block);
            if m > 0 {
                s.view_mut((r, col + n_x), (n_x, m))
                    .copy_from(&(bd.transpose() * (tau * RADAU_A[i][j])));
            }
        }
        if m > 0 {
            s.view_mut((r + n_x, i * blk), (m, n_x)).copy_from(&bd);
        }
    }
    let lu = DenseLu::new(s, "Radau two-stage matrix")?;
    let mut traj = new_trajectory(sys, x0, cfg, n_steps);
    let mut x = x0.clone();
    for step in 1..=n_steps {
        let t_n = cfg.t_start + (step - 1) as f64 * tau;
        let t_next = cfg.t_start + step as f64 * tau;
        let loads = [sys.load(t_n + RADAU_C[0] * tau), sys.load(t_n + RADAU_C[1] * tau)];
        let ex = sys.e.matvec(&x);
        let mut rhs = DVector::zeros(2 * blk);
        for i in 0..2 {
            let r = i * blk;
            let mut top = ex.clone();
            for j in 0..2 {
                top += tau * RADAU_A[i][j] * &loads[j];
            }
            rhs.rows_mut(r, n_x).copy_from(&top);
            if m > 0 {
                rhs.rows_mut(r + n_x, m)
                    .copy_from(&sys.constraint_data(t_n + RADAU_C[i] * tau));
            }
        }
        let sol = lu.solve(&rhs).map_err(step_error(step, t_next))?;
        // stiffly accurate: the last stage is the step value
        x = sol.rows(blk, n_x).into_owned();
        let lambda = (m > 0).then(|| sol.rows(blk + n_x, m).into_owned());
        traj.times.push(t_next);
        traj.diagnostics.push(StepDiagnostics {
            constraint_residual: sys.constraint_residual(&x, t_next),
            energy: sys.energy(&x),
        });
        traj.states.push(x.clone());
        traj.multipliers.push(lambda);
    }
    Ok(traj)
}
