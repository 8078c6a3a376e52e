//! Manufactured solution presets
//!
//! Each case fixes an exact solution, coefficients, and the forcing data that
//! make the exact solution satisfy the chosen formulation on the unit
//! interval or unit square. Used by the convergence studies and the CLI.

use crate::assembly::CoefficientSet;
use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::system::{BoundaryData, BulkData, Formulation};
use std::f64::consts::PI;
use std::sync::Arc;

/// Exact bulk field (x, t).
pub type ExactFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

pub struct ManufacturedCase {
    pub name: &'static str,
    pub formulation: Formulation,
    pub dim: usize,
    pub coeffs: CoefficientSet,
    /// Exact bulk solution u(x, t); its trace is the exact boundary state.
    pub u_exact: ExactFn,
    /// Exact conormal flux kappa du/dn (x, n, t).
    pub flux_exact: BoundaryData,
    pub f: BulkData,
    pub g: BoundaryData,
}

pub const PRESET_NAMES: [&str; 4] = [
    "dirichlet_1d_poly",
    "wentzell_1d_trig",
    "wentzell_2d_cos",
    "nonlocal_2d_cos",
];

impl ManufacturedCase {
    pub fn initial_u(&self) -> BulkData {
        let u = self.u_exact.clone();
        Arc::new(move |x, _| u(x, 0.0))
    }
}

pub fn make_manufactured_case(name: &str) -> Result<ManufacturedCase> {
    match name {
        // u = e^-t (x^2 + 1) on (0, 1) with prescribed boundary values
        "dirichlet_1d_poly" => Ok(ManufacturedCase {
            name: "dirichlet_1d_poly",
            formulation: Formulation::DirichletPdae,
            dim: 1,
            coeffs: CoefficientSet::constant(1.0, 0.0, 0.0)?,
            u_exact: Arc::new(|x, t| (-t).exp() * (x[0] * x[0] + 1.0)),
            flux_exact: Arc::new(|x, n, t| (-t).exp() * 2.0 * x[0] * n[0]),
            f: Arc::new(|x, t| -(-t).exp() * (x[0] * x[0] + 3.0)),
            // Dirichlet data: the boundary values themselves
            g: Arc::new(|x, _, t| (-t).exp() * (x[0] * x[0] + 1.0)),
        }),
        // u = e^-t sin(pi x + pi/4); the boundary state satisfies
        // p' + alpha p = 0, so the boundary data reduces to the flux
        "wentzell_1d_trig" => Ok(ManufacturedCase {
            name: "wentzell_1d_trig",
            formulation: Formulation::Wentzell,
            dim: 1,
            coeffs: CoefficientSet::constant(1.0, 1.0, 0.0)?,
            u_exact: Arc::new(|x, t| (-t).exp() * (PI * x[0] + PI / 4.0).sin()),
            flux_exact: Arc::new(|x, n, t| (-t).exp() * PI * (PI * x[0] + PI / 4.0).cos() * n[0]),
            f: Arc::new(|x, t| (PI * PI - 1.0) * (-t).exp() * (PI * x[0] + PI / 4.0).sin()),
            g: Arc::new(|x, n, t| (-t).exp() * PI * (PI * x[0] + PI / 4.0).cos() * n[0]),
        }),
        // u = e^-t cos(pi x) cos(pi y): the normal derivative vanishes on
        // the whole square boundary, and p' + alpha p = 0, so g = 0
        "wentzell_2d_cos" => Ok(ManufacturedCase {
            name: "wentzell_2d_cos",
            formulation: Formulation::Wentzell,
            dim: 2,
            coeffs: CoefficientSet::constant(1.0, 1.0, 0.0)?,
            u_exact: Arc::new(cos_cos),
            flux_exact: Arc::new(cos_cos_flux),
            f: Arc::new(|x, t| (2.0 * PI * PI - 1.0) * cos_cos(x, t)),
            g: Arc::new(|_, _, _| 0.0),
        }),
        // same bulk field with surface diffusion: along every edge the
        // trace is a product of a constant and a cosine, so the surface
        // Laplacian is -pi^2 times the trace and
        // g = (-1 + beta pi^2 + alpha) u|_Gamma = pi^2 u|_Gamma
        "nonlocal_2d_cos" => Ok(ManufacturedCase {
            name: "nonlocal_2d_cos",
            formulation: Formulation::Nonlocal,
            dim: 2,
            coeffs: CoefficientSet::constant(1.0, 1.0, 1.0)?,
            u_exact: Arc::new(cos_cos),
            flux_exact: Arc::new(cos_cos_flux),
            f: Arc::new(|x, t| (2.0 * PI * PI - 1.0) * cos_cos(x, t)),
            g: Arc::new(|x, _, t| PI * PI * cos_cos(x, t)),
        }),
        other => Err(Error::UnknownPreset(format!(
            "{other} (available: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn cos_cos(x: Point, t: f64) -> f64 {
    (-t).exp() * (PI * x[0]).cos() * (PI * x[1]).cos()
}

fn cos_cos_flux(x: Point, n: Point, t: f64) -> f64 {
    let ux = -(-t).exp() * PI * (PI * x[0]).sin() * (PI * x[1]).cos();
    let uy = -(-t).exp() * PI * (PI * x[0]).cos() * (PI * x[1]).sin();
    ux * n[0] + uy * n[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = 1e-4;

    fn dt(u: &ExactFn, x: Point, t: f64) -> f64 {
        (u(x, t + H) - u(x, t - H)) / (2.0 * H)
    }

    fn laplace(u: &ExactFn, x: Point, t: f64, dim: usize) -> f64 {
        let mut out = 0.0;
        for d in 0..dim {
            let mut xp = x;
            let mut xm = x;
            xp[d] += H;
            xm[d] -= H;
            out += (u(xp, t) - 2.0 * u(x, t) + u(xm, t)) / (H * H);
        }
        out
    }

    fn grad_dot(u: &ExactFn, x: Point, n: Point, t: f64, dim: usize) -> f64 {
        let mut out = 0.0;
        for d in 0..dim {
            let mut xp = x;
            let mut xm = x;
            xp[d] += H;
            xm[d] -= H;
            out += (u(xp, t) - u(xm, t)) / (2.0 * H) * n[d];
        }
        out
    }

    fn interior_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
        // keep away from the boundary so FD stencils stay inside
        let mut x = [0.0, 0.0];
        for d in 0..dim {
            x[d] = rng.gen_range(0.05..0.95);
        }
        x
    }

    #[test]
    fn bulk_residual_vanishes_by_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for name in PRESET_NAMES {
            let case = make_manufactured_case(name).unwrap();
            for _ in 0..20 {
                let x = interior_point(&mut rng, case.dim);
                let t = rng.gen_range(0.1..1.0);
                let resid = dt(&case.u_exact, x, t) - laplace(&case.u_exact, x, t, case.dim)
                    - (case.f)(x, t);
                assert!(resid.abs() < 1e-5, "{name} at {x:?}, t = {t}: {resid:.3e}");
            }
        }
    }

    #[test]
    fn flux_matches_finite_difference_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in PRESET_NAMES {
            let case = make_manufactured_case(name).unwrap();
            for _ in 0..20 {
                let x = interior_point(&mut rng, case.dim);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let n = if case.dim == 1 {
                    [1.0, 0.0]
                } else {
                    [phi.cos(), phi.sin()]
                };
                let fd = grad_dot(&case.u_exact, x, n, 0.3, case.dim);
                let resid = (case.flux_exact)(x, n, 0.3) - fd;
                assert!(resid.abs() < 1e-6, "{name}: {resid:.3e}");
            }
        }
    }

    #[test]
    fn boundary_residual_vanishes_for_coupled_cases() {
        // p' - beta Lap_Gamma p + du/dn + alpha p - g = 0 along each edge,
        // all by finite differences on the exact solution
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in ["wentzell_1d_trig", "wentzell_2d_cos", "nonlocal_2d_cos"] {
            let case = make_manufactured_case(name).unwrap();
            let alpha = 1.0;
            for _ in 0..20 {
                let t = rng.gen_range(0.1..1.0);
                let (x, n, lap_gamma) = if case.dim == 1 {
                    let (x, n) = if rng.gen_bool(0.5) {
                        ([0.0, 0.0], [-1.0, 0.0])
                    } else {
                        ([1.0, 0.0], [1.0, 0.0])
                    };
                    (x, n, 0.0)
                } else {
                    // pick an edge; the tangential direction is 1 - |n| axis
                    let s = rng.gen_range(0.05..0.95);
                    let (x, n, tang) = match rng.gen_range(0..4) {
                        0 => ([s, 0.0], [0.0, -1.0], 0usize),
                        1 => ([1.0, s], [1.0, 0.0], 1),
                        2 => ([s, 1.0], [0.0, 1.0], 0),
                        _ => ([0.0, s], [-1.0, 0.0], 1),
                    };
                    let mut xp = x;
                    let mut xm = x;
                    xp[tang] += H;
                    xm[tang] -= H;
                    let lap = ((case.u_exact)(xp, t) - 2.0 * (case.u_exact)(x, t)
                        + (case.u_exact)(xm, t))
                        / (H * H);
                    (x, n, lap)
                };
                let p_dot = dt(&case.u_exact, x, t);
                let flux = (case.flux_exact)(x, n, t);
                let p = (case.u_exact)(x, t);
                let resid = p_dot - case.coeffs.beta * lap_gamma + flux + alpha * p
                    - (case.g)(x, n, t);
                assert!(resid.abs() < 1e-5, "{name} at {x:?}: {resid:.3e}");
            }
        }
    }

    #[test]
    fn dirichlet_data_is_the_trace() {
        let case = make_manufactured_case("dirichlet_1d_poly").unwrap();
        for (x, n) in [([0.0, 0.0], [-1.0, 0.0]), ([1.0, 0.0], [1.0, 0.0])] {
            let t = 0.4;
            assert!(((case.g)(x, n, t) - (case.u_exact)(x, t)).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(matches!(
            make_manufactured_case("nope"),
            Err(Error::UnknownPreset(_))
        ));
    }
}
