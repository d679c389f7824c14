//! Hastings-McLeod solution of Painlevé II, `q'' = x q + 2 q³`, together
//! with the tail integrals needed for the Tracy-Widom distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::airy_ai;
use crate::numerics::{integrate_ode_on_grid, OdeOptions};

/// Uniform output spacing of the solution grid.
pub const DEFAULT_GRID_STEP: f64 = 0.005;
pub const DEFAULT_X_START: f64 = 8.0;
pub const DEFAULT_X_END: f64 = -10.0;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Below this point `q` is taken from its left asymptotic series. Forward
/// integration of the separatrix amplifies rounding like
/// `exp((2√2/3)|x|^{3/2})` and cannot be trusted much past here in double
/// precision, while the five-term series is accurate to ~1e-8.
pub const SERIES_SWITCH_X: f64 = -6.5;

/// Largest allowed gap between the integrated `q` and the series at the
/// switch point before the solve is declared off-branch.
const SWITCH_MISMATCH: f64 = 1e-5;

const LEFT_SERIES: [f64; 5] = [
    1.0,
    1.0 / 8.0,
    -73.0 / 128.0,
    10657.0 / 1024.0,
    -13912277.0 / 32768.0,
];

/// Left asymptotic series `q(x) ~ √(−x/2) Σ c_k x^{−3k}` and its derivative.
pub fn hastings_mcleod_left(x: f64) -> (f64, f64) {
    let r = (-x / 2.0).sqrt();
    let mut s = 0.0;
    let mut ds = 0.0;
    for (k, c) in LEFT_SERIES.iter().enumerate() {
        let e = -3 * k as i32;
        s += c * x.powi(e);
        ds += c * e as f64 * x.powi(e - 1);
    }
    (r * s, -s / (4.0 * r) + r * ds)
}

/// Solution sampled on a uniform grid running downward from `x_start`.
///
/// * `g(x) = ∫_x^∞ q²`
/// * `f_int(x) = ∫_x^∞ (y − x) q²(y) dy`, so `F₂ = exp(−f_int)`
/// * `j(x) = ∫_x^∞ q`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PainleveSolution {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub qprime: Vec<f64>,
    pub g: Vec<f64>,
    pub f_int: Vec<f64>,
    pub j: Vec<f64>,
    pub tol: f64,
    pub grid_step: f64,
}

impl PainleveSolution {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the grid point nearest to `x`.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((self.grid[0] - x) / self.grid_step).round();
        (i.max(0.0) as usize).min(self.grid.len() - 1)
    }

    pub fn q_at(&self, x: f64) -> f64 {
        self.q[self.index_of(x)]
    }
}

/// Boundary data at `x` from the Airy tail: `q ≈ Ai`, and closed forms
/// `∫_x^∞ Ai² = Ai'² − x Ai²`, `∫_x^∞ (y−x) Ai² = (2x²Ai² − 2x Ai'² − Ai Ai')/3`.
/// The cubic correction to `q` is of relative size `Ai(x)²` and is dropped.
pub fn airy_boundary_state(x: f64) -> [f64; 5] {
    let (ai, aip) = airy_ai(x);
    let g = aip * aip - x * ai * ai;
    let f_int = (2.0 * x * x * ai * ai - 2.0 * x * aip * aip - ai * aip) / 3.0;
    [ai, aip, g, f_int, airy_tail_integral(x)]
}

/// `∫_x^∞ Ai(y) dy` by composite Simpson over `[x, x + 12]`; the neglected
/// remainder is below `Ai(x + 12)`.
fn airy_tail_integral(x: f64) -> f64 {
    let m = 2400;
    let h = 12.0 / m as f64;
    let mut s = airy_ai(x).0 + airy_ai(x + 12.0).0;
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * airy_ai(x + k as f64 * h).0;
    }
    s * h / 3.0
}

pub fn solve_painleve2(x_start: f64, x_end: f64, tol: f64) -> Result<PainleveSolution> {
    solve_painleve2_on_grid(x_start, x_end, tol, DEFAULT_GRID_STEP)
}

/// Integrates `(q, q', G, F_int, J)` downward from `x_start` to `x_end`,
/// landing exactly on every point of the uniform grid of spacing
/// `grid_step`. Below [`SERIES_SWITCH_X`] only `(G, F_int, J)` are
/// integrated, driven by the asymptotic `q`.
pub fn solve_painleve2_on_grid(
    x_start: f64,
    x_end: f64,
    tol: f64,
    grid_step: f64,
) -> Result<PainleveSolution> {
    if !(x_start >= 6.0) {
        return Err(Error::param(format!(
            "x_start must be >= 6 for the Airy boundary data, got {x_start}"
        )));
    }
    if !(x_end <= -8.0) {
        return Err(Error::param(format!("x_end must be <= -8, got {x_end}")));
    }
    if !(tol > 0.0) || !(grid_step > 0.0) {
        return Err(Error::param("tolerance and grid step must be positive"));
    }
    let steps = ((x_start - x_end) / grid_step).round() as usize;
    if ((x_start - x_end) - steps as f64 * grid_step).abs() > 1e-9 * grid_step.max(1.0) {
        return Err(Error::param(format!(
            "grid step {grid_step} does not divide [{x_end}, {x_start}]"
        )));
    }
    let grid: Vec<f64> = (0..=steps).map(|k| x_start - k as f64 * grid_step).collect();

    let split = grid
        .iter()
        .position(|&x| x <= SERIES_SWITCH_X + 1e-12)
        .expect("x_end lies below the switch point");
    let opts = OdeOptions::relative(tol);
    let diverged = |e: Error| match e {
        Error::Numeric(msg) => Error::numeric(format!("Painlevé II solve diverged: {msg}")),
        other => other,
    };

    let upper = integrate_ode_on_grid(
        |x, y, dy| {
            let q = y[0];
            dy[0] = y[1];
            dy[1] = x * q + 2.0 * q * q * q;
            dy[2] = -q * q;
            dy[3] = -y[2];
            dy[4] = -q;
        },
        &airy_boundary_state(x_start),
        &grid[..=split],
        &opts,
    )
    .map_err(diverged)?;

    let mut sol = PainleveSolution {
        grid,
        q: Vec::with_capacity(steps + 1),
        qprime: Vec::with_capacity(steps + 1),
        g: Vec::with_capacity(steps + 1),
        f_int: Vec::with_capacity(steps + 1),
        j: Vec::with_capacity(steps + 1),
        tol,
        grid_step,
    };
    for (x, s) in sol.grid.iter().zip(&upper) {
        // Hastings-McLeod is positive and below sqrt(-x/2) + 1; anything
        // else is a neighbouring solution that has peeled off
        let ceiling = (-x / 2.0).max(0.0).sqrt() + 1.0;
        if !(s[0] > 0.0) || s[0] > ceiling {
            return Err(off_branch(*x, s[0]));
        }
    }
    let xs = sol.grid[split];
    let at_switch = &upper[split];
    if (at_switch[0] - hastings_mcleod_left(xs).0).abs() > SWITCH_MISMATCH {
        return Err(off_branch(xs, at_switch[0]));
    }
    for s in &upper[..split] {
        sol.q.push(s[0]);
        sol.qprime.push(s[1]);
        sol.g.push(s[2]);
        sol.f_int.push(s[3]);
        sol.j.push(s[4]);
    }

    let lower = integrate_ode_on_grid(
        |x, y, dy| {
            let q = hastings_mcleod_left(x).0;
            dy[0] = -q * q;
            dy[1] = -y[0];
            dy[2] = -q;
        },
        &at_switch[2..],
        &sol.grid[split..],
        &opts,
    )
    .map_err(diverged)?;
    for (x, s) in sol.grid[split..].iter().zip(&lower) {
        let (q, qp) = hastings_mcleod_left(*x);
        sol.q.push(q);
        sol.qprime.push(qp);
        sol.g.push(s[0]);
        sol.f_int.push(s[1]);
        sol.j.push(s[2]);
    }
    Ok(sol)
}

fn off_branch(x: f64, q: f64) -> Error {
    Error::numeric(format!(
        "Painlevé II solve left the Hastings-McLeod branch at x = {x:.4} (q = {q:.6e})"
    ))
}
