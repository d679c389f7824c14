//! Adaptive Dormand-Prince 5(4) integration with PI step-size control.
//!
//! The embedded error estimate is controlled per unit step (for steps
//! shorter than one), so the local error of every accepted step is at most
//! the requested tolerance and the global error shrinks faster than linearly
//! in it.
//!
//! Integration may run in either direction. Besides full trajectories,
//! [`integrate_ode_on_grid`] forces the stepper to land exactly on a list of
//! output abscissae so no interpolation is needed downstream.

use crate::error::{Error, Result};

/// Tolerances and limits for the integrator.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step magnitude allowed.
    pub max_step: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_step: f64::INFINITY,
            initial_step: None,
            max_steps: 10_000_000,
        }
    }

    /// Pure relative control; appropriate when every component keeps a sign
    /// and spans many orders of magnitude.
    pub fn relative(tol: f64) -> Self {
        Self {
            atol: 0.0,
            ..Self::new(tol)
        }
    }
}

/// Accepted steps of an integration, including the initial point.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        let i = self.x.len() - 1;
        (self.x[i], &self.y[i])
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants. The controlled quantity is the error per unit
// step (for |h| < 1), which scales like h^4.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.25 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

struct Stepper<F> {
    rhs: F,
    opts: OdeOptions,
    dim: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err_prev: f64,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Stepper<F> {
    fn new(rhs: F, opts: OdeOptions, dim: usize) -> Self {
        Self {
            rhs,
            opts,
            dim,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            y_new: vec![0.0; dim],
            err_prev: 1e-4,
        }
    }

    /// One trial step of size h from (x, y) with k[0] = f(x, y) already set.
    /// Returns the scaled error norm; the candidate is left in `y_new` and
    /// f(x+h, y_new) in k[6].
    #[allow(clippy::needless_range_loop)]
    fn trial(&mut self, x: f64, y: &[f64], h: f64) -> f64 {
        let n = self.dim;
        macro_rules! stage {
            ($dst:expr, $c:expr, $($coef:expr => $src:expr),+) => {{
                for i in 0..n {
                    self.tmp[i] = y[i] + h * (0.0 $(+ $coef * self.k[$src][i])+);
                }
                (self.rhs)(x + $c * h, &self.tmp, &mut self.k[$dst]);
            }};
        }
        stage!(1, C2, A21 => 0);
        stage!(2, C3, A31 => 0, A32 => 1);
        stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * self.k[0][i]
                    + A73 * self.k[2][i]
                    + A74 * self.k[3][i]
                    + A75 * self.k[4][i]
                    + A76 * self.k[5][i]);
        }
        (self.rhs)(x + h, &self.y_new, &mut self.k[6]);

        let mut err = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(self.y_new[i].abs());
            let r = if sc > 0.0 {
                (e / sc).abs()
            } else if e == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            err = err.max(r);
        }
        if self.y_new.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        // error per unit step; never looser than error per step
        err / h.abs().min(1.0)
    }

    fn initial_step(&self, y: &[f64], span: f64) -> f64 {
        if let Some(h) = self.opts.initial_step {
            return h.abs().min(span);
        }
        let tol = self.opts.rtol.max(1e-300);
        let ynorm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let fnorm = self.k[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h = if fnorm > 0.0 && ynorm > 0.0 {
            0.01 * ynorm / fnorm
        } else {
            1e-6
        };
        (h * tol.powf(0.2) / 1e-3).clamp(1e-10 * span.max(1.0), span).min(self.opts.max_step)
    }

    /// Advance from (x, y) to exactly `target`, recording accepted steps via
    /// `on_accept`. `h` carries the proposed step magnitude between calls.
    fn advance(
        &mut self,
        x: &mut f64,
        y: &mut [f64],
        target: f64,
        h: &mut f64,
        steps: &mut usize,
        mut on_accept: impl FnMut(f64, &[f64]),
    ) -> Result<()> {
        let dir = if target >= *x { 1.0 } else { -1.0 };
        (self.rhs)(*x, y, &mut self.k[0]);
        let mut rejected_last = false;
        while (target - *x) * dir > 0.0 {
            let remaining = (target - *x).abs();
            let mut hmag = h.min(self.opts.max_step);
            let last = hmag >= remaining;
            if last {
                hmag = remaining;
            }
            let min_step = 1e-13 * x.abs().max(1.0);
            if hmag < min_step && !last {
                return Err(Error::numeric(format!(
                    "step size underflow at x = {x} (last good point); \
                     solution is stiff or blowing up"
                )));
            }
            let err = self.trial(*x, y, dir * hmag);
            *steps += 1;
            if *steps > self.opts.max_steps {
                return Err(Error::numeric(format!(
                    "exceeded {} steps; last good x = {x}",
                    self.opts.max_steps
                )));
            }
            if err <= 1.0 {
                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-EXPO) * self.err_prev.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
                };
                let fac = if rejected_last { fac.min(1.0) } else { fac };
                self.err_prev = err.max(1e-4);
                *x = if last { target } else { *x + dir * hmag };
                y.copy_from_slice(&self.y_new);
                let k6 = std::mem::take(&mut self.k[6]);
                self.k[6] = std::mem::replace(&mut self.k[0], k6);
                on_accept(*x, y);
                // keep the unclipped proposal when the step was clipped to the target
                *h = if last { h.max(hmag * fac) } else { hmag * fac };
                rejected_last = false;
            } else {
                let fac = if err.is_finite() {
                    (SAFETY * err.powf(-0.25)).clamp(FAC_MIN, 1.0)
                } else {
                    FAC_MIN
                };
                *h = hmag * fac;
                rejected_last = true;
                if *h < min_step {
                    return Err(Error::numeric(format!(
                        "step size underflow at x = {x} (last good point); \
                         solution is stiff or blowing up"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate(y0: &[f64], x0: f64, x1: f64, opts: &OdeOptions) -> Result<()> {
    if y0.is_empty() {
        return Err(Error::param("ODE state must be nonempty"));
    }
    if !(x0.is_finite() && x1.is_finite()) || x0 == x1 {
        return Err(Error::param(format!("invalid integration interval [{x0}, {x1}]")));
    }
    if !(opts.rtol > 0.0) || opts.atol < 0.0 {
        return Err(Error::param("ODE tolerances must satisfy rtol > 0, atol >= 0"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("initial state must be finite"));
    }
    Ok(())
}

/// Integrate `y' = rhs(x, y)` from `x0` to `x1` with mixed tolerance `tol`.
pub fn integrate_ode<F>(rhs: F, y0: &[f64], x0: f64, x1: f64, tol: f64) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_ode_with(rhs, y0, x0, x1, &OdeOptions::new(tol))
}

pub fn integrate_ode_with<F>(
    rhs: F,
    y0: &[f64],
    x0: f64,
    x1: f64,
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    validate(y0, x0, x1, opts)?;
    let mut st = Stepper::new(rhs, *opts, y0.len());
    let mut traj = Trajectory {
        x: vec![x0],
        y: vec![y0.to_vec()],
    };
    let mut x = x0;
    let mut y = y0.to_vec();
    (st.rhs)(x, &y, &mut st.k[0]);
    let mut h = st.initial_step(&y, (x1 - x0).abs());
    let mut steps = 0;
    st.advance(&mut x, &mut y, x1, &mut h, &mut steps, |xa, ya| {
        traj.x.push(xa);
        traj.y.push(ya.to_vec());
    })?;
    Ok(traj)
}

/// Integrate through a monotone list of abscissae (`grid[0]` is the initial
/// point) and return the state at every grid point.
pub fn integrate_ode_on_grid<F>(
    rhs: F,
    y0: &[f64],
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if grid.len() < 2 {
        return Err(Error::param("output grid needs at least two points"));
    }
    let x0 = grid[0];
    let x1 = grid[grid.len() - 1];
    validate(y0, x0, x1, opts)?;
    let dir = (x1 - x0).signum();
    if grid.windows(2).any(|w| (w[1] - w[0]) * dir <= 0.0) {
        return Err(Error::param("output grid must be strictly monotone"));
    }
    let mut st = Stepper::new(rhs, *opts, y0.len());
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.to_vec());
    let mut x = x0;
    let mut y = y0.to_vec();
    (st.rhs)(x, &y, &mut st.k[0]);
    let mut h = st.initial_step(&y, (x1 - x0).abs());
    let mut steps = 0;
    for &target in &grid[1..] {
        st.advance(&mut x, &mut y, target, &mut h, &mut steps, |_, _| {})?;
        out.push(y.clone());
    }
    Ok(out)
}
