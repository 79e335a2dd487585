//! Explicit leapfrog scheme for the wave equation `u_tt = c^2 Lap u`.
//!
//! The update solves the centered three-term recurrence
//!
//! ```text
//! u_new = 2 u_curr - u_prev + (c dt)^2 * Lap(u_curr)
//! ```
//!
//! keeping the two most recent layers in a circular buffer. The second
//! layer is started with a Taylor expansion so both initial layers are
//! second-order consistent.

use super::{cfl_bound, SolveError, SourceSignal, OVERFLOW_LIMIT};
use crate::dec::LaplaceOperator;

/// Two consecutive time layers of the scalar field plus step metadata.
#[derive(Debug, Clone)]
pub struct WaveState {
    u_prev: Vec<f64>,
    u_curr: Vec<f64>,
    time_index: u64,
    dt: f64,
    c: f64,
    scratch: Vec<f64>,
}

impl WaveState {
    /// Initialize from displacement `u0` and velocity `v0`:
    /// `u_prev = u0`, `u_curr = u0 + dt v0 + (c dt)^2 / 2 * Lap(u0)`.
    ///
    /// A `dt` beyond the CFL bound is allowed (it is what the instability
    /// experiment needs) but logged as a warning.
    pub fn new(
        op: &LaplaceOperator,
        u0: &[f64],
        v0: &[f64],
        dt: f64,
        c: f64,
    ) -> Result<Self, SolveError> {
        if !(dt > 0.0) || !(c > 0.0) {
            return Err(SolveError::InvalidParameter(format!(
                "dt and c must be positive, got dt = {dt}, c = {c}"
            )));
        }
        op.check_field(u0)?;
        op.check_field(v0)?;
        if let Ok(bound) = cfl_bound(op, c) {
            if dt > bound.dt_max * (1.0 + 1e-12) {
                log::warn!(
                    "dt = {dt:.6e} exceeds the CFL bound {:.6e}; expect instability",
                    bound.dt_max
                );
            }
        }
        let lap = op.apply(u0)?;
        let k = 0.5 * (c * dt) * (c * dt);
        let u_curr = u0
            .iter()
            .zip(v0)
            .zip(&lap)
            .map(|((&u, &v), &l)| u + dt * v + k * l)
            .collect();
        Ok(Self {
            u_prev: u0.to_vec(),
            u_curr,
            time_index: 1,
            dt,
            c,
            scratch: vec![0.0; u0.len()],
        })
    }

    /// Current layer (time `time_index * dt`).
    pub fn u(&self) -> &[f64] {
        &self.u_curr
    }

    /// Previous layer (time `(time_index - 1) * dt`).
    pub fn u_prev(&self) -> &[f64] {
        &self.u_prev
    }

    /// Mutable access to the current layer, for callers that impose
    /// boundary values between steps.
    pub fn u_mut(&mut self) -> &mut [f64] {
        &mut self.u_curr
    }

    pub fn time_index(&self) -> u64 {
        self.time_index
    }

    pub fn time(&self) -> f64 {
        self.time_index as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Advance one step, rotate the layer buffer, then inject the source at
    /// the new time. Fails with an overflow error when any value leaves
    /// [-OVERFLOW_LIMIT, OVERFLOW_LIMIT] or stops being finite.
    pub fn step(
        &mut self,
        op: &LaplaceOperator,
        source: &SourceSignal,
    ) -> Result<(), SolveError> {
        op.apply_into(&self.u_curr, &mut self.scratch);
        let k = (self.c * self.dt) * (self.c * self.dt);
        for v in 0..self.u_curr.len() {
            // Overwrites the oldest layer in place ...
            self.u_prev[v] = 2.0 * self.u_curr[v] - self.u_prev[v] + k * self.scratch[v];
        }
        // ... which after the swap becomes the current one.
        std::mem::swap(&mut self.u_prev, &mut self.u_curr);
        self.time_index += 1;
        let t = self.time();
        source.apply(&mut self.u_curr, t);

        let max_abs = self.u_curr.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        if !max_abs.is_finite() || max_abs > OVERFLOW_LIMIT {
            return Err(SolveError::Overflow {
                time_index: self.time_index,
                max_abs,
            });
        }
        Ok(())
    }
}

/// Discrete leapfrog energy
///
/// ```text
/// E = 1/2 sum_v P_v ((u_curr - u_prev)/dt)^2
///   + c^2/2 sum_e w_e (du_curr)_e (du_prev)_e
/// ```
///
/// with `(du)_e` the difference across edge `e`. Exactly conserved by the
/// update in exact arithmetic, so its drift measures a run's health.
pub fn wave_energy(state: &WaveState, op: &LaplaceOperator) -> f64 {
    let u = &state.u_curr;
    let p = &state.u_prev;
    let mut kinetic = 0.0;
    for v in 0..u.len() {
        let rate = (u[v] - p[v]) / state.dt;
        kinetic += op.dual_area(v) * rate * rate;
    }
    let mut cross = 0.0;
    for (e, &[a, b]) in op.edges().iter().enumerate() {
        cross += op.weight(e) * (u[b] - u[a]) * (p[b] - p[a]);
    }
    0.5 * kinetic + 0.5 * state.c * state.c * cross
}
