//! Forward-Euler scheme for the heat equation `u_t = c Lap u`.

use super::{SolveError, SourceSignal, OVERFLOW_LIMIT};
use crate::dec::LaplaceOperator;

/// Single time layer of the temperature field.
#[derive(Debug, Clone)]
pub struct HeatState {
    u_curr: Vec<f64>,
    time_index: u64,
    dt: f64,
    c: f64,
    scratch: Vec<f64>,
}

impl HeatState {
    pub fn new(
        op: &LaplaceOperator,
        u0: &[f64],
        dt: f64,
        c: f64,
    ) -> Result<Self, SolveError> {
        if !(dt > 0.0) || !(c > 0.0) {
            return Err(SolveError::InvalidParameter(format!(
                "dt and c must be positive, got dt = {dt}, c = {c}"
            )));
        }
        op.check_field(u0)?;
        Ok(Self {
            u_curr: u0.to_vec(),
            time_index: 0,
            dt,
            c,
            scratch: vec![0.0; u0.len()],
        })
    }

    pub fn u(&self) -> &[f64] {
        &self.u_curr
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

    /// `u_new = u + c dt Lap(u)`, then source injection at the new time.
    pub fn step(
        &mut self,
        op: &LaplaceOperator,
        source: &SourceSignal,
    ) -> Result<(), SolveError> {
        op.apply_into(&self.u_curr, &mut self.scratch);
        let k = self.c * self.dt;
        for v in 0..self.u_curr.len() {
            self.u_curr[v] += k * self.scratch[v];
        }
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

    /// Area-weighted total `sum_v P_v u_v`; conserved by source-free steps.
    pub fn weighted_total(&self, op: &LaplaceOperator) -> f64 {
        self.u_curr
            .iter()
            .enumerate()
            .map(|(v, &u)| op.dual_area(v) * u)
            .sum()
    }
}
