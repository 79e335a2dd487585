//! Time-step bounds for the explicit schemes.

use super::SolveError;
use crate::dec::LaplaceOperator;

/// Per-vertex CFL bound for the leapfrog wave scheme and its global
/// minimum.
#[derive(Debug, Clone)]
pub struct StabilityBound {
    /// Largest stable time step: the minimum of `per_vertex_dt`.
    pub dt_max: f64,
    /// `sqrt(2 P_v / sum of incident weights) / c` per vertex.
    pub per_vertex_dt: Vec<f64>,
    /// Vertex attaining the minimum.
    pub argmin_vertex: usize,
}

/// CFL bound for the wave scheme: `c dt <= min over vertices of
/// sqrt(2 P_v / sum_e w_e)`. Derived from a Gershgorin estimate of the
/// operator spectrum, so it is conservative with respect to the exact
/// `2 / (c sqrt(lambda_max))` requirement.
pub fn cfl_bound(op: &LaplaceOperator, c: f64) -> Result<StabilityBound, SolveError> {
    if !(c > 0.0) {
        return Err(SolveError::InvalidParameter(format!(
            "wave speed must be positive, got {c}"
        )));
    }
    let mut per_vertex_dt = Vec::with_capacity(op.n_vertices());
    let mut negative_weights = false;
    for v in 0..op.n_vertices() {
        let area = op.dual_area(v);
        let weight_sum = op.weight_sum(v);
        negative_weights |= op.neighbors(v).iter().any(|&(_, w)| w < 0.0);
        let radicand = 2.0 * area / weight_sum;
        if !(radicand > 0.0) || !radicand.is_finite() {
            return Err(SolveError::UnstableVertex {
                vertex: v,
                dual_area: area,
                weight_sum,
            });
        }
        per_vertex_dt.push(radicand.sqrt() / c);
    }
    if negative_weights {
        log::warn!("cfl bound on a non-well-centered mesh: negative edge weights included as-is");
    }
    let (argmin_vertex, dt_max) = per_vertex_dt
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(v, &dt)| (v, dt))
        .expect("operator has at least one vertex");
    Ok(StabilityBound {
        dt_max,
        per_vertex_dt,
        argmin_vertex,
    })
}

/// Forward-Euler bound for the heat scheme: `2 / (c * lambda_G)` with
/// `lambda_G = max over vertices of (2 / P_v) * sum of incident weights`,
/// the Gershgorin estimate of the largest Laplacian eigenvalue.
pub fn heat_dt_bound(op: &LaplaceOperator, c: f64) -> Result<f64, SolveError> {
    if !(c > 0.0) {
        return Err(SolveError::InvalidParameter(format!(
            "diffusivity must be positive, got {c}"
        )));
    }
    let mut lambda_g: f64 = 0.0;
    for v in 0..op.n_vertices() {
        let area = op.dual_area(v);
        let weight_sum = op.weight_sum(v);
        let row = 2.0 * weight_sum / area;
        if !(row > 0.0) || !row.is_finite() {
            return Err(SolveError::UnstableVertex {
                vertex: v,
                dual_area: area,
                weight_sum,
            });
        }
        lambda_g = lambda_g.max(row);
    }
    Ok(2.0 / (c * lambda_g))
}
