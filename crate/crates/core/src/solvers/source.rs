//! Single-vertex source signals injected during time stepping.

use super::SolveError;

/// How a source value enters the field at its vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    /// Overwrite the vertex value with the signal value.
    Hard,
    /// Add the signal value to the vertex value.
    Additive,
}

/// Transmitted signal assigned at one vertex each step.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSignal {
    None,
    /// `amplitude * exp(-(t - center_time)^2 / (2 width^2))`.
    GaussianPulse {
        vertex: usize,
        amplitude: f64,
        center_time: f64,
        width: f64,
        injection: Injection,
    },
    /// `amplitude * sin(2 pi frequency t)`.
    Sine {
        vertex: usize,
        amplitude: f64,
        frequency: f64,
        injection: Injection,
    },
}

impl SourceSignal {
    pub fn is_none(&self) -> bool {
        matches!(self, SourceSignal::None)
    }

    pub fn vertex(&self) -> Option<usize> {
        match *self {
            SourceSignal::None => None,
            SourceSignal::GaussianPulse { vertex, .. } | SourceSignal::Sine { vertex, .. } => {
                Some(vertex)
            }
        }
    }

    /// Signal value at simulation time `t`, `None` for the null source.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        match *self {
            SourceSignal::None => None,
            SourceSignal::GaussianPulse {
                amplitude,
                center_time,
                width,
                ..
            } => {
                let arg = (t - center_time) / width;
                Some(amplitude * (-0.5 * arg * arg).exp())
            }
            SourceSignal::Sine {
                amplitude,
                frequency,
                ..
            } => Some(amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin()),
        }
    }

    /// Inject the signal into a field at time `t`.
    pub fn apply(&self, u: &mut [f64], t: f64) {
        let (Some(v), Some(value)) = (self.vertex(), self.value_at(t)) else {
            return;
        };
        let injection = match *self {
            SourceSignal::GaussianPulse { injection, .. }
            | SourceSignal::Sine { injection, .. } => injection,
            SourceSignal::None => unreachable!(),
        };
        match injection {
            Injection::Hard => u[v] = value,
            Injection::Additive => u[v] += value,
        }
    }

    pub fn validate(&self, n_vertices: usize) -> Result<(), SolveError> {
        if let Some(v) = self.vertex() {
            if v >= n_vertices {
                return Err(SolveError::InvalidSource(format!(
                    "source vertex {v} out of range ({n_vertices} vertices)"
                )));
            }
        }
        if let SourceSignal::GaussianPulse { width, .. } = *self {
            if !(width > 0.0) {
                return Err(SolveError::InvalidSource(format!(
                    "gaussian pulse width must be positive, got {width}"
                )));
            }
        }
        Ok(())
    }
}
