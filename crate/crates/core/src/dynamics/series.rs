use crate::error::{Error, Result};

pub const NEGATIVITY: &str = "negativity";
pub const NEGATIVITY_AVG: &str = "negativity_avg";
pub const ENERGY: &str = "energy";
pub const TRACE: &str = "trace";
pub const PURITY: &str = "purity";
pub const PARTICLE_NUMBER: &str = "particle_number";
pub const MIN_EIGENVALUE: &str = "min_eigenvalue";
pub const HERMITICITY_ERROR: &str = "hermiticity_error";

/// Population of the `total`-particle sector.
pub fn population_channel(total: usize) -> String {
    format!("population_{total}")
}

/// Block negativity of the `total`-particle sector.
pub fn block_negativity_channel(total: usize) -> String {
    format!("negativity_{total}")
}

/// Uniform grid `0, Δt, ..., t_max` with `samples` points.
pub fn uniform_times(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let dt = t_max / (samples - 1) as f64;
    Ok((0..samples).map(|k| k as f64 * dt).collect())
}

/// `t⁻¹ ∫₀ᵗ f` on the sample grid by the trapezoid rule; the first entry is `f(0)`.
pub fn running_time_average(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut integral = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if k == 0 {
            out.push(v);
            continue;
        }
        integral += 0.5 * (times[k] - times[k - 1]) * (v + values[k - 1]);
        out.push(integral / (times[k] - times[0]));
    }
    out
}

/// Sampled trajectory of named scalar observables.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Self {
        Self {
            times,
            channels: Vec::new(),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Adds or replaces a channel.
    pub fn insert(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.times.len(), "channel length must match the time grid");
        let name = name.into();
        match self.channels.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = values,
            None => self.channels.push((name, values)),
        }
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn channels(&self) -> &[(String, Vec<f64>)] {
        &self.channels
    }

    /// Largest absolute difference over the channels both series share.
    pub fn max_deviation(&self, other: &TimeSeries) -> Option<f64> {
        if self.times.len() != other.times.len() {
            return None;
        }
        let mut worst = 0.0_f64;
        for (name, values) in &self.channels {
            if let Some(theirs) = other.channel(name) {
                for (a, b) in values.iter().zip(theirs) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Some(worst)
    }
}
