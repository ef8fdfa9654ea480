//! Low-frequency method for trend identification.

use serde::Serialize;

use super::{Component, GroupingResult, Measured, Method, SourceKind};
use crate::error::{param, Result};
use crate::spectral::Periodogram;

/// Frequency bin `[omega1, omega2)` and threshold `T0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendIdConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub threshold: f64,
    pub source: SourceKind,
}

impl TrendIdConfig {
    /// The trend form: bin `[0, omega)`.
    pub fn low_frequency(omega: f64, threshold: f64) -> Self {
        Self {
            omega1: 0.0,
            omega2: omega,
            threshold,
            source: SourceKind::Eigen,
        }
    }

    pub fn with_source(mut self, source: SourceKind) -> Self {
        self.source = source;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.omega1)
            || !(0.0..=0.5).contains(&self.omega2)
            || self.omega1 > self.omega2
        {
            return param(format!(
                "trend bin [{}, {}) must satisfy 0 <= w1 <= w2 <= 0.5",
                self.omega1, self.omega2
            ));
        }
        check_threshold(self.threshold)
    }
}

pub(crate) fn check_threshold(t0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t0) {
        return param(format!("threshold {t0} outside [0, 1]"));
    }
    Ok(())
}

/// Keeps every candidate whose measure is at least `threshold`; `None`
/// measures are recorded as degenerate.
pub(crate) fn select_at_least(
    method: Method,
    measured: Vec<(usize, Option<f64>)>,
    threshold: f64,
) -> GroupingResult {
    let mut result = GroupingResult::new(method);
    result.threshold = Some(threshold);
    for (i, value) in measured {
        match value {
            Some(value) => {
                result.measures.push(Measured {
                    component: Component::Single(i),
                    value,
                });
                if value >= threshold {
                    result.selected.push(Component::Single(i));
                }
            }
            None => result.degenerate.push(i),
        }
    }
    result
}

/// `T(y; w1, w2)`, or `None` for a zero vector.
pub(crate) fn bin_share(y: &[f64], w1: f64, w2: f64) -> Result<Option<f64>> {
    let p = Periodogram::new(y)?;
    if p.is_degenerate() {
        return Ok(None);
    }
    p.share(w1, w2).map(Some)
}

/// Low-frequency identification: `J = { i : T(Y_i; w1, w2) >= T0 }`.
///
/// Candidates are `(index, values)` pairs and may be left or right singular
/// vectors or elementary reconstructed series; the measure is the same for
/// all of them.
pub fn identify_trend<V: AsRef<[f64]>>(
    candidates: &[(usize, V)],
    cfg: &TrendIdConfig,
) -> Result<GroupingResult> {
    cfg.validate()?;
    let measured = candidates
        .iter()
        .map(|(i, y)| Ok((*i, bin_share(y.as_ref(), cfg.omega1, cfg.omega2)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_at_least(Method::LowFrequency, measured, cfg.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SsaError;

    #[test]
    fn zero_threshold_keeps_everything() {
        let c = vec![(0, vec![1.0, -1.0, 1.0, -1.0]), (3, vec![1.0, 2.0, 3.0, 4.0])];
        let r = identify_trend(&c, &TrendIdConfig::low_frequency(0.1, 0.0)).unwrap();
        assert_eq!(r.selected, vec![Component::Single(0), Component::Single(3)]);
        assert_eq!(r.measures.len(), 2);
    }

    #[test]
    fn zero_candidate_is_flagged() {
        let c = vec![(0, vec![0.0; 6]), (1, vec![1.0; 6])];
        let r = identify_trend(&c, &TrendIdConfig::low_frequency(0.1, 0.5)).unwrap();
        assert_eq!(r.degenerate, vec![0]);
        assert_eq!(r.selected, vec![Component::Single(1)]);
    }

    #[test]
    fn invalid_config() {
        let c: Vec<(usize, Vec<f64>)> = vec![];
        for cfg in [
            TrendIdConfig::low_frequency(0.6, 0.5),
            TrendIdConfig::low_frequency(0.1, 1.5),
            TrendIdConfig {
                omega1: 0.3,
                omega2: 0.2,
                threshold: 0.1,
                source: SourceKind::Eigen,
            },
        ] {
            assert!(matches!(identify_trend(&c, &cfg), Err(SsaError::Parameter(_))));
        }
    }
}
