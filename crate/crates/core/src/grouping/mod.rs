//! Automatic identification of eigentriples for 1D SSA.
//!
//! * [`trend`]: low-frequency method; keeps components whose periodogram mass
//!   in a frequency bin reaches a threshold.
//! * [`freq`]: periodogram method for oscillations; pairs consecutive vectors
//!   whose periodogram peaks coincide and whose peak mass is large.
//! * [`angle`]: angle-regularity method; pairs consecutive vectors whose 2D
//!   scatter turns by a constant angle.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::decomposition::{elementary_component, Decomposition, Group};
use crate::error::{param, Result};

pub mod angle;
pub mod freq;
pub mod trend;

pub use angle::{
    angle_sequence, identify_periodic_angle, tau, tau_norm, AngleIdConfig, AngleRanking,
    AngleSequence, Stopping,
};
pub use freq::{identify_periodic_freq, FreqIdConfig, FreqMeasures};
pub use trend::{identify_trend, TrendIdConfig};

/// An identified component: one eigentriple or a consecutive pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum Component {
    Single(usize),
    Pair(usize, usize),
}

impl Component {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Component::Single(i) => vec![i],
            Component::Pair(i, j) => vec![i, j],
        }
    }

    fn shifted(self, offset: usize) -> Self {
        match self {
            Component::Single(i) => Component::Single(i + offset),
            Component::Pair(i, j) => Component::Pair(i + offset, j + offset),
        }
    }
}

/// A measure value attached to a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub component: Component,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LowFrequency,
    Periodogram,
    AngleRegularity,
}

/// Output of an identification method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupingResult {
    pub method: Method,
    /// The identified set `J`.
    pub selected: Vec<Component>,
    /// Measure of every candidate: `T` per vector, `rho` per admitted pair
    /// and singleton, or normalized `tau` per consecutive pair.
    pub measures: Vec<Measured>,
    /// Threshold the selection was made with, if any.
    pub threshold: Option<f64>,
    /// Consecutive pairs whose periodogram peaks agree (first stage).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pair_stage: Vec<(usize, usize)>,
    /// Vectors whose peak sits at frequency 1/2 (first stage).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub single_stage: Vec<usize>,
    /// Periodogram peak frequency of each vector (per channel for
    /// multichannel inputs).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub peaks: Vec<Vec<Option<f64>>>,
    /// Pair measures that survived overlap elimination, ascending.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ordered: Vec<Measured>,
    /// Candidates excluded because a measure was undefined for them.
    pub degenerate: Vec<usize>,
}

impl GroupingResult {
    pub(crate) fn new(method: Method) -> Self {
        Self {
            method,
            selected: Vec::new(),
            measures: Vec::new(),
            threshold: None,
            pair_stage: Vec::new(),
            single_stage: Vec::new(),
            peaks: Vec::new(),
            ordered: Vec::new(),
            degenerate: Vec::new(),
        }
    }

    /// All component indices in `J`.
    pub fn group(&self) -> Group {
        self.selected.iter().flat_map(Component::indices).collect()
    }

    pub fn index_set(&self) -> BTreeSet<usize> {
        self.group().indices().clone()
    }

    /// Relabels every index by `offset`, for methods that were run on the
    /// consecutive range starting at `offset`.
    pub fn shifted(mut self, offset: usize) -> Self {
        let shift = |c: &mut Component| *c = c.shifted(offset);
        self.selected.iter_mut().for_each(shift);
        self.measures.iter_mut().for_each(|m| shift(&mut m.component));
        self.ordered.iter_mut().for_each(|m| shift(&mut m.component));
        self.pair_stage
            .iter_mut()
            .for_each(|(i, j)| (*i, *j) = (*i + offset, *j + offset));
        self.single_stage.iter_mut().for_each(|i| *i += offset);
        self.degenerate.iter_mut().for_each(|i| *i += offset);
        self
    }
}

/// Which object of an eigentriple a method is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Left singular vectors `U`.
    Eigen,
    /// Right singular vectors `V`.
    Factor,
    /// Elementary reconstructed components.
    Recon,
}

/// Vectors of the requested kind for every index of `group`.
///
/// Multichannel and 2D reconstructions are flattened channel after channel;
/// use the dedicated helpers in [`crate::mssa`] and [`crate::field`] when the
/// per-channel structure matters.
pub fn candidates(
    dec: &Decomposition,
    source: SourceKind,
    group: &Group,
) -> Result<Vec<(usize, Vec<f64>)>> {
    group
        .indices()
        .iter()
        .map(|&i| {
            if i >= dec.rank() {
                return param(format!(
                    "component {i} out of range, decomposition has {} components",
                    dec.rank()
                ));
            }
            let t = dec.triple(i);
            let values = match source {
                SourceKind::Eigen => t.u.clone(),
                SourceKind::Factor => t.v.clone(),
                SourceKind::Recon => elementary_component(dec, i)?.flat(),
            };
            Ok((i, values))
        })
        .collect()
}
