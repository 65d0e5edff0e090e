//! Photon-number-resolving detection and post-selection.
//!
//! Detectors are polarization insensitive: a detector on a spatial label
//! counts the photons of both its H and V modes. Detected modes leave the
//! registry.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{FockState, Occupation, ZERO_NORM_SQR};

/// Exact photon counts required at each detector, in detection order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DetectionPattern {
    counts: Vec<(String, u32)>,
}

impl DetectionPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(label: &str, count: u32) -> Self {
        Self::new().with(label, count)
    }

    /// Adds or replaces the requirement for `label`.
    pub fn with(mut self, label: &str, count: u32) -> Self {
        match self.counts.iter_mut().find(|(l, _)| l == label) {
            Some(entry) => entry.1 = count,
            None => self.counts.push((label.into(), count)),
        }
        self
    }

    pub fn entries(&self) -> &[(String, u32)] {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, c)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}={c}")?;
        }
        Ok(())
    }
}

/// Conditional state after a detection outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Heralded {
    /// Normalized conditional state; the zero state when the outcome cannot occur.
    pub state: FockState,
    pub probability: f64,
}

impl Heralded {
    /// True when the outcome has zero probability.
    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }
}

struct Detectors {
    groups: Vec<Vec<usize>>,
    all: Vec<usize>,
}

fn detectors<S: AsRef<str>>(state: &FockState, labels: &[S]) -> Result<Detectors> {
    let mut groups = Vec::with_capacity(labels.len());
    let mut all = Vec::new();
    for l in labels {
        let idx = state.registry().detector_indices(l.as_ref())?;
        if idx.iter().any(|i| all.contains(i)) {
            return Err(Error::DuplicateMode(l.as_ref().into()));
        }
        all.extend_from_slice(&idx);
        groups.push(idx);
    }
    Ok(Detectors { groups, all })
}

fn reading(occ: &Occupation, groups: &[Vec<usize>]) -> Vec<u32> {
    groups
        .iter()
        .map(|g| g.iter().map(|&i| occ.get(i)).sum())
        .collect()
}

/// Projects onto `pattern` and drops the detector modes.
///
/// The probability is the squared norm of the matching component relative to
/// the squared norm of the input.
pub fn postselect(state: &FockState, pattern: &DetectionPattern) -> Result<Heralded> {
    let labels: Vec<&str> = pattern.counts.iter().map(|(l, _)| l.as_str()).collect();
    let det = detectors(state, &labels)?;
    let wanted: Vec<u32> = pattern.counts.iter().map(|(_, c)| *c).collect();
    let (registry, kept) = state.registry().without(&det.all);

    let mut terms: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        if reading(occ, &det.groups) == wanted {
            *terms.entry(occ.select(&kept)).or_default() += *amp;
        }
    }
    let projected = FockState::from_parts(registry.clone(), terms);
    let total = state.norm_sqr();
    let kept_sqr = projected.norm_sqr();
    if total < ZERO_NORM_SQR || kept_sqr < ZERO_NORM_SQR {
        return Ok(Heralded {
            state: FockState::zero(registry),
            probability: 0.0,
        });
    }
    let (normalized, _) = projected.normalize()?;
    Ok(Heralded {
        state: normalized,
        probability: kept_sqr / total,
    })
}

/// Probabilities of every detector reading that occurs, in ascending
/// reading order.
pub fn outcome_distribution<S: AsRef<str>>(
    state: &FockState,
    labels: &[S],
) -> Result<Vec<(Vec<u32>, f64)>> {
    let det = detectors(state, labels)?;
    let total = state.norm_sqr();
    if total < ZERO_NORM_SQR {
        return Err(Error::ZeroNorm);
    }
    let mut dist: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        *dist.entry(reading(occ, &det.groups)).or_default() += amp.norm_sqr();
    }
    Ok(dist.into_iter().map(|(k, p)| (k, p / total)).collect())
}
