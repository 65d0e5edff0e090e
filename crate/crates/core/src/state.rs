//! Sparse multi-mode Fock states.
//!
//! A [`FockState`] is a map from occupation vectors to complex amplitudes
//! over a fixed [`ModeRegistry`]. Keys are ordered lexicographically, which
//! fixes the iteration order everywhere downstream (serialization, traces,
//! dense/sparse comparisons).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::registry::{ModeDecl, ModeRegistry};

/// Amplitudes below this modulus are dropped after every element.
pub const DEFAULT_PRUNE: f64 = 1e-14;
/// Maximum photons held by a single mode.
pub const DEFAULT_PHOTON_CAP: u32 = 64;
/// Squared norms below this are treated as zero.
pub const ZERO_NORM_SQR: f64 = 1e-30;

/// Photon counts, one per registry mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(alloc::vec![0; modes])
    }

    /// Builds an occupation from signed counts, rejecting negatives.
    pub fn from_signed(counts: &[i64]) -> Result<Self> {
        counts
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                u32::try_from(value).map_err(|_| Error::NegativeOccupation { index, value })
            })
            .collect::<Result<Vec<_>>>()
            .map(Occupation)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Occupation restricted to the given mode indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Occupation {
        Occupation(indices.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Occupation(v)
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(v: [u32; N]) -> Self {
        Occupation(v.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("⟩")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    registry: ModeRegistry,
    terms: BTreeMap<Occupation, Complex64>,
}

impl FockState {
    /// The zero vector (not the vacuum).
    pub fn zero(registry: ModeRegistry) -> Self {
        FockState {
            registry,
            terms: BTreeMap::new(),
        }
    }

    pub fn vacuum(registry: ModeRegistry) -> Self {
        let occ = Occupation::vacuum(registry.len());
        let mut terms = BTreeMap::new();
        terms.insert(occ, Complex64::new(1.0, 0.0));
        FockState { registry, terms }
    }

    pub fn basis_state(registry: ModeRegistry, occ: Occupation) -> Result<Self> {
        Self::superposition(registry, [(occ, Complex64::new(1.0, 0.0))])
    }

    /// Sums the given terms; duplicate occupations add. The result is not
    /// normalized.
    pub fn superposition<I>(registry: ModeRegistry, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut out = FockState::zero(registry);
        for (occ, amp) in terms {
            out.check_conforms(&occ)?;
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::NonFiniteAmplitude);
            }
            out.add_term(occ, amp);
        }
        Ok(out)
    }

    pub(crate) fn from_parts(
        registry: ModeRegistry,
        terms: BTreeMap<Occupation, Complex64>,
    ) -> Self {
        FockState { registry, terms }
    }

    fn check_conforms(&self, occ: &Occupation) -> Result<()> {
        if occ.len() != self.registry.len() {
            return Err(Error::LengthMismatch {
                expected: self.registry.len(),
                found: occ.len(),
            });
        }
        check_cap(&self.registry, occ, DEFAULT_PHOTON_CAP)
    }

    pub(crate) fn add_term(&mut self, occ: Occupation, amp: Complex64) {
        *self.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub(crate) fn into_terms(self) -> BTreeMap<Occupation, Complex64> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    /// Amplitude of the basis state with the given counts, if they conform.
    pub fn amplitude_of(&self, counts: &[u32]) -> Complex64 {
        self.terms
            .get(&Occupation(counts.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner_product(&self, other: &FockState) -> Result<Complex64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    /// Returns the unit-norm state and the original norm.
    pub fn normalize(&self) -> Result<(FockState, f64)> {
        let n2 = self.norm_sqr();
        if n2 < ZERO_NORM_SQR {
            return Err(Error::ZeroNorm);
        }
        let norm = libm::sqrt(n2);
        Ok((self.scaled(Complex64::new(1.0 / norm, 0.0)), norm))
    }

    pub fn scaled(&self, factor: Complex64) -> FockState {
        FockState {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(o, a)| (o.clone(), a * factor))
                .collect(),
        }
    }

    /// Product state over the concatenated registry.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        let registry = self.registry.concat(&other.registry)?;
        let mut terms = BTreeMap::new();
        for (oa, a) in &self.terms {
            for (ob, b) in &other.terms {
                terms.insert(oa.concat(ob), a * b);
            }
        }
        Ok(FockState { registry, terms })
    }

    /// Drops terms with modulus strictly below `eps`.
    pub fn prune(&self, eps: f64) -> FockState {
        FockState {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(_, a)| a.norm() >= eps)
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
        }
    }

    pub(crate) fn prune_in_place(&mut self, eps: f64) {
        self.terms.retain(|_, a| a.norm() >= eps);
    }

    /// Appends vacuum modes.
    pub fn extend_vacuum(&self, decl: &ModeDecl) -> Result<FockState> {
        let mut registry = self.registry.clone();
        registry.push(decl)?;
        let added = registry.len() - self.registry.len();
        let terms = self
            .terms
            .iter()
            .map(|(o, a)| {
                let mut counts = o.0.clone();
                counts.extend(core::iter::repeat_n(0, added));
                (Occupation(counts), *a)
            })
            .collect();
        Ok(FockState { registry, terms })
    }

    /// Distinct total photon numbers present, ascending.
    pub fn photon_totals(&self) -> Vec<u32> {
        let mut totals: Vec<u32> = self.terms.keys().map(Occupation::total).collect();
        totals.sort_unstable();
        totals.dedup();
        totals
    }

    /// Same state with the global phase fixed so the first nonzero
    /// amplitude (in canonical order) is positive real.
    pub fn canonical_phase(&self) -> FockState {
        match self.terms.values().find(|a| a.norm_sqr() > 0.0) {
            Some(first) => self.scaled(first.conj() / first.norm()),
            None => self.clone(),
        }
    }

    /// `|⟨self|other⟩|² / (‖self‖² ‖other‖²)`.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        let overlap = self.inner_product(other)?;
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom < ZERO_NORM_SQR {
            return Err(Error::ZeroNorm);
        }
        Ok(overlap.norm_sqr() / denom)
    }

    /// Largest elementwise amplitude difference over the union of supports.
    pub fn max_abs_diff(&self, other: &FockState) -> Result<f64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut worst: f64 = 0.0;
        for (o, a) in &self.terms {
            worst = worst.max((a - other.amplitude(o)).norm());
        }
        for (o, b) in &other.terms {
            if !self.terms.contains_key(o) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// Elementwise difference after canonicalizing both global phases.
    pub fn max_abs_diff_up_to_phase(&self, other: &FockState) -> Result<f64> {
        self.canonical_phase()
            .max_abs_diff(&other.canonical_phase())
    }
}

pub(crate) fn check_cap(registry: &ModeRegistry, occ: &Occupation, cap: u32) -> Result<()> {
    for (i, &c) in occ.counts().iter().enumerate() {
        if c > cap {
            return Err(Error::PhotonCapExceeded {
                mode: registry.modes()[i].label().into(),
                count: c,
                cap,
            });
        }
    }
    Ok(())
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.registry)?;
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (o, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, o)?;
        }
        Ok(())
    }
}
