//! Ordered optical mode labels.
//!
//! A registry holds concrete modes. Scalar modes carry their own label
//! (`"c"`); a polarization-typed spatial label `"1"` registers the pair
//! `"1H"`, `"1V"`, always adjacent and always both present.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn suffix(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Scalar,
    Polarized { spatial: String, pol: Polarization },
}

/// One concrete mode of a registry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mode {
    label: String,
    kind: ModeKind,
}

impl Mode {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &ModeKind {
        &self.kind
    }

    pub fn spatial(&self) -> Option<&str> {
        match &self.kind {
            ModeKind::Scalar => None,
            ModeKind::Polarized { spatial, .. } => Some(spatial),
        }
    }
}

/// What a label resolves to inside a registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// A scalar mode.
    Scalar(usize),
    /// One polarization of a spatial mode, addressed by its concrete label.
    SubMode(usize),
    /// A polarization-typed spatial label: indices of its H and V modes.
    Spatial { h: usize, v: usize },
}

/// Declaration of a mode, as used when extending a registry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeDecl {
    pub label: String,
    pub polarized: bool,
}

impl ModeDecl {
    pub fn scalar(label: impl Into<String>) -> Self {
        ModeDecl {
            label: label.into(),
            polarized: false,
        }
    }

    pub fn polarized(label: impl Into<String>) -> Self {
        ModeDecl {
            label: label.into(),
            polarized: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ModeRegistry {
    modes: Vec<Mode>,
}

/// Labels are non-empty runs of ASCII alphanumerics, `_`, `'` or `.`.
pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.'))
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry of scalar modes.
    pub fn scalar<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut reg = Self::new();
        for l in labels {
            reg.push_scalar(l.as_ref())?;
        }
        Ok(reg)
    }

    /// Registry of polarization-typed spatial modes.
    pub fn polarized<S: AsRef<str>>(spatial: &[S]) -> Result<Self> {
        let mut reg = Self::new();
        for l in spatial {
            reg.push_polarized(l.as_ref())?;
        }
        Ok(reg)
    }

    pub fn push(&mut self, decl: &ModeDecl) -> Result<()> {
        if decl.polarized {
            self.push_polarized(&decl.label)
        } else {
            self.push_scalar(&decl.label)
        }
    }

    pub fn push_scalar(&mut self, label: &str) -> Result<()> {
        if !is_valid_label(label) {
            return Err(Error::InvalidLabel(label.to_string()));
        }
        if self.label_taken(label) {
            return Err(Error::DuplicateMode(label.to_string()));
        }
        self.modes.push(Mode {
            label: label.to_string(),
            kind: ModeKind::Scalar,
        });
        Ok(())
    }

    pub fn push_polarized(&mut self, spatial: &str) -> Result<()> {
        if !is_valid_label(spatial) {
            return Err(Error::InvalidLabel(spatial.to_string()));
        }
        for l in [
            spatial.to_string(),
            format!("{spatial}H"),
            format!("{spatial}V"),
        ] {
            if self.label_taken(&l) {
                return Err(Error::DuplicateMode(l));
            }
        }
        for pol in [Polarization::H, Polarization::V] {
            self.modes.push(Mode {
                label: format!("{spatial}{}", pol.suffix()),
                kind: ModeKind::Polarized {
                    spatial: spatial.to_string(),
                    pol,
                },
            });
        }
        Ok(())
    }

    /// True if `label` collides with a concrete or spatial label already present.
    pub fn label_taken(&self, label: &str) -> bool {
        self.modes
            .iter()
            .any(|m| m.label == label || m.spatial() == Some(label))
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.modes.iter().map(|m| m.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }

    pub fn spatial_pair(&self, spatial: &str) -> Option<(usize, usize)> {
        let mut h = None;
        let mut v = None;
        for (i, m) in self.modes.iter().enumerate() {
            if let ModeKind::Polarized { spatial: s, pol } = &m.kind {
                if s == spatial {
                    match pol {
                        Polarization::H => h = Some(i),
                        Polarization::V => v = Some(i),
                    }
                }
            }
        }
        h.zip(v)
    }

    pub fn resolve(&self, label: &str) -> Result<Target> {
        if let Some((h, v)) = self.spatial_pair(label) {
            return Ok(Target::Spatial { h, v });
        }
        match self.index_of(label) {
            Some(i) => match self.modes[i].kind {
                ModeKind::Scalar => Ok(Target::Scalar(i)),
                ModeKind::Polarized { .. } => Ok(Target::SubMode(i)),
            },
            None => Err(Error::UnknownMode(label.to_string())),
        }
    }

    /// Index of a concrete mode (scalar or one polarization).
    pub fn concrete(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    /// Mode indices addressed by a detector or injection label: a scalar
    /// mode, or both polarizations of a spatial label.
    pub fn detector_indices(&self, label: &str) -> Result<Vec<usize>> {
        match self.resolve(label)? {
            Target::Scalar(i) => Ok(alloc::vec![i]),
            Target::Spatial { h, v } => Ok(alloc::vec![h, v]),
            Target::SubMode(_) => Err(Error::PartialSpatialMode(label.to_string())),
        }
    }

    /// Registry with the given indices removed, plus the surviving old indices.
    pub fn without(&self, removed: &[usize]) -> (ModeRegistry, Vec<usize>) {
        let mut modes = Vec::new();
        let mut kept = Vec::new();
        for (i, m) in self.modes.iter().enumerate() {
            if !removed.contains(&i) {
                modes.push(m.clone());
                kept.push(i);
            }
        }
        (ModeRegistry { modes }, kept)
    }

    /// Concatenation of two registries with no shared labels.
    pub fn concat(&self, other: &ModeRegistry) -> Result<ModeRegistry> {
        for m in &other.modes {
            let clash = self.label_taken(&m.label)
                || m.spatial()
                    .is_some_and(|s| self.index_of(s).is_some() || self.spatial_pair(s).is_some());
            if clash {
                return Err(Error::OverlappingModes(m.label.clone()));
            }
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Ok(ModeRegistry { modes })
    }
}

impl fmt::Display for ModeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.modes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&m.label)?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarized_labels_expand_to_pairs() {
        let reg = ModeRegistry::polarized(&["1", "2"]).unwrap();
        let labels: Vec<_> = reg.labels().collect();
        assert_eq!(labels, ["1H", "1V", "2H", "2V"]);
        assert_eq!(reg.resolve("2").unwrap(), Target::Spatial { h: 2, v: 3 });
        assert_eq!(reg.resolve("1V").unwrap(), Target::SubMode(1));
    }

    #[test]
    fn collisions_are_rejected() {
        let mut reg = ModeRegistry::polarized(&["1"]).unwrap();
        assert_eq!(
            reg.push_scalar("1H"),
            Err(Error::DuplicateMode("1H".into()))
        );
        assert_eq!(reg.push_scalar("1"), Err(Error::DuplicateMode("1".into())));
        reg.push_scalar("c").unwrap();
        assert!(reg.push_polarized("c").is_err());
        assert!(reg.push_scalar("a b").is_err());
        assert!(reg.push_scalar("-").is_err());
    }

    #[test]
    fn removal_keeps_order() {
        let reg = ModeRegistry::scalar(&["a", "b", "c", "d"]).unwrap();
        let (rest, kept) = reg.without(&[1, 3]);
        assert_eq!(rest.labels().collect::<Vec<_>>(), ["a", "c"]);
        assert_eq!(kept, [0, 2]);
    }

    #[test]
    fn concat_detects_overlap() {
        let a = ModeRegistry::scalar(&["a"]).unwrap();
        let c = ModeRegistry::scalar(&["c"]).unwrap();
        assert_eq!(a.concat(&c).unwrap().len(), 2);
        assert!(matches!(a.concat(&a), Err(Error::OverlappingModes(_))));
    }
}
