//! Passive optical elements acting on sparse Fock states.
//!
//! Every two-mode mixer uses the creation-operator substitution
//!
//! ```text
//! a† -> cos θ a† + sin θ c†
//! c† -> cos θ c† - sin θ a†
//! ```
//!
//! expanded binomially per term, with `sqrt(p! q! / (n_a! n_c!))` weights
//! accumulated in the log domain. A rotator is the same substitution on the
//! H/V pair of one spatial mode. A polarizing beam splitter is a relabeling
//! of creation operators.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{binomial, ln_factorial_table, powu};
use crate::registry::{ModeRegistry, Target};
use crate::state::{check_cap, FockState, Occupation, DEFAULT_PHOTON_CAP, DEFAULT_PRUNE};

/// Phase picked up by each photon reflected at a polarizing beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReflectionPhase {
    #[default]
    One,
    I,
}

impl ReflectionPhase {
    fn factor(self, reflected: u32) -> Complex64 {
        match self {
            ReflectionPhase::One => Complex64::new(1.0, 0.0),
            ReflectionPhase::I => match reflected % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
        }
    }
}

/// Numerical conventions shared by every element application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub prune: f64,
    pub photon_cap: u32,
    pub reflection_phase: ReflectionPhase,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prune: DEFAULT_PRUNE,
            photon_cap: DEFAULT_PHOTON_CAP,
            reflection_phase: ReflectionPhase::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementSpec {
    /// Two-mode mixer. Scalar or sub-mode labels mix one pair; two spatial
    /// labels mix their H pair and their V pair.
    BeamSplitter {
        first: String,
        second: String,
        theta: f64,
    },
    Rotator {
        spatial: String,
        theta: f64,
    },
    /// `None` for `in2` is a vacuum input; `None` for an output discards it
    /// (it must never receive a photon).
    PolarizingBs {
        in1: String,
        in2: Option<String>,
        out1: Option<String>,
        out2: Option<String>,
    },
    Inject {
        mode: String,
        photons: u32,
    },
}

impl ElementSpec {
    pub fn beam_splitter(first: &str, second: &str, theta: f64) -> Self {
        ElementSpec::BeamSplitter {
            first: first.into(),
            second: second.into(),
            theta,
        }
    }

    pub fn rotator(spatial: &str, theta: f64) -> Self {
        ElementSpec::Rotator {
            spatial: spatial.into(),
            theta,
        }
    }

    pub fn pbs(in1: &str, in2: Option<&str>, out1: Option<&str>, out2: Option<&str>) -> Self {
        ElementSpec::PolarizingBs {
            in1: in1.into(),
            in2: in2.map(Into::into),
            out1: out1.map(Into::into),
            out2: out2.map(Into::into),
        }
    }

    pub fn inject(mode: &str, photons: u32) -> Self {
        ElementSpec::Inject {
            mode: mode.into(),
            photons,
        }
    }

    pub fn apply(&self, state: &FockState, cfg: &Config) -> Result<FockState> {
        match self {
            ElementSpec::BeamSplitter {
                first,
                second,
                theta,
            } => beam_splitter_with(state, first, second, *theta, cfg),
            ElementSpec::Rotator { spatial, theta } => rotator_with(state, spatial, *theta, cfg),
            ElementSpec::PolarizingBs {
                in1,
                in2,
                out1,
                out2,
            } => pbs_with(
                state,
                in1,
                in2.as_deref(),
                out1.as_deref(),
                out2.as_deref(),
                cfg,
            ),
            ElementSpec::Inject { mode, photons } => inject_with(state, mode, *photons, cfg),
        }
    }

    /// The angle of a mixing element, if any.
    pub fn theta(&self) -> Option<f64> {
        match self {
            ElementSpec::BeamSplitter { theta, .. } | ElementSpec::Rotator { theta, .. } => {
                Some(*theta)
            }
            _ => None,
        }
    }

    pub fn set_theta(&mut self, value: f64) {
        if let ElementSpec::BeamSplitter { theta, .. } | ElementSpec::Rotator { theta, .. } = self {
            *theta = value;
        }
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let port = |p: &Option<String>| p.clone().unwrap_or_else(|| "-".to_string());
        match self {
            ElementSpec::BeamSplitter {
                first,
                second,
                theta,
            } => write!(f, "bs {first} {second} theta={theta}"),
            ElementSpec::Rotator { spatial, theta } => write!(f, "rot {spatial} theta={theta}"),
            ElementSpec::PolarizingBs {
                in1,
                in2,
                out1,
                out2,
            } => write!(
                f,
                "pbs {in1} {} -> {} {}",
                port(in2),
                port(out1),
                port(out2)
            ),
            ElementSpec::Inject { mode, photons } => write!(f, "inject {mode} {photons}"),
        }
    }
}

/// Beam splitter with default conventions.
pub fn apply_beam_splitter(
    state: &FockState,
    first: &str,
    second: &str,
    theta: f64,
) -> Result<FockState> {
    beam_splitter_with(state, first, second, theta, &Config::default())
}

pub fn apply_rotator(state: &FockState, spatial: &str, theta: f64) -> Result<FockState> {
    rotator_with(state, spatial, theta, &Config::default())
}

pub fn apply_pbs(
    state: &FockState,
    in1: &str,
    in2: Option<&str>,
    out1: Option<&str>,
    out2: Option<&str>,
) -> Result<FockState> {
    pbs_with(state, in1, in2, out1, out2, &Config::default())
}

pub fn inject_fock(state: &FockState, mode: &str, photons: u32) -> Result<FockState> {
    inject_with(state, mode, photons, &Config::default())
}

fn beam_splitter_with(
    state: &FockState,
    first: &str,
    second: &str,
    theta: f64,
    cfg: &Config,
) -> Result<FockState> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    if first == second {
        return Err(Error::IdenticalModes(first.to_string()));
    }
    let reg = state.registry();
    let pairs: Vec<(usize, usize)> = match (reg.resolve(first)?, reg.resolve(second)?) {
        (Target::Spatial { h: h1, v: v1 }, Target::Spatial { h: h2, v: v2 }) => {
            alloc::vec![(h1, h2), (v1, v2)]
        }
        (Target::Spatial { .. }, _) | (_, Target::Spatial { .. }) => {
            return Err(Error::ModeKindMismatch {
                first: first.to_string(),
                second: second.to_string(),
            })
        }
        (Target::Scalar(a) | Target::SubMode(a), Target::Scalar(c) | Target::SubMode(c)) => {
            alloc::vec![(a, c)]
        }
    };
    let mut out = state.clone();
    for (a, c) in pairs {
        out = mix_pair(&out, a, c, theta, cfg)?;
    }
    Ok(out)
}

fn rotator_with(state: &FockState, spatial: &str, theta: f64, cfg: &Config) -> Result<FockState> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle);
    }
    match state.registry().resolve(spatial)? {
        Target::Spatial { h, v } => mix_pair(state, h, v, theta, cfg),
        _ => Err(Error::NotPolarized(spatial.to_string())),
    }
}

/// Applies the two-mode substitution to modes `a` and `c`.
pub(crate) fn mix_pair(
    state: &FockState,
    a: usize,
    c: usize,
    theta: f64,
    cfg: &Config,
) -> Result<FockState> {
    let (sin, cos) = libm::sincos(theta);
    let max_pair = state
        .terms()
        .map(|(o, _)| o.get(a) + o.get(c))
        .max()
        .unwrap_or(0);
    let lf = ln_factorial_table(max_pair);
    let mut terms: BTreeMap<Occupation, Complex64> = BTreeMap::new();

    for (occ, amp) in state.terms() {
        let na = occ.get(a);
        let nc = occ.get(c);
        let ln_in = lf[na as usize] + lf[nc as usize];
        // a-photons: a† -> cos a† + sin c†, choose j to stay in a
        let from_a: Vec<f64> = (0..=na)
            .map(|j| binomial(na, j) as f64 * powu(cos, j) * powu(sin, na - j))
            .collect();
        // c-photons: c† -> cos c† - sin a†, choose k to stay in c
        let from_c: Vec<f64> = (0..=nc)
            .map(|k| binomial(nc, k) as f64 * powu(cos, k) * powu(-sin, nc - k))
            .collect();
        for (j, wa) in from_a.iter().enumerate() {
            if *wa == 0.0 {
                continue;
            }
            let j = j as u32;
            for (k, wc) in from_c.iter().enumerate() {
                if *wc == 0.0 {
                    continue;
                }
                let k = k as u32;
                let p = j + nc - k;
                let q = na - j + k;
                let weight = libm::exp(0.5 * (lf[p as usize] + lf[q as usize] - ln_in));
                let mut next = occ.clone();
                next.counts_mut()[a] = p;
                next.counts_mut()[c] = q;
                if p > cfg.photon_cap || q > cfg.photon_cap {
                    check_cap(state.registry(), &next, cfg.photon_cap)?;
                }
                *terms.entry(next).or_default() += amp * (wa * wc * weight);
            }
        }
    }

    let mut out = FockState::from_parts(state.registry().clone(), terms);
    out.prune_in_place(cfg.prune);
    Ok(out)
}

fn spatial_pair(reg: &ModeRegistry, label: &str) -> Result<(usize, usize)> {
    match reg.resolve(label)? {
        Target::Spatial { h, v } => Ok((h, v)),
        _ => Err(Error::NotPolarized(label.to_string())),
    }
}

fn pbs_with(
    state: &FockState,
    in1: &str,
    in2: Option<&str>,
    out1: Option<&str>,
    out2: Option<&str>,
    cfg: &Config,
) -> Result<FockState> {
    let old = state.registry();
    if in2 == Some(in1) {
        return Err(Error::IdenticalModes(in1.to_string()));
    }
    if out1.is_some() && out1 == out2 {
        return Err(Error::IdenticalModes(out1.unwrap_or_default().to_string()));
    }
    let (h1, v1) = spatial_pair(old, in1)?;
    let second = in2.map(|l| spatial_pair(old, l)).transpose()?;
    let inputs: Vec<&str> = core::iter::once(in1).chain(in2).collect();

    // Outputs that are neither inputs nor fresh must start empty.
    let mut occupied_check: Vec<(usize, usize, &str)> = Vec::new();
    let mut fresh: Vec<&str> = Vec::new();
    for label in [out1, out2].into_iter().flatten() {
        if inputs.contains(&label) {
            continue;
        }
        if old.label_taken(label) {
            let (h, v) = spatial_pair(old, label)?;
            occupied_check.push((h, v, label));
        } else {
            fresh.push(label);
        }
    }

    let removed: Vec<usize> = inputs
        .iter()
        .filter(|l| Some(**l) != out1 && Some(**l) != out2)
        .flat_map(|l| {
            let (h, v) = spatial_pair(old, l).expect("resolved above");
            [h, v]
        })
        .collect();
    let (mut registry, kept) = old.without(&removed);
    for label in &fresh {
        registry.push_polarized(label)?;
    }
    let port = |label: Option<&str>| -> Option<(usize, usize)> {
        label.map(|l| registry.spatial_pair(l).expect("output registered"))
    };
    let p1 = port(out1);
    let p2 = port(out2);
    let input_modes: Vec<usize> = [Some((h1, v1)), second]
        .into_iter()
        .flatten()
        .flat_map(|(h, v)| [h, v])
        .collect();

    let mut terms: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        for &(h, v, label) in &occupied_check {
            if occ.get(h) + occ.get(v) > 0 {
                return Err(Error::ModeOccupied(label.to_string()));
            }
        }
        let c1h = occ.get(h1);
        let c1v = occ.get(v1);
        let (c2h, c2v) = second.map_or((0, 0), |(h, v)| (occ.get(h), occ.get(v)));

        let mut counts = alloc::vec![0u32; registry.len()];
        for (new_idx, &old_idx) in kept.iter().enumerate() {
            if !input_modes.contains(&old_idx) {
                counts[new_idx] = occ.get(old_idx);
            }
        }
        // H transmits, V reflects.
        let mut route = |dest: Option<(usize, usize)>, h: u32, v: u32| -> Result<()> {
            match dest {
                Some((dh, dv)) => {
                    counts[dh] += h;
                    counts[dv] += v;
                    Ok(())
                }
                None if h + v > 0 => Err(Error::DiscardedPortOccupied(in1.to_string())),
                None => Ok(()),
            }
        };
        route(p1, c1h, c2v)?;
        route(p2, c2h, c1v)?;

        let next = Occupation::new(counts);
        check_cap(&registry, &next, cfg.photon_cap)?;
        let phase = cfg.reflection_phase.factor(c1v + c2v);
        *terms.entry(next).or_default() += amp * phase;
    }
    let mut out = FockState::from_parts(registry, terms);
    out.prune_in_place(cfg.prune);
    Ok(out)
}

fn inject_with(state: &FockState, mode: &str, photons: u32, cfg: &Config) -> Result<FockState> {
    let reg = state.registry();
    let (state, idx) = match reg.resolve(mode) {
        Ok(Target::Scalar(i) | Target::SubMode(i)) => {
            if state.terms().any(|(o, _)| o.get(i) > 0) {
                return Err(Error::ModeOccupied(mode.to_string()));
            }
            (state.clone(), i)
        }
        Ok(Target::Spatial { .. }) => return Err(Error::AmbiguousPolarization(mode.to_string())),
        Err(Error::UnknownMode(_)) => {
            let extended = state.extend_vacuum(&crate::registry::ModeDecl::scalar(mode))?;
            let i = extended.registry().len() - 1;
            (extended, i)
        }
        Err(e) => return Err(e),
    };
    if photons > cfg.photon_cap {
        return Err(Error::PhotonCapExceeded {
            mode: mode.to_string(),
            count: photons,
            cap: cfg.photon_cap,
        });
    }
    let registry = state.registry().clone();
    let terms = state
        .into_terms()
        .into_iter()
        .map(|(mut o, a)| {
            o.counts_mut()[idx] = photons;
            (o, a)
        })
        .collect();
    Ok(FockState::from_parts(registry, terms))
}
