//! Heralded state-generation schemes and their closed forms.
//!
//! * The Θ block: two ancilla photons, two beam splitters at θ, and a
//!   one-photon coincidence on both ancilla outputs. On an `N`-photon input
//!   `Σ C_n |n, N-n⟩` it multiplies each coefficient by
//!   `cos^{N-2}θ (cos²θ - n sin²θ)(cos²θ - (N-n) sin²θ)`, so picking
//!   `tan θ = 1/√i` removes the `|i, N-i⟩` and `|N-i, i⟩` terms.
//! * The NOON generator: a balanced splitter followed by enough blocks to
//!   delete every interior term.
//! * The two-photon polarization entangler that heralds the singlet with
//!   probability 1/18.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::circuit::{run, Circuit, Step};
use crate::detection::DetectionPattern;
use crate::elements::{Config, ElementSpec};
use crate::error::{Error, Result};
use crate::math::{ln_double_factorial, ln_factorial};
use crate::registry::{ModeDecl, ModeRegistry};
use crate::state::FockState;

/// Conditional amplitude factor of a Θ block on `|n, N-n⟩`.
pub fn block_amplitude_factor(n: u32, total: u32, theta: f64) -> f64 {
    let (s, c) = libm::sincos(theta);
    let (s2, c2) = (s * s, c * c);
    let prefactor = libm::pow(c, f64::from(total) - 2.0);
    prefactor * (c2 - f64::from(n) * s2) * (c2 - f64::from(total - n) * s2)
}

/// Heralded output of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub state: FockState,
    pub probability: f64,
    pub theta: f64,
}

fn fresh_label(reg: &ModeRegistry, base: &str) -> String {
    let mut label = String::from(base);
    let mut k = 0;
    while reg.label_taken(&label) {
        k += 1;
        label = format!("{base}{k}");
    }
    label
}

/// Steps of one block acting on scalar modes `a` and `b`, using ancilla
/// modes `c` and `d`.
pub fn block_steps(a: &str, b: &str, c: &str, d: &str, theta: f64) -> Vec<Step> {
    alloc::vec![
        Step::Element(ElementSpec::inject(c, 1)),
        Step::Element(ElementSpec::inject(d, 1)),
        Step::Element(ElementSpec::beam_splitter(a, c, theta)),
        Step::Element(ElementSpec::beam_splitter(b, d, theta)),
        Step::Detect(DetectionPattern::single(c, 1).with(d, 1)),
    ]
}

pub fn theta_block(
    state: &FockState,
    mode_a: &str,
    mode_b: &str,
    theta: f64,
) -> Result<BlockResult> {
    theta_block_with(state, mode_a, mode_b, theta, &Config::default())
}

/// Runs one Θ block; ancillas get fresh labels derived from the mode names.
pub fn theta_block_with(
    state: &FockState,
    mode_a: &str,
    mode_b: &str,
    theta: f64,
    cfg: &Config,
) -> Result<BlockResult> {
    let c = fresh_label(state.registry(), &format!("{mode_a}.anc"));
    let d = fresh_label(state.registry(), &format!("{mode_b}.anc"));
    let mut circuit = Circuit::new();
    circuit.steps = block_steps(mode_a, mode_b, &c, &d, theta);
    let out = run(&circuit, state, cfg, false)?;
    Ok(BlockResult {
        state: out.state,
        probability: out.probability,
        theta,
    })
}

/// Which angle rule to use when deleting an occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleRule {
    /// `tan θ = 1/√i`: zeroes `cos²θ - i sin²θ`.
    #[default]
    ZeroFactor,
    /// `tan θ = √i`, as printed in the original derivation. Kept for
    /// comparison runs; it does not delete the target terms for `i ≥ 2`.
    Printed,
}

/// Block angle that deletes occupation `i` (and its complement).
pub fn deletion_angle(i: u32) -> Result<f64> {
    deletion_angle_with(i, AngleRule::ZeroFactor)
}

pub fn deletion_angle_with(i: u32, rule: AngleRule) -> Result<f64> {
    if i == 0 {
        return Err(Error::InvalidDeletionTarget);
    }
    let root = libm::sqrt(f64::from(i));
    Ok(match rule {
        AngleRule::ZeroFactor => libm::atan(1.0 / root),
        AngleRule::Printed => libm::atan(root),
    })
}

/// Amplitudes of `|2N-2m, 2m⟩`, `m = 0..=N`, after a balanced splitter on `|N, N⟩`.
pub fn balanced_splitter_coefficients(n: u32) -> Vec<f64> {
    let ln2 = core::f64::consts::LN_2;
    (0..=n)
        .map(|m| {
            let ln = 0.5 * (ln_factorial(2 * m) + ln_factorial(2 * n - 2 * m))
                - ln_factorial(m)
                - ln_factorial(n - m)
                - f64::from(n) * ln2;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * libm::exp(ln)
        })
        .collect()
}

/// Layout of a NOON generator for `P` photons.
#[derive(Debug, Clone, PartialEq)]
pub struct NoonPlan {
    pub total_photons: u32,
    /// Photons fed into the two ports of the first balanced splitter.
    pub input_occupations: (u32, u32),
    /// Occupation removed by each block (its complement goes too).
    pub deleted_occupations: Vec<u32>,
    pub block_angles: Vec<f64>,
    pub rule: AngleRule,
}

impl NoonPlan {
    /// `P = 2N`: input `|N, N⟩` and blocks deleting `2i`, `i = 1..=M` with
    /// `M = N/2` (even `N`) or `(N-1)/2` (odd `N`). `P = 2N+1`: input
    /// `|P, 0⟩` and blocks deleting `i = 1..=N`.
    pub fn new(total_photons: u32, rule: AngleRule) -> Result<Self> {
        if total_photons < 2 {
            return Err(Error::TooFewPhotons {
                min: 2,
                got: total_photons,
            });
        }
        let p = total_photons;
        let (input, deleted): ((u32, u32), Vec<u32>) = if p.is_multiple_of(2) {
            let n = p / 2;
            let m = if n.is_multiple_of(2) {
                n / 2
            } else {
                (n - 1) / 2
            };
            ((n, n), (1..=m).map(|i| 2 * i).collect())
        } else {
            let n = (p - 1) / 2;
            ((p, 0), (1..=n).collect())
        };
        let block_angles = deleted
            .iter()
            .map(|&k| deletion_angle_with(k, rule))
            .collect::<Result<Vec<_>>>()?;
        Ok(NoonPlan {
            total_photons: p,
            input_occupations: input,
            deleted_occupations: deleted,
            block_angles,
            rule,
        })
    }

    pub fn blocks(&self) -> usize {
        self.block_angles.len()
    }

    /// Input state on modes `a`, `b` and the circuit realizing the plan.
    /// Block `k` (1-based) uses ancillas `c{k}` and `d{k}`.
    pub fn circuit(&self) -> Result<(FockState, Circuit)> {
        let reg = ModeRegistry::scalar(&["a", "b"])?;
        let (na, nb) = self.input_occupations;
        let input = FockState::basis_state(reg, [na, nb].into())?;
        let mut circuit = Circuit::new();
        circuit.element(ElementSpec::beam_splitter("a", "b", FRAC_PI_4));
        for (k, theta) in self.block_angles.iter().enumerate() {
            let c = format!("c{}", k + 1);
            let d = format!("d{}", k + 1);
            circuit.steps.extend(block_steps("a", "b", &c, &d, *theta));
        }
        Ok((input, circuit))
    }
}

/// Output of the NOON generator.
#[derive(Debug, Clone, PartialEq)]
pub struct NoonRun {
    pub state: FockState,
    pub probability: f64,
    pub plan: NoonPlan,
}

impl NoonRun {
    /// Phase of the `|0,P⟩` amplitude relative to `|P,0⟩`, in radians.
    pub fn relative_phase(&self) -> f64 {
        let p = self.plan.total_photons;
        let first = self.state.amplitude_of(&[p, 0]);
        let second = self.state.amplitude_of(&[0, p]);
        (second * first.conj()).arg()
    }
}

pub fn noon_circuit(total_photons: u32) -> Result<NoonRun> {
    noon_circuit_with(total_photons, AngleRule::ZeroFactor, &Config::default())
}

pub fn noon_circuit_with(total_photons: u32, rule: AngleRule, cfg: &Config) -> Result<NoonRun> {
    let plan = NoonPlan::new(total_photons, rule)?;
    let (input, circuit) = plan.circuit()?;
    let out = run(&circuit, &input, cfg, false)?;
    Ok(NoonRun {
        state: out.state,
        probability: out.probability,
        plan,
    })
}

/// Heralding probability of the NOON generator from its closed forms.
///
/// `P = 2N`, odd `N`:
/// `(2N)! [(2N-2)!!]² [(N-1)!!]^{2N} / (2^{2N-1} (N!)⁴ (N!!)^{2N})`;
/// even `N`:
/// `(2N)! [(2N-2)!!]² [N!!]^{2N} / (2^{2N-1} ((N-1)!)² ((N+1)!)² ((N+1)!!)^{2N})`;
/// `P = 2N+1`: `[(2N)!]² / (4^N (N+1)^{2N+1} [N!(N+1)!]²)`.
pub fn noon_probability_closed_form(total_photons: u32) -> Result<f64> {
    let p = total_photons;
    if p < 2 {
        return Err(Error::TooFewPhotons { min: 2, got: p });
    }
    if p == 2 {
        return Ok(1.0);
    }
    let lf = |k: u32| ln_factorial(k);
    let ldf = |k: i64| ln_double_factorial(k);
    let ln2 = core::f64::consts::LN_2;
    let ln = if p.is_multiple_of(2) {
        let n = p / 2;
        let ni = i64::from(n);
        let nf = f64::from(n);
        let common = lf(2 * n) + 2.0 * ldf(2 * ni - 2) - (2.0 * nf - 1.0) * ln2;
        if n % 2 == 1 {
            common + 2.0 * nf * ldf(ni - 1) - 4.0 * lf(n) - 2.0 * nf * ldf(ni)
        } else {
            common + 2.0 * nf * ldf(ni) - 2.0 * lf(n - 1) - 2.0 * lf(n + 1) - 2.0 * nf * ldf(ni + 1)
        }
    } else {
        let n = (p - 1) / 2;
        let nf = f64::from(n);
        2.0 * lf(2 * n)
            - nf * libm::log(4.0)
            - (2.0 * nf + 1.0) * libm::log(nf + 1.0)
            - 2.0 * (lf(n) + lf(n + 1))
    };
    Ok(libm::exp(ln))
}

/// Rotator angle in the first stage of the entangler: `cos θ = √(1/3)`.
pub fn entangler_rotation() -> f64 {
    libm::acos(libm::sqrt(1.0 / 3.0))
}

/// Named stages of the polarization entangler.
pub fn entangler_segments() -> Vec<(&'static str, Vec<Step>)> {
    let bs = |a: &str, b: &str| Step::Element(ElementSpec::beam_splitter(a, b, FRAC_PI_4));
    let rot = |s: &str, t: f64| Step::Element(ElementSpec::rotator(s, t));
    let pbs = |i1: &str, i2: Option<&str>, o1: Option<&str>, o2: Option<&str>| {
        Step::Element(ElementSpec::pbs(i1, i2, o1, o2))
    };
    let theta1 = entangler_rotation();
    alloc::vec![
        ("psi1", alloc::vec![bs("1", "2")]),
        ("psi2", alloc::vec![rot("1", theta1), rot("2", theta1)]),
        (
            "psi3",
            alloc::vec![
                pbs("1", None, Some("3"), Some("4")),
                pbs("2", None, Some("5"), Some("6")),
            ],
        ),
        (
            "psi4",
            alloc::vec![
                Step::Declare(ModeDecl::polarized("s4")),
                Step::Declare(ModeDecl::polarized("s6")),
                Step::Element(ElementSpec::inject("s4V", 1)),
                Step::Element(ElementSpec::inject("s6V", 1)),
                bs("4", "s4"),
                bs("6", "s6"),
                Step::Detect(DetectionPattern::single("s4", 1).with("s6", 1)),
            ],
        ),
        (
            "psi5",
            alloc::vec![
                pbs("3", Some("4"), Some("7"), None),
                pbs("5", Some("6"), Some("8"), None),
            ],
        ),
        (
            "psi6",
            alloc::vec![rot("7", FRAC_PI_4), rot("8", FRAC_PI_4)],
        ),
        (
            "psi7",
            alloc::vec![pbs("7", Some("8"), Some("o1"), Some("o2"))]
        ),
    ]
}

/// `|H⟩₁|H⟩₂`.
pub fn entangler_input() -> Result<FockState> {
    FockState::basis_state(ModeRegistry::polarized(&["1", "2"])?, [1, 0, 1, 0].into())
}

/// Input and full circuit of the entangler.
pub fn entangler_circuit() -> Result<(FockState, Circuit)> {
    let mut circuit = Circuit::new();
    for (_, steps) in entangler_segments() {
        circuit.steps.extend(steps);
    }
    Ok((entangler_input()?, circuit))
}

/// `(|H⟩|V⟩ - |V⟩|H⟩)/√2` over output modes `o1`, `o2`.
pub fn singlet() -> Result<FockState> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    FockState::superposition(
        ModeRegistry::polarized(&["o1", "o2"])?,
        [
            ([1, 0, 0, 1].into(), Complex64::new(h, 0.0)),
            ([0, 1, 1, 0].into(), Complex64::new(-h, 0.0)),
        ],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglerRun {
    pub state: FockState,
    pub probability: f64,
    /// `psi1` ... `psi7`.
    pub trace: Vec<(String, FockState)>,
}

pub fn two_photon_entangler() -> Result<EntanglerRun> {
    two_photon_entangler_with(&Config::default())
}

pub fn two_photon_entangler_with(cfg: &Config) -> Result<EntanglerRun> {
    let mut state = entangler_input()?;
    let mut probability = 1.0;
    let mut trace = Vec::new();
    for (name, steps) in entangler_segments() {
        let out = run(&Circuit { steps }, &state, cfg, false)?;
        probability *= out.probability;
        state = out.state;
        trace.push((String::from(name), state.clone()));
    }
    Ok(EntanglerRun {
        state,
        probability,
        trace,
    })
}
