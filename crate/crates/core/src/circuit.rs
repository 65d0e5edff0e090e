//! Ordered circuits and the sparse executor.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::detection::{postselect, DetectionPattern};
use crate::elements::{Config, ElementSpec};
use crate::error::Result;
use crate::registry::ModeDecl;
use crate::state::FockState;

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// Registers vacuum modes.
    Declare(ModeDecl),
    Element(ElementSpec),
    Detect(DetectionPattern),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Declare(d) if d.polarized => write!(f, "mode {} pol", d.label),
            Step::Declare(d) => write!(f, "mode {}", d.label),
            Step::Element(e) => e.fmt(f),
            Step::Detect(p) => write!(f, "detect {p}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    pub steps: Vec<Step>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: Step) -> &mut Self {
        self.steps.push(step);
        self
    }

    pub fn element(&mut self, element: ElementSpec) -> &mut Self {
        self.push(Step::Element(element))
    }

    pub fn is_unitary(&self) -> bool {
        !self.steps.iter().any(|s| matches!(s, Step::Detect(_)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub label: String,
    pub state: FockState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub state: FockState,
    /// Product of the heralding probabilities of every detection.
    pub probability: f64,
    pub stages: Vec<Stage>,
}

/// Runs `circuit` on `input`. Errors carry the failing step index.
pub fn run(circuit: &Circuit, input: &FockState, cfg: &Config, trace: bool) -> Result<Execution> {
    let mut state = input.prune(cfg.prune);
    let mut probability = 1.0;
    let mut stages = Vec::new();
    for (index, step) in circuit.steps.iter().enumerate() {
        state = match step {
            Step::Declare(decl) => state.extend_vacuum(decl),
            Step::Element(e) => e.apply(&state, cfg),
            Step::Detect(pattern) => postselect(&state, pattern).map(|h| {
                probability *= h.probability;
                h.state.prune(cfg.prune)
            }),
        }
        .map_err(|e| e.at_step(index))?;
        if trace {
            stages.push(Stage {
                label: step.to_string(),
                state: state.clone(),
            });
        }
    }
    Ok(Execution {
        state,
        probability,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::registry::ModeRegistry;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn unitary_circuit_has_unit_probability() {
        let input =
            FockState::basis_state(ModeRegistry::scalar(&["a", "b"]).unwrap(), [1, 1].into())
                .unwrap();
        let mut c = Circuit::new();
        c.element(ElementSpec::beam_splitter("a", "b", FRAC_PI_4));
        let out = run(&c, &input, &Config::default(), true).unwrap();
        assert_eq!(out.probability, 1.0);
        assert_eq!(out.stages.len(), 1);
        assert_eq!(out.stages[0].label, "bs a b theta=0.7853981633974483");
    }

    #[test]
    fn smallest_heralding_circuit() {
        let input =
            FockState::basis_state(ModeRegistry::scalar(&["a"]).unwrap(), [1].into()).unwrap();
        let mut c = Circuit::new();
        c.push(Step::Declare(ModeDecl::scalar("c")))
            .element(ElementSpec::inject("c", 1))
            .element(ElementSpec::beam_splitter("a", "c", FRAC_PI_4))
            .push(Step::Detect(DetectionPattern::single("c", 1)));
        let out = run(&c, &input, &Config::default(), false).unwrap();
        assert_eq!(out.probability, 0.0);
        assert!(out.state.is_empty());
    }

    #[test]
    fn errors_name_the_step() {
        let input = FockState::vacuum(ModeRegistry::scalar(&["a"]).unwrap());
        let mut c = Circuit::new();
        c.element(ElementSpec::rotator("a", 0.1));
        let err = run(&c, &input, &Config::default(), false).unwrap_err();
        assert!(matches!(err, Error::AtStep { index: 0, .. }));
    }
}
