//! Running parsed circuits.

use noonlab_core::{run, Config, Error as CoreError, FockState};

use crate::dsl::CircuitIr;

#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub line: usize,
    /// Pretty-printed statement.
    pub label: String,
    pub state: FockState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Normalized heralded state; empty when the outcome cannot occur.
    pub state: FockState,
    /// Product of the heralding probabilities.
    pub probability: f64,
    pub stages: Option<Vec<StageResult>>,
    pub config: Config,
}

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error("input state: {0}")]
    Input(CoreError),
    #[error("line {line}: {source}")]
    Step { line: usize, source: CoreError },
}

pub fn execute(ir: &CircuitIr, cfg: &Config, trace: bool) -> Result<RunResult, RuntimeError> {
    let input = ir.input_state().map_err(RuntimeError::Input)?;
    let out = run(&ir.circuit(), &input, cfg, trace).map_err(|e| match e {
        CoreError::AtStep { index, source } => RuntimeError::Step {
            line: ir.steps[index].line,
            source: *source,
        },
        other => RuntimeError::Input(other),
    })?;
    let stages = trace.then(|| {
        out.stages
            .into_iter()
            .zip(&ir.steps)
            .map(|(stage, step)| StageResult {
                line: step.line,
                label: step.value.to_string(),
                state: stage.state,
            })
            .collect()
    });
    Ok(RunResult {
        state: out.state,
        probability: out.probability,
        stages,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn unitary_circuits_have_unit_probability() {
        let ir = parse("mode a\nmode b\ninput a 1\ninput b 1\nbs a b theta=pi/4").unwrap();
        let r = execute(&ir, &Config::default(), false).unwrap();
        assert_eq!(r.probability, 1.0);
        assert_eq!(r.state.len(), 2);
        assert!(r.stages.is_none());
    }

    #[test]
    fn runtime_errors_name_the_line() {
        let ir = parse("mode a pol\ninput aV 1\npbs a - -> b -").unwrap();
        let err = execute(&ir, &Config::default(), false).unwrap_err();
        assert!(err.to_string().starts_with("line 3: "), "{err}");
    }

    #[test]
    fn trace_labels_are_source_statements() {
        let ir = parse("mode a\nmode c\ninput a 1\ninject c 1\nbs a c theta=pi/4\ndetect c = 1")
            .unwrap();
        let r = execute(&ir, &Config::default(), true).unwrap();
        let stages = r.stages.unwrap();
        assert_eq!(stages.len(), 3);
        assert_eq!(stages[1].label, "bs a c theta=pi/4");
        assert_eq!(stages[2].line, 6);
        assert_eq!(r.probability, 0.0);
    }
}
