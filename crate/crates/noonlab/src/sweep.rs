//! Angle sweeps over named circuit parameters.

use std::collections::BTreeSet;

use noonlab_core::{run, Complex64, Config, FockState, Occupation};
use rayon::prelude::*;

use crate::dsl::CircuitIr;
use crate::exec::{execute, RuntimeError};
use crate::output::table_csv;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Parameters set together to each angle.
    pub params: Vec<String>,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Terms to tabulate; `None` takes every term seen in any row.
    pub terms: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub probability: f64,
    /// Fidelity with the output at the circuit's own angles; 0 when the
    /// outcome cannot occur.
    pub fidelity: f64,
    pub amplitudes: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub modes: Vec<String>,
    pub terms: Vec<Occupation>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("unknown parameter '{name}' (available: {available})")]
    UnknownParameter { name: String, available: String },
    #[error("a sweep needs at least one point")]
    NoPoints,
    #[error("term {0:?} does not match the output modes")]
    BadTerm(Vec<u32>),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

pub fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn fidelity(a: &FockState, b: &FockState) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.fidelity(b).unwrap_or(0.0)
}

pub fn sweep(ir: &CircuitIr, spec: &SweepSpec, cfg: &Config) -> Result<SweepTable, SweepError> {
    if spec.points == 0 {
        return Err(SweepError::NoPoints);
    }
    let params = ir.parameters();
    let steps: Vec<usize> = spec
        .params
        .iter()
        .map(|name| {
            params
                .iter()
                .find(|p| &p.name == name)
                .map(|p| p.step)
                .ok_or_else(|| SweepError::UnknownParameter {
                    name: name.clone(),
                    available: params
                        .iter()
                        .map(|p| p.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", "),
                })
        })
        .collect::<Result<_, _>>()?;

    let nominal = execute(ir, cfg, false)?;
    let input = ir.input_state().map_err(RuntimeError::Input)?;
    let base = ir.circuit();
    let outputs: Vec<(f64, FockState, f64)> = grid(spec.from, spec.to, spec.points)
        .into_par_iter()
        .map(|theta| {
            let mut circuit = base.clone();
            for &s in &steps {
                if let noonlab_core::Step::Element(e) = &mut circuit.steps[s] {
                    e.set_theta(theta);
                }
            }
            run(&circuit, &input, cfg, false)
                .map(|out| (theta, out.state, out.probability))
                .map_err(|e| match e {
                    noonlab_core::Error::AtStep { index, source } => RuntimeError::Step {
                        line: ir.steps[index].line,
                        source: *source,
                    },
                    other => RuntimeError::Input(other),
                })
        })
        .collect::<Result<_, _>>()?;

    let width = nominal.state.registry().len();
    let terms: Vec<Occupation> = match &spec.terms {
        Some(list) => list
            .iter()
            .map(|t| {
                if t.len() == width {
                    Ok(Occupation::new(t.clone()))
                } else {
                    Err(SweepError::BadTerm(t.clone()))
                }
            })
            .collect::<Result<_, _>>()?,
        None => outputs
            .iter()
            .flat_map(|(_, s, _)| s.terms().map(|(o, _)| o.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let rows = outputs
        .iter()
        .map(|(theta, state, probability)| SweepRow {
            theta: *theta,
            probability: *probability,
            fidelity: fidelity(state, &nominal.state),
            amplitudes: terms.iter().map(|t| state.amplitude(t)).collect(),
        })
        .collect();
    Ok(SweepTable {
        modes: nominal
            .state
            .registry()
            .labels()
            .map(String::from)
            .collect(),
        terms,
        rows,
    })
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut header = vec!["theta".to_string(), "probability".into(), "fidelity".into()];
        for t in &self.terms {
            let occ: Vec<String> = t.counts().iter().map(u32::to_string).collect();
            let occ = occ.join(" ");
            header.push(format!("re[{occ}]"));
            header.push(format!("im[{occ}]"));
        }
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![
                    r.theta.to_string(),
                    r.probability.to_string(),
                    r.fidelity.to_string(),
                ];
                for a in &r.amplitudes {
                    row.push(a.re.to_string());
                    row.push(a.im.to_string());
                }
                row
            })
            .collect();
        format!(
            "# modes={}\n{}",
            self.modes.join(" "),
            table_csv(&header, &rows)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, Expr};
    use crate::presets;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid(0.0, 1.0, 1), vec![0.0]);
        assert_eq!(grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn block_sweep_has_zero_at_quarter_pi() {
        let ir = parse(&presets::fig2(2, &Expr::quarter_pi())).unwrap();
        let spec = SweepSpec {
            params: vec!["bs2".into(), "bs3".into()],
            from: 0.0,
            to: FRAC_PI_2,
            points: 9,
            terms: Some(vec![vec![2, 0], vec![1, 1], vec![0, 2]]),
        };
        let table = sweep(&ir, &spec, &Config::default()).unwrap();
        assert_eq!(table.rows.len(), 9);
        let mid = &table.rows[4];
        assert!((mid.theta - FRAC_PI_4).abs() < 1e-15);
        assert!(mid.amplitudes[1].norm() < 1e-12);
        assert!(mid.probability > 0.0);
        assert!((mid.fidelity - 1.0).abs() < 1e-12);
        assert!(table.rows[2].amplitudes[1].norm() > 1e-3);
        assert!(table
            .to_csv()
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("theta,probability,fidelity,re[2 0]"));
    }

    #[test]
    fn unknown_parameter_is_reported() {
        let ir = parse(&presets::fig1()).unwrap();
        let spec = SweepSpec {
            params: vec!["bs9".into()],
            from: 0.0,
            to: 1.0,
            points: 1,
            terms: None,
        };
        let err = sweep(&ir, &spec, &Config::default()).unwrap_err();
        assert!(matches!(err, SweepError::UnknownParameter { .. }));
    }
}
