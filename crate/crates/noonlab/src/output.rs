//! JSON and CSV renderings. JSON objects are key-sorted.

use noonlab_core::{Config, FockState, ReflectionPhase};
use serde_json::{json, Value};

use crate::exec::RunResult;

pub fn terms_json(state: &FockState) -> Value {
    state
        .terms()
        .map(|(occ, amp)| json!({ "occ": occ.counts(), "re": amp.re, "im": amp.im }))
        .collect()
}

pub fn state_json(state: &FockState) -> Value {
    json!({
        "modes": state.registry().labels().collect::<Vec<_>>(),
        "terms": terms_json(state),
    })
}

pub fn conventions_json(cfg: &Config, tol: f64) -> Value {
    let phase = match cfg.reflection_phase {
        ReflectionPhase::One => "1",
        ReflectionPhase::I => "i",
    };
    json!({
        "beam_splitter": "a -> cos(theta) a + sin(theta) c, c -> cos(theta) c - sin(theta) a",
        "rotator": "H -> cos(theta) H + sin(theta) V, V -> cos(theta) V - sin(theta) H",
        "pbs": "in1H -> out1H, in1V -> out2V, in2H -> out2H, in2V -> out1V",
        "pbs_reflection_phase": phase,
        "detection": "polarization-insensitive photon counting",
        "term_order": "lexicographic occupation",
        "global_phase": "as computed; comparisons rotate the first nonzero amplitude to positive real",
        "prune": cfg.prune,
        "photon_cap": cfg.photon_cap,
        "tol": tol,
    })
}

pub fn run_json(result: &RunResult, tol: f64) -> Value {
    let mut v = json!({
        "probability": result.probability,
        "modes": result.state.registry().labels().collect::<Vec<_>>(),
        "terms": terms_json(&result.state),
        "conventions": conventions_json(&result.config, tol),
    });
    if let Some(stages) = &result.stages {
        v["stages"] = stages
            .iter()
            .map(|s| {
                json!({
                    "line": s.line,
                    "label": s.label,
                    "modes": s.state.registry().labels().collect::<Vec<_>>(),
                    "terms": terms_json(&s.state),
                })
            })
            .collect();
    }
    v
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("CSV output is UTF-8")
}

/// One row per term: occupations, then `re`, `im`. A leading comment line
/// carries the probability.
pub fn state_csv(state: &FockState, probability: f64) -> String {
    let mut w = csv_writer();
    let mut header: Vec<String> = state.registry().labels().map(String::from).collect();
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header).expect("in-memory write");
    for (occ, amp) in state.terms() {
        let mut row: Vec<String> = occ.counts().iter().map(u32::to_string).collect();
        row.push(amp.re.to_string());
        row.push(amp.im.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    format!("# probability={probability}\n{}", finish(w))
}

pub fn run_csv(result: &RunResult) -> String {
    let mut out = state_csv(&result.state, result.probability);
    for s in result.stages.iter().flatten() {
        out.push_str(&format!("# stage line {}: {}\n", s.line, s.label));
        let body = state_csv(&s.state, f64::NAN);
        out.push_str(body.split_once('\n').map_or("", |(_, rest)| rest));
    }
    out
}

/// Generic table writer used by sweeps.
pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv_writer();
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::exec::execute;

    fn result() -> RunResult {
        let ir = parse("mode a\nmode b\ninput a 1\ninput b 1\nbs a b theta=pi/4").unwrap();
        execute(&ir, &Config::default(), true).unwrap()
    }

    #[test]
    fn json_keys_are_sorted() {
        let text = to_json_string(&run_json(&result(), 1e-10));
        let keys: Vec<usize> = [
            "\"conventions\"",
            "\"modes\"",
            "\"probability\"",
            "\"stages\"",
            "\"terms\"",
        ]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
    }

    #[test]
    fn csv_has_one_row_per_term() {
        let text = state_csv(&result().state, 1.0);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# probability=1");
        assert_eq!(lines[1], "a,b,re,im");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,2,"));
    }
}
