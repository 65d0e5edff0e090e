//! Cross-checks of the sparse engine against the dense oracle and the
//! closed forms.

use std::fmt;

use noonlab_core::Config;

use crate::checks::{self, RandomSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub random: RandomSpec,
    /// Sparse-vs-dense tolerance.
    pub tol: f64,
    pub config: Config,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            random: RandomSpec {
                seed: 42,
                circuits: 200,
                max_photons: 4,
                max_modes: 5,
            },
            tol: 1e-9,
            config: Config::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub header: String,
    pub checks: Vec<CheckLine>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header)?;
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {}: {}", c.name, c.detail)?;
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "summary: {ok}/{} checks passed", self.checks.len())
    }
}

fn line(name: &'static str, passed: bool, detail: String) -> CheckLine {
    CheckLine {
        name,
        passed,
        detail,
    }
}

fn failed(name: &'static str, err: noonlab_core::Error) -> CheckLine {
    line(name, false, format!("error: {err}"))
}

pub fn audit(opts: &AuditOptions) -> AuditReport {
    let cfg = &opts.config;
    let r = &opts.random;
    let mut checks = Vec::new();

    let outcomes = checks::random_suite(r, cfg);
    let agree = outcomes
        .iter()
        .filter(|o| o.error.is_none() && o.delta < opts.tol)
        .count();
    let max_delta = outcomes.iter().map(|o| o.delta).fold(0.0, f64::max);
    let mut detail = format!(
        "{agree}/{} dense-sparse agreements, max |Δ| = {max_delta:.3e} {} {:e}",
        outcomes.len(),
        if max_delta < opts.tol { "<" } else { ">=" },
        opts.tol
    );
    if let Some(bad) = outcomes
        .iter()
        .find(|o| o.error.is_some() || o.delta >= opts.tol)
    {
        detail.push_str(&format!(
            " (first mismatch: circuit {}{})",
            bad.index,
            bad.error
                .as_deref()
                .map(|e| format!(", {e}"))
                .unwrap_or_default()
        ));
    }
    checks.push(line("oracle", agree == outcomes.len(), detail));

    let defect = outcomes
        .iter()
        .map(|o| o.unitarity_defect)
        .fold(0.0, f64::max);
    let matrices: usize = outcomes.iter().map(|o| o.matrices).sum();
    checks.push(line(
        "unitarity",
        defect < 1e-10,
        format!("{matrices} element matrices, max defect {defect:.3e} < 1e-10"),
    ));

    checks.push(match checks::hom(cfg) {
        Ok((cross, bunched)) => line(
            "hom",
            cross < 1e-12 && (bunched - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12,
            format!("|<1,1|U|1,1>| = {cross:.3e}, |<2,0|U|1,1>| = {bunched:.12}"),
        ),
        Err(e) => failed("hom", e),
    });

    checks.push(match checks::entangler(cfg) {
        Ok(e) => line(
            "entangler",
            e.fidelity >= 1.0 - 1e-10 && (e.probability - 1.0 / 18.0).abs() < 1e-12,
            format!(
                "fidelity {:.15}, probability {:.15} (1/18 = {:.15})",
                e.fidelity,
                e.probability,
                1.0 / 18.0
            ),
        ),
        Err(e) => failed("entangler", e),
    });

    checks.push(match checks::balanced_splitter(5) {
        Ok(s) => line(
            "balanced splitter",
            s.max_deviation < 1e-10 && s.max_odd < 1e-14,
            format!(
                "N=1..5 max deviation {:.3e}, max odd amplitude {:.3e}",
                s.max_deviation, s.max_odd
            ),
        ),
        Err(e) => failed("balanced splitter", e),
    });

    checks.push(match checks::block_law(8, 25, cfg) {
        Ok(d) => line(
            "block law",
            d < 1e-10,
            format!("0<=n<=N<=8, 25 angles, max deviation {d:.3e}"),
        ),
        Err(e) => failed("block law", e),
    });

    let noon: Result<Vec<_>, _> = (3..=8).map(|p| checks::noon(p, cfg)).collect();
    checks.push(match noon {
        Ok(list) => {
            let diff = list
                .iter()
                .map(|n| (n.simulated - n.closed_form).abs())
                .fold(0.0, f64::max);
            let modulus = list.iter().map(|n| n.modulus_deviation).fold(0.0, f64::max);
            let support = list.iter().all(|n| n.support_ok);
            let values: Vec<String> = list
                .iter()
                .map(|n| format!("P={}:{:.6e}", n.photons, n.simulated))
                .collect();
            line(
                "noon",
                diff < 1e-9 && modulus < 1e-10 && support,
                format!(
                    "P=3..8 max |sim-closed| {diff:.3e}, modulus deviation {modulus:.3e}, support {}; {}",
                    if support { "ok" } else { "WRONG" },
                    values.join(" ")
                ),
            )
        }
        Err(e) => failed("noon", e),
    });

    match checks::deletion(8, cfg) {
        Ok(d) => {
            checks.push(line(
                "deletion angle atan(1/sqrt(i))",
                d.corrected_max < 1e-12,
                format!("max targeted amplitude {:.3e} < 1e-12", d.corrected_max),
            ));
            checks.push(line(
                "printed angle atan(sqrt(i))",
                d.printed_min > 1e-3,
                format!(
                    "min targeted amplitude for i>=2 is {:.3e} > 1e-3; the printed rule does not delete",
                    d.printed_min
                ),
            ));
        }
        Err(e) => checks.push(failed("deletion angle", e)),
    }

    AuditReport {
        header: format!(
            "noonlab audit: seed={} circuits={} photons<={} modes<={} tol={:e}",
            r.seed, r.circuits, r.max_photons, r.max_modes, opts.tol
        ),
        checks,
    }
}
