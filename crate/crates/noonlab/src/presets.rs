//! Generated circuit files for the shipped schemes.

use std::fmt::Write;

use noonlab_core::schemes::{AngleRule, NoonPlan};

use crate::dsl::Expr;

fn block(out: &mut String, a: &str, b: &str, c: &str, d: &str, theta: &Expr) {
    let _ = writeln!(out, "mode {c}\nmode {d}\ninject {c} 1\ninject {d} 1");
    let _ = writeln!(out, "bs {a} {c} theta={theta}\nbs {b} {d} theta={theta}");
    let _ = writeln!(out, "detect {c} = 1\ndetect {d} = 1");
}

/// Two-photon polarization entangler heralded by two ancilla detections.
pub fn fig1() -> String {
    let q = Expr::quarter_pi();
    let r = Expr::acos_sqrt_ratio(1, 3);
    format!(
        "# Two-photon polarization entangler.\n\
         # Input |H>1 |H>2; heralds the singlet on o1, o2 with probability 1/18.\n\
         mode 1 pol\n\
         mode 2 pol\n\
         input 1H 1\n\
         input 2H 1\n\
         bs 1 2 theta={q}\n\
         rot 1 theta={r}\n\
         rot 2 theta={r}\n\
         pbs 1 - -> 3 4\n\
         pbs 2 - -> 5 6\n\
         # ancilla photons, one per arm\n\
         mode s4 pol\n\
         mode s6 pol\n\
         inject s4V 1\n\
         inject s6V 1\n\
         bs 4 s4 theta={q}\n\
         bs 6 s6 theta={q}\n\
         detect s4 = 1\n\
         detect s6 = 1\n\
         pbs 3 4 -> 7 -\n\
         pbs 5 6 -> 8 -\n\
         rot 7 theta={q}\n\
         rot 8 theta={q}\n\
         pbs 7 8 -> o1 o2\n"
    )
}

/// One deletion block acting on the spread of `|N, 0⟩` over two modes.
pub fn fig2(photons: u32, theta: &Expr) -> String {
    let mut out = format!(
        "# Deletion block on a balanced superposition of {photons} photons.\n\
         mode a\nmode b\ninput a {photons}\nbs a b theta={}\n",
        Expr::quarter_pi()
    );
    block(&mut out, "a", "b", "c", "d", theta);
    out
}

/// NOON generator for `P` photons.
pub fn noon(total_photons: u32, rule: AngleRule) -> noonlab_core::Result<String> {
    let plan = NoonPlan::new(total_photons, rule)?;
    let (na, nb) = plan.input_occupations;
    let mut out =
        format!("# NOON state with {total_photons} photons.\nmode a\nmode b\ninput a {na}\n");
    if nb > 0 {
        let _ = writeln!(out, "input b {nb}");
    }
    let _ = writeln!(out, "bs a b theta={}", Expr::quarter_pi());
    for (k, &i) in plan.deleted_occupations.iter().enumerate() {
        let theta = match rule {
            AngleRule::ZeroFactor => Expr::atan_inv_sqrt(i),
            AngleRule::Printed => Expr::atan_sqrt(i),
        };
        let _ = writeln!(
            out,
            "# delete |{i},{}> and |{},{i}>",
            total_photons - i,
            total_photons - i
        );
        let (c, d) = (format!("c{}", k + 1), format!("d{}", k + 1));
        block(&mut out, "a", "b", &c, &d, &theta);
    }
    Ok(out)
}

/// File name and text of every shipped preset.
pub fn all(max_photons: u32) -> Vec<(String, String)> {
    let mut out = vec![
        ("fig1.circ".to_string(), fig1()),
        ("fig2.circ".to_string(), fig2(2, &Expr::quarter_pi())),
    ];
    for p in 2..=max_photons {
        let text = noon(p, AngleRule::ZeroFactor).expect("P >= 2");
        out.push((format!("noon{p}.circ"), text));
    }
    out
}
