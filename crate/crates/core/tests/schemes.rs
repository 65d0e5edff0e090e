use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use noonlab_core::oracle::{run_dense, DEFAULT_SECTOR_CAP};
use noonlab_core::schemes::{
    balanced_splitter_coefficients, block_amplitude_factor, deletion_angle, deletion_angle_with,
    entangler_circuit, entangler_input, entangler_segments, noon_circuit, noon_circuit_with,
    noon_probability_closed_form, singlet, theta_block, two_photon_entangler, AngleRule, NoonPlan,
};
use noonlab_core::{
    apply_beam_splitter, run, Circuit, Complex64, Config, ElementSpec, FockState, ModeRegistry,
    Occupation, Step,
};

fn ab() -> ModeRegistry {
    ModeRegistry::scalar(&["a", "b"]).unwrap()
}

fn real_state(reg: ModeRegistry, terms: &[(&[u32], f64)]) -> FockState {
    FockState::superposition(
        reg,
        terms
            .iter()
            .map(|(o, a)| (Occupation::new(o.to_vec()), Complex64::new(*a, 0.0))),
    )
    .unwrap()
}

/// Generic input `Σ C_n |n, N-n⟩` with every coefficient nonzero.
fn generic_input(total: u32) -> FockState {
    let terms: Vec<(Vec<u32>, f64)> = (0..=total)
        .map(|n| {
            let sign = if n % 3 == 1 { -1.0 } else { 1.0 };
            (vec![n, total - n], sign * (1.0 + 0.37 * f64::from(n)))
        })
        .collect();
    let s = FockState::superposition(
        ab(),
        terms
            .into_iter()
            .map(|(o, a)| (Occupation::new(o), Complex64::new(a, 0.0))),
    )
    .unwrap();
    s.normalize().unwrap().0
}

#[test]
fn entangler_heralds_the_singlet() {
    let out = two_photon_entangler().unwrap();
    let target = singlet().unwrap();
    assert!(out.state.fidelity(&target).unwrap() >= 1.0 - 1e-10);
    assert!((out.probability - 1.0 / 18.0).abs() < 1e-12);
    assert!(out.state.max_abs_diff_up_to_phase(&target).unwrap() < 1e-10);
    let names: Vec<_> = out.trace.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["psi1", "psi2", "psi3", "psi4", "psi5", "psi6", "psi7"]
    );
}

#[test]
fn entangler_trace_matches_each_stage() {
    let out = two_photon_entangler().unwrap();
    let stage = |name: &str| out.trace.iter().find(|(n, _)| n == name).unwrap().1.clone();
    let h = FRAC_1_SQRT_2;
    let r = 2f64.sqrt() / 3.0;

    let psi1 = real_state(
        ModeRegistry::polarized(&["1", "2"]).unwrap(),
        &[(&[2, 0, 0, 0], h), (&[0, 0, 2, 0], -h)],
    );
    assert!(stage("psi1").max_abs_diff_up_to_phase(&psi1).unwrap() < 1e-10);

    let psi2 = real_state(
        ModeRegistry::polarized(&["1", "2"]).unwrap(),
        &[
            (&[2, 0, 0, 0], 0.5 * r),
            (&[1, 1, 0, 0], r),
            (&[0, 2, 0, 0], r),
            (&[0, 0, 2, 0], -0.5 * r),
            (&[0, 0, 1, 1], -r),
            (&[0, 0, 0, 2], -r),
        ],
    );
    assert!(stage("psi2").max_abs_diff_up_to_phase(&psi2).unwrap() < 1e-10);

    // modes 3H 3V 4H 4V 5H 5V 6H 6V
    let reg = ModeRegistry::polarized(&["3", "4", "5", "6"]).unwrap();
    let psi3 = real_state(
        reg.clone(),
        &[
            (&[2, 0, 0, 0, 0, 0, 0, 0], 0.5 * r),
            (&[1, 0, 0, 1, 0, 0, 0, 0], r),
            (&[0, 0, 0, 2, 0, 0, 0, 0], r),
            (&[0, 0, 0, 0, 2, 0, 0, 0], -0.5 * r),
            (&[0, 0, 0, 0, 1, 0, 0, 1], -r),
            (&[0, 0, 0, 0, 0, 0, 0, 2], -r),
        ],
    );
    assert!(stage("psi3").max_abs_diff_up_to_phase(&psi3).unwrap() < 1e-10);

    let psi4 = real_state(
        reg,
        &[
            (&[2, 0, 0, 0, 0, 0, 0, 0], 0.5),
            (&[0, 0, 0, 2, 0, 0, 0, 0], -0.5),
            (&[0, 0, 0, 0, 2, 0, 0, 0], -0.5),
            (&[0, 0, 0, 0, 0, 0, 0, 2], 0.5),
        ],
    );
    let got = stage("psi4");
    assert!(got.max_abs_diff_up_to_phase(&psi4).unwrap() < 1e-10);
    assert!(got.amplitude_of(&[1, 0, 0, 1, 0, 0, 0, 0]).norm() < 1e-12);
    assert!(got.amplitude_of(&[0, 0, 0, 0, 1, 0, 0, 1]).norm() < 1e-12);

    let psi5 = real_state(
        ModeRegistry::polarized(&["7", "8"]).unwrap(),
        &[
            (&[2, 0, 0, 0], 0.5),
            (&[0, 2, 0, 0], -0.5),
            (&[0, 0, 2, 0], -0.5),
            (&[0, 0, 0, 2], 0.5),
        ],
    );
    assert!(stage("psi5").max_abs_diff_up_to_phase(&psi5).unwrap() < 1e-10);

    let psi6 = real_state(
        ModeRegistry::polarized(&["7", "8"]).unwrap(),
        &[(&[1, 1, 0, 0], h), (&[0, 0, 1, 1], -h)],
    );
    assert!(stage("psi6").max_abs_diff_up_to_phase(&psi6).unwrap() < 1e-10);
}

#[test]
fn singlet_arms_are_maximally_mixed() {
    let out = two_photon_entangler().unwrap();
    // marginal of o1: P(H) and P(V)
    let mut p_h = 0.0;
    let mut p_v = 0.0;
    for (occ, amp) in out.state.terms() {
        let c = occ.counts();
        if c[0] == 1 {
            p_h += amp.norm_sqr();
        }
        if c[1] == 1 {
            p_v += amp.norm_sqr();
        }
    }
    assert!((p_h - 0.5).abs() < 1e-12 && (p_v - 0.5).abs() < 1e-12);
}

#[test]
fn h_polarized_ancillas_do_not_reproduce_the_coincidence_state() {
    let mut steps = Vec::new();
    for (name, seg) in entangler_segments() {
        if name == "psi5" {
            break;
        }
        for step in seg {
            let step = match step {
                Step::Element(ElementSpec::Inject { mode, photons }) => {
                    Step::Element(ElementSpec::inject(&mode.replace('V', "H"), photons))
                }
                s => s,
            };
            steps.push(step);
        }
    }
    let out = run(
        &Circuit { steps },
        &entangler_input().unwrap(),
        &Config::default(),
        false,
    )
    .unwrap();
    // the |H⟩3|V⟩4 cross term survives without interference at BS1
    assert!(out.state.amplitude_of(&[1, 0, 0, 1, 0, 0, 0, 0]).norm() > 1e-3);
}

#[test]
fn entangler_dense_and_sparse_agree() {
    let (input, circuit) = entangler_circuit().unwrap();
    let cfg = Config::default();
    let first_detect = circuit
        .steps
        .iter()
        .position(|s| matches!(s, Step::Detect(_)))
        .unwrap();
    let prefix = Circuit {
        steps: circuit.steps[..first_detect].to_vec(),
    };
    let sparse = run(&prefix, &input, &cfg, false).unwrap();
    let dense = run_dense(&prefix, &input, &cfg, DEFAULT_SECTOR_CAP).unwrap();
    assert!(sparse.state.max_abs_diff(&dense.state).unwrap() < 1e-9);

    let sparse = run(&circuit, &input, &cfg, false).unwrap();
    let dense = run_dense(&circuit, &input, &cfg, DEFAULT_SECTOR_CAP).unwrap();
    assert!(sparse.state.max_abs_diff(&dense.state).unwrap() < 1e-9);
    assert!((dense.probability - 1.0 / 18.0).abs() < 1e-12);
}

#[test]
fn balanced_splitter_matches_simulation() {
    for n in 1..=5u32 {
        let input = FockState::basis_state(ab(), [n, n].into()).unwrap();
        let out = apply_beam_splitter(&input, "a", "b", FRAC_PI_4).unwrap();
        let coeffs = balanced_splitter_coefficients(n);
        let expected = FockState::superposition(
            ab(),
            coeffs.iter().enumerate().map(|(m, c)| {
                let m = m as u32;
                (
                    Occupation::new(vec![2 * n - 2 * m, 2 * m]),
                    Complex64::new(*c, 0.0),
                )
            }),
        )
        .unwrap();
        assert!(
            out.max_abs_diff_up_to_phase(&expected).unwrap() < 1e-10,
            "N={n}"
        );
        for k in (1..2 * n).step_by(2) {
            assert!(out.amplitude_of(&[k, 2 * n - k]).norm() < 1e-14);
        }
    }
}

#[test]
fn block_matches_amplitude_law_on_grid() {
    for total in 0..=8u32 {
        let input = generic_input(total);
        for k in 1..=25 {
            let theta = f64::from(k) * FRAC_PI_2 / 26.0;
            let block = theta_block(&input, "a", "b", theta).unwrap();
            let expected: Vec<f64> = (0..=total)
                .map(|n| {
                    input.amplitude_of(&[n, total - n]).re * block_amplitude_factor(n, total, theta)
                })
                .collect();
            let norm_sqr: f64 = expected.iter().map(|e| e * e).sum();
            assert!(
                (block.probability - norm_sqr).abs() < 1e-12,
                "N={total} k={k}"
            );
            if norm_sqr < 1e-24 {
                assert!(block.state.is_empty());
                continue;
            }
            let norm = norm_sqr.sqrt();
            for n in 0..=total {
                let got = block.state.amplitude_of(&[n, total - n]);
                assert!(
                    (got - Complex64::new(expected[n as usize] / norm, 0.0)).norm() < 1e-10,
                    "N={total} n={n} theta={theta}"
                );
            }
        }
    }
}

#[test]
fn block_examples() {
    let r38 = (3.0f64 / 8.0).sqrt();
    let input = real_state(ab(), &[(&[4, 0], r38), (&[2, 2], -0.5), (&[0, 4], r38)]);
    let theta = (1.0f64 / 2.0f64.sqrt()).atan();
    let out = theta_block(&input, "a", "b", theta).unwrap();
    let noon = real_state(ab(), &[(&[4, 0], FRAC_1_SQRT_2), (&[0, 4], FRAC_1_SQRT_2)]);
    assert!(out.state.max_abs_diff_up_to_phase(&noon).unwrap() < 1e-12);
    assert!((out.probability - 1536.0 / 23328.0).abs() < 1e-12);
    assert_eq!(out.state.len(), 2);

    // unnormalized output of the amplitude law has the same squared norm
    let unnormalized = real_state(
        ab(),
        &[
            (&[4, 0], r38 * block_amplitude_factor(0, 4, theta)),
            (&[0, 4], r38 * block_amplitude_factor(4, 4, theta)),
        ],
    );
    let (_, norm) = unnormalized.normalize().unwrap();
    assert!((norm * norm - 1536.0 / 23328.0).abs() < 1e-12);

    let identity = theta_block(&input, "a", "b", 0.0).unwrap();
    assert!((identity.probability - 1.0).abs() < 1e-15);
    assert!(identity.state.max_abs_diff(&input).unwrap() < 1e-15);

    let single = FockState::basis_state(ab(), [1, 0].into()).unwrap();
    let dead = theta_block(&single, "a", "b", FRAC_PI_4).unwrap();
    assert_eq!(dead.probability, 0.0);
    assert!(dead.state.is_empty());
}

#[test]
fn deletion_angle_removes_both_targets() {
    for total in 2..=8u32 {
        let input = generic_input(total);
        for i in 1..total {
            let block = theta_block(&input, "a", "b", deletion_angle(i).unwrap()).unwrap();
            assert!(block.state.amplitude_of(&[i, total - i]).norm() < 1e-12);
            assert!(block.state.amplitude_of(&[total - i, i]).norm() < 1e-12);
        }
    }
}

#[test]
fn printed_angle_rule_does_not_delete() {
    for total in 3..=8u32 {
        let input = generic_input(total);
        for i in 2..total {
            let theta = deletion_angle_with(i, AngleRule::Printed).unwrap();
            let block = theta_block(&input, "a", "b", theta).unwrap();
            assert!(
                block.state.amplitude_of(&[i, total - i]).norm() > 1e-3,
                "N={total} i={i}"
            );
        }
    }
}

#[test]
fn noon_outputs() {
    for p in 3..=8u32 {
        let run = noon_circuit(p).unwrap();
        assert_eq!(run.state.len(), 2, "P={p}");
        for occ in [[p, 0], [0, p]] {
            assert!((run.state.amplitude_of(&occ).norm() - FRAC_1_SQRT_2).abs() < 1e-10);
        }
        let closed = noon_probability_closed_form(p).unwrap();
        assert!(
            (run.probability - closed).abs() < 1e-9,
            "P={p}: {} vs {closed}",
            run.probability
        );
    }
    let two = noon_circuit(2).unwrap();
    assert_eq!(two.plan.blocks(), 0);
    assert_eq!(two.probability, 1.0);
    let want = real_state(ab(), &[(&[2, 0], FRAC_1_SQRT_2), (&[0, 2], -FRAC_1_SQRT_2)]);
    assert!(two.state.max_abs_diff_up_to_phase(&want).unwrap() < 1e-12);

    assert!((noon_circuit(6).unwrap().probability - 0.0975).abs() < 1e-4);
    assert!((noon_circuit(3).unwrap().probability - 1.0 / 32.0).abs() < 1e-12);
}

#[test]
fn noon_relative_phase_is_reported() {
    // P=6 ends with opposite signs, P=4 with equal signs
    assert!((noon_circuit(6).unwrap().relative_phase().abs() - std::f64::consts::PI).abs() < 1e-12);
    assert!(noon_circuit(4).unwrap().relative_phase().abs() < 1e-12);
}

#[test]
fn block_order_is_irrelevant() {
    let cfg = Config::default();
    for p in [7u32, 8, 9] {
        let plan = NoonPlan::new(p, AngleRule::ZeroFactor).unwrap();
        let forward = noon_circuit_with(p, AngleRule::ZeroFactor, &cfg).unwrap();
        let mut reversed = plan.clone();
        reversed.block_angles.reverse();
        reversed.deleted_occupations.reverse();
        let (input, circuit) = reversed.circuit().unwrap();
        let out = run(&circuit, &input, &cfg, false).unwrap();
        assert!(out.state.max_abs_diff(&forward.state).unwrap() < 1e-12);
        assert!((out.probability - forward.probability).abs() < 1e-15);
    }
}

#[test]
fn noon_dense_route_agrees() {
    let cfg = Config::default();
    for p in 3..=5u32 {
        let (input, circuit) = NoonPlan::new(p, AngleRule::ZeroFactor)
            .unwrap()
            .circuit()
            .unwrap();
        let dense = run_dense(&circuit, &input, &cfg, DEFAULT_SECTOR_CAP).unwrap();
        let sparse = run(&circuit, &input, &cfg, false).unwrap();
        assert!(sparse.state.max_abs_diff(&dense.state).unwrap() < 1e-9);
        assert!((dense.probability - noon_probability_closed_form(p).unwrap()).abs() < 1e-9);
    }
}
