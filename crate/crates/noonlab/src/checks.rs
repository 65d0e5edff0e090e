//! Reference measurements shared by the audit and the acceptance suite.
//!
//! Each function returns raw numbers; callers apply their own tolerances.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use noonlab_core::oracle::{element_matrix, run_dense, SectorBasis, DEFAULT_SECTOR_CAP};
use noonlab_core::schemes::{
    balanced_splitter_coefficients, block_amplitude_factor, deletion_angle_with, noon_circuit_with,
    noon_probability_closed_form, singlet, theta_block_with, two_photon_entangler_with, AngleRule,
};
use noonlab_core::{
    apply_beam_splitter, run, Circuit, Complex64, Config, DetectionPattern, ElementSpec, FockState,
    ModeRegistry, Occupation, Result, Step,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn real_state(reg: ModeRegistry, terms: &[(Vec<u32>, f64)]) -> Result<FockState> {
    FockState::superposition(
        reg,
        terms
            .iter()
            .map(|(o, a)| (Occupation::new(o.clone()), Complex64::new(*a, 0.0))),
    )
}

/// State after the polarizing splitters, over spatial modes 3, 4, 5, 6.
pub fn expected_split_state() -> Result<FockState> {
    let r = 2f64.sqrt() / 3.0;
    real_state(
        ModeRegistry::polarized(&["3", "4", "5", "6"])?,
        &[
            (vec![2, 0, 0, 0, 0, 0, 0, 0], 0.5 * r),
            (vec![1, 0, 0, 1, 0, 0, 0, 0], r),
            (vec![0, 0, 0, 2, 0, 0, 0, 0], r),
            (vec![0, 0, 0, 0, 2, 0, 0, 0], -0.5 * r),
            (vec![0, 0, 0, 0, 1, 0, 0, 1], -r),
            (vec![0, 0, 0, 0, 0, 0, 0, 2], -r),
        ],
    )
}

/// State after the ancilla coincidence, over spatial modes 3, 4, 5, 6.
pub fn expected_coincidence_state() -> Result<FockState> {
    real_state(
        ModeRegistry::polarized(&["3", "4", "5", "6"])?,
        &[
            (vec![2, 0, 0, 0, 0, 0, 0, 0], 0.5),
            (vec![0, 0, 0, 2, 0, 0, 0, 0], -0.5),
            (vec![0, 0, 0, 0, 2, 0, 0, 0], -0.5),
            (vec![0, 0, 0, 0, 0, 0, 0, 2], 0.5),
        ],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglerCheck {
    pub fidelity: f64,
    pub probability: f64,
    /// Deviation of the split-stage state from its expected pattern, up to phase.
    pub split_deviation: f64,
    pub coincidence_deviation: f64,
    /// Largest `|H⟩|V⟩` cross-term amplitude after the coincidence.
    pub cross_terms: f64,
}

pub fn entangler(cfg: &Config) -> Result<EntanglerCheck> {
    let out = two_photon_entangler_with(cfg)?;
    let stage = |name: &str| {
        out.trace
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.clone())
            .expect("entangler trace names every stage")
    };
    let coincidence = stage("psi4");
    let cross_terms = [[1, 0, 0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0, 0, 1]]
        .iter()
        .map(|o| coincidence.amplitude_of(o).norm())
        .fold(0.0, f64::max);
    Ok(EntanglerCheck {
        fidelity: out.state.fidelity(&singlet()?)?,
        probability: out.probability,
        split_deviation: stage("psi3").max_abs_diff_up_to_phase(&expected_split_state()?)?,
        coincidence_deviation: coincidence
            .max_abs_diff_up_to_phase(&expected_coincidence_state()?)?,
        cross_terms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitterCheck {
    pub max_deviation: f64,
    pub max_odd: f64,
}

/// Balanced splitter on `|N, N⟩` against its closed form, `N = 1..=max_n`.
pub fn balanced_splitter(max_n: u32) -> Result<SplitterCheck> {
    let reg = ModeRegistry::scalar(&["a", "b"])?;
    let mut check = SplitterCheck {
        max_deviation: 0.0,
        max_odd: 0.0,
    };
    for n in 1..=max_n {
        let out = apply_beam_splitter(
            &FockState::basis_state(reg.clone(), [n, n].into())?,
            "a",
            "b",
            FRAC_PI_4,
        )?;
        let terms: Vec<(Vec<u32>, f64)> = balanced_splitter_coefficients(n)
            .into_iter()
            .enumerate()
            .map(|(m, c)| (vec![2 * n - 2 * m as u32, 2 * m as u32], c))
            .collect();
        let expected = real_state(reg.clone(), &terms)?;
        check.max_deviation = check
            .max_deviation
            .max(out.max_abs_diff_up_to_phase(&expected)?);
        for k in (1..2 * n).step_by(2) {
            check.max_odd = check.max_odd.max(out.amplitude_of(&[k, 2 * n - k]).norm());
        }
    }
    Ok(check)
}

/// Normalized `Σ C_n |n, N-n⟩` with every coefficient nonzero.
pub fn generic_input(total: u32) -> Result<FockState> {
    let terms: Vec<(Vec<u32>, f64)> = (0..=total)
        .map(|n| {
            let sign = if n % 3 == 1 { -1.0 } else { 1.0 };
            (vec![n, total - n], sign * (1.0 + 0.37 * f64::from(n)))
        })
        .collect();
    Ok(real_state(ModeRegistry::scalar(&["a", "b"])?, &terms)?
        .normalize()?
        .0)
}

/// Angles `k·(π/2)/(points+1)`, `k = 1..=points`.
pub fn open_grid(points: u32) -> Vec<f64> {
    (1..=points)
        .map(|k| f64::from(k) * FRAC_PI_2 / f64::from(points + 1))
        .collect()
}

/// Largest deviation of the simulated block from the amplitude law, over
/// `0 ≤ n ≤ N ≤ max_n` and the open angle grid. Both sides are compared
/// after the same normalization; the heralding probability is checked
/// against the law's squared norm.
pub fn block_law(max_n: u32, points: u32, cfg: &Config) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for total in 0..=max_n {
        let input = generic_input(total)?;
        for theta in open_grid(points) {
            let block = theta_block_with(&input, "a", "b", theta, cfg)?;
            let expected: Vec<f64> = (0..=total)
                .map(|n| {
                    input.amplitude_of(&[n, total - n]).re * block_amplitude_factor(n, total, theta)
                })
                .collect();
            let norm_sqr: f64 = expected.iter().map(|e| e * e).sum();
            worst = worst.max((block.probability - norm_sqr).abs());
            if norm_sqr < 1e-24 {
                worst = worst.max(block.state.norm());
                continue;
            }
            let norm = norm_sqr.sqrt();
            for n in 0..=total {
                let got = block.state.amplitude_of(&[n, total - n]);
                worst = worst.max((got - Complex64::new(expected[n as usize] / norm, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoonCheck {
    pub photons: u32,
    pub simulated: f64,
    pub closed_form: f64,
    /// Heralded state is supported on exactly `|P,0⟩` and `|0,P⟩`.
    pub support_ok: bool,
    /// Largest `| |amp| - 1/√2 |` over the two terms.
    pub modulus_deviation: f64,
}

pub fn noon(photons: u32, cfg: &Config) -> Result<NoonCheck> {
    let run = noon_circuit_with(photons, AngleRule::ZeroFactor, cfg)?;
    let ends = [[photons, 0], [0, photons]];
    let support_ok =
        run.state.len() == 2 && ends.iter().all(|o| run.state.amplitude_of(o).norm() > 0.0);
    let modulus_deviation = ends
        .iter()
        .map(|o| (run.state.amplitude_of(o).norm() - FRAC_1_SQRT_2).abs())
        .fold(0.0, f64::max);
    Ok(NoonCheck {
        photons,
        simulated: run.probability,
        closed_form: noon_probability_closed_form(photons)?,
        support_ok,
        modulus_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeletionCheck {
    /// Largest targeted amplitude at `tan θ = 1/√i`.
    pub corrected_max: f64,
    /// Smallest targeted amplitude at `tan θ = √i`, `i ≥ 2`.
    pub printed_min: f64,
}

/// Targeted amplitudes `|i, N-i⟩`, `|N-i, i⟩` after a block at either angle rule.
pub fn deletion(max_n: u32, cfg: &Config) -> Result<DeletionCheck> {
    let mut check = DeletionCheck {
        corrected_max: 0.0,
        printed_min: f64::INFINITY,
    };
    for total in 2..=max_n {
        let input = generic_input(total)?;
        for i in 1..total {
            let targets = [[i, total - i], [total - i, i]];
            let theta = deletion_angle_with(i, AngleRule::ZeroFactor)?;
            let out = theta_block_with(&input, "a", "b", theta, cfg)?;
            for t in &targets {
                check.corrected_max = check.corrected_max.max(out.state.amplitude_of(t).norm());
            }
            if i >= 2 {
                let theta = deletion_angle_with(i, AngleRule::Printed)?;
                let out = theta_block_with(&input, "a", "b", theta, cfg)?;
                check.printed_min = check
                    .printed_min
                    .min(out.state.amplitude_of(&targets[0]).norm());
            }
        }
    }
    Ok(check)
}

/// `⟨1,1|U|1,1⟩` and `|⟨2,0|U|1,1⟩|` for a balanced splitter.
pub fn hom(cfg: &Config) -> Result<(f64, f64)> {
    let basis = SectorBasis::new(ModeRegistry::scalar(&["a", "b"])?, 2, DEFAULT_SECTOR_CAP)?;
    let u = element_matrix(
        &ElementSpec::beam_splitter("a", "b", FRAC_PI_4),
        &basis,
        cfg,
    )?;
    let one_one = Occupation::new(vec![1, 1]);
    Ok((
        u.element(&one_one, &one_one).norm(),
        u.element(&Occupation::new(vec![2, 0]), &one_one).norm(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub circuits: usize,
    pub max_photons: u32,
    pub max_modes: usize,
}

/// A generated test case.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCase {
    pub input: FockState,
    pub circuit: Circuit,
}

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
}

/// Circuit `index` of the family; independent of how many are generated.
pub fn random_case(spec: &RandomSpec, index: usize) -> Result<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let max_modes = spec.max_modes.max(2);
    let modes = rng.gen_range(2..=max_modes);
    let polarized = rng.gen_range(0..=modes / 2);
    let spatial: Vec<String> = (0..polarized).map(|k| format!("p{k}")).collect();
    let scalars: Vec<String> = (0..modes - 2 * polarized)
        .map(|k| format!("s{k}"))
        .collect();
    let registry = ModeRegistry::polarized(&spatial)?.concat(&ModeRegistry::scalar(&scalars)?)?;
    let concrete: Vec<String> = registry.labels().map(String::from).collect();

    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let total = rng.gen_range(0..=spec.max_photons);
        let mut counts = vec![0u32; modes];
        for _ in 0..total {
            counts[rng.gen_range(0..modes)] += 1;
        }
        let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        terms.push((Occupation::new(counts), amp));
    }
    let input = match FockState::superposition(registry.clone(), terms)?.normalize() {
        Ok((s, _)) => s,
        Err(_) => FockState::vacuum(registry.clone()),
    };

    let mut circuit = Circuit::new();
    for _ in 0..rng.gen_range(1..=6) {
        let kind = rng.gen_range(0..4);
        let element = match kind {
            1 if !spatial.is_empty() => ElementSpec::rotator(
                spatial.choose(&mut rng).expect("nonempty"),
                random_angle(&mut rng),
            ),
            2 if spatial.len() >= 2 => {
                let mut pair: Vec<&String> = spatial.choose_multiple(&mut rng, 2).collect();
                if rng.gen_bool(0.5) {
                    pair.reverse();
                }
                let (x, y) = (pair[0].as_str(), pair[1].as_str());
                let (o1, o2) = if rng.gen_bool(0.5) { (x, y) } else { (y, x) };
                ElementSpec::pbs(x, Some(y), Some(o1), Some(o2))
            }
            3 if spatial.len() >= 2 => {
                let pair: Vec<&String> = spatial.choose_multiple(&mut rng, 2).collect();
                ElementSpec::beam_splitter(pair[0], pair[1], random_angle(&mut rng))
            }
            _ => {
                let pair: Vec<&String> = concrete.choose_multiple(&mut rng, 2).collect();
                ElementSpec::beam_splitter(pair[0], pair[1], random_angle(&mut rng))
            }
        };
        circuit.element(element);
    }
    if rng.gen_bool(0.3) {
        let targets: Vec<&String> = spatial.iter().chain(&scalars).collect();
        let label = targets.choose(&mut rng).expect("at least two modes");
        let count = rng.gen_range(0..=spec.max_photons.min(2));
        circuit.push(Step::Detect(DetectionPattern::single(label, count)));
    }
    Ok(RandomCase { input, circuit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomOutcome {
    pub index: usize,
    /// Largest state or probability difference between the two routes.
    pub delta: f64,
    /// Largest unitarity defect of the circuit's element matrices.
    pub unitarity_defect: f64,
    pub matrices: usize,
    pub error: Option<String>,
}

fn compare_case(case: &RandomCase, cfg: &Config) -> Result<(f64, f64, usize)> {
    let sparse = run(&case.circuit, &case.input, cfg, false)?;
    let dense = run_dense(&case.circuit, &case.input, cfg, DEFAULT_SECTOR_CAP)?;
    let delta = sparse
        .state
        .max_abs_diff(&dense.state)?
        .max((sparse.probability - dense.probability).abs());
    let mut defect: f64 = 0.0;
    let mut matrices = 0;
    let registry = case.input.registry();
    for step in &case.circuit.steps {
        if let Step::Element(e) = step {
            for total in case.input.photon_totals() {
                let basis = SectorBasis::new(registry.clone(), total, DEFAULT_SECTOR_CAP)?;
                defect = defect.max(element_matrix(e, &basis, cfg)?.unitarity_defect());
                matrices += 1;
            }
        }
    }
    Ok((delta, defect, matrices))
}

/// Sparse-vs-dense comparison over the seeded family, in index order.
pub fn random_suite(spec: &RandomSpec, cfg: &Config) -> Vec<RandomOutcome> {
    (0..spec.circuits)
        .into_par_iter()
        .map(
            |index| match random_case(spec, index).and_then(|case| compare_case(&case, cfg)) {
                Ok((delta, unitarity_defect, matrices)) => RandomOutcome {
                    index,
                    delta,
                    unitarity_defect,
                    matrices,
                    error: None,
                },
                Err(e) => RandomOutcome {
                    index,
                    delta: f64::INFINITY,
                    unitarity_defect: f64::INFINITY,
                    matrices: 0,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_cases_are_reproducible_and_bounded() {
        let spec = RandomSpec {
            seed: 7,
            circuits: 20,
            max_photons: 4,
            max_modes: 5,
        };
        for i in 0..spec.circuits {
            let a = random_case(&spec, i).unwrap();
            assert_eq!(a, random_case(&spec, i).unwrap());
            assert!(a.input.registry().len() <= 5);
            assert!(a.input.photon_totals().iter().all(|&t| t <= 4));
        }
    }

    #[test]
    fn small_suite_agrees() {
        let spec = RandomSpec {
            seed: 3,
            circuits: 10,
            max_photons: 3,
            max_modes: 4,
        };
        for o in random_suite(&spec, &Config::default()) {
            assert!(o.error.is_none(), "{:?}", o.error);
            assert!(o.delta < 1e-9 && o.unitarity_defect < 1e-10);
        }
    }

    #[test]
    fn hom_cancels() {
        let (cross, bunched) = hom(&Config::default()).unwrap();
        assert!(cross < 1e-15);
        assert!((bunched - FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
