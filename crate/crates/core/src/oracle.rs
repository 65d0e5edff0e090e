//! Dense reference implementation.
//!
//! Works on fixed-photon-number sectors and builds every amplitude by
//! multiplying out `∏_k (Σ_j T[j][k] b_j†)^{n_k}` over the full single-photon
//! transfer matrix `T`, with plain factorials. It shares no numerical code
//! with the sparse binomial engine in [`crate::elements`], so agreement
//! between the two is a meaningful check.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::circuit::{Circuit, Step};
use crate::detection::DetectionPattern;
use crate::elements::{Config, ElementSpec};
use crate::error::{Error, Result};
use crate::math::binomial;
use crate::registry::{ModeDecl, ModeRegistry, Target};
use crate::state::{FockState, Occupation, ZERO_NORM_SQR};

/// Default ceiling on sector dimension.
pub const DEFAULT_SECTOR_CAP: usize = 200_000;

/// All occupations of `total` photons over a registry, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    registry: ModeRegistry,
    total: u32,
    basis: Vec<Occupation>,
}

/// `C(total + modes - 1, modes - 1)`.
pub fn sector_dimension(modes: usize, total: u32) -> u128 {
    if modes == 0 {
        return u128::from(total == 0);
    }
    binomial(total + modes as u32 - 1, modes as u32 - 1)
}

impl SectorBasis {
    pub fn new(registry: ModeRegistry, total: u32, cap: usize) -> Result<Self> {
        let dim = sector_dimension(registry.len(), total);
        if dim > cap as u128 {
            return Err(Error::SectorTooLarge {
                dim: usize::try_from(dim).unwrap_or(usize::MAX),
                cap,
            });
        }
        let mut basis = Vec::with_capacity(dim as usize);
        let mut current = vec![0u32; registry.len()];
        compositions(&mut current, 0, total, &mut basis);
        basis.sort_unstable();
        Ok(SectorBasis {
            registry,
            total,
            basis,
        })
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn num_modes(&self) -> usize {
        self.registry.len()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.basis.binary_search(occ).ok()
    }
}

fn compositions(current: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Occupation>) {
    if current.is_empty() {
        if left == 0 {
            out.push(Occupation::new(Vec::new()));
        }
        return;
    }
    if pos == current.len() - 1 {
        current[pos] = left;
        out.push(Occupation::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for n in 0..=left {
        current[pos] = n;
        compositions(current, pos + 1, left - n, out);
    }
    current[pos] = 0;
}

/// Matrix between two sector bases, row-major with rows indexing `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    input: SectorBasis,
    output: SectorBasis,
    matrix: Vec<Complex64>,
}

impl DenseOperator {
    pub fn input(&self) -> &SectorBasis {
        &self.input
    }

    pub fn output(&self) -> &SectorBasis {
        &self.output
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.input.len() + col]
    }

    /// `⟨out|U|in⟩` by occupation.
    pub fn element(&self, out: &Occupation, inp: &Occupation) -> Complex64 {
        match (self.output.index_of(out), self.input.index_of(inp)) {
            (Some(r), Some(c)) => self.get(r, c),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.input.len();
        let m = self.output.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    acc += self.get(r, i).conj() * self.get(r, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// Single-photon transfer matrix `T[out][in]` and the output registry.
struct Transfer {
    registry: ModeRegistry,
    matrix: Vec<Vec<Complex64>>,
    /// Input modes whose photons have nowhere to go.
    dead: Vec<(usize, alloc::string::String)>,
}

fn identity_transfer(reg: &ModeRegistry) -> Vec<Vec<Complex64>> {
    let n = reg.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

fn transfer(element: &ElementSpec, reg: &ModeRegistry, cfg: &Config) -> Result<Transfer> {
    let mut matrix = identity_transfer(reg);
    let rotate = |m: &mut Vec<Vec<Complex64>>, a: usize, c: usize, theta: f64| {
        let (s, co) = (libm::sin(theta), libm::cos(theta));
        m[a][a] = Complex64::new(co, 0.0);
        m[c][a] = Complex64::new(s, 0.0);
        m[c][c] = Complex64::new(co, 0.0);
        m[a][c] = Complex64::new(-s, 0.0);
    };
    match element {
        ElementSpec::BeamSplitter {
            first,
            second,
            theta,
        } => {
            if !theta.is_finite() {
                return Err(Error::NonFiniteAngle);
            }
            if first == second {
                return Err(Error::IdenticalModes(first.clone()));
            }
            match (reg.resolve(first)?, reg.resolve(second)?) {
                (Target::Spatial { h: h1, v: v1 }, Target::Spatial { h: h2, v: v2 }) => {
                    rotate(&mut matrix, h1, h2, *theta);
                    rotate(&mut matrix, v1, v2, *theta);
                }
                (Target::Spatial { .. }, _) | (_, Target::Spatial { .. }) => {
                    return Err(Error::ModeKindMismatch {
                        first: first.clone(),
                        second: second.clone(),
                    })
                }
                (
                    Target::Scalar(a) | Target::SubMode(a),
                    Target::Scalar(c) | Target::SubMode(c),
                ) => rotate(&mut matrix, a, c, *theta),
            }
            Ok(Transfer {
                registry: reg.clone(),
                matrix,
                dead: Vec::new(),
            })
        }
        ElementSpec::Rotator { spatial, theta } => {
            if !theta.is_finite() {
                return Err(Error::NonFiniteAngle);
            }
            let Target::Spatial { h, v } = reg.resolve(spatial)? else {
                return Err(Error::NotPolarized(spatial.clone()));
            };
            rotate(&mut matrix, h, v, *theta);
            Ok(Transfer {
                registry: reg.clone(),
                matrix,
                dead: Vec::new(),
            })
        }
        ElementSpec::PolarizingBs {
            in1,
            in2,
            out1,
            out2,
        } => pbs_transfer(
            reg,
            in1,
            in2.as_deref(),
            out1.as_deref(),
            out2.as_deref(),
            cfg,
        ),
        ElementSpec::Inject { .. } => unreachable!("injection is not a linear map on one sector"),
    }
}

fn pbs_transfer(
    reg: &ModeRegistry,
    in1: &str,
    in2: Option<&str>,
    out1: Option<&str>,
    out2: Option<&str>,
    cfg: &Config,
) -> Result<Transfer> {
    let pair = |l: &str| match reg.resolve(l)? {
        Target::Spatial { h, v } => Ok((h, v)),
        _ => Err(Error::NotPolarized(l.to_string())),
    };
    if in2 == Some(in1) {
        return Err(Error::IdenticalModes(in1.to_string()));
    }
    if out1.is_some() && out1 == out2 {
        return Err(Error::IdenticalModes(out1.unwrap_or_default().to_string()));
    }
    let (h1, v1) = pair(in1)?;
    let p2 = in2.map(pair).transpose()?;
    let inputs: Vec<&str> = core::iter::once(in1).chain(in2).collect();
    let outputs: Vec<&str> = [out1, out2].into_iter().flatten().collect();

    // Output registry: untouched modes and reused labels keep their slots,
    // fresh outputs are appended.
    let mut out_reg = ModeRegistry::new();
    for m in reg.modes() {
        let spatial = m.spatial();
        let consumed = spatial.is_some_and(|s| inputs.contains(&s) && !outputs.contains(&s));
        if consumed {
            continue;
        }
        match spatial {
            Some(s) => {
                if out_reg.spatial_pair(s).is_none() {
                    out_reg.push_polarized(s)?;
                }
            }
            None => out_reg.push_scalar(m.label())?,
        }
    }
    for o in &outputs {
        if !reg.label_taken(o) {
            out_reg.push_polarized(o)?;
        } else if !inputs.contains(o) {
            pair(o)?;
        }
    }

    let n_out = out_reg.len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); reg.len()]; n_out];
    let input_modes: Vec<usize> = [Some((h1, v1)), p2]
        .into_iter()
        .flatten()
        .flat_map(|(h, v)| [h, v])
        .collect();
    for (c, m) in reg.modes().iter().enumerate() {
        if input_modes.contains(&c) {
            continue;
        }
        let r = out_reg
            .index_of(m.label())
            .expect("untouched mode survives");
        matrix[r][c] = Complex64::new(1.0, 0.0);
    }
    let reflect = match cfg.reflection_phase {
        crate::elements::ReflectionPhase::One => Complex64::new(1.0, 0.0),
        crate::elements::ReflectionPhase::I => Complex64::new(0.0, 1.0),
    };
    let mut dead = Vec::new();
    let mut wire = |from: usize, to: Option<usize>, phase: Complex64| match to {
        Some(r) => matrix[r][from] = phase,
        None => dead.push((from, in1.to_string())),
    };
    let slot = |o: Option<&str>, pol: usize| {
        o.map(|l| {
            out_reg
                .spatial_pair(l)
                .map(|(h, v)| if pol == 0 { h } else { v })
                .expect("registered")
        })
    };
    let one = Complex64::new(1.0, 0.0);
    wire(h1, slot(out1, 0), one);
    wire(v1, slot(out2, 1), reflect);
    if let Some((h2, v2)) = p2 {
        wire(h2, slot(out2, 0), one);
        wire(v2, slot(out1, 1), reflect);
    }
    Ok(Transfer {
        registry: out_reg,
        matrix,
        dead,
    })
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Output amplitudes of one input basis state under `T`.
fn expand_column(
    t: &Transfer,
    occ: &Occupation,
    out_modes: usize,
) -> BTreeMap<Occupation, Complex64> {
    let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; out_modes], Complex64::new(1.0, 0.0));
    for (k, &n) in occ.counts().iter().enumerate() {
        for _ in 0..n {
            let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            for (mono, coef) in &poly {
                for (j, row) in t.matrix.iter().enumerate() {
                    let tjk = row[k];
                    if tjk == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[j] += 1;
                    *next.entry(m).or_default() += coef * tjk;
                }
            }
            poly = next;
        }
    }
    let in_norm = libm::sqrt(occ.counts().iter().map(|&n| factorial(n)).product::<f64>());
    poly.into_iter()
        .map(|(m, coef)| {
            let out_norm = libm::sqrt(m.iter().map(|&n| factorial(n)).product::<f64>());
            (Occupation::new(m), coef * (out_norm / in_norm))
        })
        .collect()
}

/// Matrix of a linear element (or an injection) on one sector, built column
/// by column.
pub fn element_matrix(
    element: &ElementSpec,
    basis: &SectorBasis,
    cfg: &Config,
) -> Result<DenseOperator> {
    let cap = usize::MAX;
    if let ElementSpec::Inject { mode, photons } = element {
        let (reg, idx) = inject_target(basis.registry(), mode)?;
        let output = SectorBasis::new(reg, basis.total() + photons, cap)?;
        let mut matrix = vec![Complex64::new(0.0, 0.0); output.len() * basis.len()];
        for (c, occ) in basis.states().iter().enumerate() {
            if let Some(next) = injected(occ, idx, output.num_modes(), *photons) {
                let r = output.index_of(&next).expect("same sector");
                matrix[r * basis.len() + c] = Complex64::new(1.0, 0.0);
            }
        }
        return Ok(DenseOperator {
            input: basis.clone(),
            output,
            matrix,
        });
    }
    let t = transfer(element, basis.registry(), cfg)?;
    let output = SectorBasis::new(t.registry.clone(), basis.total(), cap)?;
    let mut matrix = vec![Complex64::new(0.0, 0.0); output.len() * basis.len()];
    for (c, occ) in basis.states().iter().enumerate() {
        if t.dead.iter().any(|(m, _)| occ.get(*m) > 0) {
            continue;
        }
        for (o, a) in expand_column(&t, occ, output.num_modes()) {
            let r = output.index_of(&o).expect("photon number conserved");
            matrix[r * basis.len() + c] += a;
        }
    }
    Ok(DenseOperator {
        input: basis.clone(),
        output,
        matrix,
    })
}

fn inject_target(reg: &ModeRegistry, mode: &str) -> Result<(ModeRegistry, usize)> {
    match reg.resolve(mode) {
        Ok(Target::Scalar(i) | Target::SubMode(i)) => Ok((reg.clone(), i)),
        Ok(Target::Spatial { .. }) => Err(Error::AmbiguousPolarization(mode.to_string())),
        Err(Error::UnknownMode(_)) => {
            let mut r = reg.clone();
            r.push_scalar(mode)?;
            let i = r.len() - 1;
            Ok((r, i))
        }
        Err(e) => Err(e),
    }
}

/// `None` when the target mode is already occupied.
fn injected(occ: &Occupation, idx: usize, modes: usize, photons: u32) -> Option<Occupation> {
    let mut counts = occ.counts().to_vec();
    counts.resize(modes, 0);
    if counts[idx] > 0 {
        return None;
    }
    counts[idx] = photons;
    Some(Occupation::new(counts))
}

/// A dense state: one amplitude vector per photon-number sector.
#[derive(Debug, Clone)]
struct DenseState {
    registry: ModeRegistry,
    sectors: Vec<(SectorBasis, Vec<Complex64>)>,
}

impl DenseState {
    fn from_sparse(state: &FockState, cap: usize) -> Result<Self> {
        let mut sectors = Vec::new();
        for total in state.photon_totals() {
            let basis = SectorBasis::new(state.registry().clone(), total, cap)?;
            let mut v = vec![Complex64::new(0.0, 0.0); basis.len()];
            for (o, a) in state.terms().filter(|(o, _)| o.total() == total) {
                v[basis.index_of(o).expect("in sector")] = *a;
            }
            sectors.push((basis, v));
        }
        Ok(DenseState {
            registry: state.registry().clone(),
            sectors,
        })
    }

    fn to_sparse(&self) -> FockState {
        let mut terms = BTreeMap::new();
        for (basis, v) in &self.sectors {
            for (o, a) in basis.states().iter().zip(v) {
                if a.norm_sqr() > 0.0 {
                    terms.insert(o.clone(), *a);
                }
            }
        }
        FockState::from_parts(self.registry.clone(), terms)
    }

    fn norm_sqr(&self) -> f64 {
        self.sectors
            .iter()
            .flat_map(|(_, v)| v.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Rebuilds sectors over `registry`, mapping each old basis state with
    /// `map` (which may drop it) and scaling by `weight`.
    fn remap<F>(&self, registry: ModeRegistry, cap: usize, mut map: F) -> Result<DenseState>
    where
        F: FnMut(&Occupation) -> Result<Option<Occupation>>,
    {
        let mut bins: BTreeMap<u32, Vec<(Occupation, Complex64)>> = BTreeMap::new();
        for (basis, v) in &self.sectors {
            for (o, a) in basis.states().iter().zip(v) {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                if let Some(n) = map(o)? {
                    bins.entry(n.total()).or_default().push((n, *a));
                }
            }
        }
        let mut sectors = Vec::new();
        for (total, entries) in bins {
            let basis = SectorBasis::new(registry.clone(), total, cap)?;
            let mut v = vec![Complex64::new(0.0, 0.0); basis.len()];
            for (o, a) in entries {
                v[basis.index_of(&o).expect("in sector")] += a;
            }
            sectors.push((basis, v));
        }
        Ok(DenseState { registry, sectors })
    }

    fn apply_linear(&self, element: &ElementSpec, cap: usize, cfg: &Config) -> Result<DenseState> {
        let t = transfer(element, &self.registry, cfg)?;
        let mut sectors = Vec::new();
        for (basis, v) in &self.sectors {
            let output = SectorBasis::new(t.registry.clone(), basis.total(), cap)?;
            let mut w = vec![Complex64::new(0.0, 0.0); output.len()];
            for (occ, a) in basis.states().iter().zip(v) {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                if let Some((_, label)) = t.dead.iter().find(|(m, _)| occ.get(*m) > 0) {
                    return Err(Error::DiscardedPortOccupied(label.clone()));
                }
                for (o, amp) in expand_column(&t, occ, output.num_modes()) {
                    w[output.index_of(&o).expect("photon number conserved")] += a * amp;
                }
            }
            sectors.push((output, w));
        }
        Ok(DenseState {
            registry: t.registry,
            sectors,
        })
    }

    fn detect(&self, pattern: &DetectionPattern, cap: usize) -> Result<(DenseState, f64)> {
        let mut groups = Vec::new();
        let mut all = Vec::new();
        for (label, count) in pattern.entries() {
            let idx = self.registry.detector_indices(label)?;
            all.extend_from_slice(&idx);
            groups.push((idx, *count));
        }
        let (registry, kept) = self.registry.without(&all);
        let before = self.norm_sqr();
        let projected = self.remap(registry, cap, |o| {
            let hit = groups
                .iter()
                .all(|(idx, want)| idx.iter().map(|&i| o.get(i)).sum::<u32>() == *want);
            Ok(hit.then(|| o.select(&kept)))
        })?;
        let after = projected.norm_sqr();
        if before < ZERO_NORM_SQR || after < ZERO_NORM_SQR {
            return Ok((
                DenseState {
                    registry: projected.registry,
                    sectors: Vec::new(),
                },
                0.0,
            ));
        }
        let scale = 1.0 / libm::sqrt(after);
        let mut out = projected;
        for (_, v) in &mut out.sectors {
            for a in v.iter_mut() {
                *a *= scale;
            }
        }
        Ok((out, after / before))
    }
}

/// Result of a dense run.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseRun {
    pub state: FockState,
    pub probability: f64,
}

/// Runs `circuit` through dense sector vectors. Detections act as explicit
/// projectors followed by renormalization.
pub fn run_dense(
    circuit: &Circuit,
    input: &FockState,
    cfg: &Config,
    cap: usize,
) -> Result<DenseRun> {
    let mut state = DenseState::from_sparse(input, cap)?;
    let mut probability = 1.0;
    for (index, step) in circuit.steps.iter().enumerate() {
        let next = match step {
            Step::Declare(decl) => declare(&state, decl, cap),
            Step::Element(ElementSpec::Inject { mode, photons }) => {
                inject(&state, mode, *photons, cap)
            }
            Step::Element(e) => state.apply_linear(e, cap, cfg),
            Step::Detect(p) => state.detect(p, cap).map(|(s, p)| {
                probability *= p;
                s
            }),
        };
        state = next.map_err(|e| e.at_step(index))?;
    }
    Ok(DenseRun {
        state: state.to_sparse(),
        probability,
    })
}

fn declare(state: &DenseState, decl: &ModeDecl, cap: usize) -> Result<DenseState> {
    let mut reg = state.registry.clone();
    reg.push(decl)?;
    let n = reg.len();
    state.remap(reg, cap, |o| {
        let mut c = o.counts().to_vec();
        c.resize(n, 0);
        Ok(Some(Occupation::new(c)))
    })
}

fn inject(state: &DenseState, mode: &str, photons: u32, cap: usize) -> Result<DenseState> {
    let (reg, idx) = inject_target(&state.registry, mode)?;
    let n = reg.len();
    state.remap(reg, cap, |o| match injected(o, idx, n, photons) {
        Some(next) => Ok(Some(next)),
        None => Err(Error::ModeOccupied(mode.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn basis(labels: &[&str], total: u32) -> SectorBasis {
        SectorBasis::new(
            ModeRegistry::scalar(labels).unwrap(),
            total,
            DEFAULT_SECTOR_CAP,
        )
        .unwrap()
    }

    #[test]
    fn sector_sizes() {
        let b = basis(&["a", "b", "c"], 3);
        assert_eq!(b.len(), 10);
        assert_eq!(sector_dimension(3, 3), 10);
        assert_eq!(b.states()[0].counts(), [0, 0, 3]);
        assert_eq!(b.states()[9].counts(), [3, 0, 0]);
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            SectorBasis::new(ModeRegistry::scalar(&["a", "b", "c"]).unwrap(), 30, 100),
            Err(Error::SectorTooLarge { .. })
        ));
    }

    #[test]
    fn single_photon_block_is_rotation() {
        let theta = 0.4;
        let b = basis(&["a", "c"], 1);
        let op = element_matrix(
            &ElementSpec::beam_splitter("a", "c", theta),
            &b,
            &Config::default(),
        )
        .unwrap();
        let e = |o: [u32; 2], i: [u32; 2]| op.element(&o.into(), &i.into()).re;
        // columns: input |1,0> -> cos|1,0> + sin|0,1>
        assert!((e([1, 0], [1, 0]) - libm::cos(theta)).abs() < 1e-15);
        assert!((e([0, 1], [1, 0]) - libm::sin(theta)).abs() < 1e-15);
        assert!((e([1, 0], [0, 1]) + libm::sin(theta)).abs() < 1e-15);
        assert!((e([0, 1], [0, 1]) - libm::cos(theta)).abs() < 1e-15);
    }

    #[test]
    fn hom_matrix_element_vanishes() {
        let b = basis(&["a", "c"], 2);
        let op = element_matrix(
            &ElementSpec::beam_splitter("a", "c", FRAC_PI_4),
            &b,
            &Config::default(),
        )
        .unwrap();
        assert!(op.element(&[1, 1].into(), &[1, 1].into()).norm() < 1e-15);
        assert!(op.unitarity_defect() < 1e-12);
    }

    #[test]
    fn zero_rotator_is_identity() {
        let b = SectorBasis::new(ModeRegistry::polarized(&["p", "q"]).unwrap(), 2, 1000).unwrap();
        let op = element_matrix(&ElementSpec::rotator("p", 0.0), &b, &Config::default()).unwrap();
        for r in 0..b.len() {
            for c in 0..b.len() {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((op.get(r, c) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn empty_circuit_returns_input() {
        let s = FockState::basis_state(ModeRegistry::scalar(&["a", "b"]).unwrap(), [2, 1].into())
            .unwrap();
        let out = run_dense(&Circuit::new(), &s, &Config::default(), DEFAULT_SECTOR_CAP).unwrap();
        assert_eq!(out.state, s);
        assert_eq!(out.probability, 1.0);
    }
}
