//! Full factory simulations: schedules of faulty rotations and idle noise on
//! top of the distillation circuits, plus the space and time cost model.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::{catalog, Circuit, CircuitKind};
use crate::density::{DensityMatrix, RotationErrorProfile, SimError, StorageRates};
use crate::noise::{
    level2_rotation_profile, logical_error_rate, multiqubit_rotation_profile, patch_storage_rates,
    single_qubit_rotation_profile, Distances, NoiseError, PhysicalNoise,
};

/// Largest distance the full-distance search will return.
pub const MAX_FULL_DISTANCE: u32 = 99;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactoryError {
    #[error("unknown protocol family {0:?}")]
    UnknownFamily(String),
    #[error("family {0} needs level-2 distances")]
    MissingLevel2(Family),
    #[error("family {0} needs a level-1 block count")]
    MissingBlockCount(Family),
    #[error("family {0} takes no level-2 distances")]
    UnexpectedLevel2(Family),
    #[error("schedule does not cover the circuit: {0}")]
    Schedule(String),
    #[error("level-1 failure probability {0} leaves no accepted output")]
    AlwaysFails(f64),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl From<crate::pauli::PauliError> for FactoryError {
    fn from(e: crate::pauli::PauliError) -> Self {
        FactoryError::Sim(SimError::from(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "l1_15to1")]
    L1FifteenToOne,
    #[serde(rename = "l1_15to1_small")]
    L1FifteenToOneSmall,
    #[serde(rename = "l2_15x15")]
    L2FifteenByFifteen,
    #[serde(rename = "l2_15x20")]
    L2FifteenByTwenty,
    #[serde(rename = "l2_15xccz")]
    L2FifteenByCcz,
    #[serde(rename = "l2_15x15_small")]
    L2FifteenByFifteenSmall,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::L1FifteenToOne,
        Family::L1FifteenToOneSmall,
        Family::L2FifteenByFifteen,
        Family::L2FifteenByTwenty,
        Family::L2FifteenByCcz,
        Family::L2FifteenByFifteenSmall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::L1FifteenToOne => "l1_15to1",
            Family::L1FifteenToOneSmall => "l1_15to1_small",
            Family::L2FifteenByFifteen => "l2_15x15",
            Family::L2FifteenByTwenty => "l2_15x20",
            Family::L2FifteenByCcz => "l2_15xccz",
            Family::L2FifteenByFifteenSmall => "l2_15x15_small",
        }
    }

    pub fn is_two_level(self) -> bool {
        !matches!(self, Family::L1FifteenToOne | Family::L1FifteenToOneSmall)
    }

    pub fn is_small_footprint(self) -> bool {
        matches!(self, Family::L1FifteenToOneSmall | Family::L2FifteenByFifteenSmall)
    }

    /// Whether the family runs several level-1 blocks in parallel.
    pub fn needs_block_count(self) -> bool {
        matches!(
            self,
            Family::L2FifteenByFifteen | Family::L2FifteenByTwenty | Family::L2FifteenByCcz
        )
    }

    /// Magic states (or CCZ states) delivered per round.
    pub fn outputs(self) -> usize {
        match self {
            Family::L2FifteenByTwenty => 4,
            _ => 1,
        }
    }

    /// T gates one output stands in for when sizing the main computation.
    /// A CCZ state executes a Toffoli, which costs four T gates.
    pub fn t_gates_per_output(self) -> u32 {
        match self {
            Family::L2FifteenByCcz => 4,
            _ => 1,
        }
    }

    fn top_circuit(self) -> CircuitKind {
        match self {
            Family::L2FifteenByTwenty => CircuitKind::TwentyToFour,
            Family::L2FifteenByCcz => CircuitKind::EightToCcz,
            _ => CircuitKind::FifteenToOne,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FactoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| FactoryError::UnknownFamily(s.to_string()))
    }
}

/// Prefactor on the X and Z errors picked up by a level-2 output while it is
/// consumed over `dX2` cycles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsumptionPrefactor {
    #[default]
    Half,
    Full,
}

impl ConsumptionPrefactor {
    pub fn value(self) -> f64 {
        match self {
            ConsumptionPrefactor::Half => 0.5,
            ConsumptionPrefactor::Full => 1.0,
        }
    }
}

impl FromStr for ConsumptionPrefactor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "half" => Ok(ConsumptionPrefactor::Half),
            "full" => Ok(ConsumptionPrefactor::Full),
            _ => Err(format!("unknown consumption prefactor {s:?}; expected half or full")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DistanceSet {
    pub level1: Distances,
    pub level2: Option<Distances>,
    pub n_l1: Option<u32>,
}

impl DistanceSet {
    pub fn level1(d: Distances) -> Self {
        Self {
            level1: d,
            level2: None,
            n_l1: None,
        }
    }

    pub fn two_level(d1: Distances, d2: Distances, n_l1: Option<u32>) -> Self {
        Self {
            level1: d1,
            level2: Some(d2),
            n_l1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoryConfig {
    pub family: Family,
    pub distances: DistanceSet,
    pub noise: PhysicalNoise,
    #[serde(default)]
    pub consumption: ConsumptionPrefactor,
}

impl FactoryConfig {
    pub fn new(family: Family, distances: DistanceSet, noise: PhysicalNoise) -> Result<Self, FactoryError> {
        let c = Self {
            family,
            distances,
            noise,
            consumption: ConsumptionPrefactor::Half,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), FactoryError> {
        self.noise.validate()?;
        self.distances.level1.validate()?;
        match (self.family.is_two_level(), self.distances.level2) {
            (true, None) => return Err(FactoryError::MissingLevel2(self.family)),
            (false, Some(_)) => return Err(FactoryError::UnexpectedLevel2(self.family)),
            (true, Some(d2)) => d2.validate()?,
            (false, None) => {}
        }
        if self.family.needs_block_count() {
            match self.distances.n_l1 {
                None => return Err(FactoryError::MissingBlockCount(self.family)),
                Some(n) if n == 0 || n % 2 == 1 => return Err(NoiseError::BlockCount(n).into()),
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn level2(&self) -> Result<Distances, FactoryError> {
        self.distances.level2.ok_or(FactoryError::MissingLevel2(self.family))
    }

    fn n_l1(&self) -> Result<u32, FactoryError> {
        self.distances.n_l1.ok_or(FactoryError::MissingBlockCount(self.family))
    }

    /// Name in the `(15-to-1)^n_{dX,dZ,dm} x (...)_{...}` style.
    pub fn protocol_label(&self) -> String {
        let d1 = self.distances.level1;
        let small = if self.family.is_small_footprint() { "small " } else { "" };
        let l1 = match self.distances.n_l1.filter(|_| self.family.needs_block_count()) {
            Some(n) => format!("(15-to-1)^{n}_{{{d1}}}"),
            None => format!("(15-to-1)_{{{d1}}}"),
        };
        match self.distances.level2 {
            None => format!("{small}{l1}"),
            Some(d2) => {
                let top = match self.family {
                    Family::L2FifteenByTwenty => "20-to-4",
                    Family::L2FifteenByCcz => "8-to-CCZ",
                    _ => "15-to-1",
                };
                format!("{small}{l1} x ({top})_{{{d2}}}")
            }
        }
    }
}

/// One time step of a schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// Indices into the circuit's rotation list.
    pub rotations: Vec<usize>,
    /// Qubits that exist during this step and take idle noise after it.
    pub live: Vec<usize>,
    pub storage_cycles: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<Step>,
}

impl Schedule {
    /// Builds a schedule from 1-based rotation numbers.
    fn from_numbers(steps: &[(&[usize], &[usize])], storage_cycles: f64) -> Self {
        Self {
            steps: steps
                .iter()
                .map(|(rots, live)| Step {
                    rotations: rots.iter().map(|r| r - 1).collect(),
                    live: live.to_vec(),
                    storage_cycles,
                })
                .collect(),
        }
    }

    /// Checks that every rotation appears exactly once and that rotations
    /// only touch live qubits.
    pub fn validate(&self, circuit: &Circuit) -> Result<(), FactoryError> {
        let mut seen = vec![0usize; circuit.rotations.len()];
        for (i, step) in self.steps.iter().enumerate() {
            for &r in &step.rotations {
                let rot = circuit
                    .rotations
                    .get(r)
                    .ok_or_else(|| FactoryError::Schedule(format!("step {}: no rotation {}", i + 1, r + 1)))?;
                seen[r] += 1;
                if let Some(q) = rot.axis.support().into_iter().find(|q| !step.live.contains(q)) {
                    return Err(FactoryError::Schedule(format!(
                        "step {}: rotation {} touches qubit {} before it exists",
                        i + 1,
                        r + 1,
                        q + 1
                    )));
                }
            }
        }
        if let Some(r) = seen.iter().position(|&c| c != 1) {
            return Err(FactoryError::Schedule(format!(
                "rotation {} scheduled {} times",
                r + 1,
                seen[r]
            )));
        }
        Ok(())
    }
}

const ALL5: &[usize] = &[0, 1, 2, 3, 4];
const ALL7: &[usize] = &[0, 1, 2, 3, 4, 5, 6];

/// Level-1 15-to-1 layout: qubit 1 joins at step 2, qubit 5 at step 3.
pub fn level1_schedule(dm: u32, small: bool) -> Schedule {
    let cycles = f64::from(dm) * if small { 2.0 } else { 1.0 };
    Schedule::from_numbers(
        &[
            (&[1, 2, 3, 5], &[1, 2, 3]),
            (&[6, 7], &[0, 1, 2, 3]),
            (&[4, 8, 9], ALL5),
            (&[10, 11], ALL5),
            (&[12, 13], ALL5),
            (&[14, 15], ALL5),
        ],
        cycles,
    )
}

/// Level-2 schedule with `t` idle cycles after every step.
pub fn level2_schedule(family: Family, t: f64) -> Schedule {
    match family {
        Family::L2FifteenByTwenty => {
            let mut steps: Vec<(&[usize], &[usize])> =
                vec![(&[1, 2], &[1, 2, 3, 4, 5, 6]), (&[4, 5], ALL7), (&[3, 6], ALL7)];
            let pairs: [&[usize]; 7] = [&[7, 8], &[9, 10], &[11, 12], &[13, 14], &[15, 16], &[17, 18], &[19, 20]];
            steps.extend(pairs.into_iter().map(|p| (p, ALL7)));
            Schedule::from_numbers(&steps, t)
        }
        Family::L2FifteenByCcz => {
            let all4: &[usize] = &[0, 1, 2, 3];
            Schedule::from_numbers(&[(&[1, 2], all4), (&[3, 4], all4), (&[5, 6], all4), (&[7, 8], all4)], t)
        }
        Family::L2FifteenByFifteenSmall => {
            let singles: Vec<[usize; 1]> = (1..=15).map(|r| [r]).collect();
            let steps: Vec<(&[usize], &[usize])> = singles.iter().map(|r| (&r[..], ALL5)).collect();
            Schedule::from_numbers(&steps, t)
        }
        _ => {
            let pairs: [&[usize]; 8] = [
                &[1, 2],
                &[3, 4],
                &[5, 6],
                &[7, 8],
                &[9, 10],
                &[11, 12],
                &[13, 14],
                &[15],
            ];
            let steps: Vec<(&[usize], &[usize])> = pairs.into_iter().map(|p| (p, ALL5)).collect();
            Schedule::from_numbers(&steps, t)
        }
    }
}

/// Runs a schedule: faulty rotations, idle noise, consumption noise on the
/// outputs, then post-selection. Returns `(p_out, p_fail)`.
fn run_schedule<P, S>(
    circuit: &Circuit,
    schedule: &Schedule,
    profile: P,
    storage: S,
    consumption: f64,
) -> Result<(f64, f64), FactoryError>
where
    P: Fn(usize) -> Result<RotationErrorProfile, FactoryError>,
    S: Fn(usize) -> Result<StorageRates, FactoryError>,
{
    schedule.validate(circuit)?;
    let mut rho = DensityMatrix::init_plus(circuit.n)?;
    for step in &schedule.steps {
        for &r in &step.rotations {
            rho.apply_faulty_rotation(&circuit.rotations[r], &profile(r)?, &circuit.output_qubits)?;
        }
        for &q in &step.live {
            rho.apply_storage(q, &storage(q)?, step.storage_cycles)?;
        }
    }
    let consumed = StorageRates {
        px: consumption,
        pz: consumption,
    };
    for &q in &circuit.output_qubits {
        rho.apply_storage(q, &consumed, 1.0)?;
    }
    let p_fail = rho.project_plus(&circuit.check_qubits)?;
    let p_out = rho.infidelity_with_pure(&circuit.ideal_output)? / circuit.outputs as f64;
    Ok((p_out, p_fail))
}

/// Result of a level-1 block simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level1Outcome {
    pub p_out: f64,
    pub p_fail: f64,
    pub cycles: f64,
}

/// Simulates one 15-to-1 block with distances `d`.
pub fn simulate_level1(d: Distances, noise: &PhysicalNoise, small: bool) -> Result<Level1Outcome, FactoryError> {
    d.validate()?;
    noise.validate()?;
    let circuit = catalog(CircuitKind::FifteenToOne);
    let l = f64::from(d.dx + 4 * d.dz);
    let single = single_qubit_rotation_profile(noise, d.dz, d.dm)?;
    let multi_out = multiqubit_rotation_profile(noise, l, d.dx, d.dm, true)?;
    let multi = multiqubit_rotation_profile(noise, l, d.dx, d.dm, false)?;
    let output_rates = patch_storage_rates(noise, d.dx, d.dx)?;
    let check_rates = patch_storage_rates(noise, d.dx, d.dz)?;
    let (p_out, p_fail) = run_schedule(
        &circuit,
        &level1_schedule(d.dm, small),
        |r| {
            let rot = &circuit.rotations[r];
            Ok(if rot.axis.support().len() == 1 {
                single
            } else if rot.axis.support().contains(&0) {
                multi_out
            } else {
                multi
            })
        },
        |q| Ok(if q == 0 { output_rates } else { check_rates }),
        0.5 * logical_error_rate(noise.p_phys, d.dx)? * f64::from(d.dx),
    )?;
    if p_fail >= 1.0 {
        return Err(FactoryError::AlwaysFails(p_fail));
    }
    let base = if small { 12.0 } else { 6.0 } * f64::from(d.dm);
    Ok(Level1Outcome {
        p_out,
        p_fail,
        cycles: base / (1.0 - p_fail),
    })
}

/// Level-1 result for the config: the standard block for every two-level
/// family and the config's own block for level-1 families.
pub fn level1_output_error(config: &FactoryConfig) -> Result<Level1Outcome, FactoryError> {
    config.validate()?;
    simulate_level1(
        config.distances.level1,
        &config.noise,
        config.family == Family::L1FifteenToOneSmall,
    )
}

/// Cadence `t_L1` at which the level-2 block consumes level-1 states.
pub fn level2_cadence(config: &FactoryConfig, p_fail_l1: f64) -> Result<f64, FactoryError> {
    let d1 = config.distances.level1;
    let d2 = config.level2()?;
    let produce = 6.0 * f64::from(d1.dm) / (1.0 - p_fail_l1);
    Ok(if config.family == Family::L2FifteenByFifteenSmall {
        f64::max(2.0 * f64::from(d2.dm), produce)
    } else {
        f64::max(f64::from(d2.dm), produce / (f64::from(config.n_l1()?) / 2.0))
    })
}

fn level2_multiplier(family: Family) -> f64 {
    match family {
        Family::L2FifteenByFifteen => 7.5,
        Family::L2FifteenByTwenty => 10.0,
        Family::L2FifteenByCcz => 4.0,
        _ => 15.0,
    }
}

/// Physical qubits including measurement ancillas.
pub fn qubit_cost(config: &FactoryConfig) -> Result<u64, FactoryError> {
    config.validate()?;
    let d1 = config.distances.level1;
    let (dx, dz, dm) = (u64::from(d1.dx), u64::from(d1.dz), u64::from(d1.dm));
    let l1 = dx + 4 * dz;
    let level1_block = 2 * l1 * 3 * dx + 4 * dm;
    if !config.family.is_two_level() {
        return Ok(if config.family.is_small_footprint() {
            4 * l1 * dx + 2 * dm
        } else {
            level1_block
        });
    }
    let d2 = config.level2()?;
    let (dx2, dz2, dm2) = (u64::from(d2.dx), u64::from(d2.dz), u64::from(d2.dm));
    if config.family == Family::L2FifteenByFifteenSmall {
        return Ok(2 * (dx2 + 4 * dz2) * 2 * dx2 + level1_block + 2 * (4 * dm2 * dm2 + dm2 * dx2));
    }
    let width = match config.family {
        Family::L2FifteenByTwenty => 4 * dx2 + 3 * dz2,
        Family::L2FifteenByCcz => 3 * dx2 + dz2,
        _ => dx2 + 4 * dz2,
    };
    let n = u64::from(config.n_l1()?);
    Ok(2 * width * 3 * dx2 + n * (6 * l1 * dx + l1 * dm2 + 4 * dm) + 2 * (20 * dm2 * dm2 + 2 * dx2 * dm2))
}

/// Code cycles per round given the level-1 failure probability.
pub fn cycle_cost(config: &FactoryConfig, p_fail_l1: f64) -> Result<f64, FactoryError> {
    config.validate()?;
    if !(0.0..1.0).contains(&p_fail_l1) {
        return Err(FactoryError::AlwaysFails(p_fail_l1));
    }
    let dm = f64::from(config.distances.level1.dm);
    Ok(match config.family {
        Family::L1FifteenToOne => 6.0 * dm / (1.0 - p_fail_l1),
        Family::L1FifteenToOneSmall => 12.0 * dm / (1.0 - p_fail_l1),
        f => level2_multiplier(f) * level2_cadence(config, p_fail_l1)?,
    })
}

/// Size of the computation the full distance is chosen for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputationScale {
    /// 100 qubits, 231 distance-d patches.
    Qubits100,
    /// 10,000 qubits, 20,284 distance-d patches.
    Qubits10k,
}

impl ComputationScale {
    pub fn patches(self) -> f64 {
        match self {
            ComputationScale::Qubits100 => 231.0,
            ComputationScale::Qubits10k => 20284.0,
        }
    }
}

/// Smallest odd `d` with `patches·d·p_L(p, d) < 0.01·p_out`, or `None` when
/// no distance up to [`MAX_FULL_DISTANCE`] qualifies.
pub fn full_distance(p_out: f64, scale: ComputationScale, p_phys: f64) -> Option<u32> {
    if p_out.is_nan() || p_out <= 0.0 {
        return None;
    }
    (1..=MAX_FULL_DISTANCE).step_by(2).find(|&d| {
        logical_error_rate(p_phys, d)
            .map(|pl| scale.patches() * f64::from(d) * pl < 0.01 * p_out)
            .unwrap_or(false)
    })
}

/// [`full_distance`] with the error budget spread over the T gates each
/// output of `family` replaces.
pub fn family_full_distance(family: Family, p_out: f64, scale: ComputationScale, p_phys: f64) -> Option<u32> {
    full_distance(p_out / f64::from(family.t_gates_per_output()), scale, p_phys)
}

/// Space-time cost in units of `d³`, without measurement ancillas.
pub fn d3_cost(qubits: f64, cycles: f64, outputs: usize, d: u32) -> f64 {
    qubits * cycles / (2.0 * outputs as f64 * f64::from(d).powi(3))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoryReport {
    pub protocol: String,
    pub family: Family,
    pub p_phys: f64,
    pub c_t: f64,
    pub p_out: f64,
    pub p_fail_l1: f64,
    pub p_fail_l2: Option<f64>,
    pub p_l1: Option<f64>,
    pub qubits: u64,
    pub cycles: f64,
    pub outputs: usize,
    pub qubitcycles_per_state: f64,
    pub d_full_100: Option<u32>,
    pub cost_d3_100: Option<f64>,
    pub d_full_10k: Option<u32>,
    pub cost_d3_10k: Option<f64>,
}

pub fn simulate_factory(config: &FactoryConfig) -> Result<FactoryReport, FactoryError> {
    let level1 = level1_output_error(config)?;
    simulate_factory_with(config, &level1)
}

/// As [`simulate_factory`] with a precomputed (or hand-modified) level-1
/// result.
pub fn simulate_factory_with(config: &FactoryConfig, level1: &Level1Outcome) -> Result<FactoryReport, FactoryError> {
    config.validate()?;
    let (p_out, p_fail_l2) = if config.family.is_two_level() {
        let (p, f) = simulate_level2(config, level1)?;
        (p, Some(f))
    } else {
        (level1.p_out, None)
    };
    let qubits = qubit_cost(config)?;
    let cycles = cycle_cost(config, level1.p_fail)?;
    let outputs = config.family.outputs();
    let qubitcycles_per_state = qubits as f64 * cycles / outputs as f64;
    let p = config.noise.p_phys;
    let d_full_100 = family_full_distance(config.family, p_out, ComputationScale::Qubits100, p);
    let d_full_10k = family_full_distance(config.family, p_out, ComputationScale::Qubits10k, p);
    let cost = |d: Option<u32>| d.map(|d| d3_cost(qubits as f64, cycles, outputs, d));
    Ok(FactoryReport {
        protocol: config.protocol_label(),
        family: config.family,
        p_phys: p,
        c_t: config.noise.c_t,
        p_out,
        p_fail_l1: level1.p_fail,
        p_fail_l2,
        p_l1: config.family.is_two_level().then_some(level1.p_out),
        qubits,
        cycles,
        outputs,
        qubitcycles_per_state,
        d_full_100,
        cost_d3_100: cost(d_full_100),
        d_full_10k,
        cost_d3_10k: cost(d_full_10k),
    })
}

/// Ancilla length of level-2 rotations.
pub fn level2_ancilla_length(family: Family, d2: Distances) -> f64 {
    let (dx, dz, dm) = (f64::from(d2.dx), f64::from(d2.dz), f64::from(d2.dm));
    match family {
        Family::L2FifteenByCcz => 3.0 * dx + dz + dm,
        _ => dx + 4.0 * dz + dm,
    }
}

/// Length over which a level-1 state is moved to the level-2 block, in
/// lattice units, with the same `0.5·l·p_L(dm2)` weighting as an ancilla.
fn level2_move_length(config: &FactoryConfig) -> Result<f64, FactoryError> {
    let d1 = config.distances.level1;
    let dm2 = f64::from(config.level2()?.dm);
    Ok(if config.family == Family::L2FifteenByFifteenSmall {
        // 5·dm2·p_L expressed as a length.
        10.0 * dm2
    } else {
        f64::from(config.n_l1()?) / 4.0 * f64::from(d1.dx + 4 * d1.dz) + 10.0 * dm2
    })
}

fn simulate_level2(config: &FactoryConfig, level1: &Level1Outcome) -> Result<(f64, f64), FactoryError> {
    let d2 = config.level2()?;
    let noise = &config.noise;
    let circuit = catalog(config.family.top_circuit());
    let t = level2_cadence(config, level1.p_fail)?;
    let l = level2_ancilla_length(config.family, d2);
    let profile = level2_rotation_profile(noise, level1.p_out, l, d2.dx, d2.dm, level2_move_length(config)?, true)?;
    let output_rates = patch_storage_rates(noise, d2.dx, d2.dx)?;
    let check_rates = patch_storage_rates(noise, d2.dx, d2.dz)?;
    let outputs = circuit.output_qubits.clone();
    run_schedule(
        &circuit,
        &level2_schedule(config.family, t),
        |_| Ok(profile),
        |q| {
            Ok(if outputs.contains(&q) {
                output_rates
            } else {
                check_rates
            })
        },
        config.consumption.value() * f64::from(d2.dx) * logical_error_rate(noise.p_phys, d2.dx)?,
    )
}

/// Memo of level-1 results keyed by distances, noise and footprint.
#[derive(Debug, Default)]
pub struct Level1Cache {
    map: RwLock<HashMap<(Distances, u64, u64, bool), Level1Outcome>>,
}

impl Level1Cache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &self,
        d: Distances,
        noise: &PhysicalNoise,
        small: bool,
    ) -> Result<Level1Outcome, FactoryError> {
        let key = (d, noise.p_phys.to_bits(), noise.c_t.to_bits(), small);
        if let Some(hit) = self.map.read().expect("cache lock poisoned").get(&key) {
            return Ok(*hit);
        }
        let value = simulate_level1(d, noise, small)?;
        Ok(*self
            .map
            .write()
            .expect("cache lock poisoned")
            .entry(key)
            .or_insert(value))
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Candidate distances for a sweep; every combination that forms valid
/// distances is evaluated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub dx: Vec<u32>,
    pub dz: Vec<u32>,
    pub dm: Vec<u32>,
    #[serde(default)]
    pub dx2: Vec<u32>,
    #[serde(default)]
    pub dz2: Vec<u32>,
    #[serde(default)]
    pub dm2: Vec<u32>,
    #[serde(default)]
    pub n_l1: Vec<u32>,
}

fn distance_grid(dx: &[u32], dz: &[u32], dm: &[u32]) -> Vec<Distances> {
    let mut out = Vec::new();
    for &x in dx {
        for &z in dz {
            for &m in dm {
                if let Ok(d) = Distances::new(x, z, m) {
                    out.push(d);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All valid configurations of `family` within the ranges.
pub fn sweep_configs(family: Family, ranges: &SweepRanges, noise: PhysicalNoise) -> Vec<FactoryConfig> {
    let level1 = distance_grid(&ranges.dx, &ranges.dz, &ranges.dm);
    let level2: Vec<Option<Distances>> = if family.is_two_level() {
        distance_grid(&ranges.dx2, &ranges.dz2, &ranges.dm2)
            .into_iter()
            .map(Some)
            .collect()
    } else {
        vec![None]
    };
    let blocks: Vec<Option<u32>> = if family.needs_block_count() {
        ranges.n_l1.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut configs = Vec::new();
    for &d1 in &level1 {
        for &d2 in &level2 {
            for &n in &blocks {
                let c = FactoryConfig {
                    family,
                    distances: DistanceSet {
                        level1: d1,
                        level2: d2,
                        n_l1: n,
                    },
                    noise,
                    consumption: ConsumptionPrefactor::Half,
                };
                if c.validate().is_ok() {
                    configs.push(c);
                }
            }
        }
    }
    configs
}

/// Evaluates every configuration in parallel and keeps the Pareto-minimal
/// ones (in qubits and qubitcycles per state) that reach `target`.
pub fn sweep(
    family: Family,
    ranges: &SweepRanges,
    noise: PhysicalNoise,
    target: f64,
    cache: &Level1Cache,
) -> Result<Vec<FactoryReport>, FactoryError> {
    let configs = sweep_configs(family, ranges, noise);
    let evaluated: Vec<(FactoryConfig, FactoryReport)> = configs
        .par_iter()
        .map(|c| {
            let l1 = cache.get_or_compute(c.distances.level1, &c.noise, family == Family::L1FifteenToOneSmall)?;
            Ok((*c, simulate_factory_with(c, &l1)?))
        })
        .collect::<Result<Vec<_>, FactoryError>>()?;
    let feasible: Vec<&(FactoryConfig, FactoryReport)> = evaluated.iter().filter(|(_, r)| r.p_out <= target).collect();
    let mut front: Vec<(FactoryConfig, FactoryReport)> = feasible
        .iter()
        .filter(|(_, r)| {
            !feasible.iter().any(|(_, o)| {
                o.qubits <= r.qubits
                    && o.qubitcycles_per_state <= r.qubitcycles_per_state
                    && (o.qubits < r.qubits || o.qubitcycles_per_state < r.qubitcycles_per_state)
            })
        })
        .map(|pair| (*pair).clone())
        .collect();
    front.sort_by(|(ca, a), (cb, b)| {
        a.qubitcycles_per_state
            .total_cmp(&b.qubitcycles_per_state)
            .then(a.qubits.cmp(&b.qubits))
            .then(ca.distances.cmp(&cb.distances))
    });
    Ok(front.into_iter().map(|(_, r)| r).collect())
}
