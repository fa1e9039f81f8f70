//! Measurement-based gadgets that perform a P_{π/8} rotation by consuming a
//! magic state, checked branch by branch on pure states.
//!
//! Data qubits come first; ancillas are appended after them and are read out
//! last-first by contraction.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliError, PauliProduct};
use crate::state::StateVector;

/// Allowed deviation from the ideal map, in infidelity and in total branch
/// probability.
pub const GADGET_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GadgetError {
    #[error("unknown gadget {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Consumption,
    TMeasurement,
    DelayedChoice,
    AutoCorrected,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 4] = [
        GadgetKind::Consumption,
        GadgetKind::TMeasurement,
        GadgetKind::DelayedChoice,
        GadgetKind::AutoCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Consumption => "consumption",
            GadgetKind::TMeasurement => "t_measurement",
            GadgetKind::DelayedChoice => "delayed_choice",
            GadgetKind::AutoCorrected => "auto_corrected",
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GadgetKind {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| GadgetError::UnknownKind(s.to_string()))
    }
}

/// Which readout the delayed-choice gadget performs on its extra |+> qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayedChoice {
    /// Z readout: the rotation happens.
    On,
    /// X readout: nothing happens.
    Off,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn x_bra(outcome: i8) -> [Complex64; 2] {
    [c(FRAC_1_SQRT_2), c(f64::from(outcome) * FRAC_1_SQRT_2)]
}

fn z_bra(outcome: i8) -> [Complex64; 2] {
    if outcome > 0 {
        [c(1.0), c(0.0)]
    } else {
        [c(0.0), c(1.0)]
    }
}

/// `P` on the data followed by the given letters on the ancillas.
fn extend(p: &PauliProduct, ancillas: &str) -> Result<PauliProduct, PauliError> {
    format!("{p}{ancillas}").parse()
}

fn magic() -> StateVector {
    StateVector::equator(FRAC_PI_4)
}

fn zero() -> StateVector {
    StateVector::basis(1, 0).expect("one qubit")
}

fn plus() -> StateVector {
    StateVector::equator(0.0)
}

/// Measures `P⊗Z` against a magic state, then the magic qubit in X.
/// `outcomes = [m, x]`.
pub fn consumption(psi: &StateVector, p: &PauliProduct, outcomes: &[i8]) -> Result<StateVector, PauliError> {
    let mut s = psi.kron(&magic());
    s.project(&extend(p, "Z")?, outcomes[0])?;
    let mut data = s.contract_last(x_bra(outcomes[1]));
    if outcomes[0] < 0 {
        data.apply_angle(p, FRAC_PI_4)?;
    }
    if outcomes[1] < 0 {
        data.apply_pauli(p)?;
    }
    Ok(data)
}

/// Faulty T measurement: `P⊗Z` against |+>, a T gate on the ancilla with an
/// optional Pauli error just before it, then an X readout.
/// `outcomes = [m, x]`.
pub fn t_measurement(
    psi: &StateVector,
    p: &PauliProduct,
    injected: Option<Pauli>,
    outcomes: &[i8],
) -> Result<StateVector, PauliError> {
    let n = psi.n();
    let mut s = psi.kron(&plus());
    s.project(&extend(p, "Z")?, outcomes[0])?;
    if outcomes[0] < 0 {
        s.apply_pauli(&PauliProduct::on(n + 1, &[n], Pauli::X)?)?;
    }
    if let Some(e) = injected.filter(|e| *e != Pauli::I) {
        s.apply_pauli(&PauliProduct::on(n + 1, &[n], e)?)?;
    }
    s.apply_angle(&PauliProduct::z_on(n + 1, &[n])?, FRAC_PI_8)?;
    let mut data = s.contract_last(x_bra(outcomes[1]));
    if outcomes[1] < 0 {
        data.apply_pauli(p)?;
    }
    Ok(data)
}

/// `P⊗Z⊗Z` against a magic state and a |+> qubit whose later readout basis
/// decides whether the rotation happened. `outcomes = [m, readout, x]`.
pub fn delayed_choice(
    psi: &StateVector,
    p: &PauliProduct,
    choice: DelayedChoice,
    outcomes: &[i8],
) -> Result<StateVector, PauliError> {
    let mut s = psi.kron(&magic()).kron(&plus());
    s.project(&extend(p, "ZZ")?, outcomes[0])?;
    match choice {
        DelayedChoice::On => {
            let s = s.contract_last(z_bra(outcomes[1]));
            let mut data = s.contract_last(x_bra(outcomes[2]));
            if outcomes[0] * outcomes[1] < 0 {
                data.apply_angle(p, FRAC_PI_4)?;
            }
            if outcomes[2] < 0 {
                data.apply_pauli(p)?;
            }
            Ok(data)
        }
        DelayedChoice::Off => {
            let s = s.contract_last(x_bra(outcomes[1]));
            let mut data = s.contract_last(x_bra(outcomes[2]));
            if outcomes[1] < 0 {
                data.apply_pauli(p)?;
            }
            Ok(data)
        }
    }
}

/// Auto-corrected rotation: `P⊗Z_a` against a magic state, `Z_a⊗Y_b` with a
/// |0> qubit, X readout of the magic qubit, and a Z or X readout of `b`
/// chosen by the first outcome. `outcomes = [m1, m2, x, b]`.
pub fn auto_corrected(psi: &StateVector, p: &PauliProduct, outcomes: &[i8]) -> Result<StateVector, PauliError> {
    let n = psi.n();
    let mut s = psi.kron(&magic()).kron(&zero());
    s.project(&extend(p, "ZI")?, outcomes[0])?;
    let mut zy = vec![Pauli::I; n];
    zy.extend([Pauli::Z, Pauli::Y]);
    s.project(&PauliProduct::new(zy)?, outcomes[1])?;
    let (m1, m2, x, b) = (outcomes[0], outcomes[1], outcomes[2], outcomes[3]);
    let s = if m1 > 0 {
        s.contract_last(z_bra(b))
    } else {
        s.contract_last(x_bra(b))
    };
    let mut data = s.contract_last(x_bra(x));
    let flip = if m1 > 0 { x * b < 0 } else { x * b * m2 < 0 };
    if flip {
        data.apply_pauli(p)?;
    }
    Ok(data)
}

/// Outcome of a branch-wise gadget check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub kind: GadgetKind,
    /// Branches with non-negligible probability, summed over test cases.
    pub branches: usize,
    /// Largest `1 − |<ideal|out>|²` over all branches.
    pub max_infidelity: f64,
    /// Largest deviation of the summed branch probabilities from one.
    pub max_probability_error: f64,
    pub passed: bool,
}

fn outcome_tuples(len: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u32 << len).map(move |bits| (0..len).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
}

fn random_state(rng: &mut StdRng, n: usize) -> StateVector {
    let amps = (0..1 << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amps(n, amps).expect("small register");
    s.normalize();
    s
}

/// Data states and rotation axes the gadgets are checked against.
fn test_cases(seed: u64) -> Vec<(StateVector, PauliProduct)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for axis in ["Z", "X", "Y"] {
        let p: PauliProduct = axis.parse().expect("axis");
        for s in [
            StateVector::basis(1, 0).expect("basis"),
            StateVector::basis(1, 1).expect("basis"),
            plus(),
            random_state(&mut rng, 1),
        ] {
            cases.push((s, p.clone()));
        }
    }
    for axis in ["ZZ", "XY", "ZX"] {
        let p: PauliProduct = axis.parse().expect("axis");
        for _ in 0..3 {
            cases.push((random_state(&mut rng, 2), p.clone()));
        }
        cases.push((StateVector::plus(2).expect("plus"), p.clone()));
    }
    cases
}

/// Runs `gadget` over every outcome tuple of length `len` and compares each
/// branch with `ideal`.
fn check_branches<G, I>(
    kind: GadgetKind,
    len: usize,
    seed: u64,
    gadget: G,
    ideal: I,
) -> Result<GadgetReport, PauliError>
where
    G: Fn(&StateVector, &PauliProduct, &[i8]) -> Result<StateVector, PauliError>,
    I: Fn(&StateVector, &PauliProduct) -> Result<StateVector, PauliError>,
{
    let mut branches = 0;
    let mut max_infidelity: f64 = 0.0;
    let mut max_probability_error: f64 = 0.0;
    for (psi, p) in test_cases(seed) {
        let target = ideal(&psi, &p)?;
        let mut total = 0.0;
        for outcomes in outcome_tuples(len) {
            let mut out = gadget(&psi, &p, &outcomes)?;
            let prob = out.norm_sqr();
            total += prob;
            if prob < 1e-14 {
                continue;
            }
            branches += 1;
            out.normalize();
            max_infidelity = max_infidelity.max(1.0 - out.fidelity(&target));
        }
        max_probability_error = max_probability_error.max((total - 1.0).abs());
    }
    Ok(GadgetReport {
        kind,
        branches,
        max_infidelity,
        max_probability_error,
        passed: max_infidelity < GADGET_TOL && max_probability_error < GADGET_TOL,
    })
}

fn rotated(psi: &StateVector, p: &PauliProduct, theta: f64) -> Result<StateVector, PauliError> {
    let mut s = psi.clone();
    s.apply_angle(p, theta)?;
    Ok(s)
}

const SEED: u64 = 0x05ee_d0f7;

/// Branch-wise check of a gadget against the ideal P_{π/8} rotation. The
/// delayed-choice gadget is checked in both readout settings, the "off" one
/// against the identity.
pub fn check_gadget(kind: GadgetKind) -> Result<GadgetReport, GadgetError> {
    let pi8 = |psi: &StateVector, p: &PauliProduct| rotated(psi, p, FRAC_PI_8);
    let report = match kind {
        GadgetKind::Consumption => check_branches(kind, 2, SEED, consumption, pi8)?,
        GadgetKind::TMeasurement => check_branches(kind, 2, SEED, |psi, p, o| t_measurement(psi, p, None, o), pi8)?,
        GadgetKind::AutoCorrected => check_branches(kind, 4, SEED, auto_corrected, pi8)?,
        GadgetKind::DelayedChoice => {
            let on = check_branches(
                kind,
                3,
                SEED,
                |psi, p, o| delayed_choice(psi, p, DelayedChoice::On, o),
                pi8,
            )?;
            let off = check_branches(
                kind,
                3,
                SEED,
                |psi, p, o| delayed_choice(psi, p, DelayedChoice::Off, o),
                |psi, _| Ok(psi.clone()),
            )?;
            GadgetReport {
                kind,
                branches: on.branches + off.branches,
                max_infidelity: on.max_infidelity.max(off.max_infidelity),
                max_probability_error: on.max_probability_error.max(off.max_probability_error),
                passed: on.passed && off.passed,
            }
        }
    };
    Ok(report)
}

pub fn verify_gadget(kind: GadgetKind) -> bool {
    check_gadget(kind).map(|r| r.passed).unwrap_or(false)
}

/// Extra rotation angle a Pauli error on the T-measurement ancilla leaves on
/// the data: X gives S†, Y gives S and Z gives the Pauli itself.
pub fn t_measurement_error_angle(error: Pauli) -> f64 {
    match error {
        Pauli::I => 0.0,
        Pauli::X => -FRAC_PI_4,
        Pauli::Y => FRAC_PI_4,
        Pauli::Z => 2.0 * FRAC_PI_4,
    }
}

/// Checks that a T measurement with `error` injected before the T gate acts
/// as P_{π/8} followed by the rotation given by [`t_measurement_error_angle`].
pub fn check_t_measurement_error(error: Pauli) -> Result<GadgetReport, GadgetError> {
    let extra = t_measurement_error_angle(error);
    Ok(check_branches(
        GadgetKind::TMeasurement,
        2,
        SEED,
        |psi, p, o| t_measurement(psi, p, Some(error), o),
        |psi, p| rotated(psi, p, FRAC_PI_8 + extra),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_gadgets_pass() {
        for k in GadgetKind::ALL {
            let r = check_gadget(k).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.branches > 0);
        }
    }

    #[test]
    fn consumption_on_plus_gives_magic_state() {
        let plus = plus();
        let z: PauliProduct = "Z".parse().unwrap();
        for o in outcome_tuples(2) {
            let mut out = consumption(&plus, &z, &o).unwrap();
            out.normalize();
            assert!((out.fidelity(&magic()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn injected_errors_give_cliffords() {
        for e in [Pauli::X, Pauli::Y, Pauli::Z] {
            assert!(check_t_measurement_error(e).unwrap().passed, "{e:?}");
        }
        // The uncorrected map must not pass as a clean rotation.
        let bad = check_branches(
            GadgetKind::TMeasurement,
            2,
            SEED,
            |psi, p, o| t_measurement(psi, p, Some(Pauli::X), o),
            |psi, p| rotated(psi, p, FRAC_PI_8),
        )
        .unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn missing_correction_is_caught() {
        let r = check_branches(
            GadgetKind::Consumption,
            2,
            SEED,
            |psi, p, o| {
                let mut s = psi.kron(&magic());
                s.project(&extend(p, "Z")?, o[0])?;
                Ok(s.contract_last(x_bra(o[1])))
            },
            |psi, p| rotated(psi, p, FRAC_PI_8),
        )
        .unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn names_parse() {
        for k in GadgetKind::ALL {
            assert_eq!(k.name().parse::<GadgetKind>().unwrap(), k);
        }
        assert!("teleport".parse::<GadgetKind>().is_err());
    }
}
