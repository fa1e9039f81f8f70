//! Distillation circuits written as sequences of commuting Z-type π/8
//! rotations, with checks of their algebraic properties and circuit-level
//! noise simulations.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{DensityMatrix, PureState, RotationErrorProfile, SimError};
use crate::pauli::{compose, distance_up_to_phase, CMatrix, PauliError, PauliProduct, Rotation};
use crate::state::StateVector;

/// Tolerance for "same operator up to global phase" and "same state".
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("unknown circuit kind {0:?}")]
    UnknownKind(String),
    #[error("invalid noise {0:?}; expected z:P, pauli:P or coherent:RADIANS")]
    NoiseSpec(String),
    #[error("noise parameter {0} outside [0, 0.1]")]
    NoiseRange(f64),
    #[error("order {order} exceeds the {rotations} rotations of the circuit")]
    Order { order: usize, rotations: usize },
    #[error("line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Identity16,
    FifteenToOne,
    TwentyToFour,
    Identity15FourQubit,
    EightToCcz,
    Ccz7,
}

impl CircuitKind {
    pub const ALL: [CircuitKind; 6] = [
        CircuitKind::Identity16,
        CircuitKind::FifteenToOne,
        CircuitKind::TwentyToFour,
        CircuitKind::Identity15FourQubit,
        CircuitKind::EightToCcz,
        CircuitKind::Ccz7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Identity16 => "identity16",
            CircuitKind::FifteenToOne => "15to1",
            CircuitKind::TwentyToFour => "20to4",
            CircuitKind::Identity15FourQubit => "identity15_4q",
            CircuitKind::EightToCcz => "8toccz",
            CircuitKind::Ccz7 => "ccz7",
        }
    }
}

impl fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CircuitKind {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "identity16" => CircuitKind::Identity16,
            "15to1" | "fifteen_to_one" | "15_to_1" => CircuitKind::FifteenToOne,
            "20to4" | "twenty_to_four" | "20_to_4" => CircuitKind::TwentyToFour,
            "identity15_4q" | "identity15" => CircuitKind::Identity15FourQubit,
            "8toccz" | "eight_to_ccz" | "8_to_ccz" => CircuitKind::EightToCcz,
            "ccz7" => CircuitKind::Ccz7,
            _ => return Err(CircuitError::UnknownKind(s.to_string())),
        };
        Ok(k)
    }
}

/// A rotation sequence with its post-selection checks and intended output.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub kind: CircuitKind,
    pub n: usize,
    pub rotations: Vec<Rotation>,
    /// Qubits measured in the X basis and post-selected on +1.
    pub check_qubits: Vec<usize>,
    /// Qubits carrying the distilled states.
    pub output_qubits: Vec<usize>,
    /// Number of magic states the output represents.
    pub outputs: usize,
    /// Noiseless state of all qubits after the rotations.
    pub ideal_output: PureState,
}

// Rotations as (sign, axis) with qubit 1 leftmost.
const FIFTEEN_TO_ONE: [(i32, &str); 15] = [
    (1, "IZIII"),
    (1, "IIZII"),
    (1, "IIIZI"),
    (1, "IIIIZ"),
    (1, "IZZZI"),
    (1, "ZZZII"),
    (1, "ZZIZI"),
    (1, "ZIZZI"),
    (1, "ZIIZZ"),
    (1, "ZIZIZ"),
    (1, "ZZIIZ"),
    (1, "ZZZZZ"),
    (1, "IZIZZ"),
    (1, "IIZZZ"),
    (1, "IZZIZ"),
];

const TWENTY_TO_FOUR: [(i32, &str); 20] = [
    (1, "IZIIZZI"),
    (1, "IIZIZZI"),
    (1, "IIIZZZI"),
    (1, "ZIIIZZI"),
    (1, "ZZIIZII"),
    (-1, "IIZZZII"),
    (1, "ZIIIZIZ"),
    (1, "IZIIZIZ"),
    (1, "IIZIZIZ"),
    (1, "IIIZZIZ"),
    (1, "ZZIIIZI"),
    (-1, "IIZZIZI"),
    (1, "ZIIIIZZ"),
    (1, "IZIIIZZ"),
    (1, "IIZIIZZ"),
    (1, "IIIZIZZ"),
    (1, "ZZIIIIZ"),
    (-1, "IIZZIIZ"),
    (1, "ZZIIZZZ"),
    (-1, "IIZZZZZ"),
];

const EIGHT_TO_CCZ: [(i32, &str); 8] = [
    (1, "IIIZ"),
    (-1, "ZIIZ"),
    (-1, "IZIZ"),
    (1, "ZZIZ"),
    (-1, "IIZZ"),
    (1, "ZIZZ"),
    (1, "IZZZ"),
    (-1, "ZZZZ"),
];

const CCZ7: [(i32, &str); 7] = [
    (-1, "ZII"),
    (-1, "IZI"),
    (-1, "IIZ"),
    (1, "ZZI"),
    (1, "ZIZ"),
    (1, "IZZ"),
    (-1, "ZZZ"),
];

fn rotations(list: &[(i32, &str)]) -> Vec<Rotation> {
    list.iter()
        .map(|(k, axis)| Rotation::new(axis.parse().expect("valid axis"), *k).expect("non-trivial axis"))
        .collect()
}

fn magic_outputs(count: usize, checks: usize) -> PureState {
    let m = PureState::magic_tilde();
    let mut s = m.clone();
    for _ in 1..count {
        s = s.kron(&m);
    }
    s.kron(&PureState::plus(checks))
}

/// Transcribed circuit of the given kind.
pub fn catalog(kind: CircuitKind) -> Circuit {
    match kind {
        CircuitKind::FifteenToOne => Circuit {
            kind,
            n: 5,
            rotations: rotations(&FIFTEEN_TO_ONE),
            check_qubits: vec![1, 2, 3, 4],
            output_qubits: vec![0],
            outputs: 1,
            ideal_output: magic_outputs(1, 4),
        },
        CircuitKind::Identity16 => {
            let mut rots = vec![Rotation::new("ZIIII".parse().expect("valid axis"), 1).expect("axis")];
            rots.extend(rotations(&FIFTEEN_TO_ONE));
            Circuit {
                kind,
                n: 5,
                rotations: rots,
                check_qubits: vec![],
                output_qubits: vec![],
                outputs: 1,
                ideal_output: PureState::plus(5),
            }
        }
        CircuitKind::TwentyToFour => Circuit {
            kind,
            n: 7,
            rotations: rotations(&TWENTY_TO_FOUR),
            check_qubits: vec![4, 5, 6],
            output_qubits: vec![0, 1, 2, 3],
            outputs: 4,
            ideal_output: magic_outputs(4, 3),
        },
        CircuitKind::Identity15FourQubit => {
            // Every non-zero column of F_2^4, odd weight positive.
            let rots = (1u32..16)
                .map(|c| {
                    let axis: String = (0..4).map(|q| if c >> (3 - q) & 1 == 1 { 'Z' } else { 'I' }).collect();
                    let k = if c.count_ones() % 2 == 1 { 1 } else { -1 };
                    Rotation::new(axis.parse().expect("valid axis"), k).expect("axis")
                })
                .collect();
            Circuit {
                kind,
                n: 4,
                rotations: rots,
                check_qubits: vec![],
                output_qubits: vec![],
                outputs: 1,
                ideal_output: PureState::plus(4),
            }
        }
        CircuitKind::EightToCcz => Circuit {
            kind,
            n: 4,
            rotations: rotations(&EIGHT_TO_CCZ),
            check_qubits: vec![3],
            output_qubits: vec![0, 1, 2],
            outputs: 1,
            ideal_output: PureState::ccz().kron(&PureState::plus(1)),
        },
        CircuitKind::Ccz7 => Circuit {
            kind,
            n: 3,
            rotations: rotations(&CCZ7),
            check_qubits: vec![],
            output_qubits: vec![0, 1, 2],
            outputs: 1,
            ideal_output: PureState::ccz(),
        },
    }
}

impl Circuit {
    /// Plain-text listing, one rotation per line: index, sign, axis.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "# {} qubits={} checks={:?} outputs={:?}\n",
            self.kind,
            self.n,
            one_based(&self.check_qubits),
            one_based(&self.output_qubits)
        );
        for (i, r) in self.rotations.iter().enumerate() {
            let sign = if r.angle.k() < 0 { '-' } else { '+' };
            out.push_str(&format!("{:>2} {} {}\n", i + 1, sign, r.axis));
        }
        out
    }
}

fn one_based(qs: &[usize]) -> Vec<usize> {
    qs.iter().map(|q| q + 1).collect()
}

/// Parses the listing written by [`Circuit::to_table`] back into rotations.
pub fn parse_table(text: &str) -> Result<Vec<Rotation>, CircuitError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (sign, axis) = match fields.as_slice() {
            [_, sign, axis] | [sign, axis] => (*sign, *axis),
            _ => {
                return Err(CircuitError::Table {
                    line: i + 1,
                    msg: "expected `[index] sign axis`".into(),
                })
            }
        };
        let k = match sign {
            "+" => 1,
            "-" => -1,
            other => {
                return Err(CircuitError::Table {
                    line: i + 1,
                    msg: format!("bad sign {other:?}"),
                })
            }
        };
        let axis: PauliProduct = axis.parse()?;
        out.push(Rotation::new(axis, k)?);
    }
    Ok(out)
}

/// True when both sequences compose to the same unitary up to global phase.
pub fn verify_equivalence(n: usize, a: &[Rotation], b: &[Rotation]) -> Result<bool, CircuitError> {
    let ua = compose(n, a)?;
    let ub = compose(n, b)?;
    Ok(distance_up_to_phase(&ua, &ub) < EQUIVALENCE_TOL)
}

/// Equivalence of two catalog circuits. When one circuit has extra trailing
/// check qubits, they are prepared in |+> and post-selected on <+| before the
/// comparison, so the reduced operator must be proportional to the other
/// circuit's unitary.
pub fn verify_circuit_equivalence(a: &Circuit, b: &Circuit) -> Result<bool, CircuitError> {
    let (big, small) = if a.n >= b.n { (a, b) } else { (b, a) };
    let extra = big.n - small.n;
    let trailing: Vec<usize> = (small.n..big.n).collect();
    if extra > 0 && big.check_qubits.iter().copied().sorted().collect::<Vec<_>>() != trailing {
        return Ok(false);
    }
    let u = compose(big.n, &big.rotations)?;
    let v = compose(small.n, &small.rotations)?;
    let dim = 1usize << small.n;
    let block = 1usize << extra;
    // <+|^m U |+>^m: average over all ancilla basis pairs.
    let w = 1.0 / block as f64;
    let reduced = CMatrix::from_fn(dim, dim, |r, c| {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for x in 0..block {
            for y in 0..block {
                acc += u[(r * block + x, c * block + y)];
            }
        }
        acc * w
    });
    let scale = ((reduced.adjoint() * &reduced).trace().re / dim as f64).sqrt();
    if scale < EQUIVALENCE_TOL {
        return Ok(false);
    }
    Ok(distance_up_to_phase(&(reduced / num_complex::Complex64::new(scale, 0.0)), &v) < EQUIVALENCE_TOL)
}

/// Counts subsets of `order` rotations whose P_{π/2} errors pass every check
/// yet change the output state.
pub fn undetected_error_sets(c: &Circuit, order: usize) -> Result<usize, CircuitError> {
    if order > c.rotations.len() {
        return Err(CircuitError::Order {
            order,
            rotations: c.rotations.len(),
        });
    }
    let ideal = c.ideal_output.to_state_vector();
    let checks: Vec<PauliProduct> = c
        .check_qubits
        .iter()
        .map(|&q| PauliProduct::on(c.n, &[q], crate::pauli::Pauli::X))
        .collect::<Result<_, _>>()?;
    let subsets: Vec<Vec<usize>> = (0..c.rotations.len()).combinations(order).collect();
    let hits = subsets
        .par_iter()
        .map(|subset| -> Result<bool, CircuitError> {
            let mut psi = StateVector::plus(c.n)?;
            for (i, r) in c.rotations.iter().enumerate() {
                let k = if subset.contains(&i) {
                    r.angle.k() + 4 * r.angle.sign()
                } else {
                    r.angle.k()
                };
                psi.apply_angle(&r.axis, k as f64 * std::f64::consts::FRAC_PI_8)?;
            }
            let mut pass = 1.0;
            for x in &checks {
                pass *= psi.project(x, 1)?;
            }
            if pass < 1.0 - EQUIVALENCE_TOL {
                return Ok(false);
            }
            psi.normalize();
            Ok(psi.fidelity(&ideal) < 1.0 - EQUIVALENCE_TOL)
        })
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(hits.into_iter().filter(|h| *h).count())
}

/// Circuit-level noise applied identically to every rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "value", rename_all = "snake_case")]
pub enum CircuitNoise {
    /// P_{π/2} error with probability `p`.
    ZOnly(f64),
    /// P_{π/2}, P_{π/4}, P_{−π/4} errors with probability `p/3` each.
    RandomPauli(f64),
    /// Every rotation over-rotated by this many radians.
    Coherent(f64),
}

impl FromStr for CircuitNoise {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CircuitError::NoiseSpec(s.to_string());
        let (model, value) = s.split_once(':').ok_or_else(bad)?;
        let v: f64 = value.trim().parse().map_err(|_| bad())?;
        match model.trim().to_ascii_lowercase().as_str() {
            "z" | "z_only" => Ok(CircuitNoise::ZOnly(v)),
            "pauli" | "random_pauli" => Ok(CircuitNoise::RandomPauli(v)),
            "coherent" => Ok(CircuitNoise::Coherent(v)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitOutcome {
    /// Infidelity of the accepted state divided by the number of outputs.
    pub p_out: f64,
    pub p_fail: f64,
}

pub fn simulate_circuit(c: &Circuit, noise: CircuitNoise) -> Result<CircuitOutcome, CircuitError> {
    let value = match noise {
        CircuitNoise::ZOnly(v) | CircuitNoise::RandomPauli(v) | CircuitNoise::Coherent(v) => v,
    };
    if !(0.0..=0.1).contains(&value.abs()) || (value < 0.0 && !matches!(noise, CircuitNoise::Coherent(_))) {
        return Err(CircuitError::NoiseRange(value));
    }
    let mut rho = DensityMatrix::init_plus(c.n)?;
    for r in &c.rotations {
        match noise {
            CircuitNoise::ZOnly(p) => {
                let prof = RotationErrorProfile::new(p, 0.0, 0.0, 0.0)?;
                rho.apply_faulty_rotation(r, &prof, &c.output_qubits)?;
            }
            CircuitNoise::RandomPauli(p) => {
                rho.apply_faulty_rotation(r, &RotationErrorProfile::pauli(p), &c.output_qubits)?;
            }
            CircuitNoise::Coherent(phi) => {
                let theta = f64::from(r.angle.sign()) * (r.angle.k().abs() as f64 * std::f64::consts::FRAC_PI_8 + phi);
                rho.apply_angle(&r.axis, theta)?;
            }
        }
    }
    let p_fail = rho.project_plus(&c.check_qubits)?;
    let infidelity = rho.infidelity_with_pure(&c.ideal_output)?;
    Ok(CircuitOutcome {
        p_out: infidelity / c.outputs as f64,
        p_fail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse() {
        for k in CircuitKind::ALL {
            assert_eq!(k.name().parse::<CircuitKind>().unwrap(), k);
        }
        assert!("16to2".parse::<CircuitKind>().is_err());
    }

    #[test]
    fn noise_parse() {
        assert_eq!("z:1e-4".parse::<CircuitNoise>().unwrap(), CircuitNoise::ZOnly(1e-4));
        assert_eq!(
            "pauli:0.001".parse::<CircuitNoise>().unwrap(),
            CircuitNoise::RandomPauli(1e-3)
        );
        assert!("x:1".parse::<CircuitNoise>().is_err());
        assert!("z".parse::<CircuitNoise>().is_err());
    }

    #[test]
    fn sizes() {
        let c = catalog(CircuitKind::FifteenToOne);
        assert_eq!((c.n, c.rotations.len()), (5, 15));
        let c = catalog(CircuitKind::TwentyToFour);
        assert_eq!((c.n, c.rotations.len(), c.outputs), (7, 20, 4));
        let c = catalog(CircuitKind::EightToCcz);
        assert_eq!((c.n, c.rotations.len(), c.check_qubits.clone()), (4, 8, vec![3]));
    }

    #[test]
    fn table_roundtrip() {
        for k in CircuitKind::ALL {
            let c = catalog(k);
            assert_eq!(parse_table(&c.to_table()).unwrap(), c.rotations);
        }
        assert!(parse_table("1 * ZZ").is_err());
    }

    #[test]
    fn order_bound() {
        let c = catalog(CircuitKind::Ccz7);
        assert!(undetected_error_sets(&c, 8).is_err());
    }

    #[test]
    fn noise_range_checked() {
        let c = catalog(CircuitKind::FifteenToOne);
        assert!(simulate_circuit(&c, CircuitNoise::ZOnly(0.5)).is_err());
        assert!(simulate_circuit(&c, CircuitNoise::ZOnly(-1e-3)).is_err());
    }

    #[test]
    fn identities_compose_to_identity() {
        for k in [CircuitKind::Identity16, CircuitKind::Identity15FourQubit] {
            let c = catalog(k);
            assert!(verify_equivalence(c.n, &c.rotations, &[]).unwrap(), "{k}");
        }
    }

    #[test]
    fn fifteen_to_one_is_single_inverse_rotation() {
        let c = catalog(CircuitKind::FifteenToOne);
        let target = Rotation::new("ZIIII".parse().unwrap(), -1).unwrap();
        assert!(verify_equivalence(5, &c.rotations, std::slice::from_ref(&target)).unwrap());
        assert!(!verify_equivalence(5, &c.rotations, &[target.inverse()]).unwrap());
    }

    #[test]
    fn ccz_sequences_prepare_ccz() {
        for k in [
            CircuitKind::Ccz7,
            CircuitKind::EightToCcz,
            CircuitKind::TwentyToFour,
            CircuitKind::FifteenToOne,
        ] {
            let c = catalog(k);
            let out = simulate_circuit(&c, CircuitNoise::ZOnly(0.0)).unwrap();
            assert!(out.p_out < 1e-28 && out.p_fail < 1e-28, "{k}: {out:?}");
        }
    }

    #[test]
    fn anchor_rotations() {
        let c = catalog(CircuitKind::FifteenToOne);
        assert_eq!(c.rotations[8].axis.to_string(), "ZIIZZ");
        let c = catalog(CircuitKind::TwentyToFour);
        assert!(c.rotations[..3].iter().all(|r| !r.axis.support().contains(&0)));
    }

    #[test]
    fn eight_to_ccz_matches_seven_rotation_ccz() {
        let a = catalog(CircuitKind::EightToCcz);
        let b = catalog(CircuitKind::Ccz7);
        assert!(verify_circuit_equivalence(&a, &b).unwrap());
        let mut flipped = b.clone();
        flipped.rotations[0] = flipped.rotations[0].inverse();
        assert!(!verify_circuit_equivalence(&a, &flipped).unwrap());
    }

    #[test]
    fn ccz7_is_diagonal_ccz() {
        let u = compose(3, &catalog(CircuitKind::Ccz7).rotations).unwrap();
        let mut ccz = CMatrix::identity(8, 8);
        ccz[(7, 7)] = -ccz[(7, 7)];
        assert!(distance_up_to_phase(&u, &ccz) < 1e-12);
    }

    #[test]
    fn weight_three_undetected_sets() {
        let c = catalog(CircuitKind::FifteenToOne);
        assert_eq!(undetected_error_sets(&c, 1).unwrap(), 0);
        assert_eq!(undetected_error_sets(&c, 2).unwrap(), 0);
        assert_eq!(undetected_error_sets(&c, 3).unwrap(), 35);
    }
}
