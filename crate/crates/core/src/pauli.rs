//! Pauli products and rotations by integer multiples of π/8.
//!
//! Qubit `q` (zero-based) is the `q`-th tensor factor from the left, so it maps
//! to bit `n - 1 - q` of a computational-basis index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used for verification-sized operators.
pub type CMatrix = DMatrix<Complex64>;

/// Largest qubit count for which dense operators are built.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),
    #[error("a Pauli product needs at least one qubit")]
    Empty,
    #[error("length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),
    #[error("{0} qubits exceeds the dense limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("rotation axis must contain a non-identity letter")]
    IdentityAxis,
    #[error("qubit {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

impl TryFrom<char> for Pauli {
    type Error = PauliError;

    fn try_from(c: char) -> Result<Self, Self::Error> {
        match c.to_ascii_uppercase() {
            'I' | '1' | '_' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PauliError::InvalidLetter(other)),
        }
    }
}

/// An n-qubit tensor product of single-qubit Paulis, without phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliProduct {
    letters: Vec<Pauli>,
}

impl PauliProduct {
    pub fn new(letters: Vec<Pauli>) -> Result<Self, PauliError> {
        if letters.is_empty() {
            return Err(PauliError::Empty);
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Result<Self, PauliError> {
        Self::new(vec![Pauli::I; n])
    }

    /// `pauli` on every listed qubit, identity elsewhere.
    pub fn on(n: usize, qubits: &[usize], pauli: Pauli) -> Result<Self, PauliError> {
        let mut letters = vec![Pauli::I; n];
        for &q in qubits {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { index: q, n });
            }
            letters[q] = pauli;
        }
        Self::new(letters)
    }

    pub fn z_on(n: usize, qubits: &[usize]) -> Result<Self, PauliError> {
        Self::on(n, qubits, Pauli::Z)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|p| *p == Pauli::I)
    }

    /// True when every letter is I or Z.
    pub fn is_z_type(&self) -> bool {
        self.letters.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn commutes(&self, other: &PauliProduct) -> Result<bool, PauliError> {
        if self.len() != other.len() {
            return Err(PauliError::LengthMismatch(self.len(), other.len()));
        }
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        Ok(clashes % 2 == 0)
    }

    /// Letter-wise product, dropping the phase.
    pub fn times(&self, other: &PauliProduct) -> Result<PauliProduct, PauliError> {
        if self.len() != other.len() {
            return Err(PauliError::LengthMismatch(self.len(), other.len()));
        }
        let a = self.action();
        let b = other.action();
        Ok(PauliProduct::from_masks(self.len(), a.flip ^ b.flip, a.sign ^ b.sign))
    }

    fn from_masks(n: usize, flip: usize, sign: usize) -> PauliProduct {
        let letters = (0..n)
            .map(|q| {
                let bit = 1 << (n - 1 - q);
                match (flip & bit != 0, sign & bit != 0) {
                    (false, false) => Pauli::I,
                    (true, false) => Pauli::X,
                    (true, true) => Pauli::Y,
                    (false, true) => Pauli::Z,
                }
            })
            .collect();
        PauliProduct { letters }
    }

    /// Dense matrix, qubit 0 as the leftmost Kronecker factor.
    pub fn matrix(&self) -> Result<CMatrix, PauliError> {
        let n = self.len();
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let dim = 1usize << n;
        let act = self.action();
        let mut m = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            let (y, phase) = act.apply(x);
            m[(y, x)] = phase;
        }
        Ok(m)
    }

    /// Bit-level description: `P|x> = phase(x) |x ^ flip>`.
    pub fn action(&self) -> PauliAction {
        let n = self.len();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut n_y = 0u8;
        for (q, p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.flips() {
                flip |= bit;
            }
            if p.signs() {
                sign |= bit;
            }
            if *p == Pauli::Y {
                n_y += 1;
            }
        }
        PauliAction {
            flip,
            sign,
            i_power: n_y % 4,
        }
    }
}

impl FromStr for PauliProduct {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Pauli::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        PauliProduct::new(letters)
    }
}

impl fmt::Display for PauliProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

/// Monomial form of a Pauli product acting on basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliAction {
    /// Bits flipped by X and Y letters.
    pub flip: usize,
    /// Bits whose value contributes a sign (Y and Z letters).
    pub sign: usize,
    /// Power of `i` contributed by the Y letters.
    pub i_power: u8,
}

impl PauliAction {
    /// Image index and phase of basis state `x`.
    pub fn apply(&self, x: usize) -> (usize, Complex64) {
        (x ^ self.flip, self.phase(x))
    }

    /// Phase exponent of `i`, in 0..4, picked up by basis state `x`.
    pub fn phase_exponent(&self, x: usize) -> u8 {
        let minus = (x & self.sign).count_ones() as u8 & 1;
        (self.i_power + 2 * minus) % 4
    }

    pub fn phase(&self, x: usize) -> Complex64 {
        match self.phase_exponent(x) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// Angle `k·π/8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationAngle(pub i32);

impl RotationAngle {
    pub const PI_8: RotationAngle = RotationAngle(1);
    pub const MINUS_PI_8: RotationAngle = RotationAngle(-1);

    pub fn k(self) -> i32 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 as f64 * std::f64::consts::FRAC_PI_8
    }

    pub fn negated(self) -> RotationAngle {
        RotationAngle(-self.0)
    }

    /// +1 or -1 following the sign of `k` (zero counts as positive).
    pub fn sign(self) -> i32 {
        if self.0 < 0 {
            -1
        } else {
            1
        }
    }
}

/// `exp(-i·axis·k·π/8)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    pub axis: PauliProduct,
    pub angle: RotationAngle,
}

impl Rotation {
    pub fn new(axis: PauliProduct, k: i32) -> Result<Self, PauliError> {
        if axis.is_identity() {
            return Err(PauliError::IdentityAxis);
        }
        Ok(Self {
            axis,
            angle: RotationAngle(k),
        })
    }

    pub fn n(&self) -> usize {
        self.axis.len()
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            axis: self.axis.clone(),
            angle: self.angle.negated(),
        }
    }

    pub fn unitary(&self) -> Result<CMatrix, PauliError> {
        rotation_matrix(&self.axis, self.angle.radians())
    }
}

/// `cos θ·I − i sin θ·P` for an arbitrary real angle.
pub fn rotation_matrix(axis: &PauliProduct, theta: f64) -> Result<CMatrix, PauliError> {
    let p = axis.matrix()?;
    let dim = p.nrows();
    let c = Complex64::new(theta.cos(), 0.0);
    let s = Complex64::new(0.0, -theta.sin());
    Ok(CMatrix::identity(dim, dim) * c + p * s)
}

/// Product `U_m ⋯ U_1` of a rotation sequence applied in list order.
pub fn compose(n: usize, rotations: &[Rotation]) -> Result<CMatrix, PauliError> {
    if n > MAX_QUBITS {
        return Err(PauliError::TooManyQubits(n));
    }
    let dim = 1usize << n;
    rotations.iter().try_fold(CMatrix::identity(dim, dim), |acc, r| {
        if r.n() != n {
            return Err(PauliError::LengthMismatch(r.n(), n));
        }
        Ok(r.unitary()? * acc)
    })
}

/// Largest entrywise deviation of `a` from `e^{iφ}·b`, minimised over the phase.
pub fn distance_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(s: &str) -> PauliProduct {
        s.parse().unwrap()
    }

    #[test]
    fn single_z_matrix() {
        let m = pp("Z").matrix().unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zz_is_diagonal_parity() {
        let m = pp("ZZ").matrix().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn identity_matrix() {
        let m = pp("II").matrix().unwrap();
        assert_eq!(m, CMatrix::identity(4, 4));
    }

    #[test]
    fn y_matrix_matches_convention() {
        let m = pp("Y").matrix().unwrap();
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn qubit_zero_is_leftmost_factor() {
        let m = pp("XI").matrix().unwrap();
        assert_eq!(m[(2, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn commutation_examples() {
        assert!(pp("ZZ").commutes(&pp("XX")).unwrap());
        assert!(!pp("ZI").commutes(&pp("XI")).unwrap());
        assert!(pp("ZZZ").commutes(&pp("XXI")).unwrap());
        assert!(pp("ZZ").commutes(&pp("XXX")).is_err());
    }

    #[test]
    fn too_many_qubits() {
        let p = PauliProduct::identity(11).unwrap();
        assert_eq!(p.matrix(), Err(PauliError::TooManyQubits(11)));
    }

    #[test]
    fn half_turn_is_pauli() {
        let u = Rotation::new(pp("Z"), 4).unwrap().unitary().unwrap();
        let expected = pp("Z").matrix().unwrap() * Complex64::new(0.0, -1.0);
        assert!((u - expected).norm() < 1e-12);
    }

    #[test]
    fn inverse_pair_cancels() {
        let r = Rotation::new(pp("ZZ"), 1).unwrap();
        let u = compose(2, &[r.clone(), r.inverse()]).unwrap();
        assert!((u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    fn phase_ratio_on_plus(k: i32) -> Complex64 {
        let u = Rotation::new(pp("Z"), k).unwrap().unitary().unwrap();
        let plus = nalgebra::DVector::from_element(2, Complex64::new(0.5f64.sqrt(), 0.0));
        let out = u * plus;
        out[1] / out[0]
    }

    #[test]
    fn pi_8_on_plus_gives_magic_state() {
        let expected = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((phase_ratio_on_plus(1) - expected).norm() < 1e-12);
    }

    #[test]
    fn minus_pi_8_on_plus_gives_conjugate_magic_state() {
        let expected = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!((phase_ratio_on_plus(-1) - expected).norm() < 1e-12);
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let p = pp("ixYz");
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!(p.support(), vec![1, 2, 3]);
        assert!("".parse::<PauliProduct>().is_err());
        assert_eq!("ZQ".parse::<PauliProduct>(), Err(PauliError::InvalidLetter('Q')));
    }

    #[test]
    fn product_drops_phase() {
        assert_eq!(pp("XZ").times(&pp("ZZ")).unwrap(), pp("YI"));
    }

    #[test]
    fn identity_axis_rejected() {
        assert_eq!(Rotation::new(pp("II"), 1), Err(PauliError::IdentityAxis));
    }
}
