//! Dense density-matrix engine for protocols of up to ten qubits.
//!
//! Entries are double-double complex numbers. The deepest two-level factories
//! reach infidelities around 1e-25, well below what `1 - F` can resolve in
//! plain `f64`, so the state is carried at roughly 32 significant digits and
//! only converted to `f64` when a probability is reported.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::pauli::{PauliAction, PauliError, PauliProduct, Rotation, MAX_QUBITS};
use crate::state::StateVector;

pub type Real = TwoFloat;
pub type Amp = Complex<TwoFloat>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("{what} = {value} is not a probability in [0, 1)")]
    Probability { what: &'static str, value: f64 },
    #[error("error probabilities sum to {0}, above 1")]
    ProfileTotal(f64),
    #[error("projection has zero success probability")]
    ZeroSuccess,
    #[error("qubit {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("state has {0} qubits, expected {1}")]
    DimensionMismatch(usize, usize),
}

fn real(x: f64) -> Real {
    TwoFloat::from(x)
}

fn zero() -> Amp {
    Complex::new(real(0.0), real(0.0))
}

fn to_c64(z: Amp) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

fn from_c64(z: Complex64) -> Amp {
    Complex::new(real(z.re), real(z.im))
}

/// Multiplies by `i^e` exactly.
fn times_i_pow(z: Amp, e: u8) -> Amp {
    match e % 4 {
        0 => z,
        1 => Complex::new(-z.im, z.re),
        2 => Complex::new(-z.re, -z.im),
        _ => Complex::new(z.im, -z.re),
    }
}

/// Cosine and sine of `k·π/8`, accurate to double-double precision.
pub fn cos_sin_pi8(k: i32) -> (Real, Real) {
    let two = real(2.0);
    let sqrt2 = two.sqrt();
    let h = sqrt2 / 2.0;
    let c1 = (two + sqrt2).sqrt() / 2.0;
    let s1 = (two - sqrt2).sqrt() / 2.0;
    let (o, l) = (real(1.0), real(0.0));
    let r = k.rem_euclid(16);
    let (c, s) = match r % 8 {
        0 => (o, l),
        1 => (c1, s1),
        2 => (h, h),
        3 => (s1, c1),
        4 => (l, o),
        5 => (-s1, c1),
        6 => (-h, h),
        _ => (-c1, s1),
    };
    if r >= 8 {
        (-c, -s)
    } else {
        (c, s)
    }
}

fn check_probability(what: &'static str, value: f64) -> Result<(), SimError> {
    if !(0.0..1.0).contains(&value) || value.is_nan() {
        return Err(SimError::Probability { what, value });
    }
    Ok(())
}

/// Probabilities of the three rotation errors and of the extra output Z flip.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RotationErrorProfile {
    /// Probability of a P_{π/2} error.
    pub p_half: f64,
    /// Probability of a P_{π/4} error.
    pub p_quarter: f64,
    /// Probability of a P_{−π/4} error.
    pub p_mquarter: f64,
    /// Z flip on each output qubit in the rotation's support.
    pub p_z_output: f64,
}

impl RotationErrorProfile {
    pub fn new(p_half: f64, p_quarter: f64, p_mquarter: f64, p_z_output: f64) -> Result<Self, SimError> {
        let p = Self {
            p_half,
            p_quarter,
            p_mquarter,
            p_z_output,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric Pauli noise on the injected state: `p/3` for each error.
    pub fn pauli(p: f64) -> Self {
        Self {
            p_half: p / 3.0,
            p_quarter: p / 3.0,
            p_mquarter: p / 3.0,
            p_z_output: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_probability("p_half", self.p_half)?;
        check_probability("p_quarter", self.p_quarter)?;
        check_probability("p_mquarter", self.p_mquarter)?;
        check_probability("p_z_output", self.p_z_output)?;
        let total = self.p_half + self.p_quarter + self.p_mquarter;
        if total > 1.0 {
            return Err(SimError::ProfileTotal(total));
        }
        Ok(())
    }
}

/// Per-cycle X and Z flip probabilities of an idle patch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StorageRates {
    pub px: f64,
    pub pz: f64,
}

/// Pure state in double-double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Amp>,
}

impl PureState {
    pub fn plus(n: usize) -> Self {
        let a = (real(1.0) / real((1u64 << n) as f64)).sqrt();
        Self {
            n,
            amps: vec![Complex::new(a, real(0.0)); 1 << n],
        }
    }

    /// `(|0> + e^{-iπ/4}|1>)/√2`, the state left by a Z_{−π/8} rotation on |+>.
    pub fn magic_tilde() -> Self {
        let h = real(2.0).sqrt() / 2.0;
        Self {
            n: 1,
            amps: vec![Complex::new(h, real(0.0)), Complex::new(real(0.5), -real(0.5))],
        }
    }

    /// `CCZ|+++>`.
    pub fn ccz() -> Self {
        let mut s = Self::plus(3);
        s.amps[7] = -s.amps[7];
        s
    }

    pub fn from_state_vector(v: &StateVector) -> Self {
        Self {
            n: v.n(),
            amps: v.amps().iter().copied().map(from_c64).collect(),
        }
    }

    pub fn to_state_vector(&self) -> StateVector {
        StateVector::from_amps(self.n, self.amps.iter().copied().map(to_c64).collect())
            .expect("dimension is consistent by construction")
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| *a * *b))
            .collect();
        PureState {
            n: self.n + other.n,
            amps,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Amp] {
        &self.amps
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    dim: usize,
    data: Vec<Amp>,
}

impl DensityMatrix {
    pub fn init_plus(n: usize) -> Result<Self, SimError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n).into());
        }
        let dim = 1usize << n;
        let v = Complex::new(real(1.0) / real(dim as f64), real(0.0));
        Ok(Self {
            n,
            dim,
            data: vec![v; dim * dim],
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let dim = psi.amps.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in &psi.amps {
            for b in &psi.amps {
                data.push(*a * b.conj());
            }
        }
        Self { n: psi.n, dim, data }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, SimError> {
        let mut rho = Self::init_plus(n)?;
        let w = real(1.0) / real(rho.dim as f64);
        for (i, z) in rho.data.iter_mut().enumerate() {
            *z = if i % (rho.dim + 1) == 0 {
                Complex::new(w, real(0.0))
            } else {
                zero()
            };
        }
        Ok(rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        to_c64(self.data[row * self.dim + col])
    }

    fn trace_dd(&self) -> Real {
        (0..self.dim)
            .map(|i| self.data[i * self.dim + i].re)
            .fold(real(0.0), |acc, x| acc + x)
    }

    pub fn trace(&self) -> f64 {
        f64::from(self.trace_dd())
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = self.get(r, c) - self.get(c, r).conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    /// `w·self + (1 - w)·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix, SimError> {
        if self.n != other.n {
            return Err(SimError::DimensionMismatch(other.n, self.n));
        }
        let w = real(w);
        let v = real(1.0) - w;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| *a * w + *b * v)
            .collect();
        Ok(Self {
            n: self.n,
            dim: self.dim,
            data,
        })
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| to_c64(*a - *b).norm())
            .fold(0.0, f64::max)
    }

    fn check_axis(&self, p: &PauliProduct) -> Result<(), SimError> {
        if p.len() != self.n {
            return Err(SimError::DimensionMismatch(p.len(), self.n));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n {
            return Err(SimError::QubitOutOfRange { index: q, n: self.n });
        }
        Ok(())
    }

    /// `ρ ← w_id·ρ + w_pp·PρP + w_left·Pρ + w_right·ρP`.
    fn combine(&mut self, act: PauliAction, w_id: Amp, w_pp: Amp, w_left: Amp, w_right: Amp) {
        let dim = self.dim;
        let m = act.flip;
        // e[x] is the exponent of i in the phase of P|x ^ m>, i.e. of (P)_{x, x^m}.
        let e: Vec<u8> = (0..dim).map(|x| act.phase_exponent(x ^ m)).collect();
        if m == 0 {
            // Diagonal axis: every term is a phase times ρ_ab itself.
            // (P)_{xx} = i^{e[x]}, so PρP, Pρ and ρP pick up i^{ea-eb}, i^{ea}, i^{eb}.
            let mut table = [[zero(); 4]; 4];
            for eb in 0..4u8 {
                for ea in 0..4u8 {
                    table[ea as usize][eb as usize] = w_id
                        + times_i_pow(w_pp, (ea + 4 - eb) % 4)
                        + times_i_pow(w_left, ea)
                        + times_i_pow(w_right, eb);
                }
            }
            for a in 0..dim {
                let row = &mut self.data[a * dim..(a + 1) * dim];
                let ta = &table[e[a] as usize];
                for (b, z) in row.iter_mut().enumerate() {
                    *z *= ta[e[b] as usize];
                }
            }
            return;
        }
        let old = self.data.clone();
        let is_zero = |w: &Amp| w.re == real(0.0) && w.im == real(0.0);
        let (skip_pp, skip_l, skip_r) = (is_zero(&w_pp), is_zero(&w_left), is_zero(&w_right));
        for a in 0..dim {
            let am = a ^ m;
            for b in 0..dim {
                let bm = b ^ m;
                let mut z = old[a * dim + b] * w_id;
                if !skip_pp {
                    // (PρP†)_{ab} = P_{a,am} ρ_{am,bm} conj(P_{b,bm})
                    let t = times_i_pow(old[am * dim + bm], (e[a] + 4 - e[b]) % 4);
                    z += t * w_pp;
                }
                if !skip_l {
                    z += times_i_pow(old[am * dim + b], e[a]) * w_left;
                }
                if !skip_r {
                    // (ρP)_{ab} = ρ_{a,bm} P_{bm,b}; P Hermitian so P_{bm,b} = conj(P_{b,bm}).
                    z += times_i_pow(old[a * dim + bm], (4 - e[b]) % 4) * w_right;
                }
                self.data[a * dim + b] = z;
            }
        }
    }

    /// Applies `Σ_j w_j·U_j ρ U_j†` with `U_j = cos θ_j − i sin θ_j·P`, given
    /// the pairs `(w_j, cos θ_j, sin θ_j)`.
    fn rotation_mixture(&mut self, axis: &PauliProduct, branches: &[(Real, Real, Real)]) {
        let (mut a, mut b, mut c) = (real(0.0), real(0.0), real(0.0));
        for &(w, cos, sin) in branches {
            a += w * cos * cos;
            b += w * sin * sin;
            c += w * cos * sin;
        }
        let re = |x: Real| Complex::new(x, real(0.0));
        // U ρ U† = c²ρ + s²PρP − i cs Pρ + i cs ρP
        self.combine(
            axis.action(),
            re(a),
            re(b),
            Complex::new(real(0.0), -c),
            Complex::new(real(0.0), c),
        );
    }

    /// Noiseless rotation.
    pub fn apply_rotation(&mut self, rot: &Rotation) -> Result<(), SimError> {
        self.check_axis(&rot.axis)?;
        let (c, s) = cos_sin_pi8(rot.angle.k());
        self.rotation_mixture(&rot.axis, &[(real(1.0), c, s)]);
        Ok(())
    }

    /// Conjugation by `exp(-i·axis·θ)` for an arbitrary angle.
    pub fn apply_angle(&mut self, axis: &PauliProduct, theta: f64) -> Result<(), SimError> {
        self.check_axis(axis)?;
        self.rotation_mixture(axis, &[(real(1.0), real(theta.cos()), real(theta.sin()))]);
        Ok(())
    }

    /// A π/8 rotation over-rotated by `excess` radians.
    pub fn apply_coherent_rotation(&mut self, axis: &PauliProduct, excess: f64) -> Result<(), SimError> {
        self.apply_angle(axis, std::f64::consts::FRAC_PI_8 + excess)
    }

    /// Faulty rotation: with the profile's probabilities the intended angle is
    /// shifted by π/2, π/4 or −π/4, then output qubits in the support take a
    /// Z flip. For a rotation with negative `k` the shifts are mirrored, so a
    /// P_{−π/8} becomes P_{−5π/8}, P_{−3π/8} or P_{π/8}.
    pub fn apply_faulty_rotation(
        &mut self,
        rot: &Rotation,
        profile: &RotationErrorProfile,
        output_qubits: &[usize],
    ) -> Result<(), SimError> {
        self.check_axis(&rot.axis)?;
        profile.validate()?;
        let k = rot.angle.k();
        let s = rot.angle.sign();
        let branch = |w: Real, k: i32| {
            let (c, sn) = cos_sin_pi8(k);
            (w, c, sn)
        };
        let w_ideal = real(1.0) - real(profile.p_half) - real(profile.p_quarter) - real(profile.p_mquarter);
        let mut branches = vec![branch(w_ideal, k)];
        for (w, shift) in [(profile.p_half, 4), (profile.p_quarter, 2), (profile.p_mquarter, -2)] {
            if w > 0.0 {
                branches.push(branch(real(w), k + s * shift));
            }
        }
        self.rotation_mixture(&rot.axis, &branches);
        if profile.p_z_output > 0.0 {
            let support = rot.axis.support();
            for &q in output_qubits.iter().filter(|q| support.contains(q)) {
                let z = PauliProduct::z_on(self.n, &[q])?;
                self.apply_pauli_channel(&z, profile.p_z_output)?;
            }
        }
        Ok(())
    }

    /// `ρ ← (1 − p)ρ + p·PρP`.
    pub fn apply_pauli_channel(&mut self, p: &PauliProduct, prob: f64) -> Result<(), SimError> {
        self.check_axis(p)?;
        check_probability("channel probability", prob)?;
        if prob == 0.0 {
            return Ok(());
        }
        let w = real(prob);
        let re = |x: Real| Complex::new(x, real(0.0));
        self.combine(p.action(), re(real(1.0) - w), re(w), zero(), zero());
        Ok(())
    }

    /// Idle noise on one qubit: independent X and Z channels with
    /// probabilities `cycles·px` and `cycles·pz`.
    pub fn apply_storage(&mut self, qubit: usize, rates: &StorageRates, cycles: f64) -> Result<(), SimError> {
        self.check_qubit(qubit)?;
        let px = rates.px * cycles;
        let pz = rates.pz * cycles;
        check_probability("storage X probability", px)?;
        check_probability("storage Z probability", pz)?;
        self.apply_pauli_channel(&PauliProduct::on(self.n, &[qubit], crate::pauli::Pauli::X)?, px)?;
        self.apply_pauli_channel(&PauliProduct::z_on(self.n, &[qubit])?, pz)?;
        Ok(())
    }

    /// Projects onto the `outcome` eigenspace of `p` without renormalising.
    pub fn project_pauli(&mut self, p: &PauliProduct, outcome: i8) -> Result<(), SimError> {
        self.check_axis(p)?;
        let q = real(0.25);
        let s = if outcome < 0 { -q } else { q };
        let re = |x: Real| Complex::new(x, real(0.0));
        self.combine(p.action(), re(q), re(q), re(s), re(s));
        Ok(())
    }

    /// Post-selects every check qubit on the X = +1 outcome. The state is
    /// renormalised in place and the rejection probability returned.
    pub fn project_plus(&mut self, check_qubits: &[usize]) -> Result<f64, SimError> {
        for &q in check_qubits {
            self.check_qubit(q)?;
            let x = PauliProduct::on(self.n, &[q], crate::pauli::Pauli::X)?;
            self.project_pauli(&x, 1)?;
        }
        let tr = self.trace_dd();
        if f64::from(tr) <= 1e-300 {
            return Err(SimError::ZeroSuccess);
        }
        let inv = real(1.0) / tr;
        self.data.iter_mut().for_each(|z| *z *= inv);
        Ok(f64::from(real(1.0) - tr).max(0.0))
    }

    fn overlap_dd(&self, psi: &PureState) -> Result<Real, SimError> {
        if psi.n != self.n {
            return Err(SimError::DimensionMismatch(psi.n, self.n));
        }
        let mut acc = zero();
        for (a, pa) in psi.amps.iter().enumerate() {
            let row = &self.data[a * self.dim..(a + 1) * self.dim];
            let mut inner = zero();
            for (z, pb) in row.iter().zip(&psi.amps) {
                inner += *z * *pb;
            }
            acc += pa.conj() * inner;
        }
        Ok(acc.re)
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64, SimError> {
        Ok(f64::from(self.overlap_dd(psi)?))
    }

    /// `1 − <ψ|ρ|ψ>/tr ρ`, evaluated before rounding to `f64` so that tiny
    /// infidelities keep their significant digits.
    pub fn infidelity_with_pure(&self, psi: &PureState) -> Result<f64, SimError> {
        let f = self.overlap_dd(psi)?;
        let tr = self.trace_dd();
        // Round-off can leave a value a few ulps below zero.
        Ok(f64::from((tr - f) / tr).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(s: &str) -> PauliProduct {
        s.parse().unwrap()
    }

    #[test]
    fn plus_state_entries() {
        let rho = DensityMatrix::init_plus(1).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(rho.get(r, c), Complex64::new(0.5, 0.0));
            }
        }
        let rho = DensityMatrix::init_plus(5).unwrap();
        assert_eq!(rho.dim(), 32);
        assert!((rho.get(7, 19).re - 1.0 / 32.0).abs() < 1e-18);
        assert!(DensityMatrix::init_plus(11).is_err());
    }

    #[test]
    fn trig_table_matches_libm() {
        for k in -20..20 {
            let (c, s) = cos_sin_pi8(k);
            let t = k as f64 * std::f64::consts::FRAC_PI_8;
            assert!((f64::from(c) - t.cos()).abs() < 1e-15, "k={k}");
            assert!((f64::from(s) - t.sin()).abs() < 1e-15, "k={k}");
            assert!(f64::from(c * c + s * s - real(1.0)).abs() < 1e-30);
        }
    }

    #[test]
    fn noiseless_rotation_gives_magic_tilde() {
        let mut rho = DensityMatrix::init_plus(1).unwrap();
        let rot = Rotation::new(pp("Z"), -1).unwrap();
        rho.apply_faulty_rotation(&rot, &RotationErrorProfile::default(), &[0])
            .unwrap();
        let f = rho.infidelity_with_pure(&PureState::magic_tilde()).unwrap();
        assert!(f.abs() < 1e-30);
    }

    #[test]
    fn half_turn_matches_deterministic_error() {
        let mut a = DensityMatrix::init_plus(1).unwrap();
        a.apply_coherent_rotation(&pp("Z"), std::f64::consts::FRAC_PI_2)
            .unwrap();
        assert!(RotationErrorProfile::new(1.0, 0.0, 0.0, 0.0).is_err());
        let mut b = DensityMatrix::init_plus(1).unwrap();
        b.apply_rotation(&Rotation::new(pp("Z"), 5).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn full_dephasing_mixes_plus() {
        let mut rho = DensityMatrix::init_plus(1).unwrap();
        rho.apply_storage(0, &StorageRates { px: 0.0, pz: 0.5 }, 1.0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(rho.max_abs_diff(&mixed) < 1e-30);
    }

    #[test]
    fn storage_bound_enforced() {
        let mut rho = DensityMatrix::init_plus(1).unwrap();
        let err = rho.apply_storage(0, &StorageRates { px: 0.1, pz: 0.0 }, 10.0);
        assert!(matches!(err, Err(SimError::Probability { .. })));
    }

    #[test]
    fn z_on_check_fails_projection() {
        let mut rho = DensityMatrix::init_plus(2).unwrap();
        rho.apply_pauli_channel(&pp("IZ"), 0.999_999).unwrap();
        let before = rho.clone();
        let p_fail = rho.project_plus(&[1]).unwrap();
        assert!((p_fail - 0.999_999).abs() < 1e-12);
        let mut certain = DensityMatrix::init_plus(2).unwrap();
        certain.apply_rotation(&Rotation::new(pp("IZ"), 4).unwrap()).unwrap();
        assert_eq!(certain.project_plus(&[1]), Err(SimError::ZeroSuccess));
        assert!(before.trace() > 0.99);
    }

    #[test]
    fn fidelity_with_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let f = rho.fidelity_with_pure(&PureState::ccz()).unwrap();
        assert!((f - 0.125).abs() < 1e-15);
        let pure = DensityMatrix::from_pure(&PureState::ccz());
        assert!((pure.fidelity_with_pure(&PureState::ccz()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_axis_matches_dense_conjugation() {
        let axis = pp("XYZ");
        let theta = 0.37;
        let mut rho = DensityMatrix::init_plus(3).unwrap();
        rho.apply_angle(&pp("ZIZ"), 0.2).unwrap();
        let before = rho.to_matrix();
        rho.apply_angle(&axis, theta).unwrap();
        let u = crate::pauli::rotation_matrix(&axis, theta).unwrap();
        let expected = &u * before * u.adjoint();
        assert!((rho.to_matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn x_projection_matches_dense_projector() {
        let mut rho = DensityMatrix::init_plus(2).unwrap();
        rho.apply_angle(&pp("YZ"), 0.4).unwrap();
        let before = rho.to_matrix();
        rho.project_pauli(&pp("XY"), -1).unwrap();
        let p = pp("XY").matrix().unwrap();
        let id = DMatrix::<Complex64>::identity(4, 4);
        let proj = (id - p) * Complex64::new(0.5, 0.0);
        let expected = &proj * before * &proj;
        assert!((rho.to_matrix() - expected).norm() < 1e-14);
    }
}
