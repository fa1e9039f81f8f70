//! Pure state vectors, used for branch-wise gadget checks and error-set
//! enumeration where no mixing is involved.

use num_complex::Complex64;

use crate::pauli::{PauliError, PauliProduct, Rotation, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amps(n: usize, amps: Vec<Complex64>) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        if amps.len() != 1 << n {
            return Err(PauliError::LengthMismatch(amps.len(), 1 << n));
        }
        Ok(Self { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, PauliError> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_amps(n, amps)
    }

    pub fn plus(n: usize) -> Result<Self, PauliError> {
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        Self::from_amps(n, vec![Complex64::new(a, 0.0); 1 << n])
    }

    /// Single-qubit state `(|0> + e^{iφ}|1>)/√2`.
    pub fn equator(phi: f64) -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n: 1,
            amps: vec![Complex64::new(a, 0.0), Complex64::from_polar(a, phi)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVector {
            n: self.n + other.n,
            amps,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= norm);
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|²` for normalised inputs.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn check_len(&self, p: &PauliProduct) -> Result<(), PauliError> {
        if p.len() != self.n {
            return Err(PauliError::LengthMismatch(p.len(), self.n));
        }
        Ok(())
    }

    /// `P·ψ` for a Pauli product `P`.
    pub fn pauli_image(&self, p: &PauliProduct) -> Result<Vec<Complex64>, PauliError> {
        self.check_len(p)?;
        let act = p.action();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (x, a) in self.amps.iter().enumerate() {
            let (y, ph) = act.apply(x);
            out[y] = ph * a;
        }
        Ok(out)
    }

    pub fn apply_pauli(&mut self, p: &PauliProduct) -> Result<(), PauliError> {
        self.amps = self.pauli_image(p)?;
        Ok(())
    }

    /// Applies `exp(-i·axis·θ)`.
    pub fn apply_angle(&mut self, axis: &PauliProduct, theta: f64) -> Result<(), PauliError> {
        let image = self.pauli_image(axis)?;
        let c = theta.cos();
        let s = Complex64::new(0.0, -theta.sin());
        for (a, pa) in self.amps.iter_mut().zip(image) {
            *a = *a * c + pa * s;
        }
        Ok(())
    }

    pub fn apply_rotation(&mut self, r: &Rotation) -> Result<(), PauliError> {
        self.apply_angle(&r.axis, r.angle.radians())
    }

    /// Projects onto the `outcome` (±1) eigenspace of `p`, leaving the state
    /// unnormalised, and returns the outcome probability relative to the
    /// input norm.
    pub fn project(&mut self, p: &PauliProduct, outcome: i8) -> Result<f64, PauliError> {
        let before = self.norm_sqr();
        let image = self.pauli_image(p)?;
        let sign = f64::from(outcome.signum());
        for (a, pa) in self.amps.iter_mut().zip(image) {
            *a = (*a + pa * sign) * 0.5;
        }
        Ok(if before > 0.0 { self.norm_sqr() / before } else { 0.0 })
    }

    /// Contracts the last qubit with `<bra|`, returning the remaining state.
    pub fn contract_last(&self, bra: [Complex64; 2]) -> StateVector {
        let half = self.amps.len() / 2;
        let amps = (0..half)
            .map(|x| bra[0].conj() * self.amps[2 * x] + bra[1].conj() * self.amps[2 * x + 1])
            .collect();
        StateVector { n: self.n - 1, amps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_probability_of_plus_under_x() {
        let mut s = StateVector::plus(1).unwrap();
        let p = s.project(&"X".parse().unwrap(), 1).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let mut s = StateVector::plus(1).unwrap();
        let p = s.project(&"Z".parse().unwrap(), -1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn contract_recovers_product_factor() {
        let a = StateVector::equator(0.3);
        let b = StateVector::basis(1, 1).unwrap();
        let joint = a.kron(&b);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let back = joint.contract_last([zero, one]);
        assert!((back.fidelity(&a) - 1.0).abs() < 1e-15);
    }
}
