//! Closed-form surface-code error model: logical error rate per code cycle,
//! storage rates of rectangular patches, and per-rotation error profiles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{RotationErrorProfile, SimError, StorageRates};

/// Threshold of the logical error rate model.
pub const THRESHOLD: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("physical error rate {0} is not in [0, {THRESHOLD})")]
    PhysicalRate(f64),
    #[error("T-measurement multiplier {0} must be positive")]
    Multiplier(f64),
    #[error("code distance {0} must be a positive odd integer")]
    Distance(u32),
    #[error("distances ({dx},{dz},{dm}) need dZ <= dX <= 3dm")]
    Shape { dx: u32, dz: u32, dm: u32 },
    #[error("patch height {dh} exceeds width {dx}")]
    PatchShape { dx: u32, dh: u32 },
    #[error("ancilla length {l} is shorter than dX = {dx}")]
    AncillaLength { l: f64, dx: u32 },
    #[error("level-1 block count {0} must be a positive even integer")]
    BlockCount(u32),
    #[error(transparent)]
    Profile(#[from] SimError),
}

/// Physical error rate and the multiplier applied to faulty T measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalNoise {
    pub p_phys: f64,
    pub c_t: f64,
}

impl PhysicalNoise {
    pub fn new(p_phys: f64, c_t: f64) -> Result<Self, NoiseError> {
        let n = Self { p_phys, c_t };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..THRESHOLD).contains(&self.p_phys) {
            return Err(NoiseError::PhysicalRate(self.p_phys));
        }
        if !(self.c_t > 0.0 && self.c_t.is_finite()) {
            return Err(NoiseError::Multiplier(self.c_t));
        }
        Ok(())
    }

    /// Weight of each of the three T-measurement Pauli errors.
    fn t_third(&self) -> f64 {
        self.c_t * self.p_phys / 3.0
    }
}

/// `0.1·(100 p)^((d+1)/2)`, the logical error rate per code cycle.
pub fn logical_error_rate(p_phys: f64, d: u32) -> Result<f64, NoiseError> {
    if !(0.0..THRESHOLD).contains(&p_phys) {
        return Err(NoiseError::PhysicalRate(p_phys));
    }
    if d == 0 {
        return Err(NoiseError::Distance(d));
    }
    Ok(0.1 * (100.0 * p_phys).powf(f64::from(d + 1) / 2.0))
}

/// Code distances of one distillation level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Distances {
    pub dx: u32,
    pub dz: u32,
    pub dm: u32,
}

impl Distances {
    pub fn new(dx: u32, dz: u32, dm: u32) -> Result<Self, NoiseError> {
        let d = Self { dx, dz, dm };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for d in [self.dx, self.dz, self.dm] {
            if d == 0 || d % 2 == 0 {
                return Err(NoiseError::Distance(d));
            }
        }
        if self.dz > self.dx || self.dx > 3 * self.dm {
            return Err(NoiseError::Shape {
                dx: self.dx,
                dz: self.dz,
                dm: self.dm,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Distances {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.dx, self.dz, self.dm)
    }
}

/// Storage rates of a `dX × dH` patch, where `dH` is the distance protecting
/// against Z errors.
pub fn patch_storage_rates(noise: &PhysicalNoise, dx: u32, dh: u32) -> Result<StorageRates, NoiseError> {
    if dh > dx {
        return Err(NoiseError::PatchShape { dx, dh });
    }
    let ratio = f64::from(dh) / f64::from(dx);
    Ok(StorageRates {
        px: 0.5 * ratio * logical_error_rate(noise.p_phys, dx)?,
        pz: 0.5 / ratio * logical_error_rate(noise.p_phys, dh)?,
    })
}

/// Faulty-T-measurement rotation through a lattice-surgery ancilla of length
/// `l` (in units of lattice sites) lasting `dm` cycles.
pub fn multiqubit_rotation_profile(
    noise: &PhysicalNoise,
    l: f64,
    dx: u32,
    dm: u32,
    involves_output: bool,
) -> Result<RotationErrorProfile, NoiseError> {
    if l < f64::from(dx) {
        return Err(NoiseError::AncillaLength { l, dx });
    }
    let t = noise.t_third();
    let dmf = f64::from(dm);
    let pl_m = logical_error_rate(noise.p_phys, dm)?;
    let measurement = 0.5 * pl_m * dmf;
    let ancilla_x = 0.5 * (l * f64::from(dx) / (dmf * dmf)) * pl_m * dmf;
    let p_z_output = if involves_output {
        0.5 * (l / f64::from(dx)) * logical_error_rate(noise.p_phys, dx)? * dmf
    } else {
        0.0
    };
    Ok(RotationErrorProfile::new(
        t + measurement,
        t,
        t + ancilla_x + measurement,
        p_z_output,
    )?)
}

/// Single-qubit faulty rotation performed with a `dZ × dm` patch.
pub fn single_qubit_rotation_profile(
    noise: &PhysicalNoise,
    dz: u32,
    dm: u32,
) -> Result<RotationErrorProfile, NoiseError> {
    let t = noise.t_third();
    let dmf = f64::from(dm);
    let dzf = f64::from(dz);
    Ok(RotationErrorProfile::new(
        t + 0.5 * (dmf * dmf / dzf) * logical_error_rate(noise.p_phys, dz)?,
        t,
        t + 0.5 * dzf * logical_error_rate(noise.p_phys, dm)?,
        0.0,
    )?)
}

/// Rotation of a second-level block that consumes a first-level magic state
/// with infidelity `p_l1`, moved over `l_move` sites.
pub fn level2_rotation_profile(
    noise: &PhysicalNoise,
    p_l1: f64,
    l: f64,
    dx2: u32,
    dm2: u32,
    l_move: f64,
    involves_output: bool,
) -> Result<RotationErrorProfile, NoiseError> {
    let pl_m = logical_error_rate(noise.p_phys, dm2)?;
    let dxf = f64::from(dx2);
    let dmf = f64::from(dm2);
    let moved = 0.5 * l_move * pl_m;
    let p_z_output = if involves_output {
        0.5 * (l * dmf / dxf) * logical_error_rate(noise.p_phys, dx2)?
    } else {
        0.0
    };
    Ok(RotationErrorProfile::new(
        p_l1 + moved,
        0.0,
        moved + 0.5 * (l * dxf / dmf) * pl_m,
        p_z_output,
    )?)
}
