//! Published reference rows for the factory families, used by the `table`
//! command and the regression suites.

use serde::Serialize;

use crate::factory::{DistanceSet, FactoryConfig, FactoryError, Family};
use crate::noise::{Distances, PhysicalNoise};

/// Relative band for simulated `p_out` against the published value.
pub const P_OUT_BAND: f64 = 0.30;
/// Relative band for cycle counts.
pub const CYCLES_BAND: f64 = 0.03;
/// Relative band for qubit counts (published values have 3 significant digits).
pub const QUBITS_BAND: f64 = 0.01;
/// Qubit band for the small-footprint two-level row.
pub const SMALL_TWO_LEVEL_QUBITS_BAND: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceTable {
    /// Faulty T measurements at rate `p_phys`.
    Table1,
    /// Faulty T measurements at rate `10·p_phys`.
    Table2,
}

impl ReferenceTable {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceTable::Table1 => "table1",
            ReferenceTable::Table2 => "table2",
        }
    }

    pub fn rows(self) -> &'static [ReferenceRow] {
        match self {
            ReferenceTable::Table1 => TABLE1,
            ReferenceTable::Table2 => TABLE2,
        }
    }
}

impl std::str::FromStr for ReferenceTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table1" | "1" => Ok(ReferenceTable::Table1),
            "table2" | "2" => Ok(ReferenceTable::Table2),
            _ => Err(format!("unknown table {s:?}; expected table1 or table2")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub family: Family,
    pub p_phys: f64,
    pub c_t: f64,
    pub level1: (u32, u32, u32),
    pub level2: Option<(u32, u32, u32)>,
    pub n_l1: Option<u32>,
    pub p_out: f64,
    pub qubits: f64,
    pub cycles: f64,
    pub qubitcycles: f64,
    pub d_full_100: u32,
    pub cost_d3_100: f64,
    pub d_full_10k: u32,
    pub cost_d3_10k: f64,
    /// Rows whose simulated `p_out` is held to [`P_OUT_BAND`]; the others are
    /// reported with their deviation only.
    pub banded: bool,
}

impl ReferenceRow {
    pub fn config(&self) -> Result<FactoryConfig, FactoryError> {
        let (x, z, m) = self.level1;
        let d1 = Distances::new(x, z, m)?;
        let distances = match self.level2 {
            None => DistanceSet::level1(d1),
            Some((x2, z2, m2)) => DistanceSet::two_level(d1, Distances::new(x2, z2, m2)?, self.n_l1),
        };
        FactoryConfig::new(self.family, distances, PhysicalNoise::new(self.p_phys, self.c_t)?)
    }

    pub fn outputs(&self) -> usize {
        self.family.outputs()
    }

    pub fn qubits_band(&self) -> f64 {
        if self.family == Family::L2FifteenByFifteenSmall {
            SMALL_TWO_LEVEL_QUBITS_BAND
        } else {
            QUBITS_BAND
        }
    }
}

#[allow(clippy::too_many_arguments)]
const fn row(
    family: Family,
    p_phys: f64,
    c_t: f64,
    level1: (u32, u32, u32),
    level2: Option<(u32, u32, u32)>,
    n_l1: Option<u32>,
    p_out: f64,
    qubits: f64,
    cycles: f64,
    qubitcycles: f64,
    full: (u32, f64, u32, f64),
    banded: bool,
) -> ReferenceRow {
    ReferenceRow {
        family,
        p_phys,
        c_t,
        level1,
        level2,
        n_l1,
        p_out,
        qubits,
        cycles,
        qubitcycles,
        d_full_100: full.0,
        cost_d3_100: full.1,
        d_full_10k: full.2,
        cost_d3_10k: full.3,
        banded,
    }
}

use Family::*;

pub static TABLE1: &[ReferenceRow] = &[
    row(
        L1FifteenToOne,
        1e-4,
        1.0,
        (7, 3, 3),
        None,
        None,
        4.4e-8,
        810.0,
        18.1,
        14_600.0,
        (11, 5.49, 13, 3.33),
        true,
    ),
    row(
        L1FifteenToOne,
        1e-4,
        1.0,
        (9, 3, 3),
        None,
        None,
        9.3e-10,
        1_150.0,
        18.1,
        20_700.0,
        (13, 4.71, 15, 3.07),
        true,
    ),
    row(
        L1FifteenToOne,
        1e-4,
        1.0,
        (11, 5, 5),
        None,
        None,
        1.9e-11,
        2_070.0,
        30.0,
        62_000.0,
        (15, 9.19, 17, 6.31),
        true,
    ),
    row(
        L2FifteenByTwenty,
        1e-4,
        1.0,
        (9, 3, 3),
        Some((15, 7, 9)),
        Some(4),
        2.4e-15,
        16_400.0,
        90.3,
        371_000.0,
        (19, 27.0, 21, 20.0),
        true,
    ),
    row(
        L2FifteenByFifteen,
        1e-4,
        1.0,
        (9, 3, 3),
        Some((25, 9, 9)),
        Some(4),
        6.3e-25,
        18_600.0,
        67.8,
        1_260_000.0,
        (29, 25.9, 31, 21.2),
        false,
    ),
    row(
        L1FifteenToOne,
        1e-3,
        1.0,
        (17, 7, 7),
        None,
        None,
        4.5e-8,
        4_620.0,
        42.6,
        197_000.0,
        (25, 6.30, 29, 4.04),
        true,
    ),
    row(
        L2FifteenByTwenty,
        1e-3,
        1.0,
        (13, 5, 5),
        Some((23, 11, 13)),
        Some(6),
        1.4e-10,
        43_300.0,
        130.0,
        1_410_000.0,
        (29, 28.9, 33, 19.6),
        false,
    ),
    row(
        L2FifteenByTwenty,
        1e-3,
        1.0,
        (13, 5, 5),
        Some((27, 13, 15)),
        Some(4),
        2.6e-11,
        46_800.0,
        157.0,
        1_840_000.0,
        (31, 30.9, 35, 21.5),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        1.0,
        (11, 5, 5),
        Some((25, 11, 11)),
        Some(6),
        2.7e-12,
        30_700.0,
        82.5,
        2_540_000.0,
        (33, 35.3, 37, 25.0),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        1.0,
        (13, 5, 5),
        Some((29, 11, 13)),
        Some(6),
        3.3e-14,
        39_100.0,
        97.5,
        3_810_000.0,
        (37, 37.6, 41, 27.7),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        1.0,
        (17, 7, 7),
        Some((41, 17, 17)),
        Some(6),
        4.5e-20,
        73_400.0,
        128.0,
        9_370_000.0,
        (49, 39.8, 53, 31.5),
        false,
    ),
    row(
        L1FifteenToOneSmall,
        1e-4,
        1.0,
        (9, 3, 3),
        None,
        None,
        1.5e-9,
        762.0,
        36.2,
        27_600.0,
        (13, 6.27, 15, 4.08),
        true,
    ),
    row(
        L2FifteenByFifteenSmall,
        1e-3,
        1.0,
        (9, 5, 5),
        Some((21, 9, 11)),
        None,
        6.1e-10,
        7_780.0,
        469.0,
        3_650_000.0,
        (29, 74.7, 33, 50.7),
        false,
    ),
    row(
        L2FifteenByCcz,
        1e-4,
        1.0,
        (7, 3, 3),
        Some((15, 7, 9)),
        Some(4),
        7.2e-14,
        12_400.0,
        36.1,
        447_000.0,
        (19, 32.6, 21, 24.1),
        false,
    ),
    row(
        L2FifteenByCcz,
        1e-3,
        1.0,
        (13, 7, 7),
        Some((25, 15, 15)),
        Some(6),
        5.2e-11,
        47_000.0,
        60.0,
        2_820_000.0,
        (31, 47.4, 35, 32.9),
        true,
    ),
];

pub static TABLE2: &[ReferenceRow] = &[
    row(
        L1FifteenToOne,
        1e-4,
        10.0,
        (9, 3, 3),
        None,
        None,
        2.1e-8,
        1_150.0,
        18.2,
        20_900.0,
        (13, 4.75, 15, 3.10),
        true,
    ),
    row(
        L2FifteenByTwenty,
        1e-4,
        10.0,
        (7, 3, 3),
        Some((13, 5, 7)),
        Some(6),
        1.4e-12,
        13_200.0,
        70.0,
        231_000.0,
        (17, 23.5, 19, 16.9),
        false,
    ),
    row(
        L2FifteenByTwenty,
        1e-4,
        10.0,
        (9, 3, 3),
        Some((15, 7, 9)),
        Some(4),
        6.6e-15,
        16_400.0,
        91.2,
        374_000.0,
        (19, 27.3, 21, 20.2),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-4,
        10.0,
        (9, 3, 3),
        Some((25, 9, 9)),
        Some(4),
        4.2e-22,
        18_600.0,
        68.4,
        1_270_000.0,
        (27, 32.4, 29, 26.1),
        false,
    ),
    row(
        L2FifteenByTwenty,
        1e-3,
        10.0,
        (13, 5, 5),
        Some((21, 11, 13)),
        Some(6),
        5.7e-9,
        40_700.0,
        130.0,
        1_325_000.0,
        (27, 33.7, 31, 22.2),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        10.0,
        (11, 5, 5),
        Some((21, 9, 11)),
        Some(6),
        2.1e-10,
        27_400.0,
        85.7,
        2_350_000.0,
        (29, 48.1, 33, 32.7),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        10.0,
        (11, 5, 5),
        Some((23, 11, 11)),
        Some(6),
        2.5e-11,
        29_500.0,
        85.7,
        2_530_000.0,
        (31, 42.5, 35, 29.5),
        false,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        10.0,
        (11, 5, 5),
        Some((25, 11, 11)),
        Some(6),
        6.4e-12,
        30_700.0,
        85.7,
        2_630_000.0,
        (33, 36.7, 37, 26.0),
        true,
    ),
    row(
        L2FifteenByFifteen,
        1e-3,
        10.0,
        (13, 7, 7),
        Some((29, 13, 13)),
        Some(8),
        1.5e-13,
        52_400.0,
        97.5,
        5_110_000.0,
        (35, 59.6, 39, 43.1),
        false,
    ),
];

/// Relative deviation `(value − reference)/reference`.
pub fn relative_deviation(value: f64, reference: f64) -> f64 {
    (value - reference) / reference
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_row_builds_a_valid_config() {
        for t in [ReferenceTable::Table1, ReferenceTable::Table2] {
            for r in t.rows() {
                r.config().unwrap();
            }
        }
        assert_eq!(TABLE1.len(), 15);
        assert_eq!(TABLE2.len(), 9);
    }

    #[test]
    fn published_qubitcycles_are_products() {
        for r in TABLE1.iter().chain(TABLE2) {
            let qc = r.qubits * r.cycles / r.outputs() as f64;
            assert!(relative_deviation(qc, r.qubitcycles).abs() < 0.01, "{r:?}");
        }
    }
}
