use msd_core::factory::*;
use msd_core::noise::{logical_error_rate, Distances, PhysicalNoise};
use msd_core::reference::{relative_deviation, ReferenceRow, TABLE1, TABLE2};

fn d(x: u32, z: u32, m: u32) -> Distances {
    Distances::new(x, z, m).unwrap()
}

fn noise(p: f64) -> PhysicalNoise {
    PhysicalNoise::new(p, 1.0).unwrap()
}

fn with_noise(c: &FactoryConfig, p: f64, c_t: f64) -> FactoryConfig {
    FactoryConfig {
        noise: PhysicalNoise::new(p, c_t).unwrap(),
        ..*c
    }
}

fn row_with(rows: &[ReferenceRow], family: Family, level1: (u32, u32, u32)) -> ReferenceRow {
    *rows.iter().find(|r| r.family == family && r.level1 == level1).unwrap()
}

#[test]
fn qubit_formulas_reproduce_published_counts() {
    let exact = [
        ((Family::L1FifteenToOne, (7, 3, 3)), 810),
        ((Family::L1FifteenToOne, (9, 3, 3)), 1146),
        ((Family::L1FifteenToOne, (11, 5, 5)), 2066),
        ((Family::L1FifteenToOneSmall, (9, 3, 3)), 762),
    ];
    for ((family, l1), q) in exact {
        let r = row_with(TABLE1, family, l1);
        assert_eq!(qubit_cost(&r.config().unwrap()).unwrap(), q);
    }
    let two_level = [(3, 16_410), (4, 18_630), (13, 12_384)];
    for (i, q) in two_level {
        assert_eq!(qubit_cost(&TABLE1[i].config().unwrap()).unwrap(), q);
    }
}

#[test]
fn qubit_counts_within_rounding_of_every_row() {
    for r in TABLE1.iter().chain(TABLE2) {
        let q = qubit_cost(&r.config().unwrap()).unwrap() as f64;
        assert!(relative_deviation(q, r.qubits).abs() <= r.qubits_band(), "{r:?}: {q}");
    }
}

#[test]
fn base_cycles_without_failures() {
    let cases = [
        (Family::L1FifteenToOne, (7, 3, 3), 18.0),
        (Family::L1FifteenToOne, (11, 5, 5), 30.0),
        (Family::L1FifteenToOneSmall, (9, 3, 3), 36.0),
    ];
    for (family, l1, cycles) in cases {
        let c = row_with(TABLE1, family, l1).config().unwrap();
        assert_eq!(cycle_cost(&c, 0.0).unwrap(), cycles);
    }
}

#[test]
fn simulated_cycles_within_three_percent() {
    for r in TABLE1.iter().chain(TABLE2) {
        let report = simulate_factory(&r.config().unwrap()).unwrap();
        assert!(
            relative_deviation(report.cycles, r.cycles).abs() <= 0.03,
            "{}: {}",
            report.protocol,
            report.cycles
        );
    }
}

#[test]
fn full_distance_examples() {
    assert_eq!(full_distance(4.4e-8, ComputationScale::Qubits100, 1e-4), Some(11));
    assert_eq!(full_distance(9.3e-10, ComputationScale::Qubits10k, 1e-4), Some(15));
    assert_eq!(full_distance(4.5e-8, ComputationScale::Qubits100, 1e-3), Some(25));
    assert_eq!(full_distance(0.0, ComputationScale::Qubits100, 1e-3), None);
    assert_eq!(full_distance(1e-300, ComputationScale::Qubits10k, 9e-3), None);
}

#[test]
fn full_distance_is_smallest_satisfying_odd_distance() {
    for r in TABLE1.iter().chain(TABLE2) {
        for (scale, expected) in [
            (ComputationScale::Qubits100, r.d_full_100),
            (ComputationScale::Qubits10k, r.d_full_10k),
        ] {
            let d = family_full_distance(r.family, r.p_out, scale, r.p_phys).unwrap();
            assert_eq!(d, expected, "{r:?}");
            let budget = 0.01 * r.p_out / f64::from(r.family.t_gates_per_output());
            let lhs = |d: u32| scale.patches() * f64::from(d) * logical_error_rate(r.p_phys, d).unwrap();
            assert!(lhs(d) < budget);
            assert!(lhs(d - 2) >= budget);
        }
    }
}

#[test]
fn d3_costs_from_published_columns() {
    for r in TABLE1.iter().chain(TABLE2) {
        for (dist, cost) in [(r.d_full_100, r.cost_d3_100), (r.d_full_10k, r.cost_d3_10k)] {
            let c = d3_cost(r.qubits, r.cycles, r.outputs(), dist);
            assert!(relative_deviation(c, cost).abs() < 0.01, "{r:?}: {c}");
        }
    }
}

#[test]
fn report_products_are_consistent() {
    for r in TABLE1 {
        let rep = simulate_factory(&r.config().unwrap()).unwrap();
        let qc = rep.qubits as f64 * rep.cycles / rep.outputs as f64;
        assert!((rep.qubitcycles_per_state / qc - 1.0).abs() < 1e-12);
        assert!((0.0..1.0).contains(&rep.p_out) && (0.0..1.0).contains(&rep.p_fail_l1));
        if let Some(f) = rep.p_fail_l2 {
            assert!((0.0..1.0).contains(&f));
        }
    }
}

#[test]
fn zero_noise_gives_perfect_outputs() {
    for r in TABLE1 {
        let c = with_noise(&r.config().unwrap(), 0.0, 1.0);
        let rep = simulate_factory(&c).unwrap();
        assert_eq!(rep.p_out, 0.0, "{}", rep.protocol);
        assert_eq!(rep.p_fail_l1, 0.0);
        assert_eq!(rep.cycles, cycle_cost(&c, 0.0).unwrap());
        assert_eq!(rep.d_full_100, None);
    }
}

#[test]
fn output_error_grows_with_physical_error_rate() {
    for family in Family::ALL {
        let rows: Vec<&ReferenceRow> = TABLE1.iter().chain(TABLE2).filter(|r| r.family == family).collect();
        for r in rows.iter().take(3) {
            let c = r.config().unwrap();
            let mut last = 0.0;
            for p in [1e-5, 1e-4, 3e-4, 1e-3] {
                let out = simulate_factory(&with_noise(&c, p, r.c_t)).unwrap().p_out;
                assert!(out >= last, "{family} {p}: {out} < {last}");
                last = out;
            }
        }
    }
}

#[test]
fn ten_times_worse_t_measurements_never_help() {
    for r in TABLE1 {
        let c = r.config().unwrap();
        let base = simulate_factory(&c).unwrap().p_out;
        let worse = simulate_factory(&with_noise(&c, r.p_phys, 10.0)).unwrap().p_out;
        assert!(worse > base, "{r:?}");
    }
}

#[test]
fn perfect_level1_states_lower_two_level_output() {
    for r in TABLE1.iter().filter(|r| r.family.is_two_level()) {
        let c = r.config().unwrap();
        let l1 = level1_output_error(&c).unwrap();
        let full = simulate_factory_with(&c, &l1).unwrap().p_out;
        let clean = simulate_factory_with(&c, &Level1Outcome { p_out: 0.0, ..l1 })
            .unwrap()
            .p_out;
        assert!(clean < full, "{r:?}");
    }
}

#[test]
fn level1_output_matches_standalone_block() {
    // The level-1 block of (15-to-1)^4_{13,5,5} x (20-to-4)_{27,13,15} gives ~1e-6.
    let l1 = simulate_level1(d(13, 5, 5), &noise(1e-3), false).unwrap();
    assert!(l1.p_out > 1e-7 && l1.p_out < 1e-5, "{l1:?}");
    assert_eq!(simulate_level1(d(9, 3, 3), &noise(0.0), false).unwrap().p_out, 0.0);
}

#[test]
fn full_consumption_prefactor_is_worse() {
    let c = TABLE1[4].config().unwrap();
    let half = simulate_factory(&c).unwrap().p_out;
    let full = simulate_factory(&FactoryConfig {
        consumption: ConsumptionPrefactor::Full,
        ..c
    })
    .unwrap()
    .p_out;
    assert!(full > half);
}

fn l1_ranges() -> SweepRanges {
    SweepRanges {
        dx: vec![5, 7, 9],
        dz: vec![3, 5],
        dm: vec![3, 5],
        ..SweepRanges::default()
    }
}

#[test]
fn sweep_finds_published_protocol() {
    let cache = Level1Cache::new();
    let front = sweep(Family::L1FifteenToOne, &l1_ranges(), noise(1e-4), 1e-7, &cache).unwrap();
    assert!(front.iter().any(|r| r.protocol == "(15-to-1)_{7,3,3}"), "{front:?}");
    assert!(front
        .windows(2)
        .all(|w| w[0].qubitcycles_per_state <= w[1].qubitcycles_per_state));
    assert!(!cache.is_empty());
}

#[test]
fn sweep_below_family_floor_is_empty() {
    let front = sweep(
        Family::L1FifteenToOne,
        &l1_ranges(),
        noise(1e-4),
        1e-25,
        &Level1Cache::new(),
    )
    .unwrap();
    assert!(front.is_empty());
}

#[test]
fn noiseless_sweep_keeps_cheapest_corner() {
    let front = sweep(
        Family::L1FifteenToOne,
        &l1_ranges(),
        noise(0.0),
        1e-30,
        &Level1Cache::new(),
    )
    .unwrap();
    assert_eq!(front.len(), 1);
    assert_eq!(front[0].protocol, "(15-to-1)_{5,3,3}");
}

#[test]
fn two_level_sweep_is_deterministic() {
    let ranges = SweepRanges {
        dx: vec![7, 9],
        dz: vec![3],
        dm: vec![3],
        dx2: vec![13, 15],
        dz2: vec![5, 7],
        dm2: vec![7, 9],
        n_l1: vec![4],
    };
    let cache = Level1Cache::new();
    let a = sweep(Family::L2FifteenByCcz, &ranges, noise(1e-4), 1e-12, &cache).unwrap();
    let b = sweep(Family::L2FifteenByCcz, &ranges, noise(1e-4), 1e-12, &cache).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
    assert_eq!(cache.len(), 2);
}
