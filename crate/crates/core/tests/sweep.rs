use hetmmu::cost::amdahl_bound;
use hetmmu::dse::{
    enumerate_accel_configs, enumerate_cpu_configs, enumerate_system_configs, evaluate_system, remote_modes,
    remote_system_configs, run_sweep, software_baseline, split_breakdown, to_csv_string, baseline_cpu_config,
    pareto, CostMetric, SystemConfig, Workload,
};
use hetmmu::mmu::TranslationMode;
use hetmmu::params::ParamPack;
use hetmmu::trace::{generate_synthetic, identify_hotspots, Locality, PatternKind, SyntheticSpec, Trace};

fn synth(locality: Locality, pages: u64, n: u64, seed: u64) -> Trace {
    generate_synthetic(&SyntheticSpec {
        name: "s".into(),
        instr_count: n,
        mem_ref_ratio: 0.3,
        working_set_pages: pages,
        locality,
        loop_pcs: 16,
        loop_iterations: n / 16 * 3 / 4,
        seed,
    })
    .unwrap()
}

fn all_systems(p: &ParamPack<f64>) -> Vec<SystemConfig<f64>> {
    let cpus = enumerate_cpu_configs(p).unwrap();
    let mut s = enumerate_system_configs(&enumerate_accel_configs(p).unwrap(), &cpus);
    for m in remote_modes(p).unwrap() {
        s.extend(remote_system_configs(&cpus, &m));
    }
    s
}

const PATTERNS: [PatternKind; 3] = [PatternKind::ProgramOrder, PatternKind::Random { seed: 5 }, PatternKind::Sorted];

#[test]
fn two_configs_three_patterns_give_six_rows() {
    let p = ParamPack::<f64>::placeholder();
    let t = synth(Locality::UniformRandom, 256, 5_000, 1);
    let part = identify_hotspots(&t, 20, 16);
    let sys = &all_systems(&p)[..2];
    let res = run_sweep(&t, &part, sys, &PATTERNS, &p).unwrap();
    assert_eq!(res.rows.len(), 6);
}

#[test]
fn sweep_is_independent_of_system_order() {
    let p = ParamPack::<f64>::placeholder();
    let t = synth(Locality::Zipf { exponent: 1.5 }, 1024, 20_000, 2);
    let part = identify_hotspots(&t, 50, 32);
    let sys = all_systems(&p);
    let mut reversed = sys.clone();
    reversed.reverse();
    let a = run_sweep(&t, &part, &sys, &PATTERNS, &p).unwrap();
    let b = run_sweep(&t, &part, &reversed, &PATTERNS, &p).unwrap();
    assert_eq!(to_csv_string(&a.rows), to_csv_string(&b.rows));
    assert_eq!(a.rows.len(), 504 * 3);
}

#[test]
fn sorted_beats_random_for_small_mmus_on_uniform_traces() {
    let p = ParamPack::<f64>::placeholder();
    let t = synth(Locality::UniformRandom, 2048, 50_000, 3);
    let part = identify_hotspots(&t, 100, 64);
    let accs = enumerate_accel_configs(&p).unwrap();
    let cpu = baseline_cpu_config(&p).unwrap();
    let base = software_baseline(&t, &cpu, &p.calibration).unwrap();
    // every L1-only accelerator MMU
    for acc in accs.iter().filter(|a| a.l1.is_some() && a.l2.is_none()) {
        let sys = SystemConfig { id: acc.id.clone(), cpu: cpu.clone(), acc: Some(acc.clone()), mode: TranslationMode::Local };
        let rt = |pat| {
            let w = Workload::new(&t, &part, pat, &p.calibration).unwrap();
            evaluate_system(&w, &sys, Some(&base)).unwrap().cost.runtime_ns
        };
        assert!(rt(PatternKind::Sorted) <= rt(PatternKind::Random { seed: 1 }), "{}", acc.id);
    }
}

#[test]
fn splits_sum_to_totals_and_remote_has_no_accelerator_area() {
    let p = ParamPack::<f64>::placeholder();
    let t = synth(Locality::Zipf { exponent: 2.0 }, 4096, 20_000, 4);
    let part = identify_hotspots(&t, 50, 32);
    let res = run_sweep(&t, &part, &all_systems(&p), &PATTERNS, &p).unwrap();
    let split = split_breakdown(&res.rows);
    assert!(!split.is_empty());
    for s in &split {
        let row = res.rows.iter().find(|r| r.config_id == s.config_id && r.pattern == s.pattern).unwrap();
        assert_eq!(s.area_mm2.cpu + s.area_mm2.acc, row.cost.mmu_area_mm2.total());
        assert_eq!(s.energy_pj.cpu + s.energy_pj.acc, row.cost.mmu_energy_pj.total());
    }
    for r in &res.rows {
        match r.mode {
            TranslationMode::RemoteNoMmu { .. } => assert_eq!(r.cost.mmu_area_mm2.acc, 0.0),
            TranslationMode::RemoteFiltered { ref filter, .. } => assert_eq!(r.cost.mmu_area_mm2.acc, filter.area_mm2),
            TranslationMode::Local => assert!(r.cost.mmu_area_mm2.acc > 0.0),
        }
        assert_eq!(r.cost.runtime_ns, r.cost.breakdown.total());
    }
    // per-pattern frontiers agree with the annotations
    let program: Vec<_> = res.rows.iter().filter(|r| r.pattern == PatternKind::ProgramOrder).cloned().collect();
    let front = pareto(&program, CostMetric::Area).unwrap();
    assert_eq!(front.len(), program.iter().filter(|r| r.area_optimal).count());
    assert!(front.iter().all(|pt| pt.area_optimal));
}

#[test]
fn amdahl_is_not_a_floor_for_walk_bound_traces() {
    // Uniform references over a working set well past every TLB's reach:
    // the serial-walker baseline spends most of its time walking, while
    // a 32-thread accelerator walker overlaps those walks. Translation is
    // then sped up by more than the compute speedup and the run beats
    // (1 - f) + f/s.
    let p = ParamPack::<f64>::placeholder();
    let t = synth(Locality::UniformRandom, 16_384, 50_000, 6);
    let part = identify_hotspots(&t, 100, 64);
    let accs = enumerate_accel_configs(&p).unwrap();
    let cpu = baseline_cpu_config(&p).unwrap();
    let base = software_baseline(&t, &cpu, &p.calibration).unwrap();
    let w = Workload::new(&t, &part, PatternKind::ProgramOrder, &p.calibration).unwrap();
    let wide = accs.iter().find(|a| a.l1.is_none() && a.ptw.threads == 32).unwrap();
    let sys = SystemConfig { id: "wide".into(), cpu, acc: Some(wide.clone()), mode: TranslationMode::Local };
    let run = evaluate_system(&w, &sys, Some(&base)).unwrap();
    let bound = amdahl_bound(w.accelerated_fraction(), p.calibration.accel_speedup);
    assert!(base.breakdown.cpu_mmu_ns > 0.5 * base.runtime_ns);
    assert!(run.cost.normalized_runtime < bound);
}

#[test]
fn single_precision_pipeline() {
    let p = ParamPack::<f32>::placeholder();
    let t = synth(Locality::Stride { pages: 1 }, 512, 5_000, 7);
    let part = identify_hotspots(&t, 20, 16);
    let cpus = enumerate_cpu_configs(&p).unwrap();
    let sys = enumerate_system_configs(&enumerate_accel_configs(&p).unwrap()[..6], &cpus[..1]);
    let res = run_sweep(&t, &part, &sys, &[PatternKind::Sorted], &p).unwrap();
    assert_eq!(res.rows.len(), 6);
    assert!(res.rows.iter().all(|r| r.cost.normalized_runtime.is_finite() && r.cost.normalized_runtime > 0.0));
}
