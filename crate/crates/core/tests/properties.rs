use std::collections::BTreeMap;

use hetmmu::cost::mmu_energy;
use hetmmu::dse::{dominates, pareto_front};
use hetmmu::mmu::{
    simulate_local, simulate_remote, LocalMmu, MmuConfig, MmuStats, PtwConfig, TimedRef, TimingModel, TlbConfig,
    TlbState, TranslationMode, TranslationOutcome, Vpn,
};
use hetmmu::trace::{
    accelerated_fraction, apply_pattern, identify_hotspots, reorder_accelerator_refs, HotspotPartition, InstructionRecord,
    PatternKind, SegmentKind, Trace,
};
use proptest::prelude::*;

fn tlb(entries: usize, ways: usize, t: f64, e: f64) -> TlbConfig<f64> {
    TlbConfig {
        entries,
        ways,
        access_time_ns: t,
        access_energy_pj: e,
        area_mm2: 0.0,
    }
}

fn ptw(threads: usize) -> PtwConfig<f64> {
    PtwConfig {
        threads,
        walk_latency_ns: 30.0,
        walk_mem_access_energy_pj: 2.5,
        area_mm2: 0.0,
    }
}

fn mmu(l1: Option<(usize, usize)>, l2: Option<(usize, usize)>, threads: usize) -> MmuConfig<f64> {
    MmuConfig {
        id: "p".into(),
        l1: l1.map(|(e, w)| tlb(e, w, 0.25, 1.0)),
        l2: l2.map(|(e, w)| tlb(e, w, 0.5, 3.0)),
        ptw: ptw(threads),
    }
}

fn trace_of(pcs: &[u64], vas: &[Option<u64>]) -> Trace {
    Trace::new(
        "p",
        pcs.iter().zip(vas).map(|(&pc, &va)| InstructionRecord::new(pc, va)).collect(),
    )
}

/// Direct two-pass hotspot reference: count, then scan runs.
fn reference_partition(pcs: &[u64], threshold: u64, min_len: usize) -> Vec<(SegmentKind, usize, usize)> {
    let mut counts = BTreeMap::new();
    for &pc in pcs {
        *counts.entry(pc).or_insert(0u64) += 1;
    }
    let hot: Vec<bool> = pcs.iter().map(|pc| counts[pc] > threshold).collect();
    let mut acc = vec![false; pcs.len()];
    let mut i = 0;
    while i < pcs.len() {
        if !hot[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < pcs.len() && hot[j] {
            j += 1;
        }
        if j - i >= min_len {
            acc[i..j].iter_mut().for_each(|a| *a = true);
        }
        i = j;
    }
    let mut out: Vec<(SegmentKind, usize, usize)> = Vec::new();
    for (k, &a) in acc.iter().enumerate() {
        let kind = if a { SegmentKind::Acc } else { SegmentKind::Cpu };
        match out.last_mut() {
            Some(last) if last.0 == kind => last.2 = k,
            _ => out.push((kind, k, k)),
        }
    }
    out
}

fn segs(p: &HotspotPartition) -> Vec<(SegmentKind, usize, usize)> {
    p.segments().iter().map(|s| (s.kind, s.start, s.end)).collect()
}

fn timed(vpns: &[u64], gaps: &[u8]) -> Vec<TimedRef<f64>> {
    let mut t = 0.0;
    vpns.iter()
        .zip(gaps.iter().cycle())
        .map(|(&v, &g)| {
            t += g as f64 * 0.5;
            TimedRef { issue_ns: t, vpn: Vpn(v) }
        })
        .collect()
}

fn geometry() -> impl Strategy<Value = (usize, usize)> {
    (0u32..4, 0u32..4).prop_map(|(s, w)| ((1 << s) * (1 << w), 1 << w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hotspots_match_two_pass_reference(
        pcs in prop::collection::vec(0u64..6, 1..60),
        threshold in 1u64..8,
        min_len in 1usize..6,
    ) {
        let t = trace_of(&pcs, &vec![None; pcs.len()]);
        let p = identify_hotspots(&t, threshold, min_len);
        prop_assert_eq!(segs(&p), reference_partition(&pcs, threshold, min_len));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn partition_tiles_the_trace(pcs in prop::collection::vec(0u64..5, 1..200), threshold in 1u64..20, min_len in 1usize..20) {
        let t = trace_of(&pcs, &vec![None; pcs.len()]);
        let p = identify_hotspots(&t, threshold, min_len);
        let mut next = 0;
        for s in p.segments() {
            prop_assert_eq!(s.start, next);
            prop_assert!(s.end >= s.start);
            if s.kind == SegmentKind::Acc {
                prop_assert!(s.len() >= min_len);
            }
            next = s.end + 1;
        }
        prop_assert_eq!(next, pcs.len());
        prop_assert!(p.segments().windows(2).all(|w| w[0].kind != w[1].kind));
    }

    #[test]
    fn raising_min_len_never_raises_fraction(pcs in prop::collection::vec(0u64..4, 1..200), threshold in 1u64..10, a in 1usize..30, b in 1usize..30) {
        let t = trace_of(&pcs, &vec![None; pcs.len()]);
        let (lo, hi) = (a.min(b), a.max(b));
        let f_lo: f64 = accelerated_fraction(&identify_hotspots(&t, threshold, lo));
        let f_hi: f64 = accelerated_fraction(&identify_hotspots(&t, threshold, hi));
        prop_assert!(f_hi <= f_lo);
    }

    #[test]
    fn patterns_permute(items in prop::collection::vec(0u64..50, 0..100), seed in any::<u64>()) {
        let mut sorted = items.clone();
        sorted.sort();
        for p in [PatternKind::ProgramOrder, PatternKind::Sorted, PatternKind::Random { seed }] {
            let mut out = apply_pattern(&items, p);
            prop_assert_eq!(out.len(), items.len());
            out.sort();
            prop_assert_eq!(&out, &sorted);
        }
        prop_assert_eq!(apply_pattern(&items, PatternKind::ProgramOrder), items.clone());
        prop_assert_eq!(apply_pattern(&items, PatternKind::Sorted), sorted);
        prop_assert_eq!(apply_pattern(&items, PatternKind::Random { seed }), apply_pattern(&items, PatternKind::Random { seed }));
    }

    #[test]
    fn reorder_keeps_pcs_and_cpu_refs(
        pcs in prop::collection::vec(0u64..3, 1..120),
        pages in prop::collection::vec(prop::option::of(0u64..40), 120),
        seed in any::<u64>(),
    ) {
        let vas: Vec<Option<u64>> = pages[..pcs.len()].iter().map(|p| p.map(|p| p << 12)).collect();
        let t = trace_of(&pcs, &vas);
        let part = identify_hotspots(&t, 3, 2);
        let out = reorder_accelerator_refs(&t, &part, PatternKind::Random { seed });
        prop_assert_eq!(out.len(), t.len());
        for s in part.segments() {
            let before: Vec<_> = t.records[s.range()].to_vec();
            let after: Vec<_> = out.records[s.range()].to_vec();
            prop_assert!(before.iter().zip(&after).all(|(a, b)| a.pc == b.pc && a.data_vaddr.is_some() == b.data_vaddr.is_some()));
            if s.kind == SegmentKind::Cpu {
                prop_assert_eq!(before, after);
            } else {
                let mut x: Vec<_> = before.iter().filter_map(|r| r.data_vaddr).collect();
                let mut y: Vec<_> = after.iter().filter_map(|r| r.data_vaddr).collect();
                x.sort();
                y.sort();
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn text_round_trip(pcs in prop::collection::vec(0u64..(1 << 48), 1..50), vas in prop::collection::vec(prop::option::of(0u64..(1 << 48)), 50)) {
        let t = trace_of(&pcs, &vas[..pcs.len()]);
        let back = Trace::parse_str("p", &t.to_text()).unwrap();
        prop_assert_eq!(back.records, t.records);
    }

    #[test]
    fn tlb_matches_ordered_list_oracle((entries, ways) in geometry(), vpns in prop::collection::vec(0u64..48, 0..300)) {
        let sets = entries / ways;
        let mut state = TlbState::new(sets, ways);
        let mut oracle: Vec<Vec<u64>> = vec![Vec::new(); sets];
        for v in vpns {
            let set = &mut oracle[(v % sets as u64) as usize];
            let expect_hit = set.contains(&v);
            let hit = state.lookup(Vpn(v)) == hetmmu::mmu::Lookup::Hit;
            prop_assert_eq!(hit, expect_hit);
            set.retain(|&x| x != v);
            set.insert(0, v);
            let expect_victim = if set.len() > ways { set.pop() } else { None };
            if !hit {
                prop_assert_eq!(state.fill(Vpn(v)).map(|x| x.0), expect_victim);
            }
            prop_assert!(state.set_of(Vpn(v)).len() <= ways);
        }
    }

    #[test]
    fn more_walkers_never_hurt(
        vpns in prop::collection::vec(0u64..64, 1..300),
        gaps in prop::collection::vec(0u8..4, 1..20),
        l1 in prop::option::of(geometry()),
        with_l2 in any::<bool>(),
    ) {
        let refs = timed(&vpns, &gaps);
        let l2 = (with_l2 && l1.is_some()).then_some((32, 4));
        let mut prev = f64::INFINITY;
        for w in [1, 2, 4, 8, 16, 32] {
            let s = simulate_local(&refs, &mmu(l1, l2, w));
            prop_assert!(s.mmu_time_ns <= prev, "W={}: {} > {}", w, s.mmu_time_ns, prev);
            prev = s.mmu_time_ns;
        }
    }

    #[test]
    fn an_l1_never_adds_walks(vpns in prop::collection::vec(0u64..200, 1..400), l1 in geometry(), w in 0usize..6) {
        let refs = timed(&vpns, &[1]);
        let threads = 1 << w;
        let bare = simulate_local(&refs, &mmu(None, None, threads)).walks;
        prop_assert!(simulate_local(&refs, &mmu(Some(l1), None, threads)).walks <= bare);
        prop_assert!(simulate_local(&refs, &mmu(Some(l1), Some((64, 4)), threads)).walks <= bare);
    }

    #[test]
    fn serial_walker_simultaneous_misses(vpns in prop::collection::vec(0u64..1000, 1..200)) {
        let refs: Vec<_> = vpns.iter().map(|&v| TimedRef { issue_ns: 0.0, vpn: Vpn(v) }).collect();
        let s = simulate_local(&refs, &mmu(None, None, 1));
        prop_assert_eq!(s.walk_stall_ns, s.walks as f64 * 30.0);
    }

    #[test]
    fn conservation_and_determinism(
        vpns in prop::collection::vec(0u64..100, 1..300),
        l1 in prop::option::of(geometry()),
        threads in 1usize..8,
    ) {
        let refs = timed(&vpns, &[0, 1, 3]);
        let cfg = mmu(l1, l1.map(|_| (32, 2)), threads);
        let a = simulate_local(&refs, &cfg);
        prop_assert_eq!(a.l1_hits + a.l2_hits + a.walks, a.refs);
        prop_assert_eq!(a.refs, refs.len() as u64);
        prop_assert_eq!(a, simulate_local(&refs, &cfg));

        let mut l2 = TlbState::new(8, 4);
        let mode = TranslationMode::RemoteFiltered { one_way_delay_ns: 2.0, filter: tlb(16, 4, 0.1, 0.5) };
        let vs: Vec<Vpn> = vpns.iter().map(|&v| Vpn(v)).collect();
        let r = simulate_remote(&vs, &mode, &mut l2, &tlb(32, 4, 0.3, 2.0), &ptw(1)).unwrap();
        prop_assert_eq!(r.l1_hits + r.remote_probes, r.refs);
        prop_assert_eq!(r.l2_hits + r.walks, r.remote_probes);
    }

    #[test]
    fn energy_is_additive_and_matches_event_counts(
        a in prop::collection::vec(0u64..80, 0..200),
        b in prop::collection::vec(0u64..80, 0..200),
        l1 in prop::option::of(geometry()),
    ) {
        let cfg = mmu(l1, l1.map(|_| (32, 4)), 2);
        let mut m = LocalMmu::new(cfg.clone(), TimingModel::Accelerator);
        let sa = m.run_segment(&timed(&a, &[1]));
        let sb = m.run_segment(&timed(&b, &[1]));
        prop_assert!((mmu_energy(&sa, &cfg) - sa.mmu_energy_pj).abs() < 1e-9);
        prop_assert!((mmu_energy(&sb, &cfg) - sb.mmu_energy_pj).abs() < 1e-9);
        let sum: MmuStats<f64> = sa + sb;
        prop_assert!((mmu_energy(&sum, &cfg) - (mmu_energy(&sa, &cfg) + mmu_energy(&sb, &cfg))).abs() < 1e-6);
    }

    #[test]
    fn cpu_timing_charges_one_walk_latency_per_walk(vpns in prop::collection::vec(0u64..100, 1..200), l1 in prop::option::of(geometry())) {
        let mut m = LocalMmu::new(mmu(l1, None, 1), TimingModel::Cpu);
        let mut walks = 0u64;
        for r in timed(&vpns, &[0, 2]) {
            let t = m.translate(r);
            if t.outcome == TranslationOutcome::Walk {
                walks += 1;
                prop_assert_eq!(t.walk_latency_ns, Some(30.0));
            }
            prop_assert_eq!(t.probe_ns, 0.0);
        }
        prop_assert_eq!(m.take_stats().mmu_time_ns, walks as f64 * 30.0);
    }

    #[test]
    fn pareto_matches_brute_force(pts in prop::collection::vec((0u8..12, 0u8..12), 1..60)) {
        let pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, y)| (x as f64, y as f64)).collect();
        let front = pareto_front(&pts).unwrap();
        for i in 0..pts.len() {
            let dominated = pts.iter().any(|&q| dominates(q, pts[i]));
            prop_assert_eq!(front.contains(&i), !dominated);
        }
    }
}
