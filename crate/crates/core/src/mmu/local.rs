use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::{walk_cost, Lookup, PtwConfig, TlbConfig, TlbState, Vpn, WalkScheduler};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One translation hardware point: optional L1 and L2 TLBs in front of a
/// page table walker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MmuConfig<S> {
    pub id: String,
    pub l1: Option<TlbConfig<S>>,
    pub l2: Option<TlbConfig<S>>,
    pub ptw: PtwConfig<S>,
}

impl<S: Scalar> MmuConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.l2.is_some() && self.l1.is_none() {
            return Err(Error::InvalidConfig(format!("{}: L2 TLB without an L1 TLB", self.id)));
        }
        for tlb in self.l1.iter().chain(&self.l2) {
            tlb.validate()?;
        }
        self.ptw.validate()
    }

    /// Sum of the present components' areas.
    pub fn area_mm2(&self) -> S {
        self.l1.iter().chain(&self.l2).map(|t| t.area_mm2).sum::<S>() + self.ptw.area_mm2
    }

    pub fn l1_label(&self) -> String {
        self.l1.as_ref().map(TlbConfig::label).unwrap_or_default()
    }

    pub fn l2_label(&self) -> String {
        self.l2.as_ref().map(TlbConfig::label).unwrap_or_default()
    }
}

/// Event counts and costs of translating one reference stream.
///
/// For local translation `l1_*`/`l2_*` are the MMU's own TLBs. For remote
/// translation `l1_*` is the accelerator's filter TLB (if any), `l2_*` is the
/// CPU L2 TLB probed remotely and `walks` are CPU-side walks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MmuStats<S> {
    pub refs: u64,
    pub l1_probes: u64,
    pub l1_hits: u64,
    pub l2_probes: u64,
    pub l2_hits: u64,
    pub walks: u64,
    pub remote_probes: u64,
    /// Time the issuing side spends on translation.
    pub mmu_time_ns: S,
    /// Part of `mmu_time_ns` spent waiting for walks.
    pub walk_stall_ns: S,
    /// All translation energy caused by this stream.
    pub mmu_energy_pj: S,
    /// Part of `mmu_energy_pj` spent in CPU structures on behalf of remote probes.
    pub remote_energy_pj: S,
}

impl<S: Scalar> MmuStats<S> {
    pub fn l1_hit_rate(&self) -> Option<S> {
        (self.l1_probes > 0).then(|| S::from_count(self.l1_hits) / S::from_count(self.l1_probes))
    }

    pub fn l2_hit_rate(&self) -> Option<S> {
        (self.l2_probes > 0).then(|| S::from_count(self.l2_hits) / S::from_count(self.l2_probes))
    }
}

impl<S: Scalar> AddAssign for MmuStats<S> {
    fn add_assign(&mut self, o: Self) {
        self.refs += o.refs;
        self.l1_probes += o.l1_probes;
        self.l1_hits += o.l1_hits;
        self.l2_probes += o.l2_probes;
        self.l2_hits += o.l2_hits;
        self.walks += o.walks;
        self.remote_probes += o.remote_probes;
        self.mmu_time_ns = self.mmu_time_ns + o.mmu_time_ns;
        self.walk_stall_ns = self.walk_stall_ns + o.walk_stall_ns;
        self.mmu_energy_pj = self.mmu_energy_pj + o.mmu_energy_pj;
        self.remote_energy_pj = self.remote_energy_pj + o.remote_energy_pj;
    }
}

impl<S: Scalar> Add for MmuStats<S> {
    type Output = Self;

    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl<S: Scalar> std::iter::Sum for MmuStats<S> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// A data reference and the ideal (translation-free) time at which the
/// issuing engine reaches it, measured from the start of its segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedRef<S> {
    pub issue_ns: S,
    pub vpn: Vpn,
}

/// How translation work turns into time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingModel {
    /// Accelerator: every TLB probe costs its access time, serially. A walk is
    /// requested at the reference's ideal issue time plus its own probe time
    /// (unbounded lookahead), so walks overlap up to the walker's thread
    /// count; the engine stalls only when it reaches a reference whose walk
    /// has not completed.
    Accelerator,
    /// CPU: TLB hit latency is already part of the calibrated CPI, so probes
    /// cost energy but no time. The core blocks on each walk, which is issued
    /// once earlier stalls have drained.
    Cpu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationOutcome {
    L1Hit,
    L2Hit,
    Walk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Translation<S> {
    pub outcome: TranslationOutcome,
    /// Probe time charged for this reference.
    pub probe_ns: S,
    /// Walk completion minus walk issue, for references that walked.
    pub walk_latency_ns: Option<S>,
    /// Stall charged for this reference's walk.
    pub stall_ns: S,
}

/// A local MMU in the middle of a run.
///
/// TLB contents are updated in reference order at lookup time; a walk fills
/// L2 then L1 as soon as it is requested. An L2 hit refills L1, and L1
/// victims are dropped. TLB state persists across segments, while walker
/// occupancy and accumulated stall restart with each segment.
#[derive(Debug, Clone)]
pub struct LocalMmu<S> {
    cfg: MmuConfig<S>,
    timing: TimingModel,
    l1: Option<TlbState>,
    l2: Option<TlbState>,
    walker: WalkScheduler<S>,
    delay: S,
    stats: MmuStats<S>,
}

impl<S: Scalar> LocalMmu<S> {
    pub fn new(cfg: MmuConfig<S>, timing: TimingModel) -> Self {
        debug_assert!(cfg.validate().is_ok(), "invalid MMU config {}", cfg.id);
        Self {
            l1: cfg.l1.as_ref().map(TlbState::for_config),
            l2: cfg.l2.as_ref().map(TlbState::for_config),
            walker: WalkScheduler::new(cfg.ptw.threads, cfg.ptw.walk_latency_ns),
            timing,
            delay: S::zero(),
            stats: MmuStats::default(),
            cfg,
        }
    }

    pub fn config(&self) -> &MmuConfig<S> {
        &self.cfg
    }

    /// Starts a new segment: walkers idle, no accumulated stall.
    pub fn begin_segment(&mut self) {
        self.walker.reset();
        self.delay = S::zero();
    }

    pub fn translate(&mut self, r: TimedRef<S>) -> Translation<S> {
        let st = &mut self.stats;
        st.refs += 1;
        let mut probe = S::zero();
        let mut energy = S::zero();

        let mut outcome = None;
        if let (Some(state), Some(cfg)) = (self.l1.as_mut(), self.cfg.l1.as_ref()) {
            st.l1_probes += 1;
            probe = probe + cfg.access_time_ns;
            energy = energy + cfg.access_energy_pj;
            if state.lookup(r.vpn) == Lookup::Hit {
                st.l1_hits += 1;
                outcome = Some(TranslationOutcome::L1Hit);
            }
        }
        if outcome.is_none() {
            if let (Some(state), Some(cfg)) = (self.l2.as_mut(), self.cfg.l2.as_ref()) {
                st.l2_probes += 1;
                probe = probe + cfg.access_time_ns;
                energy = energy + cfg.access_energy_pj;
                if state.lookup(r.vpn) == Lookup::Hit {
                    st.l2_hits += 1;
                    outcome = Some(TranslationOutcome::L2Hit);
                    if let Some(l1) = self.l1.as_mut() {
                        l1.fill(r.vpn);
                    }
                }
            }
        }
        let outcome = outcome.unwrap_or_else(|| {
            st.walks += 1;
            energy = energy + walk_cost(&self.cfg.ptw).1;
            if let Some(l2) = self.l2.as_mut() {
                l2.fill(r.vpn);
            }
            if let Some(l1) = self.l1.as_mut() {
                l1.fill(r.vpn);
            }
            TranslationOutcome::Walk
        });

        let walked = outcome == TranslationOutcome::Walk;
        let (charged_probe, walk_latency, stall) = match self.timing {
            TimingModel::Accelerator => {
                self.delay = self.delay + probe;
                if walked {
                    // requested once this reference's own probes have missed
                    let done = self.walker.schedule(r.issue_ns + probe);
                    let reached = r.issue_ns + self.delay;
                    let stall = (done - reached).max(S::zero());
                    self.delay = self.delay + stall;
                    (probe, Some(done - r.issue_ns), stall)
                } else {
                    (probe, None, S::zero())
                }
            }
            TimingModel::Cpu => {
                if walked {
                    let issue = r.issue_ns + self.delay;
                    let latency = self.walker.schedule(issue) - issue;
                    self.delay = self.delay + latency;
                    (S::zero(), Some(latency), latency)
                } else {
                    (S::zero(), None, S::zero())
                }
            }
        };

        let st = &mut self.stats;
        st.mmu_time_ns = st.mmu_time_ns + charged_probe + stall;
        st.walk_stall_ns = st.walk_stall_ns + stall;
        st.mmu_energy_pj = st.mmu_energy_pj + energy;

        Translation {
            outcome,
            probe_ns: charged_probe,
            walk_latency_ns: walk_latency,
            stall_ns: stall,
        }
    }

    /// Translates one segment's references and returns that segment's stats.
    pub fn run_segment(&mut self, refs: &[TimedRef<S>]) -> MmuStats<S> {
        debug_assert!(
            refs.windows(2).all(|w| w[0].issue_ns <= w[1].issue_ns),
            "issue times must be non-decreasing"
        );
        self.begin_segment();
        for &r in refs {
            self.translate(r);
        }
        self.take_stats()
    }

    /// Returns the stats gathered since the last call and clears them.
    pub fn take_stats(&mut self) -> MmuStats<S> {
        std::mem::take(&mut self.stats)
    }

    /// The L2 TLB as seen by remote probes, with the walker that resolves
    /// its misses. `None` when there is no L2.
    pub(crate) fn remote_port(&mut self) -> Option<(&mut TlbState, &TlbConfig<S>, &PtwConfig<S>)> {
        match (self.l2.as_mut(), self.cfg.l2.as_ref()) {
            (Some(state), Some(cfg)) => Some((state, cfg, &self.cfg.ptw)),
            _ => None,
        }
    }

    pub fn l1_state(&self) -> Option<&TlbState> {
        self.l1.as_ref()
    }

    pub fn l2_state(&self) -> Option<&TlbState> {
        self.l2.as_ref()
    }
}

/// Runs one accelerator segment through a fresh local MMU.
pub fn simulate_local<S: Scalar>(refs: &[TimedRef<S>], cfg: &MmuConfig<S>) -> MmuStats<S> {
    LocalMmu::new(cfg.clone(), TimingModel::Accelerator).run_segment(refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ptw(threads: usize, lat: f64) -> PtwConfig<f64> {
        PtwConfig {
            threads,
            walk_latency_ns: lat,
            walk_mem_access_energy_pj: 10.0,
            area_mm2: 0.05,
        }
    }

    fn cfg(l1: Option<(usize, usize)>, l2: Option<(usize, usize)>, threads: usize) -> MmuConfig<f64> {
        let tlb = |(e, w): (usize, usize), t: f64| TlbConfig {
            entries: e,
            ways: w,
            access_time_ns: t,
            access_energy_pj: 1.0,
            area_mm2: 0.01,
        };
        MmuConfig {
            id: "t".into(),
            l1: l1.map(|g| tlb(g, 1.0)),
            l2: l2.map(|g| tlb(g, 2.0)),
            ptw: ptw(threads, 100.0),
        }
    }

    fn at(t: f64, vpn: u64) -> TimedRef<f64> {
        TimedRef { issue_ns: t, vpn: Vpn(vpn) }
    }

    #[test]
    fn repeated_page_walks_once() {
        let refs: Vec<_> = (0..10).map(|i| at(i as f64, 7)).collect();
        let s = simulate_local(&refs, &cfg(Some((32, 2)), None, 1));
        assert_eq!(s.walks, 1);
        assert_eq!(s.l1_hits, 9);
        assert_eq!(s.l1_hits + s.l2_hits + s.walks, s.refs);
    }

    #[test]
    fn serial_walker_second_miss_waits() {
        let mut mmu = LocalMmu::new(cfg(None, None, 1), TimingModel::Accelerator);
        let a = mmu.translate(at(0.0, 1));
        let b = mmu.translate(at(0.0, 2));
        assert_eq!(a.walk_latency_ns, Some(100.0));
        assert_eq!(b.walk_latency_ns, Some(200.0));
        assert_eq!(mmu.take_stats().walk_stall_ns, 200.0);
    }

    #[test]
    fn two_walkers_serve_both_at_once() {
        let mut mmu = LocalMmu::new(cfg(None, None, 2), TimingModel::Accelerator);
        assert_eq!(mmu.translate(at(0.0, 1)).walk_latency_ns, Some(100.0));
        assert_eq!(mmu.translate(at(0.0, 2)).walk_latency_ns, Some(100.0));
        assert_eq!(mmu.take_stats().mmu_time_ns, 100.0);
    }

    #[test]
    fn probe_times_and_energy() {
        // L1 1ns/1pJ, L2 2ns/1pJ, walk 4 x 10pJ
        let mut mmu = LocalMmu::new(cfg(Some((2, 1)), Some((4, 1)), 1), TimingModel::Accelerator);
        mmu.translate(at(0.0, 1)); // L1 miss, L2 miss, walk: 3ns probe + 100ns stall
        mmu.translate(at(1000.0, 1)); // L1 hit: 1ns
        let s = mmu.take_stats();
        assert_eq!(s.walks, 1);
        assert_eq!(s.l1_hits, 1);
        assert_eq!(s.mmu_time_ns, 3.0 + 100.0 + 1.0);
        assert_eq!(s.mmu_energy_pj, 1.0 + 1.0 + 40.0 + 1.0);
    }

    #[test]
    fn l2_hit_refills_l1() {
        // Direct-mapped 2-entry L1: 1 and 3 collide; L2 keeps both.
        let mut mmu = LocalMmu::new(cfg(Some((2, 1)), Some((8, 2)), 1), TimingModel::Accelerator);
        for v in [1, 3, 1, 1] {
            mmu.translate(at(0.0, v));
        }
        let s = mmu.take_stats();
        assert_eq!((s.walks, s.l2_hits, s.l1_hits), (2, 1, 1));
    }

    #[test]
    fn cpu_timing_blocks_on_each_walk() {
        let mut mmu = LocalMmu::new(cfg(Some((2, 1)), None, 1), TimingModel::Cpu);
        let s = mmu.run_segment(&[at(0.0, 1), at(0.0, 2), at(0.0, 1)]);
        // No probe time on the CPU; two walks at full latency, no queueing.
        assert_eq!(s.walks, 2);
        assert_eq!(s.mmu_time_ns, 200.0);
    }

    #[test]
    fn decoupled_walks_hide_behind_earlier_stalls() {
        let mut mmu = LocalMmu::new(cfg(None, None, 1), TimingModel::Accelerator);
        let s = mmu.run_segment(&[at(0.0, 1), at(50.0, 2)]);
        // second walk: issued 50, starts 100, done 200; engine reaches it at 150
        assert_eq!(s.walk_stall_ns, 100.0 + 50.0);
    }

    #[test]
    fn tlb_state_persists_but_walkers_reset_between_segments() {
        let mut mmu = LocalMmu::new(cfg(Some((32, 2)), None, 1), TimingModel::Accelerator);
        let a = mmu.run_segment(&[at(0.0, 1), at(0.0, 2)]);
        let b = mmu.run_segment(&[at(0.0, 1), at(0.0, 3)]);
        assert_eq!(a.walks, 2);
        assert_eq!(b.walks, 1);
        // walk for 3 requested at 1 (own probe), engine gets there at 2
        assert_eq!(b.walk_stall_ns, 99.0);
    }

    #[test]
    fn config_rules() {
        assert!(cfg(None, Some((256, 4)), 1).validate().is_err());
        assert!(cfg(Some((64, 4)), Some((512, 4)), 8).validate().is_ok());
        let c = cfg(Some((64, 4)), Some((512, 4)), 8);
        assert!((c.area_mm2() - 0.07).abs() < 1e-12);
    }
}
