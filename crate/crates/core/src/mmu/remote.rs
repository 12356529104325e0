//! CPU-managed translation: the accelerator sends translation requests to
//! the CPU's L2 TLB over a link.
//!
//! A remote probe costs a round trip (twice the one-way delay) plus the CPU
//! L2 access time; an L2 miss adds one walk on the CPU's walker, serially.
//! The CPU L1 TLB is never probed remotely and arbitration with the CPU's own
//! traffic is not modelled.

use serde::{Deserialize, Serialize};

use super::{walk_cost, LocalMmu, Lookup, MmuStats, PtwConfig, TlbConfig, TlbState, Vpn};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", bound = "S: Scalar")]
pub enum TranslationMode<S> {
    /// The accelerator owns its MMU.
    Local,
    /// No accelerator MMU; every reference goes to the CPU.
    RemoteNoMmu { one_way_delay_ns: S },
    /// A local filter TLB; only its misses go to the CPU.
    RemoteFiltered { one_way_delay_ns: S, filter: TlbConfig<S> },
}

impl<S: Scalar> TranslationMode<S> {
    pub fn label(&self) -> &'static str {
        match self {
            TranslationMode::Local => "local",
            TranslationMode::RemoteNoMmu { .. } => "remote",
            TranslationMode::RemoteFiltered { .. } => "remote-filtered",
        }
    }

    pub fn is_remote(&self) -> bool {
        !matches!(self, TranslationMode::Local)
    }

    pub fn filter(&self) -> Option<&TlbConfig<S>> {
        match self {
            TranslationMode::RemoteFiltered { filter, .. } => Some(filter),
            _ => None,
        }
    }
}

/// Accelerator-side state of a remote translation run.
#[derive(Debug, Clone)]
pub struct RemoteTranslator<S> {
    one_way_delay_ns: S,
    filter_cfg: Option<TlbConfig<S>>,
    filter: Option<TlbState>,
    stats: MmuStats<S>,
}

impl<S: Scalar> RemoteTranslator<S> {
    pub fn new(mode: &TranslationMode<S>) -> Result<Self> {
        let (delay, filter_cfg) = match mode {
            TranslationMode::Local => {
                return Err(Error::InvalidConfig("remote translator needs a remote mode".into()))
            }
            TranslationMode::RemoteNoMmu { one_way_delay_ns } => (*one_way_delay_ns, None),
            TranslationMode::RemoteFiltered {
                one_way_delay_ns,
                filter,
            } => {
                filter.validate()?;
                (*one_way_delay_ns, Some(filter.clone()))
            }
        };
        if !(delay >= S::zero() && delay.is_finite()) {
            return Err(Error::InvalidConfig(format!("one_way_delay_ns = {delay} must be non-negative")));
        }
        Ok(Self {
            one_way_delay_ns: delay,
            filter: filter_cfg.as_ref().map(TlbState::for_config),
            filter_cfg,
            stats: MmuStats::default(),
        })
    }

    /// Translates one reference and returns the time the accelerator waits.
    pub fn translate(
        &mut self,
        vpn: Vpn,
        cpu_l2: &mut TlbState,
        cpu_l2_cfg: &TlbConfig<S>,
        cpu_ptw: &PtwConfig<S>,
    ) -> S {
        let st = &mut self.stats;
        st.refs += 1;
        let mut time = S::zero();
        let mut local_energy = S::zero();
        let mut cpu_energy = S::zero();

        let mut filtered = false;
        if let (Some(state), Some(cfg)) = (self.filter.as_mut(), self.filter_cfg.as_ref()) {
            st.l1_probes += 1;
            time = time + cfg.access_time_ns;
            local_energy = local_energy + cfg.access_energy_pj;
            if state.lookup(vpn) == Lookup::Hit {
                st.l1_hits += 1;
                filtered = true;
            }
        }

        if !filtered {
            st.remote_probes += 1;
            st.l2_probes += 1;
            time = time + S::lit(2.0) * self.one_way_delay_ns + cpu_l2_cfg.access_time_ns;
            cpu_energy = cpu_energy + cpu_l2_cfg.access_energy_pj;
            if cpu_l2.lookup(vpn) == Lookup::Hit {
                st.l2_hits += 1;
            } else {
                let (latency, energy) = walk_cost(cpu_ptw);
                st.walks += 1;
                time = time + latency;
                st.walk_stall_ns = st.walk_stall_ns + latency;
                cpu_energy = cpu_energy + energy;
                cpu_l2.fill(vpn);
            }
            if let Some(state) = self.filter.as_mut() {
                state.fill(vpn);
            }
        }

        st.mmu_time_ns = st.mmu_time_ns + time;
        st.mmu_energy_pj = st.mmu_energy_pj + local_energy + cpu_energy;
        st.remote_energy_pj = st.remote_energy_pj + cpu_energy;
        time
    }

    /// Translates one accelerator segment against `cpu`'s L2 TLB.
    pub fn run_segment(&mut self, vpns: impl IntoIterator<Item = Vpn>, cpu: &mut LocalMmu<S>) -> Result<MmuStats<S>> {
        let cpu_id = cpu.config().id.clone();
        let (l2, l2_cfg, ptw) = cpu
            .remote_port()
            .ok_or_else(|| Error::InvalidConfig(format!("{cpu_id}: remote translation needs a CPU L2 TLB")))?;
        let (l2_cfg, ptw) = (l2_cfg.clone(), ptw.clone());
        for vpn in vpns {
            self.translate(vpn, l2, &l2_cfg, &ptw);
        }
        Ok(self.take_stats())
    }

    pub fn take_stats(&mut self) -> MmuStats<S> {
        std::mem::take(&mut self.stats)
    }
}

/// Translates `refs` remotely against the given CPU L2 state.
pub fn simulate_remote<S: Scalar>(
    refs: &[Vpn],
    mode: &TranslationMode<S>,
    cpu_l2: &mut TlbState,
    cpu_l2_cfg: &TlbConfig<S>,
    cpu_ptw: &PtwConfig<S>,
) -> Result<MmuStats<S>> {
    let mut remote = RemoteTranslator::new(mode)?;
    for &vpn in refs {
        remote.translate(vpn, cpu_l2, cpu_l2_cfg, cpu_ptw);
    }
    Ok(remote.take_stats())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2(time: f64) -> TlbConfig<f64> {
        TlbConfig {
            entries: 256,
            ways: 4,
            access_time_ns: time,
            access_energy_pj: 3.0,
            area_mm2: 0.0,
        }
    }

    fn ptw(lat: f64) -> PtwConfig<f64> {
        PtwConfig {
            threads: 1,
            walk_latency_ns: lat,
            walk_mem_access_energy_pj: 10.0,
            area_mm2: 0.0,
        }
    }

    #[test]
    fn no_mmu_hit_costs_round_trip_plus_l2() {
        let cfg = l2(2.0);
        let mut state = TlbState::for_config(&cfg);
        state.fill(Vpn(5));
        let mode = TranslationMode::RemoteNoMmu { one_way_delay_ns: 1.0 };
        let s = simulate_remote(&[Vpn(5)], &mode, &mut state, &cfg, &ptw(100.0)).unwrap();
        assert_eq!(s.mmu_time_ns, 4.0);
        assert_eq!((s.remote_probes, s.l2_hits, s.walks), (1, 1, 0));
    }

    #[test]
    fn no_mmu_miss_adds_cpu_walk() {
        let cfg = l2(2.0);
        let mut state = TlbState::for_config(&cfg);
        let mode = TranslationMode::RemoteNoMmu { one_way_delay_ns: 10.0 };
        let s = simulate_remote(&[Vpn(5)], &mode, &mut state, &cfg, &ptw(100.0)).unwrap();
        assert_eq!(s.mmu_time_ns, 122.0);
        assert!(state.contains(Vpn(5)));
        assert_eq!(s.remote_energy_pj, 3.0 + 40.0);
        assert_eq!(s.mmu_energy_pj, s.remote_energy_pj);
    }

    #[test]
    fn filter_hit_stays_local() {
        let cfg = l2(2.0);
        let mut state = TlbState::for_config(&cfg);
        let filter = TlbConfig {
            entries: 64,
            ways: 4,
            access_time_ns: 0.5,
            access_energy_pj: 1.0,
            area_mm2: 0.0,
        };
        let mode = TranslationMode::RemoteFiltered {
            one_way_delay_ns: 10.0,
            filter,
        };
        let mut remote = RemoteTranslator::new(&mode).unwrap();
        let p = ptw(100.0);
        let first = remote.translate(Vpn(9), &mut state, &cfg, &p);
        assert_eq!(first, 0.5 + 20.0 + 2.0 + 100.0);
        let probes_before = remote.stats.remote_probes;
        let second = remote.translate(Vpn(9), &mut state, &cfg, &p);
        assert_eq!(second, 0.5);
        assert_eq!(remote.stats.remote_probes, probes_before);
        let s = remote.take_stats();
        assert_eq!(s.l1_hits + s.remote_probes, s.refs);
        assert_eq!(s.mmu_energy_pj - s.remote_energy_pj, 2.0);
    }

    #[test]
    fn local_mode_is_rejected() {
        assert!(RemoteTranslator::<f64>::new(&TranslationMode::Local).is_err());
    }
}
