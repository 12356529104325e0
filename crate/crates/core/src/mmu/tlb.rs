use serde::{Deserialize, Serialize};

use super::Vpn;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Geometry and per-access cost of one TLB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TlbConfig<S> {
    pub entries: usize,
    pub ways: usize,
    pub access_time_ns: S,
    pub access_energy_pj: S,
    pub area_mm2: S,
}

impl<S: Scalar> TlbConfig<S> {
    /// A TLB with zero time, energy and area; handy for behavioural tests.
    pub fn free(entries: usize, ways: usize) -> Self {
        Self {
            entries,
            ways,
            access_time_ns: S::zero(),
            access_energy_pj: S::zero(),
            area_mm2: S::zero(),
        }
    }

    pub fn sets(&self) -> usize {
        self.entries / self.ways
    }

    /// `entries x ways`, e.g. `64x4`.
    pub fn label(&self) -> String {
        format!("{}x{}", self.entries, self.ways)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("TLB {}: {msg}", self.label())));
        if self.ways == 0 || self.entries == 0 {
            return bad("entries and ways must be positive".into());
        }
        if !self.entries.is_multiple_of(self.ways) {
            return bad("entries must be a multiple of ways".into());
        }
        if !self.sets().is_power_of_two() {
            return bad(format!("{} sets is not a power of two", self.sets()));
        }
        for (name, v) in [
            ("access_time_ns", self.access_time_ns),
            ("access_energy_pj", self.access_energy_pj),
            ("area_mm2", self.area_mm2),
        ] {
            if !(v >= S::zero() && v.is_finite()) {
                return bad(format!("{name} = {v} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
}

/// Set-associative LRU tag store. Each set keeps its tags most-recent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TlbState {
    sets: Vec<Vec<Vpn>>,
    ways: usize,
}

impl TlbState {
    pub fn new(sets: usize, ways: usize) -> Self {
        assert!(sets > 0 && ways > 0, "TLB needs at least one set and one way");
        Self {
            sets: vec![Vec::with_capacity(ways); sets],
            ways,
        }
    }

    pub fn for_config<S: Scalar>(cfg: &TlbConfig<S>) -> Self {
        Self::new(cfg.sets(), cfg.ways)
    }

    fn set_index(&self, vpn: Vpn) -> usize {
        (vpn.0 % self.sets.len() as u64) as usize
    }

    /// Probes for `vpn`; a hit promotes the entry to most-recent.
    pub fn lookup(&mut self, vpn: Vpn) -> Lookup {
        let idx = self.set_index(vpn);
        let set = &mut self.sets[idx];
        match set.iter().position(|&v| v == vpn) {
            Some(pos) => {
                set[..=pos].rotate_right(1);
                Lookup::Hit
            }
            None => Lookup::Miss,
        }
    }

    /// Inserts `vpn` as most-recent, returning the LRU victim of a full set.
    /// Filling a tag that is already present only promotes it.
    pub fn fill(&mut self, vpn: Vpn) -> Option<Vpn> {
        let idx = self.set_index(vpn);
        let ways = self.ways;
        let set = &mut self.sets[idx];
        if let Some(pos) = set.iter().position(|&v| v == vpn) {
            set[..=pos].rotate_right(1);
            return None;
        }
        set.insert(0, vpn);
        if set.len() > ways {
            set.pop()
        } else {
            None
        }
    }

    /// Membership test that leaves recency untouched.
    pub fn contains(&self, vpn: Vpn) -> bool {
        self.sets[self.set_index(vpn)].contains(&vpn)
    }

    pub fn occupancy(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Tags of the set `vpn` maps to, most-recent first.
    pub fn set_of(&self, vpn: Vpn) -> &[Vpn] {
        &self.sets[self.set_index(vpn)]
    }

    pub fn clear(&mut self) {
        self.sets.iter_mut().for_each(Vec::clear);
    }
}
