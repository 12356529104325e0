//! Translation hardware models.
//!
//! Pages are 4 KiB and page tables are x86-style four-level radix trees.
//! Only data-side translations are modelled and every translation succeeds
//! (no page faults).

mod local;
mod ptw;
mod remote;
mod tlb;

pub use local::{simulate_local, LocalMmu, MmuConfig, MmuStats, TimedRef, TimingModel, Translation, TranslationOutcome};
pub use ptw::{walk_cost, PtwConfig, WalkScheduler};
pub use remote::{simulate_remote, RemoteTranslator, TranslationMode};
pub use tlb::{Lookup, TlbConfig, TlbState};

use std::fmt;

use crate::error::{Error, Result};
use crate::trace::VA_MAX;

pub const PAGE_SHIFT: u32 = 12;
pub const PAGE_SIZE: u64 = 1 << PAGE_SHIFT;
/// Radix levels touched by one page table walk.
pub const PT_LEVELS: u32 = 4;

/// Virtual page number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vpn(pub u64);

impl fmt::Display for Vpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

pub fn vpn_of(vaddr: u64) -> Result<Vpn> {
    if vaddr > VA_MAX {
        return Err(Error::NonCanonical(vaddr));
    }
    Ok(Vpn(vaddr >> PAGE_SHIFT))
}
