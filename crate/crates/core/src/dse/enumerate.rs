//! The explored configuration spaces.
//!
//! Accelerator MMUs (54): PTW-only for each walker width, then each of two
//! L1 TLBs with each width, then each L1 with each of three L2 sizes and
//! each width. CPU MMUs (9): three L1 TLBs crossed with three L2 TLBs, all
//! with a serial walker. Systems (486): every accelerator MMU with every CPU
//! MMU in local mode.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mmu::{MmuConfig, TranslationMode};
use crate::params::ParamPack;
use crate::scalar::Scalar;

pub const PTW_THREADS: [usize; 6] = [1, 2, 4, 8, 16, 32];
pub const ACC_L1: [(usize, usize); 2] = [(32, 2), (64, 4)];
pub const L2_ENTRIES: [usize; 3] = [256, 512, 1024];
pub const CPU_L1: [(usize, usize); 3] = [(32, 2), (64, 4), (128, 8)];
/// Sandybridge-style CPU MMU used as the software-only baseline.
pub const BASELINE_CPU_L1: (usize, usize) = (64, 4);
pub const BASELINE_CPU_L2_ENTRIES: usize = 512;
pub const SMALLEST_L1: (usize, usize) = (32, 2);

/// A complete system: CPU MMU, accelerator MMU (local mode only) and the
/// accelerator's translation mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SystemConfig<S> {
    pub id: String,
    pub cpu: MmuConfig<S>,
    pub acc: Option<MmuConfig<S>>,
    pub mode: TranslationMode<S>,
}

type Shape = Option<(usize, usize)>;

pub fn enumerate_accel_configs<S: Scalar>(p: &ParamPack<S>) -> Result<Vec<MmuConfig<S>>> {
    let mut shapes: Vec<(Shape, Shape)> = vec![(None, None)];
    shapes.extend(ACC_L1.iter().map(|&l1| (Some(l1), None)));
    for &l1 in &ACC_L1 {
        shapes.extend(L2_ENTRIES.iter().map(|&e| (Some(l1), Some((e, p.acc_l2_ways)))));
    }
    let mut out = Vec::with_capacity(54);
    for (l1, l2) in shapes {
        for &w in &PTW_THREADS {
            let cfg = MmuConfig {
                id: format!("acc{:02}", out.len()),
                l1: l1.map(|(e, a)| p.tlb(e, a)).transpose()?,
                l2: l2.map(|(e, a)| p.tlb(e, a)).transpose()?,
                ptw: p.ptw(w)?,
            };
            cfg.validate()?;
            out.push(cfg);
        }
    }
    Ok(out)
}

fn cpu_config<S: Scalar>(p: &ParamPack<S>, id: String, l1: (usize, usize), l2_entries: usize) -> Result<MmuConfig<S>> {
    let cfg = MmuConfig {
        id,
        l1: Some(p.tlb(l1.0, l1.1)?),
        l2: Some(p.tlb(l2_entries, p.cpu_l2_ways)?),
        ptw: p.ptw(1)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn enumerate_cpu_configs<S: Scalar>(p: &ParamPack<S>) -> Result<Vec<MmuConfig<S>>> {
    let mut out = Vec::with_capacity(9);
    for &l1 in &CPU_L1 {
        for &l2 in &L2_ENTRIES {
            out.push(cpu_config(p, format!("cpu{}", out.len()), l1, l2)?);
        }
    }
    Ok(out)
}

/// The software-only baseline CPU MMU. Its id matches the equal member of
/// [`enumerate_cpu_configs`].
pub fn baseline_cpu_config<S: Scalar>(p: &ParamPack<S>) -> Result<MmuConfig<S>> {
    let l1 = CPU_L1.iter().position(|&g| g == BASELINE_CPU_L1).expect("baseline L1 in grid");
    let l2 = L2_ENTRIES
        .iter()
        .position(|&e| e == BASELINE_CPU_L2_ENTRIES)
        .expect("baseline L2 in grid");
    cpu_config(p, format!("cpu{}", l1 * L2_ENTRIES.len() + l2), BASELINE_CPU_L1, BASELINE_CPU_L2_ENTRIES)
}

pub fn smallest_l1<S: Scalar>(p: &ParamPack<S>) -> Result<crate::mmu::TlbConfig<S>> {
    p.tlb(SMALLEST_L1.0, SMALLEST_L1.1)
}

/// Every accelerator MMU crossed with every CPU MMU, in local mode.
/// Ids are `<cpu id>-<acc id>`.
pub fn enumerate_system_configs<S: Scalar>(accs: &[MmuConfig<S>], cpus: &[MmuConfig<S>]) -> Vec<SystemConfig<S>> {
    cpus.iter()
        .flat_map(|cpu| {
            accs.iter().map(move |acc| SystemConfig {
                id: format!("{}-{}", cpu.id, acc.id),
                cpu: cpu.clone(),
                acc: Some(acc.clone()),
                mode: TranslationMode::Local,
            })
        })
        .collect()
}

/// One CPU-managed system per CPU MMU for a remote mode. Ids are
/// `<cpu id>-<mode label>`.
pub fn remote_system_configs<S: Scalar>(cpus: &[MmuConfig<S>], mode: &TranslationMode<S>) -> Vec<SystemConfig<S>> {
    cpus.iter()
        .map(|cpu| SystemConfig {
            id: format!("{}-{}", cpu.id, mode.label()),
            cpu: cpu.clone(),
            acc: None,
            mode: mode.clone(),
        })
        .collect()
}

/// The remote modes the parameter pack describes.
pub fn remote_modes<S: Scalar>(p: &ParamPack<S>) -> Result<[TranslationMode<S>; 2]> {
    Ok([
        TranslationMode::RemoteNoMmu {
            one_way_delay_ns: p.one_way_delay_ns,
        },
        TranslationMode::RemoteFiltered {
            one_way_delay_ns: p.one_way_delay_ns,
            filter: p.filter_tlb()?,
        },
    ])
}
