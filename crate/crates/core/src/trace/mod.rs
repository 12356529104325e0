//! Dynamic instruction traces.
//!
//! A trace is the ordered stream of executed instructions, each carrying at
//! most one data-side virtual address. The text form is one record per line:
//!
//! ```text
//! # comment
//! pc=0x400 va=0x1000
//! pc=0x404
//! ```
//!
//! Addresses are hexadecimal (the `0x` prefix is optional on input) and must
//! fit in 48 bits. The binary form is 16 bytes per record, little-endian
//! `pc` then `vaddr`, with an all-ones `vaddr` meaning "no data reference".

mod hotspot;
mod pattern;
mod synthetic;

pub use hotspot::{accelerated_fraction, identify_hotspots, HotspotPartition, Segment, SegmentKind};
pub use pattern::{apply_pattern, reorder_accelerator_refs, segment_seed, PatternKind, XorShift64Star};
pub use synthetic::{generate_synthetic, Locality, SyntheticSpec};

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};

/// Width of the canonical four-level virtual address space.
pub const VA_BITS: u32 = 48;
/// Largest representable virtual address.
pub const VA_MAX: u64 = (1 << VA_BITS) - 1;

const BINARY_ABSENT: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstructionRecord {
    pub pc: u64,
    pub data_vaddr: Option<u64>,
}

impl InstructionRecord {
    pub fn new(pc: u64, data_vaddr: Option<u64>) -> Self {
        Self { pc, data_vaddr }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub name: String,
    pub records: Vec<InstructionRecord>,
}

impl Trace {
    pub fn new(name: impl Into<String>, records: Vec<InstructionRecord>) -> Self {
        Self {
            name: name.into(),
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of records carrying a data reference.
    pub fn mem_refs(&self) -> usize {
        self.records.iter().filter(|r| r.data_vaddr.is_some()).count()
    }

    /// Parses the text form.
    pub fn parse<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::MalformedTrace {
                line: lineno,
                msg: e.to_string(),
            })?;
            if let Some(record) = parse_line(&line, lineno)? {
                records.push(record);
            }
        }
        Ok(Self::new(name, records))
    }

    pub fn parse_str(name: impl Into<String>, text: &str) -> Result<Self> {
        Self::parse(name, text.as_bytes())
    }

    /// Writes the text form, preceded by a comment naming the trace.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# trace {}", self.name)?;
        writeln!(out, "# records {}", self.records.len())?;
        for r in &self.records {
            match r.data_vaddr {
                Some(va) => writeln!(out, "pc={:#x} va={:#x}", r.pc, va)?,
                None => writeln!(out, "pc={:#x}", r.pc)?,
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("trace text is ASCII")
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            out.write_all(&r.pc.to_le_bytes())?;
            out.write_all(&r.data_vaddr.unwrap_or(BINARY_ABSENT).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(name: impl Into<String>, mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input
            .read_to_end(&mut bytes)
            .map_err(|e| Error::MalformedTrace {
                line: 0,
                msg: e.to_string(),
            })?;
        if bytes.len() % 16 != 0 {
            return Err(Error::MalformedTrace {
                line: bytes.len() / 16 + 1,
                msg: format!("binary trace length {} is not a multiple of 16", bytes.len()),
            });
        }
        let mut records = Vec::with_capacity(bytes.len() / 16);
        for (idx, chunk) in bytes.chunks_exact(16).enumerate() {
            let pc = u64::from_le_bytes(chunk[..8].try_into().unwrap());
            let va = u64::from_le_bytes(chunk[8..].try_into().unwrap());
            let data_vaddr = (va != BINARY_ABSENT).then_some(va);
            for addr in std::iter::once(pc).chain(data_vaddr) {
                if addr > VA_MAX {
                    return Err(Error::AddressRange { line: idx + 1, addr });
                }
            }
            records.push(InstructionRecord { pc, data_vaddr });
        }
        Ok(Self::new(name, records))
    }
}

fn parse_line(line: &str, lineno: usize) -> Result<Option<InstructionRecord>> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let malformed = |msg: String| Error::MalformedTrace { line: lineno, msg };

    let mut fields = line.split_whitespace();
    let pc = match fields.next().and_then(|f| f.strip_prefix("pc=")) {
        Some(hex) => parse_addr(hex, lineno)?,
        None => return Err(malformed(format!("expected `pc=<hex>`, got {line:?}"))),
    };
    let data_vaddr = match fields.next() {
        None => None,
        Some(f) => match f.strip_prefix("va=") {
            Some(hex) => Some(parse_addr(hex, lineno)?),
            None => return Err(malformed(format!("expected `va=<hex>`, got {f:?}"))),
        },
    };
    if let Some(extra) = fields.next() {
        return Err(malformed(format!("unexpected trailing field {extra:?}")));
    }
    Ok(Some(InstructionRecord { pc, data_vaddr }))
}

fn parse_addr(hex: &str, lineno: usize) -> Result<u64> {
    let digits = hex
        .strip_prefix("0x")
        .or_else(|| hex.strip_prefix("0X"))
        .unwrap_or(hex);
    let addr = u64::from_str_radix(digits, 16).map_err(|e| Error::MalformedTrace {
        line: lineno,
        msg: format!("bad hex address {hex:?}: {e}"),
    })?;
    if addr > VA_MAX {
        return Err(Error::AddressRange { line: lineno, addr });
    }
    Ok(addr)
}
