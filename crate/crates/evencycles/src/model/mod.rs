//! Core model: host families, cycles, packings, leaves, classification,
//! and the decomposition text format.

mod cycle;
pub mod format;
mod host;
mod leave;
mod packing;

pub use cycle::{trace_cycle, Cycle};
pub use host::{Edge, HostGraph, HostKind, PairSet, Vertex};
pub use leave::{classify, ChainStructure, ComponentClass, LeaveComponent, LeaveStructure};
pub use packing::{LeaveGraph, Packing};

pub(crate) use host::BitIter;

/// A non-decreasing list of even cycle lengths, each at least 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthList(Vec<usize>);

impl LengthList {
    pub fn new(mut lengths: Vec<usize>) -> crate::error::Result<Self> {
        lengths.sort_unstable();
        for &m in &lengths {
            if m < 4 || m % 2 != 0 {
                return Err(crate::error::Error::InvalidParameters(format!(
                    "cycle length {m} is not an even integer at least 4"
                )));
            }
        }
        Ok(LengthList(lengths))
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for LengthList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}
