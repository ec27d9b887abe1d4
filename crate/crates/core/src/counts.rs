//! Measurement histograms and the counts JSON file.
//!
//! ```json
//! { "n": 2, "family": [{"u": 0.7071, "v": 0.7071, "phi": 0.0}, ...],
//!   "records": [{ "basis": {"tag": "computational"}, "shots": 8192,
//!                 "counts": {"00": 4100, "11": 4092} }] }
//! ```
//!
//! Bitstrings are the binary outcome index with the leftmost character being
//! qubit n−1. Outcomes with zero counts are omitted.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bases::{BasisId, Family};
use crate::error::{Error, Result};

/// Sparse histogram of one basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountsRecord {
    basis: BasisId,
    n: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl CountsRecord {
    /// Zero entries are dropped; the remaining counts must sum to `shots`.
    pub fn new(basis: BasisId, n: usize, shots: u64, counts: BTreeMap<usize, u64>) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize {
            return Err(Error::InvalidCounts(format!("bad qubit count {n}")));
        }
        if shots == 0 {
            return Err(Error::InvalidCounts("shots must be >= 1".into()));
        }
        let counts: BTreeMap<usize, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        if let Some((&k, _)) = counts.iter().next_back() {
            if k >= 1 << n {
                return Err(Error::InvalidCounts(format!(
                    "outcome {k} out of range for n={n}"
                )));
            }
        }
        let total: u64 = counts.values().sum();
        if total != shots {
            return Err(Error::InvalidCounts(format!(
                "{basis}: counts sum to {total}, shots = {shots}"
            )));
        }
        Ok(CountsRecord {
            basis,
            n,
            shots,
            counts,
        })
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }
}

pub fn bitstring(outcome: usize, n: usize) -> String {
    format!("{outcome:0n$b}")
}

pub fn parse_bitstring(s: &str, n: usize) -> Result<usize> {
    if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidCounts(format!(
            "outcome key '{s}' is not a {n}-bit string"
        )));
    }
    usize::from_str_radix(s, 2).map_err(|e| Error::InvalidCounts(e.to_string()))
}

/// A full counts file: the family used and one record per basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsFile {
    pub n: usize,
    pub family: Family,
    pub records: Vec<CountsRecord>,
}

#[derive(Serialize, Deserialize)]
struct WireFile {
    n: usize,
    family: Family,
    records: Vec<WireRecord>,
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    basis: BasisId,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl CountsFile {
    pub fn new(n: usize, family: Family, records: Vec<CountsRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &records {
            if r.n != n {
                return Err(Error::InvalidCounts(format!(
                    "record {} has n={}, file has n={n}",
                    r.basis, r.n
                )));
            }
            r.basis
                .validate(n, family.len())
                .map_err(|e| Error::InvalidCounts(e.to_string()))?;
            if !seen.insert(r.basis) {
                return Err(Error::InvalidCounts(format!("duplicate basis {}", r.basis)));
            }
        }
        Ok(CountsFile { n, family, records })
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = WireFile {
            n: self.n,
            family: self.family.clone(),
            records: self
                .records
                .iter()
                .map(|r| WireRecord {
                    basis: r.basis,
                    shots: r.shots,
                    counts: r
                        .counts
                        .iter()
                        .map(|(&k, &c)| (bitstring(k, self.n), c))
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireFile = serde_json::from_str(text)?;
        let n = wire.n;
        let records = wire
            .records
            .into_iter()
            .map(|w| {
                let counts = w
                    .counts
                    .iter()
                    .map(|(k, &c)| Ok((parse_bitstring(k, n)?, c)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                CountsRecord::new(w.basis, n, w.shots, counts)
            })
            .collect::<Result<Vec<_>>>()?;
        CountsFile::new(n, wire.family, records)
    }
}

pub fn read_counts(path: impl AsRef<Path>) -> Result<CountsFile> {
    CountsFile::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_counts(file: &CountsFile, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, file.to_json()?)?;
    Ok(())
}
