//! Meta-level models of the corpus data structures, written directly in
//! Rust and independent of the interpreter.

use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HashFn {
    /// Every element hashes to 0.
    H0,
    /// The identity.
    H1,
}

impl HashFn {
    pub const ALL: [HashFn; 2] = [HashFn::H0, HashFn::H1];

    pub fn apply(self, x: i64) -> i64 {
        match self {
            HashFn::H0 => 0,
            HashFn::H1 => x,
        }
    }

    /// The library name of the corresponding source function.
    pub fn name(self) -> &'static str {
        match self {
            HashFn::H0 => "h0",
            HashFn::H1 => "h1",
        }
    }
}

/// One slot of a hash-set array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Empty,
    Elem(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{distinct} distinct elements do not fit in capacity {capacity}")]
    OverCapacity { distinct: usize, capacity: usize },
    #[error("the maximum of an empty sequence is undefined")]
    Empty,
}

pub fn oracle_dedup(input: &[i64]) -> BTreeSet<i64> {
    input.iter().copied().collect()
}

pub fn oracle_max(inputs: &[i64]) -> Result<i64, OracleError> {
    inputs.iter().copied().max().ok_or(OracleError::Empty)
}

/// The array layout after inserting `inserts` one at a time, following the
/// same probing discipline as the source `hadd`: runs stay sorted, and a
/// larger element displaces a smaller one, which is then reinserted further
/// along.
pub fn oracle_sequential_hashset(
    capacity: usize,
    hash: HashFn,
    inserts: &[i64],
) -> Result<Vec<Slot>, OracleError> {
    let distinct = oracle_dedup(inserts).len();
    if distinct > capacity || (capacity == 0 && !inserts.is_empty()) {
        return Err(OracleError::OverCapacity { distinct, capacity });
    }
    let mut slots = vec![Slot::Empty; capacity];
    let n = capacity as i64;
    for &x in inserts {
        let mut x = x;
        let mut i = hash.apply(x).rem_euclid(n) as usize;
        loop {
            match slots[i] {
                Slot::Elem(y) if y == x => break,
                Slot::Empty => {
                    slots[i] = Slot::Elem(x);
                    break;
                }
                Slot::Elem(y) => {
                    let j = (i + 1) % capacity;
                    if x < y {
                        i = j;
                    } else {
                        slots[i] = Slot::Elem(x);
                        x = y;
                        i = j;
                    }
                }
            }
        }
    }
    Ok(slots)
}

/// The non-empty slots in ascending index order.
pub fn compact(slots: &[Slot]) -> Vec<i64> {
    slots
        .iter()
        .filter_map(|s| match s {
            Slot::Elem(x) => Some(*x),
            Slot::Empty => None,
        })
        .collect()
}
