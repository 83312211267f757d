//! Reveal scheduling: a reward earned at round `s` with delay `tau` becomes
//! visible at round `ceil(s + tau)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::record::BanditRecord;

/// `ceil(s + tau)`: the unique round `t` with `t - 1 < s + tau <= t`.
pub fn reveal_round(s: usize, tau: f64) -> usize {
    // saturates for astronomically long delays
    (s as f64 + tau).ceil() as usize
}

#[derive(Debug, Clone, Default)]
pub struct RevealQueue {
    buckets: BTreeMap<usize, Vec<BanditRecord>>,
    inserted: usize,
    popped: usize,
    last_popped: usize,
}

impl RevealQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Files `record` (earned at round `s`) under its reveal round and returns it.
    pub fn schedule(&mut self, s: usize, tau: f64, record: BanditRecord) -> Result<usize> {
        if s == 0 {
            return Err(Error::Argument("rounds start at 1".into()));
        }
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::Argument(format!(
                "delay must be finite and >= 0, got {tau}"
            )));
        }
        if record.round != s {
            return Err(Error::Argument(format!(
                "record belongs to round {} but is scheduled for round {s}",
                record.round
            )));
        }
        let bucket = reveal_round(s, tau);
        if bucket <= self.last_popped {
            return Err(Error::Protocol(format!(
                "round {s} would reveal at {bucket}, but rounds through {} were already drained",
                self.last_popped
            )));
        }
        self.buckets.entry(bucket).or_default().push(record);
        self.inserted += 1;
        Ok(bucket)
    }

    /// Removes and returns everything revealed at round `t`, in ascending
    /// round order. Rounds must be drained one at a time, in order.
    pub fn pop_revealed(&mut self, t: usize) -> Result<Vec<BanditRecord>> {
        if t != self.last_popped + 1 {
            return Err(Error::Protocol(format!(
                "reveal round {t} requested after round {}",
                self.last_popped
            )));
        }
        self.last_popped = t;
        let mut out = self.buckets.remove(&t).unwrap_or_default();
        out.sort_by_key(|r| r.round);
        self.popped += out.len();
        Ok(out)
    }

    pub fn pending_count(&self) -> usize {
        self.inserted - self.popped
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn popped(&self) -> usize {
        self.popped
    }

    /// Rounds still waiting, with their reveal round.
    pub fn pending(&self) -> impl Iterator<Item = (usize, &BanditRecord)> {
        self.buckets
            .iter()
            .flat_map(|(&b, recs)| recs.iter().map(move |r| (b, r)))
    }
}
