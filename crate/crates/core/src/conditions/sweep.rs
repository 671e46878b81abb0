//! Pair sweeps over grid points ordered by a strict "level" (usually the
//! action). A pair (p₁, p₂) is admissible when p₁ is on a strictly lower level
//! than p₂, p₁ is flagged `lower`, p₂ is flagged `upper`, and, for the
//! keyed sweep, `key(p₁) < key(p₂)`. The margin of a pair is
//! `score(p₂) − score(p₁)`.
//!
//! Each sweep keeps, per query, the 16 best lower candidates (highest score,
//! then lexicographic on the point). For a fixed upper point that candidate
//! order coincides with the global witness order, so the global top-16 pairs
//! are always among the offered candidates and the witness list is identical
//! to full enumeration.

use std::cmp::Ordering;

use super::{GridPoint, Witness, MAX_WITNESSES};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub point: GridPoint,
    pub score: f64,
    pub key: f64,
    pub lower: bool,
    pub upper: bool,
}

fn candidate_order(a: &Entry, b: &Entry) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.point.state.total_cmp(&b.point.state))
        .then(a.point.action.total_cmp(&b.point.action))
}

/// Best `MAX_WITNESSES` lower candidates, best first.
#[derive(Debug, Clone, Default)]
pub(crate) struct TopK {
    items: Vec<Entry>,
}

impl TopK {
    pub fn insert(&mut self, e: Entry) {
        if self.items.len() == MAX_WITNESSES
            && candidate_order(&e, self.items.last().unwrap()) != Ordering::Less
        {
            return;
        }
        let pos = self.items.partition_point(|x| candidate_order(x, &e) != Ordering::Greater);
        self.items.insert(pos, e);
        self.items.truncate(MAX_WITNESSES);
    }

    pub fn merge_from(&mut self, other: &TopK) {
        for e in &other.items {
            self.insert(*e);
        }
    }

    pub fn best(&self) -> Option<&Entry> {
        self.items.first()
    }
}

/// Smallest-margin witnesses in canonical order.
#[derive(Debug, Clone, Default)]
pub(crate) struct WitnessSet {
    items: Vec<Witness>,
}

impl WitnessSet {
    fn accepts_margin(&self, margin: f64) -> bool {
        self.items.len() < MAX_WITNESSES || margin <= self.items.last().unwrap().margin
    }

    pub fn insert(&mut self, w: Witness) {
        if self.items.len() == MAX_WITNESSES && w.order(self.items.last().unwrap()) != Ordering::Less {
            return;
        }
        let pos = self.items.partition_point(|x| x.order(&w) != Ordering::Greater);
        self.items.insert(pos, w);
        self.items.truncate(MAX_WITNESSES);
    }

    pub fn into_vec(self) -> Vec<Witness> {
        self.items
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PairAccumulator {
    pub min_margin: f64,
    pub pairs: u64,
    pub witnesses: WitnessSet,
}

impl Default for PairAccumulator {
    fn default() -> Self {
        Self { min_margin: f64::INFINITY, pairs: 0, witnesses: WitnessSet::default() }
    }
}

impl PairAccumulator {
    fn offer(&mut self, upper: &Entry, candidates: &TopK, count: u64) {
        self.pairs += count;
        if let Some(best) = candidates.best() {
            self.min_margin = self.min_margin.min(upper.score - best.score);
        }
        for c in &candidates.items {
            let margin = upper.score - c.score;
            if !self.witnesses.accepts_margin(margin) {
                break;
            }
            self.witnesses.insert(Witness {
                first: c.point,
                second: upper.point,
                first_value: c.score,
                second_value: upper.score,
                margin,
            });
        }
    }
}

/// Running prefix maximum over strictly lower levels.
pub(crate) fn prefix_sweep<'a>(levels: impl IntoIterator<Item = &'a [Entry]>, acc: &mut PairAccumulator) {
    let mut top = TopK::default();
    let mut count = 0u64;
    for level in levels {
        for e in level.iter().filter(|e| e.upper) {
            acc.offer(e, &top, count);
        }
        for e in level.iter().filter(|e| e.lower) {
            top.insert(*e);
            count += 1;
        }
    }
}

/// Prefix sweep with the extra constraint `key(p₁) < key(p₂)`, answered by a
/// Fenwick tree over key ranks.
pub(crate) fn keyed_sweep(levels: &[&[Entry]], acc: &mut PairAccumulator) {
    let mut keys: Vec<f64> = levels.iter().flat_map(|l| l.iter().map(|e| e.key + 0.0)).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();
    let m = keys.len();
    let rank = |k: f64| keys.partition_point(|&x| x.total_cmp(&(k + 0.0)) == Ordering::Less);
    let mut tops = vec![TopK::default(); m + 1];
    let mut counts = vec![0u64; m + 1];

    for level in levels {
        for e in level.iter().filter(|e| e.upper) {
            let mut i = rank(e.key);
            let mut merged = TopK::default();
            let mut count = 0;
            while i > 0 {
                merged.merge_from(&tops[i]);
                count += counts[i];
                i &= i - 1;
            }
            acc.offer(e, &merged, count);
        }
        for e in level.iter().filter(|e| e.lower) {
            let mut i = rank(e.key) + 1;
            while i <= m {
                tops[i].insert(*e);
                counts[i] += 1;
                i += i & i.wrapping_neg();
            }
        }
    }
}
