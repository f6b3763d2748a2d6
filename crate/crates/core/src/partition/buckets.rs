//! Gain buckets: for every list (one per destination block) an array of
//! doubly-linked lists indexed by gain, plus a max-gain pointer.
//!
//! Entries are identified by a dense slot id. Ties within a gain are broken
//! first-in first-out: a slot re-inserted after a gain change goes to the
//! back of its new bucket.

const NIL: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    prev: usize,
    next: usize,
    list: usize,
    gain: i64,
    stamp: u64,
    present: bool,
}

#[derive(Debug, Clone)]
pub struct GainBuckets {
    offset: i64,
    width: usize,
    heads: Vec<usize>,
    tails: Vec<usize>,
    /// Per list: bucket index that bounds every occupied bucket from above.
    max: Vec<usize>,
    len: Vec<usize>,
    nodes: Vec<Node>,
    clock: u64,
}

impl GainBuckets {
    /// `max_gain` bounds |gain| for every entry.
    pub fn new(lists: usize, slots: usize, max_gain: i64) -> Self {
        let width = (2 * max_gain + 1) as usize;
        GainBuckets {
            offset: max_gain,
            width,
            heads: vec![NIL; lists * width],
            tails: vec![NIL; lists * width],
            max: vec![0; lists],
            len: vec![0; lists],
            nodes: vec![
                Node {
                    prev: NIL,
                    next: NIL,
                    list: 0,
                    gain: 0,
                    stamp: 0,
                    present: false,
                };
                slots
            ],
            clock: 0,
        }
    }

    fn index(&self, gain: i64) -> usize {
        debug_assert!(gain.abs() <= self.offset, "gain {gain} outside ±{}", self.offset);
        (gain + self.offset) as usize
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.nodes[slot].present
    }

    pub fn gain(&self, slot: usize) -> Option<i64> {
        let n = &self.nodes[slot];
        n.present.then_some(n.gain)
    }

    /// Insertion time of a present slot; smaller means inserted earlier.
    pub fn stamp(&self, slot: usize) -> u64 {
        self.nodes[slot].stamp
    }

    pub fn list_len(&self, list: usize) -> usize {
        self.len[list]
    }

    pub fn insert(&mut self, slot: usize, list: usize, gain: i64) {
        assert!(!self.nodes[slot].present, "slot {slot} inserted twice");
        let b = self.index(gain);
        let cell = list * self.width + b;
        let tail = self.tails[cell];
        self.clock += 1;
        self.nodes[slot] = Node {
            prev: tail,
            next: NIL,
            list,
            gain,
            stamp: self.clock,
            present: true,
        };
        if tail == NIL {
            self.heads[cell] = slot;
        } else {
            self.nodes[tail].next = slot;
        }
        self.tails[cell] = slot;
        if self.len[list] == 0 || b > self.max[list] {
            self.max[list] = b;
        }
        self.len[list] += 1;
    }

    pub fn remove(&mut self, slot: usize) {
        let node = self.nodes[slot];
        assert!(node.present, "slot {slot} not in buckets");
        let cell = node.list * self.width + self.index(node.gain);
        if node.prev == NIL {
            self.heads[cell] = node.next;
        } else {
            self.nodes[node.prev].next = node.next;
        }
        if node.next == NIL {
            self.tails[cell] = node.prev;
        } else {
            self.nodes[node.next].prev = node.prev;
        }
        self.nodes[slot].present = false;
        self.len[node.list] -= 1;
    }

    /// Moves a present slot to `gain + delta`, at the back of its new bucket.
    pub fn adjust(&mut self, slot: usize, delta: i64) {
        let node = self.nodes[slot];
        self.remove(slot);
        self.insert(slot, node.list, node.gain + delta);
    }

    /// Visits the slots of `list` from highest gain down, FIFO inside a gain,
    /// and returns the first one accepted by `ok` together with its gain.
    /// Lowers the max pointer past empty buckets on the way.
    pub fn best_where(&mut self, list: usize, mut ok: impl FnMut(usize) -> bool) -> Option<(usize, i64)> {
        if self.len[list] == 0 {
            return None;
        }
        let base = list * self.width;
        while self.heads[base + self.max[list]] == NIL {
            self.max[list] -= 1;
        }
        let mut b = self.max[list] as i64;
        while b >= 0 {
            let mut slot = self.heads[base + b as usize];
            while slot != NIL {
                if ok(slot) {
                    return Some((slot, self.nodes[slot].gain));
                }
                slot = self.nodes[slot].next;
            }
            b -= 1;
        }
        None
    }

    /// Checks the structural invariants; used by tests.
    pub fn check(&self) -> bool {
        let lists = self.len.len();
        let mut counted = vec![0usize; lists];
        for list in 0..lists {
            for b in 0..self.width {
                let cell = list * self.width + b;
                let mut prev = NIL;
                let mut slot = self.heads[cell];
                while slot != NIL {
                    let n = &self.nodes[slot];
                    if !n.present || n.list != list || self.index(n.gain) != b || n.prev != prev {
                        return false;
                    }
                    if self.len[list] > 0 && b > self.max[list] {
                        return false;
                    }
                    counted[list] += 1;
                    prev = slot;
                    slot = n.next;
                }
                if self.tails[cell] != prev {
                    return false;
                }
            }
        }
        counted == self.len
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn fifo_within_gain() {
        let mut b = GainBuckets::new(1, 4, 3);
        b.insert(2, 0, 1);
        b.insert(0, 0, 1);
        b.insert(1, 0, -2);
        assert_eq!(b.best_where(0, |_| true), Some((2, 1)));
        // slot 2 moves back once re-inserted at the same gain
        b.adjust(2, 0);
        assert_eq!(b.best_where(0, |_| true), Some((0, 1)));
        assert_eq!(b.best_where(0, |s| s != 0 && s != 2), Some((1, -2)));
        assert!(b.check());
    }

    #[test]
    fn max_pointer_drops_lazily() {
        let mut b = GainBuckets::new(2, 3, 2);
        b.insert(0, 1, 2);
        b.insert(1, 1, -1);
        b.remove(0);
        assert!(b.check());
        assert_eq!(b.best_where(1, |_| true), Some((1, -1)));
        assert_eq!(b.best_where(0, |_| true), None);
        b.remove(1);
        assert_eq!(b.best_where(1, |_| true), None);
        b.insert(1, 1, 0);
        assert_eq!(b.best_where(1, |_| true), Some((1, 0)));
    }

    proptest! {
        #[test]
        fn best_is_maximal(ops in proptest::collection::vec((0usize..12, 0usize..3, -5i64..=5, any::<bool>()), 1..80)) {
            let mut b = GainBuckets::new(3, 12, 5);
            let mut model: Vec<Option<(usize, i64, u64)>> = vec![None; 12];
            let mut clock = 0u64;
            for (slot, list, gain, remove) in ops {
                match model[slot] {
                    Some(_) if remove => {
                        b.remove(slot);
                        model[slot] = None;
                    }
                    Some((l, g, _)) => {
                        let delta = (gain - g).clamp(-5 - g, 5 - g);
                        b.adjust(slot, delta);
                        clock += 1;
                        model[slot] = Some((l, g + delta, clock));
                    }
                    None => {
                        b.insert(slot, list, gain);
                        clock += 1;
                        model[slot] = Some((list, gain, clock));
                    }
                }
                prop_assert!(b.check());
                for l in 0..3 {
                    let expect = model
                        .iter()
                        .enumerate()
                        .filter_map(|(s, m)| m.filter(|m| m.0 == l).map(|m| (s, m.1, m.2)))
                        .max_by(|x, y| x.1.cmp(&y.1).then(y.2.cmp(&x.2)))
                        .map(|(s, g, _)| (s, g));
                    prop_assert_eq!(b.best_where(l, |_| true), expect);
                }
            }
        }
    }
}
