//! Balanced ordered map with subtree-minimum augmentation.
//!
//! Keys are (coordinate, sequence) pairs: the sequence number disambiguates
//! equal coordinates so keys are unique. Values are (score, owner) pairs
//! minimized lexicographically, which bakes the smallest-owner tie-break
//! into every aggregate. Balancing is a treap with priorities derived
//! deterministically from the insertion sequence, so structure and results
//! are reproducible run to run.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Key {
    pub coord: f64,
    pub seq: u64,
}

impl Key {
    fn less(self, other: Key) -> bool {
        self.coord < other.coord || (self.coord == other.coord && self.seq < other.seq)
    }
}

pub type Value = (f64, u64);

fn min_val(a: Value, b: Value) -> Value {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone)]
struct Node {
    key: Key,
    value: Value,
    prio: u64,
    left: Option<usize>,
    right: Option<usize>,
    sub_min: Value,
}

#[derive(Debug, Clone, Default)]
pub struct Treap {
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: Option<usize>,
    len: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl Treap {
    pub fn new() -> Self {
        Treap::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn pull(&mut self, i: usize) {
        let mut m = self.nodes[i].value;
        if let Some(l) = self.nodes[i].left {
            m = min_val(m, self.nodes[l].sub_min);
        }
        if let Some(r) = self.nodes[i].right {
            m = min_val(m, self.nodes[r].sub_min);
        }
        self.nodes[i].sub_min = m;
    }

    /// Split by key: left gets keys < k, right keys >= k.
    fn split(&mut self, t: Option<usize>, k: Key) -> (Option<usize>, Option<usize>) {
        let Some(i) = t else { return (None, None) };
        if self.nodes[i].key.less(k) {
            let (l, r) = self.split(self.nodes[i].right, k);
            self.nodes[i].right = l;
            self.pull(i);
            (Some(i), r)
        } else {
            let (l, r) = self.split(self.nodes[i].left, k);
            self.nodes[i].left = r;
            self.pull(i);
            (l, Some(i))
        }
    }

    fn merge(&mut self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(i), Some(j)) => {
                if self.nodes[i].prio >= self.nodes[j].prio {
                    let m = self.merge(self.nodes[i].right, Some(j));
                    self.nodes[i].right = m;
                    self.pull(i);
                    Some(i)
                } else {
                    let m = self.merge(Some(i), self.nodes[j].left);
                    self.nodes[j].left = m;
                    self.pull(j);
                    Some(j)
                }
            }
        }
    }

    /// Insert a unique key. Panics in debug builds if the key exists.
    pub fn insert(&mut self, key: Key, value: Value) {
        debug_assert!(self.find(key).is_none(), "duplicate treap key");
        let node = Node {
            key,
            value,
            prio: splitmix64(key.seq ^ 0xd1b54a32d192ed03),
            left: None,
            right: None,
            sub_min: value,
        };
        let idx = if let Some(f) = self.free.pop() {
            self.nodes[f] = node;
            f
        } else {
            self.nodes.push(node);
            self.nodes.len() - 1
        };
        let (l, r) = self.split(self.root, key);
        let lm = self.merge(l, Some(idx));
        self.root = self.merge(lm, r);
        self.len += 1;
    }

    fn find(&self, key: Key) -> Option<usize> {
        let mut cur = self.root;
        while let Some(i) = cur {
            if self.nodes[i].key == key {
                return Some(i);
            }
            cur = if key.less(self.nodes[i].key) {
                self.nodes[i].left
            } else {
                self.nodes[i].right
            };
        }
        None
    }

    /// Remove a key; false if absent.
    pub fn remove(&mut self, key: Key) -> bool {
        if self.find(key).is_none() {
            return false;
        }
        let (l, rest) = self.split(self.root, key);
        let next = Key { coord: key.coord, seq: key.seq + 1 };
        let (mid, r) = self.split(rest, next);
        let i = mid.expect("key vanished between find and split");
        debug_assert!(self.nodes[i].left.is_none() && self.nodes[i].right.is_none());
        self.free.push(i);
        self.root = self.merge(l, r);
        self.len -= 1;
        true
    }

    /// Minimum value among keys with coord <= x (or < x when not inclusive).
    pub fn prefix_min(&self, x: f64, inclusive: bool) -> Option<Value> {
        let mut best: Option<Value> = None;
        let mut cur = self.root;
        while let Some(i) = cur {
            let n = &self.nodes[i];
            let ok = if inclusive { n.key.coord <= x } else { n.key.coord < x };
            if ok {
                best = Some(match best {
                    None => n.value,
                    Some(b) => min_val(b, n.value),
                });
                if let Some(l) = n.left {
                    best = Some(match best {
                        None => self.nodes[l].sub_min,
                        Some(b) => min_val(b, self.nodes[l].sub_min),
                    });
                }
                cur = n.right;
            } else {
                cur = n.left;
            }
        }
        best
    }

    /// Minimum value among keys with coord >= x (or > x when not inclusive).
    pub fn suffix_min(&self, x: f64, inclusive: bool) -> Option<Value> {
        let mut best: Option<Value> = None;
        let mut cur = self.root;
        while let Some(i) = cur {
            let n = &self.nodes[i];
            let ok = if inclusive { n.key.coord >= x } else { n.key.coord > x };
            if ok {
                best = Some(match best {
                    None => n.value,
                    Some(b) => min_val(b, n.value),
                });
                if let Some(r) = n.right {
                    best = Some(match best {
                        None => self.nodes[r].sub_min,
                        Some(b) => min_val(b, self.nodes[r].sub_min),
                    });
                }
                cur = n.left;
            } else {
                cur = n.right;
            }
        }
        best
    }

    /// Minimum value over the whole map.
    pub fn global_min(&self) -> Option<Value> {
        self.root.map(|r| self.nodes[r].sub_min)
    }
}
