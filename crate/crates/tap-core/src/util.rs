//! Small shared helpers.

/// Union-find with path compression and union by rank.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return;
        }
        if self.rank[rx] < self.rank[ry] {
            self.parent[rx] = ry;
        } else if self.rank[rx] > self.rank[ry] {
            self.parent[ry] = rx;
        } else {
            self.parent[ry] = rx;
            self.rank[rx] += 1;
        }
    }

    pub fn connected(&mut self, x: usize, y: usize) -> bool {
        self.find(x) == self.find(y)
    }
}

/// Index of the unordered pair (i, j), i < j, in a dense triangular layout
/// over n items: all pairs starting at 0 first, then at 1, and so on.
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Total number of unordered pairs over n items.
pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Quantize a probability to nine significant decimal digits. Score files
/// store probabilities at this precision, so quantized values round-trip
/// bit-exactly through JSON.
pub(crate) fn quantize_prob(p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    format!("{:.8e}", p).parse().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_groups() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        assert!(uf.connected(0, 1));
        assert!(!uf.connected(1, 2));
        uf.union(1, 3);
        assert!(uf.connected(0, 4));
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 5;
        let mut seen = vec![false; pair_count(n)];
        for i in 0..n {
            for j in (i + 1)..n {
                let k = pair_index(n, i, j);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn quantize_is_idempotent() {
        for &p in &[0.0, 1.0, 0.1, 1.0 / 3.0, 2.5e-13, 0.999999999] {
            let q = quantize_prob(p);
            assert_eq!(q, quantize_prob(q));
            assert!((q - p).abs() <= 1e-8 * p.abs().max(1e-300));
        }
    }
}
