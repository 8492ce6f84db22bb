//! Range-query helpers: sparse tables for static min/max and a segment tree
//! for offline "max over intervals containing a point".

/// Static range-extremum table with O(1) queries on inclusive ranges.
pub struct SparseTable {
    levels: Vec<Vec<f64>>,
    op: fn(f64, f64) -> f64,
}

impl SparseTable {
    fn build(values: &[f64], op: fn(f64, f64) -> f64) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..=values.len() - 2 * width)
                .map(|i| op(prev[i], prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels, op }
    }

    pub fn min(values: &[f64]) -> Self {
        SparseTable::build(values, f64::min)
    }

    pub fn max(values: &[f64]) -> Self {
        SparseTable::build(values, f64::max)
    }

    /// Extremum over `values[i..=j]`.
    #[inline]
    pub fn query(&self, i: usize, j: usize) -> f64 {
        let len = j - i + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.levels[k];
        (self.op)(row[i], row[j + 1 - (1 << k)])
    }
}

/// Offline range-chmax / point-query structure: `update(i, j, v)` raises every
/// position in `[i..=j]` to at least `v`; `finish` returns the per-position maxima.
pub struct ChmaxTree {
    size: usize,
    n: usize,
    tags: Vec<f64>,
}

impl ChmaxTree {
    pub fn new(n: usize, init: f64) -> Self {
        let size = n.next_power_of_two().max(1);
        ChmaxTree {
            size,
            n,
            tags: vec![init; 2 * size],
        }
    }

    pub fn update(&mut self, i: usize, j: usize, v: f64) {
        let mut l = i + self.size;
        let mut r = j + self.size + 1;
        while l < r {
            if l & 1 == 1 {
                if v > self.tags[l] {
                    self.tags[l] = v;
                }
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                if v > self.tags[r] {
                    self.tags[r] = v;
                }
            }
            l >>= 1;
            r >>= 1;
        }
    }

    pub fn finish(mut self) -> Vec<f64> {
        for node in 2..2 * self.size {
            let parent = self.tags[node / 2];
            if parent > self.tags[node] {
                self.tags[node] = parent;
            }
        }
        self.tags[self.size..self.size + self.n].to_vec()
    }
}
