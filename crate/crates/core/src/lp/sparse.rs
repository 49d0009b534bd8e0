/// Compressed sparse column matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    pub num_rows: usize,
    pub num_cols: usize,
    col_start: Vec<usize>,
    row_index: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Duplicate entries are summed; explicit zeros are dropped.
    pub fn from_triplets(num_rows: usize, num_cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_start = vec![0; num_cols + 1];
        let mut row_index = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < num_rows && c < num_cols, "triplet ({r}, {c}) out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_index.push(r);
            values.push(v);
            col_start[c + 1] += 1;
        }
        for c in 0..num_cols {
            col_start[c + 1] += col_start[c];
        }
        let mut m = CscMatrix { num_rows, num_cols, col_start, row_index, values };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut start = vec![0; self.num_cols + 1];
        let mut rows = Vec::with_capacity(self.values.len());
        let mut vals = Vec::with_capacity(self.values.len());
        for c in 0..self.num_cols {
            for k in self.col_start[c]..self.col_start[c + 1] {
                if self.values[k] != 0.0 {
                    rows.push(self.row_index[k]);
                    vals.push(self.values[k]);
                }
            }
            start[c + 1] = rows.len();
        }
        self.col_start = start;
        self.row_index = rows;
        self.values = vals;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.col_start[c]..self.col_start[c + 1];
        self.row_index[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn col_nnz(&self, c: usize) -> usize {
        self.col_start[c + 1] - self.col_start[c]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.col(c).find(|&(i, _)| i == r).map_or(0.0, |(_, v)| v)
    }

    /// Row-major copy: for each row, the `(col, value)` entries.
    pub fn rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.num_rows];
        for c in 0..self.num_cols {
            for (r, v) in self.col(c) {
                out[r].push((c, v));
            }
        }
        out
    }
}
