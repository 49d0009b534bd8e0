//! Sparse LU factors of a simplex basis with product-form updates.
//!
//! The factorization is left-looking (one basis column at a time, each
//! column reduced by a sparse triangular solve against the columns of L
//! already built) with threshold partial pivoting. Basis changes between
//! refactorizations are kept as an eta file.

const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

/// Basis positions that could not be pivoted, paired with rows left
/// without a pivot.
#[derive(Debug)]
pub(super) struct Singular {
    pub pairs: Vec<(usize, usize)>,
}

struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

pub(super) struct LuFactor {
    m: usize,
    pivot_row: Vec<usize>,
    col_pos: Vec<usize>,
    diag: Vec<f64>,
    l_start: Vec<usize>,
    l_row: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_step: Vec<usize>,
    u_val: Vec<f64>,
    etas: Vec<Eta>,
    eta_nnz: usize,
}

impl LuFactor {
    /// Factors the `m x m` matrix whose column `p` is `cols[p]`.
    pub fn factor(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<LuFactor, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut row_count = vec![0usize; m];
        for c in cols {
            for &(r, _) in c {
                row_count[r] += 1;
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&p| (cols[p].len(), p));

        let mut f = LuFactor {
            m,
            pivot_row: Vec::with_capacity(m),
            col_pos: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            l_start: vec![0],
            l_row: Vec::new(),
            l_val: Vec::new(),
            u_start: vec![0],
            u_step: Vec::new(),
            u_val: Vec::new(),
            etas: Vec::new(),
            eta_nnz: 0,
        };
        let mut row_step: Vec<usize> = vec![usize::MAX; m];
        let mut work = vec![0.0; m];
        let mut visited = vec![false; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut singular_pos = Vec::new();

        for &p in &order {
            let col = &cols[p];
            let scale = col.iter().fold(0.0f64, |a, &(_, v)| a.max(v.abs()));

            // Depth-first reach of the column pattern through L, in postorder.
            pattern.clear();
            for &(r, v) in col {
                work[r] += v;
                if visited[r] {
                    continue;
                }
                visited[r] = true;
                stack.push((r, 0));
                while let Some(&mut (node, ref mut child)) = stack.last_mut() {
                    let s = row_step[node];
                    let next = if s == usize::MAX {
                        None
                    } else {
                        let (a, b) = (f.l_start[s], f.l_start[s + 1]);
                        let mut found = None;
                        while a + *child < b {
                            let nb = f.l_row[a + *child];
                            *child += 1;
                            if !visited[nb] {
                                found = Some(nb);
                                break;
                            }
                        }
                        found
                    };
                    match next {
                        Some(nb) => {
                            visited[nb] = true;
                            stack.push((nb, 0));
                        }
                        None => {
                            pattern.push(node);
                            stack.pop();
                        }
                    }
                }
            }

            for &i in pattern.iter().rev() {
                let s = row_step[i];
                if s == usize::MAX {
                    continue;
                }
                let xi = work[i];
                if xi == 0.0 {
                    continue;
                }
                for k in f.l_start[s]..f.l_start[s + 1] {
                    work[f.l_row[k]] -= f.l_val[k] * xi;
                }
            }

            let mut best = 0.0f64;
            for &i in &pattern {
                if row_step[i] == usize::MAX {
                    best = best.max(work[i].abs());
                }
            }
            if best <= SINGULAR_TOL * scale.max(1.0) {
                singular_pos.push(p);
                for &i in &pattern {
                    work[i] = 0.0;
                    visited[i] = false;
                }
                continue;
            }
            let mut piv = usize::MAX;
            for &i in &pattern {
                if row_step[i] != usize::MAX || work[i].abs() < PIVOT_THRESHOLD * best {
                    continue;
                }
                if piv == usize::MAX || (row_count[i], i) < (row_count[piv], piv) {
                    piv = i;
                }
            }

            let step = f.pivot_row.len();
            let d = work[piv];
            let mut u_entries: Vec<(usize, f64)> = Vec::new();
            for &i in &pattern {
                let v = work[i];
                let s = row_step[i];
                if s != usize::MAX {
                    if v.abs() > DROP_TOL {
                        u_entries.push((s, v));
                    }
                } else if i != piv && v.abs() > DROP_TOL {
                    f.l_row.push(i);
                    f.l_val.push(v / d);
                }
                work[i] = 0.0;
                visited[i] = false;
            }
            u_entries.sort_by_key(|e| e.0);
            for (s, v) in u_entries {
                f.u_step.push(s);
                f.u_val.push(v);
            }
            f.l_start.push(f.l_row.len());
            f.u_start.push(f.u_step.len());
            f.pivot_row.push(piv);
            f.col_pos.push(p);
            f.diag.push(d);
            row_step[piv] = step;
        }

        if singular_pos.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&r| row_step[r] == usize::MAX);
            Err(Singular { pairs: singular_pos.into_iter().zip(rows).collect() })
        }
    }

    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    pub fn fill(&self) -> usize {
        self.l_row.len() + self.u_step.len() + self.eta_nnz
    }

    /// Solves `B z = rhs`; `rhs` is indexed by row on entry and by basis
    /// position on exit.
    pub fn ftran(&self, rhs: &mut [f64]) {
        let m = self.m;
        for s in 0..m {
            let v = rhs[self.pivot_row[s]];
            if v != 0.0 {
                for k in self.l_start[s]..self.l_start[s + 1] {
                    rhs[self.l_row[k]] -= self.l_val[k] * v;
                }
            }
        }
        let mut w: Vec<f64> = self.pivot_row.iter().map(|&r| rhs[r]).collect();
        for k in (0..m).rev() {
            let wk = w[k] / self.diag[k];
            w[k] = wk;
            if wk != 0.0 {
                for e in self.u_start[k]..self.u_start[k + 1] {
                    w[self.u_step[e]] -= self.u_val[e] * wk;
                }
            }
        }
        for k in 0..m {
            rhs[self.col_pos[k]] = w[k];
        }
        for eta in &self.etas {
            let zp = rhs[eta.pos] / eta.pivot;
            rhs[eta.pos] = zp;
            if zp != 0.0 {
                for &(i, a) in &eta.entries {
                    rhs[i] -= a * zp;
                }
            }
        }
    }

    /// Solves `B' y = rhs`; `rhs` is indexed by basis position on entry and
    /// by row on exit.
    pub fn btran(&self, rhs: &mut [f64]) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut v = rhs[eta.pos];
            for &(i, a) in &eta.entries {
                v -= a * rhs[i];
            }
            rhs[eta.pos] = v / eta.pivot;
        }
        let mut u: Vec<f64> = self.col_pos.iter().map(|&p| rhs[p]).collect();
        for k in 0..m {
            let mut v = u[k];
            for e in self.u_start[k]..self.u_start[k + 1] {
                v -= self.u_val[e] * u[self.u_step[e]];
            }
            u[k] = v / self.diag[k];
        }
        for s in 0..m {
            rhs[self.pivot_row[s]] = u[s];
        }
        for s in (0..m).rev() {
            let mut v = rhs[self.pivot_row[s]];
            for k in self.l_start[s]..self.l_start[s + 1] {
                v -= self.l_val[k] * rhs[self.l_row[k]];
            }
            rhs[self.pivot_row[s]] = v;
        }
    }

    /// Records that the column at basis position `pos` was replaced by a
    /// column whose FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let entries: Vec<(usize, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, a))
            .collect();
        self.eta_nnz += entries.len();
        self.etas.push(Eta { pos, pivot: alpha[pos], entries });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_cols(a: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m).map(|c| (0..m).filter(|&r| a[r][c] != 0.0).map(|r| (r, a[r][c])).collect()).collect()
    }

    fn mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
    }

    fn mul_t(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
        (0..a.len()).map(|c| (0..a.len()).map(|r| a[r][c] * y[r]).sum()).collect()
    }

    fn random_sparse(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; m]; m];
        for (i, row) in a.iter_mut().enumerate() {
            row[(i * 7 + 3) % m] = rng.gen_range(1.0..4.0);
            for _ in 0..2 {
                row[rng.gen_range(0..m)] += rng.gen_range(-2.0..2.0);
            }
        }
        a
    }

    #[test]
    fn solves_match_dense_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [1, 2, 5, 20, 60] {
            let a = random_sparse(&mut rng, m);
            let lu = match LuFactor::factor(m, &dense_cols(&a)) {
                Ok(lu) => lu,
                Err(_) => continue,
            };
            let b: Vec<f64> = (0..m).map(|i| (i as f64).sin() + 0.5).collect();
            let mut z = b.clone();
            lu.ftran(&mut z);
            let r = mul(&a, &z);
            for i in 0..m {
                assert!((r[i] - b[i]).abs() < 1e-8, "ftran m={m}");
            }
            let mut y = b.clone();
            lu.btran(&mut y);
            let r = mul_t(&a, &y);
            for i in 0..m {
                assert!((r[i] - b[i]).abs() < 1e-8, "btran m={m}");
            }
        }
    }

    #[test]
    fn eta_updates_track_column_replacement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 12;
        let mut a = random_sparse(&mut rng, m);
        let mut lu = LuFactor::factor(m, &dense_cols(&a)).expect("nonsingular");
        for step in 0..5 {
            let pos = (step * 5) % m;
            let newcol: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut alpha = newcol.clone();
            lu.ftran(&mut alpha);
            if alpha[pos].abs() < 1e-3 {
                continue;
            }
            lu.update(pos, &alpha);
            for r in 0..m {
                a[r][pos] = newcol[r];
            }
            let b: Vec<f64> = (0..m).map(|i| i as f64 - 3.0).collect();
            let mut z = b.clone();
            lu.ftran(&mut z);
            let r = mul(&a, &z);
            let mut y = b.clone();
            lu.btran(&mut y);
            let rt = mul_t(&a, &y);
            for i in 0..m {
                assert!((r[i] - b[i]).abs() < 1e-7);
                assert!((rt[i] - b[i]).abs() < 1e-7);
            }
        }
        assert!(lu.num_etas() > 0);
    }

    #[test]
    fn singular_columns_are_reported() {
        let a = vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = LuFactor::factor(3, &dense_cols(&a)).err().expect("singular");
        assert_eq!(err.pairs.len(), 1);
        let empty = LuFactor::factor(2, &[vec![(0, 1.0)], vec![]]).err().expect("empty column");
        assert_eq!(empty.pairs, vec![(1, 1)]);
    }
}
