//! Gaussian elimination with partial pivoting for sparse rows whose nonzeros
//! form a short contiguous run of "band" unknowns plus two dense border
//! unknowns.

/// `sum_i coefs[i] x[start + i] + border . z = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub start: usize,
    pub coefs: Vec<f64>,
    pub border: [f64; 2],
    pub rhs: f64,
}

impl Row {
    fn trim(&mut self, n: usize) {
        let lead = self.coefs.iter().take_while(|c| **c == 0.0).count();
        self.coefs.drain(..lead);
        self.start += lead;
        if self.coefs.is_empty() {
            self.start = n;
        }
    }
}

/// Solves for `n` band unknowns and two border unknowns from `n + 2` rows.
/// Returns `None` when the system is singular.
pub fn solve_bordered(n: usize, rows: Vec<Row>) -> Option<(Vec<f64>, [f64; 2])> {
    if rows.len() != n + 2 {
        return None;
    }
    let mut buckets: Vec<Vec<Row>> = vec![Vec::new(); n + 1];
    for mut r in rows {
        r.trim(n);
        if r.start > n {
            return None;
        }
        buckets[r.start].push(r);
    }
    let mut pivots: Vec<Row> = Vec::with_capacity(n);
    for j in 0..n {
        let mut active = std::mem::take(&mut buckets[j]);
        let best = active
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.coefs[0].abs().total_cmp(&b.1.coefs[0].abs()))?
            .0;
        let pivot = active.swap_remove(best);
        let lead = pivot.coefs[0];
        if lead == 0.0 || !lead.is_finite() {
            return None;
        }
        for mut r in active {
            let f = r.coefs[0] / lead;
            if r.coefs.len() < pivot.coefs.len() {
                r.coefs.resize(pivot.coefs.len(), 0.0);
            }
            for (rc, pc) in r.coefs.iter_mut().zip(&pivot.coefs) {
                *rc -= f * pc;
            }
            r.border[0] -= f * pivot.border[0];
            r.border[1] -= f * pivot.border[1];
            r.rhs -= f * pivot.rhs;
            r.coefs[0] = 0.0;
            r.trim(n);
            buckets[r.start].push(r);
        }
        pivots.push(pivot);
    }
    let tail = std::mem::take(&mut buckets[n]);
    if tail.len() != 2 {
        return None;
    }
    let z = solve_2x2(&tail[0], &tail[1])?;
    let mut x = vec![0.0; n];
    for (j, p) in pivots.iter().enumerate().rev() {
        let mut acc = p.rhs - p.border[0] * z[0] - p.border[1] * z[1];
        for (i, c) in p.coefs.iter().enumerate().skip(1) {
            acc -= c * x[j + i];
        }
        x[j] = acc / p.coefs[0];
    }
    Some((x, z))
}

fn solve_2x2(r0: &Row, r1: &Row) -> Option<[f64; 2]> {
    let (a, b, c, d) = (r0.border[0], r0.border[1], r1.border[0], r1.border[1]);
    let det = a * d - b * c;
    let scale = (a.abs() + b.abs()) * (c.abs() + d.abs());
    if det == 0.0 || det.abs() <= 1e-300 * scale.max(1e-300) || !det.is_finite() {
        return None;
    }
    Some([
        (r0.rhs * d - b * r1.rhs) / det,
        (a * r1.rhs - r0.rhs * c) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense reference solve with partial pivoting.
    fn dense(n: usize, rows: &[Row]) -> Vec<f64> {
        let m = n + 2;
        let mut a = vec![vec![0.0; m + 1]; m];
        for (i, r) in rows.iter().enumerate() {
            for (k, c) in r.coefs.iter().enumerate() {
                a[i][r.start + k] = *c;
            }
            a[i][n] = r.border[0];
            a[i][n + 1] = r.border[1];
            a[i][m] = r.rhs;
        }
        for col in 0..m {
            let p = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, p);
            for i in 0..m {
                if i != col {
                    let f = a[i][col] / a[col][col];
                    for k in col..=m {
                        a[i][k] -= f * a[col][k];
                    }
                }
            }
        }
        (0..m).map(|i| a[i][m] / a[i][i]).collect()
    }

    #[test]
    fn matches_dense_elimination() {
        let n: usize = 7;
        let mut rows = Vec::new();
        for k in 0..n {
            let start = k.saturating_sub(1);
            let len = if k == 0 || k == n - 1 { 2 } else { 3 };
            let coefs: Vec<f64> = (0..len).map(|i| if start + i == k { -2.5 } else { 1.0 }).collect();
            rows.push(Row {
                start,
                coefs,
                border: [0.1 * k as f64, 1.0],
                rhs: k as f64 - 3.0,
            });
        }
        rows.push(Row { start: 3, coefs: vec![1.0], border: [0.0, 0.0], rhs: 0.5 });
        rows.push(Row { start: 2, coefs: vec![-1.0, 0.0, 1.0], border: [0.0, 0.0], rhs: 0.0 });
        let (x, z) = solve_bordered(n, rows.clone()).unwrap();
        let reference = dense(n, &rows);
        for (a, b) in x.iter().chain(z.iter()).zip(&reference) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let rows = vec![
            Row { start: 0, coefs: vec![1.0], border: [0.0, 0.0], rhs: 1.0 },
            Row { start: 0, coefs: vec![2.0], border: [0.0, 0.0], rhs: 2.0 },
            Row { start: 1, coefs: vec![], border: [1.0, 0.0], rhs: 0.0 },
        ];
        assert!(solve_bordered(1, rows).is_none());
    }
}
