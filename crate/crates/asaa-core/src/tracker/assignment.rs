//! Minimum-total-cost assignment with gating, used to pair tracks with
//! detections. Pairs over the gate are inadmissible; among matchings that
//! use only admissible pairs, the one with the most pairs wins, and total
//! cost breaks ties. Solved by the Hungarian method on a cost matrix
//! where inadmissible entries carry a cost larger than any real total.

use alloc::vec;
use alloc::vec::Vec;

const FORBIDDEN: f64 = 1.0e6;

struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Complete min-cost matching of every row onto a distinct column.
/// Requires `rows <= cols`. Potentials-based Hungarian method.
fn hungarian(cost: &Matrix) -> Vec<usize> {
    let n = cost.rows;
    let m = cost.cols;
    debug_assert!(n <= m);
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for (j, &row) in p.iter().enumerate().skip(1) {
        if row != 0 {
            row_to_col[row - 1] = j - 1;
        }
    }
    row_to_col
}

/// Pairs each row (track) with at most one column (detection).
/// `cost(r, c)` is the pairing cost; anything above `gate` is refused.
pub fn assign_within_gate(
    rows: usize,
    cols: usize,
    cost: impl Fn(usize, usize) -> f64,
    gate: f64,
) -> Vec<Option<usize>> {
    let mut out = vec![None; rows];
    if rows == 0 || cols == 0 {
        return out;
    }
    let gated = |r: usize, c: usize| {
        let v = cost(r, c);
        if v <= gate {
            v
        } else {
            FORBIDDEN
        }
    };
    if rows <= cols {
        let m = Matrix {
            rows,
            cols,
            data: (0..rows * cols)
                .map(|k| gated(k / cols, k % cols))
                .collect(),
        };
        for (r, c) in hungarian(&m).into_iter().enumerate() {
            if m.at(r, c) < FORBIDDEN {
                out[r] = Some(c);
            }
        }
    } else {
        // Transpose so the row count is the smaller side.
        let m = Matrix {
            rows: cols,
            cols: rows,
            data: (0..rows * cols)
                .map(|k| gated(k % rows, k / rows))
                .collect(),
        };
        for (c, r) in hungarian(&m).into_iter().enumerate() {
            if m.at(c, r) < FORBIDDEN {
                out[r] = Some(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive search over all gated partial matchings: maximize the
    /// number of pairs, then minimize total cost.
    pub fn brute_force(
        rows: usize,
        cols: usize,
        cost: &dyn Fn(usize, usize) -> f64,
        gate: f64,
    ) -> (usize, f64) {
        fn recur(
            r: usize,
            rows: usize,
            cols: usize,
            cost: &dyn Fn(usize, usize) -> f64,
            gate: f64,
            taken: &mut Vec<bool>,
            best: &mut (usize, f64),
            count: usize,
            total: f64,
        ) {
            if r == rows {
                if count > best.0 || (count == best.0 && total < best.1) {
                    *best = (count, total);
                }
                return;
            }
            recur(r + 1, rows, cols, cost, gate, taken, best, count, total);
            for c in 0..cols {
                if !taken[c] && cost(r, c) <= gate {
                    taken[c] = true;
                    recur(
                        r + 1,
                        rows,
                        cols,
                        cost,
                        gate,
                        taken,
                        best,
                        count + 1,
                        total + cost(r, c),
                    );
                    taken[c] = false;
                }
            }
        }
        let mut taken = vec![false; cols];
        let mut best = (0usize, f64::INFINITY);
        recur(0, rows, cols, cost, gate, &mut taken, &mut best, 0, 0.0);
        if best.0 == 0 {
            best.1 = 0.0;
        }
        best
    }

    fn summarize(assignment: &[Option<usize>], cost: &dyn Fn(usize, usize) -> f64) -> (usize, f64) {
        let mut count = 0;
        let mut total = 0.0;
        for (r, c) in assignment.iter().enumerate() {
            if let Some(c) = c {
                count += 1;
                total += cost(r, *c);
            }
        }
        (count, total)
    }

    #[test]
    fn prefers_the_uncrossed_pairing() {
        let tracks = [0.0f64, 1.0];
        let dets = [0.1f64, 0.9];
        let cost = |r: usize, c: usize| (tracks[r] - dets[c]).abs();
        let got = assign_within_gate(2, 2, cost, 1.0);
        assert_eq!(got, vec![Some(0), Some(1)]);
    }

    #[test]
    fn gate_blocks_distant_pairs() {
        let cost = |_r: usize, c: usize| if c == 0 { 0.4 } else { 5.0 };
        let got = assign_within_gate(2, 2, cost, 1.0);
        // Only one detection is reachable; exactly one track gets it.
        let matched: Vec<_> = got.iter().flatten().collect();
        assert_eq!(matched, vec![&0]);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..300 {
            let rows = rng.gen_range(0..6);
            let cols = rng.gen_range(0..6);
            let table: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(0.0..2.0)).collect();
            let cost = move |r: usize, c: usize| table[r * cols + c];
            let got = assign_within_gate(rows, cols, &cost, 1.0);
            let (count, total) = summarize(&got, &cost);
            let (bcount, btotal) = brute_force(rows, cols, &cost, 1.0);
            assert_eq!(count, bcount, "case {case}");
            assert!((total - btotal).abs() < 1e-9, "case {case}: {total} vs {btotal}");
        }
    }
}
