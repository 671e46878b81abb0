//! Revised simplex for `max c·λ` subject to `Aλ = b`, `λ ≥ 0` with exactly
//! three equality rows.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100_000;

#[allow(clippy::needless_range_loop)]
fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = rhs[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..4 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

/// Returns the optimal basis as `(column, λ)` pairs. `basis` must be a
/// feasible starting basis.
pub(crate) fn maximize(cols: &[[f64; 3]], c: &[f64], b: [f64; 3], mut basis: [usize; 3]) -> Result<[(usize, f64); 3]> {
    let scale = c.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale;
    let mut bland = false;
    for _ in 0..MAX_ITERATIONS {
        // rows of B and of Bᵀ
        let bm = [0, 1, 2].map(|r| [0, 1, 2].map(|k| cols[basis[k]][r]));
        let bt = [0, 1, 2].map(|k| cols[basis[k]]);
        let x = solve3(bm, b).ok_or_else(|| Error::Solver("singular basis".into()))?;
        let y = solve3(bt, basis.map(|k| c[k])).ok_or_else(|| Error::Solver("singular basis".into()))?;

        let mut entering = None;
        let mut best = tol;
        for (j, col) in cols.iter().enumerate() {
            if basis.contains(&j) {
                continue;
            }
            let d = c[j] - (y[0] * col[0] + y[1] * col[1] + y[2] * col[2]);
            if d > best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = d;
            }
        }
        let Some(j) = entering else {
            return Ok([0, 1, 2].map(|k| (basis[k], x[k].max(0.0))));
        };

        let dir = solve3(bm, cols[j]).ok_or_else(|| Error::Solver("singular basis".into()))?;
        let mut leave: Option<(usize, f64)> = None;
        for k in 0..3 {
            if dir[k] > 1e-12 {
                let t = x[k].max(0.0) / dir[k];
                let better = match leave {
                    None => true,
                    Some((l, tl)) => t < tl || (t == tl && basis[k] < basis[l]),
                };
                if better {
                    leave = Some((k, t));
                }
            }
        }
        let (k, t) = leave.ok_or_else(|| Error::Solver("unbounded direction".into()))?;
        bland = t <= 1e-15;
        basis[k] = j;
    }
    Err(Error::Solver(format!("no convergence after {MAX_ITERATIONS} pivots")))
}
