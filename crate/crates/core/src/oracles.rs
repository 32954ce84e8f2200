//! Brute-force reference solvers for tests.
//!
//! Nothing here shares code with the production solvers: load estimation is
//! checked against a power-grid search, and max-min allocation against an
//! enumeration of the dual's vertices.

use crate::load::UserDemand;
use crate::rate::RateModel;

fn shannon_rate(w: f64, p: f64, h: f64, rate: &RateModel) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    w * rate.prb_bandwidth_hz * (1.0 + p * h / (w * rate.noise_w * rate.snr_gap)).log2()
}

/// Smallest `w <= w_max` with `shannon_rate(w, p, h) >= r`, by plain
/// bisection to relative 1e-12.
fn subchannels_needed(p: f64, u: &UserDemand, rate: &RateModel, w_max: f64) -> Option<f64> {
    if shannon_rate(w_max, p, u.avg_gain, rate) < u.rate_bps {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, w_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shannon_rate(mid, p, u.avg_gain, rate) >= u.rate_bps {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Some(hi)
}

/// Minimum of `w_1 + w_2` over an evenly spaced grid of power splits
/// `P_1 = i·p_max/grid`, `P_2 = p_max - P_1`, `0 < i < grid`.
///
/// Returns `None` if no grid point is feasible.
pub fn load_grid_search(
    users: &[UserDemand; 2],
    p_max: f64,
    rate: &RateModel,
    w_max: f64,
    grid: usize,
) -> Option<f64> {
    (1..grid)
        .filter_map(|i| {
            let p1 = p_max * i as f64 / grid as f64;
            let w1 = subchannels_needed(p1, &users[0], rate, w_max)?;
            let w2 = subchannels_needed(p_max - p1, &users[1], rate, w_max)?;
            Some(w1 + w2)
        })
        .min_by(f64::total_cmp)
}

/// Solves `A x = b` for a small square system with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(0, n, k, &mut vec![], &mut out);
    out
}

/// Optimal max-min value via the dual.
///
/// With normalized rates `a[k][n] = r[k][n] / R_k`, LP duality (equivalently
/// the minimax theorem for the bilinear form `Σ λ_k Σ_n a c`) gives
///
/// ```text
/// t* = min over λ in the simplex of  f(λ) = Σ_n max_k λ_k a[k][n].
/// ```
///
/// `f` is convex and piecewise linear, so its minimum sits at a vertex of
/// the arrangement formed by the breakpoint hyperplanes
/// `λ_i a[i][n] = λ_j a[j][n]` and the facets `λ_i = 0`. Every vertex is
/// enumerated. Returns `(t*, λ*)`.
pub fn maxmin_dual_enumeration(r: &[Vec<f64>], demands: &[f64]) -> (f64, Vec<f64>) {
    let nu = r.len();
    let np = r.first().map_or(0, Vec::len);
    let a: Vec<Vec<f64>> = r
        .iter()
        .zip(demands)
        .map(|(row, d)| row.iter().map(|x| x / d).collect())
        .collect();
    let f = |lam: &[f64]| -> f64 {
        (0..np)
            .map(|n| (0..nu).map(|k| lam[k] * a[k][n]).fold(0.0, f64::max))
            .sum()
    };
    if nu == 1 {
        return (f(&[1.0]), vec![1.0]);
    }

    let mut planes: Vec<Vec<f64>> = Vec::new();
    for i in 0..nu {
        let mut facet = vec![0.0; nu];
        facet[i] = 1.0;
        planes.push(facet);
    }
    for n in 0..np {
        for i in 0..nu {
            for j in i + 1..nu {
                let mut h = vec![0.0; nu];
                h[i] = a[i][n];
                h[j] = -a[j][n];
                planes.push(h);
            }
        }
    }

    let mut best = (f64::INFINITY, vec![]);
    for combo in combinations(planes.len(), nu - 1) {
        let mut m: Vec<Vec<f64>> = combo.iter().map(|&i| planes[i].clone()).collect();
        m.push(vec![1.0; nu]);
        let mut rhs = vec![0.0; nu];
        rhs[nu - 1] = 1.0;
        let Some(lam) = solve_dense(m, rhs) else {
            continue;
        };
        if lam.iter().any(|&x| x < -1e-12) {
            continue;
        }
        let lam: Vec<f64> = lam.iter().map(|x| x.max(0.0)).collect();
        let v = f(&lam);
        if v < best.0 {
            best = (v, lam);
        }
    }
    best
}
