//! Max-min fair sharing of a FAP's granted PRBs among its users.
//!
//! Power is split equally over the `n` granted PRBs, which fixes every
//! per-PRB rate `r[k][n]`; what remains is choosing time fractions
//! `c[k][n]` (each PRB's fractions sum to one) to maximize
//! `t = min_k Σ_n c[k][n] r[k][n] / R_k`. That is a linear program, solved
//! here with the dense simplex in [`crate::lp`].

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lp;
use crate::rate::RateModel;

/// Per-(user, PRB) rates in bits/s, row-major by user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix {
    pub n_users: usize,
    pub n_prbs: usize,
    pub r: Vec<f64>,
}

impl RateMatrix {
    pub fn new(n_users: usize, n_prbs: usize, r: Vec<f64>) -> Self {
        assert_eq!(r.len(), n_users * n_prbs);
        RateMatrix { n_users, n_prbs, r }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_prbs = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_prbs), "ragged rate matrix");
        RateMatrix::new(rows.len(), n_prbs, rows.concat())
    }

    #[inline]
    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.r[k * self.n_prbs + n]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.r[k * self.n_prbs..(k + 1) * self.n_prbs]
    }
}

/// Rates with `P_max` split equally over the granted PRBs.
///
/// `gains[k]` holds user `k`'s linear gain on each granted PRB, in grant
/// order.
pub fn per_prb_rates(
    gains: &[Vec<f64>],
    n_prbs: usize,
    p_max: f64,
    rate: &RateModel,
) -> RateMatrix {
    if n_prbs == 0 {
        return RateMatrix::new(gains.len(), 0, vec![]);
    }
    let p = p_max / n_prbs as f64;
    let r = gains
        .iter()
        .flat_map(|row| {
            assert_eq!(row.len(), n_prbs, "one gain per granted PRB");
            row.iter().map(|&h| rate.prb_rate(p, h))
        })
        .collect();
    RateMatrix::new(gains.len(), n_prbs, r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub n_users: usize,
    pub n_prbs: usize,
    /// Time fraction of each PRB given to each user, row-major by user.
    pub c: Vec<f64>,
    /// `min_k rate_k / R_k`.
    pub t: f64,
}

impl Allocation {
    #[inline]
    pub fn fraction(&self, k: usize, n: usize) -> f64 {
        self.c[k * self.n_prbs + n]
    }
}

/// Solves the max-min LP.
///
/// Every PRB is shared out in full: capacity the LP leaves unused goes to
/// the user with the best normalized rate on that PRB, which can only raise
/// the other users' rates. An all-zero rate matrix yields `t = 0` and a
/// uniform split.
pub fn maxmin_allocate(r: &RateMatrix, demands: &[f64]) -> Result<Allocation> {
    let (nu, np) = (r.n_users, r.n_prbs);
    assert_eq!(demands.len(), nu, "one demand per user");
    assert!(nu >= 1, "at least one user");
    assert!(demands.iter().all(|&d| d > 0.0), "demands must be positive");
    if np == 0 {
        return Ok(Allocation {
            n_users: nu,
            n_prbs: 0,
            c: vec![],
            t: 0.0,
        });
    }

    // normalized rates, scaled so the largest is 1
    let mut a: Vec<f64> = (0..nu)
        .flat_map(|k| r.row(k).iter().map(move |&x| x / demands[k]))
        .collect();
    let scale = a.iter().copied().fold(0.0, f64::max);
    if scale <= 0.0 {
        return Ok(Allocation {
            n_users: nu,
            n_prbs: np,
            c: vec![1.0 / nu as f64; nu * np],
            t: 0.0,
        });
    }
    a.iter_mut().for_each(|x| *x /= scale);

    let mut c = if nu == 1 {
        vec![1.0; np]
    } else {
        solve_lp(&a, nu, np)?
    };

    for n in 0..np {
        let col_sum: f64 = (0..nu).map(|k| c[k * np + n]).sum();
        if col_sum > 1.0 {
            (0..nu).for_each(|k| c[k * np + n] /= col_sum);
        } else if col_sum < 1.0 {
            let best = (0..nu)
                .reduce(|b, k| if a[k * np + n] > a[b * np + n] { k } else { b })
                .expect("nonempty");
            c[best * np + n] += 1.0 - col_sum;
        }
    }

    let t = (0..nu)
        .map(|k| (0..np).fold(0.0, |acc, n| acc + c[k * np + n] * r.get(k, n)) / demands[k])
        .fold(f64::INFINITY, f64::min);
    Ok(Allocation {
        n_users: nu,
        n_prbs: np,
        c,
        t,
    })
}

/// Variables: `c[k][n]` row-major, then `t`. Rows: one per user
/// (`t - Σ_n a c <= 0`), one per PRB (`Σ_k c <= 1`).
fn solve_lp(a: &[f64], nu: usize, np: usize) -> Result<Vec<f64>> {
    let vars = nu * np + 1;
    let t_col = nu * np;
    let rows = nu + np;
    let mut m = vec![0.0; rows * vars];
    for k in 0..nu {
        let row = &mut m[k * vars..(k + 1) * vars];
        row[k * np..(k + 1) * np]
            .iter_mut()
            .zip(&a[k * np..(k + 1) * np])
            .for_each(|(dst, &ak)| *dst = -ak);
        row[t_col] = 1.0;
    }
    for n in 0..np {
        let row = &mut m[(nu + n) * vars..(nu + n + 1) * vars];
        for k in 0..nu {
            row[k * np + n] = 1.0;
        }
    }
    let mut b = vec![0.0; rows];
    b[nu..].fill(1.0);
    let mut obj = vec![0.0; vars];
    obj[t_col] = 1.0;

    let sol = lp::maximize(&m, &b, &obj)?;
    let mut c = sol.x;
    c.truncate(nu * np);
    c.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(c)
}

/// `rate_k = Σ_n c[k][n] r[k][n]`. A user with no PRBs gets `+0.0`.
pub fn achieved_rates(a: &Allocation, r: &RateMatrix) -> Vec<f64> {
    (0..a.n_users)
        .map(|k| (0..a.n_prbs).fold(0.0, |acc, n| acc + a.fraction(k, n) * r.get(k, n)))
        .collect()
}
