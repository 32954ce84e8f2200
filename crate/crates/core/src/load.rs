//! Load estimation at a single FAP.
//!
//! Each FAP knows its users' rate demands `R_k` and average gains `H_k` and
//! decides how many (fractional) subchannels `w_k` and how much power `P_k`
//! each user needs, minimizing `Σ w_k` under the budget `Σ P_k <= P_max`:
//!
//! ```text
//! w_k · b · log2(1 + P_k H_k / (w_k σ² Γ)) >= R_k
//! ```
//!
//! At the optimum every rate constraint is tight. Writing `s_k` for the
//! per-subchannel SNR `P_k H_k / (w_k σ² Γ)`, a tight constraint gives
//!
//! ```text
//! w_k(s) = c_k / log2(1 + s),   P_k(s) = s · w_k(s) / a_k
//! ```
//!
//! with `c_k = R_k / b` and `a_k = H_k / (σ² Γ)`, and the stationarity
//! condition `dw_k/dP_k = -μ` reduces to
//!
//! ```text
//! (1 + s_k) ln(1 + s_k) - s_k = a_k / μ.
//! ```
//!
//! So for a given multiplier every user's SNR follows from a 1-D monotone
//! equation, and the multiplier is found by bisection on the power budget.

use serde::{Deserialize, Serialize};

use crate::rate::RateModel;

/// One served user as seen by load estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserDemand {
    pub rate_bps: f64,
    pub avg_gain: f64,
}

/// Solver context: rate model plus the per-user subchannel cap `W_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadParams {
    pub rate: RateModel,
    pub w_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadEstimate {
    /// Fractional subchannels per user.
    pub w: Vec<f64>,
    /// Power per user, W.
    pub p: Vec<f64>,
    /// `Σ w_k`.
    pub n_l: f64,
    pub feasible: bool,
    /// Integer demand reported to the coloring server.
    pub n_l_int: usize,
}

const INNER_TOL: f64 = 1e-9;
const MULTIPLIER_TOL: f64 = 1e-10;

/// Achieved rate when a user gets `w` subchannels and total power `p`.
/// Continuous at `w = 0`, where it is zero.
pub fn rate_given(w: f64, p: f64, h: f64, rate: &RateModel) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let snr = p * rate.snr_per_watt(h) / w;
    w * rate.prb_bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Rate approached as `w → ∞`: `p·h·b / (σ² Γ ln 2)`.
pub fn asymptotic_rate(p: f64, h: f64, rate: &RateModel) -> f64 {
    p * rate.snr_per_watt(h) * rate.prb_bandwidth_hz / std::f64::consts::LN_2
}

/// Smallest `w <= W_max` meeting the user's demand at power `p`, or `None`
/// if no such `w` exists.
pub fn min_subchannels(p: f64, u: &UserDemand, params: &LoadParams) -> Option<f64> {
    let rate = &params.rate;
    if u.rate_bps <= 0.0 {
        return Some(0.0);
    }
    if p <= 0.0 || u.rate_bps >= asymptotic_rate(p, u.avg_gain, rate) {
        return None;
    }
    if rate_given(params.w_max, p, u.avg_gain, rate) < u.rate_bps {
        return None;
    }
    let (mut lo, mut hi) = (0.0, params.w_max);
    while hi - lo > INNER_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if rate_given(mid, p, u.avg_gain, rate) >= u.rate_bps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `min(ceil(n_l), n_max)`.
///
/// Values within 1e-9 above an integer are treated as that integer so that
/// round-off in `Σ w_k` does not cost a whole PRB.
pub fn integer_demand(n_l: f64, n_max: usize) -> usize {
    if n_l <= 0.0 {
        return 0;
    }
    let n = (n_l - 1e-9).ceil().max(0.0) as usize;
    n.min(n_max)
}

/// `(1 + s) ln(1 + s) - s`, accurate down to tiny `s`.
fn phi(s: f64) -> f64 {
    if s < 1e-2 {
        // Σ_{n>=2} (-1)^n s^n / (n (n - 1))
        let mut term = s * s;
        let mut sum = 0.0;
        for n in 2..12 {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * term / (nf * (nf - 1.0));
            term *= s;
        }
        sum
    } else {
        (1.0 + s) * s.ln_1p() - s
    }
}

/// Inverse of [`phi`] on `[0, ∞)`.
fn phi_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    // Start above the root; Newton on a convex increasing function then
    // descends monotonically.
    let mut s = (2.0 * y).sqrt().max(y / (1.0 + y).ln().max(1.0)) + 1e-300;
    while phi(s) < y {
        s *= 2.0;
    }
    for _ in 0..200 {
        let step = (phi(s) - y) / s.ln_1p();
        if step <= 0.0 {
            break;
        }
        s -= step;
        if step <= INNER_TOL * 1e-3 * s {
            break;
        }
    }
    s
}

struct Link {
    /// `R_k / b`
    c: f64,
    /// `H_k / (σ² Γ)`
    a: f64,
    /// SNR at which `w_k` hits the cap.
    s_min: f64,
}

impl Link {
    fn w(&self, s: f64) -> f64 {
        self.c * std::f64::consts::LN_2 / s.ln_1p()
    }

    fn p(&self, s: f64) -> f64 {
        // s / ln(1 + s) → 1 as s → 0
        let ratio = if s < 1e-12 { 1.0 } else { s / s.ln_1p() };
        self.c * std::f64::consts::LN_2 * ratio / self.a
    }

    fn s_at(&self, level: f64) -> f64 {
        phi_inv(self.a * level).max(self.s_min)
    }
}

/// Minimizes the FAP's total subchannel count subject to every user's rate
/// demand and the power budget `p_max`.
///
/// If the demands cannot all be met with at most `W_max` subchannels each,
/// the result has `feasible = false`, every user saturated at `W_max`, power
/// split in proportion to what each would have needed, and `n_l_int = W_max`.
pub fn estimate_load(users: &[UserDemand], p_max: f64, params: &LoadParams) -> LoadEstimate {
    let n_max = params.w_max.floor() as usize;
    if users.is_empty() {
        return LoadEstimate {
            w: vec![],
            p: vec![],
            n_l: 0.0,
            feasible: true,
            n_l_int: 0,
        };
    }

    let b = params.rate.prb_bandwidth_hz;
    let links: Vec<Link> = users
        .iter()
        .map(|u| {
            let c = u.rate_bps / b;
            Link {
                c,
                a: params.rate.snr_per_watt(u.avg_gain),
                s_min: (c / params.w_max).exp2() - 1.0,
            }
        })
        .collect();

    let p_floor: f64 = links.iter().map(|l| l.p(l.s_min)).sum();
    if p_floor.is_nan() || p_floor > p_max {
        let scale = p_max / p_floor;
        let p: Vec<f64> = links.iter().map(|l| l.p(l.s_min) * scale).collect();
        let w = vec![params.w_max; users.len()];
        return LoadEstimate {
            n_l: params.w_max * users.len() as f64,
            w,
            p,
            feasible: false,
            n_l_int: n_max,
        };
    }

    let total_power = |level: f64| -> f64 { links.iter().map(|l| l.p(l.s_at(level))).sum() };

    // Below `lo` every user sits at its cap; grow `hi` until the budget binds.
    let mut lo = links
        .iter()
        .map(|l| phi(l.s_min) / l.a)
        .fold(f64::INFINITY, f64::min)
        .max(f64::MIN_POSITIVE);
    let mut hi = lo.max(1.0 / links.iter().map(|l| l.a).fold(0.0, f64::max));
    while total_power(hi) < p_max {
        lo = hi;
        hi *= 4.0;
    }
    while hi / lo - 1.0 > MULTIPLIER_TOL {
        let mid = (lo * hi).sqrt();
        if total_power(mid) <= p_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // `lo` keeps the budget satisfied.
    let s: Vec<f64> = links.iter().map(|l| l.s_at(lo)).collect();
    let w: Vec<f64> = links.iter().zip(&s).map(|(l, &s)| l.w(s)).collect();
    let p: Vec<f64> = links.iter().zip(&s).map(|(l, &s)| l.p(s)).collect();
    let n_l = w.iter().sum();
    LoadEstimate {
        w,
        p,
        n_l,
        feasible: true,
        n_l_int: integer_demand(n_l, n_max),
    }
}
