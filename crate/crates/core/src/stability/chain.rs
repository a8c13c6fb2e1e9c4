//! Time functions of the Grönwall–Pachpatte chain, tabulated on grid nodes.
//!
//! ```text
//! l(t) = 2^{mq−1} |b|^{mq} Ĉ1^q ∫_a^t φ^q
//! k(t) = 2^{mq−1} Ĉ1^q ∫_a^t z^{−mqβ(α−1)} φ^q
//! w(t) ≤ [l^{1−m} − (m−1) k]^{−1/(m−1)}          while l^{m−1} k < 1/(m−1)
//! z^{β(1−α)} z^{1−γ}|x| ≤ |b| z^{β(1−α)} + w^{1/q}
//! z^{1−γ}|x| ≤ |b| + w^{1/q} z^{−β(1−α)}
//! ```

use std::sync::Arc;

use rayon::prelude::*;

use super::hypotheses::{phi_q_moment, DerivedConstants, Hypotheses};
use crate::error::{domain, Error, Result};
use crate::grid::ScaledGrid;
use crate::params::FracParams;

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub grid: Arc<ScaledGrid>,
    pub constants: DerivedConstants,
    pub b: f64,
    pub m: u32,
    pub q: f64,
    /// `β(1−α)`.
    pub exponent: f64,
    pub l: Vec<f64>,
    pub k: Vec<f64>,
    /// `k` with the weight `z^{−mqβ(1−α)}` of the smallness hypothesis instead
    /// of the chain's `z^{−mqβ(α−1)}`; infinite when that weight is not
    /// integrable.
    pub k_hypothesis_weight: Vec<f64>,
    /// Infinite outside the validity region.
    pub w_bound: Vec<f64>,
    pub z_bound: Vec<f64>,
    pub y_bound: Vec<f64>,
    /// Largest node `t` up to which `l^{m−1} k < 1/(m−1)` holds.
    pub validity_horizon: f64,
    pub t0: f64,
    pub t0_index: usize,
    /// `sup y_bound` over `[t0, T]`; infinite unless the validity region
    /// reaches `T`.
    pub final_c: f64,
}

impl BoundReport {
    pub fn covers_horizon(&self) -> bool {
        self.validity_horizon >= self.grid.t_end()
    }

    /// `l^{m−1} k` at every node.
    pub fn validity_product(&self) -> Vec<f64> {
        let m = self.m as i32;
        self.l.iter().zip(&self.k).map(|(l, k)| l.powi(m - 1) * k).collect()
    }
}

/// First node with `z ≥ Z/100`.
pub fn default_t0(grid: &ScaledGrid) -> (usize, f64) {
    let cut = 0.01 * grid.z_end();
    let j = grid.z().iter().position(|&z| z >= cut).unwrap_or(grid.len() - 1);
    (j.max(1), grid.t()[j.max(1)])
}

/// `[l^{1−m} − (m−1)k]^{−1/(m−1)}` written as `l [1 − (m−1) l^{m−1} k]^{−1/(m−1)}`.
pub fn w_bound(l: f64, k: f64, m: u32) -> f64 {
    if l == 0.0 {
        return 0.0;
    }
    let mm = (m - 1) as f64;
    let gap = 1.0 - mm * l.powi(m as i32 - 1) * k;
    if gap > 0.0 {
        l * gap.powf(-1.0 / mm)
    } else {
        f64::INFINITY
    }
}

fn cumulative(h: &Hypotheses, params: &FracParams, grid: &ScaledGrid, e: f64) -> Result<Vec<f64>> {
    let z = grid.z();
    let a = grid.a();
    let cells = (1..z.len())
        .into_par_iter()
        .map(|j| phi_q_moment(h, params, a, z[j - 1], z[j], e))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(z.len());
    out.push(0.0);
    for c in cells {
        acc += c;
        out.push(acc);
    }
    Ok(out)
}

/// Tabulates the chain on `grid`. `t0` defaults to [`default_t0`].
pub fn gronwall_chain(
    h: &Hypotheses,
    c: &DerivedConstants,
    params: &FracParams,
    b: f64,
    grid: &Arc<ScaledGrid>,
    t0: Option<f64>,
) -> Result<BoundReport> {
    if grid.rho() != params.rho() {
        return Err(Error::GridMismatch(format!(
            "grid built for rho = {}, parameters have rho = {}",
            grid.rho(),
            params.rho()
        )));
    }
    let (t0_index, t0) = match t0 {
        None => default_t0(grid),
        Some(t0) => {
            if !(t0 > grid.a() && t0 <= grid.t_end()) {
                return Err(domain(format!("t0 must lie in (a, T], got {t0}")));
            }
            let j = grid.t().iter().position(|&t| t >= t0).expect("t0 <= T");
            (j, t0)
        }
    };
    let (m, q) = (h.m, h.q);
    let mq = m as f64 * q;
    let exponent = params.outer_order();
    let lead = 2f64.powf(mq - 1.0) * c.c1_hat.powf(q);

    let l: Vec<f64> =
        cumulative(h, params, grid, 0.0)?.into_iter().map(|v| lead * b.abs().powf(mq) * v).collect();
    // −mqβ(α−1) = +mqβ(1−α)
    let k: Vec<f64> = cumulative(h, params, grid, mq * exponent)?.into_iter().map(|v| lead * v).collect();
    let k_hypothesis_weight = if mq * exponent < 1.0 {
        cumulative(h, params, grid, -mq * exponent)?.into_iter().map(|v| lead * v).collect()
    } else {
        let mut v = vec![f64::INFINITY; grid.len()];
        v[0] = 0.0;
        v
    };

    let w: Vec<f64> = l.iter().zip(&k).map(|(&l, &k)| w_bound(l, k, m)).collect();
    let z = grid.z();
    let z_bound: Vec<f64> =
        w.iter().zip(z).map(|(&w, &zj)| b.abs() * zj.powf(exponent) + w.powf(1.0 / q)).collect();
    let y_bound: Vec<f64> = w
        .iter()
        .zip(z)
        .map(|(&w, &zj)| if w == 0.0 { b.abs() } else { b.abs() + w.powf(1.0 / q) * zj.powf(-exponent) })
        .collect();

    let valid = w.iter().take_while(|w| w.is_finite()).count();
    let validity_horizon = grid.t()[valid - 1];
    let final_c = if valid == grid.len() {
        y_bound[t0_index..].iter().copied().fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(BoundReport {
        grid: Arc::clone(grid),
        constants: *c,
        b,
        m,
        q,
        exponent,
        l,
        k,
        k_hypothesis_weight,
        w_bound: w,
        z_bound,
        y_bound,
        validity_horizon,
        t0,
        t0_index,
        final_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;
    use crate::stability::hypotheses::derive_constants;

    #[test]
    fn unforced_chain() {
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 3.0, |_| 0.0).unwrap();
        let c = derive_constants(&h, &params, 1.0, 1.0).unwrap();
        let grid = make_graded_grid(1.0, 2.0, 65, 2.0, 1.0).unwrap().into_shared();
        let r = gronwall_chain(&h, &c, &params, 1.0, &grid, None).unwrap();
        assert!(r.l.iter().chain(&r.k).chain(&r.w_bound).all(|&v| v == 0.0));
        assert!(r.y_bound.iter().all(|&v| v == 1.0));
        assert_eq!(r.final_c, 1.0);
        assert!(r.covers_horizon());
        assert!(grid.z()[r.t0_index] >= 0.01 * grid.z_end());
        assert!(grid.z()[r.t0_index - 1] < 0.01 * grid.z_end());
    }

    #[test]
    fn quadratic_specialisation() {
        for &(l, k) in &[(0.3, 0.5), (1e-6, 2.0), (2.0, 0.49), (0.0, 3.0)] {
            let general = w_bound(l, k, 2);
            let closed = if l == 0.0 { 0.0 } else { 1.0 / (1.0 / l - k) };
            assert!((general - closed).abs() <= 1e-12 * closed.abs());
        }
        assert!(w_bound(2.0, 0.5, 2).is_infinite());
    }

    #[test]
    fn forced_chain_is_monotone() {
        let params = FracParams::new(0.8, 0.2, 1.0).unwrap();
        let h = Hypotheses::new(0.5, 1.0, 2, 1.5, |t: f64| 0.01 * (-t).exp()).unwrap();
        let c = derive_constants(&h, &params, 1.0, 1.0).unwrap();
        let grid = make_graded_grid(1.0, 2.0, 129, 2.5, 1.0).unwrap().into_shared();
        let r = gronwall_chain(&h, &c, &params, 1.0, &grid, None).unwrap();
        assert!(r.l.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.k.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.covers_horizon());
        assert!(r.final_c > 1.0 && r.final_c.is_finite());
        // l is linear in ∫φ^q, compare against a direct quadrature
        let direct = 0.01f64.powf(1.5) * ((-1.5f64).exp() - (-3.0f64).exp()) / 1.5;
        let lead = 2f64.powf(2.0) * c.c1_hat.powf(1.5);
        assert!((r.l[128] - lead * direct).abs() < 1e-10 * r.l[128]);
    }
}
