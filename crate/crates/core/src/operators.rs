//! Katugampola integral, `δ_ρ`, the Katugampola and generalized Katugampola
//! derivatives, and the norms of the weighted function spaces.
//!
//! Every operator works in the scaled variable `z`, where
//!
//! ```text
//! ^ρI^α g(t) = 1/Γ(α) ∫_0^z (z − s)^{α−1} g̃(s) ds,     δ_ρ = d/dz,
//! ```
//!
//! so the Katugampola operators are the Riemann–Liouville ones applied to
//! `g̃(z) = g(t(z))`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::gamma;
use crate::grid::{extrapolate_to_origin, GridFunction, Representation, ScaledGrid};
use crate::params::FracParams;

/// How the integrand is interpolated between nodes. The kernel
/// `(z_j − s)^{α−1}` is always integrated exactly over each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureScheme {
    /// Piecewise linear interpolation, second order on smooth integrands.
    #[default]
    ProductTrapezoid,
    /// Piecewise constant, left endpoint value. First order.
    ProductRectangle,
}

// Below this cell-to-distance ratio the weights use their power series,
// which avoids the cancellation in the closed form.
const SERIES_SWITCH: f64 = 0.25;

/// Lower-triangular product-integration matrix for `I^α` on a fixed grid,
/// already scaled by `1/Γ(α)`.
#[derive(Debug, Clone)]
pub struct ProductWeights {
    grid: Arc<ScaledGrid>,
    alpha: f64,
    scheme: QuadratureScheme,
    rows: Vec<Vec<f64>>,
}

impl ProductWeights {
    pub fn new(grid: &Arc<ScaledGrid>, alpha: f64, scheme: QuadratureScheme) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("integral order must be positive, got {alpha}")));
        }
        if grid.len() < 2 {
            return Err(Error::InsufficientNodes { needed: 2, got: grid.len() });
        }
        let z = grid.z();
        let scale = 1.0 / gamma(alpha);
        let rows = (0..z.len())
            .into_par_iter()
            .map(|j| {
                let mut row = match scheme {
                    QuadratureScheme::ProductTrapezoid => trapezoid_row(z, j, alpha),
                    QuadratureScheme::ProductRectangle => rectangle_row(z, j, alpha),
                };
                row.iter_mut().for_each(|w| *w *= scale);
                row
            })
            .collect();
        Ok(Self { grid: Arc::clone(grid), alpha, scheme, rows })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn grid(&self) -> &Arc<ScaledGrid> {
        &self.grid
    }

    /// Row `j` holds the weights of nodes `0..=j` (empty for `j = 0`).
    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }

    /// `Σ_k W_{jk} g_k` for every node `j`.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.rows.len());
        self.rows.par_iter().map(|row| row.iter().zip(values).map(|(w, g)| w * g).sum()).collect()
    }

    /// Integral of `z^{-w} v(z)` where `v` is sampled at the nodes with its
    /// limit at `z = 0` in `v[0]`. The constant part `v[0]·z^{-w}` is
    /// integrated in closed form; the remainder goes through the weights.
    ///
    /// Returns `z_j^{w-α} · I_j`, which tends to `v[0]·Γ(1-w)/Γ(1-w+α)` as `z → 0`.
    pub(crate) fn apply_weighted(&self, v: &[f64], w: f64) -> Result<Vec<f64>> {
        if !(w < 1.0) {
            return Err(Error::SingularWeight(w));
        }
        let z = self.grid.z();
        let v0 = v[0];
        let remainder: Vec<f64> =
            v.iter().zip(z).map(|(&vk, &zk)| if zk > 0.0 { (vk - v0) * zk.powf(-w) } else { 0.0 }).collect();
        let pl = self.apply(&remainder);
        let lead = v0 * power_rule(-w, self.alpha);
        let shift = w - self.alpha;
        Ok(pl
            .iter()
            .zip(z)
            .map(|(&p, &zj)| if zj > 0.0 { lead + p * zj.powf(shift) } else { lead })
            .collect())
    }

    /// Applies `I^α` to a grid function on the same grid.
    ///
    /// Plain input stays plain with value 0 at `z = 0`. Weighted input with
    /// exponent `w` comes back plain when `α ≥ w` and weighted with exponent
    /// `w − α` otherwise, the limit slot carrying the power-rule value.
    pub fn integrate(&self, g: &GridFunction) -> Result<GridFunction> {
        if g.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::GridMismatch("integrand is sampled on a different grid".into()));
        }
        match g.representation() {
            Representation::Plain => {
                if let Some(j) = g.values().iter().position(|v| !v.is_finite()) {
                    return Err(domain(format!(
                        "non-finite sample at node {j}; pass singular integrands in weighted form"
                    )));
                }
                GridFunction::new(Arc::clone(&self.grid), self.apply(g.values()), Representation::Plain)
            }
            Representation::Weighted { exponent } => {
                if let Some(j) = g.values().iter().position(|v| !v.is_finite()) {
                    return Err(domain(format!("non-finite weighted sample at node {j}")));
                }
                let scaled = self.apply_weighted(g.values(), exponent)?;
                let mut shift = exponent - self.alpha;
                if shift.abs() < 1e-12 {
                    shift = 0.0;
                }
                if shift > 0.0 {
                    return GridFunction::new(
                        Arc::clone(&self.grid),
                        scaled,
                        Representation::Weighted { exponent: shift },
                    );
                }
                let z = self.grid.z();
                let values = scaled
                    .iter()
                    .zip(z)
                    .map(|(&s, &zj)| {
                        if zj > 0.0 {
                            s * zj.powf(-shift)
                        } else if shift == 0.0 {
                            s
                        } else {
                            0.0
                        }
                    })
                    .collect();
                GridFunction::new(Arc::clone(&self.grid), values, Representation::Plain)
            }
        }
    }
}

/// `Γ(σ+1)/Γ(σ+α+1)`: `I^α z^σ = coeff · z^{σ+α}`.
pub(crate) fn power_rule(sigma: f64, alpha: f64) -> f64 {
    gamma(sigma + 1.0) / gamma(sigma + alpha + 1.0)
}

/// `∫_0^x (1−y)^{α−1} dy` for `x ∈ (0, 1]`.
fn moment0(alpha: f64, x: f64) -> f64 {
    -(alpha * (-x).ln_1p()).exp_m1() / alpha
}

fn trapezoid_row(z: &[f64], j: usize, alpha: f64) -> Vec<f64> {
    let mut row = vec![0.0; j + 1];
    if j == 0 {
        return row;
    }
    let zj = z[j];
    for k in 0..j {
        let far = zj - z[k];
        let h = z[k + 1] - z[k];
        let x = if k + 1 == j { 1.0 } else { (h / far).min(1.0) };
        let far_alpha = far.powf(alpha);
        // left/right weights are far^α/x · ∫_0^x (1−y)^{α−1}(x−y, y) dy
        let (left, right) = if x >= SERIES_SWITCH {
            let m0 = moment0(alpha, x);
            let m1 = moment0(alpha + 1.0, x);
            let r = m0 - m1;
            (x * m0 - r, r)
        } else {
            let mut left = 0.0;
            let mut right = 0.0;
            let mut coeff = 1.0;
            let mut xpow = x * x;
            let mut n = 0.0;
            loop {
                let t_right = coeff * xpow / (n + 2.0);
                right += t_right;
                left += t_right / (n + 1.0);
                if t_right.abs() <= 1e-17 * right.abs() {
                    break;
                }
                coeff *= (n + 1.0 - alpha) / (n + 1.0);
                xpow *= x;
                n += 1.0;
            }
            (left, right)
        };
        row[k] += far_alpha * left / x;
        row[k + 1] += far_alpha * right / x;
    }
    row
}

fn rectangle_row(z: &[f64], j: usize, alpha: f64) -> Vec<f64> {
    let mut row = vec![0.0; j + 1];
    let zj = z[j];
    for k in 0..j {
        let far = zj - z[k];
        let x = if k + 1 == j { 1.0 } else { ((z[k + 1] - z[k]) / far).min(1.0) };
        row[k] = far.powf(alpha) * moment0(alpha, x);
    }
    row
}

/// `^ρI^α g` by product integration on the grid of `g`.
pub fn katugampola_integral(g: &GridFunction, alpha: f64, scheme: QuadratureScheme) -> Result<GridFunction> {
    ProductWeights::new(g.grid(), alpha, scheme)?.integrate(g)
}

/// Derivative at `x` of the quadratic through three points, written in
/// difference form so that constants differentiate to exactly zero.
fn three_point(x: f64, p: [(f64, f64); 3]) -> f64 {
    let [(x0, f0), (x1, f1), (x2, f2)] = p;
    let c0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
    let c2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    c0 * (f0 - f1) + c2 * (f2 - f1)
}

/// `δ_ρ g = dg̃/dz` by three-point differences on the nonuniform `z` grid.
///
/// Interior nodes use the centred stencil, the endpoints one-sided ones.
/// When `g` is infinite at `z = 0` node 1 switches to a forward stencil and
/// the value at node 0 is NaN. The node-0 value is only as good as `g` is
/// smooth at the left endpoint.
pub fn delta_rho(g: &GridFunction) -> Result<GridFunction> {
    let n = g.len();
    if n < 3 {
        return Err(Error::InsufficientNodes { needed: 3, got: n });
    }
    let z = g.grid().z();
    let f = g.plain_values();
    let pt = |k: usize| (z[k], f[k]);
    let origin_finite = f[0].is_finite();
    let out = (0..n)
        .map(|j| match j {
            0 if origin_finite => three_point(z[0], [pt(0), pt(1), pt(2)]),
            0 => f64::NAN,
            1 if !origin_finite => {
                if n >= 4 {
                    three_point(z[1], [pt(1), pt(2), pt(3)])
                } else {
                    f64::NAN
                }
            }
            j if j == n - 1 => three_point(z[j], [pt(j - 2), pt(j - 1), pt(j)]),
            j => three_point(z[j], [pt(j - 1), pt(j), pt(j + 1)]),
        })
        .collect();
    GridFunction::new(Arc::clone(g.grid()), out, Representation::Plain)
}

/// `δ_ρ(^ρI^{1−α} g)` for `0 < α < 1`.
pub fn katugampola_derivative(g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("derivative order must lie in (0, 1), got {alpha}")));
    }
    let inner = katugampola_integral(g, 1.0 - alpha, QuadratureScheme::ProductTrapezoid)?;
    delta_rho(&inner)
}

/// `^ρI^{β(1−α)} δ_ρ ^ρI^{(1−β)(1−α)} g`.
///
/// Integrals of order zero are skipped, so `β = 0` is exactly
/// [`katugampola_derivative`]. Endpoint behaviour is read from the
/// representation of `g`: weighted input `z^{−w} v` with smooth `v` (plain
/// input has `w = 0`) makes the inner integral `h = z^s U` with
/// `s = (1−β)(1−α) − w` and smooth `U`. The derivative then goes to the
/// outer integral as `z^{1−s} δ_ρ h = sU + zU'`, so differences only ever
/// act on `U`.
pub fn generalized_derivative(g: &GridFunction, params: &FracParams) -> Result<GridFunction> {
    let inner_order = params.one_minus_gamma();
    let outer_order = params.outer_order();
    let inner = if inner_order > 0.0 {
        katugampola_integral(g, inner_order, QuadratureScheme::ProductTrapezoid)?
    } else {
        g.clone()
    };
    if outer_order == 0.0 {
        return delta_rho(&inner);
    }
    let w = match g.representation() {
        Representation::Plain => 0.0,
        Representation::Weighted { exponent } => exponent,
    };
    let s = inner_order - w;
    let derivative = if s.abs() < 1e-12 {
        delta_rho(&GridFunction::new(Arc::clone(g.grid()), inner.plain_values(), Representation::Plain)?)?
    } else if s > 0.0 {
        weighted_derivative(&inner, s)?
    } else {
        // δh ~ z^{s−1} is not integrable at the endpoint
        return Err(Error::SingularWeight(1.0 - s));
    };
    katugampola_integral(&derivative, outer_order, QuadratureScheme::ProductTrapezoid)
}

/// `z^{1−s} δ_ρ h = sU + zU'` for `h = z^s U`, weighted with exponent `1 − s`.
fn weighted_derivative(h: &GridFunction, s: f64) -> Result<GridFunction> {
    let grid = h.grid();
    let z = grid.z();
    let mut u = h.weighted_values(-s);
    u[0] = extrapolate_to_origin(z, &u)?;
    let du = delta_rho(&GridFunction::new(Arc::clone(grid), u.clone(), Representation::Plain)?)?;
    let v = u
        .iter()
        .zip(du.values())
        .zip(z)
        .map(|((&uj, &dj), &zj)| s * uj + if zj > 0.0 { zj * dj } else { 0.0 })
        .collect();
    GridFunction::new(Arc::clone(grid), v, Representation::Weighted { exponent: 1.0 - s })
}

/// `max_j |z_j^γ g(t_j)|`, the norm of `C_{γ,ρ}`.
pub fn weighted_sup_norm(g: &GridFunction, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(domain(format!("weight exponent must lie in [0, 1), got {gamma}")));
    }
    Ok(sup_abs(&g.weighted_values(gamma)))
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// `(∫_a^T |t^c g(t)|^p dt/t)^{1/p}` by the trapezoid rule on the `t` nodes;
/// `p = ∞` gives the node maximum of `|t^c g(t)|`.
pub fn xcp_norm(g: &GridFunction, c: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(domain(format!("X_c^p needs p >= 1, got {p}")));
    }
    let t = g.grid().t();
    let scaled: Vec<f64> = g.plain_values().iter().zip(t).map(|(&v, &tj)| (tj.powf(c) * v).abs()).collect();
    if let Some(j) = scaled.iter().position(|v| !v.is_finite()) {
        return Err(domain(format!("non-finite sample at node {j}")));
    }
    if p.is_infinite() {
        return Ok(sup_abs(&scaled));
    }
    let integrand: Vec<f64> = scaled.iter().zip(t).map(|(&v, &tj)| v.powf(p) / tj).collect();
    let integral: f64 =
        t.windows(2).zip(integrand.windows(2)).map(|(tw, iw)| 0.5 * (tw[1] - tw[0]) * (iw[0] + iw[1])).sum();
    Ok(integral.powf(1.0 / p))
}

/// Norm of `C^n_{δ_ρ,γ}` for `n ∈ {0, 1}`.
pub fn cdelta_norm(g: &GridFunction, n: u32, gamma: f64) -> Result<f64> {
    match n {
        0 => weighted_sup_norm(g, gamma),
        1 => {
            let plain = sup_abs(&g.plain_values());
            Ok(plain + weighted_sup_norm(&delta_rho(g)?, gamma)?)
        }
        _ => Err(Error::Unsupported(format!("C^n_delta norm is implemented for n <= 1, got {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_graded_grid;

    fn grid(a: f64, t_end: f64, n: usize, r: f64, rho: f64) -> Arc<ScaledGrid> {
        make_graded_grid(a, t_end, n, r, rho).unwrap().into_shared()
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let g = GridFunction::from_fn(&grid(1.0, 2.0, 33, 2.0, 2.0), |_, _| 0.0);
        let out = katugampola_integral(&g, 0.4, QuadratureScheme::default()).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn order_one_is_ordinary_integral() {
        let gr = grid(0.5, 2.0, 17, 1.0, 1.0);
        let g = GridFunction::from_fn(&gr, |_, _| 1.0);
        let out = katugampola_integral(&g, 1.0, QuadratureScheme::default()).unwrap();
        for (&v, &t) in out.values().iter().zip(gr.t()) {
            assert!((v - (t - 0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn half_order_of_constant() {
        // z = 1 at t = sqrt(3) with a = 1, rho = 2.
        let gr = grid(1.0, 3f64.sqrt(), 65, 2.0, 2.0);
        let g = GridFunction::from_fn(&gr, |_, _| 1.0);
        let out = katugampola_integral(&g, 0.5, QuadratureScheme::default()).unwrap();
        let last = *out.values().last().unwrap();
        assert!((last - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12, "{last}");
    }

    #[test]
    fn rectangle_scheme_is_exact_on_constants() {
        let gr = grid(1.0, 2.0, 40, 1.5, 1.0);
        let g = GridFunction::from_fn(&gr, |_, _| 2.0);
        let out = katugampola_integral(&g, 0.3, QuadratureScheme::ProductRectangle).unwrap();
        for (&v, &z) in out.values().iter().zip(gr.z()) {
            let exact = 2.0 * z.powf(0.3) / gamma(1.3);
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn weighted_power_is_exact() {
        let gr = grid(1.0, 2.5, 50, 1.0, 1.5);
        let w = 0.35;
        let g = GridFunction::weighted_from_fn(&gr, w, |_, _| 1.0);
        // alpha < w keeps a weighted result, alpha > w returns plain.
        let out = katugampola_integral(&g, 0.2, QuadratureScheme::default()).unwrap();
        assert_eq!(out.representation(), Representation::Weighted { exponent: w - 0.2 });
        let coeff = power_rule(-w, 0.2);
        assert!(out.values().iter().all(|&v| (v - coeff).abs() < 1e-14));
        let out = katugampola_integral(&g, 0.7, QuadratureScheme::default()).unwrap();
        assert_eq!(out.representation(), Representation::Plain);
        for (&v, &z) in out.values().iter().zip(gr.z()) {
            assert!((v - power_rule(-w, 0.7) * z.powf(0.7 - w)).abs() < 1e-13);
        }
    }

    #[test]
    fn integral_errors() {
        let gr = grid(1.0, 2.0, 8, 1.0, 1.0);
        let g = GridFunction::from_fn(&gr, |_, _| 1.0);
        assert!(katugampola_integral(&g, 0.0, QuadratureScheme::default()).is_err());
        let w = GridFunction::weighted_from_fn(&gr, 1.0, |_, _| 1.0);
        assert!(matches!(
            katugampola_integral(&w, 0.5, QuadratureScheme::default()),
            Err(Error::SingularWeight(_))
        ));
        let inf = GridFunction::from_fn(&gr, |_, z| z.powf(-0.5));
        assert!(katugampola_integral(&inf, 0.5, QuadratureScheme::default()).is_err());
    }

    #[test]
    fn delta_examples() {
        let gr = grid(1.0, 2.0, 3, 1.0, 1.0);
        let c = delta_rho(&GridFunction::from_fn(&gr, |_, _| 4.2)).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
        let lin = delta_rho(&GridFunction::from_fn(&gr, |_, z| z)).unwrap();
        assert!((lin.values()[1] - 1.0).abs() < 1e-15);
        let quad = delta_rho(&GridFunction::from_fn(&gr, |_, z| z * z)).unwrap();
        assert!((quad.values()[1] - 1.0).abs() < 1e-15);
        let short = grid(1.0, 2.0, 2, 1.0, 1.0);
        assert!(matches!(
            delta_rho(&GridFunction::from_fn(&short, |_, z| z)),
            Err(Error::InsufficientNodes { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn delta_matches_t_derivative() {
        // δ_ρ g = t^{1-ρ} g'(t); with g = t^2, rho = 3: δ g = 2/t.
        let gr = grid(1.0, 2.0, 2001, 1.0, 3.0);
        let d = delta_rho(&GridFunction::from_fn(&gr, |t, _| t * t)).unwrap();
        for (j, (&v, &t)) in d.values().iter().zip(gr.t()).enumerate().skip(1).take(1998) {
            assert!((v - 2.0 / t).abs() < 1e-5, "node {j}");
        }
    }

    #[test]
    fn katugampola_derivative_examples() {
        let gr = grid(1.0, 2.0, 257, 2.0, 1.0);
        let zero = GridFunction::from_fn(&gr, |_, _| 0.0);
        let d = katugampola_derivative(&zero, 0.5).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));

        let alpha = 0.4;
        let kernel = GridFunction::weighted_from_fn(&gr, 1.0 - alpha, |_, _| 1.0);
        let d = katugampola_derivative(&kernel, alpha).unwrap();
        assert!(d.values().iter().skip(1).all(|&v| v == 0.0));

        let one = GridFunction::from_fn(&gr, |_, _| 1.0);
        let d = katugampola_derivative(&one, 0.5).unwrap();
        for (&v, &z) in d.values().iter().zip(gr.z()) {
            if z > 0.1 {
                let exact = z.powf(-0.5) / gamma(0.5);
                assert!((v - exact).abs() < 1e-4 * exact, "z = {z}");
            }
        }
        assert!(katugampola_derivative(&one, 1.0).is_err());
    }

    #[test]
    fn generalized_derivative_examples() {
        let gr = grid(1.0, 2.0, 129, 2.0, 1.0);
        let zero = GridFunction::from_fn(&gr, |_, _| 0.0);
        let params = FracParams::new(0.5, 0.5, 1.0).unwrap();
        let d = generalized_derivative(&zero, &params).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));

        let kernel = GridFunction::weighted_from_fn(&gr, params.one_minus_gamma(), |_, _| 1.0);
        let d = generalized_derivative(&kernel, &params).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));

        let one = GridFunction::from_fn(&gr, |_, _| 1.0);
        let riemann = FracParams::new(0.5, 0.0, 1.0).unwrap();
        let a = generalized_derivative(&one, &riemann).unwrap();
        let b = katugampola_derivative(&one, 0.5).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn weighted_norm_examples() {
        let gr = grid(1.0, 2.0, 33, 2.0, 1.0);
        let zero = GridFunction::from_fn(&gr, |_, _| 0.0);
        assert_eq!(weighted_sup_norm(&zero, 0.3).unwrap(), 0.0);
        let g = GridFunction::from_fn(&gr, |t, _| (3.0 * t).sin());
        let plain_max = g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(weighted_sup_norm(&g, 0.0).unwrap(), plain_max);
        let s = GridFunction::weighted_from_fn(&gr, 0.25, |_, _| 1.0);
        assert!((weighted_sup_norm(&s, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!(weighted_sup_norm(&g, 1.0).is_err());
    }

    #[test]
    fn xcp_norm_examples() {
        let e = std::f64::consts::E;
        let gr = grid(1.0, e, 101, 1.0, 0.7);
        let zero = GridFunction::from_fn(&gr, |_, _| 0.0);
        assert_eq!(xcp_norm(&zero, 1.0, 2.0).unwrap(), 0.0);
        let one = GridFunction::from_fn(&gr, |_, _| 1.0);
        assert!((xcp_norm(&one, 1.0, 1.0).unwrap() - (e - 1.0)).abs() < 1e-12);
        assert!((xcp_norm(&one, 1.0, f64::INFINITY).unwrap() - e).abs() < 1e-12);
        assert!(xcp_norm(&one, 1.0, 0.5).is_err());
    }

    #[test]
    fn xcp_with_c_one_over_p_is_lp() {
        let gr = grid(0.5, 2.0, 4001, 1.0, 1.0);
        let g = GridFunction::from_fn(&gr, |t, _| t.sin() + 0.5);
        let p = 3.0;
        let x = xcp_norm(&g, 1.0 / p, p).unwrap();
        let t = gr.t();
        let lp: f64 = t
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * ((w[0].sin() + 0.5).powf(p) + (w[1].sin() + 0.5).powf(p)))
            .sum::<f64>()
            .powf(1.0 / p);
        assert!((x - lp).abs() < 1e-6 * lp);
    }

    #[test]
    fn cdelta_examples() {
        let gr = grid(1.0, 2.0, 33, 1.0, 1.0);
        let g = GridFunction::from_fn(&gr, |_, z| z);
        assert_eq!(cdelta_norm(&g, 0, 0.25).unwrap(), weighted_sup_norm(&g, 0.25).unwrap());
        let c = GridFunction::from_fn(&gr, |_, _| -3.0);
        assert_eq!(cdelta_norm(&c, 1, 0.25).unwrap(), 3.0);
        assert!((cdelta_norm(&g, 1, 0.25).unwrap() - 2.0).abs() < 1e-13);
        assert!(matches!(cdelta_norm(&g, 2, 0.25), Err(Error::Unsupported(_))));
    }
}
