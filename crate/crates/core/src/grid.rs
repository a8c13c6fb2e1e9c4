//! Scaled time, graded meshes and sampled functions.

use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// `z = (t^ρ − a^ρ)/ρ`.
pub fn scaled_time(t: f64, a: f64, rho: f64) -> Result<f64> {
    check_endpoint(a, rho)?;
    if !(t >= a) {
        return Err(domain(format!("t = {t} lies left of a = {a}")));
    }
    if rho == 1.0 {
        return Ok(t - a);
    }
    // a^ρ·expm1(ρ ln(t/a))/ρ keeps full relative accuracy for t close to a.
    Ok(a.powf(rho) * (rho * (t / a).ln()).exp_m1() / rho)
}

/// Inverse of [`scaled_time`]: `t = (ρz + a^ρ)^{1/ρ}`.
pub fn inverse_scaled_time(z: f64, a: f64, rho: f64) -> Result<f64> {
    check_endpoint(a, rho)?;
    if !(z >= 0.0) {
        return Err(domain(format!("scaled time must be nonnegative, got {z}")));
    }
    if rho == 1.0 {
        return Ok(a + z);
    }
    Ok(a * ((rho * z / a.powf(rho)).ln_1p() / rho).exp())
}

fn check_endpoint(a: f64, rho: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(format!("left endpoint must be positive, got {a}")));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(domain(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// Graded mesh on `[a, T]`, uniform in `(j/(N-1))^r` of the scaled variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledGrid {
    a: f64,
    t_end: f64,
    rho: f64,
    grading: f64,
    t: Vec<f64>,
    z: Vec<f64>,
}

/// Grading exponent `clamp(2/γ, 1, 6)`.
pub fn default_grading(gamma: f64) -> f64 {
    (2.0 / gamma).clamp(1.0, 6.0)
}

pub fn make_graded_grid(a: f64, t_end: f64, n: usize, r: f64, rho: f64) -> Result<ScaledGrid> {
    check_endpoint(a, rho)?;
    if !(t_end > a && t_end.is_finite()) {
        return Err(domain(format!("need a < T, got a = {a}, T = {t_end}")));
    }
    if n < 2 {
        return Err(Error::InsufficientNodes { needed: 2, got: n });
    }
    if !(r >= 1.0 && r.is_finite()) {
        return Err(domain(format!("grading exponent must be >= 1, got {r}")));
    }
    let big_z = scaled_time(t_end, a, rho)?;
    let last = (n - 1) as f64;
    let mut z: Vec<f64> = (0..n).map(|j| big_z * (j as f64 / last).powf(r)).collect();
    z[n - 1] = big_z;
    let mut t = z.iter().map(|&zj| inverse_scaled_time(zj, a, rho)).collect::<Result<Vec<_>>>()?;
    t[0] = a;
    t[n - 1] = t_end;
    // Strong grading can put the first nodes closer to `a` than `t` resolves;
    // everything is computed in `z`, so `t` only has to be nondecreasing.
    if z.windows(2).any(|w| w[1] <= w[0]) || t.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain(format!(
            "grid with N = {n}, r = {r} on [{a}, {t_end}] is not strictly increasing in floating point"
        )));
    }
    Ok(ScaledGrid { a, t_end, rho, grading: r, t, z })
}

impl ScaledGrid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Total scaled length `Z = z_{N-1}`.
    pub fn z_end(&self) -> f64 {
        self.z[self.z.len() - 1]
    }

    pub fn into_shared(self) -> Arc<ScaledGrid> {
        Arc::new(self)
    }
}

/// How a [`GridFunction`] stores its samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Representation {
    Plain,
    /// Stored value is `z^exponent · f(t)`; slot 0 holds the limit as `z → 0`.
    Weighted {
        exponent: f64,
    },
}

/// Source of the weighted value at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Value(f64),
    /// Quadratic extrapolation from the three smallest positive nodes.
    Extrapolate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<ScaledGrid>,
    values: Vec<f64>,
    repr: Representation,
}

impl GridFunction {
    pub fn new(grid: Arc<ScaledGrid>, values: Vec<f64>, repr: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, repr })
    }

    /// Samples `f(t, z)` at every node.
    pub fn from_fn(grid: &Arc<ScaledGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.t.iter().zip(&grid.z).map(|(&t, &z)| f(t, z)).collect();
        Self { grid: Arc::clone(grid), values, repr: Representation::Plain }
    }

    /// Samples a weighted representative `v(t, z) = z^w f(t)` directly;
    /// `v` must be continuous up to `z = 0`.
    pub fn weighted_from_fn(grid: &Arc<ScaledGrid>, exponent: f64, v: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.t.iter().zip(&grid.z).map(|(&t, &z)| v(t, z)).collect();
        Self { grid: Arc::clone(grid), values, repr: Representation::Weighted { exponent } }
    }

    pub fn grid(&self) -> &Arc<ScaledGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn weight_exponent(&self) -> Option<f64> {
        match self.repr {
            Representation::Plain => None,
            Representation::Weighted { exponent } => Some(exponent),
        }
    }

    /// Value of `f(t_j)` regardless of storage. At `z = 0` a weighted function
    /// with positive exponent and nonzero limit is infinite.
    pub fn plain_value(&self, j: usize) -> f64 {
        match self.repr {
            Representation::Plain => self.values[j],
            Representation::Weighted { exponent } => {
                let z = self.grid.z[j];
                if z > 0.0 {
                    self.values[j] / z.powf(exponent)
                } else {
                    unweight_at_origin(self.values[j], exponent)
                }
            }
        }
    }

    /// Plain values at every node (see [`GridFunction::plain_value`] for `z = 0`).
    pub fn plain_values(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.plain_value(j)).collect()
    }

    /// `z_j^e · f(t_j)` at every node, whatever the storage. The value at
    /// `z = 0` follows from the stored limit: it is the limit itself when the
    /// exponents agree, zero when `e` is larger and infinite when smaller.
    pub fn weighted_values(&self, e: f64) -> Vec<f64> {
        let z = &self.grid.z;
        match self.repr {
            Representation::Plain => self
                .values
                .iter()
                .zip(z)
                .map(|(&g, &zj)| {
                    if zj > 0.0 {
                        g * zj.powf(e)
                    } else if e == 0.0 {
                        g
                    } else if e > 0.0 && g.is_finite() {
                        0.0
                    } else {
                        f64::NAN
                    }
                })
                .collect(),
            Representation::Weighted { exponent } => {
                let shift = e - exponent;
                self.values
                    .iter()
                    .zip(z)
                    .map(|(&v, &zj)| {
                        if zj > 0.0 {
                            v * zj.powf(shift)
                        } else if shift == 0.0 {
                            v
                        } else if shift > 0.0 || v == 0.0 {
                            0.0
                        } else {
                            v.signum() * f64::INFINITY
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn to_weighted(&self, exponent: f64, limit: Limit) -> Result<Self> {
        if self.repr != Representation::Plain {
            return Err(Error::Representation { expected: "plain", found: format!("{:?}", self.repr) });
        }
        let z = &self.grid.z;
        let mut values: Vec<f64> = self
            .values
            .iter()
            .zip(z)
            .map(|(&g, &zj)| if zj > 0.0 { g * zj.powf(exponent) } else { g })
            .collect();
        values[0] = match limit {
            Limit::Value(v) => v,
            Limit::Extrapolate => extrapolate_to_origin(z, &values)?,
        };
        Ok(Self { grid: Arc::clone(&self.grid), values, repr: Representation::Weighted { exponent } })
    }

    pub fn from_weighted(&self) -> Result<Self> {
        if !matches!(self.repr, Representation::Weighted { .. }) {
            return Err(Error::Representation { expected: "weighted", found: format!("{:?}", self.repr) });
        }
        Ok(Self { grid: Arc::clone(&self.grid), values: self.plain_values(), repr: Representation::Plain })
    }
}

fn unweight_at_origin(limit: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        limit
    } else if exponent < 0.0 || limit == 0.0 {
        0.0
    } else {
        limit.signum() * f64::INFINITY
    }
}

/// Value at `z_0 = 0` of the interpolating polynomial through the first
/// (up to three) positive nodes.
pub(crate) fn extrapolate_to_origin(z: &[f64], values: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = z.iter().zip(values).skip(1).take(3).map(|(&zj, &vj)| (zj, vj)).collect();
    if pts.is_empty() {
        return Err(Error::InsufficientNodes { needed: 2, got: z.len() });
    }
    let mut total = 0.0;
    for (i, &(zi, vi)) in pts.iter().enumerate() {
        let basis: f64 =
            pts.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &(zk, _))| zk / (zk - zi)).product();
        total += vi * basis;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn scaled_time_examples() {
        assert_eq!(scaled_time(1.0, 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(scaled_time(2.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(close(scaled_time(3f64.sqrt(), 1.0, 2.0).unwrap(), 1.0, 1e-15));
        assert!(scaled_time(0.5, 1.0, 1.0).is_err());
        assert!(scaled_time(2.0, 0.0, 1.0).is_err());
        assert!(scaled_time(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_scaled_time(0.0, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(inverse_scaled_time(1.0, 1.0, 1.0).unwrap(), 2.0);
        assert!(close(inverse_scaled_time(1.0, 1.0, 2.0).unwrap(), 1.7320508075688772, 1e-15));
        assert!(inverse_scaled_time(-1e-3, 1.0, 2.0).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = make_graded_grid(1.0, 2.0, 2, 1.0, 1.0).unwrap();
        assert_eq!(g.t(), &[1.0, 2.0]);
        let g = make_graded_grid(1.0, 2.0, 3, 1.0, 1.0).unwrap();
        assert_eq!(g.z(), &[0.0, 0.5, 1.0]);
        let g = make_graded_grid(1.0, 2.0, 3, 2.0, 1.0).unwrap();
        assert_eq!(g.z(), &[0.0, 0.25, 1.0]);
        assert!(make_graded_grid(1.0, 1.0, 3, 1.0, 1.0).is_err());
        assert!(make_graded_grid(1.0, 2.0, 1, 1.0, 1.0).is_err());
        assert!(make_graded_grid(1.0, 2.0, 3, 0.5, 1.0).is_err());
    }

    #[test]
    fn default_grading_is_clamped() {
        assert_eq!(default_grading(1.0), 2.0);
        assert_eq!(default_grading(0.1), 6.0);
        assert!((default_grading(0.75) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weighting_examples() {
        let grid = make_graded_grid(1.0, 2.0, 3, 2.0, 1.0).unwrap().into_shared();
        let zero = GridFunction::from_fn(&grid, |_, _| 0.0);
        let w = zero.to_weighted(0.4, Limit::Extrapolate).unwrap();
        assert!(w.values().iter().all(|&v| v == 0.0));

        let one = GridFunction::from_fn(&grid, |_, _| 1.0);
        let w = one.to_weighted(0.25, Limit::Value(0.0)).unwrap();
        assert_eq!(w.values()[0], 0.0);
        assert!(close(w.values()[1], std::f64::consts::FRAC_1_SQRT_2, 1e-15));
        assert_eq!(w.values()[2], 1.0);

        let gamma = 0.75;
        let grid = make_graded_grid(1.0, 3.0, 17, 2.0, 2.0).unwrap().into_shared();
        let singular = GridFunction::from_fn(&grid, |_, z| z.powf(gamma - 1.0));
        let w = singular.to_weighted(1.0 - gamma, Limit::Extrapolate).unwrap();
        for &v in w.values() {
            assert!(close(v, 1.0, 1e-14));
        }
    }

    #[test]
    fn representation_mismatch() {
        let grid = make_graded_grid(1.0, 2.0, 4, 1.0, 1.0).unwrap().into_shared();
        let g = GridFunction::from_fn(&grid, |t, _| t);
        assert!(matches!(g.from_weighted(), Err(Error::Representation { .. })));
        let w = g.to_weighted(0.5, Limit::Value(0.0)).unwrap();
        assert!(matches!(w.to_weighted(0.5, Limit::Value(0.0)), Err(Error::Representation { .. })));
        assert!(GridFunction::new(Arc::clone(&grid), vec![1.0; 3], Representation::Plain).is_err());
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let z = [0.0, 0.1, 0.3, 0.7];
        let v: Vec<f64> = z.iter().map(|&x| 2.0 - x + 3.0 * x * x).collect();
        assert!(close(extrapolate_to_origin(&z, &v).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn weighted_origin_semantics() {
        let grid = make_graded_grid(1.0, 2.0, 4, 1.0, 1.0).unwrap().into_shared();
        let w = GridFunction::weighted_from_fn(&grid, 0.3, |_, _| 2.0);
        assert_eq!(w.plain_value(0), f64::INFINITY);
        let w0 = GridFunction::weighted_from_fn(&grid, 0.0, |_, _| 2.0);
        assert_eq!(w0.plain_value(0), 2.0);
    }
}
