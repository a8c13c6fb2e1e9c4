//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

/// Value, error estimate, and whether the estimate is down at the rounding
/// level of the samples, where bisecting cannot help.
fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64, bool) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let (f1, f2) = (f(centre - dx), f(centre + dx));
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    let error = ((k - g) * half).abs();
    (k * half, error, error <= 100.0 * f64::EPSILON * abs * half.abs())
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[lo, hi]`, bisecting the interval with the largest
/// error estimate until the total estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, opts: QuadOptions) -> Result<QuadResult> {
    if lo == hi {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let (value, error, floor) = kronrod(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    // Segments that cannot be improved keep their error here and leave the heap ordering.
    let mut frozen = 0.0;
    let push = |heap: &mut BinaryHeap<Segment>, frozen: &mut f64, seg: Segment, floor: bool| {
        if floor {
            *frozen += seg.error;
            heap.push(Segment { error: 0.0, ..seg });
        } else {
            heap.push(seg);
        }
    };
    push(&mut heap, &mut frozen, Segment { lo, hi, value, error }, floor);
    let mut total = value;
    let mut total_err = heap.peek().map_or(0.0, |s| s.error);
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if !total.is_finite() || heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: total, error: total_err + frozen });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval exhausted at floating-point resolution.
            total_err -= seg.error;
            push(&mut heap, &mut frozen, seg, true);
            continue;
        }
        let (v1, e1, f1) = kronrod(&f, seg.lo, mid);
        let (v2, e2, f2) = kronrod(&f, mid, seg.hi);
        total += v1 + v2 - seg.value;
        total_err += (if f1 { 0.0 } else { e1 }) + (if f2 { 0.0 } else { e2 }) - seg.error;
        push(&mut heap, &mut frozen, Segment { lo: seg.lo, hi: mid, value: v1, error: e1 }, f1);
        push(&mut heap, &mut frozen, Segment { lo: mid, hi: seg.hi, value: v2, error: e2 }, f2);
    }
    // Resum to shed the drift of the running totals.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum::<f64>() + frozen;
    Ok(QuadResult { value, error })
}

/// `∫_0^width s^e f(s) ds` for `e > -1` and smooth `f`. Negative `e` is
/// removed exactly by `s = width·u^{1/(1+e)}`.
pub fn integrate_power_weighted<F: Fn(f64) -> f64>(
    e: f64,
    width: f64,
    f: F,
    opts: QuadOptions,
) -> Result<QuadResult> {
    if !(e > -1.0) {
        return Err(Error::SingularWeight(-e));
    }
    if width == 0.0 {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    if e >= 0.0 {
        return integrate(|s| s.powf(e) * f(s), 0.0, width, opts);
    }
    let kappa = 1.0 / (1.0 + e);
    let scale = width.powf(1.0 + e) / (1.0 + e);
    let inner = integrate(|u| f(width * u.powf(kappa)), 0.0, 1.0, opts)?;
    Ok(QuadResult { value: scale * inner.value, error: scale * inner.error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn handles_sharp_exponential() {
        let r = integrate(|x| (-5000.0 * x).exp(), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0 / 5000.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_singularity() {
        let r = integrate_power_weighted(-0.5, 1.0, |_| 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate_power_weighted(-0.9, 2.0, |s| (-s).exp(), QuadOptions::default()).unwrap();
        // ∫_0^2 s^{-0.9} e^{-s} ds = γ(0.1, 2)
        let lower = statrs::function::gamma::gamma_li(0.1, 2.0);
        assert!((r.value - lower).abs() < 1e-9 * lower);
        assert!(integrate_power_weighted(-1.0, 1.0, |_| 1.0, QuadOptions::default()).is_err());
    }
}
