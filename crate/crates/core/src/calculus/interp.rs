//! Cubic Hermite tables for antiderivatives.
//!
//! The integrand machinery needs `F(s) = ∫₀^s F′`, the moment integral
//! `∫₀^s t F″(t) dt` and tail integrals `∫_s^∞ F″·g` at every gradient
//! evaluation. Recomputing them by adaptive quadrature per call is far too
//! slow inside the FEM assembly and the barrier sweeps, so each one is built
//! once on a dense geometric grid with the exact integrand as knot slope and
//! evaluated by cubic Hermite interpolation. Knot values come from
//! per-segment quadrature, so the table inherits quadrature accuracy while
//! the slopes keep derivative consistency exact at the knots.

use super::quad::{integrate_tail_scaled, integrate_with, QuadratureOptions};
use super::CalculusError;

/// Geometric grid from `lo` to `hi` inclusive with `per_decade` knots per
/// factor of ten.
pub fn geometric_knots(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && per_decade > 0);
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    let mut knots = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = i as f64 / n as f64;
        knots.push(lo * (hi / lo).powf(t));
    }
    knots[n] = hi;
    knots
}

/// Piecewise cubic Hermite interpolant with strictly increasing knots.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl CubicHermite {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && ys.len() == ds.len());
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        Self { xs, ys, ds }
    }

    /// Fritsch–Carlson slope limiting: caps each slope at three times the
    /// adjacent secants so monotone data yields a monotone interpolant.
    pub fn limit_slopes_monotone(&mut self) {
        let n = self.xs.len();
        for i in 0..n {
            let sec_l = if i > 0 {
                (self.ys[i] - self.ys[i - 1]) / (self.xs[i] - self.xs[i - 1])
            } else {
                f64::NAN
            };
            let sec_r = if i + 1 < n {
                (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
            } else {
                f64::NAN
            };
            let bound = 3.0
                * match (sec_l.is_nan(), sec_r.is_nan()) {
                    (true, false) => sec_r.abs(),
                    (false, true) => sec_l.abs(),
                    _ => sec_l.abs().min(sec_r.abs()),
                };
            if self.ds[i].abs() > bound {
                self.ds[i] = self.ds[i].signum() * bound;
            }
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    /// Value at `x`; linear extension with the end slope outside the domain.
    pub fn value(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.ds[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.ds[n - 1] * (x - self.xs[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    /// Derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ds[0];
        }
        if x >= self.xs[n - 1] {
            return self.ds[n - 1];
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.ys[i] + d10 * self.ds[i] + d01 * self.ys[i + 1] + d11 * self.ds[i + 1]
    }
}

/// PCHIP slopes for tabulated data (weighted harmonic mean of secants, zero
/// at local extrema).
pub fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 2);
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let sec: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    d[0] = sec[0];
    d[n - 1] = sec[n - 2];
    for i in 1..n - 1 {
        if sec[i - 1] * sec[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
        }
    }
    d
}

/// Monotone cubic interpolant of tabulated data (PCHIP slopes).
pub fn pchip_table(xs: &[f64], ys: &[f64]) -> CubicHermite {
    let ds = pchip_slopes(xs, ys);
    CubicHermite::new(xs.to_vec(), ys.to_vec(), ds)
}

/// Tabulated cumulative integral `x ↦ ∫_{x₀}^{x} f`, anchored at the first
/// knot with value zero.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    table: CubicHermite,
}

impl CumulativeTable {
    /// Builds the table over `knots` (strictly increasing). Knot slopes are
    /// `f(knot)` exactly, so derivative consistency between the table and the
    /// integrand holds at every knot.
    pub fn build<F: Fn(f64) -> f64>(f: F, knots: &[f64]) -> Result<Self, CalculusError> {
        let opts = QuadratureOptions {
            rel_tol: 1e-12,
            abs_floor: 1e-300,
            max_subdivisions: 200,
        };
        let mut ys = Vec::with_capacity(knots.len());
        let mut ds = Vec::with_capacity(knots.len());
        let mut acc = 0.0f64;
        ys.push(0.0);
        ds.push(f(knots[0]));
        for w in knots.windows(2) {
            let seg = match integrate_with(&f, w[0], w[1], &opts) {
                Ok(r) => r.value,
                Err(CalculusError::ToleranceNotMet { value, .. }) => value,
                Err(e) => return Err(e),
            };
            acc += seg;
            ys.push(acc);
            ds.push(f(w[1]));
        }
        let mut table = CubicHermite::new(knots.to_vec(), ys, ds);
        table.limit_slopes_monotone();
        Ok(Self { table })
    }

    pub fn value(&self, x: f64) -> f64 {
        let (lo, _) = self.table.domain();
        if x <= lo {
            return 0.0;
        }
        self.table.value(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.table.derivative(x)
    }

    pub fn total(&self) -> f64 {
        let (_, hi) = self.table.domain();
        self.table.value(hi)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.table.domain()
    }
}

/// Tabulated tail integral `x ↦ ∫_x^∞ f` for nonnegative `f` with a
/// convergent tail. Decreasing in `x`; beyond the last knot the tail is
/// extended by the power law fitted to the last decade.
#[derive(Debug, Clone)]
pub struct TailTable {
    table: CubicHermite,
    tail_exponent: f64,
}

impl TailTable {
    pub fn build<F: Fn(f64) -> f64>(f: F, knots: &[f64]) -> Result<Self, CalculusError> {
        let opts = QuadratureOptions {
            rel_tol: 1e-12,
            abs_floor: 1e-300,
            max_subdivisions: 400,
        };
        let n = knots.len();
        let last = knots[n - 1];
        let beyond = if last > 0.0 {
            integrate_tail_scaled(&f, last, &opts)?.value
        } else {
            return Err(CalculusError::InvalidInput(
                "tail table needs a positive last knot".into(),
            ));
        };
        let mut ys = vec![0.0; n];
        let mut ds = vec![0.0; n];
        ys[n - 1] = beyond;
        ds[n - 1] = -f(last);
        for i in (0..n - 1).rev() {
            let seg = match integrate_with(&f, knots[i], knots[i + 1], &opts) {
                Ok(r) => r.value,
                Err(CalculusError::ToleranceNotMet { value, .. }) => value,
                Err(e) => return Err(e),
            };
            ys[i] = ys[i + 1] + seg;
            ds[i] = -f(knots[i]);
        }
        // Local decay exponent over the last decade, for extension.
        let probe = knots
            .iter()
            .position(|&x| x >= last / 10.0)
            .unwrap_or(n - 2)
            .min(n - 2);
        let tail_exponent = if ys[probe] > 0.0 && ys[n - 1] > 0.0 && ys[probe] > ys[n - 1] {
            ((ys[n - 1] / ys[probe]).ln() / (last / knots[probe]).ln()).min(-0.1)
        } else {
            -1.0
        };
        let mut table = CubicHermite::new(knots.to_vec(), ys, ds);
        table.limit_slopes_monotone();
        Ok(Self {
            table,
            tail_exponent,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let (lo, hi) = self.table.domain();
        if x <= lo {
            return self.table.value(lo);
        }
        if x >= hi {
            let base = self.table.value(hi);
            return base * (x / hi).powf(self.tail_exponent);
        }
        self.table.value(x).max(0.0)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.table.domain();
        if x >= hi {
            let base = self.table.value(hi);
            return base * self.tail_exponent / hi * (x / hi).powf(self.tail_exponent - 1.0);
        }
        if x <= lo {
            return self.table.derivative(lo);
        }
        self.table.derivative(x)
    }

    /// Total mass `∫_{x₀}^∞ f`.
    pub fn total(&self) -> f64 {
        let (lo, _) = self.table.domain();
        self.table.value(lo)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.table.domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_matches_closed_form() {
        // ∫_0^s t/(1+t) dt = s - ln(1+s).
        let mut knots = vec![0.0];
        knots.extend(geometric_knots(1e-8, 1e6, 64));
        let table = CumulativeTable::build(|t| t / (1.0 + t), &knots).unwrap();
        for &s in &[1e-6f64, 0.37, 1.0, 12.0, 4.2e3, 9.9e5] {
            let exact = s - s.ln_1p();
            let got = table.value(s);
            assert!(
                (got - exact).abs() <= 1e-9 * (1.0 + exact.abs()),
                "s={s}: got {got}, exact {exact}"
            );
        }
    }

    #[test]
    fn tail_matches_closed_form() {
        // ∫_s^∞ (1+t)^-2 dt = 1/(1+s).
        let knots = geometric_knots(1e-8, 1e12, 160);
        let table = TailTable::build(|t| (1.0 + t).powi(-2), &knots).unwrap();
        for &s in &[1e-8, 0.5, 3.0, 1e4, 1e11] {
            let exact = 1.0 / (1.0 + s);
            let got = table.value(s);
            assert!(
                (got - exact).abs() <= 1e-8 * exact,
                "s={s}: got {got}, exact {exact}"
            );
        }
        // Power-law extension stays sane a little beyond the grid.
        let beyond = table.value(3e12);
        assert!(beyond > 0.0 && beyond < table.value(1e12));
    }

    #[test]
    fn derivative_consistency_at_and_between_knots() {
        let mut knots = vec![0.0];
        knots.extend(geometric_knots(1e-8, 1e8, 160));
        let f = |t: f64| t * (1.0 + t * t).powf(-1.5);
        let table = CumulativeTable::build(f, &knots).unwrap();
        for &s in &[1e-3, 0.72, 1.0, 55.0, 1e4] {
            // Exactly between knots is the worst case for slope error.
            let rel = (table.derivative(s) - f(s)).abs() / f(s).max(1e-300);
            assert!(rel < 1e-5, "s={s}: rel {rel}");
        }
    }

    #[test]
    fn pchip_keeps_monotone_data_monotone() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 2.0, 2.05, 3.0];
        let ds = pchip_slopes(&xs, &ys);
        let h = CubicHermite::new(xs, ys, ds);
        let mut prev = h.value(0.0);
        for i in 1..=400 {
            let x = 4.0 * i as f64 / 400.0;
            let v = h.value(x);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
