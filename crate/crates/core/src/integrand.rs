//! Linear-growth integrands `F` with their derivative pair `(F′, F″)` and
//! coefficient `a(s) = F′(s)/s`.
//!
//! Two constructions are supported:
//! - the prototype family with `a_p(s) = (1+s^p)^{-1/p}` (closed forms for
//!   all derivatives; `p = 2` is the minimal surface equation), and
//! - custom integrands specified through their second derivative, with
//!   `F′(s) = L - ∫_s^∞ F″` rescaled by `1/L` so that `F′(∞) = 1`.
//!
//! `F` itself is always recovered by cumulative quadrature of `F′` with
//! `F(0) = 0`, tabulated once on a dense geometric grid. All constructions
//! normalize so that `F(0) = 0` and `F′(s) → 1`, which is the scaling the
//! annulus thresholds and barrier selections assume.

use std::sync::Arc;

use thiserror::Error;

use crate::calculus::{
    classify_divergence, default_cutoffs, geometric_knots, integrate, invert_decreasing,
    invert_monotone, pchip_table, CalculusError, CumulativeTable, DivergenceOptions,
    DivergenceVerdict, Inversion, TailTable, Verdict,
};

/// Shared closure type for scalar maps on the gradient modulus axis.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const TABLE_MIN: f64 = 1e-8;
const TABLE_MAX: f64 = 1e18;
const TABLE_PER_DECADE: usize = 160;

/// Upper cap for bracket expansion when inverting `F′`.
pub const INVERSION_CAP: f64 = 1e16;

#[derive(Debug, Clone, Error)]
pub enum IntegrandError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("second derivative is not strictly positive on the sampling grid")]
    NotStrictlyConvex,
    #[error("second derivative has a divergent integral; the integrand is not of linear growth")]
    NotLinearGrowth,
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Clone)]
enum Repr {
    Prototype {
        p: f64,
    },
    Custom {
        ddf_raw: ScalarFn,
        /// 1 / ∫₀^∞ F″_raw, the normalization making F′(∞) = 1.
        scale: f64,
        /// ∫_s^∞ F″_raw on the table grid.
        tail: TailTable,
        /// ∫₀^{table_min} F″_raw.
        head: f64,
    },
}

/// A linear-growth integrand together with its derivatives and coefficient.
#[derive(Clone)]
pub struct Integrand {
    repr: Repr,
    f_table: CumulativeTable,
    label: String,
    normalized: bool,
}

impl std::fmt::Debug for Integrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Integrand")
            .field("label", &self.label)
            .field("normalized", &self.normalized)
            .finish()
    }
}

fn table_knots() -> Vec<f64> {
    let mut knots = vec![0.0];
    knots.extend(geometric_knots(TABLE_MIN, TABLE_MAX, TABLE_PER_DECADE));
    knots
}

impl Integrand {
    /// The prototype family member with `a(s) = (1+s^p)^{-1/p}`.
    pub fn prototype(p: f64) -> Result<Self, IntegrandError> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(IntegrandError::InvalidParameter(format!(
                "prototype exponent must be positive and finite, got {p}"
            )));
        }
        let df = move |s: f64| proto_df(p, s);
        let f_table = CumulativeTable::build(df, &table_knots())?;
        Ok(Self {
            repr: Repr::Prototype { p },
            f_table,
            label: format!("prototype(p={p})"),
            normalized: true,
        })
    }

    /// Builds an integrand from its second derivative. The slope is
    /// `F′(s) = L - ∫_s^∞ F″` with `L = ∫₀^∞ F″`, rescaled by `1/L` so the
    /// slope tends to 1 at infinity.
    pub fn from_ddf(label: &str, ddf_raw: ScalarFn) -> Result<Self, IntegrandError> {
        // Strict convexity on a coarse probe grid. Capped at 1e2 so thin
        // exponential tails are not rejected for underflowing to zero.
        for &s in geometric_knots(1e-6, 1e2, 6).iter().chain([0.0].iter()) {
            let v = ddf_raw(s);
            if !(v > 0.0) || !v.is_finite() {
                return Err(IntegrandError::NotStrictlyConvex);
            }
        }
        // Linear growth requires ∫₀^∞ F″ < ∞.
        let verdict = classify_divergence(
            |t| ddf_raw(t),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )?;
        if verdict.verdict == Verdict::Diverges {
            return Err(IntegrandError::NotLinearGrowth);
        }

        let grid = geometric_knots(TABLE_MIN, TABLE_MAX, TABLE_PER_DECADE);
        let tail = TailTable::build(|t| ddf_raw(t), &grid)?;
        let head = integrate(|t| ddf_raw(t), 0.0, TABLE_MIN, 1e-12)?.value;
        let total = head + tail.total();
        if !(total > 0.0) || !total.is_finite() {
            return Err(IntegrandError::NotLinearGrowth);
        }
        let scale = 1.0 / total;

        let tail_c = tail.clone();
        let ddf_c = ddf_raw.clone();
        let df = move |s: f64| custom_df(&ddf_c, &tail_c, head, scale, s);
        let f_table = CumulativeTable::build(df, &table_knots())?;
        Ok(Self {
            repr: Repr::Custom {
                ddf_raw,
                scale,
                tail,
                head,
            },
            f_table,
            label: label.to_string(),
            normalized: true,
        })
    }

    /// Builds an integrand from tabulated `(t, F″(t))` samples, interpolated
    /// by a monotone cubic; constant continuation below the first sample and
    /// power-law continuation beyond the last.
    pub fn from_tabulated_ddf(label: &str, points: &[(f64, f64)]) -> Result<Self, IntegrandError> {
        if points.len() < 4 {
            return Err(IntegrandError::InvalidParameter(
                "need at least 4 tabulated second-derivative samples".into(),
            ));
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(IntegrandError::InvalidParameter(
                "tabulated abscissae must be strictly increasing".into(),
            ));
        }
        if pts.iter().any(|&(t, v)| t < 0.0 || !(v > 0.0)) {
            return Err(IntegrandError::NotStrictlyConvex);
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let interp = pchip_table(&xs, &ys);
        let (first_t, first_v) = (xs[0], ys[0]);
        let n = xs.len();
        let (last_t, last_v) = (xs[n - 1], ys[n - 1]);
        // Decay exponent fitted to the last stretch of the table.
        let anchor = xs
            .iter()
            .position(|&x| x >= last_t / 10.0)
            .unwrap_or(n - 2)
            .min(n - 2);
        let decay = if ys[anchor] > last_v {
            ((last_v / ys[anchor]).ln() / (last_t / xs[anchor]).ln()).min(-1.01)
        } else {
            -2.0
        };
        let ddf = move |t: f64| -> f64 {
            if t <= first_t {
                first_v
            } else if t >= last_t {
                last_v * (t / last_t).powf(decay)
            } else {
                interp.value(t).max(1e-300)
            }
        };
        Self::from_ddf(label, Arc::new(ddf))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// `F(s)`, with `F(0) = 0`.
    pub fn f(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.f_table.value(s)
    }

    /// `F′(s)`.
    pub fn df(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Prototype { p } => proto_df(*p, s),
            Repr::Custom {
                ddf_raw,
                scale,
                tail,
                head,
            } => custom_df(ddf_raw, tail, *head, *scale, s),
        }
    }

    /// `1 - F′(s)`, computed without cancellation for large `s`.
    pub fn df_complement(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Prototype { p } => proto_df_complement(*p, s),
            Repr::Custom { scale, tail, .. } => {
                if s <= TABLE_MIN {
                    1.0 - self.df(s)
                } else {
                    tail.value(s) * *scale
                }
            }
        }
    }

    /// `F″(s)`.
    pub fn ddf(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Prototype { p } => proto_ddf(*p, s),
            Repr::Custom { ddf_raw, scale, .. } => ddf_raw(s.max(0.0)) * *scale,
        }
    }

    /// Coefficient `a(s) = F′(s)/s`, extended continuously by `a(0) = F″(0)`.
    pub fn a(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Prototype { p } => proto_a(*p, s),
            Repr::Custom { .. } => {
                if s <= 1e-10 {
                    self.ddf(0.0)
                } else {
                    self.df(s) / s
                }
            }
        }
    }

    /// `a′(s)`; closed form for prototypes, identity `(F″ - a)/s` otherwise.
    /// Meaningful for `s > 0`.
    pub fn da(&self, s: f64) -> f64 {
        match &self.repr {
            Repr::Prototype { p } => proto_da(*p, s),
            Repr::Custom { .. } => {
                if s <= 0.0 {
                    return 0.0;
                }
                (self.ddf(s) - self.a(s)) / s
            }
        }
    }

    /// Inverts `F′` at `y ∈ [0, 1)` with residual `|F′(x) - y| ≤ tol`.
    /// Expands the bracket upward from 1, capped at 1e16.
    pub fn inverse_df(&self, y: f64, tol: f64) -> Result<f64, IntegrandError> {
        if y < 0.0 {
            return Err(IntegrandError::InvalidParameter(format!(
                "slope target must be nonnegative, got {y}"
            )));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0f64;
        while self.df(hi) < y {
            hi *= 4.0;
            if hi > INVERSION_CAP {
                return Err(CalculusError::BracketInvalid {
                    y,
                    f_lo: 0.0,
                    f_hi: self.df(INVERSION_CAP),
                }
                .into());
            }
        }
        self.inverse_df_bracketed(y, (0.0, hi), tol)
    }

    /// Inverts `F′` inside an explicit bracket. For `y` near 1 the problem is
    /// re-posed on the complement `1 - F′`, which stays well conditioned.
    pub fn inverse_df_bracketed(
        &self,
        y: f64,
        bracket: (f64, f64),
        tol: f64,
    ) -> Result<f64, IntegrandError> {
        if y > 0.5 {
            let h = 1.0 - y;
            let dd = |s: f64| -self.ddf(s);
            let x = invert_decreasing(|s| self.df_complement(s), h, bracket, tol, Some(&dd))?;
            return Ok(x);
        }
        let dd = |s: f64| self.ddf(s);
        let x = invert_monotone(|s| self.df(s), y, bracket, tol, Inversion::Newton(&dd))?;
        Ok(x)
    }

    /// Solves `1 - F′(x) = h` for small `h` (slope saturation scale).
    pub fn inverse_df_complement(&self, h: f64, tol: f64) -> Result<f64, IntegrandError> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(IntegrandError::InvalidParameter(format!(
                "complement target must lie in (0, 1], got {h}"
            )));
        }
        let floor = self.df_complement(TABLE_MAX);
        if h < floor {
            return Err(CalculusError::BracketInvalid {
                y: h,
                f_lo: floor,
                f_hi: 1.0,
            }
            .into());
        }
        let dd = |s: f64| -self.ddf(s);
        let x = invert_decreasing(
            |s| self.df_complement(s),
            h,
            (0.0, TABLE_MAX),
            tol,
            Some(&dd),
        )?;
        Ok(x)
    }

    /// Legendre–Fenchel conjugate `F*(y) = y x - F(x)` at `x = (F′)^{-1}(y)`.
    pub fn conjugate(&self, y: f64) -> Result<f64, IntegrandError> {
        let x = self.inverse_df(y, 1e-12)?;
        Ok(y * x - self.f(x))
    }
}

// ---- prototype closed forms, stable across the whole axis ----

fn proto_df(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s <= 1.0 {
        s * (1.0 + s.powf(p)).powf(-1.0 / p)
    } else {
        // s (1+s^p)^(-1/p) = (1 + s^-p)^(-1/p), immune to overflow.
        (1.0 + s.powf(-p)).powf(-1.0 / p)
    }
}

fn proto_df_complement(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s <= 1.0 {
        1.0 - proto_df(p, s)
    } else {
        // 1 - (1+s^-p)^(-1/p) = -expm1(-ln1p(s^-p)/p).
        (-(s.powf(-p)).ln_1p() / p).exp_m1().abs()
    }
}

fn proto_ddf(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s <= 1.0 {
        (1.0 + s.powf(p)).powf(-1.0 - 1.0 / p)
    } else {
        // (1+s^p)^(-1-1/p) = s^(-p-1) (1+s^-p)^(-1-1/p).
        s.powf(-p - 1.0) * (1.0 + s.powf(-p)).powf(-1.0 - 1.0 / p)
    }
}

fn proto_a(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s <= 1.0 {
        (1.0 + s.powf(p)).powf(-1.0 / p)
    } else {
        (1.0 + s.powf(-p)).powf(-1.0 / p) / s
    }
}

fn proto_da(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return if p > 1.0 {
            0.0
        } else if p == 1.0 {
            -1.0
        } else {
            f64::NEG_INFINITY
        };
    }
    if s <= 1.0 {
        -s.powf(p - 1.0) * (1.0 + s.powf(p)).powf(-1.0 - 1.0 / p)
    } else {
        -(1.0 + s.powf(-p)).powf(-1.0 - 1.0 / p) / (s * s)
    }
}

fn custom_df(ddf_raw: &ScalarFn, tail: &TailTable, head: f64, scale: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s < TABLE_MIN {
        // Midpoint rule on [0, s]; error O(s³) is invisible at this scale.
        return (s * ddf_raw(0.5 * s)).min(head) * scale;
    }
    let c = tail.value(s) * scale;
    (1.0 - c).max(0.0)
}

// ---------------------------------------------------------------------------
// Hypothesis checking
// ---------------------------------------------------------------------------

/// Witnesses and residuals for the structural hypotheses on an integrand.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HypothesisReport {
    /// `C₁ s - C₂ ≤ F(s) ≤ C₂(1+s)` holds on the grid with the witnesses below.
    pub linear_growth: bool,
    pub growth_slope: f64,
    pub growth_offset: f64,
    /// `F″(s)/F″(t) ≤ C` for `s ≥ 1`, `t ∈ [s/2, 2s]`, verified on the grid.
    pub oscillation_bounded: bool,
    pub oscillation_constant: f64,
    /// Divergence classification of `∫₁^∞ t F″(t) dt`.
    pub solvability_criterion: DivergenceVerdict,
    /// `|F′ - 1| ≤ 1e-3` at the far end of the grid.
    pub normalized_limit: bool,
    /// sup of `s·F″(s)` over the far grid (tends to 0 for admissible F).
    pub tail_flatness_residual: f64,
    /// sup of `|s²·a′(s) + 1|` over the far grid (tends to 0).
    pub tail_coefficient_residual: f64,
    /// Fitted growth exponent of the principal-part ratio (d = 2 convention).
    pub bernstein_genre: f64,
    /// Sufficient integral test `∫ F″/(F″ + a) dt = ∞` (d = 2 convention).
    pub regularly_elliptic: bool,
}

/// Oscillation witness: max of `F″(s)/F″(t)` over the grid `s ≥ 1`,
/// `t ∈ [s/2, 2s]`.
pub fn oscillation_constant(integrand: &Integrand, far_grid_max: f64) -> f64 {
    let mut worst = 1.0f64;
    for &s in geometric_knots(1.0, far_grid_max, 12).iter() {
        let num = integrand.ddf(s);
        for &t in geometric_knots(0.5 * s, 2.0 * s, 12).iter() {
            let den = integrand.ddf(t);
            if den > 0.0 {
                worst = worst.max(num / den);
            }
        }
    }
    worst
}

/// Evaluates every structural hypothesis on a geometric sampling grid up to
/// `far_grid_max` (default 1e8 via [`Integrand::check_hypotheses`]).
pub fn check_hypotheses(
    integrand: &Integrand,
    far_grid_max: f64,
) -> Result<HypothesisReport, IntegrandError> {
    let grid = geometric_knots(1e-6, far_grid_max, 29); // ~400 points
    let far = geometric_knots(far_grid_max / 10.0, far_grid_max, 32);

    // Growth witnesses: C₁ from the far-grid slope floor, C₂ as the smallest
    // offset validating both growth inequalities on the full grid.
    let growth_slope = far
        .iter()
        .map(|&s| integrand.df(s))
        .fold(f64::INFINITY, f64::min);
    let mut growth_offset = 1e-6f64;
    for &s in &grid {
        let f = integrand.f(s);
        growth_offset = growth_offset.max(growth_slope * s - f).max(f / (1.0 + s));
    }
    let linear_growth = growth_slope > 0.0 && growth_offset.is_finite();

    let oscillation = oscillation_constant(integrand, far_grid_max);
    let oscillation_bounded = oscillation.is_finite();

    let criterion = classify_divergence(
        |t| t * integrand.ddf(t),
        1.0,
        &default_cutoffs(),
        &DivergenceOptions::default(),
    )?;

    let normalized_limit = (integrand.df(far_grid_max) - 1.0).abs() <= 1e-3;

    let tail_flatness_residual = far
        .iter()
        .map(|&s| s * integrand.ddf(s))
        .fold(0.0f64, f64::max);
    let tail_coefficient_residual = far
        .iter()
        .map(|&s| (s * s * integrand.da(s) + 1.0).abs())
        .fold(0.0f64, f64::max);

    // Bernstein genre: the principal-part ratio s³F″/(sF″ + (d-1)F′) grows
    // like s^(2-g); regression of its log against log s on the far decades.
    let genre_grid = geometric_knots(far_grid_max / 1e4, far_grid_max, 16);
    let pts: Vec<(f64, f64)> = genre_grid
        .iter()
        .map(|&s| {
            let ratio = s.powi(3) * integrand.ddf(s) / (s * integrand.ddf(s) + integrand.df(s));
            (s.ln(), ratio.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let bernstein_genre = 2.0 - slope;

    // Regular ellipticity via the sufficient test ∫ F″/(a′t + d·a) dt = ∞;
    // with a′t + a = F″ the denominator is F″ + (d-1)a, planar convention.
    let re = classify_divergence(
        |t| {
            let dd = integrand.ddf(t);
            dd / (dd + integrand.a(t))
        },
        1.0,
        &default_cutoffs(),
        &DivergenceOptions::default(),
    )?;
    let regularly_elliptic = re.verdict == Verdict::Diverges;

    Ok(HypothesisReport {
        linear_growth,
        growth_slope,
        growth_offset,
        oscillation_bounded,
        oscillation_constant: oscillation,
        solvability_criterion: criterion,
        normalized_limit,
        tail_flatness_residual,
        tail_coefficient_residual,
        bernstein_genre,
        regularly_elliptic,
    })
}

impl Integrand {
    /// [`check_hypotheses`] with the default far grid extent 1e8.
    pub fn check_hypotheses(&self) -> Result<HypothesisReport, IntegrandError> {
        check_hypotheses(self, 1e8)
    }
}

// ---------------------------------------------------------------------------
// Conjugate blow-up test
// ---------------------------------------------------------------------------

/// One evaluation of the conjugate near the edge of its domain.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConjugatePoint {
    pub y: f64,
    pub value: f64,
    /// Set when the inversion hit the bracket cap; `value` is then a lower
    /// bound.
    pub saturated: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConjugateReport {
    pub points: Vec<ConjugatePoint>,
    pub threshold: f64,
    /// The conjugate exceeds the threshold (or saturates the inversion
    /// bracket) as `y → 1` — equivalent to the solvability criterion.
    pub blow_up: bool,
}

/// Evaluates `F*(y) = sup_s (sy - F(s))` along `y_grid` (values in `(0,1)`,
/// approaching 1) and reports whether it explodes.
pub fn conjugate_blowup_test(
    integrand: &Integrand,
    y_grid: &[f64],
    threshold: f64,
) -> Result<ConjugateReport, IntegrandError> {
    let mut points = Vec::with_capacity(y_grid.len());
    let mut blow_up = false;
    for &y in y_grid {
        if !(y > 0.0 && y < 1.0) {
            return Err(IntegrandError::InvalidParameter(format!(
                "conjugate grid values must lie in (0,1), got {y}"
            )));
        }
        match integrand.inverse_df(y, 1e-12) {
            Ok(x) => {
                let value = y * x - integrand.f(x);
                if value > threshold {
                    blow_up = true;
                }
                points.push(ConjugatePoint {
                    y,
                    value,
                    saturated: false,
                });
            }
            Err(IntegrandError::Calculus(CalculusError::BracketInvalid { .. })) => {
                // The support point escaped the bracket cap: the envelope
                // value at the cap is already a lower bound.
                let x = INVERSION_CAP;
                let value = y * x - integrand.f(x);
                blow_up = true;
                points.push(ConjugatePoint {
                    y,
                    value,
                    saturated: true,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ConjugateReport {
        points,
        threshold,
        blow_up,
    })
}

/// Default grid `1 - 10^{-k}`, k = 1..10.
pub fn default_conjugate_grid() -> Vec<f64> {
    (1..=10).map(|k| 1.0 - 10f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prototype_rejects_bad_exponent() {
        assert!(Integrand::prototype(0.0).is_err());
        assert!(Integrand::prototype(-1.0).is_err());
    }

    #[test]
    fn prototype_p2_closed_values() {
        let i = Integrand::prototype(2.0).unwrap();
        let r2 = 0.5f64.sqrt();
        assert!((i.a(1.0) - r2).abs() < 1e-15);
        assert!((i.df(1.0) - r2).abs() < 1e-15);
        assert!((i.ddf(1.0) - 2f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn df_vanishes_at_origin() {
        for p in [0.5, 1.0, 2.0, 3.0] {
            let i = Integrand::prototype(p).unwrap();
            assert!(i.df(1e-8) <= 1e-4);
            assert!(i.df(1e-8) > 0.0);
        }
    }

    #[test]
    fn slopes_stay_inside_unit_band() {
        // Beyond s ~ 1e7 the complement 1 - F′ sinks below machine epsilon
        // for the faster families and F′ rounds to exactly 1, so the strict
        // band is only checkable where f64 resolves it.
        for p in [0.5, 1.0, 1.5, 2.0] {
            let i = Integrand::prototype(p).unwrap();
            for &s in geometric_knots(1e-6, 1e6, 8).iter() {
                let v = i.df(s);
                assert!(v > 0.0 && v < 1.0, "p={p}, s={s}, df={v}");
            }
            for &s in geometric_knots(1e6, 1e12, 4).iter() {
                assert!(i.df(s) <= 1.0 && i.df_complement(s) > 0.0, "p={p}, s={s}");
            }
        }
    }

    #[test]
    fn df_strictly_increasing_on_grid() {
        for p in [0.5, 1.25, 2.0] {
            let i = Integrand::prototype(p).unwrap();
            let grid = geometric_knots(1e-6, 1e6, 16);
            for w in grid.windows(2) {
                assert!(i.df(w[1]) > i.df(w[0]), "p={p} at {:?}", w);
            }
            // Saturation zone: nondecreasing, and the complement still
            // strictly decreases where f64 cannot separate the slopes.
            let far = geometric_knots(1e6, 1e12, 8);
            for w in far.windows(2) {
                assert!(i.df(w[1]) >= i.df(w[0]));
                assert!(i.df_complement(w[1]) < i.df_complement(w[0]));
            }
        }
    }

    #[test]
    fn derivative_identities_hold() {
        // a(s)·s = F′(s) and a′(s)·s + a(s) = F″(s), everywhere sampled.
        for p in [0.5, 1.0, 2.0, 3.0] {
            let i = Integrand::prototype(p).unwrap();
            for &s in geometric_knots(1e-3, 1e8, 10).iter() {
                assert!((i.df(s) - i.a(s) * s).abs() <= 1e-12 * (1.0 + i.df(s)));
                let lhs = i.da(s) * s + i.a(s);
                assert!(
                    (lhs - i.ddf(s)).abs() <= 1e-8 * (1.0 + i.ddf(s).abs()),
                    "p={p}, s={s}: {lhs} vs {}",
                    i.ddf(s)
                );
            }
        }
    }

    #[test]
    fn finite_differences_reproduce_derivatives() {
        for p in [0.5, 1.0, 2.0] {
            let i = Integrand::prototype(p).unwrap();
            for &s in geometric_knots(1e-2, 1e3, 4).iter() {
                let h = 1e-4 * s;
                let fd_df = (i.f(s + h) - i.f(s - h)) / (2.0 * h);
                assert!(
                    (fd_df - i.df(s)).abs() <= 1e-5 * i.df(s),
                    "p={p}, s={s}: F' fd {fd_df} vs {}",
                    i.df(s)
                );
                let fd_ddf = (i.df(s + h) - i.df(s - h)) / (2.0 * h);
                assert!(
                    (fd_ddf - i.ddf(s)).abs() <= 1e-5 * i.ddf(s),
                    "p={p}, s={s}: F'' fd {fd_ddf} vs {}",
                    i.ddf(s)
                );
            }
        }
    }

    #[test]
    fn normalization_limits() {
        // Slow families approach the unit slope like s^{-p}; the 1e-3 band
        // is reached by 1e6 for p ≥ 0.75 and by 1e8 for p = 0.5.
        for p in [0.75, 1.0, 1.25, 1.5, 2.0, 3.0] {
            let i = Integrand::prototype(p).unwrap();
            assert!((i.df(1e6) - 1.0).abs() <= 1e-3, "p={p}");
        }
        let i = Integrand::prototype(0.5).unwrap();
        assert!((i.df(1e8) - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn custom_recovers_p2_prototype() {
        let i =
            Integrand::from_ddf("p2-from-ddf", Arc::new(|t: f64| (1.0 + t * t).powf(-1.5)))
                .unwrap();
        assert!((i.df(1.0) - 0.5f64.sqrt()).abs() < 1e-8);
        let p2 = Integrand::prototype(2.0).unwrap();
        for &s in &[0.1, 1.0, 10.0, 1e4] {
            assert!((i.df(s) - p2.df(s)).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn custom_exponential_tail() {
        let i = Integrand::from_ddf("exp", Arc::new(|t: f64| (-t).exp())).unwrap();
        for &s in &[0.3f64, 1.0, 4.0, 20.0] {
            let exact = 1.0 - (-s).exp();
            assert!((i.df(s) - exact).abs() < 1e-8, "s={s}: {}", i.df(s));
        }
    }

    #[test]
    fn degenerate_ddf_is_rejected() {
        let r = Integrand::from_ddf("zero", Arc::new(|_| 0.0));
        assert!(matches!(r, Err(IntegrandError::NotStrictlyConvex)));
    }

    #[test]
    fn fat_tailed_ddf_is_rejected() {
        // ∫ t^{-1/2} diverges: not of linear growth.
        let r = Integrand::from_ddf("fat", Arc::new(|t: f64| (1.0 + t).powf(-0.5)));
        assert!(matches!(r, Err(IntegrandError::NotLinearGrowth)));
    }

    #[test]
    fn criterion_splits_the_family_at_one() {
        for p in [0.5, 0.75, 1.0] {
            let i = Integrand::prototype(p).unwrap();
            let rep = i.check_hypotheses().unwrap();
            assert_eq!(
                rep.solvability_criterion.verdict,
                Verdict::Diverges,
                "p={p}"
            );
            assert!((rep.solvability_criterion.tail_exponent_estimate - p).abs() <= 0.1);
        }
        for p in [1.25, 1.5, 2.0, 3.0] {
            let i = Integrand::prototype(p).unwrap();
            let rep = i.check_hypotheses().unwrap();
            assert_eq!(
                rep.solvability_criterion.verdict,
                Verdict::Converges,
                "p={p}"
            );
            assert!((rep.solvability_criterion.tail_exponent_estimate - p).abs() <= 0.1);
        }
    }

    #[test]
    fn p2_report_details() {
        let i = Integrand::prototype(2.0).unwrap();
        let rep = i.check_hypotheses().unwrap();
        assert!(rep.linear_growth);
        assert!(rep.oscillation_bounded);
        assert!(rep.oscillation_constant <= 8.5);
        assert!(
            (rep.bernstein_genre - 2.0).abs() < 0.1,
            "genre {}",
            rep.bernstein_genre
        );
        assert!(!rep.regularly_elliptic);
        assert!(rep.tail_coefficient_residual <= 1e-6);
        assert!(rep.normalized_limit);
        // First growth inequality through the report's own witnesses:
        // F(s) ≤ s·F′(s) + C₂ across the grid.
        for &s in geometric_knots(1e-6, 1e8, 8).iter() {
            assert!(i.f(s) <= s * i.df(s) + rep.growth_offset + 1e-9);
        }
    }

    #[test]
    fn p1_is_regularly_elliptic() {
        let i = Integrand::prototype(1.0).unwrap();
        let rep = i.check_hypotheses().unwrap();
        assert!(rep.regularly_elliptic);
        assert!((rep.bernstein_genre - 1.0).abs() < 0.1);
    }

    #[test]
    fn conjugate_blows_up_only_in_divergent_regime() {
        let grid = default_conjugate_grid();
        let p1 = Integrand::prototype(1.0).unwrap();
        let rep1 = conjugate_blowup_test(&p1, &grid, 20.0).unwrap();
        assert!(rep1.blow_up);
        // Spot value: F*(1-1e-6) = ln(1e6) - 1 + o(1) for p = 1.
        let near = rep1
            .points
            .iter()
            .find(|p| (p.y - (1.0 - 1e-6)).abs() < 1e-12)
            .unwrap();
        assert!(near.value > 10.0);

        let p2 = Integrand::prototype(2.0).unwrap();
        let rep2 = conjugate_blowup_test(&p2, &grid, 20.0).unwrap();
        assert!(!rep2.blow_up);
        // p = 2 conjugate is bounded: F*(y) = 1 - √(1-y²) ≤ 1.
        for pt in &rep2.points {
            assert!(pt.value <= 1.0 + 1e-6);
        }

        let p05 = Integrand::prototype(0.5).unwrap();
        let rep05 = conjugate_blowup_test(&p05, &grid, 20.0).unwrap();
        assert!(rep05.blow_up);
    }

    #[test]
    fn conjugate_envelope_touch_point() {
        // y = F′(1) ⇒ F*(y) = y - F(1).
        let i = Integrand::prototype(2.0).unwrap();
        let y = i.df(1.0);
        let v = i.conjugate(y).unwrap();
        assert!((v - (y - i.f(1.0))).abs() < 1e-9);
    }

    #[test]
    fn conjugate_matches_inverse_slope_quadrature() {
        // F*(y) - F*(F′(1)) = ∫_{F′(1)}^{y} (F′)^{-1}(z) dz.
        let i = Integrand::prototype(2.0).unwrap();
        let y = 0.9;
        let lhs = i.conjugate(y).unwrap() - i.conjugate(i.df(1.0)).unwrap();
        let rhs = integrate(
            |z| z / (1.0 - z * z).sqrt(), // closed-form inverse for p = 2
            i.df(1.0),
            y,
            1e-11,
        )
        .unwrap()
        .value;
        assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
    }
}
