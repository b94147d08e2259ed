//! Radially symmetric solutions on the annulus `r_in < |x| < r_out`.
//!
//! Every radial solution has a first integral: `F′(U′(r))·r^{d-1}` is
//! constant, so profiles form a one-parameter family
//!
//! ```text
//! U(r; c) = ∫_{r_in}^{r} (F′)^{-1}( c (r_in/s)^{d-1} ) ds,   c ∈ (0,1),
//! ```
//!
//! parametrized here by the slope image `c = F′(U′(r_in))` at the inner
//! sphere. The attainable boundary gap `U(r_out; c)` is strictly increasing
//! in `c`; its supremum as `c → 1` is finite exactly when `∫ t F″(t) dt`
//! converges, which is the non-existence mechanism on annuli: gaps above the
//! threshold admit no solution at all. When the integral converges the
//! threshold also obeys the explicit bound `2^d/(d-1) · (1 + C₀/F′(1))`.

use thiserror::Error;

use crate::calculus::{
    classify_divergence, default_cutoffs, integrate, CalculusError, DivergenceOptions, Verdict,
};
use crate::integrand::{Integrand, IntegrandError};

/// Gap ceiling above which the family is declared divergent.
const GAP_CEILING: f64 = 1e6;
/// Ladder depth for the `c → 1` sweep (`c_k = 1 - 2^{-k}`).
const LADDER_DEPTH: u32 = 48;
/// Flux bracket used by [`RadialProblem::solve`].
const FLUX_LO: f64 = 1e-8;
const FLUX_HI: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Error)]
pub enum RadialError {
    #[error("invalid radial problem: {0}")]
    InvalidProblem(String),
    #[error("gap sweep found {observed} but the divergence criterion says {criterion:?}; numerical setup is inconsistent")]
    InconsistentWithCriterion {
        observed: &'static str,
        criterion: Verdict,
    },
    #[error("flux bracket exhausted: largest representable gap is {reached}")]
    FluxBracketExhausted { reached: f64 },
    #[error("the criterion integral diverges, the explicit gap bound is vacuous")]
    CriterionDiverges,
    #[error(transparent)]
    Integrand(#[from] IntegrandError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Dirichlet data `u = 0` on the inner sphere, `u = gap` on the outer one.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub integrand: Integrand,
    pub dim: u32,
    pub r_in: f64,
    pub r_out: f64,
    pub gap: f64,
}

/// Largest boundary gap attainable by the profile family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxGap {
    Finite(f64),
    Infinite,
}

impl MaxGap {
    pub fn is_finite(&self) -> bool {
        matches!(self, MaxGap::Finite(_))
    }

    pub fn value(&self) -> f64 {
        match self {
            MaxGap::Finite(v) => *v,
            MaxGap::Infinite => f64::INFINITY,
        }
    }
}

/// One profile of the radial family.
pub struct RadialProfile<'a> {
    problem: &'a RadialProblem,
    /// Slope image at the inner sphere, `F′(U′(r_in)) ∈ (0,1)`.
    pub flux: f64,
    /// Mirrored profiles solve negative gaps by symmetry.
    pub mirrored: bool,
}

/// Outcome of a solve for a prescribed gap.
#[derive(Debug, Clone)]
pub enum RadialOutcome {
    Attained(RadialSolution),
    Unattainable { max_gap: f64 },
}

#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub flux: f64,
    pub gap_attained: f64,
    pub max_gap: MaxGap,
    /// `C₀ = ∫₁^∞ t F″` when the criterion integral converges.
    pub tail_mass: Option<f64>,
    pub mirrored: bool,
    pub residual: f64,
}

impl RadialProblem {
    fn validate(&self) -> Result<(), RadialError> {
        if !(self.r_in > 0.0 && self.r_in < self.r_out) {
            return Err(RadialError::InvalidProblem(format!(
                "need 0 < r_in < r_out, got ({}, {})",
                self.r_in, self.r_out
            )));
        }
        if self.dim < 2 {
            return Err(RadialError::InvalidProblem(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// The profile with slope image `flux` at the inner sphere.
    pub fn profile(&self, flux: f64) -> RadialProfile<'_> {
        RadialProfile {
            problem: self,
            flux,
            mirrored: false,
        }
    }

    /// Divergence classification of `∫₁^∞ t F″(t) dt`.
    pub fn criterion(&self) -> Result<Verdict, RadialError> {
        let v = classify_divergence(
            |t| t * self.integrand.ddf(t),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )?;
        Ok(v.verdict)
    }

    /// `C₀ = ∫₁^∞ t F″(t) dt` by quadrature.
    pub fn tail_mass(&self) -> Result<f64, RadialError> {
        Ok(integrate(
            |t| t * self.integrand.ddf(t),
            1.0,
            f64::INFINITY,
            1e-11,
        )?
        .value)
    }

    /// Supremum of attainable gaps: sweeps `c_k = 1 - 2^{-k}`, declares
    /// divergence on the value ceiling or sustained increments, otherwise
    /// extrapolates the limit geometrically.
    pub fn max_gap(&self) -> Result<MaxGap, RadialError> {
        self.validate()?;
        let criterion = self.criterion()?;
        let mut values: Vec<f64> = Vec::with_capacity(LADDER_DEPTH as usize);
        let mut escaped = false;
        for k in 1..=LADDER_DEPTH {
            let c = 1.0 - 0.5f64.powi(k as i32);
            match self.profile(c).height(self.r_out) {
                Ok(v) => values.push(v),
                Err(RadialError::Integrand(IntegrandError::Calculus(
                    CalculusError::BracketInvalid { .. },
                ))) if k > 1 => {
                    // Slope inversion escaped its cap: the profile slopes are
                    // beyond representable range, only possible on a
                    // divergent family.
                    escaped = true;
                    break;
                }
                Err(e) => return Err(e),
            }
            if values[values.len() - 1] > GAP_CEILING {
                break;
            }
            // Converged ladder: two consecutive negligible increments.
            let n = values.len();
            if n >= 3 {
                let inc1 = values[n - 1] - values[n - 2];
                let inc2 = values[n - 2] - values[n - 3];
                if inc1 <= 1e-10 * (1.0 + values[n - 1]) && inc2 <= 1e-10 * (1.0 + values[n - 1]) {
                    break;
                }
            }
        }

        let n = values.len();
        let diverged = escaped
            || values[n - 1] > GAP_CEILING
            || (n >= 21 && {
                // Log-type divergence: the last block of increments carries
                // at least half the mass of the previous block.
                let recent: f64 = (n - 10..n).map(|i| values[i] - values[i - 1]).sum();
                let earlier: f64 = (n - 20..n - 10).map(|i| values[i] - values[i - 1]).sum();
                recent >= 0.5 * earlier && recent > 1e-8
            });

        if diverged {
            if criterion == Verdict::Converges {
                return Err(RadialError::InconsistentWithCriterion {
                    observed: "divergent gap sweep",
                    criterion,
                });
            }
            return Ok(MaxGap::Infinite);
        }

        // Geometric extrapolation of the remaining increments.
        let limit = if n >= 3 {
            let inc1 = values[n - 1] - values[n - 2];
            let inc2 = values[n - 2] - values[n - 3];
            if inc2 > 0.0 && inc1 > 0.0 && inc1 < inc2 {
                let rho = inc1 / inc2;
                values[n - 1] + inc1 * rho / (1.0 - rho)
            } else {
                values[n - 1]
            }
        } else {
            values[n - 1]
        };

        if criterion == Verdict::Diverges {
            return Err(RadialError::InconsistentWithCriterion {
                observed: "finite gap sweep",
                criterion,
            });
        }
        Ok(MaxGap::Finite(limit))
    }

    /// The `c → 1` ladder itself, for report emission.
    pub fn gap_sweep(&self) -> Result<Vec<(f64, f64)>, RadialError> {
        self.validate()?;
        let mut rows = Vec::new();
        for k in 1..=LADDER_DEPTH {
            let c = 1.0 - 0.5f64.powi(k as i32);
            match self.profile(c).height(self.r_out) {
                Ok(v) => rows.push((c, v)),
                Err(RadialError::Integrand(IntegrandError::Calculus(
                    CalculusError::BracketInvalid { .. },
                ))) => break,
                Err(e) => return Err(e),
            }
            if rows[rows.len() - 1].1 > GAP_CEILING {
                break;
            }
        }
        Ok(rows)
    }

    /// Solves for the flux attaining the prescribed gap, by bisection in the
    /// monotone map `c ↦ U(r_out; c)`. Negative gaps are solved mirrored.
    pub fn solve(&self, tol: f64) -> Result<RadialOutcome, RadialError> {
        self.validate()?;
        let mirrored = self.gap < 0.0;
        let target = self.gap.abs();
        let max_gap = self.max_gap()?;
        let tail_mass = match self.criterion()? {
            Verdict::Converges => Some(self.tail_mass()?),
            _ => None,
        };
        if let MaxGap::Finite(limit) = max_gap {
            if target >= limit {
                return Ok(RadialOutcome::Unattainable { max_gap: limit });
            }
        }

        let mut lo = FLUX_LO;
        let mut hi = FLUX_HI;
        let u_lo = self.profile(lo).height(self.r_out)?;
        if u_lo >= target {
            // Gap at or below the smallest representable profile.
            return Ok(self.finish(lo, u_lo, max_gap, tail_mass, mirrored));
        }
        let u_hi = self.profile(hi).height(self.r_out)?;
        if u_hi < target {
            return Err(RadialError::FluxBracketExhausted { reached: u_hi });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let u_mid = self.profile(mid).height(self.r_out)?;
            if (u_mid - target).abs() <= tol {
                return Ok(self.finish(mid, u_mid, max_gap, tail_mass, mirrored));
            }
            if u_mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON {
                return Ok(self.finish(mid, u_mid, max_gap, tail_mass, mirrored));
            }
        }
        let final_c = 0.5 * (lo + hi);
        let u = self.profile(final_c).height(self.r_out)?;
        Ok(self.finish(final_c, u, max_gap, tail_mass, mirrored))
    }

    fn finish(
        &self,
        flux: f64,
        attained: f64,
        max_gap: MaxGap,
        tail_mass: Option<f64>,
        mirrored: bool,
    ) -> RadialOutcome {
        let signed = if mirrored { -attained } else { attained };
        RadialOutcome::Attained(RadialSolution {
            flux,
            gap_attained: signed,
            max_gap,
            tail_mass,
            mirrored,
            residual: (attained - self.gap.abs()).abs(),
        })
    }

    /// Explicit a-priori bound `2^d/(d-1) · (1 + C₀/F′(1))` on the attainable
    /// gap. Derived for the normalized annulus `r_in = 1, r_out = 2`; the
    /// returned flag records whether this problem has that geometry.
    pub fn gap_upper_bound(&self) -> Result<GapBound, RadialError> {
        self.validate()?;
        if self.criterion()? == Verdict::Diverges {
            return Err(RadialError::CriterionDiverges);
        }
        let c0 = self.tail_mass()?;
        let d = self.dim as f64;
        let df1 = self.integrand.df(1.0);
        let value = 2f64.powf(d) / (d - 1.0) * (1.0 + c0 / df1);
        Ok(GapBound {
            value,
            tail_mass: c0,
            canonical_geometry: (self.r_in - 1.0).abs() < 1e-14 && (self.r_out - 2.0).abs() < 1e-14,
        })
    }
}

/// The explicit gap bound together with its ingredients.
#[derive(Debug, Clone, Copy)]
pub struct GapBound {
    pub value: f64,
    pub tail_mass: f64,
    /// True when the problem is the normalized annulus 1..2 the bound was
    /// derived for.
    pub canonical_geometry: bool,
}

impl RadialProfile<'_> {
    /// `U′(r) = (F′)^{-1}(c (r_in/r)^{d-1})`.
    pub fn slope(&self, r: f64) -> Result<f64, RadialError> {
        let p = self.problem;
        let y = self.flux * (p.r_in / r).powi(p.dim as i32 - 1);
        let s = p.integrand.inverse_df(y, 1e-13)?;
        Ok(if self.mirrored { -s } else { s })
    }

    /// `U(r) = ∫_{r_in}^r U′`, with `U(r_in) = 0` exactly. The substitution
    /// `s = r_in + u²` flattens the slope blow-up at the inner sphere when
    /// `c → 1`.
    pub fn height(&self, r: f64) -> Result<f64, RadialError> {
        let p = self.problem;
        if r <= p.r_in {
            return Ok(0.0);
        }
        // Validate invertibility at the worst point once, then integrate.
        let _ = p.integrand.inverse_df(self.flux, 1e-13)?;
        let int = &p.integrand;
        let dim = p.dim as i32 - 1;
        let r_in = p.r_in;
        let c = self.flux;
        let result = integrate(
            |u| {
                let s = r_in + u * u;
                let y = c * (r_in / s).powi(dim);
                match int.inverse_df(y, 1e-13) {
                    Ok(v) => 2.0 * u * v,
                    Err(_) => f64::NAN,
                }
            },
            0.0,
            (r - p.r_in).sqrt(),
            1e-9,
        )?;
        let v = result.value;
        Ok(if self.mirrored { -v } else { v })
    }
}
