//! Divergence classification for improper integrals `∫_lo^∞ f` with
//! nonnegative integrands.
//!
//! The integrand has no symbolic form here, so divergence is decided by
//! regressing the partial-integral increments against the cutoffs: if
//! `f ~ t^{-q}` then the increment over `[T_{k-1}, T_k]` scales like
//! `T_k^{1-q}` on a geometric cutoff ladder, and the fitted slope gives the
//! tail exponent. `q ≤ 1` diverges, `q > 1` converges; a margin around the
//! critical exponent guards the estimate.

use serde::{Deserialize, Serialize};

use super::quad::{integrate_with, QuadratureOptions};
use super::CalculusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

/// Classification outcome with the evidence that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceVerdict {
    pub verdict: Verdict,
    /// Estimated `q` in `f ~ t^{-q}`; infinite for integrands that vanish
    /// beyond the first cutoffs.
    pub tail_exponent_estimate: f64,
    /// `(cutoff T, ∫_lo^T f)` pairs, nondecreasing in `T` for `f ≥ 0`.
    pub partial_values: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct DivergenceOptions {
    /// Half-width of the indecision band around the critical exponent.
    pub margin: f64,
    pub rel_tol: f64,
    /// Increments below this (relative to the running total) count as
    /// vanished.
    pub increment_floor: f64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        Self {
            margin: 0.05,
            rel_tol: 1e-9,
            increment_floor: 1e-12,
        }
    }
}

/// Default cutoff ladder 10¹..10⁷ (six decades).
pub fn default_cutoffs() -> Vec<f64> {
    (1..=7).map(|k| 10f64.powi(k)).collect()
}

/// Classifies `∫_lo^∞ f` for `f ≥ 0` on `[lo, ∞)`. Cutoffs must be strictly
/// increasing, have at least 4 entries and span at least 6 decades.
pub fn classify_divergence<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    cutoffs: &[f64],
    opts: &DivergenceOptions,
) -> Result<DivergenceVerdict, CalculusError> {
    if cutoffs.len() < 4 {
        return Err(CalculusError::InvalidInput(
            "need at least 4 cutoffs".into(),
        ));
    }
    if !cutoffs.windows(2).all(|w| w[0] < w[1]) || cutoffs[0] <= lo {
        return Err(CalculusError::InvalidInput(
            "cutoffs must be strictly increasing and exceed the lower limit".into(),
        ));
    }
    let span = cutoffs[cutoffs.len() - 1] / cutoffs[0];
    if span < 0.999e6 {
        return Err(CalculusError::InvalidInput(
            "cutoffs must span at least six decades".into(),
        ));
    }

    let qopts = QuadratureOptions {
        rel_tol: opts.rel_tol,
        ..QuadratureOptions::default()
    };
    let mut partial_values = Vec::with_capacity(cutoffs.len());
    let mut increments = Vec::with_capacity(cutoffs.len());
    let mut acc = 0.0f64;
    let mut prev = lo;
    for &t in cutoffs {
        let seg = integrate_with(&f, prev, t, &qopts)?.value;
        acc += seg;
        partial_values.push((t, acc));
        increments.push(seg);
        prev = t;
    }

    let total = acc.abs().max(f64::MIN_POSITIVE);
    let floor = opts.increment_floor * (1.0 + total);

    // Regress ln(increment) on ln(cutoff) over the tail half of the ladder.
    let tail_from = cutoffs.len() / 2;
    let pts: Vec<(f64, f64)> = (tail_from..cutoffs.len())
        .filter(|&i| increments[i] > floor)
        .map(|i| (cutoffs[i].ln(), increments[i].ln()))
        .collect();

    if pts.len() < 2 {
        // Increments vanished: the integral has effectively converged.
        return Ok(DivergenceVerdict {
            verdict: Verdict::Converges,
            tail_exponent_estimate: f64::INFINITY,
            partial_values,
        });
    }

    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let q = 1.0 - slope;

    let last = increments.len() - 1;
    let decaying = increments[last] < increments[last - 1] && increments[last - 1] > floor
        || increments[last] <= floor;
    let vanished = increments[last] <= floor;

    let verdict = if q > 1.0 + opts.margin {
        if decaying || vanished {
            Verdict::Converges
        } else {
            Verdict::Inconclusive
        }
    } else if !vanished {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };

    Ok(DivergenceVerdict {
        verdict,
        tail_exponent_estimate: q,
        partial_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tddf(p: f64) -> impl Fn(f64) -> f64 {
        // t·F″ for the prototype family: t (1+t^p)^(-1-1/p).
        move |t: f64| t * (1.0 + t.powf(p)).powf(-1.0 - 1.0 / p)
    }

    #[test]
    fn prototype_p2_converges_with_exponent_two() {
        let v = classify_divergence(
            tddf(2.0),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Converges);
        assert!(
            (v.tail_exponent_estimate - 2.0).abs() < 0.1,
            "q = {}",
            v.tail_exponent_estimate
        );
    }

    #[test]
    fn prototype_p1_diverges_at_critical_exponent() {
        let v = classify_divergence(
            tddf(1.0),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Diverges);
        assert!(
            (v.tail_exponent_estimate - 1.0).abs() < 0.1,
            "q = {}",
            v.tail_exponent_estimate
        );
    }

    #[test]
    fn inverse_square_root_diverges() {
        let v = classify_divergence(
            |t: f64| t.powf(-0.5),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Diverges);
    }

    #[test]
    fn partials_are_nondecreasing() {
        let v = classify_divergence(
            tddf(1.5),
            1.0,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )
        .unwrap();
        for w in v.partial_values.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn rejects_short_ladders() {
        let r = classify_divergence(
            |_| 1.0,
            1.0,
            &[10.0, 100.0],
            &DivergenceOptions::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn rapidly_vanishing_integrand_converges() {
        let v = classify_divergence(
            |t: f64| (-t).exp(),
            0.5,
            &default_cutoffs(),
            &DivergenceOptions::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Converges);
    }
}
