//! Monotone function inversion: bracketed bisection refined by safeguarded
//! Newton steps when a derivative is available.

use super::CalculusError;

/// How to refine inside the bracket.
pub enum Inversion<'a> {
    /// Pure bisection.
    Bisection,
    /// Newton steps from the bracket midpoint, falling back to bisection
    /// whenever an iterate leaves the bracket or fails to reduce the residual.
    Newton(&'a dyn Fn(f64) -> f64),
}

/// Solves `f(x) = y` for strictly increasing `f` on `[lo, hi]`, returning `x`
/// with `|f(x) - y| ≤ tol`.
pub fn invert_monotone<F: Fn(f64) -> f64>(
    f: F,
    y: f64,
    bracket: (f64, f64),
    tol: f64,
    method: Inversion<'_>,
) -> Result<f64, CalculusError> {
    let (mut a, mut b) = bracket;
    if !(a < b) {
        return Err(CalculusError::InvalidInput(format!(
            "invalid bracket ({a}, {b})"
        )));
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if !(fa <= y && y <= fb) {
        return Err(CalculusError::BracketInvalid {
            y,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if (fa - y).abs() <= tol {
        // Still prefer the better endpoint.
        if (fb - y).abs() < (fa - y).abs() {
            return Ok(b);
        }
        return Ok(a);
    }
    if (fb - y).abs() <= tol {
        return Ok(b);
    }

    let mut x = 0.5 * (a + b);
    let mut fx = f(x);
    let mut best = (x, (fx - y).abs());
    for _ in 0..220 {
        if (fx - y).abs() <= tol {
            return Ok(x);
        }
        if (fx - y).abs() < best.1 {
            best = (x, (fx - y).abs());
        }
        if fx < y {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let mut next = f64::NAN;
        if let Inversion::Newton(df) = method {
            let d = df(x);
            if d > 0.0 && d.is_finite() {
                let cand = x - (fx - y) / d;
                if cand > a && cand < b {
                    next = cand;
                }
            }
        }
        if !next.is_finite() {
            next = 0.5 * (a + b);
        }
        if next <= a || next >= b || b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            // Bracket exhausted in f64; report the best point seen if it
            // meets the tolerance, otherwise the closest endpoint value.
            let (xb, rb) = best;
            if rb <= tol {
                return Ok(xb);
            }
            let (cand, res) = if (fa - y).abs() < (fb - y).abs() {
                (a, (fa - y).abs())
            } else {
                (b, (fb - y).abs())
            };
            if res <= rb {
                if res <= tol {
                    return Ok(cand);
                }
                return Err(CalculusError::ToleranceNotMet {
                    value: cand,
                    error: res,
                    target: tol,
                });
            }
            return Err(CalculusError::ToleranceNotMet {
                value: xb,
                error: rb,
                target: tol,
            });
        }
        x = next;
        fx = f(x);
    }
    Err(CalculusError::ToleranceNotMet {
        value: best.0,
        error: best.1,
        target: tol,
    })
}

/// Inverts a strictly increasing `f` without a caller-supplied bracket,
/// doubling the upper end from 1 until `f(hi) ≥ y` or `hi` exceeds 1e16.
pub fn invert_monotone_expanding<F: Fn(f64) -> f64>(
    f: F,
    y: f64,
    tol: f64,
) -> Result<f64, CalculusError> {
    let mut hi = 1.0f64;
    let mut f_hi = f(hi);
    while f_hi < y {
        hi *= 2.0;
        if hi > 1e16 {
            return Err(CalculusError::BracketInvalid {
                y,
                f_lo: f(0.0),
                f_hi,
            });
        }
        f_hi = f(hi);
    }
    invert_monotone(&f, y, (0.0, hi), tol, Inversion::Bisection)
}

/// Solves `f(x) = y` for strictly *decreasing* `f` by negation.
pub fn invert_decreasing<F: Fn(f64) -> f64>(
    f: F,
    y: f64,
    bracket: (f64, f64),
    tol: f64,
    derivative: Option<&dyn Fn(f64) -> f64>,
) -> Result<f64, CalculusError> {
    let g = |x: f64| -f(x);
    match derivative {
        Some(df) => {
            let dg = move |x: f64| -df(x);
            invert_monotone(g, -y, bracket, tol, Inversion::Newton(&dg))
        }
        None => invert_monotone(g, -y, bracket, tol, Inversion::Bisection),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn df_p2(s: f64) -> f64 {
        s / (1.0 + s * s).sqrt()
    }

    #[test]
    fn inverts_prototype_slope_map() {
        // F'(1) = 1/√2 for the p = 2 family.
        let y = 0.5f64.sqrt();
        let x = invert_monotone(df_p2, y, (0.0, 1e8), 1e-14, Inversion::Bisection).unwrap();
        assert!((x - 1.0).abs() < 1e-10, "x = {x}");
    }

    #[test]
    fn identity_is_fixed_point() {
        let x = invert_monotone(|t| t, 0.3, (0.0, 1.0), 1e-15, Inversion::Bisection).unwrap();
        assert!((x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn near_saturation_returns_large_root_or_fails() {
        // y extremely close to the asymptote: the preimage is ~7.07e7, well
        // inside the bracket, and must be found.
        let y = 1.0 - 1e-16;
        match invert_monotone(df_p2, y, (0.0, 1e8), 1e-18, Inversion::Bisection) {
            Ok(x) => assert!(x > 1e7, "x = {x}"),
            Err(CalculusError::BracketInvalid { .. })
            | Err(CalculusError::ToleranceNotMet { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn expanding_bracket_finds_moderate_roots() {
        let x = invert_monotone_expanding(df_p2, 0.9, 1e-13).unwrap();
        assert!((df_p2(x) - 0.9).abs() <= 1e-13);
    }

    #[test]
    fn expanding_bracket_rejects_out_of_range() {
        let r = invert_monotone_expanding(|t| t / (1.0 + t), 1.5, 1e-12);
        assert!(matches!(r, Err(CalculusError::BracketInvalid { .. })));
    }

    #[test]
    fn newton_refinement_round_trips() {
        let ddf = |s: f64| (1.0 + s * s).powf(-1.5);
        for k in 1..=100 {
            let y = 0.99 * k as f64 / 100.0;
            let x = invert_monotone(df_p2, y, (0.0, 1e10), 1e-13, Inversion::Newton(&ddf)).unwrap();
            assert!((df_p2(x) - y).abs() <= 1e-13, "y = {y}");
        }
    }

    #[test]
    fn random_monotone_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let f = |t: f64| t3_plus(t);
        fn t3_plus(t: f64) -> f64 {
            t * t * t + 0.5 * t
        }
        for _ in 0..100 {
            let x_true: f64 = rng.gen_range(0.0..50.0);
            let y = f(x_true);
            let tol = 1e-11 * (1.0 + y.abs());
            let x = invert_monotone(f, y, (0.0, 60.0), tol, Inversion::Bisection).unwrap();
            assert!((f(x) - y).abs() <= tol);
        }
    }
}
