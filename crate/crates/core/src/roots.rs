//! Bracketed one-dimensional root finding and extremum refinement.

/// Outcome of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Newton's method kept inside a sign-change bracket.
///
/// `f` returns `(value, derivative)`. Whenever a Newton step leaves the
/// current bracket (or the derivative vanishes) a bisection step is taken
/// instead, so the iteration always converges for a continuous function with
/// `f(lo)` and `f(hi)` of opposite sign. Returns `None` if the bracket is
/// invalid or `max_iter` is exhausted.
pub fn safeguarded_newton<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Option<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    if f_lo == 0.0 {
        return Some(Root {
            x: lo,
            iterations: 0,
        });
    }
    let (f_hi, _) = f(hi);
    if f_hi == 0.0 {
        return Some(Root {
            x: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    // orient so that f(lo) < 0 < f(hi)
    if f_lo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }

    let mut x = if x0.is_finite() && x0 >= lo.min(hi) && x0 <= lo.max(hi) {
        x0
    } else {
        0.5 * (lo + hi)
    };
    for it in 1..=max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(Root { x, iterations: it });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (a, b) = (lo.min(hi), lo.max(hi));
        let next = if dfx != 0.0 && newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= tol || (b - a) <= tol {
            return Some(Root {
                x: next,
                iterations: it,
            });
        }
        x = next;
    }
    None
}

/// Plain bisection on a sign-change bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<Root>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(Root {
            x: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Some(Root {
            x: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_negative = f_lo < 0.0;
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Some(Root {
                x: mid,
                iterations: it,
            });
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(Root {
                x: mid,
                iterations: it,
            });
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
///
/// Returns `(argmax, max)`.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Indices of the discrete local maxima of a periodic sample sequence.
pub(crate) fn periodic_local_maxima(samples: &[f64]) -> Vec<usize> {
    let n = samples.len();
    (0..n)
        .filter(|&i| {
            let prev = samples[(i + n - 1) % n];
            let next = samples[(i + 1) % n];
            samples[i] >= prev && samples[i] >= next
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_cubic_root() {
        let r = safeguarded_newton(
            |x| (x * x * x - 2.0, 3.0 * x * x),
            0.0,
            2.0,
            1.0,
            1e-14,
            100,
        )
        .unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn newton_falls_back_to_bisection_on_flat_derivative() {
        // derivative reported as zero everywhere: pure bisection
        let r = safeguarded_newton(|x| (x - 0.3, 0.0), 0.0, 1.0, 0.5, 1e-13, 200).unwrap();
        assert!((r.x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn newton_rejects_bad_bracket() {
        assert!(
            safeguarded_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 0.0, 1e-12, 50).is_none()
        );
    }

    #[test]
    fn bisect_and_golden() {
        let r = bisect(|x| x.cos(), 0.0, 3.0, 1e-15, 200).unwrap();
        assert!((r.x - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        let (x, fx) = golden_max(|x| -(x - 0.25) * (x - 0.25) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.25).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn local_maxima_wrap_around() {
        let s = [3.0, 1.0, 0.0, 2.0, 1.0];
        assert_eq!(periodic_local_maxima(&s), vec![0, 3]);
    }
}
