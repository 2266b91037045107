//! One-dimensional minimization by golden-section search.

/// `(3 - sqrt 5) / 2`, the fraction of the bracket to each interior point.
const INV_PHI_SQ: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` on `[lo, hi]`, assuming it is unimodal there.
///
/// Stops once the bracket is narrower than `tol * (1 + |x|)` or after
/// `max_iter` shrinks. The bracket ends are never evaluated.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = a + INV_PHI_SQ * (b - a);
    let mut d = b - INV_PHI_SQ * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;

    while iterations < max_iter && (b - a) > tol * (1.0 + c.abs().max(d.abs())) {
        // NaN compares false and is treated as worse than any number.
        if fc <= fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = a + INV_PHI_SQ * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = b - INV_PHI_SQ * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }

    if fc <= fd || fd.is_nan() {
        Minimum {
            x: c,
            value: fc,
            iterations,
        }
    } else {
        Minimum {
            x: d,
            value: fd,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let m = golden_section(|x| (x - 2.5).powi(2) + 1.0, -10.0, 10.0, 1e-12, 500);
        assert!((m.x - 2.5).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finds_kink_and_accepts_reversed_bracket() {
        let m = golden_section(|x: f64| (x + 1.0).abs(), 3.0, -4.0, 1e-12, 500);
        assert!((m.x + 1.0).abs() < 1e-9);
    }

    #[test]
    fn monotone_function_goes_to_edge() {
        let m = golden_section(|x| x, 0.0, 1.0, 1e-10, 500);
        assert!(m.x < 1e-9);
    }

    #[test]
    fn respects_iteration_cap() {
        let m = golden_section(|x| x * x, -1.0, 1.0, 0.0, 7);
        assert_eq!(m.iterations, 7);
    }
}
