use crate::error::{Error, Result};
use crate::scalar::Real;

fn sorted_desc<T: Real>(v: &[T]) -> Vec<T> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    s
}

/// Smallest value of `prefix_a(k) - prefix_b(k)` over all prefixes of the
/// descending-sorted vectors. Non-negative (up to `tol`) iff `a ≻ b`.
pub fn majorization_margin<T: Real>(a: &[T], b: &[T], sum_tol: T) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (sa, sb) = (sorted_desc(a), sorted_desc(b));
    let total_a: T = sa.iter().copied().sum();
    let total_b: T = sb.iter().copied().sum();
    if (total_a - total_b).abs() > sum_tol {
        return Err(Error::SumMismatch {
            difference: (total_a - total_b).to_f64_lossy(),
        });
    }
    let (mut pa, mut pb) = (T::zero(), T::zero());
    let mut margin = T::infinity();
    for (x, y) in sa.iter().zip(&sb) {
        pa += *x;
        pb += *y;
        margin = margin.min(pa - pb);
    }
    Ok(if a.is_empty() { T::zero() } else { margin })
}

/// `a ≻ b`: every prefix sum of sorted-descending `a` dominates that of `b`.
/// Comparisons allow `sum_tol` of slack.
pub fn majorizes<T: Real>(a: &[T], b: &[T], sum_tol: T) -> Result<bool> {
    Ok(majorization_margin(a, b, sum_tol)? >= -sum_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THIRD: f64 = 1.0 / 3.0;

    #[test]
    fn pure_majorizes_flat() {
        assert!(majorizes(&[1.0, 0.0, 0.0], &[THIRD, THIRD, THIRD], 1e-9).unwrap());
        assert!(!majorizes(&[THIRD, THIRD, THIRD], &[1.0, 0.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn order_does_not_matter() {
        assert!(majorizes(&[0.0, 0.7, 0.3], &[0.4, 0.2, 0.4], 1e-9).unwrap());
    }

    #[test]
    fn equality_majorizes_both_ways() {
        let v = [0.5, 0.3, 0.2];
        assert!(majorizes(&v, &v, 1e-9).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            majorizes(&[1.0], &[0.5, 0.5], 1e-9),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            majorizes(&[1.0, 0.0], &[0.5, 0.4], 1e-9),
            Err(Error::SumMismatch { .. })
        ));
    }
}
