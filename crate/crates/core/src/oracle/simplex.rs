use crate::scalar::Real;

/// Euclidean projection onto `{x : x_i >= 0, sum x_i = 1}` by the sorted
/// threshold rule.
pub fn project_to_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - T::one()) / T::from_usize_lossy(j + 1);
        if uj - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_points_and_hand_cases() {
        assert_eq!(project_to_simplex(&[0.3f64, 0.7]), vec![0.3, 0.7]);
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.5f64, 0.5, 0.5]);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn projection_lands_on_simplex_and_is_closest(v in prop::collection::vec(-2.0f64..2.0, 1..7)) {
            let p = project_to_simplex(&v);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            // variational inequality: <v - p, q - p> <= 0 at every vertex q
            for k in 0..v.len() {
                let ip: f64 = (0..v.len())
                    .map(|i| (v[i] - p[i]) * (if i == k { 1.0 } else { 0.0 } - p[i]))
                    .sum();
                prop_assert!(ip <= 1e-12);
            }
        }
    }
}
