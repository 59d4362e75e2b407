/// Pairwise (cascade) summation with a fixed split, so the rounding does not
/// depend on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and its standard error `s/√S`.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let s = values.len();
    if s == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / s as f64;
    if s == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (s - 1) as f64;
    (mean, (var / s as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(mean_and_stderr(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn beats_naive_summation() {
        let v = vec![0.1; 1_000_000];
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - 100_000.0).abs() < (naive - 100_000.0).abs());
    }

    proptest! {
        #[test]
        fn matches_exact_integer_sums(v in proptest::collection::vec(-1000i32..1000, 0..300)) {
            let f: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            prop_assert_eq!(pairwise_sum(&f), v.iter().map(|&x| x as i64).sum::<i64>() as f64);
        }
    }
}
