use proptest::prelude::*;
use wavetail::analysis::{fit_tail_exponent_of, local_power_index_of};

fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_recovers_pure_power(a in 1e-3f64..1e3, neg in any::<bool>(), p in 1.0f64..6.0) {
        let amp = if neg { -a } else { a };
        let t = log_times(50.0, 5000.0, 300);
        let psi: Vec<f64> = t.iter().map(|t| amp * t.powf(-p)).collect();
        let r = fit_tail_exponent_of(&t, &psi, (100.0, 2000.0)).unwrap();
        prop_assert!((r.exponent - p).abs() < 1e-9);
        prop_assert!(r.reliable);
    }

    #[test]
    fn local_index_tends_to_leading_power(p in 1.0f64..6.0, b in -5.0f64..5.0) {
        // ψ = t^{-p}(1 + b/t): index p + b/(t + b)
        let t = log_times(10.0, 1e5, 4000);
        let psi: Vec<f64> = t.iter().map(|t| t.powf(-p) * (1.0 + b / t)).collect();
        let early = local_power_index_of(&t, &psi, 100.0).unwrap();
        let late = local_power_index_of(&t, &psi, 5e4).unwrap();
        prop_assert!((late - p).abs() <= (early - p).abs() + 1e-9);
        prop_assert!((late - p - b / (5e4 + b)).abs() < 1e-6);
    }
}
