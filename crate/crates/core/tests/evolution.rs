use wavetail::analysis::{compare_series_of, series_hash};
use wavetail::evolution::{evolve_fdtd, evolve_spectral, evolve_spectral_with, CauchyData, Mode, Profile, SpectralParams};
use wavetail::potential::make_inverse_power;
use wavetail::spectral::SpectralContext;

fn short_band() -> SpectralParams {
    SpectralParams { lambda_max: Some(5.0), ..SpectralParams::default() }
}

fn gaussian(center: f64) -> Profile {
    Profile::Gaussian { center, sigma: 2.0, amplitude: 1.0 }
}

#[test]
fn reflected_data_give_reflected_solution() {
    // symmetric potential: ψ[g(·)](x) = ψ[g(-·)](-x)
    let ctx = SpectralContext::new(&make_inverse_power(3.0, 1.0, 1.0).unwrap()).unwrap();
    let times = [2.0, 5.0, 12.0];
    let a = evolve_spectral_with(&ctx, &CauchyData { f: Profile::Zero, g: gaussian(1.0) }, 2.0, &times, Mode::Sine, &short_band()).unwrap();
    let b = evolve_spectral_with(&ctx, &CauchyData { f: Profile::Zero, g: gaussian(-1.0) }, -2.0, &times, Mode::Sine, &short_band()).unwrap();
    for (x, y) in a.psi.iter().zip(&b.psi) {
        assert!((x - y).abs() < 1e-7 * x.abs().max(1e-3), "{x} vs {y}");
    }
}

#[test]
fn default_band_resolves_the_potential_and_matches_fdtd() {
    let model = make_inverse_power(3.0, 1.0, 1.0).unwrap();
    let data = CauchyData { f: gaussian(0.0), g: Profile::Zero };
    let times = [3.0, 6.0, 10.0];
    let sp = evolve_spectral(&SpectralContext::new(&model).unwrap(), &data, 1.0, &times, Mode::Cosine).unwrap();
    // the kernel's potential content outlasts the data's transform
    assert!(sp.diagnostics["lambda_max"] > 5.0);
    assert!(sp.diagnostics["tail_ratio"] <= 1e-4);
    let fd = evolve_fdtd(&model, &data, 1.0, 10.0, 0.005).unwrap();
    let cmp = compare_series_of(&sp.times, &sp.psi, &fd.times, &fd.psi).unwrap();
    assert!(cmp.max_relative < 1e-4, "{cmp:?}");
}

#[test]
fn runs_are_bitwise_reproducible_across_thread_counts() {
    let model = make_inverse_power(3.5, 1.0, 1.0).unwrap();
    let data = CauchyData { f: gaussian(0.0), g: gaussian(0.5) };
    let times = [1.0, 4.0, 9.0];
    let run = |n: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        pool.install(|| {
            let ctx = SpectralContext::new(&model).unwrap();
            let r = evolve_spectral_with(&ctx, &data, 0.5, &times, Mode::Full, &short_band()).unwrap();
            series_hash(&r.times, &r.psi)
        })
    };
    assert_eq!(run(2), run(3));
}
