use cndetect::approx::ApproxConfig;
use cndetect::detector::{detect, scan, DetectOptions};
use cndetect::series::SampleSeries;
use cndetect::synthetic::{add_noise, run_monte_carlo};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let cfg = ApproxConfig::for_order(2).with_supports(24, 24);
    let summary = run_monte_carlo::<f64>(1000, 0.05, 100, &cfg, 20240101).unwrap();
    println!("c1: elapsed {:?}", t0.elapsed());
    for k in &summary.knots {
        println!("  knot {:.1}: rate={:.4} mean={:+.3e} ci={:.2e} samples={}", k.location, k.detection_rate, k.mean_error, k.ci_half_width, k.samples);
    }

    let t0 = Instant::now();
    let n = 120usize;
    let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let opts = DetectOptions { sigma: None, confidence: 0.99, min_separation: None };
    let cfg7 = ApproxConfig::for_order(2);
    let mut clean_trials = 0;
    for seed in 0..200u64 {
        let y: Vec<f64> = x.iter().map(|&v| 1.0 - 2.0 * v + 3.0 * v * v).collect();
        let s = SampleSeries::new(x.clone(), y).unwrap();
        let noisy = add_noise(&s, 0.05, 77000 + seed);
        let rep = detect(&noisy, &cfg7, &opts).unwrap();
        if rep.knots.is_empty() { clean_trials += 1; }
    }
    println!("c7: elapsed {:?}, clean trials {}/200", t0.elapsed(), clean_trials);

    let y: Vec<f64> = x.iter().map(|&v| 1.0 - 2.0 * v + 3.0 * v * v).collect();
    let s = SampleSeries::new(x.clone(), y).unwrap();
    let profile = scan(&s, &ApproxConfig::for_order(2), Some(0.0)).unwrap();
    let max_dt = profile.iter().map(|p| p.delta_t.abs()).fold(0.0f64, f64::max);
    println!("noiseless max |dt| = {max_dt:.2e}");

    // find_knots example at paper density: 2 knots at 95% familywise
    let poly = cndetect::synthetic::make_paper_poly::<f64>();
    let clean = cndetect::synthetic::sample(&poly, 1000).unwrap();
    for seed in [7u64, 8, 9, 10, 11] {
        let noisy = add_noise(&clean, 0.05, seed);
        let cfg = ApproxConfig::for_order(2).with_supports(290, 290);
        let opts = DetectOptions { sigma: Some(0.05), confidence: 0.95, min_separation: Some(95) };
        let rep = detect(&noisy, &cfg, &opts).unwrap();
        let zs: Vec<String> = rep.knots.iter().map(|k| format!("({:.4}, z={:.2})", k.zeta, k.z_score)).collect();
        println!("paper-density seed {seed}: {} knots {}", rep.knots.len(), zs.join(" "));
    }
}
