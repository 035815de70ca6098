use cndetect::approx::ApproxConfig;
use cndetect::detector::{detect, DetectOptions};
use cndetect::synthetic::{add_noise, make_paper_poly, sample};

fn run(m: usize, num_points: usize, l: usize, confidence: f64, min_sep: usize) {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, num_points).unwrap();
    let truth = [0.3, 0.7];
    let cfg = ApproxConfig::for_order(2).with_supports(l, l);
    let opts = DetectOptions { sigma: Some(0.05), confidence, min_separation: Some(min_sep) };
    let mut hits = [0usize; 2];
    let mut errs: Vec<Vec<f64>> = vec![Vec::new(), Vec::new()];
    for iter in 0..m {
        let noisy = add_noise(&clean, 0.05, 1000 + iter as u64);
        let rep = detect(&noisy, &cfg, &opts).unwrap();
        let mut got = [false; 2];
        for k in &rep.knots {
            let t = if (k.zeta - 0.3).abs() < (k.zeta - 0.7).abs() { 0 } else { 1 };
            got[t] = true;
            errs[t].push(k.zeta - truth[t]);
        }
        for t in 0..2 { if got[t] { hits[t] += 1; } }
    }
    let stats: Vec<String> = (0..2).map(|t| {
        let n = errs[t].len() as f64;
        let mean = errs[t].iter().sum::<f64>() / n.max(1.0);
        let sd = (errs[t].iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        format!("k{t}: rate={:.3} mean={:+.2e} sd={:.4}", hits[t] as f64 / m as f64, mean, sd)
    }).collect();
    println!("np={num_points} l={l:3} conf={confidence:.2} sep={min_sep:3} | {}", stats.join(" | "));
}

fn main() {
    for (l, sep) in [(200usize, 60usize), (250, 80), (290, 90)] {
        run(200, 1000, l, 0.5, sep);
    }
}
