use cndetect::approx::ApproxConfig;
use cndetect::detector::{detect, DetectOptions};
use cndetect::synthetic::{add_noise, make_paper_poly, sample};

fn run(m: usize, l: usize, confidence: f64, min_sep: usize) {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, 100).unwrap();
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
        format!("k{t}: rate={:.3} mean={:+.2e} sd={:.3} pool={}", hits[t] as f64 / m as f64, mean, sd, errs[t].len())
    }).collect();
    println!("l={l:2} conf={confidence:.2} sep={min_sep:2} | {}", stats.join(" | "));
}

fn main() {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    for l in [24usize, 26, 28] {
        for sep in [6usize, 8, 10, 14] {
            for conf in [0.3, 0.5, 0.7, 0.9] {
                run(m, l, conf, sep);
            }
        }
    }
}
