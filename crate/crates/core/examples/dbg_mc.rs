use cndetect::approx::ApproxConfig;
use cndetect::detector::{detect, DetectOptions};
use cndetect::synthetic::{add_noise, make_paper_poly, sample};

fn run(m: usize, l: usize, confidence: f64, min_sep: Option<usize>) {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, 100).unwrap();
    let truth = [0.3, 0.7];
    let cfg = ApproxConfig::for_order(2).with_supports(l, l);
    let opts = DetectOptions { sigma: Some(0.05), confidence, min_separation: min_sep };
    let mut hits = [0usize; 2];
    let mut errs: Vec<Vec<f64>> = vec![Vec::new(), Vec::new()];
    let mut n_knots_hist = [0usize; 6];
    for iter in 0..m {
        let noisy = add_noise(&clean, 0.05, 1000 + iter as u64);
        let rep = detect(&noisy, &cfg, &opts).unwrap();
        n_knots_hist[rep.knots.len().min(5)] += 1;
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
        format!("k{}: rate={:.3} mean={:+.2e}", t, hits[t] as f64 / m as f64, mean)
    }).collect();
    println!("l={l:2} conf={confidence:.2} minsep={min_sep:?} | {} | knots per iter: {:?}", stats.join("  "), n_knots_hist);
}

fn main() {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    for l in [26usize, 28, 30] {
        for conf in [0.5, 0.8, 0.9, 0.95] {
            run(m, l, conf, None);
        }
    }
}
