use cndetect::approx::ApproxConfig;
use cndetect::detector::{detect, scan, DetectOptions};
use cndetect::synthetic::{add_noise, make_paper_poly, sample};

fn argmax_floor(m: usize, l: usize) {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, 100).unwrap();
    let cfg = ApproxConfig::for_order(2).with_supports(l, l);
    let mut errs0 = Vec::new();
    let mut errs1 = Vec::new();
    for iter in 0..m {
        let noisy = add_noise(&clean, 0.05, 1000 + iter as u64);
        let profile = scan(&noisy, &cfg, Some(0.05)).unwrap();
        let half = profile.len() / 2;
        let best = |range: std::ops::Range<usize>| {
            range.max_by(|&a, &b| (profile[a].delta_t.powi(2)).partial_cmp(&profile[b].delta_t.powi(2)).unwrap()).unwrap()
        };
        let j0 = best(0..half);
        let j1 = best(half..profile.len());
        errs0.push(profile[j0].zeta - 0.3);
        errs1.push(profile[j1].zeta - 0.7);
    }
    let stat = |errs: &Vec<f64>| {
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let sd = (errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        (mean, sd)
    };
    let (m0, s0) = stat(&errs0);
    let (m1, s1) = stat(&errs1);
    println!("argmax floor l={l:2}: k0 mean={m0:+.2e} sd={s0:.3} | k1 mean={m1:+.2e} sd={s1:.3}");
}

fn run(m: usize, l: usize, confidence: f64, min_sep: usize, best_only: bool) {
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
        let mut per: Vec<Vec<(f64, f64)>> = vec![Vec::new(), Vec::new()]; // (err, |z|)
        for k in &rep.knots {
            let t = if (k.zeta - 0.3).abs() < (k.zeta - 0.7).abs() { 0 } else { 1 };
            per[t].push((k.zeta - truth[t], k.z_score.abs()));
        }
        for t in 0..2 {
            if per[t].is_empty() { continue; }
            hits[t] += 1;
            if best_only {
                let best = per[t].iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
                errs[t].push(best.0);
            } else {
                errs[t].extend(per[t].iter().map(|p| p.0));
            }
        }
    }
    let stats: Vec<String> = (0..2).map(|t| {
        let n = errs[t].len() as f64;
        let mean = errs[t].iter().sum::<f64>() / n.max(1.0);
        format!("k{t}: rate={:.3} mean={:+.2e}", hits[t] as f64 / m as f64, mean)
    }).collect();
    println!("l={l:2} conf={confidence:.2} sep={min_sep:2} best_only={best_only} | {}", stats.join(" | "));
}

fn main() {
    let m = 400;
    for l in [20usize, 24, 28, 30] { argmax_floor(m, l); }
    for (l, sep, conf) in [(26usize, 19usize, 0.2f64), (28, 19, 0.2), (30, 19, 0.2), (30, 35, 0.2), (24, 8, 0.5), (24, 8, 0.2)] {
        run(m, l, conf, sep, false);
        run(m, l, conf, sep, true);
    }
}
