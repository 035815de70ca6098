use cndetect::approx::{selector_vector, solve_coupled, ApproxConfig};
use cndetect::series::{center_window, SampleSeries};
use cndetect::synthetic::{make_paper_poly, sample, add_noise};
use cndetect::detector::scan;

fn main() {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, 100).unwrap();
    // sigma_Delta (noise gain) for various support lengths on the uniform grid
    for l in [8usize, 12, 16, 20, 24, 26, 28, 29, 30] {
        let cfg = ApproxConfig::for_order(2).with_supports(l, l);
        let i = 49; // central gap
        let w = center_window(&clean, i, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector::<f64>(2, 2, 2);
        let gain = (fit.estimator.transpose() * &d).norm_squared();
        let sigma_delta = 0.05 * gain.sqrt();
        println!("l={l:2}  gain={gain:10.3}  sigma_delta={sigma_delta:8.4}  zbar(2.19)={:6.2}", 2.193/sigma_delta);
    }
    // noiseless profile peaks
    for l in [26usize, 28, 30] {
        let cfg = ApproxConfig::for_order(2).with_supports(l, l);
        let profile = scan(&clean, &cfg, Some(0.05)).unwrap();
        let mut best: Vec<(usize, f64, f64)> = profile.iter().enumerate().map(|(j, p)| (j, p.delta_t, p.zeta)).collect();
        best.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap());
        println!("l={l}: profile len {}, top peaks:", profile.len());
        for (j, dt, zeta) in best.iter().take(4) {
            println!("   idx {j} zeta={zeta:.4} dt={dt:+.3} z={:+.2}", profile[*j].z_score);
        }
    }
    // one noisy scan
    let noisy = add_noise(&clean, 0.05, 1);
    let cfg = ApproxConfig::for_order(2).with_supports(28, 28);
    let profile = scan(&noisy, &cfg, Some(0.05)).unwrap();
    println!("noisy z at knots (idx for zeta near 0.298 / 0.702):");
    for p in &profile {
        if (p.zeta - 0.29798).abs() < 0.006 || (p.zeta - 0.70202).abs() < 0.006 {
            println!("   zeta={:.4} dt={:+.3} z={:+.2} Ea={:.4} Ee={:.4}", p.zeta, p.delta_t, p.z_score, p.e_approx, p.e_extrap);
        }
    }
}
