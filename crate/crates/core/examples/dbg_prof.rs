use cndetect::approx::ApproxConfig;
use cndetect::detector::scan;
use cndetect::synthetic::{add_noise, make_paper_poly, sample};

fn main() {
    let poly = make_paper_poly::<f64>();
    let clean = sample(&poly, 100).unwrap();
    let cfg = ApproxConfig::for_order(2).with_supports(28, 28);
    let profile = scan(&clean, &cfg, Some(0.05)).unwrap();
    println!("noiseless profile (l=28): idx zeta dt z Ea Efg Ee");
    for (j, p) in profile.iter().enumerate() {
        println!("{j:3} {:.4} {:+8.4} {:+6.2} {:9.5} {:9.5} {:9.5}", p.zeta, p.delta_t, p.z_score, p.e_approx, p.e_combined, p.e_extrap);
    }
    let noisy = add_noise(&clean, 0.05, 2024);
    let profile = scan(&noisy, &cfg, Some(0.05)).unwrap();
    println!("\nnoisy (seed 2024): idx zeta dt z Ee");
    for (j, p) in profile.iter().enumerate() {
        println!("{j:3} {:.4} {:+8.4} {:+6.2} {:9.5}", p.zeta, p.delta_t, p.z_score, p.e_extrap);
    }
}
