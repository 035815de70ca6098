use cndetect::synthetic::make_paper_poly;

fn main() {
    let poly = make_paper_poly::<f64>();
    println!("residual = {}", poly.residual());
    for j in 0..3 {
        println!("segment {j}: {:?}", poly.segment(j));
    }
    for (i, &k) in [0.0, 0.3, 0.7, 1.0].iter().enumerate() {
        println!("eval({k}) = {} (target {})", poly.eval(k), [0.0, 0.3, 0.7, 1.0][i]);
    }
    println!("slope at 0 = {}", poly.eval_derivative(0.0, 1));
    println!("slope at 1 = {}", poly.eval_derivative(1.0, 1));
    println!("jump0 = {}", poly.taylor_jump(0));
    println!("jump1 = {}", poly.taylor_jump(1));
    println!("c0 defect = {}", poly.continuity_defect(0));
    println!("c1 defect = {}", poly.continuity_defect(1));
}
