use settomo::density::DensityMatrix;
use num_complex::Complex64;
fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }
fn two_term(alpha_sq: f64, phase: f64) -> DensityMatrix {
    let a = alpha_sq.sqrt(); let b = (1.0 - alpha_sq).sqrt();
    DensityMatrix::from_pure(&[c(a,0.0), c(0.0,0.0), c(0.0,0.0), c(b*phase.cos(), b*phase.sin())]).unwrap()
}
fn main() {
    let c0 = two_term(0.3, 0.0).concurrence();
    let p0 = two_term(0.3, 0.0).purity();
    let mut worst_c: f64 = 0.0; let mut worst_p: f64 = 0.0; let mut worst_phi = 0.0;
    let mut phi = 0.0;
    while phi < std::f64::consts::TAU {
        let s = two_term(0.3, phi);
        let dc = (s.concurrence() - c0).abs();
        let dp = (s.purity() - p0).abs();
        if dc > worst_c { worst_c = dc; worst_phi = phi; }
        if dp > worst_p { worst_p = dp; }
        phi += std::f64::consts::TAU / 16.0;
    }
    println!("worst dC={:.3e} at phi={:.4}, worst dP={:.3e}", worst_c, worst_phi, worst_p);
    let b = two_term(0.5, 0.0); let b2 = two_term(0.5, 0.289);
    println!("fid={:.15} expected={:.15}", b.fidelity(&b2).unwrap(), (0.289f64/2.0).cos().powi(2));
    // gamma sweep cases
    for &(asq, g) in &[(0.0f64, 0.0f64), (0.0, 1.0), (1.0, 1.0), (0.15, 0.4)] {
        let mut m = settomo::matrix::ComplexMatrix::zeros(4);
        let al = asq.sqrt(); let be = (1.0f64 - asq).sqrt();
        m[(0,0)] = c(asq, 0.0); m[(3,3)] = c(1.0-asq, 0.0);
        let coh = Complex64::from_polar(g*al*be, 0.37);
        m[(0,3)] = coh; m[(3,0)] = coh.conj();
        let rho = DensityMatrix::new(m).unwrap();
        let expected = 2.0*g*(asq*(1.0-asq)).sqrt();
        println!("asq={asq} g={g}: C={:.3e} expected={:.3e} diff={:.3e}", rho.concurrence(), expected, (rho.concurrence()-expected).abs());
    }
}
