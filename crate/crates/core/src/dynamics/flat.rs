use num_complex::Complex64;

/// Exact solution of one block when the detuning `d` is constant.
///
/// In the frame rotating with `+-d t / 2` the block Hamiltonian is the
/// constant matrix `[[d/2, g], [g, -d/2]]`, whose propagator is
/// `cos(W t / 2) - i sin(W t / 2) / (W / 2) * H` with `W = sqrt(d^2 + 4 g^2)`.
pub fn flat_block(g: f64, d: f64, psi0: (Complex64, Complex64), t: f64) -> (Complex64, Complex64) {
    let half_w = 0.5 * (d * d + 4.0 * g * g).sqrt();
    let (cos, sinc) = if half_w == 0.0 {
        (1.0, t)
    } else {
        ((half_w * t).cos(), (half_w * t).sin() / half_w)
    };
    let i = Complex64::new(0.0, 1.0);
    let (a, b) = psi0;
    let u = a * cos - i * sinc * (0.5 * d * a + g * b);
    let v = b * cos - i * sinc * (g * a - 0.5 * d * b);
    let rot = Complex64::from_polar(1.0, 0.5 * d * t);
    (u * rot, v * rot.conj())
}
