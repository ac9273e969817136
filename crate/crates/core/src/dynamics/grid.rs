use alloc::vec::Vec;
use core::f64::consts::PI;

/// Quadrature over the atomic momentum distribution.
///
/// `p` is measured in photon-recoil units. The initial wavepacket has
/// density proportional to `exp(-2 p^2)`, and the weights form a probability
/// measure (they sum to one).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub p: Vec<f64>,
    pub weight: Vec<f64>,
}

impl MomentumGrid {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `sum_j weight_j g(p_j)`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.p.iter().zip(&self.weight).map(|(&p, &w)| w * g(p)).sum()
    }
}

/// Gauss-Hermite rule for `exp(-x^2)` mapped to `p = x / sqrt(2)`.
///
/// Roots come from Newton iteration on the orthonormal Hermite recurrence,
/// seeded with the usual asymptotic guesses. Nodes are returned in
/// increasing order.
pub fn make_momentum_grid(nodes: usize) -> MomentumGrid {
    assert!(nodes >= 1, "momentum grid needs at least one node");
    let n = nodes;
    let nf = n as f64;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        // The middle root is exactly zero.
        x[n / 2] = 0.0;
    }
    let total: f64 = w.iter().sum();
    let mut pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(&xi, &wi)| (xi / core::f64::consts::SQRT_2, wi / total))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    MomentumGrid {
        p: pairs.iter().map(|q| q.0).collect(),
        weight: pairs.iter().map(|q| q.1).collect(),
    }
}
