//! Truncated matrix forms of the deformed ladder operators.
//!
//! These matrices are not used for time evolution. They back two kinds of
//! check: residuals of the deformed commutator algebra, and the dense
//! state-vector path that cross-checks the streaming observables.
//!
//! Commutators computed on a truncated space are wrong in the last Fock
//! row and column, so every residual below is taken on the leading block
//! that truncation cannot reach.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::deformation::{DeformationError, DeformationSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: alloc::vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&alloc::vec![ONE; dim])
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let d = self.dim * other.dim;
        let mut m = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let s = self[(i, j)];
                if s == ZERO {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m[(i * other.dim + k, j * other.dim + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        self.mul_vec(v).iter().zip(v).map(|(mv, x)| x.conj() * mv).sum()
    }

    /// Largest entry modulus over rows and columns accepted by `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let mut worst = 0.0f64;
        for i in (0..self.dim).filter(|&i| keep(i)) {
            for j in (0..self.dim).filter(|&j| keep(j)) {
                worst = worst.max(self[(i, j)].norm());
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Field operators on the Fock states `|0>..|dim-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrices {
    pub dim: usize,
    pub a: CMatrix,
    pub a_dag: CMatrix,
    /// Deformed lowering operator `A = a f(n)`.
    pub big_a: CMatrix,
    /// Deformed raising operator `A^dag = f(n) a^dag`.
    pub big_a_dag: CMatrix,
    pub n_op: CMatrix,
}

pub fn build_fock_matrices(spec: &DeformationSpec, dim: usize) -> Result<FockMatrices, DeformationError> {
    if dim < 2 {
        return Err(DeformationError::InvalidParameter(
            "Fock dimension must be at least 2",
        ));
    }
    spec.validate()?;
    let mut a = CMatrix::zeros(dim);
    let mut big_a = CMatrix::zeros(dim);
    for n in 1..dim {
        let root = (n as f64).sqrt();
        a[(n - 1, n)] = Complex64::new(root, 0.0);
        big_a[(n - 1, n)] = Complex64::new(root * crate::deformation::f_value(spec, n)?, 0.0);
    }
    let n_op = CMatrix::from_diag(
        &(0..dim)
            .map(|n| Complex64::new(n as f64, 0.0))
            .collect::<Vec<_>>(),
    );
    Ok(FockMatrices {
        dim,
        a_dag: a.adjoint(),
        big_a_dag: big_a.adjoint(),
        a,
        big_a,
        n_op,
    })
}

/// Max residual of `[A, A^dag] = (n+1) f^2(n+1) - n f^2(n)` together with the
/// ladder relations `[A, n] = A` and `[A^dag, n] = -A^dag`, on the leading
/// `(dim-1) x (dim-1)` block.
pub fn verify_deformed_commutator(spec: &DeformationSpec, dim: usize) -> Result<f64, DeformationError> {
    if dim < 3 {
        return Err(DeformationError::InvalidParameter(
            "commutator check needs dim >= 3",
        ));
    }
    let m = build_fock_matrices(spec, dim)?;
    let target = CMatrix::from_diag(
        &(0..dim)
            .map(|n| Complex64::new(spec.energy(n + 1) - spec.energy(n), 0.0))
            .collect::<Vec<_>>(),
    );
    let safe = |i: usize| i < dim - 1;
    let r1 = (&m.big_a.commutator(&m.big_a_dag) - &target).max_abs_where(safe);
    let r2 = (&m.big_a.commutator(&m.n_op) - &m.big_a).max_abs_where(safe);
    let r3 = (&m.big_a_dag.commutator(&m.n_op) + &m.big_a_dag).max_abs_where(safe);
    Ok(r1.max(r2).max(r3))
}

/// Atom (x) field operators on the product basis `|e,n>, |g,n>`, atom index
/// major: `|e,n>` sits at `n` and `|g,n>` at `dim + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldOperators {
    pub field_dim: usize,
    pub sigma_plus: CMatrix,
    pub sigma_minus: CMatrix,
    pub sigma_z: CMatrix,
    pub proj_e: CMatrix,
    pub proj_g: CMatrix,
    /// Field operator `X` lifted to `1 (x) X`.
    pub field: FockMatrices,
}

impl AtomFieldOperators {
    pub fn new(spec: &DeformationSpec, field_dim: usize) -> Result<Self, DeformationError> {
        let field = build_fock_matrices(spec, field_dim)?;
        let id = CMatrix::identity(field_dim);
        let atom = |entries: [Complex64; 4]| {
            let mut m = CMatrix::zeros(2);
            m[(0, 0)] = entries[0];
            m[(0, 1)] = entries[1];
            m[(1, 0)] = entries[2];
            m[(1, 1)] = entries[3];
            m.kron(&id)
        };
        Ok(Self {
            field_dim,
            sigma_plus: atom([ZERO, ONE, ZERO, ZERO]),
            sigma_minus: atom([ZERO, ZERO, ONE, ZERO]),
            sigma_z: atom([ONE, ZERO, ZERO, -ONE]),
            proj_e: atom([ONE, ZERO, ZERO, ZERO]),
            proj_g: atom([ZERO, ZERO, ZERO, ONE]),
            field,
        })
    }

    pub fn lift(&self, field_op: &CMatrix) -> CMatrix {
        CMatrix::identity(2).kron(field_op)
    }

    /// Field photon number of product-basis index `i`.
    pub fn photon_number(&self, i: usize) -> usize {
        i % self.field_dim
    }

    /// Excitation number `c = n + |e><e|`.
    pub fn excitations(&self) -> CMatrix {
        &self.lift(&self.field.n_op) + &self.proj_e
    }
}

/// Max residual of `[S_-, S_+] = -2 xi S_0` and `[S_0, S_+-] = +-S_+-` for the
/// generators `S_+ = sigma^+ A c^{-1/2}`, `S_- = c^{-1/2} A^dag sigma^-`,
/// `S_0 = sigma_z / 2`. `c^{-1/2}` is taken as 0 on `|g,0>`.
pub fn verify_su2_deformed(spec: &DeformationSpec, dim: usize) -> Result<f64, DeformationError> {
    if dim < 3 {
        return Err(DeformationError::InvalidParameter("su(2) check needs dim >= 3"));
    }
    let ops = AtomFieldOperators::new(spec, dim)?;
    let (s_plus, s_minus, s_zero) = su2_generators(spec, &ops)?;
    let xi = CMatrix::from_diag(
        &(0..2 * dim)
            .map(|i| Complex64::new(xi_diagonal(spec, i < dim, ops.photon_number(i)), 0.0))
            .collect::<Vec<_>>(),
    );
    let safe = |i: usize| ops.photon_number(i) < dim - 1;
    let lhs = s_minus.commutator(&s_plus);
    let rhs = (&xi * &s_zero).scale(Complex64::new(-2.0, 0.0));
    let r1 = (&lhs - &rhs).max_abs_where(safe);
    let r2 = (&s_zero.commutator(&s_plus) - &s_plus).max_abs_where(safe);
    let r3 = (&s_zero.commutator(&s_minus) + &s_minus).max_abs_where(safe);
    Ok(r1.max(r2).max(r3))
}

/// Diagonal of `xi = c^{-1} [ (n+1) f^2(n+1) P_e + n f^2(n) P_g ]`, zero on `|g,0>`.
pub fn xi_diagonal(spec: &DeformationSpec, excited: bool, n: usize) -> f64 {
    if excited {
        spec.energy(n + 1) / (n + 1) as f64
    } else if n == 0 {
        0.0
    } else {
        spec.energy(n) / n as f64
    }
}

fn su2_generators(
    spec: &DeformationSpec,
    ops: &AtomFieldOperators,
) -> Result<(CMatrix, CMatrix, CMatrix), DeformationError> {
    spec.validate()?;
    let dim = ops.field_dim;
    let inv_sqrt_c = CMatrix::from_diag(
        &(0..2 * dim)
            .map(|i| {
                let c = ops.photon_number(i) + usize::from(i < dim);
                Complex64::new(if c == 0 { 0.0 } else { 1.0 / (c as f64).sqrt() }, 0.0)
            })
            .collect::<Vec<_>>(),
    );
    let big_a = ops.lift(&ops.field.big_a);
    let big_a_dag = ops.lift(&ops.field.big_a_dag);
    let s_plus = &(&ops.sigma_plus * &big_a) * &inv_sqrt_c;
    let s_minus = &(&inv_sqrt_c * &big_a_dag) * &ops.sigma_minus;
    let s_zero = ops.sigma_z.scale(Complex64::new(0.5, 0.0));
    Ok((s_plus, s_minus, s_zero))
}

/// Residual of `[c, H]` for `H = nu A^dag A + omega sigma_z / 2 + lambda (sigma^+ A + A^dag sigma^-)`
/// on the truncation-safe block.
pub fn verify_constant_of_motion(spec: &DeformationSpec, dim: usize) -> Result<f64, DeformationError> {
    let ops = AtomFieldOperators::new(spec, dim)?;
    let big_a = ops.lift(&ops.field.big_a);
    let big_a_dag = ops.lift(&ops.field.big_a_dag);
    let free = &(&big_a_dag * &big_a).scale(Complex64::new(1.3, 0.0))
        + &ops.sigma_z.scale(Complex64::new(0.85, 0.0));
    let coupling = &(&ops.sigma_plus * &big_a) + &(&big_a_dag * &ops.sigma_minus);
    let h = &free + &coupling.scale(Complex64::new(0.4, 0.0));
    let safe = |i: usize| ops.photon_number(i) < dim - 1;
    Ok(ops.excitations().commutator(&h).max_abs_where(safe))
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: DeformationSpec = DeformationSpec::QType { q: 1.04 };

    #[test]
    fn matrix_entries() {
        let m = build_fock_matrices(&DeformationSpec::Identity, 3).unwrap();
        assert_eq!(m.big_a, m.a);
        assert!((m.big_a[(0, 1)].re - 1.0).abs() < 1e-15);
        assert!((m.big_a[(1, 2)].re - 2.0f64.sqrt()).abs() < 1e-15);

        let m = build_fock_matrices(&Q, 10).unwrap();
        let expected = 3.0f64.sqrt() * Q.f(3);
        assert!((m.big_a[(2, 3)].re - expected).abs() < 1e-15);
        let vacuum: Vec<Complex64> = (0..10).map(|n| if n == 0 { ONE } else { ZERO }).collect();
        assert!(m.big_a.mul_vec(&vacuum).iter().all(|x| *x == ZERO));
        assert_eq!(m.big_a_dag, m.big_a.adjoint());
        // A = a f(n) as a matrix product as well as by construction.
        let f = CMatrix::from_diag(&(0..10).map(|n| Complex64::new(Q.f(n), 0.0)).collect::<Vec<_>>());
        assert!((&(&m.a * &f) - &m.big_a).max_abs_where(|_| true) < 1e-14);
        assert!(build_fock_matrices(&Q, 1).is_err());
    }

    #[test]
    fn commutator_residuals() {
        assert!(verify_deformed_commutator(&DeformationSpec::Identity, 20).unwrap() <= 1e-12);
        assert!(verify_deformed_commutator(&Q, 20).unwrap() <= 1e-10);
        assert!(verify_deformed_commutator(&DeformationSpec::Kerr { kappa: 0.3 }, 12).unwrap() <= 1e-10);
    }

    #[test]
    fn truncation_corner_is_excluded_for_a_reason() {
        let m = build_fock_matrices(&DeformationSpec::Identity, 6).unwrap();
        let full = (&m.a.commutator(&m.a_dag) - &CMatrix::identity(6)).max_abs_where(|_| true);
        assert!(full > 1.0);
    }

    #[test]
    fn su2_residuals() {
        assert!(verify_su2_deformed(&DeformationSpec::Identity, 15).unwrap() <= 1e-12);
        assert!(verify_su2_deformed(&Q, 15).unwrap() <= 1e-10);
        assert!(verify_su2_deformed(&Q, 20).unwrap() <= 1e-10);
    }

    #[test]
    fn su2_raising_identity_is_tight() {
        let ops = AtomFieldOperators::new(&Q, 8).unwrap();
        let (s_plus, _, s_zero) = su2_generators(&Q, &ops).unwrap();
        let r = (&s_zero.commutator(&s_plus) - &s_plus).max_abs_where(|_| true);
        assert!(r <= 1e-12);
    }

    #[test]
    fn undeformed_xi_diagonal() {
        for n in 0..6 {
            assert_eq!(xi_diagonal(&DeformationSpec::Identity, true, n), 1.0);
            let expected = if n == 0 { 0.0 } else { 1.0 };
            assert_eq!(xi_diagonal(&DeformationSpec::Identity, false, n), expected);
        }
    }

    #[test]
    fn excitation_number_is_conserved() {
        assert!(verify_constant_of_motion(&Q, 12).unwrap() <= 1e-12);
        assert!(verify_constant_of_motion(&DeformationSpec::Identity, 12).unwrap() <= 1e-12);
    }
}
