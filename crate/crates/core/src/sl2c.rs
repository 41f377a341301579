//! The SL(2,C) double cover of the proper orthochronous Lorentz group.
//!
//! A four-vector `v` is encoded as the Hermitian matrix
//! `X(v) = v^0 I + v.sigma` (contravariant components), with
//! `det X(v) = (v^0)^2 - |v|^2`. An element `A` of the first fundamental
//! representation acts by
//!
//! ```text
//! A X(v) A^dagger = X(Phi(A) v)
//! ```
//!
//! and [`spinor_map`] returns `Phi(A)`. The second fundamental
//! representation uses `Xbar(v) = v^0 I - v.sigma` and the matrix
//! `(A^dagger)^{-1}`, which satisfies `(A^dagger)^{-1} Xbar(v) A^{-1} = Xbar(Phi(A) v)`.
//!
//! The relation with the lowered contraction `sigma^mu v_mu = -Xbar(v)`,
//! `P^dagger (sigma^mu v_mu) P = sigma^mu (Phi(P)^{-1} v)_mu`, holds for every
//! `P` in the first representation; it is the same statement read with
//! `P = A^{-1}`.

use nalgebra::{Matrix2, Matrix4, Vector3};

use crate::error::{Error, Result};
use crate::minkowski::{FourVector, LorentzMatrix, METRIC};
use crate::C64;

/// Tolerance on `det A = 1`.
pub const DET_TOL: f64 = 1e-10;

/// Which inequivalent fundamental representation a matrix belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    First,
    Second,
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrix `sigma_k`, `k` in `1..=3`; `k = 0` gives the identity.
pub fn sigma(k: usize) -> Matrix2<C64> {
    match k {
        0 => Matrix2::identity(),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// `sum_k a_k sigma_k` for a real 3-vector.
pub fn sigma_dot(a: &Vector3<f64>) -> Matrix2<C64> {
    (1..=3).fold(Matrix2::zeros(), |acc, k| acc + sigma(k) * C64::from(a[k - 1]))
}

/// `sum_k z_k sigma_k` for a complex 3-vector.
pub fn sigma_dot_complex(z: &[C64; 3]) -> Matrix2<C64> {
    (1..=3).fold(Matrix2::zeros(), |acc, k| acc + sigma(k) * z[k - 1])
}

/// `X(v) = v^0 I + v.sigma`.
pub fn x_matrix(v: &FourVector) -> Matrix2<C64> {
    Matrix2::identity() * C64::from(v.t()) + sigma_dot(&v.spatial())
}

/// `Xbar(v) = v^0 I - v.sigma`.
pub fn x_bar_matrix(v: &FourVector) -> Matrix2<C64> {
    Matrix2::identity() * C64::from(v.t()) - sigma_dot(&v.spatial())
}

/// `sigma^mu v_mu = -v^0 I + v.sigma` with the lowered index.
pub fn sigma_lowered(v: &FourVector) -> Matrix2<C64> {
    -x_bar_matrix(v)
}

/// Inverts [`x_matrix`]: `v^mu = tr(sigma_mu M) / 2` (real parts).
pub fn components_from_x(m: &Matrix2<C64>) -> FourVector {
    let c = |k: usize| (sigma(k) * m).trace().re * 0.5;
    FourVector::new(c(0), c(1), c(2), c(3))
}

/// A unimodular 2x2 complex matrix tagged with its representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SL2CElement {
    matrix: Matrix2<C64>,
    rep: Rep,
}

impl SL2CElement {
    pub fn new(matrix: Matrix2<C64>, rep: Rep) -> Result<Self> {
        let det = matrix.determinant();
        if !matrix.iter().all(|c| c.re.is_finite() && c.im.is_finite()) || (det - ONE).norm() > DET_TOL {
            return Err(Error::NotUnimodular(format!("{det}")));
        }
        Ok(Self { matrix, rep })
    }

    pub(crate) fn from_parts_unchecked(matrix: Matrix2<C64>, rep: Rep) -> Self {
        Self { matrix, rep }
    }

    pub fn identity() -> Self {
        Self::from_parts_unchecked(Matrix2::identity(), Rep::First)
    }

    /// `exp(-i angle axis.sigma / 2)`: maps to the active rotation by `angle` about `axis`.
    pub fn rotation(angle: f64, axis: Vector3<f64>) -> Self {
        let k = axis.normalize();
        let (s, c) = (angle * 0.5).sin_cos();
        Self::from_parts_unchecked(Matrix2::identity() * C64::from(c) - sigma_dot(&k) * (I * s), Rep::First)
    }

    /// `exp(rapidity axis.sigma / 2)`: the Hermitian boost along `axis`.
    pub fn boost(rapidity: f64, axis: Vector3<f64>) -> Self {
        let k = axis.normalize();
        let half = rapidity * 0.5;
        Self::from_parts_unchecked(
            Matrix2::identity() * C64::from(half.cosh()) + sigma_dot(&k) * C64::from(half.sinh()),
            Rep::First,
        )
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn with_rep(self, rep: Rep) -> Self {
        Self { rep, ..self }
    }

    /// Group product; both factors must carry the same representation tag.
    pub fn mul(&self, rhs: &SL2CElement) -> Result<SL2CElement> {
        if self.rep != rhs.rep {
            return Err(Error::WrongRepresentation {
                expected: self.rep,
                found: rhs.rep,
            });
        }
        Ok(Self::from_parts_unchecked(self.matrix * rhs.matrix, self.rep))
    }

    /// Closed-form inverse of a unimodular 2x2 matrix.
    pub fn inverse(&self) -> SL2CElement {
        let m = &self.matrix;
        Self::from_parts_unchecked(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]), self.rep)
    }

    pub fn adjoint(&self) -> Matrix2<C64> {
        self.matrix.adjoint()
    }

    pub fn neg(&self) -> SL2CElement {
        Self::from_parts_unchecked(-self.matrix, self.rep)
    }

    pub fn max_abs_diff(&self, other: &SL2CElement) -> f64 {
        max_abs_diff2(&self.matrix, &other.matrix)
    }
}

pub fn max_abs_diff2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> f64 {
    (a - b).iter().fold(0.0_f64, |m, c| m.max(c.norm()))
}

/// `Phi(A)`: the Lorentz matrix with `A X(v) A^dagger = X(Phi(A) v)`,
/// built column by column from the images of the basis vectors.
pub fn spinor_map(a: &SL2CElement) -> Result<LorentzMatrix> {
    if a.rep != Rep::First {
        return Err(Error::WrongRepresentation {
            expected: Rep::First,
            found: a.rep,
        });
    }
    Ok(spinor_map_matrix(&a.matrix))
}

pub(crate) fn spinor_map_matrix(a: &Matrix2<C64>) -> LorentzMatrix {
    let adj = a.adjoint();
    let mut m = Matrix4::zeros();
    for nu in 0..4 {
        let image = components_from_x(&(a * sigma(nu) * adj));
        for mu in 0..4 {
            m[(mu, nu)] = image[mu];
        }
    }
    LorentzMatrix::from_matrix_unchecked(m)
}

/// The positive-definite Hermitian `L(n) = X(n)^{1/2}`, the unique
/// canonical boost with `Phi(L(n)) n0 = n`.
///
/// `X(n)` has eigenvalues `e^{+-w}` on the projectors `(1 +- nhat.sigma)/2`,
/// so `L(n) = cosh(w/2) + sinh(w/2) nhat.sigma` with
/// `cosh(w/2) = sqrt((n^0 + 1)/2)`.
pub fn canonical_boost(n: &FourVector) -> Result<SL2CElement> {
    n.check_foliation()?;
    Ok(canonical_boost_unchecked(n))
}

pub(crate) fn canonical_boost_unchecked(n: &FourVector) -> SL2CElement {
    let u = n.spatial();
    let c = ((n.t() + 1.0) * 0.5).sqrt();
    let m = Matrix2::identity() * C64::from(c) + sigma_dot(&u) * C64::from(1.0 / (2.0 * c));
    SL2CElement::from_parts_unchecked(m, Rep::First)
}

/// `(A^dagger)^{-1}`, tagged with the other representation. Applying it
/// twice returns the original element.
pub fn second_rep(a: &SL2CElement) -> SL2CElement {
    let inv_adj = a.inverse().matrix.adjoint();
    let rep = match a.rep {
        Rep::First => Rep::Second,
        Rep::Second => Rep::First,
    };
    SL2CElement::from_parts_unchecked(inv_adj, rep)
}

/// An element of the Lorentz Lie algebra: rotation vector `theta` and
/// rapidity vector `boost`.
///
/// Its vector representation `G^mu_nu` has `G^0_i = G^i_0 = boost_i` and
/// `G^i_j = -eps_{ijk} theta_k`, and `exp(G)` is the image of
/// `exp((boost - i theta).sigma / 2)` under [`spinor_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzGenerator {
    pub rotation: Vector3<f64>,
    pub boost: Vector3<f64>,
}

impl LorentzGenerator {
    pub fn new(rotation: Vector3<f64>, boost: Vector3<f64>) -> Self {
        Self { rotation, boost }
    }

    /// `G^mu_nu`.
    pub fn matrix(&self) -> Matrix4<f64> {
        let (t, w) = (self.rotation, self.boost);
        let mut g = Matrix4::zeros();
        for i in 0..3 {
            g[(0, i + 1)] = w[i];
            g[(i + 1, 0)] = w[i];
        }
        g[(1, 2)] = -t.z;
        g[(2, 1)] = t.z;
        g[(2, 3)] = -t.x;
        g[(3, 2)] = t.x;
        g[(3, 1)] = -t.y;
        g[(1, 3)] = t.y;
        g
    }

    /// The antisymmetric `omega_{mu nu} = g_{mu alpha} G^alpha_nu`.
    pub fn lowered(&self) -> Matrix4<f64> {
        let mut g = self.matrix();
        for mu in 0..4 {
            for nu in 0..4 {
                g[(mu, nu)] *= METRIC[mu];
            }
        }
        g
    }

    /// `exp(eps (boost - i theta).sigma / 2)` in closed form.
    pub fn exp_sl2c(&self, eps: f64) -> SL2CElement {
        let z: [C64; 3] = std::array::from_fn(|k| C64::new(self.boost[k], -self.rotation[k]) * (0.5 * eps));
        let s2: C64 = z.iter().map(|c| c * c).sum();
        let (cosh, sinhc) = if s2.norm() < 1e-6 {
            (ONE + s2 / 2.0 + s2 * s2 / 24.0, ONE + s2 / 6.0 + s2 * s2 / 120.0)
        } else {
            let s = s2.sqrt();
            (s.cosh(), s.sinh() / s)
        };
        SL2CElement::from_parts_unchecked(
            Matrix2::identity() * cosh + sigma_dot_complex(&z) * sinhc,
            Rep::First,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::dot;
    use crate::sampling::Sampler;

    fn lorentz_diff(a: &LorentzMatrix, b: &Matrix4<f64>) -> f64 {
        (a.matrix() - b).amax()
    }

    #[test]
    fn identity_maps_to_identity() {
        let l = spinor_map(&SL2CElement::identity()).unwrap();
        assert_eq!(*l.matrix(), Matrix4::identity());
    }

    #[test]
    fn rotation_about_z_oracle() {
        // Oracle: X(e_x) = sigma_1 -> A sigma_1 A^dagger = cos sigma_1 + sin sigma_2.
        let theta = 0.83_f64;
        let l = spinor_map(&SL2CElement::rotation(theta, Vector3::z())).unwrap();
        let mut expected = Matrix4::identity();
        expected[(1, 1)] = theta.cos();
        expected[(1, 2)] = -theta.sin();
        expected[(2, 1)] = theta.sin();
        expected[(2, 2)] = theta.cos();
        assert!(lorentz_diff(&l, &expected) < 1e-14);
    }

    #[test]
    fn boost_along_z_oracle() {
        let w = 1.7_f64;
        let l = spinor_map(&SL2CElement::boost(w, Vector3::z())).unwrap();
        let mut expected = Matrix4::identity();
        expected[(0, 0)] = w.cosh();
        expected[(3, 3)] = w.cosh();
        expected[(0, 3)] = w.sinh();
        expected[(3, 0)] = w.sinh();
        assert!(lorentz_diff(&l, &expected) < 1e-13);
    }

    #[test]
    fn spinor_map_rejects_second_rep() {
        let a = second_rep(&SL2CElement::boost(0.3, Vector3::x()));
        assert!(matches!(spinor_map(&a), Err(Error::WrongRepresentation { .. })));
    }

    #[test]
    fn kernel_is_minus_identity() {
        let l = spinor_map(&SL2CElement::identity().neg()).unwrap();
        assert_eq!(*l.matrix(), Matrix4::identity());
    }

    #[test]
    fn homomorphism_on_random_pairs() {
        let mut s = Sampler::new(21);
        for _ in 0..1000 {
            let a = s.sl2c();
            let b = s.sl2c();
            let ab = spinor_map(&a.mul(&b).unwrap()).unwrap();
            let prod = spinor_map(&a).unwrap() * spinor_map(&b).unwrap();
            let scale = prod.matrix().amax();
            assert!(ab.max_abs_diff(&prod) < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn spinor_map_output_is_lorentz() {
        let mut s = Sampler::new(4);
        for _ in 0..500 {
            let l = spinor_map(&s.sl2c()).unwrap();
            LorentzMatrix::new(*l.matrix()).unwrap();
        }
    }

    #[test]
    fn determinant_of_x_preserved() {
        let mut s = Sampler::new(5);
        for _ in 0..500 {
            let a = s.sl2c();
            let v = s.four_vector(1.0);
            let x = x_matrix(&v);
            let y = a.matrix() * x * a.adjoint();
            let scale = y.iter().fold(1.0_f64, |m, c| m.max(c.norm()));
            assert!((y.determinant() - x.determinant()).norm() < 1e-12 * scale * scale);
            assert!((x.determinant().re + dot(&v, &v)).abs() < 1e-14);
        }
    }

    #[test]
    fn lowered_defining_relation_holds_with_inverse_action() {
        // P^dagger (sigma.n) P = sigma.(Phi(P)^{-1} n)
        let mut s = Sampler::new(6);
        for _ in 0..500 {
            let p = s.sl2c();
            let n = s.unit_timelike();
            let lhs = p.adjoint() * sigma_lowered(&n) * p.matrix();
            let back = spinor_map(&p).unwrap().inverse().apply(&n);
            let rhs = sigma_lowered(&back);
            let scale = rhs.iter().fold(1.0_f64, |m, c| m.max(c.norm()));
            assert!(max_abs_diff2(&lhs, &rhs) < 1e-10 * scale);
        }
    }

    #[test]
    fn second_rep_relation() {
        let mut s = Sampler::new(7);
        for _ in 0..300 {
            let a = s.sl2c();
            let b = second_rep(&a);
            let n = s.unit_timelike();
            let lhs = b.matrix() * x_bar_matrix(&n) * b.adjoint();
            let rhs = x_bar_matrix(&spinor_map(&a).unwrap().apply(&n));
            let scale = rhs.iter().fold(1.0_f64, |m, c| m.max(c.norm()));
            assert!(max_abs_diff2(&lhs, &rhs) < 1e-10 * scale);
        }
    }

    #[test]
    fn canonical_boost_examples() {
        let l0 = canonical_boost(&FourVector::rest()).unwrap();
        assert!(l0.max_abs_diff(&SL2CElement::identity()) < 1e-15);

        let w = 1.1_f64;
        let n = FourVector::new(w.cosh(), 0.0, 0.0, w.sinh());
        let l = canonical_boost(&n).unwrap();
        let expected = Matrix2::new(C64::from((w / 2.0).exp()), ZERO, ZERO, C64::from((-w / 2.0).exp()));
        assert!(max_abs_diff2(l.matrix(), &expected) < 1e-14);
    }

    #[test]
    fn canonical_boost_round_trip_and_positivity() {
        let mut s = Sampler::new(8);
        for _ in 0..1000 {
            let n = s.unit_timelike();
            let l = canonical_boost(&n).unwrap();
            let back = spinor_map(&l).unwrap().apply(&FourVector::rest());
            assert!((back - n).max_abs() < 1e-10);
            assert!(max_abs_diff2(l.matrix(), &l.adjoint()) < 1e-15);
            let m = l.matrix();
            let tr = (m[(0, 0)] + m[(1, 1)]).re;
            let det = m.determinant().re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            assert!(tr / 2.0 - disc > 0.0, "smallest eigenvalue must be positive");
            assert!(max_abs_diff2(&(m * m), &x_matrix(&n)) < 1e-10 * n.t());
        }
    }

    #[test]
    fn canonical_boost_rejects_invalid() {
        assert!(canonical_boost(&FourVector::new(1.5, 0.0, 0.0, 0.0)).is_err());
        assert!(canonical_boost(&FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn second_rep_examples() {
        let u = SL2CElement::rotation(1.2, Vector3::new(1.0, 2.0, -0.5));
        let su = second_rep(&u);
        assert_eq!(su.rep(), Rep::Second);
        assert!(max_abs_diff2(su.matrix(), u.matrix()) < 1e-15);

        let l = SL2CElement::boost(0.9, Vector3::new(0.0, 1.0, 1.0));
        assert!(max_abs_diff2(second_rep(&l).matrix(), l.inverse().matrix()) < 1e-15);

        let mut s = Sampler::new(9);
        for _ in 0..300 {
            let a = s.sl2c();
            let b = s.sl2c();
            let lhs = second_rep(&a.mul(&b).unwrap());
            let rhs = second_rep(&a).mul(&second_rep(&b)).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10 * lhs.matrix().iter().fold(1.0_f64, |m, c| m.max(c.norm())));
        }
    }

    #[test]
    fn mixed_representation_product_is_rejected() {
        let a = SL2CElement::identity();
        assert!(a.mul(&second_rep(&a)).is_err());
    }

    #[test]
    fn generator_exponential_matches_matrix_exponential() {
        let mut s = Sampler::new(10);
        for _ in 0..100 {
            let gen = LorentzGenerator::new(s.unit_vector() * s.uniform(0.0, 2.0), s.unit_vector() * s.uniform(0.0, 1.5));
            for eps in [1e-9, 0.3, 1.0] {
                let via_spinor = spinor_map(&gen.exp_sl2c(eps)).unwrap();
                let direct = (gen.matrix() * eps).exp();
                assert!(via_spinor.max_abs_diff(&LorentzMatrix::new(direct).unwrap()) < 1e-10 * direct.amax());
            }
        }
    }

    #[test]
    fn lowered_generator_is_antisymmetric() {
        let gen = LorentzGenerator::new(Vector3::new(0.1, -0.2, 0.3), Vector3::new(0.4, 0.5, -0.6));
        let w = gen.lowered();
        assert!((w + w.transpose()).amax() < 1e-15);
    }
}
