//! Four-vectors with metric `diag(-1, 1, 1, 1)` and proper orthochronous
//! Lorentz matrices.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::Rng;

use crate::error::{Error, Result};

/// The Minkowski metric `g_{mu nu} = g^{mu nu}`.
pub const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance on `Lambda^T g Lambda = g`, relative to the largest entry squared.
pub const LORENTZ_TOL: f64 = 1e-12;

/// Tolerance used when classifying null vectors.
pub const LIGHTLIKE_TOL: f64 = 1e-12;

/// Tolerance accepted on `n.n = -1` for foliation vectors.
pub const UNIT_TOL: f64 = 1e-9;

/// Largest rapidity produced by the random generators.
pub const MAX_RANDOM_RAPIDITY: f64 = 3.0;

pub fn metric_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(METRIC))
}

/// Contravariant four-vector `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector(Vector4<f64>);

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self(Vector4::new(t, x, y, z))
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self(Vector4::from(c))
    }

    pub fn from_time_space(t: f64, space: Vector3<f64>) -> Self {
        Self::new(t, space.x, space.y, space.z)
    }

    /// The rest point `n0 = (1, 0, 0, 0)` of the orbit.
    pub const fn rest() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn basis(mu: usize) -> Self {
        let mut c = [0.0; 4];
        c[mu] = 1.0;
        Self::from_array(c)
    }

    /// Unit timelike vector reached from `n0` by a boost of the given
    /// rapidity along `direction` (normalized internally).
    pub fn unit_timelike(rapidity: f64, direction: Vector3<f64>) -> Self {
        let norm = direction.norm();
        let d = if norm > 0.0 { direction / norm } else { Vector3::zeros() };
        Self::from_time_space(rapidity.cosh(), d * rapidity.sinh())
    }

    pub fn t(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    /// Covariant components `v_mu = g_{mu nu} v^nu`.
    pub fn lower(&self) -> [f64; 4] {
        [-self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        dot(self, other)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Checks that `self` is a valid foliation vector: `n.n = -1` within
    /// [`UNIT_TOL`] and `n^0 > 0`.
    pub fn check_foliation(&self) -> Result<()> {
        let norm = self.dot(self);
        if !self.is_finite() || (norm + 1.0).abs() > UNIT_TOL || self.t() <= 0.0 {
            return Err(Error::InvalidFoliation { norm, t: self.t() });
        }
        Ok(())
    }
}

impl Index<usize> for FourVector {
    type Output = f64;

    fn index(&self, mu: usize) -> &f64 {
        &self.0[mu]
    }
}

impl Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 + rhs.0)
    }
}

impl Sub for FourVector {
    type Output = FourVector;

    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 - rhs.0)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;

    fn mul(self, rhs: f64) -> FourVector {
        FourVector(self.0 * rhs)
    }
}

impl Neg for FourVector {
    type Output = FourVector;

    fn neg(self) -> FourVector {
        FourVector(-self.0)
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// Minkowski product `-a^0 b^0 + a.b`.
pub fn dot(a: &FourVector, b: &FourVector) -> f64 {
    -a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] + a.0[3] * b.0[3]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalClass {
    TimelikeFuture,
    TimelikePast,
    Spacelike,
    /// Null vectors, including the zero vector.
    Lightlike,
}

pub fn classify(v: &FourVector) -> CausalClass {
    let scale = v.max_abs().powi(2);
    let s = dot(v, v);
    if scale == 0.0 || s.abs() <= LIGHTLIKE_TOL * scale {
        CausalClass::Lightlike
    } else if s > 0.0 {
        CausalClass::Spacelike
    } else if v.t() > 0.0 {
        CausalClass::TimelikeFuture
    } else {
        CausalClass::TimelikePast
    }
}

/// A proper orthochronous Lorentz transformation `Lambda^mu_nu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    /// Validates `Lambda^T g Lambda = g`, `det = 1` and `Lambda^0_0 >= 1`.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let candidate = Self(m);
        let scale = m.iter().fold(1.0_f64, |a, x| a.max(x.abs())).powi(2);
        let dev = candidate.metric_deviation();
        if !m.iter().all(|x| x.is_finite()) || dev > LORENTZ_TOL * scale {
            return Err(Error::NotLorentz(format!("metric deviation {dev:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > LORENTZ_TOL * scale * scale {
            return Err(Error::NotLorentz(format!("determinant {det}")));
        }
        if m[(0, 0)] < 1.0 - LORENTZ_TOL * scale {
            return Err(Error::NotLorentz(format!("Lambda^0_0 = {}", m[(0, 0)])));
        }
        Ok(candidate)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Boost with rapidity `rapidity` along the unit vector `axis`.
    pub fn boost(rapidity: f64, axis: Vector3<f64>) -> Self {
        pure_boost_unchecked(&FourVector::unit_timelike(rapidity, axis))
    }

    /// Active rotation by `angle` about `axis` (right-handed).
    pub fn rotation(angle: f64, axis: Vector3<f64>) -> Self {
        let r = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        Self::from_rotation(r.matrix())
    }

    pub fn from_rotation(r: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        apply(self, v)
    }

    /// `Lambda^{-1} = g Lambda^T g`.
    pub fn inverse(&self) -> Self {
        let g = metric_matrix();
        Self(g * self.0.transpose() * g)
    }

    pub fn compose(&self, rhs: &LorentzMatrix) -> Self {
        Self(self.0 * rhs.0)
    }

    /// Largest entry of `|Lambda^T g Lambda - g|`.
    pub fn metric_deviation(&self) -> f64 {
        let g = metric_matrix();
        (self.0.transpose() * g * self.0 - g).amax()
    }

    /// Spatial 3x3 block.
    pub fn spatial_block(&self) -> Matrix3<f64> {
        self.0.fixed_view::<3, 3>(1, 1).into_owned()
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;

    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        self.compose(&rhs)
    }
}

pub fn apply(lambda: &LorentzMatrix, v: &FourVector) -> FourVector {
    FourVector(lambda.0 * v.0)
}

/// The symmetric boost taking `n0 = (1, 0, 0, 0)` to `n`.
pub fn pure_boost(n: &FourVector) -> Result<LorentzMatrix> {
    n.check_foliation()?;
    Ok(pure_boost_unchecked(n))
}

fn pure_boost_unchecked(n: &FourVector) -> LorentzMatrix {
    let gamma = n.t();
    let u = n.spatial();
    if u == Vector3::zeros() {
        return LorentzMatrix::identity();
    }
    let mut m = Matrix4::zeros();
    m[(0, 0)] = gamma;
    for i in 0..3 {
        m[(0, i + 1)] = u[i];
        m[(i + 1, 0)] = u[i];
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[(i + 1, j + 1)] = delta + u[i] * u[j] / (1.0 + gamma);
        }
    }
    LorentzMatrix(m)
}

/// Deterministic random proper orthochronous transformation: a random
/// rotation followed by a boost of rapidity at most [`MAX_RANDOM_RAPIDITY`].
pub fn random_proper_lorentz(seed: u64) -> LorentzMatrix {
    let mut sampler = crate::sampling::Sampler::new(seed);
    sampler.lorentz()
}

pub(crate) fn random_lorentz_with<R: Rng>(rng: &mut R) -> LorentzMatrix {
    let axis = crate::sampling::unit_vector(rng);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let rotation = LorentzMatrix::rotation(angle, axis);
    let boost_dir = crate::sampling::unit_vector(rng);
    let rapidity = rng.random_range(0.0..MAX_RANDOM_RAPIDITY);
    rotation * LorentzMatrix::boost(rapidity, boost_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&FourVector::rest(), &FourVector::rest()), -1.0);
        let v = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(dot(&v, &v), 0.0);
        let p = FourVector::new(5.0, 3.0, 0.0, 0.0);
        assert_eq!(dot(&p, &p), -16.0);
        assert_eq!((-dot(&p, &p)).sqrt(), 4.0);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&FourVector::new(1.0, 0.0, 0.0, 0.0)), CausalClass::TimelikeFuture);
        assert_eq!(classify(&FourVector::new(-2.0, 0.0, 0.0, 1.0)), CausalClass::TimelikePast);
        assert_eq!(classify(&FourVector::new(0.0, 1.0, 0.0, 0.0)), CausalClass::Spacelike);
        assert_eq!(classify(&FourVector::new(3.0, 0.0, 3.0, 0.0)), CausalClass::Lightlike);
        assert_eq!(classify(&FourVector::zero()), CausalClass::Lightlike);
    }

    #[test]
    fn z_boost_on_rest_vector() {
        let w = 0.7_f64;
        let b = LorentzMatrix::boost(w, Vector3::z());
        let v = b.apply(&FourVector::rest());
        assert!((v - FourVector::new(w.cosh(), 0.0, 0.0, w.sinh())).max_abs() < 1e-15);
        assert_eq!(LorentzMatrix::identity().apply(&v), v);
    }

    #[test]
    fn pure_boost_of_rest_is_exact_identity() {
        assert_eq!(pure_boost(&FourVector::rest()).unwrap(), LorentzMatrix::identity());
    }

    #[test]
    fn pure_boost_along_z_matches_standard_matrix() {
        let w = 1.3_f64;
        let n = FourVector::new(w.cosh(), 0.0, 0.0, w.sinh());
        let b = pure_boost(&n).unwrap();
        let mut expected = Matrix4::identity();
        expected[(0, 0)] = w.cosh();
        expected[(3, 3)] = w.cosh();
        expected[(0, 3)] = w.sinh();
        expected[(3, 0)] = w.sinh();
        assert!((b.matrix() - expected).amax() < 1e-14);
    }

    #[test]
    fn pure_boost_rejects_bad_vectors() {
        assert!(pure_boost(&FourVector::new(2.0, 0.0, 0.0, 0.0)).is_err());
        assert!(pure_boost(&FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(pure_boost(&FourVector::new(0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn pure_boost_maps_rest_to_n_and_is_symmetric() {
        let mut s = Sampler::new(11);
        for _ in 0..200 {
            let n = s.unit_timelike();
            let b = pure_boost(&n).unwrap();
            assert!((b.apply(&FourVector::rest()) - n).max_abs() < 1e-10);
            assert!((b.matrix() - b.matrix().transpose()).amax() < 1e-15);
        }
    }

    #[test]
    fn random_lorentz_is_deterministic_and_valid() {
        assert_eq!(random_proper_lorentz(5), random_proper_lorentz(5));
        assert_ne!(random_proper_lorentz(5), random_proper_lorentz(6));
        for seed in 0..500 {
            let l = random_proper_lorentz(seed);
            assert!(l.metric_deviation() < 1e-12, "seed {seed}: {}", l.metric_deviation());
            assert!((l.matrix().determinant() - 1.0).abs() < 1e-12);
            assert!(l.matrix()[(0, 0)] >= 1.0);
            LorentzMatrix::new(*l.matrix()).unwrap();
        }
    }

    #[test]
    fn apply_preserves_dot() {
        let mut s = Sampler::new(3);
        for _ in 0..500 {
            let l = s.lorentz();
            let v = s.four_vector(2.0);
            let w = s.four_vector(2.0);
            let lv = l.apply(&v);
            let lw = l.apply(&w);
            assert!((dot(&lv, &lv) - dot(&v, &v)).abs() < 1e-10);
            assert!((dot(&lv, &lw) - dot(&v, &w)).abs() < 1e-10);
        }
    }

    #[test]
    fn constructor_rejects_improper_and_non_orthochronous() {
        let parity = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0));
        assert!(LorentzMatrix::new(parity).is_err());
        let time_rev = Matrix4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0));
        assert!(LorentzMatrix::new(time_rev).is_err());
        assert!(LorentzMatrix::new(Matrix4::identity() * 2.0).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let l = random_proper_lorentz(17);
        assert!((l * l.inverse()).max_abs_diff(&LorentzMatrix::identity()) < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec4() -> impl Strategy<Value = FourVector> {
            prop::array::uniform4(-10.0f64..10.0).prop_map(FourVector::from_array)
        }

        proptest! {
            #[test]
            fn dot_is_symmetric_and_bilinear(a in vec4(), b in vec4(), c in vec4(), k in -5.0f64..5.0) {
                prop_assert_eq!(dot(&a, &b), dot(&b, &a));
                let lhs = dot(&(a * k + b), &c);
                let rhs = k * dot(&a, &c) + dot(&b, &c);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())) * 100.0);
            }
        }
    }
}
