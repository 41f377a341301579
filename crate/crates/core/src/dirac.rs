//! Dirac-operator toolkit on a foliation sector `n`.
//!
//! The gamma matrices are the standard Dirac-representation matrices
//! with `gamma^0 = diag(1, 1, -1, -1)` and `gamma^k = [[0, -s_k], [s_k, 0]]`,
//! so that `{gamma^mu, gamma^nu} = -2 g^{mu nu}` for `g = diag(-1, 1, 1, 1)`.
//! Hence `(gamma.n)^2 = +1` and `(gamma^5)^2 = +1` for unit timelike `n`.
//! Contractions `gamma.v = gamma^mu v_mu` use the lowered components.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::LazyLock;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::minkowski::{dot, FourVector, LorentzMatrix, METRIC, UNIT_TOL};
use crate::sl2c::{canonical_boost_unchecked, sigma, spinor_map, Rep, SL2CElement};
use crate::little_group::wigner_d;
use crate::C64;

/// Tolerance used when sorting and comparing spectra.
pub const EIGEN_TOL: f64 = 1e-9;

const I: C64 = C64::new(0.0, 1.0);

/// A complex 4x4 matrix acting on four-spinors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracOperator(Matrix4<C64>);

impl DiracOperator {
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        if m.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(Self(m))
        } else {
            Err(Error::InvalidParameter("non-finite operator entries".into()))
        }
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn zero() -> Self {
        Self(Matrix4::zeros())
    }

    pub fn scalar(s: f64) -> Self {
        Self(Matrix4::identity() * C64::from(s))
    }

    /// `[[a, b], [c, d]]` from 2x2 blocks.
    pub fn from_blocks(a: &Matrix2<C64>, b: &Matrix2<C64>, c: &Matrix2<C64>, d: &Matrix2<C64>) -> Self {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
        Self(m)
    }

    /// `diag(a, a)`.
    pub fn block_diagonal(a: &Matrix2<C64>) -> Self {
        let z = Matrix2::zeros();
        Self::from_blocks(a, &z, &z, a)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.0.try_inverse().map(Self)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0 * s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(self.0 * other.0 - other.0 * self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(self.0 * other.0 + other.0 * self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Deviation from the nearest multiple of the identity.
    pub fn scalar_deviation(&self) -> f64 {
        let mean = self.0.trace() / C64::from(4.0);
        self.max_abs_diff(&Self(Matrix4::identity() * mean))
    }

    /// Eigenvalues sorted by real part, then imaginary part
    /// (ties within [`EIGEN_TOL`]).
    pub fn eigenvalues_sorted(&self) -> Vec<C64> {
        let schur = self.0.schur();
        let (_, t) = schur.unpack();
        let mut values: Vec<C64> = (0..4).map(|i| t[(i, i)]).collect();
        values.sort_by(|a, b| {
            if (a.re - b.re).abs() > EIGEN_TOL {
                a.re.total_cmp(&b.re)
            } else {
                a.im.total_cmp(&b.im)
            }
        });
        values
    }

    pub fn apply(&self, psi: &Vector4<C64>) -> Vector4<C64> {
        self.0 * psi
    }
}

impl Add for DiracOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for DiracOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for DiracOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<f64> for DiracOperator {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * C64::from(rhs))
    }
}

impl Neg for DiracOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl std::iter::Sum for DiracOperator {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// Which light cone a unit timelike `n` lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    Future,
    Past,
}

impl Cone {
    /// The `-/+` sign attached to the sector norm.
    pub fn norm_sign(self) -> f64 {
        match self {
            Cone::Future => -1.0,
            Cone::Past => 1.0,
        }
    }
}

/// Accepts unit timelike `n` in either cone.
pub fn cone_of(n: &FourVector) -> Result<Cone> {
    let norm = dot(n, n);
    if !n.is_finite() || (norm + 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidFoliation { norm, t: n.t() });
    }
    Ok(if n.t() > 0.0 { Cone::Future } else { Cone::Past })
}

fn build_gamma(mu: usize) -> DiracOperator {
    let z = Matrix2::zeros();
    if mu == 0 {
        let id = Matrix2::identity();
        DiracOperator::from_blocks(&id, &z, &z, &-id)
    } else {
        let s = sigma(mu);
        DiracOperator::from_blocks(&z, &-s, &s, &z)
    }
}

static GAMMA: LazyLock<[DiracOperator; 4]> = LazyLock::new(|| std::array::from_fn(build_gamma));

/// `gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3`.
static GAMMA5: LazyLock<DiracOperator> = LazyLock::new(|| (GAMMA[0] * GAMMA[1] * GAMMA[2] * GAMMA[3]).scale(I));

/// `Sigma^{mu nu} = (i/4) [gamma^mu, gamma^nu]`.
static SIGMA: LazyLock<[[DiracOperator; 4]; 4]> =
    LazyLock::new(|| std::array::from_fn(|mu| std::array::from_fn(|nu| GAMMA[mu].commutator(&GAMMA[nu]).scale(I * 0.25))));

pub fn gamma(mu: usize) -> DiracOperator {
    GAMMA[mu]
}

/// `gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3`.
pub fn gamma5() -> DiracOperator {
    *GAMMA5
}

/// `gamma.v = gamma^mu v_mu`.
pub fn gamma_dot(v: &FourVector) -> DiracOperator {
    let lower = v.lower();
    (0..4).map(|mu| gamma(mu) * lower[mu]).sum()
}

/// `Sigma^{mu nu} = (i/4) [gamma^mu, gamma^nu]`.
pub fn sigma_munu(mu: usize, nu: usize) -> DiracOperator {
    SIGMA[mu][nu]
}

/// `K^mu = Sigma^{mu nu} n_nu`.
pub fn k_vec(mu: usize, n: &FourVector) -> DiracOperator {
    let lower = n.lower();
    (0..4).map(|nu| sigma_munu(mu, nu) * lower[nu]).sum()
}

/// `K.v = K^mu v_mu`.
pub fn k_dot(v: &FourVector, n: &FourVector) -> DiracOperator {
    let lower = v.lower();
    (0..4).map(|mu| k_vec(mu, n) * lower[mu]).sum()
}

/// `Sigma_n^{mu nu} = Sigma^{mu nu} + K^mu n^nu - K^nu n^mu`.
pub fn sigma_n(mu: usize, nu: usize, n: &FourVector) -> DiracOperator {
    sigma_munu(mu, nu) + k_vec(mu, n) * n[nu] - k_vec(nu, n) * n[mu]
}

/// All `K^mu` for one `n`.
pub fn k_table(n: &FourVector) -> [DiracOperator; 4] {
    std::array::from_fn(|mu| k_vec(mu, n))
}

/// All `Sigma_n^{mu nu}` for one `n`.
pub fn sigma_n_table(n: &FourVector) -> [[DiracOperator; 4]; 4] {
    let k = k_table(n);
    std::array::from_fn(|mu| std::array::from_fn(|nu| sigma_munu(mu, nu) + k[mu] * n[nu] - k[nu] * n[mu]))
}

/// `pi^{mu nu} = g^{mu nu} + n^mu n^nu`.
pub fn projector(mu: usize, nu: usize, n: &FourVector) -> f64 {
    let g = if mu == nu { METRIC[mu] } else { 0.0 };
    g + n[mu] * n[nu]
}

/// `gamma_n^mu = gamma_lambda pi^{lambda mu} = gamma^mu + (gamma.n) n^mu`.
pub fn gamma_n(mu: usize, n: &FourVector) -> DiracOperator {
    (0..4).map(|l| gamma(l) * (METRIC[l] * projector(l, mu, n))).sum()
}

/// `(i/4) [gamma_n^mu, gamma_n^nu]`, the projected form of `Sigma_n`.
pub fn sigma_n_projected(mu: usize, nu: usize, n: &FourVector) -> DiracOperator {
    gamma_n(mu, n).commutator(&gamma_n(nu, n)).scale(I * 0.25)
}

/// `K_L = -(p.n)(gamma.n)`.
pub fn k_l(p: &FourVector, n: &FourVector) -> DiracOperator {
    gamma_dot(n) * -dot(p, n)
}

/// `K_T = -2i gamma^5 (p.K)(gamma.n)`.
pub fn k_t(p: &FourVector, n: &FourVector) -> DiracOperator {
    (gamma5() * k_dot(p, n) * gamma_dot(n)).scale(-2.0 * I)
}

/// `(1/2)(gamma.p + gamma.n gamma.p gamma.n)`.
pub fn k_l_symmetrized(p: &FourVector, n: &FourVector) -> DiracOperator {
    let (gp, gn) = (gamma_dot(p), gamma_dot(n));
    (gp + gn * gp * gn) * 0.5
}

/// `(1/2) gamma^5 (gamma.p - gamma.n gamma.p gamma.n)`.
pub fn k_t_symmetrized(p: &FourVector, n: &FourVector) -> DiracOperator {
    let (gp, gn) = (gamma_dot(p), gamma_dot(n));
    gamma5() * (gp - gn * gp * gn) * 0.5
}

/// `(K_T^2 - K_L^2) / 2M`.
pub fn free_k0(p: &FourVector, n: &FourVector, mass: f64) -> Result<DiracOperator> {
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let (kt, kl) = (k_t(p, n), k_l(p, n));
    Ok((kt * kt - kl * kl) * (1.0 / (2.0 * mass)))
}

/// Electromagnetic field with charge and mass parameter. Components are
/// stored lowered: `F_{i0} = E_i`, `F_{ij} = eps_{ijk} B_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldTensor {
    f: [[f64; 4]; 4],
    pub charge: f64,
    pub mass: f64,
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl FieldTensor {
    pub fn new(e: Vector3<f64>, b: Vector3<f64>, charge: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let mut f = [[0.0; 4]; 4];
        for i in 0..3 {
            f[i + 1][0] = e[i];
            f[0][i + 1] = -e[i];
            for j in 0..3 {
                f[i + 1][j + 1] = (0..3).map(|k| levi_civita(i, j, k) * b[k]).sum();
            }
        }
        Ok(Self { f, charge, mass })
    }

    /// `F_{mu nu}`.
    pub fn lower(&self, mu: usize, nu: usize) -> f64 {
        self.f[mu][nu]
    }

    /// `(F_n)_{mu nu} = pi_mu^a pi_nu^b F_{ab}`.
    pub fn projected(&self, n: &FourVector) -> Self {
        let nl = n.lower();
        // pi_mu^a = delta_mu^a + n_mu n^a
        let pi = |mu: usize, a: usize| (if mu == a { 1.0 } else { 0.0 }) + nl[mu] * n[a];
        let mut f = [[0.0; 4]; 4];
        for (mu, row) in f.iter_mut().enumerate() {
            for (nu, slot) in row.iter_mut().enumerate() {
                *slot = (0..4)
                    .flat_map(|a| (0..4).map(move |b| (a, b)))
                    .map(|(a, b)| pi(mu, a) * pi(nu, b) * self.f[a][b])
                    .sum();
            }
        }
        Self { f, ..*self }
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.f[i][j] == -self.f[j][i]))
    }
}

/// `Sigma_n^{mu nu} F_{mu nu}` summed over all index pairs.
fn contract_sigma_n(n: &FourVector, field: &FieldTensor) -> DiracOperator {
    (0..4)
        .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
        .filter(|&(mu, nu)| field.lower(mu, nu) != 0.0)
        .map(|(mu, nu)| sigma_n(mu, nu, n) * field.lower(mu, nu))
        .sum()
}

/// `(p.p / 2M) + (e / 2M) Sigma_n^{mu nu} (F_n)_{mu nu}`.
pub fn spin_hamiltonian(p_kinetic: &FourVector, n: &FourVector, field: &FieldTensor) -> Result<DiracOperator> {
    cone_of(n)?;
    let kinetic = DiracOperator::scalar(dot(p_kinetic, p_kinetic) / (2.0 * field.mass));
    Ok(kinetic + spin_coupling_term(n, field))
}

/// Only the spin part of [`spin_hamiltonian`].
pub fn spin_coupling_term(n: &FourVector, field: &FieldTensor) -> DiracOperator {
    contract_sigma_n(n, &field.projected(n)) * (field.charge / (2.0 * field.mass))
}

/// `-i e gamma^5 (K^mu n^nu - K^nu n^mu) F_{mu nu}`.
pub fn dipole_rhs(n: &FourVector, field: &FieldTensor) -> Result<DiracOperator> {
    cone_of(n)?;
    let sum: DiracOperator = (0..4)
        .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
        .map(|(mu, nu)| (k_vec(mu, n) * n[nu] - k_vec(nu, n) * n[mu]) * field.lower(mu, nu))
        .sum();
    Ok((gamma5() * sum).scale(-I * field.charge))
}

/// `eta = -/+ gamma^0 (gamma.n)`, Hermitian and positive for either cone.
pub fn sector_metric(n: &FourVector) -> Result<DiracOperator> {
    let cone = cone_of(n)?;
    Ok(gamma(0) * gamma_dot(n) * cone.norm_sign())
}

/// `max |eta O - O^dagger eta|`; zero iff `O` is Hermitian in the sector product.
pub fn sector_hermiticity_deviation(op: &DiracOperator, n: &FourVector) -> Result<f64> {
    let eta = sector_metric(n)?;
    Ok((eta * *op).max_abs_diff(&(op.adjoint() * eta)))
}

/// A complementary pair of projections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionPair {
    pub plus: DiracOperator,
    pub minus: DiracOperator,
}

impl ProjectionPair {
    fn from_sign_operator(op: DiracOperator, sign: f64) -> Self {
        let id = DiracOperator::identity();
        Self {
            plus: (id + op * sign) * 0.5,
            minus: (id - op * sign) * 0.5,
        }
    }

    /// Largest deviation from idempotence, completeness and orthogonality.
    pub fn defect(&self) -> f64 {
        let id = DiracOperator::identity();
        [
            (self.plus * self.plus).max_abs_diff(&self.plus),
            (self.minus * self.minus).max_abs_diff(&self.minus),
            (self.plus + self.minus).max_abs_diff(&id),
            (self.plus * self.minus).max_abs(),
            (self.minus * self.plus).max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projections {
    /// `(1 -/+ gamma.n) / 2`.
    pub sector: ProjectionPair,
    /// `(1 -/+ sign(p.n)) / 2`.
    pub energy: ProjectionPair,
    /// `(1 +/- 2i gamma^5 K.p / sqrt(p^2 + (p.n)^2)) / 2`.
    pub transverse: ProjectionPair,
}

/// `2i gamma^5 K.p / sqrt(p^2 + (p.n)^2)`.
pub fn helicity_operator(p: &FourVector, n: &FourVector) -> Result<DiracOperator> {
    let pn = dot(p, n);
    let t2 = dot(p, p) + pn * pn;
    let scale = p.max_abs().powi(2).max(f64::MIN_POSITIVE);
    if t2 <= 1e-12 * scale {
        return Err(Error::DegenerateTransverse(t2));
    }
    Ok((gamma5() * k_dot(p, n)).scale(2.0 * I / t2.sqrt()))
}

pub fn projections(p: &FourVector, n: &FourVector) -> Result<Projections> {
    cone_of(n)?;
    let pn = dot(p, n);
    if pn.abs() <= 1e-12 * p.max_abs() || pn == 0.0 {
        return Err(Error::UndefinedEnergySign);
    }
    let id = DiracOperator::identity();
    Ok(Projections {
        sector: ProjectionPair::from_sign_operator(gamma_dot(n), -1.0),
        energy: ProjectionPair::from_sign_operator(id * pn.signum(), -1.0),
        transverse: ProjectionPair::from_sign_operator(helicity_operator(p, n)?, 1.0),
    })
}

/// Two-component amplitudes of the first and second representation on a sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSpinorPair {
    pub psi: Vector2<C64>,
    pub phi: Vector2<C64>,
    pub n: FourVector,
}

impl TwoSpinorPair {
    pub fn new(psi: [C64; 2], phi: [C64; 2], n: FourVector) -> Result<Self> {
        cone_of(&n)?;
        Ok(Self {
            psi: Vector2::new(psi[0], psi[1]),
            phi: Vector2::new(phi[0], phi[1]),
            n,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.norm_squared() + self.phi.norm_squared()
    }

    /// Both amplitudes rotate by `D(A, n')` and `n` moves to `n' = Phi(A) n`.
    pub fn transform(&self, a: &SL2CElement) -> Result<Self> {
        let phi_a = spinor_map(a)?;
        let n = phi_a.apply(&self.n);
        let n = n * (1.0 / (-dot(&n, &n)).sqrt());
        let d = match cone_of(&n)? {
            Cone::Future => wigner_d(a, &n)?,
            Cone::Past => wigner_d(a, &-n)?,
        };
        Ok(Self {
            psi: d.apply(&self.psi),
            phi: d.apply(&self.phi),
            n,
        })
    }
}

/// Four-spinor tagged with its sector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourSpinor {
    pub components: Vector4<C64>,
    pub n: FourVector,
    pub cone: Cone,
}

impl FourSpinor {
    pub fn new(components: [C64; 4], n: FourVector) -> Result<Self> {
        let cone = cone_of(&n)?;
        Ok(Self {
            components: Vector4::from(components),
            n,
            cone,
        })
    }
}

/// `C = (1/sqrt 2) [[1, 1], [-1, 1]]` in 2x2 blocks.
fn assembly_matrix() -> DiracOperator {
    let id = Matrix2::identity() * C64::from(std::f64::consts::FRAC_1_SQRT_2);
    DiracOperator::from_blocks(&id, &id, &-id, &id)
}

/// `C (L(n) psi, L(n)^-1 phi)`; past-cone sectors use `L(-n)`.
pub fn assemble_spinor(pair: &TwoSpinorPair) -> FourSpinor {
    let cone = cone_of(&pair.n).unwrap_or(Cone::Future);
    let future = match cone {
        Cone::Future => pair.n,
        Cone::Past => -pair.n,
    };
    let l = canonical_boost_unchecked(&future);
    let upper = l.matrix() * pair.psi;
    let lower = l.inverse().matrix() * pair.phi;
    let stacked = Vector4::new(upper[0], upper[1], lower[0], lower[1]);
    FourSpinor {
        components: assembly_matrix().apply(&stacked),
        n: pair.n,
        cone,
    }
}

/// `-/+ psi-bar (gamma.n) psi` with `psi-bar = psi^dagger gamma^0`.
pub fn sector_norm(psi: &FourSpinor) -> f64 {
    let op = gamma(0) * gamma_dot(&psi.n);
    let value = psi.components.dotc(&op.apply(&psi.components));
    psi.cone.norm_sign() * value.re
}

/// `S(A) = C diag(A, (A^dagger)^-1) C^T`, so that
/// `S^-1 gamma^mu S = Lambda^mu_nu gamma^nu`.
pub fn s_lambda(a: &SL2CElement) -> Result<DiracOperator> {
    if a.rep() != Rep::First {
        return Err(Error::WrongRepresentation { expected: Rep::First, found: a.rep() });
    }
    let z = Matrix2::zeros();
    let a_bar = a.adjoint().try_inverse().expect("unimodular matrices are invertible");
    let c = assembly_matrix();
    Ok(c * DiracOperator::from_blocks(a.matrix(), &z, &z, &a_bar) * DiracOperator(c.0.transpose()))
}

/// `sum_{mu nu} w_{mu nu} Sigma^{mu nu}` for a lowered generator.
pub fn sigma_generator(omega: &Matrix4<f64>) -> DiracOperator {
    (0..4)
        .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
        .map(|(mu, nu)| sigma_munu(mu, nu) * omega[(mu, nu)])
        .sum()
}

/// `max_{l,s} |S^-1 Sigma_{Lambda n}^{mu nu} S Lambda_mu^l Lambda_nu^s - Sigma_n^{l s}|`,
/// where `Lambda_mu^l = (Lambda^-1)^l_mu`.
pub fn sigma_n_covariance_deviation(a: &SL2CElement, n: &FourVector) -> Result<f64> {
    let lambda: LorentzMatrix = spinor_map(a)?;
    let inv = lambda.inverse();
    let s = s_lambda(a)?;
    let s_inv = s.try_inverse().expect("S(A) is invertible");
    let moved = sigma_n_table(&lambda.apply(n));
    let reference = sigma_n_table(n);
    let conj: Vec<Vec<DiracOperator>> = (0..4).map(|mu| (0..4).map(|nu| s_inv * moved[mu][nu] * s).collect()).collect();
    let mut worst: f64 = 0.0;
    for l in 0..4 {
        for sg in 0..4 {
            let total: DiracOperator = (0..4)
                .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
                .map(|(mu, nu)| conj[mu][nu] * (inv.matrix()[(l, mu)] * inv.matrix()[(sg, nu)]))
                .sum();
            worst = worst.max(total.max_abs_diff(&reference[l][sg]));
        }
    }
    Ok(worst)
}

/// Commutator relations of the `(K, Sigma_n)` algebra: the derived closed
/// forms and the alternative literal transcriptions, each as the worst
/// deviation over all index combinations.
pub mod algebra {
    use super::*;

    fn pi(a: usize, b: usize, n: &FourVector) -> f64 {
        projector(a, b, n)
    }

    /// `[K^mu, K^nu] = -i Sigma_n^{mu nu}`.
    pub fn kk_deviation(n: &FourVector) -> f64 {
        let (k, table) = (k_table(n), sigma_n_table(n));
        pairs()
            .map(|(a, b)| k[a].commutator(&k[b]).max_abs_diff(&table[a][b].scale(-I)))
            .fold(0.0, f64::max)
    }

    /// `[Sigma_n^{mu nu}, K^l] = i (pi^{mu l} K^nu - pi^{nu l} K^mu)`.
    pub fn sigma_k_deviation(n: &FourVector) -> f64 {
        let (k, table) = (k_table(n), sigma_n_table(n));
        triples()
            .map(|(a, b, l)| {
                let lhs = table[a][b].commutator(&k[l]);
                let rhs = (k[b] * pi(a, l, n) - k[a] * pi(b, l, n)).scale(I);
                lhs.max_abs_diff(&rhs)
            })
            .fold(0.0, f64::max)
    }

    /// Literal form `-i[(g^{ml} + n^n n^l) K^m - (g^{ml} + n^m n^l) K^n]`.
    pub fn sigma_k_literal_deviation(n: &FourVector) -> f64 {
        let (k, table) = (k_table(n), sigma_n_table(n));
        triples()
            .map(|(a, b, l)| {
                let g = if a == l { METRIC[a] } else { 0.0 };
                let lhs = table[a][b].commutator(&k[l]);
                let rhs = (k[a] * (g + n[b] * n[l]) - k[b] * (g + n[a] * n[l])).scale(-I);
                lhs.max_abs_diff(&rhs)
            })
            .fold(0.0, f64::max)
    }

    /// `[S^{mn}, S^{ls}] = i (pi^{ml} S^{ns} - pi^{nl} S^{ms} - pi^{ms} S^{nl} + pi^{ns} S^{ml})`.
    pub fn sigma_sigma_deviation(n: &FourVector) -> f64 {
        let table = sigma_n_table(n);
        quads()
            .map(|(a, b, c, d)| {
                let lhs = table[a][b].commutator(&table[c][d]);
                let rhs = (table[b][d] * pi(a, c, n) - table[a][d] * pi(b, c, n) - table[b][c] * pi(a, d, n)
                    + table[a][c] * pi(b, d, n))
                .scale(I);
                lhs.max_abs_diff(&rhs)
            })
            .fold(0.0, f64::max)
    }

    /// Literal form `-i[pi^{nl} S^{ms} + pi^{sm} S^{ln} - pi^{ml} S^{ns} + pi^{sn} S^{ln}]`.
    pub fn sigma_sigma_literal_deviation(n: &FourVector) -> f64 {
        let table = sigma_n_table(n);
        quads()
            .map(|(a, b, c, d)| {
                let lhs = table[a][b].commutator(&table[c][d]);
                let rhs = (table[a][d] * pi(b, c, n) + table[c][b] * pi(d, a, n) - table[b][d] * pi(a, c, n)
                    + table[c][b] * pi(d, b, n))
                .scale(-I);
                lhs.max_abs_diff(&rhs)
            })
            .fold(0.0, f64::max)
    }

    fn pairs() -> impl Iterator<Item = (usize, usize)> {
        (0..4).flat_map(|a| (0..4).map(move |b| (a, b)))
    }

    fn triples() -> impl Iterator<Item = (usize, usize, usize)> {
        pairs().flat_map(|(a, b)| (0..4).map(move |c| (a, b, c)))
    }

    fn quads() -> impl Iterator<Item = (usize, usize, usize, usize)> {
        pairs().flat_map(|(a, b)| pairs().map(move |(c, d)| (a, b, c, d)))
    }
}
