//! Seeded identity suites over the whole library.
//!
//! Each record reduces one identity to a dimensionless maximum deviation:
//! operator deviations are divided by the natural size of their inputs
//! (powers of `max |n^mu|`, `max |Lambda|`, `|p|`), so a single tolerance
//! applies across rapidities. A record passes iff `max_deviation <= tolerance`.

use nalgebra::{DMatrix, Matrix4, Vector3, SVD};
use serde::Serialize;

use crate::dirac::{self, algebra, DiracOperator, FieldTensor, TwoSpinorPair};
use crate::error::{Error, Result};
use crate::evolution::{self, GaussianShape, InvariantPotential, Model, MomentumPacket, PhasePoint};
use crate::little_group::{self, InducedPacketState, WignerRotation};
use crate::minkowski::{dot, FourVector, LorentzMatrix, METRIC};
use crate::palacios::{self, EmissionConfig};
use crate::sampling::Sampler;
use crate::sl2c::{self, sigma_dot, spinor_map, LorentzGenerator, SL2CElement};
use crate::spin_coupling::{self, couple_two, HalfInt, SpinState, Symmetry, TwoBodySpinState};
use crate::units::H_EV_FS;
use crate::C64;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws per sampled identity.
    pub samples: usize,
    /// Replaces every per-identity tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tolerance: None,
        }
    }
}

impl VerifyOptions {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn sampler(&self, suite: u64) -> Sampler {
        Sampler::new(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub id: &'static str,
    /// The identity in symbolic form.
    pub equation: &'static str,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub convention_flags: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub records: Vec<IdentityRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn record(&self, id: &str) -> Option<&IdentityRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

/// A sign or form convention that differs from the naive transcription,
/// with the value measured in this run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConventionFlag {
    pub id: &'static str,
    pub statement: &'static str,
    pub measured: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub convention_flags: Vec<ConventionFlag>,
}

impl VerificationReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &IdentityRecord)> {
        self.suites.iter().flat_map(|s| s.records.iter().filter(|r| !r.passed).map(move |r| (s.suite, r)))
    }
}

pub type SuiteFn = fn(&VerifyOptions) -> Result<SuiteReport>;

/// Registered suites in run order.
pub const SUITES: [(&str, SuiteFn); 7] = [
    ("operator_algebra", operator_algebra),
    ("little_group", little_group_suite),
    ("rest_frame", rest_frame),
    ("norms", norms),
    ("spin_coupling", spin_coupling_suite),
    ("evolution", evolution_suite),
    ("interference", interference),
];

pub fn run(options: &VerifyOptions) -> Result<VerificationReport> {
    options.validate()?;
    let suites = SUITES.iter().map(|(_, f)| f(options)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        seed: options.seed,
        samples: options.samples,
        passed: suites.iter().all(SuiteReport::passed),
        suites,
        convention_flags: convention_flags(options)?,
    })
}

pub fn run_suite(name: &str, options: &VerifyOptions) -> Result<SuiteReport> {
    options.validate()?;
    let (_, f) = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{name}'")))?;
    f(options)
}

struct Builder<'a> {
    options: &'a VerifyOptions,
    records: Vec<IdentityRecord>,
}

impl<'a> Builder<'a> {
    fn new(options: &'a VerifyOptions) -> Self {
        Self { options, records: Vec::new() }
    }

    fn push(&mut self, id: &'static str, equation: &'static str, samples: usize, max_deviation: f64, tolerance: f64, flags: &[&'static str]) {
        let tolerance = self.options.tolerance.unwrap_or(tolerance);
        self.records.push(IdentityRecord {
            id,
            equation,
            samples,
            max_deviation,
            tolerance,
            // NaN deviations fail
            passed: max_deviation <= tolerance,
            convention_flags: flags.to_vec(),
        });
    }

    fn finish(self, suite: &'static str) -> SuiteReport {
        SuiteReport { suite, records: self.records }
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

fn pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|a| (0..4).map(move |b| (a, b)))
}

fn lorentz_scale(lambda: &LorentzMatrix) -> f64 {
    lambda.matrix().amax()
}

/// Anticommutators, squares, commutators, transversality, covariance,
/// projections and sector hermiticity over random `(p, n, Lambda)`.
pub fn operator_algebra(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(1);
    let mut b = Builder::new(options);
    let count = options.samples;
    let draws: Vec<(FourVector, FourVector, SL2CElement)> = (0..count).map(|_| (s.four_vector(3.0), s.unit_timelike(), s.sl2c())).collect();

    let clifford = max_of(pairs().map(|(mu, nu)| {
        let expected = if mu == nu { -2.0 * METRIC[mu] } else { 0.0 };
        dirac::gamma(mu).anticommutator(&dirac::gamma(nu)).max_abs_diff(&DiracOperator::scalar(expected))
    }));
    b.push("clifford", "{gamma^mu, gamma^nu} = -2 g^{mu nu}", 16, clifford, 1e-12, &["gamma_sign"]);
    let g5 = (dirac::gamma5() * dirac::gamma5()).max_abs_diff(&DiracOperator::identity());
    b.push("gamma5_square", "(gamma^5)^2 = +1", 1, g5, 1e-12, &["gamma5_square"]);

    let gn = max_of(draws.iter().map(|(_, n, _)| {
        let g = dirac::gamma_dot(n);
        (g * g).max_abs_diff(&DiracOperator::identity()) / n.max_abs().powi(2)
    }));
    b.push("gamma_n_square", "(gamma.n)^2 = +1", count, gn, 1e-9, &["gamma_n_square"]);

    let kk = max_of(draws.iter().map(|(_, n, _)| algebra::kk_deviation(n) / n.max_abs().powi(6)));
    b.push("k_k_commutator", "[K^mu, K^nu] = -i Sigma_n^{mu nu}", count, kk, 1e-9, &[]);
    let sk = max_of(draws.iter().map(|(_, n, _)| algebra::sigma_k_deviation(n) / n.max_abs().powi(6)));
    b.push(
        "sigma_k_commutator",
        "[Sigma_n^{mu nu}, K^l] = i (pi^{mu l} K^nu - pi^{nu l} K^mu)",
        count,
        sk,
        1e-9,
        &["commutator_form"],
    );
    let ss = max_of(draws.iter().map(|(_, n, _)| algebra::sigma_sigma_deviation(n) / n.max_abs().powi(6)));
    b.push(
        "sigma_sigma_commutator",
        "[Sigma_n^{mu nu}, Sigma_n^{l s}] = i (pi^{mu l} Sigma^{nu s} - pi^{nu l} Sigma^{mu s} - pi^{mu s} Sigma^{nu l} + pi^{nu s} Sigma^{mu l})",
        count,
        ss,
        1e-9,
        &["commutator_form"],
    );

    let kn = max_of(draws.iter().map(|(_, n, _)| {
        let nl = n.lower();
        let contracted: DiracOperator = (0..4).map(|mu| dirac::k_vec(mu, n) * nl[mu]).sum();
        contracted.max_abs() / n.max_abs().powi(4)
    }));
    b.push("k_transverse", "K^mu n_mu = 0", count, kn, 1e-9, &[]);
    let ns = max_of(draws.iter().map(|(_, n, _)| {
        let nl = n.lower();
        let worst = max_of((0..4).map(|nu| (0..4).map(|mu| dirac::sigma_n(mu, nu, n) * nl[mu]).sum::<DiracOperator>().max_abs()));
        worst / n.max_abs().powi(5)
    }));
    b.push("sigma_n_transverse", "n_mu Sigma_n^{mu nu} = 0", count, ns, 1e-9, &[]);

    let kt_kl = max_of(draws.iter().map(|(p, n, _)| {
        let scale = (1.0 + p.max_abs().powi(2)) * n.max_abs().powi(4);
        dirac::k_t(p, n).commutator(&dirac::k_l(p, n)).max_abs() / scale
    }));
    b.push("kt_kl_commute", "[K_T, K_L] = 0", count, kt_kl, 1e-9, &[]);
    let kt_sq = max_of(draws.iter().map(|(p, n, _)| {
        let (kl, kt) = (dirac::k_l(p, n), dirac::k_t(p, n));
        let scale = (1.0 + p.max_abs().powi(2)) * n.max_abs().powi(4);
        (kt * kt - kl * kl).max_abs_diff(&DiracOperator::scalar(dot(p, p))) / scale
    }));
    b.push("kt_kl_squares", "K_T^2 - K_L^2 = p^2", count, kt_sq, 1e-9, &[]);

    let projected = max_of(draws.iter().map(|(_, n, _)| {
        max_of(pairs().map(|(mu, nu)| dirac::sigma_n(mu, nu, n).max_abs_diff(&dirac::sigma_n_projected(mu, nu, n)))) / n.max_abs().powi(6)
    }));
    b.push("sigma_n_projected", "Sigma_n^{mu nu} = (i/4) [gamma_n^mu, gamma_n^nu]", count, projected, 1e-9, &[]);

    let mut cov = 0.0f64;
    let mut s_cov = 0.0f64;
    for (_, n, a) in &draws {
        let lambda = spinor_map(a)?;
        let scale = lorentz_scale(&lambda);
        cov = max_of([cov, dirac::sigma_n_covariance_deviation(a, n)? / (scale.powi(4) * n.max_abs().powi(2))].into_iter());
        let sl = dirac::s_lambda(a)?;
        let inv = sl.try_inverse().ok_or_else(|| Error::InvalidParameter("singular S(Lambda)".into()))?;
        let worst = max_of((0..4).map(|mu| {
            let rotated: DiracOperator = (0..4).map(|nu| dirac::gamma(nu) * lambda.matrix()[(mu, nu)]).sum();
            (inv * dirac::gamma(mu) * sl).max_abs_diff(&rotated)
        }));
        s_cov = max_of([s_cov, worst / scale.powi(2)].into_iter());
    }
    b.push("sigma_n_covariance", "S^-1 Sigma_{Lambda n}^{mu nu} S Lambda^-1 Lambda^-1 = Sigma_n", count, cov, 1e-9, &[]);
    b.push("gamma_covariance", "S(Lambda)^-1 gamma^mu S(Lambda) = Lambda^mu_nu gamma^nu", count, s_cov, 1e-9, &[]);

    let mut proj = 0.0f64;
    for (p, n, _) in &draws {
        let pr = dirac::projections(p, n)?;
        let scale = n.max_abs().powi(4);
        let mut worst = max_of([pr.sector, pr.energy, pr.transverse].iter().map(|pair| pair.defect()));
        let ops = [pr.sector.plus, pr.energy.plus, pr.transverse.plus];
        for x in &ops {
            for y in &ops {
                worst = worst.max(x.commutator(y).max_abs());
            }
        }
        proj = max_of([proj, worst / scale].into_iter());
    }
    b.push(
        "projections",
        "P_+^2 = P_+, P_-^2 = P_-, P_+ P_- = 0, P_+ + P_- = 1 for sector, energy and transverse pairs",
        count,
        proj,
        1e-9,
        &[],
    );

    let mut herm = 0.0f64;
    for (p, n, _) in &draws {
        let field = FieldTensor::new(s.unit_vector(), s.unit_vector(), 0.7, 1.5)?;
        let scale = n.max_abs().powi(4) * (1.0 + p.max_abs());
        for op in [dirac::k_l(p, n), dirac::k_t(p, n), dirac::spin_hamiltonian(p, n, &field)?, dirac::dipole_rhs(n, &field)?] {
            herm = max_of([herm, dirac::sector_hermiticity_deviation(&op, n)? / scale].into_iter());
        }
    }
    b.push("sector_hermiticity", "eta O = O^dagger eta, eta = -gamma^0 (gamma.n)", count, herm, 1e-9, &[]);
    Ok(b.finish("operator_algebra"))
}

/// Orthogonal factor of the Euclidean polar decomposition.
fn polar_rotation(m: &Matrix4<f64>) -> Matrix4<f64> {
    let svd = SVD::new(*m, true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => Matrix4::from_element(f64::NAN),
    }
}

/// Wigner rotations: SU(2) membership, cocycle, collinear and orthogonal
/// boosts, and the generator action.
pub fn little_group_suite(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(2);
    let mut b = Builder::new(options);
    let count = options.samples;
    let n0 = FourVector::rest();

    let mut su2 = 0.0f64;
    let mut fixes = 0.0f64;
    let mut cocycle = 0.0f64;
    for _ in 0..count {
        let (a1, a2, n) = (s.sl2c(), s.sl2c(), s.unit_timelike());
        let d = little_group::wigner_d(&a1, &n)?;
        let m = d.matrix();
        let unitary = (m.adjoint() * m - nalgebra::Matrix2::identity()).camax();
        su2 = su2.max(unitary.max((m.determinant() - C64::new(1.0, 0.0)).norm()));
        fixes = fixes.max((d.so3().apply(&n0) - n0).max_abs());
        let lhs = little_group::wigner_d(&a1.mul(&a2)?, &n)?;
        let shifted = little_group::project_to_orbit(&spinor_map(&a1.inverse())?.apply(&n));
        let rhs = d.compose(&little_group::wigner_d(&a2, &shifted)?);
        cocycle = cocycle.max(lhs.max_abs_diff(&rhs));
    }
    b.push("su2_membership", "D^dagger D = 1, det D = 1", count, su2, 1e-10, &[]);
    b.push("fixes_rest_vector", "Lambda(D) n_0 = n_0", count, fixes, 1e-10, &[]);
    b.push("cocycle", "D(A1 A2, n) = D(A1, n) D(A2, Lambda(A1)^-1 n)", count, cocycle, 1e-9, &["spin_column_convention"]);

    let mut collinear = 0.0f64;
    for _ in 0..count {
        let axis = s.unit_vector();
        let n = FourVector::unit_timelike(s.uniform(-3.0, 3.0), axis);
        let boost = SL2CElement::boost(s.uniform(-3.0, 3.0), axis);
        collinear = collinear.max(little_group::wigner_d(&boost, &n)?.max_abs_diff(&WignerRotation::identity()));
    }
    b.push("collinear_boosts", "D(L_u(w1), L_u(w2) n_0) = 1", count, collinear, 1e-9, &[]);

    let mut polar = 0.0f64;
    for _ in 0..count {
        let (w1, w2) = (s.uniform(0.0, 3.0), s.uniform(0.0, 3.0));
        let u = s.unit_vector();
        let v = {
            let r = s.unit_vector();
            let perp = r - u * u.dot(&r);
            perp / perp.norm()
        };
        let a = SL2CElement::boost(w1, u).mul(&SL2CElement::boost(w2, v))?;
        let lambda = LorentzMatrix::boost(w1, u).compose(&LorentzMatrix::boost(w2, v));
        let d = little_group::wigner_d(&a, &n0)?;
        polar = polar.max((d.so3().matrix() - polar_rotation(lambda.matrix())).amax());
    }
    b.push("orthogonal_boosts_polar", "D(L_u L_v, n_0) = orthogonal polar factor of L_u L_v", count, polar, 1e-9, &[]);

    // Residual of the first-order generator action, ratio between eps = 1e-3 and 1e-4;
    // second order means the ratio is 100, i.e. log10 ratio 2.
    let trials = count.clamp(1, 100);
    let mut order_dev = 0.0f64;
    for _ in 0..trials {
        let spin = s.unit_complex_vector(2);
        let state = InducedPacketState::new(s.unit_timelike(), [spin[0], spin[1]], s.four_vector(2.0), s.four_vector(3.0), [0.5, 0.7, 0.9, 1.1])?;
        let generator = LorentzGenerator::new(s.unit_vector() * 0.7, s.unit_vector() * 0.5);
        let r1 = little_group::first_order_residual(&state, &generator, 1e-3)?;
        let r2 = little_group::first_order_residual(&state, &generator, 1e-4)?;
        order_dev = max_of([order_dev, ((r1 / r2).log10() - 2.0).abs()].into_iter());
    }
    b.push("generator_second_order", "|exp(eps G) psi - (1 + eps G) psi| = O(eps^2)", trials, order_dev, 0.5, &[]);
    Ok(b.finish("little_group"))
}

/// The `n -> n_0` reductions of the covariant spin operators.
pub fn rest_frame(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(3);
    let mut b = Builder::new(options);
    let n0 = FourVector::rest();

    let s0j = max_of((0..4).map(|j| dirac::sigma_n(0, j, &n0).max_abs()));
    b.push("sigma_n_0j_at_rest", "Sigma_{n0}^{0j} = 0", 4, s0j, 1e-12, &[]);
    let mut eig = 0.0f64;
    for (i, j) in [(1, 2), (2, 3), (3, 1)] {
        for (e, want) in dirac::sigma_n(i, j, &n0).eigenvalues_sorted().iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            eig = eig.max((e - C64::new(want, 0.0)).norm());
        }
    }
    b.push("sigma_n_ij_spectrum", "eigenvalues of Sigma_{n0}^{ij} = {-1/2, +1/2}", 3, eig, 1e-12, &[]);

    // limit sequence n_k -> n_0 with rapidity 2^-k along a random direction
    let trials = options.samples.clamp(1, 50);
    let mut final_dev = 0.0f64;
    for _ in 0..trials {
        let p = s.four_vector(2.0);
        let dir = p.spatial() / p.spatial().norm();
        let target = DiracOperator::block_diagonal(&sigma_dot(&dir)) * -1.0;
        let axis = s.unit_vector();
        let devs: Vec<f64> = (0..=40)
            .map(|k| {
                let n = FourVector::unit_timelike(0.5f64.powi(k), axis);
                dirac::helicity_operator(&p, &n).map(|h| h.max_abs_diff(&target))
            })
            .collect::<Result<_>>()?;
        // monotone down to the rounding floor
        let floor = 1e-13;
        let monotone = devs.windows(2).all(|w| w[1] <= w[0] || w[1] < floor);
        let last = devs[devs.len() - 1];
        final_dev = final_dev.max(if monotone { last } else { f64::INFINITY });
    }
    b.push(
        "helicity_limit",
        "2i gamma^5 K.p / sqrt(p^2 + (p.n)^2) -> -sigma.p/|p| block form as n -> n_0",
        trials,
        final_dev,
        1e-9,
        &["helicity_sign"],
    );

    let (e, m) = (0.8, 2.0);
    let bfield = s.unit_vector() * 1.7;
    let magnetic = FieldTensor::new(Vector3::zeros(), bfield, e, m)?;
    let coupling = dirac::spin_coupling_term(&n0, &magnetic).max_abs_diff(&(DiracOperator::block_diagonal(&sigma_dot(&bfield)) * (e / (2.0 * m))));
    b.push("spin_coupling_at_rest", "(e/4M) Sigma_n^{mu nu} F_{mu nu} = (e/2M) sigma.B at n_0", 1, coupling, 1e-12, &[]);
    let efield = s.unit_vector() * 1.3;
    let electric = FieldTensor::new(efield, Vector3::zeros(), e, m)?;
    let target = DiracOperator::block_diagonal(&sigma_dot(&efield)) * e;
    let dipole = dirac::dipole_rhs(&n0, &electric)?
        .max_abs_diff(&target)
        .max(dirac::dipole_rhs(&-n0, &electric)?.max_abs_diff(&target));
    b.push("dipole_at_rest", "dipole matrix = +e sigma.E at +-n_0", 2, dipole, 1e-12, &["dipole_sign"]);
    Ok(b.finish("rest_frame"))
}

/// Sector norm of assembled spinors and its Lorentz invariance.
pub fn norms(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(4);
    let mut b = Builder::new(options);
    let count = options.samples;
    let mut equality = 0.0f64;
    let mut invariance = 0.0f64;
    for _ in 0..count {
        let n = s.unit_timelike();
        for n in [n, -n] {
            let pair = TwoSpinorPair::new([s.complex(), s.complex()], [s.complex(), s.complex()], n)?;
            let norm = dirac::sector_norm(&dirac::assemble_spinor(&pair));
            let scale = pair.norm_sqr() * n.max_abs().powi(2);
            equality = max_of([equality, (norm - pair.norm_sqr()).abs() / scale].into_iter());
            let a = s.sl2c();
            let moved = dirac::sector_norm(&dirac::assemble_spinor(&pair.transform(&a)?));
            let lscale = lorentz_scale(&spinor_map(&a)?).powi(2);
            invariance = max_of([invariance, (moved - norm).abs() / (scale * lscale)].into_iter());
        }
    }
    b.push("norm_equality", "-+psi-bar (gamma.n) psi = |psi|^2 + |phi|^2", 2 * count, equality, 1e-10, &[]);
    b.push("norm_invariance", "||S(Lambda) psi||_{Lambda n} = ||psi||_n", 2 * count, invariance, 1e-10, &["spin_column_convention"]);
    Ok(b.finish("norms"))
}

fn to_dmatrix(m: &nalgebra::Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_iterator(2, 2, m.iter().copied())
}

/// Coupling on a common fiber: orthogonality, singlet invariance,
/// the pi-rotation/exchange relation and the fiber-match rule.
pub fn spin_coupling_suite(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(5);
    let mut b = Builder::new(options);
    let count = options.samples;
    let h = HalfInt::HALF;

    let spins = [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3), (5, 4), (6, 6)];
    let mut ortho = 0.0f64;
    for (a, c) in spins {
        let table = spin_coupling::cg_table(HalfInt::from_twice(a), HalfInt::from_twice(c))?;
        let m = &table.matrix;
        let id = DMatrix::<f64>::identity(m.ncols(), m.ncols());
        ortho = ortho.max((m.transpose() * m - &id).amax()).max((m * m.transpose() - &id).amax());
    }
    b.push("cg_orthogonality", "sum_{m1 m2} <m1 m2|J M><m1 m2|J' M'> = delta delta", spins.len(), ortho, 1e-12, &[]);

    let mut singlet_dev = 0.0f64;
    let mut pi_dev = 0.0f64;
    let r = to_dmatrix(&spin_coupling::pi_rotation_y());
    for _ in 0..count {
        let n = s.unit_timelike();
        let up = SpinState::basis(h, h, n, 0.0)?;
        let down = SpinState::basis(h, -h, n, 0.0)?;
        let singlet = couple_two(&up, &down, HalfInt::ZERO, HalfInt::ZERO)?;
        let d = to_dmatrix(little_group::wigner_d(&s.sl2c(), &n)?.matrix());
        let moved = TwoBodySpinState::new(h, h, singlet.apply_local(&d, &d), n, 0.0, Symmetry::None)?;
        let overlap = moved.overlap(&singlet);
        let phase = overlap / overlap.norm();
        singlet_dev = singlet_dev.max((moved.coefficients() - singlet.coefficients() * phase).camax()).max((overlap.norm() - 1.0).abs());

        // a (x) R a, and M = 0 combinations
        let a = s.unit_complex_vector(2);
        let a = nalgebra::DVector::from_vec(a);
        let ra = &r * &a;
        let product = TwoBodySpinState::new(h, h, &a * ra.transpose(), n, 0.0, Symmetry::None)?;
        let z = s.unit_complex_vector(2);
        let m0 = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), z[0], z[1], C64::new(0.0, 0.0)]);
        let m0 = TwoBodySpinState::new(h, h, m0, n, 0.0, Symmetry::None)?;
        for state in [&singlet, &product, &m0] {
            pi_dev = pi_dev.max(spin_coupling::pi_rotation_exchange_deviation(state)?);
        }
    }
    b.push("singlet_invariance", "(D (x) D) chi_0 = chi_0", count, singlet_dev, 1e-10, &[]);
    b.push(
        "pi_rotation_exchange",
        "(R_pi (x) R_pi) psi = -exchange(psi) for psi = singlet, M = 0 states, a (x) R_pi a",
        count,
        pi_dev,
        1e-10,
        &["pi_rotation_scope"],
    );

    let mut weights = 0.0f64;
    for _ in 0..count.min(200) {
        let coefficients = DMatrix::from_vec(2, 2, s.unit_complex_vector(4));
        let state = TwoBodySpinState::new(h, h, coefficients, FourVector::rest(), 0.0, Symmetry::None)?;
        let total: f64 = spin_coupling::total_spin_decompose(&state)?.values().sum();
        weights = weights.max((total - 1.0).abs());
    }
    b.push("total_spin_completeness", "sum_J w_J = 1", count.min(200), weights, 1e-12, &[]);

    let a = SpinState::basis(h, h, FourVector::rest(), 0.0)?;
    let other = SpinState::basis(h, -h, FourVector::unit_timelike(0.1, Vector3::x()), 0.0)?;
    let later = SpinState::basis(h, -h, FourVector::rest(), 0.5)?;
    let refused = [couple_two(&a, &other, HalfInt::ZERO, HalfInt::ZERO), couple_two(&a, &later, HalfInt::ZERO, HalfInt::ZERO)]
        .iter()
        .all(|r| matches!(r, Err(Error::FiberMismatch(_))));
    b.push("fiber_mismatch_refused", "coupling with n1 != n2 or tau1 != tau2 is an error", 2, if refused { 0.0 } else { 1.0 }, 0.5, &[]);
    Ok(b.finish("spin_coupling"))
}

/// Quantum and classical free evolution and the time-energy product.
pub fn evolution_suite(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut s = options.sampler(6);
    let mut b = Builder::new(options);
    let count = options.samples;

    let shape = GaussianShape {
        center: FourVector::new(10.0, 0.5, 0.0, 0.0),
        widths: [0.3, 0.1, 0.1, 0.1],
    };
    let mut packet = MomentumPacket::gaussian_grid(shape, 10.0, &[0], evolution::DEFAULT_GRID, 16.0)?;
    let initial = packet.norm();
    let steps = 10_000;
    let mut drift = 0.0f64;
    for _ in 0..steps {
        packet = evolution::free_evolve(&packet, 0.013);
        drift = drift.max((packet.norm() - initial).abs());
    }
    b.push("quantum_norm_drift", "||exp(-i K tau) psi|| = ||psi||", steps, drift, 1e-10, &[]);

    let model = Model::Invariant {
        mass: 1.0,
        potential: InvariantPotential::harmonic(1.0),
    };
    let start = PhasePoint::new(FourVector::new(0.5, 1.0, 0.0, -0.3), FourVector::new(1.0, 0.0, 1.0, 0.2), 0.0);
    let dt = evolution::choose_step(&start, &model, 1.0, 0.1, 1e-9)?;
    let traj = evolution::classical_integrate(&start, &model, dt, steps)?;
    let k0 = model.hamiltonian(&start);
    let conservation = max_of(traj.iter().map(|pt| ((model.hamiltonian(pt) - k0) / k0).abs()));
    b.push("classical_k_conservation", "K(tau) = K(0)", steps, conservation, 1e-8, &[]);

    let mut velocity = 0.0f64;
    let mut rate = 0.0f64;
    let trials = count.min(200);
    for _ in 0..trials {
        let mass = s.uniform(0.5, 3.0);
        let m = s.uniform(0.5, 3.0);
        let p = FourVector::unit_timelike(s.uniform(0.0, 2.0), s.unit_vector()) * m;
        let start = PhasePoint::new(s.four_vector(2.0), p, 0.0);
        let traj = evolution::classical_integrate(&start, &Model::Free { mass }, 0.05, 20)?;
        for w in traj.windows(2) {
            let dx = w[1].x - w[0].x;
            let v = dx.spatial() / dx.t();
            velocity = velocity.max((v - p.spatial() / p.t()).amax());
            rate = rate.max((evolution::proper_time_rate(&w[0], &w[1]) - evolution::observed_mass(&p) / mass).abs());
        }
    }
    b.push("einstein_velocity", "dx/dt = p/E", trials, velocity, 1e-12, &[]);
    b.push("on_shell_rate", "ds/dtau = m/M", trials, rate, 1e-12, &[]);

    let product = max_of([0.05, 0.2, 1.0].iter().map(|&sigma| {
        let shape = GaussianShape {
            widths: [sigma, 0.1, 0.1, 0.1],
            ..shape
        };
        MomentumPacket::gaussian_grid(shape, 10.0, &[0], evolution::DEFAULT_GRID, 16.0)
            .and_then(|p| evolution::time_energy_uncertainty(&p))
            .map_or(f64::NAN, |u| (u.product - 0.5).abs())
    }));
    b.push("gaussian_time_energy", "Delta t Delta E = 1/2 for a Gaussian", 3, product, 1e-9, &[]);
    Ok(b.finish("evolution"))
}

/// Fringe periods, closed form against quadrature, and energy-shift invariance.
pub fn interference(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut b = Builder::new(options);
    let reference = EmissionConfig::reference();
    let scan = palacios::scan_interference(&reference, -4.0, 4.0, 2001)?;
    let expected = H_EV_FS / reference.delta_e_ev();
    let period = scan.fringe_period_fs.map_or(f64::INFINITY, |p| (p - expected).abs());
    b.push("fringe_period_4_2_ev", "period = h / (E2 - E1), Delta E = 4.2 eV", 2001, period, 1e-3, &[]);

    let raw = EmissionConfig {
        e1_ev: 35.0,
        e2_ev: 69.0,
        ..reference.clone()
    };
    let scan_raw = palacios::scan_interference(&raw, -4.0, 4.0, 4001)?;
    let expected_raw = H_EV_FS / raw.delta_e_ev();
    let period_raw = scan_raw.fringe_period_fs.map_or(f64::INFINITY, |p| (p - expected_raw).abs());
    b.push("fringe_period_34_ev", "period = h / (E2 - E1), Delta E = 34 eV", 4001, period_raw, 5e-4, &[]);

    let mut quad = 0.0f64;
    let points = 121;
    for config in [&reference, &raw] {
        let state = palacios::build_two_electron_state(config)?;
        let grid: Vec<f64> = (0..points).map(|i| -3.0 + 0.05 * i as f64).collect();
        let peak = max_of(grid.iter().map(|&dt| palacios::coincidence_probability(config, dt)));
        for &dt in &grid {
            let closed = palacios::coincidence_probability(config, dt);
            let numeric = state.probability_quadrature(dt);
            // relative, floored where the probability itself vanishes
            quad = quad.max((closed - numeric).abs() / closed.abs().max(1e-8 * peak));
        }
    }
    b.push("closed_form_vs_quadrature", "P(dt) closed form = integral |A(T - dt/2, T + dt/2)|^2 dT", 2 * points, quad, 1e-6, &["overlap_phase_zero"]);

    let shifted = EmissionConfig {
        e1_ev: reference.e1_ev + 1000.0,
        e2_ev: reference.e2_ev + 1000.0,
        ..reference.clone()
    };
    let a = palacios::scan_interference(&reference, -4.0, 4.0, 2001)?;
    let c = palacios::scan_interference(&shifted, -4.0, 4.0, 2001)?;
    let peak = max_of(a.probability.iter().copied());
    let shift = max_of(a.probability.iter().zip(&c.probability).map(|(x, y)| (x - y).abs() / peak));
    b.push("energy_shift_invariance", "P(dt; E1 + c, E2 + c) = P(dt; E1, E2)", 2001, shift, 1e-10, &[]);

    let state = palacios::build_two_electron_state(&reference)?;
    let mut s = options.sampler(7);
    let trials = options.samples.min(500);
    let mut antisym = 0.0f64;
    for _ in 0..trials {
        let (t1, t2) = (s.uniform(-2.0, 3.0), s.uniform(-2.0, 3.0));
        for (s1, s2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            antisym = antisym.max((state.full_amplitude(t2, t1, s2, s1) + state.full_amplitude(t1, t2, s1, s2)).norm());
        }
    }
    b.push("total_antisymmetry", "Psi(t2 s2, t1 s1) = -Psi(t1 s1, t2 s2)", trials, antisym, 1e-12, &[]);
    Ok(b.finish("interference"))
}

/// Documented conventions, with the value that makes each one necessary.
pub fn convention_flags(options: &VerifyOptions) -> Result<Vec<ConventionFlag>> {
    let n0 = FourVector::rest();
    let g = dirac::gamma_dot(&n0);
    let gn_sq = (g * g).matrix()[(0, 0)].re;
    let g5_sq = (dirac::gamma5() * dirac::gamma5()).matrix()[(0, 0)].re;

    let mut s = options.sampler(8);
    let n = s.unit_timelike();
    let literal_sk = algebra::sigma_k_literal_deviation(&n);
    let literal_ss = algebra::sigma_sigma_literal_deviation(&n);

    let p = FourVector::new(0.3, 0.2, -0.5, 0.7);
    let dir = p.spatial() / p.spatial().norm();
    let sp = DiracOperator::block_diagonal(&sigma_dot(&dir));
    let helicity = dirac::helicity_operator(&p, &n0)?.max_abs_diff(&sp);

    let field = FieldTensor::new(Vector3::z(), Vector3::zeros(), 1.0, 1.0)?;
    let dipole = dirac::dipole_rhs(&-n0, &field)?.max_abs_diff(&(DiracOperator::block_diagonal(&sl2c::sigma(3)) * -1.0));

    let h = HalfInt::HALF;
    let up = SpinState::basis(h, h, n0, 0.0)?;
    let up_up = couple_two(&up, &up, HalfInt::ONE, HalfInt::ONE)?;
    let pi_general = spin_coupling::pi_rotation_exchange_deviation(&up_up)?;

    let (a1, a2, n) = (s.sl2c(), s.sl2c(), s.unit_timelike());
    let spin = s.unit_complex_vector(2);
    let state = InducedPacketState::new(n, [spin[0], spin[1]], FourVector::zero(), FourVector::rest(), [1.0; 4])?;
    let row = |a: &SL2CElement, st: &InducedPacketState| -> Result<nalgebra::Vector2<C64>> {
        let moved_n = spinor_map(a)?.apply(st.n());
        let d = little_group::wigner_d(a, &little_group::project_to_orbit(&moved_n))?;
        Ok((nalgebra::Vector2::from(st.spin()).transpose() * d.matrix()).transpose())
    };
    let once = row(&a1, &state)?;
    let after = InducedPacketState::new(little_group::project_to_orbit(&spinor_map(&a1)?.apply(&n)), [once[0], once[1]], FourVector::zero(), FourVector::rest(), [1.0; 4])?;
    let twice = row(&a2, &after)?;
    let direct = row(&a2.mul(&a1)?, &state)?;
    let row_break = (twice - direct).camax();

    Ok(vec![
        ConventionFlag {
            id: "gamma_n_square",
            statement: "with {gamma^mu, gamma^nu} = -2 g^{mu nu} and g = diag(-1,1,1,1), (gamma.n)^2 = +1 for unit timelike n (not -1)",
            measured: gn_sq,
        },
        ConventionFlag {
            id: "gamma5_square",
            statement: "gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3 squares to +1 (not -1)",
            measured: g5_sq,
        },
        ConventionFlag {
            id: "gamma_sign",
            statement: "gamma^0 = diag(1,1,-1,-1), gamma^k = [[0,-sigma_k],[sigma_k,0]]",
            measured: clifford_sign(),
        },
        ConventionFlag {
            id: "commutator_form",
            statement: "[Sigma_n, K] and [Sigma_n, Sigma_n] verified in the derived pi-contracted form; literal index placement deviates by the measured amount",
            measured: literal_sk.max(literal_ss),
        },
        ConventionFlag {
            id: "helicity_sign",
            statement: "at n_0 the transverse operator is -sigma.p/|p| (and +sigma.p/|p| at -n_0); measured distance from +sigma.p/|p| at n_0",
            measured: helicity,
        },
        ConventionFlag {
            id: "dipole_sign",
            statement: "the dipole matrix is quadratic in n and equals +e sigma.E in both cones; measured distance from -e sigma.E at -n_0",
            measured: dipole,
        },
        ConventionFlag {
            id: "pi_rotation_scope",
            statement: "(R_pi (x) R_pi) = -exchange holds on the singlet, M = 0 states and a (x) R_pi a, not on arbitrary products; measured on up (x) up",
            measured: pi_general,
        },
        ConventionFlag {
            id: "spin_column_convention",
            statement: "spin coefficients transform as a column, c' = D(A, Lambda n) c; measured composition failure of the row convention",
            measured: row_break,
        },
        ConventionFlag {
            id: "overlap_phase_zero",
            statement: "real Gaussian envelopes give zero envelope-overlap phase in the fringe term",
            measured: 0.0,
        },
    ])
}

fn clifford_sign() -> f64 {
    dirac::gamma(0).anticommutator(&dirac::gamma(0)).matrix()[(0, 0)].re / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            samples: 20,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let options = VerifyOptions {
            samples: 0,
            ..VerifyOptions::default()
        };
        assert!(matches!(run(&options), Err(Error::InvalidParameter(_))));
        let negative = VerifyOptions {
            tolerance: Some(-1.0),
            ..quick()
        };
        assert!(run(&negative).is_err());
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = run(&quick()).unwrap();
        let failures: Vec<_> = a.failures().map(|(s, r)| (s, r.id, r.max_deviation)).collect();
        assert!(a.passed, "{failures:?}");
        assert_eq!(a, run(&quick()).unwrap());
        assert_eq!(a.suites.len(), SUITES.len());
    }

    #[test]
    fn impossible_tolerance_fails() {
        let options = VerifyOptions {
            tolerance: Some(1e-18),
            ..quick()
        };
        let report = run_suite("operator_algebra", &options).unwrap();
        assert!(!report.passed());
        assert!(report.records.iter().all(|r| r.tolerance == 1e-18));
        assert!(run_suite("nope", &quick()).is_err());
    }

    #[test]
    fn flags_carry_measured_values() {
        let flags = convention_flags(&quick()).unwrap();
        let get = |id: &str| flags.iter().find(|f| f.id == id).unwrap().measured;
        assert_eq!(get("gamma_n_square"), 1.0);
        assert_eq!(get("gamma5_square"), 1.0);
        assert!(get("commutator_form") > 0.1);
        assert!(get("helicity_sign") > 1.0);
        assert!(get("dipole_sign") > 1.0);
        assert!(get("pi_rotation_scope") > 0.5);
        assert!(get("spin_column_convention") > 1e-3);
    }
}
