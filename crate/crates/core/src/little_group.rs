//! Wigner rotations induced on the foliation vector `n`, and the induced
//! transformation law on parametrized packet states.
//!
//! `D(A, n) = L(n)^-1 A L(Phi(A)^-1 n)` with `L` the canonical boost. Spin
//! coefficients are a column: under `A` they become `D(A, Phi(A) n) c`,
//! which composes as a homomorphism.

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::evolution::{poisson, PhasePoint};
use crate::minkowski::{dot, pure_boost, FourVector, LorentzMatrix, METRIC};
use crate::sl2c::{canonical_boost_unchecked, max_abs_diff2, spinor_map, spinor_map_matrix, LorentzGenerator, Rep, SL2CElement};
use crate::C64;

pub const SU2_TOL: f64 = 1e-10;

/// Relative on-shell tolerance for momentum Wigner rotations.
pub const ON_SHELL_TOL: f64 = 1e-6;

pub const SPIN_NORM_TOL: f64 = 1e-10;

/// An element of SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerRotation(Matrix2<C64>);

impl WignerRotation {
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let unitarity = max_abs_diff2(&(m.adjoint() * m), &Matrix2::identity());
        let det = (m.determinant() - C64::new(1.0, 0.0)).norm();
        if unitarity > SU2_TOL || det > SU2_TOL {
            return Err(Error::NotUnimodular(format!(
                "not in SU(2): unitarity deviation {unitarity:.3e}, det deviation {det:.3e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// `D = a I - i b.sigma`; returns `(a, b)`.
    fn quaternion(&self) -> (f64, Vector3<f64>) {
        let m = &self.0;
        let a = 0.5 * (m[(0, 0)] + m[(1, 1)]).re;
        let b = Vector3::new(
            -0.5 * (m[(0, 1)] + m[(1, 0)]).im,
            0.5 * (m[(1, 0)] - m[(0, 1)]).re,
            -0.5 * (m[(0, 0)] - m[(1, 1)]).im,
        );
        (a, b)
    }

    /// Rotation angle of the SO(3) image, in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        let (a, b) = self.quaternion();
        let theta = 2.0 * b.norm().atan2(a);
        if theta > std::f64::consts::PI {
            std::f64::consts::TAU - theta
        } else {
            theta
        }
    }

    /// Unit rotation axis, or `None` when the rotation is trivial.
    pub fn axis(&self) -> Option<Vector3<f64>> {
        let (a, b) = self.quaternion();
        let norm = b.norm();
        // folding the angle into [0, pi] flips the axis when a < 0
        let sign = if a < 0.0 { -1.0 } else { 1.0 };
        (norm > 1e-14).then(|| b * (sign / norm))
    }

    /// Spatial rotation represented by `D`.
    pub fn so3(&self) -> LorentzMatrix {
        spinor_map_matrix(&self.0)
    }

    pub fn apply(&self, spin: &Vector2<C64>) -> Vector2<C64> {
        self.0 * spin
    }

    pub fn compose(&self, rhs: &WignerRotation) -> WignerRotation {
        Self(self.0 * rhs.0)
    }

    pub fn max_abs_diff(&self, other: &WignerRotation) -> f64 {
        max_abs_diff2(&self.0, &other.0)
    }
}

/// Puts a nearly-unit timelike vector back on the hyperboloid by
/// recomputing `n^0 = sqrt(1 + |n|^2)` from the spatial part.
///
/// Rescaling by `1/sqrt(-n.n)` is not enough far out on the orbit: `n.n`
/// cancels catastrophically once `n^0` is in the hundreds.
pub fn project_to_orbit(n: &FourVector) -> FourVector {
    let u = n.spatial();
    FourVector::from_time_space((1.0 + u.norm_squared()).sqrt().copysign(n.t()), u)
}

fn first_rep(lambda: &SL2CElement) -> Result<()> {
    match lambda.rep() {
        Rep::First => Ok(()),
        found => Err(Error::WrongRepresentation { expected: Rep::First, found }),
    }
}

fn orbit_rotation(lambda: &SL2CElement, n: &FourVector) -> Result<WignerRotation> {
    let back = project_to_orbit(&spinor_map(&lambda.inverse())?.apply(n));
    let l_n = canonical_boost_unchecked(&project_to_orbit(n));
    let l_back = canonical_boost_unchecked(&back);
    WignerRotation::new(l_n.inverse().matrix() * lambda.matrix() * l_back.matrix())
}

/// `D(A, n) = L(n)^-1 A L(Phi(A)^-1 n)`.
pub fn wigner_d(lambda: &SL2CElement, n: &FourVector) -> Result<WignerRotation> {
    first_rep(lambda)?;
    n.check_foliation()?;
    orbit_rotation(lambda, n)
}

/// The same construction on the mass shell, with `L(p/m)`.
pub fn momentum_wigner_d(lambda: &SL2CElement, p: &FourVector, m: f64) -> Result<WignerRotation> {
    first_rep(lambda)?;
    if !(m > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    let pp = dot(p, p);
    if (pp + m * m).abs() > ON_SHELL_TOL * m * m || p.t() <= 0.0 {
        return Err(Error::OffShell { dot: pp, expected: -m * m });
    }
    orbit_rotation(lambda, &project_to_orbit(&(*p * (1.0 / m))))
}

/// A single-particle packet on the fiber `n`: centers and widths in
/// spacetime and momentum, plus two spin coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedPacketState {
    n: FourVector,
    spin: Vector2<C64>,
    pub center_x: FourVector,
    pub center_p: FourVector,
    /// Widths along the packet's own axes.
    pub widths: [f64; 4],
    /// Frame carrying the width axes; `axes * n0 = n`.
    axes: LorentzMatrix,
}

impl InducedPacketState {
    pub fn new(n: FourVector, spin: [C64; 2], center_x: FourVector, center_p: FourVector, widths: [f64; 4]) -> Result<Self> {
        n.check_foliation()?;
        let spin = Vector2::new(spin[0], spin[1]);
        let norm = spin.norm_squared();
        if (norm - 1.0).abs() > SPIN_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        if widths.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter(format!("widths must be positive, got {widths:?}")));
        }
        Ok(Self {
            axes: pure_boost(&n)?,
            n,
            spin,
            center_x,
            center_p,
            widths,
        })
    }

    pub fn n(&self) -> &FourVector {
        &self.n
    }

    pub fn spin(&self) -> [C64; 2] {
        [self.spin[0], self.spin[1]]
    }

    pub fn axes(&self) -> &LorentzMatrix {
        &self.axes
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.n - other.n).max_abs(),
            (self.center_x - other.center_x).max_abs(),
            (self.center_p - other.center_p).max_abs(),
            (self.spin - other.spin).camax(),
            self.axes.max_abs_diff(&other.axes),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Transforms a packet by `A`: vectors by `Phi(A)`, spin by `D(A, Phi(A) n)`.
pub fn induced_transform(state: &InducedPacketState, lambda: &SL2CElement) -> Result<InducedPacketState> {
    first_rep(lambda)?;
    let phi = spinor_map(lambda)?;
    let n = project_to_orbit(&phi.apply(&state.n));
    let d = orbit_rotation(lambda, &n)?;
    Ok(InducedPacketState {
        n,
        spin: d.apply(&state.spin),
        center_x: phi.apply(&state.center_x),
        center_p: phi.apply(&state.center_p),
        widths: state.widths,
        axes: phi.compose(&state.axes),
    })
}

/// Transports two states sharing a fiber; errors if they do not share one.
pub fn transport_pair(
    a: &InducedPacketState,
    b: &InducedPacketState,
    lambda: &SL2CElement,
) -> Result<(InducedPacketState, InducedPacketState)> {
    if (a.n - b.n).max_abs() > 1e-12 {
        return Err(Error::FiberMismatch(format!("{} vs {}", a.n, b.n)));
    }
    Ok((induced_transform(a, lambda)?, induced_transform(b, lambda)?))
}

/// First-order change of `(n, x, p)` under a generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PacketTangent {
    pub dn: FourVector,
    pub dx: FourVector,
    pub dp: FourVector,
}

/// Tangent of `eps -> exp(eps G)` acting on a packet, computed from the
/// generator functions rather than from the matrix `G`:
/// `dv = -(1/2) w_{mu nu} {v, L^{mu nu}}` for `x, p` (Poisson brackets by
/// finite differences) and `dn = -(1/2) w_{mu nu} (i M_n^{mu nu} n)` with
/// `i M_n^{mu nu} f = n^mu df/dn_nu - n^nu df/dn_mu`.
pub fn generator_tangent(state: &InducedPacketState, generator: &LorentzGenerator) -> PacketTangent {
    let omega = generator.lowered();
    let at = PhasePoint::new(state.center_x, state.center_p, 0.0);
    let orbital = |mu: usize, nu: usize| move |s: &PhasePoint| s.x[mu] * s.p[nu] - s.x[nu] * s.p[mu];

    let mut dx = [0.0; 4];
    let mut dp = [0.0; 4];
    let mut dn = [0.0; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let w = omega[(mu, nu)];
            if w == 0.0 {
                continue;
            }
            for lambda in 0..4 {
                dx[lambda] -= 0.5 * w * poisson(|s| s.x[lambda], orbital(mu, nu), &at);
                dp[lambda] -= 0.5 * w * poisson(|s| s.p[lambda], orbital(mu, nu), &at);
                dn[lambda] -= 0.5 * w * m_n_action(&state.n, mu, nu, |v| v[lambda]);
            }
        }
    }
    PacketTangent {
        dn: FourVector::from_array(dn),
        dx: FourVector::from_array(dx),
        dp: FourVector::from_array(dp),
    }
}

/// `i M_n^{mu nu} f` at `n` by central differences in the components of `n`.
fn m_n_action(n: &FourVector, mu: usize, nu: usize, f: impl Fn(&FourVector) -> f64) -> f64 {
    let partial_lower = |k: usize| {
        let h = 1e-5 * n[k].abs().max(1.0);
        let shift = |d: f64| {
            let mut c = n.to_array();
            c[k] += d;
            f(&FourVector::from_array(c))
        };
        // d/dn_k = g^{kk} d/dn^k
        METRIC[k] * (shift(h) - shift(-h)) / (2.0 * h)
    };
    n[mu] * partial_lower(nu) - n[nu] * partial_lower(mu)
}

/// `max |T(exp(eps G)) s - s - eps * tangent|`, for the second-order check.
pub fn first_order_residual(state: &InducedPacketState, generator: &LorentzGenerator, eps: f64) -> Result<f64> {
    let moved = induced_transform(state, &generator.exp_sl2c(eps))?;
    let t = generator_tangent(state, generator);
    Ok([
        (moved.n - state.n - t.dn * eps).max_abs(),
        (moved.center_x - state.center_x - t.dx * eps).max_abs(),
        (moved.center_p - state.center_p - t.dp * eps).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// Largest difference between two packet states (all parameters).
pub fn state_distance(a: &InducedPacketState, b: &InducedPacketState) -> f64 {
    a.max_abs_diff(b)
}
