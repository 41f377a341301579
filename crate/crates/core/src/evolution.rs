//! Classical invariant-time dynamics and free quantum evolution of
//! momentum-space packets.
//!
//! The free Hamiltonian is `K = p.p / 2M`, optionally plus an invariant
//! potential `V(x.x)`. Packets live in momentum space, where free
//! evolution is the phase `exp(-i p.p dtau / 2M)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::minkowski::{dot, FourVector, METRIC};
use crate::C64;

/// Relative drift of `K` per step above which a step is rejected.
pub const MAX_STEP_DRIFT: f64 = 1e-6;

/// Relative finite-difference step for Poisson brackets.
pub const POISSON_REL_STEP: f64 = 1e-5;

/// Default grid size per axis.
pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: FourVector,
    pub p: FourVector,
    pub tau: f64,
}

impl PhasePoint {
    pub fn new(x: FourVector, p: FourVector, tau: f64) -> Self {
        Self { x, p, tau }
    }
}

/// `V(s)` with `s = x.x`, and its derivative `V'(s)`.
#[derive(Clone)]
pub struct InvariantPotential {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl InvariantPotential {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    /// `V = k (x.x) / 2`.
    pub fn harmonic(k: f64) -> Self {
        Self::new(move |s| 0.5 * k * s, move |_| 0.5 * k)
    }
}

impl fmt::Debug for InvariantPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InvariantPotential(..)")
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Free { mass: f64 },
    Invariant { mass: f64, potential: InvariantPotential },
}

impl Model {
    pub fn mass(&self) -> f64 {
        match self {
            Model::Free { mass } | Model::Invariant { mass, .. } => *mass,
        }
    }

    pub fn hamiltonian(&self, state: &PhasePoint) -> f64 {
        let kinetic = dot(&state.p, &state.p) / (2.0 * self.mass());
        match self {
            Model::Free { .. } => kinetic,
            Model::Invariant { potential, .. } => kinetic + (potential.value)(dot(&state.x, &state.x)),
        }
    }

    /// `(dx^mu/dtau, dp^mu/dtau)` from the covariant Hamilton equations.
    fn velocity(&self, x: &FourVector, p: &FourVector) -> (FourVector, FourVector) {
        let dx = *p * (1.0 / self.mass());
        let dp = match self {
            Model::Free { .. } => FourVector::zero(),
            // dp_mu = -2 V' x_mu, and raising both sides keeps the form.
            Model::Invariant { potential, .. } => *x * (-2.0 * (potential.derivative)(dot(x, x))),
        };
        (dx, dp)
    }
}

/// One fourth-order Runge-Kutta step.
pub fn classical_step(state: &PhasePoint, model: &Model, dtau: f64) -> Result<PhasePoint> {
    if !(dtau > 0.0) {
        return Err(Error::InvalidParameter(format!("dtau must be positive, got {dtau}")));
    }
    let (x, p) = (state.x, state.p);
    let (k1x, k1p) = model.velocity(&x, &p);
    let (k2x, k2p) = model.velocity(&(x + k1x * (dtau / 2.0)), &(p + k1p * (dtau / 2.0)));
    let (k3x, k3p) = model.velocity(&(x + k2x * (dtau / 2.0)), &(p + k2p * (dtau / 2.0)));
    let (k4x, k4p) = model.velocity(&(x + k3x * dtau), &(p + k3p * dtau));
    let next = PhasePoint {
        x: x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dtau / 6.0),
        p: p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (dtau / 6.0),
        tau: state.tau + dtau,
    };
    let k0 = model.hamiltonian(state);
    let k1 = model.hamiltonian(&next);
    let scale = k0.abs().max(f64::MIN_POSITIVE);
    let drift = (k1 - k0).abs() / scale;
    if drift > MAX_STEP_DRIFT && (k1 - k0).abs() > 1e-300 {
        return Err(Error::StepRejected { tau: state.tau, drift });
    }
    Ok(next)
}

/// Trajectory including the initial point (`steps + 1` entries).
pub fn classical_integrate(state: &PhasePoint, model: &Model, dtau: f64, steps: usize) -> Result<Vec<PhasePoint>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(*state);
    let mut current = *state;
    for _ in 0..steps {
        current = classical_step(&current, model, dtau)?;
        out.push(current);
    }
    Ok(out)
}

/// Halves `dtau` until integrating over `span` with `dtau` and `dtau / 2`
/// gives endpoints closer than `tol` (max component of x and p).
pub fn choose_step(state: &PhasePoint, model: &Model, span: f64, initial: f64, tol: f64) -> Result<f64> {
    let endpoint = |dt: f64| -> Result<PhasePoint> {
        let steps = (span / dt).round().max(1.0) as usize;
        let traj = classical_integrate(state, model, span / steps as f64, steps)?;
        Ok(*traj.last().expect("trajectory is never empty"))
    };
    let mut dt = initial;
    for _ in 0..40 {
        let a = endpoint(dt)?;
        let b = endpoint(dt / 2.0)?;
        let diff = (a.x - b.x).max_abs().max((a.p - b.p).max_abs());
        if diff < tol {
            return Ok(dt);
        }
        dt /= 2.0;
    }
    Err(Error::InvalidParameter("step halving did not converge".into()))
}

/// Proper-time rate `ds/dtau` between two points of a trajectory.
pub fn proper_time_rate(a: &PhasePoint, b: &PhasePoint) -> f64 {
    let dx = b.x - a.x;
    (-dot(&dx, &dx)).max(0.0).sqrt() / (b.tau - a.tau)
}

/// Observed mass `m = sqrt(-p.p)` (zero for spacelike `p`).
pub fn observed_mass(p: &FourVector) -> f64 {
    (-dot(p, p)).max(0.0).sqrt()
}

/// Canonical Poisson bracket
/// `{F, G} = dF/dx^mu dG/dp_mu - dF/dp^mu dG/dx_mu`
/// by central finite differences, step `1e-5` times the component scale.
pub fn poisson<F, G>(f: F, g: G, at: &PhasePoint) -> f64
where
    F: Fn(&PhasePoint) -> f64,
    G: Fn(&PhasePoint) -> f64,
{
    let partial = |h: &dyn Fn(&PhasePoint) -> f64, momentum: bool, mu: usize| -> f64 {
        let base = if momentum { at.p } else { at.x };
        let step = POISSON_REL_STEP * base[mu].abs().max(1.0);
        let shifted = |delta: f64| {
            let mut c = base.to_array();
            c[mu] += delta;
            let v = FourVector::from_array(c);
            let mut pt = *at;
            if momentum {
                pt.p = v;
            } else {
                pt.x = v;
            }
            h(&pt)
        };
        (shifted(step) - shifted(-step)) / (2.0 * step)
    };
    (0..4)
        .map(|mu| {
            // raising the index of p_mu / x_mu contributes g^{mu mu}
            METRIC[mu] * (partial(&f, false, mu) * partial(&g, true, mu) - partial(&f, true, mu) * partial(&g, false, mu))
        })
        .sum()
}

/// Gaussian envelope parameters of a packet: center and standard
/// deviation of `|psi(p)|^2` along each component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianShape {
    pub center: FourVector,
    pub widths: [f64; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub enum PacketRepr {
    /// Samples on a rectangular grid; `cell` is the quadrature weight of
    /// one sample and `axes` lists the momentum components that vary.
    Grid {
        samples: Vec<(FourVector, C64)>,
        cell: f64,
        axes: Vec<usize>,
        shape: Vec<usize>,
    },
    /// Closed-form Gaussian that has evolved for `elapsed` in tau.
    Gaussian { shape: GaussianShape, elapsed: f64 },
}

/// A state in momentum space at invariant time `tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumPacket {
    pub repr: PacketRepr,
    pub mass: f64,
    pub n: FourVector,
    pub tau: f64,
}

impl MomentumPacket {
    pub fn gaussian(shape: GaussianShape, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || shape.widths.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("mass and widths must be positive".into()));
        }
        Ok(Self {
            repr: PacketRepr::Gaussian { shape, elapsed: 0.0 },
            mass,
            n: FourVector::rest(),
            tau: 0.0,
        })
    }

    /// Grid sampling of a Gaussian along `axes` (1 or 2 components); the
    /// remaining components are pinned to the center. The grid spans
    /// `half_span` standard deviations either side of the center.
    pub fn gaussian_grid(shape: GaussianShape, mass: f64, axes: &[usize], points: usize, half_span: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 || points < 2 {
            return Err(Error::InvalidParameter("grid needs 1 or 2 axes and at least 2 points".into()));
        }
        let axes_values: Vec<Vec<f64>> = axes
            .iter()
            .map(|&a| {
                let w = shape.widths[a];
                let lo = shape.center[a] - half_span * w;
                let step = 2.0 * half_span * w / points as f64;
                (0..points).map(|i| lo + step * i as f64).collect()
            })
            .collect();
        let cell: f64 = axes.iter().map(|&a| 2.0 * half_span * shape.widths[a] / points as f64).product();
        let amplitude = |p: &FourVector| -> C64 {
            let mut log = 0.0;
            let mut norm = 1.0;
            for &a in axes {
                let w = shape.widths[a];
                log -= (p[a] - shape.center[a]).powi(2) / (4.0 * w * w);
                norm *= (2.0 * std::f64::consts::PI * w * w).powf(-0.25);
            }
            C64::from(norm * log.exp())
        };
        let mut samples = Vec::new();
        let mut push = |values: &[(usize, f64)]| {
            let mut c = shape.center.to_array();
            for &(a, v) in values {
                c[a] = v;
            }
            let p = FourVector::from_array(c);
            samples.push((p, amplitude(&p)));
        };
        if axes.len() == 1 {
            for &v in &axes_values[0] {
                push(&[(axes[0], v)]);
            }
        } else {
            for &v0 in &axes_values[0] {
                for &v1 in &axes_values[1] {
                    push(&[(axes[0], v0), (axes[1], v1)]);
                }
            }
        }
        let mut packet = Self {
            repr: PacketRepr::Grid {
                samples,
                cell,
                axes: axes.to_vec(),
                shape: vec![points; axes.len()],
            },
            mass,
            n: FourVector::rest(),
            tau: 0.0,
        };
        packet.normalize();
        Ok(packet)
    }

    /// Grid packet from explicit samples along a single axis.
    pub fn from_samples(samples: Vec<(FourVector, C64)>, cell: f64, axis: usize, mass: f64) -> Result<Self> {
        if samples.len() < 2 || !(cell > 0.0) || !(mass > 0.0) {
            return Err(Error::InvalidParameter("need >= 2 samples, positive cell and mass".into()));
        }
        let len = samples.len();
        let mut packet = Self {
            repr: PacketRepr::Grid {
                samples,
                cell,
                axes: vec![axis],
                shape: vec![len],
            },
            mass,
            n: FourVector::rest(),
            tau: 0.0,
        };
        packet.normalize();
        Ok(packet)
    }

    fn normalize(&mut self) {
        let norm = self.norm();
        if let PacketRepr::Grid { samples, .. } = &mut self.repr {
            let s = norm.sqrt();
            for (_, a) in samples.iter_mut() {
                *a /= s;
            }
        }
    }

    /// Total probability (grid quadrature, or 1 for the closed form).
    pub fn norm(&self) -> f64 {
        match &self.repr {
            PacketRepr::Grid { samples, cell, .. } => samples.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>() * cell,
            PacketRepr::Gaussian { .. } => 1.0,
        }
    }

    /// Amplitude at `p`, including the accumulated free phase.
    pub fn amplitude_at(&self, p: &FourVector) -> Option<C64> {
        match &self.repr {
            PacketRepr::Grid { samples, .. } => samples.iter().find(|(q, _)| q == p).map(|(_, a)| *a),
            PacketRepr::Gaussian { shape, elapsed } => {
                let mut log = 0.0;
                let mut norm = 1.0;
                for a in 0..4 {
                    let w = shape.widths[a];
                    log -= (p[a] - shape.center[a]).powi(2) / (4.0 * w * w);
                    norm *= (2.0 * std::f64::consts::PI * w * w).powf(-0.25);
                }
                Some(C64::from(norm * log.exp()) * free_phase(p, self.mass, *elapsed))
            }
        }
    }

    pub fn samples(&self) -> Option<&[(FourVector, C64)]> {
        match &self.repr {
            PacketRepr::Grid { samples, .. } => Some(samples),
            PacketRepr::Gaussian { .. } => None,
        }
    }
}

/// `exp(-i p.p dtau / 2M)`.
pub fn free_phase(p: &FourVector, mass: f64, dtau: f64) -> C64 {
    C64::from_polar(1.0, -dot(p, p) * dtau / (2.0 * mass))
}

/// Free evolution by `dtau`: every amplitude picks up `exp(-i p.p dtau / 2M)`.
pub fn free_evolve(packet: &MomentumPacket, dtau: f64) -> MomentumPacket {
    let mut out = packet.clone();
    out.tau += dtau;
    match &mut out.repr {
        PacketRepr::Grid { samples, .. } => {
            for (p, a) in samples.iter_mut() {
                *a *= free_phase(p, packet.mass, dtau);
            }
        }
        PacketRepr::Gaussian { elapsed, .. } => *elapsed += dtau,
    }
    out
}

/// A product of two one-particle packets at common `tau`, stored as a
/// joint grid over the pairs of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodyPacket {
    pub masses: [f64; 2],
    pub tau: f64,
    /// `(p1, p2, amplitude)` in row-major order over the factor grids.
    pub samples: Vec<(FourVector, FourVector, C64)>,
}

impl TwoBodyPacket {
    pub fn product(a: &MomentumPacket, b: &MomentumPacket) -> Result<Self> {
        let (sa, sb) = match (a.samples(), b.samples()) {
            (Some(sa), Some(sb)) => (sa, sb),
            _ => return Err(Error::InvalidParameter("two-body packets need grid factors".into())),
        };
        if (a.tau - b.tau).abs() > 1e-12 {
            return Err(Error::FiberMismatch(format!("tau {} vs {}", a.tau, b.tau)));
        }
        let samples = sa
            .iter()
            .flat_map(|(p1, a1)| sb.iter().map(move |(p2, a2)| (*p1, *p2, a1 * a2)))
            .collect();
        Ok(Self {
            masses: [a.mass, b.mass],
            tau: a.tau,
            samples,
        })
    }

    /// Free evolution with `K = p1.p1/2M1 + p2.p2/2M2`, applied as one joint phase.
    pub fn free_evolve(&self, dtau: f64) -> Self {
        let [m1, m2] = self.masses;
        let samples = self
            .samples
            .iter()
            .map(|(p1, p2, a)| {
                let k = dot(p1, p1) / (2.0 * m1) + dot(p2, p2) / (2.0 * m2);
                (*p1, *p2, a * C64::from_polar(1.0, -k * dtau))
            })
            .collect();
        Self {
            masses: self.masses,
            tau: self.tau + dtau,
            samples,
        }
    }
}

/// Mean and variance of `m^2 = -p.p` under `|psi|^2`.
pub fn mass_moments(packet: &MomentumPacket) -> (f64, f64) {
    match &packet.repr {
        PacketRepr::Grid { samples, cell, .. } => {
            let weights: Vec<(f64, f64)> = samples.iter().map(|(p, a)| (-dot(p, p), a.norm_sqr() * cell)).collect();
            let total: f64 = weights.iter().map(|(_, w)| w).sum();
            let mean = weights.iter().map(|(m2, w)| m2 * w).sum::<f64>() / total;
            let var = weights.iter().map(|(m2, w)| (m2 - mean).powi(2) * w).sum::<f64>() / total;
            (mean, var)
        }
        PacketRepr::Gaussian { shape, .. } => {
            // independent normal components: E[c^2] = mu^2 + s^2, Var[c^2] = 2 s^4 + 4 mu^2 s^2
            let mut mean = 0.0;
            let mut var = 0.0;
            for a in 0..4 {
                let (mu, s) = (shape.center[a], shape.widths[a]);
                mean -= METRIC[a] * (mu * mu + s * s);
                var += 2.0 * s.powi(4) + 4.0 * mu * mu * s * s;
            }
            (mean, var)
        }
    }
}

/// Spreads in the time/energy pair (natural units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uncertainty {
    pub delta_t: f64,
    pub delta_e: f64,
    pub product: f64,
}

/// Standard deviations of `E = p^0` and of its conjugate `t`.
///
/// The E-axis marginal amplitude is transformed to the time domain with an
/// FFT; `t` moments are taken on the conjugate grid
/// `t_k = 2 pi k / (N dE)`.
pub fn time_energy_uncertainty(packet: &MomentumPacket) -> Result<Uncertainty> {
    let (energies, amps) = energy_marginal(packet)?;
    let n = amps.len();
    let de = energies[1] - energies[0];

    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let mean_e = energies.iter().zip(&weights).map(|(e, w)| e * w).sum::<f64>() / total;
    let var_e = energies.iter().zip(&weights).map(|(e, w)| (e - mean_e).powi(2) * w).sum::<f64>() / total;

    // psi(t) = sum_j a_j e^{-i E_j t}; with E_j = E_0 + j dE and t_k = 2 pi k/(N dE)
    // this is a forward DFT up to a k-dependent phase that drops out of |psi|^2.
    let mut buffer: Vec<Complex64> = amps.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let dt = std::f64::consts::TAU / (n as f64 * de);
    let times: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as i64;
            let signed = if k < (n as i64 + 1) / 2 { k } else { k - n as i64 };
            signed as f64 * dt
        })
        .collect();
    let tw: Vec<f64> = buffer.iter().map(|c| c.norm_sqr()).collect();
    let ttotal: f64 = tw.iter().sum();
    let mean_t = times.iter().zip(&tw).map(|(t, w)| t * w).sum::<f64>() / ttotal;
    let var_t = times.iter().zip(&tw).map(|(t, w)| (t - mean_t).powi(2) * w).sum::<f64>() / ttotal;

    let delta_t = var_t.sqrt();
    let delta_e = var_e.sqrt();
    Ok(Uncertainty {
        delta_t,
        delta_e,
        product: delta_t * delta_e,
    })
}

/// Amplitudes along the energy axis (uniform grid), summed over any other axis.
fn energy_marginal(packet: &MomentumPacket) -> Result<(Vec<f64>, Vec<C64>)> {
    let PacketRepr::Grid { samples, axes, shape, .. } = &packet.repr else {
        return Err(Error::InvalidParameter("time-energy spreads need a grid packet".into()));
    };
    let Some(pos) = axes.iter().position(|&a| a == 0) else {
        return Err(Error::InvalidParameter("packet has no energy axis".into()));
    };
    let n_e = shape[pos];
    let stride = if axes.len() == 2 && pos == 0 { shape[1] } else { 1 };
    let other = if axes.len() == 2 { shape[1 - pos] } else { 1 };
    let mut energies = vec![0.0; n_e];
    let mut amps = vec![C64::new(0.0, 0.0); n_e];
    for (i, slot) in amps.iter_mut().enumerate() {
        for j in 0..other {
            let idx = if axes.len() == 1 {
                i
            } else if pos == 0 {
                i * stride + j
            } else {
                j * shape[1] + i
            };
            energies[i] = samples[idx].0.t();
            *slot += samples[idx].1;
        }
    }
    Ok((energies, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{min_energy_spread_ev, HBAR_EV_FS};

    fn free_point() -> (PhasePoint, Model) {
        let p = FourVector::new(5.0, 1.0, -2.0, 0.5);
        (PhasePoint::new(FourVector::new(0.3, 0.1, 0.2, -0.4), p, 0.0), Model::Free { mass: 4.0 })
    }

    #[test]
    fn free_trajectory_is_linear() {
        let (start, model) = free_point();
        let traj = classical_integrate(&start, &model, 0.01, 200).unwrap();
        for pt in &traj {
            let expected = start.x + start.p * (pt.tau / model.mass());
            assert!((pt.x - expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn einstein_velocity_and_on_shell_rate() {
        let (start, model) = free_point();
        let traj = classical_integrate(&start, &model, 0.05, 100).unwrap();
        let m = observed_mass(&start.p);
        for w in traj.windows(2) {
            let dx = w[1].x - w[0].x;
            let v = dx.spatial() / dx.t();
            assert!((v - start.p.spatial() / start.p.t()).amax() < 1e-12);
            assert!((proper_time_rate(&w[0], &w[1]) - m / model.mass()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_or_negative_dtau_rejected() {
        let (start, model) = free_point();
        assert!(classical_step(&start, &model, 0.0).is_err());
        assert!(classical_step(&start, &model, -1.0).is_err());
    }

    #[test]
    fn huge_step_in_potential_is_rejected() {
        let model = Model::Invariant {
            mass: 1.0,
            potential: InvariantPotential::harmonic(4.0),
        };
        let start = PhasePoint::new(FourVector::new(0.5, 1.0, 0.0, 0.0), FourVector::new(1.0, 0.0, 1.0, 0.0), 2.0);
        match classical_step(&start, &model, 1.5) {
            Err(Error::StepRejected { tau, .. }) => assert_eq!(tau, 2.0),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn canonical_brackets() {
        let at = PhasePoint::new(FourVector::new(0.2, -1.0, 3.0, 0.5), FourVector::new(2.0, 0.1, 0.3, -0.7), 0.0);
        for mu in 0..4 {
            for nu in 0..4 {
                let b = poisson(|s| s.x[mu], |s| METRIC[nu] * s.p[nu], &at);
                let expected = if mu == nu { 1.0 } else { 0.0 };
                assert!((b - expected).abs() < 1e-8, "{{x^{mu}, p_{nu}}} = {b}");
            }
        }
        let model = Model::Free { mass: 2.0 };
        let kk = poisson(|s| model.hamiltonian(s), |s| model.hamiltonian(s), &at);
        assert!(kk.abs() < 1e-12);
    }

    #[test]
    fn bracket_with_k_matches_trajectory_derivative() {
        let model = Model::Invariant {
            mass: 1.5,
            potential: InvariantPotential::harmonic(0.8),
        };
        let start = PhasePoint::new(FourVector::new(0.4, 1.0, -0.5, 0.2), FourVector::new(1.2, 0.3, 0.9, -0.1), 0.0);
        let f = |s: &PhasePoint| s.x[1] * s.p[2];
        let h = 1e-3;
        let fwd = classical_integrate(&start, &model, h, 2).unwrap();
        let bwd = {
            let mut pts = vec![start];
            let mut cur = start;
            for _ in 0..2 {
                cur = rk4_signed(&cur, &model, -h);
                pts.push(cur);
            }
            pts
        };
        // five-point stencil: O(h^4)
        let deriv = (-f(&fwd[2]) + 8.0 * f(&fwd[1]) - 8.0 * f(&bwd[1]) + f(&bwd[2])) / (12.0 * h);
        let bracket = poisson(f, |s| model.hamiltonian(s), &start);
        assert!((deriv - bracket).abs() < 1e-8, "{deriv} vs {bracket}");
    }

    fn rk4_signed(state: &PhasePoint, model: &Model, dtau: f64) -> PhasePoint {
        let (x, p) = (state.x, state.p);
        let (k1x, k1p) = model.velocity(&x, &p);
        let (k2x, k2p) = model.velocity(&(x + k1x * (dtau / 2.0)), &(p + k1p * (dtau / 2.0)));
        let (k3x, k3p) = model.velocity(&(x + k2x * (dtau / 2.0)), &(p + k2p * (dtau / 2.0)));
        let (k4x, k4p) = model.velocity(&(x + k3x * dtau), &(p + k3p * dtau));
        PhasePoint {
            x: x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dtau / 6.0),
            p: p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (dtau / 6.0),
            tau: state.tau + dtau,
        }
    }

    fn energy_packet(sigma_e: f64, points: usize) -> MomentumPacket {
        let shape = GaussianShape {
            center: FourVector::new(10.0, 0.5, 0.0, 0.0),
            widths: [sigma_e, 0.1, 0.1, 0.1],
        };
        MomentumPacket::gaussian_grid(shape, 10.0, &[0], points, 16.0).unwrap()
    }

    #[test]
    fn free_evolve_identity_and_on_shell_phase() {
        let packet = energy_packet(0.2, 64);
        assert_eq!(free_evolve(&packet, 0.0).samples(), packet.samples());

        let m = 3.0_f64;
        let big_m = 2.5;
        let p = FourVector::new((m * m + 0.16_f64).sqrt(), 0.4, 0.0, 0.0);
        let single = MomentumPacket::from_samples(vec![(p, C64::new(1.0, 0.0)), (p * 1.0, C64::new(0.0, 0.0))], 1.0, 0, big_m).unwrap();
        let dtau = 0.37;
        let evolved = free_evolve(&single, dtau);
        let phase = evolved.samples().unwrap()[0].1;
        let expected = C64::from_polar(1.0, m * m * dtau / (2.0 * big_m));
        assert!((phase - expected).norm() < 1e-12);
    }

    #[test]
    fn free_evolution_is_unitary_over_many_steps() {
        let mut packet = energy_packet(0.3, 256);
        let initial: Vec<f64> = packet.samples().unwrap().iter().map(|(_, a)| a.norm_sqr()).collect();
        let n0 = packet.norm();
        for _ in 0..10_000 {
            packet = free_evolve(&packet, 0.013);
        }
        assert!((packet.norm() - n0).abs() < 1e-10);
        for ((_, a), w) in packet.samples().unwrap().iter().zip(&initial) {
            assert!((a.norm_sqr() - w).abs() < 1e-10 * w.max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn two_body_evolution_factorizes() {
        let a = energy_packet(0.2, 32);
        let mut b = energy_packet(0.5, 24);
        b.mass = 3.0;
        let joint = TwoBodyPacket::product(&a, &b).unwrap().free_evolve(0.77);
        let separate = TwoBodyPacket::product(&free_evolve(&a, 0.77), &free_evolve(&b, 0.77)).unwrap();
        for (x, y) in joint.samples.iter().zip(&separate.samples) {
            assert!((x.2 - y.2).norm() < 1e-12);
        }
    }

    #[test]
    fn mass_moment_examples() {
        let big_m = 2.0;
        let p = FourVector::new(big_m, 0.0, 0.0, 0.0);
        let single = MomentumPacket::from_samples(vec![(p, C64::new(1.0, 0.0)), (p * 2.0, C64::new(0.0, 0.0))], 1.0, 0, big_m).unwrap();
        let (mean, var) = mass_moments(&single);
        assert!((mean - 4.0).abs() < 1e-14);
        assert!(var.abs() < 1e-14);

        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let two = MomentumPacket::from_samples(
            vec![(FourVector::new(1.0, 0.0, 0.0, 0.0), amp), (FourVector::new(2.0, 0.0, 0.0, 0.0), amp)],
            1.0,
            0,
            1.0,
        )
        .unwrap();
        assert!((mass_moments(&two).0 - 2.5).abs() < 1e-14);
    }

    #[test]
    fn narrow_gaussian_mass_moments_match_quadrature() {
        let shape = GaussianShape {
            center: FourVector::new(5.0, 1.0, 0.0, 0.0),
            widths: [0.05, 0.04, 0.03, 0.03],
        };
        let closed = MomentumPacket::gaussian(shape, 4.0).unwrap();
        let (mean, var) = mass_moments(&closed);
        let pbar = shape.center;
        assert!((mean + dot(&pbar, &pbar)).abs() < 3.0 * var.sqrt());

        // Quadrature oracle on a 2D (E, px) grid; the y, z widths contribute
        // -(s_y^2 + s_z^2) to the mean analytically.
        let grid = MomentumPacket::gaussian_grid(shape, 4.0, &[0, 1], 128, 10.0).unwrap();
        let (gmean, gvar) = mass_moments(&grid);
        let yz = shape.widths[2].powi(2) + shape.widths[3].powi(2);
        assert!((gmean - yz - mean).abs() < 1e-9, "{gmean} vs {mean}");
        let yz_var = 2.0 * (shape.widths[2].powi(4) + shape.widths[3].powi(4));
        assert!((gvar + yz_var - var).abs() < 1e-9);
    }

    #[test]
    fn gaussian_saturates_time_energy_bound() {
        for sigma in [0.05, 0.2, 1.0] {
            let u = time_energy_uncertainty(&energy_packet(sigma, DEFAULT_GRID)).unwrap();
            assert!((u.product - 0.5).abs() < 1e-9, "sigma {sigma}: {}", u.product);
            assert!((u.delta_e - sigma).abs() < 1e-9);
        }
    }

    #[test]
    fn free_evolution_spreads_time_but_keeps_energy() {
        let packet = energy_packet(0.2, DEFAULT_GRID);
        let before = time_energy_uncertainty(&packet).unwrap();
        let after = time_energy_uncertainty(&free_evolve(&packet, 2.0)).unwrap();
        assert!((after.delta_e - before.delta_e).abs() < 1e-12);
        assert!(after.delta_t > before.delta_t);
        assert!(after.product >= 0.5 - 1e-9);
    }

    fn two_pulse(sigma_e: f64, separation: f64) -> MomentumPacket {
        let points = DEFAULT_GRID;
        let span = 16.0;
        let de = 2.0 * span * sigma_e / points as f64;
        let samples = (0..points)
            .map(|i| {
                let e = -span * sigma_e + de * i as f64;
                let env = (-(e * e) / (4.0 * sigma_e * sigma_e)).exp();
                let amp = C64::from(env) * (C64::from_polar(1.0, e * separation / 2.0) + C64::from_polar(1.0, -e * separation / 2.0));
                (FourVector::new(e, 0.0, 0.0, 0.0), amp)
            })
            .collect();
        MomentumPacket::from_samples(samples, de, 0, 1.0).unwrap()
    }

    #[test]
    fn separated_pulses_oracle() {
        // Oracle: |psi(t)|^2 ~ G(t - d/2) + G(t + d/2) + 2c G(t), with G of
        // variance s^2 = 1/(4 sigma_e^2) and overlap c = exp(-sigma_e^2 d^2 / 2),
        // so Var(t) = (s^2 + d^2/4 + c s^2) / (1 + c).
        let sigma_e = 1.0;
        let mut last = 0.0;
        for d in [4.0, 6.0, 8.0] {
            let u = time_energy_uncertainty(&two_pulse(sigma_e, d)).unwrap();
            let s2 = 1.0 / (4.0 * sigma_e * sigma_e);
            let c = (-sigma_e * sigma_e * d * d / 2.0).exp();
            let expected = ((s2 + d * d / 4.0 + c * s2) / (1.0 + c)).sqrt();
            assert!((u.delta_t - expected).abs() < 1e-9, "d={d}: {} vs {expected}", u.delta_t);
            assert!(u.product > 0.5);
            assert!(u.delta_t > last);
            last = u.delta_t;
        }
    }

    #[test]
    fn three_quarter_fs_spread_in_ev() {
        let de = min_energy_spread_ev(0.75);
        assert!((de - HBAR_EV_FS / 1.5).abs() < 1e-15);
        assert!((de - 0.4388).abs() < 1e-4);
    }

    #[test]
    fn invariant_potential_conserves_k() {
        let model = Model::Invariant {
            mass: 1.0,
            potential: InvariantPotential::harmonic(1.0),
        };
        let start = PhasePoint::new(FourVector::new(0.5, 1.0, 0.0, -0.3), FourVector::new(1.0, 0.0, 1.0, 0.2), 0.0);
        let dt = choose_step(&start, &model, 1.0, 0.1, 1e-9).unwrap();
        let traj = classical_integrate(&start, &model, dt, 10_000).unwrap();
        let k0 = model.hamiltonian(&start);
        for pt in traj.iter().step_by(100) {
            assert!(((model.hamiltonian(pt) - k0) / k0).abs() < 1e-8);
        }
    }
}
