//! Two electrons emitted at different times in a spin singlet: the
//! symmetric spacetime amplitude, the coincidence probability against the
//! detection-time difference, fringe extraction and the coherence estimate.
//!
//! Energies are in eV and times in fs. Each pulse envelope is the Gaussian
//! amplitude `g(t) = exp(-(t - t_emit)^2 / (2 sigma^2))`, so `|g|^2` has
//! FWHM `2 sigma sqrt(ln 2)`. The overall `1/sqrt 2` is dropped.

use nalgebra::Vector3;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minkowski::FourVector;
use crate::spin_coupling::{couple_two, HalfInt, SpinState, TwoBodySpinState};
use crate::units::{angular_frequency, fringe_period_fs, min_energy_spread_ev, ELECTRON_MASS_EV, HBAR_C_EV_NM, HBAR_EV_FS};
use crate::C64;

/// Minimum grid samples per fringe period.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 16.0;

/// Threshold quoted for the energy spread needed for coherence, eV.
pub const QUOTED_THRESHOLD_EV: f64 = 1e-3;

/// Quoted natural atomic line width scale, eV.
pub const QUOTED_LINEWIDTH_EV: f64 = 1e-6;

/// Ratio (in decades) above which computed and quoted thresholds disagree.
const DISCREPANCY_DECADES: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionConfig {
    pub e1_ev: f64,
    pub e2_ev: f64,
    /// Unit emission directions; magnitudes follow from the energies.
    pub k1_dir: Vector3<f64>,
    pub k2_dir: Vector3<f64>,
    pub t_emit1_fs: f64,
    pub t_emit2_fs: f64,
    /// Gaussian amplitude width of each pulse.
    pub sigma_t_fs: f64,
    pub mass_ev: f64,
    /// Common detector position, nm.
    pub detector_nm: Vector3<f64>,
    pub n: FourVector,
}

impl EmissionConfig {
    /// Corrected helium energies, 0.75 fs spacing and 0.5 fs pulses.
    pub fn reference() -> Self {
        Self {
            e1_ev: 10.4,
            e2_ev: 14.6,
            k1_dir: Vector3::z(),
            k2_dir: Vector3::z(),
            t_emit1_fs: 0.0,
            t_emit2_fs: 0.75,
            sigma_t_fs: 0.5,
            mass_ev: ELECTRON_MASS_EV,
            detector_nm: Vector3::zeros(),
            n: FourVector::rest(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.e1_ev, self.e2_ev, self.t_emit1_fs, self.t_emit2_fs, self.sigma_t_fs, self.mass_ev]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite emission parameter".into()));
        }
        if !(self.sigma_t_fs > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse width must be positive, got {}", self.sigma_t_fs)));
        }
        if !(self.e1_ev > 0.0 && self.e2_ev > 0.0) {
            return Err(Error::InvalidParameter("energies must be positive".into()));
        }
        if !(self.mass_ev > 0.0) {
            return Err(Error::InvalidParameter("mass must be positive".into()));
        }
        for k in [&self.k1_dir, &self.k2_dir] {
            if (k.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("direction {k:?} is not a unit vector")));
            }
        }
        self.n.check_foliation()
    }

    pub fn delta_e_ev(&self) -> f64 {
        self.e2_ev - self.e1_ev
    }

    pub fn emission_offset_fs(&self) -> f64 {
        self.t_emit2_fs - self.t_emit1_fs
    }

    /// Fringe period `h / |E2 - E1|`, or `None` for equal energies.
    pub fn predicted_period_fs(&self) -> Option<f64> {
        (self.delta_e_ev() != 0.0).then(|| fringe_period_fs(self.delta_e_ev()))
    }
}

/// Momentum magnitude `sqrt(2 M E)` in eV for kinetic energy `E`.
fn momentum_ev(e_ev: f64, mass_ev: f64) -> f64 {
    (2.0 * mass_ev * e_ev).sqrt()
}

/// `(T, dt) = ((t1 + t2) / 2, t2 - t1)`.
pub fn to_relative_coords(t1: f64, t2: f64) -> (f64, f64) {
    (0.5 * (t1 + t2), t2 - t1)
}

/// Spacetime factor symmetric under `t1 <-> t2`, times a spin singlet.
#[derive(Clone, Debug)]
pub struct TwoElectronState {
    pub config: EmissionConfig,
    spin: TwoBodySpinState,
    spatial_phase: C64,
}

/// Builds the symmetrized two-electron state on the fiber of `config.n`.
pub fn build_two_electron_state(config: &EmissionConfig) -> Result<TwoElectronState> {
    config.validate()?;
    let h = HalfInt::HALF;
    let up = SpinState::basis(h, h, config.n, 0.0)?;
    let down = SpinState::basis(h, -h, config.n, 0.0)?;
    let spin = couple_two(&up, &down, HalfInt::ZERO, HalfInt::ZERO)?;
    // both detectors sit at the same point, so k.x is common to both terms
    let k_total = config.k1_dir * momentum_ev(config.e1_ev, config.mass_ev) + config.k2_dir * momentum_ev(config.e2_ev, config.mass_ev);
    let spatial_phase = C64::from_polar(1.0, k_total.dot(&config.detector_nm) / HBAR_C_EV_NM);
    Ok(TwoElectronState {
        config: config.clone(),
        spin,
        spatial_phase,
    })
}

impl TwoElectronState {
    fn envelope(&self, t: f64, center: f64) -> f64 {
        let s = self.config.sigma_t_fs;
        (-(t - center).powi(2) / (2.0 * s * s)).exp()
    }

    /// Direct and exchanged terms of the amplitude.
    fn terms(&self, t1: f64, t2: f64) -> (C64, C64) {
        let c = &self.config;
        let direct = self.envelope(t1, c.t_emit1_fs) * self.envelope(t2, c.t_emit2_fs);
        let exchanged = self.envelope(t2, c.t_emit1_fs) * self.envelope(t1, c.t_emit2_fs);
        (
            C64::from_polar(direct, -(c.e1_ev * t1 + c.e2_ev * t2) / HBAR_EV_FS) * self.spatial_phase,
            C64::from_polar(exchanged, -(c.e1_ev * t2 + c.e2_ev * t1) / HBAR_EV_FS) * self.spatial_phase,
        )
    }

    /// `A(t1, t2) = g1(t1) g2(t2) e^{-i(E1 t1 + E2 t2)} + g1(t2) g2(t1) e^{-i(E1 t2 + E2 t1)}`.
    pub fn amplitude(&self, t1: f64, t2: f64) -> C64 {
        let (a, b) = self.terms(t1, t2);
        a + b
    }

    /// The same amplitude regrouped around the mean time:
    /// `e^{-i(E1+E2)T} [g1 g2 e^{+i dE dt/2} + g1' g2' e^{-i dE dt/2}]`.
    pub fn amplitude_relative(&self, big_t: f64, dt: f64) -> C64 {
        let c = &self.config;
        let (t1, t2) = (big_t - dt / 2.0, big_t + dt / 2.0);
        let direct = self.envelope(t1, c.t_emit1_fs) * self.envelope(t2, c.t_emit2_fs);
        let exchanged = self.envelope(t2, c.t_emit1_fs) * self.envelope(t1, c.t_emit2_fs);
        let half = c.delta_e_ev() * dt / (2.0 * HBAR_EV_FS);
        let common = C64::from_polar(1.0, -(c.e1_ev + c.e2_ev) * big_t / HBAR_EV_FS) * self.spatial_phase;
        common * (C64::from_polar(direct, -half) + C64::from_polar(exchanged, half))
    }

    pub fn spin(&self) -> &TwoBodySpinState {
        &self.spin
    }

    /// Full amplitude for spin projections indexed `0 = up`, `1 = down`.
    pub fn full_amplitude(&self, t1: f64, t2: f64, s1: usize, s2: usize) -> C64 {
        self.amplitude(t1, t2) * self.spin.coefficients()[(s1, s2)]
    }

    /// `P(dt) = integral |A(T - dt/2, T + dt/2)|^2 dT` by trapezoidal
    /// quadrature over +-`12 sigma` about the mean emission time.
    pub fn probability_quadrature(&self, dt: f64) -> f64 {
        let (direct, cross) = self.quadrature_parts(dt);
        direct + cross
    }

    /// `(direct, interference)` parts of the quadrature.
    pub fn quadrature_parts(&self, dt: f64) -> (f64, f64) {
        let c = &self.config;
        let center = 0.5 * (c.t_emit1_fs + c.t_emit2_fs);
        let s = c.sigma_t_fs;
        let steps = 960;
        let h = 24.0 * s / steps as f64;
        let mut direct = 0.0;
        let mut cross = 0.0;
        for i in 0..=steps {
            let t = center - 12.0 * s + h * i as f64;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            let (a, b) = self.terms(t - dt / 2.0, t + dt / 2.0);
            direct += w * (a.norm_sqr() + b.norm_sqr());
            cross += w * 2.0 * (a * b.conj()).re;
        }
        (direct * h, cross * h)
    }
}

/// Closed-form `(direct, interference)` parts of `P(dt)`:
/// `s sqrt(pi/2) [e^{-(dt-d)^2/2s^2} + e^{-(dt+d)^2/2s^2}]` and
/// `2 s sqrt(pi/2) e^{-(dt^2+d^2)/2s^2} cos(dE dt / hbar)`, `d = t_emit2 - t_emit1`.
pub fn probability_parts(config: &EmissionConfig, dt: f64) -> (f64, f64) {
    let s = config.sigma_t_fs;
    let d = config.emission_offset_fs();
    let scale = s * (std::f64::consts::PI / 2.0).sqrt();
    let direct = scale * ((-(dt - d).powi(2) / (2.0 * s * s)).exp() + (-(dt + d).powi(2) / (2.0 * s * s)).exp());
    let cross = 2.0 * scale * (-(dt * dt + d * d) / (2.0 * s * s)).exp() * (angular_frequency(config.delta_e_ev()) * dt).cos();
    (direct, cross)
}

pub fn coincidence_probability(config: &EmissionConfig, dt: f64) -> f64 {
    let (direct, cross) = probability_parts(config, dt);
    direct + cross
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterferenceResult {
    pub delta_t_fs: Vec<f64>,
    pub probability: Vec<f64>,
    pub envelope: Vec<f64>,
    pub interference_term: Vec<f64>,
    /// Period of the interference term from its Fourier peak.
    pub fringe_period_fs: Option<f64>,
    pub predicted_period_fs: Option<f64>,
    /// Fringe amplitude over envelope where the envelope peaks.
    pub visibility: f64,
    /// `(Pmax - Pmin)/(Pmax + Pmin)` where the envelope exceeds half its peak.
    pub window_contrast: f64,
}

/// Samples `P` on `samples` points of `[dt_min, dt_max]` and extracts the
/// fringe period and visibility.
pub fn scan_interference(config: &EmissionConfig, dt_min: f64, dt_max: f64, samples: usize) -> Result<InterferenceResult> {
    config.validate()?;
    if samples < 2 || !(dt_max > dt_min) {
        return Err(Error::InvalidParameter(format!("need at least 2 samples over a non-empty range, got {samples} on [{dt_min}, {dt_max}]")));
    }
    let step = (dt_max - dt_min) / (samples - 1) as f64;
    let predicted = config.predicted_period_fs();
    if let Some(period) = predicted {
        let per_period = period / step;
        if per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(Error::Aliasing {
                samples_per_period: per_period,
                required: MIN_SAMPLES_PER_PERIOD,
            });
        }
    }
    let delta_t_fs: Vec<f64> = (0..samples).map(|i| dt_min + step * i as f64).collect();
    let (envelope, interference_term): (Vec<f64>, Vec<f64>) = delta_t_fs.iter().map(|&dt| probability_parts(config, dt)).unzip();
    let probability: Vec<f64> = envelope.iter().zip(&interference_term).map(|(a, b)| (a + b).max(0.0)).collect();

    let fringe_period_fs = predicted.and_then(|_| fourier_period(&interference_term, step));
    let visibility = peak_visibility(config, &delta_t_fs, &envelope);
    let window_contrast = window_contrast(&probability, &envelope);
    Ok(InterferenceResult {
        delta_t_fs,
        probability,
        envelope,
        interference_term,
        fringe_period_fs,
        predicted_period_fs: predicted,
        visibility,
        window_contrast,
    })
}

/// Fringe amplitude `2 s sqrt(pi/2) e^{-(dt^2+d^2)/2s^2}` divided by the
/// envelope, evaluated at the grid point where the envelope peaks.
fn peak_visibility(config: &EmissionConfig, grid: &[f64], envelope: &[f64]) -> f64 {
    let Some((i, _)) = envelope.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return 0.0;
    };
    let s = config.sigma_t_fs;
    let d = config.emission_offset_fs();
    let dt = grid[i];
    let amplitude = 2.0 * s * (std::f64::consts::PI / 2.0).sqrt() * (-(dt * dt + d * d) / (2.0 * s * s)).exp();
    if envelope[i] > 0.0 {
        (amplitude / envelope[i]).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn window_contrast(probability: &[f64], envelope: &[f64]) -> f64 {
    let peak = envelope.iter().copied().fold(0.0, f64::max);
    let (lo, hi) = probability
        .iter()
        .zip(envelope)
        .filter(|(_, e)| **e >= 0.5 * peak)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (p, _)| (lo.min(*p), hi.max(*p)));
    if hi + lo > 0.0 && lo.is_finite() {
        ((hi - lo) / (hi + lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Period at the positive-frequency peak of the zero-padded spectrum,
/// refined by a parabola through the log magnitudes around the peak.
fn fourier_period(signal: &[f64], step: f64) -> Option<f64> {
    let padded = (signal.len() * 16).next_power_of_two().max(1 << 16);
    let mut buffer: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buffer.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buffer);
    let mags: Vec<f64> = buffer[..padded / 2].iter().map(|c| c.norm()).collect();
    let (k, _) = mags.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1))?;
    if k + 1 >= mags.len() || mags[k] == 0.0 {
        return None;
    }
    let (a, b, c) = (mags[k - 1].ln(), mags[k].ln(), mags[k + 1].ln());
    let denom = a - 2.0 * b + c;
    let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let freq = (k as f64 + offset) / (padded as f64 * step);
    (freq > 0.0).then(|| 1.0 / freq)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub pulse_spacing_fs: f64,
    /// `hbar / (2 spacing)`.
    pub computed_min_spread_ev: f64,
    pub quoted_threshold_ev: f64,
    pub quoted_linewidth_ev: f64,
    /// `computed / quoted`.
    pub threshold_ratio: f64,
    /// Set when computed and quoted thresholds differ by more than a decade.
    pub discrepancy: bool,
    /// Time spread allowed by the quoted line width, `hbar / (2 dE)`.
    pub linewidth_time_spread_fs: f64,
    /// Whether the line-width time spread covers the pulse spacing.
    pub linewidth_supports_coherence: bool,
}

pub fn feasibility_report(config: &EmissionConfig) -> FeasibilityReport {
    let spacing = config.emission_offset_fs().abs();
    let computed = min_energy_spread_ev(spacing);
    let ratio = computed / QUOTED_THRESHOLD_EV;
    let linewidth_time = HBAR_EV_FS / (2.0 * QUOTED_LINEWIDTH_EV);
    FeasibilityReport {
        pulse_spacing_fs: spacing,
        computed_min_spread_ev: computed,
        quoted_threshold_ev: QUOTED_THRESHOLD_EV,
        quoted_linewidth_ev: QUOTED_LINEWIDTH_EV,
        threshold_ratio: ratio,
        discrepancy: ratio.log10().abs() > DISCREPANCY_DECADES,
        linewidth_time_spread_fs: linewidth_time,
        linewidth_supports_coherence: linewidth_time >= spacing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;
    use crate::spin_coupling::exchange;

    fn symmetric_config() -> EmissionConfig {
        EmissionConfig {
            t_emit1_fs: -0.375,
            t_emit2_fs: 0.375,
            ..EmissionConfig::reference()
        }
    }

    #[test]
    fn amplitude_is_symmetric() {
        let state = build_two_electron_state(&EmissionConfig::reference()).unwrap();
        let mut s = Sampler::new(1);
        for _ in 0..500 {
            let (t1, t2) = (s.uniform(-2.0, 3.0), s.uniform(-2.0, 3.0));
            assert!((state.amplitude(t1, t2) - state.amplitude(t2, t1)).norm() < 1e-15);
        }
    }

    #[test]
    fn degenerate_case() {
        let config = EmissionConfig {
            e2_ev: 10.4,
            t_emit2_fs: 0.0,
            ..EmissionConfig::reference()
        };
        let state = build_two_electron_state(&config).unwrap();
        let g = |t: f64| (-(t * t) / (2.0 * 0.25)).exp();
        for (t1, t2) in [(0.1, -0.3), (0.7, 0.2), (-1.0, 1.0)] {
            let expected = C64::from_polar(2.0 * g(t1) * g(t2), -10.4 * (t1 + t2) / HBAR_EV_FS);
            assert!((state.amplitude(t1, t2) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn full_state_is_antisymmetric() {
        let state = build_two_electron_state(&EmissionConfig::reference()).unwrap();
        for (t1, t2) in [(0.1, 0.9), (-0.4, 0.2)] {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    let swapped = state.full_amplitude(t2, t1, s2, s1);
                    assert!((swapped + state.full_amplitude(t1, t2, s1, s2)).norm() < 1e-15);
                }
            }
        }
        let ex = exchange(state.spin()).unwrap();
        assert!((ex.overlap(state.spin()) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn spin_factor_is_time_independent() {
        let state = build_two_electron_state(&EmissionConfig::reference()).unwrap();
        let chi = state.spin().coefficients().clone();
        for (t1, t2) in [(0.0, 0.0), (0.0, 0.75), (0.3, -0.2), (1.1, 0.4)] {
            let a = state.amplitude(t1, t2);
            for s1 in 0..2 {
                for s2 in 0..2 {
                    assert!((state.full_amplitude(t1, t2, s1, s2) - a * chi[(s1, s2)]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn relative_coordinates() {
        assert_eq!(to_relative_coords(0.0, 0.0), (0.0, 0.0));
        assert_eq!(to_relative_coords(1.0, 2.0), (1.5, 1.0));
        let state = build_two_electron_state(&EmissionConfig::reference()).unwrap();
        let mut s = Sampler::new(2);
        for _ in 0..500 {
            let (t1, t2) = (s.uniform(-2.0, 3.0), s.uniform(-2.0, 3.0));
            let (big_t, dt) = to_relative_coords(t1, t2);
            assert!((state.amplitude(t1, t2) - state.amplitude_relative(big_t, dt)).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for config in [EmissionConfig::reference(), symmetric_config(), EmissionConfig { e1_ev: 35.0, e2_ev: 69.0, ..EmissionConfig::reference() }] {
            let state = build_two_electron_state(&config).unwrap();
            let peak = (0..200).map(|i| coincidence_probability(&config, -3.0 + 0.03 * i as f64)).fold(0.0, f64::max);
            for i in 0..200 {
                let dt = -3.0 + 0.03 * i as f64;
                let closed = coincidence_probability(&config, dt);
                let quad = state.probability_quadrature(dt);
                assert!((closed - quad).abs() <= 1e-6 * closed.abs() + 1e-14 * peak, "dt {dt}: {closed} vs {quad}");
                assert!(quad >= -1e-14 * peak);
            }
        }
    }

    #[test]
    fn equal_energies_do_not_oscillate() {
        let config = EmissionConfig {
            e2_ev: 10.4,
            ..EmissionConfig::reference()
        };
        let s = config.sigma_t_fs;
        let d = config.emission_offset_fs();
        for i in 0..100 {
            let dt = -2.0 + 0.04 * i as f64;
            let (_, cross) = probability_parts(&config, dt);
            let envelope = 2.0 * s * (std::f64::consts::PI / 2.0).sqrt() * (-(dt * dt + d * d) / (2.0 * s * s)).exp();
            assert!((cross - envelope).abs() < 1e-15);
        }
        let r = scan_interference(&config, -3.0, 3.0, 601).unwrap();
        assert_eq!(r.fringe_period_fs, None);
    }

    #[test]
    fn symmetric_in_delta_t() {
        let config = symmetric_config();
        for i in 0..100 {
            let dt = 0.03 * i as f64;
            assert!((coincidence_probability(&config, dt) - coincidence_probability(&config, -dt)).abs() < 1e-15);
        }
    }

    /// Oracle: spacing of zero crossings of the quadrature interference term.
    fn zero_crossing_period(config: &EmissionConfig) -> f64 {
        let state = build_two_electron_state(config).unwrap();
        let half = fringe_period_fs(config.delta_e_ev()) / 2.0;
        let f = |dt: f64| state.quadrature_parts(dt).1;
        let mut roots = Vec::new();
        let step = half / 20.0;
        let mut x = -1.5 * half * 4.0;
        while x < 1.5 * half * 4.0 {
            if f(x).signum() != f(x + step).signum() {
                let (mut a, mut b) = (x, x + step);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if f(a).signum() == f(m).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x += step;
        }
        let gaps: Vec<f64> = roots.windows(2).map(|w| w[1] - w[0]).collect();
        2.0 * gaps.iter().sum::<f64>() / gaps.len() as f64
    }

    #[test]
    fn fringe_periods() {
        let reference = EmissionConfig::reference();
        assert!((zero_crossing_period(&reference) - 0.9847).abs() < 1e-4);
        let raw = EmissionConfig {
            e1_ev: 35.0,
            e2_ev: 69.0,
            ..reference.clone()
        };
        assert!((zero_crossing_period(&raw) - 0.1216).abs() < 1e-4);

        let r = scan_interference(&reference, -4.0, 4.0, 2001).unwrap();
        let period = r.fringe_period_fs.unwrap();
        assert!((period - 0.9847).abs() < 1e-3, "{period}");
        let r = scan_interference(&raw, -4.0, 4.0, 4001).unwrap();
        assert!((r.fringe_period_fs.unwrap() - 0.1216).abs() < 1e-3);
    }

    #[test]
    fn fourier_peak_within_one_bin() {
        let config = EmissionConfig::reference();
        let step = 0.004;
        let r = scan_interference(&config, -4.0, 4.0, 2001).unwrap();
        let padded = (2001usize * 16).next_power_of_two().max(1 << 16);
        let bin = 1.0 / (padded as f64 * step);
        let predicted = 1.0 / config.predicted_period_fs().unwrap();
        assert!((1.0 / r.fringe_period_fs.unwrap() - predicted).abs() < bin);
    }

    #[test]
    fn visibility_examples() {
        let overlapping = EmissionConfig {
            t_emit2_fs: 0.0,
            ..EmissionConfig::reference()
        };
        let r = scan_interference(&overlapping, -4.0, 4.0, 2001).unwrap();
        assert!((r.visibility - 1.0).abs() < 1e-12);

        let separated = EmissionConfig {
            t_emit2_fs: 5.0,
            ..EmissionConfig::reference()
        };
        let r = scan_interference(&separated, -8.0, 8.0, 4001).unwrap();
        assert!(r.visibility < 1e-5);
        // the raw window contrast does not vanish: the envelope alone varies
        assert!(r.window_contrast > 0.1);

        let reference = scan_interference(&EmissionConfig::reference(), -4.0, 4.0, 2001).unwrap();
        assert!(reference.visibility > 0.0 && reference.visibility < 1.0);
        assert!(reference.probability.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn aliasing_guard() {
        let config = EmissionConfig::reference();
        match scan_interference(&config, -4.0, 4.0, 101) {
            Err(Error::Aliasing { samples_per_period, required }) => {
                assert!(samples_per_period < required);
            }
            other => panic!("expected aliasing error, got {other:?}"),
        }
        assert!(scan_interference(&config, -4.0, 4.0, 2001).is_ok());
    }

    #[test]
    fn common_energy_shift_leaves_pattern() {
        let base = EmissionConfig::reference();
        let shifted = EmissionConfig {
            e1_ev: base.e1_ev + 1000.0,
            e2_ev: base.e2_ev + 1000.0,
            ..base.clone()
        };
        let a = scan_interference(&base, -4.0, 4.0, 801).unwrap();
        let b = scan_interference(&shifted, -4.0, 4.0, 801).unwrap();
        for (x, y) in a.probability.iter().zip(&b.probability) {
            assert!((x - y).abs() < 1e-12);
        }
        let sa = build_two_electron_state(&base).unwrap();
        let sb = build_two_electron_state(&shifted).unwrap();
        for dt in [-1.0, 0.2, 0.9] {
            assert!((sa.probability_quadrature(dt) - sb.probability_quadrature(dt)).abs() < 1e-9);
        }
    }

    #[test]
    fn feasibility_numbers() {
        let report = feasibility_report(&EmissionConfig::reference());
        assert!((report.computed_min_spread_ev - 0.438_807_971_266_666_7).abs() < 1e-12);
        assert_eq!(report.quoted_threshold_ev, 1e-3);
        assert_eq!(report.quoted_linewidth_ev, 1e-6);
        assert!(report.discrepancy);
        assert!(report.linewidth_supports_coherence);
    }

    #[test]
    fn config_validation() {
        let bad = EmissionConfig {
            sigma_t_fs: 0.0,
            ..EmissionConfig::reference()
        };
        assert!(build_two_electron_state(&bad).is_err());
        let bad = EmissionConfig {
            e1_ev: -1.0,
            ..EmissionConfig::reference()
        };
        assert!(scan_interference(&bad, -1.0, 1.0, 100).is_err());
    }
}
