//! Conversion constants between natural units and eV/fs.
//!
//! Only the interference code and the command line work in eV and fs; the
//! rest of the crate keeps `hbar = c = 1`.

/// Reduced Planck constant in eV fs.
pub const HBAR_EV_FS: f64 = 0.6582119569;

/// Planck constant in eV fs.
pub const H_EV_FS: f64 = 4.135667696;

/// `hbar c` in eV nm.
pub const HBAR_C_EV_NM: f64 = 197.3269804;

/// Electron rest energy in eV.
pub const ELECTRON_MASS_EV: f64 = 510_998.95;

/// Energy spread required for temporal coherence across `delta_t_fs`,
/// from the saturated relation `dE dt = hbar / 2`.
pub fn min_energy_spread_ev(delta_t_fs: f64) -> f64 {
    HBAR_EV_FS / (2.0 * delta_t_fs)
}

/// Fringe period `h / dE` in fs for an energy difference in eV.
pub fn fringe_period_fs(delta_e_ev: f64) -> f64 {
    H_EV_FS / delta_e_ev.abs()
}

/// Angular frequency `dE / hbar` in rad/fs.
pub fn angular_frequency(delta_e_ev: f64) -> f64 {
    delta_e_ev / HBAR_EV_FS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_consistent() {
        assert!((H_EV_FS / (2.0 * std::f64::consts::PI) - HBAR_EV_FS).abs() < 1e-9);
    }

    #[test]
    fn spread_for_three_quarter_fs() {
        assert!((min_energy_spread_ev(0.75) - 0.438_807_971_266_666_7).abs() < 1e-12);
    }

    #[test]
    fn periods() {
        assert!((fringe_period_fs(4.2) - 0.9847).abs() < 5e-5);
        assert!((fringe_period_fs(34.0) - 0.1216).abs() < 5e-5);
    }
}
