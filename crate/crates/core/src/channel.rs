//! Link budget, CSI aging and self-interference.
//!
//! SNR is computed per Hz from an EIRP spectral density, so it does not
//! depend on how much bandwidth a duplexing scheme assigns to the downlink.
//! CSI aging uses the Jakes autocorrelation `J0(2π f_D t)` and treats the
//! mismatch between stale and true channel as additional noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in dBW/K/Hz.
pub const BOLTZMANN_DBW: f64 = -228.6;
/// Thermal noise density at 290 K in dBm/Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

/// Downlink budget figures plus the UE transmit power that leaks into its
/// own receiver when uplink and downlink overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudgetParams {
    /// Satellite EIRP density, dBW/MHz.
    pub eirp_density_dbw_mhz: f64,
    /// UE receive G/T, dB/K.
    pub ue_g_over_t_db_k: f64,
    pub ue_noise_figure_db: f64,
    /// Self-interference source power before cancellation, dBm.
    pub ue_tx_power_dbm: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
}

impl LinkBudgetParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(Error::invalid("link.carrier_ghz", "must be > 0"));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("link.bandwidth_mhz", "must be > 0"));
        }
        if self.ue_noise_figure_db.is_nan() || self.ue_noise_figure_db < 0.0 {
            return Err(Error::invalid("link.ue_noise_figure_db", "must be >= 0"));
        }
        for (key, v) in [
            ("link.eirp_density_dbw_mhz", self.eirp_density_dbw_mhz),
            ("link.ue_g_over_t_db_k", self.ue_g_over_t_db_k),
            ("link.ue_tx_power_dbm", self.ue_tx_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(key, "must be finite"));
            }
        }
        Ok(())
    }

    /// Downlink carrier-to-noise ratio in dB at `distance_km`.
    pub fn cnr_db(&self, distance_km: f64) -> Result<f64> {
        let bw_mhz = self.bandwidth_hz / 1e6;
        let loss = fspl_db(distance_km, self.carrier_hz / 1e9)?;
        Ok(self.eirp_density_dbw_mhz + 10.0 * bw_mhz.log10() + self.ue_g_over_t_db_k
            - loss
            - (BOLTZMANN_DBW + 10.0 * self.bandwidth_hz.log10()))
    }

    /// Receiver noise power over the full bandwidth, dBm.
    pub fn noise_floor_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_HZ + 10.0 * self.bandwidth_hz.log10() + self.ue_noise_figure_db
    }

    /// Clean and self-interfered downlink quality at one distance.
    pub fn link_quality(&self, distance_km: f64, sic_db: f64) -> Result<LinkQuality> {
        let snr_db = self.cnr_db(distance_km)?;
        Ok(LinkQuality {
            snr_db,
            si_sinr_db: self_interference_sinr(self, snr_db, sic_db),
            noise_floor_dbm: self.noise_floor_dbm(),
        })
    }
}

/// Residual Doppler spread and quadrature resolution for CSI aging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiAgingModel {
    pub doppler_spread_hz: f64,
    pub integration_steps: usize,
}

impl CsiAgingModel {
    pub fn new(doppler_spread_hz: f64, integration_steps: usize) -> Result<Self> {
        let model = Self {
            doppler_spread_hz,
            integration_steps,
        };
        model.validate()?;
        Ok(model)
    }

    /// A model without decorrelation.
    pub fn disabled() -> Self {
        Self {
            doppler_spread_hz: 0.0,
            integration_steps: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.doppler_spread_hz >= 0.0 && self.doppler_spread_hz.is_finite()) {
            return Err(Error::invalid("aging.doppler_spread_hz", "must be >= 0"));
        }
        if self.integration_steps < 2 {
            return Err(Error::invalid("aging.integration_steps", "must be >= 2"));
        }
        Ok(())
    }

    /// Jakes correlation between CSI and channel separated by `age_s` seconds.
    pub fn correlation(&self, age_s: f64) -> f64 {
        libm::j0(std::f64::consts::TAU * self.doppler_spread_hz * age_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkQuality {
    pub snr_db: f64,
    pub si_sinr_db: f64,
    pub noise_floor_dbm: f64,
}

/// Free-space path loss in dB.
pub fn fspl_db(distance_km: f64, carrier_ghz: f64) -> Result<f64> {
    if !(distance_km > 0.0 && carrier_ghz > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs positive distance and carrier, got {distance_km} km, {carrier_ghz} GHz"
        )));
    }
    Ok(92.45 + 20.0 * distance_km.log10() + 20.0 * carrier_ghz.log10())
}

/// SINR after CSI aging with correlation `rho`, both in linear units.
pub fn effective_sinr(snr: f64, rho: f64) -> f64 {
    let r2 = rho * rho;
    r2 * snr / (1.0 + (1.0 - r2) * snr)
}

/// Shannon spectral efficiency in bit/s/Hz.
pub fn spectral_efficiency(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Time-averaged spectral efficiency while CSI acquired `age_offset_s`
/// before the window start is reused for `window_s` seconds.
///
/// Trapezoidal rule with `model.integration_steps` panels.
pub fn avg_se_over_window(snr: f64, model: &CsiAgingModel, age_offset_s: f64, window_s: f64) -> f64 {
    let se_at = |age: f64| spectral_efficiency(effective_sinr(snr, model.correlation(age)));
    if model.doppler_spread_hz == 0.0 {
        return spectral_efficiency(snr);
    }
    if window_s <= 0.0 {
        return se_at(age_offset_s);
    }
    let n = model.integration_steps.max(2);
    let h = window_s / n as f64;
    let interior: f64 = (1..n).map(|i| se_at(age_offset_s + i as f64 * h)).sum();
    let ends = 0.5 * (se_at(age_offset_s) + se_at(age_offset_s + window_s));
    (ends + interior) / n as f64
}

/// Downlink SINR in dB when residual self-interference adds to the noise.
/// `sic_db = f64::INFINITY` means perfect cancellation.
pub fn self_interference_sinr(params: &LinkBudgetParams, clean_snr_db: f64, sic_db: f64) -> f64 {
    let noise_dbm = params.noise_floor_dbm();
    let signal_dbm = clean_snr_db + noise_dbm;
    let residual_dbm = params.ue_tx_power_dbm - sic_db;
    let impairment_mw = db_to_linear(noise_dbm) + db_to_linear(residual_dbm);
    signal_dbm - linear_to_db(impairment_mw)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
