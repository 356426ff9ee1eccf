//! Single-satellite coverage geometry on a spherical Earth.
//!
//! The satellite is on a circular orbit and is frozen for the duration of a
//! frame. UE positions are described by the Earth-central angle from the
//! sub-satellite point and an azimuth measured from the ground-track
//! direction, which gives closed forms for slant range, delay and the
//! line-of-sight velocity component.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;
/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of the Earth in km^3/s^2.
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;

/// Orbit and coverage description for one satellite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstellationGeometry {
    pub earth_radius_km: f64,
    pub gravitational_parameter: f64,
    pub altitude_km: f64,
    /// Minimum service elevation in radians. `π/2` is accepted and means
    /// only the nadir point is served.
    pub min_elevation_rad: f64,
}

impl ConstellationGeometry {
    /// Geometry with the default Earth constants.
    pub fn new(altitude_km: f64, min_elevation_rad: f64) -> Result<Self> {
        Self::with_constants(
            EARTH_RADIUS_KM,
            EARTH_MU_KM3_S2,
            altitude_km,
            min_elevation_rad,
        )
    }

    pub fn with_constants(
        earth_radius_km: f64,
        gravitational_parameter: f64,
        altitude_km: f64,
        min_elevation_rad: f64,
    ) -> Result<Self> {
        let geom = Self {
            earth_radius_km,
            gravitational_parameter,
            altitude_km,
            min_elevation_rad,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.earth_radius_km > 0.0 && self.earth_radius_km.is_finite()) {
            return Err(Error::invalid("geometry.earth_radius_km", "must be > 0"));
        }
        if !(self.gravitational_parameter > 0.0 && self.gravitational_parameter.is_finite()) {
            return Err(Error::invalid(
                "geometry.gravitational_parameter",
                "must be > 0",
            ));
        }
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return Err(Error::invalid("geometry.altitude_km", "must be > 0"));
        }
        if !(self.min_elevation_rad > 0.0 && self.min_elevation_rad <= FRAC_PI_2) {
            return Err(Error::invalid(
                "geometry.min_elevation_deg",
                "must lie in (0, 90] degrees",
            ));
        }
        Ok(())
    }

    fn orbit_radius_km(&self) -> f64 {
        self.earth_radius_km + self.altitude_km
    }

    /// Circular orbital speed in km/s.
    pub fn orbital_velocity(&self) -> f64 {
        (self.gravitational_parameter / self.orbit_radius_km()).sqrt()
    }

    /// Slant range in km to a UE that sees the satellite at `elevation` radians.
    pub fn slant_range_from_elevation(&self, elevation: f64) -> Result<f64> {
        // small slack so that round-tripped elevations at the boundary pass
        const EPS: f64 = 1e-12;
        if !(elevation >= self.min_elevation_rad - EPS && elevation <= FRAC_PI_2 + EPS) {
            return Err(Error::Domain(format!(
                "elevation {elevation} rad outside [{}, π/2]",
                self.min_elevation_rad
            )));
        }
        let re = self.earth_radius_km;
        let ratio = self.orbit_radius_km() / re;
        let (sin_e, cos_e) = elevation.sin_cos();
        Ok(re * ((ratio * ratio - cos_e * cos_e).sqrt() - sin_e))
    }

    /// Slant range in km for an Earth-central angle `central_angle` radians.
    pub fn slant_range_from_central_angle(&self, central_angle: f64) -> Result<f64> {
        let max = self.coverage_central_angle();
        if !(central_angle >= 0.0 && central_angle <= max + 1e-12) {
            return Err(Error::Domain(format!(
                "central angle {central_angle} rad outside [0, {max}]"
            )));
        }
        Ok(self.slant_range_unchecked(central_angle))
    }

    fn slant_range_unchecked(&self, central_angle: f64) -> f64 {
        let re = self.earth_radius_km;
        let rs = self.orbit_radius_km();
        (re * re + rs * rs - 2.0 * re * rs * central_angle.cos()).sqrt()
    }

    /// Elevation in radians of the satellite seen from a UE at `central_angle`.
    pub fn elevation_from_central_angle(&self, central_angle: f64) -> f64 {
        let k = self.earth_radius_km / self.orbit_radius_km();
        // atan2 form returns π/2 at the nadir without a special case
        (central_angle.cos() - k).atan2(central_angle.sin())
    }

    /// Largest Earth-central angle at which the elevation is at least the
    /// minimum service elevation.
    pub fn coverage_central_angle(&self) -> f64 {
        let e = self.min_elevation_rad;
        let k = self.earth_radius_km / self.orbit_radius_km();
        ((k * e.cos()).acos() - e).max(0.0)
    }

    /// Great-circle radius of the coverage footprint in km.
    pub fn coverage_radius(&self) -> f64 {
        self.earth_radius_km * self.coverage_central_angle()
    }

    /// Slant range at the footprint edge.
    pub fn max_slant_range(&self) -> f64 {
        self.slant_range_unchecked(self.coverage_central_angle())
    }

    /// Spread between edge and nadir one-way delay, in seconds.
    pub fn differential_delay(&self) -> f64 {
        propagation_delay(self.max_slant_range()) - propagation_delay(self.altitude_km)
    }

    /// Line-of-sight velocity in km/s, positive while the satellite closes on the UE.
    pub fn radial_velocity(&self, ue: &UePlacement) -> f64 {
        let d = self.slant_range_unchecked(ue.central_angle);
        self.orbital_velocity() * self.earth_radius_km * ue.central_angle.sin() * ue.azimuth.cos()
            / d
    }

    /// Upper bound on |radial velocity| over all placements.
    pub fn max_closing_speed(&self) -> f64 {
        self.orbital_velocity() * self.earth_radius_km / self.orbit_radius_km()
    }

    /// Draws a UE uniformly by area over the coverage cap.
    pub fn sample_ue<R: Rng + ?Sized>(&self, rng: &mut R) -> UePlacement {
        let u: f64 = rng.random();
        let phi: f64 = rng.random::<f64>() * TAU;
        self.placement_from_uniforms(u, phi)
    }

    /// Inverse-CDF map from `u` in `[0, 1)` to an area-uniform central angle.
    pub fn placement_from_uniforms(&self, u: f64, azimuth: f64) -> UePlacement {
        let max = self.coverage_central_angle();
        let central_angle = (1.0 - u * (1.0 - max.cos())).acos().min(max);
        UePlacement {
            central_angle,
            azimuth: azimuth.rem_euclid(TAU),
        }
    }

    /// Full snapshot for one UE with the Doppler evaluated at `carrier_hz`.
    pub fn sight_line(&self, ue: &UePlacement, carrier_hz: f64) -> SightLine {
        let slant_range_km = self.slant_range_unchecked(ue.central_angle);
        let radial_velocity_km_s = self.radial_velocity(ue);
        SightLine {
            elevation: self.elevation_from_central_angle(ue.central_angle),
            slant_range_km,
            delay_s: propagation_delay(slant_range_km),
            radial_velocity_km_s,
            doppler_hz: doppler_shift(radial_velocity_km_s, carrier_hz),
        }
    }
}

/// UE position relative to the sub-satellite point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UePlacement {
    /// Earth-central angle in radians.
    pub central_angle: f64,
    /// Bearing from the sub-satellite point, radians from the ground-track direction.
    pub azimuth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SightLine {
    pub elevation: f64,
    pub slant_range_km: f64,
    pub delay_s: f64,
    pub radial_velocity_km_s: f64,
    pub doppler_hz: f64,
}

/// One-way propagation delay in seconds.
pub fn propagation_delay(slant_range_km: f64) -> f64 {
    slant_range_km / SPEED_OF_LIGHT_KM_S
}

/// Doppler shift in Hz for a radial velocity in km/s.
pub fn doppler_shift(radial_velocity_km_s: f64, carrier_hz: f64) -> f64 {
    radial_velocity_km_s / SPEED_OF_LIGHT_KM_S * carrier_hz
}
