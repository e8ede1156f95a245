//! Per-link radio model: log-distance path loss with log-normal shadowing and
//! Rayleigh multipath, SNR, BER, clipped PRR and Shannon rate.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PRR_FLOOR: f64 = 0.01;
pub const PRR_CEIL: f64 = 0.999;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

mod dbm_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(super::watts_to_dbm(*w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d).map(super::dbm_to_watts)
    }
}

/// Radio parameters. Transmit power is held in watts; the config document
/// carries it in dBm and converts at load time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    #[serde(rename = "tx_power_dbm", with = "dbm_serde")]
    pub tx_power_w: f64,
    /// Combined transmit and receive antenna/system gain G_t * G_r, in dB.
    pub effective_gain_db: f64,
    pub wavelength_m: f64,
    pub ref_dist_m: f64,
    pub pathloss_exp: f64,
    pub shadow_sigma_db: f64,
    pub noise_psd_w_per_hz: f64,
    pub bandwidth_hz: f64,
    pub packet_bits: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            tx_power_w: dbm_to_watts(20.0),
            effective_gain_db: 70.0,
            wavelength_m: 0.125,
            ref_dist_m: 1.0,
            pathloss_exp: 3.5,
            shadow_sigma_db: 8.0,
            noise_psd_w_per_hz: 1e-13,
            bandwidth_hz: 1e7,
            packet_bits: 10_000.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tx_power", self.tx_power_w),
            ("wavelength_m", self.wavelength_m),
            ("ref_dist_m", self.ref_dist_m),
            ("noise_psd_w_per_hz", self.noise_psd_w_per_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("packet_bits", self.packet_bits),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "channel.{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.pathloss_exp >= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "channel.pathloss_exp must be >= 2, got {}",
                self.pathloss_exp
            )));
        }
        if !(self.shadow_sigma_db >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "channel.shadow_sigma_db must be >= 0, got {}",
                self.shadow_sigma_db
            )));
        }
        if !self.effective_gain_db.is_finite() {
            return Err(Error::InvalidConfig(
                "channel.effective_gain_db must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn noise_power_w(&self) -> f64 {
        self.noise_psd_w_per_hz * self.bandwidth_hz
    }

    pub fn antenna_gain(&self) -> f64 {
        db_to_linear(self.effective_gain_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSample {
    pub shadow_db: f64,
    pub multipath_gain: f64,
}

impl FadingSample {
    pub const UNIT: FadingSample = FadingSample {
        shadow_db: 0.0,
        multipath_gain: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkQuality {
    pub rx_power_w: f64,
    pub snr: f64,
    pub ber: f64,
    pub prr: f64,
    pub rate_bps: f64,
}

/// Received power in watts. Distances below the reference distance are clamped to it.
pub fn rx_power(params: &ChannelParams, d: f64, fading: FadingSample) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidLink(d));
    }
    let d = d.max(params.ref_dist_m);
    let free_space_ref = (params.wavelength_m / (4.0 * PI * params.ref_dist_m)).powi(2);
    let path = (params.ref_dist_m / d).powf(params.pathloss_exp);
    let shadow = db_to_linear(fading.shadow_db);
    Ok(params.tx_power_w
        * params.antenna_gain()
        * free_space_ref
        * path
        * shadow
        * fading.multipath_gain)
}

pub fn snr(params: &ChannelParams, p_r: f64) -> f64 {
    p_r / params.noise_power_w()
}

/// BPSK-style bit error rate, 0.5 * erfc(sqrt(snr / 2)).
pub fn ber(snr: f64) -> f64 {
    0.5 * libm::erfc((snr.max(0.0) / 2.0).sqrt())
}

pub fn prr(ber: f64) -> f64 {
    (1.0 - ber).clamp(PRR_FLOOR, PRR_CEIL)
}

/// Shannon rate in bits per second.
pub fn link_rate(params: &ChannelParams, snr: f64) -> f64 {
    params.bandwidth_hz * (1.0 + snr.max(0.0)).log2()
}

/// Log-normal shadowing in dB and unit-mean exponential multipath power.
pub fn sample_fading<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> FadingSample {
    let shadow_db = if params.shadow_sigma_db > 0.0 {
        Normal::new(0.0, params.shadow_sigma_db)
            .expect("sigma validated non-negative")
            .sample(rng)
    } else {
        0.0
    };
    let multipath_gain: f64 = Exp1.sample(rng);
    FadingSample {
        shadow_db,
        multipath_gain,
    }
}

pub fn assess_link(params: &ChannelParams, d: f64, fading: FadingSample) -> Result<LinkQuality> {
    let rx_power_w = rx_power(params, d, fading)?;
    let snr = snr(params, rx_power_w);
    let ber = ber(snr);
    Ok(LinkQuality {
        rx_power_w,
        snr,
        ber,
        prr: prr(ber),
        rate_bps: link_rate(params, snr),
    })
}
