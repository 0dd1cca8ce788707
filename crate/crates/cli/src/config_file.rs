//! Experiment configuration: a flat JSON file with SI units spelled out in
//! the key names, validated against every pipeline precondition before any
//! computation starts.

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ofdm_sensing::channel::Target;
use ofdm_sensing::window::Window;
use ofdm_sensing::OfdmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub range_m: f64,
    pub velocity_mps: f64,
    #[serde(default = "one")]
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
}

fn one() -> f64 {
    1.0
}

impl TargetSpec {
    pub fn to_target(self) -> Target {
        Target::new(
            self.range_m,
            self.velocity_mps,
            Complex64::new(self.alpha_re, self.alpha_im),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// AWGN added to the received time-domain frame at `snr_db`.
    Time,
    /// Complex Gaussian noise added to the echo grid at `gamma_db`.
    Grid,
    /// Noiseless run.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "d_n_subcarriers")]
    pub n_subcarriers: usize,
    #[serde(default = "d_cp_len")]
    pub cp_len: usize,
    #[serde(default = "d_symbol_duration_s")]
    pub symbol_duration_s: f64,
    #[serde(default = "d_carrier_freq_hz")]
    pub carrier_freq_hz: f64,
    #[serde(default = "d_n_symbols")]
    pub n_symbols: usize,
    #[serde(default = "d_targets")]
    pub targets: Vec<TargetSpec>,
    #[serde(default = "d_taps_per_branch")]
    pub taps_per_branch: usize,
    #[serde(default = "d_window")]
    pub range_window: String,
    #[serde(default = "d_window")]
    pub doppler_window: String,
    #[serde(default = "d_noise_mode")]
    pub noise_mode: NoiseMode,
    /// Grid SNR in dB for `noise_mode = "grid"` and the sweeps. The string
    /// "inf" means noiseless.
    #[serde(default = "d_gamma_db", with = "flexible_f64")]
    pub gamma_db: f64,
    /// Frame SNR in dB for `noise_mode = "time"`. The string "inf" means
    /// noiseless.
    #[serde(default = "d_snr_db", with = "flexible_f64")]
    pub snr_db: f64,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_n_peaks")]
    pub n_peaks: usize,
    #[serde(default = "d_peak_guard")]
    pub peak_guard_range: usize,
    #[serde(default = "d_peak_guard")]
    pub peak_guard_doppler: usize,
    #[serde(default = "d_noise_guard")]
    pub noise_guard_range: usize,
    #[serde(default = "d_noise_guard")]
    pub noise_guard_doppler: usize,
    #[serde(default = "d_gamma_list", with = "flexible_f64_vec")]
    pub gamma_list_db: Vec<f64>,
    #[serde(default = "d_p_list")]
    pub p_list: Vec<usize>,
    /// Sweep targets drawn with range in [0, this].
    #[serde(default = "d_max_target_range_m")]
    pub max_target_range_m: f64,
    /// Sweep targets drawn with |velocity| up to this.
    #[serde(default = "d_max_target_speed_mps")]
    pub max_target_speed_mps: f64,
    /// Velocity of the range cut written by `detect`, in m/s.
    #[serde(default)]
    pub cut_velocity_mps: Option<f64>,
    /// Range of the velocity cut written by `detect`, in meters.
    #[serde(default)]
    pub cut_range_m: Option<f64>,
    #[serde(default = "d_out_dir")]
    pub out_dir: String,
    #[serde(default = "d_parallel")]
    pub parallel: usize,
}

fn d_n_subcarriers() -> usize {
    1024
}
fn d_cp_len() -> usize {
    128
}
fn d_symbol_duration_s() -> f64 {
    11e-6
}
fn d_carrier_freq_hz() -> f64 {
    24e9
}
fn d_n_symbols() -> usize {
    256
}
fn d_targets() -> Vec<TargetSpec> {
    vec![
        TargetSpec {
            range_m: 50.0,
            velocity_mps: -10.0,
            alpha_re: 1.0,
            alpha_im: 0.0,
        },
        TargetSpec {
            range_m: 56.0,
            velocity_mps: -10.0,
            alpha_re: 1.0,
            alpha_im: 0.0,
        },
        TargetSpec {
            range_m: 56.0,
            velocity_mps: 0.0,
            alpha_re: 1.0,
            alpha_im: 0.0,
        },
    ]
}
fn d_taps_per_branch() -> usize {
    16
}
fn d_window() -> String {
    "hamming".into()
}
fn d_noise_mode() -> NoiseMode {
    NoiseMode::Grid
}
fn d_gamma_db() -> f64 {
    30.0
}
fn d_snr_db() -> f64 {
    10.0
}
fn d_trials() -> usize {
    1000
}
fn d_n_peaks() -> usize {
    3
}
fn d_peak_guard() -> usize {
    2
}
fn d_noise_guard() -> usize {
    5
}
fn d_gamma_list() -> Vec<f64> {
    vec![-30.0, -20.0, -10.0, 0.0]
}
fn d_p_list() -> Vec<usize> {
    vec![1, 2, 4, 8, 16, 24, 32, 40, 48]
}
fn d_max_target_range_m() -> f64 {
    200.0
}
fn d_max_target_speed_mps() -> f64 {
    110.0
}
fn d_out_dir() -> String {
    "out".into()
}
fn d_parallel() -> usize {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// dB values that may be infinite: JSON numbers, or the strings "inf" and
/// "-inf" (JSON itself cannot spell infinity).
mod flexible_f64 {
    use serde::de::{self, Deserializer, Unexpected};
    use serde::ser::Serializer;
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum NumOrStr {
        Num(f64),
        Str(String),
    }

    pub(super) fn parse(v: NumOrStr) -> Result<f64, String> {
        match v {
            NumOrStr::Num(x) => Ok(x),
            NumOrStr::Str(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("'{s}' is not a number or inf")),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let raw = NumOrStr::deserialize(d)?;
        parse(raw).map_err(|msg| de::Error::invalid_value(Unexpected::Other(&msg), &"a dB value"))
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

}

mod flexible_f64_vec {
    use serde::de::{self, Deserializer, Unexpected};
    use serde::ser::{SerializeSeq, Serializer};
    use serde::Deserialize;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw: Vec<super::flexible_f64::NumOrStr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| {
                super::flexible_f64::parse(v).map_err(|msg| {
                    de::Error::invalid_value(Unexpected::Other(&msg), &"a dB value")
                })
            })
            .collect()
    }

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            if x.is_finite() {
                seq.serialize_element(x)?;
            } else if *x > 0.0 {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element("-inf")?;
            }
        }
        seq.end()
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn ofdm(&self) -> Result<OfdmConfig, String> {
        OfdmConfig::new(
            self.n_subcarriers,
            self.cp_len,
            self.symbol_duration_s,
            self.carrier_freq_hz,
            self.n_symbols,
        )
        .map_err(|e| e.to_string())
    }

    pub fn windows(&self) -> Result<(Window, Window), String> {
        let r = Window::from_str(&self.range_window)
            .map_err(|e| format!("range_window: {e}"))?;
        let d = Window::from_str(&self.doppler_window)
            .map_err(|e| format!("doppler_window: {e}"))?;
        Ok((r, d))
    }

    pub fn targets(&self) -> Vec<Target> {
        self.targets.iter().map(|t| t.to_target()).collect()
    }

    /// Check every module precondition up front so commands can assume a
    /// consistent configuration.
    pub fn validate(&self) -> Result<(), String> {
        let ofdm = self.ofdm()?;
        self.windows()?;
        for (i, t) in self.targets().iter().enumerate() {
            t.validate(&ofdm)
                .map_err(|e| format!("targets[{i}]: {e}"))?;
        }
        if self.taps_per_branch < 1
            || self.taps_per_branch * ofdm.decimation_factor() > ofdm.n_subcarriers
        {
            return Err(format!(
                "taps_per_branch {} out of range for D = {}",
                self.taps_per_branch,
                ofdm.decimation_factor()
            ));
        }
        for &p in &self.p_list {
            if p < 1 || p * ofdm.decimation_factor() > ofdm.n_subcarriers {
                return Err(format!("p_list entry {p} out of range"));
            }
        }
        if self.n_peaks < 1 {
            return Err("n_peaks must be at least 1".into());
        }
        if self.trials < 1 {
            return Err("trials must be at least 1".into());
        }
        let worst = ofdm_sensing::channel::delay_samples(self.max_target_range_m, &ofdm);
        if worst > ofdm.cp_len {
            return Err(format!(
                "max_target_range_m {} puts sweep targets beyond the cyclic prefix",
                self.max_target_range_m
            ));
        }
        Ok(())
    }
}
