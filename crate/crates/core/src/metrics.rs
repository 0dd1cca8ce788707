//! Measurement layer: RDM SNR, processing gain sweeps, the analytic
//! complexity model, mainlobe widths and wall-clock benchmarks.

use num_complex::Complex64;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{delay_samples, doppler_freq};
use crate::config::OfdmConfig;
use crate::decimator::{decimate_grid, design_filter, direct_decimate_row, DecimatorSpec};
use crate::dfos::{dfos_rdm, estimate_dfos};
use crate::fos::{estimate_fos, fos_rdm};
use crate::preproc::{ideal_grid, EchoGrid};
use crate::rdm::Rdm;
use crate::rng::{complex_gaussian, trial_seed};
use crate::window::{make_window, Window};
use crate::{Error, Result};

/// Default guard half-widths (range, Doppler) excluded around the peak when
/// estimating the noise floor.
pub const DEFAULT_NOISE_GUARD: (usize, usize) = (5, 5);

fn floor_outside_guard(
    rdm: &Rdm,
    peak: (usize, usize),
    guard_range: usize,
    guard_doppler: usize,
) -> Result<f64> {
    let (n_range, n_doppler) = (rdm.n_range(), rdm.n_doppler());
    let (pk, pb) = peak;
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for b in 0..n_doppler {
        let db = (b as i64 - pb as i64).rem_euclid(n_doppler as i64);
        let in_doppler_guard =
            db <= guard_doppler as i64 || db >= n_doppler as i64 - guard_doppler as i64;
        for k in 0..n_range {
            if in_doppler_guard {
                let dk = (k as i64 - pk as i64).rem_euclid(n_range as i64);
                if dk <= guard_range as i64 || dk >= n_range as i64 - guard_range as i64 {
                    continue;
                }
            }
            sum += rdm.value(k, b).norm_sqr();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InvalidConfig(
            "guard region covers the entire rdm".into(),
        ));
    }
    let floor = sum / count as f64;
    if floor <= 0.0 || !floor.is_finite() {
        return Err(Error::NoiselessRdm);
    }
    Ok(floor)
}

/// Peak-to-noise-floor ratio of a range-Doppler map in dB.
///
/// The peak is the global magnitude maximum; the floor is the mean |bin|^2
/// outside a (2*guard+1) rectangle around it. A noiseless map has a
/// numerically zero floor and is rejected.
pub fn rdm_snr(rdm: &Rdm, guard_range: usize, guard_doppler: usize) -> Result<f64> {
    let mags = rdm.magnitudes();
    let (mut idx, mut best) = (0usize, 0.0f64);
    for (i, &m) in mags.iter().enumerate() {
        if m > best {
            best = m;
            idx = i;
        }
    }
    let peak = (idx % rdm.n_range(), idx / rdm.n_range());
    let floor = floor_outside_guard(rdm, peak, guard_range, guard_doppler)?;
    // A floor more than 200 dB under the peak is FFT rounding dust, not
    // noise: the map came from a noiseless run.
    if floor <= best * best * 1e-20 {
        return Err(Error::NoiselessRdm);
    }
    Ok(10.0 * (best * best / floor).log10())
}

/// SNR from a signal/noise decomposition of the same trial: the clean map
/// provides the peak power at the known target bin, the noise-only map the
/// floor. Linearity of every stage makes the split exact, and it keeps the
/// estimate unbiased at SNRs where the global argmax would be a noise bin.
pub fn rdm_snr_decomposed(
    signal_rdm: &Rdm,
    noise_rdm: &Rdm,
    peak: (usize, usize),
    guard_range: usize,
    guard_doppler: usize,
) -> Result<f64> {
    if peak.0 >= signal_rdm.n_range() {
        return Err(Error::BinOutOfRange {
            bin: peak.0,
            len: signal_rdm.n_range(),
        });
    }
    if peak.1 >= signal_rdm.n_doppler() {
        return Err(Error::BinOutOfRange {
            bin: peak.1,
            len: signal_rdm.n_doppler(),
        });
    }
    let peak_power = signal_rdm.value(peak.0, peak.1).norm_sqr();
    let floor = floor_outside_guard(noise_rdm, peak, guard_range, guard_doppler)?;
    Ok(10.0 * (peak_power / floor).log10())
}

/// Exact operation counts for one range-Doppler map under the radix-2
/// x log2 x FFT cost model, plus the decimation cost under both
/// accountings: counted once per frame and counted once per symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityReport {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub n_symbols: usize,
    pub taps_per_branch: usize,
    pub branch_fft_size: usize,
    /// M N log2(M N): the full-rate 2-D FFT.
    pub fos_rdm_ops: u64,
    /// M Q log2(M Q): the decimated 2-D FFT.
    pub dfos_rdm_ops: u64,
    /// 2 D Q~ log2 Q~: transform-domain polyphase filtering, one row.
    pub decimation_ops_once: u64,
    /// The same, times M rows.
    pub decimation_ops_per_frame: u64,
    /// P D (Q - P + 1): direct time-domain branch filtering, one row.
    pub direct_decimation_ops_once: u64,
    /// The same, times M rows.
    pub direct_decimation_ops_per_frame: u64,
    /// fos / (dfos + decimation once).
    pub ratio_paper_accounting: f64,
    /// fos / (dfos + decimation per frame).
    pub ratio_full_accounting: f64,
}

/// Closed-form complexity comparison of the two pipelines.
pub fn complexity_model(config: &OfdmConfig, taps_per_branch: usize) -> ComplexityReport {
    let n = config.n_subcarriers as u64;
    let q = config.cp_len as u64;
    let m = config.n_symbols as u64;
    let d = config.decimation_factor() as u64;
    let p = taps_per_branch as u64;
    let qt = (taps_per_branch + config.cp_len - 1).next_power_of_two() as u64;

    let fos_rdm_ops = m * n * (m * n).ilog2() as u64;
    let dfos_rdm_ops = m * q * (m * q).ilog2() as u64;
    let decimation_ops_once = 2 * d * qt * qt.ilog2() as u64;
    let decimation_ops_per_frame = m * decimation_ops_once;
    let direct_decimation_ops_once = p * d * (q - p + 1);
    let direct_decimation_ops_per_frame = m * direct_decimation_ops_once;

    ComplexityReport {
        n_subcarriers: config.n_subcarriers,
        cp_len: config.cp_len,
        n_symbols: config.n_symbols,
        taps_per_branch,
        branch_fft_size: qt as usize,
        fos_rdm_ops,
        dfos_rdm_ops,
        decimation_ops_once,
        decimation_ops_per_frame,
        direct_decimation_ops_once,
        direct_decimation_ops_per_frame,
        ratio_paper_accounting: fos_rdm_ops as f64 / (dfos_rdm_ops + decimation_ops_once) as f64,
        ratio_full_accounting: fos_rdm_ops as f64
            / (dfos_rdm_ops + decimation_ops_per_frame) as f64,
    }
}

/// Width of the mainlobe around `peak_bin` at 3 dB below the peak value,
/// linearly interpolated between bins, in the units of `axis_scale`
/// (e.g. meters per bin). The cut is treated as circular.
pub fn mainlobe_width(cut_db: &[f64], peak_bin: usize, axis_scale: f64) -> Result<f64> {
    let len = cut_db.len();
    if peak_bin >= len {
        return Err(Error::BinOutOfRange {
            bin: peak_bin,
            len,
        });
    }
    let target = cut_db[peak_bin] - 3.0;
    let half_span = len / 2;
    let walk = |dir: i64| -> Result<f64> {
        let mut prev = cut_db[peak_bin];
        for step in 1..=half_span {
            let idx = (peak_bin as i64 + dir * step as i64).rem_euclid(len as i64) as usize;
            let cur = cut_db[idx];
            if cur <= target {
                let frac = (prev - target) / (prev - cur);
                return Ok((step - 1) as f64 + frac);
            }
            prev = cur;
        }
        Err(Error::NoHalfPowerCrossing)
    };
    let right = walk(1)?;
    let left = walk(-1)?;
    Ok((left + right) * axis_scale)
}

fn doppler_project(
    values: &[Complex64],
    n_rows: usize,
    n_cols: usize,
    win_doppler: &[f64],
    doppler_bin: usize,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); n_cols];
    for m in 0..n_rows {
        let phase = Complex64::from_polar(
            1.0,
            -2.0 * std::f64::consts::PI * (doppler_bin * m % n_rows) as f64 / n_rows as f64,
        );
        let w = win_doppler[m] * phase;
        for (o, v) in out.iter_mut().zip(&values[m * n_cols..(m + 1) * n_cols]) {
            *o += w * v;
        }
    }
    out
}

fn padded_spectrum_db(row: &[Complex64], win: &[f64], pad_to: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::default(); pad_to];
    for ((b, v), w) in buf.iter_mut().zip(row).zip(win) {
        *b = v * *w;
    }
    crate::fft::fft_in_place(&mut buf);
    buf.iter().map(|v| 20.0 * v.norm().max(1e-30).log10()).collect()
}

/// Range cut of the full-rate map through `doppler_bin`, oversampled by
/// zero-padding the range FFT. Bin spacing is the range resolution divided
/// by `oversample`.
pub fn fos_range_cut_db(
    grid: &EchoGrid,
    range_window: Window,
    doppler_window: Window,
    doppler_bin: usize,
    oversample: usize,
) -> Vec<f64> {
    let wm = make_window(doppler_window, grid.n_symbols());
    let wn = make_window(range_window, grid.n_subcarriers());
    let row = doppler_project(
        grid.values(),
        grid.n_symbols(),
        grid.n_subcarriers(),
        &wm,
        doppler_bin,
    );
    padded_spectrum_db(&row, &wn, grid.n_subcarriers() * oversample.max(1))
}

/// Range cut of the decimated map through `doppler_bin`; bin spacing is
/// the range resolution divided by `oversample`.
pub fn dfos_range_cut_db(
    dgrid: &crate::decimator::DecimatedGrid,
    range_window: Window,
    doppler_window: Window,
    doppler_bin: usize,
    oversample: usize,
) -> Vec<f64> {
    let wm = make_window(doppler_window, dgrid.n_symbols());
    let wq = make_window(range_window, dgrid.n_samples());
    let row = doppler_project(
        dgrid.values(),
        dgrid.n_symbols(),
        dgrid.n_samples(),
        &wm,
        doppler_bin,
    );
    padded_spectrum_db(&row, &wq, dgrid.cp_len() * oversample.max(1))
}

fn range_project(
    values: &[Complex64],
    n_rows: usize,
    n_cols: usize,
    win_range: &[f64],
    range_bin: usize,
    fft_len: usize,
) -> Vec<Complex64> {
    (0..n_rows)
        .map(|m| {
            values[m * n_cols..(m + 1) * n_cols]
                .iter()
                .zip(win_range)
                .enumerate()
                .map(|(n, (v, w))| {
                    let phase = Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * ((range_bin * n) % fft_len) as f64
                            / fft_len as f64,
                    );
                    v * *w * phase
                })
                .sum()
        })
        .collect()
}

/// Velocity cut of the full-rate map through `range_bin`, oversampled by
/// zero-padding the Doppler FFT.
pub fn fos_velocity_cut_db(
    grid: &EchoGrid,
    range_window: Window,
    doppler_window: Window,
    range_bin: usize,
    oversample: usize,
) -> Vec<f64> {
    let wn = make_window(range_window, grid.n_subcarriers());
    let wm = make_window(doppler_window, grid.n_symbols());
    let col = range_project(
        grid.values(),
        grid.n_symbols(),
        grid.n_subcarriers(),
        &wn,
        range_bin,
        grid.n_subcarriers(),
    );
    padded_spectrum_db(&col, &wm, grid.n_symbols() * oversample.max(1))
}

/// Velocity cut of the decimated map through `range_bin`.
pub fn dfos_velocity_cut_db(
    dgrid: &crate::decimator::DecimatedGrid,
    range_window: Window,
    doppler_window: Window,
    range_bin: usize,
    oversample: usize,
) -> Vec<f64> {
    let wq = make_window(range_window, dgrid.n_samples());
    let wm = make_window(doppler_window, dgrid.n_symbols());
    let col = range_project(
        dgrid.values(),
        dgrid.n_symbols(),
        dgrid.n_samples(),
        &wq,
        range_bin,
        dgrid.cp_len(),
    );
    padded_spectrum_db(&col, &wm, dgrid.n_symbols() * oversample.max(1))
}

/// One sweep point's measured SNR statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrReport {
    pub gamma_db: f64,
    /// Mean measured RDM SNR over the trials, in dB.
    pub snr_rdm_db: f64,
    /// snr_rdm_db - gamma_db: the measured processing gain.
    pub gain_db: f64,
    /// Sample standard deviation of the per-trial SNR, in dB.
    pub std_db: f64,
    pub trials: usize,
}

/// One point of the gamma sweep: both pipelines on the same trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSweepPoint {
    pub gamma_db: f64,
    pub fos: SnrReport,
    pub dfos: SnrReport,
}

/// One point of the filter-length sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PSweepPoint {
    pub taps_per_branch: usize,
    pub report: SnrReport,
}

/// Monte-Carlo setup shared by the sweeps. Targets are drawn uniformly in
/// range and velocity; reflectivity is fixed at 1 so the grid SNR is the
/// injected gamma.
#[derive(Debug, Clone, Copy)]
pub struct SweepSetup {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 or 1 runs serially. Results do not depend on it.
    pub parallel: usize,
    /// Targets drawn with range in [0, max_range_m].
    pub max_range_m: f64,
    /// Targets drawn with velocity in [-max_speed_mps, max_speed_mps].
    pub max_speed_mps: f64,
    pub range_window: Window,
    pub doppler_window: Window,
    pub guard_range: usize,
    pub guard_doppler: usize,
}

impl SweepSetup {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            parallel: 1,
            max_range_m: 200.0,
            max_speed_mps: 110.0,
            range_window: Window::Rectangular,
            doppler_window: Window::Rectangular,
            guard_range: DEFAULT_NOISE_GUARD.0,
            guard_doppler: DEFAULT_NOISE_GUARD.1,
        }
    }

    pub fn with_parallel(mut self, workers: usize) -> Self {
        self.parallel = workers;
        self
    }

    fn validate(&self, config: &OfdmConfig) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        let worst_delay = delay_samples(self.max_range_m, config);
        if worst_delay > config.cp_len {
            return Err(Error::DelayBeyondCp {
                range_m: self.max_range_m,
                delay: worst_delay,
                cp_len: config.cp_len,
            });
        }
        Ok(())
    }
}

fn run_trials<T, F>(trials: usize, parallel: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = parallel.max(1).min(trials.max(1));
    if workers <= 1 {
        return (0..trials).map(f).collect();
    }
    let chunk = trials.div_ceil(workers);
    let mut out: Vec<Option<T>> = (0..trials).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (w, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(w * chunk + i));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("worker filled slot")).collect()
}

fn noise_grid(config: &OfdmConfig, variance: f64, rng: &mut ChaCha8Rng) -> EchoGrid {
    let count = config.n_symbols * config.n_subcarriers;
    let values = (0..count).map(|_| complex_gaussian(rng, variance)).collect();
    EchoGrid::from_rows(values, config.n_symbols, config.n_subcarriers)
        .expect("constructed with matching dimensions")
}

struct TrialScenario {
    delay: usize,
    doppler_hz: f64,
}

fn draw_scenario(config: &OfdmConfig, setup: &SweepSetup, rng: &mut ChaCha8Rng) -> TrialScenario {
    let r: f64 = rng.random_range(0.0..=setup.max_range_m);
    let v: f64 = rng.random_range(-setup.max_speed_mps..=setup.max_speed_mps);
    TrialScenario {
        delay: delay_samples(r, config),
        doppler_hz: doppler_freq(v, config),
    }
}

fn known_doppler_bin(config: &OfdmConfig, doppler_hz: f64) -> usize {
    let m = config.n_symbols as i64;
    let bins = config.n_symbols as f64 * config.frame_duration() * doppler_hz;
    (bins.round() as i64).rem_euclid(m) as usize
}

fn known_fos_range_bin(config: &OfdmConfig, delay: usize) -> usize {
    (config.n_subcarriers - delay) % config.n_subcarriers
}

fn known_dfos_range_bin(config: &OfdmConfig, delay: usize) -> usize {
    let q = config.cp_len;
    (q - ((delay + q / 2) % q)) % q
}

/// Measured processing gain of both pipelines versus the grid SNR gamma.
/// Each trial draws a fresh target and noise realization, runs both
/// pipelines on the same noise, and measures the RDM SNR at the known
/// target bin by signal/noise decomposition.
pub fn snr_sweep(
    config: &OfdmConfig,
    taps_per_branch: usize,
    gammas_db: &[f64],
    setup: &SweepSetup,
) -> Result<Vec<SnrSweepPoint>> {
    config.validate()?;
    setup.validate(config)?;
    for g in gammas_db {
        if !g.is_finite() {
            // An infinite gamma means a noiseless map: surface the same
            // error the SNR measurement itself would produce.
            return Err(Error::NoiselessRdm);
        }
    }
    let spec = design_filter(taps_per_branch, config)?;
    let mut points = Vec::with_capacity(gammas_db.len());
    for (gi, &gamma_db) in gammas_db.iter().enumerate() {
        let variance = 10f64.powf(-gamma_db / 10.0);
        let results: Vec<Result<(f64, f64)>> =
            run_trials(setup.trials, setup.parallel, |trial| {
                let seed = trial_seed(setup.seed, (gi * setup.trials + trial) as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let scenario = draw_scenario(config, setup, &mut rng);
                let clean = ideal_grid(
                    &[(scenario.delay, scenario.doppler_hz, Complex64::new(1.0, 0.0))],
                    config,
                );
                let noise = noise_grid(config, variance, &mut rng);
                let b_star = known_doppler_bin(config, scenario.doppler_hz);

                let s_rdm = fos_rdm(&clean, setup.range_window, setup.doppler_window, config)?;
                let n_rdm = fos_rdm(&noise, setup.range_window, setup.doppler_window, config)?;
                let fos_db = rdm_snr_decomposed(
                    &s_rdm,
                    &n_rdm,
                    (known_fos_range_bin(config, scenario.delay), b_star),
                    setup.guard_range,
                    setup.guard_doppler,
                )?;

                let ds = decimate_grid(&clean, &spec)?;
                let dn = decimate_grid(&noise, &spec)?;
                let sd = dfos_rdm(&ds, setup.range_window, setup.doppler_window, config)?;
                let nd = dfos_rdm(&dn, setup.range_window, setup.doppler_window, config)?;
                let dfos_db = rdm_snr_decomposed(
                    &sd,
                    &nd,
                    (known_dfos_range_bin(config, scenario.delay), b_star),
                    setup.guard_range,
                    setup.guard_doppler,
                )?;
                Ok((fos_db, dfos_db))
            });
        let mut fos_vals = Vec::with_capacity(setup.trials);
        let mut dfos_vals = Vec::with_capacity(setup.trials);
        for r in results {
            let (f, d) = r?;
            fos_vals.push(f);
            dfos_vals.push(d);
        }
        points.push(SnrSweepPoint {
            gamma_db,
            fos: summarize(gamma_db, &fos_vals),
            dfos: summarize(gamma_db, &dfos_vals),
        });
    }
    Ok(points)
}

/// Mean decimated-map SNR versus the branch tap count P at a fixed gamma.
pub fn p_sweep(
    config: &OfdmConfig,
    p_list: &[usize],
    gamma_db: f64,
    setup: &SweepSetup,
) -> Result<Vec<PSweepPoint>> {
    config.validate()?;
    setup.validate(config)?;
    if !gamma_db.is_finite() {
        return Err(Error::NoiselessRdm);
    }
    let variance = 10f64.powf(-gamma_db / 10.0);
    let mut points = Vec::with_capacity(p_list.len());
    for (pi, &p) in p_list.iter().enumerate() {
        let spec = design_filter(p, config)?;
        let results: Vec<Result<f64>> = run_trials(setup.trials, setup.parallel, |trial| {
            let seed = trial_seed(setup.seed, (pi * setup.trials + trial) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scenario = draw_scenario(config, setup, &mut rng);
            let clean = ideal_grid(
                &[(scenario.delay, scenario.doppler_hz, Complex64::new(1.0, 0.0))],
                config,
            );
            let noise = noise_grid(config, variance, &mut rng);
            let b_star = known_doppler_bin(config, scenario.doppler_hz);
            let sd = dfos_rdm(
                &decimate_grid(&clean, &spec)?,
                setup.range_window,
                setup.doppler_window,
                config,
            )?;
            let nd = dfos_rdm(
                &decimate_grid(&noise, &spec)?,
                setup.range_window,
                setup.doppler_window,
                config,
            )?;
            rdm_snr_decomposed(
                &sd,
                &nd,
                (known_dfos_range_bin(config, scenario.delay), b_star),
                setup.guard_range,
                setup.guard_doppler,
            )
        });
        let vals = results.into_iter().collect::<Result<Vec<f64>>>()?;
        points.push(PSweepPoint {
            taps_per_branch: p,
            report: summarize(gamma_db, &vals),
        });
    }
    Ok(points)
}

fn summarize(gamma_db: f64, vals: &[f64]) -> SnrReport {
    let n = vals.len();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    SnrReport {
        gamma_db,
        snr_rdm_db: mean,
        gain_db: mean - gamma_db,
        std_db: var.sqrt(),
        trials: n,
    }
}

/// Median wall-clock seconds for each pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchReport {
    pub reps: usize,
    /// Windowed 2-D FFT of the full-rate grid.
    pub fos_fft_stage_s: f64,
    /// Windowed 2-D FFT of the decimated grid.
    pub dfos_fft_stage_s: f64,
    /// Polyphase transform-domain decimation of all M rows.
    pub decimation_transform_s: f64,
    /// Direct time-domain decimation of all M rows.
    pub decimation_direct_s: f64,
    /// Grid to detections through the full-rate map.
    pub fos_full_s: f64,
    /// Grid to detections through decimation and the small map.
    pub dfos_full_s: f64,
}

fn median_time<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    for _ in 0..3 {
        f();
    }
    let mut times: Vec<f64> = (0..reps)
        .map(|_| {
            let t0 = std::time::Instant::now();
            f();
            t0.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    times[times.len() / 2]
}

/// Time the pipeline stages on a fresh noisy single-target grid.
pub fn bench_pipelines(
    config: &OfdmConfig,
    taps_per_branch: usize,
    reps: usize,
) -> Result<BenchReport> {
    config.validate()?;
    let reps = reps.max(1);
    let spec: DecimatorSpec = design_filter(taps_per_branch, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe9c);
    let clean = ideal_grid(&[(35.min(config.cp_len - 1), -1600.0, Complex64::new(1.0, 0.0))], config);
    let noisy = {
        let noise = noise_grid(config, 1.0, &mut rng);
        let values = clean
            .values()
            .iter()
            .zip(noise.values())
            .map(|(a, b)| a + b)
            .collect();
        EchoGrid::from_rows(values, config.n_symbols, config.n_subcarriers)?
    };
    let dgrid = decimate_grid(&noisy, &spec)?;
    let (wr, wd) = (Window::Rectangular, Window::Rectangular);

    let fos_fft_stage_s = median_time(reps, || {
        std::hint::black_box(fos_rdm(&noisy, wr, wd, config).expect("sized by construction"));
    });
    let dfos_fft_stage_s = median_time(reps, || {
        std::hint::black_box(dfos_rdm(&dgrid, wr, wd, config).expect("sized by construction"));
    });
    let decimation_transform_s = median_time(reps, || {
        std::hint::black_box(decimate_grid(&noisy, &spec).expect("sized by construction"));
    });
    let decimation_direct_s = median_time(reps, || {
        for m in 0..noisy.n_symbols() {
            std::hint::black_box(
                direct_decimate_row(noisy.row(m), &spec).expect("sized by construction"),
            );
        }
    });
    let fos_full_s = median_time(reps, || {
        let rdm = fos_rdm(&noisy, wr, wd, config).expect("sized by construction");
        std::hint::black_box(estimate_fos(&rdm, config, 1).expect("one peak exists"));
    });
    let dfos_full_s = median_time(reps, || {
        let d = decimate_grid(&noisy, &spec).expect("sized by construction");
        let rdm = dfos_rdm(&d, wr, wd, config).expect("sized by construction");
        std::hint::black_box(estimate_dfos(&rdm, config, 1).expect("one peak exists"));
    });

    Ok(BenchReport {
        reps,
        fos_fft_stage_s,
        dfos_fft_stage_s,
        decimation_transform_s,
        decimation_direct_s,
        fos_full_s,
        dfos_full_s,
    })
}
