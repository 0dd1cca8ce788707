//! Implementations of the experiment subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;

use ofdm_sensing::channel::{add_awgn, delay_samples, synthesize_echo};
use ofdm_sensing::decimator::{decimate_grid, design_filter};
use ofdm_sensing::dfos::{dfos_rdm, estimate_dfos_guarded};
use ofdm_sensing::fos::{ambiguity_limits, estimate_fos_guarded, fos_rdm};
use ofdm_sensing::io::{sig9, write_cut_csv, write_grid_csv, write_rdm_csv, write_taps_csv};
use ofdm_sensing::metrics::{
    bench_pipelines, complexity_model, dfos_range_cut_db, dfos_velocity_cut_db,
    fos_range_cut_db, fos_velocity_cut_db, p_sweep, snr_sweep, SweepSetup,
};
use ofdm_sensing::preproc::{inject_grid_noise, preprocess, EchoGrid};
use ofdm_sensing::rdm::Detection;
use ofdm_sensing::waveform::{generate_data, modulate};
use ofdm_sensing::window::Window;
use ofdm_sensing::{trial_seed, OfdmConfig};

use crate::config_file::{ExperimentConfig, NoiseMode};
use crate::Method;

const CUT_OVERSAMPLE: usize = 4;

fn out_path(exp: &ExperimentConfig, name: &str) -> PathBuf {
    Path::new(&exp.out_dir).join(name)
}

fn create(exp: &ExperimentConfig, name: &str) -> anyhow::Result<BufWriter<File>> {
    std::fs::create_dir_all(&exp.out_dir)
        .with_context(|| format!("creating output directory {}", exp.out_dir))?;
    let path = out_path(exp, name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Record the fully-resolved configuration next to the outputs so a run
/// can be reproduced from its artifacts alone.
fn write_resolved_config(exp: &ExperimentConfig) -> anyhow::Result<()> {
    let mut out = create(exp, "config.json")?;
    out.write_all(exp.to_json().as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Run the transmit/echo/pre-processing chain described by the config.
fn build_grid(exp: &ExperimentConfig, config: &OfdmConfig) -> anyhow::Result<EchoGrid> {
    let data = generate_data(config, exp.seed);
    let tx = modulate(&data, config)?;
    let mut echo = synthesize_echo(&tx, &exp.targets(), config)?;
    if exp.noise_mode == NoiseMode::Time {
        echo = add_awgn(&echo, exp.snr_db, trial_seed(exp.seed, 1))?;
    }
    let mut grid = preprocess(&echo, &data, config)?;
    if exp.noise_mode == NoiseMode::Grid {
        grid = inject_grid_noise(&grid, exp.gamma_db, trial_seed(exp.seed, 2));
    }
    Ok(grid)
}

fn write_detections(
    out: &mut impl Write,
    method: &str,
    detections: &[Detection],
) -> anyhow::Result<()> {
    for (i, d) in detections.iter().enumerate() {
        writeln!(
            out,
            "{method},{i},{},{},{},{},{}",
            d.range_bin,
            d.doppler_bin_signed,
            sig9(d.range_m),
            sig9(d.velocity_mps),
            sig9(20.0 * d.peak_mag.max(1e-30).log10())
        )?;
    }
    Ok(())
}

/// Range axis (meters) of an oversampled full-rate cut.
fn fos_range_axis(n: usize, oversample: usize, dr: f64) -> Vec<f64> {
    let total = n * oversample;
    (0..total)
        .map(|j| ((total - j) % total) as f64 / oversample as f64 * dr)
        .collect()
}

/// Range axis (meters) of an oversampled decimated cut: the fractional
/// extension of the delay recovery map.
fn dfos_range_axis(q: usize, oversample: usize, dr: f64) -> Vec<f64> {
    let total = q * oversample;
    (0..total)
        .map(|j| {
            let bin = j as f64 / oversample as f64;
            let delay = if bin <= q as f64 / 2.0 {
                q as f64 / 2.0 - bin
            } else {
                1.5 * q as f64 - bin
            };
            delay * dr
        })
        .collect()
}

/// Velocity axis (m/s) of an oversampled Doppler cut.
fn velocity_axis(m: usize, oversample: usize, dv: f64) -> Vec<f64> {
    let total = m * oversample;
    (0..total)
        .map(|j| {
            let bin = j as f64 / oversample as f64;
            let signed = if bin <= m as f64 / 2.0 {
                bin
            } else {
                bin - m as f64
            };
            signed * dv
        })
        .collect()
}

pub fn cmd_detect(exp: &ExperimentConfig, method: Method) -> anyhow::Result<()> {
    write_resolved_config(exp)?;
    let config = exp.ofdm().map_err(anyhow::Error::msg)?;
    let (wr, wd) = exp.windows().map_err(anyhow::Error::msg)?;
    let lim = ambiguity_limits(&config);
    let grid = build_grid(exp, &config)?;

    let mut det_file = create(exp, "detections.csv")?;
    writeln!(
        det_file,
        "method,peak_idx,range_bin,doppler_bin,r_hat_m,v_hat_mps,peak_db"
    )?;

    let cut_doppler_bin = |v: f64| -> usize {
        let m = config.n_symbols as i64;
        ((v / lim.velocity_resolution_mps).round() as i64).rem_euclid(m) as usize
    };

    if method.runs_fos() {
        let rdm = fos_rdm(&grid, wr, wd, &config)?;
        let detections = estimate_fos_guarded(
            &rdm,
            &config,
            exp.n_peaks,
            exp.peak_guard_range,
            exp.peak_guard_doppler,
        )?;
        write_detections(&mut det_file, "fos", &detections)?;
        write_rdm_csv(&mut create(exp, "rdm_fos.csv")?, &rdm)?;
        if let Some(v) = exp.cut_velocity_mps {
            let cut = fos_range_cut_db(&grid, wr, wd, cut_doppler_bin(v), CUT_OVERSAMPLE);
            let axis =
                fos_range_axis(config.n_subcarriers, CUT_OVERSAMPLE, lim.range_resolution_m);
            write_cut_csv(&mut create(exp, "range_cut_fos.csv")?, "range_m", &axis, &cut)?;
        }
        if let Some(r) = exp.cut_range_m {
            let k_r = delay_samples(r, &config);
            let bin = (config.n_subcarriers - k_r) % config.n_subcarriers;
            let cut = fos_velocity_cut_db(&grid, wr, wd, bin, CUT_OVERSAMPLE);
            let axis = velocity_axis(
                config.n_symbols,
                CUT_OVERSAMPLE,
                lim.velocity_resolution_mps,
            );
            write_cut_csv(
                &mut create(exp, "velocity_cut_fos.csv")?,
                "velocity_mps",
                &axis,
                &cut,
            )?;
        }
        println!(
            "fos: {} detection(s) -> {}",
            detections.len(),
            out_path(exp, "detections.csv").display()
        );
    }

    if method.runs_dfos() {
        let spec = design_filter(exp.taps_per_branch, &config)?;
        let dgrid = decimate_grid(&grid, &spec)?;
        let rdm = dfos_rdm(&dgrid, wr, wd, &config)?;
        let detections = estimate_dfos_guarded(
            &rdm,
            &config,
            exp.n_peaks,
            exp.peak_guard_range,
            exp.peak_guard_doppler,
        )?;
        write_detections(&mut det_file, "dfos", &detections)?;
        write_rdm_csv(&mut create(exp, "rdm_dfos.csv")?, &rdm)?;
        write_taps_csv(&mut create(exp, "filter_taps.csv")?, &spec)?;
        if let Some(v) = exp.cut_velocity_mps {
            let cut = dfos_range_cut_db(&dgrid, wr, wd, cut_doppler_bin(v), CUT_OVERSAMPLE);
            let axis = dfos_range_axis(config.cp_len, CUT_OVERSAMPLE, lim.range_resolution_m);
            write_cut_csv(
                &mut create(exp, "range_cut_dfos.csv")?,
                "range_m",
                &axis,
                &cut,
            )?;
        }
        if let Some(r) = exp.cut_range_m {
            let k_r = delay_samples(r, &config);
            let q = config.cp_len;
            let bin = (q - ((k_r + q / 2) % q)) % q;
            let cut = dfos_velocity_cut_db(&dgrid, wr, wd, bin, CUT_OVERSAMPLE);
            let axis = velocity_axis(
                config.n_symbols,
                CUT_OVERSAMPLE,
                lim.velocity_resolution_mps,
            );
            write_cut_csv(
                &mut create(exp, "velocity_cut_dfos.csv")?,
                "velocity_mps",
                &axis,
                &cut,
            )?;
        }
        println!(
            "dfos: {} detection(s) -> {}",
            detections.len(),
            out_path(exp, "detections.csv").display()
        );
    }
    Ok(())
}

fn sweep_setup(exp: &ExperimentConfig) -> anyhow::Result<SweepSetup> {
    let (wr, wd) = exp.windows().map_err(anyhow::Error::msg)?;
    let mut setup = SweepSetup::new(exp.trials, exp.seed).with_parallel(exp.parallel);
    setup.max_range_m = exp.max_target_range_m;
    setup.max_speed_mps = exp.max_target_speed_mps;
    setup.range_window = wr;
    setup.doppler_window = wd;
    setup.guard_range = exp.noise_guard_range;
    setup.guard_doppler = exp.noise_guard_doppler;
    Ok(setup)
}

pub fn cmd_sweep_p(exp: &ExperimentConfig) -> anyhow::Result<()> {
    write_resolved_config(exp)?;
    let config = exp.ofdm().map_err(anyhow::Error::msg)?;
    let setup = sweep_setup(exp)?;
    let points = p_sweep(&config, &exp.p_list, exp.gamma_db, &setup)?;
    let mut out = create(exp, "sweep_p.csv")?;
    writeln!(out, "p,trials,mean_snr_db,std_db")?;
    for pt in &points {
        writeln!(
            out,
            "{},{},{},{}",
            pt.taps_per_branch,
            pt.report.trials,
            sig9(pt.report.snr_rdm_db),
            sig9(pt.report.std_db)
        )?;
    }
    println!(
        "p sweep at gamma = {} dB, {} trials/point -> {}",
        exp.gamma_db,
        exp.trials,
        out_path(exp, "sweep_p.csv").display()
    );
    Ok(())
}

pub fn cmd_snr_sweep(exp: &ExperimentConfig) -> anyhow::Result<()> {
    write_resolved_config(exp)?;
    let config = exp.ofdm().map_err(anyhow::Error::msg)?;
    let setup = sweep_setup(exp)?;
    let points = snr_sweep(&config, exp.taps_per_branch, &exp.gamma_list_db, &setup)?;
    let mut out = create(exp, "snr_sweep.csv")?;
    writeln!(
        out,
        "gamma_db,fos_snr_db,dfos_snr_db,fos_gain_db,dfos_gain_db,trials"
    )?;
    for pt in &points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(pt.gamma_db),
            sig9(pt.fos.snr_rdm_db),
            sig9(pt.dfos.snr_rdm_db),
            sig9(pt.fos.gain_db),
            sig9(pt.dfos.gain_db),
            pt.fos.trials
        )?;
    }
    println!(
        "snr sweep over {} gamma point(s), {} trials/point -> {}",
        exp.gamma_list_db.len(),
        exp.trials,
        out_path(exp, "snr_sweep.csv").display()
    );
    Ok(())
}

pub fn cmd_bench(exp: &ExperimentConfig, reps: usize) -> anyhow::Result<()> {
    let config = exp.ofdm().map_err(anyhow::Error::msg)?;
    let model = complexity_model(&config, exp.taps_per_branch);
    let times = bench_pipelines(&config, exp.taps_per_branch, reps)?;
    let ms = |s: f64| format!("{:9.3} ms", s * 1e3);
    println!(
        "system: N={} Q={} M={} D={} P={} branch fft={}",
        model.n_subcarriers,
        model.cp_len,
        model.n_symbols,
        config.decimation_factor(),
        model.taps_per_branch,
        model.branch_fft_size
    );
    println!("analytic operation counts");
    println!("  fos rdm:                    {:>12}", model.fos_rdm_ops);
    println!("  dfos rdm:                   {:>12}", model.dfos_rdm_ops);
    println!(
        "  decimation transform, once: {:>12}   per frame: {}",
        model.decimation_ops_once, model.decimation_ops_per_frame
    );
    println!(
        "  decimation direct,    once: {:>12}   per frame: {}",
        model.direct_decimation_ops_once, model.direct_decimation_ops_per_frame
    );
    println!(
        "  fos/dfos ratio, decimation counted once:       {:6.2}",
        model.ratio_paper_accounting
    );
    println!(
        "  fos/dfos ratio, decimation counted per symbol: {:6.2}",
        model.ratio_full_accounting
    );
    println!("wall clock, median of {} reps", times.reps);
    println!("  fos 2-d fft stage:     {}", ms(times.fos_fft_stage_s));
    println!(
        "  dfos 2-d fft stage:    {}   ({:.3}x fos)",
        ms(times.dfos_fft_stage_s),
        times.dfos_fft_stage_s / times.fos_fft_stage_s
    );
    println!(
        "  decimation transform:  {}",
        ms(times.decimation_transform_s)
    );
    println!(
        "  decimation direct:     {}",
        ms(times.decimation_direct_s)
    );
    println!("  full fos pipeline:     {}", ms(times.fos_full_s));
    println!("  full dfos pipeline:    {}", ms(times.dfos_full_s));
    Ok(())
}

pub fn cmd_rdm(
    exp: &ExperimentConfig,
    method: Method,
    dump_grid: bool,
    grid_in: Option<&Path>,
) -> anyhow::Result<()> {
    write_resolved_config(exp)?;
    let config = exp.ofdm().map_err(anyhow::Error::msg)?;
    let (wr, wd) = exp.windows().map_err(anyhow::Error::msg)?;
    let grid = match grid_in {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let grid = ofdm_sensing::io::read_grid_csv(std::io::BufReader::new(file))?;
            if grid.n_subcarriers() != config.n_subcarriers
                || grid.n_symbols() != config.n_symbols
            {
                anyhow::bail!(
                    "grid in {} is {}x{}, config expects {}x{}",
                    path.display(),
                    grid.n_symbols(),
                    grid.n_subcarriers(),
                    config.n_symbols,
                    config.n_subcarriers
                );
            }
            grid
        }
        None => build_grid(exp, &config)?,
    };
    if dump_grid {
        write_grid_csv(&mut create(exp, "grid.csv")?, &grid)?;
        println!("grid -> {}", out_path(exp, "grid.csv").display());
    }
    if method.runs_fos() {
        let rdm = fos_rdm(&grid, wr, wd, &config)?;
        write_rdm_csv(&mut create(exp, "rdm_fos.csv")?, &rdm)?;
        println!("fos rdm -> {}", out_path(exp, "rdm_fos.csv").display());
    }
    if method.runs_dfos() {
        let spec = design_filter(exp.taps_per_branch, &config)?;
        let dgrid = decimate_grid(&grid, &spec)?;
        let rdm = dfos_rdm(&dgrid, wr, wd, &config)?;
        write_rdm_csv(&mut create(exp, "rdm_dfos.csv")?, &rdm)?;
        println!("dfos rdm -> {}", out_path(exp, "rdm_dfos.csv").display());
    }
    Ok(())
}

/// Expose the window parse for tests.
#[allow(dead_code)]
pub fn parse_window(s: &str) -> Result<Window, String> {
    use std::str::FromStr;
    Window::from_str(s)
}
