//! Property suites over the whole pipeline: linearity, determinism,
//! round-trips, coherent gain and delay recovery, plus the slower
//! Monte-Carlo calibration checks.

use num_complex::Complex64;
use proptest::prelude::*;

use ofdm_sensing::prelude::*;
use ofdm_sensing::trial_seed;

fn small_config(m: usize) -> OfdmConfig {
    OfdmConfig::new(256, 32, 11e-6, 24e9, m).unwrap()
}

fn fig3_config(m: usize) -> OfdmConfig {
    OfdmConfig::new(1024, 128, 11e-6, 24e9, m).unwrap()
}

fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let ang = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                    x[j] * Complex64::from_polar(1.0, ang)
                })
                .sum()
        })
        .collect()
}

fn argmax_2d(rdm: &Rdm) -> (usize, usize) {
    let mags = rdm.magnitudes();
    let (mut idx, mut best) = (0, 0.0);
    for (i, &m) in mags.iter().enumerate() {
        if m > best {
            best = m;
            idx = i;
        }
    }
    (idx % rdm.n_range(), idx / rdm.n_range())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// DFT of the CP-stripped symbol recovers the data grid.
    #[test]
    fn modulation_round_trips(seed in any::<u64>()) {
        let config = OfdmConfig::new(64, 8, 1e-6, 24e9, 2).unwrap();
        let data = generate_data(&config, seed);
        let tx = modulate(&data, &config).unwrap();
        for m in 0..config.n_symbols {
            let spec = dft(&tx.row(m)[config.cp_len..]);
            for (a, b) in spec.iter().zip(data.row(m)) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    /// The cyclic prefix equals the symbol tail bit for bit.
    #[test]
    fn cyclic_prefix_holds(seed in any::<u64>()) {
        let config = OfdmConfig::new(64, 16, 1e-6, 24e9, 3).unwrap();
        let tx = modulate(&generate_data(&config, seed), &config).unwrap();
        for m in 0..config.n_symbols {
            let row = tx.row(m);
            for k in 0..config.cp_len {
                prop_assert_eq!(row[k], row[k + config.n_subcarriers]);
            }
        }
    }

    /// Mean symbol power is 1/N of mean data power under the 1/N IDFT.
    #[test]
    fn modulation_preserves_scaled_power(seed in any::<u64>()) {
        let config = OfdmConfig::new(128, 16, 1e-6, 24e9, 2).unwrap();
        let data = generate_data(&config, seed);
        let tx = modulate(&data, &config).unwrap();
        let n = config.n_subcarriers as f64;
        for m in 0..config.n_symbols {
            let px: f64 =
                tx.row(m)[config.cp_len..].iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            let ps: f64 = data.row(m).iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
            prop_assert!((px - ps / n).abs() < 1e-12);
        }
    }

    /// Echo synthesis is linear: a target list equals the sum of singles.
    #[test]
    fn echo_superposition_is_additive(
        r1 in 0.0f64..35.0,
        r2 in 0.0f64..35.0,
        v1 in -110.0f64..110.0,
        v2 in -110.0f64..110.0,
        seed in any::<u64>(),
    ) {
        let config = small_config(2);
        let tx = modulate(&generate_data(&config, seed), &config).unwrap();
        let a = Target::new(r1, v1, Complex64::new(0.8, 0.1));
        let b = Target::new(r2, v2, Complex64::new(-0.4, 0.6));
        let both = synthesize_echo(&tx, &[a, b], &config).unwrap();
        let ea = synthesize_echo(&tx, &[a], &config).unwrap();
        let eb = synthesize_echo(&tx, &[b], &config).unwrap();
        for ((s, x), y) in both.values().iter().zip(ea.values()).zip(eb.values()) {
            prop_assert!((s - (x + y)).norm() < 1e-12);
        }
    }

    /// Sample delay is monotone non-decreasing in range.
    #[test]
    fn delay_is_monotone(r1 in 0.0f64..40.0, dr in 0.0f64..10.0) {
        let config = small_config(1);
        prop_assert!(delay_samples(r1 + dr, &config) >= delay_samples(r1, &config));
    }

    /// Pre-processing cancels the data symbols: any two transmissions of
    /// the same scenario produce the same grid.
    #[test]
    fn preprocessing_is_data_independent(
        seed1 in any::<u64>(),
        seed2 in any::<u64>(),
        r in 0.0f64..35.0,
        v in -110.0f64..110.0,
    ) {
        let config = small_config(2);
        let target = Target::new(r, v, Complex64::new(1.0, 0.0));
        let run = |seed: u64| {
            let data = generate_data(&config, seed);
            let tx = modulate(&data, &config).unwrap();
            let echo = synthesize_echo(&tx, &[target], &config).unwrap();
            preprocess(&echo, &data, &config).unwrap()
        };
        let (a, b) = (run(seed1), run(seed2));
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    /// Noiseless grids match the closed-form tone model.
    #[test]
    fn grid_matches_tone_model(
        r in 0.0f64..35.0,
        v in -110.0f64..110.0,
        seed in any::<u64>(),
    ) {
        let config = small_config(2);
        let target = Target::new(r, v, Complex64::new(1.0, 0.0));
        let data = generate_data(&config, seed);
        let tx = modulate(&data, &config).unwrap();
        let echo = synthesize_echo(&tx, &[target], &config).unwrap();
        let grid = preprocess(&echo, &data, &config).unwrap();
        let k_r = target.delay_samples(&config);
        let mu = target.doppler_freq(&config);
        let n = config.n_subcarriers;
        for m in 0..config.n_symbols {
            for i in 0..n {
                let ang = -2.0 * std::f64::consts::PI * ((i * k_r) % n) as f64 / n as f64
                    + 2.0 * std::f64::consts::PI * m as f64 * config.frame_duration() * mu;
                prop_assert!((grid.get(m, i) - Complex64::from_polar(1.0, ang)).norm() < 1e-10);
            }
        }
    }

    /// Scaling the grid by any nonzero constant leaves the peak bins alone.
    #[test]
    fn rdm_argmax_is_scale_invariant(
        k_r in 0usize..32,
        b in 0i64..8,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        prop_assume!(re * re + im * im > 1e-4);
        let config = small_config(8);
        let mu = b as f64 / (config.n_symbols as f64 * config.frame_duration());
        let grid = ideal_grid(&[(k_r, mu, Complex64::new(1.0, 0.0))], &config);
        let scale = Complex64::new(re, im);
        let scaled = EchoGrid::from_rows(
            grid.values().iter().map(|v| v * scale).collect(),
            grid.n_symbols(),
            grid.n_subcarriers(),
        ).unwrap();
        let a = fos_rdm(&grid, Window::Rectangular, Window::Rectangular, &config).unwrap();
        let s = fos_rdm(&scaled, Window::Rectangular, Window::Rectangular, &config).unwrap();
        prop_assert_eq!(argmax_2d(&a), argmax_2d(&s));
    }

    /// With rectangular windows and an on-bin tone, the peak magnitude is
    /// exactly M N |alpha| and lands at the predicted bins.
    #[test]
    fn rectangular_coherent_gain(
        k_r in 0usize..=32,
        b in -4i64..=4,
        alpha_re in 0.2f64..2.0,
        alpha_im in -2.0f64..2.0,
    ) {
        let config = small_config(8);
        let m_count = config.n_symbols as f64;
        let mu = b as f64 / (m_count * config.frame_duration());
        let alpha = Complex64::new(alpha_re, alpha_im);
        let grid = ideal_grid(&[(k_r, mu, alpha)], &config);
        let rdm = fos_rdm(&grid, Window::Rectangular, Window::Rectangular, &config).unwrap();
        let (k, bb) = argmax_2d(&rdm);
        prop_assert_eq!(k, (config.n_subcarriers - k_r) % config.n_subcarriers);
        prop_assert_eq!(bb as i64, b.rem_euclid(config.n_symbols as i64));
        let expect = m_count * config.n_subcarriers as f64 * alpha.norm();
        prop_assert!((rdm.value(k, bb).norm() - expect).abs() / expect < 1e-6);
    }

    /// Full-chain estimates land within half a range cell and one velocity
    /// cell of the truth.
    #[test]
    fn estimates_round_trip(
        r in 0.0f64..35.0,
        v in -100.0f64..100.0,
        seed in any::<u64>(),
    ) {
        let config = small_config(16);
        let lim = ambiguity_limits(&config);
        prop_assume!(v.abs() < lim.max_velocity_mps - lim.velocity_resolution_mps);
        let target = Target::new(r, v, Complex64::new(1.0, 0.0));
        let data = generate_data(&config, seed);
        let tx = modulate(&data, &config).unwrap();
        let echo = synthesize_echo(&tx, &[target], &config).unwrap();
        let grid = preprocess(&echo, &data, &config).unwrap();
        let rdm = fos_rdm(&grid, Window::Rectangular, Window::Rectangular, &config).unwrap();
        let det = &estimate_fos(&rdm, &config, 1).unwrap()[0];
        prop_assert!((det.range_m - r).abs() <= lim.range_resolution_m / 2.0 + 1e-9);
        prop_assert!((det.velocity_mps - v).abs() <= lim.velocity_resolution_mps);
    }

    /// Decimation is linear.
    #[test]
    fn decimation_is_linear(seed in any::<u64>()) {
        let config = small_config(1);
        let spec = design_filter(4, &config).unwrap();
        let make = |s: u64| {
            use rand::{RngExt, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
            (0..config.n_subcarriers)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect::<Vec<_>>()
        };
        let u = make(seed);
        let w = make(seed.wrapping_add(1));
        let (ca, cb) = (Complex64::new(0.3, -1.0), Complex64::new(1.4, 0.2));
        let mixed: Vec<Complex64> = u.iter().zip(&w).map(|(x, y)| ca * x + cb * y).collect();
        let lhs = decimate_row(&mixed, &spec).unwrap();
        let du = decimate_row(&u, &spec).unwrap();
        let dw = decimate_row(&w, &spec).unwrap();
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (ca * du[i] + cb * dw[i])).norm() < 1e-12);
        }
    }

    /// Delay recovery is a bijection between bins and delays and inverts
    /// the forward tone placement.
    #[test]
    fn recover_kr_round_trips(q_exp in 3u32..9, k_r_frac in 0.0f64..1.0) {
        let q = 1usize << q_exp;
        let k_r = ((k_r_frac * q as f64) as usize).min(q - 1);
        // Forward: the decimated tone peaks where k_r + Q/2 + bin = aQ.
        let bin = (q - ((k_r + q / 2) % q)) % q;
        prop_assert_eq!(recover_kr(bin, q).unwrap(), k_r);
        // Bijection: each bin maps to a unique delay in [0, Q).
        let mut seen = vec![false; q];
        for b in 0..q {
            let d = recover_kr(b, q).unwrap();
            prop_assert!(d < q && !seen[d]);
            seen[d] = true;
        }
    }

    /// FOS and DFOS agree on the Doppler argmax for noiseless scenarios.
    #[test]
    fn doppler_argmax_agrees_noiseless(
        k_r in 0usize..32,
        v in -110.0f64..110.0,
    ) {
        let config = small_config(8);
        let mu = doppler_freq(v, &config);
        let grid = ideal_grid(&[(k_r, mu, Complex64::new(1.0, 0.0))], &config);
        let spec = design_filter(4, &config).unwrap();
        let fos_map = fos_rdm(&grid, Window::Rectangular, Window::Rectangular, &config).unwrap();
        let dfos_map = dfos_rdm(
            &decimate_grid(&grid, &spec).unwrap(),
            Window::Rectangular,
            Window::Rectangular,
            &config,
        ).unwrap();
        prop_assert_eq!(argmax_2d(&fos_map).1, argmax_2d(&dfos_map).1);
    }
}

#[test]
fn awgn_power_calibrated_over_a_million_samples() {
    // 0 dB SNR: measured noise power within 1% of signal power.
    let config = OfdmConfig::new(1024, 128, 11e-6, 24e9, 1024).unwrap();
    let data = generate_data(&config, 5);
    let tx = modulate(&data, &config).unwrap();
    let echo = synthesize_echo(&tx, &[Target::new(0.0, 0.0, Complex64::new(1.0, 0.0))], &config)
        .unwrap();
    assert!(echo.values().len() >= 1_000_000);
    let noisy = add_awgn(&echo, 0.0, 99).unwrap();
    let signal_power = echo.mean_power();
    let noise_power: f64 = noisy
        .values()
        .iter()
        .zip(echo.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / echo.values().len() as f64;
    assert!(
        (noise_power / signal_power - 1.0).abs() < 0.01,
        "ratio {}",
        noise_power / signal_power
    );
}

#[test]
fn grid_noise_calibrated_over_a_million_entries() {
    let config = OfdmConfig::new(1024, 128, 11e-6, 24e9, 1024).unwrap();
    let clean = ideal_grid(&[(35, 0.0, Complex64::new(1.0, 0.0))], &config);
    assert!(clean.values().len() >= 1_000_000);
    for gamma_db in [0.0, -20.0] {
        let noisy = inject_grid_noise(&clean, gamma_db, 3);
        let measured: f64 = noisy
            .values()
            .iter()
            .zip(clean.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / clean.values().len() as f64;
        let err_db = 10.0 * (measured * 10f64.powf(gamma_db / 10.0)).log10();
        assert!(err_db.abs() < 0.1, "gamma {gamma_db}: error {err_db} dB");
    }
}

#[test]
fn decimator_noise_budget_and_tone_gain() {
    // White noise through the decimator: output variance sigma^2 sum|h|^2,
    // and an in-band tone gains about 10 log10(D) of SNR.
    use rand::{RngExt, SeedableRng};
    let config = fig3_config(1);
    let spec = design_filter(16, &config).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let sigma_sq = 2.0f64;
    let rows = 200usize;
    let mut out_power = 0.0;
    let mut count = 0usize;
    for _ in 0..rows {
        let noise: Vec<Complex64> = (0..config.n_subcarriers)
            .map(|_| {
                let radius = (-sigma_sq * (1.0 - rng.random::<f64>()).ln()).sqrt();
                Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * rng.random::<f64>())
            })
            .collect();
        for v in decimate_row(&noise, &spec).unwrap() {
            out_power += v.norm_sqr();
            count += 1;
        }
    }
    let measured = out_power / count as f64;
    let expected = sigma_sq * spec.noise_power_factor();
    assert!(
        (measured / expected - 1.0).abs() < 0.05,
        "variance ratio {}",
        measured / expected
    );

    // Mid-band tone: SNR gain within 1 dB of 10 log10 D.
    let k_r = config.cp_len / 2;
    let tone: Vec<Complex64> = (0..config.n_subcarriers)
        .map(|i| {
            Complex64::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI * ((i * k_r) % config.n_subcarriers) as f64
                    / config.n_subcarriers as f64,
            )
        })
        .collect();
    let filtered = decimate_row(&tone, &spec).unwrap();
    let sig_out: f64 =
        filtered.iter().map(|v| v.norm_sqr()).sum::<f64>() / filtered.len() as f64;
    let snr_in = 1.0 / sigma_sq;
    let snr_out = sig_out / measured;
    let gain_db = 10.0 * (snr_out / snr_in).log10();
    let expected_gain = 10.0 * (config.decimation_factor() as f64).log10();
    assert!(
        (gain_db - expected_gain).abs() < 1.0,
        "gain {gain_db} dB vs {expected_gain} dB"
    );
}

#[test]
fn doppler_bins_agree_on_noisy_trials() {
    // At gamma >= 0 dB the two pipelines pick the same Doppler bin on at
    // least 99% of randomized trials.
    let config = fig3_config(16);
    let spec = design_filter(16, &config).unwrap();
    let trials = 200;
    let mut agree = 0;
    for t in 0..trials {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial_seed(31, t));
        let r: f64 = rng.random_range(0.0..=200.0);
        let v: f64 = rng.random_range(-110.0..=110.0);
        let grid = ideal_grid(
            &[(delay_samples(r, &config), doppler_freq(v, &config), Complex64::new(1.0, 0.0))],
            &config,
        );
        let noisy = inject_grid_noise(&grid, 0.0, trial_seed(77, t));
        let fos_map =
            fos_rdm(&noisy, Window::Rectangular, Window::Rectangular, &config).unwrap();
        let dfos_map = dfos_rdm(
            &decimate_grid(&noisy, &spec).unwrap(),
            Window::Rectangular,
            Window::Rectangular,
            &config,
        )
        .unwrap();
        if argmax_2d(&fos_map).1 == argmax_2d(&dfos_map).1 {
            agree += 1;
        }
    }
    assert!(
        agree * 100 >= trials * 99,
        "doppler bins agree on only {agree}/{trials} trials"
    );
}

#[test]
fn time_and_grid_noise_give_same_gamma() {
    // AWGN at snr_db through the receiver chain must land within 0.2 dB of
    // direct grid injection at gamma = snr_db (unit-modulus target).
    let config = OfdmConfig::new(1024, 128, 11e-6, 24e9, 64).unwrap();
    let target = Target::new(8.0, 0.0, Complex64::new(1.0, 0.0));
    let data = generate_data(&config, 2);
    let tx = modulate(&data, &config).unwrap();
    let echo = synthesize_echo(&tx, &[target], &config).unwrap();
    let clean = preprocess(&echo, &data, &config).unwrap();

    let snr_db = 5.0;
    let via_time = preprocess(&add_awgn(&echo, snr_db, 4).unwrap(), &data, &config).unwrap();
    let via_grid = inject_grid_noise(&clean, snr_db, 4);
    let power = |g: &EchoGrid| -> f64 {
        g.values()
            .iter()
            .zip(clean.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / clean.values().len() as f64
    };
    let gamma_time = -10.0 * power(&via_time).log10();
    let gamma_grid = -10.0 * power(&via_grid).log10();
    assert!(
        (gamma_time - gamma_grid).abs() < 0.2,
        "time {gamma_time} dB vs grid {gamma_grid} dB"
    );
}
