//! CSV import and export for grids, maps and filter taps.
//!
//! All numeric output uses nine significant digits in scientific notation,
//! '.' as the decimal separator and LF line endings, so identical runs
//! produce byte-identical files.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::decimator::DecimatorSpec;
use crate::preproc::EchoGrid;
use crate::rdm::Rdm;
use crate::{Error, Result};

/// Nine-significant-digit scientific representation used in every CSV.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Write an echo grid as `m,n,re,im` rows.
pub fn write_grid_csv<W: Write>(out: &mut W, grid: &EchoGrid) -> Result<()> {
    writeln!(out, "m,n,re,im")?;
    for m in 0..grid.n_symbols() {
        for (n, v) in grid.row(m).iter().enumerate() {
            writeln!(out, "{m},{n},{},{}", sig9(v.re), sig9(v.im))?;
        }
    }
    Ok(())
}

/// Read an echo grid written by [`write_grid_csv`]. Entries may appear in
/// any order but every (m, n) cell must be present exactly once.
pub fn read_grid_csv<R: BufRead>(input: R) -> Result<EchoGrid> {
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut max_m = 0usize;
    let mut max_n = 0usize;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if lineno == 0 {
            if line != "m,n,re,im" {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header 'm,n,re,im', got '{line}'"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let parse_idx = |s: &str| -> Result<usize> {
            s.parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad index '{s}': {e}"),
            })
        };
        let parse_f = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad number '{s}': {e}"),
            })
        };
        let m = parse_idx(fields[0])?;
        let n = parse_idx(fields[1])?;
        let re = parse_f(fields[2])?;
        let im = parse_f(fields[3])?;
        max_m = max_m.max(m);
        max_n = max_n.max(n);
        entries.push((m, n, Complex64::new(re, im)));
    }
    let (rows, cols) = (max_m + 1, max_n + 1);
    if entries.is_empty() || entries.len() != rows * cols {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "grid is not rectangular: {} values for {rows} x {cols}",
                entries.len()
            ),
        });
    }
    let mut values = vec![Complex64::default(); rows * cols];
    let mut filled = vec![false; rows * cols];
    for (m, n, v) in entries {
        let idx = m * cols + n;
        if filled[idx] {
            return Err(Error::Parse {
                line: 0,
                message: format!("duplicate entry for ({m}, {n})"),
            });
        }
        filled[idx] = true;
        values[idx] = v;
    }
    EchoGrid::from_rows(values, rows, cols)
}

/// Write a range-Doppler map as
/// `range_bin,doppler_bin,range_m,velocity_mps,mag_db` rows, so the axis
/// mapping rides along with the magnitudes.
pub fn write_rdm_csv<W: Write>(out: &mut W, rdm: &Rdm) -> Result<()> {
    writeln!(out, "range_bin,doppler_bin,range_m,velocity_mps,mag_db")?;
    for b in 0..rdm.n_doppler() {
        let v_mps = rdm.velocity_at_bin(b);
        for k in 0..rdm.n_range() {
            let mag_db = 20.0 * rdm.value(k, b).norm().max(1e-30).log10();
            writeln!(
                out,
                "{k},{b},{},{},{}",
                sig9(rdm.range_at_bin(k)),
                sig9(v_mps),
                sig9(mag_db)
            )?;
        }
    }
    Ok(())
}

/// Write the complex bandpass taps as `l,re,im` rows.
pub fn write_taps_csv<W: Write>(out: &mut W, spec: &DecimatorSpec) -> Result<()> {
    writeln!(out, "l,re,im")?;
    for (l, h) in spec.bandpass_taps().iter().enumerate() {
        writeln!(out, "{l},{},{}", sig9(h.re), sig9(h.im))?;
    }
    Ok(())
}

/// Write an oversampled cut as `bin,axis_value,mag_db` rows.
pub fn write_cut_csv<W: Write>(
    out: &mut W,
    axis_name: &str,
    axis_values: &[f64],
    cut_db: &[f64],
) -> Result<()> {
    writeln!(out, "bin,{axis_name},mag_db")?;
    for (i, (a, m)) in axis_values.iter().zip(cut_db).enumerate() {
        writeln!(out, "{i},{},{}", sig9(*a), sig9(*m))?;
    }
    Ok(())
}
