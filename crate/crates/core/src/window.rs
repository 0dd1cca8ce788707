//! Window functions for the range and Doppler transforms.

use std::fmt;
use std::str::FromStr;

/// Supported window kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    /// Symmetric Hamming, w(n) = 0.54 - 0.46 cos(2 pi n / (L - 1)).
    Hamming,
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Rectangular => write!(f, "rectangular"),
            Window::Hamming => write!(f, "hamming"),
        }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rectangular" | "rect" => Ok(Window::Rectangular),
            "hamming" => Ok(Window::Hamming),
            other => Err(format!("unknown window kind '{other}'")),
        }
    }
}

/// Coefficient vector of the requested window.
pub fn make_window(kind: Window, len: usize) -> Vec<f64> {
    assert!(len >= 1, "window length must be at least 1");
    match kind {
        Window::Rectangular => vec![1.0; len],
        Window::Hamming => {
            if len == 1 {
                return vec![1.0];
            }
            (0..len)
                .map(|n| {
                    0.54 - 0.46
                        * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos()
                })
                .collect()
        }
    }
}
