//! Deterministic synthetic input fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::GridField;

pub const PLATEAU_HEIGHT: f64 = 255.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Two full rows next to opposite boundaries at [`PLATEAU_HEIGHT`], zero elsewhere.
    PlateauRow,
    /// A few seeded cones.
    Cones,
    /// Seeded smooth random field (a sum of low-frequency waves).
    Random,
}

impl std::str::FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plateau-row" => Ok(Pattern::PlateauRow),
            "cones" => Ok(Pattern::Cones),
            "random" => Ok(Pattern::Random),
            other => Err(Error::Input(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Rows raised by the plateau pattern.
pub fn plateau_rows(n: usize) -> [usize; 2] {
    [1, n - 2]
}

/// Generates an n×n field with integer values in `0..=255`.
pub fn generate(pattern: Pattern, n: usize, seed: u64) -> Result<GridField> {
    if n < 2 {
        return Err(Error::Input(format!("mesh side must be >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match pattern {
        Pattern::PlateauRow => {
            if n < 5 {
                return Err(Error::Input(format!(
                    "plateau-row needs n >= 5 so the rows are separated, got {n}"
                )));
            }
            let rows = plateau_rows(n);
            GridField::from_fn(n, |i, _| if rows.contains(&i) { PLATEAU_HEIGHT } else { 0.0 })
        }
        Pattern::Cones => {
            let cones: Vec<(f64, f64, f64, f64)> = (0..3)
                .map(|_| {
                    let ci = rng.gen_range(0.0..n as f64);
                    let cj = rng.gen_range(0.0..n as f64);
                    let radius = rng.gen_range(n as f64 / 6.0..n as f64 / 2.0).max(1.0);
                    let height = rng.gen_range(128.0..=255.0);
                    (ci, cj, radius, height)
                })
                .collect();
            GridField::from_fn(n, |i, j| {
                cones
                    .iter()
                    .map(|&(ci, cj, r, h)| {
                        let dist = ((i as f64 - ci).powi(2) + (j as f64 - cj).powi(2)).sqrt();
                        (h * (1.0 - dist / r)).max(0.0)
                    })
                    .fold(0.0, f64::max)
                    .round()
            })
        }
        Pattern::Random => {
            // a handful of low-frequency plane waves with seeded phases
            let modes: Vec<(f64, f64, f64, f64)> = (0..6)
                .map(|_| {
                    let kx = rng.gen_range(1..=3) as f64;
                    let ky = rng.gen_range(1..=3) as f64;
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    let amp = rng.gen_range(0.5..1.0);
                    (kx, ky, phase, amp)
                })
                .collect();
            let raw = GridField::from_fn(n, |i, j| {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                modes
                    .iter()
                    .map(|&(kx, ky, ph, a)| a * (std::f64::consts::TAU * (kx * x + ky * y) + ph).cos())
                    .sum()
            })?;
            let (lo, hi) = (raw.min(), raw.max());
            let span = if hi > lo { hi - lo } else { 1.0 };
            let scaled = raw.values().iter().map(|v| ((v - lo) / span * 255.0).round()).collect();
            GridField::new(n, scaled)
        }
    }
}
