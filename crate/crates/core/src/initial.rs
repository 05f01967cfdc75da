//! Seeded initial-condition generators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::PairState;
use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

/// Highest cosine mode per axis used by [`Generator::FourierSmooth`].
pub const FOURIER_MAX_MODE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Six spatially constant fields taken from [`InitialSpec::values`].
    Constant,
    /// Random low-mode cosine series per field, amplitudes ∝ 1/(1 + |k|²).
    FourierSmooth,
    /// Gaussian bumps in the membrane potentials, centered at 0.3L (neuron 1)
    /// and 0.7L (neuron 2) on each axis, width 0.1L; v and w are zero.
    Bump,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Constant => "constant",
            Generator::FourierSmooth => "fourier-smooth",
            Generator::Bump => "bump",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Generator::Constant),
            "fourier-smooth" => Ok(Generator::FourierSmooth),
            "bump" => Ok(Generator::Bump),
            other => Err(Error::UnknownGenerator(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub generator: Generator,
    pub seed: u64,
    pub amplitude: f64,
    /// Values for the constant generator, in the order (u1, v1, w1, u2, v2, w2).
    pub values: [f64; 6],
    /// When set, the generated state is rescaled so that ‖g0‖² equals this value.
    pub norm_sq: Option<f64>,
    /// When true, neuron 2 receives a copy of neuron 1's fields.
    pub synchronized: bool,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            generator: Generator::FourierSmooth,
            seed: 0,
            amplitude: 1.0,
            values: [0.0; 6],
            norm_sq: None,
            synchronized: false,
        }
    }
}

impl InitialSpec {
    pub fn fourier(seed: u64, amplitude: f64) -> Self {
        InitialSpec {
            seed,
            amplitude,
            ..Default::default()
        }
    }

    pub fn constant(values: [f64; 6]) -> Self {
        InitialSpec {
            generator: Generator::Constant,
            values,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial data must be finite".into(),
            ));
        }
        if let Some(n) = self.norm_sq {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(Error::InvalidParameter(
                    "norm_sq must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }
}

fn fourier_field(grid: &Grid, rng: &mut ChaCha8Rng, amplitude: f64) -> ScalarField {
    let l = grid.length();
    let modes: Vec<(usize, usize)> = if grid.dimension() == 1 {
        (0..=FOURIER_MAX_MODE).map(|k| (k, 0)).collect()
    } else {
        (0..=FOURIER_MAX_MODE)
            .flat_map(|ky| (0..=FOURIER_MAX_MODE).map(move |kx| (kx, ky)))
            .collect()
    };
    let coeffs: Vec<f64> = modes
        .iter()
        .map(|&(kx, ky)| {
            let xi: f64 = rng.random_range(-1.0..=1.0);
            amplitude * xi / (1.0 + (kx * kx + ky * ky) as f64)
        })
        .collect();
    grid.field_from_fn(|x, y| {
        modes
            .iter()
            .zip(&coeffs)
            .map(|(&(kx, ky), c)| {
                c * (kx as f64 * PI * x / l).cos() * (ky as f64 * PI * y / l).cos()
            })
            .sum()
    })
}

fn bump_field(grid: &Grid, amplitude: f64, center_frac: f64) -> ScalarField {
    let l = grid.length();
    let center = center_frac * l;
    let width = 0.1 * l;
    let two_d = grid.dimension() == 2;
    grid.field_from_fn(|x, y| {
        let mut r2 = (x - center).powi(2);
        if two_d {
            r2 += (y - center).powi(2);
        }
        amplitude * (-r2 / (2.0 * width * width)).exp()
    })
}

/// Builds initial data on `grid`; deterministic for a given spec.
pub fn generate_initial_condition(spec: &InitialSpec, grid: &Grid) -> Result<PairState> {
    spec.validate()?;
    let mut state = match spec.generator {
        Generator::Constant => PairState::constant(grid, spec.values),
        Generator::FourierSmooth => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let fields: [ScalarField; 6] =
                std::array::from_fn(|_| fourier_field(grid, &mut rng, spec.amplitude));
            PairState::from_fields(fields)
        }
        Generator::Bump => {
            let zero = grid.zeros();
            PairState {
                u1: bump_field(grid, spec.amplitude, 0.3),
                v1: zero.clone(),
                w1: zero.clone(),
                u2: bump_field(grid, spec.amplitude, 0.7),
                v2: zero.clone(),
                w2: zero,
            }
        }
    };
    if spec.synchronized {
        state.u2 = state.u1.clone();
        state.v2 = state.v1.clone();
        state.w2 = state.w1.clone();
    }
    if let Some(target) = spec.norm_sq {
        let current = state.norm_sq(grid)?;
        if current > 0.0 {
            state = state.scaled((target / current).sqrt());
        } else if target > 0.0 {
            return Err(Error::Precondition(
                "cannot rescale zero initial data to a positive norm".into(),
            ));
        }
    }
    Ok(state)
}
