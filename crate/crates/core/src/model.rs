//! Model coefficients, named presets and the closed-form constants that
//! appear in the dissipativity and synchronization estimates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Coefficients of the coupled, partly diffusive Hindmarsh-Rose system.
///
/// Each neuron obeys
///
/// ```text
/// u_t = d Δu + a u² − b u³ + v − w + J + p (u_other − u)
/// v_t = α − v − β u²
/// w_t = q (u − c) − r w
/// ```
///
/// with homogeneous Neumann conditions on `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    /// Reference membrane potential; the only coefficient allowed to be negative.
    pub c: f64,
    /// Input current.
    pub j: f64,
    /// Diffusion coefficient of the membrane potential.
    pub d: f64,
    /// Coupling strength.
    pub p: f64,
}

/// Named parameter sets shipped with the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Classical bursting set: J = 3.281, r = 0.0021, S = 4, φ(s) = 3s² − s³, ψ(s) = 1 − 5s².
    Typical,
    /// Small-constant set with λ = 8 and p* = 5, fast enough for desk-scale checks.
    Test,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Typical => "typical",
            Preset::Test => "test",
        }
    }

    pub fn parameters(self) -> Parameters {
        match self {
            Preset::Typical => Parameters::typical(),
            Preset::Test => Parameters::test_set(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "typical" => Ok(Preset::Typical),
            "test" => Ok(Preset::Test),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset '{other}' (expected 'typical' or 'test')"
            ))),
        }
    }
}

/// Default diffusion coefficient; chosen so that diffusion and reaction
/// timescales are comparable on a unit domain.
pub const DEFAULT_DIFFUSION: f64 = 0.1;

impl Parameters {
    pub fn typical() -> Self {
        let r = 0.0021;
        let s = 4.0;
        Parameters {
            a: 3.0,
            b: 1.0,
            alpha: 1.0,
            beta: 5.0,
            q: r * s,
            r,
            c: -1.6,
            j: 3.281,
            d: DEFAULT_DIFFUSION,
            p: 0.0,
        }
    }

    pub fn test_set() -> Self {
        Parameters {
            a: 1.0,
            b: 1.0,
            alpha: 1.0,
            beta: 1.0,
            q: 8.0,
            r: 1.0,
            c: -1.6,
            j: 1.0,
            d: DEFAULT_DIFFUSION,
            p: 0.0,
        }
    }

    pub fn with_coupling(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    /// Named coefficients in a fixed order, used for validation and echoing.
    pub fn named_values(&self) -> [(&'static str, f64); 10] {
        [
            ("a", self.a),
            ("b", self.b),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("q", self.q),
            ("r", self.r),
            ("c", self.c),
            ("J", self.j),
            ("d", self.d),
            ("p", self.p),
        ]
    }

    pub fn validate(self) -> Result<Self> {
        validate_parameters(self)
    }
}

/// Checks the positivity and finiteness constraints and returns the
/// parameters unchanged, or reports the first violated constraint.
pub fn validate_parameters(raw: Parameters) -> Result<Parameters> {
    for (name, value) in raw.named_values() {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite")));
        }
    }
    if raw.b <= 0.0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    if raw.r <= 0.0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    if raw.d <= 0.0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if raw.p < 0.0 {
        return Err(Error::InvalidParameter("p must be non-negative".into()));
    }
    Ok(raw)
}

/// Weight λ = 8β²/b on ‖U‖² in the synchronization functional.
pub fn compute_lambda(params: &Parameters) -> f64 {
    let lambda = 8.0 * params.beta * params.beta / params.b;
    if lambda == 0.0 {
        log::warn!("lambda = 0 (beta = 0): the synchronization estimate needs lambda > 0");
    }
    lambda
}

/// Coupling threshold p* = λ/2 + a²/b + (q − λ)²/(4λr).
pub fn compute_sync_threshold(params: &Parameters) -> Result<f64> {
    let lambda = compute_lambda(params);
    if lambda == 0.0 {
        return Err(Error::DegenerateLambda);
    }
    let qm = params.q - lambda;
    Ok(lambda / 2.0 + params.a * params.a / params.b + qm * qm / (4.0 * lambda * params.r))
}

/// Exponential synchronization rate data for a coupling strength above threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncRate {
    /// δ = 4pλ − (2λ² + 4λa²/b + (q − λ)²/r).
    pub delta: f64,
    /// μ = min{δ/λ, r}.
    pub mu: f64,
}

/// The part of δ that does not depend on p: 2λ² + 4λa²/b + (q − λ)²/r.
fn delta_offset(params: &Parameters, lambda: f64) -> f64 {
    let qm = params.q - lambda;
    2.0 * lambda * lambda + 4.0 * lambda * params.a * params.a / params.b + qm * qm / params.r
}

pub fn compute_delta_mu(params: &Parameters, p: f64) -> Result<SyncRate> {
    let lambda = compute_lambda(params);
    if lambda == 0.0 {
        return Err(Error::DegenerateLambda);
    }
    let delta = 4.0 * p * lambda - delta_offset(params, lambda);
    if delta <= 0.0 {
        return Err(Error::BelowThreshold {
            p,
            p_star: compute_sync_threshold(params)?,
        });
    }
    Ok(SyncRate {
        delta,
        mu: (delta / lambda).min(params.r),
    })
}

/// Every computable constant of the absorbing-set and synchronization estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub c1: f64,
    pub c2: f64,
    pub r1: f64,
    pub m: f64,
    /// Squared radius of the absorbing ball in H.
    pub k: f64,
    pub c3: f64,
    pub lambda: f64,
    /// `None` when λ = 0.
    pub p_star: Option<f64>,
    /// Present only when the parameters' coupling exceeds `p_star`.
    pub sync_rate: Option<SyncRate>,
    /// |Ω|.
    pub omega_area: f64,
}

impl DerivedConstants {
    pub fn delta(&self) -> Option<f64> {
        self.sync_rate.map(|s| s.delta)
    }

    pub fn mu(&self) -> Option<f64> {
        self.sync_rate.map(|s| s.mu)
    }

    /// max{C1, 1} / min{C1, 1}.
    pub fn norm_ratio(&self) -> f64 {
        self.c1.max(1.0) / self.c1.min(1.0)
    }

    /// Uniform-in-time bound on ‖g(t)‖² given ‖g0‖².
    pub fn global_bound(&self, g0_norm_sq: f64) -> f64 {
        self.norm_ratio() * g0_norm_sq + self.m * self.omega_area / self.c1.min(1.0)
    }

    /// Constants of the time-integrated E-norm estimate on [0, 1].
    ///
    /// Implementation-derived: M1 = max{C1,1}(1/(C1 d) + 1/min{C1,1}),
    /// M2 = (2C2 + C1²/16)/(C1 d) + M/min{C1,1}.
    pub fn integrated_e_norm_constants(&self, d: f64) -> (f64, f64) {
        let lo = self.c1.min(1.0);
        let m1 = self.c1.max(1.0) * (1.0 / (self.c1 * d) + 1.0 / lo);
        let m2 = (2.0 * self.c2 + self.c1 * self.c1 / 16.0) / (self.c1 * d) + self.m / lo;
        (m1, m2)
    }
}

pub fn compute_absorbing_constants(
    params: &Parameters,
    omega_area: f64,
) -> Result<DerivedConstants> {
    let params = validate_parameters(*params)?;
    if !(omega_area > 0.0 && omega_area.is_finite()) {
        return Err(Error::InvalidParameter(
            "domain area must be positive".into(),
        ));
    }
    let Parameters {
        a,
        b,
        alpha,
        beta,
        q,
        r,
        c,
        j,
        ..
    } = params;

    let c1 = (beta * beta + 4.0) / b;
    let inner = c1 * c1 * (2.0 + 1.0 / r) + c1;
    let c2 = 2.0 * (c1 * a).powi(4)
        + 2.0 * c1 * j * j
        + 2.0 * inner * inner
        + 4.0 * alpha * alpha
        + 2.0 * q * q * c * c / r
        + 2.0 * q.powi(4) / (r * r);
    let r1 = 0.5 * r.min(1.0);
    let m = (2.0 * c2 + c1 * c1 / 16.0) / r1;
    let k = m * omega_area / c1.min(1.0) + 1.0;
    let c3 = a * a / (3.0 * b);

    let lambda = compute_lambda(&params);
    let p_star = compute_sync_threshold(&params).ok();
    let sync_rate = match p_star {
        Some(ps) if params.p > ps => compute_delta_mu(&params, params.p).ok(),
        _ => None,
    };

    Ok(DerivedConstants {
        c1,
        c2,
        r1,
        m,
        k,
        c3,
        lambda,
        p_star,
        sync_rate,
        omega_area,
    })
}

/// Entry time T0 = (1/r1) log⁺(R max{C1,1}/min{C1,1}) into the absorbing ball
/// for initial data with ‖g0‖² ≤ R.
pub fn compute_absorb_entry_time(constants: &DerivedConstants, radius_sq: f64) -> f64 {
    let x = radius_sq * constants.norm_ratio();
    let log_plus = if x > 1.0 { x.ln() } else { 0.0 };
    log_plus / constants.r1
}
