//! Parameter presets and the constraint checker.
//!
//! All Gaussian widths use the `rho_s(x) = exp(-pi x^2 / s^2)` convention, so a
//! width `s` corresponds to a standard deviation of `s / sqrt(2 pi)`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::is_prime;

/// 62-bit prime, the largest below `2^62` that is `1 mod 2048`.
pub const PAPER62_Q: u64 = 4_611_686_018_427_365_377;

/// `C = 1/sqrt(2 pi)`.
pub const SINGULAR_VALUE_CONSTANT: f64 = 0.398_942_280_401_432_7;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussParams {
    /// Trapdoor sampling width.
    pub sigma: f64,
    /// Gadget sampling width, `sqrt(5) sigma`.
    pub alpha: f64,
    /// Preimage width.
    pub zeta: f64,
    /// Encryption error width.
    pub tau: f64,
    /// Width of the `z, z'` ciphertext components.
    pub gamma: f64,
    /// Only used in the security argument; kept for completeness.
    pub mu: f64,
    /// Tail-cut factor.
    pub t: f64,
    /// Slack `t'` in the zeta rule.
    pub zeta_slack: f64,
    /// Statistical error target of the sigma rule.
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub name: String,
    pub n: usize,
    pub q: u64,
    pub k: usize,
    pub m: usize,
    pub gauss: GaussParams,
    pub security_label: String,
}

/// One violated constraint reported by [`Params::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DegreeNotPowerOfTwo(usize),
    ModulusNotPrime(u64),
    ModulusNotSplitting { q: u64, n: usize },
    GadgetLength { k: usize, expected: usize },
    VectorLength { m: usize, expected: usize },
    NonPositiveWidth(&'static str),
    SigmaTooSmall { sigma: f64, min: f64 },
    AlphaMismatch { alpha: f64, expected: f64 },
    ZetaTooSmall { zeta: f64, min: f64 },
    GammaMismatch { gamma: f64, expected: f64 },
    MuMismatch { mu: f64, expected: f64 },
    DecryptionBound { lhs: f64, rhs: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeNotPowerOfTwo(n) => write!(f, "n = {n} is not a power of two"),
            Violation::ModulusNotPrime(q) => write!(f, "q = {q} is not prime"),
            Violation::ModulusNotSplitting { q, n } => write!(f, "q = {q} is not 1 mod 2n = {}", 2 * n),
            Violation::GadgetLength { k, expected } => write!(f, "k = {k}, expected ceil(log2 q) = {expected}"),
            Violation::VectorLength { m, expected } => write!(f, "m = {m}, expected k + 2 = {expected}"),
            Violation::NonPositiveWidth(name) => write!(f, "{name} must be positive"),
            Violation::SigmaTooSmall { sigma, min } => write!(f, "sigma = {sigma} must exceed {min}"),
            Violation::AlphaMismatch { alpha, expected } => write!(f, "alpha = {alpha}, expected sqrt(5) sigma = {expected}"),
            Violation::ZetaTooSmall { zeta, min } => write!(f, "zeta = {zeta} must exceed {min}"),
            Violation::GammaMismatch { gamma, expected } => write!(f, "gamma = {gamma}, expected 2 t sigma tau sqrt(n) = {expected}"),
            Violation::MuMismatch { mu, expected } => write!(f, "mu = {mu}, expected t sigma tau sqrt(2n) = {expected}"),
            Violation::DecryptionBound { lhs, rhs } => write!(f, "decryption bound {lhs:e} is not below floor(q/4) = {rhs:e}"),
        }
    }
}

fn ceil_log2(q: u64) -> usize {
    (64 - (q.max(2) - 1).leading_zeros()) as usize
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

/// Lower bound on sigma: `sqrt(ln(2n / eps) / pi)`.
pub fn sigma_lower_bound(n: usize, epsilon: f64) -> f64 {
    ((2.0 * n as f64 / epsilon).ln() / PI).sqrt()
}

/// Lower bound on zeta: `sqrt(5) C sigma^2 (sqrt(kn) + sqrt(2n) + t')`.
pub fn zeta_lower_bound(n: usize, k: usize, sigma: f64, slack: f64) -> f64 {
    let n = n as f64;
    5f64.sqrt() * SINGULAR_VALUE_CONSTANT * sigma * sigma * ((k as f64 * n).sqrt() + (2.0 * n).sqrt() + slack)
}

impl GaussParams {
    /// Derives every width from the parameter rules: sigma is the rule's
    /// bound rounded up to two decimals, `tau = sigma`, and zeta is the rule's
    /// bound rounded up to an integer.
    pub fn from_rules(n: usize, k: usize, t: f64, zeta_slack: f64, epsilon: f64) -> Self {
        let sigma = (sigma_lower_bound(n, epsilon) * 100.0).ceil() / 100.0;
        let tau = sigma;
        let alpha = 5f64.sqrt() * sigma;
        let zeta = zeta_lower_bound(n, k, sigma, zeta_slack).floor() + 1.0;
        let nf = n as f64;
        Self {
            sigma,
            alpha,
            zeta,
            tau,
            gamma: 2.0 * t * sigma * tau * nf.sqrt(),
            mu: t * sigma * tau * (2.0 * nf).sqrt(),
            t,
            zeta_slack,
            epsilon,
        }
    }
}

impl Params {
    /// Builds a parameter set for the given ring using the standard rules,
    /// `t = 12`, `eps = 2^-90` and `m = k + 2`.
    pub fn from_rules(name: &str, n: usize, q: u64, zeta_slack: f64, security_label: &str) -> Self {
        let k = ceil_log2(q);
        Self {
            name: name.to_string(),
            n,
            q,
            k,
            m: k + 2,
            gauss: GaussParams::from_rules(n, k, 12.0, zeta_slack, 2f64.powi(-90)),
            security_label: security_label.to_string(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper62" => Ok(Self::from_rules(
                "paper62",
                1024,
                PAPER62_Q,
                80.0,
                "62-bit q, n = 1024 (security level not independently estimated)",
            )),
            "toy17" => Ok(Self::from_rules(
                "toy17",
                8,
                17,
                8.0,
                "toy17 - INSECURE, TESTS ONLY",
            )),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["paper62", "toy17"]
    }

    /// Finds the preset whose ring matches a file fingerprint.
    pub fn preset_by_fingerprint(n: usize, q: u64, k: usize, m: usize) -> Option<Self> {
        Self::preset_names()
            .iter()
            .filter_map(|name| Self::preset(name).ok())
            .find(|p| p.n == n && p.q == q && p.k == k && p.m == m)
    }

    /// Left-hand side of the decryption bound
    /// `t tau sqrt(n) + 2 t^2 tau zeta n + t^2 gamma zeta k n`.
    pub fn decryption_bound_lhs(&self) -> f64 {
        let g = &self.gauss;
        let n = self.n as f64;
        let k = self.k as f64;
        g.t * g.tau * n.sqrt() + 2.0 * g.t * g.t * g.tau * g.zeta * n + g.t * g.t * g.gamma * g.zeta * k * n
    }

    pub fn quarter_q(&self) -> u64 {
        self.q / 4
    }

    pub fn half_q(&self) -> u64 {
        self.q / 2
    }

    /// Evaluates every constraint and returns all violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        let g = &self.gauss;
        if !self.n.is_power_of_two() {
            v.push(Violation::DegreeNotPowerOfTwo(self.n));
        }
        if !is_prime(self.q) {
            v.push(Violation::ModulusNotPrime(self.q));
        }
        if self.q % (2 * self.n as u64) != 1 {
            v.push(Violation::ModulusNotSplitting { q: self.q, n: self.n });
        }
        let k = ceil_log2(self.q);
        if self.k != k {
            v.push(Violation::GadgetLength { k: self.k, expected: k });
        }
        if self.m != self.k + 2 {
            v.push(Violation::VectorLength { m: self.m, expected: self.k + 2 });
        }
        for (name, w) in [
            ("sigma", g.sigma),
            ("alpha", g.alpha),
            ("zeta", g.zeta),
            ("tau", g.tau),
            ("gamma", g.gamma),
            ("mu", g.mu),
            ("t", g.t),
            ("epsilon", g.epsilon),
        ] {
            if !(w > 0.0) {
                v.push(Violation::NonPositiveWidth(name));
            }
        }
        if g.zeta_slack < 0.0 {
            v.push(Violation::NonPositiveWidth("zeta_slack"));
        }
        let sigma_min = sigma_lower_bound(self.n, g.epsilon);
        if !(g.sigma > sigma_min) {
            v.push(Violation::SigmaTooSmall { sigma: g.sigma, min: sigma_min });
        }
        let alpha = 5f64.sqrt() * g.sigma;
        if !close(g.alpha, alpha) {
            v.push(Violation::AlphaMismatch { alpha: g.alpha, expected: alpha });
        }
        let zeta_min = zeta_lower_bound(self.n, self.k, g.sigma, g.zeta_slack);
        if !(g.zeta > zeta_min) {
            v.push(Violation::ZetaTooSmall { zeta: g.zeta, min: zeta_min });
        }
        let nf = self.n as f64;
        let gamma = 2.0 * g.t * g.sigma * g.tau * nf.sqrt();
        if !close(g.gamma, gamma) {
            v.push(Violation::GammaMismatch { gamma: g.gamma, expected: gamma });
        }
        let mu = g.t * g.sigma * g.tau * (2.0 * nf).sqrt();
        if !close(g.mu, mu) {
            v.push(Violation::MuMismatch { mu: g.mu, expected: mu });
        }
        let lhs = self.decryption_bound_lhs();
        let rhs = self.quarter_q() as f64;
        if !(lhs < rhs) {
            v.push(Violation::DecryptionBound { lhs, rhs });
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}
