//! Physical parameters, probability distributions, and the elementary
//! frequency/weight computations everything else is assembled from.
//!
//! Conventions: time in microseconds, angular frequencies in rad/us. The
//! stored coupling is always the renormalized (measurable) magnitude
//! `g_ph = g * sqrt(Z)`; the bare `g` is derived where a finite-`N`
//! formula needs it and never stored.

use crate::error::{Error, Result};

/// Atom-field coupling and atomic initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Renormalized coupling magnitude, rad/us.
    pub g_ph: f64,
    /// Detuning `Delta = omega_0 - omega`, rad/us.
    pub delta: f64,
    /// Initial excited-state probability.
    pub p_plus0: f64,
    /// Initial ground-state probability.
    pub p_minus0: f64,
}

impl PhysicalParams {
    pub fn new(g_ph: f64, delta: f64, p_plus0: f64, p_minus0: f64) -> Result<Self> {
        if !(g_ph > 0.0) || !g_ph.is_finite() {
            return Err(Error::domain(format!("g_ph must be positive, got {g_ph}")));
        }
        if !delta.is_finite() {
            return Err(Error::domain("delta must be finite"));
        }
        for (name, p) in [("p_plus0", p_plus0), ("p_minus0", p_minus0)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} must lie in [0,1], got {p}")));
            }
        }
        if (p_plus0 + p_minus0 - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "initial probabilities must sum to 1, got {}",
                p_plus0 + p_minus0
            )));
        }
        Ok(Self { g_ph, delta, p_plus0, p_minus0 })
    }

    /// Atom initially excited with certainty, the usual experimental setup.
    pub fn excited(g_ph: f64, delta: f64) -> Result<Self> {
        Self::new(g_ph, delta, 1.0, 0.0)
    }

    /// Convert a coupling quoted as `g_ph/pi` in kHz to rad/us.
    pub fn g_ph_from_khz_over_pi(khz: f64) -> f64 {
        std::f64::consts::PI * khz * 1e-3
    }
}

/// Which representation of the mode algebra generates the curve.
#[derive(Debug, Clone, PartialEq)]
pub enum RepresentationConfig {
    /// Standard one-oscillator quantization (the large-`N` limit), with the
    /// cut-off `chi_p` modulating the effective coupling.
    Irreducible { chi_p: f64 },
    /// `n_osc` oscillators of indefinite frequency with renormalization
    /// constant `z_renorm` and cut-off `chi_p`; the binomial success
    /// probability is `Z_p = chi_p * z_renorm`.
    Reducible { n_osc: u32, z_renorm: f64, chi_p: f64 },
}

impl RepresentationConfig {
    pub fn irreducible(chi_p: f64) -> Result<Self> {
        check_chi_p(chi_p)?;
        Ok(Self::Irreducible { chi_p })
    }

    pub fn reducible(n_osc: u32, z_renorm: f64, chi_p: f64) -> Result<Self> {
        if n_osc == 0 {
            return Err(Error::domain("n_osc must be at least 1"));
        }
        if !(z_renorm > 0.0 && z_renorm <= 1.0) {
            return Err(Error::domain(format!("Z must lie in (0,1], got {z_renorm}")));
        }
        check_chi_p(chi_p)?;
        let z_p = chi_p * z_renorm;
        if !(z_p > 0.0 && z_p <= 1.0) {
            return Err(Error::domain(format!("Z_p = chi_p * Z must lie in (0,1], got {z_p}")));
        }
        Ok(Self::Reducible { n_osc, z_renorm, chi_p })
    }

    pub fn chi_p(&self) -> f64 {
        match *self {
            Self::Irreducible { chi_p } => chi_p,
            Self::Reducible { chi_p, .. } => chi_p,
        }
    }

    /// `chi'_p = sqrt(chi_p)`, the amplitude cut-off.
    pub fn chi_p_prime(&self) -> f64 {
        self.chi_p().sqrt()
    }

    /// Binomial success probability `Z_p = chi_p * Z` (reducible only).
    pub fn z_p(&self) -> Option<f64> {
        match *self {
            Self::Irreducible { .. } => None,
            Self::Reducible { z_renorm, chi_p, .. } => Some(chi_p * z_renorm),
        }
    }
}

fn check_chi_p(chi_p: f64) -> Result<()> {
    if !(chi_p > 0.0 && chi_p <= 1.0) {
        return Err(Error::domain(format!("chi_p must lie in (0,1], got {chi_p}")));
    }
    Ok(())
}

/// Initial state of the cavity field.
///
/// For a coherent field the stored amplitude is the bare `|z|` when the
/// representation is reducible (the renormalized `z_ph = z*sqrt(Z)` is
/// derived where needed); for an irreducible run only renormalized
/// quantities exist, so the amplitude is `|z_ph|` itself.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldState {
    Vacuum,
    Thermal { nbar: f64 },
    Coherent { z_amp: f64 },
}

impl FieldState {
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::domain(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(Self::Thermal { nbar })
    }

    pub fn coherent(z_amp: f64) -> Result<Self> {
        if !(z_amp >= 0.0) || !z_amp.is_finite() {
            return Err(Error::domain(format!("z_amp must be >= 0, got {z_amp}")));
        }
        Ok(Self::Coherent { z_amp })
    }
}

/// Time-uncertainty model for one sampled point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtModel {
    /// Fixed uncertainty, us.
    Constant(f64),
    /// Uncertainty growing linearly with the nominal time, `dt(t) = c * t`.
    LinearInT(f64),
}

impl DtModel {
    /// Effective uncertainty at nominal time `t`.
    pub fn dt_at(&self, t: f64) -> f64 {
        match *self {
            DtModel::Constant(dt) => dt,
            DtModel::LinearInT(c) => c * t,
        }
    }
}

/// Dissipative and nondissipative decoherence settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceConfig {
    /// Energy-damping rate, 1/us.
    pub kappa: f64,
    pub dt_model: DtModel,
    /// Cavity lifetime, us; when supplied it must satisfy
    /// `kappa = 1/(2 t_cav)`.
    pub t_cav: Option<f64>,
}

impl DecoherenceConfig {
    pub fn new(kappa: f64, dt_model: DtModel, t_cav: Option<f64>) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("kappa must be >= 0, got {kappa}")));
        }
        match dt_model {
            DtModel::Constant(dt) if !(dt >= 0.0) || !dt.is_finite() => {
                return Err(Error::domain(format!("dt must be >= 0, got {dt}")));
            }
            DtModel::LinearInT(c) if !(c >= 0.0) || !c.is_finite() => {
                return Err(Error::domain(format!("dt slope must be >= 0, got {c}")));
            }
            _ => {}
        }
        if let Some(t_cav) = t_cav {
            if !(t_cav > 0.0) {
                return Err(Error::domain(format!("t_cav must be positive, got {t_cav}")));
            }
            if (kappa - 1.0 / (2.0 * t_cav)).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "kappa = {kappa} inconsistent with t_cav = {t_cav} (expected 1/(2 t_cav))"
                )));
            }
        }
        Ok(Self { kappa, dt_model, t_cav })
    }

    /// Damping fixed by a cavity lifetime: `kappa = 1/(2 t_cav)`.
    pub fn from_t_cav(t_cav: f64, dt_model: DtModel) -> Result<Self> {
        if !(t_cav > 0.0) {
            return Err(Error::domain(format!("t_cav must be positive, got {t_cav}")));
        }
        Self::new(1.0 / (2.0 * t_cav), dt_model, Some(t_cav))
    }

    /// No damping, no timing uncertainty.
    pub fn ideal() -> Self {
        Self { kappa: 0.0, dt_model: DtModel::Constant(0.0), t_cav: None }
    }
}

// ---------------------------------------------------------------------------
// Probability weights
// ---------------------------------------------------------------------------

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Exact factorials up to 15!, all representable in f64.
const FACTORIALS: [f64; 16] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
];

/// Stirling series error `ln(n!) - [ (n+1/2) ln n - n + ln sqrt(2 pi) ]`.
///
/// Keeping this term separate (rather than forming `ln n!` and subtracting
/// large Stirling pieces per weight) is what keeps the binomial and Poisson
/// weights accurate to a few ulp even at `n ~ 1e5`.
fn stirlerr(n: u64) -> f64 {
    debug_assert!(n >= 1);
    if n <= 15 {
        let nf = n as f64;
        return FACTORIALS[n as usize].ln() - ((nf + 0.5) * nf.ln() - nf + LN_SQRT_2PI);
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Kullback deviance `bd0(x, m) = x ln(x/m) + m - x`, evaluated without
/// cancellation when `x` is close to `m`.
fn bd0(x: f64, m: f64) -> f64 {
    debug_assert!(x > 0.0 && m > 0.0);
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1u32;
        loop {
            ej *= v2;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// Thermal (geometric) photon-number distribution
/// `P(n) = nbar^n / (1+nbar)^(n+1)`.
///
/// Computed in the log domain so that large `n` neither overflows nor loses
/// the exponent; exact at `nbar = 0`.
pub fn thermal_pmf(nbar: f64, n: u32) -> Result<f64> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::domain(format!("nbar must be >= 0, got {nbar}")));
    }
    if nbar == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = f64::from(n);
    Ok((nf * nbar.ln() - (nf + 1.0) * nbar.ln_1p()).exp())
}

/// Poisson distribution `P(n) = lambda^n e^(-lambda) / n!`.
pub fn poisson_pmf(lambda: f64, n: u32) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if n == 0 {
        return Ok((-lambda).exp());
    }
    let nf = f64::from(n);
    let log_density = -stirlerr(u64::from(n)) - bd0(nf, lambda);
    Ok(log_density.exp() / (2.0 * std::f64::consts::PI * nf).sqrt())
}

/// Binomial weight `C(N,s) z_p^s (1-z_p)^(N-s)`.
///
/// Saddle-point evaluation keeps every log-scale intermediate small, so the
/// weights stay accurate to a few ulp (and sum to 1 within 1e-12) up to
/// `N >= 1e5`, where a naive log-gamma difference already loses ~1e-9.
/// The degenerate `z_p = 0` and `z_p = 1` cases are one-point distributions
/// handled exactly.
pub fn binomial_weight(n_osc: u32, z_p: f64, s: u32) -> Result<f64> {
    if s > n_osc {
        return Err(Error::domain(format!("s = {s} out of range 0..={n_osc}")));
    }
    if !(0.0..=1.0).contains(&z_p) {
        return Err(Error::domain(format!("z_p must lie in [0,1], got {z_p}")));
    }
    if z_p == 0.0 {
        return Ok(if s == 0 { 1.0 } else { 0.0 });
    }
    if z_p == 1.0 {
        return Ok(if s == n_osc { 1.0 } else { 0.0 });
    }
    let n = f64::from(n_osc);
    let q = 1.0 - z_p;
    if s == 0 {
        return Ok((n * (-z_p).ln_1p()).exp());
    }
    if s == n_osc {
        return Ok((n * z_p.ln()).exp());
    }
    let x = f64::from(s);
    let y = n - x;
    let log_corr = stirlerr(u64::from(n_osc))
        - (stirlerr(u64::from(s)) + stirlerr(u64::from(n_osc - s)))
        - (bd0(x, n * z_p) + bd0(y, n * q));
    let prefactor = (n / (2.0 * std::f64::consts::PI * x * y)).sqrt();
    Ok(prefactor * log_corr.exp())
}

/// Which variance the Gaussian stand-in for the binomial uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianVariant {
    /// Variance `N Z (1-Z)`, the full large-`N` asymptotic.
    FullVariance,
    /// Variance `N Z`, valid for small `Z`.
    SmallZ,
}

/// Gaussian approximant to the binomial weight at occupation `s`.
pub fn gaussian_weight(n_osc: u32, z: f64, s: u32, variant: GaussianVariant) -> Result<f64> {
    if n_osc == 0 {
        return Err(Error::domain("n_osc must be at least 1"));
    }
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::domain(format!("Z must lie in (0,1), got {z}")));
    }
    let n = f64::from(n_osc);
    let variance = match variant {
        GaussianVariant::FullVariance => n * z * (1.0 - z),
        GaussianVariant::SmallZ => n * z,
    };
    let dev = f64::from(s) - n * z;
    Ok((-dev * dev / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt())
}

/// Rabi angular frequency `Omega = sqrt(Delta^2/4 + g2x)` for a squared
/// coupling eigenvalue `g2x` (e.g. `|g|^2 (n+1) s/N`).
pub fn rabi_freq(delta: f64, g2x: f64) -> Result<f64> {
    if !(g2x >= 0.0) || !g2x.is_finite() {
        return Err(Error::domain(format!("g2x must be >= 0, got {g2x}")));
    }
    Ok((delta * delta / 4.0 + g2x).sqrt())
}

/// Smallest `n_max` such that the cumulative mass of `pmf(0..=n_max)`
/// reaches `1 - eps`.
pub(crate) fn truncation_n_max(eps: f64, pmf: impl Fn(u32) -> f64) -> Result<u32> {
    const HARD_CAP: u32 = 1_000_000;
    let mut cum = 0.0;
    let mut comp = 0.0; // Neumaier correction
    for n in 0..=HARD_CAP {
        let w = pmf(n);
        let t = cum + w;
        comp += if cum.abs() >= w.abs() { (cum - t) + w } else { (w - t) + cum };
        cum = t;
        if cum + comp >= 1.0 - eps {
            return Ok(n);
        }
    }
    Err(Error::domain(format!(
        "photon-number truncation did not reach mass 1 - {eps:.1e} within {HARD_CAP} terms"
    )))
}
