//! Empirical procedures on top of the curve machinery: least-squares fits
//! of the time-measurement uncertainty, damping-hypothesis comparison,
//! lower-bound scans over the oscillator-number product `N*Z`, and
//! collapse/revival detection in long-time vacuum curves.

use crate::curves::{evaluate_curve, sup_distance, Curve, Scenario, TimeGrid};
use crate::decoherence::apply_decoherence;
use crate::error::{Error, Result};
use crate::model::{
    DecoherenceConfig, DtModel, FieldState, PhysicalParams, RepresentationConfig,
};
use crate::par;
use crate::terms::TermList;

// ---------------------------------------------------------------------------
// Data sets
// ---------------------------------------------------------------------------

/// One measured point: time, excited-state probability, optional error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub t: f64,
    pub p: f64,
    pub err: Option<f64>,
}

/// Measured excited-state probabilities on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: Vec<DataPoint>,
}

impl DataSet {
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("data set must contain at least one point"));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.t >= 0.0) || !p.t.is_finite() {
                return Err(Error::domain(format!("point {i}: t must be >= 0, got {}", p.t)));
            }
            if !(0.0..=1.0).contains(&p.p) {
                return Err(Error::domain(format!(
                    "point {i}: probability must lie in [0,1], got {}",
                    p.p
                )));
            }
            if let Some(e) = p.err {
                if !(e > 0.0) || !e.is_finite() {
                    return Err(Error::domain(format!(
                        "point {i}: error bar must be positive, got {e}"
                    )));
                }
            }
        }
        if !points.windows(2).all(|w| w[0].t < w[1].t) {
            return Err(Error::domain("sample times must be strictly increasing"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True if every point carries an error bar (then fits weight by
    /// `1/err^2`; otherwise unit weights are used throughout).
    pub fn has_error_bars(&self) -> bool {
        self.points.iter().all(|p| p.err.is_some())
    }

    fn slice_window(&self, start: f64, end: f64, last: bool) -> Vec<DataPoint> {
        self.points
            .iter()
            .filter(|p| p.t >= start && (p.t < end || (last && p.t <= end)))
            .copied()
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Delta-t fitting
// ---------------------------------------------------------------------------

/// Which scalar the one-dimensional uncertainty fit adjusts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtFitKind {
    /// Fit a constant `dt`.
    Constant,
    /// Fit the slope `c` of `dt(t) = c * t`.
    LinearInT,
}

/// Fixed model configuration for the uncertainty fits: everything except
/// the fitted scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct FitModel {
    pub params: PhysicalParams,
    pub rep: RepresentationConfig,
    pub state: FieldState,
    /// Damping rate held fixed during the fit, 1/us.
    pub kappa: f64,
    pub dt_kind: DtFitKind,
    pub eps: f64,
}

impl FitModel {
    fn dt_model(&self, x: f64) -> DtModel {
        match self.dt_kind {
            DtFitKind::Constant => DtModel::Constant(x),
            DtFitKind::LinearInT => DtModel::LinearInT(x),
        }
    }

    fn terms(&self) -> Result<TermList> {
        crate::terms::generate_terms(&self.params, &self.rep, &self.state, self.eps)
    }
}

/// Result of a one-dimensional uncertainty fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Best-fitting `dt` (or slope `c` for the linear-in-`t` model), us.
    pub best_dt: f64,
    /// Weighted sum of squared residuals at the optimum.
    pub residual_sse: f64,
    /// Per-window fits, present only for [`fit_delta_t_windowed`].
    pub per_window: Option<Vec<WindowFit>>,
}

/// Outcome of one window in a windowed fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFit {
    pub start: f64,
    pub end: f64,
    pub n_points: usize,
    /// `None` when the window held fewer than 3 points and was skipped.
    pub best_dt: Option<f64>,
    pub sse: Option<f64>,
}

impl WindowFit {
    pub fn skipped(&self) -> bool {
        self.best_dt.is_none()
    }
}

/// Weighted SSE of the model against the data at a candidate `dt` scalar.
fn sse_at(points: &[DataPoint], terms: &TermList, model: &FitModel, x: f64) -> Result<f64> {
    let deco = DecoherenceConfig::new(model.kappa, model.dt_model(x), None)?;
    let mut sse = 0.0;
    for p in points {
        let v = apply_decoherence(terms, p.t, &deco)?;
        let r = v - p.p;
        let w = match p.err {
            Some(e) => 1.0 / (e * e),
            None => 1.0,
        };
        sse += w * r * r;
    }
    Ok(sse)
}

const COARSE_STEP: f64 = 0.02;
const GOLDEN_TOL: f64 = 1e-6;

/// Coarse-grid scan (step <= 0.02 us) followed by golden-section
/// refinement around the best grid point. Deterministic: grid candidates
/// are evaluated in order and ties resolve to the smaller `dt`.
fn minimize_dt(points: &[DataPoint], terms: &TermList, model: &FitModel, dt_range: (f64, f64))
    -> Result<(f64, f64)>
{
    let (lo, hi) = dt_range;
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(Error::domain(format!("degenerate dt range [{lo}, {hi}]")));
    }
    if points.is_empty() {
        return Err(Error::domain("cannot fit an empty data set"));
    }
    let n_steps = ((hi - lo) / COARSE_STEP).ceil() as usize;
    let candidates: Vec<f64> = (0..=n_steps)
        .map(|i| lo + (hi - lo) * (i as f64) / (n_steps as f64))
        .collect();
    let sses = par::try_map_slice(&candidates, |&x| sse_at(points, terms, model, x))?;
    let mut best = 0usize;
    for (i, s) in sses.iter().enumerate() {
        if *s < sses[best] {
            best = i;
        }
    }

    // Golden-section refinement in the bracket around the best grid point.
    let mut a = if best == 0 { lo } else { candidates[best - 1] };
    let mut b = if best == n_steps { hi } else { candidates[best + 1] };
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = sse_at(points, terms, model, c)?;
    let mut fd = sse_at(points, terms, model, d)?;
    while b - a > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sse_at(points, terms, model, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sse_at(points, terms, model, d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, sse_at(points, terms, model, x)?))
}

/// Fit the time-measurement uncertainty to a data set by weighted least
/// squares over `dt_range`.
pub fn fit_delta_t(data: &DataSet, model: &FitModel, dt_range: (f64, f64)) -> Result<FitResult> {
    let terms = model.terms()?;
    let (best_dt, residual_sse) = minimize_dt(data.points(), &terms, model, dt_range)?;
    Ok(FitResult { best_dt, residual_sse, per_window: None })
}

/// Independent [`fit_delta_t`] per window. Windows must tile the data span
/// in ascending order; a window with fewer than 3 points is reported as
/// skipped rather than failing the whole fit.
pub fn fit_delta_t_windowed(
    data: &DataSet,
    model: &FitModel,
    dt_range: (f64, f64),
    windows: &[(f64, f64)],
) -> Result<FitResult> {
    if windows.is_empty() {
        return Err(Error::domain("window list must not be empty"));
    }
    for w in windows {
        if !(w.1 > w.0) {
            return Err(Error::domain(format!("window [{}, {}] is empty", w.0, w.1)));
        }
    }
    if !windows.windows(2).all(|pair| pair[1].0 >= pair[0].1) {
        return Err(Error::domain("windows must be ascending and non-overlapping"));
    }
    let terms = model.terms()?;
    let (best_dt, residual_sse) = minimize_dt(data.points(), &terms, model, dt_range)?;
    let mut per_window = Vec::with_capacity(windows.len());
    for (i, &(start, end)) in windows.iter().enumerate() {
        let pts = data.slice_window(start, end, i == windows.len() - 1);
        if pts.len() < 3 {
            per_window.push(WindowFit {
                start,
                end,
                n_points: pts.len(),
                best_dt: None,
                sse: None,
            });
            continue;
        }
        let (dt, sse) = minimize_dt(&pts, &terms, model, dt_range)?;
        per_window.push(WindowFit {
            start,
            end,
            n_points: pts.len(),
            best_dt: Some(dt),
            sse: Some(sse),
        });
    }
    Ok(FitResult { best_dt, residual_sse, per_window: Some(per_window) })
}

// ---------------------------------------------------------------------------
// Damping-hypothesis comparison
// ---------------------------------------------------------------------------

/// One damping hypothesis after fitting `dt`: residual statistics at the
/// optimum. `mean_signed_residual` is the mean of (model - data); a
/// negative value means the model sits below the data.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFit {
    pub kappa: f64,
    pub best_dt: f64,
    pub sse: f64,
    pub mean_signed_residual: f64,
}

/// Side-by-side fits with cavity damping on (`kappa = 1/(2 t_cav)`) and
/// off (`kappa = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct KappaComparison {
    pub with_damping: HypothesisFit,
    pub without_damping: HypothesisFit,
}

impl KappaComparison {
    /// Hypothesis with the smaller residual.
    pub fn preferred(&self) -> &HypothesisFit {
        if self.with_damping.sse <= self.without_damping.sse {
            &self.with_damping
        } else {
            &self.without_damping
        }
    }
}

fn fit_hypothesis(
    data: &DataSet,
    model: &FitModel,
    kappa: f64,
    dt_range: (f64, f64),
) -> Result<HypothesisFit> {
    let model = FitModel { kappa, ..model.clone() };
    let terms = model.terms()?;
    let (best_dt, sse) = minimize_dt(data.points(), &terms, &model, dt_range)?;
    let deco = DecoherenceConfig::new(kappa, model.dt_model(best_dt), None)?;
    let mut mean = 0.0;
    for p in data.points() {
        mean += apply_decoherence(&terms, p.t, &deco)? - p.p;
    }
    mean /= data.len() as f64;
    Ok(HypothesisFit { kappa, best_dt, sse, mean_signed_residual: mean })
}

/// Fit `dt` under `kappa = 1/(2 t_cav)` and under `kappa = 0`, reporting
/// both residuals and the signed-shift statistic.
pub fn compare_kappa_hypotheses(
    data: &DataSet,
    model: &FitModel,
    dt_range: (f64, f64),
    t_cav: f64,
) -> Result<KappaComparison> {
    if !(t_cav > 0.0) {
        return Err(Error::domain(format!("t_cav must be positive, got {t_cav}")));
    }
    Ok(KappaComparison {
        with_damping: fit_hypothesis(data, model, 1.0 / (2.0 * t_cav), dt_range)?,
        without_damping: fit_hypothesis(data, model, 0.0, dt_range)?,
    })
}

// ---------------------------------------------------------------------------
// Exponential-damping diagnostic
// ---------------------------------------------------------------------------

/// Value of the exponentially damped sinusoid model
/// `sum_i (A_i + B_i e^(-t/t_damp) sin^2(Omega_i t))`, the form used by the
/// original experimental fits. A diagnostic, not a physical model.
pub fn exp_damped_value(terms: &TermList, t: f64, t_damp: f64) -> f64 {
    let decay = (-t / t_damp).exp();
    terms
        .terms()
        .iter()
        .map(|tm| {
            let s = (tm.omega * t).sin();
            tm.a_off + tm.b_amp * decay * s * s
        })
        .sum()
}

/// Best-fitting damping time of the exponential-sinusoid diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDampFit {
    pub best_t_damp: f64,
    pub sse: f64,
}

/// Fit the `e^(-t/T)` damping time to a data set over `t_range`, with the
/// oscillation content fixed by the model's ideal term list.
pub fn fit_exp_damping(
    data: &DataSet,
    model: &FitModel,
    t_range: (f64, f64),
) -> Result<ExpDampFit> {
    let (lo, hi) = t_range;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::domain(format!("degenerate damping-time range [{lo}, {hi}]")));
    }
    let terms = model.terms()?;
    let objective = |t_damp: f64| -> f64 {
        data.points()
            .iter()
            .map(|p| {
                let r = exp_damped_value(&terms, p.t, t_damp) - p.p;
                let w = p.err.map_or(1.0, |e| 1.0 / (e * e));
                w * r * r
            })
            .sum()
    };
    // Coarse scan then golden section, as for the dt fits.
    let n_steps = 200usize;
    let mut best = 0usize;
    let mut best_sse = f64::INFINITY;
    for i in 0..=n_steps {
        let x = lo + (hi - lo) * (i as f64) / (n_steps as f64);
        let sse = objective(x);
        if sse < best_sse {
            best_sse = sse;
            best = i;
        }
    }
    let step = (hi - lo) / (n_steps as f64);
    let mut a = (lo + step * (best as f64 - 1.0)).max(lo);
    let mut b = (lo + step * (best as f64 + 1.0)).min(hi);
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-5 {
        let c = b - gr * (b - a);
        let d = a + gr * (b - a);
        if objective(c) < objective(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let best_t_damp = 0.5 * (a + b);
    Ok(ExpDampFit { best_t_damp, sse: objective(best_t_damp) })
}

// ---------------------------------------------------------------------------
// NZ lower-bound scan
// ---------------------------------------------------------------------------

/// Configuration of a lower-bound scan over the product `NZ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NzScanConfig {
    pub params: PhysicalParams,
    pub state: FieldState,
    pub deco: DecoherenceConfig,
    /// Renormalization constant held fixed; each candidate uses
    /// `N = round(NZ / Z)`.
    pub z_renorm: f64,
    pub chi_p: f64,
    /// Candidate `NZ` values, ascending.
    pub nz_grid: Vec<f64>,
    /// Distance threshold below which reducible and irreducible curves
    /// count as indistinguishable.
    pub eps_dist: f64,
    pub eps_trunc: f64,
    pub grid: TimeGrid,
}

/// One scanned candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NzPoint {
    pub nz: f64,
    /// Oscillator number actually used (`round(nz / Z)`).
    pub n_osc: u32,
    pub sup_distance: f64,
}

/// Full scan profile plus the smallest candidate meeting the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct NzScan {
    pub profile: Vec<NzPoint>,
    /// `None` when no grid point satisfied the bound.
    pub bound: Option<f64>,
}

/// Exhaustively scan the `NZ` grid for the smallest value whose reducible
/// curve stays within `eps_dist` of the irreducible reference everywhere on
/// the observation window. Monotonicity in `NZ` is not assumed.
pub fn scan_nz_lower_bound(cfg: &NzScanConfig) -> Result<NzScan> {
    if cfg.nz_grid.is_empty() {
        return Err(Error::domain("NZ grid must not be empty"));
    }
    if !cfg.nz_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::domain("NZ grid must be strictly ascending"));
    }
    if !(cfg.eps_dist > 0.0) {
        return Err(Error::domain(format!("eps_dist must be positive, got {}", cfg.eps_dist)));
    }
    // For a coherent state the irreducible limit sees the renormalized
    // amplitude z_ph = z sqrt(Z).
    let irr_state = match cfg.state {
        FieldState::Coherent { z_amp } => {
            FieldState::Coherent { z_amp: z_amp * cfg.z_renorm.sqrt() }
        }
        ref other => other.clone(),
    };
    let reference = evaluate_curve(
        &Scenario {
            params: cfg.params.clone(),
            rep: RepresentationConfig::irreducible(cfg.chi_p)?,
            state: irr_state,
            deco: cfg.deco.clone(),
            eps: cfg.eps_trunc,
        },
        &cfg.grid,
    )?;

    let profile = par::try_map_slice(&cfg.nz_grid, |&nz| -> Result<NzPoint> {
        let n_osc = (nz / cfg.z_renorm).round();
        if !(n_osc >= 1.0) || n_osc > u32::MAX as f64 {
            return Err(Error::domain(format!(
                "NZ = {nz} with Z = {} gives unusable N = {n_osc}",
                cfg.z_renorm
            )));
        }
        let n_osc = n_osc as u32;
        let curve = evaluate_curve(
            &Scenario {
                params: cfg.params.clone(),
                rep: RepresentationConfig::reducible(n_osc, cfg.z_renorm, cfg.chi_p)?,
                state: cfg.state.clone(),
                deco: cfg.deco.clone(),
                eps: cfg.eps_trunc,
            },
            &cfg.grid,
        )?;
        Ok(NzPoint { nz, n_osc, sup_distance: sup_distance(&curve, &reference)? })
    })?;

    let bound = profile.iter().find(|p| p.sup_distance < cfg.eps_dist).map(|p| p.nz);
    Ok(NzScan { profile, bound })
}

// ---------------------------------------------------------------------------
// Collapse/revival detection
// ---------------------------------------------------------------------------

/// Thresholds of the envelope-based revival detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalOptions {
    /// Collapse declared when the envelope falls below this fraction of its
    /// initial value.
    pub collapse_frac: f64,
    /// Revival declared at the first envelope local maximum after collapse
    /// exceeding this multiple of the collapsed floor.
    pub revival_factor: f64,
}

impl Default for RevivalOptions {
    fn default() -> Self {
        Self { collapse_frac: 0.1, revival_factor: 3.0 }
    }
}

/// One point of the sliding-window amplitude envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    /// Window center, us.
    pub t: f64,
    /// Peak-to-trough amplitude within the window.
    pub amplitude: f64,
}

/// Detector outcome; absence of collapse or revival within the sampled
/// span is a meaningful result, not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum RevivalOutcome {
    Observed { collapse_time: f64, revival_time: f64 },
    NotObserved,
}

/// Envelope series plus the detection outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct RevivalScan {
    pub envelope: Vec<EnvelopePoint>,
    pub outcome: RevivalOutcome,
}

/// Detect collapse and revival of a long-time vacuum oscillation.
///
/// The envelope is the peak-to-trough amplitude in sliding windows of one
/// carrier period `pi / g_ph`; the curve must resolve that carrier with at
/// least 20 samples per period.
pub fn detect_revival(curve: &Curve, opts: &RevivalOptions) -> Result<RevivalScan> {
    if !(opts.collapse_frac > 0.0 && opts.collapse_frac < 1.0) {
        return Err(Error::domain(format!(
            "collapse fraction must lie in (0,1), got {}",
            opts.collapse_frac
        )));
    }
    if !(opts.revival_factor > 1.0) {
        return Err(Error::domain(format!(
            "revival factor must exceed 1, got {}",
            opts.revival_factor
        )));
    }
    let times = curve.times();
    if times.len() < 3 {
        return Err(Error::domain("curve too short for envelope detection"));
    }
    let period = std::f64::consts::PI / curve.meta().params.g_ph;
    let step = times[1] - times[0];
    let samples_per_period = period / step;
    if samples_per_period < 20.0 {
        return Err(Error::domain(format!(
            "sampling too coarse for envelope detection: {samples_per_period:.1} samples per \
             carrier period ({period:.3} us), need at least 20 (use a step <= {:.4} us)",
            period / 20.0
        )));
    }
    // Window spans at least one full carrier period, so peak and trough are
    // both present regardless of sampling phase.
    let window = samples_per_period.ceil() as usize + 1;
    if times.len() < 2 * window {
        return Err(Error::domain(
            "curve shorter than two carrier periods; nothing to detect".to_string(),
        ));
    }

    let values = curve.values();
    let mut envelope = Vec::with_capacity(times.len() - window);
    for i in 0..=(times.len() - window) {
        let slice = &values[i..i + window];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in slice {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        envelope.push(EnvelopePoint { t: times[i + window / 2], amplitude: hi - lo });
    }

    let initial = envelope[0].amplitude;
    let collapse_idx = envelope
        .iter()
        .position(|e| e.amplitude < opts.collapse_frac * initial);
    let Some(collapse_idx) = collapse_idx else {
        return Ok(RevivalScan { envelope, outcome: RevivalOutcome::NotObserved });
    };
    let collapse_time = envelope[collapse_idx].t;

    let floor = envelope[collapse_idx..]
        .iter()
        .map(|e| e.amplitude)
        .fold(f64::INFINITY, f64::min);
    let threshold = opts.revival_factor * floor;
    let mut revival_time = None;
    for i in (collapse_idx + 1).max(1)..envelope.len() - 1 {
        let e = envelope[i].amplitude;
        if e > threshold && e > envelope[i - 1].amplitude && e >= envelope[i + 1].amplitude {
            revival_time = Some(envelope[i].t);
            break;
        }
    }
    let outcome = match revival_time {
        Some(revival_time) => RevivalOutcome::Observed { collapse_time, revival_time },
        None => RevivalOutcome::NotObserved,
    };
    Ok(RevivalScan { envelope, outcome })
}
