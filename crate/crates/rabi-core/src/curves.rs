//! Sampling of `p+(t)` on time grids, and curve-to-curve distances.
//!
//! A curve is generated from a full [`Scenario`]; the term list is built
//! once and shared read-only across grid points, which are evaluated
//! independently (in parallel with the default feature) and assembled in
//! grid order, so repeated runs are byte-identical.

use crate::decoherence::apply_decoherence;
use crate::error::{Error, Result};
use crate::model::{DecoherenceConfig, FieldState, PhysicalParams, RepresentationConfig};
use crate::par;
use crate::terms::{generate_terms, TermList};

/// Everything needed to generate one probability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: PhysicalParams,
    pub rep: RepresentationConfig,
    pub state: FieldState,
    pub deco: DecoherenceConfig,
    /// Truncation tail mass for infinite photon sums.
    pub eps: f64,
}

impl Scenario {
    pub fn terms(&self) -> Result<TermList> {
        generate_terms(&self.params, &self.rep, &self.state, self.eps)
    }
}

/// Closed-form uniform time grid: `t_i = start + (stop-start) * i/(count-1)`.
///
/// Samples are computed from the endpoints rather than by accumulating a
/// step, so refining a grid (doubling `count - 1`) reproduces the existing
/// sample times exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    start: f64,
    stop: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("grid must contain at least one point"));
        }
        if !(start >= 0.0) || !start.is_finite() || !stop.is_finite() {
            return Err(Error::domain(format!(
                "grid endpoints must be finite with start >= 0, got [{start}, {stop}]"
            )));
        }
        if count > 1 && !(stop > start) {
            return Err(Error::domain(format!(
                "grid needs stop > start for count > 1, got [{start}, {stop}]"
            )));
        }
        Ok(Self { start, stop, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn times(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let denom = (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + span * (i as f64) / denom).collect()
    }

    /// Same span with the step halved; existing sample times are preserved
    /// bit for bit.
    pub fn refined(&self) -> Self {
        Self { start: self.start, stop: self.stop, count: 2 * self.count - 1 }
    }
}

/// Sampled probability curve plus its generating configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    times: Vec<f64>,
    values: Vec<f64>,
    meta: Scenario,
}

impl Curve {
    /// Assemble a curve from raw samples (for externally computed data);
    /// enforces the grid and range invariants.
    pub fn from_parts(times: Vec<f64>, values: Vec<f64>, meta: Scenario) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::domain(format!(
                "times/values length mismatch: {} vs {}",
                times.len(),
                values.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::domain("curve must contain at least one sample"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("sample times must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(-1e-9..=1.0 + 1e-9).contains(*v)) {
            return Err(Error::domain(format!("curve value {v} outside [-1e-9, 1+1e-9]")));
        }
        Ok(Self { times, values, meta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &Scenario {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }
}

/// Sample `p+(t)` for a scenario over a grid.
pub fn evaluate_curve(scenario: &Scenario, grid: &TimeGrid) -> Result<Curve> {
    let terms = scenario.terms()?;
    evaluate_with_terms(scenario, &terms, grid)
}

/// As [`evaluate_curve`], reusing an already generated term list (callers
/// sweeping decoherence parameters build the terms once).
pub fn evaluate_with_terms(
    scenario: &Scenario,
    terms: &TermList,
    grid: &TimeGrid,
) -> Result<Curve> {
    let times = grid.times();
    let values = par::try_map_slice(&times, |&t| apply_decoherence(terms, t, &scenario.deco))?;
    Curve::from_parts(times, values, scenario.clone())
}

/// Sequential reference evaluation; identical output to [`evaluate_curve`],
/// kept callable in all builds for the benchmark comparison.
pub fn evaluate_curve_seq(scenario: &Scenario, grid: &TimeGrid) -> Result<Curve> {
    let terms = scenario.terms()?;
    let times = grid.times();
    let values: Result<Vec<f64>> =
        times.iter().map(|&t| apply_decoherence(&terms, t, &scenario.deco)).collect();
    Curve::from_parts(times, values?, scenario.clone())
}

/// Maximum absolute pointwise difference between two curves on the same
/// grid.
pub fn sup_distance(c1: &Curve, c2: &Curve) -> Result<f64> {
    if c1.times.len() != c2.times.len()
        || c1.times.iter().zip(&c2.times).any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err(Error::GridMismatch(format!(
            "curves sampled on different grids ({} vs {} points)",
            c1.times.len(),
            c2.times.len()
        )));
    }
    Ok(c1
        .values
        .iter()
        .zip(&c2.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DtModel;

    fn vacuum_scenario(rep: RepresentationConfig, deco: DecoherenceConfig) -> Scenario {
        Scenario {
            params: PhysicalParams::excited(PhysicalParams::g_ph_from_khz_over_pi(47.0), 0.0)
                .unwrap(),
            rep,
            state: FieldState::Vacuum,
            deco,
            eps: 1e-10,
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 90.0, 0).is_err());
        assert!(TimeGrid::new(-1.0, 90.0, 10).is_err());
        assert!(TimeGrid::new(5.0, 5.0, 2).is_err());
        assert_eq!(TimeGrid::new(3.0, 3.0, 1).unwrap().times(), vec![3.0]);
    }

    #[test]
    fn grid_refinement_preserves_samples() {
        let grid = TimeGrid::new(1.0, 90.0, 90).unwrap();
        let fine = grid.refined();
        let coarse_times = grid.times();
        let fine_times = fine.times();
        assert_eq!(fine_times.len(), 179);
        for (i, t) in coarse_times.iter().enumerate() {
            assert_eq!(t.to_bits(), fine_times[2 * i].to_bits());
        }
    }

    #[test]
    fn evaluation_is_referentially_transparent() {
        let sc = vacuum_scenario(
            RepresentationConfig::reducible(500, 0.1, 1.0).unwrap(),
            DecoherenceConfig::new(1.0 / 440.0, DtModel::Constant(0.5), None).unwrap(),
        );
        let grid = TimeGrid::new(1.0, 90.0, 90).unwrap();
        let a = evaluate_curve(&sc, &grid).unwrap();
        let b = evaluate_curve(&sc, &grid).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn parallel_and_sequential_paths_agree_bitwise() {
        let sc = vacuum_scenario(
            RepresentationConfig::reducible(800, 0.1, 1.0).unwrap(),
            DecoherenceConfig::new(0.001, DtModel::Constant(0.3), None).unwrap(),
        );
        let grid = TimeGrid::new(0.5, 60.0, 120).unwrap();
        let par = evaluate_curve(&sc, &grid).unwrap();
        let seq = evaluate_curve_seq(&sc, &grid).unwrap();
        for (x, y) in par.values().iter().zip(seq.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn ideal_vacuum_curve_is_periodic() {
        let sc = vacuum_scenario(
            RepresentationConfig::irreducible(1.0).unwrap(),
            DecoherenceConfig::ideal(),
        );
        let g_ph = sc.params.g_ph;
        let period = std::f64::consts::PI / g_ph;
        let t0 = 5.0;
        let grid = TimeGrid::new(t0, t0 + period, 2).unwrap();
        let curve = evaluate_curve(&sc, &grid).unwrap();
        assert!((curve.values()[0] - curve.values()[1]).abs() < 1e-12);
    }

    #[test]
    fn sup_distance_basics() {
        let sc = vacuum_scenario(
            RepresentationConfig::irreducible(1.0).unwrap(),
            DecoherenceConfig::ideal(),
        );
        let grid = TimeGrid::new(1.0, 30.0, 30).unwrap();
        let c1 = evaluate_curve(&sc, &grid).unwrap();
        assert_eq!(sup_distance(&c1, &c1).unwrap(), 0.0);

        // A uniform +0.03 offset.
        let base = Curve::from_parts(vec![1.0, 2.0, 3.0], vec![0.1, 0.6, 0.25], sc.clone())
            .unwrap();
        let shifted = Curve::from_parts(vec![1.0, 2.0, 3.0], vec![0.13, 0.63, 0.28], sc.clone())
            .unwrap();
        assert!((sup_distance(&base, &shifted).unwrap() - 0.03).abs() < 1e-15);

        let other_grid = TimeGrid::new(1.0, 30.0, 31).unwrap();
        let c3 = evaluate_curve(&sc, &other_grid).unwrap();
        assert!(matches!(sup_distance(&c1, &c3), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn curve_from_parts_validates() {
        let sc = vacuum_scenario(
            RepresentationConfig::irreducible(1.0).unwrap(),
            DecoherenceConfig::ideal(),
        );
        assert!(Curve::from_parts(vec![0.0, 0.0], vec![1.0, 1.0], sc.clone()).is_err());
        assert!(Curve::from_parts(vec![0.0, 1.0], vec![1.0, 1.5], sc.clone()).is_err());
        assert!(Curve::from_parts(vec![0.0], vec![1.0, 0.5], sc.clone()).is_err());
        assert!(Curve::from_parts(vec![], vec![], sc).is_err());
    }
}
