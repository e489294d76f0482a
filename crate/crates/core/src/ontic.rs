//! Discretized ontological models.
//!
//! Ontic states live on a uniform grid over `[0, 2]` (inputs) or `[0, 2]²`
//! (cloner outputs and ideal copies). Densities are piecewise constant per
//! cell, so every integral is an exact finite sum.

use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// Tolerance for structural identities: normalization, row sums,
/// operational equivalences and support containment.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Uniform grid on `[0, 2]^dimension` with `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaGrid {
    dimension: u8,
    n: usize,
}

impl LambdaGrid {
    pub fn new(dimension: u8, n: usize) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::GridMismatch(format!(
                "dimension {dimension} is not 1 or 2"
            )));
        }
        if n < 4 {
            return Err(Error::GridMismatch(format!("resolution {n} is below 4")));
        }
        Ok(Self { dimension, n })
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Cell width `h = 2/n`.
    pub fn cell_width(&self) -> f64 {
        2.0 / self.n as f64
    }

    /// Cell measure `h^dimension`.
    pub fn cell_measure(&self) -> f64 {
        self.cell_width().powi(self.dimension as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn ensure_same(&self, other: &LambdaGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Probability density over the cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicState {
    grid: LambdaGrid,
    density: Vec<f64>,
}

impl EpistemicState {
    pub fn new(grid: LambdaGrid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} cells for a grid of {}",
                density.len(),
                grid.len()
            )));
        }
        if let Some(bad) = density.iter().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(Error::Invariant(format!("density value {bad}")));
        }
        let total: f64 = density.iter().sum::<f64>() * grid.cell_measure();
        if (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::Invariant(format!("density integrates to {total}")));
        }
        Ok(Self { grid, density })
    }

    /// Uniform density on the cells where `support` holds.
    pub fn uniform_on(grid: LambdaGrid, support: impl Fn(usize) -> bool) -> Result<Self> {
        let mask: Vec<bool> = (0..grid.len()).map(support).collect();
        let count = mask.iter().filter(|&&m| m).count();
        if count == 0 {
            return Err(Error::Invariant("empty support".into()));
        }
        let value = 1.0 / (count as f64 * grid.cell_measure());
        Self::new(
            grid,
            mask.into_iter()
                .map(|m| if m { value } else { 0.0 })
                .collect(),
        )
    }

    pub fn uniform(grid: LambdaGrid) -> Self {
        Self::uniform_on(grid, |_| true).expect("full support is never empty")
    }

    pub fn grid(&self) -> LambdaGrid {
        self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Cell masses `density · h^dim`.
    pub fn masses(&self) -> impl Iterator<Item = f64> + '_ {
        let w = self.grid.cell_measure();
        self.density.iter().map(move |d| d * w)
    }

    pub fn support(&self) -> Vec<bool> {
        self.density.iter().map(|&d| d > 0.0).collect()
    }

    /// `(1 - w) self + w other`.
    pub fn mix(&self, other: &EpistemicState, w: f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let w = check_unit("w", w)?;
        Self::new(
            self.grid,
            self.density
                .iter()
                .zip(&other.density)
                .map(|(x, y)| (1.0 - w) * x + w * y)
                .collect(),
        )
    }

    /// Largest cellwise density difference.
    pub fn max_abs_diff(&self, other: &EpistemicState) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .density
            .iter()
            .zip(&other.density)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    /// Integral of the density over the cells where `region` holds.
    pub fn mass_where(&self, region: &[bool]) -> Result<f64> {
        if region.len() != self.grid.len() {
            return Err(Error::GridMismatch("region size".into()));
        }
        Ok(self
            .masses()
            .zip(region)
            .filter(|(_, &r)| r)
            .map(|(m, _)| m)
            .sum())
    }
}

/// Per-cell probability of the "pass" outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFunction {
    grid: LambdaGrid,
    values: Vec<f64>,
}

impl ResponseFunction {
    pub fn new(grid: LambdaGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} cells for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values
            .iter()
            .find(|v| !v.is_finite() || !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Invariant(format!("response value {bad}")));
        }
        Ok(Self { grid, values })
    }

    pub fn indicator(grid: LambdaGrid, support: &[bool]) -> Result<Self> {
        Self::new(
            grid,
            support.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect(),
        )
    }

    pub fn constant(grid: LambdaGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub fn grid(&self) -> LambdaGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Transition kernel `T(λ'|λ)` stored as sparse rows of
/// `(target cell, probability)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMap {
    source: LambdaGrid,
    target: LambdaGrid,
    rows: Vec<Vec<(usize, f64)>>,
}

impl StochasticMap {
    pub fn new(
        source: LambdaGrid,
        target: LambdaGrid,
        rows: Vec<Vec<(usize, f64)>>,
    ) -> Result<Self> {
        if rows.len() != source.len() {
            return Err(Error::GridMismatch(format!(
                "{} rows for {} source cells",
                rows.len(),
                source.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut sum = 0.0;
            for &(t, p) in row {
                if t >= target.len() {
                    return Err(Error::GridMismatch(format!(
                        "row {i} points at cell {t} outside the target grid"
                    )));
                }
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::Invariant(format!("row {i} has entry {p}")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > STRUCTURAL_TOL {
                return Err(Error::Invariant(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self {
            source,
            target,
            rows,
        })
    }

    pub fn identity(grid: LambdaGrid) -> Self {
        Self {
            source: grid,
            target: grid,
            rows: (0..grid.len()).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    /// From a dense `source × target` matrix of probabilities.
    pub fn dense(source: LambdaGrid, target: LambdaGrid, matrix: &[Vec<f64>]) -> Result<Self> {
        let rows = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &p)| p != 0.0)
                    .map(|(t, &p)| (t, p))
                    .collect()
            })
            .collect();
        Self::new(source, target, rows)
    }

    pub fn source(&self) -> LambdaGrid {
        self.source
    }

    pub fn target(&self) -> LambdaGrid {
        self.target
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }
}

/// `‖mu - nu‖ = ∫ |mu - nu|`, in `[0, 2]`.
pub fn l1_distance(mu: &EpistemicState, nu: &EpistemicState) -> Result<f64> {
    mu.grid.ensure_same(&nu.grid)?;
    let sum: f64 = mu
        .density
        .iter()
        .zip(&nu.density)
        .map(|(x, y)| (x - y).abs())
        .sum();
    Ok(sum * mu.grid.cell_measure())
}

/// `∫ mu(λ) xi(λ) dλ`: probability that a preparation sampled from `mu`
/// passes the test with response `xi`.
pub fn confusability(mu: &EpistemicState, xi: &ResponseFunction) -> Result<f64> {
    mu.grid.ensure_same(&xi.grid)?;
    let sum: f64 = mu.density.iter().zip(&xi.values).map(|(d, x)| d * x).sum();
    Ok(sum * mu.grid.cell_measure())
}

/// Pushforward of `mu` through `t`.
pub fn apply_map(t: &StochasticMap, mu: &EpistemicState) -> Result<EpistemicState> {
    t.source.ensure_same(&mu.grid)?;
    let mut mass = vec![0.0; t.target.len()];
    for (row, m) in t.rows.iter().zip(mu.masses()) {
        if m == 0.0 {
            continue;
        }
        for &(cell, p) in row {
            mass[cell] += m * p;
        }
    }
    let w = t.target.cell_measure();
    EpistemicState::new(t.target, mass.into_iter().map(|m| m / w).collect())
}

/// Data-processing inequality `‖T mu - T nu‖ <= ‖mu - nu‖` up to 1e-9.
pub fn dpi_check(t: &StochasticMap, mu: &EpistemicState, nu: &EpistemicState) -> Result<bool> {
    let before = l1_distance(mu, nu)?;
    let after = l1_distance(&apply_map(t, mu)?, &apply_map(t, nu)?)?;
    Ok(after <= before + STRUCTURAL_TOL)
}

/// Preparations of the cloning experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    A,
    B,
    APerp,
    BPerp,
    Alpha,
    Beta,
    AlphaPerp,
    BetaPerp,
    Aa,
    Bb,
    AaPerp,
    BbPerp,
}

impl Label {
    /// Preparations that come with a test measurement.
    pub const TESTED: [Label; 6] = [
        Label::A,
        Label::B,
        Label::Alpha,
        Label::Beta,
        Label::Aa,
        Label::Bb,
    ];

    pub const ALL: [Label; 12] = [
        Label::A,
        Label::B,
        Label::APerp,
        Label::BPerp,
        Label::Alpha,
        Label::Beta,
        Label::AlphaPerp,
        Label::BetaPerp,
        Label::Aa,
        Label::Bb,
        Label::AaPerp,
        Label::BbPerp,
    ];

    pub fn perp(self) -> Option<Label> {
        match self {
            Label::A => Some(Label::APerp),
            Label::B => Some(Label::BPerp),
            Label::Alpha => Some(Label::AlphaPerp),
            Label::Beta => Some(Label::BetaPerp),
            Label::Aa => Some(Label::AaPerp),
            Label::Bb => Some(Label::BbPerp),
            _ => None,
        }
    }

    pub fn is_input(self) -> bool {
        matches!(self, Label::A | Label::B | Label::APerp | Label::BPerp)
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::A => "a",
            Label::B => "b",
            Label::APerp => "a_perp",
            Label::BPerp => "b_perp",
            Label::Alpha => "alpha",
            Label::Beta => "beta",
            Label::AlphaPerp => "alpha_perp",
            Label::BetaPerp => "beta_perp",
            Label::Aa => "aa",
            Label::Bb => "bb",
            Label::AaPerp => "aa_perp",
            Label::BbPerp => "bb_perp",
        }
    }
}

/// The operationally equivalent pairs required of the model.
pub const EQUIVALENT_PAIRS: [(Label, Label); 3] = [
    (Label::A, Label::B),
    (Label::Alpha, Label::Aa),
    (Label::Beta, Label::Bb),
];

/// An ontological model of the cloning experiment: epistemic states for
/// every preparation, a response function for every test, and the cloning
/// map from the input grid to the output grid.
#[derive(Debug, Clone)]
pub struct OnticModel {
    c_ab: f64,
    input_grid: LambdaGrid,
    output_grid: LambdaGrid,
    states: BTreeMap<Label, EpistemicState>,
    responses: BTreeMap<Label, ResponseFunction>,
    clone_map: StochasticMap,
    /// Input whose density the second output coordinate is drawn from, per
    /// input cell.
    resample_from: Vec<Label>,
    pub warnings: Vec<String>,
}

impl OnticModel {
    /// Overlap the model was built for (after snapping to the grid).
    pub fn c_ab(&self) -> f64 {
        self.c_ab
    }

    pub fn input_grid(&self) -> LambdaGrid {
        self.input_grid
    }

    pub fn output_grid(&self) -> LambdaGrid {
        self.output_grid
    }

    pub fn state(&self, label: Label) -> &EpistemicState {
        &self.states[&label]
    }

    /// Response function of the test for `label`.
    ///
    /// # Panics
    /// If `label` is a complement preparation; those have no test.
    pub fn response(&self, label: Label) -> &ResponseFunction {
        &self.responses[&label]
    }

    pub fn clone_map(&self) -> &StochasticMap {
        &self.clone_map
    }

    fn grid_for(&self, label: Label) -> LambdaGrid {
        if label.is_input() {
            self.input_grid
        } else {
            self.output_grid
        }
    }

    pub fn set_state(&mut self, label: Label, state: EpistemicState) -> Result<()> {
        self.grid_for(label).ensure_same(&state.grid)?;
        self.states.insert(label, state);
        Ok(())
    }

    pub fn set_response(&mut self, label: Label, xi: ResponseFunction) -> Result<()> {
        if label.perp().is_none() {
            return Err(Error::Precondition(format!(
                "{} has no test measurement",
                label.name()
            )));
        }
        self.grid_for(label).ensure_same(&xi.grid)?;
        self.responses.insert(label, xi);
        Ok(())
    }

    /// `p(M_t | P_s)`.
    pub fn predict(&self, prepared: Label, tested: Label) -> Result<f64> {
        let xi = self.responses.get(&tested).ok_or_else(|| {
            Error::Precondition(format!("{} has no test measurement", tested.name()))
        })?;
        confusability(self.state(prepared), xi)
    }

    /// Input `s` pushed through the cloning map, then tested for `tested`:
    /// `∫ mu_s(λ) T(λ'|λ) xi_t(λ')`.
    pub fn predict_after_cloning(&self, input: Label, tested: Label) -> Result<f64> {
        let out = apply_map(&self.clone_map, self.state(input))?;
        confusability(&out, self.response(tested))
    }

    /// `F_g = ½ p(M_aa|P_alpha) + ½ p(M_bb|P_beta)`.
    pub fn global_fidelity(&self) -> Result<f64> {
        Ok(0.5 * self.predict(Label::Alpha, Label::Aa)?
            + 0.5 * self.predict(Label::Beta, Label::Bb)?)
    }

    /// Smallest `eps_s` consistent with the model's O1 statistics.
    pub fn measured_epsilon(&self, label: Label) -> Result<f64> {
        let perp = label.perp().ok_or_else(|| {
            Error::Precondition(format!("{} has no test measurement", label.name()))
        })?;
        let pass = self.predict(label, label)?;
        let leak = self.predict(perp, label)?;
        Ok((1.0 - pass).max(leak).max(0.0))
    }

    /// Every epistemic state replaced by `(1 - w) mu + w · uniform`.
    /// Operational equivalences survive; O1 correlations degrade.
    pub fn mixed_with_uniform(&self, w: f64) -> Result<OnticModel> {
        let mut out = self.clone();
        for (label, mu) in out.states.iter_mut() {
            let grid = self.grid_for(*label);
            *mu = mu.mix(&EpistemicState::uniform(grid), w)?;
        }
        Ok(out)
    }

    /// Monte-Carlo estimate of `F_g` by sampling input cells, the cloning
    /// kernel and the test outcome. Deterministic for a given seed.
    pub fn sample_global_fidelity(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weighted = |mu: &EpistemicState| {
            WeightedIndex::new(mu.masses().collect::<Vec<_>>())
                .map_err(|e| Error::Invariant(format!("cannot sample density: {e}")))
        };
        let inputs = [
            (weighted(self.state(Label::A))?, self.response(Label::Aa)),
            (weighted(self.state(Label::B))?, self.response(Label::Bb)),
        ];
        let mut row_samplers: Vec<Option<WeightedIndex<f64>>> =
            vec![None; self.clone_map.rows.len()];
        let mut passed = 0usize;
        for _ in 0..samples {
            let (mu, xi) = &inputs[rng.random_range(0..2)];
            let cell = mu.sample(&mut rng);
            let row = &self.clone_map.rows[cell];
            let sampler = match &mut row_samplers[cell] {
                Some(s) => s,
                slot => {
                    let w = WeightedIndex::new(row.iter().map(|(_, p)| *p))
                        .map_err(|e| Error::Invariant(format!("cannot sample row: {e}")))?;
                    slot.insert(w)
                }
            };
            let target = row[sampler.sample(&mut rng)].0;
            if rng.random::<f64>() < xi.values[target] {
                passed += 1;
            }
        }
        Ok(passed as f64 / samples.max(1) as f64)
    }
}

/// Per-test O1 statistics.
#[derive(Debug, Clone, Serialize)]
pub struct O1Row {
    pub label: Label,
    /// `p(M_s | P_s)`, ideally 1.
    pub pass: f64,
    /// `p(M_s | P_s⊥)`, ideally 0.
    pub leak: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct O1Report {
    pub rows: Vec<O1Row>,
    pub max_residual: f64,
    pub ok: bool,
}

pub fn check_o1(model: &OnticModel, tol: f64) -> Result<O1Report> {
    let mut rows = Vec::with_capacity(Label::TESTED.len());
    for label in Label::TESTED {
        let perp = label.perp().expect("tested labels have complements");
        let pass = model.predict(label, label)?;
        let leak = model.predict(perp, label)?;
        let ok = 1.0 - pass <= tol && leak <= tol;
        rows.push(O1Row {
            label,
            pass,
            leak,
            ok,
        });
    }
    let max_residual = rows
        .iter()
        .map(|r| (1.0 - r.pass).max(r.leak))
        .fold(0.0, f64::max);
    let ok = rows.iter().all(|r| r.ok);
    Ok(O1Report {
        rows,
        max_residual,
        ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct O2Report {
    /// Largest cellwise `|½mu_s + ½mu_s⊥ - ½mu_s' - ½mu_s'⊥|` per pair.
    pub residuals: Vec<(Label, Label, f64)>,
    pub max_residual: f64,
    pub ok: bool,
}

/// Cellwise residual of `½mu_s + ½mu_s⊥ = ½mu_s' + ½mu_s'⊥`.
pub fn o2_residual(model: &OnticModel, s: Label, s2: Label) -> Result<f64> {
    let (sp, s2p) = match (s.perp(), s2.perp()) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::Precondition(
                "O2 pairs must be tested preparations".into(),
            ))
        }
    };
    let left = model.state(s).mix(model.state(sp), 0.5)?;
    let right = model.state(s2).mix(model.state(s2p), 0.5)?;
    left.max_abs_diff(&right)
}

pub fn check_o2(model: &OnticModel, tol: f64) -> Result<O2Report> {
    let residuals = EQUIVALENT_PAIRS
        .iter()
        .map(|&(s, s2)| Ok((s, s2, o2_residual(model, s, s2)?)))
        .collect::<Result<Vec<_>>>()?;
    let max_residual = residuals.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(O2Report {
        residuals,
        max_residual,
        ok: max_residual <= tol,
    })
}

/// Outcome of the ideal `‖mu_s - mu_s'‖ = 2(1 - c_ss')` check.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichIdeal {
    pub l1: f64,
    pub confusability: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks the ideal distance-confusability identity on a model whose O1
/// and O2 checks pass at [`STRUCTURAL_TOL`]. Quadrature slack is `4h`.
pub fn verify_sandwich_ideal(model: &OnticModel, pair: (Label, Label)) -> Result<SandwichIdeal> {
    let o1 = check_o1(model, STRUCTURAL_TOL)?;
    let o2 = check_o2(model, STRUCTURAL_TOL)?;
    if !o1.ok || !o2.ok {
        return Err(Error::Precondition(format!(
            "model violates O1 ({:e}) or O2 ({:e})",
            o1.max_residual, o2.max_residual
        )));
    }
    let (s, s2) = pair;
    let l1 = l1_distance(model.state(s), model.state(s2))?;
    let conf = model.predict(s, s2)?;
    let residual = (l1 - 2.0 * (1.0 - conf)).abs();
    let tolerance = 4.0 * model.grid_for(s).cell_width();
    Ok(SandwichIdeal {
        l1,
        confusability: conf,
        residual,
        tolerance,
        pass: residual <= tolerance,
    })
}

/// Margins of the noise-robust two-sided bound
/// `2 max{1-c_ss'-eps_s', 1-c_s's-eps_s} <= ‖mu_s - mu_s'‖ <= 2 min{1-c_ss'+eps_s', 1-c_s's+eps_s}`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichNoisy {
    pub l1: f64,
    pub lower: f64,
    pub upper: f64,
    /// `l1 - lower`; nonnegative when the lower bound holds.
    pub lower_margin: f64,
    /// `upper - l1`; nonnegative when the upper bound holds.
    pub upper_margin: f64,
    pub slack: f64,
    pub pass: bool,
}

impl SandwichNoisy {
    pub fn lower_holds(&self) -> bool {
        self.lower_margin >= -self.slack
    }

    pub fn upper_holds(&self) -> bool {
        self.upper_margin >= -self.slack
    }
}

/// Evaluates both sides of the noisy sandwich from raw model pieces. No
/// preconditions are checked; the lower side holds for any densities and
/// responses as long as `p(M_k|P_k) >= 1 - eps_k`.
#[allow(clippy::too_many_arguments)]
pub fn sandwich_margins(
    mu_s: &EpistemicState,
    mu_s2: &EpistemicState,
    xi_s: &ResponseFunction,
    xi_s2: &ResponseFunction,
    eps_s: f64,
    eps_s2: f64,
    slack: f64,
) -> Result<SandwichNoisy> {
    let l1 = l1_distance(mu_s, mu_s2)?;
    let c_12 = confusability(mu_s, xi_s2)?;
    let c_21 = confusability(mu_s2, xi_s)?;
    let lower = 2.0 * (1.0 - c_12 - eps_s2).max(1.0 - c_21 - eps_s);
    let upper = 2.0 * (1.0 - c_12 + eps_s2).min(1.0 - c_21 + eps_s);
    let out = SandwichNoisy {
        l1,
        lower,
        upper,
        lower_margin: l1 - lower,
        upper_margin: upper - l1,
        slack,
        pass: false,
    };
    let pass = out.lower_holds() && out.upper_holds();
    Ok(SandwichNoisy { pass, ..out })
}

/// Noisy sandwich on a model pair, after confirming that the model's O1
/// statistics fit inside the supplied epsilons and that O2 holds.
pub fn verify_sandwich_noisy(
    model: &OnticModel,
    pair: (Label, Label),
    eps_s: f64,
    eps_s2: f64,
) -> Result<SandwichNoisy> {
    let (s, s2) = pair;
    for (label, eps) in [(s, eps_s), (s2, eps_s2)] {
        let measured = model.measured_epsilon(label)?;
        if measured > eps + STRUCTURAL_TOL {
            return Err(Error::Precondition(format!(
                "O1 residual {measured} of {} exceeds eps {eps}",
                label.name()
            )));
        }
    }
    let o2 = o2_residual(model, s, s2)?;
    if o2 > STRUCTURAL_TOL {
        return Err(Error::Precondition(format!(
            "O2 residual {o2:e} for ({}, {})",
            s.name(),
            s2.name()
        )));
    }
    sandwich_margins(
        model.state(s),
        model.state(s2),
        model.response(s),
        model.response(s2),
        eps_s,
        eps_s2,
        4.0 * model.grid_for(s).cell_width(),
    )
}

/// The noncontextual model that attains `F_g = 1 - c/2 + c²/2`.
///
/// Inputs on `[0, 2]`: `mu_a` uniform on `[0, 1]`, `mu_b` uniform on
/// `[1-c, 2-c]`, `mu_a⊥` on `[1, 2]`, `mu_b⊥` on `[0, 1-c] ∪ [2-c, 2]`.
/// Ideal copies are products, `mu_aa = mu_a × mu_a` and `mu_bb = mu_b × mu_b`.
/// The cloner keeps `λ` and draws `λ'` from `mu_a` when `λ ∈ S_a \ S_b`,
/// from `mu_b` otherwise. Complements on `[0, 2]²`:
///
/// * `S_aa⊥ = [1-c, 1] × [1, 2-c] ∪ Q`, `S_alpha⊥ = [1-c, 1] × [0, 1-c] ∪ Q`,
///   with `Q ⊂ [1, 2] × [0, 2]` of area `1 - c(1-c)` filled row by row;
/// * `S_bb⊥ = S_beta⊥`: the first unit area of cells outside `S_bb`.
///
/// All densities are 1 on their supports and responses are support
/// indicators. `c` is snapped to the nearest multiple of `2/n`; `n` must be
/// even.
pub fn build_saturating_model(c_ab: f64, n: usize) -> Result<OnticModel> {
    let c = check_unit("c_ab", c_ab)?;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Resolution {
            n,
            c,
            reason: "resolution must be even and at least 4".into(),
        });
    }
    let input_grid = LambdaGrid::new(1, n)?;
    let output_grid = LambdaGrid::new(2, n)?;
    let h = input_grid.cell_width();
    // cells per unit length
    let m = n / 2;
    let k = (c / h).round() as usize;
    let snapped = k as f64 * h;
    let mut warnings = Vec::new();
    if (snapped - c).abs() > 1e-12 {
        warnings.push(format!(
            "c_ab = {c} is not a multiple of h = {h}; snapped to {snapped}"
        ));
    }

    let in_a = |i: usize| i < m;
    let in_b = |i: usize| i >= m - k && i < 2 * m - k;
    let mu_a = EpistemicState::uniform_on(input_grid, in_a)?;
    let mu_b = EpistemicState::uniform_on(input_grid, in_b)?;
    let mu_a_perp = EpistemicState::uniform_on(input_grid, |i| !in_a(i))?;
    let mu_b_perp = EpistemicState::uniform_on(input_grid, |i| !in_b(i))?;

    let resample_from: Vec<Label> = (0..n)
        .map(|i| {
            if in_a(i) && !in_b(i) {
                Label::A
            } else {
                Label::B
            }
        })
        .collect();
    let clone_map = copy_and_resample(input_grid, output_grid, &resample_from, &mu_a, &mu_b)?;

    let cell = |i: usize, j: usize| i * n + j;
    let in_aa = |i: usize, j: usize| in_a(i) && in_a(j);
    let in_bb = |i: usize, j: usize| in_b(i) && in_b(j);
    let mu_aa = EpistemicState::uniform_on(output_grid, |x| in_aa(x / n, x % n))?;
    let mu_bb = EpistemicState::uniform_on(output_grid, |x| in_bb(x / n, x % n))?;
    let mu_alpha = apply_map(&clone_map, &mu_a)?;
    let mu_beta = apply_map(&clone_map, &mu_b)?;

    let overlap_strip = |i: usize| i >= m - k && i < m;
    let q_cells = m * m - k * (m - k);
    let mut q = vec![false; output_grid.len()];
    for (filled, (j, i)) in (0..2 * m)
        .flat_map(|j| (m..2 * m).map(move |i| (j, i)))
        .enumerate()
    {
        if filled >= q_cells {
            break;
        }
        q[cell(i, j)] = true;
    }
    let aa_perp_support =
        |x: usize| q[x] || (overlap_strip(x / n) && x % n >= m && x % n < 2 * m - k);
    let alpha_perp_support = |x: usize| q[x] || (overlap_strip(x / n) && x % n < m - k);
    let mu_aa_perp = EpistemicState::uniform_on(output_grid, aa_perp_support)?;
    let mu_alpha_perp = EpistemicState::uniform_on(output_grid, alpha_perp_support)?;

    let mut outside_bb = vec![false; output_grid.len()];
    for x in (0..output_grid.len())
        .filter(|&x| !in_bb(x / n, x % n))
        .take(m * m)
    {
        outside_bb[x] = true;
    }
    let mu_bb_perp = EpistemicState::uniform_on(output_grid, |x| outside_bb[x])?;

    let mut states = BTreeMap::new();
    states.insert(Label::A, mu_a);
    states.insert(Label::B, mu_b);
    states.insert(Label::APerp, mu_a_perp);
    states.insert(Label::BPerp, mu_b_perp);
    states.insert(Label::Alpha, mu_alpha);
    states.insert(Label::Beta, mu_beta);
    states.insert(Label::AlphaPerp, mu_alpha_perp);
    states.insert(Label::BetaPerp, mu_bb_perp.clone());
    states.insert(Label::Aa, mu_aa);
    states.insert(Label::Bb, mu_bb);
    states.insert(Label::AaPerp, mu_aa_perp);
    states.insert(Label::BbPerp, mu_bb_perp);

    let mut responses = BTreeMap::new();
    for label in Label::TESTED {
        let grid = if label.is_input() {
            input_grid
        } else {
            output_grid
        };
        responses.insert(
            label,
            ResponseFunction::indicator(grid, &states[&label].support())?,
        );
    }

    Ok(OnticModel {
        c_ab: snapped,
        input_grid,
        output_grid,
        states,
        responses,
        clone_map,
        resample_from,
        warnings,
    })
}

/// `λ ↦ (λ, λ')` with `λ'` drawn from `mu_a` or `mu_b` per input cell.
fn copy_and_resample(
    input_grid: LambdaGrid,
    output_grid: LambdaGrid,
    resample_from: &[Label],
    mu_a: &EpistemicState,
    mu_b: &EpistemicState,
) -> Result<StochasticMap> {
    let n = input_grid.resolution();
    if output_grid.resolution() != n || output_grid.dimension() != 2 {
        return Err(Error::GridMismatch(
            "output grid must be the square of the input grid".into(),
        ));
    }
    if resample_from.len() != n {
        return Err(Error::GridMismatch(
            "one resample label per input cell".into(),
        ));
    }
    let masses_a: Vec<f64> = mu_a.masses().collect();
    let masses_b: Vec<f64> = mu_b.masses().collect();
    let rows = resample_from
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let masses = match label {
                Label::A => Ok(&masses_a),
                Label::B => Ok(&masses_b),
                other => Err(Error::Precondition(format!(
                    "cannot resample from {}",
                    other.name()
                ))),
            }?;
            Ok(masses
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(j, &p)| (i * n + j, p))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    StochasticMap::new(input_grid, output_grid, rows)
}

/// Run of `count` equal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run<T>(pub T, pub usize);

fn encode_runs<T: PartialEq + Clone>(values: &[T]) -> Vec<Run<T>> {
    let mut runs: Vec<Run<T>> = Vec::new();
    for v in values {
        match runs.last_mut() {
            Some(Run(last, count)) if last == v => *count += 1,
            _ => runs.push(Run(v.clone(), 1)),
        }
    }
    runs
}

fn decode_runs<T: Clone>(runs: &[Run<T>]) -> Vec<T> {
    runs.iter()
        .flat_map(|Run(v, count)| std::iter::repeat_n(v.clone(), *count))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    /// Always `"copy-and-resample"`.
    pub kind: String,
    /// Per input cell, which input density supplies `λ'`.
    pub resample_from: Vec<Run<Label>>,
}

/// JSON form of an [`OnticModel`]: grid specs, run-length-encoded cell
/// values, and the cloning kernel rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub c_ab: f64,
    pub input_grid: LambdaGrid,
    pub output_grid: LambdaGrid,
    pub states: BTreeMap<Label, Vec<Run<f64>>>,
    pub responses: BTreeMap<Label, Vec<Run<f64>>>,
    pub kernel: KernelSpec,
    pub equivalences: Vec<(Label, Label)>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

const KERNEL_KIND: &str = "copy-and-resample";

impl OnticModel {
    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            c_ab: self.c_ab,
            input_grid: self.input_grid,
            output_grid: self.output_grid,
            states: self
                .states
                .iter()
                .map(|(l, mu)| (*l, encode_runs(&mu.density)))
                .collect(),
            responses: self
                .responses
                .iter()
                .map(|(l, xi)| (*l, encode_runs(&xi.values)))
                .collect(),
            kernel: KernelSpec {
                kind: KERNEL_KIND.into(),
                resample_from: encode_runs(&self.resample_from),
            },
            equivalences: EQUIVALENT_PAIRS.to_vec(),
            warnings: self.warnings.clone(),
        }
    }

    /// Rebuilds a model, re-validating every invariant. The kernel is
    /// regenerated from its rule and the stored input densities.
    pub fn from_document(doc: &ModelDocument) -> Result<OnticModel> {
        if doc.kernel.kind != KERNEL_KIND {
            return Err(Error::Precondition(format!(
                "unknown kernel kind {:?}",
                doc.kernel.kind
            )));
        }
        if doc.equivalences != EQUIVALENT_PAIRS {
            return Err(Error::Precondition("unexpected equivalence pairs".into()));
        }
        let grid_for = |l: Label| {
            if l.is_input() {
                doc.input_grid
            } else {
                doc.output_grid
            }
        };
        let mut states = BTreeMap::new();
        for label in Label::ALL {
            let runs = doc
                .states
                .get(&label)
                .ok_or_else(|| Error::Precondition(format!("missing state {}", label.name())))?;
            states.insert(
                label,
                EpistemicState::new(grid_for(label), decode_runs(runs))?,
            );
        }
        let mut responses = BTreeMap::new();
        for label in Label::TESTED {
            let runs = doc
                .responses
                .get(&label)
                .ok_or_else(|| Error::Precondition(format!("missing response {}", label.name())))?;
            responses.insert(
                label,
                ResponseFunction::new(grid_for(label), decode_runs(runs))?,
            );
        }
        let resample_from = decode_runs(&doc.kernel.resample_from);
        let clone_map = copy_and_resample(
            doc.input_grid,
            doc.output_grid,
            &resample_from,
            &states[&Label::A],
            &states[&Label::B],
        )?;
        Ok(OnticModel {
            c_ab: doc.c_ab,
            input_grid: doc.input_grid,
            output_grid: doc.output_grid,
            states,
            responses,
            clone_map,
            resample_from,
            warnings: doc.warnings.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("model documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<OnticModel> {
        let doc: ModelDocument = serde_json::from_str(text)
            .map_err(|e| Error::Precondition(format!("bad model document: {e}")))?;
        Self::from_document(&doc)
    }
}

/// Random dense kernel between two grids; rows are normalized draws.
pub fn random_stochastic_map<R: Rng>(
    source: LambdaGrid,
    target: LambdaGrid,
    rng: &mut R,
) -> Result<StochasticMap> {
    let matrix: Vec<Vec<f64>> = (0..source.len())
        .map(|_| {
            let raw: Vec<f64> = (0..target.len()).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        })
        .collect();
    StochasticMap::dense(source, target, &matrix)
}

/// Random density on `grid`, optionally sparse (each cell zeroed with
/// probability `sparsity`).
pub fn random_epistemic_state<R: Rng>(
    grid: LambdaGrid,
    sparsity: f64,
    rng: &mut R,
) -> EpistemicState {
    loop {
        let raw: Vec<f64> = (0..grid.len())
            .map(|_| {
                if rng.random::<f64>() < sparsity {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        let total: f64 = raw.iter().sum::<f64>() * grid.cell_measure();
        if total > 0.0 {
            let density = raw.into_iter().map(|x| x / total).collect();
            return EpistemicState::new(grid, density).expect("normalized by construction");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;

    fn grid1(n: usize) -> LambdaGrid {
        LambdaGrid::new(1, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(LambdaGrid::new(3, 10).is_err());
        assert!(LambdaGrid::new(1, 3).is_err());
        let g = LambdaGrid::new(2, 10).unwrap();
        assert_eq!(g.len(), 100);
        assert!((g.cell_measure() - 0.04).abs() < 1e-15);
        // cells partition the domain
        assert!((g.len() as f64 * g.cell_measure() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        let g = grid1(4);
        assert!(EpistemicState::new(g, vec![0.5; 4]).is_ok());
        assert!(EpistemicState::new(g, vec![0.5; 3]).is_err());
        assert!(EpistemicState::new(g, vec![1.0, 0.0, 0.0, -0.0001]).is_err());
        assert!(EpistemicState::new(g, vec![1.0; 4]).is_err());
        assert!(ResponseFunction::new(g, vec![1.1, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn l1_distance_basics() {
        let g = grid1(10);
        let mu = EpistemicState::uniform_on(g, |i| i < 5).unwrap();
        let nu = EpistemicState::uniform_on(g, |i| i >= 5).unwrap();
        assert_eq!(l1_distance(&mu, &mu).unwrap(), 0.0);
        assert!((l1_distance(&mu, &nu).unwrap() - 2.0).abs() < 1e-12);
        let other = EpistemicState::uniform(grid1(12));
        assert!(matches!(
            l1_distance(&mu, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn confusability_basics() {
        let g = grid1(8);
        let mu = EpistemicState::uniform_on(g, |i| i % 3 == 0).unwrap();
        let one = ResponseFunction::constant(g, 1.0).unwrap();
        let zero = ResponseFunction::constant(g, 0.0).unwrap();
        assert!((confusability(&mu, &one).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(confusability(&mu, &zero).unwrap(), 0.0);
        assert!(confusability(&mu, &ResponseFunction::constant(grid1(6), 1.0).unwrap()).is_err());
    }

    #[test]
    fn identity_and_collapse_maps() {
        let g = grid1(6);
        let mu = EpistemicState::uniform_on(g, |i| i < 2).unwrap();
        let nu = EpistemicState::uniform_on(g, |i| i > 2).unwrap();
        let id = StochasticMap::identity(g);
        assert_eq!(apply_map(&id, &mu).unwrap(), mu);
        assert!(dpi_check(&id, &mu, &nu).unwrap());
        let collapse = StochasticMap::new(g, g, vec![vec![(0, 1.0)]; 6]).unwrap();
        let out_mu = apply_map(&collapse, &mu).unwrap();
        let out_nu = apply_map(&collapse, &nu).unwrap();
        assert!(l1_distance(&out_mu, &out_nu).unwrap() < 1e-12);
    }

    #[test]
    fn map_validation() {
        let g = grid1(4);
        assert!(StochasticMap::new(g, g, vec![vec![(0, 0.5)]; 4]).is_err());
        assert!(StochasticMap::new(g, g, vec![vec![(7, 1.0)]; 4]).is_err());
        assert!(StochasticMap::new(g, g, vec![vec![(0, 1.0)]; 3]).is_err());
        let t = StochasticMap::identity(g);
        let mu = EpistemicState::uniform(grid1(8));
        assert!(apply_map(&t, &mu).is_err());
    }

    #[test]
    fn saturating_model_half() {
        let model = build_saturating_model(0.5, 200).unwrap();
        assert!(model.warnings.is_empty());
        let h = 0.01;
        let d_ab = l1_distance(model.state(Label::A), model.state(Label::B)).unwrap();
        assert!((d_ab - 1.0).abs() <= 2.0 * h);
        let c = model.predict(Label::A, Label::B).unwrap();
        assert!((c - 0.5).abs() <= 2.0 * h);
        let c_alpha = model.predict(Label::Alpha, Label::Aa).unwrap();
        assert!((c_alpha - 0.75).abs() < 1e-9);
        let fg = model.global_fidelity().unwrap();
        assert!((fg - 0.875).abs() < 1e-9);
        assert!((fg - bounds::nc_bound_ideal(0.5, 0.25).unwrap()).abs() <= 4.0 * h);
        assert!((model.predict(Label::Bb, Label::Bb).unwrap() - 1.0).abs() < 1e-12);
        // discrimination bound from the l1 distance
        let s_ab = 0.5 + d_ab / 4.0;
        assert!((s_ab - bounds::nc_discrimination_bound(0.5, 0.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn beta_is_product_of_b() {
        let model = build_saturating_model(0.3, 40).unwrap();
        let n = 40;
        let mu_b = model.state(Label::B).density();
        let product: Vec<f64> = (0..n * n).map(|x| mu_b[x / n] * mu_b[x % n]).collect();
        let product = EpistemicState::new(model.output_grid(), product).unwrap();
        assert!(model.state(Label::Beta).max_abs_diff(&product).unwrap() < 1e-9);
    }

    #[test]
    fn maximal_psi_epistemicity() {
        for c in [0.1, 0.45, 0.8] {
            let model = build_saturating_model(c, 100).unwrap();
            let support_b = model.state(Label::B).support();
            let direct = model.state(Label::A).mass_where(&support_b).unwrap();
            let conf = model.predict(Label::A, Label::B).unwrap();
            assert!((direct - conf).abs() <= 2.0 * 0.02);
        }
    }

    #[test]
    fn zero_overlap_clones_perfectly() {
        let model = build_saturating_model(0.0, 20).unwrap();
        assert!((model.global_fidelity().unwrap() - 1.0).abs() < 1e-12);
        let full = build_saturating_model(1.0, 20).unwrap();
        assert!((full.global_fidelity().unwrap() - 1.0).abs() < 1e-12);
        assert!(l1_distance(full.state(Label::A), full.state(Label::B)).unwrap() < 1e-12);
    }

    #[test]
    fn o1_and_o2_hold_on_saturating_model() {
        for c in [0.0, 0.1, 0.5, 0.76, 1.0] {
            let model = build_saturating_model(c, 50).unwrap();
            let o1 = check_o1(&model, STRUCTURAL_TOL).unwrap();
            assert!(o1.ok, "c={c}: {:?}", o1.rows);
            let o2 = check_o2(&model, STRUCTURAL_TOL).unwrap();
            assert!(o2.ok, "c={c}: {:?}", o2.residuals);
        }
    }

    #[test]
    fn input_equivalence_is_uniform() {
        let model = build_saturating_model(0.3, 20).unwrap();
        let u = EpistemicState::uniform(model.input_grid());
        let left = model
            .state(Label::A)
            .mix(model.state(Label::APerp), 0.5)
            .unwrap();
        let right = model
            .state(Label::B)
            .mix(model.state(Label::BPerp), 0.5)
            .unwrap();
        assert!(left.max_abs_diff(&u).unwrap() < 1e-12);
        assert!(right.max_abs_diff(&u).unwrap() < 1e-12);
    }

    #[test]
    fn o1_violation_is_flagged() {
        let mut model = build_saturating_model(0.5, 20).unwrap();
        model
            .set_response(
                Label::A,
                ResponseFunction::constant(model.input_grid(), 1.0).unwrap(),
            )
            .unwrap();
        let o1 = check_o1(&model, STRUCTURAL_TOL).unwrap();
        let row = o1.rows.iter().find(|r| r.label == Label::A).unwrap();
        assert!((row.leak - 1.0).abs() < 1e-12);
        assert!(!row.ok && !o1.ok);
        assert!(verify_sandwich_ideal(&model, (Label::A, Label::B)).is_err());
    }

    #[test]
    fn o2_violation_is_detected() {
        let mut model = build_saturating_model(0.5, 20).unwrap();
        // move the first cell of a⊥ into the last cell of a's support
        let mut d = model.state(Label::APerp).density().to_vec();
        let first = d.iter().position(|&x| x > 0.0).unwrap();
        d[first - 1] += d[first];
        d[first] = 0.0;
        model
            .set_state(
                Label::APerp,
                EpistemicState::new(model.input_grid(), d).unwrap(),
            )
            .unwrap();
        let o2 = check_o2(&model, STRUCTURAL_TOL).unwrap();
        assert!(!o2.ok && o2.max_residual > 0.1);
    }

    #[test]
    fn ideal_sandwich_pairs() {
        let model = build_saturating_model(0.5, 200).unwrap();
        for pair in EQUIVALENT_PAIRS {
            let r = verify_sandwich_ideal(&model, pair).unwrap();
            assert!(r.pass, "{pair:?}: {r:?}");
        }
        let r = verify_sandwich_ideal(&model, (Label::Aa, Label::Bb)).unwrap();
        assert!((r.l1 - 1.5).abs() <= r.tolerance);
        assert!((2.0 * (1.0 - r.confusability) - 1.5).abs() <= r.tolerance);
        let one = build_saturating_model(1.0, 20).unwrap();
        let r = verify_sandwich_ideal(&one, (Label::A, Label::B)).unwrap();
        assert!(r.l1.abs() < 1e-12 && (1.0 - r.confusability).abs() < 1e-12);
    }

    #[test]
    fn noisy_sandwich_zero_budget_reduces_to_ideal() {
        let model = build_saturating_model(0.4, 50).unwrap();
        let r = verify_sandwich_noisy(&model, (Label::A, Label::B), 0.0, 0.0).unwrap();
        assert!(r.pass);
        assert!((r.upper - r.lower).abs() < 1e-12);
        assert!(r.lower_margin.abs() < 1e-9);
    }

    #[test]
    fn noisy_sandwich_on_mixed_models() {
        let model = build_saturating_model(0.5, 40).unwrap();
        for w in [0.01, 0.05, 0.1] {
            let mixed = model.mixed_with_uniform(w).unwrap();
            assert!(check_o2(&mixed, STRUCTURAL_TOL).unwrap().ok);
            for pair @ (s, s2) in EQUIVALENT_PAIRS {
                let e1 = mixed.measured_epsilon(s).unwrap();
                let e2 = mixed.measured_epsilon(s2).unwrap();
                assert!(e1 > 0.0);
                let r = verify_sandwich_noisy(&mixed, pair, e1, e2).unwrap();
                assert!(r.pass, "w={w} {pair:?}: {r:?}");
            }
        }
    }

    #[test]
    fn noisy_sandwich_rejects_small_budget() {
        let mixed = build_saturating_model(0.5, 40)
            .unwrap()
            .mixed_with_uniform(0.1)
            .unwrap();
        assert!(verify_sandwich_noisy(&mixed, (Label::A, Label::B), 0.0, 0.0).is_err());
    }

    #[test]
    fn snapping_warns() {
        let model = build_saturating_model(0.333, 20).unwrap();
        assert_eq!(model.warnings.len(), 1);
        assert!((model.c_ab() - 0.3).abs() < 1e-12);
        assert!(matches!(
            build_saturating_model(0.5, 21),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn monte_carlo_fidelity() {
        let model = build_saturating_model(0.5, 40).unwrap();
        let est = model.sample_global_fidelity(200_000, 7).unwrap();
        assert!((est - 0.875).abs() < 0.01, "{est}");
        assert_eq!(est, model.sample_global_fidelity(200_000, 7).unwrap());
    }

    #[test]
    fn predict_after_cloning_matches_stored_outputs() {
        let model = build_saturating_model(0.5, 20).unwrap();
        let p = model.predict_after_cloning(Label::A, Label::Aa).unwrap();
        assert!((p - model.predict(Label::Alpha, Label::Aa).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn json_document_round_trip() {
        let model = build_saturating_model(0.25, 40).unwrap();
        let text = model.to_json();
        let back = OnticModel::from_json(&text).unwrap();
        assert_eq!(back.to_document(), model.to_document());
        assert_eq!(back.clone_map(), model.clone_map());
        assert!(OnticModel::from_json("{}").is_err());
    }

    #[test]
    fn run_length_codec() {
        let v = [1.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let runs = encode_runs(&v);
        assert_eq!(runs, vec![Run(1.0, 2), Run(0.0, 3), Run(1.0, 1)]);
        assert_eq!(decode_runs(&runs), v);
    }
}
