//! Markov chains over the number of relevant variables found, for the
//! chaining, clique and marginal-only scenarios with `K = q`.
//!
//! State `i` counts relevant variables in `F`. Each chain is upper
//! triangular with `r` absorbing. Analytic chains cover `α ∈ {0, 1}`; the
//! Monte Carlo simulator also accepts fractional `α`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::{Error, Result};

/// Row sums must match 1 this closely.
pub const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainScenario {
    Chaining,
    Clique,
    Marginal,
}

impl ChainScenario {
    pub const ALL: [ChainScenario; 3] = [Self::Chaining, Self::Clique, Self::Marginal];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Chaining => "chaining",
            Self::Clique => "clique",
            Self::Marginal => "marginal",
        }
    }
}

impl fmt::Display for ChainScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChainScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chaining" => Ok(Self::Chaining),
            "clique" => Ok(Self::Clique),
            "marginal" | "marginal_only" => Ok(Self::Marginal),
            _ => Err(Error::invalid(format!("unknown scenario `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: ChainScenario,
    pub p: u64,
    pub q: u64,
    pub r: u64,
    pub alpha: f64,
    /// Chaining only: an iteration moves the chain by at most one
    /// variable instead of cascading along every drawn prefix.
    #[serde(default)]
    pub single_step: bool,
}

impl ScenarioSpec {
    pub fn new(scenario: ChainScenario, p: u64, q: u64, r: u64, alpha: f64) -> Self {
        ScenarioSpec {
            scenario,
            p,
            q,
            r,
            alpha,
            single_step: false,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ScenarioSpec { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.q > self.p {
            return Err(Error::invalid(format!(
                "need 1 <= q <= p, got q = {}, p = {}",
                self.q, self.p
            )));
        }
        if self.r > self.q {
            return Err(Error::invalid(format!(
                "r = {} exceeds q = {}",
                self.r, self.q
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("alpha must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Size of `R` when `found` relevant variables are in `F`.
    fn retained(&self, found: u64) -> u64 {
        ((self.alpha * self.q as f64).floor() as u64).min(found)
    }
}

/// Probability that `k` given items all land in a uniform `n`-subset of
/// `pool` items: `C(pool-k, n-k) / C(pool, n)`.
fn all_drawn(pool: u64, n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|m| (n - m) as f64 / (pool - m) as f64).product()
}

/// Hypergeometric pmf: `k` successes in `n` draws from `pool` items of
/// which `good` are successes.
fn hypergeometric(pool: u64, good: u64, n: u64, k: u64) -> f64 {
    if k > good || k > n || n - k > pool - good {
        return 0.0;
    }
    (ln_binomial(good, k) + ln_binomial(pool - good, n - k) - ln_binomial(pool, n)).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChainModel {
    transition: Vec<Vec<f64>>,
}

impl MarkovChainModel {
    /// Validates a transition matrix: square, row stochastic, upper
    /// triangular and with the last state absorbing.
    pub fn from_matrix(transition: Vec<Vec<f64>>) -> Result<Self> {
        let n = transition.len();
        if n == 0 {
            return Err(Error::invalid("a chain needs at least one state"));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::invalid(format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::invalid(format!("row {i} sums to {sum}")));
            }
            if row[..i].iter().any(|&v| v != 0.0) {
                return Err(Error::invalid(format!("row {i} moves to a lower state")));
            }
        }
        if transition[n - 1][n - 1] != 1.0 {
            return Err(Error::invalid("the last state must be absorbing"));
        }
        Ok(MarkovChainModel { transition })
    }

    /// The absorbing state, equal to `r`.
    pub fn absorbing_state(&self) -> usize {
        self.transition.len() - 1
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    /// Moves out of state `i`, summed directly rather than as `1 - stay`
    /// so tiny probabilities keep their precision.
    fn leave(&self, i: usize) -> f64 {
        self.transition[i][i + 1..].iter().sum()
    }
}

/// Builds the chain for `spec`; `α` must be 0 or 1.
pub fn build_chain(spec: &ScenarioSpec) -> Result<MarkovChainModel> {
    spec.validate()?;
    let smart = if spec.alpha == 0.0 {
        false
    } else if spec.alpha == 1.0 {
        true
    } else {
        return Err(Error::invalid("analytic chains need alpha = 0 or alpha = 1"));
    };
    let (p, q, r) = (spec.p, spec.q, spec.r);
    let n = r as usize + 1;
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..r {
        // Pool and draws for the relevant variables not yet found.
        let (pool, draws) = if smart { (p - i, q - i) } else { (p, q) };
        let row = &mut m[i as usize];
        match spec.scenario {
            ChainScenario::Chaining => {
                // The next chain variables X_{i+1}, ..., X_j are found when
                // they appear in Q with their whole prefix.
                let base = if smart { i } else { 0 };
                if spec.single_step {
                    row[i as usize + 1] = all_drawn(pool, draws, i + 1 - base);
                } else {
                    for j in i + 1..=r {
                        let k = j - base;
                        let mut prob = all_drawn(pool, draws, k);
                        if j < r {
                            // X_{j+1} absent.
                            prob *= (pool - draws) as f64 / (pool - k) as f64;
                        }
                        row[j as usize] = prob;
                    }
                }
            }
            ChainScenario::Clique => {
                // All members must be in Q; the iteration then reveals one
                // member chosen uniformly among the r.
                let success = if smart {
                    all_drawn(pool, draws, r - i)
                } else {
                    all_drawn(pool, draws, r)
                };
                row[i as usize + 1] = success * (r - i) as f64 / r as f64;
            }
            ChainScenario::Marginal => {
                for k in 1..=(r - i) {
                    row[(i + k) as usize] = hypergeometric(pool, r - i, draws, k);
                }
            }
        }
        let moved: f64 = row[i as usize + 1..].iter().sum();
        row[i as usize] = 1.0 - moved;
    }
    m[n - 1][n - 1] = 1.0;
    MarkovChainModel::from_matrix(m)
}

/// Expected number of iterations to reach the absorbing state from 0.
pub fn expected_absorption_time(model: &MarkovChainModel) -> Result<f64> {
    let last = model.absorbing_state();
    let mut expected = vec![0.0; last + 1];
    for i in (0..last).rev() {
        let leave = model.leave(i);
        if leave <= 0.0 {
            return Err(Error::SingularChain(i));
        }
        let onward: f64 = model.transition[i][i + 1..]
            .iter()
            .zip(&expected[i + 1..])
            .map(|(p, e)| p * e)
            .sum();
        expected[i] = (1.0 + onward) / leave;
    }
    Ok(expected[0])
}

/// `E[state_t]` for `t = 0..=horizon`, starting from state 0.
pub fn expected_found_curve(model: &MarkovChainModel, horizon: usize) -> Vec<f64> {
    let n = model.transition.len();
    let mut dist = vec![0.0; n];
    dist[0] = 1.0;
    let mut curve = Vec::with_capacity(horizon + 1);
    let mean = |d: &[f64]| d.iter().enumerate().map(|(s, w)| s as f64 * w).sum::<f64>();
    curve.push(mean(&dist));
    for _ in 0..horizon {
        let mut next = vec![0.0; n];
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (j, &pij) in model.transition[i].iter().enumerate().skip(i) {
                next[j] += w * pij;
            }
        }
        dist = next;
        curve.push(mean(&dist));
    }
    curve
}

/// Asymptotic order-of-magnitude estimate. `None` for the marginal
/// scenario, which has no closed form.
pub fn closed_form_estimate(spec: &ScenarioSpec) -> Result<Option<f64>> {
    spec.validate()?;
    let (p, q, r) = (spec.p as f64, spec.q as f64, spec.r);
    let smart = spec.alpha > 0.0;
    Ok(match spec.scenario {
        ChainScenario::Chaining if smart => Some(r as f64 * p / q),
        ChainScenario::Chaining => Some((p / q).powi(r as i32)),
        ChainScenario::Clique => {
            if r == 0 {
                return Ok(Some(0.0));
            }
            let harmonic: f64 = (1..=r).map(|k| 1.0 / k as f64).sum();
            let naive = r as f64 * harmonic / all_drawn(spec.p, spec.q, r);
            Some(if smart { naive / r as f64 } else { naive })
        }
        ChainScenario::Marginal => None,
    })
}

/// Exact expected time for a spec, building the chain on the fly.
pub fn expected_time(spec: &ScenarioSpec) -> Result<f64> {
    expected_absorption_time(&build_chain(spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub replicates: usize,
    /// Length of the empirical curve.
    pub horizon: usize,
    /// Replicates still running after this many iterations are censored.
    pub max_iterations: u64,
    pub seed: u64,
}

impl SimulationOptions {
    pub fn new(replicates: usize, seed: u64) -> Self {
        SimulationOptions {
            replicates,
            horizon: 0,
            max_iterations: 10_000_000,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub mean_time: f64,
    pub std_error: f64,
    /// Mean number found at `t = 0..=horizon`.
    pub empirical_curve: Vec<f64>,
    pub replicates: usize,
    /// Replicates that hit `max_iterations`; excluded from the mean.
    pub censored: usize,
}

/// Direct simulation of the subspace draws and discovery rules, without
/// trees. Only the `r` relevant variables are tracked: their membership in
/// `Q` is drawn item by item, which has the same law as drawing all of `Q`.
pub fn simulate_process(spec: &ScenarioSpec, options: &SimulationOptions) -> Result<SimulationResult> {
    spec.validate()?;
    if options.replicates == 0 {
        return Err(Error::invalid("need at least one replicate"));
    }
    let runs: Vec<(Option<u64>, Vec<u32>)> = (0..options.replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(rep as u64);
            simulate_one(spec, options, &mut rng)
        })
        .collect();

    let times: Vec<f64> = runs.iter().filter_map(|(t, _)| t.map(|t| t as f64)).collect();
    let censored = options.replicates - times.len();
    let (mean_time, std_error) = mean_and_se(&times);
    let mut empirical_curve = vec![0.0; options.horizon + 1];
    for (_, curve) in &runs {
        for (acc, &v) in empirical_curve.iter_mut().zip(curve) {
            *acc += v as f64;
        }
    }
    for v in &mut empirical_curve {
        *v /= options.replicates as f64;
    }
    Ok(SimulationResult {
        mean_time,
        std_error,
        empirical_curve,
        replicates: options.replicates,
        censored,
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn simulate_one<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    options: &SimulationOptions,
    rng: &mut R,
) -> (Option<u64>, Vec<u32>) {
    let r = spec.r as usize;
    let mut found = vec![false; r];
    let mut count = 0usize;
    let mut curve = Vec::with_capacity(options.horizon + 1);
    curve.push(0);
    let mut in_q = vec![false; r];
    let mut t = 0u64;
    while count < r && t < options.max_iterations {
        t += 1;
        draw_relevant(spec, &found, count, &mut in_q, rng);
        match spec.scenario {
            ChainScenario::Chaining => {
                let mut j = 0;
                while j < r && in_q[j] {
                    if !found[j] {
                        found[j] = true;
                        count += 1;
                        if spec.single_step {
                            break;
                        }
                    }
                    j += 1;
                }
            }
            ChainScenario::Clique => {
                if in_q.iter().all(|&b| b) {
                    let pick = rng.gen_range(0..r);
                    if !found[pick] {
                        found[pick] = true;
                        count += 1;
                    }
                }
            }
            ChainScenario::Marginal => {
                for j in 0..r {
                    if in_q[j] && !found[j] {
                        found[j] = true;
                        count += 1;
                    }
                }
            }
        }
        if curve.len() <= options.horizon {
            curve.push(count as u32);
        }
    }
    while curve.len() <= options.horizon {
        curve.push(count as u32);
    }
    ((count == r).then_some(t), curve)
}

/// Marks which relevant variables land in this iteration's `Q`.
fn draw_relevant<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    found: &[bool],
    count: usize,
    in_q: &mut [bool],
    rng: &mut R,
) {
    in_q.iter_mut().for_each(|b| *b = false);
    // F only ever holds relevant variables in this idealized process.
    let keep = spec.retained(count as u64) as usize;
    if keep > 0 {
        let members: Vec<usize> = (0..found.len()).filter(|&j| found[j]).collect();
        for i in index::sample(rng, members.len(), keep) {
            in_q[members[i]] = true;
        }
    }
    // C: q - |R| draws from the p - |R| features outside R, realized by
    // selection sampling over the relevant ones only.
    let mut pool = spec.p - keep as u64;
    let mut draws = spec.q - keep as u64;
    for slot in in_q.iter_mut() {
        if *slot {
            continue;
        }
        if draws > 0 && rng.gen_range(0..pool) < draws {
            *slot = true;
            draws -= 1;
        }
        pool -= 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableConfig {
    pub scenario: ChainScenario,
    pub p: u64,
    pub q: u64,
    pub r: u64,
}

impl TableConfig {
    pub const fn new(scenario: ChainScenario, p: u64, q: u64, r: u64) -> Self {
        TableConfig { scenario, p, q, r }
    }

    pub fn spec(&self, alpha: f64) -> ScenarioSpec {
        ScenarioSpec::new(self.scenario, self.p, self.q, self.r, alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub scenario: ChainScenario,
    pub p: u64,
    pub q: u64,
    pub r: u64,
    /// `α = 0`.
    pub rs: f64,
    /// `α = 1`.
    pub srs: f64,
}

pub const CHAINING_CONFIGS: [TableConfig; 5] = [
    TableConfig::new(ChainScenario::Chaining, 10_000, 100, 1),
    TableConfig::new(ChainScenario::Chaining, 10_000, 100, 2),
    TableConfig::new(ChainScenario::Chaining, 10_000, 100, 3),
    TableConfig::new(ChainScenario::Chaining, 10_000, 100, 5),
    TableConfig::new(ChainScenario::Chaining, 100_000, 100, 3),
];

pub const CLIQUE_CONFIGS: [TableConfig; 5] = [
    TableConfig::new(ChainScenario::Clique, 10_000, 100, 1),
    TableConfig::new(ChainScenario::Clique, 10_000, 100, 2),
    TableConfig::new(ChainScenario::Clique, 10_000, 100, 3),
    TableConfig::new(ChainScenario::Clique, 10_000, 100, 4),
    TableConfig::new(ChainScenario::Clique, 10_000, 1_000, 4),
];

pub const MARGINAL_CONFIGS: [TableConfig; 5] = [
    TableConfig::new(ChainScenario::Marginal, 10_000, 100, 10),
    TableConfig::new(ChainScenario::Marginal, 10_000, 100, 50),
    TableConfig::new(ChainScenario::Marginal, 10_000, 100, 90),
    TableConfig::new(ChainScenario::Marginal, 10_000, 100, 100),
    TableConfig::new(ChainScenario::Marginal, 25_000, 100, 50),
];

/// The fifteen reference configurations, chaining then clique then marginal.
pub fn reference_configs() -> Vec<TableConfig> {
    CHAINING_CONFIGS
        .iter()
        .chain(&CLIQUE_CONFIGS)
        .chain(&MARGINAL_CONFIGS)
        .copied()
        .collect()
}

pub fn reproduce_tables(configs: &[TableConfig], single_step: bool) -> Result<Vec<TableRow>> {
    configs
        .iter()
        .map(|c| {
            let time = |alpha| {
                let spec = ScenarioSpec {
                    single_step,
                    ..c.spec(alpha)
                };
                expected_time(&spec)
            };
            Ok(TableRow {
                scenario: c.scenario,
                p: c.p,
                q: c.q,
                r: c.r,
                rs: time(0.0)?,
                srs: time(1.0)?,
            })
        })
        .collect()
}

/// Integer part below a million, `>1e{k}` with `k = ⌊log10 v⌋` above.
pub fn format_expected_time(value: f64) -> String {
    if !value.is_finite() {
        return "inf".to_string();
    }
    if value < 1e6 {
        // Absorb round-off so that 200.99999999999997 prints as 201.
        format!("{}", (value * (1.0 + 1e-12)).floor() as u64)
    } else {
        format!(">1e{}", value.log10().floor() as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: ChainScenario, p: u64, q: u64, r: u64, a: f64) -> ScenarioSpec {
        ScenarioSpec::new(s, p, q, r, a)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn single_variable_takes_p_over_q() {
        for s in ChainScenario::ALL {
            for a in [0.0, 1.0] {
                let t = expected_time(&spec(s, 10_000, 100, 1, a)).unwrap();
                assert!(rel(t, 100.0) < 1e-9, "{s} {a} {t}");
            }
        }
    }

    #[test]
    fn chaining_pair_matches_hypergeometric() {
        let t = expected_time(&spec(ChainScenario::Chaining, 10_000, 100, 2, 0.0)).unwrap();
        let oracle = (ln_binomial(10_000, 100) - ln_binomial(9_998, 98)).exp();
        assert!(rel(t, oracle) < 1e-9);
        assert!(rel(t, 10_100.0) < 1e-9);
    }

    #[test]
    fn clique_pair_counts_three_successes() {
        let t = expected_time(&spec(ChainScenario::Clique, 10_000, 100, 2, 0.0)).unwrap();
        assert!(rel(t, 30_300.0) < 1e-9);
        let t = expected_time(&spec(ChainScenario::Clique, 10_000, 100, 2, 1.0)).unwrap();
        assert!(rel(t, 10_302.0) < 1e-9);
    }

    #[test]
    fn two_state_geometric() {
        let m = MarkovChainModel::from_matrix(vec![vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!((expected_absorption_time(&m).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_and_malformed_chains() {
        let stuck = MarkovChainModel::from_matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(expected_absorption_time(&stuck), Err(Error::SingularChain(0))));
        assert!(MarkovChainModel::from_matrix(vec![vec![0.5, 0.4], vec![0.0, 1.0]]).is_err());
        assert!(MarkovChainModel::from_matrix(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).is_err());
        assert!(MarkovChainModel::from_matrix(vec![vec![0.5, 0.5], vec![0.0, 0.9, 0.1]]).is_err());
        assert!(MarkovChainModel::from_matrix(vec![]).is_err());
    }

    #[test]
    fn chains_are_stochastic_and_monotone() {
        for c in reference_configs() {
            for a in [0.0, 1.0] {
                let m = build_chain(&c.spec(a)).unwrap();
                for (i, row) in m.transition().iter().enumerate() {
                    assert!((row.iter().sum::<f64>() - 1.0).abs() <= ROW_TOLERANCE);
                    assert!(row[..i].iter().all(|&v| v == 0.0));
                }
            }
        }
    }

    #[test]
    fn spec_errors() {
        assert!(build_chain(&spec(ChainScenario::Clique, 100, 10, 11, 0.0)).is_err());
        assert!(build_chain(&spec(ChainScenario::Clique, 10, 11, 1, 0.0)).is_err());
        assert!(build_chain(&spec(ChainScenario::Clique, 100, 10, 2, 0.5)).is_err());
        assert!(simulate_process(&spec(ChainScenario::Clique, 100, 10, 2, 0.5), &SimulationOptions::new(0, 0)).is_err());
    }

    #[test]
    fn zero_relevant() {
        let s = spec(ChainScenario::Marginal, 50, 5, 0, 1.0);
        assert_eq!(expected_time(&s).unwrap(), 0.0);
        let sim = simulate_process(&s, &SimulationOptions::new(10, 1)).unwrap();
        assert_eq!(sim.mean_time, 0.0);
    }

    #[test]
    fn curve_is_monotone_and_bounded() {
        let m = build_chain(&spec(ChainScenario::Marginal, 1000, 50, 8, 1.0)).unwrap();
        let c = expected_found_curve(&m, 300);
        assert_eq!(c.len(), 301);
        assert_eq!(c[0], 0.0);
        assert!(c.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(c.iter().all(|&v| v <= 8.0 + 1e-9));
    }

    #[test]
    fn smart_chaining_dominates() {
        let rs = expected_found_curve(&build_chain(&spec(ChainScenario::Chaining, 10_000, 100, 3, 0.0)).unwrap(), 500);
        let srs = expected_found_curve(&build_chain(&spec(ChainScenario::Chaining, 10_000, 100, 3, 1.0)).unwrap(), 500);
        assert!(rs.iter().zip(&srs).all(|(a, b)| b >= a));
    }

    #[test]
    fn closed_forms() {
        let c = |s, p, q, r, a| closed_form_estimate(&spec(s, p, q, r, a)).unwrap();
        assert_eq!(c(ChainScenario::Chaining, 10_000, 100, 5, 1.0), Some(500.0));
        assert!(rel(c(ChainScenario::Chaining, 10_000, 100, 2, 0.0).unwrap(), 1e4) < 1e-12);
        assert!(rel(c(ChainScenario::Clique, 10_000, 100, 2, 0.0).unwrap(), 30_300.0) < 1e-9);
        assert!(rel(c(ChainScenario::Clique, 10_000, 100, 2, 1.0).unwrap(), 15_150.0) < 1e-9);
        assert_eq!(c(ChainScenario::Marginal, 10_000, 100, 5, 0.0), None);
    }

    #[test]
    fn single_step_variant() {
        let s = ScenarioSpec {
            single_step: true,
            ..spec(ChainScenario::Chaining, 10_000, 100, 2, 1.0)
        };
        assert!(rel(expected_time(&s).unwrap(), 201.0) < 1e-9);
        let rows = reproduce_tables(&CHAINING_CONFIGS[1..2], false).unwrap();
        assert!(rel(rows[0].srs, 200.0) < 1e-9);
    }

    #[test]
    fn simulation_is_seeded() {
        let s = spec(ChainScenario::Clique, 60, 20, 2, 1.0);
        let mut o = SimulationOptions::new(200, 4);
        o.horizon = 30;
        let a = simulate_process(&s, &o).unwrap();
        let b = simulate_process(&s, &o).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.empirical_curve.len(), 31);
        assert_eq!(a.censored, 0);
    }

    #[test]
    fn simulation_agrees_with_chain() {
        for (s, p, q, r, a) in [
            (ChainScenario::Chaining, 100, 20, 3, 1.0),
            (ChainScenario::Chaining, 60, 20, 3, 0.0),
            (ChainScenario::Clique, 80, 20, 3, 0.0),
            (ChainScenario::Marginal, 100, 10, 6, 1.0),
        ] {
            let sp = spec(s, p, q, r, a);
            let sim = simulate_process(&sp, &SimulationOptions::new(4000, 9)).unwrap();
            let exact = expected_time(&sp).unwrap();
            assert!((sim.mean_time - exact).abs() < 4.0 * sim.std_error, "{s} {a}: {} vs {exact}", sim.mean_time);
        }
    }

    #[test]
    fn fractional_alpha_sits_between() {
        let base = spec(ChainScenario::Chaining, 200, 20, 3, 0.0);
        let o = SimulationOptions::new(2000, 3);
        let t0 = simulate_process(&base, &o).unwrap().mean_time;
        let th = simulate_process(&base.with_alpha(0.05), &o).unwrap().mean_time;
        let t1 = simulate_process(&base.with_alpha(1.0), &o).unwrap().mean_time;
        assert!(t1 < th && th < t0, "{t0} {th} {t1}");
    }

    #[test]
    fn display() {
        assert_eq!(format_expected_time(301.02), "301");
        assert_eq!(format_expected_time(999_999.9), "999999");
        assert_eq!(format_expected_time(1.0304e6), ">1e6");
        assert_eq!(format_expected_time(1.1058e10), ">1e10");
        assert_eq!(format_expected_time(200.99999999999997), "201");
    }
}
