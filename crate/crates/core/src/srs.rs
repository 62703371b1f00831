//! The sequential random subspace driver.
//!
//! Each iteration draws a subspace `Q = R ∪ C` of exactly `q` features,
//! where `R` holds `min(⌊αq⌋, |F|)` features already found and `C` is drawn
//! from the remaining features, grows one tree on `Q`, and adds to `F` every
//! feature of `Q` whose importance passes the acceptance test. With `α = 0`
//! this is the plain random subspace method.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{subspace_population, Dataset, GeneratorSpec};
use crate::distribution::JointDistribution;
use crate::tree::{build_tree, DecisionTree, ImportanceVector, TrainingSet};
use crate::{Error, Result};

/// Importance a feature must exceed when no probes are used.
pub const ZERO_IMPORTANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeRule {
    /// Accept features scoring above every probe.
    StrictMax,
    /// Accept features scoring above the given quantile of the probes.
    Quantile(f64),
}

impl fmt::Display for ProbeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeRule::StrictMax => f.write_str("strict_max"),
            ProbeRule::Quantile(g) => write!(f, "quantile:{g}"),
        }
    }
}

impl FromStr for ProbeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "strict_max" {
            return Ok(ProbeRule::StrictMax);
        }
        let gamma = s
            .strip_prefix("quantile:")
            .or_else(|| s.strip_prefix("quantile="))
            .and_then(|g| g.parse::<f64>().ok())
            .ok_or_else(|| Error::invalid(format!("unknown probe rule `{s}`")))?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("probe quantile must lie in [0, 1]"));
        }
        Ok(ProbeRule::Quantile(gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Row-permuted copy of a feature drawn uniformly from the subspace.
    Permuted,
    /// Independent uniform draws over the given number of categories.
    Uniform(u32),
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeKind::Permuted => f.write_str("permuted"),
            ProbeKind::Uniform(a) => write!(f, "uniform:{a}"),
        }
    }
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "permuted" {
            return Ok(ProbeKind::Permuted);
        }
        let arity = s
            .strip_prefix("uniform:")
            .and_then(|a| a.parse::<u32>().ok())
            .filter(|&a| a >= 1)
            .ok_or_else(|| Error::invalid(format!("unknown probe kind `{s}`")))?;
        Ok(ProbeKind::Uniform(arity))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrsConfig {
    /// Memory budget: number of features per subspace.
    pub q: usize,
    pub iterations: usize,
    /// Share of the budget reserved for already-found features.
    pub alpha: f64,
    /// Candidates drawn per node.
    pub k: usize,
    /// `0` switches to the exact rule `importance > ZERO_IMPORTANCE`.
    pub probe_count: usize,
    pub probe_rule: ProbeRule,
    pub probe_kind: ProbeKind,
    pub seed: u64,
}

impl SrsConfig {
    pub fn new(q: usize, iterations: usize, alpha: f64, k: usize) -> Self {
        SrsConfig {
            q,
            iterations,
            alpha,
            k,
            probe_count: 1,
            probe_rule: ProbeRule::StrictMax,
            probe_kind: ProbeKind::Permuted,
            seed: 0,
        }
    }

    /// Exact acceptance, for trees grown on a population table.
    pub fn exact(q: usize, iterations: usize, alpha: f64, k: usize) -> Self {
        SrsConfig {
            probe_count: 0,
            ..SrsConfig::new(q, iterations, alpha, k)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_probes(mut self, count: usize, rule: ProbeRule) -> Self {
        self.probe_count = count;
        self.probe_rule = rule;
        self
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.q < 1 {
            return Err(Error::invalid("q must be at least 1"));
        }
        if self.q > p {
            return Err(Error::invalid(format!("q = {} exceeds p = {p}", self.q)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("alpha must lie in [0, 1]"));
        }
        if self.k < 1 || self.k > self.q {
            return Err(Error::invalid(format!("K = {} outside [1, q = {}]", self.k, self.q)));
        }
        if let ProbeRule::Quantile(g) = self.probe_rule {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::invalid("probe quantile must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// A drawn subspace: retained features `R` then fresh features `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub retained: Vec<usize>,
    pub fresh: Vec<usize>,
}

impl Subspace {
    pub fn len(&self) -> usize {
        self.retained.len() + self.fresh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn features(&self) -> Vec<usize> {
        self.retained.iter().chain(&self.fresh).copied().collect()
    }
}

/// Number of found features kept in the subspace: `min(⌊αq⌋, |F|)`.
pub fn retained_count(found: usize, q: usize, alpha: f64) -> usize {
    ((alpha * q as f64).floor() as usize).min(found)
}

/// Draws `R` uniformly from `found` and `C` uniformly from `0..p` minus `R`.
///
/// `C` may contain found features that were not retained.
pub fn select_subspace<R: Rng + ?Sized>(
    found: &[usize],
    p: usize,
    q: usize,
    alpha: f64,
    rng: &mut R,
) -> Result<Subspace> {
    if q > p {
        return Err(Error::invalid(format!("q = {q} exceeds p = {p}")));
    }
    let m = retained_count(found.len(), q, alpha);
    let retained: Vec<usize> = if m == 0 {
        Vec::new()
    } else {
        index::sample(rng, found.len(), m)
            .into_iter()
            .map(|i| found[i])
            .collect()
    };
    let mut excluded = retained.clone();
    excluded.sort_unstable();
    let fresh = if q == m {
        Vec::new()
    } else {
        index::sample(rng, p - m, q - m)
            .into_iter()
            .map(|pos| nth_not_in(pos, &excluded))
            .collect()
    };
    Ok(Subspace { retained, fresh })
}

/// The `pos`-th integer (0-based) not present in the sorted list `excluded`.
fn nth_not_in(pos: usize, excluded: &[usize]) -> usize {
    let mut value = pos;
    for &e in excluded {
        if e <= value {
            value += 1;
        } else {
            break;
        }
    }
    value
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub subspace: Subspace,
    /// Features of the subspace that passed the test this iteration.
    pub accepted: Vec<usize>,
    /// Features newly added to `F` this iteration.
    pub added: Vec<usize>,
    pub found_after: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SrsState {
    /// `F`, in order of discovery.
    pub found: Vec<usize>,
    found_set: BTreeSet<usize>,
    pub ensemble: Vec<DecisionTree>,
    pub history: Vec<IterationRecord>,
}

impl SrsState {
    pub fn contains(&self, feature: usize) -> bool {
        self.found_set.contains(&feature)
    }

    pub fn found_set(&self) -> &BTreeSet<usize> {
        &self.found_set
    }

    fn add(&mut self, feature: usize) -> bool {
        if self.found_set.insert(feature) {
            self.found.push(feature);
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone)]
pub struct SrsResult {
    pub state: SrsState,
    /// Ensemble MDI averaged over all trees, probes excluded.
    pub importances: ImportanceVector,
}

impl SrsResult {
    pub fn found(&self) -> &[usize] {
        &self.state.found
    }

    pub fn found_set(&self) -> &BTreeSet<usize> {
        self.state.found_set()
    }
}

/// Grows one tree on `subspace` (plus probe columns when
/// `cfg.probe_count > 0`) and returns it with the accepted real features.
pub fn probe_test<R: Rng + ?Sized>(
    data: &TrainingSet<'_>,
    subspace: &[usize],
    cfg: &SrsConfig,
    rng: &mut R,
) -> Result<(DecisionTree, Vec<usize>)> {
    if cfg.probe_count == 0 {
        let tree = build_tree(data, subspace, cfg.k, rng)?;
        let imp = tree.mdi_importance();
        let accepted = subspace
            .iter()
            .copied()
            .filter(|&j| imp.get(j) > ZERO_IMPORTANCE)
            .collect();
        return Ok((tree, accepted));
    }

    let mut view = data.view();
    let mut columns = subspace.to_vec();
    let mut probes = Vec::with_capacity(cfg.probe_count);
    for _ in 0..cfg.probe_count {
        let (values, arity) = match cfg.probe_kind {
            ProbeKind::Permuted => {
                let source = *subspace.choose(rng).expect("subspace is nonempty");
                let mut values = data.column(source).to_vec();
                values.shuffle(rng);
                (values, data.arity(source))
            }
            ProbeKind::Uniform(arity) => (
                (0..data.n_rows()).map(|_| rng.gen_range(0..arity)).collect(),
                arity,
            ),
        };
        let j = view.push_column(values, arity)?;
        columns.push(j);
        probes.push(j);
    }
    let tree = build_tree(&view, &columns, cfg.k, rng)?;
    let imp = tree.mdi_importance();
    let mut probe_scores: Vec<f64> = probes.iter().map(|&j| imp.get(j)).collect();
    let threshold = match cfg.probe_rule {
        ProbeRule::StrictMax => probe_scores.iter().copied().fold(0.0, f64::max),
        ProbeRule::Quantile(g) => quantile(&mut probe_scores, g),
    };
    let accepted = subspace
        .iter()
        .copied()
        .filter(|&j| imp.get(j) > threshold)
        .collect();
    Ok((tree, accepted))
}

/// Linearly interpolated quantile.
fn quantile(values: &mut [f64], gamma: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let h = gamma * (values.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    values[lo] + (h - lo as f64) * (values[hi] - values[lo])
}

fn iteration_rng(seed: u64, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration as u64);
    rng
}

/// Runs the full sequential random subspace procedure.
pub fn run_srs(data: &TrainingSet<'_>, cfg: &SrsConfig) -> Result<SrsResult> {
    if data.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    run_with(data.n_features(), cfg, true, |_| Ok(data.view()))
}

pub fn run_srs_on_dataset(ds: &Dataset, cfg: &SrsConfig) -> Result<SrsResult> {
    run_srs(&TrainingSet::from_dataset(ds), cfg)
}

/// Runs on the population table itself, so "importance > 0" is exact.
/// Probes are disabled regardless of `cfg.probe_count`.
pub fn run_srs_population(dist: &JointDistribution, cfg: &SrsConfig) -> Result<SrsResult> {
    let cfg = SrsConfig {
        probe_count: 0,
        ..cfg.clone()
    };
    run_srs(&TrainingSet::from_distribution(dist), &cfg)
}

/// Exact mode for generated scenarios with many features: each tree is
/// grown on the population of its own subspace, so `p` is not limited by
/// the size of the full joint table. Probes are disabled.
pub fn run_srs_scenario_population(spec: &GeneratorSpec, cfg: &SrsConfig) -> Result<SrsResult> {
    let cfg = SrsConfig {
        probe_count: 0,
        ..cfg.clone()
    };
    run_with(spec.p, &cfg, true, |features| {
        Ok(TrainingSet::from_distribution(&subspace_population(spec, features)?))
    })
}

/// Plain random subspace ensemble: every iteration draws `q` features
/// uniformly, independently of what was found before.
pub fn run_random_subspace(data: &TrainingSet<'_>, cfg: &SrsConfig) -> Result<SrsResult> {
    if data.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    run_with(data.n_features(), cfg, false, |_| Ok(data.view()))
}

/// The iteration loop. `source` yields the training set for a subspace.
fn run_with<'a, F>(p: usize, cfg: &SrsConfig, sequential: bool, mut source: F) -> Result<SrsResult>
where
    F: FnMut(&[usize]) -> Result<TrainingSet<'a>>,
{
    cfg.validate(p)?;
    let mut state = SrsState::default();
    let mut importances = vec![0.0; p];
    for t in 0..cfg.iterations {
        let mut rng = iteration_rng(cfg.seed, t);
        let subspace = if sequential {
            select_subspace(&state.found, p, cfg.q, cfg.alpha, &mut rng)?
        } else {
            Subspace {
                retained: Vec::new(),
                fresh: index::sample(&mut rng, p, cfg.q).into_vec(),
            }
        };
        let features = subspace.features();
        let data = source(&features)?;
        let (tree, accepted) = probe_test(&data, &features, cfg, &mut rng)?;
        for (total, v) in importances.iter_mut().zip(tree.mdi_importance().as_slice()) {
            *total += v;
        }
        let added: Vec<usize> = accepted.iter().copied().filter(|&j| state.add(j)).collect();
        state.history.push(IterationRecord {
            iteration: t + 1,
            subspace,
            accepted,
            added,
            found_after: state.found.len(),
        });
        state.ensemble.push(tree);
    }
    if cfg.iterations > 0 {
        for v in &mut importances {
            *v /= cfg.iterations as f64;
        }
    }
    Ok(SrsResult {
        state,
        importances: ImportanceVector(importances),
    })
}

/// Plurality vote over the ensemble; ties go to the smallest class.
pub fn predict_ensemble(result: &SrsResult, samples: &[Vec<u32>]) -> Result<Vec<u32>> {
    vote(&result.state.ensemble, samples)
}

pub fn vote(trees: &[DecisionTree], samples: &[Vec<u32>]) -> Result<Vec<u32>> {
    if trees.is_empty() {
        return Err(Error::invalid("cannot predict with an empty ensemble"));
    }
    let n_classes = trees
        .iter()
        .map(|t| t.root().class_weights.len())
        .max()
        .unwrap_or(1);
    let mut votes = vec![0usize; n_classes];
    Ok(samples
        .iter()
        .map(|sample| {
            votes.iter_mut().for_each(|v| *v = 0);
            for tree in trees {
                votes[tree.predict(sample) as usize] += 1;
            }
            let mut best = 0;
            for (c, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, population, GeneratorSpec, Scenario};

    #[test]
    fn subspace_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = select_subspace(&[1, 2, 3], 50, 10, 0.0, &mut rng).unwrap();
        assert!(s.retained.is_empty());
        assert_eq!(s.fresh.len(), 10);

        let s = select_subspace(&[1, 2, 3], 50, 10, 0.5, &mut rng).unwrap();
        assert_eq!(s.retained.len(), 3);
        assert_eq!(s.fresh.len(), 7);

        let found: Vec<usize> = (0..25).collect();
        let s = select_subspace(&found, 50, 10, 1.0, &mut rng).unwrap();
        assert_eq!(s.retained.len(), 10);
        assert!(s.fresh.is_empty());

        assert!(select_subspace(&[], 5, 6, 0.0, &mut rng).is_err());
    }

    #[test]
    fn fresh_features_avoid_retained_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = select_subspace(&[0, 4, 7, 9], 12, 8, 0.5, &mut rng).unwrap();
            let all = s.features();
            let set: BTreeSet<usize> = all.iter().copied().collect();
            assert_eq!(set.len(), 8);
            assert!(all.iter().all(|&j| j < 12));
            assert!(s.retained.iter().all(|j| [0, 4, 7, 9].contains(j)));
        }
    }

    #[test]
    fn nth_not_in_skips_excluded() {
        let excluded = [0, 2, 3];
        let seq: Vec<usize> = (0..4).map(|i| nth_not_in(i, &excluded)).collect();
        assert_eq!(seq, vec![1, 4, 5, 6]);
    }

    #[test]
    fn probe_rules_parse() {
        assert_eq!("strict_max".parse::<ProbeRule>().unwrap(), ProbeRule::StrictMax);
        assert_eq!("quantile:0.9".parse::<ProbeRule>().unwrap(), ProbeRule::Quantile(0.9));
        assert!("quantile:2".parse::<ProbeRule>().is_err());
        assert_eq!("uniform:3".parse::<ProbeKind>().unwrap(), ProbeKind::Uniform(3));
        assert!("uniform:0".parse::<ProbeKind>().is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let mut v = vec![3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&mut v, 0.0), 1.0);
        assert_eq!(quantile(&mut v, 1.0), 4.0);
        assert!((quantile(&mut v, 0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn copy_feature_beats_probe() {
        let ds = generate(&GeneratorSpec::new(Scenario::Marginal, 6, 1, 5000).with_seed(2)).unwrap();
        let data = TrainingSet::from_dataset(&ds);
        let cfg = SrsConfig::new(6, 1, 0.0, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, accepted) = probe_test(&data, &[0, 1, 2, 3, 4, 5], &cfg, &mut rng).unwrap();
        assert_eq!(accepted, vec![0]);
    }

    #[test]
    fn exact_rule_accepts_positive_importance() {
        let dist = population(&GeneratorSpec::new(Scenario::Clique, 3, 2, 1)).unwrap();
        let data = TrainingSet::from_distribution(&dist);
        let cfg = SrsConfig::exact(3, 1, 0.0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (tree, accepted) = probe_test(&data, &[0, 1, 2], &cfg, &mut rng).unwrap();
        let imp = tree.mdi_importance();
        let expected: Vec<usize> = [0, 1, 2].into_iter().filter(|&j| imp.get(j) > 1e-10).collect();
        assert_eq!(accepted, expected);
        assert!(!accepted.contains(&2));
    }

    #[test]
    fn zero_iterations() {
        let dist = population(&GeneratorSpec::new(Scenario::Clique, 3, 2, 1)).unwrap();
        let result = run_srs_population(&dist, &SrsConfig::exact(2, 0, 0.5, 1)).unwrap();
        assert!(result.found().is_empty());
        assert!(result.state.ensemble.is_empty());
        assert!(result.importances.as_slice().iter().all(|&v| v == 0.0));
        assert!(predict_ensemble(&result, &[vec![0, 0, 0]]).is_err());
    }

    #[test]
    fn alpha_zero_matches_random_subspace() {
        let ds = generate(&GeneratorSpec::new(Scenario::Chaining, 30, 3, 400).with_seed(8)).unwrap();
        let data = TrainingSet::from_dataset(&ds);
        let cfg = SrsConfig::new(8, 40, 0.0, 3).with_seed(17);
        let a = run_srs(&data, &cfg).unwrap();
        let b = run_random_subspace(&data, &cfg).unwrap();
        assert_eq!(a.state.history, b.state.history);
        assert_eq!(a.state.ensemble, b.state.ensemble);
        assert_eq!(a.importances, b.importances);
    }

    #[test]
    fn run_is_deterministic() {
        let ds = generate(&GeneratorSpec::new(Scenario::MadelonLike, 40, 4, 300).with_seed(1)).unwrap();
        let cfg = SrsConfig::new(10, 20, 0.5, 3).with_seed(5);
        let a = run_srs_on_dataset(&ds, &cfg).unwrap();
        let b = run_srs_on_dataset(&ds, &cfg).unwrap();
        assert_eq!(a.state.history, b.state.history);
        assert_eq!(a.state.ensemble, b.state.ensemble);
    }

    #[test]
    fn config_validation() {
        let dist = population(&GeneratorSpec::new(Scenario::Clique, 3, 2, 1)).unwrap();
        assert!(run_srs_population(&dist, &SrsConfig::exact(4, 1, 0.0, 1)).is_err());
        assert!(run_srs_population(&dist, &SrsConfig::exact(2, 1, 1.5, 1)).is_err());
        assert!(run_srs_population(&dist, &SrsConfig::exact(2, 1, 0.5, 3)).is_err());
        assert!(run_srs_population(&dist, &SrsConfig::exact(2, 1, 0.5, 0)).is_err());
    }

    #[test]
    fn voting() {
        let ds = Dataset::new(vec![vec![0, 1, 0, 1]], vec![0, 1, 0, 1], vec![2], 2, None).unwrap();
        let data = TrainingSet::from_dataset(&ds);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let copy = build_tree(&data, &[0], 1, &mut rng).unwrap();
        let flipped_ds = Dataset::new(vec![vec![0, 1, 0, 1]], vec![1, 0, 1, 0], vec![2], 2, None).unwrap();
        let flipped = DecisionTree::fit(&flipped_ds, &[0], 1, &mut rng).unwrap();
        let samples = vec![vec![0], vec![1]];

        assert_eq!(vote(&[copy.clone()], &samples).unwrap(), vec![copy.predict(&[0]), copy.predict(&[1])]);
        // (0, 0, 1) -> 0 for the first sample.
        let three = vote(&[copy.clone(), copy.clone(), flipped.clone()], &samples).unwrap();
        assert_eq!(three, vec![0, 1]);
        // A 1-1 tie goes to class 0.
        let tie = vote(&[copy, flipped], &samples).unwrap();
        assert_eq!(tie, vec![0, 0]);
    }

    #[test]
    fn chaining_soundness_with_many_features() {
        let spec = GeneratorSpec::new(Scenario::Chaining, 50, 3, 1);
        let result = run_srs_scenario_population(&spec, &SrsConfig::exact(10, 300, 1.0, 10).with_seed(4)).unwrap();
        assert_eq!(result.found_set(), &(0..3).collect::<BTreeSet<_>>());
    }
}
