//! Discrete datasets, scenario generators and CSV persistence.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{JointDistribution, DEFAULT_MAX_VARIABLES};
use crate::{Error, Result};

/// Feature matrix stored column by column, with class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    columns: Vec<Vec<u32>>,
    labels: Vec<u32>,
    arities: Vec<u32>,
    n_classes: u32,
    relevant_truth: Option<BTreeSet<usize>>,
}

impl Dataset {
    pub fn new(
        columns: Vec<Vec<u32>>,
        labels: Vec<u32>,
        arities: Vec<u32>,
        n_classes: u32,
        relevant_truth: Option<BTreeSet<usize>>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if columns.len() != arities.len() {
            return Err(Error::invalid(format!(
                "{} columns but {} arities",
                columns.len(),
                arities.len()
            )));
        }
        for (j, (col, &arity)) in columns.iter().zip(&arities).enumerate() {
            if col.len() != labels.len() {
                return Err(Error::invalid(format!("column {j} has {} rows", col.len())));
            }
            if arity == 0 {
                return Err(Error::invalid(format!("feature {j} has arity 0")));
            }
            if let Some(v) = col.iter().find(|&&v| v >= arity) {
                return Err(Error::invalid(format!(
                    "feature {j} value {v} out of range for arity {arity}"
                )));
            }
        }
        if let Some(y) = labels.iter().find(|&&y| y >= n_classes) {
            return Err(Error::invalid(format!(
                "label {y} out of range for {n_classes} classes"
            )));
        }
        if let Some(truth) = &relevant_truth {
            if let Some(&j) = truth.iter().find(|&&j| j >= columns.len()) {
                return Err(Error::invalid(format!("relevant feature {j} does not exist")));
            }
        }
        Ok(Dataset {
            columns,
            labels,
            arities,
            n_classes,
            relevant_truth,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn relevant_truth(&self) -> Option<&BTreeSet<usize>> {
        self.relevant_truth.as_ref()
    }

    pub fn set_relevant_truth(&mut self, truth: Option<BTreeSet<usize>>) -> Result<()> {
        if let Some(t) = &truth {
            if let Some(&j) = t.iter().find(|&&j| j >= self.n_features()) {
                return Err(Error::invalid(format!("relevant feature {j} does not exist")));
            }
        }
        self.relevant_truth = truth;
        Ok(())
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.n_samples()).map(|i| self.row(i)).collect()
    }

    /// Empirical joint table over the chosen features and the label.
    pub fn to_distribution(&self, variables: &[usize]) -> Result<JointDistribution> {
        self.to_distribution_limited(variables, DEFAULT_MAX_VARIABLES)
    }

    pub fn to_distribution_limited(
        &self,
        variables: &[usize],
        max_variables: usize,
    ) -> Result<JointDistribution> {
        if variables.len() > max_variables {
            return Err(Error::Capacity {
                what: "number of variables in an empirical table",
                got: variables.len(),
                limit: max_variables,
            });
        }
        if let Some(&j) = variables.iter().find(|&&j| j >= self.n_features()) {
            return Err(Error::UnknownVariable(format!("x{j}")));
        }
        let arities: Vec<usize> = variables.iter().map(|&j| self.arities[j] as usize).collect();
        let oa = self.n_classes as usize;
        let size = arities.iter().product::<usize>() * oa;
        let mut counts = vec![0.0; size];
        for i in 0..self.n_samples() {
            let mut index = 0;
            for (&j, &a) in variables.iter().zip(&arities) {
                index = index * a + self.columns[j][i] as usize;
            }
            counts[index * oa + self.labels[i] as usize] += 1.0;
        }
        let n = self.n_samples() as f64;
        for c in &mut counts {
            *c /= n;
        }
        let names = variables.iter().map(|j| format!("x{j}")).collect();
        JointDistribution::with_output_name(names, arities, "y".into(), oa, counts)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        let header: Vec<String> = self
            .arities
            .iter()
            .enumerate()
            .map(|(j, a)| format!("x{j}:{a}"))
            .chain(std::iter::once(format!("y:{}", self.n_classes)))
            .collect();
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(self.n_features() + 1);
        for i in 0..self.n_samples() {
            record.clear();
            record.extend(self.columns.iter().map(|c| c[i].to_string()));
            record.push(self.labels[i].to_string());
            w.write_record(&record)?;
        }
        w.flush()?;
        let sidecar = truth_path(path);
        match &self.relevant_truth {
            Some(truth) => {
                let text: String = truth.iter().map(|j| format!("{j}\n")).collect();
                std::fs::write(sidecar, text)?;
            }
            None => {
                if sidecar.exists() {
                    std::fs::remove_file(sidecar)?;
                }
            }
        }
        Ok(())
    }

    /// Reads a dataset written by [`Dataset::save_csv`], or any headed CSV of
    /// category indices whose last column is the label. Header fields may
    /// carry an arity suffix (`name:3`); otherwise the arity is inferred as
    /// one plus the largest value seen.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(path)?;
        let mut records = reader.records();
        let header = match records.next() {
            Some(h) => h?,
            None => return Err(Error::EmptyDataset),
        };
        let width = header.len();
        if width < 1 {
            return Err(Error::Parse {
                line: 1,
                message: "header has no columns".into(),
            });
        }
        let mut declared = Vec::with_capacity(width);
        for field in header.iter() {
            let arity = match field.rsplit_once(':') {
                Some((_, a)) => Some(a.trim().parse::<u32>().map_err(|_| Error::Parse {
                    line: 1,
                    message: format!("bad arity in header field `{field}`"),
                })?),
                None => None,
            };
            declared.push(arity);
        }
        let mut columns = vec![Vec::new(); width - 1];
        let mut labels = Vec::new();
        for (offset, record) in records.enumerate() {
            let line = offset + 2;
            let record = record?;
            if record.len() != width {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {width} fields, found {}", record.len()),
                });
            }
            for (k, field) in record.iter().enumerate() {
                let v: u32 = field.trim().parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{field}` is not a nonnegative integer"),
                })?;
                if k + 1 == width {
                    labels.push(v);
                } else {
                    columns[k].push(v);
                }
            }
        }
        if labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let infer = |col: &[u32]| col.iter().copied().max().unwrap_or(0) + 1;
        let arities: Vec<u32> = columns
            .iter()
            .zip(&declared)
            .map(|(c, d)| d.unwrap_or_else(|| infer(c)))
            .collect();
        let n_classes = declared[width - 1].unwrap_or_else(|| infer(&labels));

        let sidecar = truth_path(path);
        let truth = if sidecar.exists() {
            Some(read_truth(&sidecar)?)
        } else {
            None
        };
        Dataset::new(columns, labels, arities, n_classes, truth)
    }
}

/// Location of the ground-truth sidecar for a dataset file.
pub fn truth_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".truth");
    PathBuf::from(s)
}

pub fn read_truth(path: &Path) -> Result<BTreeSet<usize>> {
    let text = std::fs::read_to_string(path)?;
    let mut truth = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        truth.insert(line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("`{line}` is not a feature index"),
        })?);
    }
    Ok(truth)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// `X_i` is revealed only by the full prefix `{X_1..X_{i-1}}`.
    Chaining,
    /// Output is the parity of all relevant features.
    Clique,
    /// Every relevant feature is marginally and strongly relevant.
    Marginal,
    /// Clusters of class centers over the informative features.
    MadelonLike,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Chaining => "chaining",
            Scenario::Clique => "clique",
            Scenario::Marginal => "marginal",
            Scenario::MadelonLike => "madelon_like",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chaining" => Ok(Scenario::Chaining),
            "clique" => Ok(Scenario::Clique),
            "marginal" => Ok(Scenario::Marginal),
            "madelon_like" | "madelon" => Ok(Scenario::MadelonLike),
            other => Err(Error::invalid(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub scenario: Scenario,
    /// Total number of features.
    pub p: usize,
    /// Number of relevant features (indices `0..r`).
    pub r: usize,
    pub n: usize,
    /// Probability of flipping each label.
    pub noise: f64,
    pub seed: u64,
    /// Category count of every feature (only `madelon_like` may use more
    /// than two).
    pub arity: u32,
    pub clusters_per_class: usize,
    /// Probability that an informative value is redrawn uniformly instead
    /// of copied from its cluster center (`madelon_like` only).
    pub feature_noise: f64,
}

impl GeneratorSpec {
    pub fn new(scenario: Scenario, p: usize, r: usize, n: usize) -> Self {
        GeneratorSpec {
            scenario,
            p,
            r,
            n,
            noise: 0.0,
            seed: 0,
            arity: 2,
            clusters_per_class: 2,
            feature_noise: 0.1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.r > self.p {
            return Err(Error::invalid(format!(
                "r = {} exceeds p = {}",
                self.r, self.p
            )));
        }
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::invalid("noise must lie in [0, 1)"));
        }
        if self.arity < 2 {
            return Err(Error::invalid("arity must be at least 2"));
        }
        if self.scenario != Scenario::MadelonLike && self.arity != 2 {
            return Err(Error::invalid(format!(
                "the {} scenario uses binary features",
                self.scenario
            )));
        }
        if self.scenario == Scenario::MadelonLike {
            if self.clusters_per_class == 0 {
                return Err(Error::invalid("clusters_per_class must be positive"));
            }
            if !(0.0..=1.0).contains(&self.feature_noise) {
                return Err(Error::invalid("feature_noise must lie in [0, 1]"));
            }
            let corners = (self.arity as f64).powi(self.r.min(64) as i32);
            if self.r > 0 && corners < 2.0 * self.clusters_per_class as f64 {
                return Err(Error::invalid(
                    "too few informative feature combinations for the requested clusters",
                ));
            }
        }
        self.p
            .checked_mul(self.n)
            .filter(|&cells| cells <= 1 << 32)
            .ok_or(Error::Capacity {
                what: "dataset cells",
                got: usize::MAX,
                limit: 1 << 32,
            })?;
        Ok(())
    }
}

struct LabelModel {
    scenario: Scenario,
    r: usize,
    noise: f64,
    arity: u32,
    feature_noise: f64,
    /// `(class, center)` for `madelon_like`.
    centers: Vec<(u32, Vec<u32>)>,
}

impl LabelModel {
    fn new(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Self {
        let mut centers = Vec::new();
        if spec.scenario == Scenario::MadelonLike && spec.r > 0 {
            let k = 2 * spec.clusters_per_class;
            loop {
                centers = (0..k)
                    .map(|c| {
                        let center = (0..spec.r).map(|_| rng.gen_range(0..spec.arity)).collect();
                        ((c % 2) as u32, center)
                    })
                    .collect();
                if centers_are_informative(&centers, spec.r) {
                    break;
                }
            }
        }
        LabelModel {
            scenario: spec.scenario,
            r: spec.r,
            noise: spec.noise,
            arity: spec.arity,
            feature_noise: spec.feature_noise,
            centers,
        }
    }

    /// `P(Y = 1 | relevant features)` before label noise.
    fn clean_positive(&self, x: &[u32]) -> f64 {
        let r = self.r;
        if r == 0 {
            return 0.5;
        }
        let sign = |v: u32| if v == 1 { 1.0 } else { -1.0 };
        match self.scenario {
            Scenario::Chaining => {
                // 1/2 + c * sum_i prod_{j<=i} s(x_j): the i-th term only
                // becomes visible once the whole prefix is conditioned on.
                let c = 0.5 / r as f64;
                let mut character = 1.0;
                let mut theta = 0.5;
                for &v in &x[..r] {
                    character *= sign(v);
                    theta += c * character;
                }
                theta
            }
            Scenario::Clique => (x[..r].iter().sum::<u32>() % 2) as f64,
            Scenario::Marginal => x[..r].iter().sum::<u32>() as f64 / r as f64,
            Scenario::MadelonLike => {
                let a = self.arity as f64;
                let mut mass = [0.0f64; 2];
                for (class, center) in &self.centers {
                    let like: f64 = center
                        .iter()
                        .zip(&x[..r])
                        .map(|(&c, &v)| {
                            self.feature_noise / a + if c == v { 1.0 - self.feature_noise } else { 0.0 }
                        })
                        .product();
                    mass[*class as usize] += like;
                }
                mass[1] / (mass[0] + mass[1])
            }
        }
    }

    /// `P(relevant features = x)` for `madelon_like`.
    fn relevant_marginal(&self, x: &[u32]) -> f64 {
        let a = self.arity as f64;
        let total: f64 = self
            .centers
            .iter()
            .map(|(_, center)| {
                center
                    .iter()
                    .zip(&x[..self.r])
                    .map(|(&c, &v)| {
                        self.feature_noise / a + if c == v { 1.0 - self.feature_noise } else { 0.0 }
                    })
                    .product::<f64>()
            })
            .sum();
        total / self.centers.len() as f64
    }

    fn positive(&self, x: &[u32]) -> f64 {
        let theta = self.clean_positive(x);
        theta * (1.0 - self.noise) + (1.0 - theta) * self.noise
    }

    fn sample_row(&self, p: usize, rng: &mut ChaCha8Rng, row: &mut [u32]) -> u32 {
        match self.scenario {
            Scenario::MadelonLike if self.r > 0 => {
                let (class, center) = &self.centers[rng.gen_range(0..self.centers.len())];
                for (slot, &c) in row[..self.r].iter_mut().zip(center) {
                    *slot = if rng.gen::<f64>() < self.feature_noise {
                        rng.gen_range(0..self.arity)
                    } else {
                        c
                    };
                }
                for slot in &mut row[self.r..p] {
                    *slot = rng.gen_range(0..self.arity);
                }
                let flip = rng.gen::<f64>() < self.noise;
                class ^ flip as u32
            }
            _ => {
                for slot in &mut row[..p] {
                    *slot = rng.gen_range(0..self.arity);
                }
                rng.gen_bool(self.positive(row).clamp(0.0, 1.0)) as u32
            }
        }
    }
}

fn centers_are_informative(centers: &[(u32, Vec<u32>)], r: usize) -> bool {
    let distinct_centers = centers
        .iter()
        .map(|(_, c)| c)
        .collect::<BTreeSet<_>>()
        .len()
        == centers.len();
    distinct_centers
        && (0..r).all(|j| {
            let first = centers[0].1[j];
            centers.iter().any(|(_, c)| c[j] != first)
        })
}

/// Draws `spec.n` samples of the scenario's population.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let model = LabelModel::new(spec, &mut rng);
    let mut columns = vec![Vec::with_capacity(spec.n); spec.p];
    let mut labels = Vec::with_capacity(spec.n);
    let mut row = vec![0u32; spec.p];
    for _ in 0..spec.n {
        let y = model.sample_row(spec.p, &mut rng, &mut row);
        for (col, &v) in columns.iter_mut().zip(&row) {
            col.push(v);
        }
        labels.push(y);
    }
    Dataset::new(
        columns,
        labels,
        vec![spec.arity; spec.p],
        2,
        Some((0..spec.r).collect()),
    )
}

/// Exact population table of the scenario over all `p` features.
///
/// Irrelevant features are uniform and independent of everything else.
pub fn population(spec: &GeneratorSpec) -> Result<JointDistribution> {
    spec.validate()?;
    if spec.p > DEFAULT_MAX_VARIABLES + 4 {
        return Err(Error::Capacity {
            what: "features in a population table",
            got: spec.p,
            limit: DEFAULT_MAX_VARIABLES + 4,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let model = LabelModel::new(spec, &mut rng);
    let a = spec.arity as usize;
    let arities = vec![a; spec.p];
    let mut x = vec![0u32; spec.p];
    let uniform = (a as f64).powi(-(spec.p as i32));
    let irrelevant = (a as f64).powi(-((spec.p - spec.r) as i32));
    JointDistribution::from_fn(&arities, 2, |values, y| {
        for (slot, &v) in x.iter_mut().zip(values) {
            *slot = v as u32;
        }
        let theta = model.positive(&x);
        let p_x = match spec.scenario {
            Scenario::MadelonLike if spec.r > 0 => model.relevant_marginal(&x) * irrelevant,
            _ => uniform,
        };
        p_x * if y == 1 { theta } else { 1.0 - theta }
    })
}

/// Exact population restricted to `features`: the joint of those features
/// and the output, embedded in a `p`-input table where every other input is
/// the constant 0 (arity 1). A tree grown on this table with a subspace
/// inside `features` is the tree the full population table would give.
pub fn subspace_population(spec: &GeneratorSpec, features: &[usize]) -> Result<JointDistribution> {
    spec.validate()?;
    let kept: BTreeSet<usize> = features.iter().copied().collect();
    if let Some(&j) = kept.iter().find(|&&j| j >= spec.p) {
        return Err(Error::invalid(format!("feature {j} is outside 0..{}", spec.p)));
    }
    let limit = DEFAULT_MAX_VARIABLES + 4;
    if kept.len() > limit {
        return Err(Error::Capacity {
            what: "features in a population table",
            got: kept.len(),
            limit,
        });
    }
    let a = spec.arity as usize;
    let hidden: Vec<usize> = (0..spec.r).filter(|j| !kept.contains(j)).collect();
    let hidden_assignments = (a as f64).powi(hidden.len() as i32);
    if hidden_assignments > (1u64 << 20) as f64 {
        return Err(Error::Capacity {
            what: "relevant features outside the subspace",
            got: hidden.len(),
            limit: 20,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let model = LabelModel::new(spec, &mut rng);
    let arities: Vec<usize> = (0..spec.p).map(|j| if kept.contains(&j) { a } else { 1 }).collect();
    let kept_irrelevant = kept.iter().filter(|&&j| j >= spec.r).count();
    let irrelevant_mass = (a as f64).powi(-(kept_irrelevant as i32));
    let madelon = spec.scenario == Scenario::MadelonLike && spec.r > 0;
    let uniform_relevant = (a as f64).powi(-(spec.r as i32));
    let mut x = vec![0u32; spec.r];
    JointDistribution::from_fn(&arities, 2, |values, y| {
        for (slot, &v) in x.iter_mut().zip(values) {
            *slot = v as u32;
        }
        let mut mass = 0.0;
        for code in 0..hidden_assignments as usize {
            let mut rest = code;
            for &j in &hidden {
                x[j] = (rest % a) as u32;
                rest /= a;
            }
            let p_rel = if madelon { model.relevant_marginal(&x) } else { uniform_relevant };
            let theta = model.positive(&x);
            mass += p_rel * if y == 1 { theta } else { 1.0 - theta };
        }
        mass * irrelevant_mass
    })
}
