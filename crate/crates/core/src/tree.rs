//! Randomized multiway decision trees on discrete features and their mean
//! decrease impurity (MDI) importances.
//!
//! Trees are grown on a [`TrainingSet`]: weighted rows of category indices.
//! A dataset yields uniform weights `1/n`; a [`JointDistribution`] yields
//! one row per table entry weighted by its probability, which grows the tree
//! on the population itself.

use std::borrow::Cow;
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;

use crate::dataset::Dataset;
use crate::distribution::{entropy_bits, JointDistribution, NEGLIGIBLE_PROBABILITY};
use crate::{Error, Result};

/// Gains within this distance of the best one are treated as ties.
const GAIN_TIE: f64 = 1e-12;

/// Weighted rows of discrete features, stored column by column.
#[derive(Debug, Clone)]
pub struct TrainingSet<'a> {
    columns: Vec<Cow<'a, [u32]>>,
    arities: Vec<u32>,
    labels: Cow<'a, [u32]>,
    weights: Cow<'a, [f64]>,
    n_classes: usize,
}

impl<'a> TrainingSet<'a> {
    pub fn from_dataset(ds: &'a Dataset) -> Self {
        let n = ds.n_samples();
        TrainingSet {
            columns: ds.columns().iter().map(|c| Cow::Borrowed(c.as_slice())).collect(),
            arities: ds.arities().to_vec(),
            labels: Cow::Borrowed(ds.labels()),
            weights: Cow::Owned(vec![1.0 / n as f64; n]),
            n_classes: ds.n_classes() as usize,
        }
    }

    /// Borrowing copy of this set, to which extra columns can be pushed.
    pub fn view(&self) -> TrainingSet<'_> {
        TrainingSet {
            columns: self.columns.iter().map(|c| Cow::Borrowed(c.as_ref())).collect(),
            arities: self.arities.clone(),
            labels: Cow::Borrowed(self.labels.as_ref()),
            weights: Cow::Borrowed(self.weights.as_ref()),
            n_classes: self.n_classes,
        }
    }

    /// Appends a feature column and returns its index.
    pub fn push_column(&mut self, values: Vec<u32>, arity: u32) -> Result<usize> {
        if values.len() != self.labels.len() {
            return Err(Error::invalid(format!(
                "column has {} rows, expected {}",
                values.len(),
                self.labels.len()
            )));
        }
        if values.iter().any(|&v| v >= arity) {
            return Err(Error::invalid("column value out of range for its arity"));
        }
        self.columns.push(Cow::Owned(values));
        self.arities.push(arity);
        Ok(self.columns.len() - 1)
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn arity(&self, j: usize) -> u32 {
        self.arities[j]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl TrainingSet<'static> {
    /// Population rows: one per table entry with positive probability.
    pub fn from_distribution(dist: &JointDistribution) -> Self {
        let p = dist.n_inputs();
        let mut columns = vec![Vec::new(); p];
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for (values, y, prob) in dist.entries() {
            if prob < NEGLIGIBLE_PROBABILITY {
                continue;
            }
            for (col, v) in columns.iter_mut().zip(values) {
                col.push(v as u32);
            }
            labels.push(y as u32);
            weights.push(prob);
        }
        TrainingSet {
            columns: columns.into_iter().map(Cow::Owned).collect(),
            arities: dist.arities().iter().map(|&a| a as u32).collect(),
            labels: Cow::Owned(labels),
            weights: Cow::Owned(weights),
            n_classes: dist.output_arity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// Split feature, `None` for leaves.
    pub feature: Option<usize>,
    /// `(value, child index)` sorted by value.
    pub children: Vec<(u32, usize)>,
    /// Total row weight per class reaching this node.
    pub class_weights: Vec<f64>,
    pub n_samples: usize,
    /// `p(t)`: fraction of the total weight reaching this node.
    pub sample_fraction: f64,
    /// Shannon entropy of the class distribution, in bits.
    pub impurity: f64,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.feature.is_none()
    }

    /// Most represented class; ties go to the smallest index.
    pub fn majority(&self) -> u32 {
        let mut best = 0;
        for (c, &w) in self.class_weights.iter().enumerate() {
            if w > self.class_weights[best] {
                best = c;
            }
        }
        best as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    subspace: Vec<usize>,
    n_features: usize,
}

/// Per-feature importances, indexed like the columns of the training set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImportanceVector(pub Vec<f64>);

impl ImportanceVector {
    pub fn zeros(n: usize) -> Self {
        ImportanceVector(vec![0.0; n])
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0.get(j).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Grows a fully developed tree restricted to the features in `subspace`.
///
/// At each node `min(k, pool)` candidates are drawn without replacement from
/// the subspace features that are not constant in the node, and the one with
/// the largest entropy decrease is split on (ties broken uniformly at
/// random), with one child per observed value. A node becomes a leaf once it
/// is pure, holds fewer than two rows, or has no non-constant feature left.
/// `k = 1` gives totally randomized trees.
pub fn build_tree<R: Rng + ?Sized>(
    data: &TrainingSet<'_>,
    subspace: &[usize],
    k: usize,
    rng: &mut R,
) -> Result<DecisionTree> {
    if subspace.is_empty() {
        return Err(Error::invalid("empty subspace"));
    }
    if k < 1 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if let Some(&j) = subspace.iter().find(|&&j| j >= data.n_features()) {
        return Err(Error::invalid(format!("feature {j} is not in the training set")));
    }
    for (i, j) in subspace.iter().enumerate() {
        if subspace[..i].contains(j) {
            return Err(Error::invalid(format!("feature {j} listed twice in the subspace")));
        }
    }
    let root_rows: Vec<u32> = (0..data.n_rows() as u32)
        .filter(|&i| data.weights[i as usize] > 0.0)
        .collect();
    if root_rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let total: f64 = root_rows.iter().map(|&i| data.weights[i as usize]).sum();
    let n_classes = data.n_classes;

    let mut root = make_node(data, &root_rows, total);
    root.sample_fraction = 1.0;
    let mut nodes = vec![root];
    let mut stack = vec![(0usize, root_rows)];
    let mut pool = Vec::with_capacity(subspace.len());
    let mut counts = Vec::new();

    while let Some((id, rows)) = stack.pop() {
        let node = &nodes[id];
        let pure = node.class_weights.iter().filter(|&&w| w > 0.0).count() <= 1;
        if pure || rows.len() < 2 {
            continue;
        }
        pool.clear();
        pool.extend(subspace.iter().copied().filter(|&j| {
            let col = &data.columns[j];
            let first = col[rows[0] as usize];
            rows.iter().any(|&i| col[i as usize] != first)
        }));
        if pool.is_empty() {
            continue;
        }
        let parent_impurity = node.impurity;
        let node_weight: f64 = node.class_weights.iter().sum();

        let draws = k.min(pool.len());
        let mut best_gain = f64::NEG_INFINITY;
        let mut tied: Vec<usize> = Vec::new();
        for pos in index::sample(rng, pool.len(), draws).into_iter() {
            let j = pool[pos];
            let arity = data.arities[j] as usize;
            counts.clear();
            counts.resize(arity * n_classes, 0.0);
            let col = &data.columns[j];
            for &i in &rows {
                let i = i as usize;
                counts[col[i] as usize * n_classes + data.labels[i] as usize] += data.weights[i];
            }
            let children: f64 = counts
                .chunks(n_classes)
                .map(|c| {
                    let w: f64 = c.iter().sum();
                    if w > 0.0 {
                        w / node_weight * entropy_bits(c)
                    } else {
                        0.0
                    }
                })
                .sum();
            let gain = parent_impurity - children;
            if gain > best_gain + GAIN_TIE {
                best_gain = gain;
                tied.clear();
                tied.push(j);
            } else if gain >= best_gain - GAIN_TIE {
                tied.push(j);
            }
        }
        let feature = if tied.len() == 1 {
            tied[0]
        } else {
            tied[rng.gen_range(0..tied.len())]
        };

        let arity = data.arities[feature] as usize;
        let mut parts: Vec<Vec<u32>> = vec![Vec::new(); arity];
        let col = &data.columns[feature];
        for &i in &rows {
            parts[col[i as usize] as usize].push(i);
        }
        let mut children = Vec::new();
        for (value, part) in parts.into_iter().enumerate() {
            if part.is_empty() {
                continue;
            }
            let child = nodes.len();
            nodes.push(make_node(data, &part, total));
            children.push((value as u32, child));
            stack.push((child, part));
        }
        nodes[id].feature = Some(feature);
        nodes[id].children = children;
    }

    Ok(DecisionTree {
        nodes,
        subspace: subspace.to_vec(),
        n_features: data.n_features(),
    })
}

fn make_node(data: &TrainingSet<'_>, rows: &[u32], total: f64) -> Node {
    let mut class_weights = vec![0.0; data.n_classes];
    for &i in rows {
        class_weights[data.labels[i as usize] as usize] += data.weights[i as usize];
    }
    let weight: f64 = class_weights.iter().sum();
    Node {
        feature: None,
        children: Vec::new(),
        impurity: entropy_bits(&class_weights),
        class_weights,
        n_samples: rows.len(),
        sample_fraction: weight / total,
    }
}

impl DecisionTree {
    pub fn fit<R: Rng + ?Sized>(
        ds: &Dataset,
        subspace: &[usize],
        k: usize,
        rng: &mut R,
    ) -> Result<Self> {
        build_tree(&TrainingSet::from_dataset(ds), subspace, k, rng)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn subspace(&self) -> &[usize] {
        &self.subspace
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, id: usize) -> usize {
            t.nodes[id]
                .children
                .iter()
                .map(|&(_, c)| 1 + go(t, c))
                .max()
                .unwrap_or(0)
        }
        go(self, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Features actually used by at least one split.
    pub fn split_features(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self.nodes.iter().filter_map(|n| n.feature).collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    /// `sum_{t splits on X} p(t) * (i(t) - sum_c p(c)/p(t) * i(c))`.
    pub fn mdi_importance(&self) -> ImportanceVector {
        let mut imp = vec![0.0; self.n_features];
        for node in &self.nodes {
            let Some(f) = node.feature else { continue };
            let children: f64 = node
                .children
                .iter()
                .map(|&(_, c)| self.nodes[c].sample_fraction * self.nodes[c].impurity)
                .sum();
            let decrease = node.sample_fraction * node.impurity - children;
            debug_assert!(decrease >= -1e-12, "negative impurity decrease {decrease}");
            imp[f] += decrease.max(0.0);
        }
        ImportanceVector(imp)
    }

    /// Routes `sample` (indexed like the training columns) to a leaf and
    /// returns its majority class. When the sample has no child branch for
    /// its value, or lacks the split feature altogether, the majority class
    /// of the current node is returned.
    pub fn predict(&self, sample: &[u32]) -> u32 {
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            let Some(f) = node.feature else {
                return node.majority();
            };
            let Some(&value) = sample.get(f) else {
                return node.majority();
            };
            match node.children.iter().find(|&&(v, _)| v == value) {
                Some(&(_, child)) => id = child,
                None => return node.majority(),
            }
        }
    }

    /// Line-oriented dump: `id feature children weights fraction impurity`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# subspace {:?}", self.subspace);
        for (id, node) in self.nodes.iter().enumerate() {
            let feature = node.feature.map_or("leaf".to_string(), |f| f.to_string());
            let children: Vec<String> = node
                .children
                .iter()
                .map(|(v, c)| format!("{v}:{c}"))
                .collect();
            let weights: Vec<String> = node.class_weights.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(
                out,
                "{id} {feature} [{}] [{}] {} {} n={}",
                children.join(","),
                weights.join(","),
                node.sample_fraction,
                node.impurity,
                node.n_samples
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: &[[u32; 3]]) -> Dataset {
        let columns = (0..2).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let labels = rows.iter().map(|r| r[2]).collect();
        Dataset::new(columns, labels, vec![2, 2], 2, None).unwrap()
    }

    fn xor_rows() -> Vec<[u32; 3]> {
        let mut rows = Vec::new();
        for _ in 0..25 {
            for a in 0..2 {
                for b in 0..2 {
                    rows.push([a, b, a ^ b]);
                }
            }
        }
        rows
    }

    #[test]
    fn copy_dataset_single_split() {
        let rows: Vec<[u32; 3]> = (0..40).map(|i| [i % 2, (i / 2) % 2, i % 2]).collect();
        let ds = dataset(&rows);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tree = DecisionTree::fit(&ds, &[0], 1, &mut rng).unwrap();
        assert_eq!(tree.depth(), 1);
        assert!(tree.leaves().all(|l| l.impurity == 0.0));
        let imp = tree.mdi_importance();
        assert!((imp.get(0) - 1.0).abs() < 1e-12);
        assert_eq!(imp.get(1), 0.0);
        assert_eq!(tree.predict(&[1, 0]), 1);
        assert_eq!(tree.predict(&[0, 1]), 0);
    }

    #[test]
    fn xor_needs_two_levels() {
        let ds = dataset(&xor_rows());
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = DecisionTree::fit(&ds, &[0, 1], 2, &mut rng).unwrap();
            assert_eq!(tree.depth(), 2);
            assert!(tree.leaves().all(|l| l.impurity == 0.0));
            assert_eq!(tree.split_features(), vec![0, 1]);
            let imp = tree.mdi_importance();
            assert!((imp.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_labels_give_a_leaf() {
        let rows: Vec<[u32; 3]> = (0..10).map(|i| [i % 2, (i / 3) % 2, 1]).collect();
        let ds = dataset(&rows);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = DecisionTree::fit(&ds, &[0, 1], 2, &mut rng).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.mdi_importance().total(), 0.0);
        assert_eq!(tree.predict(&[0, 0]), 1);
    }

    #[test]
    fn unseen_value_falls_back_to_node_majority() {
        // Feature 0 has arity 3 but value 2 never occurs.
        let columns = vec![vec![0, 0, 0, 1, 1], vec![0, 1, 0, 1, 0]];
        let labels = vec![1, 1, 1, 0, 0];
        let ds = Dataset::new(columns, labels, vec![3, 2], 2, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tree = DecisionTree::fit(&ds, &[0], 1, &mut rng).unwrap();
        assert_eq!(tree.root().feature, Some(0));
        assert_eq!(tree.predict(&[2, 0]), tree.root().majority());
        assert_eq!(tree.predict(&[2, 0]), 1);
        // Missing feature entirely behaves the same way.
        assert_eq!(tree.predict(&[]), 1);
    }

    #[test]
    fn argument_errors() {
        let ds = dataset(&xor_rows());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(DecisionTree::fit(&ds, &[], 1, &mut rng).is_err());
        assert!(DecisionTree::fit(&ds, &[0], 0, &mut rng).is_err());
        assert!(DecisionTree::fit(&ds, &[7], 1, &mut rng).is_err());
        assert!(DecisionTree::fit(&ds, &[0, 0], 1, &mut rng).is_err());
    }

    #[test]
    fn ties_are_broken_at_random() {
        // Both features tie at the root of the XOR population.
        let dist = JointDistribution::from_fn(&[2, 2], 2, |x, y| {
            if (x[0] ^ x[1]) == y { 0.25 } else { 0.0 }
        })
        .unwrap();
        let data = TrainingSet::from_distribution(&dist);
        let mut roots = [0usize; 2];
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tree = build_tree(&data, &[0, 1], 2, &mut rng).unwrap();
            roots[tree.root().feature.unwrap()] += 1;
        }
        assert!(roots[0] > 60 && roots[1] > 60, "{roots:?}");
    }

    #[test]
    fn sample_fractions_are_consistent() {
        let ds = dataset(&xor_rows());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tree = DecisionTree::fit(&ds, &[0, 1], 1, &mut rng).unwrap();
        assert_eq!(tree.root().sample_fraction, 1.0);
        for node in tree.nodes() {
            if !node.is_leaf() {
                let s: f64 = node.children.iter().map(|&(_, c)| tree.nodes()[c].sample_fraction).sum();
                assert!((s - node.sample_fraction).abs() < 1e-12);
                assert!(tree.subspace().contains(&node.feature.unwrap()));
            }
        }
        assert!(tree.to_text().lines().count() == tree.nodes().len() + 1);
    }
}
