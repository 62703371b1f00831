//! Explicit joint distributions over discrete inputs and a discrete output,
//! with exact information-theoretic relevance oracles.
//!
//! Every quantity here is computed by summation over the full probability
//! table, so the module is only meant for a handful of variables. The
//! [`Oracle`] guards the exhaustive subset searches with a variable limit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Probabilities below this value are treated as zero.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-300;

/// Default independence tolerance, in bits.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Default cap on the number of input variables for exhaustive searches.
pub const DEFAULT_MAX_VARIABLES: usize = 12;

const SUM_TOLERANCE: f64 = 1e-12;

/// A variable of a [`JointDistribution`]: one of the inputs, or the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Input(usize),
    Output,
}

/// Dense probability table over `(V, Y)`.
///
/// Joint assignments are laid out in mixed radix with the first input
/// variable most significant and the output least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    names: Vec<String>,
    arities: Vec<usize>,
    output_name: String,
    output_arity: usize,
    probabilities: Vec<f64>,
    strides: Vec<usize>,
}

impl JointDistribution {
    pub fn new(
        names: Vec<String>,
        arities: Vec<usize>,
        output_arity: usize,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        Self::with_output_name(names, arities, "Y".to_string(), output_arity, probabilities)
    }

    pub fn with_output_name(
        names: Vec<String>,
        arities: Vec<usize>,
        output_name: String,
        output_arity: usize,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        if names.len() != arities.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} names but {} arities",
                names.len(),
                arities.len()
            )));
        }
        if arities.iter().any(|&a| a == 0) || output_arity == 0 {
            return Err(Error::InvalidDistribution(
                "arities must be positive".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for name in names.iter().chain(std::iter::once(&output_name)) {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate variable name `{name}`"
                )));
            }
        }
        let size = table_size(&arities, output_arity)?;
        if probabilities.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "table has {} entries, expected {size}",
                probabilities.len()
            )));
        }
        if let Some(bad) = probabilities.iter().find(|&&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "probability {bad} is not a finite nonnegative number"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut strides = vec![0; arities.len()];
        let mut stride = output_arity;
        for (i, &a) in arities.iter().enumerate().rev() {
            strides[i] = stride;
            stride *= a;
        }
        Ok(JointDistribution {
            names,
            arities,
            output_name,
            output_arity,
            probabilities,
            strides,
        })
    }

    /// Builds a table by evaluating `f(inputs, output)` on every joint
    /// assignment. Input variables are named `X1..Xp`.
    pub fn from_fn(
        arities: &[usize],
        output_arity: usize,
        mut f: impl FnMut(&[usize], usize) -> f64,
    ) -> Result<Self> {
        let size = table_size(arities, output_arity)?;
        let mut probabilities = Vec::with_capacity(size);
        let mut values = vec![0usize; arities.len()];
        for index in 0..size {
            let y = index % output_arity;
            decode(index / output_arity, arities, &mut values);
            probabilities.push(f(&values, y));
        }
        let names = (1..=arities.len()).map(|i| format!("X{i}")).collect();
        Self::new(names, arities.to_vec(), output_arity, probabilities)
    }

    pub fn n_inputs(&self) -> usize {
        self.arities.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: Var) -> &str {
        match var {
            Var::Input(i) => &self.names[i],
            Var::Output => &self.output_name,
        }
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn arity(&self, var: Var) -> usize {
        match var {
            Var::Input(i) => self.arities[i],
            Var::Output => self.output_arity,
        }
    }

    /// Resolves a variable by name; the output is addressed by its own name.
    pub fn var(&self, name: &str) -> Result<Var> {
        if name == self.output_name {
            return Ok(Var::Output);
        }
        self.names
            .iter()
            .position(|n| n == name)
            .map(Var::Input)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn input_index(&self, name: &str) -> Result<usize> {
        match self.var(name)? {
            Var::Input(i) => Ok(i),
            Var::Output => Err(Error::invalid(format!("`{name}` is the output variable"))),
        }
    }

    /// Iterates over `(inputs, output, probability)` for every table entry.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, usize, f64)> + '_ {
        let oa = self.output_arity;
        self.probabilities.iter().enumerate().map(move |(index, &p)| {
            let mut values = vec![0; self.arities.len()];
            decode(index / oa, &self.arities, &mut values);
            (values, index % oa, p)
        })
    }

    /// `P(V = v) > 0` for every input assignment `v`.
    pub fn is_strictly_positive(&self) -> bool {
        self.probabilities
            .chunks(self.output_arity)
            .all(|row| row.iter().sum::<f64>() > NEGLIGIBLE_PROBABILITY)
    }

    /// Marginal table over `vars`, laid out in mixed radix in the given order
    /// (last variable fastest). Repeated variables are not supported.
    pub fn marginal(&self, vars: &[Var]) -> Result<Vec<f64>> {
        for (i, v) in vars.iter().enumerate() {
            self.check(*v)?;
            if vars[..i].contains(v) {
                return Err(Error::invalid(format!(
                    "variable `{}` listed twice",
                    self.name(*v)
                )));
            }
        }
        let dims: Vec<usize> = vars.iter().map(|&v| self.arity(v)).collect();
        let mut out_strides = vec![0usize; vars.len()];
        let mut stride = 1;
        for (i, &d) in dims.iter().enumerate().rev() {
            out_strides[i] = stride;
            stride *= d;
        }
        let mut out = vec![0.0; stride];
        let oa = self.output_arity;
        for (index, &p) in self.probabilities.iter().enumerate() {
            if p < NEGLIGIBLE_PROBABILITY {
                continue;
            }
            let mut target = 0;
            for (k, &v) in vars.iter().enumerate() {
                let value = match v {
                    Var::Output => index % oa,
                    Var::Input(i) => (index / self.strides[i]) % self.arities[i],
                };
                target += value * out_strides[k];
            }
            out[target] += p;
        }
        Ok(out)
    }

    /// `I(A; B | C)` in bits, by exact summation.
    pub fn conditional_mutual_information(
        &self,
        a: Var,
        b: Var,
        conditioning: &[usize],
    ) -> Result<f64> {
        for &c in conditioning {
            if Var::Input(c) == a || Var::Input(c) == b {
                return Err(Error::invalid(format!(
                    "`{}` appears in its own conditioning set",
                    self.name(Var::Input(c))
                )));
            }
        }
        if a == b {
            return Err(Error::invalid("mutual information of a variable with itself"));
        }
        let mut vars = Vec::with_capacity(conditioning.len() + 2);
        vars.push(a);
        vars.push(b);
        vars.extend(conditioning.iter().map(|&c| Var::Input(c)));
        let joint = self.marginal(&vars)?;

        let da = self.arity(a);
        let db = self.arity(b);
        let dc = joint.len() / (da * db);
        // joint[(ia * db + ib) * dc + ic]
        let mut p_c = vec![0.0; dc];
        let mut p_ac = vec![0.0; da * dc];
        let mut p_bc = vec![0.0; db * dc];
        for ia in 0..da {
            for ib in 0..db {
                for ic in 0..dc {
                    let p = joint[(ia * db + ib) * dc + ic];
                    p_c[ic] += p;
                    p_ac[ia * dc + ic] += p;
                    p_bc[ib * dc + ic] += p;
                }
            }
        }
        let mut info = 0.0;
        for ia in 0..da {
            for ib in 0..db {
                for ic in 0..dc {
                    let p = joint[(ia * db + ib) * dc + ic];
                    if p < NEGLIGIBLE_PROBABILITY {
                        continue;
                    }
                    let ratio = p * p_c[ic] / (p_ac[ia * dc + ic] * p_bc[ib * dc + ic]);
                    info += p * ratio.log2();
                }
            }
        }
        Ok(info.max(0.0))
    }

    /// `I(X; Y | B)` for an input `x` and the output.
    pub fn output_cmi(&self, x: usize, conditioning: &[usize]) -> Result<f64> {
        self.conditional_mutual_information(Var::Input(x), Var::Output, conditioning)
    }

    /// Shannon entropy of the output, in bits.
    pub fn output_entropy(&self) -> f64 {
        let m = self.marginal(&[Var::Output]).expect("output always exists");
        entropy_bits(&m)
    }

    fn check(&self, var: Var) -> Result<()> {
        match var {
            Var::Input(i) if i >= self.arities.len() => {
                Err(Error::UnknownVariable(format!("input #{i}")))
            }
            _ => Ok(()),
        }
    }

    /// Parses the line-oriented text format.
    ///
    /// ```text
    /// # comment
    /// X1:2,X2:2,Y:2
    /// 0,0,0,0.25
    /// 0,1,1,0.25
    /// 1,0,1,0.25
    /// 1,1,0,0.25
    /// ```
    ///
    /// The last header column names the output. Each data line gives one
    /// value per variable followed by the probability; omitted assignments
    /// have probability zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut names = Vec::new();
        let mut arities = Vec::new();
        for field in header.split(',') {
            let (name, arity) = field.trim().split_once(':').ok_or_else(|| Error::Parse {
                line: header_line,
                message: format!("header field `{field}` is not `name:arity`"),
            })?;
            let arity: usize = arity.trim().parse().map_err(|_| Error::Parse {
                line: header_line,
                message: format!("bad arity in `{field}`"),
            })?;
            names.push(name.trim().to_string());
            arities.push(arity);
        }
        if names.len() < 1 {
            return Err(Error::Parse {
                line: header_line,
                message: "header needs at least the output column".into(),
            });
        }
        let output_name = names.pop().unwrap();
        let output_arity = arities.pop().unwrap();
        if arities.iter().any(|&a| a == 0) || output_arity == 0 {
            return Err(Error::Parse {
                line: header_line,
                message: "arities must be positive".into(),
            });
        }
        let size = table_size(&arities, output_arity)?;
        let mut probabilities = vec![0.0; size];
        let mut filled = vec![false; size];
        for (line, row) in lines {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != arities.len() + 2 {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "expected {} fields, found {}",
                        arities.len() + 2,
                        fields.len()
                    ),
                });
            }
            let mut index = 0;
            for (k, field) in fields[..fields.len() - 1].iter().enumerate() {
                let arity = if k < arities.len() { arities[k] } else { output_arity };
                let value: usize = field.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{field}` is not a category index"),
                })?;
                if value >= arity {
                    return Err(Error::Parse {
                        line,
                        message: format!("value {value} out of range for arity {arity}"),
                    });
                }
                index = index * arity + value;
            }
            let p: f64 = fields[fields.len() - 1].parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{}` is not a probability", fields[fields.len() - 1]),
            })?;
            if filled[index] {
                return Err(Error::Parse {
                    line,
                    message: "assignment listed twice".into(),
                });
            }
            filled[index] = true;
            probabilities[index] = p;
        }
        Self::with_output_name(names, arities, output_name, output_arity, probabilities)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the text format accepted by [`JointDistribution::parse`],
    /// listing every assignment.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .names
            .iter()
            .zip(&self.arities)
            .map(|(n, a)| format!("{n}:{a}"))
            .chain(std::iter::once(format!(
                "{}:{}",
                self.output_name, self.output_arity
            )))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (values, y, p) in self.entries() {
            for v in values {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{y},{p}");
        }
        out
    }
}

fn table_size(arities: &[usize], output_arity: usize) -> Result<usize> {
    const LIMIT: usize = 1 << 26;
    let mut size = output_arity;
    for &a in arities {
        size = size
            .checked_mul(a)
            .filter(|&s| s <= LIMIT)
            .ok_or(Error::Capacity {
                what: "probability table size",
                got: usize::MAX,
                limit: LIMIT,
            })?;
    }
    Ok(size)
}

fn decode(mut index: usize, arities: &[usize], values: &mut [usize]) {
    for (slot, &a) in values.iter_mut().zip(arities).rev() {
        *slot = index % a;
        index /= a;
    }
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -p.iter()
        .filter(|&&v| v > NEGLIGIBLE_PROBABILITY)
        .map(|&v| {
            let q = v / total;
            q * q.log2()
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelevanceClass {
    Irrelevant,
    WeaklyRelevant,
    StronglyRelevant,
}

impl RelevanceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceClass::Irrelevant => "irrelevant",
            RelevanceClass::WeaklyRelevant => "weakly_relevant",
            RelevanceClass::StronglyRelevant => "strongly_relevant",
        }
    }

    pub fn is_relevant(self) -> bool {
        self != RelevanceClass::Irrelevant
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceReport {
    pub variable: usize,
    pub class: RelevanceClass,
    /// Size of the smallest conditioning set revealing a dependence on the
    /// output; `None` iff the variable is irrelevant.
    pub degree: Option<usize>,
    /// The first minimal conditioning set found (by size, then
    /// lexicographically by variable index).
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBoundary {
    pub members: Vec<usize>,
    /// `false` when the distribution is not strictly positive, in which case
    /// the boundary need not be unique and `members` is only the strongly
    /// relevant set.
    pub unique: bool,
}

/// Exhaustive relevance oracle over subsets of input variables.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    /// CMI at or below this value (bits) counts as independence.
    pub tolerance: f64,
    pub max_variables: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            tolerance: DEFAULT_TOLERANCE,
            max_variables: DEFAULT_MAX_VARIABLES,
        }
    }
}

impl Oracle {
    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0) {
            return Err(Error::invalid("tolerance must be nonnegative"));
        }
        Ok(Oracle {
            tolerance,
            ..Oracle::default()
        })
    }

    fn check_capacity(&self, dist: &JointDistribution) -> Result<()> {
        if dist.n_inputs() > self.max_variables {
            return Err(Error::Capacity {
                what: "number of input variables",
                got: dist.n_inputs(),
                limit: self.max_variables,
            });
        }
        Ok(())
    }

    pub fn relevance_class(&self, dist: &JointDistribution, x: usize) -> Result<RelevanceReport> {
        self.check_capacity(dist)?;
        let p = dist.n_inputs();
        if x >= p {
            return Err(Error::UnknownVariable(format!("input #{x}")));
        }
        let others: Vec<usize> = (0..p).filter(|&v| v != x).collect();
        let strong = dist.output_cmi(x, &others)? > self.tolerance;
        let mut witness = None;
        'search: for k in 0..=others.len() {
            for subset in Combinations::new(others.len(), k) {
                let b: Vec<usize> = subset.iter().map(|&i| others[i]).collect();
                if dist.output_cmi(x, &b)? > self.tolerance {
                    witness = Some(b);
                    break 'search;
                }
            }
        }
        let class = match (&witness, strong) {
            (_, true) => RelevanceClass::StronglyRelevant,
            (Some(_), false) => RelevanceClass::WeaklyRelevant,
            (None, false) => RelevanceClass::Irrelevant,
        };
        Ok(RelevanceReport {
            variable: x,
            class,
            degree: witness.as_ref().map(Vec::len),
            witness,
        })
    }

    pub fn relevance_all(&self, dist: &JointDistribution) -> Result<Vec<RelevanceReport>> {
        (0..dist.n_inputs())
            .map(|x| self.relevance_class(dist, x))
            .collect()
    }

    pub fn markov_boundary(&self, dist: &JointDistribution) -> Result<MarkovBoundary> {
        self.check_capacity(dist)?;
        let p = dist.n_inputs();
        let mut members = Vec::new();
        for x in 0..p {
            let others: Vec<usize> = (0..p).filter(|&v| v != x).collect();
            if dist.output_cmi(x, &others)? > self.tolerance {
                members.push(x);
            }
        }
        Ok(MarkovBoundary {
            members,
            unique: dist.is_strictly_positive(),
        })
    }

    /// Infinite-sample importance of `x` in an infinite ensemble of totally
    /// randomized trees grown on random subspaces of size `q`:
    ///
    /// `sum_{k<q} 1 / (C(p,k) (p-k)) * sum_{|B|=k, B ⊆ V∖{x}} I(X;Y|B)`.
    pub fn asymptotic_importance(
        &self,
        dist: &JointDistribution,
        x: usize,
        q: usize,
    ) -> Result<f64> {
        self.check_capacity(dist)?;
        let p = dist.n_inputs();
        if x >= p {
            return Err(Error::UnknownVariable(format!("input #{x}")));
        }
        if q < 1 || q > p {
            return Err(Error::invalid(format!("q = {q} outside [1, {p}]")));
        }
        let others: Vec<usize> = (0..p).filter(|&v| v != x).collect();
        let mut total = 0.0;
        for k in 0..q {
            let weight = 1.0 / (binomial(p, k) * (p - k) as f64);
            let mut level = 0.0;
            for subset in Combinations::new(others.len(), k) {
                let b: Vec<usize> = subset.iter().map(|&i| others[i]).collect();
                level += dist.output_cmi(x, &b)?;
            }
            total += weight * level;
        }
        Ok(total)
    }

    /// Number of relevant variables per degree; irrelevant ones are omitted.
    pub fn degree_histogram(&self, dist: &JointDistribution) -> Result<BTreeMap<usize, usize>> {
        let mut hist = BTreeMap::new();
        for report in self.relevance_all(dist)? {
            if let Some(d) = report.degree {
                *hist.entry(d).or_insert(0) += 1;
            }
        }
        Ok(hist)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lexicographic `k`-combinations of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
