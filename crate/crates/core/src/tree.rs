//! Exact enumeration on a finite ball of the Cayley tree.
//!
//! Vertices are stored in breadth-first order, so the ball `V_{n-1}` is a
//! prefix of `V_n` and a configuration index in base 3 (vertex 0 is the
//! least significant digit) restricts to `V_{n-1}` by taking it modulo
//! `3^{|V_{n-1}|}`.

use std::io::{self, Write};
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SosError};
use crate::model::BranchPattern;

/// Largest ball exact enumeration accepts by default (`3^14` configurations).
pub const ENUMERATION_BUDGET: usize = 14;

/// Structural cap for [`build_tree`]; enumeration has its own, much smaller, budget.
pub const MAX_TREE_VERTICES: usize = 1 << 20;

const SPINS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTree {
    pub n: usize,
    pub k: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    sphere_start: Vec<usize>,
}

impl FiniteTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertex range of the sphere `W_j`.
    pub fn sphere(&self, j: usize) -> Range<usize> {
        self.sphere_start[j]..self.sphere_start.get(j + 1).copied().unwrap_or(self.len())
    }

    /// `|V_j|`.
    pub fn ball_size(&self, j: usize) -> usize {
        self.sphere(j).end
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }
}

fn ball_vertices(k: usize, n: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut sphere: usize = 1;
    for j in 1..=n {
        sphere = sphere.checked_mul(if j == 1 { k + 1 } else { k })?;
        total = total.checked_add(sphere)?;
    }
    Some(total)
}

/// The ball `V_n` of radius `n` around the root: the root has `k + 1`
/// neighbours, every other vertex `k` descendants.
pub fn build_tree(k: usize, n: usize) -> Result<FiniteTree> {
    if k < 1 || n < 1 {
        return Err(SosError::domain(format!("need k >= 1 and n >= 1, got k = {k}, n = {n}")));
    }
    let total = ball_vertices(k, n).unwrap_or(usize::MAX);
    if total > MAX_TREE_VERTICES {
        return Err(SosError::Size { vertices: total, limit: MAX_TREE_VERTICES });
    }
    let mut parent = vec![None];
    let mut depth = vec![0];
    let mut children = vec![Vec::new()];
    let mut sphere_start = vec![0];
    let mut frontier = 0..1;
    for j in 1..=n {
        let start = parent.len();
        sphere_start.push(start);
        for v in frontier.clone() {
            let fan = if j == 1 { k + 1 } else { k };
            for _ in 0..fan {
                let id = parent.len();
                parent.push(Some(v));
                depth.push(j);
                children.push(Vec::new());
                children[v].push(id);
            }
        }
        frontier = start..parent.len();
    }
    Ok(FiniteTree { n, k, parent, depth, children, sphere_start })
}

/// `-J * sum |sigma(x) - sigma(y)|` over the edges of the ball.
pub fn hamiltonian(config: &[u8], tree: &FiniteTree, j: f64) -> Result<f64> {
    if config.len() != tree.len() {
        return Err(SosError::contract(format!(
            "configuration covers {} vertices, ball has {}",
            config.len(),
            tree.len()
        )));
    }
    if let Some(s) = config.iter().find(|&&s| s as usize >= SPINS) {
        return Err(SosError::contract(format!("spin {s} outside {{0, 1, 2}}")));
    }
    let total: u32 = tree.edges().map(|(x, y)| config[x].abs_diff(config[y]) as u32).sum();
    Ok(-j * total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    HBar,
    LBar,
}

/// How many of the root's `k + 1` children carry `h` and how many `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootSplit {
    pub h: usize,
    pub l: usize,
}

impl RootSplit {
    /// The pattern on `k` children plus one extra child with the root's own label.
    pub fn default_for(pattern: &BranchPattern, root: Label) -> Self {
        match root {
            Label::HBar => RootSplit { h: pattern.a + 1, l: pattern.b },
            Label::LBar => RootSplit { h: pattern.c, l: pattern.d + 1 },
        }
    }
}

/// Per-vertex labels and the two field values they stand for.
///
/// A label is lifted to the three-component log-weight `(0, value, 0)`,
/// whose gauge-reduced form `(h_0 - h_2, h_1 - h_2)` is `(0, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldAssignment {
    pub labels: Vec<Label>,
    pub h2: f64,
    pub l2: f64,
}

impl FieldAssignment {
    pub fn field(&self, v: usize) -> [f64; 3] {
        match self.labels[v] {
            Label::HBar => [0.0, self.h2, 0.0],
            Label::LBar => [0.0, self.l2, 0.0],
        }
    }

    pub fn count(&self, range: Range<usize>, label: Label) -> usize {
        self.labels[range].iter().filter(|&&l| l == label).count()
    }

    /// Same labels, shifted field values.
    pub fn perturbed(&self, dh: f64, dl: f64) -> Self {
        FieldAssignment { labels: self.labels.clone(), h2: self.h2 + dh, l2: self.l2 + dl }
    }

    fn restricted(&self, len: usize) -> Self {
        FieldAssignment { labels: self.labels[..len].to_vec(), h2: self.h2, l2: self.l2 }
    }
}

/// Labels the ball top-down: an `h`-vertex gives `h` to its first `a`
/// children and `l` to the remaining `b`; an `l`-vertex gives `h` to `c`
/// children and `l` to `d`. The root's children follow `root_split`.
pub fn assign_fields(
    tree: &FiniteTree,
    pattern: &BranchPattern,
    h2: f64,
    l2: f64,
    root_label: Label,
    root_split: Option<RootSplit>,
) -> Result<FieldAssignment> {
    if pattern.a + pattern.b != tree.k || pattern.c + pattern.d != tree.k {
        return Err(SosError::contract(format!(
            "pattern ({},{},{},{}) does not match tree order k = {}",
            pattern.a, pattern.b, pattern.c, pattern.d, tree.k
        )));
    }
    let split = root_split.unwrap_or_else(|| RootSplit::default_for(pattern, root_label));
    if split.h + split.l != tree.k + 1 {
        return Err(SosError::contract(format!(
            "root split ({}, {}) must sum to k + 1 = {}",
            split.h,
            split.l,
            tree.k + 1
        )));
    }
    if !(h2.is_finite() && l2.is_finite()) {
        return Err(SosError::domain("field values must be finite"));
    }
    let mut labels = vec![Label::HBar; tree.len()];
    labels[0] = root_label;
    for v in 0..tree.len() {
        let n_h = if v == 0 {
            split.h
        } else {
            match labels[v] {
                Label::HBar => pattern.a,
                Label::LBar => pattern.c,
            }
        };
        for (i, &child) in tree.children(v).iter().enumerate() {
            labels[child] = if i < n_h { Label::HBar } else { Label::LBar };
        }
    }
    Ok(FieldAssignment { labels, h2, l2 })
}

/// The finite-volume distribution on `V_n`, tabulated over all `3^|V_n|` configurations.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub volume: FiniteTree,
    pub probabilities: Vec<f64>,
    pub log_partition: f64,
}

impl ExactDistribution {
    pub fn partition_value(&self) -> f64 {
        self.log_partition.exp()
    }

    /// Spins of configuration `index`, vertex order.
    pub fn config(&self, index: usize) -> Vec<u8> {
        decode(index, self.volume.len())
    }

    /// Law of the configuration on the sub-ball of the first `vertices` vertices.
    pub fn marginal_prefix(&self, vertices: usize) -> Vec<f64> {
        let size = SPINS.pow(vertices as u32);
        (0..size)
            .map(|low| compensated_sum(self.probabilities.iter().skip(low).step_by(size).copied()))
            .collect()
    }

    /// Audit dump: `config,weight,probability`, one row per configuration.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "config,weight,probability")?;
        for (i, p) in self.probabilities.iter().enumerate() {
            let cfg: String = self.config(i).iter().map(|s| char::from(b'0' + s)).collect();
            let weight = (p.ln() + self.log_partition).exp();
            writeln!(w, "{cfg},{weight:.16e},{p:.16e}")?;
        }
        Ok(())
    }
}

/// Neumaier-compensated sum in iteration order.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn decode(mut index: usize, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((index % SPINS) as u8);
        index /= SPINS;
    }
    out
}

/// Exact table of the distribution with edge weights `theta^|sigma(x) - sigma(y)|`
/// and boundary weights `exp(h_{sigma(x), x})` on the outer sphere.
pub fn exact_mu_n(tree: &FiniteTree, fields: &FieldAssignment, theta: f64) -> Result<ExactDistribution> {
    exact_mu_n_with_budget(tree, fields, theta, ENUMERATION_BUDGET)
}

pub fn exact_mu_n_with_budget(
    tree: &FiniteTree,
    fields: &FieldAssignment,
    theta: f64,
    budget: usize,
) -> Result<ExactDistribution> {
    if tree.len() > budget {
        return Err(SosError::Size { vertices: tree.len(), limit: budget });
    }
    if !(theta.is_finite() && theta > 0.0) {
        return Err(SosError::domain(format!("theta must be finite and > 0, got {theta}")));
    }
    if fields.labels.len() != tree.len() {
        return Err(SosError::contract("field assignment does not cover the ball"));
    }
    let len = tree.len();
    let ln_theta = theta.ln();
    let edges: Vec<(usize, usize)> = tree.edges().collect();
    let boundary: Vec<(usize, [f64; 3])> = tree.sphere(tree.n).map(|v| (v, fields.field(v))).collect();
    let total = SPINS.pow(len as u32);

    let log_weights: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let s = decode(idx, len);
            let gaps: u32 = edges.iter().map(|&(x, y)| s[x].abs_diff(s[y]) as u32).sum();
            let bnd: f64 = boundary.iter().map(|(v, h)| h[s[*v] as usize]).sum();
            ln_theta * gaps as f64 + bnd
        })
        .collect();

    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probabilities: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    // fixed-order sum keeps the result independent of the thread count
    let z = compensated_sum(probabilities.iter().copied());
    for p in &mut probabilities {
        *p /= z;
    }
    Ok(ExactDistribution { volume: tree.clone(), probabilities, log_partition: max + z.ln() })
}

/// Largest gap between the `V_{n-1}` marginal of the `n`-ball distribution
/// and the `(n-1)`-ball distribution built from the same assignment.
pub fn check_compatibility(tree_n: &FiniteTree, fields: &FieldAssignment, theta: f64) -> Result<f64> {
    if tree_n.n < 2 {
        return Err(SosError::contract("compatibility needs n >= 2"));
    }
    let outer = exact_mu_n(tree_n, fields, theta)?;
    let tree_prev = build_tree(tree_n.k, tree_n.n - 1)?;
    let inner = exact_mu_n(&tree_prev, &fields.restricted(tree_prev.len()), theta)?;
    let marginal = outer.marginal_prefix(tree_prev.len());
    Ok(marginal
        .iter()
        .zip(&inner.probabilities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Law of the root spin.
pub fn root_marginal(dist: &ExactDistribution) -> [f64; 3] {
    let m = dist.marginal_prefix(1);
    [m[0], m[1], m[2]]
}
