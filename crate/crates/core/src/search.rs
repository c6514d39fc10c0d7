//! Maximization of the summed-intersection functionals.
//!
//! Three interchangeable [`Maximizer`]s are registered by name:
//!
//! * `branch-and-bound` walks maximal intersecting families only (adding a
//!   set to a nonempty intersecting family strictly raises ω), or, for cross
//!   pairs, every `A` paired with its largest compatible `B`;
//! * `naive` evaluates every nonempty family (or every pair of families) and
//!   serves as the oracle the branch-and-bound is tested against;
//! * `anneal` is a seeded simulated annealing run for parameters beyond
//!   exhaustive reach. It never claims exhaustiveness.
//!
//! Exhaustive results list every maximizer up to relabeling of `[n]`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{binom, omega_cross_bound, omega_intersecting_bound};
use crate::cyclic::{intervals_of_length, sweep_orders, Sweep, SWEEP_LIMIT};
use crate::error::{Error, Result};
use crate::report::decimal;
use crate::setcore::{
    canonical_form, canonical_pair, is_cross_intersecting, is_intersecting, is_star, k_subsets, Family, FamilyJson,
    CANONICAL_LIMIT,
};
use crate::weights::{omega_cross, omega_family};

/// Default cap on `C(n, k)` for exhaustive single-family search.
pub const EXHAUSTIVE_LIMIT: u64 = 28;
/// Default cap on `C(n, k)` for exhaustive cross-pair search.
pub const CROSS_LIMIT: u64 = 20;
/// Cap on `C(n, k) + C(n, l)` for the naive cross-pair oracle.
pub const NAIVE_CROSS_LIMIT: u64 = 22;
/// Cap on the number of l-sets the annealer tracks for cross pairs.
pub const ANNEAL_CROSS_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: u32,
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Witness {
    Family(Family),
    Pair(Family, Family),
}

impl Witness {
    pub fn value(&self) -> Result<u128> {
        match self {
            Witness::Family(f) => Ok(omega_family(f)),
            Witness::Pair(a, b) => omega_cross(a, b),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WitnessJson {
    Pair { a: FamilyJson, b: FamilyJson },
    Family(FamilyJson),
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Witness::Family(f) => WitnessJson::Family(f.to_json()),
            Witness::Pair(a, b) => WitnessJson::Pair { a: a.to_json(), b: b.to_json() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Witness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let err = |e: Error| serde::de::Error::custom(e.to_string());
        Ok(match WitnessJson::deserialize(d)? {
            WitnessJson::Family(f) => Witness::Family(Family::from_json(&f).map_err(err)?),
            WitnessJson::Pair { a, b } => {
                Witness::Pair(Family::from_json(&a).map_err(err)?, Family::from_json(&b).map_err(err)?)
            }
        })
    }
}

/// Annealing parameters; identical configs give identical trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub seed: u64,
    pub iterations: u64,
    pub restarts: u32,
    pub initial_temperature: f64,
    pub decay: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self { seed: 1, iterations: 10_000, restarts: 8, initial_temperature: 2.0, decay: 0.999 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub strategy: String,
    #[serde(with = "decimal")]
    pub best_value: u128,
    #[serde(with = "decimal")]
    pub bound: u128,
    pub tight: bool,
    pub exhaustive: bool,
    pub witnesses: Vec<Witness>,
    /// Families (or `A` choices) evaluated.
    pub evaluated: u64,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heuristic: Option<HeuristicConfig>,
}

impl SearchResult {
    /// Parses a stored report and re-evaluates every witness.
    pub fn load(json: &str) -> Result<Self> {
        let r: SearchResult = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        r.validate()?;
        Ok(r)
    }

    /// Every witness attains `best_value` and witnesses are pairwise distinct.
    pub fn validate(&self) -> Result<()> {
        for w in &self.witnesses {
            let v = w.value()?;
            if v != self.best_value {
                return Err(Error::Counterexample(format!(
                    "stored witness evaluates to {v}, report claims {}",
                    self.best_value
                )));
            }
        }
        let mut sorted = self.witnesses.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.witnesses.len() {
            return Err(Error::Counterexample("duplicate witnesses".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
    pub limit: u64,
    pub cross_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { workers: 0, limit: EXHAUSTIVE_LIMIT, cross_limit: CROSS_LIMIT }
    }
}

/// A strategy for maximizing ω.
pub trait Maximizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn intersecting(&self, n: u32, k: u32, opts: &SearchOptions) -> Result<SearchResult>;
    fn cross(&self, n: u32, k: u32, l: u32, opts: &SearchOptions) -> Result<SearchResult>;
}

type MaximizerFactory = fn(&HeuristicConfig) -> Box<dyn Maximizer>;

pub struct MaximizerRegistry {
    entries: BTreeMap<&'static str, MaximizerFactory>,
}

impl Default for MaximizerRegistry {
    fn default() -> Self {
        let mut r = Self { entries: BTreeMap::new() };
        r.register("branch-and-bound", |_| Box::new(BranchAndBound));
        r.register("naive", |_| Box::new(NaiveOracle));
        r.register("anneal", |cfg| Box::new(Annealer::new(*cfg)));
        r
    }
}

impl MaximizerRegistry {
    pub fn register(&mut self, name: &'static str, factory: MaximizerFactory) {
        self.entries.insert(name, factory);
    }

    pub fn get(&self, name: &str, cfg: &HeuristicConfig) -> Result<Box<dyn Maximizer>> {
        self.entries.get(name).map(|f| f(cfg)).ok_or_else(|| Error::Unknown {
            kind: "strategy",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

/// Runs `f` on a pool of `workers` threads (0 = ambient pool).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

pub fn max_omega_intersecting(n: u32, k: u32) -> Result<SearchResult> {
    BranchAndBound.intersecting(n, k, &SearchOptions::default())
}

pub fn max_omega_cross(n: u32, k: u32, l: u32) -> Result<SearchResult> {
    BranchAndBound.cross(n, k, l, &SearchOptions::default())
}

pub fn heuristic_max(n: u32, k: u32, l: Option<u32>, cfg: &HeuristicConfig) -> Result<SearchResult> {
    let a = Annealer::new(*cfg);
    let opts = SearchOptions::default();
    match l {
        None => a.intersecting(n, k, &opts),
        Some(l) => a.cross(n, k, l, &opts),
    }
}

fn single_bound(n: u32, k: u32) -> Result<u128> {
    Ok(omega_intersecting_bound(n, k)?.value)
}

fn count_sets(n: u32, k: u32) -> Result<u64> {
    let c = binom(n as i64, k as i64)?;
    Ok(u64::try_from(c).unwrap_or(u64::MAX))
}

fn check_exhaustive(n: u32, k: u32, limit: u64) -> Result<u64> {
    let c = count_sets(n, k)?;
    if c > limit {
        return Err(Error::TooLarge { what: "C(n, k) for exhaustive search", value: c, limit });
    }
    if n > CANONICAL_LIMIT {
        return Err(Error::TooLarge { what: "n for exhaustive search", value: n as u64, limit: CANONICAL_LIMIT as u64 });
    }
    Ok(c)
}

fn canonical_families(n: u32, k: u32, labelled: Vec<Vec<u64>>) -> Result<Vec<Witness>> {
    let mut classes = labelled
        .into_par_iter()
        .map(|masks| canonical_form(&Family::from_masks_unchecked(n, k, masks)))
        .collect::<Result<Vec<_>>>()?;
    classes.sort();
    classes.dedup();
    Ok(classes.into_iter().map(Witness::Family).collect())
}

fn canonical_pairs(n: u32, k: u32, l: u32, labelled: Vec<(Vec<u64>, Vec<u64>)>) -> Result<Vec<Witness>> {
    let mut classes = labelled
        .into_par_iter()
        .map(|(a, b)| canonical_pair(&Family::from_masks_unchecked(n, k, a), &Family::from_masks_unchecked(n, l, b)))
        .collect::<Result<Vec<_>>>()?;
    classes.sort();
    classes.dedup();
    Ok(classes.into_iter().map(|(a, b)| Witness::Pair(a, b)).collect())
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn bits_of(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            return None;
        }
        let i = x.trailing_zeros() as usize;
        x &= x - 1;
        Some(i)
    })
}

/// Index tables over all k-subsets in increasing mask order.
struct Tables {
    sets: Vec<u64>,
    /// `conflict[i]`: indices of sets disjoint from set `i`.
    conflict: Vec<u64>,
    meet: Vec<Vec<u32>>,
}

impl Tables {
    fn new(n: u32, k: u32) -> Self {
        let sets: Vec<u64> = k_subsets(n, k).collect();
        let conflict = sets
            .iter()
            .map(|&a| sets.iter().enumerate().filter(|(_, &b)| a & b == 0).fold(0u64, |acc, (j, _)| acc | 1 << j))
            .collect();
        let meet = sets.iter().map(|&a| sets.iter().map(|&b| (a & b).count_ones()).collect()).collect();
        Self { sets, conflict, meet }
    }

    fn masks(&self, chosen: u64) -> Vec<u64> {
        bits_of(chosen).map(|i| self.sets[i]).collect()
    }
}

/// Exact search over maximal families with an admissible bound.
pub struct BranchAndBound;

#[derive(Clone)]
struct Node {
    i: usize,
    chosen: u64,
    allowed: u64,
    value: u64,
    contrib: Vec<u32>,
}

struct Collector {
    best: u64,
    found: Vec<u64>,
    nodes: u64,
}

impl BranchAndBound {
    fn dfs(t: &Tables, k: u32, node: &mut Node, shared: &AtomicU64, out: &mut Collector) {
        out.nodes += 1;
        let total = t.sets.len();
        let rest = node.allowed & !low_mask(node.i);
        if rest == 0 {
            let maximal = (0..total).all(|j| node.chosen >> j & 1 == 1 || t.conflict[j] & node.chosen != 0);
            if maximal {
                out.offer(node.value, node.chosen, shared);
            }
            return;
        }
        let r = rest.count_ones() as u64;
        let optimistic: u64 = bits_of(rest).map(|j| node.contrib[j] as u64).sum::<u64>() + (k as u64 - 1) * r * (r - 1) / 2;
        if node.value + optimistic < shared.load(Ordering::Relaxed) {
            return;
        }
        let i = rest.trailing_zeros() as usize;
        let after = rest & !(1 << i);

        // include
        let saved = (node.i, node.chosen, node.allowed, node.value);
        let next_allowed = after & !t.conflict[i];
        for j in bits_of(next_allowed) {
            node.contrib[j] += t.meet[i][j];
        }
        node.value += node.contrib[i] as u64;
        node.chosen |= 1 << i;
        node.allowed = next_allowed;
        node.i = i + 1;
        Self::dfs(t, k, node, shared, out);
        (node.i, node.chosen, node.allowed, node.value) = saved;
        for j in bits_of(next_allowed) {
            node.contrib[j] -= t.meet[i][j];
        }

        // exclude: some later member has to be disjoint from set i
        if t.conflict[i] & after != 0 {
            node.allowed = after;
            node.i = i + 1;
            Self::dfs(t, k, node, shared, out);
            (node.i, node.chosen, node.allowed, node.value) = saved;
        }
    }

    /// Splits the tree into independent subtrees by running the first decisions eagerly.
    fn split(t: &Tables, root: Node, depth: u32) -> Vec<Node> {
        let mut frontier = vec![root];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for node in frontier {
                let rest = node.allowed & !low_mask(node.i);
                if rest == 0 {
                    next.push(node);
                    continue;
                }
                let i = rest.trailing_zeros() as usize;
                let after = rest & !(1 << i);
                let mut inc = node.clone();
                let next_allowed = after & !t.conflict[i];
                for j in bits_of(next_allowed) {
                    inc.contrib[j] += t.meet[i][j];
                }
                inc.value += node.contrib[i] as u64;
                inc.chosen |= 1 << i;
                inc.allowed = next_allowed;
                inc.i = i + 1;
                next.push(inc);
                if t.conflict[i] & after != 0 {
                    next.push(Node { i: i + 1, allowed: after, ..node });
                }
            }
            frontier = next;
        }
        frontier
    }
}

impl Collector {
    fn new() -> Self {
        Self { best: 0, found: Vec::new(), nodes: 0 }
    }

    fn offer(&mut self, value: u64, chosen: u64, shared: &AtomicU64) {
        shared.fetch_max(value, Ordering::Relaxed);
        if value > self.best {
            self.best = value;
            self.found.clear();
        }
        if value == self.best {
            self.found.push(chosen);
        }
    }
}

fn low_mask(i: usize) -> u64 {
    if i >= 64 {
        u64::MAX
    } else {
        (1u64 << i) - 1
    }
}

fn merge<T>(parts: Vec<(u64, Vec<T>, u64)>) -> (u64, Vec<T>, u64) {
    let best = parts.iter().map(|p| p.0).max().unwrap_or(0);
    let nodes = parts.iter().map(|p| p.2).sum();
    let found = parts.into_iter().filter(|p| p.0 == best).flat_map(|p| p.1).collect();
    (best, found, nodes)
}

impl Maximizer for BranchAndBound {
    fn name(&self) -> &'static str {
        "branch-and-bound"
    }

    fn intersecting(&self, n: u32, k: u32, opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        let bound = single_bound(n, k)?;
        check_exhaustive(n, k, opts.limit)?;
        let t = Tables::new(n, k);
        let total = t.sets.len();
        // relabel so that {1..k} (index 0) is a member
        let mut root = Node { i: 1, chosen: 1, allowed: low_mask(total) & !1 & !t.conflict[0], value: 0, contrib: vec![0; total] };
        for j in bits_of(root.allowed) {
            root.contrib[j] = t.meet[0][j];
        }
        // the star through 1 contains {1..k} and is feasible
        let star: u64 = t.sets.iter().enumerate().filter(|(_, &s)| s & 2 != 0).fold(0, |acc, (i, _)| acc | 1 << i);
        let star_value: u64 = omega_family(&Family::from_masks_unchecked(n, k, t.masks(star))) as u64;
        let shared = AtomicU64::new(star_value);
        let tasks = Self::split(&t, root, 6);
        let parts: Vec<(u64, Vec<u64>, u64)> = with_workers(opts.workers, || {
            tasks
                .into_par_iter()
                .map(|mut node| {
                    let mut out = Collector::new();
                    Self::dfs(&t, k, &mut node, &shared, &mut out);
                    (out.best, out.found, out.nodes)
                })
                .collect()
        });
        let (best, found, nodes) = merge(parts);
        let labelled: Vec<Vec<u64>> = found.into_iter().map(|c| t.masks(c)).collect();
        let witnesses = canonical_families(n, k, labelled)?;
        Ok(SearchResult {
            config: SearchConfig { n, k, l: None },
            strategy: self.name().into(),
            best_value: best as u128,
            bound,
            tight: best as u128 == bound,
            exhaustive: true,
            witnesses,
            evaluated: nodes,
            runtime_ms: elapsed_ms(started),
            seed: None,
            heuristic: None,
        })
    }

    fn cross(&self, n: u32, k: u32, l: u32, opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        let bound = omega_cross_bound(n, k, l)?.value;
        check_exhaustive(n, k, opts.cross_limit)?;
        let ct = CrossTables::new(n, k, l);
        let all_b = low_mask(ct.b_sets.len());
        // lower bound from the star pair through 1
        let star_a: Vec<usize> = (0..ct.a_sets.len()).filter(|&i| ct.a_sets[i] & 2 != 0).collect();
        let star_b = star_a.iter().fold(all_b, |acc, &i| acc & ct.compat[i]);
        let star_value: u64 = bits_of(star_b)
            .map(|b| star_a.iter().map(|&i| ct.meet[i][b] as u64).sum::<u64>())
            .sum();
        let shared = AtomicU64::new(star_value);
        let mut root = CrossNode { i: 1, chosen: 1, b: ct.compat[0], w: vec![0; ct.b_sets.len()] };
        for (b, w) in root.w.iter_mut().enumerate() {
            *w = ct.meet[0][b];
        }
        let tasks = ct.split(root, 6);
        let parts: Vec<CrossPart> = with_workers(opts.workers, || {
            tasks
                .into_par_iter()
                .map(|mut node| {
                    let mut out = PairCollector { best: 0, found: Vec::new(), nodes: 0 };
                    ct.dfs(&mut node, &shared, &mut out);
                    (out.best, out.found, out.nodes)
                })
                .collect()
        });
        let (best, found, nodes) = merge(parts);
        let labelled: Vec<(Vec<u64>, Vec<u64>)> = found
            .into_iter()
            .map(|(a, b)| (bits_of(a).map(|i| ct.a_sets[i]).collect(), bits_of(b).map(|j| ct.b_sets[j]).collect()))
            .collect();
        let witnesses = canonical_pairs(n, k, l, labelled)?;
        Ok(SearchResult {
            config: SearchConfig { n, k, l: Some(l) },
            strategy: self.name().into(),
            best_value: best as u128,
            bound,
            tight: best as u128 == bound,
            exhaustive: true,
            witnesses,
            evaluated: nodes,
            runtime_ms: elapsed_ms(started),
            seed: None,
            heuristic: None,
        })
    }
}

struct CrossTables {
    a_sets: Vec<u64>,
    b_sets: Vec<u64>,
    /// `compat[i]`: the l-sets meeting k-set `i`.
    compat: Vec<u64>,
    meet: Vec<Vec<u32>>,
    /// `suffix[i][b]`: `Σ_{j >= i} |a_j ∩ b_b|`.
    suffix: Vec<Vec<u64>>,
}

/// Per-task result: best value, the attaining (A, B) index masks, nodes visited.
type CrossPart = (u64, Vec<(u64, u64)>, u64);

#[derive(Clone)]
struct CrossNode {
    i: usize,
    chosen: u64,
    b: u64,
    w: Vec<u32>,
}

struct PairCollector {
    best: u64,
    found: Vec<(u64, u64)>,
    nodes: u64,
}

impl CrossTables {
    fn new(n: u32, k: u32, l: u32) -> Self {
        let a_sets: Vec<u64> = k_subsets(n, k).collect();
        let b_sets: Vec<u64> = k_subsets(n, l).collect();
        let compat = a_sets
            .iter()
            .map(|&a| b_sets.iter().enumerate().filter(|(_, &b)| a & b != 0).fold(0u64, |acc, (j, _)| acc | 1 << j))
            .collect();
        let meet: Vec<Vec<u32>> =
            a_sets.iter().map(|&a| b_sets.iter().map(|&b| (a & b).count_ones()).collect()).collect();
        let mut suffix = vec![vec![0u64; b_sets.len()]; a_sets.len() + 1];
        for i in (0..a_sets.len()).rev() {
            for b in 0..b_sets.len() {
                suffix[i][b] = suffix[i + 1][b] + meet[i][b] as u64;
            }
        }
        Self { a_sets, b_sets, compat, meet, suffix }
    }

    fn value(&self, node: &CrossNode) -> u64 {
        bits_of(node.b).map(|b| node.w[b] as u64).sum()
    }

    fn dfs(&self, node: &mut CrossNode, shared: &AtomicU64, out: &mut PairCollector) {
        out.nodes += 1;
        let total = self.a_sets.len();
        if node.i == total {
            // A must be maximal for B: no excluded k-set meets every member of B
            let maximal = (0..total).all(|j| node.chosen >> j & 1 == 1 || self.compat[j] & node.b != node.b);
            if maximal && node.b != 0 {
                let v = self.value(node);
                shared.fetch_max(v, Ordering::Relaxed);
                if v > out.best {
                    out.best = v;
                    out.found.clear();
                }
                if v == out.best {
                    out.found.push((node.chosen, node.b));
                }
            }
            return;
        }
        let optimistic: u64 = bits_of(node.b).map(|b| node.w[b] as u64 + self.suffix[node.i][b]).sum();
        if optimistic < shared.load(Ordering::Relaxed) {
            return;
        }
        let i = node.i;
        let saved = (node.chosen, node.b);
        // include
        for (b, w) in node.w.iter_mut().enumerate() {
            *w += self.meet[i][b];
        }
        node.chosen |= 1 << i;
        node.b &= self.compat[i];
        node.i += 1;
        self.dfs(node, shared, out);
        node.i -= 1;
        (node.chosen, node.b) = saved;
        for (b, w) in node.w.iter_mut().enumerate() {
            *w -= self.meet[i][b];
        }
        // exclude, unless set i already meets all of B (B only shrinks)
        if self.compat[i] & node.b != node.b {
            node.i += 1;
            self.dfs(node, shared, out);
            node.i -= 1;
        }
    }

    fn split(&self, root: CrossNode, depth: u32) -> Vec<CrossNode> {
        let mut frontier = vec![root];
        for _ in 0..depth {
            let mut next = Vec::new();
            for node in frontier {
                if node.i == self.a_sets.len() {
                    next.push(node);
                    continue;
                }
                let i = node.i;
                let mut inc = node.clone();
                for (b, w) in inc.w.iter_mut().enumerate() {
                    *w += self.meet[i][b];
                }
                inc.chosen |= 1 << i;
                inc.b &= self.compat[i];
                inc.i += 1;
                next.push(inc);
                if self.compat[i] & node.b != node.b {
                    next.push(CrossNode { i: i + 1, ..node });
                }
            }
            frontier = next;
        }
        frontier
    }
}

/// Evaluates every nonempty family (or every pair of families) directly.
pub struct NaiveOracle;

impl Maximizer for NaiveOracle {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn intersecting(&self, n: u32, k: u32, opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        let bound = single_bound(n, k)?;
        let total = check_exhaustive(n, k, opts.limit.min(20))? as usize;
        let sets: Vec<u64> = k_subsets(n, k).collect();
        let parts: Vec<(u64, Vec<u64>, u64)> = with_workers(opts.workers, || {
            (1u64..1 << total)
                .into_par_iter()
                .fold(
                    || (0u64, Vec::new(), 0u64),
                    |(mut best, mut found, seen), sel| {
                        let members: Vec<u64> = bits_of(sel).map(|i| sets[i]).collect();
                        let fam = Family::from_masks_unchecked(n, k, members);
                        if !is_intersecting(&fam) {
                            return (best, found, seen + 1);
                        }
                        let v = omega_family(&fam) as u64;
                        if v > best {
                            best = v;
                            found.clear();
                        }
                        if v == best {
                            found.push(sel);
                        }
                        (best, found, seen + 1)
                    },
                )
                .collect()
        });
        let (best, found, evaluated) = merge(parts);
        let labelled = found.into_iter().map(|sel| bits_of(sel).map(|i| sets[i]).collect()).collect();
        let witnesses = canonical_families(n, k, labelled)?;
        Ok(SearchResult {
            config: SearchConfig { n, k, l: None },
            strategy: self.name().into(),
            best_value: best as u128,
            bound,
            tight: best as u128 == bound,
            exhaustive: true,
            witnesses,
            evaluated,
            runtime_ms: elapsed_ms(started),
            seed: None,
            heuristic: None,
        })
    }

    fn cross(&self, n: u32, k: u32, l: u32, opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        let bound = omega_cross_bound(n, k, l)?.value;
        check_exhaustive(n, k, opts.cross_limit)?;
        let a_sets: Vec<u64> = k_subsets(n, k).collect();
        let b_sets: Vec<u64> = k_subsets(n, l).collect();
        let width = (a_sets.len() + b_sets.len()) as u64;
        if width > NAIVE_CROSS_LIMIT {
            return Err(Error::TooLarge { what: "C(n, k) + C(n, l) for the naive oracle", value: width, limit: NAIVE_CROSS_LIMIT });
        }
        let shift = a_sets.len();
        let parts: Vec<(u64, Vec<u64>, u64)> = with_workers(opts.workers, || {
            (0u64..1 << width)
                .into_par_iter()
                .fold(
                    || (0u64, Vec::new(), 0u64),
                    |(mut best, mut found, seen), sel| {
                        let a = Family::from_masks_unchecked(n, k, bits_of(sel & low_mask(shift)).map(|i| a_sets[i]).collect());
                        let b = Family::from_masks_unchecked(n, l, bits_of(sel >> shift).map(|j| b_sets[j]).collect());
                        if a.is_empty() || b.is_empty() || !is_cross_intersecting(&a, &b).unwrap_or(false) {
                            return (best, found, seen + 1);
                        }
                        let v = omega_cross(&a, &b).unwrap_or(0) as u64;
                        if v > best {
                            best = v;
                            found.clear();
                        }
                        if v == best {
                            found.push(sel);
                        }
                        (best, found, seen + 1)
                    },
                )
                .collect()
        });
        let (best, found, evaluated) = merge(parts);
        let labelled = found
            .into_iter()
            .map(|sel| {
                (
                    bits_of(sel & low_mask(shift)).map(|i| a_sets[i]).collect(),
                    bits_of(sel >> shift).map(|j| b_sets[j]).collect(),
                )
            })
            .collect();
        let witnesses = canonical_pairs(n, k, l, labelled)?;
        Ok(SearchResult {
            config: SearchConfig { n, k, l: Some(l) },
            strategy: self.name().into(),
            best_value: best as u128,
            bound,
            tight: best as u128 == bound,
            exhaustive: true,
            witnesses,
            evaluated,
            runtime_ms: elapsed_ms(started),
            seed: None,
            heuristic: None,
        })
    }
}

/// Simulated annealing with add / remove / swap moves.
pub struct Annealer {
    cfg: HeuristicConfig,
}

impl Annealer {
    pub fn new(cfg: HeuristicConfig) -> Self {
        Self { cfg }
    }

    fn finish(&self, config: SearchConfig, best: u128, bound: u128, witness: Witness, evaluated: u64, started: Instant) -> Result<SearchResult> {
        if best > bound {
            return Err(Error::Counterexample(format!(
                "annealing reached {best} above the closed-form bound {bound} at {config:?}: {}",
                serde_json::to_string(&witness).unwrap_or_default()
            )));
        }
        let witness = match witness {
            Witness::Family(f) if f.n() <= SWEEP_LIMIT => Witness::Family(canonical_form(&f)?),
            Witness::Pair(a, b) if a.n() <= SWEEP_LIMIT => {
                let (a, b) = canonical_pair(&a, &b)?;
                Witness::Pair(a, b)
            }
            w => w,
        };
        Ok(SearchResult {
            config,
            strategy: self.name().into(),
            best_value: best,
            bound,
            tight: best == bound,
            exhaustive: false,
            witnesses: vec![witness],
            evaluated,
            runtime_ms: elapsed_ms(started),
            seed: Some(self.cfg.seed),
            heuristic: Some(self.cfg),
        })
    }
}

fn random_kset(rng: &mut ChaCha8Rng, n: u32, k: u32) -> u64 {
    sample(rng, n as usize, k as usize).iter().fold(0u64, |acc, i| acc | 1 << (i + 1))
}

/// Moves one element of `s` to a random element outside it.
fn neighbor(rng: &mut ChaCha8Rng, n: u32, s: u64) -> u64 {
    let inside: Vec<u32> = crate::setcore::elements_of(s);
    let outside: Vec<u32> = (1..=n).filter(|e| s >> e & 1 == 0).collect();
    if outside.is_empty() {
        return s;
    }
    let drop = inside[rng.gen_range(0..inside.len())];
    let add = outside[rng.gen_range(0..outside.len())];
    (s & !(1 << drop)) | 1 << add
}

fn accept(rng: &mut ChaCha8Rng, delta: i64, temperature: f64) -> bool {
    delta >= 0 || rng.gen::<f64>() < (delta as f64 / temperature).exp()
}

impl Maximizer for Annealer {
    fn name(&self) -> &'static str {
        "anneal"
    }

    fn intersecting(&self, n: u32, k: u32, _opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        crate::setcore::check_ground(n)?;
        let bound = single_bound(n, k)?;
        let cfg = self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut best: (i64, Vec<u64>) = (-1, Vec::new());
        let mut evaluated = 0u64;
        for _ in 0..cfg.restarts.max(1) {
            let mut fam: Vec<u64> = vec![random_kset(&mut rng, n, k)];
            let mut value: i64 = 0;
            let mut temperature = cfg.initial_temperature;
            for _ in 0..cfg.iterations {
                evaluated += 1;
                let roll: f64 = rng.gen();
                if !fam.is_empty() && roll < 0.15 {
                    let idx = rng.gen_range(0..fam.len());
                    let s = fam[idx];
                    let loss: i64 = fam.iter().filter(|&&g| g != s).map(|&g| (g & s).count_ones() as i64).sum();
                    if accept(&mut rng, -loss, temperature) {
                        fam.swap_remove(idx);
                        value -= loss;
                    }
                } else {
                    let s = if !fam.is_empty() && roll < 0.6 {
                        let base = fam[rng.gen_range(0..fam.len())];
                        neighbor(&mut rng, n, base)
                    } else {
                        random_kset(&mut rng, n, k)
                    };
                    if !fam.contains(&s) {
                        let (clash, keep): (Vec<u64>, Vec<u64>) = fam.iter().partition(|&&g| g & s == 0);
                        let gain: i64 = keep.iter().map(|&g| (g & s).count_ones() as i64).sum();
                        let lost_cross: i64 =
                            clash.iter().map(|&c| keep.iter().map(|&g| (g & c).count_ones() as i64).sum::<i64>()).sum();
                        let lost_inner: i64 = (0..clash.len())
                            .flat_map(|i| (i + 1..clash.len()).map(move |j| (i, j)))
                            .map(|(i, j)| (clash[i] & clash[j]).count_ones() as i64)
                            .sum();
                        let delta = gain - lost_cross - lost_inner;
                        if accept(&mut rng, delta, temperature) {
                            fam = keep;
                            fam.push(s);
                            value += delta;
                        }
                    }
                }
                if value > best.0 {
                    best = (value, fam.clone());
                }
                temperature *= cfg.decay;
            }
        }
        let witness = Family::from_masks(n, k, best.1)?;
        debug_assert!(is_intersecting(&witness));
        let value = omega_family(&witness);
        self.finish(SearchConfig { n, k, l: None }, value, bound, Witness::Family(witness), evaluated, started)
    }

    fn cross(&self, n: u32, k: u32, l: u32, _opts: &SearchOptions) -> Result<SearchResult> {
        let started = Instant::now();
        crate::setcore::check_ground(n)?;
        let bound = omega_cross_bound(n, k, l)?.value;
        let count = count_sets(n, l)?;
        if count > ANNEAL_CROSS_LIMIT {
            return Err(Error::TooLarge { what: "C(n, l) tracked by the annealer", value: count, limit: ANNEAL_CROSS_LIMIT });
        }
        let b_sets: Vec<u64> = k_subsets(n, l).collect();
        let cfg = self.cfg;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut best: (i64, Vec<u64>) = (-1, Vec::new());
        let mut evaluated = 0u64;
        for _ in 0..cfg.restarts.max(1) {
            let mut fam: Vec<u64> = Vec::new();
            // per l-set: members of A missing it, and summed meets with A
            let mut missing = vec![0u32; b_sets.len()];
            let mut weight = vec![0i64; b_sets.len()];
            let mut temperature = cfg.initial_temperature;
            let first = random_kset(&mut rng, n, k);
            apply_cross(&b_sets, &mut missing, &mut weight, first, 1);
            fam.push(first);
            let mut value = cross_value(&missing, &weight);
            for _ in 0..cfg.iterations {
                evaluated += 1;
                let roll: f64 = rng.gen();
                let (s, sign, idx) = if !fam.is_empty() && roll < 0.2 {
                    let idx = rng.gen_range(0..fam.len());
                    (fam[idx], -1, Some(idx))
                } else {
                    let s = if !fam.is_empty() && roll < 0.6 {
                        let base = fam[rng.gen_range(0..fam.len())];
                        neighbor(&mut rng, n, base)
                    } else {
                        random_kset(&mut rng, n, k)
                    };
                    if fam.contains(&s) {
                        continue;
                    }
                    (s, 1, None)
                };
                apply_cross(&b_sets, &mut missing, &mut weight, s, sign);
                let candidate = cross_value(&missing, &weight);
                if accept(&mut rng, candidate - value, temperature) {
                    value = candidate;
                    match idx {
                        Some(i) => {
                            fam.swap_remove(i);
                        }
                        None => fam.push(s),
                    }
                } else {
                    apply_cross(&b_sets, &mut missing, &mut weight, s, -sign);
                }
                if value > best.0 {
                    best = (value, fam.clone());
                }
                temperature *= cfg.decay;
            }
        }
        let a = Family::from_masks(n, k, best.1)?;
        let b = Family::from_masks_unchecked(
            n,
            l,
            b_sets.iter().copied().filter(|&b| a.members().iter().all(|x| x.bits() & b != 0)).collect(),
        );
        let value = omega_cross(&a, &b)?;
        self.finish(SearchConfig { n, k, l: Some(l) }, value, bound, Witness::Pair(a, b), evaluated, started)
    }
}

fn apply_cross(b_sets: &[u64], missing: &mut [u32], weight: &mut [i64], a: u64, sign: i64) {
    for (j, &b) in b_sets.iter().enumerate() {
        let m = (a & b).count_ones() as i64;
        weight[j] += sign * m;
        if m == 0 {
            if sign > 0 {
                missing[j] += 1;
            } else {
                missing[j] -= 1;
            }
        }
    }
}

fn cross_value(missing: &[u32], weight: &[i64]) -> i64 {
    missing.iter().zip(weight).filter(|(&c, _)| c == 0).map(|(_, &w)| w).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessAudit {
    pub witness: usize,
    /// Center of the star (or common center of the star pair).
    pub star_center: Option<u32>,
    pub perms_checked: usize,
    /// Orders on which the member intervals are exactly those through one element.
    pub pattern_holds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub config: SearchConfig,
    pub witness_classes: usize,
    pub all_stars: bool,
    pub pattern_checked: bool,
    pub witnesses: Vec<WitnessAudit>,
}

/// Star status of each witness, plus the interval-star pattern on every cyclic order.
pub fn uniqueness_report(r: &SearchResult) -> Result<UniquenessReport> {
    if !r.exhaustive {
        return Err(Error::NotExhaustive);
    }
    let n = r.config.n;
    let pattern_checked = (2..=SWEEP_LIMIT).contains(&n);
    let orders = if pattern_checked { sweep_orders(n, Sweep::All { seed: 0 })?.0 } else { Vec::new() };
    let mut witnesses = Vec::with_capacity(r.witnesses.len());
    for (idx, w) in r.witnesses.iter().enumerate() {
        let (fams, star_center): (Vec<&Family>, Option<u32>) = match w {
            Witness::Family(f) => (vec![f], is_star(f)),
            Witness::Pair(a, b) => {
                let c = match (is_star(a), is_star(b)) {
                    (Some(x), Some(y)) if x == y => Some(x),
                    _ => None,
                };
                (vec![a, b], c)
            }
        };
        let member_masks: Vec<Vec<u64>> = fams.iter().map(|f| f.masks()).collect();
        let mut holds = 0;
        for p in &orders {
            let mut centers: Option<u64> = None;
            let mut ok = true;
            for (f, masks) in fams.iter().zip(&member_masks) {
                if f.k() >= n {
                    ok = false;
                    break;
                }
                let ivs: Vec<u64> = intervals_of_length(p, f.k())?.iter().map(|i| i.set().bits()).collect();
                let inside: Vec<u64> = ivs.iter().copied().filter(|s| masks.binary_search(s).is_ok()).collect();
                // elements x whose k-intervals are exactly the member intervals
                let through = (1..=n)
                    .filter(|&x| {
                        let want: Vec<u64> = ivs.iter().copied().filter(|s| s >> x & 1 == 1).collect();
                        want.len() == inside.len() && want.iter().all(|s| inside.contains(s))
                    })
                    .fold(0u64, |acc, x| acc | 1 << x);
                centers = Some(centers.map_or(through, |c| c & through));
            }
            if ok && centers.unwrap_or(0) != 0 {
                holds += 1;
            }
        }
        witnesses.push(WitnessAudit { witness: idx, star_center, perms_checked: orders.len(), pattern_holds: holds });
    }
    Ok(UniquenessReport {
        config: r.config,
        witness_classes: r.witnesses.len(),
        all_stars: witnesses.iter().all(|w| w.star_center.is_some()),
        pattern_checked,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::star;

    fn families(r: &SearchResult) -> Vec<Family> {
        r.witnesses
            .iter()
            .map(|w| match w {
                Witness::Family(f) => f.clone(),
                Witness::Pair(..) => panic!("pair witness"),
            })
            .collect()
    }

    #[test]
    fn five_two_has_only_the_star() {
        let r = max_omega_intersecting(5, 2).unwrap();
        assert_eq!((r.best_value, r.bound, r.tight), (6, 6, true));
        assert_eq!(families(&r), vec![star(5, 2, 1).unwrap()]);
    }

    #[test]
    fn four_two_has_star_and_triangle() {
        let r = max_omega_intersecting(4, 2).unwrap();
        assert_eq!(r.best_value, 3);
        let tri = Family::new(4, 2, &[vec![1, 2], vec![1, 3], vec![2, 3]]).unwrap();
        assert_eq!(families(&r), vec![tri, star(4, 2, 1).unwrap()]);
    }

    #[test]
    fn k_one_is_zero_with_singletons() {
        let r = max_omega_intersecting(6, 1).unwrap();
        assert_eq!((r.best_value, r.tight), (0, true));
        assert_eq!(families(&r), vec![star(6, 1, 1).unwrap()]);
    }

    #[test]
    fn cross_examples() {
        let r = max_omega_cross(5, 2, 2).unwrap();
        assert_eq!((r.best_value, r.witnesses.len()), (20, 1));
        assert_eq!(r.witnesses[0], Witness::Pair(star(5, 2, 1).unwrap(), star(5, 2, 1).unwrap()));
        let r = max_omega_cross(3, 2, 1).unwrap();
        assert_eq!((r.best_value, r.bound), (2, 2));
        assert!(r.witnesses.contains(&Witness::Pair(star(3, 2, 1).unwrap(), star(3, 1, 1).unwrap())));
    }

    #[test]
    fn hypothesis_and_budget_errors() {
        assert!(matches!(max_omega_intersecting(5, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(max_omega_intersecting(9, 2), Err(Error::TooLarge { .. })));
        assert!(matches!(max_omega_cross(5, 2, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(max_omega_cross(7, 2, 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let one = BranchAndBound.intersecting(6, 3, &SearchOptions { workers: 1, ..Default::default() }).unwrap();
        let four = BranchAndBound.intersecting(6, 3, &SearchOptions { workers: 4, ..Default::default() }).unwrap();
        assert_eq!(one.witnesses, four.witnesses);
        assert_eq!(one.best_value, four.best_value);
    }

    #[test]
    fn heuristic_is_deterministic_and_bounded() {
        let cfg = HeuristicConfig { iterations: 2000, ..Default::default() };
        let a = heuristic_max(8, 3, None, &cfg).unwrap();
        let b = heuristic_max(8, 3, None, &cfg).unwrap();
        assert_eq!((a.best_value, &a.witnesses), (b.best_value, &b.witnesses));
        assert!(a.best_value <= 315);
        assert!(!a.exhaustive);
        let c = heuristic_max(6, 2, Some(2), &cfg).unwrap();
        assert!(c.best_value <= c.bound);
    }

    #[test]
    fn uniqueness_report_examples() {
        let r = uniqueness_report(&max_omega_intersecting(5, 2).unwrap()).unwrap();
        assert!(r.all_stars);
        assert_eq!((r.witnesses[0].perms_checked, r.witnesses[0].pattern_holds), (24, 24));
        let r4 = uniqueness_report(&max_omega_intersecting(4, 2).unwrap()).unwrap();
        assert!(!r4.all_stars);
        let h = heuristic_max(5, 2, None, &HeuristicConfig::default()).unwrap();
        assert_eq!(uniqueness_report(&h), Err(Error::NotExhaustive));
    }

    #[test]
    fn load_rejects_tampered_reports() {
        let r = max_omega_intersecting(5, 2).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(SearchResult::load(&json).unwrap().witnesses, r.witnesses);
        let bad = json.replace("\"best_value\":\"6\"", "\"best_value\":\"7\"");
        assert!(matches!(SearchResult::load(&bad), Err(Error::Counterexample(_))));
    }

    #[test]
    fn registry_names() {
        let reg = MaximizerRegistry::default();
        assert_eq!(reg.names(), vec!["anneal", "branch-and-bound", "naive"]);
        assert!(reg.get("tabu", &HeuristicConfig::default()).is_err());
    }
}
