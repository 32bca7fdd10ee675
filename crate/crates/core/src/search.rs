//! Enumeration and sampling of small finite metric spaces with self-maps,
//! and separation queries over the condition catalog.
//!
//! Candidate instances are decided with integer arithmetic on distances
//! scaled to a common denominator. On a finite instance every ε–δ condition
//! holds for all ε exactly when no constraint has `premise < conclusion`, and
//! the orbit constraints of all starting points are the pairs `(p, Tᵏp)`,
//! `k ≥ 1`. [`classify`] recomputes verdicts through the general condition
//! engine instead.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{check_pointwise, decide_all_eps, Condition, Domain, PairSet};
use crate::error::{Error, Result};
use crate::map::SelfMap;
use crate::scalar::Rational;
use crate::space::{MetricSpace, Point};

pub const MAX_POINTS: usize = 7;

/// Matrices handed to the worker pool at a time.
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Random { budget: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub min_points: usize,
    pub max_points: usize,
    pub grid: Vec<Rational>,
    pub mode: SearchMode,
}

impl SearchConfig {
    pub fn exhaustive(max_points: usize, grid: Vec<Rational>) -> Self {
        SearchConfig { min_points: 1, max_points, grid, mode: SearchMode::Exhaustive }
    }

    pub fn random(max_points: usize, grid: Vec<Rational>, budget: u64, seed: u64) -> Self {
        SearchConfig { min_points: 1, max_points, grid, mode: SearchMode::Random { budget, seed } }
    }

    pub fn with_min_points(mut self, min_points: usize) -> Self {
        self.min_points = min_points;
        self
    }

    fn validate(&self) -> Result<Grid> {
        if self.max_points < 2 || self.max_points > MAX_POINTS {
            return Err(Error::Argument(format!("max_points must be in 2..={MAX_POINTS}, got {}", self.max_points)));
        }
        if self.min_points < 1 || self.min_points > self.max_points {
            return Err(Error::Argument(format!(
                "min_points must be in 1..={}, got {}",
                self.max_points, self.min_points
            )));
        }
        Grid::new(&self.grid)
    }
}

/// Sorted distinct grid values and their images under `d ↦ 2·L·d`, where `L`
/// is the least common denominator; halves of sums stay integral.
#[derive(Clone, Debug)]
struct Grid {
    values: Vec<Rational>,
    scaled: Vec<i64>,
}

impl Grid {
    fn new(values: &[Rational]) -> Result<Grid> {
        if values.is_empty() {
            return Err(Error::Argument("distance grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::Argument(format!("grid value {bad} is not positive")));
        }
        let mut values = values.to_vec();
        values.sort();
        values.dedup();
        let lcm = values.iter().fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        let scaled = values
            .iter()
            .map(|v| {
                let scaled: num_bigint::BigInt = v.numer() * (&lcm / v.denom()) * 2;
                scaled
                    .to_i64()
                    .filter(|x| *x < i64::MAX / 64)
                    .ok_or_else(|| Error::Argument(format!("grid value {v} is too large after scaling")))
            })
            .collect::<Result<_>>()?;
        Ok(Grid { values, scaled })
    }

    fn len(&self) -> usize {
        self.values.len()
    }
}

/// Upper-triangle positions in generation order: column by column, so the
/// last entry of every triple `a < b < c` is `(b, c)`.
fn entry_order(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

/// Triangle-valid distance matrices (as grid indices per entry) in
/// lexicographic order of the entry sequence `d01, d02, d12, d03, ...`.
struct MatrixIter<'g> {
    n: usize,
    grid: &'g Grid,
    entries: Vec<(usize, usize)>,
    choice: Vec<usize>,
    /// Scaled distances of the current choice, row-major `n × n`.
    dist: Vec<i64>,
    state: IterState,
}

#[derive(PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl<'g> MatrixIter<'g> {
    fn new(n: usize, grid: &'g Grid) -> Self {
        let entries = entry_order(n);
        MatrixIter { n, grid, choice: vec![0; entries.len()], entries, dist: vec![0; n * n], state: IterState::Fresh }
    }

    fn set(&mut self, k: usize) {
        let (i, j) = self.entries[k];
        let v = self.grid.scaled[self.choice[k]];
        self.dist[i * self.n + j] = v;
        self.dist[j * self.n + i] = v;
    }

    /// Entry `k` is consistent with every triple it completes.
    fn valid(&self, k: usize) -> bool {
        let (i, j) = self.entries[k];
        let n = self.n;
        let dij = self.dist[i * n + j];
        (0..i).all(|a| {
            let dai = self.dist[a * n + i];
            let daj = self.dist[a * n + j];
            dij <= dai + daj && dai <= dij + daj && daj <= dai + dij
        })
    }

    fn next_matrix(&mut self) -> Option<&[i64]> {
        let m = self.entries.len();
        let mut k;
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                if m == 0 {
                    self.state = IterState::Done;
                    return Some(&self.dist);
                }
                k = 0;
                self.choice[0] = 0;
            }
            IterState::Running => {
                k = m - 1;
                self.choice[k] += 1;
            }
        }
        loop {
            while self.choice[k] < self.grid.len() {
                self.set(k);
                if self.valid(k) {
                    break;
                }
                self.choice[k] += 1;
            }
            if self.choice[k] == self.grid.len() {
                if k == 0 {
                    self.state = IterState::Done;
                    return None;
                }
                k -= 1;
                self.choice[k] += 1;
                continue;
            }
            if k == m - 1 {
                return Some(&self.dist);
            }
            k += 1;
            self.choice[k] = 0;
        }
    }
}

/// An instance viewed through scaled integer distances.
#[derive(Clone, Copy, Debug)]
pub struct View<'a> {
    n: usize,
    dist: &'a [i64],
    table: &'a [usize],
}

impl<'a> View<'a> {
    fn d(&self, p: usize, q: usize) -> i64 {
        self.dist[p * self.n + q]
    }

    fn gap(&self, p: usize) -> i64 {
        self.d(p, self.table[p])
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        self.table
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.n).filter(|&p| self.table[p] == p).collect()
    }

    /// Every Picard orbit reaches an exact fixed point (within `n` steps).
    pub fn every_orbit_reaches_fixed_point(&self) -> bool {
        (0..self.n).all(|x| {
            let mut p = x;
            for _ in 0..self.n {
                p = self.table[p];
            }
            self.table[p] == p
        })
    }

    /// `Tᵏp` for `k = 1..=n`.
    fn forward(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        let mut q = p;
        (0..self.n).map(move |_| {
            q = self.table[q];
            q
        })
    }

    /// Whether `cond` holds exactly (pointwise conditions: every distinct
    /// pair; ε–δ conditions: every ε > 0 and, for orbit conditions, every
    /// starting point).
    pub fn holds(&self, cond: Condition) -> bool {
        let n = self.n;
        let t = self.table;
        match cond {
            Condition::CmB => (0..n).all(|p| (p + 1..n).all(|q| self.d(t[p], t[q]) < self.d(p, q))),
            Condition::CmK => (0..n).all(|p| (p + 1..n).all(|q| 2 * self.d(t[p], t[q]) < self.gap(p) + self.gap(q))),
            Condition::CjmB => (0..n).all(|p| (p + 1..n).all(|q| self.d(t[p], t[q]) <= self.d(p, q))),
            Condition::CjmK => (0..n).all(|p| (p + 1..n).all(|q| 2 * self.d(t[p], t[q]) <= self.gap(p) + self.gap(q))),
            // Consecutive gaps: `s(Tp) ≤ s(p)`; K_II reduces to the same inequality.
            Condition::B2 | Condition::KII => (0..n).all(|p| self.gap(t[p]) <= self.gap(p)),
            Condition::B1 => (0..n).all(|p| self.forward(p).all(|q| self.d(t[p], t[q]) <= self.d(p, q))),
            // A finite excluded set never removes a whole interval [premise, conclusion).
            Condition::KIII | Condition::KIV => {
                (0..n).all(|p| self.forward(p).all(|q| 2 * self.d(t[p], t[q]) <= self.gap(p) + self.gap(q)))
            }
        }
    }

    /// Whether assigning `T(k)` (with `T(0..k)` already fixed) keeps the
    /// pointwise conditions in `hold` satisfiable.
    fn extends(&self, k: usize, cm_b: bool, cm_k: bool) -> bool {
        let t = self.table;
        (0..k).all(|i| {
            (!cm_b || self.d(t[i], t[k]) < self.d(i, k))
                && (!cm_k || 2 * self.d(t[i], t[k]) < self.d(i, t[i]) + self.d(k, t[k]))
        })
    }
}

/// One enumerated or sampled instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    /// Position in the canonical stream (exhaustive) or sample number (random).
    pub ordinal: u64,
    pub distances: Vec<Vec<Rational>>,
    pub table: Vec<usize>,
}

impl Instance {
    fn from_view(ordinal: u64, grid: &Grid, view: View<'_>) -> Instance {
        let n = view.n;
        let distances = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        if p == q {
                            Rational::zero()
                        } else {
                            let k = grid.scaled.binary_search(&view.d(p, q)).expect("distance comes from the grid");
                            grid.values[k].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Instance { ordinal, distances, table: view.table.to_vec() }
    }

    pub fn points(&self) -> usize {
        self.table.len()
    }

    pub fn space(&self) -> MetricSpace {
        MetricSpace::finite(self.distances.clone()).expect("generated matrices are valid")
    }

    pub fn map(&self) -> SelfMap {
        SelfMap::Table { table: self.table.clone() }
    }

    /// The same instance with point `i` renamed `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Instance> {
        let n = self.points();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::Argument(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let mut distances = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                distances[perm[i]][perm[j]] = self.distances[i][j].clone();
            }
        }
        let SelfMap::Table { table } = self.map().permuted(perm)? else { unreachable!() };
        Ok(Instance { ordinal: self.ordinal, distances, table })
    }
}

/// Visits every table map on `n` points in lexicographic order, skipping
/// (and counting as covered) subtrees where a CM condition in `hold` already
/// fails on the assigned prefix.
fn for_each_table(n: usize, dist: &[i64], cm_b: bool, cm_k: bool, mut f: impl FnMut(View<'_>) -> bool) {
    let mut table = vec![0usize; n];
    let mut k = 0usize;
    loop {
        let ok = table[k] < n && View { n, dist, table: &table }.extends(k, cm_b, cm_k);
        if table[k] >= n {
            if k == 0 {
                return;
            }
            k -= 1;
            table[k] += 1;
            continue;
        }
        if !ok {
            table[k] += 1;
            continue;
        }
        if k == n - 1 {
            if f(View { n, dist, table: &table }) {
                return;
            }
            table[k] += 1;
        } else {
            k += 1;
            table[k] = 0;
        }
    }
}

fn table_rank(table: &[usize]) -> u64 {
    let n = table.len() as u64;
    table.iter().fold(0, |acc, &t| acc * n + t as u64)
}

fn tables_per_matrix(n: usize) -> u64 {
    (n as u64).pow(n as u32)
}

/// Every instance of the configuration, in canonical order (exhaustive) or
/// as a seeded sample stream (random).
pub fn enumerate_instances(config: &SearchConfig) -> Result<Box<dyn Iterator<Item = Instance>>> {
    let grid = config.validate()?;
    match config.mode {
        SearchMode::Exhaustive => {
            let mut out_ordinal = 0u64;
            let sizes = config.min_points..=config.max_points;
            let iter = sizes.flat_map(move |n| {
                let grid = grid.clone();
                let mut matrices = Vec::new();
                let mut it = MatrixIter::new(n, &grid);
                while let Some(d) = it.next_matrix() {
                    matrices.push(d.to_vec());
                }
                matrices.into_iter().flat_map(move |dist| {
                    let grid = grid.clone();
                    let mut instances = Vec::new();
                    for_each_table(n, &dist, false, false, |view| {
                        instances.push((view.table.to_vec(), Instance::from_view(0, &grid, view)));
                        false
                    });
                    instances.into_iter().map(|(_, inst)| inst)
                })
            });
            Ok(Box::new(iter.map(move |mut inst| {
                inst.ordinal = out_ordinal;
                out_ordinal += 1;
                inst
            })))
        }
        SearchMode::Random { budget, seed } => {
            let mut sampler = Sampler::new(config, grid, seed);
            Ok(Box::new((0..budget).map(move |k| sampler.sample(k))))
        }
    }
}

struct Sampler {
    min: usize,
    max: usize,
    grid: Grid,
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(config: &SearchConfig, grid: Grid, seed: u64) -> Self {
        Sampler { min: config.min_points, max: config.max_points, grid, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Draws entries column by column from the grid values consistent with
    /// the triangles completed so far, restarting if none is.
    fn sample(&mut self, ordinal: u64) -> Instance {
        let n = self.rng.gen_range(self.min..=self.max);
        let entries = entry_order(n);
        'restart: loop {
            let mut dist = vec![0i64; n * n];
            for &(i, j) in &entries {
                let allowed: Vec<i64> = self
                    .grid
                    .scaled
                    .iter()
                    .copied()
                    .filter(|&v| {
                        (0..i).all(|a| {
                            let dai = dist[a * n + i];
                            let daj = dist[a * n + j];
                            v <= dai + daj && dai <= v + daj && daj <= dai + v
                        })
                    })
                    .collect();
                if allowed.is_empty() {
                    continue 'restart;
                }
                let v = allowed[self.rng.gen_range(0..allowed.len())];
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
            let table: Vec<usize> = (0..n).map(|_| self.rng.gen_range(0..n)).collect();
            return Instance::from_view(ordinal, &self.grid, View { n, dist: &dist, table: &table });
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceClassification {
    pub points: usize,
    /// Exact verdict for every condition in the catalog.
    pub verdicts: Vec<(Condition, bool)>,
    pub fixed_points: Vec<usize>,
    pub every_orbit_reaches_fixed_point: bool,
}

impl InstanceClassification {
    pub fn holds(&self, cond: Condition) -> bool {
        self.verdicts.iter().any(|(c, h)| *c == cond && *h)
    }
}

/// Decides `cond` on a finite instance with the general condition engine:
/// all pairs for pointwise conditions, all points for CJM, and every orbit
/// for the orbit conditions (each over a prefix long enough to contain all
/// pairs `(Tⁱx, Tʲx)`).
pub fn condition_holds(cond: Condition, space: &MetricSpace, map: &SelfMap) -> Result<bool> {
    let n = space
        .finite_len()
        .ok_or_else(|| Error::Argument("exact classification needs a finite space".into()))?;
    if cond.is_pointwise() {
        return Ok(check_pointwise(cond, space, map, &PairSet::All { cutoff: None })?.holds());
    }
    if cond.is_pairwise() {
        return Ok(decide_all_eps(cond, space, map, &Domain::Cutoff(n as u64))?.holds);
    }
    for x in 0..n {
        if !decide_all_eps(cond, space, map, &Domain::orbit(Point::Index(x), 2 * n + 1))?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn classify(instance: &Instance) -> Result<InstanceClassification> {
    let space = instance.space();
    let map = instance.map();
    let verdicts = Condition::ALL
        .iter()
        .map(|&c| Ok((c, condition_holds(c, &space, &map)?)))
        .collect::<Result<Vec<_>>>()?;
    let t = &instance.table;
    let n = t.len();
    let fixed_points: Vec<usize> = (0..n).filter(|&p| t[p] == p).collect();
    let every_orbit_reaches_fixed_point = (0..n).all(|x| {
        let p = (0..n).fold(x, |p, _| t[p]);
        t[p] == p
    });
    Ok(InstanceClassification { points: n, verdicts, fixed_points, every_orbit_reaches_fixed_point })
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeCount {
    pub points: usize,
    pub matrices: u64,
    pub instances: u64,
}

/// Proof that no instance in a fully enumerated space matched.
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionCertificate {
    pub min_points: usize,
    pub max_points: usize,
    pub grid: Vec<Rational>,
    pub sizes: Vec<SizeCount>,
    /// Every instance of the search space; each was either evaluated or
    /// skipped because a pointwise hold condition fails on a partial table.
    pub instances_covered: u64,
    pub instances_evaluated: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationWitness {
    pub instance: Instance,
    pub classification: InstanceClassification,
    /// The exact classification agrees with the search on every queried condition.
    pub confirmed: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SearchOutcome {
    Witness(Box<SeparationWitness>),
    Exhausted(ExhaustionCertificate),
    /// Random mode: no sampled instance matched.
    NoWitnessInSample { seed: u64, budget: u64 },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&SeparationWitness> {
        match self {
            SearchOutcome::Witness(w) => Some(w),
            _ => None,
        }
    }
}

/// Raw result of [`search_instances`].
#[derive(Clone, Debug)]
pub enum Found {
    Instance(Instance),
    Exhausted(ExhaustionCertificate),
    /// Random mode: no sampled instance matched.
    Sampled,
}

/// Finds the first instance (canonical order, or sample order) where every
/// condition in `hold` holds and `accept` is true. `hold` containing CM_B or
/// CM_K prunes table maps during enumeration.
pub fn search_instances<F>(config: &SearchConfig, hold: &[Condition], accept: F) -> Result<Found>
where
    F: Fn(&View<'_>) -> bool + Sync,
{
    run_search(config, hold, &accept)
}

fn run_search<F>(config: &SearchConfig, hold: &[Condition], accept: &F) -> Result<Found>
where
    F: Fn(&View<'_>) -> bool + Sync,
{
    let grid = config.validate()?;
    let cm_b = hold.contains(&Condition::CmB);
    let cm_k = hold.contains(&Condition::CmK);
    let matches = |view: &View<'_>| hold.iter().all(|&c| view.holds(c)) && accept(view);
    match config.mode {
        SearchMode::Random { budget, seed } => {
            let mut sampler = Sampler::new(config, grid, seed);
            for k in 0..budget {
                let inst = sampler.sample(k);
                let n = inst.points();
                let dist = scaled_matrix(&sampler.grid, &inst);
                if matches(&View { n, dist: &dist, table: &inst.table }) {
                    return Ok(Found::Instance(inst));
                }
            }
            Ok(Found::Sampled)
        }
        SearchMode::Exhaustive => {
            let mut before = 0u64;
            let mut evaluated = 0u64;
            let mut sizes = Vec::new();
            for n in config.min_points..=config.max_points {
                let per = tables_per_matrix(n);
                let mut it = MatrixIter::new(n, &grid);
                let mut index = 0u64;
                loop {
                    let mut chunk = Vec::with_capacity(CHUNK);
                    while chunk.len() < CHUNK {
                        match it.next_matrix() {
                            Some(d) => chunk.push(d.to_vec()),
                            None => break,
                        }
                    }
                    if chunk.is_empty() {
                        break;
                    }
                    let results: Vec<(u64, Option<Vec<usize>>)> = chunk
                        .par_iter()
                        .map(|dist| {
                            let mut count = 0u64;
                            let mut found = None;
                            for_each_table(n, dist, cm_b, cm_k, |view| {
                                count += 1;
                                if matches(&view) {
                                    found = Some(view.table.to_vec());
                                    return true;
                                }
                                false
                            });
                            (count, found)
                        })
                        .collect();
                    for ((count, found), dist) in results.into_iter().zip(&chunk) {
                        evaluated += count;
                        if let Some(table) = found {
                            let ordinal = before + index * per + table_rank(&table);
                            let view = View { n, dist, table: &table };
                            return Ok(Found::Instance(Instance::from_view(ordinal, &grid, view)));
                        }
                        index += 1;
                    }
                }
                before += index * per;
                sizes.push(SizeCount { points: n, matrices: index, instances: index * per });
            }
            Ok(Found::Exhausted(ExhaustionCertificate {
                min_points: config.min_points,
                max_points: config.max_points,
                grid: grid.values.clone(),
                instances_covered: before,
                instances_evaluated: evaluated,
                sizes,
            }))
        }
    }
}

fn scaled_matrix(grid: &Grid, inst: &Instance) -> Vec<i64> {
    inst.distances
        .iter()
        .flatten()
        .map(|v| {
            if v.is_zero() {
                0
            } else {
                grid.scaled[grid.values.binary_search(v).expect("sampled from the grid")]
            }
        })
        .collect()
}

/// Returns the first instance where every `hold` condition holds and every
/// `fail` condition fails, or a certificate that none exists in the search
/// space.
pub fn find_separation(hold: &[Condition], fail: &[Condition], config: &SearchConfig) -> Result<SearchOutcome> {
    if let Some(c) = hold.iter().find(|c| fail.contains(c)) {
        return Err(Error::Argument(format!("{c} is in both the hold and the fail set")));
    }
    let found = run_search(config, hold, &|view: &View<'_>| fail.iter().all(|&c| !view.holds(c)))?;
    Ok(match found {
        Found::Instance(instance) => {
            let classification = classify(&instance)?;
            let confirmed = hold.iter().all(|&c| classification.holds(c)) && fail.iter().all(|&c| !classification.holds(c));
            SearchOutcome::Witness(Box::new(SeparationWitness { instance, classification, confirmed }))
        }
        Found::Exhausted(cert) => SearchOutcome::Exhausted(cert),
        Found::Sampled => match config.mode {
            SearchMode::Random { budget, seed } => SearchOutcome::NoWitnessInSample { seed, budget },
            SearchMode::Exhaustive => unreachable!(),
        },
    })
}
