//! Instance generation, algorithm dispatch and oracle-ratio benchmarks.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algo::{algorithm_a1, algorithm_a2, algorithms_a1_a2, AlgoConfig, AlgoError, Branch, RunReport};
use crate::format::{BinDoc, FormatError, Instance};
use crate::geometry::{Bin, Packing, Square};
use crate::oracle::{solve_exact, solve_exact_corner, OracleError, DEFAULT_BUDGET, MAX_CORNER_ITEMS, MAX_ITEMS};
use crate::scalar::Scalar;
use crate::schedule::{ScheduleError, ScheduleSpec, ThresholdSchedule};
use crate::shelf::{greedy_append, nfdh};

/// Denominator of generated large sides.
const GRID: i64 = 4096;
/// Denominator of generated sides below `1/GRID` scale.
const FINE_GRID: i64 = 65536;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Sides uniform on `[1/64, 3/4]`.
    Uniform,
    /// Large sides in `[P_1, 1]` or small sides in `(0, P_2]`.
    Bimodal,
    /// A dense square blocking a more profitable pair, plus filler.
    Adversarial,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Uniform, Family::Bimodal, Family::Adversarial];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Bimodal => "bimodal",
            Family::Adversarial => "adversarial",
        }
    }

    pub fn default_profit(self) -> ProfitModel {
        match self {
            Family::Uniform => ProfitModel::Uniform,
            Family::Bimodal => ProfitModel::Area,
            Family::Adversarial => ProfitModel::Inverted,
        }
    }
}

impl FromStr for Family {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| HarnessError::Spec(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfitModel {
    /// Profit equals area.
    Area,
    /// Profit uniform on `(0, 1]`, independent of size.
    Uniform,
    /// Profit equals side, so smaller squares are denser.
    Inverted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub seed: u64,
    pub n: usize,
    pub family: Family,
    pub profit: ProfitModel,
    pub bin: Bin,
    pub schedule: ThresholdSchedule,
}

impl InstanceSpec {
    /// Unit bin, default profit model of the family.
    pub fn new(seed: u64, n: usize, family: Family, schedule: ThresholdSchedule) -> Self {
        InstanceSpec { seed, n, family, profit: family.default_profit(), bin: Bin::unit(), schedule }
    }
}

fn grid_side(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(lo..=hi), den)
}

fn profit_for(model: ProfitModel, side: &Scalar, rng: &mut ChaCha8Rng) -> Scalar {
    match model {
        ProfitModel::Area => side.square(),
        ProfitModel::Uniform => Scalar::ratio(rng.gen_range(1..=1024), 1024),
        ProfitModel::Inverted => side.clone(),
    }
}

/// Largest `n` the generator accepts.
pub const MAX_GENERATED_ITEMS: usize = 100_000;

/// Largest number of instances one corpus may describe.
pub const MAX_CORPUS_INSTANCES: usize = 1_000_000;

/// Generates the instance described by `spec`; a pure function of it.
///
/// Sides are multiples of `1/4096` (or `1/65536` for sides below the
/// second boundary) of the bin's short side.
pub fn generate(spec: &InstanceSpec) -> Result<Instance, HarnessError> {
    if spec.n > MAX_GENERATED_ITEMS {
        return Err(HarnessError::Spec(format!("n = {} exceeds {MAX_GENERATED_ITEMS}", spec.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let unit_sides: Vec<(Scalar, Option<Scalar>)> = match spec.family {
        Family::Uniform => (0..spec.n).map(|_| (grid_side(&mut rng, GRID / 64, 3 * GRID / 4, GRID), None)).collect(),
        Family::Bimodal => bimodal_sides(spec, &mut rng)?,
        Family::Adversarial => adversarial_sides(spec.n, &mut rng),
    };
    let scale = spec.bin.short_side().clone();
    let items = unit_sides
        .into_iter()
        .enumerate()
        .map(|(i, (side, fixed))| {
            let profit = fixed.unwrap_or_else(|| profit_for(spec.profit, &side, &mut rng));
            Square::new(format!("q{i}"), side * &scale, profit)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(FormatError::from)?;
    let mut inst = Instance::new(spec.bin.clone(), items)?;
    inst.epsilon = Some(spec.schedule.epsilon().clone());
    inst.schedule = Some(spec.schedule.spec());
    Ok(inst)
}

fn bimodal_sides(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<Vec<(Scalar, Option<Scalar>)>, HarnessError> {
    let p1 = spec.schedule.boundary(1).expect("P_1 exists");
    let p2 = spec.schedule.boundary(2).expect("P_2 exists");
    let large_lo = (&p1 * Scalar::from_int(GRID)).ceil_u64() as i64;
    let small_hi = (&p2 * Scalar::from_int(FINE_GRID)).floor_u64() as i64;
    if small_hi < 1 {
        return Err(HarnessError::Spec(format!("P_2 = {p2} is below the side grid 1/{FINE_GRID}")));
    }
    Ok((0..spec.n)
        .map(|_| {
            if rng.gen_ratio(1, 3) {
                (grid_side(rng, large_lo.max(1), GRID, GRID), None)
            } else {
                (grid_side(rng, 1, small_hi, FINE_GRID), None)
            }
        })
        .collect())
}

/// A blocker of side `b` with `b + a > 1` and higher density than a pair
/// of side `a` squares whose joint profit is larger; the rest are filler
/// squares of low density.
fn adversarial_sides(n: usize, rng: &mut ChaCha8Rng) -> Vec<(Scalar, Option<Scalar>)> {
    let b = rng.gen_range(GRID * 55 / 100..=GRID * 60 / 100);
    // blocker profit = 1.9 * pair profit; density beats the pair iff 1.9 a^2 > b^2
    let valid: Vec<i64> = (GRID - b + 1..=GRID / 2).filter(|&a| 19 * a * a > 10 * b * b).collect();
    let a = valid[rng.gen_range(0..valid.len())];
    let pair_profit = Scalar::ratio(rng.gen_range(512..=1024), 1024);
    let blocker_profit = &pair_profit * Scalar::ratio(19, 10);
    let pair_density = &pair_profit / Scalar::ratio(a, GRID).square();
    let mut out = vec![
        (Scalar::ratio(b, GRID), Some(blocker_profit)),
        (Scalar::ratio(a, GRID), Some(pair_profit.clone())),
        (Scalar::ratio(a, GRID), Some(pair_profit)),
    ];
    while out.len() < n {
        let side = grid_side(rng, GRID / 64, GRID / 8, GRID);
        // a quarter to half of the pair's density
        let factor = Scalar::ratio(rng.gen_range(256..=512), 1024);
        let profit = &pair_density * &factor * side.square();
        out.push((side, Some(profit)));
    }
    out.truncate(n);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Nfdh,
    A1,
    A2,
    Exact,
    CornerExact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Greedy, Algorithm::Nfdh, Algorithm::A1, Algorithm::A2, Algorithm::Exact, Algorithm::CornerExact];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Nfdh => "nfdh",
            Algorithm::A1 => "a1",
            Algorithm::A2 => "a2",
            Algorithm::Exact => "exact",
            Algorithm::CornerExact => "corner-exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Spec(format!("unknown algorithm `{s}`")))
    }
}

/// Output of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub algorithm: Algorithm,
    pub packing: Packing,
    pub branch: Option<Branch>,
    /// Oracle nodes or corner states explored.
    pub nodes: u64,
    /// False when an exact solver ran out of budget.
    pub complete: bool,
    pub report: Option<RunReport>,
}

impl Solution {
    pub fn profit(&self) -> Scalar {
        self.packing.profit()
    }

    fn from_report(algorithm: Algorithm, report: RunReport) -> Self {
        Solution {
            algorithm,
            packing: report.packing.clone(),
            branch: Some(report.branch),
            nodes: report.stats.corner_states,
            complete: true,
            report: Some(report),
        }
    }

    fn plain(algorithm: Algorithm, packing: Packing) -> Self {
        Solution { algorithm, packing, branch: None, nodes: 0, complete: true, report: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub algo: AlgoConfig,
    pub oracle_budget: u64,
    /// Placement limit for the corner-restricted exact solver.
    pub corner_limit: u64,
}

impl SolveConfig {
    pub fn new(schedule: ThresholdSchedule) -> Self {
        SolveConfig { algo: AlgoConfig::new(schedule), oracle_budget: DEFAULT_BUDGET, corner_limit: DEFAULT_CORNER_EXACT_LIMIT }
    }
}

pub fn solve(algorithm: Algorithm, items: &[Square], bin: &Bin, config: &SolveConfig) -> Result<Solution, HarnessError> {
    Ok(match algorithm {
        Algorithm::Greedy => {
            let g = greedy_append(items, std::slice::from_ref(bin), &Scalar::zero());
            Solution::plain(algorithm, g.packings.into_iter().next().expect("one bin"))
        }
        Algorithm::Nfdh => {
            let fitting: Vec<Square> = items.iter().filter(|s| bin.fits(s)).cloned().collect();
            let strip = nfdh(&fitting, &bin.width, Some(&bin.height));
            Solution::plain(algorithm, strip.into_packing(bin.clone()))
        }
        Algorithm::A1 => Solution::from_report(algorithm, algorithm_a1(items, bin, &config.algo)?),
        Algorithm::A2 => Solution::from_report(algorithm, algorithm_a2(items, bin, &config.algo)?),
        Algorithm::Exact | Algorithm::CornerExact => {
            let r = if algorithm == Algorithm::Exact {
                solve_exact(items, bin, config.oracle_budget)?
            } else {
                solve_exact_corner(items, bin, config.corner_limit)?
            };
            Solution {
                algorithm,
                complete: r.is_complete(),
                nodes: r.nodes_explored,
                packing: r.witness,
                branch: None,
                report: None,
            }
        }
    })
}

/// `opt / profit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ratio {
    Unknown,
    Finite(Scalar),
    Infinite,
}

impl Ratio {
    pub fn of(opt: Option<&Scalar>, profit: &Scalar) -> Ratio {
        match opt {
            None => Ratio::Unknown,
            Some(o) if profit.is_zero() => {
                if o.is_zero() {
                    Ratio::Finite(Scalar::one())
                } else {
                    Ratio::Infinite
                }
            }
            Some(o) => Ratio::Finite(o / profit),
        }
    }

    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Ratio::Finite(r) => Some(r),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Ratio::Unknown => String::new(),
            Ratio::Finite(r) => format!("{:.6}", r.to_f64()),
            Ratio::Infinite => "inf".to_string(),
        }
    }

    fn cmp_key(&self) -> (u8, Option<&Scalar>) {
        match self {
            Ratio::Unknown => (0, None),
            Ratio::Finite(r) => (1, Some(r)),
            Ratio::Infinite => (2, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub seed: u64,
    pub n: usize,
    pub family: Family,
    pub algorithm: Algorithm,
    pub profit: Scalar,
    pub opt: Option<Scalar>,
    pub ratio: Ratio,
    pub nodes: u64,
    pub ms: u128,
    pub feasible: bool,
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusReport {
    pub entries: Vec<CorpusEntry>,
    /// Seeds left out of the ratios, with the reason.
    pub excluded: Vec<(u64, String)>,
}

impl CorpusReport {
    pub fn feasibility_failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.feasible).count()
    }

    fn ratios(&self, algorithm: Algorithm) -> impl Iterator<Item = &Ratio> {
        self.entries.iter().filter(move |e| e.algorithm == algorithm).map(|e| &e.ratio)
    }

    /// Largest known ratio; `Infinite` dominates.
    pub fn max_ratio(&self, algorithm: Algorithm) -> Option<Ratio> {
        self.ratios(algorithm)
            .filter(|r| **r != Ratio::Unknown)
            .max_by(|a, b| a.cmp_key().cmp(&b.cmp_key()))
            .cloned()
    }

    pub fn mean_ratio(&self, algorithm: Algorithm) -> Option<f64> {
        let finite: Vec<f64> = self.ratios(algorithm).filter_map(|r| r.value()).map(Scalar::to_f64).collect();
        (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,n,algorithm,profit,opt,ratio,nodes,ms\n");
        for e in &self.entries {
            let opt = e.opt.as_ref().map(Scalar::to_string).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.seed,
                e.n,
                e.algorithm,
                e.profit,
                opt,
                e.ratio.csv(),
                e.nodes,
                e.ms
            ));
        }
        out
    }

    /// One line per algorithm: runs, max and mean ratio, infeasible count.
    pub fn summary(&self) -> String {
        let mut algos: Vec<Algorithm> = self.entries.iter().map(|e| e.algorithm).collect();
        algos.sort();
        algos.dedup();
        let mut out = format!("{:<14}{:>6}{:>12}{:>12}{:>12}\n", "algorithm", "runs", "max ratio", "mean ratio", "infeasible");
        for a in algos {
            let runs = self.entries.iter().filter(|e| e.algorithm == a).count();
            let max = match self.max_ratio(a) {
                Some(Ratio::Infinite) => "inf".to_string(),
                Some(r) => r.csv(),
                None => "-".to_string(),
            };
            let mean = self.mean_ratio(a).map_or("-".to_string(), |m| format!("{m:.6}"));
            let bad = self.entries.iter().filter(|e| e.algorithm == a && !e.feasible).count();
            out.push_str(&format!("{:<14}{runs:>6}{max:>12}{mean:>12}{bad:>12}\n", a.name()));
        }
        if !self.excluded.is_empty() {
            out.push_str(&format!("excluded from ratios: {} instance(s)\n", self.excluded.len()));
            for (seed, why) in &self.excluded {
                out.push_str(&format!("  seed {seed}: {why}\n"));
            }
        }
        out
    }
}

fn timing_enabled() -> bool {
    std::env::var("SQUAREKNAP_TIMING").is_ok_and(|v| v == "1")
}

/// Runs `algorithms` on every instance and compares with the oracle.
///
/// Instances where the oracle is incomplete or fails are listed in
/// `excluded` and get no ratio. Entries are sorted by (seed, algorithm).
/// Wall-clock times are recorded only when `SQUAREKNAP_TIMING=1`.
pub fn run_corpus(specs: &[InstanceSpec], algorithms: &[Algorithm], config: &CorpusConfig) -> CorpusReport {
    let timing = timing_enabled();
    let results: Vec<(Vec<CorpusEntry>, Option<(u64, String)>)> =
        specs.par_iter().map(|spec| run_instance(spec, algorithms, config, timing)).collect();
    let mut report = CorpusReport::default();
    for (entries, excluded) in results {
        report.entries.extend(entries);
        report.excluded.extend(excluded);
    }
    report.entries.sort_by(|a, b| a.seed.cmp(&b.seed).then(a.algorithm.cmp(&b.algorithm)));
    report.excluded.sort();
    report
}

/// Settings shared by every instance of a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    pub oracle_budget: u64,
    pub override_guard: bool,
    /// Corner states per dropped class in A1 and A2.
    pub corner_state_limit: Option<u64>,
    /// Distinct packings for `corner-exact`.
    pub corner_exact_limit: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            oracle_budget: DEFAULT_BUDGET,
            override_guard: false,
            corner_state_limit: None,
            corner_exact_limit: DEFAULT_CORNER_EXACT_LIMIT,
        }
    }
}

/// Default `corner-exact` limit on distinct packings.
pub const DEFAULT_CORNER_EXACT_LIMIT: u64 = 50_000;

fn run_instance(
    spec: &InstanceSpec,
    algorithms: &[Algorithm],
    config: &CorpusConfig,
    timing: bool,
) -> (Vec<CorpusEntry>, Option<(u64, String)>) {
    let inst = match generate(spec) {
        Ok(i) => i,
        Err(e) => return (Vec::new(), Some((spec.seed, format!("generation failed: {e}")))),
    };
    let mut sc = SolveConfig::new(spec.schedule.clone());
    sc.oracle_budget = config.oracle_budget;
    sc.corner_limit = config.corner_exact_limit;
    sc.algo.override_guard = config.override_guard;
    if let Some(l) = config.corner_state_limit {
        sc.algo.corner_state_limit = l;
    }
    let mut excluded = None;
    let opt = if inst.items.len() <= MAX_ITEMS {
        match solve_exact(&inst.items, &inst.bin, config.oracle_budget) {
            Ok(r) if r.is_complete() => Some(r.optimal_profit),
            Ok(r) => {
                excluded = Some((spec.seed, format!("oracle incomplete after {} nodes", r.nodes_explored)));
                None
            }
            Err(e) => {
                excluded = Some((spec.seed, format!("oracle failed: {e}")));
                None
            }
        }
    } else {
        excluded = Some((spec.seed, format!("{} items exceed the oracle limit {MAX_ITEMS}", inst.items.len())));
        None
    };

    let mut solutions: Vec<(Solution, u128)> = Vec::new();
    let both = algorithms.contains(&Algorithm::A1) && algorithms.contains(&Algorithm::A2);
    if both {
        let start = Instant::now();
        match algorithms_a1_a2(&inst.items, &inst.bin, &sc.algo) {
            Ok((a1, a2)) => {
                let ms = start.elapsed().as_millis();
                solutions.push((Solution::from_report(Algorithm::A1, a1), ms));
                solutions.push((Solution::from_report(Algorithm::A2, a2), ms));
            }
            Err(e) => log::warn!("seed {}: {e}", spec.seed),
        }
    }
    for &a in algorithms {
        if both && matches!(a, Algorithm::A1 | Algorithm::A2) {
            continue;
        }
        if a == Algorithm::CornerExact && inst.items.len() > MAX_CORNER_ITEMS {
            continue;
        }
        let start = Instant::now();
        match solve(a, &inst.items, &inst.bin, &sc) {
            Ok(s) => solutions.push((s, start.elapsed().as_millis())),
            Err(e) => log::warn!("seed {} {a}: {e}", spec.seed),
        }
    }
    let entries = solutions
        .into_iter()
        .map(|(s, ms)| {
            let profit = s.profit();
            CorpusEntry {
                seed: spec.seed,
                n: spec.n,
                family: spec.family,
                algorithm: s.algorithm,
                ratio: Ratio::of(opt.as_ref(), &profit),
                opt: opt.clone(),
                profit,
                nodes: s.nodes,
                ms: if timing { ms } else { 0 },
                feasible: s.packing.is_feasible(),
                branch: s.branch,
            }
        })
        .collect();
    (entries, excluded)
}

/// A benchmark description as read by `bench`.
///
/// Each (n, family) cell gets `per_cell` instances; seeds run consecutively
/// from `seed` over all cells so every instance has its own seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub per_cell: usize,
    pub n: Vec<usize>,
    pub families: Vec<Family>,
    pub algorithms: Vec<Algorithm>,
    pub epsilon: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit: Option<ProfitModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin: Option<BinDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_budget: Option<u64>,
    #[serde(default)]
    pub override_guard: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner_state_limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner_exact_limit: Option<u64>,
}

pub fn parse_corpus_spec(text: &str) -> Result<CorpusSpec, HarnessError> {
    let spec: CorpusSpec = serde_json::from_str(text).map_err(FormatError::from)?;
    spec.instances()?;
    Ok(spec)
}

impl CorpusSpec {
    pub fn instances(&self) -> Result<Vec<InstanceSpec>, HarnessError> {
        let schedule = ThresholdSchedule::from_spec(self.epsilon.clone(), self.schedule.as_ref())?;
        let bin = match &self.bin {
            Some(b) => Bin::new(b.w.clone(), b.h.clone()).map_err(FormatError::from)?,
            None => Bin::unit(),
        };
        if self.oracle_budget == Some(0) || self.corner_exact_limit == Some(0) || self.corner_state_limit == Some(0) {
            return Err(HarnessError::Spec("budgets and limits must be positive".into()));
        }
        if let Some(&n) = self.n.iter().find(|&&n| n > MAX_GENERATED_ITEMS) {
            return Err(HarnessError::Spec(format!("n = {n} exceeds {MAX_GENERATED_ITEMS}")));
        }
        let total = (self.n.len() as u128) * (self.families.len() as u128) * (self.per_cell as u128);
        if total > MAX_CORPUS_INSTANCES as u128 {
            return Err(HarnessError::Spec(format!("{total} instances exceed {MAX_CORPUS_INSTANCES}")));
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut seed = self.seed;
        for &n in &self.n {
            for &family in &self.families {
                for _ in 0..self.per_cell {
                    out.push(InstanceSpec {
                        seed,
                        n,
                        family,
                        profit: self.profit.unwrap_or(family.default_profit()),
                        bin: bin.clone(),
                        schedule: schedule.clone(),
                    });
                    seed = seed.checked_add(1).ok_or_else(|| HarnessError::Spec("seed overflow".into()))?;
                }
            }
        }
        Ok(out)
    }

    pub fn config(&self) -> CorpusConfig {
        CorpusConfig {
            oracle_budget: self.oracle_budget.unwrap_or(DEFAULT_BUDGET),
            override_guard: self.override_guard,
            corner_state_limit: self.corner_state_limit,
            corner_exact_limit: self.corner_exact_limit.unwrap_or(DEFAULT_CORNER_EXACT_LIMIT),
        }
    }

    pub fn run(&self) -> Result<CorpusReport, HarnessError> {
        Ok(run_corpus(&self.instances()?, &self.algorithms, &self.config()))
    }
}
