//! Packing small squares into a few bins with a long side.
//!
//! The pipeline guesses the optimum `O` on a geometric grid, rounds profits
//! down to powers of `1 + eps` (in units of `eps O / n`), guesses how much
//! profit each profit class contributes through a tuple `(k_1, ..., k_h)`,
//! reduces the sides in each class by linear grouping, guesses how many
//! squares of each class go to each bin, and finally packs every bin as a
//! strip along its long side, cutting the strip back to the bin when it
//! overshoots slightly.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{total_area, Bin, Packing, Placement, Square};
use crate::scalar::Scalar;
use crate::shelf::{cut_to_shorter, greedy_append, nfdh};

/// Squares sharing one rounded profit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitClass {
    /// Exponent `e` of the rounded scaled profit `(1 + eps)^e`.
    pub class_index: u32,
    /// `(1 + eps)^e * eps O / n`, in the units of the input profits.
    pub rounded_profit: Scalar,
    /// Sorted by non-decreasing side, ties by id.
    pub members: Vec<Square>,
}

/// One point of the guess tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessState {
    pub o_estimate: Scalar,
    pub tuple: Vec<u64>,
    pub selected: Vec<Square>,
    /// `per_bin_counts[i][j]`: squares of class `i` sent to bin `j`.
    pub per_bin_counts: Vec<Vec<u64>>,
}

/// Bins of one large-resource instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinFamily {
    pub bins: Vec<Bin>,
    pub epsilon: Scalar,
}

impl BinFamily {
    pub fn new(bins: Vec<Bin>, epsilon: Scalar) -> Self {
        BinFamily { bins, epsilon }
    }

    /// `max / min >= eps^-4` for bin `j`.
    pub fn qualifies(&self, j: usize) -> bool {
        let b = &self.bins[j];
        b.long_side() * self.epsilon.pow(4) >= *b.short_side()
    }

    pub fn all_qualify(&self) -> bool {
        (0..self.bins.len()).all(|j| self.qualifies(j))
    }
}

/// `p_max (1 + eps)^i` for `0 <= i <= 1 + log_{1+eps} n`.
pub fn guess_opt_candidates(items: &[Square], epsilon: &Scalar) -> Vec<Scalar> {
    let Some(p_max) = items.iter().map(|s| s.profit.clone()).max() else {
        return Vec::new();
    };
    let n = Scalar::from_int(items.len() as i64);
    let ratio = Scalar::one() + epsilon;
    let mut out = vec![p_max.clone()];
    // i is admissible while (1 + eps)^(i - 1) <= n
    let mut power_before = Scalar::one();
    let mut value = p_max;
    while power_before <= n {
        value = &value * &ratio;
        out.push(value.clone());
        power_before = &power_before * &ratio;
    }
    out
}

/// Drops squares with profit at most `eps O / n` and groups the rest by
/// their scaled profit rounded down to a power of `1 + eps`. Classes are
/// returned by decreasing profit.
pub fn round_profits(items: &[Square], o_estimate: &Scalar, epsilon: &Scalar) -> Vec<ProfitClass> {
    if items.is_empty() || !o_estimate.is_positive() {
        return Vec::new();
    }
    let unit = epsilon * o_estimate / Scalar::from_int(items.len() as i64);
    let ratio = Scalar::one() + epsilon;
    let mut groups: BTreeMap<u32, Vec<Square>> = BTreeMap::new();
    let mut powers: Vec<Scalar> = vec![Scalar::one()];
    for s in items.iter().filter(|s| s.profit > unit) {
        let scaled = &s.profit / &unit;
        let mut e = 0usize;
        loop {
            if powers.len() <= e + 1 {
                let next = &powers[powers.len() - 1] * &ratio;
                powers.push(next);
            }
            if powers[e + 1] > scaled {
                break;
            }
            e += 1;
        }
        groups.entry(e as u32).or_default().push(s.clone());
    }
    groups
        .into_iter()
        .rev()
        .map(|(e, mut members)| {
            members.sort_by(|a, b| a.side.cmp(&b.side).then_with(|| a.id.cmp(&b.id)));
            ProfitClass {
                class_index: e,
                rounded_profit: &powers[e as usize] * &unit,
                members,
            }
        })
        .collect()
}

/// Number of `g`-tuples of non-negative integers summing to `d`:
/// `C(d + g - 1, g - 1)`.
pub fn count_tuples(g: u64, d: u64) -> BigUint {
    assert!(g >= 1, "tuples need at least one coordinate");
    let k = g - 1;
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * BigUint::from(d + i) / BigUint::from(i);
    }
    acc
}

/// Squares of each class selected by the tuple: for a cheap class the
/// longest side-increasing prefix whose profit stays within
/// `k_i eps^2 O / h`, for an expensive class the shortest prefix exceeding
/// it (nothing when `k_i = 0`).
pub fn select_by_tuple(classes: &[ProfitClass], tuple: &[u64], o_estimate: &Scalar, epsilon: &Scalar) -> Vec<Square> {
    assert_eq!(classes.len(), tuple.len(), "one tuple entry per class");
    let h = classes.len() as i64;
    let mut out = Vec::new();
    for (class, &k) in classes.iter().zip(tuple) {
        let m = prefix_len(class, k, o_estimate, epsilon, h);
        out.extend(class.members[..m].iter().cloned());
    }
    out
}

fn prefix_len(class: &ProfitClass, k: u64, o_estimate: &Scalar, epsilon: &Scalar, h: i64) -> usize {
    let g = class.members.len();
    let a = &class.rounded_profit;
    let budget = Scalar::from_int(k as i64) * epsilon.square() * o_estimate / Scalar::from_int(h);
    let fit = (&budget / a).floor_u64() as usize;
    let cheap = *a <= epsilon * o_estimate / Scalar::from_int(h);
    let m = if cheap {
        fit
    } else if k == 0 {
        0
    } else {
        fit + 1
    };
    m.min(g)
}

/// Distinct prefix lengths a class can take, each with the smallest `k`
/// producing it (and `k <= max_k`).
fn prefix_options(class: &ProfitClass, o_estimate: &Scalar, epsilon: &Scalar, h: i64, max_k: u64) -> Vec<(usize, u64)> {
    let a = &class.rounded_profit;
    let unit = epsilon.square() * o_estimate / Scalar::from_int(h);
    let cheap = *a <= epsilon * o_estimate / Scalar::from_int(h);
    let mut out = vec![(0usize, 0u64)];
    for m in 1..=class.members.len() {
        // smallest k whose budget admits m squares (cheap) or is exceeded
        // only by the m-th square (expensive)
        let need = if cheap { m } else { m - 1 };
        let k = (Scalar::from_int(need as i64) * a / &unit).ceil_u64().max(1);
        if k > max_k {
            break;
        }
        if prefix_len(class, k, o_estimate, epsilon, h) == m {
            out.push((m, k));
        }
    }
    out
}

/// Output of [`linear_grouping`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedClass {
    pub class: ProfitClass,
    pub discarded: Vec<Square>,
}

impl GroupedClass {
    pub fn distinct_sides(&self) -> usize {
        self.class.members.iter().map(|s| &s.side).collect::<BTreeSet<_>>().len()
    }
}

/// Linear grouping with `t = 1 + ceil(1/eps)` groups.
///
/// Groups `A_1 .. A_{t-1}` hold `floor(g/t)` squares each in side order and
/// `A_t` holds the rest. `A_{t-1}` is discarded and every square of `A_i`,
/// `i < t - 1`, takes the smallest side of `A_{i+1}`. Ids and profits are
/// kept.
pub fn linear_grouping(class: &ProfitClass, epsilon: &Scalar) -> GroupedClass {
    let t = 1 + epsilon.recip().ceil_u64() as usize;
    let g = class.members.len();
    let q = g / t;
    if q == 0 {
        return GroupedClass { class: class.clone(), discarded: Vec::new() };
    }
    let mut members = Vec::with_capacity(g - q);
    for grp in 0..t - 2 {
        let next_min = &class.members[(grp + 1) * q].side;
        for s in &class.members[grp * q..(grp + 1) * q] {
            members.push(Square { side: next_min.clone(), ..s.clone() });
        }
    }
    let discarded = class.members[(t - 2) * q..(t - 1) * q].to_vec();
    members.extend(class.members[(t - 1) * q..].iter().cloned());
    GroupedClass {
        class: ProfitClass { members, ..class.clone() },
        discarded,
    }
}

/// Per-bin count options for one class of `k` squares split over `c` bins.
///
/// Small classes (`k <= c / (eps (1 + eps))`) get every exact split. Larger
/// ones get all vectors with total at most `k` whose entries come from the
/// grid `floor((1 + eps)^x eps k / c)`, `x >= 1`, together with every value
/// up to `ceil(1/eps^2)` and `k` itself; the small values are needed so that
/// counts below the start of the grid can still be matched.
pub fn guess_bin_counts(k: u64, c: usize, epsilon: &Scalar) -> Vec<Vec<u64>> {
    assert!(c >= 1, "need at least one bin");
    let exact_limit = Scalar::from_int(c as i64) / (epsilon * (Scalar::one() + epsilon));
    let values: Vec<u64> = if Scalar::from_int(k as i64) <= exact_limit {
        (0..=k).collect()
    } else {
        let mut v: BTreeSet<u64> = (0..=k.min(epsilon.square().recip().ceil_u64())).collect();
        v.insert(k);
        let base = epsilon * Scalar::from_int(k as i64) / Scalar::from_int(c as i64);
        let ratio = Scalar::one() + epsilon;
        let mut cur = &base * &ratio;
        loop {
            let f = cur.floor_u64();
            if f > k {
                break;
            }
            v.insert(f);
            cur = &cur * &ratio;
        }
        v.into_iter().collect()
    };
    let exact = Scalar::from_int(k as i64) <= exact_limit;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(c);
    splits(&values, c, k, exact, &mut cur, &mut out);
    out
}

fn splits(values: &[u64], c: usize, left: u64, exact: bool, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == c {
        if !exact || left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for &v in values {
        if v > left {
            break;
        }
        cur.push(v);
        splits(values, c, left - v, exact, cur, out);
        cur.pop();
    }
}

/// Limits on the guess tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasConfig {
    /// Tuples per `O` guess before switching to a random subsample.
    pub tuple_cap: usize,
    /// Count matrices per selection before truncating.
    pub matrix_cap: usize,
    pub seed: u64,
}

impl Default for PtasConfig {
    fn default() -> Self {
        PtasConfig { tuple_cap: 1_000_000, matrix_cap: 20_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GuessStats {
    pub opt_candidates: usize,
    /// Distinct selections examined per tuple sweep, summed over `O`.
    pub tuples: u64,
    /// `sum over O of count_tuples(h + 1, floor(h / eps^2))`.
    pub tuple_space: BigUint,
    pub distinct_selections: u64,
    pub matrices: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub sampled: bool,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeResourceResult {
    pub packings: Vec<Packing>,
    pub stats: GuessStats,
    /// No assignment survived and the greedy was used instead.
    pub fallback: bool,
}

impl LargeResourceResult {
    pub fn profit(&self) -> Scalar {
        self.packings.iter().map(Packing::profit).sum()
    }
}

/// Best packing of `items` into the bins of `family` found by the guess
/// tree; falls back to [`greedy_append`] when every assignment is rejected.
pub fn pack_large_resource(items: &[Square], family: &BinFamily, config: &PtasConfig) -> LargeResourceResult {
    let eps = &family.epsilon;
    let empty: Vec<Packing> = family.bins.iter().map(|b| Packing::empty(b.clone())).collect();
    let mut stats = GuessStats::default();
    if items.is_empty() || family.bins.is_empty() {
        return LargeResourceResult { packings: empty, stats, fallback: false };
    }
    let originals: HashMap<&str, &Square> = items.iter().map(|s| (s.id.as_str(), s)).collect();
    let capacity: Scalar = family.bins.iter().map(Bin::area).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut best: Option<(Scalar, Vec<Packing>)> = None;
    let mut strip_cache: HashMap<(usize, Vec<String>), Option<Packing>> = HashMap::new();

    let candidates = guess_opt_candidates(items, eps);
    stats.opt_candidates = candidates.len();
    for o in &candidates {
        let classes = round_profits(items, o, eps);
        if classes.is_empty() {
            continue;
        }
        let h = classes.len() as i64;
        let max_k = (Scalar::from_int(h) / eps.square()).floor_u64();
        stats.tuple_space += count_tuples(h as u64 + 1, max_k);
        let options: Vec<Vec<(usize, u64)>> = classes.iter().map(|c| prefix_options(c, o, eps, h, max_k)).collect();
        let combos = sweep_tuples(&options, max_k, config.tuple_cap, &mut rng, &mut stats);
        for combo in combos {
            let mut selected: Vec<Square> = Vec::new();
            for (class, &m) in classes.iter().zip(&combo) {
                selected.extend(class.members[..m].iter().cloned());
            }
            let mut key: Vec<String> = selected.iter().map(|s| s.id.clone()).collect();
            key.sort();
            if selected.is_empty() || !seen.insert(key) || total_area(&selected) > capacity {
                continue;
            }
            stats.distinct_selections += 1;
            let chosen: Vec<ProfitClass> = classes
                .iter()
                .zip(&combo)
                .filter(|(_, &m)| m > 0)
                .map(|(c, &m)| ProfitClass { members: c.members[..m].to_vec(), ..c.clone() })
                .collect();
            // The selection is tried as is and after linear grouping; the
            // grouped variant has fewer sizes and packs whenever the
            // original does, at the price of the discarded group.
            let grouped: Vec<ProfitClass> = chosen.iter().map(|c| linear_grouping(c, eps).class).collect();
            assign_and_pack(&chosen, family, config, &originals, &mut strip_cache, &mut stats, &mut best);
            if grouped != chosen {
                assign_and_pack(&grouped, family, config, &originals, &mut strip_cache, &mut stats, &mut best);
            }
        }
    }

    match best {
        Some((_, packings)) => LargeResourceResult { packings, stats, fallback: false },
        None => {
            let g = greedy_append(items, &family.bins, &Scalar::zero());
            LargeResourceResult { packings: g.packings, stats, fallback: true }
        }
    }
}

/// Prefix-length combinations with total minimal `k` at most `max_k`.
fn sweep_tuples(
    options: &[Vec<(usize, u64)>],
    max_k: u64,
    cap: usize,
    rng: &mut ChaCha8Rng,
    stats: &mut GuessStats,
) -> Vec<Vec<usize>> {
    let space: f64 = options.iter().map(|o| o.len() as f64).product();
    let mut out = Vec::new();
    if space <= cap as f64 {
        let mut cur = Vec::with_capacity(options.len());
        enumerate_combos(options, max_k, &mut cur, &mut out);
    } else {
        log::warn!("tuple space of about {space:.0} exceeds the cap {cap}; sampling {cap} tuples");
        stats.sampled = true;
        let mut uniq = BTreeSet::new();
        for _ in 0..cap.saturating_mul(4) {
            if uniq.len() >= cap {
                break;
            }
            let mut total = 0;
            let mut combo = Vec::with_capacity(options.len());
            for opts in options {
                let (m, k) = opts[rng.gen_range(0..opts.len())];
                total += k;
                combo.push(m);
            }
            if total <= max_k {
                uniq.insert(combo);
            }
        }
        out = uniq.into_iter().collect();
    }
    stats.tuples += out.len() as u64;
    out
}

fn enumerate_combos(options: &[Vec<(usize, u64)>], budget: u64, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let i = cur.len();
    if i == options.len() {
        out.push(cur.clone());
        return;
    }
    for &(m, k) in &options[i] {
        if k > budget {
            break;
        }
        cur.push(m);
        enumerate_combos(options, budget - k, cur, out);
        cur.pop();
    }
}

/// Tries every count matrix for the grouped selection and keeps the best
/// accepted assignment in `best`.
fn assign_and_pack(
    classes: &[ProfitClass],
    family: &BinFamily,
    config: &PtasConfig,
    originals: &HashMap<&str, &Square>,
    strip_cache: &mut HashMap<(usize, Vec<String>), Option<Packing>>,
    stats: &mut GuessStats,
    best: &mut Option<(Scalar, Vec<Packing>)>,
) {
    let c = family.bins.len();
    let eps = &family.epsilon;
    let options: Vec<Vec<Vec<u64>>> = classes
        .iter()
        .map(|cl| guess_bin_counts(cl.members.len() as u64, c, eps))
        .collect();
    let mut load = vec![Scalar::zero(); c];
    let mut matrix: Vec<Vec<u64>> = Vec::with_capacity(classes.len());
    let mut emitted = 0usize;
    let mut visit = |matrix: &Vec<Vec<u64>>, stats: &mut GuessStats| {
        stats.matrices += 1;
        let mut bins_items: Vec<Vec<Square>> = vec![Vec::new(); c];
        for (cl, row) in classes.iter().zip(matrix) {
            let mut next = 0;
            for (j, &cnt) in row.iter().enumerate() {
                let cnt = cnt as usize;
                bins_items[j].extend(cl.members[next..next + cnt].iter().cloned());
                next += cnt;
            }
        }
        let mut packings = Vec::with_capacity(c);
        for (j, grouped) in bins_items.iter().enumerate() {
            let mut key: Vec<String> = grouped.iter().map(|s| s.id.clone()).collect();
            key.sort();
            let packed = strip_cache
                .entry((j, key))
                .or_insert_with(|| pack_bin(grouped, &family.bins[j], eps, originals))
                .clone();
            match packed {
                Some(p) => packings.push(p),
                None => {
                    stats.rejected += 1;
                    return;
                }
            }
        }
        stats.accepted += 1;
        let profit: Scalar = packings.iter().map(Packing::profit).sum();
        if best.as_ref().is_none_or(|(b, _)| profit > *b) {
            *best = Some((profit, packings));
        }
    };
    matrices(classes, &options, family, &mut load, &mut matrix, &mut emitted, config.matrix_cap, stats, &mut visit);
}

#[allow(clippy::too_many_arguments)]
fn matrices(
    classes: &[ProfitClass],
    options: &[Vec<Vec<u64>>],
    family: &BinFamily,
    load: &mut Vec<Scalar>,
    matrix: &mut Vec<Vec<u64>>,
    emitted: &mut usize,
    cap: usize,
    stats: &mut GuessStats,
    visit: &mut impl FnMut(&Vec<Vec<u64>>, &mut GuessStats),
) {
    let i = matrix.len();
    if i == classes.len() {
        if *emitted >= cap {
            if !stats.truncated {
                log::warn!("count matrices truncated at {cap}");
            }
            stats.truncated = true;
            return;
        }
        *emitted += 1;
        visit(matrix, stats);
        return;
    }
    let members = &classes[i].members;
    for row in &options[i] {
        // area pruning: the squares sent to a bin must fit its area
        let mut next = 0;
        let mut added = Vec::with_capacity(row.len());
        let mut ok = true;
        for (j, &cnt) in row.iter().enumerate() {
            let a = total_area(&members[next..next + cnt as usize]);
            next += cnt as usize;
            if &load[j] + &a > family.bins[j].area() {
                ok = false;
            }
            added.push(a);
        }
        if !ok {
            continue;
        }
        for (j, a) in added.iter().enumerate() {
            load[j] += a;
        }
        matrix.push(row.clone());
        matrices(classes, options, family, load, matrix, emitted, cap, stats, visit);
        matrix.pop();
        for (j, a) in added.iter().enumerate() {
            load[j] -= a;
        }
        if *emitted >= cap && stats.truncated {
            return;
        }
    }
}

/// NFDH along the long side of `bin`, cut back to the bin when the strip
/// overshoots; returns the packing with the original square sizes.
fn pack_bin(grouped: &[Square], bin: &Bin, epsilon: &Scalar, originals: &HashMap<&str, &Square>) -> Option<Packing> {
    if grouped.is_empty() {
        return Some(Packing::empty(bin.clone()));
    }
    let tall = bin.height >= bin.width;
    let frame = if tall { bin.clone() } else { bin.transposed() };
    let (w, long) = (&frame.width, &frame.height);
    let strip = nfdh(grouped, w, None);
    if !strip.leftovers.is_empty() {
        return None;
    }
    let limit = (Scalar::one() + epsilon) * long + w * Scalar::from_int(2) / epsilon.square();
    if strip.used_height > limit {
        return None;
    }
    let used = strip.used_height.clone();
    let in_frame = if used <= *long {
        Packing::new(frame.clone(), strip.placements)
    } else {
        let strip_bin = Bin { width: w.clone(), height: used };
        let cut = cut_to_shorter(&Packing::new(strip_bin, strip.placements), long, epsilon).ok()?;
        cut.packing
    };
    let restored: Vec<Placement> = in_frame
        .placements
        .into_iter()
        .map(|p| Placement::new((*originals[p.square.id.as_str()]).clone(), p.x, p.y))
        .collect();
    let packing = Packing::new(frame, restored);
    Some(if tall { packing } else { packing.transposed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn sq(id: &str, side: &str, profit: &str) -> Square {
        Square::new(id, q(side), q(profit)).unwrap()
    }

    #[test]
    fn single_item_grid() {
        let c = guess_opt_candidates(&[sq("a", "0.1", "7")], &q("0.5"));
        assert_eq!(c, vec![q("7"), q("21/2")]);
        assert!(guess_opt_candidates(&[], &q("0.5")).is_empty());
    }

    #[test]
    fn grid_size_bound() {
        for n in [2usize, 10, 100] {
            for eps in ["1/2", "1/4", "1/8"] {
                let items: Vec<Square> = (0..n).map(|i| sq(&format!("i{i}"), "0.01", "1")).collect();
                let e = q(eps);
                let len = guess_opt_candidates(&items, &e).len() as f64;
                let bound = 2.0 / e.to_f64() * (n as f64).ln() + 2.0;
                assert!(len <= bound, "n={n} eps={eps}: {len} > {bound}");
            }
        }
    }

    #[test]
    fn rounding_rule() {
        let classes = round_profits(&[sq("a", "0.1", "3")], &q("1"), &q("1"));
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].class_index, 1);
        assert_eq!(classes[0].rounded_profit, q("2"));
        let eps = q("1/2");
        let tiny = &eps * q("10") / q("2") * q("0.5");
        let items = [sq("a", "0.1", "10"), Square::new("b", q("0.1"), tiny).unwrap()];
        let classes = round_profits(&items, &q("10"), &eps);
        let kept: usize = classes.iter().map(|c| c.members.len()).sum();
        assert_eq!(kept, 1);
    }

    #[test]
    fn rounded_profit_brackets_true_profit() {
        let eps = q("1/4");
        let items: Vec<Square> = (1..20).map(|i| sq(&format!("i{i}"), "0.01", &format!("{}", i * i))).collect();
        for o in guess_opt_candidates(&items, &eps) {
            for c in round_profits(&items, &o, &eps) {
                for m in &c.members {
                    assert!(c.rounded_profit <= m.profit);
                    assert!(m.profit <= (Scalar::one() + &eps) * &c.rounded_profit);
                }
            }
        }
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(count_tuples(2, 3), BigUint::from(4u32));
        assert_eq!(count_tuples(1, 17), BigUint::from(1u32));
        assert_eq!(count_tuples(3, 2), BigUint::from(6u32));
    }

    #[test]
    fn selection_rules() {
        let members = vec![sq("a", "0.1", "1"), sq("b", "0.2", "1"), sq("c", "0.3", "1")];
        // eps = 1/2, O = 10, h = 1: cheap threshold 5, unit 2.5
        let class = ProfitClass { class_index: 0, rounded_profit: q("1"), members };
        let sel = select_by_tuple(std::slice::from_ref(&class), &[1], &q("10"), &q("1/2"));
        let ids: Vec<&str> = sel.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert!(select_by_tuple(std::slice::from_ref(&class), &[0], &q("10"), &q("1/2")).is_empty());
        let pricey = ProfitClass { rounded_profit: q("6"), ..class };
        assert!(select_by_tuple(std::slice::from_ref(&pricey), &[0], &q("10"), &q("1/2")).is_empty());
        assert_eq!(select_by_tuple(std::slice::from_ref(&pricey), &[1], &q("10"), &q("1/2")).len(), 1);
        assert_eq!(select_by_tuple(std::slice::from_ref(&pricey), &[3], &q("10"), &q("1/2")).len(), 2);
    }

    #[test]
    fn prefix_options_match_the_rule() {
        let members: Vec<Square> = (0..6).map(|i| sq(&format!("m{i}"), &format!("0.0{}", i + 1), "1")).collect();
        for rp in ["1", "3", "7/2"] {
            let class = ProfitClass { class_index: 0, rounded_profit: q(rp), members: members.clone() };
            let (o, eps, h) = (q("10"), q("1/2"), 2);
            let opts = prefix_options(&class, &o, &eps, h, 8);
            let mut by_k = BTreeMap::new();
            for k in 0..=8u64 {
                by_k.entry(prefix_len(&class, k, &o, &eps, h)).or_insert(k);
            }
            let expect: Vec<(usize, u64)> = by_k.into_iter().collect();
            assert_eq!(opts, expect, "rounded profit {rp}");
        }
    }

    #[test]
    fn grouping_examples() {
        let members = vec![sq("a", "0.1", "1"), sq("b", "0.2", "1"), sq("c", "0.3", "1"), sq("d", "0.4", "1")];
        let class = ProfitClass { class_index: 0, rounded_profit: q("1"), members };
        let g = linear_grouping(&class, &q("1"));
        let ids: Vec<&str> = g.discarded.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert!(g.distinct_sides() <= 2);

        let eps = q("1/2"); // t = 3
        let members: Vec<Square> = (0..9).map(|i| sq(&format!("u{i}"), &format!("0.{}", i + 1), "1")).collect();
        let class = ProfitClass { class_index: 0, rounded_profit: q("1"), members };
        let g = linear_grouping(&class, &eps);
        assert_eq!(g.discarded.len(), 3);
        assert_eq!(g.class.members.len(), 6);
        assert!(g.class.members[..3].iter().all(|s| s.side == q("0.4")));
    }

    #[test]
    fn bin_count_examples() {
        let one = guess_bin_counts(5, 1, &q("1/2"));
        assert!(one.contains(&vec![5]));
        assert_eq!(guess_bin_counts(2, 2, &q("1/2")), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    fn compositions(k: u64, c: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == c {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=k {
            cur.push(v);
            compositions(k - v, c, cur, out);
            cur.pop();
        }
    }

    #[test]
    fn bin_count_sandwich_coverage() {
        for den in [2u64, 4] {
            let eps = Scalar::ratio(1, den as i64);
            for c in 1..=3usize {
                for k in 0..=20u64 {
                    let opts = guess_bin_counts(k, c, &eps);
                    let mut all = Vec::new();
                    compositions(k, c, &mut Vec::new(), &mut all);
                    for l in all {
                        // (1 - 1/den) l <= h  <=>  den h >= (den - 1) l
                        let ok = opts
                            .iter()
                            .any(|h| h.iter().zip(&l).all(|(&hv, &lv)| hv <= lv && den * hv >= (den - 1) * lv));
                        assert!(ok, "k={k} c={c} eps={eps} l={l:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn thin_bin_takes_everything() {
        let eps = q("1/2");
        let side = eps.pow(4) * q("0.5");
        let items: Vec<Square> = (0..4).map(|i| Square::new(format!("s{i}"), side.clone(), q("1")).unwrap()).collect();
        let family = BinFamily::new(vec![Bin::new(eps.pow(4), q("1")).unwrap()], eps);
        assert!(family.qualifies(0));
        let r = pack_large_resource(&items, &family, &PtasConfig::default());
        assert_eq!(r.profit(), q("4"));
        assert!(r.packings[0].is_feasible());
        assert!(!r.fallback);
    }

    #[test]
    fn empty_input() {
        let family = BinFamily::new(vec![Bin::unit()], q("1/4"));
        let r = pack_large_resource(&[], &family, &PtasConfig::default());
        assert_eq!(r.profit(), q("0"));
    }

    #[test]
    fn wide_bins_are_packed_transposed() {
        let eps = q("1/4");
        let items: Vec<Square> = (0..6).map(|i| sq(&format!("s{i}"), "1/16", "1")).collect();
        let family = BinFamily::new(vec![Bin::new(q("1"), q("1/16")).unwrap(), Bin::new(q("1/8"), q("1/4")).unwrap()], eps);
        let r = pack_large_resource(&items, &family, &PtasConfig::default());
        for p in &r.packings {
            assert!(p.is_feasible());
        }
        assert_eq!(r.profit(), q("6"));
    }
}
