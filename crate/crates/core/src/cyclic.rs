//! Cyclic orders of `[n]`, their intervals, and the counting machinery built
//! on representable pairs.
//!
//! A cyclic order is stored with element 1 anchored at position 0. Rotations
//! are therefore identified while reflections stay distinct, which gives
//! exactly `(n-1)!` orders.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::bounds::representation_multiplicity;
use crate::error::{Error, Result};
use crate::report::{decimal, Check};
use crate::setcore::{same_ground, Family, KSet};
use crate::weights::{intersection_profile, omega_cross};

/// Largest `n` accepted by [`enumerate_cyclic`].
pub const ENUMERATE_LIMIT: u32 = 10;
/// Largest `n` for which sweeps visit every cyclic order.
pub const SWEEP_LIMIT: u32 = 8;
/// Number of orders drawn when a sweep falls back to sampling.
pub const SAMPLE_COUNT: usize = 5040;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicPerm {
    order: Vec<u32>,
    pos: Vec<u32>,
}

impl CyclicPerm {
    /// Accepts any rotation of the order; stores the one starting at 1.
    pub fn new(order: Vec<u32>) -> Result<Self> {
        let n = order.len() as u32;
        if n < 2 {
            return Err(Error::Hypothesis(format!("cyclic orders need n >= 2, got {n}")));
        }
        let mut seen = vec![false; n as usize + 1];
        for &e in &order {
            if e == 0 || e > n || seen[e as usize] {
                return Err(Error::BadElement { element: e as i64, n });
            }
            seen[e as usize] = true;
        }
        let shift = order.iter().position(|&e| e == 1).unwrap_or(0);
        let mut order = order;
        order.rotate_left(shift);
        Ok(Self::from_anchored(order))
    }

    fn from_anchored(order: Vec<u32>) -> Self {
        let mut pos = vec![0u32; order.len() + 1];
        for (i, &e) in order.iter().enumerate() {
            pos[e as usize] = i as u32;
        }
        Self { order, pos }
    }

    pub fn identity(n: u32) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    pub fn n(&self) -> u32 {
        self.order.len() as u32
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Element at position `i` (taken modulo `n`).
    pub fn at(&self, i: i64) -> u32 {
        self.order[i.rem_euclid(self.n() as i64) as usize]
    }

    pub fn position(&self, e: u32) -> u32 {
        self.pos[e as usize]
    }

    fn interval_mask(&self, start: u32, len: u32) -> u64 {
        (0..len).fold(0u64, |acc, j| acc | 1 << self.at(start as i64 + j as i64))
    }
}

/// All `(n-1)!` cyclic orders, lexicographic in the tail after 1.
pub fn enumerate_cyclic(n: u32) -> Result<impl Iterator<Item = CyclicPerm>> {
    if n < 2 {
        return Err(Error::Hypothesis(format!("cyclic orders need n >= 2, got {n}")));
    }
    if n > ENUMERATE_LIMIT {
        return Err(Error::TooLarge { what: "n for cyclic enumeration", value: n as u64, limit: ENUMERATE_LIMIT as u64 });
    }
    let mut tail: Option<Vec<u32>> = Some((2..=n).collect());
    Ok(std::iter::from_fn(move || {
        let cur = tail.take()?;
        let mut next = cur.clone();
        if next_permutation(&mut next) {
            tail = Some(next);
        }
        let mut order = Vec::with_capacity(cur.len() + 1);
        order.push(1);
        order.extend(cur);
        Some(CyclicPerm::from_anchored(order))
    }))
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A uniformly random cyclic order.
pub fn random_cyclic(n: u32, rng: &mut ChaCha8Rng) -> CyclicPerm {
    let mut tail: Vec<u32> = (2..=n).collect();
    tail.shuffle(rng);
    let mut order = vec![1];
    order.extend(tail);
    CyclicPerm::from_anchored(order)
}

/// Which cyclic orders a verification visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Sweep {
    /// Only the order `1, 2, ..., n`.
    Identity,
    /// Every order when `n <= SWEEP_LIMIT`, else a seeded sample.
    All { seed: u64 },
}

/// The orders a sweep visits, and whether that is a sample.
pub fn sweep_orders(n: u32, sweep: Sweep) -> Result<(Vec<CyclicPerm>, bool)> {
    match sweep {
        Sweep::Identity => Ok((vec![CyclicPerm::identity(n)?], false)),
        Sweep::All { .. } if n <= SWEEP_LIMIT => Ok((enumerate_cyclic(n)?.collect(), false)),
        Sweep::All { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(((0..SAMPLE_COUNT).map(|_| random_cyclic(n, &mut rng)).collect(), true))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval<'a> {
    perm: &'a CyclicPerm,
    start: u32,
    len: u32,
}

impl<'a> Interval<'a> {
    pub fn new(perm: &'a CyclicPerm, start: u32, len: u32) -> Result<Self> {
        let n = perm.n();
        if len < 1 || len >= n {
            return Err(Error::BadLength { length: len, n });
        }
        Ok(Self { perm, start: start % n, len })
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn set(&self) -> KSet {
        KSet::raw(self.perm.n(), self.perm.interval_mask(self.start, self.len))
    }

    pub fn left(&self) -> u32 {
        self.perm.at(self.start as i64)
    }

    pub fn right(&self) -> u32 {
        self.perm.at(self.start as i64 + self.len as i64 - 1)
    }
}

/// The `n` intervals of length `k`, one starting at each position.
pub fn intervals_of_length(p: &CyclicPerm, k: u32) -> Result<Vec<Interval<'_>>> {
    (0..p.n()).map(|s| Interval::new(p, s, k)).collect()
}

/// The interval equal to `s` as a set, if `s` is consecutive along `p`.
pub fn interval_of<'a>(p: &'a CyclicPerm, s: &KSet) -> Result<Option<Interval<'a>>> {
    if s.n() != p.n() {
        return Err(Error::GroundMismatch { left: p.n(), right: s.n() });
    }
    Ok(interval_of_mask(p, s.bits()).map(|(start, len)| Interval { perm: p, start, len }))
}

/// `(start, len)` of the interval with this mask; `None` if not a proper interval.
fn interval_of_mask(p: &CyclicPerm, bits: u64) -> Option<(u32, u32)> {
    let n = p.n();
    let len = bits.count_ones();
    if len == 0 || len >= n {
        return None;
    }
    // an interval has exactly one position whose predecessor is outside it
    let mut start = None;
    for i in 0..n {
        let inside = bits >> p.at(i as i64) & 1 == 1;
        let prev_inside = bits >> p.at(i as i64 - 1) & 1 == 1;
        if inside && !prev_inside {
            if start.is_some() {
                return None;
            }
            start = Some(i);
        }
    }
    start.map(|s| (s, len))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepresentablePair {
    pub a: KSet,
    pub b: KSet,
    pub meet: KSet,
}

/// Whether `(a, b)` is representable on `p`: both are intervals, and `a ∩ b`
/// is an interval sharing the right endpoint of `a` and the left endpoint of `b`.
pub fn is_representable(p: &CyclicPerm, a: u64, b: u64) -> bool {
    let (Some((sa, la)), Some((sb, _))) = (interval_of_mask(p, a), interval_of_mask(p, b)) else {
        return false;
    };
    let Some((sm, lm)) = interval_of_mask(p, a & b) else {
        return false;
    };
    let right = |s: u32, l: u32| p.at(s as i64 + l as i64 - 1);
    right(sm, lm) == right(sa, la) && p.at(sm as i64) == p.at(sb as i64)
}

pub fn representable_pairs(p: &CyclicPerm, a: &Family, b: &Family) -> Result<Vec<RepresentablePair>> {
    same_ground(a, b)?;
    if a.n() != p.n() {
        return Err(Error::GroundMismatch { left: p.n(), right: a.n() });
    }
    let n = p.n();
    let on_cycle = |f: &Family| -> Vec<KSet> {
        f.members().iter().copied().filter(|s| interval_of_mask(p, s.bits()).is_some()).collect()
    };
    let (ia, ib) = (on_cycle(a), on_cycle(b));
    let mut out = Vec::new();
    for x in &ia {
        for y in &ib {
            if is_representable(p, x.bits(), y.bits()) {
                out.push(RepresentablePair { a: *x, b: *y, meet: KSet::raw(n, x.bits() & y.bits()) });
            }
        }
    }
    Ok(out)
}

/// Meets of size `m` over the representable pairs of `p`.
pub fn interval_meet_family(p: &CyclicPerm, a: &Family, b: &Family, m: u32) -> Result<Family> {
    if m < 1 || m > a.k().min(b.k()) {
        return Err(Error::Hypothesis(format!("need 1 <= m <= min(k, l) = {}, got {m}", a.k().min(b.k()))));
    }
    let meets: BTreeSet<u64> =
        representable_pairs(p, a, b)?.into_iter().filter(|r| r.meet.len() == m).map(|r| r.meet.bits()).collect();
    Ok(Family::from_masks_unchecked(a.n(), m, meets.into_iter().collect()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KatonaReport {
    pub n: u32,
    pub k: u32,
    pub perms_checked: usize,
    pub sampled: bool,
    pub max_size: u32,
    pub maximum_families: usize,
    pub fixed_element_maxima: usize,
    pub uniqueness_required: bool,
    /// Maximum families on the identity order, as element lists.
    pub extremal: Vec<Vec<Vec<u32>>>,
    pub passed: bool,
}

/// Exhausts every intersecting family of k-intervals on the swept orders.
pub fn katona_verify(n: u32, k: u32, sweep: Sweep) -> Result<KatonaReport> {
    if k < 1 || n < 2 * k {
        return Err(Error::Hypothesis(format!("need n >= 2k >= 2, got n = {n}, k = {k}")));
    }
    if n > ENUMERATE_LIMIT {
        return Err(Error::TooLarge { what: "n for interval verification", value: n as u64, limit: ENUMERATE_LIMIT as u64 });
    }
    let (orders, sampled) = sweep_orders(n, sweep)?;
    let per_order: Vec<(u32, Vec<u64>, usize)> = orders
        .par_iter()
        .map(|p| {
            let masks: Vec<u64> = intervals_of_length(p, k).map(|v| v.iter().map(|i| i.set().bits()).collect())?;
            Ok(interval_maxima(&masks))
        })
        .collect::<Result<_>>()?;
    let max_size = per_order.iter().map(|r| r.0).max().unwrap_or(0);
    let mut maximum_families = 0;
    let mut fixed = 0;
    for (size, fams, fixed_here) in &per_order {
        if *size == max_size {
            maximum_families += fams.len();
            fixed += fixed_here;
        }
    }
    let identity = CyclicPerm::identity(n)?;
    let masks: Vec<u64> = intervals_of_length(&identity, k)?.iter().map(|i| i.set().bits()).collect();
    let (_, id_fams, _) = interval_maxima(&masks);
    let extremal = id_fams
        .iter()
        .map(|&sel| {
            let mut f: Vec<u64> = (0..n as usize).filter(|i| sel >> i & 1 == 1).map(|i| masks[i]).collect();
            f.sort_unstable();
            f.into_iter().map(|m| KSet::raw(n, m).elements()).collect()
        })
        .collect();
    let uniqueness_required = n > 2 * k;
    let passed = max_size == k && (!uniqueness_required || fixed == maximum_families);
    Ok(KatonaReport {
        n,
        k,
        perms_checked: orders.len(),
        sampled,
        max_size,
        maximum_families,
        fixed_element_maxima: fixed,
        uniqueness_required,
        extremal,
        passed,
    })
}

/// Largest intersecting selection of the given intervals: (size, selections, how many share an element).
fn interval_maxima(masks: &[u64]) -> (u32, Vec<u64>, usize) {
    let r = masks.len();
    let conflicts: Vec<u64> =
        (0..r).map(|i| (0..r).filter(|&j| masks[i] & masks[j] == 0).fold(0u64, |acc, j| acc | 1 << j)).collect();
    let mut best = 0u32;
    let mut sels = Vec::new();
    for sel in 1u64..1 << r {
        let ok = (0..r).all(|i| sel >> i & 1 == 0 || conflicts[i] & sel == 0);
        if !ok {
            continue;
        }
        let size = sel.count_ones();
        if size > best {
            best = size;
            sels.clear();
        }
        if size == best {
            sels.push(sel);
        }
    }
    let fixed = sels
        .iter()
        .filter(|&&sel| (0..r).filter(|i| sel >> i & 1 == 1).fold(u64::MAX, |acc, i| acc & masks[i]) != 0)
        .count();
    (best, sels, fixed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleCountReport {
    pub n: u32,
    pub k: u32,
    pub l: u32,
    pub m: u32,
    pub perms: usize,
    #[serde(with = "decimal")]
    pub pm_size: u128,
    #[serde(with = "decimal")]
    pub multiplicity: u128,
    #[serde(with = "decimal")]
    pub total: u128,
    #[serde(with = "decimal")]
    pub expected_total: u128,
    pub per_pair_ok: bool,
    /// First pair whose own census disagrees with the multiplicity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<PairCensus>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCensus {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub count: u64,
}

fn check_sweep_size(n: u32) -> Result<()> {
    if n > SWEEP_LIMIT {
        return Err(Error::TooLarge { what: "n for an all-orders sweep", value: n as u64, limit: SWEEP_LIMIT as u64 });
    }
    Ok(())
}

/// Counts, over every cyclic order, the representable pairs meeting in
/// exactly `m` elements, and compares with `|P_m|` times the per-pair
/// multiplicity. Also checks every pair's own census.
pub fn double_count_check(a: &Family, b: &Family, m: u32) -> Result<DoubleCountReport> {
    same_ground(a, b)?;
    let (n, k, l) = (a.n(), a.k(), b.k());
    check_sweep_size(n)?;
    if k >= n || l >= n {
        return Err(Error::Hypothesis(format!("member sizes must be below n = {n}")));
    }
    if m < 1 || m > k.min(l) {
        return Err(Error::Hypothesis(format!("need 1 <= m <= min(k, l) = {}, got {m}", k.min(l))));
    }
    let pairs: Vec<(u64, u64)> = a
        .members()
        .iter()
        .flat_map(|x| b.members().iter().map(move |y| (x.bits(), y.bits())))
        .filter(|(x, y)| (x & y).count_ones() == m)
        .collect();
    let orders: Vec<CyclicPerm> = enumerate_cyclic(n)?.collect();
    let census = orders
        .par_iter()
        .fold(
            || vec![0u64; pairs.len()],
            |mut acc, p| {
                for (i, &(x, y)) in pairs.iter().enumerate() {
                    if is_representable(p, x, y) {
                        acc[i] += 1;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; pairs.len()], |mut x, y| {
            x.iter_mut().zip(y).for_each(|(s, t)| *s += t);
            x
        });
    let multiplicity = representation_multiplicity(n, k, l, m)?;
    let total: u128 = census.iter().map(|&c| c as u128).sum();
    let pm_size = pairs.len() as u128;
    let expected_total = pm_size * multiplicity;
    let counterexample = census.iter().zip(&pairs).find(|(&c, _)| c as u128 != multiplicity).map(|(&c, &(x, y))| {
        PairCensus { a: KSet::raw(n, x).elements(), b: KSet::raw(n, y).elements(), count: c }
    });
    let per_pair_ok = counterexample.is_none();
    Ok(DoubleCountReport {
        n,
        k,
        l,
        m,
        perms: orders.len(),
        pm_size,
        multiplicity,
        total,
        expected_total,
        per_pair_ok,
        counterexample,
        passed: per_pair_ok && total == expected_total,
    })
}

/// Recovers `ω(A, B)` from the cyclic census alone: `Σ_m m · total_m / multiplicity_m`.
pub fn reconstruct_omega_cross(a: &Family, b: &Family) -> Result<u128> {
    let mut sum = 0u128;
    for m in 1..=a.k().min(b.k()) {
        let r = double_count_check(a, b, m)?;
        sum += m as u128 * (r.total / r.multiplicity);
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeetAudit {
    pub perms: usize,
    pub sampled: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// On each swept order and each `m`: meets of distinct representable pairs are
/// distinct, and for a cross-intersecting pair with `n >= k + l` the size-`m`
/// meets form an intersecting family of at most `m` intervals.
pub fn interval_meet_audit(a: &Family, b: &Family, sweep: Sweep) -> Result<MeetAudit> {
    same_ground(a, b)?;
    let (n, k, l) = (a.n(), a.k(), b.k());
    let (orders, sampled) = sweep_orders(n, sweep)?;
    let guaranteed = crate::setcore::is_cross_intersecting(a, b)? && n >= k + l;
    let mut distinct_fail = None;
    let mut size_fail = None;
    let mut inter_fail = None;
    for p in &orders {
        let reps = representable_pairs(p, a, b)?;
        let meets: BTreeSet<u64> = reps.iter().map(|r| r.meet.bits()).collect();
        if meets.len() != reps.len() && distinct_fail.is_none() {
            distinct_fail = Some(json!({ "order": p.order() }));
        }
        for m in 1..=k.min(l) {
            let fam = interval_meet_family(p, a, b, m)?;
            if guaranteed && fam.len() > m as usize && size_fail.is_none() {
                size_fail = Some(json!({ "order": p.order(), "m": m, "meets": fam.to_lists() }));
            }
            if guaranteed && !crate::setcore::is_intersecting(&fam) && inter_fail.is_none() {
                inter_fail = Some(json!({ "order": p.order(), "m": m, "meets": fam.to_lists() }));
            }
        }
    }
    let checks = vec![
        Check::new("distinct-meets", distinct_fail.is_none(), json!({ "perms": orders.len() }))
            .with_counterexample(distinct_fail),
        Check::new("meet-family-size", size_fail.is_none(), json!({ "applies": guaranteed }))
            .with_counterexample(size_fail),
        Check::new("meet-family-intersecting", inter_fail.is_none(), json!({ "applies": guaranteed }))
            .with_counterexample(inter_fail),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(MeetAudit { perms: orders.len(), sampled, checks, passed })
}

/// Checks the reconstruction of `ω(A, B)` through the census and `Σ m |P_m|`.
pub fn reconstruction_check(a: &Family, b: &Family) -> Result<Check> {
    let direct = omega_cross(a, b)?;
    let via_profile = intersection_profile(a, b)?.weighted_sum();
    let via_census = reconstruct_omega_cross(a, b)?;
    Ok(Check::new(
        "census-reconstruction",
        direct == via_profile && direct == via_census,
        json!({ "omega": direct.to_string(), "profile": via_profile.to_string(), "census": via_census.to_string() }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::star;

    fn ks(n: u32, e: &[u32]) -> KSet {
        KSet::new(n, e).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let three: Vec<Vec<u32>> = enumerate_cyclic(3).unwrap().map(|p| p.order().to_vec()).collect();
        assert_eq!(three, vec![vec![1, 2, 3], vec![1, 3, 2]]);
        assert_eq!(enumerate_cyclic(5).unwrap().count(), 24);
        let four: BTreeSet<Vec<u32>> = enumerate_cyclic(4).unwrap().map(|p| p.order().to_vec()).collect();
        assert_eq!(four.len(), 6);
        assert!(matches!(enumerate_cyclic(11), Err(Error::TooLarge { .. })));
        let fact = [1usize, 1, 2, 6, 24, 120, 720, 5040, 40320];
        for n in 2..=9u32 {
            let all: BTreeSet<Vec<u32>> = enumerate_cyclic(n).unwrap().map(|p| p.order().to_vec()).collect();
            assert_eq!(all.len(), fact[n as usize - 1]);
        }
    }

    #[test]
    fn rotations_identified_reflections_distinct() {
        let a = CyclicPerm::new(vec![3, 4, 1, 2]).unwrap();
        assert_eq!(a, CyclicPerm::identity(4).unwrap());
        let r = CyclicPerm::new(vec![1, 4, 3, 2]).unwrap();
        assert_ne!(r, CyclicPerm::identity(4).unwrap());
    }

    #[test]
    fn intervals_of_length_examples() {
        let p = CyclicPerm::identity(4).unwrap();
        let sets: Vec<Vec<u32>> = intervals_of_length(&p, 2).unwrap().iter().map(|i| i.set().elements()).collect();
        assert_eq!(sets, vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]]);
        let p5 = CyclicPerm::identity(5).unwrap();
        let iv = intervals_of_length(&p5, 4).unwrap();
        assert_eq!(iv.len(), 5);
        let i = iv.iter().find(|i| i.set() == ks(5, &[2, 3, 4, 5])).unwrap();
        assert_eq!((i.left(), i.right()), (2, 5));
        assert!(matches!(intervals_of_length(&p5, 5), Err(Error::BadLength { .. })));
        assert!(matches!(intervals_of_length(&p5, 0), Err(Error::BadLength { .. })));
    }

    #[test]
    fn interval_of_examples() {
        let p = CyclicPerm::identity(5).unwrap();
        let i = interval_of(&p, &ks(5, &[2, 3])).unwrap().unwrap();
        assert_eq!((i.start(), i.len()), (1, 2));
        assert!(interval_of(&p, &ks(5, &[2, 4])).unwrap().is_none());
        let w = interval_of(&p, &ks(5, &[1, 5])).unwrap().unwrap();
        assert_eq!((w.start(), w.len(), w.left(), w.right()), (4, 2, 5, 1));
        assert!(interval_of(&p, &ks(5, &[1, 2, 3, 4, 5])).unwrap().is_none());
        assert!(interval_of(&p, &ks(6, &[1])).is_err());
    }

    #[test]
    fn representable_examples() {
        let p = CyclicPerm::identity(5).unwrap();
        let s = star(5, 2, 1).unwrap();
        let reps = representable_pairs(&p, &s, &s).unwrap();
        assert!(reps.contains(&RepresentablePair { a: ks(5, &[1, 5]), b: ks(5, &[1, 2]), meet: ks(5, &[1]) }));
        // reversed roles do not share the right orientation
        assert!(!reps.iter().any(|r| r.a == ks(5, &[1, 2]) && r.b == ks(5, &[1, 5])));
        // diagonal
        assert!(is_representable(&p, ks(5, &[2, 3]).bits(), ks(5, &[2, 3]).bits()));
        // meet {1, 4} is not an interval of the 5-cycle
        assert!(!is_representable(&p, ks(5, &[4, 5, 1]).bits(), ks(5, &[1, 2, 3, 4]).bits()));
        // b = {1, 4} is not an interval at all
        assert!(!is_representable(&p, ks(5, &[4, 5, 1]).bits(), ks(5, &[4, 1]).bits()));
    }

    #[test]
    fn meet_family_examples() {
        let p = CyclicPerm::identity(5).unwrap();
        let s = star(5, 2, 1).unwrap();
        let f1 = interval_meet_family(&p, &s, &s, 1).unwrap();
        assert_eq!(f1.to_lists(), vec![vec![1]]);
        let f2 = interval_meet_family(&p, &s, &s, 2).unwrap();
        assert_eq!(f2.to_lists(), vec![vec![1, 2], vec![1, 5]]);
        assert!(interval_meet_family(&p, &s, &s, 3).is_err());
        // non-cross-intersecting input still yields its meets
        let d = Family::new(5, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(interval_meet_family(&p, &d, &d, 2).unwrap().len(), 2);
    }

    #[test]
    fn katona_examples() {
        let r = katona_verify(5, 2, Sweep::Identity).unwrap();
        assert_eq!((r.max_size, r.passed), (2, true));
        assert_eq!(r.fixed_element_maxima, r.maximum_families);
        let r = katona_verify(4, 2, Sweep::Identity).unwrap();
        assert_eq!(r.max_size, 2);
        assert!(!r.uniqueness_required);
        assert!(r.passed);
        // at n = 2k the triangle {1,2,3},{3,4,5},{5,6,1} has no common element
        let r = katona_verify(6, 3, Sweep::Identity).unwrap();
        assert_eq!(r.max_size, 3);
        assert!(r.fixed_element_maxima < r.maximum_families);
        assert!(r.extremal.contains(&vec![vec![1, 2, 3], vec![3, 4, 5], vec![1, 5, 6]]));
        assert!(r.passed);
        let r = katona_verify(7, 3, Sweep::All { seed: 0 }).unwrap();
        assert_eq!((r.max_size, r.perms_checked, r.passed), (3, 720, true));
        assert!(matches!(katona_verify(5, 3, Sweep::Identity), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn double_count_examples() {
        let s = star(5, 2, 1).unwrap();
        let r1 = double_count_check(&s, &s, 1).unwrap();
        assert_eq!((r1.pm_size, r1.multiplicity, r1.total, r1.perms), (12, 2, 24, 24));
        assert!(r1.passed);
        let r2 = double_count_check(&s, &s, 2).unwrap();
        assert_eq!((r2.pm_size, r2.multiplicity, r2.total), (4, 12, 48));
        assert!(r2.passed);
        assert!(matches!(double_count_check(&star(9, 2, 1).unwrap(), &star(9, 2, 1).unwrap(), 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn adjacency_census() {
        // two fixed elements are adjacent in 2 * 3! cyclic orders of [5]
        let adjacent = enumerate_cyclic(5)
            .unwrap()
            .filter(|p| matches!((p.position(2) as i64 - p.position(4) as i64).rem_euclid(5), 1 | 4))
            .count();
        assert_eq!(adjacent, 12);
    }

    #[test]
    fn per_pair_census_independent_of_pair_choice() {
        // direct census per pair, disjoint from double_count_check's bookkeeping
        let n = 6;
        let (a, b) = (ks(n, &[1, 2, 3]), ks(n, &[3, 4]));
        let count = enumerate_cyclic(n).unwrap().filter(|p| is_representable(p, a.bits(), b.bits())).count();
        assert_eq!(count as u128, representation_multiplicity(6, 3, 2, 1).unwrap());
    }

    #[test]
    fn reconstruction_on_small_pair() {
        let a = Family::new(6, 3, &[vec![1, 2, 3], vec![1, 4, 5], vec![2, 4, 6]]).unwrap();
        let b = Family::new(6, 2, &[vec![1, 2], vec![2, 4], vec![3, 4]]).unwrap();
        assert!(reconstruction_check(&a, &b).unwrap().passed);
    }
}
