//! Ground types: k-subsets of `[n]` as bitmasks, duplicate-free families,
//! the intersecting predicates, stars, and the symmetric-group action.
//!
//! Element `i` (1-based) lives at bit `i`; bit 0 is never set. This caps the
//! ground set at `n <= 63`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_GROUND: u32 = 63;
/// Largest `n` for which `canonical_form` enumerates all of `S_n`.
pub const CANONICAL_LIMIT: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSet {
    n: u32,
    bits: u64,
}

impl KSet {
    pub fn new(n: u32, elements: &[u32]) -> Result<Self> {
        check_ground(n)?;
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::BadElement { element: e as i64, n });
            }
            bits |= 1 << e;
        }
        Ok(Self { n, bits })
    }

    pub fn from_bits(n: u32, bits: u64) -> Result<Self> {
        check_ground(n)?;
        if bits & !ground_mask(n) != 0 {
            let bad = (bits & !ground_mask(n)).trailing_zeros();
            return Err(Error::BadElement { element: bad as i64, n });
        }
        Ok(Self { n, bits })
    }

    pub(crate) fn raw(n: u32, bits: u64) -> Self {
        debug_assert!(bits & !ground_mask(n) == 0);
        Self { n, bits }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, e: u32) -> bool {
        e <= 63 && self.bits >> e & 1 == 1
    }

    pub fn meet(&self, other: &KSet) -> u32 {
        (self.bits & other.bits).count_ones()
    }

    pub fn elements(&self) -> Vec<u32> {
        elements_of(self.bits)
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn check_ground(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Hypothesis("ground set size must be at least 1".into()));
    }
    if n > MAX_GROUND {
        return Err(Error::TooLarge { what: "n", value: n as u64, limit: MAX_GROUND as u64 });
    }
    Ok(())
}

pub(crate) fn ground_mask(n: u32) -> u64 {
    if n >= 63 {
        !1u64
    } else {
        ((1u64 << (n + 1)) - 1) & !1
    }
}

pub(crate) fn elements_of(mut bits: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(bits.count_ones() as usize);
    while bits != 0 {
        out.push(bits.trailing_zeros());
        bits &= bits - 1;
    }
    out
}

/// All k-subsets of `[n]` as bitmasks, in increasing numeric order.
pub fn k_subsets(n: u32, k: u32) -> impl Iterator<Item = u64> {
    // Gosper's hack over bits 0..n, shifted up by one on output
    let limit: u128 = 1u128 << n;
    let first: u128 = if k > n { limit } else { (1u128 << k) - 1 };
    let mut cur = Some(first);
    std::iter::from_fn(move || {
        let c = cur?;
        if c >= limit {
            cur = None;
            return None;
        }
        cur = if c == 0 {
            None
        } else {
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            Some((((ripple ^ c) >> 2) / low) | ripple)
        };
        Some((c as u64) << 1)
    })
}

/// A duplicate-free family of k-subsets, members sorted by bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u32,
    k: u32,
    members: Vec<KSet>,
}

impl PartialOrd for Family {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Family {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.k)
            .cmp(&(other.n, other.k))
            .then_with(|| cmp_masks(self.members.iter().map(|s| s.bits), other.members.iter().map(|s| s.bits)))
    }
}

fn cmp_masks(a: impl Iterator<Item = u64>, b: impl Iterator<Item = u64>) -> Ordering {
    a.cmp(b)
}

impl Family {
    pub fn empty(n: u32, k: u32) -> Result<Self> {
        check_ground(n)?;
        check_k(n, k)?;
        Ok(Self { n, k, members: Vec::new() })
    }

    /// Builds a family from 1-based element lists. Duplicates are an error.
    pub fn new(n: u32, k: u32, sets: &[Vec<u32>]) -> Result<Self> {
        check_ground(n)?;
        check_k(n, k)?;
        let mut seen = BTreeSet::new();
        for set in sets {
            let s = KSet::new(n, set)?;
            if s.len() as usize != set.len() {
                // repeated element inside one set
                return Err(Error::BadSize { set: set.clone(), got: s.len() as usize, expected: k as usize });
            }
            if s.len() != k {
                return Err(Error::BadSize { set: set.clone(), got: set.len(), expected: k as usize });
            }
            if !seen.insert(s.bits) {
                return Err(Error::DuplicateSet(s.elements()));
            }
        }
        Ok(Self { n, k, members: seen.into_iter().map(|bits| KSet { n, bits }).collect() })
    }

    /// Builds from bitmasks; duplicates are an error.
    pub fn from_masks(n: u32, k: u32, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        check_ground(n)?;
        check_k(n, k)?;
        let mut seen = BTreeSet::new();
        for bits in masks {
            let s = KSet::from_bits(n, bits)?;
            if s.len() != k {
                return Err(Error::BadSize { set: s.elements(), got: s.len() as usize, expected: k as usize });
            }
            if !seen.insert(bits) {
                return Err(Error::DuplicateSet(s.elements()));
            }
        }
        Ok(Self { n, k, members: seen.into_iter().map(|bits| KSet { n, bits }).collect() })
    }

    /// Trusted constructor for masks already validated as distinct k-sets.
    pub(crate) fn from_masks_unchecked(n: u32, k: u32, mut masks: Vec<u64>) -> Self {
        masks.sort_unstable();
        debug_assert!(masks.windows(2).all(|w| w[0] < w[1]));
        Self { n, k, members: masks.into_iter().map(|bits| KSet { n, bits }).collect() }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn masks(&self) -> Vec<u64> {
        self.members.iter().map(|s| s.bits).collect()
    }

    pub fn contains(&self, s: &KSet) -> bool {
        self.members.binary_search_by(|m| m.bits.cmp(&s.bits)).is_ok()
    }

    pub fn to_lists(&self) -> Vec<Vec<u32>> {
        self.members.iter().map(KSet::elements).collect()
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson { n: self.n, k: self.k, sets: self.to_lists() }
    }

    pub fn from_json(doc: &FamilyJson) -> Result<Self> {
        Self::new(doc.n, doc.k, &doc.sets)
    }

    /// Element degrees, indexed by element (index 0 unused).
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n as usize + 1];
        for s in &self.members {
            for e in s.elements() {
                deg[e as usize] += 1;
            }
        }
        deg
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

fn check_k(n: u32, k: u32) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Hypothesis(format!("member size k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(())
}

/// On-disk family document: `{"n": .., "k": .., "sets": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: u32,
    pub k: u32,
    pub sets: Vec<Vec<u32>>,
}

pub fn make_family(n: u32, k: u32, sets: &[Vec<u32>]) -> Result<Family> {
    Family::new(n, k, sets)
}

pub fn is_intersecting(f: &Family) -> bool {
    let m = &f.members;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i].bits & m[j].bits == 0 {
                return false;
            }
        }
    }
    true
}

pub fn is_cross_intersecting(a: &Family, b: &Family) -> Result<bool> {
    same_ground(a, b)?;
    Ok(a.members.iter().all(|x| b.members.iter().all(|y| x.bits & y.bits != 0)))
}

pub(crate) fn same_ground(a: &Family, b: &Family) -> Result<()> {
    if a.n != b.n {
        return Err(Error::GroundMismatch { left: a.n, right: b.n });
    }
    Ok(())
}

/// All k-subsets of `[n]` containing `x`.
pub fn star(n: u32, k: u32, x: u32) -> Result<Family> {
    check_ground(n)?;
    check_k(n, k)?;
    if x == 0 || x > n {
        return Err(Error::BadElement { element: x as i64, n });
    }
    let masks = k_subsets(n, k).filter(|m| m >> x & 1 == 1).collect();
    Ok(Family::from_masks_unchecked(n, k, masks))
}

/// Returns `x` when `f` is exactly the full star through `x`.
pub fn is_star(f: &Family) -> Option<u32> {
    if f.is_empty() {
        return None;
    }
    let common = f.members.iter().fold(ground_mask(f.n), |acc, s| acc & s.bits);
    // a full star has exactly one common element unless k = n
    elements_of(common).into_iter().find(|&x| star(f.n, f.k, x).map(|s| &s == f).unwrap_or(false))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: u32) -> Self {
        Self { image: (1..=n).collect() }
    }

    /// `image[i - 1]` is the image of element `i`.
    pub fn from_images(image: Vec<u32>) -> Result<Self> {
        let n = image.len() as u32;
        check_ground(n)?;
        let mut seen = vec![false; n as usize + 1];
        for &v in &image {
            if v == 0 || v > n || seen[v as usize] {
                return Err(Error::BadElement { element: v as i64, n });
            }
            seen[v as usize] = true;
        }
        Ok(Self { image })
    }

    pub fn transposition(n: u32, a: u32, b: u32) -> Result<Self> {
        Self::from_cycle(n, &[a, b])
    }

    /// The cycle `(c0 c1 ... )`: c0 -> c1 -> ... -> c0.
    pub fn from_cycle(n: u32, cycle: &[u32]) -> Result<Self> {
        let mut image: Vec<u32> = (1..=n).collect();
        for (i, &c) in cycle.iter().enumerate() {
            if c == 0 || c > n {
                return Err(Error::BadElement { element: c as i64, n });
            }
            image[c as usize - 1] = cycle[(i + 1) % cycle.len()];
        }
        Self::from_images(image)
    }

    pub fn n(&self) -> u32 {
        self.image.len() as u32
    }

    pub fn apply(&self, e: u32) -> u32 {
        self.image[e as usize - 1]
    }

    pub fn apply_mask(&self, bits: u64) -> u64 {
        relabel(bits, &self.image)
    }
}

/// Relabels a mask by a 1-based image table (`image[i - 1]` is the image of `i`).
pub(crate) fn relabel(mut bits: u64, image: &[u32]) -> u64 {
    let mut out = 0u64;
    while bits != 0 {
        let e = bits.trailing_zeros();
        out |= 1 << image[e as usize - 1];
        bits &= bits - 1;
    }
    out
}

pub fn apply_perm(f: &Family, p: &Permutation) -> Result<Family> {
    if f.n != p.n() {
        return Err(Error::GroundMismatch { left: f.n, right: p.n() });
    }
    let masks = f.members.iter().map(|s| p.apply_mask(s.bits)).collect();
    Ok(Family::from_masks_unchecked(f.n, f.k, masks))
}

/// Visits every permutation image table of `[n]` (Heap's algorithm).
pub(crate) fn for_each_perm(n: u32, mut visit: impl FnMut(&[u32])) {
    let mut image: Vec<u32> = (1..=n).collect();
    let mut c = vec![0usize; n as usize];
    visit(&image);
    let mut i = 1;
    while i < n as usize {
        if c[i] < i {
            if i % 2 == 0 {
                image.swap(0, i);
            } else {
                image.swap(c[i], i);
            }
            visit(&image);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn check_canonical_limit(n: u32) -> Result<()> {
    if n > CANONICAL_LIMIT {
        return Err(Error::TooLarge { what: "n for exact canonical form", value: n as u64, limit: CANONICAL_LIMIT as u64 });
    }
    Ok(())
}

/// Lexicographically least relabeling of `f` over all of `S_n`.
pub fn canonical_form(f: &Family) -> Result<Family> {
    check_canonical_limit(f.n)?;
    let src = f.masks();
    let mut best = src.clone();
    let mut buf = Vec::with_capacity(src.len());
    for_each_perm(f.n, |image| {
        buf.clear();
        buf.extend(src.iter().map(|&m| relabel(m, image)));
        buf.sort_unstable();
        if buf < best {
            best.clone_from(&buf);
        }
    });
    Ok(Family::from_masks_unchecked(f.n, f.k, best))
}

/// Least simultaneous relabeling of a pair, ordered by `(a, b)`.
pub fn canonical_pair(a: &Family, b: &Family) -> Result<(Family, Family)> {
    same_ground(a, b)?;
    check_canonical_limit(a.n)?;
    let (sa, sb) = (a.masks(), b.masks());
    let mut best = (sa.clone(), sb.clone());
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    for_each_perm(a.n, |image| {
        ba.clear();
        ba.extend(sa.iter().map(|&m| relabel(m, image)));
        ba.sort_unstable();
        match ba.cmp(&best.0) {
            Ordering::Greater => {}
            ord => {
                bb.clear();
                bb.extend(sb.iter().map(|&m| relabel(m, image)));
                bb.sort_unstable();
                if ord == Ordering::Less || bb < best.1 {
                    best = (ba.clone(), bb.clone());
                }
            }
        }
    });
    Ok((
        Family::from_masks_unchecked(a.n, a.k, best.0),
        Family::from_masks_unchecked(b.n, b.k, best.1),
    ))
}

/// Permutation-invariant signature for fast non-isomorphism filtering at any `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub degrees: Vec<u64>,
    pub self_profile: Vec<u64>,
    pub member_profiles: Vec<Vec<u64>>,
}

pub fn fingerprint(f: &Family) -> Fingerprint {
    let mut degrees = f.degrees().split_off(1);
    degrees.sort_unstable();
    let width = f.k as usize + 1;
    let mut self_profile = vec![0u64; width];
    let mut member_profiles = Vec::with_capacity(f.len());
    for a in &f.members {
        let mut row = vec![0u64; width];
        for b in &f.members {
            row[a.meet(b) as usize] += 1;
        }
        for (acc, r) in self_profile.iter_mut().zip(&row) {
            *acc += r;
        }
        member_profiles.push(row);
    }
    member_profiles.sort_unstable();
    Fingerprint { degrees, self_profile, member_profiles }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: u32, k: u32, sets: &[&[u32]]) -> Family {
        Family::new(n, k, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn make_family_examples() {
        assert_eq!(fam(4, 2, &[&[1, 2], &[1, 3], &[1, 4]]).len(), 3);
        assert_eq!(
            make_family(4, 2, &[vec![1, 2], vec![2, 1]]),
            Err(Error::DuplicateSet(vec![1, 2]))
        );
        assert!(matches!(make_family(3, 2, &[vec![1, 4]]), Err(Error::BadElement { element: 4, n: 3 })));
        assert!(matches!(make_family(4, 2, &[vec![1, 2, 3]]), Err(Error::BadSize { .. })));
        assert!(matches!(make_family(4, 2, &[vec![1, 1]]), Err(Error::BadSize { .. })));
        assert!(matches!(make_family(64, 2, &[]), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn members_sorted_by_mask() {
        let f = fam(4, 2, &[&[3, 4], &[1, 2], &[2, 4]]);
        assert_eq!(f.to_lists(), vec![vec![1, 2], vec![2, 4], vec![3, 4]]);
    }

    #[test]
    fn intersecting_examples() {
        assert!(is_intersecting(&fam(4, 2, &[&[1, 2], &[1, 3], &[1, 4]])));
        assert!(!is_intersecting(&fam(4, 2, &[&[1, 2], &[3, 4]])));
        assert!(is_intersecting(&Family::empty(4, 2).unwrap()));
    }

    #[test]
    fn cross_intersecting_examples() {
        let a = fam(4, 2, &[&[1, 2]]);
        assert!(is_cross_intersecting(&a, &fam(4, 2, &[&[1, 3]])).unwrap());
        assert!(!is_cross_intersecting(&a, &fam(4, 2, &[&[3, 4]])).unwrap());
        assert!(is_cross_intersecting(&Family::empty(4, 2).unwrap(), &a).unwrap());
        assert!(matches!(
            is_cross_intersecting(&a, &Family::empty(5, 2).unwrap()),
            Err(Error::GroundMismatch { .. })
        ));
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(4, 2, 1).unwrap(), fam(4, 2, &[&[1, 2], &[1, 3], &[1, 4]]));
        assert_eq!(star(5, 1, 2).unwrap(), fam(5, 1, &[&[2]]));
        // C(5,2) by direct enumeration of 3-sets containing 1
        let count = (2..=6u32).flat_map(|a| (a + 1..=6).map(move |b| (a, b))).count();
        assert_eq!(count, 10);
        assert_eq!(star(6, 3, 1).unwrap().len(), count);
        assert!(matches!(star(4, 2, 5), Err(Error::BadElement { .. })));
    }

    #[test]
    fn apply_perm_examples() {
        let s = star(4, 2, 1).unwrap();
        let swap = Permutation::transposition(4, 1, 2).unwrap();
        assert_eq!(apply_perm(&s, &swap).unwrap(), star(4, 2, 2).unwrap());
        assert_eq!(apply_perm(&s, &Permutation::identity(4)).unwrap(), s);
        let f = fam(3, 2, &[&[1, 2], &[2, 3]]);
        let cyc = Permutation::from_cycle(3, &[1, 2, 3]).unwrap();
        assert_eq!(apply_perm(&f, &cyc).unwrap(), fam(3, 2, &[&[2, 3], &[3, 1]]));
        assert!(apply_perm(&f, &Permutation::identity(4)).is_err());
    }

    #[test]
    fn is_star_examples() {
        assert_eq!(is_star(&star(5, 2, 3).unwrap()), Some(3));
        assert_eq!(is_star(&fam(4, 2, &[&[1, 2], &[1, 3]])), None);
        assert_eq!(is_star(&fam(4, 2, &[&[1, 2], &[1, 3], &[2, 3]])), None);
        assert_eq!(is_star(&Family::empty(4, 2).unwrap()), None);
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(canonical_form(&star(4, 2, 3).unwrap()).unwrap(), star(4, 2, 1).unwrap());
        let tri = fam(4, 2, &[&[1, 3], &[1, 4], &[3, 4]]);
        // minimized over all 24 relabelings by hand: the least 3-member family of 2-sets
        assert_eq!(canonical_form(&tri).unwrap(), fam(4, 2, &[&[1, 2], &[1, 3], &[2, 3]]));
        let c = canonical_form(&tri).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
        assert!(matches!(canonical_form(&star(11, 2, 1).unwrap()), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn heap_visits_all_permutations_once() {
        let mut seen = BTreeSet::new();
        for_each_perm(5, |img| {
            assert!(seen.insert(img.to_vec()));
        });
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn k_subsets_counts_and_order() {
        let all: Vec<u64> = k_subsets(5, 2).collect();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|m| m.count_ones() == 2 && m & 1 == 0 && *m < 1 << 6));
        assert_eq!(k_subsets(63, 63).count(), 1);
        assert_eq!(k_subsets(63, 1).count(), 63);
        assert_eq!(k_subsets(3, 4).count(), 0);
    }

    #[test]
    fn fingerprint_is_invariant() {
        let f = fam(5, 2, &[&[1, 2], &[1, 3], &[2, 3], &[4, 5]]);
        let p = Permutation::from_cycle(5, &[1, 4, 2, 5]).unwrap();
        assert_eq!(fingerprint(&f), fingerprint(&apply_perm(&f, &p).unwrap()));
        assert_ne!(fingerprint(&star(5, 2, 1).unwrap()), fingerprint(&f));
    }
}
