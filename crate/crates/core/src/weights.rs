//! Summed-intersection functionals over families and family pairs, the
//! intersection-size profile, and pluggable pair weights.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::setcore::{same_ground, Family, KSet};

/// Sum of `|A ∩ B|` over unordered pairs of distinct members.
pub fn omega_family(f: &Family) -> u128 {
    let m = f.members();
    let mut total = 0u128;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            total += m[i].meet(&m[j]) as u128;
        }
    }
    total
}

/// Sum of `|A ∩ B|` over all ordered pairs in `A × B`, diagonal included.
pub fn omega_cross(a: &Family, b: &Family) -> Result<u128> {
    same_ground(a, b)?;
    Ok(a.members().iter().map(|x| b.members().iter().map(|y| x.meet(y) as u128).sum::<u128>()).sum())
}

/// Like [`omega_cross`] but skipping pairs of equal sets.
pub fn omega_cross_strict(a: &Family, b: &Family) -> Result<u128> {
    same_ground(a, b)?;
    Ok(a.members()
        .iter()
        .map(|x| b.members().iter().filter(|y| y.bits() != x.bits()).map(|y| x.meet(y) as u128).sum::<u128>())
        .sum())
}

/// `counts[m]` is the number of ordered pairs meeting in exactly `m` elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub counts: Vec<u128>,
}

impl Profile {
    pub fn total_pairs(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// `Σ m · counts[m]`.
    pub fn weighted_sum(&self) -> u128 {
        self.counts.iter().enumerate().map(|(m, &c)| m as u128 * c).sum()
    }

    pub fn get(&self, m: usize) -> u128 {
        self.counts.get(m).copied().unwrap_or(0)
    }
}

pub fn intersection_profile(a: &Family, b: &Family) -> Result<Profile> {
    same_ground(a, b)?;
    let mut counts = vec![0u128; a.k().min(b.k()) as usize + 1];
    for x in a.members() {
        for y in b.members() {
            counts[x.meet(y) as usize] += 1;
        }
    }
    Ok(Profile { counts })
}

/// `Σ_e deg_A(e) · deg_B(e)`, which counts the same incidences as [`omega_cross`].
pub fn degree_product_sum(a: &Family, b: &Family) -> Result<u128> {
    same_ground(a, b)?;
    let (da, db) = (a.degrees(), b.degrees());
    Ok(da.iter().zip(&db).map(|(&x, &y)| x as u128 * y as u128).sum())
}

/// A weight on ordered pairs of sets.
pub trait PairWeight: Send + Sync {
    fn eval(&self, a: &KSet, b: &KSet) -> i128;
}

impl<F> PairWeight for F
where
    F: Fn(&KSet, &KSet) -> i128 + Send + Sync,
{
    fn eval(&self, a: &KSet, b: &KSet) -> i128 {
        self(a, b)
    }
}

/// `|a ∩ b|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeetSize;

impl PairWeight for MeetSize {
    fn eval(&self, a: &KSet, b: &KSet) -> i128 {
        a.meet(b) as i128
    }
}

/// Constant one: counts pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unit;

impl PairWeight for Unit {
    fn eval(&self, _: &KSet, _: &KSet) -> i128 {
        1
    }
}

/// `Σ w(a, b)` over `A × B`, skipping `a = b` when `strict`.
pub fn omega_generic(a: &Family, b: &Family, w: &dyn PairWeight, strict: bool) -> Result<i128> {
    same_ground(a, b)?;
    let mut total = 0i128;
    for x in a.members() {
        for y in b.members() {
            if strict && x.bits() == y.bits() {
                continue;
            }
            total = total.checked_add(w.eval(x, y)).ok_or(Error::Overflow("omega_generic"))?;
        }
    }
    Ok(total)
}

type WeightFactory = fn() -> Box<dyn PairWeight>;

/// Named pair weights selectable at runtime.
pub struct WeightRegistry {
    entries: BTreeMap<&'static str, WeightFactory>,
}

impl Default for WeightRegistry {
    fn default() -> Self {
        let mut r = Self { entries: BTreeMap::new() };
        r.register("meet", || Box::new(MeetSize));
        r.register("unit", || Box::new(Unit));
        r
    }
}

impl WeightRegistry {
    pub fn register(&mut self, name: &'static str, factory: WeightFactory) {
        self.entries.insert(name, factory);
    }

    pub fn get(&self, name: &str) -> Result<Box<dyn PairWeight>> {
        self.entries.get(name).map(|f| f()).ok_or_else(|| Error::Unknown {
            kind: "weight",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::star;

    fn fam(n: u32, k: u32, sets: &[&[u32]]) -> Family {
        Family::new(n, k, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    // Independent oracle: element-list intersection, no bitmasks.
    fn brute_meet(a: &[u32], b: &[u32]) -> u128 {
        a.iter().filter(|x| b.contains(x)).count() as u128
    }

    fn brute_cross(a: &Family, b: &Family) -> u128 {
        let (la, lb) = (a.to_lists(), b.to_lists());
        la.iter().flat_map(|x| lb.iter().map(move |y| brute_meet(x, y))).sum()
    }

    #[test]
    fn omega_family_examples() {
        assert_eq!(omega_family(&fam(4, 2, &[&[1, 2], &[1, 3], &[1, 4]])), 3);
        assert_eq!(omega_family(&Family::empty(4, 2).unwrap()), 0);
        assert_eq!(omega_family(&fam(4, 2, &[&[1, 2]])), 0);
        assert_eq!(omega_family(&star(5, 2, 1).unwrap()), 6);
    }

    #[test]
    fn omega_cross_examples() {
        let s5 = star(5, 2, 1).unwrap();
        assert_eq!(brute_cross(&s5, &s5), 20);
        assert_eq!(omega_cross(&s5, &s5).unwrap(), 20);
        assert_eq!(omega_cross(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[3, 4]])).unwrap(), 0);
        let s4 = star(4, 2, 1).unwrap();
        assert_eq!(brute_cross(&s4, &s4), 12);
        assert_eq!(omega_cross(&s4, &s4).unwrap(), 12);
        assert!(matches!(omega_cross(&s4, &s5), Err(Error::GroundMismatch { .. })));
    }

    #[test]
    fn omega_cross_strict_examples() {
        let s5 = star(5, 2, 1).unwrap();
        assert_eq!(omega_cross_strict(&s5, &s5).unwrap(), 12);
        let x = fam(5, 2, &[&[2, 4]]);
        assert_eq!(omega_cross_strict(&x, &x).unwrap(), 0);
        let (l, r) = (fam(6, 2, &[&[1, 2], &[2, 3]]), fam(6, 2, &[&[4, 5], &[5, 6]]));
        assert_eq!(omega_cross_strict(&l, &r).unwrap(), 0);
    }

    #[test]
    fn profile_examples() {
        let s5 = star(5, 2, 1).unwrap();
        assert_eq!(intersection_profile(&s5, &s5).unwrap().counts, vec![0, 12, 4]);
        assert_eq!(
            intersection_profile(&fam(4, 2, &[&[1, 2]]), &fam(4, 2, &[&[3, 4]])).unwrap().counts,
            vec![1, 0, 0]
        );
        let e = Family::empty(4, 2).unwrap();
        assert_eq!(intersection_profile(&e, &e).unwrap().counts, vec![0, 0, 0]);
    }

    #[test]
    fn generic_examples() {
        let s4 = star(4, 2, 1).unwrap();
        assert_eq!(omega_generic(&s4, &s4, &Unit, false).unwrap(), 9);
        let s5 = star(5, 2, 1).unwrap();
        assert_eq!(omega_generic(&s5, &s5, &MeetSize, false).unwrap(), 20);
        assert_eq!(omega_generic(&s5, &s5, &MeetSize, true).unwrap(), 12);
        let sq = |a: &KSet, b: &KSet| (a.meet(b) as i128).pow(2);
        assert_eq!(omega_generic(&s4, &s4, &sq, false).unwrap(), 3 * 4 + 6);
    }

    #[test]
    fn registry_lookup() {
        let reg = WeightRegistry::default();
        assert_eq!(reg.names(), vec!["meet", "unit"]);
        let s4 = star(4, 2, 1).unwrap();
        assert_eq!(omega_generic(&s4, &s4, reg.get("unit").unwrap().as_ref(), false).unwrap(), 9);
        assert!(matches!(reg.get("cube"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn degree_identity_on_stars() {
        let a = star(6, 3, 1).unwrap();
        let b = star(6, 2, 1).unwrap();
        assert_eq!(degree_product_sum(&a, &b).unwrap(), omega_cross(&a, &b).unwrap());
    }
}
