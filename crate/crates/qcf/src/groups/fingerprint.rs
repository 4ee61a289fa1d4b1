//! Abstract-type identification for small groups from coarse invariants:
//! order, element-order histogram, center size, abelian invariants, and
//! derived-subgroup order.

use super::MatrixGroup;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Coarse invariants of a small group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFingerprint {
    pub order: u64,
    /// element order -> count
    pub order_histogram: BTreeMap<u64, u64>,
    pub center_order: u64,
    pub derived_order: u64,
    /// Invariant-factor decomposition, descending, when the group is abelian.
    pub abelian_invariants: Option<Vec<u64>>,
}

impl GroupFingerprint {
    pub fn is_abelian(&self) -> bool {
        self.derived_order == 1
    }

    pub fn involutions(&self) -> u64 {
        self.order_histogram.get(&2).copied().unwrap_or(0)
    }

    pub fn max_element_order(&self) -> u64 {
        self.order_histogram.keys().max().copied().unwrap_or(1)
    }
}

/// A recognized abstract type, or the raw fingerprint when the invariants do
/// not single out one listed type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbstractType {
    Known(String),
    Ambiguous(GroupFingerprint),
}

impl AbstractType {
    pub fn label(&self) -> String {
        match self {
            AbstractType::Known(s) => s.clone(),
            AbstractType::Ambiguous(fp) => format!("order-{} (ambiguous)", fp.order),
        }
    }
}

/// Multiplication-table view of an explicit closed group.
struct Table {
    n: usize,
    mul: Vec<u32>, // n*n row-major
    id: usize,
}

impl Table {
    fn from_group(g: &MatrixGroup) -> Result<Table> {
        let els = g
            .elements()
            .ok_or_else(|| Error::InvalidGroup("fingerprint needs a closed group".into()))?;
        let n = els.len();
        let mut index: BTreeMap<&[u64], u32> = BTreeMap::new();
        for (i, e) in els.iter().enumerate() {
            index.insert(e.rows(), i as u32);
        }
        let mut mul = vec![0u32; n * n];
        let mut id = None;
        for (i, a) in els.iter().enumerate() {
            if a.is_identity() {
                id = Some(i);
            }
            for (j, b) in els.iter().enumerate() {
                let p = a.mul(b)?;
                let k = *index
                    .get(p.rows())
                    .ok_or_else(|| Error::InvalidGroup("element set not closed".into()))?;
                mul[i * n + j] = k;
            }
        }
        Ok(Table {
            n,
            mul,
            id: id.ok_or_else(|| Error::InvalidGroup("identity missing".into()))?,
        })
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    fn inv(&self, a: usize) -> usize {
        (0..self.n)
            .find(|&b| self.mul(a, b) == self.id)
            .expect("every element has an inverse")
    }

    fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut e = 1u64;
        while x != self.id {
            x = self.mul(x, a);
            e += 1;
        }
        e
    }

    fn order_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for a in 0..self.n {
            *h.entry(self.element_order(a)).or_insert(0) += 1;
        }
        h
    }

    fn center_order(&self) -> u64 {
        (0..self.n)
            .filter(|&a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
            .count() as u64
    }

    fn subgroup_closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut in_set = vec![false; self.n];
        let mut queue: Vec<usize> = vec![self.id];
        in_set[self.id] = true;
        for &s in seed {
            if !in_set[s] {
                in_set[s] = true;
                queue.push(s);
            }
        }
        let mut head = 0;
        let gens: Vec<usize> = queue.clone();
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in &gens {
                let y = self.mul(x, g);
                if !in_set[y] {
                    in_set[y] = true;
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    fn derived_order(&self) -> u64 {
        let mut commutators = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                let c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b));
                commutators.push(c);
            }
        }
        commutators.sort_unstable();
        commutators.dedup();
        self.subgroup_closure(&commutators).len() as u64
    }

    fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (a..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Invariant factors of an abelian group, descending (d_m | ... | d_1
    /// read left to right as largest first).
    fn abelian_invariants(&self) -> Vec<u64> {
        assert!(self.is_abelian());
        if self.n == 1 {
            return Vec::new();
        }
        // an element of maximal order generates a direct summand
        let (z, e) = (0..self.n)
            .map(|a| (a, self.element_order(a)))
            .max_by_key(|&(a, o)| (o, std::cmp::Reverse(a)))
            .unwrap();
        let mut cyclic = Vec::new();
        let mut x = self.id;
        loop {
            cyclic.push(x);
            x = self.mul(x, z);
            if x == self.id {
                break;
            }
        }
        cyclic.sort_unstable();
        // cosets of <z>
        let mut coset_of = vec![usize::MAX; self.n];
        let mut reps: Vec<usize> = Vec::new();
        for a in 0..self.n {
            if coset_of[a] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(a);
            for &t in &cyclic {
                coset_of[self.mul(a, t)] = c;
            }
        }
        let q = reps.len();
        let mut mul = vec![0u32; q * q];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                mul[i * q + j] = coset_of[self.mul(a, b)] as u32;
            }
        }
        let quotient = Table {
            n: q,
            mul,
            id: coset_of[self.id],
        };
        let mut invs = vec![e];
        invs.extend(quotient.abelian_invariants());
        invs
    }
}

/// Compute the coarse fingerprint of a closed group of modest order.
pub fn group_fingerprint(g: &MatrixGroup) -> Result<GroupFingerprint> {
    let order = g
        .order()
        .ok_or_else(|| Error::InvalidGroup("fingerprint needs a closed group".into()))?;
    if order > 20_000 {
        return Err(Error::InvalidGroup(format!(
            "fingerprint supports order <= 20000, got {order}"
        )));
    }
    let t = Table::from_group(g)?;
    let abelian = t.is_abelian();
    Ok(GroupFingerprint {
        order: order as u64,
        order_histogram: t.order_histogram(),
        center_order: t.center_order(),
        derived_order: if abelian { 1 } else { t.derived_order() },
        abelian_invariants: abelian.then(|| t.abelian_invariants()),
    })
}

fn abelian_label(invariants: &[u64]) -> String {
    if invariants.is_empty() {
        return "Z_1".to_string();
    }
    invariants
        .iter()
        .map(|d| format!("Z_{d}"))
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Decide the abstract type of a closed group of order at most 64.
///
/// Abelian groups are labeled exactly by their invariant factors. Among the
/// nonabelian orders that occur in the bundled data, the order histogram
/// separates the listed types; order-16 nonabelian types are never guessed.
pub fn fingerprint(g: &MatrixGroup) -> Result<AbstractType> {
    let fp = group_fingerprint(g)?;
    if fp.order > 64 {
        return Ok(AbstractType::Ambiguous(fp));
    }
    if let Some(invs) = &fp.abelian_invariants {
        return Ok(AbstractType::Known(abelian_label(invs)));
    }
    let label = match fp.order {
        6 => Some("S_3".to_string()),
        8 => match fp.involutions() {
            1 => Some("Q_8".to_string()),
            5 => Some("D_8".to_string()),
            _ => None,
        },
        10 => Some("D_10".to_string()),
        12 => {
            if fp.involutions() == 1 && fp.order_histogram.contains_key(&4) {
                Some("Z_3 : Z_4".to_string())
            } else if fp.involutions() == 3 && fp.max_element_order() == 3 {
                Some("A_4".to_string())
            } else if fp.involutions() == 7 {
                Some("D_12".to_string())
            } else {
                None
            }
        }
        14 => Some("D_14".to_string()),
        _ => None,
    };
    Ok(match label {
        Some(l) => AbstractType::Known(l),
        None => AbstractType::Ambiguous(fp),
    })
}

fn normalize_label(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .replace('×', "x")
        .replace('⋊', ":")
}

/// Whether a computed type is consistent with a stated label.
///
/// Recognized types must match the stated label exactly (after whitespace
/// normalization). An ambiguous order-16 fingerprint is checked for
/// consistency only: the stated `(Z_4 x Z_2) : Z_2` requires a nonabelian
/// group of order 16 with an element of order 4 and exponent dividing 8.
pub fn type_consistent(computed: &AbstractType, stated: &str) -> bool {
    let stated_n = normalize_label(stated);
    match computed {
        AbstractType::Known(l) => normalize_label(l) == stated_n,
        AbstractType::Ambiguous(fp) => {
            if stated_n == "(Z_4xZ_2):Z_2" {
                fp.order == 16
                    && !fp.is_abelian()
                    && fp.order_histogram.contains_key(&4)
                    && fp.max_element_order() <= 8
            } else {
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::groups::MatrixGroup;

    fn bundled(order: u64, idx: u32) -> MatrixGroup {
        MatrixGroup::from_group_file(&data::bundled_group(order, idx).unwrap()).unwrap()
    }

    #[test]
    fn klein_four_and_cyclics() {
        assert_eq!(
            fingerprint(&bundled(4, 6)).unwrap(),
            AbstractType::Known("Z_2 x Z_2".into())
        );
        assert_eq!(
            fingerprint(&bundled(4, 7)).unwrap(),
            AbstractType::Known("Z_4".into())
        );
        assert_eq!(
            fingerprint(&bundled(14, 1)).unwrap(),
            AbstractType::Known("Z_14".into())
        );
        assert_eq!(
            fingerprint(&bundled(1, 1)).unwrap(),
            AbstractType::Known("Z_1".into())
        );
    }

    #[test]
    fn quaternion_vs_dihedral() {
        assert_eq!(
            fingerprint(&bundled(8, 4)).unwrap(),
            AbstractType::Known("Q_8".into())
        );
        assert_eq!(
            fingerprint(&bundled(8, 5)).unwrap(),
            AbstractType::Known("Q_8".into())
        );
        assert_eq!(
            fingerprint(&bundled(8, 6)).unwrap(),
            AbstractType::Known("D_8".into())
        );
        assert_eq!(
            fingerprint(&bundled(8, 3)).unwrap(),
            AbstractType::Known("Z_4 x Z_2".into())
        );
        assert_eq!(
            fingerprint(&bundled(8, 1)).unwrap(),
            AbstractType::Known("Z_2 x Z_2 x Z_2".into())
        );
        assert_eq!(
            fingerprint(&bundled(8, 11)).unwrap(),
            AbstractType::Known("Z_8".into())
        );
    }

    #[test]
    fn nonabelian_composites() {
        assert_eq!(
            fingerprint(&bundled(6, 1)).unwrap(),
            AbstractType::Known("S_3".into())
        );
        assert_eq!(
            fingerprint(&bundled(6, 3)).unwrap(),
            AbstractType::Known("Z_6".into())
        );
        assert_eq!(
            fingerprint(&bundled(12, 1)).unwrap(),
            AbstractType::Known("Z_3 : Z_4".into())
        );
    }

    #[test]
    fn order_16_stays_ambiguous_but_consistent() {
        let t = fingerprint(&bundled(16, 1)).unwrap();
        assert!(matches!(t, AbstractType::Ambiguous(_)));
        assert!(type_consistent(&t, "(Z_4 x Z_2) : Z_2"));
        assert!(!type_consistent(&t, "Z_16"));
    }

    #[test]
    fn all_bundled_types_are_consistent() {
        for &(o, i) in data::BUNDLED_GROUP_IDS {
            let f = data::bundled_group(o, i).unwrap();
            let g = MatrixGroup::from_group_file(&f).unwrap();
            let t = fingerprint(&g).unwrap();
            let stated = f.abstract_type.expect("bundled groups carry types");
            assert!(
                type_consistent(&t, &stated),
                "{}: computed {:?}, stated {}",
                f.name,
                t,
                stated
            );
        }
    }
}
