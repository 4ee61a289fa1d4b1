//! Matrix groups over GF(2): closure, orbits on Grassmannians, element
//! conjugacy via normal forms, abstract-type fingerprints, and code
//! automorphism groups.

pub mod aut;
pub mod conjugacy;
pub mod fingerprint;

pub use aut::{code_automorphisms, code_fixed_by, AutConfig};
pub use conjugacy::{
    conjugator, cyclic_subgroup_classes, invariant_factors, rcf_class_reps, RcfClass,
};
pub use fingerprint::{fingerprint, type_consistent, AbstractType, GroupFingerprint};

use crate::data::GroupFile;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_grassmannian, gaussian_binomial, Code, Subspace};
use crate::gf2::BitMatrix;
use num_bigint::BigUint;
use std::collections::HashMap;

pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// A subgroup of `GL(n,2)` given by generators, optionally with its full
/// element closure.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    name: Option<String>,
    dim: usize,
    generators: Vec<BitMatrix>,
    elements: Option<Vec<BitMatrix>>,
    order: Option<u128>,
}

impl MatrixGroup {
    pub fn from_generators(name: Option<String>, generators: Vec<BitMatrix>) -> Result<Self> {
        let dim = generators
            .first()
            .map(|g| g.ncols())
            .ok_or_else(|| Error::InvalidGroup("no generators".into()))?;
        for g in &generators {
            if !g.is_square() || g.ncols() != dim {
                return Err(Error::InvalidGroup("generators of mixed dimension".into()));
            }
            if !g.is_invertible() {
                return Err(Error::InvalidGroup("singular generator".into()));
            }
        }
        Ok(MatrixGroup {
            name,
            dim,
            generators,
            elements: None,
            order: None,
        })
    }

    pub fn from_group_file(f: &GroupFile) -> Result<Self> {
        let mut g = Self::from_generators(Some(f.name.clone()), f.generators.clone())?;
        if let Some(o) = f.order {
            // stated order is advisory until closure confirms it
            g.order = None;
            let closed = g.closure(DEFAULT_CLOSURE_CAP)?;
            if closed.order() != Some(o as u128) {
                return Err(Error::InvalidGroup(format!(
                    "{} states order {o} but closes to {:?}",
                    f.name,
                    closed.order()
                )));
            }
            return Ok(closed);
        }
        Ok(g)
    }

    pub fn trivial(n: usize) -> Self {
        let id = BitMatrix::identity(n);
        MatrixGroup {
            name: Some("I".into()),
            dim: n,
            generators: vec![id.clone()],
            elements: Some(vec![id]),
            order: Some(1),
        }
    }

    /// The full general linear group, held symbolically (order without an
    /// explicit element list).
    pub fn general_linear(n: usize) -> Self {
        MatrixGroup {
            name: Some(format!("GL({n},2)")),
            dim: n,
            generators: gl_generators(n),
            elements: None,
            order: Some(gl_order(n)),
        }
    }

    /// Wrap an explicit element list that is already closed.
    pub fn from_elements(name: Option<String>, mut elements: Vec<BitMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidGroup("empty element list".into()));
        }
        let dim = elements[0].ncols();
        elements.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
        elements.dedup();
        let order = elements.len() as u128;
        let generators = minimal_generators(&elements, dim);
        Ok(MatrixGroup {
            name,
            dim,
            generators,
            elements: Some(elements),
            order: Some(order),
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[BitMatrix] {
        &self.generators
    }

    pub fn order(&self) -> Option<u128> {
        self.order
    }

    pub fn is_closed(&self) -> bool {
        self.elements.is_some()
    }

    /// Element list in canonical order; present only after closure.
    pub fn elements(&self) -> Option<&[BitMatrix]> {
        self.elements.as_deref()
    }

    pub fn contains(&self, m: &BitMatrix) -> bool {
        match &self.elements {
            Some(els) => els.binary_search_by(|e| e.rows().cmp(m.rows())).is_ok(),
            None => false,
        }
    }

    /// Full element set via breadth-first product closure.
    pub fn closure(&self, cap: usize) -> Result<MatrixGroup> {
        if let Some(els) = &self.elements {
            let _ = els;
            return Ok(self.clone());
        }
        let elements = close_elements(&self.generators, self.dim, cap)?;
        let order = elements.len() as u128;
        Ok(MatrixGroup {
            name: self.name.clone(),
            dim: self.dim,
            generators: self.generators.clone(),
            elements: Some(elements),
            order: Some(order),
        })
    }

    /// Whether some element attains the full group order (i.e. the group is
    /// cyclic). Requires closure.
    pub fn is_cyclic(&self) -> Result<bool> {
        let els = self
            .elements
            .as_ref()
            .ok_or_else(|| Error::InvalidGroup("is_cyclic needs a closed group".into()))?;
        let order = self.order.unwrap() as u64;
        for e in els {
            if e.element_order(order.max(1))? == order {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Some element of maximal order, e.g. a generator when cyclic.
    pub fn element_of_maximal_order(&self) -> Result<(BitMatrix, u64)> {
        let els = self
            .elements
            .as_ref()
            .ok_or_else(|| Error::InvalidGroup("needs a closed group".into()))?;
        let order = self.order.unwrap() as u64;
        let mut best: Option<(BitMatrix, u64)> = None;
        for e in els {
            let o = e.element_order(order)?;
            if best.as_ref().map(|(_, b)| o > *b).unwrap_or(true) {
                best = Some((e.clone(), o));
            }
        }
        Ok(best.expect("group is nonempty"))
    }
}

fn close_elements(generators: &[BitMatrix], dim: usize, cap: usize) -> Result<Vec<BitMatrix>> {
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    let id = BitMatrix::identity(dim);
    let mut queue = vec![id.clone()];
    seen.insert(id.rows().to_vec(), ());
    let mut head = 0;
    while head < queue.len() {
        let current = queue[head].clone();
        head += 1;
        for g in generators {
            let next = current.mul(g)?;
            let key = next.rows().to_vec();
            if let std::collections::hash_map::Entry::Vacant(v) = seen.entry(key) {
                v.insert(());
                queue.push(next);
                if queue.len() > cap {
                    return Err(Error::ClosureCapExceeded { cap });
                }
            }
        }
    }
    queue.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
    Ok(queue)
}

/// Extend a closed element set by one new element, returning the closure of
/// the union. Used to grow generating sets incrementally.
pub(crate) fn closure_extend(
    closed: &[BitMatrix],
    extra: &BitMatrix,
    gens: &[BitMatrix],
    cap: usize,
) -> Result<Vec<BitMatrix>> {
    let dim = extra.ncols();
    let mut all_gens = gens.to_vec();
    all_gens.push(extra.clone());
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut queue: Vec<BitMatrix> = closed.to_vec();
    for e in &queue {
        seen.insert(e.rows().to_vec(), ());
    }
    if seen.is_empty() {
        let id = BitMatrix::identity(dim);
        seen.insert(id.rows().to_vec(), ());
        queue.push(id);
    }
    if seen.insert(extra.rows().to_vec(), ()).is_none() {
        queue.push(extra.clone());
    }
    let mut head = 0;
    while head < queue.len() {
        let current = queue[head].clone();
        head += 1;
        for g in &all_gens {
            let next = current.mul(g)?;
            let key = next.rows().to_vec();
            if let std::collections::hash_map::Entry::Vacant(v) = seen.entry(key) {
                v.insert(());
                queue.push(next);
                if queue.len() > cap {
                    return Err(Error::ClosureCapExceeded { cap });
                }
            }
        }
    }
    queue.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
    Ok(queue)
}

/// Greedy small generating set for an explicit closed element list.
fn minimal_generators(elements: &[BitMatrix], dim: usize) -> Vec<BitMatrix> {
    let id = BitMatrix::identity(dim);
    if elements.len() == 1 {
        return vec![id];
    }
    let mut gens: Vec<BitMatrix> = Vec::new();
    let mut closed = vec![id];
    for e in elements {
        if closed.binary_search_by(|c| c.rows().cmp(e.rows())).is_err() {
            closed = closure_extend(&closed, e, &gens, elements.len() + 1)
                .expect("closure of a subset stays within the group");
            gens.push(e.clone());
            if closed.len() == elements.len() {
                break;
            }
        }
    }
    gens
}

/// Order of `GL(n,2)`.
pub fn gl_order(n: usize) -> u128 {
    let mut o: u128 = 1;
    for i in 0..n {
        o *= (1u128 << n) - (1u128 << i);
    }
    o
}

pub(crate) fn gl_generators(n: usize) -> Vec<BitMatrix> {
    if n == 1 {
        return vec![BitMatrix::identity(1)];
    }
    // full cycle on coordinates plus one transvection
    let mut cycle = BitMatrix::zeros(n, n);
    for i in 0..n {
        cycle.set(i, (i + 1) % n, true);
    }
    let mut transvection = BitMatrix::identity(n);
    transvection.set(1, 0, true);
    vec![cycle, transvection]
}

/// Orbits of a group on the full Grassmannian of `k`-subspaces of `F_2^n`.
#[derive(Clone, Debug)]
pub struct OrbitSpace {
    n: usize,
    k: usize,
    subspaces: Vec<Subspace>,
    assignment: Vec<u32>,
    transversal: Vec<Subspace>,
    sizes: Vec<u64>,
}

impl OrbitSpace {
    pub fn transversal(&self) -> &[Subspace] {
        &self.transversal
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn orbit_count(&self) -> usize {
        self.transversal.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// All subspaces of the Grassmannian in key order, with their orbit ids.
    pub fn assignment(&self) -> (&[Subspace], &[u32]) {
        (&self.subspaces, &self.assignment)
    }

    /// Orbit id and size for a subspace.
    pub fn orbit_of(&self, s: &Subspace) -> Option<(u32, u64)> {
        let pos = self.subspaces.binary_search(s).ok()?;
        let idx = self.assignment[pos];
        Some((idx, self.sizes[idx as usize]))
    }

    pub fn type_string(&self) -> String {
        orbit_type_string(&self.sizes)
    }
}

/// Multiset notation `c1^n1 c2^n2 ...` for a list of orbit sizes.
pub fn orbit_type_string(sizes: &[u64]) -> String {
    let mut counts: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    for &s in sizes {
        *counts.entry(s).or_insert(0) += 1;
    }
    counts
        .iter()
        .map(|(c, n)| format!("{c}^{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Orbit space of the `(n,k)` Grassmannian under a closed group, with
/// key-minimal representatives, deterministically.
pub fn orbit_space(n: usize, k: usize, group: &MatrixGroup) -> Result<OrbitSpace> {
    let order = group
        .order()
        .ok_or_else(|| Error::InvalidGroup("orbit_space needs a closed group".into()))?;
    if group.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "group acts on dimension {}, asked for {}",
            group.dim(),
            n
        )));
    }
    let subspaces = enumerate_grassmannian(n, k)?;
    let total = subspaces.len();
    let mut assignment: Vec<u32> = vec![u32::MAX; total];
    let mut transversal = Vec::new();
    let mut sizes = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..total {
        if assignment[start] != u32::MAX {
            continue;
        }
        let orbit_id = transversal.len() as u32;
        transversal.push(subspaces[start].clone());
        assignment[start] = orbit_id;
        stack.push(start);
        let mut size = 1u64;
        while let Some(pos) = stack.pop() {
            let current = subspaces[pos].clone();
            for g in group.generators() {
                let image = current.apply(g);
                let ipos = subspaces
                    .binary_search(&image)
                    .expect("image stays in the Grassmannian");
                if assignment[ipos] == u32::MAX {
                    assignment[ipos] = orbit_id;
                    stack.push(ipos);
                    size += 1;
                }
            }
        }
        debug_assert_eq!(
            order % size as u128,
            0,
            "orbit size must divide the group order"
        );
        sizes.push(size);
    }
    debug_assert_eq!(
        sizes.iter().map(|&s| s as u128).sum::<u128>(),
        gaussian_binomial(n, k)
    );
    Ok(OrbitSpace {
        n,
        k,
        subspaces,
        assignment,
        transversal,
        sizes,
    })
}

/// Orbits of an explicit set of subspaces under a group. Returns the orbit
/// partition (full orbits, which may leave the set) and whether the set was
/// invariant.
pub fn orbits_of_words(
    words: &[Subspace],
    group: &MatrixGroup,
) -> Result<(Vec<Vec<Subspace>>, bool)> {
    let set: std::collections::BTreeSet<&Subspace> = words.iter().collect();
    let mut seen: std::collections::BTreeSet<Subspace> = std::collections::BTreeSet::new();
    let mut orbits = Vec::new();
    let mut invariant = true;
    for w in words {
        if seen.contains(w) {
            continue;
        }
        let mut orbit = vec![w.clone()];
        seen.insert(w.clone());
        let mut head = 0;
        while head < orbit.len() {
            let current = orbit[head].clone();
            head += 1;
            for g in group.generators() {
                let image = current.apply(g);
                if !set.contains(&image) {
                    invariant = false;
                }
                if seen.insert(image.clone()) {
                    orbit.push(image);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok((orbits, invariant))
}

/// Expand orbit representatives to the union of their orbits.
pub fn expand_orbits(reps: &[Subspace], group: &MatrixGroup) -> Result<Code> {
    let (orbits, _) = orbits_of_words(reps, group)?;
    Code::from_union(orbits.into_iter().flatten().collect())
}

/// Number of involutions in `GL(n,2)`: summed over the rank `r` of `M + I`,
/// choosing the image subspace and a surjection onto it from a complement
/// of the fixed space.
pub fn involution_count(n: usize) -> BigUint {
    assert!(n <= 30, "involution census supports n <= 30");
    let mut total = BigUint::from(0u32);
    for r in 1..=n / 2 {
        let mut term = big_gaussian_binomial(n, r);
        term *= surjective_linear_maps(n - r, r);
        total += term;
    }
    total
}

fn big_gaussian_binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut g = BigUint::from(1u32);
    for i in 1..=k {
        let num = (BigUint::from(1u32) << (n - k + i)) - 1u32;
        let den = (BigUint::from(1u32) << i) - 1u32;
        g = g * num / den;
    }
    g
}

/// Number of surjective linear maps from `F_2^a` onto `F_2^b`.
fn surjective_linear_maps(a: usize, b: usize) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let mut count = BigUint::from(1u32);
    for i in 0..b {
        count *= (BigUint::from(1u32) << a) - (BigUint::from(1u32) << i);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn bundled(order: u64, idx: u32) -> MatrixGroup {
        MatrixGroup::from_group_file(&data::bundled_group(order, idx).unwrap()).unwrap()
    }

    #[test]
    fn closure_of_identity_is_trivial() {
        let g = MatrixGroup::from_generators(None, vec![BitMatrix::identity(7)]).unwrap();
        let c = g.closure(10).unwrap();
        assert_eq!(c.order(), Some(1));
    }

    #[test]
    fn bundled_closures_match_stated_orders() {
        // the full battery covers all 33; spot-check the ones used below
        assert_eq!(bundled(4, 6).order(), Some(4));
        assert_eq!(bundled(16, 1).order(), Some(16));
        assert_eq!(bundled(14, 1).order(), Some(14));
    }

    #[test]
    fn klein_four_structure_of_g46() {
        let g = bundled(4, 6);
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 4);
        let id = BitMatrix::identity(7);
        for e in els {
            if e != &id {
                assert_eq!(e.element_order(10).unwrap(), 2);
            }
        }
        // abelian: the two generators commute
        let a = &g.generators()[0];
        let b = &g.generators()[1];
        assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
    }

    #[test]
    fn g14_generator_has_order_14_and_g2_fixed_space() {
        let g14 = data::bundled_group(14, 1).unwrap();
        assert_eq!(g14.generators[0].element_order(100).unwrap(), 14);
        let g2 = data::bundled_group(2, 1).unwrap();
        let m = &g2.generators[0];
        let fixed = m.add(&BitMatrix::identity(7)).unwrap().kernel_basis();
        assert_eq!(fixed.nrows(), 4);
    }

    #[test]
    fn g8_11_generator_inverse() {
        let g = data::bundled_group(8, 11).unwrap();
        let m = &g.generators[0];
        assert_eq!(
            m.mul(&m.inverse().unwrap()).unwrap(),
            BitMatrix::identity(7)
        );
    }

    #[test]
    fn gl_order_value() {
        assert_eq!(gl_order(7), 163_849_992_929_280);
        assert_eq!(gl_order(3), 168);
        assert_eq!(gl_order(2), 6);
    }

    #[test]
    fn trivial_group_orbits_are_singletons() {
        let t = MatrixGroup::trivial(7);
        let os = orbit_space(7, 3, &t).unwrap();
        assert_eq!(os.orbit_count(), 11811);
        assert_eq!(os.type_string(), "1^11811");
    }

    #[test]
    fn orbit_type_is_conjugation_invariant() {
        let g = bundled(4, 6);
        let os = orbit_space(7, 3, &g).unwrap();
        let base_type = os.type_string();
        // conjugate the group by a fixed invertible matrix
        let mut c = BitMatrix::identity(7);
        c.set(0, 3, true);
        c.set(2, 5, true);
        c.set(4, 1, true);
        assert!(c.is_invertible());
        let cinv = c.inverse().unwrap();
        let conj_gens: Vec<BitMatrix> = g
            .generators()
            .iter()
            .map(|m| cinv.mul(m).unwrap().mul(&c).unwrap())
            .collect();
        let gc = MatrixGroup::from_generators(None, conj_gens)
            .unwrap()
            .closure(100)
            .unwrap();
        let osc = orbit_space(7, 3, &gc).unwrap();
        assert_eq!(osc.type_string(), base_type);
    }

    #[test]
    fn orbit_stabilizer_identity_holds() {
        let g = bundled(14, 1);
        let os = orbit_space(7, 3, &g).unwrap();
        let order = g.order().unwrap();
        for &size in os.sizes() {
            assert_eq!(order % size as u128, 0);
        }
        assert_eq!(
            os.sizes().iter().map(|&s| s as u128).sum::<u128>(),
            11811u128
        );
    }

    #[test]
    fn involution_counts() {
        assert_eq!(involution_count(7), BigUint::from(32_252_031u64));
        assert_eq!(involution_count(1), BigUint::from(0u32));
        // brute force over all invertible 2x2 and 3x3 matrices
        for n in [2usize, 3] {
            let mut brute = 0u64;
            for bits in 0..(1u64 << (n * n)) {
                let rows: Vec<u64> = (0..n).map(|i| (bits >> (i * n)) & ((1 << n) - 1)).collect();
                let m = BitMatrix::from_rows(rows, n);
                if m.is_invertible() && !m.is_identity() && m.mul(&m).unwrap().is_identity() {
                    brute += 1;
                }
            }
            assert_eq!(involution_count(n), BigUint::from(brute));
        }
    }

    #[test]
    fn minimal_generators_regenerate() {
        let g = bundled(16, 1);
        let els = g.elements().unwrap().to_vec();
        let rebuilt = MatrixGroup::from_elements(None, els.clone()).unwrap();
        assert_eq!(rebuilt.order(), Some(16));
        let re_closed = MatrixGroup::from_generators(None, rebuilt.generators().to_vec())
            .unwrap()
            .closure(100)
            .unwrap();
        assert_eq!(re_closed.elements().unwrap(), &els[..]);
    }
}
