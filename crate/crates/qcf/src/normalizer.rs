//! Centralizer and normalizer computation for cyclic groups via linear
//! systems, the prime-index subgroup ladder, and anchor-based subgroup
//! conjugacy.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::groups::conjugacy::{conjugator, invariant_factors};
use crate::groups::{closure_extend, MatrixGroup};
use std::collections::{BTreeMap, BTreeSet};

/// Default cap on the solution-space dimension enumerated per slice.
pub const DEFAULT_SLICE_DIM_CAP: usize = 24;

/// Basis of the matrix algebra `{X : X M = M X}`.
#[derive(Clone, Debug)]
pub struct CentralizerAlgebra {
    pub basis: Vec<BitMatrix>,
    pub dim: usize,
}

/// Basis of the intertwiner space `{X : X a = b X for every pair (a, b)}`,
/// solved as one stacked linear system over the `n^2` matrix entries.
fn intertwiner_space(pairs: &[(&BitMatrix, &BitMatrix)]) -> Result<Vec<BitMatrix>> {
    let n = pairs
        .first()
        .map(|(a, _)| a.ncols())
        .ok_or_else(|| Error::DimensionMismatch("no intertwiner pairs".into()))?;
    if n * n > crate::gf2::MAX_DIM {
        return Err(Error::DimensionMismatch(format!(
            "linear system needs {}^2 <= {} unknowns",
            n,
            crate::gf2::MAX_DIM
        )));
    }
    // unknowns X[i][j] indexed i*n+j; equation (i,j): (X a)_{ij} + (b X)_{ij} = 0
    let mut equations = Vec::with_capacity(pairs.len() * n * n);
    for (a, b) in pairs {
        if !a.is_square() || !b.is_square() || a.ncols() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch("intertwiner dimensions".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let mut row = 0u64;
                for l in 0..n {
                    if a.get(l, j) {
                        row ^= 1 << (i * n + l);
                    }
                    if b.get(i, l) {
                        row ^= 1 << (l * n + j);
                    }
                }
                equations.push(row);
            }
        }
    }
    let system = BitMatrix::from_rows(equations, n * n);
    let kernel = system.kernel_basis();
    let mut out = Vec::with_capacity(kernel.nrows());
    for r in 0..kernel.nrows() {
        let bits = kernel.row_bits(r);
        let rows: Vec<u64> = (0..n)
            .map(|i| (bits >> (i * n)) & ((1u64 << n) - 1))
            .collect();
        out.push(BitMatrix::from_rows(rows, n));
    }
    Ok(out)
}

fn commute_solution_space(a: &BitMatrix, b: &BitMatrix) -> Result<Vec<BitMatrix>> {
    intertwiner_space(&[(a, b)])
}

/// Basis of the solution space of `X M - M X = 0`.
pub fn centralizer_basis(m: &BitMatrix) -> Result<CentralizerAlgebra> {
    let basis = commute_solution_space(m, m)?;
    let dim = basis.len();
    Ok(CentralizerAlgebra { basis, dim })
}

/// Which coprime twists contributed elements.
#[derive(Clone, Debug)]
pub struct SliceInfo {
    pub power: u64,
    pub solution_dim: usize,
    pub invertible_count: usize,
}

#[derive(Clone, Debug)]
pub struct NormalizerOutcome {
    pub group: MatrixGroup,
    pub slices: Vec<SliceInfo>,
}

/// The normalizer `{g : g^-1 <c> g = <c>}` of a cyclic group in `GL(n,2)`,
/// as the union over `k` coprime to `ord(c)` of the invertible solutions of
/// `g c = c^k g`, each slice enumerated from its linear solution basis.
pub fn normalizer_of_cyclic(c: &BitMatrix) -> Result<NormalizerOutcome> {
    normalizer_of_cyclic_with_cap(c, DEFAULT_SLICE_DIM_CAP)
}

pub fn normalizer_of_cyclic_with_cap(c: &BitMatrix, dim_cap: usize) -> Result<NormalizerOutcome> {
    if c.is_identity() {
        return Ok(NormalizerOutcome {
            group: MatrixGroup::general_linear(c.ncols()),
            slices: Vec::new(),
        });
    }
    let order = c.element_order(1_000_000)?;
    let powers: Vec<u64> = (1..order).filter(|&k| gcd(k, order) == 1).collect();
    // slices are independent; the merge below is a deterministic set union
    let per_slice: Vec<Result<(SliceInfo, Vec<BitMatrix>)>> = {
        use rayon::prelude::*;
        powers
            .par_iter()
            .map(|&k| {
                let ck = c.pow(k)?;
                let basis = commute_solution_space(c, &ck)?;
                let dim = basis.len();
                if dim > dim_cap {
                    return Err(Error::CentralizerTooLarge { dim, cap: dim_cap });
                }
                let mut found = Vec::new();
                // Gray-code walk over the solution space
                let mut x = BitMatrix::zeros(c.nrows(), c.ncols());
                for step in 1u64..(1u64 << dim) {
                    let flip = step.trailing_zeros() as usize;
                    x = x.add(&basis[flip])?;
                    if x.is_invertible() {
                        found.push(x.clone());
                    }
                }
                let info = SliceInfo {
                    power: k,
                    solution_dim: dim,
                    invertible_count: found.len(),
                };
                Ok((info, found))
            })
            .collect()
    };
    let mut elements: Vec<BitMatrix> = Vec::new();
    let mut slices = Vec::new();
    for item in per_slice {
        let (info, mut found) = item?;
        slices.push(info);
        elements.append(&mut found);
    }
    if elements.is_empty() {
        return Err(Error::InvalidGroup(
            "normalizer search produced no invertible elements".into(),
        ));
    }
    let group = MatrixGroup::from_elements(None, elements)?;
    Ok(NormalizerOutcome { group, slices })
}

/// Brute-force normalizer of a subgroup within an explicit ambient group.
pub fn normalizer_within(ambient: &MatrixGroup, subgroup: &MatrixGroup) -> Result<MatrixGroup> {
    let amb = ambient
        .elements()
        .ok_or_else(|| Error::InvalidGroup("ambient group must be closed".into()))?;
    let sub = subgroup
        .elements()
        .ok_or_else(|| Error::InvalidGroup("subgroup must be closed".into()))?;
    let sub_keys: BTreeSet<&[u64]> = sub.iter().map(|m| m.rows()).collect();
    let mut els = Vec::new();
    for h in amb {
        let hinv = h.inverse()?;
        let mut ok = true;
        for t in sub {
            let conj = hinv.mul(t)?.mul(h)?;
            if !sub_keys.contains(conj.rows()) {
                ok = false;
                break;
            }
        }
        if ok {
            els.push(h.clone());
        }
    }
    MatrixGroup::from_elements(None, els)
}

/// One `(T, N)` pair with `T` normal in `N`, plus the target orders.
///
/// `ambient` is the group the ladder runs in: `None` means `GL(n,2)`
/// (cross-pair fusion uses the cyclic-anchor conjugacy test); an explicit
/// closed group makes fusion an exact brute-force conjugacy sweep.
#[derive(Clone, Debug)]
pub struct LadderInput {
    pub pairs: Vec<(MatrixGroup, MatrixGroup)>,
    pub t: u64,
    pub u: u64,
    pub ambient: Option<MatrixGroup>,
}

#[derive(Clone, Debug)]
pub struct LadderOutcome {
    /// Candidate subgroups after within-pair dedup and cross-pair fusion
    /// (unresolved pairs kept separate).
    pub groups: Vec<MatrixGroup>,
    /// Proven class-count interval: `lower <= true classes <= upper`.
    pub class_count_lower: usize,
    pub class_count_upper: usize,
}

/// All subgroups `U` with `T` normal in `U <= N_G(T)` and `|U| = u`, per
/// the prime-index case: `U/T` is generated by one coset `gT` of order
/// `u/t` in `N/T`. Deduplicated up to `N`-conjugacy, then fused across
/// pairs via the cyclic-anchor subgroup conjugacy test where tractable.
pub fn ladder_extend(input: &LadderInput) -> Result<LadderOutcome> {
    let p = input
        .u
        .checked_div(input.t)
        .filter(|q| q * input.t == input.u)
        .ok_or_else(|| Error::InvalidGroup("ladder needs t | u".into()))?;
    if !is_prime(p) {
        return Err(Error::InvalidGroup(format!(
            "ladder implemented for prime index, got u/t = {p}"
        )));
    }
    // pairs are independent; concatenation keeps input order
    let per_pair: Vec<Result<Vec<MatrixGroup>>> = {
        use rayon::prelude::*;
        input
            .pairs
            .par_iter()
            .map(|(t_group, n_group)| ladder_one_pair(t_group, n_group, p, input.t))
            .collect()
    };
    let mut all_candidates: Vec<MatrixGroup> = Vec::new();
    for found in per_pair {
        all_candidates.extend(found?);
    }
    fuse_candidates(all_candidates, input.ambient.as_ref())
}

/// Exact subgroup conjugacy within an explicit ambient group.
fn conjugate_within(ambient: &MatrixGroup, u1: &MatrixGroup, u2: &MatrixGroup) -> Result<bool> {
    if u1.order() != u2.order() {
        return Ok(false);
    }
    let amb = ambient
        .elements()
        .ok_or_else(|| Error::InvalidGroup("explicit ambient must be closed".into()))?;
    let u2_keys: BTreeSet<&[u64]> = u2.elements().unwrap().iter().map(|m| m.rows()).collect();
    let u1_els = u1.elements().unwrap();
    for g in amb {
        let ginv = g.inverse()?;
        let mut all = true;
        for m in u1_els {
            let conj = ginv.mul(m)?.mul(g)?;
            if !u2_keys.contains(conj.rows()) {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}

fn ladder_one_pair(
    t_group: &MatrixGroup,
    n_group: &MatrixGroup,
    p: u64,
    t_order: u64,
) -> Result<Vec<MatrixGroup>> {
    let t_els = t_group
        .elements()
        .ok_or_else(|| Error::InvalidGroup("ladder T must be closed".into()))?;
    let n_els = n_group
        .elements()
        .ok_or_else(|| Error::InvalidGroup("ladder N must be closed".into()))?;
    if t_els.len() as u64 != t_order {
        return Err(Error::InvalidGroup(format!(
            "T has order {} but ladder expects {}",
            t_els.len(),
            t_order
        )));
    }
    let t_keys: BTreeSet<Vec<u64>> = t_els.iter().map(|m| m.rows().to_vec()).collect();
    // T must be normal in N (generators suffice)
    for g in n_group.generators() {
        let ginv = g.inverse()?;
        for t in t_els {
            let conj = ginv.mul(t)?.mul(g)?;
            if !t_keys.contains(conj.rows()) {
                return Err(Error::InvalidGroup("T is not normal in N".into()));
            }
        }
    }
    // partition N into cosets of T, keep cosets whose p-th power lands in T
    let mut assigned: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut candidates: BTreeMap<Vec<u64>, MatrixGroup> = BTreeMap::new();
    for g in n_els {
        if assigned.contains(g.rows()) {
            continue;
        }
        let coset: Vec<BitMatrix> = t_els.iter().map(|t| g.mul(t)).collect::<Result<_>>()?;
        for m in &coset {
            assigned.insert(m.rows().to_vec());
        }
        if t_keys.contains(g.rows()) {
            continue; // the trivial coset
        }
        if !t_keys.contains(g.pow(p)?.rows()) {
            continue;
        }
        // U = T u gT u ... u g^{p-1}T
        let mut u_els: Vec<BitMatrix> = t_els.to_vec();
        let mut power = g.clone();
        for _ in 0..p - 1 {
            for t in t_els {
                u_els.push(power.mul(t)?);
            }
            power = power.mul(g)?;
        }
        u_els.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
        u_els.dedup();
        debug_assert_eq!(u_els.len() as u64, t_order * p);
        let key = flatten_keys(&u_els);
        candidates.entry(key).or_insert_with(|| {
            MatrixGroup::from_elements(None, u_els.clone()).expect("U is a group")
        });
    }
    // dedup candidates up to N-conjugacy by orbit sweeps
    let n_gens = n_group.generators().to_vec();
    let n_gen_invs: Vec<BitMatrix> = n_gens.iter().map(|g| g.inverse()).collect::<Result<_>>()?;
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut reps: Vec<MatrixGroup> = Vec::new();
    for (key, group) in &candidates {
        if seen.contains(key) {
            continue;
        }
        // BFS over the N-conjugation orbit of this subgroup
        let mut queue: Vec<Vec<BitMatrix>> = vec![group.elements().unwrap().to_vec()];
        seen.insert(key.clone());
        let mut head = 0;
        while head < queue.len() {
            let current = queue[head].clone();
            head += 1;
            for (g, ginv) in n_gens.iter().zip(&n_gen_invs) {
                let mut conj: Vec<BitMatrix> = current
                    .iter()
                    .map(|m| ginv.mul(m).and_then(|x| x.mul(g)))
                    .collect::<Result<_>>()?;
                conj.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
                let ckey = flatten_keys(&conj);
                if seen.insert(ckey) {
                    queue.push(conj);
                }
            }
        }
        reps.push(group.clone());
    }
    // every returned U has T as a normal subgroup: direct check on generators
    for u in &reps {
        for g in u.generators() {
            let ginv = g.inverse()?;
            for t in t_els {
                let conj = ginv.mul(t)?.mul(g)?;
                debug_assert!(t_keys.contains(conj.rows()));
                let _ = conj;
            }
        }
    }
    Ok(reps)
}

fn flatten_keys(els: &[BitMatrix]) -> Vec<u64> {
    let mut key = Vec::with_capacity(els.len() * els[0].nrows());
    for e in els {
        key.extend_from_slice(e.rows());
    }
    key
}

/// A characteristic cyclic subgroup usable as a conjugacy anchor: the
/// subgroup generated by all elements of some fixed order, when cyclic.
/// Returns a generator of maximal-order choice, scanning orders descending.
fn cyclic_anchor(u: &MatrixGroup) -> Result<Option<BitMatrix>> {
    let els = u
        .elements()
        .ok_or_else(|| Error::InvalidGroup("anchor needs a closed group".into()))?;
    let order = u.order().unwrap() as u64;
    let mut by_order: BTreeMap<u64, Vec<&BitMatrix>> = BTreeMap::new();
    for e in els {
        by_order.entry(e.element_order(order)?).or_default().push(e);
    }
    for (&o, members) in by_order.iter().rev() {
        if o == 1 {
            break;
        }
        // closure of all elements of order o
        let mut closed: Vec<BitMatrix> = vec![BitMatrix::identity(u.dim())];
        let mut gens: Vec<BitMatrix> = Vec::new();
        for &m in members {
            if closed.binary_search_by(|c| c.rows().cmp(m.rows())).is_err() {
                closed = closure_extend(&closed, m, &gens, els.len() + 1)?;
                gens.push(m.clone());
            }
        }
        if closed.len() as u64 == o {
            // cyclic of order o: characteristic anchor found
            let gen = members
                .iter()
                .min_by_key(|m| m.rows())
                .expect("nonempty")
                .to_owned()
                .clone();
            return Ok(Some(gen));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConjugacyAnswer {
    Conjugate,
    NotConjugate,
    Unknown,
}

/// Subgroup conjugacy in `GL(n,2)`.
///
/// Groups with a characteristic cyclic anchor are decided by conjugating the
/// anchors and sweeping the anchor's normalizer. Small anchorless groups are
/// decided exactly by enumerating generator-image assignments and the
/// invertible elements of each assignment's intertwiner space. `Unknown`
/// only when every route exceeds its enumeration cap.
pub fn subgroup_conjugate(u1: &MatrixGroup, u2: &MatrixGroup) -> Result<ConjugacyAnswer> {
    if u1.order() != u2.order() {
        return Ok(ConjugacyAnswer::NotConjugate);
    }
    let a1 = cyclic_anchor(u1)?;
    let a2 = cyclic_anchor(u2)?;
    let (a1, a2) = match (a1, a2) {
        (Some(a1), Some(a2)) => (a1, a2),
        (None, None) => return conjugate_by_intertwiners(u1, u2, DEFAULT_SLICE_DIM_CAP),
        // the anchor construction is conjugation-invariant, so existence on
        // one side only separates the classes
        _ => return Ok(ConjugacyAnswer::NotConjugate),
    };
    let o1 = a1.element_order(1_000_000)?;
    let o2 = a2.element_order(1_000_000)?;
    if o1 != o2 {
        return Ok(ConjugacyAnswer::NotConjugate);
    }
    let chain2 = invariant_factors(&a2)?;
    let mut h0 = None;
    for k in 1..o1 {
        if gcd(k, o1) != 1 {
            continue;
        }
        let cand = a1.pow(k)?;
        if invariant_factors(&cand)? == chain2 {
            h0 = Some(conjugator(&cand, &a2)?);
            break;
        }
    }
    let Some(h0) = h0 else {
        return Ok(ConjugacyAnswer::NotConjugate);
    };
    let normalizer = match normalizer_of_cyclic(&a2) {
        Ok(out) => out.group,
        Err(Error::CentralizerTooLarge { .. }) => return Ok(ConjugacyAnswer::Unknown),
        Err(e) => return Err(e),
    };
    let u2_keys: BTreeSet<&[u64]> = u2
        .elements()
        .ok_or_else(|| Error::InvalidGroup("closed groups required".into()))?
        .iter()
        .map(|m| m.rows())
        .collect();
    let u1_els = u1
        .elements()
        .ok_or_else(|| Error::InvalidGroup("closed groups required".into()))?;
    for nrm in normalizer.elements().unwrap() {
        let g = h0.mul(nrm)?;
        let ginv = g.inverse()?;
        let mut all = true;
        for m in u1_els {
            let conj = ginv.mul(m)?.mul(&g)?;
            if !u2_keys.contains(conj.rows()) {
                all = false;
                break;
            }
        }
        if all {
            return Ok(ConjugacyAnswer::Conjugate);
        }
    }
    Ok(ConjugacyAnswer::NotConjugate)
}

/// Exact conjugacy for small anchorless groups: any conjugator carries the
/// generators of `u1` to a generating tuple of `u2` and lies in the
/// intertwiner space of the induced pairing, so enumerate generating image
/// tuples and the invertible intertwiners of each.
fn conjugate_by_intertwiners(
    u1: &MatrixGroup,
    u2: &MatrixGroup,
    dim_cap: usize,
) -> Result<ConjugacyAnswer> {
    let order = match (u1.order(), u2.order()) {
        (Some(a), Some(b)) if a == b => a,
        _ => return Ok(ConjugacyAnswer::Unknown),
    };
    let gens1 = u1.generators();
    let els2 = u2
        .elements()
        .ok_or_else(|| Error::InvalidGroup("closed groups required".into()))?;
    let assignments = (els2.len() as u128).pow(gens1.len() as u32);
    if order > 64 || assignments > 100_000 {
        return Ok(ConjugacyAnswer::Unknown);
    }
    let orders1: Vec<u64> = gens1
        .iter()
        .map(|g| g.element_order(order as u64))
        .collect::<Result<_>>()?;
    let orders2: Vec<u64> = els2
        .iter()
        .map(|g| g.element_order(order as u64))
        .collect::<Result<_>>()?;

    fn search(
        gens1: &[BitMatrix],
        orders1: &[u64],
        els2: &[BitMatrix],
        orders2: &[u64],
        order: u128,
        dim_cap: usize,
        tuple: &mut Vec<usize>,
        any_over_cap: &mut bool,
    ) -> Result<bool> {
        if tuple.len() == gens1.len() {
            let imgs: Vec<BitMatrix> = tuple.iter().map(|&i| els2[i].clone()).collect();
            let generates = MatrixGroup::from_generators(None, imgs.clone())
                .and_then(|g| g.closure(els2.len() + 1))
                .map(|g| g.order() == Some(order))
                .unwrap_or(false);
            if !generates {
                return Ok(false);
            }
            let pairs: Vec<(&BitMatrix, &BitMatrix)> =
                gens1.iter().zip(imgs.iter()).map(|(a, b)| (a, b)).collect();
            let basis = intertwiner_space(&pairs)?;
            if basis.len() > dim_cap {
                *any_over_cap = true;
                return Ok(false);
            }
            if basis.is_empty() {
                return Ok(false);
            }
            let n = gens1[0].ncols();
            let mut x = BitMatrix::zeros(n, n);
            for step in 1u64..(1u64 << basis.len()) {
                let flip = step.trailing_zeros() as usize;
                x = x.add(&basis[flip])?;
                if x.is_invertible() {
                    // g gen_i g^-1 = img_i, so g u1 g^-1 = <imgs> = u2
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        for i in 0..els2.len() {
            if orders2[i] != orders1[tuple.len()] {
                continue;
            }
            tuple.push(i);
            let found = search(
                gens1,
                orders1,
                els2,
                orders2,
                order,
                dim_cap,
                tuple,
                any_over_cap,
            )?;
            tuple.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let mut tuple = Vec::with_capacity(gens1.len());
    let mut any_over_cap = false;
    if search(
        gens1,
        &orders1,
        els2,
        &orders2,
        order,
        dim_cap,
        &mut tuple,
        &mut any_over_cap,
    )? {
        return Ok(ConjugacyAnswer::Conjugate);
    }
    if any_over_cap {
        Ok(ConjugacyAnswer::Unknown)
    } else {
        Ok(ConjugacyAnswer::NotConjugate)
    }
}

/// Fuse ladder candidates across pairs, producing the class interval.
fn fuse_candidates(
    candidates: Vec<MatrixGroup>,
    ambient: Option<&MatrixGroup>,
) -> Result<LadderOutcome> {
    let n = candidates.len();
    let mut proven = vec![usize::MAX; n]; // union-find over proven conjugacy
    for i in 0..n {
        proven[i] = i;
    }
    fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut optimistic = proven.clone(); // additionally merges unknowns
    for i in 0..n {
        for j in i + 1..n {
            let a = match ambient {
                Some(h) => {
                    if conjugate_within(h, &candidates[i], &candidates[j])? {
                        ConjugacyAnswer::Conjugate
                    } else {
                        ConjugacyAnswer::NotConjugate
                    }
                }
                None => subgroup_conjugate(&candidates[i], &candidates[j])?,
            };
            match a {
                ConjugacyAnswer::Conjugate => {
                    let (ri, rj) = (find(&mut proven, i), find(&mut proven, j));
                    if ri != rj {
                        proven[ri.max(rj)] = ri.min(rj);
                    }
                    let (oi, oj) = (find(&mut optimistic, i), find(&mut optimistic, j));
                    if oi != oj {
                        optimistic[oi.max(oj)] = oi.min(oj);
                    }
                }
                ConjugacyAnswer::Unknown => {
                    // only merge optimistically when coarse invariants agree
                    if crate::groups::fingerprint::group_fingerprint(&candidates[i])?
                        == crate::groups::fingerprint::group_fingerprint(&candidates[j])?
                    {
                        let (oi, oj) = (find(&mut optimistic, i), find(&mut optimistic, j));
                        if oi != oj {
                            optimistic[oi.max(oj)] = oi.min(oj);
                        }
                    }
                }
                ConjugacyAnswer::NotConjugate => {}
            }
        }
    }
    let mut kept = Vec::new();
    for i in 0..n {
        if find(&mut proven, i) == i {
            kept.push(candidates[i].clone());
        }
    }
    let upper = kept.len();
    let lower = (0..n).filter(|&i| find(&mut optimistic, i) == i).count();
    Ok(LadderOutcome {
        groups: kept,
        class_count_lower: lower,
        class_count_upper: upper,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::gf2::{companion, GF2Poly};

    #[test]
    fn centralizer_of_identity_is_everything() {
        let c = centralizer_basis(&BitMatrix::identity(7)).unwrap();
        assert_eq!(c.dim, 49);
    }

    #[test]
    fn centralizer_of_regular_element_is_polynomial_algebra() {
        // an order-127 element is cyclic with a single degree-7 factor
        let p = GF2Poly::from_bit_string("11000001").unwrap();
        let m = companion(&p).unwrap();
        let c = centralizer_basis(&m).unwrap();
        assert_eq!(c.dim, 7);
        for b in &c.basis {
            assert_eq!(b.mul(&m).unwrap(), m.mul(b).unwrap());
        }
    }

    #[test]
    fn centralizer_dim_is_conjugation_invariant() {
        let g14 = data::bundled_group(14, 1).unwrap();
        let m = &g14.generators[0];
        let mut c = BitMatrix::identity(7);
        c.set(0, 4, true);
        c.set(3, 6, true);
        let conj = c.inverse().unwrap().mul(m).unwrap().mul(&c).unwrap();
        assert_eq!(
            centralizer_basis(m).unwrap().dim,
            centralizer_basis(&conj).unwrap().dim
        );
    }

    #[test]
    fn normalizer_of_identity_is_gl() {
        let out = normalizer_of_cyclic(&BitMatrix::identity(7)).unwrap();
        assert_eq!(out.group.order(), Some(163_849_992_929_280));
    }

    #[test]
    fn normalizer_of_order14_generator_has_order_168() {
        let g14 = data::bundled_group(14, 1).unwrap();
        let out = normalizer_of_cyclic(&g14.generators[0]).unwrap();
        assert_eq!(out.group.order(), Some(168));
        // contains the cyclic group itself and its centralizer slice
        let cyc = MatrixGroup::from_generators(None, vec![g14.generators[0].clone()])
            .unwrap()
            .closure(20)
            .unwrap();
        for e in cyc.elements().unwrap() {
            assert!(out.group.contains(e));
        }
        // group check: closed under product and inverse
        let els = out.group.elements().unwrap();
        let mut state = 0x2468ace13579bdfu64;
        for _ in 0..200 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let a = &els[(state as usize) % els.len()];
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let b = &els[(state as usize) % els.len()];
            assert!(out.group.contains(&a.mul(b).unwrap()));
            assert!(out.group.contains(&a.inverse().unwrap()));
        }
        // normalizes <c>: conjugation permutes the cyclic subgroup
        let c = &g14.generators[0];
        let cyc_keys: BTreeSet<&[u64]> = cyc.elements().unwrap().iter().map(|m| m.rows()).collect();
        for e in els.iter().step_by(7) {
            let conj = e.inverse().unwrap().mul(c).unwrap().mul(e).unwrap();
            assert!(cyc_keys.contains(conj.rows()));
        }
    }

    #[test]
    fn ladder_from_trivial_group_finds_involution_classes() {
        // inside the order-168 normalizer of the order-14 element
        let g14 = data::bundled_group(14, 1).unwrap();
        let ambient = normalizer_of_cyclic(&g14.generators[0]).unwrap().group;
        let trivial = MatrixGroup::trivial(7);
        let input = LadderInput {
            pairs: vec![(trivial, ambient.clone())],
            t: 1,
            u: 2,
            ambient: Some(ambient.clone()),
        };
        let out = ladder_extend(&input).unwrap();
        assert!(!out.groups.is_empty());
        for g in &out.groups {
            assert_eq!(g.order(), Some(2));
            let nontrivial = g
                .elements()
                .unwrap()
                .iter()
                .find(|e| !e.is_identity())
                .unwrap();
            assert!(ambient.contains(nontrivial));
        }
    }

    #[test]
    fn subgroup_conjugacy_cyclic_positive_and_negative() {
        use crate::groups::conjugacy::cyclic_subgroup_classes;
        let classes = cyclic_subgroup_classes(7, 7).unwrap();
        assert_eq!(classes.len(), 3);
        // conjugating one class by a fixed matrix stays conjugate to itself
        let g = &classes[0];
        let mut c = BitMatrix::identity(7);
        c.set(1, 5, true);
        c.set(4, 0, true);
        let cinv = c.inverse().unwrap();
        let conj_gens: Vec<BitMatrix> = g
            .generators()
            .iter()
            .map(|m| cinv.mul(m).unwrap().mul(&c).unwrap())
            .collect();
        let gc = MatrixGroup::from_generators(None, conj_gens)
            .unwrap()
            .closure(10)
            .unwrap();
        assert_eq!(
            subgroup_conjugate(g, &gc).unwrap(),
            ConjugacyAnswer::Conjugate
        );
        assert_eq!(
            subgroup_conjugate(&classes[0], &classes[1]).unwrap(),
            ConjugacyAnswer::NotConjugate
        );
    }
}
