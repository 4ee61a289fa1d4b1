//! Element conjugacy in `GL(n,2)` via invariant-factor chains, normal-form
//! class representatives, and explicit conjugating matrices from cyclic
//! (Krylov) decompositions.

use super::MatrixGroup;
use crate::error::{Error, Result};
use crate::gf2::{block_diag, companion, poly_list, BitMatrix, GF2Poly};

/// One `GL(n,2)`-conjugacy class of matrices, named by its invariant-factor
/// chain `f_1 | f_2 | ... | f_m` with degrees summing to `n`.
#[derive(Clone, Debug)]
pub struct RcfClass {
    /// Ascending divisibility chain; every factor has nonzero constant term
    /// for invertible classes.
    pub invariant_factors: Vec<GF2Poly>,
    /// Block-diagonal companion representative, smallest factor first.
    pub representative: BitMatrix,
}

fn row_times_matrix(row: u64, m: &BitMatrix) -> u64 {
    let mut acc = 0u64;
    let mut bits = row;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        acc ^= m.row_bits(i);
        bits &= bits - 1;
    }
    acc
}

fn matrix_times_col(m: &BitMatrix, col: u64) -> u64 {
    let mut out = 0u64;
    for i in 0..m.nrows() {
        if (m.row_bits(i) & col).count_ones() % 2 == 1 {
            out |= 1 << i;
        }
    }
    out
}

/// Echelonized row store that remembers how each reduced row combines the
/// inserted originals; used to express vectors in a given row basis.
struct RowSolver {
    ech: Vec<(u64, u64)>, // (reduced row, combination mask over inserted rows)
}

impl RowSolver {
    fn new(rows: &[u64]) -> RowSolver {
        let mut s = RowSolver { ech: Vec::new() };
        for (i, &r) in rows.iter().enumerate() {
            let inserted = s.insert(r, 1u64 << i);
            assert!(inserted, "row basis must be linearly independent");
        }
        s
    }

    fn insert(&mut self, mut row: u64, mut comb: u64) -> bool {
        for &(r, c) in &self.ech {
            if row >> r.trailing_zeros() & 1 == 1 {
                row ^= r;
                comb ^= c;
            }
        }
        if row == 0 {
            return false;
        }
        let pivot = row.trailing_zeros();
        for (r, c) in self.ech.iter_mut() {
            if *r >> pivot & 1 == 1 {
                *r ^= row;
                *c ^= comb;
            }
        }
        self.ech.push((row, comb));
        true
    }

    /// Combination mask `x` with `x * rows = target`, if representable.
    fn solve(&self, mut target: u64) -> Option<u64> {
        let mut comb = 0u64;
        for &(r, c) in &self.ech {
            if target >> r.trailing_zeros() & 1 == 1 {
                target ^= r;
                comb ^= c;
            }
        }
        (target == 0).then_some(comb)
    }
}

/// Minimal polynomial of a vector under the action `v -> v * M`.
fn min_poly_of_vector(m: &BitMatrix, v: u64) -> GF2Poly {
    let n = m.ncols();
    let mut ech: Vec<(u64, u64)> = Vec::new(); // (reduced krylov row, poly mask)
    let mut w = v;
    let mut poly = 1u64;
    for _ in 0..=n {
        let mut cur = w;
        let mut cpoly = poly;
        for &(r, p) in &ech {
            if cur >> r.trailing_zeros() & 1 == 1 {
                cur ^= r;
                cpoly ^= p;
            }
        }
        if cur == 0 {
            return GF2Poly::from_coeff_bits(cpoly);
        }
        let pivot = cur.trailing_zeros();
        for (r, p) in ech.iter_mut() {
            if *r >> pivot & 1 == 1 {
                *r ^= cur;
                *p ^= cpoly;
            }
        }
        ech.push((cur, cpoly));
        w = row_times_matrix(w, m);
        poly <<= 1;
    }
    unreachable!("a vector in dimension n has minimal polynomial of degree <= n");
}

/// Monic irreducible polynomials of degree 1..=max_degree, ascending.
fn irreducibles(max_degree: usize) -> Vec<GF2Poly> {
    let mut irred: Vec<GF2Poly> = Vec::new();
    for p in poly_list(max_degree) {
        let d = p.degree().unwrap();
        if irred
            .iter()
            .take_while(|q| q.degree().unwrap() * 2 <= d)
            .all(|q| !q.divides(&p))
        {
            irred.push(p);
        }
    }
    irred
}

fn factorize(p: &GF2Poly, irred: &[GF2Poly]) -> Vec<(GF2Poly, usize)> {
    let mut rest = *p;
    let mut out = Vec::new();
    for q in irred {
        if q.degree() > rest.degree() {
            break;
        }
        let mut e = 0;
        while q.divides(&rest) {
            rest = rest.div_rem(q).0;
            e += 1;
        }
        if e > 0 {
            out.push((*q, e));
        }
        if rest.degree() == Some(0) {
            break;
        }
    }
    assert_eq!(rest, GF2Poly::ONE, "factorization incomplete for {p:?}");
    out
}

/// Vector whose minimal polynomial is `lcm(mu_v, mu_w)`, built by splitting
/// the lcm into coprime parts carried by `v` and `w`.
fn combine_vectors(m: &BitMatrix, v: u64, mu_v: &GF2Poly, w: u64, mu_w: &GF2Poly) -> Result<u64> {
    let n = m.ncols();
    let irred = irreducibles(n);
    let fv = factorize(mu_v, &irred);
    let fw = factorize(mu_w, &irred);
    let mut a = GF2Poly::ONE; // part of the lcm assigned to v
    let mut b = GF2Poly::ONE; // part assigned to w
    let mut primes: Vec<GF2Poly> = fv.iter().chain(fw.iter()).map(|(q, _)| *q).collect();
    primes.sort_unstable();
    primes.dedup();
    for q in primes {
        let ev = fv
            .iter()
            .find(|(p, _)| *p == q)
            .map(|(_, e)| *e)
            .unwrap_or(0);
        let ew = fw
            .iter()
            .find(|(p, _)| *p == q)
            .map(|(_, e)| *e)
            .unwrap_or(0);
        if ev >= ew {
            a = a.mul(&q.pow(ev));
        } else {
            b = b.mul(&q.pow(ew));
        }
    }
    let qv = mu_v.div_rem(&a).0; // kills everything but the a-part
    let qw = mu_w.div_rem(&b).0;
    let v2 = row_times_matrix(v, &qv.eval_matrix(m)?);
    let w2 = row_times_matrix(w, &qw.eval_matrix(m)?);
    Ok(v2 ^ w2)
}

/// A vector whose minimal polynomial equals the minimal polynomial of `m`.
fn maximal_vector(m: &BitMatrix) -> Result<(u64, GF2Poly)> {
    let n = m.ncols();
    let mut z = 1u64;
    let mut mu = min_poly_of_vector(m, z);
    for i in 1..n {
        if mu.degree() == Some(n) {
            break;
        }
        let e = 1u64 << i;
        let mue = min_poly_of_vector(m, e);
        if mue.divides(&mu) {
            continue;
        }
        if mu.divides(&mue) {
            z = e;
            mu = mue;
            continue;
        }
        let lcm = mu.lcm(&mue);
        z = combine_vectors(m, z, &mu, e, &mue)?;
        mu = lcm;
        debug_assert_eq!(min_poly_of_vector(m, z), mu);
    }
    // mu is the lcm over a basis, i.e. the minimal polynomial of m
    debug_assert!((0..n).all(|i| min_poly_of_vector(m, 1 << i).divides(&mu)));
    Ok((z, mu))
}

/// Cyclic decomposition of a square matrix: invariant factors in descending
/// divisibility order together with a basis matrix `P` such that
/// `P * m * P^-1` is block-diagonal companion form in the same order.
pub fn cyclic_decomposition(m: &BitMatrix) -> Result<(Vec<GF2Poly>, BitMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("cyclic decomposition".into()));
    }
    let n = m.ncols();
    let mut factors: Vec<GF2Poly> = Vec::new();
    let mut basis_rows: Vec<u64> = Vec::with_capacity(n);
    // current invariant subspace: rows in ambient coordinates plus the
    // restricted action in those coordinates
    let mut cur_basis: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
    let mut action = m.clone();
    while !cur_basis.is_empty() {
        let u = cur_basis.len();
        let (z, mu) = maximal_vector(&action)?;
        let d = mu.degree().expect("minimal polynomial of a nonzero space");
        if let Some(prev) = factors.last() {
            debug_assert!(mu.divides(prev), "invariant factor chain must divide");
        }
        let mut krylov: Vec<u64> = Vec::with_capacity(d);
        let mut w = z;
        for _ in 0..d {
            krylov.push(w);
            w = row_times_matrix(w, &action);
        }
        for &r in &krylov {
            let mut amb = 0u64;
            let mut bits = r;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                amb ^= cur_basis[i];
                bits &= bits - 1;
            }
            basis_rows.push(amb);
        }
        factors.push(mu);
        if d == u {
            break;
        }
        // functional c with <krylov_i, c> = [i == d-1]; the common kernel of
        // c, A c, ..., A^{d-1} c is an invariant complement of the cyclic part
        let kmat = BitMatrix::from_rows(krylov.clone(), u);
        let c = solve_column(&kmat, 1u64 << (d - 1))?;
        let mut functionals: Vec<u64> = Vec::with_capacity(d);
        let mut cc = c;
        for _ in 0..d {
            functionals.push(cc);
            cc = matrix_times_col(&action, cc);
        }
        let func = BitMatrix::from_rows(functionals, u);
        let comp = func.kernel_basis();
        assert_eq!(comp.nrows(), u - d, "complement dimension");
        // restrict the action to the complement
        let solver = RowSolver::new(comp.rows());
        let mut restricted = BitMatrix::zeros(u - d, u - d);
        for i in 0..u - d {
            let image = row_times_matrix(comp.row_bits(i), &action);
            let coords = solver
                .solve(image)
                .expect("complement is invariant under the action");
            for j in 0..u - d {
                if coords >> j & 1 == 1 {
                    restricted.set(i, j, true);
                }
            }
        }
        cur_basis = comp
            .rows()
            .iter()
            .map(|&r| {
                let mut amb = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    amb ^= cur_basis[i];
                    bits &= bits - 1;
                }
                amb
            })
            .collect();
        action = restricted;
    }
    let p = BitMatrix::from_rows(basis_rows, n);
    debug_assert!(p.is_invertible());
    debug_assert_eq!(
        p.mul(m).unwrap().mul(&p.inverse().unwrap()).unwrap(),
        canonical_form(&factors),
        "decomposition must conjugate into companion block form"
    );
    Ok((factors, p))
}

/// Solve `k * c = target` for a column `c`; `k` must have full row rank.
fn solve_column(k: &BitMatrix, target: u64) -> Result<u64> {
    let (rows, cols) = (k.nrows(), k.ncols());
    assert!(cols < 63, "augmented column must fit the word");
    let augmented = BitMatrix::from_rows(
        (0..rows)
            .map(|i| k.row_bits(i) | ((target >> i & 1) << cols))
            .collect(),
        cols + 1,
    );
    let r = augmented.rref();
    let mut c = 0u64;
    for (row, &pivot) in r.pivots.iter().enumerate() {
        if pivot == cols {
            return Err(Error::Singular);
        }
        if r.matrix.row_bits(row) >> cols & 1 == 1 {
            c |= 1 << pivot;
        }
    }
    Ok(c)
}

fn canonical_form(factors_descending: &[GF2Poly]) -> BitMatrix {
    let blocks: Vec<BitMatrix> = factors_descending
        .iter()
        .map(|f| companion(f).expect("factors have degree >= 1"))
        .collect();
    block_diag(&blocks)
}

/// Invariant-factor chain of a square matrix in ascending divisibility order.
pub fn invariant_factors(m: &BitMatrix) -> Result<Vec<GF2Poly>> {
    let (mut f, _) = cyclic_decomposition(m)?;
    f.reverse();
    Ok(f)
}

/// An explicit `g` with `g^-1 * a * g = b`, built from the cyclic-vector
/// bases of both module structures. Errors if the invariant factors differ.
pub fn conjugator(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    let (fa, pa) = cyclic_decomposition(a)?;
    let (fb, pb) = cyclic_decomposition(b)?;
    if fa != fb {
        return Err(Error::NotConjugate);
    }
    let g = pa.inverse()?.mul(&pb)?;
    debug_assert_eq!(g.inverse().unwrap().mul(a).unwrap().mul(&g).unwrap(), *b);
    Ok(g)
}

/// One representative per `GL(n,2)`-conjugacy class of invertible matrices:
/// all invariant-factor chains over GF(2) with nonzero constant terms.
/// Optionally filtered to classes whose elements have the given order.
pub fn rcf_class_reps(n: usize, order_filter: Option<u64>) -> Vec<RcfClass> {
    assert!(n >= 1 && n <= 10, "class enumeration supports n <= 10");
    let candidates: Vec<GF2Poly> = poly_list(n).into_iter().filter(|p| p.coeff(0)).collect();
    let mut chains: Vec<Vec<GF2Poly>> = Vec::new();
    let mut chain: Vec<GF2Poly> = Vec::new();
    fn recurse(
        total: usize,
        upper: Option<&GF2Poly>,
        candidates: &[GF2Poly],
        chain: &mut Vec<GF2Poly>,
        out: &mut Vec<Vec<GF2Poly>>,
    ) {
        if total == 0 {
            let mut c = chain.clone();
            c.reverse();
            out.push(c);
            return;
        }
        for f in candidates {
            let d = f.degree().unwrap();
            if d > total {
                break;
            }
            if let Some(up) = upper {
                if d > up.degree().unwrap() || !f.divides(up) {
                    continue;
                }
            }
            chain.push(*f);
            recurse(total - d, Some(f), candidates, chain, out);
            chain.pop();
        }
    }
    recurse(n, None, &candidates, &mut chain, &mut chains);
    chains.sort_unstable();
    chains.dedup();
    let mut out = Vec::with_capacity(chains.len());
    for ch in chains {
        let blocks: Vec<BitMatrix> = ch
            .iter()
            .map(|f| companion(f).expect("degree >= 1"))
            .collect();
        let rep = block_diag(&blocks);
        if let Some(ord) = order_filter {
            match rep.element_order(1_000_000) {
                Ok(o) if o == ord => {}
                _ => continue,
            }
        }
        out.push(RcfClass {
            invariant_factors: ch,
            representative: rep,
        });
    }
    out
}

/// Dimension of the fixed-point space of a matrix (kernel of `m + I`).
pub fn fixed_space_dim(m: &BitMatrix) -> usize {
    let n = m.ncols();
    m.add(&BitMatrix::identity(n))
        .expect("square")
        .kernel_basis()
        .nrows()
}

/// One cyclic group per `GL(n,2)`-conjugacy class of subgroups of order `m`,
/// obtained by fusing element classes `c ~ c^k` for `gcd(k, m) = 1`.
pub fn cyclic_subgroup_classes(n: usize, m: u64) -> Result<Vec<MatrixGroup>> {
    assert!(m >= 2);
    let reps = rcf_class_reps(n, Some(m));
    let chains: Vec<Vec<GF2Poly>> = reps.iter().map(|r| r.invariant_factors.clone()).collect();
    let mut parent: Vec<usize> = (0..reps.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, rep) in reps.iter().enumerate() {
        for k in 2..m {
            if gcd(k, m) != 1 {
                continue;
            }
            let power = rep.representative.pow(k)?;
            let chain = invariant_factors(&power)?;
            let j = chains
                .iter()
                .position(|c| *c == chain)
                .expect("a coprime power has the same order, so its class is listed");
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut roots: Vec<usize> = (0..reps.len())
        .filter(|&i| find(&mut parent, i) == i)
        .collect();
    roots.sort_unstable();
    roots
        .into_iter()
        .map(|i| {
            MatrixGroup::from_generators(None, vec![reps[i].representative.clone()])?
                .closure(m as usize + 1)
        })
        .collect()
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn rand_invertible(state: &mut u64, n: usize) -> BitMatrix {
        loop {
            let rows: Vec<u64> = (0..n)
                .map(|_| {
                    *state ^= *state << 13;
                    *state ^= *state >> 7;
                    *state ^= *state << 17;
                    *state & ((1 << n) - 1)
                })
                .collect();
            let m = BitMatrix::from_rows(rows, n);
            if m.is_invertible() {
                return m;
            }
        }
    }

    #[test]
    fn footnote_generator_is_already_normal_form() {
        let alt = data::g_4_6_alt().unwrap();
        let first = &alt.generators[0];
        let chain = invariant_factors(first).unwrap();
        let strs: Vec<String> = chain.iter().map(|p| p.to_bit_string()).collect();
        // (x+1) | (x^2+1) | (x^2+1) | (x^2+1)
        assert_eq!(strs, vec!["11", "101", "101", "101"]);
        // and the representative of that chain is the matrix itself
        let blocks: Vec<BitMatrix> = chain.iter().map(|f| companion(f).unwrap()).collect();
        assert_eq!(block_diag(&blocks), *first);
    }

    #[test]
    fn involution_classes_have_fixed_dims_4_5_6() {
        let classes = rcf_class_reps(7, Some(2));
        assert_eq!(classes.len(), 3);
        let mut dims: Vec<usize> = classes
            .iter()
            .map(|c| fixed_space_dim(&c.representative))
            .collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![4, 5, 6]);
    }

    #[test]
    fn identity_class_only_for_order_1() {
        let classes = rcf_class_reps(7, Some(1));
        assert_eq!(classes.len(), 1);
        assert!(classes[0].representative.is_identity());
    }

    #[test]
    fn every_random_matrix_matches_exactly_one_chain() {
        let all = rcf_class_reps(7, None);
        // chains are pairwise distinct by construction
        let mut chains: Vec<_> = all.iter().map(|c| c.invariant_factors.clone()).collect();
        chains.sort_unstable();
        chains.dedup();
        assert_eq!(chains.len(), all.len());
        let mut state = 0xabcdef987654321u64;
        for _ in 0..40 {
            let m = rand_invertible(&mut state, 7);
            let chain = invariant_factors(&m).unwrap();
            let hits = all.iter().filter(|c| c.invariant_factors == chain).count();
            assert_eq!(hits, 1);
            // and the representative of that chain is conjugate to m
            let rep = &all
                .iter()
                .find(|c| c.invariant_factors == chain)
                .unwrap()
                .representative;
            let g = conjugator(rep, &m).unwrap();
            assert_eq!(g.inverse().unwrap().mul(rep).unwrap().mul(&g).unwrap(), m);
        }
    }

    #[test]
    fn conjugator_on_actual_conjugates() {
        let mut state = 0x13572468abcdefu64;
        for _ in 0..25 {
            let a = rand_invertible(&mut state, 7);
            let g = rand_invertible(&mut state, 7);
            let b = g.inverse().unwrap().mul(&a).unwrap().mul(&g).unwrap();
            let h = conjugator(&a, &b).unwrap();
            assert_eq!(h.inverse().unwrap().mul(&a).unwrap().mul(&h).unwrap(), b);
        }
    }

    #[test]
    fn rank1_deficient_involutions_are_conjugate() {
        // two involutions with 6-dimensional fixed spaces
        let mut a = BitMatrix::identity(7);
        a.set(1, 0, true);
        let mut b = BitMatrix::identity(7);
        b.set(5, 2, true);
        assert_eq!(fixed_space_dim(&a), 6);
        assert_eq!(fixed_space_dim(&b), 6);
        let g = conjugator(&a, &b).unwrap();
        assert_eq!(g.inverse().unwrap().mul(&a).unwrap().mul(&g).unwrap(), b);
        assert!(conjugator(&a, &BitMatrix::identity(7)).is_err());
    }

    #[test]
    fn cyclic_class_counts_small_orders() {
        assert_eq!(cyclic_subgroup_classes(7, 2).unwrap().len(), 3);
        assert_eq!(cyclic_subgroup_classes(7, 3).unwrap().len(), 3);
        assert_eq!(cyclic_subgroup_classes(7, 5).unwrap().len(), 1);
        assert_eq!(cyclic_subgroup_classes(7, 7).unwrap().len(), 3);
    }

    #[test]
    fn order7_class_fixed_space_dims() {
        let classes = cyclic_subgroup_classes(7, 7).unwrap();
        let mut dims: Vec<usize> = classes
            .iter()
            .map(|g| fixed_space_dim(&g.generators()[0]))
            .collect();
        dims.sort_unstable();
        // one class with a 4-dimensional fixed space, two with 1-dimensional
        assert_eq!(dims, vec![1, 1, 4]);
    }
}
