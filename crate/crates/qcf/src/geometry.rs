//! Subspaces of `F_2^n` as canonical objects: enumeration, group action,
//! distances, counting, and the 7-digit text codec for code files.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use std::fmt;

/// Default cap on the number of subspaces a single enumeration may produce.
pub const DEFAULT_ENUM_BUDGET: u128 = 4_000_000;

/// A `k`-dimensional subspace of `F_2^n`, stored as its unique RREF basis.
///
/// Two subspaces are equal iff their canonical keys (ambient, dimension,
/// row-major packed basis) are equal; the derived ordering on those keys is
/// the key order used for transversals and determinism everywhere.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: u16,
    rows: Vec<u64>,
}

impl Subspace {
    /// Canonicalize the row space of `m` (rows need not be independent).
    pub fn from_matrix(m: &BitMatrix) -> Subspace {
        let r = m.rref();
        Subspace {
            ambient: m.ncols() as u16,
            rows: r.matrix.rows()[..r.rank].to_vec(),
        }
    }

    /// Wrap a matrix that must already be an RREF basis of full row rank.
    pub fn from_rref_basis(m: &BitMatrix) -> Result<Subspace> {
        let r = m.rref();
        if r.rank != m.nrows() || r.matrix != *m {
            return Err(Error::NotRref {
                expected: m.nrows(),
            });
        }
        Ok(Subspace {
            ambient: m.ncols() as u16,
            rows: m.rows().to_vec(),
        })
    }

    pub fn full_space(n: usize) -> Subspace {
        Subspace::from_matrix(&BitMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient as usize
    }

    pub fn basis(&self) -> BitMatrix {
        BitMatrix::from_rows(self.rows.clone(), self.ambient())
    }

    pub fn basis_rows(&self) -> &[u64] {
        &self.rows
    }

    /// Row-major packed canonical key.
    pub fn key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 8 * self.rows.len());
        out.push(self.ambient as u8);
        out.push(self.rows.len() as u8);
        for r in &self.rows {
            out.extend_from_slice(&r.to_be_bytes());
        }
        out
    }

    /// Compact hex key used for LP variable names.
    pub fn key_hex(&self) -> String {
        let digits = self.ambient().div_ceil(4);
        let mut s = String::with_capacity(self.rows.len() * digits);
        for r in &self.rows {
            s.push_str(&format!("{:0width$x}", r, width = digits));
        }
        s
    }

    pub fn from_key_hex(s: &str, k: usize, n: usize) -> Result<Subspace> {
        let digits = n.div_ceil(4);
        if s.len() != k * digits {
            return Err(Error::Parse {
                line: 0,
                msg: format!("bad subspace key {s:?} for {k}x{n}"),
            });
        }
        let mut rows = Vec::with_capacity(k);
        for i in 0..k {
            let chunk = &s[i * digits..(i + 1) * digits];
            let bits = u64::from_str_radix(chunk, 16).map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad subspace key {s:?}"),
            })?;
            rows.push(bits);
        }
        Subspace::from_rref_basis(&BitMatrix::from_rows(rows, n))
    }

    /// Membership test for a packed row vector.
    pub fn contains_vector(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Containment test for another subspace of the same ambient space.
    pub fn contains(&self, other: &Subspace) -> bool {
        debug_assert_eq!(self.ambient, other.ambient);
        other.rows.iter().all(|&r| self.reduce(r) == 0)
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.rows {
            let pivot = b.trailing_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    /// All nonzero vectors of the subspace (2^k - 1 of them).
    pub fn nonzero_vectors(&self) -> Vec<u64> {
        let k = self.dim();
        let mut out = Vec::with_capacity((1usize << k) - 1);
        for mask in 1u64..(1 << k) {
            let mut v = 0u64;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                v ^= self.rows[i];
                m &= m - 1;
            }
            out.push(v);
        }
        out
    }

    /// Image under an invertible matrix, canonicalized. The caller
    /// guarantees invertibility (e.g. group elements).
    pub fn apply(&self, m: &BitMatrix) -> Subspace {
        debug_assert_eq!(m.nrows(), self.ambient());
        let product = self.basis().mul(m).expect("dimension checked");
        let s = Subspace::from_matrix(&product);
        debug_assert_eq!(s.dim(), self.dim(), "rank dropped: matrix was singular");
        s
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace<{}/{}>[", self.dim(), self.ambient)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r:0w$b}", w = self.ambient())?;
        }
        write!(f, "]")
    }
}

/// Canonical image of `s` under `m`; validates that `m` is invertible.
pub fn act(s: &Subspace, m: &BitMatrix) -> Result<Subspace> {
    if !m.is_square() || m.ncols() != s.ambient() {
        return Err(Error::DimensionMismatch(format!(
            "action of {}x{} on ambient {}",
            m.nrows(),
            m.ncols(),
            s.ambient()
        )));
    }
    if !m.is_invertible() {
        return Err(Error::Singular);
    }
    Ok(s.apply(m))
}

/// Subspace distance `dim(U+W) - dim(U∩W) = 2 dim(U+W) - dim U - dim W`.
pub fn subspace_distance(u: &Subspace, w: &Subspace) -> Result<usize> {
    if u.ambient() != w.ambient() {
        return Err(Error::DimensionMismatch(format!(
            "ambient {} vs {}",
            u.ambient(),
            w.ambient()
        )));
    }
    let stacked = u.basis().stack(&w.basis())?;
    Ok(2 * stacked.rank() - u.dim() - w.dim())
}

/// Gaussian binomial coefficient for q = 2.
pub fn gaussian_binomial(n: usize, k: usize) -> u128 {
    assert!(k <= n, "gaussian binomial needs k <= n");
    let k = k.min(n - k);
    let mut g: u128 = 1;
    for i in 1..=k {
        let num = (1u128 << (n - k + i)) - 1;
        let den = (1u128 << i) - 1;
        g = g * num / den;
    }
    g
}

/// All `k`-dimensional subspaces of `F_2^n`, in key order.
pub fn enumerate_grassmannian(n: usize, k: usize) -> Result<Vec<Subspace>> {
    enumerate_grassmannian_with_budget(n, k, DEFAULT_ENUM_BUDGET)
}

pub fn enumerate_grassmannian_with_budget(
    n: usize,
    k: usize,
    budget: u128,
) -> Result<Vec<Subspace>> {
    assert!(
        k >= 1 && k <= n && n <= 20,
        "enumeration supports 1 <= k <= n <= 20"
    );
    let total = gaussian_binomial(n, k);
    if total > budget {
        return Err(Error::BudgetExceeded(format!(
            "grassmannian({n},{k}) has {total} subspaces, budget {budget}"
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    // Pivot patterns are generated directly in RREF: pivot columns strictly
    // increasing, free entries to the right of each pivot in non-pivot columns.
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let pivot_mask: u64 = pivots.iter().fold(0, |acc, &c| acc | (1 << c));
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in (p + 1)..n {
                if pivot_mask >> c & 1 == 0 {
                    free.push((i, c));
                }
            }
        }
        let base: Vec<u64> = pivots.iter().map(|&c| 1u64 << c).collect();
        for fill in 0u64..(1u64 << free.len()) {
            let mut rows = base.clone();
            let mut f = fill;
            while f != 0 {
                let b = f.trailing_zeros() as usize;
                let (i, c) = free[b];
                rows[i] |= 1 << c;
                f &= f - 1;
            }
            out.push(Subspace {
                ambient: n as u16,
                rows,
            });
        }
        // next pivot pattern (combination in lexicographic order)
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if pivots[i] < n - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            debug_assert_eq!(out.len() as u128, total);
            out.sort_unstable();
            return Ok(out);
        }
    }
}

/// All `t`-dimensional subspaces of `s`; count is `gauss(dim s, t, 2)`.
pub fn sub_subspaces(s: &Subspace, t: usize) -> Vec<Subspace> {
    assert!(t <= s.dim(), "sub_subspaces needs t <= k");
    if t == 0 {
        return vec![Subspace {
            ambient: s.ambient,
            rows: Vec::new(),
        }];
    }
    let k = s.dim();
    let coeffs = enumerate_grassmannian(k, t).expect("k is small");
    let basis = s.basis();
    coeffs
        .iter()
        .map(|c| Subspace::from_matrix(&c.basis().mul(&basis).expect("dims agree")))
        .collect()
}

/// Decode one 7-digit line of the bundled code format: digit `j` is column
/// `j` of a 3x7 RREF basis, bit 0 = row 1, bit 1 = row 2, bit 2 = row 3.
///
/// A decode that fails rank or RREF validation is a hard error.
pub fn decode_appendix_row(digits: &str) -> Result<Subspace> {
    let chars: Vec<char> = digits.trim().chars().collect();
    if chars.len() != 7 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected 7 digits, got {:?}", digits),
        });
    }
    let mut rows = [0u64; 3];
    for (j, &ch) in chars.iter().enumerate() {
        let d = ch.to_digit(10).filter(|&d| d <= 7).ok_or(Error::Parse {
            line: 0,
            msg: format!("bad digit {ch:?} in {digits:?}"),
        })?;
        for (r, row) in rows.iter_mut().enumerate() {
            if d >> r & 1 == 1 {
                *row |= 1 << j;
            }
        }
    }
    let m = BitMatrix::from_rows(rows.to_vec(), 7);
    let r = m.rref();
    if r.rank != 3 || r.matrix != m {
        return Err(Error::NotRref { expected: 3 });
    }
    Ok(Subspace {
        ambient: 7,
        rows: rows.to_vec(),
    })
}

/// Inverse of [`decode_appendix_row`].
pub fn encode_appendix_row(s: &Subspace) -> Result<String> {
    if s.dim() != 3 || s.ambient() != 7 {
        return Err(Error::DimensionMismatch(format!(
            "7-digit rows encode 3-subspaces of F_2^7, got {}/{}",
            s.dim(),
            s.ambient()
        )));
    }
    let mut out = String::with_capacity(7);
    for j in 0..7 {
        let mut d = 0u32;
        for r in 0..3 {
            if s.rows[r] >> j & 1 == 1 {
                d |= 1 << r;
            }
        }
        out.push(char::from_digit(d, 10).unwrap());
    }
    Ok(out)
}

/// An ordered set of equal-dimension subspaces, sorted by key.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Code {
    words: Vec<Subspace>,
}

impl Code {
    /// Build from explicit codewords; duplicates are a hard error.
    pub fn from_words(words: Vec<Subspace>) -> Result<Code> {
        let mut words = words;
        if let Some(first) = words.first() {
            let (k, n) = (first.dim(), first.ambient());
            for w in &words {
                if w.dim() != k || w.ambient() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "mixed dimensions: {}/{} vs {}/{}",
                        w.dim(),
                        w.ambient(),
                        k,
                        n
                    )));
                }
            }
        }
        words.sort_unstable();
        for pair in words.windows(2) {
            if pair[0] == pair[1] {
                let name = encode_appendix_row(&pair[0]).unwrap_or_else(|_| pair[0].key_hex());
                return Err(Error::DuplicateWord(name));
            }
        }
        Ok(Code { words })
    }

    /// Build as a union of sets, deduplicating silently.
    pub fn from_union(words: Vec<Subspace>) -> Result<Code> {
        let mut words = words;
        words.sort_unstable();
        words.dedup();
        Code::from_words(words)
    }

    pub fn words(&self) -> &[Subspace] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.words.binary_search(s).is_ok()
    }

    pub fn word_dim(&self) -> Option<usize> {
        self.words.first().map(|w| w.dim())
    }

    pub fn ambient(&self) -> Option<usize> {
        self.words.first().map(|w| w.ambient())
    }

    /// Minimum pairwise subspace distance; `None` for fewer than 2 words.
    pub fn min_distance(&self) -> Option<usize> {
        if self.words.len() < 2 {
            return None;
        }
        let mut best = usize::MAX;
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                let d = subspace_distance(&self.words[i], &self.words[j]).expect("uniform ambient");
                best = best.min(d);
            }
        }
        Some(best)
    }

    /// Apply a matrix to every word (the image code).
    pub fn apply(&self, m: &BitMatrix) -> Result<Code> {
        let words = self
            .words
            .iter()
            .map(|w| act(w, m))
            .collect::<Result<Vec<_>>>()?;
        Code::from_union(words)
    }
}

/// Number of codewords contained in a hyperplane (a subspace of dim n-1).
pub fn hyperplane_members(c: &Code, h: &Subspace) -> Result<usize> {
    if let Some(n) = c.ambient() {
        if h.ambient() != n || h.dim() != n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "hyperplane must be ({}-1)-dimensional in ambient {}",
                n, n
            )));
        }
    }
    Ok(c.words().iter().filter(|w| h.contains(w)).count())
}

/// The hyperplane `{x : x_0 = 0}`.
pub fn first_coordinate_hyperplane(n: usize) -> Subspace {
    let rows: Vec<u64> = (1..n).map(|i| 1u64 << i).collect();
    Subspace {
        ambient: n as u16,
        rows,
    }
}

/// Supported code file formats.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CodeFormat {
    /// One 7-digit row per line; `#`-prefixed section headers are ignored.
    Appendix,
    /// JSON list of k x n 0/1 matrices.
    Json,
}

/// Parse a code file into raw subspaces (duplicates not yet rejected, so
/// orbit-representative files can be expanded by a group afterwards).
pub fn parse_code_text(text: &str, format: CodeFormat) -> Result<Vec<Subspace>> {
    match format {
        CodeFormat::Appendix => {
            let mut out = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let s = decode_appendix_row(line).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse { line: idx + 1, msg },
                    Error::NotRref { expected } => Error::Parse {
                        line: idx + 1,
                        msg: format!("row {line:?} is not a rank-{expected} RREF basis"),
                    },
                    other => other,
                })?;
                out.push(s);
            }
            Ok(out)
        }
        CodeFormat::Json => {
            let mats: Vec<BitMatrix> = serde_json::from_str(text)?;
            mats.iter()
                .map(|m| {
                    if m.rank() != m.nrows() {
                        return Err(Error::NotRref {
                            expected: m.nrows(),
                        });
                    }
                    Ok(Subspace::from_matrix(m))
                })
                .collect()
        }
    }
}

/// Serialize codewords in the requested format.
pub fn write_code_text(words: &[Subspace], format: CodeFormat) -> Result<String> {
    match format {
        CodeFormat::Appendix => {
            let mut out = String::new();
            for w in words {
                out.push_str(&encode_appendix_row(w)?);
                out.push('\n');
            }
            Ok(out)
        }
        CodeFormat::Json => {
            let mats: Vec<BitMatrix> = words.iter().map(|w| w.basis()).collect();
            Ok(serde_json::to_string_pretty(&mats)? + "\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(7, 2), 2667);
        assert_eq!(gaussian_binomial(7, 3), 11811);
        assert_eq!(gaussian_binomial(3, 2), 7);
        assert_eq!(gaussian_binomial(5, 0), 1);
        assert_eq!(gaussian_binomial(4, 4), 1);
        assert_eq!(gaussian_binomial(20, 10), 4380990637147598617372537398675);
    }

    #[test]
    fn grassmannian_counts_and_uniqueness() {
        let g72 = enumerate_grassmannian(7, 2).unwrap();
        assert_eq!(g72.len(), 2667);
        let g77 = enumerate_grassmannian(7, 7).unwrap();
        assert_eq!(g77.len(), 1);
        let g73 = enumerate_grassmannian(7, 3).unwrap();
        assert_eq!(g73.len(), 11811);
        let mut dedup = g73.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 11811);
        assert!(g73.windows(2).all(|w| w[0] < w[1]), "key order");
        // every produced basis is RREF of full rank
        for s in g73.iter().take(500) {
            let b = s.basis();
            let r = b.rref();
            assert_eq!(r.rank, 3);
            assert_eq!(r.matrix, b);
        }
    }

    #[test]
    fn grassmannian_budget_is_enforced() {
        assert!(matches!(
            enumerate_grassmannian_with_budget(7, 3, 10_000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn action_identity_and_composition() {
        let g73 = enumerate_grassmannian(7, 3).unwrap();
        let id = BitMatrix::identity(7);
        for s in g73.iter().step_by(997) {
            assert_eq!(&act(s, &id).unwrap(), s);
        }
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut rand_inv = || loop {
            let m = BitMatrix::from_rows((0..7).map(|_| next() & 0x7f).collect(), 7);
            if m.is_invertible() {
                return m;
            }
        };
        for i in 0..50 {
            let a = rand_inv();
            let b = rand_inv();
            let s = &g73[(i * 131) % g73.len()];
            let lhs = act(&act(s, &a).unwrap(), &b).unwrap();
            let rhs = act(s, &a.mul(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "right action composition");
        }
    }

    #[test]
    fn act_rejects_singular() {
        let s = enumerate_grassmannian(7, 3).unwrap()[0].clone();
        let z = BitMatrix::zeros(7, 7);
        assert!(matches!(act(&s, &z), Err(Error::Singular)));
    }

    #[test]
    fn distance_basics() {
        let g73 = enumerate_grassmannian(7, 3).unwrap();
        let s = &g73[0];
        assert_eq!(subspace_distance(s, s).unwrap(), 0);
        // two 3-spaces meeting in exactly a 1-space have distance 4
        let u = Subspace::from_matrix(&BitMatrix::from_rows(vec![1, 2, 4], 7));
        let w = Subspace::from_matrix(&BitMatrix::from_rows(vec![1, 8, 16], 7));
        assert_eq!(subspace_distance(&u, &w).unwrap(), 4);
    }

    #[test]
    fn distance_triangle_inequality() {
        let g73 = enumerate_grassmannian(7, 3).unwrap();
        let mut state = 0xdead_1234u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as usize
        };
        for _ in 0..300 {
            let a = &g73[next() % g73.len()];
            let b = &g73[next() % g73.len()];
            let c = &g73[next() % g73.len()];
            let ab = subspace_distance(a, b).unwrap();
            let bc = subspace_distance(b, c).unwrap();
            let ac = subspace_distance(a, c).unwrap();
            assert!(ac <= ab + bc);
        }
    }

    #[test]
    fn sub_subspaces_counts() {
        let s = Subspace::from_matrix(&BitMatrix::from_rows(vec![1, 2, 4], 7));
        let subs = sub_subspaces(&s, 2);
        assert_eq!(subs.len(), 7);
        let mut d = subs.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 7);
        assert!(subs.iter().all(|t| s.contains(t)));
        assert_eq!(sub_subspaces(&s, 3), vec![s.clone()]);
    }

    #[test]
    fn appendix_codec_round_trip() {
        let s = decode_appendix_row("0102004").unwrap();
        // pivot columns are 2, 4, 7 in 1-based terms
        let pivots: Vec<usize> = s
            .basis_rows()
            .iter()
            .map(|r| r.trailing_zeros() as usize + 1)
            .collect();
        assert_eq!(pivots, vec![2, 4, 7]);
        assert_eq!(encode_appendix_row(&s).unwrap(), "0102004");
        assert!(matches!(
            decode_appendix_row("0000000"),
            Err(Error::NotRref { expected: 3 })
        ));
        assert!(decode_appendix_row("012").is_err());
        assert!(decode_appendix_row("0102008").is_err());
    }

    #[test]
    fn duplicate_words_rejected() {
        let s = decode_appendix_row("0102004").unwrap();
        let err = Code::from_words(vec![s.clone(), s]).unwrap_err();
        assert!(matches!(err, Error::DuplicateWord(ref w) if w == "0102004"));
    }

    #[test]
    fn hyperplane_and_degenerate_codes() {
        let empty = Code::from_words(vec![]).unwrap();
        let h = first_coordinate_hyperplane(7);
        assert_eq!(hyperplane_members(&empty, &h).unwrap(), 0);
        assert_eq!(empty.min_distance(), None);
        let single = Code::from_words(vec![decode_appendix_row("0102004").unwrap()]).unwrap();
        assert_eq!(single.min_distance(), None);
    }

    #[test]
    fn code_text_round_trip() {
        let text = "# header\n0102004\n1012460\n";
        let words = parse_code_text(text, CodeFormat::Appendix).unwrap();
        assert_eq!(words.len(), 2);
        let code = Code::from_words(words).unwrap();
        let json = write_code_text(code.words(), CodeFormat::Json).unwrap();
        let back = parse_code_text(&json, CodeFormat::Json).unwrap();
        assert_eq!(Code::from_words(back).unwrap(), code);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_code_text("0102004\nnot-a-row\n", CodeFormat::Appendix).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
