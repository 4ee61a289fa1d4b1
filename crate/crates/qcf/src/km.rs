//! The prescribed-automorphism orbit-packing model `M^U x <= lambda`:
//! construction, trivially-zero pruning, the closeness side constraint,
//! normalizer subproblem plans, and LP-file export/import.

use crate::error::{Error, Result};
use crate::geometry::{gaussian_binomial, sub_subspaces, Code, Subspace};
use crate::groups::{orbit_space, orbit_type_string, MatrixGroup};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// One selectable orbit of k-subspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmVar {
    pub rep: Subspace,
    /// Orbit size; selecting the variable contributes this many codewords.
    pub weight: u64,
    /// Sparse coverage coefficients `(row index, m_{T,K})`.
    pub coeffs: Vec<(u32, u32)>,
}

/// One t-subspace orbit constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmRow {
    pub rep: Subspace,
    pub size: u64,
    pub entries: Vec<(u32, u32)>,
}

/// The closeness constraint `sum w_v x_v >= threshold` over reference orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closeness {
    pub var_ids: Vec<u32>,
    pub threshold: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmModel {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub d: usize,
    pub lambda: u32,
    /// Surviving variables after trivially-zero pruning, in key order.
    pub vars: Vec<KmVar>,
    /// All t-orbit rows (entries reference surviving vars only).
    pub rows: Vec<KmRow>,
    pub forced_one: BTreeSet<u32>,
    pub forced_zero: BTreeSet<u32>,
    pub closeness: Option<Closeness>,
    /// Orbit sizes of all k-orbits before pruning.
    pub full_var_sizes: Vec<u64>,
    pub warnings: Vec<String>,
}

impl KmModel {
    pub fn var_index_of(&self, rep: &Subspace) -> Option<u32> {
        self.vars
            .binary_search_by(|v| v.rep.cmp(rep))
            .ok()
            .map(|i| i as u32)
    }

    /// Orbit type of the surviving variables.
    pub fn pruned_type_string(&self) -> String {
        let sizes: Vec<u64> = self.vars.iter().map(|v| v.weight).collect();
        orbit_type_string(&sizes)
    }

    /// Orbit type of all k-orbits before pruning.
    pub fn full_type_string(&self) -> String {
        orbit_type_string(&self.full_var_sizes)
    }

    /// Upper bound `floor(lambda * gauss(n,t) / gauss(k,t))`.
    pub fn anticode_bound(&self) -> u64 {
        let total = gaussian_binomial(self.n, self.t) * self.lambda as u128;
        (total / gaussian_binomial(self.k, self.t)) as u64
    }

    /// Decode a variable selection into the corresponding code.
    pub fn decode_selection(&self, selection: &[u32], group: &MatrixGroup) -> Result<Code> {
        let reps: Vec<Subspace> = selection
            .iter()
            .map(|&v| self.vars[v as usize].rep.clone())
            .collect();
        crate::groups::expand_orbits(&reps, group)
    }
}

/// Build the Kramer-Mesner model for `(n, d, k)` under a closed prescribed
/// group. Variables whose coverage exceeds `lambda` anywhere are removed.
pub fn build_model(
    n: usize,
    k: usize,
    d: usize,
    group: &MatrixGroup,
    lambda: u32,
) -> Result<KmModel> {
    if d % 2 != 0 || d < 2 || d > 2 * k {
        return Err(Error::DimensionMismatch(format!(
            "need even d with 2 <= d <= 2k, got d={d}, k={k}"
        )));
    }
    let t = k - d / 2 + 1;
    assert!(t >= 1);
    let var_space = orbit_space(n, k, group)?;
    let row_space = orbit_space(n, t, group)?;
    let nv = var_space.orbit_count();
    let nr = row_space.orbit_count();
    // tally (T', W) incidences per (var orbit, row orbit); m = tally / |row|
    let mut tally: Vec<std::collections::BTreeMap<u32, u64>> = vec![Default::default(); nv];
    let (subspaces, assignment) = var_space.assignment();
    for (pos, w) in subspaces.iter().enumerate() {
        let vi = assignment[pos] as usize;
        for sub in sub_subspaces(w, t) {
            let (ri, _) = row_space.orbit_of(&sub).expect("t-subspace is enumerated");
            *tally[vi].entry(ri).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<u32> = Vec::new();
    let mut coeffs_per_var: Vec<Vec<(u32, u32)>> = Vec::with_capacity(nv);
    for vi in 0..nv {
        let mut coeffs = Vec::with_capacity(tally[vi].len());
        let mut pruned = false;
        for (&ri, &cnt) in &tally[vi] {
            let rsize = row_space.sizes()[ri as usize];
            debug_assert_eq!(
                cnt % rsize,
                0,
                "coverage count must split over the row orbit"
            );
            let m = (cnt / rsize) as u32;
            if m > lambda {
                pruned = true;
            }
            coeffs.push((ri, m));
        }
        // conservation: sum_T m * |T orbit| = gauss(k,t) * |K orbit|
        debug_assert_eq!(
            coeffs
                .iter()
                .map(|&(ri, m)| m as u128 * row_space.sizes()[ri as usize] as u128)
                .sum::<u128>(),
            gaussian_binomial(k, t) * var_space.sizes()[vi] as u128
        );
        if !pruned {
            kept.push(vi as u32);
        }
        coeffs_per_var.push(coeffs);
    }
    let mut vars: Vec<KmVar> = Vec::with_capacity(kept.len());
    for (new_idx, &vi) in kept.iter().enumerate() {
        let _ = new_idx;
        vars.push(KmVar {
            rep: var_space.transversal()[vi as usize].clone(),
            weight: var_space.sizes()[vi as usize],
            coeffs: coeffs_per_var[vi as usize].clone(),
        });
    }
    // transversal order is key order already
    debug_assert!(vars.windows(2).all(|w| w[0].rep < w[1].rep));
    let mut rows: Vec<KmRow> = (0..nr)
        .map(|ri| KmRow {
            rep: row_space.transversal()[ri].clone(),
            size: row_space.sizes()[ri],
            entries: Vec::new(),
        })
        .collect();
    for (new_idx, var) in vars.iter().enumerate() {
        for &(ri, m) in &var.coeffs {
            rows[ri as usize].entries.push((new_idx as u32, m));
        }
    }
    Ok(KmModel {
        n,
        k,
        t,
        d,
        lambda,
        vars,
        rows,
        forced_one: BTreeSet::new(),
        forced_zero: BTreeSet::new(),
        closeness: None,
        full_var_sizes: var_space.sizes().to_vec(),
        warnings: Vec::new(),
    })
}

/// Minimal orbit representative of a subspace under a group.
fn orbit_min(s: &Subspace, group: &MatrixGroup) -> (Subspace, Vec<Subspace>) {
    let mut orbit = vec![s.clone()];
    let mut seen: BTreeSet<Subspace> = orbit.iter().cloned().collect();
    let mut head = 0;
    while head < orbit.len() {
        let cur = orbit[head].clone();
        head += 1;
        for g in group.generators() {
            let img = cur.apply(g);
            if seen.insert(img.clone()) {
                orbit.push(img);
            }
        }
    }
    let min = seen.iter().next().unwrap().clone();
    (min, orbit)
}

/// Add the closeness constraint: the selected orbits of the reference code
/// must retain total weight at least `c`. A reference that is not a union of
/// full orbits is projected to its orbit set with a warning.
pub fn add_closeness(
    model: &mut KmModel,
    reference: &Code,
    group: &MatrixGroup,
    c: u64,
) -> Result<()> {
    let mut var_ids: BTreeSet<u32> = BTreeSet::new();
    let mut projected = false;
    let mut pruned_refs = 0usize;
    for word in reference.words() {
        let (rep, orbit) = orbit_min(word, group);
        if orbit.iter().any(|m| !reference.contains(m)) {
            projected = true;
        }
        match model.var_index_of(&rep) {
            Some(v) => {
                var_ids.insert(v);
            }
            None => pruned_refs += 1,
        }
    }
    if projected {
        model.warnings.push(
            "reference code is not a union of full orbits; projected to its orbit set".into(),
        );
    }
    if pruned_refs > 0 {
        model.warnings.push(format!(
            "{pruned_refs} reference orbit(s) were pruned from the model and dropped from the closeness constraint"
        ));
    }
    model.closeness = Some(Closeness {
        var_ids: var_ids.into_iter().collect(),
        threshold: c,
    });
    Ok(())
}

/// One normalizer-symmetry subproblem: force a class representative to 1;
/// all variables of earlier classes are excluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproblem {
    pub forced_var: u32,
    pub class_vars: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubproblemPlan {
    /// Subproblems in solve order: decreasing class size, then decreasing
    /// forced weight, then representative key.
    pub subproblems: Vec<Subproblem>,
}

impl SubproblemPlan {
    pub fn class_type_string(&self) -> String {
        let sizes: Vec<u64> = self
            .subproblems
            .iter()
            .map(|s| s.class_vars.len() as u64)
            .collect();
        orbit_type_string(&sizes)
    }

    /// Variables excluded in subproblem `i`: everything in classes `0..i`.
    pub fn exclusions_for(&self, i: usize) -> Vec<u32> {
        let mut out = Vec::new();
        for sp in &self.subproblems[..i] {
            out.extend_from_slice(&sp.class_vars);
        }
        out
    }
}

/// Partition the model variables under the normalizer action and order the
/// induced subproblems.
pub fn make_subproblems(
    model: &KmModel,
    group: &MatrixGroup,
    normalizer: &MatrixGroup,
) -> Result<SubproblemPlan> {
    // the normalizer must normalize the prescribed group
    let gels = group
        .elements()
        .ok_or_else(|| Error::InvalidGroup("make_subproblems needs a closed group".into()))?;
    let gkeys: BTreeSet<&[u64]> = gels.iter().map(|m| m.rows()).collect();
    for h in normalizer.generators() {
        let hinv = h.inverse()?;
        for u in group.generators() {
            let conj = hinv.mul(u)?.mul(h)?;
            if !gkeys.contains(conj.rows()) {
                return Err(Error::NormalizerMismatch);
            }
        }
    }
    let nv = model.vars.len();
    let mut class_of: Vec<u32> = vec![u32::MAX; nv];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for start in 0..nv {
        if class_of[start] != u32::MAX {
            continue;
        }
        let cid = classes.len() as u32;
        let mut members = vec![start as u32];
        class_of[start] = cid;
        let mut head = 0;
        while head < members.len() {
            let v = members[head] as usize;
            head += 1;
            for h in normalizer.generators() {
                let image = model.vars[v].rep.apply(h);
                let (rep, _) = orbit_min(&image, group);
                let iv = model.var_index_of(&rep).ok_or_else(|| {
                    Error::InvalidGroup("normalizer action left the pruned variable set".into())
                })?;
                if class_of[iv as usize] == u32::MAX {
                    class_of[iv as usize] = cid;
                    members.push(iv);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&classes[a], &classes[b]);
        let wa = model.vars[ca[0] as usize].weight;
        let wb = model.vars[cb[0] as usize].weight;
        cb.len().cmp(&ca.len()).then(wb.cmp(&wa)).then(
            model.vars[ca[0] as usize]
                .rep
                .cmp(&model.vars[cb[0] as usize].rep),
        )
    });
    let subproblems = order
        .into_iter()
        .map(|ci| Subproblem {
            forced_var: classes[ci][0],
            class_vars: classes[ci].clone(),
        })
        .collect();
    Ok(SubproblemPlan { subproblems })
}

/// Serialize the model in textual LP format.
pub fn write_lp(model: &KmModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ qcf km model");
    let _ = writeln!(
        out,
        "\\ meta n={} k={} d={} t={} lambda={}",
        model.n, model.k, model.d, model.t, model.lambda
    );
    let _ = writeln!(out, "Maximize");
    let terms: Vec<String> = model
        .vars
        .iter()
        .map(|v| format!("{} x{}", v.weight, v.rep.key_hex()))
        .collect();
    let _ = writeln!(out, " obj: {}", terms.join(" + "));
    let _ = writeln!(out, "Subject To");
    for row in &model.rows {
        if row.entries.is_empty() {
            continue;
        }
        let terms: Vec<String> = row
            .entries
            .iter()
            .map(|&(v, m)| format!("{} x{}", m, model.vars[v as usize].rep.key_hex()))
            .collect();
        let _ = writeln!(
            out,
            " r{}: {} <= {}",
            row.rep.key_hex(),
            terms.join(" + "),
            model.lambda
        );
    }
    if let Some(cl) = &model.closeness {
        let terms: Vec<String> = cl
            .var_ids
            .iter()
            .map(|&v| {
                let var = &model.vars[v as usize];
                format!("{} x{}", var.weight, var.rep.key_hex())
            })
            .collect();
        let _ = writeln!(out, " closeness: {} >= {}", terms.join(" + "), cl.threshold);
    }
    if !model.forced_one.is_empty() || !model.forced_zero.is_empty() {
        let _ = writeln!(out, "Bounds");
        for &v in &model.forced_one {
            let _ = writeln!(out, " x{} = 1", model.vars[v as usize].rep.key_hex());
        }
        for &v in &model.forced_zero {
            let _ = writeln!(out, " x{} = 0", model.vars[v as usize].rep.key_hex());
        }
    }
    let _ = writeln!(out, "Binary");
    for v in &model.vars {
        let _ = writeln!(out, " x{}", v.rep.key_hex());
    }
    let _ = writeln!(out, "End");
    out
}

/// Parse an LP file produced by [`write_lp`], reconstructing the model
/// bit-exactly (up to rows that had no surviving coverage).
pub fn read_lp(text: &str) -> Result<KmModel> {
    let mut meta: Option<(usize, usize, usize, usize, u32)> = None;
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("\\ meta ") {
            let mut n = None;
            let mut k = None;
            let mut d = None;
            let mut t = None;
            let mut lambda = None;
            for part in rest.split_whitespace() {
                let (key, value) = part.split_once('=').ok_or(Error::Parse {
                    line: 0,
                    msg: format!("bad meta entry {part:?}"),
                })?;
                let v: usize = value.parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("bad meta value {part:?}"),
                })?;
                match key {
                    "n" => n = Some(v),
                    "k" => k = Some(v),
                    "d" => d = Some(v),
                    "t" => t = Some(v),
                    "lambda" => lambda = Some(v as u32),
                    _ => {}
                }
            }
            meta = Some((
                n.ok_or_else(|| parse_err(0, "meta missing n"))?,
                k.ok_or_else(|| parse_err(0, "meta missing k"))?,
                d.ok_or_else(|| parse_err(0, "meta missing d"))?,
                t.ok_or_else(|| parse_err(0, "meta missing t"))?,
                lambda.ok_or_else(|| parse_err(0, "meta missing lambda"))?,
            ));
        }
    }
    let (n, k, d, t, lambda) = meta.ok_or_else(|| parse_err(0, "missing meta comment"))?;

    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binary,
        Done,
    }
    let mut section = Section::Preamble;
    let mut vars: Vec<KmVar> = Vec::new();
    let mut var_index: std::collections::HashMap<String, u32> = Default::default();
    let mut rows: Vec<KmRow> = Vec::new();
    let mut closeness: Option<Closeness> = None;
    let mut forced_one = BTreeSet::new();
    let mut forced_zero = BTreeSet::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = ln + 1;
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Maximize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let body = line
                    .strip_prefix("obj:")
                    .ok_or_else(|| parse_err(lineno, "objective must be named obj"))?;
                for term in body.split('+') {
                    let (weight, name) = parse_term(term, lineno)?;
                    let rep = Subspace::from_key_hex(&name, k, n)?;
                    var_index.insert(name, vars.len() as u32);
                    vars.push(KmVar {
                        rep,
                        weight,
                        coeffs: Vec::new(),
                    });
                }
            }
            Section::Constraints => {
                let (label, body) = line
                    .split_once(':')
                    .ok_or_else(|| parse_err(lineno, "constraint missing label"))?;
                if label == "closeness" {
                    let (terms, threshold) = parse_relation(body, ">=", lineno)?;
                    let mut ids = Vec::new();
                    for (_, name) in terms {
                        let id = *var_index
                            .get(&name)
                            .ok_or_else(|| parse_err(lineno, "unknown variable"))?;
                        ids.push(id);
                    }
                    ids.sort_unstable();
                    closeness = Some(Closeness {
                        var_ids: ids,
                        threshold,
                    });
                } else {
                    let name = label
                        .strip_prefix('r')
                        .ok_or_else(|| parse_err(lineno, "row label must start with r"))?;
                    let rep = Subspace::from_key_hex(name, t, n)?;
                    let (terms, rhs) = parse_relation(body, "<=", lineno)?;
                    if rhs != lambda as u64 {
                        return Err(parse_err(lineno, "row bound differs from lambda"));
                    }
                    let ri = rows.len() as u32;
                    let mut entries = Vec::new();
                    for (m, vname) in terms {
                        let vid = *var_index
                            .get(&vname)
                            .ok_or_else(|| parse_err(lineno, "unknown variable"))?;
                        entries.push((vid, m as u32));
                        vars[vid as usize].coeffs.push((ri, m as u32));
                    }
                    rows.push(KmRow {
                        rep,
                        size: 0,
                        entries,
                    });
                }
            }
            Section::Bounds => {
                let (name, value) = line
                    .split_once('=')
                    .ok_or_else(|| parse_err(lineno, "bad bound"))?;
                let name = name
                    .trim()
                    .strip_prefix('x')
                    .ok_or_else(|| parse_err(lineno, "bound must fix a variable"))?;
                let vid = *var_index
                    .get(name)
                    .ok_or_else(|| parse_err(lineno, "unknown variable"))?;
                match value.trim() {
                    "1" => {
                        forced_one.insert(vid);
                    }
                    "0" => {
                        forced_zero.insert(vid);
                    }
                    other => return Err(parse_err(lineno, &format!("bad bound value {other}"))),
                }
            }
            Section::Binary | Section::Done | Section::Preamble => {}
        }
    }
    Ok(KmModel {
        n,
        k,
        t,
        d,
        lambda,
        vars,
        rows,
        forced_one,
        forced_zero,
        closeness,
        full_var_sizes: Vec::new(),
        warnings: Vec::new(),
    })
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_term(term: &str, lineno: usize) -> Result<(u64, String)> {
    let mut parts = term.split_whitespace();
    let coeff: u64 = parts
        .next()
        .ok_or_else(|| parse_err(lineno, "empty term"))?
        .parse()
        .map_err(|_| parse_err(lineno, "bad coefficient"))?;
    let var = parts
        .next()
        .ok_or_else(|| parse_err(lineno, "term missing variable"))?;
    if parts.next().is_some() {
        return Err(parse_err(lineno, "trailing junk in term"));
    }
    let name = var
        .strip_prefix('x')
        .ok_or_else(|| parse_err(lineno, "variable must start with x"))?;
    Ok((coeff, name.to_string()))
}

fn parse_relation(body: &str, op: &str, lineno: usize) -> Result<(Vec<(u64, String)>, u64)> {
    let (lhs, rhs) = body
        .split_once(op)
        .ok_or_else(|| parse_err(lineno, &format!("constraint missing {op}")))?;
    let bound: u64 = rhs
        .trim()
        .parse()
        .map_err(|_| parse_err(lineno, "bad right-hand side"))?;
    let mut terms = Vec::new();
    for term in lhs.split('+') {
        terms.push(parse_term(term, lineno)?);
    }
    Ok((terms, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::groups::conjugacy::cyclic_subgroup_classes;
    use crate::groups::MatrixGroup;

    fn bundled(order: u64, idx: u32) -> MatrixGroup {
        MatrixGroup::from_group_file(&data::bundled_group(order, idx).unwrap()).unwrap()
    }

    #[test]
    fn order_127_model_has_93_orbits_of_weight_127() {
        let g = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        assert_eq!(model.full_var_sizes.len(), 93);
        assert_eq!(model.full_type_string(), "127^93");
        assert!(model.vars.iter().all(|v| v.weight == 127));
        assert!(model.vars.len() <= 93 && !model.vars.is_empty());
        assert_eq!(model.anticode_bound(), 381);
    }

    #[test]
    fn order_31_model_dimensions() {
        let g = &cyclic_subgroup_classes(7, 31).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        assert_eq!(model.full_var_sizes.len(), 381);
        assert_eq!(model.rows.len(), 87);
        assert_eq!(model.full_type_string(), "31^381");
    }

    #[test]
    fn g14_model_prunes_to_recorded_type() {
        let g = bundled(14, 1);
        let model = build_model(7, 3, 4, &g, 1).unwrap();
        assert_eq!(model.full_type_string(), "1^1 2^4 7^30 14^828");
        assert_eq!(model.pruned_type_string(), "1^1 2^4 7^28 14^632");
    }

    #[test]
    fn coverage_conservation() {
        let g = bundled(4, 6);
        let model = build_model(7, 3, 4, &g, 1).unwrap();
        let g_kt = gaussian_binomial(3, 2) as u64;
        for var in &model.vars {
            let covered: u64 = var
                .coeffs
                .iter()
                .map(|&(ri, m)| m as u64 * model.rows[ri as usize].size)
                .sum();
            assert_eq!(covered, g_kt * var.weight);
        }
    }

    #[test]
    fn lp_round_trip_is_bit_exact() {
        let g = bundled(14, 1);
        let mut model = build_model(7, 3, 4, &g, 1).unwrap();
        model.forced_one.insert(3);
        model.forced_zero.insert(7);
        let lp = write_lp(&model);
        let back = read_lp(&lp).unwrap();
        assert_eq!(back.vars.len(), model.vars.len());
        for (a, b) in model.vars.iter().zip(&back.vars) {
            assert_eq!(a.rep, b.rep);
            assert_eq!(a.weight, b.weight);
        }
        assert_eq!(back.forced_one, model.forced_one);
        assert_eq!(back.forced_zero, model.forced_zero);
        assert_eq!(write_lp(&back), lp);
    }
}
