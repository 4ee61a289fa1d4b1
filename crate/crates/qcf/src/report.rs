//! Machine-readable verification reports: per-code checks and the full
//! reference battery behind `verify-paper`.

use crate::data;
use crate::error::Result;
use crate::geometry::{
    first_coordinate_hyperplane, gaussian_binomial, hyperplane_members, Code, Subspace,
};
use crate::gf2::BitMatrix;
use crate::groups::conjugacy::{cyclic_subgroup_classes, fixed_space_dim, rcf_class_reps};
use crate::groups::{
    code_automorphisms, expand_orbits, fingerprint, involution_count, orbit_type_string,
    orbits_of_words, type_consistent, AbstractType, AutConfig, MatrixGroup,
};
use crate::km::{add_closeness, build_model, make_subproblems, KmModel};
use crate::normalizer::{ladder_extend, normalizer_of_cyclic, normalizer_within, LadderInput};
use crate::solver::{compute_protocol, solve, ProtocolConfig, SolveConfig, SolveMode, SolveStatus};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, Serialize)]
pub enum Provenance {
    /// Checked against a value stated in the reference material.
    Recorded(String),
    /// Immediate consequence of definitions.
    Definition,
    /// Computed by an independent oracle named here.
    Oracle(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
    pub skipped: bool,
    pub provenance: Provenance,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn add<E: ToString, O: ToString>(
        &mut self,
        name: &str,
        provenance: Provenance,
        expected: E,
        observed: O,
        started: Instant,
    ) -> bool {
        let expected = expected.to_string();
        let observed = observed.to_string();
        let pass = expected == observed;
        self.checks.push(Check {
            name: name.to_string(),
            expected,
            observed,
            pass,
            skipped: false,
            provenance,
            wall_ms: started.elapsed().as_millis(),
        });
        pass
    }

    pub fn add_skipped(&mut self, name: &str, provenance: Provenance, note: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: note.to_string(),
            observed: "skipped".to_string(),
            pass: true,
            skipped: true,
            provenance,
            wall_ms: 0,
        });
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass && !c.skipped).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn skipped(&self) -> usize {
        self.checks.iter().filter(|c| c.skipped).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.skipped {
                "SKIP"
            } else if c.pass {
                "PASS"
            } else {
                "FAIL"
            };
            let tag = match &c.provenance {
                Provenance::Recorded(s) => format!("[recorded: {s}]"),
                Provenance::Definition => "[definition]".to_string(),
                Provenance::Oracle(s) => format!("[oracle: {s}]"),
            };
            out.push_str(&format!(
                "{status}  {name}: expected {expected}, observed {observed}  {tag}  ({ms} ms)\n",
                name = c.name,
                expected = c.expected,
                observed = c.observed,
                ms = c.wall_ms,
            ));
        }
        out.push_str(&format!(
            "summary: {} passed, {} failed, {} skipped\n",
            self.passed(),
            self.failed(),
            self.skipped()
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Debug)]
pub struct VerifyCodeOptions {
    pub group: Option<MatrixGroup>,
    pub check_aut: bool,
    pub aut_budget: Option<Duration>,
    /// Minimum distance the code is expected to attain.
    pub expect_distance: Option<usize>,
}

impl Default for VerifyCodeOptions {
    fn default() -> Self {
        VerifyCodeOptions {
            group: None,
            check_aut: false,
            aut_budget: Some(Duration::from_secs(600)),
            expect_distance: None,
        }
    }
}

/// Check a code file's content: size, minimum distance, optional orbit type
/// under a group (expanding representatives first), hyperplane membership,
/// and optionally the automorphism group order.
pub fn verify_code(words: Vec<Subspace>, opts: &VerifyCodeOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    let code = match &opts.group {
        Some(g) => expand_orbits(&words, g)?,
        None => Code::from_words(words)?,
    };
    let t = Instant::now();
    report.add(
        "code size",
        Provenance::Definition,
        code.len(),
        code.len(),
        t,
    );
    let t = Instant::now();
    let dist = code
        .min_distance()
        .map(|d| d.to_string())
        .unwrap_or_else(|| "none".to_string());
    match opts.expect_distance {
        Some(d) => {
            let ok = code.min_distance().map(|got| got >= d).unwrap_or(true);
            report.add(
                "minimum distance at least",
                Provenance::Definition,
                format!(">= {d}"),
                if ok {
                    format!(">= {d}")
                } else {
                    format!("violated ({dist})")
                },
                t,
            );
        }
        None => {
            report.add("minimum distance", Provenance::Definition, &dist, &dist, t);
        }
    }
    if let Some(g) = &opts.group {
        let t = Instant::now();
        let (orbits, invariant) = orbits_of_words(code.words(), g)?;
        let sizes: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
        let ty = orbit_type_string(&sizes);
        report.add("orbit type", Provenance::Definition, &ty, &ty, t);
        let t = Instant::now();
        report.add(
            "group-invariant",
            Provenance::Definition,
            true,
            invariant,
            t,
        );
    }
    if let Some(n) = code.ambient() {
        let t = Instant::now();
        let h = first_coordinate_hyperplane(n);
        let members = hyperplane_members(&code, &h)?;
        report.add(
            "first-coordinate hyperplane members",
            Provenance::Definition,
            members,
            members,
            t,
        );
    }
    if opts.check_aut {
        let t = Instant::now();
        let aut = code_automorphisms(
            &code,
            &AutConfig {
                time_budget: opts.aut_budget,
                parallel: true,
            },
        )?;
        let order = aut
            .order()
            .map(|o| o.to_string())
            .unwrap_or_else(|| "unknown".to_string());
        report.add(
            "automorphism group order",
            Provenance::Definition,
            &order,
            &order,
            t,
        );
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct BatteryOptions {
    /// Skip the solver checks beyond the order-127 model.
    pub fast: bool,
    pub threads: usize,
    pub deterministic: bool,
    pub budget_order31: Duration,
    pub budget_improve: Duration,
    pub budget_aut: Duration,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            fast: false,
            threads: 0,
            deterministic: false,
            budget_order31: Duration::from_secs(2 * 3600),
            budget_improve: Duration::from_secs(3600),
            budget_aut: Duration::from_secs(600),
        }
    }
}

fn bundled_closed(order: u64, idx: u32) -> Result<MatrixGroup> {
    MatrixGroup::from_group_file(&data::bundled_group(order, idx)?)
}

fn witness_code() -> Result<(Code, MatrixGroup)> {
    let g46 = bundled_closed(4, 6)?;
    let reps = crate::geometry::parse_code_text(
        &data::code_333_text()?,
        crate::geometry::CodeFormat::Appendix,
    )?;
    let code = expand_orbits(&reps, &g46)?;
    Ok((code, g46))
}

/// Run the full reference battery. Every check carries its source or the
/// oracle that computed the expected value.
pub fn run_battery(opts: &BatteryOptions) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();

    // 1. counting identities
    let t = Instant::now();
    report.add(
        "gauss(7,2,2)",
        Provenance::Recorded("count of 2-subspaces".into()),
        2667u64,
        gaussian_binomial(7, 2),
        t,
    );
    let t = Instant::now();
    report.add(
        "anticode bound floor(2667/7)",
        Provenance::Recorded("packing bound".into()),
        381u64,
        gaussian_binomial(7, 2) / gaussian_binomial(3, 2),
        t,
    );

    // 2. the 333-plane witness
    let (code, g46) = witness_code()?;
    let t = Instant::now();
    report.add(
        "witness size",
        Provenance::Recorded("333-plane witness".into()),
        333usize,
        code.len(),
        t,
    );
    let t = Instant::now();
    report.add(
        "witness minimum distance",
        Provenance::Recorded("planes meet in at most a point".into()),
        4usize,
        code.min_distance().unwrap_or(0),
        t,
    );
    let t = Instant::now();
    let (orbits, invariant) = orbits_of_words(code.words(), &g46)?;
    let sizes: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
    report.add(
        "witness orbit type under G_{4,6}",
        Provenance::Recorded("orbit type 1^9 2^26 4^68".into()),
        "1^9 2^26 4^68",
        orbit_type_string(&sizes),
        t,
    );
    let t = Instant::now();
    report.add(
        "witness is G_{4,6}-invariant",
        Provenance::Definition,
        true,
        invariant,
        t,
    );
    // the printed coordinates do not realize the prose claim on a coordinate
    // hyperplane (the x_j = 0 counts are 39 and 43), but hyperplanes holding
    // exactly 35 codewords exist, and omitting one leaves the affine code
    let t = Instant::now();
    let mut hyper_hist: std::collections::BTreeMap<usize, usize> = Default::default();
    for h in crate::geometry::enumerate_grassmannian(7, 6)? {
        *hyper_hist
            .entry(hyperplane_members(&code, &h)?)
            .or_insert(0) += 1;
    }
    let min_members = hyper_hist.keys().min().copied().unwrap_or(0);
    report.add(
        "a hyperplane holds exactly 35 witness codewords",
        Provenance::Recorded("35 subspaces of a hyperplane".into()),
        35usize,
        min_members,
        t,
    );
    let t = Instant::now();
    report.add(
        "witness affine complement size",
        Provenance::Recorded("affine code of size 298".into()),
        298usize,
        code.len() - min_members,
        t,
    );
    // round-trip: bundled file re-encodes identically (modulo headers)
    let t = Instant::now();
    let original = data::code_333_text()?;
    let reps = crate::geometry::parse_code_text(&original, crate::geometry::CodeFormat::Appendix)?;
    let reencoded: Vec<String> = reps
        .iter()
        .map(crate::geometry::encode_appendix_row)
        .collect::<Result<_>>()?;
    let original_rows: Vec<String> = original
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    report.add(
        "bundled code re-encodes identically",
        Provenance::Definition,
        true,
        reencoded == original_rows,
        t,
    );

    // 3. automorphism group of the witness
    let t = Instant::now();
    let aut = code_automorphisms(
        &code,
        &AutConfig {
            time_budget: Some(opts.budget_aut),
            parallel: !opts.deterministic,
        },
    )?;
    report.add(
        "witness automorphism group order",
        Provenance::Recorded("automorphism group of order 4".into()),
        4u128,
        aut.order().unwrap_or(0),
        t,
    );
    let t = Instant::now();
    let aut_type = fingerprint(&aut)?;
    report.add(
        "witness automorphism group type",
        Provenance::Recorded("Klein four-group".into()),
        "Z_2 x Z_2",
        aut_type.label(),
        t,
    );
    let t = Instant::now();
    report.add(
        "automorphism group equals closure(G_{4,6})",
        Provenance::Recorded("the group G_{4,6}".into()),
        true,
        aut.elements() == g46.elements(),
        t,
    );

    // 4. bundled group integrity
    let t = Instant::now();
    let mut order_counts: std::collections::BTreeMap<u64, u64> = Default::default();
    let mut orders_ok = true;
    let mut types_ok = true;
    for &(o, i) in data::BUNDLED_GROUP_IDS {
        let file = data::bundled_group(o, i)?;
        let group = MatrixGroup::from_group_file(&file)?;
        if group.order() != Some(o as u128) {
            orders_ok = false;
        }
        *order_counts.entry(o).or_insert(0) += 1;
        let computed = fingerprint(&group)?;
        let stated = file.abstract_type.unwrap_or_default();
        if !type_consistent(&computed, &stated) {
            types_ok = false;
        }
    }
    report.add(
        "all 33 groups close to their stated orders",
        Provenance::Recorded("surviving group table".into()),
        true,
        orders_ok,
        t,
    );
    let t = Instant::now();
    let multiset = order_counts
        .iter()
        .map(|(o, n)| format!("{o}^{n}"))
        .collect::<Vec<_>>()
        .join(" ");
    report.add(
        "group order multiset",
        Provenance::Recorded("order exponent string".into()),
        "1^1 2^1 3^2 4^7 5^1 6^3 7^2 8^11 9^2 12^1 14^1 16^1",
        multiset,
        t,
    );
    let t = Instant::now();
    report.add(
        "abstract types consistent with fingerprints",
        Provenance::Recorded("stated abstract types".into()),
        true,
        types_ok,
        t,
    );
    // the alternative presentation generates the same subgroup or a conjugate
    let t = Instant::now();
    let alt = MatrixGroup::from_group_file(&data::g_4_6_alt()?)?;
    let verdict = if alt.elements() == g46.elements() {
        "equal"
    } else {
        match crate::normalizer::subgroup_conjugate(&alt, &g46)? {
            crate::normalizer::ConjugacyAnswer::Conjugate => "conjugate",
            crate::normalizer::ConjugacyAnswer::NotConjugate => "not conjugate",
            crate::normalizer::ConjugacyAnswer::Unknown => "undecided",
        }
    };
    report.add(
        "alternative G_{4,6} presentation generates the same subgroup or a conjugate",
        Provenance::Oracle("set equality, else intertwiner conjugacy search".into()),
        "equal or conjugate",
        match verdict {
            "equal" | "conjugate" => "equal or conjugate",
            other => other,
        },
        t,
    );

    // the order-16 group contains a conjugate of the witness group
    let t = Instant::now();
    let g16 = bundled_closed(16, 1)?;
    let mut contains_conjugate = false;
    let els16 = g16.elements().unwrap();
    let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    'outer: for a in els16 {
        for b in els16 {
            let Ok(sub) = MatrixGroup::from_generators(None, vec![a.clone(), b.clone()])
                .and_then(|g| g.closure(17))
            else {
                continue;
            };
            if sub.order() != Some(4) {
                continue;
            }
            let key: Vec<Vec<u64>> = sub
                .elements()
                .unwrap()
                .iter()
                .map(|m| m.rows().to_vec())
                .collect();
            if !seen.insert(key) {
                continue;
            }
            if crate::normalizer::subgroup_conjugate(&sub, &g46)?
                == crate::normalizer::ConjugacyAnswer::Conjugate
            {
                contains_conjugate = true;
                break 'outer;
            }
        }
    }
    report.add(
        "G_{16,1} contains a conjugate of G_{4,6}",
        Provenance::Recorded("the witness group sits below the order-16 group".into()),
        true,
        contains_conjugate,
        t,
    );

    // 5. involution census and order-2 classes
    let t = Instant::now();
    report.add(
        "involution count in GL(7,2)",
        Provenance::Recorded("32,252,031 elements of order two".into()),
        BigUint::from(32_252_031u64),
        involution_count(7),
        t,
    );
    let t = Instant::now();
    let mut brute_ok = true;
    for n in [2usize, 3] {
        let mut brute = 0u64;
        for bits in 0..(1u64 << (n * n)) {
            let rows: Vec<u64> = (0..n).map(|i| (bits >> (i * n)) & ((1 << n) - 1)).collect();
            let m = BitMatrix::from_rows(rows, n);
            if m.is_invertible() && !m.is_identity() && m.mul(&m).unwrap().is_identity() {
                brute += 1;
            }
        }
        if involution_count(n) != BigUint::from(brute) {
            brute_ok = false;
        }
    }
    report.add(
        "involution formula matches brute force (n=2,3)",
        Provenance::Oracle("exhaustive matrix enumeration".into()),
        true,
        brute_ok,
        t,
    );
    let t = Instant::now();
    let inv_classes = rcf_class_reps(7, Some(2));
    let mut dims: Vec<usize> = inv_classes
        .iter()
        .map(|c| fixed_space_dim(&c.representative))
        .collect();
    dims.sort_unstable();
    report.add(
        "order-2 classes and their fixed-space dimensions",
        Provenance::Recorded("3 classes, fixed dims 4/5/6".into()),
        "3: [4, 5, 6]",
        format!("{}: {:?}", inv_classes.len(), dims),
        t,
    );

    // 6. cyclic subgroup class counts
    let t = Instant::now();
    let counts: Vec<(u64, usize)> = [2u64, 3, 5, 7, 31, 127]
        .iter()
        .map(|&m| Ok((m, cyclic_subgroup_classes(7, m)?.len())))
        .collect::<Result<_>>()?;
    report.add(
        "cyclic subgroup classes (m -> count)",
        Provenance::Recorded("class counts per order".into()),
        "[(2, 3), (3, 3), (5, 1), (7, 3), (31, 1), (127, 1)]",
        format!("{counts:?}"),
        t,
    );

    // 7. orbit types
    let order31 = cyclic_subgroup_classes(7, 31)?.remove(0);
    let t = Instant::now();
    let os3 = crate::groups::orbit_space(7, 3, &order31)?;
    let os2 = crate::groups::orbit_space(7, 2, &order31)?;
    report.add(
        "order-31 orbit types (3- and 2-subspaces)",
        Provenance::Recorded("type 31^381 and 1^1 31^86".into()),
        "31^381 / 1^1 31^86",
        format!("{} / {}", os3.type_string(), os2.type_string()),
        t,
    );
    let g5 = bundled_closed(5, 1)?;
    let t = Instant::now();
    let os3 = crate::groups::orbit_space(7, 3, &g5)?;
    let os2 = crate::groups::orbit_space(7, 2, &g5)?;
    report.add(
        "G_{5,1} orbit types (3- and 2-subspaces)",
        Provenance::Recorded("type 1^1 5^2362 and 1^7 5^532".into()),
        "1^1 5^2362 / 1^7 5^532",
        format!("{} / {}", os3.type_string(), os2.type_string()),
        t,
    );
    let g14 = bundled_closed(14, 1)?;
    let model14 = build_model(7, 3, 4, &g14, 1)?;
    let t = Instant::now();
    report.add(
        "G_{14,1} full and pruned variable orbit types",
        Provenance::Recorded("1^1 2^4 7^30 14^828, pruned 1^1 2^4 7^28 14^632".into()),
        "1^1 2^4 7^30 14^828 -> 1^1 2^4 7^28 14^632",
        format!(
            "{} -> {}",
            model14.full_type_string(),
            model14.pruned_type_string()
        ),
        t,
    );

    // 8. normalizer and subproblem plan
    let t = Instant::now();
    let norm14 = normalizer_of_cyclic(&g14.generators()[0])?;
    report.add(
        "normalizer order of the order-14 cyclic group",
        Provenance::Recorded("normalizer has order 168".into()),
        168u128,
        norm14.group.order().unwrap_or(0),
        t,
    );
    let t = Instant::now();
    let plan = make_subproblems(&model14, &g14, &norm14.group)?;
    report.add(
        "subproblem count and class type",
        Provenance::Recorded("66 subproblems of type 1^1 4^13 6^2 12^50".into()),
        "66: 1^1 4^13 6^2 12^50",
        format!("{}: {}", plan.subproblems.len(), plan.class_type_string()),
        t,
    );

    // 9. solver positives
    let order127 = cyclic_subgroup_classes(7, 127)?.remove(0);
    let model127 = build_model(7, 3, 4, &order127, 1)?;
    let t = Instant::now();
    let r127 = solve(&model127, &SolveConfig::default());
    report.add(
        "order-127 model proven optimum",
        Provenance::Recorded("codes of maximum size 254".into()),
        "254 (Optimal)",
        format!("{} ({:?})", r127.objective, r127.status),
        t,
    );
    let t = Instant::now();
    let code127 = model127.decode_selection(&r127.selection, &order127)?;
    report.add(
        "order-127 solution decodes to a distance-4 code",
        Provenance::Oracle("decode and pairwise distance check".into()),
        "254 words, distance >= 4",
        format!(
            "{} words, distance >= {}",
            code127.len(),
            code127.min_distance().unwrap_or(0)
        ),
        t,
    );
    // decomposition exactness on the order-127 model
    let t = Instant::now();
    let norm127 = normalizer_of_cyclic(&order127.generators()[0])?;
    let plan127 = make_subproblems(&model127, &order127, &norm127.group)?;
    let portfolio = crate::solver::solve_portfolio(
        &model127,
        &plan127,
        &SolveConfig {
            deterministic: opts.deterministic,
            threads: opts.threads,
            ..Default::default()
        },
    );
    report.add(
        "normalizer decomposition reproduces the order-127 optimum",
        Provenance::Oracle("direct solve of the same model".into()),
        format!("{} (Optimal)", r127.objective),
        format!("{} ({:?})", portfolio.objective, portfolio.status),
        t,
    );
    // protocol values
    let t = Instant::now();
    let (p127, _) = compute_protocol(
        &order127,
        &ProtocolConfig {
            kappa: 328,
            time_budget: Duration::from_secs(600),
            threads: opts.threads,
        },
    )?;
    report.add(
        "protocol rejects the order-127 group at kappa=328",
        Provenance::Recorded("maximum 254 is below 329".into()),
        0u8,
        p127,
        t,
    );
    if opts.fast {
        report.add_skipped(
            "order-31 incumbent 279",
            Provenance::Recorded("a code of size 279".into()),
            "fast mode skips solver checks beyond order-127",
        );
        report.add_skipped(
            "order-31 proven optimum 279",
            Provenance::Recorded("279 is also the maximum".into()),
            "fast mode skips solver checks beyond order-127",
        );
    } else {
        let model31 = build_model(7, 3, 4, &order31, 1)?;
        let t = Instant::now();
        let r31 = solve(
            &model31,
            &SolveConfig {
                mode: SolveMode::Decision { target: 279 },
                time_budget: Some(opts.budget_order31),
                ..Default::default()
            },
        );
        report.add(
            "order-31 incumbent reaches 279 in decision mode",
            Provenance::Recorded("a code of size 279".into()),
            "FeasibleAtTarget >= 279",
            format!(
                "{:?} {} {}",
                r31.status,
                if r31.objective >= 279 { ">=" } else { "<" },
                279
            ),
            t,
        );
        // protocol accepts at kappa = 278
        let t = Instant::now();
        let (p31, _) = compute_protocol(
            &order31,
            &ProtocolConfig {
                kappa: 278,
                time_budget: opts.budget_order31,
                threads: opts.threads,
            },
        )?;
        report.add(
            "protocol accepts the order-31 group at kappa=278",
            Provenance::Recorded("feasible at 279".into()),
            1u8,
            p31,
            t,
        );
        // the optimality proof is quick with this bound; run it outright
        let t = Instant::now();
        let r31opt = solve(
            &model31,
            &SolveConfig {
                mode: SolveMode::Decision { target: 280 },
                time_budget: Some(opts.budget_order31),
                ..Default::default()
            },
        );
        report.add(
            "order-31 optimum proven at 279 (no 280 exists)",
            Provenance::Recorded("279 is also the maximum".into()),
            "InfeasibleBelowTarget",
            format!("{:?}", r31opt.status),
            t,
        );
    }

    // 10. solver oracle equivalence
    let t = Instant::now();
    let (all_match, bounds_valid) = oracle_sweep(200);
    report.add(
        "branch-and-bound equals exhaustive enumeration (200 random models)",
        Provenance::Oracle("feasibility-only exhaustive enumeration".into()),
        true,
        all_match,
        t,
    );
    let t = Instant::now();
    report.add(
        "root bound dominates the true optimum on all random models",
        Provenance::Oracle("exhaustive enumeration".into()),
        true,
        bounds_valid,
        t,
    );

    // 11. ladder
    if opts.fast {
        report.add_skipped(
            "order-9 ladder types",
            Provenance::Recorded("abstract types Z_9 and Z_3 x Z_3".into()),
            "fast mode skips the ladder checks",
        );
        report.add_skipped(
            "ladder completeness at desk scale",
            Provenance::Oracle("brute-force subgroup enumeration".into()),
            "fast mode skips the ladder checks",
        );
    } else {
        let t = Instant::now();
        let classes = cyclic_subgroup_classes(7, 3)?;
        let surviving: Vec<MatrixGroup> = classes
            .into_iter()
            .filter(|c| fixed_space_dim(&c.generators()[0]) < 5)
            .collect();
        let mut pairs = Vec::new();
        for tg in surviving {
            let n = normalizer_of_cyclic(&tg.generators()[0])?;
            pairs.push((tg, n.group));
        }
        let out = ladder_extend(&LadderInput {
            pairs,
            t: 3,
            u: 9,
            ambient: None,
        })?;
        let mut labels: BTreeSet<String> = BTreeSet::new();
        for g in &out.groups {
            labels.insert(match fingerprint(g)? {
                AbstractType::Known(l) => l,
                AbstractType::Ambiguous(_) => "?".to_string(),
            });
        }
        report.add(
            "order-9 ladder produces exactly the types Z_9 and Z_3 x Z_3",
            Provenance::Recorded("abstract types Z_9 and Z_3 x Z_3".into()),
            "{\"Z_3 x Z_3\", \"Z_9\"}",
            format!(
                "{{{}}}",
                labels
                    .iter()
                    .map(|l| format!("{l:?}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            t,
        );
        let t = Instant::now();
        let agreement = ladder_brute_force_agreement(&g14)?;
        report.add(
            "ladder matches brute-force subgroup enumeration in an order-168 ambient",
            Provenance::Oracle("pairwise-closure subgroup enumeration".into()),
            true,
            agreement,
            t,
        );
    }

    // 12. improvement protocol
    if opts.fast {
        report.add_skipped(
            "improvement protocol",
            Provenance::Recorded("closeness constraint mechanics".into()),
            "fast mode skips solver checks beyond order-127",
        );
    } else {
        let t = Instant::now();
        let mut model = build_model(7, 3, 4, &g46, 1)?;
        add_closeness(&mut model, &code, &g46, 333)?;
        let r = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 333 },
                time_budget: Some(opts.budget_improve),
                ..Default::default()
            },
        );
        report.add(
            "witness is feasible for its own model with closeness c=333",
            Provenance::Recorded("own orbit selection attains 333".into()),
            "FeasibleAtTarget 333",
            format!("{:?} {}", r.status, r.objective),
            t,
        );
        let t = Instant::now();
        let deleted = orbits
            .iter()
            .find(|o| o.len() == 4)
            .expect("the witness has length-4 orbits");
        let reference = Code::from_words(
            code.words()
                .iter()
                .filter(|w| !deleted.contains(w))
                .cloned()
                .collect(),
        )?;
        let mut model = build_model(7, 3, 4, &g46, 1)?;
        add_closeness(&mut model, &reference, &g46, 329)?;
        let r = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 333 },
                time_budget: Some(opts.budget_improve),
                ..Default::default()
            },
        );
        let recovered = model.decode_selection(&r.selection, &g46)?;
        report.add(
            "deleting one length-4 orbit and re-solving at c=329 recovers 333",
            Provenance::Oracle("the removed orbit remains available".into()),
            "FeasibleAtTarget, 333 words, distance 4",
            format!(
                "{:?}, {} words, distance {}",
                r.status,
                recovered.len(),
                recovered.min_distance().unwrap_or(0)
            ),
            t,
        );
    }

    // documented as out of desk scope
    report.add_skipped(
        "order-2, order-5, and G_{16,1} exclusion campaigns",
        Provenance::Recorded("multi-day exhaustive runs".into()),
        "not reproducible at desk scale",
    );
    report.add_skipped(
        "12 isomorphism classes of 329-codes under G_{16,1}",
        Provenance::Recorded("exactly 12 codes of size 329".into()),
        "not reproducible at desk scale",
    );
    report.add_skipped(
        "order-32 and order-64 ladder values 327 and 317",
        Provenance::Recorded("values from the 2-Sylow ladder".into()),
        "requires normalizers the reference does not list",
    );

    Ok(report)
}

/// Random-model oracle sweep: the exhaustive optimum for every model, and a
/// root-bound domination check. Weights stay small enough that the anticode
/// cap (381 for these parameters) never binds.
fn oracle_sweep(trials: usize) -> (bool, bool) {
    let mut state = 0x00c0ffee_d00dfeedu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut all_match = true;
    let mut bounds_valid = true;
    for _ in 0..trials {
        let nv = 5 + (next() % 18) as usize; // 5..=22
        let nr = 4 + (next() % 27) as usize;
        let lambda = if next() % 4 == 0 { 2u32 } else { 1 };
        let model = synth_model(nv, nr, lambda, &mut next);
        let oracle = brute_force_optimum(&model);
        let r = solve(&model, &SolveConfig::default());
        if r.objective != oracle || r.status != SolveStatus::Optimal {
            all_match = false;
        }
        let root_bound = model
            .anticode_bound()
            .min(model.vars.iter().map(|v| v.weight).sum::<u64>());
        if root_bound < oracle {
            bounds_valid = false;
        }
    }
    (all_match, bounds_valid)
}

fn synth_model(nv: usize, nr: usize, lambda: u32, next: &mut impl FnMut() -> u64) -> KmModel {
    use crate::km::{KmRow, KmVar};
    let reps = crate::geometry::enumerate_grassmannian(10, 1).expect("small enumeration");
    let mut vars: Vec<KmVar> = (0..nv)
        .map(|i| KmVar {
            rep: reps[i].clone(),
            weight: 1 + next() % 14,
            coeffs: Vec::new(),
        })
        .collect();
    let mut rows = Vec::with_capacity(nr);
    for ri in 0..nr {
        let members = 2 + (next() % 3) as usize;
        let mut chosen: BTreeSet<usize> = BTreeSet::new();
        for _ in 0..members {
            chosen.insert((next() % nv as u64) as usize);
        }
        let mut entries = Vec::new();
        for &v in &chosen {
            let m = 1 + (next() % lambda as u64) as u32;
            entries.push((v as u32, m));
            vars[v].coeffs.push((ri as u32, m));
        }
        rows.push(KmRow {
            rep: reps[100 + ri].clone(),
            size: 1,
            entries,
        });
    }
    KmModel {
        n: 7,
        k: 3,
        t: 2,
        d: 4,
        lambda,
        vars,
        rows,
        forced_one: BTreeSet::new(),
        forced_zero: BTreeSet::new(),
        closeness: None,
        full_var_sizes: Vec::new(),
        warnings: Vec::new(),
    }
}

/// Exhaustive maximum over all feasible selections. Pruning uses only
/// feasibility (supersets of infeasible selections stay infeasible), not
/// bounds, so this is independent of the branch-and-bound under test.
fn brute_force_optimum(model: &KmModel) -> u64 {
    fn rec(model: &KmModel, idx: usize, caps: &mut Vec<u32>, weight: u64, best: &mut u64) {
        if weight > *best {
            *best = weight;
        }
        if idx == model.vars.len() {
            return;
        }
        // include idx when it fits
        let fits = model.vars[idx]
            .coeffs
            .iter()
            .all(|&(ri, m)| caps[ri as usize] >= m);
        if fits {
            for &(ri, m) in &model.vars[idx].coeffs {
                caps[ri as usize] -= m;
            }
            rec(model, idx + 1, caps, weight + model.vars[idx].weight, best);
            for &(ri, m) in &model.vars[idx].coeffs {
                caps[ri as usize] += m;
            }
        }
        rec(model, idx + 1, caps, weight, best);
    }
    let mut caps = vec![model.lambda; model.rows.len()];
    let mut best = 0;
    rec(model, 0, &mut caps, 0, &mut best);
    best
}

/// Desk-scale ladder completeness: inside the order-168 normalizer of the
/// order-14 element, all order-14 subgroups found by pairwise closures must
/// agree with the `t=7 -> u=14` ladder up to ambient conjugacy.
fn ladder_brute_force_agreement(g14: &MatrixGroup) -> Result<bool> {
    let ambient = normalizer_of_cyclic(&g14.generators()[0])?.group;
    let els = ambient.elements().unwrap().to_vec();
    // order-7 cyclic subgroups of the ambient, up to ambient conjugacy
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut t_classes: Vec<MatrixGroup> = Vec::new();
    for e in &els {
        if e.element_order(200)? != 7 {
            continue;
        }
        let cyc = MatrixGroup::from_generators(None, vec![e.clone()])?.closure(8)?;
        let key = subgroup_key(&cyc);
        if seen.contains(&key) {
            continue;
        }
        // mark the whole ambient conjugacy orbit of this subgroup
        for h in &els {
            let hinv = h.inverse()?;
            let conj: Vec<BitMatrix> = cyc
                .elements()
                .unwrap()
                .iter()
                .map(|m| hinv.mul(m).and_then(|x| x.mul(h)))
                .collect::<Result<_>>()?;
            let cg = MatrixGroup::from_elements(None, conj)?;
            seen.insert(subgroup_key(&cg));
        }
        t_classes.push(cyc);
    }
    let mut pairs = Vec::new();
    for t in &t_classes {
        let n = normalizer_within(&ambient, t)?;
        pairs.push((t.clone(), n));
    }
    let out = ladder_extend(&LadderInput {
        pairs,
        t: 7,
        u: 14,
        ambient: Some(ambient.clone()),
    })?;
    // brute force: closures of all element pairs that hit order 14
    // (groups of order 2p are 2-generated)
    let mut brute: BTreeSet<Vec<u64>> = BTreeSet::new();
    for a in &els {
        for b in &els {
            if let Ok(g) = MatrixGroup::from_generators(None, vec![a.clone(), b.clone()])
                .and_then(|g| g.closure(15))
            {
                if g.order() == Some(14) {
                    brute.insert(subgroup_key(&g));
                }
            }
        }
    }
    // reduce brute-force subgroups to ambient-conjugacy classes
    let mut brute_classes: Vec<Vec<u64>> = Vec::new();
    let mut assigned: BTreeSet<Vec<u64>> = BTreeSet::new();
    for key in &brute {
        if assigned.contains(key) {
            continue;
        }
        let members = unkey_subgroup(key, 7);
        for h in &els {
            let hinv = h.inverse()?;
            let mut conj: Vec<BitMatrix> = members
                .iter()
                .map(|m| hinv.mul(m).and_then(|x| x.mul(h)))
                .collect::<Result<_>>()?;
            conj.sort_unstable_by(|a, b| a.rows().cmp(b.rows()));
            assigned.insert(flatten(&conj));
        }
        brute_classes.push(key.clone());
    }
    if brute_classes.len() != out.groups.len() || out.class_count_lower != out.class_count_upper {
        return Ok(false);
    }
    // one-to-one matching up to ambient conjugacy
    let mut matched = vec![false; brute_classes.len()];
    for g in &out.groups {
        let mut hit = false;
        for (i, key) in brute_classes.iter().enumerate() {
            if matched[i] {
                continue;
            }
            let other = MatrixGroup::from_elements(None, unkey_subgroup(key, 7))?;
            if ambient_conjugate(&ambient, g, &other)? {
                matched[i] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(matched.iter().all(|&m| m))
}

fn subgroup_key(g: &MatrixGroup) -> Vec<u64> {
    flatten(g.elements().expect("closed"))
}

fn flatten(els: &[BitMatrix]) -> Vec<u64> {
    let mut out = Vec::with_capacity(els.len() * els[0].nrows());
    for e in els {
        out.extend_from_slice(e.rows());
    }
    out
}

fn unkey_subgroup(key: &[u64], dim: usize) -> Vec<BitMatrix> {
    key.chunks(dim)
        .map(|rows| BitMatrix::from_rows(rows.to_vec(), dim))
        .collect()
}

fn ambient_conjugate(ambient: &MatrixGroup, u1: &MatrixGroup, u2: &MatrixGroup) -> Result<bool> {
    let u2_keys: BTreeSet<&[u64]> = u2.elements().unwrap().iter().map(|m| m.rows()).collect();
    let u1_els = u1.elements().unwrap();
    for g in ambient.elements().unwrap() {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_battery_passes() {
        let report = run_battery(&BatteryOptions {
            fast: true,
            ..Default::default()
        })
        .unwrap();
        assert!(report.all_passed(), "\n{}", report.render_text());
        assert!(report.skipped() >= 3);
    }

    #[test]
    fn verify_code_reports_facts() {
        let (code, g46) = witness_code().unwrap();
        let report = verify_code(
            code.words().to_vec(),
            &VerifyCodeOptions {
                group: Some(g46),
                check_aut: false,
                expect_distance: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.all_passed(), "\n{}", report.render_text());
        let size_check = report
            .checks
            .iter()
            .find(|c| c.name == "code size")
            .unwrap();
        assert_eq!(size_check.observed, "333");
    }
}
