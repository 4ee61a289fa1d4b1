//! Exact maximum-weight orbit packing by depth-first branch-and-bound, the
//! accept/reject protocol over kappa, and parallel subproblem portfolios.

use crate::error::Result;
use crate::groups::MatrixGroup;
use crate::km::{KmModel, SubproblemPlan};
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum SolveStatus {
    /// The search tree was exhausted; the incumbent is the optimum.
    Optimal,
    /// Decision mode found a selection reaching the target.
    FeasibleAtTarget,
    /// Decision mode exhausted the tree without reaching the target.
    InfeasibleBelowTarget,
    TimedOut,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveMode {
    Optimize,
    Decision { target: u64 },
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub mode: SolveMode,
    pub time_budget: Option<Duration>,
    pub threads: usize,
    pub deterministic: bool,
    pub record_bound_trace: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: SolveMode::Optimize,
            time_budget: None,
            threads: 0, // rayon default
            deterministic: false,
            record_bound_trace: false,
        }
    }
}

/// The protocol parameters: reject when the proven optimum stays at or
/// below `kappa`, accept on a witness above it or on timeout.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub kappa: u64,
    pub time_budget: Duration,
    pub threads: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            kappa: 328,
            time_budget: Duration::from_secs(48 * 3600),
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SolveResult {
    /// Selected variable indices, ascending.
    pub selection: Vec<u32>,
    pub objective: u64,
    pub status: SolveStatus,
    pub nodes: u64,
    pub wall_ms: u128,
    /// `(nodes, incumbent)` improvements when tracing is enabled.
    pub bound_trace: Option<Vec<(u64, u64)>>,
}

struct SearchState<'a> {
    model: &'a KmModel,
    /// branch order: descending weight, ties by variable index (key order)
    branch_order: Vec<u32>,
    available: Vec<bool>,
    caps: Vec<u32>,
    selected: Vec<u32>,
    weight: u64,
    avail_weight: u64,
    /// closeness bookkeeping
    is_close: Vec<bool>,
    close_threshold: u64,
    close_selected: u64,
    close_available: u64,
    anticode_total: u64,
    // incumbent
    best_weight: u64,
    best_selection: Vec<u32>,
    // control
    mode: SolveMode,
    deadline: Option<Instant>,
    shared_best: Option<&'a AtomicU64>,
    stop: Option<&'a AtomicBool>,
    nodes: u64,
    timed_out: bool,
    stopped: bool,
    trace: Option<Vec<(u64, u64)>>,
}

impl<'a> SearchState<'a> {
    fn new(model: &'a KmModel, config: &SolveConfig) -> SearchState<'a> {
        let nv = model.vars.len();
        let mut branch_order: Vec<u32> = (0..nv as u32).collect();
        branch_order.sort_by(|&a, &b| {
            model.vars[b as usize]
                .weight
                .cmp(&model.vars[a as usize].weight)
                .then(a.cmp(&b))
        });
        let (close_ids, close_threshold) = match &model.closeness {
            Some(c) => (c.var_ids.clone(), c.threshold),
            None => (Vec::new(), 0),
        };
        let mut is_close = vec![false; nv];
        for &v in &close_ids {
            is_close[v as usize] = true;
        }
        let close_available = close_ids
            .iter()
            .map(|&v| model.vars[v as usize].weight)
            .sum();
        let avail_weight = model.vars.iter().map(|v| v.weight).sum();
        SearchState {
            model,
            branch_order,
            available: vec![true; nv],
            caps: vec![model.lambda; model.rows.len()],
            selected: Vec::new(),
            weight: 0,
            avail_weight,
            is_close,
            close_threshold,
            close_selected: 0,
            close_available,
            anticode_total: model.anticode_bound(),
            best_weight: 0,
            best_selection: Vec::new(),
            mode: config.mode,
            deadline: config.time_budget.map(|b| Instant::now() + b),
            shared_best: None,
            stop: None,
            nodes: 0,
            timed_out: false,
            stopped: false,
            trace: config.record_bound_trace.then(Vec::new),
        }
    }

    fn mark_unavailable(&mut self, v: u32, undo: &mut Vec<u32>) {
        if self.available[v as usize] {
            self.available[v as usize] = false;
            self.avail_weight -= self.model.vars[v as usize].weight;
            if self.is_close[v as usize] {
                self.close_available -= self.model.vars[v as usize].weight;
            }
            undo.push(v);
        }
    }

    fn undo_unavailable(&mut self, undo: &[u32]) {
        for &v in undo {
            self.available[v as usize] = true;
            self.avail_weight += self.model.vars[v as usize].weight;
            if self.is_close[v as usize] {
                self.close_available += self.model.vars[v as usize].weight;
            }
        }
    }

    /// Select a variable: consume row capacity and retire now-conflicting
    /// variables. The variable must currently be available.
    fn include(&mut self, v: u32, undo: &mut Vec<u32>) {
        debug_assert!(self.available[v as usize]);
        self.mark_unavailable(v, undo);
        self.selected.push(v);
        self.weight += self.model.vars[v as usize].weight;
        if self.is_close[v as usize] {
            self.close_selected += self.model.vars[v as usize].weight;
        }
        let coeffs = self.model.vars[v as usize].coeffs.clone();
        for (ri, m) in coeffs {
            self.caps[ri as usize] -= m;
            let cap = self.caps[ri as usize];
            // retire every variable that no longer fits this row
            let entries = &self.model.rows[ri as usize].entries;
            let mut to_retire: Vec<u32> = Vec::new();
            for &(w, mw) in entries {
                if self.available[w as usize] && mw > cap {
                    to_retire.push(w);
                }
            }
            for w in to_retire {
                self.mark_unavailable(w, undo);
            }
        }
    }

    fn unclude(&mut self, v: u32, undo: &[u32]) {
        for &(ri, m) in &self.model.vars[v as usize].coeffs {
            self.caps[ri as usize] += m;
        }
        self.selected.pop();
        self.weight -= self.model.vars[v as usize].weight;
        if self.is_close[v as usize] {
            self.close_selected -= self.model.vars[v as usize].weight;
        }
        self.undo_unavailable(undo);
    }

    fn global_best(&self) -> u64 {
        match self.shared_best {
            Some(cell) => cell.load(Ordering::Relaxed).max(self.best_weight),
            None => self.best_weight,
        }
    }

    fn record_incumbent(&mut self) {
        if self.weight > self.best_weight {
            self.best_weight = self.weight;
            self.best_selection = self.selected.clone();
            if let Some(t) = self.trace.as_mut() {
                t.push((self.nodes, self.weight));
            }
            if let Some(cell) = self.shared_best {
                cell.fetch_max(self.weight, Ordering::Relaxed);
            }
            if let SolveMode::Decision { target } = self.mode {
                if self.weight >= target {
                    self.stopped = true;
                    if let Some(s) = self.stop {
                        s.store(true, Ordering::Relaxed);
                    }
                }
            }
        }
    }

    fn bound(&self) -> u64 {
        // counting bound: remaining t-space capacity over t-spaces per word;
        // covered capacity equals 7 * weight by the conservation identity
        let counting = self.anticode_total - self.weight;
        self.weight + counting.min(self.avail_weight)
    }

    fn prune(&self) -> bool {
        if self.close_threshold > 0
            && self.close_selected + self.close_available < self.close_threshold
        {
            return true;
        }
        let bound = self.bound();
        match self.mode {
            SolveMode::Optimize => bound <= self.global_best(),
            SolveMode::Decision { target } => bound < target || self.global_best() >= target,
        }
    }

    fn dfs(&mut self, from_rank: usize) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
            if let Some(s) = self.stop {
                if s.load(Ordering::Relaxed) {
                    self.stopped = true;
                }
            }
        }
        if self.timed_out || self.stopped {
            return;
        }
        if self.prune() {
            return;
        }
        // branch on the heaviest available variable
        let Some(rank) = (from_rank..self.branch_order.len())
            .find(|&r| self.available[self.branch_order[r] as usize])
        else {
            return;
        };
        let v = self.branch_order[rank];
        // include first
        let mut undo = Vec::new();
        self.include(v, &mut undo);
        self.record_incumbent();
        self.dfs(rank + 1);
        self.unclude(v, &undo);
        if self.timed_out || self.stopped {
            return;
        }
        // then exclude
        let mut undo = Vec::new();
        self.mark_unavailable(v, &mut undo);
        self.dfs(rank + 1);
        self.undo_unavailable(&undo);
    }
}

fn apply_fixtures(state: &mut SearchState) -> bool {
    let zeros: Vec<u32> = state.model.forced_zero.iter().copied().collect();
    for v in zeros {
        let mut undo = Vec::new();
        state.mark_unavailable(v, &mut undo); // never undone
    }
    let ones: Vec<u32> = state.model.forced_one.iter().copied().collect();
    for v in ones {
        if !state.available[v as usize] {
            return false;
        }
        let mut undo = Vec::new();
        state.include(v, &mut undo); // never undone
    }
    true
}

/// Depth-first branch-and-bound over a model. Branches on the heaviest
/// available variable (ties in key order); the node bound is the current
/// weight plus the smaller of the anticode counting bound and the sum of
/// remaining available weights.
pub fn solve(model: &KmModel, config: &SolveConfig) -> SolveResult {
    solve_shared(model, config, None, None)
}

fn solve_shared(
    model: &KmModel,
    config: &SolveConfig,
    shared_best: Option<&AtomicU64>,
    stop: Option<&AtomicBool>,
) -> SolveResult {
    let start = Instant::now();
    let mut state = SearchState::new(model, config);
    state.shared_best = shared_best;
    state.stop = stop;
    if !apply_fixtures(&mut state) {
        return SolveResult {
            selection: Vec::new(),
            objective: 0,
            status: SolveStatus::InfeasibleBelowTarget,
            nodes: 0,
            wall_ms: start.elapsed().as_millis(),
            bound_trace: state.trace.take(),
        };
    }
    state.record_incumbent();
    state.dfs(0);
    let status = if state.stopped {
        match config.mode {
            SolveMode::Decision { target } if state.best_weight >= target => {
                SolveStatus::FeasibleAtTarget
            }
            // stopped by a sibling subproblem's success
            _ => SolveStatus::FeasibleAtTarget,
        }
    } else if state.timed_out {
        SolveStatus::TimedOut
    } else {
        match config.mode {
            SolveMode::Optimize => SolveStatus::Optimal,
            SolveMode::Decision { target } => {
                if state.best_weight >= target {
                    SolveStatus::FeasibleAtTarget
                } else {
                    SolveStatus::InfeasibleBelowTarget
                }
            }
        }
    };
    let mut selection = state.best_selection.clone();
    selection.sort_unstable();
    SolveResult {
        selection,
        objective: state.best_weight,
        status,
        nodes: state.nodes,
        wall_ms: start.elapsed().as_millis(),
        bound_trace: state.trace.take(),
    }
}

/// The decision protocol: 1 when a code larger than `kappa` exists under
/// the group (or the computation timed out), 0 when the search proves none
/// does. Conjugation-invariant because conjugate groups yield isomorphic
/// models.
pub fn compute_protocol(
    group: &MatrixGroup,
    protocol: &ProtocolConfig,
) -> Result<(u8, SolveResult)> {
    let model = crate::km::build_model(7, 3, 4, group, 1)?;
    let config = SolveConfig {
        mode: SolveMode::Decision {
            target: protocol.kappa + 1,
        },
        time_budget: Some(protocol.time_budget),
        threads: protocol.threads,
        deterministic: false,
        record_bound_trace: false,
    };
    let result = solve(&model, &config);
    let p = match result.status {
        SolveStatus::FeasibleAtTarget | SolveStatus::TimedOut => 1,
        SolveStatus::InfeasibleBelowTarget | SolveStatus::Optimal => 0,
    };
    Ok((p, result))
}

/// Solve the subproblems of a normalizer plan with a shared incumbent.
/// Subproblem `i` forces its class representative to 1 and excludes all
/// variables of earlier classes; the maximum over subproblem optima equals
/// the model optimum.
pub fn solve_portfolio(
    model: &KmModel,
    plan: &SubproblemPlan,
    config: &SolveConfig,
) -> SolveResult {
    let start = Instant::now();
    if plan.subproblems.is_empty() {
        return solve(model, config);
    }
    let shared = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let sub_models: Vec<KmModel> = plan
        .subproblems
        .iter()
        .enumerate()
        .map(|(i, sp)| {
            let mut m = model.clone();
            m.forced_one.insert(sp.forced_var);
            for v in plan.exclusions_for(i) {
                m.forced_zero.insert(v);
            }
            m
        })
        .collect();
    let run_one = |m: &KmModel| solve_shared(m, config, Some(&shared), Some(&stop));
    let results: Vec<SolveResult> = if config.deterministic {
        sub_models.iter().map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build();
        match pool {
            Ok(pool) => pool.install(|| sub_models.par_iter().map(run_one).collect()),
            Err(_) => sub_models.iter().map(run_one).collect(),
        }
    };
    // the empty selection is always feasible for the base model
    let mut best = SolveResult {
        selection: Vec::new(),
        objective: 0,
        status: SolveStatus::Optimal,
        nodes: 0,
        wall_ms: 0,
        bound_trace: None,
    };
    let mut all_exhausted = true;
    let mut any_feasible_at_target = false;
    let mut nodes = 0;
    for r in results {
        nodes += r.nodes;
        match r.status {
            SolveStatus::TimedOut => all_exhausted = false,
            SolveStatus::FeasibleAtTarget => any_feasible_at_target = true,
            _ => {}
        }
        if r.objective > best.objective || best.selection.is_empty() && !r.selection.is_empty() {
            best.selection = r.selection;
            best.objective = r.objective;
        }
    }
    best.nodes = nodes;
    best.wall_ms = start.elapsed().as_millis();
    best.status = match config.mode {
        SolveMode::Optimize => {
            if all_exhausted {
                SolveStatus::Optimal
            } else {
                SolveStatus::TimedOut
            }
        }
        SolveMode::Decision { target } => {
            if any_feasible_at_target || best.objective >= target {
                SolveStatus::FeasibleAtTarget
            } else if all_exhausted {
                SolveStatus::InfeasibleBelowTarget
            } else {
                SolveStatus::TimedOut
            }
        }
    };
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;
    use crate::geometry::Subspace;
    use crate::gf2::BitMatrix;
    use crate::groups::conjugacy::cyclic_subgroup_classes;
    use crate::groups::MatrixGroup;
    use crate::km::{build_model, KmModel, KmRow, KmVar};
    use std::collections::BTreeSet;

    fn tiny_model(weights: &[u64], rows: &[&[usize]], lambda: u32) -> KmModel {
        // synthetic model over fake 1-dimensional reps (distinct keys)
        let all = crate::geometry::enumerate_grassmannian(10, 1).unwrap();
        let vars: Vec<KmVar> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| KmVar {
                rep: all[i].clone(),
                weight: w,
                coeffs: Vec::new(),
            })
            .collect();
        let mut model = KmModel {
            n: 7,
            k: 3,
            t: 2,
            d: 4,
            lambda,
            vars,
            rows: Vec::new(),
            forced_one: BTreeSet::new(),
            forced_zero: BTreeSet::new(),
            closeness: None,
            full_var_sizes: weights.to_vec(),
            warnings: Vec::new(),
        };
        for (ri, members) in rows.iter().enumerate() {
            let entries: Vec<(u32, u32)> = members.iter().map(|&v| (v as u32, 1)).collect();
            for &v in members.iter() {
                model.vars[v].coeffs.push((ri as u32, 1));
            }
            model.rows.push(KmRow {
                rep: all[100 + ri].clone(),
                size: 1,
                entries,
            });
        }
        model
    }

    #[test]
    fn empty_model_is_trivially_optimal() {
        let model = tiny_model(&[], &[], 1);
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.objective, 0);
        assert_eq!(r.status, SolveStatus::Optimal);
    }

    #[test]
    fn small_hand_model() {
        // vars 0,1 conflict; 1,2 conflict; best is 0+2 (w 5+4) or forced
        let model = tiny_model(&[5, 6, 4], &[&[0, 1], &[1, 2]], 1);
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.objective, 9);
        assert_eq!(r.selection, vec![0, 2]);
        assert_eq!(r.status, SolveStatus::Optimal);
    }

    #[test]
    fn fixtures_respected() {
        let mut model = tiny_model(&[5, 6, 4], &[&[0, 1], &[1, 2]], 1);
        model.forced_one.insert(1);
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.objective, 6);
        assert_eq!(r.selection, vec![1]);
        // conflicting fixtures are infeasible
        model.forced_one.insert(0);
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::InfeasibleBelowTarget);
    }

    #[test]
    fn closeness_constraint_prunes() {
        let mut model = tiny_model(&[5, 6, 4], &[&[0, 1], &[1, 2]], 1);
        model.closeness = Some(crate::km::Closeness {
            var_ids: vec![1],
            threshold: 6,
        });
        // var 1 must be taken, so the optimum drops to 6
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.objective, 6);
        assert_eq!(r.selection, vec![1]);
    }

    #[test]
    fn order_127_optimum_is_254() {
        let g = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        let r = solve(&model, &SolveConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, 254);
        // decode to a verified code
        let code = model.decode_selection(&r.selection, g).unwrap();
        assert_eq!(code.len(), 254);
        assert!(code.min_distance().unwrap() >= 4);
    }

    #[test]
    fn decision_mode_statuses() {
        let g = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        let feasible = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 254 },
                ..Default::default()
            },
        );
        assert_eq!(feasible.status, SolveStatus::FeasibleAtTarget);
        assert!(feasible.objective >= 254);
        let infeasible = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 255 },
                ..Default::default()
            },
        );
        assert_eq!(infeasible.status, SolveStatus::InfeasibleBelowTarget);
    }

    #[test]
    fn timeout_path_reports_timed_out() {
        let g = MatrixGroup::from_group_file(&data::bundled_group(2, 1).unwrap()).unwrap();
        let model = build_model(7, 3, 4, &g, 1).unwrap();
        let r = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 329 },
                time_budget: Some(std::time::Duration::from_millis(100)),
                ..Default::default()
            },
        );
        assert_eq!(r.status, SolveStatus::TimedOut);
    }

    #[test]
    fn solution_never_exceeds_anticode_bound() {
        let g = &cyclic_subgroup_classes(7, 31).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        let r = solve(
            &model,
            &SolveConfig {
                mode: SolveMode::Decision { target: 279 },
                time_budget: Some(std::time::Duration::from_secs(60)),
                ..Default::default()
            },
        );
        assert!(r.objective <= 381);
    }

    #[test]
    fn monotonicity_for_nested_groups() {
        // the order-127 Singer group inside its order-889 normalizer: both
        // models solve to proven optimality, and a subgroup never does worse
        use crate::normalizer::normalizer_of_cyclic;
        let m = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let n = normalizer_of_cyclic(&m.generators()[0]).unwrap().group;
        assert_eq!(n.order(), Some(889));
        for e in m.elements().unwrap() {
            assert!(n.contains(e), "Singer group must lie inside its normalizer");
        }
        let model_m = build_model(7, 3, 4, m, 1).unwrap();
        let model_n = build_model(7, 3, 4, &n, 1).unwrap();
        let rm = solve(&model_m, &SolveConfig::default());
        let rn = solve(&model_n, &SolveConfig::default());
        assert_eq!(rm.status, SolveStatus::Optimal);
        assert_eq!(rn.status, SolveStatus::Optimal);
        assert!(rm.objective >= rn.objective);
    }

    #[test]
    fn conjugate_model_has_equal_optimum() {
        let g = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let mut c = BitMatrix::identity(7);
        c.set(2, 6, true);
        c.set(5, 1, true);
        let cinv = c.inverse().unwrap();
        let conj_gens: Vec<BitMatrix> = g
            .generators()
            .iter()
            .map(|m| cinv.mul(m).unwrap().mul(&c).unwrap())
            .collect();
        let gc = MatrixGroup::from_generators(None, conj_gens)
            .unwrap()
            .closure(200)
            .unwrap();
        let ma = build_model(7, 3, 4, g, 1).unwrap();
        let mb = build_model(7, 3, 4, &gc, 1).unwrap();
        assert_eq!(ma.full_type_string(), mb.full_type_string());
        assert_eq!(ma.pruned_type_string(), mb.pruned_type_string());
        let ra = solve(&ma, &SolveConfig::default());
        let rb = solve(&mb, &SolveConfig::default());
        assert_eq!(ra.objective, rb.objective);
    }

    #[test]
    fn deterministic_portfolio_equals_direct_solve() {
        use crate::km::make_subproblems;
        use crate::normalizer::normalizer_of_cyclic;
        let g = &cyclic_subgroup_classes(7, 127).unwrap()[0];
        let model = build_model(7, 3, 4, g, 1).unwrap();
        let gen = g.generators()[0].clone();
        let norm = normalizer_of_cyclic(&gen).unwrap().group;
        let plan = make_subproblems(&model, g, &norm).unwrap();
        let direct = solve(&model, &SolveConfig::default());
        let config = SolveConfig {
            deterministic: true,
            ..Default::default()
        };
        let viaplan = solve_portfolio(&model, &plan, &config);
        assert_eq!(viaplan.objective, direct.objective);
        assert_eq!(viaplan.status, SolveStatus::Optimal);
        // parallel run agrees on the objective
        let parallel = solve_portfolio(&model, &plan, &SolveConfig::default());
        assert_eq!(parallel.objective, direct.objective);
        let _ = Subspace::from_matrix(&BitMatrix::identity(7));
    }
}
