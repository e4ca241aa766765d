//! 2-SAT decision via the implication digraph.
//!
//! Every clause `(l₁ ∨ l₂)` contributes the two implications `¬l₁ → l₂` and
//! `¬l₂ → l₁` on the digraph over all `2n` literals. The formula is
//! satisfiable exactly when no strongly connected component contains a
//! variable together with its negation; a satisfying assignment falls out of
//! the component order, and in the unsatisfiable case a closed contradictory
//! walk through some `v` and `¬v` certifies the verdict.

use crate::components::Decomposition;
use crate::error::{Error, Result};
use crate::sampler::{Digraph, Formula, Lit, TypeAssignment};
use crate::scc::{tarjan, Csr, SccResult};

/// The implication digraph of a formula, with arc provenance: the arcs of
/// clause `c` sit at positions `2c` and `2c + 1`.
#[derive(Debug, Clone)]
pub struct ImplicationDigraph {
    n_vars: usize,
    arcs: Vec<(Lit, Lit)>,
}

impl ImplicationDigraph {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of literal nodes (`2 · n_vars`).
    pub fn node_count(&self) -> usize {
        2 * self.n_vars
    }

    pub fn arcs(&self) -> &[(Lit, Lit)] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Which clause produced arc `index`.
    pub fn clause_of_arc(&self, index: usize) -> usize {
        index / 2
    }

    /// View as a plain literal digraph (for the structure detectors).
    pub fn to_literal_digraph(&self) -> Digraph {
        Digraph::new(self.n_vars, self.arcs.clone()).expect("arcs are in range")
    }

    fn csr(&self) -> Csr {
        csr_from_lit_arcs(2 * self.n_vars, &self.arcs)
    }
}

fn csr_from_lit_arcs(nodes: usize, arcs: &[(Lit, Lit)]) -> Csr {
    // Counting pass kept local to avoid materializing a parallel index
    // buffer; implication digraphs reach 10⁷ nodes.
    let pairs: Vec<(u32, u32)> = arcs
        .iter()
        .map(|&(u, v)| (u.index() as u32, v.index() as u32))
        .collect();
    Csr::from_arcs(nodes, &pairs)
}

/// Build the implication digraph: two arcs per clause, in clause order.
pub fn implication_digraph(formula: &Formula) -> ImplicationDigraph {
    let mut arcs = Vec::with_capacity(2 * formula.clause_count());
    for c in formula.clauses() {
        arcs.push((c.a.negate(), c.b));
        arcs.push((c.b.negate(), c.a));
    }
    ImplicationDigraph {
        n_vars: formula.n_vars(),
        arcs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Satisfiable,
    Unsatisfiable,
}

/// Outcome of a solve: a satisfying assignment, or a contradictory closed
/// walk `v ⇝ ¬v ⇝ v` (first literal repeated at the end) as the
/// unsatisfiability witness.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub assignment: Option<Vec<bool>>,
    pub witness: Option<Vec<Lit>>,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Satisfiable
    }
}

/// Decide satisfiability in linear time via strongly connected components.
pub fn solve_scc(formula: &Formula) -> Verdict {
    let dg = implication_digraph(formula);
    let csr = dg.csr();
    let scc = tarjan(&csr);
    let n = formula.n_vars();

    for v in 0..n {
        if scc.comp[2 * v] == scc.comp[2 * v + 1] {
            let witness = contradiction_walk(&csr, &scc, v);
            return Verdict {
                status: Status::Unsatisfiable,
                assignment: None,
                witness: Some(witness),
            };
        }
    }

    // Component ids are reverse-topological (an arc crossing components goes
    // from a larger id to a smaller one), so taking the literal whose
    // component id is smaller picks, for each variable, the literal that
    // comes later in topological order. Every implication out of a chosen
    // literal then targets another chosen literal: if x is true and x → y,
    // then comp(y) ≤ comp(x) < comp(¬x) = comp(¬y's mirror source)... the
    // mirror arc ¬y → ¬x forces comp(¬x) ≤ comp(¬y), hence
    // comp(y) < comp(¬y) and y is true as well.
    let assignment: Vec<bool> = (0..n).map(|v| scc.comp[2 * v] < scc.comp[2 * v + 1]).collect();
    debug_assert!(formula.eval(&assignment));
    Verdict {
        status: Status::Satisfiable,
        assignment: Some(assignment),
        witness: None,
    }
}

/// Closed contradictory walk through variable `v`: a shortest `v → ¬v` path
/// concatenated with a shortest `¬v → v` path, both inside their common
/// component.
fn contradiction_walk(csr: &Csr, scc: &SccResult, v: usize) -> Vec<Lit> {
    let pos = 2 * v;
    let neg = 2 * v + 1;
    let comp = scc.comp[pos];
    let there = bfs_path_in_component(csr, &scc.comp, comp, pos, neg)
        .expect("literals share a component");
    let back = bfs_path_in_component(csr, &scc.comp, comp, neg, pos)
        .expect("literals share a component");
    let mut walk: Vec<Lit> = there.iter().map(|&x| Lit::from_index(x)).collect();
    walk.extend(back[1..].iter().map(|&x| Lit::from_index(x)));
    walk
}

/// Shortest path between two nodes using only nodes of one component.
fn bfs_path_in_component(
    csr: &Csr,
    comp: &[u32],
    component: u32,
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    const UNSEEN: u32 = u32::MAX;
    let mut pred = vec![UNSEEN; csr.node_count()];
    let mut queue = std::collections::VecDeque::new();
    pred[from] = from as u32;
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &w in csr.out(u) {
            let w = w as usize;
            if comp[w] == component && pred[w] == UNSEEN {
                pred[w] = u as u32;
                queue.push_back(w);
            }
        }
    }
    // `from == to` would return the trivial path; callers always pass
    // distinct endpoints, reached or not.
    if pred[to] == UNSEEN || from == to {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[cur] as usize;
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Shrink a closed contradictory walk by cutting every detour between
/// repeated literals that does not carry the contradictory pair. The result
/// is still a closed walk over present arcs containing both `v` and `¬v`;
/// it is simple except possibly where the pair's own loops overlap.
pub fn tighten_witness(walk: &[Lit]) -> Vec<Lit> {
    assert!(walk.len() >= 2 && walk.first() == walk.last(), "walk must be closed");
    let pivot = walk
        .iter()
        .find(|l| walk.contains(&l.negate()))
        .copied()
        .expect("walk must contain a complementary pair");
    let guard = pivot.negate();

    let mut stack: Vec<Lit> = Vec::with_capacity(walk.len());
    for &lit in walk {
        if let Some(p) = stack.iter().position(|&s| s == lit) {
            let slack = &stack[p + 1..];
            if !slack.contains(&pivot) && !slack.contains(&guard) {
                stack.truncate(p + 1);
                continue;
            }
        }
        stack.push(lit);
    }
    // The final literal equals the first; the loop above kept it because the
    // full cycle carries the pair.
    debug_assert!(stack.first() == stack.last());
    stack
}

/// Exhaustive oracle for small formulas. Returns no witness on UNSAT.
pub fn solve_bruteforce(formula: &Formula) -> Result<Verdict> {
    let n = formula.n_vars();
    if n > 25 {
        return Err(Error::param("brute force is capped at 25 variables"));
    }
    let mut assignment = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (v, slot) in assignment.iter_mut().enumerate() {
            *slot = (mask >> v) & 1 == 1;
        }
        if formula.eval(&assignment) {
            return Ok(Verdict {
                status: Status::Satisfiable,
                assignment: Some(assignment),
                witness: None,
            });
        }
    }
    Ok(Verdict {
        status: Status::Unsatisfiable,
        assignment: None,
        witness: None,
    })
}

/// Consistency of a sampled literal digraph: no strongly connected component
/// may contain a variable together with its negation. (The digraph model has
/// no clauses, so this is the direct analogue of satisfiability.)
pub fn digraph_consistent(dg: &Digraph) -> bool {
    let csr = csr_from_lit_arcs(2 * dg.n_vars(), dg.arcs());
    let scc = tarjan(&csr);
    (0..dg.n_vars()).all(|v| scc.comp[2 * v] != scc.comp[2 * v + 1])
}

/// How the cycles of a sampled implication digraph sit inside the kernel's
/// component structure.
#[derive(Debug, Clone, Default)]
pub struct ConfinementReport {
    /// Strongly connected components with at least one internal arc.
    pub nontrivial_sccs: usize,
    /// Nontrivial SCCs whose literal blocks do not all lie inside one
    /// component of the decomposition (including any touching a fragmented
    /// block).
    pub straddling: usize,
    /// Contradictory SCCs (both signs of some variable) confined to a
    /// component that is not itself contradictory.
    pub contradictory_escapes: usize,
}

impl ConfinementReport {
    pub fn is_clean(&self) -> bool {
        self.straddling == 0 && self.contradictory_escapes == 0
    }
}

/// Check that every cycle of the implication digraph is confined to a single
/// component of the kernel decomposition: each nontrivial SCC's literals map
/// (via the type assignment) into one component, and contradictory SCCs map
/// into contradictory components. Violations are possible but vanish
/// asymptotically; the report counts them.
pub fn confinement_check(
    dg: &ImplicationDigraph,
    types: &TypeAssignment,
    decomposition: &Decomposition,
) -> ConfinementReport {
    let nodes = dg.node_count();
    let csr = dg.csr();
    let scc = tarjan(&csr);

    let mut has_internal_arc = vec![false; scc.count];
    for &(u, v) in dg.arcs() {
        if scc.comp[u.index()] == scc.comp[v.index()] {
            has_internal_arc[scc.comp[u.index()] as usize] = true;
        }
    }

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); scc.count];
    for node in 0..nodes {
        members[scc.comp[node] as usize].push(node as u32);
    }

    let mut report = ConfinementReport::default();
    for (c, literals) in members.iter().enumerate() {
        if !has_internal_arc[c] {
            continue;
        }
        report.nontrivial_sccs += 1;

        let mut host: Option<usize> = None;
        let mut straddles = false;
        for &node in literals {
            let block = types.block_of(Lit::from_index(node as usize));
            match decomposition.component_of(block) {
                None => {
                    straddles = true;
                    break;
                }
                Some(comp) => match host {
                    None => host = Some(comp),
                    Some(h) if h != comp => {
                        straddles = true;
                        break;
                    }
                    Some(_) => {}
                },
            }
        }
        if straddles {
            report.straddling += 1;
            continue;
        }

        let set: std::collections::HashSet<u32> = literals.iter().copied().collect();
        let contradictory = literals.iter().any(|&node| set.contains(&(node ^ 1)));
        if contradictory {
            let host = host.expect("non-straddling SCC has a host component");
            if !decomposition.contradictory[host] {
                report.contradictory_escapes += 1;
            }
        }
    }
    report
}

/// Structural validity of an UNSAT witness against its formula: closed,
/// every step is an arc of the implication digraph, and some variable
/// appears with both signs. Used by tests and the CLI verifier.
pub fn witness_is_valid(formula: &Formula, walk: &[Lit]) -> bool {
    if walk.len() < 2 || walk.first() != walk.last() {
        return false;
    }
    let arcs: std::collections::HashSet<(Lit, Lit)> = implication_digraph(formula)
        .arcs()
        .iter()
        .copied()
        .collect();
    if !walk.windows(2).all(|w| arcs.contains(&(w[0], w[1]))) {
        return false;
    }
    walk.iter().any(|l| walk.contains(&l.negate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::decompose;
    use crate::kernel::{BlockKernel, Sign};
    use crate::rng::TrialKey;
    use crate::sampler::{flip_variables, sample_formula, sample_formula_dagger, Clause};

    fn clause(a: i64, b: i64) -> Clause {
        Clause::new(Lit::from_dimacs(a).unwrap(), Lit::from_dimacs(b).unwrap())
    }

    /// The ring-with-a-twist example: three implications chaining the
    /// variables in a cycle, plus two clauses that force contradiction.
    fn ring_unsat() -> Formula {
        Formula::new(
            3,
            vec![
                clause(-1, 2),
                clause(-2, 3),
                clause(-3, 1),
                clause(1, 2),
                clause(-3, -2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn implication_digraph_has_two_arcs_per_clause() {
        let f = ring_unsat();
        let dg = implication_digraph(&f);
        assert_eq!(dg.arc_count(), 10);
        assert_eq!(dg.node_count(), 6);
        // First clause (¬v₀ ∨ v₁): arcs v₀ → v₁ and ¬v₁ → ¬v₀.
        assert_eq!(dg.arcs()[0], (Lit::positive(0), Lit::positive(1)));
        assert_eq!(dg.arcs()[1], (Lit::negative(1), Lit::negative(0)));
        assert_eq!(dg.clause_of_arc(7), 3);

        let empty = implication_digraph(&Formula::empty(4));
        assert_eq!(empty.arc_count(), 0);
    }

    #[test]
    fn ring_formula_is_unsat_with_a_valid_witness() {
        let f = ring_unsat();
        let verdict = solve_scc(&f);
        assert_eq!(verdict.status, Status::Unsatisfiable);
        let walk = verdict.witness.unwrap();
        assert!(witness_is_valid(&f, &walk));
        assert!(solve_bruteforce(&f).unwrap().status == Status::Unsatisfiable);
    }

    #[test]
    fn simple_formulas_solve_sat() {
        let empty = Formula::empty(3);
        let v = solve_scc(&empty);
        assert!(v.is_sat());
        assert_eq!(v.assignment.unwrap().len(), 3);

        let single = Formula::new(2, vec![clause(1, 2)]).unwrap();
        let v = solve_scc(&single);
        assert!(v.is_sat());
        assert!(single.eval(&v.assignment.unwrap()));
    }

    #[test]
    fn brute_force_rejects_large_formulas() {
        assert!(solve_bruteforce(&Formula::empty(26)).is_err());
        assert!(solve_bruteforce(&Formula::empty(25)).is_ok());
    }

    /// All 4096 formulas over the 12 distinct-variable clauses on 3
    /// variables, checked against the exhaustive oracle.
    #[test]
    fn scc_solver_matches_brute_force_exhaustively() {
        let mut universe = Vec::new();
        for i in 0..3usize {
            for j in (i + 1)..3 {
                for (q, s) in [
                    (Sign::Plus, Sign::Plus),
                    (Sign::Plus, Sign::Minus),
                    (Sign::Minus, Sign::Plus),
                    (Sign::Minus, Sign::Minus),
                ] {
                    universe.push(Clause::new(Lit::new(i, q), Lit::new(j, s)));
                }
            }
        }
        assert_eq!(universe.len(), 12);
        for mask in 0u32..(1 << 12) {
            let clauses: Vec<Clause> = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            let f = Formula::new(3, clauses).unwrap();
            let fast = solve_scc(&f);
            let slow = solve_bruteforce(&f).unwrap();
            assert_eq!(fast.status, slow.status, "mask {mask}");
            if let Some(a) = fast.assignment {
                assert!(f.eval(&a), "mask {mask}");
            }
            if let Some(w) = fast.witness {
                assert!(witness_is_valid(&f, &w), "mask {mask}");
            }
        }
    }

    #[test]
    fn random_formulas_agree_with_the_oracle() {
        let w = BlockKernel::homogeneous(1.8).unwrap();
        for trial in 0..300 {
            let n = 4 + (trial % 9) as usize;
            let s = sample_formula(&w, n, 1.0 + (trial % 3) as f64, TrialKey::new(1234, trial))
                .unwrap();
            let fast = solve_scc(&s.formula);
            let slow = solve_bruteforce(&s.formula).unwrap();
            assert_eq!(fast.status, slow.status, "trial {trial}");
            if let Some(a) = &fast.assignment {
                assert!(s.formula.eval(a));
            }
            if let Some(wk) = &fast.witness {
                assert!(witness_is_valid(&s.formula, wk));
            }
        }
    }

    #[test]
    fn flipping_variables_preserves_satisfiability() {
        let w = BlockKernel::one_type(2.0, 1.0, 1.5).unwrap();
        for trial in 0..100 {
            let s = sample_formula(&w, 12, 1.5, TrialKey::new(77, trial)).unwrap();
            let flips: Vec<Sign> = (0..12)
                .map(|v| {
                    if crate::rng::derive(trial, &[v as u64]) & 1 == 0 {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                })
                .collect();
            let flipped = flip_variables(&s.formula, &flips).unwrap();
            assert_eq!(
                solve_scc(&s.formula).status,
                solve_scc(&flipped).status,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn tighten_witness_cuts_detours_and_keeps_the_pair() {
        // Walk x0 → x1 → x2 → x1 → ¬x0 → x0 with a detour through x2.
        let l = |d: i64| Lit::from_dimacs(d).unwrap();
        let walk = vec![l(1), l(2), l(3), l(2), l(-1), l(1)];
        let tight = tighten_witness(&walk);
        assert_eq!(tight, vec![l(1), l(2), l(-1), l(1)]);

        // A walk that is already tight is unchanged.
        let tight2 = tighten_witness(&tight);
        assert_eq!(tight2, tight);
    }

    #[test]
    fn solver_witnesses_survive_tightening() {
        let w = BlockKernel::homogeneous(3.0).unwrap();
        for trial in 0..50 {
            let s = sample_formula(&w, 12, 2.0, TrialKey::new(555, trial)).unwrap();
            let verdict = solve_scc(&s.formula);
            if let Some(walk) = verdict.witness {
                let tight = tighten_witness(&walk);
                assert!(witness_is_valid(&s.formula, &tight), "trial {trial}");
                assert!(tight.len() <= walk.len());
            }
        }
    }

    #[test]
    fn digraph_consistency_matches_scc_structure() {
        // Arcs x0 → x1 → x0: consistent (no complementary pair).
        let arcs = vec![
            (Lit::positive(0), Lit::positive(1)),
            (Lit::positive(1), Lit::positive(0)),
        ];
        assert!(digraph_consistent(&Digraph::new(2, arcs).unwrap()));

        // x0 → ¬x0 → x0: contradictory.
        let arcs = vec![
            (Lit::positive(0), Lit::negative(0)),
            (Lit::negative(0), Lit::positive(0)),
        ];
        assert!(!digraph_consistent(&Digraph::new(1, arcs).unwrap()));
    }

    #[test]
    fn confinement_holds_for_sign_preserving_kernels() {
        // W(+,−) = 3 only: every implication arc preserves the literal sign,
        // so no SCC can ever contain both signs of a variable, and every
        // cycle stays inside one of the two single-block components.
        let w = BlockKernel::one_type(0.0, 3.0, 0.0).unwrap();
        let d = decompose(&w.implication_digraphon().unwrap());
        for trial in 0..200 {
            let s = sample_formula(&w, 60, 3.0, TrialKey::new(31, trial)).unwrap();
            let dg = implication_digraph(&s.formula);
            let report = confinement_check(&dg, &s.types, &d);
            assert!(report.is_clean(), "trial {trial}: {report:?}");
        }
    }

    #[test]
    fn confinement_holds_for_flipped_signed_samples() {
        // The signed model reads the kernel at sign-twisted blocks, so its
        // raw formula need not confine; flipping every variable by its
        // drawn sign lands back in the base model, where it must.
        let w = BlockKernel::one_type(0.0, 3.0, 0.0).unwrap();
        let d = decompose(&w.implication_digraphon().unwrap());
        for trial in 0..100 {
            let s = sample_formula_dagger(&w, 60, 3.0, TrialKey::new(32, trial)).unwrap();
            let flipped = flip_variables(&s.formula, &s.signs).unwrap();
            let dg = implication_digraph(&flipped);
            let report = confinement_check(&dg, &s.types, &d);
            assert!(report.is_clean(), "trial {trial}: {report:?}");
        }
    }

    #[test]
    fn confinement_is_clean_for_the_homogeneous_kernel() {
        let w = BlockKernel::homogeneous(2.0).unwrap();
        let d = decompose(&w.implication_digraphon().unwrap());
        let s = sample_formula(&w, 500, 2.0, TrialKey::new(99, 0)).unwrap();
        let dg = implication_digraph(&s.formula);
        let report = confinement_check(&dg, &s.types, &d);
        assert!(report.nontrivial_sccs > 0);
        assert!(report.is_clean(), "{report:?}");
    }
}
