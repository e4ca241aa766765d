//! Witness substructures of implication digraphs: bicycles, snakes, and
//! serpents.
//!
//! A *(k,a,b)-bicycle* is a path `u₁ → … → u_k` on pairwise distinct
//! variables closed off by the arcs `¬u_a → u₁` and `u_k → ¬u_b`. An
//! *(a,b)-snake* is the clause set chaining a center literal `f` to its own
//! negation in both directions; any formula containing one is
//! unsatisfiable. A *serpent* is a snake rewritten as a rooted implication
//! cycle — every snake admits four of them.

use std::collections::HashSet;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::sampler::{Clause, Digraph, Formula, Lit};
use crate::scc::{tarjan, Csr};

/// Node-expansion budget for the bounded searches (`detect_snake` and the
/// `find_bicycle` fallback). Exhausting it means "not found", never
/// "absent".
pub const SEARCH_BUDGET: u64 = 1_000_000;

/// A clause as an unordered literal pair, for set comparisons.
fn canonical(x: Lit, y: Lit) -> Clause {
    if x <= y {
        Clause::new(x, y)
    } else {
        Clause::new(y, x)
    }
}

/// The clause a single implication arc `x → y` encodes.
fn arc_clause(x: Lit, y: Lit) -> Clause {
    canonical(x.negate(), y)
}

fn arc_set(dg: &Digraph) -> HashSet<(Lit, Lit)> {
    dg.arcs().iter().copied().collect()
}

fn adjacency(dg: &Digraph) -> Vec<Vec<Lit>> {
    let mut adj = vec![Vec::new(); 2 * dg.n_vars()];
    for &(u, v) in dg.arcs() {
        adj[u.index()].push(v);
    }
    adj
}

// ---------------------------------------------------------------------------
// Bicycles
// ---------------------------------------------------------------------------

/// A (k,a,b)-bicycle: the basis path plus its two closing arcs. Indices
/// `a`, `b` are 1-based positions into the basis, with `2 ≤ a ≤ k` and
/// `1 ≤ b ≤ k−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicycle {
    pub basis: Vec<Lit>,
    pub a: usize,
    pub b: usize,
}

impl Bicycle {
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    /// Structural validity against a digraph: index bounds, pairwise
    /// distinct basis variables, and presence of every arc.
    pub fn is_valid_in(&self, dg: &Digraph) -> bool {
        let k = self.k();
        if k < 2 || self.a < 2 || self.a > k || self.b < 1 || self.b > k - 1 {
            return false;
        }
        let mut vars = HashSet::new();
        if !self.basis.iter().all(|u| vars.insert(u.var())) {
            return false;
        }
        let arcs = arc_set(dg);
        for w in self.basis.windows(2) {
            if !arcs.contains(&(w[0], w[1])) {
                return false;
            }
        }
        arcs.contains(&(self.basis[self.a - 1].negate(), self.basis[0]))
            && arcs.contains(&(self.basis[k - 1], self.basis[self.b - 1].negate()))
    }
}

/// Locate a bicycle inside a digraph with a contradictory cycle.
///
/// The primary route runs the constructive argument: inside the first
/// contradictory component (by smallest literal index), pick the literal
/// `w` whose distance to `¬w` is minimal, join the two shortest paths
/// `w ⇝ ¬w ⇝ w` into a contradictory cycle, and grow the maximum
/// distinct-variable window of that cycle until its end arcs close the
/// basis. On mirror-closed digraphs without same-variable arcs (every
/// implication digraph of a distinct-variable formula) this cannot fail;
/// for degenerate inputs a budgeted exhaustive search takes over. Returns
/// `None` when there is no contradictory cycle, or — fallback only — when
/// nothing was found within the budget.
pub fn find_bicycle(dg: &Digraph) -> Option<Bicycle> {
    let slot = contradictory_variable(dg)?;
    if let Some(bicycle) = construct_bicycle(dg, slot) {
        if bicycle.is_valid_in(dg) {
            return Some(bicycle);
        }
    }
    fallback_bicycle(dg, SEARCH_BUDGET)
}

/// Some variable whose two literals share a strongly connected component,
/// chosen from the first contradictory component by literal index.
fn contradictory_variable(dg: &Digraph) -> Option<usize> {
    let n = dg.n_vars();
    if n == 0 || dg.arcs().is_empty() {
        return None;
    }
    let csr = lit_csr(dg);
    let scc = tarjan(&csr);
    (0..n).find(|&v| scc.comp[2 * v] == scc.comp[2 * v + 1])
}

fn lit_csr(dg: &Digraph) -> Csr {
    let pairs: Vec<(u32, u32)> = dg
        .arcs()
        .iter()
        .map(|&(u, v)| (u.index() as u32, v.index() as u32))
        .collect();
    Csr::from_arcs(2 * dg.n_vars(), &pairs)
}

/// Shortest path by BFS over the whole digraph (paths between literals of
/// one strongly connected component never leave it).
fn bfs_path(adj: &[Vec<Lit>], from: Lit, to: Lit) -> Option<Vec<Lit>> {
    let mut pred: Vec<Option<Lit>> = vec![None; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    pred[from.index()] = Some(from);
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &w in &adj[u.index()] {
            if pred[w.index()].is_none() {
                pred[w.index()] = Some(u);
                queue.push_back(w);
            }
        }
    }
    if from == to || pred[to.index()].is_none() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[cur.index()].unwrap();
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// The constructive route. `seed_var` is a variable contradictory in its
/// component; among the contradictory variables of that component the
/// actual pivot `w` minimizes the distance to its negation.
fn construct_bicycle(dg: &Digraph, seed_var: usize) -> Option<Bicycle> {
    let adj = adjacency(dg);
    let csr = lit_csr(dg);
    let scc = tarjan(&csr);
    let comp = scc.comp[2 * seed_var];

    // Pivot selection: shortest contradictory distance, ties to the
    // smallest literal index.
    let mut pivot: Option<(usize, Lit, Vec<Lit>)> = None;
    for node in 0..2 * dg.n_vars() {
        if scc.comp[node] != comp {
            continue;
        }
        let w = Lit::from_index(node);
        if scc.comp[w.negate().index()] != comp {
            continue;
        }
        if let Some(path) = bfs_path(&adj, w, w.negate()) {
            let better = match &pivot {
                None => true,
                Some((len, _, _)) => path.len() - 1 < *len,
            };
            if better {
                pivot = Some((path.len() - 1, w, path));
            }
        }
    }
    let (m, w, p) = pivot?;
    let r = bfs_path(&adj, w.negate(), w)?;
    let t = r.len() - 1;
    if m < 2 || t < 2 {
        // A length-1 leg means a same-variable arc; the window argument
        // needs room on both sides.
        return None;
    }

    // Window over the cycle p₀ … p_{m−1} (the p-part; p_m = ¬p₀ is the
    // tail target), grown leftwards through the return path
    // r = s₀ … s_t (s₀ = ¬w, s_t = w = p₀) while variables stay fresh.
    let p_part = &p[..m];
    let mut basis: Vec<Lit> = p_part.to_vec();
    let mut prefix: Vec<Lit> = Vec::new(); // prepended r-elements, reversed at the end
    let mut vars: HashSet<usize> = basis.iter().map(|l| l.var()).collect();

    let assemble = |prefix: &[Lit], p_part: &[Lit]| -> Vec<Lit> {
        let mut full: Vec<Lit> = prefix.iter().rev().copied().collect();
        full.extend_from_slice(p_part);
        full
    };

    let mut e = t; // next examined element is s_{e−1}
    loop {
        if e == 0 {
            return None; // cannot happen: s₀ = ¬p₀ always collides
        }
        let z = r[e - 1];
        if !vars.contains(&z.var()) {
            vars.insert(z.var());
            prefix.push(z);
            e -= 1;
            continue;
        }
        let full = assemble(&prefix, p_part);
        let pos = full
            .iter()
            .position(|u| u.var() == z.var())
            .expect("collision variable is in the basis");
        let zeta = full[pos];
        let k = full.len();
        if z == zeta.negate() {
            // Head arc ¬u_a → u₁ found directly.
            let a = pos + 1;
            if a < 2 {
                return None;
            }
            // Tail arc u_k → ¬u_b: u_k = p_{m−1} → p_m = ¬p₀, and p₀ sits
            // right after the prepended prefix.
            let b = prefix.len() + 1;
            if b > k - 1 {
                return None;
            }
            basis = full;
            return Some(Bicycle { basis, a, b });
        }
        // Positive collision: z equals a p-part element p_c (collisions
        // with the r-part or with p₀ would contradict path shortestness).
        let c = pos.checked_sub(prefix.len())?;
        if c == 0 || c >= m {
            return None;
        }
        // Mirror the whole configuration: the reversed, negated cycle walks
        // p₁ … p_{m−1} → ¬p₀ → ¬s_{t−1} → … → ¬s_e, closed by
        // ¬u_m = p₀ → p₁ at the head and ¬s_e → ¬p_c at the tail.
        let mut mirrored: Vec<Lit> = p[1..m].to_vec();
        mirrored.push(p[0].negate());
        mirrored.extend(r[e..t].iter().rev().map(|l| l.negate()));
        return Some(Bicycle {
            basis: mirrored,
            a: m,
            b: c,
        });
    }
}

/// Budgeted exhaustive search: depth-first over distinct-variable paths,
/// testing the two closing arcs at every length ≥ 2.
fn fallback_bicycle(dg: &Digraph, budget: u64) -> Option<Bicycle> {
    let adj = adjacency(dg);
    let arcs = arc_set(dg);
    let mut budget = budget;
    let mut path: Vec<Lit> = Vec::new();
    let mut vars: HashSet<usize> = HashSet::new();

    fn extend(
        adj: &[Vec<Lit>],
        arcs: &HashSet<(Lit, Lit)>,
        path: &mut Vec<Lit>,
        vars: &mut HashSet<usize>,
        budget: &mut u64,
    ) -> Option<Bicycle> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let k = path.len();
        if k >= 2 {
            let head = (2..=k).find(|&a| arcs.contains(&(path[a - 1].negate(), path[0])));
            let tail = (1..k).find(|&b| arcs.contains(&(path[k - 1], path[b - 1].negate())));
            if let (Some(a), Some(b)) = (head, tail) {
                return Some(Bicycle {
                    basis: path.clone(),
                    a,
                    b,
                });
            }
        }
        let last = *path.last().unwrap();
        for &next in &adj[last.index()] {
            if vars.contains(&next.var()) {
                continue;
            }
            path.push(next);
            vars.insert(next.var());
            let found = extend(adj, arcs, path, vars, budget);
            vars.remove(&next.var());
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    for start in 0..2 * dg.n_vars() {
        let lit = Lit::from_index(start);
        path.push(lit);
        vars.insert(lit.var());
        let found = extend(&adj, &arcs, &mut path, &mut vars, &mut budget);
        vars.clear();
        path.clear();
        if found.is_some() {
            return found.filter(|b| b.is_valid_in(dg));
        }
        if budget == 0 {
            return None;
        }
    }
    None
}

/// Exact count of (k,a,b)-bicycles by exhaustive enumeration. Kept to
/// small inputs on purpose: the walk space is `2^k (n)_k`.
pub fn count_bicycles(dg: &Digraph, k: usize, a: usize, b: usize) -> Result<u64> {
    if k < 2 || a < 2 || a > k || b < 1 || b > k - 1 {
        return Err(Error::param(format!(
            "bicycle indices out of range: k={k}, a={a}, b={b}"
        )));
    }
    if k > 8 || dg.n_vars() > 12 {
        return Err(Error::param(
            "exhaustive bicycle counting is capped at k ≤ 8, n ≤ 12",
        ));
    }
    let adj = adjacency(dg);
    let arcs = arc_set(dg);
    let mut count = 0u64;
    let mut path: Vec<Lit> = Vec::new();
    let mut vars: HashSet<usize> = HashSet::new();

    fn walk(
        adj: &[Vec<Lit>],
        arcs: &HashSet<(Lit, Lit)>,
        k: usize,
        a: usize,
        b: usize,
        path: &mut Vec<Lit>,
        vars: &mut HashSet<usize>,
        count: &mut u64,
    ) {
        if path.len() == k {
            if arcs.contains(&(path[a - 1].negate(), path[0]))
                && arcs.contains(&(path[k - 1], path[b - 1].negate()))
            {
                *count += 1;
            }
            return;
        }
        let last = *path.last().unwrap();
        for &next in &adj[last.index()] {
            if vars.contains(&next.var()) {
                continue;
            }
            path.push(next);
            vars.insert(next.var());
            walk(adj, arcs, k, a, b, path, vars, count);
            vars.remove(&next.var());
            path.pop();
        }
    }

    for start in 0..2 * dg.n_vars() {
        let lit = Lit::from_index(start);
        path.push(lit);
        vars.insert(lit.var());
        walk(&adj, &arcs, k, a, b, &mut path, &mut vars, &mut count);
        vars.clear();
        path.clear();
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Snakes and serpents
// ---------------------------------------------------------------------------

/// An (a,b)-snake: center literal `f` chained to `¬f` through `left`
/// (length a−1) and back through `right` (length b−1), all on distinct
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snake {
    center: Lit,
    left: Vec<Lit>,
    right: Vec<Lit>,
}

impl Snake {
    pub fn new(center: Lit, left: Vec<Lit>, right: Vec<Lit>) -> Result<Snake> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::param("snake chains need a, b ≥ 2"));
        }
        let mut vars = HashSet::new();
        vars.insert(center.var());
        for l in left.iter().chain(right.iter()) {
            if !vars.insert(l.var()) {
                return Err(Error::param("snake variables must be pairwise distinct"));
            }
        }
        Ok(Snake {
            center,
            left,
            right,
        })
    }

    pub fn center(&self) -> Lit {
        self.center
    }

    pub fn a(&self) -> usize {
        self.left.len() + 1
    }

    pub fn b(&self) -> usize {
        self.right.len() + 1
    }

    /// The defining clause set: the implication chain `f → l₁ → … → ¬f`
    /// contributes `(¬f ∨ l₁), (¬l₁ ∨ l₂), …, (¬l_{a−1} ∨ ¬f)`, and the
    /// return chain `¬f → l_a → … → f` contributes the mirrored group.
    /// Clauses are canonicalized as unordered pairs.
    pub fn clauses(&self) -> Vec<Clause> {
        let f = self.center;
        let mut out = Vec::with_capacity(self.a() + self.b());
        let chain = |from: Lit, via: &[Lit], to: Lit, out: &mut Vec<Clause>| {
            let mut prev = from;
            for &l in via {
                out.push(arc_clause(prev, l));
                prev = l;
            }
            out.push(arc_clause(prev, to));
        };
        chain(f, &self.left, f.negate(), &mut out);
        chain(f.negate(), &self.right, f, &mut out);
        out
    }

    /// Distinct literals appearing in the clause set; always `2(a+b) − 2`.
    pub fn literal_count(&self) -> usize {
        let set: HashSet<Lit> = self
            .clauses()
            .iter()
            .flat_map(|c| [c.a, c.b])
            .collect();
        set.len()
    }

    /// The snake as a formula over `n_vars` variables.
    pub fn to_formula(&self, n_vars: usize) -> Result<Formula> {
        Formula::new(n_vars, self.clauses())
    }
}

/// A snake rewritten as a rooted implication cycle: the node sequence
/// starting at the root, with the closing arc back to the root implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Serpent {
    root: Lit,
    cycle: Vec<Lit>,
}

impl Serpent {
    pub fn new(root: Lit, cycle: Vec<Lit>) -> Result<Serpent> {
        if cycle.first() != Some(&root) {
            return Err(Error::param("serpent cycle must start at its root"));
        }
        let set: HashSet<Lit> = cycle.iter().copied().collect();
        if set.len() != cycle.len() {
            return Err(Error::param("serpent cycle must not repeat literals"));
        }
        let pairs = cycle
            .iter()
            .filter(|l| l.sign() == crate::kernel::Sign::Plus && set.contains(&l.negate()))
            .count();
        if pairs != 1 || !set.contains(&root.negate()) {
            return Err(Error::param(
                "serpent cycle must contain exactly the complementary pair at its root",
            ));
        }
        Ok(Serpent { root, cycle })
    }

    pub fn root(&self) -> Lit {
        self.root
    }

    pub fn cycle(&self) -> &[Lit] {
        &self.cycle
    }

    /// The clause set encoded by the cycle's arcs (closing arc included).
    pub fn clauses(&self) -> Vec<Clause> {
        let mut out = Vec::with_capacity(self.cycle.len());
        for w in self.cycle.windows(2) {
            out.push(arc_clause(w[0], w[1]));
        }
        out.push(arc_clause(*self.cycle.last().unwrap(), self.cycle[0]));
        out
    }
}

/// The serpents of one snake, plus the symmetry caveat for `a = b`.
#[derive(Debug, Clone)]
pub struct SerpentsReport {
    /// Deduplicated rooted cycles; four for every valid snake.
    pub serpents: Vec<Serpent>,
    /// When the two chain lengths coincide the snake has further
    /// representations rooted at `¬f` that are not serpents of this list;
    /// counts derived from serpents alone must account for that.
    pub symmetric_case: bool,
}

/// Rewrite a snake as its rooted implication cycles: each chain can run
/// forward or mirrored (negated and reversed — the same clauses read
/// through the contrapositive arcs), giving four rooted cycles.
pub fn serpents_of(snake: &Snake) -> SerpentsReport {
    let f = snake.center;
    let mirrored =
        |chain: &[Lit]| chain.iter().rev().map(|l| l.negate()).collect::<Vec<Lit>>();

    let left_variants = [snake.left.clone(), mirrored(&snake.left)];
    let right_variants = [snake.right.clone(), mirrored(&snake.right)];
    let mut serpents = Vec::new();
    for left in &left_variants {
        for right in &right_variants {
            let mut cycle = Vec::with_capacity(2 * (left.len() + 1));
            cycle.push(f);
            cycle.extend_from_slice(left);
            cycle.push(f.negate());
            cycle.extend_from_slice(right);
            let serpent =
                Serpent::new(f, cycle).expect("snake chains satisfy the serpent invariants");
            if !serpents.contains(&serpent) {
                serpents.push(serpent);
            }
        }
    }
    SerpentsReport {
        serpents,
        symmetric_case: snake.a() == snake.b(),
    }
}

/// Exact size of the snake universe: the number of distinct (a,b)-snake
/// clause sets on `n` variables. Each snake is generated by
/// `2^{a+b−1} (n)_{a+b−1}` literal tuples; the four serpent rewritings
/// collapse tuples 4-to-1, and for `a = b` the root can also move to `¬f`,
/// collapsing 8-to-1.
pub fn count_snake_universe(n: u64, a: u64, b: u64) -> Result<BigUint> {
    if a < 2 || b < 2 {
        return Err(Error::param("snakes need a, b ≥ 2"));
    }
    let span = a + b - 1; // distinct variables used
    if n < span {
        return Err(Error::param(format!(
            "need at least {span} variables for an ({a},{b})-snake, have {n}"
        )));
    }
    let log2_reps = if a == b { 3 } else { 2 };
    let mut count = BigUint::from(1u32) << (a + b - 1 - log2_reps) as usize;
    for i in 0..span {
        count *= BigUint::from(n - i);
    }
    Ok(count)
}

/// Outcome of a budgeted snake search.
#[derive(Debug, Clone)]
pub struct SnakeSearch {
    pub snake: Option<Snake>,
    /// The budget ran out before the space was exhausted; a `None` snake
    /// then means "not found", not "absent".
    pub exhausted: bool,
}

/// Search a formula for a snake subformula: centers are tried in variable
/// order, and for each center the two implication chains are grown
/// depth-first over the formula's arcs with globally distinct variables.
pub fn detect_snake(formula: &Formula) -> Option<Snake> {
    detect_snake_with_budget(formula, SEARCH_BUDGET).snake
}

pub fn detect_snake_with_budget(formula: &Formula, budget: u64) -> SnakeSearch {
    let n = formula.n_vars();
    let mut adj = vec![Vec::new(); 2 * n];
    for c in formula.clauses() {
        adj[c.a.negate().index()].push(c.b);
        adj[c.b.negate().index()].push(c.a);
    }
    let mut budget = budget;

    for var in 0..n {
        for center in [Lit::positive(var), Lit::negative(var)] {
            let mut vars: HashSet<usize> = HashSet::new();
            vars.insert(var);
            let mut left: Vec<Lit> = Vec::new();
            if let Some(snake) =
                grow_chain(&adj, center, center.negate(), &mut left, &mut vars, &mut budget)
            {
                return SnakeSearch {
                    snake: Some(snake),
                    exhausted: false,
                };
            }
            if budget == 0 {
                return SnakeSearch {
                    snake: None,
                    exhausted: true,
                };
            }
        }
    }
    SnakeSearch {
        snake: None,
        exhausted: false,
    }
}

/// Depth-first growth of the first chain; each time it closes at `¬f`, the
/// second chain is grown under the same variable exclusions.
fn grow_chain(
    adj: &[Vec<Lit>],
    center: Lit,
    target: Lit,
    left: &mut Vec<Lit>,
    vars: &mut HashSet<usize>,
    budget: &mut u64,
) -> Option<Snake> {
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let tip = *left.last().unwrap_or(&center);
    for &next in &adj[tip.index()] {
        if next == target && !left.is_empty() {
            // Chain one closed with a ≥ 2; grow the return chain.
            let mut right: Vec<Lit> = Vec::new();
            if let Some(snake) =
                grow_return(adj, center, &left[..], &mut right, vars, budget)
            {
                return Some(snake);
            }
            if *budget == 0 {
                return None;
            }
            continue;
        }
        if vars.contains(&next.var()) {
            continue;
        }
        left.push(next);
        vars.insert(next.var());
        let found = grow_chain(adj, center, target, left, vars, budget);
        vars.remove(&next.var());
        left.pop();
        if found.is_some() || *budget == 0 {
            return found;
        }
    }
    None
}

fn grow_return(
    adj: &[Vec<Lit>],
    center: Lit,
    left: &[Lit],
    right: &mut Vec<Lit>,
    vars: &mut HashSet<usize>,
    budget: &mut u64,
) -> Option<Snake> {
    if *budget == 0 {
        return None;
    }
    *budget -= 1;
    let tip = *right.last().unwrap_or(&center.negate());
    for &next in &adj[tip.index()] {
        if next == center && !right.is_empty() {
            let snake = Snake::new(center, left.to_vec(), right.clone())
                .expect("search maintains snake invariants");
            return Some(snake);
        }
        if vars.contains(&next.var()) {
            continue;
        }
        right.push(next);
        vars.insert(next.var());
        let found = grow_return(adj, center, left, right, vars, budget);
        vars.remove(&next.var());
        right.pop();
        if found.is_some() || *budget == 0 {
            return found;
        }
    }
    None
}
