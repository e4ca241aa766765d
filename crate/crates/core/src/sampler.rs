//! Random formula and digraph samplers.
//!
//! The base model draws a 2-CNF on `n` variables from a kernel `W`: each
//! variable gets an independent type from the type distribution, and each of
//! the four sign combinations of each unordered variable pair becomes a
//! clause `{q v_i, s v_j}` independently with probability
//! `min{1, scale · W((x_i, q), (x_j, s)) / (2n)}`.
//!
//! All randomness is counter-based (see [`crate::rng`]): the uniform driving
//! a candidate clause depends only on the trial key and the candidate's
//! position, never on `scale` or on other candidates. Samples at two
//! densities from the same key are therefore *coupled* — the sparser formula
//! is a subset of the denser one — and experiments can sweep densities along
//! a genuinely monotone path.
//!
//! Variants: the signed model ([`sample_formula_dagger`]) also gives each
//! variable a random sign that twists which kernel entry a clause reads
//! (flipping the signs back recovers the base model in distribution); the
//! densest model ([`sample_densest`]) replaces `W` by the 0/1 indicator of
//! its support; and the digraph model ([`sample_digraph`]) drops clause
//! symmetry and draws each implication arc independently.

use std::fmt;
use std::io::{self, BufRead, Write as IoWrite};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{BlockKernel, Sign, TypeSpace};
use crate::rng::{TrialKey, DOM_ARC, DOM_CLAUSE, DOM_SIGN, DOM_TYPE};

/// A literal: variable index plus sign, packed as `2 · var + sign_bit`
/// (positive literals are even), mirroring the block encoding so that
/// negation is a single bit flip on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: usize, sign: Sign) -> Lit {
        Lit(((var as u32) << 1) | sign.index() as u32)
    }

    pub fn positive(var: usize) -> Lit {
        Lit::new(var, Sign::Plus)
    }

    pub fn negative(var: usize) -> Lit {
        Lit::new(var, Sign::Minus)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn sign(self) -> Sign {
        Sign::from_index((self.0 & 1) as usize)
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    /// Node index in a digraph over all `2n` literals.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Lit {
        Lit(index as u32)
    }

    /// DIMACS form: 1-based, negative for negated literals.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        match self.sign() {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn from_dimacs(value: i64) -> Result<Lit> {
        if value == 0 {
            return Err(Error::parse("literal 0 is reserved as the clause terminator"));
        }
        let var = value.unsigned_abs() as usize - 1;
        let sign = if value > 0 { Sign::Plus } else { Sign::Minus };
        Ok(Lit::new(var, sign))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Sign::Plus => write!(f, "x{}", self.var()),
            Sign::Minus => write!(f, "~x{}", self.var()),
        }
    }
}

/// A 2-clause, kept in sampling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub a: Lit,
    pub b: Lit,
}

impl Clause {
    pub fn new(a: Lit, b: Lit) -> Clause {
        Clause { a, b }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.a, self.b)
    }
}

/// A 2-CNF formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    n_vars: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n_vars: usize, clauses: Vec<Clause>) -> Result<Formula> {
        for c in &clauses {
            if c.a.var() >= n_vars || c.b.var() >= n_vars {
                return Err(Error::param(format!(
                    "clause {c} references a variable outside 0..{n_vars}"
                )));
            }
        }
        Ok(Formula { n_vars, clauses })
    }

    pub fn empty(n_vars: usize) -> Formula {
        Formula {
            n_vars,
            clauses: Vec::new(),
        }
    }

    pub fn push(&mut self, clause: Clause) {
        assert!(
            clause.a.var() < self.n_vars && clause.b.var() < self.n_vars,
            "clause variable out of range"
        );
        self.clauses.push(clause);
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Evaluate under an assignment (`true` = positive literal satisfied).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.n_vars, "assignment length mismatch");
        self.clauses.iter().all(|c| {
            let lit = |l: Lit| assignment[l.var()] == (l.sign() == Sign::Plus);
            lit(c.a) || lit(c.b)
        })
    }
}

/// Types drawn for the variables of one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeAssignment {
    types: Vec<u32>,
}

impl TypeAssignment {
    pub fn new(types: Vec<u32>) -> TypeAssignment {
        TypeAssignment { types }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn type_of(&self, var: usize) -> usize {
        self.types[var] as usize
    }

    pub fn types(&self) -> &[u32] {
        &self.types
    }

    /// Block of a literal: the variable's type tagged with the literal sign.
    pub fn block_of(&self, lit: Lit) -> usize {
        2 * self.type_of(lit.var()) + lit.sign().index()
    }
}

/// Which random model produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Base 2-CNF model.
    TwoSat,
    /// Signed-variable variant.
    Dagger,
    /// 2-CNF over the support indicator of the kernel.
    Densest,
    /// Independent implication arcs on literals.
    Digraph,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Model::TwoSat => "2sat",
            Model::Dagger => "dagger",
            Model::Densest => "densest",
            Model::Digraph => "digraph",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        match s {
            "2sat" => Ok(Model::TwoSat),
            "dagger" => Ok(Model::Dagger),
            "densest" => Ok(Model::Densest),
            "digraph" => Ok(Model::Digraph),
            other => Err(Error::parse(format!(
                "unknown model {other:?} (expected 2sat, dagger, densest, or digraph)"
            ))),
        }
    }
}

/// Where a sample came from — enough to regenerate it exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub trial: u64,
    pub n: usize,
    pub scale: f64,
    pub model: Model,
    pub kernel_digest: String,
}

/// A sampled formula with its variable types.
#[derive(Debug, Clone)]
pub struct FormulaSample {
    pub formula: Formula,
    pub types: TypeAssignment,
    /// Candidates whose target probability exceeded 1 and was clamped; a
    /// nonzero count means the discrete model is saturating and no longer
    /// tracks the kernel's densities at this `n`.
    pub clamped: u64,
}

/// A sample from the signed-variable model.
#[derive(Debug, Clone)]
pub struct DaggerSample {
    pub formula: Formula,
    pub types: TypeAssignment,
    pub signs: Vec<Sign>,
    pub clamped: u64,
}

/// A digraph on literals: arcs are ordered literal pairs over distinct
/// variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    n_vars: usize,
    arcs: Vec<(Lit, Lit)>,
}

impl Digraph {
    pub fn new(n_vars: usize, arcs: Vec<(Lit, Lit)>) -> Result<Digraph> {
        for &(u, v) in &arcs {
            if u.var() >= n_vars || v.var() >= n_vars {
                return Err(Error::param("arc references a variable out of range"));
            }
        }
        Ok(Digraph { n_vars, arcs })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn arcs(&self) -> &[(Lit, Lit)] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }
}

/// A sampled literal digraph.
#[derive(Debug, Clone)]
pub struct DigraphSample {
    pub digraph: Digraph,
    pub types: TypeAssignment,
    pub clamped: u64,
}

/// Draw each variable's type independently from the type distribution.
pub fn sample_types(space: &TypeSpace, n: usize, key: TrialKey) -> TypeAssignment {
    let weights = space.weights();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    let types = (0..n)
        .map(|i| {
            let u = key.uniform(DOM_TYPE, i as u64);
            // Inverse CDF; the final bucket absorbs rounding in the sums.
            cumulative
                .iter()
                .position(|&c| u < c)
                .unwrap_or(weights.len() - 1) as u32
        })
        .collect();
    TypeAssignment { types }
}

fn check_sample_params(n: usize, scale: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("sample size n must be positive"));
    }
    if !scale.is_finite() || scale < 0.0 {
        return Err(Error::param("scale must be finite and nonnegative"));
    }
    Ok(())
}

/// Sign combinations in candidate order: `++, +-, -+, --`.
const SIGN_PAIRS: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

/// Sample a 2-CNF from `scale · W`. Runs over all `4 · C(n,2)` candidate
/// clauses, so the cost is quadratic in `n`.
pub fn sample_formula(
    w: &BlockKernel,
    n: usize,
    scale: f64,
    key: TrialKey,
) -> Result<FormulaSample> {
    w.require_valid()?;
    check_sample_params(n, scale)?;
    let types = sample_types(w.space(), n, key);
    let (formula, clamped) = sample_clauses(w, &types, None, scale, key)?;
    Ok(FormulaSample {
        formula,
        types,
        clamped,
    })
}

/// Sample from the signed-variable model: each variable also gets a uniform
/// sign `σ_i`, and a candidate `{q v_i, s v_j}` reads the kernel at the
/// *twisted* blocks `(x_i, q·σ_i), (x_j, s·σ_j)`. Flipping every variable
/// by its sign afterwards is distributed exactly like the base model.
pub fn sample_formula_dagger(
    w: &BlockKernel,
    n: usize,
    scale: f64,
    key: TrialKey,
) -> Result<DaggerSample> {
    w.require_valid()?;
    check_sample_params(n, scale)?;
    let types = sample_types(w.space(), n, key);
    let signs: Vec<Sign> = (0..n)
        .map(|i| {
            if key.uniform(DOM_SIGN, i as u64) < 0.5 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect();
    let (formula, clamped) = sample_clauses(w, &types, Some(&signs), scale, key)?;
    Ok(DaggerSample {
        formula,
        types,
        signs,
        clamped,
    })
}

/// Sample from the 0/1 support indicator of `w`. Shares the clause
/// randomness with [`sample_formula`], so for kernels with entries in
/// `[0, 1]` the base sample is a subset of the densest sample under the
/// same key.
pub fn sample_densest(
    w: &BlockKernel,
    n: usize,
    scale: f64,
    key: TrialKey,
) -> Result<FormulaSample> {
    w.require_valid()?;
    let space = w.space().clone();
    let indicator = BlockKernel::from_fn(space, |a, b| {
        if w.value(a.flat(), b.flat()) > 0.0 {
            1.0
        } else {
            0.0
        }
    });
    sample_formula(&indicator, n, scale, key)
}

/// Shared clause loop for the base and signed models.
fn sample_clauses(
    w: &BlockKernel,
    types: &TypeAssignment,
    signs: Option<&[Sign]>,
    scale: f64,
    key: TrialKey,
) -> Result<(Formula, u64)> {
    let n = types.len();
    let denom = 2.0 * n as f64;
    let m = w.space().block_count();
    let values = w.values();
    let mut clauses = Vec::new();
    let mut clamped = 0u64;

    let block = |var: usize, q: Sign| -> usize {
        let s = match signs {
            Some(sg) => q.product(sg[var]),
            None => q,
        };
        2 * types.type_of(var) + s.index()
    };

    for i in 0..n {
        for j in (i + 1)..n {
            let pair = (i as u64) * (n as u64) + j as u64;
            for (sign_idx, &(q, s)) in SIGN_PAIRS.iter().enumerate() {
                let value = values[block(i, q) * m + block(j, s)];
                if value == 0.0 {
                    continue;
                }
                let p = scale * value / denom;
                if p > 1.0 {
                    clamped += 1;
                }
                let u = key.uniform2(DOM_CLAUSE, pair, sign_idx as u64);
                if u < p {
                    clauses.push(Clause::new(Lit::new(i, q), Lit::new(j, s)));
                }
            }
        }
    }
    Ok((Formula { n_vars: n, clauses }, clamped))
}

/// Sample the literal digraph model: every ordered pair of literals over
/// distinct variables becomes an arc independently with probability
/// `min{1, scale · Γ(block(u), block(v)) / (2n)}`, where `Γ` is the
/// implication digraphon of `w`. Unlike the clause models, an arc and its
/// mirror are sampled independently.
pub fn sample_digraph(
    w: &BlockKernel,
    n: usize,
    scale: f64,
    key: TrialKey,
) -> Result<DigraphSample> {
    w.require_valid()?;
    check_sample_params(n, scale)?;
    let gamma = w.implication_digraphon()?;
    let types = sample_types(w.space(), n, key);
    let denom = 2.0 * n as f64;
    let m = gamma.block_count();
    let values = gamma.values();
    let mut arcs = Vec::new();
    let mut clamped = 0u64;

    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for su in [Sign::Plus, Sign::Minus] {
                let u_lit = Lit::new(i, su);
                let bu = 2 * types.type_of(i) + su.index();
                for sv in [Sign::Plus, Sign::Minus] {
                    let v_lit = Lit::new(j, sv);
                    let bv = 2 * types.type_of(j) + sv.index();
                    let value = values[bu * m + bv];
                    if value == 0.0 {
                        continue;
                    }
                    let p = scale * value / denom;
                    if p > 1.0 {
                        clamped += 1;
                    }
                    let u = key.uniform2(DOM_ARC, u_lit.index() as u64, v_lit.index() as u64);
                    if u < p {
                        arcs.push((u_lit, v_lit));
                    }
                }
            }
        }
    }
    Ok(DigraphSample {
        digraph: Digraph { n_vars: n, arcs },
        types,
        clamped,
    })
}

/// Flip the sign of every literal of the variables marked `Minus`.
pub fn flip_variables(formula: &Formula, flips: &[Sign]) -> Result<Formula> {
    if flips.len() != formula.n_vars() {
        return Err(Error::param("flip vector length must equal the variable count"));
    }
    let flip = |l: Lit| Lit::new(l.var(), l.sign().product(flips[l.var()]));
    let clauses = formula
        .clauses
        .iter()
        .map(|c| Clause::new(flip(c.a), flip(c.b)))
        .collect();
    Ok(Formula {
        n_vars: formula.n_vars,
        clauses,
    })
}

/// Write DIMACS CNF: `p cnf <vars> <clauses>`, one 2-clause per line.
pub fn write_dimacs<Out: IoWrite>(formula: &Formula, mut out: Out) -> io::Result<()> {
    writeln!(out, "p cnf {} {}", formula.n_vars(), formula.clause_count())?;
    for c in formula.clauses() {
        writeln!(out, "{} {} 0", c.a.to_dimacs(), c.b.to_dimacs())?;
    }
    Ok(())
}

/// Parse DIMACS CNF, insisting on exactly two literals per clause (this is
/// a 2-SAT laboratory; wider or unit clauses are rejected). Comment lines
/// start with `c`; each clause must sit on one line terminated by `0`.
pub fn read_dimacs<In: BufRead>(input: In) -> Result<Formula> {
    let mut n_vars: Option<usize> = None;
    let mut declared = 0usize;
    let mut clauses = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let context = |msg: String| Error::parse(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if n_vars.is_some() {
                return Err(context("duplicate problem line".into()));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(context(format!("malformed problem line {line:?}")));
            }
            n_vars = Some(
                fields[1]
                    .parse()
                    .map_err(|e| context(format!("bad variable count: {e}")))?,
            );
            declared = fields[2]
                .parse()
                .map_err(|e| context(format!("bad clause count: {e}")))?;
            continue;
        }
        let n = n_vars.ok_or_else(|| context("clause before the problem line".into()))?;
        let mut lits = Vec::new();
        let mut terminated = false;
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|e| context(format!("bad literal {tok:?}: {e}")))?;
            if v == 0 {
                terminated = true;
                break;
            }
            lits.push(Lit::from_dimacs(v)?);
        }
        if !terminated {
            return Err(context("clause line not terminated by 0".into()));
        }
        if lits.len() != 2 {
            return Err(context(format!(
                "expected exactly 2 literals per clause, got {}",
                lits.len()
            )));
        }
        for l in &lits {
            if l.var() >= n {
                return Err(context(format!("literal {} out of range", l)));
            }
        }
        clauses.push(Clause::new(lits[0], lits[1]));
    }
    let n = n_vars.ok_or_else(|| Error::parse("missing problem line"))?;
    if clauses.len() != declared {
        return Err(Error::parse(format!(
            "problem line declared {declared} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(Formula { n_vars: n, clauses })
}

/// Write a literal digraph as an edge list: `# vars <n>` header, then one
/// `<from> <to>` pair of DIMACS-style literals per line.
pub fn write_edge_list<Out: IoWrite>(digraph: &Digraph, mut out: Out) -> io::Result<()> {
    writeln!(out, "# vars {}", digraph.n_vars())?;
    for &(u, v) in digraph.arcs() {
        writeln!(out, "{} {}", u.to_dimacs(), v.to_dimacs())?;
    }
    Ok(())
}

/// Parse the edge-list format written by [`write_edge_list`].
pub fn read_edge_list<In: BufRead>(input: In) -> Result<Digraph> {
    let mut n_vars: Option<usize> = None;
    let mut arcs = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let context = |msg: String| Error::parse(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() == 2 && fields[0] == "vars" {
                if n_vars.is_some() {
                    return Err(context("duplicate vars header".into()));
                }
                n_vars = Some(
                    fields[1]
                        .parse()
                        .map_err(|e| context(format!("bad variable count: {e}")))?,
                );
            }
            continue;
        }
        let n = n_vars.ok_or_else(|| context("arc before the vars header".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(context(format!("expected two literals, got {}", fields.len())));
        }
        let parse_lit = |tok: &str| -> Result<Lit> {
            let v: i64 = tok
                .parse()
                .map_err(|e| Error::parse(format!("line {}: bad literal {tok:?}: {e}", lineno + 1)))?;
            Lit::from_dimacs(v)
        };
        let u = parse_lit(fields[0])?;
        let v = parse_lit(fields[1])?;
        if u.var() >= n || v.var() >= n {
            return Err(context("literal out of range".into()));
        }
        arcs.push((u, v));
    }
    let n = n_vars.ok_or_else(|| Error::parse("missing vars header"))?;
    Ok(Digraph { n_vars: n, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn literal_encoding_round_trips() {
        for var in [0usize, 1, 7, 1000] {
            for sign in [Sign::Plus, Sign::Minus] {
                let l = Lit::new(var, sign);
                assert_eq!(l.var(), var);
                assert_eq!(l.sign(), sign);
                assert_eq!(l.negate().negate(), l);
                assert_ne!(l.negate().sign(), sign);
                assert_eq!(Lit::from_index(l.index()), l);
                assert_eq!(Lit::from_dimacs(l.to_dimacs()).unwrap(), l);
            }
        }
        assert!(Lit::from_dimacs(0).is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_key() {
        let w = BlockKernel::homogeneous(1.0).unwrap();
        let k1 = TrialKey::new(7, 0);
        let a = sample_formula(&w, 50, 1.0, k1).unwrap();
        let b = sample_formula(&w, 50, 1.0, k1).unwrap();
        assert_eq!(a.formula, b.formula);
        let c = sample_formula(&w, 50, 1.0, TrialKey::new(7, 1)).unwrap();
        assert_ne!(a.formula, c.formula);
    }

    #[test]
    fn homogeneous_clause_count_matches_expectation() {
        // W ≡ 1, n = 100: 4·C(100,2) candidates at probability 1/200 each,
        // so 99 clauses expected. The per-trial σ is ≈ 9.9; averaging 200
        // trials puts a 3σ window of ± 2.1 around the mean.
        let w = BlockKernel::homogeneous(1.0).unwrap();
        let trials = 200;
        let total: usize = (0..trials)
            .map(|t| {
                sample_formula(&w, 100, 1.0, TrialKey::new(42, t))
                    .unwrap()
                    .formula
                    .clause_count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        assert!((mean - 99.0).abs() < 2.1, "mean = {mean}");
    }

    #[test]
    fn coupling_is_monotone_in_scale() {
        let w = BlockKernel::one_type(2.0, 1.0, 0.5).unwrap();
        for seed in 0..5 {
            let key = TrialKey::new(99, seed);
            let sparse: BTreeSet<Clause> = sample_formula(&w, 80, 0.5, key)
                .unwrap()
                .formula
                .clauses()
                .iter()
                .copied()
                .collect();
            let dense: BTreeSet<Clause> = sample_formula(&w, 80, 2.0, key)
                .unwrap()
                .formula
                .clauses()
                .iter()
                .copied()
                .collect();
            assert!(sparse.is_subset(&dense), "seed {seed}");
        }
    }

    #[test]
    fn type_frequencies_follow_the_weights() {
        let space = TypeSpace::new(
            vec!["light".into(), "heavy".into()],
            vec![0.25, 0.75],
        )
        .unwrap();
        let types = sample_types(&space, 10_000, TrialKey::new(5, 0));
        let heavy = types.types().iter().filter(|&&t| t == 1).count();
        // 3σ ≈ 130 around 7500.
        assert!((heavy as f64 - 7500.0).abs() < 130.0, "heavy = {heavy}");
    }

    #[test]
    fn densest_sample_contains_base_sample_for_subunit_kernels() {
        // Entries ≤ 1, so the indicator dominates pointwise and the shared
        // clause randomness makes containment exact, not just expected.
        let w = BlockKernel::one_type(0.7, 0.3, 0.9).unwrap();
        let key = TrialKey::new(11, 3);
        let base: BTreeSet<Clause> = sample_formula(&w, 120, 1.0, key)
            .unwrap()
            .formula
            .clauses()
            .iter()
            .copied()
            .collect();
        let dense: BTreeSet<Clause> = sample_densest(&w, 120, 1.0, key)
            .unwrap()
            .formula
            .clauses()
            .iter()
            .copied()
            .collect();
        assert!(base.is_subset(&dense));
        assert!(dense.len() > base.len());
    }

    #[test]
    fn digraph_arc_count_matches_expectation() {
        // Γ ≡ 1: 4·n·(n−1) ordered candidates at 1/(2n) each → 2(n−1).
        let w = BlockKernel::homogeneous(1.0).unwrap();
        let trials = 200;
        let total: usize = (0..trials)
            .map(|t| {
                sample_digraph(&w, 100, 1.0, TrialKey::new(21, t))
                    .unwrap()
                    .digraph
                    .arc_count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        // Expectation 198, σ ≈ 14 per trial, 3σ window on the mean ≈ 3.
        assert!((mean - 198.0).abs() < 3.0, "mean = {mean}");
    }

    #[test]
    fn clamping_is_reported_when_the_density_saturates() {
        // scale · W / (2n) = 100 · 1 / 8 > 1 for n = 4.
        let w = BlockKernel::homogeneous(1.0).unwrap();
        let s = sample_formula(&w, 4, 100.0, TrialKey::new(1, 0)).unwrap();
        assert!(s.clamped > 0);
        // Every candidate fires when clamped to probability 1.
        assert_eq!(s.formula.clause_count(), 4 * 6);
    }

    #[test]
    fn flipping_variables_is_an_involution() {
        let w = BlockKernel::homogeneous(2.0).unwrap();
        let s = sample_formula(&w, 30, 1.0, TrialKey::new(8, 0)).unwrap();
        let flips: Vec<Sign> = (0..30)
            .map(|i| if i % 3 == 0 { Sign::Minus } else { Sign::Plus })
            .collect();
        let flipped = flip_variables(&s.formula, &flips).unwrap();
        assert_ne!(flipped, s.formula);
        let back = flip_variables(&flipped, &flips).unwrap();
        assert_eq!(back, s.formula);
        assert!(flip_variables(&s.formula, &flips[..10]).is_err());
    }

    #[test]
    fn dagger_twist_reads_the_twisted_blocks() {
        // With W(+,+) = 4 and all other entries 0 and every variable forced
        // to... signs are random, so instead check the flip identity on the
        // sampled object: flipping by the drawn signs yields clauses whose
        // *twisted* blocks were (+,+), i.e. every flipped clause is a
        // positive-positive clause.
        let w = BlockKernel::one_type(4.0, 0.0, 0.0).unwrap();
        let s = sample_formula_dagger(&w, 60, 1.5, TrialKey::new(13, 2)).unwrap();
        let flipped = flip_variables(&s.formula, &s.signs).unwrap();
        for c in flipped.clauses() {
            assert_eq!(c.a.sign(), Sign::Plus);
            assert_eq!(c.b.sign(), Sign::Plus);
        }
        assert!(s.formula.clause_count() > 0);
    }

    #[test]
    fn dimacs_round_trip() {
        let w = BlockKernel::one_type(1.0, 2.0, 0.5).unwrap();
        let s = sample_formula(&w, 40, 1.0, TrialKey::new(3, 0)).unwrap();
        let mut buf = Vec::new();
        write_dimacs(&s.formula, &mut buf).unwrap();
        let back = read_dimacs(buf.as_slice()).unwrap();
        assert_eq!(back, s.formula);
    }

    #[test]
    fn dimacs_parser_rejects_malformed_input() {
        assert!(read_dimacs("p cnf 2 1\n1 2 3 0\n".as_bytes()).is_err()); // 3-clause
        assert!(read_dimacs("p cnf 2 1\n1 0\n".as_bytes()).is_err()); // unit clause
        assert!(read_dimacs("1 2 0\n".as_bytes()).is_err()); // no header
        assert!(read_dimacs("p cnf 2 2\n1 2 0\n".as_bytes()).is_err()); // count mismatch
        assert!(read_dimacs("p cnf 2 1\n1 3 0\n".as_bytes()).is_err()); // var range
        assert!(read_dimacs("p cnf 2 1\n1 2\n".as_bytes()).is_err()); // missing 0
        assert!(read_dimacs("c only comments\n".as_bytes()).is_err()); // no header at all
    }

    #[test]
    fn edge_list_round_trip() {
        let w = BlockKernel::homogeneous(1.5).unwrap();
        let s = sample_digraph(&w, 30, 1.0, TrialKey::new(17, 0)).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&s.digraph, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back, s.digraph);
    }

    #[test]
    fn zero_scale_and_zero_n_edge_cases() {
        let w = BlockKernel::homogeneous(1.0).unwrap();
        let empty = sample_formula(&w, 10, 0.0, TrialKey::new(0, 0)).unwrap();
        assert_eq!(empty.formula.clause_count(), 0);
        assert!(sample_formula(&w, 0, 1.0, TrialKey::new(0, 0)).is_err());
        assert!(sample_formula(&w, 10, f64::NAN, TrialKey::new(0, 0)).is_err());
    }

    #[test]
    fn formula_eval_checks_all_clauses() {
        // (x0 | ~x1) ∧ (~x0 | x1): satisfied exactly when x0 == x1.
        let f = Formula::new(
            2,
            vec![
                Clause::new(Lit::positive(0), Lit::negative(1)),
                Clause::new(Lit::negative(0), Lit::positive(1)),
            ],
        )
        .unwrap();
        assert!(f.eval(&[true, true]));
        assert!(f.eval(&[false, false]));
        assert!(!f.eval(&[true, false]));
        assert!(!f.eval(&[false, true]));
    }
}
