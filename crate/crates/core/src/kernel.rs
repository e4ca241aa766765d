//! Step kernels over a typed ground space.
//!
//! The inhomogeneous random 2-SAT model assigns every variable a type drawn
//! from a finite probability space (types `0..t` with weights `γ_i`), and
//! inserts each potential clause `{q v_i, s v_j}` independently with
//! probability `min{1, W((x_i,q),(x_j,s)) / (2n)}`. The connection kernel `W`
//! is a symmetric nonnegative function on *signed blocks* — pairs
//! `(type, sign)` — so here it is simply a `2t × 2t` matrix. The natural
//! measure on signed blocks splits each type weight evenly between signs:
//! `κ(type, ±) = γ_type / 2`.
//!
//! Blocks are laid out flat as `(type 0, +), (type 0, −), (type 1, +), …`,
//! i.e. `flat = 2·type + sign`, which makes literal negation on blocks a
//! single XOR.
//!
//! Directed objects (implication structure, restrictions, indicators) drop
//! the symmetry requirement and are carried by [`BlockDigraphon`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarity of a literal or of a signed block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `Plus → 0`, `Minus → 1`; the low bit of a flat block index.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Sign {
        if i & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Group product: `−·− = +`.
    #[inline]
    pub fn product(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn glyph(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(Error::parse(format!(
                "sign must be \"+\" or \"-\", got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.glyph())
    }
}

/// One signed block of the ground space: a type together with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedBlock {
    pub type_index: usize,
    pub sign: Sign,
}

impl SignedBlock {
    pub fn new(type_index: usize, sign: Sign) -> Self {
        SignedBlock { type_index, sign }
    }

    /// Flat index in block order `(0,+), (0,−), (1,+), (1,−), …`.
    #[inline]
    pub fn flat(self) -> usize {
        2 * self.type_index + self.sign.index()
    }

    #[inline]
    pub fn from_flat(flat: usize) -> Self {
        SignedBlock {
            type_index: flat / 2,
            sign: Sign::from_index(flat),
        }
    }

    /// The block holding the negated literals of this block.
    #[inline]
    pub fn negate(self) -> Self {
        SignedBlock {
            type_index: self.type_index,
            sign: self.sign.flip(),
        }
    }
}

/// Negation on flat block indices: flip the sign bit.
#[inline]
pub fn negate_flat(flat: usize) -> usize {
    flat ^ 1
}

/// The type side of the ground space: labels and weights `γ_i`.
///
/// Weights must be strictly positive and sum to 1 (within 1e-12); zero-weight
/// types are rejected outright rather than carried around as null sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

/// Absolute tolerance on `|Σ γ_i − 1|`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl TypeSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::param("type space must have at least one type"));
        }
        if labels.len() != weights.len() {
            return Err(Error::param(format!(
                "{} labels but {} weights",
                labels.len(),
                weights.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::param(format!("duplicate type label {label:?}")));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::param(format!(
                    "type {:?} has weight {w}; weights must be finite and > 0",
                    labels[i]
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::param(format!(
                "type weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(TypeSpace { labels, weights })
    }

    /// `t` equally weighted types labelled `t0, t1, …`.
    pub fn uniform(t: usize) -> Result<Self> {
        let labels = (0..t).map(|i| format!("t{i}")).collect();
        let weights = vec![1.0 / t as f64; t];
        TypeSpace::new(labels, weights)
    }

    pub fn type_count(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        2 * self.labels.len()
    }

    pub fn weight(&self, type_index: usize) -> f64 {
        self.weights[type_index]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Block measure `κ(block) = γ_type / 2`.
    #[inline]
    pub fn block_measure(&self, flat: usize) -> f64 {
        self.weights[flat / 2] / 2.0
    }
}

/// A set of signed blocks (a measurable union of blocks of the ground space).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSet {
    members: BTreeSet<usize>,
    block_count: usize,
}

impl BlockSet {
    pub fn new(members: impl IntoIterator<Item = usize>, block_count: usize) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&max) = members.iter().next_back() {
            if max >= block_count {
                return Err(Error::param(format!(
                    "block index {max} out of range for {block_count} blocks"
                )));
            }
        }
        Ok(BlockSet {
            members,
            block_count,
        })
    }

    pub fn empty(block_count: usize) -> Self {
        BlockSet {
            members: BTreeSet::new(),
            block_count,
        }
    }

    pub fn full(block_count: usize) -> Self {
        BlockSet {
            members: (0..block_count).collect(),
            block_count,
        }
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    #[inline]
    pub fn contains(&self, flat: usize) -> bool {
        self.members.contains(&flat)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn measure(&self, space: &TypeSpace) -> f64 {
        self.iter().map(|b| space.block_measure(b)).sum()
    }

    /// Image under literal negation (sign bit flipped on every member).
    pub fn negate(&self) -> BlockSet {
        BlockSet {
            members: self.members.iter().map(|&b| negate_flat(b)).collect(),
            block_count: self.block_count,
        }
    }

    pub fn union(&self, other: &BlockSet) -> BlockSet {
        debug_assert_eq!(self.block_count, other.block_count);
        BlockSet {
            members: self.members.union(&other.members).copied().collect(),
            block_count: self.block_count,
        }
    }
}

impl fmt::Display for BlockSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let sb = SignedBlock::from_flat(b);
            write!(f, "({},{})", sb.type_index, sb.sign)?;
        }
        write!(f, "}}")
    }
}

/// One defect found by kernel validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteEntry { row: usize, col: usize, value: f64 },
    NegativeEntry { row: usize, col: usize, value: f64 },
    /// `W[row][col] != W[col][row]` (exact comparison; symmetry is structural,
    /// not approximate).
    AsymmetricPair {
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFiniteEntry { row, col, value } => {
                write!(f, "entry [{row}][{col}] is not finite ({value})")
            }
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "entry [{row}][{col}] is negative ({value})")
            }
            Violation::AsymmetricPair {
                row,
                col,
                value,
                mirror,
            } => write!(
                f,
                "asymmetric pair: [{row}][{col}] = {value} but [{col}][{row}] = {mirror}"
            ),
        }
    }
}

/// Result of validating a kernel: empty means valid.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Symmetric nonnegative connection kernel on signed blocks (`2t × 2t`,
/// row-major). Symmetry means `W[a][b] == W[b][a]` exactly: an entry states
/// the connection weight of an *unordered* pair of blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKernel {
    space: TypeSpace,
    values: Vec<f64>,
}

impl BlockKernel {
    /// Wrap a row-major `2t × 2t` matrix. Only the shape is checked here;
    /// semantic checks live in [`BlockKernel::validate`] so that a broken
    /// kernel can still be constructed, inspected, and reported on.
    pub fn new(space: TypeSpace, values: Vec<f64>) -> Result<Self> {
        let m = space.block_count();
        if values.len() != m * m {
            return Err(Error::param(format!(
                "kernel matrix has {} entries, expected {m}x{m}",
                values.len()
            )));
        }
        Ok(BlockKernel { space, values })
    }

    /// Build entry-by-entry from a function of two blocks.
    pub fn from_fn(space: TypeSpace, f: impl Fn(SignedBlock, SignedBlock) -> f64) -> Self {
        let m = space.block_count();
        let mut values = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                values[a * m + b] = f(SignedBlock::from_flat(a), SignedBlock::from_flat(b));
            }
        }
        BlockKernel { space, values }
    }

    /// The homogeneous kernel `W ≡ c` on a single type.
    pub fn homogeneous(c: f64) -> Result<Self> {
        BlockKernel::one_type(c, c, c)
    }

    /// Single-type kernel with `W(+,+) = a`, `W(+,−) = W(−,+) = b`,
    /// `W(−,−) = c`.
    pub fn one_type(a: f64, b: f64, c: f64) -> Result<Self> {
        let space = TypeSpace::uniform(1)?;
        let kernel = BlockKernel::new(space, vec![a, b, b, c])?;
        kernel.require_valid()?;
        Ok(kernel)
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn block_count(&self) -> usize {
        self.space.block_count()
    }

    #[inline]
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.space.block_count() + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Check entries (finite, nonnegative) and exact symmetry. Every
    /// violation is reported, not just the first.
    pub fn validate(&self) -> Diagnostics {
        let m = self.space.block_count();
        let mut violations = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let v = self.value(a, b);
                if !v.is_finite() {
                    violations.push(Violation::NonFiniteEntry {
                        row: a,
                        col: b,
                        value: v,
                    });
                } else if v < 0.0 {
                    violations.push(Violation::NegativeEntry {
                        row: a,
                        col: b,
                        value: v,
                    });
                }
                if a < b {
                    let mirror = self.value(b, a);
                    // Bitwise-exact symmetry; NaN pairs are already reported
                    // as non-finite above.
                    if v != mirror && !(v.is_nan() && mirror.is_nan()) {
                        violations.push(Violation::AsymmetricPair {
                            row: a,
                            col: b,
                            value: v,
                            mirror,
                        });
                    }
                }
            }
        }
        Diagnostics { violations }
    }

    pub fn require_valid(&self) -> Result<()> {
        let d = self.validate();
        if d.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidKernel(d.to_string()))
        }
    }

    /// The implication digraphon `Γ(x, y) = W(¬x, y)`: mass that forces
    /// literals in block `y` given literals in block `x`. Satisfies the
    /// mirror identity `Γ(x, y) = Γ(¬y, ¬x)` exactly, because both sides read
    /// the same stored entry of the symmetric `W`.
    pub fn implication_digraphon(&self) -> Result<BlockDigraphon> {
        self.require_valid()?;
        let m = self.space.block_count();
        let mut values = vec![0.0; m * m];
        for x in 0..m {
            for y in 0..m {
                values[x * m + y] = self.value(negate_flat(x), y);
            }
        }
        BlockDigraphon::new(self.space.clone(), values)
    }

    /// Mean connection weight `∫∫ W dκ dκ = Σ_{a,b} κ(a) κ(b) W[a][b]`.
    pub fn l1_norm(&self) -> f64 {
        let m = self.space.block_count();
        let mut total = 0.0;
        for a in 0..m {
            let ka = self.space.block_measure(a);
            for b in 0..m {
                total += ka * self.space.block_measure(b) * self.value(a, b);
            }
        }
        total
    }

    /// Multiply every entry by `c ≥ 0`.
    pub fn scale(&self, c: f64) -> Result<BlockKernel> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::param(format!(
                "scale factor must be finite and >= 0, got {c}"
            )));
        }
        Ok(BlockKernel {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }

    /// Short content hash (FNV-1a over weights, labels, and entries), used to
    /// stamp sampled formulas with the kernel they came from.
    pub fn digest(&self) -> String {
        let mut h = Fnv::new();
        h.words(&[self.space.type_count() as u64]);
        for w in self.space.weights() {
            h.words(&[w.to_bits()]);
        }
        for l in self.space.labels() {
            h.bytes(l.as_bytes());
            h.bytes(&[0]);
        }
        for v in &self.values {
            h.words(&[v.to_bits()]);
        }
        format!("{:016x}", h.finish())
    }
}

/// Directed block kernel (no symmetry requirement): implication structure,
/// restrictions, indicators, and powers all live here. Entries must be finite
/// and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDigraphon {
    space: TypeSpace,
    values: Vec<f64>,
}

impl BlockDigraphon {
    pub fn new(space: TypeSpace, values: Vec<f64>) -> Result<Self> {
        let m = space.block_count();
        if values.len() != m * m {
            return Err(Error::param(format!(
                "digraphon matrix has {} entries, expected {m}x{m}",
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(format!(
                    "digraphon entry [{}][{}] must be finite and >= 0, got {v}",
                    i / m,
                    i % m
                )));
            }
        }
        Ok(BlockDigraphon { space, values })
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn block_count(&self) -> usize {
        self.space.block_count()
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.space.block_count() + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Zero out every entry outside `keep × keep`.
    pub fn restrict(&self, keep: &BlockSet) -> BlockDigraphon {
        debug_assert_eq!(keep.block_count(), self.block_count());
        let m = self.block_count();
        let mut values = vec![0.0; m * m];
        for x in keep.iter() {
            for y in keep.iter() {
                values[x * m + y] = self.value(x, y);
            }
        }
        BlockDigraphon {
            space: self.space.clone(),
            values,
        }
    }

    /// Support indicator: 1 where this digraphon is positive, else 0.
    pub fn indicator(&self) -> BlockDigraphon {
        BlockDigraphon {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .map(|&v| if v > 0.0 { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Largest `|Γ(x,y) − Γ(¬y,¬x)|`; zero for every implication digraphon
    /// of a symmetric kernel.
    pub fn mirror_defect(&self) -> f64 {
        let m = self.block_count();
        let mut worst = 0.0f64;
        for x in 0..m {
            for y in 0..m {
                let d = (self.value(x, y) - self.value(negate_flat(y), negate_flat(x))).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Scale-free kernel on `m` equal cells of the unit interval.
///
/// The underlying continuum kernel on types `x, y ∈ (0,1)` is
///
/// * `W((x,+),(y,+)) = x^{-alpha} · y^{-alpha}`
/// * `W((x,+),(y,-)) = x^{-gamma} · y^{-delta}`  (and symmetrically)
/// * `W((x,-),(y,-)) = (1-x)^{-beta} · (1-y)^{-beta}`
///
/// Each exponent must be `< 1` so the slices are integrable. The step kernel
/// stores the *exact* average of the continuum kernel over each cell pair
/// (the factors are separable, so the cell average is a product of
/// one-dimensional averages with closed-form antiderivatives). Refining `m`
/// therefore never changes `l1_norm`.
pub fn power_law_kernel(alpha: f64, beta: f64, gamma: f64, delta: f64, m: usize) -> Result<BlockKernel> {
    for (name, e) in [
        ("alpha", alpha),
        ("beta", beta),
        ("gamma", gamma),
        ("delta", delta),
    ] {
        if !e.is_finite() || e >= 1.0 {
            return Err(Error::param(format!(
                "exponent {name} must be finite and < 1, got {e}"
            )));
        }
    }
    if m == 0 {
        return Err(Error::param("cell count m must be >= 1"));
    }
    let space = TypeSpace::uniform(m)?;

    // Average of x^{-e} over cell i of m: m * ((hi^{1-e} - lo^{1-e}) / (1-e)).
    let avg_pow = |e: f64, i: usize| -> f64 {
        let lo = i as f64 / m as f64;
        let hi = (i + 1) as f64 / m as f64;
        m as f64 * (hi.powf(1.0 - e) - lo.powf(1.0 - e)) / (1.0 - e)
    };
    // Average of (1-x)^{-e} over cell i: mirror cell through x -> 1-x.
    let avg_pow_mirror = |e: f64, i: usize| -> f64 {
        let lo = i as f64 / m as f64;
        let hi = (i + 1) as f64 / m as f64;
        m as f64 * ((1.0 - lo).powf(1.0 - e) - (1.0 - hi).powf(1.0 - e)) / (1.0 - e)
    };

    let a_alpha: Vec<f64> = (0..m).map(|i| avg_pow(alpha, i)).collect();
    let a_gamma: Vec<f64> = (0..m).map(|i| avg_pow(gamma, i)).collect();
    let a_delta: Vec<f64> = (0..m).map(|i| avg_pow(delta, i)).collect();
    let a_beta: Vec<f64> = (0..m).map(|i| avg_pow_mirror(beta, i)).collect();

    let blocks = 2 * m;
    let mut values = vec![0.0; blocks * blocks];
    for i in 0..m {
        for j in 0..m {
            let pp = a_alpha[i] * a_alpha[j];
            let pm = a_gamma[i] * a_delta[j]; // ((i,+),(j,-))
            let mm = a_beta[i] * a_beta[j];
            let (bp_i, bm_i) = (2 * i, 2 * i + 1);
            let (bp_j, bm_j) = (2 * j, 2 * j + 1);
            values[bp_i * blocks + bp_j] = pp;
            values[bm_i * blocks + bm_j] = mm;
            values[bp_i * blocks + bm_j] = pm;
            values[bm_j * blocks + bp_i] = pm; // symmetric closure, exact
        }
    }
    let kernel = BlockKernel::new(space, values)?;
    kernel.require_valid()?;
    Ok(kernel)
}

// ---------------------------------------------------------------------------
// Kernel specification files.
//
// The on-disk schema is TOML with exactly two top-level arrays:
//
// ```toml
// [[types]]
// label = "core"
// weight = 0.5
//
// [[entries]]
// from = ["core", "+"]
// to = ["core", "-"]
// value = 2.0
// ```
//
// Unspecified entries default to 0. Each entry also sets its mirror
// (symmetric closure); specifying a cell or its mirror twice is an error, as
// is any unknown field anywhere in the document.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelDoc {
    #[serde(default)]
    types: Vec<TypeDecl>,
    #[serde(default)]
    entries: Vec<EntryDecl>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDecl {
    label: String,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDecl {
    from: (String, String),
    to: (String, String),
    value: f64,
}

/// Parse a kernel specification document.
pub fn parse_kernel(text: &str) -> Result<BlockKernel> {
    let doc: KernelDoc = toml::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
    let mut labels = Vec::with_capacity(doc.types.len());
    let mut weights = Vec::with_capacity(doc.types.len());
    for t in &doc.types {
        labels.push(t.label.clone());
        weights.push(t.weight);
    }
    let space = TypeSpace::new(labels, weights)?;

    let m = space.block_count();
    let mut values = vec![0.0; m * m];
    let mut set = vec![false; m * m];
    let resolve = |(label, sign): &(String, String)| -> Result<usize> {
        let type_index = space.label_index(label).ok_or_else(|| {
            Error::parse(format!("entry references unknown type label {label:?}"))
        })?;
        Ok(SignedBlock::new(type_index, Sign::parse(sign)?).flat())
    };
    for e in &doc.entries {
        let a = resolve(&e.from)?;
        let b = resolve(&e.to)?;
        // Symmetric closure; a diagonal entry is a single cell.
        let mut cells = vec![(a, b)];
        if a != b {
            cells.push((b, a));
        }
        for (x, y) in cells {
            let cell = x * m + y;
            if set[cell] {
                let prior = values[cell];
                return Err(Error::parse(if prior == e.value {
                    format!(
                        "duplicate entry for ({},{}) -> ({},{})",
                        e.from.0, e.from.1, e.to.0, e.to.1
                    )
                } else {
                    format!(
                        "conflicting values for ({},{}) -> ({},{}): {prior} vs {}",
                        e.from.0, e.from.1, e.to.0, e.to.1, e.value
                    )
                }));
            }
            set[cell] = true;
            values[cell] = e.value;
        }
    }
    let kernel = BlockKernel::new(space, values)?;
    kernel.require_valid()?;
    Ok(kernel)
}

/// Render a kernel as a specification document (one entry per unordered
/// block pair with nonzero weight). `parse_kernel` round-trips it.
pub fn kernel_to_string(kernel: &BlockKernel) -> String {
    let space = kernel.space();
    let mut doc = KernelDoc {
        types: space
            .labels()
            .iter()
            .zip(space.weights())
            .map(|(label, &weight)| TypeDecl {
                label: label.clone(),
                weight,
            })
            .collect(),
        entries: Vec::new(),
    };
    let m = space.block_count();
    let block_ref = |flat: usize| -> (String, String) {
        let sb = SignedBlock::from_flat(flat);
        (
            space.labels()[sb.type_index].clone(),
            sb.sign.glyph().to_string(),
        )
    };
    for a in 0..m {
        for b in a..m {
            let v = kernel.value(a, b);
            if v != 0.0 {
                doc.entries.push(EntryDecl {
                    from: block_ref(a),
                    to: block_ref(b),
                    value: v,
                });
            }
        }
    }
    toml::to_string(&doc).expect("kernel document serializes")
}

/// Load a kernel specification file from disk.
pub fn load_kernel_file(path: impl AsRef<Path>) -> Result<BlockKernel> {
    let text = std::fs::read_to_string(path)?;
    parse_kernel(&text)
}

/// FNV-1a, 64-bit. Tiny content hash for provenance stamps; not for security.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn bytes(&mut self, data: &[u8]) {
        for &b in data {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn words(&mut self, data: &[u64]) {
        for w in data {
            self.bytes(&w.to_le_bytes());
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
