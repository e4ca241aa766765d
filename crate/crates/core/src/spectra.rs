//! Spectral analysis of block digraphons.
//!
//! A digraphon `Γ` acts on block functions two ways. The *right action*
//! integrates the second argument, `(A f)(x) = Σ_y Γ(x,y) f(y) κ(y)`; the
//! *adjoint action* integrates the first, `(T f)(x) = Σ_y f(y) Γ(y,x) κ(y)`.
//! Both have the same spectral radius `ρ`. On a strongly connected block set
//! the Perron–Frobenius eigenpair exists for each action; powers of `Γ` then
//! factorize along the pair: writing `D` for the period and `v` / `w` for the
//! right / adjoint eigenfunctions normalized by `Σ κ v = 1` and
//! `Σ κ w v = 1`,
//!
//! ```text
//! Γ^ℓ(x, y)  ≈  D · ρ^ℓ · v(x) · w(y)
//! ```
//!
//! for `ℓ → ∞` along residues with `class(x) + ℓ ≡ class(y) (mod D)`, and
//! `Γ^ℓ(x, y) = 0` exactly off those residues. The factor `D` compensates
//! for the mass that parity concentrates on the allowed residues.
//!
//! The headline quantity for satisfiability thresholds is [`rho_star`]: the
//! largest spectral radius over the *contradictory* components of the
//! implication digraphon, or `0` when no component is contradictory (the
//! formula `1/ρ*` then reads as an infinite threshold: the model stays
//! satisfiable at every density).

use crate::components::{decompose, strongly_connected, Decomposition};
use crate::error::{Error, Result};
use crate::kernel::{BlockDigraphon, BlockKernel, BlockSet, TypeSpace};

/// Iteration stops once the residual drops to this fraction of `max(1, ρ)`.
const STOP_TOL: f64 = 1e-13;
/// A solve counts as converged while the final residual stays under this
/// fraction of `max(1, ρ)` — a decade of slack over [`STOP_TOL`] to absorb
/// the eigenvector reassembly in the periodic route.
const ACCEPT_TOL: f64 = 1e-11;
/// Shift used to make an aperiodic nonnegative matrix primitive, as a
/// fraction of its largest entry. `ρ(A + εI) = ρ(A) + ε`, so the shift is
/// subtracted back out exactly.
const SHIFT_FRACTION: f64 = 1e-3;

fn iteration_cap(dim: usize) -> usize {
    (10_000 * dim).max(200_000)
}

/// The adjoint action `(T f)(x) = Σ_y f(y) Γ(y, x) κ(y)` as a dense matrix:
/// `M[x][y] = κ(y) Γ(y, x)`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.dim + y]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Apply to a block function: `(M f)(x) = Σ_y M[x][y] f(y)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.dim, "function length must match dimension");
        Dense {
            n: self.dim,
            a: self.entries.clone(),
        }
        .mul_vec(f)
    }
}

/// Materialize the adjoint action of a digraphon.
pub fn operator_matrix(gamma: &BlockDigraphon) -> OperatorMatrix {
    let m = gamma.block_count();
    let space = gamma.space();
    let mut entries = vec![0.0; m * m];
    for x in 0..m {
        for y in 0..m {
            entries[x * m + y] = space.block_measure(y) * gamma.value(y, x);
        }
    }
    OperatorMatrix { dim: m, entries }
}

/// Outcome of a Perron–Frobenius solve on a restriction of a digraphon.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Spectral radius of the restriction.
    pub rho: f64,
    /// Right eigenfunction over all blocks (zero off the dominant component),
    /// normalized by `Σ κ v = 1`. All-zero when `rho == 0`.
    pub v_right: Vec<f64>,
    /// Adjoint eigenfunction, normalized by `Σ κ w v = 1`; zero off the
    /// dominant component.
    pub v_left: Vec<f64>,
    /// Period of the dominant component's support digraph.
    pub period: usize,
    /// Blocks of the dominant component grouped by cyclic class; arcs go
    /// from class `j` to class `j + 1 (mod period)`. Empty when `rho == 0`.
    pub cyclic_parts: Vec<Vec<usize>>,
    /// Total power-iteration steps across both eigenpair solves.
    pub iterations: usize,
    /// Largest `‖·‖_∞` eigen-residual of the two solves, each measured
    /// against its own action matrix at the reported `rho`.
    pub residual: f64,
    /// Whether both solves met [`ACCEPT_TOL`] and agreed on `rho`.
    pub converged: bool,
    /// Whether the restriction itself is strongly connected. When it is not,
    /// `rho` is the maximum over the restriction's components and the
    /// eigenfunctions describe the maximizing one.
    pub strongly_connected: bool,
}

/// Spectral radius (with eigenpair) of `Γ` restricted to `x`.
///
/// The restriction need not be strongly connected: its spectrum is the union
/// of its components' spectra (the action matrix is block-triangular in the
/// condensation order, and the fragmented part is nilpotent), so the radius
/// is the maximum over components — zero if there are none.
pub fn spectral_radius(gamma: &BlockDigraphon, x: &BlockSet) -> Result<SpectralReport> {
    if x.is_empty() {
        return Err(Error::param("spectral radius of an empty restriction is undefined"));
    }
    if x.block_count() != gamma.block_count() {
        return Err(Error::param("block set and digraphon sizes disagree"));
    }
    let restricted = gamma.restrict(x);
    let sc = strongly_connected(&restricted, x)?;
    let d = decompose(&restricted);
    let m = gamma.block_count();

    if d.components.is_empty() {
        // Acyclic support: nilpotent action, radius zero.
        return Ok(SpectralReport {
            rho: 0.0,
            v_right: vec![0.0; m],
            v_left: vec![0.0; m],
            period: 1,
            cyclic_parts: Vec::new(),
            iterations: 0,
            residual: 0.0,
            converged: true,
            strongly_connected: sc,
        });
    }

    let mut best: Option<ComponentPf> = None;
    for comp in &d.components {
        let pf = component_pf(&restricted, comp);
        let better = match &best {
            None => true,
            Some(b) => pf.rho > b.rho,
        };
        if better {
            best = Some(pf);
        }
    }
    let pf = best.expect("at least one component");
    Ok(pf.into_report(gamma.space(), m, sc))
}

/// Perron–Frobenius data for one strongly connected component.
struct ComponentPf {
    members: Vec<usize>,
    rho: f64,
    v_right: Vec<f64>,
    v_left: Vec<f64>,
    period: usize,
    parts_local: Vec<Vec<usize>>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

impl ComponentPf {
    fn into_report(self, space: &TypeSpace, block_count: usize, sc: bool) -> SpectralReport {
        let mut v_right = vec![0.0; block_count];
        let mut v_left = vec![0.0; block_count];

        // Σ κ v = 1 on the right, Σ κ w v = 1 on the adjoint side.
        let kappa: Vec<f64> = self.members.iter().map(|&b| space.block_measure(b)).collect();
        let right_mass: f64 = kappa
            .iter()
            .zip(&self.v_right)
            .map(|(k, v)| k * v)
            .sum();
        let scale_r = if right_mass > 0.0 { 1.0 / right_mass } else { 0.0 };
        let cross_mass: f64 = kappa
            .iter()
            .zip(self.v_left.iter().zip(&self.v_right))
            .map(|(k, (w, v))| k * w * v * scale_r)
            .sum();
        let scale_l = if cross_mass > 0.0 { 1.0 / cross_mass } else { 0.0 };
        for (i, &b) in self.members.iter().enumerate() {
            v_right[b] = self.v_right[i] * scale_r;
            v_left[b] = self.v_left[i] * scale_l;
        }

        let cyclic_parts = self
            .parts_local
            .iter()
            .map(|part| part.iter().map(|&i| self.members[i]).collect())
            .collect();
        SpectralReport {
            rho: self.rho,
            v_right,
            v_left,
            period: self.period,
            cyclic_parts,
            iterations: self.iterations,
            residual: self.residual,
            converged: self.converged,
            strongly_connected: sc,
        }
    }
}

/// Solve both eigenpairs on one strongly connected component.
fn component_pf(gamma: &BlockDigraphon, comp: &BlockSet) -> ComponentPf {
    let members: Vec<usize> = comp.iter().collect();
    let k = members.len();
    let space = gamma.space();

    // Local dense actions: right `A[i][j] = Γ(b_i, b_j) κ(b_j)` and adjoint
    // `M[i][j] = κ(b_j) Γ(b_j, b_i)`.
    let a = Dense::from_fn(k, |i, j| {
        gamma.value(members[i], members[j]) * space.block_measure(members[j])
    });
    let m = Dense::from_fn(k, |i, j| {
        space.block_measure(members[j]) * gamma.value(members[j], members[i])
    });

    let arcs = local_support_arcs(gamma, &members);
    let (period, parts_local) = period_and_parts(k, &arcs);

    let right = pf_irreducible(&a, period);
    let left = pf_irreducible(&m, period);

    let rho = right.rho;
    let agreement = (right.rho - left.rho).abs() <= 1e-9 * rho.max(1.0);
    // Residuals at the single reported rho, each against its own matrix.
    let residual = a.residual(&right.v, rho).max(m.residual(&left.v, rho));
    let converged =
        right.converged && left.converged && agreement && residual <= ACCEPT_TOL * rho.max(1.0);

    ComponentPf {
        members,
        rho,
        v_right: right.v,
        v_left: left.v,
        period,
        parts_local,
        iterations: right.iterations + left.iterations,
        residual,
        converged,
    }
}

struct PfSolution {
    rho: f64,
    v: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Perron–Frobenius pair of an irreducible nonnegative matrix with known
/// period.
///
/// Aperiodic case: shift by `εI` (making the matrix primitive), power-iterate,
/// subtract the shift — exact, since the shift moves every eigenvalue equally
/// and keeps the eigenvectors. Periodic case: power-iterate `B = mat^D`
/// (block-diagonal with primitive blocks, one per cyclic class), recover
/// `ρ = ρ(B)^{1/D}`, and reassemble the eigenvector as the normalized
/// `Σ_{j<D} mat^j u / ρ^j`, which maps to `ρ` times itself whenever
/// `B u = ρ^D u`.
fn pf_irreducible(mat: &Dense, period: usize) -> PfSolution {
    let cap = iteration_cap(mat.n);
    if period == 1 {
        let eps = SHIFT_FRACTION * mat.max_entry();
        let po = power_iterate(&mat.shifted(eps), None, cap);
        let rho = (po.lambda - eps).max(0.0);
        let residual = mat.residual(&po.v, rho);
        return PfSolution {
            rho,
            v: po.v,
            iterations: po.iterations,
            converged: po.converged && residual <= ACCEPT_TOL * rho.max(1.0),
        };
    }

    let b = mat.pow(period);
    let mut po = power_iterate(&b, None, cap);
    let mut iterations = po.iterations;
    let mut rho = po.lambda.powf(1.0 / period as f64);
    let mut v = symmetrize_over_period(mat, &po.v, rho, period);
    let mut residual = mat.residual(&v, rho);
    // The reassembly amplifies whatever error is left in `u`; polish with a
    // few more rounds on `B` if the direct residual is not tight yet.
    let mut rounds = 0;
    while residual > STOP_TOL * rho.max(1.0) && po.converged && rounds < 4 {
        po = power_iterate(&b, Some(po.v), cap);
        iterations += po.iterations;
        rho = po.lambda.powf(1.0 / period as f64);
        v = symmetrize_over_period(mat, &po.v, rho, period);
        residual = mat.residual(&v, rho);
        rounds += 1;
    }
    PfSolution {
        rho,
        v,
        iterations,
        converged: po.converged && residual <= ACCEPT_TOL * rho.max(1.0),
    }
}

/// `Σ_{j<period} mat^j u / ρ^j`, L1-normalized.
fn symmetrize_over_period(mat: &Dense, u: &[f64], rho: f64, period: usize) -> Vec<f64> {
    let mut acc = u.to_vec();
    let mut term = u.to_vec();
    for _ in 1..period {
        term = mat.mul_vec(&term);
        for t in term.iter_mut() {
            *t /= rho;
        }
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += *t;
        }
    }
    let norm: f64 = acc.iter().sum();
    if norm > 0.0 {
        for a in acc.iter_mut() {
            *a /= norm;
        }
    }
    acc
}

struct PowerOutcome {
    lambda: f64,
    v: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Power iteration on a nonnegative matrix from a positive start vector.
/// Returns an L1-normalized nonnegative vector.
fn power_iterate(mat: &Dense, start: Option<Vec<f64>>, cap: usize) -> PowerOutcome {
    let n = mat.n;
    if mat.max_entry() == 0.0 {
        return PowerOutcome {
            lambda: 0.0,
            v: vec![0.0; n],
            iterations: 0,
            converged: true,
        };
    }
    let mut v = start.unwrap_or_else(|| vec![1.0 / n as f64; n]);
    let mut lambda = 0.0;
    for it in 1..=cap {
        let w = mat.mul_vec(&v);
        let mass: f64 = w.iter().sum();
        if mass == 0.0 {
            // Entire vector fell into the kernel; radius 0 on this start.
            return PowerOutcome {
                lambda: 0.0,
                v: vec![0.0; n],
                iterations: it,
                converged: true,
            };
        }
        // v sums to 1 entering the step, so the mass of `mat v` is the
        // Rayleigh-style eigenvalue estimate.
        lambda = mass;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / mass;
        }
        if mat.residual(&v, lambda) <= STOP_TOL * lambda.max(1.0) {
            return PowerOutcome {
                lambda,
                v,
                iterations: it,
                converged: true,
            };
        }
    }
    PowerOutcome {
        lambda,
        v,
        iterations: cap,
        converged: false,
    }
}

/// Support arcs of `gamma` among `members`, in local indices.
fn local_support_arcs(gamma: &BlockDigraphon, members: &[usize]) -> Vec<(usize, usize)> {
    let mut arcs = Vec::new();
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate() {
            if gamma.value(u, v) > 0.0 {
                arcs.push((i, j));
            }
        }
    }
    arcs
}

/// Period of a strongly connected digraph on `0..n`, with the cyclic classes.
///
/// BFS from node 0 gives distances; the period is the gcd of
/// `|dist(u) + 1 − dist(v)|` over arcs `u → v` (every cycle's length is a
/// combination of these discrepancies), and class `j` collects the nodes
/// with `dist ≡ j (mod D)`, so arcs go from class `j` to class `j + 1`.
fn period_and_parts(n: usize, arcs: &[(usize, usize)]) -> (usize, Vec<Vec<usize>>) {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in arcs {
        adj[u].push(v);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[0] = 0;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    debug_assert!(dist.iter().all(|&d| d != usize::MAX), "digraph not strongly connected");

    let mut g: u64 = 0;
    for &(u, v) in arcs {
        let delta = (dist[u] as i64 + 1 - dist[v] as i64).unsigned_abs();
        g = gcd(g, delta);
    }
    let d = g.max(1) as usize;
    let mut parts = vec![Vec::new(); d];
    for (node, &dst) in dist.iter().enumerate() {
        parts[dst % d].push(node);
    }
    (d, parts)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period and cyclic classes of `Γ` restricted to `x`, which must be
/// strongly connected. Classes are reported as block-index lists; arcs go
/// from class `j` to class `j + 1 (mod D)`.
pub fn period(gamma: &BlockDigraphon, x: &BlockSet) -> Result<(usize, Vec<Vec<usize>>)> {
    let restricted = gamma.restrict(x);
    if !strongly_connected(&restricted, x)? {
        return Err(Error::param("period requires a strongly connected restriction"));
    }
    let members: Vec<usize> = x.iter().collect();
    let arcs = local_support_arcs(&restricted, &members);
    let (d, parts_local) = period_and_parts(members.len(), &arcs);
    let parts = parts_local
        .iter()
        .map(|part| part.iter().map(|&i| members[i]).collect())
        .collect();
    Ok((d, parts))
}

/// Largest spectral radius over the contradictory components of a kernel's
/// implication digraphon, with the per-component evidence.
#[derive(Debug, Clone)]
pub struct RhoStarReport {
    /// `max_i ρ(Γ restricted to contradictory component i)`, or `0.0` when
    /// no component is contradictory.
    pub rho_star: f64,
    pub decomposition: Decomposition,
    /// One spectral report per component, aligned with
    /// `decomposition.components`.
    pub per_component: Vec<ComponentSpectrum>,
}

#[derive(Debug, Clone)]
pub struct ComponentSpectrum {
    /// Index into `decomposition.components`.
    pub component: usize,
    pub contradictory: bool,
    pub report: SpectralReport,
}

/// Compute `ρ*` of a kernel: decompose its implication digraphon, solve the
/// eigenproblem on every component, and take the maximum radius over the
/// contradictory ones (`0` if there are none — an infinite threshold).
pub fn rho_star(w: &BlockKernel) -> Result<RhoStarReport> {
    let gamma = w.implication_digraphon()?;
    let d = decompose(&gamma);
    let mut per_component = Vec::with_capacity(d.components.len());
    for (i, comp) in d.components.iter().enumerate() {
        let report = spectral_radius(&gamma, comp)?;
        per_component.push(ComponentSpectrum {
            component: i,
            contradictory: d.contradictory[i],
            report,
        });
    }
    let rho_star = per_component
        .iter()
        .filter(|c| c.contradictory)
        .map(|c| c.report.rho)
        .fold(0.0, f64::max);
    Ok(RhoStarReport {
        rho_star,
        decomposition: d,
        per_component,
    })
}

/// `Γ^k` under the measure-weighted composition
/// `(P ∘ Q)(x, y) = Σ_z P(x, z) Q(z, y) κ(z)`, for `k ≥ 1`.
///
/// Entries grow like `ρ^k`; once they overflow the float range the
/// construction fails with a non-finite-entry error rather than returning
/// infinities.
pub fn kernel_power(gamma: &BlockDigraphon, k: usize) -> Result<BlockDigraphon> {
    if k == 0 {
        return Err(Error::param("digraphon power requires k >= 1"));
    }
    let m = gamma.block_count();
    let kappa: Vec<f64> = (0..m).map(|b| gamma.space().block_measure(b)).collect();
    let base = Dense {
        n: m,
        a: gamma.values().to_vec(),
    };
    let mut cur = base.clone();
    for _ in 1..k {
        cur = compose(&cur, &base, &kappa);
    }
    BlockDigraphon::new(gamma.space().clone(), cur.a)
}

/// `(P ∘ Q)[x][y] = Σ_z P[x][z] κ(z) Q[z][y]`.
fn compose(p: &Dense, q: &Dense, kappa: &[f64]) -> Dense {
    let n = p.n;
    let mut out = Dense::zeros(n);
    for x in 0..n {
        for z in 0..n {
            let pk = p.a[x * n + z] * kappa[z];
            if pk == 0.0 {
                continue;
            }
            for y in 0..n {
                out.a[x * n + y] += pk * q.a[z * n + y];
            }
        }
    }
    out
}

/// The Gelfand sequence `k ↦ ‖Γ^k‖^{1/k}`, `k = 1..=k_max`, under the
/// measure-weighted L2 norm `‖G‖ = sqrt(Σ_{x,y} κ(x) κ(y) G(x,y)²)`.
///
/// The sequence converges to the spectral radius. Powers are renormalized
/// every step and tracked on a log scale, so large `k_max` neither overflows
/// nor underflows; a nilpotent digraphon yields zeros from the step where
/// the power vanishes.
pub fn gelfand_estimate(gamma: &BlockDigraphon, k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::param("gelfand estimate requires k_max >= 1"));
    }
    let m = gamma.block_count();
    let kappa: Vec<f64> = (0..m).map(|b| gamma.space().block_measure(b)).collect();
    let base = Dense {
        n: m,
        a: gamma.values().to_vec(),
    };
    let mut cur = base.clone();
    let mut logscale = 0.0f64;
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            cur = compose(&cur, &base, &kappa);
        }
        let peak = cur.max_entry();
        if peak == 0.0 {
            out.resize(k_max, 0.0);
            break;
        }
        for a in cur.a.iter_mut() {
            *a /= peak;
        }
        logscale += peak.ln();
        let mut sq = 0.0;
        for x in 0..m {
            for y in 0..m {
                let v = cur.a[x * m + y];
                sq += kappa[x] * kappa[y] * v * v;
            }
        }
        let log_norm = logscale + 0.5 * sq.ln();
        out.push((log_norm / k as f64).exp());
    }
    Ok(out)
}

/// One probe of the asymptotic factorization of digraphon powers.
#[derive(Debug, Clone)]
pub struct AsymptoticCheck {
    /// `Γ^ℓ(x, y)` on the restriction (may overflow to `inf` for large `ℓ`;
    /// the relative error is computed on a log scale and stays finite).
    pub actual: f64,
    /// `D ρ^ℓ v(x) w(y)` when the residue is allowed, `0` otherwise.
    pub predicted: f64,
    /// `|actual / predicted − 1|` on allowed residues; on forbidden ones `0`
    /// if the entry is exactly zero (it must be) and `∞` otherwise.
    pub relative_error: f64,
    /// Whether `class(x) + ℓ ≡ class(y) (mod D)`.
    pub parity_allowed: bool,
}

/// Compare `Γ^ℓ(x, y)` on a strongly connected restriction against the
/// Perron–Frobenius prediction `D ρ^ℓ v(x) w(y)`.
pub fn asymptotic_check(
    gamma: &BlockDigraphon,
    x_set: &BlockSet,
    ell: usize,
    x: usize,
    y: usize,
) -> Result<AsymptoticCheck> {
    if ell == 0 {
        return Err(Error::param("asymptotic check requires ell >= 1"));
    }
    if !x_set.contains(x) || !x_set.contains(y) {
        return Err(Error::param("probe blocks must lie in the restriction"));
    }
    let report = spectral_radius(gamma, x_set)?;
    if !report.strongly_connected {
        return Err(Error::param(
            "asymptotic prediction requires a strongly connected restriction",
        ));
    }

    let d = report.period;
    let mut class = vec![0usize; gamma.block_count()];
    for (j, part) in report.cyclic_parts.iter().enumerate() {
        for &b in part {
            class[b] = j;
        }
    }
    let parity_allowed = (class[x] + ell) % d == class[y];

    // Scaled powering of the restriction keeps exact zeros exact and the
    // magnitude on a log scale.
    let restricted = gamma.restrict(x_set);
    let m = gamma.block_count();
    let kappa: Vec<f64> = (0..m).map(|b| gamma.space().block_measure(b)).collect();
    let base = Dense {
        n: m,
        a: restricted.values().to_vec(),
    };
    let mut cur = base.clone();
    let mut logscale = 0.0f64;
    for _ in 1..ell {
        let peak = cur.max_entry();
        if peak > 0.0 {
            for a in cur.a.iter_mut() {
                *a /= peak;
            }
            logscale += peak.ln();
        }
        cur = compose(&cur, &base, &kappa);
    }
    let entry = cur.a[x * m + y];
    let log_actual = if entry > 0.0 { entry.ln() + logscale } else { f64::NEG_INFINITY };
    let actual = log_actual.exp();

    let (predicted, relative_error) = if parity_allowed {
        let log_predicted = (d as f64).ln()
            + ell as f64 * report.rho.ln()
            + report.v_right[x].ln()
            + report.v_left[y].ln();
        let rel = ((log_actual - log_predicted).exp() - 1.0).abs();
        (log_predicted.exp(), rel)
    } else {
        let rel = if entry == 0.0 { 0.0 } else { f64::INFINITY };
        (0.0, rel)
    };

    Ok(AsymptoticCheck {
        actual,
        predicted,
        relative_error,
        parity_allowed,
    })
}

/// Minimal dense row-major matrix used by the iteration internals.
#[derive(Debug, Clone)]
struct Dense {
    n: usize,
    a: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Dense { n, a: vec![0.0; n * n] }
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = f(i, j);
            }
        }
        Dense { n, a }
    }

    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    fn matmul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        out
    }

    fn pow(&self, k: usize) -> Dense {
        assert!(k >= 1);
        let mut out = self.clone();
        for _ in 1..k {
            out = out.matmul(self);
        }
        out
    }

    fn max_entry(&self) -> f64 {
        self.a.iter().copied().fold(0.0, f64::max)
    }

    fn shifted(&self, eps: f64) -> Dense {
        let mut out = self.clone();
        for i in 0..self.n {
            out.a[i * self.n + i] += eps;
        }
        out
    }

    /// `‖A v − λ v‖_∞`.
    fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        self.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(w, vi)| (w - lambda * vi).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BlockKernel;

    fn digraphon(values: Vec<f64>) -> BlockDigraphon {
        let t = ((values.len() as f64).sqrt() as usize) / 2;
        BlockDigraphon::new(TypeSpace::uniform(t).unwrap(), values).unwrap()
    }

    #[test]
    fn homogeneous_kernel_radius_is_the_constant() {
        for c in [0.25, 1.0, 2.0, 7.5] {
            let rep = rho_star(&BlockKernel::homogeneous(c).unwrap()).unwrap();
            assert!((rep.rho_star - c).abs() <= 1e-12 * c, "c = {c}");
            assert!(rep.per_component[0].report.converged);
            // Flat eigenfunctions: Σ κ v = 1 with κ summing to 1 gives v ≡ 1.
            for b in 0..2 {
                assert!((rep.per_component[0].report.v_right[b] - 1.0).abs() < 1e-10);
                assert!((rep.per_component[0].report.v_left[b] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn one_type_mixed_kernel_frozen_eigenpair() {
        // W(+,+) = 4, W(+,−) = 0, W(−,−) = 1: the implication digraphon is
        // [[0,1],[4,0]] with period 2, radius (0 + sqrt(4·1))/2 = 1, right
        // eigenfunction (2/3, 4/3) and adjoint (3/2, 3/4) under the standard
        // normalizations (worked out by hand from the 2×2 actions).
        let w = BlockKernel::one_type(4.0, 0.0, 1.0).unwrap();
        let rep = rho_star(&w).unwrap();
        assert!((rep.rho_star - 1.0).abs() < 1e-11);
        let r = &rep.per_component[0].report;
        assert!(r.converged, "residual {}", r.residual);
        assert_eq!(r.period, 2);
        assert_eq!(r.cyclic_parts, vec![vec![0], vec![1]]);
        assert!((r.v_right[0] - 2.0 / 3.0).abs() < 1e-10);
        assert!((r.v_right[1] - 4.0 / 3.0).abs() < 1e-10);
        assert!((r.v_left[0] - 1.5).abs() < 1e-10);
        assert!((r.v_left[1] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn same_sign_only_kernel_has_no_contradictory_component() {
        // W(+,+) = W(−,−) = 0, W(+,−) = 3: implications stay within a sign.
        let w = BlockKernel::one_type(0.0, 3.0, 0.0).unwrap();
        let rep = rho_star(&w).unwrap();
        assert_eq!(rep.rho_star, 0.0);
        assert_eq!(rep.decomposition.components.len(), 2);
        assert!(rep.per_component.iter().all(|c| !c.contradictory));
        // Each single-block component still has its own radius B/2.
        for c in &rep.per_component {
            assert!((c.report.rho - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_factorization_on_the_period_two_example() {
        // Γ = [[0,1],[4,0]]: Γ² = [[2,0],[0,2]] and Γ³ = [[0,2],[8,0]]
        // (measure-weighted composition, κ = 1/2). The prediction
        // D ρ^ℓ v(x) w(y) must reproduce the allowed entries exactly here:
        // 2·1·(2/3)·(3/2) = 2 and 2·1·(2/3)·(3/4) = 1.
        let w = BlockKernel::one_type(4.0, 0.0, 1.0).unwrap();
        let gamma = w.implication_digraphon().unwrap();
        let full = BlockSet::full(2);

        let p2 = kernel_power(&gamma, 2).unwrap();
        assert_eq!(p2.values(), &[2.0, 0.0, 0.0, 2.0]);

        let diag = asymptotic_check(&gamma, &full, 2, 0, 0).unwrap();
        assert!(diag.parity_allowed);
        assert!(diag.relative_error < 1e-9, "rel {}", diag.relative_error);
        assert!((diag.actual - 2.0).abs() < 1e-12);
        assert!((diag.predicted - 2.0).abs() < 1e-9);

        let off = asymptotic_check(&gamma, &full, 2, 0, 1).unwrap();
        assert!(!off.parity_allowed);
        assert_eq!(off.actual, 0.0);
        assert_eq!(off.relative_error, 0.0);

        let cross = asymptotic_check(&gamma, &full, 3, 0, 1).unwrap();
        assert!(cross.parity_allowed);
        assert!((cross.actual - 1.0).abs() < 1e-12);
        assert!(cross.relative_error < 1e-9);
    }

    #[test]
    fn non_strongly_connected_radius_is_max_over_components() {
        // W with B = 2, A = C = 0: Γ = [[2,0],[0,2]] — two self-loop
        // components, no arcs between them.
        let w = BlockKernel::one_type(0.0, 2.0, 0.0).unwrap();
        let gamma = w.implication_digraphon().unwrap();
        let rep = spectral_radius(&gamma, &BlockSet::full(2)).unwrap();
        assert!(!rep.strongly_connected);
        assert!((rep.rho - 1.0).abs() < 1e-12);
        assert!(rep.converged);
        // Vectors live on the dominant component only.
        let live: usize = rep.v_right.iter().filter(|&&v| v > 0.0).count();
        assert_eq!(live, 1);
    }

    #[test]
    fn zero_digraphon_reports_zero_radius() {
        let rep = spectral_radius(&digraphon(vec![0.0; 4]), &BlockSet::full(2)).unwrap();
        assert_eq!(rep.rho, 0.0);
        assert!(rep.converged);
        assert!(!rep.strongly_connected);
        assert!(rep.v_right.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn operator_matrix_matches_adjoint_action() {
        // Γ = [[0,1],[4,0]], κ = 1/2: M[x][y] = κ(y) Γ(y,x) = [[0,2],[.5,0]].
        let w = BlockKernel::one_type(4.0, 0.0, 1.0).unwrap();
        let gamma = w.implication_digraphon().unwrap();
        let m = operator_matrix(&gamma);
        assert_eq!(m.entries(), &[0.0, 2.0, 0.5, 0.0]);
        // The adjoint eigenfunction from the report satisfies M w = ρ w.
        let rep = spectral_radius(&gamma, &BlockSet::full(2)).unwrap();
        let image = m.apply(&rep.v_left);
        for (im, wv) in image.iter().zip(&rep.v_left) {
            assert!((im - rep.rho * wv).abs() < 1e-10);
        }
    }

    #[test]
    fn radius_scales_linearly() {
        let base = BlockKernel::one_type(1.3, 0.7, 2.1).unwrap();
        let r0 = rho_star(&base).unwrap().rho_star;
        for c in [0.5, 2.0, 7.25] {
            let rc = rho_star(&base.scale(c).unwrap()).unwrap().rho_star;
            assert!((rc - c * r0).abs() <= 1e-12 * (c * r0), "c = {c}");
        }
    }

    #[test]
    fn period_of_bipartite_support_is_two() {
        let gamma = digraphon(vec![0.0, 1.0, 4.0, 0.0]);
        let (d, parts) = period(&gamma, &BlockSet::full(2)).unwrap();
        assert_eq!(d, 2);
        assert_eq!(parts, vec![vec![0], vec![1]]);

        let aperiodic = digraphon(vec![1.0, 1.0, 1.0, 1.0]);
        let (d1, parts1) = period(&aperiodic, &BlockSet::full(2)).unwrap();
        assert_eq!(d1, 1);
        assert_eq!(parts1, vec![vec![0, 1]]);

        // Two self-loop blocks with no cross arcs: not strongly connected.
        let split = digraphon(vec![3.0, 0.0, 0.0, 3.0]);
        assert!(period(&split, &BlockSet::full(2)).is_err());
    }

    #[test]
    fn gelfand_sequence_of_the_swap_digraphon() {
        // Γ = [[0,2],[2,0]], κ = 1/2: ‖Γ^k‖ = sqrt(2) for every k, so the
        // k-th term is 2^(1/(2k)), converging to ρ = 1.
        let gamma = digraphon(vec![0.0, 2.0, 2.0, 0.0]);
        let terms = gelfand_estimate(&gamma, 6).unwrap();
        for (k, term) in terms.iter().enumerate() {
            let expect = 2f64.powf(1.0 / (2.0 * (k as f64 + 1.0)));
            assert!((term - expect).abs() < 1e-12, "k = {}", k + 1);
        }
        let long = gelfand_estimate(&gamma, 200).unwrap();
        assert!((long[199] - 1.0).abs() < 0.01);
    }

    #[test]
    fn gelfand_sequence_of_a_nilpotent_digraphon_hits_zero() {
        // Single arc (+) → (−): Γ² = 0.
        let gamma = digraphon(vec![0.0, 2.0, 0.0, 0.0]);
        let terms = gelfand_estimate(&gamma, 4).unwrap();
        assert!(terms[0] > 0.0);
        assert_eq!(&terms[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn kernel_power_rejects_zeroth_power_and_matches_composition() {
        let gamma = digraphon(vec![0.0, 1.0, 4.0, 0.0]);
        assert!(kernel_power(&gamma, 0).is_err());
        // One measure factor (κ ≡ 1/2 per block) per composition step:
        // Γ²(0,0) = 1 · ½ · 4 = 2, and Γ³ lands back on Γ exactly (ρ = 1,
        // period 2).
        let p2 = kernel_power(&gamma, 2).unwrap();
        assert_eq!(p2.values(), &[2.0, 0.0, 0.0, 2.0]);
        let p3 = kernel_power(&gamma, 3).unwrap();
        assert_eq!(p3.values(), gamma.values());
    }

    #[test]
    fn restriction_spectrum_ignores_blocks_outside_the_set() {
        // Full space radius comes from the (+,+) loop; restricting to the
        // minus block leaves only its self-loop weight.
        let gamma = digraphon(vec![4.0, 1.0, 1.0, 2.0]);
        let full = spectral_radius(&gamma, &BlockSet::full(2)).unwrap();
        let minus_only =
            spectral_radius(&gamma, &BlockSet::new([1], 2).unwrap()).unwrap();
        assert!(full.rho > minus_only.rho);
        assert!((minus_only.rho - 1.0).abs() < 1e-12); // 2 · κ = 1
        assert_eq!(minus_only.v_right[0], 0.0);
    }
}
