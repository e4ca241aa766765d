//! Strong connectivity structure of a block digraphon.
//!
//! A set `X` of blocks is *strongly connected* under `Γ` when every split of
//! `X` into two positive-measure halves `A ⊔ B` has `∫_{A×B} Γ > 0`. For step
//! digraphons this reduces to a finite check on the support digraph (one node
//! per block, an arc where the entry is positive):
//!
//! * a single block is strongly connected iff it has a self-loop — without
//!   one, splitting the block in half gives a zero cross-integral;
//! * a union of two or more blocks is strongly connected iff the induced
//!   support digraph is. Any positive-measure split must separate either two
//!   whole blocks or parts of one block; in the first case some support arc
//!   crosses the split because the induced digraph is strongly connected, and
//!   in the second case a block meets both halves, so pick any support arc
//!   leaving that block (one exists — the block reaches the others): its
//!   whole source-block × target-block rectangle carries mass, and one of the
//!   two halves of the source block sits on the crossing side.
//!
//! The whole ground space then decomposes into maximal strongly connected
//! unions ("components", the nontrivial strongly connected components of the
//! support digraph) plus a leftover *fragmented* part containing no strongly
//! connected positive-measure subset at all (the trivial support components:
//! their blocks span an acyclic, loop-free sub-digraph).

use crate::error::{Error, Result};
use crate::kernel::{negate_flat, BlockDigraphon, BlockSet};
use crate::scc::{tarjan, Csr};

/// Adjacency of the positive entries of a block digraphon.
#[derive(Debug, Clone)]
pub struct SupportDigraph {
    block_count: usize,
    arcs: Vec<(u32, u32)>,
}

impl SupportDigraph {
    pub fn of(gamma: &BlockDigraphon) -> Self {
        let m = gamma.block_count();
        let mut arcs = Vec::new();
        for x in 0..m {
            for y in 0..m {
                if gamma.value(x, y) > 0.0 {
                    arcs.push((x as u32, y as u32));
                }
            }
        }
        SupportDigraph {
            block_count: m,
            arcs,
        }
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.contains(&(from as u32, to as u32))
    }

    /// Arcs with both endpoints inside `keep`.
    pub fn restricted_arcs(&self, keep: &BlockSet) -> Vec<(u32, u32)> {
        self.arcs
            .iter()
            .copied()
            .filter(|&(u, v)| keep.contains(u as usize) && keep.contains(v as usize))
            .collect()
    }

    fn csr(&self) -> Csr {
        Csr::from_arcs(self.block_count, &self.arcs)
    }
}

/// Decomposition of the block space under a digraphon: maximal strongly
/// connected unions of blocks, plus the fragmented remainder.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Blocks lying in no strongly connected positive-measure set.
    pub fragmented: BlockSet,
    /// Components ordered by their smallest block index.
    pub components: Vec<BlockSet>,
    /// `contradictory[i]` ⇔ `components[i]` holds both signs of some type.
    pub contradictory: Vec<bool>,
}

impl Decomposition {
    /// Which component (index into `components`) a block belongs to.
    pub fn component_of(&self, block: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(block))
    }

    /// Indices of the contradictory components.
    pub fn contradictory_indices(&self) -> Vec<usize> {
        self.contradictory
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| if c { Some(i) } else { None })
            .collect()
    }
}

/// Is `x` strongly connected under `gamma`? See the module docs for the
/// finite reduction. Errors on an empty set.
pub fn strongly_connected(gamma: &BlockDigraphon, x: &BlockSet) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::param("strong connectivity of the empty set is undefined"));
    }
    if x.block_count() != gamma.block_count() {
        return Err(Error::param("block set and digraphon sizes disagree"));
    }
    let members: Vec<usize> = x.iter().collect();
    if members.len() == 1 {
        let b = members[0];
        return Ok(gamma.value(b, b) > 0.0);
    }
    // Tarjan on the induced support digraph, with nodes renumbered 0..|X|.
    let index_of = |b: usize| members.binary_search(&b).expect("member") as u32;
    let mut arcs = Vec::new();
    for &u in &members {
        for &v in &members {
            if gamma.value(u, v) > 0.0 {
                arcs.push((index_of(u), index_of(v)));
            }
        }
    }
    let scc = tarjan(&Csr::from_arcs(members.len(), &arcs));
    Ok(scc.count == 1)
}

/// Split the ground space into components and a fragmented remainder.
///
/// Components are the nontrivial strongly connected components of the support
/// digraph — those with at least one internal arc, self-loops included. The
/// trivial ones cannot hold any strongly connected positive-measure subset:
/// their blocks have no self-loops and span no support cycle, so any
/// candidate subset either splits inside one block (zero cross-mass) or
/// splits along the induced acyclic order (zero back-mass).
pub fn decompose(gamma: &BlockDigraphon) -> Decomposition {
    let m = gamma.block_count();
    let support = SupportDigraph::of(gamma);
    let scc = tarjan(&support.csr());
    let groups = scc.groups();

    let mut components: Vec<BlockSet> = Vec::new();
    let mut fragmented = Vec::new();
    for group in &groups {
        let nontrivial = group.len() > 1
            || gamma.value(group[0] as usize, group[0] as usize) > 0.0;
        if nontrivial {
            components.push(
                BlockSet::new(group.iter().map(|&b| b as usize), m)
                    .expect("component blocks in range"),
            );
        } else {
            fragmented.push(group[0] as usize);
        }
    }
    components.sort_by_key(|c| c.iter().next().expect("nonempty component"));
    let contradictory = components.iter().map(is_contradictory).collect();
    Decomposition {
        fragmented: BlockSet::new(fragmented, m).expect("fragmented blocks in range"),
        components,
        contradictory,
    }
}

/// Does the set hold both signs of at least one type?
pub fn is_contradictory(set: &BlockSet) -> bool {
    set.iter().any(|b| b & 1 == 0 && set.contains(negate_flat(b)))
}

/// Indices of contradictory components of a decomposition.
pub fn contradictory_components(d: &Decomposition) -> Vec<usize> {
    d.contradictory_indices()
}

/// Product form: every type touched by the set appears with *both* signs.
/// Contradictory components always satisfy this — the support digraph of an
/// implication digraphon mirrors every arc (`x → y` ⇔ `¬y → ¬x`), so
/// negation maps strongly connected sets to strongly connected sets, and a
/// component meeting its own negation must equal it.
pub fn check_product_form(set: &BlockSet) -> bool {
    set.iter().all(|b| set.contains(negate_flat(b)))
}
