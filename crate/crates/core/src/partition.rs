//! Set partitions over an explicit ground set, the refinement lattice,
//! totally ordered chains (Epstein-Glaser forests), their decomposition and
//! interleaving, and Zimmermann forests of non-overlapping vertex subsets.

use crate::graph::{full_vertex_part, Graph, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type Block = BTreeSet<VertexId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("enumeration size {0} exceeds the cap {1}")]
    CapExceeded(usize, usize),
    #[error("partitions live on different ground sets")]
    GroundSetMismatch,
    #[error("blocks are not disjoint, nonempty and covering")]
    InvalidBlocks,
    #[error("forest is not normal (it contains the coarsest partition)")]
    NotNormal,
    #[error("ground sets overlap")]
    OverlappingGroundSets,
    #[error("partition does not belong to the forest")]
    NotInForest,
    #[error("list of partitions is not a strictly increasing chain from the finest")]
    NotAChain,
}

/// Default enumeration cap: Bell(10) = 115975 partitions.
pub const DEFAULT_PARTITION_CAP: usize = 10;

/// Default cap for Epstein-Glaser forest enumeration (chains explode faster
/// than partitions).
pub const DEFAULT_FOREST_CAP: usize = 7;

/// A partition of a finite ground set into nonempty disjoint blocks.
/// Canonical form: blocks sorted by least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<Block>,
}

impl Partition {
    pub fn from_blocks(mut blocks: Vec<Block>) -> Result<Partition, PartitionError> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(PartitionError::InvalidBlocks);
            }
            for v in b {
                if !seen.insert(*v) {
                    return Err(PartitionError::InvalidBlocks);
                }
            }
        }
        blocks.sort_by_key(|b| *b.first().expect("nonempty"));
        Ok(Partition { blocks })
    }

    pub fn singletons(ground: &Block) -> Partition {
        Partition { blocks: ground.iter().map(|v| BTreeSet::from([*v])).collect() }
    }

    pub fn one_block(ground: &Block) -> Partition {
        Partition { blocks: vec![ground.clone()] }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground_set(&self) -> Block {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn is_finest(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_coarsest(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn block_of(&self, v: VertexId) -> Option<&Block> {
        self.blocks.iter().find(|b| b.contains(&v))
    }

    /// True iff every block of `self` lies inside some block of `other`
    /// (self is finer, self ≤ other).
    pub fn refines(&self, other: &Partition) -> Result<bool, PartitionError> {
        if self.ground_set() != other.ground_set() {
            return Err(PartitionError::GroundSetMismatch);
        }
        Ok(self
            .blocks
            .iter()
            .all(|b| other.block_of(*b.first().expect("nonempty")).is_some_and(|ob| b.is_subset(ob))))
    }

    /// Least upper bound: overlapping blocks merged transitively.
    pub fn join(&self, other: &Partition) -> Result<Partition, PartitionError> {
        if self.ground_set() != other.ground_set() {
            return Err(PartitionError::GroundSetMismatch);
        }
        let ground = self.ground_set();
        let mut parent: BTreeMap<VertexId, VertexId> = ground.iter().map(|v| (*v, *v)).collect();
        fn find(parent: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
            let p = parent[&v];
            if p == v {
                v
            } else {
                let r = find(parent, p);
                parent.insert(v, r);
                r
            }
        }
        for b in self.blocks.iter().chain(other.blocks.iter()) {
            let first = *b.first().expect("nonempty");
            for v in b {
                let r1 = find(&mut parent, first);
                let r2 = find(&mut parent, *v);
                if r1 != r2 {
                    parent.insert(r1, r2);
                }
            }
        }
        let mut groups: BTreeMap<VertexId, Block> = BTreeMap::new();
        for v in &ground {
            let r = find(&mut parent, *v);
            groups.entry(r).or_default().insert(*v);
        }
        Partition::from_blocks(groups.into_values().collect())
    }

    /// Greatest lower bound: nonempty pairwise block intersections.
    pub fn meet(&self, other: &Partition) -> Result<Partition, PartitionError> {
        if self.ground_set() != other.ground_set() {
            return Err(PartitionError::GroundSetMismatch);
        }
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &other.blocks {
                let i: Block = a.intersection(b).copied().collect();
                if !i.is_empty() {
                    blocks.push(i);
                }
            }
        }
        Partition::from_blocks(blocks)
    }

    /// Restriction to a subset of the ground set.
    pub fn restrict(&self, sub: &Block) -> Partition {
        let blocks = self
            .blocks
            .iter()
            .filter_map(|b| {
                let i: Block = b.intersection(sub).copied().collect();
                (!i.is_empty()).then_some(i)
            })
            .collect();
        Partition { blocks }
    }

    /// Disjoint-ground-set union of two partitions.
    pub fn disjoint_union(&self, other: &Partition) -> Result<Partition, PartitionError> {
        if !self.ground_set().is_disjoint(&other.ground_set()) {
            return Err(PartitionError::OverlappingGroundSets);
        }
        Partition::from_blocks(self.blocks.iter().chain(other.blocks.iter()).cloned().collect())
    }

    /// Multiset of block sizes, descending.
    pub fn shape(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// All partitions of {1..n}, canonically ordered (blocks sorted by minimum,
/// partitions lexicographically by that representation).
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>, PartitionError> {
    enumerate_partitions_capped(n, DEFAULT_PARTITION_CAP)
}

pub fn enumerate_partitions_capped(n: usize, cap: usize) -> Result<Vec<Partition>, PartitionError> {
    if n > cap {
        return Err(PartitionError::CapExceeded(n, cap));
    }
    let ground: Block = (1..=n as VertexId).collect();
    Ok(enumerate_partitions_of(&ground))
}

/// All partitions of an arbitrary ground set (no cap; internal use and small
/// sets).
pub fn enumerate_partitions_of(ground: &Block) -> Vec<Partition> {
    let items: Vec<VertexId> = ground.iter().copied().collect();
    let mut out: Vec<Vec<Block>> = vec![Vec::new()];
    for v in items {
        let mut next = Vec::new();
        for blocks in out {
            for i in 0..blocks.len() {
                let mut b = blocks.clone();
                b[i].insert(v);
                next.push(b);
            }
            let mut b = blocks;
            b.push(BTreeSet::from([v]));
            next.push(b);
        }
        out = next;
    }
    let mut parts: Vec<Partition> = out
        .into_iter()
        .map(|blocks| Partition::from_blocks(blocks).expect("construction is valid"))
        .collect();
    parts.sort();
    parts
}

/// Partitions of V(g) whose every block induces a connected full vertex part;
/// singleton blocks count as connected.
pub fn connected_partitions(g: &Graph) -> Vec<Partition> {
    enumerate_partitions_of(&g.vertex_set())
        .into_iter()
        .filter(|p| {
            p.blocks().iter().all(|b| {
                b.len() == 1 || full_vertex_part(g, b).map(|s| s.is_connected()).unwrap_or(false)
            })
        })
        .collect()
}

/// An Epstein-Glaser forest: a totally ordered set of partitions containing
/// the finest one. Stored finest-first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EgForest {
    chain: Vec<Partition>,
}

impl EgForest {
    /// Build from a finest-first strictly increasing chain that starts at the
    /// finest partition of its ground set.
    pub fn new(chain: Vec<Partition>) -> Result<EgForest, PartitionError> {
        if chain.is_empty() || !chain[0].is_finest() {
            return Err(PartitionError::NotAChain);
        }
        for w in chain.windows(2) {
            if !(w[0].refines(&w[1])? && w[0] != w[1]) {
                return Err(PartitionError::NotAChain);
            }
        }
        Ok(EgForest { chain })
    }

    pub fn trivial(ground: &Block) -> EgForest {
        EgForest { chain: vec![Partition::singletons(ground)] }
    }

    /// Finest-first chain.
    pub fn chain(&self) -> &[Partition] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        false // an EG forest always contains the finest partition
    }

    pub fn ground_set(&self) -> Block {
        self.chain[0].ground_set()
    }

    pub fn coarsest(&self) -> &Partition {
        self.chain.last().expect("nonempty")
    }

    /// Contains the coarsest one-block partition. The one-vertex forest is
    /// full by convention.
    pub fn is_full(&self) -> bool {
        self.coarsest().is_coarsest()
    }

    pub fn is_normal(&self) -> bool {
        !self.is_full()
    }

    /// Maximal as a totally ordered subset of the partition lattice: the
    /// chain steps through every block count n, n−1, ..., 1.
    pub fn is_maximal(&self) -> bool {
        self.chain.len() == self.ground_set().len()
    }

    /// pos(p) = |{q in forest : p ≤ q}|; the coarsest element has position 1.
    pub fn chain_position(&self, p: &Partition) -> Result<usize, PartitionError> {
        let idx = self.chain.iter().position(|q| q == p).ok_or(PartitionError::NotInForest)?;
        Ok(self.chain.len() - idx)
    }

    /// The full forest obtained by adjoining the coarsest partition.
    pub fn to_full(&self) -> EgForest {
        if self.is_full() {
            return self.clone();
        }
        let mut chain = self.chain.clone();
        chain.push(Partition::one_block(&self.ground_set()));
        EgForest { chain }
    }

    /// Drop the coarsest partition of a full forest (n ≥ 2).
    pub fn to_normal(&self) -> Result<EgForest, PartitionError> {
        if !self.is_full() || self.chain.len() == 1 {
            return Err(PartitionError::NotAChain);
        }
        Ok(EgForest { chain: self.chain[..self.chain.len() - 1].to_vec() })
    }

    /// Union of all member partitions, as a set of blocks — by total
    /// ordering this is always a Zimmermann forest.
    pub fn union_of_blocks(&self) -> BTreeSet<Block> {
        self.chain.iter().flat_map(|p| p.blocks().iter().cloned()).collect()
    }

    /// True when some non-singleton block appears in two adjacent levels of
    /// the chain. Of all chains sharing one set of blocks, exactly the one
    /// without such repetitions assembles every block one level before its
    /// use; the others re-subtract a block that is already a finished local
    /// insertion.
    pub fn has_repeated_block(&self) -> bool {
        self.chain.windows(2).any(|w| {
            w[0].blocks().iter().any(|b| b.len() > 1 && w[1].blocks().contains(b))
        })
    }
}

/// All EG forests on {1..n}.
pub fn enumerate_eg_forests(n: usize) -> Result<Vec<EgForest>, PartitionError> {
    enumerate_eg_forests_capped(n, DEFAULT_FOREST_CAP)
}

pub fn enumerate_eg_forests_capped(n: usize, cap: usize) -> Result<Vec<EgForest>, PartitionError> {
    if n > cap {
        return Err(PartitionError::CapExceeded(n, cap));
    }
    let ground: Block = (1..=n as VertexId).collect();
    Ok(enumerate_eg_forests_of(&ground))
}

/// All EG forests on an arbitrary ground set: chains above the finest
/// partition, enumerated by depth-first extension over a precomputed
/// refinement relation.
pub fn enumerate_eg_forests_of(ground: &Block) -> Vec<EgForest> {
    let all = enumerate_partitions_of(ground);
    let finest = Partition::singletons(ground);
    let finest_idx = all.iter().position(|p| *p == finest).expect("finest is enumerated");
    // coarser[i] = indices of partitions strictly coarser than all[i]
    let coarser: Vec<Vec<usize>> = all
        .iter()
        .map(|p| {
            all.iter()
                .enumerate()
                .filter(|(_, q)| *q != p && p.refines(q).expect("same ground"))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chain = vec![finest_idx];
    extend_chains(&all, &coarser, &mut chain, &mut out);
    out.sort();
    out
}

fn extend_chains(all: &[Partition], coarser: &[Vec<usize>], chain: &mut Vec<usize>, out: &mut Vec<EgForest>) {
    out.push(EgForest { chain: chain.iter().map(|i| all[*i].clone()).collect() });
    let top = *chain.last().expect("nonempty");
    for j in &coarser[top] {
        chain.push(*j);
        extend_chains(all, coarser, chain, out);
        chain.pop();
    }
}

/// Decompose a normal forest into its full component forests, one per block
/// of the coarsest partition (Cor whose content: at least two of them).
pub fn decompose_normal_forest(f: &EgForest) -> Result<Vec<EgForest>, PartitionError> {
    if f.is_full() {
        return Err(PartitionError::NotNormal);
    }
    let mut out = Vec::new();
    for block in f.coarsest().blocks() {
        let mut chain: Vec<Partition> = Vec::new();
        for p in f.chain() {
            let r = p.restrict(block);
            if chain.last() != Some(&r) {
                chain.push(r);
            }
        }
        out.push(EgForest::new(chain)?);
    }
    debug_assert!(out.len() >= 2);
    Ok(out)
}

/// All normal forests on the union ground set that restrict componentwise to
/// the given full forests: shuffles of the component chains in which every
/// step advances a nonempty set of components by one partition each.
pub fn interleave(forests: &[EgForest]) -> Result<Vec<EgForest>, PartitionError> {
    for (i, a) in forests.iter().enumerate() {
        for b in &forests[i + 1..] {
            if !a.ground_set().is_disjoint(&b.ground_set()) {
                return Err(PartitionError::OverlappingGroundSets);
            }
        }
    }
    let k = forests.len();
    let lens: Vec<usize> = forests.iter().map(|f| f.len()).collect();
    let mut results = Vec::new();
    let mut positions = vec![0usize; k];
    let mut chain: Vec<Vec<usize>> = vec![positions.clone()];
    fn merged(forests: &[EgForest], pos: &[usize]) -> Partition {
        let mut blocks = Vec::new();
        for (f, p) in forests.iter().zip(pos) {
            blocks.extend(f.chain()[*p].blocks().iter().cloned());
        }
        Partition::from_blocks(blocks).expect("disjoint grounds")
    }
    fn recurse(
        forests: &[EgForest],
        lens: &[usize],
        positions: &mut Vec<usize>,
        chain: &mut Vec<Vec<usize>>,
        results: &mut Vec<EgForest>,
    ) {
        if positions.iter().zip(lens).all(|(p, l)| *p == l - 1) {
            let parts: Vec<Partition> = chain.iter().map(|pos| merged(forests, pos)).collect();
            results.push(EgForest::new(parts).expect("valid shuffle chain"));
            return;
        }
        // advance every nonempty subset of the components that still can move
        let movable: Vec<usize> =
            (0..forests.len()).filter(|i| positions[*i] + 1 < lens[*i]).collect();
        for mask in 1..(1u32 << movable.len()) {
            let mut advanced = Vec::new();
            for (bit, comp) in movable.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    positions[*comp] += 1;
                    advanced.push(*comp);
                }
            }
            chain.push(positions.clone());
            recurse(forests, lens, positions, chain, results);
            chain.pop();
            for comp in advanced {
                positions[comp] -= 1;
            }
        }
    }
    recurse(forests, &lens, &mut positions, &mut chain, &mut results);
    results.sort();
    results.dedup();
    Ok(results)
}

/// A Zimmermann forest: a family of pairwise non-overlapping vertex subsets
/// of a graph, each taken as its full vertex part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ZimForest {
    pub members: BTreeSet<Block>,
}

fn non_overlapping(a: &Block, b: &Block) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

impl ZimForest {
    pub fn is_valid(&self) -> bool {
        let ms: Vec<&Block> = self.members.iter().collect();
        ms.iter().enumerate().all(|(i, a)| ms[i + 1..].iter().all(|b| non_overlapping(a, b)))
    }

    /// Maximal within the family of all Zimmermann forests over the same
    /// vertex set (unrestricted members).
    pub fn is_maximal(&self, ground: &Block) -> bool {
        all_nonempty_subsets(ground)
            .into_iter()
            .all(|cand| self.members.contains(&cand) || !self.members.iter().all(|m| non_overlapping(m, &cand)))
    }
}

fn all_nonempty_subsets(ground: &Block) -> Vec<Block> {
    let items: Vec<VertexId> = ground.iter().copied().collect();
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let s: Block = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect();
        out.push(s);
    }
    out
}

/// Check the recursive split structure of a maximal forest: for every member
/// (and the whole ground set), the maximal proper members below it pair up
/// with their vertex complements inside it.
pub fn maximal_forest_split_ok(u: &ZimForest, ground: &Block) -> bool {
    let mut wholes: Vec<Block> = u.members.iter().cloned().collect();
    wholes.push(ground.clone());
    wholes.sort();
    wholes.dedup();
    for g in &wholes {
        if g.len() <= 1 {
            continue;
        }
        let below: Vec<&Block> = u.members.iter().filter(|m| m.is_subset(g) && *m != g).collect();
        let maximal: Vec<&Block> =
            below.iter().filter(|m| !below.iter().any(|o| m.is_subset(o) && *o != **m)).copied().collect();
        // every maximal element must have its complement in the forest
        for m in &maximal {
            let comp: Block = g.difference(m).copied().collect();
            if !comp.is_empty() && !u.members.contains(&comp) {
                return false;
            }
        }
    }
    true
}

/// All Zimmermann forests of a graph, i.e. all laminar families of nonempty
/// vertex subsets (each standing for its full vertex part), the empty family
/// included. When `restricted`, only members that are connected with
/// divergence degree ≥ 0 in dimension `d` are allowed.
pub fn zimmermann_forests(g: &Graph, restricted: bool, d: i64) -> Vec<ZimForest> {
    let ground = g.vertex_set();
    let candidates: Vec<Block> = all_nonempty_subsets(&ground)
        .into_iter()
        .filter(|s| {
            if !restricted {
                return true;
            }
            let Ok(sub) = full_vertex_part(g, s) else { return false };
            if !sub.is_connected() {
                return false;
            }
            crate::graph::divergence_degree(&sub, d, 0).map(|(v, _)| v >= 0).unwrap_or(false)
        })
        .collect();
    let mut out = vec![ZimForest { members: BTreeSet::new() }];
    let mut stack: Vec<(usize, BTreeSet<Block>)> = vec![(0, BTreeSet::new())];
    while let Some((start, members)) = stack.pop() {
        for i in start..candidates.len() {
            let c = &candidates[i];
            if members.iter().all(|m| non_overlapping(m, c)) {
                let mut next = members.clone();
                next.insert(c.clone());
                out.push(ZimForest { members: next.clone() });
                stack.push((i + 1, next));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Bell numbers (exact, for test oracles).
pub fn bell_number(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 1..=n {
        let mut next = vec![*row.last().expect("nonempty")];
        for v in &row {
            let last = *next.last().expect("nonempty");
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}
