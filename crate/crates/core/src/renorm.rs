//! Minimal-subtraction operators on partitions, the counterterm recursion,
//! the Epstein-Glaser forest formula with its maximal-forest resummation,
//! prepared amplitudes, and the one-dimensional redundant-projection
//! experiment — all generic over an amplitude provider.

use crate::amplitude::{block_amplitude, reduce_weighted_graph, AmplitudeError, SpGraph};
use crate::extend::{analytic_ms_1d, ExtendError};
use crate::graph::{contract_with_map, full_vertex_part, VertexId};
use crate::laurent::{LaurentError, LaurentSeries, Q};
use crate::partition::{
    enumerate_eg_forests_of, enumerate_partitions_of, Block, EgForest, Partition, PartitionError,
};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormError {
    #[error("order {0} exceeds the cap {1}")]
    CapExceeded(usize, usize),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Amplitude(#[from] AmplitudeError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

/// Cap on the order of the partition-indexed recursions.
pub const ORDER_CAP: usize = 8;

/// Cap on the order of the forest-sum evaluators: the chain count grows from
/// 18024 at seven vertices to tens of millions at eight.
pub const FOREST_ORDER_CAP: usize = 7;

/// An analytically regularized amplitude source: the value of the quotient
/// of a vertex subset by one of its partitions (blocks as vertices), as a
/// Laurent series. The bare value of a subset is the quotient by its
/// singletons; one-vertex subsets must give the unit series.
pub trait AmplitudeProvider {
    fn ground_set(&self) -> Block;

    /// Amplitude of γ_ground / p (blocks of `p` as vertices).
    fn quotient_series(&self, ground: &Block, p: &Partition) -> Result<LaurentSeries, RenormError>;

    /// The bare amplitude of the full vertex part on `ground`.
    fn bare_series(&self, ground: &Block) -> Result<LaurentSeries, RenormError> {
        self.quotient_series(ground, &Partition::singletons(ground))
    }

    /// True when the full vertex part on `block` is disconnected, in which
    /// case its subtraction vanishes (disconnected principal parts carry no
    /// local counterterm).
    fn block_is_disconnected(&self, block: &Block) -> bool;

    /// A memoization key for nested chain evaluations; providers whose
    /// values depend on less than the exact subset (e.g. only on sizes) can
    /// collapse the key space.
    fn cache_key(&self, ground: &Block, chain: &[Partition]) -> String {
        let mut s = String::new();
        for v in ground {
            s.push_str(&v.to_string());
            s.push(',');
        }
        s.push('|');
        for p in chain {
            for b in p.blocks() {
                for v in b {
                    s.push_str(&v.to_string());
                    s.push(',');
                }
                s.push(';');
            }
            s.push('|');
        }
        s
    }
}

/// Scalar toy provider: values depend only on the number of blocks, through
/// a user-supplied family f_1 = 1, f_2, f_3, ... of Laurent series.
#[derive(Debug, Clone)]
pub struct ScalarToy {
    pub f: Vec<LaurentSeries>,
    n: usize,
}

impl ScalarToy {
    /// `f[k]` is the value at k+1 vertices; f[0] must be the unit series.
    pub fn new(n: usize, f: Vec<LaurentSeries>) -> Self {
        assert!(f.len() >= n, "need a value for every order up to n");
        assert!(
            f[0].eq_on_common_window(&LaurentSeries::one(f[0].trunc())),
            "the one-vertex value must be the unit series"
        );
        ScalarToy { f, n }
    }

    fn value(&self, k: usize) -> LaurentSeries {
        self.f[k - 1].clone()
    }
}

impl AmplitudeProvider for ScalarToy {
    fn ground_set(&self) -> Block {
        (1..=self.n as VertexId).collect()
    }

    fn quotient_series(&self, _ground: &Block, p: &Partition) -> Result<LaurentSeries, RenormError> {
        Ok(self.value(p.n_blocks()))
    }

    fn block_is_disconnected(&self, _block: &Block) -> bool {
        false
    }

    fn cache_key(&self, ground: &Block, chain: &[Partition]) -> String {
        // values depend only on the nested shape tree of the chain
        shape_signature(ground, chain)
    }
}

/// Recursive shape signature of a restricted chain: the ground size and the
/// sorted signatures of the coarsest partition's blocks with their
/// restricted subchains. Two chains with equal signatures evaluate alike
/// under any size-only provider.
fn shape_signature(ground: &Block, chain: &[Partition]) -> String {
    if chain.len() <= 1 {
        return format!("{}", ground.len());
    }
    let coarsest = chain.last().expect("nonempty");
    let mut children: Vec<String> = coarsest
        .blocks()
        .iter()
        .map(|b| {
            let mut sub: Vec<Partition> = Vec::new();
            for p in &chain[..chain.len() - 1] {
                let r = p.restrict(b);
                if sub.last() != Some(&r) {
                    sub.push(r);
                }
            }
            shape_signature(b, &sub)
        })
        .collect();
    children.sort();
    format!("{}({})", ground.len(), children.join(","))
}

/// Series-parallel model: quotient and block values through the solvable
/// Euclidean backend, paired at t = 1 with the log-scale kept symbolic.
#[derive(Debug, Clone)]
pub struct SpModel {
    pub sp: SpGraph,
    pub d: u32,
    pub order: i32,
    pub zeta_cap: u32,
}

impl SpModel {
    pub fn new(sp: SpGraph, d: u32, order: i32) -> Self {
        SpModel { sp, d, order, zeta_cap: crate::laurent::DEFAULT_ZETA_CAP }
    }

    pub fn with_zeta_cap(mut self, cap: u32) -> Self {
        self.zeta_cap = cap;
        self
    }

    fn ctx(&self) -> crate::laurent::SeriesCtx {
        crate::laurent::SeriesCtx { trunc: self.order, zeta_cap: self.zeta_cap }
    }
}

impl AmplitudeProvider for SpModel {
    fn ground_set(&self) -> Block {
        self.sp.graph.vertex_set()
    }

    fn quotient_series(&self, ground: &Block, p: &Partition) -> Result<LaurentSeries, RenormError> {
        if ground.len() == 1 {
            return Ok(LaurentSeries::one(self.order));
        }
        let sub = full_vertex_part(&self.sp.graph, ground).map_err(AmplitudeError::from)?;
        let sub_graph = sub.to_graph();
        let mults: Vec<Q> = sub.edge_set.iter().map(|i| self.sp.multipliers[*i].clone()).collect();
        let (quotient_graph, surviving) = contract_with_map(&sub_graph, p).map_err(AmplitudeError::from)?;
        let q_mults: Vec<Q> = surviving.iter().map(|i| mults[*i].clone()).collect();
        if quotient_graph.n_vertices() == 1 {
            return Ok(LaurentSeries::one(self.order));
        }
        // terminals of the quotient: the images of the subset's own
        // terminals per the block convention; degenerate cases fall back to
        // the first distinct pair
        let (lo, hi) = crate::amplitude::block_terminals(&self.sp, ground);
        let idx = |v: VertexId| -> VertexId {
            p.blocks()
                .iter()
                .position(|b| b.contains(&v))
                .map(|i| i as VertexId + 1)
                .expect("partition covers the ground set")
        };
        let t1 = idx(lo);
        let mut t2 = idx(hi);
        if t1 == t2 {
            t2 = (1..=p.n_blocks() as VertexId).find(|i| *i != t1).unwrap_or(t1);
        }
        let cf = reduce_weighted_graph(&quotient_graph, &q_mults, self.d, (t1, t2), "quotient")?;
        let (_, series) = crate::amplitude::evaluate_pairing_ctx(&cf, &self.ctx())?;
        Ok(series)
    }

    fn bare_series(&self, ground: &Block) -> Result<LaurentSeries, RenormError> {
        if ground.len() == 1 {
            return Ok(LaurentSeries::one(self.order));
        }
        let cf = block_amplitude(&self.sp, ground, self.d)?;
        let (_, series) = crate::amplitude::evaluate_pairing_ctx(&cf, &self.ctx())?;
        Ok(series)
    }

    fn block_is_disconnected(&self, block: &Block) -> bool {
        if block.len() == 1 {
            return false;
        }
        full_vertex_part(&self.sp.graph, block)
            .map(|s| !s.is_connected())
            .unwrap_or(true)
    }
}

/// The per-block minimal subtraction: identity on one-vertex blocks, −pp on
/// everything larger.
pub fn ms_block(a: &LaurentSeries, size: usize) -> LaurentSeries {
    if size == 1 {
        a.clone()
    } else {
        a.pp().neg()
    }
}

/// One −T operator applied to the bare amplitude:
/// quotient(P) · Π_I R_{|I|}(bare(I)).
pub fn apply_t<P: AmplitudeProvider>(provider: &P, p: &Partition) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    let trunc = provider.bare_series(&ground)?.trunc();
    let mut factors = Vec::new();
    for block in p.blocks() {
        if block.len() == 1 {
            continue; // R_1 is the identity on the unit
        }
        if provider.block_is_disconnected(block) {
            return Ok(LaurentSeries::zero(trunc));
        }
        let r = ms_block(&provider.bare_series(block)?, block.len());
        if r.is_zero() {
            return Ok(LaurentSeries::zero(trunc));
        }
        factors.push(r);
    }
    let mut out = provider.quotient_series(&ground, p)?;
    for f in factors {
        out = out.mul(&f)?;
    }
    Ok(out)
}

/// Counterterm table: the Z value of every vertex subset (for providers that
/// only see sizes the entries coincide across equal-size subsets).
#[derive(Debug, Clone)]
pub struct CountertermTable {
    pub entries: BTreeMap<Vec<VertexId>, LaurentSeries>,
}

impl CountertermTable {
    pub fn get(&self, block: &Block) -> Option<&LaurentSeries> {
        self.entries.get(&block.iter().copied().collect::<Vec<_>>())
    }

    /// ScalarToy-style lookup by size (first subset of that size).
    pub fn by_size(&self, size: usize) -> Option<&LaurentSeries> {
        self.entries.iter().find(|(k, _)| k.len() == size).map(|(_, v)| v)
    }
}

/// The counterterm recursion: Z(S) = −pp Σ_{P ∈ Part(S) ∖ {S}}
/// quotient(S/P) · Π_I Z(I), with Z = unit on single vertices and zero on
/// disconnected subsets.
pub fn bph_counterterms<P: AmplitudeProvider>(
    provider: &P,
    order_cap: usize,
) -> Result<CountertermTable, RenormError> {
    let ground = provider.ground_set();
    if ground.len() > order_cap {
        return Err(RenormError::CapExceeded(ground.len(), order_cap));
    }
    let mut entries: BTreeMap<Vec<VertexId>, LaurentSeries> = BTreeMap::new();
    let mut subsets: Vec<Block> = all_nonempty_subsets(&ground);
    subsets.sort_by_key(|s| s.len());
    let trunc = provider.bare_series(&ground)?.trunc();
    for s in subsets {
        let key: Vec<VertexId> = s.iter().copied().collect();
        if s.len() == 1 {
            entries.insert(key, LaurentSeries::one(trunc));
            continue;
        }
        if provider.block_is_disconnected(&s) {
            entries.insert(key, LaurentSeries::zero(trunc));
            continue;
        }
        let mut sum = LaurentSeries::zero(trunc);
        for p in enumerate_partitions_of(&s) {
            if p.is_coarsest() {
                continue;
            }
            let mut zs = Vec::new();
            let mut vanished = false;
            for b in p.blocks() {
                if b.len() == 1 {
                    continue;
                }
                let z = entries
                    .get(&b.iter().copied().collect::<Vec<_>>())
                    .expect("smaller subsets already computed");
                if z.is_zero() {
                    vanished = true;
                    break;
                }
                zs.push(z.clone());
            }
            if vanished {
                continue;
            }
            let mut term = provider.quotient_series(&s, &p)?;
            for z in zs {
                term = term.mul(&z)?;
            }
            sum = sum.add(&term)?;
        }
        entries.insert(key, sum.pp().neg());
    }
    Ok(CountertermTable { entries })
}

/// The fully renormalized value assembled from the counterterm table:
/// Σ_{P ∈ Part(V)} quotient(V/P) · Π_I Z(I).
pub fn assemble_from_counterterms<P: AmplitudeProvider>(
    provider: &P,
    table: &CountertermTable,
) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    let trunc = provider.bare_series(&ground)?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    for p in enumerate_partitions_of(&ground) {
        let mut zs = Vec::new();
        let mut vanished = false;
        for b in p.blocks() {
            if b.len() == 1 {
                continue;
            }
            let z = table.get(b).expect("table covers all subsets");
            if z.is_zero() {
                vanished = true;
                break;
            }
            zs.push(z.clone());
        }
        if vanished {
            continue;
        }
        let mut term = provider.quotient_series(&ground, &p)?;
        for z in zs {
            term = term.mul(&z)?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// The nested value of one Epstein-Glaser forest: working down from the
/// coarsest partition, each block's subtracted subchain is evaluated as a
/// full Laurent object before the enclosing projection applies.
pub fn forest_term<P: AmplitudeProvider>(provider: &P, forest: &EgForest) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    if forest.has_repeated_block() {
        return Ok(LaurentSeries::zero(provider.bare_series(&ground)?.trunc()));
    }
    let mut memo: HashMap<String, LaurentSeries> = HashMap::new();
    nested_value(provider, &ground, forest.chain(), &mut memo, true)
}

/// Value of the subchain on `ground` whose coarsest element subtracts its
/// blocks. `top_level`: the outermost call evaluates the quotient by the
/// coarsest partition without a projection (the overall R sits with the
/// forest's full/normal split, not here).
fn nested_value<P: AmplitudeProvider>(
    provider: &P,
    ground: &Block,
    chain: &[Partition],
    memo: &mut HashMap<String, LaurentSeries>,
    top_level: bool,
) -> Result<LaurentSeries, RenormError> {
    debug_assert!(!chain.is_empty());
    let key = provider.cache_key(ground, chain);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    let coarsest = chain.last().expect("nonempty chain");
    let value = if chain.len() == 1 {
        // the finest partition: the bare amplitude, all R_1
        debug_assert!(coarsest.is_finest());
        provider.bare_series(ground)?
    } else {
        // subtract the blocks first: a vanishing factor (disconnected block
        // or redundant re-subtraction) kills the term before the quotient
        // is ever evaluated
        let mut factors: Vec<LaurentSeries> = Vec::new();
        let mut dead = false;
        for block in coarsest.blocks() {
            if block.len() == 1 {
                continue;
            }
            if provider.block_is_disconnected(block) {
                dead = true;
                break;
            }
            // restrict the chain below the coarsest element to this block,
            // dropping duplicate consecutive restrictions
            let mut sub: Vec<Partition> = Vec::new();
            for p in &chain[..chain.len() - 1] {
                let r = p.restrict(block);
                if sub.last() != Some(&r) {
                    sub.push(r);
                }
            }
            // a block that already completed one level below is a finished
            // local insertion: subtracting it again finds no pole, and the
            // whole chain contributes nothing
            if sub.len() > 1 && sub.last() == Some(&Partition::one_block(block)) {
                dead = true;
                break;
            }
            let inner = nested_value(provider, block, &sub, memo, false)?;
            let r = inner.pp().neg();
            if r.is_zero() {
                dead = true;
                break;
            }
            factors.push(r);
        }
        if dead {
            LaurentSeries::zero(provider.bare_series(ground)?.trunc())
        } else {
            let mut out = provider.quotient_series(ground, coarsest)?;
            for f in factors {
                out = out.mul(&f)?;
            }
            out
        }
    };
    let _ = top_level;
    memo.insert(key, value.clone());
    Ok(value)
}

fn all_nonempty_subsets(ground: &Block) -> Vec<Block> {
    let items: Vec<VertexId> = ground.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| *v)
                .collect(),
        );
    }
    out
}

/// The forest formula: Σ over all Epstein-Glaser forests of the nested
/// product of subtraction operators, coarsest leftmost.
pub fn forest_formula<P: AmplitudeProvider>(provider: &P) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    if ground.len() > FOREST_ORDER_CAP {
        return Err(RenormError::CapExceeded(ground.len(), FOREST_ORDER_CAP));
    }
    let forests = enumerate_eg_forests_of(&ground);
    let trunc = provider.bare_series(&ground)?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    let mut memo: HashMap<String, LaurentSeries> = HashMap::new();
    for f in forests.iter().filter(|f| !f.has_repeated_block()) {
        let term = nested_value(provider, &ground, f.chain(), &mut memo, true)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// The prepared amplitude: the sum over all normal forests only (no overall
/// subtraction); for a single vertex the bare value.
pub fn prepared_amplitude<P: AmplitudeProvider>(provider: &P) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    if ground.len() > FOREST_ORDER_CAP {
        return Err(RenormError::CapExceeded(ground.len(), FOREST_ORDER_CAP));
    }
    if ground.len() == 1 {
        return provider.bare_series(&ground);
    }
    let forests = enumerate_eg_forests_of(&ground);
    let trunc = provider.bare_series(&ground)?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    let mut memo: HashMap<String, LaurentSeries> = HashMap::new();
    for f in forests.iter().filter(|f| f.is_normal() && !f.has_repeated_block()) {
        let term = nested_value(provider, &ground, f.chain(), &mut memo, true)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// The maximal-forest resummation: inclusion-exclusion over nonempty
/// intersections of maximal forests with (1 − T) factors. Equal
/// intersections are grouped; their net signed weights solve the triangular
/// system Σ_{C' ⊇ C} w(C') = 1 over the family of realized intersections.
pub fn maximal_forest_form<P: AmplitudeProvider>(provider: &P) -> Result<LaurentSeries, RenormError> {
    let ground = provider.ground_set();
    if ground.len() > FOREST_ORDER_CAP {
        return Err(RenormError::CapExceeded(ground.len(), FOREST_ORDER_CAP));
    }
    let forests = enumerate_eg_forests_of(&ground);
    let maximal: Vec<&EgForest> = forests.iter().filter(|f| f.is_maximal()).collect();
    // the family of chains realized as intersections of maximal forests,
    // closed under pairwise intersection
    let mut family: BTreeSet<Vec<Partition>> = maximal.iter().map(|f| f.chain().to_vec()).collect();
    loop {
        let mut added = false;
        let current: Vec<Vec<Partition>> = family.iter().cloned().collect();
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                let inter: Vec<Partition> =
                    a.iter().filter(|p| b.contains(p)).cloned().collect();
                if !inter.is_empty() && family.insert(inter) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    // net inclusion-exclusion weight per realized intersection: for every
    // member C, Σ over subsets of maximal forests whose intersection
    // contains C is 1, so w solves the triangular system from coarse to fine
    let members: Vec<Vec<Partition>> = {
        let mut v: Vec<Vec<Partition>> = family.into_iter().collect();
        v.sort_by_key(|c| std::cmp::Reverse(c.len()));
        v
    };
    let mut weights: Vec<i64> = vec![0; members.len()];
    for i in 0..members.len() {
        let mut w: i64 = 1;
        for j in 0..i {
            if members[i].iter().all(|p| members[j].contains(p)) {
                w -= weights[j];
            }
        }
        weights[i] = w;
    }
    // each intersection contributes its (1 − T)-product: the sum of all
    // sub-forests of the chain
    let trunc = provider.bare_series(&ground)?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    let mut memo: HashMap<String, LaurentSeries> = HashMap::new();
    for (chain, w) in members.iter().zip(&weights) {
        if *w == 0 {
            continue;
        }
        let mut chain_sum = LaurentSeries::zero(trunc);
        for forest in sub_forests(chain) {
            if forest.has_repeated_block() {
                continue;
            }
            let term = nested_value(provider, &ground, forest.chain(), &mut memo, true)?;
            chain_sum = chain_sum.add(&term)?;
        }
        out = out.add(&chain_sum.scale_q(&Q::from_integer((*w).into())))?;
    }
    Ok(out)
}

/// All Epstein-Glaser forests contained in a chain (the chain must contain
/// the finest partition, which every forest keeps).
fn sub_forests(chain: &[Partition]) -> Vec<EgForest> {
    let finest_idx = chain.iter().position(|p| p.is_finest()).expect("chains contain the finest");
    let others: Vec<&Partition> = chain.iter().enumerate().filter(|(i, _)| *i != finest_idx).map(|(_, p)| p).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << others.len()) {
        let mut sel: Vec<Partition> = vec![chain[finest_idx].clone()];
        for (bit, p) in others.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                sel.push((*p).clone());
            }
        }
        sel.sort_by(|a, b| b.n_blocks().cmp(&a.n_blocks()));
        out.push(EgForest::new(sel).expect("subset of a chain is a chain"));
    }
    out
}

/// Result of the one-dimensional redundant-projection experiment.
#[derive(Debug, Clone)]
pub struct RedundantProjectionReport {
    /// (ζ, |lhs − rhs|) over the grid.
    pub residuals: Vec<(f64, f64)>,
    /// Fitted vanishing order of the residual in ζ.
    pub fitted_order: f64,
    /// |unsubtracted pairing| at the smallest grid ζ (pole included).
    pub scale: f64,
    /// The same residual with the inner subtraction deliberately attached to
    /// the wrong jet (negative control); does not vanish.
    pub broken_residual: f64,
}

/// One-dimensional rendition of the redundant-projection statement: for
/// u_G = |x|^{−aG−kζ} and a pure piece u_γ = |x|^{−aγ−kζ} on the same
/// vertex set, the regular part of the plain pairing and the regular part
/// of the nested form agree as ζ → 0. The nested form realizes the inner
/// regular part through the minimal-subtraction projection family: the
/// inner counterterm is a multiple of δ and drops against the projected
/// test function, up to O(ζ).
pub fn redundant_projection_check(
    a_g: &Q,
    a_gamma: &Q,
    k: &Q,
    zetas: &[f64],
) -> Result<RedundantProjectionReport, RenormError> {
    use crate::extend::{w_project, GaussPoly, TestFn, WFamily};
    use crate::laurent::rational_to_f64;
    use crate::quad::integrate_real_line;

    let a_g_f = rational_to_f64(a_g);
    let k_f = rational_to_f64(k);
    let f = TestFn::gaussian(1.0);

    // exact series of the plain pairing ⟨u_G^ζ, f⟩ = Γ((1−aG−kζ)/2)
    let report_g = analytic_ms_1d(a_g, k, 8)?;
    let lhs_series = report_g.series.clone().ok_or(RenormError::Extend(
        ExtendError::Laurent(LaurentError::UnsupportedArgument(a_g.to_string())),
    ))?;
    let rp_lhs = lhs_series.rp();

    // the γ piece: its pp coefficient C(ζ) = pp⟨u_γ^ζ, w_0⟩ against the
    // Gaussian bump; convergent pieces carry no counterterm at all
    let report_gamma = analytic_ms_1d(a_gamma, k, 8)?;

    // MS-adapted projection family for the G kernel (log-divergent case)
    let w_ms = {
        let gamma_const = 0.577_215_664_901_532_9;
        let finite = if report_g.has_pole { -gamma_const } else { 0.0 };
        if report_g.has_pole {
            let b0 = crate::special::gamma_fn(rational_to_f64(&((Q::from_integer(1.into()) - a_g) / Q::from_integer(2.into()))) + 1.0);
            WFamily {
                lambda: 0,
                members: vec![TestFn {
                    parts: vec![
                        GaussPoly::gaussian(1.0),
                        GaussPoly::monomial_times_gaussian(2, -finite / b0, 1.0),
                    ],
                }],
            }
        } else {
            WFamily::none()
        }
    };
    let wf = w_project(&f, &w_ms);

    let mut residuals = Vec::new();
    let mut scale = 0.0;
    for &zeta in zetas {
        let lhs = rp_lhs.eval(zeta, 0.0);
        // the unsubtracted value at this ζ, pole included
        scale = lhs_series.eval(zeta, 0.0).abs();
        // nested form: ⟨u_{G⊟γ}·rp(u_γ), W_G^MS f⟩. The regular γ part
        // recombines with the complement to the full kernel; the inner pp
        // is a δ-multiple whose pairing picks out the projected jet at 0.
        let quad = integrate_real_line(
            |x| {
                let t = wf.eval(x);
                if t == 0.0 {
                    0.0
                } else {
                    x.abs().powf(-a_g_f - k_f * zeta) * t
                }
            },
            1e-11,
        )
        .map_err(ExtendError::from)?;
        let inner_pp = report_gamma.pp_at(zeta);
        let jet = wf.eval(0.0); // vanishes by construction of the projection
        let rhs = quad - inner_pp * jet;
        residuals.push((zeta, (lhs - rhs).abs()));
    }
    // fitted order: least-squares slope of log residual vs log ζ
    let n = residuals.len() as f64;
    let sx: f64 = residuals.iter().map(|(z, _)| z.ln()).sum();
    let sy: f64 = residuals.iter().map(|(_, r)| r.max(1e-300).ln()).sum();
    let sxx: f64 = residuals.iter().map(|(z, _)| z.ln() * z.ln()).sum();
    let sxy: f64 = residuals.iter().map(|(z, r)| z.ln() * r.max(1e-300).ln()).sum();
    let fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // negative control: attach the inner counterterm to the unprojected jet
    // (an extra external factor shifts where the subtraction acts)
    let zeta0 = *zetas.last().expect("nonempty grid");
    let lhs0 = rp_lhs.eval(zeta0, 0.0);
    let quad0 = integrate_real_line(
        |x| {
            let t = wf.eval(x);
            if t == 0.0 {
                0.0
            } else {
                x.abs().powf(-a_g_f - k_f * zeta0) * t
            }
        },
        1e-11,
    )
    .map_err(ExtendError::from)?;
    let broken_rhs = quad0 - report_gamma.pp_at(zeta0) * f.eval(0.0);
    let broken_residual = (lhs0 - broken_rhs).abs();

    Ok(RedundantProjectionReport { residuals, fitted_order, scale, broken_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::sp_parse;
    use crate::laurent::{q, qi, Coefficient, Symbol};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pole_series(trunc: i32) -> LaurentSeries {
        LaurentSeries::monomial(-1, Coefficient::one(), trunc)
    }

    /// ScalarToy with f_n = 1/ζ for n ≥ 2.
    fn toy_simple_pole(n: usize) -> ScalarToy {
        let mut f = vec![LaurentSeries::one(8)];
        for _ in 2..=n {
            f.push(pole_series(8));
        }
        ScalarToy::new(n, f)
    }

    #[test]
    fn ms_block_rules() {
        let a = pole_series(6);
        assert_eq!(ms_block(&a, 1), a);
        assert_eq!(ms_block(&a, 2), a.pp().neg());
        let conv = LaurentSeries::one(6);
        assert!(ms_block(&conv, 2).is_zero());
    }

    #[test]
    fn apply_t_cases() {
        let toy = toy_simple_pole(3);
        let ground = toy.ground_set();
        // all singletons: the bare value
        let bare = apply_t(&toy, &Partition::singletons(&ground)).unwrap();
        assert!(bare.eq_on_common_window(&pole_series(8)));
        // {{1,2},{3}}: f_2 · (−pp f_2) = −1/ζ²
        let p = Partition::from_blocks(vec![
            [1u32, 2].into_iter().collect(),
            [3u32].into_iter().collect(),
        ])
        .unwrap();
        let v = apply_t(&toy, &p).unwrap();
        let mut want = LaurentSeries::zero(8);
        want.set(-2, Coefficient::from_q(qi(-1)));
        assert!(v.eq_on_common_window(&want), "got {v}");
    }

    #[test]
    fn counterterms_hand_values() {
        // f_n = 1/ζ: Z_2 = −1/ζ, Z_3 = −1/ζ + 3/ζ²
        let toy = toy_simple_pole(3);
        let table = bph_counterterms(&toy, ORDER_CAP).unwrap();
        let z2 = table.by_size(2).unwrap();
        assert!(z2.eq_on_common_window(&pole_series(8).neg()), "Z_2 = {z2}");
        let z3 = table.by_size(3).unwrap();
        let mut want = LaurentSeries::zero(8);
        want.set(-1, Coefficient::from_q(qi(-1)));
        want.set(-2, Coefficient::from_q(qi(3)));
        assert!(z3.eq_on_common_window(&want), "Z_3 = {z3}");
        // Z_1 = unit
        assert!(table.by_size(1).unwrap().eq_on_common_window(&LaurentSeries::one(8)));
    }

    #[test]
    fn forest_formula_hand_values() {
        // n = 2: f_2 + R(f_2) = 0 series
        let toy2 = toy_simple_pole(2);
        let s2 = forest_formula(&toy2).unwrap();
        assert!(s2.is_zero(), "n = 2 gives {s2}");
        // n = 3: the eight forest terms 1/ζ − 3/ζ² − 1/ζ + 3/ζ² = 0
        let toy3 = toy_simple_pole(3);
        let s3 = forest_formula(&toy3).unwrap();
        assert!(s3.is_zero(), "n = 3 gives {s3}");
    }

    fn random_toy(rng: &mut StdRng, n: usize, trunc: i32) -> ScalarToy {
        let mut f = vec![LaurentSeries::one(trunc)];
        for _ in 2..=n {
            let mut s = LaurentSeries::zero(trunc);
            let min = rng.gen_range(-3..=-1);
            for p in min..=2 {
                if rng.gen_bool(0.7) {
                    s.set(p, Coefficient::from_q(q(rng.gen_range(-9..=9), rng.gen_range(1..=4))));
                }
            }
            if s.is_zero() {
                s.set(0, Coefficient::one());
            }
            f.push(s);
        }
        ScalarToy::new(n, f)
    }

    #[test]
    fn equivalence_and_finiteness_random() {
        let mut rng = StdRng::seed_from_u64(57);
        for n in 2..=5usize {
            for _ in 0..5 {
                let toy = random_toy(&mut rng, n, 10);
                let forest = forest_formula(&toy).unwrap();
                let table = bph_counterterms(&toy, ORDER_CAP).unwrap();
                let assembled = assemble_from_counterterms(&toy, &table).unwrap();
                assert!(
                    forest.eq_on_common_window(&assembled),
                    "n = {n}: forest {forest} vs assembled {assembled}"
                );
                assert!(forest.pp().is_zero(), "finiteness at n = {n}: {forest}");
            }
        }
    }

    #[test]
    fn maximal_forest_resummation_matches() {
        let toy3 = toy_simple_pole(3);
        let direct = forest_formula(&toy3).unwrap();
        let resummed = maximal_forest_form(&toy3).unwrap();
        assert!(direct.eq_on_common_window(&resummed));
        // literal subset-expansion cross-check at n = 3: the three maximal
        // chains, all 2³ − 1 nonempty subcollections
        let lit = literal_inclusion_exclusion(&toy3);
        assert!(direct.eq_on_common_window(&lit), "literal {lit} vs {direct}");
        let mut rng = StdRng::seed_from_u64(91);
        for n in 2..=5usize {
            for _ in 0..4 {
                let toy = random_toy(&mut rng, n, 10);
                let a = forest_formula(&toy).unwrap();
                let b = maximal_forest_form(&toy).unwrap();
                assert!(a.eq_on_common_window(&b), "n = {n}");
            }
        }
        // n = 1: the bare value
        let toy1 = ScalarToy::new(1, vec![LaurentSeries::one(8)]);
        let one = maximal_forest_form(&toy1).unwrap();
        assert!(one.eq_on_common_window(&LaurentSeries::one(8)));
    }

    fn literal_inclusion_exclusion(toy: &ScalarToy) -> LaurentSeries {
        let ground = toy.ground_set();
        let forests = enumerate_eg_forests_of(&ground);
        let maximal: Vec<&EgForest> = forests.iter().filter(|f| f.is_maximal()).collect();
        let trunc = toy.bare_series(&ground).unwrap().trunc();
        let mut out = LaurentSeries::zero(trunc);
        for mask in 1u32..(1 << maximal.len()) {
            let sel: Vec<&&EgForest> = maximal
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, f)| f)
                .collect();
            let mut inter: Vec<Partition> = sel[0].chain().to_vec();
            for f in &sel[1..] {
                inter.retain(|p| f.chain().contains(p));
            }
            if inter.is_empty() {
                continue;
            }
            let sign = if sel.len() % 2 == 1 { 1 } else { -1 };
            let mut chain_sum = LaurentSeries::zero(trunc);
            for sub in super::sub_forests(&inter) {
                chain_sum = chain_sum.add(&forest_term(toy, &sub).unwrap()).unwrap();
            }
            out = out.add(&chain_sum.scale_q(&qi(sign))).unwrap();
        }
        out
    }

    #[test]
    fn prepared_amplitude_cases() {
        // n = 2: prepared = the bare f_2 itself
        let toy2 = toy_simple_pole(2);
        let prep = prepared_amplitude(&toy2).unwrap();
        assert!(prep.eq_on_common_window(&pole_series(8)));
        // reassembly: forest formula = rp(prepared), exactly
        let mut rng = StdRng::seed_from_u64(77);
        for n in 2..=5usize {
            let toy = random_toy(&mut rng, n, 10);
            let prep = prepared_amplitude(&toy).unwrap();
            let full = forest_formula(&toy).unwrap();
            assert!(full.eq_on_common_window(&prep.rp()), "n = {n}");
        }
    }

    #[test]
    fn sp_model_nested_bubble() {
        let sp = sp_parse("P(S(P(e,e),e),e)").unwrap();
        let model = SpModel::new(sp, 4, 6);
        // convergent single-edge block subtracts to zero
        let p = Partition::from_blocks(vec![
            [2u32, 3].into_iter().collect(),
            [1u32].into_iter().collect(),
        ])
        .unwrap();
        let v = apply_t(&model, &p).unwrap();
        assert!(v.is_zero(), "single-edge block is convergent: {v}");

        // the forest formula is finite, exactly, as symbols
        let s = forest_formula(&model).unwrap();
        assert!(s.pp().is_zero(), "pp(forest) = {}", s.pp());

        // equivalence with the counterterm assembly
        let table = bph_counterterms(&model, ORDER_CAP).unwrap();
        let assembled = assemble_from_counterterms(&model, &table).unwrap();
        assert!(s.eq_on_common_window(&assembled));

        // locality: the prepared amplitude's principal part carries no
        // log-scale symbol
        let prep = prepared_amplitude(&model).unwrap();
        assert_eq!(prep.pp().degree_in(Symbol::LogScale), 0, "pp(prepared) = {}", prep.pp());
        assert!(!prep.pp().is_zero());
    }

    #[test]
    fn order_caps() {
        let toy = {
            let mut f = vec![LaurentSeries::one(6)];
            for _ in 2..=8usize {
                f.push(pole_series(6));
            }
            ScalarToy::new(8, f)
        };
        assert!(matches!(forest_formula(&toy), Err(RenormError::CapExceeded(8, FOREST_ORDER_CAP))));
        assert!(matches!(
            bph_counterterms(&toy, 6),
            Err(RenormError::CapExceeded(8, 6))
        ));
    }

    #[test]
    fn convergent_forests_contribute_bare_only() {
        // a graph whose every proper subgraph is convergent: the prepared
        // amplitude is the bare value, the forest formula its regular part
        let sp = sp_parse("S(e,e)").unwrap();
        let model = SpModel::new(sp, 4, 6);
        let prep = prepared_amplitude(&model).unwrap();
        let bare = model.bare_series(&model.ground_set()).unwrap();
        assert!(prep.eq_on_common_window(&bare));
        let full = forest_formula(&model).unwrap();
        assert!(full.eq_on_common_window(&bare.rp()));
    }

    #[test]
    fn redundant_projection_experiment() {
        let zetas = [0.1, 0.05, 0.025, 0.0125];
        let rep = redundant_projection_check(&qi(1), &q(1, 2), &qi(1), &zetas).unwrap();
        // the residual falls at first order or better and ends tiny
        assert!(rep.fitted_order >= 1.0, "order {}", rep.fitted_order);
        let last = rep.residuals.last().unwrap().1;
        assert!(last < 1e-3 * rep.scale, "residual {last} vs scale {}", rep.scale);
        // convergent inner piece (a_γ = 0, pp(u_γ) = 0): the nested form
        // trivially coincides with the plain one, the inner counterterm being
        // absent altogether
        let rep2 = redundant_projection_check(&qi(1), &qi(0), &qi(1), &zetas).unwrap();
        assert!(rep2.fitted_order >= 1.0);
        for ((_, r1), (_, r2)) in rep.residuals.iter().zip(&rep2.residuals) {
            assert!((r1 - r2).abs() < 1e-12, "convergent γ must change nothing");
        }
        // negative control with a genuinely divergent inner piece: attaching
        // its counterterm to the wrong jet leaves an O(1/ζ) mismatch
        let rep3 = redundant_projection_check(&qi(1), &qi(1), &qi(1), &zetas).unwrap();
        let last3 = rep3.residuals.last().unwrap().1;
        assert!(rep3.fitted_order >= 1.0);
        assert!(rep3.broken_residual > 1e3 * last3, "broken {}", rep3.broken_residual);
    }
}
