//! Exactly solvable Euclidean backend: series-parallel two-terminal graphs
//! with per-edge power weights reduce in closed form to a product of Gamma
//! factors, a power of π, and a power of the terminal separation. Pairing
//! against a Gaussian weight e^{−t·x²} turns the closed form into an exact
//! Laurent series in the regularization variable, with the scale entering
//! through the log-scale symbol.

use crate::graph::{build_graph, contract_with_map, full_vertex_part, Graph, GraphError, VertexId};
use crate::laurent::{
    gamma_expand_split, gamma_recip_expand_split, power_expand, q, qi, AffineZeta, LaurentSeries,
    LaurentError, Q, SeriesCtx,
};
use crate::partition::Partition;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmplitudeError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("rigid pole: Gamma argument {0} is a nonpositive integer with no ζ-slope")]
    RigidPole(String),
    #[error("not series-parallel: {0}")]
    NotSeriesParallel(String),
    #[error("disconnected block: {0}")]
    DisconnectedBlock(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Series-parallel expression: a leaf edge with a positive rational
/// multiplier, or a series/parallel composition of two pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpExpr {
    Edge { rho: Q },
    Series(Box<SpExpr>, Box<SpExpr>),
    Parallel(Box<SpExpr>, Box<SpExpr>),
}

impl SpExpr {
    pub fn edge() -> SpExpr {
        SpExpr::Edge { rho: Q::one() }
    }

    pub fn series(a: SpExpr, b: SpExpr) -> SpExpr {
        SpExpr::Series(Box::new(a), Box::new(b))
    }

    pub fn parallel(a: SpExpr, b: SpExpr) -> SpExpr {
        SpExpr::Parallel(Box::new(a), Box::new(b))
    }

    pub fn n_edges(&self) -> usize {
        match self {
            SpExpr::Edge { .. } => 1,
            SpExpr::Series(a, b) | SpExpr::Parallel(a, b) => a.n_edges() + b.n_edges(),
        }
    }
}

impl fmt::Display for SpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpExpr::Edge { rho } if rho.is_one() => write!(f, "e"),
            SpExpr::Edge { rho } => write!(f, "e:{rho}"),
            SpExpr::Series(a, b) => write!(f, "S({a},{b})"),
            SpExpr::Parallel(a, b) => write!(f, "P({a},{b})"),
        }
    }
}

/// A series-parallel graph: the expression, the induced multigraph with
/// canonical numbering (terminals 1 and 2 first, internal vertices after),
/// and the per-edge multipliers aligned with the edge order.
#[derive(Debug, Clone)]
pub struct SpGraph {
    pub expr: SpExpr,
    pub graph: Graph,
    pub multipliers: Vec<Q>,
    pub source: VertexId,
    pub target: VertexId,
}

/// Parse the grammar `e | e:ρ | S(a,b) | P(a,b)`; ρ is a positive integer or
/// `p/q`. Whitespace is ignored.
pub fn sp_parse(text: &str) -> Result<SpGraph, AmplitudeError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut pos = 0usize;
    let expr = parse_expr(&bytes, &mut pos)?;
    skip_ws(&bytes, &mut pos);
    if pos != bytes.len() {
        return Err(AmplitudeError::Parse { pos, msg: "trailing input".into() });
    }
    Ok(sp_graph(expr))
}

fn skip_ws(b: &[char], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_expr(b: &[char], pos: &mut usize) -> Result<SpExpr, AmplitudeError> {
    skip_ws(b, pos);
    let err = |pos: usize, msg: &str| AmplitudeError::Parse { pos, msg: msg.into() };
    match b.get(*pos) {
        Some('e') => {
            *pos += 1;
            if b.get(*pos) == Some(&':') {
                *pos += 1;
                let rho = parse_rational(b, pos)?;
                if !rho.is_positive() {
                    return Err(err(*pos, "multiplier must be positive"));
                }
                Ok(SpExpr::Edge { rho })
            } else {
                Ok(SpExpr::edge())
            }
        }
        Some(c @ ('S' | 'P')) => {
            let combinator = *c;
            *pos += 1;
            skip_ws(b, pos);
            if b.get(*pos) != Some(&'(') {
                return Err(err(*pos, "expected '('"));
            }
            *pos += 1;
            let left = parse_expr(b, pos)?;
            skip_ws(b, pos);
            if b.get(*pos) != Some(&',') {
                return Err(err(*pos, "expected ','"));
            }
            *pos += 1;
            let right = parse_expr(b, pos)?;
            skip_ws(b, pos);
            if b.get(*pos) != Some(&')') {
                return Err(err(*pos, "expected ')'"));
            }
            *pos += 1;
            Ok(if combinator == 'S' {
                SpExpr::series(left, right)
            } else {
                SpExpr::parallel(left, right)
            })
        }
        _ => Err(err(*pos, "expected 'e', 'S' or 'P'")),
    }
}

fn parse_rational(b: &[char], pos: &mut usize) -> Result<Q, AmplitudeError> {
    let start = *pos;
    let mut digits = String::new();
    while let Some(c) = b.get(*pos) {
        if c.is_ascii_digit() {
            digits.push(*c);
            *pos += 1;
        } else {
            break;
        }
    }
    if digits.is_empty() {
        return Err(AmplitudeError::Parse { pos: start, msg: "expected a number".into() });
    }
    let numer: i64 = digits.parse().map_err(|_| AmplitudeError::Parse {
        pos: start,
        msg: "number too large".into(),
    })?;
    if b.get(*pos) == Some(&'/') {
        *pos += 1;
        let dstart = *pos;
        let mut den = String::new();
        while let Some(c) = b.get(*pos) {
            if c.is_ascii_digit() {
                den.push(*c);
                *pos += 1;
            } else {
                break;
            }
        }
        let denom: i64 = den.parse().map_err(|_| AmplitudeError::Parse {
            pos: dstart,
            msg: "expected a denominator".into(),
        })?;
        if denom == 0 {
            return Err(AmplitudeError::Parse { pos: dstart, msg: "zero denominator".into() });
        }
        Ok(q(numer, denom))
    } else {
        Ok(qi(numer))
    }
}

/// Local edge list with vertices 0 = source, 1 = target, 2.. internal.
fn build_edges(expr: &SpExpr) -> (Vec<(usize, usize, Q)>, usize) {
    match expr {
        SpExpr::Edge { rho } => (vec![(0, 1, rho.clone())], 2),
        SpExpr::Series(a, b) => {
            let (ea, na) = build_edges(a);
            let (eb, nb) = build_edges(b);
            // junction at index 2; a's internals at 3.., b's after
            let map_a = |v: usize| match v {
                0 => 0,
                1 => 2,
                k => k + 1,
            };
            let off = na + 1; // next free index after a's vertices
            let map_b = move |v: usize| match v {
                0 => 2,
                1 => 1,
                k => k + off - 2,
            };
            let mut edges: Vec<(usize, usize, Q)> =
                ea.into_iter().map(|(s, t, r)| (map_a(s), map_a(t), r)).collect();
            edges.extend(eb.into_iter().map(|(s, t, r)| (map_b(s), map_b(t), r)));
            (edges, na + nb - 1)
        }
        SpExpr::Parallel(a, b) => {
            let (ea, na) = build_edges(a);
            let (eb, nb) = build_edges(b);
            let off = na;
            let map_b = move |v: usize| match v {
                0 => 0,
                1 => 1,
                k => k + off - 2,
            };
            let mut edges = ea;
            edges.extend(eb.into_iter().map(|(s, t, r)| (map_b(s), map_b(t), r)));
            (edges, na + nb - 2)
        }
    }
}

fn sp_graph(expr: SpExpr) -> SpGraph {
    let (edges, n) = build_edges(&expr);
    let vertices: Vec<VertexId> = (1..=n as VertexId).collect();
    let pairs: Vec<(VertexId, VertexId)> =
        edges.iter().map(|(s, t, _)| (*s as VertexId + 1, *t as VertexId + 1)).collect();
    let multipliers = edges.into_iter().map(|(_, _, r)| r).collect();
    let graph = build_graph(&vertices, &pairs).expect("series-parallel construction is tadpole-free");
    SpGraph { expr, graph, multipliers, source: 1, target: 2 }
}

/// The closed-form amplitude of a reduced two-terminal graph:
/// π^{pi_halves/2} · Π Γ(arg)^{±1} · (x²)^{−exponent}.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormAmplitude {
    /// (argument, power) with power ±1.
    pub gammas: Vec<(AffineZeta, i8)>,
    /// Exponent of π^{1/2} (nonnegative after reduction of a well-formed
    /// graph; tracked signed during assembly).
    pub pi_halves: i64,
    /// The power of the squared terminal separation, as c + kζ.
    pub exponent: AffineZeta,
    pub d: u32,
}

impl ClosedFormAmplitude {
    /// The unit amplitude (single vertex, empty product).
    pub fn unit(d: u32) -> Self {
        ClosedFormAmplitude {
            gammas: Vec::new(),
            pi_halves: 0,
            exponent: AffineZeta::constant(Q::zero()),
            d,
        }
    }

    /// Sort Gamma factors and cancel equal numerator/denominator pairs.
    pub fn canonicalize(&mut self) {
        let mut counts: BTreeMap<(Q, Q), i64> = BTreeMap::new();
        for (arg, p) in &self.gammas {
            *counts.entry((arg.c.clone(), arg.k.clone())).or_insert(0) += *p as i64;
        }
        let mut out = Vec::new();
        for ((c, k), total) in counts {
            let sign: i8 = if total >= 0 { 1 } else { -1 };
            for _ in 0..total.abs() {
                out.push((AffineZeta::new(c.clone(), k.clone()), sign));
            }
        }
        self.gammas = out;
    }

    /// Numeric value at real ζ and squared separation x² > 0.
    pub fn eval(&self, x_squared: f64, zeta: f64) -> f64 {
        let mut v = std::f64::consts::PI.powf(self.pi_halves as f64 / 2.0);
        for (arg, p) in &self.gammas {
            let g = crate::special::gamma_fn(arg.eval(zeta));
            v *= if *p > 0 { g } else { 1.0 / g };
        }
        v * x_squared.powf(-self.exponent.eval(zeta))
    }
}

/// Per-edge exponent a_e = (d−2)/2 + ρ·ζ/2.
pub fn edge_exponent(rho: &Q, d: u32) -> AffineZeta {
    AffineZeta::new(qi(d as i64 - 2) / qi(2), rho / qi(2))
}

/// The chain relation: integrating out the shared vertex of two propagators
/// (x²)^{−a}, (x²)^{−b} yields π^{d/2}·v(a,b)·(x²)^{−(a+b−d/2)} with
/// v(a,b) = Γ(d/2−a)Γ(d/2−b)Γ(a+b−d/2) / (Γ(a)Γ(b)Γ(d−a−b)). Gamma
/// arguments that are nonpositive integers with no ζ-slope are rigid poles.
pub fn chain_weight(a: &AffineZeta, b: &AffineZeta, d: u32) -> Result<ClosedFormAmplitude, AmplitudeError> {
    let half_d = qi(d as i64) / qi(2);
    let merged = AffineZeta::new(&a.c + &b.c - &half_d, &a.k + &b.k);
    let numerators = [
        AffineZeta::new(&half_d - &a.c, -a.k.clone()),
        AffineZeta::new(&half_d - &b.c, -b.k.clone()),
        merged.clone(),
    ];
    for arg in &numerators {
        if arg.is_rigid_pole() {
            return Err(AmplitudeError::RigidPole(arg.to_string()));
        }
    }
    let denominators = [
        a.clone(),
        b.clone(),
        AffineZeta::new(qi(d as i64) - &a.c - &b.c, -(&a.k + &b.k)),
    ];
    let mut gammas: Vec<(AffineZeta, i8)> = numerators.iter().cloned().map(|g| (g, 1)).collect();
    gammas.extend(denominators.iter().cloned().map(|g| (g, -1)));
    Ok(ClosedFormAmplitude { gammas, pi_halves: d as i64, exponent: merged, d })
}

/// Reduce a series-parallel expression bottom-up: parallel compositions add
/// exponents, series compositions apply the chain relation.
pub fn sp_reduce(expr: &SpExpr, d: u32) -> Result<ClosedFormAmplitude, AmplitudeError> {
    let mut cf = sp_reduce_inner(expr, d)?;
    cf.canonicalize();
    Ok(cf)
}

fn sp_reduce_inner(expr: &SpExpr, d: u32) -> Result<ClosedFormAmplitude, AmplitudeError> {
    match expr {
        SpExpr::Edge { rho } => Ok(ClosedFormAmplitude {
            gammas: Vec::new(),
            pi_halves: 0,
            exponent: edge_exponent(rho, d),
            d,
        }),
        SpExpr::Parallel(a, b) => {
            let ca = sp_reduce_inner(a, d)?;
            let cb = sp_reduce_inner(b, d)?;
            let mut gammas = ca.gammas;
            gammas.extend(cb.gammas);
            Ok(ClosedFormAmplitude {
                gammas,
                pi_halves: ca.pi_halves + cb.pi_halves,
                exponent: ca.exponent.add(&cb.exponent),
                d,
            })
        }
        SpExpr::Series(a, b) => {
            let ca = sp_reduce_inner(a, d)?;
            let cb = sp_reduce_inner(b, d)?;
            let mut chain = chain_weight(&ca.exponent, &cb.exponent, d)?;
            chain.gammas.extend(ca.gammas);
            chain.gammas.extend(cb.gammas);
            chain.pi_halves += ca.pi_halves + cb.pi_halves;
            Ok(chain)
        }
    }
}

/// A multigraph with per-edge closed-form amplitudes, reduced by repeated
/// parallel merges and eliminations of degree-2 vertices.
#[derive(Debug, Clone)]
struct ReductionState {
    vertices: BTreeSet<VertexId>,
    /// (endpoint, endpoint, amplitude-of-this-two-terminal-piece)
    edges: Vec<(VertexId, VertexId, ClosedFormAmplitude)>,
}

/// Reduce a weighted multigraph to its two-terminal closed form: parallel
/// bundles merge exponents, internal (non-terminal) vertices of degree two
/// contract through the chain relation. Singleton graphs give the unit
/// amplitude.
pub fn reduce_weighted_graph(
    graph: &Graph,
    multipliers: &[Q],
    d: u32,
    terminals: (VertexId, VertexId),
    what: &str,
) -> Result<ClosedFormAmplitude, AmplitudeError> {
    if graph.n_vertices() == 1 {
        return Ok(ClosedFormAmplitude::unit(d));
    }
    if !graph.is_connected() {
        return Err(AmplitudeError::DisconnectedBlock(what.into()));
    }
    let mut state = ReductionState {
        vertices: graph.vertex_set(),
        edges: graph
            .edges()
            .iter()
            .zip(multipliers)
            .map(|((s, t), rho)| {
                (*s, *t, ClosedFormAmplitude {
                    gammas: Vec::new(),
                    pi_halves: 0,
                    exponent: edge_exponent(rho, d),
                    d,
                })
            })
            .collect(),
    };
    loop {
        parallel_merge(&mut state);
        if state.vertices.len() == 2 {
            break;
        }
        // find an internal vertex of degree exactly 2 (post-merge: two
        // distinct neighbors) and contract it through the chain relation
        let mut eliminated = false;
        let verts: Vec<VertexId> =
            state.vertices.iter().copied().filter(|v| *v != terminals.0 && *v != terminals.1).collect();
        for v in verts {
            let incident: Vec<usize> = state
                .edges
                .iter()
                .enumerate()
                .filter(|(_, (s, t, _))| *s == v || *t == v)
                .map(|(i, _)| i)
                .collect();
            if incident.len() == 2 {
                let (i, j) = (incident[0], incident[1]);
                let (s1, t1, ca) = state.edges[i].clone();
                let (s2, t2, cb) = state.edges[j].clone();
                let u = if s1 == v { t1 } else { s1 };
                let w = if s2 == v { t2 } else { s2 };
                debug_assert_ne!(u, v);
                debug_assert_ne!(w, v);
                let mut chained = chain_weight(&ca.exponent, &cb.exponent, d)?;
                chained.gammas.extend(ca.gammas);
                chained.gammas.extend(cb.gammas);
                chained.pi_halves += ca.pi_halves + cb.pi_halves;
                let mut keep: Vec<_> = state
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, e)| e.clone())
                    .collect();
                keep.push((u, w, chained));
                state.edges = keep;
                state.vertices.remove(&v);
                eliminated = true;
                break;
            }
        }
        if !eliminated {
            return Err(AmplitudeError::NotSeriesParallel(what.into()));
        }
    }
    parallel_merge(&mut state);
    if state.edges.len() != 1 {
        return Err(AmplitudeError::NotSeriesParallel(what.into()));
    }
    let mut out = state.edges.pop().expect("checked").2;
    out.canonicalize();
    Ok(out)
}

fn parallel_merge(state: &mut ReductionState) {
    let mut grouped: BTreeMap<(VertexId, VertexId), Vec<ClosedFormAmplitude>> = BTreeMap::new();
    for (s, t, cf) in state.edges.drain(..) {
        let key = (s.min(t), s.max(t));
        grouped.entry(key).or_default().push(cf);
    }
    for ((s, t), cfs) in grouped {
        let mut it = cfs.into_iter();
        let mut acc = it.next().expect("group is nonempty");
        for cf in it {
            acc.gammas.extend(cf.gammas);
            acc.pi_halves += cf.pi_halves;
            acc.exponent = acc.exponent.add(&cf.exponent);
        }
        state.edges.push((s, t, acc));
    }
}

/// The Gaussian pairing E_t[(x²)^{−s}] = π^{d/2}·Γ(d/2 − s)·t^{s−d/2}/Γ(d/2)
/// applied to a closed form: all Gamma factors are expanded into one exact
/// Laurent series, the exact rational power of t is returned separately and
/// the ζ-dependent scale factor enters as a series in the log-scale symbol.
pub fn evaluate_pairing(
    cf: &ClosedFormAmplitude,
    order: i32,
) -> Result<(Q, LaurentSeries), AmplitudeError> {
    evaluate_pairing_ctx(cf, &SeriesCtx::with_trunc(order))
}

/// Same pairing with an explicit series context (truncation and zeta-symbol
/// cap).
pub fn evaluate_pairing_ctx(
    cf: &ClosedFormAmplitude,
    ctx: &SeriesCtx,
) -> Result<(Q, LaurentSeries), AmplitudeError> {
    let ctx = *ctx;
    let half_d = qi(cf.d as i64) / qi(2);
    let pairing_arg = AffineZeta::new(&half_d - &cf.exponent.c, -cf.exponent.k.clone());
    if pairing_arg.is_rigid_pole() {
        return Err(AmplitudeError::RigidPole(pairing_arg.to_string()));
    }
    let mut series = LaurentSeries::one(ctx.trunc);
    let mut pi_halves = cf.pi_halves + cf.d as i64; // amplitude π's and the pairing π^{d/2}
    for (arg, p) in &cf.gammas {
        if *p > 0 {
            let split = gamma_expand_split(arg, &ctx)?;
            pi_halves += split.pi_halves as i64;
            series = series.mul(&split.series)?;
        } else {
            let split = gamma_recip_expand_split(arg, &ctx)?;
            pi_halves -= split.pi_halves as i64;
            series = series.mul(&split.series)?;
        }
    }
    // numerator Γ(d/2 − s)
    let split = gamma_expand_split(&pairing_arg, &ctx)?;
    pi_halves += split.pi_halves as i64;
    series = series.mul(&split.series)?;
    // denominator Γ(d/2)
    let split = gamma_recip_expand_split(&AffineZeta::constant(half_d.clone()), &ctx)?;
    pi_halves -= split.pi_halves as i64;
    series = series.mul(&split.series)?;
    // t^{s − d/2}: exact part and the log-scale series
    let t_arg = AffineZeta::new(&cf.exponent.c - &half_d, cf.exponent.k.clone());
    let (t_power, t_series) = power_expand(&t_arg, &ctx);
    series = series.mul(&t_series)?;
    assert!(pi_halves >= 0, "net π power must come out nonnegative");
    Ok((t_power, series.mul_pi_halves(pi_halves as u64 as u32)))
}

/// Numeric value of a paired closed form at real ζ and scale t: the exact
/// Gamma product with the pairing factor π^{d/2}·Γ(d/2 − s)·t^{s−d/2}/Γ(d/2).
pub fn pairing_value(cf: &ClosedFormAmplitude, zeta: f64, t: f64) -> f64 {
    let d = cf.d as f64;
    let s = cf.exponent.eval(zeta);
    // pi_halves counts half-powers; the pairing contributes π^{d/2} = d halves
    let mut v = std::f64::consts::PI.powf((cf.pi_halves + cf.d as i64) as f64 / 2.0);
    for (arg, p) in &cf.gammas {
        let g = crate::special::gamma_fn(arg.eval(zeta));
        v *= if *p > 0 { g } else { 1.0 / g };
    }
    v * crate::special::gamma_fn(d / 2.0 - s) / crate::special::gamma_fn(d / 2.0) * t.powf(s - d / 2.0)
}

/// Closed forms for every block of a partition (full vertex parts) and for
/// the contracted quotient graph, with the surviving edges keeping their
/// multipliers. Singleton blocks give the unit amplitude.
pub fn block_amplitudes(
    sp: &SpGraph,
    p: &Partition,
) -> Result<(ClosedFormAmplitude, BTreeMap<Vec<VertexId>, ClosedFormAmplitude>), AmplitudeError> {
    let d = 4; // the backend's default dimension is carried by reduce calls below
    block_amplitudes_d(sp, p, d)
}

pub fn block_amplitudes_d(
    sp: &SpGraph,
    p: &Partition,
    d: u32,
) -> Result<(ClosedFormAmplitude, BTreeMap<Vec<VertexId>, ClosedFormAmplitude>), AmplitudeError> {
    let (quotient_graph, surviving) = contract_with_map(&sp.graph, p)?;
    let quotient_mults: Vec<Q> = surviving.iter().map(|i| sp.multipliers[*i].clone()).collect();
    let quotient = reduce_weighted_graph(
        &quotient_graph,
        &quotient_mults,
        d,
        quotient_terminals(sp, p),
        "quotient",
    )?;
    let mut blocks = BTreeMap::new();
    for b in p.blocks() {
        let cf = block_amplitude(sp, b, d)?;
        blocks.insert(b.iter().copied().collect::<Vec<_>>(), cf);
    }
    Ok((quotient, blocks))
}

/// Closed form of one block's full vertex part.
pub fn block_amplitude(
    sp: &SpGraph,
    block: &BTreeSet<VertexId>,
    d: u32,
) -> Result<ClosedFormAmplitude, AmplitudeError> {
    if block.len() == 1 {
        return Ok(ClosedFormAmplitude::unit(d));
    }
    let sub = full_vertex_part(&sp.graph, block)?;
    let g = sub.to_graph();
    if !g.is_connected() {
        return Err(AmplitudeError::DisconnectedBlock(format!("block {block:?}")));
    }
    let mults: Vec<Q> = sub.edge_set.iter().map(|i| sp.multipliers[*i].clone()).collect();
    reduce_weighted_graph(&g, &mults, d, block_terminals(sp, block), &format!("block {block:?}"))
}

/// Terminals of a block's full vertex part: the vertices through which the
/// block talks to the rest of the world — boundary vertices (endpoints of
/// edges leaving the block) together with any graph terminals inside it.
/// Exactly two such vertices give the attachment pair; fewer are padded by
/// the block's outermost vertices; more mean the block is genuinely
/// multi-legged and the reduction will report it.
pub fn block_terminals(sp: &SpGraph, block: &BTreeSet<VertexId>) -> (VertexId, VertexId) {
    let mut attach: BTreeSet<VertexId> = BTreeSet::new();
    for (s, t) in sp.graph.edges() {
        let s_in = block.contains(s);
        let t_in = block.contains(t);
        if s_in && !t_in {
            attach.insert(*s);
        }
        if t_in && !s_in {
            attach.insert(*t);
        }
    }
    for term in [sp.source, sp.target] {
        if block.contains(&term) {
            attach.insert(term);
        }
    }
    if attach.len() == 2 {
        let mut it = attach.iter().copied();
        return (it.next().expect("two"), it.next().expect("two"));
    }
    if attach.len() == 1 {
        let a = *attach.first().expect("one");
        let other = block.iter().copied().find(|v| *v != a).unwrap_or(a);
        return (a.min(other), a.max(other));
    }
    // no attachment (the whole graph) or a multi-legged block: the graph
    // terminals when present, the outermost vertices otherwise
    if block.contains(&sp.source) && block.contains(&sp.target) {
        (sp.source, sp.target)
    } else {
        (*block.first().expect("nonempty"), *block.last().expect("nonempty"))
    }
}

/// Terminals of a contracted quotient: the images of the original terminals;
/// if both land in the same block, the smallest other block stands in.
fn quotient_terminals(sp: &SpGraph, p: &Partition) -> (VertexId, VertexId) {
    let index_of = |v: VertexId| -> VertexId {
        p.blocks()
            .iter()
            .position(|b| b.contains(&v))
            .map(|i| i as VertexId + 1)
            .expect("partition covers the vertex set")
    };
    let t1 = index_of(sp.source);
    let mut t2 = index_of(sp.target);
    if t1 == t2 {
        t2 = (1..=p.blocks().len() as VertexId).find(|i| *i != t1).unwrap_or(t1);
    }
    (t1, t2)
}

/// Numeric integration oracles for the closed forms: deterministic radial /
/// radial-angular quadrature and a seeded Monte-Carlo cross-check.
pub mod oracle {
    use crate::quad::{integrate_half_line, tanh_sinh, QuadError};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// E_t[(x²)^{−s}] = |S^{d−1}| ∫ r^{d−1−2s} e^{−t r²} dr by radial
    /// quadrature.
    pub fn pairing_radial(s: f64, d: u32, t: f64) -> Result<f64, QuadError> {
        let sphere = 2.0 * PI.powf(d as f64 / 2.0) / crate::special::gamma_fn(d as f64 / 2.0);
        let power = d as f64 - 1.0 - 2.0 * s;
        let integral = integrate_half_line(
            |r| {
                let e = (-t * r * r).exp();
                if e == 0.0 {
                    0.0
                } else {
                    r.powf(power) * e
                }
            },
            1e-12,
        )?;
        Ok(sphere * integral)
    }

    /// ∫₀^π sin²θ · q(θ)^{−b} · extra(q) dθ with q(θ) = delta2 +
    /// quad_coeff·sin²(θ/2) and 0 ≤ extra ≤ 1. The collision singularity at
    /// θ = 0 is handled by a logarithmic substitution, and the power part is
    /// assembled in log space so it can never overflow against sin²θ.
    fn angular_integral(
        delta2: f64,
        quad_coeff: f64,
        b: f64,
        extra: impl Fn(f64) -> f64 + Copy,
    ) -> Result<f64, QuadError> {
        let g = |theta: f64| {
            let sin = theta.sin();
            if sin <= 0.0 {
                return 0.0;
            }
            let half = (theta / 2.0).sin();
            let q = delta2 + quad_coeff * half * half;
            if q <= 0.0 {
                return 0.0;
            }
            let ex = extra(q);
            if ex == 0.0 {
                return 0.0;
            }
            let ln_g = 2.0 * sin.ln() - b * q.ln() + ex.ln();
            if ln_g < -700.0 {
                0.0
            } else {
                ln_g.exp()
            }
        };
        let head = tanh_sinh(
            |w: f64| {
                let theta = w.exp();
                let gv = g(theta);
                if gv == 0.0 {
                    0.0
                } else {
                    gv * theta
                }
            },
            -740.0,
            (PI / 2.0).ln(),
            1e-10,
        )?;
        let tail = tanh_sinh(g, PI / 2.0, PI, 1e-10)?;
        Ok(head + tail)
    }

    /// The d = 4 chain integral ∫d⁴z (z²)^{−a}((z−y)²)^{−b} at |y| = 1 by
    /// 2-D radial-angular quadrature (expected: π²·v(a,b)).
    pub fn chain_quadrature_d4(a: f64, b: f64) -> Result<f64, QuadError> {
        // measure: r³ dr · sin²θ dθ · |S²| with |S²| = 4π
        let inner = |r: f64| -> Result<f64, QuadError> {
            let delta = r - 1.0;
            angular_integral(delta * delta, 4.0 * r, b, |_| 1.0)
        };
        let radial = |r: f64| -> f64 {
            if r == 0.0 {
                return 0.0;
            }
            let ang = inner(r).unwrap_or(f64::NAN);
            r.powf(3.0 - 2.0 * a) * ang
        };
        // split at the singular shell r = 1
        let head = tanh_sinh(radial, 0.0, 1.0, 1e-9)?;
        let mid = tanh_sinh(radial, 1.0, 2.0, 1e-9)?;
        let tail = tanh_sinh(
            |u| {
                let v = radial(1.0 / u);
                if v == 0.0 {
                    0.0
                } else {
                    v / (u * u)
                }
            },
            1e-8,
            0.5,
            1e-9,
        )?;
        Ok(4.0 * PI * (head + mid + tail))
    }

    /// Monte-Carlo version of the chain integral with a three-component
    /// importance mixture (two singular centers and a Gaussian envelope);
    /// deterministic for a fixed seed.
    pub fn chain_mc_d4(a: f64, b: f64, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = [1.0, 0.0, 0.0, 0.0];
        let radius = 2.0f64;
        let sphere3 = 2.0 * PI * PI; // |S³|
        // components: ball around 0 with radial density ∝ r^{3−2a}, the same
        // around y, and a Gaussian envelope
        let pow_a = 3.0 - 2.0 * a;
        let pow_b = 3.0 - 2.0 * b;
        let norm_a = radius.powf(pow_a + 1.0) / (pow_a + 1.0) * sphere3;
        let norm_b = radius.powf(pow_b + 1.0) / (pow_b + 1.0) * sphere3;
        let sigma2 = 4.0f64;
        let dens = |z: &[f64; 4]| -> f64 {
            let r0 = (z.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let r1 = (z.iter().zip(&y).map(|(v, w)| (v - w) * (v - w)).sum::<f64>()).sqrt();
            let c0 = if r0 < radius && r0 > 0.0 { r0.powf(-2.0 * a) / norm_a } else { 0.0 };
            let c1 = if r1 < radius && r1 > 0.0 { r1.powf(-2.0 * b) / norm_b } else { 0.0 };
            let g = (-(r0 * r0) / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).powf(2.0);
            (c0 + c1 + g) / 3.0
        };
        let sample_sphere = |rng: &mut ChaCha8Rng| -> [f64; 4] {
            loop {
                let v: [f64; 4] = [
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                    rng.gen::<f64>() * 2.0 - 1.0,
                ];
                let n2: f64 = v.iter().map(|x| x * x).sum();
                if n2 > 1e-12 && n2 <= 1.0 {
                    let n = n2.sqrt();
                    return [v[0] / n, v[1] / n, v[2] / n, v[3] / n];
                }
            }
        };
        let gauss = |rng: &mut ChaCha8Rng| -> f64 {
            // Box-Muller
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        };
        let mut acc = 0.0;
        for _ in 0..samples {
            let comp = rng.gen_range(0..3);
            let z: [f64; 4] = match comp {
                0 | 1 => {
                    let p = if comp == 0 { pow_a } else { pow_b };
                    let u: f64 = rng.gen();
                    let r = (u * radius.powf(p + 1.0)).powf(1.0 / (p + 1.0));
                    let w = sample_sphere(&mut rng);
                    let center = if comp == 0 { [0.0; 4] } else { y };
                    [
                        center[0] + r * w[0],
                        center[1] + r * w[1],
                        center[2] + r * w[2],
                        center[3] + r * w[3],
                    ]
                }
                _ => {
                    let s = sigma2.sqrt();
                    [gauss(&mut rng) * s, gauss(&mut rng) * s, gauss(&mut rng) * s, gauss(&mut rng) * s]
                }
            };
            let r0sq: f64 = z.iter().map(|v| v * v).sum();
            let r1sq: f64 = z.iter().zip(&y).map(|(v, w)| (v - w) * (v - w)).sum();
            if r0sq == 0.0 || r1sq == 0.0 {
                continue;
            }
            let f = r0sq.powf(-a) * r1sq.powf(-b);
            acc += f / dens(&z);
        }
        acc / samples as f64
    }

    /// Direct numeric pairing of a three-vertex two-terminal graph made of
    /// three bundles: (u²)^{−a_u} between terminal 1 and the internal
    /// vertex, (v²)^{−a_v} between the internal vertex and terminal 2, and
    /// (w²)^{−a_w} across the terminals (w = u + v), weighted by e^{−t·w²}.
    /// Reduced to a 3-D integral over (|u|, |v|, angle); the radial
    /// integrals run over [1e-10, 1e6], whose truncation error is far below
    /// the quadrature tolerance for the safe exponent window.
    pub fn three_vertex_pairing(a_u: f64, a_v: f64, a_w: f64, t: f64) -> Result<f64, QuadError> {
        // d = 4: ∫d⁴u d⁴v = |S³||S²| ∫ u³ v³ sin²θ du dv dθ
        let sphere3 = 2.0 * PI * PI;
        let sphere2 = 4.0 * PI;
        const LO: f64 = 1e-10;
        const HI: f64 = 1e6;
        // substitute φ = π − θ: w² = (u−v)² + 4uv·sin²(φ/2), collision at φ = 0
        let inner = |u: f64, v: f64| -> Result<f64, QuadError> {
            let delta = u - v;
            angular_integral(delta * delta, 4.0 * u * v, a_w, |w2| (-t * w2).exp())
        };
        let over_v = |u: f64| -> f64 {
            let f = |v: f64| -> f64 {
                if !(LO..=HI).contains(&v) {
                    return 0.0;
                }
                match inner(u, v) {
                    Ok(val) if val == 0.0 => 0.0,
                    Ok(val) => v.powf(3.0 - 2.0 * a_v) * val,
                    Err(_) => f64::NAN,
                }
            };
            // the inner integral has a |v−u|^{…} kink at v = u: split there;
            // intervals that degenerate at the domain edges contribute nothing
            let first = if u <= LO * (1.0 + 1e-6) {
                0.0
            } else {
                tanh_sinh(f, LO, u.min(HI), 1e-8).unwrap_or(f64::NAN)
            };
            let second = if u >= HI / 2.0 {
                if u >= HI * (1.0 - 1e-6) {
                    0.0
                } else {
                    tanh_sinh(f, u, HI, 1e-8).unwrap_or(f64::NAN)
                }
            } else {
                tanh_sinh(f, u, 2.0 * u, 1e-8).unwrap_or(f64::NAN)
            };
            let tail = if 0.5 / u <= (1.0 / HI) * (1.0 + 1e-6) {
                0.0
            } else {
                tanh_sinh(
                    |w: f64| {
                        let v = 1.0 / w;
                        if !v.is_finite() {
                            return 0.0;
                        }
                        let fv = f(v);
                        if fv == 0.0 {
                            0.0
                        } else {
                            fv / (w * w)
                        }
                    },
                    1.0 / HI,
                    0.5 / u,
                    1e-8,
                )
                .unwrap_or(f64::NAN)
            };
            first + second + tail
        };
        let g = |u: f64| -> f64 {
            if !(LO..=HI).contains(&u) {
                return 0.0;
            }
            let o = over_v(u);
            if o == 0.0 {
                0.0
            } else {
                u.powf(3.0 - 2.0 * a_u) * o
            }
        };
        let head = tanh_sinh(g, LO, 1.0, 1e-6)?;
        let tail = tanh_sinh(
            |w: f64| {
                let u = 1.0 / w;
                let gu = g(u);
                if gu == 0.0 {
                    0.0
                } else {
                    gu / (w * w)
                }
            },
            1.0 / HI,
            1.0,
            1e-6,
        )?;
        Ok(sphere3 * sphere2 * (head + tail))
    }
}
