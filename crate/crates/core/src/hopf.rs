//! The Faà di Bruno Hopf algebra on generators `a_n` (with `a_1` identified
//! with the unit), its partition coproduct, counit and antipode, the extra
//! non-commutative composition product with its own right-sided antipode,
//! convolutions, Laurent-valued characters, and the graph-level coproduct
//! over connected partitions.

use crate::graph::{contract, full_vertex_part, Graph, Subgraph};
use crate::laurent::{LaurentError, LaurentSeries, Q};
use crate::partition::{connected_partitions, enumerate_partitions_of, Block};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HopfError {
    #[error("the coproduct is defined on the ⊙-subalgebra only (no composition nodes)")]
    CompNotSupported,
    #[error("composition head a_{0} needs exactly {0} children, got {1}")]
    ArityMismatch(usize, usize),
    #[error("no evaluation rule for generator a_{0}")]
    MissingRule(usize),
    #[error("block sizes {0:?} do not sum to {1}")]
    ShapeMismatch(Vec<usize>, usize),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A basis word of the augmented algebra: the unit, a generator, a sorted
/// ⊙-monomial of non-unit factors, or a composition node whose children
/// count the head's arity (units included).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    One,
    Gen(usize),
    Odot(Vec<Word>),
    Comp(usize, Vec<Word>),
}

impl Word {
    /// Number of ⊙-factors.
    pub fn odot_degree(&self) -> usize {
        match self {
            Word::One => 0,
            Word::Gen(_) | Word::Comp(..) => 1,
            Word::Odot(ws) => ws.len(),
        }
    }

    /// Vertex grading: deg^v(a_l) = l − 1, additive over ⊙, and
    /// deg^v(a_k ⊚ (w_1⊙…⊙w_k)) = (k−1) + Σ deg^v(w_i) = Σ l_i − 1.
    pub fn vertex_degree(&self) -> usize {
        match self {
            Word::One => 0,
            Word::Gen(n) => n - 1,
            Word::Odot(ws) => ws.iter().map(Word::vertex_degree).sum(),
            Word::Comp(k, ws) => (k - 1) + ws.iter().map(Word::vertex_degree).sum::<usize>(),
        }
    }

    pub fn contains_comp(&self) -> bool {
        match self {
            Word::One | Word::Gen(_) => false,
            Word::Odot(ws) => ws.iter().any(Word::contains_comp),
            Word::Comp(..) => true,
        }
    }

    /// Canonical prefix serialization, e.g. `comp(a2, odot(one, a2))`.
    pub fn serialize(&self) -> String {
        match self {
            Word::One => "one".into(),
            Word::Gen(n) => format!("a{n}"),
            Word::Odot(ws) => {
                let inner: Vec<String> = ws.iter().map(Word::serialize).collect();
                format!("odot({})", inner.join(", "))
            }
            Word::Comp(k, ws) => {
                let inner: Vec<String> = ws.iter().map(Word::serialize).collect();
                format!("comp(a{k}, odot({}))", inner.join(", "))
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// A finite rational linear combination of basis words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HopfWord(BTreeMap<Word, Q>);

impl HopfWord {
    pub fn zero() -> Self {
        HopfWord::default()
    }

    pub fn one() -> Self {
        HopfWord::from_word(Word::One)
    }

    pub fn gen(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            HopfWord::one() // a_1 is the unit
        } else {
            HopfWord::from_word(Word::Gen(n))
        }
    }

    pub fn from_word(w: Word) -> Self {
        let mut m = BTreeMap::new();
        m.insert(w, Q::one());
        HopfWord(m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &HopfWord) -> HopfWord {
        let mut out = self.0.clone();
        for (w, c) in &other.0 {
            let e = out.entry(w.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.remove(w);
            }
        }
        HopfWord(out)
    }

    pub fn neg(&self) -> HopfWord {
        HopfWord(self.0.iter().map(|(w, c)| (w.clone(), -c.clone())).collect())
    }

    pub fn scale(&self, v: &Q) -> HopfWord {
        if v.is_zero() {
            return HopfWord::zero();
        }
        HopfWord(self.0.iter().map(|(w, c)| (w.clone(), c * v)).collect())
    }

    /// ⊙-product, extended bilinearly; ⊙-monomials are flattened and sorted,
    /// the unit is absorbed.
    pub fn odot(&self, other: &HopfWord) -> HopfWord {
        let mut out = HopfWord::zero();
        for (wa, ca) in &self.0 {
            for (wb, cb) in &other.0 {
                let mut factors = odot_factors(wa);
                factors.extend(odot_factors(wb));
                out = out.add(&HopfWord::from_word(word_from_factors(factors)).scale(&(ca * cb)));
            }
        }
        out
    }

    pub fn serialize(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(w, c)| {
                if c.is_one() {
                    w.serialize()
                } else {
                    format!("{}*{}", c, w.serialize())
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for HopfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

fn odot_factors(w: &Word) -> Vec<Word> {
    match w {
        Word::One => Vec::new(),
        Word::Odot(ws) => ws.clone(),
        other => vec![other.clone()],
    }
}

fn word_from_factors(mut factors: Vec<Word>) -> Word {
    factors.retain(|w| *w != Word::One);
    factors.sort();
    match factors.len() {
        0 => Word::One,
        1 => factors.pop().expect("len checked"),
        _ => Word::Odot(factors),
    }
}

/// (deg^⊙, deg^v) of a basis word.
pub fn grading(w: &Word) -> (usize, usize) {
    (w.odot_degree(), w.vertex_degree())
}

/// A linear combination of ordered tensor pairs, in bilinear normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorSum(BTreeMap<(Word, Word), Q>);

impl TensorSum {
    pub fn zero() -> Self {
        TensorSum::default()
    }

    pub fn insert(&mut self, left: Word, right: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let e = self.0.entry(key.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Q)> {
        self.0.iter()
    }

    pub fn add(&self, other: &TensorSum) -> TensorSum {
        let mut out = self.clone();
        for ((l, r), c) in &other.0 {
            out.insert(l.clone(), r.clone(), c.clone());
        }
        out
    }

    fn scale(&self, v: &Q) -> TensorSum {
        if v.is_zero() {
            return TensorSum::zero();
        }
        TensorSum(self.0.iter().map(|(k, c)| (k.clone(), c * v)).collect())
    }

    /// Componentwise ⊙-product of tensor sums.
    pub fn odot(&self, other: &TensorSum) -> TensorSum {
        let mut out = TensorSum::zero();
        for ((la, ra), ca) in &self.0 {
            for ((lb, rb), cb) in &other.0 {
                let l = word_from_factors({
                    let mut v = odot_factors(la);
                    v.extend(odot_factors(lb));
                    v
                });
                let r = word_from_factors({
                    let mut v = odot_factors(ra);
                    v.extend(odot_factors(rb));
                    v
                });
                out.insert(l, r, ca * cb);
            }
        }
        out
    }
}

fn ground_of(n: usize) -> Block {
    (1..=n as u32).collect()
}

/// Δa_n = Σ_{P ∈ Part{1..n}} a_{|P|} ⊗ ⊙_{I∈P} a_{|I|}, with a_1 = 𝟙,
/// extended as an algebra morphism over ⊙. Composition nodes are rejected.
pub fn coproduct(w: &HopfWord) -> Result<TensorSum, HopfError> {
    let mut out = TensorSum::zero();
    for (word, c) in w.terms() {
        out = out.add(&coproduct_word(word)?.scale(c));
    }
    Ok(out)
}

fn coproduct_word(w: &Word) -> Result<TensorSum, HopfError> {
    match w {
        Word::One => {
            let mut t = TensorSum::zero();
            t.insert(Word::One, Word::One, Q::one());
            Ok(t)
        }
        Word::Gen(n) => {
            let mut t = TensorSum::zero();
            for p in enumerate_partitions_of(&ground_of(*n)) {
                let left = gen_word(p.n_blocks());
                let right = word_from_factors(
                    p.blocks().iter().filter(|b| b.len() >= 2).map(|b| Word::Gen(b.len())).collect(),
                );
                t.insert(left, right, Q::one());
            }
            Ok(t)
        }
        Word::Odot(ws) => {
            let mut acc = coproduct_word(&ws[0])?;
            for w in &ws[1..] {
                acc = acc.odot(&coproduct_word(w)?);
            }
            Ok(acc)
        }
        Word::Comp(..) => Err(HopfError::CompNotSupported),
    }
}

fn gen_word(n: usize) -> Word {
    if n == 1 {
        Word::One
    } else {
        Word::Gen(n)
    }
}

/// Counit: 1 on the unit, 0 on everything else.
pub fn counit(w: &HopfWord) -> Q {
    w.terms().filter(|(word, _)| **word == Word::One).map(|(_, c)| c.clone()).sum()
}

/// Antipode of the commutative Hopf algebra:
/// A(a_n) = −Σ_{P ≠ P_coarsest} a_{|P|} ⊙ ⊙_I A(a_{|I|}), extended
/// multiplicatively and memoized.
pub fn antipode(w: &HopfWord) -> HopfWord {
    let mut memo: BTreeMap<usize, HopfWord> = BTreeMap::new();
    let mut out = HopfWord::zero();
    for (word, c) in w.terms() {
        out = out.add(&antipode_word(word, &mut memo).scale(c));
    }
    out
}

fn antipode_word(w: &Word, memo: &mut BTreeMap<usize, HopfWord>) -> HopfWord {
    match w {
        Word::One => HopfWord::one(),
        Word::Gen(n) => antipode_gen(*n, memo),
        Word::Odot(ws) => {
            let mut acc = HopfWord::one();
            for w in ws {
                acc = acc.odot(&antipode_word(w, memo));
            }
            acc
        }
        Word::Comp(..) => panic!("antipode of the ⊙-Hopf algebra does not accept composition nodes"),
    }
}

fn antipode_gen(n: usize, memo: &mut BTreeMap<usize, HopfWord>) -> HopfWord {
    if n == 1 {
        return HopfWord::one();
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut sum = HopfWord::zero();
    for p in enumerate_partitions_of(&ground_of(n)) {
        if p.is_coarsest() {
            continue;
        }
        let mut term = HopfWord::gen(p.n_blocks());
        for b in p.blocks() {
            term = term.odot(&antipode_gen(b.len(), memo));
        }
        sum = sum.add(&term);
    }
    let out = sum.neg();
    memo.insert(n, out.clone());
    out
}

/// Composition: comp(a_k, children) with |children| = k counting units. The
/// children may be linear combinations; the result expands multilinearly.
/// Unit collapse: a head a_1 returns its child, all-unit children return the
/// head.
pub fn compose(head: usize, children: &[HopfWord]) -> Result<HopfWord, HopfError> {
    if children.len() != head {
        return Err(HopfError::ArityMismatch(head, children.len()));
    }
    let mut out = HopfWord::zero();
    // expand the multilinear combination child by child
    let mut partial: Vec<(Vec<Word>, Q)> = vec![(Vec::new(), Q::one())];
    for child in children {
        let mut next = Vec::new();
        for (ws, c) in &partial {
            for (w, cw) in child.terms() {
                let mut ws2 = ws.clone();
                ws2.push(w.clone());
                next.push((ws2, c * cw));
            }
        }
        partial = next;
    }
    for (ws, c) in partial {
        out = out.add(&HopfWord::from_word(compose_basis(head, ws)?).scale(&c));
    }
    Ok(out)
}

fn compose_basis(head: usize, mut children: Vec<Word>) -> Result<Word, HopfError> {
    for c in &children {
        if c.odot_degree() > 1 {
            return Err(HopfError::ArityMismatch(head, head + c.odot_degree() - 1));
        }
    }
    if head == 1 {
        return Ok(children.pop().expect("arity checked"));
    }
    if children.iter().all(|c| *c == Word::One) {
        return Ok(Word::Gen(head));
    }
    children.sort();
    Ok(Word::Comp(head, children))
}

/// Which bilinear product a convolution uses to combine the two legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvProduct {
    Odot,
    Comp,
}

/// (φ ⋆ ψ)(a_n) = Σ_{P} product(φ(a_{|P|}), ⊙_I ψ(a_{|I|})), where the maps
/// are given on generators (index 1 = the unit) and extended multiplicatively
/// over the ⊙-leg.
pub fn convolution_on_generator(
    phi: &dyn Fn(usize) -> HopfWord,
    psi: &dyn Fn(usize) -> HopfWord,
    product: ConvProduct,
    n: usize,
) -> Result<HopfWord, HopfError> {
    let mut out = HopfWord::zero();
    for p in enumerate_partitions_of(&ground_of(n)) {
        let left = phi(p.n_blocks());
        match product {
            ConvProduct::Odot => {
                let mut term = left;
                for b in p.blocks() {
                    term = term.odot(&psi(b.len()));
                }
                out = out.add(&term);
            }
            ConvProduct::Comp => {
                let children: Vec<HopfWord> = p.blocks().iter().map(|b| psi(b.len())).collect();
                // compose each basis word of the left leg with the children
                for (w, c) in left.terms() {
                    let head = match w {
                        Word::One => 1,
                        Word::Gen(k) => *k,
                        _ => return Err(HopfError::CompNotSupported),
                    };
                    if head != children.len() {
                        return Err(HopfError::ArityMismatch(head, children.len()));
                    }
                    out = out.add(&compose(head, &children)?.scale(c));
                }
            }
        }
    }
    Ok(out)
}

/// Right-sided antipode of the composition convolution:
/// A_C(a_n) = −Σ_{P ≠ P_coarsest} a_{|P|} ⊚ (⊙_I A_C(a_{|I|})), A_C(a_1) = 𝟙.
pub fn antipode_c(n: usize) -> HopfWord {
    let mut memo = BTreeMap::new();
    antipode_c_memo(n, &mut memo)
}

fn antipode_c_memo(n: usize, memo: &mut BTreeMap<usize, HopfWord>) -> HopfWord {
    if n == 1 {
        return HopfWord::one();
    }
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut sum = HopfWord::zero();
    for p in enumerate_partitions_of(&ground_of(n)) {
        if p.is_coarsest() {
            continue;
        }
        let children: Vec<HopfWord> = p.blocks().iter().map(|b| antipode_c_memo(b.len(), memo)).collect();
        sum = sum.add(&compose(p.n_blocks(), &children).expect("arity matches block count"));
    }
    let out = sum.neg();
    memo.insert(n, out.clone());
    out
}

/// Evaluation mode of a Laurent character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterMode {
    /// Both ⊙ and ⊚ collapse to multiplication in the scalar series ring.
    Plain,
    /// The minimally subtracted counterterm evaluation: every composition
    /// head (and bare generator) is evaluated and projected to the principal
    /// part, word by word along the A_C recursion. The signs of R_k = −pp
    /// are already carried by the antipode words.
    MsRenormalized,
}

/// Feynman-rule evaluation of a word. Rules map the generator index to a
/// Laurent series; index 1 must evaluate to the unit series.
pub fn evaluate_character(
    w: &HopfWord,
    rules: &dyn Fn(usize) -> Option<LaurentSeries>,
    mode: CharacterMode,
) -> Result<LaurentSeries, HopfError> {
    let trunc = rules(1).ok_or(HopfError::MissingRule(1))?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    for (word, c) in w.terms() {
        let v = match mode {
            CharacterMode::Plain => eval_plain(word, rules)?,
            CharacterMode::MsRenormalized => eval_ms(word, rules)?,
        };
        out = out.add(&v.scale_q(c))?;
    }
    Ok(out)
}

fn rule(rules: &dyn Fn(usize) -> Option<LaurentSeries>, n: usize) -> Result<LaurentSeries, HopfError> {
    rules(n).ok_or(HopfError::MissingRule(n))
}

fn eval_plain(w: &Word, rules: &dyn Fn(usize) -> Option<LaurentSeries>) -> Result<LaurentSeries, HopfError> {
    match w {
        Word::One => rule(rules, 1),
        Word::Gen(n) => rule(rules, *n),
        Word::Odot(ws) => {
            let mut acc = rule(rules, 1)?;
            for w in ws {
                acc = acc.mul(&eval_plain(w, rules)?)?;
            }
            Ok(acc)
        }
        Word::Comp(k, ws) => {
            let mut acc = rule(rules, *k)?;
            for w in ws {
                acc = acc.mul(&eval_plain(w, rules)?)?;
            }
            Ok(acc)
        }
    }
}

fn eval_ms(w: &Word, rules: &dyn Fn(usize) -> Option<LaurentSeries>) -> Result<LaurentSeries, HopfError> {
    match w {
        Word::One => rule(rules, 1),
        Word::Gen(n) => Ok(rule(rules, *n)?.pp()),
        Word::Odot(ws) => {
            let mut acc = rule(rules, 1)?;
            for w in ws {
                acc = acc.mul(&eval_ms(w, rules)?)?;
            }
            Ok(acc)
        }
        Word::Comp(k, ws) => {
            let mut acc = rule(rules, *k)?;
            for w in ws {
                acc = acc.mul(&eval_ms(w, rules)?)?;
            }
            Ok(acc.pp())
        }
    }
}

/// The counterterm character Z(a_n) = evaluate_character(A_C(a_n), ms mode):
/// equals −pp Σ_{P≠coarsest} rules(|P|)·Π_I Z(a_{|I|}).
pub fn counterterm_character(
    n: usize,
    rules: &dyn Fn(usize) -> Option<LaurentSeries>,
) -> Result<LaurentSeries, HopfError> {
    evaluate_character(&antipode_c(n), rules, CharacterMode::MsRenormalized)
}

/// The renormalized character (feyn •_C A_{C,MS})(a_n): the finitely
/// regularized n-fold value.
pub fn renormalized_character(
    n: usize,
    rules: &dyn Fn(usize) -> Option<LaurentSeries>,
) -> Result<LaurentSeries, HopfError> {
    let trunc = rules(1).ok_or(HopfError::MissingRule(1))?.trunc();
    let mut out = LaurentSeries::zero(trunc);
    for p in enumerate_partitions_of(&ground_of(n)) {
        let mut term = rule(rules, p.n_blocks())?;
        for b in p.blocks() {
            term = term.mul(&counterterm_character(b.len(), rules)?)?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// One term of the graph coproduct.
#[derive(Debug, Clone)]
pub struct GraphCoproductTerm {
    pub quotient: Graph,
    pub blocks: Vec<Subgraph>,
    pub multiplicity: u64,
}

/// ΔΓ = Σ_{P ∈ Part^c V(Γ)} Γ/P ⊗ ⊔_I γ_I over connected partitions.
pub fn graph_coproduct(g: &Graph) -> Vec<GraphCoproductTerm> {
    connected_partitions(g)
        .into_iter()
        .map(|p| {
            let quotient = contract(g, &p).expect("partition of the vertex set");
            let blocks = p
                .blocks()
                .iter()
                .map(|b| full_vertex_part(g, b).expect("blocks are vertex subsets"))
                .collect();
            GraphCoproductTerm { quotient, blocks, multiplicity: 1 }
        })
        .collect()
}

/// Number of partitions of n with the given block-size multiset:
/// n! / (Π l_i! · Π λ_l!) with λ_l the multiplicity of size l.
pub fn fdb_coefficient(n: usize, shape: &[usize]) -> Result<u64, HopfError> {
    if shape.iter().sum::<usize>() != n {
        return Err(HopfError::ShapeMismatch(shape.to_vec(), n));
    }
    let fact = |m: usize| -> u128 { (1..=m as u128).product::<u128>().max(1) };
    let mut denom: u128 = 1;
    for l in shape {
        denom *= fact(*l);
    }
    let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
    for l in shape {
        *mult.entry(*l).or_insert(0) += 1;
    }
    for m in mult.values() {
        denom *= fact(*m);
    }
    Ok((fact(n) / denom) as u64)
}
