//! Brute-force searches over small finite fields: automorphism streams with
//! constraint propagation, Lie algebra isomorphism, p-map conjugacy (single
//! field and extension ladder), restricted isomorphism, scalar-twisted matrix
//! conjugacy, and exhaustive validation of the closed-form automorphism
//! parameterizations of each catalogued family.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::lie_core::{LieAlgebra, LieElement};
use crate::restricted::{self, PSemilinearMap, RestrictedError, RestrictedLieAlgebra};
use crate::substrate::{
    field_embedding, field_make, FieldDescriptor, FieldElement, FieldEmbedding, Matrix,
    MAX_FIELD_ORDER,
};

#[derive(Debug, Error)]
pub enum IsoError {
    #[error("search budget exhausted after {candidates} candidates")]
    BudgetExhausted { candidates: u64 },
    #[error("matrix is not a Lie algebra automorphism")]
    NotAutomorphism,
    #[error("map images do not satisfy the p-map criterion")]
    NotPMap,
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error("unknown parameterized family {0:?}")]
    UnknownFamily(String),
    #[error("family {family} has no closed automorphism form in characteristic {p}")]
    CharMismatch { family: String, p: u64 },
}

/// Limits for a brute-force search. `max_candidates` counts attempted basis
/// image assignments, `wall_clock` is checked coarsely during the search, and
/// `ladder` lists the extension degrees (over the prime field) that
/// ladder-based conjugacy decisions walk in order.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_candidates: u64,
    pub wall_clock: Option<Duration>,
    pub ladder: Vec<u32>,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget { max_candidates: u64::MAX, wall_clock: None, ladder: vec![1, 2, 4] }
    }
}

impl SearchBudget {
    pub fn limited(max_candidates: u64) -> SearchBudget {
        SearchBudget { max_candidates, ..SearchBudget::default() }
    }
}

/// A verified automorphism: invertible and bracket-preserving.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    algebra: LieAlgebra,
    matrix: Matrix,
}

impl Automorphism {
    pub fn new(algebra: &LieAlgebra, matrix: Matrix) -> Result<Automorphism, IsoError> {
        if !restricted::is_automorphism(algebra, &matrix) {
            return Err(IsoError::NotAutomorphism);
        }
        Ok(Automorphism { algebra: algebra.clone(), matrix })
    }

    fn from_verified(algebra: LieAlgebra, matrix: Matrix) -> Automorphism {
        Automorphism { algebra, matrix }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn apply(&self, v: &LieElement) -> LieElement {
        self.algebra.element(self.matrix.mul_vec(v.coords()))
    }
}

/// Depth-first stream of all invertible bracket-preserving matrices from
/// `dom` to `cod` (columns are basis images). Basis images are fixed in
/// descending order of how many structure relations mention the basis vector,
/// and every completed bracket relation is propagated immediately: a relation
/// with a single unknown image determines it, one with none becomes a check.
/// Yield order is the lexicographic order of the choice sequence, so it is
/// deterministic for fixed inputs.
pub struct MorphismStream {
    dom: LieAlgebra,
    cod: LieAlgebra,
    order: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    n: usize,
    q: u64,
    qn: u128,
    images: Vec<Option<Vec<FieldElement>>>,
    stack: Vec<Frame>,
    started: bool,
    finished: bool,
    truncated: bool,
    candidates: u64,
    max_candidates: u64,
    deadline: Option<Instant>,
}

struct Frame {
    pos: usize,
    forced: bool,
    next: u128,
    derived: Vec<usize>,
}

/// Basis indices in descending order of structure-relation mentions, ties
/// broken by descending index (so w precedes x in the catalogued families).
fn choice_order(alg: &LieAlgebra) -> Vec<usize> {
    let n = alg.dim();
    let mut mentions = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if alg.structure_coords(i, j).iter().any(|c| !c.is_zero()) {
                mentions[i] += 1;
                mentions[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mentions[b].cmp(&mentions[a]).then(b.cmp(&a)));
    order
}

fn bracket_preserving(dom: &LieAlgebra, cod: &LieAlgebra, m: &Matrix) -> bool {
    let n = dom.dim();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = m.mul_vec(dom.structure_coords(i, j));
            let rhs = cod.bracket_coords(&m.col(i), &m.col(j));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

impl MorphismStream {
    fn new(dom: &LieAlgebra, cod: &LieAlgebra, budget: &SearchBudget) -> MorphismStream {
        let n = dom.dim();
        let q = dom.field().order();
        let qn = (0..n)
            .try_fold(1u128, |acc, _| acc.checked_mul(q as u128))
            .unwrap_or(u128::MAX);
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        MorphismStream {
            dom: dom.clone(),
            cod: cod.clone(),
            order: choice_order(dom),
            pairs,
            n,
            q,
            qn,
            images: vec![None; n],
            stack: Vec::new(),
            started: false,
            finished: false,
            truncated: false,
            candidates: 0,
            max_candidates: budget.max_candidates,
            deadline: budget.wall_clock.map(|d| Instant::now() + d),
        }
    }

    /// True when the budget cut the search before exhausting it; an empty
    /// truncated stream proves nothing.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn candidates_tried(&self) -> u64 {
        self.candidates
    }

    pub fn dom(&self) -> &LieAlgebra {
        &self.dom
    }

    fn vector(&self, c: u128) -> Vec<FieldElement> {
        let f = self.dom.field();
        let q = self.q as u128;
        let mut c = c;
        (0..self.n)
            .map(|_| {
                let d = (c % q) as u64;
                c /= q;
                f.from_index(d)
            })
            .collect()
    }

    fn undo_attempt(&mut self, d: usize) {
        let derived = std::mem::take(&mut self.stack[d].derived);
        for t in derived {
            self.images[t] = None;
        }
        if !self.stack[d].forced {
            self.images[self.order[self.stack[d].pos]] = None;
        }
    }

    /// Fixpoint propagation of all bracket relations whose endpoint images
    /// are fixed. Returns false when a relation is violated or forces a zero
    /// image (which could never extend to an invertible matrix).
    fn propagate(&mut self, d: usize) -> bool {
        loop {
            let mut changed = false;
            for pi in 0..self.pairs.len() {
                let (i, j) = self.pairs[pi];
                let (im_i, im_j) = match (&self.images[i], &self.images[j]) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => continue,
                };
                let rhs = self.cod.bracket_coords(&im_i, &im_j);
                let coeffs: Vec<FieldElement> = self.dom.structure_coords(i, j).to_vec();
                let mut known = vec![self.dom.field().zero(); self.n];
                let mut unknown = Vec::new();
                for t in 0..self.n {
                    if coeffs[t].is_zero() {
                        continue;
                    }
                    match &self.images[t] {
                        Some(v) => {
                            for r in 0..self.n {
                                known[r] = known[r] + coeffs[t] * v[r];
                            }
                        }
                        None => unknown.push(t),
                    }
                }
                match unknown.len() {
                    0 => {
                        if known != rhs {
                            return false;
                        }
                    }
                    1 => {
                        let t = unknown[0];
                        let inv = coeffs[t].inv();
                        let img: Vec<FieldElement> =
                            (0..self.n).map(|r| (rhs[r] - known[r]) * inv).collect();
                        if img.iter().all(FieldElement::is_zero) {
                            return false;
                        }
                        self.images[t] = Some(img);
                        self.stack[d].derived.push(t);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn partial_independent(&self) -> bool {
        let assigned: Vec<Vec<FieldElement>> =
            self.images.iter().flatten().cloned().collect();
        if assigned.len() <= 1 {
            return true;
        }
        Matrix::from_rows(self.dom.field(), &assigned).rank() == assigned.len()
    }

    fn final_matrix(&self) -> Option<Matrix> {
        let m = Matrix::from_fn(self.dom.field(), self.n, self.n, |r, c| {
            self.images[c].as_ref().expect("all images assigned")[r]
        });
        if m.is_invertible() && bracket_preserving(&self.dom, &self.cod, &m) {
            Some(m)
        } else {
            None
        }
    }

    fn search(&mut self) -> Option<Matrix> {
        while !self.stack.is_empty() {
            let d = self.stack.len() - 1;
            self.undo_attempt(d);
            let pos = self.stack[d].pos;
            let idx = self.order[pos];
            if self.stack[d].forced {
                if self.stack[d].next > 0 {
                    self.stack.pop();
                    continue;
                }
                self.stack[d].next = 1;
            } else {
                let c = self.stack[d].next.max(1);
                if c >= self.qn {
                    self.stack.pop();
                    continue;
                }
                self.stack[d].next = c + 1;
                self.images[idx] = Some(self.vector(c));
            }

            self.candidates += 1;
            if self.candidates > self.max_candidates {
                self.truncated = true;
                self.finished = true;
                return None;
            }
            if self.candidates % 1024 == 0 {
                if let Some(deadline) = self.deadline {
                    if Instant::now() >= deadline {
                        self.truncated = true;
                        self.finished = true;
                        return None;
                    }
                }
            }

            if self.propagate(d) && self.partial_independent() {
                if self.stack.len() == self.n {
                    if let Some(m) = self.final_matrix() {
                        return Some(m);
                    }
                } else {
                    let next_pos = self.stack.len();
                    let forced = self.images[self.order[next_pos]].is_some();
                    self.stack.push(Frame { pos: next_pos, forced, next: 0, derived: Vec::new() });
                }
            }
        }
        self.finished = true;
        None
    }
}

impl Iterator for MorphismStream {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if self.finished {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.dom.dim() != self.cod.dim() || self.dom.field() != self.cod.field() {
                self.finished = true;
                return None;
            }
            self.stack.push(Frame { pos: 0, forced: false, next: 0, derived: Vec::new() });
        }
        self.search()
    }
}

/// All invertible bracket-preserving matrices `dom -> cod`, as a raw stream.
pub fn isomorphism_stream(dom: &LieAlgebra, cod: &LieAlgebra, budget: &SearchBudget) -> MorphismStream {
    MorphismStream::new(dom, cod, budget)
}

/// The automorphism stream of one algebra.
pub struct AutomorphismStream {
    inner: MorphismStream,
}

impl AutomorphismStream {
    pub fn truncated(&self) -> bool {
        self.inner.truncated()
    }

    pub fn candidates_tried(&self) -> u64 {
        self.inner.candidates_tried()
    }
}

impl Iterator for AutomorphismStream {
    type Item = Automorphism;

    fn next(&mut self) -> Option<Automorphism> {
        let m = self.inner.next()?;
        Some(Automorphism::from_verified(self.inner.dom().clone(), m))
    }
}

pub fn automorphisms(alg: &LieAlgebra, budget: &SearchBudget) -> AutomorphismStream {
    AutomorphismStream { inner: MorphismStream::new(alg, alg, budget) }
}

/// Collect the full automorphism group; an exhausted budget is an error
/// because a partial group is not a group.
pub fn automorphism_group(alg: &LieAlgebra, budget: &SearchBudget) -> Result<Vec<Automorphism>, IsoError> {
    let mut stream = automorphisms(alg, budget);
    let mut group = Vec::new();
    for phi in stream.by_ref() {
        group.push(phi);
    }
    if stream.truncated() {
        return Err(IsoError::BudgetExhausted { candidates: stream.candidates_tried() });
    }
    Ok(group)
}

/// A bracket-preserving invertible matrix `l1 -> l2`, or a certified absence
/// when the completed search (or an isomorphism-invariant mismatch) rules one
/// out. Cheap invariants are compared first: center dimension, derived
/// dimension, nilpotency, solvability.
pub fn lie_isomorphism(
    l1: &LieAlgebra,
    l2: &LieAlgebra,
    budget: &SearchBudget,
) -> Result<Option<Matrix>, IsoError> {
    if l1.field() != l2.field() {
        return Err(IsoError::Incompatible("the algebras live over different fields".into()));
    }
    if l1.dim() != l2.dim() {
        return Ok(None);
    }
    if l1 == l2 {
        return Ok(Some(Matrix::identity(l1.field(), l1.dim())));
    }
    if l1.center().dim() != l2.center().dim()
        || l1.derived().dim() != l2.derived().dim()
        || l1.is_nilpotent() != l2.is_nilpotent()
        || l1.is_solvable() != l2.is_solvable()
    {
        return Ok(None);
    }
    let mut stream = MorphismStream::new(l1, l2, budget);
    if let Some(m) = stream.next() {
        return Ok(Some(m));
    }
    if stream.truncated() {
        return Err(IsoError::BudgetExhausted { candidates: stream.candidates_tried() });
    }
    Ok(None)
}

/// An automorphism conjugating `m1` to `m2` (so phi . m1 . phi^{-1} = m2), or
/// a certified absence. Mismatching conjugacy-invariant profiles reject
/// without searching; a profile whose computation exceeds the enumeration
/// bound is simply skipped as a filter.
pub fn pmaps_conjugate(
    alg: &LieAlgebra,
    m1: &PSemilinearMap,
    m2: &PSemilinearMap,
    budget: &SearchBudget,
) -> Result<Option<Automorphism>, IsoError> {
    assert!(m1.algebra() == alg && m2.algebra() == alg, "maps must live on the given algebra");
    if !restricted::is_p_map(m1) || !restricted::is_p_map(m2) {
        return Err(IsoError::NotPMap);
    }
    if m1 == m2 {
        let id = Matrix::identity(alg.field(), alg.dim());
        return Ok(Some(Automorphism::from_verified(alg.clone(), id)));
    }
    let r1 = RestrictedLieAlgebra::new(alg, m1.clone()).expect("validated p-map");
    let r2 = RestrictedLieAlgebra::new(alg, m2.clone()).expect("validated p-map");
    if let (Ok(p1), Ok(p2)) =
        (restricted::invariant_profile(&r1, 3), restricted::invariant_profile(&r2, 3))
    {
        if p1 != p2 {
            return Ok(None);
        }
    }
    let n = alg.dim();
    let mut stream = MorphismStream::new(alg, alg, budget);
    for phi in stream.by_ref() {
        let inv = phi.inverse().expect("stream yields invertible matrices");
        let transported_matches = (0..n).all(|j| {
            let t = phi.mul_vec(&m1.eval_coords(&inv.col(j)));
            t.as_slice() == m2.image_coords(j)
        });
        if transported_matches {
            let conj = restricted::conjugate(m1, &phi).expect("stream yields automorphisms");
            if &conj == m2 {
                return Ok(Some(Automorphism::from_verified(alg.clone(), phi)));
            }
        }
    }
    if stream.truncated() {
        return Err(IsoError::BudgetExhausted { candidates: stream.candidates_tried() });
    }
    Ok(None)
}

/// The same algebra and structure constants over an extension field, together
/// with the embedding used to transport coefficients.
pub fn algebra_over_extension(
    alg: &LieAlgebra,
    dst: FieldDescriptor,
) -> Result<(LieAlgebra, FieldEmbedding), IsoError> {
    let emb = field_embedding(alg.field(), dst).ok_or_else(|| {
        IsoError::Incompatible(format!(
            "no embedding of {:?} into {:?}",
            alg.field(),
            dst
        ))
    })?;
    let names = alg.names();
    let mut brackets = Vec::new();
    for i in 0..alg.dim() {
        for j in i + 1..alg.dim() {
            let c = alg.structure_coords(i, j);
            if c.iter().any(|e| !e.is_zero()) {
                brackets.push((i, j, c.iter().map(|e| emb.map(*e)).collect()));
            }
        }
    }
    Ok((LieAlgebra::new(dst, &names, &brackets), emb))
}

/// Transport a p-semilinear map along a scalar extension: the basis images
/// keep their coordinates, read in the larger field.
pub fn pmap_over_extension(
    map: &PSemilinearMap,
    ext: &LieAlgebra,
    emb: &FieldEmbedding,
) -> PSemilinearMap {
    let images = (0..map.algebra().dim())
        .map(|j| map.image_coords(j).iter().map(|e| emb.map(*e)).collect())
        .collect();
    PSemilinearMap::new(ext, images)
}

/// Outcome of a conjugacy decision walked up the extension ladder. Absence is
/// always relative to the largest field actually searched.
pub enum LadderOutcome {
    Found { degree: u32, witness: Automorphism },
    AbsentUpTo { degree: u32 },
}

/// Decide conjugacy of two p-maps over each ladder field in turn. Ladder
/// degrees that do not contain the base field, or whose order exceeds the
/// field-order cap, are skipped; absence reports the largest degree tried.
pub fn pmaps_conjugate_ladder(
    alg: &LieAlgebra,
    m1: &PSemilinearMap,
    m2: &PSemilinearMap,
    budget: &SearchBudget,
) -> Result<LadderOutcome, IsoError> {
    assert!(
        !budget.ladder.is_empty() && budget.ladder.windows(2).all(|w| w[0] < w[1]),
        "ladder must be nonempty and strictly ascending"
    );
    let p = alg.field().characteristic();
    let base = alg.field().degree();
    let mut last_tried = None;
    for &k in &budget.ladder {
        if k % base != 0 {
            continue;
        }
        let dst = match field_make(p, k) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let (ext, emb) = algebra_over_extension(alg, dst)?;
        let em1 = pmap_over_extension(m1, &ext, &emb);
        let em2 = pmap_over_extension(m2, &ext, &emb);
        if let Some(witness) = pmaps_conjugate(&ext, &em1, &em2, budget)? {
            return Ok(LadderOutcome::Found { degree: k, witness });
        }
        last_tried = Some(k);
    }
    match last_tried {
        Some(degree) => Ok(LadderOutcome::AbsentUpTo { degree }),
        None => Err(IsoError::Incompatible(
            "no ladder degree is compatible with the base field".into(),
        )),
    }
}

/// An isomorphism of restricted Lie algebras: a Lie isomorphism g with
/// g . [p]_1 . g^{-1} = [p]_2 exactly. One Lie isomorphism suffices as the
/// transport: any other differs by an automorphism of the codomain, which the
/// conjugacy search ranges over.
pub fn restricted_isomorphic(
    r1: &RestrictedLieAlgebra,
    r2: &RestrictedLieAlgebra,
    budget: &SearchBudget,
) -> Result<Option<Matrix>, IsoError> {
    let (l1, l2) = (r1.algebra(), r2.algebra());
    if l1.field() != l2.field() {
        return Err(IsoError::Incompatible("the algebras live over different fields".into()));
    }
    if l1.dim() != l2.dim() {
        return Ok(None);
    }
    if l1 == l2 && r1.pmap() == r2.pmap() {
        return Ok(Some(Matrix::identity(l1.field(), l1.dim())));
    }
    let Some(g0) = lie_isomorphism(l1, l2, budget)? else {
        return Ok(None);
    };
    let g0_inv = g0.inverse().expect("isomorphism is invertible");
    let n = l1.dim();
    let images: Vec<Vec<FieldElement>> = (0..n)
        .map(|j| g0.mul_vec(&r1.pmap().eval_coords(&g0_inv.col(j))))
        .collect();
    let transported = PSemilinearMap::new(l2, images);
    let Some(phi) = pmaps_conjugate(l2, &transported, r2.pmap(), budget)? else {
        return Ok(None);
    };
    let g = phi.matrix() * &g0;
    let g_inv = g.inverse().expect("composition of invertibles");
    for j in 0..n {
        let lhs = g.mul_vec(&r1.pmap().eval_coords(&g_inv.col(j)));
        assert_eq!(
            lhs.as_slice(),
            r2.pmap().image_coords(j),
            "composed witness must transport the p-map exactly"
        );
    }
    Ok(Some(g))
}

/// First scalar k (in canonical field order) with k*a similar to b, together
/// with an invertible intertwiner P satisfying P (k a) P^{-1} = b. Similarity
/// is decided by invariant factors; the intertwiner comes from the kernel of
/// the associated linear system, searched in canonical order.
pub fn conjugate_up_to_scalar(a: &Matrix, b: &Matrix) -> Option<(Matrix, FieldElement)> {
    assert!(
        a.rows() == a.cols() && b.rows() == b.cols() && a.rows() == b.rows(),
        "matrices must be square and of equal size"
    );
    assert!(a.field() == b.field(), "matrices must share a field");
    let f = a.field();
    for k in f.nonzero_elements() {
        let ka = a.scale(k);
        if &ka == b {
            return Some((Matrix::identity(f, a.rows()), k));
        }
        if ka.similar(b) {
            return Some((intertwiner(&ka, b), k));
        }
    }
    None
}

/// An invertible P with P a = b P, given that a and b are similar. Exhaustive
/// over the solution space when small; otherwise a support-bounded sweep over
/// the canonical kernel basis followed by a deterministic pseudorandom sweep.
fn intertwiner(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let f = a.field();
    let mut sys = Matrix::zero(f, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for t in 0..n {
                sys[(row, i * n + t)] = sys[(row, i * n + t)] + a[(t, j)];
                sys[(row, t * n + j)] = sys[(row, t * n + j)] - b[(i, t)];
            }
        }
    }
    let kernel = sys.kernel();
    let basis = kernel.basis_rows();
    let d = basis.len();
    let q = f.order();
    let unvec = |v: &[FieldElement]| Matrix::from_fn(f, n, n, |i, j| v[i * n + j]);
    let combine = |coeffs: &[FieldElement]| {
        let mut v = vec![f.zero(); n * n];
        for (c, row) in coeffs.iter().zip(&basis) {
            if c.is_zero() {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi = *vi + *c * *ri;
            }
        }
        unvec(&v)
    };
    let total = (0..d).try_fold(1u128, |acc, _| acc.checked_mul(q as u128));
    if let Some(total) = total.filter(|&t| t <= MAX_FIELD_ORDER as u128) {
        for idx in 1..total {
            let mut c = idx;
            let coeffs: Vec<FieldElement> = (0..d)
                .map(|_| {
                    let digit = (c % q as u128) as u64;
                    c /= q as u128;
                    f.from_index(digit)
                })
                .collect();
            let m = combine(&coeffs);
            if m.is_invertible() {
                return m;
            }
        }
    } else {
        for row in &basis {
            let m = unvec(row);
            if m.is_invertible() {
                return m;
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for c in f.nonzero_elements() {
                    let mut coeffs = vec![f.zero(); d];
                    coeffs[i] = f.one();
                    coeffs[j] = c;
                    let m = combine(&coeffs);
                    if m.is_invertible() {
                        return m;
                    }
                }
            }
        }
        let mut state: u64 = 0x9E3779B97F4A7C15;
        let mut step = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..65536 {
            let coeffs: Vec<FieldElement> = (0..d).map(|_| f.from_index(step() % q)).collect();
            let m = combine(&coeffs);
            if m.is_invertible() {
                return m;
            }
        }
    }
    unreachable!("similar matrices admit an invertible intertwiner; search bounds exceeded")
}

fn ints(f: FieldDescriptor, v: [i64; 4]) -> Vec<FieldElement> {
    v.iter().map(|&c| f.from_int(c)).collect()
}

const BASIS: [&str; 4] = ["x", "y", "z", "w"];

fn family_l2(f: FieldDescriptor) -> LieAlgebra {
    LieAlgebra::new(f, &BASIS, &[(3, 0, ints(f, [0, 1, 0, 0]))])
}

fn family_l3(f: FieldDescriptor) -> LieAlgebra {
    LieAlgebra::new(f, &BASIS, &[(3, 0, ints(f, [0, 1, 0, 0])), (3, 1, ints(f, [0, 0, 1, 0]))])
}

fn family_l4(f: FieldDescriptor) -> LieAlgebra {
    LieAlgebra::new(f, &BASIS, &[(3, 0, ints(f, [1, 0, 0, 0]))])
}

fn family_l5(f: FieldDescriptor, xi: FieldElement) -> LieAlgebra {
    let xi_y = vec![f.zero(), xi, f.zero(), f.zero()];
    LieAlgebra::new(f, &BASIS, &[(3, 0, ints(f, [1, 0, 0, 0])), (3, 1, xi_y)])
}

fn family_n4(f: FieldDescriptor) -> LieAlgebra {
    LieAlgebra::new(
        f,
        &BASIS,
        &[(2, 0, ints(f, [0, 1, 0, 0])), (3, 0, ints(f, [0, 0, 1, 0])), (3, 2, ints(f, [1, 0, 0, 0]))],
    )
}

fn family_gl2(f: FieldDescriptor) -> LieAlgebra {
    LieAlgebra::new(
        f,
        &BASIS,
        &[(1, 0, ints(f, [0, 0, -1, 0])), (2, 0, ints(f, [2, 0, 0, 0])), (2, 1, ints(f, [0, -2, 0, 0]))],
    )
}

fn columns(f: FieldDescriptor, cols: [[FieldElement; 4]; 4]) -> Matrix {
    Matrix::from_fn(f, 4, 4, |i, j| cols[j][i])
}

fn entry_key(m: &Matrix) -> Vec<u64> {
    let mut key = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            key.push(m[(i, j)].index());
        }
    }
    key
}

fn tuples(f: FieldDescriptor, len: usize) -> impl Iterator<Item = Vec<FieldElement>> {
    let q = f.order() as u128;
    let total = (0..len).fold(1u128, |acc, _| acc * q);
    (0..total).map(move |mut c| {
        (0..len)
            .map(|_| {
                let d = (c % q) as u64;
                c /= q;
                f.from_index(d)
            })
            .collect()
    })
}

fn parameterized_set(family: &str, f: FieldDescriptor) -> Result<BTreeSet<Vec<u64>>, IsoError> {
    let z = f.zero();
    let one = f.one();
    let mut set = BTreeSet::new();
    match family {
        "L2" => {
            for t in tuples(f, 10) {
                let [a1, a2, a3, a4, c2, c3, d1, d2, d3, d4] = t[..] else { unreachable!() };
                let b = a1 * d4 - a4 * d1;
                if (b * c3).is_zero() {
                    continue;
                }
                set.insert(entry_key(&columns(
                    f,
                    [[a1, a2, a3, a4], [z, b, z, z], [z, c2, c3, z], [d1, d2, d3, d4]],
                )));
            }
        }
        "L3" => {
            for t in tuples(f, 7) {
                let [a1, a2, a3, d1, d2, d3, d4] = t[..] else { unreachable!() };
                if (a1 * d4).is_zero() {
                    continue;
                }
                set.insert(entry_key(&columns(
                    f,
                    [
                        [a1, a2, a3, z],
                        [z, a1 * d4, a2 * d4, z],
                        [z, z, a1 * d4 * d4, z],
                        [d1, d2, d3, d4],
                    ],
                )));
            }
        }
        "L4" => {
            for t in tuples(f, 8) {
                let [a1, b2, b3, c2, c3, d1, d2, d3] = t[..] else { unreachable!() };
                if (a1 * (b2 * c3 - b3 * c2)).is_zero() {
                    continue;
                }
                set.insert(entry_key(&columns(
                    f,
                    [[a1, z, z, z], [z, b2, b3, z], [z, c2, c3, z], [d1, d2, d3, one]],
                )));
            }
        }
        "L5" => unreachable!("handled per parameter value"),
        "N4" => {
            for t in tuples(f, 6) {
                let [a1, c1, d1, d2, d3, d4] = t[..] else { unreachable!() };
                if d4 * d4 != one || (a1 * a1 - c1 * c1).is_zero() {
                    continue;
                }
                set.insert(entry_key(&columns(
                    f,
                    [
                        [a1, c1 * d3 - a1 * d1 * d4, d4 * c1, z],
                        [z, (a1 * a1 - c1 * c1) * d4, z, z],
                        [c1, a1 * d3 - c1 * d1 * d4, d4 * a1, z],
                        [d1, d2, d3, d4],
                    ],
                )));
            }
        }
        "gl2" => {
            let two = f.from_int(2);
            for t in tuples(f, 10) {
                let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d4] = t[..] else { unreachable!() };
                let relations = [
                    a1 * c3 - a3 * c1 - a1,
                    a3 * c2 - a2 * c3 - a2,
                    a2 * c1 - a1 * c2 - two * a3,
                    b3 * c1 - b1 * c3 - b1,
                    b2 * c3 - b3 * c2 - b2,
                    b1 * c2 - b2 * c1 - two * b3,
                    two * a3 * b1 - two * a1 * b3 - c1,
                    two * a2 * b3 - two * a3 * b2 - c2,
                    a1 * b2 - a2 * b1 - c3,
                ];
                if relations.iter().any(|r| !r.is_zero()) {
                    continue;
                }
                let det = a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2)
                    + c1 * (a2 * b3 - a3 * b2);
                if (det * d4).is_zero() {
                    continue;
                }
                set.insert(entry_key(&columns(
                    f,
                    [[a1, a2, a3, z], [b1, b2, b3, z], [c1, c2, c3, z], [z, z, z, d4]],
                )));
            }
        }
        other => return Err(IsoError::UnknownFamily(other.to_string())),
    }
    Ok(set)
}

fn l5_parameterized_set(f: FieldDescriptor, xi: FieldElement) -> BTreeSet<Vec<u64>> {
    let z = f.zero();
    let one = f.one();
    let mut set = BTreeSet::new();
    for t in tuples(f, 9) {
        let [a1, a2, b1, b2, c3, d1, d2, d3, d4] = t[..] else { unreachable!() };
        let constraints = [
            a1 * (d4 - one),
            a2 * (xi * d4 - one),
            b1 * (d4 - xi),
            b2 * (d4 - one),
        ];
        if constraints.iter().any(|c| !c.is_zero()) {
            continue;
        }
        if ((a1 * b2 - a2 * b1) * c3).is_zero() {
            continue;
        }
        set.insert(entry_key(&columns(
            f,
            [[a1, a2, z, z], [b1, b2, z, z], [z, z, c3, z], [d1, d2, d3, d4]],
        )));
    }
    set
}

fn brute_force_set(alg: &LieAlgebra) -> BTreeSet<Vec<u64>> {
    let budget = SearchBudget::default();
    let mut stream = MorphismStream::new(alg, alg, &budget);
    let mut set = BTreeSet::new();
    for m in stream.by_ref() {
        set.insert(entry_key(&m));
    }
    assert!(!stream.truncated(), "unlimited budget cannot truncate");
    set
}

/// Check one family's closed-form automorphism parameterization against the
/// brute-force stream, element for element, over F_q. Families: L2, L3, L4,
/// L5 (checked for every nonzero parameter), N4, gl2 (characteristic >= 3).
pub fn verify_parameterization(family: &str, q: u64) -> Result<bool, IsoError> {
    assert!(matches!(q, 2 | 3 | 4), "exhaustive verification is limited to q in {{2, 3, 4}}");
    let (p, k) = if q == 4 { (2, 2) } else { (q, 1) };
    let f = field_make(p, k).expect("small field");
    match family {
        "L5" => {
            for xi in f.nonzero_elements() {
                let alg = family_l5(f, xi);
                if l5_parameterized_set(f, xi) != brute_force_set(&alg) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        "gl2" => {
            if p < 3 {
                return Err(IsoError::CharMismatch { family: family.to_string(), p });
            }
            Ok(parameterized_set(family, f)? == brute_force_set(&family_gl2(f)))
        }
        "L2" | "L3" | "L4" | "N4" => {
            let alg = match family {
                "L2" => family_l2(f),
                "L3" => family_l3(f),
                "L4" => family_l4(f),
                _ => family_n4(f),
            };
            Ok(parameterized_set(family, f)? == brute_force_set(&alg))
        }
        other => Err(IsoError::UnknownFamily(other.to_string())),
    }
}

impl From<RestrictedError> for IsoError {
    fn from(e: RestrictedError) -> IsoError {
        match e {
            RestrictedError::NotPMap => IsoError::NotPMap,
            RestrictedError::NotAutomorphism => IsoError::NotAutomorphism,
            RestrictedError::EnumerationBound(count, max) => {
                IsoError::Incompatible(format!("enumeration bound exceeded: {count} > {max}"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::parse_algebra;

    fn f(p: u64, k: u32) -> FieldDescriptor {
        field_make(p, k).unwrap()
    }

    fn abelian(p: u64) -> LieAlgebra {
        parse_algebra(&format!("p={p}\ndim=4\nbasis=x y z w\n")).unwrap()
    }

    #[test]
    fn gl4_count_over_f2() {
        let group = automorphism_group(&abelian(2), &SearchBudget::default()).unwrap();
        assert_eq!(group.len(), 20160);
    }

    #[test]
    fn aut_l2_counts() {
        let g2 = automorphism_group(&family_l2(f(2, 1)), &SearchBudget::default()).unwrap();
        assert_eq!(g2.len(), 192);
        let g3 = automorphism_group(&family_l2(f(3, 1)), &SearchBudget::default()).unwrap();
        assert_eq!(g3.len(), 23328);
    }

    #[test]
    fn gl2_automorphisms_have_unimodular_block() {
        let alg = family_gl2(f(3, 1));
        let group = automorphism_group(&alg, &SearchBudget::default()).unwrap();
        assert_eq!(group.len(), 48);
        for phi in &group {
            let m = phi.matrix();
            let block = Matrix::from_fn(alg.field(), 3, 3, |i, j| m[(i, j)]);
            assert!(block.det().is_one());
        }
    }

    #[test]
    fn stream_matches_unpruned_filter_at_q2() {
        let field = f(2, 1);
        let algebras = [
            abelian(2),
            family_l2(field),
            family_l3(field),
            family_l4(field),
            family_l5(field, field.one()),
            family_n4(field),
            family_gl2(field),
        ];
        for alg in &algebras {
            let pruned = brute_force_set(alg);
            let mut unpruned = 0usize;
            for idx in 0..1u64 << 16 {
                let mut c = idx;
                let m = Matrix::from_fn(field, 4, 4, |_, _| {
                    let e = field.from_index(c & 1);
                    c >>= 1;
                    e
                });
                if m.is_invertible() && bracket_preserving(alg, alg, &m) {
                    unpruned += 1;
                    assert!(pruned.contains(&entry_key(&m)));
                }
            }
            assert_eq!(pruned.len(), unpruned);
        }
    }

    #[test]
    fn stream_is_deterministic() {
        let alg = family_l2(f(3, 1));
        let take = |n: usize| -> Vec<Matrix> {
            automorphisms(&alg, &SearchBudget::default())
                .take(n)
                .map(Automorphism::into_matrix)
                .collect()
        };
        assert_eq!(take(50), take(50));
    }

    #[test]
    fn truncation_is_signalled() {
        let alg = abelian(2);
        let budget = SearchBudget::limited(100);
        let mut stream = automorphisms(&alg, &budget);
        let found = stream.by_ref().count();
        assert!(stream.truncated());
        assert!(found < 20160);
        assert!(matches!(
            automorphism_group(&alg, &budget),
            Err(IsoError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn lie_isomorphism_examples() {
        let budget = SearchBudget::default();
        let l2 = family_l2(f(3, 1));
        let id = lie_isomorphism(&l2, &l2, &budget).unwrap().unwrap();
        assert_eq!(id, Matrix::identity(l2.field(), 4));

        let f7 = f(7, 1);
        let l5a = family_l5(f7, f7.from_int(2));
        let l5b = family_l5(f7, f7.from_int(4));
        let g = lie_isomorphism(&l5a, &l5b, &budget).unwrap().unwrap();
        assert!(g.is_invertible() && bracket_preserving(&l5a, &l5b, &g));

        let l3 = family_l3(f(3, 1));
        assert!(lie_isomorphism(&family_l2(f(3, 1)), &l3, &budget).unwrap().is_none());
    }

    #[test]
    fn pmap_conjugacy_examples() {
        let budget = SearchBudget::default();
        let l2 = family_l2(f(2, 1));
        let trivial = PSemilinearMap::trivial(&l2);
        let w_to_y = PSemilinearMap::new(
            &l2,
            vec![
                ints(l2.field(), [0, 0, 0, 0]),
                ints(l2.field(), [0, 0, 0, 0]),
                ints(l2.field(), [0, 0, 0, 0]),
                ints(l2.field(), [0, 1, 0, 0]),
            ],
        );
        let witness = pmaps_conjugate(&l2, &trivial, &w_to_y, &budget).unwrap();
        assert!(witness.is_some());

        let l2f3 = family_l2(f(3, 1));
        let field = l2f3.field();
        let y_to_y = PSemilinearMap::new(
            &l2f3,
            vec![
                ints(field, [0, 0, 0, 0]),
                ints(field, [0, 1, 0, 0]),
                ints(field, [0, 0, 0, 0]),
                ints(field, [0, 0, 0, 0]),
            ],
        );
        let y_to_y_plus_z = PSemilinearMap::new(
            &l2f3,
            vec![
                ints(field, [0, 0, 0, 0]),
                ints(field, [0, 1, 1, 0]),
                ints(field, [0, 0, 0, 0]),
                ints(field, [0, 0, 0, 0]),
            ],
        );
        assert!(pmaps_conjugate(&l2f3, &y_to_y, &y_to_y_plus_z, &budget).unwrap().is_none());
    }

    #[test]
    fn identical_pmaps_conjugate_by_identity() {
        let l2 = family_l2(f(2, 1));
        let trivial = PSemilinearMap::trivial(&l2);
        let w = pmaps_conjugate(&l2, &trivial, &trivial, &SearchBudget::default())
            .unwrap()
            .unwrap();
        assert_eq!(*w.matrix(), Matrix::identity(l2.field(), 4));
    }

    #[test]
    fn scalar_conjugacy_examples() {
        let f7 = f(7, 1);
        let diag = |field: FieldDescriptor, v: [i64; 3]| {
            Matrix::from_fn(field, 3, 3, |i, j| {
                if i == j {
                    field.from_int(v[i])
                } else {
                    field.zero()
                }
            })
        };
        let a = diag(f7, [1, 2, 0]);
        let (p_id, k) = conjugate_up_to_scalar(&a, &a).unwrap();
        assert!(k.is_one());
        assert_eq!(p_id, Matrix::identity(f7, 3));

        let b = diag(f7, [1, 4, 0]);
        let (p, k) = conjugate_up_to_scalar(&a, &b).unwrap();
        assert_eq!(k, f7.from_int(4));
        let ka = a.scale(k);
        let p_inv = p.inverse().unwrap();
        assert_eq!(&(&p * &ka) * &p_inv, b);

        let f5 = f(5, 1);
        let jordan = |field: FieldDescriptor, c: i64| {
            let mut m = Matrix::zero(field, 3, 3);
            m[(0, 0)] = field.one();
            m[(1, 0)] = field.one();
            m[(1, 1)] = field.one();
            m[(2, 2)] = field.from_int(c);
            m
        };
        assert!(conjugate_up_to_scalar(&jordan(f5, 1), &jordan(f5, 2)).is_none());
    }

    #[test]
    fn restricted_isomorphism_swaps_l5_parameters() {
        let budget = SearchBudget::default();
        let f7 = f(7, 1);
        let l5a = family_l5(f7, f7.from_int(2));
        let l5b = family_l5(f7, f7.from_int(4));
        let x_to_z = |alg: &LieAlgebra| {
            PSemilinearMap::new(
                alg,
                vec![
                    ints(f7, [0, 0, 1, 0]),
                    ints(f7, [0, 0, 0, 0]),
                    ints(f7, [0, 0, 0, 0]),
                    ints(f7, [0, 0, 0, 1]),
                ],
            )
        };
        let y_to_z = |alg: &LieAlgebra| {
            PSemilinearMap::new(
                alg,
                vec![
                    ints(f7, [0, 0, 0, 0]),
                    ints(f7, [0, 0, 1, 0]),
                    ints(f7, [0, 0, 0, 0]),
                    ints(f7, [0, 0, 0, 1]),
                ],
            )
        };
        let r1 = RestrictedLieAlgebra::new(&l5a, x_to_z(&l5a)).unwrap();
        let r2 = RestrictedLieAlgebra::new(&l5b, y_to_z(&l5b)).unwrap();
        let g = restricted_isomorphic(&r1, &r2, &budget).unwrap();
        assert!(g.is_some());

        let u1 = RestrictedLieAlgebra::new(&l5a, y_to_z(&l5a)).unwrap();
        let u2 = RestrictedLieAlgebra::new(&l5b, y_to_z(&l5b)).unwrap();
        assert!(restricted_isomorphic(&u1, &u2, &budget).unwrap().is_none());
    }

    #[test]
    fn parameterizations_match_brute_force() {
        for family in ["L2", "L3", "L4", "L5", "N4"] {
            for q in [2, 3] {
                assert!(
                    verify_parameterization(family, q).unwrap(),
                    "family {family} over F_{q}"
                );
            }
        }
        assert!(verify_parameterization("gl2", 3).unwrap());
        assert!(matches!(
            verify_parameterization("gl2", 2),
            Err(IsoError::CharMismatch { .. })
        ));
        assert!(matches!(
            verify_parameterization("nope", 2),
            Err(IsoError::UnknownFamily(_))
        ));
    }

    #[test]
    fn ladder_finds_conjugacy_over_extension() {
        // On the one-dimensional abelian algebra over F_3, transporting
        // y -> y by phi(y) = s y gives y -> s^{-2} y, so reaching y -> 2y
        // needs a square root of 2 and the ladder must climb to F_9.
        let field = f(3, 1);
        let alg = parse_algebra("p=3\ndim=1\nbasis=y\n").unwrap();
        let m1 = PSemilinearMap::new(&alg, vec![vec![field.one()]]);
        let m2 = PSemilinearMap::new(&alg, vec![vec![field.from_int(2)]]);
        let budget = SearchBudget::default();
        match pmaps_conjugate_ladder(&alg, &m1, &m2, &budget).unwrap() {
            LadderOutcome::Found { degree, witness } => {
                assert_eq!(degree, 2);
                let s = witness.matrix()[(0, 0)];
                assert_eq!(s * s, witness.algebra().field().from_int(2).inv());
            }
            LadderOutcome::AbsentUpTo { .. } => panic!("expected a witness over F_9"),
        }
    }

    #[test]
    fn ladder_reports_absence_with_largest_degree() {
        let field = f(3, 1);
        let alg = parse_algebra("p=3\ndim=1\nbasis=y\n").unwrap();
        let m1 = PSemilinearMap::new(&alg, vec![vec![field.one()]]);
        let m2 = PSemilinearMap::new(&alg, vec![vec![field.from_int(2)]]);
        let budget = SearchBudget { ladder: vec![1], ..SearchBudget::default() };
        match pmaps_conjugate_ladder(&alg, &m1, &m2, &budget).unwrap() {
            LadderOutcome::AbsentUpTo { degree } => assert_eq!(degree, 1),
            LadderOutcome::Found { .. } => panic!("no witness exists over F_3"),
        }
    }

    #[test]
    fn extension_transport_preserves_structure() {
        let l2 = family_l2(f(2, 1));
        let f4 = f(2, 2);
        let (ext, emb) = algebra_over_extension(&l2, f4).unwrap();
        assert_eq!(ext.field(), f4);
        assert!(ext.is_jacobi());
        let m = PSemilinearMap::new(
            &l2,
            vec![
                ints(l2.field(), [0, 0, 0, 0]),
                ints(l2.field(), [0, 1, 0, 0]),
                ints(l2.field(), [0, 0, 1, 0]),
                ints(l2.field(), [0, 0, 0, 0]),
            ],
        );
        assert!(restricted::is_p_map(&m));
        let em = pmap_over_extension(&m, &ext, &emb);
        assert!(restricted::is_p_map(&em));
    }
}
