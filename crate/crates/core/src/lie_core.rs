//! Lie algebras given by structure constants: brackets, adjoints, Jacobi
//! checking, center/derived subalgebra, nilpotency and solvability, the
//! nilradical at small field orders, and the algebra file parser.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::substrate::{field_make, FieldDescriptor, FieldElement, Matrix, Subspace};

/// Dimension headroom over the classification's n = 4.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("subspace enumeration bound exceeded: q^n = {0} > 2^16")]
    EnumerationBound(u64),
}

impl LieError {
    fn parse(line: usize, col: usize, msg: impl Into<String>) -> LieError {
        LieError::Parse { line, col, msg: msg.into() }
    }
}

#[derive(PartialEq, Eq)]
struct LieInner {
    field: FieldDescriptor,
    dim: usize,
    names: Vec<String>,
    /// structure[i][j] = coordinates of [e_i, e_j]; antisymmetric in (i, j).
    structure: Vec<Vec<Vec<FieldElement>>>,
}

/// A finite-dimensional Lie algebra over a finite field, presented by
/// structure constants on a named basis. Cheap to clone (shared immutable
/// data); equality compares field, dimension and structure constants.
#[derive(Clone)]
pub struct LieAlgebra {
    inner: Arc<LieInner>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.field == other.inner.field
                && self.inner.dim == other.inner.dim
                && self.inner.structure == other.inner.structure)
    }
}
impl Eq for LieAlgebra {}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LieAlgebra(dim {} over {:?}, basis {})",
            self.inner.dim,
            self.inner.field,
            self.inner.names.join(" ")
        )
    }
}

impl LieAlgebra {
    /// Build from one-orientation bracket declarations; the other orientation
    /// is filled by antisymmetry. Unspecified brackets are zero.
    pub fn new(
        field: FieldDescriptor,
        names: &[&str],
        brackets: &[(usize, usize, Vec<FieldElement>)],
    ) -> LieAlgebra {
        let dim = names.len();
        assert!(dim >= 1 && dim <= MAX_DIM, "dimension out of range");
        let zero = vec![field.zero(); dim];
        let mut structure = vec![vec![zero.clone(); dim]; dim];
        let mut declared = vec![vec![false; dim]; dim];
        for (i, j, coords) in brackets {
            let (i, j) = (*i, *j);
            assert!(i < dim && j < dim, "basis index out of range");
            assert!(i != j, "bracket of a basis vector with itself");
            assert!(
                !declared[i][j] && !declared[j][i],
                "bracket [{},{}] declared twice",
                names[i],
                names[j]
            );
            assert_eq!(coords.len(), dim, "bracket value dimension mismatch");
            declared[i][j] = true;
            declared[j][i] = true;
            structure[i][j] = coords.clone();
            structure[j][i] = coords.iter().map(|c| -*c).collect();
        }
        LieAlgebra { inner: Arc::new(LieInner { field, dim, names: names.iter().map(|s| s.to_string()).collect(), structure }) }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.inner.field
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn names(&self) -> Vec<&str> {
        self.inner.names.iter().map(String::as_str).collect()
    }

    pub fn name_index(&self, name: &str) -> Option<usize> {
        self.inner.names.iter().position(|n| n == name)
    }

    /// Coordinates of [e_i, e_j].
    pub fn structure_coords(&self, i: usize, j: usize) -> &[FieldElement] {
        &self.inner.structure[i][j]
    }

    pub fn zero_element(&self) -> LieElement {
        LieElement { algebra: self.clone(), coords: vec![self.field().zero(); self.dim()] }
    }

    pub fn basis_element(&self, i: usize) -> LieElement {
        assert!(i < self.dim());
        let mut coords = vec![self.field().zero(); self.dim()];
        coords[i] = self.field().one();
        LieElement { algebra: self.clone(), coords }
    }

    pub fn element(&self, coords: Vec<FieldElement>) -> LieElement {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        LieElement { algebra: self.clone(), coords }
    }

    pub fn element_from_ints(&self, coords: &[i64]) -> LieElement {
        let f = self.field();
        self.element(coords.iter().map(|&c| f.from_int(c)).collect())
    }

    /// Bracket on raw coordinate vectors.
    pub fn bracket_coords(&self, u: &[FieldElement], v: &[FieldElement]) -> Vec<FieldElement> {
        let n = self.dim();
        let f = self.field();
        let mut out = vec![f.zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let c = u[i] * v[j];
                for (o, s) in out.iter_mut().zip(&self.inner.structure[i][j]) {
                    *o = *o + c * *s;
                }
            }
        }
        out
    }

    /// Matrix of ad(u): column j holds the coordinates of [u, e_j].
    pub fn ad_matrix_coords(&self, u: &[FieldElement]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zero(self.field(), n, n);
        for j in 0..n {
            let mut col = vec![self.field().zero(); n];
            for i in 0..n {
                if u[i].is_zero() {
                    continue;
                }
                for (c, s) in col.iter_mut().zip(&self.inner.structure[i][j]) {
                    *c = *c + u[i] * *s;
                }
            }
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// All Jacobi violations. For every unordered basis triple whose cyclic
    /// Jacobiator J(a,b,c) = [a,[b,c]] + [b,[c,a]] + [c,[a,b]] is nonzero,
    /// both orientation classes are reported (rotated to start at the largest
    /// basis index), each with its own Jacobiator.
    pub fn check_jacobi(&self) -> Vec<JacobiViolation> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.basis_element(i).coords;
                    let b = self.basis_element(j).coords;
                    let c = self.basis_element(k).coords;
                    let jac = |x: &[FieldElement], y: &[FieldElement], z: &[FieldElement]| {
                        let mut t = self.bracket_coords(x, &self.bracket_coords(y, z));
                        for (t, u) in t
                            .iter_mut()
                            .zip(self.bracket_coords(y, &self.bracket_coords(z, x)))
                        {
                            *t = *t + u;
                        }
                        for (t, u) in t
                            .iter_mut()
                            .zip(self.bracket_coords(z, &self.bracket_coords(x, y)))
                        {
                            *t = *t + u;
                        }
                        t
                    };
                    let forward = jac(&c, &a, &b);
                    if forward.iter().any(|e| !e.is_zero()) {
                        let backward = jac(&c, &b, &a);
                        out.push(JacobiViolation {
                            triple: (k, i, j),
                            jacobiator: self.element(forward),
                        });
                        out.push(JacobiViolation {
                            triple: (k, j, i),
                            jacobiator: self.element(backward),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_jacobi(&self) -> bool {
        self.check_jacobi().is_empty()
    }

    /// The center as the joint kernel of all ad(e_j).
    pub fn center(&self) -> Subspace {
        let n = self.dim();
        let mut stacked = Matrix::zero(self.field(), n * n, n);
        for j in 0..n {
            let ad = self.ad_matrix_coords(&self.basis_element(j).coords);
            for r in 0..n {
                for c in 0..n {
                    stacked[(j * n + r, c)] = ad[(r, c)];
                }
            }
        }
        stacked.kernel()
    }

    /// The derived subalgebra [L, L] as the span of all basis brackets.
    pub fn derived(&self) -> Subspace {
        let n = self.dim();
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                rows.push(self.inner.structure[i][j].clone());
            }
        }
        Subspace::from_spanning(self.field(), n, &rows)
    }

    /// Span of [u, v] over basis pairs of two subspaces.
    pub fn product_space(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut rows = Vec::new();
        for u in a.basis_rows() {
            for v in b.basis_rows() {
                rows.push(self.bracket_coords(&u, &v));
            }
        }
        Subspace::from_spanning(self.field(), self.dim(), &rows)
    }

    pub fn is_nilpotent(&self) -> bool {
        let full = Subspace::full(self.field(), self.dim());
        let mut term = full.clone();
        loop {
            let next = self.product_space(&full, &term);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() == term.dim() {
                return false;
            }
            term = next;
        }
    }

    pub fn is_solvable(&self) -> bool {
        let mut term = Subspace::full(self.field(), self.dim());
        loop {
            let next = self.product_space(&term, &term);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() == term.dim() {
                return false;
            }
            term = next;
        }
    }

    fn is_ideal(&self, v: &Subspace) -> bool {
        for j in 0..self.dim() {
            let e = self.basis_element(j).coords;
            for row in v.basis_rows() {
                if !v.contains(&self.bracket_coords(&e, &row)) {
                    return false;
                }
            }
        }
        true
    }

    fn subspace_is_nilpotent(&self, v: &Subspace) -> bool {
        let mut term = v.clone();
        loop {
            let next = self.product_space(v, &term);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() == term.dim() && term.contains_subspace(&next) {
                return false;
            }
            term = next;
        }
    }

    /// The unique maximal nilpotent ideal, found by enumerating all subspaces
    /// (bounded to q^n <= 2^16), filtering to nilpotent ideals, and taking
    /// the maximum under containment. Uniqueness of the maximum is asserted.
    pub fn nilradical(&self) -> Result<Subspace, LieError> {
        let q = self.field().order();
        let n = self.dim() as u32;
        let bound = q.checked_pow(n).unwrap_or(u64::MAX);
        if bound > crate::substrate::MAX_EXHAUSTIVE {
            return Err(LieError::EnumerationBound(bound));
        }
        let mut nilpotent_ideals: Vec<Subspace> = Vec::new();
        for v in enumerate_subspaces(self.field(), self.dim()) {
            if self.is_ideal(&v) && self.subspace_is_nilpotent(&v) {
                nilpotent_ideals.push(v);
            }
        }
        let best = nilpotent_ideals
            .iter()
            .max_by_key(|v| v.dim())
            .expect("the zero ideal is always nilpotent")
            .clone();
        for v in &nilpotent_ideals {
            assert!(
                best.contains_subspace(v),
                "maximal nilpotent ideal fails to contain a nilpotent ideal"
            );
        }
        Ok(best)
    }
}

/// One Jacobi failure: an oriented basis triple and its Jacobiator.
#[derive(Clone, Debug)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub jacobiator: LieElement,
}

/// All increasing d-tuples from 0..n.
pub fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut current = (0..d).collect::<Vec<usize>>();
    loop {
        out.push(current.clone());
        let mut i = d;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if current[i] < i + n - d {
                current[i] += 1;
                for j in i + 1..d {
                    current[j] = current[j - 1] + 1;
                }
                break true;
            }
        };
        if !advanced {
            return out;
        }
    }
}

/// Every linear subspace of F_q^n, via reduced-row-echelon bases.
pub fn enumerate_subspaces(field: FieldDescriptor, n: usize) -> Vec<Subspace> {
    let q = field.order();
    let mut out = vec![Subspace::zero_space(field, n)];
    for d in 1..=n {
        for pivots in combinations(n, d) {
            // free positions: (row i, col c) with c not a pivot, c > pivots[i]
            let free: Vec<(usize, usize)> = (0..d)
                .flat_map(|i| {
                    (pivots[i] + 1..n)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (i, c))
                })
                .collect();
            let total = q.pow(free.len() as u32);
            for mut idx in 0..total {
                let mut rows = vec![vec![field.zero(); n]; d];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = field.one();
                }
                for &(i, c) in &free {
                    rows[i][c] = field.from_index(idx % q);
                    idx /= q;
                }
                out.push(Subspace::from_spanning(field, n, &rows));
            }
        }
    }
    out
}

/// An element of a Lie algebra: a coordinate vector in the declared basis.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    algebra: LieAlgebra,
    coords: Vec<FieldElement>,
}

impl LieElement {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(FieldElement::is_zero)
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        assert!(self.algebra == other.algebra, "algebra mismatch");
        self.algebra.element(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| *a + *b)
                .collect(),
        )
    }

    pub fn scale(&self, c: FieldElement) -> LieElement {
        self.algebra
            .element(self.coords.iter().map(|a| *a * c).collect())
    }

    pub fn neg(&self) -> LieElement {
        self.scale(self.algebra.field().from_int(-1))
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", lincomb_string(&self.algebra.names(), &self.coords))
    }
}

/// Bracket of two elements of the same algebra.
pub fn bracket(u: &LieElement, v: &LieElement) -> LieElement {
    assert!(u.algebra == v.algebra, "algebra mismatch");
    let coords = u.algebra.bracket_coords(&u.coords, &v.coords);
    u.algebra.element(coords)
}

/// Matrix of ad(u) acting on coordinates.
pub fn ad_matrix(u: &LieElement) -> Matrix {
    u.algebra.ad_matrix_coords(&u.coords)
}

/// Serialize a coordinate vector as a linear combination in the algebra file
/// grammar. Extension-field coefficients are expanded into g-power terms with
/// integer repetition, so the output always re-parses to the same vector.
pub fn lincomb_string(names: &[&str], coords: &[FieldElement]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (name, c) in names.iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        if c.in_prime_subfield() {
            let r = c.digits()[0];
            if r == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{r}*{name}"));
            }
        } else {
            for (e, d) in c.digits().into_iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let g = if e == 1 { "g".to_string() } else { format!("g^{e}") };
                if d == 1 {
                    parts.push(format!("{g}*{name}"));
                } else {
                    parts.push(format!("{d}*{g}*{name}"));
                }
            }
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Parse a linear combination in the file grammar against known basis names.
pub fn parse_lincomb(
    names: &[&str],
    field: FieldDescriptor,
    text: &str,
    line: usize,
    col0: usize,
) -> Result<Vec<FieldElement>, LieError> {
    let mut coords = vec![field.zero(); names.len()];
    let trimmed = text.trim();
    if trimmed == "0" {
        return Ok(coords);
    }
    let mut sign = field.one();
    let mut term = String::new();
    let mut terms: Vec<(FieldElement, String)> = Vec::new();
    for ch in trimmed.chars().chain(std::iter::once('\u{0}')) {
        match ch {
            '+' | '-' | '\u{0}' => {
                if !term.trim().is_empty() {
                    terms.push((sign, term.trim().to_string()));
                } else if ch == '\u{0}' && terms.is_empty() {
                    return Err(LieError::parse(line, col0, "empty linear combination"));
                } else if !matches!(ch, '\u{0}') && term.trim().is_empty() && !terms.is_empty() {
                    return Err(LieError::parse(line, col0, "dangling sign"));
                }
                term.clear();
                sign = if ch == '-' { field.from_int(-1) } else { field.one() };
            }
            _ => term.push(ch),
        }
    }
    for (sign, t) in terms {
        let mut coeff = sign;
        let mut name = t.as_str();
        let factors: Vec<&str> = t.split('*').map(str::trim).collect();
        if factors.len() > 1 {
            name = factors.last().unwrap();
            for factor in &factors[..factors.len() - 1] {
                coeff = coeff * parse_coefficient(field, factor, line, col0)?;
            }
        }
        let Some(idx) = names.iter().position(|n| *n == name) else {
            return Err(LieError::parse(line, col0, format!("unknown basis name '{name}'")));
        };
        coords[idx] = coords[idx] + coeff;
    }
    Ok(coords)
}

fn parse_coefficient(
    field: FieldDescriptor,
    token: &str,
    line: usize,
    col: usize,
) -> Result<FieldElement, LieError> {
    if let Ok(n) = token.parse::<i64>() {
        return Ok(field.from_int(n));
    }
    if token == "g" || token.starts_with("g^") {
        if field.degree() < 2 {
            return Err(LieError::parse(
                line,
                col,
                "generator coefficient 'g' requires an extension field (k >= 2)",
            ));
        }
        let e: u64 = if token == "g" {
            1
        } else {
            token[2..].parse().map_err(|_| {
                LieError::parse(line, col, format!("bad generator exponent in '{token}'"))
            })?
        };
        return Ok(field.generator().pow(e));
    }
    Err(LieError::parse(line, col, format!("bad coefficient '{token}'")))
}

/// Outcome of parsing one algebra file: the algebra and, when `pmap` lines
/// are present, the declared basis images (unlisted basis vectors map to 0).
pub struct ParsedFile {
    pub algebra: LieAlgebra,
    pub pmap_images: Option<Vec<Vec<FieldElement>>>,
}

/// Parse the full algebra file format.
pub fn parse_file(text: &str) -> Result<ParsedFile, LieError> {
    let mut p: Option<u64> = None;
    let mut k: u64 = 1;
    let mut dim: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut brackets: Vec<(usize, usize, Vec<FieldElement>)> = Vec::new();
    let mut bracket_lines: Vec<(String, String, String, usize)> = Vec::new();
    let mut pmap_lines: Vec<(String, String, usize)> = Vec::new();

    for (lineno0, raw) in text.lines().enumerate() {
        let line = lineno0 + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("pmap") {
            if rest.starts_with(|c: char| c.is_whitespace()) {
                let Some((name, rhs)) = rest.trim().split_once('=') else {
                    return Err(LieError::parse(line, 1, "pmap line needs '='"));
                };
                pmap_lines.push((name.trim().to_string(), rhs.trim().to_string(), line));
                continue;
            }
        }
        if content.starts_with('[') {
            let Some(close) = content.find(']') else {
                return Err(LieError::parse(line, 1, "unterminated '['"));
            };
            let inside = &content[1..close];
            let Some((a, b)) = inside.split_once(',') else {
                return Err(LieError::parse(line, 2, "bracket needs two comma-separated names"));
            };
            let after = content[close + 1..].trim();
            let Some(rhs) = after.strip_prefix('=') else {
                return Err(LieError::parse(line, close + 2, "bracket line needs '='"));
            };
            bracket_lines.push((a.trim().to_string(), b.trim().to_string(), rhs.trim().to_string(), line));
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(LieError::parse(line, 1, format!("unrecognized line '{content}'")));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "p" => {
                p = Some(value.parse().map_err(|_| {
                    LieError::parse(line, 1, format!("bad characteristic '{value}'"))
                })?);
            }
            "k" => {
                k = value.parse().map_err(|_| {
                    LieError::parse(line, 1, format!("bad extension degree '{value}'"))
                })?;
            }
            "dim" => {
                dim = Some(value.parse().map_err(|_| {
                    LieError::parse(line, 1, format!("bad dimension '{value}'"))
                })?);
            }
            "basis" => {
                names = Some(value.split_whitespace().map(str::to_string).collect());
            }
            _ => return Err(LieError::parse(line, 1, format!("unknown key '{key}'"))),
        }
    }

    let p = p.ok_or_else(|| LieError::parse(1, 1, "missing 'p ='"))?;
    let dim = dim.ok_or_else(|| LieError::parse(1, 1, "missing 'dim ='"))?;
    let names = names.ok_or_else(|| LieError::parse(1, 1, "missing 'basis ='"))?;
    if names.len() != dim {
        return Err(LieError::parse(1, 1, format!("dim = {dim} but {} basis names", names.len())));
    }
    if dim < 1 || dim > MAX_DIM {
        return Err(LieError::parse(1, 1, format!("dimension {dim} out of range 1..={MAX_DIM}")));
    }
    let field = field_make(p, k as u32)
        .map_err(|e| LieError::parse(1, 1, format!("bad field: {e}")))?;
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();

    let mut declared: Vec<(usize, usize)> = Vec::new();
    for (a, b, rhs, line) in &bracket_lines {
        let Some(i) = name_refs.iter().position(|n| n == a) else {
            return Err(LieError::parse(*line, 2, format!("unknown basis name '{a}'")));
        };
        let Some(j) = name_refs.iter().position(|n| n == b) else {
            return Err(LieError::parse(*line, 2, format!("unknown basis name '{b}'")));
        };
        if i == j {
            return Err(LieError::parse(*line, 2, format!("bracket [{a},{a}] is identically zero")));
        }
        if declared.contains(&(i, j)) || declared.contains(&(j, i)) {
            return Err(LieError::parse(
                *line,
                1,
                format!("bracket [{a},{b}] declared twice (directly or by antisymmetry)"),
            ));
        }
        declared.push((i, j));
        let coords = parse_lincomb(&name_refs, field, rhs, *line, 1)?;
        brackets.push((i, j, coords));
    }

    let algebra = LieAlgebra::new(field, &name_refs, &brackets);

    let pmap_images = if pmap_lines.is_empty() {
        None
    } else {
        let mut images = vec![vec![field.zero(); dim]; dim];
        let mut seen = vec![false; dim];
        for (name, rhs, line) in &pmap_lines {
            let Some(i) = name_refs.iter().position(|n| n == name) else {
                return Err(LieError::parse(*line, 1, format!("unknown basis name '{name}'")));
            };
            if seen[i] {
                return Err(LieError::parse(*line, 1, format!("pmap {name} declared twice")));
            }
            seen[i] = true;
            images[i] = parse_lincomb(&name_refs, field, rhs, *line, 1)?;
        }
        Some(images)
    };

    Ok(ParsedFile { algebra, pmap_images })
}

/// Parse an algebra file, returning just the Lie algebra.
pub fn parse_algebra(text: &str) -> Result<LieAlgebra, LieError> {
    parse_file(text).map(|f| f.algebra)
}
