//! Dense exact matrices and canonical subspaces over a finite field.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::field::{FieldDescriptor, FieldElement};
use super::poly::ScalarPoly;

/// A dense rows x cols matrix; all entries share one field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn zero(field: FieldDescriptor, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, entries: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldDescriptor, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_rows(field: FieldDescriptor, rows: &[Vec<FieldElement>]) -> Matrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            entries.extend_from_slice(r);
        }
        assert!(entries.iter().all(|e| e.field() == field), "field mismatch");
        Matrix { field, rows: nrows, cols: ncols, entries }
    }

    pub fn from_fn(
        field: FieldDescriptor,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let mut m = self.clone();
        for e in &mut m.entries {
            *e = *e * c;
        }
        m
    }

    /// Matrix-vector product M v.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, e: u64) -> Matrix {
        assert_eq!(self.rows, self.cols, "power requires a square matrix");
        let mut acc = Matrix::identity(self.field, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Reduced row echelon form together with the pivot column list.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m[(r, j)];
                m[(r, j)] = m[(pr, j)];
                m[(pr, j)] = tmp;
            }
            let inv = m[(r, c)].inv();
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)] * inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let factor = m[(i, c)];
                    for j in 0..m.cols {
                        m[(i, j)] = m[(i, j)] - factor * m[(r, j)];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant requires a square matrix");
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return self.field.zero();
            };
            if pr != c {
                for j in 0..m.cols {
                    let tmp = m[(c, j)];
                    m[(c, j)] = m[(pr, j)];
                    m[(pr, j)] = tmp;
                }
                det = -det;
            }
            det = det * m[(c, c)];
            let inv = m[(c, c)].inv();
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let factor = m[(i, c)] * inv;
                    for j in c..m.cols {
                        m[(i, j)] = m[(i, j)] - factor * m[(c, j)];
                    }
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && !self.det().is_zero()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse requires a square matrix");
        let n = self.rows;
        let mut aug = Matrix::zero(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = self.field.one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(Matrix::from_fn(self.field, n, n, |i, j| red[(i, n + j)]))
    }

    /// A particular solution x of M x = b (free variables set to zero).
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let mut aug = Matrix::zero(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let (red, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red[(r, self.cols)];
        }
        Some(x)
    }

    /// Canonical basis of the null space {v : M v = 0}.
    pub fn kernel(&self) -> Subspace {
        let (red, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -red[(r, free)];
            }
            basis.push(v);
        }
        Subspace::from_spanning(self.field, self.cols, &basis)
    }

    /// Canonical basis of the span of the rows.
    pub fn row_space(&self) -> Subspace {
        Subspace::from_spanning(self.field, self.cols, &(0..self.rows).map(|i| self.row(i)).collect::<Vec<_>>())
    }

    /// Monic diagonal of the Smith normal form of xI - M over F_q[x]; the
    /// nonconstant entries are the invariant factors, so two square matrices
    /// are similar exactly when these lists agree.
    pub fn invariant_factors(&self) -> Vec<ScalarPoly> {
        assert_eq!(self.rows, self.cols, "invariant factors require a square matrix");
        let n = self.rows;
        let f = self.field;
        let x = ScalarPoly::from_coeffs(f, &[f.zero(), f.one()]);
        let mut m: Vec<Vec<ScalarPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = ScalarPoly::constant(-self[(i, j)]);
                        if i == j {
                            x.clone() + c
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();

        for t in 0..n {
            'outer: loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..n {
                        if !m[i][j].is_zero()
                            && best.is_none_or(|(bi, bj)| m[i][j].deg() < m[bi][bj].deg())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    break;
                };
                m.swap(t, bi);
                for row in m.iter_mut() {
                    row.swap(t, bj);
                }
                // clear column t below the pivot
                for i in t + 1..n {
                    if !m[i][t].is_zero() {
                        let (quot, _) = m[i][t].clone().div_rem(&m[t][t]);
                        for j in t..n {
                            let sub = quot.clone() * m[t][j].clone();
                            m[i][j] = m[i][j].clone() - sub;
                        }
                        if !m[i][t].is_zero() {
                            continue 'outer;
                        }
                    }
                }
                // clear row t right of the pivot
                for j in t + 1..n {
                    if !m[t][j].is_zero() {
                        let (quot, _) = m[t][j].clone().div_rem(&m[t][t]);
                        for i in t..n {
                            let sub = quot.clone() * m[i][t].clone();
                            m[i][j] = m[i][j].clone() - sub;
                        }
                        if !m[t][j].is_zero() {
                            continue 'outer;
                        }
                    }
                }
                // divisibility of the remaining block by the pivot
                for i in t + 1..n {
                    for j in t + 1..n {
                        let (_, rem) = m[i][j].clone().div_rem(&m[t][t]);
                        if !rem.is_zero() {
                            for jj in t..n {
                                let add = m[i][jj].clone();
                                m[t][jj] = m[t][jj].clone() + add;
                            }
                            continue 'outer;
                        }
                    }
                }
                break;
            }
        }
        (0..n).map(|i| m[i][i].clone().monic()).collect()
    }

    /// Whether A and B are similar (conjugate by some invertible matrix).
    pub fn similar(&self, other: &Matrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field == other.field
            && self.invariant_factors() == other.invariant_factors()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "dimension mismatch");
        let mut m = self.clone();
        for (e, r) in m.entries.iter_mut().zip(&rhs.entries) {
            *e = *e + *r;
        }
        m
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "dimension mismatch");
        let mut m = self.clone();
        for (e, r) in m.entries.iter_mut().zip(&rhs.entries) {
            *e = *e - *r;
        }
        m
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        assert!(self.field == rhs.field, "field mismatch");
        let mut m = Matrix::zero(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    m[(i, j)] = m[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A linear subspace of F_q^n held as a canonical reduced-row-echelon basis
/// with no zero rows; equal subspaces compare equal structurally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn from_spanning(
        field: FieldDescriptor,
        ambient: usize,
        vectors: &[Vec<FieldElement>],
    ) -> Subspace {
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length mismatch");
        }
        if vectors.is_empty() {
            return Subspace { ambient, basis: Matrix::zero(field, 0, ambient) };
        }
        let (red, pivots) = Matrix::from_rows(field, vectors).rref();
        let rows: Vec<Vec<FieldElement>> = (0..pivots.len()).map(|i| red.row(i)).collect();
        Subspace { ambient, basis: Matrix::from_rows(field, &rows) }
    }

    pub fn full(field: FieldDescriptor, n: usize) -> Subspace {
        Subspace { ambient: n, basis: Matrix::identity(field, n) }
    }

    pub fn zero_space(field: FieldDescriptor, n: usize) -> Subspace {
        Subspace { ambient: n, basis: Matrix::zero(field, 0, n) }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.basis.rows()).map(|i| self.basis.row(i)).collect()
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut v = v.to_vec();
        for i in 0..self.basis.rows() {
            let lead = (0..self.ambient)
                .find(|&j| !self.basis[(i, j)].is_zero())
                .expect("no zero rows in a subspace basis");
            if !v[lead].is_zero() {
                let c = v[lead];
                for j in 0..self.ambient {
                    v[j] = v[j] - c * self.basis[(i, j)];
                }
            }
        }
        v.iter().all(FieldElement::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_rows().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Subspace::from_spanning(self.field(), self.ambient, &rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        // rows of the kernel of [A; B]^t pairing give coefficients; simpler:
        // intersect = kernel of the stacked constraint "v in both", computed
        // via v = x A = y B. Solve [A^t | -B^t] kernel, project onto x A.
        let a = &self.basis;
        let b = &other.basis;
        let f = self.field();
        let da = a.rows();
        let db = b.rows();
        let mut stacked = Matrix::zero(f, self.ambient, da + db);
        for i in 0..self.ambient {
            for j in 0..da {
                stacked[(i, j)] = a[(j, i)];
            }
            for j in 0..db {
                stacked[(i, da + j)] = -b[(j, i)];
            }
        }
        let ker = stacked.kernel();
        let vectors: Vec<Vec<FieldElement>> = ker
            .basis_rows()
            .iter()
            .map(|coeffs| {
                (0..self.ambient)
                    .map(|c| {
                        let mut acc = f.zero();
                        for j in 0..da {
                            acc = acc + coeffs[j] * a[(j, c)];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Subspace::from_spanning(f, self.ambient, &vectors)
    }

    /// All q^dim member vectors, in the canonical order induced by iterating
    /// basis coefficients low-to-high. Caller is responsible for the
    /// exhaustive-op guardrail.
    pub fn elements(&self) -> Vec<Vec<FieldElement>> {
        let f = self.field();
        let q = f.order();
        let d = self.dim();
        let total = q.pow(d as u32);
        let rows = self.basis_rows();
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let mut v = vec![f.zero(); self.ambient];
            let mut t = idx;
            for row in &rows {
                let c = f.from_index(t % q);
                t /= q;
                if !c.is_zero() {
                    for (vj, rj) in v.iter_mut().zip(row) {
                        *vj = *vj + c * *rj;
                    }
                }
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {})", self.dim(), self.ambient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substrate::field::field_make;

    fn f5() -> FieldDescriptor {
        field_make(5, 1).unwrap()
    }

    fn mat(field: FieldDescriptor, rows: &[&[i64]]) -> Matrix {
        let rows: Vec<Vec<FieldElement>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Matrix::from_rows(field, &rows)
    }

    #[test]
    fn identity_powers() {
        let id = Matrix::identity(f5(), 3);
        assert_eq!(id.pow(0), id);
        assert_eq!(id.pow(7), id);
    }

    #[test]
    fn fibonacci_matrix_fifth_power_mod_5() {
        let m = mat(f5(), &[&[1, 1], &[1, 0]]);
        let m5 = m.pow(5);
        assert_eq!(m5, mat(f5(), &[&[3, 0], &[0, 3]]));
    }

    #[test]
    fn kernel_of_zero_map_is_full() {
        let z = Matrix::zero(f5(), 4, 4);
        assert_eq!(z.kernel().dim(), 4);
        assert_eq!(z.kernel(), Subspace::full(f5(), 4));
    }

    #[test]
    fn rref_idempotent_and_rank_nullity() {
        let f = f5();
        let samples = [
            mat(f, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]),
            mat(f, &[&[0, 0, 0], &[0, 0, 0]]),
            mat(f, &[&[1, 0], &[0, 1], &[1, 1]]),
        ];
        for m in samples {
            let (r1, _) = m.rref();
            let (r2, _) = r1.rref();
            assert_eq!(r1, r2);
            assert_eq!(m.kernel().dim() + m.row_space().dim(), m.cols());
        }
    }

    #[test]
    fn solve_and_inverse() {
        let f = f5();
        let m = mat(f, &[&[1, 2], &[3, 4]]);
        let b = vec![f.from_int(1), f.from_int(0)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(f, 2));

        let singular = mat(f, &[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[f.from_int(0), f.from_int(1)]).is_none());
        assert!(!singular.is_invertible());
    }

    #[test]
    fn det_matches_cofactor_small() {
        let f = f5();
        let m = mat(f, &[&[2, 1], &[3, 4]]);
        assert_eq!(m.det(), f.from_int(2 * 4 - 3));
        let m3 = mat(f, &[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
        // expansion: 1*(1*1-1*0) - 2*(0*1-1*1) + 0 = 1 + 2 = 3
        assert_eq!(m3.det(), f.from_int(3));
    }

    #[test]
    fn subspace_canonical_equality() {
        let f = f5();
        let s1 = Subspace::from_spanning(
            f,
            3,
            &[
                vec![f.from_int(1), f.from_int(1), f.from_int(0)],
                vec![f.from_int(0), f.from_int(1), f.from_int(1)],
            ],
        );
        let s2 = Subspace::from_spanning(
            f,
            3,
            &[
                vec![f.from_int(2), f.from_int(2), f.from_int(0)],
                vec![f.from_int(1), f.from_int(2), f.from_int(1)],
            ],
        );
        assert_eq!(s1, s2);
        assert!(s1.contains(&[f.from_int(1), f.from_int(2), f.from_int(1)]));
        assert!(!s1.contains(&[f.from_int(1), f.from_int(0), f.from_int(0)]));
    }

    #[test]
    fn subspace_enumeration_counts() {
        let f = field_make(3, 1).unwrap();
        let s = Subspace::from_spanning(
            f,
            4,
            &[
                vec![f.one(), f.zero(), f.zero(), f.zero()],
                vec![f.zero(), f.one(), f.zero(), f.zero()],
            ],
        );
        let elems = s.elements();
        assert_eq!(elems.len(), 9);
    }

    #[test]
    fn intersect_sums() {
        let f = f5();
        let e1 = vec![f.one(), f.zero(), f.zero()];
        let e2 = vec![f.zero(), f.one(), f.zero()];
        let e3 = vec![f.zero(), f.zero(), f.one()];
        let s12 = Subspace::from_spanning(f, 3, &[e1.clone(), e2.clone()]);
        let s23 = Subspace::from_spanning(f, 3, &[e2.clone(), e3.clone()]);
        let meet = s12.intersect(&s23);
        assert_eq!(meet.dim(), 1);
        assert!(meet.contains(&e2));
        assert_eq!(s12.sum(&s23), Subspace::full(f, 3));
    }

    #[test]
    fn invariant_factors_detect_similarity() {
        let f = f5();
        let a = mat(f, &[&[1, 0], &[0, 2]]);
        let b = mat(f, &[&[2, 0], &[0, 1]]);
        assert!(a.similar(&b));
        let c = mat(f, &[&[1, 1], &[0, 1]]);
        let d = Matrix::identity(f, 2);
        assert!(!c.similar(&d));
        // conjugating by an explicit invertible matrix preserves similarity
        let p = mat(f, &[&[1, 2], &[1, 3]]);
        let conj = &(&p * &a) * &p.inverse().unwrap();
        assert!(a.similar(&conj));
    }
}
