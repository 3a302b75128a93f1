//! p-semilinear maps and p-maps on a Lie algebra: the correction terms
//! s_i, evaluation from basis images, the p-map criterion, the solution
//! family of all p-maps, conjugation under automorphisms, and the
//! conjugacy-invariant dimension profiles.

use std::fmt;

use thiserror::Error;

use crate::lie_core::{LieAlgebra, LieElement};
use crate::substrate::{FieldElement, Matrix, Subspace, VecPoly, MAX_EXHAUSTIVE, MAX_FIELD_ORDER};

#[derive(Debug, Error)]
pub enum RestrictedError {
    #[error("map images do not satisfy the p-map criterion ad f_j = (ad e_j)^p")]
    NotPMap,
    #[error("matrix is not a Lie algebra automorphism")]
    NotAutomorphism,
    #[error("enumeration bound exceeded: {0} > {1}")]
    EnumerationBound(u128, u64),
}

/// Bracket of two vector polynomials, by convolution of coefficients.
fn vec_poly_bracket(alg: &LieAlgebra, a: &VecPoly, b: &VecPoly) -> VecPoly {
    let f = alg.field();
    let n = alg.dim();
    if a.is_zero() || b.is_zero() {
        return VecPoly::zero(f, n);
    }
    let mut coeffs = vec![vec![f.zero(); n]; a.len() + b.len() - 1];
    for i in 0..a.len() {
        let ai = a.coeff(i);
        if ai.iter().all(FieldElement::is_zero) {
            continue;
        }
        for j in 0..b.len() {
            let prod = alg.bracket_coords(&ai, &b.coeff(j));
            for (c, v) in coeffs[i + j].iter_mut().zip(prod) {
                *c = *c + v;
            }
        }
    }
    VecPoly::from_coeffs(f, n, &coeffs)
}

/// The correction terms s_1..s_{p-1}: coefficients of
/// (ad(x0·T + x1))^{p-1}(x0), with the T^{i-1} coefficient divided by i.
pub fn s_terms(x0: &LieElement, x1: &LieElement) -> Vec<LieElement> {
    let alg = x0.algebra().clone();
    assert!(&alg == x1.algebra(), "algebra mismatch");
    let f = alg.field();
    let p = f.characteristic();
    let n = alg.dim();
    let arg = VecPoly::from_coeffs(f, n, &[x1.coords().to_vec(), x0.coords().to_vec()]);
    let mut acc = VecPoly::from_coeffs(f, n, &[x0.coords().to_vec()]);
    for _ in 0..p - 1 {
        acc = vec_poly_bracket(&alg, &arg, &acc);
    }
    let mut out = Vec::with_capacity((p - 1) as usize);
    for i in 1..p {
        let inv_i = f.from_int(i as i64).inv();
        let coeff = acc.coeff((i - 1) as usize);
        out.push(alg.element(coeff.iter().map(|c| *c * inv_i).collect()));
    }
    out
}

/// s_terms on raw coordinate vectors; returns coordinate vectors.
fn s_terms_coords(alg: &LieAlgebra, x0: &[FieldElement], x1: &[FieldElement]) -> Vec<Vec<FieldElement>> {
    let f = alg.field();
    let p = f.characteristic();
    let n = alg.dim();
    let arg = VecPoly::from_coeffs(f, n, &[x1.to_vec(), x0.to_vec()]);
    let mut acc = VecPoly::from_coeffs(f, n, &[x0.to_vec()]);
    for _ in 0..p - 1 {
        acc = vec_poly_bracket(alg, &arg, &acc);
    }
    (1..p)
        .map(|i| {
            let inv_i = f.from_int(i as i64).inv();
            acc.coeff((i - 1) as usize)
                .into_iter()
                .map(|c| c * inv_i)
                .collect()
        })
        .collect()
}

/// A p-semilinear self-map, determined by the images of the basis vectors.
#[derive(Clone, PartialEq, Eq)]
pub struct PSemilinearMap {
    algebra: LieAlgebra,
    images: Vec<Vec<FieldElement>>,
}

impl PSemilinearMap {
    pub fn new(algebra: &LieAlgebra, images: Vec<Vec<FieldElement>>) -> PSemilinearMap {
        assert_eq!(images.len(), algebra.dim(), "one image per basis vector");
        for img in &images {
            assert_eq!(img.len(), algebra.dim(), "image dimension mismatch");
        }
        PSemilinearMap { algebra: algebra.clone(), images }
    }

    pub fn from_elements(algebra: &LieAlgebra, images: &[LieElement]) -> PSemilinearMap {
        PSemilinearMap::new(
            algebra,
            images.iter().map(|e| e.coords().to_vec()).collect(),
        )
    }

    /// The all-zero-images (trivial) p-semilinear map.
    pub fn trivial(algebra: &LieAlgebra) -> PSemilinearMap {
        let zero = vec![algebra.field().zero(); algebra.dim()];
        PSemilinearMap::new(algebra, vec![zero; algebra.dim()])
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn image(&self, j: usize) -> LieElement {
        self.algebra.element(self.images[j].clone())
    }

    pub fn image_coords(&self, j: usize) -> &[FieldElement] {
        &self.images[j]
    }

    pub fn images(&self) -> Vec<LieElement> {
        (0..self.algebra.dim()).map(|j| self.image(j)).collect()
    }

    /// Evaluate at an element, expanding over the declared basis order:
    /// x = Σ a_j e_j maps to Σ a_j^p f_j + Σ_i Σ_r s_i(Σ_{s<r} a_s e_s, a_r e_r).
    pub fn eval(&self, v: &LieElement) -> LieElement {
        assert!(v.algebra() == &self.algebra, "algebra mismatch");
        let order: Vec<usize> = (0..self.algebra.dim()).collect();
        let out = self.eval_coords_with_order(v.coords(), &order);
        #[cfg(debug_assertions)]
        {
            let reversed: Vec<usize> = (0..self.algebra.dim()).rev().collect();
            debug_assert_eq!(
                out,
                self.eval_coords_with_order(v.coords(), &reversed),
                "evaluation depends on the basis summation order"
            );
        }
        self.algebra.element(out)
    }

    pub fn eval_coords(&self, coords: &[FieldElement]) -> Vec<FieldElement> {
        let order: Vec<usize> = (0..self.algebra.dim()).collect();
        self.eval_coords_with_order(coords, &order)
    }

    /// Evaluation with an explicit basis summation order (used to verify
    /// order independence).
    pub fn eval_coords_with_order(&self, coords: &[FieldElement], order: &[usize]) -> Vec<FieldElement> {
        let alg = &self.algebra;
        let f = alg.field();
        let p = f.characteristic();
        let n = alg.dim();
        let mut out = vec![f.zero(); n];
        for j in 0..n {
            let apow = coords[j].pow(p);
            for (o, fj) in out.iter_mut().zip(&self.images[j]) {
                *o = *o + apow * *fj;
            }
        }
        let mut prefix = vec![f.zero(); n];
        let first = order[0];
        prefix[first] = coords[first];
        for &r in &order[1..] {
            // s_i(0, y) = s_i(x, 0) = 0, so zero summands contribute nothing
            if !coords[r].is_zero() && prefix.iter().any(|c| !c.is_zero()) {
                let mut term = vec![f.zero(); n];
                term[r] = coords[r];
                for si in s_terms_coords(alg, &prefix, &term) {
                    for (o, c) in out.iter_mut().zip(si) {
                        *o = *o + c;
                    }
                }
            }
            prefix[r] = coords[r];
        }
        out
    }
}

impl fmt::Debug for PSemilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.algebra.names();
        let mut parts = Vec::new();
        for (j, img) in self.images.iter().enumerate() {
            if img.iter().any(|c| !c.is_zero()) {
                parts.push(format!(
                    "{}^[p] = {}",
                    names[j],
                    crate::lie_core::lincomb_string(&names, img)
                ));
            }
        }
        if parts.is_empty() {
            write!(f, "trivial p-map")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

/// Does `map` satisfy ad f_j = (ad e_j)^p for every basis vector?
pub fn is_p_map(map: &PSemilinearMap) -> bool {
    let alg = map.algebra();
    let p = alg.field().characteristic();
    for j in 0..alg.dim() {
        let lhs = alg.ad_matrix_coords(map.image_coords(j));
        let rhs = alg.ad_matrix_coords(alg.basis_element(j).coords()).pow(p);
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// A Lie algebra together with a verified p-map.
#[derive(Clone, PartialEq, Eq)]
pub struct RestrictedLieAlgebra {
    algebra: LieAlgebra,
    pmap: PSemilinearMap,
}

impl RestrictedLieAlgebra {
    pub fn new(algebra: &LieAlgebra, pmap: PSemilinearMap) -> Result<RestrictedLieAlgebra, RestrictedError> {
        assert!(pmap.algebra() == algebra, "algebra mismatch");
        if !is_p_map(&pmap) {
            return Err(RestrictedError::NotPMap);
        }
        Ok(RestrictedLieAlgebra { algebra: algebra.clone(), pmap })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn pmap(&self) -> &PSemilinearMap {
        &self.pmap
    }
}

impl fmt::Debug for RestrictedLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.algebra, self.pmap)
    }
}

/// The solution set of the p-map criterion: empty, or a particular map plus
/// independent center perturbations of each basis image.
#[derive(Clone, Debug)]
pub struct PMapFamily {
    algebra: LieAlgebra,
    particular: Option<PSemilinearMap>,
    center: Subspace,
}

impl PMapFamily {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn particular(&self) -> Option<&PSemilinearMap> {
        self.particular.as_ref()
    }

    pub fn center(&self) -> &Subspace {
        &self.center
    }

    /// Number of p-maps: q^(n · dim Z) when nonempty. Panics when the count
    /// exceeds u128, which needs q > 256 together with a 4-dimensional center.
    pub fn count(&self) -> u128 {
        match &self.particular {
            None => 0,
            Some(_) => {
                let q = self.algebra.field().order() as u128;
                q.checked_pow((self.algebra.dim() * self.center.dim()) as u32)
                    .expect("p-map count exceeds u128")
            }
        }
    }
}

/// Solve ad f_j = (ad e_j)^p for each j. The solution set for each basis
/// vector is either empty or a coset of the center.
pub fn solve_pmaps(alg: &LieAlgebra) -> PMapFamily {
    let f = alg.field();
    let n = alg.dim();
    // A: n^2 x n, column i = vectorized ad(e_i); the map f -> ad(f) is linear.
    let mut a = Matrix::zero(f, n * n, n);
    for i in 0..n {
        let ad = alg.ad_matrix_coords(alg.basis_element(i).coords());
        for r in 0..n {
            for c in 0..n {
                a[(r * n + c, i)] = ad[(r, c)];
            }
        }
    }
    let center = alg.center();
    debug_assert_eq!(a.kernel(), center, "kernel of f -> ad(f) is the center");
    let p = f.characteristic();
    let mut images = Vec::with_capacity(n);
    for j in 0..n {
        let target = alg.ad_matrix_coords(alg.basis_element(j).coords()).pow(p);
        let mut b = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                b.push(target[(r, c)]);
            }
        }
        match a.solve(&b) {
            Some(sol) => images.push(sol),
            None => {
                return PMapFamily { algebra: alg.clone(), particular: None, center };
            }
        }
    }
    PMapFamily {
        algebra: alg.clone(),
        particular: Some(PSemilinearMap::new(alg, images)),
        center,
    }
}

/// Iterator over every p-map on the algebra: the particular solution with
/// each basis image independently shifted by center elements.
pub struct PMapIter {
    family: PMapFamily,
    center_elements: Vec<Vec<FieldElement>>,
    next_index: u128,
    total: u128,
}

impl Iterator for PMapIter {
    type Item = PSemilinearMap;

    fn next(&mut self) -> Option<PSemilinearMap> {
        if self.next_index >= self.total {
            return None;
        }
        let particular = self.family.particular.as_ref().unwrap();
        let n = self.family.algebra.dim();
        let m = self.center_elements.len() as u128;
        let mut idx = self.next_index;
        self.next_index += 1;
        let mut images = Vec::with_capacity(n);
        for j in 0..n {
            let which = (idx % m) as usize;
            idx /= m;
            let shift = &self.center_elements[which];
            images.push(
                particular.image_coords(j)
                    .iter()
                    .zip(shift)
                    .map(|(a, b)| *a + *b)
                    .collect(),
            );
        }
        Some(PSemilinearMap::new(&self.family.algebra, images))
    }
}

/// Stream all p-maps on the algebra. Errors if q^(n · dim Z) exceeds 2^20.
pub fn enumerate_pmaps(alg: &LieAlgebra) -> Result<PMapIter, RestrictedError> {
    let family = solve_pmaps(alg);
    let total = family.count();
    if total > MAX_FIELD_ORDER as u128 {
        return Err(RestrictedError::EnumerationBound(total, MAX_FIELD_ORDER));
    }
    let center_elements = if family.particular.is_some() {
        family.center.elements()
    } else {
        Vec::new()
    };
    Ok(PMapIter { family, center_elements, next_index: 0, total })
}

/// Is the matrix a Lie algebra automorphism (invertible, bracket-preserving)?
pub fn is_automorphism(alg: &LieAlgebra, phi: &Matrix) -> bool {
    let n = alg.dim();
    if phi.rows() != n || phi.cols() != n || !phi.is_invertible() {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let lhs = phi.mul_vec(alg.structure_coords(i, j));
            let rhs = alg.bracket_coords(&phi.col(i), &phi.col(j));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Conjugate a p-semilinear map by an automorphism: phi ∘ [p] ∘ phi^{-1}.
pub fn conjugate(map: &PSemilinearMap, phi: &Matrix) -> Result<PSemilinearMap, RestrictedError> {
    let alg = map.algebra();
    if !is_automorphism(alg, phi) {
        return Err(RestrictedError::NotAutomorphism);
    }
    let inv = phi.inverse().expect("automorphism is invertible");
    let images = (0..alg.dim())
        .map(|j| phi.mul_vec(&map.eval_coords(&inv.col(j))))
        .collect();
    Ok(PSemilinearMap::new(alg, images))
}

/// Conjugacy invariants dim V^{[p]^r} for V in {L, Z(L), [L,L]}, r = 1..r_max.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantProfile {
    pub rows: Vec<ProfileRow>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProfileRow {
    pub r: usize,
    pub dim_l: usize,
    pub dim_center: usize,
    pub dim_derived: usize,
}

impl fmt::Display for InvariantProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(
                f,
                "r={}: dim L={}, dim Z={}, dim [L,L]={}",
                row.r, row.dim_l, row.dim_center, row.dim_derived
            )?;
        }
        Ok(())
    }
}

/// Compute the invariant profile by full enumeration of each subspace: the
/// map is not additive, so basis images do not span the image space.
pub fn invariant_profile(
    rla: &RestrictedLieAlgebra,
    r_max: usize,
) -> Result<InvariantProfile, RestrictedError> {
    let alg = rla.algebra();
    let f = alg.field();
    let spaces = [
        Subspace::full(f, alg.dim()),
        alg.center(),
        alg.derived(),
    ];
    let mut dims = vec![[0usize; 3]; r_max];
    for (which, v) in spaces.iter().enumerate() {
        let count = (f.order() as u128).pow(v.dim() as u32);
        if count > MAX_EXHAUSTIVE as u128 {
            return Err(RestrictedError::EnumerationBound(count, MAX_EXHAUSTIVE));
        }
        let mut vectors = v.elements();
        for r in 0..r_max {
            vectors = vectors
                .into_iter()
                .map(|u| rla.pmap().eval_coords(&u))
                .collect();
            let span = Subspace::from_spanning(f, alg.dim(), &vectors);
            dims[r][which] = span.dim();
        }
    }
    Ok(InvariantProfile {
        rows: (0..r_max)
            .map(|r| ProfileRow {
                r: r + 1,
                dim_l: dims[r][0],
                dim_center: dims[r][1],
                dim_derived: dims[r][2],
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::parse_algebra;

    fn l2(p: u64) -> LieAlgebra {
        parse_algebra(&format!("p={p}\ndim=4\nbasis=x y z w\n[w,x]=y\n")).unwrap()
    }

    #[test]
    fn s_terms_of_equal_arguments_vanish() {
        let alg = parse_algebra("p=5\ndim=4\nbasis=x y z w\n[w,x]=y\n[w,y]=z\n").unwrap();
        let v = alg.element_from_ints(&[1, 2, 3, 4]);
        for s in s_terms(&v, &v) {
            assert!(s.is_zero());
        }
    }

    #[test]
    fn s1_on_l2_at_p2_is_the_bracket() {
        let alg = l2(2);
        let x = alg.basis_element(0);
        let w = alg.basis_element(3);
        let s = s_terms(&x, &w);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0], alg.basis_element(1));
    }

    #[test]
    fn jacobson_sum_rule_exhaustive() {
        // (x+y)^[p] = x^[p] + y^[p] + sum s_i(x,y) for every pair, any images
        for p in [2u64, 3] {
            let alg = parse_algebra(&format!("p={p}\ndim=3\nbasis=x y z\n[y,x]=z\n")).unwrap();
            let f = alg.field();
            let images = vec![
                vec![f.from_int(1), f.zero(), f.from_int(2)],
                vec![f.zero(), f.one(), f.one()],
                vec![f.one(), f.one(), f.zero()],
            ];
            let map = PSemilinearMap::new(&alg, images);
            let q = f.order();
            let all: Vec<Vec<FieldElement>> = (0..q.pow(3))
                .map(|mut i| {
                    (0..3)
                        .map(|_| {
                            let d = f.from_index(i % q);
                            i /= q;
                            d
                        })
                        .collect()
                })
                .collect();
            for u in &all {
                for v in &all {
                    let sum: Vec<FieldElement> =
                        u.iter().zip(v).map(|(a, b)| *a + *b).collect();
                    let mut rhs = map.eval_coords(u);
                    for (r, c) in rhs.iter_mut().zip(map.eval_coords(v)) {
                        *r = *r + c;
                    }
                    for s in s_terms_coords(&alg, u, v) {
                        for (r, c) in rhs.iter_mut().zip(s) {
                            *r = *r + c;
                        }
                    }
                    assert_eq!(map.eval_coords(&sum), rhs);
                }
            }
        }
    }

    #[test]
    fn scalar_semilinearity_exhaustive() {
        let alg = parse_algebra("p=3\ndim=4\nbasis=x y z w\n[w,x]=y\n[w,y]=z\n").unwrap();
        let f = alg.field();
        let map = solve_pmaps(&alg).particular().unwrap().clone();
        let v = alg.element_from_ints(&[1, 2, 0, 1]);
        for a in f.elements() {
            let lhs = map.eval(&v.scale(a));
            let rhs = map.eval(&v).scale(a.pow(3));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn eval_is_order_independent_over_all_permutations() {
        let alg = parse_algebra(
            "p=3\ndim=4\nbasis=x y z w\n[z,x]=y\n[w,x]=x\n[w,y]=2*y\n[w,z]=z\n",
        )
        .unwrap();
        let map = solve_pmaps(&alg).particular().unwrap().clone();
        let mut orders = Vec::new();
        for a in 0..4usize {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let o = vec![a, b, c, d];
                        let mut s = o.clone();
                        s.sort();
                        if s == vec![0, 1, 2, 3] {
                            orders.push(o);
                        }
                    }
                }
            }
        }
        assert_eq!(orders.len(), 24);
        for v in [[1, 2, 1, 1], [2, 0, 1, 2], [1, 1, 1, 1], [0, 2, 2, 1]] {
            let coords: Vec<FieldElement> =
                v.iter().map(|&c| alg.field().from_int(c)).collect();
            let reference = map.eval_coords_with_order(&coords, &orders[0]);
            for order in &orders[1..] {
                assert_eq!(map.eval_coords_with_order(&coords, order), reference);
            }
        }
    }

    #[test]
    fn l2_over_f2_has_256_pmaps() {
        let alg = l2(2);
        let family = solve_pmaps(&alg);
        assert_eq!(family.center().dim(), 2);
        assert_eq!(family.count(), 256);
        let listed: Vec<PSemilinearMap> = enumerate_pmaps(&alg).unwrap().collect();
        assert_eq!(listed.len(), 256);
        for map in &listed {
            assert!(is_p_map(map));
        }
        // cross-check: filter all 16^4 candidate image tuples directly
        let f = alg.field();
        let q = f.order();
        let vectors: Vec<Vec<FieldElement>> = (0..q.pow(4))
            .map(|mut i| {
                (0..4)
                    .map(|_| {
                        let d = f.from_index(i % q);
                        i /= q;
                        d
                    })
                    .collect()
            })
            .collect();
        let mut count = 0u32;
        for a in &vectors {
            for b in &vectors {
                for c in &vectors {
                    for d in &vectors {
                        let map = PSemilinearMap::new(
                            &alg,
                            vec![a.clone(), b.clone(), c.clone(), d.clone()],
                        );
                        if is_p_map(&map) {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 256);
    }

    #[test]
    fn abelian_algebra_admits_all_psemilinear_maps() {
        let alg = parse_algebra("p=2\ndim=4\nbasis=x y z w\n").unwrap();
        let family = solve_pmaps(&alg);
        assert_eq!(family.count(), 1 << 16);
        assert_eq!(enumerate_pmaps(&alg).unwrap().count(), 1 << 16);
    }

    #[test]
    fn algebra_without_pmap_yields_empty_family() {
        // [w,x]=y, [w,z]=z: no f has ad f = (ad w)^p
        let alg = parse_algebra("p=2\ndim=4\nbasis=x y z w\n[w,x]=y\n[w,z]=z\n").unwrap();
        let family = solve_pmaps(&alg);
        assert!(family.particular().is_none());
        assert_eq!(family.count(), 0);
        assert_eq!(enumerate_pmaps(&alg).unwrap().count(), 0);
    }

    #[test]
    fn conjugation_preserves_pmaps_and_profiles() {
        let alg = l2(3);
        let f = alg.field();
        let map = {
            // w^[p] = y on L2
            let mut images = vec![vec![f.zero(); 4]; 4];
            images[3][1] = f.one();
            PSemilinearMap::new(&alg, images)
        };
        assert!(is_p_map(&map));
        // automorphism of L2: x -> x + z, others fixed (z central, [w,x+z]=y)
        let mut phi = Matrix::identity(f, 4);
        phi[(2, 0)] = f.one();
        let conj = conjugate(&map, &phi).unwrap();
        assert!(is_p_map(&conj));
        let r1 = RestrictedLieAlgebra::new(&alg, map).unwrap();
        let r2 = RestrictedLieAlgebra::new(&alg, conj).unwrap();
        assert_eq!(
            invariant_profile(&r1, 3).unwrap(),
            invariant_profile(&r2, 3).unwrap()
        );
        // identity conjugation is the identity on maps
        let id = Matrix::identity(f, 4);
        assert_eq!(conjugate(r1.pmap(), &id).unwrap(), *r1.pmap());
        // non-automorphism rejected
        let mut bad = Matrix::identity(f, 4);
        bad[(1, 1)] = f.from_int(2);
        assert!(matches!(
            conjugate(r1.pmap(), &bad),
            Err(RestrictedError::NotAutomorphism)
        ));
    }

    #[test]
    fn profile_of_simple_abelian_map() {
        let alg = parse_algebra("p=2\ndim=4\nbasis=x y z w\n").unwrap();
        let f = alg.field();
        let mut images = vec![vec![f.zero(); 4]; 4];
        images[0][1] = f.one(); // x -> y, all else 0
        let map = PSemilinearMap::new(&alg, images);
        let rla = RestrictedLieAlgebra::new(&alg, map).unwrap();
        let profile = invariant_profile(&rla, 3).unwrap();
        assert_eq!(
            profile.rows[0],
            ProfileRow { r: 1, dim_l: 1, dim_center: 1, dim_derived: 0 }
        );
        assert_eq!(
            profile.rows[1],
            ProfileRow { r: 2, dim_l: 0, dim_center: 0, dim_derived: 0 }
        );
    }

    #[test]
    fn rejected_non_pmap() {
        let alg = l2(2);
        let f = alg.field();
        let mut images = vec![vec![f.zero(); 4]; 4];
        images[0][0] = f.one(); // x -> x is not a p-map image on L2
        let map = PSemilinearMap::new(&alg, images);
        assert!(!is_p_map(&map));
        assert!(matches!(
            RestrictedLieAlgebra::new(&alg, map),
            Err(RestrictedError::NotPMap)
        ));
    }
}
