//! Finite fields F_{p^k} with exact arithmetic.
//!
//! Elements are stored packed: the coordinate vector (c_0, ..., c_{k-1}) of an
//! element c_0 + c_1 g + ... + c_{k-1} g^{k-1} (g the class of x modulo the
//! field's irreducible modulus) is packed as the integer sum c_i p^i. Packed
//! values double as the canonical ordering used whenever a deterministic
//! "smallest witness" is required.

use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use super::MAX_FIELD_ORDER;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("field order {0}^{1} exceeds the enumeration cap 2^20")]
    OrderTooLarge(u64, u32),
    #[error("operation requires a prime field, got degree {0}")]
    NotPrimeField(u32),
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("operation undefined at zero")]
    ZeroArgument,
}

/// Immutable data backing one field; interned for the process lifetime.
#[derive(Debug)]
struct FieldInner {
    p: u64,
    k: u32,
    q: u64,
    /// Monic irreducible modulus, coefficients low-to-high, length k+1.
    modulus: Vec<u64>,
}

static REGISTRY: Mutex<Vec<&'static FieldInner>> = Mutex::new(Vec::new());

/// A finite field F_{p^k}. Copyable handle; fields with equal (p, k) are
/// identical (construction is deterministic and interned).
#[derive(Copy, Clone)]
pub struct FieldDescriptor {
    inner: &'static FieldInner,
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.inner, other.inner)
    }
}
impl Eq for FieldDescriptor {}

impl std::hash::Hash for FieldDescriptor {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.p.hash(state);
        self.inner.k.hash(state);
    }
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.k == 1 {
            write!(f, "F_{}", self.inner.p)
        } else {
            write!(f, "F_{}^{}", self.inner.p, self.inner.k)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial remainder of `a` by monic `m`, both dense low-to-high over F_p.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate().take(dm) {
                let idx = shift + j;
                r[idx] = (r[idx] + (p - mj % p) * lead) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    // constant term zero means x divides f
    if k >= 1 && f[0] == 0 {
        return k == 1;
    }
    // trial division by every monic polynomial of degree 1 ..= k/2
    for d in 1..=(k / 2) {
        let count = p.pow(d as u32);
        for m in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = m;
            for _ in 0..d {
                g.push(t % p);
                t /= p;
            }
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Construct (or fetch) the field F_{p^k}. The modulus is the
/// lexicographically smallest monic irreducible of degree k over F_p, where
/// candidates are ordered by their packed low-to-high digit value; degree 1
/// uses the identity modulus x.
pub fn field_make(p: u64, k: u32) -> Result<FieldDescriptor, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k < 1 {
        return Err(FieldError::BadDegree);
    }
    let mut q: u64 = 1;
    for _ in 0..k {
        q = q.checked_mul(p).ok_or(FieldError::OrderTooLarge(p, k))?;
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::OrderTooLarge(p, k));
        }
    }

    let mut registry = REGISTRY.lock().unwrap();
    if let Some(inner) = registry.iter().find(|f| f.p == p && f.k == k) {
        return Ok(FieldDescriptor { inner });
    }

    let modulus = if k == 1 {
        vec![0, 1]
    } else {
        let mut found = None;
        for m in 0..q {
            let mut f = Vec::with_capacity(k as usize + 1);
            let mut t = m;
            for _ in 0..k {
                f.push(t % p);
                t /= p;
            }
            f.push(1);
            if is_irreducible(&f, p) {
                found = Some(f);
                break;
            }
        }
        found.expect("an irreducible monic polynomial of each degree exists over every F_p")
    };

    let inner: &'static FieldInner = Box::leak(Box::new(FieldInner { p, k, q, modulus }));
    registry.push(inner);
    Ok(FieldDescriptor { inner })
}

impl FieldDescriptor {
    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.k
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    /// Modulus coefficients, low-to-high, length k+1, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: *self, val: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: *self, val: 1 }
    }

    /// The class of x modulo the modulus; the canonical power-basis generator
    /// of an extension field. Only meaningful for k >= 2.
    pub fn generator(&self) -> FieldElement {
        assert!(self.inner.k >= 2, "prime fields have no extension generator");
        FieldElement { field: *self, val: self.inner.p }
    }

    /// Embed an integer via the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.inner.p as i64;
        let r = n.rem_euclid(p) as u64;
        FieldElement { field: *self, val: r }
    }

    /// Element with the given coordinate digits (low power first); missing
    /// digits are zero. Digits are reduced mod p.
    pub fn element(&self, digits: &[u64]) -> FieldElement {
        assert!(digits.len() <= self.inner.k as usize, "too many coordinates");
        let p = self.inner.p;
        let mut val = 0;
        for &d in digits.iter().rev() {
            val = val * p + d % p;
        }
        FieldElement { field: *self, val }
    }

    /// Element from its packed canonical index in 0..q.
    pub fn from_index(&self, idx: u64) -> FieldElement {
        assert!(idx < self.inner.q);
        FieldElement { field: *self, val: idx }
    }

    /// All q elements in canonical (packed-index) order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.q).map(move |v| FieldElement { field: self, val: v })
    }

    pub fn nonzero_elements(self) -> impl Iterator<Item = FieldElement> {
        (1..self.inner.q).map(move |v| FieldElement { field: self, val: v })
    }

    fn unpack(&self, val: u64) -> Vec<u64> {
        let p = self.inner.p;
        let k = self.inner.k as usize;
        let mut digits = vec![0; k];
        let mut t = val;
        for d in digits.iter_mut() {
            *d = t % p;
            t /= p;
        }
        digits
    }

    fn pack(&self, digits: &[u64]) -> u64 {
        let p = self.inner.p;
        let mut val = 0;
        for &d in digits.iter().rev() {
            val = val * p + d;
        }
        val
    }
}

/// An element of a finite field; ordering and hashing follow the packed
/// canonical index, so sorted element lists are reproducible.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldDescriptor,
    val: u64,
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |e: &FieldElement| (e.field.characteristic(), e.field.degree(), e.val);
        key(self).cmp(&key(other))
    }
}

impl FieldElement {
    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.val == 0
    }

    pub fn is_one(&self) -> bool {
        self.val == 1
    }

    /// Packed canonical index in 0..q.
    pub fn index(&self) -> u64 {
        self.val
    }

    /// Coordinate digits (low power first), length k.
    pub fn digits(&self) -> Vec<u64> {
        self.field.unpack(self.val)
    }

    /// The residue for prime-field elements.
    pub fn residue(&self) -> u64 {
        assert_eq!(self.field.degree(), 1, "residue only defined on prime fields");
        self.val
    }

    /// True when the element lies in the prime subfield F_p.
    pub fn in_prime_subfield(&self) -> bool {
        self.val < self.field.characteristic()
    }

    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "zero has no inverse");
        self.pow(self.field.order() - 2)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        let mut base = *self;
        let mut acc = self.field.one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Power with a possibly negative exponent (inverts first).
    pub fn pow_signed(&self, e: i64) -> FieldElement {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().pow(e.unsigned_abs())
        }
    }

    /// The Frobenius a -> a^p.
    pub fn frobenius(&self) -> FieldElement {
        self.pow(self.field.characteristic())
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "field mismatch");
        let f = self.field;
        let p = f.characteristic();
        if f.degree() == 1 {
            return FieldElement { field: f, val: (self.val + rhs.val) % p };
        }
        let a = f.unpack(self.val);
        let b = f.unpack(rhs.val);
        let sum: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y) % p).collect();
        FieldElement { field: f, val: f.pack(&sum) }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let f = self.field;
        let p = f.characteristic();
        if f.degree() == 1 {
            return FieldElement { field: f, val: (p - self.val) % p };
        }
        let a = f.unpack(self.val);
        let neg: Vec<u64> = a.iter().map(|x| (p - x) % p).collect();
        FieldElement { field: f, val: f.pack(&neg) }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + (-rhs)
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "field mismatch");
        let f = self.field;
        let p = f.characteristic();
        if f.degree() == 1 {
            return FieldElement { field: f, val: (self.val * rhs.val) % p };
        }
        let k = f.degree() as usize;
        let a = f.unpack(self.val);
        let b = f.unpack(rhs.val);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        let r = poly_rem(&prod, f.modulus(), p);
        let mut digits = vec![0u64; k];
        digits[..r.len().min(k)].copy_from_slice(&r[..r.len().min(k)]);
        FieldElement { field: f, val: f.pack(&digits) }
    }
}

impl std::ops::Div for FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: FieldElement) -> FieldElement {
        self * rhs.inv()
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 || self.in_prime_subfield() {
            return write!(f, "{}", self.val);
        }
        let digits = self.digits();
        let mut first = true;
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, d) {
                (0, _) => write!(f, "{d}")?,
                (1, 1) => write!(f, "g")?,
                (1, _) => write!(f, "{d}g")?,
                (_, 1) => write!(f, "g^{i}")?,
                (_, _) => write!(f, "{d}g^{i}")?,
            }
        }
        Ok(())
    }
}

/// The unique b with b^p = a (Frobenius is bijective); equals a^(p^(k-1)).
pub fn pth_root(a: FieldElement) -> FieldElement {
    let f = a.field();
    let k = f.degree();
    let mut e: u64 = 1;
    for _ in 0..k.saturating_sub(1) {
        e *= f.characteristic();
    }
    a.pow(e)
}

/// Some b with b^n = a, if one exists; the witness with smallest canonical
/// index is returned. Exhaustive scan.
pub fn nth_root(a: FieldElement, n: u64) -> Option<FieldElement> {
    assert!(n >= 1, "root order must be positive");
    let f = a.field();
    if a.is_zero() {
        return Some(f.zero());
    }
    f.elements().find(|b| b.pow(n) == a)
}

/// An embedding of F_{p^j} into F_{p^k} with j | k, realized by mapping the
/// source generator to a root of the source modulus inside the target field.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FieldEmbedding {
    src: FieldDescriptor,
    dst: FieldDescriptor,
    gen_image: FieldElement,
}

impl FieldEmbedding {
    pub fn src(&self) -> FieldDescriptor {
        self.src
    }

    pub fn dst(&self) -> FieldDescriptor {
        self.dst
    }

    /// Image of the source polynomial generator.
    pub fn gen_image(&self) -> FieldElement {
        self.gen_image
    }

    pub fn map(&self, a: FieldElement) -> FieldElement {
        assert!(a.field() == self.src, "element not from the embedding source");
        let mut acc = self.dst.zero();
        let mut pw = self.dst.one();
        for d in a.digits() {
            acc = acc + self.dst.from_int(d as i64) * pw;
            pw = pw * self.gen_image;
        }
        acc
    }
}

/// The canonical embedding of `src` into `dst`: both fields must share a
/// characteristic and src.degree() must divide dst.degree(). The source
/// generator is sent to the root of the source modulus with smallest
/// canonical index in `dst`, so repeated calls agree.
pub fn field_embedding(src: FieldDescriptor, dst: FieldDescriptor) -> Option<FieldEmbedding> {
    if src.characteristic() != dst.characteristic() {
        return None;
    }
    if dst.degree() % src.degree() != 0 {
        return None;
    }
    if src.degree() == 1 {
        return Some(FieldEmbedding { src, dst, gen_image: dst.zero() });
    }
    if src == dst {
        return Some(FieldEmbedding { src, dst, gen_image: dst.generator() });
    }
    let modulus = src.modulus().to_vec();
    let root = dst.elements().find(|t| {
        let mut acc = dst.zero();
        let mut pw = dst.one();
        for &c in &modulus {
            acc = acc + dst.from_int(c as i64) * pw;
            pw = pw * *t;
        }
        acc.is_zero()
    })?;
    Some(FieldEmbedding { src, dst, gen_image: root })
}

/// Whether a nonzero element of a prime field F_p (p odd) is a square, via
/// the Euler criterion a^((p-1)/2) = 1.
pub fn is_quadratic_residue(a: FieldElement) -> Result<bool, FieldError> {
    let f = a.field();
    if f.degree() != 1 {
        return Err(FieldError::NotPrimeField(f.degree()));
    }
    if f.characteristic() == 2 {
        return Err(FieldError::EvenCharacteristic);
    }
    if a.is_zero() {
        return Err(FieldError::ZeroArgument);
    }
    Ok(a.pow((f.characteristic() - 1) / 2).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(field_make(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(field_make(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(field_make(2, 0).unwrap_err(), FieldError::BadDegree);
        assert!(matches!(field_make(2, 21).unwrap_err(), FieldError::OrderTooLarge(2, 21)));
        assert!(matches!(field_make(1048573, 2).unwrap_err(), FieldError::OrderTooLarge(..)));
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(field_make(2, 1).unwrap().modulus(), &[0, 1]);
        // x^2+x+1 is the only irreducible monic quadratic over F_2
        assert_eq!(field_make(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // lex-smallest irreducible quadratic over F_3 is x^2+1
        assert_eq!(field_make(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // over F_2 the cubics x^3, x^3+1, x^3+x all factor; x^3+x+1 is first
        assert_eq!(field_make(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn interning_returns_identical_descriptors() {
        let f1 = field_make(5, 1).unwrap();
        let f2 = field_make(5, 1).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn frobenius_fixed_field_law() {
        for (p, k) in [(2, 1), (3, 1), (7, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 12)] {
            let f = field_make(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(a.pow(f.order()), a, "a^q != a in F_{p}^{k}");
                assert_eq!(pth_root(a).pow(p), a);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2, 2), (3, 2), (5, 1)] {
            let f = field_make(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(a + f.zero(), a);
                assert_eq!(a * f.one(), a);
                assert_eq!(a - a, f.zero());
                if !a.is_zero() {
                    assert_eq!(a * a.inv(), f.one());
                }
                for b in f.elements() {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in f.elements() {
                        assert_eq!((a + b) * c, a * c + b * c);
                        assert_eq!((a * b) * c, a * (b * c));
                    }
                }
            }
        }
    }

    #[test]
    fn generator_pth_root_in_f4() {
        let f = field_make(2, 2).unwrap();
        let g = f.generator();
        let r = pth_root(g);
        assert_eq!(r * r, g);
        assert_eq!(r, g * g);
    }

    #[test]
    fn pth_root_in_f3() {
        let f = field_make(3, 1).unwrap();
        assert_eq!(pth_root(f.from_int(2)), f.from_int(2));
    }

    #[test]
    fn nth_root_examples() {
        let f5 = field_make(5, 1).unwrap();
        assert_eq!(nth_root(f5.zero(), 3), Some(f5.zero()));
        assert_eq!(nth_root(f5.from_int(4), 2), Some(f5.from_int(2)));
        assert_eq!(nth_root(f5.from_int(2), 2), None);
    }

    #[test]
    fn nth_root_exhaustive_consistency() {
        for (p, k) in [(2, 2), (3, 1), (5, 1), (3, 2), (7, 1)] {
            let f = field_make(p, k).unwrap();
            for a in f.elements() {
                for n in 1..=6 {
                    match nth_root(a, n) {
                        Some(b) => assert_eq!(b.pow(n), a),
                        None => {
                            assert!(f.elements().all(|c| c.pow(n) != a));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_residues() {
        let f7 = field_make(7, 1).unwrap();
        assert!(is_quadratic_residue(f7.from_int(2)).unwrap());
        let f5 = field_make(5, 1).unwrap();
        assert!(is_quadratic_residue(f5.from_int(1)).unwrap());
        assert!(!is_quadratic_residue(f5.from_int(2)).unwrap());

        let f2 = field_make(2, 1).unwrap();
        assert!(is_quadratic_residue(f2.one()).is_err());
        assert!(is_quadratic_residue(f5.zero()).is_err());
        let f9 = field_make(3, 2).unwrap();
        assert!(is_quadratic_residue(f9.one()).is_err());
    }

    #[test]
    fn residue_counts_match_half_group() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let f = field_make(p, 1).unwrap();
            let count = f
                .nonzero_elements()
                .filter(|a| is_quadratic_residue(*a).unwrap())
                .count() as u64;
            assert_eq!(count, (p - 1) / 2);
        }
    }

    #[test]
    fn display_forms() {
        let f9 = field_make(3, 2).unwrap();
        let g = f9.generator();
        assert_eq!(format!("{}", g + f9.from_int(2)), "g+2");
        assert_eq!(format!("{}", f9.from_int(2) * g), "2g");
        assert_eq!(format!("{}", f9.zero()), "0");
    }

    #[test]
    fn embeddings_are_ring_maps() {
        let f2 = field_make(2, 1).unwrap();
        let f4 = field_make(2, 2).unwrap();
        let f16 = field_make(2, 4).unwrap();
        assert!(field_embedding(f4, field_make(2, 3).unwrap()).is_none());
        assert!(field_embedding(f4, field_make(3, 2).unwrap()).is_none());

        for (src, dst) in [(f2, f4), (f2, f16), (f4, f16), (f4, f4)] {
            let e = field_embedding(src, dst).unwrap();
            assert_eq!(e.map(src.zero()), dst.zero());
            assert_eq!(e.map(src.one()), dst.one());
            for a in src.elements() {
                for b in src.elements() {
                    assert_eq!(e.map(a + b), e.map(a) + e.map(b));
                    assert_eq!(e.map(a * b), e.map(a) * e.map(b));
                }
            }
        }

        let f3 = field_make(3, 1).unwrap();
        let f9 = field_make(3, 2).unwrap();
        let e = field_embedding(f3, f9).unwrap();
        assert_eq!(e.map(f3.from_int(2)), f9.from_int(2));
        // injectivity on a nontrivial extension step
        let e49 = field_embedding(f9, field_make(3, 4).unwrap()).unwrap();
        let images: std::collections::BTreeSet<_> = f9.elements().map(|a| e49.map(a)).collect();
        assert_eq!(images.len(), 9);
    }
}
