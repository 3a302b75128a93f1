//! Polynomial types: univariate over a finite field, univariate with vector
//! coefficients, and multivariate with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{FieldDescriptor, FieldElement};

/// Dense univariate polynomial over a finite field, low coefficients first,
/// trailing zeros trimmed (the zero polynomial has no coefficients).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarPoly {
    field: FieldDescriptor,
    coeffs: Vec<FieldElement>,
}

impl ScalarPoly {
    pub fn zero(field: FieldDescriptor) -> ScalarPoly {
        ScalarPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> ScalarPoly {
        let mut p = ScalarPoly::zero(c.field());
        p.coeffs.push(c);
        p.trim();
        p
    }

    pub fn from_coeffs(field: FieldDescriptor, coeffs: &[FieldElement]) -> ScalarPoly {
        let mut p = ScalarPoly { field, coeffs: coeffs.to_vec() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 alongside is_zero = true.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or_else(|| self.field.zero())
    }

    pub fn monic(mut self) -> ScalarPoly {
        if self.is_zero() {
            return self;
        }
        let inv = self.leading().inv();
        for c in &mut self.coeffs {
            *c = *c * inv;
        }
        self
    }

    /// Euclidean division by a nonzero divisor: (quotient, remainder).
    pub fn div_rem(self, divisor: &ScalarPoly) -> (ScalarPoly, ScalarPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let f = self.field;
        let dlead = divisor.leading().inv();
        let dd = divisor.deg();
        let mut rem = self;
        if rem.is_zero() || rem.deg() < dd {
            return (ScalarPoly::zero(f), rem);
        }
        let mut quot = vec![f.zero(); rem.deg() - dd + 1];
        while !rem.is_zero() && rem.deg() >= dd {
            let shift = rem.deg() - dd;
            let c = rem.leading() * dlead;
            quot[shift] = c;
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                rem.coeffs[shift + j] = rem.coeffs[shift + j] - c * *dj;
            }
            rem.trim();
        }
        (ScalarPoly::from_coeffs(f, &quot), rem)
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + *c;
        }
        acc
    }
}

impl std::ops::Add for ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: ScalarPoly) -> ScalarPoly {
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![f.zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i] + *c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i] + *c;
        }
        ScalarPoly::from_coeffs(f, &coeffs)
    }
}

impl std::ops::Sub for ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: ScalarPoly) -> ScalarPoly {
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![f.zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i] + *c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i] - *c;
        }
        ScalarPoly::from_coeffs(f, &coeffs)
    }
}

impl std::ops::Mul for ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: ScalarPoly) -> ScalarPoly {
        let f = self.field;
        if self.is_zero() || rhs.is_zero() {
            return ScalarPoly::zero(f);
        }
        let mut coeffs = vec![f.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + *a * *b;
            }
        }
        ScalarPoly::from_coeffs(f, &coeffs)
    }
}

impl fmt::Debug for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial in one variable T whose coefficients are coordinate vectors of a
/// fixed dimension (elements of a Lie algebra written in a basis). Trailing
/// zero coefficients are trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct VecPoly {
    field: FieldDescriptor,
    dim: usize,
    coeffs: Vec<Vec<FieldElement>>,
}

impl VecPoly {
    pub fn zero(field: FieldDescriptor, dim: usize) -> VecPoly {
        VecPoly { field, dim, coeffs: Vec::new() }
    }

    pub fn from_coeffs(field: FieldDescriptor, dim: usize, coeffs: &[Vec<FieldElement>]) -> VecPoly {
        for c in coeffs {
            assert_eq!(c.len(), dim, "coefficient dimension mismatch");
        }
        let mut p = VecPoly { field, dim, coeffs: coeffs.to_vec() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self
            .coeffs
            .last()
            .is_some_and(|c| c.iter().all(FieldElement::is_zero))
        {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored coefficients (degree + 1 for nonzero polynomials).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of T^i as a coordinate vector (zero vector if absent).
    pub fn coeff(&self, i: usize) -> Vec<FieldElement> {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| vec![self.field.zero(); self.dim])
    }

    pub fn add(&self, rhs: &VecPoly) -> VecPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeff(i);
            let b = rhs.coeff(i);
            coeffs.push(a.iter().zip(&b).map(|(x, y)| *x + *y).collect());
        }
        VecPoly::from_coeffs(self.field, self.dim, &coeffs)
    }

    pub fn scale(&self, c: FieldElement) -> VecPoly {
        let coeffs: Vec<Vec<FieldElement>> = self
            .coeffs
            .iter()
            .map(|v| v.iter().map(|x| *x * c).collect())
            .collect();
        VecPoly::from_coeffs(self.field, self.dim, &coeffs)
    }
}

impl fmt::Debug for VecPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VecPoly(deg {} over dim {})", self.coeffs.len().saturating_sub(1), self.dim)
    }
}

/// Multivariate polynomial with exact rational coefficients over a fixed
/// ordered variable list; terms keyed by exponent vectors, no zero terms kept.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl RatMPoly {
    pub fn zero(vars: &[&str]) -> RatMPoly {
        RatMPoly { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], value: BigRational) -> RatMPoly {
        let mut p = RatMPoly::zero(vars);
        if !value.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], value);
        }
        p
    }

    pub fn from_int(vars: &[&str], value: i64) -> RatMPoly {
        RatMPoly::constant(vars, BigRational::from(BigInt::from(value)))
    }

    /// The ratio a/b as a constant polynomial.
    pub fn from_ratio(vars: &[&str], a: i64, b: i64) -> RatMPoly {
        RatMPoly::constant(vars, BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    pub fn var(vars: &[&str], name: &str) -> RatMPoly {
        let mut p = RatMPoly::zero(vars);
        let idx = p
            .vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut exp = vec![0; p.vars.len()];
        exp[idx] = 1;
        p.terms.insert(exp, BigRational::one());
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn assert_same_vars(&self, rhs: &RatMPoly) {
        assert_eq!(self.vars, rhs.vars, "variable-list mismatch");
    }

    pub fn add(&self, rhs: &RatMPoly) -> RatMPoly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (exp, c) in &rhs.terms {
            let entry = out.terms.entry(exp.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(exp);
            }
        }
        out
    }

    pub fn neg(&self) -> RatMPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, rhs: &RatMPoly) -> RatMPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatMPoly) -> RatMPoly {
        self.assert_same_vars(rhs);
        let mut out = RatMPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                let entry = out.terms.entry(exp).or_insert_with(BigRational::zero);
                *entry += c;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn scale(&self, c: &BigRational) -> RatMPoly {
        if c.is_zero() {
            return RatMPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> RatMPoly {
        let mut acc = RatMPoly::constant(
            &self.vars.iter().map(String::as_str).collect::<Vec<_>>(),
            BigRational::one(),
        );
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Debug for RatMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in exp.iter().enumerate() {
                if e == 1 {
                    write!(f, "*{}", self.vars[i])?;
                } else if e > 1 {
                    write!(f, "*{}^{}", self.vars[i], e)?;
                }
            }
        }
        Ok(())
    }
}
