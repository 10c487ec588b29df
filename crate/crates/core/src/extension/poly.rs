use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// Dense univariate polynomial, lowest-degree coefficient first.
///
/// Trailing zero coefficients are trimmed, so `coeffs().len() - 1` is the
/// degree for every nonzero polynomial. The zero polynomial has no coefficients
/// and reports degree 0.
#[derive(Clone, PartialEq, Eq)]
pub struct UnivariatePoly {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
}

impl UnivariatePoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UnivariatePoly { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        UnivariatePoly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::new(c.field(), vec![c])
    }

    pub fn from_u64s(field: PrimeField, coeffs: &[u64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.elem(c)).collect())
    }

    pub fn from_i64s(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    /// The monomial `X`.
    pub fn x(field: PrimeField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, &c| acc * x + c)
    }

    /// `p(0) + p(1)`, the quantity every sum-check round tests.
    pub fn sum_over_bit(&self) -> FieldElement {
        let zero = self.coeff(0);
        let one = self.coeffs.iter().fold(self.field.zero(), |acc, &c| acc + c);
        zero + one
    }

    pub fn scale(&self, s: FieldElement) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.field, (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.field, (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(self.field, out)
    }

    /// Coefficient vector zero-padded to exactly `len` entries, as sent on the wire.
    ///
    /// Fails if the polynomial needs more than `len` coefficients.
    pub fn padded(&self, len: usize) -> Result<Vec<FieldElement>> {
        if self.coeffs.len() > len {
            return Err(Error::InvalidParam(format!(
                "degree {} does not fit in {len} coefficients",
                self.degree()
            )));
        }
        let mut out = self.coeffs.clone();
        out.resize(len, self.field.zero());
        Ok(out)
    }
}

impl fmt::Debug for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

/// Unique polynomial of degree `< points.len()` through every `(node, value)`.
pub fn lagrange_interpolate(points: &[(FieldElement, FieldElement)]) -> Result<UnivariatePoly> {
    let field = match points.first() {
        Some((x, _)) => x.field(),
        None => return Err(Error::InvalidParam("no interpolation points".into())),
    };
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(Error::InvalidParam(format!("duplicate interpolation node {xi}")));
        }
    }
    let n = points.len();
    // master = prod (X - x_i), lowest degree first
    let mut master = vec![field.one()];
    for &(xi, _) in points {
        let mut next = vec![field.zero(); master.len() + 1];
        for (k, &c) in master.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * xi;
        }
        master = next;
    }
    let mut out = vec![field.zero(); n];
    let mut quotient = vec![field.zero(); n];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        // master / (X - xi) by synthetic division, highest degree first
        let mut carry = field.zero();
        for k in (0..n).rev() {
            carry = master[k + 1] + carry * xi;
            quotient[k] = carry;
        }
        let denom: FieldElement = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(field.one(), |acc, (_, &(xj, _))| acc * (xi - xj));
        let w = yi * denom.inverse()?;
        for k in 0..n {
            out[k] += quotient[k] * w;
        }
    }
    Ok(UnivariatePoly::new(field, out))
}

/// Interpolates values given at the consecutive nodes `0, 1, ..., values.len() - 1`.
pub fn interpolate_consecutive(values: &[FieldElement]) -> Result<UnivariatePoly> {
    let field = values
        .first()
        .map(|v| v.field())
        .ok_or_else(|| Error::InvalidParam("no interpolation points".into()))?;
    let pts: Vec<_> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (field.elem(i as u64), v))
        .collect();
    lagrange_interpolate(&pts)
}
