//! Random sign vectors with small pairwise inner products.
//!
//! Vector entries are `±1/sqrt(d)`; they are stored as `±1` and all checks use
//! integer dot products, so `<u_i, u_j> = dot / d` exactly.

use rand::Rng;

use crate::error::{Error, Result};

/// Batch retry limit for [`generate_almost_orthogonal`].
pub const MAX_ORTHO_BATCHES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostOrthogonalSet {
    pub d: usize,
    pub eps: f64,
    /// Sign patterns; vector `i` is `signs[i] / sqrt(d)`.
    pub signs: Vec<Vec<i8>>,
    /// Number of batches drawn, including the accepted one.
    pub batches: usize,
}

/// `floor(exp(eps^2 d / 4))`, at least 1.
pub fn ortho_count(d: usize, eps: f64) -> usize {
    ((eps * eps * d as f64 / 4.0).exp().floor() as usize).max(1)
}

/// Largest integer dot product allowed: `floor(eps * d)`.
fn dot_limit(d: usize, eps: f64) -> i64 {
    (eps * d as f64 + 1e-9).floor() as i64
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x as i64) * (y as i64)).sum()
}

impl AlmostOrthogonalSet {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// Largest `|<s_i, s_j>|` over distinct pairs of sign vectors.
    pub fn max_abs_dot(&self) -> i64 {
        let mut best = 0;
        for i in 0..self.signs.len() {
            for j in i + 1..self.signs.len() {
                best = best.max(dot(&self.signs[i], &self.signs[j]).abs());
            }
        }
        best
    }

    /// Unit norms and all pairwise bounds, in exact integer arithmetic.
    pub fn verify(&self) -> bool {
        self.signs.iter().all(|s| s.len() == self.d && dot(s, s) == self.d as i64)
            && self.max_abs_dot() <= dot_limit(self.d, self.eps)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("ortho d={} eps={} t={}\n", self.d, self.eps, self.signs.len());
        for s in &self.signs {
            let line: String = s.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Draws whole batches of `t = floor(exp(eps^2 d / 4))` uniform sign vectors
/// until every pair satisfies `|dot| <= eps * d`.
pub fn generate_almost_orthogonal<R: Rng + ?Sized>(
    d: usize,
    eps: f64,
    rng: &mut R,
) -> Result<AlmostOrthogonalSet> {
    if d == 0 || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParam(format!("need d >= 1 and 0 < eps <= 1, got d={d} eps={eps}")));
    }
    let t = ortho_count(d, eps);
    let limit = dot_limit(d, eps);
    for batch in 1..=MAX_ORTHO_BATCHES {
        let signs: Vec<Vec<i8>> = (0..t)
            .map(|_| (0..d).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
            .collect();
        let ok = (0..t).all(|i| (i + 1..t).all(|j| dot(&signs[i], &signs[j]).abs() <= limit));
        if ok {
            return Ok(AlmostOrthogonalSet { d, eps, signs, batches: batch });
        }
    }
    Err(Error::InvalidParam(format!("no valid batch within {MAX_ORTHO_BATCHES} attempts")))
}
