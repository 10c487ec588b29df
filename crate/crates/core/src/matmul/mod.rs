//! Annotated rectangular matrix multiplication and eigenpair verification.
//!
//! Inner indices `l in [0, n)` sit on an `h × v` grid at cell
//! `(l mod h, l div h)`. For row `a_i` of `A` and column `b_j` of `B`, the
//! prover sends `s_ij(X) = sum_y a_i~(X, y) b_j~(X, y)` as `2h - 1`
//! coefficients; the product entry is `C_ij = sum_{x < h} s_ij(x)`.

mod eigen;
mod format;

pub use eigen::{
    eigen_annotations, orthogonal_scaled, prove_eigen, random_eigen_input, EigenEntry, EigenInput,
    EigenVerifier,
};
pub use format::{parse_eigen, parse_matmul, MatMulInput};

use rand::Rng;

use crate::error::{Error, Rejection, Result};
use crate::extension::{lagrange_basis_all, lagrange_interpolate, GridLdeState, UnivariatePoly};
use crate::field::{FieldElement, PrimeField};
use crate::pq_rc::ProverOptions;
use crate::transport::{FrameKind, Link, StateMeter, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatMulInstance {
    pub field: PrimeField,
    /// Rows of `A`.
    pub k: usize,
    /// Columns of `B`.
    pub kp: usize,
    /// Inner dimension.
    pub n: usize,
    pub h: usize,
    pub v: usize,
}

impl MatMulInstance {
    /// Checks `h * v >= n` and `|F| >= max(6 n^3, 100 h k k')`.
    pub fn new(field: PrimeField, k: usize, kp: usize, n: usize, h: usize, v: usize) -> Result<Self> {
        if k == 0 || kp == 0 || n == 0 || h == 0 || v == 0 {
            return Err(Error::InvalidParam("matrix dimensions must be positive".into()));
        }
        if (h as u128) * (v as u128) < n as u128 {
            return Err(Error::InvalidParam(format!("grid {h}x{v} cannot hold {n} entries")));
        }
        let need = (6 * (n as u128).pow(3)).max(100 * (h * k * kp) as u128);
        if (field.modulus() as u128) < need {
            return Err(Error::InvalidParam(format!(
                "field of size {} is below the required {need}",
                field.modulus()
            )));
        }
        Ok(MatMulInstance { field, k, kp, n, h, v })
    }

    /// Near-square split `h = ceil(sqrt n)`, `v = ceil(n / h)`.
    pub fn square_split(n: usize) -> (usize, usize) {
        let mut h = (n as f64).sqrt().ceil() as usize;
        while h * h < n {
            h += 1;
        }
        let h = h.max(1);
        (h, n.div_ceil(h).max(1))
    }

    /// `2(h - 1)`: the degree of a product of two degree-`(h-1)` interpolants.
    pub fn degree_bound(&self) -> usize {
        2 * (self.h - 1)
    }

    pub fn coeffs_per_entry(&self) -> usize {
        self.degree_bound() + 1
    }

    pub fn annotation_len(&self) -> usize {
        self.k * self.kp * self.coeffs_per_entry()
    }

    pub fn cell(&self, l: usize) -> (usize, usize) {
        (l % self.h, l / self.h)
    }

    fn check_inner(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.h || y >= self.v || y * self.h + x >= self.n {
            return Err(Error::InvalidParam(format!("cell ({x}, {y}) outside the inner dimension {}", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    A,
    B,
}

/// One streamed matrix entry. `outer` is the row of `A` or the column of
/// `B`; `(x, y)` is the grid cell of the inner index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatEntry {
    pub operand: Operand,
    pub outer: usize,
    pub x: usize,
    pub y: usize,
    pub value: i64,
}

/// `s_y = sum_i a_i~(r, y) α^i` and `s'_y = sum_j b_j~(r, y) α^{k j}`.
#[derive(Debug, Clone)]
pub struct MatMulVerifier {
    inst: MatMulInstance,
    alpha: FieldElement,
    s: GridLdeState,
    sp: GridLdeState,
}

impl MatMulVerifier {
    pub fn new<R: Rng + ?Sized>(inst: MatMulInstance, rng: &mut R) -> Result<Self> {
        let r = inst.field.sample(rng);
        let alpha = inst.field.sample(rng);
        Ok(MatMulVerifier {
            inst,
            alpha,
            s: GridLdeState::new(inst.h, inst.v, r)?,
            sp: GridLdeState::new(inst.h, inst.v, r)?,
        })
    }

    pub fn instance(&self) -> &MatMulInstance {
        &self.inst
    }

    pub fn observe(&mut self, e: MatEntry) -> Result<()> {
        self.inst.check_inner(e.x, e.y)?;
        let val = self.inst.field.from_i64(e.value);
        match e.operand {
            Operand::A => {
                if e.outer >= self.inst.k {
                    return Err(Error::InvalidParam(format!("row {} of A outside {}", e.outer, self.inst.k)));
                }
                self.s.update(e.x, e.y, val * self.alpha.pow(e.outer as u64))
            }
            Operand::B => {
                if e.outer >= self.inst.kp {
                    return Err(Error::InvalidParam(format!("column {} of B outside {}", e.outer, self.inst.kp)));
                }
                let exp = (self.inst.k * e.outer) as u64;
                self.sp.update(e.x, e.y, val * self.alpha.pow(exp))
            }
        }
    }

    /// `s` and `s'` (v each), `r`, `α`, and the running fingerprint.
    pub fn state_size(&self) -> usize {
        2 * self.inst.v + 3
    }

    pub fn s_rows(&self) -> (&[FieldElement], &[FieldElement]) {
        (self.s.row(), self.sp.row())
    }

    /// Checks an annotation and hands each verified `C_ij` to `sink` as it is
    /// read; nothing is emitted unless the whole annotation passes.
    pub fn verify_with(
        &self,
        coeffs: &[FieldElement],
        mut sink: impl FnMut(usize, usize, FieldElement),
    ) -> Result<()> {
        let inst = &self.inst;
        let per = inst.coeffs_per_entry();
        if coeffs.len() > inst.annotation_len() {
            return Err(Rejection::Degree { round: 1 }.into());
        }
        if coeffs.len() < inst.annotation_len() {
            return Err(Rejection::Malformed(format!(
                "annotation has {} elements, expected {}",
                coeffs.len(),
                inst.annotation_len()
            ))
            .into());
        }
        let field = inst.field;
        let r = self.s.point();
        let mut fp = field.zero();
        for (idx, chunk) in coeffs.chunks(per).enumerate() {
            let (i, j) = (idx / inst.kp, idx % inst.kp);
            let s_ij = UnivariatePoly::new(field, chunk.to_vec());
            fp += s_ij.evaluate(r) * self.alpha.pow((j * inst.k + i) as u64);
        }
        let rhs: FieldElement = self.s.row().iter().zip(self.sp.row()).map(|(&a, &b)| a * b).sum();
        if fp != rhs {
            return Err(Rejection::Fingerprint.into());
        }
        for (idx, chunk) in coeffs.chunks(per).enumerate() {
            let s_ij = UnivariatePoly::new(field, chunk.to_vec());
            let c = (0..inst.h).map(|x| s_ij.evaluate(field.elem(x as u64))).sum();
            sink(idx / inst.kp, idx % inst.kp, c);
        }
        Ok(())
    }

    /// Returns `C` row-major.
    pub fn verify(&self, coeffs: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut c = vec![self.inst.field.zero(); self.inst.k * self.inst.kp];
        let kp = self.inst.kp;
        self.verify_with(coeffs, |i, j, val| c[i * kp + j] = val)?;
        Ok(c)
    }

    /// Receives the annotation for `session` and verifies it.
    pub fn verify_link(
        &self,
        link: &mut Link,
        session: u32,
        other_elements: usize,
        meter: &mut StateMeter,
        sink: impl FnMut(usize, usize, FieldElement),
    ) -> Result<()> {
        meter.observe(other_elements + self.state_size());
        let f = link.expect(session, 1, FrameKind::Annotation)?;
        let coeffs = f.decode_elements(self.inst.field)?;
        self.verify_with(&coeffs, sink)
    }
}

/// Honest annotation. `a[i]` and `b[j]` are indexed by inner index `l`.
pub fn matmul_annotation(inst: &MatMulInstance, a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<FieldElement>> {
    if a.len() != inst.k || b.len() != inst.kp {
        return Err(Error::LengthMismatch(a.len() * b.len(), inst.k * inst.kp));
    }
    let field = inst.field;
    let points = inst.coeffs_per_entry();
    let basis: Vec<Vec<FieldElement>> =
        (0..points).map(|t| lagrange_basis_all(inst.h, field.elem(t as u64))).collect();
    // ext[t][y] = vec~(t, y)
    let extend = |vec: &Vec<i64>| -> Result<Vec<Vec<FieldElement>>> {
        if vec.len() > inst.n {
            return Err(Error::LengthMismatch(vec.len(), inst.n));
        }
        let mut grid = vec![vec![field.zero(); inst.h]; inst.v];
        for (l, &val) in vec.iter().enumerate() {
            let (x, y) = inst.cell(l);
            grid[y][x] = field.from_i64(val);
        }
        Ok(basis
            .iter()
            .map(|lx| {
                grid.iter()
                    .map(|col| col.iter().zip(lx).map(|(&g, &l)| g * l).sum())
                    .collect()
            })
            .collect())
    };
    let ea: Vec<_> = a.iter().map(extend).collect::<Result<_>>()?;
    let eb: Vec<_> = b.iter().map(extend).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(inst.annotation_len());
    for ai in &ea {
        for bj in &eb {
            let pts: Vec<(FieldElement, FieldElement)> = (0..points)
                .map(|t| {
                    let val = ai[t].iter().zip(&bj[t]).map(|(&x, &y)| x * y).sum();
                    (field.elem(t as u64), val)
                })
                .collect();
            out.extend(lagrange_interpolate(&pts)?.padded(points)?);
        }
    }
    Ok(out)
}

/// Adds one to the first coefficient, for soundness experiments.
pub fn tamper(coeffs: &mut [FieldElement]) {
    if let Some(c) = coeffs.first_mut() {
        *c += c.field().one();
    }
}

/// Prover side: one annotation, then the verdict.
pub fn prove_matmul(link: &mut Link, input: &MatMulInput, opts: ProverOptions) -> Result<Verdict> {
    let mut ann = matmul_annotation(&input.instance, &input.a, &input.b)?;
    if opts.cheat {
        tamper(&mut ann);
    }
    link.send_elements(1, 1, FrameKind::Annotation, &ann)?;
    let f = link.expect(0, crate::transport::VERDICT_ROUND, FrameKind::Verdict)?;
    Verdict::decode(&f.body)
}

/// Schoolbook `A · B` for tests and tools; `a` is `k × n`, `b` given by columns.
pub fn schoolbook(a: &[Vec<i64>], b_cols: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            b_cols
                .iter()
                .map(|col| row.iter().zip(col).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect()
}

pub(crate) fn entries_of(inst: &MatMulInstance, a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<MatEntry> {
    let mut out = Vec::new();
    for (operand, mat) in [(Operand::A, a), (Operand::B, b)] {
        for (outer, vec) in mat.iter().enumerate() {
            for (l, &value) in vec.iter().enumerate() {
                if value != 0 {
                    let (x, y) = inst.cell(l);
                    out.push(MatEntry { operand, outer, x, y, value });
                }
            }
        }
    }
    out
}
