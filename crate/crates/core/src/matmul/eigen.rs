//! Eigenpair verification for integer symmetric matrices and integer
//! eigenvectors, from two matrix-product runs: `C = A·V` checked against
//! `V·D` by fingerprint, and `VᵀV` checked for zero off-diagonal entries.

use rand::Rng;

use super::{matmul_annotation, tamper, MatEntry, MatMulInstance, MatMulVerifier, Operand};
use crate::error::{Error, Rejection, Result};
use crate::field::{FieldElement, PrimeField};
use crate::fingerprint::Fingerprint;
use crate::pq_rc::ProverOptions;
use crate::transport::{FrameKind, Link, StateMeter, Verdict, VERDICT_ROUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenEntry {
    A { i: usize, j: usize, value: i64 },
    L { j: usize, value: i64 },
    V { i: usize, j: usize, value: i64 },
}

/// `a` is `n × n`, `v` is `n × k` with eigenvector `j` in column `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenInput {
    pub a: Vec<Vec<i64>>,
    pub lambdas: Vec<i64>,
    pub v: Vec<Vec<i64>>,
}

impl EigenInput {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    fn column(&self, j: usize) -> Vec<i64> {
        self.v.iter().map(|row| row[j]).collect()
    }
}

/// Instances for `A·V` (n × n by n × k) and `VᵀV` (k × n by n × k).
fn instances(field: PrimeField, n: usize, k: usize) -> Result<(MatMulInstance, MatMulInstance)> {
    let (h, v) = MatMulInstance::square_split(n);
    Ok((MatMulInstance::new(field, n, k, n, h, v)?, MatMulInstance::new(field, k, k, n, h, v)?))
}

pub fn eigen_annotations(input: &EigenInput, field: PrimeField) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    let (i1, i2) = instances(field, input.n(), input.k())?;
    let cols: Vec<Vec<i64>> = (0..input.k()).map(|j| input.column(j)).collect();
    Ok((matmul_annotation(&i1, &input.a, &cols)?, matmul_annotation(&i2, &cols, &cols)?))
}

pub fn prove_eigen(link: &mut Link, input: &EigenInput, field: PrimeField, opts: ProverOptions) -> Result<Verdict> {
    let (mut ann1, ann2) = eigen_annotations(input, field)?;
    if opts.cheat {
        tamper(&mut ann1);
    }
    link.send_elements(1, 1, FrameKind::Annotation, &ann1)?;
    link.send_elements(2, 1, FrameKind::Annotation, &ann2)?;
    let f = link.expect(0, VERDICT_ROUND, FrameKind::Verdict)?;
    Verdict::decode(&f.body)
}

#[derive(Debug, Clone)]
pub struct EigenVerifier {
    n: usize,
    k: usize,
    run1: MatMulVerifier,
    run2: MatMulVerifier,
    /// Fingerprint of `V·D`, entry `(i, j)` at index `i·k + j`.
    fp_vd: Fingerprint,
    lambdas: Vec<Option<FieldElement>>,
}

impl EigenVerifier {
    pub fn new<R: Rng + ?Sized>(field: PrimeField, n: usize, k: usize, rng: &mut R) -> Result<Self> {
        let (i1, i2) = instances(field, n, k)?;
        let run1 = MatMulVerifier::new(i1, rng)?;
        let run2 = MatMulVerifier::new(i2, rng)?;
        let fp_vd = Fingerprint::new(field.sample(rng), (n * k) as u64);
        Ok(EigenVerifier { n, k, run1, run2, fp_vd, lambdas: vec![None; k] })
    }

    pub fn observe(&mut self, e: EigenEntry) -> Result<()> {
        let inst = *self.run1.instance();
        match e {
            EigenEntry::A { i, j, value } => {
                let (x, y) = inst.cell(j);
                self.run1.observe(MatEntry { operand: Operand::A, outer: i, x, y, value })
            }
            EigenEntry::L { j, value } => {
                self.lambdas[j] = Some(inst.field.from_i64(value));
                Ok(())
            }
            EigenEntry::V { i, j, value } => {
                let lambda = self.lambdas[j]
                    .ok_or_else(|| Error::InvalidParam(format!("eigenvector {j} streamed before its eigenvalue")))?;
                let (x, y) = inst.cell(i);
                self.run1.observe(MatEntry { operand: Operand::B, outer: j, x, y, value })?;
                self.run2.observe(MatEntry { operand: Operand::A, outer: j, x, y, value })?;
                self.run2.observe(MatEntry { operand: Operand::B, outer: j, x, y, value })?;
                self.fp_vd.add_at((i * self.k + j) as u64, inst.field.from_i64(value) * lambda)
            }
        }
    }

    /// Both product states, both fingerprints, and the eigenvalues.
    pub fn state_size(&self) -> usize {
        self.run1.state_size() + self.run2.state_size() + self.fp_vd.state_size() + 1 + self.k
    }

    pub fn verify(&self, link: &mut Link, meter: &mut StateMeter) -> Result<()> {
        meter.observe(self.state_size());
        let mut fp_c = Fingerprint::new(self.fp_vd.point(), (self.n * self.k) as u64);
        let k = self.k;
        let mut bad_index = None;
        self.run1.verify_link(link, 1, 0, meter, |i, j, c| {
            if fp_c.add_at((i * k + j) as u64, c).is_err() {
                bad_index = Some((i, j));
            }
        })?;
        if let Some((i, j)) = bad_index {
            return Err(Error::Internal(format!("product entry ({i}, {j}) out of range")));
        }
        let mut orthogonal = true;
        self.run2.verify_link(link, 2, 0, meter, |i, j, c| {
            if i != j && !c.is_zero() {
                orthogonal = false;
            }
        })?;
        if !orthogonal {
            return Err(Rejection::NotOrthogonal.into());
        }
        if fp_c.value() != self.fp_vd.value() {
            return Err(Rejection::Eigen.into());
        }
        Ok(())
    }
}

/// Integer `d × d` matrix with orthogonal columns of equal squared norm.
pub fn orthogonal_scaled<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<Vec<i64>>> {
    let mut q = [0i64; 4];
    while q.iter().all(|&x| x == 0) {
        for x in &mut q {
            *x = rng.gen_range(-3..=3);
        }
    }
    let [a, b, c, e] = q;
    Ok(match d {
        1 => vec![vec![if a != 0 { a } else { 1 }]],
        2 => {
            let (a, b) = if a == 0 && b == 0 { (1, 0) } else { (a, b) };
            vec![vec![a, -b], vec![b, a]]
        }
        3 => vec![
            vec![a * a + b * b - c * c - e * e, 2 * (b * c - a * e), 2 * (b * e + a * c)],
            vec![2 * (b * c + a * e), a * a - b * b + c * c - e * e, 2 * (c * e - a * b)],
            vec![2 * (b * e - a * c), 2 * (c * e + a * b), a * a - b * b - c * c + e * e],
        ],
        4 => vec![
            vec![a, -b, -c, -e],
            vec![b, a, -e, c],
            vec![c, e, a, -b],
            vec![e, -c, b, a],
        ],
        _ => return Err(Error::InvalidParam(format!("orthogonal generator supports d <= 4, got {d}"))),
    })
}

/// `A = Q·D·Qᵀ` with `QᵀQ = c·I`, so column `j` of `Q` has eigenvalue `c·D_j`.
pub fn random_eigen_input<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<EigenInput> {
    let q = orthogonal_scaled(d, rng)?;
    let c: i64 = q.iter().map(|row| row[0] * row[0]).sum();
    let diag: Vec<i64> = (0..d).map(|_| rng.gen_range(-5..=5)).collect();
    let a = (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|t| q[i][t] * diag[t] * q[j][t]).sum()).collect())
        .collect();
    Ok(EigenInput { a, lambdas: diag.iter().map(|x| c * x).collect(), v: q })
}
