use crate::error::{Error, Result};
use crate::field::FieldElement;

/// `L_x(r)` for the Lagrange basis on nodes `0..h`: 1 at node `x`, 0 at the
/// other nodes, degree `h - 1`.
pub fn lagrange_basis_at(h: usize, x: usize, r: FieldElement) -> FieldElement {
    let field = r.field();
    let xf = field.elem(x as u64);
    let mut num = field.one();
    let mut den = field.one();
    for t in 0..h {
        if t == x {
            continue;
        }
        let tf = field.elem(t as u64);
        num *= r - tf;
        den *= xf - tf;
    }
    // den is a product of nonzero small integers; invertible whenever h < p
    num * den.inverse().expect("interpolation nodes collide in this field")
}

/// Evaluations `L_0(r), ..., L_{h-1}(r)`.
pub fn lagrange_basis_all(h: usize, r: FieldElement) -> Vec<FieldElement> {
    (0..h).map(|x| lagrange_basis_at(h, x, r)).collect()
}

/// Streaming evaluation of the grid low-degree extension `ã(r, y)` for every
/// column `y`, where the vector is laid out on `[h] × [v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLdeState {
    h: usize,
    r: FieldElement,
    /// `prod_{t < h} (r - t)`, zero when `r` is itself a node.
    master: FieldElement,
    row: Vec<FieldElement>,
}

impl GridLdeState {
    pub fn new(h: usize, v: usize, r: FieldElement) -> Result<Self> {
        if h == 0 || v == 0 {
            return Err(Error::InvalidParam("grid dimensions must be positive".into()));
        }
        if h as u64 >= r.field().modulus() {
            return Err(Error::InvalidParam(format!("grid height {h} exceeds the field")));
        }
        let field = r.field();
        let master = (0..h).fold(field.one(), |acc, t| acc * (r - field.elem(t as u64)));
        Ok(GridLdeState { h, r, master, row: vec![field.zero(); v] })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn v(&self) -> usize {
        self.row.len()
    }

    pub fn point(&self) -> FieldElement {
        self.r
    }

    /// `L_x(r)` using the cached node product.
    pub fn basis(&self, x: usize) -> FieldElement {
        let field = self.r.field();
        if self.master.is_zero() {
            return if self.r.value() == x as u64 { field.one() } else { field.zero() };
        }
        let xf = field.elem(x as u64);
        let mut den = self.r - xf;
        for t in 0..self.h {
            if t != x {
                den *= xf - field.elem(t as u64);
            }
        }
        self.master * den.inverse().expect("nonzero by construction")
    }

    /// `row[y] += delta * L_x(r)` for the entry at grid cell `(x, y)`.
    pub fn update(&mut self, x: usize, y: usize, delta: FieldElement) -> Result<()> {
        if x >= self.h || y >= self.row.len() {
            return Err(Error::InvalidParam(format!(
                "cell ({x}, {y}) outside {}x{} grid",
                self.h,
                self.row.len()
            )));
        }
        let l = self.basis(x);
        self.row[y] += delta * l;
        Ok(())
    }

    /// Same as [`update`](Self::update) with a linear index `x + h * y`.
    pub fn update_linear(&mut self, index: usize, delta: FieldElement) -> Result<()> {
        self.update(index % self.h, index / self.h, delta)
    }

    pub fn row(&self) -> &[FieldElement] {
        &self.row
    }

    pub fn merge(&mut self, other: &GridLdeState) -> Result<()> {
        if self.r != other.r || self.h != other.h || self.row.len() != other.row.len() {
            return Err(Error::InvalidParam("cannot merge grid states with different shapes".into()));
        }
        for (a, &b) in self.row.iter_mut().zip(&other.row) {
            *a += b;
        }
        Ok(())
    }

    /// `r`, the cached node product, and one entry per column.
    pub fn state_size(&self) -> usize {
        self.row.len() + 2
    }
}
