//! Matrix stream files.
//!
//! ```text
//! matmul k=<rows of A> n=<inner> kp=<columns of B> h=<> v=<>
//! A <i> <x> <y> <value>        # A[i][y*h + x]
//! B <j> <x> <y> <value>        # B[y*h + x][j]
//!
//! eigen n=<> k=<>
//! A <i> <j> <value>            # symmetric n×n input
//! L <j> <lambda>               # claimed eigenvalue j
//! V <i> <j> <value>            # entry i of claimed eigenvector j
//! ```

use std::io::{BufRead, Lines};

use super::eigen::{EigenEntry, EigenInput};
use super::{MatEntry, MatMulInstance, Operand};
use crate::error::{Error, Result};
use crate::field::PrimeField;

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn kv(tok: &str, key: &str, line: usize) -> Result<usize> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| perr(line, format!("expected `{key}=<int>`, found `{tok}`")))
}

fn idx(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| perr(line, format!("bad index `{tok}`")))
}

fn int(tok: &str, line: usize) -> Result<i64> {
    tok.parse().map_err(|_| {
        if tok.parse::<f64>().is_ok() {
            perr(line, format!("non-integer entry `{tok}`: only integer matrices are supported"))
        } else {
            perr(line, format!("bad value `{tok}`"))
        }
    })
}

/// Line iterator that skips blanks and comments and tracks line numbers.
struct Body<R> {
    lines: Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Body<R> {
    fn next_line(&mut self) -> Option<Result<(usize, String)>> {
        loop {
            self.line_no += 1;
            match self.lines.next()? {
                Err(e) => return Some(Err(e.into())),
                Ok(l) => {
                    let t = strip(&l);
                    if !t.is_empty() {
                        return Some(Ok((self.line_no, t.to_string())));
                    }
                }
            }
        }
    }
}

/// Streaming reader over a `matmul` file.
pub struct MatMulStream<R> {
    body: Body<R>,
    inst: MatMulInstance,
}

pub fn parse_matmul<R: BufRead>(reader: R, field: PrimeField) -> Result<MatMulStream<R>> {
    let mut body = Body { lines: reader.lines(), line_no: 0 };
    let (line, head) = body.next_line().ok_or_else(|| perr(1, "missing header"))??;
    let toks: Vec<&str> = head.split_whitespace().collect();
    let inst = match toks.as_slice() {
        ["matmul", k, n, kp, h, v] => MatMulInstance::new(
            field,
            kv(k, "k", line)?,
            kv(kp, "kp", line)?,
            kv(n, "n", line)?,
            kv(h, "h", line)?,
            kv(v, "v", line)?,
        )
        .map_err(|e| perr(line, e.to_string()))?,
        _ => return Err(perr(line, format!("unrecognized header `{head}`"))),
    };
    Ok(MatMulStream { body, inst })
}

impl<R: BufRead> MatMulStream<R> {
    pub fn instance(&self) -> MatMulInstance {
        self.inst
    }

    fn parse(&self, line: usize, text: &str) -> Result<MatEntry> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let (operand, outer, x, y, value) = match toks.as_slice() {
            [m, o, x, y, val] => {
                let operand = match *m {
                    "A" => Operand::A,
                    "B" => Operand::B,
                    _ => return Err(perr(line, format!("unknown matrix `{m}`"))),
                };
                (operand, idx(o, line)?, idx(x, line)?, idx(y, line)?, int(val, line)?)
            }
            _ => return Err(perr(line, format!("malformed entry `{text}`"))),
        };
        let limit = if operand == Operand::A { self.inst.k } else { self.inst.kp };
        if outer >= limit || x >= self.inst.h || y >= self.inst.v || y * self.inst.h + x >= self.inst.n {
            return Err(perr(line, format!("entry `{text}` outside the declared shape")));
        }
        Ok(MatEntry { operand, outer, x, y, value })
    }
}

impl<R: BufRead> Iterator for MatMulStream<R> {
    type Item = Result<MatEntry>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, text) = match self.body.next_line()? {
            Ok(x) => x,
            Err(e) => return Some(Err(e)),
        };
        Some(self.parse(line, &text))
    }
}

/// Whole matrices, as the prover holds them. `a[i]` and `b[j]` are indexed
/// by inner index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatMulInput {
    pub instance: MatMulInstance,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

impl MatMulInput {
    pub fn read<R: BufRead>(reader: R, field: PrimeField) -> Result<Self> {
        let stream = parse_matmul(reader, field)?;
        let inst = stream.instance();
        let mut a = vec![vec![0i64; inst.n]; inst.k];
        let mut b = vec![vec![0i64; inst.n]; inst.kp];
        for e in stream {
            let e = e?;
            let l = e.y * inst.h + e.x;
            match e.operand {
                Operand::A => a[e.outer][l] += e.value,
                Operand::B => b[e.outer][l] += e.value,
            }
        }
        Ok(MatMulInput { instance: inst, a, b })
    }

    /// Nonzero entries in file order: `A` by row, then `B` by column.
    pub fn entries(&self) -> Vec<MatEntry> {
        super::entries_of(&self.instance, &self.a, &self.b)
    }

    pub fn to_text(&self) -> String {
        let inst = &self.instance;
        let mut s = format!("matmul k={} n={} kp={} h={} v={}\n", inst.k, inst.n, inst.kp, inst.h, inst.v);
        for e in super::entries_of(inst, &self.a, &self.b) {
            let m = if e.operand == Operand::A { "A" } else { "B" };
            s.push_str(&format!("{m} {} {} {} {}\n", e.outer, e.x, e.y, e.value));
        }
        s
    }
}

/// Streaming reader over an `eigen` file.
pub struct EigenStream<R> {
    body: Body<R>,
    pub n: usize,
    pub k: usize,
}

pub fn parse_eigen<R: BufRead>(reader: R) -> Result<EigenStream<R>> {
    let mut body = Body { lines: reader.lines(), line_no: 0 };
    let (line, head) = body.next_line().ok_or_else(|| perr(1, "missing header"))??;
    let toks: Vec<&str> = head.split_whitespace().collect();
    let (n, k) = match toks.as_slice() {
        ["eigen", n, k] => (kv(n, "n", line)?, kv(k, "k", line)?),
        _ => return Err(perr(line, format!("unrecognized header `{head}`"))),
    };
    if n == 0 || k == 0 || k > n {
        return Err(perr(line, "need 1 <= k <= n"));
    }
    Ok(EigenStream { body, n, k })
}

impl<R: BufRead> Iterator for EigenStream<R> {
    type Item = Result<EigenEntry>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, text) = match self.body.next_line()? {
            Ok(x) => x,
            Err(e) => return Some(Err(e)),
        };
        let toks: Vec<&str> = text.split_whitespace().collect();
        let parsed = (|| -> Result<EigenEntry> {
            let e = match toks.as_slice() {
                ["A", i, j, val] => EigenEntry::A { i: idx(i, line)?, j: idx(j, line)?, value: int(val, line)? },
                ["L", j, val] => EigenEntry::L { j: idx(j, line)?, value: int(val, line)? },
                ["V", i, j, val] => EigenEntry::V { i: idx(i, line)?, j: idx(j, line)?, value: int(val, line)? },
                _ => return Err(perr(line, format!("malformed entry `{text}`"))),
            };
            let ok = match e {
                EigenEntry::A { i, j, .. } => i < self.n && j < self.n,
                EigenEntry::L { j, .. } => j < self.k,
                EigenEntry::V { i, j, .. } => i < self.n && j < self.k,
            };
            if !ok {
                return Err(perr(line, format!("entry `{text}` outside n={} k={}", self.n, self.k)));
            }
            Ok(e)
        })();
        Some(parsed)
    }
}

impl EigenInput {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let stream = parse_eigen(reader)?;
        let (n, k) = (stream.n, stream.k);
        let mut input = EigenInput { a: vec![vec![0; n]; n], lambdas: vec![0; k], v: vec![vec![0; k]; n] };
        for e in stream {
            match e? {
                EigenEntry::A { i, j, value } => input.a[i][j] += value,
                EigenEntry::L { j, value } => input.lambdas[j] = value,
                EigenEntry::V { i, j, value } => input.v[i][j] += value,
            }
        }
        Ok(input)
    }

    /// Nonzero `A` entries, then eigenvalues, then `V` column by column.
    pub fn entries(&self) -> Vec<EigenEntry> {
        let (n, k) = (self.n(), self.k());
        let mut out = Vec::new();
        for (i, row) in self.a.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if value != 0 {
                    out.push(EigenEntry::A { i, j, value });
                }
            }
        }
        out.extend(self.lambdas.iter().enumerate().map(|(j, &value)| EigenEntry::L { j, value }));
        for j in 0..k {
            for i in 0..n {
                if self.v[i][j] != 0 {
                    out.push(EigenEntry::V { i, j, value: self.v[i][j] });
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("eigen n={} k={}\n", self.n(), self.k());
        for e in self.entries() {
            s.push_str(&match e {
                EigenEntry::A { i, j, value } => format!("A {i} {j} {value}\n"),
                EigenEntry::L { j, value } => format!("L {j} {value}\n"),
                EigenEntry::V { i, j, value } => format!("V {i} {j} {value}\n"),
            });
        }
        s
    }
}
