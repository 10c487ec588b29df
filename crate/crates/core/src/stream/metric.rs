use crate::error::{Error, Result};

/// Finite metric space given by an explicit integer distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    m: usize,
    dist: Vec<u64>,
}

impl MetricSpace {
    /// Validates zero diagonal, symmetry, and the triangle inequality.
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParam("distance matrix must be square and nonempty".into()));
        }
        let dist: Vec<u64> = rows.into_iter().flatten().collect();
        let at = |i: usize, j: usize| dist[i * m + j];
        for i in 0..m {
            if at(i, i) != 0 {
                return Err(Error::InvalidParam(format!("d({i},{i}) != 0")));
            }
            for j in 0..m {
                if at(i, j) != at(j, i) {
                    return Err(Error::InvalidParam(format!("d({i},{j}) != d({j},{i})")));
                }
                for k in 0..m {
                    if at(i, k) > at(i, j) + at(j, k) {
                        return Err(Error::InvalidParam(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(MetricSpace { m, dist })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn dist(&self, i: usize, j: usize) -> u64 {
        self.dist[i * self.m + j]
    }

    /// Sorted distinct pairwise distances, including 0.
    pub fn distinct_distances(&self) -> Vec<u64> {
        let mut d = self.dist.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.dist.chunks(self.m)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("m={}\n", self.m);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}
