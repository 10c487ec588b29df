//! Exact rational geometry on integer points.

use num_rational::Ratio;

pub type Q = Ratio<i128>;

fn zero() -> Q {
    Q::from_integer(0)
}

fn is_zero(x: &Q) -> bool {
    *x.numer() == 0
}

fn q(x: i64) -> Q {
    Q::from_integer(x as i128)
}

/// Squared distance from an integer point to a rational point.
pub fn dist2(p: &[i64], c: &[Q]) -> Q {
    p.iter().zip(c).map(|(&x, cx)| (q(x) - cx) * (q(x) - cx)).fold(zero(), |a, b| a + b)
}

/// Solves `m x = b` over the rationals; `None` if `m` is singular.
fn solve(mut m: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !is_zero(&m[r][col]))?;
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !is_zero(&m[r][col]) {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    let t = m[col][c] * f;
                    m[r][c] -= t;
                }
                let t = b[col] * f;
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| b[i] / m[i][i]).collect())
}

/// Ball through all given points with its center in their affine hull:
/// the smallest ball having every point on its boundary. `None` for an empty
/// or affinely dependent set.
pub fn circumball(points: &[&[i64]]) -> Option<(Vec<Q>, Q)> {
    let p0 = *points.first()?;
    let diffs: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let gram: Vec<Vec<Q>> = diffs.iter().map(|a| diffs.iter().map(|b| q(dot(a, b))).collect()).collect();
    let rhs: Vec<Q> = diffs.iter().map(|a| Q::new(dot(a, a) as i128, 2)).collect();
    let lambda = solve(gram, rhs)?;
    let center: Vec<Q> = (0..p0.len())
        .map(|i| q(p0[i]) + diffs.iter().zip(&lambda).fold(zero(), |acc, (dv, l)| acc + l * q(dv[i])))
        .collect();
    let r2 = dist2(p0, &center);
    Some((center, r2))
}

fn subsets(n: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(move |s| s.len() <= max)
}

/// Minimum enclosing ball by enumerating every subset of at most `d + 1`
/// points and keeping the smallest circumball that encloses all of them.
/// Intended for small sets (witnesses, test oracles).
pub fn meb_by_subsets(points: &[Vec<i64>]) -> Option<(Vec<Q>, Q)> {
    let d = points.first()?.len();
    let mut best: Option<(Vec<Q>, Q)> = None;
    for s in subsets(points.len(), d + 1) {
        let sub: Vec<&[i64]> = s.iter().map(|&i| points[i].as_slice()).collect();
        if let Some((c, r2)) = circumball(&sub) {
            if best.as_ref().is_some_and(|b| b.1 <= r2) {
                continue;
            }
            if points.iter().all(|p| dist2(p, &c) <= r2) {
                best = Some((c, r2));
            }
        }
    }
    best
}

fn welzl(pts: &[Vec<i64>], n: usize, boundary: &mut Vec<Vec<i64>>, d: usize) -> Option<(Vec<Q>, Q)> {
    if n == 0 || boundary.len() == d + 1 {
        let refs: Vec<&[i64]> = boundary.iter().map(|p| p.as_slice()).collect();
        return circumball(&refs);
    }
    let p = &pts[n - 1];
    if let Some(ball) = welzl(pts, n - 1, boundary, d) {
        if dist2(p, &ball.0) <= ball.1 {
            return Some(ball);
        }
    }
    boundary.push(p.clone());
    let res = welzl(pts, n - 1, boundary, d);
    boundary.pop();
    res
}

/// Exact minimum enclosing ball of distinct points (Welzl's recursion with
/// exact arithmetic), falling back to subset enumeration in degenerate
/// configurations.
pub fn meb(points: &[Vec<i64>]) -> Option<(Vec<Q>, Q)> {
    let d = points.first()?.len();
    let mut boundary = Vec::new();
    match welzl(points, points.len(), &mut boundary, d) {
        Some(ball) if points.iter().all(|p| dist2(p, &ball.0) <= ball.1) => Some(ball),
        _ => meb_by_subsets(points),
    }
}

/// `floor(c + 1/2)` per coordinate.
pub fn round_point(c: &[Q]) -> Vec<i64> {
    c.iter().map(|x| (x + Q::new(1, 2)).floor().to_integer() as i64).collect()
}

/// Dimension of the affine hull, via exact elimination on difference vectors.
pub fn affine_rank(points: &[&[i64]]) -> usize {
    let Some(&p0) = points.first() else { return 0 };
    let mut rows: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| q(a - b)).collect())
        .collect();
    let cols = p0.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !is_zero(&rows[r][c])) else { continue };
        rows.swap(rank, piv);
        for r in 0..rows.len() {
            if r != rank && !is_zero(&rows[r][c]) {
                let f = rows[r][c] / rows[rank][c];
                for k in c..cols {
                    let t = rows[rank][k] * f;
                    rows[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Sorted distinct points.
pub fn distinct(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut v = points.to_vec();
    v.sort();
    v.dedup();
    v
}
