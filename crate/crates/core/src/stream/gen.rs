//! Seeded test-data generators and their text serializations.

use rand::Rng;

use super::{GridUniverse, MetricSpace, Point, StreamUpdate};

/// `n` updates over `[0, u)`; roughly one in five is a deletion of an index
/// already inserted, so frequencies stay non-negative.
pub fn random_stream<R: Rng + ?Sized>(u: u64, n: usize, rng: &mut R) -> Vec<StreamUpdate> {
    let mut counts = vec![0i64; u as usize];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.gen_range(0..u);
        if counts[i as usize] > 0 && rng.gen_bool(0.2) {
            counts[i as usize] -= 1;
            out.push(StreamUpdate::new(i, -1));
        } else {
            counts[i as usize] += 1;
            out.push(StreamUpdate::insert(i));
        }
    }
    out
}

pub fn random_points<R: Rng + ?Sized>(grid: GridUniverse, n: usize, rng: &mut R) -> Vec<Point> {
    (0..n)
        .map(|_| (0..grid.d()).map(|_| rng.gen_range(0..grid.m() as i64)).collect())
        .collect()
}

/// Shortest-path metric over random edge weights in `1..=20`.
pub fn random_metric<R: Rng + ?Sized>(m: usize, rng: &mut R) -> MetricSpace {
    let mut d = vec![vec![0u64; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let w = rng.gen_range(1..=20);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    MetricSpace::new(d).expect("shortest paths form a metric")
}

pub fn stream_to_text(u: u64, updates: &[StreamUpdate]) -> String {
    let mut s = format!("u={u}\n");
    for upd in updates {
        s.push_str(&format!("{} {:+}\n", upd.index, upd.delta));
    }
    s
}

pub fn points_to_text(grid: GridUniverse, points: &[Point]) -> String {
    let mut s = format!("grid m={} d={}\n", grid.m(), grid.d());
    for p in points {
        let coords: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        s.push_str(&coords.join(" "));
        s.push('\n');
    }
    s
}

/// Metric stream body referencing `metric_file`; one insertion per point.
pub fn metric_stream_to_text(metric_file: &str, points: &[usize]) -> String {
    let mut s = format!("metric file={metric_file}\n");
    for p in points {
        s.push_str(&format!("{p}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{parse_stream, read_points};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::io::Cursor;

    #[test]
    fn stream_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let ups = random_stream(256, 1000, &mut rng);
        let text = stream_to_text(256, &ups);
        let parsed: Vec<_> = parse_stream(Cursor::new(text)).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(parsed, ups);
        let mut again = ChaCha20Rng::seed_from_u64(7);
        assert_eq!(random_stream(256, 1000, &mut again), ups);
    }

    #[test]
    fn points_in_range() {
        let g = GridUniverse::new(16, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let pts = random_points(g, 50, &mut rng);
        assert!(pts.iter().all(|p| g.contains(p)));
        let (_, back) = read_points(parse_stream(Cursor::new(points_to_text(g, &pts))).unwrap()).unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn metric_is_valid() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for m in [1, 2, 5, 32] {
            assert_eq!(random_metric(m, &mut rng).size(), m);
        }
    }
}
