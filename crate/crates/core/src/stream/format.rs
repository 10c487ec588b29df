//! Text stream formats.
//!
//! ```text
//! u=<int>                      # plain universe; body lines: <index> <+1|-1>
//! grid m=<int> d=<int>         # body lines: <x_1> ... <x_d>, one insertion each
//! metric file=<path>           # body lines: <index> [<+1|-1>]
//! ```
//!
//! Metric files hold `m=<int>` followed by `m` rows of `m` integer distances.
//! `#` starts a comment anywhere on a line.

use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::{Path, PathBuf};

use super::{GridUniverse, MetricSpace, Point, StreamUpdate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamHeader {
    Universe { u: u64 },
    Grid(GridUniverse),
    Metric { path: PathBuf },
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_kv<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| Error::Parse { line, msg: format!("expected `{key}=...`, found `{tok}`") })
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad number `{s}`") })
}

fn parse_header(text: &str, line: usize) -> Result<StreamHeader> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    match toks.as_slice() {
        [t] if t.starts_with("u=") => {
            let u: u64 = parse_num(parse_kv(t, "u", line)?, line)?;
            if u == 0 {
                return Err(Error::Parse { line, msg: "universe size must be positive".into() });
            }
            Ok(StreamHeader::Universe { u })
        }
        ["grid", m, d] => {
            let m = parse_num(parse_kv(m, "m", line)?, line)?;
            let d = parse_num(parse_kv(d, "d", line)?, line)?;
            Ok(StreamHeader::Grid(
                GridUniverse::new(m, d).map_err(|e| Error::Parse { line, msg: e.to_string() })?,
            ))
        }
        ["metric", f] => Ok(StreamHeader::Metric { path: PathBuf::from(parse_kv(f, "file", line)?) }),
        _ => Err(Error::Parse { line, msg: format!("unrecognized header `{text}`") }),
    }
}

/// Single-pass reader over a stream file. Yields updates in file order.
pub struct StreamReader<R> {
    lines: Lines<R>,
    line_no: usize,
    header: StreamHeader,
    universe: Option<u64>,
}

impl<R: BufRead> StreamReader<R> {
    pub fn new(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let mut line_no = 0;
        let header = loop {
            line_no += 1;
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    let text = strip(&line);
                    if !text.is_empty() {
                        break parse_header(text, line_no)?;
                    }
                }
                None => return Err(Error::Parse { line: line_no, msg: "missing header".into() }),
            }
        };
        let universe = match &header {
            StreamHeader::Universe { u } => Some(*u),
            StreamHeader::Grid(g) => Some(g.size()),
            StreamHeader::Metric { .. } => None,
        };
        Ok(StreamReader { lines, line_no, header, universe })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    /// Universe size, once known. Metric streams learn it from their metric file.
    pub fn universe_size(&self) -> Option<u64> {
        self.universe
    }

    pub fn bind_metric(&mut self, metric: &MetricSpace) {
        self.universe = Some(metric.size() as u64);
    }

    fn parse_body(&self, text: &str) -> Result<StreamUpdate> {
        let line = self.line_no;
        let toks: Vec<&str> = text.split_whitespace().collect();
        let u = self
            .universe
            .ok_or_else(|| Error::Parse { line, msg: "metric universe not bound".into() })?;
        let upd = match &self.header {
            StreamHeader::Grid(g) => {
                if toks.len() != g.d() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected {} coordinates, found {}", g.d(), toks.len()),
                    });
                }
                let p: Point = toks.iter().map(|t| parse_num(t, line)).collect::<Result<_>>()?;
                let index = g.encode(&p).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
                StreamUpdate::insert(index)
            }
            StreamHeader::Universe { .. } | StreamHeader::Metric { .. } => match toks.as_slice() {
                [i, d] => StreamUpdate::new(parse_num(i, line)?, parse_delta(d, line)?),
                [i] if matches!(self.header, StreamHeader::Metric { .. }) => {
                    StreamUpdate::insert(parse_num(i, line)?)
                }
                _ => return Err(Error::Parse { line, msg: format!("malformed update `{text}`") }),
            },
        };
        if upd.index >= u {
            return Err(Error::Parse {
                line,
                msg: format!("index {} outside universe of size {u}", upd.index),
            });
        }
        Ok(upd)
    }
}

fn parse_delta(tok: &str, line: usize) -> Result<i64> {
    let body = tok.strip_prefix('+').unwrap_or(tok);
    parse_num(body, line)
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<StreamUpdate>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line_no += 1;
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            let text = strip(&line);
            if text.is_empty() {
                continue;
            }
            return Some(self.parse_body(text));
        }
    }
}

pub fn parse_stream<R: BufRead>(reader: R) -> Result<StreamReader<R>> {
    StreamReader::new(reader)
}

/// Opens a stream file. For metric streams the metric file is loaded
/// (relative paths resolve against the stream file's directory) and bound.
pub fn open_stream(path: &Path) -> Result<(StreamReader<BufReader<File>>, Option<MetricSpace>)> {
    let mut reader = StreamReader::new(BufReader::new(File::open(path)?))?;
    let metric = match reader.header().clone() {
        StreamHeader::Metric { path: mpath } => {
            let full = if mpath.is_absolute() {
                mpath
            } else {
                path.parent().unwrap_or(Path::new(".")).join(mpath)
            };
            let metric = parse_metric(BufReader::new(File::open(&full)?))?;
            reader.bind_metric(&metric);
            Some(metric)
        }
        _ => None,
    };
    Ok((reader, metric))
}

/// Reads all points of a grid stream, in order.
pub fn read_points<R: BufRead>(reader: StreamReader<R>) -> Result<(GridUniverse, Vec<Point>)> {
    let grid = match reader.header() {
        StreamHeader::Grid(g) => *g,
        other => return Err(Error::InvalidParam(format!("expected a grid stream, found {other:?}"))),
    };
    let mut points = Vec::new();
    for upd in reader {
        points.push(grid.decode(upd?.index));
    }
    Ok((grid, points))
}

pub fn parse_metric<R: BufRead>(reader: R) -> Result<MetricSpace> {
    let mut m: Option<usize> = None;
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = strip(&line);
        if text.is_empty() {
            continue;
        }
        match m {
            None => m = Some(parse_num(parse_kv(text, "m", line_no)?, line_no)?),
            Some(size) => {
                let row: Vec<u64> = text
                    .split_whitespace()
                    .map(|t| parse_num(t, line_no))
                    .collect::<Result<_>>()?;
                if row.len() != size {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected {size} distances, found {}", row.len()),
                    });
                }
                rows.push(row);
            }
        }
    }
    let m = m.ok_or_else(|| Error::Parse { line: 1, msg: "missing `m=` header".into() })?;
    if rows.len() != m {
        return Err(Error::Parse { line: rows.len() + 1, msg: format!("expected {m} rows") });
    }
    MetricSpace::new(rows)
}
