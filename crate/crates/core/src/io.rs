//! Text formats for graphs.
//!
//! Edge-list grammar (UTF-8, one record per line, tokens separated by
//! whitespace, ids are 0-based):
//!
//! ```text
//! # comment                 ignored, as are blank lines
//! n <count>                 optional; declares vertices 0..count
//! <u> <v>                   edge {u, v} with weight 1
//! <u> <v> <c>               edge {u, v} with weight c
//! w <u> <c>                 vertex u has weight c (default 1)
//! ```
//!
//! Without an `n` line the vertex count is one more than the largest id seen.
//!
//! DIMACS (`c` comments, 1-based ids):
//!
//! ```text
//! p edge <n> <m>
//! e <u> <v> [c]
//! n <u> <c>                 vertex weight
//! ```

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{Graph, GraphBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    EdgeList,
    Dimacs,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edge-list" => Ok(Format::EdgeList),
            "dimacs" => Ok(Format::Dimacs),
            other => Err(format!("unknown format {other:?} (edge-list | dimacs)")),
        }
    }
}

enum Record {
    Edge(usize, usize, u64),
    Weight(usize, u64),
}

fn parse_uint(tok: &str, line: usize) -> Result<u64, GraphError> {
    match tok.parse::<i128>() {
        Ok(v) if v < 0 => Err(GraphError::NegativeWeight { line, value: tok.to_string() }),
        Ok(v) => u64::try_from(v).map_err(|_| GraphError::Parse {
            line,
            msg: format!("value {tok} out of range"),
        }),
        Err(_) => Err(GraphError::Parse {
            line,
            msg: format!("expected an integer, found {tok:?}"),
        }),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<usize, GraphError> {
    match tok.parse::<i128>() {
        Ok(v) if v >= 0 && v <= usize::MAX as i128 => Ok(v as usize),
        _ => Err(GraphError::Parse {
            line,
            msg: format!("expected a vertex id, found {tok:?}"),
        }),
    }
}

pub fn load_graph<R: BufRead>(reader: R, format: Format) -> Result<Graph, GraphError> {
    let mut declared: Option<usize> = None;
    let mut records = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let bad = |msg: &str| GraphError::Parse { line: lineno, msg: msg.to_string() };
        let (rec, base) = match format {
            Format::EdgeList => {
                if toks[0].starts_with('#') {
                    continue;
                }
                match toks[0] {
                    "n" => {
                        if toks.len() != 2 {
                            return Err(bad("expected `n <count>`"));
                        }
                        declared = Some(parse_id(toks[1], lineno)?);
                        continue;
                    }
                    "w" => {
                        if toks.len() != 3 {
                            return Err(bad("expected `w <vertex> <weight>`"));
                        }
                        (Record::Weight(parse_id(toks[1], lineno)?, parse_uint(toks[2], lineno)?), 0)
                    }
                    _ => {
                        if toks.len() != 2 && toks.len() != 3 {
                            return Err(bad("expected `<u> <v> [weight]`"));
                        }
                        let w = if toks.len() == 3 { parse_uint(toks[2], lineno)? } else { 1 };
                        (Record::Edge(parse_id(toks[0], lineno)?, parse_id(toks[1], lineno)?, w), 0)
                    }
                }
            }
            Format::Dimacs => match toks[0] {
                "c" => continue,
                "p" => {
                    if toks.len() < 3 {
                        return Err(bad("expected `p edge <n> <m>`"));
                    }
                    declared = Some(parse_id(toks[2], lineno)?);
                    continue;
                }
                "e" => {
                    if toks.len() != 3 && toks.len() != 4 {
                        return Err(bad("expected `e <u> <v> [weight]`"));
                    }
                    let w = if toks.len() == 4 { parse_uint(toks[3], lineno)? } else { 1 };
                    (Record::Edge(parse_id(toks[1], lineno)?, parse_id(toks[2], lineno)?, w), 1)
                }
                "n" => {
                    if toks.len() != 3 {
                        return Err(bad("expected `n <vertex> <weight>`"));
                    }
                    (Record::Weight(parse_id(toks[1], lineno)?, parse_uint(toks[2], lineno)?), 1)
                }
                _ => return Err(bad("unknown DIMACS record")),
            },
        };
        let rec = match rec {
            Record::Edge(u, v, w) => {
                if u < base || v < base {
                    return Err(bad("DIMACS ids are 1-based"));
                }
                let (u, v) = (u - base, v - base);
                if u == v {
                    return Err(GraphError::SelfLoop { line: lineno, vertex: u });
                }
                max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
                Record::Edge(u, v, w)
            }
            Record::Weight(u, w) => {
                if u < base {
                    return Err(bad("DIMACS ids are 1-based"));
                }
                max_id = Some(max_id.map_or(u - base, |m| m.max(u - base)));
                Record::Weight(u - base, w)
            }
        };
        records.push((lineno, rec));
    }
    let n = match (declared, max_id) {
        (Some(d), Some(m)) if m >= d => {
            return Err(GraphError::VertexOutOfRange { vertex: m, n: d });
        }
        (Some(d), _) => d,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    let mut b = GraphBuilder::new(n);
    for (_, rec) in records {
        match rec {
            Record::Edge(u, v, w) => b.add_weighted_edge(u, v, w)?,
            Record::Weight(u, w) => b.set_vertex_weight(u, w)?,
        }
    }
    b.build()
}

pub fn write_graph<W: Write>(g: &Graph, format: Format, mut out: W) -> std::io::Result<()> {
    match format {
        Format::EdgeList => {
            writeln!(out, "n {}", g.n())?;
            for v in 0..g.n() {
                if g.vertex_weight(v) != 1 {
                    writeln!(out, "w {} {}", v, g.vertex_weight(v))?;
                }
            }
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                match g.edge_weight(e) {
                    1 => writeln!(out, "{u} {v}")?,
                    w => writeln!(out, "{u} {v} {w}")?,
                }
            }
        }
        Format::Dimacs => {
            writeln!(out, "p edge {} {}", g.n(), g.m())?;
            for v in 0..g.n() {
                if g.vertex_weight(v) != 1 {
                    writeln!(out, "n {} {}", v + 1, g.vertex_weight(v))?;
                }
            }
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                match g.edge_weight(e) {
                    1 => writeln!(out, "e {} {}", u + 1, v + 1)?,
                    w => writeln!(out, "e {} {} {}", u + 1, v + 1, w)?,
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str, f: Format) -> Result<Graph, GraphError> {
        load_graph(s.as_bytes(), f)
    }

    #[test]
    fn smallest_graph() {
        let g = load("0 1\n", Format::EdgeList).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
    }

    #[test]
    fn self_loop_is_rejected_with_line() {
        let err = load("# c\n0 1\n0 0\n", Format::EdgeList).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { line: 3, vertex: 0 });
    }

    #[test]
    fn grid_edge_list() {
        let mut s = String::new();
        for r in 0..3 {
            for c in 0..3 {
                let v = r * 3 + c;
                if c < 2 {
                    s += &format!("{} {}\n", v, v + 1);
                }
                if r < 2 {
                    s += &format!("{} {}\n", v, v + 3);
                }
            }
        }
        let g = load(&s, Format::EdgeList).unwrap();
        assert_eq!((g.n(), g.m()), (9, 12));
    }

    #[test]
    fn weights_and_errors() {
        let g = load("n 4\nw 2 7\n0 1\n1 2 5\n", Format::EdgeList).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.vertex_weight(2), 7);
        assert_eq!(g.vertex_weight(3), 1);
        assert_eq!(g.edge_weight(g.edge_id(1, 2).unwrap()), 5);
        assert!(matches!(load("w 0 -3\n", Format::EdgeList), Err(GraphError::NegativeWeight { line: 1, .. })));
        assert!(matches!(load("0 x\n", Format::EdgeList), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(load("n 2\n0 5\n", Format::EdgeList), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn dimacs_roundtrip() {
        let g = load("c hi\np edge 3 2\ne 1 2\ne 2 3\nn 3 4\n", Format::Dimacs).unwrap();
        assert_eq!((g.n(), g.m(), g.vertex_weight(2)), (3, 2, 4));
        for f in [Format::EdgeList, Format::Dimacs] {
            let mut buf = Vec::new();
            write_graph(&g, f, &mut buf).unwrap();
            assert_eq!(load_graph(buf.as_slice(), f).unwrap(), g);
        }
    }
}
