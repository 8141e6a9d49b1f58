//! Edge-list text ingestion, vertex-type sidecars, and the binary CSR cache.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{CsrGraph, Edge, GraphError, VertexId};

pub const CACHE_MAGIC: [u8; 8] = *b"GRWCSR\0\0";
pub const CACHE_VERSION: u32 = 1;
const FLAG_WEIGHTS: u32 = 1;
const FLAG_TYPES: u32 = 2;

/// Parsed edge list; `num_vertices` is one past the largest id seen.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    pub num_vertices: usize,
}

/// Parses whitespace-separated `src dst [weight]` lines. `#` starts a comment.
///
/// Either every edge carries a weight or none does.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<EdgeList, GraphError> {
    let mut edges = Vec::new();
    let mut max_id: Option<u64> = None;
    let mut weighted: Option<bool> = None;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| GraphError::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `src dst [weight]`, got {:?}", body)));
        }
        let parse_id = |s: &str| -> Result<VertexId, GraphError> {
            s.parse::<VertexId>()
                .map_err(|_| err(format!("invalid vertex id {s:?}")))
        };
        let src = parse_id(fields[0])?;
        let dst = parse_id(fields[1])?;
        let weight = match fields.get(2) {
            Some(w) => {
                let w: f64 = w
                    .parse()
                    .map_err(|_| err(format!("invalid weight {w:?}")))?;
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(err(format!("weight must be finite and nonnegative, got {w}")));
                }
                Some(w)
            }
            None => None,
        };
        match weighted {
            None => weighted = Some(weight.is_some()),
            Some(expected) if expected != weight.is_some() => {
                return Err(err("mixed weighted and unweighted lines".to_string()))
            }
            _ => {}
        }
        max_id = Some(max_id.unwrap_or(0).max(src as u64).max(dst as u64));
        edges.push(Edge { src, dst, weight });
    }
    Ok(EdgeList {
        edges,
        num_vertices: max_id.map_or(0, |m| m as usize + 1),
    })
}

pub fn read_edge_list_file(path: &Path) -> Result<EdgeList, GraphError> {
    load_edge_list(BufReader::new(File::open(path)?))
}

pub fn write_edge_list<W: Write>(mut out: W, edges: &[Edge]) -> Result<(), GraphError> {
    for e in edges {
        match e.weight {
            Some(w) => writeln!(out, "{} {} {}", e.src, e.dst, w)?,
            None => writeln!(out, "{} {}", e.src, e.dst)?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a `.types` sidecar: one integer label per line, in vertex order.
pub fn load_types<R: BufRead>(source: R) -> Result<Vec<u32>, GraphError> {
    let mut types = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        types.push(body.parse::<u32>().map_err(|_| GraphError::Parse {
            line: idx + 1,
            message: format!("invalid vertex type {body:?}"),
        })?);
    }
    Ok(types)
}

pub fn write_csr_cache<W: Write>(out: W, g: &CsrGraph) -> Result<(), GraphError> {
    let mut out = BufWriter::new(out);
    let mut flags = 0;
    if g.is_weighted() {
        flags |= FLAG_WEIGHTS;
    }
    if g.vertex_types().is_some() {
        flags |= FLAG_TYPES;
    }
    out.write_all(&CACHE_MAGIC)?;
    out.write_all(&CACHE_VERSION.to_le_bytes())?;
    out.write_all(&flags.to_le_bytes())?;
    out.write_all(&(g.num_vertices() as u64).to_le_bytes())?;
    out.write_all(&(g.num_edges() as u64).to_le_bytes())?;
    for &r in g.row_ptr() {
        out.write_all(&r.to_le_bytes())?;
    }
    for &c in g.col_list() {
        out.write_all(&c.to_le_bytes())?;
    }
    if let Some(w) = g.weights() {
        for &x in w {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    if let Some(t) = g.vertex_types() {
        for &x in t {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_array<R: Read, const K: usize>(src: &mut R, count: usize) -> Result<Vec<[u8; K]>, GraphError> {
    let mut buf = vec![0u8; count * K];
    src.read_exact(&mut buf)
        .map_err(|e| GraphError::BadCache(format!("truncated payload: {e}")))?;
    Ok(buf
        .chunks_exact(K)
        .map(|c| c.try_into().expect("chunk size"))
        .collect())
}

pub fn read_csr_cache<R: Read>(src: R) -> Result<CsrGraph, GraphError> {
    let mut src = BufReader::new(src);
    let mut header = [0u8; 32];
    src.read_exact(&mut header)
        .map_err(|_| GraphError::BadCache("truncated header".into()))?;
    if header[..8] != CACHE_MAGIC {
        return Err(GraphError::BadCache("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != CACHE_VERSION {
        return Err(GraphError::BadCache(format!("unsupported version {version}")));
    }
    let flags = u32::from_le_bytes(header[12..16].try_into().unwrap());
    let n = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    let m = u64::from_le_bytes(header[24..32].try_into().unwrap()) as usize;
    let row_ptr = read_array::<_, 8>(&mut src, n + 1)?
        .into_iter()
        .map(u64::from_le_bytes)
        .collect();
    let col_list = read_array::<_, 4>(&mut src, m)?
        .into_iter()
        .map(u32::from_le_bytes)
        .collect();
    let weights = if flags & FLAG_WEIGHTS != 0 {
        Some(
            read_array::<_, 8>(&mut src, m)?
                .into_iter()
                .map(f64::from_le_bytes)
                .collect(),
        )
    } else {
        None
    };
    let types = if flags & FLAG_TYPES != 0 {
        Some(
            read_array::<_, 4>(&mut src, n)?
                .into_iter()
                .map(u32::from_le_bytes)
                .collect(),
        )
    } else {
        None
    };
    CsrGraph::from_parts(row_ptr, col_list, weights, types)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, fixtures};

    #[test]
    fn two_lines() {
        let el = load_edge_list("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(el.edges, vec![Edge::new(0, 1), Edge::new(1, 2)]);
        assert_eq!(el.num_vertices, 3);
    }

    #[test]
    fn comment_and_weight() {
        let el = load_edge_list("# c\n0 1 2.5\n".as_bytes()).unwrap();
        assert_eq!(el.edges, vec![Edge::weighted(0, 1, 2.5)]);
    }

    #[test]
    fn max_id_rule() {
        let el = load_edge_list("2 0\n".as_bytes()).unwrap();
        assert_eq!(el.num_vertices, 3);
    }

    #[test]
    fn empty_input() {
        let el = load_edge_list("".as_bytes()).unwrap();
        assert!(el.edges.is_empty());
        assert_eq!(el.num_vertices, 0);
    }

    #[test]
    fn malformed_line_number() {
        let text = "0 1\n1 2\n# x\n\n2 3\n3 4\n4 x\n";
        match load_edge_list(text.as_bytes()) {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_edge_list("0 1 2\n1 2\n".as_bytes()).is_err());
        assert!(load_edge_list("0\n".as_bytes()).is_err());
        assert!(load_edge_list("0 -1\n".as_bytes()).is_err());
    }

    #[test]
    fn types_sidecar() {
        assert_eq!(load_types("1\n0\n# skip\n2\n".as_bytes()).unwrap(), vec![1, 0, 2]);
        assert!(load_types("a\n".as_bytes()).is_err());
    }

    #[test]
    fn cache_round_trip() {
        for g in [fixtures::figure_graph(), fixtures::gadget(), build_csr(&[], 2).unwrap()] {
            let mut buf = Vec::new();
            write_csr_cache(&mut buf, &g).unwrap();
            assert_eq!(&buf[..8], &CACHE_MAGIC);
            assert_eq!(read_csr_cache(buf.as_slice()).unwrap(), g);
        }
    }

    #[test]
    fn cache_rejects_garbage() {
        assert!(read_csr_cache(&b"nonsense"[..]).is_err());
        let mut buf = Vec::new();
        write_csr_cache(&mut buf, &fixtures::figure_graph()).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_csr_cache(buf.as_slice()).is_err());
    }
}
