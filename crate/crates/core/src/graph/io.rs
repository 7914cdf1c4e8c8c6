//! Plain-text edge lists and incidences.
//!
//! Edge list: a header `n <n>` followed by one `u v` line per edge, 0-based,
//! `u < v`. Incidence: a header `n <n> m <m>` followed by one line per
//! attribute with its sorted members separated by spaces (empty lines for
//! empty attributes). Edges-only incidences append `edges_only` to the header
//! and list only the retained attributes.

use std::io::{BufRead, Write};

use super::{Graph, Incidence};
use crate::error::{Result, RigError};

fn parse_err(line: usize, msg: impl Into<String>) -> RigError {
    RigError::Parse { line, msg: msg.into() }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got {tok:?}")))
}

fn expect_key<'a>(toks: &mut impl Iterator<Item = &'a str>, key: &str, line: usize) -> Result<usize> {
    match toks.next() {
        Some(k) if k == key => {}
        other => return Err(parse_err(line, format!("expected {key:?}, got {other:?}"))),
    }
    let tok = toks
        .next()
        .ok_or_else(|| parse_err(line, format!("missing value for {key:?}")))?;
    parse_usize(tok, line)
}

pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "n {}", graph.n())?;
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let n = match lines.next() {
        Some((_, header)) => {
            let header = header?;
            let mut toks = header.split_whitespace();
            let n = expect_key(&mut toks, "n", 1)?;
            if toks.next().is_some() {
                return Err(parse_err(1, "trailing tokens in header"));
            }
            n
        }
        None => return Err(parse_err(1, "empty input")),
    };
    let mut pairs = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(parse_err(lineno, "expected exactly two vertex indices"));
        };
        let (u, v) = (parse_usize(a, lineno)?, parse_usize(b, lineno)?);
        if u == v {
            return Err(parse_err(lineno, format!("self-loop at vertex {u}")));
        }
        if u.max(v) >= n {
            return Err(parse_err(lineno, format!("vertex out of range for n = {n}")));
        }
        pairs.push((u.min(v), u.max(v)));
    }
    Ok(Graph::from_pairs(n, pairs))
}

pub fn write_incidence<W: Write>(incidence: &Incidence, mut out: W) -> Result<()> {
    if incidence.is_edges_only() {
        writeln!(out, "n {} m {} edges_only", incidence.n(), incidence.m())?;
    } else {
        writeln!(out, "n {} m {}", incidence.n(), incidence.m())?;
    }
    let mut buf = String::new();
    for list in incidence.iter() {
        buf.clear();
        for (k, v) in list.iter().enumerate() {
            if k > 0 {
                buf.push(' ');
            }
            buf.push_str(&v.to_string());
        }
        writeln!(out, "{buf}")?;
    }
    Ok(())
}

pub fn read_incidence<R: BufRead>(input: R) -> Result<Incidence> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))??;
    let mut toks = header.split_whitespace();
    let n = expect_key(&mut toks, "n", 1)?;
    let m = expect_key(&mut toks, "m", 1)?;
    let edges_only = match toks.next() {
        None => false,
        Some("edges_only") => true,
        Some(other) => return Err(parse_err(1, format!("unexpected header token {other:?}"))),
    };
    let mut lists = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        let list = line
            .split_whitespace()
            .map(|t| parse_usize(t, lineno))
            .collect::<Result<Vec<_>>>()?;
        lists.push(list);
    }
    if !edges_only {
        // A trailing run of empty attributes may lose its final newline.
        if lists.len() > m {
            return Err(parse_err(m + 2, format!("more than m = {m} attribute lines")));
        }
        lists.resize(m, Vec::new());
        Incidence::from_members(n, lists)
    } else {
        Incidence::edges_only_from_members(n, m, lists)
    }
    .map_err(|e| parse_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{project, sample_incidence, sample_incidence_sparse, RigParams};
    use proptest::prelude::*;

    #[test]
    fn edge_list_format_is_exact() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (0, 2)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n 4\n0 1\n0 2\n2 3\n");
    }

    #[test]
    fn incidence_format_is_exact() {
        let inc = Incidence::from_members(4, vec![vec![0, 1, 2], vec![], vec![2, 3]]).unwrap();
        let mut buf = Vec::new();
        write_incidence(&inc, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n 4 m 3\n0 1 2\n\n2 3\n");
        assert_eq!(read_incidence(&buf[..]).unwrap(), inc);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_edge_list("n 3\n0 0\n".as_bytes()).is_err());
        assert!(read_edge_list("n 3\n0 3\n".as_bytes()).is_err());
        assert!(read_edge_list("x 3\n".as_bytes()).is_err());
        assert!(read_edge_list("n 3\n0 1 2\n".as_bytes()).is_err());
        assert!(read_incidence("n 3 m 1\n2 1\n".as_bytes()).is_err());
        assert!(read_incidence("n 3 m 1\n0\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn edges_only_round_trip() {
        let params = RigParams::new(200, 5000, 0.01, 8).unwrap();
        let inc = sample_incidence_sparse(&params, true).unwrap();
        let mut buf = Vec::new();
        write_incidence(&inc, &mut buf).unwrap();
        assert_eq!(read_incidence(&buf[..]).unwrap(), inc);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn sampled_instances_round_trip(n in 1usize..40, m in 1usize..30, p in 0.0f64..0.5, seed: u64) {
            let inc = sample_incidence(&RigParams::new(n, m, p, seed).unwrap()).unwrap();
            let mut buf = Vec::new();
            write_incidence(&inc, &mut buf).unwrap();
            prop_assert_eq!(&read_incidence(&buf[..]).unwrap(), &inc);

            let g = project(&inc);
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf).unwrap();
            prop_assert_eq!(read_edge_list(&buf[..]).unwrap(), g);
        }
    }
}
