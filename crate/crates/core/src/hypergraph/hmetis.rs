//! hMETIS hypergraph text format.
//!
//! Header `E V [fmt]`, then one line per edge listing 1-indexed pins
//! (prefixed by the edge weight when `fmt` is 1 or 11), then one weight
//! line per vertex when `fmt` is 10 or 11. Lines starting with `%` are
//! comments.

use std::fmt::Write;

use super::{EdgeOrigin, Hyperedge, Hypergraph, Vertex, VertexKind};
use crate::circuit::Qubit;
use crate::error::{Error, Result};

pub fn export_hmetis(h: &Hypergraph) -> String {
    let edge_weights = h.edges().iter().any(|e| e.weight != 1);
    let vertex_weights = h.vertices().iter().any(|v| v.weight != 1);
    let mut out = String::new();
    match (edge_weights, vertex_weights) {
        (false, false) => writeln!(out, "{} {}", h.edge_count(), h.vertex_count()),
        (true, false) => writeln!(out, "{} {} 1", h.edge_count(), h.vertex_count()),
        (false, true) => writeln!(out, "{} {} 10", h.edge_count(), h.vertex_count()),
        (true, true) => writeln!(out, "{} {} 11", h.edge_count(), h.vertex_count()),
    }
    .unwrap();
    for e in h.edges() {
        let pins: Vec<String> = e.pins.iter().map(|p| (p + 1).to_string()).collect();
        if edge_weights {
            writeln!(out, "{} {}", e.weight, pins.join(" ")).unwrap();
        } else {
            writeln!(out, "{}", pins.join(" ")).unwrap();
        }
    }
    if vertex_weights {
        for v in h.vertices() {
            writeln!(out, "{}", v.weight).unwrap();
        }
    }
    out
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u64>().map_err(|_| Error::Hmetis {
                line: lineno,
                msg: format!("`{t}` is not a non-negative integer"),
            })
        })
        .collect()
}

/// Reads an hMETIS hypergraph.
///
/// Weight-0 vertices come back as grouping vertices anchored to the first
/// weighted pin of their first edge; each edge's home is its first weighted
/// pin. Files written by [`export_hmetis`] therefore re-import with the same
/// pins, weights, homes and anchors.
pub fn import_hmetis(text: &str) -> Result<Hypergraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let (hl, header) = lines.next().ok_or(Error::Hmetis {
        line: 1,
        msg: "missing header".into(),
    })?;
    let head = numbers(header, hl)?;
    let (ne, nv, fmt) = match head.as_slice() {
        [e, v] => (*e as usize, *v as usize, 0),
        [e, v, f] => (*e as usize, *v as usize, *f),
        _ => {
            return Err(Error::Hmetis {
                line: hl,
                msg: "header must be `E V [fmt]`".into(),
            })
        }
    };
    let (edge_weights, vertex_weights) = match fmt {
        0 => (false, false),
        1 => (true, false),
        10 => (false, true),
        11 => (true, true),
        f => {
            return Err(Error::Hmetis {
                line: hl,
                msg: format!("unsupported fmt {f}"),
            })
        }
    };

    let mut raw_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, line) = lines.next().ok_or(Error::Hmetis {
            line: hl,
            msg: format!("expected {ne} edge lines"),
        })?;
        let mut nums = numbers(line, ln)?;
        let weight = if edge_weights {
            if nums.is_empty() {
                return Err(Error::Hmetis {
                    line: ln,
                    msg: "empty edge line".into(),
                });
            }
            nums.remove(0)
        } else {
            1
        };
        let mut pins = Vec::with_capacity(nums.len());
        for p in nums {
            if p == 0 || p as usize > nv {
                return Err(Error::Hmetis {
                    line: ln,
                    msg: format!("pin {p} out of range 1..={nv}"),
                });
            }
            pins.push(p as usize - 1);
        }
        if pins.len() < 2 {
            return Err(Error::Hmetis {
                line: ln,
                msg: "edge needs at least two pins".into(),
            });
        }
        if weight == 0 {
            return Err(Error::Hmetis {
                line: ln,
                msg: "edge weight must be positive".into(),
            });
        }
        raw_edges.push((ln, weight, pins));
    }

    let mut weights = vec![1u64; nv];
    if vertex_weights {
        for w in weights.iter_mut() {
            let (ln, line) = lines.next().ok_or(Error::Hmetis {
                line: hl,
                msg: format!("expected {nv} vertex weight lines"),
            })?;
            match numbers(line, ln)?.as_slice() {
                [x] => *w = *x,
                _ => {
                    return Err(Error::Hmetis {
                        line: ln,
                        msg: "vertex weight line must hold one number".into(),
                    })
                }
            }
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Hmetis {
            line: ln,
            msg: "trailing content".into(),
        });
    }

    let mut edges = Vec::with_capacity(ne);
    for (id, (ln, weight, pins)) in raw_edges.into_iter().enumerate() {
        if let Some(dup) = pins.iter().enumerate().find(|(j, p)| pins[..*j].contains(p)) {
            return Err(Error::Hmetis {
                line: ln,
                msg: format!("pin {} repeated", dup.1 + 1),
            });
        }
        let home = pins.iter().copied().find(|&p| weights[p] > 0).unwrap_or(pins[0]);
        edges.push(Hyperedge {
            id,
            pins,
            weight,
            origin: EdgeOrigin::External,
            home,
        });
    }

    let mut groups = 0;
    let vertices = (0..nv)
        .map(|i| {
            let kind = if weights[i] == 0 {
                let anchor = edges
                    .iter()
                    .find(|e| e.pins.contains(&i))
                    .and_then(|e| e.pins.iter().copied().find(|&p| weights[p] > 0));
                groups += 1;
                VertexKind::Grouping {
                    group: groups - 1,
                    anchor,
                }
            } else {
                VertexKind::Qubit(Qubit(i))
            };
            Vertex {
                id: i,
                kind,
                weight: weights[i],
            }
        })
        .collect();
    Hypergraph::from_parts(vertices, edges)
}
