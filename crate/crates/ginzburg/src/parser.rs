//! Line-based quiver files:
//!
//! ```text
//! # A2
//! vertex 1
//! vertex 2
//! arrow a: 2 -> 1 weight 0 degree 0
//! ```

use ginzburg_core::quiver::{Bidegree, Quiver};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown vertex `{id}`")]
    UnknownVertex { line: usize, id: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

pub fn parse_quiver(text: &str) -> Result<Quiver, ParseError> {
    let mut q = Quiver::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        match words.next() {
            Some("vertex") => {
                let id = words.next().ok_or_else(|| syntax(line, "expected `vertex <id>`"))?;
                if words.next().is_some() {
                    return Err(syntax(line, "trailing tokens after vertex id"));
                }
                q.add_vertex(id).map_err(|_| ParseError::DuplicateId { line, id: id.into() })?;
            }
            Some("arrow") => parse_arrow(&mut q, line, body["arrow".len()..].trim())?,
            Some(other) => return Err(syntax(line, format!("unknown keyword `{other}`"))),
            None => unreachable!(),
        }
    }
    Ok(q)
}

fn parse_arrow(q: &mut Quiver, line: usize, rest: &str) -> Result<(), ParseError> {
    let usage = "expected `arrow <id>: <src> -> <tgt> [weight <w>] [degree <d>]`";
    let (id, rest) = rest.split_once(':').ok_or_else(|| syntax(line, usage))?;
    let id = id.trim();
    if id.is_empty() || id.contains(char::is_whitespace) {
        return Err(syntax(line, usage));
    }
    let words: Vec<&str> = rest.split_whitespace().collect();
    if words.len() < 3 || words[1] != "->" {
        return Err(syntax(line, usage));
    }
    let vertex = |v: &str| q.vertex_index(v).ok_or_else(|| ParseError::UnknownVertex { line, id: v.into() });
    let (src, tgt) = (vertex(words[0])?, vertex(words[2])?);
    let mut bidegree = Bidegree::ZERO;
    let mut opts = words[3..].chunks(2);
    for pair in &mut opts {
        let [key, value] = pair else { return Err(syntax(line, usage)) };
        match *key {
            "weight" => bidegree.weight = value.parse().map_err(|_| syntax(line, format!("bad weight `{value}`")))?,
            "degree" => bidegree.degree = value.parse().map_err(|_| syntax(line, format!("bad degree `{value}`")))?,
            _ => return Err(syntax(line, format!("unknown attribute `{key}`"))),
        }
    }
    if q.arrow_index(id).is_some() || q.vertex_index(id).is_some() {
        return Err(ParseError::DuplicateId { line, id: id.into() });
    }
    q.add_arrow(id, src, tgt, bidegree).map_err(|_| ParseError::DuplicateId { line, id: id.into() })?;
    Ok(())
}
