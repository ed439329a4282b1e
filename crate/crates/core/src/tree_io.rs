//! Dendrogram text formats.
//!
//! JSON: nested `{"leaf": <index>}` / `{"left": <node>, "right": <node>}`.
//! Newick: `((0,1),2);` with leaf indices as labels and no branch lengths.
//!
//! Readers and writers keep an explicit stack so caterpillar trees with
//! hundreds of thousands of levels do not overflow the call stack.

use std::fmt::Write as _;

use crate::dendrogram::{Dendrogram, Node, NodeId, TreeBuilder};
use crate::error::{Error, Result};

enum Piece {
    Visit(NodeId),
    Text(&'static str),
}

pub fn to_newick(tree: &Dendrogram) -> String {
    newick_with(tree, |_, _| false)
}

/// Newick rendering; `swap(left, right)` decides whether to print the
/// children of a node in reverse.
pub(crate) fn newick_with(tree: &Dendrogram, swap: impl Fn(NodeId, NodeId) -> bool) -> String {
    let mut out = String::with_capacity(tree.n() * 4);
    let mut stack = vec![Piece::Text(";"), Piece::Visit(tree.root())];
    while let Some(piece) = stack.pop() {
        match piece {
            Piece::Text(s) => out.push_str(s),
            Piece::Visit(id) => match tree.node(id) {
                Node::Leaf(p) => {
                    let _ = write!(out, "{p}");
                }
                Node::Internal { left, right } => {
                    let (a, b) = if swap(left, right) {
                        (right, left)
                    } else {
                        (left, right)
                    };
                    out.push('(');
                    stack.push(Piece::Text(")"));
                    stack.push(Piece::Visit(b));
                    stack.push(Piece::Text(","));
                    stack.push(Piece::Visit(a));
                }
            },
        }
    }
    out
}

pub fn to_json(tree: &Dendrogram) -> String {
    let mut out = String::with_capacity(tree.n() * 24);
    let mut stack = vec![Piece::Visit(tree.root())];
    while let Some(piece) = stack.pop() {
        match piece {
            Piece::Text(s) => out.push_str(s),
            Piece::Visit(id) => match tree.node(id) {
                Node::Leaf(p) => {
                    let _ = write!(out, "{{\"leaf\":{p}}}");
                }
                Node::Internal { left, right } => {
                    out.push_str("{\"left\":");
                    stack.push(Piece::Text("}"));
                    stack.push(Piece::Visit(right));
                    stack.push(Piece::Text(",\"right\":"));
                    stack.push(Piece::Visit(left));
                }
            },
        }
    }
    out
}

/// Parses either format, chosen by the first non-blank character.
pub fn parse_tree(text: &str) -> Result<Dendrogram> {
    match text.trim_start().as_bytes().first() {
        Some(b'{') => from_json(text),
        Some(b'(') => from_newick(text),
        // A bare label is the one-leaf Newick tree.
        Some(c) if c.is_ascii_digit() => from_newick(text),
        _ => Err(Error::parse("byte 0", "expected a JSON object or a Newick tree")),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(format!("byte {}", self.pos), msg)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a non-negative integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }

    fn string(&mut self) -> Result<&'a str> {
        self.expect(b'"')?;
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos] != b'"' {
            self.pos += 1;
        }
        if self.pos == self.bytes.len() {
            return Err(self.err("unterminated string"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        self.pos += 1;
        Ok(s)
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.err("trailing characters"))
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Left,
    Right,
}

#[derive(Default)]
struct Object {
    leaf: Option<usize>,
    left: Option<NodeId>,
    right: Option<NodeId>,
    pending: Option<Slot>,
    members: usize,
}

pub fn from_json(text: &str) -> Result<Dendrogram> {
    let mut cur = Cursor::new(text);
    let mut builder = TreeBuilder::new();
    let mut stack: Vec<Object> = Vec::new();
    let mut root = None;

    cur.expect(b'{')?;
    stack.push(Object::default());
    while let Some(top) = stack.last_mut() {
        match cur.peek() {
            Some(b'}') => {
                cur.pos += 1;
                let obj = stack.pop().unwrap();
                let id = match (obj.leaf, obj.left, obj.right) {
                    (Some(p), None, None) => builder.leaf(p),
                    (None, Some(l), Some(r)) => builder.join(l, r),
                    _ => {
                        return Err(cur.err(
                            "node must have exactly \"leaf\" or both \"left\" and \"right\"",
                        ))
                    }
                };
                match stack.last_mut() {
                    Some(parent) => match parent.pending.take() {
                        Some(Slot::Left) => parent.left = Some(id),
                        Some(Slot::Right) => parent.right = Some(id),
                        None => unreachable!("child objects only open after a key"),
                    },
                    None => root = Some(id),
                }
            }
            Some(_) => {
                if top.members > 0 {
                    cur.expect(b',')?;
                }
                top.members += 1;
                let key = cur.string()?;
                cur.expect(b':')?;
                match key {
                    "leaf" if top.leaf.is_none() => top.leaf = Some(cur.integer()?),
                    "left" | "right" => {
                        let slot = if key == "left" { Slot::Left } else { Slot::Right };
                        let taken = match slot {
                            Slot::Left => top.left.is_some(),
                            Slot::Right => top.right.is_some(),
                        };
                        if taken {
                            return Err(cur.err(format!("duplicate key \"{key}\"")));
                        }
                        top.pending = Some(slot);
                        cur.expect(b'{')?;
                        stack.push(Object::default());
                    }
                    other => return Err(cur.err(format!("unexpected key \"{other}\""))),
                }
            }
            None => return Err(cur.err("unexpected end of input")),
        }
    }
    cur.finish()?;
    builder.build(root.expect("loop exits only after closing the root"))
}

pub fn from_newick(text: &str) -> Result<Dendrogram> {
    let mut cur = Cursor::new(text);
    let mut builder = TreeBuilder::new();
    // Children collected so far for every open parenthesis.
    let mut open: Vec<Vec<NodeId>> = Vec::new();
    let mut root = None;
    loop {
        let id = match cur.peek() {
            Some(b'(') => {
                cur.pos += 1;
                open.push(Vec::with_capacity(2));
                continue;
            }
            Some(c) if c.is_ascii_digit() => {
                let p = cur.integer()?;
                builder.leaf(p)
            }
            _ => return Err(cur.err("expected '(' or a leaf label")),
        };
        // Close as many groups as this subtree completes.
        let mut done = id;
        loop {
            let Some(group) = open.last_mut() else {
                root = Some(done);
                break;
            };
            group.push(done);
            match cur.peek() {
                Some(b',') if group.len() == 1 => {
                    cur.pos += 1;
                    break;
                }
                Some(b')') if group.len() == 2 => {
                    cur.pos += 1;
                    let g = open.pop().unwrap();
                    done = builder.join(g[0], g[1]);
                }
                Some(b':') => return Err(cur.err("branch lengths are not supported")),
                _ => return Err(cur.err("every internal node needs exactly two children")),
            }
        }
        if let Some(root) = root {
            cur.expect(b';')?;
            cur.finish()?;
            return builder.build(root);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dendrogram {
        from_newick("((0,(3,1)),(2,4));").unwrap()
    }

    #[test]
    fn newick_roundtrip() {
        let t = sample();
        assert_eq!(to_newick(&t), "((0,(3,1)),(2,4));");
        assert_eq!(from_newick(&to_newick(&t)).unwrap(), t);
        assert_eq!(t.canonical_newick(), "((0,(1,3)),(2,4));");
    }

    #[test]
    fn json_roundtrip() {
        let t = sample();
        let json = to_json(&t);
        assert!(json.starts_with("{\"left\":{\"left\":{\"leaf\":0}"));
        assert_eq!(from_json(&json).unwrap(), t);
        // Key order and whitespace are free.
        let loose = "{ \"right\" : {\"leaf\": 1}, \"left\": { \"leaf\" : 0 } }";
        assert_eq!(to_newick(&from_json(loose).unwrap()), "(0,1);");
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["right"]["left"]["leaf"], 2);
    }

    #[test]
    fn single_leaf() {
        assert_eq!(from_json("{\"leaf\":0}").unwrap().n(), 1);
        assert_eq!(parse_tree("0;").unwrap().n(), 1);
        assert_eq!(to_newick(&Dendrogram::singleton()), "0;");
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "(0,1)",
            "(0,1,2);",
            "((0,1);",
            "(0:1.5,1);",
            "(0,1);x",
            "(0);",
        ] {
            assert!(from_newick(bad).is_err(), "{bad}");
        }
        for bad in [
            "{\"leaf\":0,\"left\":{\"leaf\":1}}",
            "{\"left\":{\"leaf\":0}}",
            "{\"leaf\":-1}",
            "{\"left\":{\"leaf\":0},\"left\":{\"leaf\":1}}",
            "{\"foo\":1}",
            "{\"leaf\":0",
        ] {
            assert!(from_json(bad).is_err(), "{bad}");
        }
        assert!(parse_tree("[]").is_err());
    }

    #[test]
    fn deep_caterpillar_does_not_overflow() {
        let n = 200_000;
        let mut b = TreeBuilder::with_leaves(n);
        let mut acc = b.leaf(0);
        for p in 1..n {
            let l = b.leaf(p);
            acc = b.join(acc, l);
        }
        let t = b.build(acc).unwrap();
        assert_eq!(from_json(&to_json(&t)).unwrap(), t);
        assert_eq!(from_newick(&to_newick(&t)).unwrap(), t);
    }
}
