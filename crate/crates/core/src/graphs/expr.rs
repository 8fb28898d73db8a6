//! Generator expressions such as `join(K 2, Kbar 3)` or `dstar 2 1`.

use std::fmt;
use std::str::FromStr;

use super::SmallGraph;
use crate::error::{Error, Result};

/// Default cap on the order of a built graph.
pub const DEFAULT_ORDER_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GraphExpr {
    Complete(usize),
    Empty(usize),
    Cycle(usize),
    Path(usize),
    Bipartite(usize, usize),
    /// `K_r ∨ K̄_t`
    Split(usize, usize),
    /// Double star `S_{b1,b2}`: adjacent centers with `b1` and `b2` leaves.
    DoubleStar(usize, usize),
    /// `t` triangles sharing one vertex.
    Friendship(usize),
    Join(Box<GraphExpr>, Box<GraphExpr>),
    Union(Box<GraphExpr>, Box<GraphExpr>),
    Complement(Box<GraphExpr>),
}

impl GraphExpr {
    pub fn join(a: GraphExpr, b: GraphExpr) -> GraphExpr {
        GraphExpr::Join(Box::new(a), Box::new(b))
    }

    /// Vertex count, or `None` on arithmetic overflow.
    pub fn order(&self) -> Option<usize> {
        use GraphExpr::*;
        match self {
            Complete(n) | Empty(n) | Cycle(n) | Path(n) => Some(*n),
            Bipartite(a, b) | Split(a, b) => a.checked_add(*b),
            DoubleStar(a, b) => a.checked_add(*b)?.checked_add(2),
            Friendship(t) => t.checked_mul(2)?.checked_add(1),
            Join(a, b) | Union(a, b) => a.order()?.checked_add(b.order()?),
            Complement(e) => e.order(),
        }
    }

    /// Builds the graph. Operands of `join` and `union` are numbered left
    /// first; see the README for the numbering of each generator.
    pub fn build(&self, cap: usize) -> Result<SmallGraph> {
        let cap = cap.min(super::MAX_ORDER);
        match self.order() {
            Some(k) if k <= cap => {}
            Some(k) => {
                return Err(Error::CapExceeded {
                    what: "graph order",
                    value: k,
                    cap,
                })
            }
            None => return Err(Error::range("graph order", "arithmetic overflow")),
        }
        self.build_unchecked()
    }

    fn build_unchecked(&self) -> Result<SmallGraph> {
        use GraphExpr::*;
        let k = self.order().unwrap();
        let mut g = SmallGraph::empty(k)?;
        match self {
            Complete(_) => return SmallGraph::complete(k),
            Empty(_) => {}
            Cycle(n) => {
                for u in 0..*n {
                    g.add_edge(u, (u + 1) % n);
                }
            }
            Path(n) => {
                for u in 1..*n {
                    g.add_edge(u - 1, u);
                }
            }
            Bipartite(a, b) => {
                for u in 0..*a {
                    for v in *a..a + b {
                        g.add_edge(u, v);
                    }
                }
            }
            Split(r, t) => {
                for u in 0..*r {
                    for v in u + 1..r + t {
                        g.add_edge(u, v);
                    }
                }
            }
            DoubleStar(b1, b2) => {
                g.add_edge(0, 1);
                for leaf in 2..2 + b1 {
                    g.add_edge(0, leaf);
                }
                for leaf in 2 + b1..2 + b1 + b2 {
                    g.add_edge(1, leaf);
                }
            }
            Friendship(t) => {
                for j in 0..*t {
                    let (a, b) = (2 * j + 1, 2 * j + 2);
                    g.add_edge(0, a);
                    g.add_edge(0, b);
                    g.add_edge(a, b);
                }
            }
            Join(a, b) => return a.build_unchecked()?.join(&b.build_unchecked()?),
            Union(a, b) => return a.build_unchecked()?.disjoint_union(&b.build_unchecked()?),
            Complement(e) => return Ok(e.build_unchecked()?.complement()),
        }
        Ok(g)
    }
}

impl fmt::Display for GraphExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GraphExpr::*;
        match self {
            Complete(n) => write!(f, "K {n}"),
            Empty(n) => write!(f, "Kbar {n}"),
            Cycle(n) => write!(f, "C {n}"),
            Path(n) => write!(f, "P {n}"),
            Bipartite(a, b) => write!(f, "Kbip {a} {b}"),
            Split(a, b) => write!(f, "split {a} {b}"),
            DoubleStar(a, b) => write!(f, "dstar {a} {b}"),
            Friendship(t) => write!(f, "friendship {t}"),
            Join(a, b) => write!(f, "join({a}, {b})"),
            Union(a, b) => write!(f, "union({a}, {b})"),
            Complement(e) => write!(f, "complement({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(usize),
    Open,
    Close,
    Comma,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            b'(' => {
                i += 1;
                Tok::Open
            }
            b')' => {
                i += 1;
                Tok::Close
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = s[start..i]
                    .parse()
                    .map_err(|_| Error::parse(start, "integer overflow"))?;
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(s[start..i].to_string())
            }
            _ => {
                let ch = s[start..].chars().next().unwrap();
                return Err(Error::parse(start, format!("unexpected character {ch:?}")));
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, s.len()));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.at]
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(())
        } else {
            Err(Error::parse(pos, format!("expected {what}")))
        }
    }

    fn int(&mut self, name: &str, arity: usize) -> Result<(usize, usize)> {
        match self.next() {
            (Tok::Int(n), pos) => Ok((n, pos)),
            (_, pos) => Err(Error::parse(
                pos,
                format!(
                    "`{name}` takes {arity} integer argument{}",
                    if arity == 1 { "" } else { "s" }
                ),
            )),
        }
    }

    fn expr(&mut self) -> Result<GraphExpr> {
        let (tok, pos) = self.next();
        let name = match tok {
            Tok::Ident(name) => name,
            Tok::Open => {
                let e = self.expr()?;
                self.expect(Tok::Close, "`)`")?;
                return Ok(e);
            }
            _ => return Err(Error::parse(pos, "expected a graph expression")),
        };
        let at_least = |n: usize, min: usize, npos: usize| -> Result<usize> {
            if n < min {
                Err(Error::parse(
                    npos,
                    format!("`{name}` needs an argument of at least {min}"),
                ))
            } else {
                Ok(n)
            }
        };
        use GraphExpr::*;
        let e = match name.as_str() {
            "K" => {
                let (n, p) = self.int(&name, 1)?;
                Complete(at_least(n, 1, p)?)
            }
            "Kbar" => Empty(self.int(&name, 1)?.0),
            "C" => {
                let (n, p) = self.int(&name, 1)?;
                Cycle(at_least(n, 3, p)?)
            }
            "P" => {
                let (n, p) = self.int(&name, 1)?;
                Path(at_least(n, 1, p)?)
            }
            "Kbip" => Bipartite(self.int(&name, 2)?.0, self.int(&name, 2)?.0),
            "split" => Split(self.int(&name, 2)?.0, self.int(&name, 2)?.0),
            "dstar" => DoubleStar(self.int(&name, 2)?.0, self.int(&name, 2)?.0),
            "friendship" => Friendship(self.int(&name, 1)?.0),
            "join" | "union" => {
                self.expect(Tok::Open, &format!("`(` after `{name}`"))?;
                let a = self.expr()?;
                self.expect(Tok::Comma, &format!("`,`: `{name}` takes two operands"))?;
                let b = self.expr()?;
                self.expect(Tok::Close, &format!("`)`: `{name}` takes two operands"))?;
                if name == "join" {
                    Join(Box::new(a), Box::new(b))
                } else {
                    Union(Box::new(a), Box::new(b))
                }
            }
            "complement" => {
                self.expect(Tok::Open, "`(` after `complement`")?;
                let a = self.expr()?;
                self.expect(Tok::Close, "`)`: `complement` takes one operand")?;
                Complement(Box::new(a))
            }
            _ => return Err(Error::parse(pos, format!("unknown generator `{name}`"))),
        };
        if e.order().is_none() {
            return Err(Error::parse(pos, "graph order overflows"));
        }
        Ok(e)
    }
}

impl FromStr for GraphExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            toks: lex(s)?,
            at: 0,
        };
        let e = p.expr()?;
        match p.peek() {
            (Tok::End, _) => Ok(e),
            (_, pos) => Err(Error::parse(*pos, "trailing input")),
        }
    }
}
