//! Type expressions: `ord(m)`, `basic(p,q)`, `chain(p1,...,pk)` and `one`, combined as
//! integer-weighted sums such as `2*basic(2,2) - ord(4)`. Parts lists are `;`-separated.

use std::fmt;

use crate::basic::{combo_spectrum, decompose_chain, BasicType, ChainType, TypeCombo};
use crate::error::{Error, Result};
use crate::graph::{build_basic, build_chain, build_ordinary, ResolutionGraph};
use crate::spectrum::{Cursor, SpectrumCombo};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Ord(i64),
    Basic(i64, i64),
    Chain(Vec<i64>),
    One,
}

impl Atom {
    pub fn types(&self) -> Result<TypeCombo> {
        match self {
            Atom::Ord(m) => TypeCombo::basic(*m, 0),
            Atom::Basic(p, q) => TypeCombo::basic(*p, *q),
            Atom::Chain(p) => decompose_chain(&ChainType::new(p.clone())?),
            Atom::One => Ok(TypeCombo::unit()),
        }
    }

    pub fn graph(&self) -> Result<ResolutionGraph> {
        match self {
            Atom::Ord(m) => build_ordinary(*m),
            Atom::Basic(p, q) => build_basic(*p, *q),
            Atom::Chain(p) => build_chain(p),
            Atom::One => Err(Error::InvalidType("the unit has no resolution graph".into())),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ord(m) => write!(f, "ord({m})"),
            Atom::Basic(p, q) => write!(f, "basic({p},{q})"),
            Atom::Chain(p) => {
                let s: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "chain({})", s.join(","))
            }
            Atom::One => write!(f, "one"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub terms: Vec<(i64, Atom)>,
}

impl Expr {
    pub fn types(&self) -> Result<TypeCombo> {
        let mut out = TypeCombo::new();
        for (k, a) in &self.terms {
            out.add_scaled(&a.types()?, *k);
        }
        Ok(out)
    }

    pub fn spectrum(&self) -> Result<SpectrumCombo> {
        combo_spectrum(&self.types()?)
    }

    /// The atom of a single unweighted term.
    pub fn single(&self) -> Option<&Atom> {
        match &self.terms[..] {
            [(1, a)] => Some(a),
            _ => None,
        }
    }

    pub fn graph(&self) -> Result<ResolutionGraph> {
        self.single()
            .ok_or_else(|| Error::InvalidInput(format!("`{self}` is not a single germ type")))?
            .graph()
    }

    /// The first-level multiplicity of a single germ type.
    pub fn multiplicity(&self) -> Option<i64> {
        match self.single()? {
            Atom::Ord(m) => Some(*m),
            Atom::Basic(p, q) => BasicType::new(*p, *q).ok().map(|t| t.multiplicity()),
            Atom::Chain(p) => ChainType::new(p.clone()).ok().map(|c| c.m1()),
            Atom::One => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, a)) in self.terms.iter().enumerate() {
            let body = if k.abs() == 1 {
                a.to_string()
            } else {
                format!("{}*{a}", k.abs())
            };
            match (i, *k < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

fn args(cur: &mut Cursor) -> Result<Vec<i64>> {
    cur.expect('(')?;
    let mut out = vec![cur.integer()?];
    while cur.eat(',') {
        out.push(cur.integer()?);
    }
    cur.expect(')')?;
    Ok(out)
}

fn atom(cur: &mut Cursor) -> Result<Atom> {
    cur.skip_ws();
    let at = cur.pos;
    let wrong = |cur: &mut Cursor, name: &str, n: &str| {
        cur.pos = at;
        Err(cur.error(format!("{name} takes {n}")))
    };
    if cur.eat_str("ord") {
        let a = args(cur)?;
        match a[..] {
            [m] => Ok(Atom::Ord(m)),
            _ => wrong(cur, "ord", "one argument"),
        }
    } else if cur.eat_str("basic") {
        let a = args(cur)?;
        match a[..] {
            [p, q] => Ok(Atom::Basic(p, q)),
            _ => wrong(cur, "basic", "two arguments"),
        }
    } else if cur.eat_str("chain") {
        Ok(Atom::Chain(args(cur)?))
    } else if cur.eat_str("one") {
        Ok(Atom::One)
    } else {
        Err(cur.error("expected ord, basic, chain or one"))
    }
}

fn term(cur: &mut Cursor, sign: i64) -> Result<(i64, Atom)> {
    cur.skip_ws();
    if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        let k = cur.integer()?;
        cur.expect('*')?;
        Ok((sign * k, atom(cur)?))
    } else {
        Ok((sign, atom(cur)?))
    }
}

fn expr(cur: &mut Cursor, stop: Option<char>) -> Result<Expr> {
    let sign = if cur.eat('-') { -1 } else { 1 };
    let mut terms = vec![term(cur, sign)?];
    loop {
        cur.skip_ws();
        if cur.at_end() || (stop.is_some() && cur.peek() == stop) {
            break;
        }
        let sign = if cur.eat('+') {
            1
        } else if cur.eat('-') {
            -1
        } else {
            return Err(cur.error("expected `+` or `-`"));
        };
        terms.push(term(cur, sign)?);
    }
    Ok(Expr { terms })
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut cur = Cursor::new(src);
    let e = expr(&mut cur, None)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(e)
}

pub fn parse_parts(src: &str) -> Result<Vec<Expr>> {
    let mut cur = Cursor::new(src);
    let mut out = vec![expr(&mut cur, Some(';'))?];
    while cur.eat(';') {
        out.push(expr(&mut cur, Some(';'))?);
    }
    if !cur.at_end() {
        return Err(cur.error("unexpected trailing input"));
    }
    Ok(out)
}
