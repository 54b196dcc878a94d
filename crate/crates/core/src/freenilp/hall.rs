use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A bracket monomial over the generators `x_1, …, x_d`.
///
/// Basis words returned by [`hall_basis`] satisfy the Hall conditions; the parser
/// accepts arbitrary bracketings so that non-basis monomials can be evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HallWord {
    Generator(usize),
    Bracket(Box<HallWord>, Box<HallWord>),
}

impl HallWord {
    pub fn gen(i: usize) -> Self {
        HallWord::Generator(i)
    }

    pub fn br(a: HallWord, b: HallWord) -> Self {
        HallWord::Bracket(Box::new(a), Box::new(b))
    }

    /// Number of generator occurrences.
    pub fn len(&self) -> usize {
        match self {
            HallWord::Generator(_) => 1,
            HallWord::Bracket(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Generator indices read left to right.
    pub fn foliage(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    fn push_leaves(&self, out: &mut Vec<usize>) {
        match self {
            HallWord::Generator(i) => out.push(*i),
            HallWord::Bracket(a, b) => {
                a.push_leaves(out);
                b.push_leaves(out);
            }
        }
    }

    pub fn max_generator(&self) -> usize {
        self.foliage().into_iter().max().unwrap_or(0)
    }

    /// Basis order: shorter words first, then lexicographic on the foliage.
    pub fn basis_cmp(&self, other: &HallWord) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.foliage().cmp(&other.foliage()))
    }

    /// Parses `x3`, `[x2,x1]`, `[[x2,x1],x1]`, … (whitespace ignored).
    pub fn parse(s: &str) -> Result<HallWord> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = parse_at(&chars, &mut pos).ok_or_else(|| Error::Malformed(format!("bad bracket word `{s}`")))?;
        if pos != chars.len() {
            return Err(Error::Malformed(format!("trailing input in `{s}`")));
        }
        Ok(w)
    }
}

fn parse_at(c: &[char], pos: &mut usize) -> Option<HallWord> {
    match c.get(*pos)? {
        'x' => {
            *pos += 1;
            let start = *pos;
            while c.get(*pos).is_some_and(char::is_ascii_digit) {
                *pos += 1;
            }
            let n: usize = c[start..*pos].iter().collect::<String>().parse().ok()?;
            (n >= 1).then_some(HallWord::Generator(n))
        }
        '[' => {
            *pos += 1;
            let a = parse_at(c, pos)?;
            (c.get(*pos)? == &',').then_some(())?;
            *pos += 1;
            let b = parse_at(c, pos)?;
            (c.get(*pos)? == &']').then_some(())?;
            *pos += 1;
            Some(HallWord::br(a, b))
        }
        _ => None,
    }
}

impl fmt::Display for HallWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HallWord::Generator(i) => write!(f, "x{i}"),
            HallWord::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Node of an indexed Hall basis: a generator, or the bracket of two earlier basis indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Node {
    Gen(usize),
    Br(usize, usize),
}

pub(crate) struct IndexedBasis {
    pub words: Vec<HallWord>,
    pub nodes: Vec<Node>,
    pub lengths: Vec<usize>,
}

pub(crate) fn build_basis(d: usize, t: usize) -> IndexedBasis {
    let mut words: Vec<HallWord> = (1..=d).map(HallWord::Generator).collect();
    let mut nodes: Vec<Node> = (1..=d).map(Node::Gen).collect();
    let mut lengths = vec![1; d];
    if t == 0 {
        return IndexedBasis {
            words: Vec::new(),
            nodes: Vec::new(),
            lengths: Vec::new(),
        };
    }
    for l in 2..=t {
        let mut fresh: Vec<(HallWord, Node)> = Vec::new();
        let n = words.len();
        for a in 0..n {
            for b in 0..a {
                if lengths[a] + lengths[b] != l {
                    continue;
                }
                if let Node::Br(_, e) = nodes[a] {
                    if b < e {
                        continue;
                    }
                }
                fresh.push((HallWord::br(words[a].clone(), words[b].clone()), Node::Br(a, b)));
            }
        }
        fresh.sort_by(|x, y| x.0.basis_cmp(&y.0));
        for (w, node) in fresh {
            words.push(w);
            nodes.push(node);
            lengths.push(l);
        }
    }
    IndexedBasis { words, nodes, lengths }
}

/// The ordered Hall basis of the free `t`-nilpotent Lie algebra on `d` generators.
pub fn hall_basis(d: usize, t: usize) -> Result<Vec<HallWord>> {
    if d < 1 || t < 1 {
        return Err(Error::InvalidAlgebra(format!("need d ≥ 1 and t ≥ 1, got d={d}, t={t}")));
    }
    Ok(build_basis(d, t).words)
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`l` part of the free Lie algebra on `d` generators.
pub fn witt_dimension(d: u64, l: u64) -> u64 {
    assert!(d >= 1 && l >= 1, "witt_dimension needs d, l ≥ 1");
    let total: i128 = (1..=l)
        .filter(|a| l.is_multiple_of(*a))
        .map(|a| i128::from(mobius(a)) * i128::from(d).pow((l / a) as u32))
        .sum();
    (total / i128::from(l)) as u64
}
