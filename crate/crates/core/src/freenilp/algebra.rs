use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::hall::{build_basis, HallWord, Node};
use crate::error::{Error, Result};
use crate::exactlin::{parse_rational, zero_vec, Rational, Subspace};
use crate::lie::{to_dense, to_sparse, Sparse, StructureTable};

/// The free `t`-nilpotent Lie algebra on `d` generators, over its ordered Hall basis.
#[derive(Clone, Debug)]
pub struct FreeNilpotent {
    d: usize,
    t: usize,
    words: Vec<HallWord>,
    nodes: Vec<Node>,
    lengths: Vec<usize>,
    offsets: Vec<usize>,
    word_index: HashMap<(usize, usize), usize>,
    table: StructureTable,
}

impl PartialEq for FreeNilpotent {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.t == other.t
    }
}

impl Eq for FreeNilpotent {}

impl FreeNilpotent {
    pub fn new(d: usize, t: usize) -> Result<Self> {
        if d < 1 || t < 1 {
            return Err(Error::InvalidAlgebra(format!("need d ≥ 1 and t ≥ 1, got d={d}, t={t}")));
        }
        let basis = build_basis(d, t);
        let mut offsets = vec![0; t + 2];
        for (k, slot) in offsets.iter_mut().enumerate().skip(1) {
            *slot = basis.lengths.iter().filter(|&&l| l < k).count();
        }
        let word_index = basis
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(idx, n)| match n {
                Node::Br(a, b) => Some(((*a, *b), idx)),
                Node::Gen(_) => None,
            })
            .collect();
        let mut rewriter = Rewriter {
            nodes: &basis.nodes,
            lengths: &basis.lengths,
            word_index: &word_index,
            t,
            memo: HashMap::new(),
        };
        let n = basis.words.len();
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(to_dense(&rewriter.bracket(i, j), n));
            }
        }
        Ok(FreeNilpotent {
            d,
            t,
            words: basis.words,
            nodes: basis.nodes,
            lengths: basis.lengths,
            offsets,
            word_index,
            table: StructureTable::from_dense_unchecked(n, table),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn basis(&self) -> &[HallWord] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &HallWord {
        &self.words[i]
    }

    /// Grade (word length) of basis index `i`.
    pub fn grade(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// Basis indices of the homogeneous component `s_k`, `1 ≤ k ≤ t`.
    pub fn grade_range(&self, k: usize) -> Range<usize> {
        assert!((1..=self.t).contains(&k), "grade {k} out of range");
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        (1..=self.t).map(|k| self.grade_range(k).len()).collect()
    }

    /// Basis index of the Hall word `[h_i, h_j]`, if it is a basis element.
    pub fn bracket_index(&self, i: usize, j: usize) -> Option<usize> {
        self.word_index.get(&(i, j)).copied()
    }

    /// Basis index of a Hall word.
    pub fn index_of(&self, w: &HallWord) -> Option<usize> {
        self.words.iter().position(|x| x == w)
    }

    /// The pair of basis indices a bracket basis word is built from.
    pub fn factors(&self, i: usize) -> Option<(usize, usize)> {
        match self.nodes[i] {
            Node::Br(a, b) => Some((a, b)),
            Node::Gen(_) => None,
        }
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn zero(&self) -> LieElement {
        LieElement {
            d: self.d,
            t: self.t,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis_element(&self, i: usize) -> LieElement {
        assert!(i < self.dim(), "basis index out of range");
        LieElement {
            d: self.d,
            t: self.t,
            coeffs: BTreeMap::from([(i, Rational::one())]),
        }
    }

    /// Generator `x_i`, 1-based.
    pub fn generator(&self, i: usize) -> LieElement {
        self.basis_element(i - 1)
    }

    pub fn element(&self, v: &[Rational]) -> LieElement {
        assert_eq!(v.len(), self.dim(), "vector length mismatch");
        LieElement {
            d: self.d,
            t: self.t,
            coeffs: to_sparse(v).into_iter().collect(),
        }
    }

    pub fn check_member(&self, x: &LieElement) -> Result<()> {
        if x.d == self.d && x.t == self.t {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> Result<LieElement> {
        self.check_member(a)?;
        self.check_member(b)?;
        if a.d != b.d || a.t != b.t {
            return Err(Error::AlgebraMismatch);
        }
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, x) in &a.coeffs {
            for (j, y) in &b.coeffs {
                let xy = x * y;
                for (k, c) in self.table.get(*i, *j) {
                    *out.entry(*k).or_insert_with(Rational::zero) += &xy * c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(LieElement {
            d: self.d,
            t: self.t,
            coeffs: out,
        })
    }

    pub fn bracket_vec(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        self.table.bracket(a, b)
    }

    /// Evaluates an arbitrary bracket monomial in the Hall basis.
    pub fn evaluate(&self, w: &HallWord) -> Result<Vec<Rational>> {
        match w {
            HallWord::Generator(i) => {
                if *i > self.d {
                    return Err(Error::Malformed(format!("generator x{i} exceeds d={}", self.d)));
                }
                Ok(crate::exactlin::unit_vec(self.dim(), i - 1))
            }
            HallWord::Bracket(a, b) => Ok(self.bracket_vec(&self.evaluate(a)?, &self.evaluate(b)?)),
        }
    }

    /// Parses a linear combination such as `[[x3,x2],x3] - [[x2,x1],x1] + 2/3 x1`.
    pub fn parse_element(&self, s: &str) -> Result<Vec<Rational>> {
        let mut v = zero_vec(self.dim());
        for (coeff, word) in split_terms(s)? {
            let w = self.evaluate(&HallWord::parse(&word)?)?;
            for (x, y) in v.iter_mut().zip(w) {
                *x += &coeff * y;
            }
        }
        Ok(v)
    }

    /// Nonzero structure constants `(i, j, k, c)`, 1-based, `i > j`: `[h_i, h_j] = Σ c h_k`.
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, Rational)> {
        self.table
            .triples()
            .into_iter()
            .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c))
            .collect()
    }

    /// Span of the grades `lo..=hi` (clamped to `1..=t`).
    pub fn graded_span(&self, lo: usize, hi: usize) -> Subspace {
        let hi = hi.min(self.t);
        let idx: Vec<usize> = (lo.max(1)..=hi).flat_map(|k| self.grade_range(k)).collect();
        Subspace::coordinate(self.dim(), idx)
    }

    /// `n^k = s_k ⊕ … ⊕ s_t` (zero for `k > t`).
    pub fn power(&self, k: usize) -> Subspace {
        self.graded_span(k, self.t)
    }

    /// Lower series `n^1, …, n^{t+1}` and upper series `Z_1, …, Z_{t+1}`, computed from
    /// the structure constants.
    pub fn central_series(&self) -> (Vec<Subspace>, Vec<Subspace>) {
        (self.table.lower_central_series(), self.table.upper_central_series())
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            d: self.d,
            t: self.t,
            basis: self.words.iter().map(ToString::to_string).collect(),
            structure: self
                .structure_constants()
                .into_iter()
                .map(|(i, j, k, c)| (i, j, k, c.to_string()))
                .collect(),
        }
    }

    /// Formats a coefficient vector as a linear combination of Hall words.
    pub fn format_vec(&self, v: &[Rational]) -> String {
        format_combination(v, |i| self.words[i].to_string())
    }
}

/// Wire format for algebras: basis words and 1-based structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub d: usize,
    pub t: usize,
    pub basis: Vec<String>,
    pub structure: Vec<(usize, usize, usize, String)>,
}

impl AlgebraJson {
    /// Rebuilds the algebra from `d, t` and checks the transmitted data against it.
    pub fn load(&self) -> Result<FreeNilpotent> {
        let alg = FreeNilpotent::new(self.d, self.t)?;
        let expected = alg.to_json();
        if expected.basis != self.basis {
            return Err(Error::Malformed("basis does not match the Hall basis".into()));
        }
        let given = self
            .structure
            .iter()
            .map(|(i, j, k, c)| parse_rational(c).map(|c| (*i, *j, *k, c.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if given != expected.structure {
            return Err(Error::Malformed("structure constants do not match".into()));
        }
        Ok(alg)
    }
}

pub(crate) fn format_combination(v: &[Rational], label: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            out.push_str(&abs.to_string());
            out.push(' ');
        }
        out.push_str(&label(i));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn split_terms(s: &str) -> Result<Vec<(Rational, String)>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in compact.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !cur.is_empty() && !cur.ends_with(['+', '-']) {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    terms
        .into_iter()
        .map(|term| {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-Rational::one(), rest.to_string()),
                None => (Rational::one(), term.trim_start_matches('+').to_string()),
            };
            let split = body.find(['[', 'x']).ok_or_else(|| Error::Malformed(format!("term `{term}` has no word")))?;
            let (num, word) = body.split_at(split);
            let num = num.trim_end_matches('*');
            let coeff = if num.is_empty() { Rational::one() } else { parse_rational(num)? };
            Ok((sign * coeff, word.to_string()))
        })
        .collect()
}

/// Sparse element of some `n_{d,t}`, tagged with its algebra parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElement {
    d: usize,
    t: usize,
    coeffs: BTreeMap<usize, Rational>,
}

impl LieElement {
    pub fn algebra_params(&self) -> (usize, usize) {
        (self.d, self.t)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Rational> {
        let s: Sparse = self.terms().map(|(i, c)| (i, c.clone())).collect();
        to_dense(&s, dim)
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Rational) -> LieElement {
        let mut coeffs: BTreeMap<usize, Rational> = self.coeffs.iter().map(|(i, c)| (*i, c * s)).collect();
        coeffs.retain(|_, c| !c.is_zero());
        LieElement { coeffs, ..self.clone() }
    }

    fn combine(&self, other: &LieElement, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<LieElement> {
        if (self.d, self.t) != (other.d, other.t) {
            return Err(Error::AlgebraMismatch);
        }
        let zero = Rational::zero();
        let keys: std::collections::BTreeSet<usize> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        let mut coeffs = BTreeMap::new();
        for k in keys {
            let v = f(self.coeffs.get(&k).unwrap_or(&zero), other.coeffs.get(&k).unwrap_or(&zero));
            if !v.is_zero() {
                coeffs.insert(k, v);
            }
        }
        Ok(LieElement {
            d: self.d,
            t: self.t,
            coeffs,
        })
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max = self.coeffs.keys().next_back().map_or(0, |k| k + 1);
        let dense = self.to_dense(max);
        f.write_str(&format_combination(&dense, |i| format!("h{}", i + 1)))
    }
}

/// Rewrites brackets of basis elements into the Hall basis.
struct Rewriter<'a> {
    nodes: &'a [Node],
    lengths: &'a [usize],
    word_index: &'a HashMap<(usize, usize), usize>,
    t: usize,
    memo: HashMap<(usize, usize), Sparse>,
}

impl Rewriter<'_> {
    fn bracket(&mut self, i: usize, j: usize) -> Sparse {
        if i == j || self.lengths[i] + self.lengths[j] > self.t {
            return Vec::new();
        }
        if i < j {
            return negate(&self.bracket(j, i));
        }
        if let Some(hit) = self.memo.get(&(i, j)) {
            return hit.clone();
        }
        let result = match self.nodes[i] {
            Node::Br(c, e) if j < e => {
                // [[c,e],b] = [[c,b],e] + [c,[e,b]]
                let cb = self.bracket(c, j);
                let mut acc = BTreeMap::new();
                for (k, x) in &cb {
                    let term = self.bracket(*k, e);
                    add_scaled(&mut acc, &term, x);
                }
                let eb = self.bracket(e, j);
                for (k, x) in &eb {
                    let term = self.bracket(c, *k);
                    add_scaled(&mut acc, &term, x);
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
            _ => vec![(self.word_index[&(i, j)], Rational::one())],
        };
        self.memo.insert((i, j), result.clone());
        result
    }
}

fn negate(s: &Sparse) -> Sparse {
    s.iter().map(|(k, c)| (*k, -c.clone())).collect()
}

fn add_scaled(acc: &mut BTreeMap<usize, Rational>, term: &Sparse, x: &Rational) {
    for (k, c) in term {
        *acc.entry(*k).or_insert_with(Rational::zero) += x * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    #[test]
    fn structure_constants_small() {
        let n22 = FreeNilpotent::new(2, 2).unwrap();
        assert_eq!(n22.structure_constants(), vec![(2, 1, 3, rat(1))]);
        let n11 = FreeNilpotent::new(1, 1).unwrap();
        assert!(n11.structure_constants().is_empty());
        let n23 = FreeNilpotent::new(2, 3).unwrap();
        let sc = n23.structure_constants();
        assert!(sc.contains(&(3, 1, 4, rat(1))));
        assert!(sc.contains(&(3, 2, 5, rat(1))));
    }

    #[test]
    fn bracket_examples() {
        let n = FreeNilpotent::new(2, 3).unwrap();
        let x1 = n.generator(1);
        let x2 = n.generator(2);
        assert!(n.bracket(&x1, &x1).unwrap().is_zero());
        assert_eq!(n.bracket(&x1, &x2).unwrap(), n.basis_element(2).scale(&rat(-1)));
        let h3 = n.basis_element(2);
        assert_eq!(n.bracket(&h3, &x1).unwrap(), n.basis_element(3));
        let other = FreeNilpotent::new(2, 2).unwrap();
        assert!(matches!(other.bracket(&x1, &x2), Err(Error::AlgebraMismatch)));
    }

    #[test]
    fn deep_word_is_basis_element() {
        let n = FreeNilpotent::new(2, 5).unwrap();
        let a = HallWord::parse("[[x2,x1],x1]").unwrap();
        let b = HallWord::parse("[x2,x1]").unwrap();
        let target = HallWord::parse("[[[x2,x1],x1],[x2,x1]]").unwrap();
        let ia = n.index_of(&a).unwrap();
        let ib = n.index_of(&b).unwrap();
        let it = n.index_of(&target).unwrap();
        assert_eq!(
            n.bracket(&n.basis_element(ia), &n.basis_element(ib)).unwrap(),
            n.basis_element(it)
        );
    }

    #[test]
    fn non_hall_word_rewrites() {
        // [[x2,x1],x2] is Hall; [x1,[x2,x1]] = -[[x2,x1],x1].
        let n = FreeNilpotent::new(2, 3).unwrap();
        let v = n.evaluate(&HallWord::parse("[x1,[x2,x1]]").unwrap()).unwrap();
        assert_eq!(n.format_vec(&v), "-[[x2,x1],x1]");
        let w = n.parse_element("[[x2,x1],x2] - 2/3[x1,[x2,x1]] + x1").unwrap();
        assert_eq!(n.format_vec(&w), "x1 + 2/3 [[x2,x1],x1] + [[x2,x1],x2]");
    }

    #[test]
    fn json_round_trip() {
        let n = FreeNilpotent::new(3, 3).unwrap();
        let js = serde_json::to_string(&n.to_json()).unwrap();
        let back: AlgebraJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.load().unwrap(), n);
    }

    #[test]
    fn graded_offsets() {
        let n = FreeNilpotent::new(2, 5).unwrap();
        assert_eq!(n.graded_dims(), vec![2, 1, 2, 3, 6]);
        assert_eq!(n.grade_range(5), 8..14);
        assert_eq!(n.power(2).dim(), 12);
        assert_eq!(n.power(6).dim(), 0);
    }
}
