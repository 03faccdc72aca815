//! The cobar DGA of the simplicial chain coalgebra of a simplex.
//!
//! Elements are integer combinations of tensor words in simplices. The empty
//! word is the unit. The grading of a letter `e_I` is `‖e_I‖ = dim e_I - 1`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplexError {
    #[error("simplex index must be nonempty")]
    Empty,
    #[error("simplex index {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),
}

/// `e_{i_0 … i_m}` with strictly increasing vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexIndex(Vec<usize>);

impl SimplexIndex {
    pub fn new(vertices: Vec<usize>) -> Result<Self, SimplexError> {
        if vertices.is_empty() {
            return Err(SimplexError::Empty);
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimplexError::NotIncreasing(vertices));
        }
        Ok(Self(vertices))
    }

    /// Panicking constructor for literals in tests and fixtures.
    pub fn of(vertices: &[usize]) -> Self {
        Self::new(vertices.to_vec()).expect("valid simplex index")
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// `‖e_I‖ = dim - 1`.
    pub fn norm_degree(&self) -> i64 {
        self.dim() as i64 - 1
    }

    /// Deletes the vertex at position `k`; `None` for a vertex.
    pub fn delete(&self, k: usize) -> Option<SimplexIndex> {
        if self.0.len() == 1 {
            return None;
        }
        let mut v = self.0.clone();
        v.remove(k);
        Some(Self(v))
    }

    /// Contiguous segment `e_{i_a … i_b}`.
    pub fn segment(&self, a: usize, b: usize) -> SimplexIndex {
        Self(self.0[a..=b].to_vec())
    }

    pub fn is_face_of(&self, other: &SimplexIndex) -> bool {
        self.0.iter().all(|v| other.0.contains(v))
    }

    /// All nonempty faces, including `self`, ordered by (dim, lex).
    pub fn faces(&self) -> Vec<SimplexIndex> {
        let n = self.0.len();
        let mut out: Vec<SimplexIndex> = (1u32..1 << n)
            .map(|mask| {
                Self(
                    (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect();
        out.sort_by(|a, b| (a.dim(), &a.0).cmp(&(b.dim(), &b.0)));
        out
    }

    /// Position of vertex `v` inside this simplex.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == v)
    }
}

impl fmt::Debug for SimplexIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{self}")
    }
}

impl fmt::Display for SimplexIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `(|e_I|, ‖e_I‖)`.
pub fn grades(i: &SimplexIndex) -> (i64, i64) {
    (i.dim() as i64, i.norm_degree())
}

pub type Word = Vec<SimplexIndex>;

/// Integer combination of words; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CobarElement {
    terms: BTreeMap<Word, i64>,
}

impl fmt::Debug for CobarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("{c}")
                } else {
                    let letters: Vec<String> = w.iter().map(|l| format!("{l:?}")).collect();
                    format!("{c}*{}", letters.join("⊗"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn word_degree(w: &[SimplexIndex]) -> i64 {
    w.iter().map(SimplexIndex::norm_degree).sum()
}

impl CobarElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(Vec::new(), c);
        e
    }

    pub fn one() -> Self {
        Self::scalar(1)
    }

    pub fn generator(i: SimplexIndex) -> Self {
        Self::word(vec![i], 1)
    }

    pub fn word(w: Word, c: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, i64> {
        &self.terms
    }

    pub fn coefficient(&self, w: &[SimplexIndex]) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when every word has the same degree.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(|w| word_degree(w));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, s: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                out.add_term(w, c1 * c2);
            }
        }
        out
    }
}

fn extend_derivation(
    x: &CobarElement,
    on_letter: impl Fn(&SimplexIndex) -> CobarElement,
) -> CobarElement {
    let mut out = CobarElement::zero();
    for (w, &c) in x.terms() {
        let mut sign_deg = 0i64;
        for (pos, letter) in w.iter().enumerate() {
            let sign = if sign_deg.rem_euclid(2) == 0 { 1 } else { -1 };
            let left = CobarElement::word(w[..pos].to_vec(), c * sign);
            let right = CobarElement::word(w[pos + 1..].to_vec(), 1);
            out = out.add(&left.mul(&on_letter(letter)).mul(&right));
            sign_deg += letter.norm_degree();
        }
    }
    out
}

fn generator_diff(i: &SimplexIndex, reduced: bool) -> CobarElement {
    let m = i.dim();
    let mut out = CobarElement::zero();
    if m > 0 {
        for k in 0..=m {
            if reduced && (k == 0 || k == m) {
                continue;
            }
            let sign = if k % 2 == 0 { -1 } else { 1 };
            out.add_term(vec![i.delete(k).expect("m > 0")], sign);
        }
    }
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        out.add_term(vec![i.segment(0, k), i.segment(k, m)], sign);
    }
    out
}

/// `D_s`, extended by the Leibniz rule with sign `(-1)^{‖x‖}`.
pub fn cobar_diff(x: &CobarElement) -> CobarElement {
    extend_derivation(x, |l| generator_diff(l, false))
}

/// `D_s^red`: `D_s` without the first and last vertex-deletion terms.
pub fn reduced_diff(x: &CobarElement) -> CobarElement {
    extend_derivation(x, |l| generator_diff(l, true))
}

/// The algebra automorphism with `e_I ↦ e_I ∓ 1` on 1-simplices.
pub fn phi(x: &CobarElement, inverse: bool) -> CobarElement {
    let shift = if inverse { 1 } else { -1 };
    let mut out = CobarElement::zero();
    for (w, &c) in x.terms() {
        let mut acc = CobarElement::scalar(c);
        for letter in w {
            let mut img = CobarElement::generator(letter.clone());
            if letter.dim() == 1 {
                img = img.add(&CobarElement::scalar(shift));
            }
            acc = acc.mul(&img);
        }
        out = out.add(&acc);
    }
    out
}
