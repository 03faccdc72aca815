//! The simplicial DGA of a front: generators `m^I_{i,j}`, the matrices
//! `M_I(e_J)` and `Θ_I`, and the matrix differential.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cobar::{cobar_diff, CobarElement, SimplexIndex};
use crate::front::{Diagnostic, FrontComplex};
use crate::homalg::PrimeField;

#[derive(Debug, Error)]
pub enum DgaError {
    #[error("front is invalid: {}", .0.first().map(|d| d.to_string()).unwrap_or_default())]
    InvalidFront(Vec<Diagnostic>),
    #[error("differential is not well defined at entry ({i}, {j}) of M({cell})")]
    IllDefined { cell: String, i: usize, j: usize },
    #[error("{letter} is not a face of {cell}")]
    UnsupportedLetter { cell: String, letter: String },
    #[error("unknown cell {0}")]
    UnknownCell(String),
}

pub type GenId = usize;

/// `m^I_{i,j}` with 0-based positions into the descending-z sheet list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub cell: SimplexIndex,
    pub i: usize,
    pub j: usize,
    pub upper: String,
    pub lower: String,
    pub degree: i64,
}

impl Generator {
    /// Canonical identity `m[I;i,j]` with 1-based positions.
    pub fn id(&self) -> String {
        let verts: Vec<String> = self.cell.vertices().iter().map(usize::to_string).collect();
        format!("m[{};{},{}]", verts.join(","), self.i + 1, self.j + 1)
    }
}

/// Integer combination of words in generators; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct NCPoly {
    terms: BTreeMap<Vec<GenId>, i64>,
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{c}{w:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::scalar(1)
    }

    pub fn generator(g: GenId) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![g], 1);
        p
    }

    pub fn add_term(&mut self, w: Vec<GenId>, c: i64) {
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

    pub fn terms(&self) -> &BTreeMap<Vec<GenId>, i64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), *c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
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

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }
}

/// Square matrix with `NCPoly` entries.
#[derive(Clone, PartialEq, Eq)]
pub struct GenMatrix {
    n: usize,
    entries: Vec<NCPoly>,
}

impl fmt::Debug for GenMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GenMatrix {}x{}", self.n, self.n)?;
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|c| format!("{:?}", self.get(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl GenMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![NCPoly::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, NCPoly::one());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &NCPoly {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: NCPoly) {
        self.entries[r * self.n + c] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self { n: self.n, entries }
    }

    pub fn scale(&self, s: i64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a.scale(s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        for r in 0..self.n {
            for k in 0..self.n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.n {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let prod = a.mul(b);
                        out.entries[r * self.n + c].add_assign(&prod);
                    }
                }
            }
        }
        out
    }

    /// Left multiplication by a diagonal sign matrix.
    pub fn row_signs(&self, signs: &[i64]) -> Self {
        let mut out = self.clone();
        for r in 0..self.n {
            for c in 0..self.n {
                out.entries[r * self.n + c] = self.get(r, c).scale(signs[r]);
            }
        }
        out
    }

    pub fn col_signs(&self, signs: &[i64]) -> Self {
        let mut out = self.clone();
        for r in 0..self.n {
            for c in 0..self.n {
                out.entries[r * self.n + c] = self.get(r, c).scale(signs[c]);
            }
        }
        out
    }

    pub fn map_entries(&self, f: impl Fn(&NCPoly) -> NCPoly) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

/// The simplicial DGA over the integers.
#[derive(Clone, Debug)]
pub struct SimplicialDGA {
    front: FrontComplex,
    generators: Vec<Generator>,
    index: BTreeMap<(SimplexIndex, usize, usize), GenId>,
    sheets: BTreeMap<SimplexIndex, Vec<String>>,
    theta: BTreeMap<SimplexIndex, Vec<i64>>,
    differential: Vec<NCPoly>,
}

fn sign(parity: i64) -> i64 {
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Builds the DGA of a validated front.
pub fn build_dga(front: &FrontComplex) -> Result<SimplicialDGA, DgaError> {
    let diags = front.validate();
    if !diags.is_empty() {
        return Err(DgaError::InvalidFront(diags));
    }
    let mut generators = Vec::new();
    let mut index = BTreeMap::new();
    let mut sheets = BTreeMap::new();
    let mut theta = BTreeMap::new();
    for cell in front.cells() {
        let fiber = front.fiber(cell).expect("cell listed");
        let labels = front.sheets(cell).expect("cell listed");
        let levels: Vec<usize> = labels
            .iter()
            .map(|s| fiber.level_of_sheet(s).unwrap())
            .collect();
        for i in 0..labels.len() {
            for j in 0..labels.len() {
                if levels[i] < levels[j] {
                    let degree = front.mu(&labels[i]) - front.mu(&labels[j]) + cell.norm_degree();
                    index.insert((cell.clone(), i, j), generators.len());
                    generators.push(Generator {
                        cell: cell.clone(),
                        i,
                        j,
                        upper: labels[i].clone(),
                        lower: labels[j].clone(),
                        degree,
                    });
                }
            }
        }
        theta.insert(
            cell.clone(),
            labels.iter().map(|s| sign(front.mu(s))).collect(),
        );
        sheets.insert(cell.clone(), labels);
    }
    let mut dga = SimplicialDGA {
        front: front.clone(),
        generators,
        index,
        sheets,
        theta,
        differential: Vec::new(),
    };
    dga.compute_differential()?;
    Ok(dga)
}

impl SimplicialDGA {
    fn compute_differential(&mut self) -> Result<(), DgaError> {
        let mut diff = vec![NCPoly::zero(); self.generators.len()];
        for cell in self.front.cells() {
            let rhs = self.entrywise_rhs(cell)?;
            let n = rhs.size();
            for i in 0..n {
                for j in 0..n {
                    match self.index.get(&(cell.clone(), i, j)) {
                        Some(&g) => diff[g] = rhs.get(i, j).clone(),
                        None if !rhs.get(i, j).is_zero() => {
                            return Err(DgaError::IllDefined {
                                cell: cell.to_string(),
                                i: i + 1,
                                j: j + 1,
                            });
                        }
                        None => {}
                    }
                }
            }
        }
        self.differential = diff;
        Ok(())
    }

    /// Replaces `Θ_I` and recomputes the differential; used to exercise the
    /// `∂² = 0` check.
    pub fn with_theta(&self, cell: &SimplexIndex, signs: Vec<i64>) -> Result<Self, DgaError> {
        let mut out = self.clone();
        out.theta.insert(cell.clone(), signs);
        out.compute_differential()?;
        Ok(out)
    }

    pub fn front(&self) -> &FrontComplex {
        &self.front
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, g: GenId) -> &Generator {
        &self.generators[g]
    }

    pub fn lookup(&self, cell: &SimplexIndex, i: usize, j: usize) -> Option<GenId> {
        self.index.get(&(cell.clone(), i, j)).copied()
    }

    pub fn find(&self, id: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.id() == id)
    }

    pub fn sheets(&self, cell: &SimplexIndex) -> &[String] {
        &self.sheets[cell]
    }

    pub fn theta(&self, cell: &SimplexIndex) -> &[i64] {
        &self.theta[cell]
    }

    /// `∂` on a generator.
    pub fn diff_generator(&self, g: GenId) -> &NCPoly {
        &self.differential[g]
    }

    pub fn word_degree(&self, w: &[GenId]) -> i64 {
        w.iter().map(|&g| self.generators[g].degree).sum()
    }

    /// `∂` extended as a derivation with sign `(-1)^{|x|}`.
    pub fn diff(&self, x: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, &c) in x.terms() {
            let mut deg = 0;
            for (pos, &g) in w.iter().enumerate() {
                let dg = &self.differential[g];
                if !dg.is_zero() {
                    let s = c * sign(deg);
                    for (inner, &ci) in dg.terms() {
                        let mut word = w[..pos].to_vec();
                        word.extend_from_slice(inner);
                        word.extend_from_slice(&w[pos + 1..]);
                        out.add_term(word, s * ci);
                    }
                }
                deg += self.generators[g].degree;
            }
        }
        out
    }

    /// True iff `∂²` vanishes on every generator.
    pub fn check_d_squared(&self) -> bool {
        (0..self.generators.len()).all(|g| self.diff(&self.differential[g]).is_zero())
    }

    /// Generators where `∂²` fails.
    pub fn d_squared_failures(&self) -> Vec<GenId> {
        (0..self.generators.len())
            .filter(|&g| !self.diff(&self.differential[g]).is_zero())
            .collect()
    }

    /// `M(e_I)`.
    pub fn m(&self, cell: &SimplexIndex) -> GenMatrix {
        let n = self.sheets[cell].len();
        let mut out = GenMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if let Some(g) = self.lookup(cell, i, j) {
                    out.set(i, j, NCPoly::generator(g));
                }
            }
        }
        out
    }

    /// `M_I(e_J)` for a face `e_J` of `e_I`.
    pub fn m_restricted(
        &self,
        cell: &SimplexIndex,
        face: &SimplexIndex,
    ) -> Result<GenMatrix, DgaError> {
        if !face.is_face_of(cell) || !self.sheets.contains_key(face) {
            return Err(DgaError::UnsupportedLetter {
                cell: cell.to_string(),
                letter: face.to_string(),
            });
        }
        let big = &self.sheets[cell];
        let small = &self.sheets[face];
        let pos = |s: &str| {
            big.iter()
                .position(|x| x == s)
                .expect("face sheets continue into coface")
        };
        let mut out = GenMatrix::zeros(big.len());
        for a in 0..small.len() {
            for b in 0..small.len() {
                if let Some(g) = self.lookup(face, a, b) {
                    out.set(pos(&small[a]), pos(&small[b]), NCPoly::generator(g));
                }
            }
        }
        if face.dim() == 0 {
            for pair in self.front.cusp_pairs(face, cell).expect("face pair") {
                out.set(pos(&pair.upper), pos(&pair.lower), NCPoly::one());
            }
        }
        Ok(out)
    }

    /// The unital algebra homomorphism `e_J ↦ M_I(e_J)` on a cobar element.
    pub fn matrix_hom(&self, cell: &SimplexIndex, x: &CobarElement) -> Result<GenMatrix, DgaError> {
        let n = self
            .sheets
            .get(cell)
            .ok_or_else(|| DgaError::UnknownCell(cell.to_string()))?
            .len();
        let mut out = GenMatrix::zeros(n);
        for (word, &c) in x.terms() {
            let mut acc = GenMatrix::identity(n);
            for letter in word {
                acc = acc.mul(&self.m_restricted(cell, letter)?);
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out)
    }

    /// Right side of the matrix differential, computed from its explicit
    /// face and splitting sums.
    pub fn entrywise_rhs(&self, cell: &SimplexIndex) -> Result<GenMatrix, DgaError> {
        let n = self
            .sheets
            .get(cell)
            .ok_or_else(|| DgaError::UnknownCell(cell.to_string()))?
            .len();
        let m = cell.dim();
        let mut acc = GenMatrix::zeros(n);
        if m > 0 {
            for k in 0..=m {
                let face = cell.delete(k).expect("m > 0");
                acc = acc.add(&self.m_restricted(cell, &face)?.scale(-sign(k as i64)));
            }
        }
        for k in 0..=m {
            let left = self.m_restricted(cell, &cell.segment(0, k))?;
            let right = self.m_restricted(cell, &cell.segment(k, m))?;
            acc = acc.add(&left.mul(&right).scale(sign(k as i64)));
        }
        Ok(acc.row_signs(&self.theta[cell]))
    }

    /// `Θ_I · M_I(D_s e_I)`.
    pub fn matrix_rhs(&self, cell: &SimplexIndex) -> Result<GenMatrix, DgaError> {
        let ds = cobar_diff(&CobarElement::generator(cell.clone()));
        Ok(self.matrix_hom(cell, &ds)?.row_signs(&self.theta[cell]))
    }

    /// `∂` applied entrywise to `M(e_I)`.
    pub fn d_of_m(&self, cell: &SimplexIndex) -> GenMatrix {
        self.m(cell).map_entries(|p| self.diff(p))
    }

    /// `σ`, negating odd-degree words.
    pub fn sigma(&self, x: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, &c) in x.terms() {
            out.add_term(w.clone(), c * sign(self.word_degree(w)));
        }
        out
    }

    /// Checks `σ(M_I(e_J)) = (-1)^{‖e_J‖} Θ_I M_I(e_J) Θ_I` for one face.
    pub fn sigma_identity_holds(
        &self,
        cell: &SimplexIndex,
        face: &SimplexIndex,
    ) -> Result<bool, DgaError> {
        let mij = self.m_restricted(cell, face)?;
        let lhs = mij.map_entries(|p| self.sigma(p));
        let th = &self.theta[cell];
        let rhs = mij
            .row_signs(th)
            .col_signs(th)
            .scale(sign(face.norm_degree()));
        Ok(lhs == rhs)
    }

    /// Value of `x` under the unital homomorphism sending degree-0 generators
    /// to `assign(g)` and all other generators to zero.
    pub fn evaluate(&self, field: PrimeField, assign: impl Fn(GenId) -> u32, x: &NCPoly) -> u32 {
        let mut total = 0u32;
        for (w, &c) in x.terms() {
            let mut v = field.reduce(c);
            for &g in w {
                if v == 0 {
                    break;
                }
                v = if self.generators[g].degree == 0 {
                    field.mul(v, assign(g))
                } else {
                    0
                };
            }
            total = field.add(total, v);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SHEET_EDGE: &str = r#"
name = "edge"
[maslov]
A = 1
B = 0
[fibers]
"0" = ["A", "B"]
"1" = ["A", "B"]
"0 1" = ["A", "B"]
"#;

    fn edge_dga() -> SimplicialDGA {
        build_dga(&FrontComplex::from_toml_str(TWO_SHEET_EDGE).unwrap()).unwrap()
    }

    #[test]
    fn edge_differential_matches_hand_expansion() {
        let a = edge_dga();
        let g01 = a.find("m[0,1;1,2]").unwrap();
        let g0 = a.find("m[0;1,2]").unwrap();
        let g1 = a.find("m[1;1,2]").unwrap();
        // (-1)^{μ(A)} (m^0 - m^1) with μ(A) = 1
        let expected = NCPoly::generator(g1).sub(&NCPoly::generator(g0));
        assert_eq!(a.diff_generator(g01), &expected);
        assert_eq!(a.generator(g01).degree, 1);
        assert_eq!(a.generator(g0).degree, 0);
    }

    #[test]
    fn vertex_generator_is_closed_under_square() {
        let a = edge_dga();
        assert!(a.check_d_squared());
        for g in 0..a.generators().len() {
            let dg = a.diff_generator(g);
            for w in dg.terms().keys() {
                assert_eq!(a.word_degree(w), a.generator(g).degree - 1);
            }
        }
    }

    #[test]
    fn matrix_hom_is_unital() {
        let a = edge_dga();
        let cell = SimplexIndex::of(&[0, 1]);
        assert_eq!(
            a.matrix_hom(&cell, &CobarElement::one()).unwrap(),
            GenMatrix::identity(2)
        );
        let bad = CobarElement::generator(SimplexIndex::of(&[2]));
        assert!(matches!(
            a.matrix_hom(&cell, &bad),
            Err(DgaError::UnsupportedLetter { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let a = edge_dga();
        let f = PrimeField::new(3).unwrap();
        let g0 = a.find("m[0;1,2]").unwrap();
        let g1 = a.find("m[1;1,2]").unwrap();
        let g01 = a.find("m[0,1;1,2]").unwrap();
        let assign = |g: GenId| if g == g0 { 2 } else { 1 };
        assert_eq!(a.evaluate(f, assign, &NCPoly::one()), 1);
        assert_eq!(a.evaluate(f, assign, &NCPoly::generator(g01)), 0);
        let prod = NCPoly::generator(g0).mul(&NCPoly::generator(g1));
        assert_eq!(a.evaluate(f, assign, &prod), 2);
    }

    #[test]
    fn corrupted_theta_breaks_d_squared() {
        let text = r#"
name = "tri"
[maslov]
A = 1
B = 0
C = 0
[fibers]
"0" = ["A", "B", "C"]
"1" = ["A", "B", "C"]
"2" = ["A", "B", "C"]
"0 1" = ["A", "B", "C"]
"0 2" = ["A", "B", "C"]
"1 2" = ["A", "B", "C"]
"0 1 2" = ["A", "B", "C"]
"#;
        let a = build_dga(&FrontComplex::from_toml_str(text).unwrap()).unwrap();
        assert!(a.check_d_squared());
        let cell = SimplexIndex::of(&[0, 1]);
        let mut th = a.theta(&cell).to_vec();
        th[0] = -th[0];
        let bad = a.with_theta(&cell, th).unwrap();
        assert!(!bad.check_d_squared());
    }
}
