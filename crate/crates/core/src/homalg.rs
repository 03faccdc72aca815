//! Exact linear algebra over prime fields: graded modules, cochain complexes,
//! cones, totalizations of commutative squares and quasi-isomorphism tests.
//!
//! Matrices are dense and indexed `(target, source)`. All differentials have
//! degree +1.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("entry ({row}, {col}) violates the grading of a degree {degree} map")]
    Grading { row: usize, col: usize, degree: i64 },
    #[error("differential does not square to zero")]
    NotDifferential,
    #[error("map is not a chain map")]
    NotChainMap,
    #[error("square does not commute")]
    NotCommutative,
}

/// The field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, AlgebraError> {
        if !(2..=65_521).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + (self.p - b % self.p) as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in GF({})", self.p);
        let (mut base, mut exp, mut acc) = (a as u64 % self.p as u64, self.p as u64 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            exp >>= 1;
        }
        acc as u32
    }

    /// Signed representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: u32) -> i64 {
        let a = a as i64;
        if a > self.p as i64 / 2 {
            a - self.p as i64
        } else {
            a
        }
    }
}

/// Dense matrix over GF(p).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over GF({})",
            self.rows, self.cols, self.field.p
        )?;
        for r in 0..self.rows {
            let row: Vec<i64> = (0..self.cols)
                .map(|c| self.field.signed(self.get(r, c)))
                .collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, field.reduce(x));
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        let p = self.field.p;
        self.data[r * self.cols + c] = v % p;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: u32) {
        let x = self.field.add(self.get(r, c), v);
        self.set(r, c, x);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0).count()
    }

    /// Row-major signed entries, for fixtures and reports.
    pub fn to_signed_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.field.signed(self.get(r, c)))
                    .collect()
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        let p = f.p as u64;
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (slot, &b) in acc.iter_mut().zip(row) {
                    if b != 0 {
                        *slot = (*slot + a * b as u64) % p;
                    }
                }
            }
            for (c, v) in acc.into_iter().enumerate() {
                out.data[r * other.cols + c] = v as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix sum shape"
        );
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, s: u32) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let rs: Vec<usize> = (r0..r0 + rows).collect();
        let cs: Vec<usize> = (c0..c0 + cols).collect();
        self.select(&rs, &cs)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..cols {
                    m.swap(pivot * cols + k, rank * cols + k);
                }
            }
            let inv = f.inv(m[rank * cols + c]);
            for k in c..cols {
                m[rank * cols + k] = f.mul(m[rank * cols + k], inv);
            }
            for r in rank + 1..rows {
                let factor = m[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = f.mul(factor, m[rank * cols + k]);
                    m[r * cols + k] = f.sub(m[r * cols + k], sub);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = self.field;
        let mut out = self.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        for c in 0..cols {
            let r0 = pivots.len();
            if r0 == rows {
                break;
            }
            let Some(pivot) = (r0..rows).find(|&r| out.data[r * cols + c] != 0) else {
                continue;
            };
            if pivot != r0 {
                for k in 0..cols {
                    out.data.swap(pivot * cols + k, r0 * cols + k);
                }
            }
            let inv = f.inv(out.data[r0 * cols + c]);
            for k in c..cols {
                out.data[r0 * cols + k] = f.mul(out.data[r0 * cols + k], inv);
            }
            for r in 0..rows {
                let factor = out.data[r * cols + c];
                if r == r0 || factor == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = f.mul(factor, out.data[r0 * cols + k]);
                    out.data[r * cols + k] = f.sub(out.data[r * cols + k], sub);
                }
            }
            pivots.push(c);
        }
        (out, pivots)
    }

    /// Some `x` with `self * x = b`, free variables set to zero.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right side length");
        let mut aug = Matrix::zeros(self.field, self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (r, &v) in b.iter().enumerate() {
            aug.set(r, self.cols, v);
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red.get(r, self.cols);
        }
        Some(x)
    }

    /// Basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let (red, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(red.get(r, free));
            }
            out.push(v);
        }
        out
    }
}

/// Free graded module with a labelled ordered basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedModule {
    labels: Vec<String>,
    degrees: Vec<i64>,
}

impl GradedModule {
    pub fn new(labels: Vec<String>, degrees: Vec<i64>) -> Result<Self, AlgebraError> {
        if labels.len() != degrees.len() {
            return Err(AlgebraError::Shape(format!(
                "{} labels but {} degrees",
                labels.len(),
                degrees.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(AlgebraError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, degrees })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `V[n]`: the element of degree `j` moves to degree `j - n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            labels: self.labels.clone(),
            degrees: self.degrees.iter().map(|d| d - n).collect(),
        }
    }

    /// Direct sum with each summand's labels prefixed as `prefix:label`.
    pub fn direct_sum(parts: &[(&str, &GradedModule)]) -> Self {
        let mut labels = Vec::new();
        let mut degrees = Vec::new();
        for (prefix, m) in parts {
            for i in 0..m.dim() {
                labels.push(format!("{prefix}:{}", m.labels[i]));
                degrees.push(m.degrees[i]);
            }
        }
        Self { labels, degrees }
    }

    /// Basis indices grouped by degree.
    pub fn degree_blocks(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &d) in self.degrees.iter().enumerate() {
            out.entry(d).or_default().push(i);
        }
        out
    }
}

pub(crate) fn check_grading(
    src: &GradedModule,
    tgt: &GradedModule,
    degree: i64,
    m: &Matrix,
) -> Result<(), AlgebraError> {
    if m.rows() != tgt.dim() || m.cols() != src.dim() {
        return Err(AlgebraError::Shape(format!(
            "matrix {}x{} for map {} -> {}",
            m.rows(),
            m.cols(),
            src.dim(),
            tgt.dim()
        )));
    }
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if m.get(r, c) != 0 && tgt.degree(r) != src.degree(c) + degree {
                return Err(AlgebraError::Grading {
                    row: r,
                    col: c,
                    degree,
                });
            }
        }
    }
    Ok(())
}

/// Homogeneous linear map between graded modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLinearMap {
    pub source: GradedModule,
    pub target: GradedModule,
    pub degree: i64,
    pub matrix: Matrix,
}

impl GradedLinearMap {
    pub fn new(
        source: GradedModule,
        target: GradedModule,
        degree: i64,
        matrix: Matrix,
    ) -> Result<Self, AlgebraError> {
        check_grading(&source, &target, degree, &matrix)?;
        Ok(Self {
            source,
            target,
            degree,
            matrix,
        })
    }
}

/// Rank of a degree +1 map, computed one degree block at a time.
fn graded_rank(src: &GradedModule, tgt: &GradedModule, m: &Matrix) -> usize {
    let tb = tgt.degree_blocks();
    src.degree_blocks()
        .iter()
        .map(|(d, cols)| {
            tb.get(&(d + 1))
                .map_or(0, |rows| m.select(rows, cols).rank())
        })
        .sum()
}

/// Cochain complex over GF(p); `d` has degree +1 and squares to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    module: GradedModule,
    d: Matrix,
}

impl CochainComplex {
    pub fn new(module: GradedModule, d: Matrix) -> Result<Self, AlgebraError> {
        check_grading(&module, &module, 1, &d)?;
        if !d.mul(&d).is_zero() {
            return Err(AlgebraError::NotDifferential);
        }
        Ok(Self { module, d })
    }

    /// Skips the grading and `d² = 0` checks.
    pub(crate) fn new_unchecked(module: GradedModule, d: Matrix) -> Self {
        Self { module, d }
    }

    /// The zero complex on `module`.
    pub fn with_zero_differential(field: PrimeField, module: GradedModule) -> Self {
        let n = module.dim();
        Self {
            module,
            d: Matrix::zeros(field, n, n),
        }
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn differential(&self) -> &Matrix {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn field(&self) -> PrimeField {
        self.d.field()
    }

    /// Homology dimension in every degree carried by the module.
    pub fn homology_ranks(&self) -> BTreeMap<i64, usize> {
        let blocks = self.module.degree_blocks();
        let block_rank = |from: i64| -> usize {
            match (blocks.get(&from), blocks.get(&(from + 1))) {
                (Some(cols), Some(rows)) => self.d.select(rows, cols).rank(),
                _ => 0,
            }
        };
        blocks
            .iter()
            .map(|(&k, idx)| (k, idx.len() - block_rank(k) - block_rank(k - 1)))
            .collect()
    }

    pub fn total_homology_rank(&self) -> usize {
        self.dim() - 2 * graded_rank(&self.module, &self.module, &self.d)
    }

    pub fn is_acyclic(&self) -> bool {
        self.total_homology_rank() == 0
    }
}

/// Checks that `f` is a degree 0 chain map `src -> tgt`.
pub fn check_chain_map(
    src: &CochainComplex,
    tgt: &CochainComplex,
    f: &Matrix,
) -> Result<(), AlgebraError> {
    check_grading(&src.module, &tgt.module, 0, f)?;
    if f.mul(&src.d) != tgt.d.mul(f) {
        return Err(AlgebraError::NotChainMap);
    }
    Ok(())
}

/// Degree 0 chain map with owned endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub source: CochainComplex,
    pub target: CochainComplex,
    pub matrix: Matrix,
}

impl ChainMap {
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        matrix: Matrix,
    ) -> Result<Self, AlgebraError> {
        check_chain_map(&source, &target, &matrix)?;
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let id = Matrix::identity(c.field(), c.dim());
        Self {
            source: c.clone(),
            target: c.clone(),
            matrix: id,
        }
    }

    pub fn cone(&self) -> CochainComplex {
        cone_unchecked(&self.source, &self.target, &self.matrix)
    }

    pub fn is_quasi_iso(&self) -> bool {
        cone_acyclic(&self.source, &self.target, &self.matrix)
    }
}

/// `src[1] ⊕ tgt` with differential `[[-d_src, 0], [f, d_tgt]]`; a source
/// element of degree `j` sits in degree `j - 1`.
pub fn cone(
    src: &CochainComplex,
    tgt: &CochainComplex,
    f: &Matrix,
) -> Result<CochainComplex, AlgebraError> {
    check_chain_map(src, tgt, f)?;
    Ok(cone_unchecked(src, tgt, f))
}

fn cone_unchecked(src: &CochainComplex, tgt: &CochainComplex, f: &Matrix) -> CochainComplex {
    let (a, b) = (src.dim(), tgt.dim());
    let module = GradedModule::direct_sum(&[("src", &src.module.shift(1)), ("tgt", &tgt.module)]);
    let mut d = Matrix::zeros(src.field(), a + b, a + b);
    d.set_block(0, 0, &src.d.neg());
    d.set_block(a, 0, f);
    d.set_block(a, a, &tgt.d);
    CochainComplex { module, d }
}

fn cone_acyclic(src: &CochainComplex, tgt: &CochainComplex, f: &Matrix) -> bool {
    if src.dim() == 0 && tgt.dim() == 0 {
        return true;
    }
    cone_unchecked(src, tgt, f).is_acyclic()
}

/// True iff `cone(f)` is acyclic.
pub fn is_quasi_iso(
    src: &CochainComplex,
    tgt: &CochainComplex,
    f: &Matrix,
) -> Result<bool, AlgebraError> {
    check_chain_map(src, tgt, f)?;
    Ok(cone_acyclic(src, tgt, f))
}

/// Commutative square `A -> B -> D`, `A -> C -> D`.
#[derive(Clone, Copy, Debug)]
pub struct CommutativeSquare<'a> {
    pub a: &'a CochainComplex,
    pub b: &'a CochainComplex,
    pub c: &'a CochainComplex,
    pub d: &'a CochainComplex,
    pub ab: &'a Matrix,
    pub ac: &'a Matrix,
    pub bd: &'a Matrix,
    pub cd: &'a Matrix,
}

/// Which parallel arrow into `D` carries the sign in the totalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignedBranch {
    BD,
    CD,
}

impl CommutativeSquare<'_> {
    pub fn check(&self) -> Result<(), AlgebraError> {
        check_chain_map(self.a, self.b, self.ab)?;
        check_chain_map(self.a, self.c, self.ac)?;
        check_chain_map(self.b, self.d, self.bd)?;
        check_chain_map(self.c, self.d, self.cd)?;
        if self.bd.mul(self.ab) != self.cd.mul(self.ac) {
            return Err(AlgebraError::NotCommutative);
        }
        Ok(())
    }
}

/// Čech totalization with columns `A | B ⊕ C | D`, the sign on the `B -> D`
/// arrow.
pub fn total_complex(sq: &CommutativeSquare<'_>) -> Result<CochainComplex, AlgebraError> {
    total_complex_with(sq, SignedBranch::BD)
}

pub fn total_complex_with(
    sq: &CommutativeSquare<'_>,
    branch: SignedBranch,
) -> Result<CochainComplex, AlgebraError> {
    sq.check()?;
    Ok(total_unchecked(sq, branch))
}

pub(crate) fn total_unchecked(sq: &CommutativeSquare<'_>, branch: SignedBranch) -> CochainComplex {
    let (na, nb, nc, nd) = (sq.a.dim(), sq.b.dim(), sq.c.dim(), sq.d.dim());
    let module = GradedModule::direct_sum(&[
        ("A", &sq.a.module),
        ("B", &sq.b.module.shift(-1)),
        ("C", &sq.c.module.shift(-1)),
        ("D", &sq.d.module.shift(-2)),
    ]);
    let (ob, oc, od) = (na, na + nb, na + nb + nc);
    let n = od + nd;
    let mut d = Matrix::zeros(sq.a.field(), n, n);
    d.set_block(0, 0, &sq.a.d);
    d.set_block(ob, ob, &sq.b.d.neg());
    d.set_block(oc, oc, &sq.c.d.neg());
    d.set_block(od, od, &sq.d.d);
    d.set_block(ob, 0, sq.ab);
    d.set_block(oc, 0, sq.ac);
    let (bd, cd) = match branch {
        SignedBranch::BD => (sq.bd.neg(), sq.cd.clone()),
        SignedBranch::CD => (sq.bd.clone(), sq.cd.neg()),
    };
    d.set_block(od, ob, &bd);
    d.set_block(od, oc, &cd);
    CochainComplex { module, d }
}
