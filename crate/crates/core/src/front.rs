//! Combinatorial fronts over a simplicial base complex.
//!
//! A front assigns to every simplex its fiber: the list of loci of the front
//! above the simplex, top to bottom. A locus is a single sheet, a block of
//! sheets whose fronts coincide (a crossing), a cusp point, or a cusp point
//! coincident with a transversal sheet. Sheet labels are global, so the face
//! inclusion of sheets is label identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::cobar::SimplexIndex;
use crate::homalg::{GradedLinearMap, GradedModule, Matrix, PrimeField};

#[derive(Debug, Error)]
pub enum FrontError {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("{face} is not a face of {coface}")]
    NotFace { face: String, coface: String },
    #[error("front failed validation with {} diagnostic(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
}

/// One validation finding, naming the offending cell and rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub cell: String,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.cell, self.message)
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CuspDecl {
    pub upper: String,
    pub lower: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFront {
    name: String,
    #[serde(default)]
    maslov: BTreeMap<String, i64>,
    #[serde(default)]
    cusps: BTreeMap<String, CuspDecl>,
    fibers: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Locus {
    /// One sheet, or a block of coincident sheets sorted by label.
    Sheets(Vec<String>),
    Cusp(String),
    CuspSheet {
        cusp: String,
        sheet: String,
    },
}

impl Locus {
    /// Codimension of the locus inside the front: sheet 0, crossing or cusp
    /// 1, triple point or cusp-sheet point 2.
    pub fn k(&self) -> usize {
        match self {
            Locus::Sheets(v) => v.len() - 1,
            Locus::Cusp(_) => 1,
            Locus::CuspSheet { .. } => 2,
        }
    }

    pub fn sheets(&self) -> Vec<&str> {
        match self {
            Locus::Sheets(v) => v.iter().map(String::as_str).collect(),
            Locus::Cusp(_) => Vec::new(),
            Locus::CuspSheet { sheet, .. } => vec![sheet.as_str()],
        }
    }

    pub fn cusp(&self) -> Option<&str> {
        match self {
            Locus::Cusp(c) | Locus::CuspSheet { cusp: c, .. } => Some(c),
            Locus::Sheets(_) => None,
        }
    }

    pub fn token(&self) -> String {
        match self {
            Locus::Sheets(v) => v.join("="),
            Locus::Cusp(c) => format!("@{c}"),
            Locus::CuspSheet { cusp, sheet } => format!("@{cusp}={sheet}"),
        }
    }

    fn parse(token: &str) -> Result<Locus, String> {
        let token = token.trim();
        if let Some(rest) = token.strip_prefix('@') {
            let parts: Vec<&str> = rest.split('=').map(str::trim).collect();
            if parts.iter().any(|p| p.is_empty()) {
                return Err(format!("malformed cusp token `{token}`"));
            }
            return match parts.as_slice() {
                [c] => Ok(Locus::Cusp(c.to_string())),
                [c, s] => Ok(Locus::CuspSheet {
                    cusp: c.to_string(),
                    sheet: s.to_string(),
                }),
                _ => Err(format!("cusp token `{token}` may carry at most one sheet")),
            };
        }
        let mut sheets: Vec<String> = token.split('=').map(|s| s.trim().to_string()).collect();
        if sheets.iter().any(|s| s.is_empty() || s.contains('@')) {
            return Err(format!("malformed sheet token `{token}`"));
        }
        sheets.sort();
        Ok(Locus::Sheets(sheets))
    }
}

/// Loci above a simplex, top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub loci: Vec<Locus>,
}

impl Fiber {
    /// Sheets in descending z, block-internal order by label.
    pub fn sheets(&self) -> Vec<&str> {
        self.loci.iter().flat_map(Locus::sheets).collect()
    }

    pub fn level_of_sheet(&self, label: &str) -> Option<usize> {
        self.loci.iter().position(|l| l.sheets().contains(&label))
    }

    pub fn level_of_cusp(&self, name: &str) -> Option<usize> {
        self.loci.iter().position(|l| l.cusp() == Some(name))
    }

    pub fn cusps(&self) -> Vec<&str> {
        self.loci.iter().filter_map(Locus::cusp).collect()
    }

    pub fn singularity_count(&self) -> usize {
        self.loci.iter().map(Locus::k).sum()
    }
}

/// A cusp component over a face pair: the branches of `cusp` present over the
/// coface but not over the face.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CuspPair {
    pub cusp: String,
    pub upper: String,
    pub lower: String,
}

#[derive(Default)]
struct Diags(BTreeSet<Diagnostic>);

impl Diags {
    fn push(&mut self, cell: &dyn fmt::Display, rule: &str, message: String) {
        self.0.insert(Diagnostic {
            cell: cell.to_string(),
            rule: rule.to_string(),
            message,
        });
    }
}

enum Arc {
    Crossing(String, String),
    Cusp(String),
}

impl Arc {
    fn carried_by(&self, fiber: &Fiber) -> bool {
        match self {
            Arc::Crossing(a, b) => fiber.loci.iter().any(|l| {
                let s = l.sheets();
                s.len() > 1 && s.contains(&a.as_str()) && s.contains(&b.as_str())
            }),
            Arc::Cusp(c) => fiber.level_of_cusp(c).is_some(),
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arc::Crossing(a, b) => write!(f, "crossing {a}={b}"),
            Arc::Cusp(c) => write!(f, "cusp {c}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrontComplex {
    name: String,
    maslov: BTreeMap<String, i64>,
    cusps: BTreeMap<String, CuspDecl>,
    fibers: BTreeMap<SimplexIndex, Fiber>,
    cells: Vec<SimplexIndex>,
}

fn parse_cell_key(key: &str) -> Result<SimplexIndex, String> {
    let verts: Result<Vec<usize>, _> = key.split_whitespace().map(str::parse::<usize>).collect();
    let verts = verts.map_err(|e| format!("cell key `{key}`: {e}"))?;
    SimplexIndex::new(verts).map_err(|e| format!("cell key `{key}`: {e}"))
}

impl FrontComplex {
    pub fn from_toml_str(text: &str) -> Result<Self, FrontError> {
        let raw: RawFront = toml::from_str(text).map_err(|e| FrontError::Parse {
            location: "front".into(),
            message: e.to_string(),
        })?;
        let mut fibers = BTreeMap::new();
        for (key, tokens) in &raw.fibers {
            let cell = parse_cell_key(key).map_err(|m| FrontError::Parse {
                location: format!("fibers.\"{key}\""),
                message: m,
            })?;
            let mut loci = Vec::new();
            for (i, t) in tokens.iter().enumerate() {
                let locus = Locus::parse(t).map_err(|m| FrontError::Parse {
                    location: format!("fibers.\"{key}\"[{i}]"),
                    message: m,
                })?;
                loci.push(locus);
            }
            if fibers.insert(cell, Fiber { loci }).is_some() {
                return Err(FrontError::Parse {
                    location: format!("fibers.\"{key}\""),
                    message: "duplicate cell".into(),
                });
            }
        }
        if fibers.is_empty() {
            return Err(FrontError::Parse {
                location: "fibers".into(),
                message: "no cells".into(),
            });
        }
        let mut cells: Vec<SimplexIndex> = fibers.keys().cloned().collect();
        cells.sort_by(|a, b| (a.dim(), a.vertices()).cmp(&(b.dim(), b.vertices())));
        Ok(Self {
            name: raw.name,
            maslov: raw.maslov,
            cusps: raw.cusps,
            fibers,
            cells,
        })
    }

    pub fn load(path: &Path) -> Result<Self, FrontError> {
        let text = std::fs::read_to_string(path).map_err(|e| FrontError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            FrontError::Parse { location, message } => FrontError::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    /// Parses and validates; diagnostics become an error.
    pub fn load_validated(path: &Path) -> Result<Self, FrontError> {
        let f = Self::load(path)?;
        f.ensure_valid()?;
        Ok(f)
    }

    pub fn ensure_valid(&self) -> Result<(), FrontError> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(FrontError::Invalid(diags))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Cells ordered by (dim, lex).
    pub fn cells(&self) -> &[SimplexIndex] {
        &self.cells
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &SimplexIndex> {
        self.cells.iter().filter(move |c| c.dim() == d)
    }

    pub fn base_dim(&self) -> usize {
        self.cells.iter().map(SimplexIndex::dim).max().unwrap_or(0)
    }

    pub fn contains(&self, cell: &SimplexIndex) -> bool {
        self.fibers.contains_key(cell)
    }

    pub fn fiber(&self, cell: &SimplexIndex) -> Result<&Fiber, FrontError> {
        self.fibers
            .get(cell)
            .ok_or_else(|| FrontError::UnknownCell(cell.to_string()))
    }

    pub fn maslov(&self) -> &BTreeMap<String, i64> {
        &self.maslov
    }

    pub fn mu(&self, sheet: &str) -> i64 {
        self.maslov[sheet]
    }

    pub fn cusp_decls(&self) -> &BTreeMap<String, CuspDecl> {
        &self.cusps
    }

    pub fn cusp_decl(&self, name: &str) -> &CuspDecl {
        &self.cusps[name]
    }

    /// Sheets of `Λ(e_I)` in descending z.
    pub fn sheets(&self, cell: &SimplexIndex) -> Result<Vec<String>, FrontError> {
        Ok(self
            .fiber(cell)?
            .sheets()
            .into_iter()
            .map(String::from)
            .collect())
    }

    /// Cofaces of `cell` present in the complex (excluding `cell`).
    pub fn cofaces(&self, cell: &SimplexIndex) -> Vec<SimplexIndex> {
        self.cells
            .iter()
            .filter(|c| *c != cell && cell.is_face_of(c))
            .cloned()
            .collect()
    }

    fn check_face(&self, face: &SimplexIndex, coface: &SimplexIndex) -> Result<(), FrontError> {
        self.fiber(face)?;
        self.fiber(coface)?;
        if !face.is_face_of(coface) {
            return Err(FrontError::NotFace {
                face: face.to_string(),
                coface: coface.to_string(),
            });
        }
        Ok(())
    }

    /// Cusp pairs of `coface` over `face`, i.e. a basis of `V_cusp`.
    pub fn cusp_pairs(
        &self,
        face: &SimplexIndex,
        coface: &SimplexIndex,
    ) -> Result<Vec<CuspPair>, FrontError> {
        self.check_face(face, coface)?;
        let lower = self.fiber(face)?;
        let upper_sheets: BTreeSet<&str> = self.fiber(coface)?.sheets().into_iter().collect();
        let mut out = Vec::new();
        for c in lower.cusps() {
            let decl = &self.cusps[c];
            if upper_sheets.contains(decl.upper.as_str())
                && upper_sheets.contains(decl.lower.as_str())
            {
                out.push(CuspPair {
                    cusp: c.to_string(),
                    upper: decl.upper.clone(),
                    lower: decl.lower.clone(),
                });
            }
        }
        Ok(out)
    }

    /// `V(e_I)`: sheets in descending z with degree `-μ`.
    pub fn v_module(&self, cell: &SimplexIndex) -> Result<GradedModule, FrontError> {
        let sheets = self.sheets(cell)?;
        let degrees = sheets.iter().map(|s| -self.mu(s)).collect();
        Ok(GradedModule::new(sheets, degrees).expect("sheet labels are distinct in a valid front"))
    }

    /// `p: V(e_J) → V(e_I)` for `e_I ≤ e_J`; cusp branches go to zero.
    pub fn projection_p(
        &self,
        face: &SimplexIndex,
        coface: &SimplexIndex,
        field: PrimeField,
    ) -> Result<GradedLinearMap, FrontError> {
        self.check_face(face, coface)?;
        let src = self.v_module(coface)?;
        let tgt = self.v_module(face)?;
        let mut m = Matrix::zeros(field, tgt.dim(), src.dim());
        for (c, label) in src.labels().iter().enumerate() {
            if let Some(r) = tgt.index_of(label) {
                m.set(r, c, 1);
            }
        }
        Ok(GradedLinearMap::new(src, tgt, 0, m).expect("projection preserves degree"))
    }

    /// For `face ≤ coface`, the level in the face fiber that each locus of the
    /// coface fiber limits to.
    pub fn limit_map(
        &self,
        face: &SimplexIndex,
        coface: &SimplexIndex,
    ) -> Result<Vec<usize>, String> {
        let f = self
            .fibers
            .get(face)
            .ok_or_else(|| format!("unknown cell {face}"))?;
        let e = self
            .fibers
            .get(coface)
            .ok_or_else(|| format!("unknown cell {coface}"))?;
        let branch_level = |s: &str| -> Option<usize> {
            f.cusps()
                .into_iter()
                .find(|c| {
                    self.cusps
                        .get(*c)
                        .is_some_and(|d| d.upper == s || d.lower == s)
                })
                .and_then(|c| f.level_of_cusp(c))
        };
        let mut out = Vec::with_capacity(e.loci.len());
        for locus in &e.loci {
            let target =
                match locus {
                    Locus::Cusp(c) => f
                        .level_of_cusp(c)
                        .ok_or_else(|| format!("cusp {c} of {coface} does not reach {face}"))?,
                    _ => {
                        let mut levels = BTreeSet::new();
                        for s in locus.sheets() {
                            let lvl = f.level_of_sheet(s).or_else(|| branch_level(s)).ok_or_else(
                                || format!("sheet {s} of {coface} has no limit over {face}"),
                            )?;
                            levels.insert(lvl);
                        }
                        if let Some(c) = locus.cusp() {
                            levels.insert(f.level_of_cusp(c).ok_or_else(|| {
                                format!("cusp {c} of {coface} does not reach {face}")
                            })?);
                        }
                        if levels.len() != 1 {
                            return Err(format!(
                                "locus {} of {coface} splits over {face}",
                                locus.token()
                            ));
                        }
                        *levels.iter().next().unwrap()
                    }
                };
            out.push(target);
        }
        Ok(out)
    }

    /// Every violated rule, sorted; empty iff the front is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Diags::default();
        let n = self.base_dim();

        for (name, decl) in &self.cusps {
            let cell = format!("cusp {name}");
            for s in [&decl.upper, &decl.lower] {
                if !self.maslov.contains_key(s) {
                    out.push(
                        &cell,
                        "undeclared label",
                        format!("branch {s} has no Maslov potential"),
                    );
                }
            }
            if decl.upper == decl.lower {
                out.push(
                    &cell,
                    "cusp declaration",
                    "upper and lower branch coincide".into(),
                );
            } else if let (Some(u), Some(l)) =
                (self.maslov.get(&decl.upper), self.maslov.get(&decl.lower))
            {
                if *u != l + 1 {
                    out.push(
                        &cell,
                        "Maslov step",
                        format!(
                            "μ({}) = {u} but μ({}) + 1 = {}",
                            decl.upper,
                            decl.lower,
                            l + 1
                        ),
                    );
                }
            }
        }
        if self.cusps.iter().any(|(_, d)| {
            !self.maslov.contains_key(&d.upper) || !self.maslov.contains_key(&d.lower)
        }) {
            return out.0.into_iter().collect();
        }

        let mut fibers_ok = true;
        for cell in &self.cells {
            let fiber = &self.fibers[cell];
            for face in cell.faces() {
                if !self.fibers.contains_key(&face) {
                    out.push(cell, "face closure", format!("face {face} is missing"));
                }
            }
            let mut seen = BTreeSet::new();
            for s in fiber.sheets() {
                if !self.maslov.contains_key(s) {
                    out.push(
                        cell,
                        "undeclared label",
                        format!("sheet {s} has no Maslov potential"),
                    );
                    fibers_ok = false;
                }
                if !seen.insert(s) {
                    out.push(cell, "duplicate sheet", format!("sheet {s} listed twice"));
                    fibers_ok = false;
                }
            }
            let mut cusps_seen = BTreeSet::new();
            for c in fiber.cusps() {
                match self.cusps.get(c) {
                    None => {
                        out.push(cell, "undeclared cusp", format!("cusp {c} is not declared"));
                        fibers_ok = false;
                    }
                    Some(d) => {
                        if seen.contains(d.upper.as_str()) || seen.contains(d.lower.as_str()) {
                            out.push(
                                cell,
                                "cusp branch order",
                                format!("cusp {c} coexists with its own branches"),
                            );
                        }
                    }
                }
                if !cusps_seen.insert(c) {
                    out.push(cell, "duplicate sheet", format!("cusp {c} listed twice"));
                    fibers_ok = false;
                }
            }
            for locus in &fiber.loci {
                if let Locus::Sheets(v) = locus {
                    if v.len() > 3 {
                        out.push(
                            cell,
                            "block size",
                            format!("block {} has more than three sheets", locus.token()),
                        );
                    }
                }
            }
            let count = fiber.singularity_count();
            let allowed = n - cell.dim();
            if count > allowed {
                let rule = if cell.dim() == 1 && n == 2 {
                    "edge singularity count"
                } else {
                    "singularity count"
                };
                out.push(
                    cell,
                    rule,
                    format!("singular content {count} exceeds codimension {allowed}"),
                );
            }
        }
        if !fibers_ok {
            return out.0.into_iter().collect();
        }

        for coface in &self.cells {
            let e = &self.fibers[coface];
            for face in coface.faces() {
                if &face == coface || !self.fibers.contains_key(&face) {
                    continue;
                }
                let f = &self.fibers[&face];
                let pair = format!("{face} < {coface}");
                let e_sheets: BTreeSet<&str> = e.sheets().into_iter().collect();
                let f_sheets: BTreeSet<&str> = f.sheets().into_iter().collect();
                for s in f_sheets.difference(&e_sheets) {
                    out.push(
                        &pair,
                        "face sheets",
                        format!("sheet {s} does not continue into the coface"),
                    );
                }
                for c in e.cusps() {
                    if f.level_of_cusp(c).is_none() {
                        out.push(
                            &pair,
                            "coface cusps",
                            format!("cusp {c} does not reach the face"),
                        );
                    }
                }
                let pairs = self.cusp_pairs(&face, coface).unwrap_or_default();
                let mut covered: BTreeSet<&str> = BTreeSet::new();
                for p in &pairs {
                    covered.insert(&p.upper);
                    covered.insert(&p.lower);
                    let (lu, ll) = (
                        e.level_of_sheet(&p.upper).unwrap(),
                        e.level_of_sheet(&p.lower).unwrap(),
                    );
                    if lu >= ll {
                        out.push(
                            &pair,
                            "cusp branch order",
                            format!("branch {} is not above {}", p.upper, p.lower),
                        );
                        continue;
                    }
                    let at_cusp = &f.loci[f.level_of_cusp(&p.cusp).unwrap()];
                    for between in &e.loci[lu + 1..ll] {
                        let ok = face.dim() == 0
                            && matches!(at_cusp, Locus::CuspSheet { sheet, .. } if between.sheets() == vec![sheet.as_str()]);
                        if !ok {
                            out.push(
                                &pair,
                                "sheet between cusp branches",
                                format!(
                                    "{} lies between the branches of cusp {}",
                                    between.token(),
                                    p.cusp
                                ),
                            );
                        }
                    }
                }
                for s in e_sheets.difference(&f_sheets) {
                    if !covered.contains(s) {
                        out.push(
                            &pair,
                            "cusp pairs",
                            format!("sheet {s} is neither a face sheet nor a cusp branch"),
                        );
                    }
                }
                match self.limit_map(&face, coface) {
                    Err(m) => out.push(&pair, "order compatibility", m),
                    Ok(lim) => {
                        if lim.windows(2).any(|w| w[0] > w[1]) {
                            out.push(
                                &pair,
                                "order compatibility",
                                "limits of the coface loci are not monotone".into(),
                            );
                        }
                    }
                }
            }
        }

        if n == 2 {
            self.validate_surface(&mut out);
        }
        out.0.into_iter().collect()
    }

    fn validate_surface(&self, out: &mut Diags) {
        let triangles: Vec<&SimplexIndex> = self.cells_of_dim(2).collect();
        for cell in &self.cells {
            if cell.dim() < 2 && !triangles.iter().any(|t| cell.is_face_of(t)) {
                out.push(cell, "pure dimension", "cell lies in no triangle".into());
            }
        }
        for edge in self.cells_of_dim(1) {
            let k = triangles.iter().filter(|t| edge.is_face_of(t)).count();
            if !(1..=2).contains(&k) {
                out.push(edge, "disk star", format!("edge lies in {k} triangles"));
            }
        }
        for v in self.cells_of_dim(0) {
            let Some(boundary) = self.vertex_is_boundary(v) else {
                out.push(
                    v,
                    "disk star",
                    "vertex link is neither a path nor a cycle".into(),
                );
                continue;
            };
            let fiber = &self.fibers[v];
            let edges: Vec<&SimplexIndex> =
                self.cells_of_dim(1).filter(|e| v.is_face_of(e)).collect();
            let mut arcs: Vec<Arc> = Vec::new();
            for locus in &fiber.loci {
                if let Locus::Sheets(v) = locus {
                    for i in 0..v.len() {
                        for j in i + 1..v.len() {
                            arcs.push(Arc::Crossing(v[i].clone(), v[j].clone()));
                        }
                    }
                }
                if let Some(c) = locus.cusp() {
                    arcs.push(Arc::Cusp(c.to_string()));
                }
            }
            for arc in arcs {
                let k = edges
                    .iter()
                    .filter(|e| arc.carried_by(&self.fibers[*e]))
                    .count();
                let ok = if boundary {
                    (1..=2).contains(&k)
                } else {
                    k == 2
                };
                if !ok {
                    out.push(
                        v,
                        "arc continuation",
                        format!("{arc} continues along {k} edges"),
                    );
                }
            }
        }
    }

    /// `Some(true)` for a path link, `Some(false)` for a cycle link, `None`
    /// otherwise.
    fn vertex_is_boundary(&self, v: &SimplexIndex) -> Option<bool> {
        let vv = v.vertices()[0];
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in self.cells_of_dim(2).filter(|t| v.is_face_of(t)) {
            let rest: Vec<usize> = t.vertices().iter().copied().filter(|&x| x != vv).collect();
            adj.entry(rest[0]).or_default().push(rest[1]);
            adj.entry(rest[1]).or_default().push(rest[0]);
        }
        if adj.is_empty() || adj.values().any(|n| n.len() > 2) {
            return None;
        }
        let start = *adj
            .iter()
            .find(|(_, n)| n.len() == 1)
            .map(|(k, _)| k)
            .unwrap_or(adj.keys().next().unwrap());
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != adj.len() {
            return None;
        }
        let ends = adj.values().filter(|n| n.len() == 1).count();
        match ends {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_TRIANGLE: &str = r#"
name = "t"
[maslov]
A = 0
[fibers]
"0" = ["A"]
"1" = ["A"]
"2" = ["A"]
"0 1" = ["A"]
"0 2" = ["A"]
"1 2" = ["A"]
"0 1 2" = ["A"]
"#;

    fn gf2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    #[test]
    fn one_sheet_is_valid() {
        let f = FrontComplex::from_toml_str(ONE_TRIANGLE).unwrap();
        assert_eq!(f.validate(), vec![]);
        let v = f.v_module(&SimplexIndex::of(&[0, 1])).unwrap();
        assert_eq!(v.dim(), 1);
        assert_eq!(v.degree(0), 0);
    }

    #[test]
    fn maslov_step_is_enforced() {
        let text = r#"
name = "bad"
[maslov]
U = 0
L = 0
[cusps.c]
upper = "U"
lower = "L"
[fibers]
"0" = ["@c"]
"#;
        let f = FrontComplex::from_toml_str(text).unwrap();
        assert!(f.validate().iter().any(|d| d.rule == "Maslov step"));
    }

    #[test]
    fn two_crossings_over_an_edge_are_rejected() {
        let text = r#"
name = "bad"
[maslov]
A = 0
B = 0
C = 0
D = 0
[fibers]
"0" = ["A=B", "C=D"]
"1" = ["A=B", "C=D"]
"2" = ["A", "B", "C", "D"]
"0 1" = ["A=B", "C=D"]
"0 2" = ["A", "B", "C", "D"]
"1 2" = ["A", "B", "C", "D"]
"0 1 2" = ["A", "B", "C", "D"]
"#;
        let f = FrontComplex::from_toml_str(text).unwrap();
        let diags = f.validate();
        assert!(
            diags
                .iter()
                .any(|d| d.rule == "edge singularity count" && d.cell == "0 1"),
            "{diags:?}"
        );
    }

    #[test]
    fn missing_face_is_reported() {
        let text = ONE_TRIANGLE.replace("\"1 2\" = [\"A\"]\n", "");
        let f = FrontComplex::from_toml_str(&text).unwrap();
        assert!(f.validate().iter().any(|d| d.rule == "face closure"));
    }

    #[test]
    fn parse_errors_carry_locations() {
        let text = ONE_TRIANGLE.replace("\"0 1\" = [\"A\"]", "\"0 1\" = [\"A=\"]");
        match FrontComplex::from_toml_str(&text) {
            Err(FrontError::Parse { location, .. }) => assert_eq!(location, "fibers.\"0 1\"[0]"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            FrontComplex::from_toml_str("name = 3"),
            Err(FrontError::Parse { .. })
        ));
        let bad_key = ONE_TRIANGLE.replace("\"0 1 2\"", "\"2 1\"");
        assert!(matches!(
            FrontComplex::from_toml_str(&bad_key),
            Err(FrontError::Parse { .. })
        ));
    }

    #[test]
    fn projection_is_relabeling_without_cusps() {
        let f = FrontComplex::from_toml_str(ONE_TRIANGLE).unwrap();
        let p = f
            .projection_p(&SimplexIndex::of(&[0]), &SimplexIndex::of(&[0, 1]), gf2())
            .unwrap();
        assert_eq!(p.matrix.to_signed_rows(), vec![vec![1]]);
        assert!(matches!(
            f.projection_p(
                &SimplexIndex::of(&[0, 1]),
                &SimplexIndex::of(&[1, 2]),
                gf2()
            ),
            Err(FrontError::NotFace { .. })
        ));
    }

    #[test]
    fn order_violation_is_reported() {
        let text = r#"
name = "bad"
[maslov]
A = 0
B = 0
[fibers]
"0" = ["A", "B"]
"1" = ["B", "A"]
"0 1" = ["A", "B"]
"#;
        let f = FrontComplex::from_toml_str(text).unwrap();
        assert!(f
            .validate()
            .iter()
            .any(|d| d.rule == "order compatibility" && d.cell == "1 < 0 1"));
    }
}
