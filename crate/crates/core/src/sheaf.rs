//! The combinatorial sheaf `F(C) = Map ∘ G(C)` of a chain homotopy diagram,
//! and checks of the conditions it has to satisfy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::chd::{boundary_extend, CHD};
use crate::cobar::SimplexIndex;
use crate::front::FrontError;
use crate::homalg::{
    cone, is_quasi_iso, total_complex, CochainComplex, CommutativeSquare, GradedModule, Matrix,
    PrimeField,
};
use crate::simplex::{
    cylinder_layout, cylinder_unchecked, mapping_cylinder, validate_diagram, SimplexDiagram,
};
use crate::strat::{Slot, StratPoset, StratumType};

#[derive(Debug, Error)]
pub enum SheafError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error("stratum {stratum}: {message}")]
    Stratum { stratum: usize, message: String },
    #[error("missing CHD map on {0}")]
    MissingMap(String),
    #[error("no edge {0} -> {1}")]
    NotAnEdge(usize, usize),
    #[error("stratum {0} is not a Legendrian 2-stratum with a region above")]
    NotLegendrian(usize),
    #[error("not implemented: {0}")]
    NotImplemented(String),
}

fn at(stratum: usize, message: impl Into<String>) -> SheafError {
    SheafError::Stratum {
        stratum,
        message: message.into(),
    }
}

/// `X(s) = Y(s) ⊕ Z(s)`: sheets of `Λ(e_J)` strictly below `s`, then the
/// cusp components `s` is exceptional for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreliminaryModule {
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub module: GradedModule,
}

impl PreliminaryModule {
    pub fn dim(&self) -> usize {
        self.y.len() + self.z.len()
    }

    fn y_index(&self, sheet: &str) -> Option<usize> {
        self.y.iter().position(|t| t == sheet)
    }
}

/// Basis label of `v_C` in `X(s)`.
pub fn cusp_label(cusp: &str) -> String {
    format!("v[{cusp}]")
}

pub fn preliminary_x(poset: &StratPoset, s: usize) -> Result<PreliminaryModule, SheafError> {
    let front = poset.front();
    let st = poset.stratum(s);
    let j = &st.handle.upper;
    let sheets = front.sheets(j)?;
    let mut y: Option<Vec<String>> = None;
    for (carrier, slot) in poset.pieces(s) {
        let fiber = front.fiber(carrier)?;
        let mut here = Vec::new();
        for t in &sheets {
            let lvl = fiber
                .level_of_sheet(t)
                .ok_or_else(|| at(s, format!("sheet {t} of {j} missing over {carrier}")))?;
            let below = match slot {
                Slot::Gap(i) => lvl >= i,
                Slot::Point(i) => lvl > i,
            };
            if below {
                here.push(t.clone());
            }
        }
        match &y {
            None => y = Some(here),
            Some(prev) if *prev != here => {
                return Err(at(
                    s,
                    format!("sheets below differ over {carrier}: {prev:?} vs {here:?}"),
                ))
            }
            _ => {}
        }
    }
    let y = y.unwrap_or_default();
    let mut z = Vec::new();
    for c in front.fiber(j)?.cusps() {
        let decl = front.cusp_decl(c);
        let exceptional = poset.pieces(s).all(|(carrier, slot)| {
            let fiber = front.fiber(carrier).expect("carrier in front");
            match (
                fiber.level_of_sheet(&decl.upper),
                fiber.level_of_sheet(&decl.lower),
            ) {
                (Some(u), Some(l)) => match slot {
                    Slot::Gap(i) => u < i && i <= l,
                    Slot::Point(i) => u <= i && i < l,
                },
                _ => false,
            }
        });
        if exceptional {
            z.push(c.to_string());
        }
    }
    if z.len() > 1 {
        return Err(at(
            s,
            format!("exceptional for several cusp components {z:?}"),
        ));
    }
    let mut labels = y.clone();
    let mut degrees: Vec<i64> = y.iter().map(|t| -front.mu(t)).collect();
    for c in &z {
        labels.push(cusp_label(c));
        degrees.push(-front.mu(&front.cusp_decl(c).lower));
    }
    let module = GradedModule::new(labels, degrees).map_err(|e| at(s, e.to_string()))?;
    Ok(PreliminaryModule { y, z, module })
}

/// `X(s → t) = (p, k + ℓ)` with its three components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerizationMap {
    pub p: Matrix,
    pub k: Matrix,
    pub l: Matrix,
}

impl GenerizationMap {
    /// The block matrix `[[p, 0], [k, ℓ]]`.
    pub fn matrix(&self) -> Matrix {
        let f = self.p.field();
        let (ys, zs) = (self.p.cols(), self.l.cols());
        let (yt, zt) = (self.p.rows(), self.l.rows());
        let mut m = Matrix::zeros(f, yt + zt, ys + zs);
        m.set_block(0, 0, &self.p);
        m.set_block(yt, 0, &self.k);
        m.set_block(yt, ys, &self.l);
        m
    }

    pub fn compose(&self, after: &GenerizationMap) -> GenerizationMap {
        GenerizationMap {
            p: after.p.mul(&self.p),
            k: after.k.mul(&self.p).add(&after.l.mul(&self.k)),
            l: after.l.mul(&self.l),
        }
    }
}

pub fn preliminary_map(
    poset: &StratPoset,
    field: PrimeField,
    s: usize,
    t: usize,
    xs: &PreliminaryModule,
    xt: &PreliminaryModule,
) -> Result<GenerizationMap, SheafError> {
    if poset.classify_edge(s, t).is_none() && s != t {
        return Err(SheafError::NotAnEdge(s, t));
    }
    let front = poset.front();
    let j_t = &poset.stratum(t).handle.upper;
    let sheets_t: BTreeSet<String> = front.sheets(j_t)?.into_iter().collect();
    let mut p = Matrix::zeros(field, xt.y.len(), xs.y.len());
    let mut k = Matrix::zeros(field, xt.z.len(), xs.y.len());
    let mut l = Matrix::zeros(field, xt.z.len(), xs.z.len());
    for (c, sheet) in xs.y.iter().enumerate() {
        if sheets_t.contains(sheet) {
            let r = xt
                .y_index(sheet)
                .ok_or_else(|| at(s, format!("sheet {sheet} below {s} but not below {t}")))?;
            p.set(r, c, 1);
        }
        for (r, cusp) in xt.z.iter().enumerate() {
            if front.cusp_decl(cusp).lower == *sheet {
                k.set(r, c, 1);
            }
        }
    }
    for (c, cusp) in xs.z.iter().enumerate() {
        if let Some(r) = xt.z.iter().position(|x| x == cusp) {
            l.set(r, c, 1);
        }
    }
    Ok(GenerizationMap { p, k, l })
}

/// The functor `X` on a stratification.
#[derive(Clone, Debug)]
pub struct XFunctor {
    modules: Vec<PreliminaryModule>,
    maps: BTreeMap<(usize, usize), GenerizationMap>,
}

impl XFunctor {
    pub fn build(poset: &StratPoset, field: PrimeField) -> Result<Self, SheafError> {
        let modules = (0..poset.len())
            .map(|s| preliminary_x(poset, s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut maps = BTreeMap::new();
        for &(s, t) in poset.edges().keys() {
            maps.insert(
                (s, t),
                preliminary_map(poset, field, s, t, &modules[s], &modules[t])?,
            );
        }
        Ok(Self { modules, maps })
    }

    pub fn module(&self, s: usize) -> &PreliminaryModule {
        &self.modules[s]
    }

    pub fn map(&self, s: usize, t: usize) -> Option<&GenerizationMap> {
        self.maps.get(&(s, t))
    }

    pub fn map_mut(&mut self, s: usize, t: usize) -> Option<&mut GenerizationMap> {
        self.maps.get_mut(&(s, t))
    }

    /// Composable triples `s < t < u` where one of the three component
    /// identities fails.
    pub fn functor_failures(&self, poset: &StratPoset) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (&(s, t), first) in &self.maps {
            for &u in poset.above(t) {
                let direct = &self.maps[&(s, u)];
                if first.compose(&self.maps[&(t, u)]) != *direct {
                    out.push((s, t, u));
                }
            }
        }
        out
    }
}

/// `X` satisfies the composition identities for `p`, `k` and `ℓ`.
pub fn check_x_functor(poset: &StratPoset, field: PrimeField) -> Result<bool, SheafError> {
    Ok(XFunctor::build(poset, field)?
        .functor_failures(poset)
        .is_empty())
}

/// `G(C)(s) = (closure(e_I), X(s), {α_F ⊕ β_F})`, with shape and degrees
/// checked but not the face identity.
pub fn g_of(
    poset: &StratPoset,
    chd: &CHD,
    s: usize,
    x: &PreliminaryModule,
) -> Result<SimplexDiagram, SheafError> {
    let front = poset.front();
    let field = chd.field();
    let h = &poset.stratum(s).handle;
    let sheets = front.sheets(&h.upper)?;
    let idx: Vec<usize> =
        x.y.iter()
            .map(|t| sheets.iter().position(|u| u == t).expect("Y(s) ⊂ V(e_J)"))
            .collect();
    let n = x.dim();
    let mut maps = BTreeMap::new();
    for face in h.lower.faces() {
        let c = chd
            .map(&face)
            .ok_or_else(|| SheafError::MissingMap(face.to_string()))?;
        let big = boundary_extend(front, field, &face, &h.upper, c)?;
        if big.rows() != sheets.len() || big.cols() != sheets.len() {
            return Err(at(s, format!("map on {face} has the wrong shape")));
        }
        for &col in &idx {
            for r in 0..sheets.len() {
                if big.get(r, col) != 0 && !idx.contains(&r) {
                    return Err(at(
                        s,
                        format!("c_J({face}) leaves Y(s): {} -> {}", sheets[col], sheets[r]),
                    ));
                }
            }
        }
        let mut a = Matrix::zeros(field, n, n);
        a.set_block(0, 0, &big.select(&idx, &idx));
        if face.dim() == 1 {
            for i in x.y.len()..n {
                a.set(i, i, 1);
            }
        }
        maps.insert(face, a);
    }
    SimplexDiagram::new(field, h.lower.clone(), x.module.clone(), maps)
        .map_err(|e| at(s, e.to_string()))
}

/// `Map(G(s → t))` for diagrams on `I ≤ I'`.
fn cylinder_matrix(src: &SimplexDiagram, tgt: &SimplexDiagram, phi: &Matrix) -> Matrix {
    let (a, b) = (src.module().dim(), tgt.module().dim());
    let sl = cylinder_layout(src.simplex(), a);
    let tl = cylinder_layout(tgt.simplex(), b);
    let mut out = Matrix::zeros(phi.field(), b * tl.len(), a * sl.len());
    for (face, &c0) in &sl {
        out.set_block(tl[face], c0, phi);
    }
    out
}

/// Nonzero entries by row.
type Sparse = Vec<Vec<(usize, u32)>>;

fn sparse(m: &Matrix) -> Sparse {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .filter_map(|c| Some((c, m.get(r, c))).filter(|e| e.1 != 0))
                .collect()
        })
        .collect()
}

fn sparse_mul(a: &[Vec<(usize, u32)>], b: &[Vec<(usize, u32)>], f: PrimeField) -> Sparse {
    a.iter()
        .map(|row| {
            let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
            for &(k, x) in row {
                for &(c, y) in &b[k] {
                    let e = acc.entry(c).or_insert(0);
                    *e = f.add(*e, f.mul(x, y));
                }
            }
            acc.into_iter().filter(|e| e.1 != 0).collect()
        })
        .collect()
}

/// `F(C)`: a cochain complex per stratum and a chain map per relation.
#[derive(Clone, Debug)]
pub struct SheafFunctor<'a> {
    poset: &'a StratPoset,
    field: PrimeField,
    x: XFunctor,
    diagrams: Vec<SimplexDiagram>,
    /// Strata whose `G(s)` fails a face identity.
    broken: BTreeSet<usize>,
    complexes: Vec<CochainComplex>,
    maps: BTreeMap<(usize, usize), Matrix>,
}

pub fn build_sheaf<'a>(poset: &'a StratPoset, chd: &CHD) -> Result<SheafFunctor<'a>, SheafError> {
    let field = chd.field();
    let x = XFunctor::build(poset, field)?;
    let mut diagrams = Vec::with_capacity(poset.len());
    let mut broken = BTreeSet::new();
    let mut complexes = Vec::with_capacity(poset.len());
    for s in 0..poset.len() {
        let d = g_of(poset, chd, s, x.module(s))?;
        let complex = match mapping_cylinder(&d) {
            Ok(cyl) if validate_diagram(&d).is_empty() => cyl.into_complex(),
            _ => {
                broken.insert(s);
                cylinder_unchecked(&d).into_complex()
            }
        };
        diagrams.push(d);
        complexes.push(complex);
    }
    let mut maps = BTreeMap::new();
    for &(s, t) in poset.edges().keys() {
        let phi = x.map(s, t).expect("edge map").matrix();
        maps.insert((s, t), cylinder_matrix(&diagrams[s], &diagrams[t], &phi));
    }
    Ok(SheafFunctor {
        poset,
        field,
        x,
        diagrams,
        broken,
        complexes,
        maps,
    })
}

/// Only rank 1 is built from augmentations here.
pub fn build_sheaf_of_rank<'a>(
    poset: &'a StratPoset,
    chd: &CHD,
    rank: usize,
) -> Result<SheafFunctor<'a>, SheafError> {
    if rank != 1 {
        return Err(SheafError::NotImplemented(format!(
            "sheaves of microlocal rank {rank}"
        )));
    }
    build_sheaf(poset, chd)
}

impl<'a> SheafFunctor<'a> {
    /// The zero functor on `poset`.
    pub fn zero(poset: &'a StratPoset, field: PrimeField) -> Self {
        let empty = PreliminaryModule {
            y: Vec::new(),
            z: Vec::new(),
            module: GradedModule::zero(),
        };
        let modules = vec![empty.clone(); poset.len()];
        let zero_map = GenerizationMap {
            p: Matrix::zeros(field, 0, 0),
            k: Matrix::zeros(field, 0, 0),
            l: Matrix::zeros(field, 0, 0),
        };
        let xmaps = poset
            .edges()
            .keys()
            .map(|&e| (e, zero_map.clone()))
            .collect();
        let diagrams: Vec<SimplexDiagram> = (0..poset.len())
            .map(|s| {
                let simplex = poset.stratum(s).handle.lower.clone();
                let maps = simplex
                    .faces()
                    .into_iter()
                    .map(|f| (f, Matrix::zeros(field, 0, 0)))
                    .collect();
                SimplexDiagram::new(field, simplex, GradedModule::zero(), maps)
                    .expect("zero diagram")
            })
            .collect();
        let complexes =
            vec![CochainComplex::with_zero_differential(field, GradedModule::zero()); poset.len()];
        let maps = poset
            .edges()
            .keys()
            .map(|&e| (e, Matrix::zeros(field, 0, 0)))
            .collect();
        Self {
            poset,
            field,
            x: XFunctor {
                modules,
                maps: xmaps,
            },
            diagrams,
            broken: BTreeSet::new(),
            complexes,
            maps,
        }
    }

    pub fn poset(&self) -> &StratPoset {
        self.poset
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn x(&self) -> &XFunctor {
        &self.x
    }

    pub fn diagram(&self, s: usize) -> &SimplexDiagram {
        &self.diagrams[s]
    }

    pub fn complex(&self, s: usize) -> &CochainComplex {
        &self.complexes[s]
    }

    /// `F(s → t)`.
    pub fn map(&self, s: usize, t: usize) -> Option<&Matrix> {
        self.maps.get(&(s, t))
    }

    pub fn is_broken(&self, s: usize) -> bool {
        self.broken.contains(&s)
    }

    fn quasi_iso(&self, s: usize, t: usize) -> Result<bool, String> {
        if self.is_broken(s) || self.is_broken(t) {
            return Err("simplex diagram invalid".into());
        }
        is_quasi_iso(&self.complexes[s], &self.complexes[t], &self.maps[&(s, t)])
            .map_err(|e| e.to_string())
    }

    /// Whether `G(s → t)` commutes with every face map of `G(s)`.
    pub fn is_morphism(&self, s: usize, t: usize) -> bool {
        let phi = self.x.map(s, t).expect("edge").matrix();
        let (ds, dt) = (&self.diagrams[s], &self.diagrams[t]);
        ds.simplex()
            .faces()
            .iter()
            .all(|f| phi.mul(ds.face_map(f).unwrap()) == dt.face_map(f).unwrap().mul(&phi))
    }

    /// Composable triples where `F(t → u) ∘ F(s → t) ≠ F(s → u)`.
    pub fn functor_failures(&self) -> Vec<(usize, usize, usize)> {
        let sp: BTreeMap<(usize, usize), Sparse> =
            self.maps.iter().map(|(&e, m)| (e, sparse(m))).collect();
        let mut out = Vec::new();
        for (&(s, t), first) in &sp {
            for &u in self.poset.above(t) {
                if sparse_mul(&sp[&(t, u)], first, self.field) != sp[&(s, u)] {
                    out.push((s, t, u));
                }
            }
        }
        out
    }

    fn square_acyclic(&self, a: usize, b: usize, c: usize, d: usize) -> Result<bool, String> {
        if [a, b, c, d].iter().any(|&s| self.is_broken(s)) {
            return Err("simplex diagram invalid".into());
        }
        let cx = &self.complexes;
        let sq = CommutativeSquare {
            a: &cx[a],
            b: &cx[b],
            c: &cx[c],
            d: &cx[d],
            ab: &self.maps[&(a, b)],
            ac: &self.maps[&(a, c)],
            bd: &self.maps[&(b, d)],
            cd: &self.maps[&(c, d)],
        };
        Ok(total_complex(&sq).map_err(|e| e.to_string())?.is_acyclic())
    }

    /// The bijection/kernel description of a same-`Λ^F` map: `Y₁ ≅ Y(t)`,
    /// `Z(s) ≅ Z_D`, `Y₃ ≅ Z_C`, kernel `Y₂` paired by the vertex map.
    fn same_lambda_structure(&self, s: usize, t: usize) -> Result<(), String> {
        let front = self.poset.front();
        let (hs, ht) = (&self.poset.stratum(s).handle, &self.poset.stratum(t).handle);
        let (xs, xt) = (self.x.module(s), self.x.module(t));
        let sheets_t: BTreeSet<String> = front
            .sheets(&ht.upper)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        let y1: Vec<&String> = xs.y.iter().filter(|y| sheets_t.contains(*y)).collect();
        if y1.len() != xt.y.len() || y1.iter().any(|y| xt.y_index(y).is_none()) {
            return Err("Y1 is not carried onto Y(t)".into());
        }
        let pairs = front
            .cusp_pairs(&ht.upper, &hs.upper)
            .map_err(|e| e.to_string())?;
        let cusps_s: BTreeSet<&str> = front
            .fiber(&hs.upper)
            .map_err(|e| e.to_string())?
            .cusps()
            .into_iter()
            .collect();
        let z_d: Vec<&String> =
            xt.z.iter()
                .filter(|c| cusps_s.contains(c.as_str()))
                .collect();
        let z_c: BTreeSet<&String> =
            xt.z.iter()
                .filter(|c| !cusps_s.contains(c.as_str()))
                .collect();
        if xs.z.iter().collect::<Vec<_>>() != z_d {
            return Err("Z(s) is not carried onto Z_D".into());
        }
        let mut y2 = BTreeSet::new();
        let mut y3 = BTreeSet::new();
        for pair in &pairs {
            match (
                xs.y_index(&pair.upper).is_some(),
                xs.y_index(&pair.lower).is_some(),
            ) {
                (true, true) => {
                    y2.insert(pair.upper.clone());
                    y2.insert(pair.lower.clone());
                }
                (false, true) => {
                    y3.insert(&pair.cusp);
                }
                (true, false) => {
                    return Err(format!(
                        "upper branch of {} below s without the lower",
                        pair.cusp
                    ))
                }
                (false, false) => {}
            }
        }
        if y3 != z_c {
            return Err("Y3 is not carried onto Z_C".into());
        }
        let m = self.x.map(s, t).expect("edge").matrix();
        if m.rank() != xt.dim() {
            return Err("X(s -> t) is not surjective".into());
        }
        for (c, label) in xs.y.iter().enumerate() {
            let zero = (0..m.rows()).all(|r| m.get(r, c) == 0);
            if zero != y2.contains(label) {
                return Err(format!("kernel of X(s -> t) differs from Y2 at {label}"));
            }
        }
        let v = SimplexIndex::vertex(hs.lower.vertices()[0]);
        let d = self.diagrams[s].face_map(&v).expect("vertex map");
        for pair in pairs.iter().filter(|p| y2.contains(&p.upper)) {
            let (u, l) = (
                xs.y_index(&pair.upper).unwrap(),
                xs.y_index(&pair.lower).unwrap(),
            );
            let col: Vec<u32> = (0..d.rows()).map(|r| d.get(r, u)).collect();
            if col.iter().enumerate().any(|(r, &x)| x != u32::from(r == l)) {
                return Err(format!("d({}) is not {}", pair.upper, pair.lower));
            }
        }
        Ok(())
    }
}

/// Verdict of one family of checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        write!(
            f,
            "{}: {} checked, {} failed [{}]",
            self.name,
            self.checked,
            self.failures.len(),
            verdict
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<CheckResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
            for msg in c.failures.iter().take(5) {
                writeln!(f, "  {msg}")?;
            }
        }
        Ok(())
    }
}

pub const CHECK_DIAGRAMS: &str = "simplex diagrams";
pub const CHECK_MORPHISMS: &str = "diagram morphisms";
pub const CHECK_X_FUNCTOR: &str = "X functor";
pub const CHECK_F_FUNCTOR: &str = "F functor";
pub const CHECK_DOWNWARD_IDENTITY: &str = "downward identity";
pub const CHECK_DOWNWARD: &str = "downward quasi-iso";
pub const CHECK_SAME_LAMBDA: &str = "same-lambda quasi-iso";
pub const CHECK_SAME_LAMBDA_STRUCTURE: &str = "same-lambda structure";
pub const CHECK_CROSSING: &str = "crossing squares acyclic";
pub const CHECK_GENERALIZED: &str = "generalized downward quasi-iso";
pub const CHECK_TOP_SQUARES: &str = "top squares acyclic";

fn run<I, T>(
    name: &str,
    items: I,
    mut f: impl FnMut(&T) -> Result<bool, String>,
    label: impl Fn(&T) -> String,
) -> CheckResult
where
    I: IntoIterator<Item = T>,
{
    let mut checked = 0;
    let mut failures = Vec::new();
    for item in items {
        checked += 1;
        match f(&item) {
            Ok(true) => {}
            Ok(false) => failures.push(label(&item)),
            Err(e) => failures.push(format!("{}: {e}", label(&item))),
        }
    }
    CheckResult {
        name: name.to_string(),
        checked,
        failures,
    }
}

pub fn verify_axioms(sheaf: &SheafFunctor<'_>) -> AxiomReport {
    let poset = sheaf.poset;
    let edges: Vec<(usize, usize)> = poset.edges().keys().copied().collect();
    let flagged = |pred: fn(&crate::strat::EdgeFlags) -> bool| -> Vec<(usize, usize)> {
        poset
            .edges()
            .iter()
            .filter(|(_, fl)| pred(fl))
            .map(|(&e, _)| e)
            .collect()
    };
    let edge_label = |e: &(usize, usize)| format!("{} -> {}", e.0, e.1);
    let mut checks = Vec::new();

    checks.push(run(
        CHECK_DIAGRAMS,
        0..poset.len(),
        |&s| Ok(!sheaf.is_broken(s)),
        |s| format!("G({s})"),
    ));
    checks.push(run(
        CHECK_MORPHISMS,
        edges.clone(),
        |&(s, t)| Ok(sheaf.is_morphism(s, t)),
        edge_label,
    ));
    let x_fail = sheaf.x.functor_failures(poset);
    checks.push(CheckResult {
        name: CHECK_X_FUNCTOR.into(),
        checked: poset
            .edges()
            .keys()
            .map(|&(_, t)| poset.above(t).len())
            .sum(),
        failures: x_fail
            .iter()
            .map(|(s, t, u)| format!("{s} < {t} < {u}"))
            .collect(),
    });
    let f_fail = sheaf.functor_failures();
    checks.push(CheckResult {
        name: CHECK_F_FUNCTOR.into(),
        checked: poset
            .edges()
            .keys()
            .map(|&(_, t)| poset.above(t).len())
            .sum(),
        failures: f_fail
            .iter()
            .map(|(s, t, u)| format!("{s} < {t} < {u}"))
            .collect(),
    });

    let down = flagged(|f| f.downward);
    checks.push(run(
        CHECK_DOWNWARD_IDENTITY,
        down.clone(),
        |&(s, t)| {
            let (xs, xt) = (sheaf.x.module(s), sheaf.x.module(t));
            let m = sheaf.x.map(s, t).expect("edge").matrix();
            Ok(xs == xt && m == Matrix::identity(sheaf.field, xs.dim()))
        },
        edge_label,
    ));
    checks.push(run(
        CHECK_DOWNWARD,
        down,
        |&(s, t)| sheaf.quasi_iso(s, t),
        edge_label,
    ));
    let same = flagged(|f| f.same_lambda_f);
    checks.push(run(
        CHECK_SAME_LAMBDA,
        same.clone(),
        |&(s, t)| sheaf.quasi_iso(s, t),
        edge_label,
    ));
    checks.push(run(
        CHECK_SAME_LAMBDA_STRUCTURE,
        same,
        |&(s, t)| sheaf.same_lambda_structure(s, t).map(|_| true),
        edge_label,
    ));
    checks.push(run(
        CHECK_CROSSING,
        poset.crossing_squares().to_vec(),
        |sq| sheaf.square_acyclic(sq.o, sq.sides[0], sq.sides[1], sq.n),
        |sq| format!("O={} sides={:?} N={}", sq.o, sq.sides, sq.n),
    ));
    checks.push(run(
        CHECK_GENERALIZED,
        flagged(|f| f.generalized_downward),
        |&(s, t)| sheaf.quasi_iso(s, t),
        edge_label,
    ));
    checks.push(run(
        CHECK_TOP_SQUARES,
        poset.top_dimensional_squares().to_vec(),
        |sq| sheaf.square_acyclic(sq.s1, sq.s2a, sq.s2b, sq.s3),
        |sq| format!("{} < {}, {} < {}", sq.s1, sq.s2a, sq.s2b, sq.s3),
    ));
    AxiomReport { checks }
}

/// Total homology rank of `cone(F(s) → F(s_up))` for a Legendrian 2-stratum
/// `s` and the region `s_up` directly above it.
pub fn microlocal_rank(sheaf: &SheafFunctor<'_>, s: usize) -> Result<usize, SheafError> {
    let poset = sheaf.poset;
    if poset.stratum(s).tag != StratumType::Legendrian2 {
        return Err(SheafError::NotLegendrian(s));
    }
    let up = poset.region_above(s).ok_or(SheafError::NotLegendrian(s))?;
    let map = sheaf.map(s, up).ok_or(SheafError::NotAnEdge(s, up))?;
    let c =
        cone(&sheaf.complexes[s], &sheaf.complexes[up], map).map_err(|e| at(s, e.to_string()))?;
    Ok(c.total_homology_rank())
}
