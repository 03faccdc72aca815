//! Augmentations, chain homotopy diagrams and the correspondence between
//! them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cobar::{phi, CobarElement, SimplexIndex};
use crate::dga::{GenId, NCPoly, SimplicialDGA};
use crate::front::{Diagnostic, FrontComplex, FrontError};
use crate::homalg::{check_grading, Matrix, PrimeField};
use crate::simplex::{validate_diagram, SimplexDiagram};

/// Default cap on `p^n` assignments searched by the enumerator.
pub const DEFAULT_BOUND: u128 = 1 << 20;

#[derive(Debug, Error)]
pub enum ChdError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error("enumeration needs {required} assignments, above the bound {bound}")]
    BoundExceeded { required: String, bound: u128 },
    #[error("no generator named {0}")]
    UnknownGenerator(String),
    #[error("generator {0} has nonzero degree")]
    NotDegreeZero(String),
    #[error("value {value} for {generator} is not reduced mod {p}")]
    Unreduced {
        generator: String,
        value: u32,
        p: u32,
    },
    #[error("missing map for cell {0}")]
    MissingMap(String),
    #[error("entry ({row}, {col}) of c({cell}) is not of the augmentation form")]
    NotInImage {
        cell: String,
        row: usize,
        col: usize,
    },
    #[error("invalid chain homotopy diagram: {}", .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Invalid(Vec<Diagnostic>),
}

/// Values on degree-0 generators; every other generator maps to zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Augmentation {
    field: PrimeField,
    values: BTreeMap<GenId, u32>,
}

impl Augmentation {
    /// Zero values are dropped so equal augmentations compare equal.
    pub fn new(field: PrimeField, values: BTreeMap<GenId, u32>) -> Self {
        let values = values.into_iter().filter(|&(_, v)| v != 0).collect();
        Self { field, values }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn value(&self, g: GenId) -> u32 {
        self.values.get(&g).copied().unwrap_or(0)
    }

    /// Nonzero values.
    pub fn values(&self) -> &BTreeMap<GenId, u32> {
        &self.values
    }

    pub fn evaluate(&self, dga: &SimplicialDGA, x: &NCPoly) -> u32 {
        dga.evaluate(self.field, |g| self.value(g), x)
    }

    /// Generator id to value over all degree-0 generators.
    pub fn to_table(&self, dga: &SimplicialDGA) -> BTreeMap<String, u32> {
        degree_zero(dga)
            .into_iter()
            .map(|g| (dga.generator(g).id(), self.value(g)))
            .collect()
    }

    pub fn from_table(
        dga: &SimplicialDGA,
        field: PrimeField,
        table: &BTreeMap<String, u32>,
    ) -> Result<Self, ChdError> {
        let mut values = BTreeMap::new();
        for (id, &v) in table {
            let g = dga
                .find(id)
                .ok_or_else(|| ChdError::UnknownGenerator(id.clone()))?;
            if dga.generator(g).degree != 0 {
                return Err(ChdError::NotDegreeZero(id.clone()));
            }
            if v >= field.p() {
                return Err(ChdError::Unreduced {
                    generator: id.clone(),
                    value: v,
                    p: field.p(),
                });
            }
            values.insert(g, v);
        }
        Ok(Self::new(field, values))
    }

    /// `ε∘∂ = 0` on every generator.
    pub fn is_augmentation(&self, dga: &SimplicialDGA) -> bool {
        (0..dga.generators().len()).all(|g| self.evaluate(dga, dga.diff_generator(g)) == 0)
    }
}

/// Degree-0 generators in id order.
pub fn degree_zero(dga: &SimplicialDGA) -> Vec<GenId> {
    (0..dga.generators().len())
        .filter(|&g| dga.generator(g).degree == 0)
        .collect()
}

/// `c(e_I)` for every cell, on `V(e_I)` with sheets in descending z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CHD {
    field: PrimeField,
    maps: BTreeMap<SimplexIndex, Matrix>,
}

impl CHD {
    pub fn new(field: PrimeField, maps: BTreeMap<SimplexIndex, Matrix>) -> Self {
        Self { field, maps }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn map(&self, cell: &SimplexIndex) -> Option<&Matrix> {
        self.maps.get(cell)
    }

    pub fn maps(&self) -> &BTreeMap<SimplexIndex, Matrix> {
        &self.maps
    }

    pub fn map_mut(&mut self, cell: &SimplexIndex) -> Option<&mut Matrix> {
        self.maps.get_mut(cell)
    }

    /// `(closure(e_I), V(e_I), {c_I(e_F)})`, with gradings checked but not
    /// the face identity.
    pub fn diagram(
        &self,
        front: &FrontComplex,
        cell: &SimplexIndex,
    ) -> Result<SimplexDiagram, ChdError> {
        let module = front.v_module(cell)?;
        let mut maps = BTreeMap::new();
        for face in cell.faces() {
            let c = self
                .maps
                .get(&face)
                .ok_or_else(|| ChdError::MissingMap(face.to_string()))?;
            maps.insert(
                face.clone(),
                boundary_extend(front, self.field, &face, cell, c)?,
            );
        }
        SimplexDiagram::new(self.field, cell.clone(), module, maps).map_err(|e| {
            ChdError::Invalid(vec![Diagnostic {
                cell: cell.to_string(),
                rule: "degree".into(),
                message: e.to_string(),
            }])
        })
    }
}

/// `c_J(e_F)`: `c` on the sheets of `e_F`, and on cusp pairs over `e_F` the
/// map upper ↦ lower for a vertex, the identity for an edge, zero otherwise.
pub fn boundary_extend(
    front: &FrontComplex,
    field: PrimeField,
    face: &SimplexIndex,
    coface: &SimplexIndex,
    c: &Matrix,
) -> Result<Matrix, FrontError> {
    let pairs = front.cusp_pairs(face, coface)?;
    let small = front.sheets(face)?;
    let big = front.sheets(coface)?;
    let pos = |s: &str| {
        big.iter()
            .position(|x| x == s)
            .expect("face sheets continue into coface")
    };
    let idx: Vec<usize> = small.iter().map(|s| pos(s)).collect();
    let mut out = Matrix::zeros(field, big.len(), big.len());
    for (a, &ra) in idx.iter().enumerate() {
        for (b, &rb) in idx.iter().enumerate() {
            out.set(ra, rb, c.get(a, b));
        }
    }
    for pair in pairs {
        let (u, l) = (pos(&pair.upper), pos(&pair.lower));
        match face.dim() {
            0 => out.set(l, u, 1),
            1 => {
                out.set(u, u, 1);
                out.set(l, l, 1);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `[ε(M_I(φ⁻¹(e_F)))]^T`, the boundary extension read off the DGA.
pub fn extension_from_dga(
    dga: &SimplicialDGA,
    eps: &Augmentation,
    face: &SimplexIndex,
    cell: &SimplexIndex,
) -> Result<Matrix, ChdError> {
    let x = phi(&CobarElement::generator(face.clone()), true);
    let m = dga.matrix_hom(cell, &x).map_err(|_| FrontError::NotFace {
        face: face.to_string(),
        coface: cell.to_string(),
    })?;
    let n = m.size();
    let mut out = Matrix::zeros(eps.field, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(j, i, eps.evaluate(dga, m.get(i, j)));
        }
    }
    Ok(out)
}

/// `c(e_I) = [ε(M_I(φ⁻¹(e_I)))]^T`.
pub fn aug_to_chd(dga: &SimplicialDGA, eps: &Augmentation) -> CHD {
    let f = eps.field;
    let mut maps = BTreeMap::new();
    for cell in dga.front().cells() {
        let n = dga.sheets(cell).len();
        let mut c = if cell.dim() == 1 {
            Matrix::identity(f, n)
        } else {
            Matrix::zeros(f, n, n)
        };
        for i in 0..n {
            for j in 0..n {
                if let Some(g) = dga.lookup(cell, i, j) {
                    c.set(j, i, eps.value(g));
                }
            }
        }
        maps.insert(cell.clone(), c);
    }
    CHD { field: f, maps }
}

/// Inverse of [`aug_to_chd`]; rejects maps outside its image.
pub fn chd_to_aug(dga: &SimplicialDGA, chd: &CHD) -> Result<Augmentation, ChdError> {
    let mut values = BTreeMap::new();
    for cell in dga.front().cells() {
        let c = chd
            .maps
            .get(cell)
            .ok_or_else(|| ChdError::MissingMap(cell.to_string()))?;
        let n = dga.sheets(cell).len();
        for col in 0..n {
            for row in 0..n {
                let v = c.get(row, col);
                let expected_diag = u32::from(cell.dim() == 1 && row == col);
                match dga.lookup(cell, col, row) {
                    Some(g) if dga.generator(g).degree == 0 => {
                        values.insert(g, v);
                    }
                    _ if v != expected_diag => {
                        return Err(ChdError::NotInImage {
                            cell: cell.to_string(),
                            row,
                            col,
                        });
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(Augmentation::new(chd.field, values))
}

/// Degree, triangularity and the face identity of every cell's extended
/// family.
pub fn validate_chd(front: &FrontComplex, chd: &CHD) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let diag = |cell: &SimplexIndex, rule: &str, message: String| Diagnostic {
        cell: cell.to_string(),
        rule: rule.to_string(),
        message,
    };
    let mut locally_ok = true;
    for cell in front.cells() {
        let Some(c) = chd.maps.get(cell) else {
            out.push(diag(cell, "missing map", "no map given".into()));
            locally_ok = false;
            continue;
        };
        let module = front.v_module(cell).expect("listed cell");
        let fiber = front.fiber(cell).expect("listed cell");
        let levels: Vec<usize> = module
            .labels()
            .iter()
            .map(|s| fiber.level_of_sheet(s).unwrap())
            .collect();
        if c.rows() != module.dim() || c.cols() != module.dim() {
            out.push(diag(
                cell,
                "shape",
                format!("expected {0}x{0}", module.dim()),
            ));
            locally_ok = false;
            continue;
        }
        if let Err(e) = check_grading(&module, &module, 1 - cell.dim() as i64, c) {
            out.push(diag(cell, "degree", e.to_string()));
            locally_ok = false;
        }
        for r in 0..c.rows() {
            for k in 0..c.cols() {
                let v = c.get(r, k);
                let ok = if r == k {
                    v == u32::from(cell.dim() == 1)
                } else {
                    v == 0 || levels[k] < levels[r]
                };
                if !ok {
                    out.push(diag(
                        cell,
                        "triangularity",
                        format!("entry ({}, {}) = {v}", module.label(r), module.label(k)),
                    ));
                    locally_ok = false;
                }
            }
        }
    }
    if !locally_ok {
        return out;
    }
    for cell in front.cells() {
        match chd.diagram(front, cell) {
            Ok(d) => {
                for v in validate_diagram(&d) {
                    out.push(diag(cell, "face identity", v.to_string()));
                }
            }
            Err(ChdError::Invalid(ds)) => out.extend(ds),
            Err(e) => out.push(diag(cell, "face identity", e.to_string())),
        }
    }
    out
}

struct Constraint {
    terms: Vec<(u32, Vec<usize>)>,
}

/// All augmentations, as a depth-first search over degree-0 values in
/// generator order that checks each degree-1 relation once its last
/// variable is set.
pub fn enumerate_augmentations(
    dga: &SimplicialDGA,
    field: PrimeField,
    bound: u128,
) -> Result<Vec<Augmentation>, ChdError> {
    let vars = degree_zero(dga);
    let required = (0..vars.len()).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(field.p())));
    match required {
        Some(r) if r <= bound => {}
        Some(r) => {
            return Err(ChdError::BoundExceeded {
                required: r.to_string(),
                bound,
            })
        }
        None => {
            return Err(ChdError::BoundExceeded {
                required: format!("{}^{}", field.p(), vars.len()),
                bound,
            })
        }
    }
    let slot: BTreeMap<GenId, usize> = vars.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut by_last: Vec<Vec<Constraint>> = (0..vars.len()).map(|_| Vec::new()).collect();
    for g in 0..dga.generators().len() {
        if dga.generator(g).degree != 1 {
            continue;
        }
        let mut terms = Vec::new();
        let mut constant = 0u32;
        for (w, &c) in dga.diff_generator(g).terms() {
            let Some(idx) = w
                .iter()
                .map(|x| slot.get(x).copied())
                .collect::<Option<Vec<usize>>>()
            else {
                continue;
            };
            if idx.is_empty() {
                constant = field.add(constant, field.reduce(c));
            } else {
                terms.push((field.reduce(c), idx));
            }
        }
        match terms.iter().flat_map(|(_, idx)| idx.iter().copied()).max() {
            Some(last) => {
                if constant != 0 {
                    terms.push((constant, Vec::new()));
                }
                by_last[last].push(Constraint { terms });
            }
            None if constant != 0 => return Ok(Vec::new()),
            None => {}
        }
    }
    let mut out = Vec::new();
    let mut assign = vec![0u32; vars.len()];
    search(field, &by_last, &mut assign, 0, &mut |a| {
        out.push(Augmentation::new(
            field,
            vars.iter().zip(a).map(|(&g, &v)| (g, v)).collect(),
        ));
    });
    Ok(out)
}

fn search(
    field: PrimeField,
    by_last: &[Vec<Constraint>],
    assign: &mut Vec<u32>,
    k: usize,
    emit: &mut dyn FnMut(&[u32]),
) {
    if k == assign.len() {
        emit(assign);
        return;
    }
    for v in 0..field.p() {
        assign[k] = v;
        let ok = by_last[k].iter().all(|c| {
            let mut total = 0;
            for (coef, idx) in &c.terms {
                let t = idx.iter().fold(*coef, |acc, &i| field.mul(acc, assign[i]));
                total = field.add(total, t);
            }
            total == 0
        });
        if ok {
            search(field, by_last, assign, k + 1, emit);
        }
    }
    assign[k] = 0;
}
