//! Simplex diagrams, their morphisms and generalized mapping cylinders.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cobar::SimplexIndex;
use crate::homalg::{
    check_grading, AlgebraError, ChainMap, CochainComplex, GradedModule, Matrix, PrimeField,
};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("{face} is not a face of {simplex}")]
    NotFace { face: String, simplex: String },
    #[error("missing face map for {0}")]
    MissingFace(String),
    #[error("face map for {face}: {source}")]
    Algebra {
        face: String,
        #[source]
        source: AlgebraError,
    },
    #[error("face identity fails at {}", .0.iter().map(|v| v.face.to_string()).collect::<Vec<_>>().join(", "))]
    Invalid(Vec<DiagramViolation>),
    #[error("map does not commute with the face map of {0}")]
    NotMorphism(String),
    #[error("edge map of {0} is not a quasi-isomorphism")]
    EdgeNotQuasiIso(String),
}

/// A face where the defining identity fails; `entries` counts nonzero
/// entries of the left side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramViolation {
    pub face: SimplexIndex,
    pub entries: usize,
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "face {}: {} nonzero entries", self.face, self.entries)
    }
}

/// `(Δ, V, {a_F})` with `a_F` of degree `1 - dim F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexDiagram {
    field: PrimeField,
    simplex: SimplexIndex,
    module: GradedModule,
    face_maps: BTreeMap<SimplexIndex, Matrix>,
}

impl SimplexDiagram {
    /// Checks that every face has a map of the right shape and degree; the
    /// face identity is checked by [`validate_diagram`].
    pub fn new(
        field: PrimeField,
        simplex: SimplexIndex,
        module: GradedModule,
        face_maps: BTreeMap<SimplexIndex, Matrix>,
    ) -> Result<Self, DiagramError> {
        for face in face_maps.keys() {
            if !face.is_face_of(&simplex) {
                return Err(DiagramError::NotFace {
                    face: face.to_string(),
                    simplex: simplex.to_string(),
                });
            }
        }
        for face in simplex.faces() {
            let m = face_maps
                .get(&face)
                .ok_or_else(|| DiagramError::MissingFace(face.to_string()))?;
            check_grading(&module, &module, 1 - face.dim() as i64, m).map_err(|source| {
                DiagramError::Algebra {
                    face: face.to_string(),
                    source,
                }
            })?;
        }
        Ok(Self {
            field,
            simplex,
            module,
            face_maps,
        })
    }

    pub(crate) fn new_unchecked(
        field: PrimeField,
        simplex: SimplexIndex,
        module: GradedModule,
        face_maps: BTreeMap<SimplexIndex, Matrix>,
    ) -> Self {
        Self {
            field,
            simplex,
            module,
            face_maps,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn simplex(&self) -> &SimplexIndex {
        &self.simplex
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn face_map(&self, face: &SimplexIndex) -> Option<&Matrix> {
        self.face_maps.get(face)
    }

    pub fn face_maps(&self) -> &BTreeMap<SimplexIndex, Matrix> {
        &self.face_maps
    }

    fn a(&self, face: &SimplexIndex) -> &Matrix {
        &self.face_maps[face]
    }

    /// Left side of the face identity on one face.
    pub fn identity_defect(&self, face: &SimplexIndex) -> Matrix {
        let m = face.dim();
        let n = self.module.dim();
        let mut acc = Matrix::zeros(self.field, n, n);
        for k in 1..m {
            let del = self.a(&face.delete(k).expect("m > 1"));
            acc = if k % 2 == 1 {
                acc.add(del)
            } else {
                acc.sub(del)
            };
        }
        for k in 0..=m {
            let comp = self.a(&face.segment(k, m)).mul(self.a(&face.segment(0, k)));
            acc = if k % 2 == 0 {
                acc.add(&comp)
            } else {
                acc.sub(&comp)
            };
        }
        acc
    }

    /// The diagram on a face with the same module and maps.
    pub fn restrict(&self, face: &SimplexIndex) -> Result<Self, DiagramError> {
        if !face.is_face_of(&self.simplex) {
            return Err(DiagramError::NotFace {
                face: face.to_string(),
                simplex: self.simplex.to_string(),
            });
        }
        let maps = face
            .faces()
            .into_iter()
            .map(|f| (f.clone(), self.a(&f).clone()))
            .collect();
        Ok(Self::new_unchecked(
            self.field,
            face.clone(),
            self.module.clone(),
            maps,
        ))
    }

    /// `(V, a_v)` at a vertex.
    pub fn vertex_complex(&self, v: usize) -> Result<CochainComplex, DiagramError> {
        let face = SimplexIndex::vertex(v);
        let d = self
            .face_map(&face)
            .ok_or_else(|| DiagramError::MissingFace(face.to_string()))?;
        CochainComplex::new(self.module.clone(), d.clone()).map_err(|source| {
            DiagramError::Algebra {
                face: face.to_string(),
                source,
            }
        })
    }
}

/// Faces where the defining identity fails.
pub fn validate_diagram(d: &SimplexDiagram) -> Vec<DiagramViolation> {
    d.simplex
        .faces()
        .into_iter()
        .filter_map(|face| {
            let defect = d.identity_defect(&face);
            (!defect.is_zero()).then(|| DiagramViolation {
                face,
                entries: defect.nonzero_count(),
            })
        })
        .collect()
}

/// Degree 0 map `V → W` commuting with face maps, from a diagram on a face
/// of the target simplex.
#[derive(Clone, Debug)]
pub struct SDMorphism<'a> {
    pub source: &'a SimplexDiagram,
    pub target: &'a SimplexDiagram,
    pub map: Matrix,
}

impl<'a> SDMorphism<'a> {
    pub fn new(
        source: &'a SimplexDiagram,
        target: &'a SimplexDiagram,
        map: Matrix,
    ) -> Result<Self, DiagramError> {
        if !source.simplex.is_face_of(&target.simplex) {
            return Err(DiagramError::NotFace {
                face: source.simplex.to_string(),
                simplex: target.simplex.to_string(),
            });
        }
        check_grading(&source.module, &target.module, 0, &map).map_err(|e| {
            DiagramError::Algebra {
                face: source.simplex.to_string(),
                source: e,
            }
        })?;
        for face in source.simplex.faces() {
            if map.mul(source.a(&face)) != target.a(&face).mul(&map) {
                return Err(DiagramError::NotMorphism(face.to_string()));
            }
        }
        Ok(Self {
            source,
            target,
            map,
        })
    }

    pub fn identity(d: &'a SimplexDiagram) -> Self {
        Self {
            source: d,
            target: d,
            map: Matrix::identity(d.field, d.module.dim()),
        }
    }

    pub fn compose(&self, after: &SDMorphism<'a>) -> Result<SDMorphism<'a>, DiagramError> {
        SDMorphism::new(self.source, after.target, after.map.mul(&self.map))
    }
}

/// Summand offsets of `⊕_F V_F`, faces in `(dim, lex)` order.
pub fn cylinder_layout(simplex: &SimplexIndex, dim: usize) -> BTreeMap<SimplexIndex, usize> {
    simplex
        .faces()
        .into_iter()
        .enumerate()
        .map(|(i, f)| (f, i * dim))
        .collect()
}

/// `Map_n(D)`: the complex on `⊕_F V[dim F]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingCylinder {
    faces: Vec<SimplexIndex>,
    complex: CochainComplex,
}

impl MappingCylinder {
    pub fn faces(&self) -> &[SimplexIndex] {
        &self.faces
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn into_complex(self) -> CochainComplex {
        self.complex
    }
}

/// The generalized mapping cylinder of a valid diagram; `D² = 0` is
/// checked on construction.
pub fn mapping_cylinder(d: &SimplexDiagram) -> Result<MappingCylinder, DiagramError> {
    let bad = validate_diagram(d);
    if !bad.is_empty() {
        return Err(DiagramError::Invalid(bad));
    }
    let cyl = cylinder_unchecked(d);
    CochainComplex::new(
        cyl.complex.module().clone(),
        cyl.complex.differential().clone(),
    )
    .map_err(|source| DiagramError::Algebra {
        face: d.simplex.to_string(),
        source,
    })?;
    Ok(cyl)
}

/// Assembles the cylinder without validating the diagram or `D²`.
pub fn cylinder_unchecked(d: &SimplexDiagram) -> MappingCylinder {
    let n = d.module.dim();
    let faces = d.simplex.faces();
    let layout = cylinder_layout(&d.simplex, n);
    let names: Vec<String> = faces.iter().map(|f| f.to_string()).collect();
    let shifted: Vec<GradedModule> = faces
        .iter()
        .map(|f| d.module.shift(f.dim() as i64))
        .collect();
    let parts: Vec<(&str, &GradedModule)> = names
        .iter()
        .map(String::as_str)
        .zip(shifted.iter())
        .collect();
    let module = GradedModule::direct_sum(&parts);
    let total = n * faces.len();
    let mut big = Matrix::zeros(d.field, total, total);
    let id = Matrix::identity(d.field, n);
    for e in &faces {
        let m = e.dim();
        let col = layout[e];
        let outer = if m % 2 == 0 { -1 } else { 1 };
        for k in 0..=m {
            let a = d.a(&e.segment(0, k));
            let blk = if outer < 0 { a.neg() } else { a.clone() };
            add_block(&mut big, layout[&e.segment(k, m)], col, &blk);
        }
        for k in 1..=m {
            let target = e.delete(k).expect("m ≥ 1");
            let blk = if (m + k + 1) % 2 == 0 {
                id.clone()
            } else {
                id.neg()
            };
            add_block(&mut big, layout[&target], col, &blk);
        }
    }
    MappingCylinder {
        faces,
        complex: CochainComplex::new_unchecked(module, big),
    }
}

fn add_block(big: &mut Matrix, r0: usize, c0: usize, blk: &Matrix) {
    for r in 0..blk.rows() {
        for c in 0..blk.cols() {
            let v = blk.get(r, c);
            if v != 0 {
                big.add_at(r0 + r, c0 + c, v);
            }
        }
    }
}

/// `Map(φ)`: `φ` on each summand of the source cylinder followed by the
/// inclusion of summands.
pub fn cylinder_map(phi: &SDMorphism<'_>) -> Matrix {
    let (sd, td) = (phi.source, phi.target);
    let (a, b) = (sd.module.dim(), td.module.dim());
    let src = cylinder_layout(&sd.simplex, a);
    let tgt = cylinder_layout(&td.simplex, b);
    let rows = b * td.simplex.faces().len();
    let cols = a * sd.simplex.faces().len();
    let mut out = Matrix::zeros(sd.field, rows, cols);
    for (face, &c0) in &src {
        out.set_block(tgt[face], c0, &phi.map);
    }
    out
}

/// `Map(φ)` as a checked chain map between the two cylinders.
pub fn cylinder_chain_map(phi: &SDMorphism<'_>) -> Result<ChainMap, DiagramError> {
    let src = mapping_cylinder(phi.source)?.into_complex();
    let tgt = mapping_cylinder(phi.target)?.into_complex();
    ChainMap::new(src, tgt, cylinder_map(phi)).map_err(|source| DiagramError::Algebra {
        face: phi.source.simplex.to_string(),
        source,
    })
}

/// Checks that every edge map is a quasi-isomorphism.
pub fn edges_quasi_iso(d: &SimplexDiagram) -> Result<(), DiagramError> {
    for edge in d.simplex.faces().into_iter().filter(|f| f.dim() == 1) {
        let v = edge.vertices();
        let src = d.vertex_complex(v[0])?;
        let tgt = d.vertex_complex(v[1])?;
        let ok = crate::homalg::is_quasi_iso(&src, &tgt, d.a(&edge)).map_err(|source| {
            DiagramError::Algebra {
                face: edge.to_string(),
                source,
            }
        })?;
        if !ok {
            return Err(DiagramError::EdgeNotQuasiIso(edge.to_string()));
        }
    }
    Ok(())
}

/// Whether `Map_0(D|_v) → Map_n(D)` is a quasi-isomorphism; requires the
/// edge maps to be quasi-isomorphisms.
pub fn vertex_incl_quasi_iso(d: &SimplexDiagram, v: usize) -> Result<bool, DiagramError> {
    edges_quasi_iso(d)?;
    let sub = d.restrict(&SimplexIndex::vertex(v))?;
    let inc = SDMorphism::new(&sub, d, Matrix::identity(d.field, d.module.dim()))?;
    Ok(cylinder_chain_map(&inc)?.is_quasi_iso())
}

/// Whether `Map(φ)` is a quasi-isomorphism.
pub fn morphism_quasi_iso(phi: &SDMorphism<'_>) -> Result<bool, DiagramError> {
    Ok(cylinder_chain_map(phi)?.is_quasi_iso())
}
