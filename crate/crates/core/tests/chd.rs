mod common;

use std::collections::{BTreeMap, BTreeSet};

use frontsheaf::chd::{
    aug_to_chd, boundary_extend, chd_to_aug, degree_zero, enumerate_augmentations,
    extension_from_dga, validate_chd, Augmentation, DEFAULT_BOUND,
};
use frontsheaf::dga::{build_dga, SimplicialDGA};
use frontsheaf::homalg::{Matrix, PrimeField};
use frontsheaf::simplex::{morphism_quasi_iso, vertex_incl_quasi_iso, SDMorphism};
use proptest::prelude::*;

fn gf(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// Every assignment of degree-0 values, checked against `ε∘∂` on all
/// generators. Also asserts that the degree-1 generators alone decide.
fn oracle(dga: &SimplicialDGA, f: PrimeField) -> BTreeSet<Augmentation> {
    let vars = degree_zero(dga);
    let total = (f.p() as usize).pow(vars.len() as u32);
    let mut out = BTreeSet::new();
    for mut code in 0..total {
        let mut values = BTreeMap::new();
        for &g in &vars {
            values.insert(g, (code % f.p() as usize) as u32);
            code /= f.p() as usize;
        }
        let value = |g| values.get(&g).copied().unwrap_or(0);
        let vanishes = |g: usize| dga.evaluate(f, value, dga.diff_generator(g)) == 0;
        let all = (0..dga.generators().len()).all(vanishes);
        let deg1 = (0..dga.generators().len())
            .filter(|&g| dga.generator(g).degree == 1)
            .all(vanishes);
        assert_eq!(all, deg1, "degree-1 shortcut disagrees");
        if all {
            out.insert(Augmentation::new(f, values.clone()));
        }
    }
    out
}

/// Frozen after the first oracle-checked run.
const COUNTS: [(&str, u32, usize); 12] = [
    ("one_sheet", 2, 1),
    ("one_sheet", 3, 1),
    ("two_sheets", 2, 2),
    ("two_sheets", 3, 3),
    ("crossing_circle", 2, 4),
    ("crossing_circle", 3, 9),
    ("unknot_sphere", 2, 1),
    ("unknot_sphere", 3, 1),
    ("cusp_sheet_vertex", 2, 4),
    ("cusp_sheet_vertex", 3, 9),
    ("triple_point_vertex", 2, 8),
    ("triple_point_vertex", 3, 27),
];

#[test]
fn enumeration_matches_brute_force_oracle() {
    for (name, p, count) in COUNTS {
        let dga = build_dga(&common::load(name)).unwrap();
        let found = enumerate_augmentations(&dga, gf(p), DEFAULT_BOUND).unwrap();
        let set: BTreeSet<Augmentation> = found.iter().cloned().collect();
        assert_eq!(set.len(), found.len(), "{name}: duplicates");
        assert_eq!(set, oracle(&dga, gf(p)), "{name} p={p}");
        assert_eq!(found.len(), count, "{name} p={p}");
    }
}

#[test]
fn enumeration_is_deterministic() {
    let dga = build_dga(&common::load("triple_point_vertex")).unwrap();
    let a = enumerate_augmentations(&dga, gf(3), DEFAULT_BOUND).unwrap();
    let b = enumerate_augmentations(&dga, gf(3), DEFAULT_BOUND).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bijection_and_validity_on_corpus() {
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        for p in [2, 3] {
            for eps in enumerate_augmentations(&dga, gf(p), DEFAULT_BOUND).unwrap() {
                assert!(eps.is_augmentation(&dga));
                let chd = aug_to_chd(&dga, &eps);
                let diags = validate_chd(&front, &chd);
                assert!(diags.is_empty(), "{name}: {diags:?}");
                let back = chd_to_aug(&dga, &chd).unwrap();
                assert_eq!(back, eps);
                assert_eq!(aug_to_chd(&dga, &back), chd);
            }
        }
    }
}

#[test]
fn extensions_agree_with_dga_matrices() {
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        for eps in enumerate_augmentations(&dga, gf(3), DEFAULT_BOUND).unwrap() {
            let chd = aug_to_chd(&dga, &eps);
            for cell in front.cells() {
                for face in cell.faces() {
                    let direct =
                        boundary_extend(&front, gf(3), &face, cell, chd.map(&face).unwrap())
                            .unwrap();
                    assert_eq!(
                        direct,
                        extension_from_dga(&dga, &eps, &face, cell).unwrap(),
                        "{name} {face} {cell}"
                    );
                }
            }
        }
    }
}

#[test]
fn boundary_extensions_commute_with_projection() {
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        let f = gf(2);
        for eps in enumerate_augmentations(&dga, f, DEFAULT_BOUND).unwrap() {
            let chd = aug_to_chd(&dga, &eps);
            for big in front.cells() {
                for mid in big.faces() {
                    let p = front.projection_p(&mid, big, f).unwrap().matrix;
                    for small in mid.faces() {
                        let c = chd.map(&small).unwrap();
                        let lhs = boundary_extend(&front, f, &small, &mid, c).unwrap().mul(&p);
                        let rhs = p.mul(&boundary_extend(&front, f, &small, big, c).unwrap());
                        assert_eq!(lhs, rhs, "{name} {small} {mid} {big}");
                    }
                }
            }
        }
    }
}

#[test]
fn edge_maps_are_invertible() {
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        for eps in enumerate_augmentations(&dga, gf(3), DEFAULT_BOUND).unwrap() {
            let chd = aug_to_chd(&dga, &eps);
            for cell in front.cells_of_dim(1) {
                let c = chd.map(cell).unwrap();
                assert_eq!(c.rank(), c.rows(), "{name} {cell}");
            }
        }
    }
}

#[test]
fn every_homotopy_entry_mutation_is_caught_at_its_cell() {
    let mut face_identity_hits = 0;
    let mut degenerate = 0;
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        let f = gf(3);
        let eps = enumerate_augmentations(&dga, f, DEFAULT_BOUND)
            .unwrap()
            .remove(0);
        let chd = aug_to_chd(&dga, &eps);
        for cell in front.cells_of_dim(2) {
            let c = chd.map(cell).unwrap();
            for r in 0..c.rows() {
                for k in 0..c.cols() {
                    let mut bad = chd.clone();
                    let m = bad.map_mut(cell).unwrap();
                    m.set(r, k, f.add(m.get(r, k), 1));
                    let diags = validate_chd(&front, &bad);
                    if diags.is_empty() {
                        // landed on another valid diagram
                        let other = chd_to_aug(&dga, &bad).unwrap();
                        assert!(
                            other.is_augmentation(&dga) && other != eps,
                            "{name} {cell} ({r},{k})"
                        );
                        degenerate += 1;
                        continue;
                    }
                    assert!(
                        diags.iter().any(|d| d.cell == cell.to_string()),
                        "{name} {cell} ({r},{k})"
                    );
                    face_identity_hits +=
                        diags.iter().filter(|d| d.rule == "face identity").count();
                }
            }
        }
    }
    // legal-shape mutations are caught by the face identity unless they
    // move a free homotopy parameter
    assert!(face_identity_hits > 0);
    assert!(degenerate > 0);
}

#[test]
fn corpus_diagrams_satisfy_vertex_and_face_inclusion() {
    for name in common::CORPUS {
        let front = common::load(name);
        let dga = build_dga(&front).unwrap();
        let f = gf(2);
        for eps in enumerate_augmentations(&dga, f, DEFAULT_BOUND).unwrap() {
            let chd = aug_to_chd(&dga, &eps);
            for cell in front.cells() {
                let d = chd.diagram(&front, cell).unwrap();
                for &v in cell.vertices() {
                    assert!(vertex_incl_quasi_iso(&d, v).unwrap(), "{name} {cell} {v}");
                }
                // sheet inclusion V(e_F) → V(e_I) from a face diagram
                for face in cell.faces() {
                    let small = chd.diagram(&front, &face).unwrap();
                    let p = front.projection_p(&face, cell, f).unwrap().matrix;
                    let iota = p.transpose();
                    let phi = SDMorphism::new(&small, &d, iota).unwrap();
                    assert!(morphism_quasi_iso(&phi).unwrap(), "{name} {face} {cell}");
                }
            }
        }
    }
}

#[test]
fn identity_cylinder_map_on_corpus() {
    let front = common::load("cusp_sheet_vertex");
    let dga = build_dga(&front).unwrap();
    let eps = enumerate_augmentations(&dga, gf(3), DEFAULT_BOUND)
        .unwrap()
        .remove(0);
    let chd = aug_to_chd(&dga, &eps);
    let cell = front.cells_of_dim(2).next().unwrap().clone();
    let d = chd.diagram(&front, &cell).unwrap();
    let id = SDMorphism::identity(&d);
    let n = d.module().dim() * cell.faces().len();
    assert_eq!(
        frontsheaf::simplex::cylinder_map(&id),
        Matrix::identity(gf(3), n)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chd_is_valid_exactly_for_augmentations(which in 0usize..6, seed in proptest::collection::vec(0u32..3, 8)) {
        let front = common::load(common::CORPUS[which]);
        let dga = build_dga(&front).unwrap();
        let f = gf(3);
        let values = degree_zero(&dga).into_iter().zip(seed).collect();
        let eps = Augmentation::new(f, values);
        let chd = aug_to_chd(&dga, &eps);
        prop_assert_eq!(validate_chd(&front, &chd).is_empty(), eps.is_augmentation(&dga));
        prop_assert_eq!(chd_to_aug(&dga, &chd).unwrap(), eps);
    }
}
