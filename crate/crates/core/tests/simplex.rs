mod common;

use frontsheaf::cobar::SimplexIndex;
use frontsheaf::homalg::Matrix;
use frontsheaf::simplex::{
    cylinder_map, mapping_cylinder, morphism_quasi_iso, validate_diagram, vertex_incl_quasi_iso,
    SDMorphism, SimplexDiagram,
};
use proptest::prelude::*;

fn s(v: &[usize]) -> SimplexIndex {
    SimplexIndex::of(v)
}

/// Block matrix with `dim`-sized blocks; `None` is a zero block.
fn blocks(d: &SimplexDiagram, grid: &[Vec<Option<Matrix>>]) -> Matrix {
    let n = d.module().dim();
    let mut out = Matrix::zeros(d.field(), n * grid.len(), n * grid.len());
    for (r, row) in grid.iter().enumerate() {
        for (c, b) in row.iter().enumerate() {
            if let Some(b) = b {
                out.set_block(r * n, c * n, b);
            }
        }
    }
    out
}

fn permute(m: &Matrix, order: &[usize], n: usize) -> Matrix {
    let idx: Vec<usize> = order.iter().flat_map(|&b| (b * n)..(b * n + n)).collect();
    m.select(&idx, &idx)
}

#[test]
fn edge_cylinder_is_the_usual_mapping_cylinder() {
    for seed in 0..20 {
        let d = common::random_valid_diagram(seed, 1, 5);
        let n = d.module().dim();
        let a = |v: &[usize]| Some(d.face_map(&s(v)).unwrap().clone());
        let id = Some(Matrix::identity(d.field(), n));
        let neg = |m: Option<Matrix>| m.map(|m| m.neg());
        // summands V0, V01, V1
        let expected = blocks(
            &d,
            &[
                vec![neg(a(&[0])), neg(id.clone()), None],
                vec![None, a(&[0]), None],
                vec![None, a(&[0, 1]), neg(a(&[1]))],
            ],
        );
        let cyl = mapping_cylinder(&d).unwrap();
        // internal order is V0, V1, V01
        assert_eq!(
            permute(cyl.complex().differential(), &[0, 2, 1], n),
            expected
        );
    }
}

#[test]
fn triangle_cylinder_matches_seven_by_seven_pattern() {
    for seed in 0..20 {
        let d = common::random_valid_diagram(seed, 2, 3);
        let n = d.module().dim();
        let a = |v: &[usize]| Some(d.face_map(&s(v)).unwrap().clone());
        let one = Some(Matrix::identity(d.field(), n));
        let neg = |m: Option<Matrix>| m.map(|m| m.neg());
        let z = || None;
        let expected = blocks(
            &d,
            &[
                vec![
                    neg(a(&[0])),
                    z(),
                    z(),
                    neg(one.clone()),
                    neg(one.clone()),
                    z(),
                    z(),
                ],
                vec![
                    z(),
                    neg(a(&[1])),
                    z(),
                    a(&[0, 1]),
                    z(),
                    neg(one.clone()),
                    z(),
                ],
                vec![
                    z(),
                    z(),
                    neg(a(&[2])),
                    z(),
                    a(&[0, 2]),
                    a(&[1, 2]),
                    neg(a(&[0, 1, 2])),
                ],
                vec![z(), z(), z(), a(&[0]), z(), z(), neg(one.clone())],
                vec![z(), z(), z(), z(), a(&[0]), z(), one.clone()],
                vec![z(), z(), z(), z(), z(), a(&[1]), neg(a(&[0, 1]))],
                vec![z(), z(), z(), z(), z(), z(), neg(a(&[0]))],
            ],
        );
        let cyl = mapping_cylinder(&d).unwrap();
        assert_eq!(cyl.complex().differential(), &expected);
        let degs = cyl.complex().module().degrees();
        for (i, face) in cyl.faces().iter().enumerate() {
            for j in 0..n {
                assert_eq!(degs[i * n + j], d.module().degree(j) - face.dim() as i64);
            }
        }
    }
}

#[test]
fn invalid_diagram_has_no_cylinder() {
    let d = common::random_valid_diagram(7, 2, 5);
    let mut maps = d.face_maps().clone();
    let e = s(&[0, 1]);
    let bumped = maps[&e].add(&Matrix::identity(d.field(), d.module().dim()));
    maps.insert(e, bumped);
    let bad =
        SimplexDiagram::new(d.field(), d.simplex().clone(), d.module().clone(), maps).unwrap();
    assert!(!validate_diagram(&bad).is_empty());
    assert!(mapping_cylinder(&bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_diagrams_have_square_zero_cylinders(seed in any::<u64>(), n in 0usize..=3, pi in 0usize..3) {
        let p = [2, 3, 5][pi];
        let d = common::random_valid_diagram(seed, n, p);
        prop_assert!(validate_diagram(&d).is_empty());
        let cyl = mapping_cylinder(&d).unwrap();
        let dd = cyl.complex().differential();
        prop_assert!(dd.mul(dd).is_zero());
        for v in 0..=n {
            prop_assert!(vertex_incl_quasi_iso(&d, v).unwrap());
        }
    }

    #[test]
    fn face_inclusions_are_quasi_isos(seed in any::<u64>(), n in 1usize..=3) {
        let d = common::random_valid_diagram(seed, n, 3);
        for face in d.simplex().faces() {
            let sub = d.restrict(&face).unwrap();
            let inc = SDMorphism::new(&sub, &d, Matrix::identity(d.field(), d.module().dim())).unwrap();
            prop_assert!(morphism_quasi_iso(&inc).unwrap());
        }
    }

    #[test]
    fn cylinder_maps_compose(seed in any::<u64>()) {
        let d = common::random_valid_diagram(seed, 3, 2);
        let n = d.module().dim();
        let id = Matrix::identity(d.field(), n);
        let v = d.restrict(&s(&[1])).unwrap();
        let e = d.restrict(&s(&[1, 3])).unwrap();
        let t = d.restrict(&s(&[0, 1, 3])).unwrap();
        let ve = SDMorphism::new(&v, &e, id.clone()).unwrap();
        let et = SDMorphism::new(&e, &t, id.clone()).unwrap();
        let td = SDMorphism::new(&t, &d, id.clone()).unwrap();
        let vd = SDMorphism::new(&v, &d, id).unwrap();
        let composite = cylinder_map(&td).mul(&cylinder_map(&et)).mul(&cylinder_map(&ve));
        prop_assert_eq!(composite, cylinder_map(&vd));
    }
}
