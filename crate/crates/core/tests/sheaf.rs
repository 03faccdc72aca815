mod common;

use frontsheaf::chd::{aug_to_chd, enumerate_augmentations, validate_chd, CHD, DEFAULT_BOUND};
use frontsheaf::cobar::SimplexIndex;
use frontsheaf::dga::build_dga;
use frontsheaf::homalg::{Matrix, PrimeField};
use frontsheaf::sheaf::{
    build_sheaf, build_sheaf_of_rank, check_x_functor, cusp_label, g_of, microlocal_rank,
    preliminary_x, verify_axioms, SheafError, SheafFunctor, XFunctor, CHECK_CROSSING,
};
use frontsheaf::simplex::validate_diagram;
use frontsheaf::strat::{build_strata, HandleCell, StratPoset, StratumType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn h(i: &[usize], j: &[usize]) -> HandleCell {
    HandleCell::new(SimplexIndex::of(i), SimplexIndex::of(j)).unwrap()
}

fn strata(name: &str) -> StratPoset {
    build_strata(&common::load(name)).unwrap()
}

fn chds(p: &StratPoset, q: u32) -> Vec<CHD> {
    let dga = build_dga(p.front()).unwrap();
    enumerate_augmentations(&dga, gf(q), DEFAULT_BOUND)
        .unwrap()
        .iter()
        .map(|a| aug_to_chd(&dga, a))
        .collect()
}

/// The stratum over `handle` whose module has these `Y` sheets and `z` cusps.
fn find(p: &StratPoset, handle: &HandleCell, dim: usize, y: &[&str], z: usize) -> usize {
    let hits: Vec<usize> = p
        .strata()
        .iter()
        .filter(|st| {
            let x = preliminary_x(p, st.id).unwrap();
            st.handle == *handle && st.dim == dim && x.y == y && x.z.len() == z
        })
        .map(|st| st.id)
        .collect();
    assert_eq!(hits.len(), 1, "{handle} {y:?}");
    hits[0]
}

#[test]
fn crossing_handle_regions_see_the_sheets_below() {
    let p = strata("crossing_circle");
    let hc = h(&[1, 2], &[1, 2]);
    let mut ys: Vec<Vec<String>> = p
        .strata()
        .iter()
        .filter(|st| st.handle == hc && st.dim == 3)
        .map(|st| preliminary_x(&p, st.id).unwrap())
        .inspect(|x| assert!(x.z.is_empty()))
        .map(|x| x.y)
        .collect();
    ys.sort();
    let mut expected: Vec<Vec<String>> = [
        &["T1", "A", "B", "T4"][..],
        &["A", "B", "T4"],
        &["B", "T4"],
        &["A", "T4"],
        &["T4"],
        &[],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect();
    expected.sort();
    assert_eq!(ys, expected);
}

#[test]
fn cusp_edge_modules_and_generization() {
    let p = strata("cusp_sheet_vertex");
    let f = p.front();
    let s_prime = find(&p, &h(&[1], &[0, 1]), 2, &["B1", "B2"], 1);
    let xp = preliminary_x(&p, s_prime).unwrap();
    assert_eq!(xp.z, vec!["c".to_string()]);
    assert_eq!(xp.module.labels(), &["B1", "B2", &cusp_label("c")]);
    assert_eq!(xp.module.degrees(), &[4, 8, 0]);

    let s = find(&p, &h(&[1], &[0, 1, 2]), 1, &["L", "B1", "B2"], 0);
    let xs = preliminary_x(&p, s).unwrap();
    assert!(xs.z.is_empty());
    assert_eq!(xs.module.degrees(), &[-f.mu("L"), 4, 8]);

    let x = XFunctor::build(&p, gf(2)).unwrap();
    let m = x.map(s, s_prime).unwrap().matrix();
    // columns L, B1, B2; rows B1, B2, v[c]
    assert_eq!(
        m,
        Matrix::from_rows(gf(2), &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]])
    );
}

#[test]
fn lowest_regions_are_zero() {
    for name in common::CORPUS {
        let p = strata(name);
        for hc in p.handles().cells_of_dim(2) {
            let zeros = p
                .strata()
                .iter()
                .filter(|st| {
                    st.handle == *hc && st.dim == 3 && preliminary_x(&p, st.id).unwrap().dim() == 0
                })
                .count();
            assert_eq!(zeros, 1, "{name}: {hc}");
        }
    }
    let p = strata("one_sheet");
    for hc in p.handles().cells_of_dim(2) {
        let mut dims: Vec<usize> = p
            .strata()
            .iter()
            .filter(|st| st.handle == *hc && st.dim == 3)
            .map(|st| preliminary_x(&p, st.id).unwrap().dim())
            .collect();
        dims.sort();
        assert_eq!(dims, vec![0, 1], "{hc}");
    }
}

#[test]
fn x_is_a_functor_on_the_corpus() {
    for name in common::CORPUS {
        assert!(check_x_functor(&strata(name), gf(2)).unwrap(), "{name}");
    }
}

#[test]
fn wrong_delta_breaks_x_functor() {
    let p = strata("cusp_sheet_vertex");
    let s_prime = find(&p, &h(&[1], &[0, 1]), 2, &["B1", "B2"], 1);
    let s = find(&p, &h(&[1], &[0, 1, 2]), 1, &["L", "B1", "B2"], 0);
    let mut x = XFunctor::build(&p, gf(2)).unwrap();
    assert!(x.functor_failures(&p).is_empty());
    // drop δ(L, c, s′)
    x.map_mut(s, s_prime).unwrap().k.set(0, 0, 0);
    assert!(!x.functor_failures(&p).is_empty());
}

#[test]
fn every_corpus_sheaf_satisfies_the_conditions() {
    let mut checked = std::collections::BTreeMap::new();
    for name in common::CORPUS {
        let p = strata(name);
        for q in [2, 3] {
            for (i, chd) in chds(&p, q).iter().enumerate() {
                let sheaf = build_sheaf(&p, chd).unwrap();
                let report = verify_axioms(&sheaf);
                assert!(report.passed(), "{name} p={q} #{i}\n{report}");
                for c in &report.checks {
                    *checked.entry(c.name.clone()).or_insert(0) += c.checked;
                }
            }
        }
    }
    for (name, n) in checked {
        assert!(n > 0, "{name} never exercised");
    }
}

#[test]
fn one_sheet_has_no_crossing_squares() {
    let p = strata("one_sheet");
    let sheaf = build_sheaf(&p, &chds(&p, 2)[0]).unwrap();
    let r = verify_axioms(&sheaf);
    let c = r.check(CHECK_CROSSING).unwrap();
    assert_eq!(c.checked, 0);
    assert!(c.passed());
}

#[test]
fn downward_maps_are_identities() {
    let p = strata("triple_point_vertex");
    let sheaf = build_sheaf(&p, &chds(&p, 3)[4]).unwrap();
    let mut n = 0;
    for (&(s, t), fl) in p.edges() {
        if fl.downward {
            let dim = sheaf.complex(s).dim();
            assert_eq!(sheaf.complex(s), sheaf.complex(t));
            assert_eq!(sheaf.map(s, t).unwrap(), &Matrix::identity(gf(3), dim));
            n += 1;
        }
    }
    assert!(n > 0);
}

#[test]
fn stratum_diagrams_are_valid() {
    for name in common::CORPUS {
        let p = strata(name);
        let chd = &chds(&p, 3)[0];
        for st in p.strata() {
            let d = g_of(&p, chd, st.id, &preliminary_x(&p, st.id).unwrap()).unwrap();
            assert!(validate_diagram(&d).is_empty(), "{name}: {}", st.id);
            if !st.handle.lower.vertices().is_empty() && st.handle.lower.dim() == 1 {
                let x = preliminary_x(&p, st.id).unwrap();
                let a = d.face_map(&st.handle.lower).unwrap();
                for i in x.y.len()..x.dim() {
                    assert_eq!(a.get(i, i), 1);
                }
            }
        }
    }
}

#[test]
fn microlocal_rank_is_one() {
    for name in common::CORPUS {
        let p = strata(name);
        let sheaf = build_sheaf(&p, &chds(&p, 2)[0]).unwrap();
        for st in p
            .strata()
            .iter()
            .filter(|st| st.tag == StratumType::Legendrian2)
        {
            assert_eq!(
                microlocal_rank(&sheaf, st.id).unwrap(),
                1,
                "{name}: {}",
                st.id
            );
        }
    }
}

#[test]
fn zero_sheaf_has_rank_zero() {
    let p = strata("two_sheets");
    let zero = SheafFunctor::zero(&p, gf(2));
    let legendrian = p
        .strata()
        .iter()
        .filter(|st| st.tag == StratumType::Legendrian2);
    for st in legendrian {
        assert_eq!(microlocal_rank(&zero, st.id).unwrap(), 0);
    }
    let region = p
        .strata()
        .iter()
        .find(|st| st.tag == StratumType::ThreeStratum)
        .unwrap()
        .id;
    assert!(matches!(
        microlocal_rank(&zero, region),
        Err(SheafError::NotLegendrian(_))
    ));
}

#[test]
fn higher_rank_is_not_implemented() {
    let p = strata("one_sheet");
    let chd = &chds(&p, 2)[0];
    assert!(matches!(
        build_sheaf_of_rank(&p, chd, 2),
        Err(SheafError::NotImplemented(_))
    ));
    assert!(build_sheaf_of_rank(&p, chd, 1).is_ok());
}

#[test]
fn mutated_chds_fail_somewhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["crossing_circle", "cusp_sheet_vertex"] {
        let p = strata(name);
        let base = &chds(&p, 3)[1];
        for _ in 0..10 {
            let mut chd = base.clone();
            let cells: Vec<SimplexIndex> = chd
                .maps()
                .keys()
                .filter(|c| chd.map(c).unwrap().rows() > 0)
                .cloned()
                .collect();
            let cell = &cells[rng.gen_range(0..cells.len())];
            let m = chd.map_mut(cell).unwrap();
            let (r, c) = (rng.gen_range(0..m.rows()), rng.gen_range(0..m.cols()));
            let v = m.get(r, c);
            m.set(r, c, gf(3).add(v, 1 + rng.gen_range(0..2)));
            if !validate_chd(p.front(), &chd).is_empty() {
                let caught = match build_sheaf(&p, &chd) {
                    Err(_) => true,
                    Ok(sheaf) => !verify_axioms(&sheaf).passed(),
                };
                assert!(caught, "{name}: {cell} ({r}, {c})");
            }
        }
    }
}
