#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use frontsheaf::cobar::SimplexIndex;
use frontsheaf::front::FrontComplex;
use frontsheaf::homalg::{GradedModule, Matrix, PrimeField};
use frontsheaf::simplex::SimplexDiagram;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS: [&str; 6] = [
    "one_sheet",
    "two_sheets",
    "crossing_circle",
    "unknot_sphere",
    "cusp_sheet_vertex",
    "triple_point_vertex",
];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.toml"))
}

pub fn load(name: &str) -> FrontComplex {
    FrontComplex::load_validated(&corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn random_graded(
    rng: &mut ChaCha8Rng,
    f: PrimeField,
    degs: &[i64],
    shift: i64,
    strict: bool,
) -> Matrix {
    let n = degs.len();
    let mut m = Matrix::zeros(f, n, n);
    for r in 0..n {
        for c in 0..n {
            if degs[r] == degs[c] + shift && (r > c || (!strict && r == c)) {
                m.set(r, c, rng.gen_range(0..f.p()));
            }
        }
    }
    m
}

fn inverse(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut out = Matrix::zeros(m.field(), n, n);
    for c in 0..n {
        let mut e = vec![0; n];
        e[c] = 1;
        let col = m.solve(&e).expect("invertible");
        for (r, v) in col.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

/// A random valid diagram on `[0..n]`, `n ≤ 3`, over GF(p): conjugated
/// differentials, chain maps perturbed by null-homotopic terms, and all
/// higher maps drawn from the solution space of the face identities, which
/// is affine in them for `n ≤ 3`. `None` if that space is empty.
pub fn random_diagram(seed: u64, n: usize, p: u32) -> Option<SimplexDiagram> {
    assert!(n <= 3);
    let f = PrimeField::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=4);
    let mut degs: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=1)).collect();
    degs.sort();
    let labels = (0..dim).map(|i| format!("x{i}")).collect();
    let module = GradedModule::new(labels, degs.clone()).unwrap();

    let mut base = Matrix::zeros(f, dim, dim);
    let mut used = vec![false; dim];
    for a in 0..dim {
        if used[a] || rng.gen_bool(0.3) {
            continue;
        }
        if let Some(b) = (a + 1..dim).find(|&b| !used[b] && degs[b] == degs[a] + 1) {
            used[a] = true;
            used[b] = true;
            base.set(b, a, 1);
        }
    }
    let simplex = SimplexIndex::new((0..=n).collect()).unwrap();
    let unit =
        |rng: &mut ChaCha8Rng| random_graded(rng, f, &degs, 0, true).add(&Matrix::identity(f, dim));
    let gauges: Vec<Matrix> = (0..=n).map(|_| unit(&mut rng)).collect();

    let mut maps: BTreeMap<SimplexIndex, Matrix> = BTreeMap::new();
    let mut unknowns = Vec::new();
    for face in simplex.faces() {
        let v = face.vertices();
        let map = match face.dim() {
            0 => gauges[v[0]].mul(&base).mul(&inverse(&gauges[v[0]])),
            1 => {
                let h = random_graded(&mut rng, f, &degs, -1, true);
                let (d0, d1) = (
                    &maps[&SimplexIndex::vertex(v[0])],
                    &maps[&SimplexIndex::vertex(v[1])],
                );
                gauges[v[1]]
                    .mul(&inverse(&gauges[v[0]]))
                    .add(&d1.mul(&h))
                    .add(&h.mul(d0))
            }
            m => {
                let shift = 1 - m as i64;
                for r in 0..dim {
                    for c in 0..dim {
                        if degs[r] == degs[c] + shift {
                            unknowns.push((face.clone(), r, c));
                        }
                    }
                }
                Matrix::zeros(f, dim, dim)
            }
        };
        maps.insert(face, map);
    }
    let higher: Vec<SimplexIndex> = simplex
        .faces()
        .into_iter()
        .filter(|x| x.dim() >= 2)
        .collect();
    let defects = |maps: &BTreeMap<SimplexIndex, Matrix>| -> Vec<u32> {
        let d = SimplexDiagram::new(f, simplex.clone(), module.clone(), maps.clone()).unwrap();
        higher
            .iter()
            .flat_map(|face| {
                let m = d.identity_defect(face);
                (0..dim * dim).map(move |i| m.get(i / dim, i % dim))
            })
            .collect()
    };
    let at_zero = defects(&maps);
    let mut lin = Matrix::zeros(f, at_zero.len(), unknowns.len());
    for (u, (face, r, c)) in unknowns.iter().enumerate() {
        let mut probe = maps.clone();
        probe.get_mut(face).unwrap().set(*r, *c, 1);
        for (i, (a, b)) in defects(&probe).into_iter().zip(&at_zero).enumerate() {
            lin.set(i, u, f.sub(a, *b));
        }
    }
    let rhs: Vec<u32> = at_zero.iter().map(|&x| f.neg(x)).collect();
    let mut x = lin.solve(&rhs)?;
    for kv in lin.kernel() {
        let t = rng.gen_range(0..p);
        for (xi, ki) in x.iter_mut().zip(kv) {
            *xi = f.add(*xi, f.mul(t, ki));
        }
    }
    for (u, (face, r, c)) in unknowns.iter().enumerate() {
        maps.get_mut(face).unwrap().set(*r, *c, x[u]);
    }
    Some(SimplexDiagram::new(f, simplex, module, maps).unwrap())
}

/// First valid random diagram from `seed` onward.
pub fn random_valid_diagram(seed: u64, n: usize, p: u32) -> SimplexDiagram {
    (0..64)
        .find_map(|i| random_diagram(seed.wrapping_mul(64).wrapping_add(i), n, p))
        .expect("solvable diagram")
}
