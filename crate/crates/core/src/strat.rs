//! The handle decomposition dual to the pair subdivision and the
//! stratification of `M × ℝ` it cuts out of the front.
//!
//! Every handle `h(e_I, e_J)` meets the simplex `e_K` (`e_J ≤ e_K`) in a
//! single open cell; these base cells carry the fibre of `e_K`. Over a base
//! cell the front splits the vertical line into alternating gaps and loci,
//! and a stratum is a connected component of such pieces inside one handle
//! and one `Λ^F_k`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cobar::SimplexIndex;
use crate::front::{FrontComplex, FrontError, Locus};

#[derive(Debug, Error)]
pub enum StratError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error("stratification needs a 2-dimensional base, got dimension {0}")]
    NotSurface(usize),
    #[error("construction error at {cells}: {message}")]
    Construction { cells: String, message: String },
}

fn construction(cells: impl fmt::Display, message: impl Into<String>) -> StratError {
    StratError::Construction {
        cells: cells.to_string(),
        message: message.into(),
    }
}

fn cell_key(s: &SimplexIndex) -> (usize, &[usize]) {
    (s.dim(), s.vertices())
}

/// `h(e_I, e_J)` for `e_I ≤ e_J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HandleCell {
    pub lower: SimplexIndex,
    pub upper: SimplexIndex,
}

impl HandleCell {
    pub fn new(lower: SimplexIndex, upper: SimplexIndex) -> Option<Self> {
        lower.is_face_of(&upper).then_some(Self { lower, upper })
    }

    /// `2 - (dim e_J - dim e_I)`.
    pub fn dim(&self) -> usize {
        2 + self.lower.dim() - self.upper.dim()
    }

    /// Closure order: `self ≤ other` iff `e_I ≤ e_I'` and `e_J ≥ e_J'`.
    pub fn is_face_of(&self, other: &HandleCell) -> bool {
        self.lower.is_face_of(&other.lower) && other.upper.is_face_of(&self.upper)
    }

    fn key(&self) -> ((usize, &[usize]), (usize, &[usize])) {
        (cell_key(&self.lower), cell_key(&self.upper))
    }
}

impl PartialOrd for HandleCell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HandleCell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for HandleCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h({}; {})", self.lower, self.upper)
    }
}

#[derive(Clone, Debug)]
pub struct HandleDecomposition {
    cells: Vec<HandleCell>,
    base_euler: i64,
}

impl HandleDecomposition {
    /// Ordered by `(e_I, e_J)`, each in `(dim, lex)` order.
    pub fn cells(&self) -> &[HandleCell] {
        &self.cells
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &HandleCell> {
        self.cells.iter().filter(move |h| h.dim() == d)
    }

    /// Cells strictly below `h` in the closure order.
    pub fn boundary(&self, h: &HandleCell) -> Vec<&HandleCell> {
        self.cells
            .iter()
            .filter(|g| *g != h && g.is_face_of(h))
            .collect()
    }

    /// Cells strictly above `h`.
    pub fn star(&self, h: &HandleCell) -> Vec<&HandleCell> {
        self.cells
            .iter()
            .filter(|g| *g != h && h.is_face_of(g))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|h| if h.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// `V - E + F` of the base.
    pub fn base_euler_characteristic(&self) -> i64 {
        self.base_euler
    }

    /// The two pairs of opposite edges at a 0-cell `h(v, T)`: with `e1, e2`
    /// the edges of `T` through `v`, `h(v, e1)` continues into `h(e2, T)`.
    pub fn opposite_edges(&self, h: &HandleCell) -> Option<[(HandleCell, HandleCell); 2]> {
        if h.dim() != 0 {
            return None;
        }
        let v = h.lower.vertices()[0];
        let edges: Vec<SimplexIndex> = h
            .upper
            .faces()
            .into_iter()
            .filter(|e| e.dim() == 1 && e.vertices().contains(&v))
            .collect();
        let (e1, e2) = (edges[0].clone(), edges[1].clone());
        let mk = |a: &SimplexIndex, b: &SimplexIndex| HandleCell {
            lower: a.clone(),
            upper: b.clone(),
        };
        Some([
            (mk(&h.lower, &e1), mk(&e2, &h.upper)),
            (mk(&h.lower, &e2), mk(&e1, &h.upper)),
        ])
    }
}

/// One handle cell per face pair of a 2-dimensional base; checks that
/// 0-cells are 4-valent.
pub fn build_handles(front: &FrontComplex) -> Result<HandleDecomposition, StratError> {
    let n = front.base_dim();
    if n != 2 {
        return Err(StratError::NotSurface(n));
    }
    let mut cells = Vec::new();
    for upper in front.cells() {
        for lower in upper.faces() {
            cells.push(HandleCell {
                lower,
                upper: upper.clone(),
            });
        }
    }
    cells.sort();
    let base_euler = front
        .cells()
        .iter()
        .map(|c| if c.dim() % 2 == 0 { 1 } else { -1 })
        .sum();
    let hd = HandleDecomposition { cells, base_euler };
    for h in hd.cells_of_dim(0) {
        let valence = hd.star(h).into_iter().filter(|g| g.dim() == 1).count();
        if valence != 4 {
            return Err(construction(
                h,
                format!("0-cell has {valence} edges, expected 4"),
            ));
        }
    }
    Ok(hd)
}

/// Position in the vertical line over a base cell: gap `i` lies directly
/// above locus `i`, gap `r` below everything.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Gap(usize),
    Point(usize),
}

impl Slot {
    fn from_pos(pos: usize) -> Self {
        if pos % 2 == 0 {
            Slot::Gap(pos / 2)
        } else {
            Slot::Point(pos / 2)
        }
    }

    pub fn is_gap(self) -> bool {
        matches!(self, Slot::Gap(_))
    }
}

/// `h(e_I, e_J) ∩ e_K`.
#[derive(Clone, Debug)]
pub struct BaseCell {
    pub handle: usize,
    pub carrier: SimplexIndex,
    pub dim: usize,
    /// Base cells in the closure, including this one.
    closure: Vec<usize>,
    offset: usize,
    loci: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StratumType {
    ThreeStratum,
    Legendrian2,
    Vertical2,
    F2,
    V2,
    FV,
    Cu,
    F3,
    F2V,
    FV2,
    VCu,
    FCu,
}

impl StratumType {
    pub fn name(self) -> &'static str {
        match self {
            StratumType::ThreeStratum => "3-stratum",
            StratumType::Legendrian2 => "Legendrian-2",
            StratumType::Vertical2 => "vertical-2",
            StratumType::F2 => "F2",
            StratumType::V2 => "V2",
            StratumType::FV => "FV",
            StratumType::Cu => "Cu",
            StratumType::F3 => "F3",
            StratumType::F2V => "F2V",
            StratumType::FV2 => "FV2",
            StratumType::VCu => "VCu",
            StratumType::FCu => "FCu",
        }
    }

    /// The `k` of `Λ^F_k` containing strata of this type.
    pub fn lambda_f(self) -> i8 {
        match self {
            StratumType::ThreeStratum | StratumType::Vertical2 | StratumType::V2 => -1,
            StratumType::Legendrian2 | StratumType::FV | StratumType::FV2 => 0,
            StratumType::F2 | StratumType::Cu | StratumType::F2V | StratumType::VCu => 1,
            StratumType::F3 | StratumType::FCu => 2,
        }
    }

    fn classify(handle_dim: usize, locus: Option<&Locus>) -> Option<Self> {
        use StratumType::*;
        let t = match (handle_dim, locus) {
            (2, None) => ThreeStratum,
            (1, None) => Vertical2,
            (0, None) => V2,
            (2, Some(Locus::Sheets(v))) if v.len() == 1 => Legendrian2,
            (2, Some(Locus::Sheets(v))) if v.len() == 2 => F2,
            (2, Some(Locus::Sheets(v))) if v.len() == 3 => F3,
            (2, Some(Locus::Cusp(_))) => Cu,
            (2, Some(Locus::CuspSheet { .. })) => FCu,
            (1, Some(Locus::Sheets(v))) if v.len() == 1 => FV,
            (1, Some(Locus::Sheets(v))) if v.len() == 2 => F2V,
            (1, Some(Locus::Cusp(_))) => VCu,
            (0, Some(Locus::Sheets(v))) if v.len() == 1 => FV2,
            _ => return None,
        };
        Some(t)
    }
}

impl fmt::Display for StratumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub id: usize,
    pub handle: HandleCell,
    /// Human-readable z-descriptor: a locus token, or the gap it borders.
    pub slot: String,
    pub lambda_f: i8,
    pub tag: StratumType,
    pub dim: usize,
    cells: Vec<usize>,
}

impl Stratum {
    pub fn is_gap(&self) -> bool {
        self.lambda_f == -1
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeFlags {
    pub downward: bool,
    pub generalized_downward: bool,
    pub same_lambda_f: bool,
}

/// Condition (3) configuration around a crossing arc `o`: `n` is the region
/// above it and `sides` the two Legendrian 2-strata between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingSquare {
    pub o: usize,
    pub sides: [usize; 2],
    pub n: usize,
}

/// `s1 < s2a, s2b < s3` with dimensions 1, 2, 2, 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopSquare {
    pub s1: usize,
    pub s2a: usize,
    pub s2b: usize,
    pub s3: usize,
}

#[derive(Clone, Debug)]
pub struct StratPoset {
    front: FrontComplex,
    handles: HandleDecomposition,
    bcells: Vec<BaseCell>,
    /// Owning base cell of each fine cell.
    fine_owner: Vec<usize>,
    fine_stratum: Vec<usize>,
    strata: Vec<Stratum>,
    below: Vec<BTreeSet<usize>>,
    above: Vec<BTreeSet<usize>>,
    edges: BTreeMap<(usize, usize), EdgeFlags>,
    crossing_squares: Vec<CrossingSquare>,
    top_squares: Vec<TopSquare>,
}

/// Fibre positions over `face` in the closure of position `pos` over `cell`,
/// given the limit map `lim` from the loci of `cell`.
fn closure_range(pos: usize, loci: usize, lim: &[usize], face_loci: usize) -> (usize, usize) {
    match Slot::from_pos(pos) {
        Slot::Point(i) => (2 * lim[i] + 1, 2 * lim[i] + 1),
        Slot::Gap(i) => {
            let top = if i == 0 { 0 } else { 2 * lim[i - 1] + 1 };
            let bottom = if i == loci {
                2 * face_loci
            } else {
                2 * lim[i] + 1
            };
            (top, bottom)
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

pub fn build_strata(front: &FrontComplex) -> Result<StratPoset, StratError> {
    front.ensure_valid()?;
    let handles = build_handles(front)?;
    let hidx: BTreeMap<&HandleCell, usize> = handles
        .cells
        .iter()
        .enumerate()
        .map(|(i, h)| (h, i))
        .collect();

    // base cells, ordered by (handle, carrier)
    let mut bcells = Vec::new();
    let mut bidx: BTreeMap<(usize, SimplexIndex), usize> = BTreeMap::new();
    let mut offset = 0;
    for (hi, h) in handles.cells.iter().enumerate() {
        let mut carriers: Vec<&SimplexIndex> = front
            .cells()
            .iter()
            .filter(|k| h.upper.is_face_of(k))
            .collect();
        carriers.sort_by_key(|k| cell_key(k));
        for k in carriers {
            let loci = front.fiber(k)?.loci.len();
            bidx.insert((hi, k.clone()), bcells.len());
            bcells.push(BaseCell {
                handle: hi,
                carrier: k.clone(),
                dim: k.dim() + h.lower.dim() - h.upper.dim(),
                closure: Vec::new(),
                offset,
                loci,
            });
            offset += 2 * loci + 1;
        }
    }
    let nfine = offset;

    // closure: (I', J', K') ≤ (I, J, K) iff I' ≤ I, J' ≥ J, K' ≤ K
    for b in 0..bcells.len() {
        let h = &handles.cells[bcells[b].handle];
        let k = bcells[b].carrier.clone();
        let mut cl = BTreeSet::new();
        for i2 in h.lower.faces() {
            for k2 in k.faces() {
                for j2 in k2.faces() {
                    if h.upper.is_face_of(&j2) && i2.is_face_of(&j2) {
                        let g = HandleCell {
                            lower: i2.clone(),
                            upper: j2,
                        };
                        let gi = hidx[&g];
                        cl.insert(bidx[&(gi, k2.clone())]);
                    }
                }
            }
        }
        bcells[b].closure = cl.into_iter().collect();
    }

    let mut limits: BTreeMap<(SimplexIndex, SimplexIndex), Vec<usize>> = BTreeMap::new();
    for b in &bcells {
        for &c in &b.closure {
            let face = bcells[c].carrier.clone();
            let key = (face.clone(), b.carrier.clone());
            if let std::collections::btree_map::Entry::Vacant(slot) = limits.entry(key) {
                let lim = front
                    .limit_map(&face, &b.carrier)
                    .map_err(|m| construction(format!("{face} < {}", b.carrier), m))?;
                slot.insert(lim);
            }
        }
    }

    let mut fine_owner = vec![0; nfine];
    for (bi, b) in bcells.iter().enumerate() {
        for p in 0..=2 * b.loci {
            fine_owner[b.offset + p] = bi;
        }
    }
    let locus_of = |f: usize| -> Option<&Locus> {
        let b = &bcells[fine_owner[f]];
        match Slot::from_pos(f - b.offset) {
            Slot::Gap(_) => None,
            Slot::Point(i) => Some(&front.fiber(&b.carrier).expect("carrier in front").loci[i]),
        }
    };
    let class = |f: usize| -> i8 { locus_of(f).map_or(-1, |l| l.k() as i8) };

    // fine-cell closures
    let mut fine_closure: Vec<Vec<usize>> = vec![Vec::new(); nfine];
    for b in &bcells {
        for p in 0..=2 * b.loci {
            let f = b.offset + p;
            let mut out = Vec::new();
            for &c in &b.closure {
                let face = &bcells[c];
                let lim = &limits[&(face.carrier.clone(), b.carrier.clone())];
                let (lo, hi) = closure_range(p, b.loci, lim, face.loci);
                out.extend((lo..=hi).map(|q| face.offset + q));
            }
            out.sort();
            out.dedup();
            fine_closure[f] = out;
        }
    }

    let mut uf = UnionFind((0..nfine).collect());
    for f in 0..nfine {
        let hf = bcells[fine_owner[f]].handle;
        for &c in &fine_closure[f] {
            if bcells[fine_owner[c]].handle == hf && class(c) == class(f) {
                uf.union(f, c);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..nfine {
        comps.entry(uf.find(f)).or_default().push(f);
    }
    // roots are minimal members, so iteration order is by first fine cell
    let mut fine_stratum = vec![0; nfine];
    let mut strata = Vec::new();
    for cells in comps.into_values() {
        let id = strata.len();
        let first = cells[0];
        let handle = handles.cells[bcells[fine_owner[first]].handle].clone();
        let k = class(first);
        let dim_of = |f: usize| bcells[fine_owner[f]].dim + usize::from(k == -1);
        let dim = cells.iter().map(|&f| dim_of(f)).max().unwrap();
        let expected = handle.dim() as i64 + i64::from(k == -1) - i64::from(k.max(0));
        if dim as i64 != expected {
            return Err(construction(
                &handle,
                format!("stratum of dimension {dim}, expected {expected}"),
            ));
        }
        let rep = *cells.iter().find(|&&f| dim_of(f) == dim).unwrap();
        let tag = StratumType::classify(handle.dim(), locus_of(rep)).ok_or_else(|| {
            construction(
                &handle,
                format!("untyped locus {:?}", locus_of(rep).map(Locus::token)),
            )
        })?;
        for &f in &cells {
            if StratumType::classify(handle.dim(), locus_of(f)) != Some(tag) {
                return Err(construction(
                    &handle,
                    format!("stratum mixes {tag} with other loci"),
                ));
            }
        }
        let rb = &bcells[fine_owner[rep]];
        let fiber = front.fiber(&rb.carrier)?;
        let slot = match Slot::from_pos(rep - rb.offset) {
            Slot::Point(i) => fiber.loci[i].token(),
            Slot::Gap(0) => "gap at top".to_string(),
            Slot::Gap(i) => format!("gap below {}", fiber.loci[i - 1].token()),
        };
        for &f in &cells {
            fine_stratum[f] = id;
        }
        strata.push(Stratum {
            id,
            handle,
            slot,
            lambda_f: k,
            tag,
            dim,
            cells,
        });
    }

    // poset
    let ns = strata.len();
    let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ns];
    let mut closure_of: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ns];
    for s in &strata {
        for &f in &s.cells {
            for &c in &fine_closure[f] {
                closure_of[s.id].insert(c);
                if fine_stratum[c] != s.id {
                    below[s.id].insert(fine_stratum[c]);
                }
            }
        }
    }
    let mut above: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ns];
    for (t, set) in below.iter().enumerate() {
        for &s in set {
            above[s].insert(t);
            if below[s].contains(&t) {
                return Err(construction(
                    &strata[s].handle,
                    format!("strata {s} and {t} lie in each other's closure"),
                ));
            }
            if !strata[s].cells.iter().all(|f| closure_of[t].contains(f)) {
                return Err(construction(
                    format!("{} / {}", strata[s].handle, strata[t].handle),
                    format!("stratum {s} meets the closure of {t} without lying in it"),
                ));
            }
            if !strata[s].handle.is_face_of(&strata[t].handle) {
                return Err(construction(
                    &strata[s].handle,
                    format!("stratum {s} below {t} across unrelated handles"),
                ));
            }
        }
    }
    for t in 0..ns {
        for &s in &below[t] {
            if let Some(&r) = below[s].iter().find(|r| !below[t].contains(r)) {
                return Err(construction(
                    &strata[t].handle,
                    format!("order not transitive at {r} < {s} < {t}"),
                ));
            }
        }
    }

    // downward targets
    let mut downward: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ns];
    for s in &strata {
        if s.is_gap() {
            continue;
        }
        let mut per_cell: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &f in &s.cells {
            per_cell.entry(fine_owner[f]).or_default().push(f);
        }
        for fs in per_cell.values() {
            if let [f] = fs.as_slice() {
                downward[s.id].insert(fine_stratum[f + 1]);
            }
        }
    }
    let mut edges = BTreeMap::new();
    for s in 0..ns {
        for &t in &above[s] {
            let down = downward[s].contains(&t);
            let gen = downward[t].iter().any(|u| downward[s].contains(u));
            edges.insert(
                (s, t),
                EdgeFlags {
                    downward: down,
                    generalized_downward: gen,
                    same_lambda_f: strata[s].lambda_f == strata[t].lambda_f,
                },
            );
        }
    }

    let mut poset = StratPoset {
        front: front.clone(),
        handles,
        bcells,
        fine_owner,
        fine_stratum,
        strata,
        below,
        above,
        edges,
        crossing_squares: Vec::new(),
        top_squares: Vec::new(),
    };
    poset.crossing_squares = poset.find_crossing_squares()?;
    poset.top_squares = poset.find_top_squares();
    Ok(poset)
}

impl StratPoset {
    pub fn front(&self) -> &FrontComplex {
        &self.front
    }

    pub fn handles(&self) -> &HandleDecomposition {
        &self.handles
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, id: usize) -> &Stratum {
        &self.strata[id]
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// `s ≤ t`.
    pub fn le(&self, s: usize, t: usize) -> bool {
        s == t || self.below[t].contains(&s)
    }

    /// Strata strictly above `s`.
    pub fn above(&self, s: usize) -> &BTreeSet<usize> {
        &self.above[s]
    }

    /// Strata strictly below `s`.
    pub fn below(&self, s: usize) -> &BTreeSet<usize> {
        &self.below[s]
    }

    /// Every strict relation `s < t` with its flags.
    pub fn edges(&self) -> &BTreeMap<(usize, usize), EdgeFlags> {
        &self.edges
    }

    /// Relations `s < t` not factoring through a third stratum.
    pub fn covering_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .keys()
            .filter(|(s, t)| !self.above[*s].iter().any(|u| self.below[*t].contains(u)))
            .copied()
            .collect()
    }

    pub fn classify_edge(&self, s: usize, t: usize) -> Option<EdgeFlags> {
        self.edges.get(&(s, t)).copied()
    }

    pub fn crossing_squares(&self) -> &[CrossingSquare] {
        &self.crossing_squares
    }

    pub fn top_dimensional_squares(&self) -> &[TopSquare] {
        &self.top_squares
    }

    /// Carrier simplex and slot of every piece of `s` over a base cell.
    pub fn pieces(&self, s: usize) -> impl Iterator<Item = (&SimplexIndex, Slot)> + '_ {
        self.strata[s].cells.iter().map(move |&f| {
            let b = &self.bcells[self.fine_owner[f]];
            (&b.carrier, Slot::from_pos(f - b.offset))
        })
    }

    /// The 3-stratum bordering a Legendrian 2-stratum from above, or the
    /// region directly above a crossing arc.
    pub fn region_above(&self, s: usize) -> Option<usize> {
        let st = &self.strata[s];
        if st.is_gap() {
            return None;
        }
        let targets: BTreeSet<usize> = st.cells.iter().map(|&f| self.fine_stratum[f - 1]).collect();
        (targets.len() == 1).then(|| *targets.iter().next().unwrap())
    }

    /// The region directly below a point stratum.
    pub fn region_below(&self, s: usize) -> Option<usize> {
        let st = &self.strata[s];
        if st.is_gap() {
            return None;
        }
        let targets: BTreeSet<usize> = st.cells.iter().map(|&f| self.fine_stratum[f + 1]).collect();
        (targets.len() == 1).then(|| *targets.iter().next().unwrap())
    }

    fn find_crossing_squares(&self) -> Result<Vec<CrossingSquare>, StratError> {
        let mut out = Vec::new();
        for o in self.strata.iter().filter(|s| s.tag == StratumType::F2) {
            let n = self.region_above(o.id).ok_or_else(|| {
                construction(
                    &o.handle,
                    format!("crossing stratum {} has no single region above", o.id),
                )
            })?;
            let sides: Vec<usize> = self.above[o.id]
                .iter()
                .copied()
                .filter(|&s| {
                    self.strata[s].tag == StratumType::Legendrian2 && self.below[n].contains(&s)
                })
                .collect();
            if sides.len() != 2 {
                return Err(construction(
                    &o.handle,
                    format!(
                        "crossing stratum {} has {} Legendrian strata below the region above it",
                        o.id,
                        sides.len()
                    ),
                ));
            }
            out.push(CrossingSquare {
                o: o.id,
                sides: [sides[0], sides[1]],
                n,
            });
        }
        Ok(out)
    }

    /// Whether some base cell shows `mid` strictly between `a` and `b` in z.
    fn between(&self, mid: usize, a: usize, b: usize) -> bool {
        let at = |s: usize| -> BTreeMap<usize, Vec<usize>> {
            let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &f in &self.strata[s].cells {
                m.entry(self.fine_owner[f]).or_default().push(f);
            }
            m
        };
        let (ma, mb, mm) = (at(a), at(b), at(mid));
        ma.iter().any(|(bc, fa)| {
            let (Some(fb), Some(fm)) = (mb.get(bc), mm.get(bc)) else {
                return false;
            };
            fa.iter().any(|&x| {
                fb.iter()
                    .any(|&y| fm.iter().any(|&z| x.min(y) < z && z < x.max(y)))
            })
        })
    }

    fn find_top_squares(&self) -> Vec<TopSquare> {
        let mut out = Vec::new();
        for s1 in self.strata.iter().filter(|s| s.dim == 1) {
            for &s3 in self.above[s1.id]
                .iter()
                .filter(|&&t| self.strata[t].dim == 3)
            {
                let mids: Vec<usize> = self.above[s1.id]
                    .iter()
                    .copied()
                    .filter(|&t| self.strata[t].dim == 2 && self.below[s3].contains(&t))
                    .collect();
                for (i, &a) in mids.iter().enumerate() {
                    for &b in &mids[i + 1..] {
                        if s1.tag == StratumType::Cu && !self.between(s3, a, b) {
                            continue;
                        }
                        out.push(TopSquare {
                            s1: s1.id,
                            s2a: a,
                            s2b: b,
                            s3,
                        });
                    }
                }
            }
        }
        out
    }

    /// Multi-line dump: one line per stratum with its covering relations.
    pub fn dump(&self) -> String {
        let cover = self.covering_edges();
        let mut up: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, t) in cover {
            up.entry(s).or_default().push(t);
        }
        let mut out = String::new();
        for s in &self.strata {
            let ups: Vec<String> = up
                .get(&s.id)
                .into_iter()
                .flatten()
                .map(usize::to_string)
                .collect();
            out.push_str(&format!(
                "{} {} slot=\"{}\" k={} type={} dim={} covers<[{}]\n",
                s.id,
                s.handle,
                s.slot,
                s.lambda_f,
                s.tag,
                s.dim,
                ups.join(",")
            ));
        }
        out
    }
}
