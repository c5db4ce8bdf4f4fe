//! Finite-dimensional bigraded algebras presented by a species-like generating
//! bimodule and homogeneous relations, built degree by degree as balanced tensor
//! quotients. Houses T(S), Π(S) and Segre products.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::field_tower::{EchelonBasis, Fp};
use crate::species::{casimir, double, CasimirElement, DoubleSpecies, SpeciesSpec, VertexRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("component of degree {0} is nonzero at the truncation cap")]
    TruncationHit(usize),
    #[error("relation {0} is not homogeneous")]
    InhomogeneousRelation(usize),
}

/// Sparse vector: sorted `(index, nonzero coefficient)` pairs.
pub type SparseVec = Vec<(usize, u32)>;

/// Accumulates `c · v` into `acc`.
pub fn sv_axpy(f: &Fp, acc: &mut BTreeMap<usize, u32>, v: &[(usize, u32)], c: u32) {
    if c == 0 {
        return;
    }
    for &(i, x) in v {
        let e = acc.entry(i).or_insert(0);
        *e = f.addv(*e, f.mulv(c, x));
    }
}

pub fn sv_from_map(acc: BTreeMap<usize, u32>) -> SparseVec {
    acc.into_iter().filter(|&(_, x)| x != 0).collect()
}

pub fn sv_scale(f: &Fp, v: &[(usize, u32)], c: u32) -> SparseVec {
    if c == 0 {
        return Vec::new();
    }
    v.iter().map(|&(i, x)| (i, f.mulv(c, x))).collect()
}

/// Generating bimodule on an arrow `source → target`.
///
/// `left[r]` is the action of ring basis element `r` of the target ring and
/// `right[r]` that of the source ring; entry `[i][j]` is the coefficient of
/// basis vector `i` in the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub source: usize,
    pub target: usize,
    pub dim: usize,
    pub star: usize,
    pub left: Vec<Vec<Vec<u32>>>,
    pub right: Vec<Vec<Vec<u32>>>,
}

/// A letter `(generator, basis index)`; words are read left to right as products,
/// so the last letter is applied first.
pub type Letter = (usize, usize);

/// A homogeneous relation: linear combination of words of equal length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub terms: Vec<(u32, Vec<Letter>)>,
}

#[derive(Debug, Clone)]
pub struct Presentation {
    pub field: Fp,
    pub rings: Vec<VertexRing>,
    pub gens: Vec<GenSpec>,
    pub relations: Vec<Relation>,
}

/// How a basis element was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Word {
    /// Ring basis element `r` at a vertex.
    Ring { vertex: usize, r: usize },
    /// Letter times a lower basis element.
    Gen { gen: usize, idx: usize, child: usize },
    /// Pair of factor basis elements in a Segre product.
    Pair(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BasisElem {
    pub src: usize,
    pub tgt: usize,
    /// Path-length degree.
    pub l: usize,
    /// ★-degree.
    pub k: usize,
}

type RawKey = (usize, usize, usize);

#[derive(Debug)]
struct Presented {
    pres: Presentation,
    /// Per degree: raw monomial `(gen, idx, child)` to its normal form.
    levels: Vec<HashMap<RawKey, SparseVec>>,
}

#[derive(Debug)]
enum Products {
    Presented {
        data: Box<Presented>,
        cache: Mutex<HashMap<(usize, usize), SparseVec>>,
    },
    Segre {
        left: Arc<FiniteGradedAlgebra>,
        right: Arc<FiniteGradedAlgebra>,
        index: HashMap<(usize, usize), usize>,
    },
}

/// Basis-indexed algebra with idempotents and a (path length, ★) bidegree.
#[derive(Debug)]
pub struct FiniteGradedAlgebra {
    field: Fp,
    rings: Vec<VertexRing>,
    basis: Vec<BasisElem>,
    words: Vec<Word>,
    ring_basis: Vec<Vec<usize>>,
    names: Vec<String>,
    products: Products,
}

impl FiniteGradedAlgebra {
    /// Display name of a vertex; Segre vertices concatenate the factor names.
    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }
    pub fn set_vertex_names(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.num_vertices());
        self.names = names;
    }
    pub fn field(&self) -> Fp {
        self.field
    }
    pub fn num_vertices(&self) -> usize {
        self.rings.len()
    }
    pub fn vertex_ring(&self, v: usize) -> &VertexRing {
        &self.rings[v]
    }
    pub fn vertex_rings(&self) -> &[VertexRing] {
        &self.rings
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }
    pub fn elem(&self, i: usize) -> BasisElem {
        self.basis[i]
    }
    pub fn word(&self, i: usize) -> Word {
        self.words[i]
    }
    /// Basis indices of the degree-0 ring at `v`, in ring basis order.
    pub fn ring_basis(&self, v: usize) -> &[usize] {
        &self.ring_basis[v]
    }
    pub fn idempotent(&self, v: usize) -> usize {
        self.ring_basis[v][0]
    }
    pub fn top_degree(&self) -> usize {
        self.basis.iter().map(|b| b.l).max().unwrap_or(0)
    }
    pub fn max_star(&self) -> usize {
        self.basis.iter().map(|b| b.k).max().unwrap_or(0)
    }
    /// Basis elements of path-length degree 1.
    pub fn generators(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].l == 1).collect()
    }
    /// Basis of `A e_v`: elements starting at `v`.
    pub fn projective_basis(&self, v: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].src == v).collect()
    }
    /// Basis of `e_t A e_s`.
    pub fn hom_basis(&self, t: usize, s: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].src == s && self.basis[i].tgt == t).collect()
    }

    /// Factors of a Segre product, if this algebra is one.
    pub fn segre_factors(&self) -> Option<(&Arc<FiniteGradedAlgebra>, &Arc<FiniteGradedAlgebra>)> {
        match &self.products {
            Products::Segre { left, right, .. } => Some((left, right)),
            Products::Presented { .. } => None,
        }
    }
    /// Segre basis index of a pair of factor basis elements.
    pub fn segre_index(&self, a: usize, b: usize) -> Option<usize> {
        match &self.products {
            Products::Segre { index, .. } => index.get(&(a, b)).copied(),
            Products::Presented { .. } => None,
        }
    }

    /// Product of two basis elements.
    pub fn mul(&self, x: usize, y: usize) -> SparseVec {
        if self.basis[x].src != self.basis[y].tgt {
            return Vec::new();
        }
        match &self.products {
            Products::Presented { data, cache } => {
                if let Some(v) = cache.lock().expect("cache lock").get(&(x, y)) {
                    return v.clone();
                }
                let v = self.mul_presented(data, x, y);
                cache.lock().expect("cache lock").insert((x, y), v.clone());
                v
            }
            Products::Segre { left, right, index } => {
                let Word::Pair(a1, b1) = self.words[x] else { unreachable!() };
                let Word::Pair(a2, b2) = self.words[y] else { unreachable!() };
                let pa = left.mul(a1, a2);
                if pa.is_empty() {
                    return Vec::new();
                }
                let pb = right.mul(b1, b2);
                let f = self.field;
                let mut out = Vec::with_capacity(pa.len() * pb.len());
                for &(i, u) in &pa {
                    for &(j, w) in &pb {
                        out.push((index[&(i, j)], f.mulv(u, w)));
                    }
                }
                out.sort_unstable();
                out
            }
        }
    }

    fn mul_presented(&self, data: &Presented, x: usize, y: usize) -> SparseVec {
        let f = self.field;
        match self.words[x] {
            Word::Ring { vertex, r } => data.ring_left(self, vertex, r, y),
            Word::Gen { gen, idx, child } => {
                let z = self.mul(child, y);
                let level = self.basis[x].l + self.basis[y].l;
                let mut acc = BTreeMap::new();
                for (c, coef) in z {
                    sv_axpy(&f, &mut acc, &data.levels[level][&(gen, idx, c)], coef);
                }
                sv_from_map(acc)
            }
            Word::Pair(..) => unreachable!("presented algebras have no pair words"),
        }
    }

    /// Product of two elements.
    pub fn mul_vec(&self, x: &[(usize, u32)], y: &[(usize, u32)]) -> SparseVec {
        let f = self.field;
        let mut acc = BTreeMap::new();
        for &(i, a) in x {
            for &(j, b) in y {
                if self.basis[i].src == self.basis[j].tgt {
                    sv_axpy(&f, &mut acc, &self.mul(i, j), f.mulv(a, b));
                }
            }
        }
        sv_from_map(acc)
    }

    /// Dimension per bidegree (path length, ★).
    pub fn hilbert(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry((b.l, b.k)).or_insert(0) += 1;
        }
        out
    }

    /// Sum of dimensions per ★-degree.
    pub fn star_columns(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_star() + 1];
        for b in &self.basis {
            out[b.k] += 1;
        }
        out
    }

    /// Image of the letter `(gen, idx)` as an element, for presented algebras.
    pub fn letter(&self, gen: usize, idx: usize) -> Option<SparseVec> {
        match &self.products {
            Products::Presented { data, .. } => {
                let g = &data.pres.gens[gen];
                let e = self.idempotent(g.source);
                data.levels.get(1).and_then(|lv| lv.get(&(gen, idx, e)).cloned())
            }
            Products::Segre { .. } => None,
        }
    }

    /// The presentation this algebra was built from, if any.
    pub fn presentation(&self) -> Option<&Presentation> {
        match &self.products {
            Products::Presented { data, .. } => Some(&data.pres),
            Products::Segre { .. } => None,
        }
    }

    /// Left socle of `A e_v`, as `(l, k, target, K-dimension)` blocks.
    pub fn socle(&self, v: usize) -> Vec<SocleBlock> {
        let f = self.field;
        let gens = self.generators();
        let mut blocks: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
        for i in self.projective_basis(v) {
            let b = self.basis[i];
            blocks.entry((b.l, b.k, b.tgt)).or_default().push(i);
        }
        let mut out = Vec::new();
        for ((l, k, t), elems) in blocks {
            // Rows of the map x ↦ (g x)_g, one column per element of the block.
            let mut coords: HashMap<(usize, usize), usize> = HashMap::new();
            let mut cols: Vec<Vec<(usize, u32)>> = Vec::with_capacity(elems.len());
            for &x in &elems {
                let mut col = Vec::new();
                for (gi, &g) in gens.iter().enumerate() {
                    if self.basis[g].src != t {
                        continue;
                    }
                    for (j, c) in self.mul(g, x) {
                        let n = coords.len();
                        let row = *coords.entry((gi, j)).or_insert(n);
                        col.push((row, c));
                    }
                }
                cols.push(col);
            }
            let rank = sparse_columns_rank(&f, &cols, coords.len());
            let dim = elems.len() - rank;
            if dim > 0 {
                out.push(SocleBlock {
                    l,
                    k,
                    target: t,
                    dim,
                    d_dim: dim / self.rings[t].dim,
                });
            }
        }
        out
    }

    /// JSON dump: basis, nonzero products between basis elements, Hilbert table.
    pub fn to_json(&self) -> serde_json::Value {
        let basis: Vec<serde_json::Value> = self
            .basis
            .iter()
            .enumerate()
            .map(|(id, b)| serde_json::json!({"id": id, "src": b.src, "tgt": b.tgt, "deg": [b.l, b.k]}))
            .collect();
        let mut products = Vec::new();
        for x in 0..self.dim() {
            for y in 0..self.dim() {
                let p = self.mul(x, y);
                if !p.is_empty() {
                    products.push(serde_json::json!([x, y, p]));
                }
            }
        }
        let hilbert: serde_json::Map<String, serde_json::Value> = self
            .hilbert()
            .into_iter()
            .map(|((l, k), d)| (format!("{l},{k}"), serde_json::json!(d)))
            .collect();
        serde_json::json!({"basis": basis, "products": products, "hilbert": hilbert})
    }

    /// Segre product over the ★-grading. Basis ordered by left factor, then right.
    pub fn segre(left: Arc<FiniteGradedAlgebra>, right: Arc<FiniteGradedAlgebra>) -> FiniteGradedAlgebra {
        let f = left.field;
        let n2 = right.num_vertices();
        let mut basis = Vec::new();
        let mut words = Vec::new();
        let mut index = HashMap::new();
        for (a, ea) in left.basis.iter().enumerate() {
            for (b, eb) in right.basis.iter().enumerate() {
                if ea.k != eb.k {
                    continue;
                }
                index.insert((a, b), basis.len());
                words.push(Word::Pair(a, b));
                basis.push(BasisElem {
                    src: ea.src * n2 + eb.src,
                    tgt: ea.tgt * n2 + eb.tgt,
                    l: ea.l + eb.l - ea.k,
                    k: ea.k,
                });
            }
        }
        let mut rings = Vec::new();
        let mut ring_basis = Vec::new();
        let mut names = Vec::new();
        for v1 in 0..left.num_vertices() {
            for v2 in 0..n2 {
                names.push(format!("{}{}", left.names[v1], right.names[v2]));
                rings.push(VertexRing::tensor(&f, &left.rings[v1], &right.rings[v2]));
                let mut rb = Vec::new();
                for &a in &left.ring_basis[v1] {
                    for &b in &right.ring_basis[v2] {
                        rb.push(index[&(a, b)]);
                    }
                }
                ring_basis.push(rb);
            }
        }
        FiniteGradedAlgebra {
            field: f,
            rings,
            basis,
            words,
            ring_basis,
            names,
            products: Products::Segre { left, right, index },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SocleBlock {
    pub l: usize,
    pub k: usize,
    pub target: usize,
    pub dim: usize,
    pub d_dim: usize,
}

/// Rank of a matrix given by sparse columns.
pub fn sparse_columns_rank(f: &Fp, cols: &[Vec<(usize, u32)>], nrows: usize) -> usize {
    let mut eb = EchelonBasis::new(*f, nrows);
    let mut rank = 0;
    for c in cols {
        let mut dense = vec![0u32; nrows];
        for &(i, x) in c {
            dense[i] = f.addv(dense[i], x);
        }
        if eb.insert(&dense) {
            rank += 1;
        }
    }
    rank
}

impl Presented {
    fn ring_left(&self, alg: &FiniteGradedAlgebra, v: usize, r: usize, y: usize) -> SparseVec {
        let f = alg.field;
        match alg.words[y] {
            Word::Ring { vertex, r: r2 } => {
                if vertex != v {
                    return Vec::new();
                }
                let coords = &alg.rings[v].mult[r][r2];
                coords
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| (alg.ring_basis[v][j], c))
                    .collect()
            }
            Word::Gen { gen, idx, child } => {
                let g = &self.pres.gens[gen];
                let mut acc = BTreeMap::new();
                let level = alg.basis[y].l;
                for (j, row) in g.left[r].iter().enumerate() {
                    let c = row[idx];
                    if c != 0 {
                        sv_axpy(&f, &mut acc, &self.levels[level][&(gen, j, child)], c);
                    }
                }
                sv_from_map(acc)
            }
            Word::Pair(..) => unreachable!(),
        }
    }
}

/// Builds the quotient of the tensor algebra of the generating bimodule by the
/// two-sided ideal of the relations, degree by degree.
pub fn quotient_algebra(pres: Presentation, max_degree: usize) -> Result<FiniteGradedAlgebra, AlgebraError> {
    let f = pres.field;
    let n = pres.rings.len();
    let mut basis = Vec::new();
    let mut words = Vec::new();
    let mut ring_basis = vec![Vec::new(); n];
    for v in 0..n {
        for r in 0..pres.rings[v].dim {
            ring_basis[v].push(basis.len());
            words.push(Word::Ring { vertex: v, r });
            basis.push(BasisElem { src: v, tgt: v, l: 0, k: 0 });
        }
    }
    // Relations closed under the left action of the ring at their target.
    let mut rels: Vec<(usize, usize, usize, Relation)> = Vec::new();
    for (ri, rel) in pres.relations.iter().enumerate() {
        let Some((_, w0)) = rel.terms.first() else { continue };
        let len = w0.len();
        let tgt = pres.gens[w0[0].0].target;
        let src = pres.gens[w0[w0.len() - 1].0].source;
        for (_, w) in &rel.terms {
            if w.len() != len
                || pres.gens[w[0].0].target != tgt
                || pres.gens[w[w.len() - 1].0].source != src
            {
                return Err(AlgebraError::InhomogeneousRelation(ri));
            }
        }
        for r in 0..pres.rings[tgt].dim {
            let mut terms = Vec::new();
            for (c, w) in &rel.terms {
                let (g, i) = w[0];
                for (j, row) in pres.gens[g].left[r].iter().enumerate() {
                    if row[i] != 0 {
                        let mut w2 = w.clone();
                        w2[0] = (g, j);
                        terms.push((f.mulv(*c, row[i]), w2));
                    }
                }
            }
            rels.push((len, tgt, src, Relation { terms }));
        }
    }

    let mut alg = FiniteGradedAlgebra {
        field: f,
        rings: pres.rings.clone(),
        basis,
        words,
        ring_basis,
        names: (1..=n).map(|v| v.to_string()).collect(),
        products: Products::Presented {
            data: Box::new(Presented {
                pres,
                levels: vec![HashMap::new()],
            }),
            cache: Mutex::new(HashMap::new()),
        },
    };
    let mut level_elems: Vec<Vec<usize>> = vec![(0..alg.basis.len()).collect()];

    for deg in 1..=max_degree {
        let Products::Presented { data, .. } = &alg.products else { unreachable!() };
        let gens = &data.pres.gens;
        // Raw monomials grouped by block (★, target, source).
        let mut blocks: BTreeMap<(usize, usize, usize), Vec<RawKey>> = BTreeMap::new();
        for (g, gs) in gens.iter().enumerate() {
            for &b in &level_elems[deg - 1] {
                let eb = alg.basis[b];
                if eb.tgt != gs.source {
                    continue;
                }
                for i in 0..gs.dim {
                    blocks.entry((gs.star + eb.k, gs.target, eb.src)).or_default().push((g, i, b));
                }
            }
        }
        let mut position: HashMap<RawKey, (usize, usize)> = HashMap::new();
        let block_keys: Vec<_> = blocks.keys().copied().collect();
        for (bi, key) in block_keys.iter().enumerate() {
            let cols = blocks.get_mut(key).expect("present");
            cols.sort_unstable();
            for (pos, &k) in cols.iter().enumerate() {
                position.insert(k, (bi, pos));
            }
        }
        let mut block_rows: Vec<Vec<BTreeMap<RawKey, u32>>> = vec![Vec::new(); block_keys.len()];
        let mut push_row = |row: BTreeMap<RawKey, u32>| {
            let row: BTreeMap<RawKey, u32> = row.into_iter().filter(|&(_, c)| c != 0).collect();
            if let Some(k) = row.keys().next() {
                let bi = position[k].0;
                debug_assert!(row.keys().all(|k| position[k].0 == bi));
                block_rows[bi].push(row);
            }
        };
        // Balancing: (g·r) ⊗ b − g ⊗ (r·b).
        for (g, gs) in gens.iter().enumerate() {
            for &b in &level_elems[deg - 1] {
                if alg.basis[b].tgt != gs.source {
                    continue;
                }
                for r in 1..alg.rings[gs.source].dim {
                    let rb = data.ring_left(&alg, gs.source, r, b);
                    for i in 0..gs.dim {
                        let mut row = BTreeMap::new();
                        for (j, line) in gs.right[r].iter().enumerate() {
                            if line[i] != 0 {
                                let e = row.entry((g, j, b)).or_insert(0);
                                *e = f.addv(*e, line[i]);
                            }
                        }
                        for &(c, x) in &rb {
                            let e = row.entry((g, i, c)).or_insert(0);
                            *e = f.subv(*e, x);
                        }
                        push_row(row);
                    }
                }
            }
        }
        // Ideal: relation · y for every lower basis element y.
        for (len, _tgt, src, rel) in &rels {
            if *len > deg {
                continue;
            }
            for &y in &level_elems[deg - *len] {
                if alg.basis[y].tgt != *src {
                    continue;
                }
                let mut row = BTreeMap::new();
                for (c, w) in &rel.terms {
                    let mut z: SparseVec = vec![(y, 1)];
                    let mut lvl = deg - *len;
                    for &(g, i) in w[1..].iter().rev() {
                        lvl += 1;
                        let mut acc = BTreeMap::new();
                        for &(cidx, x) in &z {
                            sv_axpy(&f, &mut acc, &data.levels[lvl][&(g, i, cidx)], x);
                        }
                        z = sv_from_map(acc);
                    }
                    let (g, i) = w[0];
                    for &(cidx, x) in &z {
                        let e = row.entry((g, i, cidx)).or_insert(0);
                        *e = f.addv(*e, f.mulv(*c, x));
                    }
                }
                push_row(row);
            }
        }
        // Eliminate per block; pivots land on the largest monomials.
        let mut exprs: HashMap<RawKey, SparseVec> = HashMap::new();
        let mut new_basis = Vec::new();
        let mut new_words = Vec::new();
        let mut new_elems = Vec::new();
        let start = alg.basis.len();
        for (bi, key) in block_keys.iter().enumerate() {
            let cols = &blocks[key];
            let nc = cols.len();
            let mut eb = EchelonBasis::new(f, nc);
            for row in &block_rows[bi] {
                let mut dense = vec![0u32; nc];
                for (k, &c) in row {
                    dense[nc - 1 - position[k].1] = c;
                }
                eb.insert(&dense);
                if eb.len() == nc {
                    break;
                }
            }
            let mut pivot_row = vec![None; nc];
            for (ri, &p) in eb.pivots().iter().enumerate() {
                pivot_row[nc - 1 - p] = Some(ri);
            }
            let mut global = vec![usize::MAX; nc];
            for pos in 0..nc {
                if pivot_row[pos].is_none() {
                    let (g, i, b) = cols[pos];
                    let id = start + new_basis.len();
                    global[pos] = id;
                    let eb0 = alg.basis[b];
                    new_basis.push(BasisElem {
                        src: eb0.src,
                        tgt: gens[g].target,
                        l: deg,
                        k: eb0.k + gens[g].star,
                    });
                    new_words.push(Word::Gen { gen: g, idx: i, child: b });
                    new_elems.push(id);
                    exprs.insert(cols[pos], vec![(id, 1)]);
                }
            }
            for pos in 0..nc {
                if let Some(ri) = pivot_row[pos] {
                    let row = &eb.rows()[ri];
                    let mut e: SparseVec = Vec::new();
                    for (q, &gid) in global.iter().enumerate() {
                        let c = row[nc - 1 - q];
                        if gid != usize::MAX && c != 0 {
                            e.push((gid, f.negv(c)));
                        }
                    }
                    e.sort_unstable();
                    exprs.insert(cols[pos], e);
                }
            }
        }
        let Products::Presented { data, .. } = &mut alg.products else { unreachable!() };
        data.levels.push(exprs);
        alg.basis.extend(new_basis);
        alg.words.extend(new_words);
        if new_elems.is_empty() {
            return Ok(alg);
        }
        level_elems.push(new_elems);
        if deg == max_degree {
            return Err(AlgebraError::TruncationHit(deg));
        }
    }
    Ok(alg)
}

/// Default safety cap on the path-length degree.
pub const DEFAULT_CAP: usize = 64;

fn generators_of(d: &DoubleSpecies, starred: bool) -> Vec<GenSpec> {
    d.arrows
        .iter()
        .filter(|a| starred || !a.starred)
        .map(|a| GenSpec {
            source: a.source,
            target: a.target,
            dim: a.bimodule.dim,
            star: a.starred as usize,
            left: a.bimodule.left.clone(),
            right: a.bimodule.right.clone(),
        })
        .collect()
}

/// T(S) truncated at `max_degree`.
pub fn tensor_algebra(s: &SpeciesSpec, max_degree: usize) -> Result<FiniteGradedAlgebra, AlgebraError> {
    let d = double(s).expect("realized species are dualisable");
    quotient_algebra(
        Presentation {
            field: d.base,
            rings: d.vertex_rings.clone(),
            gens: generators_of(&d, false),
            relations: Vec::new(),
        },
        max_degree,
    )
}

/// The Casimir relation at every vertex, as words in the double quiver.
pub fn casimir_relations(d: &DoubleSpecies) -> Vec<Relation> {
    let f = d.base;
    let c = casimir(d);
    (0..d.num_vertices())
        .map(|v| {
            let mut terms = Vec::new();
            for t in c.terms_at(v) {
                for (i, &x) in t.left.iter().enumerate() {
                    for (j, &y) in t.right.iter().enumerate() {
                        let coef = f.mulv(t.coef, f.mulv(x, y));
                        if coef != 0 {
                            terms.push((coef, vec![(t.left_arrow, i), (t.right_arrow, j)]));
                        }
                    }
                }
            }
            Relation { terms }
        })
        .filter(|r| !r.terms.is_empty())
        .collect()
}

/// Π(S) = T(S̄)/⟨c⟩ with the default safety cap.
pub fn preprojective(s: &SpeciesSpec) -> Result<FiniteGradedAlgebra, AlgebraError> {
    preprojective_with_cap(s, DEFAULT_CAP)
}

pub fn preprojective_with_cap(s: &SpeciesSpec, cap: usize) -> Result<FiniteGradedAlgebra, AlgebraError> {
    let d = double(s).expect("realized species are dualisable");
    quotient_algebra(
        Presentation {
            field: d.base,
            rings: d.vertex_rings.clone(),
            gens: generators_of(&d, true),
            relations: casimir_relations(&d),
        },
        cap,
    )
}

/// Π(S) together with the double species and Casimir element it was built from.
#[derive(Debug, Clone)]
pub struct PreprojectiveAlgebra {
    pub spec: SpeciesSpec,
    pub double: DoubleSpecies,
    pub casimir: CasimirElement,
    pub algebra: Arc<FiniteGradedAlgebra>,
}

impl PreprojectiveAlgebra {
    /// The element Σ coords[i] · (arrow, i) of degree 1.
    pub fn letter_elem(&self, arrow: usize, coords: &[u32]) -> SparseVec {
        letter_combination(&self.algebra, arrow, coords)
    }
}

/// Σ coords[i] · (gen, i) in a presented algebra.
pub fn letter_combination(a: &FiniteGradedAlgebra, gen: usize, coords: &[u32]) -> SparseVec {
    let f = a.field();
    let mut acc = BTreeMap::new();
    for (i, &c) in coords.iter().enumerate() {
        if c != 0 {
            sv_axpy(&f, &mut acc, &a.letter(gen, i).expect("presented algebra"), c);
        }
    }
    sv_from_map(acc)
}

/// Builds Π(S) and keeps the data used to present it.
pub fn build_preprojective(s: &SpeciesSpec) -> Result<PreprojectiveAlgebra, AlgebraError> {
    let mut alg = preprojective(s)?;
    alg.set_vertex_names(s.quiver.labels().iter().map(|l| l.to_string()).collect());
    let d = double(s).expect("realized species are dualisable");
    Ok(PreprojectiveAlgebra {
        spec: s.clone(),
        casimir: casimir(&d),
        double: d,
        algebra: Arc::new(alg),
    })
}

/// T(S) with vertex names taken from the quiver.
pub fn build_tensor_algebra(s: &SpeciesSpec) -> Result<FiniteGradedAlgebra, AlgebraError> {
    let mut alg = tensor_algebra(s, DEFAULT_CAP)?;
    alg.set_vertex_names(s.quiver.labels().iter().map(|l| l.to_string()).collect());
    Ok(alg)
}

/// The degree-0 algebra of `pres` (just the vertex rings), as a standalone algebra.
pub fn semisimple(field: Fp, rings: Vec<VertexRing>) -> FiniteGradedAlgebra {
    quotient_algebra(
        Presentation {
            field,
            rings,
            gens: Vec::new(),
            relations: Vec::new(),
        },
        1,
    )
    .expect("no generators")
}

/// Dimension per bidegree.
pub fn hilbert(a: &FiniteGradedAlgebra) -> BTreeMap<(usize, usize), usize> {
    a.hilbert()
}

/// Left socle of every indecomposable projective.
pub fn socle(a: &FiniteGradedAlgebra) -> Vec<Vec<SocleBlock>> {
    (0..a.num_vertices()).map(|v| a.socle(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{realize, DynkinType};

    fn spec(ty: DynkinType) -> SpeciesSpec {
        realize(&ty.linear_quiver(), 7).unwrap()
    }

    /// Sum over paths of Q of the K-dimension of the tensor product of bimodules,
    /// using dim(M ⊗_D N) = dim M · dim N / dim D.
    fn path_dimension_oracle(s: &SpeciesSpec) -> usize {
        let q = &s.quiver;
        let d = q.degrees();
        let mut total: usize = d.iter().sum();
        // Paths extended one arrow at a time: (end vertex, K-dim).
        let mut frontier: Vec<(usize, usize)> = (0..q.num_vertices()).map(|v| (v, d[v])).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (v, dim) in frontier {
                for (a, ar) in q.arrows().iter().enumerate() {
                    if ar.source == v {
                        let nd = dim * q.bimodule_dim(a) / d[v];
                        total += nd;
                        next.push((ar.target, nd));
                    }
                }
            }
            frontier = next;
        }
        total
    }

    #[test]
    fn tensor_algebra_examples() {
        let a2 = tensor_algebra(&spec(DynkinType::A(2)), 8).unwrap();
        assert_eq!(a2.dim(), 3);
        assert_eq!(a2.hilbert(), BTreeMap::from([((0, 0), 2), ((1, 0), 1)]));
        let c3 = tensor_algebra(&spec(DynkinType::C(3)), 8).unwrap();
        assert_eq!(c3.dim(), 9);
        let a1 = tensor_algebra(&spec(DynkinType::A(1)), 8).unwrap();
        assert_eq!(a1.dim(), 1);
    }

    #[test]
    fn tensor_algebra_matches_path_oracle() {
        for ty in [
            DynkinType::A(4),
            DynkinType::B(3),
            DynkinType::C(4),
            DynkinType::D(5),
            DynkinType::E(6),
            DynkinType::F4,
            DynkinType::G2,
        ] {
            let s = spec(ty);
            let t = tensor_algebra(&s, 16).unwrap();
            assert_eq!(t.dim(), path_dimension_oracle(&s), "{ty}");
            assert!(t.basis().iter().all(|b| b.k == 0));
        }
    }

    #[test]
    fn truncation_is_reported() {
        let s = spec(DynkinType::A(4));
        assert_eq!(tensor_algebra(&s, 2).unwrap_err(), AlgebraError::TruncationHit(2));
        assert_eq!(preprojective_with_cap(&s, 2).unwrap_err(), AlgebraError::TruncationHit(2));
    }

    #[test]
    fn preprojective_small_examples() {
        let p2 = preprojective(&spec(DynkinType::A(2))).unwrap();
        assert_eq!(p2.dim(), 4);
        assert_eq!(p2.top_degree(), 1);
        assert_eq!(p2.hilbert(), BTreeMap::from([((0, 0), 2), ((1, 0), 1), ((1, 1), 1)]));
        let p3 = preprojective(&spec(DynkinType::A(3))).unwrap();
        assert_eq!(p3.dim(), 10);
        assert_eq!(p3.top_degree(), 2);
    }

    fn assert_associative(a: &FiniteGradedAlgebra) {
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                let xy = a.mul(x, y);
                for z in 0..a.dim() {
                    let left = a.mul_vec(&xy, &[(z, 1)]);
                    let yz = a.mul(y, z);
                    let right = a.mul_vec(&[(x, 1)], &yz);
                    assert_eq!(left, right, "({x}{y}){z}");
                }
            }
        }
        // Bidegree additivity and idempotents.
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                for (z, _) in a.mul(x, y) {
                    let (bx, by, bz) = (a.elem(x), a.elem(y), a.elem(z));
                    assert_eq!((bz.l, bz.k), (bx.l + by.l, bx.k + by.k));
                }
            }
            let b = a.elem(x);
            assert_eq!(a.mul(a.idempotent(b.tgt), x), vec![(x, 1)]);
            assert_eq!(a.mul(x, a.idempotent(b.src)), vec![(x, 1)]);
        }
    }

    #[test]
    fn preprojective_is_associative() {
        for ty in [DynkinType::A(3), DynkinType::C(3), DynkinType::B(2), DynkinType::G2] {
            assert_associative(&preprojective(&spec(ty)).unwrap());
        }
    }

    #[test]
    fn casimir_vanishes_in_the_quotient() {
        for ty in [DynkinType::C(3), DynkinType::D(4), DynkinType::G2] {
            let s = spec(ty);
            let a = preprojective(&s).unwrap();
            let d = double(&s).unwrap();
            for rel in casimir_relations(&d) {
                let f = a.field();
                let mut acc = BTreeMap::new();
                for (c, w) in &rel.terms {
                    let x = a.letter(w[0].0, w[0].1).unwrap();
                    let y = a.letter(w[1].0, w[1].1).unwrap();
                    sv_axpy(&f, &mut acc, &a.mul_vec(&x, &y), *c);
                }
                assert!(sv_from_map(acc).is_empty(), "{ty}");
            }
        }
    }

    #[test]
    fn socle_degrees() {
        let p2 = preprojective(&spec(DynkinType::A(2))).unwrap();
        for v in 0..2 {
            let s = p2.socle(v);
            assert_eq!(s.len(), 1);
            assert_eq!((s[0].l, s[0].dim), (1, 1));
        }
        for (ty, deg) in [(DynkinType::G2, 4), (DynkinType::D(4), 4)] {
            let p = preprojective(&spec(ty)).unwrap();
            for v in 0..p.num_vertices() {
                let s = p.socle(v);
                assert_eq!(s.len(), 1, "{ty}");
                assert_eq!(s[0].l, deg, "{ty}");
                assert_eq!(s[0].d_dim, 1, "{ty}");
            }
        }
    }
}
