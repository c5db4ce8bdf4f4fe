//! Segre products over the ★-grading: algebras, projective sums, maps and
//! complexes, total complexes with the Künneth check, tensor-product species
//! presentations, and the assembly of almost Koszul complexes for products.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::ar_knitting::{knit, nakayama_permutation, ArError};
use crate::field_tower::{Fp, Matrix};
use crate::homological::{
    almost_koszul_resolution, certify_almost_koszul, homology, mapping_cone, split_by_star_degree,
    GradedComplex, HomologicalError, HomologyTable, KoszulOutcome, Label, LinMap, ProjChainMap, ProjComplex,
    ProjMap, ProjSum, StarSplit, Summand,
};
use crate::species::VertexRing;
use crate::tensor_algebra::{
    quotient_algebra, sv_from_map, AlgebraError, FiniteGradedAlgebra, GenSpec, Letter, PreprojectiveAlgebra,
    Presentation, Relation, SparseVec,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegreError {
    #[error("factors are not l-homogeneous with a common l")]
    NotHomogeneous,
    #[error("interior homology in the product complex: {0}")]
    HomologyLeak(String),
    #[error("total complex differential does not square to zero in degree {0}")]
    SignError(usize),
    #[error("summands of unequal ★-shift in degree {0}: their Segre product is not projective")]
    StarMismatch(usize),
    #[error("presented quotient has dimension {presented} in bidegree {bidegree:?}, Segre product has {segre}")]
    DimensionMismatch {
        bidegree: (usize, usize),
        presented: usize,
        segre: usize,
    },
    #[error("relation {0} has ★-degree above 1")]
    RelationDegree(usize),
    #[error("factor algebra carries no presentation")]
    NotPresented,
    #[error(transparent)]
    Homological(#[from] HomologicalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ar(#[from] ArError),
}

/// A ⊗̂ B with basis the pairs of equal ★-degree, ordered by left factor.
pub fn segre_algebra(a: &Arc<FiniteGradedAlgebra>, b: &Arc<FiniteGradedAlgebra>) -> Arc<FiniteGradedAlgebra> {
    Arc::new(FiniteGradedAlgebra::segre(a.clone(), b.clone()))
}

/// Dimension per ★-degree.
pub fn star_dims(a: &FiniteGradedAlgebra) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for e in a.basis() {
        *out.entry(e.k).or_insert(0) += 1;
    }
    out
}

fn factors(prod: &FiniteGradedAlgebra) -> (&Arc<FiniteGradedAlgebra>, &Arc<FiniteGradedAlgebra>) {
    prod.segre_factors().expect("Segre product expected")
}

/// Tensor of two factor elements, `None` when some pair of terms has unequal ★-degree.
pub fn segre_elem(prod: &FiniteGradedAlgebra, u: &[(usize, u32)], v: &[(usize, u32)]) -> Option<SparseVec> {
    let f = prod.field();
    let mut acc = BTreeMap::new();
    for &(x, a) in u {
        for &(y, b) in v {
            let i = prod.segre_index(x, y)?;
            let e = acc.entry(i).or_insert(0);
            *e = f.addv(*e, f.mulv(a, b));
        }
    }
    Some(sv_from_map(acc))
}

/// `P_a⟨(l₁,k)⟩ ⊗̂ P_b⟨(l₂,k)⟩ = P_{(a,b)}⟨(l₁+l₂−k, k)⟩`.
pub fn segre_summand(prod: &FiniteGradedAlgebra, x: Summand, y: Summand) -> Option<Summand> {
    if x.shift.1 != y.shift.1 {
        return None;
    }
    let n2 = factors(prod).1.num_vertices();
    Some(Summand {
        vertex: x.vertex * n2 + y.vertex,
        shift: (x.shift.0 + y.shift.0 - x.shift.1, x.shift.1),
    })
}

/// Summands ordered by the left factor, then the right.
pub fn segre_sum(prod: &FiniteGradedAlgebra, x: &ProjSum, y: &ProjSum) -> Option<ProjSum> {
    let mut out = Vec::with_capacity(x.len() * y.len());
    for &a in &x.summands {
        for &b in &y.summands {
            out.push(segre_summand(prod, a, b)?);
        }
    }
    Some(ProjSum::new(out))
}

/// `f ⊗̂ g` between Segre sums built by [`segre_sum`].
pub fn segre_map(prod: &FiniteGradedAlgebra, f: &ProjMap, g: &ProjMap) -> Option<ProjMap> {
    let mut out = ProjMap::zero(f.rows * g.rows, f.cols * g.cols);
    for r1 in 0..f.rows {
        for c1 in 0..f.cols {
            let u = &f.entries[r1][c1];
            if u.is_empty() {
                continue;
            }
            for r2 in 0..g.rows {
                for c2 in 0..g.cols {
                    let v = &g.entries[r2][c2];
                    if v.is_empty() {
                        continue;
                    }
                    out.entries[r1 * g.rows + r2][c1 * g.cols + c2] = segre_elem(prod, u, v)?;
                }
            }
        }
    }
    Some(out)
}

/// Block layout of a total complex: per degree, `(i, offset)` for each contributing `X_i ⊗̂ Y_{n−i}`.
fn tot_layout(xl: &[usize], yl: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let len = (xl.len() + yl.len()).saturating_sub(1);
    (0..len)
        .map(|n| {
            let mut off = 0;
            let mut blocks = Vec::new();
            for i in 0..xl.len() {
                if n < i || n - i >= yl.len() {
                    continue;
                }
                blocks.push((i, off));
                off += xl[i] * yl[n - i];
            }
            blocks
        })
        .collect()
}

fn block_offset(layout: &[(usize, usize)], i: usize) -> Option<usize> {
    layout.iter().find(|(j, _)| *j == i).map(|&(_, o)| o)
}

/// Tot(X ⊗̂ Y) for complexes of projectives, `d = d^X ⊗ 1 + (−1)^i 1 ⊗ d^Y`.
pub fn tot_segre_projective(
    prod: &FiniteGradedAlgebra,
    x: &ProjComplex,
    y: &ProjComplex,
) -> Result<ProjComplex, SegreError> {
    let fp = prod.field();
    let neg = fp.negv(1);
    let (fa, fb) = factors(prod);
    let xl: Vec<usize> = x.terms.iter().map(ProjSum::len).collect();
    let yl: Vec<usize> = y.terms.iter().map(ProjSum::len).collect();
    let layout = tot_layout(&xl, &yl);
    let mut terms = Vec::with_capacity(layout.len());
    for (n, blocks) in layout.iter().enumerate() {
        let mut s = Vec::new();
        for &(i, _) in blocks {
            s.extend(segre_sum(prod, &x.terms[i], &y.terms[n - i]).ok_or(SegreError::StarMismatch(n))?.summands);
        }
        terms.push(ProjSum::new(s));
    }
    let mut diffs = Vec::new();
    for n in 1..layout.len() {
        let mut d = ProjMap::zero(terms[n - 1].len(), terms[n].len());
        for &(i, off) in &layout[n] {
            let j = n - i;
            let (xs, ys) = (&x.terms[i], &y.terms[j]);
            // d^X ⊗ 1 into X_{i−1} ⊗̂ Y_j.
            if i > 0 {
                if let Some(toff) = block_offset(&layout[n - 1], i - 1) {
                    let dx = x.diff(i);
                    for a in 0..xs.len() {
                        for r in 0..dx.rows {
                            let u = &dx.entries[r][a];
                            if u.is_empty() {
                                continue;
                            }
                            for b in 0..ys.len() {
                                let e = vec![(fb.idempotent(ys.summands[b].vertex), 1)];
                                let img = segre_elem(prod, u, &e).ok_or(SegreError::StarMismatch(n))?;
                                d.entries[toff + r * ys.len() + b][off + a * ys.len() + b] = img;
                            }
                        }
                    }
                }
            }
            // (−1)^i 1 ⊗ d^Y into X_i ⊗̂ Y_{j−1}.
            if j > 0 {
                if let Some(toff) = block_offset(&layout[n - 1], i) {
                    let dy = y.diff(j);
                    let rows_y = dy.rows;
                    let sign = if i % 2 == 0 { 1 } else { neg };
                    for a in 0..xs.len() {
                        let e = vec![(fa.idempotent(xs.summands[a].vertex), sign)];
                        for b in 0..ys.len() {
                            for r in 0..rows_y {
                                let v = &dy.entries[r][b];
                                if v.is_empty() {
                                    continue;
                                }
                                let img = segre_elem(prod, &e, v).ok_or(SegreError::StarMismatch(n))?;
                                d.entries[toff + a * rows_y + r][off + a * ys.len() + b] = img;
                            }
                        }
                    }
                }
            }
        }
        diffs.push(d);
    }
    let tot = ProjComplex::new(terms, diffs);
    if let Err(HomologicalError::NotComplex(i)) = tot.check(prod) {
        return Err(SegreError::SignError(i));
    }
    Ok(tot)
}

/// `Tot(f ⊗̂ g)` between the total complexes of source and target.
pub fn tot_segre_chain_map(
    prod: &FiniteGradedAlgebra,
    f: &ProjChainMap,
    g: &ProjChainMap,
) -> Result<ProjChainMap, SegreError> {
    let source = tot_segre_projective(prod, &f.source, &g.source)?;
    let target = tot_segre_projective(prod, &f.target, &g.target)?;
    let lens = |c: &ProjComplex| c.terms.iter().map(ProjSum::len).collect::<Vec<_>>();
    let src_layout = tot_layout(&lens(&f.source), &lens(&g.source));
    let tgt_layout = tot_layout(&lens(&f.target), &lens(&g.target));
    let mut maps = Vec::with_capacity(source.len());
    for n in 0..source.len() {
        let mut m = ProjMap::zero(target.term(n).len(), source.term(n).len());
        for &(i, off) in &src_layout[n] {
            let Some(toff) = tgt_layout.get(n).and_then(|l| block_offset(l, i)) else { continue };
            let block = segre_map(prod, &f.component(i), &g.component(n - i)).ok_or(SegreError::StarMismatch(n))?;
            for r in 0..block.rows {
                for c in 0..block.cols {
                    if !block.entries[r][c].is_empty() {
                        m.entries[toff + r][off + c] = block.entries[r][c].clone();
                    }
                }
            }
        }
        maps.push(m);
    }
    let out = ProjChainMap { source, target, maps };
    out.check(prod)?;
    Ok(out)
}

/// Tot(X ⊗̂ Y) of graded vector-space complexes: basis pairs of equal ★-degree with
/// label `(l₁+l₂−k, k, t₁·n₂+t₂)`, where `n₂` is the vertex count of the right factor.
pub fn tot_segre(f: &Fp, x: &GradedComplex, y: &GradedComplex, n2: usize) -> Result<GradedComplex, SegreError> {
    let neg = f.negv(1);
    let len = (x.len() + y.len()).saturating_sub(1);
    // Per degree: basis of pairs `(i, a, b)` and their positions.
    let mut bases: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); len];
    let mut index: Vec<BTreeMap<(usize, usize, usize), usize>> = vec![BTreeMap::new(); len];
    let mut labels: Vec<Vec<Label>> = vec![Vec::new(); len];
    for (n, basis) in bases.iter_mut().enumerate() {
        for i in 0..x.len() {
            if n < i || n - i >= y.len() {
                continue;
            }
            for (a, la) in x.labels[i].iter().enumerate() {
                for (b, lb) in y.labels[n - i].iter().enumerate() {
                    if la.1 != lb.1 {
                        continue;
                    }
                    index[n].insert((i, a, b), basis.len());
                    basis.push((i, a, b));
                    labels[n].push((la.0 + lb.0 - la.1, la.1, la.2 * n2 + lb.2));
                }
            }
        }
    }
    let mut diffs = Vec::with_capacity(len);
    for n in 0..len {
        let nrows = if n == 0 { 0 } else { bases[n - 1].len() };
        let mut cols = Vec::with_capacity(bases[n].len());
        for &(i, a, b) in &bases[n] {
            let mut acc = BTreeMap::new();
            if n > 0 {
                if i > 0 {
                    for &(r, c) in &x.diffs[i].cols[a] {
                        if let Some(&t) = index[n - 1].get(&(i - 1, r, b)) {
                            *acc.entry(t).or_insert(0) = c;
                        }
                    }
                }
                let j = n - i;
                if j > 0 {
                    let sign = if i % 2 == 0 { 1 } else { neg };
                    for &(r, c) in &y.diffs[j].cols[b] {
                        if let Some(&t) = index[n - 1].get(&(i, a, r)) {
                            let e = acc.entry(t).or_insert(0);
                            *e = f.addv(*e, f.mulv(sign, c));
                        }
                    }
                }
            }
            cols.push(sv_from_map(acc));
        }
        diffs.push(LinMap { nrows, cols });
    }
    let tot = GradedComplex { labels, diffs };
    if let Err(HomologicalError::NotComplex(i)) = tot.check(f) {
        return Err(SegreError::SignError(i));
    }
    Ok(tot)
}

/// Right-hand side of the Künneth formula: `⊕_{i+j=n} H_i(X) ⊗̂ H_j(Y)` per label.
pub fn kunneth_prediction(hx: &HomologyTable, hy: &HomologyTable, n2: usize) -> HomologyTable {
    let mut out = BTreeMap::new();
    for (&(i, la), &da) in hx {
        for (&(j, lb), &db) in hy {
            if la.1 != lb.1 {
                continue;
            }
            let label = (la.0 + lb.0 - la.1, la.1, la.2 * n2 + lb.2);
            *out.entry((i + j, label)).or_insert(0) += da * db;
        }
    }
    out
}

/// The sequence `0 → ker F → X → im F → 0` of an expanded homogeneous map, as a
/// three-term complex in degrees 2, 1, 0.
pub fn kernel_image_sequence(f: &Fp, src_labels: &[Label], tgt_labels: &[Label], map: &LinMap) -> GradedComplex {
    let mut blocks: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (c, &l) in src_labels.iter().enumerate() {
        blocks.entry(l).or_default().push(c);
    }
    let mut tgt_blocks: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (r, &l) in tgt_labels.iter().enumerate() {
        tgt_blocks.entry(l).or_default().push(r);
    }
    let n = src_labels.len();
    let mut ker_labels = Vec::new();
    let mut ker_cols = Vec::new();
    let mut im_labels = Vec::new();
    let mut proj_cols: Vec<SparseVec> = vec![Vec::new(); n];
    for (label, cols) in &blocks {
        let rows = tgt_blocks.get(label).cloned().unwrap_or_default();
        let local: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let dense: Vec<Vec<u32>> = cols
            .iter()
            .map(|&c| {
                let mut v = vec![0; rows.len()];
                for &(r, x) in &map.cols[c] {
                    v[local[&r]] = x;
                }
                v
            })
            .collect();
        let m = Matrix::from_columns(f, &dense, rows.len());
        for k in m.kernel_basis() {
            ker_labels.push(*label);
            ker_cols.push(cols.iter().zip(&k).filter(|(_, &x)| x != 0).map(|(&c, &x)| (c, x)).collect());
        }
        // Image basis: images of a maximal independent set of columns.
        let mut chosen = Vec::new();
        let mut eb = crate::field_tower::EchelonBasis::new(*f, rows.len());
        for (j, v) in dense.iter().enumerate() {
            if eb.insert(v) {
                chosen.push(j);
            }
        }
        let base = im_labels.len();
        im_labels.extend(std::iter::repeat_n(*label, chosen.len()));
        if chosen.is_empty() {
            continue;
        }
        let sel: Vec<Vec<u32>> = chosen.iter().map(|&j| dense[j].clone()).collect();
        let a = Matrix::from_columns(f, &sel, rows.len());
        for (j, &c) in cols.iter().enumerate() {
            let coef = a.solve(&dense[j]).expect("column lies in the image");
            proj_cols[c] = coef.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (base + i, x)).collect();
        }
    }
    let m = im_labels.len();
    GradedComplex {
        labels: vec![im_labels, src_labels.to_vec(), ker_labels],
        diffs: vec![
            LinMap {
                nrows: 0,
                cols: vec![Vec::new(); m],
            },
            LinMap { nrows: m, cols: proj_cols },
            LinMap { nrows: n, cols: ker_cols },
        ],
    }
}

/// Almost Koszul complex of a simple over an l-homogeneous algebra.
#[derive(Debug, Clone)]
pub struct KoszulFactor {
    pub algebra: Arc<FiniteGradedAlgebra>,
    pub homogeneity: usize,
    pub vertex: usize,
    pub complex: ProjComplex,
}

impl KoszulFactor {
    /// Three-term complex of `Π(S)` at vertex `i`, with exactness checked.
    pub fn from_preprojective(pp: &PreprojectiveAlgebra, i: usize) -> Result<Self, SegreError> {
        let nd = nakayama_permutation(&knit(&pp.spec)?)?;
        let l = nd.homogeneous.ok_or(SegreError::NotHomogeneous)?;
        let (complex, _) = almost_koszul_resolution(pp, i)?;
        Ok(KoszulFactor {
            algebra: pp.algebra.clone(),
            homogeneity: l,
            vertex: i,
            complex,
        })
    }
}

/// Product complex `C(Tot(φ¹ ⊗̂ φ²))` with its splittings and homology.
#[derive(Debug, Clone)]
pub struct ProductKoszul {
    pub result: KoszulFactor,
    pub left: StarSplit,
    pub right: StarSplit,
    pub phi: ProjChainMap,
    pub homology: HomologyTable,
}

impl ProductKoszul {
    /// ★-degrees carrying top homology.
    pub fn top_star_degrees(&self) -> Vec<usize> {
        let top = self.result.complex.len().saturating_sub(1);
        let mut ks: Vec<usize> = self.homology.keys().filter(|(i, _)| *i == top).map(|(_, l)| l.1).collect();
        ks.dedup();
        ks
    }
}

/// Assembles the almost Koszul complex of the simple at `(v₁, v₂)` over the Segre product.
pub fn product_koszul_complex(f1: &KoszulFactor, f2: &KoszulFactor) -> Result<ProductKoszul, SegreError> {
    if f1.homogeneity != f2.homogeneity {
        return Err(SegreError::NotHomogeneous);
    }
    let prod = segre_algebra(&f1.algebra, &f2.algebra);
    let left = split_by_star_degree(&f1.algebra, &f1.complex)?;
    let right = split_by_star_degree(&f2.algebra, &f2.complex)?;
    let phi = tot_segre_chain_map(&prod, &left.phi, &right.phi)?;
    let cone = mapping_cone(&prod, &phi)?;
    let h = homology(&prod, &cone);
    let top = cone.len().saturating_sub(1);
    if let Some(((i, l), d)) = h.iter().find(|((i, _), _)| *i != 0 && *i != top) {
        return Err(SegreError::HomologyLeak(format!("H{i} has dimension {d} at {l:?}")));
    }
    let vertex = f1.vertex * f2.algebra.num_vertices() + f2.vertex;
    let h0: Vec<_> = h.iter().filter(|((i, _), _)| *i == 0).map(|((_, l), d)| (*l, *d)).collect();
    if h0 != vec![((0, 0, vertex), prod.vertex_ring(vertex).dim)] {
        return Err(SegreError::HomologyLeak(format!("H0 = {h0:?}")));
    }
    Ok(ProductKoszul {
        result: KoszulFactor {
            algebra: prod,
            homogeneity: f1.homogeneity,
            vertex,
            complex: cone,
        },
        left,
        right,
        phi,
        homology: h,
    })
}

/// Measured (p, q) of a Segre product against the two candidate formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqReport {
    pub l: usize,
    pub factors: [(usize, usize); 2],
    pub measured: (usize, usize),
    /// `p₁ + p₂ − l + 1`.
    pub plus_one: usize,
    /// `p₁ + p₂ − l + 2`.
    pub plus_two: usize,
    pub q_formula: usize,
}

impl PqReport {
    pub fn matching_formula(&self) -> &'static str {
        match (self.measured.0 == self.plus_one, self.measured.0 == self.plus_two) {
            (true, false) => "p1+p2-l+1",
            (false, true) => "p1+p2-l+2",
            (true, true) => "both",
            (false, false) => "neither",
        }
    }
}

fn measured_pq(a: &FiniteGradedAlgebra) -> Result<(usize, usize), SegreError> {
    match certify_almost_koszul(a)?.outcome {
        KoszulOutcome::AlmostKoszul { p, q } => Ok((p, q)),
        KoszulOutcome::Koszul { .. } => Err(HomologicalError::NotAlmostKoszul { step: 0 }.into()),
    }
}

/// Certifies the Segre product of two l-homogeneous preprojective algebras.
pub fn product_pq(pp1: &PreprojectiveAlgebra, pp2: &PreprojectiveAlgebra) -> Result<PqReport, SegreError> {
    let l1 = nakayama_permutation(&knit(&pp1.spec)?)?.homogeneous;
    let l2 = nakayama_permutation(&knit(&pp2.spec)?)?.homogeneous;
    let l = match (l1, l2) {
        (Some(a), Some(b)) if a == b => a,
        _ => return Err(SegreError::NotHomogeneous),
    };
    let (p1, q1) = measured_pq(&pp1.algebra)?;
    let (p2, q2) = measured_pq(&pp2.algebra)?;
    let prod = segre_algebra(&pp1.algebra, &pp2.algebra);
    let measured = measured_pq(&prod)?;
    Ok(PqReport {
        l,
        factors: [(p1, q1), (p2, q2)],
        measured,
        plus_one: p1 + p2 + 1 - l,
        plus_two: p1 + p2 + 2 - l,
        q_formula: q1 + q2 - 1,
    })
}

/// Arrow of a tensor-product species.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductArrow {
    pub source: usize,
    pub target: usize,
    pub star: usize,
    pub dim: usize,
    /// Which factor moves: `left`, `right`, or `both` for the ★-degree 1 part.
    pub kind: &'static str,
}

/// Species with relations presenting A ⊗̂ B from presentations of the factors.
#[derive(Debug, Clone)]
pub struct TensorSpeciesPresentation {
    pub presentation: Presentation,
    pub names: Vec<String>,
    pub arrows: Vec<ProductArrow>,
    pub transported: usize,
    pub commutators: usize,
}

/// Action matrices of a bimodule: `left[r]`, `right[r]` act on a basis of size `dim`.
struct Actions {
    dim: usize,
    left: Vec<Vec<Vec<u32>>>,
    right: Vec<Vec<Vec<u32>>>,
}

impl Actions {
    fn of_gen(g: &GenSpec) -> Self {
        Actions {
            dim: g.dim,
            left: g.left.clone(),
            right: g.right.clone(),
        }
    }
    fn of_ring(r: &VertexRing) -> Self {
        let d = r.dim;
        let left = (0..d)
            .map(|a| (0..d).map(|i| (0..d).map(|j| r.mult[a][j][i]).collect()).collect())
            .collect();
        let right = (0..d)
            .map(|a| (0..d).map(|i| (0..d).map(|j| r.mult[j][a][i]).collect()).collect())
            .collect();
        Actions { dim: d, left, right }
    }
}

fn kron(f: &Fp, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![0; na * nb]; na * nb];
    for i in 0..na {
        for j in 0..na {
            if a[i][j] == 0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = f.mulv(a[i][j], b[k][l]);
                }
            }
        }
    }
    out
}

fn tensor_gen(f: &Fp, source: usize, target: usize, star: usize, x: &Actions, y: &Actions) -> GenSpec {
    let act = |p: &[Vec<Vec<u32>>], q: &[Vec<Vec<u32>>]| {
        let mut out = Vec::with_capacity(p.len() * q.len());
        for a in p {
            for b in q {
                out.push(kron(f, a, b));
            }
        }
        out
    };
    GenSpec {
        source,
        target,
        dim: x.dim * y.dim,
        star,
        left: act(&x.left, &y.left),
        right: act(&x.right, &y.right),
    }
}

fn relation_star(p: &Presentation, r: &Relation) -> usize {
    r.terms.first().map_or(0, |(_, w)| w.iter().map(|&(g, _)| p.gens[g].star).sum())
}

/// Builds the tensor-product species with relations: generators `α⊗e_j`, `e_i⊗β` for
/// ★-degree 0 arrows and `α⊗β` for ★-degree 1 pairs; relations transported from the
/// factors and commutators.
pub fn tensor_species_presentation(
    a: &FiniteGradedAlgebra,
    b: &FiniteGradedAlgebra,
) -> Result<TensorSpeciesPresentation, SegreError> {
    let f = a.field();
    let pa = a.presentation().ok_or(SegreError::NotPresented)?;
    let pb = b.presentation().ok_or(SegreError::NotPresented)?;
    let (n1, n2) = (pa.rings.len(), pb.rings.len());
    let vid = |i: usize, j: usize| i * n2 + j;
    let mut gens = Vec::new();
    let mut arrows = Vec::new();
    let mut push = |g: GenSpec, kind: &'static str, gens: &mut Vec<GenSpec>| {
        arrows.push(ProductArrow {
            source: g.source,
            target: g.target,
            star: g.star,
            dim: g.dim,
            kind,
        });
        gens.push(g);
        gens.len() - 1
    };
    // α ⊗ e_j
    let mut ae: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (g, spec) in pa.gens.iter().enumerate().filter(|(_, s)| s.star == 0) {
        for j in 0..n2 {
            let gs = tensor_gen(
                &f,
                vid(spec.source, j),
                vid(spec.target, j),
                0,
                &Actions::of_gen(spec),
                &Actions::of_ring(&pb.rings[j]),
            );
            ae.insert((g, j), push(gs, "left", &mut gens));
        }
    }
    // e_i ⊗ β
    let mut eb: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 0..n1 {
        for (h, spec) in pb.gens.iter().enumerate().filter(|(_, s)| s.star == 0) {
            let gs = tensor_gen(
                &f,
                vid(i, spec.source),
                vid(i, spec.target),
                0,
                &Actions::of_ring(&pa.rings[i]),
                &Actions::of_gen(spec),
            );
            eb.insert((i, h), push(gs, "right", &mut gens));
        }
    }
    // α* ⊗ β*
    let mut pp: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (g, sa) in pa.gens.iter().enumerate().filter(|(_, s)| s.star == 1) {
        for (h, sb) in pb.gens.iter().enumerate().filter(|(_, s)| s.star == 1) {
            let gs = tensor_gen(
                &f,
                vid(sa.source, sb.source),
                vid(sa.target, sb.target),
                1,
                &Actions::of_gen(sa),
                &Actions::of_gen(sb),
            );
            pp.insert((g, h), push(gs, "both", &mut gens));
        }
    }
    for (i, s) in pa.gens.iter().chain(&pb.gens).enumerate() {
        if s.star > 1 {
            return Err(SegreError::RelationDegree(i));
        }
    }

    let mut relations = Vec::new();
    let mut transported = 0;
    // Relations of the left factor.
    for (ri, r) in pa.relations.iter().enumerate() {
        match relation_star(pa, r) {
            0 => {
                for j in 0..n2 {
                    let dj = pb.rings[j].dim;
                    relations.push(map_relation(r, |_, (g, x)| (ae[&(g, j)], x * dj)));
                }
            }
            1 => {
                for (h, sb) in pb.gens.iter().enumerate().filter(|(_, s)| s.star == 1) {
                    for z in 0..sb.dim {
                        relations.push(transport_star(pa, r, |pos, (g, x)| match pos {
                            Side::Star => (pp[&(g, h)], x * sb.dim + z),
                            Side::Before => (ae[&(g, sb.target)], x * pb.rings[sb.target].dim),
                            Side::After => (ae[&(g, sb.source)], x * pb.rings[sb.source].dim),
                        }));
                    }
                }
            }
            _ => return Err(SegreError::RelationDegree(ri)),
        }
    }
    // Relations of the right factor.
    for (ri, r) in pb.relations.iter().enumerate() {
        match relation_star(pb, r) {
            0 => {
                for i in 0..n1 {
                    relations.push(map_relation(r, |_, (h, y)| (eb[&(i, h)], y)));
                }
            }
            1 => {
                for (g, sa) in pa.gens.iter().enumerate().filter(|(_, s)| s.star == 1) {
                    for x in 0..sa.dim {
                        relations.push(transport_star(pb, r, |pos, (h, y)| match pos {
                            Side::Star => (pp[&(g, h)], x * pb.gens[h].dim + y),
                            Side::Before => (eb[&(sa.target, h)], y),
                            Side::After => (eb[&(sa.source, h)], y),
                        }));
                    }
                }
            }
            _ => return Err(SegreError::RelationDegree(pa.relations.len() + ri)),
        }
    }
    transported += relations.len();
    // [α ⊗ 1, 1 ⊗ β]
    let neg = f.negv(1);
    let mut commutators = 0;
    for (g, sa) in pa.gens.iter().enumerate().filter(|(_, s)| s.star == 0) {
        for (h, sb) in pb.gens.iter().enumerate().filter(|(_, s)| s.star == 0) {
            for x in 0..sa.dim {
                for y in 0..sb.dim {
                    let first = vec![
                        (ae[&(g, sb.target)], x * pb.rings[sb.target].dim),
                        (eb[&(sa.source, h)], y),
                    ];
                    let second = vec![
                        (eb[&(sa.target, h)], y),
                        (ae[&(g, sb.source)], x * pb.rings[sb.source].dim),
                    ];
                    relations.push(Relation {
                        terms: vec![(1, first), (neg, second)],
                    });
                    commutators += 1;
                }
            }
        }
    }
    let rings = (0..n1)
        .flat_map(|i| (0..n2).map(move |j| (i, j)))
        .map(|(i, j)| VertexRing::tensor(&f, &pa.rings[i], &pb.rings[j]))
        .collect();
    let names = (0..n1)
        .flat_map(|i| (0..n2).map(move |j| (i, j)))
        .map(|(i, j)| format!("{}{}", a.vertex_name(i), b.vertex_name(j)))
        .collect();
    Ok(TensorSpeciesPresentation {
        presentation: Presentation {
            field: f,
            rings,
            gens,
            relations,
        },
        names,
        arrows,
        transported,
        commutators,
    })
}

enum Side {
    Before,
    Star,
    After,
}

fn map_relation(r: &Relation, mut m: impl FnMut(usize, Letter) -> Letter) -> Relation {
    Relation {
        terms: r
            .terms
            .iter()
            .map(|(c, w)| (*c, w.iter().enumerate().map(|(i, &l)| m(i, l)).collect()))
            .collect(),
    }
}

/// Transports a ★-degree 1 relation: letters left of the starred one, the starred
/// letter, and letters right of it are mapped separately.
fn transport_star(p: &Presentation, r: &Relation, mut m: impl FnMut(Side, Letter) -> Letter) -> Relation {
    Relation {
        terms: r
            .terms
            .iter()
            .map(|(c, w)| {
                let star = w.iter().position(|&(g, _)| p.gens[g].star == 1).expect("★-degree 1");
                let word = w
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| {
                        let side = match i.cmp(&star) {
                            std::cmp::Ordering::Less => Side::Before,
                            std::cmp::Ordering::Equal => Side::Star,
                            std::cmp::Ordering::Greater => Side::After,
                        };
                        m(side, l)
                    })
                    .collect();
                (*c, word)
            })
            .collect(),
    }
}

impl TensorSpeciesPresentation {
    /// Builds the quotient algebra and compares its Hilbert table with the Segre product.
    pub fn certify(&self, segre: &FiniteGradedAlgebra) -> Result<FiniteGradedAlgebra, SegreError> {
        let cap = segre.top_degree() + 2;
        let mut q = quotient_algebra(self.presentation.clone(), cap)?;
        q.set_vertex_names(self.names.clone());
        let (hq, hs) = (q.hilbert(), segre.hilbert());
        for key in hq.keys().chain(hs.keys()) {
            let (x, y) = (hq.get(key).copied().unwrap_or(0), hs.get(key).copied().unwrap_or(0));
            if x != y {
                return Err(SegreError::DimensionMismatch {
                    bidegree: *key,
                    presented: x,
                    segre: y,
                });
            }
        }
        Ok(q)
    }

    /// Grid drawing: solid arrows in ★-degree 0, dotted in ★-degree 1.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph product {\n");
        for n in &self.names {
            s.push_str(&format!("  \"{n}\";\n"));
        }
        for a in &self.arrows {
            let style = if a.star == 1 { " [style=dotted]" } else { "" };
            s.push_str(&format!("  \"{}\" -> \"{}\"{};\n", self.names[a.source], self.names[a.target], style));
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homological::{random_complex, Expander};
    use crate::species::{realize, DynkinType, ValuedQuiver};
    use crate::tensor_algebra::{build_preprojective, build_tensor_algebra, semisimple};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pp_of(degrees: Vec<usize>, arrows: Vec<(usize, usize)>) -> PreprojectiveAlgebra {
        let q = ValuedQuiver::new(degrees, arrows).unwrap();
        build_preprojective(&realize(&q, 7).unwrap()).unwrap()
    }
    fn c3() -> PreprojectiveAlgebra {
        build_preprojective(&realize(&DynkinType::C(3).linear_quiver(), 7).unwrap()).unwrap()
    }
    fn d4() -> PreprojectiveAlgebra {
        pp_of(vec![1; 4], vec![(0, 1), (1, 2), (1, 3)])
    }
    fn a5() -> PreprojectiveAlgebra {
        pp_of(vec![1; 5], vec![(0, 1), (1, 2), (3, 2), (4, 3)])
    }

    fn a3_stable() -> PreprojectiveAlgebra {
        let q = crate::ar_knitting::sigma_stable_orientation(DynkinType::A(3)).unwrap();
        build_preprojective(&realize(&q, 7).unwrap()).unwrap()
    }

    #[test]
    fn c3_d4_product_complex() {
        let (c, d) = (c3(), d4());
        let pk = product_koszul_complex(
            &KoszulFactor::from_preprojective(&c, 0).unwrap(),
            &KoszulFactor::from_preprojective(&d, 1).unwrap(),
        )
        .unwrap();
        let prod = &pk.result.algebra;
        assert_eq!(
            pk.result.complex.shape_string(prod),
            "P12 | P13+P14+P22^2 | P11+P23^2+P24^2 | P12"
        );
        assert_eq!(pk.phi.source.shape_string(prod), "0 | P11 | P12");
        assert_eq!(pk.phi.target.shape_string(prod), "P12 | P13+P14+P22^2 | P23^2+P24^2");
        assert_eq!(pk.top_star_degrees(), vec![3]);
        assert!(pk.homology.keys().all(|(i, _)| *i == 0 || *i == 3));
    }

    #[test]
    fn product_complex_agrees_with_minimal_resolution() {
        let pk = product_koszul_complex(
            &KoszulFactor::from_preprojective(&c3(), 0).unwrap(),
            &KoszulFactor::from_preprojective(&d4(), 1).unwrap(),
        )
        .unwrap();
        let prod = &pk.result.algebra;
        let r = crate::homological::minimal_resolution(prod, pk.result.vertex, 4, |_| false).unwrap();
        assert_eq!(r.shape_string(prod), pk.result.complex.shape_string(prod));
        assert_eq!(r.steps.len(), 4);
    }

    #[test]
    fn triple_product_complex() {
        let pk = product_koszul_complex(
            &KoszulFactor::from_preprojective(&c3(), 0).unwrap(),
            &KoszulFactor::from_preprojective(&d4(), 1).unwrap(),
        )
        .unwrap();
        let t = product_koszul_complex(&pk.result, &KoszulFactor::from_preprojective(&a5(), 3).unwrap()).unwrap();
        let a = &t.result.algebra;
        assert_eq!(a.vertex_name(t.result.vertex), "124");
        assert_eq!(t.phi.source.shape_string(a), "0 | P115 | P114+P125 | P124");
        assert_eq!(
            t.phi.target.shape_string(a),
            "P124 | P123+P134+P144+P224^2 | P133+P143+P223^2+P234^2+P244^2 | P233^2+P243^2"
        );
        assert_eq!(
            t.result.complex.shape_string(a),
            "P124 | P123+P134+P144+P224^2 | P115+P133+P143+P223^2+P234^2+P244^2 | P114+P125+P233^2+P243^2 | P124"
        );
        assert_eq!(t.top_star_degrees(), vec![3]);
    }

    #[test]
    fn unequal_homogeneity_is_rejected() {
        let a3 = a3_stable();
        let err = product_koszul_complex(
            &KoszulFactor::from_preprojective(&a3, 0).unwrap(),
            &KoszulFactor::from_preprojective(&c3(), 0).unwrap(),
        )
        .unwrap_err();
        assert_eq!(err, SegreError::NotHomogeneous);
        let a2 = build_preprojective(&realize(&DynkinType::A(2).linear_quiver(), 7).unwrap()).unwrap();
        assert_eq!(KoszulFactor::from_preprojective(&a2, 0).unwrap_err(), SegreError::NotHomogeneous);
    }

    #[test]
    fn segre_dimensions_multiply_per_star_degree() {
        let (c, d) = (c3(), d4());
        let prod = segre_algebra(&c.algebra, &d.algebra);
        let (sc, sd, sp) = (star_dims(&c.algebra), star_dims(&d.algebra), star_dims(&prod));
        for (k, &n) in &sp {
            assert_eq!(n, sc[k] * sd.get(k).copied().unwrap_or(0));
        }
        let expected: usize = sc.iter().map(|(k, n)| n * sd.get(k).copied().unwrap_or(0)).sum();
        assert_eq!(prod.dim(), expected);
        for e in prod.basis() {
            assert!(e.l >= e.k);
        }
    }

    #[test]
    fn segre_with_ground_field_is_star_zero_part() {
        let a = a3_stable().algebra;
        let k = Arc::new(semisimple(a.field(), vec![VertexRing::of_field(&crate::field_tower::ExtField::new(7, 1), 1)]));
        let prod = segre_algebra(&a, &k);
        let zero: Vec<_> = a.basis().iter().filter(|e| e.k == 0).collect();
        assert_eq!(prod.dim(), zero.len());
        assert_eq!(prod.max_star(), 0);
    }

    #[test]
    fn segre_of_projectives_is_projective_column() {
        let (a, b) = (a3_stable().algebra, c3().algebra);
        let prod = segre_algebra(&a, &b);
        for i in 0..a.num_vertices() {
            for j in 0..b.num_vertices() {
                let mut expected: Vec<usize> = Vec::new();
                for &x in &a.projective_basis(i) {
                    for &y in &b.projective_basis(j) {
                        if let Some(z) = prod.segre_index(x, y) {
                            expected.push(z);
                        }
                    }
                }
                expected.sort_unstable();
                let mut got = prod.projective_basis(i * b.num_vertices() + j);
                got.sort_unstable();
                assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn hilbert_tables_are_associative() {
        let a2 = build_preprojective(&realize(&DynkinType::A(2).linear_quiver(), 7).unwrap()).unwrap().algebra;
        let a3 = a3_stable().algebra;
        let left = segre_algebra(&segre_algebra(&a2, &a3), &a2);
        let right = segre_algebra(&a2, &segre_algebra(&a3, &a2));
        assert_eq!(left.hilbert(), right.hilbert());
    }

    #[test]
    fn presentation_matches_segre_for_c3_d4_and_a3_a3() {
        for (x, y) in [(c3(), d4()), (a3_stable(), a3_stable())] {
            let prod = segre_algebra(&x.algebra, &y.algebra);
            let tsp = tensor_species_presentation(&x.algebra, &y.algebra).unwrap();
            let q = tsp.certify(&prod).unwrap();
            assert_eq!(q.hilbert(), prod.hilbert());
        }
        let tsp = tensor_species_presentation(&c3().algebra, &d4().algebra).unwrap();
        assert_eq!(tsp.names.len(), 12);
        assert_eq!(tsp.arrows.iter().filter(|a| a.star == 0).count(), 2 * 4 + 3 * 3);
        assert_eq!(tsp.arrows.iter().filter(|a| a.star == 1).count(), 2 * 3);
        assert!(tsp.to_dot().contains("style=dotted"));
    }

    #[test]
    fn relation_free_factors_give_commutative_squares() {
        let t = |n: usize| {
            Arc::new(build_tensor_algebra(&realize(&DynkinType::A(n).linear_quiver(), 7).unwrap()).unwrap())
        };
        let (x, y) = (t(2), t(3));
        let prod = segre_algebra(&x, &y);
        let tsp = tensor_species_presentation(&x, &y).unwrap();
        assert_eq!(tsp.transported, 0);
        assert_eq!(tsp.commutators, 2);
        tsp.certify(&prod).unwrap();
        assert_eq!(prod.dim(), x.dim() * y.dim());
    }

    /// Top path degree of the Segre product from the factor Hilbert tables alone.
    fn top_from_hilbert(a: &FiniteGradedAlgebra, b: &FiniteGradedAlgebra) -> usize {
        let (ha, hb) = (a.hilbert(), b.hilbert());
        let mut top = 0;
        for &(l1, k1) in ha.keys() {
            for &(l2, k2) in hb.keys() {
                if k1 == k2 {
                    top = top.max(l1 + l2 - k1);
                }
            }
        }
        top
    }

    #[test]
    fn product_pq_measurements() {
        let a3 = a3_stable();
        let r = product_pq(&a3, &a3).unwrap();
        assert_eq!(r.measured.0, top_from_hilbert(&a3.algebra, &a3.algebra));
        assert_eq!(r.measured, (3, 3));
        assert_eq!(r.measured.1, r.q_formula);
        assert_eq!(r.matching_formula(), "p1+p2-l+1");
        let (c, d) = (c3(), d4());
        let r = product_pq(&c, &d).unwrap();
        assert_eq!(r.measured.0, top_from_hilbert(&c.algebra, &d.algebra));
        assert_eq!(r.measured, (6, 3));
        assert_eq!(r.matching_formula(), "p1+p2-l+1");
    }

    fn random_map(alg: &FiniteGradedAlgebra, rng: &mut ChaCha8Rng, src: &ProjSum, tgt: &ProjSum) -> ProjMap {
        let f = alg.field();
        let mut m = ProjMap::zero(tgt.len(), src.len());
        for b in crate::homological::hom_space(alg, src, tgt) {
            let c = rng.gen_range(0..f.p());
            m = m.add(&f, &b.scaled(&f, c));
        }
        m
    }

    fn random_sum(alg: &FiniteGradedAlgebra, rng: &mut ChaCha8Rng, l: usize) -> ProjSum {
        let n = rng.gen_range(1..=2);
        ProjSum::new(
            (0..n)
                .map(|_| Summand {
                    vertex: rng.gen_range(0..alg.num_vertices()),
                    shift: (l + rng.gen_range(0..=1), 0),
                })
                .collect(),
        )
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn segre_maps_are_functorial(seed in 0u64..1_000_000) {
            let a = a3_stable().algebra;
            let b = Arc::new(build_tensor_algebra(&realize(&DynkinType::A(3).linear_quiver(), 7).unwrap()).unwrap());
            let prod = segre_algebra(&a, &b);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x0, x1, x2) = (random_sum(&a, &mut rng, 2), random_sum(&a, &mut rng, 1), random_sum(&a, &mut rng, 0));
            let (y0, y1, y2) = (random_sum(&b, &mut rng, 2), random_sum(&b, &mut rng, 1), random_sum(&b, &mut rng, 0));
            let (f, g) = (random_map(&a, &mut rng, &x0, &x1), random_map(&a, &mut rng, &x1, &x2));
            let (f2, g2) = (random_map(&b, &mut rng, &y0, &y1), random_map(&b, &mut rng, &y1, &y2));
            let lhs = segre_map(&prod, &f.then(&g, &a), &f2.then(&g2, &b)).unwrap();
            let rhs = segre_map(&prod, &f, &f2).unwrap().then(&segre_map(&prod, &g, &g2).unwrap(), &prod);
            proptest::prop_assert_eq!(lhs, rhs);
            let sum = segre_sum(&prod, &x0, &y0).unwrap();
            let id = segre_map(&prod, &ProjMap::identity(x0.len(), &a, &x0), &ProjMap::identity(y0.len(), &b, &y0)).unwrap();
            proptest::prop_assert_eq!(id, ProjMap::identity(sum.len(), &prod, &sum));
            proptest::prop_assert!(segre_map(&prod, &f, &ProjMap::zero(y1.len(), y0.len())).unwrap().is_zero());
        }

        #[test]
        fn kunneth_holds(seed in 0u64..1_000_000) {
            let a2 = build_preprojective(&realize(&DynkinType::A(2).linear_quiver(), 7).unwrap()).unwrap().algebra;
            let a3 = a3_stable().algebra;
            let f = a2.field();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_graded(&a3, &mut rng);
            let y = random_graded(&a2, &mut rng);
            let tot = tot_segre(&f, &x, &y, 2).unwrap();
            proptest::prop_assert_eq!(tot.homology(&f), kunneth_prediction(&x.homology(&f), &y.homology(&f), 2));
        }
    }

    fn random_graded(alg: &FiniteGradedAlgebra, rng: &mut ChaCha8Rng) -> GradedComplex {
        let len = rng.gen_range(1..=3);
        Expander::new(alg).complex(&random_complex(alg, rng, len, 2))
    }

    #[test]
    fn kunneth_on_random_complexes() {
        let a2 = build_preprojective(&realize(&DynkinType::A(2).linear_quiver(), 7).unwrap()).unwrap().algebra;
        let a3 = build_preprojective(&realize(&DynkinType::A(3).linear_quiver(), 7).unwrap()).unwrap().algebra;
        let f = a2.field();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x = random_graded(&a2, &mut rng);
            let y = random_graded(&a3, &mut rng);
            let tot = tot_segre(&f, &x, &y, a3.num_vertices()).unwrap();
            assert_eq!(tot.homology(&f), kunneth_prediction(&x.homology(&f), &y.homology(&f), 3));
        }
    }

    #[test]
    fn projective_tot_expands_to_graded_tot() {
        let a = Arc::new(build_tensor_algebra(&realize(&DynkinType::A(3).linear_quiver(), 7).unwrap()).unwrap());
        let prod = segre_algebra(&a, &a);
        let f = a.field();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let flat = |c: ProjComplex| {
            let terms = c
                .terms
                .iter()
                .map(|t| ProjSum::new(t.summands.iter().map(|s| Summand { vertex: s.vertex, shift: (s.shift.0, 0) }).collect()))
                .collect();
            ProjComplex { terms, diffs: c.diffs }
        };
        for _ in 0..5 {
            let x = flat(random_complex(&a, &mut rng, 3, 2));
            let y = flat(random_complex(&a, &mut rng, 2, 2));
            let tot = tot_segre_projective(&prod, &x, &y).unwrap();
            let ex = Expander::new(&a);
            let graded = tot_segre(&f, &ex.complex(&x), &ex.complex(&y), 3).unwrap();
            assert_eq!(homology(&prod, &tot), graded.homology(&f));
        }
    }

    #[test]
    fn single_term_factor_reproduces_complex() {
        let t = Arc::new(build_tensor_algebra(&realize(&DynkinType::A(3).linear_quiver(), 7).unwrap()).unwrap());
        let k = Arc::new(semisimple(t.field(), vec![VertexRing::of_field(&crate::field_tower::ExtField::new(7, 1), 1)]));
        let prod = segre_algebra(&k, &t);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = random_complex(&t, &mut rng, 3, 2);
        let y = ProjComplex {
            terms: y.terms.iter().map(|s| ProjSum::new(s.summands.iter().map(|x| Summand { vertex: x.vertex, shift: (x.shift.0, 0) }).collect())).collect(),
            diffs: y.diffs,
        };
        let x = ProjComplex::new(vec![ProjSum::new(vec![Summand { vertex: 0, shift: (0, 0) }])], vec![]);
        let tot = tot_segre_projective(&prod, &x, &y).unwrap();
        assert_eq!(tot.shape_string(&prod), y.shape_string(&t).replace('P', "P1"));
        assert_eq!(homology(&prod, &tot), homology(&t, &y));
    }

    #[test]
    fn bi_exactness_on_random_sequences() {
        let a2 = build_preprojective(&realize(&DynkinType::A(2).linear_quiver(), 7).unwrap()).unwrap().algebra;
        let a3 = build_preprojective(&realize(&DynkinType::A(3).linear_quiver(), 7).unwrap()).unwrap().algebra;
        let f = a2.field();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let c = random_complex(&a3, &mut rng, 2, 3);
            let ex = Expander::new(&a3);
            let g = ex.complex(&c);
            let ses = kernel_image_sequence(&f, &g.labels[1], &g.labels[0], &g.diffs[1]);
            ses.check(&f).unwrap();
            assert!(ses.homology(&f).is_empty());
            let m = random_graded(&a2, &mut rng);
            let m = GradedComplex { labels: vec![m.labels[0].clone()], diffs: vec![m.diffs[0].clone()] };
            assert!(tot_segre(&f, &m, &ses, 3).unwrap().homology(&f).is_empty());
            assert!(tot_segre(&f, &ses, &m, 2).unwrap().homology(&f).is_empty());
        }
    }
}
