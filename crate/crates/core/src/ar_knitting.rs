//! Auslander–Reiten quivers of Dynkin species from Grothendieck-group data:
//! projective and injective classes, the Coxeter transformation, knitting of
//! τ-orbits, the Nakayama permutation, orbit lengths and the weight function.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::field_tower::{rational_to_i64, Field, Matrix, Rationals};
use crate::species::{DynkinType, SpeciesSpec, ValuedQuiver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArError {
    #[error("quiver has an oriented cycle")]
    Cyclic,
    #[error("not Dynkin: {0}")]
    NotDynkin(String),
    #[error("computed Nakayama permutation {computed:?} differs from the table {expected:?}")]
    TableMismatch { computed: Vec<usize>, expected: Vec<usize> },
}

/// Class in K₀ with coordinates in the basis of simple modules.
pub type K0Vector = Vec<i64>;

/// Integer matrix acting on K₀ by columns.
pub type IntMatrix = Vec<Vec<i64>>;

pub fn mat_vec(m: &IntMatrix, v: &[i64]) -> K0Vector {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

fn columns_to_matrix(cols: &[K0Vector]) -> IntMatrix {
    let n = cols.len();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

fn int_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let q = Rationals;
    let n = m.len();
    let rows = m.iter().map(|r| r.iter().map(|&x| q.from_i64(x)).collect()).collect();
    let inv = Matrix::from_rows(&q, rows, n).inverse().ok()?;
    (0..n)
        .map(|i| (0..n).map(|j| rational_to_i64(inv.get(i, j))).collect())
        .collect()
}

/// `[P_i]` for every vertex, from `[P_i] = [D_i] + Σ_{α: i→t} dim_{D_t} M_α · [P_t]`.
pub fn projective_classes(s: &SpeciesSpec) -> Result<Vec<K0Vector>, ArError> {
    projective_classes_of(&s.quiver)
}

pub fn projective_classes_of(q: &ValuedQuiver) -> Result<Vec<K0Vector>, ArError> {
    let order = q.topological_order().ok_or(ArError::Cyclic)?;
    let n = q.num_vertices();
    let mut p: Vec<K0Vector> = vec![Vec::new(); n];
    for &i in order.iter().rev() {
        let mut v = vec![0; n];
        v[i] = 1;
        for (a, ar) in q.arrows().iter().enumerate() {
            if ar.source == i {
                let m = q.valuations()[a].1 as i64;
                for (x, y) in v.iter_mut().zip(&p[ar.target]) {
                    *x += m * y;
                }
            }
        }
        p[i] = v;
    }
    Ok(p)
}

/// `[I_i]` for every vertex, from `[I_i] = [D_i] + Σ_{α: s→i} dim_{D_s} M_α · [I_s]`.
pub fn injective_classes_of(q: &ValuedQuiver) -> Result<Vec<K0Vector>, ArError> {
    let order = q.topological_order().ok_or(ArError::Cyclic)?;
    let n = q.num_vertices();
    let mut inj: Vec<K0Vector> = vec![Vec::new(); n];
    for &i in &order {
        let mut v = vec![0; n];
        v[i] = 1;
        for (a, ar) in q.arrows().iter().enumerate() {
            if ar.target == i {
                let m = q.valuations()[a].0 as i64;
                for (x, y) in v.iter_mut().zip(&inj[ar.source]) {
                    *x += m * y;
                }
            }
        }
        inj[i] = v;
    }
    Ok(inj)
}

/// The Coxeter matrix `c` with `c[P_i] = −[I_i]`.
pub fn coxeter(s: &SpeciesSpec) -> Result<IntMatrix, ArError> {
    coxeter_of(&s.quiver)
}

pub fn coxeter_of(q: &ValuedQuiver) -> Result<IntMatrix, ArError> {
    let p = columns_to_matrix(&projective_classes_of(q)?);
    let neg_i: Vec<K0Vector> = injective_classes_of(q)?
        .into_iter()
        .map(|v| v.into_iter().map(|x| -x).collect())
        .collect();
    let pinv = int_inverse(&p).expect("projective classes are unimodular");
    Ok(mat_mul(&columns_to_matrix(&neg_i), &pinv))
}

pub fn is_positive(v: &[i64]) -> bool {
    v.iter().all(|&x| x >= 0) && v.iter().any(|&x| x > 0)
}

pub fn is_negative(v: &[i64]) -> bool {
    v.iter().all(|&x| x <= 0) && v.iter().any(|&x| x < 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArVertex {
    /// Index of the projective starting the τ-orbit.
    pub proj: usize,
    /// Vertex is τ^{-t} P_proj.
    pub t: usize,
    pub class: K0Vector,
    pub delta: usize,
    /// `Some(i)` when this vertex is I_i.
    pub injective: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArArrow {
    pub from: usize,
    pub to: usize,
    pub d: usize,
    pub valuation: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct ARQuiver {
    pub quiver: ValuedQuiver,
    pub degrees: Vec<usize>,
    pub vertices: Vec<ArVertex>,
    pub arrows: Vec<ArArrow>,
    pub coxeter: IntMatrix,
    pub projectives: Vec<K0Vector>,
    pub injectives: Vec<K0Vector>,
    index: BTreeMap<(usize, usize), usize>,
    orbit_len: Vec<usize>,
    dynkin: Option<DynkinType>,
    expected_sigma: Option<Vec<usize>>,
}

/// Knits Γ_S by advancing every τ-orbit with the inverse Coxeter transformation.
pub fn knit(s: &SpeciesSpec) -> Result<ARQuiver, ArError> {
    let q = &s.quiver;
    let class = s.dynkin.clone().ok_or_else(|| ArError::NotDynkin(s.name.clone()))?;
    let mut ar = knit_quiver(q)?;
    ar.dynkin = Some(class.ty);
    ar.expected_sigma = Some(class.expected_nakayama());
    Ok(ar)
}

/// Knitting without classification; fails if some class is neither positive nor negative
/// or an orbit does not terminate.
pub fn knit_quiver(q: &ValuedQuiver) -> Result<ARQuiver, ArError> {
    let n = q.num_vertices();
    let projectives = projective_classes_of(q)?;
    let injectives = injective_classes_of(q)?;
    let c = coxeter_of(q)?;
    let cinv = int_inverse(&c).expect("Coxeter matrix is invertible");
    let cap = 4 * n * n + 8;
    let mut vertices = Vec::new();
    let mut index = BTreeMap::new();
    let mut current: Vec<Option<K0Vector>> = projectives.iter().cloned().map(Some).collect();
    let mut orbit_len = vec![0; n];
    for t in 0.. {
        if current.iter().all(Option::is_none) {
            break;
        }
        if t > cap {
            return Err(ArError::NotDynkin("τ-orbit does not terminate".into()));
        }
        for i in 0..n {
            let Some(x) = current[i].take() else { continue };
            if !is_positive(&x) {
                return Err(ArError::NotDynkin(format!("class {x:?} is not positive")));
            }
            let next = mat_vec(&cinv, &x);
            let injective = if is_negative(&next) {
                let p: K0Vector = next.iter().map(|v| -v).collect();
                let j = projectives
                    .iter()
                    .position(|q| *q == p)
                    .ok_or_else(|| ArError::NotDynkin(format!("{next:?} is not a negative projective")))?;
                Some(j)
            } else if is_positive(&next) {
                current[i] = Some(next);
                None
            } else {
                return Err(ArError::NotDynkin(format!("class {next:?} has mixed signs")));
            };
            index.insert((i, t), vertices.len());
            vertices.push(ArVertex {
                proj: i,
                t,
                class: x,
                delta: q.degrees()[i],
                injective,
            });
            orbit_len[i] = t + 1;
        }
    }
    let mut arrows = Vec::new();
    for (a, ar) in q.arrows().iter().enumerate() {
        let d = q.bimodule_dim(a);
        let (i, j) = (ar.source, ar.target);
        for t in 0..orbit_len[i].max(orbit_len[j]) {
            if let (Some(&x), Some(&y)) = (index.get(&(j, t)), index.get(&(i, t))) {
                arrows.push(ArArrow {
                    from: x,
                    to: y,
                    d,
                    valuation: (d / q.degrees()[j], d / q.degrees()[i]),
                });
            }
            if let (Some(&x), Some(&y)) = (index.get(&(i, t)), index.get(&(j, t + 1))) {
                arrows.push(ArArrow {
                    from: x,
                    to: y,
                    d,
                    valuation: (d / q.degrees()[i], d / q.degrees()[j]),
                });
            }
        }
    }
    arrows.sort_by_key(|a| (a.from, a.to));
    Ok(ARQuiver {
        quiver: q.clone(),
        degrees: q.degrees().to_vec(),
        vertices,
        arrows,
        coxeter: c,
        projectives,
        injectives,
        index,
        orbit_len,
        dynkin: None,
        expected_sigma: None,
    })
}

impl ARQuiver {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn vertex(&self, proj: usize, t: usize) -> Option<usize> {
        self.index.get(&(proj, t)).copied()
    }
    pub fn orbit_lengths_by_start(&self) -> &[usize] {
        &self.orbit_len
    }
    /// Position of τ X, if X is not projective.
    pub fn tau(&self, v: usize) -> Option<usize> {
        let x = &self.vertices[v];
        (x.t > 0).then(|| self.index[&(x.proj, x.t - 1)])
    }
    pub fn tau_inverse(&self, v: usize) -> Option<usize> {
        let x = &self.vertices[v];
        self.index.get(&(x.proj, x.t + 1)).copied()
    }
    /// K-dimension of an indecomposable.
    pub fn k_dim(&self, v: usize) -> usize {
        self.vertices[v]
            .class
            .iter()
            .zip(&self.degrees)
            .map(|(&x, &d)| x as usize * d)
            .sum()
    }
    /// Σ over indecomposables of their K-dimension.
    pub fn total_k_dim(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.k_dim(v)).sum()
    }
    /// Σ_i dim_K τ^{-k} P_i per k.
    pub fn star_column_oracle(&self) -> Vec<usize> {
        let kmax = self.orbit_len.iter().copied().max().unwrap_or(0);
        let mut out = vec![0; kmax];
        for (v, x) in self.vertices.iter().enumerate() {
            out[x.t] += self.k_dim(v);
        }
        out
    }

    /// Checks `[X] + [τ^{-1}X] = Σ (d_XY/δ(Y)) [Y]` at every non-injective X.
    pub fn meshes_hold(&self) -> bool {
        for (v, x) in self.vertices.iter().enumerate() {
            let Some(w) = self.tau_inverse(v) else { continue };
            let mut lhs: Vec<i64> = x.class.iter().zip(&self.vertices[w].class).map(|(a, b)| a + b).collect();
            for a in self.arrows.iter().filter(|a| a.from == v) {
                let y = &self.vertices[a.to];
                let m = (a.d / y.delta) as i64;
                for (l, c) in lhs.iter_mut().zip(&y.class) {
                    *l -= m * c;
                }
            }
            if lhs.iter().any(|&z| z != 0) {
                return false;
            }
        }
        true
    }

    /// `W(i, j)` for vertices of Q: −1 per arrow traversed forward, +1 backward.
    pub fn quiver_weight(&self) -> Vec<i64> {
        let q = &self.quiver;
        let n = q.num_vertices();
        let mut w = vec![None; n];
        w[0] = Some(0i64);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for ar in q.arrows() {
                let (u, val) = if ar.source == v {
                    (ar.target, w[v].unwrap() - 1)
                } else if ar.target == v {
                    (ar.source, w[v].unwrap() + 1)
                } else {
                    continue;
                };
                if w[u].is_none() {
                    w[u] = Some(val);
                    queue.push_back(u);
                }
            }
        }
        w.into_iter().map(|x| x.unwrap_or(0)).collect()
    }

    /// Position of the repetitive-quiver vertex `(i, t)` = τ^{-t} P_i, t ∈ ℤ.
    pub fn position(&self, i: usize, t: i64) -> i64 {
        2 * t + self.quiver_weight()[i]
    }

    /// `W(X, Y) = 2(t₂ − t₁) + W(i, j)` for X = τ^{-t₁}P_i and Y = τ^{-t₂}P_j.
    pub fn weight(&self, x: (usize, i64), y: (usize, i64)) -> i64 {
        let w = self.quiver_weight();
        2 * (y.1 - x.1) + w[y.0] - w[x.0]
    }

    /// Shift `X[1]` of the repetitive-quiver vertex `(i, t)`.
    pub fn shift(&self, x: (usize, i64), nd: &NakayamaData) -> (usize, i64) {
        (nd.sigma[x.0], x.1 + nd.orbit_lengths[x.0] as i64)
    }

    /// Potentials from a BFS over Γ with every arrow of weight 1; `None` if some cycle
    /// has nonzero total weight.
    pub fn bfs_weights(&self) -> Option<Vec<i64>> {
        let n = self.num_vertices();
        let mut pos = vec![None; n];
        for start in 0..n {
            if pos[start].is_some() {
                continue;
            }
            pos[start] = Some(0i64);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for a in &self.arrows {
                    let (u, val) = if a.from == v {
                        (a.to, pos[v].unwrap() + 1)
                    } else if a.to == v {
                        (a.from, pos[v].unwrap() - 1)
                    } else {
                        continue;
                    };
                    match pos[u] {
                        None => {
                            pos[u] = Some(val);
                            queue.push_back(u);
                        }
                        Some(p) if p != val => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(pos.into_iter().map(|p| p.unwrap()).collect())
    }

    /// DOT rendering with deterministic node order.
    pub fn to_dot(&self) -> String {
        let labels = self.quiver.labels();
        let mut out = String::from("digraph AR {\n  rankdir=LR;\n");
        for (v, x) in self.vertices.iter().enumerate() {
            let dims: Vec<String> = x.class.iter().map(|c| c.to_string()).collect();
            let name = if x.t == 0 {
                format!("P{}", labels[x.proj])
            } else {
                format!("τ^-{}P{}", x.t, labels[x.proj])
            };
            let _ = writeln!(out, "  v{v} [label=\"{name} [{}]\"];", dims.join(","));
        }
        for a in &self.arrows {
            let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", a.from, a.to, a.d);
        }
        out.push_str("}\n");
        out
    }
}

/// σ, orbit lengths l_i, Coxeter number h and homogeneity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NakayamaData {
    pub sigma: Vec<usize>,
    pub orbit_lengths: Vec<usize>,
    pub h: usize,
    pub homogeneous: Option<usize>,
}

impl NakayamaData {
    pub fn to_json(&self, labels: &[u32]) -> serde_json::Value {
        serde_json::json!({
            "sigma": self.sigma.iter().map(|&s| labels[s]).collect::<Vec<_>>(),
            "orbit_lengths": self.orbit_lengths,
            "h": self.h,
            "homogeneous": self.homogeneous,
        })
    }
}

/// Reads σ from which projective's orbit ends at each injective.
pub fn nakayama_permutation(ar: &ARQuiver) -> Result<NakayamaData, ArError> {
    let n = ar.quiver.num_vertices();
    let mut sigma = vec![usize::MAX; n];
    let mut lens = vec![0; n];
    for x in &ar.vertices {
        if let Some(i) = x.injective {
            sigma[i] = x.proj;
            lens[i] = x.t + 1;
        }
    }
    if sigma.contains(&usize::MAX) {
        return Err(ArError::NotDynkin("some injective is not reached".into()));
    }
    let h = lens[0] + lens[sigma[0]];
    if (0..n).any(|i| lens[i] + lens[sigma[i]] != h) {
        return Err(ArError::NotDynkin("orbit lengths are inconsistent".into()));
    }
    if let Some(expected) = &ar.expected_sigma {
        if *expected != sigma {
            return Err(ArError::TableMismatch {
                computed: sigma,
                expected: expected.clone(),
            });
        }
    }
    if let Some(ty) = ar.dynkin {
        if ty.coxeter_number() != h {
            return Err(ArError::NotDynkin(format!("h = {h} but {ty} has Coxeter number {}", ty.coxeter_number())));
        }
    }
    let homogeneous = lens.iter().all(|&l| l == lens[0]).then_some(lens[0]);
    Ok(NakayamaData {
        sigma,
        orbit_lengths: lens,
        h,
        homogeneous,
    })
}

/// Common orbit length when all are equal.
pub fn homogeneity(nd: &NakayamaData, q: &ValuedQuiver) -> Option<usize> {
    let _ = q;
    nd.homogeneous
}

/// Whether σ maps every arrow of Q to an arrow of Q.
pub fn is_sigma_stable(q: &ValuedQuiver, sigma: &[usize]) -> bool {
    q.arrows()
        .iter()
        .all(|a| q.arrows().iter().any(|b| b.source == sigma[a.source] && b.target == sigma[a.target]))
}

/// First orientation (in binary counting order) stable under the table permutation.
pub fn sigma_stable_orientation(ty: DynkinType) -> Option<ValuedQuiver> {
    let e = ty.edges().len();
    let sigma = ty.nakayama_table();
    (0u64..1 << e).find_map(|code| {
        let flags: Vec<bool> = (0..e).map(|i| code >> i & 1 == 0).collect();
        let q = ty.quiver(&flags);
        is_sigma_stable(&q, &sigma).then_some(q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::{realize, sample_orientations};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn types() -> Vec<DynkinType> {
        let mut v: Vec<DynkinType> = (1..=6).map(DynkinType::A).collect();
        v.extend((2..=4).map(DynkinType::B));
        v.extend((2..=4).map(DynkinType::C));
        v.extend((4..=6).map(DynkinType::D));
        v.extend([DynkinType::E(6), DynkinType::E(7), DynkinType::E(8), DynkinType::F4, DynkinType::G2]);
        v
    }

    #[test]
    fn a2_projectives() {
        let s = realize(&DynkinType::A(2).linear_quiver(), 7).unwrap();
        assert_eq!(projective_classes(&s).unwrap(), vec![vec![1, 1], vec![0, 1]]);
        let ar = knit(&s).unwrap();
        assert_eq!(ar.num_vertices(), 3);
    }

    #[test]
    fn cyclic_quiver_rejected() {
        let q = ValuedQuiver::new(vec![1, 1, 1], vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(projective_classes_of(&q), Err(ArError::Cyclic));
    }

    #[test]
    fn coxeter_properties() {
        for ty in types() {
            let s = realize(&ty.linear_quiver(), 7).unwrap();
            let c = coxeter(&s).unwrap();
            let p = projective_classes(&s).unwrap();
            let inj = injective_classes_of(&s.quiver).unwrap();
            for (pi, ii) in p.iter().zip(&inj) {
                let neg: Vec<i64> = ii.iter().map(|x| -x).collect();
                assert_eq!(mat_vec(&c, pi), neg);
            }
            let n = c.len();
            let mut pow: IntMatrix = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
            for _ in 0..ty.coxeter_number() {
                pow = mat_mul(&pow, &c);
            }
            let id: IntMatrix = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
            assert_eq!(pow, id, "{ty}");
        }
    }

    #[test]
    fn knitting_counts_and_meshes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ty in types() {
            for q in sample_orientations(ty, 3, &mut rng) {
                let s = realize(&q, 7).unwrap();
                let ar = knit(&s).unwrap();
                assert_eq!(ar.num_vertices(), ty.rank() * ty.coxeter_number() / 2, "{ty}");
                assert!(ar.meshes_hold(), "{ty} {}", q.orientation_label());
                // c[M] = [τM] on non-projectives.
                for v in 0..ar.num_vertices() {
                    if let Some(u) = ar.tau(v) {
                        assert_eq!(mat_vec(&ar.coxeter, &ar.vertices[v].class), ar.vertices[u].class);
                    }
                }
                let nd = nakayama_permutation(&ar).unwrap();
                for i in 0..ty.rank() {
                    assert_eq!(nd.orbit_lengths[i] + nd.orbit_lengths[nd.sigma[i]], nd.h);
                }
            }
        }
    }

    #[test]
    fn c3_and_d4_shapes() {
        let s = realize(&DynkinType::C(3).linear_quiver(), 7).unwrap();
        let ar = knit(&s).unwrap();
        assert_eq!(ar.num_vertices(), 9);
        assert!(ar.arrows.iter().any(|a| a.valuation == (1, 2)));
        assert!(ar.arrows.iter().any(|a| a.valuation == (2, 1)));
        // D4 with all arrows out of the branch vertex.
        let q = ValuedQuiver::new(vec![1; 4], vec![(1, 0), (1, 2), (1, 3)]).unwrap();
        let ar = knit(&realize(&q, 7).unwrap()).unwrap();
        assert_eq!(ar.num_vertices(), 12);
        let p2 = ar.vertex(1, 0).unwrap();
        assert_eq!(ar.arrows.iter().filter(|a| a.from == p2).count(), 3);
    }

    #[test]
    fn nakayama_examples() {
        let nd = |ty: DynkinType| {
            let s = realize(&ty.linear_quiver(), 7).unwrap();
            nakayama_permutation(&knit(&s).unwrap()).unwrap()
        };
        assert_eq!(nd(DynkinType::A(4)).sigma, vec![3, 2, 1, 0]);
        assert_eq!(nd(DynkinType::D(5)).sigma, vec![1, 0, 2, 3, 4]);
        assert_eq!(nd(DynkinType::F4).sigma, vec![0, 1, 2, 3]);
        assert_eq!(nd(DynkinType::A(2)).homogeneous, None);
        let mut lens = nd(DynkinType::A(2)).orbit_lengths;
        lens.sort_unstable();
        assert_eq!(lens, vec![1, 2]);
    }

    #[test]
    fn homogeneity_table_on_stable_orientations() {
        let table = [
            (DynkinType::A(3), Some(2)),
            (DynkinType::A(5), Some(3)),
            (DynkinType::B(3), Some(3)),
            (DynkinType::C(3), Some(3)),
            (DynkinType::D(4), Some(3)),
            (DynkinType::D(5), Some(4)),
            (DynkinType::E(6), Some(6)),
            (DynkinType::E(7), Some(9)),
            (DynkinType::E(8), Some(15)),
            (DynkinType::F4, Some(6)),
            (DynkinType::G2, Some(3)),
        ];
        for (ty, l) in table {
            let q = sigma_stable_orientation(ty).unwrap();
            let s = realize(&q, 7).unwrap();
            let nd = nakayama_permutation(&knit(&s).unwrap()).unwrap();
            assert_eq!(homogeneity(&nd, &q), l, "{ty}");
        }
        assert!(sigma_stable_orientation(DynkinType::A(2)).is_none());
    }

    #[test]
    fn weight_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ty in types() {
            for q in sample_orientations(ty, 2, &mut rng) {
                let s = realize(&q, 7).unwrap();
                let ar = knit(&s).unwrap();
                let nd = nakayama_permutation(&ar).unwrap();
                let h = nd.h as i64;
                let bfs = ar.bfs_weights().expect("path independent");
                for (v, x) in ar.vertices.iter().enumerate() {
                    assert_eq!(bfs[v] - bfs[0], ar.weight((ar.vertices[0].proj, 0), (x.proj, x.t as i64)));
                    let me = (x.proj, x.t as i64);
                    assert_eq!(ar.weight(me, me), 0);
                    assert_eq!(ar.weight(me, (x.proj, x.t as i64 + 1)), 2);
                    assert_eq!(ar.weight(me, ar.shift(me, &nd)), h, "{ty}");
                }
                for i in 0..ty.rank() {
                    let inj = (nd.sigma[i], nd.orbit_lengths[i] as i64 - 1);
                    assert_eq!(ar.vertices[ar.vertex(inj.0, inj.1 as usize).unwrap()].injective, Some(i));
                    assert_eq!(ar.weight((i, 0), inj), h - 2, "{ty}");
                    assert_eq!(ar.weight(inj, ar.shift((i, 0), &nd)), 2);
                }
            }
        }
    }

    #[test]
    fn preprojective_dimension_matches_ar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for ty in types().into_iter().filter(|t| *t != DynkinType::E(8)) {
            for q in sample_orientations(ty, 2, &mut rng) {
                let s = realize(&q, 7).unwrap();
                let ar = knit(&s).unwrap();
                let pi = crate::tensor_algebra::preprojective(&s).unwrap();
                assert_eq!(pi.dim(), ar.total_k_dim(), "{ty}");
                assert_eq!(pi.star_columns(), ar.star_column_oracle(), "{ty}");
                assert_eq!(pi.top_degree(), ty.coxeter_number() - 2, "{ty}");
            }
        }
    }

    #[test]
    fn dot_is_deterministic() {
        let s = realize(&DynkinType::C(3).linear_quiver(), 7).unwrap();
        let a = knit(&s).unwrap().to_dot();
        let b = knit(&s).unwrap().to_dot();
        assert_eq!(a, b);
        assert_eq!(a.matches("label=\"P").count() + a.matches("label=\"τ").count(), 9);
    }
}
