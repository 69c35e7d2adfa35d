//! The unit-graph built explicitly, for checking the spectral results against
//! ground truth at small orders.
//!
//! Vertices are the matrices of `Mat_n(F_q)` by enumeration index; `i ~ j`
//! iff `M_j - M_i` is invertible. Small graphs keep packed bit rows. The
//! streamed representation keeps only the list of units and recomputes each
//! row as `{i + s : s ∈ GL_n}`, which is what larger orders use.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

use crate::chars::{char_exponents, Cyclotomic};
use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::matfq::{gl_order, EnumConfig, MatFq, MatrixSpace};
use crate::partition;
use crate::spectra::{eig_charsum, Spectrum, SpectrumLine};

/// Default largest vertex count for a packed adjacency matrix.
pub const DEFAULT_GRAPH_CAP: u64 = 4096;

#[derive(Clone, Debug)]
enum Adjacency {
    /// Row `i` occupies `words` consecutive `u64`s.
    Packed { words: usize, bits: Vec<u64> },
    /// Entry values of every unit `s`, `n²` per unit, so row `i` is
    /// `{i + s}` computed digitwise; plus the unit flag of every index.
    Streamed { units: Vec<u32>, mask: Vec<bool> },
}

#[derive(Clone, Debug)]
pub struct CayleyGraph {
    space: MatrixSpace,
    adjacency: Adjacency,
    row_degree: u64,
}

fn neg_unit_indices(space: &MatrixSpace, mask: &[bool]) -> Vec<u64> {
    mask.iter()
        .enumerate()
        .filter(|(_, &u)| u)
        .map(|(s, _)| space.sub_index(0, s as u64))
        .collect()
}

impl CayleyGraph {
    /// Packed adjacency for `Mat_n(F_q)`, validated before return.
    pub fn build(
        ctx: &Arc<FieldCtx>,
        n: usize,
        graph_cap: u64,
        workers: usize,
    ) -> Result<CayleyGraph> {
        let space = MatrixSpace::new(ctx, n, graph_cap)?;
        let order = space.len();
        let words = order.div_ceil(64) as usize;
        let mut bits = vec![0u64; words * order as usize];
        for &ns in &neg_unit_indices(&space, &space.unit_mask(workers)) {
            for i in 0..order {
                let j = space.sub_index(i, ns);
                bits[i as usize * words + (j / 64) as usize] |= 1 << (j % 64);
            }
        }
        let g = CayleyGraph::from_parts(space, Adjacency::Packed { words, bits });
        g.validate()?;
        Ok(g)
    }

    /// Row-on-demand graph; only the unit list is stored.
    pub fn streamed(
        ctx: &Arc<FieldCtx>,
        n: usize,
        enum_cap: u64,
        workers: usize,
    ) -> Result<CayleyGraph> {
        let space = MatrixSpace::new(ctx, n, enum_cap)?;
        let mask = space.unit_mask(workers);
        let nn = n * n;
        let mut units = Vec::new();
        let mut buf = vec![0; nn];
        for (s, _) in mask.iter().enumerate().filter(|(_, &u)| u) {
            space.decode_into(s as u64, &mut buf);
            units.extend_from_slice(&buf);
        }
        let g = CayleyGraph::from_parts(space, Adjacency::Streamed { units, mask });
        if g.row_degree as i128 != gl_order(ctx.q() as u64, n as u32)? {
            return Err(Error::Invariant("unit count differs from |GL_n|".into()));
        }
        Ok(g)
    }

    /// A packed graph from explicit rows, without validation. Intended for
    /// testing the checkers on deliberately broken graphs.
    pub fn from_rows(ctx: &Arc<FieldCtx>, n: usize, rows: &[Vec<bool>]) -> Result<CayleyGraph> {
        let space = MatrixSpace::new(ctx, n, u64::MAX)?;
        let order = space.len() as usize;
        if rows.len() != order || rows.iter().any(|r| r.len() != order) {
            return Err(Error::DimensionMismatch(rows.len(), order));
        }
        let words = order.div_ceil(64);
        let mut bits = vec![0u64; words * order];
        for (i, row) in rows.iter().enumerate() {
            for (j, _) in row.iter().enumerate().filter(|(_, &b)| b) {
                bits[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        Ok(CayleyGraph::from_parts(
            space,
            Adjacency::Packed { words, bits },
        ))
    }

    fn from_parts(space: MatrixSpace, adjacency: Adjacency) -> CayleyGraph {
        let row_degree = match &adjacency {
            Adjacency::Packed { words, bits } => {
                bits[..*words].iter().map(|w| w.count_ones() as u64).sum()
            }
            Adjacency::Streamed { units, .. } => (units.len() / (space.n() * space.n())) as u64,
        };
        CayleyGraph {
            space,
            adjacency,
            row_degree,
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.space.ctx()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn order(&self) -> u64 {
        self.space.len()
    }

    /// Degree of vertex 0; equal to every row's degree once validated.
    pub fn row_degree(&self) -> u64 {
        self.row_degree
    }

    pub fn is_streamed(&self) -> bool {
        matches!(self.adjacency, Adjacency::Streamed { .. })
    }

    pub fn space(&self) -> &MatrixSpace {
        &self.space
    }

    pub fn has_edge(&self, i: u64, j: u64) -> bool {
        match &self.adjacency {
            Adjacency::Packed { words, bits } => {
                bits[i as usize * words + (j / 64) as usize] >> (j % 64) & 1 == 1
            }
            Adjacency::Streamed { mask, .. } => mask[self.space.sub_index(j, i) as usize],
        }
    }

    /// Calls `f` on every neighbour of `i`, in increasing order for packed
    /// graphs and in unit order for streamed ones.
    pub fn for_each_neighbor(&self, i: u64, mut f: impl FnMut(u64)) {
        match &self.adjacency {
            Adjacency::Packed { words, bits } => {
                let row = &bits[i as usize * words..(i as usize + 1) * words];
                for (w, &word) in row.iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        f(w as u64 * 64 + word.trailing_zeros() as u64);
                        word &= word - 1;
                    }
                }
            }
            Adjacency::Streamed { units, .. } => {
                let f_ctx = self.ctx();
                let mut digits = vec![0; self.n() * self.n()];
                self.space.decode_into(i, &mut digits);
                for s in units.chunks_exact(digits.len()) {
                    let j = digits.iter().zip(s).rev().fold(0u64, |acc, (&d, &e)| {
                        acc * f_ctx.q() as u64 + f_ctx.add_raw(d, e) as u64
                    });
                    f(j);
                }
            }
        }
    }

    pub fn degree(&self, i: u64) -> u64 {
        let mut d = 0;
        self.for_each_neighbor(i, |_| d += 1);
        d
    }

    /// Zero diagonal, symmetry, and every row of degree `|GL_n(F_q)|`.
    pub fn validate(&self) -> Result<()> {
        if !verify_simplicity(self) {
            return Err(Error::Invariant(
                "adjacency has a loop or is not symmetric".into(),
            ));
        }
        let expected = gl_order(self.ctx().q() as u64, self.n() as u32)?;
        if let Some(i) = (0..self.order()).find(|&i| self.degree(i) as i128 != expected) {
            return Err(Error::Invariant(format!(
                "vertex {i} has degree {}, expected {expected}",
                self.degree(i)
            )));
        }
        Ok(())
    }

    /// Writes one `i j` line per undirected edge with `i < j`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.order() {
            let mut row = Vec::new();
            self.for_each_neighbor(i, |j| {
                if j > i {
                    row.push(j)
                }
            });
            row.sort_unstable();
            for j in row {
                writeln!(out, "{i} {j}")?;
            }
        }
        Ok(())
    }
}

/// Builds the validated packed graph with the default cap.
pub fn build_graph(ctx: &Arc<FieldCtx>, n: usize) -> Result<CayleyGraph> {
    CayleyGraph::build(ctx, n, DEFAULT_GRAPH_CAP, 1)
}

/// True iff the graph has no loops and its adjacency is symmetric.
pub fn verify_simplicity(g: &CayleyGraph) -> bool {
    if let Adjacency::Streamed { units, mask } = &g.adjacency {
        return streamed_simplicity(g, units, mask);
    }
    let order = g.order();
    (0..order).all(|i| {
        let mut ok = !g.has_edge(i, i);
        g.for_each_neighbor(i, |j| ok &= g.has_edge(j, i));
        ok
    })
}

/// The same scan for a streamed graph: for every row `i` and neighbour
/// `j = i + s`, the reverse edge exists iff `M_i - M_j` is a unit.
fn streamed_simplicity(g: &CayleyGraph, units: &[u32], mask: &[bool]) -> bool {
    let f = g.ctx();
    let q = f.q() as u64;
    let nn = g.n() * g.n();
    let mut di = vec![0; nn];
    (0..g.order()).all(|i| {
        g.space.decode_into(i, &mut di);
        !g.has_edge(i, i)
            && units.chunks_exact(nn).all(|s| {
                let back = di.iter().zip(s).rev().fold(0u64, |acc, (&d, &e)| {
                    acc * q + f.sub_raw(d, f.add_raw(d, e)) as u64
                });
                mask[back as usize]
            })
    })
}

/// Checks `A v = λ v` for the character vector `v` of `label`, in exact
/// cyclotomic arithmetic, where `λ` is the character sum over `GL_n`.
/// Returns `λ`; the first failing coordinate is reported on mismatch.
pub fn verify_eigenvector(g: &CayleyGraph, label: &MatFq, cfg: EnumConfig) -> Result<i128> {
    if label.n() != g.n() {
        return Err(Error::DimensionMismatch(label.n(), g.n()));
    }
    if !crate::gf::same_ctx(label.ctx(), g.ctx()) {
        return Err(Error::CtxMismatch);
    }
    let lambda = eig_charsum(label, cfg)?;
    let scale = i64::try_from(lambda).map_err(|_| Error::Overflow("eigenvalue"))?;
    let p = g.ctx().p();
    let exps = char_exponents(label, u64::MAX)?;
    let first_bad = partition::fold_indices(
        g.order(),
        cfg.workers,
        || Ok(None),
        |acc: &mut Result<Option<u64>>, i| {
            if !matches!(acc, Ok(None)) {
                return;
            }
            let mut hist = vec![0i64; p as usize];
            g.for_each_neighbor(i, |j| hist[exps[j as usize] as usize] += 1);
            let check = Cyclotomic::from_exponent_counts(p, &hist).and_then(|w| {
                let expected = Cyclotomic::root(p, exps[i as usize] as i64)?.scale(scale)?;
                Ok(w == expected)
            });
            *acc = match check {
                Ok(true) => Ok(None),
                Ok(false) => Ok(Some(i)),
                Err(e) => Err(e),
            };
        },
        |a, b| match (a, b) {
            (Err(e), _) | (_, Err(e)) => Err(e),
            (Ok(x), Ok(y)) => Ok(match (x, y) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            }),
        },
    )?;
    match first_bad {
        Some(coordinate) => Err(Error::EigenvectorMismatch { coordinate }),
        None => Ok(lambda),
    }
}

/// Verifies every character vector and groups the eigenvalues by the rank
/// of their labels. Distinct eigenvalues within one rank class are reported
/// as [`Error::RankVariance`].
pub fn spectrum_via_graph(g: &CayleyGraph, cfg: EnumConfig) -> Result<Spectrum> {
    let mut by_rank: BTreeMap<usize, (i128, i128)> = BTreeMap::new();
    for idx in 0..g.order() {
        let label = g.space().matrix(idx);
        let lambda = verify_eigenvector(g, &label, cfg)?;
        let rank = label.rank();
        let entry = by_rank.entry(rank).or_insert((lambda, 0));
        if entry.0 != lambda {
            return Err(Error::RankVariance {
                rank,
                first: entry.0,
                second: lambda,
            });
        }
        entry.1 += 1;
    }
    let lines = by_rank
        .into_iter()
        .map(|(rank, (eigenvalue, multiplicity))| SpectrumLine {
            rank,
            eigenvalue,
            multiplicity,
        })
        .collect();
    Spectrum::new(g.ctx().q() as u64, g.n(), lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::spectrum_n3;

    #[test]
    fn small_graphs_validate() {
        let f2 = FieldCtx::prime(2).unwrap();
        let g = build_graph(&f2, 2).unwrap();
        assert_eq!(g.order(), 16);
        assert_eq!(g.row_degree(), 6);
        assert!(verify_simplicity(&g));
        let g3 = build_graph(&FieldCtx::prime(3).unwrap(), 2).unwrap();
        assert_eq!((g3.order(), g3.row_degree()), (81, 48));
        assert!(verify_simplicity(&g3));
    }

    #[test]
    fn streamed_matches_packed() {
        let f3 = FieldCtx::prime(3).unwrap();
        let packed = build_graph(&f3, 2).unwrap();
        let streamed = CayleyGraph::streamed(&f3, 2, u64::MAX, 1).unwrap();
        assert!(streamed.is_streamed());
        for i in 0..81 {
            for j in 0..81 {
                assert_eq!(packed.has_edge(i, j), streamed.has_edge(i, j));
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        packed.write_edge_list(&mut a).unwrap();
        streamed.write_edge_list(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loop_breaks_simplicity() {
        let f2 = FieldCtx::prime(2).unwrap();
        let mut rows = vec![vec![false; 2]; 2];
        rows[1][1] = true;
        let g = CayleyGraph::from_rows(&f2, 1, &rows).unwrap();
        assert!(!verify_simplicity(&g));
        assert!(g.validate().is_err());
        let mut rows = vec![vec![false; 2]; 2];
        rows[0][1] = true;
        assert!(!verify_simplicity(
            &CayleyGraph::from_rows(&f2, 1, &rows).unwrap()
        ));
    }

    #[test]
    fn eigenvectors_q2() {
        let f2 = FieldCtx::prime(2).unwrap();
        let g = build_graph(&f2, 3).unwrap();
        let cfg = EnumConfig::default();
        assert_eq!(
            verify_eigenvector(&g, &MatFq::zero(&f2, 3), cfg).unwrap(),
            168
        );
        let a1 = MatFq::rank_representative(&f2, 3, 1).unwrap();
        assert_eq!(verify_eigenvector(&g, &a1, cfg).unwrap(), -24);
    }

    #[test]
    fn graph_spectra() {
        let f2 = FieldCtx::prime(2).unwrap();
        let cfg = EnumConfig {
            workers: 2,
            ..Default::default()
        };
        let g = build_graph(&f2, 3).unwrap();
        assert_eq!(
            spectrum_via_graph(&g, cfg).unwrap(),
            spectrum_n3(2).unwrap()
        );
        let s = spectrum_via_graph(&build_graph(&f2, 2).unwrap(), cfg).unwrap();
        assert_eq!(s.lines.len(), 3);
        assert_eq!(s.total_multiplicity().unwrap(), 16);
        assert_eq!(
            s.lines[0],
            SpectrumLine {
                rank: 0,
                eigenvalue: 6,
                multiplicity: 1
            }
        );
    }

    #[test]
    fn edge_list_q2_n1() {
        let g = build_graph(&FieldCtx::prime(2).unwrap(), 1).unwrap();
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n");
    }
}
