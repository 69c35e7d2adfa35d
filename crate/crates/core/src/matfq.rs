//! Square matrices over `F_q`: ring arithmetic, trace, rank, determinant and
//! exhaustive enumeration of `Mat_n(F_q)` and `GL_n(F_q)`.
//!
//! Enumeration order is part of the contract. Index `i` decodes to the matrix
//! whose entry at row-major position `pos = row * n + col` is the field
//! element with index `(i / q^pos) % q`; position 0 varies fastest and each
//! entry runs through the field's own enumeration order.

use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{same_ctx, FieldCtx, FieldElement};
use crate::partition;

/// Default bound on the number of matrices any enumeration may visit.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

/// Enumeration budget shared by every exhaustive operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    /// Largest number of matrices an enumeration may visit.
    pub cap: u64,
    /// Index-partitioned worker threads; results do not depend on this.
    pub workers: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            cap: DEFAULT_ENUM_CAP,
            workers: 1,
        }
    }
}

#[derive(Clone)]
pub struct MatFq {
    ctx: Arc<FieldCtx>,
    n: usize,
    entries: Vec<u32>,
}

impl PartialEq for MatFq {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries && same_ctx(&self.ctx, &other.ctx)
    }
}

impl Eq for MatFq {}

#[allow(clippy::should_implement_trait)]
impl MatFq {
    pub fn zero(ctx: &Arc<FieldCtx>, n: usize) -> MatFq {
        assert!(n >= 1, "matrix dimension must be at least 1");
        MatFq {
            ctx: Arc::clone(ctx),
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> MatFq {
        let mut m = MatFq::zero(ctx, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Diagonal matrix with `r` leading ones.
    pub fn rank_representative(ctx: &Arc<FieldCtx>, n: usize, r: usize) -> Result<MatFq> {
        if r > n {
            return Err(Error::BadRank { rank: r, n });
        }
        let mut m = MatFq::zero(ctx, n);
        for i in 0..r {
            m.entries[i * n + i] = 1;
        }
        Ok(m)
    }

    /// Matrix from row-major element indices.
    pub fn from_values(ctx: &Arc<FieldCtx>, n: usize, entries: Vec<u32>) -> Result<MatFq> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        if let Some(&bad) = entries.iter().find(|&&v| v >= ctx.q()) {
            return Err(Error::BadCoefficient {
                p: ctx.p(),
                value: bad,
            });
        }
        Ok(MatFq {
            ctx: Arc::clone(ctx),
            n,
            entries,
        })
    }

    /// Matrix from row-major field elements, all of which must live in `ctx`.
    pub fn from_elements(ctx: &Arc<FieldCtx>, n: usize, entries: &[FieldElement]) -> Result<MatFq> {
        if entries.iter().any(|e| !same_ctx(e.ctx(), ctx)) {
            return Err(Error::CtxMismatch);
        }
        MatFq::from_values(ctx, n, entries.iter().map(FieldElement::value).collect())
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major element indices.
    pub fn values(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> FieldElement {
        self.ctx
            .element(self.entries[row * self.n + col])
            .expect("entries are valid field indices")
    }

    fn check(&self, other: &MatFq) -> Result<()> {
        if !same_ctx(&self.ctx, &other.ctx) {
            return Err(Error::CtxMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    fn zip_with(&self, other: &MatFq, f: impl Fn(u32, u32) -> u32) -> Result<MatFq> {
        self.check(other)?;
        Ok(MatFq {
            ctx: Arc::clone(&self.ctx),
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &MatFq) -> Result<MatFq> {
        self.zip_with(other, |a, b| self.ctx.add_raw(a, b))
    }

    pub fn sub(&self, other: &MatFq) -> Result<MatFq> {
        self.zip_with(other, |a, b| self.ctx.sub_raw(a, b))
    }

    pub fn neg(&self) -> MatFq {
        MatFq {
            ctx: Arc::clone(&self.ctx),
            n: self.n,
            entries: self.entries.iter().map(|&a| self.ctx.neg_raw(a)).collect(),
        }
    }

    pub fn mul(&self, other: &MatFq) -> Result<MatFq> {
        self.check(other)?;
        let n = self.n;
        let f = &self.ctx;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = f.add_raw(
                        acc,
                        f.mul_raw(self.entries[i * n + k], other.entries[k * n + j]),
                    );
                }
                entries[i * n + j] = acc;
            }
        }
        Ok(MatFq {
            ctx: Arc::clone(f),
            n,
            entries,
        })
    }

    pub fn trace(&self) -> FieldElement {
        let n = self.n;
        let t = (0..n).fold(0, |acc, i| self.ctx.add_raw(acc, self.entries[i * n + i]));
        self.ctx.element(t).expect("valid index")
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &MatFq) -> Result<FieldElement> {
        self.check(other)?;
        let t = trace_product_raw(&self.ctx, self.n, &self.entries, &other.entries);
        Ok(self.ctx.element(t).expect("valid index"))
    }

    pub fn rank(&self) -> usize {
        rank_raw(&self.ctx, self.n, &self.entries)
    }

    pub fn det(&self) -> FieldElement {
        let d = det_raw(&self.ctx, self.n, &self.entries);
        self.ctx.element(d).expect("valid index")
    }

    pub fn is_invertible(&self) -> bool {
        det_raw(&self.ctx, self.n, &self.entries) != 0
    }
}

/// `tr(A B)` on row-major index slices.
pub fn trace_product_raw(f: &FieldCtx, n: usize, a: &[u32], b: &[u32]) -> u32 {
    let mut acc = 0;
    for i in 0..n {
        for k in 0..n {
            acc = f.add_raw(acc, f.mul_raw(a[i * n + k], b[k * n + i]));
        }
    }
    acc
}

/// Reduces `m` in place to row-echelon form, pivoting on the first nonzero
/// entry of each column. Returns the rank and the determinant of the input
/// (meaningful only when the rank is `n`).
fn eliminate(f: &FieldCtx, n: usize, m: &mut [u32]) -> (usize, u32) {
    let mut rank = 0;
    let mut det = 1;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| m[r * n + col] != 0) else {
            det = 0;
            continue;
        };
        if pivot != rank {
            for c in 0..n {
                m.swap(pivot * n + c, rank * n + c);
            }
            det = f.neg_raw(det);
        }
        let pv = m[rank * n + col];
        det = f.mul_raw(det, pv);
        let inv = f.inv_raw(pv).expect("pivot is nonzero");
        for r in rank + 1..n {
            let factor = f.mul_raw(m[r * n + col], inv);
            if factor == 0 {
                continue;
            }
            for c in col..n {
                let sub = f.mul_raw(factor, m[rank * n + c]);
                m[r * n + c] = f.sub_raw(m[r * n + c], sub);
            }
        }
        rank += 1;
    }
    (rank, if rank == n { det } else { 0 })
}

pub fn rank_raw(f: &FieldCtx, n: usize, entries: &[u32]) -> usize {
    let mut m = entries.to_vec();
    eliminate(f, n, &mut m).0
}

pub fn det_raw(f: &FieldCtx, n: usize, entries: &[u32]) -> u32 {
    let mut m = entries.to_vec();
    eliminate(f, n, &mut m).1
}

/// `|GL_n(F_q)| = prod_{k=0}^{n-1} (q^n - q^k)`.
pub fn gl_order(q: u64, n: u32) -> Result<i128> {
    if q < 2 {
        return Err(Error::BadOrder(q));
    }
    let q = q as i128;
    let qn = q.checked_pow(n).ok_or(Error::Overflow("gl_order"))?;
    (0..n).try_fold(1i128, |acc, k| {
        let term = qn - q.checked_pow(k).ok_or(Error::Overflow("gl_order"))?;
        acc.checked_mul(term).ok_or(Error::Overflow("gl_order"))
    })
}

/// The matrices of `Mat_n(F_q)` addressed by their enumeration index.
#[derive(Clone, Debug)]
pub struct MatrixSpace {
    ctx: Arc<FieldCtx>,
    n: usize,
    size: u64,
}

impl MatrixSpace {
    /// Fails with [`Error::SizeTooLarge`] when `q^(n^2)` exceeds `cap`.
    pub fn new(ctx: &Arc<FieldCtx>, n: usize, cap: u64) -> Result<MatrixSpace> {
        if n == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        let size = (ctx.q() as u128).checked_pow((n * n) as u32);
        match size {
            Some(s) if s <= cap as u128 => Ok(MatrixSpace {
                ctx: Arc::clone(ctx),
                n,
                size: s as u64,
            }),
            _ => Err(Error::SizeTooLarge {
                what: format!("Mat_{n}(F_{})", ctx.q()),
                size: size.unwrap_or(u128::MAX),
                cap,
            }),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn decode_into(&self, mut index: u64, out: &mut [u32]) {
        let q = self.ctx.q() as u64;
        for slot in out.iter_mut().take(self.n * self.n) {
            *slot = (index % q) as u32;
            index /= q;
        }
    }

    pub fn matrix(&self, index: u64) -> MatFq {
        assert!(index < self.size, "index {index} out of range");
        let mut entries = vec![0; self.n * self.n];
        self.decode_into(index, &mut entries);
        MatFq {
            ctx: Arc::clone(&self.ctx),
            n: self.n,
            entries,
        }
    }

    pub fn index_of_values(&self, entries: &[u32]) -> u64 {
        let q = self.ctx.q() as u64;
        entries.iter().rev().fold(0, |acc, &v| acc * q + v as u64)
    }

    pub fn index_of(&self, m: &MatFq) -> Result<u64> {
        if !same_ctx(&self.ctx, &m.ctx) {
            return Err(Error::CtxMismatch);
        }
        if m.n != self.n {
            return Err(Error::DimensionMismatch(m.n, self.n));
        }
        Ok(self.index_of_values(&m.entries))
    }

    /// Index of `M_a - M_b`, computed digit by digit.
    pub fn sub_index(&self, a: u64, b: u64) -> u64 {
        let q = self.ctx.q() as u64;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n * self.n {
            let d = self.ctx.sub_raw((a % q) as u32, (b % q) as u32) as u64;
            out += d * place;
            place *= q;
            a /= q;
            b /= q;
        }
        out
    }

    /// Every matrix, in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = MatFq> + '_ {
        (0..self.size).map(move |i| self.matrix(i))
    }

    /// The invertible matrices, in enumeration order.
    pub fn units(&self) -> impl Iterator<Item = MatFq> + '_ {
        self.iter().filter(MatFq::is_invertible)
    }

    /// One flag per enumeration index: whether that matrix is invertible.
    pub fn unit_mask(&self, workers: usize) -> Vec<bool> {
        let n = self.n;
        let units = partition::fold_indices(
            self.size,
            workers,
            Vec::new,
            |acc: &mut Vec<u64>, i| {
                let mut entries = vec![0; n * n];
                self.decode_into(i, &mut entries);
                if det_raw(&self.ctx, n, &entries) != 0 {
                    acc.push(i);
                }
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        let mut mask = vec![false; self.size as usize];
        for i in units {
            mask[i as usize] = true;
        }
        mask
    }

    /// Number of matrices of each rank `0..=n`.
    pub fn rank_census(&self, workers: usize) -> Vec<u64> {
        let n = self.n;
        partition::fold_indices(
            self.size,
            workers,
            || vec![0u64; n + 1],
            |acc, i| {
                let mut entries = vec![0; n * n];
                self.decode_into(i, &mut entries);
                acc[rank_raw(&self.ctx, n, &entries)] += 1;
            },
            partition::merge_counts,
        )
    }
}

/// All of `Mat_n(F_q)` in enumeration order.
pub fn mat_enumerate(
    ctx: &Arc<FieldCtx>,
    n: usize,
    cap: u64,
) -> Result<impl Iterator<Item = MatFq>> {
    let space = MatrixSpace::new(ctx, n, cap)?;
    Ok((0..space.len()).map(move |i| space.matrix(i)))
}

/// `GL_n(F_q)` as the invertible subsequence of [`mat_enumerate`].
pub fn gl_enumerate(
    ctx: &Arc<FieldCtx>,
    n: usize,
    cap: u64,
) -> Result<impl Iterator<Item = MatFq>> {
    Ok(mat_enumerate(ctx, n, cap)?.filter(MatFq::is_invertible))
}

impl fmt::Debug for MatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for MatFq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Vec<u32>>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).coeffs()).collect())
            .collect();
        let mut st = s.serialize_struct("MatFq", 3)?;
        st.serialize_field("q", &self.ctx.q())?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}
