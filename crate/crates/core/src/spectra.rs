//! Eigenvalues and multiplicities of the unit-graph on `Mat_n(F_q)`.
//!
//! Every character `χ_A` of `(Mat_n(F_q), +)` is an eigenvector with
//! eigenvalue `λ_A = Σ_{B ∈ GL_n} χ_A(B)`, and `λ_A` depends only on
//! `rank(A)`. So the spectrum has one line per rank `r`, with eigenvalue
//! `λ_{A_r}` for the diagonal representative `A_r` and multiplicity equal to
//! the number of rank-`r` matrices.
//!
//! Two independent routes are provided:
//!
//! * closed forms in `q` for `n = 3` (and the trivial `n = 1`), with
//!   multiplicities from Landsberg's rank-count formula;
//! * exhaustive character sums over `GL_n(F_q)`, accumulated as a histogram of
//!   trace exponents in `0..p` and contracted against `ζ_p` once.

use std::sync::Arc;

use serde::Serialize;

use crate::chars::Cyclotomic;
use crate::error::{Error, Result};
use crate::gf::{same_ctx, FieldCtx, FieldElement};
use crate::matfq::{det_raw, gl_order, trace_product_raw, EnumConfig, MatFq, MatrixSpace};
use crate::partition;

fn overflow() -> Error {
    Error::Overflow("closed-form evaluation")
}

fn ipow(q: i128, e: u32) -> Result<i128> {
    q.checked_pow(e).ok_or_else(overflow)
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn product(terms: &[i128]) -> Result<i128> {
    terms.iter().try_fold(1, |acc, &t| mul(acc, t))
}

fn check_q(q: u64) -> Result<i128> {
    if q < 2 {
        return Err(Error::BadOrder(q));
    }
    Ok(q as i128)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumLine {
    pub rank: usize,
    pub eigenvalue: i128,
    pub multiplicity: i128,
}

/// One line per rank `0..=n`. Constructed through [`Spectrum::new`], which
/// checks that multiplicities count every vertex and that the eigenvalues
/// weighted by multiplicity sum to the (zero) trace of the adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Spectrum {
    pub q: u64,
    pub n: usize,
    pub lines: Vec<SpectrumLine>,
}

impl Spectrum {
    pub fn new(q: u64, n: usize, lines: Vec<SpectrumLine>) -> Result<Spectrum> {
        let s = Spectrum { q, n, lines };
        s.validate()?;
        Ok(s)
    }

    /// Skips validation; for checking externally supplied or altered data.
    pub fn unchecked(q: u64, n: usize, lines: Vec<SpectrumLine>) -> Spectrum {
        Spectrum { q, n, lines }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invariant(msg));
        if self.lines.len() != self.n + 1 {
            return bad(format!("{} lines for n = {}", self.lines.len(), self.n));
        }
        for (i, line) in self.lines.iter().enumerate() {
            if line.rank != i {
                return bad(format!("line {i} carries rank {}", line.rank));
            }
            if line.multiplicity < 1 {
                return bad(format!("rank {i} has multiplicity {}", line.multiplicity));
            }
        }
        let order = ipow(self.q as i128, (self.n * self.n) as u32)?;
        let total = self.total_multiplicity()?;
        if total != order {
            return bad(format!("multiplicities sum to {total}, expected {order}"));
        }
        if !trace_identity_check(self) {
            return bad("weighted eigenvalue sum is not zero".into());
        }
        Ok(())
    }

    pub fn total_multiplicity(&self) -> Result<i128> {
        self.lines.iter().try_fold(0i128, |acc, l| {
            acc.checked_add(l.multiplicity).ok_or_else(overflow)
        })
    }

    /// `Σ m_r λ_r`.
    pub fn weighted_sum(&self) -> Result<i128> {
        self.lines.iter().try_fold(0i128, |acc, l| {
            acc.checked_add(mul(l.multiplicity, l.eigenvalue)?)
                .ok_or_else(overflow)
        })
    }

    pub fn eigenvalues(&self) -> Vec<i128> {
        self.lines.iter().map(|l| l.eigenvalue).collect()
    }

    pub fn multiplicities(&self) -> Vec<i128> {
        self.lines.iter().map(|l| l.multiplicity).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,eigenvalue,multiplicity\n");
        for l in &self.lines {
            out.push_str(&format!("{},{},{}\n", l.rank, l.eigenvalue, l.multiplicity));
        }
        out
    }
}

/// `Σ m_i λ_i == 0`, the trace of a loopless adjacency matrix.
pub fn trace_identity_check(s: &Spectrum) -> bool {
    matches!(s.weighted_sum(), Ok(0))
}

/// Closed-form eigenvalue `λ_{A_r}` of the unit-graph on `Mat_3(F_q)`.
pub fn eig_closed_n3(q: u64, r: usize) -> Result<i128> {
    let q = check_q(q)?;
    let q2 = ipow(q, 2)?;
    let q3 = ipow(q, 3)?;
    match r {
        0 => gl_order(q as u64, 3),
        // N(0) - N(1) = (q^2 - 1 - q^2)(q^3 - q)(q^3 - q^2)
        1 => product(&[-1, q3 - q, q3 - q2]),
        2 => mul(q3, q - 1),
        3 => Ok(-q3),
        _ => Err(Error::BadRank { rank: r, n: 3 }),
    }
}

/// Eigenvalues for `n = 1`, where the graph is the complete graph `K_q`.
pub fn eig_closed_n1(q: u64, r: usize) -> Result<i128> {
    let q = check_q(q)?;
    match r {
        0 => Ok(q - 1),
        1 => Ok(-1),
        _ => Err(Error::BadRank { rank: r, n: 1 }),
    }
}

/// Landsberg's count of rank-`r` matrices in `Mat_n(F_q)`:
/// `q^{r(r-1)/2} Π_{k<r} (q^{n-k} - 1)^2 / (q^{k+1} - 1)`, with every
/// partial product divided exactly.
pub fn mult_landsberg(q: u64, n: usize, r: usize) -> Result<i128> {
    let q = check_q(q)?;
    if r > n {
        return Err(Error::BadRank { rank: r, n });
    }
    let mut m = ipow(q, (r * r.saturating_sub(1) / 2) as u32)?;
    for k in 0..r {
        let a = ipow(q, (n - k) as u32)? - 1;
        let den = ipow(q, (k + 1) as u32)? - 1;
        let num = mul(m, mul(a, a)?)?;
        if num % den != 0 {
            return Err(Error::InexactDivision { num, den });
        }
        m = num / den;
    }
    Ok(m)
}

/// The closed-form spectrum of the unit-graph on `Mat_3(F_q)`.
pub fn spectrum_n3(q: u64) -> Result<Spectrum> {
    let lines = (0..=3)
        .map(|r| {
            Ok(SpectrumLine {
                rank: r,
                eigenvalue: eig_closed_n3(q, r)?,
                multiplicity: mult_landsberg(q, 3, r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in lines.iter().enumerate() {
        if lines[..i].iter().any(|b| b.eigenvalue == a.eigenvalue) {
            return Err(Error::Invariant(format!(
                "eigenvalue {} repeats at q = {q}",
                a.eigenvalue
            )));
        }
    }
    Spectrum::new(q, 3, lines)
}

/// Closed-form spectrum where one exists (`n` = 1 or 3).
pub fn spectrum_closed(q: u64, n: usize) -> Result<Spectrum> {
    match n {
        3 => spectrum_n3(q),
        1 => {
            let lines = (0..=1)
                .map(|r| {
                    Ok(SpectrumLine {
                        rank: r,
                        eigenvalue: eig_closed_n1(q, r)?,
                        multiplicity: mult_landsberg(q, 1, r)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Spectrum::new(q, 1, lines)
        }
        _ => Err(Error::UnsupportedDimension {
            expected: 3,
            got: n,
        }),
    }
}

/// `λ_{A_3}` recovered from the trace identity
/// `m_0 λ_0 + m_1 λ_1 + m_2 λ_2 + m_3 λ_3 = 0`.
pub fn eig_solve_r3_from_trace(q: u64) -> Result<i128> {
    let partial = (0..3).try_fold(0i128, |acc, r| {
        let term = mul(mult_landsberg(q, 3, r)?, eig_closed_n3(q, r)?)?;
        acc.checked_add(term).ok_or_else(overflow)
    })?;
    let m3 = mult_landsberg(q, 3, 3)?;
    if partial % m3 != 0 {
        return Err(Error::InexactDivision {
            num: -partial,
            den: m3,
        });
    }
    Ok(-partial / m3)
}

/// Trace-exponent histograms `h_A[t] = #{B ∈ GL_n : Tr(tr(A B)) = t}` for
/// several labels in one pass over `Mat_n(F_q)`.
pub fn charsum_histograms(labels: &[MatFq], cfg: EnumConfig) -> Result<Vec<Vec<u64>>> {
    let Some(first) = labels.first() else {
        return Ok(Vec::new());
    };
    let ctx = Arc::clone(first.ctx());
    let n = first.n();
    for l in labels {
        if l.n() != n {
            return Err(Error::DimensionMismatch(l.n(), n));
        }
        if !same_ctx(l.ctx(), &ctx) {
            return Err(Error::CtxMismatch);
        }
    }
    let space = MatrixSpace::new(&ctx, n, cfg.cap)?;
    let p = ctx.p() as usize;
    let flat = partition::fold_indices(
        space.len(),
        cfg.workers,
        || vec![0u64; labels.len() * p],
        |acc, i| {
            let mut b = vec![0; n * n];
            space.decode_into(i, &mut b);
            if det_raw(&ctx, n, &b) == 0 {
                return;
            }
            for (slot, label) in labels.iter().enumerate() {
                let t = ctx.trace_raw(trace_product_raw(&ctx, n, label.values(), &b));
                acc[slot * p + t as usize] += 1;
            }
        },
        partition::merge_counts,
    );
    Ok(flat.chunks(p).map(<[u64]>::to_vec).collect())
}

/// Contracts a trace-exponent histogram against powers of `ζ_p`; fails with
/// [`Error::NotRational`] if the sum does not collapse to an integer.
pub fn contract_histogram(p: u32, hist: &[u64]) -> Result<i128> {
    let counts: Vec<i64> = hist
        .iter()
        .map(|&c| i64::try_from(c).map_err(|_| overflow()))
        .collect::<Result<_>>()?;
    Ok(Cyclotomic::from_exponent_counts(p, &counts)?.to_integer()? as i128)
}

/// `λ_A = Σ_{B ∈ GL_n(F_q)} χ_A(B)` by exhaustive enumeration.
pub fn eig_charsum(label: &MatFq, cfg: EnumConfig) -> Result<i128> {
    let hist = charsum_histograms(std::slice::from_ref(label), cfg)?;
    contract_histogram(label.ctx().p(), &hist[0])
}

/// Brute-force spectrum for any `n`: character sums at the rank
/// representatives, multiplicities from Landsberg's formula.
pub fn spectrum_charsum(ctx: &Arc<FieldCtx>, n: usize, cfg: EnumConfig) -> Result<Spectrum> {
    let reps = (0..=n)
        .map(|r| MatFq::rank_representative(ctx, n, r))
        .collect::<Result<Vec<_>>>()?;
    let hists = charsum_histograms(&reps, cfg)?;
    let q = ctx.q() as u64;
    let lines = hists
        .iter()
        .enumerate()
        .map(|(r, h)| {
            Ok(SpectrumLine {
                rank: r,
                eigenvalue: contract_histogram(ctx.p(), h)?,
                multiplicity: mult_landsberg(q, n, r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(q, n, lines)
}

/// Diagonal-entry counts over `GL_3(F_q)`:
/// `N(α) = #{B : b11 = α}` and `N(α, β) = #{B : b11 = α, b22 = β}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalCounts {
    ctx: Arc<FieldCtx>,
    n1: Vec<u64>,
    n2: Vec<u64>,
}

impl DiagonalCounts {
    pub fn compute(ctx: &Arc<FieldCtx>, cfg: EnumConfig) -> Result<DiagonalCounts> {
        let space = MatrixSpace::new(ctx, 3, cfg.cap)?;
        let q = ctx.q() as usize;
        let flat = partition::fold_indices(
            space.len(),
            cfg.workers,
            || vec![0u64; q + q * q],
            |acc, i| {
                let mut b = [0u32; 9];
                space.decode_into(i, &mut b);
                if det_raw(ctx, 3, &b) != 0 {
                    let (b11, b22) = (b[0] as usize, b[4] as usize);
                    acc[b11] += 1;
                    acc[q + b11 * q + b22] += 1;
                }
            },
            partition::merge_counts,
        );
        Ok(DiagonalCounts {
            ctx: Arc::clone(ctx),
            n1: flat[..q].to_vec(),
            n2: flat[q..].to_vec(),
        })
    }

    fn index(&self, e: &FieldElement) -> Result<usize> {
        if !same_ctx(e.ctx(), &self.ctx) {
            return Err(Error::CtxMismatch);
        }
        Ok(e.value() as usize)
    }

    pub fn n1(&self, alpha: &FieldElement) -> Result<u64> {
        Ok(self.n1[self.index(alpha)?])
    }

    pub fn n2(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<u64> {
        let q = self.ctx.q() as usize;
        Ok(self.n2[self.index(alpha)? * q + self.index(beta)?])
    }

    /// `N(α)` indexed by field-element index.
    pub fn n1_table(&self) -> &[u64] {
        &self.n1
    }

    /// `N(α, β)` at `[α * q + β]`, indexed by field-element indices.
    pub fn n2_table(&self) -> &[u64] {
        &self.n2
    }

    pub fn total(&self) -> u64 {
        self.n1.iter().sum()
    }

    /// `Σ_{α+β=0} N(α, β)`.
    pub fn antidiagonal_sum(&self) -> u64 {
        let f = &self.ctx;
        (0..f.q())
            .map(|a| self.n2[(a * f.q() + f.neg_raw(a)) as usize])
            .sum()
    }

    /// `Σ_{α ∉ {0, 1}} N(α, 1 - α)`.
    pub fn shifted_sum_excluding_axes(&self) -> u64 {
        let f = &self.ctx;
        (2..f.q())
            .map(|a| self.n2[(a * f.q() + f.sub_raw(1, a)) as usize])
            .sum()
    }

    /// `λ_{A_1} = N(0) - N(1)`.
    pub fn lambda1(&self) -> i128 {
        self.n1[0] as i128 - self.n1[1] as i128
    }

    /// `λ_{A_2} = Σ_{α+β=0} N(α,β) - 2 N(0,1) - Σ_{α ∉ {0,1}} N(α, 1-α)`.
    pub fn lambda2(&self) -> i128 {
        let n01 = self.n2[1] as i128;
        self.antidiagonal_sum() as i128 - 2 * n01 - self.shifted_sum_excluding_axes() as i128
    }
}

/// `N(α)` over `GL_3(F_q)` by exhaustive count.
pub fn count_n1(alpha: &FieldElement, cfg: EnumConfig) -> Result<u64> {
    DiagonalCounts::compute(alpha.ctx(), cfg)?.n1(alpha)
}

/// `N(α, β)` over `GL_3(F_q)` by exhaustive count.
pub fn count_n2(alpha: &FieldElement, beta: &FieldElement, cfg: EnumConfig) -> Result<u64> {
    if !same_ctx(alpha.ctx(), beta.ctx()) {
        return Err(Error::CtxMismatch);
    }
    DiagonalCounts::compute(alpha.ctx(), cfg)?.n2(alpha, beta)
}

/// Column-count closed form: `N(0) = (q²-1)(q³-q)(q³-q²)`,
/// `N(α) = q²(q³-q)(q³-q²)` for `α ≠ 0`.
pub fn n1_closed(q: u64, alpha_is_zero: bool) -> Result<i128> {
    let q = check_q(q)?;
    let (q2, q3) = (ipow(q, 2)?, ipow(q, 3)?);
    let first = if alpha_is_zero { q2 - 1 } else { q2 };
    product(&[first, q3 - q, q3 - q2])
}

/// Closed form of `N(α, β)`, which depends only on which of `α`, `β` vanish.
pub fn n2_closed(q: u64, alpha_is_zero: bool, beta_is_zero: bool) -> Result<i128> {
    let q = check_q(q)?;
    let (q2, q3) = (ipow(q, 2)?, ipow(q, 3)?);
    let third = q3 - q2;
    let (a, b) = match (alpha_is_zero, beta_is_zero) {
        // first column (0, γ≠0, *) with second column (0, 0, ≠0), or
        // first row (0, γ≠0, *)
        (true, true) => (
            product(&[q - 1, q, q - 1, third])?,
            product(&[q2 - 1, q, q - 1, third])?,
        ),
        (true, false) | (false, true) => (
            product(&[q - 1, q2, third])?,
            product(&[q, q - 1, q2 - 1, third])?,
        ),
        (false, false) => (
            product(&[q, q2, third])?,
            product(&[q, q - 1, q2 - 1, third])?,
        ),
    };
    Ok(a + b)
}

/// `Σ_{α+β=0} N(α, β) = q³ (q-1)² (q³ + q² - 1)`.
pub fn antidiagonal_sum_closed(q: u64) -> Result<i128> {
    let q = check_q(q)?;
    let (q2, q3) = (ipow(q, 2)?, ipow(q, 3)?);
    product(&[q3, q - 1, q - 1, q3 + q2 - 1])
}

/// `Σ_{ω≠0} χ(ω) Σ_{α+β=ω} N(α, β) = -q⁴ (q-1)(q³ - q - 1)`.
pub fn off_antidiagonal_closed(q: u64) -> Result<i128> {
    let q = check_q(q)?;
    let q3 = ipow(q, 3)?;
    product(&[-ipow(q, 4)?, q - 1, q3 - q - 1])
}
