//! Edge existence between large vertex sets of the unit-graph on `Mat_3(F_q)`.
//!
//! For a `k`-regular Cayley graph on `H` whose largest nontrivial eigenvalue
//! magnitude is `μ`, any `X, Y ⊆ H` with `√(|X||Y|) > n_* = |H| μ / k` span an
//! edge. For `Mat_3(F_q)` this gives `n_* = q⁹ / (q³ - 1)`, which lies below
//! the integer bound `q⁶ + q³ + 2`. The size test here uses the integer bound.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{same_ctx, FieldCtx};
use crate::matfq::{det_raw, gl_order, MatFq, MatrixSpace};
use crate::spectra::eig_closed_n3;

fn overflow() -> Error {
    Error::Overflow("gap threshold")
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// `n_*` as a reduced fraction together with the integer bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GapThreshold {
    pub q: u64,
    pub n_star_num: i128,
    pub n_star_den: i128,
    pub integer_bound: i128,
}

impl GapThreshold {
    /// Whether `√(|X||Y|) > q⁶ + q³ + 2`.
    pub fn guarantees(&self, x: usize, y: usize) -> bool {
        (x as i128) * (y as i128) > self.integer_bound * self.integer_bound
    }

    /// Whether `√(|X||Y|) > n_*`, the sharper rational condition.
    pub fn exceeds_rational(&self, x: usize, y: usize) -> bool {
        let lhs = (x as i128) * (y as i128) * self.n_star_den * self.n_star_den;
        lhs > self.n_star_num * self.n_star_num
    }
}

/// `max_{A ≠ 0} |λ_A|`, which for `n = 3` must be `|λ_{A_1}|`.
pub fn max_nontrivial_charsum(q: u64) -> Result<i128> {
    let mags = (1..=3)
        .map(|r| eig_closed_n3(q, r).map(i128::abs))
        .collect::<Result<Vec<_>>>()?;
    let max = mags.iter().copied().max().unwrap_or(0);
    if max != mags[0] {
        return Err(Error::Invariant(format!(
            "rank-one eigenvalue does not dominate at q = {q}"
        )));
    }
    Ok(max)
}

/// `n_* = q⁹ μ / |GL_3(F_q)|` in lowest terms, checked to equal
/// `q⁹ / (q³ - 1)` and to lie strictly below `q⁶ + q³ + 2`.
pub fn gap_threshold(q: u64) -> Result<GapThreshold> {
    let mu = max_nontrivial_charsum(q)?;
    let qi = q as i128;
    let order = qi.checked_pow(9).ok_or_else(overflow)?;
    let num = order.checked_mul(mu).ok_or_else(overflow)?;
    let den = gl_order(q, 3)?;
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    let q3 = qi.pow(3);
    if (num, den) != (order, q3 - 1) {
        return Err(Error::Invariant(format!(
            "threshold {num}/{den} differs from q^9/(q^3-1) at q = {q}"
        )));
    }
    let integer_bound = qi.pow(6) + q3 + 2;
    let rhs = den.checked_mul(integer_bound).ok_or_else(overflow)?;
    if num >= rhs {
        return Err(Error::Invariant(format!(
            "threshold {num}/{den} is not below {integer_bound}"
        )));
    }
    Ok(GapThreshold {
        q,
        n_star_num: num,
        n_star_den: den,
        integer_bound,
    })
}

/// A pair `A = X[x_pos]`, `B = Y[y_pos]` with `B - A` invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x_pos: usize,
    pub y_pos: usize,
    pub a: MatFq,
    pub b: MatFq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub q: u64,
    pub n_star_num: i128,
    pub n_star_den: i128,
    pub integer_bound: i128,
    pub set_sizes: (usize, usize),
    /// Whether the sizes alone force an edge under the integer bound.
    pub guaranteed: bool,
    /// Whether the sizes exceed the rational threshold `n_*`.
    pub exceeds_rational_threshold: bool,
    /// Set when one set was checked against itself for two distinct members.
    pub single_set: bool,
    pub seed: Option<u64>,
    pub witness: Option<Witness>,
}

fn check_family(sets: &[&[MatFq]]) -> Result<Option<(Arc<FieldCtx>, usize)>> {
    let mut shape: Option<(Arc<FieldCtx>, usize)> = None;
    for m in sets.iter().flat_map(|s| s.iter()) {
        match &shape {
            None => shape = Some((Arc::clone(m.ctx()), m.n())),
            Some((ctx, n)) => {
                if !same_ctx(ctx, m.ctx()) {
                    return Err(Error::CtxMismatch);
                }
                if *n != m.n() {
                    return Err(Error::DimensionMismatch(m.n(), *n));
                }
            }
        }
    }
    Ok(shape)
}

fn invertible_difference(a: &MatFq, b: &MatFq) -> bool {
    let f = a.ctx();
    let diff: Vec<u32> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| f.sub_raw(y, x))
        .collect();
    det_raw(f, a.n(), &diff) != 0
}

/// The first pair in input order (`X` outer, `Y` inner) with `B - A`
/// invertible.
pub fn find_invertible_difference(x: &[MatFq], y: &[MatFq]) -> Result<Option<Witness>> {
    check_family(&[x, y])?;
    for (i, a) in x.iter().enumerate() {
        if let Some(j) = y.iter().position(|b| invertible_difference(a, b)) {
            return Ok(Some(Witness {
                x_pos: i,
                y_pos: j,
                a: a.clone(),
                b: y[j].clone(),
            }));
        }
    }
    Ok(None)
}

/// Removes repeated matrices, keeping first occurrences in order.
pub fn dedup(set: &[MatFq]) -> Vec<MatFq> {
    let mut seen = HashSet::new();
    set.iter()
        .filter(|m| seen.insert(m.values().to_vec()))
        .cloned()
        .collect()
}

fn require_n3(sets: &[&[MatFq]]) -> Result<u64> {
    match check_family(sets)? {
        Some((ctx, 3)) => Ok(ctx.q() as u64),
        Some((_, n)) => Err(Error::UnsupportedDimension {
            expected: 3,
            got: n,
        }),
        None => Err(Error::Invariant(
            "gap check needs at least one matrix".into(),
        )),
    }
}

/// Size test plus witness search for two subsets of `Mat_3(F_q)`. Repeated
/// entries are dropped first, so sizes are set sizes. A guaranteed pair
/// without a witness is reported as [`Error::TheoremViolation`].
pub fn gap_check(x: &[MatFq], y: &[MatFq]) -> Result<GapReport> {
    let q = require_n3(&[x, y])?;
    let (x, y) = (dedup(x), dedup(y));
    let t = gap_threshold(q)?;
    let witness = find_invertible_difference(&x, &y)?;
    report(t, x.len(), y.len(), false, witness)
}

/// The single-set form: whether `X` holds two distinct matrices whose
/// difference is invertible, guaranteed once `|X| > q⁶ + q³ + 2`.
pub fn gap_check_single(x: &[MatFq]) -> Result<GapReport> {
    let q = require_n3(&[x])?;
    let x = dedup(x);
    let t = gap_threshold(q)?;
    let mut witness = None;
    'outer: for (i, a) in x.iter().enumerate() {
        for (j, b) in x.iter().enumerate().skip(i + 1) {
            if invertible_difference(a, b) {
                witness = Some(Witness {
                    x_pos: i,
                    y_pos: j,
                    a: a.clone(),
                    b: b.clone(),
                });
                break 'outer;
            }
        }
    }
    let len = x.len();
    let guaranteed = len as i128 > t.integer_bound;
    let mut r = report(t, len, len, true, witness)?;
    r.guaranteed = guaranteed;
    if guaranteed && r.witness.is_none() {
        return Err(Error::TheoremViolation { x: len, y: len });
    }
    Ok(r)
}

fn report(
    t: GapThreshold,
    xs: usize,
    ys: usize,
    single_set: bool,
    witness: Option<Witness>,
) -> Result<GapReport> {
    let guaranteed = t.guarantees(xs, ys);
    if guaranteed && witness.is_none() {
        return Err(Error::TheoremViolation { x: xs, y: ys });
    }
    Ok(GapReport {
        q: t.q,
        n_star_num: t.n_star_num,
        n_star_den: t.n_star_den,
        integer_bound: t.integer_bound,
        set_sizes: (xs, ys),
        guaranteed,
        exceeds_rational_threshold: t.exceeds_rational(xs, ys),
        single_set,
        seed: None,
        witness,
    })
}

/// Matrices at the given enumeration indices.
pub fn subset_from_indices(space: &MatrixSpace, indices: &[u64]) -> Result<Vec<MatFq>> {
    indices
        .iter()
        .map(|&i| {
            if i >= space.len() {
                Err(Error::Parse(format!(
                    "index {i} out of range for {} matrices",
                    space.len()
                )))
            } else {
                Ok(space.matrix(i))
            }
        })
        .collect()
}

/// Two independent uniformly random `size`-subsets of the space, drawn as
/// distinct enumeration indices from a ChaCha8 stream seeded with `seed`
/// (first `X`, then `Y`).
pub fn random_pair(
    space: &MatrixSpace,
    size: usize,
    seed: u64,
) -> Result<(Vec<MatFq>, Vec<MatFq>)> {
    let len = usize::try_from(space.len()).map_err(|_| overflow())?;
    if size > len {
        return Err(Error::SizeTooLarge {
            what: "random subset".into(),
            size: size as u128,
            cap: space.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        index::sample(&mut rng, len, size)
            .into_iter()
            .map(|i| space.matrix(i as u64))
            .collect::<Vec<_>>()
    };
    let x = draw();
    let y = draw();
    Ok((x, y))
}

/// `trials` random-pair gap checks; trial `t` uses seed `seed + t`.
/// Stops at the first error, which includes any theorem violation.
pub fn soundness_sweep(
    ctx: &Arc<FieldCtx>,
    size: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<GapReport>> {
    let space = MatrixSpace::new(ctx, 3, u64::MAX)?;
    (0..trials)
        .map(|t| {
            let s = seed.wrapping_add(t);
            let (x, y) = random_pair(&space, size, s)?;
            let mut r = gap_check(&x, &y)?;
            r.seed = Some(s);
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let t2 = gap_threshold(2).unwrap();
        assert_eq!(
            (t2.n_star_num, t2.n_star_den, t2.integer_bound),
            (512, 7, 74)
        );
        let t3 = gap_threshold(3).unwrap();
        assert_eq!(
            (t3.n_star_num, t3.n_star_den, t3.integer_bound),
            (19683, 26, 758)
        );
        for q in 2..=97u64 {
            let t = gap_threshold(q).unwrap();
            assert_eq!(t.n_star_den, (q as i128).pow(3) - 1);
            assert!(t.n_star_num < t.n_star_den * t.integer_bound);
            let qi = q as i128;
            assert_eq!(
                max_nontrivial_charsum(q).unwrap(),
                qi.pow(6) - qi.pow(5) - qi.pow(4) + qi.pow(3)
            );
        }
    }

    #[test]
    fn max_charsum_examples() {
        assert_eq!(max_nontrivial_charsum(2).unwrap(), 24);
        assert_eq!(max_nontrivial_charsum(3).unwrap(), 432);
        assert_eq!(max_nontrivial_charsum(4).unwrap(), 2880);
    }

    #[test]
    fn size_tests() {
        let t = gap_threshold(2).unwrap();
        assert!(t.guarantees(75, 75));
        assert!(!t.guarantees(74, 74));
        assert!(t.guarantees(74, 75));
        assert!(t.exceeds_rational(74, 74));
        assert!(!t.exceeds_rational(73, 73));
    }

    #[test]
    fn zero_third_row_has_no_witness() {
        let f2 = FieldCtx::prime(2).unwrap();
        let space = MatrixSpace::new(&f2, 3, u64::MAX).unwrap();
        let idx: Vec<u64> = (0..64).collect();
        let x = subset_from_indices(&space, &idx).unwrap();
        assert!(x.iter().all(|m| m.values()[6..].iter().all(|&v| v == 0)));
        let r = gap_check(&x, &x).unwrap();
        assert_eq!(r.set_sizes, (64, 64));
        assert!(!r.guaranteed);
        assert!(r.witness.is_none());
        assert!(!gap_check_single(&x).unwrap().guaranteed);
    }

    #[test]
    fn witness_order_and_singletons() {
        let f2 = FieldCtx::prime(2).unwrap();
        let space = MatrixSpace::new(&f2, 3, u64::MAX).unwrap();
        let a = space.matrix(5);
        assert!(
            find_invertible_difference(std::slice::from_ref(&a), std::slice::from_ref(&a))
                .unwrap()
                .is_none()
        );
        let all: Vec<MatFq> = space.iter().collect();
        let w = find_invertible_difference(&all, &all).unwrap().unwrap();
        assert_eq!(w.x_pos, 0);
        assert!(w.b.is_invertible());
        // the first invertible matrix in enumeration order
        assert_eq!(w.y_pos, all.iter().position(MatFq::is_invertible).unwrap());
    }

    #[test]
    fn random_pairs_are_reproducible() {
        let f2 = FieldCtx::prime(2).unwrap();
        let space = MatrixSpace::new(&f2, 3, u64::MAX).unwrap();
        let (x1, y1) = random_pair(&space, 75, 11).unwrap();
        let (x2, y2) = random_pair(&space, 75, 11).unwrap();
        assert_eq!((x1.clone(), y1.clone()), (x2, y2));
        assert_eq!(dedup(&x1).len(), 75);
        assert_ne!(x1, y1);
        assert!(random_pair(&space, 513, 0).is_err());
    }

    #[test]
    fn small_sweep() {
        let f2 = FieldCtx::prime(2).unwrap();
        let reports = soundness_sweep(&f2, 75, 20, 3).unwrap();
        assert_eq!(reports.len(), 20);
        assert!(reports.iter().all(|r| r.guaranteed && r.witness.is_some()));
        assert_eq!(reports[4].seed, Some(7));
    }

    #[test]
    fn rejects_other_sizes() {
        let f2 = FieldCtx::prime(2).unwrap();
        let m = MatFq::zero(&f2, 2);
        assert!(matches!(
            gap_check(std::slice::from_ref(&m), std::slice::from_ref(&m)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }
}
