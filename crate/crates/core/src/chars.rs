//! Additive characters with exact values.
//!
//! Character values are `p`-th roots of unity, so sums of them live in the
//! cyclotomic integers `Z[ζ_p]`. [`Cyclotomic`] stores `Σ c_j ζ^j` with the
//! canonical normalisation `c_{p-1} = 0` (subtract `c_{p-1}` from every
//! coordinate using `1 + ζ + ... + ζ^{p-1} = 0`), which makes equality
//! coordinate-wise.
//!
//! The canonical character of `F_q` is `χ_1(α) = ζ_p^{Tr(α)}`. A scalar label
//! `b` gives `χ_b(c) = χ_1(b c)` and a matrix label `A` gives
//! `χ_A(B) = χ_1(tr(A B))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{is_prime, FieldElement};
use crate::matfq::{trace_product_raw, MatFq, MatrixSpace};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Cyclotomic {
    p: u32,
    coeffs: Vec<i64>,
}

fn overflow() -> Error {
    Error::Overflow("cyclotomic arithmetic")
}

#[allow(clippy::should_implement_trait)]
impl Cyclotomic {
    fn check_order(p: u32) -> Result<()> {
        if is_prime(p as u64) {
            Ok(())
        } else {
            Err(Error::NonPrime(p as u64))
        }
    }

    pub fn zero(p: u32) -> Result<Cyclotomic> {
        Self::check_order(p)?;
        Ok(Cyclotomic {
            p,
            coeffs: vec![0; p as usize],
        })
    }

    pub fn from_integer(p: u32, value: i64) -> Result<Cyclotomic> {
        let mut z = Self::zero(p)?;
        z.coeffs[0] = value;
        Ok(z)
    }

    /// `ζ_p^exponent`, exponent reduced mod `p`.
    pub fn root(p: u32, exponent: i64) -> Result<Cyclotomic> {
        Self::from_exponent_counts(p, &{
            let mut counts = vec![0; p as usize];
            counts[exponent.rem_euclid(p as i64) as usize] = 1;
            counts
        })
    }

    /// `Σ_j coeffs[j] ζ^j` for an arbitrary length-`p` coefficient list.
    pub fn from_coeffs(p: u32, coeffs: Vec<i64>) -> Result<Cyclotomic> {
        Self::check_order(p)?;
        if coeffs.len() != p as usize {
            return Err(Error::DimensionMismatch(coeffs.len(), p as usize));
        }
        Cyclotomic { p, coeffs }.canonical()
    }

    /// `Σ_j counts[j] ζ^j`; the contraction step for exponent histograms.
    pub fn from_exponent_counts(p: u32, counts: &[i64]) -> Result<Cyclotomic> {
        Self::from_coeffs(p, counts.to_vec())
    }

    fn canonical(mut self) -> Result<Cyclotomic> {
        let last = *self.coeffs.last().expect("p >= 2");
        if last != 0 {
            for c in self.coeffs.iter_mut() {
                *c = c.checked_sub(last).ok_or_else(overflow)?;
            }
        }
        Ok(self)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical coefficients; the last one is always zero.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    fn check(&self, other: &Cyclotomic) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::OrderMismatch(self.p, other.p))
        }
    }

    pub fn add(&self, other: &Cyclotomic) -> Result<Cyclotomic> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or_else(overflow))
            .collect::<Result<Vec<_>>>()?;
        Cyclotomic { p: self.p, coeffs }.canonical()
    }

    pub fn mul(&self, other: &Cyclotomic) -> Result<Cyclotomic> {
        self.check(other)?;
        let p = self.p as usize;
        let mut coeffs = vec![0i64; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = a.checked_mul(b).ok_or_else(overflow)?;
                let slot = &mut coeffs[(i + j) % p];
                *slot = slot.checked_add(term).ok_or_else(overflow)?;
            }
        }
        Cyclotomic { p: self.p, coeffs }.canonical()
    }

    pub fn scale(&self, k: i64) -> Result<Cyclotomic> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.checked_mul(k).ok_or_else(overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Cyclotomic { p: self.p, coeffs })
    }

    /// Complex conjugation, `ζ^j -> ζ^{-j}`.
    pub fn conj(&self) -> Cyclotomic {
        let p = self.p as usize;
        let mut coeffs = vec![0; p];
        for (j, &c) in self.coeffs.iter().enumerate() {
            coeffs[(p - j) % p] = c;
        }
        Cyclotomic { p: self.p, coeffs }
            .canonical()
            .expect("conjugation only permutes coefficients")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer this value equals, or [`Error::NotRational`].
    pub fn to_integer(&self) -> Result<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Ok(self.coeffs[0])
        } else {
            Err(Error::NotRational(self.coeffs.clone()))
        }
    }
}

/// Parameter of an additive character: a field element for characters of
/// `F_q`, a matrix for characters of `Mat_n(F_q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "lowercase")]
pub enum CharacterLabel {
    Scalar(FieldElement),
    Matrix(MatFq),
}

impl CharacterLabel {
    pub fn is_trivial(&self) -> bool {
        match self {
            CharacterLabel::Scalar(b) => b.is_zero(),
            CharacterLabel::Matrix(a) => a.values().iter().all(|&v| v == 0),
        }
    }
}

/// `χ_b(c) = ζ_p^{Tr(b c)}`.
pub fn char_eval_field(label: &FieldElement, c: &FieldElement) -> Result<Cyclotomic> {
    let e = label.mul(c)?.abs_trace();
    Cyclotomic::root(label.ctx().p(), e as i64)
}

/// Exponent `Tr(tr(A B))` of `χ_A(B)`.
pub fn char_exponent_mat(label: &MatFq, b: &MatFq) -> Result<u32> {
    Ok(label.trace_of_product(b)?.abs_trace())
}

/// `χ_A(B) = ζ_p^{Tr(tr(A B))}`.
pub fn char_eval_mat(label: &MatFq, b: &MatFq) -> Result<Cyclotomic> {
    let e = char_exponent_mat(label, b)?;
    Cyclotomic::root(label.ctx().p(), e as i64)
}

/// Exponents of `χ_A` at every vertex, in enumeration order.
pub fn char_exponents(label: &MatFq, cap: u64) -> Result<Vec<u32>> {
    let ctx = label.ctx();
    let n = label.n();
    let space = MatrixSpace::new(ctx, n, cap)?;
    let mut buf = vec![0; n * n];
    Ok((0..space.len())
        .map(|i| {
            space.decode_into(i, &mut buf);
            ctx.trace_raw(trace_product_raw(ctx, n, label.values(), &buf))
        })
        .collect())
}

/// The character vector `(χ_A(B))_B` in enumeration order.
pub fn char_vector(label: &MatFq, cap: u64) -> Result<Vec<Cyclotomic>> {
    let p = label.ctx().p();
    char_exponents(label, cap)?
        .into_iter()
        .map(|e| Cyclotomic::root(p, e as i64))
        .collect()
}

/// Hermitian inner product `Σ v_i conj(w_i)`.
pub fn inner_product(v: &[Cyclotomic], w: &[Cyclotomic]) -> Result<Cyclotomic> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch(v.len(), w.len()));
    }
    let Some(first) = v.first() else {
        return Err(Error::DimensionMismatch(0, 1));
    };
    v.iter()
        .zip(w)
        .try_fold(Cyclotomic::zero(first.p())?, |acc, (a, b)| {
            acc.add(&a.mul(&b.conj())?)
        })
}

/// Inner product of two character vectors given by their exponent lists.
pub fn inner_product_exponents(p: u32, v: &[u32], w: &[u32]) -> Result<Cyclotomic> {
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch(v.len(), w.len()));
    }
    let mut counts = vec![0i64; p as usize];
    for (&a, &b) in v.iter().zip(w) {
        counts[((a + p - b) % p) as usize] += 1;
    }
    Cyclotomic::from_exponent_counts(p, &counts)
}

/// `Σ_{c ∈ F_q} χ_b(c)`.
pub fn scalar_sum_full(label: &FieldElement) -> Result<Cyclotomic> {
    scalar_sum(label, false)
}

/// `Σ_{c ∈ F_q^*} χ_b(c)`.
pub fn scalar_sum_units(label: &FieldElement) -> Result<Cyclotomic> {
    scalar_sum(label, true)
}

fn scalar_sum(label: &FieldElement, skip_zero: bool) -> Result<Cyclotomic> {
    let ctx = label.ctx();
    let mut counts = vec![0i64; ctx.p() as usize];
    for c in ctx.elements().skip(usize::from(skip_zero)) {
        counts[label.mul(&c)?.abs_trace() as usize] += 1;
    }
    Cyclotomic::from_exponent_counts(ctx.p(), &counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use crate::matfq::DEFAULT_ENUM_CAP;

    #[test]
    fn roots_and_canonical_form() {
        assert_eq!(Cyclotomic::root(2, 0).unwrap().coeffs(), &[1, 0]);
        assert_eq!(Cyclotomic::root(2, 1).unwrap().coeffs(), &[-1, 0]);
        assert_eq!(
            Cyclotomic::root(3, -1).unwrap(),
            Cyclotomic::root(3, 2).unwrap()
        );
        let total = [0, 1, 2]
            .iter()
            .map(|&e| Cyclotomic::root(3, e).unwrap())
            .reduce(|a, b| a.add(&b).unwrap())
            .unwrap();
        assert!(total.is_zero());
        assert_eq!(Cyclotomic::root(4, 1).unwrap_err(), Error::NonPrime(4));
    }

    #[test]
    fn ring_ops() {
        let z = Cyclotomic::root(3, 1).unwrap();
        let z2 = Cyclotomic::root(3, 2).unwrap();
        assert_eq!(z.mul(&z2).unwrap(), Cyclotomic::from_integer(3, 1).unwrap());
        let m1 = Cyclotomic::root(2, 1).unwrap();
        assert_eq!(m1.add(&m1).unwrap().to_integer().unwrap(), -2);
        assert_eq!(z.add(&Cyclotomic::zero(3).unwrap()).unwrap(), z);
        assert_eq!(z.add(&m1).unwrap_err(), Error::OrderMismatch(3, 2));
        assert_eq!(z.conj(), z2);
    }

    #[test]
    fn integer_collapse() {
        assert_eq!(
            Cyclotomic::from_integer(5, 1)
                .unwrap()
                .to_integer()
                .unwrap(),
            1
        );
        let s = Cyclotomic::root(3, 1)
            .unwrap()
            .add(&Cyclotomic::root(3, 2).unwrap())
            .unwrap();
        assert_eq!(s.coeffs(), &[-1, 0, 0]);
        assert_eq!(s.to_integer().unwrap(), -1);
        assert!(matches!(
            Cyclotomic::root(3, 1).unwrap().to_integer(),
            Err(Error::NotRational(_))
        ));
    }

    #[test]
    fn field_characters() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f4 = FieldCtx::new(2, 2, Some(&[1, 1, 1])).unwrap();
        for c in f3.elements() {
            assert_eq!(
                char_eval_field(&f3.zero(), &c).unwrap(),
                Cyclotomic::from_integer(3, 1).unwrap()
            );
        }
        assert_eq!(
            char_eval_field(&f3.one(), &f3.one()).unwrap(),
            Cyclotomic::root(3, 1).unwrap()
        );
        let x = f4.generator().unwrap();
        assert_eq!(
            char_eval_field(&f4.one(), &x)
                .unwrap()
                .to_integer()
                .unwrap(),
            -1
        );
        assert_eq!(
            char_eval_field(&f3.one(), &f4.one()).unwrap_err(),
            Error::CtxMismatch
        );
    }

    #[test]
    fn matrix_characters() {
        let f2 = FieldCtx::prime(2).unwrap();
        let id = MatFq::identity(&f2, 3);
        assert_eq!(char_eval_mat(&id, &id).unwrap().to_integer().unwrap(), -1);
        let f3 = FieldCtx::prime(3).unwrap();
        let a1 = MatFq::rank_representative(&f3, 3, 1).unwrap();
        let space = MatrixSpace::new(&f3, 3, DEFAULT_ENUM_CAP).unwrap();
        for b in space.iter().filter(|b| b.get(0, 0).is_zero()).take(50) {
            assert_eq!(char_eval_mat(&a1, &b).unwrap().to_integer().unwrap(), 1);
            assert_eq!(
                char_eval_mat(&MatFq::zero(&f3, 3), &b)
                    .unwrap()
                    .to_integer()
                    .unwrap(),
                1
            );
        }
        assert_eq!(
            char_eval_mat(&a1, &MatFq::zero(&f3, 2)).unwrap_err(),
            Error::DimensionMismatch(3, 2)
        );
    }

    #[test]
    fn character_vectors_over_f2() {
        let f2 = FieldCtx::prime(2).unwrap();
        let space = MatrixSpace::new(&f2, 2, DEFAULT_ENUM_CAP).unwrap();
        let one = Cyclotomic::from_integer(2, 1).unwrap();
        let trivial = char_vector(&MatFq::zero(&f2, 2), DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(trivial, vec![one; 16]);
        let vectors: Vec<Vec<Cyclotomic>> = space
            .iter()
            .map(|a| char_vector(&a, DEFAULT_ENUM_CAP).unwrap())
            .collect();
        for (i, v) in vectors.iter().enumerate().skip(1) {
            let ints: Vec<i64> = v.iter().map(|c| c.to_integer().unwrap()).collect();
            assert!(ints.iter().all(|&x| x == 1 || x == -1));
            assert_eq!(ints.iter().sum::<i64>(), 0);
            for w in &vectors[..i] {
                assert_ne!(v, w);
            }
        }
    }

    #[test]
    fn exponent_inner_product_matches_generic() {
        let f3 = FieldCtx::prime(3).unwrap();
        let space = MatrixSpace::new(&f3, 2, DEFAULT_ENUM_CAP).unwrap();
        let (a, b) = (space.matrix(5), space.matrix(41));
        let (ea, eb) = (
            char_exponents(&a, DEFAULT_ENUM_CAP).unwrap(),
            char_exponents(&b, DEFAULT_ENUM_CAP).unwrap(),
        );
        let va = char_vector(&a, DEFAULT_ENUM_CAP).unwrap();
        let vb = char_vector(&b, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(
            inner_product_exponents(3, &ea, &eb).unwrap(),
            inner_product(&va, &vb).unwrap()
        );
        assert_eq!(inner_product(&va, &va).unwrap().to_integer().unwrap(), 81);
    }

    #[test]
    fn scalar_sums() {
        for q in [2u64, 3, 4, 5] {
            let ctx = FieldCtx::from_order(q).unwrap();
            for b in ctx.elements() {
                let full = scalar_sum_full(&b).unwrap().to_integer().unwrap();
                let units = scalar_sum_units(&b).unwrap().to_integer().unwrap();
                if b.is_zero() {
                    assert_eq!((full, units), (q as i64, q as i64 - 1));
                } else {
                    assert_eq!((full, units), (0, -1));
                }
            }
        }
    }
}
