//! Arithmetic in prime fields `F_p` and extension fields `F_{p^k}`.
//!
//! An element is stored as its index in `0..q`: the base-`p` digits of the
//! index are the coefficients of the residue polynomial, constant term least
//! significant. Index order is therefore the lexicographic coefficient order
//! with the constant term varying fastest, starting at zero.
//!
//! Fields with `q <= 256` precompute addition, multiplication, negation,
//! inversion and absolute-trace tables; larger fields compute directly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

const TABLE_LIMIT: u32 = 256;
const FIELD_LIMIT: u64 = 1 << 31;

/// The built-in modulus table shipped with the crate.
pub const BUILTIN_MODULI: &str = include_str!("../data/moduli.txt");

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, k)` with `q = p^k`, `p` prime.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0u32;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    let p = u32::try_from(p).map_err(|_| Error::FieldTooLarge(format!("p = {p}")))?;
    Ok((p, k))
}

// --- polynomials over F_p, coefficient vectors with constant term first ---

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    while r.len() > dm {
        let top = r.pop().unwrap() % p;
        if top != 0 {
            let shift = r.len() - dm;
            for (j, &mj) in m[..dm].iter().enumerate() {
                let sub = top * mj as u64 % p;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
    }
    trim(r.into_iter().map(|c| (c % p) as u32).collect())
}

/// Whether the monic polynomial `m` of degree `k >= 2` has no monic factor of
/// degree `1..=k/2`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                f.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    trace: Vec<u32>,
}

/// Descriptor of a finite field `F_{p^k} = F_p[x] / (modulus)`.
///
/// Equality is structural on `(p, k, modulus)`.
pub struct FieldCtx {
    p: u32,
    k: u32,
    modulus: Vec<u32>,
    q: u32,
    tables: Option<Tables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Serialize for FieldCtx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FieldCtx", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.end()
    }
}

impl FieldCtx {
    /// Builds `F_{p^k}`. Without an explicit modulus, `k >= 2` is looked up in
    /// the built-in table.
    pub fn new(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Arc<FieldCtx>> {
        Self::with_table(p, k, modulus, &ModulusTable::builtin())
    }

    pub fn with_table(
        p: u32,
        k: u32,
        modulus: Option<&[u32]>,
        table: &ModulusTable,
    ) -> Result<Arc<FieldCtx>> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::BadModulus {
                p,
                expected: 0,
                modulus: modulus.map(|m| m.to_vec()).unwrap_or_default(),
            });
        }
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= FIELD_LIMIT)
            .ok_or_else(|| Error::FieldTooLarge(format!("{p}^{k}")))? as u32;
        let modulus = if k == 1 {
            if let Some(m) = modulus {
                validate_modulus(p, k, m)?;
            }
            vec![0, 1]
        } else {
            let m = match modulus {
                Some(m) => m.to_vec(),
                None => table
                    .get(p, k)
                    .ok_or(Error::UnsupportedField { p, k })?
                    .to_vec(),
            };
            validate_modulus(p, k, &m)?;
            m
        };
        let mut ctx = FieldCtx {
            p,
            k,
            modulus,
            q,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(Arc::new(ctx))
    }

    pub fn prime(p: u32) -> Result<Arc<FieldCtx>> {
        Self::new(p, 1, None)
    }

    /// Field of order `q` using the built-in modulus table.
    pub fn from_order(q: u64) -> Result<Arc<FieldCtx>> {
        let (p, k) = prime_power(q)?;
        Self::new(p, k, None)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..self.q {
            for b in 0..self.q {
                add[a as usize * q + b as usize] = self.add_direct(a, b);
                mul[a as usize * q + b as usize] = self.mul_direct(a, b);
            }
        }
        let neg = (0..self.q).map(|a| self.neg_direct(a)).collect();
        let inv = (0..self.q)
            .map(|a| if a == 0 { 0 } else { self.inv_direct(a) })
            .collect();
        let trace = (0..self.q).map(|a| self.trace_direct(a)).collect();
        Tables {
            add,
            mul,
            neg,
            inv,
            trace,
        }
    }

    fn digits(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut rest = a;
        for _ in 0..self.k {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    fn undigits(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_direct(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        self.undigits(&sum)
    }

    fn neg_direct(&self, a: u32) -> u32 {
        let d: Vec<u32> = self
            .digits(a)
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        self.undigits(&d)
    }

    fn mul_direct(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.k == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; da.len() + db.len() - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k as usize, 0);
        self.undigits(&r)
    }

    fn pow_direct(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_direct(acc, base);
            }
            base = self.mul_direct(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv_direct(&self, a: u32) -> u32 {
        self.pow_direct(a, self.q as u64 - 2)
    }

    /// Sum of the Frobenius conjugates `a + a^p + ... + a^{p^{k-1}}`.
    fn trace_direct(&self, a: u32) -> u32 {
        let mut conj = a;
        let mut sum = 0;
        for _ in 0..self.k {
            sum = self.add_direct(sum, conj);
            conj = self.pow_direct(conj, self.p as u64);
        }
        assert!(sum < self.p, "trace left the prime subfield");
        sum
    }

    // Index-level operations. Callers guarantee every argument is in `0..q`.

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[a as usize * self.q as usize + b as usize],
            None => self.add_direct(a, b),
        }
    }

    #[inline]
    pub fn neg_raw(&self, a: u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[a as usize],
            None => self.neg_direct(a),
        }
    }

    #[inline]
    pub fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[a as usize * self.q as usize + b as usize],
            None => self.mul_direct(a, b),
        }
    }

    /// `None` for zero.
    #[inline]
    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        Some(match &self.tables {
            Some(t) => t.inv[a as usize],
            None => self.inv_direct(a),
        })
    }

    /// Absolute trace to `F_p`, as an integer in `0..p`.
    #[inline]
    pub fn trace_raw(&self, a: u32) -> u32 {
        match &self.tables {
            Some(t) => t.trace[a as usize],
            None => self.trace_direct(a),
        }
    }

    pub fn element(self: &Arc<Self>, value: u32) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::BadCoefficient { p: self.p, value });
        }
        Ok(FieldElement {
            ctx: Arc::clone(self),
            value,
        })
    }

    /// Element from its residue-polynomial coefficients, constant term first.
    /// Shorter lists are zero-padded.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.k as usize {
            return Err(Error::DimensionMismatch(coeffs.len(), self.k as usize));
        }
        if let Some(&bad) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::BadCoefficient {
                p: self.p,
                value: bad,
            });
        }
        self.element(self.undigits(coeffs))
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(self),
            value: 0,
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(self),
            value: 1,
        }
    }

    /// The adjoined root `x`; `None` for a prime field.
    pub fn generator(self: &Arc<Self>) -> Option<FieldElement> {
        (self.k > 1).then(|| FieldElement {
            ctx: Arc::clone(self),
            value: self.p,
        })
    }

    /// All `q` elements in index order, starting with zero.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement {
            ctx: Arc::clone(self),
            value,
        })
    }
}

fn validate_modulus(p: u32, k: u32, m: &[u32]) -> Result<()> {
    let bad = || Error::BadModulus {
        p,
        expected: k,
        modulus: m.to_vec(),
    };
    if m.len() != k as usize + 1 || m[k as usize] != 1 || m.iter().any(|&c| c >= p) {
        return Err(bad());
    }
    if k >= 2 && (m[0] == 0 || !is_irreducible(m, p)) {
        return Err(Error::ReducibleModulus {
            p,
            modulus: m.to_vec(),
        });
    }
    Ok(())
}

/// An element of a finite field. Operations between elements of different
/// fields fail with [`Error::CtxMismatch`].
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    value: u32,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && same_ctx(&self.ctx, &other.ctx)
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

pub(crate) fn same_ctx(a: &Arc<FieldCtx>, b: &Arc<FieldCtx>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[allow(clippy::should_implement_trait)]
impl FieldElement {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Index of the element in `0..q`.
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.digits(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    fn with(&self, value: u32) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            value,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.ctx.add_raw(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.ctx.sub_raw(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(self.with(self.ctx.mul_raw(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.ctx.neg_raw(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.ctx
            .inv_raw(self.value)
            .map(|v| self.with(v))
            .ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.value;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ctx.mul_raw(acc, base);
            }
            base = self.ctx.mul_raw(base, base);
            e >>= 1;
        }
        self.with(acc)
    }

    /// Absolute trace `Tr: F_q -> F_p`, returned as an integer in `0..p`.
    pub fn abs_trace(&self) -> u32 {
        self.ctx.trace_raw(self.value)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.k == 1 {
            return write!(f, "{}", self.value);
        }
        let coeffs = self.coeffs();
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

/// Irreducible moduli keyed by `(p, k)`, each validated at load.
#[derive(Debug, Clone, Default)]
pub struct ModulusTable {
    entries: BTreeMap<(u32, u32), Vec<u32>>,
}

impl ModulusTable {
    pub fn builtin() -> ModulusTable {
        ModulusTable::parse(BUILTIN_MODULI).expect("built-in modulus table is valid")
    }

    /// Parses lines of the form `p k c0,c1,...,ck`. Blank lines and `#`
    /// comments are ignored.
    pub fn parse(text: &str) -> Result<ModulusTable> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("modulus table line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `p k c0,c1,...,ck`"));
            }
            let p: u32 = fields[0].parse().map_err(|_| err("bad p"))?;
            let k: u32 = fields[1].parse().map_err(|_| err("bad k"))?;
            let coeffs = fields[2]
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err("bad coefficient list"))?;
            if !is_prime(p as u64) {
                return Err(Error::NonPrime(p as u64));
            }
            validate_modulus(p, k, &coeffs)?;
            entries.insert((p, k), coeffs);
        }
        Ok(ModulusTable { entries })
    }

    pub fn load(path: &Path) -> Result<ModulusTable> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        ModulusTable::parse(&text)
    }

    pub fn get(&self, p: u32, k: u32) -> Option<&[u32]> {
        self.entries.get(&(p, k)).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, &[u32])> {
        self.entries.iter().map(|(&(p, k), m)| (p, k, m.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Arc<FieldCtx> {
        FieldCtx::new(2, 2, Some(&[1, 1, 1])).unwrap()
    }

    #[test]
    fn make_fields() {
        let f2 = FieldCtx::new(2, 1, None).unwrap();
        assert_eq!((f2.p(), f2.k(), f2.q()), (2, 1, 2));
        assert_eq!(f4().q(), 4);
        assert_eq!(
            FieldCtx::new(2, 2, Some(&[0, 0, 1])).unwrap_err(),
            Error::ReducibleModulus {
                p: 2,
                modulus: vec![0, 0, 1]
            }
        );
        assert_eq!(FieldCtx::new(6, 1, None).unwrap_err(), Error::NonPrime(6));
        assert_eq!(
            FieldCtx::new(7, 2, None).unwrap_err(),
            Error::UnsupportedField { p: 7, k: 2 }
        );
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(
            FieldCtx::new(2, 2, Some(&[1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2 has no root but is reducible
        assert!(matches!(
            FieldCtx::new(2, 4, Some(&[1, 0, 1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
        assert!(matches!(
            FieldCtx::new(2, 2, Some(&[1, 1])),
            Err(Error::BadModulus { .. })
        ));
    }

    #[test]
    fn small_arithmetic() {
        let f3 = FieldCtx::prime(3).unwrap();
        let two = f3.element(2).unwrap();
        assert_eq!(two.add(&two).unwrap().value(), 1);
        assert_eq!(two.inv().unwrap().value(), 2);
        assert_eq!(f3.zero().inv().unwrap_err(), Error::DivisionByZero);

        let f4 = f4();
        let x = f4.generator().unwrap();
        assert_eq!(x.mul(&x).unwrap().coeffs(), vec![1, 1]);
        assert_eq!(format!("{}", x.mul(&x).unwrap()), "x+1");
        assert_eq!(x.abs_trace(), 1);
        assert_eq!(f4.zero().abs_trace(), 0);
        assert_eq!(f3.one().add(&f4.one()).unwrap_err(), Error::CtxMismatch);
    }

    #[test]
    fn enumeration_order() {
        let f4 = f4();
        let coeffs: Vec<Vec<u32>> = f4.elements().map(|e| e.coeffs()).collect();
        assert_eq!(coeffs, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let f3 = FieldCtx::prime(3).unwrap();
        let vals: Vec<u32> = f3.elements().map(|e| e.value()).collect();
        assert_eq!(vals, vec![0, 1, 2]);
    }

    #[test]
    fn tables_agree_with_direct_arithmetic() {
        for (p, k, _) in ModulusTable::builtin().iter() {
            let ctx = FieldCtx::new(p, k, None).unwrap();
            for a in 0..ctx.q {
                assert_eq!(ctx.trace_raw(a), ctx.trace_direct(a));
                for b in 0..ctx.q {
                    assert_eq!(ctx.mul_raw(a, b), ctx.mul_direct(a, b));
                    assert_eq!(ctx.add_raw(a, b), ctx.add_direct(a, b));
                }
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let ctx = FieldCtx::from_order(q).unwrap();
            let n = ctx.q;
            for a in 0..n {
                if a != 0 {
                    assert_eq!(ctx.mul_raw(a, ctx.inv_raw(a).unwrap()), 1);
                }
                assert_eq!(ctx.add_raw(a, ctx.neg_raw(a)), 0);
                for b in 0..n {
                    assert_eq!(ctx.mul_raw(a, b), ctx.mul_raw(b, a));
                    assert_eq!(
                        ctx.trace_raw(ctx.add_raw(a, b)),
                        (ctx.trace_raw(a) + ctx.trace_raw(b)) % ctx.p
                    );
                    for c in 0..n {
                        assert_eq!(
                            ctx.add_raw(ctx.add_raw(a, b), c),
                            ctx.add_raw(a, ctx.add_raw(b, c))
                        );
                        assert_eq!(
                            ctx.mul_raw(a, ctx.add_raw(b, c)),
                            ctx.add_raw(ctx.mul_raw(a, b), ctx.mul_raw(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_fibers_and_prime_linearity() {
        for (p, k, _) in ModulusTable::builtin().iter() {
            let ctx = FieldCtx::new(p, k, None).unwrap();
            let mut fibers = vec![0u32; p as usize];
            for a in 0..ctx.q {
                fibers[ctx.trace_raw(a) as usize] += 1;
                for c in 0..p {
                    assert_eq!(ctx.trace_raw(ctx.mul_raw(c, a)), c * ctx.trace_raw(a) % p);
                }
            }
            assert!(fibers.iter().all(|&f| f == ctx.q / p));
        }
    }

    #[test]
    fn large_untabled_field() {
        let ctx = FieldCtx::prime(1009).unwrap();
        assert!(ctx.tables.is_none());
        let a = ctx.element(1000).unwrap();
        assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), ctx.one());
        assert_eq!(a.abs_trace(), 1000);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(27).unwrap(), (3, 3));
        assert_eq!(prime_power(2).unwrap(), (2, 1));
        assert_eq!(prime_power(97).unwrap(), (97, 1));
        assert_eq!(prime_power(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(prime_power(1).unwrap_err(), Error::NotPrimePower(1));
    }

    #[test]
    fn table_parsing() {
        let t = ModulusTable::parse("# c\n2 2 1,1,1\n\n3 2 2,1,1 # x^2+x+2\n").unwrap();
        assert_eq!(t.get(3, 2), Some(&[2, 1, 1][..]));
        assert!(matches!(
            ModulusTable::parse("2 2 1,0,1"),
            Err(Error::ReducibleModulus { .. })
        ));
        assert!(matches!(ModulusTable::parse("2 2"), Err(Error::Parse(_))));
        let alt = FieldCtx::with_table(3, 2, None, &t).unwrap();
        assert_eq!(alt.modulus(), &[2, 1, 1]);
    }
}
