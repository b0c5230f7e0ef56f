//! Sparse multivariate polynomials over the rationals in the distinguished
//! variable `d` (the module action `∂`), the deformation parameter `t`, and an
//! indexed family of lambda-slot variables `x0`, `x1`, ...
//!
//! Coefficients are arbitrary-precision rationals, so every identity in the
//! crate is checked exactly. Monomials are ordered graded-lexicographically
//! with `d < t < x0 < x1 < ...`; printing walks terms in descending order,
//! which fixes the canonical string form (`d^2 + 2*d*x0 + x0^2`).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar. Canonical form (reduced, positive denominator) is
/// maintained by `num_rational`.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn scalar_frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A polynomial variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum VarId {
    /// The distinguished variable `∂`, printed `d`.
    Partial,
    /// The deformation parameter, printed `t`.
    DefParam,
    /// A lambda-slot variable, printed `x0`, `x1`, ...
    Slot(u32),
}

impl VarId {
    fn rank(self) -> (u8, u32) {
        match self {
            VarId::Partial => (0, 0),
            VarId::DefParam => (1, 0),
            VarId::Slot(i) => (2, i),
        }
    }
}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VarId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Partial => write!(f, "d"),
            VarId::DefParam => write!(f, "t"),
            VarId::Slot(i) => write!(f, "x{i}"),
        }
    }
}

/// An exponent vector: variables with nonzero powers, sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId, pow: u32) -> Self {
        if pow == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, pow)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(VarId, u32)>) -> Self {
        pairs.retain(|&(_, p)| p > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            match merged.last_mut() {
                Some((w, q)) if *w == v => *q += p,
                _ => merged.push((v, p)),
            }
        }
        Monomial(merged)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, p)| p).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, p)| p)
            .unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend(other.0.iter().copied());
        Monomial::from_pairs(pairs)
    }

    /// Remove variable `v`, returning (power of v, remainder).
    fn split(&self, v: VarId) -> (u32, Monomial) {
        let pow = self.exponent(v);
        let rest: Vec<_> = self.0.iter().copied().filter(|&(w, _)| w != v).collect();
        (pow, Monomial(rest))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then a higher power of an
    /// earlier variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        let (mut na, mut nb) = (a.next(), b.next());
        loop {
            match (na, nb) {
                (None, None) => return Ordering::Equal,
                // remaining exponents live on larger variables, so the side
                // that ran out first is lexicographically larger
                (None, Some(_)) => return Ordering::Greater,
                (Some(_), None) => return Ordering::Less,
                (Some(&(va, pa)), Some(&(vb, pb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match pa.cmp(&pb) {
                        Ordering::Equal => {
                            na = a.next();
                            nb = b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

/// Sparse association from exponent vectors to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        MultiPoly::constant(scalar(1))
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = MultiPoly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        MultiPoly::constant(scalar(n))
    }

    pub fn var(v: VarId) -> Self {
        MultiPoly::term(scalar(1), Monomial::var(v, 1))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut p = MultiPoly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant (monomial-free) coefficient.
    pub fn constant_coeff(&self) -> Scalar {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// True if the polynomial is a (possibly zero) constant.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut out = MultiPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Replace every occurrence of `v` by `r`.
    pub fn substitute(&self, v: VarId, r: &MultiPoly) -> MultiPoly {
        self.substitute_sim(&[(v, r.clone())])
    }

    /// Simultaneous substitution: all listed variables are replaced at once,
    /// so swaps like `x0 -> x1, x1 -> x0` behave as expected.
    pub fn substitute_sim(&self, subs: &[(VarId, MultiPoly)]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = MultiPoly::constant(c.clone());
            for (v, p) in m.vars() {
                if let Some((_, r)) = subs.iter().find(|&&(w, _)| w == v) {
                    factor = factor.mul(&r.pow(p));
                } else {
                    kept.push((v, p));
                }
            }
            out = out.add(&factor.mul(&MultiPoly::term(scalar(1), Monomial::from_pairs(kept))));
        }
        out
    }

    /// Rename variables according to `map` (simultaneous).
    pub fn rename(&self, map: &[(VarId, VarId)]) -> MultiPoly {
        let subs: Vec<_> = map
            .iter()
            .map(|&(from, to)| (from, MultiPoly::var(to)))
            .collect();
        self.substitute_sim(&subs)
    }

    /// Write `self = sum_k v^k * coeff_k`; returns pairs `(k, coeff_k)` with
    /// nonzero coefficients, ascending in `k`. Coefficients are free of `v`.
    pub fn expand_in_variable(&self, v: VarId) -> Vec<(u32, MultiPoly)> {
        let mut by_pow: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (pow, rest) = m.split(v);
            by_pow
                .entry(pow)
                .or_insert_with(MultiPoly::zero)
                .add_term(rest, c.clone());
        }
        by_pow.retain(|_, p| !p.is_zero());
        by_pow.into_iter().collect()
    }

    /// Coefficient of `v^k` (free of `v`).
    pub fn coeff_of(&self, v: VarId, k: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (pow, rest) = m.split(v);
            if pow == k {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Maximum total degree; `-1` for the zero polynomial by convention.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Maximum degree in `v`; `-1` for the zero polynomial.
    pub fn degree_in(&self, v: VarId) -> i64 {
        self.terms
            .keys()
            .map(|m| m.exponent(v) as i64)
            .max()
            .unwrap_or(-1)
    }

    /// All variables that occur with nonzero power.
    pub fn vars_used(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.vars() {
                if !vs.contains(&v) {
                    vs.push(v);
                }
            }
        }
        vs.sort();
        vs
    }

    pub fn uses_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }
}

fn write_scalar_abs(f: &mut fmt::Formatter<'_>, c: &Scalar) -> fmt::Result {
    let c = c.abs();
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = c.abs().is_one();
            if m.degree() == 0 {
                write_scalar_abs(f, c)?;
                continue;
            }
            let mut first_factor = true;
            if !coeff_is_one {
                write_scalar_abs(f, c)?;
                first_factor = false;
            }
            for (v, p) in m.vars() {
                if !first_factor {
                    write!(f, "*")?;
                }
                first_factor = false;
                if p == 1 {
                    write!(f, "{v}")?;
                } else {
                    write!(f, "{v}^{p}")?;
                }
            }
        }
        Ok(())
    }
}

/// Convenience constructors used throughout the crate and its tests.
pub fn pvar(v: VarId) -> MultiPoly {
    MultiPoly::var(v)
}

pub const PARTIAL: VarId = VarId::Partial;
pub const DEF_PARAM: VarId = VarId::DefParam;

pub const fn slot(i: u32) -> VarId {
    VarId::Slot(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> MultiPoly {
        pvar(PARTIAL)
    }
    fn x(i: u32) -> MultiPoly {
        pvar(slot(i))
    }

    #[test]
    fn add_cancels() {
        // (d + 2*x0) + (-2*x0) = d
        let p = d().add(&x(0).scale(&scalar(2)));
        let q = x(0).scale(&scalar(-2));
        assert_eq!(p.add(&q), d());
        assert_eq!(p.add(&MultiPoly::zero()), p);
        assert_eq!(d().add(&d()), d().scale(&scalar(2)));
    }

    #[test]
    fn mul_difference_of_squares() {
        let p = d().add(&x(0));
        let q = d().sub(&x(0));
        assert_eq!(p.mul(&q), d().mul(&d()).sub(&x(0).mul(&x(0))));
        assert_eq!(p.mul(&MultiPoly::one()), p);
        // (-x0)*(d + 2x0) = -x0*d - 2*x0^2
        let lhs = x(0).neg().mul(&d().add(&x(0).scale(&scalar(2))));
        let rhs = x(0)
            .mul(&d())
            .neg()
            .sub(&x(0).mul(&x(0)).scale(&scalar(2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution() {
        // substitute(d + 2*mu, mu, -d - x0) = -d - 2*x0, with mu = x1
        let mu = slot(1);
        let p = d().add(&pvar(mu).scale(&scalar(2)));
        let repl = d().neg().sub(&x(0));
        assert_eq!(
            p.substitute(mu, &repl),
            d().neg().sub(&x(0).scale(&scalar(2)))
        );
        assert_eq!(p.substitute(mu, &pvar(mu)), p);
        // mu^2 -> d^2 + 2*d*x0 + x0^2
        let sq = pvar(mu).mul(&pvar(mu)).substitute(mu, &repl);
        let expect = d()
            .mul(&d())
            .add(&d().mul(&x(0)).scale(&scalar(2)))
            .add(&x(0).mul(&x(0)));
        assert_eq!(sq, expect);
    }

    #[test]
    fn simultaneous_swap() {
        let p = x(0).mul(&x(0)).add(&x(1));
        let swapped = p.rename(&[(slot(0), slot(1)), (slot(1), slot(0))]);
        assert_eq!(swapped, x(1).mul(&x(1)).add(&x(0)));
    }

    #[test]
    fn expansion() {
        let p = d().add(&x(0).scale(&scalar(2)));
        let parts = p.expand_in_variable(slot(0));
        assert_eq!(parts, vec![(0, d()), (1, MultiPoly::int(2))]);
        assert_eq!(
            MultiPoly::int(7).expand_in_variable(slot(0)),
            vec![(0, MultiPoly::int(7))]
        );
        let q = x(0).mul(&x(0)).mul(&d());
        assert_eq!(q.expand_in_variable(slot(0)), vec![(2, d())]);
    }

    #[test]
    fn degrees() {
        let p = d().mul(&d()).mul(&x(0));
        assert_eq!(p.total_degree(), 3);
        assert_eq!(d().add(&x(0).scale(&scalar(2))).degree_in(slot(0)), 1);
        assert_eq!(MultiPoly::zero().total_degree(), -1);
        assert_eq!(MultiPoly::zero().degree_in(PARTIAL), -1);
    }

    #[test]
    fn canonical_printing() {
        let p = d()
            .mul(&d())
            .add(&d().mul(&x(0)).scale(&scalar(2)))
            .add(&x(0).mul(&x(0)));
        assert_eq!(p.to_string(), "d^2 + 2*d*x0 + x0^2");
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!(d().neg().to_string(), "-d");
        assert_eq!(
            d().sub(&MultiPoly::constant(scalar_frac(1, 2))).to_string(),
            "d - 1/2"
        );
    }
}
