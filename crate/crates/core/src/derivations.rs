//! Conformal linear maps, alpha^k-derivations and inner derivations, their
//! commutator (which makes the derivation spaces a Hom-Lie conformal algebra),
//! truncated solvers, and the rank r+1 derivation-extension algebra.
//!
//! A `ConformalMap` stores `D(e_i)` as a lambda expression in `x0` and is
//! extended to arbitrary elements by conformal linearity
//! `D(d a) = (d + x0) D(a)`. Two-slot values (commutators) keep the outer
//! parameter in `x0` and the evaluation variable in `x1`.

use crate::algebra::{
    basis_elem, mat_apply, vec_add, vec_is_zero, vec_neg, vec_rename, vec_scale, vec_sub,
    vec_substitute, zero_vec, HomConformalAlgebra, PolyVec, FRESH,
};
use crate::error::Error;
use crate::linalg::nullspace_of_residuals;
use crate::poly::{pvar, scalar, slot, Monomial, MultiPoly, VarId, PARTIAL};

/// How a map extends from basis elements to the free `Q[d]`-module: a
/// conformal linear map shifts `d` by the slot, a cochain-style map replaces
/// `d` by the negated slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionRule {
    ConformalLinear,
    CochainAntilinear,
}

/// An element of `Cend(R)`: `table[i] = D(e_i)` in `d` and the slot `x0`,
/// extended by conformal linearity. `level` records the alpha power the map
/// is meant to be tested against.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMap {
    pub level: usize,
    pub table: Vec<PolyVec>,
}

impl ConformalMap {
    pub fn zero(rank: usize, level: usize) -> Self {
        ConformalMap {
            level,
            table: vec![zero_vec(rank); rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.table.len()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| vec_is_zero(v))
    }

    pub fn add(&self, other: &ConformalMap) -> ConformalMap {
        ConformalMap {
            level: self.level,
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| vec_add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &ConformalMap) -> ConformalMap {
        ConformalMap {
            level: self.level,
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| vec_sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &MultiPoly) -> ConformalMap {
        ConformalMap {
            level: self.level,
            table: self.table.iter().map(|v| vec_scale(v, c)).collect(),
        }
    }

    /// The `d`-action of Cend: `(dD)_x0 = -x0 D_x0`.
    pub fn partial_map(&self) -> ConformalMap {
        self.scale(&pvar(slot(0)).neg())
    }

    /// `D` applied at the slot variable `at` to an arbitrary element:
    /// `D(sum p_i(d) e_i) = sum p_i(d + at) D(e_i)`, slot renamed to `at`.
    /// Slot variables inside `x` pass through as scalars.
    pub fn apply(&self, x: &[MultiPoly], at: VarId) -> PolyVec {
        self.apply_at(x, &pvar(at))
    }

    /// `D` applied with the lambda parameter set to an arbitrary polynomial
    /// (e.g. `x1 - x0` or `-d - x0`).
    pub fn apply_at(&self, x: &[MultiPoly], at: &MultiPoly) -> PolyVec {
        let rank = self.rank();
        let shift = pvar(PARTIAL).add(at);
        let mut out = zero_vec(rank);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let c = xi.substitute(PARTIAL, &shift);
            let entry = vec_substitute(&self.table[i], slot(0), at);
            out = vec_add(&out, &vec_scale(&entry, &c));
        }
        out
    }

    /// `D` composed with `alpha` on the inside: the Hom-twist `alpha'` of the
    /// derivation algebra, `alpha'(D) = D . alpha`.
    pub fn compose_alpha(&self, a: &HomConformalAlgebra) -> ConformalMap {
        let r = self.rank();
        ConformalMap {
            level: self.level + 1,
            table: (0..r)
                .map(|i| self.apply(&mat_apply(&a.alpha, &basis_elem(r, i)), slot(0)))
                .collect(),
        }
    }

    /// Concatenated table for span computations.
    pub fn flatten(&self) -> Vec<MultiPoly> {
        self.table.iter().flatten().cloned().collect()
    }
}

/// Does `D` commute with the twist, `D_x0 . alpha = alpha . D_x0`?
pub fn commutes_with_alpha(a: &HomConformalAlgebra, d: &ConformalMap) -> bool {
    let r = d.rank();
    (0..r).all(|i| {
        let lhs = d.apply(&mat_apply(&a.alpha, &basis_elem(r, i)), slot(0));
        let rhs = mat_apply(&a.alpha, &d.table[i]);
        vec_is_zero(&vec_sub(&lhs, &rhs))
    })
}

/// `D_x0([e_i x1 e_j]) - [D(e_i) x0+x1 alpha^k(e_j)] - [alpha^k(e_i) x1
/// D(e_j)]`.
pub fn derivation_residual(
    a: &HomConformalAlgebra,
    d: &ConformalMap,
    k: usize,
    i: usize,
    j: usize,
) -> PolyVec {
    let r = a.rank();
    let pow = a.alpha_power(k as i64).expect("nonnegative power");
    let bracket = vec_rename(&a.bracket[i][j], &[(slot(0), slot(1))]);
    let lhs = d.apply(&bracket, slot(0));

    let nested = a.extend_bracket(&d.table[i], &mat_apply(&pow, &basis_elem(r, j)), FRESH);
    let rhs1 = vec_substitute(&nested, FRESH, &pvar(slot(0)).add(&pvar(slot(1))));
    let rhs2 = a.extend_bracket(&mat_apply(&pow, &basis_elem(r, i)), &d.table[j], slot(1));

    vec_sub(&lhs, &vec_add(&rhs1, &rhs2))
}

pub fn is_alpha_k_derivation(a: &HomConformalAlgebra, d: &ConformalMap, k: usize) -> bool {
    if !commutes_with_alpha(a, d) {
        return false;
    }
    let r = a.rank();
    (0..r).all(|i| (0..r).all(|j| vec_is_zero(&derivation_residual(a, d, k, i, j))))
}

/// `D_k(a)_x0(b) = [a x0 alpha^k(b)]` for `alpha(a) = a`; an inner
/// alpha^{k+1}-derivation.
pub fn inner_derivation(
    a: &HomConformalAlgebra,
    elem: &[MultiPoly],
    k: usize,
) -> Result<ConformalMap, Error> {
    if !vec_is_zero(&vec_sub(&a.apply_alpha(elem), elem)) {
        return Err(Error::NotAlphaFixed);
    }
    let r = a.rank();
    let pow = a.alpha_power(k as i64)?;
    Ok(ConformalMap {
        level: k + 1,
        table: (0..r)
            .map(|j| a.extend_bracket(elem, &mat_apply(&pow, &basis_elem(r, j)), slot(0)))
            .collect(),
    })
}

/// A commutator value `[D x0 D']`: `table[i]` is `[D x0 D']_x1(e_i)` with the
/// outer parameter in `x0` and the evaluation variable in `x1`, extended to
/// arbitrary elements by conformal linearity in `x1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSlotMap {
    pub level: usize,
    pub table: Vec<PolyVec>,
}

impl TwoSlotMap {
    pub fn rank(&self) -> usize {
        self.table.len()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| vec_is_zero(v))
    }

    pub fn apply(&self, x: &[MultiPoly], at: VarId) -> PolyVec {
        let rank = self.rank();
        let shift = pvar(PARTIAL).add(&pvar(at));
        let mut out = zero_vec(rank);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let c = xi.substitute(PARTIAL, &shift);
            let entry = vec_rename(&self.table[i], &[(slot(1), at)]);
            out = vec_add(&out, &vec_scale(&entry, &c));
        }
        out
    }
}

/// `[D x0 D']_x1(e_i) = D_x0(D'_{x1-x0}(e_i)) - D'_{x1-x0}(D_x0(e_i))`.
pub fn commutator(d: &ConformalMap, e: &ConformalMap) -> TwoSlotMap {
    let r = d.rank();
    let shifted = pvar(slot(1)).sub(&pvar(slot(0)));
    let table = (0..r)
        .map(|i| {
            let t1 = d.apply_at(&e.apply_at(&basis_elem(r, i), &shifted), &pvar(slot(0)));
            let t2 = e.apply_at(&d.apply_at(&basis_elem(r, i), &pvar(slot(0))), &shifted);
            vec_sub(&t1, &t2)
        })
        .collect();
    TwoSlotMap {
        level: d.level + e.level,
        table,
    }
}

/// The two-slot derivation identity at the given level, with the pair slot
/// in `x2`: `T_x1([e_i x2 e_j]) = [T(e_i) x1+x2 alpha^k(e_j)] +
/// [alpha^k(e_i) x2 T(e_j)]` for all basis pairs.
pub fn two_slot_derivation_residual(
    a: &HomConformalAlgebra,
    t: &TwoSlotMap,
    level: usize,
    i: usize,
    j: usize,
) -> PolyVec {
    let r = a.rank();
    let pow = a.alpha_power(level as i64).expect("nonnegative power");
    let bracket = vec_rename(&a.bracket[i][j], &[(slot(0), slot(2))]);
    let lhs = t.apply(&bracket, slot(1));

    let nested = a.extend_bracket(&t.table[i], &mat_apply(&pow, &basis_elem(r, j)), FRESH);
    let rhs1 = vec_substitute(&nested, FRESH, &pvar(slot(1)).add(&pvar(slot(2))));
    let rhs2 = a.extend_bracket(&mat_apply(&pow, &basis_elem(r, i)), &t.table[j], slot(2));

    vec_sub(&lhs, &vec_add(&rhs1, &rhs2))
}

pub fn two_slot_is_derivation(a: &HomConformalAlgebra, t: &TwoSlotMap, level: usize) -> bool {
    let r = a.rank();
    (0..r).all(|i| {
        (0..r).all(|j| vec_is_zero(&two_slot_derivation_residual(a, t, level, i, j)))
    })
}

/// Hom Jacobi residual of the derivation algebra on a basis element:
/// `[alpha'(D) x0 [D' x1 D'']] - [alpha'(D') x1 [D x0 D'']] -
/// [[D x0 D'] x0+x1 alpha'(D'')]`, all evaluated at `x2` on `e_i`.
pub fn der_jacobi_residual(
    a: &HomConformalAlgebra,
    d: &ConformalMap,
    d1: &ConformalMap,
    d2: &ConformalMap,
    i: usize,
) -> PolyVec {
    let r = a.rank();
    let lam = pvar(slot(0));
    let mu = pvar(slot(1));
    let theta = pvar(slot(2));
    let da = d.compose_alpha(a);
    let d1a = d1.compose_alpha(a);
    let d2a = d2.compose_alpha(a);
    let e_i = basis_elem(r, i);

    // inner commutator [X p X']_q(v) = X_p(X'_{q-p} v) - X'_{q-p}(X_p v)
    let comm_at = |x: &ConformalMap, p: &MultiPoly, y: &ConformalMap, q: &MultiPoly, v: &PolyVec| {
        let q_minus_p = q.sub(p);
        let t1 = x.apply_at(&y.apply_at(v, &q_minus_p), p);
        let t2 = y.apply_at(&x.apply_at(v, p), &q_minus_p);
        vec_sub(&t1, &t2)
    };

    // [alpha'(D) x0 [D' x1 D'']]_x2 (e_i)
    let inner_q = theta.sub(&lam);
    let inner = |v: &PolyVec| comm_at(d1, &mu, d2, &inner_q, v);
    let lhs = vec_sub(
        &da.apply_at(&inner(&e_i), &lam),
        &inner(&da.apply_at(&e_i, &lam)),
    );

    // [alpha'(D') x1 [D x0 D'']]_x2 (e_i)
    let inner_q2 = theta.sub(&mu);
    let inner2 = |v: &PolyVec| comm_at(d, &lam, d2, &inner_q2, v);
    let rhs1 = vec_sub(
        &d1a.apply_at(&inner2(&e_i), &mu),
        &inner2(&d1a.apply_at(&e_i, &mu)),
    );

    // [[D x0 D'] x0+x1 alpha'(D'')]_x2 (e_i)
    let nu = lam.add(&mu);
    let inner3 = |v: &PolyVec| comm_at(d, &lam, d1, &nu, v);
    let d2_shift = theta.sub(&nu);
    let rhs2 = vec_sub(
        &inner3(&d2a.apply_at(&e_i, &d2_shift)),
        &d2a.apply_at(&inner3(&e_i), &d2_shift),
    );

    vec_sub(&lhs, &vec_add(&rhs1, &rhs2))
}

fn monomials_d_x0(bound: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in 0..=bound {
        for b in 0..=(bound - a) {
            out.push(Monomial::from_pairs(vec![(PARTIAL, a), (slot(0), b)]));
        }
    }
    out
}

/// Exact basis of the alpha^k-derivations whose matrix entries have total
/// degree at most `degree_bound`.
pub fn solve_derivations(
    a: &HomConformalAlgebra,
    k: usize,
    degree_bound: u32,
) -> Vec<ConformalMap> {
    let r = a.rank();
    let monos = monomials_d_x0(degree_bound);
    let mut gens: Vec<ConformalMap> = Vec::new();
    for i in 0..r {
        for comp in 0..r {
            for m in &monos {
                let mut d = ConformalMap::zero(r, k);
                d.table[i][comp] = MultiPoly::term(scalar(1), m.clone());
                gens.push(d);
            }
        }
    }
    let residuals: Vec<Vec<MultiPoly>> = gens
        .iter()
        .map(|d| {
            let mut res = Vec::new();
            for i in 0..r {
                let lhs = d.apply(&mat_apply(&a.alpha, &basis_elem(r, i)), slot(0));
                res.extend(vec_sub(&lhs, &mat_apply(&a.alpha, &d.table[i])));
            }
            for i in 0..r {
                for j in 0..r {
                    res.extend(derivation_residual(a, d, k, i, j));
                }
            }
            res
        })
        .collect();
    nullspace_of_residuals(&residuals)
        .iter()
        .map(|c| {
            let mut acc = ConformalMap::zero(r, k);
            for (g, coeff) in gens.iter().zip(c) {
                acc = acc.add(&g.scale(&MultiPoly::constant(coeff.clone())));
            }
            acc
        })
        .collect()
}

/// The rank r+1 algebra `R + Q E` with `[E x0 e_i] = D(e_i)`,
/// `[e_i x0 E] = -D_{-x0-d}(e_i)`, `[E x0 E] = 0`, and the twist fixing `E`.
/// It satisfies the axioms exactly when `D` is an alpha-derivation.
pub fn derivation_extension(a: &HomConformalAlgebra, d: &ConformalMap) -> HomConformalAlgebra {
    let r = a.rank();
    let total = r + 1;
    let mut bracket = vec![vec![zero_vec(total); total]; total];
    let embed = |v: &PolyVec| -> PolyVec {
        let mut out = zero_vec(total);
        out[..r].clone_from_slice(v);
        out
    };
    for i in 0..r {
        for j in 0..r {
            bracket[i][j] = embed(&a.bracket[i][j]);
        }
        bracket[r][i] = embed(&d.table[i]);
        let skewed = d.apply_at(&basis_elem(r, i), &pvar(slot(0)).neg().sub(&pvar(PARTIAL)));
        bracket[i][r] = embed(&vec_neg(&skewed));
    }
    let mut alpha = vec![vec![MultiPoly::zero(); total]; total];
    for i in 0..r {
        for j in 0..r {
            alpha[i][j] = a.alpha[i][j].clone();
        }
    }
    alpha[r][r] = MultiPoly::one();
    HomConformalAlgebra {
        name: format!("{}+D", a.name),
        basis: a.basis.iter().cloned().chain(["E".to_string()]).collect(),
        bracket,
        alpha,
    }
}

/// The axioms the extension inherits from `D` alone: skew-symmetry,
/// multiplicativity of the extended twist, and the Hom Jacobi identity on
/// triples containing at most one copy of the new generator. These hold
/// exactly when `D` is an alpha-derivation. Jacobi triples with two copies
/// of the generator additionally require `D` to commute with itself under
/// the conformal commutator, which is a strictly stronger condition (it
/// already fails for the inner derivation of the Virasoro algebra), so the
/// full axiom check is not equivalent to the derivation property.
pub fn extension_axioms_hold(a: &HomConformalAlgebra, d: &ConformalMap) -> bool {
    let ext = derivation_extension(a, d);
    let rep = ext.check_algebra();
    if !rep.skew || !rep.multiplicative {
        return false;
    }
    let r = a.rank();
    for i in 0..=r {
        for j in 0..=r {
            for k in 0..=r {
                let copies = [i, j, k].iter().filter(|&&x| x == r).count();
                if copies > 1 {
                    continue;
                }
                if !vec_is_zero(&ext.hom_jacobi_residual(i, j, k)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FRESH2;
    use crate::linalg::in_span;
    use crate::samples;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn map_from_entries(entries: Vec<PolyVec>, level: usize) -> ConformalMap {
        ConformalMap {
            level,
            table: entries,
        }
    }

    #[test]
    fn apply_is_conformal_linear() {
        let mut d = ConformalMap::zero(1, 0);
        d.table[0][0] = MultiPoly::one(); // D(L) = L
        let dl = vec![pvar(PARTIAL)];
        let out = d.apply(&dl, slot(0));
        assert_eq!(out[0], pvar(PARTIAL).add(&pvar(slot(0))));
        assert!(vec_is_zero(&ConformalMap::zero(1, 0).apply(&dl, slot(0))));
        // (dD)_x0 v = -x0 D_x0 v
        let v = vec![pvar(PARTIAL).pow(2)];
        let lhs = d.partial_map().apply(&v, slot(0));
        let rhs = vec_scale(&d.apply(&v, slot(0)), &pvar(slot(0)).neg());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inner_derivations_pass_level_k_plus_one() {
        let a = samples::virasoro();
        let d = inner_derivation(&a, &basis_elem(1, 0), 0).unwrap();
        assert_eq!(d.table[0], a.bracket[0][0]);
        assert!(is_alpha_k_derivation(&a, &d, 1));

        let a = samples::rank2();
        for k in [0usize, 1] {
            let d = inner_derivation(&a, &basis_elem(2, 0), k).unwrap();
            assert!(is_alpha_k_derivation(&a, &d, k + 1));
        }
        // e2 is not fixed by alpha
        assert!(inner_derivation(&a, &basis_elem(2, 1), 0).is_err());

        let ab = samples::abelian_diag(&[1, 1]);
        let d = inner_derivation(&ab, &basis_elem(2, 0), 0).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn identity_map_is_not_a_derivation_on_rank2() {
        let a = samples::rank2();
        let d = map_from_entries(vec![basis_elem(2, 0), basis_elem(2, 1)], 0);
        assert!(commutes_with_alpha(&a, &d));
        assert!(!is_alpha_k_derivation(&a, &d, 0));
        let res = derivation_residual(&a, &d, 0, 0, 1);
        assert!(!vec_is_zero(&res));
    }

    #[test]
    fn solver_dimensions() {
        let ab = samples::abelian_diag(&[1]);
        let basis = solve_derivations(&ab, 0, 1);
        assert_eq!(basis.len(), 3); // entries 1, d, x0

        let a = samples::virasoro();
        let basis = solve_derivations(&a, 0, 2);
        assert!(!basis.is_empty());
        let inner = inner_derivation(&a, &basis_elem(1, 0), 0).unwrap();
        let flat: Vec<Vec<MultiPoly>> = basis.iter().map(|d| d.flatten()).collect();
        assert!(in_span(&flat, &inner.flatten()));
        for d in &basis {
            assert!(is_alpha_k_derivation(&a, d, 0));
        }
    }

    #[test]
    fn commutators_close_and_skew() {
        let a = samples::rank2();
        let b0 = solve_derivations(&a, 0, 1);
        let b1 = solve_derivations(&a, 1, 1);
        for d in &b0 {
            for e in &b1 {
                let c = commutator(d, e);
                assert!(two_slot_is_derivation(&a, &c, 1));
                // skew: [D' x1-x0 D] evaluated after the parameter flip
                let rev = commutator(e, d);
                let flipped: Vec<PolyVec> = rev
                    .table
                    .iter()
                    .map(|v| {
                        vec_substitute(v, slot(0), &pvar(slot(1)).sub(&pvar(slot(0))))
                    })
                    .collect();
                for (x, y) in c.table.iter().zip(&flipped) {
                    assert!(vec_is_zero(&vec_add(x, y)));
                }
            }
        }
    }

    #[test]
    fn derivation_algebra_jacobi_on_seeded_triples() {
        let a = samples::virasoro();
        let basis = solve_derivations(&a, 0, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pick = |rng: &mut ChaCha8Rng, basis: &[ConformalMap]| {
            let mut acc = ConformalMap::zero(1, 0);
            for d in basis {
                let c: i64 = rng.gen_range(-2..=2);
                acc = acc.add(&d.scale(&MultiPoly::int(c)));
            }
            acc
        };
        for _ in 0..5 {
            let d = pick(&mut rng, &basis);
            let e = pick(&mut rng, &basis);
            let f = pick(&mut rng, &basis);
            assert!(vec_is_zero(&der_jacobi_residual(&a, &d, &e, &f, 0)));
        }
    }

    #[test]
    fn extension_iff_derivation() {
        let a = samples::virasoro();
        // zero map extends; E is central
        let ext = derivation_extension(&a, &ConformalMap::zero(1, 0));
        assert!(ext.check_algebra().axioms_hold());
        assert!(!ext.center(1).is_empty());

        // an inner alpha-derivation satisfies the inherited axioms, but its
        // extension fails the Jacobi triple with two copies of E: that triple
        // demands D to self-commute, which the inner derivation does not
        let d = inner_derivation(&a, &basis_elem(1, 0), 0).unwrap();
        assert!(is_alpha_k_derivation(&a, &d, 1));
        assert!(extension_axioms_hold(&a, &d));
        let ext = derivation_extension(&a, &d);
        assert!(!ext.check_algebra().axioms_hold());
        assert!(!commutator(&d, &d).is_zero());

        // a self-commuting derivation extends to a full Hom-Lie structure
        let ab = samples::abelian_diag(&[1, 1]);
        let idm = map_from_entries(vec![basis_elem(2, 0), basis_elem(2, 1)], 0);
        assert!(is_alpha_k_derivation(&ab, &idm, 1));
        assert!(commutator(&idm, &idm).is_zero());
        let ext = derivation_extension(&ab, &idm);
        assert!(ext.check_algebra().axioms_hold());

        // a non-derivation fails the extension axioms
        let a2 = samples::rank2();
        let bad = map_from_entries(vec![basis_elem(2, 0), basis_elem(2, 1)], 0);
        assert!(!is_alpha_k_derivation(&a2, &bad, 1));
        assert!(!extension_axioms_hold(&a2, &bad));
        assert!(!derivation_extension(&a2, &bad).check_algebra().axioms_hold());
    }

    #[test]
    fn two_slot_map_unused_fresh() {
        // commutator tables never leak scratch slots
        let a = samples::virasoro();
        let basis = solve_derivations(&a, 0, 2);
        for d in &basis {
            let c = commutator(d, d);
            for v in &c.table {
                for p in v {
                    assert!(!p.uses_var(FRESH) && !p.uses_var(FRESH2));
                }
            }
        }
    }
}
