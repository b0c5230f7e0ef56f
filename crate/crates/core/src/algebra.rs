//! Finite-rank Hom-Lie conformal algebras and their modules: structure
//! constant tables, the sesquilinear extension of the lambda bracket, axiom
//! checkers, adjoint and twisted adjoint modules, semidirect sums, and exact
//! center computation on degree-truncated slices.
//!
//! Conventions used throughout the crate:
//! * an element of the algebra is a `PolyVec`: one polynomial in `d` per
//!   basis vector;
//! * a lambda expression stores its lambda variables as slot variables; a
//!   one-slot value (a bracket `[a x0 b]`, a module action, a map image)
//!   always uses `x0`;
//! * two-slot identities use `x0` for the outer lambda and `x1` for mu;
//! * slots `x8` and up are scratch space for intermediate substitutions and
//!   never appear in stored tables.

use serde::Serialize;

use crate::error::Error;
use crate::linalg::nullspace_of_residuals;
use crate::poly::{pvar, slot, MultiPoly, Scalar, VarId, PARTIAL};

/// Coefficient vector against a fixed basis. Elements of the algebra (or a
/// module) use polynomials in `d` only; lambda expressions also use slots.
pub type PolyVec = Vec<MultiPoly>;

/// Scratch slots for intermediate substitutions.
pub const FRESH: VarId = slot(12);
pub const FRESH2: VarId = slot(13);
pub const FRESH3: VarId = slot(14);

pub fn zero_vec(rank: usize) -> PolyVec {
    vec![MultiPoly::zero(); rank]
}

pub fn basis_elem(rank: usize, i: usize) -> PolyVec {
    let mut v = zero_vec(rank);
    v[i] = MultiPoly::one();
    v
}

pub fn vec_add(a: &[MultiPoly], b: &[MultiPoly]) -> PolyVec {
    a.iter().zip(b).map(|(p, q)| p.add(q)).collect()
}

pub fn vec_sub(a: &[MultiPoly], b: &[MultiPoly]) -> PolyVec {
    a.iter().zip(b).map(|(p, q)| p.sub(q)).collect()
}

pub fn vec_neg(a: &[MultiPoly]) -> PolyVec {
    a.iter().map(|p| p.neg()).collect()
}

pub fn vec_scale(a: &[MultiPoly], p: &MultiPoly) -> PolyVec {
    a.iter().map(|q| q.mul(p)).collect()
}

pub fn vec_is_zero(a: &[MultiPoly]) -> bool {
    a.iter().all(|p| p.is_zero())
}

pub fn vec_substitute(a: &[MultiPoly], v: VarId, r: &MultiPoly) -> PolyVec {
    a.iter().map(|p| p.substitute(v, r)).collect()
}

pub fn vec_substitute_sim(a: &[MultiPoly], subs: &[(VarId, MultiPoly)]) -> PolyVec {
    a.iter().map(|p| p.substitute_sim(subs)).collect()
}

pub fn vec_rename(a: &[MultiPoly], map: &[(VarId, VarId)]) -> PolyVec {
    a.iter().map(|p| p.rename(map)).collect()
}

/// Apply a polynomial matrix to a coefficient vector: `(M v)_i = sum_j M[i][j] v_j`.
pub fn mat_apply(mat: &[Vec<MultiPoly>], v: &[MultiPoly]) -> PolyVec {
    mat.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(MultiPoly::zero(), |acc, (m, x)| acc.add(&m.mul(x)))
        })
        .collect()
}

pub fn mat_identity(rank: usize) -> Vec<Vec<MultiPoly>> {
    (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| if i == j { MultiPoly::one() } else { MultiPoly::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<MultiPoly>], b: &[Vec<MultiPoly>]) -> Vec<Vec<MultiPoly>> {
    let n = a.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(MultiPoly::zero(), |acc, l| acc.add(&a[i][l].mul(&b[l][j])))
                })
                .collect()
        })
        .collect()
}

/// Determinant by Laplace expansion; ranks in this crate are small.
pub fn mat_det(mat: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = mat.len();
    if n == 0 {
        return MultiPoly::one();
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut det = MultiPoly::zero();
    for j in 0..n {
        if mat[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = mat[0][j].mul(&mat_det(&minor));
        det = if j % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

/// Inverse of a polynomial matrix whose determinant is a nonzero constant
/// (the units of `Q[d]`), via the adjugate.
pub fn mat_inverse(mat: &[Vec<MultiPoly>]) -> Result<Vec<Vec<MultiPoly>>, Error> {
    let n = mat.len();
    let det = mat_det(mat);
    if !det.is_constant() || det.is_zero() {
        return Err(Error::NonInvertibleAlpha {
            det: det.to_string(),
        });
    }
    let inv_det = {
        use num_traits::One;
        Scalar::one() / det.constant_coeff()
    };
    let mut inv = vec![vec![MultiPoly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<MultiPoly>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| mat[r][c].clone())
                        .collect()
                })
                .collect();
            let mut cof = mat_det(&minor);
            if (i + j) % 2 == 1 {
                cof = cof.neg();
            }
            inv[j][i] = cof.scale(&inv_det);
        }
    }
    Ok(inv)
}

/// A finite-rank Hom-Lie conformal algebra given by structure constants.
///
/// `bracket[i][j]` is the value `[e_i x0 e_j]` as a lambda expression in the
/// slot `x0`; `alpha[i][j]` is the coefficient of `e_i` in `alpha(e_j)`, a
/// polynomial in `d` (so `alpha` commutes with `d` by construction).
#[derive(Clone, Debug, PartialEq)]
pub struct HomConformalAlgebra {
    pub name: String,
    pub basis: Vec<String>,
    pub bracket: Vec<Vec<PolyVec>>,
    pub alpha: Vec<Vec<MultiPoly>>,
}

/// A finite module over a Hom-Lie conformal algebra.
///
/// `act[i][j]` is the action of `e_i` on the module basis vector `f_j`, a
/// module-valued lambda expression in `x0`; `beta[i][j]` mirrors `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalModule {
    pub basis: Vec<String>,
    pub act: Vec<Vec<PolyVec>>,
    pub beta: Vec<Vec<MultiPoly>>,
}

/// First falsifying instance of an axiom check.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub indices: Vec<usize>,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub skew: bool,
    pub hom_jacobi: bool,
    pub multiplicative: bool,
    pub regular: bool,
    pub skew_failure: Option<Failure>,
    pub jacobi_failure: Option<Failure>,
    pub multiplicative_failure: Option<Failure>,
}

impl AlgebraReport {
    pub fn axioms_hold(&self) -> bool {
        self.skew && self.hom_jacobi && self.multiplicative
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleReport {
    pub mo1: bool,
    pub mo2: bool,
    pub mo3: bool,
    pub mo1_failure: Option<Failure>,
    pub mo3_failure: Option<Failure>,
}

impl ModuleReport {
    pub fn axioms_hold(&self) -> bool {
        self.mo1 && self.mo2 && self.mo3
    }
}

impl HomConformalAlgebra {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Abelian algebra of the given rank with the supplied twist matrix.
    pub fn abelian(rank: usize, alpha: Vec<Vec<MultiPoly>>) -> Self {
        HomConformalAlgebra {
            name: "abelian".into(),
            basis: (0..rank).map(|i| format!("e{}", i + 1)).collect(),
            bracket: vec![vec![zero_vec(rank); rank]; rank],
            alpha,
        }
    }

    pub fn apply_alpha(&self, v: &[MultiPoly]) -> PolyVec {
        mat_apply(&self.alpha, v)
    }

    /// `alpha^s`; negative powers require a regular algebra.
    pub fn alpha_power(&self, s: i64) -> Result<Vec<Vec<MultiPoly>>, Error> {
        let base = if s >= 0 {
            self.alpha.clone()
        } else {
            mat_inverse(&self.alpha)?
        };
        let mut out = mat_identity(self.rank());
        for _ in 0..s.unsigned_abs() {
            out = mat_mul(&out, &base);
        }
        Ok(out)
    }

    pub fn det_alpha(&self) -> MultiPoly {
        mat_det(&self.alpha)
    }

    /// Regular means `alpha` is invertible over `Q[d]`, i.e. its determinant
    /// is a nonzero constant.
    pub fn is_regular(&self) -> bool {
        let det = self.det_alpha();
        det.is_constant() && !det.is_zero()
    }

    /// Sesquilinear extension of the bracket to arbitrary elements:
    /// for `x = sum_i p_i e_i`, `y = sum_j q_j e_j`,
    /// `[x slot y] = sum_{i,j} p_i(-slot) q_j(d+slot) [e_i slot e_j]`.
    ///
    /// Slot variables already present in the coefficients of `x` and `y`
    /// pass through as scalars.
    pub fn extend_bracket(&self, x: &[MultiPoly], y: &[MultiPoly], at: VarId) -> PolyVec {
        extend_table(&self.bracket, self.rank(), x, y, at)
    }

    /// `-[e_j mu e_i]` with `mu -> -d - x0`: the skew-symmetry image of the
    /// `(i, j)` structure constant.
    pub fn substitute_skew(&self, i: usize, j: usize) -> PolyVec {
        let mu_image = pvar(PARTIAL).neg().sub(&pvar(slot(0)));
        vec_neg(&vec_substitute(&self.bracket[j][i], slot(0), &mu_image))
    }

    pub fn check_algebra(&self) -> AlgebraReport {
        let r = self.rank();
        let lam = slot(0);

        let mut skew = true;
        let mut skew_failure = None;
        for i in 0..r {
            for j in 0..r {
                let res = vec_sub(&self.bracket[i][j], &self.substitute_skew(i, j));
                if !vec_is_zero(&res) {
                    skew = false;
                    skew_failure.get_or_insert(Failure {
                        indices: vec![i, j],
                        residual: format_combo(&self.basis, &res),
                    });
                }
            }
        }

        let mut hom_jacobi = true;
        let mut jacobi_failure = None;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let res = self.hom_jacobi_residual(i, j, k);
                    if !vec_is_zero(&res) {
                        hom_jacobi = false;
                        jacobi_failure.get_or_insert(Failure {
                            indices: vec![i, j, k],
                            residual: format_combo(&self.basis, &res),
                        });
                    }
                }
            }
        }

        let mut multiplicative = true;
        let mut multiplicative_failure = None;
        for i in 0..r {
            for j in 0..r {
                let lhs = self.apply_alpha(&self.bracket[i][j]);
                let rhs = self.extend_bracket(
                    &self.apply_alpha(&basis_elem(r, i)),
                    &self.apply_alpha(&basis_elem(r, j)),
                    lam,
                );
                let res = vec_sub(&lhs, &rhs);
                if !vec_is_zero(&res) {
                    multiplicative = false;
                    multiplicative_failure.get_or_insert(Failure {
                        indices: vec![i, j],
                        residual: format_combo(&self.basis, &res),
                    });
                }
            }
        }

        AlgebraReport {
            skew,
            hom_jacobi,
            multiplicative,
            regular: self.is_regular(),
            skew_failure,
            jacobi_failure,
            multiplicative_failure,
        }
    }

    /// `[alpha(e_i) x0 [e_j x1 e_k]] - [[e_i x0 e_j] x0+x1 alpha(e_k)]
    ///  - [alpha(e_j) x1 [e_i x0 e_k]]`, identically zero exactly when the
    /// Hom Jacobi identity holds on the triple.
    pub fn hom_jacobi_residual(&self, i: usize, j: usize, k: usize) -> PolyVec {
        let r = self.rank();
        let lam = slot(0);
        let mu = slot(1);
        let ai = self.apply_alpha(&basis_elem(r, i));
        let aj = self.apply_alpha(&basis_elem(r, j));
        let ak = self.apply_alpha(&basis_elem(r, k));

        let inner_jk = vec_rename(&self.bracket[j][k], &[(lam, mu)]);
        let lhs = self.extend_bracket(&ai, &inner_jk, lam);

        let nested = self.extend_bracket(&self.bracket[i][j], &ak, FRESH);
        let rhs1 = vec_substitute(&nested, FRESH, &pvar(lam).add(&pvar(mu)));

        let inner_ik = self.bracket[i][k].clone();
        let rhs2 = self.extend_bracket(&aj, &inner_ik, mu);

        vec_sub(&lhs, &vec_add(&rhs1, &rhs2))
    }

    /// The adjoint diagonal action: `R` as a module over itself.
    pub fn adjoint_module(&self) -> ConformalModule {
        ConformalModule {
            basis: self.basis.clone(),
            act: self.bracket.clone(),
            beta: self.alpha.clone(),
        }
    }

    /// The `alpha^s`-adjoint module `R_s`: action `[alpha^s(e_i) x0 e_j]`.
    pub fn alpha_power_adjoint(&self, s: i64) -> Result<ConformalModule, Error> {
        if s == 0 {
            return Ok(self.adjoint_module());
        }
        let pow = self.alpha_power(s)?;
        let r = self.rank();
        let act = (0..r)
            .map(|i| {
                let twisted = mat_apply(&pow, &basis_elem(r, i));
                (0..r)
                    .map(|j| self.extend_bracket(&twisted, &basis_elem(r, j), slot(0)))
                    .collect()
            })
            .collect();
        Ok(ConformalModule {
            basis: self.basis.clone(),
            act,
            beta: self.alpha.clone(),
        })
    }

    /// Semidirect sum `R (+) M` with bracket
    /// `[(a+u) x0 (b+v)] = [a x0 b] + a.v - b_{-d-x0}.u` and the block
    /// diagonal twist `alpha (+) beta`.
    pub fn semidirect_sum(&self, m: &ConformalModule) -> HomConformalAlgebra {
        let r = self.rank();
        let mr = m.rank();
        let total = r + mr;
        let mu_image = pvar(PARTIAL).neg().sub(&pvar(slot(0)));
        let mut bracket = vec![vec![zero_vec(total); total]; total];
        let embed_alg = |v: &PolyVec| -> PolyVec {
            let mut out = zero_vec(total);
            out[..r].clone_from_slice(v);
            out
        };
        let embed_mod = |v: &PolyVec| -> PolyVec {
            let mut out = zero_vec(total);
            out[r..].clone_from_slice(v);
            out
        };
        for i in 0..r {
            for j in 0..r {
                bracket[i][j] = embed_alg(&self.bracket[i][j]);
            }
            for j in 0..mr {
                // e_i acting on f_j
                bracket[i][r + j] = embed_mod(&m.act[i][j]);
                // [f_j x0 e_i] = -(e_i)_{-d-x0}.f_j
                bracket[r + j][i] =
                    embed_mod(&vec_neg(&vec_substitute(&m.act[i][j], slot(0), &mu_image)));
            }
        }
        let mut alpha = vec![vec![MultiPoly::zero(); total]; total];
        for i in 0..r {
            for j in 0..r {
                alpha[i][j] = self.alpha[i][j].clone();
            }
        }
        for i in 0..mr {
            for j in 0..mr {
                alpha[r + i][r + j] = m.beta[i][j].clone();
            }
        }
        HomConformalAlgebra {
            name: format!("{}+module", self.name),
            basis: self
                .basis
                .iter()
                .cloned()
                .chain(m.basis.iter().map(|b| format!("m_{b}")))
                .collect(),
            bracket,
            alpha,
        }
    }

    /// Coefficients of `x0^n / n!` in `[x x0 y]` for `n = 0..=max_n`.
    pub fn n_products(&self, x: &[MultiPoly], y: &[MultiPoly], max_n: u32) -> Vec<PolyVec> {
        let full = self.extend_bracket(x, y, slot(0));
        let mut factorial = Scalar::from_integer(1.into());
        let mut out = Vec::new();
        for n in 0..=max_n {
            if n > 0 {
                factorial *= Scalar::from_integer((n as i64).into());
            }
            let coeff: PolyVec = full
                .iter()
                .map(|p| p.coeff_of(slot(0), n).scale(&factorial))
                .collect();
            out.push(coeff);
        }
        out
    }

    /// Exact basis of the degree-truncated center slice
    /// `{a : deg <= bound, [a x0 e_j] = 0 for all j}`.
    pub fn center(&self, degree_bound: u32) -> Vec<PolyVec> {
        let r = self.rank();
        let gens: Vec<PolyVec> = (0..r)
            .flat_map(|i| {
                (0..=degree_bound).map(move |p| (i, p))
            })
            .map(|(i, p)| {
                let mut v = zero_vec(r);
                v[i] = pvar(PARTIAL).pow(p);
                v
            })
            .collect();
        let residuals: Vec<Vec<MultiPoly>> = gens
            .iter()
            .map(|g| {
                let mut res = Vec::new();
                for j in 0..r {
                    res.extend(self.extend_bracket(g, &basis_elem(r, j), slot(0)));
                }
                res
            })
            .collect();
        let combos = nullspace_of_residuals(&residuals);
        combos
            .iter()
            .map(|c| combine(&gens, c))
            .collect()
    }
}

impl ConformalModule {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn zero_module(algebra_rank: usize, rank: usize, beta: Vec<Vec<MultiPoly>>) -> Self {
        ConformalModule {
            basis: (0..rank).map(|i| format!("f{}", i + 1)).collect(),
            act: vec![vec![zero_vec(rank); rank]; algebra_rank],
            beta,
        }
    }

    pub fn apply_beta(&self, v: &[MultiPoly]) -> PolyVec {
        mat_apply(&self.beta, v)
    }

    /// Sesquilinear extension of the module action.
    pub fn extend_action(
        &self,
        algebra_rank: usize,
        x: &[MultiPoly],
        v: &[MultiPoly],
        at: VarId,
    ) -> PolyVec {
        assert_eq!(x.len(), algebra_rank);
        extend_table(&self.act, self.rank(), x, v, at)
    }
}

/// Shared extension kernel for brackets and module actions:
/// `sum_{i,j} x_i(-at) y_j(d+at) table[i][j](d, at)`.
fn extend_table(
    table: &[Vec<PolyVec>],
    out_rank: usize,
    x: &[MultiPoly],
    y: &[MultiPoly],
    at: VarId,
) -> PolyVec {
    let neg_at = pvar(at).neg();
    let d_plus_at = pvar(PARTIAL).add(&pvar(at));
    let mut out = zero_vec(out_rank);
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let xi_sub = xi.substitute(PARTIAL, &neg_at);
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let yj_sub = yj.substitute(PARTIAL, &d_plus_at);
            let factor = xi_sub.mul(&yj_sub);
            let entry = if at == slot(0) {
                table[i][j].clone()
            } else {
                vec_rename(&table[i][j], &[(slot(0), at)])
            };
            out = vec_add(&out, &vec_scale(&entry, &factor));
        }
    }
    out
}

/// Verify the module axioms (mo1)-(mo3) on all basis tuples.
pub fn check_module(a: &HomConformalAlgebra, m: &ConformalModule) -> ModuleReport {
    let r = a.rank();
    let mr = m.rank();
    let lam = slot(0);
    let mu = slot(1);

    let mut mo1 = true;
    let mut mo1_failure = None;
    for i in 0..r {
        for j in 0..r {
            for v in 0..mr {
                let ai = a.apply_alpha(&basis_elem(r, i));
                let aj = a.apply_alpha(&basis_elem(r, j));
                let inner_jv = vec_rename(&m.act[j][v], &[(lam, mu)]);
                let lhs1 = m.extend_action(r, &ai, &inner_jv, lam);
                let lhs2 = m.extend_action(r, &aj, &m.act[i][v], mu);
                let bv = m.apply_beta(&basis_elem(mr, v));
                let nested = m.extend_action(r, &a.bracket[i][j], &bv, FRESH);
                let rhs = vec_substitute(&nested, FRESH, &pvar(lam).add(&pvar(mu)));
                let res = vec_sub(&vec_sub(&lhs1, &lhs2), &rhs);
                if !vec_is_zero(&res) {
                    mo1 = false;
                    mo1_failure.get_or_insert(Failure {
                        indices: vec![i, j, v],
                        residual: format_combo(&m.basis, &res),
                    });
                }
            }
        }
    }

    // (mo2) holds structurally for the sesquilinear extension; assert it on
    // basis pairs anyway.
    let mut mo2 = true;
    for i in 0..r {
        for j in 0..mr {
            let mut de_i = zero_vec(r);
            de_i[i] = pvar(PARTIAL);
            let lhs = m.extend_action(r, &de_i, &basis_elem(mr, j), lam);
            let rhs = vec_scale(&m.act[i][j], &pvar(lam).neg());
            if !vec_is_zero(&vec_sub(&lhs, &rhs)) {
                mo2 = false;
            }
            let mut df_j = zero_vec(mr);
            df_j[j] = pvar(PARTIAL);
            let lhs = m.extend_action(r, &basis_elem(r, i), &df_j, lam);
            let rhs = vec_scale(&m.act[i][j], &pvar(PARTIAL).add(&pvar(lam)));
            if !vec_is_zero(&vec_sub(&lhs, &rhs)) {
                mo2 = false;
            }
        }
    }

    let mut mo3 = true;
    let mut mo3_failure = None;
    for i in 0..r {
        for j in 0..mr {
            let lhs = m.apply_beta(&m.act[i][j]);
            let ai = a.apply_alpha(&basis_elem(r, i));
            let bv = m.apply_beta(&basis_elem(mr, j));
            let rhs = m.extend_action(r, &ai, &bv, lam);
            let res = vec_sub(&lhs, &rhs);
            if !vec_is_zero(&res) {
                mo3 = false;
                mo3_failure.get_or_insert(Failure {
                    indices: vec![i, j],
                    residual: format_combo(&m.basis, &res),
                });
            }
        }
    }

    ModuleReport {
        mo1,
        mo2,
        mo3,
        mo1_failure,
        mo3_failure,
    }
}

/// Rational combination of generator vectors.
pub fn combine(gens: &[PolyVec], coeffs: &[Scalar]) -> PolyVec {
    let rank = gens.first().map(|g| g.len()).unwrap_or(0);
    let mut out = zero_vec(rank);
    for (g, c) in gens.iter().zip(coeffs) {
        out = vec_add(&out, &vec_scale(g, &MultiPoly::constant(c.clone())));
    }
    out
}

/// Render a coefficient vector as `(poly)*name + ...`.
pub fn format_combo(basis: &[String], v: &[MultiPoly]) -> String {
    let mut parts = Vec::new();
    for (name, p) in basis.iter().zip(v) {
        if p.is_zero() {
            continue;
        }
        if p == &MultiPoly::one() {
            parts.push(name.clone());
        } else if p.num_terms() == 1 {
            parts.push(format!("{p}*{name}"));
        } else {
            parts.push(format!("({p})*{name}"));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar;
    use crate::samples;

    #[test]
    fn virasoro_sesquilinearity() {
        let a = samples::virasoro();
        let mut dl = zero_vec(1);
        dl[0] = pvar(PARTIAL);
        let l = basis_elem(1, 0);
        // [dL x0 L] = -x0 (d + 2 x0) L
        let lhs = a.extend_bracket(&dl, &l, slot(0));
        let expect = vec_scale(&a.bracket[0][0], &pvar(slot(0)).neg());
        assert_eq!(lhs, expect);
        // [L x0 dL] = (d + x0)(d + 2 x0) L
        let lhs = a.extend_bracket(&l, &dl, slot(0));
        let expect = vec_scale(&a.bracket[0][0], &pvar(PARTIAL).add(&pvar(slot(0))));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn abelian_bracket_vanishes() {
        let a = samples::abelian_diag(&[2, 3]);
        let x = vec![pvar(PARTIAL), MultiPoly::one()];
        let y = vec![MultiPoly::one(), pvar(PARTIAL).pow(2)];
        assert!(vec_is_zero(&a.extend_bracket(&x, &y, slot(0))));
    }

    #[test]
    fn virasoro_skew_image() {
        let a = samples::virasoro();
        // -[L mu L] at mu = -d-x0 reproduces (d + 2 x0) L
        assert_eq!(a.substitute_skew(0, 0), a.bracket[0][0]);
        // a perturbed bracket (d + 3 x0) L is not skew: image is (2d + 3 x0) L
        let mut bad = a.clone();
        bad.bracket[0][0][0] = pvar(PARTIAL).add(&pvar(slot(0)).scale(&scalar(3)));
        let img = bad.substitute_skew(0, 0);
        let expect = pvar(PARTIAL)
            .scale(&scalar(2))
            .add(&pvar(slot(0)).scale(&scalar(3)));
        assert_eq!(img[0], expect);
        assert!(!bad.check_algebra().skew);
    }

    #[test]
    fn check_algebra_on_samples() {
        let rep = samples::virasoro().check_algebra();
        assert!(rep.skew && rep.hom_jacobi && rep.multiplicative && rep.regular);

        let rep = samples::rank2().check_algebra();
        assert!(rep.skew && rep.hom_jacobi && rep.multiplicative && rep.regular);

        let rep = samples::abelian_diag(&[1, 2, 3]).check_algebra();
        assert!(rep.skew && rep.hom_jacobi && rep.multiplicative && rep.regular);
    }

    #[test]
    fn failure_report_carries_residual() {
        let mut bad = samples::virasoro();
        bad.bracket[0][0][0] = pvar(PARTIAL).add(&pvar(slot(0)).scale(&scalar(3)));
        let rep = bad.check_algebra();
        assert!(!rep.skew);
        let f = rep.skew_failure.unwrap();
        assert_eq!(f.indices, vec![0, 0]);
        assert!(!f.residual.is_empty() && f.residual != "0");
    }

    #[test]
    fn adjoint_and_twisted_adjoint() {
        let a = samples::virasoro();
        let m = a.adjoint_module();
        assert_eq!(m.act[0][0], a.bracket[0][0]);
        assert!(check_module(&a, &m).axioms_hold());

        let a = samples::rank2();
        for s in [0i64, 1, 2, -1] {
            let m = a.alpha_power_adjoint(s).unwrap();
            assert!(check_module(&a, &m).axioms_hold(), "s = {s}");
        }
        // s = 1: action of e1 on e2 is [alpha(e1) x0 e2] = e2
        let m = a.alpha_power_adjoint(1).unwrap();
        assert_eq!(m.act[0][1], basis_elem(2, 1));
    }

    #[test]
    fn negative_power_needs_regular() {
        let mut alpha = mat_identity(1);
        alpha[0][0] = pvar(PARTIAL); // det = d, not a unit
        let a = HomConformalAlgebra::abelian(1, alpha);
        assert!(a.alpha_power_adjoint(-1).is_err());
        let b = samples::abelian_diag(&[2]);
        let m = b.alpha_power_adjoint(-1).unwrap();
        assert!(check_module(&b, &m).axioms_hold());
    }

    #[test]
    fn wrong_beta_fails_module_check() {
        let a = samples::virasoro();
        let mut m = a.adjoint_module();
        m.beta = vec![vec![MultiPoly::zero()]];
        let rep = check_module(&a, &m);
        assert!(!rep.axioms_hold());
        assert!(!rep.mo1);
    }

    #[test]
    fn semidirect_sums_pass() {
        let a = samples::virasoro();
        let sd = a.semidirect_sum(&a.adjoint_module());
        assert_eq!(sd.rank(), 2);
        assert!(sd.check_algebra().axioms_hold());

        let a = samples::rank2();
        let sd = a.semidirect_sum(&a.alpha_power_adjoint(1).unwrap());
        assert!(sd.check_algebra().axioms_hold());

        let ab = samples::abelian_diag(&[1, 1]);
        let sd = ab.semidirect_sum(&ConformalModule::zero_module(2, 1, mat_identity(1)));
        assert_eq!(sd.rank(), 3);
        assert!(sd.bracket.iter().flatten().all(|v| vec_is_zero(v)));
    }

    #[test]
    fn n_products_virasoro() {
        let a = samples::virasoro();
        let l = basis_elem(1, 0);
        let prods = a.n_products(&l, &l, 3);
        assert_eq!(prods[0], vec![pvar(PARTIAL)]); // (0)-product: dL
        assert_eq!(prods[1], vec![MultiPoly::int(2)]); // (1)-product: 2L
        assert!(vec_is_zero(&prods[2]));
        assert!(vec_is_zero(&prods[3]));
    }

    #[test]
    fn centers() {
        assert!(samples::virasoro().center(3).is_empty());
        assert!(samples::rank2().center(2).is_empty());
        let c = samples::abelian_diag(&[1, 1]).center(1);
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn center_elements_kill_random_elements() {
        let ab = samples::abelian_diag(&[2, 5]);
        for c in ab.center(2) {
            let y = vec![pvar(PARTIAL).pow(2), pvar(PARTIAL).add(&MultiPoly::int(3))];
            assert!(vec_is_zero(&ab.extend_bracket(&c, &y, slot(0))));
        }
    }

    #[test]
    fn skew_as_identity_on_general_elements() {
        let a = samples::rank2();
        let x = vec![pvar(PARTIAL), MultiPoly::int(2)];
        let y = vec![MultiPoly::one(), pvar(PARTIAL)];
        let lhs = a.extend_bracket(&x, &y, slot(0));
        let mu_image = pvar(PARTIAL).neg().sub(&pvar(slot(0)));
        let rhs = vec_neg(&vec_substitute(
            &a.extend_bracket(&y, &x, slot(0)),
            slot(0),
            &mu_image,
        ));
        assert_eq!(lhs, rhs);
    }
}
