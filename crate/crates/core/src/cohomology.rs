//! n-cochains with coefficients in a module, the differential and its
//! twisted variant, the `(d + sum of lambdas)` action, and degree-truncated
//! basic/reduced cohomology dimensions.
//!
//! A cochain of arity n stores one module-valued lambda expression per
//! n-tuple of algebra basis indices, in slots `x0 .. x(n-1)`. Differentials
//! are computed exactly (no truncation); only solution-space searches are
//! degree-truncated.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{
    basis_elem, mat_apply, vec_add, vec_is_zero, vec_rename, vec_scale, vec_sub, vec_substitute,
    zero_vec, ConformalModule, HomConformalAlgebra, PolyVec, FRESH,
};
use crate::error::Error;
use crate::linalg::nullspace_of_residuals;
use crate::poly::{pvar, scalar, slot, Monomial, MultiPoly, Scalar, VarId, PARTIAL};

/// All n-tuples over `0..r`, in row-major order.
pub fn tuples(r: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

/// An n-cochain given by its table on basis tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub arity: usize,
    pub alg_rank: usize,
    pub mod_rank: usize,
    /// `alg_rank^arity` entries, row-major over basis tuples.
    pub table: Vec<PolyVec>,
}

impl Cochain {
    pub fn zero(arity: usize, alg_rank: usize, mod_rank: usize) -> Self {
        let size = alg_rank.pow(arity as u32);
        Cochain {
            arity,
            alg_rank,
            mod_rank,
            table: vec![zero_vec(mod_rank); size],
        }
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &i| acc * self.alg_rank + i)
    }

    pub fn entry(&self, tuple: &[usize]) -> &PolyVec {
        &self.table[self.index(tuple)]
    }

    pub fn entry_mut(&mut self, tuple: &[usize]) -> &mut PolyVec {
        let idx = self.index(tuple);
        &mut self.table[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| vec_is_zero(v))
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.arity, other.arity);
        Cochain {
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| vec_add(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.arity, other.arity);
        Cochain {
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| vec_sub(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        let p = MultiPoly::constant(c.clone());
        Cochain {
            table: self.table.iter().map(|v| vec_scale(v, &p)).collect(),
            ..self.clone()
        }
    }

    /// Concatenated table, for coordinate-frame linear algebra.
    pub fn flatten(&self) -> Vec<MultiPoly> {
        self.table.iter().flatten().cloned().collect()
    }

    /// Multilinear evaluation on arbitrary elements, with conformal
    /// antilinearity in each argument: `d` in argument m becomes `-x_m`.
    pub fn evaluate(&self, args: &[PolyVec]) -> PolyVec {
        let slots: Vec<VarId> = (0..self.arity as u32).map(slot).collect();
        self.evaluate_general(args, &slots)
    }

    /// Evaluation with caller-chosen argument slots. Argument coefficients
    /// may carry other slot variables, which pass through as scalars; the
    /// stored table slots are renamed (simultaneously) to `arg_slots`.
    pub fn evaluate_general(&self, args: &[PolyVec], arg_slots: &[VarId]) -> PolyVec {
        assert_eq!(args.len(), self.arity);
        assert_eq!(arg_slots.len(), self.arity);
        let rename: Vec<(VarId, VarId)> = (0..self.arity)
            .map(|m| (slot(m as u32), arg_slots[m]))
            .collect();
        let mut out = zero_vec(self.mod_rank);
        'tuple: for tuple in tuples(self.alg_rank, self.arity) {
            let mut factor = MultiPoly::one();
            for (m, &idx) in tuple.iter().enumerate() {
                let c = &args[m][idx];
                if c.is_zero() {
                    continue 'tuple;
                }
                factor = factor.mul(&c.substitute(PARTIAL, &pvar(arg_slots[m]).neg()));
            }
            if factor.is_zero() {
                continue;
            }
            let entry = vec_rename(self.entry(&tuple), &rename);
            out = vec_add(&out, &vec_scale(&entry, &factor));
        }
        out
    }
}

/// The two non-structural cochain conditions: skew-symmetry under
/// simultaneous adjacent transpositions, and `beta(gamma(...)) =
/// gamma(alpha(...), ...)`. At arity 0 the latter reads `beta(v) = v`.
pub fn is_cochain(a: &HomConformalAlgebra, m: &ConformalModule, g: &Cochain) -> bool {
    constraint_residuals(a, m, g).iter().all(|p| p.is_zero())
}

/// Residuals of the cochain conditions, concatenated; all identically zero
/// exactly when `g` is a cochain.
pub fn constraint_residuals(
    a: &HomConformalAlgebra,
    m: &ConformalModule,
    g: &Cochain,
) -> Vec<MultiPoly> {
    let mut out = Vec::new();
    let all = tuples(g.alg_rank, g.arity);
    // skew-symmetry: swapping adjacent arguments and their slots negates
    for p in 0..g.arity.saturating_sub(1) {
        let swap = [(slot(p as u32), slot(p as u32 + 1)), (slot(p as u32 + 1), slot(p as u32))];
        for tuple in &all {
            let mut swapped = tuple.clone();
            swapped.swap(p, p + 1);
            let other = vec_rename(g.entry(&swapped), &swap);
            out.extend(vec_add(g.entry(tuple), &other));
        }
    }
    // commutativity with the twists
    let alpha_cols: Vec<PolyVec> = (0..g.alg_rank)
        .map(|i| mat_apply(&a.alpha, &basis_elem(g.alg_rank, i)))
        .collect();
    let slots: Vec<VarId> = (0..g.arity as u32).map(slot).collect();
    for tuple in &all {
        let lhs = m.apply_beta(g.entry(tuple));
        let args: Vec<PolyVec> = tuple.iter().map(|&i| alpha_cols[i].clone()).collect();
        let rhs = g.evaluate_general(&args, &slots);
        out.extend(vec_sub(&lhs, &rhs));
    }
    out
}

/// The differential: for an n-cochain `g`,
/// `(dg)(a_1..a_{n+1}) = sum_i (-1)^{i+1} alpha^n(a_i) acting on g(..hat
/// i..) + sum_{i<j} (-1)^{i+j} g([a_i x_i a_j] at slot x_i+x_j, alpha of the
/// rest)`.
pub fn differential(a: &HomConformalAlgebra, m: &ConformalModule, g: &Cochain) -> Cochain {
    let n = g.arity;
    let r = g.alg_rank;
    let mut out = Cochain::zero(n + 1, r, g.mod_rank);
    let alpha_n = a
        .alpha_power(n as i64)
        .expect("nonnegative power always exists");
    let alpha_cols: Vec<PolyVec> = (0..r).map(|i| mat_apply(&a.alpha, &basis_elem(r, i))).collect();

    for tuple in tuples(r, n + 1) {
        let mut acc = zero_vec(g.mod_rank);
        // action terms
        for i in 0..=n {
            let x = mat_apply(&alpha_n, &basis_elem(r, tuple[i]));
            let mut rest = tuple.clone();
            rest.remove(i);
            // remaining slots keep their original names
            let rename: Vec<(VarId, VarId)> = (i..n)
                .map(|mm| (slot(mm as u32), slot(mm as u32 + 1)))
                .collect();
            let inner = vec_rename(g.entry(&rest), &rename);
            let term = m.extend_action(r, &x, &inner, slot(i as u32));
            acc = if i % 2 == 0 {
                vec_add(&acc, &term)
            } else {
                vec_sub(&acc, &term)
            };
        }
        // bracket terms
        for i in 0..=n {
            for j in (i + 1)..=n {
                let bracket = vec_rename(&a.bracket[tuple[i]][tuple[j]], &[(slot(0), slot(i as u32))]);
                let mut args = vec![bracket];
                let mut arg_slots = vec![FRESH];
                for (k, &idx) in tuple.iter().enumerate() {
                    if k == i || k == j {
                        continue;
                    }
                    args.push(alpha_cols[idx].clone());
                    arg_slots.push(slot(k as u32));
                }
                let val = g.evaluate_general(&args, &arg_slots);
                let merged = pvar(slot(i as u32)).add(&pvar(slot(j as u32)));
                let term = vec_substitute(&val, FRESH, &merged);
                acc = if (i + j) % 2 == 0 {
                    vec_add(&acc, &term)
                } else {
                    vec_sub(&acc, &term)
                };
            }
        }
        *out.entry_mut(&tuple) = acc;
    }
    out
}

/// The twisted differential on cochains with coefficients in the
/// `alpha^s`-adjoint module: the same two-sum formula with the action
/// `[alpha^{n+s}(a_i) x_i ...]`.
pub fn differential_s(a: &HomConformalAlgebra, g: &Cochain, s: i64) -> Result<Cochain, Error> {
    let m = a.alpha_power_adjoint(s)?;
    Ok(differential(a, &m, g))
}

/// `(d_M + sum of slots)` applied entry-wise.
pub fn partial_action(g: &Cochain) -> Cochain {
    let mut l = pvar(PARTIAL);
    for i in 0..g.arity as u32 {
        l = l.add(&pvar(slot(i)));
    }
    Cochain {
        table: g.table.iter().map(|v| vec_scale(v, &l)).collect(),
        ..g.clone()
    }
}

fn monomials_up_to(vars: &[VarId], bound: u32) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|m: Vec<(VarId, u32)>| {
                let used: u32 = m.iter().map(|&(_, p)| p).sum();
                (0..=(bound - used)).map(move |p| {
                    let mut mm = m.clone();
                    if p > 0 {
                        mm.push((v, p));
                    }
                    mm
                })
            })
            .collect();
    }
    out.into_iter().map(Monomial::from_pairs).collect()
}

/// Exact basis of the cochains whose entries have total degree at most
/// `degree_bound`, found by null-space of the linear cochain conditions.
pub fn cochain_space_basis(
    a: &HomConformalAlgebra,
    m: &ConformalModule,
    n: usize,
    degree_bound: u32,
) -> Vec<Cochain> {
    let r = a.rank();
    let mr = m.rank();
    let mut vars = vec![PARTIAL];
    vars.extend((0..n as u32).map(slot));
    let monos = monomials_up_to(&vars, degree_bound);

    let mut gens: Vec<Cochain> = Vec::new();
    for tuple in tuples(r, n) {
        for comp in 0..mr {
            for mono in &monos {
                let mut g = Cochain::zero(n, r, mr);
                g.entry_mut(&tuple)[comp] = MultiPoly::term(scalar(1), mono.clone());
                gens.push(g);
            }
        }
    }
    let residuals: Vec<Vec<MultiPoly>> = gens
        .iter()
        .map(|g| constraint_residuals(a, m, g))
        .collect();
    let combos = nullspace_of_residuals(&residuals);
    combos
        .iter()
        .map(|c| {
            let mut acc = Cochain::zero(n, r, mr);
            for (g, coeff) in gens.iter().zip(c) {
                acc = acc.add(&g.scale(coeff));
            }
            acc
        })
        .collect()
}

/// Random integer combination (coordinates in [-3, 3]) of a cochain basis.
pub fn random_cochain<R: Rng>(basis: &[Cochain], rng: &mut R) -> Option<Cochain> {
    let first = basis.first()?;
    let mut acc = Cochain::zero(first.arity, first.alg_rank, first.mod_rank);
    for g in basis {
        let c: i64 = rng.gen_range(-3..=3);
        acc = acc.add(&g.scale(&scalar(c)));
    }
    Some(acc)
}

/// Degree-truncated cohomology dimensions. All numbers refer to the slice of
/// cochains with entry degree at most `degree_bound`; for `reduced`, kernels
/// and images are taken modulo the `(d + sum of slots)`-multiples, detected
/// by exact divisibility (a cochain is such a multiple iff every entry
/// vanishes at `d = -sum of slots`).
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyDims {
    pub n: usize,
    pub degree_bound: u32,
    pub reduced: bool,
    pub dim_cochain_slice: usize,
    pub dim_kernel: usize,
    pub dim_image_from_below: usize,
    pub dim_h: usize,
}

pub fn cohomology_dims(
    a: &HomConformalAlgebra,
    m: &ConformalModule,
    n: usize,
    degree_bound: u32,
    reduced: bool,
) -> CohomologyDims {
    use crate::linalg::rank_of;

    let basis_n = cochain_space_basis(a, m, n, degree_bound);
    let basis_below = if n == 0 {
        Vec::new()
    } else {
        cochain_space_basis(a, m, n - 1, degree_bound)
    };
    let d_images: Vec<Vec<MultiPoly>> = basis_n
        .iter()
        .map(|g| differential(a, m, g).flatten())
        .collect();
    let d_below: Vec<Vec<MultiPoly>> = basis_below
        .iter()
        .map(|g| differential(a, m, g).flatten())
        .collect();

    // truncate an exact image vector to the slice: split each polynomial into
    // its degree <= bound part and the overflow
    let split = |v: &[MultiPoly]| -> (Vec<MultiPoly>, Vec<MultiPoly>) {
        let mut inside = Vec::with_capacity(v.len());
        let mut outside = Vec::with_capacity(v.len());
        for p in v {
            let mut lo = MultiPoly::zero();
            let mut hi = MultiPoly::zero();
            for (mono, c) in p.terms() {
                let t = MultiPoly::term(c.clone(), mono.clone());
                if mono.degree() <= degree_bound {
                    lo = lo.add(&t);
                } else {
                    hi = hi.add(&t);
                }
            }
            inside.push(lo);
            outside.push(hi);
        }
        (inside, outside)
    };

    if !reduced {
        let dim_kernel = basis_n.len() - rank_of(&d_images);
        // image-from-below, intersected with the slice: combinations of
        // d(basis below) whose overflow part cancels
        let outs: Vec<Vec<MultiPoly>> = d_below.iter().map(|v| split(v).1).collect();
        let dim_overflow_free = nullspace_of_residuals(&outs).len();
        let dim_total_kernel_below = basis_below.len() - rank_of(&d_below);
        let dim_image = dim_overflow_free - dim_total_kernel_below;
        return CohomologyDims {
            n,
            degree_bound,
            reduced,
            dim_cochain_slice: basis_n.len(),
            dim_kernel,
            dim_image_from_below: dim_image,
            // saturating: the image exceeds the kernel only when the input
            // fails the Jacobi axiom (d^2 != 0), where dim_h is meaningless
            dim_h: dim_kernel.saturating_sub(dim_image),
        };
    }

    // reduced: quotient by the (d + sum of slots)-multiples
    let eval_at = |g_flat: &[MultiPoly], arity: usize| -> Vec<MultiPoly> {
        let mut s = MultiPoly::zero();
        for i in 0..arity as u32 {
            s = s.add(&pvar(slot(i)));
        }
        let repl = s.neg();
        g_flat.iter().map(|p| p.substitute(PARTIAL, &repl)).collect()
    };

    // partial-multiples inside the slices at levels n and n+1 come exactly
    // from level bases at one degree lower
    let q_n = if degree_bound == 0 {
        0
    } else {
        cochain_space_basis(a, m, n, degree_bound - 1).len()
    };

    // gamma is a reduced cocycle iff d(gamma) is divisible by the linear form
    let red_residuals: Vec<Vec<MultiPoly>> = d_images
        .iter()
        .map(|v| eval_at(v, n + 1))
        .collect();
    let pre_kernel = basis_n.len() - rank_of(&red_residuals);
    let dim_kernel = pre_kernel.saturating_sub(q_n);

    // reduced image: d(below) truncated to the slice, modulo Q_n
    let q_basis: Vec<Vec<MultiPoly>> = if degree_bound == 0 {
        Vec::new()
    } else {
        cochain_space_basis(a, m, n, degree_bound - 1)
            .iter()
            .map(|g| partial_action(g).flatten())
            .collect()
    };
    let in_slice: Vec<Vec<MultiPoly>> = {
        let outs: Vec<Vec<MultiPoly>> = d_below.iter().map(|v| split(v).1).collect();
        nullspace_of_residuals(&outs)
            .iter()
            .map(|c| {
                let mut acc = vec![MultiPoly::zero(); d_images.first().map(|v| v.len()).unwrap_or(0)];
                for (v, coeff) in d_below.iter().zip(c) {
                    let scaled: Vec<MultiPoly> =
                        v.iter().map(|p| p.scale(coeff)).collect();
                    acc = acc.iter().zip(&scaled).map(|(x, y)| x.add(y)).collect();
                }
                acc
            })
            .collect()
    };
    let mut joint = q_basis.clone();
    joint.extend(in_slice);
    let dim_image = rank_of(&joint) - rank_of(&q_basis);

    CohomologyDims {
        n,
        degree_bound,
        reduced,
        dim_cochain_slice: basis_n.len() - q_n,
        dim_kernel,
        dim_image_from_below: dim_image,
        dim_h: dim_kernel.saturating_sub(dim_image),
    }
}
