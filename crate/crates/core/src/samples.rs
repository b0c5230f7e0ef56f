//! Small stock algebras used across tests and the fixture files.

use crate::algebra::{mat_identity, zero_vec, HomConformalAlgebra};
use crate::poly::{pvar, scalar, slot, MultiPoly, PARTIAL};

/// The Virasoro conformal algebra with the trivial twist:
/// `[L x0 L] = (d + 2 x0) L`, `alpha = id`.
pub fn virasoro() -> HomConformalAlgebra {
    let c = pvar(PARTIAL).add(&pvar(slot(0)).scale(&scalar(2)));
    HomConformalAlgebra {
        name: "virasoro".into(),
        basis: vec!["L".into()],
        bracket: vec![vec![vec![c]]],
        alpha: mat_identity(1),
    }
}

/// Abelian algebra with a constant diagonal twist.
pub fn abelian_diag(diag: &[i64]) -> HomConformalAlgebra {
    let rank = diag.len();
    let mut alpha = mat_identity(rank);
    for (i, &c) in diag.iter().enumerate() {
        alpha[i][i] = MultiPoly::int(c);
    }
    HomConformalAlgebra::abelian(rank, alpha)
}

/// Rank-2 multiplicative algebra with a nontrivial twist:
/// `[e1 x0 e2] = e2`, `[e2 x0 e1] = -e2`, `alpha = diag(1, 2)`.
pub fn rank2() -> HomConformalAlgebra {
    let mut bracket = vec![vec![zero_vec(2); 2]; 2];
    bracket[0][1][1] = MultiPoly::one();
    bracket[1][0][1] = MultiPoly::int(-1);
    let mut alpha = mat_identity(2);
    alpha[1][1] = MultiPoly::int(2);
    HomConformalAlgebra {
        name: "rank2".into(),
        basis: vec!["e1".into(), "e2".into()],
        bracket,
        alpha,
    }
}
