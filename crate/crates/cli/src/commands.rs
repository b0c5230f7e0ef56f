//! Subcommand implementations: each builds a `Report` from core-library
//! predicates; the exit code is derived from `Report::all_pass` by the
//! binary, never computed here.

use std::fmt;
use std::fs;
use std::path::Path;

use conformal_core::algebra::{
    check_module, format_combo, ConformalModule, HomConformalAlgebra, PolyVec,
};
use conformal_core::cohomology::{cochain_space_basis, cohomology_dims, differential, partial_action, Cochain};
use conformal_core::deformation::{
    check_deformation, d_minus1_of_endo, endo_commutes_with_alpha, is_nijenhuis,
    is_trivial_deformation, search_nijenhuis,
};
use conformal_core::derivations::{
    commutator, commutes_with_alpha, is_alpha_k_derivation, solve_derivations,
    two_slot_is_derivation, ConformalMap, ExtensionRule,
};
use conformal_core::generalized::{
    breve_extension, bracket_closure_checks, centroid_qc_center_check, compute_complement,
    decompose_gder, gder_residual, is_centroid, is_central_derivation, is_generalized_derivation,
    is_quasicentroid, is_quasiderivation, phi_embedding, qc_bracket_vanishing, solve_space,
    SpaceKind,
};
use conformal_core::linalg::CoordFrame;
use conformal_core::poly::{slot, Monomial, MultiPoly, PARTIAL};

use crate::defs::{self, DefinitionFile, EndoFile};
use crate::report::Report;

/// Fixed default seed so repeated runs are byte-identical.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Def(defs::DefError),
    Core(String),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Def(e) => write!(f, "{e}"),
            CliError::Core(m) => write!(f, "{m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

impl From<defs::DefError> for CliError {
    fn from(e: defs::DefError) -> Self {
        CliError::Def(e)
    }
}

impl From<conformal_core::Error> for CliError {
    fn from(e: conformal_core::Error) -> Self {
        CliError::Core(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_definition(path: &Path) -> Result<DefinitionFile, CliError> {
    Ok(defs::parse_definition(&read_file(path)?)?)
}

pub fn load_endo(path: &Path, basis: &[String]) -> Result<EndoFile, CliError> {
    Ok(defs::parse_endo(&read_file(path)?, basis)?)
}

/// Resolve the module selector: `adjoint`, `alpha^S`, or `file` (the
/// `[module]` block of the definition file).
pub fn resolve_module(
    def: &DefinitionFile,
    spec: &str,
) -> Result<ConformalModule, CliError> {
    if spec == "adjoint" {
        return Ok(def.algebra.adjoint_module());
    }
    if spec == "file" {
        return def.module.clone().ok_or_else(|| {
            CliError::Usage("--module file requires a [module] block in the definition".into())
        });
    }
    if let Some(s) = spec.strip_prefix("alpha^") {
        let s: i64 = s
            .parse()
            .map_err(|_| CliError::Usage(format!("bad twist power in `{spec}`")))?;
        return Ok(def.algebra.alpha_power_adjoint(s)?);
    }
    Err(CliError::Usage(format!(
        "unknown module selector `{spec}` (expected adjoint, alpha^S, or file)"
    )))
}

fn algebra_checks(report: &mut Report, a: &HomConformalAlgebra) {
    let ar = a.check_algebra();
    report.check_residual(
        "algebra.skew",
        ar.skew,
        ar.skew_failure.as_ref().map(|f| f.residual.clone()),
    );
    report.check_residual(
        "algebra.hom_jacobi",
        ar.hom_jacobi,
        ar.jacobi_failure.as_ref().map(|f| f.residual.clone()),
    );
    report.check_residual(
        "algebra.multiplicative",
        ar.multiplicative,
        ar.multiplicative_failure.as_ref().map(|f| f.residual.clone()),
    );
    report.note(format!(
        "twist is {} (det = {})",
        if ar.regular { "regular" } else { "not regular" },
        a.det_alpha()
    ));
}

fn module_checks(report: &mut Report, a: &HomConformalAlgebra, m: &ConformalModule) {
    let mr = check_module(a, m);
    report.check_residual(
        "module.mo1",
        mr.mo1,
        mr.mo1_failure.as_ref().map(|f| f.residual.clone()),
    );
    report.check("module.mo2", mr.mo2);
    report.check_residual(
        "module.mo3",
        mr.mo3,
        mr.mo3_failure.as_ref().map(|f| f.residual.clone()),
    );
}

fn endo_cochain(table: &[PolyVec], rank: usize) -> Cochain {
    let mut f = Cochain::zero(1, rank, rank);
    for (i, v) in table.iter().enumerate() {
        *f.entry_mut(&[i]) = v.clone();
    }
    f
}

fn format_map(basis: &[String], table: &[PolyVec]) -> Vec<String> {
    table
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{} -> {}", basis[i], format_combo(basis, v)))
        .collect()
}

// ---------------------------------------------------------------------------
// subcommands

pub fn cmd_validate(path: &Path, seed: u64) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let mut report = Report::new("validate", seed);
    report.input("algebra", def.algebra.name.clone());
    report.dim("rank", def.algebra.rank());
    algebra_checks(&mut report, &def.algebra);
    if let Some(m) = &def.module {
        report.dim("module_rank", m.rank());
        module_checks(&mut report, &def.algebra, m);
    }
    Ok(report)
}

pub fn cmd_check_module(path: &Path, module: &str, seed: u64) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let m = resolve_module(&def, module)?;
    let mut report = Report::new("check-module", seed);
    report.input("algebra", def.algebra.name.clone());
    report.input("module", module);
    report.dim("module_rank", m.rank());
    algebra_checks(&mut report, &def.algebra);
    module_checks(&mut report, &def.algebra, &m);
    Ok(report)
}

pub fn cmd_semidirect(path: &Path, module: &str, seed: u64) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let m = resolve_module(&def, module)?;
    let sum = def.algebra.semidirect_sum(&m);
    let mut report = Report::new("semidirect", seed);
    report.input("algebra", def.algebra.name.clone());
    report.input("module", module);
    report.dim("sum_rank", sum.rank());
    algebra_checks(&mut report, &sum);
    Ok(report)
}

pub fn cmd_cohomology(
    path: &Path,
    module: &str,
    n: usize,
    degree_bound: u32,
    reduced: bool,
    seed: u64,
) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let m = resolve_module(&def, module)?;
    let mut report = Report::new("cohomology", seed);
    report.input("algebra", a.name.clone());
    report.input("module", module);
    report.input("n", n.to_string());
    report.input("reduced", reduced.to_string());
    report.degree_bound = Some(degree_bound);
    algebra_checks(&mut report, a);
    module_checks(&mut report, a, &m);

    let basis = cochain_space_basis(a, &m, n, degree_bound);
    let d_squared = basis
        .iter()
        .all(|g| differential(a, &m, &differential(a, &m, g)).is_zero());
    report.check("d_squared_zero_on_basis", d_squared);
    let d_partial = basis.iter().all(|g| {
        differential(a, &m, &partial_action(g))
            .sub(&partial_action(&differential(a, &m, g)))
            .is_zero()
    });
    report.check("d_commutes_with_partial", d_partial);

    let dims = cohomology_dims(a, &m, n, degree_bound, reduced);
    report.dim("cochain_slice", dims.dim_cochain_slice);
    report.dim("kernel", dims.dim_kernel);
    report.dim("image_from_below", dims.dim_image_from_below);
    report.dim("h", dims.dim_h);
    report.note(format!(
        "dimensions are truncated at entry degree {degree_bound}, not the full cohomology"
    ));
    Ok(report)
}

pub fn cmd_derive(
    path: &Path,
    k: usize,
    degree_bound: u32,
    check_closure: bool,
    seed: u64,
) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let mut report = Report::new("derive", seed);
    report.input("algebra", a.name.clone());
    report.input("k", k.to_string());
    report.degree_bound = Some(degree_bound);
    algebra_checks(&mut report, a);

    let ders = solve_derivations(a, k, degree_bound);
    report.dim("der_slice", ders.len());
    report.check(
        "solved_maps_are_derivations",
        ders.iter().all(|d| is_alpha_k_derivation(a, d, k)),
    );
    report.check(
        "solved_maps_commute_with_alpha",
        ders.iter().all(|d| commutes_with_alpha(a, d)),
    );
    for (idx, d) in ders.iter().enumerate() {
        report.witness(&format!("der_{idx}"), format_map(&a.basis, &d.table));
    }
    if check_closure {
        let closed = ders.iter().all(|d| {
            ders.iter()
                .all(|e| two_slot_is_derivation(a, &commutator(d, e), 2 * k))
        });
        report.check("commutators_are_derivations", closed);
    }
    Ok(report)
}

pub fn cmd_nijenhuis(
    path: &Path,
    degree_bound: u32,
    attempts: usize,
    seed: u64,
) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let mut report = Report::new("nijenhuis", seed);
    report.input("algebra", a.name.clone());
    report.degree_bound = Some(degree_bound);
    report.input("attempts", attempts.to_string());
    algebra_checks(&mut report, a);

    let found = search_nijenhuis(a, degree_bound, seed, attempts);
    report.dim("found", found.len());
    report.check(
        "candidates_verified",
        found.iter().all(|f| is_nijenhuis(a, f)),
    );
    for (idx, f) in found.iter().enumerate() {
        let table: Vec<PolyVec> = (0..a.rank()).map(|i| f.entry(&[i]).clone()).collect();
        report.witness(&format!("nijenhuis_{idx}"), format_map(&a.basis, &table));
    }
    Ok(report)
}

pub fn cmd_deform(path: &Path, endo_path: &Path, seed: u64) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let endo = load_endo(endo_path, &a.basis)?;
    if endo.rule != ExtensionRule::CochainAntilinear {
        return Err(CliError::Usage(
            "deform expects an endo-map with `extension = antilinear`".into(),
        ));
    }
    let f = endo_cochain(&endo.table, a.rank());
    let mut report = Report::new("deform", seed);
    report.input("algebra", a.name.clone());
    report.input("endo", endo_path.display().to_string());
    algebra_checks(&mut report, a);
    report.witness("endo", format_map(&a.basis, &endo.table));

    report.check("endo_commutes_with_alpha", endo_commutes_with_alpha(a, &f));
    let nij = is_nijenhuis(a, &f);
    report.check("nijenhuis", nij);
    let psi = d_minus1_of_endo(a, &f)?;
    let dr = check_deformation(a, &psi)?;
    report.check("deformation.cocycle", dr.cocycle);
    report.check("deformation.quadratic", dr.quadratic);
    report.check("deformation.jacobi_per_t", dr.jacobi_per_t);
    report.check("trivial_deformation", is_trivial_deformation(a, &f)?);
    Ok(report)
}

/// Solve for a witness making `d` a quasiderivation: the defining identity
/// is affine-linear in the witness, so this is a single exact solve over the
/// single-monomial generator maps.
pub fn find_witness(
    a: &HomConformalAlgebra,
    d: &ConformalMap,
    k: usize,
    degree_bound: u32,
) -> Option<ConformalMap> {
    let r = a.rank();
    let zero = ConformalMap::zero(r, k);
    let flatten_residuals = |dd: &ConformalMap, dpp: &ConformalMap| -> Vec<MultiPoly> {
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..r {
                out.extend(gder_residual(a, dd, dd, dpp, k, i, j));
            }
        }
        out
    };
    // generators: one monomial in one table entry
    let mut gens: Vec<ConformalMap> = Vec::new();
    for i in 0..r {
        for h in 0..r {
            for p in 0..=degree_bound {
                for q in 0..=(degree_bound - p) {
                    let mono = Monomial::from_pairs(vec![(PARTIAL, p), (slot(0), q)]);
                    let mut g = ConformalMap::zero(r, k);
                    g.table[i][h] = MultiPoly::term(conformal_core::poly::scalar(1), mono);
                    gens.push(g);
                }
            }
        }
    }
    // residual(d, witness) = base + sum c_m * col_m where base uses a zero
    // witness and col_m isolates generator m
    let base = flatten_residuals(d, &zero);
    let cols: Vec<Vec<MultiPoly>> = gens
        .iter()
        .map(|g| {
            let with = flatten_residuals(d, g);
            with.iter().zip(&base).map(|(w, b)| w.sub(b)).collect()
        })
        .collect();
    let target: Vec<MultiPoly> = base.iter().map(|p| p.neg()).collect();
    let col_refs: Vec<Vec<MultiPoly>> = cols;
    let frame = CoordFrame::spanning(&[&col_refs, std::slice::from_ref(&target)]);
    let m = frame.matrix(&col_refs);
    let coeffs = m.solve(&frame.coords(&target))?;
    let mut witness = ConformalMap::zero(r, k);
    for (g, c) in gens.iter().zip(&coeffs) {
        witness = witness.add(&g.scale(&MultiPoly::constant(c.clone())));
    }
    if !commutes_with_alpha(a, &witness) {
        // keep only witnesses usable by the downstream predicates
        return None;
    }
    Some(witness)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gder(
    path: &Path,
    k: usize,
    degree_bound: u32,
    decompose: bool,
    closures: bool,
    center_checks: bool,
    seed: u64,
) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let mut report = Report::new("gder", seed);
    report.input("algebra", a.name.clone());
    report.input("k", k.to_string());
    report.degree_bound = Some(degree_bound);
    algebra_checks(&mut report, a);

    let gder = solve_space(a, SpaceKind::GDer, k, degree_bound);
    let qder = solve_space(a, SpaceKind::QDer, k, degree_bound);
    let cent = solve_space(a, SpaceKind::Centroid, k, degree_bound);
    let qc = solve_space(a, SpaceKind::QuasiCentroid, k, degree_bound);
    let zder = solve_space(a, SpaceKind::ZDer, k, degree_bound);
    report.dim("gder_slice", gder.len());
    report.dim("qder_slice", qder.len());
    report.dim("centroid_slice", cent.len());
    report.dim("quasicentroid_slice", qc.len());
    report.dim("zder_slice", zder.len());

    report.check(
        "gder_triples_verified",
        gder.iter().all(|t| is_generalized_derivation(a, t, k)),
    );
    report.check(
        "qder_pairs_verified",
        qder.iter().all(|t| is_quasiderivation(a, &t.d, &t.dpp, k)),
    );
    report.check(
        "centroid_verified",
        cent.iter().all(|t| is_centroid(a, &t.d, k)),
    );
    report.check(
        "quasicentroid_verified",
        qc.iter().all(|t| is_quasicentroid(a, &t.d, k)),
    );
    report.check(
        "zder_verified",
        zder.iter().all(|t| is_central_derivation(a, &t.d, k)),
    );

    if decompose {
        let mut ok = true;
        for t in &gder {
            match decompose_gder(a, t, k) {
                Ok((quasi, qc_part)) => {
                    ok &= is_quasiderivation(a, &quasi.d, &quasi.dpp, k)
                        && is_quasicentroid(a, &qc_part, k);
                }
                Err(_) => ok = false,
            }
        }
        report.check("gder_decomposes", ok);
    }
    if closures {
        let cr = bracket_closure_checks(a, k, k, degree_bound);
        report.check("closure.der_c_in_c", cr.der_c_in_c);
        report.check("closure.qder_qc_in_qc", cr.qder_qc_in_qc);
        report.check("closure.qc_qc_in_qder", cr.qc_qc_in_qder);
        report.check("closure.gder_subalgebra", cr.gder_subalgebra);
        report.check("closure.qder_subalgebra", cr.qder_subalgebra);
        report.check("closure.c_subalgebra", cr.c_subalgebra);
        report.check("closure.zder_ideal", cr.zder_ideal);
    }
    if center_checks {
        let cr = centroid_qc_center_check(a, k, k, degree_bound)?;
        report.dim("center_slice", cr.center_dim);
        report.dim("center_pairs_checked", cr.pairs_checked);
        report.check("center.values_central", cr.all_values_central);
        if cr.center_dim == 0 {
            report.check("center.commutators_zero", cr.all_zero);
            let qr = qc_bracket_vanishing(a, k, k, degree_bound)?;
            report.check("center.qc_implication", qr.implication_holds);
        }
    }
    Ok(report)
}

pub fn cmd_breve(
    path: &Path,
    phi_path: Option<&Path>,
    k: usize,
    degree_bound: u32,
    seed: u64,
) -> Result<Report, CliError> {
    let def = load_definition(path)?;
    let a = &def.algebra;
    let mut report = Report::new("breve", seed);
    report.input("algebra", a.name.clone());
    report.input("k", k.to_string());
    report.degree_bound = Some(degree_bound);
    algebra_checks(&mut report, a);

    let breve = breve_extension(a);
    report.dim("breve_rank", breve.rank());
    let br = breve.check_algebra();
    report.check("breve.axioms", br.skew && br.hom_jacobi && br.multiplicative);

    let comp = compute_complement(a, degree_bound);
    report.dim("bracket_span", comp.rr.len());
    report.dim("complement", comp.u.len());
    report.note(format!(
        "complement chosen greedily along the monomial order on the degree-{} slice",
        comp.slice_bound
    ));

    let candidates: Vec<(ConformalMap, ConformalMap)> = match phi_path {
        Some(p) => {
            let endo = load_endo(p, &a.basis)?;
            if endo.rule != ExtensionRule::ConformalLinear {
                return Err(CliError::Usage(
                    "breve --phi expects an endo-map with `extension = linear`".into(),
                ));
            }
            let d = ConformalMap {
                level: k,
                table: endo.table,
            };
            match find_witness(a, &d, k, degree_bound) {
                Some(w) => vec![(d, w)],
                None => {
                    report.check("quasiderivation", false);
                    report.note("no witness exists on the searched slice".to_string());
                    return Ok(report);
                }
            }
        }
        None => solve_space(a, SpaceKind::QDer, k, degree_bound)
            .into_iter()
            .map(|t| (t.d, t.dpp))
            .collect(),
    };
    report.dim("embedded_maps", candidates.len());

    let mut all_embed = true;
    for (idx, (d, w)) in candidates.iter().enumerate() {
        report.check(&format!("quasiderivation_{idx}"), is_quasiderivation(a, d, w, k));
        let phi = phi_embedding(a, d, w, &comp, k)?;
        let ok = is_alpha_k_derivation(&breve, &phi, k);
        all_embed &= ok;
        report.witness(
            &format!("phi_{idx}"),
            format_map(&breve.basis, &phi.table),
        );
    }
    report.check("phi_images_are_derivations", all_embed);
    Ok(report)
}
