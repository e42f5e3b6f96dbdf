use std::path::Path;

use serde_json::{json, Value};
use toric_gs::invariants::{
    solve_kr_soliton, solve_mabuchi_soliton, weighted_barycenter, weighted_volume, SolitonKind,
    KR_TOLERANCE,
};
use toric_gs::io::{self, RunInputs};
use toric_gs::mafunc::{self, Functionals, SolveOptions};
use toric_gs::quadrature::{self, Options};
use toric_gs::rational::format_rational;
use toric_gs::stability::{self, delta_toric, dh_g_filtration, ToricValuation};
use toric_gs::{Error, LabelledPolytope, WeightFunction};

use crate::report::{Failure, RunReport};

/// Largest number of rows in the plotted potential profile.
const PROFILE_ROWS: usize = 201;

fn missing(field: &str) -> Failure {
    Failure::input("inputs", Error::schema(format!("/{field}"), "missing field"))
}

fn polytope(inputs: &RunInputs) -> Result<LabelledPolytope, Failure> {
    let spec = inputs.polytope.as_ref().ok_or_else(|| missing("polytope"))?;
    spec.build().map_err(|e| Failure::input("polytope", e))
}

fn weight(inputs: &RunInputs, p: &LabelledPolytope) -> Result<WeightFunction, Failure> {
    let g = inputs.g.clone().unwrap_or_else(WeightFunction::one);
    g.check_dim(p.dim()).map_err(|e| Failure::input("g", e))?;
    g.certify(p).map_err(|e| Failure::input("g", e))?;
    Ok(g)
}

fn direction(inputs: &RunInputs) -> Result<&[f64], Failure> {
    inputs.a.as_deref().ok_or_else(|| missing("a"))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn execute(inputs: &RunInputs, potential_out: Option<&Path>) -> Result<RunReport, Failure> {
    let (results, diagnostics) = match inputs.command.as_str() {
        "check-futaki" => check_futaki(inputs)?,
        "solve-soliton" => solve_soliton(inputs)?,
        "sg" => sg(inputs)?,
        "delta" => delta(inputs)?,
        "ding-na" => ding_na(inputs)?,
        "dh" => dh(inputs)?,
        "solve-ma" => solve_ma(inputs, potential_out)?,
        "functionals" => functionals(inputs)?,
        "inequalities" => inequalities(inputs)?,
        other => return Err(Failure::UnknownCommand(format!("unknown command {other:?}"))),
    };
    Ok(RunReport {
        command: inputs.command.clone(),
        inputs: inputs.to_value(),
        results,
        diagnostics,
        seed: inputs.seed,
    })
}

type Outcome = Result<(Value, Value), Failure>;

fn check_futaki(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let tol = inputs.tol.unwrap_or(1e-10);
    let b = weighted_barycenter(&p, &g)?;
    let v = weighted_volume(&p, &g)?;
    let norm = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // Barycenter again by cubature, as an independent route.
    let cub = Options::cubature();
    let mass = quadrature::moment_with(&p, &g, &vec![0; p.dim()], &cub)?.value;
    let b_cub: Vec<f64> = (0..p.dim())
        .map(|i| {
            let mut alpha = vec![0; p.dim()];
            alpha[i] = 1;
            quadrature::moment_with(&p, &g, &alpha, &cub).map(|m| m.value / mass)
        })
        .collect::<Result<_, _>>()?;
    Ok((
        json!({
            "barycenter": b,
            "futaki_basis": b.iter().map(|x| -x).collect::<Vec<_>>(),
            "futaki_vanishes": norm < tol,
            "V_g": v.value,
        }),
        json!({
            "tolerances": { "futaki_vanishes": tol },
            "errors": { "V_g": v.error },
            "oracle": { "barycenter_cubature_delta": max_abs_diff(&b, &b_cub) },
        }),
    ))
}

fn solve_soliton(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let kind = inputs.kind.unwrap_or(SolitonKind::Kr);
    let s = match kind {
        SolitonKind::Kr => solve_kr_soliton(&p)?,
        SolitonKind::Mabuchi => solve_mabuchi_soliton(&p)?,
    };
    let key = match kind {
        SolitonKind::Kr => "xi",
        SolitonKind::Mabuchi => "b",
    };
    let mut results = json!({
        "kind": kind,
        key: s.vector,
        "residual": s.residual,
        "feasible": s.feasible,
        "iterations": s.iterations,
    });
    if let Some(exact) = &s.exact {
        results["exact"] = json!(exact.iter().map(format_rational).collect::<Vec<_>>());
    }
    if let Some(r) = s.relative_gradient {
        results["relative_gradient"] = json!(r);
    }
    if s.feasible {
        results["V_g"] = json!(weighted_volume(&p, &s.weight)?.value);
        results["barycenter"] = json!(weighted_barycenter(&p, &s.weight)?);
    }
    let tolerances = match kind {
        SolitonKind::Kr => json!({ "relative_gradient": KR_TOLERANCE, "residual": 1e-10 }),
        SolitonKind::Mabuchi => json!({ "residual": 0.0 }),
    };
    Ok((results, json!({ "tolerances": tolerances, "iterations": s.iterations })))
}

/// Lattice level for the finite-`m` cross-check, kept cheap in higher dimension.
fn lattice_level(dim: usize) -> u32 {
    match dim {
        1 | 2 => 40,
        3 => 20,
        _ => 10,
    }
}

fn sg(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let a = direction(inputs)?;
    let v = ToricValuation::new(&p, &g, a)?;
    let m = lattice_level(p.dim());
    let lattice = stability::s_g_lattice(&p, &g, a, m)?;
    Ok((
        json!({
            "A": v.log_discrepancy,
            "S_g": v.s_g,
            "ratio": v.ratio(),
            "ding_na": v.ding_na(),
        }),
        json!({
            "tolerances": { "S_g": 1e-9 },
            "oracle": { "lattice_m": m, "S_g_lattice": lattice, "S_g_lattice_delta": (lattice - v.s_g).abs() },
        }),
    ))
}

fn delta(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let d = delta_toric(&p, &g)?;
    Ok((
        json!({ "delta": d.value, "direction": d.direction, "converged": d.converged }),
        json!({ "tolerances": { "delta": 1e-6 } }),
    ))
}

fn ding_na(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let v = ToricValuation::new(&p, &g, direction(inputs)?)?;
    Ok((
        json!({ "A": v.log_discrepancy, "S_g": v.s_g, "ding_na": v.ding_na() }),
        json!({ "tolerances": { "ding_na": 1e-9 } }),
    ))
}

fn dh(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let f = inputs.pl.as_ref().ok_or_else(|| missing("pl"))?;
    let m = inputs.m.unwrap_or(20);
    if m == 0 {
        return Err(Failure::input("m", Error::schema("/m", "must be positive")));
    }
    let sample = dh_g_filtration(&p, &g, f, m)?;
    let v_g = weighted_volume(&p, &g)?;
    let total = sample.total_mass();
    Ok((
        json!({
            "m": m,
            "atoms": {
                "position": sample.atoms.iter().map(|(x, _)| format_rational(x)).collect::<Vec<_>>(),
                "mass": sample.atoms.iter().map(|(_, w)| *w).collect::<Vec<_>>(),
            },
            "total_mass": total,
            "V_g": v_g.value,
            "lattice_mean": sample.mean(),
            "E_g_NA": stability::e_g_na(&p, &g, f)?,
            "Lambda_NA": stability::lambda_na(&p, f)?,
            "J_g_NA": stability::j_g_na(&p, &g, f)?,
        }),
        json!({
            "tolerances": { "relative_mass_error": 3.0 / m as f64 },
            "oracle": { "relative_mass_error": (total - v_g.value).abs() / v_g.value },
        }),
    ))
}

fn solve_ma(inputs: &RunInputs, potential_out: Option<&Path>) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let opts = SolveOptions {
        tolerance: inputs.tol.unwrap_or(1e-8),
        ..SolveOptions::default()
    };
    let s = mafunc::solve_ma(&p, &g, &opts)?;
    let grid = s.potential.grid;
    let moments = s.pushforward_moments(&p, &g, 3)?;
    let exact: Vec<f64> = (0..3u32)
        .map(|j| quadrature::moment(&p, &g, &[j]).map(|m| m.value))
        .collect::<Result<_, _>>()?;
    let ctx = Functionals::new(&p, &g, grid)?;
    let record = ctx.evaluate(&s.potential)?;
    let shift = (1.0 / grid.step()).round() as usize;
    let slope = ctx.ding_translation_slope(&s.potential, shift)?;
    let stride = grid.nodes.div_ceil(PROFILE_ROWS).max(1);
    let idx: Vec<usize> = (0..grid.nodes).step_by(stride).collect();
    if let Some(path) = potential_out {
        let text = io::potential_to_value(&s.potential).to_string();
        std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok((
        json!({
            "c": s.c,
            "eta": s.eta,
            "obstructed": s.obstructed,
            "residual": s.residual,
            "boundary_gap": s.boundary_gap,
            "grid": grid,
            "moments": { "pushforward": moments, "exact": exact },
            "functionals": record,
            "ding_translation_slope": slope,
            "destabilizing_ray": s.obstructed,
            "profile": {
                "x": idx.iter().map(|&k| grid.x(k)).collect::<Vec<_>>(),
                "u": idx.iter().map(|&k| s.potential.values[k]).collect::<Vec<_>>(),
            },
        }),
        json!({
            "tolerances": { "residual": opts.tolerance, "boundary_gap": opts.window_tolerance, "moments": 1e-5 },
            "iterations": s.iterations,
            "damping": s.damping,
            "oracle": { "moment_delta": max_abs_diff(&moments, &exact), "M_minus_D": record.m - record.d },
        }),
    ))
}

fn functionals(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let u = inputs.u.as_ref().ok_or_else(|| missing("u"))?;
    let ctx = Functionals::new(&p, &g, u.grid)?;
    let record = ctx.evaluate(u).map_err(|e| Failure::input("u", e))?;
    Ok((
        json!(record),
        json!({ "entropy_clamped": record.clamped, "grid": u.grid }),
    ))
}

fn inequalities(inputs: &RunInputs) -> Outcome {
    let p = polytope(inputs)?;
    let g = weight(inputs, &p)?;
    let samples = inputs.samples.unwrap_or(100);
    let seed = inputs.seed.unwrap_or(0);
    let report = mafunc::inequality_suite(&p, &g, samples, seed, None)?;
    let bounds = g.certify(&p)?;
    Ok((
        json!(report),
        json!({
            "tolerances": { "relative_slack": mafunc::suite::RELATIVE_SLACK },
            "total_violations": report.total_violations(),
            "rho": bounds.min,
            "R_g": bounds.max,
        }),
    ))
}
