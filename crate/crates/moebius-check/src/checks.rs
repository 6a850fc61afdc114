//! Check runners: evaluate the requested checks on the scenario grid and
//! collect residual statistics into a report.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use moebius_geom::congruence::{
    congruence_metric_gap, quotient_point, rank_from_singular_values, sphere_map_height,
    sphere_map_singular_values,
};
use moebius_geom::deform::{
    bend_pair, congruence_residuals, decompose_splitting, finalkey_residual, j_symmetry_defect,
    resolve_finalkey_signs, resolve_shape_sign, splitting_tensors,
};
use moebius_geom::gallery::ExampleId;
use moebius_geom::hypersurface::{principal_structure, ImmersionPatch, CLUSTER_REL_TOL};
use moebius_geom::lorentz::LightConeChart;
use moebius_geom::moebius::{
    blaschke_two_route_gap, conformal_codazzi_residual, conformal_gauss_residual, moebius_data,
};
use moebius_geom::GeomError;

use crate::report::{CheckResult, NamedStat, Report, StatAcc};
use crate::scenario::{
    resolve, CheckKind, ExpectedStructure, Resolved, RunOptions, Scenario, SCHEMA_VERSION,
};

/// Parse, validate, and run a scenario. `Err` means the scenario itself is
/// invalid; check failures are reported inside the `Ok` report.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<Report, String> {
    let rz = resolve(sc, opts)?;
    let points = grid_points(&rz.windows, &rz.counts);

    let mut checks = Vec::new();
    let mut pass = true;
    for kind in &rz.checks {
        let start = Instant::now();
        let out = run_check(*kind, &rz, &points);
        let wall_ms = if opts.with_time {
            start.elapsed().as_millis() as u64
        } else {
            0
        };
        pass &= out.pass;
        checks.push(CheckResult {
            name: kind.as_str(),
            pass: out.pass,
            points: out.points,
            wall_ms,
            error: out.error,
            note: out.note,
            residuals: out.residuals,
        });
    }

    let timestamp = if opts.with_time {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    } else {
        None
    };
    Ok(Report {
        schema: SCHEMA_VERSION,
        timestamp,
        examples: rz.specs.iter().map(describe_spec).collect(),
        transform: rz.transform_label.clone(),
        checks,
        pass,
    })
}

fn describe_spec(spec: &moebius_geom::gallery::ExampleSpec) -> String {
    if spec.id == ExampleId::MinimalCylinder {
        format!("{} (n = {}, theta = {})", spec.id.as_str(), spec.n, spec.theta)
    } else {
        format!("{} (n = {})", spec.id.as_str(), spec.n)
    }
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect()
}

/// Cartesian product of per-axis samples, last axis fastest.
pub fn grid_points(windows: &[(f64, f64)], counts: &[usize]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for ((lo, hi), k) in windows.iter().zip(counts) {
        let axis = linspace(*lo, *hi, *k);
        out = out
            .iter()
            .flat_map(|head| {
                axis.iter().map(move |t| {
                    let mut u = head.clone();
                    u.push(*t);
                    u
                })
            })
            .collect();
    }
    out
}

struct Outcome {
    pass: bool,
    points: usize,
    error: Option<String>,
    note: Option<String>,
    residuals: Vec<NamedStat>,
}

fn err_string(e: &GeomError) -> String {
    format!("{}: {}", e.name(), e)
}

/// Run `f` at every grid point, stopping at the first geometric failure.
fn eval_grid<F>(points: &[Vec<f64>], mut f: F) -> (usize, Option<GeomError>)
where
    F: FnMut(&[f64]) -> Result<(), GeomError>,
{
    for (i, u) in points.iter().enumerate() {
        if let Err(e) = f(u) {
            return (i, Some(e));
        }
    }
    (points.len(), None)
}

fn seal(
    accs: Vec<StatAcc>,
    points: usize,
    error: Option<String>,
    note: Option<String>,
    extra_pass: bool,
) -> Outcome {
    let pass = error.is_none() && extra_pass && accs.iter().all(StatAcc::ok);
    Outcome {
        pass,
        points,
        error,
        note,
        residuals: accs.iter().map(StatAcc::stat).collect(),
    }
}

fn run_check(kind: CheckKind, rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    match kind {
        CheckKind::Invariants => check_invariants(rz, points),
        CheckKind::Gauss => check_scalar(rz, points, "gauss", conformal_gauss_residual),
        CheckKind::Codazzi => check_scalar(rz, points, "codazzi", conformal_codazzi_residual),
        CheckKind::Blaschke2Route => {
            check_scalar(rz, points, "blaschke2route", blaschke_two_route_gap)
        }
        CheckKind::CongruenceRank => check_congruence_rank(rz, points),
        CheckKind::SphereSurface => check_sphere_surface(rz, points),
        CheckKind::Theta => check_theta(rz, points),
        CheckKind::Wang => check_wang(rz, points),
        CheckKind::Splitting => check_splitting(rz, points),
        CheckKind::Elliptic => check_elliptic(rz, points),
        CheckKind::FinalKey => check_finalkey(rz, points),
    }
}

fn bounded(rz: &Resolved, stat: &str, tol_name: &str) -> StatAcc {
    let (t, bound) = rz.tol.get(tol_name);
    StatAcc::new(stat, Some(t), bound.as_str())
}

fn info(stat: &str) -> StatAcc {
    StatAcc::new(stat, None, "info")
}

fn base_patch(rz: &Resolved) -> &ImmersionPatch {
    &rz.patches[0]
}

fn pair_patches(rz: &Resolved) -> (&ImmersionPatch, &ImmersionPatch) {
    let (a, b) = rz.pair.as_ref().expect("pair checks are validated to have a pair");
    (a, b)
}

fn check_invariants(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let patch = base_patch(rz);
    let mut trace = bounded(rz, "trace", "trace");
    let mut norm = bounded(rz, "shape_norm", "shape_norm");
    let (done, err) = eval_grid(points, |u| {
        let d = moebius_data(patch, u)?;
        let s = d.moebius_shape.value();
        let target = (d.n as f64 - 1.0) / d.n as f64;
        trace.push(s.trace().abs());
        norm.push(((&s * &s).trace() - target).abs());
        Ok(())
    });
    seal(vec![trace, norm], done, err.as_ref().map(err_string), None, true)
}

fn check_scalar(
    rz: &Resolved,
    points: &[Vec<f64>],
    name: &str,
    residual: impl Fn(&moebius_geom::moebius::MoebiusData) -> f64,
) -> Outcome {
    let patch = base_patch(rz);
    let mut acc = bounded(rz, name, name);
    let (done, err) = eval_grid(points, |u| {
        acc.push(residual(&moebius_data(patch, u)?));
        Ok(())
    });
    seal(vec![acc], done, err.as_ref().map(err_string), None, true)
}

fn check_congruence_rank(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let patch = base_patch(rz);
    let n = rz.specs[0].n;
    let chart = LightConeChart::standard(n);
    let (keep, _) = rz.tol.get("sigma_keep");
    let (drop, _) = rz.tol.get("sigma_drop");
    let mut kept = bounded(rz, "sigma_kept_min", "sigma_keep");
    let mut dropped = bounded(rz, "sigma_dropped_max", "sigma_drop");
    let mut ranks: Vec<usize> = Vec::new();
    let mut message: Option<String> = None;
    let (done, err) = eval_grid(points, |u| {
        let d = moebius_data(patch, u)?;
        let sigma = sphere_map_singular_values(&d, &chart);
        let Some(rank) = rank_from_singular_values(&sigma, keep, drop) else {
            message = Some(format!(
                "RankIndeterminate: singular values {sigma:?} fall between drop {drop:e} and keep {keep:e}"
            ));
            return Err(GeomError::MixedRank { ranks: ranks.clone() });
        };
        if !ranks.contains(&rank) {
            ranks.push(rank);
            if ranks.len() > 1 {
                ranks.sort_unstable();
                return Err(GeomError::MixedRank { ranks: ranks.clone() });
            }
        }
        if rank > 0 {
            kept.push(sigma[rank - 1]);
        }
        let below = if rank < sigma.len() { sigma[rank] } else { 0.0 };
        dropped.push(below);
        Ok(())
    });
    let error = message.or(err.as_ref().map(err_string));
    let rank = if ranks.len() == 1 { ranks.first().copied() } else { None };
    let rank_ok = match (rz.expected_rank, rank) {
        (Some(want), Some(got)) => want == got,
        (None, Some(_)) => true,
        (_, None) => false,
    };
    let note = rank.map(|r| match rz.expected_rank {
        Some(want) => format!("rank = {r}, expected {want}"),
        None => format!("rank = {r}"),
    });
    seal(vec![kept, dropped], done, error, note, rank_ok)
}

fn check_sphere_surface(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let patch = base_patch(rz);
    let n = rz.specs[0].n;
    let chart = LightConeChart::standard(n);
    let mut relmetr = bounded(rz, "relmetr", "relmetr");
    let mut height = info("height");
    let (done, err) = eval_grid(points, |u| {
        let d = moebius_data(patch, u)?;
        relmetr.push(congruence_metric_gap(&d, &chart));
        height.push(sphere_map_height(&d, &chart));
        Ok(())
    });
    if let Some(e) = &err {
        return seal(vec![relmetr, height], done, Some(err_string(e)), None, true);
    }

    let (section, window, counts) = rz.section.as_ref().expect("section validated");
    let section_grid = grid_points(
        &[
            (window[0][0], window[0][1]),
            (window[1][0], window[1][1]),
        ],
        counts,
    );
    let mut minimality = bounded(rz, "minimality", "minimality");
    let mut spacelike = info("induced_metric_min_eig");
    let (sdone, serr) = eval_grid(&section_grid, |ab| {
        let q = quotient_point(patch, &chart, section, &[ab[0], ab[1]])?;
        minimality.push(q.minimality_residual);
        let m = &q.induced_metric;
        let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        spacelike.push(half_tr - (half_tr * half_tr - det).max(0.0).sqrt());
        Ok(())
    });
    seal(
        vec![relmetr, height, minimality, spacelike],
        done + sdone,
        serr.as_ref().map(err_string),
        None,
        true,
    )
}

fn check_theta(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let (p1, p2) = pair_patches(rz);
    let mut metric = bounded(rz, "metric_gap", "metric_gap");
    let mut shape = bounded(rz, "shape_gap", "shape_gap_min");
    let mut flat = bounded(rz, "flatness", "flatness");
    let mut nullity = bounded(rz, "nullity", "nullity_min");
    let (done, err) = eval_grid(points, |u| {
        let d1 = moebius_data(p1, u)?;
        let d2 = moebius_data(p2, u)?;
        let bp = bend_pair(&d1, &d2)?;
        metric.push(bp.metric_gap);
        shape.push(bp.shape_gap);
        flat.push(bp.flatness);
        nullity.push(bp.nullity);
        Ok(())
    });
    seal(vec![metric, shape, flat, nullity], done, err.as_ref().map(err_string), None, true)
}

fn check_wang(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let (p1, p2) = pair_patches(rz);
    let mut metric = bounded(rz, "metric", "wang");
    let mut shape = bounded(rz, "shape", "wang");
    let mut blaschke = bounded(rz, "blaschke", "wang");
    let mut form = bounded(rz, "form", "wang");
    let mut sign: Option<f64> = None;
    let (done, err) = eval_grid(points, |u| {
        let d1 = moebius_data(p1, u)?;
        let d2 = moebius_data(p2, u)?;
        let s = *sign.get_or_insert_with(|| resolve_shape_sign(&d1, &d2));
        let r = congruence_residuals(&d1, &d2, s);
        metric.push(r.metric);
        shape.push(r.shape);
        blaschke.push(r.blaschke);
        form.push(r.form);
        Ok(())
    });
    let note = sign.map(|s| format!("shape_sign = {s:+}"));
    seal(vec![metric, shape, blaschke, form], done, err.as_ref().map(err_string), note, true)
}

fn check_splitting(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let patch = base_patch(rz);
    let mut conformal = bounded(rz, "splitting_conformal", "splitting_conformal");
    let mut trace_part = info("abs_a");
    let mut rot_part = info("abs_b");
    let mut sym_part = info("sym_residual");
    let (done, err) = eval_grid(points, |u| {
        let d = moebius_data(patch, u)?;
        let ps = principal_structure(&d.shape.point(), CLUSTER_REL_TOL)?;
        let st = splitting_tensors(&d, &ps);
        conformal.push(st.conformal_residual);
        for c in &st.c {
            let dec = decompose_splitting(c);
            trace_part.push(dec.a.abs());
            rot_part.push(dec.b.abs());
            sym_part.push(dec.sym_residual);
        }
        Ok(())
    });
    seal(
        vec![conformal, trace_part, rot_part, sym_part],
        done,
        err.as_ref().map(err_string),
        None,
        true,
    )
}

fn check_elliptic(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let patch = base_patch(rz);
    let mut sym = bounded(rz, "sym_residual", "elliptic_sym");
    let mut jdef = bounded(rz, "j_defect", "j_defect");
    let mut rot_part = info("abs_b");
    let (b_min, _) = rz.tol.get("elliptic_b_min");
    let (sym_tol, _) = rz.tol.get("elliptic_sym");
    let (done, err) = eval_grid(points, |u| {
        let d = moebius_data(patch, u)?;
        let ps = principal_structure(&d.shape.point(), CLUSTER_REL_TOL)?;
        let st = splitting_tensors(&d, &ps);
        jdef.push(j_symmetry_defect(&ps));
        for c in &st.c_star {
            let dec = decompose_splitting(c);
            sym.push(dec.sym_residual);
            rot_part.push(dec.b.abs());
        }
        Ok(())
    });
    let in_algebra = err.is_none() && sym.ok() && jdef.ok();
    let classification = if !in_algebra {
        "not_rotational"
    } else if rot_part.max() >= b_min {
        "elliptic"
    } else if rot_part.max() <= sym_tol {
        "surface_like"
    } else {
        "indeterminate"
    };
    let class_ok = match rz.expected_structure {
        Some(ExpectedStructure::Elliptic) => classification == "elliptic",
        Some(ExpectedStructure::SurfaceLike) => classification == "surface_like",
        None => classification == "elliptic" || classification == "surface_like",
    };
    let note = Some(format!("classification = {classification}"));
    seal(vec![sym, jdef, rot_part], done, err.as_ref().map(err_string), note, class_ok)
}

fn check_finalkey(rz: &Resolved, points: &[Vec<f64>]) -> Outcome {
    let (p1, p2) = pair_patches(rz);
    let theta = rz.finalkey_theta.expect("finalkey theta validated");
    let mut residual = bounded(rz, "finalkey", "finalkey");
    let mut conformal = info("conformal_factor");
    let mut signs: Option<(f64, f64)> = None;
    let (done, err) = eval_grid(points, |u| {
        let d1 = moebius_data(p1, u)?;
        let d2 = moebius_data(p2, u)?;
        let ps = principal_structure(&d1.shape.point(), CLUSTER_REL_TOL)?;
        let (j_sign, flip) = match signs {
            Some(s) => s,
            None => {
                let s = resolve_finalkey_signs(&d1, &ps, &d2, theta)?;
                signs = Some(s);
                s
            }
        };
        let fk = finalkey_residual(&d1, &ps, &d2, theta, j_sign, flip)?;
        residual.push(fk.residual);
        conformal.push(fk.conformal_factor);
        Ok(())
    });
    let note = signs.map(|(j, f)| format!("theta = {theta}, j_sign = {j:+}, flip = {f:+}"));
    seal(vec![residual, conformal], done, err.as_ref().map(err_string), note, true)
}

/// One-line console summary for a check, used by the binary's stderr log.
pub fn summary_line(c: &CheckResult) -> String {
    let verdict = if c.pass { "pass" } else { "FAIL" };
    match &c.error {
        Some(e) => format!("{:<16} {} ({} points) [{}]", c.name, verdict, c.points, e),
        None => format!("{:<16} {} ({} points)", c.name, verdict, c.points),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_enumerates_the_product_last_axis_fastest() {
        let pts = grid_points(&[(0.0, 1.0), (0.0, 2.0)], &[2, 3]);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 0.0]);
        assert_eq!(pts[1], vec![0.0, 1.0]);
        assert_eq!(pts[5], vec![1.0, 2.0]);
    }

    #[test]
    fn singleton_axes_sample_the_midpoint() {
        let pts = grid_points(&[(0.0, 1.0), (-2.0, 2.0)], &[1, 1]);
        assert_eq!(pts, vec![vec![0.5, 0.0]]);
    }
}
