//! One function per subcommand: validate, compute, emit.

use serde_json::{json, Value};
use shrinker_core::calculus::sample_frames;
use shrinker_core::gallery::{
    exp_remark_check, inequality_chain_check, profile_conditions_check, properness_diagnostic, spiral_curvature,
    tangent_norm_sq, weighted_mean_curvature_scan, Limit,
};
use shrinker_core::identity::observed_order;
use shrinker_core::omission::{coverage_raster, omission_certificate};
use shrinker_core::{
    canonical_shrinker, shrinker_residual, DriftOperator, GeomError, Identity, IdentityReport, ParamGrid,
    RadialProfile, RasterBox, SampleSet, SpiralCurve, SurfaceSpec,
};

use crate::config::{
    bad, boxes, counts, number_list, parse_grid, parse_orientation, parse_profile, parse_surface, sampled_window,
    ConfigError, Params,
};
use crate::emit::{flag, num, opt, Table, Writer};
use crate::svg;
use crate::CliError;

fn numerical(op: &'static str) -> impl FnOnce(GeomError) -> CliError {
    move |source| CliError::Numerical { op, source }
}

fn required<'a>(value: &'a Option<String>, field: &str) -> Result<&'a str, ConfigError> {
    value.as_deref().ok_or_else(|| bad(field, "required"))
}

fn surface(p: &Params) -> Result<SurfaceSpec, ConfigError> {
    let orientation = parse_orientation(p.orientation.as_deref())?;
    parse_surface(required(&p.surface, "surface")?, orientation)
}

fn default_count(spec: &SurfaceSpec) -> usize {
    if spec.intrinsic_dim() == 1 {
        201
    } else {
        41
    }
}

fn grid_label(grid: &ParamGrid) -> String {
    grid.counts().iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn range_of(values: impl Iterator<Item = f64>) -> [f64; 2] {
    values.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| [lo.min(v), hi.max(v)])
}

pub fn frames(p: &Params, out: &mut Writer) -> Result<Vec<String>, CliError> {
    let spec = surface(p)?;
    let grid = parse_grid(p.grid.as_deref(), p.ranges.as_deref(), spec.default_ranges(), default_count(&spec))?;
    let frames = sample_frames(&spec, &grid).map_err(numerical("sample_frames"))?;
    let n = grid.dim();
    let mut header = vec!["node".to_string()];
    header.extend((0..n).map(|i| format!("u{i}")));
    header.extend((0..=n).map(|i| format!("x{i}")));
    header.extend((0..=n).map(|i| format!("normal{i}")));
    header.extend(["mean_h", "norm_a_sq", "f", "weighted_h", "xtan_length", "area_element"].map(String::from));
    let mut table = Table::new(header);
    for (node, fr) in frames.iter().enumerate() {
        let mut row = vec![node.to_string()];
        row.extend(grid.point(node).into_iter().map(num));
        row.extend(fr.position.iter().copied().map(num));
        row.extend(fr.normal.iter().copied().map(num));
        row.extend(
            [
                fr.mean_h,
                fr.norm_a_sq,
                fr.f,
                fr.weighted_mean_curvature(),
                fr.tangent_length(&fr.x_tan),
                fr.area_element(),
            ]
            .map(num),
        );
        table.push(row);
    }
    let h = range_of(frames.iter().map(|f| f.mean_h));
    let f = range_of(frames.iter().map(|f| f.f));
    let hf = frames.iter().fold(0.0f64, |m, fr| m.max(fr.weighted_mean_curvature().abs()));
    out.csv("frames.csv", &table)?;
    out.json(
        "frames.json",
        "frames",
        json!({
            "surface": spec,
            "grid": { "counts": grid.counts(), "ranges": grid.ranges() },
            "nodes": frames.len(),
            "mean_h_range": h,
            "f_range": f,
            "max_abs_weighted_h": hf,
        }),
    )?;
    Ok(vec![
        format!("{} frames on {} grid", spec.name(), grid_label(&grid)),
        format!("H in [{}, {}], f in [{}, {}], max |H + f/2| = {}", num(h[0]), num(h[1]), num(f[0]), num(f[1]), num(hf)),
    ])
}

fn identity_list(checks: Option<&str>) -> Result<Vec<Identity>, ConfigError> {
    let text = checks.unwrap_or("all");
    if text == "all" {
        return Ok(Identity::ALL.to_vec());
    }
    text.split(',')
        .map(|c| match c.trim() {
            "grad" => Ok(Identity::Gradient),
            "div" => Ok(Identity::Divergence),
            "master" => Ok(Identity::Master),
            "pde" => Ok(Identity::ShrinkerPde),
            "decomposition" => Ok(Identity::PdeDecomposition),
            other => Err(bad("checks", format!("unknown identity `{other}` (grad, div, master, pde, decomposition, all)"))),
        })
        .collect()
}

pub fn identities(p: &Params, out: &mut Writer) -> Result<Vec<String>, CliError> {
    let spec = surface(p)?;
    let checks = identity_list(p.checks.as_deref())?;
    let base = parse_grid(p.grid.as_deref(), p.ranges.as_deref(), spec.default_ranges(), default_count(&spec))?;
    let levels = p.refine.unwrap_or(0);
    if levels > 4 {
        return Err(bad("refine", "at most 4 refinements").into());
    }
    let mut grids = vec![base];
    for _ in 0..levels {
        let next = grids.last().map(ParamGrid::refined).expect("non-empty");
        grids.push(next);
    }
    let mut table = Table::new([
        "identity", "grid", "h", "residual_inf", "residual_l2", "order_estimate", "interior_nodes", "trivial_field",
    ]);
    let mut reports: Vec<(Identity, Vec<(String, IdentityReport)>)> = Vec::new();
    for &id in &checks {
        let mut rows: Vec<(String, IdentityReport)> = Vec::new();
        for grid in &grids {
            let mut r = id.evaluate(&spec, grid).map_err(numerical(id.name()))?;
            if let Some((_, prev)) = rows.last() {
                r.order_estimate = observed_order(prev.residual_inf, r.residual_inf);
            }
            table.push(vec![
                r.identity_name.clone(),
                grid_label(grid),
                num(r.h),
                num(r.residual_inf),
                num(r.residual_l2),
                opt(r.order_estimate),
                r.interior_nodes.to_string(),
                flag(r.trivial_field),
            ]);
            rows.push((grid_label(grid), r));
        }
        reports.push((id, rows));
    }
    let finest = grids.last().expect("non-empty");
    let soliton = sample_frames(&spec, finest)
        .map_err(numerical("sample_frames"))?
        .iter()
        .map(|fr| shrinker_residual(fr, DriftOperator::SHRINKER.epsilon).abs())
        .fold(0.0f64, f64::max);
    out.csv("identities.csv", &table)?;
    let series: Vec<(String, Vec<(f64, f64)>)> = reports
        .iter()
        .map(|(id, rows)| (id.name().to_string(), rows.iter().map(|(_, r)| (r.h, r.residual_inf)).collect()))
        .collect();
    out.svg("residuals.svg", &svg::log_log(&format!("{} identity residuals", spec.name()), &series))?;
    out.json(
        "identities.json",
        "identities",
        json!({
            "surface": spec,
            "grids": grids.iter().map(grid_label).collect::<Vec<_>>(),
            "max_abs_soliton_residual": soliton,
            "reports": reports.iter().map(|(id, rows)| json!({
                "identity": id.name(),
                "levels": rows.iter().map(|(g, r)| json!({ "grid": g, "report": r })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    )?;
    let mut lines = vec![format!("{} on {}", spec.name(), grids.iter().map(grid_label).collect::<Vec<_>>().join(" -> "))];
    for (id, rows) in &reports {
        let last = &rows.last().expect("non-empty").1;
        lines.push(format!(
            "{}: residual_inf {} order {}",
            id.name(),
            num(last.residual_inf),
            last.order_estimate.map_or("-".to_string(), num)
        ));
    }
    lines.push(format!("max |H + f/2| = {}", num(soliton)));
    Ok(lines)
}

fn curve_samples(p: &Params, spec: &SurfaceSpec, with_z: bool) -> Result<SampleSet, ConfigError> {
    if p.grid.is_some() || p.ranges.is_some() {
        return Err(bad(if p.grid.is_some() { "grid" } else { "ranges" }, "curve samples are set with `t`"));
    }
    let (lo, hi) = spec.default_ranges()[0];
    let default = format!("{lo}:{hi}");
    let ts = sampled_window("t", p.t.as_deref().unwrap_or(&default), 0.01)?;
    let step = ts[1] - ts[0];
    Ok(SampleSet {
        points: ts.into_iter().map(|t| if with_z { vec![t, 0.0] } else { vec![t] }).collect(),
        spacing: Some(vec![step]),
    })
}

pub fn omission(p: &Params, out: &mut Writer) -> Result<Vec<String>, CliError> {
    let spec = surface(p)?;
    let reducible = spec.planar_section().is_some();
    let default_box = if spec.ambient_dim() == 2 || reducible { "-2:2,-2:2" } else { "-2:2,-2:2,-2:2" };
    let extent = boxes("box", p.raster_box.as_deref().unwrap_or(default_box))?;
    let mut cells = counts("cells", p.cells.as_deref().unwrap_or("100"))?;
    if cells.len() == 1 {
        cells = vec![cells[0]; extent.len()];
    }
    if cells.len() != extent.len() {
        return Err(bad("cells", format!("{} counts for a {}-dimensional box", cells.len(), extent.len())).into());
    }
    let raster_box = RasterBox::new(
        extent.iter().map(|r| r.0).collect(),
        extent.iter().map(|r| r.1).collect(),
        cells,
    )
    .map_err(|e| bad("box", e.to_string()))?;
    if let Some(tol) = p.cover_tol {
        if !(tol >= 0.0) {
            return Err(bad("cover-tol", "must be non-negative").into());
        }
    }
    let samples = if spec.intrinsic_dim() == 1 {
        curve_samples(p, &spec, false)?
    } else if raster_box.dim() == 2 && reducible {
        curve_samples(p, &spec, true)?
    } else {
        if p.t.is_some() {
            return Err(bad("t", "only curve samples take `t`; use `grid`").into());
        }
        SampleSet::from_grid(&parse_grid(p.grid.as_deref(), p.ranges.as_deref(), spec.default_ranges(), 101)?)
    };
    let raster = coverage_raster(&spec, &samples, &raster_box, p.cover_tol).map_err(numerical("coverage_raster"))?;
    let dim = raster_box.dim();
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend((0..dim).map(|i| format!("c{i}")));
    header.extend(["min_dist", "covered"].map(String::from));
    let mut table = Table::new(header);
    let mut covered = 0usize;
    let mut uncovered_max_radius = 0.0f64;
    let mut covered_min_radius = f64::INFINITY;
    for (i, c) in raster.centers().enumerate() {
        let r = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if raster.covered[i] {
            covered += 1;
            covered_min_radius = covered_min_radius.min(r);
        } else {
            uncovered_max_radius = uncovered_max_radius.max(r);
        }
        let mut row = vec![i.to_string()];
        row.extend(c.into_iter().map(num));
        row.push(num(raster.min_dist[i]));
        row.push(flag(raster.covered[i]));
        table.push(row);
    }
    let certificate = match &p.point {
        Some(text) => {
            let p0 = number_list("point", text)?;
            if p0.len() != spec.ambient_dim() {
                return Err(bad("point", format!("needs {} coordinates", spec.ambient_dim())).into());
            }
            Some(omission_certificate(&spec, &samples, &p0, None).map_err(numerical("omission_certificate"))?)
        }
        None => None,
    };
    out.csv("raster.csv", &table)?;
    out.svg("raster.svg", &svg::heat_map(&format!("{} tangent coverage", spec.name()), &raster))?;
    let covered_min_radius = covered_min_radius.is_finite().then_some(covered_min_radius);
    out.json(
        "omission.json",
        "omission",
        json!({
            "surface": spec,
            "raster_box": raster.raster_box,
            "cells": raster.covered.len(),
            "covered_cells": covered,
            "cover_tol": raster.cover_tol,
            "cell_diagonal": raster_box.cell_diagonal(),
            "planes": raster.planes,
            "planar_reduction": raster.planar_reduction,
            "samples": samples.len(),
            "sample_spacing": samples.spacing,
            "uncovered_max_radius": uncovered_max_radius,
            "covered_min_radius": covered_min_radius,
            "certificate": certificate,
        }),
    )?;
    let mut lines = vec![
        format!(
            "{} planes over {} cells (cover_tol {}), {} covered",
            raster.planes,
            raster.covered.len(),
            num(raster.cover_tol),
            covered
        ),
        format!(
            "uncovered cells reach |c| = {}, covered cells start at |c| = {}",
            num(uncovered_max_radius),
            opt(covered_min_radius)
        ),
    ];
    if let Some(c) = certificate {
        lines.push(format!(
            "certificate: min |<X - p0, N>| = {} (tol {}), all nonzero: {}",
            num(c.min_support),
            num(c.cert_tol),
            c.all_nonzero
        ));
    }
    Ok(lines)
}

const SPIRAL_CHECKS: [&str; 5] = ["conditions", "chain", "curvature", "trap", "weighted"];

pub fn spiral(p: &Params, out: &mut Writer) -> Result<Vec<String>, CliError> {
    let profile = parse_profile(required(&p.profile, "profile")?)?;
    let d = p.d.unwrap_or(1.0);
    let curve = SpiralCurve::new(profile.clone(), d).map_err(|e| bad("d", e.to_string()))?;
    let ts = sampled_window("t", p.t.as_deref().unwrap_or("-50:50:2001"), 0.05)?;
    let ss = sampled_window("s", p.s.as_deref().unwrap_or("-100:100:2001"), 0.1)?;
    let checks: Vec<&str> = match p.checks.as_deref().unwrap_or("all") {
        "all" => SPIRAL_CHECKS.to_vec(),
        list => list.split(',').map(str::trim).collect(),
    };
    if let Some(c) = checks.iter().find(|c| !SPIRAL_CHECKS.contains(c)) {
        return Err(bad("checks", format!("unknown check `{c}` ({}, all)", SPIRAL_CHECKS.join(", "))).into());
    }
    let on = |name: &str| checks.contains(&name);
    let mut summary: Vec<(String, String)> = Vec::new();
    let mut report = serde_json::Map::new();
    let mut lines = vec![format!("spiral {} with d = {}, {} t-nodes", profile.name(), num(d), ts.len())];
    report.insert("profile".into(), json!(profile));
    report.insert("d".into(), json!(d));

    let mut curve_table = Table::new(["t", "x", "y", "radius", "curvature", "support", "speed", "weighted_h"]);
    let mut trace = Vec::with_capacity(ts.len());
    for &t in &ts {
        let [x, y] = curve.point(t);
        let k = spiral_curvature(&curve, t);
        let f = curve.support(t);
        trace.push([x, y]);
        curve_table.push([t, x, y, curve.radius(t), k, f, curve.speed(t), k + 0.5 * f].map(num).to_vec());
    }
    out.csv("curve.csv", &curve_table)?;
    let mut circles = vec![d];
    if let Limit::Finite(m) = profile.limit_minus() {
        if m > 0.0 {
            circles.push(d + m);
        }
    }
    out.svg("curve.svg", &svg::curve_trace(&format!("spiral {}", profile.name()), &trace, &circles))?;
    let spot = tangent_norm_sq(&curve, 0.0, 0.0).raw;
    summary.push(("norm_sq_t0_s0".into(), num(spot)));
    report.insert("norm_sq_t0_s0".into(), json!(spot));

    if on("conditions") {
        let reach = ts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let horizon = p.horizon.unwrap_or(reach);
        let rep = profile_conditions_check(&profile, &ts, horizon).map_err(|e| bad("horizon", e.to_string()))?;
        let mut table = Table::new(["condition", "holds", "worst_margin", "worst_t", "last_failure_t", "note"]);
        for c in &rep.conditions {
            table.push(vec![
                c.name.to_string(),
                flag(c.holds_on_grid),
                num(c.worst_margin),
                num(c.worst_t),
                opt(c.last_failure_t),
                c.note.clone(),
            ]);
        }
        out.csv("conditions.csv", &table)?;
        let failing: Vec<&str> = rep.conditions.iter().filter(|c| !c.holds_on_grid).map(|c| c.name).collect();
        lines.push(if failing.is_empty() {
            "conditions (i)-(v) hold on the grid".to_string()
        } else {
            format!("conditions failing on the grid: {}", failing.join(", "))
        });
        report.insert("conditions".into(), json!(rep));
    }

    if on("curvature") {
        let k = range_of(ts.iter().map(|&t| spiral_curvature(&curve, t)));
        summary.push(("curvature_min".into(), num(k[0])));
        summary.push(("curvature_max".into(), num(k[1])));
        let (t0, t1) = (ts[0], ts[ts.len() - 1]);
        let (k0, k1) = (spiral_curvature(&curve, t0), spiral_curvature(&curve, t1));
        summary.push(("curvature_at_t_min".into(), num(k0)));
        summary.push(("curvature_at_t_max".into(), num(k1)));
        lines.push(format!("k({}) = {}, k({}) = {}, k in [{}, {}]", num(t0), num(k0), num(t1), num(k1), num(k[0]), num(k[1])));
        report.insert(
            "curvature".into(),
            json!({ "min": k[0], "max": k[1], "at_t_min": k0, "at_t_max": k1 }),
        );
    }

    if on("chain") {
        let relaxed = p.relaxed.unwrap_or(false);
        let t_chain: Vec<f64> = ts.iter().copied().filter(|&t| !relaxed || t > 0.0).collect();
        if t_chain.is_empty() {
            return Err(bad("relaxed", "no t > 0 in the window").into());
        }
        let rep = inequality_chain_check(&curve, &t_chain, &ss).map_err(numerical("inequality_chain_check"))?;
        let mut table = Table::new(["link", "holds", "worst_margin", "worst_t", "worst_s"]);
        for l in &rep.links {
            table.push(vec![l.name.to_string(), flag(l.holds), num(l.worst_margin), num(l.worst_t), num(l.worst_s)]);
        }
        out.csv("chain.csv", &table)?;
        summary.extend([
            ("chain_nodes".into(), rep.nodes.to_string()),
            ("chain_all_hold".into(), flag(rep.all_hold())),
            ("chain_strict".into(), flag(rep.strict)),
            ("min_norm_sq".into(), num(rep.min_norm_sq)),
            ("min_norm_sq_t".into(), num(rep.argmin.0)),
            ("min_norm_sq_s".into(), num(rep.argmin.1)),
            ("max_form_disagreement".into(), num(rep.max_form_disagreement)),
            ("max_cross_term_disagreement".into(), num(rep.max_cross_term_disagreement)),
        ]);
        lines.push(format!(
            "chain on {} nodes: all links hold {}, strict {}, min |R|^2 = {}, form gap {}",
            rep.nodes,
            rep.all_hold(),
            rep.strict,
            num(rep.min_norm_sq),
            num(rep.max_form_disagreement)
        ));
        report.insert("chain".into(), json!(rep));
        report.insert("chain_relaxed".into(), json!(relaxed));
        if profile == RadialProfile::Exp {
            let remark = exp_remark_check(&t_chain, &ss).map_err(numerical("exp_remark_check"))?;
            summary.extend([
                ("remark_all_terms_positive".into(), flag(remark.all_terms_positive)),
                ("remark_min_excess".into(), num(remark.min_excess)),
                ("remark_max_form_disagreement".into(), num(remark.max_form_disagreement)),
            ]);
            report.insert("exp_remark".into(), json!(remark));
        }
    }

    if on("trap") {
        let trap = p.trap.unwrap_or(d + 0.2);
        let t_values = number_list("trap-t", p.trap_t.as_deref().unwrap_or("50,100,200,400"))?;
        let rep = properness_diagnostic(&curve, &t_values, trap, 0.01).map_err(|e| bad("trap", e.to_string()))?;
        let mut table = Table::new(["t_max", "arc_length_inside", "slope"]);
        for r in &rep.rows {
            table.push(vec![num(r.t_max), num(r.arc_length_inside), opt(r.slope)]);
        }
        out.csv("trap.csv", &table)?;
        summary.push(("trap_verdict".into(), format!("{:?}", rep.verdict)));
        lines.push(format!(
            "trapped length in |q| <= {}: {} ({:?})",
            num(trap),
            rep.rows.iter().map(|r| num(r.arc_length_inside)).collect::<Vec<_>>().join(", "),
            rep.verdict
        ));
        report.insert("trap".into(), json!(rep));
    }

    if on("weighted") {
        let scan = weighted_mean_curvature_scan(&curve, &ts).map_err(numerical("weighted_mean_curvature_scan"))?;
        summary.extend([
            ("sup_abs_mean_curvature".into(), num(scan.sup_abs_mean_curvature)),
            ("sup_abs_support".into(), num(scan.sup_abs_support)),
            ("sup_abs_weighted_h".into(), num(scan.sup_abs_weighted)),
        ]);
        lines.push(format!(
            "sup |H| = {}, sup |<X,N>| = {}, sup |H_f| = {}",
            num(scan.sup_abs_mean_curvature),
            num(scan.sup_abs_support),
            num(scan.sup_abs_weighted)
        ));
        report.insert("weighted".into(), json!(scan));
    }

    out.csv("spiral_summary.csv", &Table::key_value(summary))?;
    out.json("spiral.json", "spiral", Value::Object(report))?;
    Ok(lines)
}

pub fn canonical(p: &Params, out: &mut Writer) -> Result<Vec<String>, CliError> {
    let n = p.n.unwrap_or(2);
    if !(1..=2).contains(&n) {
        return Err(bad("n", "only n = 1 and n = 2 are supported").into());
    }
    let ps: Vec<usize> = match &p.p {
        Some(text) => text
            .split(',')
            .map(|v| v.trim().parse::<usize>().map_err(|_| bad("p", format!("`{v}` is not an integer"))))
            .collect::<Result<_, _>>()?,
        None => (0..=n).collect(),
    };
    if let Some(bad_p) = ps.iter().find(|&&q| q > n) {
        return Err(bad("p", format!("p = {bad_p} exceeds n = {n}")).into());
    }
    let mut table = Table::new([
        "p", "n", "surface", "samples", "max_abs_soliton_residual", "max_abs_norm_a_sq_dev", "expected_f", "max_abs_f_dev",
        "expected_h", "max_abs_h_dev",
    ]);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for &q in &ps {
        let spec = canonical_shrinker(q, n).map_err(numerical("canonical_shrinker"))?;
        let grid = parse_grid(p.grid.as_deref(), None, spec.default_ranges(), if n == 1 { 10_001 } else { 101 })?;
        let frames = sample_frames(&spec, &grid).map_err(numerical("sample_frames"))?;
        let expected_f = -(2.0 * q as f64).sqrt();
        let expected_h = (q as f64 / 2.0).sqrt();
        let max = |g: &dyn Fn(&shrinker_core::GeomFrame) -> f64| frames.iter().fold(0.0f64, |m, fr| m.max(g(fr).abs()));
        let soliton = max(&|fr| shrinker_residual(fr, DriftOperator::SHRINKER.epsilon));
        let a_dev = (q >= 1).then(|| max(&|fr| fr.norm_a_sq - 0.5));
        let f_dev = max(&|fr| fr.f - expected_f);
        let h_dev = max(&|fr| fr.mean_h - expected_h);
        table.push(vec![
            q.to_string(),
            n.to_string(),
            spec.name().to_string(),
            frames.len().to_string(),
            num(soliton),
            opt(a_dev),
            num(expected_f),
            num(f_dev),
            num(expected_h),
            num(h_dev),
        ]);
        lines.push(format!(
            "p = {q}: {} over {} samples, max |H + f/2| = {}, max ||A|^2 - 1/2| = {}",
            spec.name(),
            frames.len(),
            num(soliton),
            opt(a_dev)
        ));
        rows.push(json!({
            "p": q,
            "n": n,
            "surface": spec,
            "samples": frames.len(),
            "max_abs_soliton_residual": soliton,
            "max_abs_norm_a_sq_dev": a_dev,
            "expected_f": expected_f,
            "max_abs_f_dev": f_dev,
            "expected_h": expected_h,
            "max_abs_h_dev": h_dev,
        }));
    }
    out.csv("canonical.csv", &table)?;
    out.json("canonical.json", "canonical", json!({ "shrinkers": rows }))?;
    Ok(lines)
}
