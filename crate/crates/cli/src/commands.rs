use anyhow::{bail, Result};
use serde_json::{json, Value};
use syz_core::bside::{cone_relation_check, jacobian_smoothness, verify_blowup_presentation};
use syz_core::skeleton::{glued_skeleton, mayer_vietoris, summarize, SkeletonSpec};
use syz_core::syz::{find_critical_manifolds, match_catalog, match_tolerance, predicted_catalog, CatalogMatch, SearchReport};
use syz_core::tropical::{
    amoeba_contains, amoeba_contains_oracle, classify_chamber, distance_to_chamber, enumerate_spine_cells,
    polygon_margin, tailored_amoeba_contains, tailored_amoeba_contains_closed, tailored_weights,
};
use syz_core::{BasePoint, ChamberId, Location};

use crate::config::RunConfig;
use crate::envelope::{to_canonical_value, ResultEnvelope};
use crate::svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spine,
    Amoeba,
    Critical,
    Skeleton,
    Bside,
    Figure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spine => "spine",
            Command::Amoeba => "amoeba",
            Command::Critical => "critical",
            Command::Skeleton => "skeleton",
            Command::Bside => "bside",
            Command::Figure => "figure",
        }
    }
}

/// Rendered result of a command.
#[derive(Clone, Debug)]
pub struct Output {
    /// JSON envelope, or SVG for `figure`.
    pub text: String,
    pub passed: bool,
    pub summary: String,
}

pub fn run(command: Command, cfg: &RunConfig, threads: Option<usize>) -> Result<Output> {
    cfg.validate()?;
    let (payload, passed, summary) = match command {
        Command::Spine => spine(cfg)?,
        Command::Amoeba => amoeba(cfg)?,
        Command::Critical => critical(cfg, threads)?,
        Command::Skeleton => skeleton(cfg)?,
        Command::Bside => bside(cfg)?,
        Command::Figure => {
            let (text, passed, summary) = figure(cfg, threads)?;
            return Ok(Output { text, passed, summary });
        }
    };
    let env = ResultEnvelope::new(command.name(), cfg, payload, passed)?;
    Ok(Output {
        text: env.to_json()?,
        passed,
        summary,
    })
}

/// Axis values `xi_min + k * step`, `k = 0..resolution`.
pub(crate) fn axis(cfg: &RunConfig) -> Vec<f64> {
    let g = &cfg.grid;
    let step = (g.xi_max - g.xi_min) / (g.resolution - 1) as f64;
    (0..g.resolution).map(|k| g.xi_min + step * k as f64).collect()
}

/// All grid points of `axis^q`, first coordinate fastest.
fn grid_points(axis: &[f64], q: usize) -> Vec<Vec<f64>> {
    let n = axis.len();
    (0..n.pow(q as u32))
        .map(|mut code| {
            (0..q)
                .map(|_| {
                    let v = axis[code % n];
                    code /= n;
                    v
                })
                .collect()
        })
        .collect()
}

/// One string per row for `q <= 2` (row `j` holds points with the second
/// coordinate equal to `axis[j]`); `None` for larger `q`.
fn raster_rows(n: usize, q: usize, cells: &[char]) -> Option<Vec<String>> {
    match q {
        1 => Some(vec![cells.iter().collect()]),
        2 => Some(cells.chunks(n).map(|r| r.iter().collect()).collect()),
        _ => None,
    }
}

fn dense_q(cfg: &RunConfig) -> Result<usize> {
    let q = cfg.shape.q;
    if q > 3 {
        bail!("config field `shape.q` must be at most 3 for dense sampling, got {q}");
    }
    Ok(q)
}

fn spine(cfg: &RunConfig) -> Result<(Value, bool, String)> {
    let q = dense_q(cfg)?;
    let cells = enumerate_spine_cells(q)?;
    let expected = (1usize << (q + 1)) - q - 2;
    let axis = axis(cfg);
    let mut counts = vec![0usize; q + 1];
    let mut on_spine = 0usize;
    let mut chars = Vec::new();
    for x in grid_points(&axis, q) {
        match classify_chamber(&BasePoint::new(x)?, cfg.grid.tol)? {
            Location::Chamber(ChamberId(i)) => {
                counts[i] += 1;
                chars.push(char::from_digit(i as u32, 10).unwrap_or('?'));
            }
            Location::Cell(_) => {
                on_spine += 1;
                chars.push('*');
            }
        }
    }
    let passed = cells.len() == expected && counts.iter().all(|&c| c > 0);
    let payload = json!({
        "q": q,
        "cells": cells.iter().map(|c| json!({"tie_set": c.tie_set(), "dim": c.dim()})).collect::<Vec<_>>(),
        "n_cells": cells.len(),
        "expected_cells": expected,
        "axis": axis,
        "chamber_counts": counts,
        "spine_points": on_spine,
        "raster": raster_rows(cfg.grid.resolution, q, &chars),
    });
    let summary = format!("{} spine cells; chamber counts {counts:?}", cells.len());
    Ok((payload, passed, summary))
}

/// Distance from `xi` to the spine: to the nearest chamber other than its own.
fn spine_distance(xi: &BasePoint, tol: f64) -> Result<f64> {
    match classify_chamber(xi, tol)? {
        Location::Cell(_) => Ok(0.0),
        Location::Chamber(ChamberId(own)) => {
            let mut d = f64::INFINITY;
            for i in (0..=xi.q()).filter(|&i| i != own) {
                d = d.min(distance_to_chamber(xi, ChamberId(i))?);
            }
            Ok(d)
        }
    }
}

fn amoeba(cfg: &RunConfig) -> Result<(Value, bool, String)> {
    let q = dense_q(cfg)?;
    let params = cfg.model_shape().params;
    let axis = axis(cfg);
    let points = grid_points(&axis, q);
    let collar = params.eps.max((q as f64).ln());
    let mut untailored = Vec::with_capacity(points.len());
    let mut tailored = Vec::with_capacity(points.len());
    let (mut n_diff, mut max_d_tailored, mut max_d_diff) = (0usize, 0.0f64, 0.0f64);
    for x in &points {
        let xi = BasePoint::new(x.clone())?;
        let a = amoeba_contains(&xi, 0.0);
        let t = tailored_amoeba_contains_closed(&xi, &params, 0.0)?;
        if t || a != t {
            let d = spine_distance(&xi, cfg.grid.tol)?;
            if t {
                max_d_tailored = max_d_tailored.max(d);
            }
            if a != t {
                n_diff += 1;
                max_d_diff = max_d_diff.max(d);
            }
        }
        untailored.push(if a { '1' } else { '0' });
        tailored.push(if t { '1' } else { '0' });
    }

    // Oracle cross-check on an evenly strided subsample away from the boundary.
    let stride = (points.len() / cfg.grid.oracle_samples.max(1)).max(1);
    let (mut checked, mut disagreements) = (0usize, 0usize);
    for x in points.iter().step_by(stride).take(cfg.grid.oracle_samples) {
        let xi = BasePoint::new(x.clone())?;
        let w0: Vec<f64> = std::iter::once(1.0).chain(x.iter().map(|v| v.exp())).collect();
        let max0 = w0.iter().copied().fold(0.0, f64::max);
        if (polygon_margin(&w0) / max0).abs() > 1e-3 {
            checked += 1;
            if amoeba_contains_oracle(&xi, cfg.grid.oracle_grid, 1e-6)? != amoeba_contains(&xi, 0.0) {
                disagreements += 1;
            }
        }
        let wt = tailored_weights(&xi, &params)?;
        let maxt = wt.iter().copied().fold(0.0, f64::max);
        if (polygon_margin(&wt) / maxt).abs() > 1e-3 {
            checked += 1;
            let closed = tailored_amoeba_contains_closed(&xi, &params, 0.0)?;
            if tailored_amoeba_contains(&xi, &params, cfg.grid.oracle_grid, 1e-6)? != closed {
                disagreements += 1;
            }
        }
    }

    let grid_slack = (cfg.grid.xi_max - cfg.grid.xi_min) / (cfg.grid.resolution - 1) as f64 * 1e-9;
    let tailored_in_collar = max_d_tailored <= params.eps + grid_slack;
    let diff_in_collar = max_d_diff <= collar + grid_slack;
    let passed = tailored_in_collar && diff_in_collar && disagreements == 0;
    let count = |v: &[char]| v.iter().filter(|&&c| c == '1').count();
    let n = cfg.grid.resolution;
    let payload = json!({
        "q": q,
        "eps": params.eps,
        "l": params.l,
        "axis": axis,
        "untailored": {"count": count(&untailored), "raster": raster_rows(n, q, &untailored)},
        "tailored": {"count": count(&tailored), "raster": raster_rows(n, q, &tailored)},
        "differing_points": n_diff,
        "max_spine_distance_tailored": max_d_tailored,
        "max_spine_distance_differing": max_d_diff,
        "collar_width": collar,
        "tailored_within_eps_collar": tailored_in_collar,
        "differences_within_collar": diff_in_collar,
        "oracle": {"checked": checked, "disagreements": disagreements, "grid": cfg.grid.oracle_grid},
    });
    let summary = format!(
        "amoeba {} / tailored {} of {} points; oracle {disagreements} disagreements in {checked}",
        count(&untailored),
        count(&tailored),
        points.len()
    );
    Ok((payload, passed, summary))
}

/// Solver output matched against the catalog.
pub(crate) struct CriticalRun {
    pub report: SearchReport,
    pub matched: CatalogMatch,
}

pub(crate) fn run_critical(cfg: &RunConfig, threads: Option<usize>) -> Result<CriticalRun> {
    let shape = cfg.model_shape();
    let solver = cfg.solver_config(threads)?;
    let report = find_critical_manifolds(&shape, &solver)?;
    let catalog = predicted_catalog(&shape)?;
    let matched = match_catalog(&report.manifolds, &catalog, match_tolerance(&shape));
    Ok(CriticalRun { report, matched })
}

fn critical(cfg: &RunConfig, threads: Option<usize>) -> Result<(Value, bool, String)> {
    let run = run_critical(cfg, threads)?;
    let solver = cfg.solver_config(threads)?;
    let missed: Vec<&Vec<usize>> = run.matched.rows.iter().filter(|r| r.cluster.is_none()).map(|r| &r.subset).collect();
    let passed = run.matched.is_bijection();
    let clusters: Vec<Value> = run
        .report
        .manifolds
        .iter()
        .map(|m| {
            json!({
                "subset": m.subset,
                "base_xi": m.base_xi,
                "eta": m.eta,
                "index": m.index,
                "nullity": m.nullity,
                "grad_norm": m.grad_norm,
                "members": m.members.len(),
                "eigenvalues": m.hessian.eigenvalues,
                "stable": m.hessian.stable,
            })
        })
        .collect();
    let payload = json!({
        "shape": to_canonical_value(&cfg.model_shape())?,
        "n_starts": solver.n_starts,
        "seed": solver.seed,
        "n_converged": run.report.n_converged,
        "n_discarded": run.report.n_discarded,
        "tolerance": run.matched.tolerance,
        "rows": to_canonical_value(&run.matched.rows)?,
        "clusters": clusters,
        "unmatched_clusters": run.matched.unmatched_clusters,
        "missed_entries": missed,
        "bijection": passed,
        "indices_agree": run.matched.indices_agree(),
    });
    let summary = format!(
        "{} clusters for {} catalog entries; unmatched {:?}; missed {:?}; indices agree: {}",
        run.report.manifolds.len(),
        run.matched.rows.len(),
        run.matched.unmatched_clusters,
        missed,
        run.matched.indices_agree()
    );
    Ok((payload, passed, summary))
}

fn skeleton(cfg: &RunConfig) -> Result<(Value, bool, String)> {
    let (p, q) = (cfg.shape.p, cfg.shape.q);
    if p > 3 || q > 4 {
        bail!("config fields `shape.p` <= 3 and `shape.q` <= 4 required for skeleton, got ({p}, {q})");
    }
    let glued = glued_skeleton(&SkeletonSpec::new(p, q)?)?;
    let summary = summarize(&glued);
    let mv = mayer_vietoris(&glued)?;
    let (chi, chi1, chi2, chi0) = glued.euler_characteristics();
    let chi_ok = chi == chi1 + chi2 - chi0 && chi == summary.glued.euler_characteristic();
    let passed = mv.exact() && chi_ok;
    let payload = json!({
        "summary": to_canonical_value(&summary)?,
        "homology_ranks": summary.glued.trimmed_ranks(),
        "torsion_free": summary.glued.is_torsion_free(),
        "euler": {"glued": chi, "piece1": chi1, "piece2": chi2, "overlap": chi0, "additive": chi_ok},
        "mayer_vietoris": to_canonical_value(&mv)?,
        "exact": mv.exact(),
    });
    let text = format!(
        "glued ({p},{q}) homology ranks {:?}; chi {chi}; Mayer-Vietoris exact: {}",
        summary.glued.trimmed_ranks(),
        mv.exact()
    );
    Ok((payload, passed, text))
}

fn bside(cfg: &RunConfig) -> Result<(Value, bool, String)> {
    let b = &cfg.bside;
    if b.n > 4 || b.m > 4 {
        bail!("config fields `bside.n` and `bside.m` must be at most 4, got ({}, {})", b.n, b.m);
    }
    let mut failures = Vec::new();
    let mut section = |name: &str, r: syz_core::Result<Value>| -> Value {
        r.unwrap_or_else(|e| {
            failures.push(format!("{name}: {e}"));
            json!({"error": e.to_string()})
        })
    };
    let blowup = section(
        "blowup",
        verify_blowup_presentation(b.n, b.m, b.seed).map(|r| serde_json::to_value(r).expect("report")),
    );
    let jacobian = section(
        "jacobian",
        jacobian_smoothness(b.n, b.m).map(|r| serde_json::to_value(r).expect("report")),
    );
    let cone = section(
        "cone",
        cone_relation_check(b.n, b.m, b.seed).map(|r| serde_json::to_value(r).expect("report")),
    );
    let passed = failures.is_empty();
    let payload = json!({
        "n": b.n,
        "m": b.m,
        "blowup": blowup,
        "jacobian": jacobian,
        "cone": cone,
        "failures": failures,
    });
    let summary = if passed {
        format!("ring identities hold for (n, m) = ({}, {})", b.n, b.m)
    } else {
        format!("failed: {}", failures.join("; "))
    };
    Ok((payload, passed, summary))
}

fn figure(cfg: &RunConfig, threads: Option<usize>) -> Result<(String, bool, String)> {
    if cfg.shape.q != 2 {
        bail!("config field `shape.q` must be 2 for the figure, got {}", cfg.shape.q);
    }
    let run = run_critical(cfg, threads)?;
    let text = svg::render(cfg, &run.matched)?;
    let passed = run.matched.is_bijection();
    let found = run.matched.rows.iter().filter(|r| r.found_xi.is_some()).count();
    Ok((text, passed, format!("figure with {found} of {} catalog markers", run.matched.rows.len())))
}
