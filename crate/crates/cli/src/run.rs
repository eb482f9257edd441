use holocontact::contact::{alongz_check, combine, pointwise_check, Candidate, Condition, ContactProblem, Mode, Route};
use holocontact::geometry::{curvature_derivative, recursion_residuals, CurvatureRequest};
use holocontact::kernelexpr::{parse_kernel, BundleSpec, BundleText};
use holocontact::linalg::{CMat, C64};
use holocontact::par::Strategy;
use holocontact::rkhs::{quotient_model, unitary_equiv_check_with, EquivOptions};
use holocontact::wordcalc::{verify_appendix_with, AppendixOptions};

use crate::config::{CurvatureSpec, RunConfig, Task, DEFAULT_SEED};
use crate::report::{CurvatureEntry, NamedResidual, RecursionEntry, ReportDocument, Status, Summary, TaskResult, SCHEMA};
use crate::InputError;

/// Runs `cfg`; a missing tolerance falls back to 1e-8.
pub fn run(cfg: &RunConfig) -> Result<ReportDocument, InputError> {
    run_with_env(cfg, None)
}

/// As [`run`], with `env_tolerance` used when the config has none.
pub fn run_with_env(cfg: &RunConfig, env_tolerance: Option<f64>) -> Result<ReportDocument, InputError> {
    let mut cfg = cfg.clone();
    let tol = cfg.effective_tolerance(env_tolerance);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(InputError::new(format!("tolerance must be positive and finite, got {tol}")));
    }
    cfg.tolerance = Some(tol);
    if cfg.order == 0 {
        return Err(InputError::new("order must be at least 1"));
    }

    let (result, summary, seed) = match cfg.task {
        Task::Pointwise | Task::AlongZ => contact_task(&cfg, tol)?,
        Task::Curvature => curvature_task(&cfg)?,
        Task::VerifyRecursions => recursion_task(&cfg, tol)?,
        Task::VerifyAppendix => appendix_task(&cfg, tol)?,
        Task::RkhsQuotient => rkhs_task(&cfg, tol)?,
    };
    Ok(ReportDocument {
        schema: SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        task: cfg.task,
        config: cfg,
        seed,
        summary,
        result,
    })
}

type Outcome = (TaskResult, Summary, Option<u64>);

fn bundle(text: &Option<BundleText>, key: &str) -> Result<BundleSpec, InputError> {
    let t = text.as_ref().ok_or_else(|| InputError::new(format!("[{key}] is required for this task")))?;
    BundleSpec::from_text(t).map_err(|e| InputError::new(format!("{key}: {e}")))
}

fn bundles(cfg: &RunConfig, need_b: bool) -> Result<Vec<BundleSpec>, InputError> {
    let mut out = vec![bundle(&cfg.bundle_a, "bundle_a")?];
    if need_b || cfg.bundle_b.is_some() {
        out.push(bundle(&cfg.bundle_b, "bundle_b")?);
    }
    Ok(out)
}

/// Explicit points win over the grid; `fallback_origin` allows neither.
fn points(cfg: &RunConfig, m: usize, fallback_origin: bool) -> Result<Vec<Vec<C64>>, InputError> {
    let pts = if !cfg.points.is_empty() {
        cfg.explicit_points()?
    } else if let Some(g) = &cfg.grid {
        g.points(m)?
    } else if fallback_origin {
        vec![vec![C64::new(0.0, 0.0); m]]
    } else {
        return Err(InputError::new("give `points` or a [grid]"));
    };
    if let Some((k, p)) = pts.iter().enumerate().find(|(_, p)| p.len() != m) {
        return Err(InputError::new(format!("points[{k}] has {} coordinates, bundles live in dimension {m}", p.len())));
    }
    Ok(pts)
}

fn candidate(cfg: &RunConfig) -> Result<Option<Candidate>, InputError> {
    let Some(rows) = &cfg.candidate else { return Ok(None) };
    let entries = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, s)| parse_kernel(s).map_err(|e| InputError::new(format!("candidate[{r}][{c}]: {e}"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Candidate::new(entries).map(Some).map_err(|e| InputError::new(format!("candidate: {e}")))
}

fn coords(p: &[C64]) -> Vec<[f64; 2]> {
    p.iter().map(|z| [z.re, z.im]).collect()
}

fn matrix(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

fn contact_task(cfg: &RunConfig, tol: f64) -> Result<Outcome, InputError> {
    let bs = bundles(cfg, true)?;
    let mode = if cfg.task == Task::AlongZ { Mode::AlongZ } else { Mode::Pointwise };
    let problem = ContactProblem {
        bundle_a: bs[0].clone(),
        bundle_b: bs[1].clone(),
        order: cfg.order,
        mode,
        points: points(cfg, bs[0].dim, false)?,
        candidate: candidate(cfg)?,
        tolerance: tol,
        strategy: Strategy::default(),
    };
    let report = match mode {
        Mode::AlongZ => alongz_check(&problem)?,
        Mode::Pointwise => pointwise_check(&problem)?,
    };
    let summary = Summary {
        status: report.verdict.into(),
        routes_agree: report.routes_agree,
        max_residual: Some(report.points.iter().map(|p| p.max_residual()).fold(0.0, f64::max)),
        points: report.points.len(),
    };
    Ok((TaskResult::Contact(report), summary, None))
}

fn curvature_task(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let bs = bundles(cfg, false)?;
    let m = bs[0].dim;
    if bs.iter().any(|b| b.dim != m) {
        return Err(InputError::new("bundles differ in dimension"));
    }
    let reqs: Vec<CurvatureSpec> = if cfg.curvature.is_empty() {
        (1..=m).flat_map(|i| (1..=m).map(move |j| CurvatureSpec { i, j, r: 0, t: 0 })).collect()
    } else {
        cfg.curvature.clone()
    };
    let holo = reqs.iter().map(|q| q.r + 1).max().unwrap_or(1);
    let anti = reqs.iter().map(|q| q.t + 1).max().unwrap_or(1);
    let pts = points(cfg, m, true)?;
    let mut entries = Vec::new();
    for b in &bs {
        for p in &pts {
            let h = b.jet(p, holo, anti)?;
            for q in &reqs {
                let v = curvature_derivative(&h, CurvatureRequest { i: q.i, j: q.j, r: q.r, t: q.t })?;
                entries.push(CurvatureEntry {
                    bundle: b.label.clone(),
                    point: coords(p),
                    name: format!("curvature(i={},j={},r={},t={})", q.i, q.j, q.r, q.t),
                    value: matrix(&v),
                });
            }
        }
    }
    let summary = Summary { status: Status::Completed, routes_agree: None, max_residual: None, points: pts.len() };
    Ok((TaskResult::Curvature { entries }, summary, None))
}

fn recursion_task(cfg: &RunConfig, tol: f64) -> Result<Outcome, InputError> {
    let bs = bundles(cfg, false)?;
    let n = cfg.order;
    let mut entries = Vec::new();
    let mut verdicts = Vec::new();
    let mut worst = 0.0f64;
    let mut npts = 0;
    for b in &bs {
        let pts = points(cfg, b.dim, true)?;
        npts = npts.max(pts.len());
        for p in &pts {
            let h = b.jet(p, n + 1, n + 1)?;
            let checks: Vec<NamedResidual> = recursion_residuals(&h, n)?
                .into_iter()
                .map(|(name, r)| {
                    let c = Condition::from_residual(name, Route::Auxiliary, r, 1.0, tol);
                    NamedResidual { name: c.name, residual: r, verdict: c.verdict }
                })
                .collect();
            for c in &checks {
                worst = worst.max(c.residual);
                verdicts.push(c.verdict);
            }
            entries.push(RecursionEntry { bundle: b.label.clone(), point: coords(p), checks });
        }
    }
    let summary =
        Summary { status: combine(verdicts.iter()).into(), routes_agree: None, max_residual: Some(worst), points: npts };
    Ok((TaskResult::Recursions { entries }, summary, None))
}

fn appendix_task(cfg: &RunConfig, tol: f64) -> Result<Outcome, InputError> {
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let opts = AppendixOptions { seed, tolerance: tol, ..Default::default() };
    let report = verify_appendix_with(cfg.order, &opts)?;
    let worst = report.checks.iter().filter_map(|c| c.residual).filter(|r| r.is_finite()).fold(None, |a: Option<f64>, r| {
        Some(a.map_or(r, |a| a.max(r)))
    });
    let summary = Summary {
        status: if report.all_passed { Status::Verified } else { Status::Refuted },
        routes_agree: None,
        max_residual: worst,
        points: 0,
    };
    Ok((TaskResult::Appendix(report), summary, Some(seed)))
}

fn rkhs_task(cfg: &RunConfig, tol: f64) -> Result<Outcome, InputError> {
    let bs = bundles(cfg, true)?;
    let pts = points(cfg, bs[0].dim, true)?;
    if pts.len() != 1 {
        return Err(InputError::new("rkhs-quotient takes exactly one base point"));
    }
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let a = quotient_model(&bs[0], &pts[0], cfg.order)?;
    let b = quotient_model(&bs[1], &pts[0], cfg.order)?;
    let opts = EquivOptions { tolerance: tol, seed, candidate: candidate(cfg)? };
    let report = unitary_equiv_check_with(&a, &b, &opts)?;
    let summary = Summary {
        status: report.verdict.into(),
        routes_agree: report.agree,
        max_residual: report.direct.as_ref().map(|d| d.residual).filter(|r| r.is_finite()),
        points: 1,
    };
    Ok((TaskResult::Rkhs(report), summary, Some(seed)))
}
