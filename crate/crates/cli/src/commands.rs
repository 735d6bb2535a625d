use std::io::Write;

use finsler_core::curvature::{berwald_parallel_defect, curvature_pack, theorem3_spray_defect};
use finsler_core::geodesic::{fmt_f64, integrate_geodesic_through, q_along, GeodesicPath};
use finsler_core::metric::{eval_metric, random_samples};
use finsler_core::projective::{projective_parameter_at, SampledQ};
use finsler_core::pseudo::{estimate_pseudo_distance, PseudoDistanceEstimate, SearchBudget};
use finsler_core::sturm::{classify_oscillation, path_cover, path_oscillation, Direction, IntervalCover, OscillationReport};
use finsler_core::verify::{default_zoo, verify_all};
use finsler_core::{FinslerError, FinslerMetric, ModelMetric, TangentSample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, CliError, CliResult};
use crate::{Budget, Common, Format, Trace};

#[derive(Serialize)]
struct CurvatureRow {
    x: Vec<f64>,
    y: Vec<f64>,
    #[serde(rename = "F")]
    f: f64,
    ric: f64,
    ric_eigmin: f64,
    berwald_horizontal: f64,
    berwald_vertical: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    spray_defect: Option<f64>,
}

fn curvature_row(m: &ModelMetric, s: &TangentSample, theorem3: bool) -> CliResult<CurvatureRow> {
    let pack = curvature_pack(m, s)?;
    let bw = berwald_parallel_defect(m, s)?;
    let spray_defect = if theorem3 { Some(theorem3_spray_defect(m, s)?.defect) } else { None };
    Ok(CurvatureRow {
        x: s.x.clone(),
        y: s.y.clone(),
        f: eval_metric(m, s)?,
        ric: pack.ric_scalar,
        ric_eigmin: pack.ric_eigmin(),
        berwald_horizontal: bw.horizontal,
        berwald_vertical: bw.vertical,
        spray_defect,
    })
}

pub fn curvature(
    common: &Common,
    points: usize,
    point: Option<Vec<f64>>,
    direction: Option<Vec<f64>>,
    theorem3: bool,
) -> CliResult<bool> {
    let m = config::metric(common)?;
    let samples = if point.is_some() || direction.is_some() {
        let (x, y) = config::start(&m, &point, &direction)?;
        vec![TangentSample::new(x, y)]
    } else {
        if points == 0 {
            return Err(CliError::Config("--points must be at least 1".into()));
        }
        random_samples(&m, points, &mut ChaCha8Rng::seed_from_u64(common.seed))
    };
    let rows: Vec<CurvatureRow> = samples
        .par_iter()
        .map(|s| curvature_row(&m, s, theorem3))
        .collect::<CliResult<_>>()?;
    if config::format(common, Format::Csv) == Format::Json {
        return config::write_json(common, &rows).map(|_| true);
    }
    let n = m.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.extend(["F", "Ric", "eigmin_Ric_ik", "berwald_horizontal", "berwald_vertical"].map(String::from));
    if theorem3 {
        header.push("spray_defect".into());
    }
    let mut w = config::output(common)?;
    writeln!(w, "{}", header.join(","))?;
    for r in &rows {
        let mut cells: Vec<String> = r.x.iter().chain(&r.y).map(|v| fmt_f64(*v)).collect();
        cells.extend([r.f, r.ric, r.ric_eigmin, r.berwald_horizontal, r.berwald_vertical].map(fmt_f64));
        cells.extend(r.spray_defect.map(fmt_f64));
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(true)
}

fn trace_path(m: &ModelMetric, trace: &Trace) -> CliResult<GeodesicPath> {
    let (x, y) = config::start(m, &trace.point, &trace.direction)?;
    let step = config::positive("step", trace.step)?;
    let s_max = config::non_negative("s-max", trace.s_max)?;
    let s_back = config::non_negative("s-back", trace.s_back)?;
    if s_max + s_back < 8.0 * step {
        return Err(CliError::Config("the trace needs at least eight steps".into()));
    }
    let path = integrate_geodesic_through(m, &x, &y, s_back, s_max, step).map_err(|e| match e {
        FinslerError::GridMismatch(msg) => CliError::Config(msg),
        e => e.into(),
    })?;
    Ok(q_along(m, path)?)
}

fn check_anchor(path: &GeodesicPath, anchor: f64) -> CliResult<()> {
    let (lo, hi) = path.s_range();
    if !(lo..=hi).contains(&anchor) {
        return Err(CliError::Config(format!("--anchor {anchor} outside the traced range [{lo}, {hi}]")));
    }
    Ok(())
}

pub fn geodesic(common: &Common, trace: &Trace) -> CliResult<bool> {
    let m = config::metric(common)?;
    let path = trace_path(&m, trace)?;
    if config::format(common, Format::Csv) == Format::Json {
        return config::write_json(common, &path).map(|_| true);
    }
    let mut w = config::output(common)?;
    path.write_csv(&mut w)?;
    w.flush()?;
    Ok(true)
}

#[derive(Serialize)]
struct ParameterTrace {
    s: Vec<f64>,
    p: Vec<Option<f64>>,
    schwarzian: Vec<Option<f64>>,
    q: Vec<f64>,
    poles: Vec<f64>,
    wronskian_drift: f64,
}

pub fn projparam(common: &Common, trace: &Trace, anchor: f64) -> CliResult<bool> {
    let m = config::metric(common)?;
    let path = trace_path(&m, trace)?;
    check_anchor(&path, anchor)?;
    let pp = projective_parameter_at(&path, anchor)?;
    if config::format(common, Format::Csv) == Format::Json {
        let t = ParameterTrace {
            schwarzian: (0..pp.len()).map(|i| pp.schwarzian_at(i).ok()).collect(),
            s: pp.s_grid.clone(),
            p: pp.p_samples.clone(),
            q: pp.q.clone(),
            poles: pp.poles.clone(),
            wronskian_drift: pp.wronskian_drift(),
        };
        return config::write_json(common, &t).map(|_| true);
    }
    let mut w = config::output(common)?;
    pp.write_csv(&mut w)?;
    w.flush()?;
    Ok(true)
}

#[derive(Serialize)]
struct OscillationOutput {
    minus: OscillationReport,
    plus: OscillationReport,
    cover: IntervalCover,
}

pub fn oscillation(common: &Common, trace: &Trace, anchor: f64, window: Option<Vec<f64>>) -> CliResult<bool> {
    let m = config::metric(common)?;
    let path = trace_path(&m, trace)?;
    check_anchor(&path, anchor)?;
    let (minus, plus) = match window {
        None => path_oscillation(&path)?,
        Some(w) => {
            if w.len() != 2 || !(w[0] < w[1]) || w.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config("--window needs two increasing numbers a,b".into()));
            }
            let q = SampledQ::from_path(&path)?;
            let (lo, hi) = path.s_range();
            let ext = |t: f64| q.eval(t.clamp(lo, hi));
            (
                classify_oscillation(ext, Direction::MinusInfinity, (w[0], w[1])),
                classify_oscillation(ext, Direction::PlusInfinity, (w[0], w[1])),
            )
        }
    };
    let pp = projective_parameter_at(&path, anchor)?;
    let cover = path_cover(&path, &pp, (&minus, &plus))?;
    if config::format(common, Format::Json) == Format::Json {
        return config::write_json(common, &OscillationOutput { minus, plus, cover }).map(|_| true);
    }
    let mut w = config::output(common)?;
    writeln!(w, "a,b,choice,end_a,end_b,full_sweep,verdict_minus,verdict_plus")?;
    for iv in &cover.intervals {
        writeln!(
            w,
            "{},{},{:?},{:?},{:?},{},{:?},{:?}",
            fmt_f64(iv.a),
            fmt_f64(iv.b),
            iv.choice,
            iv.ends[0],
            iv.ends[1],
            iv.full_sweep,
            minus.verdict,
            plus.verdict
        )?;
    }
    w.flush()?;
    Ok(true)
}

fn budget(b: &Budget) -> CliResult<SearchBudget> {
    let mut out = SearchBudget::default();
    if let Some(v) = b.extension {
        out.extension = config::positive("extension", v)?;
    }
    if let Some(v) = b.step {
        out.step = config::positive("step", v)?;
    }
    if let Some(v) = b.n_max {
        if v == 0 {
            return Err(CliError::Config("--n-max must be at least 1".into()));
        }
        out.n_max = v;
    }
    if let Some(v) = b.grid {
        out.grid = v;
    }
    if let Some(v) = b.split_depth {
        out.split_depth = v;
    }
    if let Some(v) = b.k {
        out.k = config::positive("k", v)?;
    }
    Ok(out)
}

#[derive(Serialize)]
struct PseudoOutput {
    forward: PseudoDistanceEstimate,
    backward: PseudoDistanceEstimate,
}

pub fn pseudodist(common: &Common, from: &[f64], to: &[f64], b: &Budget) -> CliResult<bool> {
    let m = config::metric(common)?;
    let x = config::vector("from", from, m.dim())?;
    let y = config::vector("to", to, m.dim())?;
    let budget = budget(b)?;
    let (fwd, bwd) = rayon::join(
        || estimate_pseudo_distance(&m, &x, &y, &budget),
        || estimate_pseudo_distance(&m, &y, &x, &budget),
    );
    let out = PseudoOutput { forward: fwd?, backward: bwd? };
    if config::format(common, Format::Json) == Format::Json {
        return config::write_json(common, &out).map(|_| true);
    }
    let mut w = config::output(common)?;
    writeln!(w, "direction,upper_bound,geodesic_length,segments")?;
    for (name, e) in [("forward", &out.forward), ("backward", &out.backward)] {
        writeln!(
            w,
            "{name},{},{},{}",
            fmt_f64(e.upper_bound),
            fmt_f64(e.geodesic_length),
            e.chain.segments.len()
        )?;
    }
    w.flush()?;
    Ok(true)
}

pub fn verify(common: &Common, zoo: bool) -> CliResult<bool> {
    let metrics = if zoo { default_zoo() } else { vec![config::metric(common)?] };
    let report = verify_all(&metrics, common.seed);
    match config::format(common, Format::Csv) {
        Format::Json => config::write_json(common, &report)?,
        Format::Csv => {
            let mut w = config::output(common)?;
            writeln!(w, "metric,check,value,tolerance,passed,detail")?;
            for c in &report.checks {
                let detail = c.detail.as_deref().unwrap_or("").replace(',', ";");
                writeln!(w, "{},{},{},{},{},{}", c.metric, c.name, fmt_f64(c.value), fmt_f64(c.tolerance), c.passed, detail)?;
            }
            w.flush()?;
        }
    }
    for c in report.failures() {
        eprintln!("FAIL {} {}: {}", c.metric, c.name, c.detail.as_deref().unwrap_or(""));
    }
    Ok(report.passed())
}
