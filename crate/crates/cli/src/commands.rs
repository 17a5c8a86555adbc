use cylbill::flow::{evolve, random_phase_point, random_unit_vector, DEFAULT_MAX_EVENTS};
use cylbill::geometry::{transitivity_report, Check};
use cylbill::hyperbolicity::{
    neutral_space_numeric, richness_report, span_decomposition, sufficiency, survey_sufficiency,
    SurveyMode, SurveyRow,
};
use cylbill::tangent::{evolve_normal, lyapunov_spectrum, SampleKind, DEFAULT_RENORM_INTERVAL};
use cylbill::{NormalVector, OrbitSegment, PhasePoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::output::{columns, num, Sink};
use crate::scenario::Loaded;

/// What a successful command reports on stdout.
pub type Report = Value;

pub fn analyze(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let report = transitivity_report(&l.table.base_spaces())
        .map_err(|e| Failure::from_core(e, "table"))?;
    let doc = json!({
        "dim": l.table.dim(),
        "cylinders": l.table.cylinders().len(),
        "flags": l.table.flags,
        "requested": l.spec.validation,
        "transitivity": report,
    });
    sink.json("analyze.json", doc.clone())?;
    let flags = &l.table.flags;
    let mut unmet = Vec::new();
    if l.spec.validation.require_disjoint && flags.disjoint != Check::Holds {
        unmet.push("require_disjoint");
    }
    if l.spec.validation.require_base_intersection && !flags.base_intersections {
        unmet.push("require_base_intersection");
    }
    if let Some(first) = unmet.first() {
        return Err(Failure::validation(
            format!("requested validation failed: {}", unmet.join(", ")),
            Some(format!("table.validation.{first}")),
        )
        .with_detail(doc));
    }
    Ok(doc)
}

/// Start point from the scenario, or drawn from the seed.
fn start_point(l: &Loaded, rng: &mut Option<ChaCha8Rng>) -> Result<PhasePoint, Failure> {
    match &l.scenario.start {
        Some(s) => PhasePoint::new(s.q.clone(), s.v.clone())
            .map_err(|e| Failure::from_core(e, "start")),
        None => Ok(random_phase_point(&l.table, rng_for(l, rng)?)),
    }
}

fn rng_for<'a>(l: &Loaded, rng: &'a mut Option<ChaCha8Rng>) -> Result<&'a mut ChaCha8Rng, Failure> {
    if rng.is_none() {
        *rng = Some(ChaCha8Rng::seed_from_u64(l.seed()?));
    }
    Ok(rng.as_mut().expect("just set"))
}

/// Evolve for `duration`; with `collisions = n` the segment is cut halfway
/// between collision `n` and the next.
fn segment(l: &Loaded, x: &PhasePoint) -> Result<OrbitSegment, Failure> {
    let duration = l.duration()?;
    let budget = l.scenario.max_events.unwrap_or(DEFAULT_MAX_EVENTS);
    let seg = match l.scenario.collisions {
        Some(n) => {
            let seg = evolve(x, &l.table, duration, n.saturating_add(1).min(budget))
                .map_err(|e| Failure::from_core(e, "start"))?;
            if seg.events.len() >= n {
                seg.prefix(n)
            } else {
                seg
            }
        }
        None => evolve(x, &l.table, duration, budget).map_err(|e| Failure::from_core(e, "start"))?,
    };
    Ok(seg)
}

fn flag_name(seg: &OrbitSegment) -> Option<String> {
    seg.singular.map(|f| f.to_string())
}

pub fn simulate(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let x = start_point(l, &mut None)?;
    let seg = segment(l, &x)?;
    let d = l.table.dim();
    let events: Vec<Value> = seg
        .events
        .iter()
        .map(|e| {
            json!({
                "time": e.time,
                "cylinder_index": e.cylinder_index + 1,
                "q_hit": e.q_hit,
                "v_pre": e.v_pre,
                "v_post": e.v_post,
                "cos_phi": e.cos_phi,
            })
        })
        .collect();
    let header: Vec<String> = ["time".to_string(), "cylinder_index".to_string()]
        .into_iter()
        .chain(columns("q_hit", d))
        .chain(columns("v_pre", d))
        .chain(columns("v_post", d))
        .chain(["cos_phi".to_string()])
        .collect();
    let rows = seg.events.iter().map(|e| {
        let mut row = vec![num(e.time), (e.cylinder_index + 1).to_string()];
        row.extend(e.q_hit.iter().chain(&e.v_pre).chain(&e.v_post).map(|&x| num(x)));
        row.push(num(e.cos_phi));
        row
    });
    sink.csv("segment.csv", &header, rows)?;
    let symbolic: Vec<usize> = seg.symbolic().iter().map(|i| i + 1).collect();
    sink.json(
        "segment.json",
        json!({
            "start": seg.start,
            "end": seg.end,
            "duration": seg.duration,
            "singular_flag": flag_name(&seg),
            "symbolic": symbolic,
            "events": events,
        }),
    )?;
    Ok(json!({
        "collisions": seg.events.len(),
        "duration": seg.duration,
        "singular_flag": flag_name(&seg),
    }))
}

pub fn qmonitor(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let mut rng = None;
    let x = start_point(l, &mut rng)?;
    let seg = segment(l, &x)?;
    let d = l.table.dim();
    let n = match &l.scenario.normal {
        Some(n) if n.z.len() == d && n.w.len() == d => NormalVector::new(n.z.clone(), n.w.clone()),
        Some(_) => {
            return Err(Failure::input(
                format!("normal.z and normal.w must have {d} entries"),
                Some("normal".into()),
            ))
        }
        None => {
            let rng = rng_for(l, &mut rng)?;
            NormalVector::new(random_unit_vector(d, rng), random_unit_vector(d, rng))
        }
    };
    let samples = evolve_normal(&n, &seg, &l.table).map_err(|e| Failure::from_core(e, "start"))?;
    let header: Vec<String> = ["time".to_string()]
        .into_iter()
        .chain(columns("z", d))
        .chain(columns("w", d))
        .chain(["Q".to_string(), "kind".to_string()])
        .collect();
    let rows = samples.iter().map(|s| {
        let mut row = vec![num(s.time)];
        row.extend(s.normal.z.iter().chain(&s.normal.w).map(|&x| num(x)));
        row.push(num(s.q_value));
        row.push(kind_name(s.kind).to_string());
        row
    });
    sink.csv("qmonitor.csv", &header, rows)?;
    let max_rise = samples
        .windows(2)
        .map(|w| w[1].q_value - w[0].q_value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(json!({
        "collisions": seg.events.len(),
        "samples": samples.len(),
        "q_start": samples.first().map(|s| s.q_value),
        "q_end": samples.last().map(|s| s.q_value),
        "max_q_rise": if samples.len() > 1 { Some(max_rise) } else { None },
    }))
}

fn kind_name(k: SampleKind) -> &'static str {
    match k {
        SampleKind::Start => "start",
        SampleKind::PreCollision => "pre_collision",
        SampleKind::PostCollision => "post_collision",
        SampleKind::End => "end",
    }
}

pub fn sufficiency_cmd(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let x = start_point(l, &mut None)?;
    let seg = segment(l, &x)?;
    let verdict = sufficiency(&seg, &l.table).map_err(|e| Failure::from_core(e, "start"))?;
    let numeric =
        neutral_space_numeric(&seg, &l.table).map_err(|e| Failure::from_core(e, "start"))?;
    let symbolic = seg.symbolic();
    let richness = if symbolic.is_empty() {
        None
    } else {
        Some(richness_report(&symbolic, &l.table).map_err(|e| Failure::from_core(e, "table"))?)
    };
    let span =
        span_decomposition(&symbolic, &l.table).map_err(|e| Failure::from_core(e, "table"))?;
    let one_based: Vec<usize> = symbolic.iter().map(|i| i + 1).collect();
    let richness = richness.map(|r| {
        json!({
            "collided": r.collided.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "span_dim": r.span_dim,
            "full_span": r.full_span,
            "codim2_ok": r.codim2_ok,
            "relaxed_ok": r.relaxed_ok,
        })
    });
    let summary = json!({
        "sufficient": verdict.sufficient,
        "neutral_dim": verdict.neutral_dim,
        "numeric_neutral_dim": numeric.dim,
        "n_collisions": seg.events.len(),
    });
    sink.json(
        "sufficiency.json",
        json!({
            "sufficient": verdict.sufficient,
            "neutral_dim": verdict.neutral_dim,
            "numeric_neutral_dim": numeric.dim,
            "n_collisions": seg.events.len(),
            "duration": seg.duration,
            "symbolic": one_based,
            "neutral_basis": verdict.witness.basis,
            "advances": verdict.witness.advances,
            "richness": richness,
            "span": span,
        }),
    )?;
    Ok(summary)
}

pub fn lyapunov(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let mut rng = None;
    let x = start_point(l, &mut rng)?;
    let seed = l.seed()?;
    let duration = l.duration()?;
    let interval = l.scenario.renorm_interval.unwrap_or(DEFAULT_RENORM_INTERVAL);
    let report = lyapunov_spectrum(&x, &l.table, duration, interval, seed)
        .map_err(|e| Failure::from_core(e, "start"))?;
    let sum: f64 = report.exponents.iter().sum();
    let doc = json!({
        "exponents": report.exponents,
        "sum": sum,
        "duration": report.duration,
        "renorm_interval": report.renorm_interval,
        "renormalizations": report.renormalizations,
        "collisions": report.collisions,
        "seed": report.seed,
        "start": x,
    });
    sink.json("lyapunov.json", doc)?;
    Ok(json!({ "exponents": report.exponents, "sum": sum }))
}

pub fn survey(l: &Loaded, sink: &mut Sink) -> Result<Report, Failure> {
    let seed = l.seed()?;
    let duration = l.duration()?;
    let samples = l.scenario.samples.ok_or_else(|| Failure::missing("samples"))?;
    let mode = l.scenario.mode.unwrap_or(SurveyMode::Generic);
    let survey = survey_sufficiency(&l.table, samples, duration, seed, mode);
    let header: Vec<String> = [
        "sample_id",
        "seed",
        "n_collisions",
        "distinct_cylinders",
        "span_dim",
        "codim2_ok",
        "full_span",
        "neutral_dim",
        "sufficient",
        "singular_flag",
        "relaxed_ok",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    sink.csv("survey.csv", &header, survey.rows.iter().map(survey_row))?;
    let summary = serde_json::to_value(&survey.summary).expect("summary serializes");
    sink.json("survey_summary.json", summary.clone())?;
    Ok(summary)
}

fn survey_row(r: &SurveyRow) -> Vec<String> {
    let opt = |o: Option<String>| o.unwrap_or_default();
    vec![
        r.sample_id.to_string(),
        r.seed.to_string(),
        r.n_collisions.to_string(),
        r.distinct_cylinders.to_string(),
        r.span_dim.to_string(),
        r.codim2_ok.to_string(),
        r.full_span.to_string(),
        opt(r.neutral_dim.map(|x| x.to_string())),
        opt(r.sufficient.map(|x| x.to_string())),
        opt(r.singular_flag.clone()),
        r.relaxed_ok.to_string(),
    ]
}
