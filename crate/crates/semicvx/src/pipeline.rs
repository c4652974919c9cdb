//! Staged runs: partition modulus, envelope, construction, reduction, and
//! the full end-to-end pipeline. The CLI and the examples are thin layers
//! over these functions.

use std::path::Path;

use serde::Serialize;

use crate::config::PipelineConfig;
use crate::counterexample::{
    check_profile_slope_identity, check_slope_profile_sandwich, divergence_witness,
    verify_g_conditions, verify_line_modulus, verify_semiconvexity, verify_taylor_bound,
    CounterexampleBundle, GConditionReports, WitnessReport,
};
use crate::envelope::{
    check_envelope_growth, check_envelope_sandwich, check_uniform_growth_bound, EnvelopeResult,
};
use crate::error::{Error, Result};
use crate::geometry::{
    build_projection, extract_reduction, lifted_ray, lifted_triples, lifted_witness,
    recession_cone, verify_lifted_semiconvexity, verify_projection, FunnelReduction, HPolyhedron,
    LiftedField, PolyCone, ProjectionReport, ReductionCase,
};
use crate::modulus::{condition_star_estimate, ConditionStarReport, ConditionVerdict};
use crate::partition_modulus::{
    build_grid, compute_partition_modulus, GridParams, PartitionModulus, Pruning, RatioReport,
    StructuralReport,
};
use crate::report::{self, CsvWriter, VerificationReport};
use crate::sample;
use crate::width::WidthSpec;

/// Exit codes: 0 pass, 2 configuration, 3 construction, 4 geometry,
/// 10 declared-out-of-scope branch (strip case).
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Domain(_) | Error::Range(_)
        | Error::Json(_) => 2,
        Error::FlatEnvelope { .. }
        | Error::DegenerateModulus(_)
        | Error::SubadditivityViolation(_) => 3,
        Error::UnsupportedDimension { .. }
        | Error::ReductionNotApplicable(_)
        | Error::ProjectionInvalid(_)
        | Error::ExtractionFailed(_)
        | Error::DomainTruncation(_) => 4,
        _ => 1,
    }
}

pub const EXIT_STRIP: i32 = 10;

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: String,
    pub stage: String,
    pub exit_code: i32,
}

fn grid_params(cfg: &PipelineConfig) -> GridParams {
    GridParams::new(cfg.grid.t_max, cfg.grid.gamma, cfg.grid.rho)
        .with_cap(cfg.grid.cap)
        .with_anchors(vec![cfg.construction.a_min])
}

fn default_probes(x_max: f64) -> Vec<f64> {
    let hi = x_max.log10().floor() as i32;
    if hi < 1 {
        return vec![x_max * 0.5, x_max * 0.9];
    }
    sample::decade_probes(1, hi, 1)
}

// ---------------------------------------------------------------------------
// omega-eta stage

pub struct OmegaEtaRun {
    pub pm: PartitionModulus,
    pub gamma: f64,
    pub rho: f64,
    pub ratio: RatioReport,
    pub structural: StructuralReport,
}

#[derive(Serialize)]
struct OmegaEtaSummary<'a> {
    nodes: usize,
    t_max: f64,
    gamma: f64,
    rho: f64,
    sandwich_ok: bool,
    ratio: &'a RatioReport,
    structural: &'a StructuralReport,
    pass: bool,
}

pub fn run_omega_eta(cfg: &PipelineConfig) -> Result<OmegaEtaRun> {
    let w = cfg.omega.build()?;
    let eta = cfg.width()?;
    let grid = build_grid(&eta, &grid_params(cfg))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;

    let t_max = grid.t_max();
    let lo = (t_max * 1e-3).max(grid.nodes()[1] * 4.0).min(t_max * 0.5);
    let ratio = pm.ratio_report((lo, t_max), 16)?;

    let pair_lo = grid.nodes()[1];
    let pairs = sample::positive_pairs(cfg.verification.seed, pair_lo, t_max / 2.0, cfg.verification.structural_pairs);
    let structural = pm.check_structural_inequalities(&pairs)?;
    Ok(OmegaEtaRun { pm, gamma: cfg.grid.gamma, rho: cfg.grid.rho, ratio, structural })
}

pub fn write_omega_eta(run: &OmegaEtaRun, dir: &Path) -> Result<bool> {
    std::fs::create_dir_all(dir)?;
    let pm = &run.pm;
    let mut csv = CsvWriter::create(&dir.join("omega_eta.csv"), &["h", "omega_eta", "lower", "upper", "ratio"])?;
    let xs = pm.grid().nodes();
    for k in 1..xs.len() {
        let h = xs[k];
        let v = pm.value_at_node(k);
        let ratio = pm.omega().eval(h)? / v;
        csv.row(&[h, v, pm.lower_bound().ys()[k], pm.upper_bound().ys()[k], ratio])?;
    }
    csv.finish()?;

    // optimal partitions at decade probes, whitespace-separated node lists
    let mut lines = String::new();
    for probe in default_probes(pm.grid().t_max()) {
        let idx = pm.grid().floor_index(probe)?;
        if idx == 0 {
            continue;
        }
        let p = pm.optimal_partition(xs[idx])?;
        let words: Vec<String> = p.points.iter().map(|v| report::format_float(*v)).collect();
        lines.push_str(&words.join(" "));
        lines.push('\n');
    }
    std::fs::write(dir.join("partitions.txt"), lines)?;

    let pass = run.structural.pass();
    let summary = OmegaEtaSummary {
        nodes: pm.grid().len(),
        t_max: pm.grid().t_max(),
        gamma: run.gamma,
        rho: run.rho,
        sandwich_ok: true,
        ratio: &run.ratio,
        structural: &run.structural,
        pass,
    };
    report::write_json(&dir.join("omega_eta_summary.json"), &summary)?;
    Ok(pass)
}

// ---------------------------------------------------------------------------
// envelope stage

pub struct EnvelopeRun {
    pub pm: PartitionModulus,
    pub env: EnvelopeResult,
    pub sandwich: VerificationReport,
    pub growth: VerificationReport,
    pub uniform: VerificationReport,
}

impl EnvelopeRun {
    pub fn pass(&self) -> bool {
        self.sandwich.pass && self.growth.pass && self.uniform.pass
    }
}

pub fn run_envelope_stage(cfg: &PipelineConfig, pm: PartitionModulus) -> Result<EnvelopeRun> {
    let env = EnvelopeResult::from_grid(pm.values())?;
    if !env.envelope.is_concave(0.0) {
        return Err(Error::Inconsistency("hull produced a non-concave envelope".into()));
    }
    let sandwich = check_envelope_sandwich(pm.values(), &env.envelope)?;

    let t_max = pm.grid().t_max();
    let mut rng = sample::rng(cfg.verification.seed ^ 0x5eed_e11e);
    let ts: Vec<f64> = (0..cfg.verification.envelope_samples)
        .map(|_| sample::log_uniform(&mut rng, pm.grid().nodes()[1].max(1e-6), t_max / 2.0))
        .collect();
    let growth =
        check_envelope_growth(&env.envelope, pm.omega(), pm.eta(), &ts, |t| pm.grid_slack(t))?;

    let pairs = sample::positive_pairs(
        cfg.verification.seed ^ 0x0e11_a9e5,
        pm.grid().nodes()[1].max(1e-6),
        t_max / 2.0,
        cfg.verification.envelope_samples,
    );
    let uniform = check_uniform_growth_bound(&env.envelope, pm.omega(), pm.eta(), &pairs, |t| {
        pm.grid_slack(t)
    })?;
    Ok(EnvelopeRun { pm, env, sandwich, growth, uniform })
}

pub fn run_envelope(cfg: &PipelineConfig) -> Result<EnvelopeRun> {
    let run = run_omega_eta(cfg)?;
    run_envelope_stage(cfg, run.pm)
}

#[derive(Serialize)]
struct EnvelopeChecks<'a> {
    sandwich: &'a VerificationReport,
    growth: &'a VerificationReport,
    uniform: &'a VerificationReport,
    pass: bool,
}

pub fn write_envelope(run: &EnvelopeRun, dir: &Path) -> Result<bool> {
    std::fs::create_dir_all(dir)?;
    let psi = &run.env.envelope;
    let mut csv = CsvWriter::create(&dir.join("envelope.csv"), &["breakpoint", "value", "right_slope"])?;
    let n = psi.breakpoints().len();
    for i in 0..n {
        let slope = psi.segment_slope(i.min(n - 2));
        csv.row(&[psi.breakpoints()[i], psi.values()[i], slope])?;
    }
    csv.finish()?;
    let pass = run.pass();
    report::write_json(
        &dir.join("envelope_checks.json"),
        &EnvelopeChecks {
            sandwich: &run.sandwich,
            growth: &run.growth,
            uniform: &run.uniform,
            pass,
        },
    )?;
    Ok(pass)
}

// ---------------------------------------------------------------------------
// construct stage

pub struct ConstructRun {
    pub envelope_run: EnvelopeRun,
    pub bundle: CounterexampleBundle,
    pub condition: ConditionStarReport,
    pub condition_warning: bool,
    pub g_conditions: GConditionReports,
    pub slope_sandwich: VerificationReport,
    pub slope_identity: VerificationReport,
    pub semiconvexity: VerificationReport,
    pub taylor: VerificationReport,
    pub line_modulus: VerificationReport,
    pub witness: WitnessReport,
}

impl ConstructRun {
    pub fn pass(&self) -> bool {
        self.envelope_run.pass()
            && self.g_conditions.pass()
            && self.slope_sandwich.pass
            && self.slope_identity.pass
            && self.semiconvexity.pass
            && self.taylor.pass
            && self.line_modulus.pass
            && self.witness.lower_bound_ok
    }
}

#[derive(Serialize)]
struct ConstructVerification<'a> {
    condition: &'a ConditionStarReport,
    condition_warning: bool,
    envelope: EnvelopeChecks<'a>,
    g_conditions: &'a GConditionReports,
    slope_sandwich: &'a VerificationReport,
    slope_identity: &'a VerificationReport,
    semiconvexity: &'a VerificationReport,
    taylor: &'a VerificationReport,
    line_modulus: &'a VerificationReport,
    witness: &'a WitnessReport,
    pass: bool,
}

pub fn run_construct(cfg: &PipelineConfig) -> Result<ConstructRun> {
    let eta = cfg.width()?;
    run_construct_with(cfg, eta)
}

pub fn run_construct_with(cfg: &PipelineConfig, eta: WidthSpec) -> Result<ConstructRun> {
    let w = cfg.omega.build()?;
    let v = &cfg.verification;

    let window = (
        v.condition_window.0.min(w.max_argument() / 2.0),
        v.condition_window.1.min(w.max_argument()),
    );
    let condition = condition_star_estimate(&w, v.condition_n_max, window, v.condition_samples, v.eps_star)?;
    let condition_warning = condition.verdict != ConditionVerdict::Holds;

    let grid = build_grid(&eta, &grid_params(cfg))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;
    let envelope_run = run_envelope_stage(cfg, pm)?;
    let pm = &envelope_run.pm;

    let bundle = CounterexampleBundle::build(
        pm,
        &envelope_run.env,
        cfg.construction.a_min,
        cfg.construction.eps_pos,
    )?;
    let x_max = bundle.x_max();

    let xs_sandwich: Vec<f64> = (0..1000)
        .map(|i| {
            let t = i as f64 / 1000.0;
            bundle.base() * (1.0 - t) + (grid.t_max() / 2.0) * t
        })
        .collect();
    let slope_sandwich = check_slope_profile_sandwich(&bundle, &xs_sandwich)?;

    let mut rng = sample::rng(v.seed ^ 0x51de_a11e);
    let xs_identity: Vec<f64> = (0..1000)
        .map(|_| sample::log_uniform(&mut rng, (x_max * 1e-9).max(1e-9), x_max))
        .collect();
    let slope_identity = check_profile_slope_identity(&bundle, &xs_identity)?;

    let g_pairs = sample::positive_pairs(v.seed ^ 0x6c0d_e001, 1e-3_f64.min(x_max / 10.0), x_max / 2.0, v.pairs);
    let g_conditions = verify_g_conditions(&bundle, &g_pairs, |t| pm.grid_slack(t))?;

    let funnel = bundle.domain();
    let x_lo = (x_max * 1e-6).min(1e-3).max(1e-12);
    let x_hi = x_max * 0.9;
    let triples = sample::funnel_triples(v.seed, &funnel, x_lo, x_hi, v.triples);
    let semiconvexity = verify_semiconvexity(&bundle, &w, &triples, 1.0, v.tolerance_scale)?;

    let taylor_pairs = sample::funnel_pairs(v.seed ^ 0x7a11_0f12, &funnel, x_lo, x_hi, v.pairs);
    let taylor = verify_taylor_bound(&bundle, &w, &taylor_pairs)?;

    let lines = sample::funnel_lines(v.seed ^ 0x11_e5, &funnel, x_lo.max(1e-3), x_hi, v.lines, v.pairs_per_line);
    let line_modulus = verify_line_modulus(&bundle, &w, &lines)?;

    let probes = v.probes.clone().unwrap_or_else(|| default_probes(x_max));
    let witness = divergence_witness(&bundle, &probes, |t| pm.grid_slack(t))?;

    Ok(ConstructRun {
        envelope_run,
        bundle,
        condition,
        condition_warning,
        g_conditions,
        slope_sandwich,
        slope_identity,
        semiconvexity,
        taylor,
        line_modulus,
        witness,
    })
}

pub fn construct_verification_json(run: &ConstructRun) -> Result<String> {
    let doc = ConstructVerification {
        condition: &run.condition,
        condition_warning: run.condition_warning,
        envelope: EnvelopeChecks {
            sandwich: &run.envelope_run.sandwich,
            growth: &run.envelope_run.growth,
            uniform: &run.envelope_run.uniform,
            pass: run.envelope_run.pass(),
        },
        g_conditions: &run.g_conditions,
        slope_sandwich: &run.slope_sandwich,
        slope_identity: &run.slope_identity,
        semiconvexity: &run.semiconvexity,
        taylor: &run.taylor,
        line_modulus: &run.line_modulus,
        witness: &run.witness,
        pass: run.pass(),
    };
    report::to_json_string(&doc)
}

pub fn write_construct(run: &ConstructRun, dir: &Path) -> Result<bool> {
    std::fs::create_dir_all(dir)?;
    report::write_json(&dir.join("bundle.json"), &run.bundle.summary())?;
    std::fs::write(dir.join("verification.json"), construct_verification_json(run)?)?;
    let mut csv = CsvWriter::create(&dir.join("witness.csv"), &["x", "growth", "lower_bound"])?;
    for row in &run.witness.rows {
        csv.row(&[row.x, row.growth, row.lower_bound])?;
    }
    csv.finish()?;
    Ok(run.pass())
}

// ---------------------------------------------------------------------------
// reduce stage

pub struct ReduceRun {
    pub polyhedron: HPolyhedron,
    pub cone: PolyCone,
    pub projection: ProjectionReport,
    pub reduction: FunnelReduction,
}

impl ReduceRun {
    pub fn pass(&self) -> bool {
        self.projection.pass && self.reduction.containment.pass && self.reduction.axis.pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.reduction.case == ReductionCase::Strip {
            EXIT_STRIP
        } else if self.pass() {
            0
        } else {
            4
        }
    }
}

#[derive(Serialize)]
struct ReduceSummary<'a> {
    case: &'a ReductionCase,
    map: Vec<Vec<f64>>,
    shift: [f64; 2],
    eta_breakpoints: Option<&'a [f64]>,
    eta_values: Option<&'a [f64]>,
    strip: Option<&'a crate::geometry::StripData>,
    generators: Vec<Vec<f64>>,
    lineality: Vec<Vec<f64>>,
    projection: &'a ProjectionReport,
    containment: &'a VerificationReport,
    axis: &'a VerificationReport,
    note: Option<&'static str>,
    pass: bool,
}

pub fn run_reduce(cfg: &PipelineConfig) -> Result<ReduceRun> {
    let p = cfg.polyhedron()?;
    let cone = recession_cone(&p)?;
    if cone.is_trivial() {
        return Err(Error::ReductionNotApplicable(
            "theorem hypothesis violated: the polyhedron is bounded".into(),
        ));
    }
    if cone.is_full_dimensional() {
        return Err(Error::ReductionNotApplicable(
            "theorem hypothesis violated: contains a translation of a cone with non-empty interior"
                .into(),
        ));
    }
    let map = build_projection(&p, &cone)?;
    let seed = cfg.verification.seed;
    let projection = verify_projection(&p, &cone, &map, seed, 16, &[1.0, 10.0, 100.0])?;
    let reduction = extract_reduction(&p, &cone, &map, cfg.grid.t_max, seed ^ 0xfeed, 64)?;
    Ok(ReduceRun { polyhedron: p, cone, projection, reduction })
}

pub fn reduce_summary_json(run: &ReduceRun) -> Result<String> {
    let red = &run.reduction;
    let doc = ReduceSummary {
        case: &red.case,
        map: (0..2)
            .map(|i| red.map.matrix().row(i).iter().copied().collect())
            .collect(),
        shift: red.shift,
        eta_breakpoints: red.width.as_ref().map(|w| w.breakpoints()),
        eta_values: red.width.as_ref().map(|w| w.values()),
        strip: red.strip.as_ref(),
        generators: run.cone.generators().iter().map(|g| g.iter().copied().collect()).collect(),
        lineality: run.cone.lineality().iter().map(|g| g.iter().copied().collect()).collect(),
        projection: &run.projection,
        containment: &red.containment,
        axis: &red.axis,
        note: (red.case == ReductionCase::Strip)
            .then_some("classified Strip; witness out of scope (external reference)"),
        pass: run.pass(),
    };
    report::to_json_string(&doc)
}

pub fn write_reduce(run: &ReduceRun, dir: &Path) -> Result<i32> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("reduction.json"), reduce_summary_json(run)?)?;
    Ok(run.exit_code())
}

// ---------------------------------------------------------------------------
// full pipeline

pub struct PipelineRun {
    pub reduce: ReduceRun,
    pub construct: Option<ConstructRun>,
    pub lifted_semiconvexity: Option<VerificationReport>,
    pub lifted_witness: Option<WitnessReport>,
    /// Lifted witness growth ratio divided by the planar one.
    pub witness_ratio_vs_planar: Option<f64>,
}

impl PipelineRun {
    pub fn pass(&self) -> bool {
        if self.reduce.reduction.case == ReductionCase::Strip {
            return self.reduce.projection.pass && self.reduce.reduction.containment.pass;
        }
        let Some(c) = &self.construct else {
            return false;
        };
        let lifted_ok = self.lifted_semiconvexity.as_ref().is_some_and(|r| r.pass)
            && self.lifted_witness.as_ref().is_some_and(|w| w.lower_bound_ok)
            && self
                .witness_ratio_vs_planar
                .is_some_and(|r| (0.5..=2.0).contains(&r));
        self.reduce.pass() && c.pass() && lifted_ok
    }

    pub fn exit_code(&self) -> i32 {
        if self.reduce.reduction.case == ReductionCase::Strip {
            EXIT_STRIP
        } else if self.pass() {
            0
        } else {
            1
        }
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    let reduce = run_reduce(cfg)?;
    if reduce.reduction.case == ReductionCase::Strip {
        return Ok(PipelineRun {
            reduce,
            construct: None,
            lifted_semiconvexity: None,
            lifted_witness: None,
            witness_ratio_vs_planar: None,
        });
    }

    let eta = WidthSpec::piecewise(reduce.reduction.width.clone().expect("funnel case"))?;
    let construct = run_construct_with(cfg, eta)?;

    let field = LiftedField {
        bundle: &construct.bundle,
        reduction: &reduce.reduction,
        polyhedron: &reduce.polyhedron,
    };
    let v = &cfg.verification;
    let x_max = construct.bundle.x_max();
    let triples =
        lifted_triples(&field, (x_max * 1e-4).max(1e-3), x_max * 0.9, v.triples, v.seed ^ 0x11f7)?;
    let w = cfg.omega.build()?;
    let lifted_semi = verify_lifted_semiconvexity(&field, &w, &triples, 1.0, v.tolerance_scale)?;

    let (p0, d) = lifted_ray(&field, &reduce.cone)?;
    let probes = v.probes.clone().unwrap_or_else(|| default_probes(x_max));
    let pm = &construct.envelope_run.pm;
    let lifted_wit = lifted_witness(&field, &p0, &d, &probes, |t| pm.grid_slack(t))?;
    let ratio = lifted_wit.growth_ratio / construct.witness.growth_ratio;

    Ok(PipelineRun {
        reduce,
        construct: Some(construct),
        lifted_semiconvexity: Some(lifted_semi),
        lifted_witness: Some(lifted_wit),
        witness_ratio_vs_planar: Some(ratio),
    })
}

pub fn pipeline_report_json(run: &PipelineRun) -> Result<String> {
    #[derive(Serialize)]
    struct PipelineReport {
        reduce: serde_json::Value,
        construct: Option<serde_json::Value>,
        lifted_semiconvexity: Option<serde_json::Value>,
        lifted_witness: Option<serde_json::Value>,
        witness_ratio_vs_planar: Option<f64>,
        pass: bool,
        exit_code: i32,
    }
    let doc = PipelineReport {
        reduce: serde_json::from_str(&reduce_summary_json(&run.reduce)?)?,
        construct: match &run.construct {
            Some(c) => Some(serde_json::from_str(&construct_verification_json(c)?)?),
            None => None,
        },
        lifted_semiconvexity: run
            .lifted_semiconvexity
            .as_ref()
            .map(serde_json::to_value)
            .transpose()?,
        lifted_witness: run.lifted_witness.as_ref().map(serde_json::to_value).transpose()?,
        witness_ratio_vs_planar: run.witness_ratio_vs_planar,
        pass: run.pass(),
        exit_code: run.exit_code(),
    };
    report::to_json_string(&doc)
}

pub fn write_pipeline(run: &PipelineRun, dir: &Path) -> Result<i32> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("pipeline_report.json"), pipeline_report_json(run)?)?;
    if let Some(c) = &run.construct {
        write_construct(c, dir)?;
    }
    std::fs::write(dir.join("reduction.json"), reduce_summary_json(&run.reduce)?)?;
    Ok(run.exit_code())
}
