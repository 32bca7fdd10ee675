//! `fixlab`: exact checks of contractive conditions from the command line.
//!
//! Exit status: 0 when every check passes, 1 when a condition fails with a
//! witness or a certification fails, 2 on usage errors.

mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fixlab::conditions::{
    check_condition, check_pointwise, decide_all_eps, default_eps, kannan_equivalence_audit, modulus_profile,
    Assertion, CaseGaps, ConstraintInstance, PairSet,
};
use fixlab::gallery::{self, GalleryId};
use fixlab::orbit::{cauchy_diagnostics, picard_orbit, solve_fixed_point, CauchyConfig, UniquenessCheck};
use fixlab::scalar::parse_list;
use fixlab::search::{find_separation, SearchConfig, SearchOutcome};
use fixlab::{Condition, ConditionReport, Definition, Domain, MetricSpace, Point, Rational, SelfMap};

use render::{Format, Numbers, Report};

#[derive(Parser)]
#[command(name = "fixlab", version, about = "Exact verification of Banach- and Kannan-type contractive conditions")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Add a k-digit decimal approximation next to exact values
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in example (HALVING, PIECEWISE, KANNAN_L1, HARMONIC)
    #[arg(long, conflicts_with = "space", required_unless_present = "space")]
    gallery: Option<String>,

    /// Space/map definition file
    #[arg(long)]
    space: Option<PathBuf>,

    /// Truncation cutoff (points enumerated, default orbit length)
    #[arg(long)]
    cutoff: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check one condition on a space and map
    Check {
        /// Condition (CM_B, CM_K, CJM_B, CJM_K, B1, B2, K_II, K_III, K_IV)
        #[arg(long)]
        cond: String,
        #[command(flatten)]
        source: Source,
        /// Pair "p,q" for pointwise conditions (repeatable; default: all pairs)
        #[arg(long = "pairs", value_name = "P,Q")]
        pairs: Vec<String>,
        /// Orbit start for orbit conditions
        #[arg(long)]
        start: Option<String>,
        /// Orbit prefix length (default: the cutoff)
        #[arg(long)]
        prefix: Option<usize>,
        /// Comma-separated ε samples (default 1/3,1/2,1,2)
        #[arg(long)]
        eps: Option<String>,
        /// Decide the condition for every ε > 0 instead of sampling
        #[arg(long)]
        all_eps: bool,
    },
    /// Tabulate the exact modulus δ*(ε) over several truncations
    Modulus {
        /// Condition (CJM_B, CJM_K, B1, B2, K_II, K_III, K_IV)
        #[arg(long)]
        cond: String,
        #[command(flatten)]
        source: Source,
        /// Comma-separated ε samples (default 1/3,1/2,1,2)
        #[arg(long)]
        eps: Option<String>,
        /// Comma-separated cutoffs (pair conditions) or orbit prefixes
        #[arg(long)]
        cutoffs: Option<String>,
        /// Orbit start for orbit conditions
        #[arg(long)]
        start: Option<String>,
    },
    /// Iterate a Picard orbit, with optional audits
    Orbit {
        #[command(flatten)]
        source: Source,
        /// Starting point
        #[arg(long)]
        start: String,
        /// Number of map applications (default: the cutoff)
        #[arg(long)]
        steps: Option<usize>,
        /// Compare K_II, K_III and K_IV on the orbit
        #[arg(long)]
        audit: bool,
        /// ε samples for the audit (default 1/3,1/2,1,2)
        #[arg(long)]
        eps: Option<String>,
        /// Run the fixed-point solver
        #[arg(long)]
        solve: bool,
        /// Stop the solver once a gap is at most this value
        #[arg(long, default_value = "0")]
        gap_tolerance: String,
        /// Comma-separated points to test for uniqueness of the fixed point
        #[arg(long)]
        candidates: Option<String>,
        /// Report G-Cauchy and Cauchy tail diagnostics
        #[arg(long)]
        cauchy: bool,
        /// Largest window offset p
        #[arg(long, default_value_t = 10)]
        p_max: usize,
        /// First tail index (default: steps / 10)
        #[arg(long)]
        tail_start: Option<usize>,
        /// Smallness threshold (default 1/(tail_start + 1))
        #[arg(long)]
        threshold: Option<String>,
        /// Distances above this are evidence against
        #[arg(long, default_value = "1")]
        bound: String,
    },
    /// Built-in examples
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Search small finite instances
    Search {
        #[command(subcommand)]
        action: SearchAction,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List the built-in examples
    List,
    /// Write an example's definition file
    Build {
        id: String,
        /// Truncation cutoff recorded in the file
        #[arg(long, default_value_t = 10)]
        cutoff: u64,
        /// Output path (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every fact of an example
    Certify {
        id: String,
        /// Truncation cutoff for the checks
        #[arg(long, default_value_t = 50)]
        cutoff: u64,
    },
}

#[derive(Subcommand)]
enum SearchAction {
    /// Find an instance where the hold conditions hold and the fail conditions fail
    Separate {
        /// Comma-separated conditions that must hold
        #[arg(long, default_value = "")]
        hold: String,
        /// Comma-separated conditions that must fail
        #[arg(long, default_value = "")]
        fail: String,
        /// Largest instance size (at most 7)
        #[arg(long)]
        max_points: usize,
        /// Smallest instance size
        #[arg(long, default_value_t = 1)]
        min_points: usize,
        /// Comma-separated positive distances
        #[arg(long)]
        grid: String,
        /// Sample randomly with this seed instead of enumerating
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random samples
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Write the witness definition file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let numbers = Numbers { decimal: cli.decimal };
    let report = match run(cli.command, numbers).and_then(|r| Ok((r.render(cli.format)?, r.exit))) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(report.0.as_bytes());
    ExitCode::from(report.1)
}

fn run(command: Command, nums: Numbers) -> anyhow::Result<Report> {
    match command {
        Command::Check { cond, source, pairs, start, prefix, eps, all_eps } => {
            check(&cond, &source, &pairs, start.as_deref(), prefix, eps.as_deref(), all_eps, nums)
        }
        Command::Modulus { cond, source, eps, cutoffs, start } => {
            modulus(&cond, &source, eps.as_deref(), cutoffs.as_deref(), start.as_deref(), nums)
        }
        Command::Orbit {
            source,
            start,
            steps,
            audit,
            eps,
            solve,
            gap_tolerance,
            candidates,
            cauchy,
            p_max,
            tail_start,
            threshold,
            bound,
        } => {
            let opts = OrbitOptions {
                steps,
                audit,
                eps,
                solve,
                gap_tolerance,
                candidates,
                cauchy,
                p_max,
                tail_start,
                threshold,
                bound,
            };
            orbit(&source, &start, opts, nums)
        }
        Command::Gallery { action } => match action {
            GalleryAction::List => Ok(gallery_list()),
            GalleryAction::Build { id, cutoff, out } => gallery_build(&id, cutoff, out),
            GalleryAction::Certify { id, cutoff } => gallery_certify(&id, cutoff),
        },
        Command::Search { action } => match action {
            SearchAction::Separate { hold, fail, max_points, min_points, grid, seed, budget, out } => {
                separate(&hold, &fail, max_points, min_points, &grid, seed, budget, out, nums)
            }
        },
    }
}

const DEFAULT_CUTOFF: u64 = 10;

/// Loads the space and map; gallery spaces are built at least to `needed`.
fn load(source: &Source, needed: u64) -> anyhow::Result<(MetricSpace, SelfMap)> {
    match (&source.gallery, &source.space) {
        (Some(id), _) => {
            let id: GalleryId = id.parse()?;
            let cutoff = source.cutoff.unwrap_or(DEFAULT_CUTOFF).max(needed);
            let mut g = gallery::build(id, cutoff)?;
            if let Some(c) = source.cutoff {
                g.space = g.space.with_cutoff(c)?;
            }
            Ok((g.space, g.map))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let def = Definition::from_json(&text)?;
            let space = match source.cutoff {
                Some(c) => def.space.with_cutoff(c)?,
                None => def.space,
            };
            Ok((space, def.map))
        }
        (None, None) => bail!("one of --gallery or --space is required"),
    }
}

fn eps_list(eps: Option<&str>) -> anyhow::Result<Vec<Rational>> {
    let list = match eps {
        Some(text) => parse_list(text)?,
        None => default_eps(),
    };
    if list.is_empty() {
        bail!("--eps is empty");
    }
    Ok(list)
}

fn parse_conditions(text: &str) -> anyhow::Result<Vec<Condition>> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| Ok(s.parse()?)).collect()
}

/// The serialized name of a unit enum variant.
fn label<T: serde::Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn witness_fields(c: &ConstraintInstance, nums: Numbers) -> Vec<(String, String)> {
    vec![
        ("witness".into(), format!("({}, {})", c.p, c.q)),
        ("indices".into(), format!("({}, {})", c.i, c.j)),
        ("premise".into(), nums.q(&c.premise)),
        ("conclusion".into(), nums.q(&c.conclusion)),
    ]
}

fn condition_report(report: &ConditionReport, nums: Numbers) -> Report {
    let mut out = Report::new(serde_json::to_value(report).expect("report serializes"));
    let mut fields = vec![
        ("condition".to_string(), report.condition.to_string()),
        ("verdict".into(), report.verdict.to_string()),
        ("truncation".into(), report.truncation.clone()),
        ("checked".into(), report.checked.to_string()),
    ];
    if let Some(w) = &report.witness {
        if let Some(eps) = &w.eps {
            fields.push(("eps".into(), nums.q(eps)));
        }
        fields.extend(witness_fields(&w.constraint, nums));
    }
    if let Some(c) = &report.certificate {
        fields.push(("certificate".into(), c.clone()));
    }
    for (p, q) in &report.skipped {
        fields.push(("skipped".into(), format!("({p}, {q}) equal points")));
    }
    out.fields("check", fields);
    out.exit = u8::from(!report.holds());
    out
}

#[allow(clippy::too_many_arguments)]
fn check(
    cond: &str,
    source: &Source,
    pairs: &[String],
    start: Option<&str>,
    prefix: Option<usize>,
    eps: Option<&str>,
    all_eps: bool,
    nums: Numbers,
) -> anyhow::Result<Report> {
    let cond: Condition = cond.parse()?;
    let (space, map) = load(source, prefix.unwrap_or(0) as u64)?;
    if cond.is_pointwise() {
        let set = if pairs.is_empty() {
            PairSet::All { cutoff: source.cutoff }
        } else {
            let parsed = pairs
                .iter()
                .map(|text| {
                    let (p, q) = text.split_once(',').ok_or_else(|| anyhow!("--pairs expects \"p,q\", got {text:?}"))?;
                    Ok((space.parse_point(p.trim())?, space.parse_point(q.trim())?))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            PairSet::Explicit(parsed)
        };
        return Ok(condition_report(&check_pointwise(cond, &space, &map, &set)?, nums));
    }
    let domain = if cond.is_orbitwise() {
        let start = start.ok_or_else(|| anyhow!("{cond} needs --start"))?;
        Domain::orbit(space.parse_point(start)?, prefix.unwrap_or(space.cutoff() as usize))
    } else {
        Domain::Cutoff(source.cutoff.unwrap_or(space.cutoff()))
    };
    if all_eps {
        let decision = decide_all_eps(cond, &space, &map, &domain)?;
        let mut out = Report::new(serde_json::to_value(&decision)?);
        let mut fields = vec![
            ("condition".to_string(), cond.to_string()),
            ("domain".into(), domain.to_string()),
            ("holds for every eps".into(), decision.holds.to_string()),
            ("critical eps tested".into(), decision.candidates.to_string()),
        ];
        if let Some(w) = &decision.witness {
            if let Some(eps) = &w.eps {
                fields.push(("eps".into(), nums.q(eps)));
            }
            fields.extend(witness_fields(&w.constraint, nums));
        }
        out.fields("check", fields);
        out.exit = u8::from(!decision.holds);
        return Ok(out);
    }
    let report = check_condition(cond, &space, &map, &domain, &eps_list(eps)?)?;
    Ok(condition_report(&report, nums))
}

fn modulus(
    cond: &str,
    source: &Source,
    eps: Option<&str>,
    cutoffs: Option<&str>,
    start: Option<&str>,
    nums: Numbers,
) -> anyhow::Result<Report> {
    let cond: Condition = cond.parse()?;
    if cond.is_pointwise() {
        bail!("{cond} has no ε–δ modulus; use `check`");
    }
    let depths: Vec<u64> = match cutoffs {
        Some(text) => text
            .split(',')
            .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad cutoff {s:?}")))
            .collect::<anyhow::Result<_>>()?,
        None => vec![source.cutoff.unwrap_or(DEFAULT_CUTOFF)],
    };
    let (space, map) = load(source, depths.iter().copied().max().unwrap_or(0))?;
    let domains: Vec<Domain> = if cond.is_orbitwise() {
        let start = space.parse_point(start.ok_or_else(|| anyhow!("{cond} needs --start"))?)?;
        depths.iter().map(|&n| Domain::orbit(start.clone(), n as usize)).collect()
    } else {
        depths.iter().map(|&n| Domain::Cutoff(n)).collect()
    };
    let eps = eps_list(eps)?;
    let profile = modulus_profile(cond, &space, &map, &domains, &eps)?;

    let mut headers = vec!["condition", "domain", "eps", "delta", "violations", "constraints"];
    let approx_header = nums.column("delta");
    if let Some(h) = &approx_header {
        headers.push(h);
    }
    if cond == Condition::KIII {
        headers.push("eps_is_s0");
    }
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for s in &profile.samples {
        let mut row = vec![
            cond.to_string(),
            s.domain.to_string(),
            s.eps.to_string(),
            s.delta.to_string(),
            s.violations.to_string(),
            s.constraints.to_string(),
        ];
        row.extend(nums.approx_m(&s.delta));
        if cond == Condition::KIII {
            row.push(s.eps_is_s0.to_string());
        }
        rows.push(row);
        let mut obj = json!({
            "condition": cond,
            "domain": s.domain,
            "depth": s.depth,
            "eps": s.eps,
            "delta": s.delta,
            "violations": s.violations,
            "constraints": s.constraints,
        });
        if let Some(a) = nums.approx_m(&s.delta) {
            obj["delta_decimal"] = json!(a);
        }
        if cond == Condition::KIII {
            obj["eps_is_s0"] = json!(s.eps_is_s0);
        }
        json_rows.push(obj);
    }
    let mut out = Report::new(json!({
        "condition": cond,
        "samples": json_rows,
        "excluded_eps": profile.excluded_eps,
    }));
    out.table("modulus", &headers, rows);
    for set in &profile.excluded_eps {
        let values: Vec<String> = set.values.iter().map(ToString::to_string).collect();
        out.fields("excluded eps", vec![(set.domain.to_string(), values.join(", "))]);
    }
    out.exit = u8::from(profile.samples.iter().any(|s| !s.delta.is_positive()));
    Ok(out)
}

struct OrbitOptions {
    steps: Option<usize>,
    audit: bool,
    eps: Option<String>,
    solve: bool,
    gap_tolerance: String,
    candidates: Option<String>,
    cauchy: bool,
    p_max: usize,
    tail_start: Option<usize>,
    threshold: Option<String>,
    bound: String,
}

fn orbit(source: &Source, start: &str, opts: OrbitOptions, nums: Numbers) -> anyhow::Result<Report> {
    let (space, map) = load(source, opts.steps.unwrap_or(0) as u64 + 1)?;
    let x0 = space.parse_point(start)?;
    let steps = opts.steps.unwrap_or(space.cutoff() as usize);
    let record = picard_orbit(&space, &map, &x0, steps)?;

    let mut headers = vec!["n", "point", "s_n"];
    let approx_header = nums.column("s_n");
    if let Some(h) = &approx_header {
        headers.push(h);
    }
    let rows: Vec<Vec<String>> = record
        .gaps
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let mut row = vec![n.to_string(), record.points[n].to_string(), s.to_string()];
            row.extend(nums.approx(s));
            row
        })
        .collect();
    let mut summary = vec![
        ("start".to_string(), x0.to_string()),
        ("steps".into(), record.gaps.len().to_string()),
        ("fixed point index".into(), record.fixed_hit.map_or("none".into(), |k| k.to_string())),
        ("cycle".into(), record.cycle.map_or("none".into(), |c| format!("start {} period {}", c.start, c.period))),
        ("gaps strictly decreasing".into(), record.monotone_strict.to_string()),
        ("alpha upper bound".into(), nums.q(&record.alpha_upper)),
    ];
    if let Some(k) = record.first_non_decrease {
        summary.push(("first non-decrease".into(), format!("s_{} >= s_{k}", k + 1)));
    }
    let mut json_out = json!({ "orbit": record });
    let mut out_blocks: Vec<(&str, Vec<(String, String)>)> = Vec::new();
    let mut exit = 0u8;

    if opts.audit {
        let eps = eps_list(opts.eps.as_deref())?;
        let audit = kannan_equivalence_audit(&space, &map, &x0, steps, &eps)?;
        let mut fields = vec![(
            "equivalence".to_string(),
            match &audit.equivalence {
                Assertion::Confirmed => "confirmed".to_string(),
                Assertion::Violated { detail } => format!("violated: {detail}"),
                Assertion::Skipped { reason } => format!("skipped: {reason}"),
            },
        )];
        for s in &audit.samples {
            fields.push((
                format!("eps {}", s.eps),
                format!(
                    "K_II {}  K_III {}  K_IV {}",
                    nums.m(&s.k_ii),
                    s.k_iii.as_ref().map_or("excluded".into(), |m| nums.m(m)),
                    nums.m(&s.k_iv)
                ),
            ));
        }
        match &audit.case_gaps {
            CaseGaps::Computed { fixed_index, fixed_point, delta1, delta2 } => {
                fields.push(("fixed point".into(), format!("{fixed_point} at index {fixed_index}")));
                fields.push(("delta1".into(), nums.q(delta1)));
                fields.push(("delta2".into(), nums.q(delta2)));
            }
            CaseGaps::Skipped { reason } => fields.push(("case gaps".into(), format!("skipped: {reason}"))),
        }
        fields.push(("CM_K on orbit pairs".into(), audit.cm_k.verdict.to_string()));
        if let Some(w) = &audit.cm_k.witness {
            let c = &w.constraint;
            fields.push(("CM_K witness".into(), format!("({}, {}): {} vs {}", c.p, c.q, c.conclusion, c.premise)));
        }
        if matches!(audit.equivalence, Assertion::Violated { .. }) {
            exit = 1;
        }
        json_out["audit"] = serde_json::to_value(&audit)?;
        out_blocks.push(("audit", fields));
    }

    if opts.solve {
        let tolerance: Rational = opts.gap_tolerance.parse()?;
        let candidates = match &opts.candidates {
            Some(text) => text.split(',').map(|p| space.parse_point(p.trim())).collect::<fixlab::Result<Vec<Point>>>()?,
            None => Vec::new(),
        };
        let report = solve_fixed_point(&space, &map, &x0, steps, &tolerance, &candidates)?;
        let mut fields = vec![
            ("outcome".to_string(), label(&report.outcome)),
            ("fixed point".into(), report.point.as_ref().map_or("none".into(), ToString::to_string)),
            ("iterations".into(), report.iterations.to_string()),
            ("alpha upper bound".into(), nums.q(&report.alpha_upper)),
            ("alpha = 0 certified".into(), report.alpha_zero_certified.to_string()),
            ("gaps strictly decreasing".into(), report.monotone_strict.to_string()),
        ];
        if let Some((p, q)) = &report.cm_b_counter_witness {
            fields.push(("CM_B counter-witness".into(), format!("({p}, {q})")));
        }
        for u in &report.uniqueness {
            let text = match u {
                UniquenessCheck::SecondFixedPoint { candidate, distance } => {
                    format!("{candidate}: second fixed point at distance {distance}")
                }
                UniquenessCheck::NotFixed { candidate, cm_b_holds, cm_k_holds } => {
                    format!("{candidate}: not fixed (CM_B {cm_b_holds}, CM_K {cm_k_holds})")
                }
                UniquenessCheck::SameAsFixedPoint { candidate } => format!("{candidate}: the fixed point itself"),
            };
            fields.push(("candidate".into(), text));
        }
        json_out["solve"] = serde_json::to_value(&report)?;
        out_blocks.push(("solve", fields));
    }

    if opts.cauchy {
        let tail_start = opts.tail_start.unwrap_or(steps / 10);
        let threshold = match &opts.threshold {
            Some(t) => t.parse()?,
            None => Rational::reciprocal_of(tail_start as u64 + 1),
        };
        let config = CauchyConfig { p_max: opts.p_max, tail_start, threshold, bound: opts.bound.parse()? };
        let report = cauchy_diagnostics(&space, &record, config)?;
        let mut fields = vec![
            ("horizon".to_string(), report.horizon.to_string()),
            ("G-Cauchy".into(), label(&report.g_cauchy)),
            ("Cauchy".into(), label(&report.cauchy)),
            ("tail spread".into(), nums.q(&report.spread)),
        ];
        for w in &report.windows {
            fields.push((
                format!("window p={}", w.p),
                format!("max {} at n={} small={}", nums.q(&w.max), w.at, w.within_threshold),
            ));
        }
        for (name, w) in [("spread witness", &report.spread_witness), ("G-Cauchy witness", &report.g_cauchy_witness)] {
            if let Some(w) = w {
                fields.push((name.into(), format!("({}, {}) distance {}", w.p, w.q, nums.q(&w.distance))));
            }
        }
        json_out["cauchy"] = serde_json::to_value(&report)?;
        out_blocks.push(("cauchy", fields));
    }

    let mut out = Report::new(json_out);
    out.fields("orbit", summary);
    out.table("gaps", &headers, rows);
    for (title, fields) in out_blocks {
        out.fields(title, fields);
    }
    out.exit = exit;
    Ok(out)
}

fn gallery_list() -> Report {
    let rows: Vec<Vec<String>> =
        GalleryId::ALL.iter().map(|id| vec![id.name().to_string(), id.summary().to_string()]).collect();
    let json_rows: Vec<_> = GalleryId::ALL.iter().map(|id| json!({"id": id, "summary": id.summary()})).collect();
    let mut out = Report::new(json!(json_rows));
    out.table("gallery", &["id", "summary"], rows);
    out
}

fn gallery_build(id: &str, cutoff: u64, out_path: Option<PathBuf>) -> anyhow::Result<Report> {
    let id: GalleryId = id.parse()?;
    let g = gallery::build(id, cutoff)?;
    let definition = Definition::new(g.space.clone(), g.map.clone()).to_json();
    let mut out = Report::new(json!({
        "id": id,
        "cutoff": cutoff,
        "definition": serde_json::from_str::<serde_json::Value>(&definition)?,
        "facts": g.facts,
        "written_to": out_path.as_ref().map(|p| p.display().to_string()),
    }));
    if let Some(path) = &out_path {
        std::fs::write(path, format!("{definition}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut fields = vec![
        ("id".to_string(), id.to_string()),
        ("cutoff".into(), cutoff.to_string()),
        ("points".into(), g.space.points().len().to_string()),
        ("map".into(), g.map.rule_name().to_string()),
    ];
    if let Some(path) = &out_path {
        fields.push(("written to".into(), path.display().to_string()));
    }
    out.fields("gallery build", fields);
    let facts: Vec<Vec<String>> = g.facts.iter().enumerate().map(|(k, f)| vec![k.to_string(), f.description.clone()]).collect();
    out.table("facts", &["#", "fact"], facts);
    if out_path.is_none() {
        out.text("definition", definition);
    }
    Ok(out)
}

fn gallery_certify(id: &str, cutoff: u64) -> anyhow::Result<Report> {
    let id: GalleryId = id.parse()?;
    let report = gallery::run_certification(id, cutoff)?;
    let rows: Vec<Vec<String>> = report
        .results
        .iter()
        .enumerate()
        .map(|(k, r)| {
            vec![
                k.to_string(),
                if r.passed { "pass" } else { "FAIL" }.to_string(),
                r.description.clone(),
                r.discrepancy.clone().unwrap_or_else(|| r.observed.clone()),
            ]
        })
        .collect();
    let mut out = Report::new(serde_json::to_value(&report)?);
    let mut fields = vec![
        ("id".to_string(), id.to_string()),
        ("cutoff".into(), cutoff.to_string()),
        ("facts".into(), report.results.len().to_string()),
        ("certified".into(), report.passed.to_string()),
    ];
    if let Some(f) = &report.first_failure {
        fields.push(("first failure".into(), format!("#{} {}: {}", f.index, f.description, f.discrepancy)));
    }
    out.fields("gallery certify", fields);
    out.table("facts", &["#", "status", "fact", "observed"], rows);
    out.exit = u8::from(!report.passed);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn separate(
    hold: &str,
    fail: &str,
    max_points: usize,
    min_points: usize,
    grid: &str,
    seed: Option<u64>,
    budget: u64,
    out_path: Option<PathBuf>,
    nums: Numbers,
) -> anyhow::Result<Report> {
    let hold = parse_conditions(hold)?;
    let fail = parse_conditions(fail)?;
    let grid = parse_list(grid)?;
    let config = match seed {
        Some(seed) => SearchConfig::random(max_points, grid, budget, seed),
        None => SearchConfig::exhaustive(max_points, grid),
    }
    .with_min_points(min_points);
    let outcome = find_separation(&hold, &fail, &config)?;
    let names = |cs: &[Condition]| cs.iter().map(|c| c.name()).collect::<Vec<_>>().join(",");
    let mut fields = vec![
        ("hold".to_string(), names(&hold)),
        ("fail".into(), names(&fail)),
        ("points".into(), format!("{min_points}..={max_points}")),
        ("grid".into(), config.grid.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
    ];
    let mut out = Report::new(serde_json::to_value(&outcome)?);
    match &outcome {
        SearchOutcome::Witness(w) => {
            let inst = &w.instance;
            fields.push(("result".into(), "witness".into()));
            fields.push(("instance ordinal".into(), inst.ordinal.to_string()));
            fields.push(("map table".into(), format!("{:?}", inst.table)));
            fields.push(("confirmed".into(), w.confirmed.to_string()));
            if let Some(path) = &out_path {
                let def = Definition::new(inst.space(), inst.map()).to_json();
                std::fs::write(path, format!("{def}\n")).with_context(|| format!("writing {}", path.display()))?;
                fields.push(("written to".into(), path.display().to_string()));
            }
            out.fields("search", fields);
            let n = inst.points();
            let rows: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let mut row = vec![i.to_string(), inst.table[i].to_string()];
                    row.extend(inst.distances[i].iter().map(|d| nums.q(d)));
                    row
                })
                .collect();
            let mut headers: Vec<String> = vec!["point".into(), "T(point)".into()];
            headers.extend((0..n).map(|j| format!("d(.,{j})")));
            let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
            out.table("instance", &headers, rows);
            let verdicts: Vec<Vec<String>> =
                w.classification.verdicts.iter().map(|(c, h)| vec![c.to_string(), h.to_string()]).collect();
            out.table("classification", &["condition", "holds"], verdicts);
            out.exit = u8::from(!w.confirmed);
        }
        SearchOutcome::Exhausted(cert) => {
            fields.push(("result".into(), "exhausted".into()));
            fields.push(("instances covered".into(), cert.instances_covered.to_string()));
            fields.push(("instances evaluated".into(), cert.instances_evaluated.to_string()));
            out.fields("search", fields);
            let rows = cert
                .sizes
                .iter()
                .map(|s| vec![s.points.to_string(), s.matrices.to_string(), s.instances.to_string()])
                .collect();
            out.table("search space", &["points", "matrices", "instances"], rows);
        }
        SearchOutcome::NoWitnessInSample { seed, budget } => {
            fields.push(("result".into(), "no witness in sample".into()));
            fields.push(("seed".into(), seed.to_string()));
            fields.push(("budget".into(), budget.to_string()));
            out.fields("search", fields);
        }
    }
    Ok(out)
}
