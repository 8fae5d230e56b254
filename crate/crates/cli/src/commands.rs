use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use selfsim::dimension::{
    assouad_estimate, box_dimension_estimate, reduced_similarity_dimension, similarity_dimension,
    DimensionEstimate, Window,
};
use selfsim::geometry::{one_sided_hausdorff, PointCloud};
use selfsim::io::{
    emit_covering_csv, example_document, examples_registry, parse_ifs_spec, render_attractor,
    serialize_ifs_spec, ExampleParams, IfsSpecDocument, RunConfig, DEFAULT_TRUNCATION,
};
use selfsim::separation::{exact_overlap_scan, multiplicity_scan, wsp_scan as run_wsp, WspStatus};
use selfsim::symbolic::{
    default_prune_bound, orthogonal_group_analysis, spanning_fixed_points, stopping_set,
    GroupVerdict, SpanningReport,
};
use selfsim::tangents::{
    build_pseudo_tangent, finest_achievable_n, pretangent_ek, scaling, tangent_zoom,
    PseudoTangentRun, WitnessSequence,
};
use selfsim::{Backend, Error, IfsSystem, Scalar};

use crate::block::{f, Block};
use crate::{DimMode, Global, Outcome, TangentArgs, TangentMode};

/// Significant digits for printed scalars.
const SIG: u32 = 17;

fn ok(block: &Block) -> Result<Outcome> {
    Ok(Outcome {
        text: block.render(),
        code: 0,
    })
}

fn dec(x: &Scalar) -> String {
    x.to_decimal_string(SIG)
}

fn params(g: &Global) -> Result<ExampleParams> {
    let mut p = ExampleParams::new();
    for kv in &g.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--param expects KEY=VALUE, got {kv:?}"))?;
        p.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(k) = g.truncation {
        p.insert("K".into(), k.to_string());
    }
    Ok(p)
}

/// A loaded system and the config lines describing how it was obtained.
struct Loaded {
    ifs: IfsSystem,
    config: RunConfig,
    params: ExampleParams,
}

/// `spec` names a file when one exists at that path, a bundled example
/// otherwise. Parameters only apply to examples.
fn load(g: &Global, command: &str, spec: &str) -> Result<Loaded> {
    let params = params(g)?;
    let doc = if Path::new(spec).is_file() {
        if !params.is_empty() {
            bail!("--param and --truncation apply to bundled examples, not spec files");
        }
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        parse_ifs_spec(&text).with_context(|| format!("in {spec}"))?
    } else {
        example_document(spec, &params)?
    };
    let backend = match &g.backend {
        Some(b) => Some(b.parse::<Backend>()?),
        None => None,
    };
    let ifs = doc.build(backend)?;
    let mut config = RunConfig::new();
    config
        .set("command", command)
        .set("spec", spec)
        .set("backend", ifs.backend());
    for (k, v) in &params {
        config.set(format!("param.{k}"), v);
    }
    Ok(Loaded { ifs, config, params })
}

fn scalar(text: &str, name: &str, b: Backend) -> Result<Scalar> {
    Scalar::parse_literal(text, b).with_context(|| format!("--{name}"))
}

/// Model note and construction warnings, in that order.
fn preamble(block: &mut Block, ifs: &IfsSystem) {
    if let Some(n) = ifs.model_note() {
        block.put("model_note", n);
    }
    for w in ifs.warnings() {
        block.put("warning", w);
    }
}

fn estimate_lines(block: &mut Block, e: &DimensionEstimate) {
    block.put("kind", e.kind).put("value", f(e.value));
    if let Some(u) = e.unclamped {
        block.put("unclamped", f(u));
    }
    if !e.records.is_empty() {
        block.put("residual", f(e.residual)).put("records", e.records.len());
    }
    if let Some(r) = e.raw_ratio_max {
        block.put("raw_ratio_max", f(r));
    }
}

pub fn simdim(g: &Global, spec: &str) -> Result<Outcome> {
    let l = load(g, "simdim", spec)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    estimate_lines(&mut b, &similarity_dimension(&l.ifs)?);
    ok(&b)
}

pub fn stopping(g: &Global, spec: &str, r: &str, limit: usize) -> Result<Outcome> {
    let mut l = load(g, "stopping", spec)?;
    l.config.set("r", r).set("limit", limit);
    let rv = scalar(r, "r", l.ifs.backend())?;
    let words = stopping_set(&l.ifs, &rv)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("words", words.len());
    for w in words.iter().take(limit) {
        b.put("word", format!("{w} ratio {}", dec(&l.ifs.word_ratio(w)?)));
    }
    ok(&b)
}

pub fn overlap_scan(g: &Global, spec: &str, depth: usize, reduced_r: Option<&str>) -> Result<Outcome> {
    let mut l = load(g, "overlap-scan", spec)?;
    l.config.set("depth", depth);
    if let Some(r) = reduced_r {
        l.config.set("reduced_r", r);
    }
    let overlaps = exact_overlap_scan(&l.ifs, depth)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("exact_overlaps", overlaps.len());
    for o in &overlaps {
        b.put("overlap", format!("{} {}", o.alpha, o.beta));
    }
    if let Some(r) = reduced_r {
        let rv = scalar(r, "reduced-r", l.ifs.backend())?;
        let red = reduced_similarity_dimension(&l.ifs, &rv)?;
        let sim = similarity_dimension(&l.ifs)?;
        b.put("similarity_dimension", f(sim.value))
            .put("similarity_unclamped", f(sim.unclamped.unwrap_or(sim.value)))
            .put("reduced_dimension", f(red.estimate.value))
            .put(
                "reduced_unclamped",
                f(red.estimate.unclamped.unwrap_or(red.estimate.value)),
            )
            .put("reduced_words", red.words)
            .put("reduced_duplicates_removed", red.duplicates_removed);
    }
    ok(&b)
}

fn wsp_scan_cmd(
    l: Loaded,
    depth: usize,
    epsilon: &str,
    prune_bound: Option<&str>,
    show: usize,
) -> Result<Outcome> {
    let mut l = l;
    let bk = l.ifs.backend();
    let eps = scalar(epsilon, "epsilon", bk)?;
    let bound = match prune_bound {
        Some(p) => scalar(p, "prune-bound", bk)?,
        None => default_prune_bound(l.ifs.dim(), bk),
    };
    l.config
        .set("depth", depth)
        .set("epsilon", epsilon)
        .set("prune_bound", dec(&bound))
        .set("show", show);
    let v = run_wsp(&l.ifs, depth, &eps, &bound)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("status", v.status)
        .put("search_depth", v.search_depth)
        .put("states", v.states)
        .put("witnesses", v.witnesses.len())
        .put("exact_overlaps", v.exact_overlaps.len());
    match &v.min_nonzero_distance {
        Some(d) => b.put("min_nonzero_distance", dec(d)),
        None => b.put("min_nonzero_distance", "none"),
    };
    if let Some(s) = v.stabilized_at {
        b.put("stabilized_at", s);
    }
    if let Some(n) = &v.truncation_note {
        b.put("truncation_note", n);
    }
    for w in v.witnesses.iter().take(show) {
        b.put(
            "witness",
            format!("{} {} distance {}", w.alpha, w.beta, dec(&w.id_distance)),
        );
    }
    for (a, c) in v.exact_overlaps.iter().take(show) {
        b.put("overlap", format!("{a} {c}"));
    }
    Ok(Outcome {
        text: b.render(),
        code: if v.status == WspStatus::Unknown { 2 } else { 0 },
    })
}

pub fn wsp_scan(
    g: &Global,
    spec: &str,
    depth: usize,
    epsilon: &str,
    prune_bound: Option<&str>,
    show: usize,
) -> Result<Outcome> {
    wsp_scan_cmd(load(g, "wsp-scan", spec)?, depth, epsilon, prune_bound, show)
}

fn parse_point(text: &str, dim: usize, b: Backend) -> Result<Vec<Scalar>> {
    let v: Vec<Scalar> = text
        .split(',')
        .map(|s| scalar(s.trim(), "z", b))
        .collect::<Result<_>>()?;
    if v.len() != dim {
        bail!("--z has {} coordinates, the system has dimension {dim}", v.len());
    }
    Ok(v)
}

pub fn multiplicity(g: &Global, spec: &str, r: &str, z: Option<&str>) -> Result<Outcome> {
    let mut l = load(g, "multiplicity", spec)?;
    let bk = l.ifs.backend();
    let rv = scalar(r, "r", bk)?;
    let zv = match z {
        Some(t) => parse_point(t, l.ifs.dim(), bk)?,
        None => l.ifs.base_point(),
    };
    let zs: Vec<String> = zv.iter().map(dec).collect();
    l.config.set("r", r).set("z", zs.join(","));
    let m = multiplicity_scan(&l.ifs, &rv, &zv)?;
    let c: Vec<String> = m.worst_ball_center.iter().map(dec).collect();
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("max_multiplicity", m.max_multiplicity)
        .put("worst_ball_center", c.join(","))
        .put("distinct_points", m.distinct_points)
        .put("words", m.words);
    ok(&b)
}

pub fn dim(
    g: &Global,
    spec: &str,
    mode: DimMode,
    min_exp: i32,
    max_exp: i32,
    min_gap: i32,
    csv: Option<&str>,
) -> Result<Outcome> {
    let mut l = load(g, "dim", spec)?;
    l.config
        .set(
            "mode",
            match mode {
                DimMode::Box => "box",
                DimMode::Assouad => "assouad",
            },
        )
        .set("min_exp", min_exp)
        .set("max_exp", max_exp);
    if let DimMode::Assouad = mode {
        l.config.set("min_gap", min_gap);
    }
    if let Some(p) = csv {
        l.config.set("csv", p);
    }
    let e = match mode {
        DimMode::Box => box_dimension_estimate(&l.ifs, min_exp, max_exp)?,
        DimMode::Assouad => assouad_estimate(&l.ifs, min_gap, min_exp, max_exp)?,
    };
    if let Some(p) = csv {
        emit_covering_csv(&e.records, &l.config, p)?;
    }
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    estimate_lines(&mut b, &e);
    ok(&b)
}

pub fn render(g: &Global, spec: &str, out: &str, resolution: &str, size: u32) -> Result<Outcome> {
    let mut l = load(g, "render", spec)?;
    l.config
        .set("out", out)
        .set("resolution", resolution)
        .set("size", size);
    let res = scalar(resolution, "resolution", l.ifs.backend())?;
    let raster = render_attractor(&l.ifs, &res, size, out, &l.config)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("width", raster.width)
        .put("height", raster.height)
        .put("occupied_pixels", raster.occupied_pixels())
        .put("occupied_fraction", f(raster.occupied_fraction()));
    if l.ifs.dim() == 1 {
        b.put("runs", raster.runs_in_row(0));
    }
    ok(&b)
}

pub fn inspect(g: &Global, spec: &str, r: &str) -> Result<Outcome> {
    let mut l = load(g, "inspect", spec)?;
    l.config.set("r", r);
    let rv = scalar(r, "r", l.ifs.backend())?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("maps", l.ifs.len())
        .put("ambient_dim", l.ifs.dim())
        .put("cube_invariant", l.ifs.cube_invariant());
    let group = orthogonal_group_analysis(&l.ifs, 1e-9, 360)?;
    match group.verdict {
        GroupVerdict::Finite { order } => b.put("orthogonal_group", format!("finite order {order}")),
        GroupVerdict::Truncated { order } => {
            b.put("orthogonal_group", format!("finite order {order} (listing truncated)"))
        }
        GroupVerdict::Dense { generated } => b.put(
            "orthogonal_group",
            format!("dense (more than {generated} elements generated)"),
        ),
    };
    match spanning_fixed_points(&l.ifs, &rv) {
        Ok(SpanningReport::Spanning(ws)) => {
            b.put("fixed_points_span", "yes");
            for (w, p) in ws {
                let p: Vec<String> = p.iter().map(dec).collect();
                b.put("spanning_word", format!("{w} fixed point {}", p.join(",")));
            }
        }
        Ok(SpanningReport::HyperplaneContained {
            rank,
            words_examined,
        }) => {
            b.put(
                "fixed_points_span",
                format!("no: affine rank {rank} over {words_examined} words"),
            );
        }
        Err(Error::Invalid(m)) => {
            b.put("fixed_points_span", m);
        }
        Err(e) => return Err(e.into()),
    }
    ok(&b)
}

/// `lo,hi` per axis.
fn parse_window(text: Option<&str>, dim: usize) -> Result<Window> {
    let Some(t) = text else {
        return Ok(Window::unit(dim));
    };
    let v: Vec<f64> = t
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("--window value {s:?}")))
        .collect::<Result<_>>()?;
    if v.len() != 2 * dim {
        bail!("--window needs {} numbers (lo,hi per axis)", 2 * dim);
    }
    let mut w = Window::unit(dim);
    for k in 0..dim {
        if !(v[2 * k] <= v[2 * k + 1]) {
            bail!("--window axis {k}: lo > hi");
        }
        w.lo[k] = v[2 * k];
        w.hi[k] = v[2 * k + 1];
    }
    Ok(w)
}

/// `1-6` or `1,3,5`.
fn parse_levels(text: &str) -> Result<Vec<u32>> {
    if let Some((a, b)) = text.split_once('-') {
        let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(Into::into))
        .collect()
}

fn grid_distance(lo: f64, hi: f64, cloud: &PointCloud) -> Result<f64> {
    Ok(one_sided_hausdorff(&PointCloud::grid(1, 1001, lo, hi)?, cloud)?)
}

fn pseudo_lines(b: &mut Block, run: &PseudoTangentRun) -> Result<()> {
    let (lo, hi) = run.interval();
    let sel: Vec<String> = run
        .selections
        .iter()
        .map(|s| format!("{}:{}", s.witness + 1, s.power))
        .collect();
    let min_inc = run.increments.iter().reduce(|a, c| if c < a { c } else { a });
    let max_inc = run.increments.iter().reduce(|a, c| if c > a { c } else { a });
    let (min_inc, max_inc) = (min_inc.map(dec).unwrap_or_default(), max_inc.map(dec).unwrap_or_default());
    b.put("n", run.n)
        .put("a", dec(run.a()))
        .put("c", dec(run.c()))
        .put("epsilon", dec(&run.epsilon))
        .put("m_min", run.setup.m_min)
        .put("direction", if run.setup.sign > 0 { "right" } else { "left" })
        .put("selections", sel.join(" "))
        .put("increment_min", min_inc)
        .put("increment_max", max_inc)
        .put("increments_bracketed", run.increments_bracketed())
        .put("interval", format!("{},{}", f(lo), f(hi)))
        .put("hausdorff_grid_to_cloud", f(grid_distance(lo, hi, &run.cloud)?))
        .put("hausdorff_bound", f(run.hausdorff_bound()));
    Ok(())
}

fn tangent_pseudo(g: &Global, spec: &str, args: &TangentArgs) -> Result<Outcome> {
    let mut l = load(g, "tangent", spec)?;
    if l.ifs.dim() != 1 {
        bail!("--mode pseudo needs a system on the line");
    }
    let k = match l.params.get("K") {
        Some(v) => v.parse::<u32>()?,
        None => DEFAULT_TRUNCATION,
    };
    let levels = match &args.witness_levels {
        Some(t) => parse_levels(t)?,
        None => (1..k.saturating_sub(1)).collect(),
    };
    if levels.is_empty() {
        bail!("no witness levels (K = {k} leaves none below K-1)");
    }
    let lv: Vec<String> = levels.iter().map(u32::to_string).collect();
    l.config
        .set("mode", "pseudo")
        .set("n", args.n)
        .set("witness_levels", lv.join(","));
    // Bandt-Graf witnesses from the closed form; they need the full system.
    let seq = WitnessSequence::bandt_graf(&l.ifs, &levels, k)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("witnesses", seq.pairs.len());
    match build_pseudo_tangent(&l.ifs, &seq, args.n) {
        Ok(run) => {
            b.put("status", "COMPLETE");
            pseudo_lines(&mut b, &run)?;
            ok(&b)
        }
        Err(Error::WitnessesExhausted(msg)) => {
            let finest = finest_achievable_n(&l.ifs, &seq, args.n - 1)?;
            b.put("status", "WITNESSES_EXHAUSTED")
                .put("detail", &msg)
                .put("finest_achievable_n", finest);
            if finest > 0 {
                pseudo_lines(&mut b, &build_pseudo_tangent(&l.ifs, &seq, finest)?)?;
            }
            eprintln!("error: witness sequence exhausted: {msg}");
            Ok(Outcome {
                text: b.render(),
                code: 1,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn tangent_ek(g: &Global, args: &TangentArgs) -> Result<Outcome> {
    let alpha = scalar(&args.alpha, "alpha", Backend::Exact)?.to_f64();
    let beta = scalar(&args.beta, "beta", Backend::Exact)?.to_f64();
    let k = args.k.ok_or_else(|| anyhow!("--mode ek needs --k"))?;
    let mut cfg = RunConfig::new();
    cfg.set("command", "tangent")
        .set("mode", "ek")
        .set("alpha", &args.alpha)
        .set("beta", &args.beta)
        .set("k", k)
        .set("d", args.d);
    if g.backend.is_some() || !g.params.is_empty() {
        bail!("--mode ek takes no system options");
    }
    let e = pretangent_ek(alpha, beta, k, args.d)?;
    let mut b = Block::new(&cfg);
    for w in &e.warnings {
        b.put("warning", w);
    }
    let n = if args.d == 1 { 1001 } else { 101 };
    let grid = PointCloud::grid(args.d, n, 0.0, 1.0)?;
    b.put("points", e.cloud.len())
        .put("hausdorff_grid_to_ek", f(one_sided_hausdorff(&grid, &e.cloud)?));
    ok(&b)
}

fn tangent_zoom_cmd(g: &Global, spec: &str, args: &TangentArgs) -> Result<Outcome> {
    let mut l = load(g, "tangent", spec)?;
    let bk = l.ifs.backend();
    let scale_t = args
        .scale
        .as_deref()
        .ok_or_else(|| anyhow!("--mode zoom needs --scale"))?;
    let res_t = args.resolution.as_deref().unwrap_or("1e-6");
    let window = parse_window(args.window.as_deref(), l.ifs.dim())?;
    l.config
        .set("mode", "zoom")
        .set("scale", scale_t)
        .set("resolution", res_t);
    if let Some(w) = &args.window {
        l.config.set("window", w);
    }
    if let Some(k) = args.k {
        l.config
            .set("ek_alpha", &args.alpha)
            .set("ek_beta", &args.beta)
            .set("ek_k", k);
    }
    let t = scaling(l.ifs.dim(), scalar(scale_t, "scale", bk)?)?;
    let res = scalar(res_t, "resolution", bk)?;
    let cloud = tangent_zoom(&l.ifs, &t, &window, &res)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("points", cloud.len());
    if let Some(k) = args.k {
        let alpha = scalar(&args.alpha, "alpha", Backend::Exact)?.to_f64();
        let beta = scalar(&args.beta, "beta", Backend::Exact)?.to_f64();
        let e = pretangent_ek(alpha, beta, k, l.ifs.dim())?;
        b.put("ek_points", e.cloud.len())
            .put("hausdorff_ek_to_zoom", f(one_sided_hausdorff(&e.cloud, &cloud)?));
    }
    ok(&b)
}

pub fn tangent(g: &Global, args: &TangentArgs) -> Result<Outcome> {
    match args.mode {
        TangentMode::Ek => tangent_ek(g, args),
        mode => {
            let spec = args
                .spec
                .as_deref()
                .ok_or_else(|| anyhow!("this mode needs a specification"))?;
            if mode == TangentMode::Pseudo {
                tangent_pseudo(g, spec, args)
            } else {
                tangent_zoom_cmd(g, spec, args)
            }
        }
    }
}

pub fn examples_list() -> Result<Outcome> {
    let mut cfg = RunConfig::new();
    cfg.set("command", "examples list");
    let mut b = Block::new(&cfg);
    for e in examples_registry() {
        let p: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let p = if p.is_empty() {
            String::new()
        } else {
            format!(" [{}]", p.join(" "))
        };
        b.put(e.name, format!("{}{p}", e.summary));
    }
    ok(&b)
}

pub fn examples_show(g: &Global, name: &str) -> Result<Outcome> {
    let p = params(g)?;
    let doc: IfsSpecDocument = example_document(name, &p)?;
    let doc = match &g.backend {
        Some(bk) => {
            let ifs = doc.build(Some(bk.parse::<Backend>()?))?;
            IfsSpecDocument::from_ifs(&ifs)
        }
        None => doc,
    };
    Ok(Outcome {
        text: serialize_ifs_spec(&doc),
        code: 0,
    })
}

/// Similarity dimension plus a depth-6 separation scan.
pub fn examples_run(g: &Global, name: &str) -> Result<Outcome> {
    let mut l = load(g, "examples run", name)?;
    let sim = similarity_dimension(&l.ifs)?;
    let bk = l.ifs.backend();
    let eps = Scalar::parse_literal("1e-6", bk)?;
    l.config.set("depth", 6).set("epsilon", dec(&eps));
    let bound = default_prune_bound(l.ifs.dim(), bk);
    let v = run_wsp(&l.ifs, 6, &eps, &bound)?;
    let mut b = Block::new(&l.config);
    preamble(&mut b, &l.ifs);
    b.put("maps", l.ifs.len())
        .put("similarity_dimension", f(sim.value))
        .put("status", v.status)
        .put("states", v.states)
        .put("exact_overlaps", v.exact_overlaps.len());
    if let Some(d) = &v.min_nonzero_distance {
        b.put("min_nonzero_distance", dec(d));
    }
    Ok(Outcome {
        text: b.render(),
        code: if v.status == WspStatus::Unknown { 2 } else { 0 },
    })
}
