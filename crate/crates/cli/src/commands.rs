//! One function per subcommand; each writes its files and returns summary
//! lines for stdout.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fracperc::arc::{build_boundary_arc, BasicSegment};
use fracperc::boxcount::{box_count, default_window, mass_dimension_from_count};
use fracperc::coin::derive_seed;
use fracperc::connectivity::{components, crossing_sweep};
use fracperc::extinction::extinction_monte_carlo;
use fracperc::gallery::{carpet, carpet_section, koch, product_with_interval, regular_set, triangle, RegularSetSpec, Selection};
use fracperc::gridset::GridSet;
use fracperc::percolation::{generate, level_counts, CellIndex, CellOracle, LazyTree, PercolationParams};
use fracperc::reference::{reference_dimension, ReferenceSet};
use fracperc::render::{image_side, palette, render_gridset, Image, BLACK, WHITE};
use fracperc::walks::{edge_cantor, edge_cantor_gridset, extract_hierarchy, is_m_full, through_walks, turning_walks, WalkPath};

use crate::output::{display, Context};
use crate::CliError;

type Out = Result<Vec<String>, CliError>;

const LIGHT: [u8; 3] = [200, 200, 200];

fn params_json<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("serializable arguments")
}

fn written(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| format!("wrote {}", display(p))).collect()
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct PercolateArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 0.8)]
    pub p: f64,
    /// Ambient dimension, 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub dim: u8,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Cap on the cells of one materialized level.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Count kept cells without materializing the levels.
    #[arg(long)]
    pub count_only: bool,
    /// Also write a PPM render of the kept cells.
    #[arg(long)]
    pub render: bool,
    /// Level to render (default: the deepest).
    #[arg(long)]
    pub render_level: Option<u32>,
    #[arg(long, default_value_t = 512)]
    pub pixels: usize,
}

pub fn percolate(ctx: &Context, a: &PercolateArgs) -> Out {
    let pj = params_json(a);
    let mut params = PercolationParams::new(a.n, a.p, a.dim, ctx.seed, a.depth)?;
    if let Some(b) = a.budget {
        params = params.with_budget(b);
    }
    let mut files = Vec::new();
    let (counts, tree) = if a.count_only {
        if a.render {
            return Err(CliError::usage("--render needs materialized levels; drop --count-only"));
        }
        (level_counts(&params, a.depth)?, None)
    } else {
        let t = generate(&params, a.depth)?;
        (t.counts(), Some(t))
    };
    let mass: Vec<Option<f64>> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if k == 0 { None } else { mass_dimension_from_count(c, a.n, k as u32).ok() })
        .collect();
    let mut csv = String::from("level,kept,mass_dimension\n");
    for (k, (&c, m)) in counts.iter().zip(&mass).enumerate() {
        let m = m.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!("{k},{c},{m}\n"));
    }
    files.push(ctx.write_csv("percolate.csv", &pj, &csv)?);
    let survived = counts.last().is_some_and(|&c| c > 0);
    let comps = match &tree {
        Some(t) if a.dim == 2 => Some(components(t, a.depth)?),
        _ => None,
    };
    files.push(ctx.write_json(
        "percolate.json",
        &pj,
        json!({
            "counts": counts,
            "survived": survived,
            "mass_dimension": mass.last().copied().flatten(),
            "components": comps,
        }),
    )?);
    if a.render {
        let t = tree.as_ref().expect("materialized");
        let level = a.render_level.unwrap_or(a.depth);
        if level > a.depth {
            return Err(CliError::usage(format!("--render-level {level} exceeds depth {}", a.depth)));
        }
        let set = GridSet::from_cells(a.n, level, a.dim, t.kept(level).iter().copied());
        let img = render_gridset(&set, a.pixels);
        files.push(ctx.write_bytes("percolate.ppm", &img.to_ppm(&ctx.provenance(&pj)))?);
    }
    let mut out = vec![format!(
        "kept counts {:?}; survived {survived}; mass dimension {}",
        counts,
        mass.last().copied().flatten().map_or("n/a".into(), |m| format!("{m:.4}"))
    )];
    out.extend(written(&files));
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Explicit ascending grid, comma separated; overrides the range flags.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
}

fn linspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    match points {
        0 => Err(CliError::usage("--points must be >= 1")),
        1 => Ok(vec![lo]),
        _ => Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()),
    }
}

pub fn sweep(ctx: &Context, a: &SweepArgs) -> Out {
    let pj = params_json(a);
    let grid = match &a.grid {
        Some(g) => g.clone(),
        None => linspace(a.p_min, a.p_max, a.points)?,
    };
    let curve = crossing_sweep(a.n, &grid, a.depth, a.trials, ctx.seed)?;
    if !curve.is_monotone() {
        return Err(fracperc::Error::construction("crossing frequency is not monotone along the grid").into());
    }
    let path = ctx.write_csv("sweep.csv", &pj, &curve.to_csv())?;
    let mut out = vec![format!("{} grid points, frequencies {:?}", grid.len(), curve.crossing_freq)];
    out.extend(written(&[path]));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkMode {
    /// Nested hierarchy inside the first full tree found.
    Hierarchy,
    /// One family of level-1 through walks.
    Through,
    /// One family of level-1 turning walks.
    Turning,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WalksArgs {
    #[arg(long, value_enum, default_value_t = WalkMode::Hierarchy)]
    pub mode: WalkMode,
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    #[arg(long, default_value_t = 0.995)]
    pub p: f64,
    /// Hierarchy depth.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Seeds tried when looking for a full tree.
    #[arg(long, default_value_t = 1000)]
    pub attempts: u64,
    /// Start rows on the left edge (through and turning modes).
    #[arg(long, value_delimiter = ',')]
    pub starts: Vec<u64>,
    /// End rows on the right edge (through) or end columns on the top edge (turning).
    #[arg(long, value_delimiter = ',')]
    pub ends: Vec<u64>,
    /// Forbidden level-1 cell as `x,y`.
    #[arg(long, value_delimiter = ',')]
    pub forbidden: Vec<u64>,
    #[arg(long, default_value_t = 512)]
    pub pixels: usize,
}

fn walk_cells_json(w: &WalkPath) -> Value {
    json!({ "kind": w.kind, "level": w.level, "cells": w.cells.iter().map(|c| [c.x, c.y]).collect::<Vec<_>>() })
}

fn overlay_walks(img: &mut Image, walks: &[&WalkPath], n: u32) {
    for (i, w) in walks.iter().enumerate() {
        img.fill_cells(&w.cells, n, 2, palette(i));
    }
}

pub fn walks(ctx: &Context, a: &WalksArgs) -> Out {
    let pj = params_json(a);
    let mut files = Vec::new();
    let mut out = Vec::new();
    match a.mode {
        WalkMode::Hierarchy => {
            let mut found = None;
            for i in 0..a.attempts {
                let s = derive_seed(ctx.seed, i);
                let params = PercolationParams::new(a.n, a.p, 2, s, a.m)?;
                let tree = LazyTree::new(params, a.m)?;
                if is_m_full(&tree, &CellIndex::ROOT, a.m)? {
                    found = Some((i, s, tree));
                    break;
                }
            }
            let Some((i, s, tree)) = found else {
                return Err(fracperc::Error::construction(format!("no {}-full tree in {} attempts", a.m, a.attempts)).into());
            };
            let hier = extract_hierarchy(&tree, a.m)?;
            hier.validate()?;
            let cantor = edge_cantor(&hier);
            files.push(ctx.write_json(
                "walks.json",
                &pj,
                json!({
                    "tree_seed": s,
                    "attempts": i + 1,
                    "hierarchy": hier.to_json(),
                    "edge_cantor": cantor,
                }),
            )?);
            let set = edge_cantor_gridset(&hier).with_provenance(ctx.provenance(&pj));
            files.push(ctx.write_bytes("edge_cantor.gridset", set.to_text().as_bytes())?);
            let side = CellIndex::side_count(a.n, a.m);
            let mut img = Image::new(image_side(side, a.pixels), image_side(side, a.pixels), WHITE);
            if let Ok(t) = generate(&tree.params, a.m) {
                img.fill_cells(t.kept(a.m), a.n, 2, LIGHT);
            }
            let deepest: Vec<&WalkPath> = hier.deepest().iter().map(|node| &node.walk).collect();
            overlay_walks(&mut img, &deepest, a.n);
            files.push(ctx.write_bytes("walks.ppm", &img.to_ppm(&ctx.provenance(&pj)))?);
            out.push(format!(
                "tree seed {s} is {}-full (attempt {}); {} level-{} walks; C_{} has {} intervals",
                a.m,
                i + 1,
                deepest.len(),
                a.m,
                a.m,
                cantor.len()
            ));
        }
        WalkMode::Through | WalkMode::Turning => {
            if a.forbidden.len() != 2 {
                return Err(CliError::usage("--forbidden takes exactly two coordinates x,y"));
            }
            let f = CellIndex::new2(1, a.forbidden[0], a.forbidden[1]);
            let n = u64::from(a.n);
            let starts: Vec<CellIndex> = a.starts.iter().map(|&r| CellIndex::new2(1, 0, r)).collect();
            let family = if a.mode == WalkMode::Through {
                let ends: Vec<CellIndex> = a.ends.iter().map(|&r| CellIndex::new2(1, n.saturating_sub(1), r)).collect();
                through_walks(a.n, &starts, &ends, f)?
            } else {
                let ends: Vec<CellIndex> = a.ends.iter().map(|&c| CellIndex::new2(1, c, n.saturating_sub(1))).collect();
                turning_walks(a.n, &starts, &ends, f)?
            };
            files.push(ctx.write_json("walks.json", &pj, json!({ "walks": family.iter().map(walk_cells_json).collect::<Vec<_>>() }))?);
            let px = image_side(n, a.pixels);
            let mut img = Image::new(px, px, WHITE);
            img.fill_cells([&f], a.n, 2, BLACK);
            overlay_walks(&mut img, &family.iter().collect::<Vec<_>>(), a.n);
            files.push(ctx.write_bytes("walks.ppm", &img.to_ppm(&ctx.provenance(&pj)))?);
            out.push(format!("{} walks", family.len()));
        }
    }
    out.extend(written(&files));
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct BoxdimArgs {
    /// Grid-set file to analyse.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub j_min: Option<u32>,
    #[arg(long)]
    pub j_max: Option<u32>,
}

pub fn boxdim(ctx: &Context, a: &BoxdimArgs) -> Out {
    let pj = params_json(a);
    let text = std::fs::read_to_string(&a.input).map_err(|e| CliError::io(&format!("reading {}", a.input.display()), e))?;
    let set = GridSet::from_text(&text)?;
    let (dmin, dmax) = default_window(set.level);
    let j_max = a.j_max.unwrap_or(dmax);
    let j_min = a.j_min.unwrap_or(dmin.min(j_max));
    let report = box_count(&set, j_min, j_max)?;
    let files = vec![
        ctx.write_csv("boxdim.csv", &pj, &report.to_csv())?,
        ctx.write_json("boxdim.json", &pj, json!({ "report": report, "source_provenance": set.provenance }))?,
    ];
    let mut out = vec![format!(
        "counts {:?}; slope {}",
        report.counts,
        report.slope.map_or("n/a".into(), |s| format!("{s:.4}"))
    )];
    out.extend(written(&files));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GallerySet {
    Carpet,
    Triangle,
    Koch,
    /// Middle-thirds Cantor set.
    Cantor,
    /// (L,N)-regular set.
    Regular,
    /// (L,N)-regular set times [0,1].
    Product,
    /// Horizontal section of the carpet.
    Section,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct GalleryArgs {
    #[arg(long, value_enum)]
    pub set: GallerySet,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    /// Children kept per interval (regular, product).
    #[arg(long, default_value_t = 2)]
    pub l: u32,
    /// Children per interval (regular, product).
    #[arg(long, default_value_t = 3)]
    pub base: u32,
    /// `first`, `children:i,j,…`, or `seeded` (uses --seed).
    #[arg(long)]
    pub selection: Option<String>,
    /// Section line level (section).
    #[arg(long, default_value_t = 1)]
    pub line_level: u32,
    /// Section line index `i` of `y = (2i-1)/(2·3^level)` (section).
    #[arg(long, default_value_t = 2)]
    pub index: u64,
    #[arg(long, default_value_t = 512)]
    pub pixels: usize,
}

fn parse_selection(raw: Option<&str>, l: u32, base: u32, seed: u64) -> Result<Selection, CliError> {
    match raw {
        None if (l, base) == (2, 3) => Ok(Selection::Children(vec![0, 2])),
        None | Some("first") => Ok(Selection::First),
        Some("seeded") => Ok(Selection::Seeded(seed)),
        Some(s) => match s.strip_prefix("children:") {
            Some(list) => list
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| CliError::usage(format!("bad child index `{t}`"))))
                .collect::<Result<_, _>>()
                .map(Selection::Children),
            None => Err(CliError::usage(format!("unknown selection `{s}`"))),
        },
    }
}

pub fn gallery(ctx: &Context, a: &GalleryArgs) -> Out {
    let pj = params_json(a);
    let name = serde_json::to_value(a.set).expect("serializable").as_str().expect("string").to_string();
    let regular = || -> Result<RegularSetSpec, CliError> {
        Ok(RegularSetSpec { l: a.l, n: a.base, depth: a.depth, selection: parse_selection(a.selection.as_deref(), a.l, a.base, ctx.seed)? })
    };
    let mut extra = serde_json::Map::new();
    let (set, reference) = match a.set {
        GallerySet::Carpet => (carpet(a.depth), Some(ReferenceSet::Carpet)),
        GallerySet::Triangle => (triangle(a.depth), Some(ReferenceSet::Triangle)),
        GallerySet::Koch => {
            let k = koch(a.depth);
            extra.insert("polyline".into(), json!(k.polyline));
            extra.insert("segments".into(), json!(k.segment_count()));
            (k.raster, Some(ReferenceSet::Koch))
        }
        GallerySet::Cantor => (regular_set(&RegularSetSpec::cantor(a.depth))?, Some(ReferenceSet::Regular { l: 2, n: 3 })),
        GallerySet::Regular => (regular_set(&regular()?)?, Some(ReferenceSet::Regular { l: a.l, n: a.base })),
        GallerySet::Product => {
            let base = regular_set(&regular()?)?;
            (product_with_interval(&base)?, Some(ReferenceSet::Product { l: a.l, n: a.base }))
        }
        GallerySet::Section => (carpet_section(a.line_level, a.index, a.depth)?, None),
    };
    let set = set.with_provenance(ctx.provenance(&pj));
    let report = if a.depth >= 1 && !set.is_empty() {
        let (j_min, j_max) = default_window(a.depth);
        Some(box_count(&set, j_min, j_max)?)
    } else {
        None
    };
    let reference = match reference {
        Some(r) => Some(reference_dimension(r)?),
        None => None,
    };
    extra.insert("cells".into(), json!(set.len()));
    extra.insert("box_count".into(), json!(report));
    extra.insert("reference".into(), json!(reference));
    let files = vec![
        ctx.write_bytes(&format!("{name}.gridset"), set.to_text().as_bytes())?,
        ctx.write_bytes(&format!("{name}.ppm"), &render_gridset(&set, a.pixels).to_ppm(&set.provenance))?,
        ctx.write_json(&format!("{name}.json"), &pj, Value::Object(extra))?,
    ];
    let mut out = vec![format!(
        "{name}: {} cells at level {}; box-count slope {}",
        set.len(),
        set.level,
        report.and_then(|r| r.slope).map_or("n/a".into(), |s| format!("{s:.4}"))
    )];
    out.extend(written(&files));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationArg {
    H,
    V,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ArcArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    /// Level of the basic segment.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Position `i` of the segment along its grid line (1-based).
    #[arg(long, default_value_t = 2)]
    pub i: u64,
    /// Grid line `j/n^k` carrying the segment.
    #[arg(long, default_value_t = 1)]
    pub j: u64,
    #[arg(long, value_enum, default_value_t = OrientationArg::H)]
    pub orientation: OrientationArg,
    /// Refinement levels below the segment.
    #[arg(long, default_value_t = 6)]
    pub levels: u32,
    /// Neighbourhood radius (default `n^-k / 3`).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 729)]
    pub pixels: usize,
}

pub fn arc(ctx: &Context, a: &ArcArgs) -> Out {
    let pj = params_json(a);
    let depth = a.k + a.levels;
    let params = PercolationParams::new(a.n, a.p, 2, ctx.seed, depth)?;
    let tree = LazyTree::new(params, depth)?;
    let segment = match a.orientation {
        OrientationArg::H => BasicSegment::horizontal(a.k, a.i, a.j),
        OrientationArg::V => BasicSegment::vertical(a.k, a.i, a.j),
    };
    let epsilon = a.epsilon.unwrap_or_else(|| f64::from(a.n).powi(-(a.k as i32)) / 3.0);
    let arc = build_boundary_arc(&tree, &segment, epsilon, a.levels)?;
    let bad_counts: Vec<usize> = arc.bad_set.levels.iter().map(GridSet::len).collect();
    let polyline = arc.polyline();
    let mut files = vec![ctx.write_json(
        "arc.json",
        &pj,
        json!({
            "segment": segment,
            "epsilon": epsilon,
            "endpoints": segment.endpoints(a.n),
            "bad_counts": bad_counts,
            "detours": arc.detour_count(),
            "max_offset": arc.max_offset(),
            "polyline": polyline,
        }),
    )?];
    let bad = arc.bad_set.deepest().clone().with_provenance(ctx.provenance(&pj));
    files.push(ctx.write_bytes("badset.gridset", bad.to_text().as_bytes())?);
    // Render the kept cells at the finest level that still fits the image.
    let mut level = depth;
    while level > 0 && CellIndex::side_count(a.n, level) as usize > a.pixels.max(1) {
        level -= 1;
    }
    let px = image_side(CellIndex::side_count(a.n, level), a.pixels);
    let mut img = Image::new(px, px, WHITE);
    let coarse = generate(&params, level)?;
    img.fill_cells(coarse.kept(level), a.n, 2, LIGHT);
    img.draw_polyline(&polyline, palette(0));
    files.push(ctx.write_bytes("arc.ppm", &img.to_ppm(&ctx.provenance(&pj)))?);
    let mut out = vec![format!(
        "bad counts {:?}; {} detours; max offset {:.3e}; tree depth {}",
        bad_counts,
        arc.detour_count(),
        arc.max_offset(),
        tree.depth()
    )];
    out.extend(written(&files));
    Ok(out)
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ExtinctionArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: u8,
    #[arg(long, default_value_t = 25)]
    pub depth: u32,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

pub fn extinction(ctx: &Context, a: &ExtinctionArgs) -> Out {
    let pj = params_json(a);
    let params = PercolationParams::new(a.n, a.p, a.dim, ctx.seed, a.depth)?;
    let report = extinction_monte_carlo(&params, a.depth, a.trials)?;
    let path = ctx.write_json("extinction.json", &pj, json!({ "report": report }))?;
    let mut out = vec![format!(
        "analytic q = {:.10}; empirical extinction by depth {} = {:.4} over {} trials",
        report.analytic_q, report.depth, report.empirical_q, report.trials
    )];
    out.extend(written(&[path]));
    Ok(out)
}
