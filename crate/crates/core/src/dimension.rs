//! Moran equation, similarity dimensions, attractor discretization, mesh
//! covering counts and box/Assouad exponent fits.
//!
//! Dimension values and point clouds are plain `f64`: they are estimates or
//! roots of a transcendental equation, not exact quantities.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::geometry::{AffineF64, PointCloud, Similarity};
use crate::scalar::Scalar;
use crate::symbolic::{dedup_map_indices, stopping_set, IfsSystem, Word};

pub const DEFAULT_MORAN_TOL: f64 = 1e-12;
/// Upper bound on tree nodes visited while sampling an attractor.
pub const MAX_NODES: usize = 10_000_000;
const MAX_CENTERS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    Similarity,
    ReducedSimilarity,
    Box,
    Assouad,
}

impl fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateKind::Similarity => "similarity",
            EstimateKind::ReducedSimilarity => "reduced-similarity",
            EstimateKind::Box => "box",
            EstimateKind::Assouad => "assouad",
        })
    }
}

/// One covering measurement `N(B_r(x) ∩ F, ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringRecord {
    pub window_center: [f64; 2],
    pub dim: usize,
    pub r: f64,
    pub rho: f64,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    /// RMS residual of the fit; 0 for closed-form kinds.
    pub residual: f64,
    pub records: Vec<CoveringRecord>,
    /// Moran root before clamping to the ambient dimension.
    pub unclamped: Option<f64>,
    /// Assouad only: `max log N / log(r/ρ)` over all records.
    pub raw_ratio_max: Option<f64>,
}

impl DimensionEstimate {
    fn closed_form(kind: EstimateKind, value: f64, unclamped: f64) -> Self {
        DimensionEstimate {
            kind,
            value,
            residual: 0.0,
            records: Vec::new(),
            unclamped: Some(unclamped),
            raw_ratio_max: None,
        }
    }
}

fn moran_sum(ratios: &[f64], s: f64) -> f64 {
    ratios.iter().map(|c| c.powf(s)).sum()
}

/// The unique `s ≥ 0` with `Σ c_i^s = 1`, by bisection to absolute `tol`.
pub fn moran_solve(ratios: &[f64], tol: f64) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Invalid("no ratios".into()));
    }
    if let Some(c) = ratios.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
        return Err(Error::OutOfRange {
            name: "ratio",
            value: c.to_string(),
            range: "(0,1)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol.to_string(),
            range: "(0, inf)",
        });
    }
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while moran_sum(ratios, hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol / 4.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if moran_sum(ratios, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn moran_solve_scalars(ratios: &[Scalar], tol: f64) -> Result<f64> {
    let r: Vec<f64> = ratios.iter().map(Scalar::to_f64).collect();
    moran_solve(&r, tol)
}

/// `min(d, s)` with `s` the Moran root. The cap is the ambient dimension:
/// the Moran root can exceed `d` for heavily overlapping systems, and the
/// similarity dimension is meant to bound the Hausdorff dimension from above.
pub fn similarity_dimension(ifs: &IfsSystem) -> Result<DimensionEstimate> {
    let s = moran_solve_scalars(&ifs.ratios(), DEFAULT_MORAN_TOL)?;
    Ok(DimensionEstimate::closed_form(
        EstimateKind::Similarity,
        s.min(ifs.dim() as f64),
        s,
    ))
}

#[derive(Clone, Debug)]
pub struct ReducedDimension {
    pub estimate: DimensionEstimate,
    pub words: usize,
    /// Words whose map duplicates an earlier one and was dropped.
    pub duplicates_removed: usize,
    pub surviving_ratios: Vec<Scalar>,
}

/// Similarity dimension of the deduplicated map set `{S_α : α ∈ I_r}`.
pub fn reduced_similarity_dimension(ifs: &IfsSystem, r: &Scalar) -> Result<ReducedDimension> {
    let words = stopping_set(ifs, r)?;
    let maps: Vec<Similarity> = words
        .iter()
        .map(|w| ifs.word_map(w))
        .collect::<Result<_>>()?;
    let keep = dedup_map_indices(&maps, &ifs.backend().tolerance())?;
    let ratios: Vec<Scalar> = keep.iter().map(|&i| maps[i].ratio().clone()).collect();
    let s = moran_solve_scalars(&ratios, DEFAULT_MORAN_TOL)?;
    Ok(ReducedDimension {
        estimate: DimensionEstimate::closed_form(
            EstimateKind::ReducedSimilarity,
            s.min(ifs.dim() as f64),
            s,
        ),
        words: words.len(),
        duplicates_removed: words.len() - keep.len(),
        surviving_ratios: ratios,
    })
}

fn compose_affine(a: &AffineF64, b: &AffineF64) -> AffineF64 {
    let mut m = [[0.0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
        }
    }
    let t = a.apply(b.b);
    AffineF64 { dim: a.dim, m, b: t }
}

fn affine_cube_bbox(a: &AffineF64) -> ([f64; 2], [f64; 2]) {
    let corners: &[[f64; 2]] = if a.dim == 1 {
        &[[0.0, 0.0], [1.0, 0.0]]
    } else {
        &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
    };
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in corners {
        let p = a.apply(*c);
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Window {
    pub fn unit(dim: usize) -> Self {
        Window {
            lo: [0.0, 0.0],
            hi: [1.0, if dim == 1 { 0.0 } else { 1.0 }],
        }
    }

    pub fn contains(&self, p: &[f64; 2], dim: usize, slack: f64) -> bool {
        (0..dim).all(|k| p[k] >= self.lo[k] - slack && p[k] <= self.hi[k] + slack)
    }

    fn meets(&self, lo: &[f64; 2], hi: &[f64; 2], dim: usize, slack: f64) -> bool {
        (0..dim).all(|k| hi[k] >= self.lo[k] - slack && lo[k] <= self.hi[k] + slack)
    }
}

/// `{S_α(p₀) : α ∈ I_resolution}` with `p₀` the fixed point of the first
/// map, labeled by `α`. Each piece `S_α([0,1]^d)` has side at most
/// `resolution`, which is recorded as the cloud resolution.
pub fn attractor_points(ifs: &IfsSystem, resolution: &Scalar) -> Result<PointCloud> {
    attractor_points_in(ifs, resolution, None)
}

/// As [`attractor_points`], restricted to points in `window` (within
/// `1e-9`). Subtrees whose cube image misses the window are skipped when the
/// system is cube-invariant.
///
/// An internal node whose double-precision map is bitwise equal to one
/// already expanded is skipped: its subtree would repeat the same points.
/// Commuting maps such as `x/2` and `x/3` otherwise blow up the tree.
pub fn attractor_points_in(
    ifs: &IfsSystem,
    resolution: &Scalar,
    window: Option<&Window>,
) -> Result<PointCloud> {
    const SLACK: f64 = 1e-9;
    ifs.check_scale("resolution", resolution)?;
    let dim = ifs.dim();
    let p0v = ifs.base_point();
    let p0 = [p0v[0].to_f64(), p0v.get(1).map_or(0.0, Scalar::to_f64)];
    let affs: Vec<AffineF64> = ifs.maps().iter().map(Similarity::to_affine_f64).collect();
    let ratios = ifs.ratios();
    let prune = window.is_some() && ifs.cube_invariant();

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let identity = Similarity::identity(dim, ifs.backend()).to_affine_f64();
    let mut stack = vec![(Word::empty(), Scalar::one(ifs.backend()), identity)];
    let mut nodes = 0usize;
    let mut expanded: FxHashSet<[u64; 6]> = FxHashSet::default();
    while let Some((w, c, a)) = stack.pop() {
        nodes += 1;
        if nodes > MAX_NODES {
            return Err(Error::Infeasible(format!(
                "more than {MAX_NODES} tree nodes at resolution {resolution}"
            )));
        }
        if prune {
            let (lo, hi) = affine_cube_bbox(&a);
            if !window.expect("window").meets(&lo, &hi, dim, SLACK) {
                continue;
            }
        }
        if !w.is_empty() && ifs.ratio_at_most(&c, resolution) {
            let p = a.apply(p0);
            if window.is_none_or(|win| win.contains(&p, dim, SLACK)) {
                points.push(p);
                labels.push(w);
            }
            continue;
        }
        let key = [a.m[0][0], a.m[0][1], a.m[1][0], a.m[1][1], a.b[0], a.b[1]].map(f64::to_bits);
        if !expanded.insert(key) {
            continue;
        }
        for i in (0..ifs.len()).rev() {
            stack.push((w.child(i), &c * &ratios[i], compose_affine(&a, &affs[i])));
        }
    }
    Ok(PointCloud::new(dim, points)?
        .with_labels(labels)?
        .with_resolution(resolution.to_f64()))
}

/// Relative tolerance for a coordinate sitting on a mesh line.
const BOUNDARY_TOL: f64 = 1e-9;

/// Mesh indices of the closed cells `[kρ, (k+1)ρ]` containing `x`: one, or two
/// when `x` lies on a mesh line (lower index first).
fn cell_candidates(x: f64, rho: f64) -> (i64, Option<i64>) {
    let t = x / rho;
    let k = t.round();
    if (t - k).abs() <= BOUNDARY_TOL * k.abs().max(1.0) {
        let k = k as i64;
        (k - 1, Some(k))
    } else {
        (t.floor() as i64, None)
    }
}

/// Occupied cells of the `ρ`-mesh among `pts`, which must be sorted
/// lexicographically. A point on a mesh line joins an already occupied
/// candidate cell if there is one, otherwise the candidate with the highest
/// indices; this makes the count exact for sets built from aligned
/// intervals.
fn occupied_cells(pts: &[[f64; 2]], dim: usize, rho: f64) -> usize {
    let mut occupied: FxHashSet<[i64; 2]> = FxHashSet::default();
    occupied.reserve(pts.len().min(1 << 16));
    for p in pts {
        let cx = cell_candidates(p[0], rho);
        let cy = if dim == 2 {
            cell_candidates(p[1], rho)
        } else {
            (0, None)
        };
        if cx.1.is_none() && cy.1.is_none() {
            occupied.insert([cx.0, cy.0]);
            continue;
        }
        let xs = [Some(cx.0), cx.1];
        let ys = [Some(cy.0), cy.1];
        let mut found = false;
        for x in xs.iter().flatten() {
            for y in ys.iter().flatten() {
                found |= occupied.contains(&[*x, *y]);
            }
        }
        if !found {
            occupied.insert([cx.1.unwrap_or(cx.0), cy.1.unwrap_or(cy.0)]);
        }
    }
    occupied.len()
}

fn sorted_points(cloud: &PointCloud) -> Vec<[f64; 2]> {
    let mut pts = cloud.points().to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts
}

fn in_open_ball(p: &[f64; 2], c: &[f64; 2], r: f64) -> bool {
    let dx = p[0] - c[0];
    let dy = p[1] - c[1];
    dx * dx + dy * dy < r * r
}

fn check_covering_args(cloud: &PointCloud, r: f64, rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < r) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho.to_string(),
            range: "(0, r)",
        });
    }
    if let Some(res) = cloud.resolution() {
        if res > rho / 2.0 * (1.0 + 1e-12) {
            return Err(Error::CloudTooCoarse {
                resolution: res,
                rho,
            });
        }
    }
    Ok(())
}

/// Number of occupied cells of the axis-aligned `ρ`-mesh among cloud points
/// in the open ball `B_r(center)`. It matches the ball-covering number up to a
/// factor depending only on `d`.
pub fn covering_count(
    cloud: &PointCloud,
    center: [f64; 2],
    r: f64,
    rho: f64,
) -> Result<CoveringRecord> {
    check_covering_args(cloud, r, rho)?;
    let pts: Vec<[f64; 2]> = sorted_points(cloud)
        .into_iter()
        .filter(|p| in_open_ball(p, &center, r))
        .collect();
    Ok(CoveringRecord {
        window_center: center,
        dim: cloud.dim(),
        r,
        rho,
        count: occupied_cells(&pts, cloud.dim(), rho),
    })
}

/// Sorted cloud supporting repeated window queries.
struct SortedCloud {
    pts: Vec<[f64; 2]>,
}

impl SortedCloud {
    fn new(cloud: &PointCloud) -> Self {
        SortedCloud {
            pts: sorted_points(cloud),
        }
    }

    /// Points of the open ball, still sorted.
    fn ball(&self, c: &[f64; 2], r: f64) -> Vec<[f64; 2]> {
        let start = self.pts.partition_point(|p| p[0] <= c[0] - r);
        let end = self.pts.partition_point(|p| p[0] < c[0] + r);
        self.pts[start..end]
            .iter()
            .filter(|p| in_open_ball(p, c, r))
            .copied()
            .collect()
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::DegenerateFit(format!("{n} points")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    Ok((slope, icpt, (rss / n as f64).sqrt()))
}

/// Scale base `λ = max c_i` and the ladder `λ^k`.
fn ladder(ifs: &IfsSystem) -> Scalar {
    ifs.max_ratio()
}

/// Cloud fine enough for mesh size `λ^max_exp`.
fn cloud_for(ifs: &IfsSystem, max_exp: i32) -> Result<PointCloud> {
    let lambda = ladder(ifs);
    let mut res = lambda.powi(max_exp)?;
    let half = Scalar::from_ratio(1, 2, ifs.backend());
    let target = &res * &half;
    while res > target {
        res = &res * &lambda;
    }
    attractor_points(ifs, &res)
}

fn check_exps(min_exp: i32, max_exp: i32) -> Result<()> {
    if min_exp < 0 || min_exp >= max_exp {
        return Err(Error::Invalid(format!(
            "need 0 <= min_exp < max_exp, got {min_exp}..{max_exp}"
        )));
    }
    Ok(())
}

/// Slope of `log N(ρ)` against `log(1/ρ)` for `ρ = λ^k`,
/// `k ∈ [min_exp, max_exp]`, counting over the whole cube.
pub fn box_dimension_estimate(
    ifs: &IfsSystem,
    min_exp: i32,
    max_exp: i32,
) -> Result<DimensionEstimate> {
    check_exps(min_exp, max_exp)?;
    if max_exp - min_exp + 1 < 3 {
        return Err(Error::DegenerateFit("fewer than 3 scales".into()));
    }
    let lambda = ladder(ifs).to_f64();
    let cloud = cloud_for(ifs, max_exp)?;
    let d = ifs.dim();
    let center = [0.5, if d == 2 { 0.5 } else { 0.0 }];
    let r = (d as f64).sqrt();
    let sorted = SortedCloud::new(&cloud);
    let inside = sorted.ball(&center, r);
    let records: Vec<CoveringRecord> = (min_exp..=max_exp)
        .into_par_iter()
        .map(|k| {
            let rho = lambda.powi(k);
            CoveringRecord {
                window_center: center,
                dim: d,
                r,
                rho,
                count: occupied_cells(&inside, d, rho),
            }
        })
        .collect();
    let xs: Vec<f64> = records.iter().map(|c| -c.rho.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|c| (c.count as f64).ln()).collect();
    let (slope, _, residual) = linear_fit(&xs, &ys)?;
    Ok(DimensionEstimate {
        kind: EstimateKind::Box,
        value: slope.clamp(0.0, d as f64),
        residual,
        records,
        unclamped: None,
        raw_ratio_max: None,
    })
}

/// Deterministic window centers: every `2^d`-th cloud point, thinned by a
/// larger stride when needed so at most 512 centers spread over the cloud.
fn window_centers(cloud: &PointCloud) -> Vec<[f64; 2]> {
    let base = 1usize << cloud.dim();
    let n = cloud.len();
    let per = n.div_ceil(base).div_ceil(MAX_CENTERS).max(1);
    cloud
        .points()
        .iter()
        .step_by(base * per)
        .take(MAX_CENTERS)
        .copied()
        .collect()
}

/// Assouad exponent from windows `B_r(x)` with `(r, ρ) = (λ^i, λ^j)`,
/// `min_exp ≤ i < j ≤ max_exp`, `j - i ≥ min_gap`.
///
/// For each radius `λ^i` and gap `g = j - i` the worst count over centers is
/// `M_i(g)`. Each radius seeing at least two gaps gives a slope of
/// `log M_i(g)` against `g·log(1/λ)`, and the estimate is the largest of
/// these slopes, mirroring the supremum over scales in the definition.
/// Fitting per radius removes the constant `K`, and it keeps large windows,
/// which the edge of the set clips, from being mixed with small unclipped
/// ones. The raw ratio `max log N / log(r/ρ)` is reported alongside.
///
/// Counts at mesh `λ^j` use the cloud at resolution about `λ^j/2` rather
/// than the finest one.
pub fn assouad_estimate(
    ifs: &IfsSystem,
    min_gap: i32,
    min_exp: i32,
    max_exp: i32,
) -> Result<DimensionEstimate> {
    check_exps(min_exp, max_exp)?;
    if min_gap < 3 {
        return Err(Error::OutOfRange {
            name: "min_gap",
            value: min_gap.to_string(),
            range: "[3, inf)",
        });
    }
    if max_exp - min_exp < min_gap {
        return Err(Error::DegenerateFit(format!(
            "no scale pair with gap >= {min_gap} in {min_exp}..{max_exp}"
        )));
    }
    let lambda = ladder(ifs).to_f64();
    let d = ifs.dim();
    let first_j = min_exp + min_gap;
    let clouds: Vec<SortedCloud> = (first_j..=max_exp)
        .map(|j| cloud_for(ifs, j).map(|c| SortedCloud::new(&c)))
        .collect::<Result<_>>()?;
    let centers = window_centers(&cloud_for(ifs, max_exp)?);
    let rows: Vec<Vec<CoveringRecord>> = centers
        .par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for i in min_exp..=max_exp - min_gap {
                let r = lambda.powi(i);
                for j in i + min_gap..=max_exp {
                    let rho = lambda.powi(j);
                    let ball = clouds[(j - first_j) as usize].ball(c, r);
                    out.push(CoveringRecord {
                        window_center: *c,
                        dim: d,
                        r,
                        rho,
                        count: occupied_cells(&ball, d, rho),
                    });
                }
            }
            out
        })
        .collect();
    let records: Vec<CoveringRecord> = rows.into_iter().flatten().collect();
    let log_inv = -lambda.ln();
    // (i, g) -> worst count; records come in a fixed order per center.
    let mut worst: std::collections::BTreeMap<(i32, i32), usize> = Default::default();
    let mut raw: f64 = 0.0;
    for rec in &records {
        let i = (rec.r.ln() / -log_inv).round() as i32;
        let g = ((rec.r / rec.rho).ln() / log_inv).round() as i32;
        let e = worst.entry((i, g)).or_insert(0);
        *e = (*e).max(rec.count);
        raw = raw.max((rec.count as f64).ln() / (rec.r / rec.rho).ln());
    }
    let mut groups: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for ((i, g), m) in &worst {
        if groups.is_empty() || worst.range((*i, i32::MIN)..(*i, *g)).next().is_none() {
            groups.push((Vec::new(), Vec::new()));
        }
        let grp = groups.last_mut().expect("group");
        grp.0.push(*g as f64 * log_inv);
        grp.1.push((*m as f64).max(1.0).ln());
    }
    groups.retain(|(x, _)| x.len() >= 2);
    let mut best: Option<(f64, f64)> = None;
    for (x, y) in &groups {
        let (slope, _, res) = linear_fit(x, y)?;
        if best.is_none_or(|(b, _)| slope > b) {
            best = Some((slope, res));
        }
    }
    let (value, residual) = best.unwrap_or((raw, 0.0));
    Ok(DimensionEstimate {
        kind: EstimateKind::Assouad,
        value: value.clamp(0.0, d as f64),
        residual,
        records,
        unclamped: None,
        raw_ratio_max: Some(raw),
    })
}

/// Heuristic regularity check; it does not measure `H^s`.
#[derive(Clone, Debug)]
pub struct AhlforsReport {
    pub s: f64,
    pub rho0: f64,
    /// `(center, r, N(B_r(x), ρ₀)·ρ₀^s / r^s)`.
    pub samples: Vec<([f64; 2], f64, f64)>,
    /// `max/min` of the normalized values.
    pub spread: f64,
    /// Every count was 1: the set looks like a point at these scales.
    pub degenerate: bool,
}

/// Normalized counts `N(B_r(x), ρ₀)·ρ₀^s / r^s` over window centers and the
/// given radii. A small spread is consistent with `s`-regularity; a spread
/// growing with the radius range is evidence against it.
pub fn ahlfors_diagnostic(
    ifs: &IfsSystem,
    s: f64,
    radii: &[f64],
    rho0: f64,
) -> Result<AhlforsReport> {
    if !(s > 0.0 && s <= ifs.dim() as f64) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s.to_string(),
            range: "(0, d]",
        });
    }
    if radii.iter().any(|&r| !(r > rho0)) {
        return Err(Error::Invalid("every radius must exceed rho0".into()));
    }
    let lambda = ladder(ifs).to_f64();
    let k = (rho0.ln() / lambda.ln()).ceil() as i32;
    let cloud = cloud_for(ifs, k.max(1))?;
    let sorted = SortedCloud::new(&cloud);
    let mut samples = Vec::new();
    let mut all_one = true;
    for c in window_centers(&cloud) {
        for &r in radii {
            let n = occupied_cells(&sorted.ball(&c, r), cloud.dim(), rho0);
            all_one &= n <= 1;
            samples.push((c, r, n as f64 * rho0.powf(s) / r.powf(s)));
        }
    }
    let max = samples.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    Ok(AhlforsReport {
        s,
        rho0,
        spread: if min > 0.0 { max / min } else { f64::INFINITY },
        samples,
        degenerate: all_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Backend::Exact;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, Exact)
    }

    fn line_ifs(maps: &[(i64, i64, i64, i64)]) -> IfsSystem {
        let m = maps
            .iter()
            .map(|&(cn, cd, tn, td)| Similarity::line(q(cn, cd), false, q(tn, td)).unwrap())
            .collect();
        IfsSystem::new("t", m).unwrap()
    }

    fn cantor() -> IfsSystem {
        line_ifs(&[(1, 3, 0, 1), (1, 3, 2, 3)])
    }

    #[test]
    fn moran_examples() {
        let s = moran_solve(&[1.0 / 3.0; 2], 1e-12).unwrap();
        assert!((s - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        let s = moran_solve(&[0.2; 4], 1e-12).unwrap();
        assert!((s - 4f64.ln() / 5f64.ln()).abs() < 1e-12);
        assert_eq!(moran_solve(&[0.5], 1e-12).unwrap(), 0.0);
        assert!(moran_solve(&[1.5, 0.5], 1e-12).is_err());
        let s = moran_solve(&[0.5; 3], 1e-12).unwrap();
        assert!((s - 3f64.ln() / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn similarity_dimension_clamps() {
        let e = similarity_dimension(&line_ifs(&[(1, 2, 0, 1), (1, 2, 1, 4), (1, 2, 1, 2)])).unwrap();
        assert_eq!(e.value, 1.0);
        assert!(e.unclamped.unwrap() > 1.5);
    }

    #[test]
    fn cantor_cloud() {
        let c = attractor_points(&cantor(), &q(1, 9)).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|p| p[0]).collect();
        let want = [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0];
        assert_eq!(xs.len(), 4);
        for (a, b) in xs.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        for n in 1..8 {
            let c = attractor_points(&cantor(), &q(1, 3i64.pow(n))).unwrap();
            assert_eq!(c.len(), 1 << n);
        }
    }

    #[test]
    fn grid_counts() {
        let g = PointCloud::grid(1, 1001, 0.0, 1.0).unwrap();
        assert_eq!(covering_count(&g, [0.5, 0.0], 1.0, 0.5).unwrap().count, 2);
        assert_eq!(covering_count(&g, [0.5, 0.0], 1.0, 0.1).unwrap().count, 10);
        let g2 = PointCloud::grid(2, 101, 0.0, 1.0).unwrap();
        assert_eq!(covering_count(&g2, [0.5, 0.5], 2.0, 0.1).unwrap().count, 100);
    }

    #[test]
    fn coarse_cloud_rejected() {
        let c = attractor_points(&cantor(), &q(1, 9)).unwrap();
        assert!(matches!(
            covering_count(&c, [0.0, 0.0], 1.0, 1.0 / 9.0),
            Err(Error::CloudTooCoarse { .. })
        ));
    }

    #[test]
    fn cantor_box_is_exact_on_aligned_mesh() {
        let e = box_dimension_estimate(&cantor(), 4, 8).unwrap();
        for r in &e.records {
            let k = (r.rho.ln() / (1.0f64 / 3.0).ln()).round() as u32;
            assert_eq!(r.count, 1 << k);
        }
        assert!((e.value - 2f64.ln() / 3f64.ln()).abs() < 1e-9);
        assert!(box_dimension_estimate(&cantor(), 4, 5).is_err());
    }

    #[test]
    fn single_point_box_is_zero() {
        let p = line_ifs(&[(1, 2, 1, 4)]);
        let e = box_dimension_estimate(&p, 2, 6).unwrap();
        assert_eq!(e.value, 0.0);
        let a = ahlfors_diagnostic(&p, 0.5, &[0.25, 0.125], 1.0 / 64.0).unwrap();
        assert!(a.degenerate);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let (m, b, r) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((m - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && r < 1e-15);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }
}
