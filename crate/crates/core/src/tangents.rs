//! Constructive tangent machinery in the line: orientation normalization of
//! near-identity witnesses, the inductive pseudo-tangent builder, the
//! Bandt–Graf word family, pre-tangent sets `E_k` and zoomed attractor clouds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dimension::{attractor_points_in, Window};
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Similarity};
use crate::scalar::{Backend, Scalar};
use crate::symbolic::{IfsSystem, Word};

/// A pair `(α, β)` with its relative map `S_α⁻¹∘S_β`.
#[derive(Clone, Debug)]
pub struct WitnessPair {
    pub alpha: Word,
    pub beta: Word,
    pub relative: Similarity,
    pub id_distance: Scalar,
}

/// Near-identity witnesses with strictly decreasing positive distances.
#[derive(Clone, Debug)]
pub struct WitnessSequence {
    pub pairs: Vec<WitnessPair>,
    /// Every `S_α` has positive derivative.
    pub orientation_normalized: bool,
}

impl WitnessSequence {
    /// Relative maps are composed from the words. On float backends the
    /// composition cancels about `log10(1/c_α)` digits; a distance below
    /// that noise floor is rejected rather than returned as garbage.
    pub fn from_words(ifs: &IfsSystem, pairs: Vec<(Word, Word)>) -> Result<Self> {
        require_line(ifs)?;
        let mut out = Vec::with_capacity(pairs.len());
        for (alpha, beta) in pairs {
            let sa = ifs.word_map(&alpha)?;
            let sb = ifs.word_map(&beta)?;
            let relative = sa.inverse().compose(&sb)?;
            let id_distance = relative.identity_distance();
            if let Some(digits) = ifs.backend().precision_digits() {
                let len = alpha.len().max(beta.len()).max(1) as f64;
                let scale = 1.0 + sa.translation()[0].to_f64().abs() + sb.translation()[0].to_f64().abs();
                let noise = -(digits as f64) + (len * scale).log10() - sa.ratio().approx_log10_abs();
                if id_distance.is_zero() || id_distance.approx_log10_abs() < noise + 2.0 {
                    return Err(Error::Precision(format!(
                        "relative map of ({alpha}, {beta}) is below the rounding floor 1e{noise:.0} \
                         of {}; use more digits or the exact backend",
                        ifs.backend()
                    )));
                }
            }
            out.push(WitnessPair {
                alpha,
                beta,
                relative,
                id_distance,
            });
        }
        Self::validated(ifs, out)
    }

    /// Bandt–Graf witnesses for each `m` in `ms`, with relative maps taken
    /// from the closed-form offset rather than recomposed from the words.
    pub fn bandt_graf(ifs: &IfsSystem, ms: &[u32], truncation: u32) -> Result<Self> {
        require_line(ifs)?;
        let b = ifs.backend();
        let mut out = Vec::with_capacity(ms.len());
        for &m in ms {
            let w = bandt_graf_witness(m, truncation, b)?;
            let relative = Similarity::line(Scalar::one(b), false, w.offset.clone())?;
            out.push(WitnessPair {
                id_distance: w.offset.abs(),
                alpha: w.alpha,
                beta: w.beta,
                relative,
            });
        }
        Self::validated(ifs, out)
    }

    fn validated(ifs: &IfsSystem, pairs: Vec<WitnessPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Invalid("witness sequence is empty".into()));
        }
        for (i, p) in pairs.iter().enumerate() {
            if !p.id_distance.is_positive() {
                return Err(Error::Invalid(format!(
                    "witness ({}, {}) has zero distance (an exact overlap)",
                    p.alpha, p.beta
                )));
            }
            if i > 0 && p.id_distance >= pairs[i - 1].id_distance {
                return Err(Error::Invalid(format!(
                    "witness distances must strictly decrease (pair {})",
                    i + 1
                )));
            }
        }
        let orientation_normalized = pairs.iter().all(|p| !reflects(ifs, &p.alpha));
        Ok(WitnessSequence {
            pairs,
            orientation_normalized,
        })
    }
}

fn require_line(ifs: &IfsSystem) -> Result<()> {
    if ifs.dim() != 1 {
        return Err(Error::RequiresDimension {
            need: 1,
            got: ifs.dim(),
        });
    }
    Ok(())
}

/// Whether `S_w` reverses orientation: odd number of reflecting letters.
fn reflects(ifs: &IfsSystem, w: &Word) -> bool {
    w.letters()
        .iter()
        .filter(|&&i| ifs.maps()[i].orthogonal().reflect())
        .count()
        % 2
        == 1
}

/// Makes every `S_α` orientation preserving. A pair with reflecting `S_α` is
/// replaced by `(α·r, β·r)` for the first reflecting map `S_r`, which
/// conjugates its relative map by `S_r` and so scales its distance by at
/// most `c_r⁻¹` when `S_r` keeps the unit interval. The result keeps the
/// longest strictly decreasing prefix-greedy subsequence.
pub fn normalize_orientation(ifs: &IfsSystem, seq: &WitnessSequence) -> Result<WitnessSequence> {
    require_line(ifs)?;
    let r = ifs.maps().iter().position(|m| m.orthogonal().reflect());
    let mut fixed = Vec::with_capacity(seq.pairs.len());
    for p in &seq.pairs {
        if !reflects(ifs, &p.alpha) {
            fixed.push(p.clone());
            continue;
        }
        // A reflecting S_α needs some reflecting letter.
        let r = r.expect("reflecting word implies a reflecting map");
        let sr = &ifs.maps()[r];
        let relative = sr.inverse().compose(&p.relative)?.compose(sr)?;
        fixed.push(WitnessPair {
            alpha: p.alpha.child(r),
            beta: p.beta.child(r),
            id_distance: relative.identity_distance(),
            relative,
        });
    }
    let mut kept: Vec<WitnessPair> = Vec::with_capacity(fixed.len());
    for p in fixed {
        if p.id_distance.is_positive()
            && kept.last().is_none_or(|q| p.id_distance < q.id_distance)
        {
            kept.push(p);
        }
    }
    let out = WitnessSequence::validated(ifs, kept)?;
    debug_assert!(out.orientation_normalized);
    Ok(out)
}

/// `(k_j, m_j)`: witness index and power of `f` chosen at step `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selection {
    pub witness: usize,
    pub power: i32,
}

/// Data fixed before the induction starts.
#[derive(Clone, Debug)]
pub struct PseudoTangentSetup {
    /// Base point: the anchor the pieces shrink towards.
    pub a: Scalar,
    /// The other fixed point used for the `2ρ`-ball dichotomy.
    pub b: Scalar,
    /// Index of the map `S` with `f = S∘S`.
    pub f_map: usize,
    /// `f' = c`.
    pub c: Scalar,
    pub rho: Scalar,
    /// Least `M` with `f^M(F) ⊆ B_ρ(a)`.
    pub m_min: i32,
    /// `+1` when the relative maps push right on `B_2ρ(a)`, `-1` otherwise.
    pub sign: i32,
    /// Indices of the usable witnesses and their `δ_k`.
    pub usable: Vec<(usize, Scalar)>,
}

#[derive(Clone, Debug)]
pub struct PseudoTangentRun {
    pub setup: PseudoTangentSetup,
    pub n: usize,
    pub epsilon: Scalar,
    pub selections: Vec<Selection>,
    /// `|g_j∘h_j(a) - g_{j-1}∘h_{j-1}(a)|`.
    pub increments: Vec<Scalar>,
    /// `a` followed by `g_j∘h_j(a)`.
    pub points: Vec<Scalar>,
    pub cloud: PointCloud,
}

impl PseudoTangentRun {
    pub fn a(&self) -> &Scalar {
        &self.setup.a
    }

    pub fn c(&self) -> &Scalar {
        &self.setup.c
    }

    /// `[a, a+1]`, mirrored to `[a-1, a]` when the construction runs left.
    pub fn interval(&self) -> (f64, f64) {
        let a = self.setup.a.to_f64();
        if self.setup.sign > 0 {
            (a, a + 1.0)
        } else {
            (a - 1.0, a)
        }
    }

    /// Whether every increment lies in `[cε, 3ε]`.
    pub fn increments_bracketed(&self) -> bool {
        let lo = &self.setup.c * &self.epsilon;
        let hi = Scalar::from_i64(3, self.epsilon.backend()) * &self.epsilon;
        self.increments.iter().all(|d| *d >= lo && *d <= hi)
    }

    /// `3(cn)⁻¹`.
    pub fn hausdorff_bound(&self) -> f64 {
        3.0 / (self.setup.c.to_f64() * self.n as f64)
    }

    /// Recomputes `g_j∘h_j(a)` by composing the maps of the construction
    /// from the witness words. Exact on the exact backend; on float
    /// backends the huge `g_j` ratios amplify rounding.
    pub fn recompose(&self, ifs: &IfsSystem, seq: &WitnessSequence) -> Result<Vec<Scalar>> {
        let f = ifs.maps()[self.setup.f_map].compose(&ifs.maps()[self.setup.f_map])?;
        let finv = f.inverse();
        let mut g = Similarity::identity(1, ifs.backend());
        let mut h = g.clone();
        let a = [self.setup.a.clone()];
        let mut out = vec![self.setup.a.clone()];
        for s in &self.selections {
            let p = &seq.pairs[s.witness];
            let fm = power(&f, &finv, s.power)?;
            let fmi = power(&f, &finv, -s.power)?;
            g = g.compose(&fmi)?.compose(&ifs.word_map(&p.alpha)?.inverse())?;
            h = ifs.word_map(&p.beta)?.compose(&fm)?.compose(&h)?;
            out.push(g.apply(&h.apply(&a))[0].clone());
        }
        Ok(out)
    }
}

fn power(f: &Similarity, finv: &Similarity, k: i32) -> Result<Similarity> {
    let base = if k >= 0 { f } else { finv };
    let mut out = Similarity::identity(f.dim(), f.backend());
    for _ in 0..k.unsigned_abs() {
        out = out.compose(base)?;
    }
    Ok(out)
}

/// Fixes `a`, `b`, `f`, `ρ = |a-b|/5`, `M` and the sign case shared by the
/// most witnesses; witnesses outside that case are dropped.
pub fn pseudo_tangent_setup(ifs: &IfsSystem, seq: &WitnessSequence) -> Result<PseudoTangentSetup> {
    require_line(ifs)?;
    if !seq.orientation_normalized {
        return Err(Error::Invalid(
            "witnesses must be orientation normalized first".into(),
        ));
    }
    let bk = ifs.backend();
    let fixed: Vec<Scalar> = ifs
        .maps()
        .iter()
        .map(|m| m.fixed_point().map(|p| p[0].clone()))
        .collect::<Result<_>>()?;
    let a0 = fixed[0].clone();
    let b0 = fixed
        .iter()
        .find(|p| p.key() != a0.key())
        .cloned()
        .ok_or_else(|| Error::Invalid("all maps share one fixed point".into()))?;
    let rho = (&a0 - &b0).abs().checked_div(&Scalar::from_i64(5, bk))?;
    let two_rho = Scalar::from_i64(2, bk) * &rho;

    // Cases in preference order: anchor a or b, pushing right or left.
    let mut best: Option<(usize, Scalar, i32, Vec<(usize, Scalar)>)> = None;
    for anchor in [&a0, &b0] {
        for sign in [1, -1] {
            let mut usable = Vec::new();
            for (k, p) in seq.pairs.iter().enumerate() {
                let slope = (&signed_ratio(&p.relative) - &Scalar::one(bk)).abs();
                let phi = displacement(&p.relative, anchor);
                let phi = if sign > 0 { phi } else { -phi };
                let zeta = &phi - &(&two_rho * &slope);
                let delta = &phi - &(&rho * &slope);
                if !zeta.is_negative() && delta.is_positive() {
                    usable.push((k, delta));
                }
            }
            let anchor_i = if anchor.key() == a0.key() { 0 } else { 1 };
            if best.as_ref().is_none_or(|b| usable.len() > b.3.len()) {
                best = Some((anchor_i, anchor.clone(), sign, usable));
            }
        }
    }
    let (anchor_i, a, sign, usable) = best.expect("four cases");
    if usable.is_empty() {
        return Err(Error::WitnessesExhausted(
            "no witness keeps the 2ρ-ball on one side of the origin".into(),
        ));
    }
    let b = if anchor_i == 0 { b0 } else { a0 };
    let f_map = fixed
        .iter()
        .position(|p| p.key() == a.key())
        .expect("anchor is a fixed point");
    let c = ifs.maps()[f_map].ratio() * ifs.maps()[f_map].ratio();

    // F ⊆ B(a, R) with R = max|S_i(a) - a| / (1 - c_max).
    let reach = ifs
        .maps()
        .iter()
        .map(|m| (&m.apply(std::slice::from_ref(&a))[0] - &a).abs())
        .fold(Scalar::zero(bk), Scalar::max);
    let radius = reach.checked_div(&(&Scalar::one(bk) - &ifs.max_ratio()))?;
    let mut m_min = 0;
    let mut reach_m = radius;
    while reach_m >= rho {
        reach_m = &reach_m * &c;
        m_min += 1;
    }
    Ok(PseudoTangentSetup {
        a,
        b,
        f_map,
        c,
        rho,
        m_min,
        sign,
        usable,
    })
}

fn signed_ratio(s: &Similarity) -> Scalar {
    if s.orthogonal().reflect() {
        -s.ratio()
    } else {
        s.ratio().clone()
    }
}

/// `S(y) - y` as `(σc - 1)y + t`. Subtracting `S(y)` from `y` would cancel
/// every digit of a translation offset far below the working precision;
/// this form is exact when `σc = 1`.
fn displacement(s: &Similarity, y: &Scalar) -> Scalar {
    let lin = &signed_ratio(s) - &Scalar::one(y.backend());
    let t = &s.translation()[0];
    if lin.is_zero() {
        t.clone()
    } else {
        &(&lin * y) + t
    }
}

/// The unique `m` with `L^m < u ≤ L^{m+1}`, `L > 1`.
fn bracket_power(u: &Scalar, big_l: &Scalar) -> Result<i32> {
    let est = (u.approx_log10_abs() / big_l.approx_log10_abs()).ceil() - 1.0;
    if !est.is_finite() || est.abs() > 1e6 {
        return Err(Error::Precision(format!("power bracket for {u} out of range")));
    }
    let mut m = est as i32;
    while big_l.powi(m)? >= *u {
        m -= 1;
    }
    while big_l.powi(m + 1)? < *u {
        m += 1;
    }
    Ok(m)
}

enum Attempt {
    Done(PseudoTangentRun),
    Stuck(usize),
}

fn attempt(
    ifs: &IfsSystem,
    seq: &WitnessSequence,
    setup: &PseudoTangentSetup,
    n: usize,
) -> Result<Attempt> {
    let bk = ifs.backend();
    let c = &setup.c;
    let big_l = c.recip()?;
    let epsilon = (c * &Scalar::from_i64(n as i64, bk)).recip()?;
    let sign = if setup.sign > 0 {
        Scalar::one(bk)
    } else {
        Scalar::from_i64(-1, bk)
    };
    let mut d = Scalar::one(bk);
    let mut h = setup.a.clone();
    let mut point = setup.a.clone();
    let mut points = vec![point.clone()];
    let mut increments = Vec::with_capacity(n);
    let mut selections = Vec::with_capacity(n);
    for j in 0..n {
        let mut chosen = None;
        for (k, delta) in &setup.usable {
            let u = epsilon.checked_div(&(&d * delta))?;
            let m = bracket_power(&u, &big_l)?;
            if m >= setup.m_min {
                chosen = Some((*k, m));
                break;
            }
        }
        let Some((k, m)) = chosen else {
            return Ok(Attempt::Stuck(j));
        };
        let p = &seq.pairs[k];
        // f^m(h) = a + c^m (h - a) since f fixes a.
        let y = &setup.a + &(c.powi(m)? * (&h - &setup.a));
        let phi = displacement(&p.relative, &y);
        let lm = big_l.powi(m)?;
        let inc = &d * &lm * (&sign * &phi);
        point = &point + &(&sign * &inc);
        points.push(point.clone());
        increments.push(inc);
        selections.push(Selection { witness: k, power: m });
        d = &d * &lm * &ifs.word_ratio(&p.alpha)?.recip()?;
        h = ifs.word_map(&p.beta)?.apply(&[y])[0].clone();
    }
    let cloud = PointCloud::from_line(points.iter().map(Scalar::to_f64))?;
    Ok(Attempt::Done(PseudoTangentRun {
        setup: setup.clone(),
        n,
        epsilon,
        selections,
        increments,
        points,
        cloud,
    }))
}

/// Runs the induction with `ε = (cn)⁻¹` and returns `a` plus the `n`
/// points `g_j∘h_j(a)`. Fails with the finest achievable `n` when no
/// witness fits the bracket `d_{j-1}c^{-m}δ_k < ε ≤ d_{j-1}c^{-m-1}δ_k`
/// with `m ≥ M`.
pub fn build_pseudo_tangent(
    ifs: &IfsSystem,
    seq: &WitnessSequence,
    n: usize,
) -> Result<PseudoTangentRun> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: "0".into(),
            range: "[1, inf)",
        });
    }
    let setup = pseudo_tangent_setup(ifs, seq)?;
    match attempt(ifs, seq, &setup, n)? {
        Attempt::Done(run) => Ok(run),
        Attempt::Stuck(j) => {
            let finest = finest_with(ifs, seq, &setup, n - 1)?;
            Err(Error::WitnessesExhausted(format!(
                "step {} of {n}: no witness reaches ε = (cn)⁻¹ with m ≥ {}; \
                 finest achievable n = {finest}",
                j + 1,
                setup.m_min
            )))
        }
    }
}

/// Largest `n ≤ n_max` whose run completes; 0 when none does.
pub fn finest_achievable_n(ifs: &IfsSystem, seq: &WitnessSequence, n_max: usize) -> Result<usize> {
    let setup = pseudo_tangent_setup(ifs, seq)?;
    finest_with(ifs, seq, &setup, n_max)
}

fn finest_with(
    ifs: &IfsSystem,
    seq: &WitnessSequence,
    setup: &PseudoTangentSetup,
    n_max: usize,
) -> Result<usize> {
    for n in (1..=n_max).rev() {
        if let Attempt::Done(_) = attempt(ifs, seq, setup, n)? {
            return Ok(n);
        }
    }
    Ok(0)
}

/// Words `α, β` of length `2^m+1` over `{x/5, x/5+t/5, x/5+4/5}` with
/// `S_α⁻¹∘S_β = x + offset`.
#[derive(Clone, Debug)]
pub struct BandtGrafWitness {
    pub m: u32,
    pub alpha: Word,
    pub beta: Word,
    pub offset: Scalar,
    /// Offset for the parameter truncated at `K` terms.
    pub offset_exact: BigRational,
}

fn pow5(e: u64) -> BigInt {
    num_traits::pow(BigInt::from(5), usize::try_from(e).expect("exponent fits"))
}

/// `t_K = 4 Σ_{k<K} 5^{-2^k}`.
pub fn bandt_graf_t(truncation: u32) -> BigRational {
    (0..truncation).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::from(4), pow5(1u64 << k))
    })
}

/// Largest `K` supported; `5^{2^K}` must stay representable.
pub const MAX_TRUNCATION: u32 = 16;

/// The relative map offset is `5^{n-1}(t - 4 Σ_{l≤m} 5^{-2^l})`, which for the
/// truncated parameter is `4 Σ_{k=m+1}^{K-1} 5^{2^m - 2^k}`.
pub fn bandt_graf_witness(m: u32, truncation: u32, b: Backend) -> Result<BandtGrafWitness> {
    if m == 0 {
        return Err(Error::OutOfRange {
            name: "m",
            value: "0".into(),
            range: "[1, K-2]",
        });
    }
    if truncation > MAX_TRUNCATION {
        return Err(Error::OutOfRange {
            name: "truncation",
            value: truncation.to_string(),
            range: "[1, 16]",
        });
    }
    if truncation <= m + 1 {
        return Err(Error::Precision(format!(
            "m = {m} needs truncation K > {} (got {truncation}): the truncated offset vanishes",
            m + 1
        )));
    }
    let n = (1usize << m) + 1;
    let mut alpha = vec![0usize; n];
    let mut beta = vec![0usize; n];
    beta[0] = 1;
    for l in 0..=m {
        alpha[1 << l] = 2;
    }
    let top = pow5(1u64 << m);
    let offset_exact = (m + 1..truncation).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::from(4) * &top, pow5(1u64 << k))
    });
    let offset = Scalar::from_rational(&offset_exact, b);
    if !offset.is_positive() || !offset.is_finite() {
        return Err(Error::Precision(format!(
            "offset for m = {m} underflows the {b} backend"
        )));
    }
    Ok(BandtGrafWitness {
        m,
        alpha: Word::new(alpha),
        beta: Word::new(beta),
        offset,
        offset_exact,
    })
}

/// Decimal digits needed to recompose the `m` offset from the words in
/// floating point: the words' ratio `5^{-(2^m+1)}` is cancelled against an
/// offset of size `5^{-2^m}`.
pub fn bandt_graf_recomposition_digits(m: u32) -> u32 {
    let e = ((1u64 << (m + 1)) + 1) as f64;
    (e * 5f64.log10()).ceil() as u32 + 4
}

/// Translation of `S_α⁻¹∘S_β` recomposed from the words.
pub fn relative_offset(ifs: &IfsSystem, alpha: &Word, beta: &Word) -> Result<Scalar> {
    require_line(ifs)?;
    let r = ifs.word_map(alpha)?.inverse().compose(&ifs.word_map(beta)?)?;
    Ok(r.translation()[0].clone())
}

/// Truncation cutoff for `α^m β^n` in pre-tangent sets.
pub const PRETANGENT_CUTOFF: f64 = 1e-6;

/// `E_k^d` with the exponents of each point.
#[derive(Clone, Debug)]
pub struct PretangentSet {
    pub cloud: PointCloud,
    /// `(m, n, z)` per point, `z` the corner index (bit `l` is coordinate
    /// `l`); the origin carries corner 0.
    pub exponents: Vec<(u32, i64, usize)>,
    pub warnings: Vec<String>,
}

/// `⋃_{z ∈ Λ} {α^m β^n z : m ≥ 0, n ≥ -k} ∩ [0,1]^d`, keeping
/// `α^m β^n ≥ 1e-6`. The corner `z = 0` contributes the origin.
pub fn pretangent_ek(alpha: f64, beta: f64, k: u32, d: usize) -> Result<PretangentSet> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfRange {
                name,
                value: v.to_string(),
                range: "(0, 1)",
            });
        }
    }
    if !(1..=2).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut warnings = Vec::new();
    if let Some((p, q)) = log_commensurable(alpha, beta) {
        warnings.push(format!(
            "log({beta})/log({alpha}) ≈ {p}/{q}: the pre-tangent sets need not fill [0,1]"
        ));
    }
    let mut values = Vec::new();
    let mut n = -(k as i64);
    loop {
        let bn = beta.powi(n as i32);
        if bn < PRETANGENT_CUTOFF {
            break;
        }
        let mut m = 0u32;
        loop {
            let v = alpha.powi(m as i32) * bn;
            if v < PRETANGENT_CUTOFF {
                break;
            }
            if v <= 1.0 {
                values.push((v, m, n));
            }
            m += 1;
        }
        n += 1;
    }
    let mut entries: Vec<([f64; 2], (u32, i64, usize))> = vec![([0.0, 0.0], (0, 0, 0))];
    for z in 1..(1usize << d) {
        for &(v, m, n) in &values {
            let p = [
                if z & 1 == 1 { v } else { 0.0 },
                if d == 2 && z & 2 == 2 { v } else { 0.0 },
            ];
            entries.push((p, (m, n, z)));
        }
    }
    entries.sort_by(|a, b| {
        a.0[0]
            .total_cmp(&b.0[0])
            .then(a.0[1].total_cmp(&b.0[1]))
            .then(a.1.cmp(&b.1))
    });
    entries.dedup_by(|a, b| a.0 == b.0);
    let (points, exponents): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
    Ok(PretangentSet {
        cloud: PointCloud::new(d, points)?,
        exponents,
        warnings,
    })
}

/// A convergent `p/q` (`q ≤ 10⁴`) of `log β / log α` matching to `1e-12`.
fn log_commensurable(alpha: f64, beta: f64) -> Option<(i64, i64)> {
    let x = beta.ln() / alpha.ln();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e9 {
            break;
        }
        let ai = a as i64;
        (h0, h1) = (h1, ai * h1 + h0);
        (k0, k1) = (k1, ai * k1 + k0);
        if k1 > 10_000 {
            break;
        }
        if (x - h1 as f64 / k1 as f64).abs() <= 1e-12 * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// `T(F) ∩ window`. The source cloud is sampled on `T⁻¹(window)` at
/// `resolution / ratio(T)`, so output pieces have size at most `resolution`.
pub fn tangent_zoom(
    ifs: &IfsSystem,
    t: &Similarity,
    window: &Window,
    resolution: &Scalar,
) -> Result<PointCloud> {
    let dim = ifs.dim();
    if t.dim() != dim {
        return Err(Error::DimensionMismatch(dim, t.dim()));
    }
    if t.backend() != ifs.backend() {
        return Err(Error::BackendMismatch(ifs.backend(), t.backend()));
    }
    for k in 0..dim {
        if !(window.lo[k] >= -10.0 && window.hi[k] <= 10.0 && window.lo[k] <= window.hi[k]) {
            return Err(Error::OutOfRange {
                name: "window",
                value: format!("{:?}..{:?}", window.lo, window.hi),
                range: "[-10, 10]^d",
            });
        }
    }
    if !resolution.is_positive() {
        return Err(Error::OutOfRange {
            name: "resolution",
            value: resolution.to_string(),
            range: "(0, inf)",
        });
    }
    let mut src_res = resolution.checked_div(t.ratio())?;
    if src_res >= Scalar::one(ifs.backend()) {
        src_res = ifs.max_ratio();
    }
    let inv = t.inverse().to_affine_f64();
    let corners: Vec<[f64; 2]> = (0..(1usize << dim))
        .map(|z| {
            let mut p = [0.0; 2];
            for (k, v) in p.iter_mut().enumerate().take(dim) {
                *v = if z >> k & 1 == 1 { window.hi[k] } else { window.lo[k] };
            }
            inv.apply(p)
        })
        .collect();
    let mut src = Window {
        lo: [f64::INFINITY, 0.0],
        hi: [f64::NEG_INFINITY, 0.0],
    };
    for p in &corners {
        for k in 0..dim {
            src.lo[k] = src.lo[k].min(p[k]);
            src.hi[k] = src.hi[k].max(p[k]);
        }
    }
    let cloud = attractor_points_in(ifs, &src_res, Some(&src))?;
    let fwd = t.to_affine_f64();
    let slack = 1e-9 * window.hi[0].abs().max(window.lo[0].abs()).max(1.0);
    Ok(cloud
        .map_points(|p| fwd.apply(p))
        .filter(|p| window.contains(p, dim, slack))
        .with_resolution(resolution.to_f64()))
}

/// `x ↦ s·x` in dimension `dim`.
pub fn scaling(dim: usize, s: Scalar) -> Result<Similarity> {
    let b = s.backend();
    let t = vec![Scalar::zero(b); dim];
    let o = if dim == 1 {
        crate::geometry::Orthogonal::line(false, b)
    } else {
        crate::geometry::Orthogonal::plane(Scalar::zero(b), false)?
    };
    Similarity::new(s, o, t)
}

/// Exactness helper for tests and the CLI: `5^{-j}` as a rational.
pub fn five_pow_neg(j: u64) -> BigRational {
    BigRational::new(BigInt::one(), pow5(j))
}
