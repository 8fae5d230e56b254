//! Words over an IFS, stopping sets, relative-map enumeration and the
//! rotation-group and fixed-point lemmas used by the tangent constructions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MapKey, Orthogonal, Similarity};
use crate::scalar::{Backend, Scalar};

/// Finite sequence of map indices, stored 0-based and shown 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    /// The empty word ω.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// Builds a word from 1-based map numbers.
    pub fn from_one_based(letters: &[usize]) -> Result<Self> {
        letters
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or(Error::Invalid("map numbers start at 1".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Word with the last letter removed; `None` for ω.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            return None;
        }
        Some(Word(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn child(&self, i: usize) -> Word {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ω");
        }
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `(1,2)`, `1,2`, `ω` or an empty string; map numbers are 1-based.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() || t == "ω" || t == "()" {
            return Ok(Word::empty());
        }
        let inner = t.trim_start_matches('(').trim_end_matches(')');
        let letters = inner
            .split(',')
            .map(|p| {
                p.trim().parse::<usize>().map_err(|_| Error::Parse {
                    text: s.to_string(),
                    reason: "expected comma-separated map numbers".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_one_based(&letters)
    }
}

/// Indexed family of contracting similarities sharing a dimension and backend.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    name: String,
    dim: usize,
    backend: Backend,
    maps: Vec<Similarity>,
    trivial: bool,
    warnings: Vec<String>,
    model_note: Option<String>,
}

impl IfsSystem {
    /// A single map is accepted and flagged trivial (the attractor is its fixed
    /// point). Maps not sending `[0,1]^d` into itself produce a warning.
    pub fn new(name: impl Into<String>, maps: Vec<Similarity>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::Invalid("an IFS needs at least one map".into()))?;
        let (dim, backend) = (first.dim(), first.backend());
        let one = Scalar::one(backend);
        let tol = backend.tolerance();
        let mut warnings = Vec::new();
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(dim, m.dim()));
            }
            if m.backend() != backend {
                return Err(Error::BackendMismatch(backend, m.backend()));
            }
            if *m.ratio() >= one {
                return Err(Error::OutOfRange {
                    name: "ratio",
                    value: m.ratio().to_string(),
                    range: "(0,1)",
                });
            }
            if !m.maps_cube_into_cube(&tol) {
                warnings.push(format!(
                    "map {} does not send [0,1]^{dim} into itself; results assume the attractor's hull",
                    i + 1
                ));
            }
        }
        Ok(IfsSystem {
            name: name.into(),
            dim,
            backend,
            trivial: maps.len() == 1,
            maps,
            warnings,
            model_note: None,
        })
    }

    /// Attaches a note on the parameter model (for example a series
    /// truncation) that is reported alongside verdicts.
    pub fn with_model_note(mut self, note: impl Into<String>) -> Self {
        self.model_note = Some(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn model_note(&self) -> Option<&str> {
        self.model_note.as_deref()
    }

    /// True when every map sends the unit cube into itself, so that images
    /// of the cube under words nest along prefixes.
    pub fn cube_invariant(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn ratios(&self) -> Vec<Scalar> {
        self.maps.iter().map(|m| m.ratio().clone()).collect()
    }

    pub fn min_ratio(&self) -> Scalar {
        self.ratios()
            .into_iter()
            .reduce(|a, b| a.min(b))
            .expect("nonempty")
    }

    pub fn max_ratio(&self) -> Scalar {
        self.ratios()
            .into_iter()
            .reduce(|a, b| a.max(b))
            .expect("nonempty")
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&i| i >= self.maps.len()) {
            Some(&i) => Err(Error::InvalidIndex {
                index: i + 1,
                maps: self.maps.len(),
            }),
            None => Ok(()),
        }
    }

    /// `S_{i1} ∘ … ∘ S_{ik}`; the identity for ω.
    pub fn word_map(&self, w: &Word) -> Result<Similarity> {
        self.check_word(w)?;
        let mut acc = Similarity::identity(self.dim, self.backend);
        for &i in w.letters() {
            acc = acc.compose(&self.maps[i])?;
        }
        Ok(acc)
    }

    pub fn word_ratio(&self, w: &Word) -> Result<Scalar> {
        self.check_word(w)?;
        let mut c = Scalar::one(self.backend);
        for &i in w.letters() {
            c = &c * self.maps[i].ratio();
        }
        Ok(c)
    }

    /// Fixed point of the first map, the default base point throughout.
    pub fn base_point(&self) -> Vec<Scalar> {
        self.maps[0].fixed_point().expect("contracting map")
    }

    pub(crate) fn check_scale(&self, name: &'static str, r: &Scalar) -> Result<()> {
        if r.backend() != self.backend {
            return Err(Error::BackendMismatch(self.backend, r.backend()));
        }
        if !r.is_positive() || *r >= Scalar::one(self.backend) {
            return Err(Error::OutOfRange {
                name,
                value: r.to_string(),
                range: "(0,1)",
            });
        }
        Ok(())
    }

    /// `c ≤ r` with a relative slack of the key grid on float backends, so
    /// that products like `(1/3)·(1/3)` land on the intended side of `1/9`.
    pub(crate) fn ratio_at_most(&self, c: &Scalar, r: &Scalar) -> bool {
        if self.backend.is_exact() {
            return c <= r;
        }
        let slack = &Scalar::one(self.backend) + &self.backend.tolerance();
        *c <= r * &slack
    }
}

impl fmt::Display for IfsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (d={}, backend={}, {} maps)",
            self.name,
            self.dim,
            self.backend,
            self.maps.len()
        )?;
        for (i, m) in self.maps.iter().enumerate() {
            writeln!(f, "  S{}: {}", i + 1, m)?;
        }
        Ok(())
    }
}

/// `I_r = {α : c_α ≤ r < c_ᾱ}` in lexicographic order.
pub fn stopping_set(ifs: &IfsSystem, r: &Scalar) -> Result<Vec<Word>> {
    ifs.check_scale("r", r)?;
    let mut out = Vec::new();
    let mut stack = vec![(Word::empty(), Scalar::one(ifs.backend()))];
    while let Some((w, c)) = stack.pop() {
        if !w.is_empty() && ifs.ratio_at_most(&c, r) {
            out.push(w);
            continue;
        }
        for i in (0..ifs.len()).rev() {
            stack.push((w.child(i), &c * ifs.maps()[i].ratio()));
        }
    }
    Ok(out)
}

/// Words of `I_r` whose image box `S_α([0,1]^d)` meets the open ball
/// `B_r(x)`. The box test over-approximates the intersection with the
/// attractor itself.
pub fn local_stopping_set(ifs: &IfsSystem, r: &Scalar, x: &[Scalar]) -> Result<Vec<Word>> {
    if x.len() != ifs.dim() {
        return Err(Error::DimensionMismatch(ifs.dim(), x.len()));
    }
    let words = stopping_set(ifs, r)?;
    let r2 = r * r;
    let mut out = Vec::new();
    for w in words {
        let (lo, hi) = ifs.word_map(&w)?.cube_image_bbox();
        if box_point_dist_sq(&lo, &hi, x) < r2 {
            out.push(w);
        }
    }
    Ok(out)
}

pub(crate) fn box_point_dist_sq(lo: &[Scalar], hi: &[Scalar], x: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero(x[0].backend());
    for k in 0..x.len() {
        let gap = if x[k] < lo[k] {
            &lo[k] - &x[k]
        } else if x[k] > hi[k] {
            &x[k] - &hi[k]
        } else {
            continue;
        };
        acc = &acc + &(&gap * &gap);
    }
    acc
}

/// One element `S_α⁻¹ ∘ S_β` of the relative-map set.
#[derive(Clone, Debug)]
pub struct RelativeMapRecord {
    pub alpha: Word,
    pub beta: Word,
    pub map: Similarity,
    pub id_distance: Scalar,
    pub level: usize,
}

#[derive(Clone, Debug)]
pub struct LevelStats {
    pub level: usize,
    /// States expanded at this level.
    pub frontier: usize,
    pub new_states: usize,
    pub pruned: usize,
    pub min_nonzero_distance: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct RelativeMapEnumeration {
    pub records: Vec<RelativeMapRecord>,
    /// Pairs `α ≠ β` with `S_α = S_β` (identity states), in discovery order.
    pub exact_overlaps: Vec<(Word, Word)>,
    pub levels: Vec<LevelStats>,
    /// No new states appeared at some level: the pruned closure is complete.
    pub stabilized: bool,
    /// The frontier was still nonempty at `max_level`.
    pub truncated: bool,
    pub prune_bound: Scalar,
}

impl RelativeMapEnumeration {
    pub fn min_nonzero_distance(&self) -> Option<&Scalar> {
        self.records
            .iter()
            .map(|r| &r.id_distance)
            .filter(|d| !d.is_zero())
            .reduce(|a, b| if b < a { b } else { a })
    }
}

/// Default pruning bound `2√d`.
pub fn default_prune_bound(dim: usize, b: Backend) -> Scalar {
    let two = Scalar::from_i64(2, b);
    &two * &Scalar::from_i64(dim as i64, b).sqrt().expect("positive")
}

struct State {
    map: Similarity,
    alpha: Word,
    beta: Word,
}

enum Child {
    Pruned,
    Kept(State, MapKey),
}

/// Breadth-first closure over `R = S_α⁻¹ ∘ S_β`.
///
/// A state of ratio 1 moves to `S_i⁻¹ ∘ R ∘ S_j`; a state of ratio below 1
/// extends `α` only and one above 1 extends `β` only, which keeps the two
/// pieces at comparable scales (with equal ratios every state has
/// `|α| = |β| = level`). States are pruned when the box of `R([0,1]^d)` lies
/// farther than `prune_bound` from the cube or the ratio leaves
/// `[c_min, 1/c_min]`. For cube-invariant systems the cube images of
/// descendants only move away, so every relative map with identity distance
/// at most `prune_bound` survives.
///
/// Children are generated in parallel and merged in (parent, i, j) order, so
/// the output does not depend on the thread count.
pub fn enumerate_relative_maps(
    ifs: &IfsSystem,
    max_level: usize,
    prune_bound: &Scalar,
) -> Result<RelativeMapEnumeration> {
    if max_level == 0 {
        return Err(Error::OutOfRange {
            name: "max_level",
            value: "0".into(),
            range: "[1, inf)",
        });
    }
    let b = ifs.backend();
    if prune_bound.backend() != b {
        return Err(Error::BackendMismatch(b, prune_bound.backend()));
    }
    let one = Scalar::one(b);
    let c_min = ifs.min_ratio();
    let ratio_hi = c_min.recip()?;
    let bound_sq = prune_bound * prune_bound;
    let inverses: Vec<Similarity> = ifs.maps().iter().map(Similarity::inverse).collect();
    let one_key = one.key();

    let identity = Similarity::identity(ifs.dim(), b);
    let identity_key = identity.key();
    let mut visited: HashSet<MapKey> = HashSet::new();
    visited.insert(identity_key.clone());
    let mut frontier = vec![State {
        map: identity,
        alpha: Word::empty(),
        beta: Word::empty(),
    }];

    let expand = |s: &State| -> Result<Vec<Child>> {
        let n = ifs.len();
        let rk = s.map.ratio().key();
        let mut out = Vec::new();
        let mut push = |map: Similarity, alpha: Word, beta: Word| {
            let r = map.ratio();
            if *r < c_min || *r > ratio_hi || map.cube_gap_sq() > bound_sq {
                out.push(Child::Pruned);
            } else {
                let key = map.key();
                out.push(Child::Kept(State { map, alpha, beta }, key));
            }
        };
        if rk == one_key {
            for i in 0..n {
                let left = inverses[i].compose(&s.map)?;
                for j in 0..n {
                    let m = left.compose(&ifs.maps()[j])?;
                    push(m, s.alpha.child(i), s.beta.child(j));
                }
            }
        } else if *s.map.ratio() < one {
            for i in 0..n {
                let m = inverses[i].compose(&s.map)?;
                push(m, s.alpha.child(i), s.beta.clone());
            }
        } else {
            for j in 0..n {
                let m = s.map.compose(&ifs.maps()[j])?;
                push(m, s.alpha.clone(), s.beta.child(j));
            }
        }
        Ok(out)
    };

    let mut records = Vec::new();
    let mut exact_overlaps = Vec::new();
    let mut levels = Vec::new();
    let mut stabilized = false;
    for level in 1..=max_level {
        let expanded: Vec<Result<Vec<Child>>> = frontier.par_iter().map(expand).collect();
        let mut next = Vec::new();
        let mut pruned = 0;
        let mut min_nz: Option<Scalar> = None;
        for children in expanded {
            for child in children? {
                let (state, key) = match child {
                    Child::Pruned => {
                        pruned += 1;
                        continue;
                    }
                    Child::Kept(s, k) => (s, k),
                };
                if key == identity_key {
                    if state.alpha != state.beta {
                        exact_overlaps.push((state.alpha, state.beta));
                    }
                    continue;
                }
                if !visited.insert(key) {
                    continue;
                }
                let id_distance = state.map.identity_distance();
                if !id_distance.is_zero() && min_nz.as_ref().is_none_or(|m| id_distance < *m) {
                    min_nz = Some(id_distance.clone());
                }
                records.push(RelativeMapRecord {
                    alpha: state.alpha.clone(),
                    beta: state.beta.clone(),
                    map: state.map.clone(),
                    id_distance,
                    level,
                });
                next.push(state);
            }
        }
        levels.push(LevelStats {
            level,
            frontier: frontier.len(),
            new_states: next.len(),
            pruned,
            min_nonzero_distance: min_nz,
        });
        frontier = next;
        if frontier.is_empty() {
            stabilized = true;
            break;
        }
    }
    Ok(RelativeMapEnumeration {
        records,
        exact_overlaps,
        levels,
        stabilized,
        truncated: !frontier.is_empty(),
        prune_bound: prune_bound.clone(),
    })
}

/// Indices of canonical representatives, in first-occurrence order.
///
/// On the exact backend maps are identified by exact equality of their
/// parameters; on float backends two maps are identified when every
/// parameter agrees within `tol`, each map joining the first earlier
/// representative it matches.
pub fn dedup_map_indices(maps: &[Similarity], tol: &Scalar) -> Result<Vec<usize>> {
    let Some(first) = maps.first() else {
        return Ok(Vec::new());
    };
    let b = first.backend();
    if let Some(m) = maps.iter().find(|m| m.backend() != b) {
        return Err(Error::BackendMismatch(b, m.backend()));
    }
    if b.is_exact() {
        let mut seen = HashSet::new();
        return Ok((0..maps.len())
            .filter(|&i| seen.insert(maps[i].key()))
            .collect());
    }
    if tol.backend() != b {
        return Err(Error::BackendMismatch(b, tol.backend()));
    }
    let mut reps: Vec<usize> = Vec::new();
    for (i, m) in maps.iter().enumerate() {
        let dup = reps.iter().any(|&k| {
            maps[k]
                .parameter_distance(m)
                .is_some_and(|d| d <= *tol)
        });
        if !dup {
            reps.push(i);
        }
    }
    Ok(reps)
}

pub fn dedup_maps(maps: &[Similarity], tol: &Scalar) -> Result<Vec<Similarity>> {
    Ok(dedup_map_indices(maps, tol)?
        .into_iter()
        .map(|i| maps[i].clone())
        .collect())
}

#[derive(Clone, Debug)]
pub enum GroupVerdict {
    /// Closure stabilized with this many elements.
    Finite { order: usize },
    /// Float closure exceeded the element cap: consistent with an infinite
    /// (dense) rotation subgroup.
    Dense { generated: usize },
    /// The group is finite but larger than the listing cap.
    Truncated { order: usize },
}

#[derive(Clone, Debug)]
pub struct GroupAnalysis {
    pub verdict: GroupVerdict,
    /// Listed elements (all of them when finite, a prefix otherwise).
    pub elements: Vec<Orthogonal>,
}

/// Closure of the orthogonal parts `{O_i}` under composition.
///
/// On the exact backend angles are rational degrees, so the group is always
/// finite: its rotation subgroup is cyclic of order `N = lcm` of the
/// denominators of the generating angles over 360, doubled when reflections
/// occur. Float backends close numerically with tolerance `eps` (degrees) and
/// report density once more than `max_elements` classes appear.
pub fn orthogonal_group_analysis(
    ifs: &IfsSystem,
    eps: f64,
    max_elements: usize,
) -> Result<GroupAnalysis> {
    let parts: Vec<Orthogonal> = ifs.maps().iter().map(|m| m.orthogonal().clone()).collect();
    orthogonal_group(&parts, eps, max_elements)
}

/// Group generated by `parts` (all of one dimension and backend). Exact
/// rational angles need not have a matrix here.
pub fn orthogonal_group(
    parts: &[Orthogonal],
    eps: f64,
    max_elements: usize,
) -> Result<GroupAnalysis> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Invalid("no generators".into()))?;
    let (dim, b) = (first.dim(), first.backend());
    if let Some(o) = parts.iter().find(|o| o.dim() != dim || o.backend() != b) {
        return Err(if o.dim() != dim {
            Error::DimensionMismatch(dim, o.dim())
        } else {
            Error::BackendMismatch(b, o.backend())
        });
    }
    let parts: Vec<&Orthogonal> = parts.iter().collect();
    if dim == 1 {
        let has_reflection = parts.iter().any(|o| o.reflect());
        let mut elements = vec![Orthogonal::line(false, b)];
        if has_reflection {
            elements.push(Orthogonal::line(true, b));
        }
        return Ok(GroupAnalysis {
            verdict: GroupVerdict::Finite {
                order: elements.len(),
            },
            elements,
        });
    }
    if b.is_exact() {
        return exact_plane_group(&parts, max_elements);
    }
    float_plane_group(&parts, eps, max_elements, b)
}

fn exact_plane_group(parts: &[&Orthogonal], max_elements: usize) -> Result<GroupAnalysis> {
    let full = BigRational::from_integer(BigInt::from(360));
    let frac = |o: &Orthogonal| -> BigRational { o.degrees().as_exact().expect("exact") / &full };
    let reflections: Vec<&&Orthogonal> = parts.iter().filter(|o| o.reflect()).collect();
    let mut gens: Vec<BigRational> = parts
        .iter()
        .filter(|o| !o.reflect())
        .map(|o| frac(o))
        .collect();
    if let Some(r0) = reflections.first() {
        for r in &reflections[1..] {
            gens.push(frac(r) - frac(r0));
        }
    }
    let mut n = BigInt::one();
    for g in &gens {
        let g = g - g.floor();
        if !g.is_zero() {
            n = n.lcm(g.denom());
        }
    }
    let rot_order = n
        .to_usize()
        .ok_or_else(|| Error::Invalid("rotation order exceeds usize".into()))?;
    let order = rot_order * if reflections.is_empty() { 1 } else { 2 };
    let step = BigRational::new(BigInt::from(360), n);
    let b = Backend::Exact;
    let mut elements = Vec::new();
    'outer: for refl in [false, true] {
        if refl && reflections.is_empty() {
            break;
        }
        let base = if refl {
            reflections[0].degrees().as_exact().expect("exact").clone()
        } else {
            BigRational::zero()
        };
        for k in 0..rot_order {
            if elements.len() >= max_elements {
                break 'outer;
            }
            let a = &base + &step * BigRational::from_integer(BigInt::from(k));
            elements.push(Orthogonal::plane(Scalar::from_rational(&a, b), refl)?);
        }
    }
    let verdict = if order > max_elements {
        GroupVerdict::Truncated { order }
    } else {
        GroupVerdict::Finite { order }
    };
    Ok(GroupAnalysis { verdict, elements })
}

fn float_plane_group(
    parts: &[&Orthogonal],
    eps: f64,
    max_elements: usize,
    b: Backend,
) -> Result<GroupAnalysis> {
    // (reflect, degrees) with composition as in `Orthogonal::compose`
    let gens: Vec<(bool, f64)> = parts
        .iter()
        .map(|o| (o.reflect(), o.degrees().to_f64()))
        .collect();
    let eps = eps.max(1e-15);
    let bucket = |a: f64| (a / eps).floor() as i64;
    let wrap = |a: f64| {
        let r = a.rem_euclid(360.0);
        if 360.0 - r <= eps {
            0.0
        } else {
            r
        }
    };
    let mut table: HashMap<(bool, i64), Vec<usize>> = HashMap::new();
    let mut elems: Vec<(bool, f64)> = Vec::new();
    let find = |table: &HashMap<(bool, i64), Vec<usize>>, elems: &[(bool, f64)], e: (bool, f64)| {
        let k = bucket(e.1);
        let top = bucket(360.0);
        let mut probes = vec![k - 1, k, k + 1];
        if k <= 1 {
            probes.extend([top - 1, top]);
        }
        if k >= top - 1 {
            probes.extend([0, 1]);
        }
        probes.into_iter().any(|kk| {
            table.get(&(e.0, kk)).is_some_and(|ix| {
                ix.iter().any(|&i| {
                    let d = (elems[i].1 - e.1).abs();
                    d.min(360.0 - d) <= eps
                })
            })
        })
    };
    let mut queue = vec![(false, 0.0)];
    let mut head = 0;
    let mut dense = false;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        if find(&table, &elems, e) {
            continue;
        }
        if elems.len() >= max_elements {
            dense = true;
            break;
        }
        table.entry((e.0, bucket(e.1))).or_default().push(elems.len());
        elems.push(e);
        for g in &gens {
            let a = if e.0 { e.1 - g.1 } else { e.1 + g.1 };
            queue.push((e.0 ^ g.0, wrap(a)));
        }
    }
    let elements = elems
        .iter()
        .map(|&(r, a)| Orthogonal::plane(Scalar::from_f64(a, b)?, r))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if dense {
        GroupVerdict::Dense {
            generated: elements.len(),
        }
    } else {
        GroupVerdict::Finite {
            order: elements.len(),
        }
    };
    Ok(GroupAnalysis { verdict, elements })
}

#[derive(Clone, Debug)]
pub enum SpanningReport {
    /// `d + 1` words whose fixed points affinely span `ℝ^d`.
    Spanning(Vec<(Word, Vec<Scalar>)>),
    /// All fixed points of words in `I_r` lie in an affine subspace of this
    /// dimension.
    HyperplaneContained { rank: usize, words_examined: usize },
}

/// Greedy search over `I_r` for fixed points in general position: the first
/// word's fixed point, then the farthest point from it, then (in the plane)
/// the farthest point from the line through the first two.
pub fn spanning_fixed_points(ifs: &IfsSystem, r: &Scalar) -> Result<SpanningReport> {
    if ifs.is_trivial() {
        return Err(Error::Invalid(
            "attractor is a single point; no spanning set exists".into(),
        ));
    }
    let words = stopping_set(ifs, r)?;
    let mut pts = Vec::with_capacity(words.len());
    for w in &words {
        pts.push(ifs.word_map(w)?.fixed_point()?);
    }
    let f: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| [p[0].to_f64(), p.get(1).map_or(0.0, Scalar::to_f64)])
        .collect();
    const TOL: f64 = 1e-9;
    let argmax = |score: &dyn Fn(&[f64; 2]) -> f64| -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, p) in f.iter().enumerate() {
            let s = score(p);
            if s > best.1 {
                best = (i, s);
            }
        }
        best
    };
    let p0 = f[0];
    let (i1, d1) = argmax(&|p| ((p[0] - p0[0]).powi(2) + (p[1] - p0[1]).powi(2)).sqrt());
    if d1 <= TOL {
        return Ok(SpanningReport::HyperplaneContained {
            rank: 0,
            words_examined: words.len(),
        });
    }
    let mut chosen = vec![0, i1];
    if ifs.dim() == 2 {
        let u = [(f[i1][0] - p0[0]) / d1, (f[i1][1] - p0[1]) / d1];
        let (i2, d2) = argmax(&|p| ((p[0] - p0[0]) * u[1] - (p[1] - p0[1]) * u[0]).abs());
        if d2 <= TOL {
            return Ok(SpanningReport::HyperplaneContained {
                rank: 1,
                words_examined: words.len(),
            });
        }
        chosen.push(i2);
    }
    Ok(SpanningReport::Spanning(
        chosen
            .into_iter()
            .map(|i| (words[i].clone(), pts[i].clone()))
            .collect(),
    ))
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

    fn w(v: &[usize]) -> Word {
        Word::from_one_based(v).unwrap()
    }

    #[test]
    fn word_display_and_parse() {
        assert_eq!(w(&[1, 2]).to_string(), "(1,2)");
        assert_eq!(Word::empty().to_string(), "ω");
        assert_eq!("(3,1)".parse::<Word>().unwrap(), w(&[3, 1]));
        assert_eq!("ω".parse::<Word>().unwrap(), Word::empty());
        assert!("(0)".parse::<Word>().is_err());
        assert_eq!(w(&[1, 2]).parent(), Some(w(&[1])));
        assert_eq!(w(&[1]).parent(), Some(Word::empty()));
    }

    #[test]
    fn word_maps() {
        let c = cantor();
        let m = c.word_map(&w(&[1, 2])).unwrap();
        assert_eq!(m.ratio(), &q(1, 9));
        assert_eq!(m.translation()[0], q(2, 9));
        assert!(c.word_map(&Word::empty()).unwrap().is_identity());
        assert!(matches!(
            c.word_map(&w(&[3])),
            Err(Error::InvalidIndex { index: 3, maps: 2 })
        ));
        let bg = line_ifs(&[(1, 5, 0, 1), (1, 5, 1, 5), (1, 5, 4, 5)]);
        let m = bg.word_map(&w(&[3, 3])).unwrap();
        assert_eq!(m.translation()[0], q(24, 25));
    }

    #[test]
    fn stopping_sets() {
        let c = cantor();
        assert_eq!(stopping_set(&c, &q(1, 3)).unwrap(), vec![w(&[1]), w(&[2])]);
        assert_eq!(stopping_set(&c, &q(1, 5)).unwrap().len(), 4);
        let u = line_ifs(&[(1, 2, 0, 1), (1, 4, 3, 4)]);
        assert_eq!(
            stopping_set(&u, &q(1, 4)).unwrap(),
            vec![w(&[1, 1]), w(&[1, 2]), w(&[2])]
        );
        assert!(stopping_set(&c, &q(1, 1)).is_err());
        assert!(stopping_set(&c, &Scalar::Double(0.5)).is_err());
    }

    #[test]
    fn local_stopping_sets() {
        let c = cantor();
        assert_eq!(local_stopping_set(&c, &q(1, 3), &[q(0, 1)]).unwrap(), vec![w(&[1])]);
        assert_eq!(local_stopping_set(&c, &q(1, 3), &[q(1, 2)]).unwrap().len(), 2);
        assert_eq!(local_stopping_set(&c, &q(1, 9), &[q(0, 1)]).unwrap(), vec![w(&[1, 1])]);
    }

    #[test]
    fn cantor_relative_maps_stabilize() {
        let c = cantor();
        let e = enumerate_relative_maps(&c, 6, &default_prune_bound(1, Exact)).unwrap();
        assert!(e.stabilized && !e.truncated);
        let ts: Vec<Scalar> = e.records.iter().map(|r| r.map.translation()[0].clone()).collect();
        assert_eq!(ts, vec![q(2, 1), q(-2, 1)]);
        assert_eq!(e.min_nonzero_distance(), Some(&q(2, 1)));
        assert!(e.exact_overlaps.is_empty());
    }

    #[test]
    fn overlap_demo_finds_identity_states() {
        let s = line_ifs(&[(1, 2, 0, 1), (1, 2, 1, 2), (1, 4, 0, 1)]);
        let e = enumerate_relative_maps(&s, 4, &default_prune_bound(1, Exact)).unwrap();
        assert!(e.exact_overlaps.iter().any(|(a, b)| a == &w(&[3]) && b == &w(&[1, 1])
            || a == &w(&[1, 1]) && b == &w(&[3])));
        for r in &e.records {
            assert!(!r.map.is_identity());
            let again = c_inv(&s, &r.alpha).compose(&s.word_map(&r.beta).unwrap()).unwrap();
            assert_eq!(again.key(), r.map.key());
        }
    }

    fn c_inv(s: &IfsSystem, a: &Word) -> Similarity {
        s.word_map(a).unwrap().inverse()
    }

    #[test]
    fn dedup_examples() {
        let s = line_ifs(&[(1, 2, 0, 1), (1, 2, 1, 2), (1, 4, 0, 1)]);
        let maps = vec![
            s.word_map(&w(&[3])).unwrap(),
            s.word_map(&w(&[1, 1])).unwrap(),
        ];
        assert_eq!(dedup_maps(&maps, &q(0, 1)).unwrap().len(), 1);
        let c = cantor();
        let lvl2: Vec<Similarity> = stopping_set(&c, &q(1, 9))
            .unwrap()
            .iter()
            .map(|x| c.word_map(x).unwrap())
            .collect();
        assert_eq!(dedup_maps(&lvl2, &q(0, 1)).unwrap().len(), 4);
        let b = Backend::Double;
        let a = Similarity::line(Scalar::Double(0.5), false, Scalar::Double(0.25)).unwrap();
        let a2 =
            Similarity::line(Scalar::Double(0.5), false, Scalar::Double(0.25 + 1e-15)).unwrap();
        assert_eq!(dedup_maps(&[a, a2], &Scalar::Double(1e-12)).unwrap().len(), 1);
        let _ = b;
    }

    #[test]
    fn group_orders() {
        let c = cantor();
        let g = orthogonal_group_analysis(&c, 1e-9, 100).unwrap();
        assert!(matches!(g.verdict, GroupVerdict::Finite { order: 1 }));
        let neg = IfsSystem::new(
            "n",
            vec![Similarity::line(q(1, 2), true, q(1, 1)).unwrap()],
        )
        .unwrap();
        let g = orthogonal_group_analysis(&neg, 1e-9, 100).unwrap();
        assert!(matches!(g.verdict, GroupVerdict::Finite { order: 2 }));
        let r30 = Similarity::plane(
            Scalar::Double(0.5),
            Scalar::Double(30.0),
            false,
            [Scalar::Double(0.0), Scalar::Double(0.0)],
        )
        .unwrap();
        let s = IfsSystem::new("r", vec![r30]).unwrap();
        let g = orthogonal_group_analysis(&s, 1e-9, 100).unwrap();
        assert!(matches!(g.verdict, GroupVerdict::Finite { order: 12 }));
        let exact30 = Orthogonal::plane(q(30, 1), false).unwrap();
        let g = orthogonal_group(std::slice::from_ref(&exact30), 0.0, 100).unwrap();
        assert!(matches!(g.verdict, GroupVerdict::Finite { order: 12 }));
        assert_eq!(g.elements.len(), 12);
        let refl = Orthogonal::plane(q(45, 1), true).unwrap();
        let g = orthogonal_group(&[exact30, refl], 0.0, 10).unwrap();
        assert!(matches!(g.verdict, GroupVerdict::Truncated { order: 24 }));
    }

    #[test]
    fn spanning_on_line() {
        let c = cantor();
        match spanning_fixed_points(&c, &q(1, 3)).unwrap() {
            SpanningReport::Spanning(v) => {
                assert_eq!(v[0].1, vec![q(0, 1)]);
                assert_eq!(v[1].1, vec![q(1, 1)]);
            }
            other => panic!("{other:?}"),
        }
    }
}
