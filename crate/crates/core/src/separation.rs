//! Exact-overlap detection, weak-separation scans with three-valued
//! verdicts, and the point-multiplicity diagnostic.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::MapKey;
use crate::scalar::{KeyAtom, Scalar};
use crate::symbolic::{enumerate_relative_maps, stopping_set, IfsSystem, RelativeMapRecord, Word};

pub const DEFAULT_EPSILON: f64 = 1e-6;
const MAX_OVERLAP_NODES: usize = 2_000_000;

/// Two distinct words with the same composed map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapWitness {
    /// First occurrence in (level, lexicographic) order.
    pub alpha: Word,
    pub beta: Word,
}

/// Level-by-level enumeration of `S_α` with a table keyed on exact
/// parameters. A word whose map was already seen is reported against the
/// first word with that map and not extended further.
pub fn exact_overlap_scan(ifs: &IfsSystem, max_level: usize) -> Result<Vec<OverlapWitness>> {
    if !ifs.backend().is_exact() {
        return Err(Error::RequiresExact(
            "exact_overlap_scan; use wsp_scan on float backends",
        ));
    }
    let mut table: HashMap<MapKey, Word> = HashMap::new();
    let mut out = Vec::new();
    let mut frontier = vec![(Word::empty(), ifs.word_map(&Word::empty())?)];
    let mut nodes = 0usize;
    for _ in 0..max_level {
        let mut next = Vec::new();
        for (w, m) in &frontier {
            for (i, s) in ifs.maps().iter().enumerate() {
                nodes += 1;
                if nodes > MAX_OVERLAP_NODES {
                    return Err(Error::Infeasible(format!(
                        "more than {MAX_OVERLAP_NODES} words; lower the level"
                    )));
                }
                let child = w.child(i);
                let cm = m.compose(s)?;
                match table.get(&cm.key()) {
                    Some(first) => out.push(OverlapWitness {
                        alpha: first.clone(),
                        beta: child,
                    }),
                    None => {
                        table.insert(cm.key(), child.clone());
                        next.push((child, cm));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WspStatus {
    ViolationWitnessed,
    WspEvidence,
    Unknown,
}

impl fmt::Display for WspStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WspStatus::ViolationWitnessed => "VIOLATION_WITNESSED",
            WspStatus::WspEvidence => "WSP_EVIDENCE",
            WspStatus::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug)]
pub struct WspVerdict {
    pub status: WspStatus,
    /// Records with `0 < id_distance < ε`, closest first.
    pub witnesses: Vec<RelativeMapRecord>,
    pub min_nonzero_distance: Option<Scalar>,
    pub search_depth: usize,
    pub epsilon: Scalar,
    pub truncation_note: Option<String>,
    /// `S_α = S_β` collisions; these are not violations.
    pub exact_overlaps: Vec<(Word, Word)>,
    pub states: usize,
    pub stabilized_at: Option<usize>,
}

/// Scans the pruned relative-map closure to `max_level`.
///
/// A record with `0 < id_distance < ε` witnesses a violation. Otherwise a
/// closure that stops producing new states is evidence for the weak
/// separation property, and a closure still growing at `max_level` is
/// inconclusive.
pub fn wsp_scan(
    ifs: &IfsSystem,
    max_level: usize,
    epsilon: &Scalar,
    prune_bound: &Scalar,
) -> Result<WspVerdict> {
    if !epsilon.is_positive() {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon.to_string(),
            range: "(0, inf)",
        });
    }
    if epsilon.backend() != ifs.backend() {
        return Err(Error::BackendMismatch(ifs.backend(), epsilon.backend()));
    }
    let e = enumerate_relative_maps(ifs, max_level, prune_bound)?;
    let mut witnesses: Vec<RelativeMapRecord> = e
        .records
        .iter()
        .filter(|r| !r.id_distance.is_zero() && r.id_distance < *epsilon)
        .cloned()
        .collect();
    witnesses.sort_by(|a, b| a.id_distance.partial_cmp(&b.id_distance).expect("same backend"));
    let status = if !witnesses.is_empty() {
        WspStatus::ViolationWitnessed
    } else if e.stabilized {
        WspStatus::WspEvidence
    } else {
        WspStatus::Unknown
    };
    let mut notes = Vec::new();
    if e.truncated {
        notes.push(format!(
            "relative-map frontier still growing at level {max_level}"
        ));
    }
    if let Some(n) = ifs.model_note() {
        notes.push(n.to_string());
    }
    Ok(WspVerdict {
        status,
        witnesses,
        min_nonzero_distance: e.min_nonzero_distance().cloned(),
        search_depth: max_level,
        epsilon: epsilon.clone(),
        truncation_note: if notes.is_empty() {
            None
        } else {
            Some(notes.join("; "))
        },
        exact_overlaps: e.exact_overlaps,
        states: e.records.len(),
        stabilized_at: if e.stabilized {
            e.levels.last().map(|l| l.level)
        } else {
            None
        },
    })
}

#[derive(Clone, Debug)]
pub struct Multiplicity {
    pub max_multiplicity: usize,
    pub worst_ball_center: Vec<Scalar>,
    /// Distinct points `S_α(z)` after exact deduplication.
    pub distinct_points: usize,
    pub words: usize,
}

/// Largest number of distinct points `S_α(z)`, `α ∈ I_r`, in a closed
/// `r`-ball centered at one of them.
pub fn multiplicity_scan(ifs: &IfsSystem, r: &Scalar, z: &[Scalar]) -> Result<Multiplicity> {
    if z.len() != ifs.dim() {
        return Err(Error::DimensionMismatch(ifs.dim(), z.len()));
    }
    let words = stopping_set(ifs, r)?;
    let mut seen: HashMap<Vec<KeyAtom>, usize> = HashMap::new();
    let mut pts: Vec<Vec<Scalar>> = Vec::new();
    for w in &words {
        let p = ifs.word_map(w)?.apply(z);
        let key: Vec<KeyAtom> = p.iter().map(Scalar::key).collect();
        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
            e.insert(pts.len());
            pts.push(p);
        }
    }
    let f: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| [p[0].to_f64(), p.get(1).map_or(0.0, Scalar::to_f64)])
        .collect();
    let rf = r.to_f64();
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a][0].total_cmp(&f[b][0]).then(a.cmp(&b)));
    let mut best = (0usize, 0usize);
    let slack = rf * 1e-12;
    for (pos, &i) in order.iter().enumerate() {
        let p = f[i];
        let lo = order[..pos].partition_point(|&k| f[k][0] < p[0] - rf - slack);
        let mut count = 0;
        for &k in &order[lo..] {
            let q = f[k];
            if q[0] > p[0] + rf + slack {
                break;
            }
            let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if d2 <= rf * rf + slack {
                count += 1;
            }
        }
        if count > best.0 || (count == best.0 && i < best.1) {
            best = (count, i);
        }
    }
    Ok(Multiplicity {
        max_multiplicity: best.0,
        worst_ball_center: pts[best.1].clone(),
        distinct_points: pts.len(),
        words: words.len(),
    })
}
