//! Reference computations shared by the property suites and the acceptance
//! harness. Each recomputes a library result by a slower, more direct route.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use selfsim::geometry::MapKey;
use selfsim::symbolic::{enumerate_relative_maps, stopping_set};
use selfsim::{Backend, IfsSystem, Scalar, Similarity, Word};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d, Backend::Exact)
}

/// `sup ‖S(x) - x‖` over a grid of `10^4` points of `[0,1]^d` (corners
/// included).
pub fn grid_identity_distance(s: &Similarity) -> f64 {
    let a = s.to_affine_f64();
    let pts: Vec<[f64; 2]> = if s.dim() == 1 {
        (0..=10_000).map(|i| [i as f64 / 10_000.0, 0.0]).collect()
    } else {
        let mut v = Vec::with_capacity(10_000);
        for i in 0..100 {
            for j in 0..100 {
                v.push([i as f64 / 99.0, j as f64 / 99.0]);
            }
        }
        v
    };
    pts.iter()
        .map(|p| {
            let y = a.apply(*p);
            ((y[0] - p[0]).powi(2) + (y[1] - p[1]).powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Double-backend similarity with ratio in `(0, 2]`, any orientation and
/// translation entries in `[-2, 2]`.
pub fn random_map<R: Rng>(rng: &mut R, dim: usize) -> Similarity {
    let b = Backend::Double;
    let s = |x: f64| Scalar::from_f64(x, b).expect("finite");
    let ratio = s(rng.gen_range(1e-3..=2.0));
    let reflect = rng.gen_bool(0.5);
    if dim == 1 {
        Similarity::line(ratio, reflect, s(rng.gen_range(-2.0..=2.0))).expect("valid map")
    } else {
        let deg = s(rng.gen_range(0.0..360.0));
        let t = [s(rng.gen_range(-2.0..=2.0)), s(rng.gen_range(-2.0..=2.0))];
        Similarity::plane(ratio, deg, reflect, t).expect("valid map")
    }
}

/// Exact system on the line with `n` maps, ratios `p/q` in `[1/5, 2/3]` and
/// translations keeping `[0,1]` invariant.
pub fn random_line_system<R: Rng>(rng: &mut R, n: usize) -> IfsSystem {
    let maps = (0..n)
        .map(|_| {
            let den = rng.gen_range(3..=12i64);
            let num = rng.gen_range(1..den);
            let c = q(num, den);
            let c = if c < q(1, 5) {
                q(1, 5)
            } else if c > q(2, 3) {
                q(2, 3)
            } else {
                c
            };
            let reflect = rng.gen_bool(0.3);
            // translation in [0, 1-c] (or [c, 1] when reflecting), on a 1/12 grid
            let room = BigRational::one() - &c;
            let t = &room * q(rng.gen_range(0..=12), 12);
            let t = if reflect { t + &c } else { t };
            Similarity::line(
                Scalar::from_rational(&c, Backend::Exact),
                reflect,
                Scalar::from_rational(&t, Backend::Exact),
            )
            .expect("valid map")
        })
        .collect();
    IfsSystem::new("random-line", maps).expect("valid system")
}

fn exact_ratio(ifs: &IfsSystem, i: usize) -> BigRational {
    ifs.maps()[i].ratio().to_rational().expect("exact")
}

/// All words of length at most `⌈log r / log max c⌉` filtered by
/// `c_α ≤ r < c_parent`, with ratios multiplied as plain rationals.
pub fn brute_stopping_set(ifs: &IfsSystem, r: &BigRational) -> Vec<Word> {
    let cmax = (0..ifs.len())
        .map(|i| exact_ratio(ifs, i))
        .max()
        .expect("maps");
    let mut depth = 0usize;
    let mut p = BigRational::one();
    while p > *r {
        p *= &cmax;
        depth += 1;
    }
    let mut out = Vec::new();
    let mut level: Vec<(Vec<usize>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, c) in &level {
            for i in 0..ifs.len() {
                let mut w2 = w.clone();
                w2.push(i);
                let c2 = c * exact_ratio(ifs, i);
                if c2 <= *r && *c > *r {
                    out.push(Word::new(w2.clone()));
                }
                next.push((w2, c2));
            }
        }
        level = next;
    }
    out.sort();
    out
}

/// The library's stopping set, sorted.
pub fn library_stopping_set(ifs: &IfsSystem, r: &BigRational) -> Vec<Word> {
    let mut v = stopping_set(ifs, &Scalar::from_rational(r, Backend::Exact)).expect("stopping set");
    v.sort();
    v
}

/// Cube-invariant maps on the line with ratio 1/2 or 1/3, both
/// orientations, touching either end of `[0,1]`.
pub fn line_pool() -> Vec<Similarity> {
    let mut pool = Vec::new();
    for c in [q(1, 2), q(1, 3)] {
        for reflect in [false, true] {
            let ts = if reflect {
                [c.clone(), BigRational::one()]
            } else {
                [BigRational::zero(), BigRational::one() - &c]
            };
            for t in ts {
                pool.push(
                    Similarity::line(
                        Scalar::from_rational(&c, Backend::Exact),
                        reflect,
                        Scalar::from_rational(&t, Backend::Exact),
                    )
                    .expect("valid map"),
                );
            }
        }
    }
    pool
}

/// Every system of two or three distinct maps from [`line_pool`].
pub fn small_systems() -> Vec<IfsSystem> {
    let pool = line_pool();
    let n = pool.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(IfsSystem::new(format!("pool-{a}{b}"), vec![pool[a].clone(), pool[b].clone()]).unwrap());
            for c in b + 1..n {
                out.push(
                    IfsSystem::new(
                        format!("pool-{a}{b}{c}"),
                        vec![pool[a].clone(), pool[b].clone(), pool[c].clone()],
                    )
                    .unwrap(),
                );
            }
        }
    }
    out
}

/// Relative maps by level without pruning or deduplication. With equal
/// ratios this is every pair `|α| = |β| = level`; otherwise the same
/// one-sided extension the search uses (extend `α` while the ratio is below
/// 1, `β` while above).
pub fn exhaustive_relative_maps(ifs: &IfsSystem, max_level: usize) -> Vec<Vec<Similarity>> {
    let n = ifs.len();
    let one = Scalar::one(ifs.backend());
    let inv: Vec<Similarity> = ifs.maps().iter().map(Similarity::inverse).collect();
    let equal = ifs.maps().iter().all(|m| m.ratio() == ifs.maps()[0].ratio());
    let mut out = Vec::new();
    if equal {
        let mut words: Vec<Word> = vec![Word::empty()];
        for _ in 0..max_level {
            words = words
                .iter()
                .flat_map(|w| (0..n).map(move |i| w.child(i)))
                .collect();
            let maps: Vec<Similarity> = words.iter().map(|w| ifs.word_map(w).unwrap()).collect();
            let mut lvl = Vec::new();
            for a in &maps {
                let ainv = a.inverse();
                for b in &maps {
                    lvl.push(ainv.compose(b).unwrap());
                }
            }
            out.push(lvl);
        }
        return out;
    }
    let mut states = vec![Similarity::identity(ifs.dim(), ifs.backend())];
    for _ in 0..max_level {
        let mut next = Vec::new();
        for r in &states {
            if *r.ratio() == one {
                for a in &inv {
                    let left = a.compose(r).unwrap();
                    for b in ifs.maps() {
                        next.push(left.compose(b).unwrap());
                    }
                }
            } else if *r.ratio() < one {
                for a in &inv {
                    next.push(a.compose(r).unwrap());
                }
            } else {
                for b in ifs.maps() {
                    next.push(r.compose(b).unwrap());
                }
            }
        }
        out.push(next.clone());
        states = next;
    }
    out
}

/// Checks the pruned search against [`exhaustive_relative_maps`]: every
/// record occurs exhaustively at its level and is recomputable from its
/// words, and every non-identity exhaustive map with identity distance at
/// most `bound` is recorded.
pub fn check_pruned_search(ifs: &IfsSystem, max_level: usize, bound: &Scalar) -> Result<(), String> {
    let en = enumerate_relative_maps(ifs, max_level, bound).map_err(|e| e.to_string())?;
    let exh = exhaustive_relative_maps(ifs, max_level);
    let by_level: Vec<HashSet<MapKey>> = exh
        .iter()
        .map(|l| l.iter().map(Similarity::key).collect())
        .collect();
    let mut found: HashSet<MapKey> = HashSet::new();
    for r in &en.records {
        if r.level == 0 || r.level > max_level {
            return Err(format!("{}: record level {} out of range", ifs.name(), r.level));
        }
        let k = r.map.key();
        if !by_level[r.level - 1].contains(&k) {
            return Err(format!(
                "{}: record ({}, {}) not found exhaustively at level {}",
                ifs.name(),
                r.alpha,
                r.beta,
                r.level
            ));
        }
        let re = ifs
            .word_map(&r.alpha)
            .unwrap()
            .inverse()
            .compose(&ifs.word_map(&r.beta).unwrap())
            .unwrap();
        if re.key() != k {
            return Err(format!("{}: record ({}, {}) does not recompose", ifs.name(), r.alpha, r.beta));
        }
        found.insert(k);
    }
    for (l, lvl) in exh.iter().enumerate() {
        for m in lvl {
            if m.is_identity() || m.identity_distance() > *bound {
                continue;
            }
            if !found.contains(&m.key()) {
                return Err(format!(
                    "{}: exhaustive map at level {} with distance {} missing",
                    ifs.name(),
                    l + 1,
                    m.identity_distance()
                ));
            }
        }
    }
    Ok(())
}

/// Root of `Σ c_i^s = 1` by plain bisection on `[0, 64]`.
pub fn moran_bisect(ratios: &[f64]) -> f64 {
    let f = |s: f64| ratios.iter().map(|c| c.powf(s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 64.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ratios of the distinct maps `S_α`, `α ∈ I_r`, for a system on the line
/// with exact rational data, composing `(c, sign, t)` triples directly.
pub fn distinct_line_ratios(ifs: &IfsSystem, r: &BigRational) -> Vec<f64> {
    // (ratio, sign, translation) of x -> sign*c*x + t
    let data: Vec<(BigRational, i32, BigRational)> = ifs
        .maps()
        .iter()
        .map(|m| {
            (
                m.ratio().to_rational().unwrap(),
                m.orthogonal().det(),
                m.translation()[0].to_rational().unwrap(),
            )
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut stack = vec![(BigRational::one(), 1i32, BigRational::zero())];
    while let Some((c, s, t)) = stack.pop() {
        if c <= *r {
            seen.insert((c, s, t));
            continue;
        }
        for (ci, si, ti) in &data {
            // (c,s,t)∘(ci,si,ti): x -> s c (si ci x + ti) + t
            let sc = if s > 0 { c.clone() } else { -c.clone() };
            stack.push((&c * ci, s * si, &sc * ti + &t));
        }
    }
    seen.into_iter().map(|(c, _, _)| {
        use num_traits::ToPrimitive;
        c.to_f64().unwrap()
    }).collect()
}
