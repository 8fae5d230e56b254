//! Bundled example systems. Every parameter is written as an exact rational
//! so the declared backend decides all rounding.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::io::spec::{IfsSpecDocument, MapSpec, SCHEMA_VERSION};
use crate::scalar::{Backend, Scalar};
use crate::tangents::{bandt_graf_t, MAX_TRUNCATION};

pub const DEFAULT_TRUNCATION: u32 = 8;

/// Name, summary and the accepted `--param` keys with defaults.
#[derive(Clone, Debug)]
pub struct ExampleInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, &'static str)],
}

const EXAMPLES: &[ExampleInfo] = &[
    ExampleInfo {
        name: "cantor-1d",
        summary: "middle-thirds Cantor set {x/3, x/3+2/3}",
        params: &[],
    },
    ExampleInfo {
        name: "bandt-graf-line",
        summary: "{x/5, x/5+t/5, x/5+4/5} with t = 4 sum_{k<K} 5^(-2^k)",
        params: &[("K", "8")],
    },
    ExampleInfo {
        name: "plane-intermediate",
        summary: "four maps of ratio 1/5 in the plane; first coordinate is bandt-graf-line",
        params: &[("K", "8"), ("t", "truncated Bandt-Graf value")],
    },
    ExampleInfo {
        name: "full-assouad",
        summary: "S_a(x)=ax, S_b(x)=bx, S_g^z(x)=gx+(1-g)z over nonzero corners z",
        params: &[("alpha", "1/4"), ("beta", "1/3"), ("gamma", "1/10"), ("d", "1")],
    },
    ExampleInfo {
        name: "exact-overlap-demo",
        summary: "{x/2, x/2+1/2, x/4}; S_(3) = S_(1,1)",
        params: &[],
    },
    ExampleInfo {
        name: "cantor-on-line-2d",
        summary: "Cantor set on the x-axis of the plane (contained in a line)",
        params: &[],
    },
    ExampleInfo {
        name: "overlap-ninths",
        summary: "{x/3, x/3+2/3, x/9}; S_(3) = S_(1,1)",
        params: &[],
    },
    ExampleInfo {
        name: "unit-square",
        summary: "four maps x/2 + corner/2; attractor is [0,1]^2",
        params: &[],
    },
    ExampleInfo {
        name: "sierpinski-rotated",
        summary: "three ratio-1/2 maps, one rotated by 90 degrees",
        params: &[],
    },
];

pub fn examples_registry() -> &'static [ExampleInfo] {
    EXAMPLES
}

/// `key=value` overrides; unknown keys are errors.
pub type ExampleParams = BTreeMap<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn s(x: &BigRational) -> String {
    Scalar::Exact(x.clone()).to_string()
}

fn line_map(ratio: &BigRational, t: &BigRational) -> MapSpec {
    MapSpec {
        ratio: s(ratio),
        sign: None,
        rotation_degrees: None,
        reflect: None,
        translation: vec![s(t)],
    }
}

fn plane_map(ratio: &BigRational, deg: i64, t: [&BigRational; 2]) -> MapSpec {
    MapSpec {
        ratio: s(ratio),
        sign: None,
        rotation_degrees: if deg == 0 { None } else { Some(deg.to_string()) },
        reflect: None,
        translation: vec![s(t[0]), s(t[1])],
    }
}

fn param_rational(p: &ExampleParams, key: &str, default: BigRational) -> Result<BigRational> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => Scalar::parse(v, Backend::Exact)
            .map(|x| x.as_exact().expect("exact").clone())
            .map_err(|e| Error::Parse {
                text: format!("--param {key}"),
                reason: e.to_string(),
            }),
    }
}

fn param_u32(p: &ExampleParams, key: &str, default: u32) -> Result<u32> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.trim().parse().map_err(|_| Error::Parse {
            text: format!("--param {key}"),
            reason: format!("expected a non-negative integer, got {v:?}"),
        }),
    }
}

/// Note attached to systems built from the truncated parameter.
pub fn truncation_note(k: u32) -> String {
    let err = Scalar::from_rational(
        &BigRational::new(BigInt::from(4), num_traits::pow(BigInt::from(5), 1usize << k)),
        Backend::Double,
    );
    format!(
        "t truncated at K={k} terms: parameter error 4*5^(-2^{k}) = {}",
        crate::scalar::format_significant(&err.to_rational().unwrap_or_default(), 3)
    )
}

fn truncation(p: &ExampleParams) -> Result<u32> {
    let k = param_u32(p, "K", DEFAULT_TRUNCATION)?;
    if !(1..=MAX_TRUNCATION).contains(&k) {
        return Err(Error::OutOfRange {
            name: "K",
            value: k.to_string(),
            range: "[1, 16]",
        });
    }
    Ok(k)
}

/// The document for a bundled example with parameter overrides applied.
pub fn example_document(name: &str, params: &ExampleParams) -> Result<IfsSpecDocument> {
    let info = EXAMPLES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Invalid(format!("unknown example {name:?}; see `examples list`")))?;
    for k in params.keys() {
        if !info.params.iter().any(|(p, _)| p == k) {
            return Err(Error::Invalid(format!(
                "example {name} takes no parameter {k:?}"
            )));
        }
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut dim = 1;
    let mut note = None;
    let maps = match name {
        "cantor-1d" => vec![line_map(&q(1, 3), &zero), line_map(&q(1, 3), &q(2, 3))],
        "bandt-graf-line" => {
            let k = truncation(params)?;
            let t = bandt_graf_t(k);
            note = Some(truncation_note(k));
            let fifth = q(1, 5);
            vec![
                line_map(&fifth, &zero),
                line_map(&fifth, &(&t * &fifth)),
                line_map(&fifth, &q(4, 5)),
            ]
        }
        "plane-intermediate" => {
            dim = 2;
            let k = truncation(params)?;
            let t = match params.get("t") {
                Some(_) => param_rational(params, "t", zero.clone())?,
                None => {
                    note = Some(truncation_note(k));
                    bandt_graf_t(k)
                }
            };
            if t < zero || t > q(4, 1) {
                return Err(Error::OutOfRange {
                    name: "t",
                    value: s(&t),
                    range: "[0, 4]",
                });
            }
            let fifth = q(1, 5);
            vec![
                plane_map(&fifth, 0, [&zero, &zero]),
                plane_map(&fifth, 0, [&(&t * &fifth), &zero]),
                plane_map(&fifth, 0, [&q(4, 5), &zero]),
                plane_map(&fifth, 0, [&zero, &q(4, 5)]),
            ]
        }
        "full-assouad" => {
            let a = param_rational(params, "alpha", q(1, 4))?;
            let b = param_rational(params, "beta", q(1, 3))?;
            let g = param_rational(params, "gamma", q(1, 10))?;
            for (k, v) in [("alpha", &a), ("beta", &b), ("gamma", &g)] {
                if *v <= zero || *v >= one {
                    return Err(Error::Parse {
                        text: format!("--param {k}"),
                        reason: "ratio outside (0,1)".into(),
                    });
                }
            }
            dim = param_u32(params, "d", 1)? as usize;
            if !(1..=2).contains(&dim) {
                return Err(Error::UnsupportedDimension(dim));
            }
            let origin = vec![zero.clone(); dim];
            let mk = |r: &BigRational, t: &[BigRational]| {
                if dim == 1 {
                    line_map(r, &t[0])
                } else {
                    plane_map(r, 0, [&t[0], &t[1]])
                }
            };
            let mut maps = vec![mk(&a, &origin), mk(&b, &origin)];
            let shift = &one - &g;
            for z in 1..(1usize << dim) {
                let t: Vec<BigRational> = (0..dim)
                    .map(|l| if z >> l & 1 == 1 { shift.clone() } else { zero.clone() })
                    .collect();
                maps.push(mk(&g, &t));
            }
            maps
        }
        "exact-overlap-demo" => vec![
            line_map(&q(1, 2), &zero),
            line_map(&q(1, 2), &q(1, 2)),
            line_map(&q(1, 4), &zero),
        ],
        "cantor-on-line-2d" => {
            dim = 2;
            vec![
                plane_map(&q(1, 3), 0, [&zero, &zero]),
                plane_map(&q(1, 3), 0, [&q(2, 3), &zero]),
            ]
        }
        "overlap-ninths" => vec![
            line_map(&q(1, 3), &zero),
            line_map(&q(1, 3), &q(2, 3)),
            line_map(&q(1, 9), &zero),
        ],
        "unit-square" => {
            dim = 2;
            let h = q(1, 2);
            vec![
                plane_map(&h, 0, [&zero, &zero]),
                plane_map(&h, 0, [&h, &zero]),
                plane_map(&h, 0, [&zero, &h]),
                plane_map(&h, 0, [&h, &h]),
            ]
        }
        "sierpinski-rotated" => {
            dim = 2;
            let h = q(1, 2);
            vec![
                plane_map(&h, 0, [&zero, &zero]),
                plane_map(&h, 0, [&h, &zero]),
                // R(90°)·x/2 + (1/2, 1/2) keeps the square.
                plane_map(&h, 90, [&h, &h]),
            ]
        }
        _ => unreachable!("registry entry without a builder"),
    };
    Ok(IfsSpecDocument {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        ambient_dim: dim,
        backend: Backend::Exact.to_string(),
        model_note: note,
        maps,
    })
}
