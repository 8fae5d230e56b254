//! JSON specification documents for iterated function systems.
//!
//! Numbers are strings so rationals survive parsing untouched; decimals are
//! accepted only on float backends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Similarity;
use crate::scalar::{Backend, Scalar};
use crate::symbolic::IfsSystem;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpecDocument {
    pub schema_version: u32,
    pub name: String,
    pub ambient_dim: usize,
    /// `exact`, `double` or `float(DIGITS)`.
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_note: Option<String>,
    pub maps: Vec<MapSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub ratio: String,
    /// 1D only: `+1` or `-1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i32>,
    /// 2D only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_degrees: Option<String>,
    /// 2D only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflect: Option<bool>,
    pub translation: Vec<String>,
}

fn field_err(path: String, reason: impl Into<String>) -> Error {
    Error::Parse {
        text: path,
        reason: reason.into(),
    }
}

/// Parses and validates a document; the result is known to build.
pub fn parse_ifs_spec(text: &str) -> Result<IfsSpecDocument> {
    let doc: IfsSpecDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        text: format!("line {}, column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    doc.build(None)?;
    Ok(doc)
}

pub fn serialize_ifs_spec(doc: &IfsSpecDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data serializes");
    s.push('\n');
    s
}

impl IfsSpecDocument {
    pub fn backend(&self) -> Result<Backend> {
        self.backend
            .parse()
            .map_err(|_| field_err("backend".into(), "expected exact, double or float(DIGITS)"))
    }

    /// Builds the system, optionally on a different backend than declared.
    /// Every error names the offending field.
    pub fn build(&self, backend: Option<Backend>) -> Result<IfsSystem> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_err(
                "schema_version".into(),
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let dim = self.ambient_dim;
        if !(1..=2).contains(&dim) {
            return Err(field_err("ambient_dim".into(), "must be 1 or 2"));
        }
        let declared = self.backend()?;
        let b = backend.unwrap_or(declared);
        if self.maps.is_empty() {
            return Err(field_err("maps".into(), "at least one map is required"));
        }
        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, m) in self.maps.iter().enumerate() {
            maps.push(m.build(&format!("maps[{i}]"), dim, b)?);
        }
        let ifs = IfsSystem::new(self.name.clone(), maps)?;
        Ok(match &self.model_note {
            Some(n) => ifs.with_model_note(n.clone()),
            None => ifs,
        })
    }

    /// Document describing `ifs`; scalars are written exactly on the exact
    /// backend and to the backend's precision otherwise.
    pub fn from_ifs(ifs: &IfsSystem) -> Self {
        let maps = ifs
            .maps()
            .iter()
            .map(|m| {
                let o = m.orthogonal();
                let (sign, rotation_degrees, reflect) = if ifs.dim() == 1 {
                    (Some(if o.reflect() { -1 } else { 1 }), None, None)
                } else {
                    (None, Some(o.degrees().to_string()), Some(o.reflect()))
                };
                MapSpec {
                    ratio: m.ratio().to_string(),
                    sign,
                    rotation_degrees,
                    reflect,
                    translation: m.translation().iter().map(Scalar::to_string).collect(),
                }
            })
            .collect();
        IfsSpecDocument {
            schema_version: SCHEMA_VERSION,
            name: ifs.name().to_string(),
            ambient_dim: ifs.dim(),
            backend: ifs.backend().to_string(),
            model_note: ifs.model_note().map(str::to_string),
            maps,
        }
    }
}

fn scalar_field(path: &str, text: &str, b: Backend) -> Result<Scalar> {
    Scalar::parse(text, b).map_err(|e| {
        let mut reason = match e {
            Error::Parse { reason, .. } => reason,
            other => other.to_string(),
        };
        if b.is_exact() && !text.contains('/') && text.contains('.') {
            reason.push_str(
                "; for the Bandt-Graf parameter use the builtin `bandt-graf-line` \
                 with --truncation K",
            );
        }
        field_err(path.to_string(), format!("{reason} (got {text:?})"))
    })
}

impl MapSpec {
    fn build(&self, path: &str, dim: usize, b: Backend) -> Result<Similarity> {
        let ratio = scalar_field(&format!("{path}.ratio"), &self.ratio, b)?;
        if !ratio.is_positive() || ratio >= Scalar::one(b) {
            return Err(field_err(format!("{path}.ratio"), "ratio outside (0,1)"));
        }
        if self.translation.len() != dim {
            return Err(field_err(
                format!("{path}.translation"),
                format!("expected {dim} entries, got {}", self.translation.len()),
            ));
        }
        let t: Vec<Scalar> = self
            .translation
            .iter()
            .enumerate()
            .map(|(k, s)| scalar_field(&format!("{path}.translation[{k}]"), s, b))
            .collect::<Result<_>>()?;
        if dim == 1 {
            if self.rotation_degrees.is_some() || self.reflect.is_some() {
                return Err(field_err(
                    path.to_string(),
                    "rotation_degrees and reflect are 2D fields; use sign in 1D",
                ));
            }
            let reflect = match self.sign.unwrap_or(1) {
                1 => false,
                -1 => true,
                s => return Err(field_err(format!("{path}.sign"), format!("must be +1 or -1, got {s}"))),
            };
            return Similarity::line(ratio, reflect, t[0].clone());
        }
        if self.sign.is_some() {
            return Err(field_err(format!("{path}.sign"), "sign is a 1D field; use reflect in 2D"));
        }
        let deg = match &self.rotation_degrees {
            Some(s) => scalar_field(&format!("{path}.rotation_degrees"), s, b)?,
            None => Scalar::zero(b),
        };
        Similarity::plane(ratio, deg, self.reflect.unwrap_or(false), [t[0].clone(), t[1].clone()])
            .map_err(|e| field_err(format!("{path}.rotation_degrees"), e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = r#"{
        "schema_version": 1, "name": "cantor", "ambient_dim": 1, "backend": "exact",
        "maps": [
            {"ratio": "1/3", "translation": ["0"]},
            {"ratio": "1/3", "sign": 1, "translation": ["2/3"]}
        ]
    }"#;

    #[test]
    fn cantor_parses_and_round_trips() {
        let d = parse_ifs_spec(CANTOR).unwrap();
        let ifs = d.build(None).unwrap();
        assert_eq!(ifs.len(), 2);
        assert_eq!(ifs.maps()[1].translation()[0], Scalar::from_ratio(2, 3, Backend::Exact));
        let again = parse_ifs_spec(&serialize_ifs_spec(&d)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn bad_ratio_is_named() {
        let t = CANTOR.replacen("\"1/3\"", "\"5/3\"", 1);
        match parse_ifs_spec(&t) {
            Err(Error::Parse { text, reason }) => {
                assert_eq!(text, "maps[0].ratio");
                assert!(reason.contains("ratio outside (0,1)"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decimal_t_depends_on_backend() {
        let spec = |b: &str| {
            format!(
                r#"{{"schema_version": 1, "name": "p", "ambient_dim": 2, "backend": "{b}",
                "maps": [
                  {{"ratio": "1/5", "translation": ["0", "0"]}},
                  {{"ratio": "1/5", "rotation_degrees": "0", "reflect": false, "translation": ["0.193282048", "0"]}},
                  {{"ratio": "1/5", "translation": ["4/5", "0"]}},
                  {{"ratio": "1/5", "translation": ["0", "4/5"]}}
                ]}}"#
            )
        };
        assert!(parse_ifs_spec(&spec("float(60)")).is_ok());
        match parse_ifs_spec(&spec("exact")) {
            Err(Error::Parse { text, reason }) => {
                assert_eq!(text, "maps[1].translation[0]");
                assert!(reason.contains("bandt-graf-line"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_ifs_spec("{"), Err(Error::Parse { .. })));
        let wrong_dim = CANTOR.replace("[\"0\"]", "[\"0\", \"0\"]");
        assert!(parse_ifs_spec(&wrong_dim).is_err());
        let extra = CANTOR.replace("\"name\"", "\"bogus\": 1, \"name\"");
        assert!(parse_ifs_spec(&extra).is_err());
    }

    #[test]
    fn from_ifs_round_trip() {
        let ifs = parse_ifs_spec(CANTOR).unwrap().build(None).unwrap();
        let d = IfsSpecDocument::from_ifs(&ifs);
        let back = d.build(None).unwrap();
        for (a, b) in ifs.maps().iter().zip(back.maps()) {
            assert_eq!(a.key(), b.key());
        }
    }
}
