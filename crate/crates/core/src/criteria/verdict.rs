use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Where a criterion is tightest or violated, and the slack there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<[f64; 3]>,
    #[serde(with = "nonfinite")]
    pub value: f64,
}

impl Witness {
    pub fn radial<T: Real>(r: T, value: T) -> Self {
        Self {
            r: Some(r.f64()),
            x: None,
            value: value.f64(),
        }
    }

    pub fn point<T: Real>(x: [T; 3], value: T) -> Self {
        Self {
            r: None,
            x: Some([x[0].f64(), x[1].f64(), x[2].f64()]),
            value: value.f64(),
        }
    }
}

/// Quantitative payload attached to a verdict. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Predicted `[inf u, sup u]` over space-time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope: Option<[f64; 2]>,
    /// The cruder logarithmic envelope for `f ≡ 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_envelope: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf_bound: Option<f64>,
    /// `c` in `|u_t(r,t)| <= c / r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ut_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kato_bound: Option<f64>,
    /// Predicted blow-up time window `[-r0, r0]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_window: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_below: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_above: Option<f64>,
    /// `C` in `|u(x,t)| <= C (alpha + |x|)^(-2/N)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_norm: Option<f64>,
}

impl Bounds {
    pub fn is_empty(&self) -> bool {
        *self == Bounds::default()
    }
}

/// Outcome of one criterion.
///
/// `holds` is `margin > 0` for strict criteria and `margin >= 0` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub holds: bool,
    pub strict: bool,
    #[serde(with = "nonfinite")]
    pub margin: f64,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Bounds::is_empty")]
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(criterion: impl Into<String>, strict: bool, margin: f64, witness: Option<Witness>) -> Self {
        Self {
            criterion: criterion.into(),
            holds: decide(strict, margin),
            strict,
            margin,
            witness,
            bounds: Bounds::default(),
            warnings: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn warn(mut self, w: impl Into<String>) -> Self {
        self.warnings.push(w.into());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

pub(crate) fn decide(strict: bool, margin: f64) -> bool {
    if strict {
        margin > 0.0
    } else {
        margin >= 0.0
    }
}

/// Non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod nonfinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}
