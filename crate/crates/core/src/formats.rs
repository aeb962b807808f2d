//! JSON encodings shared by the CLI and certificates.
//!
//! Every real number is written with 17 significant digits so a value read
//! back is bit-identical to the one written.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{self, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::locc::{povm_from_angles, BinaryPovm, GapReport, PovmAngles};
use crate::qstate::{acin_state, acin_from_thetas, named_state, AcinParams, NamedState, PureState, ThetaParams};
use crate::scalar::{cx, Real};

/// `f64` that serializes as a 17-significant-digit JSON number.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Sig17(pub f64);

/// Formats `x` with 17 significant digits in exponent notation.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(ser::Error::custom(format!("cannot encode non-finite number {}", self.0)));
        }
        let raw = RawValue::from_string(format_sig17(self.0)).map_err(ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Sig17)
    }
}

impl From<f64> for Sig17 {
    fn from(x: f64) -> Self {
        Sig17(x)
    }
}

/// `#[serde(with = "sig17")]` adapter for plain `f64` fields.
pub mod sig17 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        Sig17(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

/// An angle given either as a decimal number of radians or as a string
/// `"pi*a/b"`, `"-pi/b"`, `"pi"` or a decimal literal.
///
/// Multiples of pi keep their rational factor so the value can be
/// evaluated in any scalar type without an `f64` round trip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Radians(f64),
    PiMultiple { numer: f64, denom: f64 },
}

impl Angle {
    pub fn to_real<T: Real>(self) -> T {
        match self {
            Angle::Radians(x) => T::lit(x),
            Angle::PiMultiple { numer, denom } => T::PI() * T::lit(numer) / T::lit(denom),
        }
    }

    pub fn radians(self) -> f64 {
        self.to_real()
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(raw: &str) -> Result<Self> {
        let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Format(format!("invalid angle `{raw}`"));
        let number = |t: &str| -> Result<f64> {
            let v: f64 = t.parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
        };
        let Some(rest) = body.strip_prefix("pi") else {
            return Ok(Angle::Radians(number(&s)?));
        };
        let (numer, denom) = if rest.is_empty() {
            (1.0, 1.0)
        } else if let Some(frac) = rest.strip_prefix('*') {
            match frac.split_once('/') {
                Some((a, b)) => (number(a)?, number(b)?),
                None => (number(frac)?, 1.0),
            }
        } else if let Some(b) = rest.strip_prefix('/') {
            (1.0, number(b)?)
        } else {
            return Err(bad());
        };
        if denom == 0.0 {
            return Err(bad());
        }
        Ok(Angle::PiMultiple {
            numer: sign * numer,
            denom,
        })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Radians(x) => write!(f, "{x}"),
            Angle::PiMultiple { numer, denom } => write!(f, "pi*{numer}/{denom}"),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Angle::Radians(x)),
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::Radians(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcinSpec {
    /// Derived from normalization when omitted.
    #[serde(default)]
    pub l0: Option<f64>,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    #[serde(default)]
    pub phi: Angle,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub theta1: Angle,
    pub theta2: Angle,
    pub theta3: Angle,
    pub theta4: Angle,
    #[serde(default)]
    pub phi: Angle,
}

/// A state given by exactly one of its four encodings.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Amplitudes(Vec<[f64; 2]>),
    Acin(AcinSpec),
    Thetas(ThetaSpec),
    Named(NamedState),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSpecRaw {
    amplitudes: Option<Vec<[f64; 2]>>,
    acin: Option<AcinSpec>,
    thetas: Option<ThetaSpec>,
    named: Option<String>,
}

impl StateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateSpecRaw = serde_json::from_str(text).map_err(|e| Error::Format(format!("state spec: {e}")))?;
        let present = [raw.amplitudes.is_some(), raw.acin.is_some(), raw.thetas.is_some(), raw.named.is_some()];
        if present.iter().filter(|&&p| p).count() != 1 {
            return Err(Error::Format(
                "state spec needs exactly one of `amplitudes`, `acin`, `thetas`, `named`".into(),
            ));
        }
        Ok(if let Some(a) = raw.amplitudes {
            StateSpec::Amplitudes(a)
        } else if let Some(a) = raw.acin {
            StateSpec::Acin(a)
        } else if let Some(t) = raw.thetas {
            StateSpec::Thetas(t)
        } else {
            StateSpec::Named(raw.named.unwrap_or_default().parse()?)
        })
    }

    pub fn build<T: Real>(&self) -> Result<PureState<T>> {
        match self {
            StateSpec::Amplitudes(a) => {
                let len = a.len();
                if len < 4 || !len.is_power_of_two() {
                    return Err(Error::Format(format!(
                        "amplitude list has {len} entries, expected 2^n with n >= 2"
                    )));
                }
                let n = len.trailing_zeros() as usize;
                PureState::new(n, a.iter().map(|&[re, im]| cx(T::lit(re), T::lit(im))).collect())
            }
            StateSpec::Acin(a) => acin_state(&a.params()?),
            StateSpec::Thetas(t) => acin_state(&acin_from_thetas(&t.params())),
            StateSpec::Named(n) => named_state(*n),
        }
    }
}

impl AcinSpec {
    pub fn params<T: Real>(&self) -> Result<AcinParams<T>> {
        let [l1, l2, l3, l4] = [self.l1, self.l2, self.l3, self.l4].map(T::lit);
        let phi = self.phi.to_real();
        match self.l0 {
            Some(l0) => AcinParams::new([T::lit(l0), l1, l2, l3, l4], phi),
            None => AcinParams::with_derived_l0(l1, l2, l3, l4, phi),
        }
    }
}

impl ThetaSpec {
    pub fn params<T: Real>(&self) -> ThetaParams<T> {
        ThetaParams {
            theta: [self.theta1, self.theta2, self.theta3, self.theta4].map(|a| a.to_real()),
            phi: self.phi.to_real(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesSpec {
    pub varphi1: Angle,
    pub varphi2: Angle,
    pub psi1: Angle,
    pub psi2: Angle,
}

impl AnglesSpec {
    pub fn angles<T: Real>(&self) -> PovmAngles<T> {
        PovmAngles::new(
            self.varphi1.to_real(),
            self.varphi2.to_real(),
            self.psi1.to_real(),
            self.psi2.to_real(),
        )
    }
}

/// A POVM given by its angles or by two row-major operators of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum PovmSpec {
    Angles(AnglesSpec),
    Operators([[[f64; 2]; 4]; 2]),
}

impl PovmSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("POVM spec: {e}")))
    }

    pub fn build<T: Real>(&self) -> Result<BinaryPovm<T>> {
        match self {
            PovmSpec::Angles(a) => Ok(povm_from_angles(&a.angles())),
            PovmSpec::Operators(ops) => {
                let [x1, x2] = ops.map(|op| {
                    CMatrix::from_row_major(2, 2, op.iter().map(|&[re, im]| cx(T::lit(re), T::lit(im))).collect())
                });
                BinaryPovm::new(x1, x2)
            }
        }
    }
}

impl Serialize for GapReport<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            probability: Sig17,
            value_after: Option<Sig17>,
        }
        let outcomes: Vec<Out> = self
            .outcomes
            .iter()
            .map(|o| Out {
                probability: Sig17(o.probability),
                value_after: o.value.map(Sig17),
            })
            .collect();
        let mut st = s.serialize_struct("GapReport", 6)?;
        st.serialize_field("measure", &self.measure.to_string())?;
        st.serialize_field("party", &self.party.to_string())?;
        st.serialize_field("value_before", &Sig17(self.value_before))?;
        st.serialize_field("outcomes", &outcomes)?;
        st.serialize_field("gap", &Sig17(self.gap))?;
        st.serialize_field("degenerate_outcomes", &self.degenerate_outcomes)?;
        st.end()
    }
}
