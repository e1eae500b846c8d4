//! Canonical JSON for series, derivations, automorphisms and KV data.
//!
//! Objects have sorted keys and terms appear in basis order, so equal values
//! serialize to equal bytes.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::alphabet::{Alphabet, Word};
use crate::automorphism::Automorphism;
use crate::cyclic::CyclicSeries;
use crate::derivation::TangentialDerivation;
use crate::error::AlgebraError;
use crate::kv::{KVInstance, KVSolution, KrvReport, ResidualReport};
use crate::lie::LieSeries;
use crate::rational::{self, Rational};
use crate::scalar::ScalarSeries;
use crate::tensor::TensorSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Malformed(String),
    #[error("expected kind `{expected}`, found `{found}`")]
    KindMismatch { expected: String, found: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, FormatError>;

pub trait ToJson {
    fn to_json(&self) -> Value;
}

pub trait FromJson: Sized {
    const KIND: &'static str;
    fn from_json(v: &Value) -> Result<Self>;
}

/// Pretty-printed canonical bytes with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_str<T: FromJson>(text: &str) -> Result<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))?;
    T::from_json(&v)
}

/// The `kind` tag of a JSON document, if present.
pub fn kind_of(v: &Value) -> Option<&str> {
    v.get("kind").and_then(Value::as_str)
}

fn malformed(what: impl Into<String>) -> FormatError {
    FormatError::Malformed(what.into())
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| malformed(format!("missing field `{name}`")))
}

fn uint(v: &Value, name: &str) -> Result<u64> {
    field(v, name)?
        .as_u64()
        .ok_or_else(|| malformed(format!("field `{name}` must be a nonnegative integer")))
}

fn string<'a>(v: &'a Value, name: &str) -> Result<&'a str> {
    field(v, name)?
        .as_str()
        .ok_or_else(|| malformed(format!("field `{name}` must be a string")))
}

fn array<'a>(v: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    field(v, name)?
        .as_array()
        .ok_or_else(|| malformed(format!("field `{name}` must be an array")))
}

fn expect_kind(v: &Value, expected: &str) -> Result<()> {
    let found = string(v, "kind")?;
    if found != expected {
        return Err(FormatError::KindMismatch {
            expected: expected.into(),
            found: found.into(),
        });
    }
    Ok(())
}

fn alphabet_json(a: Alphabet) -> Value {
    json!({ "g": a.genus(), "n": a.boundary() })
}

fn read_alphabet(v: &Value) -> Result<Alphabet> {
    let a = field(v, "alphabet")?;
    Ok(Alphabet::new(
        uint(a, "g")? as usize,
        uint(a, "n")? as usize,
    ))
}

fn read_cut(v: &Value) -> Result<u32> {
    u32::try_from(uint(v, "cut")?).map_err(|_| malformed("cut out of range"))
}

fn term_json(key: String, c: &Rational) -> Value {
    json!({ "key": key, "num": c.numer().to_string(), "den": c.denom().to_string() })
}

fn series_json<'a>(
    kind: &str,
    alphabet: Alphabet,
    cut: u32,
    terms: impl Iterator<Item = (String, &'a Rational)>,
) -> Value {
    let terms: Vec<Value> = terms.map(|(k, c)| term_json(k, c)).collect();
    json!({ "alphabet": alphabet_json(alphabet), "cut": cut, "kind": kind, "terms": terms })
}

fn read_terms(v: &Value) -> Result<Vec<(&str, Rational)>> {
    array(v, "terms")?
        .iter()
        .map(|t| {
            let c = rational::parse(string(t, "num")?, string(t, "den")?)
                .ok_or_else(|| malformed("invalid rational coefficient"))?;
            Ok((string(t, "key")?, c))
        })
        .collect()
}

fn read_word_terms(v: &Value, alphabet: Alphabet) -> Result<Vec<(Word, Rational)>> {
    read_terms(v)?
        .into_iter()
        .map(|(k, c)| Ok((alphabet.parse_word(k)?, c)))
        .collect()
}

impl ToJson for LieSeries {
    fn to_json(&self) -> Value {
        let a = self.alphabet();
        series_json(
            "lie",
            a,
            self.cut(),
            self.coeffs().iter().map(|(w, c)| (a.format_word(w), c)),
        )
    }
}

impl FromJson for LieSeries {
    const KIND: &'static str = "lie";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let a = read_alphabet(v)?;
        Ok(LieSeries::from_coeffs(
            a,
            read_cut(v)?,
            read_word_terms(v, a)?,
        )?)
    }
}

impl ToJson for TensorSeries {
    fn to_json(&self) -> Value {
        let a = self.alphabet();
        series_json(
            "tensor",
            a,
            self.cut(),
            self.terms().iter().map(|(w, c)| (a.format_word(w), c)),
        )
    }
}

impl FromJson for TensorSeries {
    const KIND: &'static str = "tensor";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let a = read_alphabet(v)?;
        Ok(TensorSeries::from_terms(
            a,
            read_cut(v)?,
            read_word_terms(v, a)?,
        ))
    }
}

impl ToJson for CyclicSeries {
    fn to_json(&self) -> Value {
        let a = self.alphabet();
        series_json(
            "cyclic",
            a,
            self.cut(),
            self.terms()
                .iter()
                .map(|(w, c)| (a.format_word(w.representative()), c)),
        )
    }
}

impl FromJson for CyclicSeries {
    const KIND: &'static str = "cyclic";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let a = read_alphabet(v)?;
        Ok(CyclicSeries::from_terms(
            a,
            read_cut(v)?,
            read_word_terms(v, a)?,
        ))
    }
}

/// Scalar series carry the alphabet of the instance they belong to; their cut is the
/// highest stored power.
pub fn scalar_to_json(h: &ScalarSeries, alphabet: Alphabet) -> Value {
    let keyed: Vec<(String, &Rational)> = h.terms().map(|(k, c)| (format!("s^{k}"), c)).collect();
    series_json("scalar", alphabet, h.max_degree() as u32, keyed.into_iter())
}

pub fn scalar_from_json(v: &Value) -> Result<ScalarSeries> {
    expect_kind(v, "scalar")?;
    let mut h = ScalarSeries::zero(read_cut(v)? as usize);
    for (key, c) in read_terms(v)? {
        let k: usize = key
            .strip_prefix("s^")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| malformed(format!("scalar key `{key}`")))?;
        if k > h.max_degree() {
            return Err(malformed(format!("scalar key `{key}` above the cut")));
        }
        h.set_coeff(k, c)?;
    }
    Ok(h)
}

fn images_json(alphabet: Alphabet, images: &[LieSeries]) -> Value {
    let map: Map<String, Value> = alphabet
        .letters()
        .zip(images)
        .map(|(l, img)| (alphabet.name(l), img.to_json()))
        .collect();
    Value::Object(map)
}

fn read_images(v: &Value, alphabet: Alphabet) -> Result<Vec<LieSeries>> {
    let images = field(v, "images")?;
    alphabet
        .letters()
        .map(|l| LieSeries::from_json(field(images, &alphabet.name(l))?))
        .collect()
}

fn read_tangential(v: &Value) -> Result<Vec<LieSeries>> {
    array(v, "tangential")?
        .iter()
        .map(LieSeries::from_json)
        .collect()
}

fn map_json(
    kind: &str,
    alphabet: Alphabet,
    cut: u32,
    images: &[LieSeries],
    tangential: &[LieSeries],
) -> Value {
    let tangential: Vec<Value> = tangential.iter().map(ToJson::to_json).collect();
    json!({
        "alphabet": alphabet_json(alphabet),
        "cut": cut,
        "images": images_json(alphabet, images),
        "kind": kind,
        "tangential": tangential,
    })
}

impl ToJson for TangentialDerivation {
    fn to_json(&self) -> Value {
        map_json(
            "tder",
            self.alphabet(),
            self.cut(),
            self.images(),
            self.tangential(),
        )
    }
}

impl FromJson for TangentialDerivation {
    const KIND: &'static str = "tder";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let a = read_alphabet(v)?;
        Ok(TangentialDerivation::new(
            a,
            read_cut(v)?,
            read_images(v, a)?,
            read_tangential(v)?,
        )?)
    }
}

impl ToJson for Automorphism {
    fn to_json(&self) -> Value {
        map_json(
            "taut",
            self.alphabet(),
            self.cut(),
            self.images(),
            self.tangential(),
        )
    }
}

impl FromJson for Automorphism {
    const KIND: &'static str = "taut";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let a = read_alphabet(v)?;
        Ok(Automorphism::new(
            a,
            read_cut(v)?,
            read_images(v, a)?,
            read_tangential(v)?,
        )?)
    }
}

fn instance_header(inst: &KVInstance) -> Value {
    let a = inst.alphabet();
    json!({ "cut": inst.cut(), "g": a.genus(), "n": a.boundary() })
}

fn read_instance(v: &Value) -> Result<KVInstance> {
    let h = field(v, "instance")?;
    let cut = u32::try_from(uint(h, "cut")?).map_err(|_| malformed("cut out of range"))?;
    Ok(KVInstance::new(
        uint(h, "g")? as usize,
        uint(h, "n")? as usize,
        cut,
    ))
}

impl ToJson for KVInstance {
    fn to_json(&self) -> Value {
        json!({
            "instance": instance_header(self),
            "kind": "instance",
            "phi": self.phi().to_json(),
            "trace_cut": self.trace_cut(),
            "xi": self.xi().to_json(),
        })
    }
}

impl FromJson for KVInstance {
    const KIND: &'static str = "instance";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        read_instance(v)
    }
}

impl ToJson for KVSolution {
    fn to_json(&self) -> Value {
        json!({
            "aut": self.aut.to_json(),
            "duflo": scalar_to_json(&self.duflo, self.instance.alphabet()),
            "instance": instance_header(&self.instance),
            "kind": "solution",
        })
    }
}

/// Reads a solution without certifying it.
impl FromJson for KVSolution {
    const KIND: &'static str = "solution";
    fn from_json(v: &Value) -> Result<Self> {
        expect_kind(v, Self::KIND)?;
        let instance = read_instance(v)?;
        let aut = Automorphism::from_json(field(v, "aut")?)?;
        if aut.alphabet() != instance.alphabet() || aut.cut() != instance.cut() {
            return Err(AlgebraError::ContextMismatch(
                "automorphism does not match the instance".into(),
            )
            .into());
        }
        let duflo = scalar_from_json(field(v, "duflo")?)?;
        Ok(KVSolution {
            instance,
            aut,
            duflo,
        })
    }
}

fn profile_json(p: &std::collections::BTreeMap<u32, usize>) -> Value {
    Value::Object(p.iter().map(|(w, n)| (w.to_string(), json!(n))).collect())
}

impl ToJson for ResidualReport {
    fn to_json(&self) -> Value {
        json!({
            "kind": "residuals",
            "kv1": self.kv1.to_json(),
            "kv1_weights": profile_json(&self.kv1_profile),
            "kv2": self.kv2.to_json(),
            "kv2_weights": profile_json(&self.kv2_profile),
            "pass": self.pass,
        })
    }
}

impl ToJson for KrvReport {
    fn to_json(&self) -> Value {
        let duflo = self
            .duflo
            .as_ref()
            .map(|h| scalar_to_json(h, self.div.alphabet()))
            .unwrap_or(Value::Null);
        json!({
            "div": self.div.to_json(),
            "duflo": duflo,
            "kind": "krv-report",
            "pass": self.pass,
            "phi_defect": self.phi_defect.to_json(),
        })
    }
}
