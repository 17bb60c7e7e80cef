//! Job files: parsing, schema checks and conversion into core types.

use std::fmt;

use mukai_core::fm::{EllipticData, EllipticFibration, IsotropicFmParams};
use mukai_core::{IntMatrix, MukaiVector, SurfaceKind, SurfaceModel};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::Value;

/// A failure with a stable code, an optional JSON path and the process exit
/// code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub path: Option<String>,
    pub exit: u8,
}

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

impl CliError {
    pub fn input(code: &str, message: impl Into<String>, path: Option<String>) -> Self {
        CliError { code: code.into(), message: message.into(), path, exit: EXIT_INPUT }
    }

    pub fn at(path: &str, message: impl Into<String>) -> Self {
        CliError::input("schema", message, Some(path.into()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{}: {} (at {p})", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

impl From<mukai_core::Error> for CliError {
    fn from(e: mukai_core::Error) -> Self {
        let exit = if e.is_input_error() {
            EXIT_INPUT
        } else if matches!(e, mukai_core::Error::Invariant(_)) {
            EXIT_INTERNAL
        } else {
            EXIT_PRECONDITION
        };
        CliError { code: e.code().into(), message: e.to_string(), path: None, exit }
    }
}

/// An integer written either as a JSON integer or as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Int, E> {
                Ok(Int(x.into()))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Int, E> {
                Ok(Int(x.into()))
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Int, E> {
                Err(E::custom(format!("{x} is a floating-point number; write integers or decimal strings")))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Int, E> {
                s.trim().parse().map(Int).map_err(|_| E::custom(format!("{s:?} is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

/// A rational written as an integer, or a string `"p"` or `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(x.into())))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(x.into())))
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Rat, E> {
                Err(E::custom(format!("{x} is a floating-point number; write \"p/q\"")))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Rat, E> {
                parse_rational(s).map(Rat).ok_or_else(|| E::custom(format!("{s:?} is not a rational p/q")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse().ok().map(BigRational::from_integer),
        Some((p, q)) => {
            let (p, q): (BigInt, BigInt) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
    }
}

fn ints(xs: &[Int]) -> Vec<BigInt> {
    xs.iter().map(|x| x.0.clone()).collect()
}

/// A Mukai vector as `{"r", "c1", "a"}` or as a flat list `[r, c1..., a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSpec(pub MukaiVector);

impl<'de> Deserialize<'de> for VectorSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Obj {
            r: Int,
            c1: Vec<Int>,
            a: Int,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Flat(Vec<Int>),
            Obj(Obj),
        }
        match Raw::deserialize(d).map_err(|_| {
            de::Error::custom("expected a vector {\"r\", \"c1\", \"a\"} or a list [r, c1..., a] of integers")
        })? {
            Raw::Flat(xs) if xs.len() >= 2 => {
                let n = xs.len();
                Ok(VectorSpec(MukaiVector::new(xs[0].0.clone(), ints(&xs[1..n - 1]), xs[n - 1].0.clone())))
            }
            Raw::Flat(_) => Err(de::Error::custom("a flat vector needs at least r and a")),
            Raw::Obj(o) => Ok(VectorSpec(MukaiVector::new(o.r.0, ints(&o.c1), o.a.0))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Pair,
    Perp,
    Fm,
    Walls,
    Classify,
    Kummer,
    Deform,
    AlbaneseCheck,
    Fujiki,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Pair,
        Command::Perp,
        Command::Fm,
        Command::Walls,
        Command::Classify,
        Command::Kummer,
        Command::Deform,
        Command::AlbaneseCheck,
        Command::Fujiki,
        Command::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Pair => "pair",
            Command::Perp => "perp",
            Command::Fm => "fm",
            Command::Walls => "walls",
            Command::Classify => "classify",
            Command::Kummer => "kummer",
            Command::Deform => "deform",
            Command::AlbaneseCheck => "albanese-check",
            Command::Fujiki => "fujiki",
            Command::Report => "report",
        }
    }

    fn needs_surface(self) -> bool {
        !matches!(self, Command::AlbaneseCheck | Command::Fujiki | Command::Report)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceSpec {
    kind: KindSpec,
    gram: Vec<Vec<Int>>,
    #[serde(default)]
    ample: Option<Vec<Int>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindSpec {
    Abelian,
    K3,
}

impl From<KindSpec> for SurfaceKind {
    fn from(k: KindSpec) -> Self {
        match k {
            KindSpec::Abelian => SurfaceKind::Abelian,
            KindSpec::K3 => SurfaceKind::K3,
        }
    }
}

fn build_surface(spec: SurfaceSpec) -> Result<SurfaceModel, CliError> {
    let n = spec.gram.len();
    if n == 0 {
        return Err(CliError::at("surface.gram", "the Gram matrix is empty"));
    }
    for (i, row) in spec.gram.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::at(
                &format!("surface.gram[{i}]"),
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
    }
    for i in 0..n {
        let d = &spec.gram[i][i].0;
        if !(d % 2u8).is_zero() {
            return Err(CliError::input(
                "odd-diagonal",
                format!("diagonal entry gram[{i}][{i}] = {d} is odd; the lattice must be even"),
                Some(format!("surface.gram[{i}][{i}]")),
            ));
        }
        for j in 0..i {
            if spec.gram[i][j] != spec.gram[j][i] {
                return Err(CliError::input(
                    "asymmetric-gram",
                    format!("gram[{i}][{j}] = {} but gram[{j}][{i}] = {}", spec.gram[i][j].0, spec.gram[j][i].0),
                    Some(format!("surface.gram[{i}][{j}]")),
                ));
            }
        }
    }
    let gram = IntMatrix::from_rows(spec.gram.iter().map(|r| ints(r)).collect()).map_err(CliError::from)?;
    let ample = match spec.ample {
        Some(a) => ints(&a),
        None if n == 1 => vec![BigInt::from(1)],
        None => return Err(CliError::at("surface.ample", "an ample class is required when the NS rank exceeds 1")),
    };
    SurfaceModel::new(spec.kind.into(), gram, ample).map_err(|e| {
        let mut err = CliError::from(e);
        err.path = Some("surface".into());
        err
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoParamsSpec {
    pub r0: Int,
    pub d0: Int,
    pub k: Int,
    #[serde(default)]
    pub d1: Option<Int>,
    #[serde(default)]
    pub l: Option<Int>,
}

impl IsoParamsSpec {
    pub fn build(&self) -> Result<IsotropicFmParams, CliError> {
        let (r0, d0, k) = (self.r0.0.clone(), self.d0.0.clone(), self.k.0.clone());
        Ok(match (&self.d1, &self.l) {
            (Some(d1), Some(l)) => IsotropicFmParams::with_bezout(r0, d0, k, d1.0.clone(), l.0.clone())?,
            (None, None) => IsotropicFmParams::new(r0, d0, k)?,
            _ => return Err(CliError::at("params", "give both d1 and l, or neither")),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationSpec {
    pub sigma: Vec<Int>,
    pub fiber: Vec<Int>,
    pub tau: Vec<Int>,
}

impl FibrationSpec {
    pub fn build(&self, s: &SurfaceModel) -> Result<EllipticFibration, CliError> {
        Ok(EllipticFibration::new(s.clone(), ints(&self.sigma), ints(&self.fiber), ints(&self.tau))?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticDataSpec {
    pub r: Int,
    pub l: Int,
    pub n: Int,
}

impl EllipticDataSpec {
    pub fn build(&self) -> EllipticData<BigInt> {
        EllipticData { r: self.r.0.clone(), l: self.l.0.clone(), n: self.n.0.clone() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInputs {
    pub v: VectorSpec,
    pub w: VectorSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorInputs {
    pub v: VectorSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FmMap {
    PoincareF,
    PoincareG,
    IsotropicF,
    IsotropicG,
    Dual,
    Twist,
    Elliptic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FmInputs {
    pub map: FmMap,
    #[serde(default)]
    pub v: Option<VectorSpec>,
    #[serde(default)]
    pub params: Option<IsoParamsSpec>,
    #[serde(default)]
    pub twist: Option<Vec<Int>>,
    #[serde(default)]
    pub fibration: Option<FibrationSpec>,
    #[serde(default)]
    pub data: Option<EllipticDataSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub from: Vec<Int>,
    pub to: Vec<Int>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallsInputs {
    pub c1e: Vec<Int>,
    pub chie: Int,
    #[serde(default)]
    pub l0: Option<Vec<Int>>,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub polarisation: Option<Vec<Int>>,
    #[serde(default)]
    pub segment: Option<SegmentSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    #[serde(default)]
    pub isotropic: Option<IsoParamsSpec>,
    #[serde(default)]
    pub fibration: Option<FibrationSpec>,
    #[serde(default)]
    pub assume_star: bool,
    #[serde(default)]
    pub assume_general: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyInputs {
    pub v: VectorSpec,
    #[serde(default)]
    pub context: ContextSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformInputs {
    pub vectors: Vec<VectorSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlbaneseInputs {
    pub r: Int,
    pub a: Int,
    pub chi: Int,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FujikiInputs {
    pub n: u32,
    pub l2: Rat,
    pub lx: Rat,
    pub x2: Rat,
    #[serde(default)]
    pub shape: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportInputs {
    pub results: Vec<Value>,
    #[serde(default)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone)]
pub enum Inputs {
    Pair(PairInputs),
    Perp(VectorInputs),
    Fm(FmInputs),
    Walls(WallsInputs),
    Classify(ClassifyInputs),
    Kummer(VectorInputs),
    Deform(DeformInputs),
    AlbaneseCheck(AlbaneseInputs),
    Fujiki(FujikiInputs),
    Report(ReportInputs),
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub surface: Option<SurfaceModel>,
    pub inputs: Inputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    command: Command,
    #[serde(default)]
    surface: Option<Value>,
    #[serde(default)]
    inputs: Option<Value>,
}

fn typed<T: DeserializeOwned>(v: Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { prefix.to_string() } else { format!("{prefix}.{inner}") };
        CliError::input("schema", e.into_inner().to_string(), Some(path))
    })
}

pub fn parse_job(text: &str) -> Result<JobSpec, CliError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::input("malformed-json", e.to_string(), None))?;
    parse_job_value(value)
}

pub fn parse_job_value(value: Value) -> Result<JobSpec, CliError> {
    let raw: RawJob = serde_path_to_error::deserialize(value).map_err(|e| {
        let p = e.path().to_string();
        CliError::input("schema", e.into_inner().to_string(), (p != ".").then_some(p))
    })?;
    let surface = match (raw.surface, raw.command.needs_surface()) {
        (Some(s), _) => Some(build_surface(typed(s, "surface")?)?),
        (None, true) => return Err(CliError::at("surface", format!("`{}` needs a surface", raw.command.as_str()))),
        (None, false) => None,
    };
    let inputs = raw.inputs.unwrap_or(Value::Object(Default::default()));
    let p = "inputs";
    let inputs = match raw.command {
        Command::Pair => Inputs::Pair(typed(inputs, p)?),
        Command::Perp => Inputs::Perp(typed(inputs, p)?),
        Command::Fm => Inputs::Fm(typed(inputs, p)?),
        Command::Walls => Inputs::Walls(typed(inputs, p)?),
        Command::Classify => Inputs::Classify(typed(inputs, p)?),
        Command::Kummer => Inputs::Kummer(typed(inputs, p)?),
        Command::Deform => Inputs::Deform(typed(inputs, p)?),
        Command::AlbaneseCheck => Inputs::AlbaneseCheck(typed(inputs, p)?),
        Command::Fujiki => Inputs::Fujiki(typed(inputs, p)?),
        Command::Report => Inputs::Report(typed(inputs, p)?),
    };
    Ok(JobSpec { command: raw.command, surface, inputs })
}

/// A batch is either a list of jobs or `{"jobs": [...]}`.
pub fn parse_batch(text: &str) -> Result<Vec<Value>, CliError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::input("malformed-json", e.to_string(), None))?;
    match value {
        Value::Array(xs) => Ok(xs),
        Value::Object(mut m) if m.len() == 1 && m.contains_key("jobs") => match m.remove("jobs") {
            Some(Value::Array(xs)) => Ok(xs),
            _ => Err(CliError::at("jobs", "expected a list of jobs")),
        },
        _ => Err(CliError::input("schema", "a batch is a list of jobs or {\"jobs\": [...]}", None)),
    }
}
