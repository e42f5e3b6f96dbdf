//! JSON formats for polytopes, weights, PL functions, potentials and run
//! inputs, plus the compact `kind:params` weight syntax.
//!
//! Parsers report failures as [`Error::Schema`] with a JSON pointer to the
//! offending value. Every parsed object has a canonical JSON form that parses
//! back to an equal object.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::invariants::SolitonKind;
use crate::mafunc::{DiscretePotential, Grid};
use crate::polytope::{LabelledPolytope, MAX_GENERATORS};
use crate::quadrature::{Monomial, WeightFunction};
use crate::rational::{format_rational, parse_rational, QVec, Q};
use crate::stability::{PLConvexFunction, Piece};

/// Largest number of monomials in a polynomial weight.
pub const MAX_MONOMIALS: usize = 64;
/// Largest total degree of a polynomial weight.
pub const MAX_DEGREE: u32 = 16;
/// Largest dimension accepted anywhere.
pub const MAX_DIM: usize = 4;

fn err<T>(pointer: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::schema(pointer, message))
}

fn object<'a>(v: &'a Value, ptr: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let Some(map) = v.as_object() else {
        return err(ptr, "expected an object");
    };
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return err(&format!("{ptr}/{k}"), "unknown field");
    }
    Ok(map)
}

fn field<'a>(map: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| Error::schema(format!("{ptr}/{key}"), "missing field"))
}

fn array<'a>(v: &'a Value, ptr: &str, max: usize) -> Result<&'a [Value]> {
    let Some(items) = v.as_array() else {
        return err(ptr, "expected an array");
    };
    if items.len() > max {
        return err(ptr, format!("at most {max} entries allowed"));
    }
    Ok(items)
}

/// A rational from a `"p/q"` string, a decimal string or a JSON number.
/// Numbers are read from their decimal text, so `0.1` means one tenth.
pub fn rational_value(v: &Value, ptr: &str) -> Result<Q> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return err(ptr, "expected a rational as \"p/q\" or a number"),
    };
    parse_rational(&text).ok_or_else(|| Error::schema(ptr, format!("invalid rational {text:?}")))
}

fn rational_vec(v: &Value, ptr: &str) -> Result<QVec> {
    array(v, ptr, MAX_DIM)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_value(x, &format!("{ptr}/{i}")))
        .collect()
}

fn float(v: &Value, ptr: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(ptr, "expected a finite number"),
    }
}

fn float_vec(v: &Value, ptr: &str, max: usize) -> Result<Vec<f64>> {
    array(v, ptr, max)?
        .iter()
        .enumerate()
        .map(|(i, x)| float(x, &format!("{ptr}/{i}")))
        .collect()
}

fn uint(v: &Value, ptr: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::schema(ptr, "expected a nonnegative integer"))
}

fn rationals_json(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))
}

/// How a polytope was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeInput {
    Builtin(String),
    Facets { normals: Vec<QVec>, labels: Vec<Q> },
    Vertices(Vec<QVec>),
}

impl PolytopeInput {
    pub fn from_value(v: &Value) -> Result<PolytopeInput> {
        let map = object(v, "", &["builtin", "dim", "facets", "vertices"])?;
        let forms = ["builtin", "facets", "vertices"]
            .iter()
            .filter(|k| map.contains_key(**k))
            .count();
        if forms != 1 {
            return err("", "expected exactly one of builtin, facets, vertices");
        }
        if let Some(name) = map.get("builtin") {
            let Some(name) = name.as_str() else {
                return err("/builtin", "expected a string");
            };
            return Ok(PolytopeInput::Builtin(name.to_string()));
        }
        let dim = match map.get("dim") {
            Some(d) => Some(uint(d, "/dim")? as usize),
            None => None,
        };
        let check_dim = |len: usize, ptr: &str| -> Result<()> {
            match dim {
                Some(d) if d != len => err(ptr, format!("expected {d} coordinates, got {len}")),
                _ => Ok(()),
            }
        };
        if let Some(facets) = map.get("facets") {
            let items = array(facets, "/facets", MAX_GENERATORS)?;
            let mut normals = Vec::with_capacity(items.len());
            let mut labels = Vec::with_capacity(items.len());
            for (i, f) in items.iter().enumerate() {
                let ptr = format!("/facets/{i}");
                let fm = object(f, &ptr, &["normal", "label"])?;
                let normal = rational_vec(field(fm, &ptr, "normal")?, &format!("{ptr}/normal"))?;
                check_dim(normal.len(), &format!("{ptr}/normal"))?;
                let label = match fm.get("label") {
                    Some(l) => rational_value(l, &format!("{ptr}/label"))?,
                    None => Q::from_integer(1.into()),
                };
                normals.push(normal);
                labels.push(label);
            }
            return Ok(PolytopeInput::Facets { normals, labels });
        }
        let items = array(&map["vertices"], "/vertices", MAX_GENERATORS)?;
        let mut points = Vec::with_capacity(items.len());
        for (i, p) in items.iter().enumerate() {
            let ptr = format!("/vertices/{i}");
            let point = rational_vec(p, &ptr)?;
            check_dim(point.len(), &ptr)?;
            points.push(point);
        }
        Ok(PolytopeInput::Vertices(points))
    }

    pub fn parse(text: &str) -> Result<PolytopeInput> {
        PolytopeInput::from_value(&parse_text(text)?)
    }

    pub fn build(&self) -> Result<LabelledPolytope> {
        match self {
            PolytopeInput::Builtin(name) => LabelledPolytope::builtin(name),
            PolytopeInput::Facets { normals, labels } => LabelledPolytope::from_facets(normals, labels),
            PolytopeInput::Vertices(points) => LabelledPolytope::from_vertices(points),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            PolytopeInput::Builtin(name) => json!({ "builtin": name }),
            PolytopeInput::Facets { normals, labels } => json!({
                "dim": normals.first().map_or(0, Vec::len),
                "facets": normals.iter().zip(labels).map(|(n, l)| json!({
                    "normal": rationals_json(n),
                    "label": format_rational(l),
                })).collect::<Vec<_>>(),
            }),
            PolytopeInput::Vertices(points) => json!({
                "vertices": points.iter().map(|p| rationals_json(p)).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Parses and builds a polytope from JSON text.
pub fn parse_polytope(text: &str) -> Result<LabelledPolytope> {
    PolytopeInput::parse(text)?.build()
}

pub fn weight_from_value(v: &Value) -> Result<WeightFunction> {
    let map = object(v, "", &["kind", "a0", "b", "coeffs"])?;
    let kind = field(map, "", "kind")?;
    let Some(kind) = kind.as_str() else {
        return err("/kind", "expected a string");
    };
    let a0 = || float(field(map, "", "a0")?, "/a0");
    let b = || float_vec(field(map, "", "b")?, "/b", MAX_DIM);
    let only = |keys: &[&str]| -> Result<()> {
        match map.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => err(&format!("/{k}"), format!("not used by kind {kind:?}")),
            None => Ok(()),
        }
    };
    match kind {
        "constant" => {
            only(&["kind", "a0"])?;
            Ok(WeightFunction::Constant(a0()?))
        }
        "affine" => {
            only(&["kind", "a0", "b"])?;
            Ok(WeightFunction::Affine { a0: a0()?, b: b()? })
        }
        "exp_affine" => {
            only(&["kind", "a0", "b"])?;
            Ok(WeightFunction::ExpAffine { a0: a0()?, b: b()? })
        }
        "polynomial" => {
            only(&["kind", "coeffs"])?;
            let items = array(field(map, "", "coeffs")?, "/coeffs", MAX_MONOMIALS)?;
            let mut monomials = Vec::with_capacity(items.len());
            for (i, m) in items.iter().enumerate() {
                let ptr = format!("/coeffs/{i}");
                let mm = object(m, &ptr, &["powers", "c"])?;
                let powers_ptr = format!("{ptr}/powers");
                let powers: Vec<u32> = array(field(mm, &ptr, "powers")?, &powers_ptr, MAX_DIM)?
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let ptr = format!("{powers_ptr}/{j}");
                        let p = uint(p, &ptr)?;
                        if p > MAX_DEGREE as u64 {
                            return err(&ptr, format!("exponent above {MAX_DEGREE}"));
                        }
                        Ok(p as u32)
                    })
                    .collect::<Result<_>>()?;
                if powers.iter().sum::<u32>() > MAX_DEGREE {
                    return err(&powers_ptr, format!("total degree above {MAX_DEGREE}"));
                }
                if let Some(first) = monomials.first().map(|m: &Monomial| m.powers.len()) {
                    if first != powers.len() {
                        return err(&powers_ptr, "monomials use different numbers of variables");
                    }
                }
                let coeff = float(field(mm, &ptr, "c")?, &format!("{ptr}/c"))?;
                monomials.push(Monomial { powers, coeff });
            }
            if monomials.is_empty() {
                return err("/coeffs", "at least one monomial is required");
            }
            Ok(WeightFunction::Polynomial(monomials))
        }
        other => err("/kind", format!("unknown weight kind {other:?}")),
    }
}

pub fn parse_weight(text: &str) -> Result<WeightFunction> {
    weight_from_value(&parse_text(text)?)
}

pub fn weight_to_value(g: &WeightFunction) -> Value {
    match g {
        WeightFunction::Constant(c) => json!({ "kind": "constant", "a0": c }),
        WeightFunction::Affine { a0, b } => json!({ "kind": "affine", "a0": a0, "b": b }),
        WeightFunction::ExpAffine { a0, b } => json!({ "kind": "exp_affine", "a0": a0, "b": b }),
        WeightFunction::Polynomial(ms) => json!({ "kind": "polynomial", "coeffs": ms }),
    }
}

/// Parses `constant:C`, `affine:A0,B1,..`, `exp_affine:A0,B1,..` or
/// `exp:B1,..` (shorthand for `exp_affine` with `A0 = 0`).
pub fn parse_g_spec(spec: &str) -> Result<WeightFunction> {
    let ptr = "/g";
    let Some((kind, params)) = spec.split_once(':') else {
        return err(ptr, "expected kind:params");
    };
    let nums: Vec<f64> = params
        .split(',')
        .map(|s| match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => err(ptr, format!("invalid number {s:?}")),
        })
        .collect::<Result<_>>()?;
    if nums.len() > MAX_DIM + 1 {
        return err(ptr, "too many parameters");
    }
    let split = |nums: &[f64]| -> Result<(f64, Vec<f64>)> {
        match nums.split_first() {
            Some((a0, b)) if !b.is_empty() => Ok((*a0, b.to_vec())),
            _ => err(ptr, format!("{kind} needs a0 followed by at least one slope")),
        }
    };
    match kind {
        "constant" if nums.len() == 1 => Ok(WeightFunction::Constant(nums[0])),
        "constant" => err(ptr, "constant takes one value"),
        "affine" => {
            let (a0, b) = split(&nums)?;
            Ok(WeightFunction::Affine { a0, b })
        }
        "exp_affine" => {
            let (a0, b) = split(&nums)?;
            Ok(WeightFunction::ExpAffine { a0, b })
        }
        "exp" if nums.len() <= MAX_DIM => Ok(WeightFunction::exp_linear(nums)),
        "exp" => err(ptr, "too many slopes"),
        other => err(ptr, format!("unknown weight kind {other:?}")),
    }
}

pub fn pl_from_value(v: &Value) -> Result<PLConvexFunction> {
    let map = object(v, "", &["pieces"])?;
    let items = array(field(map, "", "pieces")?, "/pieces", crate::stability::pl::MAX_PIECES)?;
    let mut pieces = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let ptr = format!("/pieces/{i}");
        let pm = object(item, &ptr, &["a", "c"])?;
        let a = rational_vec(field(pm, &ptr, "a")?, &format!("{ptr}/a"))?;
        let c = match pm.get("c") {
            Some(c) => rational_value(c, &format!("{ptr}/c"))?,
            None => Q::from_integer(0.into()),
        };
        pieces.push(Piece { a, c });
    }
    PLConvexFunction::new(pieces)
}

pub fn parse_pl(text: &str) -> Result<PLConvexFunction> {
    pl_from_value(&parse_text(text)?)
}

pub fn pl_to_value(f: &PLConvexFunction) -> Value {
    json!({
        "pieces": f.pieces().iter().map(|p| json!({
            "a": rationals_json(&p.a),
            "c": format_rational(&p.c),
        })).collect::<Vec<_>>(),
    })
}

pub fn potential_from_value(v: &Value) -> Result<DiscretePotential> {
    let map = object(v, "", &["grid", "values"])?;
    let gm = object(field(map, "", "grid")?, "/grid", &["R", "N"])?;
    let radius = float(field(gm, "/grid", "R")?, "/grid/R")?;
    let nodes = uint(field(gm, "/grid", "N")?, "/grid/N")?;
    let grid = Grid::new(radius, usize::try_from(nodes).unwrap_or(usize::MAX))?;
    let values = float_vec(field(map, "", "values")?, "/values", grid.nodes)?;
    DiscretePotential::new(grid, values)
}

pub fn parse_potential(text: &str) -> Result<DiscretePotential> {
    potential_from_value(&parse_text(text)?)
}

pub fn potential_to_value(u: &DiscretePotential) -> Value {
    json!({ "grid": { "R": u.grid.radius, "N": u.grid.nodes }, "values": u.values })
}

/// Everything needed to repeat a command-line run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunInputs {
    pub command: String,
    pub polytope: Option<PolytopeInput>,
    pub g: Option<WeightFunction>,
    pub a: Option<Vec<f64>>,
    pub m: Option<u32>,
    pub kind: Option<SolitonKind>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub pl: Option<PLConvexFunction>,
    pub u: Option<DiscretePotential>,
}

/// Largest sample count accepted for the inequality suite.
pub const MAX_SAMPLES: usize = 100_000;

impl RunInputs {
    pub fn from_value(v: &Value) -> Result<RunInputs> {
        let map = object(
            v,
            "",
            &["command", "polytope", "g", "a", "m", "kind", "samples", "seed", "tol", "pl", "u"],
        )?;
        let Some(command) = field(map, "", "command")?.as_str() else {
            return err("/command", "expected a string");
        };
        let nested = |key: &str, e: Error| match e {
            Error::Schema { pointer, message } => Error::Schema {
                pointer: format!("/{key}{pointer}"),
                message,
            },
            other => other,
        };
        let mut out = RunInputs {
            command: command.to_string(),
            ..RunInputs::default()
        };
        for (key, v) in map {
            let ptr = format!("/{key}");
            match key.as_str() {
                "polytope" => {
                    out.polytope = Some(PolytopeInput::from_value(v).map_err(|e| nested(key, e))?)
                }
                "g" => out.g = Some(weight_from_value(v).map_err(|e| nested(key, e))?),
                "a" => out.a = Some(float_vec(v, &ptr, MAX_DIM)?),
                "m" => {
                    let m = uint(v, &ptr)?;
                    out.m = Some(u32::try_from(m).map_err(|_| Error::schema(&ptr, "too large"))?);
                }
                "kind" => {
                    out.kind = Some(match v.as_str() {
                        Some("kr") => SolitonKind::Kr,
                        Some("mabuchi") => SolitonKind::Mabuchi,
                        _ => return err(&ptr, "expected \"kr\" or \"mabuchi\""),
                    })
                }
                "samples" => {
                    let s = uint(v, &ptr)?;
                    if s as u128 > MAX_SAMPLES as u128 {
                        return err(&ptr, format!("at most {MAX_SAMPLES} samples"));
                    }
                    out.samples = Some(s as usize);
                }
                "seed" => out.seed = Some(uint(v, &ptr)?),
                "tol" => {
                    let t = float(v, &ptr)?;
                    if t <= 0.0 {
                        return err(&ptr, "tolerance must be positive");
                    }
                    out.tol = Some(t);
                }
                "pl" => out.pl = Some(pl_from_value(v).map_err(|e| nested(key, e))?),
                "u" => out.u = Some(potential_from_value(v).map_err(|e| nested(key, e))?),
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<RunInputs> {
        RunInputs::from_value(&parse_text(text)?)
    }

    /// Canonical form; keys come out sorted.
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), json!(self.command));
        if let Some(p) = &self.polytope {
            map.insert("polytope".into(), p.to_value());
        }
        if let Some(g) = &self.g {
            map.insert("g".into(), weight_to_value(g));
        }
        if let Some(a) = &self.a {
            map.insert("a".into(), json!(a));
        }
        if let Some(m) = self.m {
            map.insert("m".into(), json!(m));
        }
        if let Some(k) = self.kind {
            map.insert("kind".into(), json!(k));
        }
        if let Some(s) = self.samples {
            map.insert("samples".into(), json!(s));
        }
        if let Some(s) = self.seed {
            map.insert("seed".into(), json!(s));
        }
        if let Some(t) = self.tol {
            map.insert("tol".into(), json!(t));
        }
        if let Some(f) = &self.pl {
            map.insert("pl".into(), pl_to_value(f));
        }
        if let Some(u) = &self.u {
            map.insert("u".into(), potential_to_value(u));
        }
        Value::Object(map)
    }
}
