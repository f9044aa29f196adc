//! The instance document: a finite gauged metric instance with its measure,
//! serialized as JSON.
//!
//! Scalars in the document are JSON numbers or strings: `"inf"` encodes
//! `+inf` (JSON has no infinity literal), `"p/q"` encodes an exact rational,
//! and plain numbers are read exactly as decimals in the rational backend or
//! as doubles in the float backend. Saving emits decimal tokens when the
//! value terminates, `p/q` strings otherwise, and 17-significant-digit
//! scientific notation for float-backed values.
//!
//! The document is walked by hand over `serde_json::Value` so that number
//! tokens survive verbatim (the arbitrary-precision representation) and
//! errors can name the offending key.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::density::{Fineness, Tau};
use crate::error::Error;
use crate::extreal::{Alpha, Backend, ExtReal};
use crate::family::GaugedFamily;
use crate::gauge::Gauge;
use crate::measure::AtomicMeasure;
use crate::metric::{FiniteMetricSpace, PointSet};

/// A fully validated instance: space, covering family, gauge, measure, the
/// enlargement scale, and an optional resolution floor marking epsilon-net
/// semantics.
#[derive(Debug, Clone)]
pub struct MetricInstance {
    pub space: FiniteMetricSpace,
    pub family: GaugedFamily,
    pub gauge: Gauge,
    pub measure: AtomicMeasure,
    pub tau: Tau,
    pub resolution: Option<ExtReal>,
}

impl MetricInstance {
    /// The fineness semantics this instance carries: at-resolution when a
    /// floor is declared, exact otherwise.
    pub fn fineness(&self) -> Fineness {
        match &self.resolution {
            Some(h) => Fineness::AtResolution(h.clone()),
            None => Fineness::Exact,
        }
    }

    /// Joined backend of every scalar the instance carries.
    pub fn backend(&self) -> Backend {
        self.family.backend().join(self.measure.backend())
    }

    pub fn parse_point(&self, id: &str) -> Result<usize, Error> {
        self.space
            .index_of(id)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown point id {id:?}")))
    }

    pub fn parse_point_set(&self, ids: &[String]) -> Result<PointSet, Error> {
        let mut members = Vec::with_capacity(ids.len());
        for id in ids {
            members.push(self.parse_point(id)?);
        }
        Ok(PointSet::new(members))
    }

    pub fn point_ids(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|&p| self.space.id(p).to_string()).collect()
    }

    pub fn from_json_str(text: &str, backend: Backend) -> Result<MetricInstance, Error> {
        let value: Value = serde_json::from_str(text)?;
        instance_from_value(&value, backend)
    }

    pub fn to_json_string(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(&instance_to_value(self))?)
    }

    pub fn load(path: &Path, backend: Backend) -> Result<MetricInstance, Error> {
        let text = std::fs::read_to_string(path)?;
        MetricInstance::from_json_str(&text, backend)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Exact rational from a decimal or `p/q` token.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    // Decimal with optional exponent: [-]digits[.digits][e[+-]digits]
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e.trim_start_matches('+')).ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return None;
    }
    let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
        format!("{int_part}0")
    } else {
        int_part.to_string()
    };
    let digits = format!("{int_digits}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num::pow::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num::pow::pow(ten, (-scale) as usize));
    }
    Some(value)
}

/// Read one scalar slot (JSON number or token string) under the backend.
pub fn scalar_from_value(value: &Value, backend: Backend, ctx: &str) -> Result<ExtReal, Error> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => {
            return Err(Error::InvalidInstance(format!(
                "{ctx}: expected a number, \"p/q\", or \"inf\", got {other}"
            )));
        }
    };
    if text == "inf" {
        return Ok(ExtReal::infinity());
    }
    match backend {
        Backend::Float => {
            let x: f64 = if let Some((num, den)) = text.split_once('/') {
                let n: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| bad_scalar(ctx, &text))?;
                let d: f64 = den
                    .trim()
                    .parse()
                    .map_err(|_| bad_scalar(ctx, &text))?;
                n / d
            } else {
                text.parse().map_err(|_| bad_scalar(ctx, &text))?
            };
            ExtReal::from_f64(x)
        }
        Backend::Rational => {
            let r = parse_rational(&text).ok_or_else(|| bad_scalar(ctx, &text))?;
            ExtReal::from_big_rational(r)
        }
    }
}

/// Emit one scalar slot: a JSON number when the token is numeric, a string
/// for `p/q` and `inf`.
pub fn scalar_to_value(value: &ExtReal) -> Value {
    let token = value.to_token();
    if token == "inf" || token.contains('/') {
        Value::String(token)
    } else {
        match serde_json::Number::from_str(&token) {
            Ok(n) => Value::Number(n),
            Err(_) => Value::String(token),
        }
    }
}

fn bad_scalar(ctx: &str, text: &str) -> Error {
    Error::InvalidInstance(format!(
        "{ctx}: cannot parse scalar {text:?} (expected a number, \"p/q\", or \"inf\")"
    ))
}

fn obj<'v>(value: &'v Value, ctx: &str) -> Result<&'v Map<String, Value>, Error> {
    value
        .as_object()
        .ok_or_else(|| Error::InvalidInstance(format!("{ctx}: expected an object")))
}

fn field<'v>(map: &'v Map<String, Value>, key: &str, ctx: &str) -> Result<&'v Value, Error> {
    map.get(key)
        .ok_or_else(|| Error::InvalidInstance(format!("{ctx}: missing key {key:?}")))
}

fn as_str<'v>(value: &'v Value, ctx: &str) -> Result<&'v str, Error> {
    value
        .as_str()
        .ok_or_else(|| Error::InvalidInstance(format!("{ctx}: expected a string")))
}

fn as_array<'v>(value: &'v Value, ctx: &str) -> Result<&'v [Value], Error> {
    value
        .as_array()
        .map(|a| a.as_slice())
        .ok_or_else(|| Error::InvalidInstance(format!("{ctx}: expected an array")))
}

fn id_list(value: &Value, ctx: &str) -> Result<Vec<String>, Error> {
    as_array(value, ctx)?
        .iter()
        .map(|v| as_str(v, ctx).map(|s| s.to_string()))
        .collect()
}

fn instance_from_value(value: &Value, backend: Backend) -> Result<MetricInstance, Error> {
    let root = obj(value, "instance")?;

    // Points: bare id strings or {id, coords?} objects.
    let mut ids = Vec::new();
    let mut coords: Vec<Option<Vec<f64>>> = Vec::new();
    for (k, p) in as_array(field(root, "points", "instance")?, "points")?
        .iter()
        .enumerate()
    {
        let ctx = format!("points[{k}]");
        match p {
            Value::String(id) => {
                ids.push(id.clone());
                coords.push(None);
            }
            Value::Object(map) => {
                ids.push(as_str(field(map, "id", &ctx)?, &ctx)?.to_string());
                match map.get("coords") {
                    Some(c) => {
                        let cs = as_array(c, &ctx)?
                            .iter()
                            .map(|v| {
                                scalar_from_value(v, Backend::Float, &ctx).map(|e| e.to_f64())
                            })
                            .collect::<Result<Vec<f64>, Error>>()?;
                        coords.push(Some(cs));
                    }
                    None => coords.push(None),
                }
            }
            other => {
                return Err(Error::InvalidInstance(format!(
                    "{ctx}: expected an id string or an object, got {other}"
                )));
            }
        }
    }
    let n = ids.len();
    let coords: Option<Vec<Vec<f64>>> = if coords.iter().all(|c| c.is_some()) && n > 0 {
        Some(coords.into_iter().map(|c| c.unwrap()).collect())
    } else if coords.iter().any(|c| c.is_some()) {
        return Err(Error::InvalidInstance(
            "points: either all points carry coords or none do".into(),
        ));
    } else {
        None
    };

    // Metric: "euclidean" or {"matrix": [row-major scalars]}.
    let space = match field(root, "metric", "instance")? {
        Value::String(name) if name == "euclidean" => {
            let coords = coords.clone().ok_or_else(|| {
                Error::InvalidInstance("metric: euclidean requires point coords".into())
            })?;
            FiniteMetricSpace::euclidean(ids.clone(), coords)?
        }
        Value::String(name) => {
            return Err(Error::InvalidInstance(format!(
                "metric: unknown kind {name:?} (expected \"euclidean\" or a matrix object)"
            )));
        }
        Value::Object(map) => {
            let entries = as_array(field(map, "matrix", "metric")?, "metric.matrix")?;
            if entries.len() != n * n {
                return Err(Error::InvalidInstance(format!(
                    "metric.matrix: expected {} row-major entries for {n} points, got {}",
                    n * n,
                    entries.len()
                )));
            }
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let mut row = Vec::with_capacity(n);
                for j in 0..n {
                    row.push(scalar_from_value(
                        &entries[i * n + j],
                        backend,
                        &format!("metric.matrix[{}]", i * n + j),
                    )?);
                }
                rows.push(row);
            }
            let mut space = FiniteMetricSpace::from_matrix(ids.clone(), rows)?;
            if let Some(c) = coords.clone() {
                space = space.with_coords(c);
            }
            space
        }
        other => {
            return Err(Error::InvalidInstance(format!(
                "metric: expected \"euclidean\" or a matrix object, got {other}"
            )));
        }
    };

    let index_of = |id: &str, ctx: &str| -> Result<usize, Error> {
        space
            .index_of(id)
            .ok_or_else(|| Error::InvalidInstance(format!("{ctx}: unknown point id {id:?}")))
    };

    // Gauge: explicit (table from family entries) or diameter-power kinds.
    let gauge_map = obj(field(root, "gauge", "instance")?, "gauge")?;
    let gauge_kind = as_str(field(gauge_map, "type", "gauge")?, "gauge.type")?;
    let read_alpha = || -> Result<Alpha, Error> {
        let scalar = field(gauge_map, "alpha", "gauge")?;
        match backend {
            Backend::Rational => match scalar_from_value(scalar, backend, "gauge.alpha")? {
                ExtReal::Rational(r) if r.is_positive() => Ok(Alpha::Rational(r)),
                _ => Err(Error::InvalidInstance(
                    "gauge.alpha: must be positive".into(),
                )),
            },
            Backend::Float => {
                Alpha::from_f64(scalar_from_value(scalar, backend, "gauge.alpha")?.to_f64())
            }
        }
    };
    let read_c_alpha = || -> Result<ExtReal, Error> {
        match gauge_map.get("c_alpha") {
            Some(s) => scalar_from_value(s, backend, "gauge.c_alpha"),
            None => Ok(ExtReal::one()),
        }
    };
    let diameter_gauge = match gauge_kind {
        "explicit" => None,
        "hausdorff" => Some(Gauge::hausdorff(read_alpha()?, read_c_alpha()?)?),
        "spherical" => Some(Gauge::spherical(read_alpha()?, read_c_alpha()?)?),
        "open-spherical" => Some(Gauge::open_spherical(read_alpha()?, read_c_alpha()?)?),
        other => {
            return Err(Error::InvalidInstance(format!(
                "gauge.type: unknown kind {other:?}"
            )));
        }
    };

    // Family: generator directive or explicit list.
    let (family, gauge) = match (field(root, "family", "instance")?, diameter_gauge) {
        (Value::Object(map), Some(gauge)) if map.contains_key("generate") => {
            let directive = as_str(field(map, "generate", "family")?, "family.generate")?;
            let family = match directive {
                "closed-balls" => GaugedFamily::closed_balls(&space, &gauge, None)?,
                "open-balls" => GaugedFamily::open_balls(&space, &gauge, None)?,
                "all-subsets" => GaugedFamily::all_subsets(&space, &gauge)?,
                other => {
                    return Err(Error::InvalidInstance(format!(
                        "family.generate: unknown directive {other:?}"
                    )));
                }
            };
            (family, gauge)
        }
        (Value::Object(_), None) => {
            return Err(Error::InvalidInstance(
                "family: generated families need a diameter-power gauge; explicit gauges need a listed family"
                    .into(),
            ));
        }
        (Value::Array(entries), maybe_gauge) => {
            let mut sets = Vec::with_capacity(entries.len());
            let mut zetas: Vec<Option<ExtReal>> = Vec::with_capacity(entries.len());
            for (k, entry) in entries.iter().enumerate() {
                let ctx = format!("family[{k}]");
                let map = obj(entry, &ctx)?;
                let members = id_list(field(map, "members", &ctx)?, &ctx)?;
                let mut indices = Vec::with_capacity(members.len());
                for id in &members {
                    indices.push(index_of(id, &ctx)?);
                }
                sets.push(PointSet::new(indices));
                zetas.push(match map.get("zeta") {
                    Some(z) => Some(scalar_from_value(z, backend, &format!("{ctx}.zeta"))?),
                    None => None,
                });
            }
            match maybe_gauge {
                Some(gauge) => {
                    if zetas.iter().any(|z| z.is_some()) {
                        return Err(Error::InvalidInstance(
                            "family: zeta values on members belong to explicit gauges only"
                                .into(),
                        ));
                    }
                    (GaugedFamily::from_sets(&space, sets, &gauge)?, gauge)
                }
                None => {
                    let mut table = BTreeMap::new();
                    for (k, (set, zeta)) in sets.iter().zip(&zetas).enumerate() {
                        let zeta = zeta.clone().ok_or_else(|| {
                            Error::InvalidInstance(format!(
                                "family[{k}]: explicit gauge requires zeta on every member"
                            ))
                        })?;
                        table.insert(set.clone(), zeta);
                    }
                    let gauge = Gauge::explicit(table);
                    (GaugedFamily::from_sets(&space, sets, &gauge)?, gauge)
                }
            }
        }
        (other, _) => {
            return Err(Error::InvalidInstance(format!(
                "family: expected an array or a generate directive, got {other}"
            )));
        }
    };

    // Measure.
    let measure_map = obj(field(root, "measure", "instance")?, "measure")?;
    let measure = match as_str(field(measure_map, "type", "measure")?, "measure.type")? {
        "atomic" => {
            let mass_map = obj(field(measure_map, "mass", "measure")?, "measure.mass")?;
            let mut masses = vec![ExtReal::zero(); n];
            for (id, scalar) in mass_map {
                let p = index_of(id, "measure.mass")?;
                masses[p] = scalar_from_value(scalar, backend, &format!("measure.mass[{id}]"))?;
            }
            AtomicMeasure::atomic(masses)
        }
        "table" => {
            let entries = as_array(field(measure_map, "values", "measure")?, "measure.values")?;
            let mut table = BTreeMap::new();
            for (k, entry) in entries.iter().enumerate() {
                let ctx = format!("measure.values[{k}]");
                let map = obj(entry, &ctx)?;
                let members = id_list(field(map, "members", &ctx)?, &ctx)?;
                let mut indices = Vec::with_capacity(members.len());
                for id in &members {
                    indices.push(index_of(id, &ctx)?);
                }
                let value =
                    scalar_from_value(field(map, "value", &ctx)?, backend, &format!("{ctx}.value"))?;
                table.insert(PointSet::new(indices), value);
            }
            AtomicMeasure::table_oracle(n, table)?
        }
        other => {
            return Err(Error::InvalidInstance(format!(
                "measure.type: unknown kind {other:?}"
            )));
        }
    };

    let tau = match root.get("tau") {
        Some(s) => Tau::new(scalar_from_value(s, backend, "tau")?)?,
        None => Tau::default(),
    };

    let resolution = match root.get("resolution") {
        Some(s) => {
            let h = scalar_from_value(s, backend, "resolution")?;
            if h.is_zero() || h.is_infinite() {
                return Err(Error::InvalidInstance(
                    "resolution: must be finite and positive".into(),
                ));
            }
            Some(h)
        }
        None => None,
    };

    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau,
        resolution,
    })
}

fn instance_to_value(instance: &MetricInstance) -> Value {
    let space = &instance.space;
    let n = space.len();

    let points: Vec<Value> = (0..n)
        .map(|i| match space.coords() {
            Some(coords) => json!({
                "id": space.id(i),
                "coords": coords[i],
            }),
            None => Value::String(space.id(i).to_string()),
        })
        .collect();

    let metric = if space.has_matrix() {
        let mut matrix = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                matrix.push(scalar_to_value(&space.dist(i, j)));
            }
        }
        json!({ "matrix": matrix })
    } else {
        Value::String("euclidean".to_string())
    };

    let explicit = instance.gauge.is_explicit();
    let family: Vec<Value> = instance
        .family
        .iter()
        .map(|m| {
            let members: Vec<String> = m.set.iter().map(|&p| space.id(p).to_string()).collect();
            if explicit {
                json!({ "members": members, "zeta": scalar_to_value(&m.zeta) })
            } else {
                json!({ "members": members })
            }
        })
        .collect();

    let gauge = match &instance.gauge {
        Gauge::Explicit(_) => json!({ "type": "explicit" }),
        Gauge::Hausdorff { alpha, c_alpha } => gauge_value("hausdorff", alpha, c_alpha),
        Gauge::Spherical { alpha, c_alpha } => gauge_value("spherical", alpha, c_alpha),
        Gauge::OpenSpherical { alpha, c_alpha } => gauge_value("open-spherical", alpha, c_alpha),
    };

    let measure = match &instance.measure {
        AtomicMeasure::Atomic { mass } => {
            let mut map = Map::new();
            for i in 0..n {
                map.insert(space.id(i).to_string(), scalar_to_value(&mass[i]));
            }
            json!({ "type": "atomic", "mass": map })
        }
        AtomicMeasure::TableOracle { table, .. } => {
            let values: Vec<Value> = table
                .iter()
                .map(|(set, value)| {
                    let members: Vec<String> =
                        set.iter().map(|&p| space.id(p).to_string()).collect();
                    json!({ "members": members, "value": scalar_to_value(value) })
                })
                .collect();
            json!({ "type": "table", "values": values })
        }
    };

    let mut root = Map::new();
    root.insert("points".into(), Value::Array(points));
    root.insert("metric".into(), metric);
    root.insert("family".into(), Value::Array(family));
    root.insert("gauge".into(), gauge);
    root.insert("measure".into(), measure);
    root.insert("tau".into(), scalar_to_value(instance.tau.value()));
    if let Some(h) = &instance.resolution {
        root.insert("resolution".into(), scalar_to_value(h));
    }
    Value::Object(root)
}

fn gauge_value(kind: &str, alpha: &Alpha, c_alpha: &ExtReal) -> Value {
    let alpha_value = match alpha {
        Alpha::Rational(r) => scalar_to_value(&ExtReal::Rational(r.clone())),
        Alpha::Float(x) => scalar_to_value(&ExtReal::Float(*x)),
    };
    json!({ "type": kind, "alpha": alpha_value, "c_alpha": scalar_to_value(c_alpha) })
}
