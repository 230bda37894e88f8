//! JSON wire formats. Numbers are written as strings: `p/q` or integers for
//! exact rationals, decimals containing `.` or `e` for floats. On input,
//! plain JSON numbers are accepted as well.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::ap::APFunction;
use crate::bohr::BohrPoint;
use crate::error::{Error, Result};
use crate::exact::{format_float, parse_rational, Real, Scalar, Turns};
use crate::fleischhack::{QInvarianceReport, QMeasure, QVerdict, RPart, RVerdict};
use crate::frequency::{FrequencyModule, Generator};
use crate::hilbert::{GramOperator, UnitarityReport};
use crate::measure::{FSMeasure, InvarianceReport, UniquenessReport, UniquenessVerdict};

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Int(n) => n.to_string(),
            Num::Float(x) => format_float(*x),
            Num::Text(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct GeneratorWire {
    #[serde(default)]
    symbol: Option<String>,
    decimal: String,
    rational_scale: [Num; 2],
}

#[derive(Deserialize)]
struct ModuleWire {
    generators: Vec<GeneratorWire>,
}

#[derive(Deserialize)]
struct TermWire {
    coords: Vec<i64>,
    re: Num,
    #[serde(default)]
    im: Option<Num>,
}

#[derive(Deserialize)]
struct ApWire {
    module: ModuleWire,
    terms: Vec<TermWire>,
}

#[derive(Deserialize)]
struct MeasureWire {
    module: ModuleWire,
    entries: Vec<TermWire>,
}

#[derive(Deserialize)]
struct PointWire {
    angles_over_2pi: Vec<Num>,
}

#[derive(Deserialize)]
struct RPartWire {
    #[serde(default)]
    breakpoints: Vec<f64>,
    #[serde(default)]
    values: Vec<f64>,
    #[serde(default)]
    atoms: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct QMeasureWire {
    #[serde(default)]
    r_part: Option<RPartWire>,
    bohr_part: MeasureWire,
}

fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Json(e.to_string()))
}

fn scalar(re: &Num, im: Option<&Num>) -> Result<Scalar> {
    let im = im.map(Num::text).unwrap_or_else(|| "0".into());
    let s = Scalar::parse_parts(&re.text(), &im)?;
    if !s.to_c64().is_finite() {
        return Err(Error::InvalidNumber(format!("{} {}", re.text(), im)));
    }
    Ok(s)
}

fn module_from_wire(w: &ModuleWire) -> Result<Arc<FrequencyModule>> {
    let gens = w
        .generators
        .iter()
        .map(|g| {
            let num = parse_rational(&g.rational_scale[0].text())?;
            let den = parse_rational(&g.rational_scale[1].text())?;
            if num_traits::Zero::is_zero(&den) {
                return Err(Error::InvalidGenerator("zero denominator".into()));
            }
            Generator::from_parts(g.symbol.clone(), &g.decimal, num / den)
        })
        .collect::<Result<Vec<_>>>()?;
    if gens.is_empty() {
        return Err(Error::InvalidInput("a module needs at least one generator".into()));
    }
    FrequencyModule::new(gens)
}

fn terms_from_wire(
    module: &FrequencyModule,
    terms: &[TermWire],
) -> Result<Vec<(Vec<i64>, Scalar)>> {
    terms
        .iter()
        .map(|t| {
            module.check_dim(&t.coords)?;
            Ok((t.coords.clone(), scalar(&t.re, t.im.as_ref())?))
        })
        .collect()
}

pub fn generator_to_json(g: &Generator) -> Value {
    json!({
        "symbol": g.symbol(),
        "decimal": g.decimal(),
        "rational_scale": [g.scale().numer().to_string(), g.scale().denom().to_string()],
    })
}

pub fn module_to_json(m: &FrequencyModule) -> Value {
    json!({ "generators": m.generators().iter().map(generator_to_json).collect::<Vec<_>>() })
}

pub fn module_from_json(v: &Value) -> Result<Arc<FrequencyModule>> {
    module_from_wire(&decode(v)?)
}

/// `["re", "im"]` strings, exact when the scalar is.
pub fn scalar_strings(s: &Scalar) -> Value {
    let (re, im) = s.format_parts();
    json!([re, im])
}

/// `[re, im]` as JSON numbers.
pub fn complex_pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn term_json(coords: &[i64], s: &Scalar) -> Value {
    let (re, im) = s.format_parts();
    json!({ "coords": coords, "re": re, "im": im })
}

pub fn ap_to_json(f: &APFunction) -> Value {
    json!({
        "module": module_to_json(f.module()),
        "terms": f.terms().map(|(k, v)| term_json(k, v)).collect::<Vec<_>>(),
    })
}

pub fn ap_from_json(v: &Value) -> Result<APFunction> {
    let w: ApWire = decode(v)?;
    let module = module_from_wire(&w.module)?;
    let terms = terms_from_wire(&module, &w.terms)?;
    APFunction::from_terms(&module, terms)
}

pub fn measure_to_json(mu: &FSMeasure) -> Value {
    json!({
        "module": module_to_json(mu.module()),
        "entries": mu.moments().map(|(k, v)| term_json(k, v)).collect::<Vec<_>>(),
    })
}

fn measure_from_wire(w: &MeasureWire) -> Result<FSMeasure> {
    let module = module_from_wire(&w.module)?;
    let entries = terms_from_wire(&module, &w.entries)?;
    FSMeasure::new(&module, entries)
}

pub fn measure_from_json(v: &Value) -> Result<FSMeasure> {
    measure_from_wire(&decode(v)?)
}

pub fn bohr_point_to_json(p: &BohrPoint) -> Value {
    json!({ "angles_over_2pi": p.angles().iter().map(Turns::format).collect::<Vec<_>>() })
}

pub fn bohr_point_from_json(v: &Value, module: &Arc<FrequencyModule>) -> Result<BohrPoint> {
    let w: PointWire = decode(v)?;
    let angles = w
        .angles_over_2pi
        .iter()
        .map(|a| Turns::parse(&a.text()))
        .collect::<Result<Vec<_>>>()?;
    BohrPoint::from_turns(module, angles)
}

pub fn r_part_to_json(r: &RPart) -> Value {
    json!({
        "breakpoints": r.breakpoints(),
        "values": r.values(),
        "atoms": r.atoms().iter().map(|(x, m)| [*x, *m]).collect::<Vec<_>>(),
    })
}

pub fn q_measure_to_json(mu: &QMeasure) -> Value {
    json!({
        "r_part": r_part_to_json(&mu.r_part),
        "bohr_part": measure_to_json(&mu.bohr_part),
    })
}

pub fn q_measure_from_json(v: &Value) -> Result<QMeasure> {
    let w: QMeasureWire = decode(v)?;
    let r_part = match w.r_part {
        None => RPart::zero(),
        Some(r) => RPart::new(
            r.breakpoints,
            r.values,
            r.atoms.into_iter().map(|[x, m]| (x, m)).collect(),
        )?,
    };
    QMeasure::new(r_part, measure_from_wire(&w.bohr_part)?)
}

pub fn matrix_to_json(rows: &[Vec<Scalar>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Array(row.iter().map(|s| complex_pair(s.to_c64())).collect()))
            .collect(),
    )
}

pub fn gram_to_json(g: &GramOperator) -> Value {
    json!({ "basis": g.basis(), "matrix": matrix_to_json(g.entries()) })
}

pub fn real_string(t: &Real) -> String {
    match t {
        Real::Exact(p) => p.to_string(),
        Real::Float(x) => format_float(*x),
    }
}

pub fn uniqueness_to_json(r: &UniquenessReport) -> Value {
    let verdict = match r.verdict {
        UniquenessVerdict::ForcedHaar => "ForcedHaar",
        UniquenessVerdict::Undetermined { .. } => "Undetermined",
    };
    json!({
        "verdict": verdict,
        "surviving_frequencies": r.surviving(),
        "witness_shifts": r.witnesses.iter().map(|w| json!({
            "frequency": w.frequency,
            "shift": real_string(&w.shift),
            "exact": w.exact,
        })).collect::<Vec<_>>(),
    })
}

pub fn invariance_to_json(r: &InvarianceReport) -> Value {
    json!({
        "invariant": r.invariant,
        "max_violation": r.max_violation,
        "worst": r.worst.as_ref().map(|w| json!({
            "frequency": w.frequency,
            "shift": real_string(&w.shift),
            "amount": w.amount,
        })),
    })
}

pub fn unitarity_to_json(r: &UnitarityReport) -> Value {
    json!({
        "unitary": r.unitary,
        "defect": r.defect,
        "worst": r.worst.map(|(i, j)| [i, j]),
        "defect_matrix": matrix_to_json(&r.defect_matrix),
    })
}

pub fn r_verdict_to_json(v: &RVerdict) -> Value {
    match v {
        RVerdict::Invariant { mass } => json!({ "verdict": "Invariant", "mass": mass }),
        RVerdict::Violated {
            interval,
            mass,
            shifted_mass,
        } => json!({
            "verdict": "Violated",
            "interval": [interval.0, interval.1],
            "mass": mass,
            "shifted_mass": shifted_mass,
        }),
    }
}

pub fn q_report_to_json(r: &QInvarianceReport) -> Value {
    let verdict = match r.verdict {
        QVerdict::ForcedStandard => "ForcedStandard",
        QVerdict::Undetermined => "Undetermined",
    };
    let mut bohr = uniqueness_to_json(&r.bohr);
    bohr["invariance"] = invariance_to_json(&r.bohr_invariance);
    json!({
        "verdict": verdict,
        "invariant": r.invariant,
        "r_mass": r.r_mass,
        "r_forced_zero": r.r_forced_zero,
        "r_witness": r.r_witness.as_ref().map(|w| json!({
            "shift": real_string(&w.shift),
            "interval": [w.interval.0, w.interval.1],
            "mass": w.mass,
            "shifted_mass": w.shifted_mass,
        })),
        "bohr": bohr,
        "gram": gram_to_json(&r.gram),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;
    use crate::frequency::Frequency;

    #[test]
    fn module_round_trip() {
        let m = FrequencyModule::new(vec![
            Generator::integer(1).unwrap(),
            Generator::constant("sqrt2", rational(1, 3)).unwrap(),
        ])
        .unwrap();
        let back = module_from_json(&module_to_json(&m)).unwrap();
        assert_eq!(*back, *m);
    }

    #[test]
    fn measure_round_trip_and_lenient_numbers() {
        let m = FrequencyModule::integers();
        let support: Vec<Frequency> = (-2..=2).map(|k| m.frequency(vec![k]).unwrap()).collect();
        let mu = FSMeasure::dirac(&BohrPoint::iota(&Real::Float(0.3), &m), &support).unwrap();
        let back = measure_from_json(&measure_to_json(&mu)).unwrap();
        assert_eq!(back, mu);
        let v = json!({
            "module": {"generators": [{"symbol": null, "decimal": "1", "rational_scale": [1, 1]}]},
            "entries": [
                {"coords": [0], "re": 1},
                {"coords": [1], "re": "1/2", "im": 0},
                {"coords": [-1], "re": 0.5, "im": "0"},
            ],
        });
        let mu = measure_from_json(&v).unwrap();
        assert_eq!(mu.moment(&[1]), Some(&Scalar::rational(rational(1, 2))));
        assert!(matches!(mu.moment(&[-1]), Some(Scalar::Float(_))));
    }

    #[test]
    fn q_measure_round_trip() {
        let m = FrequencyModule::integers();
        let haar = FSMeasure::haar(&m, &[m.zero()]).unwrap();
        let q = QMeasure::new(RPart::hat(0.0, 0.5, 1.0, 1.0).unwrap(), haar).unwrap();
        assert_eq!(q_measure_from_json(&q_measure_to_json(&q)).unwrap(), q);
        let bad = json!({"r_part": {"breakpoints": [0.0, 1.0], "values": [1.0, 1.0]},
                         "bohr_part": measure_to_json(&q.bohr_part)});
        assert_eq!(q_measure_from_json(&bad), Err(Error::InfiniteMass));
    }

    #[test]
    fn bohr_point_round_trip() {
        let m = FrequencyModule::integers();
        let p = BohrPoint::iota(&Real::rational(rational(3, 7)), &m);
        let back = bohr_point_from_json(&bohr_point_to_json(&p), &m).unwrap();
        assert!(back.approx_eq(&p, 0.0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(measure_from_json(&json!({"entries": 3})), Err(Error::Json(_))));
        assert!(ap_from_json(&json!(null)).is_err());
    }
}
