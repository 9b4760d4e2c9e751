//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function takes decimal strings (so values are never rounded
//! through JavaScript numbers) and returns a JSON string.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ellclass::quadforms::{self, Discriminant, QuadForm};
use ellclass::scan::ScanOptions;
use ellclass::specialize::{self, SpecStatus, SpecializeOptions};
use ellclass::{Curve, Point};

/// Largest bound accepted by [`scan_primes`]; keeps the page responsive.
pub const MAX_SCAN_BOUND: u32 = 2000;

fn int(name: &str, s: &str) -> Result<BigInt, String> {
    BigInt::from_str(s.trim()).map_err(|_| format!("{name}: not an integer: {s:?}"))
}

fn curve_and_point(a: &str, b: &str, x: &str, y: &str) -> Result<(Curve, Point), String> {
    let curve = Curve::new(int("a", a)?, int("b", b)?).map_err(|e| e.to_string())?;
    let point = Point::parse(x, y).map_err(|e| e.to_string())?;
    if !curve.on_curve(&point) {
        return Err(format!("{point} is not on y² = x³ + {a}x + {b}"));
    }
    Ok((curve, point))
}

fn form_json(f: &QuadForm) -> Value {
    json!([f.a().to_string(), f.b().to_string(), f.c().to_string()])
}

pub fn specialize_json(a: &str, b: &str, x: &str, y: &str, p: &str) -> Result<Value, String> {
    let (curve, point) = curve_and_point(a, b, x, y)?;
    let canonical = curve.canonicalize(&point).map_err(|e| e.to_string())?;
    let result = specialize::specialize_point(
        &curve,
        &canonical,
        &int("p", p)?,
        &SpecializeOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut out = result.to_json();
    if result.status == SpecStatus::Ok {
        out["verdict"] = specialize::class_verdict(&result)
            .map_err(|e| e.to_string())?
            .to_json();
    }
    Ok(out)
}

/// Class numbers and the reduced cycles of a discriminant (capped for display).
pub fn class_group_json(delta: &str) -> Result<Value, String> {
    const MAX_DELTA: u64 = 10_000_000;
    let delta = int("Δ", delta)?;
    if delta > BigInt::from(MAX_DELTA) {
        return Err(format!("Δ above {MAX_DELTA} is too large for the demo"));
    }
    let disc = Discriminant::new(delta).map_err(|e| e.to_string())?;
    let h = quadforms::class_number(&disc).map_err(|e| e.to_string())?;
    let cycles = quadforms::class_cycles(&disc).map_err(|e| e.to_string())?;
    Ok(json!({
        "delta": disc.value().to_string(),
        "h_narrow": h.narrow.to_string(),
        "h_wide": h.wide.to_string(),
        "reduced_form_count": h.reduced_form_count.to_string(),
        "norm_minus_one_unit": h.norm_minus_one_unit,
        "cycles": cycles
            .iter()
            .map(|c| c.iter().map(form_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    }))
}

pub fn scan_json(a: &str, b: &str, x: &str, y: &str, p_max: u32) -> Result<Value, String> {
    if p_max > MAX_SCAN_BOUND {
        return Err(format!(
            "bound above {MAX_SCAN_BOUND} is too slow for the demo"
        ));
    }
    let (curve, point) = curve_and_point(a, b, x, y)?;
    let report = ellclass::scan(&curve, &point, p_max.into(), &ScanOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(report.to_json())
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn specialize(a: &str, b: &str, x: &str, y: &str, p: &str) -> Result<String, JsError> {
    to_js(specialize_json(a, b, x, y, p))
}

#[wasm_bindgen(js_name = classGroup)]
pub fn class_group(delta: &str) -> Result<String, JsError> {
    to_js(class_group_json(delta))
}

#[wasm_bindgen(js_name = scanPrimes)]
pub fn scan_primes(a: &str, b: &str, x: &str, y: &str, p_max: u32) -> Result<String, JsError> {
    to_js(scan_json(a, b, x, y, p_max))
}
