//! Browser bindings for the demo page in `www/`.
//!
//! Each binding takes an instance document as JSON text and returns a JSON
//! string; the plain functions below do the work so they can be tested natively.

use conetrans::instance::{load_instance, Instance};
use conetrans::oracle::{gen_ordered, gen_unordered, ConeKind, GenSpec};
use conetrans::paving::compute_paving;
use conetrans::polar::{is_polar, PairSet};
use conetrans::transport::{check_order, OrderVerdict};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<Instance, String> {
    load_instance(text).map_err(|e| e.to_string())
}

fn labels(inst: &Instance, ix: &[usize]) -> Vec<String> {
    ix.iter().map(|&j| inst.label(j).to_string()).collect()
}

pub fn order(text: &str) -> Result<Value, String> {
    let inst = parse(text)?;
    Ok(match check_order(&inst) {
        OrderVerdict::Ordered(plan) => json!({ "ordered": true, "plan": plan.to_document(&inst) }),
        OrderVerdict::NotOrdered(w) => json!({ "ordered": false, "witness": w }),
    })
}

/// Components with the first coordinate of each support point, for drawing.
pub fn paving(text: &str) -> Result<Value, String> {
    let inst = parse(text)?;
    let paving = compute_paving(&inst).map_err(|e| e.to_string())?;
    let xs = |ix: &[usize]| -> Vec<String> {
        match inst.coords() {
            Some(c) => ix.iter().map(|&j| c[j][0].to_string()).collect(),
            None => labels(&inst, ix),
        }
    };
    let comps: Vec<Value> = paving
        .components
        .iter()
        .map(|c| json!({ "members": labels(&inst, &c.members), "support": labels(&inst, &c.support), "x": xs(&c.support), "dim": c.dim }))
        .collect();
    Ok(json!({ "components": comps }))
}

pub fn polar(text: &str, source: &str, target: &str) -> Result<Value, String> {
    let inst = parse(text)?;
    let u = PairSet::from_labels(&inst, &[(source.to_string(), target.to_string())]).map_err(|e| e.to_string())?;
    let v = is_polar(&inst, &u, true).map_err(|e| e.to_string())?;
    Ok(serde_json::to_value(v.to_document(&inst)).expect("documents serialize"))
}

pub fn generate(seed: u64, n: usize, unordered: bool) -> Result<Value, String> {
    let spec = GenSpec {
        seed,
        n: n.clamp(1, 8),
        d: 1,
        cone: ConeKind::Martingale,
        splits: 3,
    };
    let inst = if unordered {
        gen_unordered(&spec).map_err(|e| e.to_string())?
    } else {
        gen_ordered(&spec).instance
    };
    Ok(serde_json::to_value(inst.to_document()).expect("documents serialize"))
}

fn finish(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = checkOrder)]
pub fn check_order_js(instance: &str) -> Result<String, JsError> {
    finish(order(instance))
}

#[wasm_bindgen(js_name = paving)]
pub fn paving_js(instance: &str) -> Result<String, JsError> {
    finish(paving(instance))
}

#[wasm_bindgen(js_name = polar)]
pub fn polar_js(instance: &str, source: &str, target: &str) -> Result<String, JsError> {
    finish(polar(instance, source, target))
}

#[wasm_bindgen(js_name = generate)]
pub fn generate_js(seed: u32, n: u32, unordered: bool) -> Result<String, JsError> {
    finish(generate(u64::from(seed), n as usize, unordered))
}
