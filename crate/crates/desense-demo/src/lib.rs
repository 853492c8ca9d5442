//! Browser bindings for the RDCA desensitization demo.
//!
//! Three operations, each taking and returning JSON strings so the page
//! needs no generated TypeScript:
//!
//! * [`subspace_geometry`] — synthetic 2-D data, the fitted privacy
//!   signal/noise axes, and the desensitized coordinates.
//! * [`tradeoff_at`] — before/after accuracies for one parameter setting.
//! * [`tradeoff_curve`] — the accuracy curves over the utility/privacy
//!   angle sweep.
//!
//! Build with `wasm-pack build --target web crates/desense-demo` and open
//! `crates/desense-demo/www/index.html`.

mod demo;

pub use demo::{GeometryParams, GeometryView, TradeoffCurve, TradeoffParams, TradeoffPoint};

use wasm_bindgen::prelude::*;

fn geometry_json(params_json: &str) -> Result<String, String> {
    let params: GeometryParams =
        serde_json::from_str(params_json).map_err(|e| e.to_string())?;
    let view = demo::subspace_geometry(&params).map_err(|e| e.to_string())?;
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn tradeoff_at_json(params_json: &str) -> Result<String, String> {
    let params: TradeoffParams =
        serde_json::from_str(params_json).map_err(|e| e.to_string())?;
    let point = demo::tradeoff_at(&params).map_err(|e| e.to_string())?;
    serde_json::to_string(&point).map_err(|e| e.to_string())
}

fn tradeoff_curve_json(params_json: &str, steps: usize) -> Result<String, String> {
    let params: TradeoffParams =
        serde_json::from_str(params_json).map_err(|e| e.to_string())?;
    let curve = demo::tradeoff_curve(&params, steps).map_err(|e| e.to_string())?;
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn subspace_geometry(params_json: &str) -> Result<String, JsValue> {
    geometry_json(params_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tradeoff_at(params_json: &str) -> Result<String, JsValue> {
    tradeoff_at_json(params_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tradeoff_curve(params_json: &str, steps: usize) -> Result<String, JsValue> {
    tradeoff_curve_json(params_json, steps).map_err(|e| JsValue::from_str(&e))
}
