//! Browser bindings for the ghspace toolkit.
//!
//! Three operations back the static demo page in `www/`: analyze a single
//! space (validation, diameter, genericity margin, nu vector), compute the
//! exact Gromov-Hausdorff distance between two spaces with its optimal
//! correspondence, and embed a space into the family of k-point spaces.
//!
//! Inputs are space files in either supported text format (JSON or a plain
//! whitespace matrix); outputs are JSON strings so the page stays free of
//! custom binding glue. Every rational is reported both exactly and as a
//! decimal rendering for display. Errors come back as `{"error": ...}`
//! rather than exceptions.

use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use ghspace::embed::{embed as embed_impl, verify_embedding_with};
use ghspace::io::parse_space_auto;
use ghspace::nu::nu;
use ghspace::rational::Rational;
use ghspace::solver::{gh_distance_exact_with, gh_upper_bound_diam, SolverConfig};
use ghspace::space::{delta, FiniteMetricSpace};

const DISPLAY_DIGITS: u32 = 6;
const SOLVER: SolverConfig = SolverConfig { max_side: 8, parallel: false };
/// Embedding inputs are capped so verification stays interactive
/// (k <= 5, i.e. exact distances between 5-point spaces).
const EMBED_MAX_POINTS: usize = 10;

fn number(value: &Rational) -> serde_json::Value {
    json!({
        "exact": value.to_string(),
        "decimal": value.to_decimal_string(DISPLAY_DIGITS),
    })
}

fn error(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn parse(text: &str) -> Result<FiniteMetricSpace, String> {
    parse_space_auto(text).map_err(error)
}

/// Validation summary, genericity margin and nu vector of one space.
#[wasm_bindgen]
pub fn analyze(space_text: &str) -> String {
    let space = match parse(space_text) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let mut out = json!({
        "n": space.len(),
        "labels": space.labels(),
        "diameter": number(&space.diameter()),
    });
    if space.len() >= 2 {
        let margin = match delta(&space) {
            Ok(m) => m,
            Err(e) => return error(e),
        };
        let vector = match nu(&space) {
            Ok(v) => v,
            Err(e) => return error(e),
        };
        out["delta"] = json!({
            "value": number(&margin.value),
            "witness": serde_json::to_value(&margin.witness).expect("witness serializes"),
        });
        out["generic"] = json!(margin.value.is_positive());
        out["nu"] = json!({
            "coords": vector.coords().iter().map(number).collect::<Vec<_>>(),
            "pairs": vector.pair_order(),
        });
    }
    out.to_string()
}

/// Exact Gromov-Hausdorff distance with the optimal correspondence, plus
/// the diameter upper bound.
#[wasm_bindgen]
pub fn distance(x_text: &str, y_text: &str) -> String {
    let x = match parse(x_text) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let y = match parse(y_text) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let result = match gh_distance_exact_with(&x, &y, &SOLVER) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    json!({
        "distance": number(&result.distance),
        "distortion": number(&result.distortion),
        "optimal_pairs": result.optimal.pairs(),
        "nodes": result.nodes_explored,
        "upper_bound": number(&gh_upper_bound_diam(&x, &y)),
        "labels_x": x.labels(),
        "labels_y": y.labels(),
    })
    .to_string()
}

/// Embeds the space into k-point spaces and, optionally, certifies every
/// pairwise distance with the exact solver.
#[wasm_bindgen]
pub fn embed_space(space_text: &str, verify: bool) -> String {
    let space = match parse(space_text) {
        Ok(s) => s,
        Err(e) => return e,
    };
    if space.len() > EMBED_MAX_POINTS {
        return error(format!(
            "demo caps embedding inputs at {EMBED_MAX_POINTS} points (got {})",
            space.len()
        ));
    }
    let result = match embed_impl(&space) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    let mut out = json!({
        "k": result.k,
        "anchor": serde_json::to_value(&result.anchor.space).expect("space serializes"),
        "anchor_margin": number(&result.anchor.delta_margin),
        "images": result.images.iter()
            .map(|s| serde_json::to_value(s).expect("space serializes"))
            .collect::<Vec<_>>(),
        "map": result.label_map(),
        "padded": result.padded.as_ref()
            .map(|s| serde_json::to_value(s).expect("space serializes")),
    });
    if verify {
        let report = match verify_embedding_with(&space, &result, &SOLVER) {
            Ok(r) => r,
            Err(e) => return error(e),
        };
        out["verify"] = json!({
            "all_pass": report.all_pass,
            "pairs": report.pair_checks.iter().map(|c| json!({
                "i": c.i,
                "j": c.j,
                "expected": number(&c.expected),
                "computed": number(&c.computed),
                "pass": c.pass,
            })).collect::<Vec<_>>(),
        });
    }
    out.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "0 3 4\n3 0 5\n4 5 0\n";

    fn parse_json(text: &str) -> serde_json::Value {
        serde_json::from_str(text).expect("output is JSON")
    }

    #[test]
    fn analyze_reports_margin_and_nu() {
        let out = parse_json(&analyze(TRIANGLE));
        assert_eq!(out["n"], 3);
        assert_eq!(out["diameter"]["exact"], "5");
        assert_eq!(out["delta"]["value"]["exact"], "1");
        assert_eq!(out["generic"], true);
        assert_eq!(out["nu"]["coords"][0]["exact"], "3/2");
        assert_eq!(out["nu"]["coords"][1]["decimal"], "2");
    }

    #[test]
    fn analyze_surfaces_errors_as_json() {
        let out = parse_json(&analyze("0 1 3\n1 0 1\n3 1 0\n"));
        assert!(out["error"].as_str().unwrap().contains("TriangleViolation(0,2,1)"));
        let out = parse_json(&analyze("{ nope"));
        assert!(out["error"].is_string());
    }

    #[test]
    fn distance_between_point_and_segment() {
        let out = parse_json(&distance(r#"{"dist": [["0"]]}"#, "0 1\n1 0\n"));
        assert_eq!(out["distance"]["exact"], "1/2");
        assert_eq!(out["distance"]["decimal"], "0.5");
        assert_eq!(out["optimal_pairs"], json!([[0, 0], [0, 1]]));
    }

    #[test]
    fn embed_round_trips_distances() {
        let out = parse_json(&embed_space("0 1\n1 0\n", true));
        assert_eq!(out["k"], 3);
        assert_eq!(out["images"].as_array().unwrap().len(), 2);
        assert_eq!(out["verify"]["all_pass"], true);
        assert_eq!(out["verify"]["pairs"][0]["computed"]["exact"], "1");
        assert!(out["padded"].is_object());
    }

    #[test]
    fn embed_enforces_the_demo_cap() {
        let n = 11;
        let mut rows = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| if i == j { "0".into() } else { "1".into() })
                .collect();
            rows.push_str(&row.join(" "));
            rows.push('\n');
        }
        let out = parse_json(&embed_space(&rows, false));
        assert!(out["error"].as_str().unwrap().contains("caps"));
    }
}
