use std::path::PathBuf;
use std::process::Command;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use qubopath_cli::service::{router, ServiceConfig};
use serde_json::Value;
use tower::ServiceExt;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

async fn call(
    config: ServiceConfig,
    method: &str,
    uri: &str,
    body: Vec<u8>,
) -> (StatusCode, String) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    let response = router(config).oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post(uri: &str, body: Vec<u8>) -> (StatusCode, String) {
    call(ServiceConfig::default(), "POST", uri, body).await
}

fn parse(body: &str) -> Value {
    serde_json::from_str(body).unwrap()
}

fn cli_stdout(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_qubopath"))
        .args(args)
        .output()
        .unwrap();
    String::from_utf8(out.stdout).unwrap()
}

#[tokio::test]
async fn health_reports_ok() {
    let (status, body) = call(ServiceConfig::default(), "GET", "/api/health", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    let v = parse(&body);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["schema_version"], "1");
}

#[tokio::test]
async fn suggest_reports_thirty_domain_wall_variables_for_two_paths() {
    let (status, body) = post("/api/suggest", read("dpp.json")).await;
    assert_eq!(status, StatusCode::OK);
    let counts = parse(&body)["counts"].as_array().unwrap().clone();
    let dw = counts
        .iter()
        .find(|c| c["scheme"] == "domain_wall")
        .unwrap();
    assert_eq!(dw["total"], 30);
    assert_eq!(dw["auxiliary"], 0);
    assert_eq!(counts[0]["total"], 30);
}

#[tokio::test]
async fn generate_matches_the_cli_byte_for_byte() {
    let input = fixture("sop.json");
    for format in ["poly", "qubo", "qubo-matrix", "ising"] {
        let (status, body) =
            post(&format!("/api/generate?format={format}"), read("sop.json")).await;
        assert_eq!(status, StatusCode::OK);
        let cli = cli_stdout(&[
            "generate",
            "--input",
            input.to_str().unwrap(),
            "--format",
            format,
            "--json",
            "--quiet",
        ]);
        assert_eq!(body, cli, "format {format}");
        let v = parse(&body);
        assert_eq!(v["counts"]["primary"], 25);
        assert_eq!(v["format"], format);
    }
}

#[tokio::test]
async fn generate_from_tsplib_equals_generate_from_json() {
    let (_, from_json) = post("/api/generate", read("tsp.json")).await;
    let (status, from_tsplib) = post("/api/generate?input=tsplib", read("tsp.tsp")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        parse(&from_json)["artifact"],
        parse(&from_tsplib)["artifact"]
    );
}

#[tokio::test]
async fn encoding_query_overrides_the_spec() {
    let (status, body) = post("/api/generate?encoding=binary", read("sop.json")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(parse(&body)["counts"]["primary"], 15);
    let (status, body) = post("/api/generate?encoding=unary", read("sop.json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["error"]["code"], "E_QUERY");
}

#[tokio::test]
async fn malformed_body_is_a_structured_400() {
    let (status, body) = post("/api/generate", b"{\"graph\": ".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v = parse(&body);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["error"]["code"], "E_SYNTAX");
    assert!(!v["error"]["diagnostics"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn semantic_errors_carry_diagnostic_codes() {
    let spec = br#"{
        "graph": {"adjacency": [[0, 1], [1, 0]]},
        "encoding": {"scheme": "one_hot", "max_path_length": 2},
        "constraints": [{"type": "position_is", "path": 1, "position": 7, "vertices": [3]}]
    }"#;
    let (status, body) = post("/api/suggest", spec.to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v = parse(&body);
    assert_eq!(v["error"]["code"], "E_SEMANTIC");
    let codes: Vec<&str> = v["error"]["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["code"].as_str().unwrap())
        .collect();
    assert!(codes.contains(&"E_POSITION_RANGE"), "{codes:?}");
    assert!(codes.contains(&"E_VERTEX_RANGE"), "{codes:?}");
}

#[tokio::test]
async fn oversized_bodies_are_rejected() {
    let config = ServiceConfig {
        body_limit: 64,
        ..ServiceConfig::default()
    };
    let (status, body) = call(config, "POST", "/api/generate", read("sop.json")).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(parse(&body)["error"]["code"], "E_BODY_TOO_LARGE");
}

#[tokio::test]
async fn slow_requests_time_out_with_408() {
    let config = ServiceConfig {
        timeout: Duration::from_millis(1),
        ..ServiceConfig::default()
    };
    let (status, body) = call(config, "POST", "/api/suggest", read("sop.json")).await;
    assert_eq!(status, StatusCode::REQUEST_TIMEOUT);
    assert_eq!(parse(&body)["error"]["code"], "E_TIMEOUT");
}

fn solve_body(spec: &str, solver: &str) -> Vec<u8> {
    let spec = std::fs::read_to_string(fixture(spec)).unwrap();
    format!("{{\"spec\": {spec}, \"solver\": {solver}}}").into_bytes()
}

#[tokio::test]
async fn concurrent_identical_solves_return_identical_bodies() {
    let body = solve_body(
        "sop.json",
        r#"{"method": "anneal", "seed": 3, "steps": 3000}"#,
    );
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let body = body.clone();
            tokio::spawn(async move { post("/api/solve", body).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for h in handles {
        let (status, b) = h.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        bodies.push(b);
    }
    assert!(bodies.iter().all(|b| b == &bodies[0]));
    let v = parse(&bodies[0]);
    assert_eq!(v["method"], "simulated_annealing");
    assert_eq!(v["seed"], 3);
    assert_eq!(
        v["assignment"].as_str().unwrap().len(),
        v["variables"].as_u64().unwrap() as usize
    );
}

#[tokio::test]
async fn solve_matches_the_cli() {
    let (status, body) = post(
        "/api/solve",
        solve_body(
            "sop.json",
            r#"{"method": "anneal", "seed": 1, "steps": 2000}"#,
        ),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let cli = cli_stdout(&[
        "solve",
        "--input",
        fixture("sop.json").to_str().unwrap(),
        "--method",
        "anneal",
        "--seed",
        "1",
        "--steps",
        "2000",
        "--json",
        "--quiet",
    ]);
    assert_eq!(body, cli);
}

#[tokio::test]
async fn solve_rejects_unknown_solver_options() {
    let (status, body) = post(
        "/api/solve",
        solve_body("sop.json", r#"{"temperature": 3}"#),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["error"]["code"], "E_REQUEST");
}

#[tokio::test]
async fn brute_force_over_the_cap_is_a_422() {
    let (status, body) = post(
        "/api/solve",
        solve_body("sop.json", r#"{"method": "brute"}"#),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(parse(&body)["error"]["code"], "E_BRUTE_FORCE_CAP");
}
