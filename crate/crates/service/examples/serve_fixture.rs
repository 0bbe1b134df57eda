//! Analyze the bundled talk into a data root, walk through the API in
//! process, then optionally keep serving it.
//!
//! cargo run -p gesturelens-service --example serve_fixture -- [data_root] [--listen 127.0.0.1:8080]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request};
use axum::Router;
use gesturelens_service::cli::{run_analyze, AnalyzeArgs};
use gesturelens_service::{router, Store};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (u16, String) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status().as_u16();
    let bytes = axum::body::to_bytes(response.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8_lossy(&bytes).into_owned())
}

fn short(text: &str) -> String {
    if text.len() > 160 {
        format!("{}... ({} bytes)", &text[..160], text.len())
    } else {
        text.to_string()
    }
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut root = None;
    let mut listen = None;
    while let Some(a) = args.next() {
        match a.as_str() {
            "--listen" => listen = args.next(),
            _ => root = Some(PathBuf::from(a)),
        }
    }
    let temp = tempfile::tempdir()?;
    let root = root.unwrap_or_else(|| temp.path().to_path_buf());

    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/talk30");
    let summary = run_analyze(&AnalyzeArgs {
        pose: fixtures.join("pose.json"),
        transcript: fixtures.join("transcript.json"),
        out: root.join("videos/talk30"),
        config: None,
        phrases: None,
        embeddings: Some(fixtures.join("embeddings.txt")),
        tag_fallback: false,
        seed: None,
        fps: None,
        title: Some("Synthetic talk".into()),
        media: None,
    })?;
    println!("analyzed {} -> {}", summary.video_id, summary.bundle.display());

    let app = router(Arc::new(Store::new(&root)));
    for (method, uri, body) in [
        ("GET", "/videos", None),
        ("GET", "/videos/talk30/search?q=tell", None),
        ("GET", "/videos/talk30/phrases?kinds=SVO", None),
        ("GET", "/videos/talk30/trajectory?start=10&end=10.5", None),
        ("POST", "/videos/talk30/bookmarks", Some(r#"{"kind":"gesture_segment","payload":[0],"note":"first"}"#)),
        ("POST", "/videos/talk30/screenshots", Some(r#"{"timestamp":2.0}"#)),
        ("POST", "/videos/talk30/screenshots", Some(r#"{"timestamp":-1}"#)),
        ("GET", "/config", None),
    ] {
        let (status, text) = call(&app, method, uri, body).await;
        println!("{method} {uri} -> {status}\n  {}", short(&text.replace('\n', " ")));
    }

    if let Some(addr) = listen {
        let listener = tokio::net::TcpListener::bind(&addr).await?;
        println!("serving {} on http://{addr}", root.display());
        axum::serve(listener, app).await?;
    }
    Ok(())
}
