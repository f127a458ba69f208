//! Starts the authoring service on an ephemeral port, drives a few requests
//! and shuts it down. Pass a directory argument to persist the repository.

use deckforge::service::{start, ServiceConfig};
use serde_json::json;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ServiceConfig {
        bind_addr: "127.0.0.1:0".into(),
        store_dir: std::env::args().nth(1).map(Into::into),
        ..ServiceConfig::default()
    };
    let service = start(&config).await?;
    let base = service.url();
    println!("listening on {base}");

    let http = reqwest::Client::new();
    let created: serde_json::Value = http
        .post(format!("{base}/presentations"))
        .json(&json!({
            "title": "Demo", "total_duration_s": 300,
            "audience": { "expertise_level": 2, "description": "new students" }
        }))
        .send()
        .await?
        .json()
        .await?;
    let id = created["presentation"]["id"].as_str().unwrap();
    for (title, emphasis, d) in [("Hook", "high", 60), ("Background", "low", 120)] {
        http.post(format!("{base}/presentations/{id}/sections"))
            .json(&json!({ "title": title, "emphasis": emphasis, "duration_s": d }))
            .send()
            .await?;
    }
    let report = http
        .get(format!("{base}/presentations/{id}/conflicts"))
        .send()
        .await?
        .text()
        .await?;
    println!("{report}");

    service.shutdown().await?;
    Ok(())
}
