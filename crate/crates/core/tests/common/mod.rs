#![allow(dead_code)]

use std::sync::Arc;

use deckforge::deck::{AudienceProfile, Bounds, Element, Emphasis, NewSection, Presentation, Slide};
use deckforge::repository::Repository;
use deckforge::service::{serve, AppState, RunningService};
use reqwest::{Method, StatusCode};
use serde_json::Value;

pub const ALICE_AUDIENCE: &str = "high school students, parents, and community members";

pub const HMM_TEXT: &str = "Heavy Media Multitaskers (HMMs) switch tasks more often.";

/// Minimal JSON client for the service.
pub struct Api {
    pub base: String,
    client: reqwest::Client,
}

impl Api {
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into(),
            client: reqwest::Client::new(),
        }
    }

    pub async fn send(&self, method: Method, path: &str, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = self.client.request(method, format!("{}{}", self.base, path));
        if let Some(b) = body {
            req = req.json(&b);
        }
        let resp = req.send().await.expect("request");
        let status = resp.status();
        let text = resp.text().await.expect("body");
        let value = if text.is_empty() {
            Value::Null
        } else {
            serde_json::from_str(&text).unwrap_or(Value::String(text))
        };
        (status, value)
    }

    pub async fn raw(&self, method: Method, path: &str, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
        let resp = self
            .client
            .request(method, format!("{}{}", self.base, path))
            .body(body)
            .send()
            .await
            .expect("request");
        let status = resp.status();
        (status, resp.bytes().await.expect("body").to_vec())
    }

    pub async fn get(&self, path: &str) -> (StatusCode, Value) {
        self.send(Method::GET, path, None).await
    }

    pub async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(Method::POST, path, Some(body)).await
    }

    pub async fn patch(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(Method::PATCH, path, Some(body)).await
    }

    pub async fn put(&self, path: &str, body: Value) -> (StatusCode, Value) {
        self.send(Method::PUT, path, Some(body)).await
    }
}

/// In-memory service on an ephemeral port.
pub async fn start_ephemeral() -> (RunningService, Api) {
    start_with(Arc::new(AppState::ephemeral())).await
}

pub async fn start_with(state: Arc<AppState>) -> (RunningService, Api) {
    let running = serve(state, "127.0.0.1:0").await.expect("bind");
    let api = Api::new(running.url());
    (running, api)
}

pub fn start_with_repo(repo: Repository) -> Arc<AppState> {
    Arc::new(AppState::new(
        Arc::new(repo),
        Arc::new(deckforge::jargon::MockProvider::bundled()),
    ))
}

pub fn text_slide(title: &str, body: &str) -> Slide {
    Slide::new(Some(title.into()), vec![Element::text(body, Bounds::new(0.1, 0.2, 0.8, 0.6))])
}

/// The finished ten-minute deck: five sections filling the budget exactly.
pub fn alice_deck() -> Presentation {
    let mut p = Presentation::create("Why multitasking feels productive", 600, AudienceProfile::new(3, ALICE_AUDIENCE))
        .unwrap();
    p.topic = Some("Why multitasking feels productive".into());
    let sections = [
        ("Introduction", 60, Emphasis::None),
        ("What is multitasking", 120, Emphasis::Low),
        ("The illusion of productivity", 210, Emphasis::High),
        ("Daily implications", 150, Emphasis::Medium),
        ("Conclusion", 60, Emphasis::None),
    ];
    for (title, d, e) in sections {
        let (next, sid) = p
            .add_section(NewSection::titled(title).duration(d).emphasis(e))
            .unwrap();
        p = next
            .add_slide(&sid, text_slide(title, &format!("{title} notes")), None)
            .unwrap();
    }
    let illusion = p.sections[2].id.clone();
    p.add_slide(&illusion, text_slide("Who multitasks most", HMM_TEXT), None)
        .unwrap()
}
