mod common;

use std::sync::Arc;

use deckforge::constraints::compute_conflicts;
use deckforge::deck::{deserialize, serialize, Deck};
use deckforge::repository::{sha256_hex, FileStore, Repository};
use deckforge::service::{start, AppState, ServiceConfig, StartupError};
use reqwest::Method;
use serde_json::{json, Value};

use common::{alice_deck, start_ephemeral, start_with, Api};

async fn create(api: &Api, total: u64) -> String {
    let (s, v) = api
        .post(
            "/presentations",
            json!({ "title": "Talk", "total_duration_s": total,
                    "audience": { "expertise_level": 2, "description": "students" } }),
        )
        .await;
    assert_eq!(s, 201, "{v}");
    assert_eq!(v["revision"], 1);
    v["presentation"]["id"].as_str().unwrap().to_owned()
}

async fn section(api: &Api, pid: &str, title: &str, emphasis: &str, d: u64) -> String {
    let (s, v) = api
        .post(
            &format!("/presentations/{pid}/sections"),
            json!({ "title": title, "emphasis": emphasis, "duration_s": d }),
        )
        .await;
    assert_eq!(s, 201, "{v}");
    v["section"]["id"].as_str().unwrap().to_owned()
}

async fn slide(api: &Api, sid: &str, body: &str) -> Value {
    let (s, v) = api
        .post(
            &format!("/sections/{sid}/slides"),
            json!({ "title": "S", "elements": [{ "kind": "text", "content": body,
                    "bounds": { "x": 0.0, "y": 0.0, "w": 1.0, "h": 1.0 } }] }),
        )
        .await;
    assert_eq!(s, 201, "{v}");
    v["slide"].clone()
}

#[tokio::test]
async fn health_and_unknown_routes() {
    let (svc, api) = start_ephemeral().await;
    let (s, v) = api.get("/healthz").await;
    assert_eq!((s.as_u16(), v["status"].as_str()), (200, Some("ok")));
    let (s, v) = api.get("/nope").await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("not_found")));
    let (s, v) = api.send(Method::DELETE, "/healthz", None).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (405, Some("method_not_allowed")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn validation_errors_have_stable_codes() {
    let (svc, api) = start_ephemeral().await;
    let (s, v) = api
        .post(
            "/presentations",
            json!({ "title": "x", "total_duration_s": 0, "audience": { "expertise_level": 3, "description": "a" } }),
        )
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_duration")));
    let (s, v) = api
        .post(
            "/presentations",
            json!({ "title": "x", "total_duration_s": 60, "audience": { "expertise_level": 6, "description": "a" } }),
        )
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_audience")));
    let (s, body) = api.raw(Method::POST, "/presentations", b"{not json".to_vec()).await;
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("bad_request")));

    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "low", 60).await;
    let (s, v) = api.put(&format!("/presentations/{pid}/section-order"), json!({ "order": [a, a] })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("not_a_permutation")));
    let (s, v) = api.patch("/sections/missing", json!({ "duration_s": 10 })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_section")));
    let (s, v) = api.patch(&format!("/sections/{a}"), json!({ "duration_s": 0 })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_duration")));
    let (s, v) = api
        .post(
            &format!("/sections/{a}/slides"),
            json!({ "elements": [{ "kind": "text", "content": "t", "bounds": { "x": 0.5, "y": 0.0, "w": 0.9, "h": 0.5 } }] }),
        )
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_bounds")));
    let (s, v) = api
        .post(
            &format!("/sections/{a}/slides"),
            json!({ "position": 3, "elements": [] }),
        )
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("position_out_of_range")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn stale_revision_is_rejected_and_state_kept() {
    let (svc, api) = start_ephemeral().await;
    let pid = create(&api, 600).await;
    let (s, v) = api.patch(&format!("/presentations/{pid}"), json!({ "revision": 1, "title": "New" })).await;
    assert_eq!(s, 200);
    assert_eq!(v["revision"], 2);
    let (s, v) = api.patch(&format!("/presentations/{pid}"), json!({ "revision": 1, "title": "Lost" })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (409, Some("revision_conflict")));
    assert_eq!(v["details"]["current_revision"], 2);
    let (_, v) = api.get(&format!("/presentations/{pid}")).await;
    assert_eq!(v["presentation"]["title"], "New");

    // topic: absent keeps, null clears
    api.patch(&format!("/presentations/{pid}"), json!({ "topic": "focus" })).await;
    let (_, v) = api.patch(&format!("/presentations/{pid}"), json!({ "title": "T" })).await;
    assert_eq!(v["presentation"]["topic"], "focus");
    let (_, v) = api.patch(&format!("/presentations/{pid}"), json!({ "topic": null })).await;
    assert_eq!(v["presentation"]["topic"], Value::Null);
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn concurrent_edits_serialize() {
    let (svc, api) = start_ephemeral().await;
    let pid = create(&api, 6000).await;
    let api = Arc::new(api);
    let mut tasks = Vec::new();
    for i in 0..16 {
        let api = api.clone();
        let pid = pid.clone();
        tasks.push(tokio::spawn(async move {
            section(&api, &pid, &format!("S{i}"), "low", 60).await
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    let (_, v) = api.get(&format!("/presentations/{pid}")).await;
    assert_eq!(v["presentation"]["sections"].as_array().unwrap().len(), 16);
    assert_eq!(v["revision"], 17);
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn conflicts_body_is_the_engine_report() {
    let (svc, api) = start_ephemeral().await;
    let deck = Deck::new(alice_deck());
    let (s, v) = api.raw(Method::POST, "/documents", serialize(&deck)).await;
    assert_eq!(s, 201, "{}", String::from_utf8_lossy(&v));
    let pid = deck.presentation.id.to_string();
    let (_, body) = api.raw(Method::GET, &format!("/presentations/{pid}/conflicts"), vec![]).await;
    assert_eq!(String::from_utf8(body).unwrap(), compute_conflicts(&deck.presentation).to_json());

    // the document endpoint returns the same bytes the file format uses
    let (_, doc) = api.raw(Method::GET, &format!("/presentations/{pid}/document"), vec![]).await;
    assert_eq!(doc, serialize(&deck));
    assert_eq!(deserialize(&doc).unwrap(), deck);

    let (s, v) = api.raw(Method::POST, "/documents", serialize(&deck)).await;
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!((s.as_u16(), v["code"].as_str()), (409, Some("duplicate_id")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn invalid_documents_list_pointers() {
    let (svc, api) = start_ephemeral().await;
    let mut deck = Deck::new(alice_deck());
    deck.presentation.sections[1].duration_s = 0;
    let (s, body) = api.raw(Method::POST, "/documents", serialize(&deck)).await;
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_document")));
    assert_eq!(v["details"][0]["pointer"], "/presentation/sections/1/duration_s");

    let (s, body) = api.raw(Method::POST, "/documents", b"{\"schema_version\": 9}".to_vec()).await;
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("unsupported_schema_version")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn slide_editing_and_moves() {
    let (svc, api) = start_ephemeral().await;
    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "high", 60).await;
    let b = section(&api, &pid, "B", "low", 60).await;
    let s1 = slide(&api, &a, "one").await;
    let sid = s1["id"].as_str().unwrap();
    let eid = s1["elements"][0]["id"].as_str().unwrap();

    let (s, v) = api
        .patch(
            &format!("/slides/{sid}"),
            json!({ "title": null, "edits": [{ "id": eid, "content": "uno", "bounds": { "x": 0.1, "y": 0.1, "w": 0.5, "h": 0.5 } }] }),
        )
        .await;
    assert_eq!(s, 200, "{v}");
    assert_eq!(v["slide"]["title"], Value::Null);
    assert_eq!(v["slide"]["elements"][0]["content"], "uno");
    let (s, v) = api.patch(&format!("/slides/{sid}"), json!({ "edits": [{ "id": "ghost", "content": "x" }] })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_element")));

    let (s, v) = api.put(&format!("/slides/{sid}/move"), json!({ "section_id": b, "position": 0 })).await;
    assert_eq!(s, 200, "{v}");
    assert_eq!(v["presentation"]["sections"][1]["slides"][0]["id"], sid);
    assert!(v["presentation"]["sections"][0]["slides"].as_array().unwrap().is_empty());
    let (s, v) = api.put(&format!("/slides/{sid}/move"), json!({ "section_id": a, "position": 5 })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("position_out_of_range")));

    let (s, v) = api.put(&format!("/presentations/{pid}/section-order"), json!({ "order": [b, a] })).await;
    assert_eq!(s, 200);
    assert_eq!(v["presentation"]["sections"][0]["title"], "B");

    let (s, _) = api.send(Method::DELETE, &format!("/slides/{sid}"), None).await;
    assert_eq!(s, 200);
    let (s, v) = api.get(&format!("/slides/{sid}")).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_slide")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn sync_endpoint_decisions() {
    let (svc, api) = start_ephemeral().await;
    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "low", 60).await;
    let s1 = slide(&api, &a, "original").await;
    let sid = s1["id"].as_str().unwrap().to_owned();
    let eid = s1["elements"][0]["id"].as_str().unwrap().to_owned();

    // not saved yet
    let (s, v) = api.post(&format!("/slides/{sid}/sync"), json!({ "decision": "keep_both" })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (409, Some("no_lineage")));

    let (s, _) = api.post("/repository/save", json!({ "granularity": "slide", "id": sid })).await;
    assert_eq!(s, 201);
    let (_, v) = api.get(&format!("/slides/{sid}")).await;
    let lineage = v["slide"]["lineage_ref"]["lineage_id"].as_str().unwrap().to_owned();

    let edit = |text: &'static str| {
        let api = &api;
        let sid = sid.clone();
        let eid = eid.clone();
        async move {
            api.patch(&format!("/slides/{sid}"), json!({ "edits": [{ "id": eid, "content": text }] }))
                .await
        }
    };

    let (s, v) = api.post(&format!("/slides/{sid}/sync"), json!({ "decision": "merge_everything" })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("invalid_decision")));

    edit("changed").await;
    let (s, v) = api.post(&format!("/slides/{sid}/sync"), json!({ "decision": "ignore_changes" })).await;
    assert_eq!(s, 200, "{v}");
    assert_eq!(v["slide"]["elements"][0]["content"], "original");
    assert_eq!(v["lineage"]["versions"].as_array().unwrap().len(), 1);

    edit("second").await;
    let (_, v) = api.post(&format!("/slides/{sid}/sync"), json!({ "decision": "keep_both" })).await;
    assert_eq!(v["lineage"]["versions"].as_array().unwrap().len(), 2);
    assert_eq!(v["slide"]["lineage_ref"]["version_index"], 1);

    edit("third").await;
    let (s, v) = api
        .post(&format!("/slides/{sid}/sync"), json!({ "decision": "replace_content", "targets": [0] }))
        .await;
    assert_eq!(s, 200, "{v}");
    let versions = v["lineage"]["versions"].as_array().unwrap();
    assert_eq!(versions[0]["slide"]["elements"][0]["content"], "third");
    assert!(versions[0]["replaced_at"].is_string());
    assert_eq!(versions[1]["slide"]["elements"][0]["content"], "second");
    let (s, v) = api
        .post(&format!("/slides/{sid}/sync"), json!({ "decision": "replace_content", "targets": [7] }))
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_version")));

    edit("fourth").await;
    let (_, v) = api.post(&format!("/slides/{sid}/sync"), json!({ "decision": "set_as_origin" })).await;
    assert_ne!(v["slide"]["lineage_ref"]["lineage_id"], lineage);
    let (_, old) = api.get(&format!("/repository/lineages/{lineage}")).await;
    assert_eq!(old["versions"].as_array().unwrap().len(), 2);
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn repository_endpoint_errors() {
    let (svc, api) = start_ephemeral().await;
    let (s, v) = api.get("/repository/search?q=").await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("empty_query")));
    let (s, v) = api.get("/repository/search?q=x&granularity=chapter").await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("bad_request")));
    let (s, v) = api.get("/repository/entries/none").await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_entry")));
    let (s, v) = api.post("/repository/import", json!({ "entry_id": "none" })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_entry")));

    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "Intro", "low", 60).await;
    let (_, saved) = api.post("/repository/save", json!({ "granularity": "section", "id": a })).await;
    let entry = saved["entry"]["entry_id"].clone();
    // a section cannot become a workspace
    let (s, v) = api.post("/repository/import", json!({ "entry_id": entry })).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("granularity_mismatch")));
    let (s, v) = api
        .post(
            "/repository/reuse-slide",
            json!({ "lineage_id": "nope", "version_index": 0, "section_id": a }),
        )
        .await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_lineage")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn jargon_hide_and_errors() {
    let (svc, api) = start_ephemeral().await;
    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "low", 60).await;
    let s1 = slide(&api, &a, "Our meta-analysis shows cognitive load rises.").await;
    let sid = s1["id"].as_str().unwrap();

    let (s, v) = api.post(&format!("/slides/{sid}/jargon-check"), json!({})).await;
    assert_eq!(s, 200, "{v}");
    let terms: Vec<&str> = v["terms"].as_array().unwrap().iter().map(|t| t["term"].as_str().unwrap()).collect();
    assert_eq!(terms, ["meta-analysis", "cognitive load"]);
    assert_eq!(v["context"]["original_expertise_level"], 2);

    let (_, h) = api.post(&format!("/slides/{sid}/jargon-hide"), json!({ "term": "Cognitive Load" })).await;
    assert_eq!(h["hidden"]["terms"], json!(["cognitive load"]));
    let (_, v) = api.post(&format!("/slides/{sid}/jargon-check"), json!({})).await;
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
    api.post(&format!("/slides/{sid}/jargon-hide"), json!({ "all": true })).await;
    let (_, v) = api.post(&format!("/slides/{sid}/jargon-check"), json!({})).await;
    assert_eq!(v["terms"], json!([]));
    api.post(&format!("/slides/{sid}/jargon-hide"), json!({ "reset": true })).await;
    let (_, v) = api.post(&format!("/slides/{sid}/jargon-check"), json!({})).await;
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);

    let (s, v) = api.post(&format!("/slides/{sid}/jargon-hide"), json!({})).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("bad_request")));

    let (_, empty) = api.post(&format!("/sections/{a}/slides"), json!({ "elements": [] })).await;
    let eid = empty["slide"]["id"].as_str().unwrap();
    let (s, v) = api.post(&format!("/slides/{eid}/jargon-check"), json!({})).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (400, Some("empty_slide")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn failing_provider_maps_to_provider_error() {
    // a live provider pointed at a closed port
    let cfg = ServiceConfig::from_toml(
        "bind_addr = \"127.0.0.1:0\"\n[jargon]\napi_key = \"k\"\napi_url = \"http://127.0.0.1:9/v1\"\ntimeout_s = 2\nretries = 0\n",
    )
    .unwrap();
    let svc = start(&cfg).await.unwrap();
    let api = Api::new(svc.url());
    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "low", 60).await;
    let s1 = slide(&api, &a, "anything").await;
    let (s, v) = api.post(&format!("/slides/{}/jargon-check", s1["id"].as_str().unwrap()), json!({})).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (502, Some("provider_error")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn assets_are_content_addressed() {
    let (svc, api) = start_ephemeral().await;
    let png = vec![0x89, b'P', b'N', b'G', 1, 2, 3];
    let (s, v) = api.raw(Method::POST, "/assets", png.clone()).await;
    let v: Value = serde_json::from_slice(&v).unwrap();
    assert_eq!(s, 201);
    let hash = v["hash"].as_str().unwrap().to_owned();
    assert_eq!(hash, sha256_hex(&png));
    let (s, _) = api.raw(Method::POST, "/assets", png.clone()).await;
    assert_eq!(s, 200);
    let (s, bytes) = api.raw(Method::GET, &format!("/assets/{hash}"), vec![]).await;
    assert_eq!((s.as_u16(), bytes), (200, png));
    let (s, _) = api.raw(Method::GET, &format!("/assets/{}", "0".repeat(64)), vec![]).await;
    assert_eq!(s, 404);

    let pid = create(&api, 600).await;
    let a = section(&api, &pid, "A", "low", 60).await;
    let image = |content: &str| {
        json!({ "elements": [{ "kind": "image", "content": content, "bounds": { "x": 0.0, "y": 0.0, "w": 0.5, "h": 0.5 } }] })
    };
    let (s, _) = api.post(&format!("/sections/{a}/slides"), image(&hash)).await;
    assert_eq!(s, 201);
    let (s, v) = api.post(&format!("/sections/{a}/slides"), image(&"f".repeat(64))).await;
    assert_eq!((s.as_u16(), v["code"].as_str()), (404, Some("unknown_asset")));
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn file_store_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let entry_id = {
        let repo = Repository::open(FileStore::open(dir.path()).unwrap()).unwrap();
        let (svc, api) = start_with(common::start_with_repo(repo)).await;
        let pid = create(&api, 600).await;
        let a = section(&api, &pid, "Persistent", "low", 60).await;
        slide(&api, &a, "kept across restarts").await;
        let (_, v) = api.post("/repository/save", json!({ "granularity": "presentation", "id": pid })).await;
        svc.shutdown().await.unwrap();
        v["entry"]["entry_id"].as_str().unwrap().to_owned()
    };
    let cfg = ServiceConfig {
        bind_addr: "127.0.0.1:0".into(),
        store_dir: Some(dir.path().to_owned()),
        ..ServiceConfig::default()
    };
    let svc = start(&cfg).await.unwrap();
    let api = Api::new(svc.url());
    let (s, v) = api.get("/repository/search?q=restarts").await;
    assert_eq!(s, 200);
    assert_eq!(v["hits"].as_array().unwrap().len(), 1);
    let (s, v) = api.post("/repository/import", json!({ "entry_id": entry_id })).await;
    assert_eq!(s, 201, "{v}");
    assert_eq!(v["presentation"]["sections"][0]["title"], "Persistent");
    svc.shutdown().await.unwrap();
}

#[tokio::test]
async fn corrupt_store_fails_startup() {
    let dir = tempfile::tempdir().unwrap();
    FileStore::open(dir.path()).unwrap();
    std::fs::write(dir.path().join("index.json"), "{ broken").unwrap();
    let cfg = ServiceConfig {
        bind_addr: "127.0.0.1:0".into(),
        store_dir: Some(dir.path().to_owned()),
        ..ServiceConfig::default()
    };
    assert!(matches!(start(&cfg).await, Err(StartupError::Store(_))));
}

#[tokio::test]
async fn state_outlives_one_connection() {
    let state = Arc::new(AppState::ephemeral());
    let (svc, api) = start_with(state.clone()).await;
    let pid = create(&api, 600).await;
    assert!(state.sessions.lock().get(&pid.as_str().into()).is_ok());
    svc.shutdown().await.unwrap();
}
