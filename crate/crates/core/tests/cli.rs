mod common;

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use deckforge::constraints::{compute_conflicts, compute_overflow};
use deckforge::deck::{
    deserialize, serialize, AudienceProfile, Deck, Emphasis, NewSection, Presentation,
};
use reqwest::Method;

use common::{alice_deck, start_ephemeral, text_slide, HMM_TEXT};

fn deckctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deckctl"))
        .args(args)
        .env_remove("JARGON_API_KEY")
        .env_remove("STORE_DIR")
        .output()
        .expect("run deckctl")
}

fn write_deck(dir: &Path, name: &str, p: &Presentation) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serialize(&Deck::new(p.clone()))).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_deck(dir.path(), "alice.json", &alice_deck());
    let o = deckctl(&["validate", p(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ok\n");

    let mut bad = alice_deck();
    bad.total_duration_s = 0;
    let bad = write_deck(dir.path(), "bad.json", &bad);
    let o = deckctl(&["validate", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("/presentation/total_duration_s"), "{}", stdout(&o));

    let bytes = std::fs::read(&good).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(deckctl(&["validate", p(&truncated)]).status.code(), Some(2));
    assert_eq!(deckctl(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(deckctl(&["no-such-command"]).status.code(), Some(2));
}

fn two_sections() -> Presentation {
    let p = Presentation::create("Pair", 600, AudienceProfile::new(3, "peers")).unwrap();
    let (p, _) = p
        .add_section(NewSection::titled("KeyResult").duration(120).emphasis(Emphasis::High))
        .unwrap();
    p.add_section(NewSection::titled("Background").duration(240).emphasis(Emphasis::Low))
        .unwrap()
        .0
}

#[test]
fn conflicts_human_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_deck(dir.path(), "pair.json", &two_sections());
    let o = deckctl(&["conflicts", p(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("KeyResult: HIGH (r=0.50)"), "{out}");
    assert!(lines[0].ends_with("0s-120s"), "{out}");
    assert!(lines[1].starts_with("Background: none"), "{out}");

    let calm = write_deck(dir.path(), "alice.json", &alice_deck());
    let out = stdout(&deckctl(&["conflicts", p(&calm)]));
    let section_lines: Vec<&str> = out.lines().filter(|l| !l.starts_with("total:")).collect();
    assert_eq!(section_lines.len(), 5);
    assert!(section_lines.iter().all(|l| l.contains(": none")), "{out}");
    assert!(!out.contains("OVERFLOW"));
}

#[test]
fn conflicts_overflow_rows_match_engine() {
    let dir = tempfile::tempdir().unwrap();
    let mut deck = alice_deck();
    deck.total_duration_s = 300;
    let path = write_deck(dir.path(), "over.json", &deck);
    let out = stdout(&deckctl(&["conflicts", p(&path)]));
    let flagged: Vec<bool> = out
        .lines()
        .filter(|l| !l.starts_with("total:"))
        .map(|l| l.ends_with("OVERFLOW"))
        .collect();
    let over = compute_overflow(&deck);
    let want: Vec<bool> = deck.sections.iter().map(|s| over.contains(&s.id)).collect();
    assert_eq!(flagged, want);
    assert_eq!(want, [false, false, true, true, true]);
}

#[tokio::test]
async fn conflicts_json_matches_http_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for deck in [alice_deck(), two_sections()] {
        let path = write_deck(dir.path(), "d.json", &deck);
        let o = deckctl(&["conflicts", p(&path), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));

        let (svc, api) = start_ephemeral().await;
        let (s, _) = api.raw(Method::POST, "/documents", serialize(&Deck::new(deck.clone()))).await;
        assert_eq!(s, 201);
        let (_, body) = api
            .raw(Method::GET, &format!("/presentations/{}/conflicts", deck.id), vec![])
            .await;
        assert_eq!(o.stdout, body);
        assert_eq!(o.stdout, compute_conflicts(&deck).to_json().into_bytes());
        svc.shutdown().await.unwrap();
    }
}

fn hmm_slide_id(deck: &Presentation) -> String {
    deck.slides()
        .find(|s| s.text_contents().any(|t| t == HMM_TEXT))
        .unwrap()
        .id
        .to_string()
}

#[test]
fn jargon_with_bundled_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let deck = alice_deck();
    let path = write_deck(dir.path(), "alice.json", &deck);
    let slide = hmm_slide_id(&deck);
    let o = deckctl(&["jargon", p(&path), "--slide", &slide]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let terms: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(terms[0]["term"], "Heavy Media Multitaskers (HMMs)");
    assert_eq!(
        terms[0]["alternatives"],
        serde_json::json!(["frequent media users", "people who multitask with media"])
    );

    let mut expert = deck.clone();
    expert.audience = AudienceProfile::new(5, "cognitive scientists");
    let path5 = write_deck(dir.path(), "expert.json", &expert);
    let o = deckctl(&["jargon", p(&path5), "--slide", &slide]);
    assert_eq!(stdout(&o).trim(), "[]");

    assert_eq!(deckctl(&["jargon", p(&path), "--slide", "nope"]).status.code(), Some(1));
    assert_eq!(deckctl(&["jargon", p(&path), "--slide", &slide, "--live"]).status.code(), Some(3));
}

#[test]
fn jargon_with_custom_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let deck = alice_deck();
    let path = write_deck(dir.path(), "alice.json", &deck);
    let lex = dir.path().join("lex.json");
    std::fs::write(
        &lex,
        r#"[{"term": "switch tasks", "difficulty": 5, "definition": "d", "alternatives": ["a", "b"]}]"#,
    )
    .unwrap();
    let slide = hmm_slide_id(&deck);
    let o = deckctl(&["jargon", p(&path), "--slide", &slide, "--mock-lexicon", p(&lex)]);
    let terms: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(terms.as_array().unwrap().len(), 1);
    assert_eq!(terms[0]["term"], "switch tasks");

    std::fs::write(&lex, "[oops").unwrap();
    let o = deckctl(&["jargon", p(&path), "--slide", &slide, "--mock-lexicon", p(&lex)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repo_save_search_import() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let mut deck = alice_deck();
    let intro = deck.sections[0].id.clone();
    deck = deck
        .add_slide(&intro, text_slide("Zebrafish welcome", "hello"), None)
        .unwrap();
    let path = write_deck(dir.path(), "alice.json", &deck);

    let o = deckctl(&["repo", "--store", p(&store), "save", p(&path), "--write-back"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let entry = stdout(&o).trim().to_owned();
    assert!(store.join("index.json").exists());
    let rewritten = deserialize(&std::fs::read(&path).unwrap()).unwrap();
    assert!(rewritten.presentation.slides().all(|s| s.lineage_ref.is_some()));

    let o = deckctl(&["repo", "--store", p(&store), "search", "zebrafish"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.contains("Zebrafish welcome"));

    // second save: two entries, two timestamps
    deckctl(&["repo", "--store", p(&store), "save", p(&path)]);
    let list = stdout(&deckctl(&["repo", "--store", p(&store), "list"]));
    let stamps: Vec<&str> = list.lines().map(|l| l.rsplit(' ').next().unwrap()).collect();
    assert_eq!(stamps.len(), 2);
    assert_ne!(stamps[0], stamps[1]);

    let out_file = dir.path().join("copy.json");
    let o = deckctl(&["repo", "--store", p(&store), "import", &entry, "--out", p(&out_file)]);
    assert_eq!(o.status.code(), Some(0));
    let copy = deserialize(&std::fs::read(&out_file).unwrap()).unwrap();
    assert_ne!(copy.presentation.id, deck.id);
    assert_eq!(copy.presentation.sections.len(), 5);

    let o = deckctl(&[
        "repo", "--store", p(&store), "save", p(&path), "--granularity", "section", "--id",
        intro.as_str(),
    ]);
    let section_entry = stdout(&o).trim().to_owned();
    let o = deckctl(&[
        "repo", "--store", p(&store), "import", &section_entry, "--into", p(&out_file), "--position", "0",
    ]);
    let merged = deserialize(&o.stdout).unwrap();
    assert_eq!(merged.presentation.sections.len(), 6);
    assert_eq!(merged.presentation.sections[0].title, "Introduction");

    assert_eq!(deckctl(&["repo", "--store", p(&store), "import", "missing"]).status.code(), Some(1));
    assert_eq!(deckctl(&["repo", "--store", p(&store), "search", "  "]).status.code(), Some(1));
}

#[test]
fn serve_answers_health_and_initializes_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("fresh");
    let mut child = Command::new(env!("CARGO_BIN_EXE_deckctl"))
        .args(["serve", "--bind", "127.0.0.1:0", "--store", p(&store)])
        .env_remove("JARGON_API_KEY")
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let url = line.trim().strip_prefix("listening on ").expect("banner").to_owned();
    let status = reqwest::blocking_get(&format!("{url}/healthz"));
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(status, 200);
    assert!(store.join("index.json").exists());
}

#[test]
fn serve_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("svc.toml");
    std::fs::write(&cfg, "bind_addr = 12\n").unwrap();
    let o = deckctl(&["serve", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert_ne!(deckctl(&["serve", "--config", "/missing.toml"]).status.code(), Some(0));
}

mod reqwest {
    pub use ::reqwest::*;

    /// Status code of a GET, from a throwaway runtime.
    pub fn blocking_get(url: &str) -> u16 {
        tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .unwrap()
            .block_on(async { ::reqwest::get(url).await.unwrap().status().as_u16() })
    }
}
