use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};

use super::error::ApiError;
use super::workspace::{check_revision, PresentationView};
use super::AppState;
use crate::constraints::compute_conflicts;
use crate::deck::{
    deserialize, is_asset_hash, serialize, validate_deck, AudienceProfile, Bounds, ConstraintPatch,
    Deck, Element, ElementEdit, ElementId, ElementKind, Emphasis, EntryId, LineageId, NewSection,
    PresentationId, Presentation, SectionId, SectionPatch, Slide, SlideId,
};
use crate::jargon::{detect_jargon, expand_audience_context, JargonError};
use crate::repository::{Granularity, ImportTarget, Imported, SaveValue, SyncDecision};

type ApiResult = Result<Response, ApiError>;

pub fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/presentations", post(create_presentation).get(list_presentations))
        .route("/presentations/{id}", get(get_presentation).patch(patch_presentation))
        .route("/presentations/{id}/document", get(get_document))
        .route("/presentations/{id}/sections", post(add_section))
        .route("/presentations/{id}/section-order", put(reorder_sections))
        .route("/presentations/{id}/conflicts", get(conflicts))
        .route("/documents", post(open_document))
        .route("/sections/{id}", axum::routing::patch(patch_section).delete(delete_section))
        .route("/sections/{id}/slides", post(add_slide))
        .route(
            "/slides/{id}",
            get(get_slide).patch(patch_slide).delete(delete_slide),
        )
        .route("/slides/{id}/move", put(move_slide))
        .route("/slides/{id}/diff", get(slide_diff))
        .route("/slides/{id}/sync", post(sync_slide))
        .route("/slides/{id}/jargon-check", post(jargon_check))
        .route("/slides/{id}/jargon-hide", post(jargon_hide))
        .route("/repository/save", post(save))
        .route("/repository/search", get(search))
        .route("/repository/import", post(import))
        .route("/repository/reuse-slide", post(reuse_slide))
        .route("/repository/entries", get(list_entries))
        .route("/repository/entries/{id}", get(get_entry))
        .route("/repository/lineages/{id}", get(get_lineage))
        .route("/assets", post(put_asset))
        .route("/assets/{hash}", get(get_asset))
}

/// Parses a JSON body; an empty body counts as `{}`.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let bytes: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn reply<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, Json(value)).into_response()
}

/// Distinguishes a missing field from an explicit `null`.
fn double_option<'de, D, T>(d: D) -> Result<Option<Option<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<T>::deserialize(d).map(Some)
}

#[derive(Deserialize)]
struct RevisionOnly {
    revision: Option<u64>,
}

#[derive(Serialize)]
struct WithRevision<T: Serialize> {
    revision: u64,
    #[serde(flatten)]
    value: T,
}

async fn healthz() -> Response {
    reply(StatusCode::OK, &serde_json::json!({ "status": "ok" }))
}

// ---- presentations ----

#[derive(Deserialize)]
struct CreatePresentation {
    title: String,
    total_duration_s: u64,
    audience: AudienceProfile,
    #[serde(default)]
    topic: Option<String>,
}

async fn create_presentation(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreatePresentation = parse(&body)?;
    let mut p = Presentation::create(req.title, req.total_duration_s, req.audience)?;
    p.topic = req.topic;
    let mut sessions = st.sessions.lock();
    let view = sessions.insert(p).view(&st.repo);
    Ok(reply(StatusCode::CREATED, &view))
}

#[derive(Serialize)]
struct PresentationSummary {
    id: PresentationId,
    title: String,
    revision: u64,
}

async fn list_presentations(State(st): State<Arc<AppState>>) -> Response {
    let sessions = st.sessions.lock();
    let mut out: Vec<PresentationSummary> = sessions
        .all()
        .map(|ws| PresentationSummary {
            id: ws.presentation.id.clone(),
            title: ws.presentation.title.clone(),
            revision: ws.revision,
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    reply(StatusCode::OK, &out)
}

async fn get_presentation(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let sessions = st.sessions.lock();
    Ok(reply(StatusCode::OK, &sessions.get(&id.into())?.view(&st.repo)))
}

#[derive(Deserialize)]
struct PatchPresentation {
    revision: Option<u64>,
    title: Option<String>,
    total_duration_s: Option<u64>,
    audience: Option<AudienceProfile>,
    #[serde(default, deserialize_with = "double_option")]
    topic: Option<Option<String>>,
}

async fn patch_presentation(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: PatchPresentation = parse(&body)?;
    let patch = ConstraintPatch {
        title: req.title,
        total_duration_s: req.total_duration_s,
        audience: req.audience,
        topic: req.topic,
    };
    let mut sessions = st.sessions.lock();
    let (ws, ()) = sessions.update(&id.into(), req.revision, |ws| {
        Ok((ws.presentation.update_constraints(patch)?, ()))
    })?;
    Ok(reply(StatusCode::OK, &ws.view(&st.repo)))
}

async fn get_document(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let sessions = st.sessions.lock();
    let ws = sessions.get(&id.into())?;
    let bytes = serialize(&Deck::new(ws.presentation.clone()));
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn open_document(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let deck = deserialize(&body)?;
    let violations = validate_deck(&deck);
    if !violations.is_empty() {
        let details: Vec<_> = violations
            .iter()
            .map(|v| serde_json::json!({ "pointer": v.pointer, "message": v.message }))
            .collect();
        return Err(ApiError::new("invalid_document", "document failed validation")
            .with_details(serde_json::Value::Array(details)));
    }
    let mut sessions = st.sessions.lock();
    if sessions.get(&deck.presentation.id).is_ok() {
        return Err(ApiError::new(
            "duplicate_id",
            format!("presentation `{}` is already open", deck.presentation.id),
        ));
    }
    let view = sessions.insert(deck.presentation).view(&st.repo);
    Ok(reply(StatusCode::CREATED, &view))
}

async fn conflicts(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let sessions = st.sessions.lock();
    let report = compute_conflicts(&sessions.get(&id.into())?.presentation);
    Ok(([(header::CONTENT_TYPE, "application/json")], report.to_json()).into_response())
}

// ---- sections ----

#[derive(Deserialize)]
struct AddSection {
    revision: Option<u64>,
    title: String,
    duration_s: Option<u64>,
    emphasis: Option<Emphasis>,
    position: Option<usize>,
}

#[derive(Serialize)]
struct SectionReply<'a> {
    section: &'a crate::deck::Section,
}

async fn add_section(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: AddSection = parse(&body)?;
    let spec = NewSection {
        title: req.title,
        duration_s: req.duration_s,
        emphasis: req.emphasis,
        position: req.position,
    };
    let mut sessions = st.sessions.lock();
    let (ws, sid) = sessions.update(&id.into(), req.revision, |ws| {
        Ok(ws.presentation.add_section(spec)?)
    })?;
    let section = ws.presentation.section(&sid).expect("just added");
    Ok(reply(
        StatusCode::CREATED,
        &WithRevision { revision: ws.revision, value: SectionReply { section } },
    ))
}

#[derive(Deserialize)]
struct PatchSection {
    revision: Option<u64>,
    title: Option<String>,
    duration_s: Option<u64>,
    emphasis: Option<Emphasis>,
}

async fn patch_section(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: PatchSection = parse(&body)?;
    let sid = SectionId::from(id);
    let patch = SectionPatch {
        title: req.title,
        duration_s: req.duration_s,
        emphasis: req.emphasis,
    };
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_section(&sid)?;
    let (ws, ()) = sessions.update(&pid, req.revision, |ws| {
        Ok((ws.presentation.update_section(&sid, patch)?, ()))
    })?;
    let section = ws.presentation.section(&sid).expect("still present");
    Ok(reply(
        StatusCode::OK,
        &WithRevision { revision: ws.revision, value: SectionReply { section } },
    ))
}

async fn delete_section(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<RevisionOnly>,
) -> ApiResult {
    let sid = SectionId::from(id);
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_section(&sid)?;
    let (ws, ()) = sessions.update(&pid, q.revision, |ws| {
        Ok((ws.presentation.remove_section(&sid)?.0, ()))
    })?;
    Ok(reply(StatusCode::OK, &ws.view(&st.repo)))
}

#[derive(Deserialize)]
struct SectionOrder {
    revision: Option<u64>,
    order: Vec<SectionId>,
}

async fn reorder_sections(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: SectionOrder = parse(&body)?;
    let mut sessions = st.sessions.lock();
    let (ws, ()) = sessions.update(&id.into(), req.revision, |ws| {
        Ok((ws.presentation.reorder_sections(&req.order)?, ()))
    })?;
    Ok(reply(StatusCode::OK, &ws.view(&st.repo)))
}

// ---- slides ----

#[derive(Deserialize)]
struct NewElement {
    kind: ElementKind,
    content: String,
    bounds: Bounds,
}

fn build_element(st: &AppState, e: NewElement) -> Result<Element, ApiError> {
    if e.kind == ElementKind::Image {
        check_asset(st, &e.content)?;
        return Ok(Element::image(e.content, e.bounds));
    }
    Ok(Element::text(e.content, e.bounds))
}

fn check_asset(st: &AppState, hash: &str) -> Result<(), ApiError> {
    let known = is_asset_hash(hash) && st.repo.get_asset(hash)?.is_some();
    if known {
        Ok(())
    } else {
        Err(ApiError::new("unknown_asset", format!("no asset `{hash}`")))
    }
}

#[derive(Deserialize)]
struct AddSlide {
    revision: Option<u64>,
    title: Option<String>,
    #[serde(default)]
    elements: Vec<NewElement>,
    position: Option<usize>,
}

#[derive(Serialize)]
struct SlideReply<'a> {
    slide: &'a Slide,
}

async fn add_slide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: AddSlide = parse(&body)?;
    let sid = SectionId::from(id);
    let elements = req
        .elements
        .into_iter()
        .map(|e| build_element(&st, e))
        .collect::<Result<Vec<_>, _>>()?;
    let slide = Slide::new(req.title, elements);
    let slide_id = slide.id.clone();
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_section(&sid)?;
    let (ws, ()) = sessions.update(&pid, req.revision, |ws| {
        Ok((ws.presentation.add_slide(&sid, slide, req.position)?, ()))
    })?;
    let slide = ws.presentation.slide(&slide_id).expect("just added");
    Ok(reply(
        StatusCode::CREATED,
        &WithRevision { revision: ws.revision, value: SlideReply { slide } },
    ))
}

async fn get_slide(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let slide_id = SlideId::from(id);
    let sessions = st.sessions.lock();
    let ws = sessions.get(&sessions.owner_of_slide(&slide_id)?)?;
    let slide = ws.presentation.slide(&slide_id).expect("indexed");
    Ok(reply(
        StatusCode::OK,
        &WithRevision { revision: ws.revision, value: SlideReply { slide } },
    ))
}

#[derive(Deserialize)]
struct ElementChange {
    id: ElementId,
    content: Option<String>,
    bounds: Option<Bounds>,
}

#[derive(Deserialize)]
struct PatchSlide {
    revision: Option<u64>,
    #[serde(default, deserialize_with = "double_option")]
    title: Option<Option<String>>,
    #[serde(default)]
    edits: Vec<ElementChange>,
    #[serde(default)]
    add: Vec<NewElement>,
    #[serde(default)]
    remove: Vec<ElementId>,
}

async fn patch_slide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: PatchSlide = parse(&body)?;
    let slide_id = SlideId::from(id);
    let added = req
        .add
        .into_iter()
        .map(|e| build_element(&st, e))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_slide(&slide_id)?;
    // image content edits must point at stored assets
    {
        let ws = sessions.get(&pid)?;
        let slide = ws.presentation.slide(&slide_id).expect("indexed");
        for c in &req.edits {
            let is_image = slide.element(&c.id).is_some_and(|e| e.kind == ElementKind::Image);
            if let (true, Some(content)) = (is_image, &c.content) {
                check_asset(&st, content)?;
            }
        }
    }
    let (ws, ()) = sessions.update(&pid, req.revision, |ws| {
        let mut slide = ws.presentation.slide(&slide_id).expect("indexed").clone();
        if let Some(title) = req.title {
            slide = slide.with_title(title);
        }
        for c in req.edits {
            if let Some(content) = c.content {
                slide = slide.edit_element(&c.id, ElementEdit::Content(content))?;
            }
            if let Some(bounds) = c.bounds {
                slide = slide.edit_element(&c.id, ElementEdit::Bounds(bounds))?;
            }
        }
        for e in &req.remove {
            slide = slide.remove_element(e)?;
        }
        for e in added {
            slide = slide.add_element(e)?;
        }
        Ok((ws.presentation.replace_slide(slide)?, ()))
    })?;
    let slide = ws.presentation.slide(&slide_id).expect("still present");
    Ok(reply(
        StatusCode::OK,
        &WithRevision { revision: ws.revision, value: SlideReply { slide } },
    ))
}

async fn delete_slide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<RevisionOnly>,
) -> ApiResult {
    let slide_id = SlideId::from(id);
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_slide(&slide_id)?;
    let (ws, ()) = sessions.update(&pid, q.revision, |ws| {
        Ok((ws.presentation.remove_slide(&slide_id)?.0, ()))
    })?;
    Ok(reply(StatusCode::OK, &ws.view(&st.repo)))
}

#[derive(Deserialize)]
struct MoveSlide {
    revision: Option<u64>,
    section_id: SectionId,
    position: usize,
}

async fn move_slide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: MoveSlide = parse(&body)?;
    let slide_id = SlideId::from(id);
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_slide(&slide_id)?;
    let (ws, ()) = sessions.update(&pid, req.revision, |ws| {
        Ok((ws.presentation.move_slide(&slide_id, &req.section_id, req.position)?, ()))
    })?;
    Ok(reply(StatusCode::OK, &ws.view(&st.repo)))
}

async fn slide_diff(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let slide_id = SlideId::from(id);
    let sessions = st.sessions.lock();
    let ws = sessions.get(&sessions.owner_of_slide(&slide_id)?)?;
    let slide = ws.presentation.slide(&slide_id).expect("indexed");
    Ok(reply(StatusCode::OK, &st.repo.detect_changes(slide)?))
}

fn parse_decision(body: &Bytes) -> Result<(SyncDecision, Option<u64>), ApiError> {
    let value: serde_json::Value = parse(body)?;
    let revision = value.get("revision").and_then(serde_json::Value::as_u64);
    let name = value
        .get("decision")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| ApiError::new("invalid_decision", "`decision` is required"))?;
    let decision = match name {
        "ignore_changes" => SyncDecision::IgnoreChanges,
        "set_as_origin" => SyncDecision::SetAsOrigin,
        "keep_both" => SyncDecision::KeepBoth,
        "replace_content" => {
            let targets = value
                .get("targets")
                .cloned()
                .map(serde_json::from_value::<Vec<usize>>)
                .transpose()
                .map_err(|e| ApiError::new("invalid_decision", format!("`targets`: {e}")))?
                .unwrap_or_default();
            SyncDecision::ReplaceContent { targets }
        }
        other => {
            return Err(ApiError::new(
                "invalid_decision",
                format!("unknown decision `{other}`"),
            ))
        }
    };
    Ok((decision, revision))
}

async fn sync_slide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let (decision, revision) = parse_decision(&body)?;
    let slide_id = SlideId::from(id);
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_slide(&slide_id)?;
    check_revision(sessions.get(&pid)?, revision)?;
    let working = sessions
        .get(&pid)?
        .presentation
        .slide(&slide_id)
        .expect("indexed")
        .clone();
    let lineage_id = working
        .lineage_ref
        .as_ref()
        .map(|r| r.lineage_id.clone())
        .ok_or(crate::repository::RepoError::NoLineage)?;
    let synced = st.repo.resolve_sync(&lineage_id, &working, &decision)?;
    let lineage_id = synced.lineage_ref.as_ref().expect("synced slide has a lineage").lineage_id.clone();
    let (ws, ()) = sessions.update(&pid, None, |ws| Ok((ws.presentation.replace_slide(synced)?, ())))?;
    let slide = ws.presentation.slide(&slide_id).expect("still present");
    Ok(reply(
        StatusCode::OK,
        &serde_json::json!({
            "revision": ws.revision,
            "slide": slide,
            "lineage": st.repo.lineage(&lineage_id)?,
        }),
    ))
}

// ---- jargon ----

#[derive(Deserialize)]
struct JargonCheck {
    presentation_context: Option<String>,
}

async fn jargon_check(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: JargonCheck = parse(&body)?;
    let slide_id = SlideId::from(id);
    let (pid, slide, audience, cached, hidden, topic) = {
        let sessions = st.sessions.lock();
        let pid = sessions.owner_of_slide(&slide_id)?;
        let ws = sessions.get(&pid)?;
        (
            pid,
            ws.presentation.slide(&slide_id).expect("indexed").clone(),
            ws.presentation.audience.clone(),
            ws.audience_context.clone(),
            ws.hidden.clone(),
            ws.presentation.topic.clone(),
        )
    };
    let context_line = req.presentation_context.or(topic);
    let pc = context_line.as_deref();

    let _permit = st
        .provider_slots
        .acquire()
        .await
        .map_err(|_| ApiError::new("internal", "provider pool closed"))?;
    let work = async {
        let ctx = match cached {
            Some(c) => c,
            None => expand_audience_context(st.provider.as_ref(), &audience, pc).await?,
        };
        let terms = detect_jargon(st.provider.as_ref(), &slide, &ctx, &hidden, pc).await?;
        Ok::<_, JargonError>((ctx, terms))
    };
    let (ctx, terms) = tokio::time::timeout(st.provider_timeout, work)
        .await
        .map_err(|_| ApiError::new("provider_error", "jargon provider timed out"))??;

    {
        let mut sessions = st.sessions.lock();
        if let Ok(ws) = sessions.get_mut(&pid) {
            if ws.presentation.audience == audience {
                ws.audience_context = Some(ctx.clone());
            }
        }
    }
    Ok(reply(
        StatusCode::OK,
        &serde_json::json!({ "slide_id": slide_id, "terms": terms, "context": ctx }),
    ))
}

#[derive(Deserialize)]
struct JargonHide {
    term: Option<String>,
    #[serde(default)]
    all: bool,
    #[serde(default)]
    reset: bool,
}

async fn jargon_hide(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let req: JargonHide = parse(&body)?;
    let slide_id = SlideId::from(id);
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_slide(&slide_id)?;
    let ws = sessions.get_mut(&pid)?;
    ws.hidden = match (req.reset, req.all, req.term.as_deref().map(str::trim)) {
        (true, _, _) => ws.hidden.reset(&slide_id),
        (false, true, _) => ws.hidden.hide_all(&slide_id),
        (false, false, Some(t)) if !t.is_empty() => ws.hidden.hide_term(&slide_id, t),
        _ => return Err(ApiError::bad_request("give `term`, `all: true` or `reset: true`")),
    };
    let hidden = ws.hidden.slide(&slide_id).cloned().unwrap_or_default();
    Ok(reply(
        StatusCode::OK,
        &serde_json::json!({ "slide_id": slide_id, "hidden": hidden }),
    ))
}

// ---- repository ----

#[derive(Deserialize)]
struct SaveRequest {
    granularity: Granularity,
    id: String,
    revision: Option<u64>,
}

async fn save(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: SaveRequest = parse(&body)?;
    let mut sessions = st.sessions.lock();
    let (pid, value) = match req.granularity {
        Granularity::Presentation => {
            let pid = PresentationId::from(req.id);
            let p = sessions.get(&pid)?.presentation.clone();
            (pid, SaveValue::Presentation(p))
        }
        Granularity::Section => {
            let sid = SectionId::from(req.id);
            let pid = sessions.owner_of_section(&sid)?;
            let s = sessions.get(&pid)?.presentation.section(&sid).expect("indexed").clone();
            (pid, SaveValue::Section(s))
        }
        Granularity::Slide => {
            let slide_id = SlideId::from(req.id);
            let pid = sessions.owner_of_slide(&slide_id)?;
            let s = sessions.get(&pid)?.presentation.slide(&slide_id).expect("indexed").clone();
            (pid, SaveValue::Slide(s))
        }
    };
    check_revision(sessions.get(&pid)?, req.revision)?;
    let entry = st.repo.save(value, Some(pid.clone()))?;

    // working slides now point at the lineages the save created
    let refs: HashMap<SlideId, _> = entry
        .payload
        .slides()
        .into_iter()
        .map(|s| (s.id.clone(), s.lineage_ref.clone()))
        .collect();
    let (ws, ()) = sessions.update(&pid, None, |ws| {
        let mut next = ws.presentation.clone();
        for section in &mut next.sections {
            for slide in &mut section.slides {
                if let Some(r) = refs.get(&slide.id) {
                    slide.lineage_ref = r.clone();
                }
            }
        }
        Ok((next, ()))
    })?;
    Ok(reply(
        StatusCode::CREATED,
        &serde_json::json!({ "revision": ws.revision, "entry": entry }),
    ))
}

#[derive(Deserialize)]
struct SearchParams {
    q: Option<String>,
    granularity: Option<String>,
}

async fn search(State(st): State<Arc<AppState>>, Query(params): Query<SearchParams>) -> ApiResult {
    let granularity = params
        .granularity
        .as_deref()
        .filter(|g| !g.is_empty())
        .map(str::parse::<Granularity>)
        .transpose()
        .map_err(ApiError::bad_request)?;
    let hits = st.repo.search(params.q.as_deref().unwrap_or(""), granularity)?;
    Ok(reply(StatusCode::OK, &serde_json::json!({ "hits": hits })))
}

#[derive(Deserialize)]
struct ImportRequest {
    entry_id: EntryId,
    presentation_id: Option<PresentationId>,
    position: Option<usize>,
    revision: Option<u64>,
}

#[derive(Serialize)]
struct ImportReply {
    #[serde(flatten)]
    view: PresentationView,
    #[serde(skip_serializing_if = "Option::is_none")]
    section_id: Option<SectionId>,
}

async fn import(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: ImportRequest = parse(&body)?;
    let mut sessions = st.sessions.lock();
    match req.presentation_id {
        None => {
            let Imported::Presentation(p) = st.repo.import(&req.entry_id, ImportTarget::Workspace)?
            else {
                unreachable!("workspace imports yield presentations")
            };
            let view = sessions.insert(p).view(&st.repo);
            Ok(reply(StatusCode::CREATED, &ImportReply { view, section_id: None }))
        }
        Some(pid) => {
            let (ws, section_id) = sessions.update(&pid, req.revision, |ws| {
                let position = req.position.unwrap_or(ws.presentation.sections.len());
                let target = ImportTarget::Into {
                    presentation: &ws.presentation,
                    position,
                };
                match st.repo.import(&req.entry_id, target)? {
                    Imported::Section {
                        presentation,
                        section_id,
                    } => Ok((presentation, section_id)),
                    Imported::Presentation(_) => unreachable!("section imports yield sections"),
                }
            })?;
            let view = ws.view(&st.repo);
            Ok(reply(
                StatusCode::OK,
                &ImportReply {
                    view,
                    section_id: Some(section_id),
                },
            ))
        }
    }
}

#[derive(Deserialize)]
struct ReuseRequest {
    lineage_id: LineageId,
    version_index: usize,
    section_id: SectionId,
    position: Option<usize>,
    revision: Option<u64>,
}

async fn reuse_slide(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: ReuseRequest = parse(&body)?;
    let mut sessions = st.sessions.lock();
    let pid = sessions.owner_of_section(&req.section_id)?;
    let (ws, slide) = sessions.update(&pid, req.revision, |ws| {
        Ok(st.repo.reuse_slide(
            &req.lineage_id,
            req.version_index,
            &ws.presentation,
            &req.section_id,
            req.position,
        )?)
    })?;
    Ok(reply(
        StatusCode::CREATED,
        &WithRevision { revision: ws.revision, value: SlideReply { slide: &slide } },
    ))
}

async fn list_entries(State(st): State<Arc<AppState>>) -> Response {
    let entries: Vec<_> = st
        .repo
        .entries()
        .into_iter()
        .map(|e| {
            serde_json::json!({
                "entry_id": e.entry_id,
                "granularity": e.granularity(),
                "title": e.payload.title(),
                "saved_at": e.saved_at,
            })
        })
        .collect();
    reply(StatusCode::OK, &entries)
}

async fn get_entry(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    Ok(reply(StatusCode::OK, &st.repo.entry(&id.into())?))
}

async fn get_lineage(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    Ok(reply(StatusCode::OK, &st.repo.lineage(&id.into())?))
}

// ---- assets ----

async fn put_asset(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    if body.is_empty() {
        return Err(ApiError::bad_request("asset body is empty"));
    }
    let (hash, new) = st.repo.put_asset(&body)?;
    let status = if new { StatusCode::CREATED } else { StatusCode::OK };
    Ok(reply(status, &serde_json::json!({ "hash": hash })))
}

async fn get_asset(State(st): State<Arc<AppState>>, Path(hash): Path<String>) -> ApiResult {
    match st.repo.get_asset(&hash)? {
        Some(bytes) => Ok(([(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response()),
        None => Err(ApiError::new("unknown_asset", format!("no asset `{hash}`"))),
    }
}
