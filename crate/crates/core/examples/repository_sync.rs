//! Saves a slide, reuses it, edits the copy and walks through the four sync
//! decisions.

use deckforge::deck::{AudienceProfile, Bounds, Element, ElementEdit, NewSection, Presentation, Slide};
use deckforge::repository::{Repository, SaveValue, SyncDecision};

fn edit(slide: &Slide, text: &str) -> Slide {
    let id = slide.elements[0].id.clone();
    slide.edit_element(&id, ElementEdit::Content(text.into())).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let repo = Repository::in_memory();
    let original = Slide::new(
        Some("Definition".into()),
        vec![Element::text("Multitasking is doing two things at once.", Bounds::full())],
    );
    let entry = repo.save(SaveValue::Slide(original), None)?;
    let lineage = entry.payload.slides()[0].lineage_ref.clone().unwrap().lineage_id;

    let talk = Presentation::create("New talk", 300, AudienceProfile::new(2, "students"))?;
    let (talk, sid) = talk.add_section(NewSection::titled("Basics"))?;
    let (_talk, copy) = repo.reuse_slide(&lineage, 0, &talk, &sid, None)?;
    println!("fresh copy changed? {}", !repo.detect_changes(&copy)?.is_empty());

    let working = edit(&copy, "Multitasking means switching between tasks.");
    println!("diff: {}", serde_json::to_string(&repo.detect_changes(&working)?)?);

    let reverted = repo.resolve_sync(&lineage, &working, &SyncDecision::IgnoreChanges)?;
    println!("ignore -> {:?}", reverted.elements[0].content);

    let kept = repo.resolve_sync(&lineage, &working, &SyncDecision::KeepBoth)?;
    println!("keep both -> {} versions", repo.lineage(&lineage)?.len());

    let working = edit(&kept, "Multitasking means rapid switching.");
    repo.resolve_sync(&lineage, &working, &SyncDecision::ReplaceContent { targets: vec![0, 1] })?;
    for v in repo.lineage(&lineage)?.versions {
        println!("  v{}: {} (replaced: {})", v.version_index, v.slide.elements[0].content, v.replaced_at.is_some());
    }

    let forked = repo.resolve_sync(&lineage, &edit(&working, "A new idea"), &SyncDecision::SetAsOrigin)?;
    println!("set as origin -> new lineage {}", forked.lineage_ref.unwrap().lineage_id);
    println!("lineages in repository: {}", repo.lineages().len());
    Ok(())
}
