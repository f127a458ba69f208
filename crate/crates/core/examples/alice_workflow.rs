//! A ten-minute talk for a general audience, assembled partly from an older
//! talk: constraints, sections, reuse, jargon check, sync and save.

use deckforge::cli::human_report;
use deckforge::constraints::compute_conflicts;
use deckforge::deck::{
    AudienceProfile, Bounds, Element, ElementEdit, Emphasis, NewSection, Presentation, SectionPatch,
    Slide,
};
use deckforge::jargon::{detect_jargon, expand_audience_context, HideState, MockProvider};
use deckforge::repository::{Granularity, HitTarget, ImportTarget, Imported, Repository, SaveValue, SyncDecision};

fn slide(title: &str, body: &str) -> Slide {
    Slide::new(Some(title.into()), vec![Element::text(body, Bounds::new(0.1, 0.2, 0.8, 0.6))])
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let repo = Repository::in_memory();

    // an earlier talk to peers
    let prior = Presentation::create("Media multitasking and attention", 900, AudienceProfile::new(4, "psychology researchers"))?;
    let (prior, intro) = prior.add_section(NewSection::titled("Introduction").duration(90).emphasis(Emphasis::Low))?;
    let (prior, results) = prior.add_section(NewSection::titled("Results").duration(300).emphasis(Emphasis::High))?;
    let prior = prior
        .add_slide(&intro, slide("Welcome", "Attention in a connected world"), None)?
        .add_slide(&results, slide("Who multitasks most", "Heavy Media Multitaskers (HMMs) switch tasks more often."), None)?;
    repo.save(SaveValue::Presentation(prior.clone()), None)?;
    let intro_entry = repo.save(SaveValue::Section(prior.section(&intro).unwrap().clone()), Some(prior.id.clone()))?;

    // the new talk: ten minutes, mixed audience
    let audience = AudienceProfile::new(3, "high school students, parents, and community members");
    let mut talk = Presentation::create("Why multitasking feels productive", 600, audience.clone())?;
    let Imported::Section { presentation, section_id } =
        repo.import(&intro_entry.entry_id, ImportTarget::Into { presentation: &talk, position: 0 })?
    else {
        unreachable!()
    };
    talk = presentation.update_section(&section_id, SectionPatch { duration_s: Some(60), emphasis: Some(Emphasis::None), ..Default::default() })?;
    let (t, _) = talk.add_section(NewSection::titled("What is multitasking").duration(120).emphasis(Emphasis::Low))?;
    let (t, illusion) = t.add_section(NewSection::titled("The illusion of productivity").duration(210).emphasis(Emphasis::High))?;
    let (t, _) = t.add_section(NewSection::titled("Daily implications").duration(150).emphasis(Emphasis::Medium))?;
    let (t, _) = t.add_section(NewSection::titled("Conclusion").duration(60))?;
    talk = t;

    // pull a content slide from the old talk
    let hit = repo.search("multitasks", Some(Granularity::Slide))?.remove(0);
    let HitTarget::SlideVersion { lineage_id, version_index } = hit.target else { unreachable!() };
    let (t, reused) = repo.reuse_slide(&lineage_id, version_index, &talk, &illusion, None)?;
    talk = t;
    print!("{}", human_report(&talk, &compute_conflicts(&talk)));

    // jargon check on the reused slide
    let provider = MockProvider::bundled();
    let ctx = expand_audience_context(&provider, &audience, talk.topic.as_deref()).await?;
    for term in detect_jargon(&provider, &reused, &ctx, &HideState::default(), None).await? {
        println!("jargon: {} -> {:?}", term.term, term.alternatives);
    }

    // revise, then fold the change back into the lineage as a new version
    let revised = reused.edit_element(
        &reused.elements[0].id,
        ElementEdit::Content("Frequent media users switch tasks more often.".into()),
    )?;
    println!("changed: {}", !repo.detect_changes(&revised)?.is_empty());
    let synced = repo.resolve_sync(&lineage_id, &revised, &SyncDecision::KeepBoth)?;
    talk = talk.replace_slide(synced)?;
    let saved = repo.save(SaveValue::Presentation(talk), None)?;

    println!("entries: {}, lineage versions: {}", repo.entries().len(), repo.lineage(&lineage_id)?.len());
    println!("saved entry {}", saved.entry_id);
    Ok(())
}
