//! Saves a few slides and sections, then runs ranked keyword searches.

use deckforge::deck::{AudienceProfile, Bounds, Element, NewSection, Presentation, Slide};
use deckforge::repository::{Granularity, Repository, SaveValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let repo = Repository::in_memory();
    for (title, body) in [
        ("Working memory", "Capacity limits of working memory"),
        ("Attention", "Media use and attention span"),
        ("Summary", "Memory and attention both matter"),
    ] {
        let slide = Slide::new(Some(title.into()), vec![Element::text(body, Bounds::full())]);
        repo.save(SaveValue::Slide(slide), None)?;
    }
    let p = Presentation::create("Old talk", 600, AudienceProfile::new(4, "peers"))?;
    let (p, sid) = p.add_section(NewSection::titled("Memory basics"))?;
    repo.save(SaveValue::Section(p.section(&sid).unwrap().clone()), Some(p.id.clone()))?;

    for (query, granularity) in [("memory", None), ("memory", Some(Granularity::Section)), ("attention span", None)] {
        println!("{query:?} {granularity:?}");
        for hit in repo.search(query, granularity)? {
            println!("  {} {:<8} {} | {}", hit.score, hit.granularity.as_str(), hit.title, hit.snippet);
        }
    }
    Ok(())
}
