//! Builds a short deck and prints its timeline with conflict and overflow flags.

use deckforge::cli::human_report;
use deckforge::constraints::{compute_conflicts, compute_timeline};
use deckforge::deck::{AudienceProfile, Emphasis, NewSection, Presentation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let deck = Presentation::create("Lab meeting", 420, AudienceProfile::new(4, "lab members"))?;
    let (deck, _) = deck.add_section(NewSection::titled("Motivation").duration(60))?;
    let (deck, key) = deck.add_section(
        NewSection::titled("KeyResult")
            .duration(120)
            .emphasis(Emphasis::High),
    )?;
    let (deck, _) = deck.add_section(
        NewSection::titled("Related work")
            .duration(240)
            .emphasis(Emphasis::Low),
    )?;

    let report = compute_conflicts(&deck);
    print!("{}", human_report(&deck, &report));

    for entry in compute_timeline(&deck) {
        println!("{} starts at {}s", entry.section_id, entry.start_s);
    }

    // giving the key result more time clears the conflict and the overflow
    let deck = deck.update_section(
        &key,
        deckforge::deck::SectionPatch {
            duration_s: Some(250),
            ..Default::default()
        },
    )?;
    let deck = deck.update_constraints(deckforge::deck::ConstraintPatch {
        total_duration_s: Some(600),
        ..Default::default()
    })?;
    println!("--- after rebalancing");
    print!("{}", human_report(&deck, &compute_conflicts(&deck)));
    Ok(())
}
