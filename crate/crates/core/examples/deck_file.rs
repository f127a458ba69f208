//! Writes a deck to the JSON document format, reads it back and validates it.

use deckforge::deck::{
    deserialize, serialize, validate_deck, AudienceProfile, Bounds, Deck, Element, NewSection,
    Presentation, Slide,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Presentation::create("Reading group", 900, AudienceProfile::new(5, "NLP professor"))?;
    let (p, sid) = p.add_section(NewSection::titled("Paper summary").duration(300))?;
    let slide = Slide::new(
        Some("Main claim".into()),
        vec![Element::text("Attention is all you need", Bounds::new(0.1, 0.1, 0.8, 0.3))],
    );
    let p = p.add_slide(&sid, slide, None)?;

    let bytes = serialize(&Deck::new(p));
    let path = std::env::temp_dir().join("deckforge-example.json");
    std::fs::write(&path, &bytes)?;
    println!("wrote {} ({} bytes)", path.display(), bytes.len());

    let mut deck = deserialize(&std::fs::read(&path)?)?;
    assert_eq!(serialize(&deck), bytes);
    println!("violations: {}", validate_deck(&deck).len());

    deck.presentation.sections[0].slides[0].elements[0].bounds.w = 2.0;
    for v in validate_deck(&deck) {
        println!("{v}");
    }
    Ok(())
}
