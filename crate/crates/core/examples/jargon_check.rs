//! Runs the jargon pipeline on one slide with the bundled offline lexicon.
//! Set JARGON_API_KEY (and optionally JARGON_API_URL / JARGON_MODEL) to use
//! a language-model provider instead.

use std::sync::Arc;

use deckforge::deck::{AudienceProfile, Bounds, Element, Slide};
use deckforge::jargon::{
    detect_jargon, expand_audience_context, HideState, JargonProvider, LlmProvider, MockProvider,
};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let provider: Arc<dyn JargonProvider> = match LlmProvider::from_env() {
        Ok(live) => Arc::new(live),
        Err(_) => Arc::new(MockProvider::bundled()),
    };
    let audience = AudienceProfile::new(3, "high school students, parents, and community members");
    let topic = Some("Why multitasking feels productive");
    let ctx = expand_audience_context(provider.as_ref(), &audience, topic).await?;
    println!("audience: {}", ctx.expanded_description);

    let slide = Slide::new(
        Some("Who multitasks most".into()),
        vec![Element::text(
            "Heavy Media Multitaskers (HMMs) pay a larger task-switching cost.",
            Bounds::full(),
        )],
    );
    let text = slide.canonical_text();
    let mut hidden = HideState::default();
    for t in detect_jargon(provider.as_ref(), &slide, &ctx, &hidden, topic).await? {
        let span: String = text.chars().skip(t.start_index).take(t.end_index - t.start_index).collect();
        println!("{span:?} at {}..{}: try {:?}", t.start_index, t.end_index, t.alternatives);
    }

    hidden = hidden.hide_term(&slide.id, "task-switching cost");
    let left = detect_jargon(provider.as_ref(), &slide, &ctx, &hidden, topic).await?;
    println!("after hiding one term: {} left", left.len());
    Ok(())
}
