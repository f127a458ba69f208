//! Prompt templates for the two model calls: audience expansion and slide
//! analysis. Placeholders look like `${name}` and are filled in one pass, so
//! substituted text is never re-scanned.

use super::ExpandedAudienceContext;
use crate::deck::AudienceProfile;

pub const AUDIENCE_EXPANSION_TEMPLATE: &str = r#"You are an expert at understanding audience descriptions for presentations.
Analyze this audience description and provide detailed context that will help with jargon detection.

ORIGINAL AUDIENCE DESCRIPTION: "${originalDescription}"
USER-PROVIDED EXPERTISE LEVEL: ${userExpertiseLevel}/5

Your task: Expand this into a detailed profile that clearly explains what this audience would and would not know.

Respond in JSON format:
{
  "expandedDescription": "Detailed 2-3 sentence description of their background and knowledge level",
  "inferredExpertiseLevel": number (1-5, can adjust user's estimate if clearly wrong),
  "knownConcepts": ["concept1", "concept2", "concept3"],
  "likelyJargon": ["term1", "term2", "term3"],
  "domainBackground": "Their field/industry background"
}

EXAMPLES:

Input: "NLP professor"
Output: {
  "expandedDescription": "Computer Science professor specializing in Natural Language Processing research. Has PhD-level expertise in machine learning, deep learning, linguistics, and computational methods. Familiar with all standard ML algorithms, programming concepts, and academic research terminology.",
  "inferredExpertiseLevel": 5,
  "knownConcepts": ["machine learning", "neural networks", "transformers", "BERT", "random forest", "SVM", "tokenization", "embeddings", "algorithms", "APIs", "frameworks", "deep learning", "statistical models"],
  "likelyJargon": ["novel architectures from 2024", "proprietary model names", "company-specific tools", "bleeding-edge research terms"],
  "domainBackground": "Computer Science academia with focus on NLP/AI research"
}

Input: "undergrad freshman no programming experience"
Output: {
  "expandedDescription": "First-year undergraduate student with no prior programming or computer science background. Familiar with basic technology use (smartphones, apps, social media) but unfamiliar with technical concepts, programming terminology, or how software systems work.",
  "inferredExpertiseLevel": 1,
  "knownConcepts": ["apps", "websites", "social media", "AI tools like ChatGPT", "smartphones", "basic internet concepts"],
  "likelyJargon": ["programming terms", "algorithms", "databases", "machine learning", "neural networks", "APIs", "coding concepts"],
  "domainBackground": "General education, non-technical"
}

Be specific about what they would know vs. what would be jargon.
Focus on their domain expertise."#;

pub const JARGON_DETECTION_TEMPLATE: &str = r#"Analyze this slide content for jargon terms that would confuse the specified audience.

AUDIENCE PROFILE:
- Original Description: "${originalDescription}"
- Detailed Profile: ${expandedDescription}
- Expertise Level: ${inferredExpertiseLevel}/5
- Domain Background: ${domainBackground}
${presentationContextLine}

WHAT THIS AUDIENCE KNOWS:
${knownConcepts}

LIKELY JARGON FOR THIS AUDIENCE:
${likelyJargon}

SLIDE CONTENT TO ANALYZE:
Title: ${slideTitle}
Content: ${slideText}

CRITICAL INSTRUCTIONS:
1. Use the detailed audience profile to determine what would be jargon
2. If a term is in the "WHAT THIS AUDIENCE KNOWS" list, it's NOT jargon
3. If a term is similar to items in "LIKELY JARGON" list, it probably IS jargon
4. Consider the expertise level (${inferredExpertiseLevel}/5) carefully
5. Only flag terms that would genuinely prevent understanding

EXPERTISE LEVEL GUIDELINES:
- Level 1-2: Most technical terms are jargon, but common tech words (AI, app, website) are okay
- Level 3: Specialized and domain-specific terms are jargon
- Level 4: Only cutting-edge or highly specialized terms are jargon
- Level 5: Only the most novel, bleeding-edge, or extremely specialized terms are jargon

IMPORTANT: 
- For professors/experts (Level 4-5): Very few terms should be jargon
- For beginners (Level 1-2): Many technical terms will be jargon
- Focus on the audience's specific domain background: ${domainBackground}

Respond with JSON only (no markdown):
{
  "jargonTerms": [
    {
      "term": "exact term from text",
      "definition": "Clear explanation appropriate for this audience",
      "alternatives": ["simpler alternative 1", "accessible phrase 2"],
      "startIndex": number,
      "endIndex": number
    }
  ]
}
\end{lstlisting}



"#;

/// Fills `${name}` placeholders from `values`. Unknown names are left as-is.
pub fn fill_template(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        match after.find('}') {
            Some(end) => {
                let name = &after[..end];
                match values.iter().find(|(k, _)| *k == name) {
                    Some((_, v)) => out.push_str(v),
                    None => out.push_str(&rest[start..start + 2 + end + 1]),
                }
                rest = &after[end + 1..];
            }
            None => {
                out.push_str(&rest[start..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn render_audience_prompt(audience: &AudienceProfile) -> String {
    let level = audience.expertise_level.to_string();
    fill_template(
        AUDIENCE_EXPANSION_TEMPLATE,
        &[
            ("originalDescription", audience.description.as_str()),
            ("userExpertiseLevel", level.as_str()),
        ],
    )
}

fn bullet_list(items: &[String], empty: &str) -> String {
    if items.is_empty() {
        empty.to_owned()
    } else {
        items
            .iter()
            .map(|i| format!("- {i}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn render_jargon_prompt(
    context: &ExpandedAudienceContext,
    presentation_context: Option<&str>,
    slide_title: Option<&str>,
    slide_text: &str,
) -> String {
    let level = context.inferred_expertise_level.to_string();
    let known = bullet_list(&context.known_concepts, "- No specific known concepts provided");
    let jargon = bullet_list(&context.likely_jargon, "- No specific jargon areas identified");
    let pc_line = match presentation_context.filter(|c| !c.is_empty()) {
        Some(c) => format!("- Presentation Context: {c}"),
        None => String::new(),
    };
    let title = slide_title.filter(|t| !t.is_empty()).unwrap_or("Untitled");
    fill_template(
        JARGON_DETECTION_TEMPLATE,
        &[
            ("originalDescription", context.original_description.as_str()),
            ("expandedDescription", context.expanded_description.as_str()),
            ("inferredExpertiseLevel", level.as_str()),
            ("domainBackground", context.domain_background.as_str()),
            ("presentationContextLine", pc_line.as_str()),
            ("knownConcepts", known.as_str()),
            ("likelyJargon", jargon.as_str()),
            ("slideTitle", title),
            ("slideText", slide_text),
        ],
    )
}
