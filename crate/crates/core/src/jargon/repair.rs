//! Offsets here are character (Unicode scalar) offsets, not byte offsets.

use super::JargonTerm;

/// `text[start..end]` in characters, if in range.
pub fn char_slice(text: &str, start: usize, end: usize) -> Option<String> {
    if start >= end {
        return None;
    }
    let s: String = text.chars().skip(start).take(end - start).collect();
    (s.chars().count() == end - start).then_some(s)
}

fn find_chars(haystack: &[char], needle: &[char], eq: impl Fn(char, char) -> bool) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    (0..=haystack.len() - needle.len())
        .find(|&i| needle.iter().zip(&haystack[i..]).all(|(n, h)| eq(*n, *h)))
}

fn fold_eq(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// First occurrence of `term` in `text` as a character range; exact match
/// first, then case-insensitive. Returns the span and the matched text.
pub fn locate(text: &str, term: &str) -> Option<(usize, usize, String)> {
    let hay: Vec<char> = text.chars().collect();
    let needle: Vec<char> = term.chars().collect();
    let start = find_chars(&hay, &needle, |a, b| a == b)
        .or_else(|| find_chars(&hay, &needle, fold_eq))?;
    let end = start + needle.len();
    Some((start, end, hay[start..end].iter().collect()))
}

/// Makes every term's span point at the term in `slide_text`. A term whose
/// span is wrong is moved to its first exact occurrence, then its first
/// case-insensitive one (taking the text's spelling); terms that do not
/// occur at all are dropped.
pub fn validate_and_repair_indices(slide_text: &str, terms: Vec<JargonTerm>) -> Vec<JargonTerm> {
    terms
        .into_iter()
        .filter_map(|mut t| {
            if t.term.is_empty() {
                return None;
            }
            if char_slice(slide_text, t.start_index, t.end_index).as_deref() == Some(t.term.as_str()) {
                return Some(t);
            }
            let (start, end, found) = locate(slide_text, &t.term)?;
            t.start_index = start;
            t.end_index = end;
            t.term = found;
            Some(t)
        })
        .collect()
}
