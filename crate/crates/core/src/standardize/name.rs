//! Person names rendered as `firstname lastname`.

/// A name is at least two words of letters, apostrophes, hyphens and
/// periods, optionally written `lastname, firstname`.
fn is_name_word(word: &str) -> bool {
    word.chars().any(char::is_alphabetic)
        && word
            .chars()
            .all(|c| c.is_alphabetic() || matches!(c, '\'' | '-' | '.' | '’'))
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

pub fn standardize_name(value: &str) -> Option<String> {
    let commas = value.matches(',').count();
    let ordered: Vec<&str> = if commas == 1 {
        let (last, first) = value.split_once(',')?;
        let (first, last) = (words(first), words(last));
        if first.is_empty() || last.is_empty() {
            return None;
        }
        first.into_iter().chain(last).collect()
    } else {
        // kept in the given order, commas included
        words(value)
    };
    let check: Vec<&str> = ordered
        .iter()
        .flat_map(|w| w.split(','))
        .filter(|w| !w.is_empty())
        .collect();
    if check.len() < 2 || !check.iter().all(|w| is_name_word(w)) {
        return None;
    }
    Some(ordered.join(" "))
}
