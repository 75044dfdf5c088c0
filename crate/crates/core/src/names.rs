//! Byline and roster name normalization.
//!
//! Bylines only carry a surname and given-name initials, so both sides of the
//! matching problem are reduced to `(surname_norm, initials)`.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Uppercases, folds diacritics and drops everything that is not a letter or
/// digit, so `"D'Angelo"`, `"d’angelo"` and `"D Angelo"` all become `"DANGELO"`.
pub fn normalize_surname(raw: &str) -> String {
    raw.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_uppercase)
        .filter(|c| c.is_alphanumeric())
        .collect()
}

fn fold_initial(c: char) -> Option<char> {
    let mut buf = [0u8; 4];
    normalize_surname(c.encode_utf8(&mut buf)).chars().next()
}

fn is_name_separator(c: char) -> bool {
    c.is_whitespace() || c == '.' || c == '-'
}

/// Initials of a full given-name string: first letter of every name part.
/// `"Maria Anna"` gives `[M, A]`, `"Gian-Luca"` gives `[G, L]`.
pub fn initials_of_given_names(given: &str) -> Vec<char> {
    given
        .split(is_name_separator)
        .filter_map(|part| part.chars().next())
        .filter_map(fold_initial)
        .collect()
}

/// Initials as they appear in a byline: `"MA"`, `"M.A."`, `"M A"` or a spelled
/// out `"Maria"`. Short all-caps tokens are read letter by letter.
pub fn initials_of_byline(fragment: &str) -> Vec<char> {
    let mut out = Vec::new();
    for token in fragment.split(is_name_separator).filter(|t| !t.is_empty()) {
        let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
        if letters.is_empty() {
            continue;
        }
        if letters.len() <= 4 && letters.iter().all(|c| c.is_uppercase()) {
            out.extend(letters.into_iter().filter_map(fold_initial));
        } else if let Some(c) = fold_initial(letters[0]) {
            out.push(c);
        }
    }
    out
}

fn looks_like_initials(token: &str) -> bool {
    let letters: Vec<char> = token.chars().filter(|c| *c != '.' && *c != '-').collect();
    !letters.is_empty()
        && letters.len() <= 4
        && letters
            .iter()
            .all(|c| c.is_alphabetic() && c.is_uppercase())
}

/// Splits a raw byline entry into `(surname, initials)`.
///
/// Accepted shapes are `"Surname, Initials"` (preferred) and the WoS-style
/// `"Surname INITIALS"` where the last whitespace token is all caps.
pub fn split_byline(raw: &str) -> Result<(String, Vec<char>), String> {
    let raw = raw.trim();
    let (surname, rest) = match raw.split_once(',') {
        Some((s, r)) => (s.trim().to_string(), r.trim().to_string()),
        None => {
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens.split_last() {
                Some((last, head)) if !head.is_empty() && looks_like_initials(last) => {
                    (head.join(" "), (*last).to_string())
                }
                _ => return Err(format!("cannot split `{raw}` into surname and initials")),
            }
        }
    };
    if normalize_surname(&surname).is_empty() {
        return Err(format!("empty surname in `{raw}`"));
    }
    let initials = initials_of_byline(&rest);
    if initials.is_empty() {
        return Err(format!("no initials in `{raw}`"));
    }
    Ok((surname, initials))
}

/// Block rule on initials: the first initial must agree and the remaining
/// byline initials must appear, in order, among the researcher's remaining
/// initials. Bylines routinely drop middle initials, never invent them.
pub fn initials_compatible(mention: &[char], researcher: &[char]) -> bool {
    let (Some((m0, m_rest)), Some((r0, r_rest))) =
        (mention.split_first(), researcher.split_first())
    else {
        return false;
    };
    if m0 != r0 {
        return false;
    }
    let mut pool = r_rest.iter();
    m_rest.iter().all(|m| pool.any(|r| r == m))
}
