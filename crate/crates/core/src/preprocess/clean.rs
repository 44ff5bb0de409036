//! Noise removal and tokenization.

/// Cleans raw abstract text. Steps run in exactly this order:
/// hyperlink removal, punctuation removal, standalone-numeric-token
/// removal, lowercasing, whitespace collapsing. Idempotent.
pub fn clean_text(raw: &str) -> String {
    let no_links = strip_hyperlinks(raw);

    // Punctuation (and any other symbol) is replaced by the empty string,
    // so hyphenated terms fuse rather than split.
    let no_punct: String = no_links
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();

    let no_numbers: Vec<&str> = no_punct
        .split_whitespace()
        .filter(|tok| !tok.chars().all(char::is_numeric))
        .collect();

    // Lowercasing may introduce combining marks (e.g. U+0130 maps to
    // "i" + U+0307); drop them so the filter above stays closed and the
    // function is idempotent.
    let lowered: String = no_numbers
        .join(" ")
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();

    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes `http://`, `https://`, and `www.` runs up to the next whitespace.
/// The scheme must start at a word boundary so tokens like `awww.x` survive.
fn strip_hyperlinks(text: &str) -> String {
    const PREFIXES: [&str; 3] = ["http://", "https://", "www."];
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let at_boundary = i == 0 || !chars[i - 1].is_alphanumeric();
        let rest: String = chars[i..].iter().take(8).collect::<String>().to_lowercase();
        let is_link_start =
            at_boundary && PREFIXES.iter().any(|p| rest.starts_with(p));
        if is_link_start {
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

/// Splits cleaned text on whitespace and drops single-character tokens.
pub fn tokenize(clean: &str) -> Vec<String> {
    clean
        .split_whitespace()
        .filter(|tok| tok.chars().count() > 1)
        .map(str::to_string)
        .collect()
}
