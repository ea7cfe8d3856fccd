use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Canonical form of a node label used for all label comparisons.
///
/// Lowercases, applies NFC, turns every character that is neither
/// alphanumeric nor a combining mark into a space, then collapses runs of
/// whitespace and trims.
pub fn normalize_label(raw: &str) -> String {
    let lowered: String = raw.to_lowercase().nfc().collect();
    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    for c in lowered.chars() {
        if c.is_alphanumeric() || is_combining_mark(c) {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_label("Check  Invoice!"), "check invoice");
        assert_eq!(normalize_label(""), "");
        assert_eq!(
            normalize_label("Send\tOrder_Confirmation"),
            "send order confirmation"
        );
        assert_eq!(normalize_label("  --  "), "");
    }

    #[test]
    fn composes_decomposed_accents() {
        assert_eq!(normalize_label("Cafe\u{301} Order"), "caf\u{e9} order");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}") {
            let once = normalize_label(&s);
            prop_assert_eq!(normalize_label(&once), once);
        }
    }
}
