//! Completion cleanup: stop-string truncation, blank-line truncation,
//! whitespace normalization.

/// Truncates `raw` at the first occurrence of any stop string, then at the
/// first blank line, then trims and collapses whitespace runs to single
/// spaces. The output never contains a stop marker, leading/trailing
/// whitespace, or consecutive spaces.
pub fn postprocess<S: AsRef<str>>(raw: &str, stop: &[S]) -> String {
    let normalized = raw.replace("\r\n", "\n");
    let mut text: &str = &normalized;

    let mut cut = text.len();
    for s in stop {
        if let Some(pos) = text.find(s.as_ref()) {
            cut = cut.min(pos);
        }
    }
    text = &text[..cut];

    if let Some(pos) = first_blank_line(text) {
        text = &text[..pos];
    }

    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Byte offset of the newline opening the first blank (empty or
/// whitespace-only) line, if any.
fn first_blank_line(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'\n' {
            let mut k = i + 1;
            while k < bytes.len() && (bytes[k] == b' ' || bytes[k] == b'\t' || bytes[k] == b'\r') {
                k += 1;
            }
            if k < bytes.len() && bytes[k] == b'\n' {
                return Some(i);
            }
        }
        i += 1;
    }
    None
}
