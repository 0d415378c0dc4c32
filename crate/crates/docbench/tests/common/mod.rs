//! Shared test support: independent oracles, a scripted stub server, and
//! synthetic corpus builders.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener};
use std::path::{Path, PathBuf};
use std::thread::JoinHandle;

use docbench::corpus::{CodeDocPair, Split};
use docbench::lexers::Language;

// ---------------------------------------------------------------------------
// Brute-force smoothed-BLEU oracle, written independently of the library
// implementation: no hash maps, distinct-gram scanning, direct formula.
// ---------------------------------------------------------------------------

pub fn oracle_sentence_bleu(candidate: &[&str], reference: &[&str]) -> f64 {
    assert!(!reference.is_empty());
    if candidate.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=4usize {
        let cand_grams: Vec<&[&str]> = if candidate.len() >= n {
            candidate.windows(n).collect()
        } else {
            Vec::new()
        };
        let ref_grams: Vec<&[&str]> = if reference.len() >= n {
            reference.windows(n).collect()
        } else {
            Vec::new()
        };

        let mut matched = 0usize;
        let mut seen: Vec<&[&str]> = Vec::new();
        for gram in &cand_grams {
            if seen.iter().any(|g| g == gram) {
                continue;
            }
            seen.push(gram);
            let in_cand = cand_grams.iter().filter(|g| *g == gram).count();
            let in_ref = ref_grams.iter().filter(|g| *g == gram).count();
            matched += in_cand.min(in_ref);
        }

        let total = cand_grams.len();
        let p = if n == 1 {
            matched as f64 / total as f64
        } else {
            (matched as f64 + 1.0) / (total as f64 + 1.0)
        };
        if p == 0.0 {
            return 0.0;
        }
        log_sum += p.ln();
    }
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * bp * (log_sum / 4.0).exp()
}

// ---------------------------------------------------------------------------
// Stack-based structure oracle, written as a direct state machine.
// ---------------------------------------------------------------------------

struct OracleStringKind {
    open: &'static str,
    close: &'static str,
    escapes: bool,
    multiline: bool,
}

fn oracle_string_kinds(language: Language) -> Vec<OracleStringKind> {
    let k = |open, close, escapes, multiline| OracleStringKind {
        open,
        close,
        escapes,
        multiline,
    };
    match language {
        Language::Java => vec![k("\"", "\"", true, false), k("'", "'", true, false)],
        Language::Go => vec![
            k("\"", "\"", true, false),
            k("'", "'", true, false),
            k("`", "`", false, true),
        ],
        Language::Javascript => vec![
            k("\"", "\"", true, false),
            k("'", "'", true, false),
            k("`", "`", true, true),
        ],
        Language::Python => vec![
            k("\"\"\"", "\"\"\"", true, true),
            k("'''", "'''", true, true),
            k("\"", "\"", true, false),
            k("'", "'", true, false),
        ],
        Language::Php | Language::Ruby => {
            vec![k("\"", "\"", true, true), k("'", "'", true, true)]
        }
    }
}

fn oracle_heredoc_at(language: Language, rest: &[char]) -> bool {
    match language {
        Language::Php => rest.starts_with(&['<', '<', '<']),
        Language::Ruby => {
            if !rest.starts_with(&['<', '<']) {
                return false;
            }
            match rest.get(2) {
                Some('~') | Some('-') => matches!(
                    rest.get(3),
                    Some(c) if c.is_ascii_alphabetic() || *c == '_' || *c == '"' || *c == '\''
                ),
                Some(c) => c.is_ascii_uppercase() || *c == '_' || *c == '"' || *c == '\'',
                None => false,
            }
        }
        _ => false,
    }
}

pub fn oracle_check_structure(code: &str, language: Language) -> bool {
    if language == Language::Python {
        for line in code.split('\n') {
            let indent: String = line
                .chars()
                .take_while(|c| *c == ' ' || *c == '\t')
                .collect();
            if indent.contains(' ') && indent.contains('\t') {
                return false;
            }
        }
    }

    let kinds = oracle_string_kinds(language);
    let chars: Vec<char> = code.chars().collect();
    let mut stack: Vec<char> = Vec::new();
    let mut i = 0usize;

    'outer: while i < chars.len() {
        for kind in &kinds {
            let open: Vec<char> = kind.open.chars().collect();
            if chars[i..].starts_with(&open) {
                i += open.len();
                let close: Vec<char> = kind.close.chars().collect();
                loop {
                    if i >= chars.len() {
                        return false;
                    }
                    if kind.escapes && chars[i] == '\\' {
                        i += 2;
                        continue;
                    }
                    if chars[i] == '\n' && !kind.multiline {
                        return false;
                    }
                    if chars[i..].starts_with(&close) {
                        i += close.len();
                        break;
                    }
                    i += 1;
                }
                continue 'outer;
            }
        }
        if oracle_heredoc_at(language, &chars[i..]) {
            break;
        }
        match chars[i] {
            '(' => stack.push(')'),
            '[' => stack.push(']'),
            '{' => stack.push('}'),
            ')' | ']' | '}' => {
                if stack.pop() != Some(chars[i]) {
                    return false;
                }
            }
            _ => {}
        }
        i += 1;
    }
    stack.is_empty()
}

// ---------------------------------------------------------------------------
// Lexer golden fixtures.
// ---------------------------------------------------------------------------

pub struct GoldenFixture {
    pub language: Language,
    pub name: String,
    pub input: String,
    pub expected: String,
}

pub fn fixture_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/lexers")
}

pub fn load_golden_fixtures() -> BTreeMap<Language, Vec<GoldenFixture>> {
    let mut out: BTreeMap<Language, Vec<GoldenFixture>> = BTreeMap::new();
    for language in Language::TABLE_ORDER {
        let dir = fixture_root().join(language.id());
        let mut names: Vec<String> = fs::read_dir(&dir)
            .unwrap_or_else(|e| panic!("fixture dir {}: {e}", dir.display()))
            .filter_map(|entry| {
                let name = entry.unwrap().file_name().into_string().unwrap();
                name.strip_suffix(".input").map(str::to_string)
            })
            .collect();
        names.sort();
        let fixtures = names
            .into_iter()
            .map(|name| {
                let input = fs::read_to_string(dir.join(format!("{name}.input"))).unwrap();
                let expected = fs::read_to_string(dir.join(format!("{name}.expected"))).unwrap();
                GoldenFixture {
                    language,
                    name,
                    input,
                    expected,
                }
            })
            .collect();
        out.insert(language, fixtures);
    }
    out
}

// ---------------------------------------------------------------------------
// Synthetic corpora.
// ---------------------------------------------------------------------------

pub fn synth_pair(language: Language, split: Split, idx: usize) -> CodeDocPair {
    let verbs = ["Returns", "Computes", "Checks", "Removes", "Updates"];
    let nouns = ["value", "index", "path", "entry", "record"];
    let verb = verbs[idx % verbs.len()];
    let noun = nouns[(idx / verbs.len()) % nouns.len()];
    CodeDocPair {
        id: format!("{language}-{split}-{idx:06}"),
        language,
        code: format!("def item_{idx}(x):\n    return x + {idx}"),
        doc: format!("{verb} the {noun} number {idx} from the table."),
        doc_tokens: None,
        split,
        extra: serde_json::Map::new(),
    }
}

pub fn synth_split(language: Language, split: Split, n: usize) -> Vec<CodeDocPair> {
    (0..n).map(|i| synth_pair(language, split, i)).collect()
}

/// Writes a synthetic cleaned corpus under `root/<language>/<split>.jsonl`.
pub fn write_synth_corpus(root: &Path, language: Language, n_train: usize, n_test: usize) {
    for (split, n) in [(Split::Train, n_train), (Split::Test, n_test)] {
        let pairs = synth_split(language, split, n);
        docbench::corpus::write_pairs(
            &root.join(language.id()).join(format!("{split}.jsonl")),
            &pairs,
        )
        .unwrap();
    }
}

pub fn raw_record(code: &str, doc: &str) -> String {
    serde_json::json!({ "language": "python", "code": code, "docstring": doc }).to_string()
}

/// 20 records, 6 planted violations: 1 unparsable, 2 too short, 1 too long,
/// 1 special token, 1 non-English.
pub fn write_planted_corpus(root: &Path) {
    let mut lines = Vec::new();
    for i in 0..13 {
        lines.push(raw_record(
            &format!("def item_{i}(x):\n    return x + {i}"),
            &format!("Returns the value {i} from the stored table."),
        ));
    }
    // A good record whose comment must be stripped before it is written out.
    lines.push(raw_record(
        "def item_c(x):\n    # helper\n    return x + 1",
        "Returns the incremented value of the argument.",
    ));
    lines.push(raw_record(
        "def broken(x:\n    return x",
        "Returns the broken value early.",
    ));
    lines.push(raw_record("def s1(x):\n    return x", "Adds."));
    lines.push(raw_record("def s2(x):\n    return x", "Ok."));
    lines.push(raw_record(
        "def l1(x):\n    return x",
        &vec!["word"; 257].join(" "),
    ));
    lines.push(raw_record(
        "def sp(x):\n    return x",
        "See https://example.com for details.",
    ));
    lines.push(raw_record(
        "def ne(x):\n    return x",
        "检查 文件 是否 存在",
    ));
    assert_eq!(lines.len(), 20);
    let dir = root.join("python");
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("test.jsonl"), lines.join("\n") + "\n").unwrap();
}

// ---------------------------------------------------------------------------
// Scripted stub completions server.
// ---------------------------------------------------------------------------

pub struct StubResponse {
    pub status: u16,
    pub body: String,
}

impl StubResponse {
    pub fn completion(text: &str) -> Self {
        StubResponse {
            status: 200,
            body: serde_json::json!({ "choices": [{ "text": text }] }).to_string(),
        }
    }

    pub fn rate_limited() -> Self {
        StubResponse {
            status: 429,
            body: r#"{"error":"rate limited"}"#.to_string(),
        }
    }
}

#[derive(Debug)]
pub struct RecordedRequest {
    pub path: String,
    pub authorization: Option<String>,
    pub body: serde_json::Value,
}

pub struct StubServer {
    pub addr: SocketAddr,
    handle: JoinHandle<Vec<RecordedRequest>>,
}

impl StubServer {
    /// Serves exactly one scripted response per incoming request, in order,
    /// then stops listening.
    pub fn start(responses: Vec<StubResponse>) -> StubServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut recorded = Vec::new();
            for response in responses {
                let (mut stream, _) = listener.accept().expect("accept");
                let request = read_http_request(&mut stream);
                recorded.push(request);
                let reason = match response.status {
                    200 => "OK",
                    429 => "Too Many Requests",
                    500 => "Internal Server Error",
                    _ => "Status",
                };
                let payload = format!(
                    "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    response.status,
                    reason,
                    response.body.len(),
                    response.body
                );
                stream
                    .write_all(payload.as_bytes())
                    .expect("write response");
                let _ = stream.shutdown(std::net::Shutdown::Both);
            }
            recorded
        });
        StubServer { addr, handle }
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}/v1/completions", self.addr)
    }

    /// Waits for every scripted response to be consumed and returns the
    /// requests seen, in order.
    pub fn finish(self) -> Vec<RecordedRequest> {
        self.handle.join().expect("stub server thread")
    }
}

fn read_http_request(stream: &mut std::net::TcpStream) -> RecordedRequest {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 1024];
    let header_end;
    loop {
        let n = stream.read(&mut chunk).expect("read request");
        assert!(n > 0, "connection closed before headers were complete");
        buf.extend_from_slice(&chunk[..n]);
        if let Some(pos) = find_subsequence(&buf, b"\r\n\r\n") {
            header_end = pos + 4;
            break;
        }
    }
    let header_text = String::from_utf8_lossy(&buf[..header_end]).to_string();
    let mut path = String::new();
    let mut authorization = None;
    let mut content_length = 0usize;
    for (i, line) in header_text.lines().enumerate() {
        if i == 0 {
            path = line.split_whitespace().nth(1).unwrap_or("").to_string();
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if let Some(value) = lower.strip_prefix("content-length:") {
            content_length = value.trim().parse().unwrap_or(0);
        }
        if lower.starts_with("authorization:") {
            authorization = Some(line[14..].trim().to_string());
        }
    }
    let mut body = buf[header_end..].to_vec();
    while body.len() < content_length {
        let n = stream.read(&mut chunk).expect("read body");
        assert!(n > 0, "connection closed before body was complete");
        body.extend_from_slice(&chunk[..n]);
    }
    let body: serde_json::Value =
        serde_json::from_slice(&body[..content_length]).expect("request body is JSON");
    RecordedRequest {
        path,
        authorization,
        body,
    }
}

fn find_subsequence(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}
