//! Accessibility and structure linter for generated worksheets.
//!
//! Two profiles share the structural rules (`S2`..`S4`). The standard
//! profile adds the base font size (`S1`) and one-page (`S5`) checks; the
//! dyslexia profile adds the formatting rules `D1`..`D11`. `LEX` reports
//! tokenizer balance errors and `S0` the document skeleton; both run in
//! every profile.
//!
//! | rule | checks |
//! |------|--------|
//! | S1  | class option base size is 11pt or 12pt |
//! | S2  | body has at least one heading |
//! | S3  | every task unit has vertical answer space |
//! | S4  | no solution, answer or hint environments or sections |
//! | S5  | fits on one page (page count when known, else a word estimate) |
//! | D1  | sans-serif default family |
//! | D2  | base size 12pt to 14pt |
//! | D3  | line spacing between 1.5 and 2 |
//! | D4  | no italics or underlining |
//! | D5  | headings at least 1.2 times the body size |
//! | D6  | single column, left-aligned (ragged right) |
//! | D7  | math operators set in bold |
//! | D8  | average sentence length |
//! | D9  | glossary section |
//! | D10 | page break before every task but the first section |
//! | D11 | worked example before the first task |

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::context::{walk, TokenContext, Walk};
use super::lexer::{lex, token_args, Arg, LexErrorKind, Lexed, Token, TokenKind};
use crate::directives::FormatProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Lex,
    S0,
    S1,
    S2,
    S3,
    S4,
    S5,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
    D8,
    D9,
    D10,
    D11,
}

impl RuleId {
    pub const ALL: [Self; 18] = [
        Self::Lex,
        Self::S0,
        Self::S1,
        Self::S2,
        Self::S3,
        Self::S4,
        Self::S5,
        Self::D1,
        Self::D2,
        Self::D3,
        Self::D4,
        Self::D5,
        Self::D6,
        Self::D7,
        Self::D8,
        Self::D9,
        Self::D10,
        Self::D11,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Lex => "LEX",
            Self::S0 => "S0",
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
            Self::S4 => "S4",
            Self::S5 => "S5",
            Self::D1 => "D1",
            Self::D2 => "D2",
            Self::D3 => "D3",
            Self::D4 => "D4",
            Self::D5 => "D5",
            Self::D6 => "D6",
            Self::D7 => "D7",
            Self::D8 => "D8",
            Self::D9 => "D9",
            Self::D10 => "D10",
            Self::D11 => "D11",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
    }

    /// The generator guideline the rule enforces.
    pub fn quote(self) -> &'static str {
        match self {
            Self::Lex | Self::S0 => "Output only complete, compilable LaTeX code",
            Self::S1 => "Font size: 11pt or 12pt",
            Self::S2 => "Clear section headings",
            Self::S3 => "Add sufficient space for solutions",
            Self::S4 => "No solution hints or corrections",
            Self::S5 => "One page",
            Self::D1 => "Use sans serif font (e.g., Arial)",
            Self::D2 => "Font size 12-14pt",
            Self::D3 => "Line spacing 1.5-2",
            Self::D4 => "No italics or underlining",
            Self::D5 => "Headings 20% larger",
            Self::D6 => "Single-column layout, left-aligned",
            Self::D7 => "Clear operators in bold",
            Self::D8 => "Short, active sentences",
            Self::D9 => "Mini glossary for technical terms",
            Self::D10 => "One task per page",
            Self::D11 => "Sample task at the beginning",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown rule id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LintProfile {
    #[default]
    Standard,
    Dyslexia,
}

impl LintProfile {
    pub const STRUCTURAL: [RuleId; 3] = [RuleId::S2, RuleId::S3, RuleId::S4];

    pub fn rules(self) -> &'static [RuleId] {
        use RuleId::*;
        match self {
            Self::Standard => &[Lex, S0, S1, S2, S3, S4, S5],
            Self::Dyslexia => &[
                Lex, S0, S2, S3, S4, D1, D2, D3, D4, D5, D6, D7, D8, D9, D10, D11,
            ],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Dyslexia => "dyslexia",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Some(Self::Standard),
            "dyslexia" => Some(Self::Dyslexia),
            _ => None,
        }
    }
}

impl From<FormatProfile> for LintProfile {
    fn from(p: FormatProfile) -> Self {
        match p {
            FormatProfile::Standard => Self::Standard,
            FormatProfile::Dyslexia => Self::Dyslexia,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintOptions {
    /// D8 threshold.
    pub max_avg_sentence_words: f64,
    /// Rendered page count, when a toolchain produced one.
    pub page_count: Option<u32>,
    /// Prose word count above which S5 warns when no page count is known.
    pub one_page_word_budget: usize,
}

impl Default for LintOptions {
    fn default() -> Self {
        Self {
            max_avg_sentence_words: 15.0,
            page_count: None,
            one_page_word_budget: 450,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintFinding {
    pub rule_id: RuleId,
    pub severity: Severity,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
    pub message: String,
    pub quote: String,
}

impl LintFinding {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for LintFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev} [{}] {}",
            self.line, self.col, self.rule_id, self.message
        )
    }
}

/// Lints `src` under `profile`. Findings are grouped by the profile's rule
/// order and sorted by position within each rule.
pub fn lint(src: &str, profile: LintProfile, opts: &LintOptions) -> Vec<LintFinding> {
    let doc = Doc::new(src);
    let mut out = Vec::new();
    for &rule in profile.rules() {
        let mut raw = Vec::new();
        doc.check(rule, opts, &mut raw);
        raw.sort_by_key(|r: &Raw| (r.start, r.end));
        out.extend(raw.into_iter().map(|r| doc.finding(rule, r)));
    }
    out
}

struct Raw {
    severity: Severity,
    start: usize,
    end: usize,
    message: String,
}

fn err(start: usize, end: usize, message: String) -> Raw {
    Raw {
        severity: Severity::Error,
        start,
        end,
        message,
    }
}

fn warn(start: usize, end: usize, message: String) -> Raw {
    Raw {
        severity: Severity::Warning,
        start,
        end,
        message,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HeadingKind {
    Glossary,
    Example,
    Task,
    Other,
}

const GLOSSARY_WORDS: &[&str] = &[
    "glossar",
    "key terms",
    "key words",
    "word bank",
    "vocabulary",
    "wortliste",
    "fachbegriffe",
];
const EXAMPLE_WORDS: &[&str] = &["example", "sample", "worked", "beispiel", "muster"];
const TASK_WORDS: &[&str] = &[
    "task", "exercise", "problem", "question", "aufgabe", "übung",
];
const SOLUTION_WORDS: &[&str] = &["solution", "answer key", "answers", "lösung", "loesung"];

fn classify(title: &str) -> HeadingKind {
    let has = |words: &[&str]| words.iter().any(|w| title.contains(w));
    if has(GLOSSARY_WORDS) {
        HeadingKind::Glossary
    } else if has(EXAMPLE_WORDS) {
        HeadingKind::Example
    } else if has(TASK_WORDS) {
        HeadingKind::Task
    } else {
        HeadingKind::Other
    }
}

fn heading_level(cmd: &str) -> Option<u8> {
    match cmd.trim_end_matches('*') {
        "part" | "chapter" => Some(0),
        "section" => Some(1),
        "subsection" => Some(2),
        "subsubsection" => Some(3),
        "paragraph" => Some(4),
        _ => None,
    }
}

struct Heading {
    token: usize,
    level: u8,
    /// Lowercased raw title source.
    title: String,
    title_arg: Option<Arg>,
    kind: HeadingKind,
}

struct Class {
    token: usize,
    options: Vec<String>,
}

const SIZE_RATIOS: &[(&str, f64)] = &[
    ("tiny", 0.5),
    ("scriptsize", 0.7),
    ("footnotesize", 0.8),
    ("small", 0.9),
    ("normalsize", 1.0),
    ("large", 1.2),
    ("Large", 1.44),
    ("LARGE", 1.728),
    ("huge", 2.074),
    ("Huge", 2.488),
];

const PAGE_BREAKS: &[&str] = &["newpage", "clearpage", "pagebreak", "cleardoublepage"];
const VSPACE: &[&str] = &[
    "vspace",
    "vspace*",
    "vfill",
    "bigskip",
    "medskip",
    "vskip",
    "addvspace",
    "newpage",
    "clearpage",
    "pagebreak",
];
const ITALIC: &[&str] = &[
    "textit",
    "emph",
    "underline",
    "itshape",
    "uline",
    "textsl",
    "slshape",
    "it",
    "sl",
    "em",
    "uuline",
    "uwave",
];
const MATH_OP_CHARS: &[char] = &['+', '-', '=', '<', '>', '×', '÷', '·', '−'];
const PROSE_OP_CHARS: &[char] = &['+', '=', '×', '÷'];
const MATH_OP_CMDS: &[&str] = &[
    "times", "cdot", "div", "pm", "mp", "leq", "geq", "neq", "le", "ge", "ne", "approx", "lt", "gt",
];
const HEADING_FORMAT_CMDS: &[&str] = &[
    "titleformat",
    "titleformat*",
    "sectionfont",
    "subsectionfont",
    "subsubsectionfont",
    "allsectionsfont",
    "setkomafont",
    "addtokomafont",
];
const SANS_FONTS: &[&str] = &[
    "arial",
    "helvetica",
    "verdana",
    "calibri",
    "tahoma",
    "lexend",
    "roboto",
    "comic",
    "century gothic",
    "segoe",
    "trebuchet",
    "open sans",
    "tex gyre heros",
    "atkinson",
];

struct Doc<'a> {
    src: &'a str,
    lexed: Lexed,
    walk: Walk,
    /// Token indices of `\begin{document}` and `\end{document}` (or the
    /// token count when there is no end).
    body: Option<(usize, usize)>,
    class: Option<Class>,
    headings: Vec<Heading>,
}

fn parse_num(s: &str) -> Option<f64> {
    let s = s.trim();
    let s = s.strip_suffix("pt").unwrap_or(s).trim();
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Font size in a format string relative to `base`: an explicit
/// `\fontsize{N}` or the last size switch.
fn format_size(raw: &str, base: f64) -> Option<f64> {
    let mut best: Option<(usize, f64)> = None;
    let mut consider = |pos: usize, v: f64| {
        if best.is_none_or(|(p, _)| pos >= p) {
            best = Some((pos, v));
        }
    };
    for (pos, _) in raw.match_indices("\\fontsize") {
        let rest = &raw[pos + "\\fontsize".len()..];
        if let Some(inner) = rest.trim_start().strip_prefix('{') {
            if let Some(v) = inner.find('}').and_then(|e| parse_num(&inner[..e])) {
                consider(pos, v);
            }
        }
    }
    for &(name, ratio) in SIZE_RATIOS {
        let pat = format!("\\{name}");
        for (pos, _) in raw.match_indices(&pat) {
            let next = raw[pos + pat.len()..].chars().next();
            if !next.is_some_and(|c| c.is_ascii_alphabetic()) {
                consider(pos, ratio * base);
            }
        }
    }
    best.map(|(_, v)| v)
}

/// True when the format contains commands the linter cannot size.
fn has_unknown_macros(raw: &str) -> bool {
    const KNOWN: &[&str] = &[
        "bfseries",
        "bf",
        "sffamily",
        "rmfamily",
        "ttfamily",
        "selectfont",
        "normalfont",
        "mdseries",
        "scshape",
        "upshape",
        "itshape",
        "slshape",
        "color",
        "raggedright",
        "centering",
        "filright",
        "filcenter",
        "section",
        "subsection",
        "subsubsection",
        "thesection",
        "thesubsection",
        "usekomafont",
        "MakeUppercase",
    ];
    let mut rest = raw;
    while let Some(i) = rest.find('\\') {
        let after = &rest[i + 1..];
        let n = after
            .bytes()
            .take_while(|b| b.is_ascii_alphabetic())
            .count();
        let name = &after[..n];
        if n > 0
            && !KNOWN.contains(&name)
            && !SIZE_RATIOS.iter().any(|(s, _)| *s == name)
            && name != "fontsize"
        {
            return true;
        }
        rest = &after[n..];
    }
    false
}

impl<'a> Doc<'a> {
    fn new(src: &'a str) -> Self {
        let lexed = lex(src);
        let walk = walk(src, &lexed);
        let begin = lexed
            .tokens
            .iter()
            .position(|t| matches!(&t.kind, TokenKind::Begin(e) if e == "document"));
        let body = begin.map(|b| {
            let end = lexed.tokens[b..]
                .iter()
                .position(|t| matches!(&t.kind, TokenKind::End(e) if e == "document"))
                .map_or(lexed.tokens.len(), |i| b + i);
            (b, end)
        });
        let class = lexed
            .tokens
            .iter()
            .position(|t| t.is_command("documentclass"))
            .map(|i| {
                let options = token_args(src, &lexed.tokens[i])
                    .iter()
                    .find(|a| a.optional)
                    .map(|a| {
                        a.text(src)
                            .split(',')
                            .map(|o| o.trim().to_string())
                            .filter(|o| !o.is_empty())
                            .collect()
                    })
                    .unwrap_or_default();
                Class { token: i, options }
            });
        let mut doc = Self {
            src,
            lexed,
            walk,
            body,
            class,
            headings: Vec::new(),
        };
        let mut headings = Vec::new();
        for i in doc.body_range() {
            let t = &doc.lexed.tokens[i];
            let Some(level) = t.command().and_then(heading_level) else {
                continue;
            };
            let title_arg = doc.mandatory(i).first().copied();
            let title = title_arg
                .map(|a| a.text(src).to_lowercase())
                .unwrap_or_default();
            let kind = classify(&title);
            headings.push(Heading {
                token: i,
                level,
                title,
                title_arg,
                kind,
            });
        }
        doc.headings = headings;
        doc
    }

    fn tokens(&self) -> &[Token] {
        &self.lexed.tokens
    }

    fn ctx(&self, i: usize) -> &TokenContext {
        &self.walk.contexts[i]
    }

    fn body_range(&self) -> core::ops::Range<usize> {
        match self.body {
            Some((b, e)) => b + 1..e,
            None => 0..0,
        }
    }

    fn preamble_range(&self) -> core::ops::Range<usize> {
        0..self.body.map_or(self.lexed.tokens.len(), |(b, _)| b)
    }

    fn mandatory(&self, i: usize) -> Vec<Arg> {
        token_args(self.src, &self.lexed.tokens[i])
            .into_iter()
            .filter(|a| !a.optional)
            .collect()
    }

    fn optional(&self, i: usize) -> Option<Arg> {
        token_args(self.src, &self.lexed.tokens[i])
            .into_iter()
            .find(|a| a.optional)
    }

    fn arg_text(&self, i: usize, n: usize) -> Option<&'a str> {
        self.mandatory(i).get(n).map(|a| a.text(self.src))
    }

    fn span_of(&self, i: usize) -> (usize, usize) {
        let s = self.lexed.tokens[i].span;
        (s.start, s.end)
    }

    /// Anchor for document-level findings.
    fn anchor(&self) -> (usize, usize) {
        if let Some((b, _)) = self.body {
            self.span_of(b)
        } else if let Some(c) = &self.class {
            self.span_of(c.token)
        } else {
            (0, 0)
        }
    }

    fn class_anchor(&self) -> (usize, usize) {
        self.class
            .as_ref()
            .map_or_else(|| self.anchor(), |c| self.span_of(c.token))
    }

    fn finding(&self, rule: RuleId, r: Raw) -> LintFinding {
        let (line, col) = self.lexed.lines.position(self.src, r.start);
        let (end_line, end_col) = self.lexed.lines.position(self.src, r.end.max(r.start));
        LintFinding {
            rule_id: rule,
            severity: r.severity,
            line,
            col,
            end_line,
            end_col,
            message: r.message,
            quote: rule.quote().to_string(),
        }
    }

    fn tok_raw(&self, sev: Severity, i: usize, message: String) -> Raw {
        let (start, end) = self.span_of(i);
        Raw {
            severity: sev,
            start,
            end,
            message,
        }
    }

    fn body_commands(&self) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.body_range()
            .filter_map(move |i| self.lexed.tokens[i].command().map(|c| (i, c)))
    }

    fn first_heading_token(&self) -> usize {
        self.headings
            .first()
            .map_or(self.body_range().end, |h| h.token)
    }

    /// Token range from a heading to the next heading at the same or a
    /// higher level.
    fn heading_region(&self, h: usize) -> core::ops::Range<usize> {
        let level = self.headings[h].level;
        let end = self.headings[h + 1..]
            .iter()
            .find(|o| o.level <= level)
            .map_or(self.body_range().end, |o| o.token);
        self.headings[h].token..end
    }

    /// Base size from the class options (`12pt`, `fontsize=13pt`).
    fn class_size(&self) -> Option<f64> {
        self.class.as_ref()?.options.iter().find_map(|o| {
            let v = o.strip_prefix("fontsize=").unwrap_or(o);
            v.strip_suffix("pt").and_then(parse_num)
        })
    }

    fn base_size(&self) -> f64 {
        self.class_size().unwrap_or(10.0)
    }

    fn global_fontsize(&self) -> bool {
        self.tokens().iter().enumerate().any(|(i, t)| {
            t.is_command("fontsize")
                && matches!(
                    self.ctx(i).arg_cmd.as_deref(),
                    None | Some("AtBeginDocument")
                )
        })
    }

    fn check(&self, rule: RuleId, opts: &LintOptions, out: &mut Vec<Raw>) {
        match rule {
            RuleId::Lex => self.rule_lex(out),
            RuleId::S0 => self.rule_skeleton(out),
            RuleId::S1 => self.rule_base_size(out, 11.0, 12.0, "11pt or 12pt"),
            RuleId::S2 => self.rule_headings(out),
            RuleId::S3 => self.rule_answer_space(out),
            RuleId::S4 => self.rule_no_solutions(out),
            RuleId::S5 => self.rule_one_page(opts, out),
            RuleId::D1 => self.rule_sans(out),
            RuleId::D2 => self.rule_base_size(out, 12.0, 14.0, "12pt to 14pt"),
            RuleId::D3 => self.rule_spacing(out),
            RuleId::D4 => self.rule_italics(out),
            RuleId::D5 => self.rule_heading_size(out),
            RuleId::D6 => self.rule_layout(out),
            RuleId::D7 => self.rule_bold_operators(out),
            RuleId::D8 => self.rule_sentences(opts, out),
            RuleId::D9 => self.rule_glossary(out),
            RuleId::D10 => self.rule_task_pages(out),
            RuleId::D11 => self.rule_example_first(out),
        }
    }

    fn rule_lex(&self, out: &mut Vec<Raw>) {
        for e in &self.lexed.errors {
            let msg = match &e.kind {
                LexErrorKind::UnbalancedGroup => "unbalanced brace".to_string(),
                LexErrorKind::UnbalancedEnvironment {
                    expected: Some(x),
                    found: Some(y),
                } => {
                    format!("\\end{{{y}}} does not close \\begin{{{x}}}")
                }
                LexErrorKind::UnbalancedEnvironment {
                    expected: Some(x),
                    found: None,
                } => {
                    format!("environment {x} is never closed")
                }
                LexErrorKind::UnbalancedEnvironment { found: Some(y), .. } => {
                    format!("\\end{{{y}}} without \\begin")
                }
                LexErrorKind::UnbalancedEnvironment { .. } => "unbalanced environment".to_string(),
            };
            out.push(err(e.span.start, e.span.end, msg));
        }
    }

    fn rule_skeleton(&self, out: &mut Vec<Raw>) {
        let first = self.tokens().iter().position(|t| match &t.kind {
            TokenKind::Comment(_) | TokenKind::ParBreak => false,
            TokenKind::Text(s) => !s.trim().is_empty(),
            _ => true,
        });
        match first {
            Some(i) if self.tokens()[i].is_command("documentclass") => {}
            Some(i) => out.push(self.tok_raw(
                Severity::Error,
                i,
                "document must start with \\documentclass".into(),
            )),
            None => out.push(err(0, 0, "document is empty".into())),
        }
        let begins: Vec<usize> = (0..self.tokens().len())
            .filter(|&i| matches!(&self.tokens()[i].kind, TokenKind::Begin(e) if e == "document"))
            .collect();
        let ends: Vec<usize> = (0..self.tokens().len())
            .filter(|&i| matches!(&self.tokens()[i].kind, TokenKind::End(e) if e == "document"))
            .collect();
        if begins.is_empty() {
            out.push(err(0, 0, "missing \\begin{document}".into()));
        }
        if ends.is_empty() {
            let n = self.src.len();
            out.push(err(n, n, "missing \\end{document}".into()));
        }
        for &i in begins.iter().skip(1) {
            out.push(self.tok_raw(Severity::Error, i, "duplicate \\begin{document}".into()));
        }
        for &i in ends.iter().skip(1) {
            out.push(self.tok_raw(Severity::Error, i, "duplicate \\end{document}".into()));
        }
        if let (Some(&b), Some(&e)) = (begins.first(), ends.first()) {
            if e < b {
                out.push(self.tok_raw(
                    Severity::Error,
                    e,
                    "\\end{document} before \\begin{document}".into(),
                ));
            }
        }
    }

    fn rule_base_size(&self, out: &mut Vec<Raw>, min: f64, max: f64, allowed: &str) {
        let (s, e) = self.class_anchor();
        match self.class_size() {
            Some(v) if v >= min && v <= max => {}
            Some(v) => out.push(err(s, e, format!("base font size is {v}pt; use {allowed}"))),
            None if self.global_fontsize() => out.push(warn(
                s,
                e,
                format!("base size set with \\fontsize; cannot confirm {allowed}"),
            )),
            None => out.push(err(
                s,
                e,
                format!("no size class option, so the base size is 10pt; use {allowed}"),
            )),
        }
    }

    fn rule_headings(&self, out: &mut Vec<Raw>) {
        if self.headings.is_empty() {
            let (s, e) = self.anchor();
            out.push(err(s, e, "worksheet has no section headings".into()));
        }
    }

    /// Task units: task headings when present, otherwise the items of
    /// outermost enumerate lists outside example sections.
    fn task_units(&self) -> Vec<(usize, core::ops::Range<usize>)> {
        let task_headings: Vec<usize> = (0..self.headings.len())
            .filter(|&h| self.headings[h].kind == HeadingKind::Task)
            .collect();
        if !task_headings.is_empty() {
            return task_headings
                .into_iter()
                .map(|h| (self.headings[h].token, self.heading_region(h)))
                .collect();
        }
        let skipped: Vec<core::ops::Range<usize>> = (0..self.headings.len())
            .filter(|&h| {
                matches!(
                    self.headings[h].kind,
                    HeadingKind::Example | HeadingKind::Glossary
                )
            })
            .map(|h| self.heading_region(h))
            .collect();
        let list_depth = |i: usize| {
            let envs = &self.ctx(i).envs;
            let lists: Vec<&String> = envs
                .iter()
                .filter(|e| matches!(e.as_str(), "enumerate" | "itemize" | "description"))
                .collect();
            (
                lists.len(),
                lists.first().map(|s| s.as_str()) == Some("enumerate"),
            )
        };
        let is_unit_item =
            |i: usize| self.tokens()[i].is_command("item") && list_depth(i) == (1, true);
        let closes_list = |i: usize| {
            matches!(&self.tokens()[i].kind, TokenKind::End(e) if e == "enumerate")
                && list_depth(i) == (1, true)
        };
        let mut units = Vec::new();
        let body = self.body_range();
        for i in body.clone() {
            if !is_unit_item(i) || skipped.iter().any(|r| r.contains(&i)) {
                continue;
            }
            let end = (i + 1..body.end)
                .find(|&j| is_unit_item(j) || closes_list(j))
                .unwrap_or(body.end);
            units.push((i, i..end));
        }
        units
    }

    fn rule_answer_space(&self, out: &mut Vec<Raw>) {
        for (tok, region) in self.task_units() {
            let has_space = region.clone().any(|i| {
                self.tokens()[i]
                    .command()
                    .is_some_and(|c| VSPACE.contains(&c))
            });
            if !has_space {
                out.push(self.tok_raw(
                    Severity::Error,
                    tok,
                    "task has no vertical space for the answer".into(),
                ));
            }
        }
    }

    fn rule_no_solutions(&self, out: &mut Vec<Raw>) {
        for i in 0..self.tokens().len() {
            match &self.tokens()[i].kind {
                TokenKind::Begin(env) => {
                    let name = env.trim_end_matches('*').to_lowercase();
                    let bad = [
                        "solution",
                        "solutions",
                        "answer",
                        "answers",
                        "hint",
                        "hints",
                        "loesung",
                        "lösung",
                    ];
                    if bad.contains(&name.as_str()) {
                        out.push(self.tok_raw(
                            Severity::Error,
                            i,
                            format!("{env} environment reveals solutions"),
                        ));
                    }
                }
                TokenKind::Command(c) if c == "printanswers" => {
                    out.push(self.tok_raw(
                        Severity::Error,
                        i,
                        "\\printanswers reveals solutions".into(),
                    ));
                }
                _ => {}
            }
        }
        for h in &self.headings {
            if SOLUTION_WORDS.iter().any(|w| h.title.contains(w)) {
                out.push(self.tok_raw(
                    Severity::Error,
                    h.token,
                    "solution section in worksheet".into(),
                ));
            }
        }
    }

    fn rule_one_page(&self, opts: &LintOptions, out: &mut Vec<Raw>) {
        let (s, e) = self.anchor();
        if let Some(pages) = opts.page_count {
            if pages > 1 {
                out.push(err(s, e, format!("rendered worksheet has {pages} pages")));
            }
            return;
        }
        let words: usize = self.sentences().iter().map(|s| s.words).sum();
        if words > opts.one_page_word_budget {
            out.push(warn(
                s,
                e,
                format!("{words} words of text likely exceed one page"),
            ));
        }
        for (i, c) in self.body_commands() {
            if PAGE_BREAKS.contains(&c) {
                out.push(self.tok_raw(Severity::Warning, i, format!("\\{c} starts a second page")));
            }
        }
    }

    fn rule_sans(&self, out: &mut Vec<Raw>) {
        let mut unverified = None;
        let before_first_heading = self.first_heading_token();
        for (i, t) in self.tokens().iter().enumerate() {
            let Some(c) = t.command() else { continue };
            let ok = match c {
                "renewcommand" | "renewcommand*" => {
                    let window: String = self.src[t.span.end..].chars().take(60).collect();
                    let w = window.trim_start();
                    (w.starts_with("{\\familydefault}") || w.starts_with("\\familydefault"))
                        && w.contains("\\sfdefault")
                }
                "usepackage" => {
                    let opt = self.optional(i).map(|a| a.text(self.src)).unwrap_or("");
                    let pkgs = self.arg_text(i, 0).unwrap_or("");
                    opt.contains("sfdefault")
                        || pkgs
                            .split(',')
                            .any(|p| matches!(p.trim(), "cmbright" | "arev"))
                }
                "sffamily" => i < before_first_heading && self.ctx(i).envs.len() <= 1,
                "setmainfont" => {
                    let font = self.arg_text(i, 0).unwrap_or("").to_lowercase();
                    if SANS_FONTS.iter().any(|f| font.contains(f)) || font.contains("sans") {
                        true
                    } else {
                        unverified.get_or_insert((i, font));
                        false
                    }
                }
                _ => false,
            };
            if ok {
                return;
            }
        }
        match unverified {
            Some((i, font)) => out.push(self.tok_raw(
                Severity::Warning,
                i,
                format!("cannot tell whether main font {font:?} is sans-serif"),
            )),
            None => {
                let (s, e) = self.class_anchor();
                out.push(err(
                    s,
                    e,
                    "default font family is serif; switch to a sans-serif family".into(),
                ))
            }
        }
    }

    fn rule_spacing(&self, out: &mut Vec<Raw>) {
        let mut values: Vec<(usize, Option<f64>, &str)> = Vec::new();
        for (i, t) in self.tokens().iter().enumerate() {
            match &t.kind {
                TokenKind::Command(c) => match c.as_str() {
                    "setstretch" | "linespread" => {
                        let raw = self.arg_text(i, 0).unwrap_or("");
                        values.push((i, parse_num(raw), raw));
                    }
                    "onehalfspacing" => values.push((i, Some(1.5), "")),
                    "doublespacing" => values.push((i, Some(2.0), "")),
                    "singlespacing" => values.push((i, Some(1.0), "")),
                    "usepackage" if self.arg_text(i, 0).is_some_and(|p| p.trim() == "setspace") => {
                        let opt = self.optional(i).map(|a| a.text(self.src)).unwrap_or("");
                        if opt.contains("onehalfspacing") {
                            values.push((i, Some(1.5), ""));
                        } else if opt.contains("doublespacing") {
                            values.push((i, Some(2.0), ""));
                        }
                    }
                    "renewcommand"
                        if self
                            .arg_text(i, 0)
                            .is_some_and(|a| a.trim() == "\\baselinestretch") =>
                    {
                        let raw = self.arg_text(i, 1).unwrap_or("");
                        values.push((i, parse_num(raw), raw));
                    }
                    _ => {}
                },
                TokenKind::Begin(env) => match env.as_str() {
                    "spacing" => {
                        let raw = self.arg_text(i, 0).unwrap_or("");
                        values.push((i, parse_num(raw), raw));
                    }
                    "onehalfspace" => values.push((i, Some(1.5), "")),
                    "doublespace" => values.push((i, Some(2.0), "")),
                    _ => {}
                },
                _ => {}
            }
        }
        if values.is_empty() {
            let (s, e) = self.class_anchor();
            out.push(err(s, e, "line spacing is not set; use 1.5 to 2".into()));
        }
        for (i, v, raw) in values {
            match v {
                Some(v) if (1.5 - 1e-9..=2.0 + 1e-9).contains(&v) => {}
                Some(v) => out.push(self.tok_raw(
                    Severity::Error,
                    i,
                    format!("line spacing {v} is outside 1.5 to 2"),
                )),
                None => out.push(self.tok_raw(
                    Severity::Warning,
                    i,
                    format!("cannot evaluate line spacing {:?}", raw.trim()),
                )),
            }
        }
    }

    fn rule_italics(&self, out: &mut Vec<Raw>) {
        for (i, t) in self.tokens().iter().enumerate() {
            let Some(c) = t.command() else { continue };
            if !ITALIC.contains(&c) {
                continue;
            }
            let ctx = self.ctx(i);
            let in_heading_format = ctx
                .arg_cmd
                .as_deref()
                .is_some_and(|a| HEADING_FORMAT_CMDS.contains(&a));
            if ctx.in_body || in_heading_format {
                out.push(self.tok_raw(
                    Severity::Error,
                    i,
                    format!("\\{c} sets italic or underlined text"),
                ));
            }
        }
    }

    fn rule_heading_size(&self, out: &mut Vec<Raw>) {
        #[derive(Clone, Copy)]
        enum Size {
            Known(f64),
            Unknown,
        }
        let base = self.base_size();
        let default_ratio = |level: u8| match level {
            0 => 2.074,
            1 => 1.44,
            2 => 1.2,
            _ => 1.0,
        };
        // Per level: size and the token that set it.
        let mut levels: [(Size, Option<usize>); 5] =
            core::array::from_fn(|l| (Size::Known(default_ratio(l as u8) * base), None));
        for i in self.preamble_range() {
            let Some(c) = self.tokens()[i].command() else {
                continue;
            };
            let args = self.mandatory(i);
            let text = |n: usize| args.get(n).map(|a| a.text(self.src)).unwrap_or("");
            let (targets, format, replaces): (Vec<u8>, &str, bool) = match c {
                "titleformat" | "titleformat*" => {
                    let target = text(0)
                        .trim()
                        .trim_start_matches('\\')
                        .trim_end_matches('*');
                    (heading_level(target).into_iter().collect(), text(1), true)
                }
                "sectionfont" => (alloc::vec![1], text(0), false),
                "subsectionfont" => (alloc::vec![2], text(0), false),
                "subsubsectionfont" => (alloc::vec![3], text(0), false),
                "allsectionsfont" => (alloc::vec![0, 1, 2, 3, 4], text(0), false),
                "setkomafont" | "addtokomafont" => {
                    let targets = match text(0).trim() {
                        "section" => alloc::vec![1],
                        "subsection" => alloc::vec![2],
                        "subsubsection" => alloc::vec![3],
                        "disposition" => alloc::vec![0, 1, 2, 3, 4],
                        _ => Vec::new(),
                    };
                    (
                        targets,
                        text(1),
                        c == "setkomafont" && text(0).trim() != "disposition",
                    )
                }
                _ => continue,
            };
            let size = match format_size(format, base) {
                Some(v) => Some(Size::Known(v)),
                None if has_unknown_macros(format) => Some(Size::Unknown),
                None if replaces => Some(Size::Known(base)),
                None => None,
            };
            if let Some(size) = size {
                for l in targets {
                    levels[l as usize] = (size, Some(i));
                }
            }
        }
        let mut reported = [false; 5];
        for h in &self.headings {
            let title_size = h
                .title_arg
                .and_then(|a| format_size(a.text(self.src), base));
            let (size, origin) = match title_size {
                Some(v) => (Size::Known(v), Some(h.token)),
                None => levels[h.level as usize],
            };
            let per_heading = title_size.is_some();
            if !per_heading && reported[h.level as usize] {
                continue;
            }
            let at = origin.unwrap_or(h.token);
            match size {
                Size::Known(v) if v / base + 1e-9 >= 1.2 => {}
                Size::Known(v) => {
                    if !per_heading {
                        reported[h.level as usize] = true;
                    }
                    out.push(self.tok_raw(
                        Severity::Error,
                        at,
                        format!("heading size {v:.1}pt is less than 1.2 times the {base}pt body"),
                    ));
                }
                Size::Unknown => {
                    reported[h.level as usize] = true;
                    out.push(self.tok_raw(
                        Severity::Warning,
                        at,
                        "cannot determine heading size".into(),
                    ));
                }
            }
        }
    }

    fn rule_layout(&self, out: &mut Vec<Raw>) {
        if let Some(c) = &self.class {
            if c.options.iter().any(|o| o == "twocolumn") {
                out.push(self.tok_raw(Severity::Error, c.token, "twocolumn class option".into()));
            }
        }
        let first_heading = self.first_heading_token();
        let mut ragged = false;
        for (i, t) in self.tokens().iter().enumerate() {
            let ctx = self.ctx(i);
            let early = !ctx.in_body || (i < first_heading && ctx.envs.len() <= 1);
            match &t.kind {
                TokenKind::Begin(env) => match env.as_str() {
                    "multicols" | "multicols*" => {
                        out.push(self.tok_raw(Severity::Error, i, "multi-column layout".into()))
                    }
                    "center" | "flushright" | "justify" | "Center" | "FlushRight" | "Justify"
                        if ctx.in_body =>
                    {
                        out.push(self.tok_raw(
                            Severity::Error,
                            i,
                            format!("{env} environment breaks left alignment"),
                        ))
                    }
                    "flushleft" | "FlushLeft" if ctx.in_body && early => ragged = true,
                    _ => {}
                },
                TokenKind::Command(c) => match c.as_str() {
                    "twocolumn" => {
                        out.push(self.tok_raw(Severity::Error, i, "\\twocolumn layout".into()))
                    }
                    "centering" | "raggedleft" | "justifying" | "centerline" if ctx.in_body => out
                        .push(self.tok_raw(
                            Severity::Error,
                            i,
                            format!("\\{c} breaks left alignment"),
                        )),
                    "raggedright" | "RaggedRight" if early => ragged = true,
                    "usepackage" => {
                        let opt = self.optional(i).map(|a| a.text(self.src)).unwrap_or("");
                        if self.arg_text(i, 0).is_some_and(|p| p.trim() == "ragged2e")
                            && opt.contains("document")
                        {
                            ragged = true;
                        }
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        if !ragged {
            let (s, e) = self.anchor();
            out.push(err(
                s,
                e,
                "text is justified; set \\raggedright for the whole document".into(),
            ));
        }
    }

    fn rule_bold_operators(&self, out: &mut Vec<Raw>) {
        for i in self.body_range() {
            let t = &self.tokens()[i];
            let ctx = self.ctx(i);
            if ctx.bold
                || self.walk.in_optional(t.span.start) && !matches!(t.kind, TokenKind::Text(_))
            {
                continue;
            }
            match &t.kind {
                TokenKind::Text(_) if ctx.math || ctx.prose => {
                    let ops = if ctx.math {
                        MATH_OP_CHARS
                    } else {
                        PROSE_OP_CHARS
                    };
                    for (o, c) in self.walk.visible_chars(t) {
                        if ops.contains(&c) {
                            out.push(err(
                                o,
                                o + c.len_utf8(),
                                format!("operator '{c}' is not bold"),
                            ));
                        }
                    }
                }
                TokenKind::Command(c) if ctx.math && MATH_OP_CMDS.contains(&c.as_str()) => {
                    out.push(self.tok_raw(
                        Severity::Error,
                        i,
                        format!("operator \\{c} is not bold"),
                    ));
                }
                _ => {}
            }
        }
    }

    /// Prose sentences of the body with their start offsets. Heading titles
    /// are not sentences.
    fn sentences(&self) -> Vec<Sentence> {
        const BREAK: char = '\u{1}';
        let mut chars: Vec<(usize, char)> = Vec::new();
        let is_heading_arg = |i: usize| {
            self.ctx(i)
                .arg_cmd
                .as_deref()
                .and_then(heading_level)
                .is_some()
        };
        let mut prev_heading = false;
        for i in self.body_range() {
            let t = &self.tokens()[i];
            let ctx = self.ctx(i);
            let heading = is_heading_arg(i);
            if heading != prev_heading {
                chars.push((t.span.start, BREAK));
                prev_heading = heading;
            }
            match &t.kind {
                TokenKind::Text(_) if ctx.prose && !heading => {
                    chars.extend(
                        self.walk
                            .visible_chars(t)
                            .map(|(o, c)| (o, if c == '\n' { ' ' } else { c })),
                    );
                }
                TokenKind::MathShift { display: false } if !ctx.math => {
                    chars.extend([
                        (t.span.start, ' '),
                        (t.span.start, 'x'),
                        (t.span.start, ' '),
                    ]);
                }
                TokenKind::Command(c) if c == "(" && !ctx.math => {
                    chars.extend([
                        (t.span.start, ' '),
                        (t.span.start, 'x'),
                        (t.span.start, ' '),
                    ]);
                }
                TokenKind::Command(c)
                    if matches!(
                        c.as_str(),
                        "item" | "par" | "\\" | "newline" | "[" | "newpage" | "clearpage"
                    ) || heading_level(c).is_some() =>
                {
                    chars.push((t.span.start, BREAK))
                }
                TokenKind::MathShift { display: true }
                | TokenKind::ParBreak
                | TokenKind::Begin(_)
                | TokenKind::End(_) => chars.push((t.span.start, BREAK)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        let mut current: Vec<(usize, char)> = Vec::new();
        let mut flush = |current: &mut Vec<(usize, char)>| {
            let text: String = current.iter().map(|(_, c)| *c).collect();
            let words = text
                .split_whitespace()
                .filter(|w| w.chars().any(char::is_alphanumeric))
                .count();
            if words > 0 {
                let start = current
                    .iter()
                    .find(|(_, c)| !c.is_whitespace())
                    .map_or(0, |(o, _)| *o);
                out.push(Sentence { start, words });
            }
            current.clear();
        };
        for (o, c) in chars {
            if matches!(c, '.' | '!' | '?' | ';' | ':' | BREAK) {
                flush(&mut current);
            } else {
                current.push((o, c));
            }
        }
        flush(&mut current);
        out
    }

    fn rule_sentences(&self, opts: &LintOptions, out: &mut Vec<Raw>) {
        let sentences = self.sentences();
        if sentences.is_empty() {
            return;
        }
        let total: usize = sentences.iter().map(|s| s.words).sum();
        let avg = total as f64 / sentences.len() as f64;
        if avg > opts.max_avg_sentence_words {
            let longest = sentences.iter().max_by_key(|s| s.words).expect("non-empty");
            out.push(warn(
                longest.start,
                longest.start,
                format!(
                    "average sentence length is {avg:.1} words (limit {}); longest sentence has {} words",
                    opts.max_avg_sentence_words, longest.words
                ),
            ));
        }
    }

    fn rule_glossary(&self, out: &mut Vec<Raw>) {
        if !self
            .headings
            .iter()
            .any(|h| h.kind == HeadingKind::Glossary)
        {
            let (s, e) = self.anchor();
            out.push(err(s, e, "no glossary section for technical terms".into()));
        }
    }

    fn rule_task_pages(&self, out: &mut Vec<Raw>) {
        let mut any_task = false;
        for (n, h) in self.headings.iter().enumerate() {
            if h.kind != HeadingKind::Task {
                continue;
            }
            any_task = true;
            if n == 0 {
                continue;
            }
            let prev = self.headings[n - 1].token;
            let broken = (prev..h.token).any(|i| {
                self.tokens()[i]
                    .command()
                    .is_some_and(|c| PAGE_BREAKS.contains(&c))
            });
            if !broken {
                out.push(self.tok_raw(
                    Severity::Error,
                    h.token,
                    "task does not start on a new page".into(),
                ));
            }
        }
        if !any_task {
            let (s, e) = self.anchor();
            out.push(warn(
                s,
                e,
                "no task headings found; cannot check one task per page".into(),
            ));
        }
    }

    fn rule_example_first(&self, out: &mut Vec<Raw>) {
        let example = self
            .headings
            .iter()
            .find(|h| h.kind == HeadingKind::Example);
        let task = self.headings.iter().find(|h| h.kind == HeadingKind::Task);
        match (example, task) {
            (None, _) => {
                let (s, e) = self.anchor();
                out.push(err(s, e, "no worked example section".into()));
            }
            (Some(ex), Some(t)) if t.token < ex.token => {
                out.push(self.tok_raw(
                    Severity::Error,
                    ex.token,
                    "worked example comes after the first task".into(),
                ));
            }
            _ => {}
        }
    }
}

struct Sentence {
    start: usize,
    words: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules(src: &str, profile: LintProfile) -> Vec<RuleId> {
        lint(src, profile, &LintOptions::default())
            .into_iter()
            .map(|f| f.rule_id)
            .collect()
    }

    const MINIMAL: &str = "\\documentclass[12pt]{article}\n\\begin{document}\n\\section*{Task 1}\nAdd the numbers.\n\\vspace{3cm}\n\\end{document}\n";

    #[test]
    fn minimal_standard_document_is_clean() {
        assert_eq!(rules(MINIMAL, LintProfile::Standard), []);
    }

    #[test]
    fn default_size_is_ten_points() {
        let src = MINIMAL.replace("[12pt]", "");
        let f = lint(&src, LintProfile::Standard, &LintOptions::default());
        assert_eq!(f.len(), 1);
        assert_eq!(
            (f[0].rule_id, f[0].severity, f[0].line, f[0].col),
            (RuleId::S1, Severity::Error, 1, 1)
        );
    }

    #[test]
    fn italics_reported_per_occurrence_with_position() {
        let src = MINIMAL.replace("Add the numbers.", "Add \\emph{all} the \\textit{numbers}.");
        let f: Vec<_> = lint(&src, LintProfile::Dyslexia, &LintOptions::default())
            .into_iter()
            .filter(|f| f.rule_id == RuleId::D4)
            .collect();
        assert_eq!(f.len(), 2);
        assert_eq!((f[0].line, f[0].col), (4, 5));
        assert_eq!(f[0].quote, "No italics or underlining");
    }

    #[test]
    fn bold_operators() {
        let ok = "\\documentclass{article}\\begin{document}$1 \\mathbf{+} 2 \\boldsymbol{=} 3$\\end{document}";
        assert!(!rules(ok, LintProfile::Dyslexia).contains(&RuleId::D7));
        let bad = "\\documentclass{article}\\begin{document}$1 + 2 \\times 3$\\end{document}";
        assert_eq!(
            rules(bad, LintProfile::Dyslexia)
                .iter()
                .filter(|r| **r == RuleId::D7)
                .count(),
            2
        );
    }

    #[test]
    fn page_count_drives_one_page_rule() {
        let opts = LintOptions {
            page_count: Some(2),
            ..LintOptions::default()
        };
        let f = lint(MINIMAL, LintProfile::Standard, &opts);
        assert_eq!(
            f.iter()
                .map(|f| (f.rule_id, f.severity))
                .collect::<Vec<_>>(),
            [(RuleId::S5, Severity::Error)]
        );
        let opts = LintOptions {
            page_count: Some(1),
            ..LintOptions::default()
        };
        assert!(lint(MINIMAL, LintProfile::Standard, &opts).is_empty());
    }

    #[test]
    fn heading_size_from_titleformat() {
        let base = "\\documentclass[12pt]{article}\\usepackage{titlesec}\\titleformat{\\section}{FMT}{}{0pt}{}\\begin{document}\\section{Task}\\end{document}";
        let d5 = |fmt: &str| {
            lint(
                &base.replace("FMT", fmt),
                LintProfile::Dyslexia,
                &LintOptions::default(),
            )
            .into_iter()
            .filter(|f| f.rule_id == RuleId::D5)
            .map(|f| f.severity)
            .collect::<Vec<_>>()
        };
        assert_eq!(d5("\\fontsize{16}{20}\\selectfont\\bfseries"), []);
        assert_eq!(d5("\\Large\\bfseries"), []);
        assert_eq!(d5("\\fontsize{12}{14}\\selectfont"), [Severity::Error]);
        assert_eq!(d5("\\bfseries"), [Severity::Error]);
        assert_eq!(d5("\\myheadingfont"), [Severity::Warning]);
    }

    #[test]
    fn enumerate_items_are_task_units_without_task_headings() {
        let src = "\\documentclass[12pt]{article}\\begin{document}\\section{Fractions}\\begin{enumerate}\\item a \\vspace{1cm}\\item b\\end{enumerate}\\end{document}";
        let f = lint(src, LintProfile::Standard, &LintOptions::default());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].rule_id, RuleId::S3);
        assert!(src[..].find("\\item b").is_some());
    }

    #[test]
    fn lexer_errors_surface_first() {
        let src = "\\documentclass[12pt]{article}\\begin{document}\\section{Task}{\\vspace{1cm}\\end{document}";
        assert_eq!(rules(src, LintProfile::Standard)[0], RuleId::Lex);
    }

    #[test]
    fn rule_ids_round_trip() {
        for r in RuleId::ALL {
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<RuleId>(&json).unwrap(), r);
        }
    }

    #[test]
    fn structural_rules_are_shared() {
        for r in LintProfile::STRUCTURAL {
            assert!(LintProfile::Standard.rules().contains(&r));
            assert!(LintProfile::Dyslexia.rules().contains(&r));
        }
    }
}
