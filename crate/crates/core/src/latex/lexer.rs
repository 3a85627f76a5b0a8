//! Tolerant LaTeX tokenizer.
//!
//! Produces commands, environment begin/end markers, group braces, math
//! shifts, text runs, paragraph breaks and comments. Unknown commands are
//! fine. Group and environment balance is tracked with a stack; mismatches
//! are reported as [`LexError`]s and lexing carries on.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Byte range plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Control word (`\section`, `\section*`) or control symbol (`\\`, `\%`).
    /// The name excludes the backslash.
    Command(String),
    Begin(String),
    End(String),
    OpenGroup,
    CloseGroup,
    MathShift {
        display: bool,
    },
    Text(String),
    ParBreak,
    /// Comment text without the leading `%`.
    Comment(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    pub fn command(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Command(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_command(&self, name: &str) -> bool {
        self.command() == Some(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LexErrorKind {
    /// A `}` without an open group, or a `{` never closed.
    UnbalancedGroup,
    /// An `\end` that does not match the innermost open environment, or an
    /// environment never closed (`found` is then `None`).
    UnbalancedEnvironment {
        expected: Option<String>,
        found: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexError {
    pub kind: LexErrorKind,
    pub span: Span,
}

/// Maps byte offsets to 1-based line/column (columns count chars).
#[derive(Debug, Clone)]
pub struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(src: &str) -> Self {
        let mut starts = alloc::vec![0];
        starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Self { starts }
    }

    pub fn position(&self, src: &str, offset: usize) -> (u32, u32) {
        let line = self.starts.partition_point(|&s| s <= offset) - 1;
        let col = src[self.starts[line]..offset].chars().count() + 1;
        (line as u32 + 1, col as u32)
    }
}

#[derive(Debug, Clone)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub errors: Vec<LexError>,
    pub lines: LineIndex,
}

/// Environments whose bodies are raw text.
const VERBATIM_ENVS: [&str; 4] = ["verbatim", "Verbatim", "lstlisting", "comment"];

enum Open {
    Group(Span),
    Env(String, Span),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    lines: LineIndex,
    tokens: Vec<Token>,
    errors: Vec<LexError>,
    stack: Vec<Open>,
}

impl<'a> Lexer<'a> {
    fn span(&self, start: usize, end: usize) -> Span {
        let (line, col) = self.lines.position(self.src, start);
        Span {
            start,
            end,
            line,
            col,
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        let span = self.span(start, end);
        self.tokens.push(Token { kind, span });
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn run(mut self) -> Lexed {
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                '\\' => self.backslash(),
                '%' => {
                    let end = self.src[start..]
                        .find('\n')
                        .map_or(self.src.len(), |i| start + i);
                    self.push(
                        TokenKind::Comment(self.src[start + 1..end].to_string()),
                        start,
                        end,
                    );
                    self.pos = end;
                }
                '{' => {
                    self.pos += 1;
                    self.push(TokenKind::OpenGroup, start, self.pos);
                    let span = self.span(start, self.pos);
                    self.stack.push(Open::Group(span));
                }
                '}' => {
                    self.pos += 1;
                    self.push(TokenKind::CloseGroup, start, self.pos);
                    if matches!(self.stack.last(), Some(Open::Group(_))) {
                        self.stack.pop();
                    } else {
                        let span = self.span(start, self.pos);
                        self.errors.push(LexError {
                            kind: LexErrorKind::UnbalancedGroup,
                            span,
                        });
                    }
                }
                '$' => {
                    let display = self.src[start + 1..].starts_with('$');
                    self.pos += if display { 2 } else { 1 };
                    self.push(TokenKind::MathShift { display }, start, self.pos);
                }
                _ => self.text(),
            }
        }
        for open in core::mem::take(&mut self.stack) {
            let (kind, span) = match open {
                Open::Group(span) => (LexErrorKind::UnbalancedGroup, span),
                Open::Env(name, span) => (
                    LexErrorKind::UnbalancedEnvironment {
                        expected: Some(name),
                        found: None,
                    },
                    span,
                ),
            };
            self.errors.push(LexError { kind, span });
        }
        self.errors.sort_by_key(|e| e.span.start);
        Lexed {
            tokens: self.tokens,
            errors: self.errors,
            lines: self.lines,
        }
    }

    /// Text up to the next special character or blank line.
    fn text(&mut self) {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = start;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' | b'%' | b'{' | b'}' | b'$' => break,
                b'\n' => {
                    if let Some(end) = blank_line_end(self.src, i) {
                        if i > start {
                            self.push(TokenKind::Text(self.src[start..i].to_string()), start, i);
                        }
                        self.push(TokenKind::ParBreak, i, end);
                        self.pos = end;
                        return;
                    }
                    i += 1;
                }
                _ => i += 1,
            }
        }
        self.push(TokenKind::Text(self.src[start..i].to_string()), start, i);
        self.pos = i;
    }

    fn backslash(&mut self) {
        let start = self.pos;
        let rest = &self.src[start + 1..];
        let word_len = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphabetic() || *b == b'@')
            .count();
        if word_len == 0 {
            // Control symbol, or a lone backslash at end of input.
            let sym_len = rest.chars().next().map_or(0, char::len_utf8);
            self.pos = start + 1 + sym_len;
            self.push(
                TokenKind::Command(rest[..sym_len].to_string()),
                start,
                self.pos,
            );
            return;
        }
        let mut end = start + 1 + word_len;
        if self.src[end..].starts_with('*') {
            end += 1;
        }
        let name = &self.src[start + 1..end];
        if name == "begin" || name == "end" {
            if let Some((env, env_end)) = env_name(self.src, end) {
                self.pos = env_end;
                if name == "begin" {
                    self.begin_env(env, start);
                } else {
                    self.end_env(env, start);
                }
                return;
            }
        }
        self.pos = end;
        self.push(TokenKind::Command(name.to_string()), start, end);
    }

    fn begin_env(&mut self, env: String, start: usize) {
        let span = self.span(start, self.pos);
        self.push(TokenKind::Begin(env.clone()), start, self.pos);
        if VERBATIM_ENVS.contains(&env.as_str()) {
            let closing = alloc::format!("\\end{{{env}}}");
            let body_start = self.pos;
            let body_end = self.src[body_start..]
                .find(&closing)
                .map_or(self.src.len(), |i| body_start + i);
            if body_end > body_start {
                let body = self.src[body_start..body_end].to_string();
                let kind = if env == "comment" {
                    TokenKind::Comment(body)
                } else {
                    TokenKind::Text(body)
                };
                self.push(kind, body_start, body_end);
            }
            self.pos = body_end;
        }
        self.stack.push(Open::Env(env, span));
    }

    fn end_env(&mut self, env: String, start: usize) {
        let span = self.span(start, self.pos);
        self.push(TokenKind::End(env.clone()), start, self.pos);
        let depth = self
            .stack
            .iter()
            .rposition(|o| matches!(o, Open::Env(n, _) if *n == env));
        match (self.stack.last(), depth) {
            (Some(Open::Env(top, _)), _) if *top == env => {
                self.stack.pop();
            }
            (top, Some(d)) => {
                // Pop down to the matching environment; whatever sat above it
                // was left open.
                let expected = match top {
                    Some(Open::Env(n, _)) => Some(n.clone()),
                    _ => None,
                };
                for open in self.stack.drain(d + 1..).rev() {
                    if let Open::Group(g) = open {
                        self.errors.push(LexError {
                            kind: LexErrorKind::UnbalancedGroup,
                            span: g,
                        });
                    }
                }
                self.stack.pop();
                if expected.is_some() {
                    self.errors.push(LexError {
                        kind: LexErrorKind::UnbalancedEnvironment {
                            expected,
                            found: Some(env),
                        },
                        span,
                    });
                }
            }
            (Some(Open::Env(top, _)), None) => {
                // Treat as a misspelled close of the innermost environment.
                let expected = Some(top.clone());
                self.stack.pop();
                self.errors.push(LexError {
                    kind: LexErrorKind::UnbalancedEnvironment {
                        expected,
                        found: Some(env),
                    },
                    span,
                });
            }
            (_, None) => {
                self.errors.push(LexError {
                    kind: LexErrorKind::UnbalancedEnvironment {
                        expected: None,
                        found: Some(env),
                    },
                    span,
                });
            }
        }
    }
}

/// `{name}` right after `\begin`/`\end`, allowing spaces before the brace.
fn env_name(src: &str, from: usize) -> Option<(String, usize)> {
    let rest = &src[from..];
    let trimmed = rest.trim_start_matches([' ', '\t']);
    let open = from + (rest.len() - trimmed.len());
    let inner = trimmed.strip_prefix('{')?;
    let close = inner.find('}')?;
    let name = inner[..close].trim();
    if name.is_empty() || name.contains(['{', '\\', '\n']) {
        return None;
    }
    Some((name.to_string(), open + 1 + close + 1))
}

/// If a blank line starts at the newline at `i`, returns the offset after it
/// (and any further blank lines).
fn blank_line_end(src: &str, i: usize) -> Option<usize> {
    let mut end = None;
    let mut cursor = i + 1;
    loop {
        let rest = &src[cursor..];
        let Some(line_len) = rest.find('\n') else {
            return end;
        };
        if rest[..line_len].trim().is_empty() {
            cursor += line_len + 1;
            end = Some(cursor);
        } else {
            return end;
        }
    }
}

pub fn lex(src: &str) -> Lexed {
    Lexer {
        src,
        pos: 0,
        lines: LineIndex::new(src),
        tokens: Vec::new(),
        errors: Vec::new(),
        stack: Vec::new(),
    }
    .run()
}

/// A command argument located in the raw source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arg {
    pub optional: bool,
    /// Offset of the opening `{` or `[`.
    pub open: usize,
    /// Inner content range.
    pub start: usize,
    pub end: usize,
}

impl Arg {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

/// Arguments immediately following offset `pos`: any run of `[...]` and
/// `{...}` groups with no whitespace in between.
pub fn args_after(src: &str, mut pos: usize) -> Vec<Arg> {
    let mut out = Vec::new();
    while let Some(c) = src[pos..].chars().next() {
        let (optional, close) = match c {
            '{' => (false, '}'),
            '[' => (true, ']'),
            _ => break,
        };
        let Some(end) = matching(src, pos, close) else {
            break;
        };
        out.push(Arg {
            optional,
            open: pos,
            start: pos + 1,
            end,
        });
        pos = end + 1;
    }
    out
}

/// Offset of the delimiter closing the group opened at `open`.
fn matching(src: &str, open: usize, close: char) -> Option<usize> {
    let mut depth = 0i32;
    let mut chars = src[open + 1..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => {
                chars.next();
            }
            '%' => {
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '{' => depth += 1,
            '}' if depth > 0 => depth -= 1,
            c if c == close && depth == 0 => return Some(open + 1 + i),
            '}' => return None,
            _ => {}
        }
    }
    None
}

/// Arguments of the command or environment marker at token `idx`.
/// Control symbols only take an optional argument (`\\[2em]`).
pub fn token_args(src: &str, token: &Token) -> Vec<Arg> {
    match &token.kind {
        TokenKind::Command(name)
            if name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '@') =>
        {
            args_after(src, token.span.end)
        }
        TokenKind::Command(name) if name == "\\" => args_after(src, token.span.end)
            .into_iter()
            .take_while(|a| a.optional)
            .take(1)
            .collect(),
        TokenKind::Begin(_) => args_after(src, token.span.end),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn command_with_group_argument() {
        let src = "\\textbf{+}";
        let lexed = lex(src);
        assert_eq!(
            lexed
                .tokens
                .iter()
                .map(|t| t.kind.clone())
                .collect::<Vec<_>>(),
            [
                TokenKind::Command("textbf".into()),
                TokenKind::OpenGroup,
                TokenKind::Text("+".into()),
                TokenKind::CloseGroup
            ]
        );
        let args = token_args(src, &lexed.tokens[0]);
        assert_eq!(args.len(), 1);
        assert_eq!(args[0].text(src), "+");
        assert!(lexed.errors.is_empty());
    }

    #[test]
    fn mismatched_environment_reported_at_end_token() {
        let src = "\\begin{itemize}\n\\item a\n\\end{enumerate}";
        let lexed = lex(src);
        assert_eq!(lexed.errors.len(), 1);
        let e = &lexed.errors[0];
        assert_eq!(
            e.kind,
            LexErrorKind::UnbalancedEnvironment {
                expected: Some("itemize".into()),
                found: Some("enumerate".into())
            }
        );
        assert_eq!((e.span.line, e.span.col), (3, 1));
    }

    #[test]
    fn comments_are_tokens() {
        assert_eq!(
            kinds("a % \\textit{x}\nb"),
            [
                TokenKind::Text("a ".into()),
                TokenKind::Comment(" \\textit{x}".into()),
                TokenKind::Text("\nb".into())
            ]
        );
        assert_eq!(
            kinds("50\\% off"),
            [
                TokenKind::Text("50".into()),
                TokenKind::Command("%".into()),
                TokenKind::Text(" off".into())
            ]
        );
    }

    #[test]
    fn starred_commands_and_environments() {
        assert_eq!(
            kinds("\\section*{A}\\begin{align*}x\\end{align*}"),
            [
                TokenKind::Command("section*".into()),
                TokenKind::OpenGroup,
                TokenKind::Text("A".into()),
                TokenKind::CloseGroup,
                TokenKind::Begin("align*".into()),
                TokenKind::Text("x".into()),
                TokenKind::End("align*".into()),
            ]
        );
    }

    #[test]
    fn paragraph_breaks_and_math() {
        assert_eq!(
            kinds("one\n\n  \ntwo $x$ $$y$$"),
            [
                TokenKind::Text("one".into()),
                TokenKind::ParBreak,
                TokenKind::Text("two ".into()),
                TokenKind::MathShift { display: false },
                TokenKind::Text("x".into()),
                TokenKind::MathShift { display: false },
                TokenKind::Text(" ".into()),
                TokenKind::MathShift { display: true },
                TokenKind::Text("y".into()),
                TokenKind::MathShift { display: true },
            ]
        );
    }

    #[test]
    fn unbalanced_groups() {
        let lexed = lex("{a}}\n{b");
        assert_eq!(lexed.errors.len(), 2);
        assert!(lexed
            .errors
            .iter()
            .all(|e| e.kind == LexErrorKind::UnbalancedGroup));
        assert_eq!(
            (lexed.errors[0].span.line, lexed.errors[0].span.col),
            (1, 4)
        );
        assert_eq!(
            (lexed.errors[1].span.line, lexed.errors[1].span.col),
            (2, 1)
        );
    }

    #[test]
    fn verbatim_body_is_raw() {
        let k = kinds("\\begin{verbatim}\\write18{x} {\\end{verbatim}");
        assert_eq!(k[1], TokenKind::Text("\\write18{x} {".into()));
        assert!(lex("\\begin{verbatim}{\\end{verbatim}").errors.is_empty());
    }

    #[test]
    fn optional_and_mandatory_args() {
        let src = "\\titleformat{\\section}{\\Large\\bfseries}[x]{}";
        let lexed = lex(src);
        let args = token_args(src, &lexed.tokens[0]);
        assert_eq!(
            args.iter()
                .map(|a| (a.optional, a.text(src)))
                .collect::<Vec<_>>(),
            [
                (false, "\\section"),
                (false, "\\Large\\bfseries"),
                (true, "x"),
                (false, ""),
            ]
        );
        let nl = "a\\\\[2em]b";
        let lexed = lex(nl);
        assert_eq!(token_args(nl, &lexed.tokens[1])[0].text(nl), "2em");
    }

    #[test]
    fn columns_count_chars() {
        let lexed = lex("äö \\x");
        assert_eq!(lexed.tokens[1].span.col, 4);
    }
}
