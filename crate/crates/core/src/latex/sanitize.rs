//! Rejects LaTeX that could run shell commands or read outside the
//! compile directory.
//!
//! Flagged constructs: `\write18`, `\immediate\write`, `\openout`,
//! `\openin`, `\directlua`, `\ShellEscape`, `\catcode`, `\csname`
//! spellings of `write`, the `shellesc` package, file inclusion with an
//! absolute, parent, home or pipe path, and shell-escape pragmas in
//! comments. The source is returned unchanged when nothing is flagged.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::lexer::{lex, token_args, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityIssue {
    /// The offending construct as written, e.g. `\write18`.
    pub construct: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub struct SecurityViolation {
    pub issues: Vec<SecurityIssue>,
}

impl fmt::Display for SecurityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unsafe LaTeX:")?;
        for (n, i) in self.issues.iter().enumerate() {
            let sep = if n == 0 { " " } else { "; " };
            write!(f, "{sep}{} at {}:{}", i.construct, i.line, i.col)?;
        }
        Ok(())
    }
}

const FORBIDDEN: &[&str] = &[
    "openout",
    "openin",
    "directlua",
    "luaexec",
    "ShellEscape",
    "catcode",
];
const FILE_COMMANDS: &[&str] = &[
    "input",
    "include",
    "InputIfFileExists",
    "lstinputlisting",
    "verbatiminput",
    "includegraphics",
    "includepdf",
    "import",
    "subimport",
    "inputminted",
    "VerbatimInput",
];
const PRAGMAS: &[&str] = &["shell-escape", "shell_escape", "enable-write18"];

fn escapes(path: &str) -> bool {
    let p = path.trim().trim_matches('"');
    p.starts_with('/')
        || p.starts_with('\\')
        || p.starts_with('~')
        || p.starts_with('|')
        || p.contains("..")
        || p.contains(':')
}

/// Returns the source unchanged, or every unsafe construct found.
pub fn sanitize(src: &str) -> Result<String, SecurityViolation> {
    let lexed = lex(src);
    let tokens = &lexed.tokens;
    let mut issues = Vec::new();
    let mut flag = |offset: usize, construct: String| {
        let (line, col) = lexed.lines.position(src, offset);
        issues.push(SecurityIssue {
            construct,
            line,
            col,
        });
    };
    // Next token that is not whitespace text.
    let next_significant = |i: usize| {
        tokens[i + 1..]
            .iter()
            .find(|t| !matches!(&t.kind, TokenKind::Text(s) if s.trim().is_empty()))
    };

    for (i, t) in tokens.iter().enumerate() {
        let start = t.span.start;
        match &t.kind {
            TokenKind::Comment(c) => {
                let lower = c.to_lowercase();
                if let Some(p) = PRAGMAS.iter().find(|p| lower.contains(*p)) {
                    flag(start, format!("%{p}"));
                }
            }
            TokenKind::Command(name) => match name.as_str() {
                "write" => {
                    if src[t.span.end..].trim_start().starts_with("18") {
                        flag(start, "\\write18".into());
                    }
                }
                "immediate" => {
                    if next_significant(i).is_some_and(|n| n.is_command("write")) {
                        flag(start, "\\immediate\\write".into());
                    }
                }
                "csname" => {
                    let rest = &src[t.span.end..];
                    let inner = rest.find("\\endcsname").map_or(rest, |e| &rest[..e]);
                    if inner.contains("write") {
                        flag(start, "\\csname write".into());
                    }
                }
                "usepackage" | "RequirePackage" => {
                    let args = token_args(src, t);
                    if args
                        .iter()
                        .filter(|a| !a.optional)
                        .any(|a| a.text(src).split(',').any(|p| p.trim() == "shellesc"))
                    {
                        flag(start, "shellesc package".into());
                    }
                }
                n if FORBIDDEN.contains(&n) => flag(start, format!("\\{n}")),
                n if FILE_COMMANDS.contains(&n) => {
                    let args: Vec<_> = token_args(src, t)
                        .into_iter()
                        .filter(|a| !a.optional)
                        .collect();
                    let path_arg = if n == "inputminted" || n == "subimport" {
                        1
                    } else {
                        0
                    };
                    let path = match args.get(path_arg) {
                        Some(a) => a.text(src).to_string(),
                        None => {
                            // Unbraced form: `\input /etc/passwd` or `\input|"cmd"`.
                            let rest = src[t.span.end..].trim_start_matches([' ', '\t']);
                            rest.split(|c: char| c.is_whitespace() || c == '\\' || c == '{')
                                .next()
                                .unwrap_or("")
                                .to_string()
                        }
                    };
                    let dirs_escape = n == "import" || n == "subimport";
                    let dir_bad = dirs_escape && args.first().is_some_and(|a| escapes(a.text(src)));
                    if escapes(&path) || dir_bad {
                        flag(start, format!("\\{n}{{{}}}", path.trim()));
                    }
                }
                _ => {}
            },
            _ => {}
        }
    }
    if issues.is_empty() {
        Ok(src.to_string())
    } else {
        Err(SecurityViolation { issues })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constructs(src: &str) -> Vec<String> {
        sanitize(src)
            .unwrap_err()
            .issues
            .into_iter()
            .map(|i| i.construct)
            .collect()
    }

    #[test]
    fn safe_source_is_returned_unchanged() {
        let src =
            "\\documentclass{article}\n\\input{sections/intro}\n\\begin{document}x\\end{document}";
        assert_eq!(sanitize(src).unwrap(), src);
    }

    #[test]
    fn shell_escape_forms() {
        assert_eq!(constructs("\\write18{rm -rf /}"), ["\\write18"]);
        assert_eq!(
            constructs("\\immediate\\write18{ls}"),
            ["\\immediate\\write", "\\write18"]
        );
        assert_eq!(
            constructs("\\immediate \\write\\out{x}"),
            ["\\immediate\\write"]
        );
        assert_eq!(constructs("\\directlua{os.execute('x')}"), ["\\directlua"]);
        assert_eq!(
            constructs("\\csname wri\\endcsname\\csname write\\endcsname"),
            ["\\csname write"]
        );
        assert_eq!(constructs("\\usepackage{shellesc}"), ["shellesc package"]);
    }

    #[test]
    fn path_escapes() {
        assert_eq!(constructs("\\input{/etc/passwd}"), ["\\input{/etc/passwd}"]);
        assert_eq!(
            constructs("\\include{../../secret}"),
            ["\\include{../../secret}"]
        );
        assert_eq!(constructs("\\input|\"ls\""), ["\\input{|\"ls\"}"]);
        assert_eq!(
            constructs("\\includegraphics[width=2cm]{~/x.png}"),
            ["\\includegraphics{~/x.png}"]
        );
    }

    #[test]
    fn pragma_in_comment_and_positions() {
        let err = sanitize("ok\n% !TeX shell-escape = true\n").unwrap_err();
        assert_eq!(err.issues[0].construct, "%shell-escape");
        assert_eq!((err.issues[0].line, err.issues[0].col), (2, 1));
        assert!(err
            .to_string()
            .starts_with("unsafe LaTeX: %shell-escape at 2:1"));
    }

    #[test]
    fn escaped_text_is_not_a_command() {
        assert!(sanitize("Write 18 apples. \\textbf{write18}").is_ok());
    }
}
