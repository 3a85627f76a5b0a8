//! Per-token context: document body vs preamble, math mode, bold, prose.
//!
//! Arguments of known non-textual commands (lengths, labels, package
//! options, environment arguments) are not prose; neither are optional
//! arguments. Bold comes from bold-argument commands and the `\bfseries`
//! family of declarations, scoped to the enclosing group or environment.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::lexer::{token_args, Lexed, Token, TokenKind};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenContext {
    pub in_body: bool,
    pub math: bool,
    pub bold: bool,
    pub prose: bool,
    /// Command whose argument group encloses the token, innermost first.
    pub arg_cmd: Option<String>,
    /// Open environments, outermost first.
    pub envs: Vec<String>,
}

pub const MATH_ENVS: &[&str] = &[
    "equation",
    "equation*",
    "align",
    "align*",
    "gather",
    "gather*",
    "multline",
    "multline*",
    "math",
    "displaymath",
    "eqnarray",
    "eqnarray*",
    "flalign",
    "flalign*",
    "alignat",
    "alignat*",
];

const BOLD_ARG: &[&str] = &["textbf", "mathbf", "boldsymbol", "bm", "pmb", "mathbold"];
const UNBOLD_ARG: &[&str] = &["textmd", "textnormal"];
const BOLD_DECL: &[&str] = &["bfseries", "bf", "boldmath"];
const UNBOLD_DECL: &[&str] = &["mdseries", "normalfont", "unboldmath"];
const TEXT_ARG: &[&str] = &[
    "text",
    "textrm",
    "textbf",
    "textsf",
    "texttt",
    "textit",
    "textup",
    "textnormal",
    "mbox",
    "hbox",
    "fbox",
    "intertext",
];
const NON_PROSE_ARG: &[&str] = &[
    "begin",
    "vspace",
    "vspace*",
    "hspace",
    "hspace*",
    "setlength",
    "addtolength",
    "setstretch",
    "linespread",
    "rule",
    "includegraphics",
    "label",
    "ref",
    "eqref",
    "pageref",
    "cite",
    "usepackage",
    "RequirePackage",
    "documentclass",
    "newcommand",
    "renewcommand",
    "providecommand",
    "newenvironment",
    "renewenvironment",
    "fontsize",
    "titleformat",
    "titleformat*",
    "titlespacing",
    "titlespacing*",
    "color",
    "textcolor",
    "definecolor",
    "pagestyle",
    "thispagestyle",
    "geometry",
    "setlist",
    "input",
    "include",
    "url",
    "href",
    "setmainfont",
    "setsansfont",
    "sectionfont",
    "subsectionfont",
    "allsectionsfont",
    "setkomafont",
    "addtokomafont",
    "hypersetup",
    "newlength",
    "setcounter",
    "addtocounter",
    "AtBeginDocument",
];

#[derive(Debug, Clone)]
struct Frame {
    env: Option<String>,
    math: bool,
    bold: bool,
    prose: bool,
    arg_cmd: Option<String>,
}

/// Contexts aligned with `lexed.tokens`, plus the optional-argument ranges.
#[derive(Debug, Clone)]
pub struct Walk {
    pub contexts: Vec<TokenContext>,
    pub optional_ranges: Vec<(usize, usize)>,
}

impl Walk {
    pub fn in_optional(&self, offset: usize) -> bool {
        self.optional_ranges
            .iter()
            .any(|&(s, e)| s <= offset && offset < e)
    }

    /// Characters of a text token that lie outside optional arguments.
    pub fn visible_chars<'a>(
        &'a self,
        token: &'a Token,
    ) -> impl Iterator<Item = (usize, char)> + 'a {
        let text = match &token.kind {
            TokenKind::Text(t) => t.as_str(),
            _ => "",
        };
        text.char_indices()
            .map(move |(i, c)| (token.span.start + i, c))
            .filter(move |(o, _)| !self.in_optional(*o))
    }
}

pub fn walk(src: &str, lexed: &Lexed) -> Walk {
    let mut frames = alloc::vec![Frame {
        env: None,
        math: false,
        bold: false,
        prose: true,
        arg_cmd: None
    }];
    // Mandatory argument opening offsets and the command that owns them.
    let mut arg_owner: Vec<(usize, String)> = Vec::new();
    let mut optional_ranges = Vec::new();
    let mut in_body = false;
    let mut contexts = Vec::with_capacity(lexed.tokens.len());

    for token in &lexed.tokens {
        let top = frames.last().cloned().unwrap_or(Frame {
            env: None,
            math: false,
            bold: false,
            prose: true,
            arg_cmd: None,
        });
        let envs = frames.iter().filter_map(|f| f.env.clone()).collect();
        contexts.push(TokenContext {
            in_body,
            math: top.math,
            bold: top.bold,
            prose: in_body && top.prose && !top.math,
            arg_cmd: top.arg_cmd.clone(),
            envs,
        });

        let owner_name = match &token.kind {
            TokenKind::Command(n) => Some(n.as_str()),
            TokenKind::Begin(_) => Some("begin"),
            _ => None,
        };
        if let Some(name) = owner_name {
            for a in token_args(src, token) {
                if a.optional {
                    optional_ranges.push((a.open, a.end + 1));
                } else {
                    arg_owner.push((a.open, name.to_string()));
                }
            }
        }

        let top = frames.last_mut().expect("root frame");
        match &token.kind {
            TokenKind::OpenGroup => {
                let mut f = Frame {
                    env: None,
                    ..top.clone()
                };
                if let Some(pos) = arg_owner.iter().position(|(o, _)| *o == token.span.start) {
                    let (_, cmd) = arg_owner.swap_remove(pos);
                    let c = cmd.as_str();
                    if BOLD_ARG.contains(&c) {
                        f.bold = true;
                    }
                    if UNBOLD_ARG.contains(&c) {
                        f.bold = false;
                    }
                    if TEXT_ARG.contains(&c) {
                        f.math = false;
                    }
                    if NON_PROSE_ARG.contains(&c) {
                        f.prose = false;
                    }
                    f.arg_cmd = Some(cmd);
                }
                frames.push(f);
            }
            TokenKind::CloseGroup => {
                if frames.len() > 1 && frames.last().is_some_and(|f| f.env.is_none()) {
                    frames.pop();
                }
            }
            TokenKind::Begin(env) => {
                if env == "document" {
                    in_body = true;
                }
                let mut f = Frame {
                    env: Some(env.clone()),
                    ..top.clone()
                };
                if MATH_ENVS.contains(&env.as_str()) {
                    f.math = true;
                }
                frames.push(f);
            }
            TokenKind::End(env) => {
                if let Some(pos) = frames.iter().rposition(|f| f.env.as_deref() == Some(env)) {
                    frames.truncate(pos.max(1));
                }
                if env == "document" {
                    in_body = false;
                }
            }
            TokenKind::MathShift { .. } => top.math = !top.math,
            TokenKind::Command(name) => match name.as_str() {
                "(" | "[" => top.math = true,
                ")" | "]" => top.math = false,
                n if BOLD_DECL.contains(&n) => top.bold = true,
                n if UNBOLD_DECL.contains(&n) => top.bold = false,
                _ => {}
            },
            TokenKind::Text(_) | TokenKind::ParBreak | TokenKind::Comment(_) => {}
        }
    }
    Walk {
        contexts,
        optional_ranges,
    }
}
