//! PDF and docx export through external commands.
//!
//! Commands are argv lists, never passed through a shell. Placeholders:
//! `{input}` is the `main.tex` path, `{outdir}` the scratch directory and
//! `{output}` the file the command must produce (`main.pdf` or
//! `main.docx`). Each run gets a fresh temp directory with TeX's
//! shell escape and out-of-tree file access switched off in the
//! environment.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sheetsmith_core::ExportKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolchainConfig {
    pub latex_compiler_cmd: Option<Vec<String>>,
    pub docx_converter_cmd: Option<Vec<String>>,
    pub render_timeout_s: u64,
}

impl Default for ToolchainConfig {
    fn default() -> Self {
        Self {
            latex_compiler_cmd: None,
            docx_converter_cmd: None,
            render_timeout_s: 60,
        }
    }
}

impl ToolchainConfig {
    pub fn command(&self, kind: ExportKind) -> Option<&[String]> {
        match kind {
            ExportKind::Pdf => self.latex_compiler_cmd.as_deref(),
            ExportKind::Docx => self.docx_converter_cmd.as_deref(),
        }
        .filter(|c| !c.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenderOutcome {
    Produced {
        bytes: Vec<u8>,
        page_count: Option<u32>,
    },
    Skipped {
        reason: String,
    },
    Failed {
        log_excerpt: String,
    },
}

const EXCERPT_LINES: usize = 20;

pub fn render(kind: ExportKind, latex: &str, cfg: &ToolchainConfig) -> RenderOutcome {
    let Some(argv) = cfg.command(kind) else {
        return RenderOutcome::Skipped {
            reason: format!("no {} toolchain configured", kind.extension()),
        };
    };
    match run(
        kind,
        latex,
        argv,
        Duration::from_secs(cfg.render_timeout_s.max(1)),
    ) {
        Ok(o) => o,
        Err(e) => RenderOutcome::Failed {
            log_excerpt: e.to_string(),
        },
    }
}

fn run(
    kind: ExportKind,
    latex: &str,
    argv: &[String],
    timeout: Duration,
) -> std::io::Result<RenderOutcome> {
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("main.tex");
    let output = dir.path().join(format!("main.{}", kind.extension()));
    std::fs::write(&input, latex)?;
    let fill = |a: &String| {
        a.replace("{input}", &input.to_string_lossy())
            .replace("{outdir}", &dir.path().to_string_lossy())
            .replace("{output}", &output.to_string_lossy())
    };
    let mut child = Command::new(fill(&argv[0]))
        .args(argv[1..].iter().map(fill))
        .current_dir(dir.path())
        .env("shell_escape", "f")
        .env("openout_any", "p")
        .env("openin_any", "p")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    // Drain pipes on threads so a chatty compiler cannot block on a full pipe.
    let drain = |r: Option<Box<dyn Read + Send>>| {
        thread::spawn(move || {
            let mut buf = String::new();
            if let Some(mut r) = r {
                let mut bytes = Vec::new();
                let _ = r.read_to_end(&mut bytes);
                buf = String::from_utf8_lossy(&bytes).into_owned();
            }
            buf
        })
    };
    let out = drain(
        child
            .stdout
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
    );
    let err = drain(
        child
            .stderr
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
    );
    let started = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if started.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(20));
    };
    let mut log = out.join().unwrap_or_default();
    log.push_str(&err.join().unwrap_or_default());
    if let Ok(file_log) = std::fs::read_to_string(dir.path().join("main.log")) {
        log.push_str(&file_log);
    }
    let Some(status) = status else {
        return Ok(RenderOutcome::Failed {
            log_excerpt: format!("timed out after {}s", timeout.as_secs()),
        });
    };
    match std::fs::read(&output) {
        Ok(bytes) if status.success() && !bytes.is_empty() => {
            let page_count = (kind == ExportKind::Pdf).then(|| pdf_page_count(&bytes));
            Ok(RenderOutcome::Produced { bytes, page_count })
        }
        _ => Ok(RenderOutcome::Failed {
            log_excerpt: log_excerpt(&log, status.code(), &output),
        }),
    }
}

/// The first TeX error (`!` line plus two lines of context), or the log tail.
pub fn log_excerpt(log: &str, code: Option<i32>, output: &Path) -> String {
    let lines: Vec<&str> = log.lines().collect();
    if let Some(i) = lines.iter().position(|l| l.starts_with('!')) {
        return lines[i..lines.len().min(i + 3)].join("\n");
    }
    let tail = lines[lines.len().saturating_sub(EXCERPT_LINES)..].join("\n");
    let status = code.map_or("killed by signal".to_string(), |c| {
        format!("exit status {c}")
    });
    if tail.trim().is_empty() {
        format!(
            "{status}; {} not produced",
            output
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("output")
        )
    } else {
        tail
    }
}

/// Number of `/Type /Page` objects, not counting `/Type /Pages` nodes.
pub fn pdf_page_count(pdf: &[u8]) -> u32 {
    let mut count = 0;
    let mut i = 0;
    while let Some(off) = find(&pdf[i..], b"/Type") {
        let mut j = i + off + 5;
        while pdf.get(j).is_some_and(|b| b.is_ascii_whitespace()) {
            j += 1;
        }
        if pdf[j..].starts_with(b"/Page")
            && !pdf.get(j + 5).is_some_and(|b| b.is_ascii_alphanumeric())
        {
            count += 1;
        }
        i = j;
    }
    count
}

fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skipped_without_toolchain() {
        let out = render(ExportKind::Pdf, "x", &ToolchainConfig::default());
        assert_eq!(
            out,
            RenderOutcome::Skipped {
                reason: "no pdf toolchain configured".into()
            }
        );
    }

    #[test]
    fn page_counting() {
        let pdf = b"<< /Type /Pages /Count 2 >> << /Type /Page >> << /Type/Page /Parent 1 0 R >> << /Type /PageLabel >>";
        assert_eq!(pdf_page_count(pdf), 2);
        assert_eq!(pdf_page_count(b""), 0);
    }

    #[test]
    fn excerpt_prefers_first_error() {
        let log = "This is pdfTeX\n! Undefined control sequence.\nl.5 \\foo\n   bar\n! Second";
        assert_eq!(
            log_excerpt(log, Some(1), Path::new("main.pdf")),
            "! Undefined control sequence.\nl.5 \\foo\n   bar"
        );
        assert_eq!(
            log_excerpt("", Some(2), Path::new("/t/main.pdf")),
            "exit status 2; main.pdf not produced"
        );
    }
}
