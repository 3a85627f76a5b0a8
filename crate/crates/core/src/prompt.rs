//! Versioned prompt templates with `{{slot}}` placeholders.
//!
//! A template file starts with a `version: <v>` line followed by named
//! blocks, each introduced by a `[[name]]` header line. Blocks named
//! `system.*` are joined into the system prompt, `user.*` blocks into the
//! first user message. Slot values are inserted literally and are never
//! re-scanned, so LaTeX braces in a value are safe.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::chat::RoleTag;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("template has no `version:` header")]
    MissingVersion,
    #[error("block header {0:?} must be named system.<x> or user.<x>")]
    BadBlockName(String),
    #[error("text before the first block header at line {0}")]
    StrayText(usize),
    #[error("template has no user block")]
    NoUserBlock,
    #[error("unterminated placeholder in block {block}")]
    UnterminatedPlaceholder { block: String },
    #[error("placeholder {{{{{slot}}}}} in block {block} was not filled")]
    UnfilledPlaceholder { block: String, slot: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub role_tag: RoleTag,
    pub version: String,
    pub blocks: Vec<Block>,
}

/// A rendered prompt: system text plus the first user message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub system: String,
    pub user: String,
}

impl PromptTemplate {
    pub fn parse(role_tag: RoleTag, source: &str) -> Result<Self, TemplateError> {
        let mut lines = source
            .lines()
            .enumerate()
            .skip_while(|(_, l)| l.trim().is_empty());
        let version = lines
            .next()
            .and_then(|(_, l)| l.trim().strip_prefix("version:"))
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .ok_or(TemplateError::MissingVersion)?;

        let mut blocks: Vec<Block> = Vec::new();
        for (n, line) in lines {
            let trimmed = line.trim();
            if let Some(name) = trimmed
                .strip_prefix("[[")
                .and_then(|r| r.strip_suffix("]]"))
            {
                let valid = name.split_once('.').is_some_and(|(scope, rest)| {
                    matches!(scope, "system" | "user") && !rest.is_empty()
                });
                if !valid {
                    return Err(TemplateError::BadBlockName(name.to_string()));
                }
                blocks.push(Block {
                    name: name.to_string(),
                    text: String::new(),
                });
            } else if let Some(block) = blocks.last_mut() {
                if !block.text.is_empty() || !trimmed.is_empty() {
                    block.text.push_str(line);
                    block.text.push('\n');
                }
            } else if !trimmed.is_empty() {
                return Err(TemplateError::StrayText(n + 1));
            }
        }
        for b in &mut blocks {
            b.text.truncate(b.text.trim_end().len());
        }
        if !blocks.iter().any(|b| b.name.starts_with("user.")) {
            return Err(TemplateError::NoUserBlock);
        }
        let template = Self {
            role_tag,
            version,
            blocks,
        };
        for b in &template.blocks {
            slots_in(&b.text).map_err(|()| TemplateError::UnterminatedPlaceholder {
                block: b.name.clone(),
            })?;
        }
        Ok(template)
    }

    /// Every slot name referenced by the template, in first-use order.
    pub fn slots(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for b in &self.blocks {
            for s in slots_in(&b.text).unwrap_or_default() {
                if !out.iter().any(|o| *o == s) {
                    out.push(s.to_string());
                }
            }
        }
        out
    }

    /// Fails on the first slot without a value.
    pub fn render(&self, values: &BTreeMap<&str, &str>) -> Result<RenderedPrompt, TemplateError> {
        let mut system = Vec::new();
        let mut user = Vec::new();
        for block in &self.blocks {
            let text =
                fill(&block.text, values).map_err(|slot| TemplateError::UnfilledPlaceholder {
                    block: block.name.clone(),
                    slot,
                })?;
            if block.name.starts_with("system.") {
                system.push(text);
            } else {
                user.push(text);
            }
        }
        Ok(RenderedPrompt {
            system: system.join("\n\n"),
            user: user.join("\n\n"),
        })
    }
}

fn slots_in(text: &str) -> Result<Vec<&str>, ()> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find("{{") {
        let after = &rest[i + 2..];
        let end = after.find("}}").ok_or(())?;
        out.push(after[..end].trim());
        rest = &after[end + 2..];
    }
    Ok(out)
}

fn fill(text: &str, values: &BTreeMap<&str, &str>) -> Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find("{{") {
        out.push_str(&rest[..i]);
        let after = &rest[i + 2..];
        // parse() rejected unterminated placeholders.
        let end = after.find("}}").unwrap_or(after.len());
        let slot = after[..end].trim();
        out.push_str(values.get(slot).ok_or_else(|| slot.to_string())?);
        rest = after.get(end + 2..).unwrap_or("");
    }
    out.push_str(rest);
    Ok(out)
}

pub const LEARNER_SOURCE: &str = include_str!("../templates/learner.txt");
pub const ASSESSMENT_SOURCE: &str = include_str!("../templates/assessment.txt");
pub const GENERATOR_SOURCE: &str = include_str!("../templates/generator.txt");
pub const EVALUATOR_SOURCE: &str = include_str!("../templates/evaluator.txt");

/// One template per agent role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub learner: PromptTemplate,
    pub assessment: PromptTemplate,
    pub generator: PromptTemplate,
    pub evaluator: PromptTemplate,
}

impl TemplateSet {
    /// The templates compiled into the crate.
    pub fn builtin() -> Self {
        let parse = |role, src| PromptTemplate::parse(role, src).expect("builtin template parses");
        Self {
            learner: parse(RoleTag::Learner, LEARNER_SOURCE),
            assessment: parse(RoleTag::Assessment, ASSESSMENT_SOURCE),
            generator: parse(RoleTag::Generator, GENERATOR_SOURCE),
            evaluator: parse(RoleTag::Evaluator, EVALUATOR_SOURCE),
        }
    }

    pub fn get(&self, role: RoleTag) -> &PromptTemplate {
        match role {
            RoleTag::Learner => &self.learner,
            RoleTag::Assessment => &self.assessment,
            RoleTag::Generator => &self.generator,
            RoleTag::Evaluator => &self.evaluator,
        }
    }

    pub fn get_mut(&mut self, role: RoleTag) -> &mut PromptTemplate {
        match role {
            RoleTag::Learner => &mut self.learner,
            RoleTag::Assessment => &mut self.assessment,
            RoleTag::Generator => &mut self.generator,
            RoleTag::Evaluator => &mut self.evaluator,
        }
    }

    /// File name used for each role when templates are loaded from a directory.
    pub fn file_name(role: RoleTag) -> &'static str {
        match role {
            RoleTag::Learner => "learner.txt",
            RoleTag::Assessment => "assessment.txt",
            RoleTag::Generator => "generator.txt",
            RoleTag::Evaluator => "evaluator.txt",
        }
    }
}
