//! Agent prompts, reply parsing and the repair loop, driven by scripted replies.

mod common;

use std::sync::Arc;

use common::*;
use sheetsmith::agents::{AgentConfig, AgentError, AgentSuite};
use sheetsmith::core::{
    derive_directives, parse_diagnosis, Completion, KnowledgePack, PackKind, RepairPolicy, RoleTag,
    Speaker,
};
use sheetsmith::gateway::{Gateway, GatewayError, ScriptedProvider};

const MALFORMED: &str = "I think the student is weak. {\"Performance level\": \"poor\"}";

fn gateway(p: &Arc<ScriptedProvider>) -> Gateway {
    Gateway::new(p.clone())
}

fn protocol() -> sheetsmith::core::ThoughtProtocol {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Learner, reply("dyslexia", RoleTag::Learner));
    AgentSuite::default()
        .run_learner(
            &weak_reader(),
            &fractions_task(),
            &gateway(&p).for_session("s"),
        )
        .unwrap()
}

#[test]
fn learner_prompt_carries_persona_errors_and_task() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Learner, reply("dyslexia", RoleTag::Learner));
    let gw = gateway(&p);
    let out = AgentSuite::default()
        .run_learner(&weak_reader(), &fractions_task(), &gw.for_session("s"))
        .unwrap();
    assert_eq!(out.completion, Completion::Abandoned);
    assert_eq!(out.profile_id.as_str(), "weak-reader");
    let req = &gw.transcript().entries()[0].request;
    assert_eq!(req.temperature, 0.9);
    assert!(req.system_prompt.contains(&weak_reader().persona_text));
    assert!(req.system_prompt.contains(
        "Typical errors you make: adding numerators and denominators separately; skipping words in the instructions."
    ));
    assert_eq!(req.messages.len(), 1);
    assert_eq!(req.messages[0].text, fractions_task().statement);
}

#[test]
fn repair_loop_succeeds_on_third_attempt() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Assessment, MALFORMED)
        .push(RoleTag::Assessment, "")
        .push(RoleTag::Assessment, reply("dyslexia", RoleTag::Assessment));
    let gw = gateway(&p);
    let out = AgentSuite::default()
        .run_assessment(
            &fractions_task(),
            &protocol(),
            &weak_reader(),
            &gw.for_session("s"),
        )
        .unwrap();
    assert_eq!(out.retries, 2);
    assert!(out.value.reading_impairment);
    let entries = gw.transcript().for_session("s");
    assert_eq!(entries.len(), 3);
    // Each retry replays the conversation so far plus a repair request naming the bad path.
    let last = &entries[2].request.messages;
    assert_eq!(last.len(), 5);
    assert_eq!(last[1].speaker, Speaker::Assistant);
    assert_eq!(last[1].text, MALFORMED);
    assert!(
        last[2].text.contains("performance_level"),
        "{}",
        last[2].text
    );
    assert_eq!(last[3].text, "(empty reply)");
    let hashes: std::collections::BTreeSet<_> = entries
        .iter()
        .map(|e| e.request.request_hash.clone())
        .collect();
    assert_eq!(hashes.len(), 3);
}

#[test]
fn repair_loop_gives_up_after_max_attempts() {
    let p = Arc::new(ScriptedProvider::new());
    for _ in 0..3 {
        p.push(RoleTag::Assessment, MALFORMED);
    }
    let gw = gateway(&p);
    let err = AgentSuite::default()
        .run_assessment(
            &fractions_task(),
            &protocol(),
            &weak_reader(),
            &gw.for_session("s"),
        )
        .unwrap_err();
    match err {
        AgentError::DiagnosisUnrecoverable {
            attempts,
            violations,
        } => {
            assert_eq!(attempts, 3);
            assert_eq!(violations.len(), 3);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(gw.transcript().calls("s", RoleTag::Assessment), 3);
}

#[test]
fn max_attempts_one_means_no_repair() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Evaluator, "{}")
        .push(RoleTag::Evaluator, reply("dyslexia", RoleTag::Evaluator));
    let suite = AgentSuite {
        config: AgentConfig {
            repair: RepairPolicy::new(1),
            ..AgentConfig::default()
        },
        ..AgentSuite::default()
    };
    let gw = gateway(&p);
    let err = suite
        .run_evaluator(
            &worksheet("dyslexia_compliant.tex"),
            "persona",
            &gw.for_session("s"),
        )
        .unwrap_err();
    assert!(matches!(
        err,
        AgentError::EvaluationUnrecoverable { attempts: 1, .. }
    ));
    assert_eq!(p.remaining(RoleTag::Evaluator), 1);
}

#[test]
fn gateway_errors_abort_the_repair_loop() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Assessment, MALFORMED)
        .push_error(RoleTag::Assessment, GatewayError::Timeout { seconds: 120 })
        .push(RoleTag::Assessment, reply("dyslexia", RoleTag::Assessment));
    let err = AgentSuite::default()
        .run_assessment(
            &fractions_task(),
            &protocol(),
            &weak_reader(),
            &gateway(&p).for_session("s"),
        )
        .unwrap_err();
    assert!(matches!(
        err,
        AgentError::Gateway(GatewayError::Timeout { seconds: 120 })
    ));
}

#[test]
fn generator_sees_diagnosis_directives_and_packs() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Generator, reply("dyslexia", RoleTag::Generator));
    let gw = gateway(&p);
    let diagnosis = parse_diagnosis(&reply("dyslexia", RoleTag::Assessment)).unwrap();
    let directives = derive_directives(&diagnosis);
    let latex = AgentSuite::default()
        .run_generator(
            &fractions_task(),
            &protocol(),
            &diagnosis,
            &directives,
            &[curriculum_pack()],
            &gw.for_session("s"),
        )
        .unwrap();
    assert_eq!(
        latex.trim_end(),
        worksheet("dyslexia_compliant.tex").trim_end()
    );
    let req = &gw.transcript().entries()[0].request;
    assert!(req
        .system_prompt
        .contains("## Grade 6 fractions\nStudents add and subtract"));
    let user = &req.messages[0].text;
    assert!(
        user.contains("\"performance_level\":\"weak\"")
            || user.contains("\"performance_level\": \"weak\""),
        "{user}"
    );
    assert!(user.contains(&directives.summary()));
}

#[test]
fn generator_without_packs_says_so() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(
        RoleTag::Generator,
        "\\documentclass{article}\\begin{document}x\\end{document}",
    );
    let gw = gateway(&p);
    let diagnosis = parse_diagnosis(&reply("dyslexia", RoleTag::Assessment)).unwrap();
    AgentSuite::default()
        .run_generator(
            &fractions_task(),
            &protocol(),
            &diagnosis,
            &derive_directives(&diagnosis),
            &[],
            &gw.for_session("s"),
        )
        .unwrap();
    assert!(gw.transcript().entries()[0]
        .request
        .system_prompt
        .contains("(none provided)"));
}

#[test]
fn pack_budget_is_checked_before_any_call() {
    let p = Arc::new(ScriptedProvider::new());
    let big = KnowledgePack {
        id: "big".into(),
        kind: PackKind::Didactics,
        title: "Big".into(),
        body: "x".repeat(8_001),
    };
    let diagnosis = parse_diagnosis(&reply("dyslexia", RoleTag::Assessment)).unwrap();
    let gw = gateway(&p);
    let err = AgentSuite::default()
        .run_generator(
            &fractions_task(),
            &protocol(),
            &diagnosis,
            &derive_directives(&diagnosis),
            &[big],
            &gw.for_session("s"),
        )
        .unwrap_err();
    assert!(matches!(
        err,
        AgentError::ContextBudgetExceeded {
            total: 8_001,
            budget: 8_000
        }
    ));
    assert!(gw.transcript().is_empty());
}

#[test]
fn empty_generator_reply_is_an_error() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Generator, "  \n");
    let diagnosis = parse_diagnosis(&reply("dyslexia", RoleTag::Assessment)).unwrap();
    let err = AgentSuite::default()
        .run_generator(
            &fractions_task(),
            &protocol(),
            &diagnosis,
            &derive_directives(&diagnosis),
            &[],
            &gateway(&p).for_session("s"),
        )
        .unwrap_err();
    assert!(matches!(err, AgentError::EmptyReply { role: "generator" }));
}

#[test]
fn evaluator_prompt_holds_only_worksheet_persona_and_rubric() {
    let p = Arc::new(ScriptedProvider::new());
    p.push(RoleTag::Evaluator, reply("dyslexia", RoleTag::Evaluator));
    let gw = gateway(&p);
    let latex = worksheet("dyslexia_compliant.tex");
    let persona = weak_reader().persona_text;
    let out = AgentSuite::default()
        .run_evaluator(&latex, &persona, &gw.for_session("s"))
        .unwrap();
    assert_eq!(out.retries, 0);
    let req = &gw.transcript().entries()[0].request;
    assert_eq!(req.temperature, 0.1);
    let payload = req.payload_text();
    assert!(payload.contains(&latex));
    assert!(payload.contains(&persona));
    assert!(req
        .system_prompt
        .contains(&sheetsmith::core::rubric::anchor_table()));
    for leaked in [
        "Performance level",
        "performance_level",
        "memory log",
        "I give up",
    ] {
        assert!(!payload.contains(leaked), "{leaked}");
    }
}
