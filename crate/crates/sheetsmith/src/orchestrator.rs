//! Session lifecycle: stage sequencing, persistence and the review gate.
//!
//! Every successful stage is persisted before [`Orchestrator::advance`]
//! returns. A failed stage leaves the state where it was and records a
//! [`StageFailure`] on the session, so advancing again retries it.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use chrono::{DateTime, Utc};
use sheetsmith_core::machine::{transition, IllegalTransition};
use sheetsmith_core::{
    derive_directives, lint, sanitize, ExportKind, ExportOutcome, KnowledgePack, LearnerProfile,
    LintFinding, LintOptions, LintProfile, PackId, PipelineSession, ProfileId, ReviewDecision,
    RoleTag, SchemaViolation, SecurityViolation, SessionId, SessionState, StageFailure, TaskId,
    TaskItem, Transition, Trigger, Verdict, WorksheetArtifact,
};

use crate::agents::{AgentError, AgentSuite};
use crate::gateway::{Gateway, GatewayError};
use crate::render::{render, RenderOutcome, ToolchainConfig};
use crate::store::{RecoveryReport, SessionStore, StoreError};

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Always the same instant; makes persisted sessions reproducible.
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

pub trait IdSource: Send + Sync {
    fn next_id(&self) -> String;
}

pub struct RandomIds;

impl IdSource for RandomIds {
    fn next_id(&self) -> String {
        uuid::Uuid::new_v4().to_string()
    }
}

/// `s-000001`, `s-000002`, ...
#[derive(Default)]
pub struct SequentialIds(AtomicU64);

impl IdSource for SequentialIds {
    fn next_id(&self) -> String {
        format!("s-{:06}", self.0.fetch_add(1, Ordering::SeqCst) + 1)
    }
}

/// Why a stage failed, for status mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureCause {
    /// The model provider misbehaved or was unreachable.
    Provider,
    /// Agent output or worksheet checks failed.
    Pipeline,
}

#[derive(Debug, thiserror::Error)]
pub enum OrchestratorError {
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unknown pack {0:?}")]
    UnknownPack(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("cannot {action} a session in state {}", .state.as_str())]
    IllegalState {
        state: SessionState,
        action: &'static str,
    },
    #[error(transparent)]
    Invalid(SchemaViolation),
    #[error(transparent)]
    Unsafe(SecurityViolation),
    #[error("edited worksheet has lint errors: {}", rule_list(.0))]
    LintBlocked(Vec<LintFinding>),
    #[error("stage {} failed: {message}", .stage.as_str())]
    StageFailed {
        stage: Trigger,
        cause: FailureCause,
        message: String,
        gateway_code: Option<&'static str>,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn rule_list(findings: &[LintFinding]) -> String {
    let mut ids: Vec<&str> = findings
        .iter()
        .filter(|f| f.is_error())
        .map(|f| f.rule_id.as_str())
        .collect();
    ids.dedup();
    ids.join(", ")
}

impl From<IllegalTransition> for OrchestratorError {
    fn from(e: IllegalTransition) -> Self {
        Self::IllegalState {
            state: e.from,
            action: e.trigger.as_str(),
        }
    }
}

struct StageError {
    cause: FailureCause,
    message: String,
    findings: Vec<LintFinding>,
    gateway_code: Option<&'static str>,
}

impl From<AgentError> for StageError {
    fn from(e: AgentError) -> Self {
        let (cause, gateway_code) = match &e {
            AgentError::Gateway(g) => (FailureCause::Provider, Some(g.code())),
            _ => (FailureCause::Pipeline, None),
        };
        Self {
            cause,
            message: e.to_string(),
            findings: Vec::new(),
            gateway_code,
        }
    }
}

impl From<GatewayError> for StageError {
    fn from(e: GatewayError) -> Self {
        AgentError::from(e).into()
    }
}

impl StageError {
    fn pipeline(message: impl Into<String>) -> Self {
        Self {
            cause: FailureCause::Pipeline,
            message: message.into(),
            findings: Vec::new(),
            gateway_code: None,
        }
    }
}

#[derive(Clone)]
pub struct Orchestrator {
    inner: Arc<Inner>,
}

struct Inner {
    store: SessionStore,
    gateway: Gateway,
    agents: AgentSuite,
    toolchain: ToolchainConfig,
    lint_options: LintOptions,
    clock: Box<dyn Clock>,
    ids: Box<dyn IdSource>,
    locks: Mutex<HashMap<SessionId, Arc<Mutex<()>>>>,
}

pub struct OrchestratorBuilder {
    store: SessionStore,
    gateway: Gateway,
    agents: AgentSuite,
    toolchain: ToolchainConfig,
    lint_options: LintOptions,
    clock: Box<dyn Clock>,
    ids: Box<dyn IdSource>,
}

impl OrchestratorBuilder {
    pub fn agents(mut self, agents: AgentSuite) -> Self {
        self.agents = agents;
        self
    }

    pub fn toolchain(mut self, toolchain: ToolchainConfig) -> Self {
        self.toolchain = toolchain;
        self
    }

    pub fn lint_options(mut self, opts: LintOptions) -> Self {
        self.lint_options = opts;
        self
    }

    pub fn clock(mut self, clock: impl Clock + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn ids(mut self, ids: impl IdSource + 'static) -> Self {
        self.ids = Box::new(ids);
        self
    }

    pub fn build(self) -> Orchestrator {
        Orchestrator {
            inner: Arc::new(Inner {
                store: self.store,
                gateway: self.gateway,
                agents: self.agents,
                toolchain: self.toolchain,
                lint_options: self.lint_options,
                clock: self.clock,
                ids: self.ids,
                locks: Mutex::default(),
            }),
        }
    }
}

impl Orchestrator {
    pub fn builder(store: SessionStore, gateway: Gateway) -> OrchestratorBuilder {
        OrchestratorBuilder {
            store,
            gateway,
            agents: AgentSuite::default(),
            toolchain: ToolchainConfig::default(),
            lint_options: LintOptions::default(),
            clock: Box::new(SystemClock),
            ids: Box::new(RandomIds),
        }
    }

    pub fn store(&self) -> &SessionStore {
        &self.inner.store
    }

    pub fn gateway(&self) -> &Gateway {
        &self.inner.gateway
    }

    pub fn toolchain(&self) -> &ToolchainConfig {
        &self.inner.toolchain
    }

    pub fn now(&self) -> DateTime<Utc> {
        self.inner.clock.now()
    }

    fn lock(&self, id: &SessionId) -> Arc<Mutex<()>> {
        self.inner
            .locks
            .lock()
            .expect("lock table")
            .entry(id.clone())
            .or_default()
            .clone()
    }

    pub fn session(&self, id: &str) -> Result<PipelineSession, OrchestratorError> {
        self.inner
            .store
            .load_session(id)?
            .ok_or_else(|| OrchestratorError::UnknownSession(id.into()))
    }

    pub fn create_session(
        &self,
        profile_id: &ProfileId,
        task_id: &TaskId,
        pack_ids: Option<Vec<PackId>>,
    ) -> Result<PipelineSession, OrchestratorError> {
        let store = &self.inner.store;
        if !store.contains::<LearnerProfile>(profile_id.as_str()) {
            return Err(OrchestratorError::UnknownProfile(profile_id.0.clone()));
        }
        if !store.contains::<TaskItem>(task_id.as_str()) {
            return Err(OrchestratorError::UnknownTask(task_id.0.clone()));
        }
        for p in pack_ids.iter().flatten() {
            if !store.contains::<KnowledgePack>(p.as_str()) {
                return Err(OrchestratorError::UnknownPack(p.0.clone()));
            }
        }
        let id = loop {
            let candidate = self.inner.ids.next_id();
            if !store.contains::<PipelineSession>(&candidate) {
                break SessionId(candidate);
            }
        };
        let mut session = PipelineSession::new(id, profile_id.clone(), task_id.clone(), self.now());
        session.pack_ids = pack_ids;
        store.save_session(&session)?;
        Ok(session)
    }

    /// Runs exactly one stage.
    pub fn advance(&self, id: &str) -> Result<PipelineSession, OrchestratorError> {
        let sid = SessionId(id.into());
        let lock = self.lock(&sid);
        let _guard = lock.lock().expect("session lock");
        let mut session = self.session(id)?;
        let Some(trigger) = session.state.next_stage() else {
            return Err(OrchestratorError::IllegalState {
                state: session.state,
                action: "advance",
            });
        };
        let result = self.run_stage(&mut session, trigger);
        let now = self.now();
        match result {
            Ok(()) => {
                self.commit(&mut session, trigger, now)?;
                Ok(session)
            }
            Err(e) => {
                tracing::warn!(session = id, stage = trigger.as_str(), error = %e.message, "stage failed");
                session.failure = Some(StageFailure {
                    stage: trigger,
                    message: e.message.clone(),
                    findings: e.findings,
                    at: now,
                });
                self.inner.store.save_session(&session)?;
                Err(OrchestratorError::StageFailed {
                    stage: trigger,
                    cause: e.cause,
                    message: e.message,
                    gateway_code: e.gateway_code,
                })
            }
        }
    }

    fn commit(
        &self,
        session: &mut PipelineSession,
        trigger: Trigger,
        at: DateTime<Utc>,
    ) -> Result<(), OrchestratorError> {
        let from = session.state;
        let to = transition(from, trigger)?;
        session.state = to;
        session.history.push(Transition {
            from,
            to,
            trigger,
            at,
        });
        session.failure = None;
        self.inner.store.save_session(session)?;
        Ok(())
    }

    /// Advances until the session awaits review. Stops at the first failure.
    pub fn run_to_review(&self, id: &str) -> Result<PipelineSession, OrchestratorError> {
        loop {
            let s = self.session(id)?;
            if s.state == SessionState::AwaitingReview || s.state.is_terminal() {
                return Ok(s);
            }
            self.advance(id)?;
        }
    }

    fn load_inputs(
        &self,
        session: &PipelineSession,
    ) -> Result<(LearnerProfile, TaskItem), StageError> {
        let store = &self.inner.store;
        let profile = store
            .get::<LearnerProfile>(session.profile_id.as_str())
            .map_err(|e| StageError::pipeline(e.to_string()))?
            .ok_or_else(|| {
                StageError::pipeline(format!(
                    "profile {:?} no longer exists",
                    session.profile_id.as_str()
                ))
            })?;
        let task = store
            .get::<TaskItem>(session.task_id.as_str())
            .map_err(|e| StageError::pipeline(e.to_string()))?
            .ok_or_else(|| {
                StageError::pipeline(format!(
                    "task {:?} no longer exists",
                    session.task_id.as_str()
                ))
            })?;
        Ok((profile, task))
    }

    fn packs(&self, session: &PipelineSession) -> Result<Vec<KnowledgePack>, StageError> {
        let store = &self.inner.store;
        match &session.pack_ids {
            None => store
                .list::<KnowledgePack>()
                .map_err(|e| StageError::pipeline(e.to_string())),
            Some(ids) => ids
                .iter()
                .map(|id| {
                    store
                        .get::<KnowledgePack>(id.as_str())
                        .map_err(|e| StageError::pipeline(e.to_string()))?
                        .ok_or_else(|| {
                            StageError::pipeline(format!("pack {:?} no longer exists", id.as_str()))
                        })
                })
                .collect(),
        }
    }

    fn run_stage(&self, session: &mut PipelineSession, trigger: Trigger) -> Result<(), StageError> {
        let agents = &self.inner.agents;
        let gw = self.inner.gateway.for_session(session.id.as_str());
        match trigger {
            Trigger::Simulate => {
                let (profile, task) = self.load_inputs(session)?;
                session.protocol = Some(agents.run_learner(&profile, &task, &gw)?);
            }
            Trigger::Diagnose => {
                let (profile, task) = self.load_inputs(session)?;
                let protocol = session
                    .protocol
                    .as_ref()
                    .expect("simulated sessions carry a protocol");
                let out = agents.run_assessment(&task, protocol, &profile, &gw)?;
                session
                    .retry_counts
                    .insert(RoleTag::Assessment, out.retries);
                session.diagnosis = Some(out.value);
            }
            Trigger::Generate => {
                let (_, task) = self.load_inputs(session)?;
                let packs = self.packs(session)?;
                let protocol = session
                    .protocol
                    .as_ref()
                    .expect("diagnosed sessions carry a protocol");
                let diagnosis = session
                    .diagnosis
                    .as_ref()
                    .expect("diagnosed sessions carry a diagnosis");
                let directives = derive_directives(diagnosis);
                let latex =
                    agents.run_generator(&task, protocol, diagnosis, &directives, &packs, &gw)?;
                let latex = sanitize(&latex).map_err(|v| StageError::pipeline(v.to_string()))?;
                let profile = LintProfile::from(directives.format_profile);
                let findings = self.lint(&latex, profile);
                if findings.iter().any(LintFinding::is_error) {
                    return Err(StageError {
                        cause: FailureCause::Pipeline,
                        message: format!("lint errors: {}", rule_list(&findings)),
                        findings,
                        gateway_code: None,
                    });
                }
                let worksheet = WorksheetArtifact {
                    latex_source: latex,
                    lint_report: findings,
                    exports: Default::default(),
                    generated_at: self.now(),
                    directives_snapshot: directives,
                };
                worksheet
                    .validate()
                    .map_err(|v| StageError::pipeline(v.to_string()))?;
                session.worksheet = Some(worksheet);
            }
            Trigger::Evaluate => {
                let (profile, _) = self.load_inputs(session)?;
                let latex = &session
                    .worksheet
                    .as_ref()
                    .expect("generated sessions carry a worksheet")
                    .latex_source;
                let out = agents.run_evaluator(latex, &profile.persona_text, &gw)?;
                session.retry_counts.insert(RoleTag::Evaluator, out.retries);
                session.evaluation = Some(out.value);
            }
            Trigger::SubmitReview => {}
            Trigger::ReviewAccept | Trigger::ReviewReject | Trigger::ReviewModify => {
                unreachable!("review triggers are not stages")
            }
        }
        Ok(())
    }

    /// Lints with the page count from a trial render when a compiler is set up.
    fn lint(&self, latex: &str, profile: LintProfile) -> Vec<LintFinding> {
        let mut opts = self.inner.lint_options.clone();
        if opts.page_count.is_none() {
            if let RenderOutcome::Produced { page_count, .. } =
                render(ExportKind::Pdf, latex, &self.inner.toolchain)
            {
                opts.page_count = page_count;
            }
        }
        lint(latex, profile, &opts)
    }

    pub fn apply_review(
        &self,
        id: &str,
        decision: ReviewDecision,
    ) -> Result<PipelineSession, OrchestratorError> {
        decision.validate().map_err(OrchestratorError::Invalid)?;
        let sid = SessionId(id.into());
        let lock = self.lock(&sid);
        let _guard = lock.lock().expect("session lock");
        let mut session = self.session(id)?;
        let trigger = match decision.verdict {
            Verdict::Accept => Trigger::ReviewAccept,
            Verdict::Reject => Trigger::ReviewReject,
            Verdict::Modify => Trigger::ReviewModify,
        };
        transition(session.state, trigger)?;
        let now = self.now();
        match decision.verdict {
            Verdict::Accept => {
                let worksheet = session
                    .worksheet
                    .as_mut()
                    .expect("reviewed sessions carry a worksheet");
                for kind in [ExportKind::Pdf, ExportKind::Docx] {
                    let outcome = match render(kind, &worksheet.latex_source, &self.inner.toolchain)
                    {
                        RenderOutcome::Produced { bytes, page_count } => ExportOutcome::Stored {
                            artifact: self.inner.store.put_blob(&bytes)?,
                            bytes: bytes.len() as u64,
                            page_count,
                        },
                        RenderOutcome::Skipped { reason } => ExportOutcome::Skipped { reason },
                        RenderOutcome::Failed { log_excerpt } => {
                            ExportOutcome::Failed { log_excerpt }
                        }
                    };
                    worksheet.exports.insert(kind, outcome);
                }
                session.review = Some(decision);
            }
            Verdict::Reject => session.review = Some(decision),
            Verdict::Modify => {
                let edited = decision
                    .edited_latex
                    .as_deref()
                    .expect("validated modify carries an edit");
                let latex = sanitize(edited).map_err(OrchestratorError::Unsafe)?;
                let old = session
                    .worksheet
                    .as_ref()
                    .expect("reviewed sessions carry a worksheet");
                let directives = old.directives_snapshot.clone();
                let findings = self.lint(&latex, LintProfile::from(directives.format_profile));
                if findings.iter().any(LintFinding::is_error) {
                    return Err(OrchestratorError::LintBlocked(findings));
                }
                let worksheet = WorksheetArtifact {
                    latex_source: latex,
                    lint_report: findings,
                    exports: Default::default(),
                    generated_at: now,
                    directives_snapshot: directives,
                };
                worksheet.validate().map_err(OrchestratorError::Invalid)?;
                session.worksheet = Some(worksheet);
                session.evaluation = None;
            }
        }
        self.commit(&mut session, trigger, now)?;
        Ok(session)
    }

    pub fn recover(&self) -> Result<RecoveryReport, OrchestratorError> {
        Ok(self.inner.store.recover()?)
    }
}
