//! Agent memories and the session transcript.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    ChatManager,
    ColumnTypeAnnotator,
    PlanGenerator,
    PlanExecutor,
}

impl AgentRole {
    pub const ALL: [AgentRole; 4] = [
        AgentRole::ChatManager,
        AgentRole::ColumnTypeAnnotator,
        AgentRole::PlanGenerator,
        AgentRole::PlanExecutor,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AgentRole::ChatManager => "chat_manager",
            AgentRole::ColumnTypeAnnotator => "column_type_annotator",
            AgentRole::PlanGenerator => "plan_generator",
            AgentRole::PlanExecutor => "plan_executor",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AgentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Workflow step tag. 0 is user input; 1 to 6 are the numbered steps:
/// deliver to annotator, annotation back, deliver to plan generator, plan
/// back, deliver to executor, result or error back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Step(u8);

impl Step {
    pub const INPUT: Step = Step(0);
    pub const TO_ANNOTATOR: Step = Step(1);
    pub const ANNOTATION: Step = Step(2);
    pub const TO_PLANNER: Step = Step(3);
    pub const PLAN: Step = Step(4);
    pub const TO_EXECUTOR: Step = Step(5);
    pub const RESULT: Step = Step(6);

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn badge(self) -> &'static str {
        ["⓪", "①", "②", "③", "④", "⑤", "⑥"][self.0 as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub seq: u64,
    pub agent: AgentRole,
    pub step: Step,
    pub content: String,
}

impl fmt::Display for TranscriptEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} {}: {}", self.seq, self.step.badge(), self.agent, self.content)
    }
}

/// Append-only message history of one agent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AgentMemory {
    messages: Vec<TranscriptEvent>,
}

impl AgentMemory {
    pub fn messages(&self) -> &[TranscriptEvent] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// True when every message of `other` appears here, in order.
    pub fn contains_in_order(&self, other: &AgentMemory) -> bool {
        let mut mine = self.messages.iter();
        other.messages.iter().all(|m| mine.any(|x| x == m))
    }
}

/// One memory per agent plus the full transcript.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Memories {
    agents: [AgentMemory; 4],
    transcript: Vec<TranscriptEvent>,
}

impl Memories {
    pub fn of(&self, role: AgentRole) -> &AgentMemory {
        &self.agents[role.index()]
    }

    pub fn transcript(&self) -> &[TranscriptEvent] {
        &self.transcript
    }

    /// Stores a message from `from` to `to`. The chat manager sees every
    /// message; sender and receiver keep their own copy.
    pub(crate) fn record(&mut self, from: AgentRole, to: AgentRole, step: Step, content: String) -> &TranscriptEvent {
        let event = TranscriptEvent {
            seq: self.transcript.len() as u64 + 1,
            agent: from,
            step,
            content,
        };
        self.agents[AgentRole::ChatManager.index()].messages.push(event.clone());
        for role in [from, to] {
            let memory = &mut self.agents[role.index()].messages;
            if role != AgentRole::ChatManager && memory.last() != Some(&event) {
                memory.push(event.clone());
            }
        }
        self.transcript.push(event);
        self.transcript.last().expect("just pushed")
    }
}
