//! JSON messages exchanged over `/ws`.

use coopcraft::{EnvConfig, ObsLayout};
use serde::{Deserialize, Serialize};

use crate::view::{Summary, View};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMsg {
    /// Take `seat` in `session`, creating the session if needed. Without a
    /// seat the first bot-controlled one is taken.
    Join {
        session: String,
        #[serde(default)]
        seat: Option<usize>,
    },
    /// Buffer an action for the next tick; the last one sent wins.
    Action {
        id: u16,
    },
    Start,
    /// Stream a recorded episode as seen from `seat` at `speed` steps per
    /// second (0 for as fast as possible).
    RequestReplay {
        file: String,
        #[serde(default)]
        seat: usize,
        #[serde(default)]
        speed: Option<f32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ServerMsg {
    Hello {
        session: String,
        seat: usize,
        manifests: Manifests,
    },
    State {
        step: u64,
        view: Box<View>,
    },
    Done {
        summary: Summary,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
}

impl ServerMsg {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerMsg::Error {
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Malformed,
    BadSession,
    BadSeat,
    SeatTaken,
    SessionFull,
    AlreadyJoined,
    NotJoined,
    NotInLobby,
    Finished,
    UnknownAction,
    ReplayNotFound,
    BadReplay,
}

/// Everything a client needs to interpret `state` messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifests {
    pub engine_version: String,
    pub config: EnvConfig,
    pub obs_layout: ObsLayout,
    pub action_table: Vec<(u16, String)>,
    pub tick_hz: f32,
}
