//! Websocket gateway hosting live coopcraft sessions for browser clients.
//!
//! Each session runs its own simulation loop at a fixed tick rate. Humans
//! take seats over `/ws`; every seat nobody holds is played by a scripted
//! bot. Seats receive views decoded from their own observation only.

pub mod protocol;
mod server;
pub mod session;
pub mod view;

pub use protocol::{ClientMsg, ErrorCode, Manifests, ServerMsg};
pub use server::{router, session_seed, GatewayConfig};
pub use session::{Controller, Phase, Session, SessionInfo};
pub use view::{Summary, View};
