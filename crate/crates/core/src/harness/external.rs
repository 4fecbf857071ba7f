//! Line-delimited JSON protocol for out-of-process policies.
//!
//! Each decision sends one request line and expects one response line:
//!
//! ```text
//! > {"observation":[...],"layout":{...},"legal_actions":[{"type":"play","slot":0},...]}
//! < {"action":3}
//! ```
//!
//! `action` indexes into `legal_actions`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::policy::{Decision, Policy};
use crate::encoding::Layout;
use crate::error::HarnessError;
use crate::game::Action;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Serialize)]
pub struct PolicyRequest<'a> {
    pub observation: &'a [f64],
    pub layout: &'a Layout,
    pub legal_actions: &'a [Action],
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolicyResponse {
    pub action: usize,
}

pub struct ExternalPolicy {
    child: Option<Child>,
    writer: Box<dyn Write + Send>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalPolicy {
    /// Starts `command` with piped stdin/stdout.
    pub fn spawn(command: &str, args: &[String]) -> Result<ExternalPolicy, HarnessError> {
        let mut child = Command::new(command)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut policy = ExternalPolicy::from_streams(Box::new(stdin), BufReader::new(stdout));
        policy.child = Some(child);
        Ok(policy)
    }

    /// Speaks the protocol over arbitrary streams.
    pub fn from_streams<R>(writer: Box<dyn Write + Send>, reader: R) -> ExternalPolicy
    where
        R: BufRead + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        ExternalPolicy {
            child: None,
            writer,
            lines: rx,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> ExternalPolicy {
        self.timeout = timeout;
        self
    }

    fn request(&mut self, decision: &Decision<'_>) -> Result<usize, HarnessError> {
        let req = PolicyRequest {
            observation: &decision.encoded.values,
            layout: &decision.encoded.layout,
            legal_actions: decision.legal,
        };
        let mut line = serde_json::to_string(&req)?;
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()?;

        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(line) => line?,
            Err(RecvTimeoutError::Timeout) => return Err(HarnessError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                return Err(HarnessError::Protocol("policy closed its output".into()))
            }
        };
        let resp: PolicyResponse = serde_json::from_str(reply.trim())
            .map_err(|e| HarnessError::Protocol(format!("bad response {reply:?}: {e}")))?;
        if resp.action >= decision.legal.len() {
            return Err(HarnessError::Protocol(format!(
                "action index {} out of range for {} legal actions",
                resp.action,
                decision.legal.len()
            )));
        }
        Ok(resp.action)
    }
}

impl Policy for ExternalPolicy {
    fn act(&mut self, decision: &Decision<'_>) -> Result<Action, HarnessError> {
        let idx = self.request(decision)?;
        Ok(decision.legal[idx])
    }
}

impl Drop for ExternalPolicy {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
