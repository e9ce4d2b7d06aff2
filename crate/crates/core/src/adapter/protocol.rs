//! Line-delimited JSON protocol between the harness and an embedder process.
//!
//! One request per line on the child's stdin, one response per line on its
//! stdout, strictly in order:
//!
//! ```text
//! {"op":"info"}                      {"ok":true,"dims":16,"encode":true,"decode":true}
//! {"op":"encode","tokens":["A"]}     {"ok":true,"vector":[0.25,0.25]}
//! {"op":"decode","vector":[0.1,0.9]} {"ok":true,"tokens":["A","C"]}
//! {"op":"next","tokens":["A"]}       {"ok":true,"tokens":["A","B","C"],"stop":true}
//! ```
//!
//! Failures are answered with `{"ok":false,"error":"..."}`.

use std::io::{self, BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{AdapterError, Embedder, EmbedderInfo};
use crate::grammar::Grammar;
use crate::ErrorCode;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum Request {
    Info,
    Encode { tokens: Vec<String> },
    Decode { vector: Vec<f64> },
    Next { tokens: Vec<String> },
}

fn failure(message: String) -> Value {
    json!({"ok": false, "error": message})
}

fn success(mut payload: Value) -> Value {
    payload["ok"] = Value::Bool(true);
    payload
}

/// Answer one request line.
pub fn respond(line: &str, embedder: &mut dyn Embedder, grammar: &Grammar) -> Value {
    let request: Request = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => return failure(format!("E_PROTOCOL: malformed request ({e}): {line}")),
    };
    let result = match request {
        Request::Info => {
            let info = embedder.info();
            Ok(json!({"dims": info.dims, "encode": info.encode, "decode": info.decode}))
        }
        Request::Encode { tokens } => embedder.encode(&tokens).map(|v| json!({ "vector": v })),
        Request::Decode { vector } => embedder.decode(&vector).map(|t| json!({ "tokens": t })),
        Request::Next { tokens } => {
            return match grammar.prefix_state(&tokens) {
                Ok(state) => {
                    let c = state.continuations();
                    success(json!({"tokens": c.words, "stop": c.stop}))
                }
                Err(e) => failure(format!("{}: {e}", e.code())),
            }
        }
    };
    match result {
        Ok(payload) => success(payload),
        Err(e) => failure(format!("{}: {e}", e.code())),
    }
}

/// Serve requests from `input` until end of stream.
pub fn serve<R: BufRead, W: Write>(
    input: R,
    mut output: W,
    embedder: &mut dyn Embedder,
    grammar: &Grammar,
) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = respond(line.trim(), embedder, grammar);
        writeln!(output, "{response}")?;
        output.flush()?;
    }
    Ok(())
}

/// An embedder living in a child process.
pub struct ExternalEmbedder {
    command: String,
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<io::Result<String>>,
    timeout: Duration,
    info: EmbedderInfo,
}

impl ExternalEmbedder {
    /// Start `command` through the shell and query its capabilities.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut me = ExternalEmbedder {
            command: command.to_owned(),
            child,
            stdin,
            lines: rx,
            timeout,
            info: EmbedderInfo {
                name: format!("exec:{command}"),
                dims: 0,
                encode: false,
                decode: false,
            },
        };
        let v = me.call(&Request::Info)?;
        let field = |key: &str| v.get(key).cloned().unwrap_or(Value::Null);
        let dims = field("dims").as_u64().ok_or_else(|| AdapterError::Protocol {
            message: "info response lacks `dims`".into(),
            line: v.to_string(),
        })?;
        me.info.dims = dims as usize;
        me.info.encode = field("encode").as_bool().unwrap_or(false);
        me.info.decode = field("decode").as_bool().unwrap_or(false);
        Ok(me)
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn exit_reason(&mut self) -> String {
        match self.child.try_wait() {
            Ok(Some(status)) => status.to_string(),
            _ => "closed its output".into(),
        }
    }

    /// Send one request and wait for its response payload.
    pub fn call(&mut self, request: &Request) -> Result<Value, AdapterError> {
        let line = serde_json::to_string(request).expect("requests serialize");
        if writeln!(self.stdin, "{line}").and_then(|_| self.stdin.flush()).is_err() {
            return Err(AdapterError::ChildExit(self.exit_reason()));
        }
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(AdapterError::ChildExit(e.to_string())),
            Err(RecvTimeoutError::Timeout) => return Err(AdapterError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                // Give a dying child a moment to report its status.
                let _ = self.child.wait();
                return Err(AdapterError::ChildExit(self.exit_reason()));
            }
        };
        let v: Value = serde_json::from_str(&reply).map_err(|e| AdapterError::Protocol {
            message: format!("response is not JSON ({e})"),
            line: reply.clone(),
        })?;
        match v.get("ok").and_then(Value::as_bool) {
            Some(true) => Ok(v),
            Some(false) => Err(AdapterError::Remote(
                v.get("error")
                    .and_then(Value::as_str)
                    .unwrap_or("unspecified error")
                    .to_owned(),
            )),
            None => Err(AdapterError::Protocol {
                message: "response lacks boolean `ok`".into(),
                line: reply,
            }),
        }
    }

    /// Valid next words after `tokens`, and whether the prefix may stop.
    pub fn next(&mut self, tokens: &[String]) -> Result<(Vec<String>, bool), AdapterError> {
        let v = self.call(&Request::Next {
            tokens: tokens.to_vec(),
        })?;
        let words = string_list(&v, "tokens")?;
        let stop = v.get("stop").and_then(Value::as_bool).ok_or_else(|| AdapterError::Protocol {
            message: "next response lacks `stop`".into(),
            line: v.to_string(),
        })?;
        Ok((words, stop))
    }
}

fn string_list(v: &Value, key: &str) -> Result<Vec<String>, AdapterError> {
    let bad = || AdapterError::Protocol {
        message: format!("response lacks a string list `{key}`"),
        line: v.to_string(),
    };
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|t| t.as_str().map(str::to_owned).ok_or_else(bad))
        .collect()
}

impl Embedder for ExternalEmbedder {
    fn info(&self) -> EmbedderInfo {
        self.info.clone()
    }

    fn encode(&mut self, tokens: &[String]) -> Result<Vec<f64>, AdapterError> {
        let v = self.call(&Request::Encode {
            tokens: tokens.to_vec(),
        })?;
        let bad = || AdapterError::Protocol {
            message: "response lacks a numeric list `vector`".into(),
            line: v.to_string(),
        };
        v.get("vector")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_f64().ok_or_else(bad))
            .collect()
    }

    fn decode(&mut self, vector: &[f64]) -> Result<Vec<String>, AdapterError> {
        let v = self.call(&Request::Decode {
            vector: vector.to_vec(),
        })?;
        string_list(&v, "tokens")
    }
}

impl Drop for ExternalEmbedder {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
