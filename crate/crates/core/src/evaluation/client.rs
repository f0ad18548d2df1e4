use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::str::FromStr;
use std::time::Duration;

use super::protocol::{self, BridgeMode, EvaluationRequest, EvaluationResponse};
use super::{EvalError, Evaluator};
use crate::objectives::ImageRecord;

/// Where a bridge lives: `tcp://host:port`, or `cmd:<program> [args...]`
/// for a child process spoken to over stdin/stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Tcp(String),
    Command(Vec<String>),
}

impl FromStr for Endpoint {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(addr) = s.strip_prefix("tcp://") {
            if addr.is_empty() {
                return Err(EvalError::Unavailable("empty tcp address".into()));
            }
            return Ok(Endpoint::Tcp(addr.to_string()));
        }
        if let Some(cmd) = s.strip_prefix("cmd:") {
            let argv: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
            if argv.is_empty() {
                return Err(EvalError::Unavailable("empty bridge command".into()));
            }
            return Ok(Endpoint::Command(argv));
        }
        Err(EvalError::Unavailable(format!(
            "unrecognised endpoint {s:?} (expected tcp://host:port or cmd:<command>)"
        )))
    }
}

/// Client side of the bridge protocol. One request is in flight at a time.
pub struct BridgeClient {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
    child: Option<Child>,
    mode: BridgeMode,
}

impl std::fmt::Debug for BridgeClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BridgeClient")
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

fn io_err(e: std::io::Error) -> EvalError {
    match e.kind() {
        ErrorKind::WouldBlock | ErrorKind::TimedOut => EvalError::Timeout,
        _ => EvalError::Unavailable(e.to_string()),
    }
}

impl BridgeClient {
    /// Wraps an already-open duplex stream and consumes the handshake.
    pub fn from_streams(reader: Box<dyn BufRead + Send>, writer: Box<dyn Write + Send>) -> Result<Self, EvalError> {
        let mut client = Self {
            reader,
            writer,
            child: None,
            mode: BridgeMode::Stub,
        };
        let line = client.read_line()?;
        client.mode = protocol::decode_hello(&line)?.hello.mode;
        Ok(client)
    }

    pub fn connect(endpoint: &Endpoint, timeout: Option<Duration>) -> Result<Self, EvalError> {
        match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr).map_err(io_err)?;
                stream.set_read_timeout(timeout).map_err(io_err)?;
                stream.set_nodelay(true).map_err(io_err)?;
                let writer = stream.try_clone().map_err(io_err)?;
                Self::from_streams(Box::new(BufReader::new(stream)), Box::new(writer))
            }
            Endpoint::Command(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| EvalError::Unavailable(format!("cannot start {}: {e}", argv[0])))?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = child.stdout.take().expect("piped stdout");
                let mut client = Self::from_streams(Box::new(BufReader::new(stdout)), Box::new(stdin))?;
                client.child = Some(child);
                Ok(client)
            }
        }
    }

    pub fn mode(&self) -> BridgeMode {
        self.mode
    }

    fn read_line(&mut self) -> Result<String, EvalError> {
        let mut line = String::new();
        let n = self.reader.read_line(&mut line).map_err(io_err)?;
        if n == 0 {
            return Err(EvalError::Unavailable("bridge closed the connection".into()));
        }
        Ok(line.trim_end_matches(['\r', '\n']).to_string())
    }

    /// Sends one raw line and decodes the reply.
    pub fn exchange_line(&mut self, line: &str) -> Result<EvaluationResponse, EvalError> {
        self.writer.write_all(line.as_bytes()).map_err(io_err)?;
        self.writer.write_all(b"\n").map_err(io_err)?;
        self.writer.flush().map_err(io_err)?;
        let reply = self.read_line()?;
        protocol::decode_response(&reply)
    }

    pub fn exchange(&mut self, request: &EvaluationRequest) -> Result<EvaluationResponse, EvalError> {
        let response = self.exchange_line(&protocol::encode_request(request))?;
        if response.request_id != request.request_id {
            return Err(EvalError::Protocol(format!(
                "response id {} does not match request id {}",
                response.request_id, request.request_id
            )));
        }
        Ok(response)
    }
}

impl Evaluator for BridgeClient {
    fn evaluate(&mut self, request: &EvaluationRequest) -> Result<Vec<ImageRecord>, EvalError> {
        let records = self.exchange(request)?.outcome.map_err(EvalError::Rejected)?;
        if records.len() != request.image_count as usize {
            return Err(EvalError::Protocol(format!(
                "expected {} records, got {}",
                request.image_count,
                records.len()
            )));
        }
        for r in &records {
            r.validate()?;
        }
        Ok(records)
    }
}

impl Drop for BridgeClient {
    fn drop(&mut self) {
        if let Some(mut child) = self.child.take() {
            // closing stdin asks the bridge to shut down
            self.writer = Box::new(std::io::sink());
            let _ = child.wait();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_parsing() {
        assert_eq!(
            "tcp://127.0.0.1:9000".parse::<Endpoint>().unwrap(),
            Endpoint::Tcp("127.0.0.1:9000".into())
        );
        assert_eq!(
            "cmd:python3 bridge.py --mode stub".parse::<Endpoint>().unwrap(),
            Endpoint::Command(vec![
                "python3".into(),
                "bridge.py".into(),
                "--mode".into(),
                "stub".into()
            ])
        );
        assert!("http://x".parse::<Endpoint>().is_err());
        assert!("cmd:".parse::<Endpoint>().is_err());
    }

    #[test]
    fn missing_command_is_unavailable() {
        let ep = Endpoint::Command(vec!["/nonexistent/bridge-binary".into()]);
        assert!(matches!(
            BridgeClient::connect(&ep, None),
            Err(EvalError::Unavailable(_))
        ));
    }
}
