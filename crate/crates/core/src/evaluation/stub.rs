//! In-process stub bridge answering requests from a synthetic landscape.
//! Used to exercise the client and `protocol-check` without a model stack.

use std::io::{self, BufRead, Write};
use std::net::TcpListener;

use super::protocol::{self, BridgeMode, EvaluationResponse, Hello};
use super::synthetic::{synthetic_evaluate, SyntheticLandscape};

/// Serves one connection until the input closes. Lines that fail to parse
/// get an error reply with id 0; the loop keeps going.
pub fn serve<R: BufRead, W: Write>(reader: R, mut writer: W, landscape: &SyntheticLandscape) -> io::Result<()> {
    writeln!(writer, "{}", protocol::encode_hello(&Hello::new(BridgeMode::Stub)))?;
    writer.flush()?;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = match protocol::decode_request(&line) {
            Ok(req) => synthetic_evaluate(landscape, &req),
            Err(e) => EvaluationResponse {
                request_id: request_id_hint(&line),
                outcome: Err(e.to_string()),
            },
        };
        writeln!(writer, "{}", protocol::encode_response(&response))?;
        writer.flush()?;
    }
    Ok(())
}

/// Recovers the `id` of a request that is valid JSON but not a valid
/// request, so the error reply can still be matched.
fn request_id_hint(line: &str) -> u64 {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()
        .and_then(|v| v.get("id").and_then(serde_json::Value::as_u64))
        .unwrap_or(0)
}

/// Accepts connections sequentially and serves each one.
pub fn serve_tcp(listener: TcpListener, landscape: &SyntheticLandscape) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        stream.set_nodelay(true)?;
        let reader = io::BufReader::new(stream.try_clone()?);
        serve(reader, stream, landscape)?;
    }
    Ok(())
}
