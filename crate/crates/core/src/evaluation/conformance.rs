//! Protocol conformance checks run against a live bridge.

use serde::Serialize;

use super::protocol::{self, EvaluationRequest};
use super::{BridgeClient, EvalError};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub checks: Vec<Check>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn probe(id: u64, image_count: u32) -> EvaluationRequest {
    EvaluationRequest {
        request_id: id,
        positive_prompt: "Photo portrait of a Software Engineer that codes, photograph+".into(),
        negative_prompt: "drawing+".into(),
        guidance_scale: 7.0,
        inference_steps: 30,
        image_count,
        seed: 12345,
    }
}

fn record(checks: &mut Vec<Check>, name: &'static str, result: Result<String, String>) {
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    checks.push(Check { name, passed, detail });
}

/// Runs round-trip, error-recovery and determinism checks. A transport
/// failure aborts the remaining checks.
pub fn protocol_check(client: &mut BridgeClient) -> Result<ConformanceReport, EvalError> {
    let mut checks = Vec::new();
    record(&mut checks, "handshake", Ok(format!("mode {:?}", client.mode())));

    let first = client.exchange(&probe(1, 20))?;
    let round_trip = match &first.outcome {
        Ok(records) if records.len() == 20 => records
            .iter()
            .try_for_each(|r| r.validate().map_err(|e| e.to_string()))
            .map(|_| "20 valid records".to_string()),
        Ok(records) => Err(format!("expected 20 records, got {}", records.len())),
        Err(e) => Err(format!("bridge returned error: {e}")),
    };
    record(&mut checks, "round-trip", round_trip);

    let invalid = client.exchange(&probe(2, 0))?;
    record(
        &mut checks,
        "invalid-request",
        match invalid.outcome {
            Err(e) => Ok(format!("error reply: {e}")),
            Ok(_) => Err("image_count 0 was accepted".into()),
        },
    );

    let malformed = client.exchange_line("{this is not json")?;
    record(
        &mut checks,
        "malformed-line",
        match malformed.outcome {
            Err(_) => Ok("error reply".into()),
            Ok(_) => Err("malformed line produced records".into()),
        },
    );

    let after = client.exchange(&probe(3, 5))?;
    record(
        &mut checks,
        "recovery",
        match after.outcome {
            Ok(r) if r.len() == 5 => Ok("served after errors".into()),
            other => Err(format!("unexpected reply {other:?}")),
        },
    );

    let again = client.exchange(&probe(4, 20))?;
    let same = match (&first.outcome, &again.outcome) {
        (Ok(a), Ok(b)) if a == b => Ok("identical records for identical requests".into()),
        _ => Err("records differ between identical requests".into()),
    };
    record(&mut checks, "determinism", same);

    let wire = protocol::encode_request(&probe(5, 1));
    record(
        &mut checks,
        "request-encoding",
        protocol::decode_request(&wire)
            .map(|_| "request encodes and decodes".to_string())
            .map_err(|e| e.to_string()),
    );

    Ok(ConformanceReport { checks })
}
