//! Newline-delimited JSON wire format spoken with evaluator bridges.
//!
//! The bridge greets with `{"hello":{"protocol":1,"mode":"stub"}}`, then
//! answers one request per line:
//!
//! ```text
//! > {"id":1,"positive_prompt":"...","negative_prompt":"","guidance_scale":7.0,"inference_steps":50,"image_count":20,"seed":42}
//! < {"id":1,"records":[{"quality":0.7,"gender":"male","ethnicity":"white","cpu_kwh":0.0002,"gpu_kwh":0.0005,"duration_s":23.1}, ...]}
//! < {"id":2,"error":"image_count must be at least 1"}
//! ```

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::objectives::ImageRecord;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationRequest {
    #[serde(rename = "id")]
    pub request_id: u64,
    pub positive_prompt: String,
    pub negative_prompt: String,
    pub guidance_scale: f64,
    pub inference_steps: u32,
    pub image_count: u32,
    pub seed: u64,
}

impl EvaluationRequest {
    pub fn validate(&self) -> Result<(), String> {
        if self.image_count == 0 {
            return Err("image_count must be at least 1".into());
        }
        if self.inference_steps == 0 {
            return Err("inference_steps must be positive".into());
        }
        if !(self.guidance_scale.is_finite() && self.guidance_scale >= 0.0) {
            return Err(format!("guidance_scale {} is invalid", self.guidance_scale));
        }
        if self.positive_prompt.trim().is_empty() {
            return Err("positive_prompt must not be empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResponse {
    pub request_id: u64,
    pub outcome: Result<Vec<ImageRecord>, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireResponse {
    id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    records: Option<Vec<ImageRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgeMode {
    Stub,
    Real,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelloBody {
    pub protocol: u32,
    pub mode: BridgeMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hello {
    pub hello: HelloBody,
}

impl Hello {
    pub fn new(mode: BridgeMode) -> Self {
        Self {
            hello: HelloBody {
                protocol: PROTOCOL_VERSION,
                mode,
            },
        }
    }
}

fn protocol_err(what: &str, e: serde_json::Error) -> EvalError {
    EvalError::Protocol(format!("malformed {what}: {e}"))
}

pub fn encode_request(req: &EvaluationRequest) -> String {
    serde_json::to_string(req).expect("request serializes")
}

pub fn decode_request(line: &str) -> Result<EvaluationRequest, EvalError> {
    serde_json::from_str(line).map_err(|e| protocol_err("request", e))
}

pub fn encode_response(resp: &EvaluationResponse) -> String {
    let wire = match &resp.outcome {
        Ok(records) => WireResponse {
            id: resp.request_id,
            records: Some(records.clone()),
            error: None,
        },
        Err(msg) => WireResponse {
            id: resp.request_id,
            records: None,
            error: Some(msg.clone()),
        },
    };
    serde_json::to_string(&wire).expect("response serializes")
}

pub fn decode_response(line: &str) -> Result<EvaluationResponse, EvalError> {
    let wire: WireResponse = serde_json::from_str(line).map_err(|e| protocol_err("response", e))?;
    let outcome = match (wire.records, wire.error) {
        (Some(records), None) => Ok(records),
        (None, Some(error)) => Err(error),
        _ => {
            return Err(EvalError::Protocol(
                "response must carry exactly one of records/error".into(),
            ))
        }
    };
    Ok(EvaluationResponse {
        request_id: wire.id,
        outcome,
    })
}

pub fn encode_hello(hello: &Hello) -> String {
    serde_json::to_string(hello).expect("hello serializes")
}

pub fn decode_hello(line: &str) -> Result<Hello, EvalError> {
    let hello: Hello = serde_json::from_str(line).map_err(|e| protocol_err("handshake", e))?;
    if hello.hello.protocol != PROTOCOL_VERSION {
        return Err(EvalError::Protocol(format!(
            "unsupported protocol version {}",
            hello.hello.protocol
        )));
    }
    Ok(hello)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Ethnicity, Gender};
    use proptest::prelude::*;

    #[test]
    fn hello_is_fixed() {
        assert_eq!(
            encode_hello(&Hello::new(BridgeMode::Stub)),
            r#"{"hello":{"protocol":1,"mode":"stub"}}"#
        );
        assert!(decode_hello(r#"{"hello":{"protocol":2,"mode":"real"}}"#).is_err());
    }

    #[test]
    fn wire_keys() {
        let req = EvaluationRequest {
            request_id: 3,
            positive_prompt: "p".into(),
            negative_prompt: "".into(),
            guidance_scale: 7.5,
            inference_steps: 30,
            image_count: 2,
            seed: 9,
        };
        assert_eq!(
            encode_request(&req),
            r#"{"id":3,"positive_prompt":"p","negative_prompt":"","guidance_scale":7.5,"inference_steps":30,"image_count":2,"seed":9}"#
        );
        let resp = decode_response(
            r#"{"id":3,"records":[{"quality":0.5,"gender":"female","ethnicity":"asian","cpu_kwh":0.0001,"gpu_kwh":0.0003,"duration_s":12.0}]}"#,
        )
        .unwrap();
        let records = resp.outcome.unwrap();
        assert_eq!(records[0].gender, Gender::Female);
        assert_eq!(records[0].ethnicity, Ethnicity::Asian);
    }

    #[test]
    fn response_needs_exactly_one_payload() {
        assert!(decode_response(r#"{"id":1}"#).is_err());
        assert!(decode_response(r#"{"id":1,"records":[],"error":"x"}"#).is_err());
        assert_eq!(
            decode_response(r#"{"id":1,"error":"boom"}"#).unwrap().outcome,
            Err("boom".to_string())
        );
    }

    fn arb_record() -> impl Strategy<Value = ImageRecord> {
        let gender = prop_oneof![Just(Gender::Male), Just(Gender::Female), Just(Gender::Unknown)];
        let eth = prop_oneof![
            Just(Ethnicity::Arab),
            Just(Ethnicity::Asian),
            Just(Ethnicity::Black),
            Just(Ethnicity::White),
            Just(Ethnicity::Unknown)
        ];
        (0.0..=1.0f64, gender, eth, 0.0..1e-2f64, 0.0..1e-2f64, 0.0..100.0f64).prop_map(
            |(quality, gender, ethnicity, cpu_kwh, gpu_kwh, duration_s)| ImageRecord {
                quality,
                gender,
                ethnicity,
                cpu_kwh,
                gpu_kwh,
                duration_s,
            },
        )
    }

    proptest! {
        #[test]
        fn request_round_trip(id in any::<u64>(), pos in ".{1,40}", neg in ".{0,40}",
                              tenths in 0u32..=200, steps in 1u32..200, n in 1u32..50, seed in any::<u64>()) {
            let req = EvaluationRequest {
                request_id: id, positive_prompt: pos, negative_prompt: neg,
                guidance_scale: f64::from(tenths) / 10.0, inference_steps: steps, image_count: n, seed,
            };
            let line = encode_request(&req);
            prop_assert!(!line.contains('\n'));
            let back = decode_request(&line).unwrap();
            prop_assert_eq!(&back, &req);
            prop_assert_eq!(encode_request(&back), line);
        }

        #[test]
        fn response_round_trip(id in any::<u64>(), records in proptest::collection::vec(arb_record(), 0..25),
                               err in proptest::option::of(".{0,30}")) {
            let resp = EvaluationResponse {
                request_id: id,
                outcome: match err { Some(e) => Err(e), None => Ok(records) },
            };
            let line = encode_response(&resp);
            let back = decode_response(&line).unwrap();
            prop_assert_eq!(&back, &resp);
            prop_assert_eq!(encode_response(&back), line);
        }
    }
}
