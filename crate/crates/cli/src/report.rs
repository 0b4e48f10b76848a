use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Why a run failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    /// The supplied input violates the checked condition.
    Violation,
    /// The result contradicts a proven statement.
    Contradiction,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub failure: Option<Failure>,
    pub text: String,
    pub parameters: Value,
    pub witness: Value,
    pub certificate_path: Option<String>,
}

impl Outcome {
    pub fn new(parameters: Value, text: String) -> Self {
        Outcome {
            verdict: Verdict::Pass,
            failure: None,
            text,
            parameters,
            witness: Value::Null,
            certificate_path: None,
        }
    }

    pub fn witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn fail_if(mut self, failed: bool, kind: Failure) -> Self {
        if failed {
            self.verdict = Verdict::Fail;
            self.failure = Some(kind);
        }
        self
    }

    pub fn inconclusive(mut self) -> Self {
        self.verdict = Verdict::Inconclusive;
        self
    }

    pub fn exit_code(&self) -> u8 {
        match (self.verdict, self.failure) {
            (Verdict::Pass, _) => 0,
            (Verdict::Inconclusive, _) => 2,
            (Verdict::Fail, Some(Failure::Violation)) => 4,
            (Verdict::Fail, _) => 3,
        }
    }
}

#[derive(Serialize)]
pub struct RunReport<'a> {
    pub report_version: u32,
    pub subcommand: &'a str,
    pub parameters: &'a Value,
    pub verdict: Verdict,
    pub witness: &'a Value,
    pub certificate_path: Option<&'a str>,
    pub exact_arithmetic: bool,
    pub wall_time_ms: u64,
}

impl<'a> RunReport<'a> {
    pub fn new(subcommand: &'a str, outcome: &'a Outcome, wall_time_ms: u64) -> Self {
        RunReport {
            report_version: 1,
            subcommand,
            parameters: &outcome.parameters,
            verdict: outcome.verdict,
            witness: &outcome.witness,
            certificate_path: outcome.certificate_path.as_deref(),
            exact_arithmetic: true,
            wall_time_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
