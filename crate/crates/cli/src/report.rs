use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "vck/1";

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub role: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl InputFile {
    pub fn new(role: &str, path: &str, data: &[u8]) -> Self {
        InputFile {
            role: role.to_string(),
            path: path.to_string(),
            sha256: sha256_hex(data),
            bytes: data.len() as u64,
        }
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub parameters: Map<String, Value>,
    pub results: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Value>,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: Map::new(),
            results: Map::new(),
            witnesses: None,
            seed,
            runtime_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), to_value(v));
        self
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.results.insert(key.to_string(), to_value(v));
        self
    }

    pub fn witness(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        let w = self.witnesses.get_or_insert_with(|| Value::Object(Map::new()));
        if let Value::Object(m) = w {
            m.insert(key.to_string(), to_value(v));
        }
        self
    }

    /// `key = value` lines for the terminal; structured values are printed
    /// as compact JSON.
    pub fn human(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.results {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k} = {shown}\n"));
        }
        out
    }
}

fn to_value(v: impl Serialize) -> Value {
    // only non-finite floats fail, and those never reach a report
    serde_json::to_value(v).unwrap_or(Value::Null)
}
