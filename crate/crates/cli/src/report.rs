//! Report envelope and output writing. Every run emits a JSON envelope
//! carrying the tool version, the resolved config, and the result; tabular
//! results can additionally be exported as CSV ('.' decimal, complex values
//! as two columns).

use serde::Serialize;
use serde_json::Value;

use diskwalk::error::Error;

#[derive(Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub config: Value,
    pub result: Value,
}

pub const TOOL: &str = "diskwalk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV table produced alongside the JSON result.
pub struct CsvTable {
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 32 + self.header.len() + 2);
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

pub fn write_output(target: &str, contents: &str) -> Result<(), Error> {
    if target == "-" {
        print!("{contents}");
        Ok(())
    } else {
        std::fs::write(target, contents)
            .map_err(|e| Error::Config(format!("cannot write {target}: {e}")))
    }
}

/// Render the envelope deterministically (stable field order, shortest
/// round-trip floats, trailing newline).
pub fn render_envelope(config: Value, result: Value) -> String {
    let envelope = Envelope {
        tool: TOOL,
        version: VERSION,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).expect("serializable envelope");
    text.push('\n');
    text
}
