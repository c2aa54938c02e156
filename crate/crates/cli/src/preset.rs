//! Presets: a JSON file naming inline fields and a list of commands. Running
//! one executes every command with JSON output and hashes the results, so a
//! stored digest pins the whole experiment byte for byte.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hyperval_core::FieldDef;

use crate::{dispatch, Cli, CliError, CliResult, Ctx, Output};

#[derive(Debug)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub fields: HashMap<String, FieldDef>,
    pub commands: Vec<Vec<String>>,
    pub digest: Option<String>,
}

impl Preset {
    pub fn from_json(v: &Value) -> CliResult<Self> {
        let bad = |what: &str| CliError::Domain(format!("preset: {what}"));
        let name = v.get("name").and_then(Value::as_str).ok_or_else(|| bad("missing \"name\""))?.to_string();
        let description = v.get("description").and_then(Value::as_str).unwrap_or_default().to_string();
        let mut fields = HashMap::new();
        if let Some(map) = v.get("fields") {
            let map = map.as_object().ok_or_else(|| bad("\"fields\" must be an object"))?;
            for (k, def) in map {
                fields.insert(k.clone(), FieldDef::from_json(def)?);
            }
        }
        let commands = v
            .get("commands")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"commands\""))?
            .iter()
            .map(|c| {
                c.as_array()
                    .and_then(|a| a.iter().map(|s| s.as_str().map(String::from)).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| bad("each command is an array of strings"))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let digest = v.get("digest").and_then(Value::as_str).map(String::from);
        Ok(Preset { name, description, fields, commands, digest })
    }
}

/// `--dir`, else `presets/` in the working directory, else the copy shipped
/// with the source tree.
pub fn preset_dir(dir: Option<&Path>) -> PathBuf {
    if let Some(d) = dir {
        return d.to_path_buf();
    }
    let local = PathBuf::from("presets");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn entries(dir: &Path) -> CliResult<Vec<(String, Preset)>> {
    let mut out = Vec::new();
    let rd = std::fs::read_dir(dir).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", dir.display())))?;
    for entry in rd {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            out.push((stem, load(&path)?));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub fn load(path: &Path) -> CliResult<Preset> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    Preset::from_json(&serde_json::from_str(&text)?)
}

pub fn list(dir: Option<&Path>) -> CliResult<Output> {
    let items = entries(&preset_dir(dir))?;
    let mut text = String::new();
    for (stem, p) in &items {
        let _ = writeln!(text, "{stem:<22} {}", p.description);
    }
    let doc: Vec<Value> =
        items.iter().map(|(s, p)| json!({ "name": s, "description": p.description, "commands": p.commands.len() })).collect();
    Ok(Output::new(Value::Array(doc), text))
}

/// Canonical line for one command: its arguments and either the output
/// document with its check flag, or the error with its exit code.
fn record(ctx: &Ctx, argv: &[String]) -> Value {
    let cli = match Cli::try_parse_from(std::iter::once("hyperval".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => return json!({ "args": argv, "error": e.kind().to_string(), "exit": crate::EXIT_USAGE }),
    };
    match dispatch(ctx, &cli.command) {
        Ok(o) => json!({ "args": argv, "output": o.json, "ok": o.ok }),
        Err(e) => json!({ "args": argv, "error": e.to_string(), "exit": e.exit_code() }),
    }
}

/// SHA-256 over the canonical records joined by newlines.
pub fn digest(records: &[Value]) -> String {
    let joined = records.iter().map(Value::to_string).collect::<Vec<_>>().join("\n");
    hex::encode(Sha256::digest(joined.as_bytes()))
}

pub fn execute(preset: &Preset, threads: usize) -> (Vec<Value>, String) {
    let ctx = Ctx { threads, fields: preset.fields.clone(), in_preset: true };
    let records: Vec<Value> = preset.commands.iter().map(|c| record(&ctx, c)).collect();
    let d = digest(&records);
    (records, d)
}

pub fn run(ctx: &Ctx, name: &str, dir: Option<&Path>) -> CliResult<Output> {
    let path = preset_dir(dir).join(format!("{name}.json"));
    let p = load(&path)?;
    let (records, computed) = execute(&p, ctx.threads);
    let matches = p.digest.as_deref() == Some(computed.as_str());
    let mut text = format!("preset {}: {}\n", p.name, p.description);
    for r in &records {
        let args = r["args"].as_array().map(|a| a.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "));
        let status = match (&r["ok"], &r["exit"]) {
            (Value::Bool(true), _) => "ok".to_string(),
            (Value::Bool(false), _) => "check failed".to_string(),
            (_, code) => format!("error (exit {code}): {}", r["error"].as_str().unwrap_or_default()),
        };
        let _ = writeln!(text, "  {} -> {status}", args.unwrap_or_default());
    }
    let _ = write!(
        text,
        "digest {computed} ({})",
        match &p.digest {
            Some(_) if matches => "matches".to_string(),
            Some(d) => format!("MISMATCH, expected {d}"),
            None => "no stored digest".to_string(),
        }
    );
    let doc = json!({
        "name": p.name,
        "digest": computed,
        "expected": p.digest,
        "matches": matches,
        "records": records,
    });
    Ok(Output { json: doc, text, ok: matches })
}
