//! Line protocol for external model backends.
//!
//! The backend receives one image path per line on stdin and must answer
//! each, in order, with one line of nine comma-separated confidences on
//! stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use crate::datamodel::{Manifest, PredictionSet, ScoreRow, Split, NUM_CLASSES};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Backend {
    pub program: String,
    pub args: Vec<String>,
    /// Longest wait for any single response line.
    pub timeout: Duration,
}

impl Backend {
    pub fn new(program: impl Into<String>, args: Vec<String>, timeout: Duration) -> Self {
        Self {
            program: program.into(),
            args,
            timeout,
        }
    }
}

fn parse_response(line: &str, request: &str) -> Result<ScoreRow> {
    let protocol = |message: String| Error::Protocol {
        message,
        line: line.to_string(),
    };
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != NUM_CLASSES {
        return Err(protocol(format!(
            "expected {NUM_CLASSES} values for `{request}`, got {}",
            fields.len()
        )));
    }
    let mut row = [0.0; NUM_CLASSES];
    for (slot, field) in row.iter_mut().zip(&fields) {
        let v: f64 = field
            .trim()
            .parse()
            .map_err(|_| protocol(format!("non-numeric value `{}` for `{request}`", field.trim())))?;
        if !v.is_finite() || v < 0.0 {
            return Err(protocol(format!("confidence {v} for `{request}` is not a finite non-negative number")));
        }
        *slot = v;
    }
    Ok(row)
}

fn abort(child: &mut Child) {
    let _ = child.kill();
    let _ = child.wait();
}

/// Send `paths` to a fresh backend process and collect one row per path.
pub fn run_backend(backend: &Backend, paths: &[String]) -> Result<Vec<ScoreRow>> {
    let mut child = Command::new(&backend.program)
        .args(&backend.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Backend(format!("cannot start `{}`: {e}", backend.program)))?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    let requests = paths.to_vec();
    thread::spawn(move || {
        for p in &requests {
            if writeln!(stdin, "{p}").and_then(|_| stdin.flush()).is_err() {
                break;
            }
        }
    });
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            if tx.send(line).is_err() {
                break;
            }
        }
    });

    let mut rows = Vec::with_capacity(paths.len());
    for path in paths {
        match rx.recv_timeout(backend.timeout) {
            Ok(Ok(line)) => match parse_response(&line, path) {
                Ok(row) => rows.push(row),
                Err(e) => {
                    abort(&mut child);
                    return Err(e);
                }
            },
            Ok(Err(e)) => {
                abort(&mut child);
                return Err(Error::Backend(format!("reading backend output: {e}")));
            }
            Err(RecvTimeoutError::Timeout) => {
                abort(&mut child);
                return Err(Error::Protocol {
                    message: format!("no response within {:?}", backend.timeout),
                    line: path.clone(),
                });
            }
            Err(RecvTimeoutError::Disconnected) => {
                let status = child.wait().map_err(|e| Error::Backend(e.to_string()))?;
                return Err(Error::Protocol {
                    message: format!(
                        "backend exited ({status}) after {} of {} responses",
                        rows.len(),
                        paths.len()
                    ),
                    line: path.clone(),
                });
            }
        }
    }

    let deadline = Instant::now() + backend.timeout;
    let status = loop {
        match child.try_wait().map_err(|e| Error::Backend(e.to_string()))? {
            Some(status) => break status,
            None if Instant::now() >= deadline => {
                abort(&mut child);
                return Err(Error::Backend("backend did not exit after its input closed".into()));
            }
            None => thread::sleep(Duration::from_millis(5)),
        }
    };
    if let Ok(Ok(extra)) = rx.recv_timeout(Duration::from_millis(100)) {
        if !extra.trim().is_empty() {
            return Err(Error::Protocol {
                message: "unexpected output after the last response".into(),
                line: extra,
            });
        }
    }
    if !status.success() {
        return Err(Error::Backend(format!("backend exited with {status}")));
    }
    Ok(rows)
}

/// Distinct records of `manifest`, optionally restricted to one split, in
/// manifest order. Oversampled copies are dropped.
pub fn inference_records(manifest: &Manifest, split: Option<Split>) -> Vec<(String, String)> {
    let mut seen = std::collections::HashSet::new();
    manifest
        .records()
        .iter()
        .filter(|r| split.is_none_or(|s| r.split == s))
        .filter(|r| seen.insert(r.path.clone()))
        .map(|r| (r.image_id().to_string(), r.path.clone()))
        .collect()
}

/// Predictions for every distinct record of `manifest` (optionally one
/// split), rows in manifest order.
pub fn infer(backend: &Backend, manifest: &Manifest, split: Option<Split>) -> Result<PredictionSet> {
    let records = inference_records(manifest, split);
    let paths: Vec<String> = records.iter().map(|(_, p)| p.clone()).collect();
    let rows = run_backend(backend, &paths)?;
    PredictionSet::new(records.into_iter().map(|(id, _)| id).collect(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nine_values() {
        let row = parse_response("1,0,0,0,0,0,0,0,0", "a.png").unwrap();
        assert_eq!(row[0], 1.0);
        let row = parse_response(" 0.5, 0.5 ,0,0,0,0,0,0,0\r", "a.png").unwrap();
        assert_eq!(row[1], 0.5);
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in ["1,0,0,0,0,0,0,0", "1,0,0,0,0,0,0,0,0,0", "x,0,0,0,0,0,0,0,0", "-1,0,0,0,0,0,0,0,0", "NaN,0,0,0,0,0,0,0,0", ""] {
            let err = parse_response(bad, "a.png").unwrap_err();
            assert!(matches!(&err, Error::Protocol { line, .. } if line == bad), "{bad}: {err}");
        }
    }

    #[cfg(unix)]
    #[test]
    fn shell_backend() {
        let b = Backend::new("sh", vec!["-c".into(), "while read p; do echo 0,1,0,0,0,0,0,0,0; done".into()], Duration::from_secs(5));
        let rows = run_backend(&b, &["a".into(), "b".into()]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1][1], 1.0);
    }

    #[cfg(unix)]
    #[test]
    fn early_exit_and_timeout() {
        let b = Backend::new("sh", vec!["-c".into(), "read p; echo 1,0,0,0,0,0,0,0,0".into()], Duration::from_secs(5));
        let err = run_backend(&b, &["a".into(), "b".into()]).unwrap_err();
        assert!(matches!(&err, Error::Protocol { line, .. } if line == "b"), "{err}");

        let b = Backend::new("sh", vec!["-c".into(), "sleep 5".into()], Duration::from_millis(200));
        let err = run_backend(&b, &["a".into()]).unwrap_err();
        assert!(err.to_string().contains("no response"), "{err}");
    }

    #[test]
    fn missing_program() {
        let b = Backend::new("/nonexistent/backend", vec![], Duration::from_secs(1));
        assert!(matches!(run_backend(&b, &["a".into()]), Err(Error::Backend(_))));
    }
}
