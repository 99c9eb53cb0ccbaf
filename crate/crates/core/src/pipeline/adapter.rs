//! External model adapters.
//!
//! An adapter is a child process that reads one UTF-8 input per line on
//! stdin and writes exactly one output line per input on stdout, in order.
//! Inputs are flattened to a single line before sending.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::thread;

use thiserror::Error;

use crate::text;

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("adapter `{0}` has an empty command line")]
    EmptyCommand(String),
    #[error("adapter `{name}` could not be started: {source}")]
    Spawn {
        name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("adapter `{name}` I/O failed: {source}")]
    Io {
        name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("adapter `{name}` exited with {status}")]
    ExitStatus { name: String, status: String },
    #[error("adapter `{name}` returned {got} lines for {expected} inputs")]
    LineCount { name: String, expected: usize, got: usize },
}

/// A command speaking the line protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineAdapter {
    name: String,
    argv: Vec<String>,
}

impl LineAdapter {
    pub fn new(name: impl Into<String>, argv: Vec<String>) -> Result<Self, AdapterError> {
        let name = name.into();
        if argv.is_empty() {
            return Err(AdapterError::EmptyCommand(name));
        }
        Ok(LineAdapter { name, argv })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn argv(&self) -> &[String] {
        &self.argv
    }

    /// Runs one process over the whole batch.
    pub fn run_batch<S: AsRef<str>>(&self, inputs: &[S]) -> Result<Vec<String>, AdapterError> {
        if inputs.is_empty() {
            return Ok(Vec::new());
        }
        let io_err = |source| AdapterError::Io {
            name: self.name.clone(),
            source,
        };
        let mut child = Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| AdapterError::Spawn {
                name: self.name.clone(),
                source,
            })?;

        let mut stdin = child.stdin.take().expect("stdin is piped");
        let lines: Vec<String> = inputs.iter().map(|s| text::single_line(s.as_ref())).collect();
        // writing from a separate thread keeps a slow reader from deadlocking us
        let writer = thread::spawn(move || -> std::io::Result<()> {
            for line in lines {
                stdin.write_all(line.as_bytes())?;
                stdin.write_all(b"\n")?;
                stdin.flush()?;
            }
            Ok(())
        });

        let stdout = child.stdout.take().expect("stdout is piped");
        let mut outputs = Vec::with_capacity(inputs.len());
        for line in BufReader::new(stdout).lines() {
            let line = line.map_err(io_err)?;
            outputs.push(line.strip_suffix('\r').map(str::to_string).unwrap_or(line));
        }
        let status = child.wait().map_err(io_err)?;
        let write_result = writer
            .join()
            .unwrap_or_else(|_| Err(std::io::Error::other("stdin writer panicked")));

        if !status.success() {
            return Err(AdapterError::ExitStatus {
                name: self.name.clone(),
                status: status.to_string(),
            });
        }
        if outputs.len() != inputs.len() {
            return Err(AdapterError::LineCount {
                name: self.name.clone(),
                expected: inputs.len(),
                got: outputs.len(),
            });
        }
        write_result.map_err(io_err)?;
        Ok(outputs)
    }

    /// Splits `inputs` into at most `workers` contiguous chunks, one process
    /// per chunk, run concurrently. When a chunk fails its items are retried
    /// one process each so the failure lands on the right input.
    pub fn run_chunked<S: AsRef<str> + Sync>(&self, inputs: &[S], workers: usize) -> Vec<Result<String, AdapterError>> {
        if inputs.is_empty() {
            return Vec::new();
        }
        let size = inputs.len().div_ceil(workers.max(1));
        let chunks: Vec<&[S]> = inputs.chunks(size).collect();
        let results: Vec<Vec<Result<String, AdapterError>>> = thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| scope.spawn(move || self.run_chunk(chunk)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("adapter worker panicked"))
                .collect()
        });
        results.into_iter().flatten().collect()
    }

    fn run_chunk<S: AsRef<str>>(&self, chunk: &[S]) -> Vec<Result<String, AdapterError>> {
        match self.run_batch(chunk) {
            Ok(out) => out.into_iter().map(Ok).collect(),
            Err(e) if chunk.len() == 1 => vec![Err(e)],
            Err(_) => chunk
                .iter()
                .map(|item| self.run_batch(std::slice::from_ref(item)).map(|mut v| v.remove(0)))
                .collect(),
        }
    }
}

/// The three optional adapter slots of the pipeline.
#[derive(Debug, Clone, Default)]
pub struct ExternalAdapters {
    pub text_to_amr: Option<LineAdapter>,
    pub amr_to_text: Option<LineAdapter>,
    pub expander: Option<LineAdapter>,
    /// Concurrent adapter processes per stage; 0 means one.
    pub workers: usize,
}

impl ExternalAdapters {
    pub fn none() -> Self {
        Self::default()
    }
}
