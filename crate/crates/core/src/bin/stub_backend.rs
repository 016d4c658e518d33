//! Colour-prototype classifier speaking the `lesion infer` line protocol.
//!
//! Reads one image path per line on stdin and answers each with nine
//! comma-separated confidences on stdout.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::Parser;
use lesion_core::aggregate::softmax;
use lesion_core::rng::{keyed_rng, uniform};
use lesion_core::synthetic::{central_mean, prototype_logits};
use lesion_core::ImageTensor;

#[derive(Parser)]
#[command(version, about = "Prototype-distance stand-in for a trained model")]
struct Args {
    /// Member index; members other than 0 add per-image logit noise.
    #[arg(long, default_value_t = 0)]
    model: u64,
    #[arg(long, default_value_t = 400.0)]
    temperature: f64,
    /// Logit noise amplitude for members other than 0.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Side fraction of the central patch whose mean colour is used.
    #[arg(long, default_value_t = 0.3)]
    fraction: f64,
}

fn scores(path: &str, args: &Args) -> Result<Vec<f64>, String> {
    let img = ImageTensor::load(path).map_err(|e| e.to_string())?;
    let mut logits = prototype_logits(central_mean(&img, args.fraction), args.temperature);
    if args.model != 0 {
        let mut rng = keyed_rng(args.model, path);
        for l in &mut logits {
            *l += uniform(&mut rng, -args.noise, args.noise);
        }
    }
    softmax(&logits).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("read error: {e}");
                return ExitCode::FAILURE;
            }
        };
        let path = line.trim();
        if path.is_empty() {
            continue;
        }
        match scores(path, &args) {
            Ok(s) => {
                let text: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                if writeln!(out, "{}", text.join(",")).and_then(|_| out.flush()).is_err() {
                    return ExitCode::FAILURE;
                }
            }
            Err(e) => {
                eprintln!("{path}: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    ExitCode::SUCCESS
}
