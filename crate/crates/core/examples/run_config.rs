//! Drives the experiment harness from a JSON document, as the `frontlab`
//! command does.

use std::error::Error;

use frontlab::harness::{parse_config, run_experiment, OutputSink};

pub fn run() -> Result<(), Box<dyn Error>> {
    let loaded = parse_config(r#"{ "spectral": { "h": 0.02 }, "seed": 7 }"#)?;
    println!("config hash {}", loaded.hash);

    let dir = std::env::temp_dir().join(format!("frontlab-example-{}", std::process::id()));
    let mut sink = OutputSink::new(&dir);
    for name in ["wave", "gap"] {
        let record = run_experiment(&loaded, name, &mut sink)?;
        println!("{name}: {}", record.summary);
    }
    println!("wrote {:?} to {}", sink.written, dir.display());
    std::fs::remove_dir_all(&dir)?;

    let err = parse_config(r#"{ "nonlinearity": { "kind": "cubic", "theta": 0.6 } }"#).unwrap_err();
    println!("rejected: {err} (exit code {})", err.exit_code());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
