//! `frdtm` binary: reads a configuration file, runs one subcommand, and
//! writes CSV to stdout or a file.
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad arguments,
//! unreadable or invalid config), 3 for runtime failures (divergence,
//! off-grid probes, unwritable output).

use std::env;
use std::fs;
use std::process;

use frdtm_cli::config::parse_config;
use frdtm_cli::run::{check_mode, run, Command};

const USAGE: &str = "usage: frdtm <solve|table|surface|sweep> <config> [--out PATH] [--threads K]";

fn main() {
    process::exit(real_main());
}

fn real_main() -> i32 {
    let args: Vec<String> = env::args().skip(1).collect();

    let mut positional: Vec<String> = Vec::new();
    let mut out_flag: Option<String> = None;
    let mut threads: Option<usize> = None;

    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--out" => match it.next() {
                Some(path) => out_flag = Some(path),
                None => {
                    eprintln!("config error: --out needs a path\n{USAGE}");
                    return 2;
                }
            },
            "--threads" => {
                let parsed = it.next().and_then(|v| v.parse::<usize>().ok());
                match parsed {
                    Some(k) if k >= 1 => threads = Some(k),
                    _ => {
                        eprintln!("config error: --threads needs a positive integer\n{USAGE}");
                        return 2;
                    }
                }
            }
            s if s.starts_with("--") => {
                eprintln!("config error: unknown flag '{s}'\n{USAGE}");
                return 2;
            }
            _ => positional.push(arg),
        }
    }

    if positional.len() != 2 {
        eprintln!("{USAGE}");
        return 2;
    }
    let cmd = match Command::from_name(&positional[0]) {
        Some(cmd) => cmd,
        None => {
            eprintln!("config error: unknown command '{}'\n{USAGE}", positional[0]);
            return 2;
        }
    };

    // the pool must exist before any parallel work; a second initialization
    // in-process is harmless and keeps the current pool
    if let Some(k) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }

    let text = match fs::read_to_string(&positional[1]) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("config error: cannot read '{}': {e}", positional[1]);
            return 2;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return 2;
        }
    };
    if let Err(m) = check_mode(cmd, &cfg) {
        eprintln!("config error: {m}");
        return 2;
    }

    let csv = match run(cmd, &cfg) {
        Ok(csv) => csv,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };

    match out_flag.or_else(|| cfg.out.clone()) {
        Some(path) => {
            if let Err(e) = fs::write(&path, csv) {
                eprintln!("error: cannot write '{path}': {e}");
                return 3;
            }
        }
        None => print!("{csv}"),
    }
    0
}
