//! Writes a synthetic PGM frame sequence.
//!
//! ```text
//! cargo run --release -p flowspec-core --example make_frames -- <dir> [lowrank|bump] [width height frames] [seed]
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use flowspec_core::ingestion::write_pgm;
use flowspec_core::synthetic::{low_rank_frames, translating_bump};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(dir) = args.first().map(PathBuf::from) else {
        eprintln!("usage: make_frames <dir> [lowrank|bump] [width height frames] [seed]");
        return ExitCode::from(1);
    };
    let kind = args.get(1).map(String::as_str).unwrap_or("lowrank");
    let num = |i: usize, default: usize| {
        args.get(i)
            .map(|s| s.parse::<usize>().expect("numeric argument"))
            .unwrap_or(default)
    };
    let (width, height, n) = (num(2, 64), num(3, 64), num(4, 100));
    let seed = num(5, 1) as u64;

    let data = match kind {
        "lowrank" => low_rank_frames(width, height, n, 8, 0.01, seed),
        "bump" => translating_bump(width, height, n, width as f64 / 16.0),
        other => {
            eprintln!("unknown kind {other:?}; expected lowrank or bump");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("{}: {e}", dir.display());
        return ExitCode::from(2);
    }
    let mut clamped = 0;
    for j in 0..n {
        let frame = data.frame(j).expect("synthetic data has a frame shape");
        match write_pgm(&dir.join(format!("{:04}.pgm", j + 1)), &frame) {
            Ok(c) => clamped += c,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        }
    }
    println!("wrote {n} {width}x{height} frames to {} ({clamped} pixels clamped)", dir.display());
    ExitCode::SUCCESS
}
