use std::process::ExitCode;

use papr_lab::harness::{self, parse_cli, CliError};

fn main() -> ExitCode {
    let inv = match parse_cli(std::env::args_os()) {
        Ok(inv) => inv,
        Err(CliError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = inv.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };

    let cfg = &inv.config;
    let out = match pool.install(|| harness::run(cfg, inv.mode)) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };

    if let Some(ccdf) = &out.ccdf {
        println!("PAPR at CCDF = 0.1 ({} symbols):", cfg.num_symbols);
        for r in &ccdf.results {
            match r.crossing_db {
                Some(v) => println!("  {:<20} {v:6.2} dB", r.case.label()),
                None => println!("  {:<20}   n/a (outside grid)", r.case.label()),
            }
        }
    }
    if let Some(ber) = &out.ber {
        println!("BER:");
        for c in &ber.curves {
            let pts: Vec<String> = c
                .points
                .iter()
                .map(|p| format!("{}dB={:.3e}", p.ebn0_db, p.ber()))
                .collect();
            println!("  {:<20} {}", c.case.label(), pts.join("  "));
        }
    }
    println!("wrote {} files to {}", out.files.len(), cfg.output_dir.display());
    ExitCode::SUCCESS
}
