use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use residuum::Error;
use residuum_cli::report::Emitter;
use residuum_cli::Cli;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_PRIME: u8 = 3;
const EXIT_OVERSIZE: u8 = 4;
const EXIT_FACTOR: u8 = 5;
const EXIT_DOMAIN: u8 = 6;
const EXIT_IO: u8 = 7;

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::NotPrime(_) | Error::EvenPrime => EXIT_NOT_PRIME,
            Error::Oversize { .. } => EXIT_OVERSIZE,
            Error::FactorizationFailure(_) => EXIT_FACTOR,
            Error::Checkpoint(_) => EXIT_IO,
            _ => EXIT_DOMAIN,
        };
    }
    if err.chain().any(|c| c.is::<std::io::Error>()) {
        return EXIT_IO;
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let settings = match cli.global.resolve() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if e.chain().any(|c| c.is::<std::io::Error>()) { EXIT_IO } else { EXIT_USAGE });
        }
    };
    if let Some(jobs) = settings.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("warning: worker pool: {e}");
        }
    }
    let started = Instant::now();
    let mut out = Emitter::stdout(settings.format, cli.command.echo());
    let result = cli.command.run(&settings, &mut out).and_then(|()| Ok(out.flush()?));
    let ok = out.ok();
    drop(out);
    eprintln!("# elapsed {:.3}s", started.elapsed().as_secs_f64());
    match result {
        Ok(()) if ok => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(Error::Oversize { .. }) = e.downcast_ref::<Error>() {
                eprintln!("hint: raise --table-bound (or RESIDUUM_TABLE_BOUND), or use a smaller p or k");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
