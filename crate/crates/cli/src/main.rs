use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use theoryforge::{
    cmd_check, cmd_gen, cmd_lib, cmd_simp, parse_kinds, parse_suffix, RunConfig, CONFIG_FILE,
    EXIT_OK, EXIT_USAGE,
};

/// Generate derived constructions from equational theory presentations.
#[derive(Parser)]
#[command(name = "theoryforge", version)]
struct Cli {
    /// Settings file (`key = value` lines). Defaults to ./theoryforge.cfg if present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check declaration files.
    Check { files: Vec<PathBuf> },
    /// Generate constructions for every theory in a file.
    Gen {
        file: PathBuf,
        #[command(flatten)]
        opts: GenOpts,
    },
    /// Expand a theory library and generate constructions for each theory.
    Lib {
        file: PathBuf,
        #[command(flatten)]
        opts: GenOpts,
    },
    /// Simplify a term using the orientable axioms of a theory.
    Simp {
        file: PathBuf,
        term: String,
        /// Theory to use; defaults to the first record in the file.
        #[arg(long)]
        theory: Option<String>,
        /// Orient associativity to nest to the right.
        #[arg(long)]
        orient_assoc: bool,
    },
}

#[derive(Args)]
struct GenOpts {
    /// Comma-separated: sig,prod,termlang,open-termlang,hom,mono,endo
    #[arg(long)]
    constructions: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// KIND=STR, repeatable.
    #[arg(long = "suffix", value_name = "KIND=STR")]
    suffixes: Vec<String>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    orient_assoc: bool,
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    let (path, required) = match path {
        Some(p) => (p.clone(), true),
        None => (PathBuf::from(CONFIG_FILE), false),
    };
    match std::fs::read_to_string(&path) {
        Ok(text) => cfg
            .apply_file_text(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        Err(e) if required => return Err(format!("{}: {e}", path.display())),
        Err(_) => {}
    }
    Ok(cfg)
}

fn apply_opts(cfg: &mut RunConfig, opts: &GenOpts) -> Result<(), String> {
    if let Some(c) = &opts.constructions {
        cfg.kinds = parse_kinds(c).map_err(|e| e.to_string())?;
    }
    if let Some(o) = &opts.out {
        cfg.out_dir = o.clone();
    }
    for s in &opts.suffixes {
        let (kind, suffix) = parse_suffix(s).map_err(|e| e.to_string())?;
        cfg.set_suffix(kind, suffix).map_err(|e| e.to_string())?;
    }
    if let Some(j) = opts.jobs {
        cfg.jobs = j;
    }
    cfg.orient_assoc |= opts.orient_assoc;
    Ok(())
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let mut cfg = match load_config(cli.config.as_ref()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    let mut with_opts = |opts: &GenOpts, err: &mut dyn Write| match apply_opts(&mut cfg, opts) {
        Ok(()) => Some(cfg.clone()),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            None
        }
    };
    match &cli.command {
        Command::Check { files } => cmd_check(files, &mut out, &mut err),
        Command::Gen { file, opts } => match with_opts(opts, &mut err) {
            Some(cfg) => cmd_gen(file, &cfg, &mut out, &mut err),
            None => EXIT_USAGE,
        },
        Command::Lib { file, opts } => match with_opts(opts, &mut err) {
            Some(cfg) => cmd_lib(file, &cfg, &mut out, &mut err),
            None => EXIT_USAGE,
        },
        Command::Simp {
            file,
            term,
            theory,
            orient_assoc,
        } => {
            cfg.orient_assoc |= orient_assoc;
            cmd_simp(file, theory.as_deref(), term, &cfg, &mut out, &mut err)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
