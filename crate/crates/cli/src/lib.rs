//! Commands behind the `theoryforge` binary. Each command writes its report
//! to the given streams and returns the process exit code.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use theoryforge_core::checker::{check_module, format_report, CheckError};
use theoryforge_core::combinators::{expand_library, parse_library};
use theoryforge_core::engine::{normalize_traced, rules_for, suggested_fuel, OpenTerm};
use theoryforge_core::eqtheory::{embed, extract, EqTheory};
use theoryforge_core::generators::{assemble_module, gen_all, GenError, GenKind, Suffixes};
use theoryforge_core::syntax::{
    parse_file, print_decl, print_module, print_term, Decl, ParseError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_GEN: i32 = 3;

pub const CONFIG_FILE: &str = "theoryforge.cfg";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub kinds: Vec<GenKind>,
    pub suffixes: Suffixes,
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub orient_assoc: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kinds: GenKind::defaults(),
            suffixes: Suffixes::default(),
            out_dir: PathBuf::from("out"),
            jobs: 1,
            orient_assoc: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

/// `sig,prod,hom`; the empty string selects nothing.
pub fn parse_kinds(s: &str) -> Result<Vec<GenKind>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|k| !k.is_empty())
        .map(|k| k.parse().map_err(ConfigError))
        .collect()
}

/// `KIND=STR`, as given to `--suffix`.
pub fn parse_suffix(s: &str) -> Result<(GenKind, String), ConfigError> {
    let (kind, suffix) = s
        .split_once('=')
        .ok_or_else(|| ConfigError(format!("expected KIND=SUFFIX, got `{s}`")))?;
    let kind: GenKind = kind.trim().parse().map_err(ConfigError)?;
    Ok((kind, suffix.trim().to_string()))
}

fn parse_bool(s: &str) -> Result<bool, ConfigError> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(ConfigError(format!("expected a boolean, got `{s}`"))),
    }
}

impl RunConfig {
    pub fn set_suffix(&mut self, kind: GenKind, suffix: String) -> Result<(), ConfigError> {
        let slot = self
            .suffixes
            .get_mut(kind)
            .ok_or_else(|| ConfigError(format!("`{kind}` takes no suffix")))?;
        *slot = suffix;
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "constructions" => self.kinds = parse_kinds(value)?,
            "out" => self.out_dir = PathBuf::from(value),
            "jobs" => {
                self.jobs = value.parse().map_err(|_| {
                    ConfigError(format!("jobs must be a positive count, got `{value}`"))
                })?
            }
            "orient-assoc" => self.orient_assoc = parse_bool(value)?,
            "suffix" => {
                let (kind, s) = parse_suffix(value)?;
                self.set_suffix(kind, s)?;
            }
            _ => match key.strip_prefix("suffix.") {
                Some(kind) => {
                    let kind: GenKind = kind.parse().map_err(ConfigError)?;
                    self.set_suffix(kind, value.to_string())?;
                }
                None => return Err(ConfigError(format!("unknown setting `{key}`"))),
            },
        }
        Ok(())
    }

    /// Reads a config file: `key = value` lines, `#` comments.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.jobs == 0 {
            return Err(ConfigError("jobs must be at least 1".into()));
        }
        self.suffixes.validate().map_err(ConfigError)
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", path.display());
            None
        }
    }
}

/// Parses and checks each file; prints one line per error.
pub fn cmd_check(files: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut code = EXIT_OK;
    for f in files {
        let Some(src) = read(f, err) else {
            code = EXIT_USAGE;
            continue;
        };
        match parse_file(&src) {
            Err(e) => {
                let _ = writeln!(err, "{}:{e}", f.display());
                code = EXIT_USAGE;
            }
            Ok(decls) => {
                let errors = check_module(&decls);
                let _ = out.write_all(format_report(&f.display().to_string(), &errors).as_bytes());
                if !errors.is_empty() && code == EXIT_OK {
                    code = EXIT_CHECK;
                }
            }
        }
    }
    code
}

/// Everything generated for one theory.
#[derive(Clone, Debug)]
pub struct TheoryOutput {
    pub theory: String,
    /// `(file name, contents)`, one per construction.
    pub files: Vec<(String, String)>,
    pub module: String,
    pub definitions: usize,
    pub errors: Vec<CheckError>,
}

pub const MODULE_FILE: &str = "module.gen.eqt";

#[derive(Debug, Error)]
pub enum GenFailure {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("printed module does not reparse: {0}")]
    Reparse(#[from] ParseError),
}

/// Generates, prints, reparses and checks the module for one theory.
pub fn generate_theory(
    input: Decl,
    t: &EqTheory,
    cfg: &RunConfig,
) -> Result<TheoryOutput, GenFailure> {
    let generated = gen_all(t, &cfg.kinds, &cfg.suffixes)?;
    let files = generated
        .iter()
        .map(|d| (format!("{}.gen.eqt", d.name()), print_decl(d)))
        .collect();
    let definitions = 1 + generated.len();
    let module = print_module(&assemble_module(input, generated));
    // check the text as written so that reported positions are real
    let errors = check_module(&parse_file(&module)?);
    Ok(TheoryOutput {
        theory: t.name.to_string(),
        files,
        module,
        definitions,
        errors,
    })
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn generate_all(
    inputs: Vec<(Decl, EqTheory)>,
    cfg: &RunConfig,
) -> Result<Vec<TheoryOutput>, (String, GenFailure)> {
    in_pool(cfg.jobs, || {
        inputs
            .into_par_iter()
            .map(|(d, t)| generate_theory(d, &t, cfg).map_err(|e| (t.name.to_string(), e)))
            .collect()
    })
}

/// Writes `<out>/<Theory>/` for each theory, removing stale generated files.
pub fn write_outputs(out_dir: &Path, outputs: &[TheoryOutput]) -> io::Result<()> {
    for o in outputs.iter().filter(|o| !o.files.is_empty()) {
        let dir = out_dir.join(&o.theory);
        fs::create_dir_all(&dir)?;
        for entry in fs::read_dir(&dir)? {
            let p = entry?.path();
            if p.to_string_lossy().ends_with(".gen.eqt") {
                fs::remove_file(p)?;
            }
        }
        for (name, text) in &o.files {
            fs::write(dir.join(name), text)?;
        }
        fs::write(dir.join(MODULE_FILE), &o.module)?;
    }
    Ok(())
}

fn report_generated(cfg: &RunConfig, outputs: &[TheoryOutput], out: &mut dyn Write) -> bool {
    let mut clean = true;
    for o in outputs {
        if !o.errors.is_empty() {
            clean = false;
            let file = cfg.out_dir.join(&o.theory).join(MODULE_FILE);
            let _ = out.write_all(format_report(&file.display().to_string(), &o.errors).as_bytes());
        }
    }
    clean
}

fn finish(
    cfg: &RunConfig,
    outputs: &[TheoryOutput],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if let Err(e) = write_outputs(&cfg.out_dir, outputs) {
        let _ = writeln!(err, "{}: {e}", cfg.out_dir.display());
        return EXIT_USAGE;
    }
    if report_generated(cfg, outputs, out) {
        EXIT_OK
    } else {
        EXIT_GEN
    }
}

/// Generates the selected constructions for every record in `file`.
pub fn cmd_gen(file: &Path, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "{e}");
        return EXIT_USAGE;
    }
    let Some(src) = read(file, err) else {
        return EXIT_USAGE;
    };
    let decls = match parse_file(&src) {
        Ok(ds) => ds,
        Err(e) => {
            let _ = writeln!(err, "{}:{e}", file.display());
            return EXIT_USAGE;
        }
    };
    let errors = check_module(&decls);
    if !errors.is_empty() {
        let _ = out.write_all(format_report(&file.display().to_string(), &errors).as_bytes());
        return EXIT_CHECK;
    }
    let mut inputs = Vec::new();
    for d in &decls {
        let Some(r) = d.as_record() else { continue };
        match extract(r) {
            Ok(t) => inputs.push((d.clone(), t)),
            Err(e) => {
                let _ = writeln!(err, "{}: theory `{}`: {e}", file.display(), r.name);
                return EXIT_GEN;
            }
        }
    }
    match generate_all(inputs, cfg) {
        Ok(outputs) => finish(cfg, &outputs, out, err),
        Err((name, e)) => {
            let _ = writeln!(err, "theory `{name}`: {e}");
            EXIT_GEN
        }
    }
}

/// Totals printed by `cmd_lib`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Summary {
    pub theories: usize,
    pub definitions: usize,
    pub lines: usize,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "theories={} definitions={} lines={}",
            self.theories, self.definitions, self.lines
        )
    }
}

pub fn summarize(outputs: &[TheoryOutput]) -> Summary {
    Summary {
        theories: outputs.len(),
        definitions: outputs.iter().map(|o| o.definitions).sum(),
        lines: outputs.iter().map(|o| o.module.lines().count()).sum(),
    }
}

/// Expands a `.lib` file and generates constructions for every theory.
pub fn cmd_lib(file: &Path, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "{e}");
        return EXIT_USAGE;
    }
    let Some(src) = read(file, err) else {
        return EXIT_USAGE;
    };
    let entries = match parse_library(&src) {
        Ok(es) => es,
        Err(e) => {
            let _ = writeln!(err, "{}:{e}", file.display());
            return EXIT_USAGE;
        }
    };
    let lib = match expand_library(&entries) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "{}: {e}", file.display());
            return EXIT_GEN;
        }
    };
    let inputs = lib
        .theories
        .iter()
        .map(|t| (Decl::from(embed(t)), t.clone()))
        .collect();
    let outputs = match generate_all(inputs, cfg) {
        Ok(o) => o,
        Err((name, e)) => {
            let _ = writeln!(err, "theory `{name}`: {e}");
            return EXIT_GEN;
        }
    };
    let code = finish(cfg, &outputs, out, err);
    let _ = writeln!(out, "{}", summarize(&outputs));
    code
}

/// Normalizes `term` with the orientable axioms of a theory in `file`.
pub fn cmd_simp(
    file: &Path,
    theory: Option<&str>,
    term: &str,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let Some(src) = read(file, err) else {
        return EXIT_USAGE;
    };
    let decls = match parse_file(&src) {
        Ok(ds) => ds,
        Err(e) => {
            let _ = writeln!(err, "{}:{e}", file.display());
            return EXIT_USAGE;
        }
    };
    let record = decls
        .iter()
        .filter_map(Decl::as_record)
        .find(|r| theory.is_none_or(|n| r.name == n));
    let Some(record) = record else {
        let _ = writeln!(
            err,
            "{}: no theory named `{}`",
            file.display(),
            theory.unwrap_or("?")
        );
        return EXIT_USAGE;
    };
    let t = match extract(record) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "theory `{}`: {e}", record.name);
            return EXIT_GEN;
        }
    };
    let (open, vars) = match OpenTerm::parse_in(&t, term) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "term: {e}");
            return EXIT_USAGE;
        }
    };
    let rules = rules_for(&t, cfg.orient_assoc);
    let n = normalize_traced(&open, &rules, suggested_fuel(&open, &rules));
    let _ = writeln!(out, "{}", print_term(&n.term.to_term(&vars)));
    EXIT_OK
}
