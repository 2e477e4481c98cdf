// Copyright 2026 The tpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end: check a specification, emit an ANTLR grammar, or
//! run a specification directly on some input.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tpg_core::backend::{emit, interpret, ExternalFunctionTable, HostError, RuntimeValue};
use tpg_core::diag::{Diagnostic, SourceNames};
use tpg_core::driver::{analyze, load_environment, Environment, LoadError, ValidatedSpec};
use tpg_core::flow::{build_cfg, to_dot};
use tpg_core::types::Extension;

const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "tpg", version, about = "Typed parser-generator specifications")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type check a specification.
    Check {
        #[command(flatten)]
        common: Common,
        /// Print the control-flow graph of a translation function, or of the
        /// function of a rule, in Graphviz format.
        #[arg(long, value_name = "NAME")]
        dot_cfg: Option<String>,
    },
    /// Emit an ANTLR grammar and the externals interface.
    Emit {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, short, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Parse input text and evaluate the translation with host bindings.
    Run {
        #[command(flatten)]
        common: Common,
        /// Start rule; defaults to the first syntactic rule.
        #[arg(long)]
        start: Option<String>,
        /// Translation function for the start rule.
        #[arg(long)]
        function: Option<String>,
        /// Input file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Environment entry `name=value`, may be repeated.
        #[arg(long = "env", value_name = "NAME=VALUE", value_parser = parse_pair)]
        env: Vec<(String, i64)>,
        /// Values for the remaining inputs of the start function, in order.
        #[arg(long = "arg", value_name = "VALUE")]
        args: Vec<String>,
        /// Host implementations of the external functions.
        #[arg(long, value_enum, default_value = "demo")]
        bindings: Bindings,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Bindings {
    /// Integer arithmetic with an environment of variables.
    Demo,
}

#[derive(Args)]
struct Common {
    /// Specification file.
    spec: PathBuf,
    /// Type-system description file.
    #[arg(long, value_name = "FILE")]
    typesystem: Option<PathBuf>,
    /// Type-system extension: `declarative` or `java`.
    #[arg(long, default_value = "declarative")]
    extension: String,
    /// Back-end profile to select from the description.
    #[arg(long)]
    profile: Option<String>,
}

fn parse_pair(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v = v.trim().parse().map_err(|e| format!("{v}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Usage(String),
    Diagnostics(Vec<Diagnostic>, SourceNames),
    Runtime(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { common, dot_cfg } => check(&common, dot_cfg.as_deref()),
        Command::Emit { common, out } => emit_files(&common, &out),
        Command::Run {
            common,
            start,
            function,
            input,
            env,
            args,
            bindings,
        } => run(&common, start, function, input, &env, &args, bindings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("tpg: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Diagnostics(diags, names)) => {
            for d in &diags {
                eprintln!("{}", d.render(&names));
            }
            ExitCode::from(EXIT_DIAGNOSTICS)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("tpg: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(common: &Common) -> Result<(ValidatedSpec, Environment), Failure> {
    let text = read(&common.spec)?;
    let description = common.typesystem.as_deref().map(read).transpose()?;
    let names = SourceNames::new(
        common.spec.display().to_string(),
        common
            .typesystem
            .as_ref()
            .map_or_else(|| "<typesystem>".to_string(), |p| p.display().to_string()),
    );
    let env = load_environment(
        &common.extension,
        description.as_deref(),
        common.profile.as_deref(),
    )
    .map_err(|e| match e {
        LoadError::Diagnostics(d) => Failure::Diagnostics(d, names.clone()),
        other => Failure::Usage(other.to_string()),
    })?;
    let v = analyze(&text, env.ext.clone()).map_err(|d| Failure::Diagnostics(d, names.clone()))?;
    for w in &v.warnings {
        eprintln!("{}", w.render(&names));
    }
    Ok((v, env))
}

fn check(common: &Common, dot_cfg: Option<&str>) -> Result<(), Failure> {
    let (v, _) = load(common)?;
    if let Some(name) = dot_cfg {
        let f = v
            .spec
            .function(name)
            .or_else(|| v.spec.start_function(name))
            .ok_or_else(|| {
                Failure::Usage(format!("no translation function or rule named {name}"))
            })?;
        let rule = v.spec.grammar.rule(&f.for_rule).expect("validated rule");
        print!("{}", to_dot(&build_cfg(rule, f), f));
    }
    Ok(())
}

fn emit_files(common: &Common, out: &Path) -> Result<(), Failure> {
    let (v, env) = load(common)?;
    let emitted = emit(&v, env.profile.as_ref()).map_err(|e| Failure::Runtime(e.to_string()))?;
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    for (name, body) in [
        (&emitted.grammar_file, &emitted.grammar),
        (&emitted.externals_file, &emitted.externals),
    ] {
        let path = out.join(name);
        fs::write(&path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(
    common: &Common,
    start: Option<String>,
    function: Option<String>,
    input: Option<PathBuf>,
    env: &[(String, i64)],
    args: &[String],
    bindings: Bindings,
) -> Result<(), Failure> {
    let (v, _) = load(common)?;
    let start = match start {
        Some(s) => s,
        None => v
            .spec
            .grammar
            .rules
            .iter()
            .find(|r| !r.is_token)
            .map(|r| r.name.clone())
            .ok_or_else(|| Failure::Usage("the grammar has no syntactic rule".into()))?,
    };
    let text = match input {
        Some(p) => read(&p)?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
            s
        }
    };
    let f = match &function {
        Some(name) => v.spec.function(name),
        None => v.spec.start_function(&start),
    };
    let inputs = match f {
        Some(f) => input_values(&v, &f.name.name, env, args)?,
        None => Vec::new(),
    };
    let table = match bindings {
        Bindings::Demo => demo_bindings(v.ext.as_ref()),
    };
    let outputs = interpret(&v, &start, function.as_deref(), inputs, &text, &table)
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for o in outputs {
        println!("{o}");
    }
    Ok(())
}

/// Builds the start function's inputs: environments from `--env`, the rest
/// from `--arg` in order.
fn input_values(
    v: &ValidatedSpec,
    function: &str,
    env: &[(String, i64)],
    args: &[String],
) -> Result<Vec<RuntimeValue>, Failure> {
    let f = v.spec.function(function).expect("function exists");
    let types = v.function_types(function);
    let sys = v.ext.types();
    let mut rest = args.iter();
    let mut out = Vec::new();
    for decl in &f.inputs {
        let ty = types
            .and_then(|t| t.type_of(&decl.name.name))
            .ok_or_else(|| Failure::Usage(format!("input {} has no type", decl.name.name)))?;
        let value = match sys.type_name(ty) {
            ENVIRONMENT => {
                RuntimeValue::host(ty, env.iter().cloned().collect::<HashMap<String, i64>>())
            }
            name => {
                let raw = rest.next().ok_or_else(|| {
                    Failure::Usage(format!("missing --arg for input {}", decl.name.name))
                })?;
                if ty == sys.string_type() {
                    RuntimeValue::string(ty, raw.clone())
                } else {
                    let i = raw.parse().map_err(|_| {
                        Failure::Usage(format!(
                            "input {} of type {name} needs an integer",
                            decl.name.name
                        ))
                    })?;
                    RuntimeValue::int(ty, i)
                }
            }
        };
        out.push(value);
    }
    Ok(out)
}

const ENVIRONMENT: &str = "Environment";

/// Arithmetic over `i64` with an environment of variable values.
fn demo_bindings(ext: &dyn Extension) -> ExternalFunctionTable {
    let mut t = ExternalFunctionTable::new();
    let Some(int) = ext.types().lookup("Int") else {
        return t;
    };
    let int_of = |v: &RuntimeValue| v.as_int().ok_or_else(|| HostError("not an integer".into()));
    t.bind("strToInt", move |a| {
        let s = a[0].as_str().unwrap_or_default();
        s.parse()
            .map(|i| vec![RuntimeValue::int(int, i)])
            .map_err(|e| HostError(format!("{s}: {e}")))
    });
    t.bind("value", move |a| {
        let env = a[0]
            .downcast::<HashMap<String, i64>>()
            .ok_or_else(|| HostError("bad environment".into()))?;
        let name = a[1].as_str().unwrap_or_default();
        env.get(name)
            .map(|i| vec![RuntimeValue::int(int, *i)])
            .ok_or_else(|| HostError(format!("unbound variable {name}")))
    });
    t.bind("zero", move |_| Ok(vec![RuntimeValue::int(int, 0)]));
    t.bind("one", move |_| Ok(vec![RuntimeValue::int(int, 1)]));
    t.bind("neg", move |a| {
        Ok(vec![RuntimeValue::int(int, -int_of(&a[0])?)])
    });
    t.bind("add", move |a| {
        Ok(vec![RuntimeValue::int(
            int,
            int_of(&a[0])?.wrapping_add(int_of(&a[1])?),
        )])
    });
    t.bind("mul", move |a| {
        Ok(vec![RuntimeValue::int(
            int,
            int_of(&a[0])?.wrapping_mul(int_of(&a[1])?),
        )])
    });
    t
}
