use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vvmf::ahol::{ahol_decompose, lower_op, raise_op, tinf_closure};
use vvmf::exactnum::rat_int;
use vvmf::forms::{eisenstein, vv_eisenstein};
use vvmf::harness::{verify_counts, verify_example32, verify_thm11, Report};
use vvmf::hecke::{delta_cosets, hecke_form};
use vvmf::hyperalg::{hyper_tensor, FormSpan};
use vvmf::reps::{decompose, hom_space, Residual};
use vvmf::{AholForm, Error, Rep, RepRegistry};

#[derive(Parser)]
#[command(
    name = "vvmf",
    version,
    about = "Exact computations with vector-valued modular forms"
)]
struct Cli {
    /// Representation registry (JSON); defaults to the bundled one.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Level-one Eisenstein series E_k.
    Eis {
        #[arg(long)]
        weight: i64,
        #[arg(long, default_value_t = 6)]
        prec: u64,
    },
    /// Span of vector-valued Eisenstein series obtained through T_M.
    Vveis {
        #[arg(long)]
        weight: i64,
        #[arg(long = "type")]
        ty: String,
        #[arg(long)]
        index: u64,
        #[arg(long, default_value_t = 6)]
        prec: u64,
    },
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Basis of Hom(from, to). Types are registry labels joined by `*` (tensor).
    Homspace {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Multiplicities of registry types in a representation.
    Decompose {
        #[arg(long = "type")]
        ty: String,
    },
    /// The hyper-algebra product of two forms.
    Hyperprod {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Target types (registry JSON); defaults to the active registry.
        #[arg(long)]
        targets: Option<PathBuf>,
        #[arg(long)]
        prec: Option<u64>,
    },
    #[command(subcommand)]
    Ahol(AholCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum HeckeCmd {
    Cosets {
        #[arg(long, default_value_t = 1)]
        genus: usize,
        #[arg(long)]
        index: i64,
        #[arg(long)]
        count_only: bool,
    },
    Apply {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        form: PathBuf,
    },
}

#[derive(Subcommand)]
enum AholCmd {
    Raise {
        #[arg(long)]
        form: PathBuf,
    },
    Lower {
        #[arg(long)]
        form: PathBuf,
    },
    Decompose {
        #[arg(long)]
        form: PathBuf,
    },
    Closure {
        #[arg(long)]
        span: PathBuf,
        /// Weight window `kmin:kmax`.
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = 4)]
        max_rounds: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Example32 {
        #[arg(long, default_value_t = 3)]
        prec: u64,
    },
    Thm11(Thm11Args),
    Counts,
    All {
        #[arg(long)]
        prec: Option<u64>,
    },
}

#[derive(Args)]
struct Thm11Args {
    #[arg(long, default_value_t = 12)]
    k: i64,
    #[arg(long, default_value_t = 4)]
    l: i64,
    #[arg(long, default_value_t = 8)]
    l2: i64,
    /// Comma-separated Hecke indices.
    #[arg(long, default_value = "1,2", value_delimiter = ',')]
    indices: Vec<u64>,
    /// Defaults to max(Sturm bound, 6).
    #[arg(long)]
    prec: Option<u64>,
}

enum Outcome {
    Ok,
    ExpectationFailed,
}

fn read(path: &Path) -> vvmf::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_registry(path: Option<&PathBuf>) -> vvmf::Result<RepRegistry> {
    match path {
        Some(p) => RepRegistry::from_json(&read(p)?),
        None => Ok(RepRegistry::bundled()),
    }
}

/// `a*b*c` as the tensor product of registry entries.
fn parse_type(expr: &str, reg: &RepRegistry) -> vvmf::Result<Rep> {
    let mut parts = expr.split('*').map(str::trim);
    let first = reg.require(parts.next().unwrap_or(""))?.clone();
    let rep = parts.try_fold(first, |acc, p| reg.require(p).map(|r| acc.tensor(r)))?;
    Ok(rep.with_label(expr))
}

fn load_form(path: &Path, reg: &RepRegistry) -> vvmf::Result<AholForm> {
    AholForm::from_json(&read(path)?, reg)
}

struct Output {
    format: Format,
    text: String,
    json: Value,
}

impl Output {
    fn form(format: Format, f: &AholForm) -> Self {
        Output {
            format,
            text: f.to_string(),
            json: f.to_json_value(),
        }
    }

    fn span(format: Format, s: &FormSpan) -> Self {
        let mut text = String::new();
        for ((w, label), gens) in s.grades() {
            text += &format!("grade ({w}, {label}): dim {}\n", gens.len());
            for (f, p) in gens {
                text += &format!("  - {p}\n");
                for line in f.to_string().lines().skip(1) {
                    text += &format!("    {line}\n");
                }
            }
        }
        if text.is_empty() {
            text = "empty span\n".into();
        }
        Output {
            format,
            text,
            json: s.to_json_value(),
        }
    }

    fn report(format: Format, r: &Report) -> Self {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Output {
            format,
            text: format!("# generated {stamp}\n{r}"),
            json: r.to_json(),
        }
    }

    fn render(&self) -> String {
        match self.format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).unwrap() + "\n",
        }
    }
}

fn run(cli: &Cli) -> vvmf::Result<(Output, Outcome)> {
    let reg = load_registry(cli.registry.as_ref())?;
    let fmt = cli.format;
    let ok = |o: Output| Ok((o, Outcome::Ok));
    match &cli.cmd {
        Cmd::Eis { weight, prec } => ok(Output::form(fmt, &eisenstein(*weight, *prec)?)),
        Cmd::Vveis {
            weight,
            ty,
            index,
            prec,
        } => {
            let target = parse_type(ty, &reg)?;
            ok(Output::span(
                fmt,
                &vv_eisenstein(*weight, &target, *index, *prec)?,
            ))
        }
        Cmd::Hecke(HeckeCmd::Cosets {
            genus,
            index,
            count_only,
        }) => {
            let cs = delta_cosets(*genus, *index)?;
            let text = if *count_only {
                format!("{}\n", cs.len())
            } else {
                cs.iter().map(|c| format!("{c}\n")).collect()
            };
            let json = if *count_only {
                json!({"count": cs.len()})
            } else {
                json!({"count": cs.len(), "cosets": cs})
            };
            ok(Output {
                format: fmt,
                text,
                json,
            })
        }
        Cmd::Hecke(HeckeCmd::Apply { index, form }) => {
            let f = load_form(form, &reg)?;
            ok(Output::form(fmt, &hecke_form(*index, &f)?))
        }
        Cmd::Homspace { from, to } => {
            let (r, r2) = (parse_type(from, &reg)?, parse_type(to, &reg)?);
            let basis = hom_space(&r, &r2);
            let mut text = format!("dim Hom({from}, {to}) = {}\n", basis.len());
            for (i, m) in basis.iter().enumerate() {
                text += &format!("phi[{i}] =\n{m}\n");
            }
            let json = json!({"from": from, "to": to, "dim": basis.len(), "basis": basis});
            ok(Output {
                format: fmt,
                text,
                json,
            })
        }
        Cmd::Decompose { ty } => {
            let r = parse_type(ty, &reg)?;
            let d = decompose(&r, &reg);
            let mut text = String::new();
            for (label, m) in &d.multiplicities {
                text += &format!("{label}: {m}\n");
            }
            let residual = match &d.residual {
                Residual::None => json!(null),
                Residual::Split(parts) => {
                    text += "residual splits into characters:\n";
                    for (c, m) in parts {
                        text += &format!("  T = {}: {m}\n", c.t().get(0, 0));
                    }
                    json!(parts
                        .iter()
                        .map(|(c, m)| json!({"rep": c, "multiplicity": m}))
                        .collect::<Vec<_>>())
                }
                Residual::Unsplit { rep, irreducible } => {
                    text += &format!(
                        "residual of dimension {} (irreducible: {irreducible})\n",
                        rep.dim()
                    );
                    json!({"rep": rep, "irreducible": irreducible})
                }
            };
            let json =
                json!({"type": ty, "multiplicities": d.multiplicities, "residual": residual});
            ok(Output {
                format: fmt,
                text,
                json,
            })
        }
        Cmd::Hyperprod {
            left,
            right,
            targets,
            prec,
        } => {
            let mut f = load_form(left, &reg)?;
            let mut g = load_form(right, &reg)?;
            if let Some(p) = prec {
                let p = rat_int(*p as i64);
                f = f.truncate(&p);
                g = g.truncate(&p);
            }
            let targets = match targets {
                Some(p) => RepRegistry::from_json(&read(p)?)?,
                None => reg.clone(),
            };
            ok(Output::span(fmt, &hyper_tensor(&f, &g, &targets)?))
        }
        Cmd::Ahol(AholCmd::Raise { form }) => {
            ok(Output::form(fmt, &raise_op(&load_form(form, &reg)?)))
        }
        Cmd::Ahol(AholCmd::Lower { form }) => {
            ok(Output::form(fmt, &lower_op(&load_form(form, &reg)?)))
        }
        Cmd::Ahol(AholCmd::Decompose { form }) => {
            let parts = ahol_decompose(&load_form(form, &reg)?)?;
            let text = parts
                .iter()
                .enumerate()
                .map(|(t, h)| format!("h_{t}: {h}"))
                .collect();
            let json =
                json!({"parts": parts.iter().map(AholForm::to_json_value).collect::<Vec<_>>()});
            ok(Output {
                format: fmt,
                text,
                json,
            })
        }
        Cmd::Ahol(AholCmd::Closure {
            span,
            window,
            max_rounds,
        }) => {
            let (lo, hi) = window
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::Parse(format!("window must be kmin:kmax, got {window}")))?;
            let s = FormSpan::from_json(&read(span)?, &reg)?;
            let c = tinf_closure(&s, (lo, hi), *max_rounds)?;
            let mut out = Output::span(fmt, &c.span);
            out.text = format!(
                "rounds: {}, stabilized: {}\n{}",
                c.rounds, c.stabilized, out.text
            );
            out.json["rounds"] = json!(c.rounds);
            out.json["stabilized"] = json!(c.stabilized);
            ok(out)
        }
        Cmd::Verify(v) => {
            let report = match v {
                VerifyCmd::Example32 { prec } => verify_example32(*prec)?,
                VerifyCmd::Counts => verify_counts()?,
                VerifyCmd::Thm11(a) => thm11(a)?,
                VerifyCmd::All { prec } => Report::merge(
                    "all",
                    vec![
                        verify_example32(3)?,
                        verify_counts()?,
                        thm11(&Thm11Args {
                            k: 12,
                            l: 4,
                            l2: 8,
                            indices: vec![1, 2],
                            prec: *prec,
                        })?,
                    ],
                ),
            };
            let outcome = if report.passed() {
                Outcome::Ok
            } else {
                Outcome::ExpectationFailed
            };
            Ok((Output::report(fmt, &report), outcome))
        }
    }
}

fn thm11(a: &Thm11Args) -> vvmf::Result<Report> {
    let sturm = vvmf::hyperalg::sturm_bound(a.k, 1);
    verify_thm11(a.k, a.l, a.l2, &a.indices, a.prec.unwrap_or(sturm.max(6)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, outcome)) => {
            let text = out.render();
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            match outcome {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::ExpectationFailed => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
