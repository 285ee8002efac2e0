mod args;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use extk_core::combinatorics::LevelFunction;
use extk_core::extendibility::{
    comparison_table, estimate_mean_width, run_threshold_sweep, run_witness_experiment, MeanWidthMode,
};
use extk_core::moments::{
    gamma_modified_moment_leading, gue_modified_moment, gue_word_moment, gue_word_normalized_limit,
    second_moment_poly, wishart_modified_moment, Balance, MomentCaps,
};
use extk_core::rmt::{run_spectrum_experiment, ModifiedEnsemble};
use extk_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, CombCommand, Command, Format, MomentEnsemble, MomentsArgs, SpectrumEnsemble, WidthMode};

const SCHEMA: u32 = 1;

/// What a subcommand hands back: the JSON report, an optional CSV rendering
/// and whether a verification failed.
struct Output {
    report: Value,
    csv: Option<String>,
    verification_failed: bool,
}

impl Output {
    fn json(report: impl Serialize) -> Result<Self, Error> {
        Ok(Self {
            report: to_value(report)?,
            csv: None,
            verification_failed: false,
        })
    }

    fn with_csv(report: impl Serialize, csv: String) -> Result<Self, Error> {
        Ok(Self {
            csv: Some(csv),
            ..Self::json(report)?
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value, Error> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

fn moment_caps(a: &MomentsArgs) -> MomentCaps {
    let mut caps = MomentCaps::default();
    if let Some(p) = a.cap_p {
        caps.gue_plain_p = p;
        caps.wishart_plain_p = p;
        caps.gue_modified_p = p;
        caps.wishart_modified_p = p;
        caps.second_moment_p = p;
        caps.word_length = p;
    }
    if let Some(k) = a.cap_k {
        caps.gue_modified_k = k;
        caps.wishart_modified_k = k;
        caps.second_moment_k = k;
    }
    caps
}

fn cmd_moments(a: &MomentsArgs) -> Result<Output, Error> {
    let caps = moment_caps(a);
    match a.ensemble {
        MomentEnsemble::Gue => {
            let balance = if a.unbalanced { Balance::Unbalanced } else { Balance::Balanced };
            Output::json(gue_modified_moment(a.p, a.k, balance, &caps)?)
        }
        MomentEnsemble::Wishart => Output::json(wishart_modified_moment(a.p, a.k, &caps)?),
        MomentEnsemble::SecondMoment => Output::json(second_moment_poly(a.p, a.k, &caps)?),
        MomentEnsemble::GuePtLeading => Output::json(json!({
            "variable": "d",
            "leading_terms": gamma_modified_moment_leading(a.p, a.k)?,
        })),
        MomentEnsemble::Word => {
            let Some(word) = &a.word else {
                return Err(Error::Validation("--word is required for the word ensemble".into()));
            };
            let f = LevelFunction::new(word.clone(), a.k)?;
            if a.normalized_limit {
                Output::json(json!({ "normalized_limit": gue_word_normalized_limit(&f, &caps)?.to_string() }))
            } else {
                Output::json(gue_word_moment(&f, &caps)?)
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(Value, Output), Error> {
    let (name, config, out) = match &cli.command {
        Command::Moments(a) => ("moments", to_value(a)?, cmd_moments(a)?),
        Command::Spectrum(a) => {
            let ensemble = match a.ensemble {
                SpectrumEnsemble::GueMod => ModifiedEnsemble::GueMod,
                SpectrumEnsemble::WishartMod => ModifiedEnsemble::WishartMod,
                SpectrumEnsemble::GueModPt => ModifiedEnsemble::GueModPt,
            };
            let r = run_spectrum_experiment(ensemble, a.d, a.k, a.c, a.reps, a.bins, a.seed.seed)?;
            let csv = format!(
                "# extk spectrum ensemble={} d={} k={} c={} reps={} seed={} scale={}\n{}",
                ensemble.name(),
                a.d,
                a.k,
                a.c,
                a.reps,
                a.seed.seed,
                r.scale,
                r.histogram.to_csv()
            );
            ("spectrum", to_value(a)?, Output::with_csv(&r, csv)?)
        }
        Command::Witness(a) => {
            let r = run_witness_experiment(a.d, a.k, a.c, a.reps, a.seed.seed)?;
            ("witness", to_value(a)?, Output::with_csv(&r, r.to_csv())?)
        }
        Command::Threshold(a) => {
            let r = run_threshold_sweep(a.d, a.k, &a.c_grid, a.reps, a.seed.seed)?;
            ("threshold", to_value(a)?, Output::with_csv(&r, r.to_csv())?)
        }
        Command::Meanwidth(a) => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| Error::Validation(format!("--{flag} is required for this mode")))
            };
            let mode = match a.mode {
                WidthMode::Plain => MeanWidthMode::Plain { d: need(a.d, "d")? },
                WidthMode::PptExtension => MeanWidthMode::PptExtension { d: need(a.d, "d")? },
                WidthMode::Unbalanced => MeanWidthMode::Unbalanced {
                    da: need(a.da, "da")?,
                    db: need(a.db, "db")?,
                },
            };
            let r = estimate_mean_width(mode, a.k, a.reps, a.seed.seed)?;
            ("meanwidth", to_value(a)?, Output::with_csv(&r, r.to_csv())?)
        }
        Command::Comb {
            command: CombCommand::Verify(a),
        } => {
            let r = verify::run(a.max_p, a.max_k)?;
            let failed = !r.passed;
            let mut out = Output::json(r)?;
            out.verification_failed = failed;
            ("comb verify", to_value(a)?, out)
        }
        Command::Table => ("table", json!({}), Output::json(comparison_table()?)?),
    };
    let seed = config.get("seed").cloned().unwrap_or(Value::Null);
    let envelope = json!({
        "schema": SCHEMA,
        "tool": "extk",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "config": config,
        "seed": seed,
        "report": out.report,
    });
    Ok((envelope, out))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) => 2,
        Error::Resource(_) => 3,
        Error::Verification(_) => 4,
        Error::Numerical(_) => 1,
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return report_error("usage", e.to_string().trim(), 2),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return report_error("validation", "--workers must be positive", 2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return report_error("resource", &e.to_string(), 3),
    };
    let (envelope, out) = match pool.install(|| run(&cli)) {
        Ok(r) => r,
        Err(e) => return report_error(e.kind(), &e.to_string(), exit_code(&e)),
    };
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&envelope).expect("JSON values serialize")),
        Format::Csv => match &out.csv {
            Some(csv) => csv.clone(),
            None => return report_error("validation", "CSV output is only available for experiment reports", 2),
        },
    };
    if let Err(e) = emit(&cli, &text) {
        return report_error("io", &e.to_string(), 1);
    }
    if out.verification_failed {
        return report_error("verification", "verification found counterexamples; see the report", 4);
    }
    ExitCode::SUCCESS
}
