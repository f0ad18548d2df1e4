use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use sdtune::campaign::report::{load_campaign, REPORT_DIR};
use sdtune::campaign::{
    analyze, analyze_campaign, run_campaign, write_report, AnalysisReport, CampaignConfig, CampaignError,
    StrategyResults, EXIT_EVALUATOR, EXIT_OK,
};
use sdtune::evaluation::conformance::protocol_check;
use sdtune::evaluation::stub;
use sdtune::evaluation::{BridgeClient, Endpoint, SyntheticLandscape};

#[derive(Parser)]
#[command(
    name = "sdtune",
    version,
    about = "Multi-objective tuning of text-to-image configurations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) a campaign described by a JSON config file.
    Run {
        config: PathBuf,
        /// Write the analysis tables once all runs are complete.
        #[arg(long)]
        analyze: bool,
    },
    /// Compute statistics for a campaign and write them to <dir>/reports.
    Analyze { campaign_dir: PathBuf },
    /// Compare strategies across several campaign directories.
    Compare {
        #[arg(required = true, num_args = 1..)]
        dirs: Vec<PathBuf>,
        /// Directory for the comparison tables; summary only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a bridge endpoint speaks the evaluation protocol.
    ProtocolCheck {
        /// tcp://host:port or cmd:<program> [args...]
        endpoint: String,
        #[arg(long, default_value_t = 30.0)]
        timeout_s: f64,
    },
    /// Print a campaign's analysis, computing it first if needed.
    Report {
        campaign_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Serve the protocol from the synthetic landscape over stdio or TCP.
    StubBridge {
        /// Address to listen on; stdin/stdout when omitted.
        #[arg(long)]
        listen: Option<String>,
        /// JSON file with landscape parameters.
        #[arg(long)]
        landscape: Option<PathBuf>,
    },
}

fn eprint_line(msg: &str) {
    let _ = writeln!(io::stderr(), "{msg}");
}

fn run(config: &Path, with_analysis: bool) -> Result<(), CampaignError> {
    let cfg = CampaignConfig::load(config)?;
    let summary = run_campaign(&cfg, &eprint_line)?;
    println!(
        "{} runs complete ({} executed, {} resumed){}",
        summary.total,
        summary.executed,
        summary.resumed,
        if summary.generalisation {
            ", generalisation done"
        } else {
            ""
        }
    );
    if with_analysis {
        analyze_dir(&cfg.output_dir)?;
    }
    Ok(())
}

fn analyze_dir(dir: &Path) -> Result<AnalysisReport, CampaignError> {
    let report = analyze_campaign(dir)?;
    for m in &report.missing {
        eprint_line(&format!("missing run: {} rep {} ({})", m.strategy, m.rep, m.path));
    }
    let files = write_report(&report, &dir.join(REPORT_DIR))?;
    for f in files {
        eprint_line(&format!("wrote {}", f.display()));
    }
    Ok(report)
}

fn compare(dirs: &[PathBuf], out: Option<&Path>) -> Result<(), CampaignError> {
    let mut all: Vec<StrategyResults> = Vec::new();
    let mut missing = Vec::new();
    let mut options = None;
    for dir in dirs {
        let (cfg, results, miss) = load_campaign(dir)?;
        let tag = dir
            .file_name()
            .map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned());
        options.get_or_insert(cfg.analysis);
        for s in results {
            let label = format!("{tag}:{}", s.label);
            if all.iter().any(|x| x.label == label) {
                return Err(CampaignError::Config(format!(
                    "duplicate label {label}; campaign directories need distinct names"
                )));
            }
            all.push(StrategyResults { label, runs: s.runs });
        }
        missing.extend(miss.into_iter().map(|mut m| {
            m.strategy = format!("{tag}:{}", m.strategy);
            m
        }));
    }
    let options = options.expect("at least one directory");
    let reference = all.first().map(|s| s.label.clone());
    let report = analyze(&all, reference.as_deref(), &options, missing, None)?;
    if let Some(out) = out {
        for f in write_report(&report, out)? {
            eprint_line(&format!("wrote {}", f.display()));
        }
    }
    print!("{}", report.summary_text());
    Ok(())
}

fn report(dir: &Path, json: bool) -> Result<(), CampaignError> {
    let path = dir.join(REPORT_DIR).join("report.json");
    let report = match std::fs::read_to_string(&path) {
        Ok(text) => {
            AnalysisReport::from_json(&text).map_err(|e| CampaignError::Config(format!("{}: {e}", path.display())))?
        }
        Err(_) => analyze_dir(dir)?,
    };
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.summary_text());
    }
    Ok(())
}

fn protocol(endpoint: &str, timeout_s: f64) -> ExitCode {
    let endpoint: Endpoint = match endpoint.parse() {
        Ok(e) => e,
        Err(e) => {
            eprint_line(&format!("error: {e}"));
            return ExitCode::from(2);
        }
    };
    let mut client = match BridgeClient::connect(&endpoint, Some(Duration::from_secs_f64(timeout_s))) {
        Ok(c) => c,
        Err(e) => {
            eprint_line(&format!("error: {e}"));
            return ExitCode::from(EXIT_EVALUATOR as u8);
        }
    };
    match protocol_check(&mut client) {
        Ok(report) => {
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if report.passed() {
                ExitCode::from(EXIT_OK as u8)
            } else {
                ExitCode::from(EXIT_EVALUATOR as u8)
            }
        }
        Err(e) => {
            eprint_line(&format!("error: {e}"));
            ExitCode::from(EXIT_EVALUATOR as u8)
        }
    }
}

fn stub_bridge(listen: Option<&str>, landscape: Option<&Path>) -> Result<(), CampaignError> {
    let landscape = match landscape {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CampaignError::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            SyntheticLandscape::from_json(&text)
                .map_err(|e| CampaignError::Config(format!("{}: {e}", path.display())))?
        }
        None => SyntheticLandscape::default(),
    };
    let io_err = |e: io::Error| CampaignError::Io {
        path: PathBuf::from(listen.unwrap_or("stdio")),
        source: e,
    };
    match listen {
        Some(addr) => {
            let listener = TcpListener::bind(addr).map_err(io_err)?;
            eprint_line(&format!(
                "listening on tcp://{}",
                listener.local_addr().map_err(io_err)?
            ));
            stub::serve_tcp(listener, &landscape).map_err(io_err)
        }
        None => stub::serve(io::stdin().lock(), io::stdout().lock(), &landscape).map_err(io_err),
    }
}

fn finish(result: Result<(), CampaignError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint_line(&format!("error: {e}"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, analyze } => finish(run(&config, analyze)),
        Command::Analyze { campaign_dir } => finish(analyze_dir(&campaign_dir).map(|r| print!("{}", r.summary_text()))),
        Command::Compare { dirs, out } => finish(compare(&dirs, out.as_deref())),
        Command::ProtocolCheck { endpoint, timeout_s } => protocol(&endpoint, timeout_s),
        Command::Report { campaign_dir, json } => finish(report(&campaign_dir, json)),
        Command::StubBridge { listen, landscape } => finish(stub_bridge(listen.as_deref(), landscape.as_deref())),
    }
}
