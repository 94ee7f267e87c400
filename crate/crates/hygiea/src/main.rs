use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hygiea::chaindir::{self, ChainDirError};
use hygiea::export;
use hygiea::records::parse_records;
use hygiea::scenario::{self, GroupName, GroupSpec, Scenario};
use hygiea_core::analytics::{
    case_series, disparity_check, regional_comparison, sensitivity_rerun, sir_fit, sir_forecast, symptom_distribution,
    Day, GroupField, Metric, Observation, RecordStore, RegionCode, SensitivityConfig, SirFitConfig, SirParams,
    SprtConfig, TestResult,
};
use hygiea_core::contracts::{effective_status, ContractState, EffectiveStatus};
use hygiea_core::crypto::keygen;
use hygiea_core::ledger::GenesisConfig;
use hygiea_core::primitives::{Address, Timestamp};
use hygiea_core::protocols::{export_revocation_snapshot, Mode, RevocationSnapshot};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Parser)]
#[command(name = "hygiea", version, about = "Health certificate ledger and pandemic analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long, value_enum, default_value = "fast")]
        group: GroupArg,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a genesis file for a single validator.
    Genesis {
        #[arg(long)]
        chain_name: String,
        #[arg(long, value_enum, default_value = "fast")]
        group: GroupArg,
        /// Validator public key (hex).
        #[arg(long)]
        validator: String,
        #[arg(long, default_value_t = 0)]
        genesis_time: Timestamp,
        #[arg(long)]
        out: PathBuf,
    },
    /// Create a chain directory from a genesis file.
    Init {
        #[arg(long)]
        genesis: PathBuf,
        #[arg(long)]
        chain_dir: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Execute a scenario script.
    RunScenario {
        script: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        chain_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Replay and check a chain directory.
    VerifyChain {
        #[arg(long)]
        chain_dir: PathBuf,
    },
    /// Write the revocation list for offline verifiers.
    ExportSnapshot {
        #[arg(long)]
        chain_dir: PathBuf,
        #[arg(long)]
        now: Timestamp,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read-only contract query.
    Query {
        #[arg(long)]
        chain_dir: PathBuf,
        address: String,
        selector: String,
    },
    /// Effective status of a certificate at a given time.
    Status {
        #[arg(long)]
        chain_dir: PathBuf,
        certificate: String,
        #[arg(long)]
        now: Timestamp,
        #[arg(long, value_enum, default_value = "online")]
        mode: ModeArg,
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Analytics over a JSON-lines record file.
    Analytics {
        #[command(subcommand)]
        command: AnalyticsCommand,
    },
}

#[derive(Subcommand)]
enum AnalyticsCommand {
    Distribution {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, value_enum)]
        result: Option<ResultArg>,
        #[arg(long)]
        group: Option<String>,
    },
    Regions {
        #[command(flatten)]
        input: Input,
        /// JSON object mapping region code to population.
        #[arg(long)]
        population: Option<PathBuf>,
    },
    Fit {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        population: f64,
        #[arg(long, default_value_t = 1.0)]
        initial_infected: f64,
    },
    Forecast {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        population: f64,
        #[arg(long, default_value_t = 1.0)]
        initial_infected: f64,
        #[arg(long)]
        start: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Sprt {
        /// Text file of P/N (or Positive/Negative) tokens.
        #[arg(long, conflicts_with = "records", required_unless_present = "records")]
        stream: Option<PathBuf>,
        /// Use tested records in file order.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        p0: f64,
        #[arg(long, default_value_t = 0.3)]
        p1: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        beta_err: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Lof {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    Disparity {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "demographic-group")]
        field: FieldArg,
        #[arg(long, value_enum, default_value = "infection-rate")]
        metric: MetricArg,
        #[arg(long, default_value_t = 3.0)]
        threshold: f64,
    },
    Sensitivity {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1.5)]
        cutoff: f64,
        #[arg(long, default_value_t = 10_000.0)]
        population: f64,
        #[arg(long)]
        region: Option<String>,
    },
    /// Standard tables into a directory.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000.0)]
        population: f64,
        #[arg(long, default_value_t = 1.0)]
        initial_infected: f64,
    },
    /// Seeded synthetic records following an SIR curve.
    Synth {
        /// JSON synthesis config; defaults apply when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Test,
    Fast,
    Modp2048,
}

impl GroupArg {
    fn spec(self) -> GroupSpec {
        GroupSpec::Named(match self {
            GroupArg::Test => GroupName::Test,
            GroupArg::Fast => GroupName::Fast,
            GroupArg::Modp2048 => GroupName::Modp2048,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Online,
    Offline,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResultArg {
    Positive,
    Negative,
    Na,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    DemographicGroup,
    Region,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum MetricArg {
    InfectionRate,
    VaccinationRate,
    TestingRate,
}

/// Exit 1 for failed checks, exit 2 for bad input.
enum Failure {
    Check(String),
    Usage(String),
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => chaindir::write(p, text).map_err(usage),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(usage(e)),
                _ => Ok(()),
            }
        }
    }
}

fn load_store(path: &Path) -> Result<RecordStore, Failure> {
    let text = chaindir::read_text(path).map_err(usage)?;
    parse_records(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn region(code: Option<String>) -> Result<Option<RegionCode>, Failure> {
    code.map(|c| RegionCode::new(&c).map_err(usage)).transpose()
}

fn load_chain(dir: &Path) -> Result<hygiea_core::ledger::ChainState, Failure> {
    chaindir::load(dir).map_err(usage)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Keygen { group, seed } => {
            let seed = seed_or_entropy(seed);
            let kp = keygen(&group.spec().params(), &mut ChaCha20Rng::seed_from_u64(seed));
            let out = serde_json::json!({ "public": kp.public().to_hex(), "secret": kp.secret().expose_hex() });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(())
        }
        Command::Genesis { chain_name, group, validator, genesis_time, out } => {
            let pk = hygiea_core::crypto::PublicKey::from_hex(&validator).map_err(usage)?;
            let mut cfg = GenesisConfig::new(&chain_name, group.spec().params(), pk);
            cfg.genesis_time = genesis_time;
            let text = serde_json::to_string_pretty(&cfg).expect("json") + "\n";
            chaindir::write(&out, &text).map_err(usage)
        }
        Command::Init { genesis, chain_dir, force } => {
            let cfg = chaindir::read_genesis(&genesis).map_err(usage)?;
            let chain = hygiea_core::ledger::ChainState::genesis(cfg).map_err(usage)?;
            chaindir::save(&chain_dir, &chain, force).map_err(usage)?;
            println!("chain_id {}", chain.chain_id());
            println!("governance {}", chain.governance_address());
            println!("factory {}", chain.factory_address());
            Ok(())
        }
        Command::RunScenario { script, seed, chain_dir, out, force } => {
            let text = chaindir::read_text(&script).map_err(usage)?;
            let script: Scenario =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", script.display())))?;
            if let Some(dir) = &chain_dir {
                if chaindir::exists(dir) && !force {
                    return Err(usage(ChainDirError::Exists(dir.clone())));
                }
            }
            let seed = seed_or_entropy(seed);
            let result = scenario::run(&script, seed).map_err(usage)?;
            print!("{}", result.report_text());
            for (name, contents) in scenario::outputs(&result) {
                let target = match (name.strip_prefix("chain/"), &chain_dir, &out) {
                    (Some(file), Some(dir), _) => dir.join(file),
                    (_, _, Some(o)) => o.join(&name),
                    _ => continue,
                };
                chaindir::write(&target, &contents).map_err(usage)?;
            }
            match result.failure {
                Some(f) => Err(Failure::Check(f.to_string())),
                None => Ok(()),
            }
        }
        Command::VerifyChain { chain_dir } => {
            let chain = load_chain(&chain_dir)?;
            match chain.verify_chain() {
                Ok(()) => {
                    println!("ok: {} blocks, head {}", chain.blocks().len(), chain.head().hash());
                    Ok(())
                }
                Err(v) => Err(Failure::Check(format!("violation: {v}"))),
            }
        }
        Command::ExportSnapshot { chain_dir, now, out } => {
            let chain = load_chain(&chain_dir)?;
            let snap = export_revocation_snapshot(&chain, now);
            let text = serde_json::to_string_pretty(&snap).expect("json") + "\n";
            chaindir::write(&out, &text).map_err(usage)?;
            println!("{} revoked, as_of {}", snap.revoked.len(), snap.as_of);
            Ok(())
        }
        Command::Query { chain_dir, address, selector } => {
            let chain = load_chain(&chain_dir)?;
            let addr = Address::from_hex(&address).map_err(usage)?;
            let v = chain.query(&addr, &selector).map_err(usage)?;
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            Ok(())
        }
        Command::Status { chain_dir, certificate, now, mode, snapshot } => {
            let chain = load_chain(&chain_dir)?;
            let addr = Address::from_hex(&certificate).map_err(usage)?;
            let Some(ContractState::Certificate(c)) = chain.contract(&addr) else {
                return Err(Failure::Check(format!("no certificate at {addr}")));
            };
            let mut cert = c.certificate.clone();
            if let ModeArg::Offline = mode {
                let path = snapshot.ok_or_else(|| usage("offline mode needs --snapshot"))?;
                let text = chaindir::read_text(&path).map_err(usage)?;
                let snap: RevocationSnapshot = serde_json::from_str(&text).map_err(usage)?;
                cert.status_flag = if snap.revoked.contains(&addr) {
                    hygiea_core::contracts::CertStatus::Revoked
                } else {
                    hygiea_core::contracts::CertStatus::Issued
                };
            }
            let status = effective_status(&cert, now, chain.governance(), chain.params());
            let mode = match mode {
                ModeArg::Online => Mode::Online,
                ModeArg::Offline => Mode::Offline,
            };
            println!("{status:?} ({mode:?})");
            if status == EffectiveStatus::Valid {
                Ok(())
            } else {
                Err(Failure::Check(format!("{status:?}")))
            }
        }
        Command::Analytics { command } => analytics(command),
    }
}

fn analytics(cmd: AnalyticsCommand) -> CmdResult {
    match cmd {
        AnalyticsCommand::Distribution { input, region: r, result, group } => {
            let store = load_store(&input.records)?;
            let result = result.map(|r| match r {
                ResultArg::Positive => TestResult::Positive,
                ResultArg::Negative => TestResult::Negative,
                ResultArg::Na => TestResult::NA,
            });
            let filter = export::filter(region(r)?, result, group);
            emit(input.out.as_deref(), &export::distribution_csv(&symptom_distribution(&store, filter.as_ref())))
        }
        AnalyticsCommand::Regions { input, population } => {
            let store = load_store(&input.records)?;
            let pop: Option<BTreeMap<RegionCode, u64>> = match population {
                Some(p) => Some(serde_json::from_str(&chaindir::read_text(&p).map_err(usage)?).map_err(usage)?),
                None => None,
            };
            emit(input.out.as_deref(), &export::regions_csv(&regional_comparison(&store, pop.as_ref())))
        }
        AnalyticsCommand::Fit { input, region: r, population, initial_infected } => {
            let store = load_store(&input.records)?;
            let series = case_series(&store, region(r)?.as_ref());
            let cfg = SirFitConfig { initial_infected, ..SirFitConfig::default() };
            let fit = sir_fit(&series, population, &cfg).map_err(usage)?;
            emit(input.out.as_deref(), &export::fit_json(&series, &fit))
        }
        AnalyticsCommand::Forecast { beta, gamma, population, initial_infected, start, horizon, out } => {
            let params = SirParams::new(beta, gamma, population, initial_infected).map_err(usage)?;
            let start = Day::parse(&start).map_err(usage)?;
            let series = sir_forecast(&params, start, horizon).map_err(usage)?;
            emit(out.as_deref(), &export::series_csv(&series))
        }
        AnalyticsCommand::Sprt { stream, records, p0, p1, alpha, beta_err, out } => {
            let observations: Vec<Observation> = match (stream, records) {
                (Some(path), _) => {
                    let text = chaindir::read_text(&path).map_err(usage)?;
                    text.split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|t| !t.is_empty())
                        .map(|t| match t {
                            "P" | "Positive" | "1" => Ok(Observation::Positive),
                            "N" | "Negative" | "0" => Ok(Observation::Negative),
                            other => Err(usage(format!("bad observation `{other}`"))),
                        })
                        .collect::<Result<_, _>>()?
                }
                (None, Some(path)) => load_store(&path)?
                    .records()
                    .iter()
                    .filter_map(|r| match r.test_result {
                        TestResult::Positive => Some(Observation::Positive),
                        TestResult::Negative => Some(Observation::Negative),
                        TestResult::NA => None,
                    })
                    .collect(),
                (None, None) => return Err(usage("need --stream or --records")),
            };
            // stop feeding once decided
            let cfg = SprtConfig { p0, p1, alpha, beta_err };
            let mut state = hygiea_core::analytics::SprtState::new(cfg).map_err(usage)?;
            for obs in observations {
                if state.decision != hygiea_core::analytics::Decision::Continue {
                    break;
                }
                state.update(obs).map_err(usage)?;
            }
            eprintln!("decision: {:?}", state.decision);
            emit(out.as_deref(), &export::sprt_json(&state))
        }
        AnalyticsCommand::Lof { input, k } => {
            let store = load_store(&input.records)?;
            let scores = export::record_lof(&store, k).map_err(usage)?;
            emit(input.out.as_deref(), &export::lof_csv(&scores))
        }
        AnalyticsCommand::Disparity { input, field, metric, threshold } => {
            let store = load_store(&input.records)?;
            let field = match field {
                FieldArg::DemographicGroup => GroupField::DemographicGroup,
                FieldArg::Region => GroupField::Region,
            };
            let metric = match metric {
                MetricArg::InfectionRate => Metric::InfectionRate,
                MetricArg::VaccinationRate => Metric::VaccinationRate,
                MetricArg::TestingRate => Metric::TestingRate,
            };
            let report = disparity_check(&store, field, metric, threshold).map_err(usage)?;
            emit(input.out.as_deref(), &export::disparity_json(&report))
        }
        AnalyticsCommand::Sensitivity { input, k, cutoff, population, region: r } => {
            let store = load_store(&input.records)?;
            let cfg = SensitivityConfig { k, cutoff, population, region: region(r)?, fit: SirFitConfig::default() };
            let report = sensitivity_rerun(&store, &cfg).map_err(usage)?;
            emit(input.out.as_deref(), &export::json(&report))
        }
        AnalyticsCommand::Report { records, out, population, initial_infected } => {
            let store = load_store(&records)?;
            for (name, text) in export::report_files(&store, None, population, initial_infected) {
                chaindir::write(&out.join(name), &text).map_err(usage)?;
            }
            Ok(())
        }
        AnalyticsCommand::Synth { config, seed, out } => {
            let cfg: export::SynthConfig = match config {
                Some(p) => serde_json::from_str(&chaindir::read_text(&p).map_err(usage)?).map_err(usage)?,
                None => export::SynthConfig::default(),
            };
            let seed = seed_or_entropy(seed);
            let store = export::synth_records(&cfg, &mut ChaCha20Rng::seed_from_u64(seed)).map_err(usage)?;
            chaindir::write(&out, &hygiea::records::export_records(&store)).map_err(usage)?;
            eprintln!("{} records", store.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
