//! Scripted end-to-end runs: parties, timed protocol actions and assertions.

use std::collections::BTreeMap;

use hygiea_core::analytics::HealthRecord;
use hygiea_core::contracts::{
    effective_status, CertType, ContractState, EffectiveStatus, IssuerAttributes, LoggingClass, PartyStatus, Role,
    ValidityPolicy, VerifierAttributes,
};
use hygiea_core::crypto::{keygen, BindingMechanism, CivilIdentity, GroupParams, KeyPair};
use hygiea_core::ledger::GenesisConfig;
use hygiea_core::primitives::{Address, Timestamp, DAY};
use hygiea_core::protocols::{
    export_revocation_snapshot, run_issuance, run_registration, run_verification, Application, Faults, IssuanceRequest,
    KeySubstitution, Mode, Network, Outcome, Party, PartyRole, ProtocolError, Reason, RevocationSnapshot,
    VerificationRequest, VerificationVerdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupName {
    Test,
    #[default]
    Fast,
    Modp2048,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(GroupName),
    Explicit(GroupParams),
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec::Named(GroupName::Fast)
    }
}

impl GroupSpec {
    pub fn params(&self) -> GroupParams {
        match self {
            GroupSpec::Named(GroupName::Test) => GroupParams::test(),
            GroupSpec::Named(GroupName::Fast) => GroupParams::fast(),
            GroupSpec::Named(GroupName::Modp2048) => GroupParams::modp2048(),
            GroupSpec::Explicit(p) => p.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartySpec {
    pub id: String,
    pub role: PartyRole,
    #[serde(default)]
    pub key_seed: Option<u64>,
    #[serde(default)]
    pub identity: Option<CivilIdentity>,
}

fn yes() -> bool {
    true
}

fn hashed() -> BindingMechanism {
    BindingMechanism::HashedInfo
}

fn state_updating() -> LoggingClass {
    LoggingClass::StateUpdating
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum Action {
    AdvanceTime {
        #[serde(default)]
        seconds: u64,
        #[serde(default)]
        days: u64,
    },
    Register {
        party: String,
        country: String,
        name: String,
        registry_id: String,
        #[serde(default)]
        allowed_types: Vec<CertType>,
        #[serde(default = "state_updating")]
        logging_class: LoggingClass,
        #[serde(default)]
        valid_from: Option<Timestamp>,
        /// Answer identification with this party's secret instead.
        #[serde(default)]
        prove_with: Option<String>,
        #[serde(default)]
        expect_error: Option<String>,
    },
    Issue {
        issuer: String,
        holder: String,
        cert_type: CertType,
        #[serde(default = "hashed")]
        mechanism: BindingMechanism,
        #[serde(default = "yes")]
        document_check: bool,
        #[serde(default)]
        consent: bool,
        #[serde(default)]
        clinical: Option<HealthRecord>,
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        prove_with: Option<String>,
        #[serde(default)]
        expect_error: Option<String>,
    },
    Verify {
        verifier: String,
        holder: String,
        certificate: String,
        #[serde(default = "online")]
        mode: Mode,
        #[serde(default)]
        snapshot: Option<String>,
        #[serde(default = "yes")]
        document_check: bool,
        #[serde(default)]
        prove_with: Option<String>,
        #[serde(default)]
        expect: Option<Outcome>,
        #[serde(default)]
        expect_reason: Option<Reason>,
    },
    Revoke {
        certificate: String,
        #[serde(default)]
        expect_error: Option<String>,
    },
    SetStatus {
        party: String,
        status: PartyStatus,
        #[serde(default)]
        expect_error: Option<String>,
    },
    ExportSnapshot {
        label: String,
    },
    Seal,
    Ingest {
        records: Vec<HealthRecord>,
    },
    /// Ingest seeded synthetic records drawn from the scenario rng.
    Synth {
        #[serde(default)]
        config: Option<crate::export::SynthConfig>,
    },
    SetFaults {
        faults: Faults,
    },
    AssertStatus {
        certificate: String,
        status: EffectiveStatus,
    },
    AssertChainValid,
}

fn online() -> Mode {
    Mode::Online
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub chain_name: String,
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default)]
    pub genesis_time: Timestamp,
    #[serde(default)]
    pub policy: ValidityPolicy,
    #[serde(default)]
    pub max_snapshot_age: Option<u64>,
    #[serde(default)]
    pub analytics: AnalyticsSpec,
    pub parties: Vec<PartySpec>,
    pub actions: Vec<Action>,
}

/// Settings for the analytics tables written after a run.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticsSpec {
    pub population: f64,
    pub initial_infected: f64,
}

impl Default for AnalyticsSpec {
    fn default() -> Self {
        AnalyticsSpec { population: 10_000.0, initial_infected: 1.0 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("action {index}: assertion failed: {message}")]
    Assertion { index: usize, message: String },
}

pub struct ScenarioRun {
    pub network: Network,
    pub analytics: AnalyticsSpec,
    /// One line per executed action.
    pub report: Vec<String>,
    pub verdicts: Vec<VerificationVerdict>,
    /// First failed assertion, at which the run stopped.
    pub failure: Option<ScenarioError>,
}

impl ScenarioRun {
    pub fn report_text(&self) -> String {
        let mut s = self.report.join("\n");
        s.push('\n');
        s
    }

    pub fn verdicts_jsonl(&self) -> String {
        self.verdicts.iter().map(|v| serde_json::to_string(v).expect("verdict serializes") + "\n").collect()
    }
}

/// Short code for a protocol error, as written in `expect_error`.
pub fn error_code(e: &ProtocolError) -> String {
    match e {
        ProtocolError::Transport(_) => "transport".into(),
        ProtocolError::IdentificationFailed => "identification_failed".into(),
        ProtocolError::DocumentCheckFailed => "document_check_failed".into(),
        ProtocolError::Binding(_) => "binding".into(),
        ProtocolError::Ledger(_) => "ledger".into(),
        ProtocolError::NotValidator => "not_validator".into(),
        ProtocolError::Reverted(r) => {
            let name = serde_json::to_value(r).expect("revert serializes");
            format!("reverted:{}", name.as_str().unwrap_or_default())
        }
    }
}

struct Runner {
    net: Network,
    rng: ChaCha20Rng,
    parties: BTreeMap<String, Party>,
    certs: BTreeMap<String, Address>,
    snapshots: BTreeMap<String, RevocationSnapshot>,
    now: Timestamp,
    report: Vec<String>,
    verdicts: Vec<VerificationVerdict>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Config(msg.into()))
}

/// Builds the network from the party list and runs every action in order.
/// Configuration problems are errors; a failed assertion stops the run and
/// is returned in [`ScenarioRun::failure`].
pub fn run(script: &Scenario, seed: u64) -> Result<ScenarioRun, ScenarioError> {
    let params = script.group.params();
    let mut key_rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let mut parties = BTreeMap::new();
    let mut gb_key: Option<KeyPair> = None;
    for spec in &script.parties {
        let keys = match spec.key_seed {
            Some(s) => keygen(&params, &mut ChaCha20Rng::seed_from_u64(s)),
            None => keygen(&params, &mut key_rng),
        };
        if spec.role == PartyRole::GoverningBody {
            if gb_key.is_some() {
                return config_err("more than one GoverningBody party");
            }
            gb_key = Some(keys.clone());
        }
        let mut p = Party::new(&spec.id, spec.role, keys);
        p.identity = spec.identity.clone();
        if parties.insert(spec.id.clone(), p).is_some() {
            return config_err(format!("duplicate party id `{}`", spec.id));
        }
    }
    let Some(gb) = gb_key else {
        return config_err("no GoverningBody party");
    };
    let config = GenesisConfig {
        chain_name: script.chain_name.clone(),
        group: params,
        validators: vec![gb.public().clone()],
        genesis_time: script.genesis_time,
        policy: script.policy,
    };
    let mut net = Network::new(config, gb).map_err(|e| ScenarioError::Config(e.to_string()))?;
    if let Some(age) = script.max_snapshot_age {
        net.max_snapshot_age = age;
    }
    let mut r = Runner {
        net,
        rng,
        parties,
        certs: BTreeMap::new(),
        snapshots: BTreeMap::new(),
        now: script.genesis_time,
        report: Vec::new(),
        verdicts: Vec::new(),
    };
    let mut failure = None;
    for (index, action) in script.actions.iter().enumerate() {
        match r.step(action) {
            Ok(line) => r.report.push(format!("[{index}] {line}")),
            Err(Step::Assertion(message)) => {
                r.report.push(format!("[{index}] FAILED: {message}"));
                failure = Some(ScenarioError::Assertion { index, message });
                break;
            }
            Err(Step::Config(message)) => return config_err(format!("action {index}: {message}")),
        }
    }
    Ok(ScenarioRun { network: r.net, analytics: script.analytics, report: r.report, verdicts: r.verdicts, failure })
}

enum Step {
    Assertion(String),
    Config(String),
}

fn expect_result<T>(
    what: String,
    result: Result<T, ProtocolError>,
    expect_error: &Option<String>,
) -> Result<(String, Option<T>), Step> {
    match (result, expect_error) {
        (Ok(v), None) => Ok((format!("{what} -> ok"), Some(v))),
        (Ok(_), Some(code)) => Err(Step::Assertion(format!("{what}: expected error {code}, got success"))),
        (Err(e), None) => Err(Step::Assertion(format!("{what}: {e}"))),
        (Err(e), Some(code)) if &error_code(&e) == code => Ok((format!("{what} -> {code} (expected)"), None)),
        (Err(e), Some(code)) => Err(Step::Assertion(format!("{what}: expected {code}, got {}", error_code(&e)))),
    }
}

impl Runner {
    fn take_party(&mut self, id: &str) -> Result<Party, Step> {
        self.parties.remove(id).ok_or_else(|| Step::Config(format!("unknown party `{id}`")))
    }

    fn party(&self, id: &str) -> Result<&Party, Step> {
        self.parties.get(id).ok_or_else(|| Step::Config(format!("unknown party `{id}`")))
    }

    fn cert(&self, label: &str) -> Result<Address, Step> {
        self.certs.get(label).copied().ok_or_else(|| Step::Config(format!("unknown certificate label `{label}`")))
    }

    fn secret_of(&self, id: &Option<String>) -> Result<Option<hygiea_core::crypto::SecretKey>, Step> {
        id.as_deref().map(|id| self.party(id).map(|p| p.keys.secret().clone())).transpose()
    }

    fn step(&mut self, action: &Action) -> Result<String, Step> {
        match action {
            Action::AdvanceTime { seconds, days } => {
                self.now += seconds + days * DAY;
                Ok(format!("advance_time -> t={}", self.now))
            }
            Action::Register {
                party,
                country,
                name,
                registry_id,
                allowed_types,
                logging_class,
                valid_from,
                prove_with,
                expect_error,
            } => {
                let substitute = self.secret_of(prove_with)?;
                let mut candidate = self.take_party(party)?;
                let valid_from = valid_from.unwrap_or(self.now);
                let application = match candidate.role {
                    PartyRole::Issuer => Application::Issuer(IssuerAttributes {
                        country: country.clone(),
                        name: name.clone(),
                        id: registry_id.clone(),
                        allowed_types: allowed_types.iter().copied().collect(),
                        valid_from,
                        status: PartyStatus::Active,
                        pk: candidate.pk().clone(),
                    }),
                    PartyRole::Verifier => Application::Verifier(VerifierAttributes {
                        country: country.clone(),
                        name: name.clone(),
                        id: registry_id.clone(),
                        valid_from,
                        status: PartyStatus::Active,
                        pk: candidate.pk().clone(),
                        logging_class: *logging_class,
                    }),
                    other => {
                        self.parties.insert(party.clone(), candidate);
                        return Err(Step::Config(format!("cannot register a {other:?}")));
                    }
                };
                let result = match substitute {
                    Some(sk) => {
                        let mut adv = KeySubstitution::new(&mut candidate, sk);
                        run_registration(&mut self.net, &mut adv, application, self.now, &mut self.rng)
                    }
                    None => run_registration(&mut self.net, &mut candidate, application, self.now, &mut self.rng),
                };
                self.parties.insert(party.clone(), candidate);
                expect_result(format!("register {party}"), result, expect_error).map(|(l, _)| l)
            }
            Action::Issue {
                issuer,
                holder,
                cert_type,
                mechanism,
                document_check,
                consent,
                clinical,
                label,
                prove_with,
                expect_error,
            } => {
                let substitute = self.secret_of(prove_with)?;
                let issuer_party = self.take_party(issuer)?;
                let mut holder_party = match self.take_party(holder) {
                    Ok(h) => h,
                    Err(e) => {
                        self.parties.insert(issuer.clone(), issuer_party);
                        return Err(e);
                    }
                };
                let request = IssuanceRequest {
                    cert_type: *cert_type,
                    mechanism: *mechanism,
                    document_check: *document_check,
                    clinical: clinical.clone(),
                    consent: *consent,
                };
                let result = match substitute {
                    Some(sk) => {
                        let mut adv = KeySubstitution::new(&mut holder_party, sk);
                        run_issuance(&mut self.net, &issuer_party, &mut adv, request, self.now, &mut self.rng)
                    }
                    None => {
                        run_issuance(&mut self.net, &issuer_party, &mut holder_party, request, self.now, &mut self.rng)
                    }
                };
                self.parties.insert(issuer.clone(), issuer_party);
                self.parties.insert(holder.clone(), holder_party);
                let what = format!("issue {cert_type} {issuer}->{holder}");
                let (line, addr) = expect_result(what, result, expect_error)?;
                if let (Some(addr), Some(label)) = (addr, label) {
                    self.certs.insert(label.clone(), addr);
                    return Ok(format!("{line} {label}={addr}"));
                }
                Ok(line)
            }
            Action::Verify {
                verifier,
                holder,
                certificate,
                mode,
                snapshot,
                document_check,
                prove_with,
                expect,
                expect_reason,
            } => {
                let substitute = self.secret_of(prove_with)?;
                let cert = self.cert(certificate)?;
                let snapshot = match snapshot {
                    Some(l) => Some(
                        self.snapshots
                            .get(l)
                            .cloned()
                            .ok_or_else(|| Step::Config(format!("unknown snapshot label `{l}`")))?,
                    ),
                    None => None,
                };
                let request =
                    VerificationRequest { certificate: cert, mode: *mode, snapshot, document_check: *document_check };
                let verifier_party = self.take_party(verifier)?;
                let mut holder_party = match self.take_party(holder) {
                    Ok(h) => h,
                    Err(e) => {
                        self.parties.insert(verifier.clone(), verifier_party);
                        return Err(e);
                    }
                };
                let verdict = match substitute {
                    Some(sk) => {
                        let mut adv = KeySubstitution::new(&mut holder_party, sk);
                        run_verification(&mut self.net, &verifier_party, &mut adv, &request, self.now, &mut self.rng)
                    }
                    None => run_verification(
                        &mut self.net,
                        &verifier_party,
                        &mut holder_party,
                        &request,
                        self.now,
                        &mut self.rng,
                    ),
                };
                self.parties.insert(verifier.clone(), verifier_party);
                self.parties.insert(holder.clone(), holder_party);
                let line = format!(
                    "verify {certificate} by {verifier} {:?} -> {:?}({})",
                    mode,
                    verdict.outcome,
                    serde_json::to_value(verdict.reason).expect("reason serializes").as_str().unwrap_or_default()
                );
                self.verdicts.push(verdict.clone());
                if expect.is_some_and(|o| o != verdict.outcome) || expect_reason.is_some_and(|r| r != verdict.reason) {
                    return Err(Step::Assertion(format!("{line}, expected {expect:?} {expect_reason:?}")));
                }
                Ok(line)
            }
            Action::Revoke { certificate, expect_error } => {
                let cert = self.cert(certificate)?;
                let result = self.net.revoke(cert, self.now, &mut self.rng);
                expect_result(format!("revoke {certificate}"), result, expect_error).map(|(l, _)| l)
            }
            Action::SetStatus { party, status, expect_error } => {
                let p = self.party(party)?;
                let role = match p.role {
                    PartyRole::Issuer => Role::Issuer,
                    PartyRole::Verifier => Role::Verifier,
                    other => return Err(Step::Config(format!("{other:?} has no registry status"))),
                };
                let pk = p.pk().clone();
                let result = self.net.set_status(role, &pk, *status, self.now, &mut self.rng);
                expect_result(format!("set_status {party} {status:?}"), result, expect_error).map(|(l, _)| l)
            }
            Action::ExportSnapshot { label } => {
                let s = export_revocation_snapshot(self.net.chain(), self.now);
                let line = format!("export_snapshot {label}: {} revoked, as_of={}", s.revoked.len(), s.as_of);
                self.snapshots.insert(label.clone(), s);
                Ok(line)
            }
            Action::Seal => {
                let b = self.net.seal(self.now, &mut self.rng).map_err(|e| Step::Assertion(e.to_string()))?;
                Ok(format!("seal -> height {} ({} txs)", b.height, b.transactions.len()))
            }
            Action::Ingest { records } => {
                let mut stored = 0;
                for rec in records {
                    let r = self.net.records_mut().ingest(rec.clone()).map_err(|e| Step::Config(e.to_string()))?;
                    stored += (r == hygiea_core::analytics::Ingest::Stored) as usize;
                }
                Ok(format!("ingest -> {stored}/{} stored", records.len()))
            }
            Action::Synth { config } => {
                let cfg = config.clone().unwrap_or_default();
                let synth =
                    crate::export::synth_records(&cfg, &mut self.rng).map_err(|e| Step::Config(e.to_string()))?;
                for rec in synth.records() {
                    self.net.records_mut().ingest(rec.clone()).map_err(|e| Step::Config(e.to_string()))?;
                }
                Ok(format!("synth -> {} records", synth.len()))
            }
            Action::SetFaults { faults } => {
                self.net.channel.faults = faults.clone();
                Ok("set_faults".into())
            }
            Action::AssertStatus { certificate, status } => {
                let addr = self.cert(certificate)?;
                let chain = self.net.chain();
                let got = match chain.contract(&addr) {
                    Some(ContractState::Certificate(c)) => {
                        effective_status(&c.certificate, self.now, chain.governance(), chain.params())
                    }
                    _ => return Err(Step::Config(format!("{certificate} is not a certificate"))),
                };
                if got != *status {
                    return Err(Step::Assertion(format!("status of {certificate} is {got:?}, expected {status:?}")));
                }
                Ok(format!("assert_status {certificate} {got:?}"))
            }
            Action::AssertChainValid => match self.net.chain().verify_chain() {
                Ok(()) => Ok(format!("assert_chain_valid height {}", self.net.chain().height())),
                Err(v) => Err(Step::Assertion(v.to_string())),
            },
        }
    }
}

/// Every file a run produces, as `(relative path, contents)`. Chain files
/// go under `chain/`, analytics tables under `analytics/`.
pub fn outputs(run: &ScenarioRun) -> Vec<(String, String)> {
    use crate::chaindir::{export_blocks, export_store, CHAIN_FILE, GENESIS_FILE, STORE_FILE};
    let chain = run.network.chain();
    let genesis = serde_json::to_string_pretty(chain.config()).expect("genesis serializes") + "\n";
    let mut files = vec![
        (format!("chain/{GENESIS_FILE}"), genesis),
        (format!("chain/{CHAIN_FILE}"), export_blocks(chain.blocks())),
        (format!("chain/{STORE_FILE}"), export_store(chain.store())),
        ("records.jsonl".to_string(), crate::records::export_records(run.network.records())),
        ("verdicts.jsonl".to_string(), run.verdicts_jsonl()),
        ("report.txt".to_string(), run.report_text()),
    ];
    for (name, text) in crate::export::report_files(
        run.network.records(),
        None,
        run.analytics.population,
        run.analytics.initial_infected,
    ) {
        files.push((format!("analytics/{name}"), text));
    }
    files
}
