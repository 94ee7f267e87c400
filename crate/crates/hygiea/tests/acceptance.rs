//! The nine acceptance criteria. Prints one PASS/FAIL line each and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use hygiea::chaindir::{chain_from_text, export_blocks, export_store};
use hygiea::scenario::{self, Scenario};
use hygiea_core::analytics::{
    daily_new_cases, lof_scores, sir_fit, sir_step, CaseSeries, Day, Decision, Observation, SirFitConfig, SirParams,
    SprtConfig, SprtState,
};
use hygiea_core::contracts::{
    effective_status, CertType, ContractState, EffectiveStatus, IssuerAttributes, LoggingClass, PartyStatus,
    VerifierAttributes,
};
use hygiea_core::crypto::{
    keygen, schnorr, BindingData, BindingError, BindingMechanism, CivilIdentity, GroupParams, PublicKey,
};
use hygiea_core::ledger::GenesisConfig;
use hygiea_core::primitives::{Address, Timestamp, DAY};
use hygiea_core::protocols::{
    export_revocation_snapshot, run_issuance, run_registration, run_verification, Application, HolderAgent,
    IssuanceRequest, KeySubstitution, Mode, Network, Outcome, Party, PartyRole, Presentation, Prover, Reason,
    VerificationRequest,
};
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn identity(i: usize) -> CivilIdentity {
    [
        ("name", format!("Name{i}")),
        ("surname", format!("Surname{i}")),
        ("doc", format!("D{i:07}")),
        ("dob", format!("19{:02}-0{}-1{}", 50 + i % 50, 1 + i % 9, i % 10)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

struct World {
    net: Network,
    issuer: Party,
    reader: Party,
    logger: Party,
    rng: ChaCha20Rng,
    now: Timestamp,
}

fn world(params: GroupParams, seed: u64) -> World {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let gb = keygen(&params, &mut rng);
    let config = GenesisConfig::new("acceptance", params.clone(), gb.public().clone());
    let mut net = Network::new(config, gb).unwrap();
    let mut issuer = Party::new("issuer", PartyRole::Issuer, keygen(&params, &mut rng));
    let mut reader = Party::new("reader", PartyRole::Verifier, keygen(&params, &mut rng));
    let mut logger = Party::new("logger", PartyRole::Verifier, keygen(&params, &mut rng));
    let now = 1_000;
    let app = Application::Issuer(IssuerAttributes {
        country: "FR".into(),
        name: "Lab".into(),
        id: "L1".into(),
        allowed_types: CertType::ALL.into_iter().collect(),
        valid_from: now,
        status: PartyStatus::Active,
        pk: issuer.pk().clone(),
    });
    run_registration(&mut net, &mut issuer, app, now, &mut rng).unwrap();
    for (v, class) in [(&mut reader, LoggingClass::ReadOnly), (&mut logger, LoggingClass::StateUpdating)] {
        let app = Application::Verifier(VerifierAttributes {
            country: "FR".into(),
            name: v.id.clone(),
            id: v.id.clone(),
            valid_from: now,
            status: PartyStatus::Active,
            pk: v.pk().clone(),
            logging_class: class,
        });
        run_registration(&mut net, v, app, now, &mut rng).unwrap();
    }
    World { net, issuer, reader, logger, rng, now }
}

impl World {
    fn issue(&mut self, holder: &mut Party, cert_type: CertType, mechanism: BindingMechanism) -> Address {
        self.now += 60;
        let req = IssuanceRequest { cert_type, mechanism, document_check: true, clinical: None, consent: false };
        run_issuance(&mut self.net, &self.issuer, holder, req, self.now, &mut self.rng).unwrap()
    }

    fn certificate(&self, addr: &Address) -> hygiea_core::contracts::Certificate {
        match self.net.chain().contract(addr) {
            Some(ContractState::Certificate(c)) => c.certificate.clone(),
            _ => panic!("no certificate at {addr}"),
        }
    }
}

/// Wraps a holder and rewrites its presentation.
struct TamperedPresentation<'a> {
    inner: &'a mut Party,
    edit: Box<dyn Fn(&mut Presentation)>,
}

impl Prover for TamperedPresentation<'_> {
    fn commit(&mut self, params: &GroupParams, rng: &mut dyn RngCore) -> BigUint {
        self.inner.commit(params, rng)
    }
    fn respond(&mut self, challenge: &BigUint, params: &GroupParams) -> BigUint {
        self.inner.respond(challenge, params)
    }
}

impl HolderAgent for TamperedPresentation<'_> {
    fn public_key(&self) -> PublicKey {
        self.inner.public_key()
    }
    fn binding(&self, mechanism: BindingMechanism) -> Result<BindingData, BindingError> {
        self.inner.binding(mechanism)
    }
    fn presentation(&self, certificate: Address) -> Presentation {
        let mut p = self.inner.presentation(certificate);
        (self.edit)(&mut p);
        p
    }
    fn receive_certificate(&mut self, certificate: Address, mechanism: BindingMechanism) {
        self.inner.receive_certificate(certificate, mechanism)
    }
}

/// Records the transcript of an honest identification.
struct Recorder<'a> {
    inner: &'a mut Party,
    commitment: Option<BigUint>,
    response: Option<BigUint>,
}

impl Prover for Recorder<'_> {
    fn commit(&mut self, params: &GroupParams, rng: &mut dyn RngCore) -> BigUint {
        let i = self.inner.commit(params, rng);
        self.commitment = Some(i.clone());
        i
    }
    fn respond(&mut self, challenge: &BigUint, params: &GroupParams) -> BigUint {
        let s = self.inner.respond(challenge, params);
        self.response = Some(s.clone());
        s
    }
}

impl HolderAgent for Recorder<'_> {
    fn public_key(&self) -> PublicKey {
        self.inner.public_key()
    }
    fn binding(&self, mechanism: BindingMechanism) -> Result<BindingData, BindingError> {
        self.inner.binding(mechanism)
    }
    fn presentation(&self, certificate: Address) -> Presentation {
        self.inner.presentation(certificate)
    }
    fn receive_certificate(&mut self, certificate: Address, mechanism: BindingMechanism) {
        self.inner.receive_certificate(certificate, mechanism)
    }
}

/// Replays a recorded presentation and transcript without any secret.
struct Replayer {
    presentation: Presentation,
    commitment: BigUint,
    response: BigUint,
}

impl Prover for Replayer {
    fn commit(&mut self, _: &GroupParams, _: &mut dyn RngCore) -> BigUint {
        self.commitment.clone()
    }
    fn respond(&mut self, _: &BigUint, _: &GroupParams) -> BigUint {
        self.response.clone()
    }
}

impl HolderAgent for Replayer {
    fn public_key(&self) -> PublicKey {
        self.presentation.holder_pk.clone()
    }
    fn binding(&self, _: BindingMechanism) -> Result<BindingData, BindingError> {
        self.presentation.binding.clone().ok_or(BindingError::MissingField("name"))
    }
    fn presentation(&self, _: Address) -> Presentation {
        self.presentation.clone()
    }
    fn receive_certificate(&mut self, _: Address, _: BindingMechanism) {}
}

struct Issued {
    addr: Address,
    holder: usize,
    valid_from: Timestamp,
    expiry: Timestamp,
    revoked: bool,
}

const MECHANISMS: [BindingMechanism; 3] =
    [BindingMechanism::PartialInfo, BindingMechanism::FullInfo, BindingMechanism::HashedInfo];

/// Adversarial and honest verifications against one populated network.
fn criterion_1() -> Check {
    let start = Instant::now();
    let params = GroupParams::fast();
    let mut w = world(params.clone(), 101);
    // freshness is exercised elsewhere; here snapshots must not go stale
    w.net.max_snapshot_age = u64::MAX;
    let mut holders: Vec<Party> =
        (0..16).map(|i| Party::holder(&format!("h{i}"), keygen(&params, &mut w.rng), identity(i))).collect();
    let mut mallory = Party::holder("mallory", keygen(&params, &mut w.rng), identity(999));
    let mut certs = Vec::new();
    for i in 0..48 {
        let h = i % holders.len();
        let t = CertType::ALL[w.rng.gen_range(0..3)];
        let m = MECHANISMS[w.rng.gen_range(0..3)];
        let addr = w.issue(&mut holders[h], t, m);
        let c = w.certificate(&addr);
        certs.push(Issued {
            addr,
            holder: h,
            valid_from: c.body.valid_from,
            expiry: c.body.expiry_date,
            revoked: false,
        });
    }
    for c in certs.iter_mut().step_by(6) {
        w.now += 60;
        w.net.revoke(c.addr, w.now, &mut w.rng).unwrap();
        c.revoked = true;
    }
    let snapshot = export_revocation_snapshot(w.net.chain(), w.now);
    let issued_at = w.now;

    let (mut honest, mut honest_ok, mut adversarial, mut breaches) = (0, 0, 0, Vec::new());
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut rng = ChaCha20Rng::seed_from_u64(202);
    let mut transcripts: BTreeMap<Address, (Presentation, BigUint, BigUint)> = BTreeMap::new();
    while honest < 250 || adversarial < 1000 {
        let live: Vec<usize> = (0..certs.len()).filter(|&i| !certs[i].revoked).collect();
        let ci = live[rng.gen_range(0..live.len())];
        let c = &certs[ci];
        let now = c.valid_from.max(issued_at) + rng.gen_range(0..(c.expiry - c.valid_from.max(issued_at)));
        let mode = if rng.gen_bool(0.5) { Mode::Online } else { Mode::Offline };
        let request =
            VerificationRequest { certificate: c.addr, mode, snapshot: Some(snapshot.clone()), document_check: true };
        let verifier = if rng.gen_bool(0.5) { &w.reader } else { &w.logger };
        let kind = if honest < 250 && (adversarial >= 1000 || rng.gen_ratio(1, 5)) {
            "honest"
        } else {
            [
                "key_substitution",
                "stolen_certificate",
                "replay",
                "chain_tampering",
                "presentation_tampering",
                "revoked",
                "expired",
            ][rng.gen_range(0..7)]
        };
        let holder_idx = c.holder;
        let verdict = match kind {
            "honest" => {
                let holder = &mut holders[holder_idx];
                let mut rec = Recorder { inner: holder, commitment: None, response: None };
                let v = run_verification(&mut w.net, verifier, &mut rec, &request, now, &mut w.rng);
                if let (Some(i), Some(s)) = (rec.commitment, rec.response) {
                    transcripts.insert(c.addr, (rec.inner.presentation(c.addr), i, s));
                }
                honest += 1;
                honest_ok += (v.outcome == Outcome::Accept) as usize;
                if v.outcome != Outcome::Accept {
                    breaches.push(format!("honest flow rejected: {:?}", v.reason));
                }
                continue;
            }
            "key_substitution" => {
                let sk = if rng.gen_bool(0.5) {
                    mallory.keys.secret().clone()
                } else {
                    holders[(holder_idx + 1) % holders.len()].keys.secret().clone()
                };
                let mut adv = KeySubstitution::new(&mut holders[holder_idx], sk);
                run_verification(&mut w.net, verifier, &mut adv, &request, now, &mut w.rng)
            }
            "stolen_certificate" => {
                let victim = holders[holder_idx].presentation(c.addr);
                let thief = if rng.gen_bool(0.5) { &mut mallory } else { &mut holders[(holder_idx + 3) % 16] };
                let copy_binding = rng.gen_bool(0.5);
                let mut adv = TamperedPresentation {
                    inner: thief,
                    edit: Box::new(move |p| {
                        if copy_binding {
                            p.binding = victim.binding.clone();
                        }
                    }),
                };
                run_verification(&mut w.net, verifier, &mut adv, &request, now, &mut w.rng)
            }
            "replay" => {
                let Some((p, i, s)) = transcripts.get(&c.addr).cloned() else { continue };
                let mut adv = Replayer { presentation: p, commitment: i, response: s };
                run_verification(&mut w.net, verifier, &mut adv, &request, now, &mut w.rng)
            }
            "chain_tampering" => {
                let addr = c.addr;
                let original = w.net.chain().contract(&addr).cloned().unwrap();
                let mut forged = original.clone();
                let ContractState::Certificate(state) = &mut forged else { unreachable!() };
                let body = &mut state.certificate.body;
                let field = rng.gen_range(0..6);
                let mut presenter = holder_idx;
                let mut use_mallory = false;
                match field {
                    0 => body.expiry_date += 365 * DAY,
                    1 => body.valid_from = body.valid_from.saturating_sub(30 * DAY),
                    2 => {
                        body.cert_type =
                            CertType::ALL[(CertType::ALL.iter().position(|t| *t == body.cert_type).unwrap() + 1) % 3]
                    }
                    3 => {
                        body.holder_pk = mallory.pk().clone();
                        body.personal_identifier = mallory.binding(body.personal_identifier.mechanism).unwrap();
                        use_mallory = true;
                    }
                    4 => {
                        presenter = (holder_idx + 5) % 16;
                        body.holder_pk = holders[presenter].pk().clone();
                        body.personal_identifier =
                            holders[presenter].binding(body.personal_identifier.mechanism).unwrap();
                    }
                    _ => body.issuance_date += 1,
                }
                w.net.chain_mut().store_mut_unchecked().insert(addr, forged);
                let v = if use_mallory {
                    let mech = state_mechanism(&w, &addr);
                    let mut m = TamperedPresentation { inner: &mut mallory, edit: Box::new(move |_| {}) };
                    m.inner.receive_certificate(addr, mech);
                    run_verification(&mut w.net, verifier, &mut m, &request, now, &mut w.rng)
                } else {
                    let mech = state_mechanism(&w, &addr);
                    holders[presenter].receive_certificate(addr, mech);
                    run_verification(&mut w.net, verifier, &mut holders[presenter], &request, now, &mut w.rng)
                };
                w.net.chain_mut().store_mut_unchecked().insert(addr, original);
                v
            }
            "presentation_tampering" => {
                let other = holders[(holder_idx + 7) % 16].presentation(certs[(ci + 1) % certs.len()].addr);
                let field = rng.gen_range(0..3);
                let other_cert = certs[(ci + 2) % certs.len()].addr;
                let mut adv = TamperedPresentation {
                    inner: &mut holders[holder_idx],
                    edit: Box::new(move |p| match field {
                        0 => p.binding = other.binding.clone(),
                        1 => p.binding = None,
                        _ => p.certificate = other_cert,
                    }),
                };
                let v = run_verification(&mut w.net, verifier, &mut adv, &request, now, &mut w.rng);
                // the wallet may legitimately hold the swapped-in certificate
                if field == 2 && certs.iter().any(|x| x.addr == other_cert && x.holder == holder_idx) {
                    continue;
                }
                v
            }
            "revoked" => {
                let rv: Vec<&Issued> = certs.iter().filter(|x| x.revoked).collect();
                let r = rv[rng.gen_range(0..rv.len())];
                let now = r.valid_from.max(issued_at) + 1;
                let req = VerificationRequest { certificate: r.addr, ..request.clone() };
                run_verification(&mut w.net, verifier, &mut holders[r.holder], &req, now, &mut w.rng)
            }
            _ => {
                let now = c.expiry + rng.gen_range(0..30 * DAY);
                run_verification(&mut w.net, verifier, &mut holders[holder_idx], &request, now, &mut w.rng)
            }
        };
        adversarial += 1;
        *kinds.entry(kind).or_default() += 1;
        if verdict.outcome == Outcome::Accept {
            breaches.push(format!("{kind} accepted"));
        }
    }
    let max_t = w.now.max(w.net.chain().head().timestamp) + 400 * DAY;
    w.net.seal(max_t, &mut w.rng).map_err(|e| e.to_string())?;
    ensure(w.net.chain().verify_chain().is_ok(), || "chain invalid after fuzzing".into())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(breaches.is_empty(), || format!("{} breaches, first: {}", breaches.len(), breaches[0]))?;
    ensure(elapsed < 60.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!(
        "{adversarial} adversarial (0 accepted; {kinds:?}), {honest_ok}/{honest} honest accepted, {elapsed:.1}s"
    ))
}

fn state_mechanism(w: &World, addr: &Address) -> BindingMechanism {
    w.certificate(addr).body.personal_identifier.mechanism
}

/// Key-substitution success rate in the toy group, for the record.
fn toy_group_diagnostic() -> String {
    let params = GroupParams::test();
    let mut w = world(params.clone(), 5);
    let mut alice = Party::holder("alice", keygen(&params, &mut w.rng), identity(1));
    let cert = w.issue(&mut alice, CertType::Recovery, BindingMechanism::HashedInfo);
    let now = w.now + 1;
    let request = VerificationRequest { certificate: cert, mode: Mode::Online, snapshot: None, document_check: true };
    let (mut trials, mut accepted) = (0, 0);
    while trials < 1000 {
        let other = keygen(&params, &mut w.rng);
        if other.public() == alice.pk() {
            continue;
        }
        let mut adv = KeySubstitution::new(&mut alice, other.secret().clone());
        let v = run_verification(&mut w.net, &w.reader, &mut adv, &request, now, &mut w.rng);
        trials += 1;
        accepted += (v.outcome == Outcome::Accept) as usize;
    }
    format!(
        "p=23 group: key substitution accepted {accepted}/{trials} ({:.3}, soundness error 1/q = {:.3})",
        accepted as f64 / trials as f64,
        1.0 / 11.0
    )
}

fn criterion_2() -> Check {
    let script: Scenario = serde_json::from_str(
        r#"{
        "chain_name": "revocation", "group": "fast", "genesis_time": 500,
        "parties": [
            {"id": "gb", "role": "GoverningBody"},
            {"id": "lab", "role": "Issuer"},
            {"id": "gate", "role": "Verifier"},
            {"id": "alice", "role": "Holder", "identity": {"name": "Alice", "surname": "A", "doc": "1", "dob": "2000-01-01"}}
        ],
        "actions": [
            {"action": "register", "party": "lab", "country": "FR", "name": "Lab", "registry_id": "L", "allowed_types": ["Test"]},
            {"action": "register", "party": "gate", "country": "FR", "name": "Gate", "registry_id": "G", "logging_class": "ReadOnly"},
            {"action": "issue", "issuer": "lab", "holder": "alice", "cert_type": "Test", "label": "c"},
            {"action": "advance_time", "seconds": 600},
            {"action": "export_snapshot", "label": "pre"},
            {"action": "verify", "verifier": "gate", "holder": "alice", "certificate": "c", "expect": "Accept"},
            {"action": "advance_time", "seconds": 600},
            {"action": "revoke", "certificate": "c"},
            {"action": "verify", "verifier": "gate", "holder": "alice", "certificate": "c", "mode": "Online", "expect": "Reject", "expect_reason": "revoked"},
            {"action": "verify", "verifier": "gate", "holder": "alice", "certificate": "c", "mode": "Offline", "snapshot": "pre", "expect": "Accept", "expect_reason": "ok"}
        ]}"#,
    )
    .map_err(|e| e.to_string())?;
    let run = scenario::run(&script, 9).map_err(|e| e.to_string())?;
    if let Some(f) = run.failure {
        return Err(f.to_string());
    }
    let chain = run.network.chain();
    let head = chain.head();
    let revoked_here = head
        .transactions
        .iter()
        .any(|t| matches!(t.payload, hygiea_core::contracts::ContractCall::RevokeCertificate { .. }));
    ensure(revoked_here, || "revocation is not in the head block".into())?;
    let v = &run.verdicts;
    ensure(v[1].checked_at == head.timestamp, || "online check not at the revocation block".into())?;
    Ok(format!(
        "revoked in block {}: online {:?}({:?}), offline with pre-revocation snapshot {:?}",
        head.height, v[1].outcome, v[1].reason, v[2].outcome
    ))
}

fn criterion_3() -> Check {
    let params = GroupParams::fast();
    let mut w = world(params.clone(), 3);
    let mut holder = Party::holder("h", keygen(&params, &mut w.rng), identity(3));
    let addr = w.issue(&mut holder, CertType::Vaccination, BindingMechanism::FullInfo);
    let t = w.now;
    let cert = w.certificate(&addr);
    let chain = w.net.chain();
    let status = |at| effective_status(&cert, at, chain.governance(), chain.params());
    let mut checked = 0;
    for d in 0..21 {
        for at in [t + d * DAY, t + (d + 1) * DAY - 1] {
            ensure(status(at) == EffectiveStatus::NotYetValid, || format!("t+{d}d: {:?}", status(at)))?;
            checked += 1;
        }
    }
    ensure(status(t + 21 * DAY) == EffectiveStatus::Valid, || format!("t+21d: {:?}", status(t + 21 * DAY)))?;
    let request = VerificationRequest { certificate: addr, mode: Mode::Online, snapshot: None, document_check: true };
    let before = run_verification(&mut w.net, &w.reader, &mut holder, &request, t + 21 * DAY - 1, &mut w.rng);
    let at = run_verification(&mut w.net, &w.reader, &mut holder, &request, t + 21 * DAY, &mut w.rng);
    ensure(before.reason == Reason::NotYetValid && at.outcome == Outcome::Accept, || {
        format!("verification: {:?} then {:?}", before.reason, at.outcome)
    })?;
    Ok(format!("NotYetValid at {checked} instants in [t, t+21d), Valid and accepted at t+21d"))
}

fn five_block_chain() -> (String, String, String) {
    let script: Scenario = serde_json::from_str(
        r#"{
        "chain_name": "sweep", "group": "fast", "genesis_time": 100,
        "parties": [
            {"id": "gb", "role": "GoverningBody"},
            {"id": "lab", "role": "Issuer"},
            {"id": "gate", "role": "Verifier"},
            {"id": "alice", "role": "Holder", "identity": {"name": "Alice", "surname": "A", "doc": "1", "dob": "2000-01-01"}}
        ],
        "actions": [
            {"action": "register", "party": "lab", "country": "FR", "name": "Lab", "registry_id": "L", "allowed_types": ["Test"]},
            {"action": "advance_time", "seconds": 10},
            {"action": "register", "party": "gate", "country": "FR", "name": "Gate", "registry_id": "G"},
            {"action": "advance_time", "seconds": 10},
            {"action": "issue", "issuer": "lab", "holder": "alice", "cert_type": "Test", "label": "c"},
            {"action": "advance_time", "seconds": 10},
            {"action": "verify", "verifier": "gate", "holder": "alice", "certificate": "c", "expect": "Accept"},
            {"action": "seal"},
            {"action": "advance_time", "seconds": 10},
            {"action": "revoke", "certificate": "c"}
        ]}"#,
    )
    .unwrap();
    let run = scenario::run(&script, 4).unwrap();
    assert!(run.failure.is_none());
    let chain = run.network.chain();
    assert_eq!(chain.height(), 5, "five sealed blocks after genesis");
    (serde_json::to_string_pretty(chain.config()).unwrap(), export_blocks(chain.blocks()), export_store(chain.store()))
}

fn criterion_4() -> Check {
    let (genesis, blocks, store) = five_block_chain();
    let honest = chain_from_text(&genesis, &blocks, &store).map_err(|e| e.to_string())?;
    honest.verify_chain().map_err(|v| format!("unmutated chain fails: {v}"))?;
    let mut mutations = 0usize;
    let mut undetected = Vec::new();
    for (target, text) in [("chain", &blocks), ("store", &store)] {
        let bytes = text.as_bytes();
        for pos in 0..bytes.len() {
            if bytes[pos] == b'\n' {
                continue;
            }
            let mut variants = vec![bytes[pos] ^ 0x01];
            if bytes[pos].is_ascii_alphabetic() {
                variants.push(bytes[pos] ^ 0x20);
            }
            for b in variants {
                let mut m = bytes.to_vec();
                m[pos] = b;
                mutations += 1;
                let Ok(m) = String::from_utf8(m) else { continue };
                let (bt, st) =
                    if target == "chain" { (m.as_str(), store.as_str()) } else { (blocks.as_str(), m.as_str()) };
                let detected = match chain_from_text(&genesis, bt, st) {
                    Err(_) => true,
                    Ok(c) => c.verify_chain().is_err(),
                };
                if !detected {
                    undetected.push(format!("{target} byte {pos}"));
                }
            }
        }
    }
    ensure(undetected.is_empty(), || format!("{} undetected, first {}", undetected.len(), undetected[0]))?;
    Ok(format!(
        "{mutations} single-byte mutations over {} block bytes and {} store bytes, all detected",
        blocks.len(),
        store.len()
    ))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(55);
    let mut accepted = 0;
    for params in [GroupParams::test(), GroupParams::fast()] {
        for _ in 0..500 {
            let kp = keygen(&params, &mut rng);
            let (i, st) = schnorr::commit(&params, &mut rng);
            let r = schnorr::challenge(&params, &mut rng);
            let s = schnorr::respond(kp.secret(), st, &r, &params);
            accepted += schnorr::check(kp.public(), &i, &r, &s, &params) as usize;
        }
    }
    ensure(accepted == 1000, || format!("completeness {accepted}/1000"))?;
    let params = GroupParams::test();
    let mut extracted = 0;
    for _ in 0..100 {
        let kp = keygen(&params, &mut rng);
        let k = params.random_nonzero_scalar(&mut rng);
        let r1 = schnorr::challenge(&params, &mut rng);
        let r2 = loop {
            let r = schnorr::challenge(&params, &mut rng);
            if r != r1 {
                break r;
            }
        };
        let run = |r: BigUint| {
            let (i, st) = schnorr::commit_with_nonce(&params, k.clone()).unwrap();
            let s = schnorr::respond(kp.secret(), st, &r, &params);
            schnorr::Transcript { commitment: i, challenge: r, response: s }
        };
        let (a, b) = (run(r1), run(r2));
        extracted += (schnorr::extract_secret(&params, &a, &b).as_ref() == Some(kp.secret().scalar())) as usize;
    }
    ensure(extracted == 100, || format!("extraction {extracted}/100"))?;
    Ok("1000/1000 honest runs accepted, sk extracted from 100/100 transcript pairs (p=23)".into())
}

fn criterion_6() -> Check {
    let params = SirParams::new(0.3, 0.1, 1_000_000.0, 10.0).map_err(|e| e.to_string())?;
    let n = params.population;
    let mut s = params.initial();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        s = sir_step(&params, s, 0.1).map_err(|e| e.to_string())?;
        worst = worst.max((s.total() - n).abs());
    }
    ensure(worst <= 1e-9 * n, || format!("drift {worst}"))?;
    let truth = SirParams::new(0.3, 0.1, 10_000.0, 10.0).unwrap();
    let start = Day::from_ymd(2021, 1, 1).unwrap();
    let mut day = start;
    let counts = daily_new_cases(&truth, 60)
        .into_iter()
        .map(|c| {
            let d = day;
            day = day.next();
            (d, c)
        })
        .collect();
    let series = CaseSeries::new(None, counts).map_err(|e| e.to_string())?;
    let cfg = SirFitConfig { initial_infected: 10.0, ..SirFitConfig::default() };
    let fit = sir_fit(&series, 10_000.0, &cfg).map_err(|e| e.to_string())?;
    let (b, g) = (fit.params.beta, fit.params.gamma);
    ensure((b - 0.3).abs() <= 0.01 && (g - 0.1).abs() <= 0.01, || format!("recovered ({b}, {g})"))?;
    Ok(format!("max |S+I+R-N| = {worst:e} over 10k steps (N=1e6), recovered beta={b:.6} gamma={g:.6}"))
}

fn sprt_trials(p: f64, seed: u64, trials: usize) -> (usize, usize) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut h1, mut h0) = (0, 0);
    for _ in 0..trials {
        let mut st = SprtState::new(SprtConfig::default()).unwrap();
        while st.decision == Decision::Continue {
            let obs = if rng.gen_bool(p) { Observation::Positive } else { Observation::Negative };
            st.update(obs).unwrap();
        }
        match st.decision {
            Decision::AcceptH1 => h1 += 1,
            Decision::AcceptH0 => h0 += 1,
            Decision::Continue => unreachable!(),
        }
    }
    (h1, h0)
}

fn criterion_7() -> Check {
    let n = 10_000;
    let (alpha, beta_err) = (0.05, 0.05);
    let (false_alarms, _) = sprt_trials(0.1, 70, n);
    let (detections, _) = sprt_trials(0.3, 71, n);
    let fa = false_alarms as f64 / n as f64;
    let det = detections as f64 / n as f64;
    let se_a = (alpha * (1.0 - alpha) / n as f64).sqrt();
    let se_b = (beta_err * (1.0 - beta_err) / n as f64).sqrt();
    ensure(fa <= alpha + 2.0 * se_a, || format!("false alarm rate {fa}"))?;
    ensure(det >= 1.0 - beta_err - 2.0 * se_b, || format!("detection rate {det}"))?;
    Ok(format!(
        "false alarms {fa:.4} <= {:.4}, detection {det:.4} >= {:.4}",
        alpha + 2.0 * se_a,
        1.0 - beta_err - 2.0 * se_b
    ))
}

/// Textbook LOF by brute force over all pairs.
fn brute_lof(pts: &[Vec<f64>], k: usize) -> Vec<f64> {
    let n = pts.len();
    let d = |a: usize, b: usize| pts[a].iter().zip(&pts[b]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let kdist: Vec<f64> = (0..n)
        .map(|i| {
            let mut ds: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d(i, j)).collect();
            ds.sort_by(f64::total_cmp);
            ds[k - 1]
        })
        .collect();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i && d(i, j) <= kdist[i]).collect()).collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let mut reach: Vec<f64> = nbrs[i].iter().map(|&j| kdist[j].max(d(i, j))).collect();
            reach.sort_by(f64::total_cmp);
            nbrs[i].len() as f64 / reach.iter().sum::<f64>()
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut l: Vec<f64> = nbrs[i].iter().map(|&j| lrd[j]).collect();
            l.sort_by(f64::total_cmp);
            l.iter().sum::<f64>() / nbrs[i].len() as f64 / lrd[i]
        })
        .collect()
}

fn criterion_8() -> Check {
    let k = 10;
    let mut strict = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(800 + trial);
        let mut pts: Vec<Vec<f64>> = (0..99).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let at = rng.gen_range(0..=pts.len());
        pts.insert(at, vec![3.0 + rng.gen::<f64>(), 3.0 + rng.gen::<f64>()]);
        let scores = lof_scores(&pts, k).map_err(|e| e.to_string())?;
        let reference = brute_lof(&pts, k);
        for (a, b) in scores.iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
        strict += scores.iter().enumerate().all(|(i, s)| i == at || *s < scores[at]) as usize;
    }
    ensure(strict == 100, || format!("outlier strictly maximal in {strict}/100"))?;
    ensure(worst <= 1e-9, || format!("max deviation from brute force {worst:e}"))?;
    Ok(format!("outlier strictly maximal in 100/100 trials, max |lof - brute force| = {worst:e}"))
}

fn criterion_9() -> Check {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/reference.json");
    let script: Scenario =
        serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let a = scenario::run(&script, 2024).map_err(|e| e.to_string())?;
    let b = scenario::run(&script, 2024).map_err(|e| e.to_string())?;
    ensure(a.failure.is_none(), || format!("reference scenario failed: {:?}", a.failure))?;
    let (fa, fb) = (scenario::outputs(&a), scenario::outputs(&b));
    ensure(fa == fb, || {
        let first = fa.iter().zip(&fb).find(|(x, y)| x != y).map(|(x, _)| x.0.clone()).unwrap_or_default();
        format!("outputs differ, first {first}")
    })?;
    let bytes: usize = fa.iter().map(|(_, t)| t.len()).sum();
    let c = scenario::run(&script, 2025).map_err(|e| e.to_string())?;
    ensure(scenario::outputs(&c) != fa, || "a different seed gave identical outputs".into())?;
    Ok(format!("{} files, {bytes} bytes identical across two runs with seed 2024", fa.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 protocol soundness", criterion_1),
        ("2 revocation semantics", criterion_2),
        ("3 three-week rule", criterion_3),
        ("4 chain integrity", criterion_4),
        ("5 schnorr", criterion_5),
        ("6 sir", criterion_6),
        ("7 sprt", criterion_7),
        ("8 lof", criterion_8),
        ("9 determinism", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
        if name.starts_with('1') {
            println!("     diagnostic: {}", toy_group_diagnostic());
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
