use alloc::collections::BTreeSet;
use alloc::string::ToString;
use alloc::vec::Vec;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::crypto::{bind_identity, keygen, BindingMechanism, CivilIdentity, GroupParams, KeyPair};
use crate::primitives::{Address, Timestamp, DAY};

struct Fixture {
    params: GroupParams,
    rng: ChaCha20Rng,
    gb: KeyPair,
    store: ContractStore,
    governance: Address,
    factory: Address,
    used: BTreeSet<crate::crypto::PublicKey>,
}

impl Fixture {
    fn new() -> Self {
        let params = GroupParams::fast();
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let gb = keygen(&params, &mut rng);
        let gb_addr = Address::of_account(gb.public());
        let governance = Address::of_contract(&gb_addr, 0);
        let factory = Address::of_contract(&gb_addr, 1);
        let mut store = ContractStore::new();
        store.insert(governance, ContractState::Governance(GovernanceState::new(gb.public().clone())));
        store.insert(
            factory,
            ContractState::Factory(FactoryState { governance, policy: ValidityPolicy::default(), issued: Vec::new() }),
        );
        let used = [gb.public().clone()].into_iter().collect();
        Fixture { params, rng, gb, store, governance, factory, used }
    }

    fn key(&mut self) -> KeyPair {
        // Fresh key distinct from every key already handed out.
        loop {
            let k = keygen(&self.params, &mut self.rng);
            if self.used.insert(k.public().clone()) {
                return k;
            }
        }
    }

    fn exec(&mut self, sender: &KeyPair, now: Timestamp, call: ContractCall) -> Result<Effect, Revert> {
        let ctx = ExecContext { params: &self.params, sender: sender.public(), block_time: now };
        execute(&mut self.store, &ctx, &call)
    }

    fn issuer_attrs(&self, pk: &KeyPair, types: &[CertType]) -> IssuerAttributes {
        IssuerAttributes {
            country: "CY".into(),
            name: "Nicosia Lab".into(),
            id: "LAB-1".into(),
            allowed_types: types.iter().copied().collect(),
            valid_from: 0,
            status: PartyStatus::Active,
            pk: pk.public().clone(),
        }
    }

    fn register_issuer(&mut self, issuer: &KeyPair, types: &[CertType]) -> Result<Effect, Revert> {
        let attrs = self.issuer_attrs(issuer, types);
        let record = IssuerRecord::attest(attrs, self.gb.secret(), &self.params, &mut self.rng);
        let gb = self.gb.clone();
        self.exec(&gb, 0, ContractCall::RegisterIssuer { governance: self.governance, record })
    }

    fn register_verifier(&mut self, v: &KeyPair, class: LoggingClass) -> Result<Effect, Revert> {
        let attrs = VerifierAttributes {
            country: "CY".into(),
            name: "Larnaca Airport".into(),
            id: "VER-1".into(),
            valid_from: 0,
            status: PartyStatus::Active,
            pk: v.public().clone(),
            logging_class: class,
        };
        let record = VerifierRecord::attest(attrs, self.gb.secret(), &self.params, &mut self.rng);
        let gb = self.gb.clone();
        self.exec(&gb, 0, ContractCall::RegisterVerifier { governance: self.governance, record })
    }

    fn body(&self, issuer: &KeyPair, holder: &KeyPair, t: CertType, issued: Timestamp) -> CertificateBody {
        let (valid_from, expiry_date) = ValidityPolicy::default().window(t, issued);
        let id: CivilIdentity =
            [("name", "Maria"), ("surname", "Kyriacou"), ("doc", "K1234567"), ("dob", "1990-01-02")]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
        CertificateBody {
            holder_pk: holder.public().clone(),
            personal_identifier: bind_identity(&id, BindingMechanism::HashedInfo).unwrap(),
            cert_type: t,
            issuance_date: issued,
            valid_from,
            expiry_date,
            issuer_pk: issuer.public().clone(),
            governance_address: self.governance,
        }
    }

    fn create(&mut self, issuer: &KeyPair, body: CertificateBody, now: Timestamp) -> Result<Effect, Revert> {
        let issuer_signature = body.sign(issuer.secret(), &self.params, &mut self.rng);
        self.exec(issuer, now, ContractCall::CreateCertificate { factory: self.factory, body, issuer_signature })
    }

    fn issue(&mut self, issuer: &KeyPair, holder: &KeyPair, t: CertType, at: Timestamp) -> Result<Address, Revert> {
        let body = self.body(issuer, holder, t, at);
        match self.create(issuer, body, at)? {
            Effect::CertificateCreated(a) => Ok(a),
            other => panic!("unexpected effect {other:?}"),
        }
    }

    fn gov(&self) -> &GovernanceState {
        match &self.store[&self.governance] {
            ContractState::Governance(g) => g,
            _ => unreachable!(),
        }
    }

    fn issued(&self) -> &[Address] {
        match &self.store[&self.factory] {
            ContractState::Factory(f) => &f.issued,
            _ => unreachable!(),
        }
    }

    fn cert(&self, a: &Address) -> &CertificateState {
        match &self.store[a] {
            ContractState::Certificate(c) => c,
            _ => unreachable!(),
        }
    }

    fn set_status(
        &mut self,
        caller: &KeyPair,
        role: Role,
        pk: &KeyPair,
        status: PartyStatus,
    ) -> Result<Effect, Revert> {
        let attestation = match role {
            Role::Issuer => {
                let mut a = self.gov().issuers[pk.public()].attributes.clone();
                a.status = status;
                IssuerRecord::attest(a, self.gb.secret(), &self.params, &mut self.rng).attestation
            }
            Role::Verifier => {
                let mut a = self.gov().verifiers[pk.public()].attributes.clone();
                a.status = status;
                VerifierRecord::attest(a, self.gb.secret(), &self.params, &mut self.rng).attestation
            }
        };
        let call =
            ContractCall::SetStatus { governance: self.governance, role, pk: pk.public().clone(), status, attestation };
        self.exec(caller, 0, call)
    }
}

#[test]
fn governing_body_registers_test_lab() {
    let mut f = Fixture::new();
    let lab = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    let rec = &f.gov().issuers[lab.public()];
    assert_eq!(rec.attributes.allowed_types, [CertType::Test].into_iter().collect::<BTreeSet<_>>());
    assert!(rec.attestation_valid(f.gb.public(), &f.params));
    assert_eq!(f.gov().events.len(), 1);
}

#[test]
fn issuer_cannot_register_others() {
    let mut f = Fixture::new();
    let lab = f.key();
    let other = f.key();
    let attrs = f.issuer_attrs(&other, &[CertType::Test]);
    let record = IssuerRecord::attest(attrs, f.gb.secret(), &f.params, &mut f.rng);
    let r = f.exec(&lab, 0, ContractCall::RegisterIssuer { governance: f.governance, record });
    assert_eq!(r, Err(Revert::OnlyGoverningBody));
    assert!(f.gov().issuers.is_empty());
}

#[test]
fn duplicate_issuer_reverts() {
    let mut f = Fixture::new();
    let lab = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    assert_eq!(f.register_issuer(&lab, &[CertType::Test]), Err(Revert::AlreadyRegistered));
}

#[test]
fn active_issuer_needs_a_type() {
    let mut f = Fixture::new();
    let lab = f.key();
    assert_eq!(f.register_issuer(&lab, &[]), Err(Revert::EmptyAllowedTypes));
}

#[test]
fn verifier_registration() {
    let mut f = Fixture::new();
    let v = f.key();
    f.register_verifier(&v, LoggingClass::StateUpdating).unwrap();
    assert!(f.gov().verifiers.contains_key(v.public()));
    assert_eq!(f.register_verifier(&v, LoggingClass::StateUpdating), Err(Revert::AlreadyRegistered));
}

#[test]
fn verifier_attestation_by_wrong_key_reverts() {
    let mut f = Fixture::new();
    let v = f.key();
    let rogue = f.key();
    let attrs = VerifierAttributes {
        country: "CY".into(),
        name: "Airport".into(),
        id: "V".into(),
        valid_from: 0,
        status: PartyStatus::Active,
        pk: v.public().clone(),
        logging_class: LoggingClass::ReadOnly,
    };
    let record = VerifierRecord::attest(attrs, rogue.secret(), &f.params, &mut f.rng);
    let gb = f.gb.clone();
    let r = f.exec(&gb, 0, ContractCall::RegisterVerifier { governance: f.governance, record });
    assert_eq!(r, Err(Revert::BadAttestation));
}

#[test]
fn deactivated_issuer_cannot_issue_until_reactivated() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    let gb = f.gb.clone();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    f.set_status(&gb, Role::Issuer, &lab, PartyStatus::Inactive).unwrap();
    assert_eq!(f.issue(&lab, &holder, CertType::Test, 10), Err(Revert::IssuerInactive));
    f.set_status(&gb, Role::Issuer, &lab, PartyStatus::Active).unwrap();
    assert!(f.issue(&lab, &holder, CertType::Test, 10).is_ok());
    assert!(f.gov().issuers[lab.public()].attestation_valid(gb.public(), &f.params));
}

#[test]
fn set_status_guards() {
    let mut f = Fixture::new();
    let lab = f.key();
    let stranger = f.key();
    let gb = f.gb.clone();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    assert_eq!(f.set_status(&lab, Role::Issuer, &lab, PartyStatus::Inactive), Err(Revert::OnlyGoverningBody));
    let call = ContractCall::SetStatus {
        governance: f.governance,
        role: Role::Issuer,
        pk: stranger.public().clone(),
        status: PartyStatus::Inactive,
        attestation: f.gov().issuers[lab.public()].attestation.clone(),
    };
    assert_eq!(f.exec(&gb, 0, call), Err(Revert::UnknownParty));
}

#[test]
fn revocation_by_governing_body_only_and_idempotent() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    let gb = f.gb.clone();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    let cert = f.issue(&lab, &holder, CertType::Test, 0).unwrap();
    let before = f.cert(&cert).certificate.clone();

    let revoke = ContractCall::RevokeCertificate { governance: f.governance, certificate: cert };
    assert_eq!(f.exec(&lab, 1, revoke.clone()), Err(Revert::OnlyGoverningBody));
    f.exec(&gb, 1, revoke.clone()).unwrap();
    f.exec(&gb, 2, revoke).unwrap();
    let after = &f.cert(&cert).certificate;
    assert_eq!(after.status_flag, CertStatus::Revoked);
    assert_eq!(f.gov().revoked, [cert]);
    // status_flag is the only field that changed
    assert_eq!(after.body, before.body);
    assert_eq!(after.issuer_signature, before.issuer_signature);

    let unknown = ContractCall::RevokeCertificate { governance: f.governance, certificate: Address([7; 20]) };
    assert_eq!(f.exec(&gb, 3, unknown), Err(Revert::UnknownCertificate));
}

#[test]
fn test_only_lab_cannot_issue_vaccination() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    assert_eq!(f.issue(&lab, &holder, CertType::Vaccination, 0), Err(Revert::TypeNotAllowed));
    assert!(f.issued().is_empty());
}

#[test]
fn valid_issuance_is_recorded() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    f.register_issuer(&lab, &[CertType::Test, CertType::Vaccination]).unwrap();
    let a = f.issue(&lab, &holder, CertType::Vaccination, 0).unwrap();
    let b = f.issue(&lab, &holder, CertType::Test, 5).unwrap();
    assert_eq!(f.issued(), [a, b]);
    assert_eq!(f.store[&a].query("holder").unwrap(), QueryValue::Key(holder.public().clone()));
    assert_eq!(a, Address::of_contract(&f.factory, 0));
}

#[test]
fn issuance_before_issuer_valid_from_reverts() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    let mut attrs = f.issuer_attrs(&lab, &[CertType::Test]);
    attrs.valid_from = 100;
    let record = IssuerRecord::attest(attrs, f.gb.secret(), &f.params, &mut f.rng);
    let gb = f.gb.clone();
    f.exec(&gb, 0, ContractCall::RegisterIssuer { governance: f.governance, record }).unwrap();
    assert_eq!(f.issue(&lab, &holder, CertType::Test, 99), Err(Revert::IssuerNotYetValid));
    assert!(f.issue(&lab, &holder, CertType::Test, 100).is_ok());
}

#[test]
fn malformed_dates_revert() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    f.register_issuer(&lab, &[CertType::Test, CertType::Vaccination]).unwrap();

    let mut body = f.body(&lab, &holder, CertType::Test, 1000);
    body.valid_from = 999;
    assert_eq!(f.create(&lab, body, 1000), Err(Revert::MalformedDates));

    // vaccination valid before the three-week delay
    let mut body = f.body(&lab, &holder, CertType::Vaccination, 1000);
    body.valid_from = 1000 + 20 * DAY;
    assert_eq!(f.create(&lab, body, 1000), Err(Revert::MalformedDates));

    let mut body = f.body(&lab, &holder, CertType::Test, 1000);
    body.expiry_date = body.valid_from - 1;
    assert_eq!(f.create(&lab, body, 1000), Err(Revert::MalformedDates));
}

#[test]
fn forged_issuer_signature_reverts() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    let body = f.body(&lab, &holder, CertType::Test, 0);
    let sig = body.sign(holder.secret(), &f.params, &mut f.rng);
    let call = ContractCall::CreateCertificate { factory: f.factory, body, issuer_signature: sig };
    assert_eq!(f.exec(&lab, 0, call), Err(Revert::BadIssuerSignature));
}

#[test]
fn vaccination_three_week_rule() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    f.register_issuer(&lab, &[CertType::Vaccination]).unwrap();
    let a = f.issue(&lab, &holder, CertType::Vaccination, 0).unwrap();
    let cert = f.cert(&a).certificate.clone();
    let status = |now| effective_status(&cert, now, f.gov(), &f.params);
    assert_eq!(status(10 * DAY), EffectiveStatus::NotYetValid);
    assert_eq!(status(22 * DAY), EffectiveStatus::Valid);
    assert_eq!(status(21 * DAY + 365 * DAY), EffectiveStatus::Valid);
    assert_eq!(status(21 * DAY + 365 * DAY + 1), EffectiveStatus::Expired);
}

#[test]
fn status_precedence() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    let gb = f.gb.clone();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    let a = f.issue(&lab, &holder, CertType::Test, 0).unwrap();
    let cert = f.cert(&a).certificate.clone();

    let mut tampered = cert.clone();
    tampered.body.personal_identifier.payload[0] ^= 1;
    assert_eq!(effective_status(&tampered, 1, f.gov(), &f.params), EffectiveStatus::InvalidSignature);

    f.set_status(&gb, Role::Issuer, &lab, PartyStatus::Inactive).unwrap();
    assert_eq!(effective_status(&cert, 1, f.gov(), &f.params), EffectiveStatus::IssuerUntrusted);

    let mut revoked = tampered;
    revoked.status_flag = CertStatus::Revoked;
    assert_eq!(effective_status(&revoked, 1, f.gov(), &f.params), EffectiveStatus::Revoked);
}

#[test]
fn verification_log() {
    let mut f = Fixture::new();
    let lab = f.key();
    let holder = f.key();
    let border = f.key();
    let reader = f.key();
    let stranger = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    f.register_verifier(&border, LoggingClass::StateUpdating).unwrap();
    f.register_verifier(&reader, LoggingClass::ReadOnly).unwrap();
    let a = f.issue(&lab, &holder, CertType::Test, 0).unwrap();
    let log = |ts| ContractCall::LogVerification { certificate: a, timestamp: ts };

    f.exec(&border, 10, log(5)).unwrap();
    f.exec(&border, 10, log(10)).unwrap();
    assert_eq!(f.exec(&reader, 10, log(10)), Err(Revert::ReadOnlyVerifier));
    assert_eq!(f.exec(&stranger, 10, log(10)), Err(Revert::NotAVerifier));
    assert_eq!(f.exec(&border, 10, log(11)), Err(Revert::FutureTimestamp));
    assert_eq!(f.exec(&border, 20, log(9)), Err(Revert::TimestampRegression));
    let stamps: Vec<_> = f.cert(&a).verification_log.iter().map(|s| s.timestamp).collect();
    assert_eq!(stamps, [5, 10]);
}

#[test]
fn queries() {
    let mut f = Fixture::new();
    let lab = f.key();
    f.register_issuer(&lab, &[CertType::Test]).unwrap();
    match f.store[&f.governance].query("issuers").unwrap() {
        QueryValue::Issuers(list) => assert_eq!(list.len(), 1),
        other => panic!("{other:?}"),
    }
    assert_eq!(f.store[&f.factory].query("count").unwrap(), QueryValue::Count(0));
    assert!(matches!(f.store[&f.factory].query("nope"), Err(QueryError::UnknownSelector(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn registry_writes_need_the_governing_body(seed in any::<u64>(), op in 0u8..4) {
        let mut f = Fixture::new();
        let lab = f.key();
        f.register_issuer(&lab, &[CertType::Test]).unwrap();
        let holder = f.key();
        let cert = f.issue(&lab, &holder, CertType::Test, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let caller = loop {
            let k = keygen(&f.params, &mut rng);
            if k.public() != f.gb.public() {
                break k;
            }
        };
        let before = f.store.clone();
        let gb_sk = f.gb.secret().clone();
        let attrs = f.issuer_attrs(&caller, &[CertType::Test]);
        let record = IssuerRecord::attest(attrs, &gb_sk, &f.params, &mut rng);
        let call = match op {
            0 => ContractCall::RegisterIssuer { governance: f.governance, record },
            1 => ContractCall::SetStatus {
                governance: f.governance,
                role: Role::Issuer,
                pk: lab.public().clone(),
                status: PartyStatus::Inactive,
                attestation: record.attestation,
            },
            2 => ContractCall::RevokeCertificate { governance: f.governance, certificate: cert },
            _ => {
                let attrs = VerifierAttributes {
                    country: "X".into(), name: "X".into(), id: "X".into(), valid_from: 0,
                    status: PartyStatus::Active, pk: caller.public().clone(),
                    logging_class: LoggingClass::StateUpdating,
                };
                let record = VerifierRecord::attest(attrs, &gb_sk, &f.params, &mut rng);
                ContractCall::RegisterVerifier { governance: f.governance, record }
            }
        };
        prop_assert_eq!(f.exec(&caller, 1, call), Err(Revert::OnlyGoverningBody));
        prop_assert_eq!(&f.store, &before);
    }

    #[test]
    fn issued_list_counts_successes(types in proptest::collection::vec(0usize..3, 1..12)) {
        let mut f = Fixture::new();
        let lab = f.key();
        f.register_issuer(&lab, &[CertType::Test, CertType::Recovery]).unwrap();
        let holder = f.key();
        let mut ok = 0;
        for t in types {
            if f.issue(&lab, &holder, CertType::ALL[t], 0).is_ok() {
                ok += 1;
            }
        }
        prop_assert_eq!(f.issued().len(), ok);
    }

    #[test]
    fn effective_status_is_pure(now in 0u64..(400 * DAY)) {
        let mut f = Fixture::new();
        let lab = f.key();
        let holder = f.key();
        f.register_issuer(&lab, &[CertType::Vaccination]).unwrap();
        let a = f.issue(&lab, &holder, CertType::Vaccination, 0).unwrap();
        let cert = f.cert(&a).certificate.clone();
        let first = effective_status(&cert, now, f.gov(), &f.params);
        prop_assert_eq!(first, effective_status(&cert, now, f.gov(), &f.params));
    }
}
