use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::RngCore;

use super::block::Block;
use super::tx::{SignedTransaction, TxOutcome};
use super::GenesisConfig;
use crate::canonical::to_canonical_bytes;
use crate::contracts::{
    execute, ContractState, ContractStore, ExecContext, FactoryState, GovernanceState, QueryError, QueryValue,
};
use crate::crypto::{hash_digest, sign, verify, Digest, GroupParams, PublicKey, SecretKey};
use crate::primitives::{Address, Timestamp};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("genesis config must name exactly one validator, found {0}")]
    ValidatorCount(usize),
    #[error("validator key is not a group element")]
    InvalidValidatorKey,
    #[error("sender key is not a group element")]
    InvalidSender,
    #[error("transaction signature does not verify")]
    BadSignature,
    #[error("expected nonce {expected}, got {got}")]
    BadNonce { expected: u64, got: u64 },
    #[error("sealing key is not the validator key")]
    NotValidator,
    #[error("timestamp {got} precedes head timestamp {head}")]
    TimestampRegression { head: Timestamp, got: Timestamp },
    #[error("chain has no genesis block")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    GenesisMismatch,
    HeightMismatch,
    ChainIdMismatch,
    ParentHashMismatch,
    TimestampRegression,
    MissingValidatorSignature,
    BadValidatorSignature,
    BadTxSignature(usize),
    NonceMismatch(usize),
    ReceiptMismatch,
    StateRootMismatch,
    /// The stored contract state differs from the result of replaying all blocks.
    StoreMismatch,
}

/// First integrity failure found by [`ChainState::verify_chain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("chain violation at height {height}: {kind:?}")]
pub struct Violation {
    pub height: u64,
    pub kind: ViolationKind,
}

/// The ledger: sealed blocks, the current contract store and the pending pool.
#[derive(Clone, Debug)]
pub struct ChainState {
    config: GenesisConfig,
    chain_id: Digest,
    blocks: Vec<Block>,
    store: ContractStore,
    pending: Vec<SignedTransaction>,
    nonces: BTreeMap<PublicKey, u64>,
}

struct Deployment {
    store: ContractStore,
    nonces: BTreeMap<PublicKey, u64>,
}

fn deploy(config: &GenesisConfig) -> Deployment {
    let gb = &config.validators[0];
    let gb_addr = Address::of_account(gb);
    let governance = Address::of_contract(&gb_addr, 0);
    let factory = Address::of_contract(&gb_addr, 1);
    let mut store = ContractStore::new();
    store.insert(governance, ContractState::Governance(GovernanceState::new(gb.clone())));
    store.insert(
        factory,
        ContractState::Factory(FactoryState { governance, policy: config.policy, issued: Vec::new() }),
    );
    // The two deployments consume the Governing Body's first two nonces.
    let mut nonces = BTreeMap::new();
    nonces.insert(gb.clone(), 2);
    Deployment { store, nonces }
}

fn state_root(store: &ContractStore) -> Digest {
    hash_digest(&to_canonical_bytes(store))
}

fn check_config(config: &GenesisConfig) -> Result<(), LedgerError> {
    if config.validators.len() != 1 {
        return Err(LedgerError::ValidatorCount(config.validators.len()));
    }
    if !config.validators[0].is_valid(&config.group) {
        return Err(LedgerError::InvalidValidatorKey);
    }
    Ok(())
}

fn genesis_block(config: &GenesisConfig, store: &ContractStore) -> Block {
    Block {
        chain_id: config.chain_id(),
        height: 0,
        parent_hash: Digest::ZERO,
        timestamp: config.genesis_time,
        transactions: Vec::new(),
        receipts: Vec::new(),
        state_root: state_root(store),
        validator_signature: None,
    }
}

fn apply(
    store: &mut ContractStore,
    params: &GroupParams,
    block_time: Timestamp,
    txs: &[SignedTransaction],
) -> Vec<TxOutcome> {
    txs.iter()
        .map(|tx| {
            let ctx = ExecContext { params, sender: &tx.sender, block_time };
            match execute(store, &ctx, &tx.payload) {
                Ok(e) => TxOutcome::Applied(e),
                Err(r) => TxOutcome::Reverted(r),
            }
        })
        .collect()
}

impl ChainState {
    pub fn genesis(config: GenesisConfig) -> Result<Self, LedgerError> {
        check_config(&config)?;
        let Deployment { store, nonces } = deploy(&config);
        let block = genesis_block(&config, &store);
        Ok(ChainState {
            chain_id: config.chain_id(),
            config,
            blocks: alloc::vec![block],
            store,
            pending: Vec::new(),
            nonces,
        })
    }

    /// Reassembles a chain from stored parts without checking it.
    /// Call [`verify_chain`](Self::verify_chain) before trusting the result.
    pub fn from_parts(config: GenesisConfig, blocks: Vec<Block>, store: ContractStore) -> Result<Self, LedgerError> {
        check_config(&config)?;
        if blocks.is_empty() {
            return Err(LedgerError::Empty);
        }
        let mut nonces = deploy(&config).nonces;
        for tx in blocks.iter().flat_map(|b| &b.transactions) {
            let next = nonces.entry(tx.sender.clone()).or_insert(0);
            *next = (*next).max(tx.nonce.saturating_add(1));
        }
        Ok(ChainState { chain_id: config.chain_id(), config, blocks, store, pending: Vec::new(), nonces })
    }

    pub fn config(&self) -> &GenesisConfig {
        &self.config
    }

    pub fn params(&self) -> &GroupParams {
        &self.config.group
    }

    pub fn chain_id(&self) -> Digest {
        self.chain_id
    }

    pub fn validator(&self) -> &PublicKey {
        &self.config.validators[0]
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn head(&self) -> &Block {
        self.blocks.last().expect("chain always holds genesis")
    }

    pub fn height(&self) -> u64 {
        self.head().height
    }

    pub fn store(&self) -> &ContractStore {
        &self.store
    }

    pub fn pending(&self) -> &[SignedTransaction] {
        &self.pending
    }

    pub fn state_root(&self) -> Digest {
        state_root(&self.store)
    }

    pub fn governance_address(&self) -> Address {
        Address::of_contract(&Address::of_account(self.validator()), 0)
    }

    pub fn factory_address(&self) -> Address {
        Address::of_contract(&Address::of_account(self.validator()), 1)
    }

    pub fn governance(&self) -> &GovernanceState {
        match self.store.get(&self.governance_address()) {
            Some(ContractState::Governance(g)) => g,
            _ => panic!("governance contract missing from store"),
        }
    }

    pub fn contract(&self, address: &Address) -> Option<&ContractState> {
        self.store.get(address)
    }

    /// Nonce the next transaction from `pk` must carry, counting pending ones.
    pub fn next_nonce(&self, pk: &PublicKey) -> u64 {
        self.nonces.get(pk).copied().unwrap_or(0)
    }

    pub fn submit(&mut self, tx: SignedTransaction) -> Result<usize, LedgerError> {
        if !tx.sender.is_valid(self.params()) {
            return Err(LedgerError::InvalidSender);
        }
        if !tx.signature_valid(self.params()) {
            return Err(LedgerError::BadSignature);
        }
        let expected = self.next_nonce(&tx.sender);
        if tx.nonce != expected {
            return Err(LedgerError::BadNonce { expected, got: tx.nonce });
        }
        self.nonces.insert(tx.sender.clone(), expected + 1);
        self.pending.push(tx);
        Ok(self.pending.len())
    }

    /// Executes every pending transaction in order and appends the block.
    pub fn seal<R: RngCore + ?Sized>(
        &mut self,
        validator_sk: &SecretKey,
        timestamp: Timestamp,
        rng: &mut R,
    ) -> Result<&Block, LedgerError> {
        if &validator_sk.public_key(self.params()) != self.validator() {
            return Err(LedgerError::NotValidator);
        }
        let head = self.head();
        if timestamp < head.timestamp {
            return Err(LedgerError::TimestampRegression { head: head.timestamp, got: timestamp });
        }
        let parent_hash = head.hash();
        let height = head.height + 1;
        let transactions = core::mem::take(&mut self.pending);
        let receipts = apply(&mut self.store, &self.config.group, timestamp, &transactions);
        let mut block = Block {
            chain_id: self.chain_id,
            height,
            parent_hash,
            timestamp,
            transactions,
            receipts,
            state_root: state_root(&self.store),
            validator_signature: None,
        };
        let sig = sign(validator_sk, &block.header().signing_bytes(), &self.config.group, rng);
        block.validator_signature = Some(sig);
        self.blocks.push(block);
        Ok(self.head())
    }

    pub fn query(&self, address: &Address, selector: &str) -> Result<QueryValue, QueryError> {
        self.store.get(address).ok_or(QueryError::NotFound(*address))?.query(selector)
    }

    /// Checks links, seals, transaction signatures and nonces, then replays
    /// every block from genesis and compares receipts, state roots and the
    /// final store.
    pub fn verify_chain(&self) -> Result<(), Violation> {
        let params = &self.config.group;
        let Deployment { mut store, mut nonces } = deploy(&self.config);
        let fail = |height, kind| Err(Violation { height, kind });

        let genesis = &self.blocks[0];
        if genesis != &genesis_block(&self.config, &store) {
            return fail(genesis.height, ViolationKind::GenesisMismatch);
        }
        for (i, pair) in self.blocks.windows(2).enumerate() {
            let (parent, block) = (&pair[0], &pair[1]);
            let h = block.height;
            if h != i as u64 + 1 {
                return fail(h, ViolationKind::HeightMismatch);
            }
            if block.chain_id != self.chain_id {
                return fail(h, ViolationKind::ChainIdMismatch);
            }
            if block.parent_hash != parent.hash() {
                return fail(h, ViolationKind::ParentHashMismatch);
            }
            if block.timestamp < parent.timestamp {
                return fail(h, ViolationKind::TimestampRegression);
            }
            let Some(sig) = &block.validator_signature else {
                return fail(h, ViolationKind::MissingValidatorSignature);
            };
            if !verify(self.validator(), &block.header().signing_bytes(), sig, params) {
                return fail(h, ViolationKind::BadValidatorSignature);
            }
            for (j, tx) in block.transactions.iter().enumerate() {
                if !tx.sender.is_valid(params) || !tx.signature_valid(params) {
                    return fail(h, ViolationKind::BadTxSignature(j));
                }
                let next = nonces.entry(tx.sender.clone()).or_insert(0);
                if tx.nonce != *next {
                    return fail(h, ViolationKind::NonceMismatch(j));
                }
                *next += 1;
            }
            let receipts = apply(&mut store, params, block.timestamp, &block.transactions);
            if receipts != block.receipts {
                return fail(h, ViolationKind::ReceiptMismatch);
            }
            if state_root(&store) != block.state_root {
                return fail(h, ViolationKind::StateRootMismatch);
            }
        }
        if store != self.store {
            return fail(self.height(), ViolationKind::StoreMismatch);
        }
        Ok(())
    }

    /// Mutable access to the store, bypassing the ledger. Only useful for
    /// simulating out-of-band tampering.
    pub fn store_mut_unchecked(&mut self) -> &mut ContractStore {
        &mut self.store
    }

    /// Mutable access to sealed blocks, bypassing the ledger.
    pub fn blocks_mut_unchecked(&mut self) -> &mut Vec<Block> {
        &mut self.blocks
    }
}
