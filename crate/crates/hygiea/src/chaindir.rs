//! On-disk chain directory: `genesis.json`, `chain.jsonl` (one block per
//! line) and `store.jsonl` (one contract per line).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use hygiea_core::contracts::{ContractState, ContractStore};
use hygiea_core::ledger::{Block, ChainState, GenesisConfig, LedgerError};
use hygiea_core::primitives::Address;
use serde::{Deserialize, Serialize};

pub const GENESIS_FILE: &str = "genesis.json";
pub const CHAIN_FILE: &str = "chain.jsonl";
pub const STORE_FILE: &str = "store.jsonl";
pub const RECORDS_FILE: &str = "records.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum ChainDirError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{file} line {line}: {source}")]
    Parse { file: &'static str, line: usize, source: serde_json::Error },
    #[error("{0}: {1}")]
    Json(&'static str, serde_json::Error),
    #[error("store lists contract {0} twice")]
    DuplicateContract(Address),
    #[error("{0} already holds a chain; pass --force to overwrite")]
    Exists(PathBuf),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreEntry {
    address: Address,
    state: ContractState,
}

#[derive(Serialize)]
struct StoreEntryRef<'a> {
    address: &'a Address,
    state: &'a ContractState,
}

pub fn export_blocks(blocks: &[Block]) -> String {
    let mut out = String::new();
    for b in blocks {
        out.push_str(&serde_json::to_string(b).expect("blocks serialize"));
        out.push('\n');
    }
    out
}

pub fn export_store(store: &ContractStore) -> String {
    let mut out = String::new();
    for (address, state) in store {
        let line = serde_json::to_string(&StoreEntryRef { address, state }).expect("store serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse_blocks(text: &str) -> Result<Vec<Block>, ChainDirError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| ChainDirError::Parse { file: CHAIN_FILE, line: i + 1, source })
        })
        .collect()
}

pub fn parse_store(text: &str) -> Result<ContractStore, ChainDirError> {
    let mut store = ContractStore::new();
    for (i, l) in text.lines().enumerate() {
        let e: StoreEntry =
            serde_json::from_str(l).map_err(|source| ChainDirError::Parse { file: STORE_FILE, line: i + 1, source })?;
        if store.insert(e.address, e.state).is_some() {
            return Err(ChainDirError::DuplicateContract(e.address));
        }
    }
    Ok(store)
}

pub fn parse_genesis(text: &str) -> Result<GenesisConfig, ChainDirError> {
    serde_json::from_str(text).map_err(|e| ChainDirError::Json(GENESIS_FILE, e))
}

/// Rebuilds a chain from exported text. Does not verify it.
pub fn chain_from_text(genesis: &str, blocks: &str, store: &str) -> Result<ChainState, ChainDirError> {
    Ok(ChainState::from_parts(parse_genesis(genesis)?, parse_blocks(blocks)?, parse_store(store)?)?)
}

fn read(path: &Path) -> Result<String, ChainDirError> {
    fs::read_to_string(path).map_err(|source| ChainDirError::Io { path: path.into(), source })
}

pub fn write(path: &Path, contents: &str) -> Result<(), ChainDirError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| ChainDirError::Io { path: parent.into(), source })?;
    }
    fs::write(path, contents).map_err(|source| ChainDirError::Io { path: path.into(), source })
}

pub fn exists(dir: &Path) -> bool {
    dir.join(GENESIS_FILE).exists() || dir.join(CHAIN_FILE).exists()
}

pub fn save(dir: &Path, chain: &ChainState, force: bool) -> Result<(), ChainDirError> {
    if exists(dir) && !force {
        return Err(ChainDirError::Exists(dir.into()));
    }
    let mut genesis = serde_json::to_string_pretty(chain.config()).expect("config serializes");
    genesis.push('\n');
    write(&dir.join(GENESIS_FILE), &genesis)?;
    write(&dir.join(CHAIN_FILE), &export_blocks(chain.blocks()))?;
    write(&dir.join(STORE_FILE), &export_store(chain.store()))
}

pub fn load(dir: &Path) -> Result<ChainState, ChainDirError> {
    chain_from_text(&read(&dir.join(GENESIS_FILE))?, &read(&dir.join(CHAIN_FILE))?, &read(&dir.join(STORE_FILE))?)
}

pub fn read_genesis(path: &Path) -> Result<GenesisConfig, ChainDirError> {
    parse_genesis(&read(path)?)
}

pub fn read_text(path: &Path) -> Result<String, ChainDirError> {
    read(path)
}
