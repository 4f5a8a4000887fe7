use serde::Serialize;
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// 16 hex digits of the SHA-256 of the compact JSON form of `value`.
pub fn config_hash(value: &impl Serialize) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    hex(&Sha256::digest(&json)[..8])
}

/// Git-style object hash: SHA-256 of `"blob <len>\0"` followed by the bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex(&h.finalize())
}
