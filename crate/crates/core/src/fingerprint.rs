//! Short content checksums used to tie derived artifacts to their inputs.

use sha2::{Digest, Sha256};

/// Number of hex digits kept from the SHA-256 digest.
pub const FINGERPRINT_LEN: usize = 16;

/// Accumulates named byte blobs into one fingerprint.
#[derive(Default)]
pub struct Fingerprinter {
    hasher: Sha256,
}

impl Fingerprinter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, bytes: &[u8]) {
        self.hasher.update((name.len() as u64).to_le_bytes());
        self.hasher.update(name.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn finish(self) -> String {
        let digest = self.hasher.finalize();
        hex::encode(digest)[..FINGERPRINT_LEN].to_string()
    }
}

/// Fingerprint of a single byte slice.
pub fn of_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(digest)[..FINGERPRINT_LEN].to_string()
}

/// Fingerprint of a file's contents.
pub fn of_file(path: &std::path::Path) -> std::io::Result<String> {
    Ok(of_bytes(&std::fs::read(path)?))
}
