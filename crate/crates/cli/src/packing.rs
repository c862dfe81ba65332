//! Byte/symbol packing for file payloads.
//!
//! Input bytes map to field symbols small enough for the target field:
//! whole bytes for w >= 8, nibbles for w in 4..8, two-bit groups below
//! that. On disk each symbol occupies one byte (two for w > 8), so a
//! GF(256) stripe stores data nodes as the raw file bytes while narrow
//! fields trade space for the published coefficient tables.

use htlrc_core::field::FieldElement;

/// How many input data symbols one file byte becomes.
pub fn symbols_per_byte(w: u32) -> usize {
    if w >= 8 {
        1
    } else if w >= 4 {
        2
    } else {
        4
    }
}

/// Bytes one symbol occupies in a substripe file.
pub fn stored_bytes_per_symbol(w: u32) -> usize {
    if w > 8 {
        2
    } else {
        1
    }
}

/// Splits file bytes into field symbols (most significant group first).
pub fn bytes_to_symbols(bytes: &[u8], w: u32) -> Vec<FieldElement> {
    match symbols_per_byte(w) {
        1 => bytes.iter().map(|&b| b as FieldElement).collect(),
        2 => bytes
            .iter()
            .flat_map(|&b| [(b >> 4) as FieldElement, (b & 0x0f) as FieldElement])
            .collect(),
        _ => bytes
            .iter()
            .flat_map(|&b| {
                [
                    (b >> 6) as FieldElement,
                    ((b >> 4) & 3) as FieldElement,
                    ((b >> 2) & 3) as FieldElement,
                    (b & 3) as FieldElement,
                ]
            })
            .collect(),
    }
}

/// Inverse of [`bytes_to_symbols`]; symbol count must be a multiple of
/// [`symbols_per_byte`].
pub fn symbols_to_bytes(symbols: &[FieldElement], w: u32) -> Vec<u8> {
    match symbols_per_byte(w) {
        1 => symbols.iter().map(|&s| s as u8).collect(),
        2 => symbols
            .chunks(2)
            .map(|c| ((c[0] as u8) << 4) | (c.get(1).copied().unwrap_or(0) as u8))
            .collect(),
        _ => symbols
            .chunks(4)
            .map(|c| {
                let get = |i: usize| c.get(i).copied().unwrap_or(0) as u8;
                (get(0) << 6) | (get(1) << 4) | (get(2) << 2) | get(3)
            })
            .collect(),
    }
}

/// Serializes one payload for a substripe file.
pub fn payload_to_file_bytes(payload: &[FieldElement], w: u32) -> Vec<u8> {
    if stored_bytes_per_symbol(w) == 1 {
        payload.iter().map(|&s| s as u8).collect()
    } else {
        payload.iter().flat_map(|&s| s.to_le_bytes()).collect()
    }
}

/// Parses a substripe file back into a payload.
pub fn file_bytes_to_payload(bytes: &[u8], w: u32) -> Vec<FieldElement> {
    if stored_bytes_per_symbol(w) == 1 {
        bytes.iter().map(|&b| b as FieldElement).collect()
    } else {
        bytes
            .chunks(2)
            .map(|c| u16::from_le_bytes([c[0], c.get(1).copied().unwrap_or(0)]))
            .collect()
    }
}
