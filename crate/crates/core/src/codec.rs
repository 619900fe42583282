//! Generation-based random linear network coding.
//!
//! The source combines every packet of its coding bucket with coefficients
//! drawn uniformly from GF(q). Intermediate nodes recombine whatever they
//! hold for a generation without decoding. The destination keeps the
//! received rows in reduced row echelon form, so the rank is known after
//! every reception and decoding is a lookup once the rank is full.
//!
//! Payloads are vectors of field symbols. With the default GF(256) a symbol
//! is one byte.

use rand::Rng;
use thiserror::Error;

use crate::field::GaloisField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("cannot encode an empty bucket")]
    EmptyBucket,
    #[error("nothing stored to recode")]
    NothingToRecode,
    #[error("payload length {found} differs from {expected}")]
    PayloadLength { expected: usize, found: usize },
    #[error("coefficient vector length {found} differs from generation size {expected}")]
    CoefficientLength { expected: usize, found: usize },
    #[error("packet of generation {found} offered to generation {expected}")]
    GenerationMismatch { expected: u64, found: u64 },
    #[error("symbol {0:#x} is outside the field")]
    SymbolOutOfRange(u16),
    #[error("rank {rank} of {size}: generation not decodable yet")]
    NotReady { rank: usize, size: usize },
}

/// An uncoded packet sitting in the coding bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePacket {
    /// Slot in which the packet was generated.
    pub stamp: u64,
    pub payload: Vec<u16>,
}

/// A linear combination of the packets of one generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub generation_id: u64,
    pub coeffs: Vec<u16>,
    pub payload: Vec<u16>,
    /// Newest source stamp in the generation.
    pub freshest_stamp: u64,
}

/// Draws a nonzero coefficient vector of length `k`.
fn nonzero_vector<R: Rng + ?Sized>(field: &GaloisField, k: usize, rng: &mut R) -> Vec<u16> {
    loop {
        let v: Vec<u16> = (0..k).map(|_| field.random(rng)).collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

fn check_bucket(field: &GaloisField, bucket: &[SourcePacket]) -> Result<usize, CodecError> {
    let first = bucket.first().ok_or(CodecError::EmptyBucket)?;
    let len = first.payload.len();
    for p in bucket {
        if p.payload.len() != len {
            return Err(CodecError::PayloadLength { expected: len, found: p.payload.len() });
        }
        if let Some(&s) = p.payload.iter().find(|&&s| !field.contains(s)) {
            return Err(CodecError::SymbolOutOfRange(s));
        }
    }
    Ok(len)
}

/// Encodes the bucket with uniformly random coefficients (all-zero redrawn).
pub fn encode<R: Rng + ?Sized>(
    field: &GaloisField,
    generation_id: u64,
    bucket: &[SourcePacket],
    rng: &mut R,
) -> Result<CodedPacket, CodecError> {
    check_bucket(field, bucket)?;
    let coeffs = nonzero_vector(field, bucket.len(), rng);
    encode_with_coeffs(field, generation_id, bucket, coeffs)
}

/// Encodes the bucket with caller-chosen coefficients.
pub fn encode_with_coeffs(
    field: &GaloisField,
    generation_id: u64,
    bucket: &[SourcePacket],
    coeffs: Vec<u16>,
) -> Result<CodedPacket, CodecError> {
    let len = check_bucket(field, bucket)?;
    if coeffs.len() != bucket.len() {
        return Err(CodecError::CoefficientLength { expected: bucket.len(), found: coeffs.len() });
    }
    if let Some(&c) = coeffs.iter().find(|&&c| !field.contains(c)) {
        return Err(CodecError::SymbolOutOfRange(c));
    }
    let mut payload = vec![0u16; len];
    for (p, &c) in bucket.iter().zip(&coeffs) {
        field.mul_add_into(&mut payload, &p.payload, c);
    }
    let freshest_stamp = bucket.iter().map(|p| p.stamp).max().unwrap_or(0);
    Ok(CodedPacket { generation_id, coeffs, payload, freshest_stamp })
}

/// Random combination of rows given as (coeffs, payload) pairs.
fn combine<'a, R, I>(
    field: &GaloisField,
    rows: I,
    width: usize,
    payload_len: usize,
    rng: &mut R,
) -> (Vec<u16>, Vec<u16>)
where
    R: Rng + ?Sized,
    I: Iterator<Item = (&'a [u16], &'a [u16])> + Clone,
{
    let n = rows.clone().count();
    let weights = nonzero_vector(field, n, rng);
    let mut coeffs = vec![0u16; width];
    let mut payload = vec![0u16; payload_len];
    for ((c, p), &w) in rows.zip(&weights) {
        field.mul_add_into(&mut coeffs, c, w);
        field.mul_add_into(&mut payload, p, w);
    }
    (coeffs, payload)
}

/// Recombines stored coded packets of one generation without decoding.
pub fn recode<R: Rng + ?Sized>(
    field: &GaloisField,
    stored: &[CodedPacket],
    rng: &mut R,
) -> Result<CodedPacket, CodecError> {
    let first = stored.first().ok_or(CodecError::NothingToRecode)?;
    let (width, len) = (first.coeffs.len(), first.payload.len());
    for p in stored {
        if p.generation_id != first.generation_id {
            return Err(CodecError::GenerationMismatch {
                expected: first.generation_id,
                found: p.generation_id,
            });
        }
        if p.coeffs.len() != width {
            return Err(CodecError::CoefficientLength { expected: width, found: p.coeffs.len() });
        }
        if p.payload.len() != len {
            return Err(CodecError::PayloadLength { expected: len, found: p.payload.len() });
        }
    }
    let rows = stored.iter().map(|p| (p.coeffs.as_slice(), p.payload.as_slice()));
    let (coeffs, payload) = combine(field, rows, width, len, rng);
    Ok(CodedPacket {
        generation_id: first.generation_id,
        coeffs,
        payload,
        freshest_stamp: stored.iter().map(|p| p.freshest_stamp).max().unwrap_or(0),
    })
}

#[derive(Debug, Clone)]
struct Row {
    pivot: usize,
    coeffs: Vec<u16>,
    payload: Vec<u16>,
}

/// Incremental Gaussian elimination for one generation.
///
/// Rows are kept fully reduced: every pivot column is zero in all other rows.
/// Relays use the same structure as their packet store, which bounds the
/// memory of a relay to one row per degree of freedom.
#[derive(Debug, Clone)]
pub struct DecoderState {
    generation_id: u64,
    size: usize,
    payload_len: Option<usize>,
    rows: Vec<Row>,
    freshest_stamp: Option<u64>,
    received: u64,
    dependent: u64,
}

impl DecoderState {
    pub fn new(generation_id: u64, size: usize) -> Self {
        Self {
            generation_id,
            size,
            payload_len: None,
            rows: Vec::with_capacity(size),
            freshest_stamp: None,
            received: 0,
            dependent: 0,
        }
    }

    pub fn generation_id(&self) -> u64 {
        self.generation_id
    }

    /// Generation size, i.e. the rank needed to decode.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.size
    }

    /// Packets ingested, including non-innovative ones.
    pub fn received(&self) -> u64 {
        self.received
    }

    /// Packets that did not increase the rank.
    pub fn dependent(&self) -> u64 {
        self.dependent
    }

    pub fn freshest_stamp(&self) -> Option<u64> {
        self.freshest_stamp
    }

    /// Grows the generation to `new_size` columns, padding stored rows with
    /// zeros. Used when packets join a bucket that is already in flight.
    pub fn extend(&mut self, new_size: usize) {
        if new_size <= self.size {
            return;
        }
        for row in &mut self.rows {
            row.coeffs.resize(new_size, 0);
        }
        self.size = new_size;
    }

    /// Row-reduces `p` into the state and returns the new rank.
    pub fn ingest(&mut self, field: &GaloisField, p: &CodedPacket) -> Result<usize, CodecError> {
        if p.generation_id != self.generation_id {
            return Err(CodecError::GenerationMismatch {
                expected: self.generation_id,
                found: p.generation_id,
            });
        }
        if p.coeffs.len() != self.size {
            return Err(CodecError::CoefficientLength { expected: self.size, found: p.coeffs.len() });
        }
        match self.payload_len {
            Some(len) if len != p.payload.len() => {
                return Err(CodecError::PayloadLength { expected: len, found: p.payload.len() });
            }
            _ => self.payload_len = Some(p.payload.len()),
        }
        self.received += 1;
        self.freshest_stamp = Some(self.freshest_stamp.map_or(p.freshest_stamp, |s| s.max(p.freshest_stamp)));

        let mut coeffs = p.coeffs.clone();
        let mut payload = p.payload.clone();
        for row in &self.rows {
            let f = coeffs[row.pivot];
            if f != 0 {
                field.mul_add_into(&mut coeffs, &row.coeffs, f);
                field.mul_add_into(&mut payload, &row.payload, f);
            }
        }
        let Some(pivot) = coeffs.iter().position(|&c| c != 0) else {
            self.dependent += 1;
            return Ok(self.rank());
        };
        let inv = field.inv(coeffs[pivot]);
        field.scale(&mut coeffs, inv);
        field.scale(&mut payload, inv);
        for row in &mut self.rows {
            let f = row.coeffs[pivot];
            if f != 0 {
                field.mul_add_into(&mut row.coeffs, &coeffs, f);
                field.mul_add_into(&mut row.payload, &payload, f);
            }
        }
        self.rows.push(Row { pivot, coeffs, payload });
        Ok(self.rank())
    }

    /// Original payloads in bucket order.
    pub fn solve(&self) -> Result<Vec<Vec<u16>>, CodecError> {
        if !self.is_complete() {
            return Err(CodecError::NotReady { rank: self.rank(), size: self.size });
        }
        let mut out = vec![Vec::new(); self.size];
        for row in &self.rows {
            out[row.pivot] = row.payload.clone();
        }
        Ok(out)
    }

    /// Random combination of the stored rows, tagged with this generation.
    pub fn recode<R: Rng + ?Sized>(
        &self,
        field: &GaloisField,
        rng: &mut R,
    ) -> Result<CodedPacket, CodecError> {
        if self.rows.is_empty() {
            return Err(CodecError::NothingToRecode);
        }
        let rows = self.rows.iter().map(|r| (r.coeffs.as_slice(), r.payload.as_slice()));
        let (coeffs, payload) =
            combine(field, rows, self.size, self.payload_len.unwrap_or(0), rng);
        Ok(CodedPacket {
            generation_id: self.generation_id,
            coeffs,
            payload,
            freshest_stamp: self.freshest_stamp.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bucket(rng: &mut ChaCha8Rng, k: usize, len: usize) -> Vec<SourcePacket> {
        (0..k)
            .map(|i| SourcePacket {
                stamp: i as u64,
                payload: (0..len).map(|_| rng.random_range(0..256u16)).collect(),
            })
            .collect()
    }

    fn unit(k: usize, i: usize) -> Vec<u16> {
        let mut v = vec![0; k];
        v[i] = 1;
        v
    }

    #[test]
    fn single_packet_combination() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = bucket(&mut rng, 1, 12);
        let p = encode(&f, 0, &b, &mut rng).unwrap();
        assert_eq!(p.coeffs.len(), 1);
        let c = p.coeffs[0];
        assert_ne!(c, 0);
        let expect: Vec<u16> = b[0].payload.iter().map(|&x| f.mul(x, c)).collect();
        assert_eq!(p.payload, expect);

        let mut dec = DecoderState::new(0, 1);
        dec.ingest(&f, &p).unwrap();
        assert_eq!(dec.solve().unwrap()[0], b[0].payload);
    }

    #[test]
    fn unit_coefficients_reproduce_originals() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = bucket(&mut rng, 3, 8);
        let mut dec = DecoderState::new(5, 3);
        for i in 0..3 {
            let p = encode_with_coeffs(&f, 5, &b, unit(3, i)).unwrap();
            assert_eq!(p.payload, b[i].payload);
            assert_eq!(p.freshest_stamp, 2);
            assert_eq!(dec.ingest(&f, &p).unwrap(), i + 1);
        }
        assert_eq!(dec.solve().unwrap(), b.iter().map(|p| p.payload.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn encode_errors() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(encode(&f, 0, &[], &mut rng), Err(CodecError::EmptyBucket));
        let mut b = bucket(&mut rng, 2, 4);
        b[1].payload.push(0);
        assert!(matches!(encode(&f, 0, &b, &mut rng), Err(CodecError::PayloadLength { .. })));
        let g16 = GaloisField::new(crate::field::FieldSpec::gf16());
        let b = vec![SourcePacket { stamp: 0, payload: vec![16] }];
        assert_eq!(encode(&g16, 0, &b, &mut rng), Err(CodecError::SymbolOutOfRange(16)));
    }

    #[test]
    fn duplicate_row_is_dependent() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = bucket(&mut rng, 4, 6);
        let p = encode(&f, 0, &b, &mut rng).unwrap();
        let mut dec = DecoderState::new(0, 4);
        assert_eq!(dec.ingest(&f, &p).unwrap(), 1);
        assert_eq!(dec.ingest(&f, &p).unwrap(), 1);
        assert_eq!(dec.dependent(), 1);
        assert_eq!(dec.received(), 2);
    }

    #[test]
    fn ingest_errors_and_not_ready() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = bucket(&mut rng, 2, 3);
        let p = encode(&f, 7, &b, &mut rng).unwrap();
        let mut dec = DecoderState::new(8, 2);
        assert!(matches!(dec.ingest(&f, &p), Err(CodecError::GenerationMismatch { .. })));
        let mut dec = DecoderState::new(7, 3);
        assert!(matches!(dec.ingest(&f, &p), Err(CodecError::CoefficientLength { .. })));
        let mut dec = DecoderState::new(7, 2);
        dec.ingest(&f, &p).unwrap();
        assert_eq!(dec.solve(), Err(CodecError::NotReady { rank: 1, size: 2 }));
    }

    #[test]
    fn recode_single_is_scaled_copy() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = bucket(&mut rng, 3, 5);
        let p = encode(&f, 1, &b, &mut rng).unwrap();
        let r = recode(&f, std::slice::from_ref(&p), &mut rng).unwrap();
        let c = f.div(r.coeffs[0], p.coeffs[0]);
        assert_ne!(c, 0);
        for (x, y) in p.coeffs.iter().chain(&p.payload).zip(r.coeffs.iter().chain(&r.payload)) {
            assert_eq!(f.mul(*x, c), *y);
        }
    }

    #[test]
    fn recode_stays_in_span() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = bucket(&mut rng, 5, 4);
        let stored: Vec<_> = (0..2).map(|_| encode(&f, 0, &b, &mut rng).unwrap()).collect();
        for _ in 0..10 {
            let r = recode(&f, &stored, &mut rng).unwrap();
            let mut alone = DecoderState::new(0, 5);
            alone.ingest(&f, &r).unwrap();
            assert!(alone.rank() <= 2);
            let mut relay = DecoderState::new(0, 5);
            for s in &stored {
                relay.ingest(&f, s).unwrap();
            }
            let before = relay.rank();
            relay.ingest(&f, &r).unwrap();
            assert_eq!(relay.rank(), before);
        }
        let mixed = vec![stored[0].clone(), CodedPacket { generation_id: 9, ..stored[1].clone() }];
        assert!(matches!(recode(&f, &mixed, &mut rng), Err(CodecError::GenerationMismatch { .. })));
        assert_eq!(recode(&f, &[], &mut rng), Err(CodecError::NothingToRecode));
    }

    #[test]
    fn relay_roundtrip_through_recoding() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let k = rng.random_range(1..=8usize);
            let b = bucket(&mut rng, k, 6);
            let mut relay = DecoderState::new(3, k);
            while !relay.is_complete() {
                relay.ingest(&f, &encode(&f, 3, &b, &mut rng).unwrap()).unwrap();
            }
            let mut dst = DecoderState::new(3, k);
            while !dst.is_complete() {
                dst.ingest(&f, &relay.recode(&f, &mut rng).unwrap()).unwrap();
            }
            assert_eq!(dst.solve().unwrap(), b.iter().map(|p| p.payload.clone()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn full_rank_frequency_k4() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut full = 0;
        for _ in 0..1000 {
            let b = bucket(&mut rng, 4, 2);
            let mut dec = DecoderState::new(0, 4);
            for _ in 0..4 {
                dec.ingest(&f, &encode(&f, 0, &b, &mut rng).unwrap()).unwrap();
            }
            full += dec.is_complete() as u32;
        }
        assert!(full as f64 / 1000.0 >= 0.98, "{full}");
    }

    #[test]
    fn extra_receptions_k8() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let trials = 10_000;
        let mut extra = 0u64;
        for _ in 0..trials {
            let b = bucket(&mut rng, 8, 1);
            let mut dec = DecoderState::new(0, 8);
            while !dec.is_complete() {
                dec.ingest(&f, &encode(&f, 0, &b, &mut rng).unwrap()).unwrap();
            }
            extra += dec.received() - 8;
        }
        assert!(extra as f64 / trials as f64 <= 0.01);
    }

    #[test]
    fn extend_pads_rows() {
        let f = GaloisField::gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b = bucket(&mut rng, 3, 4);
        let mut dec = DecoderState::new(0, 2);
        dec.ingest(&f, &encode(&f, 0, &b[..2], &mut rng).unwrap()).unwrap();
        dec.extend(3);
        while !dec.is_complete() {
            dec.ingest(&f, &encode(&f, 0, &b, &mut rng).unwrap()).unwrap();
        }
        assert_eq!(dec.solve().unwrap(), b.iter().map(|p| p.payload.clone()).collect::<Vec<_>>());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roundtrip_any_k(k in 1usize..=32, len in 0usize..24, seed in any::<u64>()) {
            let f = GaloisField::gf256();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = bucket(&mut rng, k, len);
            let mut dec = DecoderState::new(0, k);
            let mut last = 0;
            while !dec.is_complete() {
                let rank = dec.ingest(&f, &encode(&f, 0, &b, &mut rng).unwrap()).unwrap();
                prop_assert!(rank >= last && rank <= k);
                last = rank;
            }
            prop_assert_eq!(dec.solve().unwrap(), b.iter().map(|p| p.payload.clone()).collect::<Vec<_>>());
        }

        #[test]
        fn recoded_never_adds_rank(k in 1usize..=12, held in 1usize..=12, seed in any::<u64>()) {
            let f = GaloisField::gf256();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = bucket(&mut rng, k, 3);
            let mut relay = DecoderState::new(0, k);
            for _ in 0..held {
                relay.ingest(&f, &encode(&f, 0, &b, &mut rng).unwrap()).unwrap();
            }
            let mut dst = relay.clone();
            for _ in 0..5 {
                let before = dst.rank();
                dst.ingest(&f, &relay.recode(&f, &mut rng).unwrap()).unwrap();
                prop_assert_eq!(dst.rank(), before);
            }
        }
    }
}
