//! Binary model format.
//!
//! Little-endian, no padding:
//!
//! | field            | type              |
//! |------------------|-------------------|
//! | magic            | `b"DTAE"`         |
//! | version          | u32 (= 1)         |
//! | input_len        | u32               |
//! | hidden_len       | u32               |
//! | frame_len        | u32 (= input_len) |
//! | norm center      | f64               |
//! | norm half_range  | f64               |
//! | w1 (row-major)   | hidden × input f64|
//! | b1               | hidden f64        |
//! | w2 (row-major)   | input × hidden f64|

use alloc::vec::Vec;

use crate::audio::NormParams;
use crate::error::{Error, FormatError};
use crate::neural::Autoencoder;

pub const MAGIC: [u8; 4] = *b"DTAE";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 * 4 + 2 * 8;

pub fn encoded_len(input_len: usize, hidden_len: usize) -> Option<usize> {
    let size = input_len.checked_mul(hidden_len)?;
    let values = size.checked_mul(2)?.checked_add(hidden_len)?;
    values.checked_mul(8)?.checked_add(HEADER_LEN)
}

pub fn encode(model: &Autoencoder) -> Vec<u8> {
    let len = encoded_len(model.input_len(), model.hidden_len()).expect("model fits in memory");
    let mut out = Vec::with_capacity(len);
    out.extend_from_slice(&MAGIC);
    for v in [
        VERSION,
        model.input_len() as u32,
        model.hidden_len() as u32,
        model.frame_len() as u32,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&model.norm().center().to_le_bytes());
    out.extend_from_slice(&model.norm().half_range().to_le_bytes());
    for w in model.w1().iter().chain(model.b1()).chain(model.w2()) {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(FormatError::Truncated {
                needed: end,
                found: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &'static str) -> Result<Vec<f64>, FormatError> {
        let raw = self.take(n * 8)?;
        let v: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(FormatError::NonFinite(what))
        }
    }
}

pub fn decode(bytes: &[u8]) -> Result<Autoencoder, FormatError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let input_len = r.u32()?;
    let hidden_len = r.u32()?;
    let frame_len = r.u32()?;
    if input_len == 0 || hidden_len == 0 {
        return Err(FormatError::InvalidHeader("zero layer dimension"));
    }
    if frame_len != input_len {
        return Err(FormatError::InvalidHeader(
            "frame length differs from input length",
        ));
    }
    let overflow = FormatError::DimensionOverflow {
        input_len,
        hidden_len,
    };
    let (inputs, hidden) = (input_len as usize, hidden_len as usize);
    let total = encoded_len(inputs, hidden)
        .filter(|&n| n <= isize::MAX as usize)
        .ok_or(overflow)?;
    if bytes.len() < total {
        return Err(FormatError::Truncated {
            needed: total,
            found: bytes.len(),
        });
    }
    if bytes.len() > total {
        return Err(FormatError::TrailingBytes(bytes.len() - total));
    }
    let center = r.f64()?;
    let half_range = r.f64()?;
    let norm = NormParams::new(center, half_range)
        .map_err(|_| FormatError::InvalidHeader("normalization parameters out of range"))?;
    let w1 = r.f64s(inputs * hidden, "w1")?;
    let b1 = r.f64s(hidden, "b1")?;
    let w2 = r.f64s(inputs * hidden, "w2")?;
    Autoencoder::from_parts(inputs, hidden, w1, b1, w2, norm).map_err(|e| match e {
        Error::Format(f) => f,
        _ => FormatError::InvalidHeader("inconsistent parameter shapes"),
    })
}

impl Autoencoder {
    pub fn to_bytes(&self) -> Vec<u8> {
        encode(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        decode(bytes)
    }
}
