//! Binary sketch files. Every field is a little-endian 64-bit integer or
//! float.
//!
//! Single sketch (`RSKSDD01`, or `RSKPSD01` for the PSD sketch):
//!
//! ```text
//! magic[8] version n s t eps beta seed
//! diag[n]
//! s_tilde[3t·s·n]            row-major
//! kappa kernel_count kernel[kernel_count][n]
//! ```
//!
//! The PSD record stores `diag(A)` and writes `beta = 0`. A boosted file
//! (`RSKBST01`) holds `version K n m`, the `m` edges as index pairs, the `n`
//! original vertex ids, then `K` embedded single-sketch records.

use std::path::Path;

use resket_core::psd::PsdParts;
use resket_core::sketch::SketchParts;
use resket_core::{BoostedResistanceSketch, PsdSketch, SpectralSketch};

pub const SDD_MAGIC: [u8; 8] = *b"RSKSDD01";
pub const PSD_MAGIC: [u8; 8] = *b"RSKPSD01";
pub const BOOSTED_MAGIC: [u8; 8] = *b"RSKBST01";
pub const VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported format version {0}")]
    Version(u64),
    #[error("file truncated at byte {offset}: need {needed} more bytes")]
    Truncated { offset: usize, needed: usize },
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("inconsistent sketch record: {0}")]
    Invalid(#[from] resket_core::Error),
    #[error("field `{0}` does not fit in memory")]
    Oversized(&'static str),
}

type FResult<T> = Result<T, FormatError>;

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.0.reserve(8 * v.len());
        for x in v {
            self.f64(*x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> FResult<&'a [u8]> {
        let rest = self.buf.len() - self.pos;
        if rest < len {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: len - rest,
            });
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }
    fn magic(&mut self, expected: [u8; 8]) -> FResult<()> {
        let found = self.take(8)?;
        if found != expected {
            return Err(FormatError::BadMagic {
                expected: String::from_utf8_lossy(&expected).into_owned(),
                found: String::from_utf8_lossy(found).into_owned(),
            });
        }
        let v = self.u64()?;
        if v != VERSION {
            return Err(FormatError::Version(v));
        }
        Ok(())
    }
    fn u64(&mut self) -> FResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self, name: &'static str) -> FResult<usize> {
        usize::try_from(self.u64()?).map_err(|_| FormatError::Oversized(name))
    }
    fn f64(&mut self) -> FResult<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// Checks the byte budget before allocating.
    fn f64s(&mut self, count: usize, name: &'static str) -> FResult<Vec<f64>> {
        let bytes = count.checked_mul(8).ok_or(FormatError::Oversized(name))?;
        Ok(self.take(bytes)?.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
    fn finish(&self) -> FResult<()> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            k => Err(FormatError::TrailingBytes(k)),
        }
    }
}

fn rows_times_n(s: usize, t: usize, n: usize) -> FResult<usize> {
    s.checked_mul(3)
        .and_then(|v| v.checked_mul(t))
        .and_then(|v| v.checked_mul(n))
        .ok_or(FormatError::Oversized("s_tilde"))
}

fn write_kernel(w: &mut Writer, kernel: &[Vec<f64>]) {
    w.usize(kernel.len());
    for k in kernel {
        w.f64s(k);
    }
}

fn read_kernel(r: &mut Reader, n: usize) -> FResult<Vec<Vec<f64>>> {
    let count = r.usize("kernel")?;
    if count > n {
        return Err(FormatError::Oversized("kernel"));
    }
    (0..count).map(|_| r.f64s(n, "kernel")).collect()
}

fn write_sdd(w: &mut Writer, sk: &SpectralSketch) {
    let p = sk.to_parts();
    w.0.extend_from_slice(&SDD_MAGIC);
    w.u64(VERSION);
    w.usize(p.n);
    w.usize(p.s);
    w.usize(p.t);
    w.f64(p.eps);
    w.f64(p.beta);
    w.u64(p.seed);
    w.f64s(&p.diag);
    w.f64s(&p.s_tilde);
    w.f64(p.kappa_bar);
    write_kernel(w, &p.kernel);
}

fn read_sdd(r: &mut Reader) -> FResult<SpectralSketch> {
    r.magic(SDD_MAGIC)?;
    let n = r.usize("n")?;
    let s = r.usize("s")?;
    let t = r.usize("t")?;
    let eps = r.f64()?;
    let beta = r.f64()?;
    let seed = r.u64()?;
    let diag = r.f64s(n, "diag")?;
    let s_tilde = r.f64s(rows_times_n(s, t, n)?, "s_tilde")?;
    let kappa_bar = r.f64()?;
    let kernel = read_kernel(r, n)?;
    Ok(SpectralSketch::from_parts(SketchParts {
        n,
        s,
        t,
        eps,
        beta,
        seed,
        diag,
        s_tilde,
        kappa_bar,
        kernel,
    })?)
}

pub fn encode_sketch(sk: &SpectralSketch) -> Vec<u8> {
    let mut w = Writer::default();
    write_sdd(&mut w, sk);
    w.0
}

pub fn decode_sketch(bytes: &[u8]) -> FResult<SpectralSketch> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let sk = read_sdd(&mut r)?;
    r.finish()?;
    Ok(sk)
}

pub fn encode_psd(sk: &PsdSketch) -> Vec<u8> {
    let p = sk.to_parts();
    let mut w = Writer::default();
    w.0.extend_from_slice(&PSD_MAGIC);
    w.u64(VERSION);
    w.usize(p.n);
    w.usize(p.s);
    w.usize(p.t);
    w.f64(p.eps);
    w.f64(0.0);
    w.u64(p.seed);
    w.f64s(&p.diag);
    w.f64s(&p.sa);
    w.f64(p.kappa);
    write_kernel(&mut w, &p.kernel);
    w.0
}

pub fn decode_psd(bytes: &[u8]) -> FResult<PsdSketch> {
    let mut r = Reader { buf: bytes, pos: 0 };
    r.magic(PSD_MAGIC)?;
    let n = r.usize("n")?;
    let s = r.usize("s")?;
    let t = r.usize("t")?;
    let eps = r.f64()?;
    let _beta = r.f64()?;
    let seed = r.u64()?;
    let diag = r.f64s(n, "diag")?;
    let sa = r.f64s(rows_times_n(s, t, n)?, "sa")?;
    let kappa = r.f64()?;
    let kernel = read_kernel(&mut r, n)?;
    r.finish()?;
    Ok(PsdSketch::from_parts(PsdParts {
        n,
        s,
        t,
        eps,
        seed,
        diag,
        sa,
        kappa,
        kernel,
    })?)
}

/// `ids` are the original vertex ids, one per vertex.
pub fn encode_boosted(sk: &BoostedResistanceSketch, ids: &[u64]) -> Vec<u8> {
    assert_eq!(ids.len(), sk.n(), "one id per vertex");
    let mut w = Writer::default();
    w.0.extend_from_slice(&BOOSTED_MAGIC);
    w.u64(VERSION);
    w.usize(sk.copies().len());
    w.usize(sk.n());
    w.usize(sk.edges().len());
    for &(u, v) in sk.edges() {
        w.usize(u);
        w.usize(v);
    }
    for &id in ids {
        w.u64(id);
    }
    for c in sk.copies() {
        write_sdd(&mut w, c);
    }
    w.0
}

pub fn decode_boosted(bytes: &[u8]) -> FResult<(BoostedResistanceSketch, Vec<u64>)> {
    let mut r = Reader { buf: bytes, pos: 0 };
    r.magic(BOOSTED_MAGIC)?;
    let k = r.usize("copies")?;
    let n = r.usize("n")?;
    let m = r.usize("edges")?;
    // each edge and id costs at least 8 bytes, so a bogus count fails on take
    let mut edges = Vec::new();
    for _ in 0..m {
        edges.push((r.usize("edge")?, r.usize("edge")?));
    }
    let mut ids = Vec::new();
    for _ in 0..n {
        ids.push(r.u64()?);
    }
    let mut copies = Vec::new();
    for _ in 0..k {
        copies.push(read_sdd(&mut r)?);
    }
    r.finish()?;
    Ok((BoostedResistanceSketch::from_parts(n, edges, copies)?, ids))
}

/// Which record type a file holds, from its magic.
pub fn sniff(bytes: &[u8]) -> Option<[u8; 8]> {
    bytes.get(..8).map(|m| m.try_into().unwrap())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    std::fs::write(path, bytes)
}
