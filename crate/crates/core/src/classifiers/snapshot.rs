//! Versioned binary snapshots of classifier state.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | field                                  |
//! |-------|----------------------------------------|
//! | 4     | magic `CTMS`                           |
//! | 2     | format version (1)                     |
//! | 1     | kind: 1 = linear SVM, 2 = windowed KNN |
//! | 4     | feature length `d`                     |
//! | ...   | payload                                |
//!
//! SVM payload: `lambda: f64, trained_at: u64, bias: f64, weights: [f64; d]`.
//! KNN payload: `k: u32, window: u64, count: u64`, then per entry
//! `stamp: u64, label: i8 (+1 / -1), features: [f64; d]`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::knn::KnnModel;
use super::store::{Label, LabeledStore, Retention};
use super::svm::SvmModel;

const MAGIC: &[u8; 4] = b"CTMS";
const VERSION: u16 = 1;
const KIND_SVM: u8 = 1;
const KIND_KNN: u8 = 2;

fn snap_err(e: std::io::Error) -> Error {
    Error::Snapshot(e.to_string())
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0.read_exact(&mut b).map_err(snap_err)?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }

    fn header(&mut self, want_kind: u8) -> Result<usize> {
        if &self.bytes::<4>()? != MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let version = self.u16()?;
        if version != VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}")));
        }
        let kind = self.u8()?;
        if kind != want_kind {
            return Err(Error::Snapshot(format!("expected model kind {want_kind}, found {kind}")));
        }
        Ok(self.u32()? as usize)
    }
}

fn write_header(w: &mut impl Write, kind: u8, dim: usize) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    w.write_all(&(dim as u32).to_le_bytes())
}

impl SvmModel {
    pub fn write_snapshot(&self, mut w: impl Write) -> Result<()> {
        let mut go = || -> std::io::Result<()> {
            write_header(&mut w, KIND_SVM, self.weights.len())?;
            w.write_all(&self.lambda.to_le_bytes())?;
            w.write_all(&(self.trained_at as u64).to_le_bytes())?;
            w.write_all(&self.bias.to_le_bytes())?;
            for x in &self.weights {
                w.write_all(&x.to_le_bytes())?;
            }
            Ok(())
        };
        go().map_err(snap_err)
    }

    pub fn read_snapshot(r: impl Read) -> Result<Self> {
        let mut r = Reader(r);
        let dim = r.header(KIND_SVM)?;
        let lambda = r.f64()?;
        let trained_at = r.u64()? as usize;
        let bias = r.f64()?;
        let weights = r.f64s(dim)?;
        Ok(SvmModel { weights, bias, lambda, trained_at })
    }
}

impl KnnModel {
    pub fn write_snapshot(&self, mut w: impl Write) -> Result<()> {
        let store = self.store();
        let window = match store.retention() {
            Retention::Window(n) => n as u64,
            Retention::Unbounded => 0,
        };
        let mut go = || -> std::io::Result<()> {
            write_header(&mut w, KIND_KNN, store.dim())?;
            w.write_all(&(self.k() as u32).to_le_bytes())?;
            w.write_all(&window.to_le_bytes())?;
            w.write_all(&(store.len() as u64).to_le_bytes())?;
            for i in 0..store.len() {
                w.write_all(&(store.stamp(i) as u64).to_le_bytes())?;
                let label: i8 = if store.label(i).is_positive() { 1 } else { -1 };
                w.write_all(&label.to_le_bytes())?;
                for x in store.features(i) {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
            Ok(())
        };
        go().map_err(snap_err)
    }

    pub fn read_snapshot(r: impl Read) -> Result<Self> {
        let mut r = Reader(r);
        let dim = r.header(KIND_KNN)?;
        let k = r.u32()? as usize;
        if k == 0 {
            return Err(Error::Snapshot("k must be at least 1".into()));
        }
        let window = r.u64()? as usize;
        let retention = if window == 0 { Retention::Unbounded } else { Retention::Window(window) };
        let count = r.u64()? as usize;
        let mut store = LabeledStore::new(retention, dim);
        for _ in 0..count {
            let stamp = r.u64()? as usize;
            let label = match r.u8()? as i8 {
                1 => Label::Positive,
                -1 => Label::Negative,
                other => return Err(Error::Snapshot(format!("bad label byte {other}"))),
            };
            let f = FeatureVector::new(r.f64s(dim)?);
            store.push(stamp, &f, label);
        }
        Ok(KnnModel::from_parts(store, k))
    }
}
