//! RGB to color-name assignment by nearest prototype.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const COLOR_NAME_COUNT: usize = 11;

pub const COLOR_NAMES: [&str; COLOR_NAME_COUNT] = [
    "black", "blue", "brown", "gray", "green", "orange", "pink", "purple", "red", "white", "yellow",
];

const FORMAT_HEADER: &str = "# color-names v1";
const DEFAULT_TABLE: &str = include_str!("../../data/color_names.txt");

const CELL_SHIFT: u32 = 3;
const CELLS: usize = 256 >> CELL_SHIFT;

#[derive(Debug, Clone, PartialEq)]
pub struct ColorNameTable {
    prototypes: Vec<([i32; 3], usize)>,
    /// Per RGB cube cell, the prototypes that can be nearest to some color in
    /// it (in table order): `candidates[offsets[c]..offsets[c + 1]]`.
    offsets: Vec<u32>,
    candidates: Vec<u8>,
}

fn cell_candidates(prototypes: &[([i32; 3], usize)]) -> (Vec<u32>, Vec<u8>) {
    let side = 1i32 << CELL_SHIFT;
    let mut offsets = Vec::with_capacity(CELLS * CELLS * CELLS + 1);
    let mut candidates = Vec::new();
    offsets.push(0);
    for cr in 0..CELLS as i32 {
        for cg in 0..CELLS as i32 {
            for cb in 0..CELLS as i32 {
                let lo = [cr * side, cg * side, cb * side];
                let hi = lo.map(|v| v + side - 1);
                let near = |p: &[i32; 3]| -> i32 {
                    (0..3).map(|c| (lo[c] - p[c]).max(p[c] - hi[c]).max(0).pow(2)).sum()
                };
                let far = |p: &[i32; 3]| -> i32 { (0..3).map(|c| (p[c] - lo[c]).abs().max((p[c] - hi[c]).abs()).pow(2)).sum() };
                let bound = prototypes.iter().map(|(p, _)| far(p)).min().unwrap_or(0);
                for (i, (p, _)) in prototypes.iter().enumerate() {
                    if near(p) <= bound {
                        candidates.push(i as u8);
                    }
                }
                offsets.push(candidates.len() as u32);
            }
        }
    }
    (offsets, candidates)
}

impl ColorNameTable {
    /// Parses the `R G B name_index` text format. The first non-blank line
    /// must be the version header.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, why: &str| Error::data("color-name table", format!("line {line}: {why}"));
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == FORMAT_HEADER => {}
            _ => return Err(bad(1, "missing `# color-names v1` header")),
        }
        let mut prototypes = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            let fields: Vec<i64> = line
                .split_whitespace()
                .map(|f| f.parse::<i64>().map_err(|_| bad(i + 1, "non-integer field")))
                .collect::<Result<_>>()?;
            if fields.len() != 4 {
                return Err(bad(i + 1, "expected `R G B name_index`"));
            }
            if fields[..3].iter().any(|c| !(0..=255).contains(c)) {
                return Err(bad(i + 1, "color component outside 0..=255"));
            }
            if !(0..COLOR_NAME_COUNT as i64).contains(&fields[3]) {
                return Err(bad(i + 1, "name index outside 0..11"));
            }
            prototypes.push(([fields[0] as i32, fields[1] as i32, fields[2] as i32], fields[3] as usize));
        }
        if prototypes.is_empty() {
            return Err(bad(0, "no prototypes"));
        }
        if prototypes.len() > usize::from(u8::MAX) + 1 {
            return Err(bad(0, "at most 256 prototypes"));
        }
        let (offsets, candidates) = cell_candidates(&prototypes);
        Ok(Self { prototypes, offsets, candidates })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static ColorNameTable {
        static TABLE: OnceLock<ColorNameTable> = OnceLock::new();
        TABLE.get_or_init(|| ColorNameTable::parse(DEFAULT_TABLE).expect("bundled color-name table is valid"))
    }

    /// Name of the nearest prototype; ties go to the earlier table row.
    pub fn name_index(&self, rgb: [u8; 3]) -> usize {
        let cell = rgb.iter().fold(0usize, |acc, &c| acc * CELLS + (usize::from(c) >> CELL_SHIFT));
        let [r, g, b] = rgb.map(i32::from);
        let mut best = (i32::MAX, 0);
        for &i in &self.candidates[self.offsets[cell] as usize..self.offsets[cell + 1] as usize] {
            let (proto, name) = &self.prototypes[usize::from(i)];
            let (dr, dg, db) = (proto[0] - r, proto[1] - g, proto[2] - b);
            let d = dr * dr + dg * dg + db * db;
            if d < best.0 {
                best = (d, *name);
            }
        }
        best.1
    }

    /// Reference lookup scanning every prototype.
    #[cfg(test)]
    fn name_index_scan(&self, rgb: [u8; 3]) -> usize {
        let [r, g, b] = rgb.map(i32::from);
        let mut best = (i32::MAX, 0);
        for (proto, name) in &self.prototypes {
            let d = (proto[0] - r).pow(2) + (proto[1] - g).pow(2) + (proto[2] - b).pow(2);
            if d < best.0 {
                best = (d, *name);
            }
        }
        best.1
    }
}
