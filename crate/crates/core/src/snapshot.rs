//! Binary state snapshots.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 8    | magic `b"CHEMSNAP"`             |
//! | 8      | 4    | format version (`u32`, = 1)     |
//! | 12     | 4    | dimension (`u32`, 1 or 2)       |
//! | 16     | 16   | cells per axis (`u64` x 2)      |
//! | 32     | 16   | extents per axis (`f64` x 2)    |
//! | 48     | 8    | time `t` (`f64`)                |
//! | 56     | 8    | step count (`u64`)              |
//! | 64     | 8N   | `u`, row-major, `x` fastest     |
//! | ...    | 8N   | `v`                             |
//! | ...    | 8N   | `w`                             |
//!
//! For 1D grids the second axis is stored as one cell of extent 1.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};

pub const MAGIC: &[u8; 8] = b"CHEMSNAP";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

pub fn encode(grid: &Grid, state: &SimState) -> Result<Vec<u8>> {
    for f in [&state.u, &state.v, &state.w] {
        grid.check_aligned(f)?;
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 24 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for c in grid.cells() {
        out.extend_from_slice(&(c as u64).to_le_bytes());
    }
    for l in grid.lengths() {
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&state.t.to_le_bytes());
    out.extend_from_slice(&state.step_count.to_le_bytes());
    for f in [&state.u, &state.v, &state.w] {
        for x in f.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    Ok(out)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Validation(format!("snapshot: {}", msg.into()))
}

pub fn decode(bytes: &[u8]) -> Result<(Grid, SimState)> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(bad("missing magic header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let dim = u32_at(12) as usize;
    let cells = [u64_at(16) as usize, u64_at(24) as usize];
    let grid = Grid::new(dim, cells, [f64_at(32), f64_at(40)])?;
    let n = grid.len();
    if bytes.len() != HEADER_LEN + 24 * n {
        return Err(bad(format!("expected {} bytes, found {}", HEADER_LEN + 24 * n, bytes.len())));
    }
    let field = |k: usize| -> Vec<f64> {
        let start = HEADER_LEN + 8 * n * k;
        (0..n).map(|i| f64_at(start + 8 * i)).collect()
    };
    let mut state = SimState::new(field(0), field(1), field(2));
    state.t = f64_at(48);
    state.step_count = u64_at(56);
    Ok((grid, state))
}

pub fn write(path: &Path, grid: &Grid, state: &SimState) -> Result<()> {
    std::fs::write(path, encode(grid, state)?).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<(Grid, SimState)> {
    decode(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = Grid::new_1d(4, 2.0).unwrap();
        let mut s = SimState::new(vec![1.0; 4], vec![2.0; 4], vec![3.0; 4]);
        s.t = 0.5;
        s.step_count = 7;
        let b = encode(&g, &s).unwrap();
        assert_eq!(b.len(), 64 + 96);
        assert_eq!(&b[..8], b"CHEMSNAP");
        assert_eq!(b[8..12], 1u32.to_le_bytes());
        assert_eq!(b[12..16], 1u32.to_le_bytes());
        assert_eq!(b[16..24], 4u64.to_le_bytes());
        assert_eq!(b[24..32], 1u64.to_le_bytes());
        assert_eq!(b[32..40], 2.0f64.to_le_bytes());
        assert_eq!(b[48..56], 0.5f64.to_le_bytes());
        assert_eq!(b[56..64], 7u64.to_le_bytes());
        assert_eq!(b[64..72], 1.0f64.to_le_bytes());
        assert_eq!(b[64 + 32..64 + 40], 2.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_corruption() {
        let g = Grid::new_1d(4, 1.0).unwrap();
        let s = SimState::new(vec![1.0; 4], vec![1.0; 4], vec![1.0; 4]);
        let mut b = encode(&g, &s).unwrap();
        assert!(decode(&b[..100]).is_err());
        b[8] = 9;
        assert!(decode(&b).is_err());
        b[0] = b'X';
        assert!(decode(&b).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            nx in 4usize..12,
            ny in 4usize..9,
            two_d in any::<bool>(),
            seed in any::<u64>(),
            t in 0.0f64..100.0,
        ) {
            let g = if two_d { Grid::new_2d(nx, ny, 1.5, 0.5).unwrap() } else { Grid::new_1d(nx, 3.0).unwrap() };
            let n = g.len();
            let gen = |k: u64| -> Vec<f64> {
                (0..n as u64).map(|i| f64::from_bits((seed ^ (i * 0x9E37_79B9 + k)) >> 2)).collect()
            };
            let mut s = SimState::new(gen(1), gen(2), gen(3));
            s.t = t;
            s.step_count = seed >> 20;
            let (g2, s2) = decode(&encode(&g, &s).unwrap()).unwrap();
            prop_assert_eq!(g2, g);
            prop_assert_eq!(s2.t.to_bits(), s.t.to_bits());
            prop_assert_eq!(s2.step_count, s.step_count);
            for (a, b) in s.u.iter().chain(&s.v).chain(&s.w).zip(s2.u.iter().chain(&s2.v).chain(&s2.w)) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
