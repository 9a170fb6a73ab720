//! Numbered tape zone: `g + 1` markers, each followed by its cell number.
//!
//! The zone is built the way a machine would: count the markers with a
//! reverse-binary counter (least significant bit first, so it grows to the
//! right), which fixes the label width; spread the markers apart by that
//! width; then write each label in ordinary binary.

/// Least significant bit first, no padding; `0` is `"0"`.
pub fn reverse_binary(mut value: u64) -> String {
    if value == 0 {
        return "0".to_string();
    }
    let mut out = String::new();
    while value > 0 {
        out.push(if value & 1 == 1 { '1' } else { '0' });
        value >>= 1;
    }
    out
}

fn increment_reverse(counter: &mut Vec<u8>) {
    for bit in counter.iter_mut() {
        if *bit == b'0' {
            *bit = b'1';
            return;
        }
        *bit = b'0';
    }
    counter.push(b'1');
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutPhases {
    /// Counter after the last marker, in reverse binary.
    pub count: String,
    /// Markers spread apart, gaps zero-filled.
    pub spread: String,
    pub numbered: String,
}

pub fn indexed_layout_phases(g: u64) -> LayoutPhases {
    assert!(g >= 1, "the zone has at least two cells");
    let markers = vec![b'X'; g as usize + 1];
    let mut counter = vec![b'0'];
    for _ in markers.iter().skip(1) {
        increment_reverse(&mut counter);
    }
    let width = counter.len();

    let mut spread = Vec::with_capacity(markers.len() * (width + 1));
    for &mark in &markers {
        spread.push(mark);
        spread.extend(std::iter::repeat_n(b'0', width));
    }

    let mut numbered = spread.clone();
    for (cell, chunk) in numbered.chunks_mut(width + 1).enumerate() {
        for (i, slot) in chunk[1..].iter_mut().enumerate() {
            let bit = (cell >> (width - 1 - i)) & 1;
            *slot = b'0' + bit as u8;
        }
    }
    let text = |v: Vec<u8>| String::from_utf8(v).expect("ascii");
    LayoutPhases {
        count: text(counter),
        spread: text(spread),
        numbered: text(numbered),
    }
}

pub fn indexed_layout(g: u64) -> String {
    indexed_layout_phases(g).numbered
}
