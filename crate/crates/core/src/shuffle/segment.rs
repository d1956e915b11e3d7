use crate::graphs::VertexId;

/// Width in bits of one intermediate value (an `f64`).
pub const VALUE_BITS: u32 = 64;

/// Bit range `[start, start + len)` of segment `index` when a value is cut into `parts` slices.
pub fn segment_range(index: usize, parts: usize) -> (u32, u32) {
    let bits = VALUE_BITS as usize;
    let start = index * bits / parts;
    let end = (index + 1) * bits / parts;
    (start as u32, (end - start) as u32)
}

fn mask(len: u32) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Slice `index` of `value`, shifted down to bit 0.
pub fn segment_bits(value: u64, index: usize, parts: usize) -> u64 {
    let (start, len) = segment_range(index, parts);
    if start >= 64 {
        return 0;
    }
    (value >> start) & mask(len)
}

/// Bytes needed on the wire for one segment payload.
pub fn payload_bytes(parts: usize) -> usize {
    (VALUE_BITS as usize).div_ceil(parts).div_ceil(8)
}

/// One slice of the intermediate value `v_{reducer, mapper}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub reducer: VertexId,
    pub mapper: VertexId,
    pub index: usize,
    pub bits: u64,
}

/// Rebuilds a value from its `parts` segments. Returns `None` unless every index appears once.
pub fn reassemble(segments: &[Segment], parts: usize) -> Option<u64> {
    if segments.len() != parts {
        return None;
    }
    let mut seen = 0u64;
    let mut value = 0u64;
    for s in segments {
        if s.index >= parts || seen & (1 << s.index) != 0 {
            return None;
        }
        seen |= 1 << s.index;
        let (start, len) = segment_range(s.index, parts);
        if s.bits & !mask(len) != 0 {
            return None;
        }
        value |= s.bits << start;
    }
    Some(value)
}
