//! Column-XOR encoding inside a multicast group and the matching receiver-side decode.
//!
//! For a group `S` of `r + 1` workers, sender `s` lays out a table with one row per
//! `k in S \ {s}` (ascending). Row `k` holds, left-aligned and in Z-set order, segment `t` of
//! each record in `Z^k`, where `t` is the rank of `s` inside `S \ {k}`. One message goes out per
//! column, carrying the XOR of the occupied entries.

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::workers::WorkerSet;

use super::segment::{payload_bytes, segment_bits, Segment};
use super::zset::{own_row, z_set_unchecked};
use super::{coded_load_parameter, Filter, RecordKey};

/// One multicast payload. Ids are 0-based; `payload` holds the XOR in its low bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodedMessage {
    pub group: WorkerSet,
    pub sender: usize,
    pub column: usize,
    pub payload: u64,
}

/// Bytes before the payload: group mask (u32), sender (u16), column (u32).
pub const MESSAGE_HEADER_BYTES: usize = 10;

impl CodedMessage {
    /// Little-endian wire form for a group with computation load `r`.
    pub fn to_bytes(&self, r: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(MESSAGE_HEADER_BYTES + payload_bytes(r));
        out.extend_from_slice(&self.group.0.to_le_bytes());
        out.extend_from_slice(&(self.sender as u16).to_le_bytes());
        out.extend_from_slice(&(self.column as u32).to_le_bytes());
        out.extend_from_slice(&self.payload.to_le_bytes()[..payload_bytes(r)]);
        out
    }

    pub fn from_bytes(bytes: &[u8], r: usize) -> Result<Self> {
        let len = MESSAGE_HEADER_BYTES + payload_bytes(r);
        if bytes.len() != len {
            return Err(Error::param(format!("coded message needs {len} bytes, got {}", bytes.len())));
        }
        let group = WorkerSet(u32::from_le_bytes(bytes[0..4].try_into().unwrap()));
        let sender = u16::from_le_bytes(bytes[4..6].try_into().unwrap()) as usize;
        let column = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let mut payload = [0u8; 8];
        payload[..payload_bytes(r)].copy_from_slice(&bytes[10..]);
        Ok(CodedMessage {
            group,
            sender,
            column,
            payload: u64::from_le_bytes(payload),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub receiver: usize,
    /// Which slice of each record this sender is responsible for.
    pub segment: usize,
    pub records: Vec<RecordKey>,
}

/// A sender's alignment table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub group: WorkerSet,
    pub sender: usize,
    pub rows: Vec<TableRow>,
}

impl Table {
    /// Number of messages the sender emits (the longest row).
    pub fn width(&self) -> usize {
        self.rows.iter().map(|r| r.records.len()).max().unwrap_or(0)
    }

    /// Occupied entries of column `c` as `(record, segment)`, in row order.
    pub fn column(&self, c: usize) -> Vec<(RecordKey, usize)> {
        self.rows
            .iter()
            .filter_map(|row| row.records.get(c).map(|&rec| (rec, row.segment)))
            .collect()
    }
}

fn check_group(alloc: &Allocation, group: WorkerSet, members: &[usize]) -> Result<usize> {
    let r = coded_load_parameter(alloc)?;
    if group.len() != r + 1 || members.iter().any(|&m| !group.contains(m)) {
        return Err(Error::Usage(format!("{group} is not a multicast group of size {} for these workers", r + 1)));
    }
    Ok(r)
}

/// The table sender `sender` builds for `group`.
pub fn sender_table(alloc: &Allocation, graph: &Graph, group: WorkerSet, sender: usize, filter: Filter<'_>) -> Result<Table> {
    check_group(alloc, group, &[sender])?;
    let rows = group
        .without(sender)
        .iter()
        .map(|k| TableRow {
            receiver: k,
            segment: group.without(k).rank_of(sender).expect("sender in group"),
            records: z_set_unchecked(alloc, graph, group, k, filter),
        })
        .collect();
    Ok(Table { group, sender, rows })
}

/// Encodes the sender's table. `value` looks up the sender's own Map outputs.
pub fn encode_group(
    alloc: &Allocation,
    graph: &Graph,
    group: WorkerSet,
    sender: usize,
    filter: Filter<'_>,
    value: impl Fn(RecordKey) -> Option<u64>,
) -> Result<Vec<CodedMessage>> {
    let r = coded_load_parameter(alloc)?;
    let table = sender_table(alloc, graph, group, sender, filter)?;
    (0..table.width())
        .map(|c| {
            let mut payload = 0u64;
            for ((i, j), t) in table.column(c) {
                let v = value((i, j)).ok_or_else(|| {
                    Error::consistency(format!(
                        "worker {} lacks the Map output v({},{})",
                        sender + 1,
                        i + 1,
                        j + 1
                    ))
                })?;
                payload ^= segment_bits(v, t, r);
            }
            Ok(CodedMessage {
                group,
                sender,
                column: c,
                payload,
            })
        })
        .collect()
}

/// Recovers the segments meant for `receiver` from the messages of `sender`.
///
/// The receiver rebuilds the sender's table: rows of other workers come from vertices it has
/// Mapped itself, its own row from the adjacency of its Reducers. `value` looks up the
/// receiver's own Map outputs.
#[allow(clippy::too_many_arguments)]
pub fn decode_group(
    alloc: &Allocation,
    graph: &Graph,
    group: WorkerSet,
    sender: usize,
    receiver: usize,
    filter: Filter<'_>,
    messages: &[CodedMessage],
    value: impl Fn(RecordKey) -> Option<u64>,
) -> Result<Vec<Segment>> {
    let r = check_group(alloc, group, &[sender, receiver])?;
    if sender == receiver {
        return Err(Error::Usage("a sender does not decode its own messages".into()));
    }
    let fail = |column: usize, message: String| Error::Decode {
        group: group.to_string(),
        sender: sender + 1,
        column: column + 1,
        message,
    };

    let mut rows = Vec::with_capacity(r);
    let mut own = None;
    for k in group.without(sender).iter() {
        let segment = group.without(k).rank_of(sender).expect("sender in group");
        if k == receiver {
            own = Some(rows.len());
            rows.push((segment, own_row(alloc, graph, group, k, filter)));
        } else {
            rows.push((segment, z_set_unchecked(alloc, graph, group, k, filter)));
        }
    }
    let own = own.expect("receiver row");
    let width = rows.iter().map(|(_, recs)| recs.len()).max().unwrap_or(0);
    if messages.len() != width {
        return Err(fail(
            messages.len().min(width),
            format!("expected {width} messages from the rebuilt table, received {}", messages.len()),
        ));
    }

    let (own_segment, own_records) = &rows[own];
    let mut out = Vec::with_capacity(own_records.len());
    for (c, msg) in messages.iter().enumerate() {
        if msg.column != c || msg.group != group || msg.sender != sender {
            return Err(fail(c, format!("message out of place (column {})", msg.column + 1)));
        }
        let Some(&(i, j)) = own_records.get(c) else {
            continue;
        };
        let mut bits = msg.payload;
        for (idx, (segment, recs)) in rows.iter().enumerate() {
            if idx == own {
                continue;
            }
            if let Some(&(a, b)) = recs.get(c) {
                let v = value((a, b))
                    .ok_or_else(|| fail(c, format!("receiver {} cannot cancel v({},{})", receiver + 1, a + 1, b + 1)))?;
                bits ^= segment_bits(v, *segment, r);
            }
        }
        out.push(Segment {
            reducer: i,
            mapper: j,
            index: *own_segment,
            bits,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::er_allocate;
    use crate::shuffle::all_records;
    use proptest::prelude::*;

    #[test]
    fn decode_rejects_wrong_message_count() {
        let g = Graph::from_edges(6, [(0, 4), (1, 5), (2, 3)]).unwrap();
        let a = er_allocate(6, 3, 2).unwrap();
        let s = WorkerSet::first(3);
        let msgs = encode_group(&a, &g, s, 0, &all_records, |(i, j)| Some((i * 10 + j) as u64)).unwrap();
        assert_eq!(msgs.len(), 2);
        let err = decode_group(&a, &g, s, 0, 2, &all_records, &msgs[..1], |_| Some(0)).unwrap_err();
        assert!(matches!(err, Error::Decode { sender: 1, .. }), "{err}");
    }

    #[test]
    fn missing_map_output_is_a_consistency_error() {
        let g = Graph::from_edges(6, [(0, 4), (1, 5), (2, 3)]).unwrap();
        let a = er_allocate(6, 3, 2).unwrap();
        let err = encode_group(&a, &g, WorkerSet::first(3), 0, &all_records, |_| None).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    proptest! {
        #[test]
        fn wire_round_trip(mask in 1u32.., sender in 0usize..32, column in 0usize..1_000_000, bits in any::<u64>(), r in 1usize..=32) {
            let payload = super::super::segment::segment_bits(bits, 0, r);
            let m = CodedMessage { group: WorkerSet(mask), sender, column, payload };
            let bytes = m.to_bytes(r);
            prop_assert_eq!(bytes.len(), MESSAGE_HEADER_BYTES + payload_bytes(r));
            prop_assert_eq!(CodedMessage::from_bytes(&bytes, r).unwrap(), m);
        }
    }
}
