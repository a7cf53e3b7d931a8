use serde::{Deserialize, Serialize};

use super::RoiBox;
use crate::analog_sensor::{bits_to_bytes, DigitalFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    SensorToProcessor,
    ProcessorToSensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    /// Single-stage transfer of the whole converted array.
    FullFrame,
    CompressedFrame,
    RoiRequest,
    RoiPayload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Baseline,
    Stage1,
    Stage2,
}

/// A message on the sensor/processor link, with its content.
#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    FullFrame(DigitalFrame),
    CompressedFrame(DigitalFrame),
    RoiRequest(Vec<RoiBox>),
    RoiPayload(Vec<DigitalFrame>),
}

impl Message {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::FullFrame(_) => MessageKind::FullFrame,
            Message::CompressedFrame(_) => MessageKind::CompressedFrame,
            Message::RoiRequest(_) => MessageKind::RoiRequest,
            Message::RoiPayload(_) => MessageKind::RoiPayload,
        }
    }

    pub fn direction(&self) -> Direction {
        match self {
            Message::RoiRequest(_) => Direction::ProcessorToSensor,
            _ => Direction::SensorToProcessor,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            Message::FullFrame(_) => Stage::Baseline,
            Message::CompressedFrame(_) | Message::RoiRequest(_) => Stage::Stage1,
            Message::RoiPayload(_) => Stage::Stage2,
        }
    }

    /// Summarises the message. `word_bits` sizes each ROI coordinate.
    pub fn summarize(&self, word_bits: u32) -> MessageRecord {
        let (bytes, conversions, boxes, largest_item_bytes) = match self {
            Message::FullFrame(f) | Message::CompressedFrame(f) => {
                let b = f.payload_bytes();
                (b, f.conversion_count, 0, b)
            }
            Message::RoiRequest(boxes) => {
                let b = boxes.len() as u64 * 4 * (word_bits as u64 / 8);
                (b, 0, boxes.len() as u64, b)
            }
            Message::RoiPayload(frames) => {
                let bits: u64 = frames.iter().map(|f| f.samples() * f.adc_bits as u64).sum();
                let conv = frames.iter().map(|f| f.conversion_count).sum();
                let largest = frames.iter().map(|f| f.payload_bytes()).max().unwrap_or(0);
                (bits_to_bytes(bits), conv, frames.len() as u64, largest)
            }
        };
        MessageRecord {
            direction: self.direction(),
            kind: self.kind(),
            stage: self.stage(),
            bytes,
            conversions,
            boxes,
            largest_item_bytes,
        }
    }
}

/// What the ledger keeps for each message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub direction: Direction,
    pub kind: MessageKind,
    pub stage: Stage,
    pub bytes: u64,
    pub conversions: u64,
    /// Boxes carried by a request, or frames carried by a payload.
    pub boxes: u64,
    /// Size of the largest single frame in the message (buffer high-water mark).
    pub largest_item_bytes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerTotals {
    pub bytes_s_to_p: u64,
    pub bytes_p_to_s: u64,
    pub total_conversions: u64,
    pub baseline_bytes: u64,
    pub baseline_conversions: u64,
    pub stage1_bytes_s_to_p: u64,
    pub stage1_bytes_p_to_s: u64,
    pub stage1_conversions: u64,
    pub stage2_bytes_s_to_p: u64,
    pub stage2_conversions: u64,
}

impl LedgerTotals {
    fn add(&mut self, r: &MessageRecord) {
        match r.direction {
            Direction::SensorToProcessor => self.bytes_s_to_p += r.bytes,
            Direction::ProcessorToSensor => self.bytes_p_to_s += r.bytes,
        }
        self.total_conversions += r.conversions;
        match (r.stage, r.direction) {
            (Stage::Baseline, _) => {
                self.baseline_bytes += r.bytes;
                self.baseline_conversions += r.conversions;
            }
            (Stage::Stage1, Direction::SensorToProcessor) => {
                self.stage1_bytes_s_to_p += r.bytes;
                self.stage1_conversions += r.conversions;
            }
            (Stage::Stage1, Direction::ProcessorToSensor) => {
                self.stage1_bytes_p_to_s += r.bytes;
                self.stage1_conversions += r.conversions;
            }
            (Stage::Stage2, _) => {
                self.stage2_bytes_s_to_p += r.bytes;
                self.stage2_conversions += r.conversions;
            }
        }
    }

    /// Combines totals from independent sessions.
    pub fn merge(&mut self, other: &LedgerTotals) {
        self.bytes_s_to_p += other.bytes_s_to_p;
        self.bytes_p_to_s += other.bytes_p_to_s;
        self.total_conversions += other.total_conversions;
        self.baseline_bytes += other.baseline_bytes;
        self.baseline_conversions += other.baseline_conversions;
        self.stage1_bytes_s_to_p += other.stage1_bytes_s_to_p;
        self.stage1_bytes_p_to_s += other.stage1_bytes_p_to_s;
        self.stage1_conversions += other.stage1_conversions;
        self.stage2_bytes_s_to_p += other.stage2_bytes_s_to_p;
        self.stage2_conversions += other.stage2_conversions;
    }
}

/// Append-only log of link traffic for one session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferLedger {
    word_bits: u32,
    messages: Vec<MessageRecord>,
    totals: LedgerTotals,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl TransferLedger {
    pub fn new(word_bits: u32) -> Self {
        Self {
            word_bits,
            messages: Vec::new(),
            totals: LedgerTotals::default(),
            notes: Vec::new(),
        }
    }

    pub fn record(&mut self, msg: &Message) -> &MessageRecord {
        let rec = msg.summarize(self.word_bits);
        self.totals.add(&rec);
        self.messages.push(rec);
        self.messages.last().unwrap()
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn messages(&self) -> &[MessageRecord] {
        &self.messages
    }

    pub fn totals(&self) -> &LedgerTotals {
        &self.totals
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn find(&self, kind: MessageKind) -> Option<&MessageRecord> {
        self.messages.iter().find(|m| m.kind == kind)
    }

    /// Recomputes totals from the message list.
    pub fn recount(&self) -> LedgerTotals {
        let mut t = LedgerTotals::default();
        for m in &self.messages {
            t.add(m);
        }
        t
    }
}
