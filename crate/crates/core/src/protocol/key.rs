use crate::qstate::BellLabel;

/// Key bits as a sequence of Bell labels, two bits each, tagged with the
/// record number of the copy they came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyMaterial {
    records: Vec<u32>,
    labels: Vec<BellLabel>,
}

impl KeyMaterial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(u32, BellLabel)>) -> Self {
        let (records, labels) = entries.into_iter().unzip();
        KeyMaterial { records, labels }
    }

    pub fn push(&mut self, record_number: u32, label: BellLabel) {
        self.records.push(record_number);
        self.labels.push(label);
    }

    pub fn labels(&self) -> &[BellLabel] {
        &self.labels
    }

    pub fn records(&self) -> &[u32] {
        &self.records
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, BellLabel)> + '_ {
        self.records.iter().copied().zip(self.labels.iter().copied())
    }

    pub fn bit_len(&self) -> usize {
        2 * self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Bits in emission order, each label high bit first.
    pub fn bits(&self) -> Vec<bool> {
        self.labels.iter().flat_map(|l| [l.bits() & 0b10 != 0, l.bits() & 0b01 != 0]).collect()
    }

    /// Lowercase hex, most significant bit first. When the bit count is not
    /// a multiple of four the last nibble is padded with two zero bits.
    pub fn to_hex(&self) -> String {
        self.labels
            .chunks(2)
            .map(|pair| {
                let hi = pair[0].bits();
                let lo = pair.get(1).map_or(0, |l| l.bits());
                char::from_digit(u32::from((hi << 2) | lo), 16).expect("nibble")
            })
            .collect()
    }
}
