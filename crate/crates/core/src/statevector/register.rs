use crate::error::{QdcaError, Result};

/// A contiguous range of qubits `offset..offset + width`. Qubit `offset`
/// holds the least-significant bit of the register value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    offset: usize,
    width: usize,
}

impl Register {
    pub const fn new(offset: usize, width: usize) -> Self {
        Self { offset, width }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn end(&self) -> usize {
        self.offset + self.width
    }

    /// Number of basis values, `2^width`.
    pub fn dim(&self) -> usize {
        1 << self.width
    }

    pub fn contains(&self, qubit: usize) -> bool {
        (self.offset..self.end()).contains(&qubit)
    }

    pub fn overlaps(&self, other: &Register) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }

    /// Bit mask of this register inside a basis index.
    pub fn mask(&self) -> usize {
        (self.dim() - 1) << self.offset
    }

    /// Register value encoded in basis index `index`.
    #[inline]
    pub fn value_of(&self, index: usize) -> usize {
        (index >> self.offset) & (self.dim() - 1)
    }

    pub fn qubit(&self, i: usize) -> usize {
        debug_assert!(i < self.width);
        self.offset + i
    }
}

/// Named, disjoint registers inside one state vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegisterMap {
    registers: Vec<(String, Register)>,
}

impl RegisterMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register directly above the highest allocated qubit.
    pub fn push(&mut self, name: &str, width: usize) -> Register {
        let offset = self
            .registers
            .iter()
            .map(|(_, r)| r.end())
            .max()
            .unwrap_or(0);
        let reg = Register::new(offset, width);
        self.registers.push((name.to_owned(), reg));
        reg
    }

    pub fn insert(&mut self, name: &str, reg: Register) -> Result<()> {
        if self.get(name).is_some() || self.registers.iter().any(|(_, r)| r.overlaps(&reg)) {
            return Err(QdcaError::RegisterOverlap(name.to_owned()));
        }
        self.registers.push((name.to_owned(), reg));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Register> {
        self.registers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| *r)
    }

    /// Total qubits spanned.
    pub fn num_qubits(&self) -> usize {
        self.registers
            .iter()
            .map(|(_, r)| r.end())
            .max()
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Register)> {
        self.registers.iter().map(|(n, r)| (n.as_str(), *r))
    }
}
