use crate::{Error, Result, StreamElement};

/// Stream elements held back for refinement, bounded by total pin count.
#[derive(Debug, Clone, Default)]
pub struct RefineBuffer {
    capacity: u64,
    load: u64,
    elements: Vec<StreamElement>,
}

impl RefineBuffer {
    pub fn new(capacity: u64) -> Self {
        RefineBuffer {
            capacity,
            load: 0,
            elements: Vec::new(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// `Σ |nets[v]|` over the stored elements.
    pub fn load(&self) -> u64 {
        self.load
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.capacity > 0 && self.load == self.capacity
    }

    pub fn fits(&self, elem: &StreamElement) -> bool {
        self.load + elem.degree() as u64 <= self.capacity
    }

    pub fn push(&mut self, elem: StreamElement) -> Result<()> {
        if !self.fits(&elem) {
            return Err(Error::Invariant(format!(
                "vertex {} with {} nets overflows buffer at {}/{}",
                elem.vertex,
                elem.degree(),
                self.load,
                self.capacity
            )));
        }
        self.load += elem.degree() as u64;
        self.elements.push(elem);
        Ok(())
    }

    pub fn elements(&self) -> &[StreamElement] {
        &self.elements
    }

    pub fn clear(&mut self) {
        self.elements.clear();
        self.load = 0;
    }
}
