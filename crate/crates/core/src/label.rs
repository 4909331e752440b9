use std::fmt;

/// Which half of the two-sorted label space a label belongs to.
///
/// `Vertex` labels (positive integers) name v-vertices, `Edge` labels
/// (negative integers) name e-vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Vertex,
    Edge,
}

/// A nonzero label. The sign carries the sort.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("label must be nonzero")]
pub struct ZeroLabel;

impl Label {
    pub fn new(value: i32) -> Result<Self, ZeroLabel> {
        if value == 0 {
            Err(ZeroLabel)
        } else {
            Ok(Label(value))
        }
    }

    /// Vertex-sort label `n` (n ≥ 1).
    pub const fn vertex(n: u32) -> Self {
        assert!(n >= 1 && n <= i32::MAX as u32, "vertex label out of range");
        Label(n as i32)
    }

    /// Edge-sort label `-n` (n ≥ 1).
    pub const fn edge(n: u32) -> Self {
        assert!(n >= 1 && n <= i32::MAX as u32, "edge label out of range");
        Label(-(n as i32))
    }

    pub fn value(self) -> i32 {
        self.0
    }

    pub fn sort(self) -> Sort {
        if self.0 > 0 {
            Sort::Vertex
        } else {
            Sort::Edge
        }
    }

    pub fn is_vertex(self) -> bool {
        self.0 > 0
    }

    pub fn is_edge(self) -> bool {
        self.0 < 0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<i32> for Label {
    type Error = ZeroLabel;

    fn try_from(value: i32) -> Result<Self, Self::Error> {
        Label::new(value)
    }
}
