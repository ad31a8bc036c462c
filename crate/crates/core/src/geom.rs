//! Points of N² used as rectangle shapes, depths and shift exponents.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two commuting shift directions. `Horizontal` is σ₁, `Vertical` is σ₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Horizontal, Direction::Vertical];

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Direction::Horizontal),
            2 => Ok(Direction::Vertical),
            _ => Err(Error::Parse(format!("direction must be 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Direction::Horizontal => 1,
            Direction::Vertical => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Direction::Horizontal => Direction::Vertical,
            Direction::Vertical => Direction::Horizontal,
        }
    }

    pub fn unit(self) -> Shape {
        match self {
            Direction::Horizontal => Shape(1, 0),
            Direction::Vertical => Shape(0, 1),
        }
    }
}

/// An element of N². `.0` is the horizontal extent (columns), `.1` the vertical one (rows).
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Shape(pub usize, pub usize);

impl Shape {
    pub const ZERO: Shape = Shape(0, 0);

    pub fn cells(self) -> usize {
        self.0 * self.1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0 || self.1 == 0
    }

    /// Componentwise `≤`, the partial order directing N².
    pub fn le(self, other: Shape) -> bool {
        self.0 <= other.0 && self.1 <= other.1
    }

    /// Componentwise `<`.
    pub fn lt_both(self, other: Shape) -> bool {
        self.0 < other.0 && self.1 < other.1
    }

    pub fn add(self, other: Shape) -> Shape {
        Shape(self.0 + other.0, self.1 + other.1)
    }

    pub fn checked_sub(self, other: Shape) -> Option<Shape> {
        Some(Shape(
            self.0.checked_sub(other.0)?,
            self.1.checked_sub(other.1)?,
        ))
    }

    pub fn max(self, other: Shape) -> Shape {
        Shape(self.0.max(other.0), self.1.max(other.1))
    }

    pub fn min(self, other: Shape) -> Shape {
        Shape(self.0.min(other.0), self.1.min(other.1))
    }

    pub fn get(self, dir: Direction) -> usize {
        match dir {
            Direction::Horizontal => self.0,
            Direction::Vertical => self.1,
        }
    }

    pub fn transpose(self) -> Shape {
        Shape(self.1, self.0)
    }

    /// Degree `self − other` in Z².
    pub fn diff(self, other: Shape) -> Degree {
        Degree(
            self.0 as i64 - other.0 as i64,
            self.1 as i64 - other.1 as i64,
        )
    }

    /// All points `(i, j)` of the box `[0,self.0) × [0,self.1)` in row-major order.
    pub fn points(self) -> impl Iterator<Item = (usize, usize)> {
        (0..self.1).flat_map(move |j| (0..self.0).map(move |i| (i, j)))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `a,b`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        };
        Ok(Shape(parse(a)?, parse(b)?))
    }
}

/// An element of Z², the value group of the groupoid cocycle.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Degree(pub i64, pub i64);

impl Degree {
    pub fn add(self, other: Degree) -> Degree {
        Degree(self.0 + other.0, self.1 + other.1)
    }

    pub fn neg(self) -> Degree {
        Degree(-self.0, -self.1)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}
