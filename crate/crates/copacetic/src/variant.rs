//! Color alphabet and per-color capacity vectors.
//!
//! A variant fixes the number of edge/vertex colors `k` and, for each color
//! `i`, the maximum number of vertices a single parameter may color `i` on
//! the boundary of one unit color-`i` ball. Two named instances are used
//! throughout: [`TheoryVariant::standard`] (two colors, capacities 1 and 2)
//! and [`TheoryVariant::triple`] (three colors, every capacity 1).

use std::fmt;

use crate::error::CoreError;

/// A 1-based color in `1..=k`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Color(u8);

impl Color {
    /// Construct a color; zero is rejected. Range against `k` is checked by
    /// consumers that know the variant.
    pub fn new(value: u8) -> Result<Color, CoreError> {
        if value == 0 {
            return Err(CoreError::ColorOutOfRange { color: 0, k: 0 });
        }
        Ok(Color(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of colors plus per-color capacities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TheoryVariant {
    capacities: Vec<usize>,
}

impl TheoryVariant {
    /// `k >= 2`, every capacity `>= 1`.
    pub fn new(capacities: Vec<usize>) -> Result<TheoryVariant, CoreError> {
        if capacities.len() < 2 || capacities.len() > u8::MAX as usize {
            return Err(CoreError::BadVariant(format!(
                "need between 2 and 255 colors, got {}",
                capacities.len()
            )));
        }
        if let Some(pos) = capacities.iter().position(|&c| c == 0) {
            return Err(CoreError::BadVariant(format!(
                "capacity of color {} must be at least 1",
                pos + 1
            )));
        }
        Ok(TheoryVariant { capacities })
    }

    /// Two colors with capacities 1 and 2.
    pub fn standard() -> TheoryVariant {
        TheoryVariant {
            capacities: vec![1, 2],
        }
    }

    /// Three colors, each with capacity 1.
    pub fn triple() -> TheoryVariant {
        TheoryVariant {
            capacities: vec![1, 1, 1],
        }
    }

    pub fn color_count(&self) -> u8 {
        self.capacities.len() as u8
    }

    pub fn contains(&self, color: Color) -> bool {
        color.get() as usize <= self.capacities.len()
    }

    /// Capacity of a color; errors if the color is out of range.
    pub fn capacity(&self, color: Color) -> Result<usize, CoreError> {
        self.capacities
            .get(color.get() as usize - 1)
            .copied()
            .ok_or(CoreError::ColorOutOfRange {
                color: color.get(),
                k: self.color_count(),
            })
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    /// All colors in ascending order.
    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        (1..=self.color_count()).map(Color)
    }

    /// The smallest color distinct from `avoid`.
    pub fn smallest_other(&self, avoid: Color) -> Color {
        if avoid.get() == 1 {
            Color(2)
        } else {
            Color(1)
        }
    }

    /// The smallest color not in `avoid`; `None` if every color is excluded.
    pub fn smallest_outside(&self, avoid: &[Color]) -> Option<Color> {
        self.colors().find(|c| !avoid.contains(c))
    }
}
