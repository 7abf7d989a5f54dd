use std::fmt;

use super::GateError;

/// One logical bit carried on two rails: `(1, 0)` is zero, `(0, 1)` is one,
/// `(0, 0)` is blank and `(1, 1)` is forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum DualRailValue {
    #[default]
    Blank,
    Zero,
    One,
}

impl DualRailValue {
    pub fn from_bool(bit: bool) -> Self {
        if bit {
            DualRailValue::One
        } else {
            DualRailValue::Zero
        }
    }

    pub fn from_rails(rail0: bool, rail1: bool) -> Result<Self, GateError> {
        match (rail0, rail1) {
            (false, false) => Ok(DualRailValue::Blank),
            (true, false) => Ok(DualRailValue::Zero),
            (false, true) => Ok(DualRailValue::One),
            (true, true) => Err(GateError::ForbiddenState(String::new())),
        }
    }

    pub fn rails(self) -> (bool, bool) {
        match self {
            DualRailValue::Blank => (false, false),
            DualRailValue::Zero => (true, false),
            DualRailValue::One => (false, true),
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            DualRailValue::Blank => None,
            DualRailValue::Zero => Some(false),
            DualRailValue::One => Some(true),
        }
    }

    pub fn is_blank(self) -> bool {
        self == DualRailValue::Blank
    }

    /// Exchanges the rails; this is logical inversion.
    pub fn swapped(self) -> Self {
        match self {
            DualRailValue::Blank => DualRailValue::Blank,
            DualRailValue::Zero => DualRailValue::One,
            DualRailValue::One => DualRailValue::Zero,
        }
    }
}

impl fmt::Display for DualRailValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualRailValue::Blank => "-",
            DualRailValue::Zero => "0",
            DualRailValue::One => "1",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rail_encoding() {
        assert_eq!(DualRailValue::from_rails(true, false).unwrap(), DualRailValue::Zero);
        assert_eq!(DualRailValue::from_rails(false, true).unwrap(), DualRailValue::One);
        assert_eq!(DualRailValue::from_rails(false, false).unwrap(), DualRailValue::Blank);
        assert!(matches!(
            DualRailValue::from_rails(true, true),
            Err(GateError::ForbiddenState(_))
        ));
        for v in [DualRailValue::Blank, DualRailValue::Zero, DualRailValue::One] {
            let (a, b) = v.rails();
            assert_eq!(DualRailValue::from_rails(a, b).unwrap(), v);
            assert_eq!(v.swapped().swapped(), v);
        }
    }
}
