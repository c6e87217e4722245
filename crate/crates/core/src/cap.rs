//! Enumeration cap: a safety rail for operations that materialize a
//! group, an orbit, or a dual space.

use crate::error::{Error, Result};

/// Default cap on the number of elements any single enumeration may
/// produce.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// Checks a requested enumeration size against a cap.
pub fn check(requested: u128, cap: u128) -> Result<()> {
    if requested > cap {
        Err(Error::CapExceeded { requested, cap })
    } else {
        Ok(())
    }
}

/// Checks against the default cap.
pub fn check_default(requested: u128) -> Result<()> {
    check(requested, DEFAULT_CAP)
}
