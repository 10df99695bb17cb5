//! Named per-eye display resolutions.

use std::fmt;
use std::str::FromStr;

use crate::error::VafrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Resolution {
    pub width: u32,
    pub height: u32,
}

impl Resolution {
    pub const fn new(width: u32, height: u32) -> Self {
        Resolution { width, height }
    }

    pub fn pixels(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Accepts `WxH` or a preset name (`1080p`, `2K`, `4K`, `6K`, `8K`, `retinal`).
impl FromStr for Resolution {
    type Err = VafrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(p) = PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(s)) {
            return Ok(p.resolution);
        }
        let bad = || VafrError::invalid("resolution", format!("expected WxH or a preset name, got {s:?}"));
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let width: u32 = w.trim().parse().map_err(|_| bad())?;
        let height: u32 = h.trim().parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        Ok(Resolution { width, height })
    }
}

impl serde::Serialize for Resolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Resolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub resolution: Resolution,
}

/// Per-eye resolutions of the pixel/ray count table. "2K" and "6K" are
/// inferred from that table's GT pixel counts (2560×1440, 5760×3240).
pub const PRESETS: [Preset; 6] = [
    Preset { name: "1080p", resolution: Resolution::new(1920, 1080) },
    Preset { name: "2K", resolution: Resolution::new(2560, 1440) },
    Preset { name: "4K", resolution: Resolution::new(3840, 2160) },
    Preset { name: "6K", resolution: Resolution::new(5760, 3240) },
    Preset { name: "8K", resolution: Resolution::new(7680, 4320) },
    Preset { name: "retinal", resolution: Resolution::new(11520, 6480) },
];

/// The rows of the pixel/ray count table, 2K through retinal.
pub fn table_presets() -> &'static [Preset] {
    &PRESETS[1..]
}

pub fn preset(name: &str) -> Option<Resolution> {
    PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .map(|p| p.resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse() {
        assert_eq!("1920x1080".parse::<Resolution>().unwrap(), Resolution::new(1920, 1080));
        assert_eq!("retinal".parse::<Resolution>().unwrap(), Resolution::new(11520, 6480));
        assert_eq!("8k".parse::<Resolution>().unwrap().pixels(), 33_177_600);
        assert!("0x10".parse::<Resolution>().is_err());
        assert!("wide".parse::<Resolution>().is_err());
    }

    #[test]
    fn table_counts() {
        let px: Vec<u64> = table_presets().iter().map(|p| p.resolution.pixels()).collect();
        assert_eq!(px, [3_686_400, 8_294_400, 18_662_400, 33_177_600, 74_649_600]);
    }
}
