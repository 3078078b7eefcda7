use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::geometry::ExclusionShape;
use crate::params::NetworkParams;

/// Thinning taxonomy: the two dual-zone processes and their Matérn carrier-sense baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessType {
    TypeI,
    TypeII,
    MaternI,
    MaternII,
}

/// Retention rule, independent of the exclusion-region shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThinningRule {
    /// Retained iff no other potential transmitter lies in the exclusion region.
    Void,
    /// Retained iff every potential transmitter in the exclusion region carries a larger mark.
    EarliestMark,
}

impl ProcessType {
    pub const ALL: [ProcessType; 4] = [
        ProcessType::TypeI,
        ProcessType::TypeII,
        ProcessType::MaternI,
        ProcessType::MaternII,
    ];

    pub fn rule(self) -> ThinningRule {
        match self {
            ProcessType::TypeI | ProcessType::MaternI => ThinningRule::Void,
            ProcessType::TypeII | ProcessType::MaternII => ThinningRule::EarliestMark,
        }
    }

    pub fn is_matern(self) -> bool {
        matches!(self, ProcessType::MaternI | ProcessType::MaternII)
    }

    /// The exclusion region this process applies around each pair.
    pub fn exclusion(self, params: &NetworkParams) -> ExclusionShape {
        if self.is_matern() {
            ExclusionShape::carrier_sense_only(params)
        } else {
            ExclusionShape::dual_zone(params)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessType::TypeI => "typeI",
            ProcessType::TypeII => "typeII",
            ProcessType::MaternI => "maternI",
            ProcessType::MaternII => "maternII",
        }
    }
}

impl fmt::Display for ProcessType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcessType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "typei" | "type1" | "i" | "1" => Ok(ProcessType::TypeI),
            "typeii" | "type2" | "ii" | "2" => Ok(ProcessType::TypeII),
            "materni" | "matern1" | "csmai" | "csma1" => Ok(ProcessType::MaternI),
            "maternii" | "matern2" | "csmaii" | "csma2" => Ok(ProcessType::MaternII),
            _ => Err(Error::InvalidConfig {
                key: "process".into(),
                reason: format!("unknown process type `{s}`"),
            }),
        }
    }
}
