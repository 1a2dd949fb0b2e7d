//! Seeded generators for the two benchmark families, emitted as model
//! text for [`crate::modelc`].

mod roborta;
mod uav;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

pub use roborta::{gen_roborta, LightVersion, RobortaConfig, MAX_CELL_REWARD};
pub use uav::{gen_uav, Road, UavConfig, MAX_WAYPOINT_REWARD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CasegenError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn seeded_rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// A literal the model lexer reads back as the same real.
fn real_literal(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_literals_round_trip() {
        for x in [0.0, 0.1, 1e-7, 0.5, 1.0 / 3.0] {
            let s = real_literal(x);
            assert!(s.contains('.') || s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
